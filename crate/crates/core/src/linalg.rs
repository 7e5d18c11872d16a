//! Exact linear algebra over a [`Field`]: sparse vectors, an incremental
//! echelon basis (rank, membership, kernels) and small dense matrices.

use std::collections::BTreeMap;

use crate::field::Field;

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SparseVec<F> {
    pub entries: Vec<(usize, F)>,
}

impl<F: Field> SparseVec<F> {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn from_map(map: BTreeMap<usize, F>) -> Self {
        SparseVec {
            entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    /// Builds from unsorted entries, summing duplicates.
    pub fn from_unsorted(items: impl IntoIterator<Item = (usize, F)>) -> Self {
        let mut map: BTreeMap<usize, F> = BTreeMap::new();
        for (i, v) in items {
            *map.entry(i).or_insert_with(F::zero) += v;
        }
        Self::from_map(map)
    }

    pub fn from_dense(v: &[F]) -> Self {
        SparseVec {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<F> {
        let mut out = vec![F::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> F {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => F::zero(),
        }
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, v)| (*i, v.clone() * c.clone()))
                .collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &F, other: &Self) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < other.entries.len() {
            let ia = self.entries.get(a).map(|e| e.0).unwrap_or(usize::MAX);
            let ib = other.entries.get(b).map(|e| e.0).unwrap_or(usize::MAX);
            if ia < ib {
                out.push(self.entries[a].clone());
                a += 1;
            } else if ib < ia {
                out.push((ib, other.entries[b].1.clone() * c.clone()));
                b += 1;
            } else {
                let v = self.entries[a].1.clone() + other.entries[b].1.clone() * c.clone();
                if !v.is_zero() {
                    out.push((ia, v));
                }
                a += 1;
                b += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(&-F::one(), other)
    }

    /// Keeps only indices satisfying the predicate.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        SparseVec {
            entries: self.entries.iter().filter(|(i, _)| keep(*i)).cloned().collect(),
        }
    }
}

/// Row-echelon basis of a growing subspace, keyed by pivot column. Each
/// stored row has a leading 1 at its pivot; rows are not fully reduced.
/// Optionally tracks, for each stored row, its expression in the inserted
/// vectors, which yields kernels.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    rows: BTreeMap<usize, SparseVec<F>>,
    combos: Option<BTreeMap<usize, SparseVec<F>>>,
    inserted: usize,
}

impl<F: Field> Default for Echelon<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Field> Echelon<F> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new(), combos: None, inserted: 0 }
    }

    pub fn tracking() -> Self {
        Echelon { rows: BTreeMap::new(), combos: Some(BTreeMap::new()), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Fully reduces `v` against the basis; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &SparseVec<F>) -> SparseVec<F> {
        self.reduce_tracked(v.clone(), SparseVec::new()).0
    }

    fn reduce_tracked(&self, mut v: SparseVec<F>, mut combo: SparseVec<F>) -> (SparseVec<F>, SparseVec<F>) {
        let mut pos = 0;
        while pos < v.entries.len() {
            let (col, coef) = v.entries[pos].clone();
            if let Some(row) = self.rows.get(&col) {
                let c = -coef;
                v = v.add_scaled(&c, row);
                if let Some(combos) = &self.combos {
                    combo = combo.add_scaled(&c, &combos[&col]);
                }
                // entries before `pos` are untouched since row starts at col
            } else {
                pos += 1;
            }
        }
        (v, combo)
    }

    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns true if it enlarged the span. With tracking,
    /// a dependent insert returns false and records nothing; use
    /// [`Echelon::insert_or_relation`] to get the relation.
    pub fn insert(&mut self, v: &SparseVec<F>) -> bool {
        self.insert_or_relation(v).is_none()
    }

    /// Inserts `v`. If dependent, returns `Some(relation)` expressing a
    /// vanishing combination of inserted vectors (tracking mode), otherwise
    /// `None`. Without tracking a dependent insert returns `Some(empty)`.
    pub fn insert_or_relation(&mut self, v: &SparseVec<F>) -> Option<SparseVec<F>> {
        let idx = self.inserted;
        self.inserted += 1;
        let start = SparseVec { entries: vec![(idx, F::one())] };
        let (r, combo) = if self.combos.is_some() {
            self.reduce_leading(v.clone(), start)
        } else {
            self.reduce_leading(v.clone(), SparseVec::new())
        };
        match r.leading() {
            None => Some(combo),
            Some(col) => {
                let lead = r.entries[0].1.clone();
                let inv = lead.inv().expect("nonzero leading entry");
                self.rows.insert(col, r.scale(&inv));
                if let Some(combos) = &mut self.combos {
                    combos.insert(col, combo.scale(&inv));
                }
                None
            }
        }
    }

    /// Reduces only until the first column without a pivot.
    fn reduce_leading(&self, mut v: SparseVec<F>, mut combo: SparseVec<F>) -> (SparseVec<F>, SparseVec<F>) {
        while let Some((col, coef)) = v.entries.first().cloned() {
            match self.rows.get(&col) {
                Some(row) => {
                    let c = -coef;
                    v = v.add_scaled(&c, row);
                    if let Some(combos) = &self.combos {
                        combo = combo.add_scaled(&c, &combos[&col]);
                    }
                }
                None => break,
            }
        }
        (v, combo)
    }

    /// Coordinates of `v` in terms of the inserted vectors (tracking mode);
    /// `None` if `v` is outside the span.
    pub fn solve(&self, v: &SparseVec<F>) -> Option<SparseVec<F>> {
        assert!(self.combos.is_some(), "solve requires a tracking echelon");
        let (r, combo) = self.reduce_tracked(v.clone(), SparseVec::new());
        // reduce_tracked accumulates -coefficients; flip to express v itself
        r.is_zero().then(|| combo.scale(&-F::one()))
    }

    /// Basis vectors in fully reduced row echelon form.
    pub fn reduced_basis(&self) -> Vec<SparseVec<F>> {
        let cols: Vec<usize> = self.rows.keys().copied().collect();
        let mut out: BTreeMap<usize, SparseVec<F>> = BTreeMap::new();
        for &c in cols.iter().rev() {
            let mut row = self.rows[&c].clone();
            let mut pos = 1;
            while pos < row.entries.len() {
                let (col, coef) = row.entries[pos].clone();
                if let Some(other) = out.get(&col) {
                    row = row.add_scaled(&-coef, other);
                } else {
                    pos += 1;
                }
            }
            out.insert(c, row);
        }
        out.into_values().collect()
    }

    pub fn basis(&self) -> impl Iterator<Item = &SparseVec<F>> {
        self.rows.values()
    }
}

pub fn rank<F: Field>(vectors: &[SparseVec<F>]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Basis of `{c : sum_i c_i v_i = 0}` for the given vectors.
pub fn kernel_of_columns<F: Field>(vectors: &[SparseVec<F>]) -> Vec<SparseVec<F>> {
    let mut e = Echelon::tracking();
    let mut out = Vec::new();
    for v in vectors {
        if let Some(rel) = e.insert_or_relation(v) {
            out.push(rel);
        }
    }
    out
}

/// Null space of the system whose equations are `rows` (each a sparse
/// linear form in `nvars` unknowns).
pub fn nullspace<F: Field>(rows: &[SparseVec<F>], nvars: usize) -> Vec<SparseVec<F>> {
    let mut cols: Vec<Vec<(usize, F)>> = vec![Vec::new(); nvars];
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in &row.entries {
            cols[*c].push((r, v.clone()));
        }
    }
    let cols: Vec<SparseVec<F>> = cols.into_iter().map(|entries| SparseVec { entries }).collect();
    kernel_of_columns(&cols)
}

/// Echelon of a span of vectors.
pub fn span<F: Field>(vectors: impl IntoIterator<Item = SparseVec<F>>) -> Echelon<F> {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(&v);
    }
    e
}

/// Dense matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn scalar(n: usize, c: F) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] += v;
    }

    pub fn column(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row(&self, r: usize) -> Vec<F> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += a.clone() * x.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-F::one()))
    }

    pub fn scale(&self, c: &F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn row_vectors(&self) -> Vec<SparseVec<F>> {
        (0..self.rows).map(|r| SparseVec::from_dense(&self.row(r))).collect()
    }

    pub fn column_vectors(&self) -> Vec<SparseVec<F>> {
        (0..self.cols).map(|c| SparseVec::from_dense(&self.column(c))).collect()
    }

    pub fn rank(&self) -> usize {
        rank(&self.row_vectors())
    }

    /// Basis of the right kernel `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        kernel_of_columns(&self.column_vectors())
            .into_iter()
            .map(|v| v.to_dense(self.cols))
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut e = Echelon::tracking();
        for c in self.column_vectors() {
            if !e.insert(&c) {
                return None;
            }
        }
        // column j of the inverse expresses e_j in the columns of self
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            let unit = SparseVec { entries: vec![(j, F::one())] };
            let coords = e.solve(&unit)?;
            for (i, v) in coords.entries {
                inv.set(i, j, v);
            }
        }
        Some(inv)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &Self) -> Self {
        let mut out = Self::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                out.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        out
    }
}
