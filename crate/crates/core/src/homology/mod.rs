//! Filtration pieces of the resolution of `H` (or of a finite-dimensional
//! module `m`) by induced modules `H(eps_F) ⊗_{H_F^†} m`, and their
//! exactness by exact rank computations.
//!
//! A cell of level `i` is `(F, d, v)`: `F` a representative in `F_i`,
//! `d` in `D_F^†`, `v` a basis label of the coefficients. It stands for
//! `tau_d ⊗ v`. The left `H`-action moves `tau_x ⊗ v` to
//! `eps_F(h) tau_{d'} ⊗ tau_h v` where `x = d' h` with `h` in `W~_F^†`.

pub mod dual;

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::apartment::Apartment;
use crate::field::Field;
use crate::hecke::module::FiniteModule;
use crate::hecke::{HeckeAlgebra, HeckeError};
use crate::linalg::{Echelon, SparseVec};
use crate::parahoric::ParahoricError;
use crate::weyl::pro_p::ProPElt;
use crate::weyl::{Mask, WeylElt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Parahoric(#[from] ParahoricError),
    #[error("a differential leaves the truncation window at level {0}")]
    TruncationTooSmall(usize),
    #[error("the construction needs a semisimple root datum")]
    NotSemisimpleDatum,
    #[error("cocycles of degree <= {n} are not coboundaries within margin {margin}")]
    MarginExhausted { n: usize, margin: usize },
    #[error("an intertwiner could not be expressed in the computed basis")]
    Inconsistent,
}

impl From<crate::weyl::WeylError> for HomologyError {
    fn from(e: crate::weyl::WeylError) -> Self {
        HomologyError::Hecke(e.into())
    }
}

/// Coefficients of the induced terms: either `H` itself (the bimodule
/// resolution, truncated by total length) or a finite-dimensional module.
pub trait Coefficients<F: Field>: Sync {
    type Label: Clone + Ord + Hash + Debug + Send + Sync;

    /// Basis labels of degree at most `max_degree`.
    fn labels(&self, alg: &HeckeAlgebra<F>, max_degree: usize) -> Result<Vec<Self::Label>, HomologyError>;

    fn degree(&self, alg: &HeckeAlgebra<F>, v: &Self::Label) -> usize;

    /// `tau_x v`.
    fn act(&self, alg: &HeckeAlgebra<F>, x: &ProPElt, v: &Self::Label) -> Vec<(Self::Label, F)>;
}

/// `H` as coefficients; `cap` bounds the central part for non-semisimple data.
#[derive(Clone, Copy, Debug)]
pub struct Regular {
    pub cap: Option<i32>,
}

impl<F: Field> Coefficients<F> for Regular {
    type Label = ProPElt;

    fn labels(&self, alg: &HeckeAlgebra<F>, max_degree: usize) -> Result<Vec<ProPElt>, HomologyError> {
        Ok(alg.filtration_basis(max_degree, self.cap)?)
    }

    fn degree(&self, alg: &HeckeAlgebra<F>, v: &ProPElt) -> usize {
        alg.length(v)
    }

    fn act(&self, alg: &HeckeAlgebra<F>, x: &ProPElt, v: &ProPElt) -> Vec<(ProPElt, F)> {
        alg.mul_basis(x, v).terms.into_iter().collect()
    }
}

pub struct Finite<'m, F> {
    pub module: &'m FiniteModule<F>,
}

impl<F: Field> Coefficients<F> for Finite<'_, F> {
    type Label = usize;

    fn labels(&self, _: &HeckeAlgebra<F>, _: usize) -> Result<Vec<usize>, HomologyError> {
        Ok((0..self.module.dim).collect())
    }

    fn degree(&self, _: &HeckeAlgebra<F>, _: &usize) -> usize {
        0
    }

    fn act(&self, alg: &HeckeAlgebra<F>, x: &ProPElt, v: &usize) -> Vec<(usize, F)> {
        let m = self.module.act_basis(alg, x);
        (0..self.module.dim).map(|i| (i, m.get(i, *v).clone())).filter(|(_, c)| !c.is_zero()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell<L> {
    pub face: usize,
    pub d: WeylElt,
    pub label: L,
}

/// Finite complex `C_d -> ... -> C_0 -> target`, differentials by columns.
#[derive(Clone, Debug, Serialize)]
pub struct TruncatedComplex<F> {
    pub dims: Vec<usize>,
    pub target_dim: usize,
    /// `diffs[0]` is the augmentation `C_0 -> target`, `diffs[i]` maps
    /// `C_i -> C_{i-1}`.
    #[serde(skip)]
    pub diffs: Vec<Vec<SparseVec<F>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub dims: Vec<usize>,
    pub target_dim: usize,
    /// Rank of the augmentation, then of `C_i -> C_{i-1}` for `i >= 1`.
    pub ranks: Vec<usize>,
    /// Homology at `C_0..C_d`, then the cokernel of the augmentation.
    pub homology: Vec<usize>,
    pub squares_vanish: bool,
    pub exact: bool,
}

fn apply<F: Field>(cols: &[SparseVec<F>], v: &SparseVec<F>) -> SparseVec<F> {
    let mut acc: HashMap<usize, F> = HashMap::new();
    for (j, c) in &v.entries {
        for (i, a) in &cols[*j].entries {
            *acc.entry(*i).or_insert_with(F::zero) += a.clone() * c.clone();
        }
    }
    SparseVec::from_unsorted(acc)
}

impl<F: Field> TruncatedComplex<F> {
    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    /// `diffs[i-1] o diffs[i] = 0` for `i = 1..=top`.
    pub fn squares_vanish(&self) -> bool {
        (1..self.diffs.len()).all(|i| self.diffs[i].par_iter().all(|col| apply(&self.diffs[i - 1], col).is_zero()))
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.diffs.par_iter().map(|cols| crate::linalg::rank(cols)).collect()
    }

    pub fn exactness(&self) -> ExactnessReport {
        let ranks = self.ranks();
        let squares_vanish = self.squares_vanish();
        let d = self.top();
        let mut homology = Vec::with_capacity(d + 2);
        for i in 0..=d {
            let kernel = self.dims[i] - ranks[i];
            let image = if i < d { ranks[i + 1] } else { 0 };
            homology.push(kernel.saturating_sub(image));
        }
        homology.push(self.target_dim - ranks[0]);
        let exact = squares_vanish && homology.iter().all(|h| *h == 0);
        ExactnessReport { dims: self.dims.clone(), target_dim: self.target_dim, ranks, homology, squares_vanish, exact }
    }

    /// Differentials as `(row, column, value)` triplets.
    pub fn triplets(&self) -> Vec<Vec<(usize, usize, String)>> {
        self.diffs
            .iter()
            .map(|cols| {
                cols.iter()
                    .enumerate()
                    .flat_map(|(j, col)| col.entries.iter().map(move |(i, c)| (*i, j, c.to_string())))
                    .collect()
            })
            .collect()
    }
}

/// The pieces shared by the resolution and its dual: faces, their
/// masks, distinguished representatives and the rewriting `x = d h`.
pub struct Induction<'a, F> {
    pub alg: &'a HeckeAlgebra<F>,
    pub apt: &'a Apartment,
}

impl<'a, F: Field> Induction<'a, F> {
    pub fn new(alg: &'a HeckeAlgebra<F>, apt: &'a Apartment) -> Self {
        Induction { alg, apt }
    }

    pub fn mask(&self, level: usize, face: usize) -> Mask {
        self.apt.reps[level][face].mask
    }

    /// `x = d~ h` with `d` in `D_F^†` and `h` in `W~_F^†`, plus `eps_F(h)`.
    pub fn rewrite(&self, mask: Mask, x: &ProPElt) -> (WeylElt, ProPElt, i8) {
        let weyl = self.alg.weyl();
        let g = &self.alg.group;
        let (d, _) = weyl.factor(mask, &x.w, true);
        let h = g.mul(&g.inv(&g.lift(&d)), x);
        let eps = self.apt.eps_omega_elt(weyl, mask, &weyl.omega_part(&h.w));
        (d, h, eps)
    }

    pub fn reps(&self, mask: Mask, max_len: usize) -> Result<Vec<WeylElt>, HomologyError> {
        Ok(self.alg.weyl().distinguished_reps(mask, max_len, true, Some(0))?)
    }

    /// `eps_F` of a vertex orientation relative to the positive one; this
    /// is the sign the augmentation carries on `reps[0][face]`.
    pub fn vertex_sign(&self, face: usize) -> i8 {
        self.apt.reps[0][face].sign
    }
}

type Index<L> = HashMap<Cell<L>, usize>;

pub(crate) fn cells<F: Field, M: Coefficients<F>>(
    ind: &Induction<F>,
    coeff: &M,
    level: usize,
    n: usize,
) -> Result<Vec<Cell<M::Label>>, HomologyError> {
    let alg = ind.alg;
    let labels = coeff.labels(alg, n)?;
    let mut out = Vec::new();
    for face in 0..ind.apt.reps[level].len() {
        for d in ind.reps(ind.mask(level, face), n)? {
            let l = alg.weyl().length(&d);
            for v in labels.iter().filter(|v| l + coeff.degree(alg, v) <= n) {
                out.push(Cell { face, d, label: v.clone() });
            }
        }
    }
    Ok(out)
}

/// Builds the filtration piece of total degree `n`. With `corrupt`, the
/// sign of the first boundary entry of the chamber is reversed.
pub fn build_complex<F: Field, M: Coefficients<F>>(
    alg: &HeckeAlgebra<F>,
    apt: &Apartment,
    coeff: &M,
    n: usize,
    corrupt: bool,
) -> Result<TruncatedComplex<F>, HomologyError> {
    let ind = Induction::new(alg, apt);
    let g = &alg.group;
    let weyl = alg.weyl();
    let top = apt.rank;
    let levels: Vec<Vec<Cell<M::Label>>> = (0..=top).map(|i| cells(&ind, coeff, i, n)).collect::<Result<_, _>>()?;
    let index: Vec<Index<M::Label>> =
        levels.iter().map(|cs| cs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect()).collect();
    let target: Vec<M::Label> = coeff.labels(alg, n)?;
    let target_index: HashMap<M::Label, usize> = target.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();

    let mut diffs = Vec::with_capacity(top + 1);
    let augmentation: Vec<SparseVec<F>> = levels[0]
        .par_iter()
        .map(|c| {
            let sign = F::sign(ind.vertex_sign(c.face) > 0);
            let mut items = Vec::new();
            for (v, a) in coeff.act(alg, &g.lift(&c.d), &c.label) {
                let i = *target_index.get(&v).ok_or(HomologyError::TruncationTooSmall(0))?;
                items.push((i, a * sign.clone()));
            }
            Ok(SparseVec::from_unsorted(items))
        })
        .collect::<Result<_, HomologyError>>()?;
    diffs.push(augmentation);

    for level in 1..=top {
        let below = &index[level - 1];
        let cols: Vec<SparseVec<F>> = levels[level]
            .par_iter()
            .map(|c| {
                let mut items = Vec::new();
                for (pos, e) in apt.boundary[level][c.face].iter().enumerate() {
                    let mut sign = e.sign;
                    if corrupt && level == top && pos == 0 {
                        sign = -sign;
                    }
                    let omega = g.lift(&weyl.omega_fin[e.omega]);
                    let x = g.mul(&g.lift(&c.d), &omega);
                    let (d2, h, eps) = ind.rewrite(ind.mask(level - 1, e.face), &x);
                    let y = g.mul(&h, &g.inv(&omega));
                    let coef = F::sign(sign * eps > 0);
                    for (v, a) in coeff.act(alg, &y, &c.label) {
                        let key = Cell { face: e.face, d: d2, label: v };
                        let i = *below.get(&key).ok_or(HomologyError::TruncationTooSmall(level))?;
                        items.push((i, a * coef.clone()));
                    }
                }
                Ok(SparseVec::from_unsorted(items))
            })
            .collect::<Result<_, HomologyError>>()?;
        diffs.push(cols);
    }
    Ok(TruncatedComplex { dims: levels.iter().map(Vec::len).collect(), target_dim: target.len(), diffs })
}

/// The resolution of a finite-dimensional module, cut at `l(d) <= n`.
pub fn build_resolution<F: Field>(
    alg: &HeckeAlgebra<F>,
    apt: &Apartment,
    m: &FiniteModule<F>,
    n: usize,
) -> Result<TruncatedComplex<F>, HomologyError> {
    build_complex(alg, apt, &Finite { module: m }, n, false)
}

/// The piece `F_n` of the bimodule resolution of `H` (tensor filtration
/// `l(d) + l(w) <= n`), checked for exactness including surjectivity
/// onto `F_n H`.
pub fn check_strict_exactness<F: Field>(
    alg: &HeckeAlgebra<F>,
    apt: &Apartment,
    n: usize,
    cap: Option<i32>,
    corrupt: bool,
) -> Result<ExactnessReport, HomologyError> {
    if !alg.weyl().is_semisimple() && cap.is_none() {
        return Err(HomologyError::Hecke(HeckeError::Weyl(crate::weyl::WeylError::InfiniteBasis)));
    }
    let complex = build_complex(alg, apt, &Regular { cap }, n, corrupt)?;
    Ok(complex.exactness())
}

/// Chain map induced by a module map `f: m -> m2` (matrix `dim m2 x dim m`)
/// on the truncated resolutions; returns whether it commutes with every
/// differential and the augmentation.
pub fn naturality<F: Field>(
    alg: &HeckeAlgebra<F>,
    apt: &Apartment,
    m: &FiniteModule<F>,
    m2: &FiniteModule<F>,
    f: &crate::linalg::Matrix<F>,
    n: usize,
) -> Result<bool, HomologyError> {
    let a = build_resolution(alg, apt, m, n)?;
    let b = build_resolution(alg, apt, m2, n)?;
    let ind = Induction::new(alg, apt);
    let top = apt.rank;
    // cell order: face, d, label, so cells of m2 are located by (face, d)
    let chain = |level: usize| -> Result<Vec<SparseVec<F>>, HomologyError> {
        let ca = cells(&ind, &Finite { module: m }, level, n)?;
        let cb = cells(&ind, &Finite { module: m2 }, level, n)?;
        let ib: Index<usize> = cb.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(ca
            .iter()
            .map(|c| {
                SparseVec::from_unsorted((0..m2.dim).map(|r| {
                    (ib[&Cell { face: c.face, d: c.d, label: r }], f.get(r, c.label).clone())
                }))
            })
            .collect())
    };
    let maps: Vec<Vec<SparseVec<F>>> = (0..=top).map(chain).collect::<Result<_, _>>()?;
    let target = |v: &SparseVec<F>| SparseVec::from_dense(&f.apply(&v.to_dense(m.dim)));
    for (j, col) in a.diffs[0].iter().enumerate() {
        let unit = SparseVec { entries: vec![(j, F::one())] };
        if apply(&b.diffs[0], &apply(&maps[0], &unit)) != target(col) {
            return Ok(false);
        }
    }
    for level in 1..=top {
        for j in 0..a.dims[level] {
            let unit = SparseVec { entries: vec![(j, F::one())] };
            let lhs = apply(&b.diffs[level], &apply(&maps[level], &unit));
            let rhs = apply(&maps[level - 1], &apply(&a.diffs[level], &unit));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether every vector of `vs` lies in the span of `basis`.
pub fn contained<F: Field>(vs: &[SparseVec<F>], basis: &[SparseVec<F>]) -> bool {
    let mut e = Echelon::new();
    for b in basis {
        e.insert(b);
    }
    vs.iter().all(|v| e.contains(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{F2, F3, Q};
    use crate::hecke::Flavor;
    use crate::linalg::Matrix;
    use crate::rootdata::{CartanType, Isogeny, RootDatum};
    use crate::weyl::WeylGroup;

    fn setup<F: Field>(t: CartanType, iso: Isogeny, q: u64) -> (HeckeAlgebra<F>, Apartment) {
        let w = WeylGroup::new(RootDatum::new(t, iso).unwrap());
        let apt = Apartment::new(&w, false);
        (HeckeAlgebra::new(w, q, Flavor::ProP).unwrap(), apt)
    }

    #[test]
    fn rank_one_level_zero() {
        let (h, apt) = setup::<F3>(CartanType::A1, Isogeny::SimplyConnected, 2);
        let r = check_strict_exactness(&h, &apt, 0, None, false).unwrap();
        assert_eq!(r.dims, vec![2, 1]);
        assert_eq!(r.target_dim, 1);
        assert_eq!(r.ranks, vec![1, 1]);
        assert!(r.exact);
        let m = FiniteModule::trivial(&h);
        let c = build_resolution(&h, &apt, &m, 0).unwrap();
        assert_eq!((c.dims.clone(), c.target_dim), (vec![2, 1], 1));
        assert!(c.exactness().exact);
    }

    #[test]
    fn strict_exactness_small() {
        for (t, iso) in [(CartanType::A1, Isogeny::SimplyConnected), (CartanType::A1, Isogeny::Adjoint)] {
            let (h, apt) = setup::<Q>(t, iso, 3);
            for n in 0..=3 {
                let r = check_strict_exactness(&h, &apt, n, None, false).unwrap();
                assert!(r.exact, "{t:?} {iso:?} n={n}: {r:?}");
            }
            assert!(!check_strict_exactness(&h, &apt, 2, None, true).unwrap().exact);
        }
        let (h, apt) = setup::<F2>(CartanType::A2, Isogeny::SimplyConnected, 2);
        assert!(check_strict_exactness(&h, &apt, 2, None, false).unwrap().exact);
    }

    #[test]
    fn capped_central_piece() {
        let (h, apt) = setup::<F3>(CartanType::A1, Isogeny::GlStyle(1), 2);
        assert!(check_strict_exactness(&h, &apt, 2, None, false).is_err());
        assert!(check_strict_exactness(&h, &apt, 2, Some(1), false).unwrap().exact);
    }

    #[test]
    fn flip_keeps_verdicts() {
        let w = WeylGroup::new(RootDatum::new(CartanType::A2, Isogeny::Adjoint).unwrap());
        let h = HeckeAlgebra::<F3>::new(w.clone(), 2, Flavor::ProP).unwrap();
        for flipped in [false, true] {
            let apt = Apartment::new(&w, flipped);
            assert!(check_strict_exactness(&h, &apt, 2, None, false).unwrap().exact);
        }
    }

    #[test]
    fn module_resolutions_and_naturality() {
        let (h, apt) = setup::<Q>(CartanType::A1, Isogeny::Adjoint, 3);
        let triv = FiniteModule::trivial(&h);
        let sum = triv.direct_sum(&FiniteModule::sign(&h));
        for n in 0..=3 {
            let c = build_resolution(&h, &apt, &sum, n).unwrap();
            assert!(c.squares_vanish());
        }
        let zero = FiniteModule::zero(&h);
        let c = build_resolution(&h, &apt, &zero, 2).unwrap();
        assert!(c.dims.iter().all(|d| *d == 0));
        // inclusion of chi_triv as the first summand
        let inc = Matrix::from_rows(vec![vec![Q::from_i64(1)], vec![Q::from_i64(0)]]);
        assert!(naturality(&h, &apt, &triv, &sum, &inc, 2).unwrap());
    }
}
