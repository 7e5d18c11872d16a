//! `Hom_H(Gpr_•(m), H)` for finite-dimensional `m` over a semisimple datum,
//! written as `⊕_F Hom_{H_F^†}((eps_F) m, H_F^†) ⊗_{H_F^†} H`, its
//! augmentation onto `m^d`, and truncated cohomology with a margin.
//!
//! A dual cell `(F, r, d)` is the intertwiner `x -> phi_r(x) tau_{d^{-1}}`,
//! `phi_r` running over a basis of `Hom_{H_F^†}((eps_F) m, H_F^†)` and `d`
//! over `D_F^†`. Its degree is `l(d)`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{HomologyError, Induction};
use crate::apartment::Apartment;
use crate::field::Field;
use crate::hecke::module::FiniteModule;
use crate::hecke::{HeckeAlgebra, HeckeElt};
use crate::linalg::{kernel_of_columns, nullspace, rank, Echelon, Matrix, SparseVec};
use crate::parahoric::Parahoric;
use crate::weyl::pro_p::ProPElt;
use crate::weyl::{Mask, WeylElt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DualCell {
    pub face: usize,
    pub r: usize,
    pub d: WeylElt,
}

/// Intertwiners `(eps_F) m -> H_F^†` for one face.
struct HomSpace<F> {
    mask: Mask,
    basis: Vec<ProPElt>,
    index: HashMap<ProPElt, usize>,
    /// `phis[r][j] = phi_r(e_j)`.
    phis: Vec<Vec<HeckeElt<F>>>,
    solver: Echelon<F>,
}

/// The `m^d` right module: matrices act on row vectors from the right.
pub type RightModule<F> = FiniteModule<F>;

/// `m^d = Hom_k(iota_C^* m, k)`: `f . tau = f A(iota_C(tau))`.
pub fn dual_module<F: Field>(alg: &HeckeAlgebra<F>, m: &FiniteModule<F>) -> RightModule<F> {
    m.pullback(alg, |h| alg.iota_c(h))
}

/// `(M^d)` of a right module, a left module again.
pub fn dual_of_right<F: Field>(alg: &HeckeAlgebra<F>, r: &RightModule<F>) -> FiniteModule<F> {
    r.pullback(alg, |h| alg.iota_c(h))
}

pub struct DualComplex<'a, F> {
    pub ind: Induction<'a, F>,
    pub m: &'a FiniteModule<F>,
    homs: Vec<Vec<HomSpace<F>>>,
    /// Right action of the generators of `H` on `m^d`.
    pub md: RightModule<F>,
}

/// Growing index of dual cells at one level.
#[derive(Default)]
struct CellIndex {
    map: HashMap<DualCell, usize>,
}

impl CellIndex {
    fn id(&mut self, c: DualCell) -> usize {
        let next = self.map.len();
        *self.map.entry(c).or_insert(next)
    }

    fn vector<F: Field>(&mut self, items: Vec<(DualCell, F)>) -> SparseVec<F> {
        SparseVec::from_unsorted(items.into_iter().map(|(c, a)| (self.id(c), a)).collect::<Vec<_>>())
    }
}

/// Result of [`DualComplex::ext_top`].
#[derive(Clone, Debug, Serialize)]
pub struct ExtTop<F> {
    pub dim: usize,
    /// Right action on `m^d` of the generators, as read off the cokernel.
    #[serde(skip)]
    pub action: RightModule<F>,
    pub margin: usize,
    pub stable: bool,
    pub checked: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Vanishes { margin: usize },
    Nonzero { dim: usize },
}

impl<'a, F: Field> DualComplex<'a, F> {
    pub fn new(alg: &'a HeckeAlgebra<F>, apt: &'a Apartment, m: &'a FiniteModule<F>) -> Result<Self, HomologyError> {
        if !alg.weyl().is_semisimple() {
            return Err(HomologyError::NotSemisimpleDatum);
        }
        let ind = Induction::new(alg, apt);
        let homs = apt
            .reps
            .iter()
            .map(|level| level.iter().map(|rep| hom_space(&ind, m, rep.mask)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DualComplex { ind, m, homs, md: dual_module(alg, m) })
    }

    pub fn top(&self) -> usize {
        self.ind.apt.rank
    }

    pub fn hom_dims(&self) -> Vec<Vec<usize>> {
        self.homs.iter().map(|l| l.iter().map(|h| h.phis.len()).collect()).collect()
    }

    pub fn cells(&self, level: usize, n: usize) -> Result<Vec<DualCell>, HomologyError> {
        let mut out = Vec::new();
        for (face, hs) in self.homs[level].iter().enumerate() {
            for d in self.ind.reps(hs.mask, n)? {
                for r in 0..hs.phis.len() {
                    out.push(DualCell { face, r, d });
                }
            }
        }
        Ok(out)
    }

    fn alg(&self) -> &HeckeAlgebra<F> {
        self.ind.alg
    }

    /// `phi(v)` for an arbitrary vector `v` of `m`.
    fn eval_phi(&self, level: usize, face: usize, r: usize, v: &[F]) -> HeckeElt<F> {
        let mut out = HeckeElt::zero();
        for (l, c) in v.iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled(c, &self.homs[level][face].phis[r][l]);
            }
        }
        out
    }

    /// Values `Phi(e_j)` of a dual cell.
    fn values(&self, level: usize, c: &DualCell) -> Vec<HeckeElt<F>> {
        let g = &self.alg().group;
        let right = HeckeElt::basis(g.inv(&g.lift(&c.d)));
        self.homs[level][c.face].phis[c.r].iter().map(|p| self.alg().mul(p, &right)).collect()
    }

    /// Coordinates of an intertwiner on `face` given by its values.
    fn decompose(&self, level: usize, face: usize, vals: &[HeckeElt<F>]) -> Result<Vec<(DualCell, F)>, HomologyError> {
        let hs = &self.homs[level][face];
        let g = &self.alg().group;
        let weyl = self.alg().weyl();
        let nb = hs.basis.len();
        let mut parts: HashMap<WeylElt, Vec<(usize, F)>> = HashMap::new();
        for (j, v) in vals.iter().enumerate() {
            for (z, c) in &v.terms {
                let zi = g.inv(z);
                let (d, _) = weyl.factor(hs.mask, &zi.w, true);
                let u = g.inv(&g.mul(&g.inv(&g.lift(&d)), &zi));
                let b = *hs.index.get(&u).ok_or(HomologyError::Inconsistent)?;
                parts.entry(d).or_default().push((j * nb + b, c.clone()));
            }
        }
        let mut out = Vec::new();
        let mut keys: Vec<_> = parts.keys().copied().collect();
        keys.sort();
        for d in keys {
            let v = SparseVec::from_unsorted(parts.remove(&d).unwrap());
            let coords = hs.solver.solve(&v).ok_or(HomologyError::Inconsistent)?;
            for (r, a) in coords.entries {
                out.push((DualCell { face, r, d }, a));
            }
        }
        Ok(out)
    }

    /// `partial^*` of a level-`i` dual cell, as level-`(i+1)` coordinates:
    /// `(partial^* Phi)_F(x) = sum eps(F, F', omega) tau_omega Phi_{F'}(tau_omega^{-1} x)`.
    pub fn coboundary(&self, level: usize, c: &DualCell) -> Result<Vec<(DualCell, F)>, HomologyError> {
        let alg = self.alg();
        let g = &alg.group;
        let weyl = alg.weyl();
        let up = level + 1;
        let right = HeckeElt::basis(g.inv(&g.lift(&c.d)));
        let mut out = Vec::new();
        for (face, entries) in self.ind.apt.boundary[up].iter().enumerate() {
            let mut vals = vec![HeckeElt::zero(); self.m.dim];
            let mut touched = false;
            for e in entries.iter().filter(|e| e.face == c.face) {
                touched = true;
                let omega = g.lift(&weyl.omega_fin[e.omega]);
                let a = self.m.act_basis(alg, &g.inv(&omega));
                let sign = F::sign(e.sign > 0);
                for (j, val) in vals.iter_mut().enumerate() {
                    let inner = self.eval_phi(level, c.face, c.r, &a.column(j));
                    let term = alg.mul(&alg.mul(&HeckeElt::basis(omega), &inner), &right);
                    val.add_scaled(&sign, &term);
                }
            }
            if touched {
                out.extend(self.decompose(up, face, &vals)?);
            }
        }
        Ok(out)
    }

    /// `augm(Phi)(x) = delta_1(phi(iota_C(tau_{d^{-1}}) x))` for a top cell.
    pub fn augmentation(&self, c: &DualCell) -> Vec<F> {
        let alg = self.alg();
        let g = &alg.group;
        let top = self.top();
        let a = self.m.act(alg, &alg.iota_c(&HeckeElt::basis(g.inv(&g.lift(&c.d)))));
        (0..self.m.dim).map(|j| self.eval_phi(top, c.face, c.r, &a.column(j)).coeff(&g.identity())).collect()
    }

    fn augmentation_of(&self, items: &[(DualCell, F)]) -> Vec<F> {
        let mut acc = vec![F::zero(); self.m.dim];
        for (c, a) in items {
            for (x, y) in acc.iter_mut().zip(self.augmentation(c)) {
                *x += y * a.clone();
            }
        }
        acc
    }

    /// Generators of `H`: torus basis, `n_j`, `Omega` lifts.
    pub fn generators(&self) -> Vec<ProPElt> {
        let g = &self.alg().group;
        let weyl = self.alg().weyl();
        let mut out: Vec<ProPElt> = g.torus_generators().iter().map(|t| g.torus_elt(t)).collect();
        out.extend((0..weyl.num_affine()).map(|j| g.n(j)));
        out.extend(weyl.omega_fin.iter().skip(1).map(|o| g.lift(o)));
        out
    }

    /// Checks `augm o partial^* = 0` on level `top - 1` cells of degree `<= n`.
    pub fn augmentation_kills_image(&self, n: usize) -> Result<bool, HomologyError> {
        let top = self.top();
        if top == 0 {
            return Ok(true);
        }
        let cells = self.cells(top - 1, n)?;
        let ok = cells
            .par_iter()
            .map(|c| Ok(self.augmentation_of(&self.coboundary(top - 1, c)?).iter().all(|x| x.is_zero())))
            .collect::<Result<Vec<bool>, HomologyError>>()?;
        Ok(ok.into_iter().all(|b| b))
    }

    /// Right `H`-equivariance of the augmentation on top cells of degree
    /// `< n`: `augm(Phi tau_g) = augm(Phi) . tau_g` for every generator.
    pub fn augmentation_equivariant(&self, n: usize) -> Result<bool, HomologyError> {
        let top = self.top();
        let alg = self.alg();
        let cells = self.cells(top, n.saturating_sub(1))?;
        for c in &cells {
            let vals = self.values(top, c);
            let f = self.augmentation(c);
            for gen in self.generators() {
                let shifted: Vec<HeckeElt<F>> = vals.iter().map(|v| alg.mul(v, &HeckeElt::basis(gen))).collect();
                let lhs = self.augmentation_of(&self.decompose(top, c.face, &shifted)?);
                let r = self.md.act_basis(alg, &gen);
                let rhs: Vec<F> = (0..self.m.dim)
                    .map(|j| (0..self.m.dim).fold(F::zero(), |acc, l| acc + f[l].clone() * r.get(l, j).clone()))
                    .collect();
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Kernel of `partial^*` on level `i` cells of degree `<= n`, as
    /// vectors in `idx` coordinates for level `i`.
    fn cocycles(&self, level: usize, n: usize, idx: &mut CellIndex) -> Result<Vec<SparseVec<F>>, HomologyError> {
        let cells = self.cells(level, n)?;
        if level == self.top() {
            // kernel of the augmentation
            let cols: Vec<SparseVec<F>> = cells.iter().map(|c| SparseVec::from_dense(&self.augmentation(c))).collect();
            return Ok(kernel_of_columns(&cols)
                .into_iter()
                .map(|k| SparseVec::from_unsorted(k.entries.into_iter().map(|(i, a)| (idx.id(cells[i]), a)).collect::<Vec<_>>()))
                .collect());
        }
        let images = cells
            .par_iter()
            .map(|c| self.coboundary(level, c))
            .collect::<Result<Vec<_>, HomologyError>>()?;
        let mut up = CellIndex::default();
        let cols: Vec<SparseVec<F>> = images.into_iter().map(|items| up.vector(items)).collect();
        Ok(kernel_of_columns(&cols)
            .into_iter()
            .map(|k| SparseVec::from_unsorted(k.entries.into_iter().map(|(i, a)| (idx.id(cells[i]), a)).collect::<Vec<_>>()))
            .collect())
    }

    fn coboundaries(&self, level: usize, n: usize, idx: &mut CellIndex) -> Result<Vec<SparseVec<F>>, HomologyError> {
        if level == 0 {
            return Ok(vec![]);
        }
        let cells = self.cells(level - 1, n)?;
        let images = cells
            .par_iter()
            .map(|c| self.coboundary(level - 1, c))
            .collect::<Result<Vec<_>, HomologyError>>()?;
        Ok(images.into_iter().map(|items| idx.vector(items)).collect())
    }

    /// Every class of degree `<= n` at `level` (for the top level: every
    /// element of `ker augm`) is a coboundary of degree `<= n + c`, for the
    /// least `c` in `margin..=max_margin`.
    pub fn vanishing_at(&self, level: usize, n: usize, margin: usize, max_margin: usize) -> Result<usize, HomologyError> {
        let mut idx = CellIndex::default();
        let z = self.cocycles(level, n, &mut idx)?;
        for c in margin..=max_margin {
            let b = self.coboundaries(level, n + c, &mut idx)?;
            if super::contained(&z, &b) {
                return Ok(c);
            }
        }
        Err(HomologyError::MarginExhausted { n, margin: max_margin })
    }

    /// `Ext^d(m, H) = m^d`: the augmentation is onto, kills the image of
    /// `partial^*`, is right-equivariant, and its kernel up to degree `n` is
    /// exhausted by coboundaries. Stable when this holds at `n` and `n + 1`.
    pub fn ext_top(&self, n: usize, margin: usize, max_margin: usize) -> Result<ExtTop<F>, HomologyError> {
        let top = self.top();
        let cells = self.cells(top, n)?;
        let cols: Vec<SparseVec<F>> = cells.iter().map(|c| SparseVec::from_dense(&self.augmentation(c))).collect();
        if rank(&cols) != self.m.dim {
            return Err(HomologyError::Inconsistent);
        }
        if !self.augmentation_kills_image(n)? || !self.augmentation_equivariant(n)? {
            return Err(HomologyError::Inconsistent);
        }
        let mut used = margin;
        let mut checked = Vec::new();
        for k in [n, n + 1] {
            used = used.max(self.vanishing_at(top, k, margin, max_margin)?);
            checked.push(k);
        }
        Ok(ExtTop { dim: self.m.dim, action: self.md.clone(), margin: used, stable: checked.len() == 2, checked })
    }

    /// `Ext^i(m, H) = 0` for `i < d`. Degree zero is solved directly as
    /// module maps `m -> F_n H`; higher degrees use truncated cohomology.
    pub fn hom_vanishing(&self, i: usize, n: usize, margin: usize, max_margin: usize) -> Result<Verdict, HomologyError> {
        assert!(i < self.top(), "only degrees below d");
        if i == 0 {
            let dim = module_maps_into_truncation(self.alg(), self.m, n)?;
            return Ok(if dim == 0 { Verdict::Vanishes { margin: 0 } } else { Verdict::Nonzero { dim } });
        }
        match self.vanishing_at(i, n, margin, max_margin) {
            Ok(c) => Ok(Verdict::Vanishes { margin: c }),
            Err(e) => Err(e),
        }
    }

    /// Lemma-style description of the top image: under `Delta ⊗ id` it is
    /// spanned by `f ⊗ tau_s tau_x - f tau_s ⊗ tau_x`. Checks both
    /// inclusions, each within `margin`.
    pub fn dual_image_matches(&self, n: usize, margin: usize) -> Result<bool, HomologyError> {
        let top = self.top();
        if top == 0 || self.m.dim == 0 {
            return Ok(true);
        }
        let alg = self.alg();
        let g = &alg.group;
        let weyl = alg.weyl();
        let dim = self.m.dim;
        // coordinates in m^d ⊗_{H_C^†} H: (j, d) for the functional e_j^* ⊗ tau_{d^{-1}}
        let mut keys: HashMap<(usize, WeylElt), usize> = HashMap::new();
        let mut key = |j: usize, d: WeylElt| {
            let next = keys.len();
            *keys.entry((j, d)).or_insert(next)
        };
        // row vector f ⊗ tau_z
        let mut tensor = |f: &[F], z: &ProPElt| -> Vec<(usize, F)> {
            let zi = g.inv(z);
            let (d, _) = weyl.factor(0, &zi.w, true);
            let u = g.inv(&g.mul(&g.inv(&g.lift(&d)), &zi));
            let r = self.md.act_basis(alg, &u);
            (0..dim)
                .map(|j| (key(j, d), (0..dim).fold(F::zero(), |acc, l| acc + f[l].clone() * r.get(l, j).clone())))
                .collect()
        };
        let delta = |c: &DualCell| -> Vec<F> {
            self.homs[top][c.face].phis[c.r].iter().map(|p| p.coeff(&g.identity())).collect()
        };
        let image = |k: usize, tensor: &mut dyn FnMut(&[F], &ProPElt) -> Vec<(usize, F)>| -> Result<Vec<SparseVec<F>>, HomologyError> {
            let mut out = Vec::new();
            for c in self.cells(top - 1, k)? {
                let mut items = Vec::new();
                for (cell, a) in self.coboundary(top - 1, &c)? {
                    for (i, b) in tensor(&delta(&cell), &g.inv(&g.lift(&cell.d))) {
                        items.push((i, b * a.clone()));
                    }
                }
                out.push(SparseVec::from_unsorted(items));
            }
            Ok(out)
        };
        let lemma = |k: usize, tensor: &mut dyn FnMut(&[F], &ProPElt) -> Vec<(usize, F)>| -> Result<Vec<SparseVec<F>>, HomologyError> {
            let mut out = Vec::new();
            for x in alg.filtration_basis(k, None)? {
                for s in 0..weyl.num_affine() {
                    for j in 0..dim {
                        let mut f = vec![F::zero(); dim];
                        f[j] = F::one();
                        let mut items = Vec::new();
                        for (z, c) in alg.mul_basis(&g.n(s), &x).terms {
                            for (i, b) in tensor(&f, &z) {
                                items.push((i, b * c.clone()));
                            }
                        }
                        let rs = self.md.act_basis(alg, &g.n(s));
                        let fs: Vec<F> = (0..dim).map(|l| rs.get(j, l).clone()).collect();
                        for (i, b) in tensor(&fs, &x) {
                            items.push((i, -b));
                        }
                        out.push(SparseVec::from_unsorted(items));
                    }
                }
            }
            Ok(out)
        };
        let small_img = image(n, &mut tensor)?;
        let big_img = image(n + margin, &mut tensor)?;
        let small_lemma = lemma(n, &mut tensor)?;
        let big_lemma = lemma(n + margin, &mut tensor)?;
        Ok(super::contained(&small_img, &big_lemma) && super::contained(&small_lemma, &big_img))
    }
}

fn hom_space<F: Field>(ind: &Induction<F>, m: &FiniteModule<F>, mask: Mask) -> Result<HomSpace<F>, HomologyError> {
    let alg = ind.alg;
    let weyl = alg.weyl();
    let p = Parahoric::new(alg, mask, true)?;
    let nb = p.dim();
    let dim = m.dim;
    let mut rows = Vec::new();
    for gen in p.generators() {
        let left = p.left_matrix(&HeckeElt::basis(gen));
        let eps = F::sign(ind.apt.eps_omega_elt(weyl, mask, &weyl.omega_part(&gen.w)) > 0);
        let a = m.act_basis(alg, &gen);
        // tau_g X_j - eps sum_l A_{lj} X_l = 0, one row per (j, b)
        for j in 0..dim {
            for b in 0..nb {
                let mut items = Vec::new();
                for b2 in 0..nb {
                    let v = left.get(b, b2);
                    if !v.is_zero() {
                        items.push((j * nb + b2, v.clone()));
                    }
                }
                for l in 0..dim {
                    let v = a.get(l, j);
                    if !v.is_zero() {
                        items.push((l * nb + b, -(eps.clone() * v.clone())));
                    }
                }
                rows.push(SparseVec::from_unsorted(items));
            }
        }
    }
    let sols = nullspace(&rows, dim * nb);
    let mut solver = Echelon::tracking();
    let mut phis = Vec::new();
    for s in &sols {
        solver.insert(s);
        let dense = s.to_dense(dim * nb);
        phis.push((0..dim).map(|j| p.from_coords(&dense[j * nb..(j + 1) * nb])).collect());
    }
    let index = p.basis.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    Ok(HomSpace { mask, basis: p.basis.clone(), index, phis, solver })
}

/// Dimension of the space of module maps `m -> H` with image in `F_n H`,
/// products with generators evaluated exactly.
pub fn module_maps_into_truncation<F: Field>(alg: &HeckeAlgebra<F>, m: &FiniteModule<F>, n: usize) -> Result<usize, HomologyError> {
    if m.dim == 0 {
        return Ok(0);
    }
    let g = &alg.group;
    let weyl = alg.weyl();
    let basis = alg.filtration_basis(n, None)?;
    let nb = basis.len();
    let big = alg.filtration_basis(n + 1, None)?;
    let index: HashMap<ProPElt, usize> = big.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let small: HashMap<ProPElt, usize> = basis.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mut gens: Vec<ProPElt> = g.torus_generators().iter().map(|t| g.torus_elt(t)).collect();
    gens.extend((0..weyl.num_affine()).map(|j| g.n(j)));
    gens.extend(weyl.omega_fin.iter().skip(1).map(|o| g.lift(o)));
    let nbig = big.len();
    let mut rows: Vec<SparseVec<F>> = Vec::new();
    for gen in &gens {
        let a = m.act_basis(alg, gen);
        // equations indexed by (j, z) with z in F_{n+1}
        let mut eqs: HashMap<(usize, usize), Vec<(usize, F)>> = HashMap::new();
        for j in 0..m.dim {
            for (b, x) in basis.iter().enumerate() {
                for (z, c) in alg.mul_basis(gen, x).terms {
                    eqs.entry((j, index[&z])).or_default().push((j * nb + b, c));
                }
            }
            for l in 0..m.dim {
                let v = a.get(l, j);
                if v.is_zero() {
                    continue;
                }
                for (b, x) in basis.iter().enumerate() {
                    eqs.entry((j, index[x])).or_default().push((l * nb + b, -v.clone()));
                }
            }
        }
        let mut keys: Vec<_> = eqs.keys().copied().collect();
        keys.sort();
        for k in keys {
            rows.push(SparseVec::from_unsorted(eqs.remove(&k).unwrap()));
        }
        debug_assert!(small.len() <= nbig);
    }
    Ok(nullspace(&rows, m.dim * nb).len())
}

/// Matrices of the right action, compared entrywise.
pub fn same_right_action<F: Field>(a: &RightModule<F>, b: &RightModule<F>) -> bool {
    a == b
}

/// Scalar matrix helper for one-dimensional right modules.
pub fn scalars<F: Field>(m: &RightModule<F>) -> Vec<F> {
    m.n.iter().map(|x: &Matrix<F>| x.get(0, 0).clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{F2, F3, Q};
    use crate::hecke::Flavor;
    use crate::rootdata::{CartanType, Isogeny, RootDatum};
    use crate::weyl::WeylGroup;

    fn setup<F: Field>(t: CartanType, iso: Isogeny, q: u64) -> (HeckeAlgebra<F>, Apartment) {
        let w = WeylGroup::new(RootDatum::new(t, iso).unwrap());
        let apt = Apartment::new(&w, false);
        (HeckeAlgebra::new(w, q, Flavor::ProP).unwrap(), apt)
    }

    #[test]
    fn hom_spaces_have_dim_m() {
        let (h, apt) = setup::<Q>(CartanType::A2, Isogeny::SimplyConnected, 2);
        let m = FiniteModule::trivial(&h).direct_sum(&FiniteModule::sign(&h));
        let dc = DualComplex::new(&h, &apt, &m).unwrap();
        assert!(dc.hom_dims().iter().flatten().all(|d| *d == 2));
    }

    #[test]
    fn ext_top_of_characters_rank_one() {
        let (h, apt) = setup::<F2>(CartanType::A1, Isogeny::SimplyConnected, 2);
        let triv = FiniteModule::trivial(&h);
        let dc = DualComplex::new(&h, &apt, &triv).unwrap();
        let e = dc.ext_top(3, 2, 4).unwrap();
        assert!(e.stable);
        assert_eq!(e.action, FiniteModule::sign(&h).twist_eps_c(&h));
        let (h, apt) = setup::<Q>(CartanType::A1, Isogeny::Adjoint, 3);
        for (m, expect) in [
            (FiniteModule::trivial(&h), FiniteModule::sign(&h).twist_eps_c(&h)),
            (FiniteModule::sign(&h), FiniteModule::trivial(&h).twist_eps_c(&h)),
        ] {
            let dc = DualComplex::new(&h, &apt, &m).unwrap();
            let e = dc.ext_top(3, 2, 4).unwrap();
            assert_eq!(e.action, expect);
            assert!(dc.dual_image_matches(2, 2).unwrap());
        }
    }

    #[test]
    fn hom_into_h_vanishes() {
        let (h, apt) = setup::<F3>(CartanType::A1, Isogeny::SimplyConnected, 2);
        let m = FiniteModule::trivial(&h);
        let dc = DualComplex::new(&h, &apt, &m).unwrap();
        assert_eq!(dc.hom_vanishing(0, 5, 2, 4).unwrap(), Verdict::Vanishes { margin: 0 });
        let (h, apt) = setup::<F3>(CartanType::A2, Isogeny::SimplyConnected, 2);
        let m = FiniteModule::sign(&h);
        let dc = DualComplex::new(&h, &apt, &m).unwrap();
        assert!(matches!(dc.hom_vanishing(1, 2, 2, 4).unwrap(), Verdict::Vanishes { .. }));
    }

    #[test]
    fn double_dual_and_guards() {
        let (h, apt) = setup::<Q>(CartanType::A2, Isogeny::Adjoint, 2);
        let m = FiniteModule::sign(&h).direct_sum(&FiniteModule::trivial(&h));
        assert_eq!(dual_of_right(&h, &dual_module(&h, &m)), m);
        let (g, apt_g) = setup::<Q>(CartanType::A1, Isogeny::GlStyle(1), 2);
        let t = FiniteModule::trivial(&g);
        assert!(matches!(DualComplex::new(&g, &apt_g, &t), Err(HomologyError::NotSemisimpleDatum)));
        let z = FiniteModule::zero(&h);
        let dc = DualComplex::new(&h, &apt, &z).unwrap();
        assert!(dc.cells(2, 3).unwrap().is_empty());
    }
}
