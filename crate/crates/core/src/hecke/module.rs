//! Finite-dimensional left modules over `H` or `H'`, given by the action
//! matrices of a generating set and validated against the presentation.

use crate::field::Field;
use crate::linalg::Matrix;
use crate::rootdata::{Lat, MAX_LATTICE_RANK};
use crate::weyl::pro_p::ProPElt;
use crate::weyl::WeylElt;

use super::{Flavor, HeckeAlgebra, HeckeElt, HeckeError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModule<F> {
    pub dim: usize,
    /// One matrix per standard basis vector of `X_*` (empty for `H'`).
    pub torus: Vec<Matrix<F>>,
    /// `tau_{n_j}` for `j` in `S_aff`.
    pub n: Vec<Matrix<F>>,
    /// `tau` of each element of the torsion part of `Omega` (identity first).
    pub omega: Vec<Matrix<F>>,
    /// Central translations and their inverses.
    pub central: Vec<Matrix<F>>,
    pub central_inv: Vec<Matrix<F>>,
}

impl<F: Field> FiniteModule<F> {
    /// One-dimensional module with the given scalars.
    pub fn character(alg: &HeckeAlgebra<F>, torus: Vec<F>, n: Vec<F>, omega: Vec<F>, central: Vec<F>) -> Self {
        let one = |c: F| Matrix::scalar(1, c);
        let central_inv = central.iter().map(|c| one(c.inv().expect("central values are units"))).collect();
        let torus = if alg.group.is_pro_p() { torus.into_iter().map(one).collect() } else { vec![] };
        FiniteModule {
            dim: 1,
            torus,
            n: n.into_iter().map(one).collect(),
            omega: omega.into_iter().map(one).collect(),
            central: central.into_iter().map(one).collect(),
            central_inv,
        }
    }

    fn trivial_parts(alg: &HeckeAlgebra<F>) -> (Vec<F>, Vec<F>, Vec<F>) {
        let w = alg.weyl();
        (
            vec![F::one(); w.rd.lattice_rank],
            vec![F::one(); w.omega_fin.len()],
            vec![F::one(); w.central.len()],
        )
    }

    /// `chi_triv`: `tau_w -> q^{l(w)}`.
    pub fn trivial(alg: &HeckeAlgebra<F>) -> Self {
        let (t, o, c) = Self::trivial_parts(alg);
        Self::character(alg, t, vec![alg.q_scalar(); alg.weyl().num_affine()], o, c)
    }

    /// `chi_sign`: `tau_w -> (-1)^{l(w)}`.
    pub fn sign(alg: &HeckeAlgebra<F>) -> Self {
        let (t, o, c) = Self::trivial_parts(alg);
        Self::character(alg, t, vec![-F::one(); alg.weyl().num_affine()], o, c)
    }

    /// Twists the `Omega` action by `eps_C`, i.e. `chi o j_C`.
    pub fn twist_eps_c(&self, alg: &HeckeAlgebra<F>) -> Self {
        let mut out = self.clone();
        for (k, m) in out.omega.iter_mut().enumerate() {
            let om = alg.group.lift(&alg.weyl().omega_fin[k]);
            *m = m.scale(&F::sign(alg.eps_c(&om) > 0));
        }
        out
    }

    pub fn zero(alg: &HeckeAlgebra<F>) -> Self {
        let z = Matrix::zeros(0, 0);
        let w = alg.weyl();
        let nt = if alg.group.is_pro_p() { w.rd.lattice_rank } else { 0 };
        FiniteModule {
            dim: 0,
            torus: vec![z.clone(); nt],
            n: vec![z.clone(); w.num_affine()],
            omega: vec![z.clone(); w.omega_fin.len()],
            central: vec![z.clone(); w.central.len()],
            central_inv: vec![z; w.central.len()],
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let zip = |a: &[Matrix<F>], b: &[Matrix<F>]| a.iter().zip(b).map(|(x, y)| x.direct_sum(y)).collect();
        FiniteModule {
            dim: self.dim + other.dim,
            torus: zip(&self.torus, &other.torus),
            n: zip(&self.n, &other.n),
            omega: zip(&self.omega, &other.omega),
            central: zip(&self.central, &other.central),
            central_inv: zip(&self.central_inv, &other.central_inv),
        }
    }

    pub fn act_torus(&self, t: &Lat) -> Matrix<F> {
        let mut m = Matrix::identity(self.dim);
        for (i, g) in self.torus.iter().enumerate() {
            if t[i] != 0 {
                m = m.mul(&g.pow(t[i] as u64));
            }
        }
        m
    }

    /// Action of a length-zero element of `W`.
    pub fn act_omega(&self, alg: &HeckeAlgebra<F>, omega: &WeylElt) -> Matrix<F> {
        let (idx, z) = alg.weyl().split_omega(omega);
        let mut m = self.omega[idx].clone();
        for (i, dir) in alg.weyl().central.iter().enumerate() {
            let c: i32 = (0..MAX_LATTICE_RANK).map(|k| z[k] * dir[k]).sum();
            let g = if c >= 0 { &self.central[i] } else { &self.central_inv[i] };
            m = m.mul(&g.pow(c.unsigned_abs() as u64));
        }
        m
    }

    pub fn act_basis(&self, alg: &HeckeAlgebra<F>, x: &ProPElt) -> Matrix<F> {
        let (omega, word) = alg.weyl().reduced_word(&x.w);
        let mut m = self.act_torus(&x.torus).mul(&self.act_omega(alg, &omega));
        for j in word {
            m = m.mul(&self.n[j]);
        }
        m
    }

    pub fn act(&self, alg: &HeckeAlgebra<F>, h: &HeckeElt<F>) -> Matrix<F> {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (x, c) in &h.terms {
            m = m.add(&self.act_basis(alg, x).scale(c));
        }
        m
    }

    /// Checks every defining relation of the presentation.
    pub fn validate(&self, alg: &HeckeAlgebra<F>) -> Result<(), HeckeError> {
        let w = alg.weyl();
        let g = &alg.group;
        let fail = |s: String| Err(HeckeError::InconsistentModule(s));
        let id = Matrix::<F>::identity(self.dim);
        let expect_torus = if alg.group.is_pro_p() { w.rd.lattice_rank } else { 0 };
        if self.torus.len() != expect_torus
            || self.n.len() != w.num_affine()
            || self.omega.len() != w.omega_fin.len()
            || self.central.len() != w.central.len()
            || self.central_inv.len() != w.central.len()
        {
            return fail("wrong number of generator matrices".into());
        }
        let all = self.torus.iter().chain(&self.n).chain(&self.omega).chain(&self.central).chain(&self.central_inv);
        if all.into_iter().any(|m| m.rows != self.dim || m.cols != self.dim) {
            return fail("generator matrix of the wrong size".into());
        }
        if self.omega.first().is_some_and(|m| *m != id) {
            return fail("identity of Omega acts nontrivially".into());
        }
        for (a, b) in self.central.iter().zip(&self.central_inv) {
            if a.mul(b) != id || b.mul(a) != id {
                return fail("central inverse".into());
            }
        }
        // torus: order, commutativity
        let m = g.modulus as u64;
        for (i, a) in self.torus.iter().enumerate() {
            if a.pow(m) != id {
                return fail(format!("torus generator {i} has wrong order"));
            }
            for b in &self.torus {
                if a.mul(b) != b.mul(a) {
                    return fail("torus does not commute".into());
                }
            }
        }
        // conjugation of the torus by n_j and by Omega, centrality of translations
        let gens: Vec<Lat> = g.torus_generators();
        for (j, n) in self.n.iter().enumerate() {
            let s = w.simple(j);
            for (i, e) in gens.iter().enumerate() {
                let lhs = n.mul(&self.torus[i]);
                let rhs = self.act_torus(&g.act_torus(&s, e)).mul(n);
                if lhs != rhs {
                    return fail(format!("n_{j} t n_{j}^-1 = s_{j}(t) on torus generator {i}"));
                }
            }
            for c in &self.central {
                if c.mul(n) != n.mul(c) {
                    return fail("central translation and n_j do not commute".into());
                }
            }
        }
        for (k, om) in self.omega.iter().enumerate() {
            let omega = w.omega_fin[k];
            for (i, e) in gens.iter().enumerate() {
                let lhs = om.mul(&self.torus[i]);
                let rhs = self.act_torus(&g.act_torus(&omega, e)).mul(om);
                if lhs != rhs {
                    return fail(format!("Omega conjugation of torus generator {i}"));
                }
            }
            for (j, n) in self.n.iter().enumerate() {
                let pj = w.omega_perm[k][j];
                if om.mul(n) != self.n[pj].mul(om) {
                    return fail(format!("Omega conjugation of n_{j}"));
                }
            }
            for (l, other) in self.omega.iter().enumerate() {
                let prod = w.mul(&omega, &w.omega_fin[l]);
                if om.mul(other) != self.act_omega(alg, &prod) {
                    return fail("Omega group law".into());
                }
            }
            for c in &self.central {
                if c.mul(om) != om.mul(c) {
                    return fail("central translation and Omega do not commute".into());
                }
            }
        }
        for c in &self.central {
            for t in &self.torus {
                if c.mul(t) != t.mul(c) {
                    return fail("central translation and torus do not commute".into());
                }
            }
        }
        // quadratic relations
        let q = alg.q_scalar();
        for (j, n) in self.n.iter().enumerate() {
            let lhs = n.mul(n);
            let rhs = match alg.flavor {
                Flavor::ProP => {
                    let theta = self.act(alg, &alg.theta(j));
                    self.act_torus(&g.square[j]).scale(&q).add(&n.mul(&theta))
                }
                Flavor::Iwahori => n.scale(&(q.clone() - F::one())).add(&id.scale(&q)),
            };
            if lhs != rhs {
                return fail(format!("quadratic relation for n_{j}"));
            }
        }
        // braid relations
        for i in 0..w.num_affine() {
            for j in i + 1..w.num_affine() {
                let Some(mij) = w.coxeter[i][j] else { continue };
                let mut a = id.clone();
                let mut b = id.clone();
                for step in 0..mij {
                    let (x, y) = if step % 2 == 0 { (i, j) } else { (j, i) };
                    a = a.mul(&self.n[x]);
                    b = b.mul(&self.n[y]);
                }
                if a != b {
                    return fail(format!("braid relation between n_{i} and n_{j}"));
                }
            }
        }
        Ok(())
    }

    /// The module structure pulled back along an algebra automorphism
    /// `phi`: `h . x = rho(phi(h)) x`.
    pub fn pullback(&self, alg: &HeckeAlgebra<F>, phi: impl Fn(&HeckeElt<F>) -> HeckeElt<F>) -> Self {
        let g = &alg.group;
        let w = alg.weyl();
        let on = |x: ProPElt| self.act(alg, &phi(&HeckeElt::basis(x)));
        FiniteModule {
            dim: self.dim,
            torus: g.torus_generators().iter().map(|t| on(g.torus_elt(t))).collect(),
            n: (0..w.num_affine()).map(|j| on(g.n(j))).collect(),
            omega: w.omega_fin.iter().map(|o| on(g.lift(o))).collect(),
            central: w.central.iter().map(|z| on(g.lift(&WeylElt::translation(*z)))).collect(),
            central_inv: w.central.iter().map(|z| on(g.lift(&WeylElt::translation(z.map(|x| -x))))).collect(),
        }
    }

    /// Scalar of a one-dimensional module on `h`.
    pub fn eval(&self, alg: &HeckeAlgebra<F>, h: &HeckeElt<F>) -> F {
        assert_eq!(self.dim, 1, "eval needs a character");
        self.act(alg, h).get(0, 0).clone()
    }
}

/// All two-dimensional modules over a finite field with trivial torus
/// and `Omega` action on which no line is stable, for data with trivial
/// `Omega`. Exhaustive over matrices satisfying the quadratic relation.
pub fn irreducible_two_dimensional<F: Field>(alg: &HeckeAlgebra<F>) -> Vec<FiniteModule<F>> {
    let w = alg.weyl();
    let Some(elems) = F::elements() else { return vec![] };
    if w.omega_fin.len() != 1 || !w.central.is_empty() {
        return vec![];
    }
    let q = alg.q_scalar();
    let id = Matrix::<F>::identity(2);
    // tau^2 = (q - 1) tau + q with the torus acting trivially
    let mut quad = Vec::new();
    for a in &elems {
        for b in &elems {
            for c in &elems {
                for d in &elems {
                    let m = Matrix::from_rows(vec![vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]]);
                    let rhs = m.scale(&(q.clone() - F::one())).add(&id.scale(&q));
                    if m.mul(&m) == rhs {
                        quad.push(m);
                    }
                }
            }
        }
    }
    let lines: Vec<Vec<F>> = std::iter::once(vec![F::zero(), F::one()])
        .chain(elems.iter().map(|x| vec![F::one(), x.clone()]))
        .collect();
    let stable = |ms: &[Matrix<F>], v: &[F]| {
        ms.iter().all(|m| {
            let u = m.apply(v);
            u[0].clone() * v[1].clone() == u[1].clone() * v[0].clone()
        })
    };
    let nt = if alg.group.is_pro_p() { w.rd.lattice_rank } else { 0 };
    let mut out = Vec::new();
    let k = w.num_affine();
    let mut choice = vec![0usize; k];
    loop {
        let ms: Vec<Matrix<F>> = choice.iter().map(|&i| quad[i].clone()).collect();
        if !lines.iter().any(|v| stable(&ms, v)) {
            let module = FiniteModule {
                dim: 2,
                torus: vec![id.clone(); nt],
                n: ms,
                omega: vec![id.clone()],
                central: vec![],
                central_inv: vec![],
            };
            if module.validate(alg).is_ok() {
                out.push(module);
            }
        }
        let mut pos = 0;
        while pos < k {
            choice[pos] += 1;
            if choice[pos] < quad.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        if pos == k {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{One, F3, Q};
    use crate::rootdata::{CartanType, Isogeny, RootDatum};
    use crate::weyl::WeylGroup;

    fn alg<F: Field>(t: CartanType, iso: Isogeny, q: u64, flavor: Flavor) -> HeckeAlgebra<F> {
        HeckeAlgebra::new(WeylGroup::new(RootDatum::new(t, iso).unwrap()), q, flavor).unwrap()
    }

    #[test]
    fn characters_are_valid_and_multiplicative() {
        for (t, iso) in [
            (CartanType::A1, Isogeny::Adjoint),
            (CartanType::A2, Isogeny::Adjoint),
            (CartanType::A1, Isogeny::GlStyle(1)),
        ] {
            let h = alg::<Q>(t, iso, 3, Flavor::ProP);
            for m in [FiniteModule::trivial(&h), FiniteModule::sign(&h)] {
                m.validate(&h).unwrap();
                let b = h.filtration_basis(2, Some(1)).unwrap();
                for x in b.iter().step_by(5) {
                    for y in b.iter().step_by(7) {
                        let lhs = m.act(&h, &h.mul_basis(x, y));
                        let rhs = m.act_basis(&h, x).mul(&m.act_basis(&h, y));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
            let triv = FiniteModule::trivial(&h);
            assert_eq!(triv.eval(&h, &h.tau_n(0)), Q::from_i64(3));
            // iota exchanges the characters
            let pulled = FiniteModule::sign(&h).pullback(&h, |a| h.iota(a));
            assert_eq!(pulled.n, triv.n);
        }
    }

    #[test]
    fn broken_character_is_rejected() {
        let h = alg::<F3>(CartanType::A1, Isogeny::SimplyConnected, 3, Flavor::ProP);
        let bad = FiniteModule::character(&h, vec![F3::one()], vec![F3::new(2), F3::one()], vec![F3::one()], vec![]);
        assert!(bad.validate(&h).is_err());
        let hi = alg::<F3>(CartanType::A1, Isogeny::SimplyConnected, 3, Flavor::Iwahori);
        FiniteModule::trivial(&hi).validate(&hi).unwrap();
    }
}
