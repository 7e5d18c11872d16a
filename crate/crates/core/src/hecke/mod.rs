//! The pro-p Iwahori-Hecke algebra `H` and the Iwahori-Hecke algebra `H'`
//! over an exact field, in the basis `tau_w`.
//!
//! Both flavors share one implementation: `H'` is `H` over the collapsed
//! group (torus modulus 1) with `theta_s` replaced by the scalar `q - 1`.

pub mod module;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::field::Field;
use crate::rootdata::Lat;
use crate::weyl::pro_p::{ProPElt, ProPGroup};
use crate::weyl::{WeylElt, WeylError, WeylGroup};

pub use module::FiniteModule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Flavor {
    /// `H`, basis indexed by `W~`.
    ProP,
    /// `H'`, basis indexed by `W`.
    Iwahori,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error("q = {0} must be at least 2")]
    BadQ(u64),
    #[error("module violates a defining relation: {0}")]
    InconsistentModule(String),
    #[error("elements belong to different algebras")]
    MismatchedAlgebra,
}

/// Finitely supported combination of basis symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeckeElt<F> {
    pub terms: BTreeMap<ProPElt, F>,
}

impl<F: Field> Default for HeckeElt<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Field> HeckeElt<F> {
    pub fn zero() -> Self {
        HeckeElt { terms: BTreeMap::new() }
    }

    pub fn basis(x: ProPElt) -> Self {
        Self::term(x, F::one())
    }

    pub fn term(x: ProPElt, c: F) -> Self {
        let mut h = Self::zero();
        h.add_term(x, c);
        h
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, x: &ProPElt) -> F {
        self.terms.get(x).cloned().unwrap_or_else(F::zero)
    }

    pub fn add_term(&mut self, x: ProPElt, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&x) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&x);
                }
            }
            None => {
                self.terms.insert(x, c);
            }
        }
    }

    pub fn add_scaled(&mut self, c: &F, other: &Self) {
        for (x, v) in &other.terms {
            self.add_term(*x, c.clone() * v.clone());
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&F::one(), other);
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&-F::one(), other);
        out
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = Self::zero();
        out.add_scaled(c, self);
        out
    }

    pub fn map_basis(&self, f: impl Fn(&ProPElt) -> (ProPElt, F)) -> Self {
        let mut out = Self::zero();
        for (x, c) in &self.terms {
            let (y, s) = f(x);
            out.add_term(y, s * c.clone());
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct HeckeAlgebra<F> {
    pub group: ProPGroup,
    pub flavor: Flavor,
    pub q: u64,
    qk: F,
    ts: Vec<Vec<Lat>>,
}

impl<F: Field> HeckeAlgebra<F> {
    pub fn new(weyl: WeylGroup, q: u64, flavor: Flavor) -> Result<Self, HeckeError> {
        if q < 2 {
            return Err(HeckeError::BadQ(q));
        }
        let group = ProPGroup::new(weyl, q, flavor == Flavor::ProP);
        let ts = (0..group.weyl.num_affine()).map(|j| group.ts_elements(j)).collect();
        Ok(HeckeAlgebra { group, flavor, q, qk: F::from_u64(q), ts })
    }

    pub fn weyl(&self) -> &WeylGroup {
        &self.group.weyl
    }

    pub fn q_scalar(&self) -> F {
        self.qk.clone()
    }

    pub fn same_algebra(&self, other: &Self) -> bool {
        self.q == other.q && self.flavor == other.flavor && self.weyl().rd.label() == other.weyl().rd.label()
    }

    pub fn one(&self) -> HeckeElt<F> {
        HeckeElt::basis(self.group.identity())
    }

    pub fn tau(&self, x: ProPElt) -> HeckeElt<F> {
        HeckeElt::basis(x)
    }

    pub fn tau_n(&self, j: usize) -> HeckeElt<F> {
        HeckeElt::basis(self.group.n(j))
    }

    pub fn length(&self, x: &ProPElt) -> usize {
        self.group.length(x)
    }

    /// Filtration degree, `None` for zero.
    pub fn degree(&self, h: &HeckeElt<F>) -> Option<usize> {
        h.terms.keys().map(|x| self.length(x)).max()
    }

    /// `theta_s = sum_{t in T_s(F_q)} tau_t`; the scalar `q - 1` for `H'`.
    pub fn theta(&self, j: usize) -> HeckeElt<F> {
        match self.flavor {
            Flavor::ProP => {
                let mut h = HeckeElt::zero();
                for t in &self.ts[j] {
                    h.add_term(self.group.torus_elt(t), F::one());
                }
                h
            }
            Flavor::Iwahori => HeckeElt::term(self.group.identity(), self.qk.clone() - F::one()),
        }
    }

    /// `h * tau_{n_j}` by the braid and quadratic relations.
    pub fn mul_right_n(&self, h: &HeckeElt<F>, j: usize) -> HeckeElt<F> {
        let mut out = HeckeElt::zero();
        for (x, c) in &h.terms {
            let xn = self.group.mul_n(x, j);
            if !self.group.is_descent(x, j) {
                out.add_term(xn, c.clone());
                continue;
            }
            match self.flavor {
                Flavor::ProP => {
                    out.add_term(xn, c.clone() * self.qk.clone());
                    for t in &self.ts[j] {
                        out.add_term(self.group.mul_torus(x, t), c.clone());
                    }
                }
                Flavor::Iwahori => {
                    out.add_term(*x, c.clone() * (self.qk.clone() - F::one()));
                    out.add_term(xn, c.clone() * self.qk.clone());
                }
            }
        }
        out
    }

    /// `h * tau_y`, recursing along the normal form of `y`.
    pub fn mul_right_basis(&self, h: &HeckeElt<F>, y: &ProPElt) -> HeckeElt<F> {
        let (omega, word) = self.weyl().reduced_word(&y.w);
        let mut acc = h.map_basis(|x| {
            let xt = self.group.mul_torus(x, &y.torus);
            (self.group.mul_omega(&xt, &omega), F::one())
        });
        for j in word {
            acc = self.mul_right_n(&acc, j);
        }
        acc
    }

    pub fn mul_basis(&self, x: &ProPElt, y: &ProPElt) -> HeckeElt<F> {
        self.mul_right_basis(&HeckeElt::basis(*x), y)
    }

    pub fn mul(&self, a: &HeckeElt<F>, b: &HeckeElt<F>) -> HeckeElt<F> {
        let mut out = HeckeElt::zero();
        if a.is_zero() {
            return out;
        }
        for (y, c) in &b.terms {
            out.add_scaled(c, &self.mul_right_basis(a, y));
        }
        out
    }

    pub fn mul_checked(&self, other: &Self, a: &HeckeElt<F>, b: &HeckeElt<F>) -> Result<HeckeElt<F>, HeckeError> {
        if !self.same_algebra(other) {
            return Err(HeckeError::MismatchedAlgebra);
        }
        Ok(self.mul(a, b))
    }

    /// Splits `x = u n_{i1} ... n_{il}` with `u` of length zero.
    pub fn split_unit(&self, x: &ProPElt) -> (ProPElt, Vec<usize>) {
        let (omega, word) = self.weyl().reduced_word(&x.w);
        (ProPElt { w: omega, torus: x.torus }, word)
    }

    /// `iota(tau_x) = tau_u prod_i (theta_{s_i} - tau_{n_i})`.
    pub fn iota_basis(&self, x: &ProPElt) -> HeckeElt<F> {
        let (u, word) = self.split_unit(x);
        let mut acc = HeckeElt::basis(u);
        for j in word {
            let mut next = self.mul(&acc, &self.theta(j));
            next.add_scaled(&-F::one(), &self.mul_right_n(&acc, j));
            acc = next;
        }
        acc
    }

    pub fn iota(&self, h: &HeckeElt<F>) -> HeckeElt<F> {
        let mut out = HeckeElt::zero();
        for (x, c) in &h.terms {
            out.add_scaled(c, &self.iota_basis(x));
        }
        out
    }

    /// `eps_C` of the `Omega`-part.
    pub fn eps_c(&self, x: &ProPElt) -> i8 {
        self.weyl().eps_chamber(&x.w)
    }

    pub fn j_c(&self, h: &HeckeElt<F>) -> HeckeElt<F> {
        h.map_basis(|x| (*x, F::sign(self.eps_c(x) > 0)))
    }

    pub fn iota_c(&self, h: &HeckeElt<F>) -> HeckeElt<F> {
        self.iota(&self.j_c(h))
    }

    /// `tau*_y` from its own decomposition `y = u n_{j1} ... n_{jl}`:
    /// `tau*_{n_{jl}} ... tau*_{n_{j1}} tau_{u^{-1}}` with
    /// `tau*_g = tau_{g^{-1}} - theta`. Used to cross-check `iota`.
    pub fn tau_star(&self, y: &ProPElt) -> HeckeElt<F> {
        let (u, word) = self.split_unit(y);
        // g_i is the lift of s_{j_i} in the factorization y = u g_1 ... g_l;
        // with the normal form these are plain n_j
        let mut acc = self.one();
        for &j in word.iter().rev() {
            let n = self.group.n(j);
            let mut star = HeckeElt::basis(self.group.inv(&n));
            star.add_scaled(&-F::one(), &self.theta(j));
            acc = self.mul(&acc, &star);
        }
        self.mul(&acc, &HeckeElt::basis(self.group.inv(&u)))
    }

    /// All `w` with `l(w) <= n`, over the whole torus. `cap` bounds the
    /// central part of `Omega` when it is infinite.
    pub fn filtration_basis(&self, n: usize, cap: Option<i32>) -> Result<Vec<ProPElt>, HeckeError> {
        let ws = self.weyl().ball_flat(n, cap)?;
        Ok(self.group.over(&ws))
    }

    /// Basis elements by length, levels `0..=n`.
    pub fn filtration_levels(&self, n: usize, cap: Option<i32>) -> Result<Vec<Vec<ProPElt>>, HeckeError> {
        Ok(self.weyl().ball(n, cap)?.iter().map(|lv| self.group.over(lv)).collect())
    }

    /// Length-zero basis elements `T x Omega` (with the central cap).
    pub fn units(&self, cap: Option<i32>) -> Result<Vec<ProPElt>, HeckeError> {
        Ok(self.group.over(&self.weyl().omega_elements(cap)?))
    }

    /// Generators of the unit group: torus basis, `Omega` torsion part and
    /// `+-` central translations.
    pub fn unit_generators(&self) -> Vec<ProPElt> {
        let mut out: Vec<ProPElt> = self.group.torus_generators().iter().map(|t| self.group.torus_elt(t)).collect();
        for om in self.weyl().omega_fin.iter().skip(1) {
            out.push(self.group.lift(om));
        }
        for z in &self.weyl().central {
            out.push(self.group.lift(&WeylElt::translation(*z)));
            out.push(self.group.lift(&WeylElt::translation(z.map(|x| -x))));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{F2, F3, Q};
    use crate::rootdata::{CartanType, Isogeny, RootDatum};

    fn alg<F: Field>(t: CartanType, iso: Isogeny, q: u64, flavor: Flavor) -> HeckeAlgebra<F> {
        HeckeAlgebra::new(WeylGroup::new(RootDatum::new(t, iso).unwrap()), q, flavor).unwrap()
    }

    #[test]
    fn quadratic_relation_rank_one() {
        // q = 2 over F_2: tau_s^2 = tau_s (q = 0, theta_s = tau_1)
        let h = alg::<F2>(CartanType::A1, Isogeny::SimplyConnected, 2, Flavor::ProP);
        let s = h.tau_n(0);
        assert_eq!(h.mul(&s, &s), s);

        // q = 3 over Q: 3 tau_{s^2} + tau_{s t0} + tau_{s t1}
        let h = alg::<Q>(CartanType::A1, Isogeny::SimplyConnected, 3, Flavor::ProP);
        let n = h.group.n(0);
        let sq = h.mul(&h.tau_n(0), &h.tau_n(0));
        let mut expected = HeckeElt::term(h.group.mul(&n, &n), Q::from_i64(3));
        for t in h.group.torus_elements() {
            expected.add_term(h.group.mul_torus(&n, &t), Q::from_i64(1));
        }
        assert_eq!(sq, expected);
        assert_eq!(h.theta(0).terms.len(), 2);
    }

    #[test]
    fn invertibility_witness() {
        // tau_s (tau_s - theta_s) = q tau_{coroot(-1)}
        let h = alg::<Q>(CartanType::A2, Isogeny::SimplyConnected, 3, Flavor::ProP);
        for j in 0..3 {
            let s = h.tau_n(j);
            let lhs = h.mul(&s, &s.minus(&h.theta(j)));
            let sq = h.group.torus_elt(&h.group.square[j]);
            assert_eq!(lhs, HeckeElt::term(sq, Q::from_i64(3)));
        }
    }

    #[test]
    fn iota_matches_tau_star_and_is_involutive() {
        for (t, iso, q) in [
            (CartanType::A1, Isogeny::Adjoint, 3),
            (CartanType::A2, Isogeny::SimplyConnected, 2),
            (CartanType::B2, Isogeny::SimplyConnected, 3),
        ] {
            let h = alg::<F3>(t, iso, q, Flavor::ProP);
            for x in h.filtration_basis(3, None).unwrap() {
                let lhs = h.iota_basis(&x);
                let sign = F3::sign(h.length(&x) % 2 == 0);
                let rhs = h.tau_star(&h.group.inv(&x)).scale(&sign);
                assert_eq!(lhs, rhs, "{x:?}");
                assert_eq!(h.iota(&lhs), HeckeElt::basis(x));
            }
        }
    }

    #[test]
    fn iwahori_quadratic_and_involution() {
        let h = alg::<Q>(CartanType::A1, Isogeny::SimplyConnected, 2, Flavor::Iwahori);
        let s = h.tau_n(0);
        let two = Q::from_i64(2);
        let expected = s.scale(&Q::from_i64(1)).plus(&h.one().scale(&two));
        assert_eq!(h.mul(&s, &s), expected);
        // -(tau_s + 1 - q)
        let iota = h.iota(&s);
        assert_eq!(iota, s.scale(&-Q::from_i64(1)).plus(&h.one()));
    }

    #[test]
    fn filtration_dimensions() {
        let h = alg::<Q>(CartanType::A1, Isogeny::SimplyConnected, 3, Flavor::ProP);
        assert_eq!(h.filtration_basis(2, None).unwrap().len(), 10);
        let h = alg::<Q>(CartanType::A1, Isogeny::Adjoint, 2, Flavor::ProP);
        assert_eq!(h.filtration_basis(0, None).unwrap().len(), 2);
        let h = alg::<Q>(CartanType::A1, Isogeny::GlStyle(1), 2, Flavor::ProP);
        assert!(h.filtration_basis(0, None).is_err());
    }

    #[test]
    fn j_c_signs() {
        let h = alg::<Q>(CartanType::A1, Isogeny::Adjoint, 2, Flavor::ProP);
        let om = h.group.lift(&h.weyl().omega_fin[1]);
        assert_eq!(h.j_c(&h.tau(om)), h.tau(om).scale(&-Q::from_i64(1)));
        assert_eq!(h.j_c(&h.tau_n(0)), h.tau_n(0));
    }
}
