//! The extension `1 -> T(F_q) -> W~ -> W -> 1`.
//!
//! `T(F_q) = X_* ⊗ F_q^x` is stored additively as `X_*` modulo `m`, where
//! `m = q - 1` (pro-p flavor) or `m = 1` (Iwahori flavor, torus collapsed).
//! An element `(t, w)` stands for `t * lift(w)`, with
//! `lift(w) = lift(omega) n_{i1} ... n_{il}` for the decomposition
//! `w = omega s_{i1} ... s_{il}` returned by [`WeylGroup::reduced_word`].
//! The lifts satisfy the braid relations, `n_j^2 = t_j = coroot_j(-1)`,
//! `lift(omega) n_j lift(omega)^{-1} = n_{pi_omega(j)}`, and `Omega` lifts
//! as a subgroup.

use serde::Serialize;

use super::{WeylElt, WeylGroup};
use crate::rootdata::{Lat, MAX_LATTICE_RANK};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct ProPElt {
    pub w: WeylElt,
    pub torus: Lat,
}

#[derive(Clone, Debug)]
pub struct ProPGroup {
    pub weyl: WeylGroup,
    pub q: u64,
    /// Modulus of the torus coordinates.
    pub modulus: i32,
    /// `t_j = n_j^2` for each `j` in `S_aff`.
    pub square: Vec<Lat>,
    /// Generator of `T_s` (the `F_q`-points of the image of the coroot).
    pub ts_gen: Vec<Lat>,
}

fn gcd(a: i32, b: i32) -> i32 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl ProPGroup {
    /// `pro_p = false` collapses the torus, giving `W` itself.
    pub fn new(weyl: WeylGroup, q: u64, pro_p: bool) -> Self {
        let modulus = if pro_p { (q - 1) as i32 } else { 1 };
        let half = if q % 2 == 1 { ((q - 1) / 2) as i32 } else { 0 };
        let mut g = ProPGroup { weyl, q, modulus, square: vec![], ts_gen: vec![] };
        let coroots: Vec<Lat> = g.weyl.aff.iter().map(|a| g.weyl.rd.roots[a.root].coroot).collect();
        g.square = coroots.iter().map(|c| g.reduce(&c.map(|x| x * half))).collect();
        g.ts_gen = coroots
            .iter()
            .map(|c| {
                let d = c.iter().fold(0, |acc, x| gcd(acc, *x));
                g.reduce(&c.map(|x| x / d))
            })
            .collect();
        g
    }

    pub fn is_pro_p(&self) -> bool {
        self.modulus > 1
    }

    pub fn reduce(&self, t: &Lat) -> Lat {
        let mut out = [0; MAX_LATTICE_RANK];
        for i in 0..self.weyl.rd.lattice_rank {
            out[i] = t[i].rem_euclid(self.modulus);
        }
        out
    }

    pub fn add_torus(&self, a: &Lat, b: &Lat) -> Lat {
        let mut s = [0; MAX_LATTICE_RANK];
        for i in 0..MAX_LATTICE_RANK {
            s[i] = a[i] + b[i];
        }
        self.reduce(&s)
    }

    pub fn neg_torus(&self, a: &Lat) -> Lat {
        self.reduce(&a.map(|x| -x))
    }

    /// Conjugation of the torus by a lift of `w`: only the finite part acts.
    pub fn act_torus(&self, w: &WeylElt, t: &Lat) -> Lat {
        self.reduce(&self.weyl.w0.act_lattice(w.fin, t))
    }

    pub fn identity(&self) -> ProPElt {
        ProPElt { w: WeylElt::IDENTITY, torus: [0; MAX_LATTICE_RANK] }
    }

    pub fn lift(&self, w: &WeylElt) -> ProPElt {
        ProPElt { w: *w, torus: [0; MAX_LATTICE_RANK] }
    }

    pub fn torus_elt(&self, t: &Lat) -> ProPElt {
        ProPElt { w: WeylElt::IDENTITY, torus: self.reduce(t) }
    }

    pub fn n(&self, j: usize) -> ProPElt {
        self.lift(&self.weyl.simple(j))
    }

    pub fn length(&self, x: &ProPElt) -> usize {
        self.weyl.length(&x.w)
    }

    pub fn is_descent(&self, x: &ProPElt, j: usize) -> bool {
        self.weyl.is_descent(&x.w, j)
    }

    /// `x n_j`.
    pub fn mul_n(&self, x: &ProPElt, j: usize) -> ProPElt {
        let ws = self.weyl.mul_simple(&x.w, j);
        if self.weyl.is_descent(&x.w, j) {
            let extra = self.act_torus(&ws, &self.square[j]);
            ProPElt { w: ws, torus: self.add_torus(&x.torus, &extra) }
        } else {
            ProPElt { w: ws, torus: x.torus }
        }
    }

    /// `x lift(omega)` for `omega` of length zero.
    pub fn mul_omega(&self, x: &ProPElt, omega: &WeylElt) -> ProPElt {
        ProPElt { w: self.weyl.mul(&x.w, omega), torus: x.torus }
    }

    /// `x t`.
    pub fn mul_torus(&self, x: &ProPElt, t: &Lat) -> ProPElt {
        let moved = self.act_torus(&x.w, t);
        ProPElt { w: x.w, torus: self.add_torus(&x.torus, &moved) }
    }

    pub fn mul(&self, x: &ProPElt, y: &ProPElt) -> ProPElt {
        let (omega, word) = self.weyl.reduced_word(&y.w);
        let mut acc = self.mul_torus(x, &y.torus);
        acc = self.mul_omega(&acc, &omega);
        for j in word {
            acc = self.mul_n(&acc, j);
        }
        acc
    }

    pub fn inv(&self, x: &ProPElt) -> ProPElt {
        let (omega, word) = self.weyl.reduced_word(&x.w);
        let mut acc = self.identity();
        // n_j^{-1} = n_j t_j since t_j has order at most 2
        for &j in word.iter().rev() {
            acc = self.mul_n(&acc, j);
            acc = self.mul_torus(&acc, &self.square[j]);
        }
        acc = self.mul_omega(&acc, &self.weyl.inv(&omega));
        self.mul_torus(&acc, &self.neg_torus(&x.torus))
    }

    /// All of `T(F_q)`.
    pub fn torus_elements(&self) -> Vec<Lat> {
        let n = self.weyl.rd.lattice_rank;
        let mut out = vec![[0; MAX_LATTICE_RANK]];
        for i in 0..n {
            let mut next = Vec::new();
            for t in &out {
                for c in 0..self.modulus {
                    let mut v = *t;
                    v[i] = c;
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Standard basis of `X_*`, generating the torus.
    pub fn torus_generators(&self) -> Vec<Lat> {
        if !self.is_pro_p() {
            return vec![];
        }
        (0..self.weyl.rd.lattice_rank)
            .map(|i| {
                let mut e = [0; MAX_LATTICE_RANK];
                e[i] = 1;
                e
            })
            .collect()
    }

    /// `T_s` for `s = s_j`: `{a * gen : a in Z/(q-1)}`, with `q - 1` elements
    /// counted with multiplicity (a multiset sum in the quadratic relation).
    pub fn ts_elements(&self, j: usize) -> Vec<Lat> {
        let m = (self.q - 1) as i32;
        (0..m).map(|a| self.reduce(&self.ts_gen[j].map(|x| x * a))).collect()
    }

    /// Every element of `W~` over a list of `W`-elements.
    pub fn over(&self, ws: &[WeylElt]) -> Vec<ProPElt> {
        let ts = self.torus_elements();
        let mut out = Vec::with_capacity(ws.len() * ts.len());
        for w in ws {
            for t in &ts {
                out.push(ProPElt { w: *w, torus: *t });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{CartanType, Isogeny, RootDatum};

    fn group(t: CartanType, iso: Isogeny, q: u64) -> ProPGroup {
        ProPGroup::new(WeylGroup::new(RootDatum::new(t, iso).unwrap()), q, true)
    }

    #[test]
    fn inverse_and_associativity_on_a_ball() {
        for (t, iso, q) in [
            (CartanType::A1, Isogeny::SimplyConnected, 3),
            (CartanType::A1, Isogeny::Adjoint, 5),
            (CartanType::A2, Isogeny::Adjoint, 2),
            (CartanType::B2, Isogeny::SimplyConnected, 3),
        ] {
            let g = group(t, iso, q);
            let ws = g.weyl.ball_flat(2, Some(0)).unwrap();
            let xs: Vec<ProPElt> = g.over(&ws).into_iter().step_by(3).take(40).collect();
            for x in &xs {
                assert_eq!(g.mul(x, &g.inv(x)), g.identity());
                assert_eq!(g.mul(&g.inv(x), x), g.identity());
            }
            for x in xs.iter().take(12) {
                for y in xs.iter().take(12) {
                    for z in xs.iter().take(6) {
                        assert_eq!(g.mul(&g.mul(x, y), z), g.mul(x, &g.mul(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn n_squared_is_coroot_of_minus_one() {
        let g = group(CartanType::A1, Isogeny::SimplyConnected, 5);
        let n0 = g.n(0);
        let sq = g.mul(&n0, &n0);
        assert_eq!(sq.w, WeylElt::IDENTITY);
        // coroot(-1) = 2 in Z/4
        assert_eq!(sq.torus[0], 2);
        let even = group(CartanType::A1, Isogeny::SimplyConnected, 4);
        assert_eq!(even.mul(&even.n(1), &even.n(1)), even.identity());
        assert_eq!(g.ts_elements(0).len(), 4);
    }
}
