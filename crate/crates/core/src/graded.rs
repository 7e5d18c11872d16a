//! The graded ring `gr H` of the length filtration `F_n H`.
//!
//! Symbols reuse the basis of `H`: `tau_x` in degree `l(x)` stands for its
//! class in `F_l / F_{l-1}`. The product is `tau_v tau_w = tau_{vw}` when
//! `l(vw) = l(v) + l(w)` and `0` otherwise.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::apartment::Apartment;
use crate::field::Field;
use crate::hecke::{HeckeAlgebra, HeckeElt};
use crate::homology::{self, Coefficients, ExactnessReport, HomologyError, Induction, TruncatedComplex};
use crate::linalg::SparseVec;
use crate::parahoric::{in_parahoric, ParahoricError};
use crate::rootdata::{Lat, MAX_LATTICE_RANK};
use crate::weyl::pro_p::ProPElt;
use crate::weyl::{Mask, WeylElt};

pub fn gr_mul_basis<F: Field>(alg: &HeckeAlgebra<F>, x: &ProPElt, y: &ProPElt) -> Option<ProPElt> {
    let g = &alg.group;
    let xy = g.mul(x, y);
    (g.length(&xy) == g.length(x) + g.length(y)).then_some(xy)
}

pub fn gr_mul<F: Field>(alg: &HeckeAlgebra<F>, a: &HeckeElt<F>, b: &HeckeElt<F>) -> HeckeElt<F> {
    let mut out = HeckeElt::zero();
    for (x, c) in &a.terms {
        for (y, d) in &b.terms {
            if let Some(z) = gr_mul_basis(alg, x, y) {
                out.add_term(z, c.clone() * d.clone());
            }
        }
    }
    out
}

/// Top-degree part; zero for zero.
pub fn symbol<F: Field>(alg: &HeckeAlgebra<F>, h: &HeckeElt<F>) -> HeckeElt<F> {
    let Some(top) = alg.degree(h) else { return HeckeElt::zero() };
    HeckeElt {
        terms: h.terms.iter().filter(|(x, _)| alg.length(x) == top).map(|(x, c)| (*x, c.clone())).collect(),
    }
}

/// `symbol(ab) = symbol(a) symbol(b)` when the right side is nonzero,
/// otherwise `deg(ab) < deg(a) + deg(b)`.
pub fn gr_of_product<F: Field>(alg: &HeckeAlgebra<F>, a: &HeckeElt<F>, b: &HeckeElt<F>) -> bool {
    let (Some(da), Some(db)) = (alg.degree(a), alg.degree(b)) else { return true };
    let ab = alg.mul(a, b);
    let g = gr_mul(alg, &symbol(alg, a), &symbol(alg, b));
    if g.is_zero() {
        alg.degree(&ab).map_or(true, |d| d < da + db)
    } else {
        symbol(alg, &ab) == g && alg.degree(&ab) == Some(da + db)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AssociativityReport {
    pub triples: u64,
    pub failures: u64,
}

/// `(uv)w = u(vw)` for the nil product on all basis triples with
/// `l(u) + l(v) + l(w) <= max_total`.
pub fn gr_associativity<F: Field>(
    alg: &HeckeAlgebra<F>,
    max_total: usize,
    cap: Option<i32>,
) -> Result<AssociativityReport, HomologyError> {
    let levels = alg.filtration_levels(max_total, cap)?;
    let mut shapes = Vec::new();
    for a in 0..=max_total {
        for b in 0..=max_total - a {
            shapes.push((a, b));
        }
    }
    let per: Vec<(u64, u64)> = shapes
        .par_iter()
        .flat_map_iter(|&(a, b)| levels[a].iter().map(move |u| (a, b, u)))
        .map(|(a, b, u)| {
            let mut triples = 0u64;
            let mut failures = 0u64;
            for v in &levels[b] {
                let uv = gr_mul_basis(alg, u, v);
                for lw in levels.iter().take(max_total - a - b + 1) {
                    for w in lw {
                        triples += 1;
                        let left = uv.and_then(|x| gr_mul_basis(alg, &x, w));
                        let right = gr_mul_basis(alg, v, w).and_then(|y| gr_mul_basis(alg, u, &y));
                        if left != right {
                            failures += 1;
                        }
                    }
                }
            }
            (triples, failures)
        })
        .collect();
    Ok(AssociativityReport {
        triples: per.iter().map(|p| p.0).sum(),
        failures: per.iter().map(|p| p.1).sum(),
    })
}

/// Checks on the span `A` of the symbols of `T/T^1` (translations with
/// every torus lift), over lattice points with coordinates in `[-bound, bound]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SubalgebraReport {
    pub points: usize,
    pub pairs: usize,
    pub closure_failures: usize,
    pub commutativity_failures: usize,
    pub invariance_failures: usize,
    pub closed_form_failures: usize,
    pub additivity_failures: usize,
}

impl SubalgebraReport {
    pub fn passed(&self) -> bool {
        self.closure_failures == 0
            && self.commutativity_failures == 0
            && self.invariance_failures == 0
            && self.closed_form_failures == 0
            && self.additivity_failures == 0
    }
}

fn lattice_points(rank: usize, bound: i32) -> Vec<Lat> {
    let mut out = vec![[0; MAX_LATTICE_RANK]];
    for i in 0..rank {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-bound..=bound).map(move |c| {
                    let mut q = p;
                    q[i] = c;
                    q
                })
            })
            .collect();
    }
    out
}

pub fn check_a_subalgebra<F: Field>(alg: &HeckeAlgebra<F>, bound: i32) -> SubalgebraReport {
    let weyl = alg.weyl();
    let rd = &weyl.rd;
    let g = &alg.group;
    let points = lattice_points(rd.lattice_rank, bound);
    let tr = |lam: &Lat| g.lift(&WeylElt::translation(*lam));
    let len = |lam: &Lat| g.length(&tr(lam));
    let closed = |lam: &Lat| -> usize { (0..rd.num_positive).map(|k| rd.pair_root(lam, k).unsigned_abs() as usize).sum() };
    let mut rep = SubalgebraReport { points: points.len(), ..Default::default() };

    // chambers as W_0-images of the dominant cone: the roots w(alpha), alpha > 0
    let chambers: Vec<Vec<usize>> = (0..weyl.w0.order())
        .map(|a| (0..rd.num_positive).map(|k| weyl.w0.act_root(a as u8, k)).collect())
        .collect();
    let in_chamber = |lam: &Lat, ch: &[usize]| ch.iter().all(|&k| rd.pair_root(lam, k) >= 0);

    for lam in &points {
        if len(lam) != closed(lam) {
            rep.closed_form_failures += 1;
        }
        for a in 0..weyl.w0.order() {
            let n = g.lift(&WeylElt { fin: a as u8, trans: [0; MAX_LATTICE_RANK] });
            let conj = g.mul(&g.mul(&n, &tr(lam)), &g.inv(&n));
            let image = weyl.w0.act_lattice(a as u8, lam);
            if conj.w != WeylElt::translation(image) || g.length(&conj) != len(lam) {
                rep.invariance_failures += 1;
            }
        }
    }

    let tori = g.torus_elements();
    let lifts: Vec<ProPElt> =
        points.iter().flat_map(|lam| tori.iter().map(|t| g.mul(&g.torus_elt(t), &tr(lam)))).collect();
    let is_translation = |x: &ProPElt| x.w.fin == 0;
    let (closure, commut) = lifts
        .par_iter()
        .map(|x| {
            let mut c = (0, 0);
            for y in &lifts {
                let xy = gr_mul_basis(alg, x, y);
                if xy.is_some_and(|z| !is_translation(&z)) {
                    c.0 += 1;
                }
                if xy != gr_mul_basis(alg, y, x) {
                    c.1 += 1;
                }
            }
            c
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    rep.closure_failures = closure;
    rep.commutativity_failures = commut;
    rep.pairs = lifts.len() * lifts.len();

    for lam in &points {
        for mu in &points {
            let mut sum = [0; MAX_LATTICE_RANK];
            for i in 0..MAX_LATTICE_RANK {
                sum[i] = lam[i] + mu[i];
            }
            let additive = len(&sum) == len(lam) + len(mu);
            let common = chambers.iter().any(|ch| in_chamber(lam, ch) && in_chamber(mu, ch));
            if additive != common {
                rep.additivity_failures += 1;
            }
        }
    }
    rep
}

/// `H` as coefficients with the nil product in place of the Hecke product.
#[derive(Clone, Copy, Debug)]
pub struct GradedRegular {
    pub cap: Option<i32>,
}

impl<F: Field> Coefficients<F> for GradedRegular {
    type Label = ProPElt;

    fn labels(&self, alg: &HeckeAlgebra<F>, max_degree: usize) -> Result<Vec<ProPElt>, HomologyError> {
        Ok(alg.filtration_basis(max_degree, self.cap)?)
    }

    fn degree(&self, alg: &HeckeAlgebra<F>, v: &ProPElt) -> usize {
        alg.length(v)
    }

    fn act(&self, alg: &HeckeAlgebra<F>, x: &ProPElt, v: &ProPElt) -> Vec<(ProPElt, F)> {
        gr_mul_basis(alg, x, v).map(|z| (z, F::one())).into_iter().collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GradedExactness {
    /// One report per degree `0..=n`.
    pub degrees: Vec<ExactnessReport>,
    /// The symbol complex built with the nil product agrees with the
    /// degree-`k` components of the filtered complex.
    pub symbols_match: bool,
    /// Every differential of the symbol complex is homogeneous.
    pub homogeneous: bool,
}

impl GradedExactness {
    pub fn passed(&self) -> bool {
        self.symbols_match && self.homogeneous && self.degrees.iter().all(|r| r.exact)
    }
}

/// Degree-`k` piece of a complex whose cells carry degrees: columns of
/// degree `k`, rows of degree `k`. `stray` is set when a kept column has
/// an entry outside degree `k`.
fn piece<F: Field>(
    c: &TruncatedComplex<F>,
    degs: &[Vec<usize>],
    target: &[usize],
    k: usize,
    stray: &mut bool,
) -> TruncatedComplex<F> {
    let renumber = |ds: &[usize]| -> HashMap<usize, usize> {
        ds.iter().enumerate().filter(|(_, d)| **d == k).enumerate().map(|(new, (old, _))| (old, new)).collect()
    };
    let rows: Vec<HashMap<usize, usize>> =
        std::iter::once(renumber(target)).chain(degs.iter().map(|d| renumber(d))).collect();
    let cols: Vec<HashMap<usize, usize>> = degs.iter().map(|d| renumber(d)).collect();
    let mut diffs = Vec::with_capacity(c.diffs.len());
    for (i, ds) in c.diffs.iter().enumerate() {
        let mut out = vec![SparseVec::new(); cols[i].len()];
        for (old, new) in &cols[i] {
            let kept: Vec<(usize, F)> = ds[*old]
                .entries
                .iter()
                .filter_map(|(r, a)| match rows[i].get(r) {
                    Some(nr) => Some((*nr, a.clone())),
                    None => {
                        *stray = true;
                        None
                    }
                })
                .collect();
            out[*new] = SparseVec::from_unsorted(kept);
        }
        diffs.push(out);
    }
    TruncatedComplex { dims: cols.iter().map(HashMap::len).collect(), target_dim: rows[0].len(), diffs }
}

/// Exactness of `gr` of the bimodule resolution in each degree `k <= n`,
/// computed both from the symbol complex and from the filtered one.
pub fn graded_strict_exactness<F: Field>(
    alg: &HeckeAlgebra<F>,
    apt: &Apartment,
    n: usize,
    cap: Option<i32>,
) -> Result<GradedExactness, HomologyError> {
    if !alg.weyl().is_semisimple() && cap.is_none() {
        return Err(HomologyError::Hecke(crate::hecke::HeckeError::Weyl(crate::weyl::WeylError::InfiniteBasis)));
    }
    let filtered = homology::build_complex(alg, apt, &homology::Regular { cap }, n, false)?;
    let graded = homology::build_complex(alg, apt, &GradedRegular { cap }, n, false)?;
    let ind = Induction::new(alg, apt);
    let coeff = GradedRegular { cap };
    let degs: Vec<Vec<usize>> = (0..=apt.rank)
        .map(|lvl| {
            homology::cells(&ind, &coeff, lvl, n)
                .map(|cs| cs.iter().map(|c| alg.weyl().length(&c.d) + alg.length(&c.label)).collect())
        })
        .collect::<Result<_, _>>()?;
    let target: Vec<usize> = alg.filtration_basis(n, cap)?.iter().map(|x| alg.length(x)).collect();
    let mut homogeneous = true;
    let mut symbols_match = true;
    let mut degrees = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut stray = false;
        let sym = piece(&graded, &degs, &target, k, &mut stray);
        homogeneous &= !stray;
        let mut dropped = false;
        let top = piece(&filtered, &degs, &target, k, &mut dropped);
        symbols_match &= sym.diffs == top.diffs;
        degrees.push(sym.exactness());
    }
    Ok(GradedExactness { degrees, symbols_match, homogeneous })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GrFreeReport {
    pub checked: usize,
    pub failures: usize,
    /// Nonzero products of symbols of `W~_F^†` stay in `W~_F^†`.
    pub subalgebra_closed: bool,
}

/// `gr H` is free over `gr H_F^†` on the symbols of `D_F^†`: each `tau_x`
/// with `l(x) <= max_len` is the nil product of a unique pair.
pub fn gr_free<F: Field>(
    alg: &HeckeAlgebra<F>,
    mask: Mask,
    max_len: usize,
    cap: Option<i32>,
) -> Result<GrFreeReport, ParahoricError> {
    let weyl = alg.weyl();
    let g = &alg.group;
    let reps = weyl.distinguished_reps(mask, max_len, true, cap).map_err(crate::hecke::HeckeError::from)?;
    let elts = alg.filtration_basis(max_len, cap)?;
    let mut seen: HashMap<(WeylElt, ProPElt), ProPElt> = HashMap::new();
    let mut failures = 0;
    for x in &elts {
        let (d, _) = weyl.factor(mask, &x.w, true);
        let dhat = g.lift(&d);
        let h = g.mul(&g.inv(&dhat), x);
        let ok = reps.contains(&d)
            && in_parahoric(weyl, mask, true, &h.w)
            && gr_mul_basis(alg, &dhat, &h) == Some(*x);
        if !ok || seen.insert((d, h), *x).is_some() {
            failures += 1;
        }
    }
    let sub: Vec<&ProPElt> = elts.iter().filter(|x| in_parahoric(weyl, mask, true, &x.w)).collect();
    let subalgebra_closed = sub.iter().all(|u| {
        sub.iter().all(|v| gr_mul_basis(alg, u, v).map_or(true, |z| in_parahoric(weyl, mask, true, &z.w)))
    });
    Ok(GrFreeReport { checked: elts.len(), failures, subalgebra_closed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{F2, F3, Q};
    use crate::hecke::Flavor;
    use crate::rootdata::{CartanType, Isogeny, RootDatum};
    use crate::weyl::WeylGroup;

    fn alg<F: Field>(t: CartanType, iso: Isogeny, q: u64) -> HeckeAlgebra<F> {
        HeckeAlgebra::new(WeylGroup::new(RootDatum::new(t, iso).unwrap()), q, Flavor::ProP).unwrap()
    }

    #[test]
    fn nil_rule_and_symbols() {
        let h = alg::<Q>(CartanType::A1, Isogeny::SimplyConnected, 3);
        let s = h.group.n(0);
        let s1 = h.group.n(1);
        assert_eq!(gr_mul_basis(&h, &s, &s), None);
        assert_eq!(gr_mul_basis(&h, &s, &s1), Some(h.group.mul(&s, &s1)));
        let ts = h.tau(s);
        assert!(gr_of_product(&h, &ts, &ts));
        assert!(h.degree(&h.mul(&ts, &ts)).unwrap() <= 1);
        assert!(gr_mul(&h, &ts, &ts).is_zero());
        let scalar = h.one().scale(&Q::from_i64(5));
        assert!(gr_of_product(&h, &scalar, &ts));
        assert_eq!(symbol(&h, &h.mul(&scalar, &ts)), ts.scale(&Q::from_i64(5)));
        let basis = h.filtration_basis(3, None).unwrap();
        for x in &basis {
            for y in &basis {
                assert!(gr_of_product(&h, &h.tau(*x), &h.tau(*y)));
            }
        }
    }

    #[test]
    fn associativity_small() {
        let h = alg::<F2>(CartanType::A1, Isogeny::Adjoint, 3);
        let r = gr_associativity(&h, 6, None).unwrap();
        assert!(r.triples > 0);
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn translation_subalgebra() {
        for (t, iso) in [
            (CartanType::A1, Isogeny::SimplyConnected),
            (CartanType::A1, Isogeny::Adjoint),
            (CartanType::A2, Isogeny::SimplyConnected),
            (CartanType::A1, Isogeny::GlStyle(1)),
        ] {
            let h = alg::<F3>(t, iso, 3);
            let r = check_a_subalgebra(&h, 3);
            assert!(r.passed(), "{t:?} {iso:?}: {r:?}");
        }
    }

    #[test]
    fn additivity_fails_across_walls() {
        // lambda and -lambda never share a closed chamber unless lambda is central
        let h = alg::<F3>(CartanType::A1, Isogeny::SimplyConnected, 2);
        let x = h.group.lift(&WeylElt::translation([1, 0, 0, 0]));
        let y = h.group.lift(&WeylElt::translation([-1, 0, 0, 0]));
        assert_eq!(gr_mul_basis(&h, &x, &y), None);
        let x2 = h.group.lift(&WeylElt::translation([2, 0, 0, 0]));
        assert_eq!(gr_mul_basis(&h, &x, &x), Some(x2));
    }

    #[test]
    fn graded_exactness_small() {
        let w = WeylGroup::new(RootDatum::new(CartanType::A1, Isogeny::Adjoint).unwrap());
        let apt = Apartment::new(&w, false);
        let h = HeckeAlgebra::<F3>::new(w, 3, Flavor::ProP).unwrap();
        let r = graded_strict_exactness(&h, &apt, 4, None).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.degrees.len(), 5);
    }

    #[test]
    fn gr_free_bases() {
        let h = alg::<F2>(CartanType::A2, Isogeny::Adjoint, 2);
        for mask in [0b001u32, 0b011, 0b110] {
            let r = gr_free(&h, mask, 4, None).unwrap();
            assert_eq!(r.failures, 0);
            assert!(r.subalgebra_closed);
        }
    }
}
