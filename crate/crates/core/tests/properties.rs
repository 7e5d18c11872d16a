use heckeforge::field::{Field, Fp, Q};
use heckeforge::hecke::{Flavor, HeckeAlgebra, HeckeElt};
use heckeforge::rootdata::{CartanType, Isogeny, RootDatum, MAX_LATTICE_RANK};
use heckeforge::weyl::{WeylElt, WeylGroup};
use proptest::prelude::*;

fn group(c: CartanType, i: Isogeny) -> WeylGroup {
    WeylGroup::new(RootDatum::new(c, i).unwrap())
}

fn data() -> impl Strategy<Value = (CartanType, Isogeny)> {
    prop_oneof![
        Just((CartanType::A1, Isogeny::SimplyConnected)),
        Just((CartanType::A1, Isogeny::Adjoint)),
        Just((CartanType::A2, Isogeny::SimplyConnected)),
        Just((CartanType::A2, Isogeny::Adjoint)),
        Just((CartanType::B2, Isogeny::SimplyConnected)),
        Just((CartanType::G2, Isogeny::SimplyConnected)),
    ]
}

fn word(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 0..max_len)
}

/// Word over `S_aff` with letters reduced modulo `rank + 1`.
fn element(w: &WeylGroup, letters: &[usize]) -> WeylElt {
    let k = w.num_affine();
    let word: Vec<usize> = letters.iter().map(|j| j % k).collect();
    w.from_word(&WeylElt::IDENTITY, &word)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn length_is_inverse_invariant_and_word_bounded(d in data(), a in word(12)) {
        let w = group(d.0, d.1);
        let x = element(&w, &a);
        let l = w.length(&x);
        prop_assert_eq!(l, w.length(&w.inv(&x)));
        prop_assert!(l <= a.len());
        prop_assert_eq!(l % 2, a.len() % 2);
    }

    #[test]
    fn reduced_word_rebuilds_the_element(d in data(), a in word(12)) {
        let w = group(d.0, d.1);
        let x = element(&w, &a);
        let (om, red) = w.reduced_word(&x);
        prop_assert_eq!(w.length(&om), 0);
        prop_assert_eq!(red.len(), w.length(&x));
        prop_assert_eq!(w.from_word(&om, &red), x);
    }

    #[test]
    fn descents_change_length_by_one(d in data(), a in word(10), j in 0usize..3) {
        let w = group(d.0, d.1);
        let j = j % w.num_affine();
        let x = element(&w, &a);
        let y = w.mul_simple(&x, j);
        let expected = if w.is_descent(&x, j) { w.length(&x) - 1 } else { w.length(&x) + 1 };
        prop_assert_eq!(w.length(&y), expected);
    }

    #[test]
    fn group_law_is_associative(d in data(), a in word(8), b in word(8), c in word(8)) {
        let w = group(d.0, d.1);
        let (x, y, z) = (element(&w, &a), element(&w, &b), element(&w, &c));
        prop_assert_eq!(w.mul(&w.mul(&x, &y), &z), w.mul(&x, &w.mul(&y, &z)));
        prop_assert_eq!(w.mul(&x, &w.inv(&x)), WeylElt::IDENTITY);
    }

    #[test]
    fn translation_length_is_the_root_sum(d in data(), c in prop::collection::vec(-4i32..=4, 2)) {
        let w = group(d.0, d.1);
        let mut lam = [0i32; MAX_LATTICE_RANK];
        for (j, cj) in c.iter().enumerate().take(w.rank()) {
            for (l, v) in lam.iter_mut().zip(&w.rd.roots[w.aff[j].root].coroot) {
                *l += cj * v;
            }
        }
        let brute: i64 = (0..w.rd.num_roots())
            .filter(|&k| w.rd.is_positive(k))
            .map(|k| w.rd.pair_root(&lam, k).abs())
            .sum();
        prop_assert_eq!(w.length(&WeylElt::translation(lam)) as i64, brute);
    }
}

/// Random combination of products of generators `tau_{n_j}` and units.
fn random_elt<F: Field>(h: &HeckeAlgebra<F>, spec: &[(Vec<usize>, i64)]) -> HeckeElt<F> {
    let k = h.weyl().num_affine();
    let units = h.unit_generators();
    let mut out = HeckeElt::zero();
    for (letters, c) in spec {
        let mut t = h.one();
        for &l in letters {
            let g = match l % (k + 1) {
                j if j < k => h.tau_n(j),
                _ if units.is_empty() => continue,
                _ => h.tau(units[l % units.len()]),
            };
            t = h.mul(&t, &g);
        }
        out.add_scaled(&F::from_i64(*c), &t);
    }
    out
}

fn combination() -> impl Strategy<Value = Vec<(Vec<usize>, i64)>> {
    prop::collection::vec((prop::collection::vec(0usize..8, 0..4), -3i64..=3), 1..4)
}

fn algebra<F: Field>(c: CartanType, q: u64, flavor: Flavor) -> HeckeAlgebra<F> {
    HeckeAlgebra::new(group(c, Isogeny::SimplyConnected), q, flavor).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hecke_product_is_associative(a in combination(), b in combination(), c in combination(), rank_two in any::<bool>()) {
        let cartan = if rank_two { CartanType::A2 } else { CartanType::A1 };
        let h = algebra::<Fp<3>>(cartan, 3, Flavor::ProP);
        let (x, y, z) = (random_elt(&h, &a), random_elt(&h, &b), random_elt(&h, &c));
        prop_assert_eq!(h.mul(&h.mul(&x, &y), &z), h.mul(&x, &h.mul(&y, &z)));
    }

    #[test]
    fn involutions_are_multiplicative(a in combination(), b in combination(), iwahori in any::<bool>()) {
        let flavor = if iwahori { Flavor::Iwahori } else { Flavor::ProP };
        let h = algebra::<Q>(CartanType::A2, 2, flavor);
        let (x, y) = (random_elt(&h, &a), random_elt(&h, &b));
        let xy = h.mul(&x, &y);
        for phi in [HeckeAlgebra::iota, HeckeAlgebra::j_c, HeckeAlgebra::iota_c] {
            prop_assert_eq!(phi(&h, &phi(&h, &x)), x.clone());
            prop_assert_eq!(phi(&h, &xy), h.mul(&phi(&h, &x), &phi(&h, &y)));
        }
    }
}
