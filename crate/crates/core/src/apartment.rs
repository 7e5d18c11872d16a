//! Faces of the closed standard chamber, their `Omega`-orbit
//! representatives, orientations and boundary signs, and the facets of the
//! standard apartment as translates of these faces.
//!
//! A face of `C̄` is the bit mask `S_F` of affine simple roots vanishing on
//! it. Vertex `v_i` is the face with `S_F = S_aff \ {i}`, so the vertices of
//! a face are the complement of its mask. Orientations are ordered vertex
//! lists with a sign.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rootdata::RootDatum;
use crate::weyl::{perm_sign, Mask, WeylElt, WeylError, WeylGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApartmentError {
    #[error("facet is not a chamber")]
    NotAChamber,
    #[error("element does not stabilize the face")]
    DoesNotStabilize,
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

/// An `Omega`-orbit representative of the faces of `C̄` of one dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceRep {
    pub mask: Mask,
    pub dim: usize,
    /// Reference orientation: vertex order and sign.
    pub vertices: Vec<usize>,
    pub sign: i8,
    /// Indices into `omega_fin` of the torsion part of `Omega_F`.
    pub stabilizer: Vec<usize>,
}

/// One codimension-one face `omega F'` of a face, with its sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryEntry {
    /// Index of `F'` among the representatives one dimension lower.
    pub face: usize,
    /// Index into `omega_fin`.
    pub omega: usize,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct Apartment {
    pub rank: usize,
    /// `reps[i]` is the list `F_i`.
    pub reps: Vec<Vec<FaceRep>>,
    /// `boundary[i][k]` lists the faces of `reps[i][k]` (empty for `i = 0`).
    pub boundary: Vec<Vec<Vec<BoundaryEntry>>>,
    /// Whether the reference orientation of `C` was reversed.
    pub flipped: bool,
}

/// Sign of the permutation taking list `a` to list `b` (same elements).
fn relative_sign(a: &[usize], b: &[usize]) -> i8 {
    let p: Vec<usize> = a.iter().map(|x| b.iter().position(|y| y == x).expect("same vertex sets")).collect();
    perm_sign(&p)
}

fn vertices_of(mask: Mask, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) == 0).collect()
}

impl Apartment {
    pub fn new(weyl: &WeylGroup, flipped: bool) -> Self {
        let d = weyl.rank();
        let n = weyl.num_affine();
        let full = weyl.full_mask();
        let mut reps: Vec<Vec<FaceRep>> = vec![Vec::new(); d + 1];
        let mut seen = BTreeSet::new();
        for mask in 0..full {
            if seen.contains(&mask) {
                continue;
            }
            for perm in &weyl.omega_perm {
                seen.insert(weyl.permute_mask(perm, mask));
            }
            let vertices = vertices_of(mask, n);
            let dim = vertices.len() - 1;
            reps[dim].push(FaceRep { mask, dim, vertices, sign: 1, stabilizer: weyl.omega_stabilizer(mask) });
        }
        // chamber, then codimension one faces with the induced orientation
        let c_sign = if flipped { -1 } else { 1 };
        reps[d][0].sign = c_sign;
        if d >= 1 {
            for rep in reps[d - 1].iter_mut() {
                let missing = (0..n).find(|v| !rep.vertices.contains(v)).unwrap();
                rep.sign = c_sign * if missing % 2 == 0 { 1 } else { -1 };
            }
        }
        let mut apt = Apartment { rank: d, reps, boundary: vec![], flipped };
        apt.boundary = (0..=d)
            .map(|i| (0..apt.reps[i].len()).map(|k| apt.compute_boundary(weyl, i, k)).collect())
            .collect();
        apt
    }

    pub fn chamber(&self) -> &FaceRep {
        &self.reps[self.rank][0]
    }

    /// `(i, k)` with `reps[i][k]` in the `Omega`-orbit of `mask`, and an
    /// `omega_fin` index `w` with `omega_w F_rep = mask`.
    pub fn locate(&self, weyl: &WeylGroup, mask: Mask) -> (usize, usize, usize) {
        for (i, level) in self.reps.iter().enumerate() {
            for (k, rep) in level.iter().enumerate() {
                for (w, perm) in weyl.omega_perm.iter().enumerate() {
                    if weyl.permute_mask(perm, rep.mask) == mask {
                        return (i, k, w);
                    }
                }
            }
        }
        unreachable!("every proper mask is a face")
    }

    fn compute_boundary(&self, weyl: &WeylGroup, i: usize, k: usize) -> Vec<BoundaryEntry> {
        if i == 0 {
            return vec![];
        }
        let rep = &self.reps[i][k];
        let mut out = Vec::new();
        for (pos, v) in rep.vertices.iter().enumerate() {
            let induced: Vec<usize> = rep.vertices.iter().copied().filter(|x| x != v).collect();
            let induced_sign = rep.sign * if pos % 2 == 0 { 1 } else { -1 };
            let mask = rep.mask | (1 << v);
            let (_, face, omega) = self.locate(weyl, mask);
            let target = &self.reps[i - 1][face];
            let moved: Vec<usize> = target.vertices.iter().map(|x| weyl.omega_perm[omega][*x]).collect();
            let sign = induced_sign * target.sign * relative_sign(&moved, &induced);
            out.push(BoundaryEntry { face, omega, sign });
        }
        out
    }

    /// `eps_F(omega)` for `omega` in the torsion part of `Omega_F`: sign of
    /// the induced permutation of the vertices of `F`.
    pub fn orientation_character(&self, weyl: &WeylGroup, mask: Mask, omega: usize) -> Result<i8, ApartmentError> {
        let perm = &weyl.omega_perm[omega];
        if weyl.permute_mask(perm, mask) != mask {
            return Err(ApartmentError::DoesNotStabilize);
        }
        let vs = vertices_of(mask, weyl.num_affine());
        let moved: Vec<usize> = vs.iter().map(|v| perm[*v]).collect();
        Ok(relative_sign(&moved, &vs))
    }

    /// `eps_F` for an arbitrary element of `Omega_F` (central parts act
    /// trivially on orientations).
    pub fn eps_omega_elt(&self, weyl: &WeylGroup, mask: Mask, omega: &WeylElt) -> i8 {
        let (idx, _) = weyl.split_omega(omega);
        self.orientation_character(weyl, mask, idx).expect("element of Omega_F")
    }

    /// Twice-applied boundary, collected by `(F'', omega'')` after moving
    /// `omega omega'` into the chosen coset representative. Every
    /// coefficient vanishes when the signs are consistent.
    pub fn boundary_squared(&self, weyl: &WeylGroup, i: usize, k: usize) -> BTreeMap<(usize, usize), i64> {
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        if i < 2 {
            return acc;
        }
        for e in &self.boundary[i][k] {
            for e2 in &self.boundary[i - 1][e.face] {
                let om = weyl.mul(&weyl.omega_fin[e.omega], &weyl.omega_fin[e2.omega]);
                let (idx, _) = weyl.split_omega(&om);
                let target = &self.reps[i - 2][e2.face];
                let face_mask = weyl.permute_mask(&weyl.omega_perm[idx], target.mask);
                // canonical omega for this face, and the stabilizer element h
                let canon = (0..weyl.omega_fin.len())
                    .find(|&w| weyl.permute_mask(&weyl.omega_perm[w], target.mask) == face_mask)
                    .unwrap();
                let h = weyl.mul(&weyl.inv(&weyl.omega_fin[canon]), &weyl.omega_fin[idx]);
                let (hidx, _) = weyl.split_omega(&h);
                let twist = self.orientation_character(weyl, target.mask, hidx).unwrap();
                *acc.entry((e2.face, canon)).or_default() += (e.sign * e2.sign * twist) as i64;
            }
        }
        acc.retain(|_, v| *v != 0);
        acc
    }

    pub fn gallery_distance(&self, weyl: &WeylGroup, a: &Facet, b: &Facet) -> Result<usize, ApartmentError> {
        if a.mask != 0 || b.mask != 0 {
            return Err(ApartmentError::NotAChamber);
        }
        Ok(weyl.length(&weyl.mul(&weyl.inv(&a.position), &b.position)))
    }

    /// The chamber `dC` closest to `dF`, after checking that it is the
    /// unique minimizer of the distance to `C` among chambers `dhC`,
    /// `h` in `W_F`.
    pub fn closest_chamber(&self, weyl: &WeylGroup, f: &Facet) -> Result<(Facet, usize), ApartmentError> {
        let wf = weyl.parabolic(f.mask)?;
        let dists: Vec<usize> = wf.iter().map(|h| weyl.length(&weyl.mul(&f.position, h))).collect();
        let best = *dists.iter().min().unwrap();
        let count = dists.iter().filter(|x| **x == best).count();
        assert_eq!(count, 1, "closest chamber not unique");
        let pos = wf[dists.iter().position(|x| *x == best).unwrap()];
        Ok((Facet { mask: 0, position: weyl.mul(&f.position, &pos) }, best))
    }
}

/// The facet `position * F` of the apartment, `F` the face `mask` of `C̄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Facet {
    pub mask: Mask,
    pub position: WeylElt,
}

impl Facet {
    /// Canonical key: the face is moved so the position lies in `W_aff`,
    /// then the position is reduced to its minimal `W_F` coset
    /// representative.
    pub fn normalize(&self, weyl: &WeylGroup) -> Facet {
        let omega = weyl.omega_part(&self.position);
        let (idx, _) = weyl.split_omega(&omega);
        let mask = weyl.permute_mask(&weyl.omega_perm[idx], self.mask);
        let aff = weyl.mul(&self.position, &weyl.inv(&omega));
        let (d, _) = weyl.factor(mask, &aff, false);
        Facet { mask, position: d }
    }
}

/// Facets in the closure of the chamber `sigma C`.
pub fn closure_of_chamber(weyl: &WeylGroup, sigma: &WeylElt) -> Vec<Facet> {
    (0..weyl.full_mask()).map(|mask| Facet { mask, position: *sigma }.normalize(weyl)).collect()
}

/// Checks the decomposition `A(n) = A(n-1) ⊔ ⨆_{D in Ch(n)} (D̄ \ A(n-1))`
/// for `n = 1..=max_n`; returns the first failing `n`.
pub fn check_disjoint_layers(weyl: &WeylGroup, max_n: usize) -> Result<(), usize> {
    let levels = weyl.ball(max_n, Some(0)).expect("finite ball");
    let chambers = |n: usize| -> Vec<WeylElt> {
        levels[n].iter().copied().filter(|w| weyl.omega_part(w) == WeylElt::IDENTITY).collect()
    };
    let mut known: BTreeSet<Facet> = chambers(0).iter().flat_map(|c| closure_of_chamber(weyl, c)).collect();
    for n in 1..=max_n {
        let mut new: BTreeSet<Facet> = BTreeSet::new();
        for c in chambers(n) {
            for f in closure_of_chamber(weyl, &c) {
                if known.contains(&f) {
                    continue;
                }
                // a facet outside A(n-1) must belong to a single new chamber
                if !new.insert(f) {
                    return Err(n);
                }
            }
        }
        known.extend(new);
    }
    Ok(())
}

/// Rational coordinates of the vertices of `C̄` in the basis of `X_*`:
/// `v_d = 0` and `v_i` (`i < d`) solves `alpha_j(v) = 0` for `j != i`,
/// `theta(v) = 1`, with central coordinates zero.
pub fn vertex_coordinates(rd: &RootDatum) -> Vec<Vec<BigRational>> {
    let n = rd.lattice_rank;
    let d = rd.rank;
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut out = Vec::new();
    for i in 0..d {
        // equations: d rows for the semisimple coordinates, plus central = 0
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        let mut rhs: Vec<BigRational> = Vec::new();
        for j in 0..d {
            let form = if j == i { &rd.roots[rd.highest].weight } else { &rd.roots[j].weight };
            rows.push((0..n).map(|t| q(form[t] as i64)).collect());
            rhs.push(if j == i { q(1) } else { q(0) });
        }
        for c in d..n {
            rows.push((0..n).map(|t| q((t == c) as i64)).collect());
            rhs.push(q(0));
        }
        out.push(solve_square(rows, rhs));
    }
    out.push(vec![BigRational::zero(); n]);
    out
}

fn solve_square(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).expect("nonsingular system");
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = BigRational::one() / a[col][col].clone();
        for c in 0..n {
            a[col][c] = a[col][c].clone() * inv.clone();
        }
        b[col] = b[col].clone() * inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n {
                    let v = a[col][c].clone() * f.clone();
                    a[r][c] -= v;
                }
                let v = b[col].clone() * f;
                b[r] -= v;
            }
        }
    }
    b
}

/// Number of faces of each dimension in a mask set, for reports.
pub fn face_counts(apt: &Apartment) -> Vec<usize> {
    apt.reps.iter().map(|l| l.len()).collect()
}

/// All masks of faces of `C̄` contained in the closure of `mask`.
pub fn subfaces(weyl: &WeylGroup, mask: Mask) -> Vec<Mask> {
    (mask..weyl.full_mask()).filter(|m| m & mask == mask).collect()
}

/// Masks of the vertices `v_i` of `C̄`.
pub fn vertex_masks(weyl: &WeylGroup) -> Vec<Mask> {
    (0..weyl.num_affine()).map(|i| weyl.full_mask() & !(1 << i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{CartanType, Isogeny};

    fn group(t: CartanType, iso: Isogeny) -> WeylGroup {
        WeylGroup::new(RootDatum::new(t, iso).unwrap())
    }

    const ALL: [CartanType; 4] = [CartanType::A1, CartanType::A2, CartanType::B2, CartanType::G2];
    const ISOS: [Isogeny; 3] = [Isogeny::SimplyConnected, Isogeny::Adjoint, Isogeny::GlStyle(1)];

    #[test]
    fn face_representative_counts() {
        let counts = |t, iso| face_counts(&Apartment::new(&group(t, iso), false));
        assert_eq!(counts(CartanType::A1, Isogeny::SimplyConnected), vec![2, 1]);
        assert_eq!(counts(CartanType::A1, Isogeny::Adjoint), vec![1, 1]);
        assert_eq!(counts(CartanType::A2, Isogeny::SimplyConnected), vec![3, 3, 1]);
        assert_eq!(counts(CartanType::A2, Isogeny::Adjoint), vec![1, 1, 1]);
    }

    #[test]
    fn rank_one_boundaries() {
        let w = group(CartanType::A1, Isogeny::SimplyConnected);
        let apt = Apartment::new(&w, false);
        let signs: Vec<(usize, usize, i8)> = apt.boundary[1][0].iter().map(|e| (e.face, e.omega, e.sign)).collect();
        // each vertex carries the orientation induced from C
        assert_eq!(signs, vec![(0, 0, 1), (1, 0, 1)]);
        assert_eq!(apt.reps[0][0].sign + apt.reps[0][1].sign, 0);
        let w = group(CartanType::A1, Isogeny::Adjoint);
        let apt = Apartment::new(&w, false);
        let b = &apt.boundary[1][0];
        assert_eq!(b.len(), 2);
        assert_ne!(b[0].omega, b[1].omega);
        // one vertex class reached with and without omega, opposite signs
        assert_eq!(b[0].sign * b[1].sign, -1);
        assert_eq!(apt.orientation_character(&w, 0, 1), Ok(-1));
    }

    #[test]
    fn boundary_squares_to_zero() {
        for t in ALL {
            for iso in ISOS {
                let w = group(t, iso);
                for flipped in [false, true] {
                    let apt = Apartment::new(&w, flipped);
                    for i in 0..=apt.rank {
                        for k in 0..apt.reps[i].len() {
                            assert!(apt.boundary_squared(&w, i, k).is_empty(), "{t} {iso:?} {i} {k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn orientation_character_matches_determinant() {
        // oracle: sign of det of the linear part on the direction space
        for t in ALL {
            for iso in [Isogeny::Adjoint, Isogeny::SimplyConnected] {
                let w = group(t, iso);
                let rd = &w.rd;
                let coords = vertex_coordinates(rd);
                let apt = Apartment::new(&w, false);
                for level in &apt.reps {
                    for rep in level {
                        for &k in &rep.stabilizer {
                            let eps = apt.orientation_character(&w, rep.mask, k).unwrap();
                            if rep.dim == 0 {
                                assert_eq!(eps, 1);
                                continue;
                            }
                            let om = w.omega_fin[k];
                            let base = &coords[rep.vertices[0]];
                            let dirs: Vec<Vec<BigRational>> = rep.vertices[1..]
                                .iter()
                                .map(|v| coords[*v].iter().zip(base).map(|(a, b)| a - b).collect())
                                .collect();
                            let m = &w.w0.mats[om.fin as usize];
                            let images: Vec<Vec<BigRational>> = dirs
                                .iter()
                                .map(|v| {
                                    (0..rd.lattice_rank)
                                        .map(|i| {
                                            (0..rd.lattice_rank)
                                                .map(|j| BigRational::from_integer(BigInt::from(m[i][j])) * v[j].clone())
                                                .sum()
                                        })
                                        .collect()
                                })
                                .collect();
                            let det = coordinates_det(&dirs, &images);
                            assert_eq!(eps as i32, if det > BigRational::zero() { 1 } else { -1 });
                        }
                    }
                }
            }
        }
    }

    /// det of the matrix expressing `images` in the basis `dirs`.
    fn coordinates_det(dirs: &[Vec<BigRational>], images: &[Vec<BigRational>]) -> BigRational {
        let k = dirs.len();
        let n = dirs[0].len();
        // least-squares-free: pick k coordinates where dirs are independent
        let mut cols = Vec::new();
        for c in 0..n {
            let mut trial = cols.clone();
            trial.push(c);
            let sub: Vec<Vec<BigRational>> = dirs.iter().map(|v| trial.iter().map(|&t| v[t].clone()).collect()).collect();
            if rank_q(&sub) == trial.len() {
                cols = trial;
            }
            if cols.len() == k {
                break;
            }
        }
        let pick = |vs: &[Vec<BigRational>]| -> Vec<Vec<BigRational>> {
            vs.iter().map(|v| cols.iter().map(|&t| v[t].clone()).collect()).collect()
        };
        det_q(pick(images)) / det_q(pick(dirs))
    }

    fn rank_q(rows: &[Vec<BigRational>]) -> usize {
        let mut m = rows.to_vec();
        let mut r = 0;
        let ncols = m.first().map_or(0, |x| x.len());
        for c in 0..ncols {
            if let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) {
                m.swap(r, p);
                for i in 0..m.len() {
                    if i != r && !m[i][c].is_zero() {
                        let f = m[i][c].clone() / m[r][c].clone();
                        for j in 0..ncols {
                            let v = m[r][j].clone() * f.clone();
                            m[i][j] -= v;
                        }
                    }
                }
                r += 1;
            }
        }
        r
    }

    fn det_q(mut m: Vec<Vec<BigRational>>) -> BigRational {
        let n = m.len();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return BigRational::zero() };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            det *= m[c][c].clone();
            for i in c + 1..n {
                let f = m[i][c].clone() / m[c][c].clone();
                for j in c..n {
                    let v = m[c][j].clone() * f.clone();
                    m[i][j] -= v;
                }
            }
        }
        det
    }

    #[test]
    fn vertices_are_zeros_of_affine_simple_roots() {
        for t in ALL {
            let w = group(t, Isogeny::Adjoint);
            let coords = vertex_coordinates(&w.rd);
            for (i, v) in coords.iter().enumerate() {
                for (j, a) in w.aff.iter().enumerate() {
                    let val: BigRational = (0..w.rd.lattice_rank)
                        .map(|t| BigRational::from_integer(BigInt::from(w.rd.roots[a.root].weight[t])) * v[t].clone())
                        .sum::<BigRational>()
                        + BigRational::from_integer(BigInt::from(a.level));
                    assert_eq!(val.is_zero(), i != j, "{t} vertex {i} root {j}");
                }
            }
        }
    }

    #[test]
    fn closest_chamber_and_distances() {
        let w = group(CartanType::A1, Isogeny::SimplyConnected);
        let apt = Apartment::new(&w, false);
        let c = Facet { mask: 0, position: WeylElt::IDENTITY };
        assert_eq!(apt.gallery_distance(&w, &c, &c), Ok(0));
        for j in 0..2 {
            let sc = Facet { mask: 0, position: w.simple(j) };
            assert_eq!(apt.gallery_distance(&w, &c, &sc), Ok(1));
        }
        let two = Facet { mask: 0, position: w.mul(&w.simple(0), &w.simple(1)) };
        assert_eq!(apt.gallery_distance(&w, &c, &two), Ok(2));
        assert!(apt.gallery_distance(&w, &Facet { mask: 1, position: WeylElt::IDENTITY }, &c).is_err());
        // vertex x_1 (mask {0}) moved by s_(-alpha,1)
        let s1 = w.simple(1);
        let f = Facet { mask: 0b01, position: s1 };
        let (ch, dist) = apt.closest_chamber(&w, &f).unwrap();
        assert_eq!(ch.position, s1);
        assert_eq!(dist, 1);
        for mask in 0..w.full_mask() {
            let (ch, _) = apt.closest_chamber(&w, &Facet { mask, position: WeylElt::IDENTITY }).unwrap();
            assert_eq!(ch.position, WeylElt::IDENTITY);
        }
    }

    #[test]
    fn layers_are_disjoint() {
        for (t, n) in [(CartanType::A1, 4), (CartanType::A2, 4), (CartanType::B2, 3)] {
            assert_eq!(check_disjoint_layers(&group(t, Isogeny::SimplyConnected), n), Ok(()));
        }
    }
}
