//! The finite Weyl group `W_0` as an explicit table.

use std::collections::HashMap;

use crate::rootdata::{Lat, RootDatum, MAX_LATTICE_RANK};

/// Integer matrix acting on `X_*` (column `j` is the image of `e_j`).
pub type LatMat = [[i32; MAX_LATTICE_RANK]; MAX_LATTICE_RANK];

#[derive(Clone, Debug)]
pub struct FiniteWeyl {
    /// Root permutation of each element.
    pub perms: Vec<Vec<usize>>,
    /// Action on `X_*`.
    pub mats: Vec<LatMat>,
    /// A reduced word in the simple reflections.
    pub words: Vec<Vec<usize>>,
    pub table: Vec<Vec<u8>>,
    pub inverse: Vec<u8>,
    /// Index of `s_i`.
    pub simple: Vec<u8>,
}

pub fn mat_apply(m: &LatMat, v: &Lat) -> Lat {
    let mut out = [0; MAX_LATTICE_RANK];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..MAX_LATTICE_RANK).map(|j| m[i][j] * v[j]).sum();
    }
    out
}

fn mat_mul(a: &LatMat, b: &LatMat) -> LatMat {
    let mut out = [[0; MAX_LATTICE_RANK]; MAX_LATTICE_RANK];
    for i in 0..MAX_LATTICE_RANK {
        for j in 0..MAX_LATTICE_RANK {
            out[i][j] = (0..MAX_LATTICE_RANK).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

impl FiniteWeyl {
    pub fn new(rd: &RootDatum) -> Self {
        let n = rd.lattice_rank;
        let nroots = rd.num_roots();
        let mut identity = [[0; MAX_LATTICE_RANK]; MAX_LATTICE_RANK];
        for (i, row) in identity.iter_mut().enumerate() {
            row[i] = 1;
        }
        let simple_mats: Vec<LatMat> = (0..rd.rank)
            .map(|i| {
                // s_i(e_j) = e_j - <e_j, alpha_i> coroot_i
                let mut m = identity;
                for j in 0..n {
                    let p = rd.roots[i].weight[j];
                    for t in 0..n {
                        m[t][j] -= p * rd.roots[i].coroot[t];
                    }
                }
                m
            })
            .collect();
        let simple_perms: Vec<Vec<usize>> =
            (0..rd.rank).map(|i| (0..nroots).map(|k| rd.reflect_root(i, k)).collect()).collect();

        let mut perms = vec![(0..nroots).collect::<Vec<_>>()];
        let mut mats = vec![identity];
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(perms[0].clone(), 0);
        let mut k = 0;
        while k < perms.len() {
            for i in 0..rd.rank {
                let p: Vec<usize> = perms[k].iter().map(|&r| simple_perms[i][r]).collect();
                if !index.contains_key(&p) {
                    index.insert(p.clone(), perms.len());
                    mats.push(mat_mul(&simple_mats[i], &mats[k]));
                    let mut w = vec![i];
                    w.extend(&words[k]);
                    words.push(w);
                    perms.push(p);
                }
            }
            k += 1;
        }
        let size = perms.len();
        let table: Vec<Vec<u8>> = (0..size)
            .map(|a| {
                (0..size)
                    .map(|b| {
                        let p: Vec<usize> = perms[b].iter().map(|&r| perms[a][r]).collect();
                        index[&p] as u8
                    })
                    .collect()
            })
            .collect();
        let inverse = (0..size).map(|a| (0..size).find(|&b| table[a][b] == 0).unwrap() as u8).collect();
        let simple = (0..rd.rank).map(|i| index[&simple_perms[i]] as u8).collect();
        FiniteWeyl { perms, mats, words, table, inverse, simple }
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.table[a as usize][b as usize]
    }

    pub fn inv(&self, a: u8) -> u8 {
        self.inverse[a as usize]
    }

    pub fn act_lattice(&self, a: u8, v: &Lat) -> Lat {
        mat_apply(&self.mats[a as usize], v)
    }

    pub fn act_root(&self, a: u8, k: usize) -> usize {
        self.perms[a as usize][k]
    }

    /// Number of positive roots sent to negative roots.
    pub fn length(&self, a: u8, rd: &RootDatum) -> usize {
        (0..rd.num_positive).filter(|&k| !rd.is_positive(self.act_root(a, k))).count()
    }

    /// Finite-Weyl element whose root permutation sends root `from` to a
    /// given root, e.g. the reflection `s_k`.
    pub fn reflection(&self, rd: &RootDatum, k: usize) -> u8 {
        let target: Vec<usize> = (0..rd.num_roots()).map(|j| rd.reflect_root(k, j)).collect();
        self.perms.iter().position(|p| *p == target).expect("reflection in W_0") as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{CartanType, Isogeny};

    #[test]
    fn orders_and_longest_element() {
        for (t, order) in [(CartanType::A1, 2), (CartanType::A2, 6), (CartanType::B2, 8), (CartanType::G2, 12)] {
            for iso in [Isogeny::SimplyConnected, Isogeny::Adjoint, Isogeny::GlStyle(1)] {
                let rd = RootDatum::new(t, iso).unwrap();
                let w = FiniteWeyl::new(&rd);
                assert_eq!(w.order(), order);
                let longest = (0..order as u8).map(|a| w.length(a, &rd)).max().unwrap();
                assert_eq!(longest, rd.num_positive);
                for a in 0..order as u8 {
                    assert_eq!(w.words[a as usize].len(), w.length(a, &rd));
                    // the lattice action is compatible with the root permutation
                    for k in 0..rd.num_roots() {
                        let img = w.act_root(a, k);
                        assert_eq!(w.act_lattice(a, &rd.roots[k].coroot), rd.roots[img].coroot);
                    }
                }
            }
        }
    }
}
