//! Exact computations with pro-p Iwahori-Hecke algebras and Iwahori-Hecke
//! algebras of split p-adic groups of small rank: affine Weyl combinatorics,
//! the algebras themselves, parahoric subalgebras, the Gorenstein resolution
//! and its dual, the graded ring, and finite-dimensional algebra tools.

pub mod field;
pub mod linalg;
pub mod rootdata;
pub mod weyl;
pub mod hecke;
pub mod apartment;
pub mod parahoric;
pub mod homology;
pub mod graded;
pub mod findim;
pub mod suites;
