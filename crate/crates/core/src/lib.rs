//! Torsion in the cohomology of congruence subgroups of `SL(m, Z)` and
//! `GL(m, Z)`, computed with the sharbly complex, with Hecke eigenvalues and
//! matching against reducible mod-`p` Galois representations.

pub mod exactlinalg;
pub mod lattice;
pub mod retract;
pub mod sharbly;
pub mod congruence;
pub mod hecke;
pub mod galois;
pub mod pipeline;

pub use exactlinalg::{FiniteField, FpMatrix, IntMatrix, LinalgError, SNFResult};
