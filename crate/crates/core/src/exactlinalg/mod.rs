//! Exact linear algebra: sparse integer matrices with Smith normal form,
//! finite fields, and simultaneous eigenvalues over them.

mod eigen;
mod field;
mod fpmatrix;
mod intmatrix;
mod poly;
mod snf;

pub use eigen::{simultaneous_eigenpackages, EigenDecomposition, EigenPackage, OutsideBound};
pub use field::{is_prime, FiniteField};
pub use fpmatrix::FpMatrix;
pub use intmatrix::IntMatrix;
pub use poly::Poly;
pub use snf::{
    elementary_divisors, elementary_divisors_with_budget, homology_summands,
    homology_summands_with_budget, p_rank, smith_normal_form, smith_normal_form_with_budget,
    SNFResult,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {left:?} against {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("composed boundary maps are nonzero ({nnz} nonzero entries)")]
    CompositionNonzero { nnz: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid extension degree {0}")]
    BadExtensionDegree(u32),
    #[error("field {p}^{e} does not fit the element encoding")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("operands live over incompatible fields")]
    FieldMismatch,
    #[error("matrices {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("{mats} matrices but {labels} labels")]
    LabelCount { mats: usize, labels: usize },
    #[error("subspace is not invariant")]
    NotInvariant,
    #[error("eigenvalues need an extension of degree {degree} on a {dimension}-dimensional block")]
    EigenvalueOutsideBound { degree: usize, dimension: usize },
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
