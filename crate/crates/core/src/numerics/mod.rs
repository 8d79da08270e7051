//! Exact rational arithmetic, rational elimination, and a symmetric
//! eigensolver for the floating-point side.

pub mod eigen;
pub mod linalg;
pub mod rational;

pub use eigen::{symmetric_eigen, symmetric_eigenvalues, Eigen, SymmetricMatrix};
pub use linalg::{rational_nullspace_vector, rational_rank, RationalMatrix};
pub use rational::{format_rational, integer, parse_rational, rational, Rational, Scalar};
