//! Negative type, simplex gaps and generalized roundness for finite
//! subsets of `L_p` spaces over atomic measures.
//!
//! Point sets are functions on finitely many weighted atoms with exact
//! rational values. From them the crate builds powered distance matrices,
//! evaluates simplex gaps exactly where possible, decides affine
//! independence with rational elimination, certifies (strict) p-negative
//! type through the spectrum of the zero-sum quadratic form, and brackets
//! generalized roundness by bisection.

pub mod affine;
pub mod error;
pub mod generators;
pub mod io;
pub mod measure;
pub mod negtype;
pub mod numerics;
pub mod simplex;

pub use affine::{affine_independence, AffineCertificate, AffineVerdict};
pub use error::{Error, Result};
pub use measure::{powered_distance_matrix, AtomicMeasure, DistanceMatrix, Exponent, FunctionSet, ValueClass};
pub use negtype::{
    gap_sampler_crosscheck, generalized_roundness, negative_type_check, CheckOptions, NegTypeVerdict,
    RoundnessOptions, RoundnessResult, RoundnessSource,
};
pub use numerics::{Rational, Scalar};
pub use simplex::{simplex_gap, Simplex, Vertex};
