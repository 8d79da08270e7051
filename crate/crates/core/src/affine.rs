//! Affine independence of point sets, and the two-way bridge between
//! affine dependencies and non-degenerate balanced simplices.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::FunctionSet;
use crate::numerics::rational::{format_rational, Rational};
use crate::numerics::RationalMatrix;
use crate::simplex::{Simplex, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AffineVerdict {
    Independent,
    Dependent,
}

#[derive(Clone, Debug)]
pub struct AffineCertificate {
    pub verdict: AffineVerdict,
    /// Rank of the difference vectors `z_i − z_0`.
    pub rank: usize,
    /// `λ` with `Σ λ_i = 0` and `Σ λ_i z_i = 0`, one entry per point.
    pub dependency: Option<Vec<Rational>>,
    /// Non-degenerate balanced simplex built from `dependency`. Absent when
    /// the dependency only relates coinciding points.
    pub witness: Option<Simplex>,
}

impl AffineCertificate {
    pub fn is_independent(&self) -> bool {
        self.verdict == AffineVerdict::Independent
    }
}

/// Decides affine independence exactly and, when dependent, returns the
/// dependency together with a balanced witness simplex.
///
/// The dependency is the first nullspace vector of the matrix whose
/// columns are `z_1 − z_0, …, z_k − z_0`, extended by
/// `λ_0 = −(λ_1 + … + λ_k)`.
pub fn affine_independence(set: &Arc<FunctionSet>) -> Result<AffineCertificate> {
    let k = set.len();
    if k == 0 {
        return Err(Error::TooFewPoints { needed: 1, found: 0 });
    }
    if k == 1 {
        return Ok(AffineCertificate {
            verdict: AffineVerdict::Independent,
            rank: 0,
            dependency: None,
            witness: None,
        });
    }
    let base = set.point(0);
    let diffs: Vec<Vec<Rational>> = (1..k)
        .map(|i| set.point(i).iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let matrix = RationalMatrix::from_columns(&diffs, set.atoms())?;
    let rank = matrix.rank();
    if rank == k - 1 {
        return Ok(AffineCertificate {
            verdict: AffineVerdict::Independent,
            rank,
            dependency: None,
            witness: None,
        });
    }
    let coeffs = matrix
        .nullspace_vector()
        .expect("rank deficit implies a nullspace vector");
    let lambda0: Rational = -coeffs.iter().sum::<Rational>();
    let mut dependency = Vec::with_capacity(k);
    dependency.push(lambda0);
    dependency.extend(coeffs);
    let witness = balanced_simplex_from_dependency(set, &dependency).ok();
    Ok(AffineCertificate {
        verdict: AffineVerdict::Dependent,
        rank,
        dependency: Some(dependency),
        witness,
    })
}

/// Checks that `lambda` is an exact affine dependency of `set`.
pub fn verify_dependency(set: &FunctionSet, lambda: &[Rational]) -> Result<()> {
    if lambda.len() != set.len() {
        return Err(Error::Certificate(format!(
            "dependency has {} coefficients for {} points",
            lambda.len(),
            set.len()
        )));
    }
    if lambda.iter().all(Zero::is_zero) {
        return Err(Error::Certificate("dependency is the zero vector".into()));
    }
    let sum: Rational = lambda.iter().sum();
    if !sum.is_zero() {
        return Err(Error::Certificate(format!(
            "coefficients sum to {}, not 0",
            format_rational(&sum)
        )));
    }
    for k in 0..set.atoms() {
        let s = lambda
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, l)| acc + l * &set.point(i)[k]);
        if !s.is_zero() {
            return Err(Error::Certificate(format!(
                "weighted sum is {} at atom {k}, not 0",
                format_rational(&s)
            )));
        }
    }
    Ok(())
}

/// Points with positive coefficient go left with weight `λ_i`, points with
/// negative coefficient go right with weight `−λ_i`; zero coefficients are
/// dropped.
pub fn balanced_simplex_from_dependency(set: &Arc<FunctionSet>, lambda: &[Rational]) -> Result<Simplex> {
    verify_dependency(set, lambda)?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (i, l) in lambda.iter().enumerate() {
        if l.is_positive() {
            left.push(Vertex::new(i, l.clone()));
        } else if l.is_negative() {
            right.push(Vertex::new(i, -l.clone()));
        }
    }
    let simplex = Simplex::new(Arc::clone(set), left, right)?;
    if simplex.is_degenerate() {
        return Err(Error::Certificate(
            "dependency only relates coinciding points; the simplex it induces is degenerate".into(),
        ));
    }
    debug_assert!(simplex.is_balanced());
    Ok(simplex)
}

/// Recovers the dependency `λ(z) = m(z) − n(z)` over the distinct points of
/// a balanced non-degenerate simplex, keyed by representative point index.
pub fn dependency_from_balanced_simplex(d: &Simplex) -> Result<Vec<(usize, Rational)>> {
    if d.is_degenerate() {
        return Err(Error::Precondition("simplex is degenerate".into()));
    }
    if !d.is_balanced() {
        return Err(Error::Precondition("simplex is not balanced".into()));
    }
    Ok(d.signed_weights())
}

/// Spreads a sparse dependency over all `len` points.
pub fn dense_dependency(sparse: &[(usize, Rational)], len: usize) -> Vec<Rational> {
    let mut dense = vec![Rational::zero(); len];
    for (i, l) in sparse {
        dense[*i] += l;
    }
    dense
}
