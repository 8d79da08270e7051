//! Negative type of finite powered distance matrices, generalized
//! roundness by bisection, and a sampling cross-check against simplex gaps.
//!
//! A matrix `M = (d(z_i, z_j)^p)` has p-negative type when `ζᵀ M ζ <= 0`
//! for every `ζ` with `Σ ζ_i = 0`, and strict p-negative type when the
//! inequality is strict for `ζ ≠ 0`. Both are decided from the spectrum of
//! `M` restricted to the zero-sum hyperplane.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine::affine_independence;
use crate::error::{Error, Result};
use crate::measure::{powered_distance_matrix, DistanceMatrix, FunctionSet};
use crate::numerics::rational::{integer, Rational, Scalar};
use crate::numerics::{symmetric_eigen, SymmetricMatrix};
use crate::simplex::{gap_with_magnitude, Simplex, Vertex};

pub const DEFAULT_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Reject coinciding points instead of reporting a boundary verdict.
    pub strict: bool,
    /// Verdict tolerance relative to `1 + max |M_ij|`.
    pub rel_tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            strict: false,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NegTypeVerdict {
    pub p: f64,
    pub holds: bool,
    pub strict: bool,
    pub tolerance: f64,
    pub min_reduced_eigenvalue: f64,
    pub max_reduced_eigenvalue: f64,
    /// Eigenvalues of `VᵀMV`, ascending.
    pub reduced_eigenvalues: Vec<f64>,
    /// Unit zero-sum `ζ` with `ζᵀMζ > 0`; present exactly when `holds` is false.
    pub extremal_vector: Option<Vec<f64>>,
    /// `ζᵀMζ` for the extremal vector.
    pub extremal_value: Option<f64>,
    /// Unit zero-sum `ζ` of the top reduced eigenvalue when the verdict
    /// holds but is not strict.
    pub boundary_vector: Option<Vec<f64>>,
}

/// Orthonormal basis of `{ζ : Σ ζ_i = 0}` in `R^n` (Helmert contrasts).
///
/// The `k`-th vector (`k = 1..n`) is `(1, …, 1, −k, 0, …, 0) / sqrt(k(k+1))`
/// with `k` leading ones.
pub fn helmert_basis(n: usize) -> Vec<Vec<f64>> {
    (1..n)
        .map(|k| {
            let s = ((k * (k + 1)) as f64).sqrt();
            (0..n)
                .map(|i| match i.cmp(&k) {
                    std::cmp::Ordering::Less => 1.0 / s,
                    std::cmp::Ordering::Equal => -(k as f64) / s,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect()
}

/// Decides (strict) negative type of a powered distance matrix.
pub fn negative_type_check(m: &DistanceMatrix, opts: &CheckOptions) -> Result<NegTypeVerdict> {
    let n = m.order();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: n });
    }
    if opts.strict {
        for i in 0..n {
            for j in i + 1..n {
                if m.get_f64(i, j) == 0.0 {
                    return Err(Error::DuplicatePoint {
                        first: m.labels()[i].clone(),
                        second: m.labels()[j].clone(),
                    });
                }
            }
        }
    }
    check_symmetric(&m.to_symmetric(), m.p().value(), opts.rel_tol)
}

pub(crate) fn check_symmetric(m: &SymmetricMatrix, p: f64, rel_tol: f64) -> Result<NegTypeVerdict> {
    let n = m.order();
    let basis = helmert_basis(n);
    let mv: Vec<Vec<f64>> = basis.iter().map(|v| m.mul_vec(v)).collect();
    let reduced = SymmetricMatrix::from_fn(n - 1, |a, b| {
        basis[a].iter().zip(&mv[b]).map(|(x, y)| x * y).sum()
    })?;
    let eigen = symmetric_eigen(&reduced)?;
    let tolerance = rel_tol * (1.0 + m.max_abs());
    let min = eigen.values[0];
    let max = *eigen.values.last().expect("n >= 2");
    let holds = max <= tolerance;
    let strict = max <= -tolerance;

    let lift = |u: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| basis.iter().zip(u).map(|(v, c)| v[i] * c).sum())
            .collect()
    };
    let top = eigen.vectors.last().expect("n >= 2");
    let (extremal_vector, extremal_value, boundary_vector) = if !holds {
        let zeta = lift(top);
        let value = m.quadratic_form(&zeta);
        (Some(zeta), Some(value), None)
    } else if !strict {
        (None, None, Some(lift(top)))
    } else {
        (None, None, None)
    };
    Ok(NegTypeVerdict {
        p,
        holds,
        strict,
        tolerance,
        min_reduced_eigenvalue: min,
        max_reduced_eigenvalue: max,
        reduced_eigenvalues: eigen.values,
        extremal_vector,
        extremal_value,
        boundary_vector,
    })
}

/// Where the metric for a roundness computation comes from. Roundness
/// probes many exponents `q`, so it needs the metric `d` itself, not a
/// single powered matrix `d^p`.
pub enum RoundnessSource<'a> {
    /// Points of an `L_r` space with its metric `d_r`.
    Coordinates { set: &'a FunctionSet, metric_p: f64 },
    /// An explicit (unpowered) distance matrix.
    Unpowered(&'a SymmetricMatrix),
    /// A powered matrix; usable only when every entry is 0 or 1.
    Powered(&'a DistanceMatrix),
}

#[derive(Clone, Copy, Debug)]
pub struct RoundnessOptions {
    /// Target bracket width.
    pub tolerance: f64,
    /// Largest exponent probed.
    pub cap: f64,
    /// Decision tolerance of each probe, relative to `1 + max |M_ij|`.
    pub rel_tol: f64,
    /// Smallest lower endpoint tried before giving up.
    pub floor: f64,
}

impl Default for RoundnessOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            cap: 64.0,
            rel_tol: DEFAULT_REL_TOL,
            floor: 1e-4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Probe {
    pub p: f64,
    pub holds: bool,
    pub max_reduced_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundnessResult {
    pub lower: f64,
    /// Infinite when the cap was exceeded.
    pub upper: f64,
    pub exceeded_cap: bool,
    pub cap: f64,
    /// Negative type failed at every probe down to the floor.
    pub below_floor: bool,
    pub trace: Vec<Probe>,
}

impl RoundnessResult {
    /// Along the trace, failure at `p` implies failure at every larger probe.
    pub fn is_monotone(&self) -> bool {
        self.trace.iter().all(|fail| {
            fail.holds
                || self
                    .trace
                    .iter()
                    .filter(|q| q.p > fail.p)
                    .all(|q| !q.holds)
        })
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Base matrix `b` and exponent `r` such that the distance at probe `q`
/// is `b^(q/r)`.
fn roundness_base(source: &RoundnessSource<'_>) -> Result<(SymmetricMatrix, f64)> {
    match source {
        RoundnessSource::Coordinates { set, metric_p } => {
            let dm = powered_distance_matrix(set, *metric_p)?;
            Ok((dm.to_symmetric(), *metric_p))
        }
        RoundnessSource::Unpowered(m) => {
            for i in 0..m.order() {
                if m.get(i, i) != 0.0 {
                    return Err(Error::NonZeroDiagonal(i));
                }
                for j in 0..m.order() {
                    if m.get(i, j) < 0.0 {
                        return Err(Error::NegativeDistance { row: i, col: j });
                    }
                }
            }
            Ok(((*m).clone(), 1.0))
        }
        RoundnessSource::Powered(dm) => {
            if dm.is_p_independent() {
                Ok((dm.to_symmetric(), 1.0))
            } else {
                Err(Error::CannotRepower)
            }
        }
    }
}

/// Brackets the generalized roundness: the supremum of exponents `q` at
/// which the metric has q-negative type.
///
/// The set of such `q` is an interval starting at 0, so bisection applies:
/// the lower end always holds and the upper end always fails. If negative
/// type still holds at the cap, the result is reported as exceeding it.
pub fn generalized_roundness(source: &RoundnessSource<'_>, opts: &RoundnessOptions) -> Result<RoundnessResult> {
    if opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(Error::NonPositiveParameter {
            name: "tolerance",
            value: opts.tolerance,
        });
    }
    if !opts.cap.is_finite() || opts.cap <= 0.0 {
        return Err(Error::NonPositiveParameter {
            name: "cap",
            value: opts.cap,
        });
    }
    let (base, r) = roundness_base(source)?;
    let n = base.order();
    if n < 2 || base.max_abs() == 0.0 {
        return Err(Error::TooFewPoints { needed: 2, found: if n < 2 { n } else { 1 } });
    }

    let mut trace = Vec::new();
    let mut probe = |q: f64| -> Result<bool> {
        let m = SymmetricMatrix::from_fn(n, |i, j| {
            let b = base.get(i, j);
            if b == 0.0 {
                0.0
            } else {
                b.powf(q / r)
            }
        })?;
        let v = check_symmetric(&m, q, opts.rel_tol)?;
        trace.push(Probe {
            p: q,
            holds: v.holds,
            max_reduced_eigenvalue: v.max_reduced_eigenvalue,
        });
        Ok(v.holds)
    };

    if probe(opts.cap)? {
        return Ok(RoundnessResult {
            lower: opts.cap,
            upper: f64::INFINITY,
            exceeded_cap: true,
            cap: opts.cap,
            below_floor: false,
            trace,
        });
    }
    let mut hi = opts.cap;
    let mut lo = if opts.cap > 1.0 { 1.0 } else { opts.cap / 2.0 };
    while !probe(lo)? {
        hi = lo;
        lo /= 2.0;
        if lo < opts.floor {
            return Ok(RoundnessResult {
                lower: 0.0,
                upper: hi,
                exceeded_cap: false,
                cap: opts.cap,
                below_floor: true,
                trace,
            });
        }
    }
    while hi - lo > opts.tolerance {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RoundnessResult {
        lower: lo,
        upper: hi,
        exceeded_cap: false,
        cap: opts.cap,
        below_floor: false,
        trace,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct SamplerConfig {
    pub trials: usize,
    pub seed: u64,
    pub rel_tol: f64,
    /// Largest number of vertices on either side.
    pub max_side: usize,
    /// Weights are integers in `[-max_weight, max_weight]`.
    pub max_weight: i64,
}

impl SamplerConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            rel_tol: DEFAULT_REL_TOL,
            max_side: 4,
            max_weight: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckReport {
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub holds: bool,
    pub strict: bool,
    pub max_reduced_eigenvalue: f64,
    pub degenerate_samples: usize,
    /// Sampled gaps below the tolerated floor although the verdict holds.
    pub nonnegativity_violations: usize,
    /// Non-degenerate sampled gaps `<= 0` although the verdict is strict.
    pub strictness_violations: usize,
    /// Smallest sampled gap.
    pub worst_gap: f64,
    /// Smallest gap over non-degenerate samples (including the witness).
    pub worst_nondegenerate_gap: Option<f64>,
    /// Gap of the balanced simplex built from an affine dependency, when
    /// the verdict is not strict and such a simplex exists.
    pub witness_gap: Option<Scalar>,
    /// Some non-degenerate simplex reached a gap within tolerance of zero.
    pub found_polygonal_equality: bool,
}

impl CrosscheckReport {
    pub fn consistent(&self) -> bool {
        self.nonnegativity_violations == 0 && self.strictness_violations == 0
    }
}

/// Random simplex with integer weights and equal side sums.
pub fn random_simplex(points: &Arc<FunctionSet>, rng: &mut impl Rng, max_side: usize, max_weight: i64) -> Simplex {
    let n = points.len();
    loop {
        let s = rng.random_range(1..=max_side);
        let t = rng.random_range(1..=max_side);
        let mut side = |k: usize| -> Vec<Vertex> {
            (0..k)
                .map(|_| {
                    Vertex::new(
                        rng.random_range(0..n),
                        integer(rng.random_range(-max_weight..=max_weight)),
                    )
                })
                .collect()
        };
        let left = side(s);
        let mut right = side(t);
        let diff: Rational = left.iter().map(|v| &v.weight).sum::<Rational>()
            - right.iter().map(|v| &v.weight).sum::<Rational>();
        let last = right.last_mut().expect("t >= 1");
        last.weight += diff;
        if last.weight <= integer(max_weight) && last.weight >= integer(-max_weight) {
            return Simplex::new(Arc::clone(points), left, right).expect("sums balanced by construction");
        }
    }
}

/// Samples random simplices and checks their gaps against the eigenvalue
/// verdict: nonnegative gaps when negative type holds, positive gaps on
/// non-degenerate simplices when it is strict. When the verdict is not
/// strict, the balanced simplex of an affine dependency is added.
pub fn gap_sampler_crosscheck(set: &Arc<FunctionSet>, p: f64, config: &SamplerConfig) -> Result<CrosscheckReport> {
    if config.trials == 0 {
        return Err(Error::NonPositiveParameter {
            name: "trials",
            value: 0.0,
        });
    }
    let distances = powered_distance_matrix(set, p)?;
    let verdict = negative_type_check(
        &distances,
        &CheckOptions {
            strict: false,
            rel_tol: config.rel_tol,
        },
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut report = CrosscheckReport {
        p,
        trials: config.trials,
        seed: config.seed,
        holds: verdict.holds,
        strict: verdict.strict,
        max_reduced_eigenvalue: verdict.max_reduced_eigenvalue,
        degenerate_samples: 0,
        nonnegativity_violations: 0,
        strictness_violations: 0,
        worst_gap: f64::INFINITY,
        worst_nondegenerate_gap: None,
        witness_gap: None,
        found_polygonal_equality: false,
    };

    let record = |report: &mut CrosscheckReport, d: &Simplex| -> Scalar {
        let (gap, magnitude) = gap_with_magnitude(d, &distances);
        let g = gap.to_f64();
        let zeta_norm2: f64 = d
            .signed_weights()
            .iter()
            .map(|(_, w)| crate::numerics::rational::to_f64(w).powi(2))
            .sum();
        // γ = −½ ζᵀMζ, so a verdict within `tolerance` allows γ >= −½·tol·‖ζ‖²
        let floor = 0.5 * verdict.tolerance * zeta_norm2 + 1e-12 * magnitude;
        report.worst_gap = report.worst_gap.min(g);
        if verdict.holds && g < -floor {
            report.nonnegativity_violations += 1;
        }
        if d.is_degenerate() {
            report.degenerate_samples += 1;
        } else {
            report.worst_nondegenerate_gap = Some(report.worst_nondegenerate_gap.map_or(g, |w| w.min(g)));
            let positive = match &gap {
                Scalar::Exact(r) => r > &Rational::from_integer(0.into()),
                Scalar::Float(x) => *x > 0.0,
            };
            if verdict.strict && !positive {
                report.strictness_violations += 1;
            }
            if gap.is_zero_within(floor) {
                report.found_polygonal_equality = true;
            }
        }
        gap
    };

    for _ in 0..config.trials {
        let d = random_simplex(set, &mut rng, config.max_side, config.max_weight);
        record(&mut report, &d);
    }

    if !verdict.strict {
        if let Some(witness) = affine_independence(set)?.witness {
            let gap = record(&mut report, &witness);
            report.witness_gap = Some(gap);
        }
    }
    Ok(report)
}
