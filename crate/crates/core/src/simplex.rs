//! Signed simplices over a point set, their gaps, and the predicates
//! defined on them.
//!
//! A simplex `[x_j(m_j); y_i(n_i)]` is two nonempty weighted lists of
//! (not necessarily distinct) points with equal weight sums. Points are
//! referenced by index into a shared [`FunctionSet`]; distinctness is
//! always decided by exact equality of the point values, never by index.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::{powered_distance_matrix, AtomicMeasure, DistanceMatrix, FunctionSet, ValueClass};
use crate::numerics::rational::{self, format_rational, to_f64, Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub point: usize,
    pub weight: Rational,
}

impl Vertex {
    pub fn new(point: usize, weight: Rational) -> Self {
        Self { point, weight }
    }
}

#[derive(Clone, Debug)]
pub struct Simplex {
    points: Arc<FunctionSet>,
    left: Vec<Vertex>,
    right: Vec<Vertex>,
}

/// Aggregated weights of one distinct point on each side.
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatedPoint {
    pub value: Vec<Rational>,
    /// Index of the first vertex point carrying this value.
    pub representative: usize,
    pub m: Rational,
    pub n: Rational,
}

/// The repeating numbers `m(z), n(z)` for every distinct point `z` of a
/// simplex, in order of first appearance (left side first).
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatingNumbers {
    pub points: Vec<RepeatedPoint>,
}

impl RepeatingNumbers {
    pub fn get(&self, value: &[Rational]) -> Option<&RepeatedPoint> {
        self.points.iter().find(|p| p.value == value)
    }
}

impl Simplex {
    pub fn new(points: Arc<FunctionSet>, left: Vec<Vertex>, right: Vec<Vertex>) -> Result<Self> {
        if left.is_empty() {
            return Err(Error::EmptySide("left"));
        }
        if right.is_empty() {
            return Err(Error::EmptySide("right"));
        }
        for v in left.iter().chain(&right) {
            if v.point >= points.len() {
                return Err(Error::PointIndex {
                    index: v.point,
                    len: points.len(),
                });
            }
        }
        let sum_left: Rational = left.iter().map(|v| &v.weight).sum();
        let sum_right: Rational = right.iter().map(|v| &v.weight).sum();
        if sum_left != sum_right {
            return Err(Error::UnequalSums {
                left: format_rational(&sum_left),
                right: format_rational(&sum_right),
            });
        }
        Ok(Self { points, left, right })
    }

    pub fn points(&self) -> &Arc<FunctionSet> {
        &self.points
    }

    pub fn left(&self) -> &[Vertex] {
        &self.left
    }

    pub fn right(&self) -> &[Vertex] {
        &self.right
    }

    /// Common weight sum of both sides.
    pub fn total_weight(&self) -> Rational {
        self.left.iter().map(|v| &v.weight).sum()
    }

    /// The simplex with its two halves exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            points: Arc::clone(&self.points),
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// Every weight multiplied by `c`.
    pub fn scaled(&self, c: &Rational) -> Self {
        let scale = |side: &[Vertex]| {
            side.iter()
                .map(|v| Vertex::new(v.point, &v.weight * c))
                .collect()
        };
        Self {
            points: Arc::clone(&self.points),
            left: scale(&self.left),
            right: scale(&self.right),
        }
    }

    pub fn repeating_numbers(&self) -> RepeatingNumbers {
        let mut index: BTreeMap<&[Rational], usize> = BTreeMap::new();
        let mut points: Vec<RepeatedPoint> = Vec::new();
        let sides = self
            .left
            .iter()
            .map(|v| (v, true))
            .chain(self.right.iter().map(|v| (v, false)));
        for (v, is_left) in sides {
            let value = self.points.point(v.point);
            let k = *index.entry(value).or_insert_with(|| {
                points.push(RepeatedPoint {
                    value: value.to_vec(),
                    representative: v.point,
                    m: Rational::zero(),
                    n: Rational::zero(),
                });
                points.len() - 1
            });
            if is_left {
                points[k].m += &v.weight;
            } else {
                points[k].n += &v.weight;
            }
        }
        RepeatingNumbers { points }
    }

    /// `m(z) = n(z)` for every distinct point `z`.
    pub fn is_degenerate(&self) -> bool {
        self.repeating_numbers().points.iter().all(|p| p.m == p.n)
    }

    /// `Σ m_j x_j − Σ n_i y_i`, one entry per atom.
    pub fn weighted_difference(&self) -> Vec<Rational> {
        let mut acc = vec![Rational::zero(); self.points.atoms()];
        for v in &self.left {
            for (a, x) in acc.iter_mut().zip(self.points.point(v.point)) {
                *a += &v.weight * x;
            }
        }
        for v in &self.right {
            for (a, y) in acc.iter_mut().zip(self.points.point(v.point)) {
                *a -= &v.weight * y;
            }
        }
        acc
    }

    /// Both halves have the same weighted vector sum.
    pub fn is_balanced(&self) -> bool {
        self.weighted_difference().iter().all(Zero::is_zero)
    }

    /// Non-degenerate, yet degenerate at every single atom.
    ///
    /// The evaluation simplex at atom `k` has the scalar points `x_j(k)`,
    /// `y_i(k)` with the original weights. Atoms carry positive mass, so
    /// "almost everywhere" means at every atom.
    pub fn is_virtually_degenerate(&self) -> bool {
        if self.is_degenerate() {
            return false;
        }
        (0..self.points.atoms()).all(|k| {
            let mut totals: BTreeMap<&Rational, Rational> = BTreeMap::new();
            for v in &self.left {
                *totals.entry(&self.points.point(v.point)[k]).or_insert_with(Rational::zero) += &v.weight;
            }
            for v in &self.right {
                *totals.entry(&self.points.point(v.point)[k]).or_insert_with(Rational::zero) -= &v.weight;
            }
            totals.values().all(Zero::is_zero)
        })
    }

    /// Vertices of both sides as a signed weight vector over distinct
    /// points: `ζ(z) = m(z) − n(z)`, keyed by representative point index.
    pub fn signed_weights(&self) -> Vec<(usize, Rational)> {
        self.repeating_numbers()
            .points
            .into_iter()
            .map(|p| (p.representative, p.m - p.n))
            .collect()
    }
}

fn check_distances(d: &Simplex, p: f64, distances: &DistanceMatrix) -> Result<()> {
    if distances.p().value() != p {
        return Err(Error::Consistency(format!(
            "distances were built at p = {}, gap requested at p = {p}",
            distances.p()
        )));
    }
    if distances.labels() != d.points.labels() {
        return Err(Error::Consistency(
            "distance matrix was built from a different point set".into(),
        ));
    }
    Ok(())
}

/// The p-simplex gap
/// `Σ m_j n_i d(x_j,y_i)^p − Σ_{j<j'} m_j m_j' d(x_j,x_j')^p − Σ_{i<i'} n_i n_i' d(y_i,y_i')^p`.
///
/// Exact when the distances are.
pub fn simplex_gap(d: &Simplex, p: f64, distances: &DistanceMatrix) -> Result<Scalar> {
    check_distances(d, p, distances)?;
    Ok(gap_with_magnitude(d, distances).0)
}

/// The gap together with the sum of absolute values of its terms, which
/// bounds the rounding error on the floating path.
pub(crate) fn gap_with_magnitude(d: &Simplex, distances: &DistanceMatrix) -> (Scalar, f64) {
    let (l, r) = (&d.left, &d.right);
    if distances.is_exact() {
        let dist = |a: usize, b: usize| distances.exact(a, b).expect("exact matrix");
        let mut gap = Rational::zero();
        let mut mag = Rational::zero();
        let mut add = |term: Rational, sign: bool| {
            mag += term.abs();
            if sign {
                gap += term;
            } else {
                gap -= term;
            }
        };
        for x in l {
            for y in r {
                add(&x.weight * &y.weight * dist(x.point, y.point), true);
            }
        }
        for side in [l, r] {
            for (a, u) in side.iter().enumerate() {
                for w in &side[a + 1..] {
                    add(&u.weight * &w.weight * dist(u.point, w.point), false);
                }
            }
        }
        (Scalar::Exact(gap), to_f64(&mag))
    } else {
        let wf = |v: &Vertex| to_f64(&v.weight);
        let mut gap = 0.0;
        let mut mag = 0.0;
        for x in l {
            for y in r {
                let t = wf(x) * wf(y) * distances.get_f64(x.point, y.point);
                gap += t;
                mag += t.abs();
            }
        }
        for side in [l, r] {
            for (a, u) in side.iter().enumerate() {
                for w in &side[a + 1..] {
                    let t = wf(u) * wf(w) * distances.get_f64(u.point, w.point);
                    gap -= t;
                    mag += t.abs();
                }
            }
        }
        (Scalar::Float(gap), mag)
    }
}

/// A `(2,2)`-simplex on the points `0` and `1` of the real line, weighted
/// by the repeating numbers of the simplex it was compressed from.
#[derive(Clone, Debug)]
pub struct CompressedSimplex {
    pub simplex: Simplex,
}

impl CompressedSimplex {
    /// `m*(0), m*(1)`
    pub fn left_weights(&self) -> (&Rational, &Rational) {
        (&self.simplex.left[0].weight, &self.simplex.left[1].weight)
    }

    /// `n*(0), n*(1)`
    pub fn right_weights(&self) -> (&Rational, &Rational) {
        (&self.simplex.right[0].weight, &self.simplex.right[1].weight)
    }

    /// `w · (m*(1) − n*(1))²`, with `w` the weight of the single atom.
    pub fn closed_form_gap(&self) -> Rational {
        let w = &self.simplex.points.measure().weights()[0];
        let diff = self.left_weights().1 - self.right_weights().1;
        w * &diff * &diff
    }
}

/// Collapses a `{0,1}`-valued simplex on a single atom onto the two
/// points `0` and `1`.
pub fn compress_two_valued(d: &Simplex) -> Result<CompressedSimplex> {
    let set = &d.points;
    if set.atoms() != 1 || *set.value_class() != ValueClass::TwoValued {
        return Err(Error::ValueClass {
            expected: "single-atom two-valued".into(),
            found: format!("{} over {} atoms", set.value_class(), set.atoms()),
        });
    }
    let zero = Rational::zero();
    let mut m = [Rational::zero(), Rational::zero()];
    let mut n = [Rational::zero(), Rational::zero()];
    for v in &d.left {
        m[usize::from(set.point(v.point)[0] != zero)] += &v.weight;
    }
    for v in &d.right {
        n[usize::from(set.point(v.point)[0] != zero)] += &v.weight;
    }
    let line = FunctionSet::new(
        AtomicMeasure::new(set.measure().weights().to_vec())?,
        vec!["0".into(), "1".into()],
        vec![vec![rational::integer(0)], vec![rational::integer(1)]],
    )?;
    let [m0, m1] = m;
    let [n0, n1] = n;
    let simplex = Simplex::new(
        Arc::new(line),
        vec![Vertex::new(0, m0), Vertex::new(1, m1)],
        vec![Vertex::new(0, n0), Vertex::new(1, n1)],
    )?;
    Ok(CompressedSimplex { simplex })
}

/// Both sides of the identity `γ_p(D) = ‖Σ m_j x_j − Σ n_i y_i‖₂²` for a
/// `{0,1}`-valued simplex, computed independently and exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactGapIdentity {
    pub gap: Rational,
    pub l2: Rational,
    pub equal: bool,
}

/// `‖v‖₂² = Σ_k w_k v_k²` under the atom weights.
pub fn weighted_l2_squared(measure: &AtomicMeasure, v: &[Rational]) -> Rational {
    measure
        .weights()
        .iter()
        .zip(v)
        .fold(Rational::zero(), |acc, (w, x)| acc + w * x * x)
}

pub fn two_valued_gap_identity(d: &Simplex, p: f64) -> Result<ExactGapIdentity> {
    if *d.points.value_class() != ValueClass::TwoValued {
        return Err(Error::ValueClass {
            expected: "two-valued".into(),
            found: d.points.value_class().to_string(),
        });
    }
    let distances = powered_distance_matrix(&d.points, p)?;
    let gap = match simplex_gap(d, p, &distances)? {
        Scalar::Exact(g) => g,
        Scalar::Float(_) => unreachable!("two-valued distances are exact"),
    };
    let l2 = weighted_l2_squared(d.points.measure(), &d.weighted_difference());
    let equal = gap == l2;
    Ok(ExactGapIdentity { gap, l2, equal })
}

/// Both sides of `γ_p(D) = |β|^{p−2} ‖Σ m_j x_j − Σ n_i y_i‖₂²` for a
/// `{0, β}`-valued simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct GapIdentity {
    pub gap: Scalar,
    pub scaled_l2: Scalar,
    pub equal: bool,
}

/// Relative tolerance for the floating comparison in [`alpha_beta_gap_identity`].
pub const IDENTITY_REL_TOL: f64 = 1e-10;

pub fn alpha_beta_gap_identity(d: &Simplex, p: f64) -> Result<GapIdentity> {
    let beta = match d.points.value_class() {
        ValueClass::TwoValued => rational::integer(1),
        ValueClass::AlphaBeta { alpha, beta } if alpha.is_zero() => beta.clone(),
        other => {
            return Err(Error::ValueClass {
                expected: "{0, beta}-valued".into(),
                found: other.to_string(),
            })
        }
    };
    let distances = powered_distance_matrix(&d.points, p)?;
    check_distances(d, p, &distances)?;
    let (gap, magnitude) = gap_with_magnitude(d, &distances);
    let l2 = weighted_l2_squared(d.points.measure(), &d.weighted_difference());
    let abs_beta = beta.abs();

    let exponent = distances.p().as_integer().map(|k| k - 2);
    let factor = if rational::is_one(&abs_beta) {
        Some(rational::integer(1))
    } else {
        exponent.map(|e| rational::pow(&abs_beta, e).expect("beta is nonzero"))
    };

    let scaled_l2 = match &factor {
        Some(f) => Scalar::Exact(f * &l2),
        None => Scalar::Float(to_f64(&abs_beta).powf(p - 2.0) * to_f64(&l2)),
    };
    let equal = match (&gap, &scaled_l2) {
        (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
        (a, b) => {
            let (a, b) = (a.to_f64(), b.to_f64());
            (a - b).abs() <= IDENTITY_REL_TOL * magnitude.max(a.abs()).max(b.abs())
        }
    };
    Ok(GapIdentity {
        gap,
        scaled_l2,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::integer;

    fn set(rows: &[&[i64]]) -> Arc<FunctionSet> {
        let values = rows
            .iter()
            .map(|r| r.iter().map(|&x| integer(x)).collect())
            .collect();
        Arc::new(
            FunctionSet::with_default_labels(AtomicMeasure::counting(rows[0].len()).unwrap(), values)
                .unwrap(),
        )
    }

    fn v(point: usize, weight: i64) -> Vertex {
        Vertex::new(point, integer(weight))
    }

    fn square() -> Arc<FunctionSet> {
        // (0,0) (1,0) (0,1) (1,1)
        set(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
    }

    #[test]
    fn rejects_unequal_sums_and_empty_sides() {
        let s = square();
        let err = Simplex::new(s.clone(), vec![v(0, 1)], vec![v(1, 2)]).unwrap_err();
        assert!(err.to_string().contains("left sums to 1, right sums to 2"));
        assert!(matches!(
            Simplex::new(s.clone(), vec![], vec![v(1, 0)]),
            Err(Error::EmptySide("left"))
        ));
        assert!(matches!(
            Simplex::new(s, vec![v(9, 1)], vec![v(1, 1)]),
            Err(Error::PointIndex { index: 9, .. })
        ));
    }

    #[test]
    fn repeating_numbers_aggregate_by_value() {
        let s = set(&[&[0], &[0], &[1]]);
        // points 0 and 1 carry the same value
        let d = Simplex::new(s, vec![v(0, 1), v(1, 2)], vec![v(2, 3)]).unwrap();
        let rn = d.repeating_numbers();
        let z = rn.get(&[integer(0)]).unwrap();
        assert_eq!((z.m.clone(), z.n.clone()), (integer(3), integer(0)));
        assert_eq!(rn.points.len(), 2);
    }

    #[test]
    fn point_on_both_sides() {
        let s = set(&[&[0], &[1]]);
        let d = Simplex::new(s, vec![v(0, 1), v(1, 1)], vec![v(0, 1), v(1, 1)]).unwrap();
        let rn = d.repeating_numbers();
        assert_eq!(rn.get(&[integer(0)]).unwrap().m, integer(1));
        assert_eq!(rn.get(&[integer(0)]).unwrap().n, integer(1));
        assert!(d.is_degenerate());
    }

    #[test]
    fn degeneracy() {
        let s = square();
        assert!(Simplex::new(s.clone(), vec![v(2, 1)], vec![v(2, 1)]).unwrap().is_degenerate());
        assert!(!Simplex::new(s, vec![v(0, 1)], vec![v(3, 1)]).unwrap().is_degenerate());
    }

    #[test]
    fn balanced_square() {
        let d = Simplex::new(square(), vec![v(0, 1), v(3, 1)], vec![v(1, 1), v(2, 1)]).unwrap();
        assert!(d.is_balanced());
        assert!(!d.is_degenerate());
        assert!(d.is_virtually_degenerate());
        let identity = two_valued_gap_identity(&d, 2.5).unwrap();
        assert_eq!(identity, ExactGapIdentity {
            gap: integer(0),
            l2: integer(0),
            equal: true
        });
    }

    #[test]
    fn unbalanced_pair() {
        let d = Simplex::new(square(), vec![v(0, 1)], vec![v(3, 1)]).unwrap();
        assert!(!d.is_balanced());
        assert!(!d.is_virtually_degenerate());
        let dist = powered_distance_matrix(d.points(), 0.7).unwrap();
        assert_eq!(simplex_gap(&d, 0.7, &dist).unwrap(), Scalar::Exact(integer(2)));
        let identity = two_valued_gap_identity(&d, 0.7).unwrap();
        assert_eq!((identity.gap, identity.l2, identity.equal), (integer(2), integer(2), true));
    }

    #[test]
    fn two_against_one() {
        // [(1,0)(1), (0,1)(1); (0,0)(2)]
        let d = Simplex::new(square(), vec![v(1, 1), v(2, 1)], vec![v(0, 2)]).unwrap();
        for p in [0.5, 1.0, 3.0] {
            let dist = powered_distance_matrix(d.points(), p).unwrap();
            assert_eq!(simplex_gap(&d, p, &dist).unwrap(), Scalar::Exact(integer(2)));
        }
    }

    #[test]
    fn degenerate_gap_is_zero() {
        let s = set(&[&[0, 3], &[1, 7], &[2, 2]]);
        let d = Simplex::new(s, vec![v(0, 2), v(1, -1), v(2, 5)], vec![v(2, 5), v(0, 2), v(1, -1)]).unwrap();
        assert!(d.is_degenerate());
        let dist = powered_distance_matrix(d.points(), 1.3).unwrap();
        assert!(simplex_gap(&d, 1.3, &dist).unwrap().to_f64().abs() < 1e-12);
        assert!(d.is_balanced());
        assert!(!d.is_virtually_degenerate());
    }

    #[test]
    fn gap_consistency_errors() {
        let d = Simplex::new(square(), vec![v(0, 1)], vec![v(3, 1)]).unwrap();
        let dist = powered_distance_matrix(d.points(), 1.0).unwrap();
        assert!(matches!(simplex_gap(&d, 2.0, &dist), Err(Error::Consistency(_))));
        let other = powered_distance_matrix(&set(&[&[0], &[1], &[0], &[1]]), 1.0).unwrap();
        let relabelled = other.permuted(&[1, 0, 2, 3]);
        assert!(matches!(simplex_gap(&d, 1.0, &relabelled), Err(Error::Consistency(_))));
    }

    #[test]
    fn compression() {
        let s = set(&[&[0], &[1], &[1], &[0]]);
        let d = Simplex::new(
            s,
            vec![v(0, 3), v(1, -2), v(2, 4)],
            vec![v(3, 1), v(1, 4)],
        )
        .unwrap();
        let c = compress_two_valued(&d).unwrap();
        assert_eq!(c.left_weights(), (&integer(3), &integer(2)));
        assert_eq!(c.right_weights(), (&integer(1), &integer(4)));
        assert_eq!(c.closed_form_gap(), integer(4));
        let g = two_valued_gap_identity(&d, 1.7).unwrap().gap;
        let dist = powered_distance_matrix(c.simplex.points(), 1.0).unwrap();
        assert_eq!(simplex_gap(&c.simplex, 1.0, &dist).unwrap(), Scalar::Exact(g));
        // compressing again changes nothing
        let again = compress_two_valued(&c.simplex).unwrap();
        assert_eq!(again.left_weights(), c.left_weights());
        assert_eq!(again.right_weights(), c.right_weights());
    }

    #[test]
    fn compression_rejects_wrong_class() {
        let d = Simplex::new(square(), vec![v(0, 1)], vec![v(3, 1)]).unwrap();
        assert!(matches!(compress_two_valued(&d), Err(Error::ValueClass { .. })));
        let line = set(&[&[0], &[2]]);
        let d = Simplex::new(line, vec![v(0, 1)], vec![v(1, 1)]).unwrap();
        assert!(matches!(compress_two_valued(&d), Err(Error::ValueClass { .. })));
    }

    #[test]
    fn alpha_beta_identity() {
        // {0,2}-valued; x and y differ on one unit atom
        let s = set(&[&[0, 2], &[2, 2]]);
        let d = Simplex::new(s, vec![v(0, 1)], vec![v(1, 1)]).unwrap();
        let at3 = alpha_beta_gap_identity(&d, 3.0).unwrap();
        assert_eq!(at3.gap, Scalar::Exact(integer(8)));
        assert_eq!(at3.scaled_l2, Scalar::Exact(integer(8)));
        assert!(at3.equal);
        let at2 = alpha_beta_gap_identity(&d, 2.0).unwrap();
        assert_eq!(at2.gap, Scalar::Exact(integer(4)));
        assert!(at2.equal);
        let frac = alpha_beta_gap_identity(&d, 1.5).unwrap();
        assert!(!frac.gap.is_exact());
        assert!(frac.equal);
        assert!((frac.gap.to_f64() - 2f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn alpha_beta_requires_zero_alpha() {
        let s = set(&[&[1, -1], &[1, 1]]);
        let d = Simplex::new(s, vec![v(0, 1)], vec![v(1, 1)]).unwrap();
        assert!(matches!(alpha_beta_gap_identity(&d, 1.0), Err(Error::ValueClass { .. })));
        // two-valued sets are {0, 1}-valued
        let d = Simplex::new(square(), vec![v(0, 1)], vec![v(3, 1)]).unwrap();
        let id = alpha_beta_gap_identity(&d, 0.4).unwrap();
        assert_eq!(id.gap, Scalar::Exact(integer(2)));
        assert!(id.equal);
    }

    #[test]
    fn swap_and_scale() {
        let s = set(&[&[0, 1], &[3, 1], &[2, 5]]);
        let d = Simplex::new(s, vec![v(0, 2), v(1, 1)], vec![v(2, 3)]).unwrap();
        let dist = powered_distance_matrix(d.points(), 3.0).unwrap();
        let g = simplex_gap(&d, 3.0, &dist).unwrap();
        assert_eq!(simplex_gap(&d.swapped(), 3.0, &dist).unwrap(), g);
        let c = crate::numerics::rational(-3, 2);
        let scaled = simplex_gap(&d.scaled(&c), 3.0, &dist).unwrap();
        assert_eq!(scaled, Scalar::Exact(g.as_exact().unwrap() * &c * &c));
    }
}
