//! Finite atomic measure spaces, point sets of functions over their atoms,
//! and the p-th powered `L_p` distance matrices they induce.
//!
//! A point is a function on the atoms, stored as one rational value per
//! atom. The powered distance between two points is
//! `d(x, y)^p = Σ_k w_k |x_k − y_k|^p`. Only powered distances are ever
//! stored, so no triangle inequality is assumed for `p < 1`.

use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::rational::{self, format_rational, small_integer, to_f64, Rational};
use crate::numerics::SymmetricMatrix;

/// Positive finite exponent `p`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 {
            Ok(Self(p))
        } else {
            Err(Error::Exponent(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The exponent as an integer when it is one (and small enough for
    /// exact powers).
    pub fn as_integer(self) -> Option<i32> {
        small_integer(self.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    weights: Vec<Rational>,
}

impl AtomicMeasure {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if let Some((index, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_positive()) {
            return Err(Error::NonPositiveWeight {
                index,
                weight: format_rational(w),
            });
        }
        Ok(Self { weights })
    }

    /// Every atom has weight one.
    pub fn counting(atoms: usize) -> Result<Self> {
        Self::new(vec![Rational::one(); atoms])
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn atoms(&self) -> usize {
        self.weights.len()
    }

    pub fn is_counting(&self) -> bool {
        self.weights.iter().all(One::is_one)
    }
}

/// Which values the functions of a set take.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueClass {
    General,
    /// Every value is 0 or 1.
    TwoValued,
    /// Exactly two distinct values occur, `alpha < beta`, and they are not
    /// a subset of `{0, 1}`.
    AlphaBeta { alpha: Rational, beta: Rational },
}

impl fmt::Display for ValueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueClass::General => write!(f, "general"),
            ValueClass::TwoValued => write!(f, "two-valued"),
            ValueClass::AlphaBeta { alpha, beta } => write!(f, "{{{alpha}, {beta}}}-valued"),
        }
    }
}

/// Classifies the values occurring anywhere in `values`.
pub fn classify_values(values: &[Vec<Rational>]) -> ValueClass {
    let zero = Rational::zero();
    let one = Rational::one();
    if values.iter().flatten().all(|v| *v == zero || *v == one) {
        return ValueClass::TwoValued;
    }
    let mut distinct: Vec<&Rational> = Vec::with_capacity(3);
    for v in values.iter().flatten() {
        if !distinct.contains(&v) {
            distinct.push(v);
            if distinct.len() > 2 {
                return ValueClass::General;
            }
        }
    }
    match distinct.as_slice() {
        [a, b] => {
            let (alpha, beta) = if a < b { (a, b) } else { (b, a) };
            ValueClass::AlphaBeta {
                alpha: (*alpha).clone(),
                beta: (*beta).clone(),
            }
        }
        _ => ValueClass::General,
    }
}

/// A finite family of labelled functions over an atomic measure.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionSet {
    measure: AtomicMeasure,
    labels: Vec<String>,
    values: Vec<Vec<Rational>>,
    class: ValueClass,
}

impl FunctionSet {
    pub fn new(measure: AtomicMeasure, labels: Vec<String>, values: Vec<Vec<Rational>>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::LabelCount {
                labels: labels.len(),
                order: values.len(),
            });
        }
        let mut seen = HashSet::new();
        for (label, row) in labels.iter().zip(&values) {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
            if row.len() != measure.atoms() {
                return Err(Error::RowLength {
                    label: label.clone(),
                    expected: measure.atoms(),
                    found: row.len(),
                });
            }
        }
        let class = classify_values(&values);
        Ok(Self {
            measure,
            labels,
            values,
            class,
        })
    }

    /// Points labelled `p0, p1, …`.
    pub fn with_default_labels(measure: AtomicMeasure, values: Vec<Vec<Rational>>) -> Result<Self> {
        let labels = (0..values.len()).map(|i| format!("p{i}")).collect();
        Self::new(measure, labels, values)
    }

    pub fn measure(&self) -> &AtomicMeasure {
        &self.measure
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn point(&self, index: usize) -> &[Rational] {
        &self.values[index]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn atoms(&self) -> usize {
        self.measure.atoms()
    }

    pub fn value_class(&self) -> &ValueClass {
        &self.class
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// First pair of points with identical values, if any.
    pub fn duplicate_pair(&self) -> Option<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| (i + 1..self.len()).map(move |j| (i, j)))
            .find(|&(i, j)| self.values[i] == self.values[j])
    }

    /// Subset keeping the points at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut labels = Vec::with_capacity(indices.len());
        let mut values = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::PointIndex {
                    index: i,
                    len: self.len(),
                });
            }
            labels.push(self.labels[i].clone());
            values.push(self.values[i].clone());
        }
        Self::new(self.measure.clone(), labels, values)
    }
}

/// Shifts an `{α, β}`-valued set to the `{0, β − α}`-valued set.
///
/// Pairwise differences are unchanged, so every powered distance is too.
/// A `{0, 1}`-valued set is returned as is.
pub fn translate_to_zero_beta(set: &FunctionSet) -> Result<FunctionSet> {
    let alpha = match set.value_class() {
        ValueClass::TwoValued => return Ok(set.clone()),
        ValueClass::AlphaBeta { alpha, .. } => alpha.clone(),
        other => {
            return Err(Error::ValueClass {
                expected: "{alpha, beta}-valued".into(),
                found: other.to_string(),
            })
        }
    };
    let values = set
        .values
        .iter()
        .map(|row| row.iter().map(|v| v - &alpha).collect())
        .collect();
    FunctionSet::new(set.measure.clone(), set.labels.clone(), values)
}

#[derive(Clone, Debug, PartialEq)]
pub enum DistanceEntries {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

/// Symmetric matrix of powered distances `d(z_i, z_j)^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    p: Exponent,
    labels: Vec<String>,
    entries: DistanceEntries,
}

impl DistanceMatrix {
    /// Validates and wraps floating entries (for example read from a file).
    pub fn from_float_rows(p: Exponent, labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if labels.len() != n {
            return Err(Error::LabelCount {
                labels: labels.len(),
                order: n,
            });
        }
        let sym = SymmetricMatrix::from_rows(rows)?;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = sym.get(i, j);
                if i == j && x != 0.0 {
                    return Err(Error::NonZeroDiagonal(i));
                }
                if x < 0.0 {
                    return Err(Error::NegativeDistance { row: i, col: j });
                }
                entries.push(x);
            }
        }
        Ok(Self {
            p,
            labels,
            entries: DistanceEntries::Float(entries),
        })
    }

    /// Validates and wraps exact entries.
    pub fn from_exact_rows(p: Exponent, labels: Vec<String>, rows: &[Vec<Rational>]) -> Result<Self> {
        let n = rows.len();
        if labels.len() != n {
            return Err(Error::LabelCount {
                labels: labels.len(),
                order: n,
            });
        }
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape {
                    row: i,
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, x) in row.iter().enumerate() {
                if i == j && !x.is_zero() {
                    return Err(Error::NonZeroDiagonal(i));
                }
                if x.is_negative() {
                    return Err(Error::NegativeDistance { row: i, col: j });
                }
                if j < i && rows[j][i] != *x {
                    return Err(Error::Asymmetric { row: i, col: j });
                }
                entries.push(x.clone());
            }
        }
        Ok(Self {
            p,
            labels,
            entries: DistanceEntries::Exact(entries),
        })
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &DistanceEntries {
        &self.entries
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.entries, DistanceEntries::Exact(_))
    }

    pub fn exact(&self, i: usize, j: usize) -> Option<&Rational> {
        match &self.entries {
            DistanceEntries::Exact(e) => Some(&e[i * self.order() + j]),
            DistanceEntries::Float(_) => None,
        }
    }

    pub fn get_f64(&self, i: usize, j: usize) -> f64 {
        let n = self.order();
        match &self.entries {
            DistanceEntries::Exact(e) => to_f64(&e[i * n + j]),
            DistanceEntries::Float(e) => e[i * n + j],
        }
    }

    pub fn max_entry(&self) -> f64 {
        let n = self.order();
        (0..n * n).fold(0.0, |m, k| m.max(self.get_f64(k / n, k % n)))
    }

    pub fn to_symmetric(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(self.order(), |i, j| self.get_f64(i, j))
            .expect("distance matrix entries are finite")
    }

    pub fn to_float_rows(&self) -> Vec<Vec<f64>> {
        let n = self.order();
        (0..n)
            .map(|i| (0..n).map(|j| self.get_f64(i, j)).collect())
            .collect()
    }

    /// True when every entry is 0 or 1, so the matrix is the same at every `p`.
    pub fn is_p_independent(&self) -> bool {
        let n = self.order();
        (0..n * n).all(|k| {
            let x = self.get_f64(k / n, k % n);
            x == 0.0 || x == 1.0
        })
    }

    /// The same matrix with rows and columns reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.order();
        let labels = perm.iter().map(|&i| self.labels[i].clone()).collect();
        let entries = match &self.entries {
            DistanceEntries::Exact(e) => DistanceEntries::Exact(
                (0..n * n)
                    .map(|k| e[perm[k / n] * n + perm[k % n]].clone())
                    .collect(),
            ),
            DistanceEntries::Float(e) => {
                DistanceEntries::Float((0..n * n).map(|k| e[perm[k / n] * n + perm[k % n]]).collect())
            }
        };
        Self {
            p: self.p,
            labels,
            entries,
        }
    }
}

/// `d(x, y)^p = Σ_k w_k |x_k − y_k|^p` for every pair of points.
///
/// Entries are exact rationals when `p` is an integer, when the set is
/// `{0,1}`-valued (every entry is then the measure of the symmetric
/// difference of supports, whatever `p` is), or when the set is
/// `{α, β}`-valued with `|β − α| = 1`. Otherwise they are floats.
pub fn powered_distance_matrix(set: &FunctionSet, p: f64) -> Result<DistanceMatrix> {
    let p = Exponent::new(p)?;
    let n = set.len();
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 1, found: 0 });
    }
    let weights = set.measure.weights();
    let pairs = || (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)));

    // mismatch mass: Σ w_k over atoms where the two points differ
    let mismatch = |i: usize, j: usize| -> Rational {
        weights
            .iter()
            .zip(set.point(i).iter().zip(set.point(j)))
            .filter(|(_, (a, b))| a != b)
            .fold(Rational::zero(), |acc, (w, _)| acc + w)
    };

    let exact_factor: Option<Option<Rational>> = match set.value_class() {
        ValueClass::TwoValued => Some(None),
        ValueClass::AlphaBeta { alpha, beta } => {
            let gap = beta - alpha;
            if rational::is_one(&gap) {
                Some(None)
            } else {
                p.as_integer()
                    .map(|k| Some(rational::pow(&gap, k).expect("gap is nonzero")))
            }
        }
        ValueClass::General => None,
    };

    if let Some(factor) = exact_factor {
        let mut e = vec![Rational::zero(); n * n];
        for (i, j) in pairs() {
            let mut d = mismatch(i, j);
            if let Some(f) = &factor {
                d *= f;
            }
            e[j * n + i] = d.clone();
            e[i * n + j] = d;
        }
        return Ok(DistanceMatrix {
            p,
            labels: set.labels.clone(),
            entries: DistanceEntries::Exact(e),
        });
    }

    if let Some(k) = p.as_integer() {
        let mut e = vec![Rational::zero(); n * n];
        for (i, j) in pairs() {
            let d = weights
                .iter()
                .zip(set.point(i).iter().zip(set.point(j)))
                .fold(Rational::zero(), |acc, (w, (a, b))| {
                    acc + w * rational::pow(&rational::abs(&(a - b)), k).expect("k >= 0")
                });
            e[j * n + i] = d.clone();
            e[i * n + j] = d;
        }
        return Ok(DistanceMatrix {
            p,
            labels: set.labels.clone(),
            entries: DistanceEntries::Exact(e),
        });
    }

    let wf: Vec<f64> = weights.iter().map(to_f64).collect();
    let mut e = vec![0.0; n * n];
    for (i, j) in pairs() {
        let d: f64 = wf
            .iter()
            .zip(set.point(i).iter().zip(set.point(j)))
            .map(|(w, (a, b))| {
                let diff = to_f64(&rational::abs(&(a - b)));
                if diff == 0.0 {
                    0.0
                } else {
                    w * diff.powf(p.value())
                }
            })
            .sum();
        e[j * n + i] = d;
        e[i * n + j] = d;
    }
    Ok(DistanceMatrix {
        p,
        labels: set.labels.clone(),
        entries: DistanceEntries::Float(e),
    })
}

impl Serialize for DistanceMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let n = self.order();
        let mut st = s.serialize_struct("DistanceMatrix", 4)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("labels", &self.labels)?;
        st.serialize_field("exact", &self.is_exact())?;
        match &self.entries {
            DistanceEntries::Exact(e) => {
                let rows: Vec<Vec<String>> = (0..n)
                    .map(|i| (0..n).map(|j| format_rational(&e[i * n + j])).collect())
                    .collect();
                st.serialize_field("entries", &rows)?;
            }
            DistanceEntries::Float(_) => st.serialize_field("entries", &self.to_float_rows())?,
        }
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{integer, rational};

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| integer(x)).collect())
            .collect()
    }

    fn counting_set(rows: &[&[i64]]) -> FunctionSet {
        let atoms = rows[0].len();
        FunctionSet::with_default_labels(AtomicMeasure::counting(atoms).unwrap(), ints(rows)).unwrap()
    }

    #[test]
    fn opposite_cube_corners() {
        let set = counting_set(&[&[0, 0], &[1, 1]]);
        for p in [0.3, 1.0, 2.0, 5.5] {
            let d = powered_distance_matrix(&set, p).unwrap();
            assert_eq!(d.exact(0, 1), Some(&integer(2)));
        }
    }

    #[test]
    fn identical_rows_have_zero_distance() {
        let set = counting_set(&[&[3, 5], &[3, 5], &[0, 1]]);
        let d = powered_distance_matrix(&set, 1.5).unwrap();
        assert_eq!(d.get_f64(0, 1), 0.0);
        assert_eq!(set.duplicate_pair(), Some((0, 1)));
    }

    #[test]
    fn cubed_distance_in_the_plane() {
        let set = counting_set(&[&[0, 0], &[2, 1]]);
        let d = powered_distance_matrix(&set, 3.0).unwrap();
        assert_eq!(d.exact(0, 1), Some(&integer(9)));
    }

    #[test]
    fn fractional_p_on_general_set_is_float() {
        let set = counting_set(&[&[0], &[2]]);
        let d = powered_distance_matrix(&set, 0.5).unwrap();
        assert!(!d.is_exact());
        assert!((d.get_f64(0, 1) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_exponent() {
        let set = counting_set(&[&[0], &[1]]);
        assert!(matches!(powered_distance_matrix(&set, 0.0), Err(Error::Exponent(_))));
        assert!(matches!(powered_distance_matrix(&set, -1.0), Err(Error::Exponent(_))));
        assert!(matches!(powered_distance_matrix(&set, f64::NAN), Err(Error::Exponent(_))));
    }

    #[test]
    fn classification() {
        assert_eq!(classify_values(&ints(&[&[0, 1], &[1, 1]])), ValueClass::TwoValued);
        assert_eq!(
            classify_values(&ints(&[&[1, -1], &[-1, -1]])),
            ValueClass::AlphaBeta {
                alpha: integer(-1),
                beta: integer(1)
            }
        );
        assert_eq!(
            classify_values(&ints(&[&[0, 0], &[1, 1], &[2, 1], &[2, 0]])),
            ValueClass::General
        );
        assert_eq!(classify_values(&ints(&[&[5, 5]])), ValueClass::General);
    }

    #[test]
    fn translation() {
        let walsh = counting_set(&[&[1, 1], &[1, -1]]);
        let shifted = translate_to_zero_beta(&walsh).unwrap();
        assert_eq!(shifted.values(), ints(&[&[2, 2], &[2, 0]]).as_slice());
        assert_eq!(
            shifted.value_class(),
            &ValueClass::AlphaBeta {
                alpha: integer(0),
                beta: integer(2)
            }
        );
        let cube = counting_set(&[&[0, 1], &[1, 0]]);
        assert_eq!(translate_to_zero_beta(&cube).unwrap(), cube);
        let general = counting_set(&[&[0], &[1], &[2]]);
        assert!(matches!(translate_to_zero_beta(&general), Err(Error::ValueClass { .. })));
    }

    #[test]
    fn set_validation() {
        let m = AtomicMeasure::counting(2).unwrap();
        assert!(matches!(
            FunctionSet::new(m.clone(), vec!["a".into(), "a".into()], ints(&[&[0, 0], &[1, 1]])),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            FunctionSet::new(m, vec!["a".into()], ints(&[&[0, 0, 1]])),
            Err(Error::RowLength { .. })
        ));
        assert!(matches!(
            AtomicMeasure::new(vec![rational(1, 2), integer(0)]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(AtomicMeasure::new(vec![]), Err(Error::EmptyMeasure)));
    }

    #[test]
    fn float_matrix_validation() {
        let p = Exponent::new(1.0).unwrap();
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(DistanceMatrix::from_float_rows(p, labels.clone(), &[vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
        assert!(matches!(
            DistanceMatrix::from_float_rows(p, labels.clone(), &[vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(Error::Asymmetric { .. })
        ));
        assert!(matches!(
            DistanceMatrix::from_float_rows(p, labels.clone(), &[vec![0.0, -1.0], vec![-1.0, 0.0]]),
            Err(Error::NegativeDistance { .. })
        ));
        assert!(matches!(
            DistanceMatrix::from_float_rows(p, labels, &[vec![1.0, 1.0], vec![1.0, 0.0]]),
            Err(Error::NonZeroDiagonal(0))
        ));
    }

    #[test]
    fn weighted_alpha_beta_distances() {
        let m = AtomicMeasure::new(vec![rational(1, 2), rational(1, 4)]).unwrap();
        let set = FunctionSet::with_default_labels(m, ints(&[&[3, 7], &[7, 7]])).unwrap();
        // exact at integer p: (1/2) * 4^2
        let d2 = powered_distance_matrix(&set, 2.0).unwrap();
        assert_eq!(d2.exact(0, 1), Some(&integer(8)));
        // float at fractional p: (1/2) * 4^0.5
        let dh = powered_distance_matrix(&set, 0.5).unwrap();
        assert!(!dh.is_exact());
        assert!((dh.get_f64(0, 1) - 1.0).abs() < 1e-15);
    }
}
