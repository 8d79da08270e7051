//! Strategies shared by the property tests.
#![allow(dead_code)]

use std::sync::Arc;

use negtype::measure::{AtomicMeasure, FunctionSet};
use negtype::numerics::rational::{integer, rational, Rational};
use negtype::simplex::{Simplex, Vertex};
use proptest::prelude::*;

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=5).prop_map(|(n, d)| rational(n, d))
}

pub fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=6, 1i64..=4).prop_map(|(n, d)| rational(n, d))
}

pub fn rational_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    prop::collection::vec(prop::collection::vec(small_rational(), cols), rows)
}

pub fn measure(atoms: usize) -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec(positive_rational(), atoms).prop_map(|w| AtomicMeasure::new(w).unwrap())
}

/// `{0,1}`-valued points (duplicates allowed) over a random measure.
pub fn two_valued_set(max_points: usize, max_atoms: usize) -> impl Strategy<Value = Arc<FunctionSet>> {
    (2..=max_points, 1..=max_atoms).prop_flat_map(|(n, k)| {
        (
            measure(k),
            prop::collection::vec(prop::collection::vec(0i64..=1, k), n),
        )
            .prop_map(|(m, rows)| {
                let values = rows.into_iter().map(|r| r.into_iter().map(integer).collect()).collect();
                Arc::new(FunctionSet::with_default_labels(m, values).unwrap())
            })
    })
}

/// Integer-valued points in `[-3, 3]` over a random measure.
pub fn general_set(max_points: usize, max_atoms: usize) -> impl Strategy<Value = Arc<FunctionSet>> {
    (2..=max_points, 1..=max_atoms).prop_flat_map(|(n, k)| {
        (
            measure(k),
            prop::collection::vec(prop::collection::vec(-3i64..=3, k), n),
        )
            .prop_map(|(m, rows)| {
                let values = rows.into_iter().map(|r| r.into_iter().map(integer).collect()).collect();
                Arc::new(FunctionSet::with_default_labels(m, values).unwrap())
            })
    })
}

/// Random simplex; the last right weight absorbs the difference of sums.
pub fn simplex_over(set: Arc<FunctionSet>) -> impl Strategy<Value = Simplex> {
    let n = set.len();
    let side = || prop::collection::vec((0..n, -5i64..=5), 1..=4);
    (side(), side()).prop_map(move |(l, r)| {
        let left: Vec<Vertex> = l.into_iter().map(|(i, w)| Vertex::new(i, integer(w))).collect();
        let mut right: Vec<Vertex> = r.into_iter().map(|(i, w)| Vertex::new(i, integer(w))).collect();
        let diff: Rational = left.iter().map(|v| &v.weight).sum::<Rational>()
            - right.iter().map(|v| &v.weight).sum::<Rational>();
        right.last_mut().unwrap().weight += diff;
        Simplex::new(Arc::clone(&set), left, right).unwrap()
    })
}

pub fn two_valued_simplex() -> impl Strategy<Value = Simplex> {
    two_valued_set(6, 6).prop_flat_map(simplex_over)
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| integer(x)).collect()
}

pub fn set_of(rows: &[&[i64]]) -> Arc<FunctionSet> {
    let values = rows.iter().map(|r| ints(r)).collect();
    Arc::new(FunctionSet::with_default_labels(AtomicMeasure::counting(rows[0].len()).unwrap(), values).unwrap())
}
