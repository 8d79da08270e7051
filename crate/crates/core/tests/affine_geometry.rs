mod common;

use std::sync::Arc;

use common::{general_set, ints, set_of, small_rational, two_valued_set};
use negtype::affine::{
    affine_independence, balanced_simplex_from_dependency, dense_dependency, dependency_from_balanced_simplex,
    verify_dependency, AffineVerdict,
};
use negtype::generators::remark_z;
use negtype::measure::{powered_distance_matrix, FunctionSet};
use negtype::negtype::{negative_type_check, CheckOptions};
use negtype::numerics::rational::{integer, Rational};
use negtype::simplex::{simplex_gap, two_valued_gap_identity};
use num_traits::Zero;
use proptest::prelude::*;

/// Checks `Σ λ_i = 0` and `Σ λ_i z_i = 0` from the raw coordinates.
fn is_dependency(set: &FunctionSet, lambda: &[Rational]) -> bool {
    let sum: Rational = lambda.iter().sum();
    let combo_zero = (0..set.atoms()).all(|k| {
        lambda
            .iter()
            .zip(set.values())
            .map(|(l, z)| l * &z[k])
            .sum::<Rational>()
            .is_zero()
    });
    sum.is_zero() && combo_zero && lambda.iter().any(|l| !l.is_zero())
}

fn proportional(a: &[Rational], b: &[Rational]) -> bool {
    let Some(i) = a.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    if b[i].is_zero() {
        return false;
    }
    let c = &b[i] / &a[i];
    a.iter().zip(b).all(|(x, y)| x * &c == *y)
}

#[test]
fn examples() {
    assert!(affine_independence(&set_of(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap().is_independent());
    let cube = set_of(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
    let cert = affine_independence(&cube).unwrap();
    let lambda = cert.dependency.unwrap();
    assert!(is_dependency(&cube, &lambda));
    assert!(proportional(&lambda, &ints(&[1, -1, -1, 1])));
    let w = cert.witness.unwrap();
    assert!(w.is_balanced() && !w.is_degenerate());
    let back = dense_dependency(&dependency_from_balanced_simplex(&w).unwrap(), 4);
    assert!(proportional(&back, &ints(&[1, -1, -1, 1])));
    let z = Arc::new(remark_z());
    assert_eq!(affine_independence(&z).unwrap().verdict, AffineVerdict::Dependent);
    assert!(affine_independence(&set_of(&[&[7]])).unwrap().is_independent());
}

fn invertible_matrix(k: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    // unit lower times unit upper triangular, so the determinant is 1
    (
        prop::collection::vec(small_rational(), k * k),
        prop::collection::vec(small_rational(), k * k),
    )
        .prop_map(move |(l, u)| {
            let lower = |i: usize, j: usize| if i == j { integer(1) } else if j < i { l[i * k + j].clone() } else { integer(0) };
            let upper = |i: usize, j: usize| if i == j { integer(1) } else if j > i { u[i * k + j].clone() } else { integer(0) };
            (0..k)
                .map(|i| (0..k).map(|j| (0..k).map(|t| lower(i, t) * upper(t, j)).sum()).collect())
                .collect()
        })
}

fn transformed(set: &FunctionSet, a: &[Vec<Rational>], shift: &[Rational]) -> Arc<FunctionSet> {
    let values = set
        .values()
        .iter()
        .map(|z| {
            a.iter()
                .zip(shift)
                .map(|(row, s)| row.iter().zip(z).map(|(x, y)| x * y).sum::<Rational>() + s)
                .collect()
        })
        .collect();
    Arc::new(FunctionSet::new(set.measure().clone(), set.labels().to_vec(), values).unwrap())
}

proptest! {
    #[test]
    fn certificates_are_exact(set in general_set(6, 4)) {
        let cert = affine_independence(&set).unwrap();
        match cert.verdict {
            AffineVerdict::Independent => {
                prop_assert!(cert.dependency.is_none());
                prop_assert_eq!(cert.rank, set.len() - 1);
            }
            AffineVerdict::Dependent => {
                let lambda = cert.dependency.as_ref().unwrap();
                prop_assert!(is_dependency(&set, lambda));
                prop_assert!(verify_dependency(&set, lambda).is_ok());
                if let Some(w) = &cert.witness {
                    prop_assert!(w.is_balanced() && !w.is_degenerate());
                } else {
                    prop_assert!(set.duplicate_pair().is_some());
                }
            }
        }
        if set.len() > set.atoms() + 1 {
            prop_assert_eq!(cert.verdict, AffineVerdict::Dependent);
        }
    }

    #[test]
    fn round_trip_recovers_a_multiple(set in general_set(6, 3)) {
        let cert = affine_independence(&set).unwrap();
        if let (Some(lambda), Some(w)) = (cert.dependency, cert.witness) {
            let back = dense_dependency(&dependency_from_balanced_simplex(&w).unwrap(), set.len());
            prop_assert!(is_dependency(&set, &back));
            if set.duplicate_pair().is_none() {
                prop_assert!(proportional(&lambda, &back));
            }
            let again = balanced_simplex_from_dependency(&set, &back).unwrap();
            prop_assert!(again.is_balanced() && !again.is_degenerate());
        }
    }

    #[test]
    fn two_valued_witnesses_have_zero_gap(set in two_valued_set(6, 3)) {
        if let Some(w) = affine_independence(&set).unwrap().witness {
            for p in [1.0, 2.0, 3.0] {
                let m = powered_distance_matrix(&set, p).unwrap();
                prop_assert!(simplex_gap(&w, p, &m).unwrap().as_exact().unwrap().is_zero());
                let id = two_valued_gap_identity(&w, p).unwrap();
                prop_assert!(id.equal && id.gap.is_zero());
            }
        }
    }

    #[test]
    fn verdict_is_invariant(set in general_set(5, 3), a in invertible_matrix(3), shift in prop::collection::vec(small_rational(), 3), rot in 0usize..5) {
        prop_assume!(set.atoms() == 3);
        let base = affine_independence(&set).unwrap();
        let moved = transformed(&set, &a, &shift);
        prop_assert_eq!(affine_independence(&moved).unwrap().verdict, base.verdict);
        let mut order: Vec<usize> = (0..set.len()).collect();
        order.rotate_left(rot % set.len());
        order.reverse();
        let reordered = Arc::new(set.subset(&order).unwrap());
        prop_assert_eq!(affine_independence(&reordered).unwrap().verdict, base.verdict);
    }

    #[test]
    fn strictness_matches_independence_on_two_valued_sets(set in two_valued_set(6, 5)) {
        prop_assume!(set.duplicate_pair().is_none());
        let independent = affine_independence(&set).unwrap().is_independent();
        for p in [0.5, 1.0, 2.0, 3.0] {
            let v = negative_type_check(&powered_distance_matrix(&set, p).unwrap(), &CheckOptions::default()).unwrap();
            prop_assert!(v.holds);
            prop_assert_eq!(v.strict, independent);
            if v.strict {
                prop_assert!(set.len() <= set.atoms() + 1);
            }
        }
    }
}
