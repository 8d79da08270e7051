//! Symmetric eigenvalue problems by cyclic Jacobi rotations.

use crate::error::{Error, Result};

/// Square symmetric matrix of finite floats, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    /// Rejects non-square, non-finite or (bitwise) asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
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
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
            entries.extend_from_slice(row);
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::Asymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { order: n, entries })
    }

    /// Builds `f(i, j)` for `i <= j` and mirrors it.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut entries = vec![0.0; order * order];
        for i in 0..order {
            for j in i..order {
                let x = f(i, j);
                if !x.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                entries[i * order + j] = x;
                entries[j * order + i] = x;
            }
        }
        Ok(Self { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `Pᵀ M P` for the permutation sending index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.order;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Self { order: n, entries }
    }
}

/// Eigenvalues in ascending order with matching unit eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition by the cyclic Jacobi method.
///
/// Sweeps over all off-diagonal pairs, annihilating each with a plane
/// rotation, until the off-diagonal mass is negligible against the norm.
pub fn symmetric_eigen(matrix: &SymmetricMatrix) -> Result<Eigen> {
    let n = matrix.order;
    let mut a = matrix.entries.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = matrix.frobenius_norm();
    let mut converged = n < 2 || scale == 0.0;

    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        // one last look: the final sweep may have finished the job
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].abs())
            .sum();
        if off > 1e-12 * scale {
            return Err(Error::NotConverged { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    Ok(Eigen { values, vectors })
}

/// All eigenvalues, ascending.
pub fn symmetric_eigenvalues(matrix: &SymmetricMatrix) -> Result<Vec<f64>> {
    Ok(symmetric_eigen(matrix)?.values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[&[f64]]) -> SymmetricMatrix {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        SymmetricMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn diagonal() {
        let m = sym(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]);
        assert_eq!(symmetric_eigenvalues(&m).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn swap_matrix() {
        let m = sym(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let ev = symmetric_eigenvalues(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15);
        assert!((ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(Error::Asymmetric { .. })
        ));
        assert!(matches!(
            SymmetricMatrix::from_rows(&[vec![f64::NAN]]),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            SymmetricMatrix::from_rows(&[vec![0.0, 1.0]]),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn one_by_one_and_zero() {
        let m = sym(&[&[-2.5]]);
        assert_eq!(symmetric_eigenvalues(&m).unwrap(), vec![-2.5]);
        let z = sym(&[&[0.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(symmetric_eigenvalues(&z).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn residuals_are_small() {
        let m = sym(&[
            &[4.0, 1.0, -2.0, 2.0],
            &[1.0, 2.0, 0.0, 1.0],
            &[-2.0, 0.0, 3.0, -2.0],
            &[2.0, 1.0, -2.0, -1.0],
        ]);
        let e = symmetric_eigen(&m).unwrap();
        let norm = m.frobenius_norm();
        for (lambda, v) in e.values.iter().zip(&e.vectors) {
            let mv = m.mul_vec(v);
            let r: f64 = mv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r <= 1e-10 * (1.0 + norm), "residual {r}");
        }
    }
}
