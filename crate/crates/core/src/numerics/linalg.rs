//! Exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::EmptyMatrix);
        };
        let cols = first.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
        }
        let nrows = rows.len();
        Ok(Self {
            rows: nrows,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds the matrix whose columns are the given vectors, each of length `nrows`.
    pub fn from_columns(columns: &[Vec<Rational>], nrows: usize) -> Result<Self> {
        for (j, col) in columns.iter().enumerate() {
            if col.len() != nrows {
                return Err(Error::Shape {
                    row: j,
                    expected: nrows,
                    found: col.len(),
                });
            }
        }
        let cols = columns.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for i in 0..nrows {
            for col in columns {
                data.push(col[i].clone());
            }
        }
        Ok(Self {
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Exact rank by fraction-free (Bareiss) elimination.
    ///
    /// Each row is first cleared of denominators, which scales it by a
    /// nonzero integer and leaves the rank unchanged. Every intermediate
    /// entry is then a minor of the integer matrix, so the divisions by the
    /// previous pivot are exact.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows).map(|i| integer_row(self.row(i))).collect();
        let (m, n) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let (upper, lower) = a.split_at_mut(r + 1);
            let pivot_row = &upper[r];
            for row in lower.iter_mut() {
                for j in c + 1..n {
                    let num = &pivot_row[c] * &row[j] - &row[c] * &pivot_row[j];
                    debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                    row[j] = num / &prev;
                }
                row[c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            r += 1;
        }
        r
    }

    /// First nullspace basis vector in elimination order, or `None` when the
    /// columns are linearly independent.
    ///
    /// The first free column of the reduced row echelon form gets coefficient
    /// one; pivot variables are solved from it exactly.
    pub fn nullspace_vector(&self) -> Option<Vec<Rational>> {
        let (m, n) = (self.rows, self.cols);
        let mut a: Vec<Vec<Rational>> = (0..m).map(|i| self.row(i).to_vec()).collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut free = None;
        let mut r = 0;
        for c in 0..n {
            let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
                free.get_or_insert(c);
                continue;
            };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..m {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    let pivot_row = a[r][c..n].to_vec();
                    for (x, y) in a[i][c..n].iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free = free?;
        let mut v = vec![Rational::zero(); n];
        v[free] = Rational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            if pc < free {
                v[pc] = -a[row][free].clone();
            }
        }
        Some(v)
    }
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

pub fn rational_rank(rows: &[Vec<Rational>]) -> Result<usize> {
    Ok(RationalMatrix::from_rows(rows.to_vec())?.rank())
}

pub fn rational_nullspace_vector(rows: &[Vec<Rational>]) -> Result<Option<Vec<Rational>>> {
    Ok(RationalMatrix::from_rows(rows.to_vec())?.nullspace_vector())
}
