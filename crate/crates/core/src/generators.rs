//! Deterministic constructors for the point-set families used as fixtures:
//! Hamming cubes and their subsets, finite Walsh systems, the small
//! planar and linear examples, and uniform (ultrametric) spaces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, DistanceMatrix, Exponent, FunctionSet};
use crate::numerics::rational::{integer, rational, Rational};

pub const MAX_CUBE_DIMENSION: u32 = 16;
pub const MAX_WALSH_ORDER: u32 = 8;

fn check_range(name: &'static str, value: i64, lo: i64, hi: i64, range: &'static str) -> Result<()> {
    if value < lo || value > hi {
        return Err(Error::OutOfRange { name, value, range });
    }
    Ok(())
}

fn bits(index: usize, n: u32) -> Vec<Rational> {
    (0..n)
        .rev()
        .map(|b| integer(((index >> b) & 1) as i64))
        .collect()
}

fn bit_label(index: usize, n: u32) -> String {
    (0..n)
        .rev()
        .map(|b| if (index >> b) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Cube vertices with the given indices; vertex `i` has the binary digits
/// of `i` (most significant first) as coordinates.
pub fn cube_vertices(n: u32, indices: &[usize]) -> Result<FunctionSet> {
    check_range("n", n as i64, 1, MAX_CUBE_DIMENSION as i64, "1..=16")?;
    if let Some(&bad) = indices.iter().find(|&&i| i >> n != 0) {
        return Err(Error::PointIndex {
            index: bad,
            len: 1 << n,
        });
    }
    let labels = indices.iter().map(|&i| bit_label(i, n)).collect();
    let values = indices.iter().map(|&i| bits(i, n)).collect();
    FunctionSet::new(AtomicMeasure::counting(n as usize)?, labels, values)
}

/// All `2^n` vertices of `{0,1}^n` in lexicographic order, counting measure.
pub fn hamming_cube(n: u32) -> Result<FunctionSet> {
    check_range("n", n as i64, 1, MAX_CUBE_DIMENSION as i64, "1..=16")?;
    let all: Vec<usize> = (0..1usize << n).collect();
    cube_vertices(n, &all)
}

/// 64-bit linear congruential generator (Knuth's MMIX constants); the
/// output is the high 31 bits of the state.
#[derive(Clone, Debug)]
pub struct Lcg(u64);

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0 = self.0.wrapping_mul(Self::MULTIPLIER).wrapping_add(Self::INCREMENT);
        (self.0 >> 33) as u32
    }

    /// Uniform-ish integer in `0..bound` by reduction modulo `bound`.
    pub fn below(&mut self, bound: usize) -> usize {
        self.next_u32() as usize % bound
    }
}

/// `size` distinct cube vertices chosen by a partial Fisher-Yates shuffle
/// driven by [`Lcg`], returned in lexicographic order.
pub fn cube_subset(n: u32, size: usize, seed: u64) -> Result<FunctionSet> {
    check_range("n", n as i64, 1, MAX_CUBE_DIMENSION as i64, "1..=16")?;
    let total = 1usize << n;
    if size == 0 || size > total {
        return Err(Error::OutOfRange {
            name: "size",
            value: size as i64,
            range: "1..=2^n",
        });
    }
    let mut rng = Lcg::new(seed);
    let mut pool: Vec<usize> = (0..total).collect();
    for i in 0..size {
        let j = i + rng.below(total - i);
        pool.swap(i, j);
    }
    let mut chosen = pool[..size].to_vec();
    chosen.sort_unstable();
    cube_vertices(n, &chosen)
}

/// The first `2^m` Walsh functions in Hadamard (Sylvester) order,
/// sampled on the `2^m` dyadic intervals of `[0,1]`, each of measure
/// `2^-m`. Row `a` at atom `k` is `(-1)^popcount(a & k)`.
pub fn walsh_system(m: u32) -> Result<FunctionSet> {
    check_range("m", m as i64, 0, MAX_WALSH_ORDER as i64, "0..=8")?;
    let size = 1usize << m;
    let measure = AtomicMeasure::new(vec![rational(1, size as i64); size])?;
    let labels = (0..size).map(|a| format!("w{a}")).collect();
    let values = (0..size)
        .map(|a| {
            (0..size)
                .map(|k| integer(if (a & k).count_ones() % 2 == 0 { 1 } else { -1 }))
                .collect()
        })
        .collect();
    FunctionSet::new(measure, labels, values)
}

#[derive(Clone, Debug)]
pub struct RemarkExamples {
    /// `(0,0), (1,1), (2,1), (2,0)` under counting measure on two atoms.
    pub z: FunctionSet,
    /// `0, 1, 2` on a single atom.
    pub midpoint: FunctionSet,
    /// `x = (0,0)`, `y = (2,0)` and their midpoint `(1,0)`.
    pub midpoint_triple: FunctionSet,
}

fn planar(labels: &[&str], points: &[[i64; 2]]) -> FunctionSet {
    FunctionSet::new(
        AtomicMeasure::counting(2).expect("two atoms"),
        labels.iter().map(|s| s.to_string()).collect(),
        points.iter().map(|p| p.iter().map(|&x| integer(x)).collect()).collect(),
    )
    .expect("valid fixture")
}

pub fn remark_z() -> FunctionSet {
    planar(&["z0", "z1", "z2", "z3"], &[[0, 0], [1, 1], [2, 1], [2, 0]])
}

pub fn midpoint_line() -> FunctionSet {
    FunctionSet::new(
        AtomicMeasure::counting(1).expect("one atom"),
        vec!["0".into(), "1".into(), "2".into()],
        vec![vec![integer(0)], vec![integer(1)], vec![integer(2)]],
    )
    .expect("valid fixture")
}

pub fn midpoint_triple() -> FunctionSet {
    planar(&["x", "y", "mid"], &[[0, 0], [2, 0], [1, 0]])
}

pub fn remark_examples() -> RemarkExamples {
    RemarkExamples {
        z: remark_z(),
        midpoint: midpoint_line(),
        midpoint_triple: midpoint_triple(),
    }
}

/// `k` points at mutual powered distance exactly 1 for every `p`.
pub fn uniform_space(k: usize) -> Result<DistanceMatrix> {
    if k < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: k });
    }
    let rows: Vec<Vec<Rational>> = (0..k)
        .map(|i| (0..k).map(|j| integer((i != j) as i64)).collect())
        .collect();
    let labels = (0..k).map(|i| format!("u{i}")).collect();
    DistanceMatrix::from_exact_rows(Exponent::new(1.0)?, labels, &rows)
}

/// Coordinates realizing [`uniform_space`]: the indicators of `k` disjoint
/// atoms of measure `1/2`, so `|u_i - u_j|^p` integrates to 1.
pub fn uniform_point_set(k: usize) -> Result<FunctionSet> {
    if k < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: k });
    }
    let measure = AtomicMeasure::new(vec![rational(1, 2); k])?;
    let labels = (0..k).map(|i| format!("u{i}")).collect();
    let values = (0..k)
        .map(|i| (0..k).map(|j| integer((i == j) as i64)).collect())
        .collect();
    FunctionSet::new(measure, labels, values)
}

/// A named generator with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    HammingCube { n: u32 },
    CubeSubset { n: u32, size: usize, seed: u64 },
    Walsh { m: u32 },
    RemarkZ,
    MidpointLine,
    MidpointTriple,
    UniformSpace { k: usize },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<FunctionSet> {
        match *self {
            GeneratorSpec::HammingCube { n } => hamming_cube(n),
            GeneratorSpec::CubeSubset { n, size, seed } => cube_subset(n, size, seed),
            GeneratorSpec::Walsh { m } => walsh_system(m),
            GeneratorSpec::RemarkZ => Ok(remark_z()),
            GeneratorSpec::MidpointLine => Ok(midpoint_line()),
            GeneratorSpec::MidpointTriple => Ok(midpoint_triple()),
            GeneratorSpec::UniformSpace { k } => uniform_point_set(k),
        }
    }
}
