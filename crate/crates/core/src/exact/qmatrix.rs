use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;

/// Dense matrix of exact rationals, row-major. Serializes as a row-major
/// array of `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            entries: Vec<String>,
        }
        Repr {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|r| r.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            entries: Vec<String>,
        }
        let r = Repr::deserialize(d)?;
        if r.entries.len() != r.rows * r.cols {
            return Err(D::Error::custom("entry count does not match the shape"));
        }
        let entries = r
            .entries
            .iter()
            .map(|s| s.parse::<Rational>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(QMatrix {
            rows: r.rows,
            cols: r.cols,
            entries,
        })
    }
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds the matrix whose columns are the characteristic vectors of the
    /// given bit masks over `n` players (player `i` is bit `i - 1`).
    pub fn from_column_masks(n: usize, masks: &[u32]) -> Self {
        let mut m = Self::zero(n, masks.len());
        for (j, &mask) in masks.iter().enumerate() {
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    m[(i, j)] = Rational::one();
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `M · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() {
                        acc += &self[(i, j)] * &x[j];
                    }
                }
                acc
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

/// Rank over the rationals by plain Gaussian elimination with exact pivots.
pub fn rank_q(m: &QMatrix) -> usize {
    assert!(m.rows() > 0 && m.cols() > 0, "rank of empty matrix");
    let mut work = m.clone();
    echelonize(&mut work)
}

fn echelonize(m: &mut QMatrix) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[(r, col)].is_zero()) else {
            continue;
        };
        if pivot != rank {
            for j in 0..cols {
                let a = m[(pivot, j)].clone();
                let b = m[(rank, j)].clone();
                m[(pivot, j)] = b;
                m[(rank, j)] = a;
            }
        }
        let inv = m[(rank, col)].clone().recip();
        for j in col..cols {
            let v = &m[(rank, j)] * &inv;
            m[(rank, j)] = v;
        }
        for r in 0..rows {
            if r == rank || m[(r, col)].is_zero() {
                continue;
            }
            let f = m[(r, col)].clone();
            for j in col..cols {
                let v = &m[(r, j)] - &m[(rank, j)] * &f;
                m[(r, j)] = v;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Result of solving `M λ = 1` for a full-column-rank system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// The unique exact solution.
    Unique(Vec<Rational>),
    /// Column rank below the number of columns; no unique solution exists.
    RankDeficient,
    /// Full column rank but the all-ones vector is outside the column span.
    Inconsistent,
}

impl SolveOutcome {
    pub fn unique(self) -> Option<Vec<Rational>> {
        match self {
            SolveOutcome::Unique(v) => Some(v),
            _ => None,
        }
    }
}

/// Solves `M λ = 1` exactly. Returns the unique solution when the columns are
/// independent and the all-ones vector lies in their span; otherwise reports
/// which of the two conditions failed (rank checked first).
pub fn solve_ones(m: &QMatrix) -> SolveOutcome {
    let (rows, cols) = (m.rows(), m.cols());
    // Augment with the all-ones column and reduce.
    let mut aug = QMatrix::zero(rows, cols + 1);
    for i in 0..rows {
        for j in 0..cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, cols)] = Rational::one();
    }
    let mut rank = 0usize;
    let mut pivot_cols = Vec::new();
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !aug[(r, col)].is_zero()) else {
            continue;
        };
        if pivot != rank {
            for j in 0..=cols {
                let a = aug[(pivot, j)].clone();
                let b = aug[(rank, j)].clone();
                aug[(pivot, j)] = b;
                aug[(rank, j)] = a;
            }
        }
        let inv = aug[(rank, col)].clone().recip();
        for j in col..=cols {
            let v = &aug[(rank, j)] * &inv;
            aug[(rank, j)] = v;
        }
        for r in 0..rows {
            if r == rank || aug[(r, col)].is_zero() {
                continue;
            }
            let f = aug[(r, col)].clone();
            for j in col..=cols {
                let v = &aug[(r, j)] - &aug[(rank, j)] * &f;
                aug[(r, j)] = v;
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    if rank < cols {
        return SolveOutcome::RankDeficient;
    }
    // Any nonzero residue row means the ones vector is not in the span.
    for r in rank..rows {
        if !aug[(r, cols)].is_zero() {
            return SolveOutcome::Inconsistent;
        }
    }
    let mut lambda = vec![Rational::zero(); cols];
    for (row, &col) in pivot_cols.iter().enumerate() {
        lambda[col] = aug[(row, cols)].clone();
    }
    debug_assert!(m.mul_vec(&lambda).iter().all(|v| v == &Rational::one()));
    SolveOutcome::Unique(lambda)
}

/// Signs of an exact vector, `-1 | 0 | 1` per coordinate.
pub fn signs(v: &[Rational]) -> Vec<i8> {
    v.iter()
        .map(|x| {
            if x.is_zero() {
                0
            } else if x.is_positive() {
                1
            } else {
                -1
            }
        })
        .collect()
}
