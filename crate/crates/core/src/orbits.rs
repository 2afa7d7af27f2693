//! The column-inversion action on 0-1 matrices and the two-element-field
//! construction of nonzero matrices.
//!
//! Complementing the columns indexed by `I` sends a matrix with nowhere-zero
//! weight vector λ to another such matrix whenever `Σ_{i∈I} λ_i ≠ 1`, with an
//! explicit sign-flip formula for the new weights; when the sum is exactly
//! one the rank collapses. Walking all `2^m` inversions therefore splits an
//! orbit into nonzero, positive, and collapsed members with predictable
//! counts.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exact::introw::rank_masks;
use crate::exact::{solve_ones, F2Matrix, F2Span, Rational, SolveOutcome};
use crate::model::{check_players, ZeroOneMatrix};
use crate::weights::{unificators, WeightVector};
use crate::{Error, Result};

/// Element of the inversion group: the set of columns to complement.
/// Composition is symmetric difference of the masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InversionElement(pub u32);

impl InversionElement {
    pub fn identity() -> Self {
        Self(0)
    }

    pub fn compose(self, other: Self) -> Self {
        Self(self.0 ^ other.0)
    }
}

/// Complements the columns indexed by the inversion within the ground set.
pub fn apply_inversion(m: &ZeroOneMatrix, inv: InversionElement) -> ZeroOneMatrix {
    let full = (1u32 << m.n()) - 1;
    let cols: Vec<u32> = m
        .columns()
        .iter()
        .enumerate()
        .map(|(j, &c)| if inv.0 >> j & 1 == 1 { full & !c } else { c })
        .collect();
    ZeroOneMatrix::new(m.n(), cols).expect("complement stays in the ground set")
}

/// Result of transporting the weight vector along an inversion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformedWeights {
    /// New exact weights with signs flipped on `I` (when `Σ_I λ < 1`) or on
    /// the complement of `I` (when `Σ_I λ > 1`).
    Weights(WeightVector),
    /// `Σ_I λ = 1`: the inverted matrix loses full rank.
    RankCollapse,
}

/// Weight vector of a matrix that must lie in I^{≠0} (full rank, solvable,
/// nowhere-zero weights).
pub fn nonzero_weights(m: &ZeroOneMatrix) -> Result<WeightVector> {
    match solve_ones(&m.to_qmatrix()) {
        SolveOutcome::Unique(lambda) => {
            if lambda.iter().any(Zero::is_zero) {
                return Err(Error::InvalidInput(
                    "matrix weights contain a zero coordinate".into(),
                ));
            }
            Ok(WeightVector::new(lambda))
        }
        SolveOutcome::RankDeficient => {
            Err(Error::InvalidInput("matrix is not of full rank".into()))
        }
        SolveOutcome::Inconsistent => Err(Error::InvalidInput(
            "the all-ones vector is outside the column span".into(),
        )),
    }
}

/// Transports λ(M) along `z_I`: scales by `1/(1 - Σ_I λ)` and negates on `I`.
/// The identity `z_I(M) λ' = 1` is checked exactly.
pub fn transformed_weights(m: &ZeroOneMatrix, inv: InversionElement) -> Result<TransformedWeights> {
    let lambda = nonzero_weights(m)?;
    Ok(transport(m, &lambda, inv))
}

fn transport(
    m: &ZeroOneMatrix,
    lambda: &WeightVector,
    inv: InversionElement,
) -> TransformedWeights {
    let s = lambda.dot_mask(inv.0);
    if s.is_one() {
        debug_assert!(
            rank_masks(m.m(), &apply_inversion(m, inv).row_masks()) < m.m(),
            "rank must collapse when the inverted sum is one"
        );
        return TransformedWeights::RankCollapse;
    }
    let scale = (Rational::one() - &s).recip();
    let coords: Vec<Rational> = lambda
        .coords()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if inv.0 >> i & 1 == 1 {
                -(v * &scale)
            } else {
                v * &scale
            }
        })
        .collect();
    debug_assert!(apply_inversion(m, inv)
        .to_qmatrix()
        .mul_vec(&coords)
        .iter()
        .all(|v| v.is_one()));
    TransformedWeights::Weights(WeightVector::new(coords))
}

/// How one inverted matrix classifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InversionClass {
    #[serde(rename = "rank-collapsed")]
    RankCollapsed,
    #[serde(rename = "positive")]
    Positive,
    #[serde(rename = "nonzero")]
    NonzeroMixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InversionRecord {
    pub columns_inverted: u32,
    pub class: InversionClass,
}

/// Walk of all `2^m` inversions of a base matrix from I^{≠0}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub base: ZeroOneMatrix,
    pub size_nonzero: u64,
    pub size_positive: u64,
    pub unificator_count: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_inversion: Option<Vec<InversionRecord>>,
}

/// Classifies every inversion of the base matrix. The nonzero orbit size
/// always equals `2^m - |U(λ)|` (index sets summing to one are exactly the
/// unificators); the positive orbit members are reported as observed, which
/// is 2 for m ≥ 2 and 1 in the degenerate single-column case.
pub fn orbit_summary(m: &ZeroOneMatrix, keep_detail: bool) -> Result<OrbitSummary> {
    let lambda = nonzero_weights(m)?;
    let cols = m.m();
    if cols > 20 {
        return Err(Error::DimensionOverflow(format!(
            "orbit walk over 2^{cols} inversions refused"
        )));
    }
    let mut size_nonzero = 0u64;
    let mut size_positive = 0u64;
    let mut detail = keep_detail.then(Vec::new);
    let mut positive_sets: Vec<u32> = Vec::new();
    for inv in 0u32..1 << cols {
        let class = match transport(m, &lambda, InversionElement(inv)) {
            TransformedWeights::RankCollapse => InversionClass::RankCollapsed,
            TransformedWeights::Weights(w) => {
                size_nonzero += 1;
                if w.is_strictly_positive() {
                    size_positive += 1;
                    positive_sets.push(inv);
                    InversionClass::Positive
                } else {
                    InversionClass::NonzeroMixed
                }
            }
        };
        if let Some(d) = detail.as_mut() {
            d.push(InversionRecord {
                columns_inverted: inv,
                class,
            });
        }
    }
    let u = unificators(&lambda)?;
    assert_eq!(
        size_nonzero,
        (1u64 << cols) - u.len() as u64,
        "nonzero orbit size must be 2^m minus the unificator count"
    );
    // The positive members can only be the inversions of the negative or the
    // positive support.
    for &p in &positive_sets {
        debug_assert!(p == lambda.neg_mask() || p == lambda.pos_mask());
    }
    Ok(OrbitSummary {
        base: m.clone(),
        size_nonzero,
        size_positive,
        unificator_count: u.len() as u64,
        per_inversion: detail,
    })
}

/// Turns a full-rank two-element-field matrix with all-ones first column into
/// a member of I^{≠0}_{n,n}: drop the ones column and append the mod-2 sum of
/// the others plus one.
pub fn f2_lift(n: usize, a: &F2Matrix) -> Result<ZeroOneMatrix> {
    check_players(n)?;
    if a.rows() != n || a.cols() != n {
        return Err(Error::InvalidInput(format!(
            "expected a {n}×{n} matrix, got {}×{}",
            a.rows(),
            a.cols()
        )));
    }
    if crate::exact::rank_f2(a) != n {
        return Err(Error::InvalidInput("matrix is singular over F2".into()));
    }
    let col_mask = |j: usize| -> u32 {
        let mut mask = 0;
        for i in 0..n {
            if a.get(i, j) {
                mask |= 1 << i;
            }
        }
        mask
    };
    if col_mask(0) != (1u32 << n) - 1 {
        return Err(Error::InvalidInput("first column must be all ones".into()));
    }
    let mut cols: Vec<u32> = (1..n).map(col_mask).collect();
    // Appended column: 1 + Σ of the kept columns, mod 2 — XOR of the full mask
    // with all kept columns.
    let appended = cols.iter().fold((1u32 << n) - 1, |acc, &c| acc ^ c);
    cols.push(appended);
    let lifted = ZeroOneMatrix::new(n, cols)?;
    // Independence over F2 implies independence over the rationals, and the
    // lifted weights can have no zero coordinate.
    let lambda = nonzero_weights(&lifted).expect("lift lands in the nonzero class");
    debug_assert!(lambda.coords().iter().all(|v| !v.is_zero()));
    Ok(lifted)
}

/// `1 · (2^n - 2) · (2^n - 2^2) ⋯ (2^n - 2^{m-1})`: full-rank n×m matrices
/// over the two-element field with a fixed nonzero first column.
pub fn count_f2_matrices(n: usize, m: usize) -> Result<BigInt> {
    if m > n {
        return Err(Error::InvalidInput(format!(
            "require m ≤ n, got m={m}, n={n}"
        )));
    }
    let mut acc = BigInt::one();
    for k in 1..m {
        acc *= (BigInt::one() << n) - (BigInt::one() << k);
    }
    Ok(acc)
}

/// Uniform random full-rank n×n matrix over the two-element field with
/// all-ones first column, by per-column rejection sampling.
pub fn random_f2_ones_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> F2Matrix {
    let full = (1u32 << n) - 1;
    let mut span = F2Span::new();
    let mut cols = vec![full];
    span.insert(full as u64);
    while cols.len() < n {
        let c = rng.random_range(1..=full);
        if span.insert(c as u64) {
            cols.push(c);
        }
    }
    F2Matrix::from_column_masks(n, &cols)
}
