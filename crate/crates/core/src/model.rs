//! Coalitions, collections, their 0-1 matrix forms, and the balancedness
//! predicates.
//!
//! A collection is kept in canonical form: distinct coalition masks in
//! ascending order. All set-level equality and deduplication flows through
//! that ordering.

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::simplex::{self, LpOutcome};
use crate::exact::{solve_ones, QMatrix, Rational, SolveOutcome};
use crate::weights::WeightVector;
use crate::{Error, Result};

/// Largest supported ground set; keeps coalition masks and the row masks of
/// unificator sets within one machine word.
pub const MAX_PLAYERS: usize = 16;

/// Nonempty subset of the player set `[n]`, player `i` ↔ bit `i - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition {
    mask: u32,
    n: usize,
}

impl Coalition {
    pub fn new(n: usize, mask: u32) -> Result<Self> {
        check_players(n)?;
        if mask == 0 {
            return Err(Error::InvalidInput("empty coalition".into()));
        }
        if mask >= 1 << n {
            return Err(Error::InvalidInput(format!(
                "coalition {mask:#b} not contained in a {n}-player ground set"
            )));
        }
        Ok(Self { mask, n })
    }

    pub fn from_members(n: usize, members: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &p in members {
            if p == 0 || p > n {
                return Err(Error::InvalidInput(format!(
                    "player {p} out of range 1..={n}"
                )));
            }
            mask |= 1 << (p - 1);
        }
        Self::new(n, mask)
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// 1-based sorted member list.
    pub fn members(&self) -> Vec<usize> {
        mask_members(self.mask)
    }

    /// Complement within the ground set; may be empty, hence a plain mask.
    pub fn complement_mask(&self) -> u32 {
        !self.mask & ((1u32 << self.n) - 1)
    }
}

pub(crate) fn check_players(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PLAYERS {
        return Err(Error::InvalidInput(format!(
            "ground set size {n} outside 1..={MAX_PLAYERS}"
        )));
    }
    Ok(())
}

pub(crate) fn mask_members(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| i + 1)
        .collect()
}

pub(crate) fn mask_from_members(n: usize, members: &[usize]) -> Result<u32> {
    Ok(Coalition::from_members(n, members)?.mask())
}

/// Set of distinct coalitions in canonical (ascending mask) order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Collection {
    n: usize,
    sets: Vec<u32>,
}

impl Collection {
    /// Builds the canonical form; rejects duplicates, empty members and an
    /// empty collection.
    pub fn new(n: usize, mut sets: Vec<u32>) -> Result<Self> {
        check_players(n)?;
        if sets.is_empty() {
            return Err(Error::InvalidInput("empty collection".into()));
        }
        sets.sort_unstable();
        for w in sets.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidInput(format!(
                    "duplicate coalition {:#b}",
                    w[0]
                )));
            }
        }
        for &s in &sets {
            Coalition::new(n, s)?;
        }
        Ok(Self { n, sets })
    }

    pub fn from_member_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let sets = lists
            .iter()
            .map(|l| mask_from_members(n, l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn masks(&self) -> &[u32] {
        &self.sets
    }

    pub fn coalitions(&self) -> impl Iterator<Item = Coalition> + '_ {
        self.sets.iter().map(|&mask| Coalition { mask, n: self.n })
    }

    /// Matrix whose columns are the member characteristic vectors, in
    /// canonical order.
    pub fn matrix(&self) -> ZeroOneMatrix {
        ZeroOneMatrix::new(self.n, self.sets.clone()).expect("canonical collection is valid")
    }

    /// Subcollection selected by a bit mask over member indices.
    pub fn subcollection(&self, index_mask: u32) -> Option<Collection> {
        let sets: Vec<u32> = (0..self.sets.len())
            .filter(|&i| index_mask >> i & 1 == 1)
            .map(|i| self.sets[i])
            .collect();
        if sets.is_empty() {
            return None;
        }
        Some(Collection { n: self.n, sets })
    }

    /// Union of all members as a mask.
    pub fn cover_mask(&self) -> u32 {
        self.sets.iter().fold(0, |a, &s| a | s)
    }

    fn covers_everyone(&self) -> bool {
        self.cover_mask() == (1u32 << self.n) - 1
    }
}

impl Serialize for Collection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            sets: Vec<Vec<usize>>,
        }
        Repr {
            n: self.n,
            sets: self.sets.iter().map(|&m| mask_members(m)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Collection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            sets: Vec<Vec<usize>>,
        }
        let r = Repr::deserialize(d)?;
        Collection::from_member_lists(r.n, &r.sets).map_err(D::Error::custom)
    }
}

/// 0-1 matrix stored as an ordered list of column masks; duplicate columns
/// are permitted here, unlike in `Collection`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZeroOneMatrix {
    n: usize,
    columns: Vec<u32>,
}

impl ZeroOneMatrix {
    pub fn new(n: usize, columns: Vec<u32>) -> Result<Self> {
        check_players(n)?;
        if columns.is_empty() {
            return Err(Error::InvalidInput("matrix with no columns".into()));
        }
        for &c in &columns {
            if c >= 1 << n {
                return Err(Error::InvalidInput(format!(
                    "column {c:#b} not contained in a {n}-player ground set"
                )));
            }
        }
        Ok(Self { n, columns })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    /// Row `i` as an `m`-bit mask: bit `j` set when column `j` contains
    /// player `i + 1`.
    pub fn row_mask(&self, i: usize) -> u32 {
        let mut mask = 0;
        for (j, &c) in self.columns.iter().enumerate() {
            if c >> i & 1 == 1 {
                mask |= 1 << j;
            }
        }
        mask
    }

    pub fn row_masks(&self) -> Vec<u32> {
        (0..self.n).map(|i| self.row_mask(i)).collect()
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        QMatrix::from_column_masks(self.n, &self.columns)
    }

    /// Collection of the column set, if all columns are distinct and nonempty.
    pub fn collection(&self) -> Result<Collection> {
        Collection::new(self.n, self.columns.clone())
    }
}

impl Serialize for ZeroOneMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            columns: Vec<Vec<usize>>,
        }
        Repr {
            n: self.n,
            columns: self.columns.iter().map(|&m| mask_members(m)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZeroOneMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            columns: Vec<Vec<usize>>,
        }
        let r = Repr::deserialize(d)?;
        let columns = r
            .columns
            .iter()
            .map(|l| {
                let mut mask = 0u32;
                for &p in l {
                    if p == 0 || p > r.n {
                        return Err(D::Error::custom(format!("player {p} out of range")));
                    }
                    mask |= 1 << (p - 1);
                }
                Ok(mask)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        ZeroOneMatrix::new(r.n, columns).map_err(D::Error::custom)
    }
}

/// Outcome of classifying a collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    #[serde(rename = "not-weakly-balanced")]
    NotWeaklyBalanced,
    #[serde(rename = "weakly-balanced")]
    WeaklyBalanced,
    #[serde(rename = "balanced")]
    Balanced,
    #[serde(rename = "minimal-balanced")]
    MinimalBalanced,
}

/// Classification plus exact evidence: weights that reproduce the all-ones
/// vector, and for balanced-but-not-minimal collections a proper balanced
/// subcollection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceCertificate {
    pub kind: CertificateKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weights: Option<WeightVector>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Collection>,
}

/// Decides `∃ λ ≥ 0 : Mλ = 1` exactly; returns a feasible weight vector when
/// one exists.
pub fn is_weakly_balanced(c: &Collection) -> Option<WeightVector> {
    if !c.covers_everyone() {
        return None;
    }
    let m = c.matrix().to_qmatrix();
    let rows: Vec<Vec<Rational>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].clone()).collect())
        .collect();
    let b = vec![Rational::one(); m.rows()];
    match simplex::feasible_point(&rows, &b) {
        LpOutcome::Optimal { x, .. } => {
            debug_assert!(m.mul_vec(&x).iter().all(|v| v.is_one()));
            Some(WeightVector::new(x))
        }
        LpOutcome::Infeasible { .. } => None,
        LpOutcome::Unbounded => unreachable!("feasibility problems are never unbounded"),
    }
}

/// Decides `∃ λ > 0 : Mλ = 1` exactly, via the substitution `λ = μ + t·1`
/// and maximizing `t`; returns a strictly positive witness when balanced.
pub fn balanced_witness(c: &Collection) -> Option<WeightVector> {
    if !c.covers_everyone() {
        return None;
    }
    let qm = c.matrix().to_qmatrix();
    let m = qm.cols();
    let mut rows = Vec::with_capacity(qm.rows());
    for i in 0..qm.rows() {
        let mut row: Vec<Rational> = (0..m).map(|j| qm[(i, j)].clone()).collect();
        let rowsum = row.iter().fold(Rational::zero(), |a, v| a + v);
        row.push(rowsum);
        rows.push(row);
    }
    let b = vec![Rational::one(); qm.rows()];
    let mut c_obj = vec![Rational::zero(); m + 1];
    c_obj[m] = Rational::one();
    match simplex::maximize(&rows, &b, &c_obj) {
        LpOutcome::Optimal { value, x } if value.is_positive() => {
            let t = &x[m];
            let lambda: Vec<Rational> = (0..m).map(|j| &x[j] + t).collect();
            debug_assert!(lambda.iter().all(|v| v.is_positive()));
            debug_assert!(qm.mul_vec(&lambda).iter().all(|v| v.is_one()));
            Some(WeightVector::new(lambda))
        }
        _ => None,
    }
}

pub fn is_balanced(c: &Collection) -> bool {
    balanced_witness(c).is_some()
}

/// Full classification with exact evidence. Minimality is decided by the
/// matrix characterization: full column rank plus a strictly positive unique
/// solution of `Mλ = 1`.
pub fn minimality_certificate(c: &Collection) -> BalanceCertificate {
    let qm = c.matrix().to_qmatrix();
    match solve_ones(&qm) {
        SolveOutcome::Unique(lambda) => {
            // Unique solution: its sign pattern settles every kind.
            if lambda.iter().all(Signed::is_positive) {
                BalanceCertificate {
                    kind: CertificateKind::MinimalBalanced,
                    weights: Some(WeightVector::new(lambda)),
                    witness: None,
                }
            } else if lambda.iter().all(|v| !v.is_negative()) {
                BalanceCertificate {
                    kind: CertificateKind::WeaklyBalanced,
                    weights: Some(WeightVector::new(lambda)),
                    witness: None,
                }
            } else {
                BalanceCertificate {
                    kind: CertificateKind::NotWeaklyBalanced,
                    weights: None,
                    witness: None,
                }
            }
        }
        SolveOutcome::Inconsistent => BalanceCertificate {
            kind: CertificateKind::NotWeaklyBalanced,
            weights: None,
            witness: None,
        },
        SolveOutcome::RankDeficient => {
            if let Some(w) = balanced_witness(c) {
                let witness = shrink_witness(c, &qm, w.coords());
                BalanceCertificate {
                    kind: CertificateKind::Balanced,
                    weights: Some(w),
                    witness: Some(witness),
                }
            } else if let Some(w) = is_weakly_balanced(c) {
                BalanceCertificate {
                    kind: CertificateKind::WeaklyBalanced,
                    weights: Some(w),
                    witness: None,
                }
            } else {
                BalanceCertificate {
                    kind: CertificateKind::NotWeaklyBalanced,
                    weights: None,
                    witness: None,
                }
            }
        }
    }
}

/// From a strictly positive solution of a rank-deficient system, walk along a
/// null direction until a coordinate hits zero; the surviving support is a
/// proper balanced subcollection.
fn shrink_witness(c: &Collection, qm: &QMatrix, lambda: &[Rational]) -> Collection {
    let mut d = null_vector(qm).expect("rank-deficient matrix has a null vector");
    if d.iter().all(|v| !v.is_negative()) {
        for v in &mut d {
            *v = -v.clone();
        }
    }
    // Largest step keeping λ + t·d ≥ 0; attained at some coordinate.
    let mut step: Option<Rational> = None;
    for (l, dv) in lambda.iter().zip(&d) {
        if dv.is_negative() {
            let t = -(l / dv);
            if step.as_ref().is_none_or(|s| t < *s) {
                step = Some(t);
            }
        }
    }
    let t = step.expect("direction has a negative coordinate");
    let moved: Vec<Rational> = lambda.iter().zip(&d).map(|(l, dv)| l + &t * dv).collect();
    debug_assert!(moved.iter().all(|v| !v.is_negative()));
    debug_assert!(moved.iter().any(|v| v.is_zero()));
    let support: Vec<u32> = c
        .masks()
        .iter()
        .zip(&moved)
        .filter(|(_, v)| v.is_positive())
        .map(|(&m, _)| m)
        .collect();
    let witness = Collection::new(c.n(), support).expect("support is nonempty");
    debug_assert!(witness.len() < c.len());
    debug_assert!(is_balanced(&witness));
    witness
}

/// A nonzero vector in the null space of the columns, if the columns are
/// dependent.
fn null_vector(m: &QMatrix) -> Option<Vec<Rational>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut work = m.clone();
    let mut pivot_in_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !work[(r, col)].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                let a = work[(p, j)].clone();
                let b = work[(rank, j)].clone();
                work[(p, j)] = b;
                work[(rank, j)] = a;
            }
        }
        let inv = work[(rank, col)].clone().recip();
        for j in col..cols {
            let v = &work[(rank, j)] * &inv;
            work[(rank, j)] = v;
        }
        for r in 0..rows {
            if r == rank || work[(r, col)].is_zero() {
                continue;
            }
            let f = work[(r, col)].clone();
            for j in col..cols {
                let v = &work[(r, j)] - &work[(rank, j)] * &f;
                work[(r, j)] = v;
            }
        }
        pivot_in_col[col] = Some(rank);
        rank += 1;
    }
    let free = (0..cols).find(|&j| pivot_in_col[j].is_none())?;
    let mut d = vec![Rational::zero(); cols];
    d[free] = Rational::one();
    for j in 0..cols {
        if let Some(r) = pivot_in_col[j] {
            d[j] = -work[(r, free)].clone();
        }
    }
    debug_assert!(m.mul_vec(&d).iter().all(Zero::is_zero));
    Some(d)
}

/// Definition-based minimality test: balanced, and no proper nonempty
/// subcollection is balanced. Exponential in the collection size; this is the
/// independent oracle, not the production test.
pub fn definition_minimality_oracle(c: &Collection) -> Result<bool> {
    if c.len() > 12 {
        return Err(Error::SizeLimit(format!(
            "oracle limited to 12 members, got {}",
            c.len()
        )));
    }
    if !is_balanced(c) {
        return Ok(false);
    }
    let m = c.len();
    let full = (1u32 << m) - 1;
    for sub in 1..full {
        let subc = c.subcollection(sub).expect("nonzero index mask");
        if is_balanced(&subc) {
            return Ok(false);
        }
    }
    Ok(true)
}
