//! Weight vectors, unificator sets, and the generation of Λ_m — the set of
//! all strictly positive weight vectors of minimal balanced collections of a
//! given size, which does not depend on the number of players.
//!
//! The membership criterion is exact: λ lies in Λ_m iff every coordinate is
//! positive and the 0-1 rows whose product with λ equals one span full rank m.

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::introw::{det_mask_rows, gcd, rank_masks, IntBasis, IntRow};
use crate::exact::Rational as Q;
use crate::exact::{binomial, Rational};
use crate::{Error, Result};

/// Largest vector length for which unificator enumeration stays in one word.
pub const MAX_UNIFICATOR_DIM: usize = 16;

/// Exact weight vector. General vectors may carry zeros and negative entries;
/// membership in Λ_m additionally requires strict positivity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightVector {
    coords: Vec<Rational>,
}

impl WeightVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self { coords }
    }

    pub fn from_i64(coords: &[(i64, i64)]) -> Self {
        Self::new(
            coords
                .iter()
                .map(|&(n, d)| crate::exact::qr(n, d))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.coords.iter().all(Signed::is_positive)
    }

    /// Indices with positive coordinate, as a bit mask.
    pub fn pos_mask(&self) -> u32 {
        self.support_mask(|v| v.is_positive())
    }

    /// Indices with negative coordinate, as a bit mask.
    pub fn neg_mask(&self) -> u32 {
        self.support_mask(|v| v.is_negative())
    }

    fn support_mask(&self, pred: impl Fn(&Rational) -> bool) -> u32 {
        let mut mask = 0;
        for (i, v) in self.coords.iter().enumerate() {
            if pred(v) {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Exact dot product with a 0-1 row given as a bit mask.
    pub fn dot_mask(&self, mask: u32) -> Rational {
        let mut acc = Rational::zero();
        for (i, v) in self.coords.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc += v;
            }
        }
        acc
    }

    /// Coordinates sorted descending — the orbit representative under
    /// coordinate permutation.
    pub fn canonical(&self) -> Vec<Rational> {
        let mut c = self.coords.clone();
        c.sort_unstable_by(|a, b| b.cmp(a));
        c
    }
}

impl Serialize for WeightVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coords.iter().map(|r| r.to_string()))
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        let coords = raw
            .iter()
            .map(|s| s.parse::<Rational>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self::new(coords))
    }
}

/// All 0-1 rows whose product with λ is exactly one, with their rank over
/// the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnificatorSet {
    lambda: WeightVector,
    rows: Vec<u32>,
    rank: usize,
}

impl UnificatorSet {
    pub fn lambda(&self) -> &WeightVector {
        &self.lambda
    }

    /// Row masks in ascending order.
    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// Inclusion-freeness of the row family.
    pub fn is_antichain(&self) -> bool {
        for (i, &u) in self.rows.iter().enumerate() {
            for &v in &self.rows[i + 1..] {
                if u & v == u || u & v == v {
                    return false;
                }
            }
        }
        true
    }
}

/// Enumerates the unificator set of λ by an exact subset-sum test over all
/// 2^m rows.
pub fn unificators(lambda: &WeightVector) -> Result<UnificatorSet> {
    let m = lambda.len();
    if m == 0 || m > MAX_UNIFICATOR_DIM {
        return Err(Error::DimensionOverflow(format!(
            "unificator enumeration supports 1..={MAX_UNIFICATOR_DIM} coordinates, got {m}"
        )));
    }
    let rows = unificator_rows(lambda.coords());
    let rank = rank_masks(m, &rows);
    Ok(UnificatorSet {
        lambda: lambda.clone(),
        rows,
        rank,
    })
}

/// Subset sums over a common denominator; i128 covers every λ this crate
/// produces (small numerators, m ≤ 16), with a BigInt fallback for the rest.
fn unificator_rows(coords: &[Rational]) -> Vec<u32> {
    let m = coords.len();
    let mut denom = BigInt::one();
    for c in coords {
        denom = num_integer::lcm(denom, c.denom().clone());
    }
    let scaled: Option<Vec<i128>> = coords
        .iter()
        .map(|c| {
            let v = c.numer() * (&denom / c.denom());
            i128::try_from(&v).ok()
        })
        .collect();
    let target = i128::try_from(&denom).ok();
    match (scaled, target) {
        (Some(a), Some(t)) => (1u32..1 << m)
            .filter(|&u| {
                let mut s = 0i128;
                for (i, &ai) in a.iter().enumerate() {
                    if u >> i & 1 == 1 {
                        s += ai;
                    }
                }
                s == t
            })
            .collect(),
        _ => {
            let a: Vec<BigInt> = coords
                .iter()
                .map(|c| c.numer() * (&denom / c.denom()))
                .collect();
            (1u32..1 << m)
                .filter(|&u| {
                    let mut s = BigInt::zero();
                    for (i, ai) in a.iter().enumerate() {
                        if u >> i & 1 == 1 {
                            s += ai;
                        }
                    }
                    s == denom
                })
                .collect()
        }
    }
}

/// Membership test for Λ_m: strictly positive and full unificator rank.
pub fn is_in_lambda(lambda: &WeightVector) -> bool {
    if lambda.is_empty() || !lambda.is_strictly_positive() {
        return false;
    }
    let u = unificators(lambda).expect("dimension bounded by construction");
    u.rank() == lambda.len()
}

/// A permutation class of weight vectors: descending representative plus the
/// number of distinct coordinate orders.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LambdaClass {
    canonical: Vec<Rational>,
    multiplicity: u64,
}

impl LambdaClass {
    pub fn from_vector(coords: &[Rational]) -> Self {
        let mut canonical = coords.to_vec();
        canonical.sort_unstable_by(|a, b| b.cmp(a));
        let multiplicity = permutation_count(&canonical);
        Self {
            canonical,
            multiplicity,
        }
    }

    pub fn canonical(&self) -> &[Rational] {
        &self.canonical
    }

    pub fn representative(&self) -> WeightVector {
        WeightVector::new(self.canonical.clone())
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }
}

fn permutation_count(sorted: &[Rational]) -> u64 {
    let m = sorted.len() as u64;
    let mut total: u128 = (1..=m as u128).product();
    let mut run = 1u128;
    for i in 1..sorted.len() {
        if sorted[i] == sorted[i - 1] {
            run += 1;
            total /= run;
        } else {
            run = 1;
        }
    }
    u64::try_from(total).expect("multiplicity fits u64 for m ≤ 16")
}

/// Λ_m as a deduplicated list of permutation classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaSet {
    m: usize,
    classes: Vec<LambdaClass>,
}

impl LambdaSet {
    /// Builds a deduplicated class set from raw vectors (any coordinate
    /// order); callers are responsible for membership validity.
    pub fn from_vectors(m: usize, vectors: impl IntoIterator<Item = Vec<Rational>>) -> Self {
        Self::from_canonical_vectors(m, vectors)
    }

    fn from_canonical_vectors(m: usize, vectors: impl IntoIterator<Item = Vec<Rational>>) -> Self {
        let mut classes: Vec<LambdaClass> = vectors
            .into_iter()
            .map(|v| {
                debug_assert_eq!(v.len(), m);
                LambdaClass::from_vector(&v)
            })
            .collect();
        classes.sort();
        classes.dedup();
        Self { m, classes }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn classes(&self) -> &[LambdaClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains_class_of(&self, coords: &[Rational]) -> bool {
        let probe = LambdaClass::from_vector(coords);
        self.classes.binary_search_by(|c| c.cmp(&probe)).is_ok()
    }

    /// Total number of vectors across classes (Σ multiplicities).
    pub fn vector_count(&self) -> u64 {
        self.classes.iter().map(LambdaClass::multiplicity).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct LambdaClassRepr {
    vector: Vec<String>,
    multiplicity: u64,
}

#[derive(Serialize, Deserialize)]
struct LambdaFileRepr {
    version: String,
    m: usize,
    classes: Vec<LambdaClassRepr>,
}

impl Serialize for LambdaSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LambdaFileRepr {
            version: env!("CARGO_PKG_VERSION").to_string(),
            m: self.m,
            classes: self
                .classes
                .iter()
                .map(|c| LambdaClassRepr {
                    vector: c.canonical.iter().map(|r| r.to_string()).collect(),
                    multiplicity: c.multiplicity,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LambdaSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LambdaFileRepr::deserialize(d)?;
        if repr.version != env!("CARGO_PKG_VERSION") {
            return Err(D::Error::custom(format!(
                "cache version {} does not match {}",
                repr.version,
                env!("CARGO_PKG_VERSION")
            )));
        }
        let mut vectors = Vec::with_capacity(repr.classes.len());
        for c in &repr.classes {
            let coords = c
                .vector
                .iter()
                .map(|s| s.parse::<Rational>().map_err(D::Error::custom))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if coords.len() != repr.m {
                return Err(D::Error::custom("class length does not match m"));
            }
            vectors.push(coords);
        }
        Ok(LambdaSet::from_canonical_vectors(repr.m, vectors))
    }
}

/// Memoizing store for Λ sets, optionally backed by a cache directory whose
/// files carry the artifact version stamp.
#[derive(Debug, Default)]
pub struct LambdaStore {
    dir: Option<PathBuf>,
    mem: BTreeMap<usize, LambdaSet>,
}

impl LambdaStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: PathBuf) -> Self {
        Self {
            dir: Some(dir),
            mem: BTreeMap::new(),
        }
    }

    fn cache_path(&self, m: usize) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("lambda_{m}.json")))
    }

    pub fn get(&mut self, m: usize) -> Result<LambdaSet> {
        if let Some(s) = self.mem.get(&m) {
            return Ok(s.clone());
        }
        if let Some(path) = self.cache_path(m) {
            if let Ok(text) = std::fs::read_to_string(&path) {
                // A stale or mismatched cache entry is regenerated, not an error.
                if let Ok(set) = serde_json::from_str::<LambdaSet>(&text) {
                    if set.m() == m && validate_lambda_set(&set) {
                        self.mem.insert(m, set.clone());
                        return Ok(set);
                    }
                }
            }
        }
        let set = generate_lambda(m, self)?;
        Ok(set)
    }

    fn put(&mut self, set: &LambdaSet) -> Result<()> {
        if let Some(path) = self.cache_path(set.m()) {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, serde_json::to_string_pretty(set)?)?;
        }
        self.mem.insert(set.m(), set.clone());
        Ok(())
    }
}

fn validate_lambda_set(set: &LambdaSet) -> bool {
    set.classes()
        .iter()
        .all(|c| is_in_lambda(&c.representative()))
}

/// Builds Λ_m from the smaller sets by the three generating operations,
/// validating every candidate through the membership criterion and iterating
/// until no new class appears.
pub fn generate_lambda(m: usize, store: &mut LambdaStore) -> Result<LambdaSet> {
    if m == 0 || m > MAX_UNIFICATOR_DIM {
        return Err(Error::DimensionOverflow(format!("m = {m} unsupported")));
    }
    if let Some(s) = store.mem.get(&m) {
        return Ok(s.clone());
    }
    if m == 1 {
        let set = LambdaSet::from_canonical_vectors(1, vec![vec![Q::one()]]);
        store.put(&set)?;
        return Ok(set);
    }
    let smaller: Vec<LambdaSet> = (1..m).map(|k| store.get(k)).collect::<Result<Vec<_>>>()?;

    let mut admitted: HashSet<Vec<Rational>> = HashSet::new();
    let mut tested: HashSet<Vec<Rational>> = HashSet::new();
    loop {
        let mut candidates: HashSet<Vec<Rational>> = HashSet::new();
        insertion_candidates(&smaller[m - 2], &mut candidates);
        combination_candidates(m, &smaller, &mut candidates);
        let fresh: Vec<Vec<Rational>> = candidates
            .into_iter()
            .filter(|c| !tested.contains(c))
            .collect();
        if fresh.is_empty() {
            break;
        }
        let valid: Vec<Vec<Rational>> = fresh
            .par_iter()
            .filter(|c| is_in_lambda(&WeightVector::new((*c).clone())))
            .cloned()
            .collect();
        tested.extend(fresh);
        let before = admitted.len();
        admitted.extend(valid);
        if admitted.len() == before {
            break;
        }
    }

    let set = LambdaSet::from_canonical_vectors(m, admitted);
    store.put(&set)?;
    Ok(set)
}

/// Operations 1 and 2: extend a class representative of Λ_{m-1} by inserting
/// `1 - Σ_{i∈I} λ_i`, optionally also decreasing one coordinate outside `I`
/// by the inserted amount. Candidates are recorded as descending multisets;
/// the insertion position only permutes coordinates, so it never matters at
/// class level.
fn insertion_candidates(prev: &LambdaSet, out: &mut HashSet<Vec<Rational>>) {
    let mlen = prev.m();
    for class in prev.classes() {
        let lam = class.canonical();
        for index_set in 0u32..1 << mlen {
            let mut s = Q::zero();
            for (i, v) in lam.iter().enumerate() {
                if index_set >> i & 1 == 1 {
                    s += v;
                }
            }
            if s >= Q::one() {
                continue;
            }
            let inserted = Q::one() - &s;
            // Operation 1.
            let mut cand = lam.to_vec();
            cand.push(inserted.clone());
            cand.sort_unstable_by(|a, b| b.cmp(a));
            out.insert(cand);
            // Operation 2 needs 1 - λ_σ < Σ < 1, which keeps the decremented
            // coordinate strictly positive.
            for sigma in 0..mlen {
                if index_set >> sigma & 1 == 1 {
                    continue;
                }
                if &Q::one() - &lam[sigma] >= s {
                    continue;
                }
                let mut cand = lam.to_vec();
                cand[sigma] = &cand[sigma] - &inserted;
                cand.push(inserted.clone());
                cand.sort_unstable_by(|a, b| b.cmp(a));
                out.insert(cand);
            }
        }
    }
}

/// Operation 3: zero-pad a pair from smaller Λ sets so the supports cover
/// every coordinate, then take the convex combination at the crossing point
/// t_I of each index set's partial sums.
///
/// Candidates are kept modulo coordinate permutation, so the first vector is
/// pinned to a canonical padding while the second ranges over all distinct
/// arrangements whose support covers the first one's zeros. The inner loops
/// run over a common integer scale; rationals are only rebuilt for the
/// deduplicated survivors.
fn combination_candidates(m: usize, smaller: &[LambdaSet], out: &mut HashSet<Vec<Rational>>) {
    let mut keys: HashSet<(Vec<i64>, i64)> = HashSet::new();
    for k in 1..m {
        for l in 1..m {
            if k + l < m {
                continue;
            }
            for cl_a in smaller[k - 1].classes() {
                for cl_b in smaller[l - 1].classes() {
                    combine_classes(m, k, cl_a.canonical(), cl_b.canonical(), &mut keys);
                }
            }
        }
    }
    for (entries, denom) in keys {
        let cand: Vec<Rational> = entries
            .into_iter()
            .map(|e| Rational::new(BigInt::from(e), BigInt::from(denom)))
            .collect();
        debug_assert!(cand.iter().all(Signed::is_positive));
        out.insert(cand);
    }
}

/// Scales one class pair to a common denominator and walks every arrangement
/// of the second vector.
fn combine_classes(
    m: usize,
    k: usize,
    a_canonical: &[Rational],
    b_canonical: &[Rational],
    keys: &mut HashSet<(Vec<i64>, i64)>,
) {
    let l = b_canonical.len();
    let tail = m - k;
    if l < tail {
        return;
    }
    let mut denom = BigInt::one();
    for c in a_canonical.iter().chain(b_canonical) {
        denom = num_integer::lcm(denom, c.denom().clone());
    }
    let scale = i64::try_from(&denom).expect("class denominators stay small");
    let to_scaled = |c: &Rational| -> i64 {
        i64::try_from(&(c.numer() * (&denom / c.denom()))).expect("scaled coordinate fits i64")
    };
    let mut a_scaled = vec![0i64; m];
    for (slot, c) in a_scaled.iter_mut().zip(a_canonical) {
        *slot = to_scaled(c);
    }
    let mut b_values: Vec<i64> = b_canonical.iter().map(to_scaled).collect();
    b_values.sort_unstable();
    // Choose which head positions carry the values that do not cover the
    // zero tail, then walk distinct permutations of the multiset.
    let head = l - tail;
    let mut current = vec![0i64; m];
    for head_positions in subsets_of_size(k, head) {
        let mut support: Vec<usize> = head_positions;
        support.extend(k..m);
        distinct_permutations(&b_values, &support, &mut current, 0, &mut |b_scaled| {
            combine_scaled(&a_scaled, b_scaled, scale, keys);
        });
    }
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Feeds every distinct assignment of the sorted multiset `values` onto the
/// `support` positions of `current` to the visitor.
fn distinct_permutations(
    values: &[i64],
    support: &[usize],
    current: &mut Vec<i64>,
    depth: usize,
    visit: &mut impl FnMut(&[i64]),
) {
    if depth == support.len() {
        visit(current);
        return;
    }
    let mut prev: Option<i64> = None;
    for i in 0..values.len() {
        if prev == Some(values[i]) {
            continue;
        }
        prev = Some(values[i]);
        let mut remaining = values.to_vec();
        remaining.remove(i);
        current[support[depth]] = values[i];
        distinct_permutations(&remaining, support, current, depth + 1, visit);
        current[support[depth]] = 0;
    }
}

/// All crossing parameters of one arrangement pair, deduplicated locally;
/// every candidate is recorded as a gcd-normalized integer key.
fn combine_scaled(a: &[i64], b: &[i64], scale: i64, keys: &mut HashSet<(Vec<i64>, i64)>) {
    let m = a.len();
    // Subset sums via the lowest-set-bit recurrence.
    let size = 1usize << m;
    let mut sum_a = vec![0i64; size];
    let mut sum_b = vec![0i64; size];
    for set in 1..size {
        let low = set.trailing_zeros() as usize;
        let rest = set & (set - 1);
        sum_a[set] = sum_a[rest] + a[low];
        sum_b[set] = sum_b[rest] + b[low];
    }
    let mut ts: Vec<(i64, i64)> = Vec::new();
    for set in 1..size {
        let (sa, sb) = (sum_a[set], sum_b[set]);
        if sa == sb {
            continue;
        }
        // t = (1 - sa/scale) / (sb/scale - sa/scale), in (0, 1).
        let (mut num, mut den) = (scale - sa, sb - sa);
        if den < 0 {
            num = -num;
            den = -den;
        }
        if num <= 0 || num >= den {
            continue;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        ts.push((num / g, den / g));
    }
    ts.sort_unstable();
    ts.dedup();
    for (num, den) in ts {
        // λ'_i = (num·b_i + (den-num)·a_i) / (den·scale), gcd-normalized.
        let mut entries: Vec<i64> = (0..m).map(|i| num * b[i] + (den - num) * a[i]).collect();
        let mut g = (den * scale).unsigned_abs();
        for &e in &entries {
            g = gcd(g, e.unsigned_abs());
        }
        let g = g as i64;
        for e in &mut entries {
            *e /= g;
        }
        entries.sort_unstable_by(|x, y| y.cmp(x));
        keys.insert((entries, den * scale / g));
    }
}

/// Ground truth for the generator: scans every m×m 0-1 matrix, solves
/// `Aλ = 1` on the nonsingular ones, and admits strictly positive solutions
/// passing the membership criterion.
pub fn lambda_bruteforce_oracle(m: usize) -> Result<LambdaSet> {
    if m == 0 || m > 5 {
        return Err(Error::SizeLimit(format!(
            "oracle scans 2^(m²) matrices; m = {m} is out of range 1..=5"
        )));
    }
    let bits = m * m;
    let total: u64 = 1 << bits;
    let row_mask = (1u32 << m) - 1;
    let chunk = 1u64 << bits.min(16);
    let found: HashSet<Vec<Rational>> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut local: HashSet<Vec<Rational>> = HashSet::new();
            let mut rows = vec![0u32; m];
            for code in c * chunk..((c + 1) * chunk).min(total) {
                for (i, r) in rows.iter_mut().enumerate() {
                    *r = (code >> (i * m)) as u32 & row_mask;
                }
                if rows.contains(&0) {
                    continue;
                }
                let d = det_mask_rows(m, &rows);
                if d == 0 {
                    continue;
                }
                let mut nums = Vec::with_capacity(m);
                let mut positive = true;
                for j in 0..m {
                    let replaced: Vec<u32> = rows.iter().map(|&r| r | 1 << j).collect();
                    let dj = det_mask_rows(m, &replaced);
                    if dj == 0 || (dj > 0) != (d > 0) {
                        positive = false;
                        break;
                    }
                    nums.push(dj);
                }
                if !positive {
                    continue;
                }
                let mut lambda: Vec<Rational> = nums
                    .iter()
                    .map(|&dj| {
                        let g = gcd(dj.unsigned_abs(), d.unsigned_abs()) as i64;
                        let (mut num, mut den) = (dj / g, d / g);
                        if den < 0 {
                            num = -num;
                            den = -den;
                        }
                        Rational::new(num.into(), den.into())
                    })
                    .collect();
                lambda.sort_unstable_by(|a, b| b.cmp(a));
                local.insert(lambda);
            }
            local
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    // The membership criterion is automatic here (the matrix rows are m
    // independent unificators), but it is re-checked as stated.
    let vectors: Vec<Vec<Rational>> = found
        .into_iter()
        .filter(|v| is_in_lambda(&WeightVector::new(v.clone())))
        .collect();
    Ok(LambdaSet::from_canonical_vectors(m, vectors))
}

/// C_k(λ): the number of k-element subsets of the unificator rows with full
/// rank `m`.
pub fn count_full_rank_subsets(u: &UnificatorSet, k: usize) -> BigInt {
    if k > u.len() {
        return BigInt::zero();
    }
    count_full_rank_subsets_upto(u, k).swap_remove(k)
}

/// `C_k(λ)` for every `k ≤ kmax` at once (index `k` of the result).
///
/// Depth-first over the rows in index order with an exact incremental rank;
/// once the rank hits `m` every superset keeps it, so the tail is counted
/// binomially and the branch is pruned.
pub fn count_full_rank_subsets_upto(u: &UnificatorSet, kmax: usize) -> Vec<BigInt> {
    let m = u.dim();
    let total = u.len();
    let kmax = kmax.min(total);
    let mut counts = vec![BigInt::zero(); kmax + 1];
    if u.rank() < m || kmax < m {
        return counts;
    }
    let mut basis = IntBasis::new();
    dfs_rank_subsets(u.rows(), m, kmax, 0, 0, &mut basis, &mut counts);
    counts
}

fn dfs_rank_subsets(
    rows: &[u32],
    m: usize,
    kmax: usize,
    next: usize,
    size: usize,
    basis: &mut IntBasis,
    counts: &mut [BigInt],
) {
    if basis.rank() == m {
        // Every superset keeps full rank: count the tails binomially.
        let remaining = rows.len() - next;
        for k in size..=kmax.min(size + remaining) {
            counts[k] += binomial(remaining, k - size);
        }
        return;
    }
    if size == kmax || basis.rank() + (kmax - size) < m {
        return;
    }
    for i in next..rows.len() {
        if basis.rank() + (rows.len() - i) < m {
            break;
        }
        let reduced = basis.reduce(IntRow::from_mask(m, rows[i]));
        if reduced.is_zero() {
            dfs_rank_subsets(rows, m, kmax, i + 1, size + 1, basis, counts);
        } else {
            basis.push_reduced(reduced);
            dfs_rank_subsets(rows, m, kmax, i + 1, size + 1, basis, counts);
            basis.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qr};

    #[test]
    fn unificator_examples() {
        let u = unificators(&WeightVector::new(vec![q(1), q(1), q(1)])).unwrap();
        assert_eq!(u.rows(), &[0b001, 0b010, 0b100]);
        assert_eq!(u.rank(), 3);

        let u = unificators(&WeightVector::new(vec![qr(1, 2); 4])).unwrap();
        assert_eq!(u.len(), 6);
        assert_eq!(u.rank(), 4);
        assert!(u.rows().iter().all(|r| r.count_ones() == 2));

        let u = unificators(&WeightVector::new(vec![q(2), q(2)])).unwrap();
        assert!(u.is_empty());
        assert_eq!(u.rank(), 0);
    }

    #[test]
    fn subset_rank_counts() {
        let u = unificators(&WeightVector::new(vec![q(1), q(1), q(1)])).unwrap();
        assert_eq!(count_full_rank_subsets(&u, 3), BigInt::from(1));
        assert_eq!(count_full_rank_subsets(&u, 2), BigInt::from(0));

        let u = unificators(&WeightVector::new(vec![qr(1, 2); 3])).unwrap();
        assert_eq!(count_full_rank_subsets(&u, 3), BigInt::from(1));

        // Uniform 1/2 of length 4: six weight-2 rows; brute-force cross-check.
        let u = unificators(&WeightVector::new(vec![qr(1, 2); 4])).unwrap();
        for k in 0..=6 {
            let brute = brute_count(&u, k);
            assert_eq!(count_full_rank_subsets(&u, k), brute, "k = {k}");
        }
    }

    fn brute_count(u: &UnificatorSet, k: usize) -> BigInt {
        let rows = u.rows();
        let mut count = 0u64;
        for pick in 0u32..1 << rows.len() {
            if pick.count_ones() as usize != k {
                continue;
            }
            let sel: Vec<u32> = (0..rows.len())
                .filter(|&i| pick >> i & 1 == 1)
                .map(|i| rows[i])
                .collect();
            if rank_masks(u.dim(), &sel) == u.dim() {
                count += 1;
            }
        }
        BigInt::from(count)
    }

    #[test]
    fn oracle_small_m() {
        let l1 = lambda_bruteforce_oracle(1).unwrap();
        assert_eq!(l1.len(), 1);
        assert_eq!(l1.classes()[0].canonical(), &[q(1)]);

        let l2 = lambda_bruteforce_oracle(2).unwrap();
        assert_eq!(l2.len(), 1);
        assert_eq!(l2.classes()[0].canonical(), &[q(1), q(1)]);

        let l3 = lambda_bruteforce_oracle(3).unwrap();
        let reprs: Vec<Vec<Rational>> = l3
            .classes()
            .iter()
            .map(|c| c.canonical().to_vec())
            .collect();
        assert_eq!(reprs, vec![vec![qr(1, 2); 3], vec![q(1); 3]]);

        assert!(lambda_bruteforce_oracle(6).is_err());
    }

    #[test]
    fn generator_matches_oracle_small_m() {
        let mut store = LambdaStore::in_memory();
        for m in 1..=4usize {
            let generated = generate_lambda(m, &mut store).unwrap();
            let oracle = lambda_bruteforce_oracle(m).unwrap();
            assert_eq!(generated, oracle, "m = {m}");
        }
    }

    #[test]
    fn class_multiplicities() {
        let c = LambdaClass::from_vector(&[q(1), qr(1, 2), qr(1, 2)]);
        assert_eq!(c.multiplicity(), 3);
        let c = LambdaClass::from_vector(&vec![qr(1, 3); 4]);
        assert_eq!(c.multiplicity(), 1);
        let c = LambdaClass::from_vector(&[q(1), qr(1, 2), qr(1, 3)]);
        assert_eq!(c.multiplicity(), 6);
    }

    #[test]
    fn lambda_cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("minbal-lambda-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let mut store = LambdaStore::with_dir(dir.clone());
        let a = store.get(3).unwrap();
        // A second store reads from disk and must agree.
        let mut store2 = LambdaStore::with_dir(dir.clone());
        let b = store2.get(3).unwrap();
        assert_eq!(a, b);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn lambda_membership() {
        assert!(is_in_lambda(&WeightVector::new(vec![q(1), q(1)])));
        assert!(is_in_lambda(&WeightVector::new(vec![qr(1, 2); 3])));
        assert!(!is_in_lambda(&WeightVector::new(vec![qr(1, 3), qr(1, 3)])));
        // Uniform 1/k of length m qualifies for every 0 < k < m.
        for m in 2..=7usize {
            for k in 1..m {
                let v = WeightVector::new(vec![qr(1, k as i64); m]);
                assert!(is_in_lambda(&v), "uniform 1/{k} length {m}");
            }
            let v = WeightVector::new(vec![qr(1, m as i64); m]);
            assert!(!is_in_lambda(&v));
        }
    }
}
