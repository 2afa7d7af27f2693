//! Exhaustive enumeration engines.
//!
//! The production search walks coalitions in ascending mask order keeping an
//! incremental exact elimination state: a branch survives only while its
//! columns stay independent and the all-ones vector stays outside their span
//! (once inside, the unique solution extends by zeros, so no descendant can
//! be minimal). The independent lambda-route rebuilds every collection from
//! the weight classes instead, and both must agree checksum for checksum.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::introw::{solve_ones_masks, IntBasis, IntRow, IntSolve};
use crate::exact::Rational;
use crate::model::{check_players, Collection};
use crate::weights::{unificators, LambdaSet, LambdaStore, WeightVector};
use crate::{Error, Result};

/// One enumerated minimal balanced collection with its unique weights.
pub type EnumItem = (Collection, WeightVector);

/// The full outcome of an enumeration run, sorted by (size, canonical masks).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationResult {
    n: usize,
    items: Vec<EnumItem>,
    per_m: Vec<u64>,
    checksum: u64,
    ordered_digest: u64,
}

impl EnumerationResult {
    fn from_items(n: usize, mut items: Vec<EnumItem>) -> Self {
        items.sort_unstable_by(|(a, _), (b, _)| (a.len(), a.masks()).cmp(&(b.len(), b.masks())));
        let mut per_m = vec![0u64; n + 1];
        let mut checksum = 0u64;
        let mut ordered = FNV_OFFSET;
        for (c, w) in &items {
            per_m[c.len()] += 1;
            let h = item_hash(c);
            checksum = checksum.wrapping_add(h);
            ordered = fnv1a_u64(ordered, h);
            for coord in w.coords() {
                ordered = fnv1a_bytes(ordered, coord.to_string().as_bytes());
            }
        }
        Self {
            n,
            items,
            per_m,
            checksum,
            ordered_digest: ordered,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn items(&self) -> &[EnumItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Count of collections with exactly m members.
    pub fn count_for_m(&self, m: usize) -> u64 {
        self.per_m.get(m).copied().unwrap_or(0)
    }

    pub fn per_m_counts(&self) -> &[u64] {
        &self.per_m[1..]
    }

    /// Order-independent fold over canonical collections; equal across modes.
    pub fn checksum(&self) -> u64 {
        self.checksum
    }

    /// Order-sensitive digest of the sorted stream including weights.
    pub fn ordered_digest(&self) -> u64 {
        self.ordered_digest
    }

    /// Weight classes of the size-m members, deduplicated by coordinate
    /// permutation.
    pub fn harvest_lambda(&self, m: usize) -> LambdaSet {
        let vectors = self
            .items
            .iter()
            .filter(|(c, _)| c.len() == m)
            .map(|(_, w)| w.canonical());
        LambdaSet::from_vectors(m, vectors)
    }

    /// JSON-lines: one collection with weights per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for (c, wv) in &self.items {
            let line = serde_json::to_string(&EnumItemRepr::pack(c, wv))?;
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Reads a JSON-lines stream and re-verifies each weight vector exactly.
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut items = Vec::new();
        let mut n = None;
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let repr: EnumItemRepr = serde_json::from_str(&line)?;
            let (c, w) = repr.unpack()?;
            match n {
                None => n = Some(c.n()),
                Some(expect) if expect != c.n() => {
                    return Err(Error::InvalidInput(format!(
                        "mixed ground-set sizes {expect} and {}",
                        c.n()
                    )));
                }
                _ => {}
            }
            items.push((c, w));
        }
        let n = n.ok_or_else(|| Error::InvalidInput("empty enumeration stream".into()))?;
        Ok(Self::from_items(n, items))
    }
}

#[derive(Serialize, Deserialize)]
struct EnumItemRepr {
    n: usize,
    sets: Vec<Vec<usize>>,
    weights: Vec<String>,
}

impl EnumItemRepr {
    fn pack(c: &Collection, w: &WeightVector) -> Self {
        Self {
            n: c.n(),
            sets: c.coalitions().map(|co| co.members()).collect(),
            weights: w.coords().iter().map(|r| r.to_string()).collect(),
        }
    }

    fn unpack(self) -> Result<EnumItem> {
        let c = Collection::from_member_lists(self.n, &self.sets)?;
        let coords = self
            .weights
            .iter()
            .map(|s| crate::exact::rational_from_str(s))
            .collect::<Result<Vec<_>>>()?;
        if coords.len() != c.len() {
            return Err(Error::InvalidInput("weight length mismatch".into()));
        }
        let w = WeightVector::new(coords);
        let ok = c
            .matrix()
            .to_qmatrix()
            .mul_vec(w.coords())
            .iter()
            .all(num_traits::One::is_one);
        if !ok || !w.is_strictly_positive() {
            return Err(Error::InvalidInput(format!(
                "stored weights do not certify {:?}",
                c.masks()
            )));
        }
        Ok((c, w))
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x1000_0000_01b3;

fn fnv1a_bytes(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn fnv1a_u64(h: u64, v: u64) -> u64 {
    fnv1a_bytes(h, &v.to_le_bytes())
}

fn item_hash(c: &Collection) -> u64 {
    let mut h = fnv1a_bytes(FNV_OFFSET, &[c.n() as u8, c.len() as u8]);
    for &m in c.masks() {
        h = fnv1a_bytes(h, &m.to_le_bytes());
    }
    h
}

/// Which engine produces the collections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnumerationMode {
    #[serde(rename = "search")]
    Search,
    #[serde(rename = "lambda-route")]
    LambdaRoute,
}

/// Enumerates every minimal balanced collection on n players. Exhaustive runs
/// are capped at n = 6; the streaming interface handles n = 7.
pub fn enumerate_minimal(n: usize, mode: EnumerationMode) -> Result<EnumerationResult> {
    check_players(n)?;
    if n > 6 {
        return Err(Error::SizeLimit(format!(
            "in-memory enumeration capped at n = 6 (got {n}); use the streaming interface"
        )));
    }
    let items = match mode {
        EnumerationMode::Search => search_items(n, None),
        EnumerationMode::LambdaRoute => lambda_route_items(n)?,
    };
    Ok(EnumerationResult::from_items(n, items))
}

/// Streaming search for large runs: emits in depth-first (ascending mask)
/// order, which is deterministic, and returns the per-size counts and the
/// order-independent checksum.
pub fn enumerate_minimal_streaming(
    n: usize,
    sink: &mut dyn FnMut(&Collection, &WeightVector) -> Result<()>,
) -> Result<StreamSummary> {
    check_players(n)?;
    if n > 7 {
        return Err(Error::SizeLimit(format!(
            "exhaustive search refused beyond n = 7 (got {n})"
        )));
    }
    let cands: Vec<u32> = (1..1u32 << n).collect();
    let mut per_m = vec![0u64; n + 1];
    let mut checksum = 0u64;
    let mut total = 0u64;
    // Depth-≤2 emissions first, then the depth-2 subtrees in order, each
    // chunk traversed in parallel and written sequentially.
    let shallow = shallow_and_prefixes(n, &cands);
    for item in &shallow.emitted {
        let (c, w) = materialize(n, item);
        per_m[c.len()] += 1;
        checksum = checksum.wrapping_add(item_hash(&c));
        total += 1;
        sink(&c, &w)?;
    }
    for chunk in shallow.tasks.chunks(64) {
        let results: Vec<Vec<RawItem>> = chunk.par_iter().map(|task| run_task(n, task)).collect();
        for raw_items in results {
            for item in raw_items {
                let (c, w) = materialize(n, &item);
                per_m[c.len()] += 1;
                checksum = checksum.wrapping_add(item_hash(&c));
                total += 1;
                sink(&c, &w)?;
            }
        }
    }
    Ok(StreamSummary {
        n,
        total,
        per_m: per_m[1..].to_vec(),
        checksum,
    })
}

/// Counts and checksum of a streamed run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSummary {
    pub n: usize,
    pub total: u64,
    pub per_m: Vec<u64>,
    pub checksum: u64,
}

/// Raw emitted item: canonical masks plus the solved weights as reduced
/// integer fractions.
type RawItem = (Vec<u32>, Vec<(i64, i64)>);

fn materialize(n: usize, (masks, fracs): &RawItem) -> EnumItem {
    let c = Collection::new(n, masks.clone()).expect("search emits canonical collections");
    let w = WeightVector::new(
        fracs
            .iter()
            .map(|&(num, den)| Rational::new(BigInt::from(num), BigInt::from(den)))
            .collect(),
    );
    (c, w)
}

/// Candidate column with its row vector reduced through the path's
/// elimination schedule. Dependent candidates are dropped on propagation.
#[derive(Clone, Copy)]
struct Cand {
    mask: u32,
    row: IntRow,
}

/// A depth-2 subtree, fully prepared for independent traversal.
struct SearchTask {
    path: Vec<u32>,
    cands: Vec<Cand>,
    residue: IntRow,
    prev_pivot: i64,
}

struct Shallow {
    emitted: Vec<RawItem>,
    tasks: Vec<SearchTask>,
}

fn try_emit(n: usize, path: &[u32], out: &mut Vec<RawItem>) {
    if let IntSolve::Unique(fracs) = solve_ones_masks(n, path) {
        if fracs.iter().all(|&(num, _)| num > 0) {
            out.push((path.to_vec(), fracs));
        }
    }
}

/// Handles depth ≤ 2 sequentially: emits what completes there and prepares
/// the surviving depth-2 subtrees as parallel tasks. A node is consistent —
/// the all-ones vector enters the column span — exactly when the reduced
/// residue is parallel to the reduced candidate; consistent nodes emit and
/// never extend, because deeper solutions would extend this one by zeros.
fn shallow_and_prefixes(n: usize, cand_masks: &[u32]) -> Shallow {
    let mut emitted = Vec::new();
    let mut tasks = Vec::new();
    let ones = IntRow::ones(n);
    let level0: Vec<Cand> = cand_masks
        .iter()
        .map(|&mask| Cand {
            mask,
            row: IntRow::from_mask(n, mask),
        })
        .collect();
    for (i, ci) in level0.iter().enumerate() {
        if ones.parallel(&ci.row) {
            try_emit(n, &[ci.mask], &mut emitted);
            continue;
        }
        if n < 2 {
            continue;
        }
        let pivot_i = ci.row.first_nonzero().expect("0-1 candidates are nonzero");
        let pv_i = ci.row.a[pivot_i];
        let res1 = ones.eliminate_step(&ci.row, pivot_i, 1);
        for cj0 in &level0[i + 1..] {
            let rj = cj0.row.eliminate_step(&ci.row, pivot_i, 1);
            if rj.is_zero() {
                continue;
            }
            if res1.parallel(&rj) {
                try_emit(n, &[ci.mask, cj0.mask], &mut emitted);
            } else if n > 2 {
                // Prepare the subtree: propagate the remaining candidates
                // through both chosen columns.
                let pivot_j = rj.first_nonzero().expect("independent row");
                let pv_j = rj.a[pivot_j];
                let residue = res1.eliminate_step(&rj, pivot_j, pv_i);
                let mut cands = Vec::new();
                for ck0 in &level0[i + 1..] {
                    if ck0.mask <= cj0.mask {
                        continue;
                    }
                    let r1 = ck0.row.eliminate_step(&ci.row, pivot_i, 1);
                    if r1.is_zero() {
                        continue;
                    }
                    let r2 = r1.eliminate_step(&rj, pivot_j, pv_i);
                    if r2.is_zero() {
                        continue;
                    }
                    cands.push(Cand {
                        mask: ck0.mask,
                        row: r2,
                    });
                }
                tasks.push(SearchTask {
                    path: vec![ci.mask, cj0.mask],
                    cands,
                    residue,
                    prev_pivot: pv_j,
                });
            }
        }
    }
    Shallow { emitted, tasks }
}

fn run_task(n: usize, task: &SearchTask) -> Vec<RawItem> {
    let mut out = Vec::new();
    let mut path = task.path.clone();
    let mut pool: Vec<Vec<Cand>> = Vec::new();
    dfs(
        n,
        &task.cands,
        &task.residue,
        task.prev_pivot,
        &mut path,
        &mut pool,
        &mut out,
    );
    out
}

fn dfs(
    n: usize,
    cands: &[Cand],
    residue: &IntRow,
    prev_pivot: i64,
    path: &mut Vec<u32>,
    pool: &mut Vec<Vec<Cand>>,
    out: &mut Vec<RawItem>,
) {
    let depth = path.len();
    for (pos, c) in cands.iter().enumerate() {
        if residue.parallel(&c.row) {
            path.push(c.mask);
            try_emit(n, path, out);
            path.pop();
        } else if depth + 1 < n {
            let pivot = c.row.first_nonzero().expect("candidates are nonzero");
            let pv = c.row.a[pivot];
            let next_residue = residue.eliminate_step(&c.row, pivot, prev_pivot);
            let mut buf = pool.pop().unwrap_or_default();
            buf.clear();
            for other in &cands[pos + 1..] {
                let r = other.row.eliminate_step(&c.row, pivot, prev_pivot);
                if !r.is_zero() {
                    buf.push(Cand {
                        mask: other.mask,
                        row: r,
                    });
                }
            }
            path.push(c.mask);
            dfs(n, &buf, &next_residue, pv, path, pool, out);
            path.pop();
            pool.push(buf);
        }
    }
}

/// Search over an optionally restricted candidate mask list.
fn search_items(n: usize, filter: Option<&[u32]>) -> Vec<EnumItem> {
    let cands: Vec<u32> = match filter {
        Some(f) => f.to_vec(),
        None => (1..1u32 << n).collect(),
    };
    let shallow = shallow_and_prefixes(n, &cands);
    let deep: Vec<RawItem> = shallow
        .tasks
        .par_iter()
        .flat_map_iter(|task| run_task(n, task).into_iter())
        .collect();
    shallow
        .emitted
        .into_iter()
        .chain(deep)
        .map(|item| materialize(n, &item))
        .collect()
}

/// Rebuilds every collection from the weight classes: for each λ class, each
/// full-rank subset of its unificator rows of size ≤ n, and each surjection
/// of players onto those rows, read the columns off and deduplicate.
/// Repeated-weight classes revisit each collection once per equal-weight
/// column order, so deduplication happens inline against per-thread maps.
fn lambda_route_items(n: usize) -> Result<Vec<EnumItem>> {
    let mut store = LambdaStore::in_memory();
    let mut dedup: HashMap<Vec<u32>, Vec<Rational>> = HashMap::new();
    for m in 1..=n {
        let lam = store.get(m)?;
        for class in lam.classes() {
            let rep = class.representative();
            let u = unificators(&rep)?;
            let subsets = full_rank_subsets(&u, n);
            let merged = subsets
                .par_iter()
                .fold(HashMap::<Vec<u32>, Vec<Rational>>::new, |mut acc, rows| {
                    let mut scratch = SurjectionScratch::new(n, rows.len());
                    surjection_dfs(n, m, rows, rep.coords(), 0, &mut scratch, &mut acc);
                    acc
                })
                .reduce(HashMap::new, |a, b| {
                    if a.len() < b.len() {
                        return reduce_into(b, a);
                    }
                    reduce_into(a, b)
                });
            for (masks, coords) in merged {
                dedup.entry(masks).or_insert(coords);
            }
        }
    }
    Ok(dedup
        .into_iter()
        .map(|(masks, coords)| {
            let c = Collection::new(n, masks).expect("route emits canonical collections");
            (c, WeightVector::new(coords))
        })
        .collect())
}

fn reduce_into(
    mut big: HashMap<Vec<u32>, Vec<Rational>>,
    small: HashMap<Vec<u32>, Vec<Rational>>,
) -> HashMap<Vec<u32>, Vec<Rational>> {
    for (k, v) in small {
        big.entry(k).or_insert(v);
    }
    big
}

struct SurjectionScratch {
    assignment: Vec<usize>,
    use_counts: Vec<u32>,
}

impl SurjectionScratch {
    fn new(n: usize, k: usize) -> Self {
        Self {
            assignment: vec![0; n],
            use_counts: vec![0; k],
        }
    }
}

/// All subsets of the unificator rows with rank m and size between m and n.
fn full_rank_subsets(u: &crate::weights::UnificatorSet, n: usize) -> Vec<Vec<u32>> {
    let m = u.dim();
    let rows = u.rows();
    let mut out = Vec::new();
    let mut basis = IntBasis::new();
    let mut chosen: Vec<u32> = Vec::new();
    fn rec(
        rows: &[u32],
        m: usize,
        n: usize,
        next: usize,
        basis: &mut IntBasis,
        chosen: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if chosen.len() >= m && basis.rank() == m {
            out.push(chosen.clone());
        }
        if chosen.len() == n {
            return;
        }
        for i in next..rows.len() {
            if basis.rank() + (rows.len() - i).min(n - chosen.len()) < m {
                break;
            }
            let reduced = basis.reduce(IntRow::from_mask(m, rows[i]));
            chosen.push(rows[i]);
            if reduced.is_zero() {
                rec(rows, m, n, i + 1, basis, chosen, out);
            } else {
                basis.push_reduced(reduced);
                rec(rows, m, n, i + 1, basis, chosen, out);
                basis.pop();
            }
            chosen.pop();
        }
    }
    rec(rows, m, n, 0, &mut basis, &mut chosen, &mut out);
    out
}

/// Assigns each player one of the chosen rows, every row used at least once;
/// converts each finished assignment into canonical columns with permuted
/// weights. The leaf probes the accumulator by slice, allocating only for
/// genuinely new collections.
fn surjection_dfs(
    n: usize,
    m: usize,
    rows: &[u32],
    weights: &[Rational],
    player: usize,
    scratch: &mut SurjectionScratch,
    out: &mut HashMap<Vec<u32>, Vec<Rational>>,
) {
    if player == n {
        let mut cols = [0u32; 16];
        for (p, &ri) in scratch.assignment.iter().enumerate() {
            let row = rows[ri];
            for (j, col) in cols[..m].iter_mut().enumerate() {
                if row >> j & 1 == 1 {
                    *col |= 1 << p;
                }
            }
        }
        let mut order = [0usize; 16];
        for (j, slot) in order[..m].iter_mut().enumerate() {
            *slot = j;
        }
        order[..m].sort_unstable_by_key(|&j| cols[j]);
        let mut sorted_cols = [0u32; 16];
        for (slot, &j) in sorted_cols[..m].iter_mut().zip(&order[..m]) {
            *slot = cols[j];
        }
        if !out.contains_key(&sorted_cols[..m]) {
            let sorted_weights: Vec<Rational> =
                order[..m].iter().map(|&j| weights[j].clone()).collect();
            out.insert(sorted_cols[..m].to_vec(), sorted_weights);
        }
        return;
    }
    let unused = scratch.use_counts.iter().filter(|&&c| c == 0).count();
    let remaining = n - player;
    for ri in 0..rows.len() {
        // Every still-unused row must fit into the players left after this one.
        let unused_after = unused - usize::from(scratch.use_counts[ri] == 0);
        if unused_after > remaining - 1 {
            continue;
        }
        scratch.use_counts[ri] += 1;
        scratch.assignment[player] = ri;
        surjection_dfs(n, m, rows, weights, player + 1, scratch, out);
        scratch.use_counts[ri] -= 1;
    }
}

/// Definition-based ground truth: scans every collection of at most n
/// coalitions and keeps the balanced ones without balanced proper
/// subcollections. No rank shortcut anywhere.
pub fn bruteforce_oracle_enumerate(n: usize) -> Result<EnumerationResult> {
    check_players(n)?;
    if n > 5 {
        return Err(Error::SizeLimit(format!(
            "the definition oracle scans all collections; n = {n} exceeds 5"
        )));
    }
    let masks: Vec<u32> = (1..1u32 << n).collect();
    let sizes: Vec<usize> = (1..=n).collect();
    let mut all: Vec<Vec<u32>> = Vec::new();
    for &m in &sizes {
        let mut chosen = Vec::with_capacity(m);
        collect_subsets(&masks, m, 0, &mut chosen, &mut all);
    }
    let items: Vec<EnumItem> = all
        .par_iter()
        .filter_map(|masks| {
            let c = Collection::new(n, masks.clone()).expect("distinct ascending masks");
            if !crate::model::definition_minimality_oracle(&c).expect("size within oracle bound") {
                return None;
            }
            let w = crate::model::is_weakly_balanced(&c).expect("balanced implies weakly");
            Some((c, w))
        })
        .collect();
    // The oracle's weights come from the feasibility solver; replace them
    // with the unique exact solution for digest stability.
    let items: Vec<EnumItem> = items
        .into_iter()
        .map(|(c, _)| {
            let w = match crate::exact::solve_ones(&c.matrix().to_qmatrix()) {
                crate::exact::SolveOutcome::Unique(l) => WeightVector::new(l),
                _ => unreachable!("minimal balanced collections have unique weights"),
            };
            (c, w)
        })
        .collect();
    Ok(EnumerationResult::from_items(n, items))
}

fn collect_subsets(
    masks: &[u32],
    size: usize,
    start: usize,
    chosen: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if chosen.len() == size {
        out.push(chosen.clone());
        return;
    }
    for i in start..masks.len() {
        if masks.len() - i < size - chosen.len() {
            break;
        }
        chosen.push(masks[i]);
        collect_subsets(masks, size, i + 1, chosen, out);
        chosen.pop();
    }
}

/// Exhaustive classification of all 2^{nm} 0-1 matrices of one shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSpaceCensus {
    pub n: usize,
    pub m: usize,
    /// |I_{n,m}|: full column rank and the all-ones vector in the span.
    pub solvable: u64,
    /// |I^{≠0}_{n,m}|: weights nowhere zero.
    pub nonzero: u64,
    /// |I^{>0}_{n,m}|: weights strictly positive.
    pub positive: u64,
    /// Count per weight-support mask (positions with nonzero weight).
    pub per_support: BTreeMap<u32, u64>,
}

/// Scans the whole matrix space; feeds the bound checks and the exhaustive
/// orbit suites.
pub fn scan_matrix_space(n: usize, m: usize) -> Result<MatrixSpaceCensus> {
    check_players(n)?;
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("require 1 ≤ m ≤ n, got {m}")));
    }
    if n * m > 20 {
        return Err(Error::SizeLimit(format!(
            "scan of 2^{} matrices refused",
            n * m
        )));
    }
    let per_col = 1u64 << n;
    let total = per_col.pow(m as u32);
    let mut census = MatrixSpaceCensus {
        n,
        m,
        solvable: 0,
        nonzero: 0,
        positive: 0,
        per_support: BTreeMap::new(),
    };
    let mut cols = vec![0u32; m];
    for code in 0..total {
        let mut c = code;
        for col in cols.iter_mut() {
            *col = (c % per_col) as u32;
            c /= per_col;
        }
        if let IntSolve::Unique(fracs) = solve_ones_masks(n, &cols) {
            census.solvable += 1;
            let mut support = 0u32;
            let mut positive = true;
            for (j, &(num, _)) in fracs.iter().enumerate() {
                if num != 0 {
                    support |= 1 << j;
                }
                if num <= 0 {
                    positive = false;
                }
            }
            *census.per_support.entry(support).or_insert(0) += 1;
            if support == (1u32 << m) - 1 {
                census.nonzero += 1;
            }
            if positive {
                census.positive += 1;
            }
        }
    }
    Ok(census)
}

/// Census of minimal balanced collections made of two-element coalitions:
/// graphs whose components are single edges or odd cycles covering every
/// vertex, keyed by the multiset of component sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoElementCensus {
    pub n: usize,
    pub by_shape: BTreeMap<String, u64>,
    pub total: u64,
}

/// Counts via the partition formula: distribute the vertices into blocks of
/// size 2 (edges) and odd sizes ≥ 3 (cycles, `(k-1)!/2` per block).
pub fn enumerate_two_element(n: usize) -> Result<TwoElementCensus> {
    if !(2..=9).contains(&n) {
        return Err(Error::SizeLimit(format!(
            "two-element census supported for 2 ≤ n ≤ 9, got {n}"
        )));
    }
    let mut by_shape = BTreeMap::new();
    let mut parts: Vec<usize> = Vec::new();
    partition_rec(n, 2, &mut parts, &mut by_shape);
    let total = by_shape.values().sum();
    Ok(TwoElementCensus { n, by_shape, total })
}

fn partition_rec(
    remaining: usize,
    min_part: usize,
    parts: &mut Vec<usize>,
    out: &mut BTreeMap<String, u64>,
) {
    if remaining == 0 {
        out.insert(shape_key(parts), count_labeled_graphs(parts));
        return;
    }
    let mut part = min_part;
    while part <= remaining {
        if part == 2 || (part >= 3 && part % 2 == 1) {
            parts.push(part);
            partition_rec(remaining - part, part, parts, out);
            parts.pop();
        }
        part += 1;
    }
}

fn shape_key(parts: &[usize]) -> String {
    parts
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("+")
}

/// Labeled graphs with the given component-size multiset: the multinomial
/// split times one matching per edge block and `(k-1)!/2` cycles per k-block.
fn count_labeled_graphs(parts: &[usize]) -> u64 {
    let n: usize = parts.iter().sum();
    let mut count = factorial_u128(n);
    let mut run_length = 0u128;
    let mut prev = 0usize;
    for &p in parts {
        count /= factorial_u128(p);
        if p == prev {
            run_length += 1;
        } else {
            run_length = 1;
            prev = p;
        }
        count /= run_length;
        if p > 2 {
            count *= factorial_u128(p - 1) / 2;
        }
    }
    u64::try_from(count).expect("counts fit u64 for n ≤ 9")
}

fn factorial_u128(n: usize) -> u128 {
    (2..=n as u128).product::<u128>().max(1)
}

/// The same census derived from the actual search restricted to two-element
/// coalitions, classifying each collection's graph components directly.
pub fn enumerate_two_element_direct(n: usize) -> Result<TwoElementCensus> {
    check_players(n)?;
    if n > 9 {
        return Err(Error::SizeLimit(format!(
            "direct census capped at n = 9, got {n}"
        )));
    }
    let pair_masks: Vec<u32> = (1..1u32 << n).filter(|m| m.count_ones() == 2).collect();
    let items = search_items(n, Some(&pair_masks));
    let mut by_shape: BTreeMap<String, u64> = BTreeMap::new();
    for (c, _) in &items {
        let mut shape = component_shape(c);
        shape.sort_unstable();
        *by_shape.entry(shape_key(&shape)).or_insert(0) += 1;
    }
    let total = by_shape.values().sum();
    Ok(TwoElementCensus { n, by_shape, total })
}

/// Component sizes of the graph formed by two-element coalitions.
fn component_shape(c: &Collection) -> Vec<usize> {
    let n = c.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for &mask in c.masks() {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let (a, b) = (members[0], members[1]);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        *sizes.entry(r).or_insert(0) += 1;
    }
    sizes.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_search_counts() {
        for (n, expect) in [(1usize, 1u64), (2, 2), (3, 6), (4, 42)] {
            let r = enumerate_minimal(n, EnumerationMode::Search).unwrap();
            assert_eq!(r.len() as u64, expect, "n = {n}");
        }
    }

    #[test]
    fn n3_collections_explicit() {
        let r = enumerate_minimal(3, EnumerationMode::Search).unwrap();
        let masks: Vec<&[u32]> = r.items().iter().map(|(c, _)| c.masks()).collect();
        // Singleton partition, the three pair partitions, all three pairs,
        // and the grand coalition.
        let expected: Vec<Vec<u32>> = vec![
            vec![0b111],
            vec![0b001, 0b110],
            vec![0b010, 0b101],
            vec![0b011, 0b100],
            vec![0b001, 0b010, 0b100],
            vec![0b011, 0b101, 0b110],
        ];
        assert_eq!(masks.len(), 6);
        for e in &expected {
            assert!(masks.iter().any(|m| m == &e.as_slice()), "missing {e:?}");
        }
        // Every emitted weight vector is strictly positive and exact.
        for (c, w) in r.items() {
            assert!(w.is_strictly_positive());
            assert!(c
                .matrix()
                .to_qmatrix()
                .mul_vec(w.coords())
                .iter()
                .all(num_traits::One::is_one));
        }
    }

    #[test]
    fn modes_agree_small() {
        for n in 1..=4usize {
            let a = enumerate_minimal(n, EnumerationMode::Search).unwrap();
            let b = enumerate_minimal(n, EnumerationMode::LambdaRoute).unwrap();
            assert_eq!(a.checksum(), b.checksum(), "n = {n}");
            assert_eq!(a.ordered_digest(), b.ordered_digest(), "n = {n}");
            assert_eq!(a.items(), b.items(), "n = {n}");
        }
    }

    #[test]
    fn oracle_agrees_small() {
        for n in 1..=4usize {
            let a = enumerate_minimal(n, EnumerationMode::Search).unwrap();
            let b = bruteforce_oracle_enumerate(n).unwrap();
            assert_eq!(a.items(), b.items(), "n = {n}");
        }
    }

    #[test]
    fn streaming_matches_in_memory() {
        let mut collected = Vec::new();
        let summary = enumerate_minimal_streaming(4, &mut |c, w| {
            collected.push((c.clone(), w.clone()));
            Ok(())
        })
        .unwrap();
        assert_eq!(summary.total, 42);
        let in_memory = enumerate_minimal(4, EnumerationMode::Search).unwrap();
        assert_eq!(summary.checksum, in_memory.checksum());
        assert_eq!(summary.per_m, in_memory.per_m_counts());
    }

    #[test]
    fn jsonl_round_trip() {
        let r = enumerate_minimal(3, EnumerationMode::Search).unwrap();
        let mut buf = Vec::new();
        r.write_jsonl(&mut buf).unwrap();
        let back = EnumerationResult::read_jsonl(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn harvested_classes() {
        let r = enumerate_minimal(3, EnumerationMode::Search).unwrap();
        let l2 = r.harvest_lambda(2);
        assert_eq!(l2.len(), 1);
        let l3 = r.harvest_lambda(3);
        assert_eq!(l3.len(), 2);
    }

    #[test]
    fn scan_small_spaces() {
        let c22 = scan_matrix_space(2, 2).unwrap();
        assert_eq!(c22.positive, 2);
        assert_eq!(c22.nonzero, 2);
        let c33 = scan_matrix_space(3, 3).unwrap();
        assert_eq!(c33.positive, 12);
        let c32 = scan_matrix_space(3, 2).unwrap();
        assert_eq!(c32.positive, 6);
    }

    #[test]
    fn two_element_table() {
        let expects = [(3usize, 1u64), (4, 3), (5, 22), (6, 25)];
        for (n, expect) in expects {
            let census = enumerate_two_element(n).unwrap();
            assert_eq!(census.total, expect, "n = {n}");
            let direct = enumerate_two_element_direct(n).unwrap();
            assert_eq!(census, direct, "n = {n}");
        }
        // Shape breakdown at n = 5: twelve 5-cycles, ten triangle-plus-edge.
        let c5 = enumerate_two_element(5).unwrap();
        assert_eq!(c5.by_shape.get("5"), Some(&12));
        assert_eq!(c5.by_shape.get("2+3"), Some(&10));
    }

    #[test]
    fn two_element_brute_force_n7() {
        // Independent third route at n = 7: scan all 2^21 edge subsets of the
        // complete graph and classify components directly.
        let n = 7usize;
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .collect();
        let mut total = 0u64;
        for code in 0u32..1 << pairs.len() {
            let mut degree = [0u8; 7];
            let mut adj = [[false; 7]; 7];
            for (idx, &(a, b)) in pairs.iter().enumerate() {
                if code >> idx & 1 == 1 {
                    degree[a] += 1;
                    degree[b] += 1;
                    adj[a][b] = true;
                    adj[b][a] = true;
                }
            }
            // Components must be single edges (both endpoints degree 1) or
            // odd cycles (every vertex degree 2, odd length).
            if degree.iter().any(|&d| d == 0 || d > 2) {
                continue;
            }
            let mut seen = [false; 7];
            let mut ok = true;
            for start in 0..n {
                if seen[start] {
                    continue;
                }
                let mut stack = vec![start];
                let mut verts = Vec::new();
                seen[start] = true;
                while let Some(v) = stack.pop() {
                    verts.push(v);
                    for u in 0..n {
                        if adj[v][u] && !seen[u] {
                            seen[u] = true;
                            stack.push(u);
                        }
                    }
                }
                let edges: usize = verts
                    .iter()
                    .map(|&v| (0..n).filter(|&u| adj[v][u]).count())
                    .sum::<usize>()
                    / 2;
                let all_deg1 = verts.iter().all(|&v| degree[v] == 1);
                let all_deg2 = verts.iter().all(|&v| degree[v] == 2);
                let is_edge = verts.len() == 2 && edges == 1 && all_deg1;
                let is_odd_cycle =
                    verts.len() >= 3 && verts.len() % 2 == 1 && edges == verts.len() && all_deg2;
                if !(is_edge || is_odd_cycle) {
                    ok = false;
                    break;
                }
            }
            if ok {
                total += 1;
            }
        }
        let formula = enumerate_two_element(7).unwrap();
        assert_eq!(formula.total, total, "partition formula vs graph scan");
        let direct = enumerate_two_element_direct(7).unwrap();
        assert_eq!(direct.total, total, "restricted search vs graph scan");
    }

    #[test]
    fn counts_match_formula_route() {
        let mut store = LambdaStore::in_memory();
        for n in 1..=5usize {
            let r = enumerate_minimal(n, EnumerationMode::Search).unwrap();
            for m in 1..=n {
                let fm = crate::counting::count_b(n, m, &mut store).unwrap();
                assert_eq!(BigInt::from(r.count_for_m(m)), fm, "(n, m) = ({n}, {m})");
            }
        }
    }
}
