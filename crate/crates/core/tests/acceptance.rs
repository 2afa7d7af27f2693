//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Heavy fixtures (full enumerations, the weight-class store) are computed
//! once and shared. Extended hours-scale runs are `#[ignore]`d; run them with
//! `cargo test --release -p minbal --test acceptance -- --ignored`.

use std::collections::BTreeSet;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use minbal::counting::{alpha_constant, closed_form, count_b, count_b_total, theorem1_bounds};
use minbal::enumerate::{
    bruteforce_oracle_enumerate, enumerate_minimal, enumerate_two_element,
    enumerate_two_element_direct, scan_matrix_space, EnumerationMode, EnumerationResult,
};
use minbal::exact::{qr, rank_q, solve_ones, Rational, SolveOutcome};
use minbal::games::{core_nonempty_bondareva, core_nonempty_lp, majority_game, random_game};
use minbal::golden;
use minbal::model::{
    definition_minimality_oracle, minimality_certificate, CertificateKind, Collection,
    ZeroOneMatrix,
};
use minbal::orbits::{
    apply_inversion, f2_lift, nonzero_weights, orbit_summary, random_f2_ones_matrix,
    transformed_weights, InversionElement, TransformedWeights,
};
use minbal::weights::{
    generate_lambda, lambda_bruteforce_oracle, unificators, LambdaStore, WeightVector,
};

fn search(n: usize) -> &'static EnumerationResult {
    static CACHE: [OnceLock<EnumerationResult>; 7] = [const { OnceLock::new() }; 7];
    CACHE[n].get_or_init(|| {
        let t = Instant::now();
        let r = enumerate_minimal(n, EnumerationMode::Search).expect("search within bounds");
        eprintln!(
            "[fixture] search n={n}: {} collections in {:?}",
            r.len(),
            t.elapsed()
        );
        r
    })
}

fn route(n: usize) -> &'static EnumerationResult {
    static CACHE: [OnceLock<EnumerationResult>; 7] = [const { OnceLock::new() }; 7];
    CACHE[n].get_or_init(|| {
        let t = Instant::now();
        let r = enumerate_minimal(n, EnumerationMode::LambdaRoute).expect("route within bounds");
        eprintln!(
            "[fixture] lambda-route n={n}: {} collections in {:?}",
            r.len(),
            t.elapsed()
        );
        r
    })
}

fn store() -> &'static Mutex<LambdaStore> {
    static STORE: OnceLock<Mutex<LambdaStore>> = OnceLock::new();
    STORE.get_or_init(|| Mutex::new(LambdaStore::in_memory()))
}

fn pass(criterion: &str, detail: &str) {
    println!("acceptance {criterion}: PASS ({detail})");
}

fn fail(criterion: &str, detail: &str) -> ! {
    println!("acceptance {criterion}: FAIL ({detail})");
    panic!("acceptance {criterion} failed: {detail}");
}

#[test]
fn criterion_01_per_size_counts_both_routes() {
    let t = Instant::now();
    let mut store = store().lock().unwrap();
    for n in 1..=6usize {
        for m in 1..=n {
            let expect = BigInt::from(golden::per_size(n, m).unwrap());
            let formula = count_b(n, m, &mut store).unwrap();
            if formula != expect {
                fail(
                    "criterion 1 (per-size counts)",
                    &format!("formula B({n},{m}) = {formula}, reference {expect}"),
                );
            }
        }
    }
    drop(store);
    for n in 1..=6usize {
        let enumerated = search(n);
        let routed = route(n);
        for m in 1..=n {
            let expect = golden::per_size(n, m).unwrap();
            if enumerated.count_for_m(m) != expect {
                fail(
                    "criterion 1 (per-size counts)",
                    &format!(
                        "search B({n},{m}) = {}, reference {expect}",
                        enumerated.count_for_m(m)
                    ),
                );
            }
            if routed.count_for_m(m) != expect {
                fail(
                    "criterion 1 (per-size counts)",
                    &format!(
                        "lambda-route B({n},{m}) = {}, reference {expect}",
                        routed.count_for_m(m)
                    ),
                );
            }
        }
        // The two engines must produce identical canonical streams.
        if enumerated.checksum() != routed.checksum()
            || enumerated.ordered_digest() != routed.ordered_digest()
        {
            fail(
                "criterion 1 (per-size counts)",
                &format!("engine checksums disagree at n = {n}"),
            );
        }
    }
    pass(
        "criterion 1 (per-size counts, formula and enumeration)",
        &format!("n ≤ 6 exact on both routes in {:?}", t.elapsed()),
    );
}

#[test]
fn criterion_02_totals() {
    let mut store = store().lock().unwrap();
    for n in 1..=6usize {
        let table = count_b_total(n, &mut store).unwrap();
        let expect = BigInt::from(golden::total(n).unwrap());
        if table.total != expect {
            fail(
                "criterion 2 (totals)",
                &format!("computed B_{n} = {}, reference {expect}", table.total),
            );
        }
    }
    pass(
        "criterion 2 (totals n ≤ 6)",
        "exact match; n = 7 in the extended run",
    );
}

#[test]
#[ignore = "extended: builds the m = 7 weight classes; about three minutes on one core"]
fn criterion_02_extended_total_n7() {
    let t = Instant::now();
    let mut store = store().lock().unwrap();
    let table = count_b_total(7, &mut store).unwrap();
    let expect = BigInt::from(golden::total(7).unwrap());
    if table.total != expect {
        fail(
            "criterion 2 extended (B_7)",
            &format!("computed {}, reference {expect}", table.total),
        );
    }
    pass(
        "criterion 2 extended (B_7 via the formula route)",
        &format!("132422036 exact in {:?}", t.elapsed()),
    );
}

#[test]
fn criterion_03_closed_forms() {
    let mut store = store().lock().unwrap();
    for m in 1..=4usize {
        for n in m..=10usize {
            let cf = closed_form(n, m).unwrap();
            let cb = count_b(n, m, &mut store).unwrap();
            if cf != cb {
                fail(
                    "criterion 3 (closed forms)",
                    &format!("closed_form({n},{m}) = {cf} but count = {cb}"),
                );
            }
        }
    }
    pass("criterion 3 (closed forms m ≤ 4, n ≤ 10)", "exact equality");
}

#[test]
fn criterion_04_theorem_bounds() {
    let mut store = store().lock().unwrap();
    for n in 3..=7usize {
        let b_n = if n <= 6 {
            count_b_total(n, &mut store).unwrap().total
        } else {
            BigInt::from(golden::total(7).unwrap())
        };
        let report = theorem1_bounds(n, &b_n).unwrap();
        if !report.holds() {
            fail(
                "criterion 4 (two-sided bounds)",
                &format!(
                    "n = {n}: {} < {} < {} violated",
                    report.lower, report.b_n, report.upper
                ),
            );
        }
    }
    pass(
        "criterion 4 (two-sided bounds n = 3..7)",
        "strict inequalities hold",
    );
}

#[test]
fn criterion_05_oracle_equivalence() {
    let t = Instant::now();
    let mut checked = 0u64;
    for n in 1..=4usize {
        let masks: Vec<u32> = (1..1u32 << n).collect();
        let cap = (n + 1).min(masks.len());
        let mut chosen: Vec<u32> = Vec::new();
        fn rec(
            masks: &[u32],
            cap: usize,
            start: usize,
            chosen: &mut Vec<u32>,
            n: usize,
            checked: &mut u64,
        ) {
            if !chosen.is_empty() {
                let c = Collection::new(n, chosen.clone()).unwrap();
                let fast = minimality_certificate(&c).kind == CertificateKind::MinimalBalanced;
                let slow = definition_minimality_oracle(&c).unwrap();
                assert_eq!(fast, slow, "disagreement on n = {n}, masks {:?}", c.masks());
                *checked += 1;
            }
            if chosen.len() == cap {
                return;
            }
            for i in start..masks.len() {
                chosen.push(masks[i]);
                rec(masks, cap, i + 1, chosen, n, checked);
                chosen.pop();
            }
        }
        rec(&masks, cap, 0, &mut chosen, n, &mut checked);
    }
    pass(
        "criterion 5 (matrix test vs definition oracle)",
        &format!(
            "{checked} collections, zero disagreements, {:?}",
            t.elapsed()
        ),
    );
}

#[test]
fn criterion_06_lambda_validation() {
    let t = Instant::now();
    let mut store = LambdaStore::in_memory();
    for m in 1..=5usize {
        let generated = generate_lambda(m, &mut store).unwrap();
        let oracle = lambda_bruteforce_oracle(m).unwrap();
        if generated != oracle {
            fail(
                "criterion 6 (weight-class validation)",
                &format!(
                    "m = {m}: generator found {} classes, oracle {}",
                    generated.len(),
                    oracle.len()
                ),
            );
        }
    }
    for n in [5usize, 6] {
        let result = search(n);
        for m in 1..=n.min(6) {
            let harvested = result.harvest_lambda(m);
            let generated = generate_lambda(m, &mut store).unwrap();
            for class in harvested.classes() {
                if !generated.contains_class_of(class.canonical()) {
                    fail(
                        "criterion 6 (weight-class validation)",
                        &format!(
                            "harvested class {:?} at (n,m)=({n},{m}) missing from generator",
                            class
                                .canonical()
                                .iter()
                                .map(|r| r.to_string())
                                .collect::<Vec<_>>()
                        ),
                    );
                }
            }
        }
    }
    pass(
        "criterion 6 (generator = oracle m ≤ 5; harvested ⊆ generated m ≤ 6)",
        &format!("{:?}", t.elapsed()),
    );
}

#[test]
fn criterion_07_unificator_extremes_and_antichain() {
    let mut store = LambdaStore::in_memory();
    for m in 1..=6usize {
        let lam = generate_lambda(m, &mut store).unwrap();
        let mut min_u = usize::MAX;
        let mut max_u = 0usize;
        for class in lam.classes() {
            let u = unificators(&class.representative()).unwrap();
            min_u = min_u.min(u.len());
            max_u = max_u.max(u.len());
            if !u.is_antichain() {
                fail(
                    "criterion 7 (unificator structure)",
                    &format!("inclusion inside U for class {:?}", class.canonical()),
                );
            }
            if u.rank() != m {
                fail(
                    "criterion 7 (unificator structure)",
                    &format!("rank {} ≠ {m}", u.rank()),
                );
            }
        }
        let expected_max = usize::try_from(minbal::exact::binomial(m, m.div_ceil(2))).unwrap();
        if min_u != m || max_u != expected_max {
            fail(
                "criterion 7 (unificator structure)",
                &format!(
                    "m = {m}: min |U| = {min_u} (want {m}), max = {max_u} (want {expected_max})"
                ),
            );
        }
    }
    pass(
        "criterion 7 (unificator extremes and antichain, m ≤ 6)",
        "min = m, max = central binomial, inclusion-free",
    );
}

/// Checks the three orbit laws for one matrix known to lie in I^{≠0}.
fn check_orbit_laws(matrix: &ZeroOneMatrix, check_transport: bool) {
    let lambda = nonzero_weights(matrix).expect("matrix must lie in the nonzero class");
    let m = matrix.m();
    let summary = orbit_summary(matrix, false).unwrap();
    let u = unificators(&lambda).unwrap();
    assert_eq!(
        summary.size_nonzero,
        (1u64 << m) - u.len() as u64,
        "nonzero orbit size law"
    );
    if m >= 2 {
        assert_eq!(summary.size_positive, 2, "positive orbit size law");
    }
    if !check_transport {
        return;
    }
    for inv in 0..1u32 << m {
        let element = InversionElement(inv);
        let inverted = apply_inversion(matrix, element);
        let direct = solve_ones(&inverted.to_qmatrix());
        match transformed_weights(matrix, element).unwrap() {
            TransformedWeights::Weights(w) => {
                // Full rank is part of the law; the direct solution must agree.
                assert_eq!(
                    direct,
                    SolveOutcome::Unique(w.coords().to_vec()),
                    "transport must match the direct solve"
                );
                let s = lambda.dot_mask(inv);
                let flip_on_i = s < Rational::one();
                for i in 0..m {
                    let flipped = w.coords()[i].is_positive() != lambda.coords()[i].is_positive();
                    let expected = if flip_on_i {
                        inv >> i & 1 == 1
                    } else {
                        inv >> i & 1 == 0
                    };
                    assert_eq!(flipped, expected, "sign-flip pattern at index {i}");
                }
            }
            TransformedWeights::RankCollapse => {
                assert!(
                    !matches!(direct, SolveOutcome::Unique(_)),
                    "collapsed inversion cannot have a unique solution"
                );
            }
        }
    }
}

#[test]
fn criterion_08_orbit_laws() {
    let t = Instant::now();
    // Exhaustive tier: every member of I^{≠0}_{n,m} for n ≤ 4.
    let mut exhaustive = 0u64;
    for n in 2..=4usize {
        for m in 1..=n {
            let census = scan_matrix_space(n, m).unwrap();
            let mut seen_nonzero = 0u64;
            let per_col = 1u64 << n;
            let total = per_col.pow(m as u32);
            let mut cols = vec![0u32; m];
            for code in 0..total {
                let mut c = code;
                for col in cols.iter_mut() {
                    *col = (c % per_col) as u32;
                    c /= per_col;
                }
                if cols.iter().any(|&c| c == 0) {
                    continue;
                }
                let Ok(matrix) = ZeroOneMatrix::new(n, cols.clone()) else {
                    continue;
                };
                if nonzero_weights(&matrix).is_err() {
                    continue;
                }
                seen_nonzero += 1;
                check_orbit_laws(&matrix, true);
                exhaustive += 1;
            }
            // Zero columns can never solve, so the census count must match.
            assert_eq!(seen_nonzero, census.nonzero, "census cross-check ({n},{m})");
        }
    }
    // Random tier: lifted full-rank matrices over the two-element field.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for n in [5usize, 6] {
        for i in 0..10_000u32 {
            let a = random_f2_ones_matrix(n, &mut rng);
            let lifted = f2_lift(n, &a).unwrap();
            // Full transport verification on a deterministic sample, size
            // laws on every draw.
            check_orbit_laws(&lifted, i % 100 == 0);
        }
    }
    pass(
        "criterion 8 (orbit laws)",
        &format!(
            "{exhaustive} exhaustive matrices (n ≤ 4) plus 2×10⁴ random lifts in {:?}",
            t.elapsed()
        ),
    );
}

#[test]
fn criterion_09_two_element_census() {
    // Formula route against the published column, cross-checked against the
    // general enumerator for n ≤ 6 and against the restricted search at n = 7.
    for n in 3..=6usize {
        let census = enumerate_two_element(n).unwrap();
        let direct = enumerate_two_element_direct(n).unwrap();
        if census != direct {
            fail(
                "criterion 9 (two-element census)",
                &format!("formula and direct censuses disagree at n = {n}"),
            );
        }
        let filtered = search(n)
            .items()
            .iter()
            .filter(|(c, _)| c.coalitions().all(|co| co.size() == 2))
            .count() as u64;
        if census.total != filtered {
            fail(
                "criterion 9 (two-element census)",
                &format!(
                    "n = {n}: census {} vs general enumerator {filtered}",
                    census.total
                ),
            );
        }
        let expect = golden::two_element(n).unwrap();
        if census.total != expect {
            fail(
                "criterion 9 (two-element census)",
                &format!("n = {n}: computed {}, reference {expect}", census.total),
            );
        }
    }
    // n = 7: the published reference says 712; the partition formula, the
    // restricted search, and an edge-subset scan all give 717.
    let census7 = enumerate_two_element(7).unwrap();
    let direct7 = enumerate_two_element_direct(7).unwrap();
    assert_eq!(
        census7.total, direct7.total,
        "independent n = 7 routes agree"
    );
    let expect7 = golden::two_element(7).unwrap();
    if census7.total != expect7 {
        println!(
            "acceptance criterion 9 analysis: computed n = 7 total {} as {:?}; \
             the restricted general enumerator independently gives {}; the published \
             reference value {expect7} does not match any computed route and appears \
             to be a typo (the n ≤ 6 column reproduces exactly).",
            census7.total, census7.by_shape, direct7.total
        );
        fail(
            "criterion 9 (two-element census)",
            &format!(
                "n = 7: computed {} (three agreeing routes), reference {expect7}",
                census7.total
            ),
        );
    }
    pass(
        "criterion 9 (two-element census)",
        "totals match the reference column",
    );
}

#[test]
fn criterion_10_core_test_agreement() {
    let t = Instant::now();
    let mut disagreements = 0u64;
    for n in [3usize, 4, 5] {
        let mbcs = search(n);
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + n as u64);
        for i in 0..1000u32 {
            let g = random_game(n, &mut rng);
            // Every fifth game is superadditively normalized to exercise the
            // feasible path as well.
            let g = if i % 5 == 0 {
                g.superadditive_cover()
            } else {
                g
            };
            let a = core_nonempty_bondareva(&g, mbcs).unwrap();
            let b = core_nonempty_lp(&g).unwrap();
            if a.nonempty != b.nonempty || !a.verify(&g) || !b.verify(&g) {
                disagreements += 1;
            }
        }
    }
    // The boundary family: empty core strictly below worth 3/2.
    for (grand, expect_nonempty) in [
        (qr(1, 1), false),
        (qr(5, 4), false),
        (qr(149, 100), false),
        (qr(3, 2), true),
        (qr(2, 1), true),
    ] {
        let g = majority_game(grand.clone());
        let a = core_nonempty_bondareva(&g, search(3)).unwrap();
        let b = core_nonempty_lp(&g).unwrap();
        if a.nonempty != expect_nonempty || b.nonempty != expect_nonempty {
            fail(
                "criterion 10 (core-test agreement)",
                &format!("majority game with grand worth {grand} misclassified"),
            );
        }
    }
    if disagreements > 0 {
        fail(
            "criterion 10 (core-test agreement)",
            &format!("{disagreements} disagreements on random games"),
        );
    }
    pass(
        "criterion 10 (core-test agreement)",
        &format!(
            "3×10³ random games plus the boundary family in {:?}",
            t.elapsed()
        ),
    );
}

#[test]
fn criterion_11_alpha_constant() {
    let a60 = alpha_constant(60);
    if a60 <= qr(2887, 10000) || a60 >= qr(2889, 10000) {
        fail(
            "criterion 11 (alpha constant)",
            &format!("60-term partial product {a60} outside [0.2887, 0.2889]"),
        );
    }
    let mut prev = Rational::one();
    for t in 1..=60 {
        let a = alpha_constant(t);
        if a >= prev {
            fail(
                "criterion 11 (alpha constant)",
                &format!("partial products not strictly decreasing at {t} terms"),
            );
        }
        prev = a;
    }
    pass(
        "criterion 11 (alpha constant)",
        "within bounds and monotone",
    );
}

// ---- extended (opt-in) tier -------------------------------------------------

#[test]
#[ignore = "extended: full definition-based oracle at n = 5 (about half a minute)"]
fn extended_definition_oracle_n5() {
    let oracle = bruteforce_oracle_enumerate(5).unwrap();
    let searched = search(5);
    assert_eq!(oracle.items(), searched.items());
    pass("extended (definition oracle n = 5)", "streams identical");
}

#[test]
#[ignore = "extended: n-independence of harvested weight classes at n = 5, 6"]
fn extended_harvest_equality() {
    let mut store = LambdaStore::in_memory();
    for n in [5usize, 6] {
        for m in 1..=n.min(6) {
            let harvested: BTreeSet<Vec<Rational>> = search(n)
                .harvest_lambda(m)
                .classes()
                .iter()
                .map(|c| c.canonical().to_vec())
                .collect();
            let generated: BTreeSet<Vec<Rational>> = generate_lambda(m, &mut store)
                .unwrap()
                .classes()
                .iter()
                .map(|c| c.canonical().to_vec())
                .collect();
            assert_eq!(harvested, generated, "(n, m) = ({n}, {m})");
        }
    }
    pass(
        "extended (harvest equality)",
        "harvested classes equal generated classes",
    );
}

// ---- supporting module invariants at acceptance scale ----------------------

#[test]
fn invariant_bound_lemmas_on_scans() {
    let mut censuses = Vec::new();
    for n in 2..=4usize {
        for m in 1..=n {
            censuses.push(scan_matrix_space(n, m).unwrap());
        }
    }
    let checks = minbal::counting::bound_lemma_checks(&censuses);
    for c in &checks {
        assert!(
            c.holds,
            "bound check {} failed at (n, m) = ({}, {}): {} vs {}",
            c.name, c.n, c.m, c.lhs, c.rhs
        );
    }
    // Scan counts also reproduce the small collection counts: positive / m!.
    let mut store = store().lock().unwrap();
    for n in 2..=4usize {
        for m in 1..=n {
            let census = scan_matrix_space(n, m).unwrap();
            let fact = u64::try_from(minbal::exact::factorial(m)).unwrap();
            assert_eq!(
                BigInt::from(census.positive / fact),
                count_b(n, m, &mut store).unwrap()
            );
        }
    }
}

#[test]
fn invariant_rank_comparison_f2_vs_q() {
    // Independence over the two-element field implies independence over the
    // rationals: rank_f2 ≤ rank_q on random 0-1 matrices.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    use rand::Rng;
    for _ in 0..500 {
        let rows = rng.random_range(1..=8usize);
        let cols = rng.random_range(1..=8usize);
        let mut f2 = minbal::exact::F2Matrix::new(rows, cols);
        let mut q = minbal::exact::QMatrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if rng.random_bool(0.5) {
                    f2.set(i, j, true);
                    q[(i, j)] = Rational::one();
                }
            }
        }
        assert!(minbal::exact::rank_f2(&f2) <= rank_q(&q));
    }
}

#[test]
fn invariant_unique_weights_reproduce_ones() {
    // Every emitted weight vector multiplies back to the all-ones vector.
    for (c, w) in search(4).items() {
        let product = c.matrix().to_qmatrix().mul_vec(w.coords());
        assert!(product.iter().all(|v| v.is_one()));
        assert!(w.coords().iter().all(|v| v.is_positive()));
        assert!(c.len() <= c.n());
    }
}

#[test]
fn invariant_complement_pairs() {
    // {S, complement} is minimal balanced for every proper nonempty S.
    for n in 2..=6usize {
        let full = (1u32 << n) - 1;
        let mut count = 0u64;
        for s in 1..full {
            let t = full & !s;
            if s < t {
                let c = Collection::new(n, vec![s, t]).unwrap();
                assert_eq!(
                    minimality_certificate(&c).kind,
                    CertificateKind::MinimalBalanced
                );
                count += 1;
            }
        }
        assert_eq!(count, (1 << (n - 1)) - 1);
        assert_eq!(search(n).count_for_m(2), (1 << (n - 1)) - 1);
    }
}

#[test]
fn invariant_uniform_vectors_in_lambda() {
    for m in 2..=7usize {
        for k in 1..m {
            let v = WeightVector::new(vec![qr(1, k as i64); m]);
            assert!(minbal::weights::is_in_lambda(&v));
        }
    }
}
