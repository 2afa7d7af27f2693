//! Verification driver: recomputes against the embedded reference data and
//! reports machine-readable diffs.

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, ValueEnum};
use minbal::counting;
use minbal::enumerate;
use minbal::golden;
use minbal::weights::LambdaStore;
use num_bigint::BigInt;
use rand::SeedableRng;
use serde::Serialize;

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Largest ground-set size (or vector length) to verify.
    #[arg(long, default_value_t = 6)]
    max_n: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Tables,
    Formulas,
    Bounds,
    Orbits,
    Lambda,
    TwoElement,
    Games,
}

#[derive(Serialize)]
struct SuiteReport {
    suite: String,
    max_n: usize,
    pass: bool,
    diffs: Vec<Diff>,
}

#[derive(Serialize)]
struct Diff {
    check: String,
    n: usize,
    m: Option<usize>,
    expected: String,
    computed: String,
}

struct Recorder {
    diffs: Vec<Diff>,
    pretty: bool,
}

impl Recorder {
    fn check(&mut self, check: &str, n: usize, m: Option<usize>, expected: &str, computed: &str) {
        let ok = expected == computed;
        if self.pretty {
            let mm = m.map_or(String::new(), |m| format!(", m={m}"));
            eprintln!(
                "{} {check} (n={n}{mm}): expected {expected}, computed {computed}",
                if ok { "ok  " } else { "FAIL" }
            );
        }
        if !ok {
            self.diffs.push(Diff {
                check: check.to_string(),
                n,
                m,
                expected: expected.to_string(),
                computed: computed.to_string(),
            });
        }
    }

    fn condition(&mut self, check: &str, n: usize, m: Option<usize>, detail: &str, holds: bool) {
        self.check(check, n, m, "holds", if holds { "holds" } else { detail });
    }
}

pub fn run(cache: &Path, pretty: bool, args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let mut store = LambdaStore::with_dir(cache.to_path_buf());
    let mut rec = Recorder {
        diffs: Vec::new(),
        pretty,
    };
    let name = match args.suite {
        Suite::Tables => {
            suite_tables(args.max_n, &mut store, &mut rec)?;
            "tables"
        }
        Suite::Formulas => {
            suite_formulas(args.max_n, &mut store, &mut rec)?;
            "formulas"
        }
        Suite::Bounds => {
            suite_bounds(args.max_n, &mut store, &mut rec)?;
            "bounds"
        }
        Suite::Orbits => {
            suite_orbits(args.max_n, &mut rec)?;
            "orbits"
        }
        Suite::Lambda => {
            suite_lambda(args.max_n, &mut store, &mut rec)?;
            "lambda"
        }
        Suite::TwoElement => {
            suite_two_element(args.max_n, &mut rec)?;
            "two-element"
        }
        Suite::Games => {
            suite_games(args.max_n, &mut rec)?;
            "games"
        }
    };
    let report = SuiteReport {
        suite: name.to_string(),
        max_n: args.max_n,
        pass: rec.diffs.is_empty(),
        diffs: rec.diffs,
    };
    println!("{}", serde_json::to_string(&report)?);
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn suite_tables(max_n: usize, store: &mut LambdaStore, rec: &mut Recorder) -> anyhow::Result<()> {
    for n in 1..=max_n.min(6) {
        for m in 1..=n {
            let reference = golden::per_size(n, m).unwrap();
            let computed = counting::count_b(n, m, store)?;
            rec.check(
                "per-size count",
                n,
                Some(m),
                &reference.to_string(),
                &computed.to_string(),
            );
        }
        let total = counting::count_b_total(n, store)?;
        rec.check(
            "total count",
            n,
            None,
            &golden::total(n).unwrap().to_string(),
            &total.total.to_string(),
        );
    }
    if max_n >= 7 {
        eprintln!("# n = 7 runs the full m = 7 class generation; this takes a while");
        let total = counting::count_b_total(7, store)?;
        rec.check(
            "total count",
            7,
            None,
            &golden::total(7).unwrap().to_string(),
            &total.total.to_string(),
        );
    }
    Ok(())
}

fn suite_formulas(max_n: usize, store: &mut LambdaStore, rec: &mut Recorder) -> anyhow::Result<()> {
    let hi = max_n.clamp(4, 10);
    for m in 1..=4usize {
        for n in m..=hi {
            let cf = counting::closed_form(n, m)?;
            let cb = counting::count_b(n, m, store)?;
            rec.check("closed form", n, Some(m), &cb.to_string(), &cf.to_string());
        }
    }
    Ok(())
}

fn suite_bounds(max_n: usize, store: &mut LambdaStore, rec: &mut Recorder) -> anyhow::Result<()> {
    for n in 3..=max_n.min(7) {
        let b_n = if n <= 6 {
            counting::count_b_total(n, store)?.total
        } else {
            BigInt::from(golden::total(7).unwrap())
        };
        let report = counting::theorem1_bounds(n, &b_n)?;
        rec.condition(
            "two-sided bound",
            n,
            None,
            &format!("{} < {} < {}", report.lower, report.b_n, report.upper),
            report.holds(),
        );
    }
    let mut censuses = Vec::new();
    for n in 2..=max_n.min(4) {
        for m in 1..=n {
            censuses.push(enumerate::scan_matrix_space(n, m)?);
        }
    }
    for check in counting::bound_lemma_checks(&censuses) {
        rec.condition(
            &format!("lemma {}", check.name),
            check.n,
            Some(check.m),
            &format!("{} vs {}", check.lhs, check.rhs),
            check.holds,
        );
    }
    Ok(())
}

fn suite_orbits(max_n: usize, rec: &mut Recorder) -> anyhow::Result<()> {
    use minbal::model::ZeroOneMatrix;
    use minbal::orbits::{f2_lift, nonzero_weights, orbit_summary, random_f2_ones_matrix};
    for n in 2..=max_n.min(4) {
        for m in 1..=n {
            let per_col = 1u64 << n;
            let mut ok = true;
            let mut cols = vec![0u32; m];
            for code in 0..per_col.pow(m as u32) {
                let mut c = code;
                for col in cols.iter_mut() {
                    *col = (c % per_col) as u32;
                    c /= per_col;
                }
                if cols.contains(&0) {
                    continue;
                }
                let matrix = ZeroOneMatrix::new(n, cols.clone())?;
                if nonzero_weights(&matrix).is_err() {
                    continue;
                }
                let s = orbit_summary(&matrix, false)?;
                if s.size_nonzero != (1u64 << m) - s.unificator_count {
                    ok = false;
                }
                if m >= 2 && s.size_positive != 2 {
                    ok = false;
                }
            }
            rec.condition("orbit sizes (exhaustive)", n, Some(m), "violated", ok);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for n in [5usize, 6] {
        if n > max_n {
            continue;
        }
        let mut ok = true;
        for _ in 0..500 {
            let lifted = f2_lift(n, &random_f2_ones_matrix(n, &mut rng))?;
            let s = orbit_summary(&lifted, false)?;
            if s.size_positive != 2 || s.size_nonzero != (1u64 << n) - s.unificator_count {
                ok = false;
            }
        }
        rec.condition("orbit sizes (random lifts)", n, None, "violated", ok);
    }
    Ok(())
}

fn suite_lambda(max_n: usize, store: &mut LambdaStore, rec: &mut Recorder) -> anyhow::Result<()> {
    for m in 1..=max_n.min(5) {
        let generated = store.get(m)?;
        let oracle = minbal::weights::lambda_bruteforce_oracle(m)?;
        rec.check(
            "class count vs oracle",
            m,
            None,
            &oracle.len().to_string(),
            &generated.len().to_string(),
        );
        rec.condition(
            "class set vs oracle",
            m,
            None,
            "differs",
            generated == oracle,
        );
    }
    for m in 1..=max_n.min(6) {
        let generated = store.get(m)?;
        let mut min_u = usize::MAX;
        let mut max_u = 0usize;
        let mut antichain = true;
        for class in generated.classes() {
            let u = minbal::weights::unificators(&class.representative())?;
            min_u = min_u.min(u.len());
            max_u = max_u.max(u.len());
            antichain &= u.is_antichain();
        }
        let expect_max = usize::try_from(minbal::exact::binomial(m, m.div_ceil(2))).unwrap();
        rec.check(
            "minimum unificator count",
            m,
            None,
            &m.to_string(),
            &min_u.to_string(),
        );
        rec.check(
            "maximum unificator count",
            m,
            None,
            &expect_max.to_string(),
            &max_u.to_string(),
        );
        rec.condition("antichain", m, None, "inclusion found", antichain);
    }
    Ok(())
}

fn suite_two_element(max_n: usize, rec: &mut Recorder) -> anyhow::Result<()> {
    for n in 3..=max_n.min(7) {
        let census = enumerate::enumerate_two_element(n)?;
        let direct = enumerate::enumerate_two_element_direct(n)?;
        rec.check(
            "formula vs direct census",
            n,
            None,
            &direct.total.to_string(),
            &census.total.to_string(),
        );
        rec.check(
            "census vs reference",
            n,
            None,
            &golden::two_element(n).unwrap().to_string(),
            &census.total.to_string(),
        );
    }
    Ok(())
}

fn suite_games(max_n: usize, rec: &mut Recorder) -> anyhow::Result<()> {
    use minbal::games::{core_nonempty_bondareva, core_nonempty_lp, majority_game, random_game};
    for n in 3..=max_n.min(5) {
        let mbcs = enumerate::enumerate_minimal(n, enumerate::EnumerationMode::Search)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(500 + n as u64);
        let mut agreements = 0u32;
        let rounds = 200;
        for i in 0..rounds {
            let g = random_game(n, &mut rng);
            let g = if i % 4 == 0 {
                g.superadditive_cover()
            } else {
                g
            };
            let a = core_nonempty_bondareva(&g, &mbcs)?;
            let b = core_nonempty_lp(&g)?;
            if a.nonempty == b.nonempty && a.verify(&g) && b.verify(&g) {
                agreements += 1;
            }
        }
        rec.check(
            "criterion agreement on random games",
            n,
            None,
            &rounds.to_string(),
            &agreements.to_string(),
        );
    }
    let boundary = majority_game(minbal::exact::qr(3, 2));
    let report = core_nonempty_lp(&boundary)?;
    rec.condition(
        "majority boundary game",
        3,
        None,
        "empty core",
        report.nonempty,
    );
    Ok(())
}
