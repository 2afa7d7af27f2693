//! `minbal` — exact computations on minimal balanced collections.
//!
//! Structured output is JSON on stdout; human-readable tables go to stderr
//! under `--pretty`. Exit codes: 0 success, 1 verification mismatch, 2 usage
//! error, 3 resource-limit refusal.

use std::io::{BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use minbal::enumerate::{enumerate_minimal, EnumerationMode};
use minbal::weights::LambdaStore;
use minbal::Error as CoreError;

mod verify;

#[derive(Parser)]
#[command(
    name = "minbal",
    version,
    about = "Exact enumeration, counting, and verification of minimal balanced collections"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Cache directory for weight-class sets.
    #[arg(long, global = true, default_value = "./cache")]
    cache: PathBuf,
    /// Also print human-readable tables to stderr.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count minimal balanced collections.
    Count(CountArgs),
    /// Enumerate minimal balanced collections (JSON lines).
    Enumerate(EnumerateArgs),
    /// Generate the weight-class set for one size.
    Lambda(LambdaArgs),
    /// Walk the column-inversion orbit of a matrix.
    Orbit(OrbitArgs),
    /// Test core nonemptiness of a TU game.
    Core(CoreArgs),
    /// Recompute and diff against the embedded reference data.
    Verify(verify::VerifyArgs),
    /// Time the counting and enumeration routes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CountArgs {
    /// Ground-set size.
    #[arg(long)]
    n: usize,
    /// Collection size; all of 1..=n when omitted.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_enum, default_value_t = CountMethod::Formula)]
    method: CountMethod,
    /// Emit the table as JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMethod {
    Formula,
    ClosedForm,
    Enumerate,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Ground-set size.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Mode::Search)]
    mode: Mode,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Census of two-element collections instead of a full enumeration.
    #[arg(long)]
    two_element: bool,
    /// Allow the hours-scale n = 7 streaming run.
    #[arg(long)]
    extended: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Search,
    LambdaRoute,
}

#[derive(Args)]
struct LambdaArgs {
    /// Vector length.
    #[arg(long)]
    m: usize,
}

#[derive(Args)]
struct OrbitArgs {
    /// Matrix JSON file ({"n":…, "columns":[[…]]}); "-" for stdin.
    #[arg(long)]
    matrix: String,
    /// Include the per-inversion classification.
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct CoreArgs {
    /// Game JSON file ({"n":…, "v":["0",…]}).
    #[arg(long)]
    game: PathBuf,
    /// Optional stored enumeration (JSON lines) to scan instead of the
    /// direct feasibility route.
    #[arg(long)]
    mbc: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Largest ground-set size to time.
    #[arg(long, default_value_t = 5)]
    max_n: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("failed to configure {jobs} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Count(args) => run_count(&cli, args),
        Command::Enumerate(args) => run_enumerate(&cli, args),
        Command::Lambda(args) => run_lambda(&cli, args),
        Command::Orbit(args) => run_orbit(args),
        Command::Core(args) => run_core(args),
        Command::Verify(args) => verify::run(&cli.cache, cli.pretty, args),
        Command::Bench(args) => run_bench(&cli, args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<CoreError>() {
                Some(CoreError::SizeLimit(_)) | Some(CoreError::DimensionOverflow(_)) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn store_at(cache: &std::path::Path) -> LambdaStore {
    LambdaStore::with_dir(cache.to_path_buf())
}

fn run_count(cli: &Cli, args: &CountArgs) -> anyhow::Result<ExitCode> {
    let n = args.n;
    let mut store = store_at(&cli.cache);
    let ms: Vec<usize> = match args.m {
        Some(m) => vec![m],
        None => (1..=n).collect(),
    };
    let mut per_m = Vec::new();
    for &m in &ms {
        let value = match args.method {
            CountMethod::Formula => minbal::counting::count_b(n, m, &mut store)?,
            CountMethod::ClosedForm => minbal::counting::closed_form(n, m)?,
            CountMethod::Enumerate => {
                let result = enumerate_minimal(n, EnumerationMode::Search)?;
                num_bigint::BigInt::from(result.count_for_m(m))
            }
        };
        per_m.push((m, value));
    }
    if args.json {
        let total = per_m.iter().map(|(_, v)| v).sum::<num_bigint::BigInt>();
        let table = minbal::counting::CountTable {
            n,
            per_m: per_m.iter().map(|(_, v)| v.clone()).collect(),
            total,
        };
        println!("{}", serde_json::to_string(&table)?);
    } else {
        println!("n,m,B");
        for (m, v) in &per_m {
            println!("{n},{m},{v}");
        }
    }
    if cli.pretty {
        for (m, v) in &per_m {
            eprintln!("B({n}, {m}) = {v}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_enumerate(cli: &Cli, args: &EnumerateArgs) -> anyhow::Result<ExitCode> {
    if args.two_element {
        let census = minbal::enumerate::enumerate_two_element(args.n)?;
        println!("{}", serde_json::to_string(&census)?);
        if cli.pretty {
            for (shape, count) in &census.by_shape {
                eprintln!("{shape}: {count}");
            }
            eprintln!("total: {}", census.total);
        }
        return Ok(ExitCode::SUCCESS);
    }
    if args.n == 7 && !args.extended {
        return Err(CoreError::SizeLimit(
            "n = 7 enumerates 132 million collections; pass --extended to stream it".into(),
        )
        .into());
    }
    let mut sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    let summary = if args.n >= 7 {
        let mut write_item = |c: &minbal::model::Collection, w: &minbal::weights::WeightVector| {
            let line = serde_json::to_string(&serde_json::json!({
                "n": c.n(),
                "sets": c.coalitions().map(|co| co.members()).collect::<Vec<_>>(),
                "weights": w.coords().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            }))
            .map_err(minbal::Error::from)?;
            writeln!(sink, "{line}").map_err(minbal::Error::from)
        };
        minbal::enumerate::enumerate_minimal_streaming(args.n, &mut write_item)?
    } else {
        let mode = match args.mode {
            Mode::Search => EnumerationMode::Search,
            Mode::LambdaRoute => EnumerationMode::LambdaRoute,
        };
        let result = enumerate_minimal(args.n, mode)?;
        result.write_jsonl(&mut sink)?;
        // Internal cross-check: per-size counts against the formula route.
        let mut store = store_at(&cli.cache);
        for m in 1..=args.n {
            let formula = minbal::counting::count_b(args.n, m, &mut store)?;
            if formula != num_bigint::BigInt::from(result.count_for_m(m)) {
                eprintln!(
                    "cross-check failed: enumerated {} collections of size {m}, formula says {formula}",
                    result.count_for_m(m)
                );
                return Ok(ExitCode::from(1));
            }
        }
        minbal::enumerate::StreamSummary {
            n: args.n,
            total: result.len() as u64,
            per_m: result.per_m_counts().to_vec(),
            checksum: result.checksum(),
        }
    };
    sink.flush()?;
    eprintln!("{}", serde_json::to_string(&summary)?);
    Ok(ExitCode::SUCCESS)
}

fn run_lambda(cli: &Cli, args: &LambdaArgs) -> anyhow::Result<ExitCode> {
    let mut store = store_at(&cli.cache);
    let set = store.get(args.m)?;
    println!("{}", serde_json::to_string(&set)?);
    if cli.pretty {
        for class in set.classes() {
            eprintln!(
                "{:?} ×{}",
                class
                    .canonical()
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>(),
                class.multiplicity()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_orbit(args: &OrbitArgs) -> anyhow::Result<ExitCode> {
    let text = if args.matrix == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(&args.matrix)?
    };
    let matrix: minbal::model::ZeroOneMatrix = serde_json::from_str(&text)?;
    let summary = minbal::orbits::orbit_summary(&matrix, args.full)?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(ExitCode::SUCCESS)
}

fn run_core(args: &CoreArgs) -> anyhow::Result<ExitCode> {
    let game: minbal::games::TUGame = serde_json::from_str(&std::fs::read_to_string(&args.game)?)?;
    let report = match &args.mbc {
        Some(path) => {
            let file = std::io::BufReader::new(std::fs::File::open(path)?);
            let mbcs = minbal::enumerate::EnumerationResult::read_jsonl(file)?;
            minbal::games::core_nonempty_bondareva(&game, &mbcs)?
        }
        None => minbal::games::core_nonempty_lp(&game)?,
    };
    println!("{}", serde_json::to_string(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn run_bench(cli: &Cli, args: &BenchArgs) -> anyhow::Result<ExitCode> {
    let mut store = store_at(&cli.cache);
    for n in 1..=args.max_n.min(6) {
        let t = Instant::now();
        let table = minbal::counting::count_b_total(n, &mut store)?;
        eprintln!("# formula n={n}: {:?}", t.elapsed());
        println!(
            "{}",
            serde_json::json!({"n": n, "route": "formula", "total": table.total.to_string()})
        );
        let t = Instant::now();
        let searched = enumerate_minimal(n, EnumerationMode::Search)?;
        eprintln!("# search n={n}: {:?}", t.elapsed());
        println!(
            "{}",
            serde_json::json!({"n": n, "route": "search", "total": searched.len()})
        );
        let t = Instant::now();
        let routed = enumerate_minimal(n, EnumerationMode::LambdaRoute)?;
        eprintln!("# lambda-route n={n}: {:?}", t.elapsed());
        println!(
            "{}",
            serde_json::json!({"n": n, "route": "lambda-route", "total": routed.len()})
        );
    }
    Ok(ExitCode::SUCCESS)
}
