//! `qmix`: closest convex mixtures of quantum states from the command line.
//!
//! Exit codes: 0 success, 1 other failure, 2 parse or I/O error,
//! 3 strict validation failure, 4 `--verify` discrepancy above 1e-6.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qmix_core::format::{
    fmt_sig, parse_state, parse_state_set, state_set_to_json, sweep_to_csv, FixtureDoc,
};
use qmix_core::oracle::projected_gradient_default;
use qmix_core::search::DEFAULT_BUDGET;
use qmix_core::{
    fixtures, minimal_support_profile, random_state_set, solve_with, uniform_grid, validate_state,
    ApproxSolution, CoefficientVector, Error, HermitianBasis, OracleResult, SearchOptions,
    StateSet, TargetFamily,
};

const VERIFY_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "qmix",
    version,
    about = "Closest convex mixture of quantum states"
)]
struct Cli {
    /// Maximum number of supports solved before falling back to the numerical oracle.
    #[arg(long, global = true, env = "APPROX_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate one target state by a mixture of a state set.
    Solve(SolveArgs),
    /// Sweep a target family `k r_a + (1 - k) r_b` over a uniform k-grid (CSV).
    Sweep(SweepArgs),
    /// Write a seeded set of random density matrices.
    Random(RandomArgs),
    /// List or dump the built-in example fixtures.
    Fixtures(FixturesArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    set: PathBuf,
    /// Reject targets or set members that are not density matrices.
    #[arg(long)]
    strict: bool,
    /// Cross-check against projected gradient descent.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the full solution as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, conflicts_with_all = ["target_a", "target_b", "set"])]
    fixture: Option<String>,
    /// Target at k = 1.
    #[arg(long, requires_all = ["target_b", "set"])]
    target_a: Option<PathBuf>,
    /// Target at k = 0.
    #[arg(long, requires = "target_a")]
    target_b: Option<PathBuf>,
    #[arg(long, requires = "target_a")]
    set: Option<PathBuf>,
    /// Fixture target variant, e.g. `r01^2`; defaults to the first.
    #[arg(long, requires = "fixture")]
    variant: Option<String>,
    #[arg(long, default_value_t = 101)]
    k_steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FixturesArgs {
    #[arg(long)]
    list: bool,
    #[arg(long, value_name = "NAME")]
    dump: Option<String>,
}

enum Failure {
    Parse(String),
    Validation(String),
    Verify(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Verify(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Validation(m) | Failure::Verify(m) | Failure::Other(m) => {
                m
            }
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Format(_)
            | Error::LengthMismatch { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidDimension(_)
            | Error::NonFinite
            | Error::NotHermitian { .. }
            | Error::EmptySet => Failure::Parse(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<CoefficientVector, Failure> {
    parse_state(&read(path)?).map_err(|e| with_path(path, e))
}

fn load_set(path: &Path) -> Result<StateSet, Failure> {
    parse_state_set(&read(path)?).map_err(|e| with_path(path, e))
}

fn with_path(path: &Path, e: Error) -> Failure {
    match Failure::from(e) {
        Failure::Parse(m) => Failure::Parse(format!("{}: {m}", path.display())),
        f => f,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Parse(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn options(budget: usize) -> SearchOptions {
    SearchOptions::default().with_budget(budget)
}

fn check_strict(target: &CoefficientVector, set: &StateSet) -> Result<(), Failure> {
    let basis = HermitianBasis::new(set.dim())?;
    let labelled = std::iter::once(("target".to_string(), target)).chain(
        set.members()
            .iter()
            .enumerate()
            .map(|(i, r)| (format!("set member {i}"), r)),
    );
    let mut bad = Vec::new();
    for (name, r) in labelled {
        let rep = validate_state(r, &basis, true)?;
        if !rep.is_valid() {
            log::error!(
                "{name} is not a density matrix: trace {}, purity {}, min eigenvalue {:?}",
                rep.trace,
                rep.purity,
                rep.min_eigenvalue
            );
            bad.push(name);
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "invalid states: {}",
            bad.join(", ")
        )))
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    oracle: &'a OracleResult,
    discrepancy: f64,
}

#[derive(Serialize)]
struct SolveReport<'a> {
    #[serde(flatten)]
    solution: &'a ApproxSolution,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify: Option<&'a VerifyReport<'a>>,
}

fn solve_text(sol: &ApproxSolution, verify: Option<&VerifyReport>) -> String {
    let list = |xs: Vec<String>| xs.join(" ");
    let mut s = format!(
        "distance {}\nminimal_n {}\nsupport {}\nweights {}\nevaluated_supports {}\n",
        fmt_sig(sol.distance, 12),
        sol.minimal_n,
        list(sol.support.iter().map(|i| i.to_string()).collect()),
        list(
            sol.support_weights()
                .iter()
                .map(|w| fmt_sig(*w, 12))
                .collect()
        ),
        sol.evaluated_supports,
    );
    let c = &sol.case_trace.counts;
    s += &format!(
        "cases feasible {} infeasible {} rank_deficient {}\n",
        c.feasible, c.infeasible_sign, c.rank_deficient
    );
    if let Some(f) = &sol.case_trace.fallback {
        s += &format!("fallback {f}\n");
    }
    if let Some(v) = verify {
        s += &format!(
            "oracle_distance {}\ndiscrepancy {:.3e}\n",
            fmt_sig(v.oracle.distance, 12),
            v.discrepancy
        );
    }
    s
}

fn cmd_solve(args: &SolveArgs, budget: usize) -> Result<(), Failure> {
    let target = load_state(&args.target)?;
    let set = load_set(&args.set)?;
    if args.strict {
        check_strict(&target, &set)?;
    }
    let sol = solve_with(&target, &set, &options(budget))?;
    let oracle = if args.verify {
        Some(projected_gradient_default(&target, &set)?)
    } else {
        None
    };
    let verify = oracle.as_ref().map(|o| VerifyReport {
        oracle: o,
        discrepancy: (o.distance - sol.distance).abs(),
    });
    let text = if args.json {
        let mut s = serde_json::to_string_pretty(&SolveReport {
            solution: &sol,
            verify: verify.as_ref(),
        })
        .map_err(|e| Failure::Other(e.to_string()))?;
        s.push('\n');
        s
    } else {
        solve_text(&sol, verify.as_ref())
    };
    emit(args.out.as_deref(), &text)?;
    match verify {
        Some(v) if v.discrepancy.is_nan() || v.discrepancy > VERIFY_TOL => {
            Err(Failure::Verify(format!(
                "oracle disagrees by {:.3e} (tolerance {VERIFY_TOL:e})",
                v.discrepancy
            )))
        }
        _ => Ok(()),
    }
}

fn cmd_sweep(args: &SweepArgs, budget: usize) -> Result<(), Failure> {
    if args.k_steps < 2 {
        return Err(Failure::Other(format!(
            "--k-steps must be at least 2, got {}",
            args.k_steps
        )));
    }
    let (family, set) = match (&args.fixture, &args.target_a) {
        (Some(name), _) => {
            let f = fixtures::fixture(name)?;
            let family = match &args.variant {
                Some(v) => f.family(v)?.clone(),
                None => f.variants[0].1.clone(),
            };
            for note in &f.notes {
                log::info!("{name}: {note}");
            }
            (family, f.set)
        }
        (None, Some(a)) => {
            let b = args.target_b.as_ref().expect("clap requires --target-b");
            let set = args.set.as_ref().expect("clap requires --set");
            let family = TargetFamily::new(load_state(a)?, load_state(b)?, "k a + (1 - k) b")?;
            (family, load_set(set)?)
        }
        (None, None) => {
            return Err(Failure::Other(
                "sweep needs --fixture or --target-a/--target-b/--set".to_string(),
            ))
        }
    };
    let rows =
        minimal_support_profile(&family, &set, &uniform_grid(args.k_steps), &options(budget))?;
    emit(args.out.as_deref(), &sweep_to_csv(&rows))
}

fn cmd_random(args: &RandomArgs) -> Result<(), Failure> {
    if args.d < 2 || args.n < 1 {
        return Err(Failure::Other(format!(
            "need d >= 2 and n >= 1, got d = {}, n = {}",
            args.d, args.n
        )));
    }
    let set = random_state_set(args.d, args.n, args.seed)?;
    emit(args.out.as_deref(), &(state_set_to_json(&set) + "\n"))
}

fn cmd_fixtures(args: &FixturesArgs) -> Result<(), Failure> {
    if let Some(name) = &args.dump {
        let doc = FixtureDoc::from_fixture(&fixtures::fixture(name)?);
        let json = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Other(e.to_string()))?;
        return emit(None, &(json + "\n"));
    }
    let mut s = String::new();
    for f in fixtures::catalog() {
        s += &format!(
            "{}\td={}\tN={}\tvariants={}\t{}\n",
            f.name,
            f.dim(),
            f.set.len(),
            f.variant_names().join(","),
            f.description
        );
    }
    emit(None, &s)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, cli.budget),
        Command::Sweep(a) => cmd_sweep(a, cli.budget),
        Command::Random(a) => cmd_random(a),
        Command::Fixtures(a) => cmd_fixtures(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qmix: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
