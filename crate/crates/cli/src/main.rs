use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use discflux::acceptance::{self, Thresholds};
use discflux::diagnostics::VerdictRule;
use discflux::driver::{compare, solve_outputs, tv_study, RunError, SolverKind, StudyConfig};
use discflux::godunov::DEFAULT_CFL;
use discflux::scenarios::{self, BUILTIN_NAMES};

const EXIT_ACCEPTANCE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;
const MIN_GRID: usize = 16;

#[derive(Parser)]
#[command(name = "discflux", version, about = "Interface entropy solutions for conservation laws with a flux discontinuous at x = 0")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Formula solution fields, the interface profile and fronts.
    Solve(SolveArgs),
    /// Formula solver against the finite-volume oracle.
    Compare(CompareArgs),
    /// Total variation over refinement levels, with verdicts.
    TvReport(TvArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
    /// Shipped scenarios.
    ListScenarios,
}

#[derive(Args)]
struct ScenarioArg {
    /// Built-in scenario name or path to a scenario JSON file.
    #[arg(long)]
    scenario: String,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long = "t", num_args = 1.., required = true)]
    times: Vec<f64>,
    #[arg(long = "n", num_args = 1.., default_values_t = [400])]
    grids: Vec<usize>,
    #[arg(long, default_value = "discflux-out")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// One time per grid size, or a single time for all of them.
    #[arg(long = "t", num_args = 1.., required = true)]
    times: Vec<f64>,
    #[arg(long = "n", num_args = 1.., default_values_t = [400])]
    grids: Vec<usize>,
    /// Finite-volume cells per formula node.
    #[arg(long, default_value_t = 1)]
    refine: usize,
    #[arg(long, default_value_t = DEFAULT_CFL)]
    cfl: f64,
    /// Largest accepted L¹ distance.
    #[arg(long, default_value_t = 0.05)]
    l1_bound: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Formula,
    Godunov,
}

#[derive(Args)]
struct TvArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long = "t", default_value_t = 1.0)]
    time: f64,
    #[arg(long, num_args = 1.., default_values_t = [256, 512, 1024, 2048])]
    levels: Vec<usize>,
    /// Inner radius of I(M, ε).
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, value_enum, default_value = "formula")]
    solver: SolverArg,
    #[arg(long, default_value_t = DEFAULT_CFL)]
    cfl: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Criterion group or number.
    #[arg(long)]
    group: Option<String>,
    /// Divide every tolerance (and multiply every required rate) by this factor.
    #[arg(long, default_value_t = 1.0)]
    tighten: f64,
    /// Print the outcomes as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

enum Failure {
    Run(RunError),
    Config(String),
    Io(String),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure::Run(e)
    }
}

impl From<scenarios::ScenarioError> for Failure {
    fn from(e: scenarios::ScenarioError) -> Self {
        Failure::Run(e.into())
    }
}

impl Failure {
    fn report(&self) -> (u8, Value) {
        match self {
            Failure::Run(e) => (
                e.exit_code() as u8,
                json!({"error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()}),
            ),
            Failure::Config(m) => (EXIT_CONFIG, json!({"error": "config", "message": m, "exit_code": EXIT_CONFIG})),
            Failure::Io(m) => (EXIT_CONFIG, json!({"error": "io", "message": m, "exit_code": EXIT_CONFIG})),
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn out_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))
}

fn check_grids(grids: &[usize]) -> Result<(), Failure> {
    match grids.iter().find(|&&n| n < MIN_GRID) {
        Some(n) => Err(Failure::Config(format!("grid size {n} is below {MIN_GRID}"))),
        None => Ok(()),
    }
}

fn check_times(times: &[f64]) -> Result<(), Failure> {
    match times.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        Some(t) => Err(Failure::Config(format!("time {t} is not positive"))),
        None => Ok(()),
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<u8, Failure> {
    check_times(&a.times)?;
    check_grids(&a.grids)?;
    let s = scenarios::resolve(&a.scenario.scenario)?;
    out_dir(&a.out)?;
    let runs = a
        .grids
        .par_iter()
        .map(|&n| solve_outputs(&s, &a.times, n).map(|o| (n, o)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut written = Vec::new();
    for (n, outputs) in runs {
        let profile = a.out.join(format!("profile_n{n}.csv"));
        write(&profile, &outputs.profile_csv)?;
        written.push(profile);
        for (t, csv, fronts) in outputs.fields {
            let field = a.out.join(format!("field_t{t}_n{n}.csv"));
            let sidecar = a.out.join(format!("fronts_t{t}_n{n}.json"));
            write(&field, &csv)?;
            write(&sidecar, &format!("{fronts:#}\n"))?;
            written.push(field);
            written.push(sidecar);
        }
    }
    for p in written {
        println!("{}", p.display());
    }
    Ok(0)
}

fn cmd_compare(a: &CompareArgs) -> Result<u8, Failure> {
    check_times(&a.times)?;
    check_grids(&a.grids)?;
    let pairs: Vec<(f64, usize)> = match (a.times.len(), a.grids.len()) {
        (1, _) => a.grids.iter().map(|&n| (a.times[0], n)).collect(),
        (k, m) if k == m => a.times.iter().copied().zip(a.grids.iter().copied()).collect(),
        (k, m) => return Err(Failure::Config(format!("{k} times do not match {m} grid sizes"))),
    };
    let s = scenarios::resolve(&a.scenario.scenario)?;
    let results = pairs
        .par_iter()
        .map(|&(t, n)| compare(&s, t, n, a.refine, a.cfl).map(|c| (t, n, c)))
        .collect::<Result<Vec<_>, _>>()?;
    let within = results.iter().all(|(_, _, c)| c.l1 <= a.l1_bound);
    let runs: Vec<Value> = results
        .iter()
        .map(|(t, n, c)| json!({"t": t, "n": n, "l1": c.l1, "linf_away": c.linf_away, "band": c.band, "within": c.l1 <= a.l1_bound}))
        .collect();
    let report = json!({"scenario": s.spec.label, "l1_bound": a.l1_bound, "refine": a.refine, "runs": runs, "within": within});
    let text = format!("{report:#}\n");
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        write(&dir.join("compare.json"), &text)?;
    }
    print!("{text}");
    Ok(if within { 0 } else { EXIT_TOLERANCE })
}

fn cmd_tv_report(a: &TvArgs) -> Result<u8, Failure> {
    check_times(&[a.time])?;
    check_grids(&a.levels)?;
    let s = scenarios::resolve(&a.scenario.scenario)?;
    let cfg = StudyConfig {
        t: a.time,
        eps: a.eps,
        rule: VerdictRule::default(),
        cfl: a.cfl,
    };
    let solver = match a.solver {
        SolverArg::Formula => SolverKind::Formula,
        SolverArg::Godunov => SolverKind::Godunov,
    };
    let report = tv_study(&s, &a.levels, &cfg, solver)?;
    let verdicts: serde_json::Map<String, Value> = report
        .verdicts
        .iter()
        .map(|(name, v)| (name.clone(), json!({"verdict": v, "tv": report.series(name).unwrap_or_default()})))
        .collect();
    let summary = json!({"scenario": s.spec.label, "t": a.time, "levels": a.levels, "solver": solver, "regions": verdicts});
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        write(&dir.join("tv_report.csv"), &report.to_csv())?;
        write(&dir.join("tv_verdicts.json"), &format!("{summary:#}\n"))?;
    }
    println!("{summary:#}");
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8, Failure> {
    if !(a.tighten.is_finite() && a.tighten > 0.0) {
        return Err(Failure::Config(format!("tighten factor {} is not positive", a.tighten)));
    }
    let selected = acceptance::select(a.group.as_deref());
    if selected.is_empty() {
        return Err(Failure::Config(format!("no criterion matches `{}`", a.group.as_deref().unwrap_or(""))));
    }
    let th = Thresholds::default().tightened(a.tighten);
    let mut outcomes = Vec::new();
    for c in selected {
        let outcome = acceptance::run_criterion(c, &th);
        if !a.json {
            println!("{}", outcome.line());
        }
        outcomes.push(outcome);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    if a.json {
        println!("{:#}", json!({"outcomes": outcomes, "passed": passed, "total": outcomes.len()}));
    } else {
        println!("{passed}/{} criteria passed", outcomes.len());
    }
    Ok(if passed == outcomes.len() { 0 } else { EXIT_ACCEPTANCE })
}

fn cmd_list() -> Result<u8, Failure> {
    for name in BUILTIN_NAMES {
        let s = scenarios::builtin_spec(name)?;
        println!(
            "{name}\tg={} f={} domain=[{}, {}]",
            s.flux_left.key, s.flux_right.key, s.domain[0], s.domain[1]
        );
    }
    Ok(0)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("DISCFLUX_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("DISCFLUX_THREADS={value} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Compare(a) => cmd_compare(a),
        Command::TvReport(a) => cmd_tv_report(a),
        Command::Verify(a) => cmd_verify(a),
        Command::ListScenarios => cmd_list(),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            let (code, body) = failure.report();
            eprintln!("{body}");
            ExitCode::from(code)
        }
    }
}
