//! `dinc`: solve, refine and check differential inclusions from the shell.
//!
//! Exit codes: 0 success / pass, 1 usage or input error, 2 infeasible WCM
//! selection, 3 check failed (counterexample found).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dinclusion::analyzer::{self, CheckReport};
use dinclusion::mapdsl;
use dinclusion::solver::{self, EulerOptions};
use dinclusion::{Builtin, Error, PolicyKind, SelectionPolicy, SetValuedMap};

#[derive(Parser)]
#[command(
    name = "dinc",
    version,
    about = "Euler polygons and condition checks for differential inclusions"
)]
struct Cli {
    /// Worker threads for sampling and refinement levels (results do not depend on it).
    #[arg(long, global = true, env = "DINC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one Euler polygon and write it as CSV (or JSON).
    Solve(SolveArgs),
    /// Run a mesh-refinement study with doubling step counts.
    Converge(ConvergeArgs),
    /// Check a condition on a map by sampling.
    Check(CheckArgs),
    /// List the built-in maps.
    ListExamples {
        /// Print a JSON array instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct MapArgs {
    /// Builtin name (example1, example2F, example2G, example3, example4, antisign, normgrad) or map file path.
    #[arg(long)]
    map: String,
    /// Dimension parameter for example4 / normgrad.
    #[arg(long)]
    dim: Option<usize>,
    /// Number of unit vectors at the origin for normgrad.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Initial state, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    /// Initial velocity override, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    v0: Option<String>,
    /// Time horizon.
    #[arg(long = "T")]
    horizon: f64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Project)]
    policy: PolicyArg,
    #[arg(long, default_value_t = 0.0)]
    slack: f64,
    /// Accept N below the hM < 1 threshold.
    #[arg(long)]
    allow_coarse: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Number of Euler steps (default: smallest N with hM < 1).
    #[arg(long = "N")]
    steps: Option<usize>,
    #[arg(long, default_value = "trajectory.csv")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Coarsest step count.
    #[arg(long = "N0", alias = "N")]
    n0: usize,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long, default_value_t = 4)]
    samples_per_interval: usize,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    condition: ConditionArg,
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, default_value_t = 10.0)]
    radius: f64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cycle length for `cyclic`.
    #[arg(long, default_value_t = 3)]
    cycle_len: usize,
    /// Distance threshold for `graph`.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Project,
    LexMin,
    LexMax,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConditionArg {
    Wcm,
    Monotone,
    Cyclic,
    Growth,
    Graph,
}

enum Failure {
    Usage(String),
    Infeasible(Box<dinclusion::InfeasibleCertificate>),
    CheckFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::WcmInfeasible(cert) => Failure::Infeasible(cert),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn parse_vector(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("invalid number `{p}` in vector `{s}`")))
        })
        .collect()
}

fn load_map(args: &MapArgs) -> Result<SetValuedMap, Failure> {
    let path = Path::new(&args.map);
    if path.is_file() {
        return Ok(mapdsl::load_map(path)?);
    }
    Ok(SetValuedMap::by_name(&args.map, args.dim, args.k)?)
}

fn options(run: &RunArgs, dim: usize) -> Result<(Vec<f64>, EulerOptions), Failure> {
    let x0 = parse_vector(&run.x0)?;
    if x0.len() != dim {
        return Err(Failure::Usage(format!(
            "x0 has {} entries, map dimension is {dim}",
            x0.len()
        )));
    }
    let kind = match run.policy {
        PolicyArg::Project => PolicyKind::Project,
        PolicyArg::LexMin => PolicyKind::LexMin,
        PolicyArg::LexMax => PolicyKind::LexMax,
    };
    let mut opts = EulerOptions::new(SelectionPolicy::new(kind, run.slack)?);
    opts.allow_coarse_mesh = run.allow_coarse;
    if let Some(v0) = &run.v0 {
        let v0 = parse_vector(v0)?;
        if v0.len() != dim {
            return Err(Failure::Usage(format!(
                "v0 has {} entries, map dimension is {dim}",
                v0.len()
            )));
        }
        opts.v0 = Some(v0);
    }
    Ok((x0, opts))
}

fn emit_report(value: Value, out: Option<&Path>, no_timestamp: bool) -> Result<(), Failure> {
    let mut value = value;
    if !no_timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        value["timestamp"] = json!(secs);
    }
    let text = serde_json::to_string_pretty(&value).expect("report serializes") + "\n";
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let map = load_map(&args.run.map)?;
    let (x0, opts) = options(&args.run, map.dim())?;
    let steps = match args.steps {
        Some(n) => n,
        None => {
            let g = map
                .growth()
                .ok_or_else(|| Failure::Usage("map declares no growth constants; pass --N".into()))?;
            solver::min_steps(&solver::gronwall_bounds(
                g.a,
                g.b,
                solver::euclidean_norm(&x0),
                args.run.horizon,
            )?)
        }
    };
    let traj = solver::euler_polygon(&map, &x0, args.run.horizon, steps, &opts)?;
    let mut out = BufWriter::new(File::create(&args.out)?);
    match args.format {
        Format::Csv => traj.write_csv(&mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &traj).map_err(Error::from)?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()?;
    let (node_res, interval_res) = analyzer::residual(&traj, &map, 4)?;
    let summary = json!({
        "map": map.to_string(),
        "steps": traj.steps(),
        "step_size": traj.step_size(),
        "terminal": traj.terminal(),
        "monotonicity": analyzer::check_trajectory_monotone(&traj),
        "max_node_residual": node_res,
        "max_interval_residual": interval_res,
        "output": args.out,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    );
    Ok(())
}

fn converge(args: ConvergeArgs) -> Result<(), Failure> {
    let map = load_map(&args.run.map)?;
    let (x0, opts) = options(&args.run, map.dim())?;
    let (report, _) = solver::converge(
        &map,
        &x0,
        args.run.horizon,
        args.n0,
        args.levels,
        &opts,
        args.samples_per_interval,
    )?;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    value["ratios"] = json!(report.ratios());
    emit_report(value, args.out.as_deref(), args.no_timestamp)
}

fn check(args: CheckArgs) -> Result<(), Failure> {
    let map = load_map(&args.map)?;
    let (r, n, seed) = (args.radius, args.samples, args.seed);
    let report: CheckReport = match args.condition {
        ConditionArg::Wcm => analyzer::check_wcm(&map, r, n, seed)?,
        ConditionArg::Monotone => analyzer::find_monotonicity_violation(&map, r, n, seed)?,
        ConditionArg::Cyclic => analyzer::find_cyclic_violation(&map, r, args.cycle_len, n, seed)?,
        ConditionArg::Growth => analyzer::check_growth(&map, r, n, seed)?,
        ConditionArg::Graph => analyzer::check_closed_graph(&map, r, n, seed, args.eps)?,
    };
    let mut value = serde_json::to_value(&report).expect("report serializes");
    value["map"] = json!(map.to_string());
    emit_report(value, args.out.as_deref(), args.no_timestamp)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::CheckFailed)
    }
}

fn list_examples(as_json: bool) {
    let catalog = Builtin::catalog();
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&catalog).expect("catalog serializes")
        );
        return;
    }
    for b in catalog {
        println!(
            "{:<11} dim={:<2} params={}\n            {}",
            b.name, b.dim, b.params, b.encodes
        );
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Converge(a) => converge(a),
        Command::Check(a) => check(a),
        Command::ListExamples { json } => {
            list_examples(json);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(cert)) => {
            eprintln!("error: {cert}");
            let body = json!({ "error": "wcm_infeasible", "certificate": cert });
            println!(
                "{}",
                serde_json::to_string_pretty(&body).expect("certificate serializes")
            );
            ExitCode::from(2)
        }
        Err(Failure::CheckFailed) => ExitCode::from(3),
    }
}
