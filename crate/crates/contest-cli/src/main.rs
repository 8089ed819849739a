//! `contest` — command-line front end for the contest library.
//!
//! Subcommands: `solve` (one scheme, one profile), `anarchy` (efficiency
//! report or closed-form sweep), `sweep` (shorthand for `anarchy --sweep`),
//! `montecarlo` (random linear-cost populations), `learn` (projected
//! gradient-ascent dynamics), and `reproduce-paper` (regenerate the full
//! reference output suite into a directory).
//!
//! Exit codes: 0 success, 2 validation problem, 3 solver failure.

mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use contest::anarchy::{
    self, identical_power_anarchy, identical_power_anarchy_prime, identical_power_dissipation,
};
use contest::cost_model::{CostModelError, CostProfile};
use contest::experiments::{
    run_experiment, run_experiment_streaming, DistributionSpec, ExperimentError, ExperimentRow,
    ExperimentSpec,
};
use contest::learning::{
    self, LearningConfig, LearningError, LearningTrace, StrategyBox,
};
use contest::schemes::closed_form::{
    equilibrium_closed_form_linear, identical_power_normative_total,
    identical_power_piece_rate_total, symmetric_power_equilibrium_total,
};
use contest::schemes::{
    solve_normative, solve_piece_rate, solve_proportional, EquilibriumSolution, SchemeOutcome,
    SolveError,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, files, or parameters (exit 2).
    #[error("{0}")]
    Validation(String),
    /// A numeric solve failed (exit 3).
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::BracketFailed { .. } => CliError::Solver(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<CostModelError> for CliError {
    fn from(e: CostModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<LearningError> for CliError {
    fn from(e: LearningError) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "contest",
    version,
    about = "Budget-split production contests: solvers, efficiency sweeps, Monte Carlo tables, learning dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one compensation scheme for a cost profile
    Solve(SolveArgs),
    /// Efficiency report for a profile, or a closed-form sweep over
    /// population sizes with identical power producers
    Anarchy(AnarchyArgs),
    /// Closed-form efficiency sweep (shorthand for `anarchy --sweep`)
    Sweep(SweepArgs),
    /// Monte Carlo efficiency/active-set tables over random linear costs
    Montecarlo(MontecarloArgs),
    /// Projected gradient-ascent learning in the proportional scheme
    Learn(LearnArgs),
    /// Regenerate the reference sweeps, tables, and learning benchmark
    ReproducePaper(ReproduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Normative,
    PieceRate,
    Proportional,
    LinearClosedForm,
}

impl SchemeArg {
    fn name(self) -> &'static str {
        match self {
            SchemeArg::Normative => "normative",
            SchemeArg::PieceRate => "piece-rate",
            SchemeArg::Proportional => "proportional",
            SchemeArg::LinearClosedForm => "linear-closed-form",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckpointsArg {
    /// Rounds 1, 2, 4, … plus the final round
    Log,
    /// Every round
    All,
}

#[derive(Args)]
struct SolveArgs {
    /// Compensation scheme
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Cost profile JSON: {"budget": M, "agents": [{"type": "power", "c": 1, "alpha": 2}, …]}
    #[arg(long)]
    profile: PathBuf,
    /// Output format (default: json)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnarchyArgs {
    /// Cost profile JSON for a full numeric report
    #[arg(long, conflicts_with = "sweep")]
    profile: Option<PathBuf>,
    /// Closed-form sweep over --n with identical producers c·x^α
    #[arg(long, requires = "alpha", requires = "n")]
    sweep: bool,
    /// Common cost exponent α ≥ 1 (sweep mode)
    #[arg(long)]
    alpha: Option<f64>,
    /// Common cost coefficient (sweep mode)
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Population sizes, comma separated (e.g. 2,10,100,1e3)
    #[arg(long)]
    n: Option<String>,
    /// Budget M
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Output format (default: json for reports, csv for sweeps)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Common cost exponent α ≥ 1
    #[arg(long)]
    alpha: f64,
    /// Common cost coefficient
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Population sizes, comma separated (e.g. 2,10,100,1e3)
    #[arg(long)]
    n: String,
    /// Budget M
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Output format (default: csv)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MontecarloArgs {
    /// Cost-offset distribution: uniform:LO,HI | lognormal:LOC,VAR |
    /// pareto:SHAPE,SCALE | constant:VALUE
    #[arg(long, required_unless_present = "paper_tables")]
    dist: Option<String>,
    /// Population grid, comma separated; scientific notation accepted (1e5)
    #[arg(long)]
    n: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Replications per grid point
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Budget M
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Run all six standard distribution columns and emit the two
    /// table-shaped summaries instead of long rows
    #[arg(long)]
    paper_tables: bool,
    /// Bounded-memory runner (required beyond the in-memory population cap)
    #[arg(long)]
    streaming: bool,
    /// Output format (default: csv)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LearnArgs {
    /// Cost profile JSON
    #[arg(long)]
    profile: PathBuf,
    /// Strategy box LOWER,UPPER (plays are clamped into it)
    #[arg(long = "box", value_name = "LO,HI", default_value = "0.05,2")]
    bounds: String,
    /// Rounds to play
    #[arg(long, default_value_t = 100_000)]
    t: usize,
    /// Step-size scale: round-t step is eta0/sqrt(t) (default: box upper edge)
    #[arg(long)]
    eta0: Option<f64>,
    /// Grid size for the fixed-action regret benchmark
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Which rounds to emit
    #[arg(long, value_enum, default_value_t = CheckpointsArg::Log)]
    checkpoints: CheckpointsArg,
    /// Output format (default: csv)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Directory for the generated CSV files
    #[arg(long, default_value = "reproduction")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Replications per Monte Carlo grid point
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Extend the Monte Carlo grid to 10^6 and 10^7 via the streaming runner
    #[arg(long)]
    extended: bool,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve(args) => run_solve(args),
        Command::Anarchy(args) => run_anarchy(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Montecarlo(args) => run_montecarlo(args),
        Command::Learn(args) => run_learn(args),
        Command::ReproducePaper(args) => run_reproduce(args),
    }
}

// ---------------------------------------------------------------- solve --

fn run_solve(args: SolveArgs) -> Result<(), CliError> {
    let profile = load_profile(&args.profile)?;
    let budget = profile.budget();
    let (outcome, shares): (SchemeOutcome, Option<Vec<f64>>) = match args.scheme {
        SchemeArg::Normative => (solve_normative(&profile)?, None),
        SchemeArg::PieceRate => (solve_piece_rate(&profile)?, None),
        SchemeArg::Proportional => {
            let eq = solve_proportional(&profile)?;
            let shares = eq.shares.clone();
            (eq.to_outcome(budget), Some(shares))
        }
        SchemeArg::LinearClosedForm => {
            let eq = equilibrium_closed_form_linear(&profile)?;
            let shares = eq.shares.clone();
            (eq.to_outcome(budget), Some(shares))
        }
    };
    let active: Vec<usize> = outcome
        .production
        .iter()
        .enumerate()
        .filter_map(|(i, &x)| (x > 0.0).then_some(i))
        .collect();

    let config = json!({ "scheme": args.scheme.name(), "profile": profile });
    match args.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut payload = serde_json::to_value(&outcome)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            payload["active"] = json!(active);
            if let Some(shares) = &shares {
                payload["shares"] = json!(shares);
            }
            output::deliver(args.out.as_ref(), &output::json_document("solve", config, payload))
        }
        Format::Csv => {
            let header = if shares.is_some() {
                "producer,production,reward,share"
            } else {
                "producer,production,reward"
            };
            let rows: Vec<String> = outcome
                .production
                .iter()
                .zip(&outcome.rewards)
                .enumerate()
                .map(|(i, (x, w))| match &shares {
                    Some(s) => format!("{i},{x},{w},{}", s[i]),
                    None => format!("{i},{x},{w}"),
                })
                .collect();
            output::deliver(
                args.out.as_ref(),
                &output::csv_document("solve", &config, header, &rows),
            )
        }
    }
}

// --------------------------------------------------------------- anarchy --

fn run_anarchy(args: AnarchyArgs) -> Result<(), CliError> {
    if args.sweep {
        let alpha = args.alpha.expect("clap enforces --alpha with --sweep");
        let grid = parse_counts(args.n.as_deref().expect("clap enforces --n with --sweep"))?;
        return emit_sweep(
            "anarchy",
            alpha,
            args.c,
            &grid,
            args.m,
            args.format.unwrap_or(Format::Csv),
            args.out.as_ref(),
        );
    }
    let Some(path) = &args.profile else {
        return Err(CliError::Validation(
            "anarchy needs either --profile or --sweep (with --alpha and --n)".into(),
        ));
    };
    let profile = load_profile(path)?;
    let report = anarchy::report(&profile)?;
    let config = json!({ "profile": profile });
    let mut payload =
        serde_json::to_value(&report).map_err(|e| CliError::Validation(e.to_string()))?;
    if let Some(alpha) = profile.common_power_exponent() {
        let (a, d) = anarchy::asymptotic_targets(alpha)?;
        payload["asymptotic_anarchy"] = json!(a);
        payload["asymptotic_dissipation"] = json!(d);
    }
    match args.format.unwrap_or(Format::Json) {
        Format::Json => output::deliver(
            args.out.as_ref(),
            &output::json_document("anarchy", config, payload),
        ),
        Format::Csv => {
            let header = "sStar,sHat,sBar,A_N,A_N_prime,D_N,active_count";
            let row = format!(
                "{},{},{},{},{},{},{}",
                report.s_star,
                output::cell(report.s_hat),
                report.s_bar,
                report.anarchy,
                output::cell(report.anarchy_prime),
                report.dissipation,
                report.active_count
            );
            output::deliver(
                args.out.as_ref(),
                &output::csv_document("anarchy", &config, header, &[row]),
            )
        }
    }
}

fn run_sweep(args: SweepArgs) -> Result<(), CliError> {
    let grid = parse_counts(&args.n)?;
    emit_sweep(
        "sweep",
        args.alpha,
        args.c,
        &grid,
        args.m,
        args.format.unwrap_or(Format::Csv),
        args.out.as_ref(),
    )
}

/// One row of the closed-form identical-producer sweep.
#[derive(Serialize)]
struct SweepRow {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "sStar")]
    s_star: f64,
    #[serde(rename = "sHat")]
    s_hat: Option<f64>,
    #[serde(rename = "sBar")]
    s_bar: f64,
    #[serde(rename = "A_N")]
    anarchy: f64,
    #[serde(rename = "A_N_prime")]
    anarchy_prime: Option<f64>,
    #[serde(rename = "D_N")]
    dissipation: f64,
}

const SWEEP_HEADER: &str = "N,sStar,sHat,sBar,A_N,A_N_prime,D_N";

fn sweep_rows(alpha: f64, c: f64, grid: &[usize], m: f64) -> Result<Vec<SweepRow>, CliError> {
    let piece_rate = alpha > 1.0;
    grid.iter()
        .map(|&n| {
            Ok(SweepRow {
                n,
                s_star: identical_power_normative_total(c, alpha, n, m)?,
                s_hat: piece_rate
                    .then(|| identical_power_piece_rate_total(c, alpha, n, m))
                    .transpose()?,
                s_bar: symmetric_power_equilibrium_total(c, alpha, n, m)?,
                anarchy: identical_power_anarchy(alpha, n)?,
                anarchy_prime: piece_rate
                    .then(|| identical_power_anarchy_prime(alpha, n))
                    .transpose()?,
                dissipation: identical_power_dissipation(alpha, n)?,
            })
        })
        .collect()
}

fn sweep_csv_row(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        row.n,
        row.s_star,
        output::cell(row.s_hat),
        row.s_bar,
        row.anarchy,
        output::cell(row.anarchy_prime),
        row.dissipation
    )
}

fn emit_sweep(
    command: &str,
    alpha: f64,
    c: f64,
    grid: &[usize],
    m: f64,
    format: Format,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let rows = sweep_rows(alpha, c, grid, m)?;
    let config = json!({ "alpha": alpha, "c": c, "n": grid, "m": m });
    match format {
        Format::Json => {
            let (limit_anarchy, limit_dissipation) = anarchy::asymptotic_targets(alpha)?;
            let payload = json!({
                "rows": rows,
                "asymptotic_anarchy": limit_anarchy,
                "asymptotic_dissipation": limit_dissipation,
            });
            output::deliver(out, &output::json_document(command, config, payload))
        }
        Format::Csv => {
            let lines: Vec<String> = rows.iter().map(sweep_csv_row).collect();
            output::deliver(out, &output::csv_document(command, &config, SWEEP_HEADER, &lines))
        }
    }
}

// ------------------------------------------------------------ montecarlo --

/// The six standard cost-offset distributions, in table column order.
fn standard_distributions() -> [DistributionSpec; 6] {
    [
        DistributionSpec::Uniform { low: 1.0, high: 2.0 },
        DistributionSpec::Uniform { low: 1.0, high: 10.0 },
        DistributionSpec::LogNormal { location: 0.0, variance: 1.0 },
        DistributionSpec::LogNormal { location: 0.0, variance: 2.0 },
        DistributionSpec::Pareto { shape: 0.5, scale: 1.0 },
        DistributionSpec::Pareto { shape: 3.0, scale: 1.0 },
    ]
}

fn experiment_rows(
    distribution: DistributionSpec,
    grid: &[usize],
    seed: u64,
    reps: usize,
    budget: f64,
    streaming: bool,
) -> Result<Vec<ExperimentRow>, CliError> {
    let mut spec = ExperimentSpec::new(distribution, grid.to_vec(), seed);
    spec.replications = reps;
    spec.budget = budget;
    let rows = if streaming { run_experiment_streaming(&spec) } else { run_experiment(&spec) }?;
    Ok(rows)
}

/// Quotes a CSV cell that may contain commas.
fn csv_quote(text: &str) -> String {
    format!("\"{}\"", text.replace('"', "\"\""))
}

fn montecarlo_long_rows(
    distribution: DistributionSpec,
    rows: &[ExperimentRow],
) -> Vec<String> {
    let label = csv_quote(&distribution.to_string());
    rows.iter()
        .flat_map(|row| {
            let label = label.clone();
            row.replicates.iter().map(move |rep| {
                format!(
                    "{},{},{},{},{},{}",
                    rep.n, label, rep.replication, rep.anarchy_minus_one, rep.active_fraction,
                    row.seed
                )
            })
        })
        .collect()
}

const MONTECARLO_HEADER: &str = "N,dist,rep,anarchy_minus_one,active_proportion,seed";

/// Table-shaped lines: one row per population size, one column per
/// distribution, cells are replication means of `pick`.
fn table_lines(
    runs: &[(DistributionSpec, Vec<ExperimentRow>)],
    pick: fn(&ExperimentRow) -> f64,
) -> (String, Vec<String>) {
    let header = std::iter::once("N".to_string())
        .chain(runs.iter().map(|(d, _)| csv_quote(&d.to_string())))
        .collect::<Vec<_>>()
        .join(",");
    let points = runs[0].1.len();
    let lines = (0..points)
        .map(|i| {
            let mut cells = vec![runs[0].1[i].n.to_string()];
            for (_, rows) in runs {
                cells.push(pick(&rows[i]).to_string());
            }
            cells.join(",")
        })
        .collect();
    (header, lines)
}

fn run_montecarlo(args: MontecarloArgs) -> Result<(), CliError> {
    let grid = parse_counts(&args.n)?;
    let config = json!({
        "dist": args.dist,
        "n": grid,
        "seed": args.seed,
        "reps": args.reps,
        "m": args.m,
        "paper_tables": args.paper_tables,
        "streaming": args.streaming,
    });

    if args.paper_tables {
        let runs: Vec<(DistributionSpec, Vec<ExperimentRow>)> = standard_distributions()
            .into_iter()
            .map(|d| {
                experiment_rows(d, &grid, args.seed, args.reps, args.m, args.streaming)
                    .map(|rows| (d, rows))
            })
            .collect::<Result<_, _>>()?;
        let anarchy_table = table_lines(&runs, |row| row.anarchy_summary().mean);
        let active_table = table_lines(&runs, |row| row.active_summary().mean);
        return match args.format.unwrap_or(Format::Csv) {
            Format::Csv => output::deliver(
                args.out.as_ref(),
                &output::csv_sections(
                    "montecarlo",
                    &config,
                    &[
                        ("anarchy_minus_one (mean)", anarchy_table.0.as_str(), anarchy_table.1),
                        ("active_proportion (mean)", active_table.0.as_str(), active_table.1),
                    ],
                ),
            ),
            Format::Json => {
                let columns: Vec<String> =
                    runs.iter().map(|(d, _)| d.to_string()).collect();
                let shape = |pick: fn(&ExperimentRow) -> f64| -> Vec<Value> {
                    (0..grid.len())
                        .map(|i| {
                            json!({
                                "n": runs[0].1[i].n,
                                "means": runs.iter().map(|(_, r)| pick(&r[i])).collect::<Vec<f64>>(),
                            })
                        })
                        .collect()
                };
                let payload = json!({
                    "columns": columns,
                    "anarchy_minus_one": shape(|row| row.anarchy_summary().mean),
                    "active_proportion": shape(|row| row.active_summary().mean),
                });
                output::deliver(
                    args.out.as_ref(),
                    &output::json_document("montecarlo", config, payload),
                )
            }
        };
    }

    let distribution: DistributionSpec =
        args.dist.as_deref().expect("clap enforces --dist without --paper-tables").parse()?;
    let rows = experiment_rows(distribution, &grid, args.seed, args.reps, args.m, args.streaming)?;
    match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let lines = montecarlo_long_rows(distribution, &rows);
            output::deliver(
                args.out.as_ref(),
                &output::csv_document("montecarlo", &config, MONTECARLO_HEADER, &lines),
            )
        }
        Format::Json => {
            let label = distribution.to_string();
            let flat: Vec<Value> = rows
                .iter()
                .flat_map(|row| {
                    row.replicates.iter().map(|rep| {
                        json!({
                            "n": rep.n,
                            "dist": label,
                            "rep": rep.replication,
                            "anarchy_minus_one": rep.anarchy_minus_one,
                            "active_proportion": rep.active_fraction,
                            "seed": row.seed,
                        })
                    })
                })
                .collect();
            output::deliver(
                args.out.as_ref(),
                &output::json_document("montecarlo", config, json!({ "rows": flat })),
            )
        }
    }
}

// ----------------------------------------------------------------- learn --

const LEARN_HEADER: &str = "t,agent,strategy,payoff,avg_strategy,distance_to_eq";

/// Per-checkpoint state of one learning run.
struct LearnPoint {
    t: usize,
    strategies: Vec<f64>,
    payoffs: Vec<f64>,
    averages: Vec<f64>,
    distance: f64,
}

fn learn_points(
    trace: &LearningTrace,
    equilibrium: &EquilibriumSolution,
    every_round: bool,
) -> Vec<LearnPoint> {
    let t_max = trace.strategies.len();
    let n = equilibrium.production.len();
    let marks: Vec<usize> = if every_round {
        (1..=t_max).collect()
    } else {
        let mut powers: Vec<usize> = std::iter::successors(Some(1usize), |&t| {
            t.checked_mul(2).filter(|&next| next <= t_max)
        })
        .collect();
        if *powers.last().unwrap() != t_max {
            powers.push(t_max);
        }
        powers
    };
    let mut sums = vec![0.0f64; n];
    let mut next = marks.iter().copied().peekable();
    let mut points = Vec::with_capacity(marks.len());
    for (idx, row) in trace.strategies.iter().enumerate() {
        let t = idx + 1;
        for (sum, &x) in sums.iter_mut().zip(row) {
            *sum += x;
        }
        if next.peek() == Some(&t) {
            next.next();
            let averages: Vec<f64> = sums.iter().map(|s| s / t as f64).collect();
            let distance = averages
                .iter()
                .zip(&equilibrium.production)
                .map(|(a, &e)| (a - e).abs())
                .fold(0.0f64, f64::max);
            points.push(LearnPoint {
                t,
                strategies: row.clone(),
                payoffs: trace.payoffs[idx].clone(),
                averages,
                distance,
            });
        }
    }
    points
}

fn run_learn(args: LearnArgs) -> Result<(), CliError> {
    let profile = load_profile(&args.profile)?;
    let (lower, upper) = args
        .bounds
        .split_once(',')
        .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)))
        .ok_or_else(|| {
            CliError::Validation(format!("--box expects LOWER,UPPER, got {:?}", args.bounds))
        })?;
    let bounds = StrategyBox::new(lower, upper)?;
    let mut config = LearningConfig::new(profile.clone(), bounds, args.t)?;
    if let Some(eta0) = args.eta0 {
        config = config.with_eta0(eta0)?;
    }
    config = config.with_regret_grid(args.grid)?;

    let equilibrium = solve_proportional(&profile)?;
    if !config.equilibrium_in_box(&equilibrium) {
        eprintln!(
            "warning: the equilibrium lies outside the strategy box [{lower}, {upper}]; \
             averaged play will stop at the box edge instead of converging to it"
        );
    }
    let trace = learning::run(&config);
    let points = learn_points(
        &trace,
        &equilibrium,
        matches!(args.checkpoints, CheckpointsArg::All),
    );

    let config_json = json!({
        "profile": profile,
        "box": [lower, upper],
        "t": args.t,
        "eta0": config.eta0(),
        "grid": args.grid,
    });
    match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let lines: Vec<String> = points
                .iter()
                .flat_map(|p| {
                    (0..p.strategies.len()).map(move |i| {
                        format!(
                            "{},{},{},{},{},{}",
                            p.t, i, p.strategies[i], p.payoffs[i], p.averages[i], p.distance
                        )
                    })
                })
                .collect();
            output::deliver(
                args.out.as_ref(),
                &output::csv_document("learn", &config_json, LEARN_HEADER, &lines),
            )
        }
        Format::Json => {
            let rows: Vec<Value> = points
                .iter()
                .flat_map(|p| {
                    (0..p.strategies.len()).map(move |i| {
                        json!({
                            "t": p.t,
                            "agent": i,
                            "strategy": p.strategies[i],
                            "payoff": p.payoffs[i],
                            "avg_strategy": p.averages[i],
                            "distance_to_eq": p.distance,
                        })
                    })
                })
                .collect();
            let payload = json!({
                "rows": rows,
                "average": trace.average,
                "regret": trace.regret,
                "equilibrium": equilibrium.production,
            });
            output::deliver(
                args.out.as_ref(),
                &output::json_document("learn", config_json, payload),
            )
        }
    }
}

// ------------------------------------------------------- reproduce-paper --

fn run_reproduce(args: ReproduceArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out_dir).map_err(|e| {
        CliError::Validation(format!("creating {}: {e}", args.out_dir.display()))
    })?;
    let config = json!({
        "seed": args.seed,
        "reps": args.reps,
        "extended": args.extended,
    });
    let mut written = Vec::new();

    // Closed-form sweeps over identical producers, three exponents.
    let sweep_grid = [2usize, 10, 100, 1_000, 10_000];
    for alpha in [1.5, 2.0, 3.0] {
        let rows = sweep_rows(alpha, 1.0, &sweep_grid, 1.0)?;
        let lines: Vec<String> = rows.iter().map(sweep_csv_row).collect();
        let sweep_config = json!({ "alpha": alpha, "c": 1.0, "n": sweep_grid, "m": 1.0 });
        let path = args.out_dir.join(format!("sweep_alpha_{alpha}.csv"));
        output::write_file(
            &path,
            &output::csv_document("sweep", &sweep_config, SWEEP_HEADER, &lines),
        )?;
        written.push(path);
    }

    // Six-distribution Monte Carlo grid, long rows plus the two shaped tables.
    let mut grid = vec![100usize, 1_000, 10_000, 100_000];
    if args.extended {
        grid.extend([1_000_000, 10_000_000]);
    }
    let runs: Vec<(DistributionSpec, Vec<ExperimentRow>)> = standard_distributions()
        .into_iter()
        .map(|d| {
            experiment_rows(d, &grid, args.seed, args.reps, 1.0, args.extended)
                .map(|rows| (d, rows))
        })
        .collect::<Result<_, _>>()?;

    let long_lines: Vec<String> = runs
        .iter()
        .flat_map(|(d, rows)| montecarlo_long_rows(*d, rows))
        .collect();
    let path = args.out_dir.join("montecarlo.csv");
    output::write_file(
        &path,
        &output::csv_document("montecarlo", &config, MONTECARLO_HEADER, &long_lines),
    )?;
    written.push(path);

    let (header, lines) = table_lines(&runs, |row| row.anarchy_summary().mean);
    let path = args.out_dir.join("table1.csv");
    output::write_file(&path, &output::csv_document("montecarlo", &config, &header, &lines))?;
    written.push(path);

    let (header, lines) = table_lines(&runs, |row| row.active_summary().mean);
    let path = args.out_dir.join("table2.csv");
    output::write_file(&path, &output::csv_document("montecarlo", &config, &header, &lines))?;
    written.push(path);

    // Learning benchmark: three identical quadratic producers.
    let profile = CostProfile::identical(
        contest::CostFunction::power(1.0, 2.0)?,
        3,
        1.0,
    )?;
    let bounds = StrategyBox::new(0.05, 2.0)?;
    let learn_config = LearningConfig::new(profile.clone(), bounds, 100_000)?;
    let equilibrium = solve_proportional(&profile)?;
    let trace = learning::run(&learn_config);
    let points = learn_points(&trace, &equilibrium, false);
    let lines: Vec<String> = points
        .iter()
        .flat_map(|p| {
            (0..p.strategies.len()).map(move |i| {
                format!(
                    "{},{},{},{},{},{}",
                    p.t, i, p.strategies[i], p.payoffs[i], p.averages[i], p.distance
                )
            })
        })
        .collect();
    let learn_config_json = json!({
        "profile": profile, "box": [0.05, 2.0], "t": 100_000, "grid": 256,
    });
    let path = args.out_dir.join("learning.csv");
    output::write_file(
        &path,
        &output::csv_document("learn", &learn_config_json, LEARN_HEADER, &lines),
    )?;
    written.push(path);

    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

// --------------------------------------------------------------- helpers --

fn load_profile(path: &PathBuf) -> Result<CostProfile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("reading {}: {e}", path.display())))?;
    Ok(CostProfile::from_json(&text)?)
}

/// Parses a population count, accepting plain integers and scientific
/// notation with an integral value ("1e5").
fn parse_count(text: &str) -> Result<usize, CliError> {
    let t = text.trim();
    if let Ok(v) = t.parse::<usize>() {
        return Ok(v);
    }
    let bad = || CliError::Validation(format!("{t:?} is not a population count"));
    let v: f64 = t.parse().map_err(|_| bad())?;
    if v.is_finite() && v >= 0.0 && v <= 2f64.powi(53) && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(bad())
    }
}

fn parse_counts(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',').map(parse_count).collect()
}
