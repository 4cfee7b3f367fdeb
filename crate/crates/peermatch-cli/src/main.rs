//! Command-line frontend: solve, check, measure, bound, enumerate, generate,
//! and ingest matching-market instances. All output is deterministic for a
//! given flag set.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use peermatch::io::{
    self, DesirabilityModel, DesirabilitySpec, HouseEntry, InstanceConfig, MatchingRecord,
    MergePolicy, QuotaRule, RandomInstanceSpec, RunArtifacts, ScoringModel, ScoringSpec,
    WeightModel,
};
use peermatch::metrics;
use peermatch::oracle;
use peermatch::solvers::{GreedyConfig, McmcConfig, PivotRule};
use peermatch::stability;
use peermatch::{Instance, Matching};

#[derive(Parser)]
#[command(name = "peermatch", version, about = "Matching markets with peer effects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the greedy approved-swap solver from a seeded random matching.
    SolveGreedy(SolveArgs),
    /// Run the MCMC heat-bath solver from a seeded random matching.
    SolveMcmc(SolveArgs),
    /// Check a matching for two-sided (or one-sided) exchange stability.
    CheckStability(MatchingArgs),
    /// Edge metrics of a matching: internal/cross weights and gamma.
    Metrics(MatchingArgs),
    /// Price-of-anarchy bound report for an instance.
    Bounds(BoundsArgs),
    /// Exhaustive enumeration: welfare extremes, stable set, exact prices.
    Oracle(OracleArgs),
    /// Emit a constructed or random instance.
    Generate {
        #[command(subcommand)]
        what: GenerateCommand,
    },
    /// Convert an edge-list file into an instance.
    Ingest(IngestArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON path.
    #[arg(long)]
    instance: PathBuf,
    /// Seed for the initial matching and the solver.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration cap (accepted swaps for greedy, proposals for MCMC).
    #[arg(long)]
    max_iters: Option<u64>,
    /// Greedy pivot rule: first or best.
    #[arg(long, default_value = "first")]
    pivot: String,
    /// MCMC logistic gain.
    #[arg(long, default_value_t = 1.0)]
    temperature: f64,
    /// Linear gain schedule endpoint (constant gain when absent).
    #[arg(long)]
    final_temperature: Option<f64>,
    /// Polish the MCMC result with the greedy solver.
    #[arg(long)]
    polish: bool,
    /// Directory for run artifacts (run.json, matching.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the iteration trace as CSV.
    #[arg(long)]
    trace_csv: Option<PathBuf>,
    /// Batch mode: run one solve per seed in `a..b`, writing into --out.
    #[arg(long)]
    seeds: Option<String>,
    /// With --seeds: also write per-seed trace CSVs into --out.
    #[arg(long)]
    traces: bool,
    /// Output format for stdout reports.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct MatchingArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Matching JSON path (as written by the solvers).
    #[arg(long)]
    matching: PathBuf,
    /// Use the one-sided checker (zero house scoring only).
    #[arg(long)]
    one_sided: bool,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    instance: PathBuf,
    /// gamma-star source: exact, heuristic, or auto.
    #[arg(long, default_value = "auto")]
    gamma: String,
    /// Enumeration cap for the exact gamma-star.
    #[arg(long, default_value_t = oracle::DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    /// Seed for the heuristic search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = oracle::DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Four-student family whose exact price of anarchy is k/2.
    UnboundedPoa {
        #[arg(long)]
        k: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid family on which the simple bound is tight.
    Tight {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge probability.
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        /// `unit` or `LO:HI`.
        #[arg(long, default_value = "unit")]
        weights: String,
        /// `uniform`, `int:MAX`, `zero`, or `subjective`.
        #[arg(long, default_value = "uniform")]
        d_model: String,
        /// `zero` or `additive`.
        #[arg(long, default_value = "additive")]
        scoring: String,
        /// Explicit quotas `q0,q1,...` (default: equal split).
        #[arg(long)]
        quotas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct IngestArgs {
    /// Edge-list file: `u v [w]` lines, `#` comments.
    #[arg(long)]
    edges: PathBuf,
    /// Merge policy for directional duplicates: max, min, sum, mean.
    #[arg(long, default_value = "max")]
    policy: String,
    /// Explicit quotas `q0,q1,...`; default equal split over --m houses.
    #[arg(long)]
    quotas: Option<String>,
    /// House count for the equal split.
    #[arg(long)]
    m: Option<usize>,
    /// Explicit house values `d0,d1,...`.
    #[arg(long)]
    d: Option<String>,
    /// Seeded uniform house values `LO:HI`.
    #[arg(long)]
    d_uniform: Option<String>,
    /// `zero` or `additive` (seeded uniform 0..10 scores).
    #[arg(long, default_value = "zero")]
    scoring: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Internal(String),
}

impl CliError {
    fn validation(err: impl std::fmt::Display) -> Self {
        Self::Validation(err.to_string())
    }
}

impl From<io::IoError> for CliError {
    fn from(err: io::IoError) -> Self {
        match err {
            io::IoError::Json(e) => CliError::Validation(e.to_string()),
            io::IoError::Io(e) => CliError::Validation(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::SolveGreedy(args) => solve(args, Algorithm::Greedy),
        Command::SolveMcmc(args) => solve(args, Algorithm::Mcmc),
        Command::CheckStability(args) => check_stability(args),
        Command::Metrics(args) => metrics_report(args),
        Command::Bounds(args) => bounds_report(args),
        Command::Oracle(args) => oracle_report(args),
        Command::Generate { what } => generate(what),
        Command::Ingest(args) => ingest(args),
    }
}

#[derive(Clone, Copy)]
enum Algorithm {
    Greedy,
    Mcmc,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Mcmc => "mcmc",
        }
    }
}

fn load_instance(path: &Path) -> Result<(InstanceConfig, Instance), CliError> {
    let config = InstanceConfig::from_path(path)?;
    let instance = config.build().map_err(CliError::validation)?;
    Ok((config, instance))
}

fn solve(args: SolveArgs, algorithm: Algorithm) -> Result<(), CliError> {
    let (config, inst) = load_instance(&args.instance)?;
    if let Some(range) = &args.seeds {
        let out = args.out.as_deref().ok_or_else(|| {
            CliError::Validation("--seeds requires --out for per-seed files".into())
        })?;
        if args.trace_csv.is_some() {
            return Err(CliError::Validation(
                "use --traces for per-seed trace files in batch mode".into(),
            ));
        }
        let (lo, hi) = parse_seed_range(range)?;
        std::fs::create_dir_all(out).map_err(CliError::validation)?;
        let write_traces = args.traces;
        std::thread::scope(|scope| -> Result<(), CliError> {
            let mut handles = Vec::new();
            for seed in lo..hi {
                let (config, inst, args) = (&config, &inst, &args);
                handles.push(scope.spawn(move || -> Result<(), CliError> {
                    let (artifacts, matching, trace) =
                        run_one(config, inst, args, algorithm, seed)?;
                    write_json(&out.join(format!("run-{seed}.json")), &artifacts)?;
                    write_json(
                        &out.join(format!("matching-{seed}.json")),
                        &MatchingRecord::new(config, &matching),
                    )?;
                    if write_traces {
                        io::save_trace_csv(&out.join(format!("trace-{seed}.csv")), &trace)?;
                    }
                    Ok(())
                }));
            }
            for handle in handles {
                handle.join().expect("solver thread panicked")?;
            }
            Ok(())
        })?;
        return Ok(());
    }

    if let Some(out) = &args.out {
        std::fs::create_dir_all(out).map_err(CliError::validation)?;
    }
    let (artifacts, matching, trace) = run_one(&config, &inst, &args, algorithm, args.seed)?;
    if let Some(path) = &args.trace_csv {
        io::save_trace_csv(path, &trace)?;
    }
    if let Some(out) = &args.out {
        write_json(&out.join("run.json"), &artifacts)?;
        write_json(
            &out.join("matching.json"),
            &MatchingRecord::new(&config, &matching),
        )?;
    } else {
        emit(&args.format, &artifacts, |csv| {
            flat(csv, "algorithm", &artifacts.algorithm);
            flat(csv, "seed", artifacts.seed);
            flat(csv, "iterations", artifacts.iterations);
            flat(csv, "evaluations", artifacts.evaluations);
            flat(csv, "terminated", format!("{:?}", artifacts.terminated));
            flat(csv, "final_welfare", artifacts.final_welfare);
            flat(csv, "final_potential", artifacts.final_potential);
            flat(csv, "best_welfare", artifacts.best_welfare);
        })?;
    }
    Ok(())
}

fn run_one(
    config: &InstanceConfig,
    inst: &Instance,
    args: &SolveArgs,
    algorithm: Algorithm,
    seed: u64,
) -> Result<(RunArtifacts, Matching, peermatch::SolveTrace), CliError> {
    let init = peermatch::random_matching(inst, seed);
    let (matching, trace) = match algorithm {
        Algorithm::Greedy => {
            let cfg = GreedyConfig {
                max_iterations: args.max_iters.unwrap_or(1_000_000),
                pivot_rule: parse_pivot(&args.pivot)?,
                seed,
            };
            peermatch::solve_greedy(inst, &init, &cfg)
        }
        Algorithm::Mcmc => {
            if args.temperature <= 0.0 {
                return Err(CliError::Validation(
                    "temperature must be positive".into(),
                ));
            }
            let cfg = McmcConfig {
                max_iterations: args.max_iters.unwrap_or(100_000),
                temperature: args.temperature,
                final_temperature: args.final_temperature,
                seed,
                polish: args.polish,
            };
            peermatch::solve_mcmc(inst, &init, &cfg)
        }
    };
    let artifacts = RunArtifacts::new(config, inst, algorithm.name(), seed, &matching, &trace);
    Ok((artifacts, matching, trace))
}

fn check_stability(args: MatchingArgs) -> Result<(), CliError> {
    let (config, inst) = load_instance(&args.instance)?;
    let matching = load_matching(&args.matching, &config, &inst)?;
    let report = if args.one_sided {
        stability::is_one_sided_exchange_stable(&inst, &matching)
            .map_err(CliError::validation)?
    } else {
        stability::is_two_sided_exchange_stable(&inst, &matching)
    };
    emit(&args.format, &report, |csv| {
        flat(csv, "stable", report.stable);
        let (s, t) = report
            .witness
            .map(|(s, t)| (s.to_string(), t.to_string()))
            .unwrap_or_default();
        flat(csv, "witness_s", s);
        flat(csv, "witness_t", t);
        flat(csv, "pairs_checked", report.pairs_checked);
    })
}

fn metrics_report(args: MatchingArgs) -> Result<(), CliError> {
    let (config, inst) = load_instance(&args.instance)?;
    let matching = load_matching(&args.matching, &config, &inst)?;
    let report = metrics::partition_metrics(&inst, &matching);
    emit(&args.format, &report, |csv| {
        flat(csv, "total_edge_weight", report.total_edge_weight);
        flat(csv, "internal_weight", report.internal_weight);
        flat(csv, "gamma", report.gamma);
        for (a, row) in report.cross_weights.iter().enumerate() {
            for (b, w) in row.iter().enumerate().skip(a) {
                flat(csv, &format!("cross_{a}_{b}"), w);
            }
        }
    })
}

fn bounds_report(args: BoundsArgs) -> Result<(), CliError> {
    let (_, inst) = load_instance(&args.instance)?;
    let (gamma_star, exact) = match args.gamma.as_str() {
        "exact" => (
            metrics::gamma_star_exact(&inst, args.cap).map_err(CliError::validation)?,
            true,
        ),
        "heuristic" => (heuristic_gamma(&inst, args.seed), false),
        "auto" => match metrics::gamma_star_exact(&inst, args.cap) {
            Ok(v) => (v, true),
            Err(metrics::BoundsError::TooLarge(_)) => (heuristic_gamma(&inst, args.seed), false),
            Err(other) => return Err(CliError::validation(other)),
        },
        other => {
            return Err(CliError::Validation(format!(
                "unknown gamma source `{other}` (use exact, heuristic, or auto)"
            )))
        }
    };
    let report = metrics::bound_report(&inst, gamma_star, exact);
    emit(&args.format, &report, |csv| {
        flat(csv, "m", report.m);
        flat(csv, "q", opt(report.q));
        flat(csv, "gamma_star", report.gamma_star);
        flat(csv, "gamma_star_exact", report.gamma_star_exact);
        flat(csv, "q_max", report.q_max);
        flat(csv, "w_max", report.w_max);
        flat(csv, "d_delta", opt(report.d_delta));
        flat(csv, "bound_simple", opt(report.bound_simple));
        flat(
            csv,
            "bound_simple_violation",
            report.bound_simple_violation.clone().unwrap_or_default(),
        );
        flat(csv, "bound_general", opt(report.bound_general));
        flat(
            csv,
            "bound_general_violation",
            report.bound_general_violation.clone().unwrap_or_default(),
        );
    })
}

fn heuristic_gamma(inst: &Instance, seed: u64) -> f64 {
    metrics::gamma_star_heuristic(
        inst,
        &metrics::GammaHeuristicConfig {
            seed,
            ..Default::default()
        },
    )
}

fn oracle_report(args: OracleArgs) -> Result<(), CliError> {
    let (_, inst) = load_instance(&args.instance)?;
    let summary = oracle::exact_extremes(&inst, args.cap).map_err(CliError::validation)?;
    emit(&args.format, &summary, |csv| {
        flat(csv, "matchings_enumerated", summary.matchings_enumerated);
        flat(csv, "stable_count", summary.stable_count);
        flat(csv, "max_welfare", summary.max_welfare);
        flat(csv, "max_stable_welfare", summary.max_stable_welfare);
        flat(csv, "min_stable_welfare", summary.min_stable_welfare);
        flat(csv, "exact_poa", summary.exact_poa);
        flat(csv, "exact_pos", summary.exact_pos);
        flat(csv, "gamma_star", summary.gamma_star);
        flat(csv, "min_stable_gamma", summary.min_stable_gamma);
    })
}

fn generate(what: GenerateCommand) -> Result<(), CliError> {
    let (config, out) = match what {
        GenerateCommand::UnboundedPoa { k, out } => {
            let config = io::generate_unbounded_poa(k).map_err(generator_error)?;
            (config, out)
        }
        GenerateCommand::Tight { m, k, out } => {
            let config = io::generate_tight_example(m, k).map_err(generator_error)?;
            (config, out)
        }
        GenerateCommand::Random {
            n,
            m,
            seed,
            p,
            weights,
            d_model,
            scoring,
            quotas,
            out,
        } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Validation(format!(
                    "edge probability {p} outside [0, 1]"
                )));
            }
            let spec = RandomInstanceSpec {
                students: n,
                houses: m,
                seed,
                edge_probability: p,
                weights: parse_weights(&weights)?,
                desirability: parse_d_model(&d_model)?,
                scoring: parse_scoring_model(&scoring)?,
                quotas: match quotas {
                    Some(list) => QuotaRule::Explicit(parse_usize_list(&list)?),
                    None => QuotaRule::EqualSplit,
                },
            };
            (io::generate_random_instance(&spec), out)
        }
    };
    emit_instance(&config, out.as_deref())
}

fn generator_error(err: io::GeneratorError) -> CliError {
    match err {
        io::GeneratorError::InvalidParameter(msg) => CliError::Validation(msg),
        io::GeneratorError::SelfCheckFailed(msg) => CliError::Internal(msg),
    }
}

fn ingest(args: IngestArgs) -> Result<(), CliError> {
    let policy = match args.policy.as_str() {
        "max" => MergePolicy::Max,
        "min" => MergePolicy::Min,
        "sum" => MergePolicy::Sum,
        "mean" => MergePolicy::Mean,
        other => {
            return Err(CliError::Validation(format!(
                "unknown merge policy `{other}`"
            )))
        }
    };
    let load = io::load_edge_list(&args.edges, policy)?;
    if load.self_loops_dropped > 0 {
        eprintln!("warning: dropped {} self-loops", load.self_loops_dropped);
    }
    let n = load.node_count;

    let quotas: Vec<usize> = match (&args.quotas, args.m) {
        (Some(list), _) => parse_usize_list(list)?,
        (None, Some(m)) => {
            if m == 0 {
                return Err(CliError::Validation("--m must be positive".into()));
            }
            let base = n / m;
            let remainder = n % m;
            (0..m).map(|h| base + usize::from(h < remainder)).collect()
        }
        (None, None) => {
            return Err(CliError::Validation(
                "provide --quotas or --m for the house layout".into(),
            ))
        }
    };
    let m = quotas.len();

    let values: Vec<f64> = match (&args.d, &args.d_uniform) {
        (Some(list), _) => parse_f64_list(list)?,
        (None, Some(range)) => {
            let (lo, hi) = parse_f64_pair(range)?;
            uniform_values(args.seed, m, lo, hi)
        }
        (None, None) => vec![0.0; m],
    };
    if values.len() != m {
        return Err(CliError::Validation(format!(
            "{} house values for {m} houses",
            values.len()
        )));
    }

    let scoring = match args.scoring.as_str() {
        "zero" => ScoringSpec::zero(),
        "additive" => ScoringSpec::Table(uniform_table(args.seed.wrapping_add(1), n, m, 0.0, 10.0)),
        other => return Err(CliError::Validation(format!("unknown scoring `{other}`"))),
    };

    let config = InstanceConfig {
        students: n,
        houses: quotas
            .into_iter()
            .enumerate()
            .map(|(h, quota)| HouseEntry {
                id: h as u32,
                quota,
                desirability: values[h],
            })
            .collect(),
        edges: load.edges,
        desirability: DesirabilitySpec::objective(),
        scoring,
        seed: args.seed,
    };
    // surface quota/weight problems now rather than at first use
    config.build().map_err(CliError::validation)?;
    emit_instance(&config, args.out.as_deref())
}

fn uniform_values(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    // reuse the library generator so values match `generate random`
    let config = io::generate_random_instance(&RandomInstanceSpec {
        students: 0,
        houses: count,
        seed,
        edge_probability: 0.0,
        weights: WeightModel::Unit,
        desirability: DesirabilityModel::UniformReal { lo, hi },
        scoring: ScoringModel::Zero,
        quotas: QuotaRule::Explicit(vec![1; count]),
    });
    config.houses.iter().map(|h| h.desirability).collect()
}

fn uniform_table(seed: u64, rows: usize, cols: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let config = io::generate_random_instance(&RandomInstanceSpec {
        students: rows,
        houses: cols,
        seed,
        edge_probability: 0.0,
        weights: WeightModel::Unit,
        desirability: DesirabilityModel::Zero,
        scoring: ScoringModel::AdditiveUniform { lo, hi },
        quotas: QuotaRule::Explicit(vec![rows; cols]),
    });
    match config.scoring {
        ScoringSpec::Table(table) => table,
        ScoringSpec::Mode(_) => unreachable!("additive model emits a table"),
    }
}

fn load_matching(
    path: &Path,
    config: &InstanceConfig,
    inst: &Instance,
) -> Result<Matching, CliError> {
    let record = MatchingRecord::from_path(path)?;
    if record.instance_hash != config.hash() {
        return Err(CliError::Validation(format!(
            "matching was produced for instance {} but this instance hashes to {}",
            record.instance_hash,
            config.hash()
        )));
    }
    Matching::from_assignment(inst, record.assignment).map_err(CliError::validation)
}

fn emit_instance(config: &InstanceConfig, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(CliError::validation)?;
            config.save(&dir.join("instance.json"))?;
            Ok(())
        }
        None => {
            print!("{}", config.to_pretty_json());
            Ok(())
        }
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(CliError::validation)
}

/// Prints a serializable report as pretty JSON or flat `key,value` CSV.
fn emit<T: serde::Serialize>(
    format: &str,
    value: &T,
    fill_csv: impl FnOnce(&mut String),
) -> Result<(), CliError> {
    match format {
        "json" => {
            let mut text = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            text.push('\n');
            print!("{text}");
            Ok(())
        }
        "csv" => {
            let mut csv = String::from("key,value\n");
            fill_csv(&mut csv);
            print!("{csv}");
            Ok(())
        }
        other => Err(CliError::Validation(format!(
            "unknown format `{other}` (use json or csv)"
        ))),
    }
}

fn flat(csv: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(csv, "{key},{value}");
}

fn opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn parse_pivot(text: &str) -> Result<PivotRule, CliError> {
    match text {
        "first" => Ok(PivotRule::FirstImprovement),
        "best" => Ok(PivotRule::BestImprovement),
        other => Err(CliError::Validation(format!(
            "unknown pivot rule `{other}` (use first or best)"
        ))),
    }
}

fn parse_seed_range(text: &str) -> Result<(u64, u64), CliError> {
    let (lo, hi) = text.split_once("..").ok_or_else(|| {
        CliError::Validation(format!("seed range `{text}` is not of the form a..b"))
    })?;
    let lo: u64 = lo
        .parse()
        .map_err(|_| CliError::Validation(format!("bad seed `{lo}`")))?;
    let hi: u64 = hi
        .parse()
        .map_err(|_| CliError::Validation(format!("bad seed `{hi}`")))?;
    if lo >= hi {
        return Err(CliError::Validation(format!(
            "empty seed range {lo}..{hi}"
        )));
    }
    Ok((lo, hi))
}

fn parse_weights(text: &str) -> Result<WeightModel, CliError> {
    if text == "unit" {
        return Ok(WeightModel::Unit);
    }
    let (lo, hi) = parse_f64_pair(text)?;
    Ok(WeightModel::Uniform { lo, hi })
}

fn parse_d_model(text: &str) -> Result<DesirabilityModel, CliError> {
    if text == "uniform" {
        return Ok(DesirabilityModel::UniformReal { lo: 0.0, hi: 10.0 });
    }
    if text == "zero" {
        return Ok(DesirabilityModel::Zero);
    }
    if text == "subjective" {
        return Ok(DesirabilityModel::SubjectiveUniform { lo: 0.0, hi: 10.0 });
    }
    if let Some(max) = text.strip_prefix("int:") {
        let max: u32 = max
            .parse()
            .map_err(|_| CliError::Validation(format!("bad integer bound `{max}`")))?;
        return Ok(DesirabilityModel::UniformInt { max });
    }
    Err(CliError::Validation(format!(
        "unknown desirability model `{text}`"
    )))
}

fn parse_scoring_model(text: &str) -> Result<ScoringModel, CliError> {
    match text {
        "zero" => Ok(ScoringModel::Zero),
        "additive" => Ok(ScoringModel::AdditiveUniform { lo: 0.0, hi: 10.0 }),
        other => Err(CliError::Validation(format!("unknown scoring `{other}`"))),
    }
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("bad count `{tok}`")))
        })
        .collect()
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("bad value `{tok}`")))
        })
        .collect()
}

fn parse_f64_pair(text: &str) -> Result<(f64, f64), CliError> {
    let (lo, hi) = text.split_once(':').ok_or_else(|| {
        CliError::Validation(format!("`{text}` is not of the form LO:HI"))
    })?;
    let lo: f64 = lo
        .parse()
        .map_err(|_| CliError::Validation(format!("bad bound `{lo}`")))?;
    let hi: f64 = hi
        .parse()
        .map_err(|_| CliError::Validation(format!("bad bound `{hi}`")))?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(CliError::Validation(format!("empty range {lo}:{hi}")));
    }
    Ok((lo, hi))
}
