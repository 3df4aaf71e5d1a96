//! Command-line front end: exact functional evaluation, deterministic-model
//! scans, direction optimization, Monte Carlo simulation, derivation checks,
//! and sweep-table emission for plots.
//!
//! Exit codes: 0 success, 1 scientific check failure, 2 usage/config error,
//! 3 insufficient data, 4 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use tempo_bell_core as core;
use tempo_bell_core::{
    BlochVector, CorrelationSet, DirectionTriple, ExperimentConfig, QubitState, SpinRotation,
    StrategyMixture,
};

const EXIT_CHECK_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INSUFFICIENT: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "tempo-bell",
    version,
    about = "Temporal Bell inequality toolkit: exact correlators, deterministic models, and the quantum violation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the quantum correlation set and Bell functional exactly.
    Exact(ExactArgs),
    /// Scan deterministic strategies and mixtures against the inequality.
    Lhv(LhvArgs),
    /// Maximize the quantum functional over direction triples.
    Optimize(OptimizeArgs),
    /// Simulate the sequential-measurement experiment.
    Simulate(SimulateArgs),
    /// Tabulate the maximized functional as a function of u = b.c.
    Sweep(SweepArgs),
    /// Check the derivation chain on random mixtures.
    DeriveCheck(DeriveCheckArgs),
}

#[derive(Args)]
struct DirectionFlags {
    /// First direction as x,y,z (normalized on input).
    #[arg(long, value_name = "X,Y,Z")]
    a: Option<String>,
    /// Second direction as x,y,z.
    #[arg(long, value_name = "X,Y,Z")]
    b: Option<String>,
    /// Third direction as x,y,z.
    #[arg(long, value_name = "X,Y,Z")]
    c: Option<String>,
    /// Set a = (b - c)/|b - c|: the corrected sqrt(2)-violating instance.
    #[arg(long, conflicts_with = "a")]
    a_bisect_diff: bool,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    directions: DirectionFlags,
    /// Emit JSON instead of a human-readable table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct LhvArgs {
    /// JSON file holding 8 mixture weights in enumeration order.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["scan_extremals", "random"])]
    mixture: Option<PathBuf>,
    /// Evaluate all 8 deterministic strategies.
    #[arg(long)]
    scan_extremals: bool,
    /// Check N random mixtures against the inequality.
    #[arg(long, value_name = "N", conflicts_with = "scan_extremals")]
    random: Option<u64>,
    #[arg(long, env = "TEMPO_BELL_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, default_value_t = 20)]
    restarts: u32,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, env = "TEMPO_BELL_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    directions: DirectionFlags,
    /// JSON config file; explicit flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, env = "TEMPO_BELL_SEED")]
    seed: Option<u64>,
    /// Initial state: "mixed" or "bloch:x,y,z" (pure state along that axis).
    #[arg(long)]
    initial: Option<String>,
    /// Precession as "axis:x,y,z,rate"; omitted means free evolution.
    #[arg(long)]
    precession: Option<String>,
    /// The three standing measurement times as t1,t2,t3.
    #[arg(long)]
    times: Option<String>,
    /// Number of deterministic shards (result is shard-count independent).
    #[arg(long, default_value_t = 1)]
    shards: u32,
    /// Significance threshold for the violation verdict, in standard errors.
    #[arg(long, default_value_t = 3.0)]
    sigma: f64,
    /// Also write the JSON result (plus manifest) to this file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_name = "N")]
    grid_points: u32,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    format: SweepFormat,
}

#[derive(Args)]
struct DeriveCheckArgs {
    #[arg(long, value_name = "N", default_value_t = 1000)]
    random: u64,
    #[arg(long, env = "TEMPO_BELL_SEED", default_value_t = 0)]
    seed: u64,
}

/// Recorded alongside every output; re-running the recorded subcommand with
/// the recorded configuration reproduces the output bit-exactly.
#[derive(Serialize)]
struct RunManifest {
    subcommand: &'static str,
    config: serde_json::Value,
    tool_version: &'static str,
    seed: Option<u64>,
    timestamp: String,
}

impl RunManifest {
    fn new(subcommand: &'static str, config: serde_json::Value, seed: Option<u64>) -> Self {
        Self {
            subcommand,
            config,
            tool_version: env!("CARGO_PKG_VERSION"),
            seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

enum CliError {
    Usage(String),
    Insufficient(String),
    Io(String),
    CheckFailure(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Insufficient(_) => EXIT_INSUFFICIENT,
            CliError::Io(_) => EXIT_IO,
            CliError::CheckFailure(_) => EXIT_CHECK_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Insufficient(m)
            | CliError::Io(m)
            | CliError::CheckFailure(m) => m,
        }
    }
}

impl From<core::Error> for CliError {
    fn from(err: core::Error) -> Self {
        match err {
            core::Error::InsufficientTrials { .. } => CliError::Insufficient(err.to_string()),
            _ => CliError::Usage(err.to_string()),
        }
    }
}

fn parse_floats(text: &str, expected: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("cannot parse {what} '{text}': {e}")))?;
    if parts.len() != expected {
        return Err(CliError::Usage(format!(
            "{what} '{text}' must have {expected} comma-separated components"
        )));
    }
    Ok(parts)
}

fn parse_direction(text: &str, what: &str) -> Result<BlochVector, CliError> {
    let v = parse_floats(text, 3, what)?;
    BlochVector::new(v[0], v[1], v[2]).map_err(CliError::from)
}

fn resolve_triple(flags: &DirectionFlags) -> Result<DirectionTriple, CliError> {
    let b = match &flags.b {
        Some(text) => parse_direction(text, "--b")?,
        None => BlochVector::z_axis(),
    };
    let c = match &flags.c {
        Some(text) => parse_direction(text, "--c")?,
        None => BlochVector::x_axis(),
    };
    let a = if flags.a_bisect_diff {
        BlochVector::new(b.x - c.x, b.y - c.y, b.z - c.z)
            .map_err(|e| CliError::Usage(format!("--a-bisect-diff with b = c: {e}")))?
    } else {
        match &flags.a {
            Some(text) => parse_direction(text, "--a")?,
            None => {
                return Err(CliError::Usage(
                    "direction a is required (--a x,y,z or --a-bisect-diff)".into(),
                ))
            }
        }
    };
    Ok(DirectionTriple { a, b, c })
}

fn triple_json(t: &DirectionTriple) -> serde_json::Value {
    json!({
        "a": [t.a.x, t.a.y, t.a.z],
        "b": [t.b.x, t.b.y, t.b.z],
        "c": [t.c.x, t.c.y, t.c.z],
    })
}

fn print_report(p: &CorrelationSet, report: &core::ViolationReport) {
    println!(
        "correlators   P(a,b) = {:.9}  P(a,c) = {:.9}  P(b,c) = {:.9}",
        p.p_ab, p.p_ac, p.p_bc
    );
    if !p.is_exact() {
        println!(
            "std errors    se_ab  = {:.9}  se_ac  = {:.9}  se_bc  = {:.9}",
            p.se_ab, p.se_ac, p.se_bc
        );
    }
    println!(
        "functional    |P(a,b) - P(a,c)| + P(b,c) = {:.9}",
        report.functional_value
    );
    println!("classical bound {:.1}", report.classical_bound);
    match report.margin_se {
        Some(se) => println!("margin        {:.9} (se {:.9})", report.margin, se),
        None => println!("margin        {:.9}", report.margin),
    }
    if report.near_kink {
        println!("warning       |P(a,b) - P(a,c)| is within noise of the kink; margin se unreliable");
    }
    println!("violated      {}", report.violated);
}

fn cmd_exact(args: &ExactArgs) -> Result<(), CliError> {
    let triple = resolve_triple(&args.directions)?;
    let set = core::quantum_correlation_set(&triple.a, &triple.b, &triple.c);
    let report = core::check_inequality(&set);
    let manifest = RunManifest::new("exact", triple_json(&triple), None);
    if args.json {
        emit_json(&json!({
            "manifest": manifest,
            "correlations": set,
            "report": report,
        }))?;
    } else {
        println!("directions    a = {:?}  b = {:?}  c = {:?}", triple.a, triple.b, triple.c);
        print_report(&set, &report);
    }
    Ok(())
}

fn read_mixture(path: &Path) -> Result<StrategyMixture, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let weights: [f64; 8] = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("mixture file {}: {e}", path.display())))?;
    StrategyMixture::new(weights).map_err(CliError::from)
}

fn lhv_mixture_row(mixture: &StrategyMixture) -> (CorrelationSet, core::ViolationReport, core::DerivationReport) {
    let set = core::mixture_correlations(mixture);
    let report = core::check_inequality(&set);
    let derivation = core::verify_derivation_chain(mixture);
    (set, report, derivation)
}

fn cmd_lhv(args: &LhvArgs) -> Result<(), CliError> {
    let manifest = RunManifest::new(
        "lhv",
        json!({
            "mixture": args.mixture.as_ref().map(|p| p.display().to_string()),
            "scan_extremals": args.scan_extremals,
            "random": args.random,
            "seed": args.seed,
        }),
        Some(args.seed),
    );

    let mut rows = Vec::new();
    if args.scan_extremals {
        for (index, strategy) in core::enumerate_strategies().iter().enumerate() {
            let mixture = StrategyMixture::point_mass(index);
            let (set, report, derivation) = lhv_mixture_row(&mixture);
            rows.push(json!({
                "strategy": strategy,
                "correlations": set,
                "functional": report.functional_value,
                "violated": report.violated,
                "derivation_ok": derivation.all_pass(),
            }));
            if !args.json {
                println!(
                    "strategy {index}: ({:+},{:+},{:+})  P = ({:+.1}, {:+.1}, {:+.1})  functional = {:+.1}",
                    strategy.s1.value(),
                    strategy.s2.value(),
                    strategy.s3.value(),
                    set.p_ab,
                    set.p_ac,
                    set.p_bc,
                    report.functional_value,
                );
            }
        }
    } else if let Some(n) = args.random {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
        let mut worst_margin = f64::NEG_INFINITY;
        let mut failures = 0u64;
        for _ in 0..n {
            let mixture = StrategyMixture::random(&mut rng);
            let (_, report, derivation) = lhv_mixture_row(&mixture);
            worst_margin = worst_margin.max(report.margin);
            if report.violated || !derivation.all_pass() {
                failures += 1;
            }
        }
        rows.push(json!({
            "random_mixtures": n,
            "failures": failures,
            "worst_margin": worst_margin,
        }));
        if !args.json {
            println!(
                "{n} random mixtures: {failures} violations, worst margin {worst_margin:.3e} (bound 1)"
            );
        }
        if failures > 0 {
            return Err(CliError::CheckFailure(format!(
                "{failures} of {n} random mixtures violated the classical bound"
            )));
        }
    } else if let Some(path) = &args.mixture {
        let mixture = read_mixture(path)?;
        let (set, report, derivation) = lhv_mixture_row(&mixture);
        rows.push(json!({
            "weights": mixture.weights(),
            "correlations": set,
            "functional": report.functional_value,
            "violated": report.violated,
            "derivation": derivation,
        }));
        if !args.json {
            print_report(&set, &report);
            println!("derivation    ok = {}", derivation.all_pass());
        }
    } else {
        return Err(CliError::Usage(
            "one of --mixture, --scan-extremals, --random is required".into(),
        ));
    }

    if !args.json {
        println!("classical bound (exact, all 8 strategies): {}", core::classical_max_functional());
    } else {
        emit_json(&json!({
            "manifest": manifest,
            "classical_bound": core::classical_max_functional(),
            "rows": rows,
        }))?;
    }
    Ok(())
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<(), CliError> {
    let result = core::optimize_directions(args.restarts, args.tol, args.seed)?;
    let sqrt2_value = DirectionTriple::sqrt2_instance().functional();
    let manifest = RunManifest::new(
        "optimize",
        json!({ "restarts": args.restarts, "tol": args.tol, "seed": args.seed }),
        Some(args.seed),
    );
    if args.json {
        emit_json(&json!({
            "manifest": manifest,
            "result": result,
            "sqrt2_instance_value": sqrt2_value,
        }))?;
    } else {
        let t = &result.best;
        println!(
            "best triple (canonical frame)\n  a = ({:+.9}, {:+.9}, {:+.9})\n  b = ({:+.9}, {:+.9}, {:+.9})\n  c = ({:+.9}, {:+.9}, {:+.9})",
            t.a.x, t.a.y, t.a.z, t.b.x, t.b.y, t.b.z, t.c.x, t.c.y, t.c.z
        );
        println!("max functional  {:.9}", result.value);
        println!("sqrt(2) instance {:.9} (for comparison)", sqrt2_value);
        println!("restarts        {}", result.restarts_used);
    }
    Ok(())
}

/// File-supplied simulation settings; explicit flags override each field.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateFileConfig {
    a: Option<String>,
    b: Option<String>,
    c: Option<String>,
    a_bisect_diff: Option<bool>,
    trials: Option<u64>,
    seed: Option<u64>,
    initial: Option<String>,
    precession: Option<String>,
    times: Option<String>,
}

fn parse_initial(text: &str) -> Result<QubitState, CliError> {
    if text == "mixed" {
        return Ok(QubitState::maximally_mixed());
    }
    if let Some(rest) = text.strip_prefix("bloch:") {
        let n = parse_direction(rest, "--initial bloch")?;
        return Ok(QubitState::pure_along(&n));
    }
    Err(CliError::Usage(format!(
        "--initial must be 'mixed' or 'bloch:x,y,z', got '{text}'"
    )))
}

fn parse_precession(text: &str) -> Result<SpinRotation, CliError> {
    let rest = text.strip_prefix("axis:").ok_or_else(|| {
        CliError::Usage(format!("--precession must be 'axis:x,y,z,rate', got '{text}'"))
    })?;
    let v = parse_floats(rest, 4, "--precession")?;
    Ok(SpinRotation {
        axis: BlochVector::new(v[0], v[1], v[2])?,
        angular_rate: v[3],
    })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let file: SimulateFileConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?
        }
        None => SimulateFileConfig::default(),
    };

    let flags = DirectionFlags {
        a: args.directions.a.clone().or(file.a),
        b: args.directions.b.clone().or(file.b),
        c: args.directions.c.clone().or(file.c),
        a_bisect_diff: args.directions.a_bisect_diff || file.a_bisect_diff.unwrap_or(false),
    };
    let directions = resolve_triple(&flags)?;
    let trials = args.trials.or(file.trials).unwrap_or(100_000);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let initial_text = args
        .initial
        .clone()
        .or(file.initial)
        .unwrap_or_else(|| "mixed".to_string());
    let initial_state = parse_initial(&initial_text)?;
    let precession_text = args.precession.clone().or(file.precession);
    let rotation = match &precession_text {
        Some(text) => parse_precession(text)?,
        None => SpinRotation::identity(),
    };
    let times_text = args
        .times
        .clone()
        .or(file.times)
        .unwrap_or_else(|| "0,1,2".to_string());
    let t = parse_floats(&times_text, 3, "--times")?;

    let config = ExperimentConfig {
        directions,
        times: [t[0], t[1], t[2]],
        initial_state,
        rotation,
        trials,
        seed,
    };
    config.validate()?;

    let estimates = core::estimate_correlations_sharded(&config, args.shards)?;
    let report = core::check_inequality_with(&estimates.correlations, args.sigma);

    let manifest = RunManifest::new(
        "simulate",
        json!({
            "directions": triple_json(&config.directions),
            "times": config.times,
            "initial": initial_text,
            "precession": precession_text,
            "trials": trials,
            "seed": seed,
            "shards": args.shards,
            "sigma": args.sigma,
        }),
        Some(seed),
    );
    let payload = json!({
        "manifest": manifest,
        "estimates": estimates,
        "report": report,
    });

    if let Some(out) = &args.out {
        write_file(out, &serde_json::to_string_pretty(&payload).unwrap())?;
        write_manifest(out, &payload["manifest"])?;
    }
    if args.json {
        emit_json(&payload)?;
    } else {
        println!(
            "trials        {} (ab {}, ac {}, bc {})",
            trials, estimates.counts.ab, estimates.counts.ac, estimates.counts.bc
        );
        print_report(&estimates.correlations, &report);
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let rows = core::sweep_functional(args.grid_points)?;
    let body = match args.format {
        SweepFormat::Csv => {
            let mut text = String::from("u,functional\n");
            for row in &rows {
                text.push_str(&format!("{:.9},{:.9}\n", row.u, row.functional));
            }
            text
        }
        SweepFormat::Json => {
            let table: Vec<_> = rows
                .iter()
                .map(|r| json!({ "u": r.u, "functional": r.functional }))
                .collect();
            serde_json::to_string_pretty(&table).unwrap()
        }
    };
    write_file(&args.out, &body)?;
    let manifest = RunManifest::new(
        "sweep",
        json!({
            "grid_points": args.grid_points,
            "out": args.out.display().to_string(),
            "format": match args.format { SweepFormat::Csv => "csv", SweepFormat::Json => "json" },
        }),
        None,
    );
    write_manifest(&args.out, &serde_json::to_value(&manifest).unwrap())?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

fn cmd_derive_check(args: &DeriveCheckArgs) -> Result<(), CliError> {
    if args.random < 1 {
        return Err(CliError::Usage("--random must be >= 1".into()));
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let mut failures = 0u64;
    for _ in 0..args.random {
        let mixture = StrategyMixture::random(&mut rng);
        if !core::verify_derivation_chain(&mixture).all_pass() {
            failures += 1;
        }
    }
    println!(
        "derivation chain on {} random mixtures: {} failures",
        args.random, failures
    );
    if failures > 0 {
        return Err(CliError::CheckFailure(format!(
            "{failures} derivation-chain failures"
        )));
    }
    Ok(())
}

fn emit_json(value: &serde_json::Value) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(value).unwrap());
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn write_manifest(output_path: &Path, manifest: &serde_json::Value) -> Result<(), CliError> {
    let mut manifest_path = output_path.as_os_str().to_owned();
    manifest_path.push(".manifest.json");
    write_file(
        Path::new(&manifest_path),
        &serde_json::to_string_pretty(manifest).unwrap(),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Exact(args) => cmd_exact(args),
        Command::Lhv(args) => cmd_lhv(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::DeriveCheck(args) => cmd_derive_check(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
