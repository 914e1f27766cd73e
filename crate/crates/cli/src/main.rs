use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use unanimity_cli::output::{
    resolve_seed, sidecar, sidecar_path, write_atomic, write_table, Table,
};
use unanimity_cli::suite::{self, Budget, Suite, SuiteReport};
use unanimity_cli::tables::{self, DualConfig, EventSampling};
use unanimity_cli::{usage, UsageError};
use unanimity_core::analysis::{self, FitResult, Model};
use unanimity_core::capprob::{disk_segment_cap, interval_cap, square_triangle_cap};
use unanimity_core::dynamics::{with_workers, EnsembleConfig};
use unanimity_core::Domain;

#[derive(Parser, Debug)]
#[command(
    name = "unanimity",
    version,
    about = "Consensus-voting admission process: simulations, estimators, fits and checks"
)]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "UNANIMITY_WORKERS", default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an ensemble of admission processes and write per-round aggregates.
    Simulate(SimulateArgs),
    /// Estimate cap acceptance probabilities.
    Capprob(CapprobArgs),
    /// Estimate the distribution function of the bound function, or the bound integral.
    Phi(PhiArgs),
    /// Fit growth or decay laws to a `simulate` output.
    Fit(FitArgs),
    /// Run verification suites and report each check.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[arg(long)]
    domain: Domain,
    #[arg(long)]
    rounds: usize,
    #[arg(long)]
    trials: usize,
    /// Initial group size.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Master seed; 0 derives one from the configuration.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum CapSuite {
    /// Circular segments, ratio to δ^4.
    Lemma41,
    /// Triangular square caps, ratio to the explicit bound.
    Lemma43,
    /// Event and integral estimators on the same caps.
    Dual,
}

#[derive(Args, Debug, Serialize)]
struct CapprobArgs {
    #[arg(long, value_enum, default_value_t = CapSuite::Dual)]
    suite: CapSuite,
    /// Domain for the dual suite (implied by the other suites).
    #[arg(long)]
    domain: Option<Domain>,
    /// Segment heights (disk).
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    /// Triangle legs `a:b` (square).
    #[arg(long, value_delimiter = ',', value_parser = parse_legs)]
    ab: Vec<(f64, f64)>,
    /// Segment lengths (interval).
    #[arg(long, value_delimiter = ',')]
    length: Vec<f64>,
    /// Event-estimator pairs.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1_000)]
    outer: u64,
    #[arg(long, default_value_t = 1_000)]
    inner: u64,
    /// Where the event estimator draws candidates in the dual suite.
    #[arg(long, value_enum, default_value_t = EventSampling::Domain)]
    sampling: EventSampling,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_legs(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected a:b, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok((p(a)?, p(b)?))
}

#[derive(Args, Debug, Serialize)]
struct PhiArgs {
    #[arg(long)]
    domain: Domain,
    /// λ grid, ascending.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Evaluate the bound integral E[exp(-t f)] at these rounds instead.
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pairs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FitModel {
    Power,
    Log,
    Loglog,
    Decay,
    Compare,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long, value_enum)]
    model: FitModel,
    /// CSV written by `simulate`.
    #[arg(long)]
    input: PathBuf,
    /// First round used in the fit.
    #[arg(long, default_value_t = 100)]
    t_min: usize,
    /// Curve points per decade for growth fits.
    #[arg(long, default_value_t = 10)]
    per_decade: usize,
    /// Bins per decade for decay fits.
    #[arg(long, default_value_t = 10)]
    bins_per_decade: usize,
    /// Trials behind the input; read from its sidecar when omitted.
    #[arg(long)]
    trials: Option<usize>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite to run, or `all`.
    #[arg(long, default_value = "all", value_parser = parse_suites)]
    suite: SuiteSelection,
    /// Smaller sample sizes for a fast smoke run.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct SuiteSelection(Vec<Suite>);

fn parse_suites(s: &str) -> std::result::Result<SuiteSelection, String> {
    if s == "all" {
        return Ok(SuiteSelection(Suite::ALL.to_vec()));
    }
    Suite::from_str(s, true).map(|x| SuiteSelection(vec![x]))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers;
    match with_workers(workers, move || dispatch(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_usage(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn is_usage(e: &anyhow::Error) -> bool {
    e.downcast_ref::<UsageError>().is_some()
        || matches!(
            e.downcast_ref::<unanimity_core::Error>(),
            Some(
                unanimity_core::Error::InvalidArgument(_)
                    | unanimity_core::Error::UnsupportedDomain { .. }
            )
        )
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(a) => simulate(a, cli.workers),
        Command::Capprob(a) => capprob(a),
        Command::Phi(a) => phi(a),
        Command::Fit(a) => fit(a),
        Command::Verify(a) => verify(a),
    }
}

fn positive(name: &str, v: u64) -> Result<()> {
    if v == 0 {
        return Err(usage(format!("--{name} must be positive")));
    }
    Ok(())
}

fn finish(
    command: &str,
    out: &Path,
    config: &impl Serialize,
    seed: u64,
    derived: bool,
    table: &Table,
    extra: Value,
) -> Result<ExitCode> {
    let mut meta = sidecar(command, config, seed, derived, table);
    if let (Value::Object(m), Value::Object(x)) = (&mut meta, extra) {
        m.extend(x);
    }
    write_table(out, table, &meta)?;
    eprintln!(
        "wrote {} ({} rows) and {}",
        out.display(),
        table.rows.len(),
        sidecar_path(out).display()
    );
    Ok(ExitCode::SUCCESS)
}

fn simulate(a: SimulateArgs, workers: usize) -> Result<ExitCode> {
    positive("rounds", a.rounds as u64)?;
    positive("trials", a.trials as u64)?;
    positive("k", a.k as u64)?;
    let (seed, derived) = resolve_seed(a.seed, "simulate", &a);
    let cfg = EnsembleConfig::new(a.domain, a.rounds, a.trials)
        .initial_size(a.k)
        .seed(seed)
        .workers(workers);
    eprintln!(
        "simulate: {} rounds x {} trials on the {}",
        a.rounds, a.trials, a.domain
    );
    let (stats, table) = tables::simulate(&cfg)?;
    let extra = json!({
        "trials": stats.trials,
        "rounds": stats.rounds,
        "k": stats.k,
        "resampled_pairs": stats.resampled,
        "trial_seed_rule": "split(seed, trial_index)",
    });
    finish("simulate", &a.out, &a, seed, derived, &table, extra)
}

fn capprob(a: CapprobArgs) -> Result<ExitCode> {
    positive("samples", a.samples)?;
    positive("outer", a.outer)?;
    positive("inner", a.inner)?;
    let (seed, derived) = resolve_seed(a.seed, "capprob", &a);
    let table = match a.suite {
        CapSuite::Lemma41 => tables::lemma41(&a.delta, a.samples, seed)?,
        CapSuite::Lemma43 => tables::lemma43(&a.ab, a.samples, seed)?,
        CapSuite::Dual => {
            let domain = a
                .domain
                .ok_or_else(|| usage("--domain is required for the dual suite"))?;
            let caps = match domain {
                Domain::UnitDisk => a
                    .delta
                    .iter()
                    .map(|&d| Ok((d.to_string(), disk_segment_cap(d)?)))
                    .collect::<Result<Vec<_>>>(),
                Domain::UnitSquare => {
                    a.ab.iter()
                        .map(|&(x, y)| Ok((format!("{x}:{y}"), square_triangle_cap(x, y)?)))
                        .collect()
                }
                Domain::Interval => a
                    .length
                    .iter()
                    .map(|&l| Ok((l.to_string(), interval_cap(l)?)))
                    .collect(),
            }?;
            let cfg = DualConfig {
                samples: a.samples,
                outer: a.outer,
                inner: a.inner,
                sampling: a.sampling,
            };
            tables::dual(&caps, &cfg, seed)?
        }
    };
    finish("capprob", &a.out, &a, seed, derived, &table, json!({}))
}

fn phi(a: PhiArgs) -> Result<ExitCode> {
    positive("pairs", a.pairs)?;
    let (seed, derived) = resolve_seed(a.seed, "phi", &a);
    let (table, extra) = match (a.lambda.is_empty(), a.t.is_empty()) {
        (false, true) => (
            tables::phi(a.domain, &a.lambda, a.pairs, seed)?,
            json!({"quantity": "phi", "scaled_by": if a.domain == Domain::UnitSquare { "lambda ln ln(1/lambda)" } else { "lambda^(7/8)" }}),
        ),
        (true, false) => (
            tables::bound(a.domain, &a.t, a.pairs, seed)?,
            json!({"quantity": "bound_integral"}),
        ),
        _ => return Err(usage("give exactly one of --lambda or --t")),
    };
    finish("phi", &a.out, &a, seed, derived, &table, extra)
}

struct Curve {
    rounds: Vec<f64>,
    mean_size: Vec<f64>,
    acceptance_rate: Vec<f64>,
}

fn read_curve(path: &Path) -> Result<Curve> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| usage(format!("{} has no `{name}` column", path.display())))
    };
    let (ir, im, ia) = (col("round")?, col("mean_size")?, col("acceptance_rate")?);
    let mut c = Curve {
        rounds: Vec::new(),
        mean_size: Vec::new(),
        acceptance_rate: Vec::new(),
    };
    for rec in r.records() {
        let rec = rec?;
        let get = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| usage(format!("bad number `{}`: {e}", &rec[i])))
        };
        c.rounds.push(get(ir)?);
        c.mean_size.push(get(im)?);
        c.acceptance_rate.push(get(ia)?);
    }
    if c.rounds.iter().enumerate().any(|(i, &t)| t != i as f64) {
        return Err(usage("rounds must run 0, 1, 2, ... without gaps"));
    }
    Ok(c)
}

fn sidecar_trials(input: &Path) -> Result<usize> {
    let side = sidecar_path(input);
    let text = std::fs::read_to_string(&side)
        .map_err(|_| usage(format!("no sidecar {}; pass --trials", side.display())))?;
    let v: Value = serde_json::from_str(&text)?;
    v["trials"]
        .as_u64()
        .or_else(|| v["config"]["trials"].as_u64())
        .map(|t| t as usize)
        .ok_or_else(|| {
            usage(format!(
                "{} does not record trials; pass --trials",
                side.display()
            ))
        })
}

fn fit_json(f: &FitResult) -> Value {
    let names = f.model.param_names();
    json!({
        "model": f.model.name(),
        "params": { names[0]: f.params[0], names[1]: f.params[1] },
        "param_stderr": { names[0]: f.param_stderr[0], names[1]: f.param_stderr[1] },
        "r_squared": f.r_squared,
        "residual_rms": f.residual_rms,
        "points": f.points,
    })
}

fn fit(a: FitArgs) -> Result<ExitCode> {
    positive("per-decade", a.per_decade as u64)?;
    positive("bins-per-decade", a.bins_per_decade as u64)?;
    let curve = read_curve(&a.input)?;
    let growth = analysis::series_curve(&curve.mean_size, a.t_min, a.per_decade);
    let mut report = match a.model {
        FitModel::Power => fit_json(&analysis::fit_power(&growth)?),
        FitModel::Log => fit_json(&analysis::fit_log(&growth)?),
        FitModel::Loglog => fit_json(&analysis::fit_loglog(&growth)?),
        FitModel::Decay => {
            let trials = match a.trials {
                Some(t) => t,
                None => sidecar_trials(&a.input)?,
            };
            let bins = analysis::bin_acceptance(
                &curve.acceptance_rate,
                trials,
                a.t_min,
                a.bins_per_decade,
                100,
            );
            let mut v = fit_json(&analysis::fit_decay(&analysis::rate_points(&bins))?);
            v["bins"] = serde_json::to_value(&bins)?;
            v["trials"] = json!(trials);
            v
        }
        FitModel::Compare => compare_json(&growth)?,
    };
    if let Some(obj) = report.as_object_mut() {
        if let Some(p) = obj.get("params").cloned() {
            for key in ["beta", "gamma"] {
                if let Some(x) = p.get(key) {
                    obj.insert(key.into(), x.clone());
                }
            }
        }
        obj.insert("input".into(), json!(a.input));
        obj.insert("t_min".into(), json!(a.t_min));
    }
    let text = serde_json::to_string_pretty(&report)?;
    match &a.out {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn compare_json(growth: &[(f64, f64)]) -> Result<Value> {
    let ranked = analysis::model_compare(growth, &Model::GROWTH)?;
    Ok(json!({
        "model": "compare",
        "ranking": ranked
            .iter()
            .map(|r| {
                let mut v = fit_json(&r.fit);
                v["holdout_rms"] = json!(r.holdout_rms);
                v
            })
            .collect::<Vec<_>>(),
    }))
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let budget = if a.quick {
        Budget::quick()
    } else {
        Budget::full()
    };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for s in &a.suite.0 {
        eprintln!("verify: running {s}");
        let r = suite::run(*s, &budget, a.seed)?;
        for c in r.failures() {
            eprintln!(
                "  FAIL {}: observed {} (threshold {})",
                c.name, c.observed, c.threshold
            );
        }
        eprintln!(
            "  {} ({} checks)",
            if r.passed { "pass" } else { "FAIL" },
            r.checks.len()
        );
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed);
    let report = json!({
        "passed": passed,
        "seed": a.seed,
        "budget": if a.quick { "quick" } else { "full" },
        "sizes": budget,
        "suites": reports,
    });
    let text = serde_json::to_string_pretty(&report)?;
    match &a.out {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => println!("{text}"),
    }
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
