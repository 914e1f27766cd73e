//! Builders for the tables each command writes. The determinism suite
//! renders the same tables, so they live here rather than in `main`.

use anyhow::Result;
use unanimity_core::capprob::{self, ProbEstimate};
use unanimity_core::dynamics::{run_ensemble, EnsembleConfig, EnsembleStats};
use unanimity_core::geometry::Cap;
use unanimity_core::{seed, Domain};

use crate::output::*;
use crate::usage;

pub fn simulate(config: &EnsembleConfig) -> Result<(EnsembleStats, Table)> {
    let stats = run_ensemble(config)?;
    let table = ensemble_table(&stats);
    Ok((stats, table))
}

fn require_grid<T>(grid: &[T], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(usage(format!("{what} grid is empty")));
    }
    Ok(())
}

fn require_ascending(grid: &[f64], what: &str) -> Result<()> {
    require_grid(grid, what)?;
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(usage(format!("{what} grid must be strictly ascending")));
    }
    Ok(())
}

/// Segment heights and their `Pr / δ^4` ratios.
pub fn lemma41(deltas: &[f64], samples: u64, seed: u64) -> Result<Table> {
    require_ascending(deltas, "delta")?;
    if let Some(d) = deltas
        .iter()
        .find(|d| !(**d > 0.0 && **d <= capprob::MAX_SEGMENT_HEIGHT))
    {
        return Err(usage(format!("delta must be in (0, 1/8], got {d}")));
    }
    let mut t = Table::new(&CAPPROB_COLUMNS);
    for (d, r) in capprob::lower_bound_ratio_disk(deltas, samples, seed)? {
        t.push(estimate_row(fmt_f64(d), "event", &r.estimate));
        t.push(ratio_row(fmt_f64(d), r.ratio, r.ratio_stderr, samples));
    }
    Ok(t)
}

/// Triangular caps and their ratio to the explicit lower bound.
pub fn lemma43(legs: &[(f64, f64)], samples: u64, seed: u64) -> Result<Table> {
    require_grid(legs, "(a, b)")?;
    if let Some(ab) = legs
        .iter()
        .find(|(a, b)| !(*a > 0.0 && a <= b && *b <= 1.0))
    {
        return Err(usage(format!(
            "need 0 < a <= b <= 1, got {}:{}",
            ab.0, ab.1
        )));
    }
    let mut t = Table::new(&CAPPROB_COLUMNS);
    for ((a, b), r) in capprob::lower_bound_ratio_square(legs, samples, seed)? {
        let p = format!("{}:{}", fmt_f64(a), fmt_f64(b));
        t.push(estimate_row(p.clone(), "event", &r.estimate));
        t.push(ratio_row(p, r.ratio, r.ratio_stderr, samples));
    }
    Ok(t)
}

fn ratio_row(param: String, ratio: f64, stderr: f64, samples: u64) -> Vec<String> {
    vec![
        param,
        "ratio".into(),
        fmt_f64(ratio),
        fmt_f64(stderr),
        samples.to_string(),
    ]
}

/// How the event estimator draws its candidate pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EventSampling {
    /// Uniform over the whole domain.
    Domain,
    /// Uniform over the cap, rescaled.
    Cap,
}

pub struct DualConfig {
    pub samples: u64,
    pub outer: u64,
    pub inner: u64,
    pub sampling: EventSampling,
}

/// Event and integral estimates side by side for each cap. Cap `i` uses
/// seeds `split(seed, 2i)` and `split(seed, 2i + 1)`.
pub fn dual(caps: &[(String, Cap)], cfg: &DualConfig, seed: u64) -> Result<Table> {
    require_grid(caps, "cap")?;
    let mut t = Table::new(&CAPPROB_COLUMNS);
    for (i, (label, cap)) in caps.iter().enumerate() {
        let (e, g) = dual_pair(cap, cfg, seed, i as u64)?;
        t.push(estimate_row(label.clone(), "event", &e));
        t.push(estimate_row(label.clone(), "integral", &g));
    }
    Ok(t)
}

pub fn dual_pair(
    cap: &Cap,
    cfg: &DualConfig,
    seed: u64,
    i: u64,
) -> Result<(ProbEstimate, ProbEstimate)> {
    let s = seed::split(seed, 2 * i);
    let event = match cfg.sampling {
        EventSampling::Domain => capprob::acceptance_prob_event(cap, cfg.samples, s)?,
        EventSampling::Cap => capprob::acceptance_prob_event_in_cap(cap, cfg.samples, s)?,
    };
    let integral =
        capprob::acceptance_prob_integral(cap, cfg.outer, cfg.inner, seed::split(seed, 2 * i + 1))?;
    Ok((event, integral))
}

/// The reference growth used for the `scaled` column of the Φ table:
/// `λ^(7/8)` on the disk and `λ ln ln(1/λ)` on the square.
pub fn phi_reference(domain: Domain, lambda: f64) -> f64 {
    match domain {
        Domain::UnitSquare => lambda * (1.0 / lambda).ln().ln(),
        _ => lambda.powf(0.875),
    }
}

pub fn phi(domain: Domain, lambdas: &[f64], pairs: u64, seed: u64) -> Result<Table> {
    require_ascending(lambdas, "lambda")?;
    if domain == Domain::Interval {
        return Err(usage("phi is defined for the disk and the square only"));
    }
    if domain == Domain::UnitSquare && lambdas.iter().any(|&l| !(l > 0.0 && l < (-1f64).exp())) {
        return Err(usage(
            "square lambda must lie in (0, 1/e) for the ln ln reference",
        ));
    }
    let est = capprob::phi_curve(domain, lambdas, pairs, seed)?;
    let mut t = Table::new(&PHI_COLUMNS);
    for (&l, e) in lambdas.iter().zip(&est) {
        let scaled = if l > 0.0 {
            e.value / phi_reference(domain, l)
        } else {
            f64::NAN
        };
        t.push(vec![
            fmt_f64(l),
            fmt_f64(e.value),
            fmt_f64(e.stderr),
            e.samples.to_string(),
            fmt_f64(scaled),
        ]);
    }
    Ok(t)
}

pub fn bound(domain: Domain, ts: &[f64], pairs: u64, seed: u64) -> Result<Table> {
    require_ascending(ts, "t")?;
    if domain == Domain::Interval {
        return Err(usage(
            "the bound integral is defined for the disk and the square only",
        ));
    }
    let est = capprob::upper_bound_curve(domain, ts, pairs, seed)?;
    let mut t = Table::new(&BOUND_COLUMNS);
    for (&x, e) in ts.iter().zip(&est) {
        t.push(vec![
            fmt_f64(x),
            fmt_f64(e.value),
            fmt_f64(e.stderr),
            e.samples.to_string(),
        ]);
    }
    Ok(t)
}
