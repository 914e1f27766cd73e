//! Verification suites. Each suite runs a batch of checks and reports the
//! observed value and threshold for every one of them.

use std::fmt;

use anyhow::Result;
use rand::{Rng, RngExt};
use serde::Serialize;
use unanimity_core::analysis::{self, Model};
use unanimity_core::capprob::{self, square_cap_lower_bound};
use unanimity_core::dynamics::{run_ensemble, EnsembleConfig, EnsembleStats};
use unanimity_core::election::{ball_winner, voronoi_winner};
use unanimity_core::geometry::{bisector, make_cap, Cap, ConvexHull, Point};
use unanimity_core::{seed, Domain};

use crate::tables::{self, DualConfig, EventSampling};

/// Lower bound for `Pr[Z(J_δ) | J̄_δ] / δ^4`, frozen from a calibration run.
pub const SEGMENT_RATIO_FLOOR: f64 = 0.015;

/// `C` in `Pr[X^{t+1}] <= C · E[exp(-t f_K)]`, frozen per domain.
pub const BOUND_CONSTANT_DISK: f64 = 12.0;
pub const BOUND_CONSTANT_SQUARE: f64 = 7.0;

/// `C` in `Φ(λ) <= C λ ln ln(1/λ)` on the square.
pub const SQUARE_PHI_CONSTANT: f64 = 5.0;

pub const SEGMENT_HEIGHTS: [f64; 4] = [0.02, 0.04, 0.08, 0.125];
pub const TRIANGLE_LEGS: [(f64, f64); 6] = [
    (0.05, 0.05),
    (0.05, 0.5),
    (0.1, 0.8),
    (0.25, 0.25),
    (0.25, 1.0),
    (0.5, 1.0),
];
pub const BOUND_ROUNDS: [f64; 3] = [1e2, 1e3, 1e4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Predicates,
    Monotonicity,
    Dual,
    Interval,
    Disk,
    Square,
    Lemma41,
    Lemma43,
    Lemma51,
    Lemma52,
    Theorem31,
    Determinism,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Predicates,
        Suite::Monotonicity,
        Suite::Dual,
        Suite::Interval,
        Suite::Disk,
        Suite::Square,
        Suite::Lemma41,
        Suite::Lemma43,
        Suite::Lemma51,
        Suite::Lemma52,
        Suite::Theorem31,
        Suite::Determinism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Predicates => "predicates",
            Suite::Monotonicity => "monotonicity",
            Suite::Dual => "dual",
            Suite::Interval => "interval",
            Suite::Disk => "disk",
            Suite::Square => "square",
            Suite::Lemma41 => "lemma41",
            Suite::Lemma43 => "lemma43",
            Suite::Lemma51 => "lemma51",
            Suite::Lemma52 => "lemma52",
            Suite::Theorem31 => "theorem31",
            Suite::Determinism => "determinism",
        }
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).unwrap() as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sample sizes for every suite.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Budget {
    pub predicate_instances: usize,
    pub monotone_instances: usize,
    pub dual_caps: usize,
    pub dual_event_samples: u64,
    pub dual_outer: u64,
    pub dual_inner: u64,
    pub interval_rounds: usize,
    pub interval_trials: usize,
    pub growth_rounds: usize,
    pub growth_trials: usize,
    pub cap_samples: u64,
    pub phi_pairs: u64,
    pub bound_trials: usize,
    pub bound_pairs: u64,
    pub determinism_rounds: usize,
    pub determinism_trials: usize,
}

impl Budget {
    /// The sizes the acceptance criteria are stated at.
    pub fn full() -> Self {
        Self {
            predicate_instances: 1_000_000,
            monotone_instances: 100_000,
            dual_caps: 10,
            dual_event_samples: 1_000_000,
            dual_outer: 1_000,
            dual_inner: 1_000,
            interval_rounds: 10_000,
            interval_trials: 500,
            growth_rounds: 100_000,
            growth_trials: 200,
            cap_samples: 1_000_000,
            phi_pairs: 20_000_000,
            bound_trials: 400,
            bound_pairs: 1_000_000,
            determinism_rounds: 2_000,
            determinism_trials: 64,
        }
    }

    /// Small sizes for smoke runs; statistical windows may not hold.
    pub fn quick() -> Self {
        Self {
            predicate_instances: 10_000,
            monotone_instances: 2_000,
            dual_caps: 2,
            dual_event_samples: 50_000,
            dual_outer: 200,
            dual_inner: 200,
            interval_rounds: 2_000,
            interval_trials: 50,
            growth_rounds: 5_000,
            growth_trials: 20,
            cap_samples: 50_000,
            phi_pairs: 500_000,
            bound_trials: 40,
            bound_pairs: 50_000,
            determinism_rounds: 300,
            determinism_trials: 16,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub threshold: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(
        name: impl Into<String>,
        observed: f64,
        threshold: impl Into<String>,
        passed: bool,
    ) -> Self {
        Self {
            name: name.into(),
            observed,
            threshold: threshold.into(),
            passed,
            detail: None,
        }
    }

    fn at_most(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self::new(name, observed, format!("<= {limit}"), observed <= limit)
    }

    fn at_least(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self::new(name, observed, format!(">= {limit}"), observed >= limit)
    }

    fn within(name: impl Into<String>, observed: f64, lo: f64, hi: f64) -> Self {
        Self::new(
            name,
            observed,
            format!("in [{lo}, {hi}]"),
            (lo..=hi).contains(&observed),
        )
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64, checks: Vec<Check>) -> Self {
        Self {
            suite,
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs one suite. Its seed is `split(seed, suite index)`.
pub fn run(suite: Suite, budget: &Budget, seed: u64) -> Result<SuiteReport> {
    let s = seed::split(seed, suite.index());
    let checks = match suite {
        Suite::Predicates => predicates(budget, s)?,
        Suite::Monotonicity => monotonicity(budget, s)?,
        Suite::Dual => dual(budget, s)?,
        Suite::Interval => interval(budget, s)?,
        Suite::Disk => disk(budget, s)?,
        Suite::Square => square(budget, s)?,
        Suite::Lemma41 => lemma41(budget, s)?,
        Suite::Lemma43 => lemma43(budget, s)?,
        Suite::Lemma51 => lemma51(budget, s)?,
        Suite::Lemma52 => lemma52(budget, s)?,
        Suite::Theorem31 => theorem31(budget, s)?,
        Suite::Determinism => determinism(budget, s)?,
    };
    Ok(SuiteReport::new(suite, s, checks))
}

fn random_hull<R: Rng>(rng: &mut R, domain: Domain) -> ConvexHull {
    let n = 1 + (rng.random::<u32>() % 16) as usize;
    ConvexHull::from_points((0..n).map(|_| domain.sample(rng)))
}

fn distinct_pair<R: Rng>(rng: &mut R, domain: Domain) -> (Point, Point) {
    loop {
        let (a, b) = (domain.sample(rng), domain.sample(rng));
        if a != b {
            return (a, b);
        }
    }
}

fn predicates(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, domain) in Domain::ALL.into_iter().enumerate() {
        let mut rng = seed::child_rng(seed, i as u64);
        let (mut disagree, mut accepted) = (0u64, 0u64);
        for _ in 0..b.predicate_instances {
            let hull = random_hull(&mut rng, domain);
            let (w1, w2) = distinct_pair(&mut rng, domain);
            let v = voronoi_winner(&hull, w1, w2)?;
            disagree += (v != ball_winner(&hull, w1, w2)?) as u64;
            accepted += v.accepted() as u64;
        }
        out.push(
            Check::at_most(
                format!("{domain}: voronoi vs ball disagreements"),
                disagree as f64,
                0.0,
            )
            .detail(format!(
                "{} instances, {accepted} with a winner",
                b.predicate_instances
            )),
        );
    }
    Ok(out)
}

fn monotonicity(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, domain) in Domain::ALL.into_iter().enumerate() {
        let mut rng = seed::child_rng(seed, i as u64);
        let (mut done, mut violations, mut farther) = (0usize, 0u64, 0u64);
        while done < b.monotone_instances {
            let hull = random_hull(&mut rng, domain);
            let (w1, w2) = distinct_pair(&mut rng, domain);
            let outcome = voronoi_winner(&hull, w1, w2)?;
            let Some(c) = outcome.winner else { continue };
            let sub: Vec<Point> = hull
                .vertices()
                .iter()
                .copied()
                .filter(|_| rng.random::<bool>())
                .collect();
            if sub.is_empty() {
                continue;
            }
            let inner = ConvexHull::from_points(sub);
            violations += (voronoi_winner(&inner, w1, w2)?.winner != Some(c)) as u64;
            let (win, lose) = (c.pick(w1, w2), c.other().pick(w1, w2));
            farther += hull
                .vertices()
                .iter()
                .any(|v| v.dist(win) > v.dist(lose) + 1e-12) as u64;
            done += 1;
        }
        out.push(
            Check::at_most(
                format!("{domain}: winner changes on a sub-hull"),
                violations as f64,
                0.0,
            )
            .detail(format!("{done} accepted instances")),
        );
        out.push(Check::at_most(
            format!("{domain}: winner farther than loser from a vertex"),
            farther as f64,
            0.0,
        ));
    }
    Ok(out)
}

/// Random caps cut by bisectors of uniform pairs, with area fraction in
/// `[0.1, 0.5]`.
pub fn random_caps(domain: Domain, count: usize, seed: u64) -> Vec<Cap> {
    let mut rng = seed::rng(seed);
    let mut caps = Vec::with_capacity(count);
    while caps.len() < count {
        let (w1, w2) = distinct_pair(&mut rng, domain);
        let Ok(h) = bisector(w1, w2) else { continue };
        let Ok(cap) = make_cap(domain, h) else {
            continue;
        };
        if (0.1..=0.5).contains(&(cap.area() / domain.measure())) {
            caps.push(cap);
        }
    }
    caps
}

fn dual(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let cfg = DualConfig {
        samples: b.dual_event_samples,
        outer: b.dual_outer,
        inner: b.dual_inner,
        sampling: EventSampling::Domain,
    };
    let mut out = Vec::new();
    for (i, domain) in Domain::ALL.into_iter().enumerate() {
        let caps = random_caps(domain, b.dual_caps, seed::split(seed, 2 * i as u64));
        for (j, cap) in caps.iter().enumerate() {
            let (e, g) =
                tables::dual_pair(cap, &cfg, seed::split(seed, 2 * i as u64 + 1), j as u64)?;
            out.push(
                Check::at_most(
                    format!("{domain} cap {j}: |event - integral| / stderr"),
                    e.z_score(&g).abs(),
                    3.0,
                )
                .detail(format!(
                    "area fraction {:.3}, event {:.6e} ± {:.1e}, integral {:.6e} ± {:.1e}",
                    cap.area() / domain.measure(),
                    e.value,
                    e.stderr,
                    g.value,
                    g.stderr
                )),
            );
        }
    }
    Ok(out)
}

fn ensemble(domain: Domain, rounds: usize, trials: usize, seed: u64) -> Result<EnsembleStats> {
    Ok(run_ensemble(
        &EnsembleConfig::new(domain, rounds, trials).seed(seed),
    )?)
}

fn decay_fit(stats: &EnsembleStats, t_min: usize) -> Result<analysis::FitResult> {
    let bins = analysis::bin_acceptance(&stats.acceptance_rate, stats.trials, t_min, 10, 100);
    Ok(analysis::fit_decay(&analysis::rate_points(&bins))?)
}

/// Fitted decay exponent over the last decade, for context in reports.
fn last_decade_decay(stats: &EnsembleStats) -> String {
    let t_min = (stats.rounds / 10).max(analysis::DEFAULT_T_MIN as usize);
    match decay_fit(stats, t_min) {
        Ok(f) => format!(
            "gamma over [{t_min}, {}] = {:.3} ± {:.3}",
            stats.rounds, f.params[1], f.param_stderr[1]
        ),
        Err(e) => format!("last-decade fit unavailable: {e}"),
    }
}

fn interval(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let stats = ensemble(Domain::Interval, b.interval_rounds, b.interval_trials, seed)?;
    let t_min = analysis::DEFAULT_T_MIN as usize;
    let log = analysis::fit_log(&analysis::size_curve(&stats, t_min, 10))?;
    let decay = decay_fit(&stats, t_min)?;
    Ok(vec![
        Check::at_least("interval: fit_log r_squared", log.r_squared, 0.95).detail(format!(
            "c = {:.4}, d = {:.4}",
            log.params[0], log.params[1]
        )),
        Check::within("interval: fit_decay gamma", decay.params[1], 0.85, 1.15)
            .detail(format!("stderr {:.4}", decay.param_stderr[1])),
    ])
}

fn disk(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let stats = ensemble(Domain::UnitDisk, b.growth_rounds, b.growth_trials, seed)?;
    let t_min = analysis::DEFAULT_T_MIN as usize;
    let power = analysis::fit_power(&analysis::size_curve(&stats, t_min, 10))?;
    let decay = decay_fit(&stats, t_min)?;
    Ok(vec![
        Check::within("disk: fit_power beta", power.params[1], 0.08, 0.18).detail(format!(
            "stderr {:.4}, final mean size {:.2}",
            power.param_stderr[1], stats.mean_size[stats.rounds]
        )),
        Check::within("disk: fit_decay gamma", decay.params[1], 0.775, 0.975).detail(format!(
            "stderr {:.4}; {}",
            decay.param_stderr[1],
            last_decade_decay(&stats)
        )),
    ])
}

fn square(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let stats = ensemble(Domain::UnitSquare, b.growth_rounds, b.growth_trials, seed)?;
    let curve = analysis::size_curve(&stats, analysis::DEFAULT_T_MIN as usize, 10);
    let ranked = analysis::model_compare(&curve, &Model::GROWTH)?;
    let order: Vec<&str> = ranked.iter().map(|r| r.fit.model.name()).collect();
    let rms = |m: Model| {
        ranked
            .iter()
            .find(|r| r.fit.model == m)
            .unwrap()
            .holdout_rms
    };
    let best_log = rms(Model::Log).min(rms(Model::LogLogLog));
    let power = analysis::fit_power(&curve)?;
    Ok(vec![
        Check::new(
            "square: power held-out rms / best log-type held-out rms",
            rms(Model::Power) / best_log,
            "> 1",
            rms(Model::Power) > best_log,
        )
        .detail(format!("ranking {order:?}")),
        Check::new(
            "square: fit_power beta",
            power.params[1],
            "< 0.05",
            power.params[1] < 0.05,
        )
        .detail(format!("stderr {:.4}", power.param_stderr[1])),
    ])
}

fn combined(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

fn lemma41(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let runs: Vec<_> = (0..2)
        .map(|i| {
            capprob::lower_bound_ratio_disk(&SEGMENT_HEIGHTS, b.cap_samples, seed::split(seed, i))
        })
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for ((d, r1), (_, r2)) in runs[0].iter().zip(&runs[1]) {
        out.push(
            Check::at_least(
                format!("delta {d}: min ratio over seeds"),
                r1.ratio.min(r2.ratio),
                SEGMENT_RATIO_FLOOR,
            )
            .detail(format!(
                "ratios {:.5} ± {:.5}, {:.5} ± {:.5}",
                r1.ratio, r1.ratio_stderr, r2.ratio, r2.ratio_stderr
            )),
        );
        out.push(Check::at_most(
            format!("delta {d}: seed disagreement / stderr"),
            (r1.ratio - r2.ratio).abs() / combined(r1.ratio_stderr, r2.ratio_stderr),
            3.0,
        ));
    }
    Ok(out)
}

fn lemma43(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let runs: Vec<_> = (0..2)
        .map(|i| {
            capprob::lower_bound_ratio_square(&TRIANGLE_LEGS, b.cap_samples, seed::split(seed, i))
        })
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for (((a, bb), r1), (_, r2)) in runs[0].iter().zip(&runs[1]) {
        out.push(
            Check::at_least(
                format!("(a, b) = ({a}, {bb}): ratio to explicit bound"),
                r1.ratio,
                1.0,
            )
            .detail(format!(
                "estimate {:.4e} ± {:.1e}, bound {:.4e}",
                r1.estimate.value,
                r1.estimate.stderr,
                square_cap_lower_bound(*a, *bb)
            )),
        );
        out.push(Check::at_most(
            format!("(a, b) = ({a}, {bb}): seed disagreement / stderr"),
            (r1.ratio - r2.ratio).abs() / combined(r1.ratio_stderr, r2.ratio_stderr),
            3.0,
        ));
    }
    Ok(out)
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
        .collect()
}

fn lemma51(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let grid = log_grid(1e-5, 1e-4, 9);
    let runs: Vec<_> = (0..2)
        .map(|i| capprob::phi_curve(Domain::UnitDisk, &grid, b.phi_pairs, seed::split(seed, i)))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let scaled: Vec<f64> = grid
            .iter()
            .zip(run)
            .map(|(l, p)| p.value / l.powf(0.875))
            .collect();
        let (lo, hi) = scaled
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        out.push(
            Check::new(
                format!("seed {i}: max/min of phi / lambda^(7/8)"),
                hi / lo,
                "< 3",
                hi < 3.0 * lo,
            )
            .detail(format!("sup {hi:.4}, inf {lo:.4}")),
        );
    }
    for (j, l) in grid.iter().enumerate() {
        let (p, q) = (&runs[0][j], &runs[1][j]);
        out.push(Check::at_most(
            format!("lambda {l:.3e}: seed disagreement / stderr"),
            (p.value - q.value).abs() / combined(p.stderr, q.stderr),
            3.0,
        ));
    }
    Ok(out)
}

fn lemma52(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let grid = log_grid(1e-5, 1e-2, 13);
    let run = capprob::phi_curve(Domain::UnitSquare, &grid, b.phi_pairs / 4, seed)?;
    Ok(grid
        .iter()
        .zip(&run)
        .map(|(&l, p)| {
            Check::at_most(
                format!("lambda {l:.3e}: phi / (lambda ln ln(1/lambda))"),
                p.value / tables::phi_reference(Domain::UnitSquare, l),
                SQUARE_PHI_CONSTANT,
            )
        })
        .collect())
}

fn theorem31(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let rounds = (1.25 * (BOUND_ROUNDS[2] + 1.0)).ceil() as usize;
    for (i, (domain, c)) in [
        (Domain::UnitDisk, BOUND_CONSTANT_DISK),
        (Domain::UnitSquare, BOUND_CONSTANT_SQUARE),
    ]
    .into_iter()
    .enumerate()
    {
        let stats = ensemble(
            domain,
            rounds,
            b.bound_trials,
            seed::split(seed, 2 * i as u64),
        )?;
        let bounds = capprob::upper_bound_curve(
            domain,
            &BOUND_ROUNDS,
            b.bound_pairs,
            seed::split(seed, 2 * i as u64 + 1),
        )?;
        for (&t, u) in BOUND_ROUNDS.iter().zip(&bounds) {
            let next = t as usize + 1;
            let (rate, se) = stats.window_rate(next * 4 / 5, next * 5 / 4);
            out.push(
                Check::at_most(
                    format!("{domain} t = {t}: rate / bound integral"),
                    rate / u.value,
                    c,
                )
                .detail(format!(
                    "rate {rate:.4e} ± {se:.1e}, integral {:.4e} ± {:.1e}",
                    u.value, u.stderr
                )),
            );
        }
    }
    Ok(out)
}

fn determinism(b: &Budget, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for domain in Domain::ALL {
        let cfg =
            EnsembleConfig::new(domain, b.determinism_rounds, b.determinism_trials).seed(seed);
        let render = |workers: usize| -> Result<Vec<u8>> {
            tables::simulate(&cfg.workers(workers))?.1.to_csv()
        };
        let runs = [render(1)?, render(8)?, render(1)?, render(8)?];
        let mismatches = runs.iter().filter(|r| **r != runs[0]).count();
        out.push(Check::at_most(
            format!("{domain}: simulate CSV mismatches across workers and reruns"),
            mismatches as f64,
            0.0,
        ));
    }
    let segment_csv = |workers: usize| -> Result<Vec<u8>> {
        unanimity_core::dynamics::with_workers(workers, || {
            tables::lemma41(&SEGMENT_HEIGHTS, b.cap_samples / 20, seed)
        })?
        .to_csv()
    };
    let runs = [
        segment_csv(1)?,
        segment_csv(8)?,
        segment_csv(1)?,
        segment_csv(8)?,
    ];
    out.push(Check::at_most(
        "segment-ratio CSV mismatches across workers and reruns",
        runs.iter().filter(|r| **r != runs[0]).count() as f64,
        0.0,
    ));
    let phi = || -> Result<Vec<u8>> {
        tables::phi(
            Domain::UnitDisk,
            &log_grid(1e-4, 1e-2, 5),
            b.phi_pairs / 100,
            seed,
        )?
        .to_csv()
    };
    let mismatch = (phi()? != phi()?) as u32;
    out.push(Check::at_most(
        "phi CSV mismatches across reruns",
        mismatch as f64,
        0.0,
    ));
    Ok(out)
}
