//! The multi-round admission process and trial ensembles.
//!
//! Each round draws two candidates uniformly from the domain; the winner, if
//! any, joins the group. The process state is the group's convex hull and
//! member count; the member list is kept only on request.
//!
//! Ensembles derive trial `i`'s seed as `seed::split(master, i)` and reduce
//! integer counters. Results are identical for any worker count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::election::{winner_from_extent, ElectionOutcome};
use crate::geometry::{bisector, ConvexHull, Domain, Point};
use crate::seed::{self, SimRng};
use crate::{Error, Result};

/// One completed round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Round {
    pub w1: Point,
    pub w2: Point,
    pub outcome: ElectionOutcome,
    /// Whether admitting the winner changed the hull's vertex set.
    pub hull_changed: bool,
}

/// State of one group: its hull, size and round counter.
#[derive(Clone, Debug)]
pub struct AdmissionProcess<R> {
    domain: Domain,
    hull: ConvexHull,
    size: usize,
    round: u64,
    resampled: u64,
    members: Option<Vec<Point>>,
    rng: R,
}

impl<R: Rng> AdmissionProcess<R> {
    /// Starts from `k` members drawn uniformly from the domain.
    pub fn new(domain: Domain, k: usize, mut rng: R) -> Self {
        let initial: Vec<Point> = (0..k).map(|_| domain.sample(&mut rng)).collect();
        Self::with_members(domain, initial, rng)
    }

    /// Starts from the given members.
    pub fn with_members(domain: Domain, members: Vec<Point>, rng: R) -> Self {
        Self {
            domain,
            hull: ConvexHull::from_points(members.iter().copied()),
            size: members.len(),
            round: 0,
            resampled: 0,
            members: None,
            rng,
        }
    }

    /// Keep the full member list from now on (initial members are not
    /// retained, only admitted ones).
    pub fn record_members(mut self) -> Self {
        self.members = Some(Vec::new());
        self
    }

    pub fn hull(&self) -> &ConvexHull {
        &self.hull
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Candidate pairs redrawn because they coincided.
    pub fn resampled(&self) -> u64 {
        self.resampled
    }

    pub fn admitted(&self) -> Option<&[Point]> {
        self.members.as_deref()
    }

    pub fn step(&mut self) -> Round {
        let (w1, w2, h1) = loop {
            let w1 = self.domain.sample(&mut self.rng);
            let w2 = self.domain.sample(&mut self.rng);
            match bisector(w1, w2) {
                Ok(h) => break (w1, w2, h),
                Err(_) => self.resampled += 1,
            }
        };
        self.round += 1;
        let outcome = winner_from_extent(&self.hull, &h1);
        let mut hull_changed = false;
        if let Some(c) = outcome.winner {
            let p = c.pick(w1, w2);
            hull_changed = self.hull.insert(p);
            self.size += 1;
            if let Some(m) = self.members.as_mut() {
                m.push(p);
            }
        }
        Round {
            w1,
            w2,
            outcome,
            hull_changed,
        }
    }
}

/// Per-round record of a single trial.
///
/// `sizes` and `hull_vertex_counts` have `rounds + 1` entries (index 0 is the
/// initial group); `accepted[t]` is round `t + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub domain: Domain,
    pub sizes: Vec<u32>,
    pub accepted: Vec<bool>,
    pub hull_vertex_counts: Vec<u32>,
    pub resampled: u64,
}

impl Trajectory {
    pub fn rounds(&self) -> usize {
        self.accepted.len()
    }

    pub fn final_size(&self) -> u32 {
        *self.sizes.last().expect("sizes is never empty")
    }
}

fn check_shape(rounds: usize, k: usize) -> Result<()> {
    if rounds == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "rounds and initial size must be positive (rounds = {rounds}, k = {k})"
        )));
    }
    Ok(())
}

/// Runs one trial; the result depends only on the arguments.
pub fn run_trial(domain: Domain, rounds: usize, k: usize, seed: u64) -> Result<Trajectory> {
    check_shape(rounds, k)?;
    let mut process = AdmissionProcess::new(domain, k, seed::rng(seed));
    let mut sizes = Vec::with_capacity(rounds + 1);
    let mut accepted = Vec::with_capacity(rounds);
    let mut hull_vertex_counts = Vec::with_capacity(rounds + 1);
    sizes.push(k as u32);
    hull_vertex_counts.push(process.hull().len() as u32);
    for _ in 0..rounds {
        let r = process.step();
        accepted.push(r.outcome.accepted());
        sizes.push(process.size() as u32);
        hull_vertex_counts.push(process.hull().len() as u32);
    }
    Ok(Trajectory {
        seed,
        domain,
        sizes,
        accepted,
        hull_vertex_counts,
        resampled: process.resampled(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub domain: Domain,
    pub rounds: usize,
    pub trials: usize,
    /// Initial group size.
    pub k: usize,
    pub master_seed: u64,
    /// Worker threads; `0` means rayon's default.
    pub workers: usize,
}

impl EnsembleConfig {
    pub fn new(domain: Domain, rounds: usize, trials: usize) -> Self {
        Self {
            domain,
            rounds,
            trials,
            k: 1,
            master_seed: 0,
            workers: 0,
        }
    }

    pub fn seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn initial_size(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        seed::split(self.master_seed, trial as u64)
    }
}

/// Cross-trial aggregates, indexed by round (`0..=rounds`).
///
/// `acceptance_rate[0]` is zero; for `t >= 1` it estimates the probability
/// that round `t` admits someone, so that
/// `mean_size[t] - k == sum(acceptance_rate[1..=t])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub domain: Domain,
    pub rounds: usize,
    pub trials: usize,
    pub k: usize,
    pub master_seed: u64,
    pub mean_size: Vec<f64>,
    pub stderr_size: Vec<f64>,
    pub acceptance_rate: Vec<f64>,
    pub accept_counts: Vec<u64>,
    pub mean_hull_vertices: Vec<f64>,
    pub resampled: u64,
}

impl EnsembleStats {
    /// Pooled acceptance rate over rounds `lo..=hi` with its binomial
    /// standard error.
    pub fn window_rate(&self, lo: usize, hi: usize) -> (f64, f64) {
        let (lo, hi) = (lo.max(1), hi.min(self.rounds));
        if lo > hi {
            return (0.0, 0.0);
        }
        let count: u64 = self.accept_counts[lo..=hi].iter().sum();
        let n = (self.trials * (hi - lo + 1)) as f64;
        let rate = count as f64 / n;
        (rate, (rate * (1.0 - rate) / n).sqrt())
    }
}

#[derive(Clone)]
struct Tally {
    size_sum: Vec<u64>,
    size_sq: Vec<u64>,
    accepts: Vec<u64>,
    hull_sum: Vec<u64>,
    resampled: u64,
}

impl Tally {
    fn zeros(rounds: usize) -> Self {
        Self {
            size_sum: vec![0; rounds + 1],
            size_sq: vec![0; rounds + 1],
            accepts: vec![0; rounds + 1],
            hull_sum: vec![0; rounds + 1],
            resampled: 0,
        }
    }

    fn add(mut self, t: &Trajectory) -> Self {
        for (i, &s) in t.sizes.iter().enumerate() {
            self.size_sum[i] += s as u64;
            self.size_sq[i] += (s as u64) * (s as u64);
        }
        for (i, &a) in t.accepted.iter().enumerate() {
            self.accepts[i + 1] += a as u64;
        }
        for (i, &h) in t.hull_vertex_counts.iter().enumerate() {
            self.hull_sum[i] += h as u64;
        }
        self.resampled += t.resampled;
        self
    }

    fn merge(mut self, other: Tally) -> Self {
        let add = |a: &mut Vec<u64>, b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.size_sum, &other.size_sum);
        add(&mut self.size_sq, &other.size_sq);
        add(&mut self.accepts, &other.accepts);
        add(&mut self.hull_sum, &other.hull_sum);
        self.resampled += other.resampled;
        self
    }
}

/// Runs `trials` independent trials and aggregates them.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleStats> {
    check_shape(config.rounds, config.k)?;
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let cfg = *config;
    let work = move || -> Result<Tally> {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(cfg.domain, cfg.rounds, cfg.k, cfg.trial_seed(i)))
            .try_fold(|| Tally::zeros(cfg.rounds), |acc, t| t.map(|t| acc.add(&t)))
            .try_reduce(|| Tally::zeros(cfg.rounds), |a, b| Ok(a.merge(b)))
    };
    let tally = with_workers(config.workers, work)?;

    let n = config.trials as f64;
    let mean_size: Vec<f64> = tally.size_sum.iter().map(|&s| s as f64 / n).collect();
    let stderr_size = tally
        .size_sum
        .iter()
        .zip(&tally.size_sq)
        .map(|(&s, &q)| {
            if config.trials < 2 {
                return 0.0;
            }
            // Integer centred sum of squares: N q - s^2 = N^2 var_pop.
            let centred = (config.trials as u128 * q as u128 - (s as u128).pow(2)) as f64;
            (centred / (n * (n - 1.0)) / n).sqrt()
        })
        .collect();
    let acceptance_rate = tally.accepts.iter().map(|&a| a as f64 / n).collect();
    let mean_hull_vertices = tally.hull_sum.iter().map(|&h| h as f64 / n).collect();
    Ok(EnsembleStats {
        domain: config.domain,
        rounds: config.rounds,
        trials: config.trials,
        k: config.k,
        master_seed: config.master_seed,
        mean_size,
        stderr_size,
        acceptance_rate,
        accept_counts: tally.accepts,
        mean_hull_vertices,
        resampled: tally.resampled,
    })
}

/// Runs `f` on a dedicated pool of `workers` threads (`0`: the global pool).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Convenience for callers that want a process with a seeded stream.
pub fn seeded_process(domain: Domain, k: usize, seed: u64) -> AdmissionProcess<SimRng> {
    AdmissionProcess::new(domain, k, seed::rng(seed))
}
