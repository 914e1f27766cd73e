//! Estimators for conditional cap-acceptance probabilities.
//!
//! For a cap `A = K ∩ W`, `Pr[Z(A) | Ā]` is the probability that, with the
//! members' hull equal to the closed complement `Ā`, a round admits a
//! candidate lying in `A`. Two independent estimators are provided:
//!
//! - [`acceptance_prob_event`] simulates the round directly: uniform pairs,
//!   winner by support-function containment of `Ā`, hit if the winner is in
//!   `A`.
//! - [`acceptance_prob_integral`] evaluates
//!   `2 ∫_A vol(B(z1, ξ) ∩ B(z2, ξ) ∩ A) dξ` by nested Monte Carlo, where
//!   `B(z, ξ)` is the ball centred at `z` through `ξ` and `z1, z2` are the
//!   chord endpoints.
//!
//! All probabilities are over pairs drawn uniformly from the domain, i.e.
//! integrals over `K × K` divided by `measure(K)^2`. Multiply by
//! `measure^2` ([`ProbEstimate::unnormalized`]) to get the raw integral.
//!
//! The bound functions `f_K` ([`f_disk`], [`f_square`]) lower-bound the
//! conditional acceptance probability inside a Voronoi cell up to a
//! constant; [`phi`] is their distribution function over uniform pairs and
//! [`upper_bound_integral`] the mean of `exp(-t f_K)`.

use std::f64::consts::E;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::election::conditional_winner;
use crate::geometry::{
    disk_segment_height, make_cap, square_cap_sides, Cap, Domain, HalfPlane, Point,
};
use crate::seed::{self, SimRng};
use crate::{Error, Result};

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl ProbEstimate {
    /// `scale * hits / n` with the binomial standard error.
    pub fn from_hits(hits: u64, n: u64, scale: f64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            value: scale * p,
            stderr: scale * (p * (1.0 - p) / n as f64).sqrt(),
            samples: n,
        }
    }

    /// `scale * mean(x)` from running sums, standard error from the sample
    /// variance.
    pub fn from_moments(sum: f64, sum_sq: f64, n: u64, scale: f64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            value: scale * mean,
            stderr: scale * (var / nf).sqrt(),
            samples: n,
        }
    }

    /// The raw integral over `K × K`.
    pub fn unnormalized(&self, domain: Domain) -> f64 {
        self.value * domain.measure().powi(2)
    }

    /// `|self - other|` in units of the combined standard error.
    pub fn z_score(&self, other: &ProbEstimate) -> f64 {
        let s = self.stderr.hypot(other.stderr);
        let d = (self.value - other.value).abs();
        if s > 0.0 {
            d / s
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn require_samples(n: u64, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(format!("{what} must be positive")));
    }
    Ok(())
}

/// Whether the pair admits a candidate lying in the cap, given hull `Ā`.
#[inline]
fn wins_inside(cap: &Cap, w1: Point, w2: Point) -> bool {
    match conditional_winner(cap.domain(), cap.half(), w1, w2) {
        Ok(out) => out
            .winner
            .is_some_and(|c| cap.contains(c.pick(w1, w2), 0.0)),
        // Coincident draws have probability zero.
        Err(_) => false,
    }
}

/// `Pr[Z(A) | Ā]` by direct simulation over pairs uniform on the domain.
pub fn acceptance_prob_event(cap: &Cap, samples: u64, seed: u64) -> Result<ProbEstimate> {
    require_samples(samples, "samples")?;
    let mut rng = seed::rng(seed);
    let domain = cap.domain();
    let hits = (0..samples)
        .filter(|_| {
            let (w1, w2) = (domain.sample(&mut rng), domain.sample(&mut rng));
            wins_inside(cap, w1, w2)
        })
        .count() as u64;
    Ok(ProbEstimate::from_hits(hits, samples, 1.0))
}

/// Same quantity as [`acceptance_prob_event`], drawing both candidates from
/// the cap and rescaling by `(area(A) / measure)^2`.
///
/// A candidate admitted inside `A` against the hull `Ā` forces the other
/// candidate into `A` as well (otherwise it would lie in the winner's cell),
/// so pairs with a candidate outside `A` never count.
pub fn acceptance_prob_event_in_cap(cap: &Cap, samples: u64, seed: u64) -> Result<ProbEstimate> {
    require_samples(samples, "samples")?;
    let mut rng = seed::rng(seed);
    let sampler = cap.sampler();
    let hits = (0..samples)
        .filter(|_| {
            let (w1, w2) = (sampler.sample(&mut rng), sampler.sample(&mut rng));
            wins_inside(cap, w1, w2)
        })
        .count() as u64;
    let scale = (cap.area() / cap.domain().measure()).powi(2);
    Ok(ProbEstimate::from_hits(hits, samples, scale))
}

/// `2 ∫_A vol(B(z1, ξ) ∩ B(z2, ξ) ∩ A) dξ / measure^2` by nested Monte Carlo:
/// `outer` points `ξ` uniform in `A`, each with `inner` points `u` uniform
/// in `A` testing `|u - z1| <= |ξ - z1|` and `|u - z2| <= |ξ - z2|`.
///
/// The standard error is taken across the outer points, so it includes the
/// inner sampling noise.
pub fn acceptance_prob_integral(
    cap: &Cap,
    outer: u64,
    inner: u64,
    seed: u64,
) -> Result<ProbEstimate> {
    require_samples(outer, "outer samples")?;
    require_samples(inner, "inner samples")?;
    let area = cap.area();
    if area <= 0.0 {
        return Ok(ProbEstimate {
            value: 0.0,
            stderr: 0.0,
            samples: outer * inner,
        });
    }
    let mut rng = seed::rng(seed);
    let sampler = cap.sampler();
    let (z1, z2) = (cap.z1(), cap.z2());
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..outer {
        let xi = sampler.sample(&mut rng);
        let (r1, r2) = (xi.dist_sq(z1), xi.dist_sq(z2));
        let hits = (0..inner)
            .filter(|_| {
                let u = sampler.sample(&mut rng);
                u.dist_sq(z1) <= r1 && u.dist_sq(z2) <= r2
            })
            .count();
        let frac = hits as f64 / inner as f64;
        sum += frac;
        sum_sq += frac * frac;
    }
    let scale = 2.0 * (area / cap.domain().measure()).powi(2);
    let mut est = ProbEstimate::from_moments(sum, sum_sq, outer, scale);
    est.samples = outer * inner;
    Ok(est)
}

/// `δ(w1, w2)^4`.
pub fn f_disk(w1: Point, w2: Point) -> Result<f64> {
    Ok(disk_segment_height(w1, w2)?.powi(4))
}

/// `a^4 ln(e b / a)` with `(a, b)` the legs of the largest triangular cap in
/// the smaller Voronoi region.
pub fn f_square(w1: Point, w2: Point) -> Result<f64> {
    let (a, b) = square_cap_sides(w1, w2)?;
    Ok(a.powi(4) * (E * b / a).ln())
}

/// `f_K` for the disk or square.
pub fn bound_function(domain: Domain, w1: Point, w2: Point) -> Result<f64> {
    match domain {
        Domain::UnitDisk => f_disk(w1, w2),
        Domain::UnitSquare => f_square(w1, w2),
        Domain::Interval => Err(Error::UnsupportedDomain {
            operation: "bound function",
            domain: domain.name(),
        }),
    }
}

fn bound_samples(domain: Domain) -> Result<()> {
    bound_function(domain, Point::new(0.1, 0.1), Point::new(0.2, 0.3)).map(|_| ())
}

/// Draws one uniform pair and evaluates `f_K`; coincident or chordless
/// draws (probability zero) are redrawn.
#[inline]
fn draw_bound<R: Rng + ?Sized>(domain: Domain, rng: &mut R) -> f64 {
    loop {
        let (w1, w2) = (domain.sample(rng), domain.sample(rng));
        if let Ok(f) = bound_function(domain, w1, w2) {
            return f;
        }
    }
}

/// `Φ(λ)`: fraction of uniform pairs with `f_K <= λ`.
pub fn phi(domain: Domain, lambda: f64, pairs: u64, seed: u64) -> Result<ProbEstimate> {
    Ok(phi_curve(domain, &[lambda], pairs, seed)?[0])
}

/// `Φ` on a grid of `λ` values, all evaluated on the same pairs (so the
/// curve is monotone in `λ` for any seed).
pub fn phi_curve(
    domain: Domain,
    lambdas: &[f64],
    pairs: u64,
    seed: u64,
) -> Result<Vec<ProbEstimate>> {
    require_samples(pairs, "pairs")?;
    bound_samples(domain)?;
    if let Some(l) = lambdas.iter().find(|l| !(**l >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be nonnegative, got {l}"
        )));
    }
    let mut rng: SimRng = seed::rng(seed);
    let mut hits = vec![0u64; lambdas.len()];
    for _ in 0..pairs {
        let f = draw_bound(domain, &mut rng);
        for (h, &l) in hits.iter_mut().zip(lambdas) {
            *h += (f <= l) as u64;
        }
    }
    Ok(hits
        .into_iter()
        .map(|h| ProbEstimate::from_hits(h, pairs, 1.0))
        .collect())
}

/// Mean of `exp(-t f_K)` over uniform pairs.
pub fn upper_bound_integral(domain: Domain, t: f64, pairs: u64, seed: u64) -> Result<ProbEstimate> {
    Ok(upper_bound_curve(domain, &[t], pairs, seed)?[0])
}

/// [`upper_bound_integral`] for several `t` on shared pairs.
pub fn upper_bound_curve(
    domain: Domain,
    ts: &[f64],
    pairs: u64,
    seed: u64,
) -> Result<Vec<ProbEstimate>> {
    require_samples(pairs, "pairs")?;
    bound_samples(domain)?;
    if let Some(t) = ts.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "t must be nonnegative, got {t}"
        )));
    }
    let mut rng: SimRng = seed::rng(seed);
    let mut sums = vec![(0.0f64, 0.0f64); ts.len()];
    for _ in 0..pairs {
        let f = draw_bound(domain, &mut rng);
        for (s, &t) in sums.iter_mut().zip(ts) {
            let x = (-t * f).exp();
            s.0 += x;
            s.1 += x * x;
        }
    }
    Ok(sums
        .into_iter()
        .map(|(s, q)| ProbEstimate::from_moments(s, q, pairs, 1.0))
        .collect())
}

/// Circular segment of height `delta` on the left of the unit disk.
pub fn disk_segment_cap(delta: f64) -> Result<Cap> {
    if !(delta > 0.0 && delta < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "segment height must be in (0, 2), got {delta}"
        )));
    }
    make_cap(
        Domain::UnitDisk,
        HalfPlane::new(Point::new(1.0, 0.0), delta - 1.0)?,
    )
}

/// Triangular cap at the origin corner with legs `a` (along x) and `b`
/// (along y): `{x/a + y/b <= 1}`.
pub fn square_triangle_cap(a: f64, b: f64) -> Result<Cap> {
    if !(a > 0.0 && b > 0.0 && a <= 1.0 && b <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "legs must lie in (0, 1], got ({a}, {b})"
        )));
    }
    make_cap(
        Domain::UnitSquare,
        HalfPlane::new(Point::new(1.0 / a, 1.0 / b), 1.0)?,
    )
}

/// `[0, length]` on the interval.
pub fn interval_cap(length: f64) -> Result<Cap> {
    if !(length > 0.0 && length < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "length must be in (0, 1), got {length}"
        )));
    }
    make_cap(
        Domain::Interval,
        HalfPlane::new(Point::new(1.0, 0.0), length)?,
    )
}

/// Estimated probability divided by a reference bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRatio {
    pub estimate: ProbEstimate,
    pub bound: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
}

impl BoundRatio {
    fn new(estimate: ProbEstimate, bound: f64) -> Self {
        Self {
            estimate,
            bound,
            ratio: estimate.value / bound,
            ratio_stderr: estimate.stderr / bound,
        }
    }
}

/// Largest segment height covered by the `δ^4` lower bound.
pub const MAX_SEGMENT_HEIGHT: f64 = 0.125;

/// `Pr[Z(J_δ) | J̄_δ] / δ^4` for each height, `0 < δ <= 1/8`. Grid point `i`
/// uses seed `split(seed, i)`.
pub fn lower_bound_ratio_disk(
    deltas: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<(f64, BoundRatio)>> {
    if let Some(d) = deltas
        .iter()
        .find(|d| !(**d > 0.0 && **d <= MAX_SEGMENT_HEIGHT))
    {
        return Err(Error::InvalidArgument(format!(
            "segment height must be in (0, 1/8], got {d}"
        )));
    }
    let caps = deltas
        .iter()
        .map(|&d| disk_segment_cap(d))
        .collect::<Result<Vec<_>>>()?;
    caps.par_iter()
        .zip(deltas.par_iter())
        .enumerate()
        .map(|(i, (cap, &d))| {
            let est = acceptance_prob_event_in_cap(cap, samples, seed::split(seed, i as u64))?;
            Ok((d, BoundRatio::new(est, d.powi(4))))
        })
        .collect()
}

/// The explicit triangular-cap lower bound `a^4 (1 + ln(b/a)) / 2^11`.
pub fn square_cap_lower_bound(a: f64, b: f64) -> f64 {
    a.powi(4) * (1.0 + (b / a).ln()) / 2048.0
}

/// `Pr[Z(J_ab) | J̄_ab]` over [`square_cap_lower_bound`] for each
/// `(a, b)`, `0 < a <= b <= 1`.
pub fn lower_bound_ratio_square(
    legs: &[(f64, f64)],
    samples: u64,
    seed: u64,
) -> Result<Vec<((f64, f64), BoundRatio)>> {
    if let Some(ab) = legs
        .iter()
        .find(|(a, b)| !(*a > 0.0 && a <= b && *b <= 1.0))
    {
        return Err(Error::InvalidArgument(format!(
            "need 0 < a <= b <= 1, got {ab:?}"
        )));
    }
    let caps = legs
        .iter()
        .map(|&(a, b)| square_triangle_cap(a, b))
        .collect::<Result<Vec<_>>>()?;
    caps.par_iter()
        .zip(legs.par_iter())
        .enumerate()
        .map(|(i, (cap, &(a, b)))| {
            let est = acceptance_prob_event_in_cap(cap, samples, seed::split(seed, i as u64))?;
            Ok(((a, b), BoundRatio::new(est, square_cap_lower_bound(a, b))))
        })
        .collect()
}
