//! Growth-law fits for ensemble curves.
//!
//! Every model is linear in two parameters after a transform of `t` and/or
//! `y`, and is fitted by ordinary least squares in that space:
//!
//! | model       | curve                      | regression                |
//! |-------------|----------------------------|---------------------------|
//! | `Log`       | `c ln t + d`               | `y` on `ln t`             |
//! | `Power`     | `c t^β`                    | `ln y` on `ln t`          |
//! | `LogLogLog` | `c ln t ln ln t + d`       | `y` on `ln t · ln ln t`   |
//! | `Decay`     | `c t^(-γ)`                 | `ln y` on `ln t`          |
//!
//! `r_squared` is measured in the regression space; `residual_rms` is always
//! measured on the original `y` scale.

use serde::{Deserialize, Serialize};

use crate::dynamics::EnsembleStats;
use crate::{Error, Result};

/// Minimum number of points for any fit.
pub const MIN_POINTS: usize = 5;

/// Rounds before this are excluded from fits by default.
pub const DEFAULT_T_MIN: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Log,
    Power,
    #[serde(rename = "logloglog")]
    LogLogLog,
    Decay,
}

impl Model {
    pub const GROWTH: [Model; 3] = [Model::Log, Model::LogLogLog, Model::Power];

    pub fn name(self) -> &'static str {
        match self {
            Model::Log => "log",
            Model::Power => "power",
            Model::LogLogLog => "logloglog",
            Model::Decay => "decay",
        }
    }

    /// Names of `params`, in order.
    pub fn param_names(self) -> [&'static str; 2] {
        match self {
            Model::Log | Model::LogLogLog => ["c", "d"],
            Model::Power => ["c", "beta"],
            Model::Decay => ["c", "gamma"],
        }
    }

    fn log_y(self) -> bool {
        matches!(self, Model::Power | Model::Decay)
    }

    fn regressor(self, t: f64) -> f64 {
        match self {
            Model::Log | Model::Power | Model::Decay => t.ln(),
            Model::LogLogLog => t.ln() * t.ln().ln(),
        }
    }

    fn eval(self, params: &[f64], t: f64) -> f64 {
        let (p, q) = (params[0], params[1]);
        match self {
            Model::Log => p * t.ln() + q,
            Model::LogLogLog => p * t.ln() * t.ln().ln() + q,
            Model::Power => p * t.powf(q),
            Model::Decay => p * t.powf(-q),
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "log" => Ok(Model::Log),
            "power" => Ok(Model::Power),
            "logloglog" | "loglog" => Ok(Model::LogLogLog),
            "decay" => Ok(Model::Decay),
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: Model,
    /// See [`Model::param_names`].
    pub params: Vec<f64>,
    /// Normal-approximation standard errors of `params`.
    pub param_stderr: Vec<f64>,
    pub r_squared: f64,
    pub residual_rms: f64,
    pub points: usize,
}

impl FitResult {
    pub fn predict(&self, t: f64) -> f64 {
        self.model.eval(&self.params, t)
    }

    /// Root-mean-square error of the fitted curve on other points.
    pub fn rms_on(&self, curve: &[(f64, f64)]) -> f64 {
        rms(curve.iter().map(|&(t, y)| y - self.predict(t)))
    }
}

fn rms(residuals: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for r in residuals {
        s += r * r;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        (s / n as f64).sqrt()
    }
}

struct LineFit {
    intercept: f64,
    slope: f64,
    intercept_se: f64,
    slope_se: f64,
    r_squared: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("regressor has no spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let s2 = if xs.len() > 2 { sse / (n - 2.0) } else { 0.0 };
    let scale: f64 = ys.iter().map(|y| y * y).sum();
    let r_squared = if syy > 1e-24 * scale {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(LineFit {
        intercept,
        slope,
        intercept_se: (s2 * (1.0 / n + mx * mx / sxx)).sqrt(),
        slope_se: (s2 / sxx).sqrt(),
        r_squared,
    })
}

/// Least-squares fit of `model` to `(t, y)` points.
pub fn fit(model: Model, curve: &[(f64, f64)]) -> Result<FitResult> {
    if curve.len() < MIN_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_POINTS,
            got: curve.len(),
        });
    }
    let min_t = if model == Model::LogLogLog { 1.0 } else { 0.0 };
    if let Some(&(t, y)) = curve.iter().find(|&&(t, y)| {
        !(t > min_t) || !t.is_finite() || !y.is_finite() || (model.log_y() && !(y > 0.0))
    }) {
        return Err(Error::InvalidArgument(format!(
            "point (t = {t}, y = {y}) is outside the domain of the {} model",
            model.name()
        )));
    }
    let xs: Vec<f64> = curve.iter().map(|&(t, _)| model.regressor(t)).collect();
    let ys: Vec<f64> = curve
        .iter()
        .map(|&(_, y)| if model.log_y() { y.ln() } else { y })
        .collect();
    let line = least_squares(&xs, &ys)?;
    let (params, param_stderr) = match model {
        Model::Log | Model::LogLogLog => (
            vec![line.slope, line.intercept],
            vec![line.slope_se, line.intercept_se],
        ),
        Model::Power => {
            let c = line.intercept.exp();
            (
                vec![c, line.slope],
                vec![c * line.intercept_se, line.slope_se],
            )
        }
        Model::Decay => {
            let c = line.intercept.exp();
            (
                vec![c, -line.slope],
                vec![c * line.intercept_se, line.slope_se],
            )
        }
    };
    let mut out = FitResult {
        model,
        params,
        param_stderr,
        r_squared: line.r_squared,
        residual_rms: 0.0,
        points: curve.len(),
    };
    out.residual_rms = out.rms_on(curve);
    Ok(out)
}

/// `y ≈ c t^β`.
pub fn fit_power(curve: &[(f64, f64)]) -> Result<FitResult> {
    fit(Model::Power, curve)
}

/// `y ≈ c ln t + d`.
pub fn fit_log(curve: &[(f64, f64)]) -> Result<FitResult> {
    fit(Model::Log, curve)
}

/// `y ≈ c ln t ln ln t + d`.
pub fn fit_loglog(curve: &[(f64, f64)]) -> Result<FitResult> {
    fit(Model::LogLogLog, curve)
}

/// `rate ≈ c t^(-γ)` on binned acceptance rates (see [`bin_acceptance`]).
pub fn fit_decay(binned: &[(f64, f64)]) -> Result<FitResult> {
    fit(Model::Decay, binned)
}

/// A fit trained on half the points and scored on the other half.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedFit {
    pub fit: FitResult,
    pub holdout_rms: f64,
}

/// Fits each model on the odd-indexed points and ranks by RMS error on the
/// even-indexed ones, best first.
pub fn model_compare(curve: &[(f64, f64)], models: &[Model]) -> Result<Vec<RankedFit>> {
    if models.len() < 2 {
        return Err(Error::InvalidArgument(
            "model comparison needs at least two models".into(),
        ));
    }
    let train: Vec<(f64, f64)> = curve.iter().skip(1).step_by(2).copied().collect();
    let test: Vec<(f64, f64)> = curve.iter().step_by(2).copied().collect();
    if train.len() < MIN_POINTS {
        return Err(Error::InsufficientData {
            needed: 2 * MIN_POINTS,
            got: curve.len(),
        });
    }
    let mut ranked = models
        .iter()
        .map(|&m| {
            let fit = fit(m, &train)?;
            let holdout_rms = fit.rms_on(&test);
            Ok(RankedFit { fit, holdout_rms })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| a.holdout_rms.total_cmp(&b.holdout_rms));
    Ok(ranked)
}

/// Points with `t >= t_min`.
pub fn burn_in(curve: &[(f64, f64)], t_min: f64) -> Vec<(f64, f64)> {
    curve.iter().copied().filter(|&(t, _)| t >= t_min).collect()
}

/// Distinct integer rounds spaced evenly in `ln t` over `[t_min, t_max]`,
/// always including both ends.
pub fn log_spaced_rounds(t_min: usize, t_max: usize, per_decade: usize) -> Vec<usize> {
    let t_min = t_min.max(1);
    if t_max < t_min {
        return Vec::new();
    }
    let span = (t_max as f64 / t_min as f64).log10();
    let steps = (span * per_decade as f64).ceil().max(1.0) as usize;
    let mut out: Vec<usize> = (0..=steps)
        .map(|i| (t_min as f64 * 10f64.powf(span * i as f64 / steps as f64)).round() as usize)
        .map(|t| t.clamp(t_min, t_max))
        .collect();
    out.dedup();
    out
}

/// Log-spaced samples `(t, mean_size[t])` for `t_min <= t <= rounds`.
pub fn size_curve(stats: &EnsembleStats, t_min: usize, per_decade: usize) -> Vec<(f64, f64)> {
    series_curve(&stats.mean_size, t_min, per_decade)
}

/// Log-spaced samples `(t, values[t])`, `t_min <= t < values.len()`.
pub fn series_curve(values: &[f64], t_min: usize, per_decade: usize) -> Vec<(f64, f64)> {
    if values.len() < 2 {
        return Vec::new();
    }
    log_spaced_rounds(t_min, values.len() - 1, per_decade)
        .into_iter()
        .map(|t| (t as f64, values[t]))
        .collect()
}

/// One log-spaced bin of per-round acceptance rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBin {
    /// First and last round in the bin.
    pub first: usize,
    pub last: usize,
    /// Geometric centre `sqrt(first * last)`.
    pub center: f64,
    pub rate: f64,
    /// Trial-rounds pooled in the bin.
    pub opportunities: u64,
}

/// Pools `rates[t]` (index = round) into bins of equal width in `ln t`
/// starting at `t_min`. Bins with fewer than `min_opportunities` trial-rounds
/// or with no acceptances are dropped.
pub fn bin_acceptance(
    rates: &[f64],
    trials: usize,
    t_min: usize,
    bins_per_decade: usize,
    min_opportunities: u64,
) -> Vec<RateBin> {
    if rates.len() < 2 || bins_per_decade == 0 {
        return Vec::new();
    }
    let t_max = rates.len() - 1;
    let t_min = t_min.max(1);
    let mut edges: Vec<usize> = Vec::new();
    let mut i = 0u32;
    loop {
        let e = (t_min as f64 * 10f64.powf(i as f64 / bins_per_decade as f64)).round() as usize;
        if e > t_max + 1 {
            break;
        }
        if edges.last() != Some(&e) {
            edges.push(e);
        }
        i += 1;
    }
    edges
        .windows(2)
        .filter_map(|w| {
            let (first, last) = (w[0], w[1] - 1);
            let width = last - first + 1;
            let opportunities = (width * trials) as u64;
            let rate = rates[first..=last].iter().sum::<f64>() / width as f64;
            (opportunities >= min_opportunities && rate > 0.0).then(|| RateBin {
                first,
                last,
                center: ((first * last) as f64).sqrt(),
                rate,
                opportunities,
            })
        })
        .collect()
}

/// `(center, rate)` pairs ready for [`fit_decay`].
pub fn rate_points(bins: &[RateBin]) -> Vec<(f64, f64)> {
    bins.iter().map(|b| (b.center, b.rate)).collect()
}
