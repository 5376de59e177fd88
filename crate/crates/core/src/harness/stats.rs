//! Quantiles, least-squares fits and the geometric Chernoff budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nearest-rank `q`-quantile of `xs` (sorted copy), `None` when empty.
pub fn quantile(xs: &[u64], q: f64) -> Option<u64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_unstable();
    let rank = ((q.clamp(0.0, 1.0) * v.len() as f64).ceil() as usize).clamp(1, v.len());
    Some(v[rank - 1])
}

pub fn mean(xs: &[u64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().map(|&x| x as f64).sum::<f64>() / xs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `y = a x + b`
    Linear,
    /// `y = a x log2 x + b`
    XLogx,
    /// `y = a log2 x + b`
    LogOnly,
}

impl FitModel {
    pub fn feature(self, x: f64) -> f64 {
        match self {
            FitModel::Linear => x,
            FitModel::XLogx => x * x.log2(),
            FitModel::LogOnly => x.log2(),
        }
    }
}

impl std::str::FromStr for FitModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(FitModel::Linear),
            "x_logx" => Ok(FitModel::XLogx),
            "log_only" => Ok(FitModel::LogOnly),
            _ => Err(Error::Config(format!("unknown fit model {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// `sqrt(sum (y - yhat)^2 / sum y^2)`.
    pub residual: f64,
}

impl Fit {
    pub fn predict(&self, model: FitModel, x: f64) -> f64 {
        self.slope * model.feature(x) + self.intercept
    }
}

pub fn fit_scaling(xs: &[f64], ys: &[f64], model: FitModel) -> Result<Fit> {
    if xs.len() != ys.len() {
        return Err(Error::Fit(format!("{} xs but {} ys", xs.len(), ys.len())));
    }
    if xs.len() < 3 {
        return Err(Error::Fit("need at least 3 points".into()));
    }
    let fs: Vec<f64> = xs.iter().map(|&x| model.feature(x)).collect();
    if fs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite feature or value".into()));
    }
    let n = fs.len() as f64;
    let mf = fs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = fs.iter().map(|f| (f - mf) * (f - mf)).sum();
    if sxx <= 1e-12 * (1.0 + mf * mf) {
        return Err(Error::Fit("degenerate xs".into()));
    }
    let sxy: f64 = fs.iter().zip(ys).map(|(f, y)| (f - mf) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mf;
    let sse: f64 = fs.iter().zip(ys).map(|(f, y)| (y - slope * f - intercept).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let residual = if syy > 0.0 { (sse / syy).sqrt() } else { 0.0 };
    Ok(Fit { slope, intercept, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffBudget {
    pub count: u64,
    pub delta: f64,
    pub p: f64,
    /// `count / (1 - p)`.
    pub mean: f64,
    /// `(1 + delta) * mean`.
    pub budget: f64,
    /// `exp(-delta^2 (count - 1) / (2 (1 + delta)))`.
    pub bound: f64,
}

/// Tail bound for a sum of `count` geometric variables with success probability `1 - p`.
pub fn geometric_chernoff_budget(count: u64, delta: f64, p: f64) -> Result<ChernoffBudget> {
    if count < 2 {
        return Err(Error::Parameter(format!("count must be at least 2, got {count}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Parameter(format!("p must be in [0, 1), got {p}")));
    }
    let mean = count as f64 / (1.0 - p);
    let bound = (-delta * delta * (count - 1) as f64 / (2.0 * (1.0 + delta))).exp();
    Ok(ChernoffBudget { count, delta, p, mean, budget: (1.0 + delta) * mean, bound })
}
