use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A labelled time series of nonnegative values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl DecaySeries {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        let label = label.into();
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Fit(format!(
                    "{label}: times must be strictly increasing"
                )));
            }
        }
        if let Some(p) = points
            .iter()
            .find(|p| !p.0.is_finite() || !p.1.is_finite() || p.1 < 0.0)
        {
            return Err(Error::Fit(format!(
                "{label}: invalid point ({}, {})",
                p.0, p.1
            )));
        }
        Ok(DecaySeries { label, points })
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    fn window(&self, window: (f64, f64)) -> Vec<(f64, f64)> {
        let slack = 1e-12 * window.1.abs().max(1.0);
        self.points
            .iter()
            .copied()
            .filter(|p| p.0 >= window.0 - slack && p.0 <= window.1 + slack)
            .collect()
    }
}

/// Least-squares power law v ≈ e^{intercept} t^{exponent}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub log_intercept: f64,
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Least-squares exponential v ≈ e^{intercept − rate·t}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub rate: f64,
    pub log_intercept: f64,
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Measured envelope of value/bound: its maximum and its log-log trend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub sup_ratio: f64,
    pub trend_slope: f64,
    pub trend_window: (f64, f64),
}

/// (slope, intercept, rms residual) of the least-squares line.
fn line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

fn windowed_logs(
    series: &DecaySeries,
    window: (f64, f64),
    log_t: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let pts = series.window(window);
    if pts.len() < 5 {
        return Err(Error::Fit(format!(
            "{}: need at least 5 points in [{}, {}], found {}",
            series.label,
            window.0,
            window.1,
            pts.len()
        )));
    }
    if let Some(p) = pts.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Fit(format!(
            "{}: nonpositive value {} at t = {} inside the fit window",
            series.label, p.1, p.0
        )));
    }
    if log_t && pts[0].0 <= 0.0 {
        return Err(Error::Fit(format!(
            "{}: power-law fit needs t > 0",
            series.label
        )));
    }
    let xs = pts
        .iter()
        .map(|p| if log_t { p.0.ln() } else { p.0 })
        .collect();
    let ys = pts.iter().map(|p| p.1.ln()).collect();
    Ok((xs, ys))
}

pub fn fit_power_law(series: &DecaySeries, window: (f64, f64)) -> Result<FitResult> {
    let (xs, ys) = windowed_logs(series, window, true)?;
    let (slope, intercept, rms) = line(&xs, &ys);
    Ok(FitResult {
        exponent: slope,
        log_intercept: intercept,
        residual_rms: rms,
        window,
        points: xs.len(),
    })
}

pub fn fit_exponential_rate(series: &DecaySeries, window: (f64, f64)) -> Result<ExpFit> {
    let (xs, ys) = windowed_logs(series, window, false)?;
    let (slope, intercept, rms) = line(&xs, &ys);
    Ok(ExpFit {
        rate: -slope,
        log_intercept: intercept,
        residual_rms: rms,
        window,
        points: xs.len(),
    })
}

/// Sup of value/bound over the series and the power-law slope of the ratio on
/// `trend_window`.
pub fn bound_check(
    values: &DecaySeries,
    bounds: &[f64],
    trend_window: (f64, f64),
) -> Result<BoundCheck> {
    if bounds.len() != values.points.len() {
        return Err(Error::Fit("bound and value series differ in length".into()));
    }
    let mut ratios = Vec::with_capacity(bounds.len());
    for (&(t, v), &b) in values.points.iter().zip(bounds) {
        if !(b > 0.0) {
            return Err(Error::Fit(format!("nonpositive bound {b} at t = {t}")));
        }
        ratios.push((t, v / b));
    }
    let sup_ratio = ratios.iter().map(|p| p.1).fold(0.0, f64::max);
    let ratio_series = DecaySeries::new(format!("{}/bound", values.label), ratios)?;
    let trend = fit_power_law(&ratio_series, trend_window)?;
    Ok(BoundCheck {
        sup_ratio,
        trend_slope: trend.exponent,
        trend_window,
    })
}

/// `count` log-spaced points on [lo, hi], endpoints exact.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// `count` evenly spaced points on [lo, hi].
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}
