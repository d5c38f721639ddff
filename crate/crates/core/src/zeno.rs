//! Zeno and anti-Zeno regimes of a decay-rate curve `Gamma(tau)`.
//!
//! `Gamma` increasing with the measurement interval is the Zeno regime
//! (measuring more often slows decay), decreasing is anti-Zeno.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::udw::Channel;
use crate::worldline::Family;

pub const DEFAULT_SLOPE_TOL: f64 = 1e-3;
/// Fewest points `segment_regimes` accepts.
pub const MIN_SEGMENTATION_POINTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub tau_grid: Vec<f64>,
    pub gamma: Vec<f64>,
    pub channel: Option<Channel>,
    pub family: Option<Family>,
}

impl DecayCurve {
    /// Requires a strictly increasing grid and finite `gamma` of equal length.
    pub fn new(tau_grid: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if tau_grid.len() != gamma.len() {
            return Err(Error::invalid("gamma", "length differs from the grid"));
        }
        if tau_grid.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::invalid("tau_grid", "must be strictly increasing"));
        }
        if let Some(k) = gamma.iter().position(|g| !g.is_finite()) {
            return Err(Error::Domain(format!("decay rate is not finite at tau = {}", tau_grid[k])));
        }
        Ok(DecayCurve { tau_grid, gamma, channel: None, family: None })
    }

    pub fn with_metadata(mut self, channel: Channel, family: Family) -> Self {
        self.channel = Some(channel);
        self.family = Some(family);
        self
    }

    pub fn len(&self) -> usize {
        self.tau_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_grid.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Zeno,
    AntiZeno,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Zeno => "zeno",
            Regime::AntiZeno => "anti_zeno",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeno" => Ok(Regime::Zeno),
            "anti_zeno" => Ok(Regime::AntiZeno),
            other => Err(Error::invalid("regime", format!("unknown label `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub tau_start: f64,
    pub tau_end: f64,
    pub regime: Regime,
}

/// Consecutive segments covering `[tau_min, tau_max]`, with alternating labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeSegmentation {
    pub segments: Vec<Segment>,
    /// Label of every grid point after merging.
    pub point_labels: Vec<Regime>,
}

impl RegimeSegmentation {
    pub fn pattern(&self) -> Vec<Regime> {
        self.segments.iter().map(|s| s.regime).collect()
    }

    pub fn regime_at(&self, tau: f64) -> Option<Regime> {
        self.segments.iter().find(|s| tau >= s.tau_start && tau <= s.tau_end).map(|s| s.regime)
    }
}

/// Centered differences inside, one-sided at the ends.
fn slopes(tau: &[f64], gamma: &[f64]) -> Vec<f64> {
    let n = tau.len();
    (0..n)
        .map(|k| {
            let (lo, hi) = (k.saturating_sub(1), (k + 1).min(n - 1));
            (gamma[hi] - gamma[lo]) / (tau[hi] - tau[lo])
        })
        .collect()
}

/// Labels each grid point by the sign of `dGamma/dtau`. Slopes smaller than
/// `slope_tol * max|Gamma| / (tau_max - tau_min)` keep the previous label,
/// and runs of a single point are absorbed by their neighbours.
pub fn segment_regimes(curve: &DecayCurve, slope_tol: f64) -> Result<RegimeSegmentation> {
    let n = curve.len();
    if n < MIN_SEGMENTATION_POINTS {
        return Err(Error::invalid(
            "curve",
            format!("segmentation needs at least {MIN_SEGMENTATION_POINTS} points, got {n}"),
        ));
    }
    if !(slope_tol >= 0.0) {
        return Err(Error::invalid("slope_tol", format!("must be non-negative, got {slope_tol}")));
    }
    let tau = &curve.tau_grid;
    let d = slopes(tau, &curve.gamma);
    let scale = curve.gamma.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let threshold = slope_tol * scale / (tau[n - 1] - tau[0]);

    let decisive: Vec<Option<Regime>> = d
        .iter()
        .map(|&s| {
            if s > threshold {
                Some(Regime::Zeno)
            } else if s < -threshold {
                Some(Regime::AntiZeno)
            } else {
                None
            }
        })
        .collect();
    let first = decisive.iter().flatten().next().copied().unwrap_or(Regime::Zeno);
    let mut labels = Vec::with_capacity(n);
    let mut current = first;
    for label in decisive {
        current = label.unwrap_or(current);
        labels.push(current);
    }

    // runs as (first index, one past last)
    let mut runs = runs_of(&labels);
    while let Some(k) = runs.iter().position(|r| r.1 - r.0 < 2) {
        if runs.len() == 1 {
            break;
        }
        let absorb = if k == 0 { 1 } else { k - 1 };
        let label = labels[runs[absorb].0];
        for l in &mut labels[runs[k].0..runs[k].1] {
            *l = label;
        }
        runs = runs_of(&labels);
    }

    let mut segments = Vec::with_capacity(runs.len());
    let mut start = tau[0];
    for (i, run) in runs.iter().enumerate() {
        let end = if i + 1 == runs.len() { tau[n - 1] } else { boundary(tau, &d, run.1 - 1) };
        segments.push(Segment { tau_start: start, tau_end: end, regime: labels[run.0] });
        start = end;
    }
    Ok(RegimeSegmentation { segments, point_labels: labels })
}

fn runs_of(labels: &[Regime]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = 0;
    for k in 1..=labels.len() {
        if k == labels.len() || labels[k] != labels[start] {
            runs.push((start, k));
            start = k;
        }
    }
    runs
}

/// Zero of the linearly interpolated slope between points `k` and `k + 1`,
/// or their midpoint when the slope does not change sign there.
fn boundary(tau: &[f64], d: &[f64], k: usize) -> f64 {
    let (d0, d1) = (d[k], d[k + 1]);
    if d0 * d1 < 0.0 {
        tau[k] + (tau[k + 1] - tau[k]) * d0 / (d0 - d1)
    } else {
        0.5 * (tau[k] + tau[k + 1])
    }
}

/// Survival after `n` measurements at interval `tau`: `s^n`.
pub fn repeated_measurement_survival(s: f64, n: u32) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain(format!("single-interval survival must lie in (0, 1], got {s}")));
    }
    if n == 0 {
        return Err(Error::invalid("n", "at least one measurement is needed"));
    }
    Ok(s.powf(f64::from(n)))
}

/// Measurement interval minimizing `Gamma`: the grid argmin (first on ties)
/// refined by the parabola through its neighbours.
pub fn optimal_interval(curve: &DecayCurve) -> Result<(f64, f64)> {
    if curve.is_empty() {
        return Err(Error::invalid("curve", "empty decay curve"));
    }
    let (tau, gamma) = (&curve.tau_grid, &curve.gamma);
    let k = gamma.iter().enumerate().fold(0, |best, (i, g)| if *g < gamma[best] { i } else { best });
    if k == 0 || k + 1 == gamma.len() {
        return Ok((tau[k], gamma[k]));
    }
    let (x0, x1, x2) = (tau[k - 1], tau[k], tau[k + 1]);
    let (y0, y1, y2) = (gamma[k - 1], gamma[k], gamma[k + 1]);
    // divided differences of the interpolating parabola
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if !(curvature > 0.0) {
        return Ok((x1, y1));
    }
    let vertex = (0.5 * (x0 + x1 - d01 / curvature)).clamp(x0, x2);
    let value = y0 + d01 * (vertex - x0) + curvature * (vertex - x0) * (vertex - x1);
    Ok((vertex, value.min(y1)))
}
