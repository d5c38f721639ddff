//! Cumulative double integrals of Hermitian kernels over growing squares.
//!
//! For output times `T_1 < ... < T_M` the engine returns
//! `I(T_k) = ∫_0^{T_k} ∫_0^{T_k} K(a, b) da db`. The axis is cut into panels
//! whose breakpoints include every `T_k`, so the square `[0, T_k]^2` is an
//! exact union of panel cells. Each panel row `i` contributes
//!
//! ```text
//! cell(i, i) + 2 Re Σ_{j < i} cell(i, j)
//! ```
//!
//! (Hermitian symmetry folds cell `(j, i)` onto `(i, j)`), and
//! `I(T_k) = I(T_{k-1}) + Σ_{rows in (T_{k-1}, T_k]}`. Every cell is visited
//! once, so the whole curve costs one square at `T_M`.
//!
//! Cells closer than `diagonal_refine_width` to the diagonal are integrated
//! on sub-panels no wider than `diagonal_panel_width`, where the regularized
//! kernels peak. Rows are evaluated in parallel; reductions use a fixed
//! pairwise order so results do not depend on the thread count.

mod gauss;

use std::ops::Range;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wightman::RegularizationParams;
use crate::worldline::Worldline;

pub use gauss::gauss_legendre;

/// Relative tolerance of the Hermiticity spot check.
pub const HERMITICITY_TOLERANCE: f64 = 1e-8;
/// Pairs probed by the Hermiticity spot check.
pub const HERMITICITY_SAMPLES: usize = 16;
/// Threshold on the relative change under refinement for a passing check.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;

/// A kernel `K(a, b)` with `K(b, a) = conj(K(a, b))`.
///
/// Evaluation is split in two: per-abscissa work (worldline kinematics,
/// interaction-picture operators) goes into [`HermitianKernel::point`] and is
/// done once per quadrature node, the pairwise combination goes into
/// [`HermitianKernel::eval`].
pub trait HermitianKernel: Sync {
    type Point: Send + Sync;

    fn point(&self, tau: f64) -> Result<Self::Point>;

    fn eval(&self, a: &Self::Point, b: &Self::Point) -> Result<Complex64>;

    fn value(&self, a: f64, b: f64) -> Result<Complex64> {
        self.eval(&self.point(a)?, &self.point(b)?)
    }
}

/// Adapts a plain closure `(a, b) -> K(a, b)`.
#[derive(Clone, Copy, Debug)]
pub struct FnKernel<F>(pub F);

impl<F> HermitianKernel for FnKernel<F>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    type Point = f64;

    fn point(&self, tau: f64) -> Result<f64> {
        Ok(tau)
    }

    fn eval(&self, a: &f64, b: &f64) -> Result<Complex64> {
        Ok((self.0)(*a, *b))
    }
}

/// Discretization of the output times and the panel layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Output times `T_k`, strictly increasing and positive.
    pub t_grid: Vec<f64>,
    /// Panels per unit length away from the diagonal (at least 8).
    pub base_panels_per_unit: usize,
    /// Cells within this distance of `a = b` are refined.
    pub diagonal_refine_width: f64,
    /// Sub-panel width inside the refined band; keep it at most `eps / 4`.
    pub diagonal_panel_width: f64,
    /// Gauss-Legendre order per panel: 4, 8 or 16.
    pub gauss_order: usize,
}

impl GridSpec {
    pub const DEFAULT_PANELS_PER_UNIT: usize = 16;
    pub const DEFAULT_GAUSS_ORDER: usize = 8;

    /// Defaults for a kernel regularized at scale `epsilon`: refine within
    /// `8 eps` of the diagonal down to panels of `eps / 4`.
    pub fn new(t_grid: Vec<f64>, epsilon: f64) -> Self {
        GridSpec {
            t_grid,
            base_panels_per_unit: Self::DEFAULT_PANELS_PER_UNIT,
            diagonal_refine_width: 8.0 * epsilon,
            diagonal_panel_width: epsilon / 4.0,
            gauss_order: Self::DEFAULT_GAUSS_ORDER,
        }
    }

    /// Defaults, with base panels shrunk to resolve the worldline's shortest
    /// proper-time scale.
    pub fn for_worldline(t_grid: Vec<f64>, w: &Worldline, reg: RegularizationParams) -> Self {
        let mut spec = Self::new(t_grid, reg.epsilon);
        let scale = w.proper_time_scale();
        if scale.is_finite() {
            // two panels per kinematic time scale, capped to keep cost bounded
            let wanted = (2.0 / scale).ceil().min(4096.0) as usize;
            spec.base_panels_per_unit = spec.base_panels_per_unit.max(wanted);
        }
        spec
    }

    /// Every panel count doubled.
    pub fn refined(&self) -> Self {
        GridSpec {
            t_grid: self.t_grid.clone(),
            base_panels_per_unit: 2 * self.base_panels_per_unit,
            diagonal_refine_width: self.diagonal_refine_width,
            diagonal_panel_width: 0.5 * self.diagonal_panel_width,
            gauss_order: self.gauss_order,
        }
    }

    /// The same layout truncated to the first `k` output times.
    pub fn truncated(&self, k: usize) -> Self {
        GridSpec { t_grid: self.t_grid[..k].to_vec(), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_grid.is_empty() {
            return Err(Error::invalid("t_grid", "no output times"));
        }
        if !(self.t_grid[0] > 0.0) || self.t_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("t_grid", "output times must be positive and finite"));
        }
        if self.t_grid.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::invalid("t_grid", "output times must be strictly increasing"));
        }
        if self.base_panels_per_unit < 8 {
            return Err(Error::invalid(
                "base_panels_per_unit",
                format!("must be at least 8, got {}", self.base_panels_per_unit),
            ));
        }
        if !matches!(self.gauss_order, 4 | 8 | 16) {
            return Err(Error::invalid("gauss_order", format!("must be 4, 8 or 16, got {}", self.gauss_order)));
        }
        if !(self.diagonal_panel_width > 0.0) || !(self.diagonal_refine_width >= 0.0) {
            return Err(Error::invalid("diagonal_panel_width", "diagonal widths must be positive"));
        }
        Ok(())
    }
}

/// `I(T_k)` for every output time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulativeIntegral {
    pub t_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Number of pairwise kernel evaluations.
    pub kernel_evals: u64,
}

impl CumulativeIntegral {
    /// Real parts, after checking that every imaginary part is below
    /// `1e-10 |I| + 1e-14`.
    pub fn real_parts(&self) -> Result<Vec<f64>> {
        self.t_grid
            .iter()
            .zip(&self.values)
            .map(|(&t, v)| {
                if v.im.abs() > 1e-10 * v.norm() + 1e-14 {
                    Err(Error::ImaginaryResidual { t, imag: v.im })
                } else {
                    Ok(v.re)
                }
            })
            .collect()
    }
}

/// Outcome of re-running the integral with doubled panel counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub t: f64,
    pub value: f64,
    pub refined_value: f64,
    pub relative_difference: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub advice: Option<String>,
}

/// Sum with a fixed binary split, independent of how the inputs were produced.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n if n <= 8 => values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v),
        n => {
            let (left, right) = values.split_at(n / 2);
            pairwise_sum(left) + pairwise_sum(right)
        }
    }
}

struct Panel {
    lo: f64,
    hi: f64,
    coarse: Range<usize>,
    /// Sub-panel nodes; `None` when the panel is already narrow enough.
    fine: Option<Range<usize>>,
}

/// Quadrature nodes of every panel with the kernel's per-node data.
struct Layout<P> {
    panels: Vec<Panel>,
    /// `[start, end)` panel indices of each output interval `(T_{k-1}, T_k]`.
    intervals: Vec<Range<usize>>,
    points: Vec<P>,
    weights: Vec<f64>,
    refine_width: f64,
}

fn push_rule(nodes: &mut Vec<f64>, weights: &mut Vec<f64>, rule: &(Vec<f64>, Vec<f64>), lo: f64, hi: f64) {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    for (x, w) in rule.0.iter().zip(&rule.1) {
        nodes.push(mid + half * x);
        weights.push(half * w);
    }
}

fn panel_count(length: f64, per_unit: f64) -> usize {
    ((length * per_unit - 1e-9).ceil() as usize).max(1)
}

impl<P: Send + Sync> Layout<P> {
    fn build<K: HermitianKernel<Point = P>>(kernel: &K, spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        let rule = gauss_legendre(spec.gauss_order);
        let mut panels = Vec::new();
        let mut intervals = Vec::new();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut start = 0.0;
        for &end in &spec.t_grid {
            let first = panels.len();
            let m = panel_count(end - start, spec.base_panels_per_unit as f64);
            for p in 0..m {
                let lo = start + (end - start) * p as f64 / m as f64;
                let hi = if p + 1 == m { end } else { start + (end - start) * (p + 1) as f64 / m as f64 };
                let c0 = nodes.len();
                push_rule(&mut nodes, &mut weights, &rule, lo, hi);
                let coarse = c0..nodes.len();
                let subs = panel_count(hi - lo, 1.0 / spec.diagonal_panel_width);
                let fine = if subs > 1 {
                    let f0 = nodes.len();
                    for s in 0..subs {
                        let a = lo + (hi - lo) * s as f64 / subs as f64;
                        let b = if s + 1 == subs { hi } else { lo + (hi - lo) * (s + 1) as f64 / subs as f64 };
                        push_rule(&mut nodes, &mut weights, &rule, a, b);
                    }
                    Some(f0..nodes.len())
                } else {
                    None
                };
                panels.push(Panel { lo, hi, coarse, fine });
            }
            intervals.push(first..panels.len());
            start = end;
        }
        let points = nodes.par_iter().map(|&t| kernel.point(t)).collect::<Result<Vec<_>>>()?;
        Ok(Layout { panels, intervals, points, weights, refine_width: spec.diagonal_refine_width })
    }

    fn nodes_for(&self, i: usize, j: usize) -> (Range<usize>, Range<usize>) {
        let (a, b) = (&self.panels[i], &self.panels[j]);
        let gap = (b.lo - a.hi).max(a.lo - b.hi).max(0.0);
        if gap < self.refine_width && (a.fine.is_some() || b.fine.is_some()) {
            (a.fine.clone().unwrap_or_else(|| a.coarse.clone()), b.fine.clone().unwrap_or_else(|| b.coarse.clone()))
        } else {
            (a.coarse.clone(), b.coarse.clone())
        }
    }

    fn cell<K: HermitianKernel<Point = P>>(&self, kernel: &K, i: usize, j: usize) -> Result<(Complex64, u64)> {
        let (rows, cols) = self.nodes_for(i, j);
        let evals = (rows.len() * cols.len()) as u64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in rows {
            let mut inner = Complex64::new(0.0, 0.0);
            for q in cols.clone() {
                inner += self.weights[q] * kernel.eval(&self.points[p], &self.points[q])?;
            }
            acc += self.weights[p] * inner;
        }
        Ok((acc, evals))
    }

    /// `cell(i, i) + 2 Re Σ_{j<i} cell(i, j)`.
    fn folded_row<K: HermitianKernel<Point = P>>(&self, kernel: &K, i: usize) -> Result<(Complex64, u64)> {
        let (diag, mut evals) = self.cell(kernel, i, i)?;
        let mut off = Vec::with_capacity(i);
        for j in 0..i {
            let (v, n) = self.cell(kernel, i, j)?;
            off.push(v);
            evals += n;
        }
        let strip = pairwise_sum(&off);
        Ok((diag + Complex64::new(2.0 * strip.re, 0.0), evals))
    }

    /// Unfolded row `Σ_{j ≤ last} cell(i, j)`.
    fn full_row<K: HermitianKernel<Point = P>>(&self, kernel: &K, i: usize, last: usize) -> Result<Complex64> {
        let cells = (0..=last).map(|j| self.cell(kernel, i, j).map(|c| c.0)).collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&cells))
    }
}

fn spot_check<K: HermitianKernel>(kernel: &K, t_max: f64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..HERMITICITY_SAMPLES {
        let a = rng.random_range(0.0..=t_max);
        let b = rng.random_range(0.0..=t_max);
        let (pa, pb) = (kernel.point(a)?, kernel.point(b)?);
        let ab = kernel.eval(&pa, &pb)?;
        let ba = kernel.eval(&pb, &pa)?;
        let scale = ab.norm().max(ba.norm());
        let deviation = if scale > 0.0 { (ab - ba.conj()).norm() / scale } else { 0.0 };
        if deviation > HERMITICITY_TOLERANCE {
            return Err(Error::NonHermitian { tau1: a, tau2: b, deviation });
        }
    }
    Ok(())
}

/// `I(T_k) = ∫∫_{[0,T_k]^2} K` for every output time, accumulated strip by strip.
pub fn cumulative_square_integral<K: HermitianKernel>(kernel: &K, spec: &GridSpec) -> Result<CumulativeIntegral> {
    spec.validate()?;
    spot_check(kernel, *spec.t_grid.last().unwrap_or(&0.0))?;
    let layout = Layout::build(kernel, spec)?;
    let rows =
        (0..layout.panels.len()).into_par_iter().map(|i| layout.folded_row(kernel, i)).collect::<Result<Vec<_>>>()?;
    let kernel_evals = rows.iter().map(|r| r.1).sum();
    let row_values: Vec<Complex64> = rows.into_iter().map(|r| r.0).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let values = layout
        .intervals
        .iter()
        .map(|range| {
            total += pairwise_sum(&row_values[range.clone()]);
            total
        })
        .collect();
    Ok(CumulativeIntegral { t_grid: spec.t_grid.clone(), values, kernel_evals })
}

/// The square `[0, T_M]^2` summed cell by cell without Hermitian folding or
/// accumulation; the reference for the incremental path.
pub fn square_integral_direct<K: HermitianKernel>(kernel: &K, spec: &GridSpec) -> Result<Complex64> {
    let layout = Layout::build(kernel, spec)?;
    let last = layout.panels.len() - 1;
    let rows = (0..=last).into_par_iter().map(|i| layout.full_row(kernel, i, last)).collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&rows))
}

/// Compares `I(T_M)` against a run with all panel counts doubled.
pub fn convergence_check<K: HermitianKernel>(kernel: &K, spec: &GridSpec) -> Result<ConvergenceReport> {
    let base = cumulative_square_integral(kernel, spec)?;
    convergence_against(kernel, spec, *base.values.last().expect("validated grid is non-empty"))
}

/// As [`convergence_check`], reusing an already computed `I(T_M)`.
pub fn convergence_against<K: HermitianKernel>(
    kernel: &K,
    spec: &GridSpec,
    value: Complex64,
) -> Result<ConvergenceReport> {
    let refined = spec.refined();
    // the refined run keeps every T_k as a breakpoint so its panels nest the base ones
    let fine = cumulative_square_integral(kernel, &refined)?;
    let t = *fine.t_grid.last().expect("validated grid is non-empty");
    let refined_value = *fine.values.last().expect("validated grid is non-empty");
    let diff = (refined_value - value).norm();
    let relative_difference = if refined_value.norm() > 0.0 { diff / refined_value.norm() } else { diff };
    let passed = relative_difference < CONVERGENCE_TOLERANCE;
    let advice = (!passed).then(|| {
        format!(
            "not converged at T = {t}: raise base_panels_per_unit to {} and/or gauss_order to 16",
            refined.base_panels_per_unit
        )
    });
    Ok(ConvergenceReport {
        t,
        value: value.re,
        refined_value: refined_value.re,
        relative_difference,
        tolerance: CONVERGENCE_TOLERANCE,
        passed,
        advice,
    })
}
