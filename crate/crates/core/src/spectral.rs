//! Ohmic bath parameters and the frequency-domain oracles of the stationary
//! worldline.
//!
//! Under `eps = 1/(2 omega_c)` and `c = 2 pi sqrt(G)` the regularized
//! stationary Wightman function is the Fourier transform of
//! `J(w) = G w exp(-w / omega_c)`:
//!
//! ```text
//! c^2 W(d) = -G / (d - i/omega_c)^2 = ∫_0^∞ J(w) exp(-i w d) dw
//! ```
//!
//! The functions here never call the two-dimensional engine; they integrate
//! in one dimension with an adaptive Gauss-Kronrod rule so that agreement
//! with the engine is a genuine cross-check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wightman::RegularizationParams;

/// Upper frequency limit of the oracle integrals, in units of `omega_c`.
/// The dropped tail is of order `exp(-40)` relative.
pub const FREQUENCY_CUTOFF_FACTOR: f64 = 40.0;

const ORACLE_REL_TOL: f64 = 1e-12;
const ORACLE_MAX_INTERVALS: usize = 20_000;

/// Ohmic spectral density `J(w) = G w exp(-w / omega_c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OhmicParams {
    pub g: f64,
    pub omega_c: f64,
}

impl OhmicParams {
    pub fn new(g: f64, omega_c: f64) -> Result<Self> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::invalid("g", format!("must be finite and non-negative, got {g}")));
        }
        if !(omega_c > 0.0) || !omega_c.is_finite() {
            return Err(Error::invalid("omega_c", format!("must be finite and positive, got {omega_c}")));
        }
        Ok(OhmicParams { g, omega_c })
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.g * omega * (-omega / self.omega_c).exp()
    }
}

/// `(eps, c) = (1 / (2 omega_c), 2 pi sqrt(G))`.
pub fn map_params(p: OhmicParams) -> (RegularizationParams, f64) {
    let reg = RegularizationParams { epsilon: 0.5 / p.omega_c };
    (reg, 2.0 * PI * p.g.sqrt())
}

/// `chi(t) = -2 G ln(1 + omega_c^2 t^2)` for the stationary worldline.
pub fn chi_stationary_analytic(p: OhmicParams, t: f64) -> f64 {
    -2.0 * p.g * (p.omega_c * p.omega_c * t * t).ln_1p()
}

/// `∫_0^{40 omega_c} J(w) exp(-i w d) dw` by adaptive quadrature.
pub fn bath_correlation(p: OhmicParams, delta: f64) -> Complex64 {
    let top = FREQUENCY_CUTOFF_FACTOR * p.omega_c;
    let pieces = oscillation_breaks(0.0, top, delta.abs(), &[]);
    let re = integrate(|w| p.spectral_density(w) * (w * delta).cos(), &pieces);
    let im = integrate(|w| -p.spectral_density(w) * (w * delta).sin(), &pieces);
    Complex64::new(re, im)
}

/// Stationary sigma_x survival from the frequency integral
/// `1 - ∫ J(w) 4 sin^2((w - 2 w0) t / 2) / (w - 2 w0)^2 dw`.
pub fn survival_sx_stationary_oracle(p: OhmicParams, omega0: f64, t: f64) -> f64 {
    if t == 0.0 || p.g == 0.0 {
        return 1.0;
    }
    let resonance = 2.0 * omega0;
    let top = FREQUENCY_CUTOFF_FACTOR * p.omega_c;
    let pieces = oscillation_breaks(0.0, top, t, &[resonance]);
    1.0 - integrate(|w| p.spectral_density(w) * filter(w - resonance, t), &pieces)
}

/// `4 sin^2(x t / 2) / x^2`, continuous through `x = 0` where it is `t^2`.
fn filter(x: f64, t: f64) -> f64 {
    let xt = x * t;
    if xt.abs() < 1e-4 {
        t * t * (1.0 - xt * xt / 12.0)
    } else {
        let s = (0.5 * xt).sin();
        4.0 * s * s / (x * x)
    }
}

/// `∫_0^t (t - d) 2 Re f(d) dd`, the square integral of a stationary
/// Hermitian kernel `K(a, b) = f(a - b)`. `width` is the scale over which
/// `f` varies near `d = 0`.
pub fn stationary_square_integral<F: Fn(f64) -> Complex64>(f: F, t: f64, width: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let mut breaks = vec![0.0];
    let mut edge = 0.25 * width;
    while edge < t {
        breaks.push(edge);
        edge *= 2.0;
    }
    breaks.push(t);
    let breaks = refine_uniform(&breaks, t / 64.0);
    integrate(|d| (t - d) * 2.0 * f(d).re, &breaks)
}

/// Breakpoints with spacing below a quarter period of `exp(i w scale)`,
/// with `extra` points inserted.
fn oscillation_breaks(lo: f64, hi: f64, scale: f64, extra: &[f64]) -> Vec<f64> {
    let mut breaks = vec![lo, hi];
    breaks.extend(extra.iter().copied().filter(|x| *x > lo && *x < hi));
    breaks.sort_by(f64::total_cmp);
    let step = if scale > 0.0 { 0.5 * PI / scale } else { hi - lo };
    refine_uniform(&breaks, step.min((hi - lo) / 16.0))
}

fn refine_uniform(breaks: &[f64], step: f64) -> Vec<f64> {
    let mut out = vec![breaks[0]];
    for pair in breaks.windows(2) {
        let n = ((pair[1] - pair[0]) / step).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(if k == n { pair[1] } else { pair[0] + (pair[1] - pair[0]) * k as f64 / n as f64 });
        }
    }
    out
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// `(kronrod, |kronrod - gauss|)` on `[a, b]`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let centre = f(mid);
    let mut kronrod = WGK[7] * centre;
    let mut gauss = WG[3] * centre;
    for k in 0..7 {
        let pair = f(mid - half * XGK[k]) + f(mid + half * XGK[k]);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive integration over the intervals between `breaks`,
/// bisecting the worst interval until the summed error estimate drops below
/// `1e-12` of the result.
fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64]) -> f64 {
    let mut parts: Vec<(f64, f64, f64, f64)> = breaks
        .windows(2)
        .map(|p| {
            let (v, e) = gk15(&f, p[0], p[1]);
            (p[0], p[1], v, e)
        })
        .collect();
    while parts.len() < ORACLE_MAX_INTERVALS {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        if error <= ORACLE_REL_TOL * total.abs() || error < 1e-300 {
            break;
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one interval");
        let (a, b, _, _) = parts[worst];
        let m = 0.5 * (a + b);
        let (vl, el) = gk15(&f, a, m);
        let (vr, er) = gk15(&f, m, b);
        parts[worst] = (a, m, vl, el);
        parts.push((m, b, vr, er));
    }
    let mut values: Vec<f64> = parts.iter().map(|p| p.2).collect();
    values.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    values.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bench() -> OhmicParams {
        OhmicParams::new(0.01, 10.0).unwrap()
    }

    #[test]
    fn parameter_map() {
        let (reg, c) = map_params(bench());
        assert_relative_eq!(reg.epsilon, 0.05, max_relative = 1e-15);
        assert_relative_eq!(c, 0.628_318_530_717_958_6, max_relative = 1e-15);
        let (reg, c) = map_params(OhmicParams::new(1.0, 0.5).unwrap());
        assert_eq!(reg.epsilon, 1.0);
        assert_relative_eq!(c, 2.0 * PI, max_relative = 1e-15);
        assert_eq!(map_params(OhmicParams::new(0.0, 3.0).unwrap()).1, 0.0);
        assert!(OhmicParams::new(-1.0, 1.0).is_err());
        assert!(OhmicParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn chi_closed_form_values() {
        assert_eq!(chi_stationary_analytic(bench(), 0.0), 0.0);
        assert_relative_eq!(chi_stationary_analytic(bench(), 1.0), -0.02 * 101f64.ln(), max_relative = 1e-14);
        let tail = chi_stationary_analytic(bench(), 100.0);
        assert_relative_eq!(tail, -4.0 * 0.01 * (1000f64).ln(), max_relative = 1e-7);
    }

    #[test]
    fn gauss_kronrod_on_smooth_functions() {
        assert_relative_eq!(integrate(f64::exp, &[0.0, 1.0]), 1f64.exp() - 1.0, max_relative = 1e-14);
        assert_relative_eq!(
            integrate(|x| 1.0 / (1.0 + x * x), &[-50.0, 50.0]),
            2.0 * 50f64.atan(),
            max_relative = 1e-12
        );
        assert_relative_eq!(integrate(|x| x.sqrt(), &[0.0, 1.0]), 2.0 / 3.0, max_relative = 1e-11);
    }

    #[test]
    fn transform_identity() {
        let p = bench();
        let (reg, c) = map_params(p);
        let closed = |d: f64| {
            let s = Complex64::new(d, -2.0 * reg.epsilon);
            -c * c / (4.0 * PI * PI * s * s)
        };
        let at_zero = bath_correlation(p, 0.0);
        assert_relative_eq!(at_zero.re, p.g * p.omega_c * p.omega_c, max_relative = 1e-8);
        assert_relative_eq!(closed(0.0).re, p.g * p.omega_c * p.omega_c, max_relative = 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..20 {
            let d = rng.random_range(-3.0..3.0);
            let (num, want) = (bath_correlation(p, d), closed(d));
            assert!((num - want).norm() <= 1e-8 * want.norm(), "{d}: {num} vs {want}");
        }
    }

    #[test]
    fn survival_oracle_limits() {
        assert_eq!(survival_sx_stationary_oracle(bench(), 2.0, 0.0), 1.0);
        let off = OhmicParams::new(0.0, 10.0).unwrap();
        assert_eq!(survival_sx_stationary_oracle(off, 2.0, 1.3), 1.0);
        // short times: 1 - s -> t^2 ∫ J = t^2 G omega_c^2
        let t = 1e-4;
        let short = 1.0 - survival_sx_stationary_oracle(bench(), 2.0, t);
        assert_relative_eq!(short, t * t * 0.01 * 100.0, max_relative = 1e-5);
    }

    #[test]
    fn survival_oracle_matches_time_domain_reduction() {
        // same survival from the time-domain stationary reduction of c^2 W e^{2 i w0 d}
        let p = bench();
        let (reg, c) = map_params(p);
        let kernel = |d: f64| {
            let s = Complex64::new(d, -2.0 * reg.epsilon);
            -c * c / (4.0 * PI * PI * s * s) * Complex64::from_polar(1.0, 4.0 * d)
        };
        for t in [0.02, 0.5, 1.0, 3.0] {
            let time_domain = 1.0 - stationary_square_integral(kernel, t, reg.epsilon);
            let freq = survival_sx_stationary_oracle(p, 2.0, t);
            assert_relative_eq!(time_domain, freq, max_relative = 1e-10);
        }
    }

    #[test]
    fn reduction_reproduces_closed_form_chi() {
        let p = bench();
        let (reg, c) = map_params(p);
        let w = |d: f64| {
            let s = Complex64::new(d, -2.0 * reg.epsilon);
            -1.0 / (4.0 * PI * PI * s * s)
        };
        for t in [0.01, 0.3, 1.0, 3.0] {
            let chi = -2.0 * c * c * stationary_square_integral(w, t, reg.epsilon);
            assert_relative_eq!(chi, chi_stationary_analytic(p, t), max_relative = 1e-11);
        }
    }
}
