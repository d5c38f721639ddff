//! Exact pure-dephasing channel (`sigma_z` coupling) on arbitrary worldlines.
//!
//! Populations are conserved and the coherence decays as
//! `|rho_10(t)| = |rho_10(0)| exp(chi(t))` with
//!
//! ```text
//! chi(T) = -2 c^2 ∫_0^T ∫_0^T W(a, b) da db
//! ```
//!
//! at zero bath temperature. Starting from `|+>`, the probability of finding
//! the freely rotated `|+>` is `(1 + exp(chi)) / 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{cumulative_square_integral, GridSpec};
use crate::wightman::{RegularizationParams, WightmanKernel};
use crate::worldline::Worldline;

/// Largest `chi` accepted as zero up to rounding.
pub const CHI_POSITIVITY_TOLERANCE: f64 = 1e-12;

/// Internal Hamiltonian `omega0 sigma_z + delta sigma_x` and coupling strength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    pub omega0: f64,
    pub delta: f64,
    pub coupling_c: f64,
}

impl QubitParams {
    pub fn new(omega0: f64, delta: f64, coupling_c: f64) -> Result<Self> {
        if !omega0.is_finite() {
            return Err(Error::invalid("omega0", format!("must be finite, got {omega0}")));
        }
        if !delta.is_finite() {
            return Err(Error::invalid("delta", format!("must be finite, got {delta}")));
        }
        if !(coupling_c >= 0.0) || !coupling_c.is_finite() {
            return Err(Error::invalid("coupling_c", format!("must be finite and non-negative, got {coupling_c}")));
        }
        Ok(QubitParams { omega0, delta, coupling_c })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasingResult {
    pub tau_grid: Vec<f64>,
    pub chi: Vec<f64>,
    pub survival: Vec<f64>,
    pub coherence_magnitude: Vec<f64>,
    pub kernel_evals: u64,
}

/// `chi(T_k)` on the proper-time grid of `spec`.
pub fn chi(w: &Worldline, q: QubitParams, reg: RegularizationParams, spec: &GridSpec) -> Result<(Vec<f64>, u64)> {
    if q.delta != 0.0 {
        return Err(Error::invalid("delta", "the exact dephasing channel needs delta = 0"));
    }
    let integral = cumulative_square_integral(&WightmanKernel::new(w, reg), spec)?;
    let c2 = q.coupling_c * q.coupling_c;
    let chi: Vec<f64> = integral.real_parts()?.into_iter().map(|i| -2.0 * c2 * i).collect();
    if let Some((t, x)) = spec.t_grid.iter().zip(&chi).find(|(_, x)| **x > CHI_POSITIVITY_TOLERANCE) {
        return Err(Error::Consistency(format!("chi = {x:e} > 0 at T = {t}: Wightman kernel lost positivity")));
    }
    Ok((chi, integral.kernel_evals))
}

/// `s = (1 + exp(chi)) / 2`.
pub fn survival_dephasing(chi: &[f64]) -> Result<Vec<f64>> {
    chi.iter()
        .map(|&x| {
            if x > CHI_POSITIVITY_TOLERANCE || x.is_nan() {
                Err(Error::Domain(format!("chi must be non-positive, got {x:e}")))
            } else {
                Ok(0.5 * (1.0 + x.min(0.0).exp()))
            }
        })
        .collect()
}

/// [`chi`] and the derived survival and coherence on one grid.
pub fn dephase(w: &Worldline, q: QubitParams, reg: RegularizationParams, spec: &GridSpec) -> Result<DephasingResult> {
    let (chi, kernel_evals) = chi(w, q, reg, spec)?;
    let survival = survival_dephasing(&chi)?;
    let coherence_magnitude = chi.iter().map(|x| x.min(0.0).exp()).collect();
    Ok(DephasingResult { tau_grid: spec.t_grid.clone(), chi, survival, coherence_magnitude, kernel_evals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{chi_stationary_analytic, map_params, OhmicParams};
    use approx::assert_relative_eq;
    use nalgebra::{Matrix2, Vector2};
    use num_complex::Complex64;

    fn stationary_setup() -> (OhmicParams, QubitParams, RegularizationParams) {
        let p = OhmicParams::new(0.01, 10.0).unwrap();
        let (reg, c) = map_params(p);
        (p, QubitParams::new(2.0, 0.0, c).unwrap(), reg)
    }

    #[test]
    fn stationary_chi_matches_closed_form() {
        let (p, q, reg) = stationary_setup();
        let grid = crate::linspace(0.01, 3.0, 50);
        let (chi, _) = chi(&Worldline::stationary(), q, reg, &GridSpec::new(grid.clone(), reg.epsilon)).unwrap();
        for (t, x) in grid.iter().zip(&chi) {
            assert_relative_eq!(*x, chi_stationary_analytic(p, *t), max_relative = 1e-6);
        }
    }

    #[test]
    fn benchmark_point() {
        let (_, q, reg) = stationary_setup();
        let out = dephase(&Worldline::stationary(), q, reg, &GridSpec::new(vec![1.0], reg.epsilon)).unwrap();
        assert_relative_eq!(out.chi[0], -0.02 * 101f64.ln(), max_relative = 1e-6);
        assert_relative_eq!(out.survival[0], 0.955_914_680_611_159, max_relative = 1e-6);
        assert_relative_eq!(out.coherence_magnitude[0], out.chi[0].exp(), max_relative = 1e-15);
    }

    #[test]
    fn survival_limits() {
        assert_eq!(survival_dephasing(&[0.0]).unwrap(), vec![1.0]);
        assert_relative_eq!(survival_dephasing(&[-800.0]).unwrap()[0], 0.5);
        assert!(matches!(survival_dephasing(&[1e-3]), Err(Error::Domain(_))));
    }

    #[test]
    fn survival_matches_density_matrix_trace() {
        // rho(t) with decayed coherence, against the freely rotated |+> projector
        let omega0: f64 = 2.0;
        for (chi, tau) in [(-0.092_302_f64, 1.0), (-0.7, 0.37), (0.0, 2.2)] {
            let phase = Complex64::from_polar(1.0, -2.0 * omega0 * tau);
            let coherence = 0.5 * chi.exp() * phase;
            let rho = Matrix2::new(Complex64::new(0.5, 0.0), coherence, coherence.conj(), Complex64::new(0.5, 0.0));
            let free = Vector2::new(Complex64::new(1.0, 0.0), phase.conj()) / Complex64::new(2f64.sqrt(), 0.0);
            let projector = free * free.adjoint();
            let trace = (rho * projector).trace();
            assert!(trace.im.abs() < 1e-15);
            assert_relative_eq!(trace.re, survival_dephasing(&[chi]).unwrap()[0], max_relative = 1e-14);
        }
    }

    #[test]
    fn chi_scales_as_coupling_squared() {
        let (_, q, reg) = stationary_setup();
        let w = Worldline::uniform_acceleration(10.0).unwrap();
        let spec = GridSpec::new(vec![0.5, 1.0], reg.epsilon);
        let (base, _) = chi(&w, q, reg, &spec).unwrap();
        let doubled = QubitParams { coupling_c: 2.0 * q.coupling_c, ..q };
        let (four, _) = chi(&w, doubled, reg, &spec).unwrap();
        for (a, b) in base.iter().zip(&four) {
            assert_relative_eq!(*b, 4.0 * a, max_relative = 1e-15);
        }
    }

    #[test]
    fn rejects_tunnelling_term() {
        let (_, q, reg) = stationary_setup();
        let q = QubitParams { delta: 0.5, ..q };
        let err = chi(&Worldline::stationary(), q, reg, &GridSpec::new(vec![1.0], reg.epsilon)).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "delta", .. }));
    }
}
