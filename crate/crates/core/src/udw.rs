//! Second-order survival probability for a qubit coupled through a Pauli
//! operator, with arbitrary `H = omega0 sigma_z + delta sigma_x`.
//!
//! With `F(tau) = c exp(i H tau) sigma exp(-i H tau)` and `P` the projector
//! orthogonal to the pure initial state `rho0`,
//!
//! ```text
//! s(T) = 1 - 2 Re ∫_0^T da ∫_0^a db W(a, b) Tr{P [F(b) rho0, F(a)]}
//! ```
//!
//! The integrand is Hermitian under `a <-> b`, so twice the real part of the
//! triangle equals the full square, which is what the engine computes.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dephasing::QubitParams;
use crate::error::{Error, Result};
use crate::quad::{cumulative_square_integral, GridSpec, HermitianKernel};
use crate::wightman::{wightman_points, RegularizationParams};
use crate::worldline::{Worldline, WorldlinePoint};
use crate::zeno::DecayCurve;

/// Points with `1 - s` above this are flagged as outside perturbative control.
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.1;

pub type Matrix = Matrix2<Complex64>;

/// The Pauli operator coupling the qubit to the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    SigmaX,
    SigmaZ,
}

impl Channel {
    pub fn pauli(self) -> Matrix {
        let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        match self {
            Channel::SigmaX => Matrix::new(o, l, l, o),
            Channel::SigmaZ => Matrix::new(l, o, o, -l),
        }
    }

    /// `|up><up|` for `sigma_x`, `|+><+|` for `sigma_z`.
    pub fn default_state(self) -> Matrix {
        let (o, l, h) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0));
        match self {
            Channel::SigmaX => Matrix::new(l, o, o, o),
            Channel::SigmaZ => Matrix::new(h, h, h, h),
        }
    }
}

/// Coupling operator and pure initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    coupling_operator: Channel,
    initial_state: Matrix,
}

impl ChannelSpec {
    pub fn new(channel: Channel) -> Self {
        ChannelSpec { coupling_operator: channel, initial_state: channel.default_state() }
    }

    /// Requires `rho` Hermitian, unit trace, positive and pure to `1e-10`.
    pub fn with_state(channel: Channel, rho: Matrix) -> Result<Self> {
        let tol = 1e-10;
        if (rho - rho.adjoint()).norm() > tol {
            return Err(Error::invalid("initial_state", "not Hermitian"));
        }
        if (rho.trace() - Complex64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::invalid("initial_state", "trace is not 1"));
        }
        // Hermitian with unit trace: positive and pure iff det = 0 and Tr rho^2 = 1
        if ((rho * rho).trace().re - 1.0).abs() > tol || rho.determinant().norm() > tol {
            return Err(Error::invalid("initial_state", "not a pure state"));
        }
        Ok(ChannelSpec { coupling_operator: channel, initial_state: rho })
    }

    pub fn channel(&self) -> Channel {
        self.coupling_operator
    }

    pub fn initial_state(&self) -> &Matrix {
        &self.initial_state
    }

    /// `1 - rho0`.
    pub fn orthogonal_projector(&self) -> Matrix {
        Matrix::identity() - self.initial_state
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeResult {
    pub tau_grid: Vec<f64>,
    pub survival: Vec<f64>,
    pub valid: Vec<bool>,
    pub validity_threshold: f64,
    pub kernel_evals: u64,
}

impl PerturbativeResult {
    /// Re-flags every point against a new `1 - s` threshold.
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.valid = self.survival.iter().map(|s| 1.0 - s <= threshold).collect();
        self.validity_threshold = threshold;
        self
    }
}

/// `exp(-i H tau)` for `H = omega0 sigma_z + delta sigma_x`.
fn propagator(q: QubitParams, tau: f64) -> Matrix {
    let norm = q.omega0.hypot(q.delta);
    let (s, c) = (norm * tau).sin_cos();
    // sin(|h| tau) / |h|, finite as |h| -> 0
    let k = if norm * tau.abs() < 1e-8 { tau } else { s / norm };
    let i = Complex64::new(0.0, 1.0);
    let h = Matrix::new(
        Complex64::new(q.omega0, 0.0),
        Complex64::new(q.delta, 0.0),
        Complex64::new(q.delta, 0.0),
        Complex64::new(-q.omega0, 0.0),
    );
    Matrix::identity() * Complex64::new(c, 0.0) - h * (i * k)
}

/// `c exp(i H tau) sigma exp(-i H tau)`.
pub fn interaction_picture_coupling(q: QubitParams, ch: &ChannelSpec, tau: f64) -> Matrix {
    let u = propagator(q, tau);
    u.adjoint() * ch.channel().pauli() * u * Complex64::new(q.coupling_c, 0.0)
}

/// `Tr{P [F(b) rho0, F(a)]}` from the operators at the two times.
pub fn trace_factor(ch: &ChannelSpec, f_a: &Matrix, f_b: &Matrix) -> Complex64 {
    let rho = ch.initial_state();
    let commutator = f_b * rho * f_a - f_a * (f_b * rho);
    (ch.orthogonal_projector() * commutator).trace()
}

/// `W(a, b) Tr{P [F(b) rho0, F(a)]}` along a worldline.
pub struct ChannelKernel<'a> {
    worldline: &'a Worldline,
    qubit: QubitParams,
    channel: &'a ChannelSpec,
    reg: RegularizationParams,
}

impl<'a> ChannelKernel<'a> {
    pub fn new(
        worldline: &'a Worldline,
        qubit: QubitParams,
        channel: &'a ChannelSpec,
        reg: RegularizationParams,
    ) -> Self {
        ChannelKernel { worldline, qubit, channel, reg }
    }
}

impl HermitianKernel for ChannelKernel<'_> {
    type Point = (WorldlinePoint, Matrix);

    fn point(&self, tau: f64) -> Result<Self::Point> {
        Ok((self.worldline.point(tau)?, interaction_picture_coupling(self.qubit, self.channel, tau)))
    }

    fn eval(&self, a: &Self::Point, b: &Self::Point) -> Result<Complex64> {
        Ok(wightman_points(&a.0, &b.0, self.reg)? * trace_factor(self.channel, &a.1, &b.1))
    }
}

/// Second-order survival on the proper-time grid of `spec`.
pub fn survival_perturbative(
    w: &Worldline,
    q: QubitParams,
    ch: &ChannelSpec,
    reg: RegularizationParams,
    spec: &GridSpec,
) -> Result<PerturbativeResult> {
    let integral = cumulative_square_integral(&ChannelKernel::new(w, q, ch, reg), spec)?;
    let survival = integral.real_parts()?.into_iter().map(|i| 1.0 - i).collect();
    Ok(PerturbativeResult {
        tau_grid: spec.t_grid.clone(),
        survival,
        valid: Vec::new(),
        validity_threshold: DEFAULT_VALIDITY_THRESHOLD,
        kernel_evals: integral.kernel_evals,
    }
    .with_threshold(DEFAULT_VALIDITY_THRESHOLD))
}

/// `Gamma(tau) = -ln s(tau) / tau`.
pub fn decay_rate(tau_grid: &[f64], survival: &[f64]) -> Result<DecayCurve> {
    if tau_grid.len() != survival.len() {
        return Err(Error::invalid("survival", "length differs from the grid"));
    }
    let gamma = tau_grid
        .iter()
        .zip(survival)
        .map(|(&tau, &s)| {
            if !(tau > 0.0) {
                Err(Error::Domain(format!("decay rate needs tau > 0, got {tau}")))
            } else if !(s > 0.0) {
                Err(Error::Domain(format!(
                    "survival {s} at tau = {tau} is not positive; perturbation theory has broken down"
                )))
            } else {
                Ok(-s.ln() / tau)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    DecayCurve::new(tau_grid.to_vec(), gamma)
}
