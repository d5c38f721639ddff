//! Lorentz-invariant regularized Wightman function of the massless scalar
//! field along a worldline:
//!
//! ```text
//! W(tau1, tau2) = -1 / (4 pi^2 s.s),   s = X(tau1) - X(tau2) - i eps (u(tau1) + u(tau2))
//! ```
//!
//! On the stationary worldline this is `-1 / (4 pi^2 (dtau - 2 i eps)^2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::HermitianKernel;
use crate::worldline::{Worldline, WorldlinePoint};

/// Below this magnitude `s.s` is treated as a collision of the regulated events.
pub const DEGENERATE_INTERVAL: f64 = 1e-30;

/// Detector size `epsilon` (1/eV).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizationParams {
    pub epsilon: f64,
}

impl RegularizationParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon > 0.0 {
            Ok(RegularizationParams { epsilon })
        } else {
            Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")))
        }
    }
}

/// Four complex components `(t, x, y, z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexFourVector {
    pub t: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl ComplexFourVector {
    pub fn new(t: Complex64, x: Complex64, y: Complex64, z: Complex64) -> Self {
        ComplexFourVector { t, x, y, z }
    }

    /// `t^2 - x^2 - y^2 - z^2` in complex arithmetic (no conjugation).
    pub fn minkowski_square(&self) -> Complex64 {
        self.t * self.t - self.x * self.x - self.y * self.y - self.z * self.z
    }
}

pub fn minkowski_square(q: &ComplexFourVector) -> Complex64 {
    q.minkowski_square()
}

/// Regulated separation `s` in light-cone components `(plus, minus, y, z)`.
fn separation_light_cone(a: &WorldlinePoint, b: &WorldlinePoint, epsilon: f64) -> [Complex64; 4] {
    let c = |dx: f64, ua: f64, ub: f64| Complex64::new(dx, -epsilon * (ua + ub));
    [
        c(a.position.plus - b.position.plus, a.velocity.plus, b.velocity.plus),
        c(a.position.minus - b.position.minus, a.velocity.minus, b.velocity.minus),
        c(a.position.y - b.position.y, a.velocity.y, b.velocity.y),
        c(a.position.z - b.position.z, a.velocity.z, b.velocity.z),
    ]
}

/// The regulated separation as a Cartesian complex four-vector.
pub fn separation(a: &WorldlinePoint, b: &WorldlinePoint, reg: RegularizationParams) -> ComplexFourVector {
    let [plus, minus, y, z] = separation_light_cone(a, b, reg.epsilon);
    ComplexFourVector::new(0.5 * (plus + minus), 0.5 * (plus - minus), y, z)
}

/// `W` between two precomputed worldline points.
pub fn wightman_points(a: &WorldlinePoint, b: &WorldlinePoint, reg: RegularizationParams) -> Result<Complex64> {
    let [plus, minus, y, z] = separation_light_cone(a, b, reg.epsilon);
    // plus * minus avoids the t^2 - x^2 cancellation for highly boosted events
    let square = plus * minus - y * y - z * z;
    let magnitude = square.norm();
    if !(magnitude >= DEGENERATE_INTERVAL) {
        return Err(Error::DegenerateKernel { tau1: a.tau, tau2: b.tau, magnitude });
    }
    Ok(-1.0 / (4.0 * PI * PI * square))
}

/// `W_eps(tau1, tau2)` along `w`.
pub fn wightman(w: &Worldline, tau1: f64, tau2: f64, reg: RegularizationParams) -> Result<Complex64> {
    wightman_points(&w.point(tau1)?, &w.point(tau2)?, reg)
}

/// The Wightman function as a Hermitian kernel for the quadrature engine.
#[derive(Clone, Copy, Debug)]
pub struct WightmanKernel<'a> {
    pub worldline: &'a Worldline,
    pub reg: RegularizationParams,
}

impl<'a> WightmanKernel<'a> {
    pub fn new(worldline: &'a Worldline, reg: RegularizationParams) -> Self {
        WightmanKernel { worldline, reg }
    }
}

impl HermitianKernel for WightmanKernel<'_> {
    type Point = WorldlinePoint;

    fn point(&self, tau: f64) -> Result<WorldlinePoint> {
        self.worldline.point(tau)
    }

    fn eval(&self, a: &WorldlinePoint, b: &WorldlinePoint) -> Result<Complex64> {
        wightman_points(a, b, self.reg)
    }
}
