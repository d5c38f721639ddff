//! Decoherence and effective decay rates of a qubit carried along an arbitrary
//! relativistic worldline while coupled to a massless scalar field in the
//! Minkowski vacuum.
//!
//! The pieces, bottom up:
//!
//! * [`worldline`]: trajectories, four-velocities and proper-time maps.
//! * [`wightman`]: the Lorentz-invariant regularized vacuum two-point function.
//! * [`quad`]: cumulative Gauss-Legendre integration of Hermitian kernels over
//!   growing squares `[0, T]^2`.
//! * [`dephasing`]: the exact solution of the sigma_z (pure dephasing) channel.
//! * [`udw`]: second-order survival probability for arbitrary Pauli couplings.
//! * [`zeno`]: decay-rate curves, Zeno/anti-Zeno segmentation.
//! * [`spectral`]: ohmic bath mapping and independent closed-form / 1-D oracles.
//!
//! Natural units throughout: energies in eV, times and lengths in 1/eV.

// `!(x > 0.0)` also rejects NaN, which is the point of writing it that way
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dephasing;
pub mod error;
pub mod quad;
pub mod spectral;
pub mod udw;
pub mod wightman;
pub mod worldline;
pub mod zeno;

pub use dephasing::{DephasingResult, QubitParams};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use quad::{CumulativeIntegral, GridSpec, HermitianKernel};
pub use spectral::OhmicParams;
pub use udw::{Channel, ChannelSpec, PerturbativeResult};
pub use wightman::{ComplexFourVector, RegularizationParams};
pub use worldline::{FourVector, ProperTimeMap, Worldline};
pub use zeno::{DecayCurve, Regime, RegimeSegmentation};

/// `linspace(a, b, n)` with both endpoints included.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { end } else { start + step * i as f64 }).collect()
        }
    }
}
