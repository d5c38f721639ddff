//! Benchmark fixtures shared by the criterion targets.

use zenoline_core::spectral::{map_params, OhmicParams};
use zenoline_core::{linspace, GridSpec, QubitParams, RegularizationParams};

/// Coupling, regularization and grid of the stationary ohmic benchmark
/// (`G = 0.01`, `omega_c = 10`, `omega0 = 2`) with `n` output times up to `t_max`.
pub fn benchmark_setup(t_max: f64, n: usize) -> (QubitParams, RegularizationParams, GridSpec) {
    let p = OhmicParams::new(0.01, 10.0).expect("fixed parameters are valid");
    let (reg, c) = map_params(p);
    let q = QubitParams::new(2.0, 0.0, c).expect("fixed parameters are valid");
    (q, reg, GridSpec::new(linspace(t_max / n as f64, t_max, n), reg.epsilon))
}
