use crate::error::{Error, Result};

use super::Worldline;

/// Default node count of tabulated proper-time maps.
pub const DEFAULT_MAP_NODES: usize = 4096;

/// Monotone map between coordinate time `t` and proper time `tau` on
/// `[t_start, t_end]`, with `tau(t_start) = 0`.
#[derive(Clone, Debug)]
pub struct ProperTimeMap {
    t_start: f64,
    t_end: f64,
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Identity,
    Rindler { acceleration: f64 },
    Table(Table),
}

/// Uniform nodes in `t` with proper time and `dtau/dt` at every node;
/// piecewise cubic Hermite between nodes.
#[derive(Clone, Debug)]
struct Table {
    step: f64,
    tau: Vec<f64>,
    rate: Vec<f64>,
}

fn hermite(s: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1
}

fn hermite_slope(s: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let s2 = s * s;
    ((6.0 * s2 - 6.0 * s) * y0
        + (3.0 * s2 - 4.0 * s + 1.0) * h * d0
        + (-6.0 * s2 + 6.0 * s) * y1
        + (3.0 * s2 - 2.0 * s) * h * d1)
        / h
}

impl Table {
    fn segment(&self, offset: f64) -> (usize, f64) {
        let last = self.tau.len() - 2;
        let k = ((offset / self.step).floor().max(0.0) as usize).min(last);
        (k, offset / self.step - k as f64)
    }

    fn forward(&self, offset: f64) -> f64 {
        let (k, s) = self.segment(offset);
        hermite(s, self.step, self.tau[k], self.tau[k + 1], self.rate[k], self.rate[k + 1])
    }

    fn slope(&self, offset: f64) -> f64 {
        let (k, s) = self.segment(offset);
        hermite_slope(s, self.step, self.tau[k], self.tau[k + 1], self.rate[k], self.rate[k + 1])
    }

    /// Offset `t - t_start` at which the forward map reaches `tau`.
    fn inverse(&self, tau: f64) -> f64 {
        let n = self.tau.len();
        let k = self.tau.partition_point(|&v| v <= tau).clamp(1, n - 1) - 1;
        let (lo, hi) = (k as f64 * self.step, (k + 1) as f64 * self.step);
        let dtau = self.tau[k + 1] - self.tau[k];
        // inverse Hermite guess: nodes tau_k, values t_k, slopes 1/rate
        let s = ((tau - self.tau[k]) / dtau).clamp(0.0, 1.0);
        let mut t = hermite(s, dtau, lo, hi, 1.0 / self.rate[k], 1.0 / self.rate[k + 1]).clamp(lo, hi);
        for _ in 0..6 {
            let f = self.forward(t) - tau;
            let next = (t - f / self.slope(t)).clamp(lo, hi);
            let done = (next - t).abs() <= 1e-16 * hi.max(1.0);
            t = next;
            if done {
                break;
            }
        }
        t
    }
}

impl ProperTimeMap {
    /// Integrates `dtau/dt = rate(t)` with fixed-step RK4 over `n_nodes` nodes.
    pub fn tabulate<F>(t_start: f64, t_end: f64, n_nodes: usize, rate: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::invalid("t_max", format!("empty interval [{t_start}, {t_end}]")));
        }
        if n_nodes < 16 {
            return Err(Error::invalid("n_nodes", format!("need at least 16, got {n_nodes}")));
        }
        let step = (t_end - t_start) / (n_nodes - 1) as f64;
        let mut tau = Vec::with_capacity(n_nodes);
        let mut rates = Vec::with_capacity(n_nodes);
        let mut acc = 0.0;
        let mut r0 = rate(t_start)?;
        tau.push(0.0);
        rates.push(r0);
        for i in 1..n_nodes {
            let t0 = t_start + (i - 1) as f64 * step;
            let t1 = if i == n_nodes - 1 { t_end } else { t_start + i as f64 * step };
            let mid = rate(0.5 * (t0 + t1))?;
            let r1 = rate(t1)?;
            // RK4 with a right-hand side independent of tau
            acc += (t1 - t0) / 6.0 * (r0 + 4.0 * mid + r1);
            tau.push(acc);
            rates.push(r1);
            r0 = r1;
        }
        Ok(ProperTimeMap { t_start, t_end, repr: Repr::Table(Table { step, tau, rate: rates }) })
    }

    /// Proper-time map of `w` over coordinate times `[0, t_max]`; for sampled
    /// worldlines the interval starts at the first row.
    ///
    /// Stationary and uniformly accelerated worldlines get their exact maps.
    pub fn build(w: &Worldline, t_max: f64, n_nodes: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::invalid("t_max", format!("must be positive, got {t_max}")));
        }
        if n_nodes < 16 {
            return Err(Error::invalid("n_nodes", format!("need at least 16, got {n_nodes}")));
        }
        match w {
            Worldline::Stationary => Ok(ProperTimeMap { t_start: 0.0, t_end: t_max, repr: Repr::Identity }),
            Worldline::UniformAcceleration { acceleration } => {
                Ok(ProperTimeMap { t_start: 0.0, t_end: t_max, repr: Repr::Rindler { acceleration: *acceleration } })
            }
            Worldline::Sampled(s) => {
                let t0 = s.t_start();
                if t0 + t_max > s.t_end() * (1.0 + 1e-12) {
                    return Err(Error::invalid(
                        "t_max",
                        format!("table covers only {} in coordinate time", s.t_end() - t0),
                    ));
                }
                Self::tabulate(t0, (t0 + t_max).min(s.t_end()), n_nodes, |t| speed_rate(w, t))
            }
            _ => Self::tabulate(0.0, t_max, n_nodes, |t| speed_rate(w, t)),
        }
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn tau_max(&self) -> f64 {
        match &self.repr {
            Repr::Identity => self.t_end - self.t_start,
            Repr::Rindler { acceleration: a } => (a * self.t_end).asinh() / a,
            Repr::Table(table) => *table.tau.last().unwrap_or(&0.0),
        }
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * (self.t_end - self.t_start).max(1.0);
        if t.is_finite() && t >= self.t_start - slack && t <= self.t_end + slack {
            Ok(())
        } else {
            Err(Error::OutOfRange { tau: t, min: self.t_start, max: self.t_end })
        }
    }

    /// Forward map `tau(t)`.
    pub fn proper_time(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(match &self.repr {
            Repr::Identity => t - self.t_start,
            Repr::Rindler { acceleration: a } => (a * t).asinh() / a,
            Repr::Table(table) => table.forward(t - self.t_start),
        })
    }

    /// Inverse map `t(tau)`.
    pub fn coordinate_time(&self, tau: f64) -> Result<f64> {
        let max = self.tau_max();
        let slack = 1e-12 * max.max(1.0);
        if !tau.is_finite() || tau < -slack || tau > max + slack {
            return Err(Error::OutOfRange { tau, min: 0.0, max });
        }
        Ok(match &self.repr {
            Repr::Identity => self.t_start + tau,
            Repr::Rindler { acceleration: a } => (a * tau).sinh() / a,
            Repr::Table(table) => self.t_start + table.inverse(tau.clamp(0.0, max)),
        })
    }

    /// `dtau/dt` at coordinate time `t`; lies in `(0, 1]`.
    pub fn rate(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(match &self.repr {
            Repr::Identity => 1.0,
            Repr::Rindler { acceleration: a } => 1.0 / (1.0 + a * a * t * t).sqrt(),
            Repr::Table(table) => table.slope(t - self.t_start),
        })
    }
}

fn speed_rate(w: &Worldline, t: f64) -> Result<f64> {
    let v = w.coordinate_velocity(t)?;
    let speed2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if !(speed2 < 1.0) {
        return Err(Error::Superluminal { t, speed: speed2.sqrt() });
    }
    Ok((1.0 - speed2).sqrt())
}
