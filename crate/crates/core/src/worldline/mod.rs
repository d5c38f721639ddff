//! Timelike trajectories through Minkowski space, their four-velocities and
//! the map between coordinate time and proper time.
//!
//! Signature is (+,-,-,-) and every worldline starts at proper time zero.
//! Oscillating and circular motion are defined natively in coordinate time;
//! their proper-time parametrization goes through a [`ProperTimeMap`].

mod proper_time;
mod sampled;

use std::f64::consts::PI;
use std::fmt;
use std::io::Read;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use proper_time::{ProperTimeMap, DEFAULT_MAP_NODES};
pub use sampled::Sampled;

/// An event or tangent vector `(t, x, y, z)` in natural units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector { t, x, y, z }
    }

    /// Minkowski inner product with signature (+,-,-,-).
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z
    }

    pub fn minkowski_square(&self) -> f64 {
        self.dot(self)
    }

    /// Applies a pure boost with velocity `beta` along x.
    pub fn boost_x(&self, beta: f64) -> FourVector {
        let gamma = 1.0 / (1.0 - beta * beta).sqrt();
        FourVector { t: gamma * (self.t - beta * self.x), x: gamma * (self.x - beta * self.t), y: self.y, z: self.z }
    }

    pub fn to_light_cone(&self) -> LightCone {
        LightCone { plus: self.t + self.x, minus: self.t - self.x, y: self.y, z: self.z }
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector::new(self.t + rhs.t, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector::new(self.t - rhs.t, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, rhs: f64) -> FourVector {
        FourVector::new(self.t * rhs, self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

/// Light-cone components along x: `plus = t + x`, `minus = t - x`.
///
/// Under boosts along x the two null components scale by `e^{±η}`, so products
/// `plus * minus` stay well conditioned even when `t` and `x` are huge and
/// nearly equal (the Rindler worldline far from `tau = 0`).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LightCone {
    pub plus: f64,
    pub minus: f64,
    pub y: f64,
    pub z: f64,
}

impl LightCone {
    pub fn to_four_vector(&self) -> FourVector {
        FourVector { t: 0.5 * (self.plus + self.minus), x: 0.5 * (self.plus - self.minus), y: self.y, z: self.z }
    }

    pub fn minkowski_square(&self) -> f64 {
        self.plus * self.minus - self.y * self.y - self.z * self.z
    }
}

/// Position and four-velocity at one proper time, in light-cone components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldlinePoint {
    pub tau: f64,
    pub position: LightCone,
    pub velocity: LightCone,
}

/// The trajectory families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Stationary,
    UniformAcceleration,
    Oscillating,
    Circular,
    Sampled,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Stationary => "stationary",
            Family::UniformAcceleration => "uniform_acceleration",
            Family::Oscillating => "oscillating",
            Family::Circular => "circular",
            Family::Sampled => "sampled",
        };
        f.write_str(name)
    }
}

/// Linear oscillation `x = b sin((v/b) t)` with peak speed `v`.
#[derive(Clone, Debug)]
pub struct Oscillating {
    amplitude: f64,
    speed: f64,
    omega: f64,
    /// Proper time over one period of |cos(omega t)|, i.e. `t in [0, pi/omega]`.
    half_period: ProperTimeMap,
}

impl Oscillating {
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Angular frequency `v / b` in coordinate time.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Proper time elapsed during half an oscillation (`t = pi / omega`).
    pub fn half_period_proper_time(&self) -> f64 {
        self.half_period.tau_max()
    }

    fn coordinate_time(&self, tau: f64) -> f64 {
        let tau_half = self.half_period.tau_max();
        let t_half = PI / self.omega;
        let n = (tau / tau_half).floor();
        let rem = (tau - n * tau_half).clamp(0.0, tau_half);
        // Inside one table the inverse cannot fail once clamped.
        let t_rem = self.half_period.coordinate_time(rem).unwrap_or(0.0);
        n * t_half + t_rem
    }
}

/// A timelike trajectory `X^mu(tau)` with `tau = 0` at its first event.
#[derive(Clone, Debug)]
pub enum Worldline {
    Stationary,
    UniformAcceleration { acceleration: f64 },
    Oscillating(Oscillating),
    Circular { radius: f64, speed: f64 },
    Sampled(Box<Sampled>),
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {value}")))
    }
}

fn check_speed(speed: f64) -> Result<()> {
    if speed.is_finite() && speed > 0.0 && speed < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("speed", format!("must lie in (0, 1), got {speed}")))
    }
}

impl Worldline {
    pub fn stationary() -> Self {
        Worldline::Stationary
    }

    /// Rindler trajectory with proper acceleration `a` (eV).
    pub fn uniform_acceleration(acceleration: f64) -> Result<Self> {
        check_positive("acceleration", acceleration)?;
        Ok(Worldline::UniformAcceleration { acceleration })
    }

    /// Oscillation of amplitude `b` (1/eV) and peak speed `v`.
    pub fn oscillating(amplitude: f64, speed: f64) -> Result<Self> {
        check_positive("amplitude", amplitude)?;
        check_speed(speed)?;
        let omega = speed / amplitude;
        let rate = move |t: f64| {
            let v = speed * (omega * t).cos();
            (1.0 - v * v).sqrt()
        };
        let half_period = ProperTimeMap::tabulate(0.0, PI / omega, DEFAULT_MAP_NODES, |t| Ok(rate(t)))?;
        Ok(Worldline::Oscillating(Oscillating { amplitude, speed, omega, half_period }))
    }

    /// Oscillation specified by its angular frequency `omega = v / b`.
    pub fn oscillating_with_frequency(omega: f64, speed: f64) -> Result<Self> {
        check_positive("omega", omega)?;
        check_speed(speed)?;
        Self::oscillating(speed / omega, speed)
    }

    /// Circular orbit of radius `b` at speed `v`.
    pub fn circular(radius: f64, speed: f64) -> Result<Self> {
        check_positive("radius", radius)?;
        check_speed(speed)?;
        Ok(Worldline::Circular { radius, speed })
    }

    pub fn circular_with_frequency(omega: f64, speed: f64) -> Result<Self> {
        check_positive("omega", omega)?;
        check_speed(speed)?;
        Self::circular(speed / omega, speed)
    }

    /// Reads a `t,x,y,z` CSV table; see [`Sampled`].
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        Ok(Worldline::Sampled(Box::new(Sampled::from_csv(reader)?)))
    }

    pub fn family(&self) -> Family {
        match self {
            Worldline::Stationary => Family::Stationary,
            Worldline::UniformAcceleration { .. } => Family::UniformAcceleration,
            Worldline::Oscillating(_) => Family::Oscillating,
            Worldline::Circular { .. } => Family::Circular,
            Worldline::Sampled(_) => Family::Sampled,
        }
    }

    /// Largest proper time at which the worldline is defined.
    pub fn tau_max(&self) -> f64 {
        match self {
            Worldline::Sampled(s) => s.tau_max(),
            _ => f64::INFINITY,
        }
    }

    /// Shortest proper-time scale on which the kinematics change; used to
    /// size quadrature panels.
    pub fn proper_time_scale(&self) -> f64 {
        match self {
            Worldline::Stationary => f64::INFINITY,
            Worldline::UniformAcceleration { acceleration } => 1.0 / acceleration,
            Worldline::Oscillating(osc) => {
                let gamma = 1.0 / (1.0 - osc.speed * osc.speed).sqrt();
                1.0 / (gamma * osc.omega)
            }
            Worldline::Circular { radius, speed } => {
                let gamma = 1.0 / (1.0 - speed * speed).sqrt();
                radius / (gamma * speed)
            }
            Worldline::Sampled(s) => s.proper_time_scale(),
        }
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        let max = self.tau_max();
        let slack = if max.is_finite() { 1e-12 * max.max(1.0) } else { 0.0 };
        if tau.is_finite() && tau >= 0.0 && tau <= max + slack {
            Ok(())
        } else {
            Err(Error::OutOfRange { tau, min: 0.0, max })
        }
    }

    /// Coordinate time `t(tau)`.
    pub fn coordinate_time(&self, tau: f64) -> Result<f64> {
        self.check_tau(tau)?;
        Ok(match self {
            Worldline::Stationary => tau,
            Worldline::UniformAcceleration { acceleration: a } => (a * tau).sinh() / a,
            Worldline::Oscillating(osc) => osc.coordinate_time(tau),
            Worldline::Circular { speed, .. } => tau / (1.0 - speed * speed).sqrt(),
            Worldline::Sampled(s) => s.coordinate_time(tau.min(s.tau_max()))?,
        })
    }

    /// Coordinate three-velocity `dx/dt` at coordinate time `t`.
    pub fn coordinate_velocity(&self, t: f64) -> Result<[f64; 3]> {
        Ok(match self {
            Worldline::Stationary => [0.0; 3],
            Worldline::UniformAcceleration { acceleration: a } => [a * t / (1.0 + a * a * t * t).sqrt(), 0.0, 0.0],
            Worldline::Oscillating(osc) => [osc.speed * (osc.omega * t).cos(), 0.0, 0.0],
            Worldline::Circular { radius, speed } => {
                let phase = speed / radius * t;
                [speed * phase.cos(), -speed * phase.sin(), 0.0]
            }
            Worldline::Sampled(s) => s.velocity_at(t)?,
        })
    }

    /// Event `X^mu(tau)`.
    pub fn position(&self, tau: f64) -> Result<FourVector> {
        self.check_tau(tau)?;
        Ok(match self {
            Worldline::Stationary => FourVector::new(tau, 0.0, 0.0, 0.0),
            Worldline::UniformAcceleration { acceleration: a } => {
                FourVector::new((a * tau).sinh() / a, (a * tau).cosh() / a, 0.0, 0.0)
            }
            Worldline::Oscillating(osc) => {
                let t = osc.coordinate_time(tau);
                FourVector::new(t, osc.amplitude * (osc.omega * t).sin(), 0.0, 0.0)
            }
            Worldline::Circular { radius, speed } => {
                let t = tau / (1.0 - speed * speed).sqrt();
                let phase = speed / radius * t;
                FourVector::new(t, radius * phase.sin(), radius * phase.cos(), 0.0)
            }
            Worldline::Sampled(s) => s.position_at(s.coordinate_time(tau.min(s.tau_max()))?)?,
        })
    }

    /// Four-velocity `u^mu = dX^mu / dtau`, normalized to `u.u = 1`.
    pub fn four_velocity(&self, tau: f64) -> Result<FourVector> {
        self.check_tau(tau)?;
        Ok(match self {
            Worldline::Stationary => FourVector::new(1.0, 0.0, 0.0, 0.0),
            Worldline::UniformAcceleration { acceleration: a } => {
                FourVector::new((a * tau).cosh(), (a * tau).sinh(), 0.0, 0.0)
            }
            _ => {
                let t = self.coordinate_time(tau)?;
                let v = self.coordinate_velocity(t)?;
                let gamma = 1.0 / (1.0 - (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])).sqrt();
                FourVector::new(gamma, gamma * v[0], gamma * v[1], gamma * v[2])
            }
        })
    }

    /// Position and four-velocity in light-cone form.
    pub fn point(&self, tau: f64) -> Result<WorldlinePoint> {
        match self {
            Worldline::UniformAcceleration { acceleration: a } => {
                self.check_tau(tau)?;
                let grow = (a * tau).exp();
                let shrink = (-a * tau).exp();
                Ok(WorldlinePoint {
                    tau,
                    position: LightCone { plus: grow / a, minus: -shrink / a, y: 0.0, z: 0.0 },
                    velocity: LightCone { plus: grow, minus: shrink, y: 0.0, z: 0.0 },
                })
            }
            _ => Ok(WorldlinePoint {
                tau,
                position: self.position(tau)?.to_light_cone(),
                velocity: self.four_velocity(tau)?.to_light_cone(),
            }),
        }
    }
}

/// Parses a sampled worldline; alias of [`Worldline::from_csv`].
pub fn load_sampled_worldline<R: Read>(reader: R) -> Result<Worldline> {
    Worldline::from_csv(reader)
}
