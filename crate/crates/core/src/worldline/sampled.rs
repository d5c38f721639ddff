use std::io::{BufRead, BufReader, Read};

use crate::error::{Error, Result};

use super::{FourVector, ProperTimeMap, DEFAULT_MAP_NODES};

/// A worldline given as a table of events `(t, x, y, z)`.
///
/// Spatial components are interpolated with piecewise cubic Hermite
/// polynomials in `t`; node slopes come from the derivative of the local
/// five-point Lagrange interpolant, which keeps the interpolant fourth-order
/// accurate up to the table ends. The four-velocity is rebuilt from the
/// interpolated coordinate velocity as `gamma (1, v)`, so `u.u = 1` holds
/// identically.
#[derive(Clone, Debug)]
pub struct Sampled {
    t: Vec<f64>,
    space: [Vec<f64>; 3],
    slope: [Vec<f64>; 3],
    map: ProperTimeMap,
}

/// Derivative at `nodes[i]` of the Lagrange polynomial through `window`.
fn lagrange_slope(t: &[f64], y: &[f64], i: usize) -> f64 {
    let n = t.len();
    let width = n.min(5);
    let start = i.saturating_sub(2).min(n - width);
    let idx = start..start + width;
    let ti = t[i];
    let mut total = 0.0;
    for j in idx.clone() {
        let weight = if j == i {
            idx.clone().filter(|&m| m != i).map(|m| 1.0 / (ti - t[m])).sum::<f64>()
        } else {
            let mut num = 1.0;
            let mut den = 1.0;
            for m in idx.clone() {
                if m != j {
                    den *= t[j] - t[m];
                    if m != i {
                        num *= ti - t[m];
                    }
                }
            }
            num / den
        };
        total += weight * y[j];
    }
    total
}

impl Sampled {
    /// Parses UTF-8 CSV with header `t,x,y,z`. Lines starting with `#` and
    /// blank lines are skipped. Row numbers in errors count data rows from 1.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rows = Vec::new();
        let mut header_seen = false;
        for line in BufReader::new(reader).lines() {
            let line = line.map_err(|e| Error::Io(e.to_string()))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if !header_seen {
                let fields: Vec<_> = trimmed.split(',').map(str::trim).collect();
                if fields != ["t", "x", "y", "z"] {
                    return Err(Error::MalformedRow {
                        row: 0,
                        reason: format!("expected header `t,x,y,z`, found `{trimmed}`"),
                    });
                }
                header_seen = true;
                continue;
            }
            let row = rows.len() + 1;
            let values: Vec<f64> = trimmed
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::MalformedRow { row, reason: e.to_string() })?;
            if values.len() != 4 {
                return Err(Error::MalformedRow { row, reason: format!("expected 4 fields, found {}", values.len()) });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::MalformedRow { row, reason: "non-finite value".into() });
            }
            rows.push(FourVector::new(values[0], values[1], values[2], values[3]));
        }
        Self::from_events(&rows)
    }

    /// Builds and validates a sampled worldline from events ordered in `t`.
    pub fn from_events(events: &[FourVector]) -> Result<Self> {
        if events.len() < 4 {
            return Err(Error::TooFewRows { rows: events.len() });
        }
        for (i, pair) in events.windows(2).enumerate() {
            if !(pair[1].t > pair[0].t) {
                return Err(Error::NonMonotone { row: i + 2 });
            }
            let d = pair[1] - pair[0];
            let speed = (d.x * d.x + d.y * d.y + d.z * d.z).sqrt() / d.t;
            if speed >= 1.0 {
                return Err(Error::SuperluminalSegment { segment: i + 1, speed });
            }
        }
        let t: Vec<f64> = events.iter().map(|e| e.t).collect();
        let space = [
            events.iter().map(|e| e.x).collect::<Vec<_>>(),
            events.iter().map(|e| e.y).collect::<Vec<_>>(),
            events.iter().map(|e| e.z).collect::<Vec<_>>(),
        ];
        let slope = [0, 1, 2].map(|c| (0..t.len()).map(|i| lagrange_slope(&t, &space[c], i)).collect::<Vec<_>>());
        for (i, ((sx, sy), sz)) in slope[0].iter().zip(&slope[1]).zip(&slope[2]).enumerate() {
            let speed = (sx * sx + sy * sy + sz * sz).sqrt();
            if speed >= 1.0 {
                return Err(Error::SuperluminalSegment { segment: i.max(1).min(t.len() - 1), speed });
            }
        }
        let mut sampled = Sampled { t, space, slope, map: ProperTimeMap::tabulate(0.0, 1.0, 16, |_| Ok(1.0))? };
        let n_nodes = DEFAULT_MAP_NODES.max(8 * sampled.t.len());
        let (t0, t1) = (sampled.t_start(), sampled.t_end());
        let map = ProperTimeMap::tabulate(t0, t1, n_nodes, |t| {
            let v = sampled.velocity_at(t)?;
            let speed2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            if speed2 >= 1.0 {
                let segment = sampled.segment(t).0 + 1;
                return Err(Error::SuperluminalSegment { segment, speed: speed2.sqrt() });
            }
            Ok((1.0 - speed2).sqrt())
        })?;
        sampled.map = map;
        Ok(sampled)
    }

    pub fn rows(&self) -> usize {
        self.t.len()
    }

    pub fn t_start(&self) -> f64 {
        self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    pub fn tau_max(&self) -> f64 {
        self.map.tau_max()
    }

    pub fn proper_time_map(&self) -> &ProperTimeMap {
        &self.map
    }

    /// Mean proper-time spacing between rows.
    pub(super) fn proper_time_scale(&self) -> f64 {
        self.tau_max() / (self.t.len() - 1) as f64
    }

    pub(super) fn coordinate_time(&self, tau: f64) -> Result<f64> {
        self.map.coordinate_time(tau)
    }

    fn segment(&self, t: f64) -> (usize, f64, f64) {
        let n = self.t.len();
        let k = self.t.partition_point(|&v| v <= t).clamp(1, n - 1) - 1;
        let h = self.t[k + 1] - self.t[k];
        (k, ((t - self.t[k]) / h).clamp(0.0, 1.0), h)
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * (self.t_end() - self.t_start()).max(1.0);
        if t.is_finite() && t >= self.t_start() - slack && t <= self.t_end() + slack {
            Ok(())
        } else {
            Err(Error::OutOfRange { tau: t, min: self.t_start(), max: self.t_end() })
        }
    }

    /// Interpolated event at coordinate time `t`.
    pub fn position_at(&self, t: f64) -> Result<FourVector> {
        self.check_t(t)?;
        let (k, s, h) = self.segment(t);
        let s2 = s * s;
        let s3 = s2 * s;
        let (h00, h10, h01, h11) = (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2);
        let c = |i: usize| {
            h00 * self.space[i][k]
                + h10 * h * self.slope[i][k]
                + h01 * self.space[i][k + 1]
                + h11 * h * self.slope[i][k + 1]
        };
        Ok(FourVector::new(t, c(0), c(1), c(2)))
    }

    /// Interpolated coordinate velocity `dx/dt` at coordinate time `t`.
    pub fn velocity_at(&self, t: f64) -> Result<[f64; 3]> {
        self.check_t(t)?;
        let (k, s, h) = self.segment(t);
        let s2 = s * s;
        let (d00, d10, d01, d11) =
            (6.0 * s2 - 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 2.0 * s);
        let c = |i: usize| {
            (d00 * self.space[i][k] + d01 * self.space[i][k + 1]) / h
                + d10 * self.slope[i][k]
                + d11 * self.slope[i][k + 1]
        };
        Ok([c(0), c(1), c(2)])
    }

    /// The same table seen from a frame boosted with velocity `beta` along x.
    pub fn boosted_x(&self, beta: f64) -> Result<Self> {
        let events: Vec<FourVector> = (0..self.t.len())
            .map(|i| FourVector::new(self.t[i], self.space[0][i], self.space[1][i], self.space[2][i]).boost_x(beta))
            .collect();
        Self::from_events(&events)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldline::Worldline;
    use approx::assert_relative_eq;

    fn csv(rows: &[(f64, f64, f64, f64)]) -> String {
        let mut out = String::from("# generated\nt,x,y,z\n");
        for r in rows {
            out.push_str(&format!("{},{},{},{}\n", r.0, r.1, r.2, r.3));
        }
        out
    }

    #[test]
    fn resting_table_behaves_as_stationary() {
        let text = csv(&[(0.0, 0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0), (2.0, 0.0, 0.0, 0.0), (3.0, 0.0, 0.0, 0.0)]);
        let w = Worldline::from_csv(text.as_bytes()).unwrap();
        assert_relative_eq!(w.tau_max(), 3.0, max_relative = 1e-14);
        for tau in [0.0, 0.5, 1.7, 3.0] {
            let x = w.position(tau).unwrap();
            assert_relative_eq!(x.t, tau, epsilon = 1e-13);
            assert_eq!((x.x, x.y, x.z), (0.0, 0.0, 0.0));
            assert_eq!(w.four_velocity(tau).unwrap(), FourVector::new(1.0, 0.0, 0.0, 0.0));
        }
        assert!(matches!(w.position(3.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn non_monotone_reports_row() {
        let text = csv(&[(0.0, 0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0), (2.0, 0.0, 0.0, 0.0)]);
        assert_eq!(Worldline::from_csv(text.as_bytes()).unwrap_err(), Error::NonMonotone { row: 3 });
    }

    #[test]
    fn malformed_and_short_tables() {
        let bad = "t,x,y,z\n0,0,0,0\n1,0,zero,0\n";
        assert!(matches!(Worldline::from_csv(bad.as_bytes()), Err(Error::MalformedRow { row: 2, .. })));
        let short = "t,x,y,z\n0,0,0,0\n1,0,0,0\n2,0,0,0\n";
        assert_eq!(Worldline::from_csv(short.as_bytes()).unwrap_err(), Error::TooFewRows { rows: 3 });
        let header = "time,x,y,z\n0,0,0,0\n";
        assert!(matches!(Worldline::from_csv(header.as_bytes()), Err(Error::MalformedRow { row: 0, .. })));
        let fields = "t,x,y,z\n0,0,0\n";
        assert!(matches!(Worldline::from_csv(fields.as_bytes()), Err(Error::MalformedRow { row: 1, .. })));
    }

    #[test]
    fn superluminal_segment_is_named() {
        let text = csv(&[(0.0, 0.0, 0.0, 0.0), (1.0, 0.5, 0.0, 0.0), (2.0, 2.0, 0.0, 0.0), (3.0, 2.5, 0.0, 0.0)]);
        match Worldline::from_csv(text.as_bytes()) {
            Err(Error::SuperluminalSegment { segment, .. }) => assert_eq!(segment, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lagrange_slope_is_exact_for_quartics() {
        let t = [0.0, 0.3, 0.7, 1.2, 1.3, 2.0];
        let y: Vec<f64> = t.iter().map(|x| x * x * x * x - 2.0 * x).collect();
        for i in 0..t.len() {
            let expected = 4.0 * t[i].powi(3) - 2.0;
            assert_relative_eq!(lagrange_slope(&t, &y, i), expected, epsilon = 1e-11);
        }
    }

    #[test]
    fn sampled_oscillation_matches_analytic_family() {
        let (b, v) = (0.5, 0.99);
        let omega = v / b;
        let n = 1000;
        let t_end = 5.0;
        let mut text = String::from("t,x,y,z\n");
        for i in 0..n {
            let t = t_end * i as f64 / (n - 1) as f64;
            text.push_str(&format!("{:.17e},{:.17e},0,0\n", t, b * (omega * t).sin()));
        }
        let sampled = Worldline::from_csv(text.as_bytes()).unwrap();
        let analytic = Worldline::oscillating(b, v).unwrap();
        let Worldline::Sampled(s) = &sampled else { unreachable!() };
        let map_a = ProperTimeMap::build(&analytic, t_end, DEFAULT_MAP_NODES).unwrap();
        for i in 0..=500 {
            let t = t_end * i as f64 / 500.0;
            let ta = map_a.proper_time(t).unwrap();
            let ts = s.proper_time_map().proper_time(t).unwrap();
            assert!((ta - ts).abs() < 1e-6, "t {t}: {ta} vs {ts}");
        }
        for tau in [0.1, 0.9, 2.0, 3.0] {
            let u = sampled.four_velocity(tau).unwrap();
            assert!((u.minkowski_square() - 1.0).abs() < 1e-6);
            let diff = sampled.position(tau).unwrap() - analytic.position(tau).unwrap();
            assert!(diff.t.abs() < 1e-6 && diff.x.abs() < 1e-6, "{diff:?}");
        }
    }
}
