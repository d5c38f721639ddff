//! Experiment configuration: a TOML document with fixed sections, plus
//! `--section.key=value` overrides applied to the parsed document before
//! it is typed.
//!
//! ```toml
//! [worldline]
//! family = "oscillating"      # stationary | uniform_acceleration | oscillating | circular | sampled
//! omega = 1.98                # or amplitude (oscillating) / radius (circular)
//! speed = 0.99
//! # acceleration = 10.0       # uniform_acceleration
//! # path = "trajectory.csv"   # sampled, relative to this file
//!
//! [channel]
//! kind = "sigma_x"            # sigma_x | sigma_z_exact | sigma_z_perturbative
//! validity_threshold = 0.1
//!
//! [qubit]
//! omega0 = 2.0
//! delta = 0.0
//! # c = 0.6283 and epsilon = 0.05, or the [ohmic] section, not both
//!
//! [ohmic]
//! g = 0.01
//! omega_c = 10.0
//!
//! [grid]
//! tau_min = 0.02
//! tau_max = 3.0
//! n_points = 150
//!
//! [quadrature]
//! gauss_order = 8             # 4, 8 or 16
//! refinement = 1              # multiplies every panel density
//! convergence_check = true
//!
//! [output]
//! csv = "run.csv"
//! json = "run.json"           # defaults to the csv path with a .json extension
//! svg = "run.svg"             # optional
//! slope_tol = 1e-3
//!
//! [sweep]                     # only read by `zenoline sweep`
//! parameter = "worldline.acceleration"
//! values = [1.0, 10.0, 100.0]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use zenoline_core::spectral::{map_params, OhmicParams};
use zenoline_core::worldline::Family;
use zenoline_core::zeno::DEFAULT_SLOPE_TOL;
use zenoline_core::{linspace, GridSpec, QubitParams, RegularizationParams, Worldline};

use crate::error::CliError;

pub const DEFAULT_TAU_MIN: f64 = 0.02;
pub const DEFAULT_TAU_MAX: f64 = 3.0;
pub const DEFAULT_N_POINTS: usize = 150;
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = zenoline_core::udw::DEFAULT_VALIDITY_THRESHOLD;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    SigmaX,
    SigmaZExact,
    SigmaZPerturbative,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::SigmaX => "sigma_x",
            ChannelKind::SigmaZExact => "sigma_z_exact",
            ChannelKind::SigmaZPerturbative => "sigma_z_perturbative",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldlineConfig {
    pub family: Option<Family>,
    pub acceleration: Option<f64>,
    pub amplitude: Option<f64>,
    pub radius: Option<f64>,
    pub omega: Option<f64>,
    pub speed: Option<f64>,
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: Option<ChannelKind>,
    pub validity_threshold: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitConfig {
    pub omega0: Option<f64>,
    pub delta: Option<f64>,
    pub c: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OhmicConfig {
    pub g: Option<f64>,
    pub omega_c: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub n_points: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub gauss_order: Option<usize>,
    pub refinement: Option<usize>,
    pub base_panels_per_unit: Option<usize>,
    pub convergence_check: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub slope_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub worldline: WorldlineConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub qubit: QubitConfig,
    pub ohmic: Option<OhmicConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub sweep: Option<SweepConfig>,
}

/// A configuration document before typing, so overrides and sweep values
/// can be written into it by dotted key.
#[derive(Clone, Debug)]
pub struct ConfigDocument {
    table: Table,
    /// Directory that relative input paths are resolved against.
    base_dir: PathBuf,
}

impl ConfigDocument {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        Ok(ConfigDocument { table, base_dir: base_dir.into() })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Sets `section.key` (or a longer dotted path) to `value`.
    pub fn set(&mut self, dotted: &str, value: Value) -> Result<(), CliError> {
        let parts: Vec<&str> = dotted.split('.').collect();
        if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
            return Err(CliError::Config(format!("override `{dotted}` must look like section.key")));
        }
        let mut table = &mut self.table;
        for part in &parts[..parts.len() - 1] {
            let entry = table.entry(part.to_string()).or_insert_with(|| Value::Table(Table::new()));
            table = entry
                .as_table_mut()
                .ok_or_else(|| CliError::Config(format!("override `{dotted}`: `{part}` is not a section")))?;
        }
        table.insert(parts[parts.len() - 1].to_string(), value);
        Ok(())
    }

    /// Applies `--a.b=value` / `--a.b value` arguments.
    pub fn apply_overrides(&mut self, args: &[String]) -> Result<(), CliError> {
        let mut i = 0;
        while i < args.len() {
            let arg = args[i].strip_prefix("--").ok_or_else(|| {
                CliError::Config(format!("unexpected argument `{}`; overrides look like --section.key=value", args[i]))
            })?;
            let (key, raw) = match arg.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    i += 1;
                    let v = args.get(i).ok_or_else(|| CliError::Config(format!("override `--{arg}` has no value")))?;
                    (arg.to_string(), v.clone())
                }
            };
            self.set(&key, parse_value(&raw))?;
            i += 1;
        }
        Ok(())
    }

    pub fn typed(&self) -> Result<RunConfig, CliError> {
        let config: RunConfig = self
            .table
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string().trim_end().to_string()))?;
        Ok(config)
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }
}

/// A TOML scalar or array if `raw` parses as one, else the raw string.
pub fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn require<T: Copy>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing required field `{name}`")))
}

fn positive(value: f64, name: &str) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Config(format!("`{name}` must be positive, got {value}")))
    }
}

/// Everything the core needs for one run, validated.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub worldline: Worldline,
    pub channel: ChannelKind,
    pub qubit: QubitParams,
    pub reg: RegularizationParams,
    pub grid: GridSpec,
    pub validity_threshold: f64,
    pub slope_tol: f64,
    pub convergence_check: bool,
}

impl RunConfig {
    pub fn resolve(&self, base_dir: &Path) -> Result<Resolved, CliError> {
        let worldline = self.resolve_worldline(base_dir)?;
        let channel = require(self.channel.kind, "channel.kind")?;
        let validity_threshold = self.channel.validity_threshold.unwrap_or(DEFAULT_VALIDITY_THRESHOLD);
        if !(validity_threshold > 0.0 && validity_threshold <= 1.0) {
            return Err(CliError::Config(format!(
                "`channel.validity_threshold` must lie in (0, 1], got {validity_threshold}"
            )));
        }

        let omega0 = require(self.qubit.omega0, "qubit.omega0")?;
        let delta = self.qubit.delta.unwrap_or(0.0);
        let (reg, c) = match (&self.ohmic, self.qubit.c, self.qubit.epsilon) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(CliError::Config(
                    "give either qubit.c + qubit.epsilon or ohmic.g + ohmic.omega_c, not both".into(),
                ))
            }
            (Some(ohmic), None, None) => {
                let g = require(ohmic.g, "ohmic.g")?;
                let omega_c = positive(require(ohmic.omega_c, "ohmic.omega_c")?, "ohmic.omega_c")?;
                map_params(OhmicParams::new(g, omega_c).map_err(|e| CliError::Config(e.to_string()))?)
            }
            (None, c, epsilon) => {
                if c.is_none() && epsilon.is_none() {
                    return Err(CliError::Config(
                        "missing coupling: give qubit.c + qubit.epsilon or an [ohmic] section".into(),
                    ));
                }
                let c = require(c, "qubit.c")?;
                let epsilon = positive(require(epsilon, "qubit.epsilon")?, "qubit.epsilon")?;
                (RegularizationParams::new(epsilon).map_err(|e| CliError::Config(e.to_string()))?, c)
            }
        };
        let qubit = QubitParams::new(omega0, delta, c).map_err(|e| CliError::Config(e.to_string()))?;
        if channel == ChannelKind::SigmaZExact && delta != 0.0 {
            return Err(CliError::Config("`qubit.delta` must be 0 for channel sigma_z_exact".into()));
        }

        let tau_min = positive(self.grid.tau_min.unwrap_or(DEFAULT_TAU_MIN), "grid.tau_min")?;
        let tau_max = positive(self.grid.tau_max.unwrap_or(DEFAULT_TAU_MAX), "grid.tau_max")?;
        if tau_max <= tau_min {
            return Err(CliError::Config(format!("`grid.tau_max` ({tau_max}) must exceed `grid.tau_min` ({tau_min})")));
        }
        let n_points = self.grid.n_points.unwrap_or(DEFAULT_N_POINTS);
        if n_points < zenoline_core::zeno::MIN_SEGMENTATION_POINTS {
            return Err(CliError::Config(format!(
                "`grid.n_points` must be at least {}, got {n_points}",
                zenoline_core::zeno::MIN_SEGMENTATION_POINTS
            )));
        }
        let mut grid = GridSpec::for_worldline(linspace(tau_min, tau_max, n_points), &worldline, reg);
        if let Some(ppu) = self.quadrature.base_panels_per_unit {
            grid.base_panels_per_unit = ppu;
        }
        if let Some(order) = self.quadrature.gauss_order {
            grid.gauss_order = order;
        }
        let refinement = self.quadrature.refinement.unwrap_or(1);
        if refinement == 0 {
            return Err(CliError::Config("`quadrature.refinement` must be at least 1".into()));
        }
        grid.base_panels_per_unit *= refinement;
        grid.diagonal_panel_width /= refinement as f64;
        grid.validate().map_err(|e| CliError::Config(e.to_string()))?;

        let slope_tol = self.output.slope_tol.unwrap_or(DEFAULT_SLOPE_TOL);
        if !(slope_tol >= 0.0) {
            return Err(CliError::Config(format!("`output.slope_tol` must be non-negative, got {slope_tol}")));
        }
        Ok(Resolved {
            worldline,
            channel,
            qubit,
            reg,
            grid,
            validity_threshold,
            slope_tol,
            convergence_check: self.quadrature.convergence_check.unwrap_or(true),
        })
    }

    fn resolve_worldline(&self, base_dir: &Path) -> Result<Worldline, CliError> {
        let w = &self.worldline;
        let family = require(w.family, "worldline.family")?;
        let invalid = |e: zenoline_core::Error| CliError::Config(format!("worldline: {e}"));
        let speed = || require(w.speed, "worldline.speed");
        // amplitude or radius may be given directly or through omega = v / b
        let size_or_omega = |size: Option<f64>, name: &str| match (size, w.omega) {
            (Some(_), Some(_)) => {
                Err(CliError::Config(format!("give `worldline.{name}` or `worldline.omega`, not both")))
            }
            (Some(b), None) => Ok((Some(b), None)),
            (None, Some(om)) => Ok((None, Some(om))),
            (None, None) => {
                Err(CliError::Config(format!("missing required field `worldline.{name}` (or `worldline.omega`)")))
            }
        };
        match family {
            Family::Stationary => Ok(Worldline::stationary()),
            Family::UniformAcceleration => {
                Worldline::uniform_acceleration(require(w.acceleration, "worldline.acceleration")?).map_err(invalid)
            }
            Family::Oscillating => match size_or_omega(w.amplitude, "amplitude")? {
                (Some(b), _) => Worldline::oscillating(b, speed()?).map_err(invalid),
                (_, Some(om)) => Worldline::oscillating_with_frequency(om, speed()?).map_err(invalid),
                _ => unreachable!(),
            },
            Family::Circular => match size_or_omega(w.radius, "radius")? {
                (Some(b), _) => Worldline::circular(b, speed()?).map_err(invalid),
                (_, Some(om)) => Worldline::circular_with_frequency(om, speed()?).map_err(invalid),
                _ => unreachable!(),
            },
            Family::Sampled => {
                let path = w
                    .path
                    .as_ref()
                    .ok_or_else(|| CliError::Config("missing required field `worldline.path`".into()))?;
                let path = base_dir.join(path);
                let file = std::fs::File::open(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                Worldline::from_csv(file).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[worldline]
family = "uniform_acceleration"
acceleration = 10.0

[channel]
kind = "sigma_x"

[qubit]
omega0 = 2.0

[ohmic]
g = 0.01
omega_c = 10.0

[output]
csv = "out.csv"
"#;

    fn doc(text: &str) -> ConfigDocument {
        ConfigDocument::parse(text, ".").unwrap()
    }

    #[test]
    fn resolves_ohmic_mapping() {
        let r = doc(BASE).typed().unwrap().resolve(Path::new(".")).unwrap();
        assert!((r.reg.epsilon - 0.05).abs() < 1e-15);
        assert!((r.qubit.coupling_c - 0.2 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(r.grid.t_grid.len(), DEFAULT_N_POINTS);
        assert_eq!(r.channel, ChannelKind::SigmaX);
    }

    #[test]
    fn overrides_replace_and_add_keys() {
        let mut d = doc(BASE);
        d.apply_overrides(&[
            "--worldline.acceleration=100".into(),
            "--grid.n_points".into(),
            "40".into(),
            "--channel.kind=sigma_z_exact".into(),
        ])
        .unwrap();
        let c = d.typed().unwrap();
        assert_eq!(c.worldline.acceleration, Some(100.0));
        assert_eq!(c.grid.n_points, Some(40));
        assert_eq!(c.channel.kind, Some(ChannelKind::SigmaZExact));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut d = doc(BASE);
        d.apply_overrides(&["--worldline.acceleraton=3".into()]).unwrap();
        let err = d.typed().unwrap_err().to_string();
        assert!(err.contains("acceleraton"), "{err}");
    }

    #[test]
    fn missing_field_is_named() {
        let text = BASE.replace("omega0 = 2.0", "");
        let err = doc(&text).typed().unwrap().resolve(Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("qubit.omega0"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn coupling_parameterizations_are_exclusive() {
        let both = BASE.replace("omega0 = 2.0", "omega0 = 2.0\nc = 0.5\nepsilon = 0.05");
        assert!(doc(&both).typed().unwrap().resolve(Path::new(".")).is_err());
        let neither = BASE.replace("[ohmic]\ng = 0.01\nomega_c = 10.0", "");
        assert!(doc(&neither).typed().unwrap().resolve(Path::new(".")).is_err());
        let direct = neither.replace("omega0 = 2.0", "omega0 = 2.0\nc = 0.5\nepsilon = 0.05");
        let r = doc(&direct).typed().unwrap().resolve(Path::new(".")).unwrap();
        assert_eq!((r.qubit.coupling_c, r.reg.epsilon), (0.5, 0.05));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = ConfigDocument::parse("[grid]\ntau_max = = 3\n", ".").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn value_parsing() {
        assert_eq!(parse_value("3"), Value::Integer(3));
        assert_eq!(parse_value("2.5"), Value::Float(2.5));
        assert_eq!(parse_value("circular"), Value::String("circular".into()));
        assert_eq!(parse_value("[1, 2]"), Value::Array(vec![Value::Integer(1), Value::Integer(2)]));
    }

    #[test]
    fn omega_or_size_for_periodic_families() {
        let text = BASE.replace(
            "family = \"uniform_acceleration\"\nacceleration = 10.0",
            "family = \"circular\"\nomega = 1.98\nspeed = 0.99",
        );
        assert!(doc(&text).typed().unwrap().resolve(Path::new(".")).is_ok());
        let both = text.replace("omega = 1.98", "omega = 1.98\nradius = 0.5");
        assert!(doc(&both).typed().unwrap().resolve(Path::new(".")).is_err());
    }
}
