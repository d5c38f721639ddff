//! One curve from a resolved configuration, plus sweeps over a config key.

use std::path::{Path, PathBuf};

use serde::Serialize;
use zenoline_core::dephasing::dephase;
use zenoline_core::quad::{convergence_against, ConvergenceReport, HermitianKernel};
use zenoline_core::udw::{decay_rate, survival_perturbative, ChannelKernel};
use zenoline_core::wightman::WightmanKernel;
use zenoline_core::worldline::Family;
use zenoline_core::zeno::{optimal_interval, segment_regimes, Segment};
use zenoline_core::{Channel, ChannelSpec, Complex64, DecayCurve, GridSpec, RegimeSegmentation};

use crate::config::{ChannelKind, ConfigDocument, Resolved, RunConfig};
use crate::error::CliError;
use crate::output::{rounded, write_csv, write_file, CsvRow, CurveSummary, OptimalInterval, Sidecar};
use crate::svg::{self, Plot, Series};

impl ChannelKind {
    pub fn core_channel(self) -> Channel {
        match self {
            ChannelKind::SigmaX => Channel::SigmaX,
            ChannelKind::SigmaZExact | ChannelKind::SigmaZPerturbative => Channel::SigmaZ,
        }
    }
}

/// A computed decay curve with its CSV already rendered.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub channel: ChannelKind,
    pub family: Family,
    /// Grid and decay rate as written to the CSV.
    pub curve: DecayCurve,
    pub survival: Vec<f64>,
    pub valid: Vec<bool>,
    pub segmentation: RegimeSegmentation,
    pub summary: CurveSummary,
    pub csv: String,
}

fn check<K: HermitianKernel>(kernel: &K, grid: &GridSpec, value: f64) -> Result<ConvergenceReport, CliError> {
    Ok(convergence_against(kernel, grid, Complex64::new(value, 0.0))?)
}

struct Survival {
    survival: Vec<f64>,
    valid: Vec<bool>,
    kernel_evals: u64,
    /// At the last grid time.
    convergence: Option<ConvergenceReport>,
}

fn survival(r: &Resolved) -> Result<Survival, CliError> {
    let c2 = r.qubit.coupling_c * r.qubit.coupling_c;
    match r.channel {
        ChannelKind::SigmaZExact => {
            let d = dephase(&r.worldline, r.qubit, r.reg, &r.grid)?;
            // chi = -2 c^2 I, so with c = 0 there is nothing to converge
            let report = if r.convergence_check && c2 > 0.0 {
                let value = d.chi.last().expect("validated grid is non-empty") / (-2.0 * c2);
                Some(check(&WightmanKernel::new(&r.worldline, r.reg), &r.grid, value)?)
            } else {
                None
            };
            let valid = vec![true; d.survival.len()];
            Ok(Survival { survival: d.survival, valid, kernel_evals: d.kernel_evals, convergence: report })
        }
        ChannelKind::SigmaX | ChannelKind::SigmaZPerturbative => {
            let spec = ChannelSpec::new(r.channel.core_channel());
            let p = survival_perturbative(&r.worldline, r.qubit, &spec, r.reg, &r.grid)?
                .with_threshold(r.validity_threshold);
            let report = if r.convergence_check && c2 > 0.0 {
                let value = 1.0 - p.survival.last().expect("validated grid is non-empty");
                let kernel = ChannelKernel::new(&r.worldline, r.qubit, &spec, r.reg);
                Some(check(&kernel, &r.grid, value)?)
            } else {
                None
            };
            Ok(Survival { survival: p.survival, valid: p.valid, kernel_evals: p.kernel_evals, convergence: report })
        }
    }
}

pub fn run_experiment(r: &Resolved) -> Result<RunOutcome, CliError> {
    let Survival { survival, valid, kernel_evals, convergence } = survival(r)?;
    let exact = decay_rate(&r.grid.t_grid, &survival)?;
    // regimes are computed from the numbers as written, so re-reading the CSV reproduces them
    let tau: Vec<f64> = exact.tau_grid.iter().map(|&t| rounded(t)).collect();
    let gamma: Vec<f64> = exact.gamma.iter().map(|&g| rounded(g)).collect();
    let family = r.worldline.family();
    let curve = DecayCurve::new(tau, gamma)?.with_metadata(r.channel.core_channel(), family);
    let segmentation = segment_regimes(&curve, r.slope_tol)?;
    let (opt_tau, opt_gamma) = optimal_interval(&curve)?;
    let rows: Vec<CsvRow> = (0..curve.len())
        .map(|k| CsvRow {
            tau: curve.tau_grid[k],
            s: survival[k],
            gamma: curve.gamma[k],
            regime: segmentation.point_labels[k],
            valid: valid[k],
        })
        .collect();
    let summary = CurveSummary {
        kernel_evals,
        convergence,
        segments: segmentation.segments.clone(),
        optimal_interval: OptimalInterval { tau: opt_tau, gamma: opt_gamma },
        points_outside_validity: valid.iter().filter(|v| !**v).count(),
    };
    Ok(RunOutcome { channel: r.channel, family, csv: write_csv(&rows), curve, survival, valid, segmentation, summary })
}

impl RunOutcome {
    /// Error for a failed convergence check, if any.
    pub fn convergence_error(&self) -> Option<CliError> {
        let report = self.summary.convergence.as_ref()?;
        (!report.passed).then(|| {
            CliError::NotConverged(
                report.advice.clone().unwrap_or_else(|| format!("relative change {:e}", report.relative_difference)),
            )
        })
    }

    pub fn series(&self, label: impl Into<String>, dashed: bool) -> Series {
        Series { label: label.into(), tau: self.curve.tau_grid.clone(), gamma: self.curve.gamma.clone(), dashed }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSummary {
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_points: usize,
    pub base_panels_per_unit: usize,
    pub diagonal_refine_width: f64,
    pub diagonal_panel_width: f64,
    pub gauss_order: usize,
}

/// Parameters as the core saw them, after defaults and mappings.
#[derive(Clone, Debug, Serialize)]
pub struct ResolvedSummary {
    pub family: Family,
    pub channel: ChannelKind,
    pub omega0: f64,
    pub delta: f64,
    pub coupling_c: f64,
    pub epsilon: f64,
    pub validity_threshold: f64,
    pub slope_tol: f64,
    pub grid: GridSummary,
}

impl From<&Resolved> for ResolvedSummary {
    fn from(r: &Resolved) -> Self {
        let t = &r.grid.t_grid;
        ResolvedSummary {
            family: r.worldline.family(),
            channel: r.channel,
            omega0: r.qubit.omega0,
            delta: r.qubit.delta,
            coupling_c: r.qubit.coupling_c,
            epsilon: r.reg.epsilon,
            validity_threshold: r.validity_threshold,
            slope_tol: r.slope_tol,
            grid: GridSummary {
                tau_min: t[0],
                tau_max: t[t.len() - 1],
                n_points: t.len(),
                base_panels_per_unit: r.grid.base_panels_per_unit,
                diagonal_refine_width: r.grid.diagonal_refine_width,
                diagonal_panel_width: r.grid.diagonal_panel_width,
                gauss_order: r.grid.gauss_order,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunMetadata<'a> {
    pub config: &'a RunConfig,
    pub resolved: ResolvedSummary,
    #[serde(flatten)]
    pub summary: &'a CurveSummary,
}

/// Output paths of one run; the JSON sidecar defaults to the CSV path
/// with a `.json` extension.
#[derive(Clone, Debug)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub svg: Option<PathBuf>,
}

impl OutputPaths {
    pub fn from_config(config: &RunConfig, base_dir: &Path) -> Result<Self, CliError> {
        let csv =
            config.output.csv.as_ref().ok_or_else(|| CliError::Config("missing required field `output.csv`".into()))?;
        let csv = base_dir.join(csv);
        let json = config.output.json.as_ref().map(|p| base_dir.join(p)).unwrap_or_else(|| csv.with_extension("json"));
        let svg = config.output.svg.as_ref().map(|p| base_dir.join(p));
        Ok(OutputPaths { csv, json, svg })
    }

    /// Paths for one sweep member: `<stem>_<key>_<value>.<ext>`, no SVG.
    pub fn for_sweep_value(&self, key: &str, value: &str) -> Self {
        let tag = |p: &Path| {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let ext = p.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
            p.with_file_name(format!("{stem}_{key}_{value}{ext}"))
        };
        OutputPaths { csv: tag(&self.csv), json: tag(&self.json), svg: None }
    }
}

pub fn curve_plot(title: impl Into<String>, outcome: &RunOutcome) -> Plot {
    Plot {
        title: title.into(),
        series: vec![outcome.series(outcome.channel.to_string(), false)],
        shading: outcome.segmentation.segments.clone(),
    }
}

/// Writes CSV, JSON and the optional SVG of one run.
pub fn write_run(
    outcome: &RunOutcome,
    config: &RunConfig,
    resolved: &Resolved,
    paths: &OutputPaths,
) -> Result<(), CliError> {
    write_file(&paths.csv, &outcome.csv)?;
    let meta = RunMetadata { config, resolved: resolved.into(), summary: &outcome.summary };
    write_file(&paths.json, &Sidecar::new(meta).to_json()?)?;
    if let Some(svg_path) = &paths.svg {
        let title = format!("{} / {}", outcome.family, outcome.channel);
        write_file(svg_path, &svg::render(&curve_plot(title, outcome)))?;
    }
    Ok(())
}

/// `run`: compute, write, then fail with status 3 if the convergence check did.
pub fn run(doc: &ConfigDocument) -> Result<RunOutcome, CliError> {
    let config = doc.typed()?;
    let resolved = config.resolve(doc.base_dir())?;
    let paths = OutputPaths::from_config(&config, doc.base_dir())?;
    let outcome = run_experiment(&resolved)?;
    write_run(&outcome, &config, &resolved, &paths)?;
    match outcome.convergence_error() {
        Some(e) => Err(e),
        None => Ok(outcome),
    }
}

/// Display form of a sweep value for file names and legends.
pub fn value_label(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Clone, Debug)]
pub struct SweepMember {
    pub value: toml::Value,
    pub outcome: RunOutcome,
    pub paths: OutputPaths,
}

/// `sweep`: one run per value of `[sweep] parameter`, each written to its
/// own CSV/JSON, plus an overlay SVG at `output.svg` if set.
pub fn sweep(doc: &ConfigDocument) -> Result<Vec<SweepMember>, CliError> {
    let config = doc.typed()?;
    let sweep = config.sweep.as_ref().ok_or_else(|| CliError::Config("missing required section `[sweep]`".into()))?;
    if sweep.values.is_empty() {
        return Err(CliError::Config("`sweep.values` is empty".into()));
    }
    let key = sweep.parameter.rsplit('.').next().unwrap_or(&sweep.parameter).to_string();
    let base_paths = OutputPaths::from_config(&config, doc.base_dir())?;

    let mut members = Vec::with_capacity(sweep.values.len());
    let mut failure = None;
    for value in &sweep.values {
        let mut member_doc = doc.clone();
        member_doc.set(&sweep.parameter, value.clone())?;
        let member_config = member_doc.typed()?;
        let resolved = member_config.resolve(doc.base_dir())?;
        let paths = base_paths.for_sweep_value(&key, &value_label(value));
        let outcome = run_experiment(&resolved)?;
        write_run(&outcome, &member_config, &resolved, &paths)?;
        failure = failure.or(outcome.convergence_error());
        members.push(SweepMember { value: value.clone(), outcome, paths });
    }
    if let Some(svg_path) = &base_paths.svg {
        let plot = Plot {
            title: format!("sweep over {}", sweep.parameter),
            series: members
                .iter()
                .map(|m| m.outcome.series(format!("{key} = {}", value_label(&m.value)), false))
                .collect(),
            shading: Vec::<Segment>::new(),
        };
        write_file(svg_path, &svg::render(&plot))?;
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(members),
    }
}

/// `convergence-check`: the report for the last grid time, without writing files.
pub fn convergence_check(doc: &ConfigDocument) -> Result<(ConvergenceReport, ResolvedSummary), CliError> {
    let config = doc.typed()?;
    let mut resolved = config.resolve(doc.base_dir())?;
    resolved.convergence_check = true;
    let outcome = run_experiment(&resolved)?;
    let report = outcome
        .summary
        .convergence
        .clone()
        .ok_or_else(|| CliError::Config("nothing to check: the coupling is zero".into()))?;
    Ok((report, (&resolved).into()))
}
