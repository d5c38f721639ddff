//! Canonical parameter sets for the four figure panels: oscillating (`shm`),
//! uniform acceleration (`ua`), stationary benchmark (`bm`) and circular
//! motion (`cm`). All use `G = 0.01`, `omega_c = 10`, `omega0 = 2`, `delta = 0`.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use zenoline_core::spectral::{map_params, OhmicParams};
use zenoline_core::worldline::Family;
use zenoline_core::zeno::DEFAULT_SLOPE_TOL;
use zenoline_core::{linspace, GridSpec, QubitParams, Worldline};

use crate::config::{ChannelKind, Resolved, DEFAULT_TAU_MAX, DEFAULT_TAU_MIN, DEFAULT_VALIDITY_THRESHOLD};
use crate::error::CliError;
use crate::experiment::{run_experiment, ResolvedSummary};
use crate::output::{write_file, CurveSummary, Sidecar};
use crate::svg::{self, Plot};

/// Output points per curve; fine enough to resolve the short Zeno window
/// near half an oscillation period.
pub const DEFAULT_FIGURE_POINTS: usize = 600;
pub const FIGURE_SPEED: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    Shm,
    Ua,
    Bm,
    Cm,
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureId::Shm => "shm",
            FigureId::Ua => "ua",
            FigureId::Bm => "bm",
            FigureId::Cm => "cm",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CurveRecipe {
    pub label: String,
    pub slug: String,
    pub worldline: Worldline,
    pub channel: ChannelKind,
    pub dashed: bool,
}

#[derive(Clone, Debug)]
pub struct PanelRecipe {
    pub slug: String,
    pub title: String,
    pub curves: Vec<CurveRecipe>,
    /// Curve whose regimes shade the background.
    pub shade: Option<usize>,
}

fn curve(label: String, slug: String, worldline: Worldline, channel: ChannelKind) -> CurveRecipe {
    CurveRecipe { label, slug, worldline, channel, dashed: false }
}

/// `omega = 0` is the inertial limit, which is the stationary worldline.
fn oscillating(omega: f64) -> Result<Worldline, CliError> {
    if omega == 0.0 {
        Ok(Worldline::stationary())
    } else {
        Worldline::oscillating_with_frequency(omega, FIGURE_SPEED).map_err(CliError::from)
    }
}

fn two_channel_panels(
    prefix: &str,
    name: &str,
    params: &[(String, String, Worldline)],
    shade: Option<usize>,
) -> Vec<PanelRecipe> {
    [(ChannelKind::SigmaX, "sigma_x", "σ_x"), (ChannelKind::SigmaZExact, "sigma_z", "σ_z")]
        .into_iter()
        .map(|(channel, slug, symbol)| PanelRecipe {
            slug: format!("{prefix}_{slug}"),
            title: format!("{name}: Γ(τ) for {symbol}"),
            curves: params
                .iter()
                .map(|(label, tag, w)| curve(label.clone(), format!("{prefix}_{slug}_{tag}"), w.clone(), channel))
                .collect(),
            shade,
        })
        .collect()
}

pub fn recipes(id: FigureId) -> Result<Vec<PanelRecipe>, CliError> {
    Ok(match id {
        FigureId::Shm => {
            let params = [0.0, 1.98, 9.9]
                .into_iter()
                .map(|om| Ok((format!("ω = {om}"), format!("omega_{om}"), oscillating(om)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            two_channel_panels("shm", "oscillating worldline, v = 0.99", &params, Some(1))
        }
        FigureId::Ua => {
            let params = [1.0, 10.0, 100.0]
                .into_iter()
                .map(|a: f64| Ok((format!("a = {a}"), format!("a_{a}"), Worldline::uniform_acceleration(a)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            two_channel_panels("ua", "uniform acceleration", &params, None)
        }
        FigureId::Cm => {
            let params = [1.98, 9.9]
                .into_iter()
                .map(|om| {
                    Ok((
                        format!("ω = {om}"),
                        format!("omega_{om}"),
                        Worldline::circular_with_frequency(om, FIGURE_SPEED)?,
                    ))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            two_channel_panels("cm", "circular motion, v = 0.99", &params, None)
        }
        FigureId::Bm => {
            let w = Worldline::stationary();
            let mut exact = curve("exact".into(), "bm_exact".into(), w.clone(), ChannelKind::SigmaZExact);
            exact.dashed = true;
            vec![PanelRecipe {
                slug: "bm".into(),
                title: "benchmark, G = 0.01, ω_c = 10: σ_z".into(),
                curves: vec![
                    curve("perturbative".into(), "bm_perturbative".into(), w, ChannelKind::SigmaZPerturbative),
                    exact,
                ],
                shade: None,
            }]
        }
    })
}

/// The shared qubit, field and grid settings applied to one curve recipe.
pub fn resolve_curve(recipe: &CurveRecipe, n_points: usize) -> Result<Resolved, CliError> {
    let (reg, c) = map_params(OhmicParams::new(0.01, 10.0)?);
    let grid = GridSpec::for_worldline(linspace(DEFAULT_TAU_MIN, DEFAULT_TAU_MAX, n_points), &recipe.worldline, reg);
    Ok(Resolved {
        worldline: recipe.worldline.clone(),
        channel: recipe.channel,
        qubit: QubitParams::new(2.0, 0.0, c)?,
        reg,
        grid,
        validity_threshold: DEFAULT_VALIDITY_THRESHOLD,
        slope_tol: DEFAULT_SLOPE_TOL,
        convergence_check: true,
    })
}

#[derive(Debug, Serialize)]
pub struct CurveRecord {
    pub panel: String,
    pub label: String,
    pub family: Family,
    pub csv: PathBuf,
    pub resolved: ResolvedSummary,
    #[serde(flatten)]
    pub summary: CurveSummary,
}

#[derive(Debug, Serialize)]
pub struct FigureRecord {
    pub figure: FigureId,
    pub panels: Vec<PathBuf>,
    pub curves: Vec<CurveRecord>,
}

/// Writes one CSV per curve, one SVG per panel and `<id>.json`. Returns the
/// record and the first convergence failure, if any; files are written either way.
pub fn reproduce(id: FigureId, out_dir: &Path, n_points: usize) -> Result<(FigureRecord, Option<CliError>), CliError> {
    let mut record = FigureRecord { figure: id, panels: Vec::new(), curves: Vec::new() };
    let mut failure = None;
    for panel in recipes(id)? {
        let mut plot = Plot { title: panel.title.clone(), series: Vec::new(), shading: Vec::new() };
        for (i, recipe) in panel.curves.iter().enumerate() {
            let resolved = resolve_curve(recipe, n_points)?;
            let outcome = run_experiment(&resolved)?;
            let csv = out_dir.join(format!("{}.csv", recipe.slug));
            write_file(&csv, &outcome.csv)?;
            plot.series.push(outcome.series(recipe.label.clone(), recipe.dashed));
            if panel.shade == Some(i) {
                plot.shading = outcome.segmentation.segments.clone();
            }
            failure = failure.or(outcome.convergence_error());
            record.curves.push(CurveRecord {
                panel: panel.slug.clone(),
                label: recipe.label.clone(),
                family: outcome.family,
                csv,
                resolved: (&resolved).into(),
                summary: outcome.summary,
            });
        }
        let svg_path = out_dir.join(format!("{}.svg", panel.slug));
        write_file(&svg_path, &svg::render(&plot))?;
        record.panels.push(svg_path);
    }
    let sidecar = Sidecar::new(&record);
    write_file(&out_dir.join(format!("{id}.json")), &sidecar.to_json()?)?;
    Ok((record, failure))
}
