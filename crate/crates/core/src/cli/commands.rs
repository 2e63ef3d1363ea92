use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::output::{write_csv, write_json};
use super::scenario::Scenario;
use crate::designer::{default_velocity_samples, df_probe_detuning, refine_numeric, solve_control_rabi, CompensationReport};
use crate::doppler::{averaged_spectrum, detuning_range, line_metrics, make_grid, LineMetrics, VelocityGrid};
use crate::error::{Error, Result};
use crate::propagation::{conversion_scan, optimal_probe_detuning, ConversionScan, Discrepancy};
use crate::response::{InducedResonance, Response, ResponseModel};
use crate::scheme::{Direction, FieldSet};

pub const DEFAULT_SPAN_MHZ: f64 = 2000.0;
pub const DEFAULT_POINTS: usize = 1001;
pub const DEFAULT_Z_MAX: f64 = 5.0;
pub const DEFAULT_N_Z: usize = 51;
/// Velocities in the per-velocity surface, uniform on [−3u, 3u].
pub const SURFACE_VELOCITIES: usize = 61;
/// Half-widths of the window searched for the best probe detuning, MHz.
const PROBE_SEARCH_DRESSED: f64 = 200.0;
const PROBE_SEARCH_BARE: f64 = 500.0;
const PROBE_SEARCH_POINTS: usize = 401;

/// Command-line switches that modify a scenario.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunOptions {
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub no_control: bool,
    pub compare_off: bool,
    pub co_propagating_control: bool,
}

/// Everything that determines a run, echoed at the top of every output file.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance<'a> {
    pub command: &'static str,
    pub version: &'static str,
    pub scenario: &'a Scenario,
    pub options: &'a RunOptions,
}

fn provenance<'a>(command: &'static str, scenario: &'a Scenario, options: &'a RunOptions) -> Provenance<'a> {
    Provenance {
        command,
        version: env!("CARGO_PKG_VERSION"),
        scenario,
        options,
    }
}

fn grid_for(s: &Scenario) -> Result<VelocityGrid> {
    make_grid(s.scheme.u, s.node_count(), s.quadrature_kind())
}

fn prepare(scenario: &Scenario, options: &RunOptions) -> Result<(Scenario, FieldSet)> {
    scenario.validate()?;
    let mut resolved = scenario.clone();
    if options.no_control {
        resolved.fields.g23minus = 0.0;
    }
    if options.co_propagating_control {
        resolved.fields.e3minus_direction = Direction::Forward;
    }
    let fields = FieldSet::new(&resolved.scheme, &resolved.fields)?;
    Ok((resolved, fields))
}

fn out_path(options: &RunOptions, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&options.out_dir)?;
    Ok(options.out_dir.join(name))
}

/// Line metrics or the reason they are unavailable.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MetricsOutcome {
    Ok(LineMetrics),
    Failed { error: String },
}

impl MetricsOutcome {
    fn of(detunings: &[f64], profile: &[f64]) -> Self {
        match line_metrics(detunings, profile) {
            Ok(m) => MetricsOutcome::Ok(m),
            Err(e) => MetricsOutcome::Failed { error: e.to_string() },
        }
    }

    pub fn hwhm(&self) -> Option<f64> {
        match self {
            MetricsOutcome::Ok(m) => Some(m.hwhm),
            MetricsOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GuardSummary {
    pub flagged_points: usize,
    pub fallback_points: usize,
    /// m/s
    pub narrowest_width: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSummary {
    pub omega1_center: f64,
    pub induced_resonance: InducedResonance,
    /// HWHM of |⟨χ̃4⟩|², MHz.
    pub hwhm: Option<f64>,
    pub chi4nl_coherent: MetricsOutcome,
    pub chi4nl_incoherent: MetricsOutcome,
    pub chi1_absorption: MetricsOutcome,
    pub guard: GuardSummary,
    pub files: Vec<String>,
}

/// Per-velocity response surface and velocity-averaged χ1 and χ̃4 spectra.
pub fn cmd_spectrum(scenario: &Scenario, options: &RunOptions) -> Result<SpectrumSummary> {
    let (mut resolved, fields) = prepare(scenario, options)?;
    let scheme = resolved.scheme.clone();
    let center = match resolved.omega1 {
        Some(o) => o,
        None => df_probe_detuning(&scheme, &fields, fields.e2.detuning)?,
    };
    resolved.omega1 = Some(center);
    resolved.omega1_span = Some(resolved.omega1_span.unwrap_or(DEFAULT_SPAN_MHZ));
    resolved.points = Some(resolved.points.unwrap_or(DEFAULT_POINTS));
    resolved.quadrature = Some(resolved.quadrature_kind());
    resolved.velocity_nodes = Some(resolved.node_count());
    let header = provenance("spectrum", &resolved, options);

    let grid = grid_for(&resolved)?;
    let detunings = detuning_range(center, resolved.omega1_span.unwrap_or_default(), resolved.points.unwrap_or_default())?;
    let chi1 = averaged_spectrum(&scheme, &fields, &detunings, &grid, Response::Chi1)?;
    let chi4 = averaged_spectrum(&scheme, &fields, &detunings, &grid, Response::Chi4nl)?;
    let unresolved = chi1.flagged_points + chi4.flagged_points - chi1.fallback_points - chi4.fallback_points;
    if unresolved > 0 {
        return Err(Error::UnresolvedFeature {
            width: chi1.narrowest_width.min(chi4.narrowest_width),
            points: unresolved,
        });
    }

    let spectra_path = out_path(options, "spectra.csv")?;
    write_csv(
        &spectra_path,
        &header,
        &[
            "detuning_MHz",
            "chi1_re",
            "chi1_im",
            "chi4nl_re",
            "chi4nl_im",
            "chi4nl_coherent_abs2",
            "chi4nl_incoherent_abs2",
        ],
        detunings.iter().enumerate().map(|(i, &d)| {
            let (a, b) = (chi1.mean.values[i], chi4.mean.values[i]);
            (d, a.re, a.im, b.re, b.im, b.norm_sqr(), chi4.mean_abs2[i])
        }),
    )?;

    let model = ResponseModel::new(&scheme, &fields)?;
    let u = scheme.u;
    let velocities: Vec<f64> = (0..SURFACE_VELOCITIES)
        .map(|i| -3.0 * u + 6.0 * u * i as f64 / (SURFACE_VELOCITIES - 1) as f64)
        .collect();
    let surface: Vec<Vec<(f64, f64, f64, f64, f64, f64, f64)>> = velocities
        .par_iter()
        .map(|&v| {
            detunings
                .iter()
                .map(|&d| {
                    let p = model.response_point(d, v);
                    let (a, b) = (p.chi1_ratio, p.chi4nl_ratio);
                    (v, d, b.re, b.im, b.norm_sqr(), a.re, a.im)
                })
                .collect()
        })
        .collect();
    let surface_path = out_path(options, "surface.csv")?;
    write_csv(
        &surface_path,
        &header,
        &["v_m_per_s", "detuning_MHz", "chi4nl_re", "chi4nl_im", "chi4nl_abs2", "chi1_re", "chi1_im"],
        surface.into_iter().flatten(),
    )?;

    let coherent = MetricsOutcome::of(&detunings, &chi4.mean.abs2());
    Ok(SpectrumSummary {
        omega1_center: center,
        induced_resonance: model.induced_resonance(center),
        hwhm: coherent.hwhm(),
        chi4nl_coherent: coherent,
        chi4nl_incoherent: MetricsOutcome::of(&detunings, &chi4.mean_abs2),
        chi1_absorption: MetricsOutcome::of(&detunings, &chi1.mean.real()),
        guard: GuardSummary {
            flagged_points: chi1.flagged_points + chi4.flagged_points,
            fallback_points: chi1.fallback_points + chi4.fallback_points,
            narrowest_width: chi1.narrowest_width.min(chi4.narrowest_width),
        },
        files: vec![display(&surface_path), display(&spectra_path)],
    })
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Clone, Debug, Serialize)]
pub struct DesignOutput<'a> {
    pub parameters: Provenance<'a>,
    pub report: CompensationReport,
}

/// Solves for the control Rabi frequency, refines it numerically and writes `design.json`.
/// Any control amplitude in the scenario is ignored.
pub fn cmd_design(scenario: &Scenario, options: &RunOptions) -> Result<CompensationReport> {
    let (mut resolved, fields) = prepare(scenario, options)?;
    resolved.fields.g23minus = 0.0;
    let scheme = &resolved.scheme;
    let mut report = solve_control_rabi(scheme, &fields)?;
    report = match refine_numeric(scheme, &fields, &report, &default_velocity_samples(scheme.u)) {
        Ok(refined) => refined,
        Err(e) => {
            report.warnings.push(format!("numerical refinement skipped: {e}"));
            report
        }
    };
    let path = out_path(options, "design.json")?;
    write_json(
        &path,
        &DesignOutput {
            parameters: provenance("design", &resolved, options),
            report: report.clone(),
        },
    )?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConversionSummary {
    pub omega1: f64,
    pub alpha1: f64,
    pub alpha4: f64,
    pub dphase1: f64,
    pub dphase4: f64,
    pub delta_k: Complex64,
    pub coupling: Complex64,
    pub max_eta: f64,
    pub argmax_thickness: f64,
    pub max_eta_ode: f64,
    pub argmax_thickness_ode: f64,
    pub discrepancy: Discrepancy,
    pub file: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvertOutput<'a> {
    pub parameters: Provenance<'a>,
    pub on: ConversionSummary,
    pub off: Option<ConversionSummary>,
    /// max η with the scenario's control over max η with E3− off (closed form).
    pub enhancement_ratio: Option<f64>,
    /// Same ratio from the envelope integration.
    pub enhancement_ratio_ode: Option<f64>,
}

/// Probe detuning used when the scenario leaves it open: the maximum of |⟨χ̃4⟩|
/// near the dressed (or bare) Raman resonance.
pub fn default_probe_detuning(scenario: &Scenario, fields: &FieldSet, grid: &VelocityGrid) -> Result<f64> {
    let scheme = &scenario.scheme;
    let center = df_probe_detuning(scheme, fields, fields.e2.detuning)?;
    let half = if fields.g23minus() > 0.0 {
        PROBE_SEARCH_DRESSED
    } else {
        PROBE_SEARCH_BARE
    };
    optimal_probe_detuning(scheme, fields, grid, center, half, PROBE_SEARCH_POINTS)
}

fn run_conversion(
    resolved: &Scenario,
    fields: &FieldSet,
    grid: &VelocityGrid,
    header: &Provenance,
    path: PathBuf,
) -> Result<(ConversionScan, ConversionSummary)> {
    let omega1 = match resolved.omega1 {
        Some(o) => o,
        None => default_probe_detuning(resolved, fields, grid)?,
    };
    let scan = conversion_scan(
        &resolved.scheme,
        fields,
        omega1,
        resolved.z_max.unwrap_or(DEFAULT_Z_MAX),
        resolved.n_z.unwrap_or(DEFAULT_N_Z),
        grid,
    )?;
    let a = scan.absorption;
    write_csv(
        &path,
        header,
        &["alpha01_z", "eta_closed", "eta_ode", "alpha1", "alpha4", "re_dk", "im_dk"],
        scan.closed
            .thickness
            .iter()
            .zip(&scan.closed.eta_q)
            .zip(&scan.ode.eta_q)
            .map(|((&z, &c), &o)| (z, c, o, a.alpha1, a.alpha4, scan.delta_k.re, scan.delta_k.im)),
    )?;
    let (_, z_closed, eta_closed) = scan.closed.maximum();
    let (_, z_ode, eta_ode) = scan.ode.maximum();
    let summary = ConversionSummary {
        omega1,
        alpha1: a.alpha1,
        alpha4: a.alpha4,
        dphase1: a.dphase1,
        dphase4: a.dphase4,
        delta_k: scan.delta_k,
        coupling: scan.coupling,
        max_eta: eta_closed,
        argmax_thickness: z_closed,
        max_eta_ode: eta_ode,
        argmax_thickness_ode: z_ode,
        discrepancy: scan.discrepancy,
        file: display(&path),
    };
    Ok((scan, summary))
}

fn ratio(on: f64, off: f64) -> Option<f64> {
    (off > 0.0).then(|| on / off)
}

/// Conversion efficiency versus optical thickness, optionally against the E3−-off case.
pub fn cmd_convert(scenario: &Scenario, options: &RunOptions) -> Result<serde_json::Value> {
    let (mut resolved, fields) = prepare(scenario, options)?;
    resolved.z_max = Some(resolved.z_max.unwrap_or(DEFAULT_Z_MAX));
    resolved.n_z = Some(resolved.n_z.unwrap_or(DEFAULT_N_Z));
    resolved.quadrature = Some(resolved.quadrature_kind());
    resolved.velocity_nodes = Some(resolved.node_count());
    let grid = grid_for(&resolved)?;
    let header = provenance("convert", &resolved, options);

    let (_, on) = run_conversion(&resolved, &fields, &grid, &header, out_path(options, "convert.csv")?)?;
    let off = if options.compare_off {
        let off_fields = fields.without_control();
        Some(run_conversion(&resolved, &off_fields, &grid, &header, out_path(options, "convert_off.csv")?)?.1)
    } else {
        None
    };
    let output = ConvertOutput {
        enhancement_ratio: off.as_ref().and_then(|o| ratio(on.max_eta, o.max_eta)),
        enhancement_ratio_ode: off.as_ref().and_then(|o| ratio(on.max_eta_ode, o.max_eta_ode)),
        parameters: header.clone(),
        on,
        off,
    };
    write_json(&out_path(options, "convert.json")?, &output)?;
    Ok(serde_json::to_value(&output)?)
}
