//! Design of the counter-propagating control field E3−.
//!
//! At large one-photon detunings the Raman coherence P̃02 is linear in v:
//!
//! Im P̃02(v) ≈ Im P̃02(0) − 10³·B·v,
//! B = (|G12|²/Ω1²)·k1 + (k1 − k2) + (|G23−|²/Ω4−²)·(k1 − k2 + k3−),
//!
//! with signed inverse wavelengths (k3− < 0 for a counter-propagating control).
//! The two-photon resonance becomes velocity independent when B = 0, which is
//! affine in |G23−|² and only solvable when k1 − k2 + k3− < 0. Because Ω4−
//! depends on the probe detuning, which is itself pinned to the dressed
//! resonance, the closed-form solution is iterated to self-consistency.
//!
//! [`refine_numeric`] then tunes |G23−| directly against the spread of the
//! per-velocity resonance centres Ω1*(v).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{golden_section, scan_then_refine_max};
use crate::response::ResponseModel;
use crate::scheme::{FieldSet, SchemeConfig, TransitionLabel, DOPPLER_MHZ_PER_MS_INV_NM};

pub const MAX_OUTER_ITERATIONS: usize = 50;
pub const OUTER_TOLERANCE: f64 = 1e-6;
const MAX_INNER_ITERATIONS: usize = 500;
const INNER_TOLERANCE: f64 = 1e-11;
/// Detunings must exceed this many Doppler HWHMs for the linear expansion to hold.
pub const VALIDITY_FACTOR: f64 = 5.0;
pub const REFINE_LOWER: f64 = 0.7;
pub const REFINE_UPPER: f64 = 1.3;
pub const REFINE_TOLERANCE: f64 = 1e-4;
const CENTER_SCAN_POINTS: usize = 2001;

/// Compensation bracket with validity-domain diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// B in nm⁻¹.
    pub value: f64,
    /// Ω4− = Ω1 − Ω2 + Ω3−, MHz.
    pub omega4m: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompensationReport {
    /// Linear-in-v coefficient of the Raman resonance position, MHz per m/s.
    pub bracket: f64,
    /// |G23−|, MHz.
    pub solved_rabi: f64,
    /// Ω4− at the solution, MHz.
    pub self_consistent_detuning: f64,
    /// Probe detuning on the dressed resonance at v = 0, MHz.
    pub omega1: f64,
    /// Γ̃02 at the solution, MHz.
    pub induced_width: f64,
    /// max − min of Ω1*(v) over the velocity samples, MHz.
    pub center_spread: f64,
    pub iterations: usize,
    pub warnings: Vec<String>,
    /// |G23−| after numerical flattening of Ω1*(v), MHz.
    pub refined_rabi: Option<f64>,
    /// Spread at `refined_rabi`, MHz.
    pub refined_spread: Option<f64>,
}

/// Signed Doppler coefficients (k1 − k2, k1 − k2 + k3−), nm⁻¹.
fn coefficients(fields: &FieldSet) -> (f64, f64) {
    let k12 = fields.e1.wave_vector() - fields.e2.wave_vector();
    (k12, k12 + fields.e3minus.wave_vector())
}

/// The compensation bracket B for the given fields and probe detuning.
pub fn compensation_residual(scheme: &SchemeConfig, fields: &FieldSet, omega1: f64) -> Residual {
    let (k12, ks) = coefficients(fields);
    let k1 = fields.e1.wave_vector();
    let omega4m = omega1 - fields.e2.detuning + fields.e3minus.detuning;
    let value = fields.g12().powi(2) / omega1.powi(2) * k1 + k12 + fields.g23minus().powi(2) / omega4m.powi(2) * ks;

    let mut warnings = Vec::new();
    let d01 = scheme.doppler_hwhm(TransitionLabel::T01);
    let d03 = scheme.doppler_hwhm(TransitionLabel::T03);
    if omega1.abs() <= VALIDITY_FACTOR * d01 {
        warnings.push(format!(
            "|omega1| = {:.1} MHz is within {VALIDITY_FACTOR} Doppler widths ({d01:.1} MHz); linear expansion is marginal",
            omega1.abs()
        ));
    }
    if omega4m.abs() <= VALIDITY_FACTOR * d03 {
        warnings.push(format!(
            "|omega4-| = {:.1} MHz is within {VALIDITY_FACTOR} Doppler widths ({d03:.1} MHz); linear expansion is marginal",
            omega4m.abs()
        ));
    }
    Residual { value, omega4m, warnings }
}

/// Probe detuning that puts the dressed Raman resonance at v = 0 on line centre,
/// Ω1 = Ω2 − Im(|G12|²/P01 + |G23−|²/P03−), found by fixed-point iteration from `start`.
pub fn df_probe_detuning(scheme: &SchemeConfig, fields: &FieldSet, start: f64) -> Result<f64> {
    let model = ResponseModel::new(scheme, fields)?;
    let mut omega1 = start;
    for _ in 0..MAX_INNER_ITERATIONS {
        let next = omega1 - model.induced_resonance(omega1).position;
        if !next.is_finite() {
            return Err(Error::NonFinite("probe detuning iteration"));
        }
        let done = (next - omega1).abs() <= INNER_TOLERANCE * next.abs().max(1.0);
        omega1 = next;
        if done {
            return Ok(omega1);
        }
    }
    Err(Error::NonConvergence {
        what: "dressed resonance position",
        iterations: MAX_INNER_ITERATIONS,
    })
}

/// Closed-form control Rabi frequency iterated to self-consistency with the probe
/// detuning. The control amplitude in `fields` is ignored; its detuning and
/// direction are used. The reported spread uses nine velocities on [−2u, 2u].
pub fn solve_control_rabi(scheme: &SchemeConfig, fields: &FieldSet) -> Result<CompensationReport> {
    let (k12, ks) = coefficients(fields);
    if !(ks < 0.0) {
        return Err(Error::NoCompensationGeometry(format!(
            "k1 - k2 + k3- = {ks:.4e} nm^-1 must be negative; the control field has to counter-propagate with 1/lambda > 1/lambda1 - 1/lambda2"
        )));
    }
    let k1 = fields.e1.wave_vector();
    let g12_sq = fields.g12().powi(2);
    let (omega2, omega3m) = (fields.e2.detuning, fields.e3minus.detuning);

    let mut omega1 = omega2;
    let mut rabi = 0.0_f64;
    for iteration in 1..=MAX_OUTER_ITERATIONS {
        let omega4m = omega1 - omega2 + omega3m;
        let next = omega4m.abs() * ((g12_sq / omega1.powi(2) * k1 + k12) / -ks).sqrt();
        if !next.is_finite() {
            return Err(Error::NonFinite("control Rabi iteration"));
        }
        let trial = fields.with_control_rabi(next);
        omega1 = df_probe_detuning(scheme, &trial, omega1)?;
        let converged = (next - rabi).abs() <= OUTER_TOLERANCE * next;
        rabi = next;
        if converged {
            return finish_report(scheme, &trial, omega1, iteration);
        }
    }
    Err(Error::NonConvergence {
        what: "control Rabi fixed point",
        iterations: MAX_OUTER_ITERATIONS,
    })
}

fn finish_report(scheme: &SchemeConfig, fields: &FieldSet, omega1: f64, iterations: usize) -> Result<CompensationReport> {
    let residual = compensation_residual(scheme, fields, omega1);
    let model = ResponseModel::new(scheme, fields)?;
    let samples = default_velocity_samples(scheme.u);
    let center_spread = center_spread(scheme, fields, &samples)?;
    Ok(CompensationReport {
        bracket: residual.value * DOPPLER_MHZ_PER_MS_INV_NM,
        solved_rabi: fields.g23minus(),
        self_consistent_detuning: residual.omega4m,
        omega1,
        induced_width: model.induced_resonance(omega1).width,
        center_spread,
        iterations,
        warnings: residual.warnings,
        refined_rabi: None,
        refined_spread: None,
    })
}

/// Nine uniformly spaced velocities on [−2u, 2u].
pub fn default_velocity_samples(u: f64) -> Vec<f64> {
    velocity_samples(2.0 * u, 9)
}

/// `n` uniformly spaced velocities on [−v_max, v_max].
pub fn velocity_samples(v_max: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0];
    }
    (0..n).map(|i| -v_max + 2.0 * v_max * i as f64 / (n - 1) as f64).collect()
}

/// Ω1 window in which the per-velocity resonance centres are searched: centred
/// on the v = 0 dressed resonance, wide enough for the bare two-photon Doppler
/// shift at the largest sampled velocity.
pub fn center_window(scheme: &SchemeConfig, fields: &FieldSet, v_max: f64) -> Result<(f64, f64)> {
    let start = fields.e2.detuning;
    let centre = df_probe_detuning(scheme, fields, start)?;
    let model = ResponseModel::new(scheme, fields)?;
    let (k12, _) = coefficients(fields);
    let width = model.induced_resonance(centre).width.abs();
    let half = 1.5 * (k12 * DOPPLER_MHZ_PER_MS_INV_NM * v_max).abs() + 20.0 * width;
    Ok((centre - half, centre + half))
}

/// Ω1*(v): probe detuning maximizing |χ̃4| for atoms at velocity `v`, searched in `window`.
pub fn resonance_center(model: &ResponseModel, v: f64, window: (f64, f64)) -> Result<f64> {
    let f = |omega1: f64| model.chi4nl_ratio(&model.p_factors(omega1, v)).norm();
    let (x, value, _) = scan_then_refine_max(f, window.0, window.1, CENTER_SCAN_POINTS, 1e-12);
    if !value.is_finite() {
        return Err(Error::NonFinite("resonance centre"));
    }
    Ok(x)
}

/// Resonance centres for each velocity in `v_samples`.
pub fn resonance_centers(scheme: &SchemeConfig, fields: &FieldSet, v_samples: &[f64]) -> Result<Vec<f64>> {
    let v_max = v_samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let window = center_window(scheme, fields, v_max)?;
    let model = ResponseModel::new(scheme, fields)?;
    v_samples.par_iter().map(|&v| resonance_center(&model, v, window)).collect()
}

/// max − min of Ω1*(v) over `v_samples`, MHz.
pub fn center_spread(scheme: &SchemeConfig, fields: &FieldSet, v_samples: &[f64]) -> Result<f64> {
    let centers = resonance_centers(scheme, fields, v_samples)?;
    let (lo, hi) = centers
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| (lo.min(c), hi.max(c)));
    Ok(hi - lo)
}

/// Minimizes the centre spread over |G23−| ∈ [0.7, 1.3]·`report.solved_rabi` and
/// records the result in a copy of `report`.
pub fn refine_numeric(
    scheme: &SchemeConfig,
    fields: &FieldSet,
    report: &CompensationReport,
    v_samples: &[f64],
) -> Result<CompensationReport> {
    let g0 = report.solved_rabi;
    let (lo, hi) = (REFINE_LOWER * g0, REFINE_UPPER * g0);
    let mut failure = None;
    let m = golden_section(
        |g| match center_spread(scheme, &fields.with_control_rabi(g), v_samples) {
            Ok(s) => s,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        REFINE_TOLERANCE,
        200,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let edge = 2.0 * REFINE_TOLERANCE * g0;
    if m.x - lo <= edge || hi - m.x <= edge {
        return Err(Error::NoInteriorMinimum("resonance-centre spread"));
    }
    let mut out = report.clone();
    out.refined_rabi = Some(m.x);
    out.refined_spread = Some(m.value);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{fig1b_fields, fig1c_fields, Direction};

    #[test]
    fn bare_bracket_is_two_photon_coefficient() {
        let s = SchemeConfig::sodium_preset();
        let mut f = fig1b_fields(&s).without_control();
        f.e2.rabi = 0.0;
        let r = compensation_residual(&s, &f, 90_000.0);
        assert!((r.value - (1.0 / 661.0 - 1.0 / 746.0)).abs() < 1e-12);
        assert!((r.value - 1.724e-4).abs() < 5e-8);
    }

    #[test]
    fn preset_values_nearly_cancel() {
        let s = SchemeConfig::sodium_preset();
        let f = fig1b_fields(&s);
        let omega1 = df_probe_detuning(&s, &f, f.e2.detuning).unwrap();
        let r = compensation_residual(&s, &f, omega1);
        let k12 = 1.0 / 661.0 - 1.0 / 746.0;
        assert!((r.omega4m - 80_800.0).abs() < 400.0, "{}", r.omega4m);
        assert!(r.value.abs() < 0.05 * k12, "{}", r.value);
    }

    #[test]
    fn solves_both_presets() {
        let s = SchemeConfig::sodium_preset();
        let b = solve_control_rabi(&s, &fig1b_fields(&s)).unwrap();
        assert!((b.solved_rabi / 25_200.0 - 1.0).abs() < 0.2);
        assert!(b.bracket.abs() < 1e-3 * (1.0 / 661.0 - 1.0 / 746.0) * 1e3);
        assert!(b.iterations <= MAX_OUTER_ITERATIONS);
        let c = solve_control_rabi(&s, &fig1c_fields(&s)).unwrap();
        assert!((c.solved_rabi / 635.8 - 1.0).abs() < 0.2);
        assert!(!c.warnings.is_empty());
    }

    #[test]
    fn co_propagating_control_is_rejected() {
        let s = SchemeConfig::sodium_preset();
        let f = fig1b_fields(&s).with_control_direction(Direction::Forward);
        let e = solve_control_rabi(&s, &f).unwrap_err();
        assert!(matches!(e, Error::NoCompensationGeometry(_)));
        assert_eq!(e.exit_code(), 4);
    }

    #[test]
    fn sample_grid() {
        let v = default_velocity_samples(100.0);
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], -200.0);
        assert_eq!(v[4], 0.0);
        assert_eq!(v[8], 200.0);
    }
}
