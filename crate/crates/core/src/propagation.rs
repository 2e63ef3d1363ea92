//! Absorption, phase mismatch and quantum conversion efficiency along the medium.
//!
//! Lengths are optical thicknesses α01·z, where α01 is the resonant fields-off
//! absorption index of the probe. Absorption indices and wave-number shifts are
//! in units of α01. The generated-wave envelope obeys
//!
//! dA4/dz = iσ̂·e^{−α1z/2}·e^{iΔk·z} − (α4/2)·A4,  A4(0) = 0,
//!
//! and the efficiency is η = (ω1/ω4)|A4|². [`qce_closed_form`] evaluates the
//! textbook expression (ω1/ω4)|σ̂|²|e^{−iΔKz} − 1|²e^{−α4z}/|ΔK|² with
//! ΔK = Δk − i(α4 − α1)/2. It coincides with the envelope solution only when
//! α1 = α4; in general η_closed = η_ode·e^{−(α4−α1)z}, which
//! [`Discrepancy`] quantifies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::doppler::{average_response, average_with_model, guarded_average, VelocityGrid};
use crate::error::{Error, Result};
use crate::ode::{integrate, Tolerance};
use crate::optimize::try_scan_then_refine_max;
use crate::response::{Response, ResponseModel, VelocityPole};
use crate::scheme::{doppler_shift, FieldSet, SchemeConfig, TransitionLabel};

/// Relative deviation above which closed form and envelope ODE are reported as disagreeing.
pub const AGREEMENT_TOLERANCE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionSet {
    pub alpha1: f64,
    pub alpha4: f64,
    pub dphase1: f64,
    pub dphase4: f64,
    /// Re⟨Γ01/P01⟩ with fields off on resonance.
    pub base1: f64,
    /// Re⟨Γ03/P03⟩ with fields off on resonance.
    pub base4: f64,
}

/// Resonant fields-off normalizers (Re⟨Γ01/P01⟩, Re⟨Γ03/P03⟩) at Ω = 0.
pub fn resonant_bases(scheme: &SchemeConfig, grid: &VelocityGrid) -> (f64, f64) {
    let k1 = scheme.inv_wavelength(TransitionLabel::T01);
    let k4 = scheme.generated_inv_wavelength();
    let base = |gamma: f64, k: f64| {
        let rate = doppler_shift(k, 1.0);
        let pole = VelocityPole {
            center: 0.0,
            width: gamma / rate,
        };
        let ([re], _) = guarded_average(grid, &[pole], |v| [(gamma / Complex64::new(gamma, -rate * v)).re]);
        re
    };
    (base(scheme.gamma(TransitionLabel::T01), k1), base(scheme.gamma(TransitionLabel::T03), k4))
}

/// α_j = α0j·Re⟨ratio_j⟩/base_j and dphase_j = −(α0j/2)·Im⟨ratio_j⟩/base_j.
pub fn absorption_set(scheme: &SchemeConfig, fields: &FieldSet, omega1: f64, grid: &VelocityGrid) -> Result<AbsorptionSet> {
    let model = ResponseModel::new(scheme, fields)?;
    let (base1, base4) = resonant_bases(scheme, grid);
    let chi1 = average_response(&model, grid, Response::Chi1, omega1)?.mean;
    let chi4 = average_response(&model, grid, Response::Chi4, omega1)?.mean;
    let (a01, a04) = (scheme.alpha01, scheme.alpha04());
    Ok(AbsorptionSet {
        alpha1: a01 * chi1.re / base1,
        alpha4: a04 * chi4.re / base4,
        dphase1: -0.5 * a01 * chi1.im / base1,
        dphase4: -0.5 * a04 * chi4.im / base4,
        base1,
        base4,
    })
}

/// ΔK = (dphase4 − dphase1) − i(α4 − α1)/2. The geometric mismatch vanishes for
/// collinear beams, and the strong fields see no linear absorption.
pub fn phase_mismatch(absorption: &AbsorptionSet) -> Complex64 {
    Complex64::new(
        absorption.dphase4 - absorption.dphase1,
        -0.5 * (absorption.alpha4 - absorption.alpha1),
    )
}

/// Normalized nonlinear drive σ̂ = √r·α01·Γ03/(2·base4)·G12·G23+·⟨1/D⟩, where
/// r = |d03|²/|d01|² and D is the dressed nonlinear denominator.
pub fn nonlinear_coupling(scheme: &SchemeConfig, fields: &FieldSet, omega1: f64, grid: &VelocityGrid) -> Result<Complex64> {
    let model = ResponseModel::new(scheme, fields)?;
    let (_, base4) = resonant_bases(scheme, grid);
    let (inv_d, _) = average_with_model(&model, grid, omega1, |v| model.inv_denominator(&model.p_factors(omega1, v)))?;
    let scale = scheme.dipole_ratio_sq.sqrt() * scheme.alpha01 * scheme.gamma(TransitionLabel::T03) / (2.0 * base4);
    Ok(scale * fields.g12() * fields.g23plus() * inv_d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Ode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConversionResult {
    /// α01·z samples.
    pub thickness: Vec<f64>,
    pub eta_q: Vec<f64>,
    pub delta_k: Complex64,
    pub coupling: Complex64,
    pub method: Method,
}

impl ConversionResult {
    /// (index, thickness, η) of the largest efficiency.
    pub fn maximum(&self) -> (usize, f64, f64) {
        let i = self
            .eta_q
            .iter()
            .enumerate()
            .fold(0, |best, (i, &e)| if e > self.eta_q[best] { i } else { best });
        (i, self.thickness[i], self.eta_q[i])
    }
}

/// (eˣ − 1)/x, with a series near the origin.
fn phi(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        1.0 + x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)))
    } else {
        (x.exp() - 1.0) / x
    }
}

/// η(z) = ratio·|σ̂|²·z²·|φ(−iΔKz)|²·e^{−α4z}, equal to
/// ratio·|σ̂|²|e^{−iΔKz} − 1|²e^{−α4z}/|ΔK|² and regular at ΔK = 0.
pub fn qce_closed_form(sigma: Complex64, dk: Complex64, alpha4: f64, ratio: f64, thickness: &[f64]) -> ConversionResult {
    let eta_q = thickness
        .iter()
        .map(|&z| {
            let amplitude = sigma * z * phi(-Complex64::i() * dk * z);
            ratio * amplitude.norm_sqr() * (-alpha4 * z).exp()
        })
        .collect();
    ConversionResult {
        thickness: thickness.to_vec(),
        eta_q,
        delta_k: dk,
        coupling: sigma,
        method: Method::ClosedForm,
    }
}

/// A4(z) from the envelope equation with initial amplitude `a0`.
pub fn integrate_envelope(
    sigma: Complex64,
    alpha1: f64,
    alpha4: f64,
    dk_real: f64,
    a0: Complex64,
    thickness: &[f64],
) -> Result<Vec<Complex64>> {
    let rhs = |z: f64, a: Complex64| {
        Complex64::i() * sigma * (-0.5 * alpha1 * z).exp() * Complex64::from_polar(1.0, dk_real * z) - 0.5 * alpha4 * a
    };
    let tol = Tolerance {
        rel: 1e-10,
        abs: 1e-13 * sigma.norm().max(a0.norm()).max(f64::MIN_POSITIVE),
    };
    integrate(rhs, 0.0, a0, thickness, tol)
}

/// η(z) = ratio·|A4(z)|² from the envelope equation with A4(0) = 0.
pub fn qce_ode(sigma: Complex64, alpha1: f64, alpha4: f64, dk_real: f64, ratio: f64, thickness: &[f64]) -> Result<ConversionResult> {
    let amplitudes = integrate_envelope(sigma, alpha1, alpha4, dk_real, Complex64::default(), thickness)?;
    Ok(ConversionResult {
        thickness: thickness.to_vec(),
        eta_q: amplitudes.iter().map(|a| ratio * a.norm_sqr()).collect(),
        delta_k: Complex64::new(dk_real, -0.5 * (alpha4 - alpha1)),
        coupling: sigma,
        method: Method::Ode,
    })
}

/// Comparison of the two efficiency routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    /// max over z > 0 of |η_closed − η_ode|/η_ode.
    pub max_relative: f64,
    /// Same after multiplying η_ode by e^{−(α4−α1)z}.
    pub residual_after_absorption_factor: f64,
    pub agree: bool,
}

pub fn compare_methods(closed: &ConversionResult, ode: &ConversionResult, alpha1: f64, alpha4: f64) -> Discrepancy {
    let mut max_relative = 0.0_f64;
    let mut residual = 0.0_f64;
    for ((&z, &c), &o) in closed.thickness.iter().zip(&closed.eta_q).zip(&ode.eta_q) {
        if o > 0.0 {
            max_relative = max_relative.max((c - o).abs() / o);
            let expected = o * (-(alpha4 - alpha1) * z).exp();
            residual = residual.max((c - expected).abs() / expected);
        }
    }
    Discrepancy {
        max_relative,
        residual_after_absorption_factor: residual,
        agree: max_relative <= AGREEMENT_TOLERANCE,
    }
}

/// `n` thickness samples on [0, z_max]; a single point when z_max = 0.
pub fn thickness_grid(z_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(z_max >= 0.0) || !z_max.is_finite() {
        return Err(Error::Config("z_max must be finite and non-negative".into()));
    }
    if z_max == 0.0 || n <= 1 {
        return Ok(vec![0.0]);
    }
    Ok((0..n).map(|i| z_max * i as f64 / (n - 1) as f64).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConversionScan {
    pub omega1: f64,
    pub absorption: AbsorptionSet,
    pub delta_k: Complex64,
    pub coupling: Complex64,
    pub closed: ConversionResult,
    pub ode: ConversionResult,
    pub discrepancy: Discrepancy,
}

/// Absorption, mismatch, coupling and both efficiency routes at probe detuning `omega1`.
pub fn conversion_scan(
    scheme: &SchemeConfig,
    fields: &FieldSet,
    omega1: f64,
    z_max: f64,
    n_z: usize,
    grid: &VelocityGrid,
) -> Result<ConversionScan> {
    let thickness = thickness_grid(z_max, n_z)?;
    let absorption = absorption_set(scheme, fields, omega1, grid)?;
    let delta_k = phase_mismatch(&absorption);
    let coupling = nonlinear_coupling(scheme, fields, omega1, grid)?;
    let ratio = scheme.photon_energy_ratio();
    let closed = qce_closed_form(coupling, delta_k, absorption.alpha4, ratio, &thickness);
    let ode = qce_ode(coupling, absorption.alpha1, absorption.alpha4, delta_k.re, ratio, &thickness)?;
    let discrepancy = compare_methods(&closed, &ode, absorption.alpha1, absorption.alpha4);
    Ok(ConversionScan {
        omega1,
        absorption,
        delta_k,
        coupling,
        closed,
        ode,
        discrepancy,
    })
}

/// Probe detuning maximizing |⟨χ̃4⟩| within `center ± half_width`.
pub fn optimal_probe_detuning(
    scheme: &SchemeConfig,
    fields: &FieldSet,
    grid: &VelocityGrid,
    center: f64,
    half_width: f64,
    points: usize,
) -> Result<f64> {
    let model = ResponseModel::new(scheme, fields)?;
    let (x, _, index) = try_scan_then_refine_max(
        |o| average_response(&model, grid, Response::Chi4nl, o).map(|p| p.mean.norm()),
        center - half_width,
        center + half_width,
        points,
        1e-12,
    )?;
    if index == 0 || index + 1 >= points.max(3) {
        return Err(Error::BoundaryPeak { position: x });
    }
    Ok(x)
}
