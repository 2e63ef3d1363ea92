//! Per-velocity response of the dressed four-level medium.
//!
//! In the lowest order in the weak fields (E1, E3+, E4) the density-matrix
//! equations become algebraic and every coherence is a ratio of products of the
//! complex factors `P = Γ + i(Ω − k·v)`. The strong fields E2 and E3− enter only
//! through the power-shift terms `|G|²/P`, which dress the Raman coherence
//! `P02 → P̃02 = P02 + |G12|²/P01 + |G23−|²/P03−`.
//!
//! All three susceptibilities are returned as dimensionless ratios to their
//! fields-off resonant values, so no dipole moments or densities appear here.
//!
//! Wave numbers are signed by propagation direction. For the counter-propagating
//! control (k3− < 0) the combinations below reduce to the familiar
//! `k4 + k3−`, `k1 − k2 − k3−` and `k4 + k3− + k2`.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{doppler_shift, FieldSet, SchemeConfig, TransitionLabel};

/// The complex frequency factors of one velocity group, MHz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PFactors {
    /// Γ01 + i(Ω1 − k1·v)
    pub p01: Complex64,
    /// Γ01 + i(Ω1− − k̃1−·v), Ω1− = Ω4 − Ω3− + Ω2
    pub p01m: Complex64,
    /// Γ02 + i(Ω1 − Ω2 − (k1 − k2)·v)
    pub p02: Complex64,
    /// Γ02 + i(Ω4 − Ω3− − (k4 − k3−)·v)
    pub p02m: Complex64,
    /// Γ03 + i(Ω4 − k4·v)
    pub p03: Complex64,
    /// Γ03 + i(Ω4− − (k1 − k2 + k3−)·v), Ω4− = Ω1 − Ω2 + Ω3−
    pub p03m: Complex64,
    /// P02 + |G12|²/P01 + |G23−|²/P03−
    pub p02tilde: Complex64,
    pub omega4: f64,
    pub omega4m: f64,
    pub omega1m: f64,
}

/// Pole of a single factor `Γ + i(Ω − k·v)` seen as a function of velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityPole {
    /// m/s
    pub center: f64,
    /// Half-width in velocity, m/s.
    pub width: f64,
}

/// Scheme and strong-field parameters prepared for repeated evaluation over (Ω1, v).
#[derive(Clone, Debug)]
pub struct ResponseModel {
    gamma01: f64,
    gamma02: f64,
    gamma03: f64,
    k1: f64,
    k2: f64,
    k3m: f64,
    k4: f64,
    omega2: f64,
    omega3p: f64,
    omega3m: f64,
    g12_sq: f64,
    g23m_sq: f64,
}

impl ResponseModel {
    pub fn new(scheme: &SchemeConfig, fields: &FieldSet) -> Result<Self> {
        use TransitionLabel::*;
        for label in TransitionLabel::ALL {
            if !(scheme.gamma(label) > 0.0) {
                return Err(Error::NonPositiveWidth(label.as_str()));
            }
        }
        if !(scheme.gamma02 > 0.0) {
            return Err(Error::NonPositiveWidth("02"));
        }
        Ok(ResponseModel {
            gamma01: scheme.gamma(T01),
            gamma02: scheme.gamma02,
            gamma03: scheme.gamma(T03),
            k1: fields.e1.wave_vector(),
            k2: fields.e2.wave_vector(),
            k3m: fields.e3minus.wave_vector(),
            k4: fields.e4.wave_vector(),
            omega2: fields.e2.detuning,
            omega3p: fields.e3plus.detuning,
            omega3m: fields.e3minus.detuning,
            g12_sq: fields.g12().powi(2),
            g23m_sq: fields.g23minus().powi(2),
        })
    }

    /// Generated-wave detuning Ω4 = Ω1 − Ω2 + Ω3+.
    pub fn omega4(&self, omega1: f64) -> f64 {
        omega1 - self.omega2 + self.omega3p
    }

    pub fn p_factors(&self, omega1: f64, v: f64) -> PFactors {
        let omega4 = self.omega4(omega1);
        let omega4m = omega1 - self.omega2 + self.omega3m;
        let omega1m = omega4 - self.omega3m + self.omega2;
        let factor = |gamma: f64, detuning: f64, k: f64| Complex64::new(gamma, detuning - doppler_shift(k, v));

        let p01 = factor(self.gamma01, omega1, self.k1);
        let p02 = factor(self.gamma02, omega1 - self.omega2, self.k1 - self.k2);
        let p02m = factor(self.gamma02, omega4 - self.omega3m, self.k4 - self.k3m);
        let p03 = factor(self.gamma03, omega4, self.k4);
        let p03m = factor(self.gamma03, omega4m, self.k1 - self.k2 + self.k3m);
        let p01m = factor(self.gamma01, omega1m, self.k4 - self.k3m + self.k2);
        let p02tilde = p02 + self.g12_sq / p01 + self.g23m_sq / p03m;
        PFactors {
            p01,
            p01m,
            p02,
            p02m,
            p03,
            p03m,
            p02tilde,
            omega4,
            omega4m,
            omega1m,
        }
    }

    /// χ1/χ10 = Γ01 (P03−P02 + |G23−|²) / (P01 P03− P̃02).
    ///
    /// Evaluated as `Γ01 N / (P01 N + |G12|² P03−)` with `N = P03−P02 + |G23−|²`,
    /// which is the same expression with P̃02 multiplied out.
    pub fn chi1_ratio(&self, p: &PFactors) -> Complex64 {
        let n = p.p03m * p.p02 + self.g23m_sq;
        self.gamma01 * n / (p.p01 * n + self.g12_sq * p.p03m)
    }

    /// χ4/χ30 = (Γ03/P03) (P01−P02− + |G12|²) / (P01−{P02− + |G23−|²/P03 + |G12|²/P01−}).
    pub fn chi4_ratio(&self, p: &PFactors) -> Complex64 {
        let m = p.p01m * p.p02m + self.g12_sq;
        (self.gamma03 / p.p03) * m / (m + self.g23m_sq * p.p01m / p.p03)
    }

    /// Nonlinear susceptibility normalized to its fields-off, resonant, v = 0 value:
    /// Γ01Γ02Γ03 / (P01 P̃02 (P03 + |G23−|²/P02−)).
    pub fn chi4nl_ratio(&self, p: &PFactors) -> Complex64 {
        self.gamma01 * self.gamma02 * self.gamma03 * self.inv_denominator(p)
    }

    /// 1/D with D = P01 P̃02 (P03 + |G23−|²/P02−), MHz⁻³.
    pub fn inv_denominator(&self, p: &PFactors) -> Complex64 {
        (p.p01 * p.p02tilde * (p.p03 + self.g23m_sq / p.p02m)).inv()
    }

    pub fn evaluate(&self, which: Response, omega1: f64, v: f64) -> Complex64 {
        let p = self.p_factors(omega1, v);
        match which {
            Response::Chi1 => self.chi1_ratio(&p),
            Response::Chi4 => self.chi4_ratio(&p),
            Response::Chi4nl => self.chi4nl_ratio(&p),
            Response::Chi4nlSq => Complex64::new(self.chi4nl_ratio(&p).norm_sqr(), 0.0),
        }
    }

    pub fn response_point(&self, omega1: f64, v: f64) -> ResponsePoint {
        let p = self.p_factors(omega1, v);
        ResponsePoint {
            chi1_ratio: self.chi1_ratio(&p),
            chi4_ratio: self.chi4_ratio(&p),
            chi4nl_ratio: self.chi4nl_ratio(&p),
            v,
            probe_detuning: omega1,
        }
    }

    /// Half-width and position of the dressed Raman resonance at v = 0.
    pub fn induced_resonance(&self, omega1: f64) -> InducedResonance {
        let p = self.p_factors(omega1, 0.0);
        let dressing = self.g12_sq / p.p01 + self.g23m_sq / p.p03m;
        InducedResonance {
            width: self.gamma02 + dressing.re,
            position: omega1 - self.omega2 + dressing.im,
        }
    }

    /// Velocity poles of the six elementary factors at probe detuning `omega1`.
    /// Factors whose Doppler coefficient vanishes have no pole and are skipped.
    pub fn velocity_poles(&self, omega1: f64) -> Vec<VelocityPole> {
        let p = self.p_factors(omega1, 0.0);
        [
            (p.p01, self.k1),
            (p.p02, self.k1 - self.k2),
            (p.p02m, self.k4 - self.k3m),
            (p.p03, self.k4),
            (p.p03m, self.k1 - self.k2 + self.k3m),
            (p.p01m, self.k4 - self.k3m + self.k2),
        ]
        .into_iter()
        .filter_map(|(factor, k)| {
            let rate = doppler_shift(k, 1.0);
            (rate != 0.0).then(|| VelocityPole {
                center: factor.im / rate,
                width: factor.re / rate.abs(),
            })
        })
        .collect()
    }

    pub fn gamma02(&self) -> f64 {
        self.gamma02
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedResonance {
    /// Γ̃02, MHz
    pub width: f64,
    /// Ω̃02, MHz; the dressed two-photon resonance sits where this vanishes.
    pub position: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResponsePoint {
    pub chi1_ratio: Complex64,
    pub chi4_ratio: Complex64,
    pub chi4nl_ratio: Complex64,
    pub v: f64,
    pub probe_detuning: f64,
}

/// Selects which response is averaged or exported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    Chi1,
    Chi4,
    Chi4nl,
    /// |χ̃4|², averaged incoherently.
    Chi4nlSq,
}

impl FromStr for Response {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chi1" => Ok(Response::Chi1),
            "chi4" => Ok(Response::Chi4),
            "chi4nl" => Ok(Response::Chi4nl),
            "chi4nl_sq" => Ok(Response::Chi4nlSq),
            other => Err(Error::InvalidSelector(other.to_string())),
        }
    }
}

impl Response {
    pub fn as_str(self) -> &'static str {
        match self {
            Response::Chi1 => "chi1",
            Response::Chi4 => "chi4",
            Response::Chi4nl => "chi4nl",
            Response::Chi4nlSq => "chi4nl_sq",
        }
    }
}

/// Convenience wrapper around [`ResponseModel::p_factors`].
pub fn p_factors(scheme: &SchemeConfig, fields: &FieldSet, omega1: f64, v: f64) -> Result<PFactors> {
    Ok(ResponseModel::new(scheme, fields)?.p_factors(omega1, v))
}

pub fn induced_resonance(scheme: &SchemeConfig, fields: &FieldSet, omega1: f64) -> Result<InducedResonance> {
    Ok(ResponseModel::new(scheme, fields)?.induced_resonance(omega1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{fig1b_fields, fig1c_fields, FieldParams};
    use approx::assert_relative_eq;

    fn scheme() -> SchemeConfig {
        SchemeConfig::sodium_preset()
    }

    fn fields(g12: f64, g23m: f64, omega2: f64, omega3p: f64, omega3m: f64) -> FieldSet {
        FieldSet::new(
            &scheme(),
            &FieldParams {
                g12,
                g23plus: 5.78,
                g23minus: g23m,
                omega2,
                omega3plus: omega3p,
                omega3minus: omega3m,
                e3minus_direction: crate::scheme::Direction::Backward,
            },
        )
        .unwrap()
    }

    #[test]
    fn p01_examples() {
        let f = fields(0.0, 0.0, 0.0, 0.0, 0.0);
        let p = p_factors(&scheme(), &f, 0.0, 0.0).unwrap();
        assert_eq!(p.p01, Complex64::new(20.69, 0.0));
        let p = p_factors(&scheme(), &f, 100.0, 0.0).unwrap();
        assert_eq!(p.p01, Complex64::new(20.69, 100.0));
        let p = p_factors(&scheme(), &f, 0.0, 100.0).unwrap();
        assert_relative_eq!(p.p01.im, -100.0 / 661.0e-9 / 1.0e6, max_relative = 1e-12);
        assert!((p.p01.im + 151.29).abs() < 0.01);
    }

    #[test]
    fn real_parts_are_widths() {
        let s = scheme();
        let f = fig1c_fields(&s);
        let p = p_factors(&s, &f, 2500.0, 321.0).unwrap();
        assert_eq!(p.p01.re, 20.69);
        assert_eq!(p.p01m.re, 20.69);
        assert_eq!(p.p02.re, s.gamma02);
        assert_eq!(p.p02m.re, s.gamma02);
        assert_eq!(p.p03.re, 15.92);
        assert_eq!(p.p03m.re, 15.92);
        let expected = p.p02 + 74.2_f64.powi(2) / p.p01 + 635.8_f64.powi(2) / p.p03m;
        assert_relative_eq!((p.p02tilde - expected).norm(), 0.0, epsilon = 1e-12);
        assert_eq!(p.omega4, 2500.0 - 2300.0 - 1960.0);
        assert_eq!(p.omega4m, 2500.0 - 2300.0 + 1830.0);
    }

    #[test]
    fn rejects_non_positive_width() {
        let mut s = scheme();
        s.gamma02 = 0.0;
        assert!(matches!(
            p_factors(&s, &fig1b_fields(&s), 0.0, 0.0),
            Err(Error::NonPositiveWidth("02"))
        ));
    }

    #[test]
    fn fields_off_resonant_values_are_unity() {
        let s = scheme();
        let m = ResponseModel::new(&s, &fields(0.0, 0.0, 0.0, 0.0, 0.0)).unwrap();
        let r = m.response_point(0.0, 0.0);
        assert_relative_eq!((r.chi1_ratio - 1.0).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!((r.chi4_ratio - 1.0).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!((r.chi4nl_ratio - 1.0).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn chi4_single_lorentzian() {
        let s = scheme();
        // Ω4 = Ω1 − Ω2 + Ω3+ = 50
        let m = ResponseModel::new(&s, &fields(0.0, 0.0, 0.0, 50.0, 0.0)).unwrap();
        let got = m.evaluate(Response::Chi4, 0.0, 0.0);
        let want = 15.92 / Complex64::new(15.92, 50.0);
        assert_relative_eq!((got - want).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn chi1_raman_saturation_closed_form() {
        let s = scheme();
        let m = ResponseModel::new(&s, &fields(74.2, 0.0, 0.0, 0.0, 0.0)).unwrap();
        let got = m.evaluate(Response::Chi1, 0.0, 0.0);
        let want = 20.69 * 2.38 / (20.69 * 2.38 + 74.2 * 74.2);
        assert_relative_eq!(got.re, want, max_relative = 1e-12);
        assert!(got.im.abs() < 1e-15);
        assert!((got.re - 0.00887).abs() < 5e-5);
    }

    #[test]
    fn chi4nl_decays_in_far_wing() {
        let s = scheme();
        let m = ResponseModel::new(&s, &fields(0.0, 0.0, 0.0, 0.0, 0.0)).unwrap();
        let mut last = f64::INFINITY;
        for step in 0..20 {
            let detuning = 10.0 * 2f64.powi(step);
            let value = m.evaluate(Response::Chi4nl, detuning, 0.0).norm();
            assert!(value < last);
            last = value;
        }
        assert!(last < 1e-12);
    }

    #[test]
    fn induced_resonance_limits() {
        let s = scheme();
        let r = induced_resonance(&s, &fields(0.0, 0.0, 300.0, 0.0, 0.0), 120.0).unwrap();
        assert_eq!(r.width, s.gamma02);
        assert_eq!(r.position, 120.0 - 300.0);

        // control-field ac-Stark shift: −|G23−|²/Ω4− with Ω4− = Ω3− at Ω1 = Ω2
        let f = fields(0.0, 25_200.0, 92_300.0, -7_300.0, 73_200.0);
        let r = induced_resonance(&s, &f, 92_300.0).unwrap();
        assert!((r.position + 25_200.0f64.powi(2) / 73_200.0).abs() < 0.01);
        assert!((r.position / 1000.0 + 8.68).abs() < 0.01);

        // drive-field shift alone is a fraction of a MHz
        let f = fields(128.5, 0.0, 92_000.0, 0.0, 0.0);
        let r = induced_resonance(&s, &f, 92_000.0).unwrap();
        assert!((r.position + 128.5f64.powi(2) / 92_000.0).abs() < 1e-6);
        assert!((r.position.abs() - 0.18).abs() < 0.005);
    }

    #[test]
    fn selector_parsing() {
        assert_eq!("chi4nl_sq".parse::<Response>().unwrap(), Response::Chi4nlSq);
        assert!(matches!("chi2".parse::<Response>(), Err(Error::InvalidSelector(_))));
    }

    #[test]
    fn poles_match_factor_zeros() {
        let s = scheme();
        let m = ResponseModel::new(&s, &fig1b_fields(&s)).unwrap();
        for pole in m.velocity_poles(92_400.0) {
            assert!(pole.width > 0.0);
        }
        let two_photon = m.velocity_poles(92_400.0)[1];
        let p = m.p_factors(92_400.0, two_photon.center);
        assert!(p.p02.im.abs() < 1e-9);
        assert_relative_eq!(two_photon.width, 2.38 / (1.0e3 * (1.0 / 661.0 - 1.0 / 746.0)), max_relative = 1e-12);
    }
}
