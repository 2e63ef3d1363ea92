//! Level scheme, field roles and unit conventions.
//!
//! Four levels are coupled in a Raman four-wave-mixing configuration: the weak
//! probe E1 drives 0→1, the strong drive E2 couples 1→2, E3 couples 2→3 and the
//! generated wave E4 is emitted on 3→0, so ω4 = ω1 − ω2 + ω3+. The E3 radiation
//! has a weak co-propagating part E3+ that takes part in the mixing and a strong
//! counter-propagating control part E3− that only dresses the levels. Only level
//! 0 is populated.
//!
//! Units used throughout the crate:
//!
//! * detunings, half-widths and Rabi frequencies are ordinary frequencies in MHz;
//! * velocities are in m/s;
//! * wave numbers are inverse wavelengths in nm⁻¹, so the Doppler shift of a wave
//!   with signed wave number `k` seen by an atom moving at `v` is
//!   [`doppler_shift`]`(k, v) = 1e3 · k · v` MHz.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// MHz of Doppler shift per (m/s · nm⁻¹).
pub const DOPPLER_MHZ_PER_MS_INV_NM: f64 = 1.0e3;

/// Tolerance of the pairwise width identity Γ01 + Γ23 = Γ12 + Γ03, MHz.
pub const WIDTH_SUM_TOLERANCE: f64 = 0.02;

/// Doppler HWHM of the sodium-dimer transitions 01, 12, 23, 03 as tabulated for the preset, MHz.
pub const NA2_DOPPLER_HWHM_MHZ: [f64; 4] = [678.0, 601.0, 873.0, 948.0];

/// Doppler shift in MHz of a wave with signed inverse wavelength `k` (nm⁻¹) for velocity `v` (m/s).
#[inline]
pub fn doppler_shift(k: f64, v: f64) -> f64 {
    DOPPLER_MHZ_PER_MS_INV_NM * k * v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransitionLabel {
    #[serde(rename = "01")]
    T01,
    #[serde(rename = "12")]
    T12,
    #[serde(rename = "23")]
    T23,
    #[serde(rename = "03")]
    T03,
}

impl TransitionLabel {
    pub const ALL: [TransitionLabel; 4] = [Self::T01, Self::T12, Self::T23, Self::T03];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::T01 => "01",
            Self::T12 => "12",
            Self::T23 => "23",
            Self::T03 => "03",
        }
    }

    fn index(self) -> usize {
        match self {
            Self::T01 => 0,
            Self::T12 => 1,
            Self::T23 => 2,
            Self::T03 => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transition {
    pub label: TransitionLabel,
    /// nm
    pub wavelength: f64,
    /// Homogeneous half-width, MHz.
    pub gamma: f64,
}

impl Transition {
    pub fn inv_wavelength(&self) -> f64 {
        1.0 / self.wavelength
    }

    /// Doppler HWHM in MHz for thermal velocity `u`: (u/λ)·√ln2.
    pub fn doppler_hwhm(&self, u: f64) -> f64 {
        doppler_shift(self.inv_wavelength(), u) * std::f64::consts::LN_2.sqrt()
    }
}

/// Medium description: transitions, thermal velocity and the absorption scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    /// Ordered 01, 12, 23, 03.
    pub transitions: [Transition; 4],
    /// Most-probable speed along z, m/s.
    pub u: f64,
    /// Raman coherence half-width Γ02, MHz.
    pub gamma02: f64,
    /// |d03|² / |d01|².
    #[serde(default = "one")]
    pub dipole_ratio_sq: f64,
    /// Fields-off resonant absorption coefficient at ω01; the unit of optical thickness.
    #[serde(default = "one")]
    pub alpha01: f64,
}

fn one() -> f64 {
    1.0
}

/// Level decay rates γ_i implied by Γ_ij = (γ_i + γ_j)/2 with γ0 = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelWidths {
    pub gamma: [f64; 4],
}

impl LevelWidths {
    /// Solves γ0 = 0, Γ01 = γ1/2, Γ03 = γ3/2, Γ23 = (γ2+γ3)/2.
    pub fn from_scheme(scheme: &SchemeConfig) -> Self {
        let g1 = 2.0 * scheme.gamma(TransitionLabel::T01);
        let g3 = 2.0 * scheme.gamma(TransitionLabel::T03);
        let g2 = 2.0 * scheme.gamma(TransitionLabel::T23) - g3;
        LevelWidths {
            gamma: [0.0, g1, g2, g3],
        }
    }

    pub fn half_width(&self, i: usize, j: usize) -> f64 {
        0.5 * (self.gamma[i] + self.gamma[j])
    }
}

impl SchemeConfig {
    /// Sodium-dimer model: λ = 661/746/514/473 nm, Γ = 20.69/23.08/18.30/15.92 MHz,
    /// thermal velocity fixed by the 678 MHz Doppler HWHM of the 661 nm line.
    pub fn sodium_preset() -> Self {
        let transitions = [
            Transition {
                label: TransitionLabel::T01,
                wavelength: 661.0,
                gamma: 20.69,
            },
            Transition {
                label: TransitionLabel::T12,
                wavelength: 746.0,
                gamma: 23.08,
            },
            Transition {
                label: TransitionLabel::T23,
                wavelength: 514.0,
                gamma: 18.30,
            },
            Transition {
                label: TransitionLabel::T03,
                wavelength: 473.0,
                gamma: 15.92,
            },
        ];
        let u = NA2_DOPPLER_HWHM_MHZ[0] * transitions[0].wavelength
            / std::f64::consts::LN_2.sqrt()
            / DOPPLER_MHZ_PER_MS_INV_NM;
        let mut scheme = SchemeConfig {
            transitions,
            u,
            gamma02: 0.0,
            dipole_ratio_sq: 1.0,
            alpha01: 1.0,
        };
        let levels = LevelWidths::from_scheme(&scheme);
        scheme.gamma02 = levels.half_width(0, 2);
        scheme
    }

    pub fn validate(&self) -> Result<()> {
        for (t, expected) in self.transitions.iter().zip(TransitionLabel::ALL) {
            if t.label != expected {
                return Err(Error::Config(format!(
                    "transitions must be ordered 01, 12, 23, 03; found {} in slot {}",
                    t.label.as_str(),
                    expected.as_str()
                )));
            }
            if !(t.wavelength > 0.0) {
                return Err(Error::Config(format!(
                    "wavelength of transition {} must be positive",
                    t.label.as_str()
                )));
            }
            if !(t.gamma > 0.0) {
                return Err(Error::NonPositiveWidth(t.label.as_str()));
            }
        }
        if !(self.gamma02 > 0.0) {
            return Err(Error::NonPositiveWidth("02"));
        }
        if !(self.u > 0.0) {
            return Err(Error::Config("thermal velocity `u` must be positive".into()));
        }
        if !(self.dipole_ratio_sq > 0.0) {
            return Err(Error::Config("`dipole_ratio_sq` must be positive".into()));
        }
        if !(self.alpha01 > 0.0) {
            return Err(Error::Config("`alpha01` must be positive".into()));
        }
        if self.width_mismatch().abs() > WIDTH_SUM_TOLERANCE {
            return Err(Error::Config(format!(
                "half-widths violate Γ01+Γ23 = Γ12+Γ03 by {:.4} MHz",
                self.width_mismatch()
            )));
        }
        Ok(())
    }

    pub fn transition(&self, label: TransitionLabel) -> &Transition {
        &self.transitions[label.index()]
    }

    pub fn gamma(&self, label: TransitionLabel) -> f64 {
        self.transition(label).gamma
    }

    pub fn inv_wavelength(&self, label: TransitionLabel) -> f64 {
        self.transition(label).inv_wavelength()
    }

    pub fn doppler_hwhm(&self, label: TransitionLabel) -> f64 {
        self.transition(label).doppler_hwhm(self.u)
    }

    /// Γ01 + Γ23 − (Γ12 + Γ03), MHz.
    pub fn width_mismatch(&self) -> f64 {
        use TransitionLabel::*;
        self.gamma(T01) + self.gamma(T23) - self.gamma(T12) - self.gamma(T03)
    }

    /// Inverse wavelength of the generated wave from 1/λ01 − 1/λ12 + 1/λ23; the tabulated
    /// λ03 is only used for its width.
    pub fn generated_inv_wavelength(&self) -> f64 {
        use TransitionLabel::*;
        self.inv_wavelength(T01) - self.inv_wavelength(T12) + self.inv_wavelength(T23)
    }

    /// Doppler HWHM of the generated wave, MHz.
    pub fn generated_doppler_hwhm(&self) -> f64 {
        doppler_shift(self.generated_inv_wavelength(), self.u) * std::f64::consts::LN_2.sqrt()
    }

    /// ω1/ω4 = λ4/λ1.
    pub fn photon_energy_ratio(&self) -> f64 {
        self.inv_wavelength(TransitionLabel::T01) / self.generated_inv_wavelength()
    }

    /// Resonant fields-off absorption coefficient at ω03.
    pub fn alpha04(&self) -> f64 {
        self.alpha01 * self.dipole_ratio_sq
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldRole {
    E1,
    E2,
    E3Plus,
    E3Minus,
    E4,
}

/// Propagation direction relative to the probe E1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

impl TryFrom<i8> for Direction {
    type Error = String;

    fn try_from(value: i8) -> std::result::Result<Self, Self::Error> {
        match value {
            1 => Ok(Direction::Forward),
            -1 => Ok(Direction::Backward),
            other => Err(format!("direction must be +1 or -1, got {other}")),
        }
    }
}

impl From<Direction> for i8 {
    fn from(d: Direction) -> i8 {
        match d {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub role: FieldRole,
    /// Rabi frequency magnitude, MHz.
    pub rabi: f64,
    /// Detuning from the coupled transition, MHz.
    pub detuning: f64,
    pub direction: Direction,
    /// nm⁻¹
    pub inv_wavelength: f64,
}

impl Field {
    /// Signed wave number (nm⁻¹).
    pub fn wave_vector(&self) -> f64 {
        self.direction.sign() * self.inv_wavelength
    }
}

/// User-facing field parameters; the scheme supplies the wavelengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldParams {
    /// G12 of the strong Raman drive E2, MHz.
    pub g12: f64,
    /// G23+ of the weak FWM wave E3+, MHz.
    pub g23plus: f64,
    /// G23− of the counter-propagating control E3−, MHz.
    #[serde(default)]
    pub g23minus: f64,
    pub omega2: f64,
    pub omega3plus: f64,
    pub omega3minus: f64,
    #[serde(default = "backward")]
    pub e3minus_direction: Direction,
}

fn backward() -> Direction {
    Direction::Backward
}

/// The five wave roles. The probe E1 and generated E4 are weak: their Rabi
/// frequencies cancel out of every normalized quantity and are stored as zero.
/// The probe detuning Ω1 is scanned and Ω4 = Ω1 − Ω2 + Ω3+ is derived, so both
/// detunings are kept at zero here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSet {
    pub e1: Field,
    pub e2: Field,
    pub e3plus: Field,
    pub e3minus: Field,
    pub e4: Field,
}

impl FieldSet {
    pub fn new(scheme: &SchemeConfig, p: &FieldParams) -> Result<Self> {
        use TransitionLabel::*;
        for (name, value) in [("g12", p.g12), ("g23plus", p.g23plus), ("g23minus", p.g23minus)] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::Config(format!("`{name}` must be a finite non-negative Rabi frequency")));
            }
        }
        for (name, value) in [("omega2", p.omega2), ("omega3plus", p.omega3plus), ("omega3minus", p.omega3minus)] {
            if !value.is_finite() {
                return Err(Error::Config(format!("`{name}` must be finite")));
            }
        }
        let field = |role, rabi, detuning, direction, inv_wavelength| Field {
            role,
            rabi,
            detuning,
            direction,
            inv_wavelength,
        };
        let k23 = scheme.inv_wavelength(T23);
        Ok(FieldSet {
            e1: field(FieldRole::E1, 0.0, 0.0, Direction::Forward, scheme.inv_wavelength(T01)),
            e2: field(FieldRole::E2, p.g12, p.omega2, Direction::Forward, scheme.inv_wavelength(T12)),
            e3plus: field(FieldRole::E3Plus, p.g23plus, p.omega3plus, Direction::Forward, k23),
            e3minus: field(FieldRole::E3Minus, p.g23minus, p.omega3minus, p.e3minus_direction, k23),
            e4: field(FieldRole::E4, 0.0, 0.0, Direction::Forward, scheme.generated_inv_wavelength()),
        })
    }

    pub fn params(&self) -> FieldParams {
        FieldParams {
            g12: self.g12(),
            g23plus: self.g23plus(),
            g23minus: self.g23minus(),
            omega2: self.e2.detuning,
            omega3plus: self.e3plus.detuning,
            omega3minus: self.e3minus.detuning,
            e3minus_direction: self.e3minus.direction,
        }
    }

    pub fn g12(&self) -> f64 {
        self.e2.rabi
    }

    pub fn g23plus(&self) -> f64 {
        self.e3plus.rabi
    }

    pub fn g23minus(&self) -> f64 {
        self.e3minus.rabi
    }

    pub fn with_control_rabi(&self, g23minus: f64) -> Self {
        let mut out = self.clone();
        out.e3minus.rabi = g23minus;
        out
    }

    /// Same configuration with E3− switched off.
    pub fn without_control(&self) -> Self {
        self.with_control_rabi(0.0)
    }

    pub fn with_control_direction(&self, direction: Direction) -> Self {
        let mut out = self.clone();
        out.e3minus.direction = direction;
        out
    }
}

/// `fig1b` preset: far-detuned drive, strong control.
pub fn fig1b_fields(scheme: &SchemeConfig) -> FieldSet {
    FieldSet::new(
        scheme,
        &FieldParams {
            g12: 128.5,
            g23plus: 5.78,
            g23minus: 25_200.0,
            omega2: 92_300.0,
            omega3plus: -7_300.0,
            omega3minus: 73_200.0,
            e3minus_direction: Direction::Backward,
        },
    )
    .expect("preset parameters are valid")
}

/// `fig1c` preset: drive tuned closer to the intermediate resonances.
pub fn fig1c_fields(scheme: &SchemeConfig) -> FieldSet {
    FieldSet::new(
        scheme,
        &FieldParams {
            g12: 74.2,
            g23plus: 5.78,
            g23minus: 635.8,
            omega2: 2_300.0,
            omega3plus: -1_960.0,
            omega3minus: 1_830.0,
            e3minus_direction: Direction::Backward,
        },
    )
    .expect("preset parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn preset_constants() {
        let s = SchemeConfig::sodium_preset();
        assert_eq!(s.gamma(TransitionLabel::T01), 20.69);
        assert_eq!(s.transition(TransitionLabel::T01).wavelength, 661.0);
        // 0.678 GHz · 661 nm / √ln2
        assert_relative_eq!(s.u, 678.0e6 * 661.0e-9 / 0.832_554_611_157_697_7, max_relative = 1e-12);
        assert!((s.u - 538.3).abs() < 0.05);
        assert_relative_eq!(s.gamma02, 2.38, epsilon = 1e-12);
        assert_eq!(s.dipole_ratio_sq, 1.0);
        assert_eq!(s.alpha01, 1.0);
        s.validate().unwrap();
    }

    #[test]
    fn preset_is_pure() {
        assert_eq!(SchemeConfig::sodium_preset(), SchemeConfig::sodium_preset());
    }

    #[test]
    fn level_decomposition_reproduces_gamma12() {
        let s = SchemeConfig::sodium_preset();
        let levels = LevelWidths::from_scheme(&s);
        assert_relative_eq!(levels.half_width(1, 2), 23.07, epsilon = 1e-9);
        assert!((levels.half_width(1, 2) - s.gamma(TransitionLabel::T12)).abs() <= WIDTH_SUM_TOLERANCE);
    }

    #[test]
    fn doppler_widths_share_one_velocity() {
        let s = SchemeConfig::sodium_preset();
        let c0 = s.doppler_hwhm(TransitionLabel::T01) * s.transition(TransitionLabel::T01).wavelength;
        for (label, tabulated) in TransitionLabel::ALL.into_iter().zip(NA2_DOPPLER_HWHM_MHZ) {
            let t = s.transition(label);
            assert_relative_eq!(t.doppler_hwhm(s.u) * t.wavelength, c0, max_relative = 1e-12);
            assert!((t.doppler_hwhm(s.u) / tabulated - 1.0).abs() < 0.005, "{label:?}");
        }
    }

    #[test]
    fn generated_wave_obeys_frequency_conservation() {
        let s = SchemeConfig::sodium_preset();
        let k4 = s.generated_inv_wavelength();
        assert!((k4 - 1.0 / 473.0).abs() < 4e-6);
        assert!((1.0 / k4 - 472.165).abs() < 1e-3);
    }

    #[test]
    fn field_presets() {
        let s = SchemeConfig::sodium_preset();
        let b = fig1b_fields(&s);
        let c = fig1c_fields(&s);
        assert_eq!(b.g23plus(), 5.78);
        assert_eq!(c.g23plus(), 5.78);
        assert_eq!(c.g23minus(), 635.8);
        assert_eq!(b.e3minus.direction.sign(), -1.0);
        for f in [&b.e1, &b.e2, &b.e3plus, &b.e4] {
            assert_eq!(f.direction, Direction::Forward);
        }
    }

    #[test]
    fn rejects_bad_widths() {
        let mut s = SchemeConfig::sodium_preset();
        s.transitions[0].gamma = 0.0;
        assert!(matches!(s.validate(), Err(Error::NonPositiveWidth("01"))));
        let mut s = SchemeConfig::sodium_preset();
        s.transitions[1].gamma += 1.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn direction_serde() {
        let d: Direction = serde_json::from_str("-1").unwrap();
        assert_eq!(d, Direction::Backward);
        assert!(serde_json::from_str::<Direction>("2").is_err());
    }
}
