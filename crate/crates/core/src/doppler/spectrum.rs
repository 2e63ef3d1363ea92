use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{guarded_average, GuardReport, QuadratureUsed, VelocityGrid};
use crate::error::{Error, Result};
use crate::response::{Response, ResponseModel, VelocityPole};
use crate::scheme::{FieldSet, SchemeConfig};

/// Sampled complex response versus probe detuning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpectrum {
    /// Ω1 samples, MHz, strictly increasing.
    pub detunings: Vec<f64>,
    pub values: Vec<Complex64>,
    pub label: String,
}

impl ComplexSpectrum {
    pub fn new(detunings: Vec<f64>, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if detunings.len() != values.len() {
            return Err(Error::Config(format!(
                "spectrum has {} detunings but {} values",
                detunings.len(),
                values.len()
            )));
        }
        if detunings.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("spectrum detunings must be strictly increasing".into()));
        }
        Ok(ComplexSpectrum {
            detunings,
            values,
            label: label.into(),
        })
    }

    pub fn abs2(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    /// CSV with columns `detuning_MHz, re, im, abs2`, preceded by `#` comment lines.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<()> {
        for line in comments {
            writeln!(out, "# {line}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["detuning_MHz", "re", "im", "abs2"])?;
        for (d, z) in self.detunings.iter().zip(&self.values) {
            writer.serialize((d, z.re, z.im, z.norm_sqr()))?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// `points` evenly spaced detunings covering `center ± span/2`.
pub fn detuning_range(center: f64, span: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::Config("detuning range must contain at least one point".into()));
    }
    if points == 1 {
        return Ok(vec![center]);
    }
    if !(span > 0.0) {
        return Err(Error::Config("detuning span must be positive".into()));
    }
    let start = center - 0.5 * span;
    let step = span / (points - 1) as f64;
    Ok((0..points).map(|i| start + step * i as f64).collect())
}

/// Velocity-averaged response at one probe detuning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AveragedPoint {
    /// ⟨r⟩, the coherent average.
    pub mean: Complex64,
    /// ⟨|r|²⟩
    pub mean_abs2: f64,
    pub guard: GuardReport,
}

fn poles_for(model: &ResponseModel, which: Response, omega1: f64) -> Vec<VelocityPole> {
    let all = model.velocity_poles(omega1);
    // order: p01, p02, p02m, p03, p03m, p01m
    let pick: &[usize] = match which {
        Response::Chi1 => &[0, 1, 4],
        Response::Chi4 => &[2, 3, 5],
        Response::Chi4nl | Response::Chi4nlSq => &[0, 1, 2, 3, 4],
    };
    if all.len() < 6 {
        return all;
    }
    pick.iter().map(|&i| all[i]).collect()
}

/// Guarded Maxwell average of one response at probe detuning `omega1`.
pub fn average_response(model: &ResponseModel, grid: &VelocityGrid, which: Response, omega1: f64) -> Result<AveragedPoint> {
    let poles = poles_for(model, which, omega1);
    let selector = match which {
        Response::Chi4nlSq => Response::Chi4nl,
        other => other,
    };
    let ([re, im, abs2], guard) = guarded_average(grid, &poles, |v| {
        let z = model.evaluate(selector, omega1, v);
        [z.re, z.im, z.norm_sqr()]
    });
    if !(re.is_finite() && im.is_finite() && abs2.is_finite()) {
        return Err(Error::NonFinite("velocity average"));
    }
    Ok(AveragedPoint {
        mean: Complex64::new(re, im),
        mean_abs2: abs2,
        guard,
    })
}

/// Guarded Maxwell average of an arbitrary integrand built from the model, with
/// the poles of the full nonlinear denominator used for the guard.
pub fn average_with_model<F>(model: &ResponseModel, grid: &VelocityGrid, omega1: f64, f: F) -> Result<(Complex64, GuardReport)>
where
    F: Fn(f64) -> Complex64,
{
    let poles = poles_for(model, Response::Chi4nl, omega1);
    let ([re, im], guard) = guarded_average(grid, &poles, |v| {
        let z = f(v);
        [z.re, z.im]
    });
    if !(re.is_finite() && im.is_finite()) {
        return Err(Error::NonFinite("velocity average"));
    }
    Ok((Complex64::new(re, im), guard))
}

/// Coherent and incoherent velocity-averaged spectra of one response.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedSpectrum {
    pub which: Response,
    /// ⟨r⟩ for each detuning (for `chi4nl_sq` this is ⟨χ̃4⟩).
    pub mean: ComplexSpectrum,
    /// ⟨|r|²⟩ for each detuning.
    pub mean_abs2: Vec<f64>,
    /// Number of detunings where the narrow-feature guard tripped.
    pub flagged_points: usize,
    /// Number of detunings evaluated with the adaptive fallback.
    pub fallback_points: usize,
    /// Narrowest velocity half-width seen by the guard, m/s.
    pub narrowest_width: f64,
}

impl AveragedSpectrum {
    pub fn flagged(&self) -> bool {
        self.flagged_points > 0
    }

    /// The spectrum the selector asks for: ⟨|χ̃4|²⟩ for `chi4nl_sq`, ⟨r⟩ otherwise.
    pub fn primary(&self) -> ComplexSpectrum {
        match self.which {
            Response::Chi4nlSq => ComplexSpectrum {
                detunings: self.mean.detunings.clone(),
                values: self.mean_abs2.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                label: "<|chi4nl|^2>".into(),
            },
            _ => self.mean.clone(),
        }
    }
}

/// Velocity-averaged spectrum over the probe detunings `omega1`.
pub fn averaged_spectrum(
    scheme: &SchemeConfig,
    fields: &FieldSet,
    omega1: &[f64],
    grid: &VelocityGrid,
    which: Response,
) -> Result<AveragedSpectrum> {
    if omega1.is_empty() {
        return Err(Error::Config("detuning range is empty".into()));
    }
    let model = ResponseModel::new(scheme, fields)?;
    let points: Vec<AveragedPoint> = omega1
        .par_iter()
        .map(|&o| average_response(&model, grid, which, o))
        .collect::<Result<_>>()?;
    let mean = ComplexSpectrum::new(
        omega1.to_vec(),
        points.iter().map(|p| p.mean).collect(),
        format!("<{}>", which.as_str()),
    )?;
    Ok(AveragedSpectrum {
        which,
        mean,
        mean_abs2: points.iter().map(|p| p.mean_abs2).collect(),
        flagged_points: points.iter().filter(|p| p.guard.flagged).count(),
        fallback_points: points
            .iter()
            .filter(|p| p.guard.used == QuadratureUsed::AdaptiveKronrod)
            .count(),
        narrowest_width: points.iter().map(|p| p.guard.narrowest_width).fold(f64::INFINITY, f64::min),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doppler::quadrature::{make_grid, QuadratureKind};

    #[test]
    fn spectrum_validation() {
        assert!(ComplexSpectrum::new(vec![0.0, 1.0], vec![Complex64::default()], "x").is_err());
        assert!(ComplexSpectrum::new(vec![1.0, 1.0], vec![Complex64::default(); 2], "x").is_err());
        assert!(ComplexSpectrum::new(vec![0.0, 1.0], vec![Complex64::default(); 2], "x").is_ok());
    }

    #[test]
    fn range_shapes() {
        assert_eq!(detuning_range(5.0, 0.0, 1).unwrap(), vec![5.0]);
        let r = detuning_range(0.0, 10.0, 11).unwrap();
        assert_eq!(r.len(), 11);
        assert_eq!(r[0], -5.0);
        assert_eq!(r[10], 5.0);
        assert!(detuning_range(0.0, 10.0, 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let s = ComplexSpectrum::new(vec![-1.0, 1.0], vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, 0.0)], "t").unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, &["params".to_string()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# params");
        assert_eq!(lines[1], "detuning_MHz,re,im,abs2");
        assert_eq!(lines[2], "-1.0,1.0,2.0,5.0");
    }

    #[test]
    fn empty_range_rejected() {
        let s = SchemeConfig::sodium_preset();
        let f = crate::scheme::fig1b_fields(&s);
        let g = make_grid(s.u, 16, QuadratureKind::GaussHermite).unwrap();
        assert!(averaged_spectrum(&s, &f, &[], &g, Response::Chi1).is_err());
    }
}
