use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineMetrics {
    /// MHz
    pub peak_position: f64,
    pub peak_value: f64,
    /// MHz
    pub hwhm: f64,
}

/// Peak position (three-point parabola), peak value and half width at half
/// maximum (linear interpolation of the crossings) of a sampled profile.
///
/// Fails when the maximum sits on the first or last sample, when the profile
/// does not drop to half maximum on both sides, or when another local maximum
/// above half of the global one lies outside the main lobe.
pub fn line_metrics(detunings: &[f64], profile: &[f64]) -> Result<LineMetrics> {
    if detunings.len() != profile.len() || profile.len() < 3 {
        return Err(Error::Config("line metrics need at least three matching samples".into()));
    }
    if profile.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFinite("line profile"));
    }
    let n = profile.len();
    let imax = profile
        .iter()
        .enumerate()
        .fold(0, |best, (i, &y)| if y > profile[best] { i } else { best });
    if imax == 0 || imax == n - 1 {
        return Err(Error::BoundaryPeak {
            position: detunings[imax],
        });
    }

    let (x0, x1, x2) = (detunings[imax - 1], detunings[imax], detunings[imax + 1]);
    let (y0, y1, y2) = (profile[imax - 1], profile[imax], profile[imax + 1]);
    let (peak_position, peak_value) = parabola_vertex((x0, y0), (x1, y1), (x2, y2));
    let half = 0.5 * peak_value;

    let mut left = imax;
    while left > 0 && profile[left] >= half {
        left -= 1;
    }
    let mut right = imax;
    while right < n - 1 && profile[right] >= half {
        right += 1;
    }
    if profile[left] >= half || profile[right] >= half {
        return Err(Error::NoHalfMaximum);
    }

    let mut others: Vec<f64> = (1..n - 1)
        .filter(|&i| i < left || i > right)
        .filter(|&i| profile[i] > 0.5 * profile[imax] && profile[i] >= profile[i - 1] && profile[i] >= profile[i + 1])
        .map(|i| detunings[i])
        .collect();
    if !others.is_empty() {
        others.push(detunings[imax]);
        others.sort_by(f64::total_cmp);
        return Err(Error::MultiModal { peaks: others });
    }

    let cross = |i: usize, j: usize| {
        let (xa, ya, xb, yb) = (detunings[i], profile[i], detunings[j], profile[j]);
        xa + (half - ya) * (xb - xa) / (yb - ya)
    };
    let lo = cross(left, left + 1);
    let hi = cross(right - 1, right);
    Ok(LineMetrics {
        peak_position,
        peak_value,
        hwhm: 0.5 * (hi - lo),
    })
}

fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> (f64, f64) {
    let (x0, y0) = a;
    let (x1, y1) = b;
    let (x2, y2) = c;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if !(curvature < 0.0) {
        return (x1, y1);
    }
    // y = y1 + s (x − x1) + curvature (x − x1)², s = slope at x1
    let slope = d01 + curvature * (x1 - x0);
    let dx = -slope / (2.0 * curvature);
    (x1 + dx, y1 + slope * dx + curvature * dx * dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn lorentzian_width() {
        let x = grid(-100.0, 100.0, 2001);
        let y: Vec<f64> = x.iter().map(|&d| 100.0 / (100.0 + (d - 3.3).powi(2))).collect();
        let m = line_metrics(&x, &y).unwrap();
        assert!((m.hwhm - 10.0).abs() < 0.1);
        assert!((m.peak_position - 3.3).abs() < 1e-2);
        assert_relative_eq!(m.peak_value, 1.0, max_relative = 1e-3);
    }

    #[test]
    fn parabola_is_exact_for_quadratics() {
        let (x, y) = parabola_vertex((0.0, 1.0), (1.0, 3.0), (3.0, 1.0));
        // y = 1 + 3x − x²
        assert_relative_eq!(x, 1.5, epsilon = 1e-12);
        assert_relative_eq!(y, 3.25, epsilon = 1e-12);
    }

    #[test]
    fn two_peaks_reported() {
        let x = grid(-100.0, 100.0, 1001);
        let y: Vec<f64> = x
            .iter()
            .map(|&d| 1.0 / (1.0 + ((d - 40.0) / 5.0).powi(2)) + 1.0 / (1.0 + ((d + 40.0) / 5.0).powi(2)))
            .collect();
        match line_metrics(&x, &y) {
            Err(Error::MultiModal { peaks }) => {
                assert_eq!(peaks.len(), 2);
                assert!((peaks[0] + 40.0).abs() < 0.5 && (peaks[1] - 40.0).abs() < 0.5);
            }
            other => panic!("expected multi-modal, got {other:?}"),
        }
    }

    #[test]
    fn boundary_peak() {
        let x = grid(0.0, 10.0, 11);
        let y: Vec<f64> = x.iter().map(|&d| -d).collect();
        assert!(matches!(line_metrics(&x, &y), Err(Error::BoundaryPeak { .. })));
    }

    #[test]
    fn no_half_maximum() {
        let x = grid(-1.0, 1.0, 21);
        let y: Vec<f64> = x.iter().map(|&d| 2.0 - d * d).collect();
        assert!(matches!(line_metrics(&x, &y), Err(Error::NoHalfMaximum)));
    }
}
