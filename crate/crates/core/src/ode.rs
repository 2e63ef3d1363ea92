//! Adaptive Dormand–Prince 5(4) integrator for a complex scalar ODE.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (same as the last row of `A`).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// Fourth-order embedded weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-10, abs: 1e-300 }
    }
}

/// Integrates `y' = f(z, y)` from `(z0, y0)` and returns `y` at each of the
/// non-decreasing `targets` (all ≥ `z0`).
pub fn integrate<F>(f: F, z0: f64, y0: Complex64, targets: &[f64], tol: Tolerance) -> Result<Vec<Complex64>>
where
    F: Fn(f64, Complex64) -> Complex64,
{
    if targets.windows(2).any(|w| w[1] < w[0]) || targets.first().is_some_and(|&t| t < z0) {
        return Err(Error::Config("ODE output points must be non-decreasing and start at or after z0".into()));
    }
    let mut out = Vec::with_capacity(targets.len());
    let (mut z, mut y) = (z0, y0);
    let span = targets.last().map_or(0.0, |&t| t - z0);
    let mut h = if span > 0.0 { span / 100.0 } else { 0.0 };
    let mut k1 = f(z, y);

    for &target in targets {
        while z < target {
            let step = h.min(target - z);
            if step <= 1e-14 * z.abs().max(1.0) && target - z > step {
                return Err(Error::StepUnderflow { z });
            }
            let mut k = [Complex64::default(); 7];
            k[0] = k1;
            for s in 1..7 {
                let mut acc = y;
                for (j, &a) in A[s][..s].iter().enumerate() {
                    acc += step * a * k[j];
                }
                k[s] = f(z + C[s] * step, acc);
            }
            let mut y5 = y;
            let mut err = Complex64::default();
            for s in 0..7 {
                y5 += step * B5[s] * k[s];
                err += step * (B5[s] - B4[s]) * k[s];
            }
            let scale = tol.abs + tol.rel * y.norm().max(y5.norm());
            let ratio = err.norm() / scale;
            if !ratio.is_finite() {
                return Err(Error::NonFinite("ODE step"));
            }
            if ratio <= 1.0 {
                z = if target - z <= step { target } else { z + step };
                y = y5;
                k1 = k[6];
            }
            let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * grow;
            if h <= 1e-14 * z.abs().max(1.0) {
                return Err(Error::StepUnderflow { z });
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let zs: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let ys = integrate(|_, y| Complex64::new(-0.7, 2.0) * y, 0.0, Complex64::new(1.0, 0.0), &zs, Tolerance::default()).unwrap();
        for (&z, y) in zs.iter().zip(&ys) {
            let exact = (Complex64::new(-0.7, 2.0) * z).exp();
            assert!((y - exact).norm() <= 1e-8 * exact.norm(), "{z}: {y} vs {exact}");
        }
    }

    #[test]
    fn driven_oscillator() {
        // y' = i e^{iz}, y(0) = 0  ⇒  y = e^{iz} − 1
        let zs = [0.0, 1.0, 7.5];
        let ys = integrate(|z, _| Complex64::i() * Complex64::from_polar(1.0, z), 0.0, Complex64::default(), &zs, Tolerance::default()).unwrap();
        for (&z, y) in zs.iter().zip(&ys) {
            let exact = Complex64::from_polar(1.0, z) - 1.0;
            assert!((y - exact).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_unsorted_targets() {
        assert!(integrate(|_, y| y, 0.0, Complex64::new(1.0, 0.0), &[1.0, 0.5], Tolerance::default()).is_err());
    }

    #[test]
    fn stiff_blowup_is_reported() {
        let r = integrate(|_, y| y * y, 0.0, Complex64::new(1.0, 0.0), &[2.0], Tolerance::default());
        assert!(r.is_err());
    }
}
