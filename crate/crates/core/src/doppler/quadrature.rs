use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussHermite;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::response::VelocityPole;

/// Velocities beyond this many thermal velocities are ignored by the
/// trapezoid and adaptive rules (Maxwell tail below 2e-12).
pub const VELOCITY_CUTOFF: f64 = 5.0;

/// A resonance narrower than this many local node spacings trips the guard.
pub const GUARD_SPACINGS: f64 = 3.0;

const ADAPTIVE_REL_TOL: f64 = 1e-11;
const ADAPTIVE_MAX_INTERVALS: usize = 20_000;
const ADAPTIVE_INITIAL_PANELS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureKind {
    #[serde(alias = "gh")]
    GaussHermite,
    /// Uniform nodes on [−5u, 5u] with explicit Maxwell weights.
    #[serde(alias = "trap")]
    AdaptiveTrapezoid,
}

/// Maxwell weight along z with most-probable speed `u`: exp(−v²/u²)/(√π u).
pub fn maxwell_weight(v: f64, u: f64) -> f64 {
    (-(v / u).powi(2)).exp() / (PI.sqrt() * u)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VelocityGrid {
    /// m/s, ascending
    pub nodes: Vec<f64>,
    /// Normalized quadrature weights including the Maxwell density.
    pub weights: Vec<f64>,
    pub u: f64,
    pub kind: QuadratureKind,
}

impl VelocityGrid {
    pub fn new(u: f64, n: usize, kind: QuadratureKind) -> Result<Self> {
        if n < 8 {
            return Err(Error::GridTooSmall(n));
        }
        if !(u > 0.0) {
            return Err(Error::Config("thermal velocity must be positive".into()));
        }
        let (nodes, weights) = match kind {
            QuadratureKind::GaussHermite => {
                let rule = GaussHermite::new(NonZeroUsize::new(n).expect("n >= 8"));
                let mut pairs: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (x * u, w / PI.sqrt())).collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                pairs.into_iter().unzip()
            }
            QuadratureKind::AdaptiveTrapezoid => {
                let lo = -VELOCITY_CUTOFF * u;
                let h = 2.0 * VELOCITY_CUTOFF * u / (n - 1) as f64;
                let nodes: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
                let mut weights: Vec<f64> = nodes.iter().map(|&v| h * maxwell_weight(v, u)).collect();
                weights[0] *= 0.5;
                weights[n - 1] *= 0.5;
                let total = pairwise_sum(&weights);
                weights.iter_mut().for_each(|w| *w /= total);
                (nodes, weights)
            }
        };
        Ok(VelocityGrid { nodes, weights, u, kind })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Spacing of the nodes bracketing `v` (the outermost gap outside the node range).
    pub fn local_spacing(&self, v: f64) -> f64 {
        let idx = self.nodes.partition_point(|&x| x < v);
        let n = self.nodes.len();
        let i = idx.clamp(1, n - 1);
        self.nodes[i] - self.nodes[i - 1]
    }
}

pub fn make_grid(u: f64, n: usize, kind: QuadratureKind) -> Result<VelocityGrid> {
    VelocityGrid::new(u, n, kind)
}

/// Σ weights·f(nodes), summed pairwise in a fixed order.
pub fn velocity_average<F>(grid: &VelocityGrid, f: F) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let terms: Vec<Complex64> = grid.nodes.iter().zip(&grid.weights).map(|(&v, &w)| w * f(v)).collect();
    pairwise_sum(&terms)
}

pub(crate) fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    if xs.len() <= 8 {
        return xs.iter().fold(T::default(), |acc, &x| acc + x);
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn pairwise_sum_array<const N: usize>(xs: &[[f64; N]]) -> [f64; N] {
    if xs.len() <= 8 {
        return xs.iter().fold([0.0; N], |acc, x| add(acc, *x));
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    add(pairwise_sum_array(a), pairwise_sum_array(b))
}

fn add<const N: usize>(mut a: [f64; N], b: [f64; N]) -> [f64; N] {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// Which rule actually produced an average.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureUsed {
    Grid,
    AdaptiveKronrod,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuardReport {
    /// A resonance narrower than [`GUARD_SPACINGS`] local node spacings was found.
    pub flagged: bool,
    /// Narrowest velocity half-width among poles inside the grid, m/s.
    pub narrowest_width: f64,
    pub used: QuadratureUsed,
}

/// Checks the velocity poles of the integrand against the grid resolution.
pub fn check_poles(grid: &VelocityGrid, poles: &[VelocityPole]) -> (bool, f64) {
    let reach = VELOCITY_CUTOFF * grid.u;
    let mut flagged = false;
    let mut narrowest = f64::INFINITY;
    for pole in poles.iter().filter(|p| p.center.abs() <= reach) {
        narrowest = narrowest.min(pole.width);
        if pole.width < GUARD_SPACINGS * grid.local_spacing(pole.center) {
            flagged = true;
        }
    }
    (flagged, narrowest)
}

/// Maxwell average of a vector-valued integrand.
///
/// On a Gauss–Hermite grid a tripped guard switches to adaptive Gauss–Kronrod
/// integration with breakpoints at the pole centres. A trapezoid grid is the
/// reference rule and is only flagged, never replaced.
pub fn guarded_average<const N: usize, F>(grid: &VelocityGrid, poles: &[VelocityPole], f: F) -> ([f64; N], GuardReport)
where
    F: Fn(f64) -> [f64; N],
{
    let (flagged, narrowest_width) = check_poles(grid, poles);
    if flagged && grid.kind == QuadratureKind::GaussHermite {
        let breaks: Vec<f64> = poles.iter().map(|p| p.center).collect();
        let value = adaptive_maxwell_average(grid.u, &breaks, &f);
        return (
            value,
            GuardReport {
                flagged,
                narrowest_width,
                used: QuadratureUsed::AdaptiveKronrod,
            },
        );
    }
    let terms: Vec<[f64; N]> = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(&v, &w)| f(v).map(|x| w * x))
        .collect();
    (
        pairwise_sum_array(&terms),
        GuardReport {
            flagged,
            narrowest_width,
            used: QuadratureUsed::Grid,
        },
    )
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel<const N: usize> {
    lo: f64,
    hi: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<const N: usize, F>(lo: f64, hi: f64, g: &F) -> Panel<N>
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    for (j, (&x, &wk)) in XGK.iter().zip(&WGK).enumerate() {
        let points: &[f64] = if x == 0.0 { &[0.0] } else { &[-x, x] };
        for &t in points {
            let y = g(center + half * t);
            for c in 0..N {
                kronrod[c] += wk * y[c];
                if j % 2 == 1 {
                    gauss[c] += WG[j / 2] * y[c];
                }
            }
        }
    }
    let mut error: f64 = 0.0;
    for c in 0..N {
        kronrod[c] *= half;
        gauss[c] *= half;
        error = error.max((kronrod[c] - gauss[c]).abs());
    }
    Panel {
        lo,
        hi,
        value: kronrod,
        error,
    }
}

/// Globally adaptive G7/K15 integration of W(v)·f(v) over [−5u, 5u].
pub fn adaptive_maxwell_average<const N: usize, F>(u: f64, breakpoints: &[f64], f: &F) -> [f64; N]
where
    F: Fn(f64) -> [f64; N],
{
    let lo = -VELOCITY_CUTOFF * u;
    let hi = VELOCITY_CUTOFF * u;
    let weighted = |v: f64| f(v).map(|x| x * maxwell_weight(v, u));

    let mut edges: Vec<f64> = (0..=ADAPTIVE_INITIAL_PANELS)
        .map(|i| lo + (hi - lo) * i as f64 / ADAPTIVE_INITIAL_PANELS as f64)
        .collect();
    edges.extend(breakpoints.iter().copied().filter(|b| b.is_finite() && *b > lo && *b < hi));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * u);

    let mut heap: BinaryHeap<Panel<N>> = edges.windows(2).map(|w| kronrod_panel(w[0], w[1], &weighted)).collect();
    let mut running = heap.iter().fold([0.0; N], |acc, p| add(acc, p.value));
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    while heap.len() < ADAPTIVE_MAX_INTERVALS {
        let scale = running.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if error <= ADAPTIVE_REL_TOL * scale {
            break;
        }
        let worst = heap.pop().expect("non-empty");
        if worst.error == 0.0 {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        error -= worst.error;
        running = add(running, worst.value.map(|x| -x));
        if mid <= worst.lo || mid >= worst.hi {
            // interval cannot be split further in f64
            running = add(running, worst.value);
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        for panel in [kronrod_panel(worst.lo, mid, &weighted), kronrod_panel(mid, worst.hi, &weighted)] {
            error += panel.error;
            running = add(running, panel.value);
            heap.push(panel);
        }
    }
    let panels: Vec<&Panel<N>> = heap.iter().collect();
    sum_panels(&panels)
}

fn sum_panels<const N: usize>(panels: &[&Panel<N>]) -> [f64; N] {
    // order by position so the reduction does not depend on heap layout
    let mut sorted: Vec<&&Panel<N>> = panels.iter().collect();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let values: Vec<[f64; N]> = sorted.iter().map(|p| p.value).collect();
    pairwise_sum_array(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const U: f64 = 538.3;

    #[test]
    fn weights_are_normalized() {
        for kind in [QuadratureKind::GaussHermite, QuadratureKind::AdaptiveTrapezoid] {
            for n in [8, 64, 128, 256, 8192] {
                if kind == QuadratureKind::GaussHermite && n > 256 {
                    continue;
                }
                let g = make_grid(U, n, kind).unwrap();
                let s: f64 = g.weights.iter().sum();
                assert!((s - 1.0).abs() < 1e-12, "{kind:?} {n}: {s}");
                assert!(g.weights.iter().all(|&w| w >= 0.0));
            }
        }
    }

    #[test]
    fn nodes_are_symmetric() {
        let g = make_grid(U, 64, QuadratureKind::GaussHermite).unwrap();
        for (a, b) in g.nodes.iter().zip(g.nodes.iter().rev()) {
            assert_relative_eq!(*a, -*b, epsilon = 1e-9);
        }
    }

    #[test]
    fn small_grid_rejected() {
        assert!(matches!(make_grid(U, 7, QuadratureKind::GaussHermite), Err(Error::GridTooSmall(7))));
    }

    #[test]
    fn moments() {
        let g = make_grid(U, 64, QuadratureKind::GaussHermite).unwrap();
        let one = velocity_average(&g, |_| Complex64::new(1.0, 0.0));
        assert_relative_eq!(one.re, 1.0, epsilon = 1e-13);
        let odd = velocity_average(&g, |v| Complex64::new(v, 0.0));
        assert!(odd.norm() < 1e-10);
        let second = velocity_average(&g, |v| Complex64::new(v * v, 0.0));
        assert_relative_eq!(second.re, 0.5 * U * U, max_relative = 1e-12);
        let c = Complex64::new(0.3, -2.0);
        assert_relative_eq!((velocity_average(&g, |_| c) - c).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn adaptive_matches_gaussian_moments() {
        let [m0, m2] = adaptive_maxwell_average(U, &[], &|v: f64| [1.0, v * v]);
        assert_relative_eq!(m0, 1.0, epsilon = 1e-11);
        assert_relative_eq!(m2, 0.5 * U * U, max_relative = 1e-10);
    }

    #[test]
    fn adaptive_resolves_narrow_lorentzian() {
        // ∫ W(v) w²/(w² + (v − c)²) dv for a 0.5 m/s feature; compare with a fine trapezoid
        let (c, w) = (120.0, 0.5);
        let f = |v: f64| [w * w / (w * w + (v - c).powi(2))];
        let [adaptive] = adaptive_maxwell_average(U, &[c], &f);
        let fine = make_grid(U, 400_001, QuadratureKind::AdaptiveTrapezoid).unwrap();
        let reference: f64 = fine.nodes.iter().zip(&fine.weights).map(|(&v, &wt)| wt * f(v)[0]).sum();
        assert_relative_eq!(adaptive, reference, max_relative = 1e-9);
    }

    #[test]
    fn guard_trips_on_narrow_poles_only() {
        let g = make_grid(U, 128, QuadratureKind::GaussHermite).unwrap();
        let narrow = [VelocityPole { center: 10.0, width: 2.0 }];
        let wide = [VelocityPole { center: 10.0, width: 5_000.0 }];
        let outside = [VelocityPole { center: 10.0 * U, width: 1.0 }];
        assert!(check_poles(&g, &narrow).0);
        assert!(!check_poles(&g, &wide).0);
        assert!(!check_poles(&g, &outside).0);

        let (_, report) = guarded_average(&g, &narrow, |_| [1.0]);
        assert_eq!(report.used, QuadratureUsed::AdaptiveKronrod);
        let t = make_grid(U, 256, QuadratureKind::AdaptiveTrapezoid).unwrap();
        let (_, report) = guarded_average(&t, &narrow, |_| [1.0]);
        assert!(report.flagged);
        assert_eq!(report.used, QuadratureUsed::Grid);
    }
}
