//! Scalar minimization helpers used by the designer and the probe-detuning search.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a bracketed scalar minimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Stops when the bracket is narrower than `rel_tol · max(|x|, 1e-300) + abs_floor`
/// or after `max_iter` shrink steps.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, max_iter: usize) -> Minimum {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) + f64::EPSILON * (lo.abs() + hi.abs()) {
            break;
        }
        iterations += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Minimum { x, value, iterations }
}

/// Maximizer of `f` over `[lo, hi]`: uniform scan with `points` samples, then a
/// golden-section refine between the neighbours of the best sample.
///
/// Returns `(x, f(x), index of best sample)`; the index lets callers detect a
/// maximum sitting on the scan edge.
pub fn scan_then_refine_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, rel_tol: f64) -> (f64, f64, usize) {
    let points = points.max(3);
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..points {
        let y = f(lo + step * i as f64);
        if y > best_value {
            best = i;
            best_value = y;
        }
    }
    let a = lo + step * best.saturating_sub(1) as f64;
    let b = lo + step * (best + 1).min(points - 1) as f64;
    let m = golden_section(|x| -f(x), a, b, rel_tol, 200);
    if -m.value >= best_value {
        (m.x, -m.value, best)
    } else {
        (lo + step * best as f64, best_value, best)
    }
}

/// [`scan_then_refine_max`] for a fallible objective; the first error aborts the search.
pub fn try_scan_then_refine_max<E, F>(f: F, lo: f64, hi: f64, points: usize, rel_tol: f64) -> Result<(f64, f64, usize), E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    let failure = std::cell::RefCell::new(None);
    let result = scan_then_refine_max(
        |x| match f(x) {
            Ok(y) => y,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        points,
        rel_tol,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(result),
    }
}
