//! Small bracketed root finding and 1-D minimization helpers.

/// Iteration cap for every bisection in the crate.
pub const BISECTION_ITERS: usize = 60;

/// Bisection for a root of `func` on `[lo, hi]`.
///
/// `func(lo)` and `func(hi)` must have opposite signs (or one of them be zero).
/// Runs at most [`BISECTION_ITERS`] halvings and stops early once the interval
/// can no longer shrink in floating point.
pub fn bisect<F: Fn(f64) -> f64>(func: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = func(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let f_hi = func(hi);
    if f_hi == 0.0 {
        return hi;
    }
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = func(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // last bracket; pick the endpoint with the smaller residual
    let (a, b) = (func(lo).abs(), func(hi).abs());
    if a <= b {
        lo
    } else {
        hi
    }
}

/// Golden-section search for a minimum of a unimodal `func` on `[lo, hi]`.
pub fn golden_min<F: Fn(f64) -> f64>(func: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = func(x1);
    let mut f2 = func(x2);
    let mut iters = 0;
    while hi - lo > tol && iters < 200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = func(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = func(x2);
        }
        iters += 1;
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Adaptive Simpson quadrature of `func` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(func: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = func(a);
    let fb = func(b);
    let m = 0.5 * (a + b);
    let fm = func(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(func, a, b, fa, fm, fb, whole, tol, 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    func: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = func(lm);
    let frm = func(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(func, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(func, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
