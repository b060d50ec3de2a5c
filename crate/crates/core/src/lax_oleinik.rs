//! Exact minimization of the one-sided Hopf–Lax cost
//! `y ↦ v0(y) + t h*((x - y)/t)` over a window of feet.
//!
//! With piecewise-constant `u0` the objective is convex on every constant
//! piece, so its minimum is attained at one of: a piece's stationary point
//! `y = x - t h'(c)`, a break where the one-sided derivatives bracket zero, or
//! an end of the window. All are enumerated; ties go to the extreme foot.

use crate::flux::{ConvexFlux, FluxError};
use crate::paths::InitialProfile;

/// Which foot wins among equal-cost minimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FootTie {
    Smallest,
    Largest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectOptimum {
    pub cost: f64,
    pub foot: f64,
    /// `(h')^{-1}((x - foot)/t)`.
    pub state: f64,
}

/// Relative tolerance under which two costs are treated as equal.
pub const COST_TIE: f64 = 1e-12;

pub fn tie_tol(cost: f64) -> f64 {
    COST_TIE * cost.abs().max(1.0)
}

/// Minimizes `v0(y) + t h*((x-y)/t)` over `y ∈ [y_lo, y_hi]` (ends may be
/// infinite). Returns `None` when no foot in the window has a slope inside
/// the flux bracket.
pub fn direct_minimum(
    h: &ConvexFlux,
    v0: &InitialProfile,
    x: f64,
    t: f64,
    y_lo: f64,
    y_hi: f64,
    tie: FootTie,
) -> Result<Option<DirectOptimum>, FluxError> {
    let (p_lo, p_hi) = h.slope_range();
    let ya = y_lo.max(x - t * p_hi);
    let yb = y_hi.min(x - t * p_lo);
    if !(ya <= yb) {
        return Ok(None);
    }

    let mut cands: Vec<DirectOptimum> = Vec::with_capacity(8);

    let endpoint = |y: f64| -> Result<DirectOptimum, FluxError> {
        let s = (x - y) / t;
        let q = h.deriv_inverse(s)?;
        Ok(DirectOptimum {
            cost: v0.v0(y) + t * (s * q - h.eval(q)),
            foot: y,
            state: q,
        })
    };
    cands.push(endpoint(ya)?);
    if yb > ya {
        cands.push(endpoint(yb)?);
    }

    let k_first = v0.piece_index(ya);
    let k_last = v0.piece_index(yb);
    for k in k_first..=k_last {
        let (a, b, c) = v0.piece(k);
        let y_star = x - t * h.deriv(c);
        if y_star > ya && y_star < yb && y_star > a && y_star < b {
            cands.push(DirectOptimum {
                cost: v0.v0(y_star) + t * h.legendre_at_state(c),
                foot: y_star,
                state: c,
            });
        }
        // break at the right end of piece k
        if k < k_last && b > ya && b < yb {
            let s = (x - b) / t;
            let right = v0.piece(k + 1).2;
            if h.deriv(c) <= s && s <= h.deriv(right) {
                cands.push(endpoint(b)?);
            }
        }
    }

    Ok(select_extreme(&cands, tie))
}

/// Lowest-cost candidate, ties resolved to the extreme foot.
fn select_extreme(cands: &[DirectOptimum], tie: FootTie) -> Option<DirectOptimum> {
    let lowest = cands.iter().map(|c| c.cost).fold(f64::INFINITY, f64::min);
    cands
        .iter()
        .filter(|c| c.cost <= lowest + tie_tol(lowest))
        .copied()
        .reduce(|acc, c| match tie {
            FootTie::Smallest if c.foot < acc.foot => c,
            FootTie::Largest if c.foot > acc.foot => c,
            _ => acc,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::golden_min;

    fn burgers() -> ConvexFlux {
        ConvexFlux::builtin("burgers", (-5.0, 5.0)).unwrap()
    }

    /// dense scan plus golden refinement, independent of the piece logic
    fn scan_min(h: &ConvexFlux, v0: &InitialProfile, x: f64, t: f64, lo: f64, hi: f64) -> f64 {
        let obj = |y: f64| v0.v0(y) + t * h.legendre((x - y) / t).unwrap();
        let n = 4000;
        let dy = (hi - lo) / n as f64;
        let (mut best_i, mut best) = (0, f64::INFINITY);
        for i in 0..=n {
            let c = obj(lo + i as f64 * dy);
            if c < best {
                best = c;
                best_i = i;
            }
        }
        let a = (lo + (best_i as f64 - 1.0) * dy).max(lo);
        let b = (lo + (best_i as f64 + 1.0) * dy).min(hi);
        golden_min(obj, a, b, 1e-12).1.min(best)
    }

    #[test]
    fn constant_data_has_interior_minimizer() {
        let h = burgers();
        let d = InitialProfile::constant(0.7);
        let o = direct_minimum(&h, &d, 1.0, 2.0, f64::NEG_INFINITY, f64::INFINITY, FootTie::Smallest)
            .unwrap()
            .unwrap();
        assert!((o.foot - (1.0 - 2.0 * 0.7)).abs() < 1e-14);
        assert_eq!(o.state, 0.7);
    }

    #[test]
    fn rarefaction_fan_minimizer_sits_on_the_break() {
        let h = burgers();
        let d = InitialProfile::piecewise_constant(vec![0.0], vec![0.0, 1.0]).unwrap();
        let o = direct_minimum(&h, &d, 0.3, 1.0, f64::NEG_INFINITY, f64::INFINITY, FootTie::Smallest)
            .unwrap()
            .unwrap();
        assert_eq!(o.foot, 0.0);
        assert!((o.state - 0.3).abs() < 1e-14);
    }

    #[test]
    fn shock_tie_picks_extreme_foot() {
        // Riemann 1|0 for Burgers: at x = t/2 both feet y = x - t and y = x tie.
        let h = burgers();
        let d = InitialProfile::piecewise_constant(vec![0.0], vec![1.0, 0.0]).unwrap();
        let lo = direct_minimum(&h, &d, 0.5, 1.0, f64::NEG_INFINITY, f64::INFINITY, FootTie::Smallest)
            .unwrap()
            .unwrap();
        let hi = direct_minimum(&h, &d, 0.5, 1.0, f64::NEG_INFINITY, f64::INFINITY, FootTie::Largest)
            .unwrap()
            .unwrap();
        assert!((lo.foot + 0.5).abs() < 1e-14 && lo.state == 1.0);
        assert!((hi.foot - 0.5).abs() < 1e-14 && hi.state == 0.0);
    }

    #[test]
    fn window_restricts_feet() {
        let h = burgers();
        let d = InitialProfile::constant(1.0);
        // unconstrained foot would be x - t = -0.5 < 0
        let o = direct_minimum(&h, &d, 0.5, 1.0, 0.0, f64::INFINITY, FootTie::Smallest)
            .unwrap()
            .unwrap();
        assert_eq!(o.foot, 0.0);
        assert!((o.state - 0.5).abs() < 1e-14);
    }

    #[test]
    fn empty_window_returns_none() {
        let h = ConvexFlux::builtin("burgers", (-1.0, 1.0)).unwrap();
        let d = InitialProfile::constant(0.0);
        // feet must lie in [x - t, x + t] = [4, 6]
        let o = direct_minimum(&h, &d, 5.0, 1.0, f64::NEG_INFINITY, 0.0, FootTie::Smallest).unwrap();
        assert!(o.is_none());
    }

    #[test]
    fn matches_scan_on_oscillatory_data() {
        let h = ConvexFlux::builtin("quartic", (-2.0, 2.0)).unwrap();
        let breaks: Vec<f64> = (0..12).map(|i| -1.0 + i as f64 * 0.17).collect();
        let values: Vec<f64> = (0..13).map(|i| if i % 2 == 0 { 0.8 } else { -0.6 }).collect();
        let d = InitialProfile::piecewise_constant(breaks, values).unwrap();
        for &(x, t) in &[(0.1, 0.5), (-0.4, 1.0), (0.9, 0.3), (0.0, 2.0)] {
            let (p_lo, p_hi) = h.slope_range();
            let (lo, hi) = (x - t * p_hi, x - t * p_lo);
            let o = direct_minimum(&h, &d, x, t, lo, hi, FootTie::Smallest).unwrap().unwrap();
            let oracle = scan_min(&h, &d, x, t, lo, hi);
            assert!(o.cost <= oracle + 1e-11, "x={x} t={t}: {} vs {}", o.cost, oracle);
            assert!(o.cost >= oracle - 1e-6, "x={x} t={t}: {} vs {}", o.cost, oracle);
        }
    }
}
