//! Strictly convex fluxes, their Legendre conjugates, and (A,B) connections.
//!
//! A [`ConvexFlux`] carries the flux and its first two derivatives as closures
//! together with a bracket `[u_lo, u_hi]` that must contain the minimizer and
//! every state a run can reach. All inversions (minimizer, branch inverses,
//! `(h')^{-1}`) are bracketed bisections so they stay correct where `h'' = 0`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{bisect, golden_min};

/// Tolerance for the connection conditions and the flux-minimum clamp.
pub const TOL_CONN: f64 = 1e-9;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FluxError {
    #[error("derivative of flux `{label}` does not change sign on [{lo}, {hi}]")]
    NoSignChange { label: String, lo: f64, hi: f64 },
    #[error("value {value} lies below the minimum {min} of flux `{label}`")]
    BelowMinimum { label: String, value: f64, min: f64 },
    #[error("preimage of {value} on the {side:?} branch of `{label}` lies outside the bracket")]
    BracketExceeded {
        label: String,
        value: f64,
        side: Monotone,
    },
    #[error("slope {slope} outside the derivative range [{lo}, {hi}] of flux `{label}`")]
    OutOfRange {
        label: String,
        slope: f64,
        lo: f64,
        hi: f64,
    },
    #[error("unknown flux key `{0}`")]
    UnknownFlux(String),
    #[error("flux `{label}` is not strictly convex on its bracket: {reason}")]
    NotConvex { label: String, reason: String },
    #[error("invalid bracket [{lo}, {hi}] for flux `{label}`")]
    InvalidBracket { label: String, lo: f64, hi: f64 },
}

/// Which monotone branch of a convex flux an inverse is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotone {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxMinimizer {
    pub theta: f64,
    pub min_value: f64,
}

/// A `C^2` strictly convex flux with analytic derivatives.
#[derive(Clone)]
pub struct ConvexFlux {
    eval: RealFn,
    deriv: RealFn,
    deriv2: RealFn,
    bracket: (f64, f64),
    label: String,
    minimizer: Arc<OnceLock<Result<FluxMinimizer, FluxError>>>,
}

impl fmt::Debug for ConvexFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFlux")
            .field("label", &self.label)
            .field("bracket", &self.bracket)
            .finish()
    }
}

impl ConvexFlux {
    pub fn new<E, D, D2>(label: impl Into<String>, bracket: (f64, f64), eval: E, deriv: D, deriv2: D2) -> Self
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ConvexFlux {
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            deriv2: Arc::new(deriv2),
            bracket,
            label: label.into(),
            minimizer: Arc::new(OnceLock::new()),
        }
    }

    /// Built-in registry: `burgers`, `square`, `shifted`, `quartic`, `sextic_plus1`.
    pub fn builtin(key: &str, bracket: (f64, f64)) -> Result<Self, FluxError> {
        let flux = match key {
            "burgers" => Self::new(key, bracket, |u| 0.5 * u * u, |u| u, |_| 1.0),
            "square" => Self::new(key, bracket, |u| u * u, |u| 2.0 * u, |_| 2.0),
            "shifted" => Self::new(
                key,
                bracket,
                |u| (u - 1.0) * (u - 1.0) - 1.0,
                |u| 2.0 * (u - 1.0),
                |_| 2.0,
            ),
            "quartic" => Self::new(key, bracket, |u| u.powi(4), |u| 4.0 * u.powi(3), |u| 12.0 * u * u),
            "sextic_plus1" => Self::new(
                key,
                bracket,
                |u| u.powi(6) + 1.0,
                |u| 6.0 * u.powi(5),
                |u| 30.0 * u.powi(4),
            ),
            other => return Err(FluxError::UnknownFlux(other.to_string())),
        };
        flux.check_bracket()?;
        Ok(flux)
    }

    /// Polynomial flux `sum_k coeffs[k] u^k`, checked for strict convexity on the bracket.
    pub fn polynomial(coeffs: &[f64], bracket: (f64, f64)) -> Result<Self, FluxError> {
        let c: Arc<[f64]> = coeffs.into();
        let (c0, c1, c2) = (c.clone(), c.clone(), c);
        let label = format!("polynomial{:?}", coeffs);
        let flux = Self::new(
            label,
            bracket,
            move |u| horner(&c0, u),
            move |u| horner_deriv(&c1, u, 1),
            move |u| horner_deriv(&c2, u, 2),
        );
        flux.check_bracket()?;
        flux.check_convexity()?;
        Ok(flux)
    }

    fn check_bracket(&self) -> Result<(), FluxError> {
        let (lo, hi) = self.bracket;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FluxError::InvalidBracket {
                label: self.label.clone(),
                lo,
                hi,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    #[inline]
    pub fn deriv(&self, u: f64) -> f64 {
        (self.deriv)(u)
    }

    #[inline]
    pub fn deriv2(&self, u: f64) -> f64 {
        (self.deriv2)(u)
    }

    pub fn bracket(&self) -> (f64, f64) {
        self.bracket
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Range of `h'` over the bracket.
    pub fn slope_range(&self) -> (f64, f64) {
        (self.deriv(self.bracket.0), self.deriv(self.bracket.1))
    }

    /// Largest `|h'|` over the bracket.
    pub fn max_speed(&self) -> f64 {
        let (a, b) = self.slope_range();
        a.abs().max(b.abs())
    }

    /// Unique minimizer of the flux, found by bisection on `h'`.
    pub fn find_minimizer(&self) -> Result<FluxMinimizer, FluxError> {
        self.minimizer
            .get_or_init(|| {
                let (lo, hi) = self.bracket;
                let (d_lo, d_hi) = (self.deriv(lo), self.deriv(hi));
                if !(d_lo <= 0.0 && d_hi >= 0.0) {
                    return Err(FluxError::NoSignChange {
                        label: self.label.clone(),
                        lo,
                        hi,
                    });
                }
                let theta = bisect(|u| self.deriv(u), lo, hi);
                Ok(FluxMinimizer {
                    theta,
                    min_value: self.eval(theta),
                })
            })
            .clone()
    }

    /// Minimizer, panicking on a flux whose bracket was never validated.
    ///
    /// Every flux reachable from a [`crate::scenarios::Scenario`] has passed
    /// `find_minimizer` at load time.
    pub fn theta(&self) -> f64 {
        self.find_minimizer().expect("flux minimizer").theta
    }

    pub fn min_value(&self) -> f64 {
        self.find_minimizer().expect("flux minimizer").min_value
    }

    /// Inverse of `h` restricted to one monotone branch.
    ///
    /// Values within [`TOL_CONN`] below the minimum are clamped to `θ`.
    pub fn branch_inverse(&self, side: Monotone, v: f64) -> Result<f64, FluxError> {
        let m = self.find_minimizer()?;
        let tol = TOL_CONN * m.min_value.abs().max(1.0);
        if v < m.min_value - tol {
            return Err(FluxError::BelowMinimum {
                label: self.label.clone(),
                value: v,
                min: m.min_value,
            });
        }
        if v <= m.min_value {
            return Ok(m.theta);
        }
        let end = match side {
            Monotone::Increasing => self.bracket.1,
            Monotone::Decreasing => self.bracket.0,
        };
        if self.eval(end) < v {
            return Err(FluxError::BracketExceeded {
                label: self.label.clone(),
                value: v,
                side,
            });
        }
        let (lo, hi) = match side {
            Monotone::Increasing => (m.theta, end),
            Monotone::Decreasing => (end, m.theta),
        };
        Ok(bisect(|u| self.eval(u) - v, lo, hi))
    }

    /// `(h')^{-1}(p)`, the derivative of the conjugate.
    pub fn deriv_inverse(&self, p: f64) -> Result<f64, FluxError> {
        let (lo, hi) = self.bracket;
        let (p_lo, p_hi) = self.slope_range();
        let slack = 1e-9 * p_lo.abs().max(p_hi.abs()).max(1.0);
        if !(p >= p_lo - slack && p <= p_hi + slack) {
            return Err(FluxError::OutOfRange {
                label: self.label.clone(),
                slope: p,
                lo: p_lo,
                hi: p_hi,
            });
        }
        if p <= p_lo {
            return Ok(lo);
        }
        if p >= p_hi {
            return Ok(hi);
        }
        Ok(bisect(|u| self.deriv(u) - p, lo, hi))
    }

    /// Legendre conjugate `h*(p) = sup_q {p q - h(q)}`.
    pub fn legendre(&self, p: f64) -> Result<f64, FluxError> {
        let q = self.deriv_inverse(p)?;
        Ok(p * q - self.eval(q))
    }

    /// `h*(h'(q))` evaluated without inversion.
    #[inline]
    pub fn legendre_at_state(&self, q: f64) -> f64 {
        q * self.deriv(q) - self.eval(q)
    }

    /// Sampled strict convexity and monotone derivative on the bracket.
    pub fn check_convexity(&self) -> Result<(), FluxError> {
        let (lo, hi) = self.bracket;
        let n = 200;
        let step = (hi - lo) / n as f64;
        for i in 0..n - 1 {
            let (a, b, c) = (
                lo + i as f64 * step,
                lo + (i + 1) as f64 * step,
                lo + (i + 2) as f64 * step,
            );
            let interp = 0.5 * (self.eval(a) + self.eval(c));
            if !(self.eval(b) < interp) {
                return Err(FluxError::NotConvex {
                    label: self.label.clone(),
                    reason: format!("chord test fails at u = {b}"),
                });
            }
        }
        let n = 2000;
        let step = (hi - lo) / n as f64;
        let mut prev = self.deriv(lo);
        for i in 1..=n {
            let d = self.deriv(lo + i as f64 * step);
            if !(d > prev) {
                return Err(FluxError::NotConvex {
                    label: self.label.clone(),
                    reason: format!("h' not increasing near u = {}", lo + i as f64 * step),
                });
            }
            prev = d;
        }
        Ok(())
    }

    /// Superlinear growth proxy: `h(u)/|u|` increases as the bracket is widened.
    pub fn superlinear_proxy(&self) -> bool {
        let (lo, hi) = self.bracket;
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let reach = center.abs() + half;
        [1.0, -1.0].iter().all(|&dir| {
            let ratios: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
                .iter()
                .map(|k| {
                    let u = dir * k * reach;
                    self.eval(u) / u.abs()
                })
                .collect();
            ratios.windows(2).all(|w| w[1] > w[0]) && ratios[3] - ratios[0] > 0.0
        })
    }

    /// Convexity diagnosis used by [`validate_hypotheses`].
    pub fn diagnose(&self) -> FluxDiagnosis {
        let (lo, hi) = self.bracket;
        let n = 4000;
        let step = (hi - lo) / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
        let d2: Vec<f64> = xs.iter().map(|&u| self.deriv2(u)).collect();
        let d2_max = d2.iter().cloned().fold(f64::MIN, f64::max);
        let speed_scale = self.max_speed().max(1.0);
        let zero_tol = 1e-9 * d2_max.abs().max(1.0);

        let mut degenerate = Vec::new();
        let mut min_seen = f64::INFINITY;
        for i in 0..=n {
            let left = if i == 0 { f64::INFINITY } else { d2[i - 1] };
            let right = if i == n { f64::INFINITY } else { d2[i + 1] };
            if d2[i] > left || d2[i] > right {
                continue;
            }
            let a = xs[i.saturating_sub(1)];
            let b = xs[(i + 1).min(n)];
            let (p, val) = golden_min(|u| self.deriv2(u), a, b, 1e-13);
            let val = val.min(d2[i]);
            min_seen = min_seen.min(val);
            if val <= zero_tol && !degenerate.iter().any(|&q: &f64| (q - p).abs() < 2.0 * step) {
                degenerate.push(p);
            }
        }
        let alpha = if degenerate.is_empty() && min_seen > 0.0 {
            Some(min_seen)
        } else {
            None
        };
        let degenerate_ok = degenerate
            .iter()
            .all(|&p| self.deriv(p).abs() <= 1e-6 * speed_scale);
        FluxDiagnosis {
            label: self.label.clone(),
            convex: self.check_convexity().is_ok(),
            superlinear: self.superlinear_proxy(),
            uniform_convexity_alpha: alpha,
            degenerate_points: degenerate,
            degenerate_ok,
        }
    }
}

fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * u + a)
}

fn horner_deriv(c: &[f64], u: f64, order: usize) -> f64 {
    c.iter()
        .enumerate()
        .skip(order)
        .rev()
        .fold(0.0, |acc, (k, &a)| {
            let factor: f64 = (0..order).map(|j| (k - j) as f64).product();
            acc * u + factor * a
        })
}

/// Per-flux convexity findings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxDiagnosis {
    pub label: String,
    pub convex: bool,
    pub superlinear: bool,
    /// Positive lower bound on `h''` over the bracket, when one exists.
    pub uniform_convexity_alpha: Option<f64>,
    /// Points where `h''` vanishes within tolerance.
    pub degenerate_points: Vec<f64>,
    /// `h'` vanishes at every degenerate point.
    pub degenerate_ok: bool,
}

impl FluxDiagnosis {
    /// Uniformly convex, or `h'` and `h''` vanish together.
    pub fn nondegenerate_ok(&self) -> bool {
        self.uniform_convexity_alpha.map_or(false, |a| a > 0.0) || self.degenerate_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub h1_ok: bool,
    pub h2_ok: bool,
    pub h3_ok: bool,
    pub f: FluxDiagnosis,
    pub g: FluxDiagnosis,
}

/// Checks H1 (convex, superlinear) for both fluxes, H2 for `f` and H3 for `g`.
pub fn validate_hypotheses(f: &ConvexFlux, g: &ConvexFlux) -> HypothesisReport {
    let fd = f.diagnose();
    let gd = g.diagnose();
    HypothesisReport {
        h1_ok: fd.convex && fd.superlinear && gd.convex && gd.superlinear,
        h2_ok: fd.nondegenerate_ok(),
        h3_ok: gd.nondegenerate_ok(),
        f: fd,
        g: gd,
    }
}

/// Stationary interface pair: `g(A) = f(B)`, `g'(A) <= 0`, `f'(B) >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl Connection {
    pub fn new(a: f64, b: f64) -> Self {
        Connection { a, b }
    }

    /// Fixes `A` and solves `f(B) = g(A)` on the increasing branch of `f`.
    pub fn from_left(f: &ConvexFlux, g: &ConvexFlux, a: f64) -> Result<Self, FluxError> {
        let b = f.branch_inverse(Monotone::Increasing, g.eval(a))?;
        Ok(Connection { a, b })
    }

    /// Fixes `B` and solves `g(A) = f(B)` on the decreasing branch of `g`.
    pub fn from_right(f: &ConvexFlux, g: &ConvexFlux, b: f64) -> Result<Self, FluxError> {
        let a = g.branch_inverse(Monotone::Decreasing, f.eval(b))?;
        Ok(Connection { a, b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionCheck {
    pub valid: bool,
    pub critical: bool,
}

pub fn validate_connection(f: &ConvexFlux, g: &ConvexFlux, conn: &Connection) -> ConnectionCheck {
    let flux_match = (g.eval(conn.a) - f.eval(conn.b)).abs() <= TOL_CONN * g.eval(conn.a).abs().max(1.0);
    let valid = flux_match && g.deriv(conn.a) <= TOL_CONN && f.deriv(conn.b) >= -TOL_CONN;
    let critical = match (g.find_minimizer(), f.find_minimizer()) {
        (Ok(mg), Ok(mf)) => (conn.a - mg.theta).abs() <= 1e-8 || (conn.b - mf.theta).abs() <= 1e-8,
        _ => false,
    };
    ConnectionCheck { valid, critical }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flux(key: &str) -> ConvexFlux {
        ConvexFlux::builtin(key, (-4.0, 4.0)).unwrap()
    }

    #[test]
    fn minimizers_of_builtin_fluxes() {
        let g = flux("square").find_minimizer().unwrap();
        assert!(g.theta.abs() < 1e-12 && g.min_value.abs() < 1e-12);
        let f = flux("shifted").find_minimizer().unwrap();
        assert!((f.theta - 1.0).abs() < 1e-12 && (f.min_value + 1.0).abs() < 1e-12);
        let q = flux("quartic");
        let m = q.find_minimizer().unwrap();
        let scale = q.deriv(-4.0).abs().max(q.deriv(4.0).abs());
        assert!(q.deriv(m.theta).abs() <= 1e-12 * scale);
        assert!(m.min_value.abs() < 1e-12);
    }

    #[test]
    fn minimizer_requires_sign_change() {
        let f = ConvexFlux::builtin("square", (1.0, 3.0)).unwrap();
        assert!(matches!(f.find_minimizer(), Err(FluxError::NoSignChange { .. })));
    }

    #[test]
    fn branch_inverse_examples() {
        let g = flux("square");
        assert!((g.branch_inverse(Monotone::Increasing, 4.0).unwrap() - 2.0).abs() < 1e-12);
        let f = flux("shifted");
        assert!((f.branch_inverse(Monotone::Increasing, 0.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(g.branch_inverse(Monotone::Decreasing, 0.0).unwrap(), g.theta());
        // clamp just below the minimum
        assert_eq!(g.branch_inverse(Monotone::Decreasing, -1e-12).unwrap(), g.theta());
    }

    #[test]
    fn branch_inverse_errors() {
        let g = flux("square");
        assert!(matches!(
            g.branch_inverse(Monotone::Increasing, -0.5),
            Err(FluxError::BelowMinimum { .. })
        ));
        assert!(matches!(
            g.branch_inverse(Monotone::Increasing, 17.0),
            Err(FluxError::BracketExceeded { .. })
        ));
    }

    #[test]
    fn deriv_inverse_examples() {
        let b = flux("burgers");
        assert!((b.deriv_inverse(3.0).unwrap() - 3.0).abs() < 1e-12);
        let q = ConvexFlux::builtin("quartic", (-2.0, 2.0)).unwrap();
        assert!(q.deriv_inverse(0.0).unwrap().abs() < 1e-12);
        assert!((q.deriv_inverse(4.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(q.deriv_inverse(33.0), Err(FluxError::OutOfRange { .. })));
    }

    #[test]
    fn legendre_examples() {
        assert!((flux("burgers").legendre(1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((flux("shifted").legendre(0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((flux("square").legendre(3.0).unwrap() - 2.25).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_examples() {
        let q = ConvexFlux::builtin("quartic", (-2.0, 2.0)).unwrap();
        let d = q.diagnose();
        assert!(d.uniform_convexity_alpha.is_none());
        assert!(d.degenerate_ok && d.nondegenerate_ok());
        assert!(d.degenerate_points.iter().all(|p| p.abs() < 1e-3));

        let b = ConvexFlux::builtin("burgers", (-2.0, 2.0)).unwrap();
        let d = b.diagnose();
        assert_eq!(d.uniform_convexity_alpha, Some(1.0));
        assert!(d.nondegenerate_ok());

        // (u-2)^4 + u: f'' = 12 (u-2)^2 vanishes at 2 where f' = 4 (u-2)^3 + 1 = 1.
        let p = ConvexFlux::polynomial(&[16.0, -31.0, 24.0, -8.0, 1.0], (-1.0, 4.0)).unwrap();
        assert!((p.eval(3.0) - 4.0).abs() < 1e-12);
        assert!((p.deriv(2.0) - 1.0).abs() < 1e-12);
        let d = p.diagnose();
        assert!(!d.nondegenerate_ok());
        assert!(d.degenerate_points.iter().any(|x| (x - 2.0).abs() < 1e-3));

        let f = ConvexFlux::builtin("quartic", (-2.0, 2.0)).unwrap();
        let g = ConvexFlux::builtin("sextic_plus1", (-2.0, 2.0)).unwrap();
        let r = validate_hypotheses(&f, &g);
        assert!(r.h1_ok && r.h2_ok && r.h3_ok);
        let r = validate_hypotheses(&p, &g);
        assert!(!r.h2_ok && r.h3_ok);
    }

    #[test]
    fn connection_examples() {
        let f = flux("shifted");
        let g = flux("square");
        let c = validate_connection(&f, &g, &Connection::new(0.0, 2.0));
        assert!(c.valid && c.critical);
        let c = validate_connection(&f, &g, &Connection::new(-1.0, 1.0 + 2f64.sqrt()));
        assert!(c.valid && !c.critical);
        let b = f.branch_inverse(Monotone::Increasing, g.eval(1.0)).unwrap();
        let c = validate_connection(&f, &g, &Connection::new(1.0, b));
        assert!(!c.valid);
    }

    #[test]
    fn connection_constructors_match_flux_values() {
        let f = flux("shifted");
        let g = flux("square");
        let c = Connection::from_left(&f, &g, -1.0).unwrap();
        assert!((c.b - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        let c = Connection::from_right(&f, &g, 1.0 + 2f64.sqrt()).unwrap();
        assert!((c.a + 1.0).abs() < 1e-12);
    }

    #[test]
    fn polynomial_rejects_nonconvex() {
        assert!(matches!(
            ConvexFlux::polynomial(&[0.0, 0.0, 0.0, 1.0], (-1.0, 1.0)),
            Err(FluxError::NotConvex { .. })
        ));
    }

    #[test]
    fn superlinear_proxy_on_registry() {
        for key in ["burgers", "square", "shifted", "quartic", "sextic_plus1"] {
            assert!(flux(key).superlinear_proxy(), "{key}");
        }
    }
}
