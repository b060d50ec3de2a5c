//! Interface-driving functions `b±(t)`, `b'±(t)`, the extreme feet `y±(t)`,
//! and the boundary traces `λ±(t)` on a uniform time grid.
//!
//! `b±` are one-sided optimal costs of reaching `(0, t)` from the data. They
//! are computed as minima (the Hopf–Lax convention for `v_t + h(v_x) = 0`);
//! the closed-form `b'±` and `λ±` branches drive everything downstream.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flux::{validate_connection, Connection, ConvexFlux, FluxError, Monotone};
use crate::lax_oleinik::{direct_minimum, FootTie};
use crate::paths::{InitialProfile, Sign};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterfaceError {
    #[error(transparent)]
    Flux(#[from] FluxError),
    #[error("time {t} must be positive")]
    NonPositiveTime { t: f64 },
    #[error("invalid time grid: T = {horizon}, dt = {dt}")]
    InvalidGrid { horizon: f64, dt: f64 },
    #[error("time {t} outside the profile range [0, {horizon}]")]
    OutOfRange { t: f64, horizon: f64 },
    #[error("(A, B) = ({a}, {b}) is not a connection for these fluxes")]
    InvalidConnection { a: f64, b: f64 },
}

/// Feet closer to the interface than this are the resting curve.
pub fn foot_is_zero(y: f64, t: f64) -> bool {
    y.abs() <= 1e-13 * t.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BValue {
    pub value: f64,
    /// Extreme optimal foot: smallest for `+`, largest for `-`.
    pub y_foot: f64,
    /// Fraction of `[0, t]` the optimal curve rests on the interface.
    pub rest_fraction: f64,
}

/// `b±(t)`: optimal cost over `Γ±(0, t)` with the extreme foot.
///
/// Curves that travel to the interface and then rest there are never better
/// than the straight curve from the same foot (Jensen on the convex `h*`),
/// and the resting curve itself is the straight curve from `y = 0`, so the
/// search runs over straight curves `(y, 0) -> (0, t)` with `y` on `side`.
pub fn compute_b(t: f64, v0: &InitialProfile, h: &ConvexFlux, side: Sign) -> Result<BValue, InterfaceError> {
    if !(t > 0.0) {
        return Err(InterfaceError::NonPositiveTime { t });
    }
    let (lo, hi, tie) = match side {
        Sign::Positive => (0.0, f64::INFINITY, FootTie::Smallest),
        Sign::Negative => (f64::NEG_INFINITY, 0.0, FootTie::Largest),
    };
    let opt = direct_minimum(h, v0, 0.0, t, lo, hi, tie)?
        .expect("zero slope always lies in the derivative range");
    let rest_fraction = if foot_is_zero(opt.foot, t) { 1.0 } else { 0.0 };
    Ok(BValue {
        value: opt.cost,
        y_foot: opt.foot,
        rest_fraction,
    })
}

/// `b'±(t)` from the extreme foot: `-h((h')^{-1}(-y/t))`, or `-h(θ)` when the
/// foot is the interface itself.
pub fn compute_bprime(t: f64, h: &ConvexFlux, y_foot: f64) -> Result<f64, InterfaceError> {
    if foot_is_zero(y_foot, t) {
        return Ok(-h.min_value());
    }
    let q = h.deriv_inverse(-y_foot / t)?;
    Ok(-h.eval(q))
}

/// The side whose data attains the interface flux `max(-b'+, -b'-, f(B))`,
/// or `None` when the connection does.
pub fn feeding_side(bprime_plus: f64, bprime_minus: f64, conn_flux: f64) -> Option<Sign> {
    let (np, nm) = (-bprime_plus, -bprime_minus);
    if np > nm.max(conn_flux) {
        Some(Sign::Positive)
    } else if nm >= np && nm > conn_flux {
        Some(Sign::Negative)
    } else {
        None
    }
}

/// Boundary traces `(λ+, λ-)` from the two-branch definitions.
pub fn compute_lambda(
    bprime_plus: f64,
    bprime_minus: f64,
    f: &ConvexFlux,
    g: &ConvexFlux,
    conn: &Connection,
) -> Result<(f64, f64), InterfaceError> {
    let (np, nm) = (-bprime_plus, -bprime_minus);
    let fb = f.eval(conn.b);
    let ga = g.eval(conn.a);
    let lambda_plus = if np > nm.max(fb) {
        f.branch_inverse(Monotone::Decreasing, np)?
    } else {
        f.branch_inverse(Monotone::Increasing, nm.max(fb))?
    };
    let lambda_minus = if nm >= np.max(ga) {
        g.branch_inverse(Monotone::Increasing, nm)?
    } else {
        g.branch_inverse(Monotone::Decreasing, np.max(ga))?
    };
    Ok((lambda_plus, lambda_minus))
}

/// Interface flux `f(λ+) = g(λ-)`, i.e. `max(-b'+, -b'-, f(B))`.
pub fn interface_flux_value(bprime_plus: f64, bprime_minus: f64, conn_flux: f64) -> f64 {
    (-bprime_plus).max(-bprime_minus).max(conn_flux)
}

/// Per-node data one side of the interface needs to optimize departures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepartureTable {
    /// Outgoing state carrying the node flux into this side.
    pub state: Vec<f64>,
    /// `h'(state)`.
    pub speed: Vec<f64>,
}

impl DepartureTable {
    fn build(flux: &[f64], h: &ConvexFlux, side: Sign) -> Result<Self, InterfaceError> {
        let branch = match side {
            Sign::Positive => Monotone::Increasing,
            Sign::Negative => Monotone::Decreasing,
        };
        let state = flux
            .iter()
            .map(|&v| h.branch_inverse(branch, v))
            .collect::<Result<Vec<_>, _>>()?;
        let speed = state.iter().map(|&q| h.deriv(q)).collect();
        Ok(DepartureTable { state, speed })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceProfile {
    pub times: Vec<f64>,
    pub b_plus: Vec<f64>,
    pub b_minus: Vec<f64>,
    pub bprime_plus: Vec<f64>,
    pub bprime_minus: Vec<f64>,
    pub y_plus: Vec<f64>,
    pub y_minus: Vec<f64>,
    pub lambda_plus: Vec<f64>,
    pub lambda_minus: Vec<f64>,
    /// `f(λ+) = g(λ-)` at each node.
    pub flux: Vec<f64>,
    /// `v(0, t) = -∫_0^t f(λ+)`: exact increments of `b±` while one side feeds
    /// the interface, trapezoid rule across a change of regime, capped by `b±`.
    pub interface_value: Vec<f64>,
    pub connection: Connection,
    pub critical: bool,
    pub departures_plus: DepartureTable,
    pub departures_minus: DepartureTable,
}

/// Node 0 is evaluated at this fraction of the first step.
const FIRST_NODE_FRACTION: f64 = 1e-3;

pub fn build_profile(
    v0: &InitialProfile,
    f: &ConvexFlux,
    g: &ConvexFlux,
    connection: Connection,
    horizon: f64,
    dt: f64,
) -> Result<InterfaceProfile, InterfaceError> {
    if !(horizon > 0.0 && dt > 0.0 && dt.is_finite()) {
        return Err(InterfaceError::InvalidGrid { horizon, dt });
    }
    let check = validate_connection(f, g, &connection);
    if !check.valid {
        return Err(InterfaceError::InvalidConnection {
            a: connection.a,
            b: connection.b,
        });
    }
    let steps = (horizon / dt).round().max(1.0) as usize;
    let dt = horizon / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let conn_flux = f.eval(connection.b);

    struct Node {
        b_plus: f64,
        b_minus: f64,
        bp_plus: f64,
        bp_minus: f64,
        y_plus: f64,
        y_minus: f64,
        lam_plus: f64,
        lam_minus: f64,
        flux: f64,
    }

    let nodes = times
        .par_iter()
        .map(|&t| -> Result<Node, InterfaceError> {
            let te = if t > 0.0 { t } else { FIRST_NODE_FRACTION * dt };
            let bp = compute_b(te, v0, f, Sign::Positive)?;
            let bm = compute_b(te, v0, g, Sign::Negative)?;
            let bp_plus = compute_bprime(te, f, bp.y_foot)?;
            let bp_minus = compute_bprime(te, g, bm.y_foot)?;
            let (lam_plus, lam_minus) = compute_lambda(bp_plus, bp_minus, f, g, &connection)?;
            Ok(Node {
                b_plus: if t > 0.0 { bp.value } else { 0.0 },
                b_minus: if t > 0.0 { bm.value } else { 0.0 },
                bp_plus,
                bp_minus,
                y_plus: bp.y_foot,
                y_minus: bm.y_foot,
                lam_plus,
                lam_minus,
                flux: interface_flux_value(bp_plus, bp_minus, conn_flux),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let flux: Vec<f64> = nodes.iter().map(|n| n.flux).collect();
    let mut interface_value = Vec::with_capacity(flux.len());
    interface_value.push(0.0);
    let feed = |n: &Node| feeding_side(n.bp_plus, n.bp_minus, conn_flux);
    for k in 1..nodes.len() {
        let (prev, node) = (&nodes[k - 1], &nodes[k]);
        let increment = match (feed(prev), feed(node)) {
            (Some(Sign::Positive), Some(Sign::Positive)) => node.b_plus - prev.b_plus,
            (Some(Sign::Negative), Some(Sign::Negative)) => node.b_minus - prev.b_minus,
            (None, None) => -dt * conn_flux,
            _ => -0.5 * dt * (flux[k - 1] + flux[k]),
        };
        let carried = interface_value[k - 1] + increment;
        interface_value.push(carried.min(node.b_plus).min(node.b_minus));
    }

    Ok(InterfaceProfile {
        b_plus: nodes.iter().map(|n| n.b_plus).collect(),
        b_minus: nodes.iter().map(|n| n.b_minus).collect(),
        bprime_plus: nodes.iter().map(|n| n.bp_plus).collect(),
        bprime_minus: nodes.iter().map(|n| n.bp_minus).collect(),
        y_plus: nodes.iter().map(|n| n.y_plus).collect(),
        y_minus: nodes.iter().map(|n| n.y_minus).collect(),
        lambda_plus: nodes.iter().map(|n| n.lam_plus).collect(),
        lambda_minus: nodes.iter().map(|n| n.lam_minus).collect(),
        departures_plus: DepartureTable::build(&flux, f, Sign::Positive)?,
        departures_minus: DepartureTable::build(&flux, g, Sign::Negative)?,
        flux,
        interface_value,
        times,
        connection,
        critical: check.critical,
    })
}

impl InterfaceProfile {
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }

    /// Interval index and fraction for `t ∈ [0, T]`.
    fn locate(&self, t: f64) -> Result<(usize, f64), InterfaceError> {
        let horizon = self.horizon();
        if !(t >= 0.0 && t <= horizon * (1.0 + 1e-12)) {
            return Err(InterfaceError::OutOfRange { t, horizon });
        }
        let dt = self.dt();
        let k = ((t / dt).floor() as usize).min(self.intervals() - 1);
        let r = ((t - self.times[k]) / dt).clamp(0.0, 1.0);
        Ok((k, r))
    }

    fn interp(&self, series: &[f64], t: f64) -> Result<f64, InterfaceError> {
        let (k, r) = self.locate(t)?;
        Ok(series[k] + r * (series[k + 1] - series[k]))
    }

    pub fn lambda_plus_at(&self, t: f64) -> Result<f64, InterfaceError> {
        self.interp(&self.lambda_plus, t)
    }

    pub fn lambda_minus_at(&self, t: f64) -> Result<f64, InterfaceError> {
        self.interp(&self.lambda_minus, t)
    }

    /// `v(0, t)`, linear between nodes.
    pub fn interface_value_at(&self, t: f64) -> Result<f64, InterfaceError> {
        self.interp(&self.interface_value, t)
    }

    /// `feeding_side` at node `k`.
    pub fn feed_at(&self, k: usize, f: &ConvexFlux) -> Option<Sign> {
        feeding_side(self.bprime_plus[k], self.bprime_minus[k], f.eval(self.connection.b))
    }

    pub fn departures(&self, side: Sign) -> &DepartureTable {
        match side {
            Sign::Positive => &self.departures_plus,
            Sign::Negative => &self.departures_minus,
        }
    }

    /// CSV with columns `t,b_plus,b_minus,bprime_plus,bprime_minus,lambda_plus,lambda_minus,y_plus,y_minus`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,b_plus,b_minus,bprime_plus,bprime_minus,lambda_plus,lambda_minus,y_plus,y_minus\n");
        for k in 0..self.times.len() {
            let row = [
                self.times[k],
                self.b_plus[k],
                self.b_minus[k],
                self.bprime_plus[k],
                self.bprime_minus[k],
                self.lambda_plus[k],
                self.lambda_minus[k],
                self.y_plus[k],
                self.y_minus[k],
            ];
            out.push_str(&crate::fmt_row(&row));
            out.push('\n');
        }
        out
    }

    /// Largest `|f(λ+) - g(λ-)|` over the nodes.
    pub fn rankine_hugoniot_residual(&self, f: &ConvexFlux, g: &ConvexFlux) -> f64 {
        self.lambda_plus
            .iter()
            .zip(&self.lambda_minus)
            .map(|(&lp, &lm)| (f.eval(lp) - g.eval(lm)).abs())
            .fold(0.0, f64::max)
    }

    /// `I_AB(t)` at each node with the traces `u(0±, t) = λ±(t)`.
    pub fn interface_entropy(&self, f: &ConvexFlux, g: &ConvexFlux) -> Vec<f64> {
        let Connection { a, b } = self.connection;
        self.lambda_plus
            .iter()
            .zip(&self.lambda_minus)
            .map(|(&up, &um)| {
                (g.eval(um) - g.eval(a)) * sign(um - a) - (f.eval(up) - f.eval(b)) * sign(up - b)
            })
            .collect()
    }

    /// Nodes where `f'(u(0+)) > tol` and `g'(u(0-)) < -tol` together.
    pub fn critical_entropy_violations(&self, f: &ConvexFlux, g: &ConvexFlux, tol: f64) -> usize {
        self.lambda_plus
            .iter()
            .zip(&self.lambda_minus)
            .filter(|(&up, &um)| f.deriv(up) > tol && g.deriv(um) < -tol)
            .count()
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flux(key: &str) -> ConvexFlux {
        ConvexFlux::builtin(key, (-4.0, 4.0)).unwrap()
    }

    #[test]
    fn feeding_side_picks_the_largest_flux() {
        assert_eq!(feeding_side(-2.0, -1.0, 0.5), Some(Sign::Positive));
        assert_eq!(feeding_side(-1.0, -2.0, 0.5), Some(Sign::Negative));
        assert_eq!(feeding_side(-1.0, -1.0, 0.5), Some(Sign::Negative));
        assert_eq!(feeding_side(-1.0, -1.0, 1.0), None);
        assert_eq!(feeding_side(-0.2, -0.1, 0.5), None);
    }

    /// brute force over the go-then-rest family (y, s) on a 400 x 400 grid
    fn scan_b(t: f64, v0: &InitialProfile, h: &ConvexFlux, side: Sign) -> f64 {
        let (p_lo, p_hi) = h.slope_range();
        let y_max = match side {
            Sign::Positive => -t * p_lo,
            Sign::Negative => t * p_hi,
        };
        let rest = h.legendre(0.0).unwrap();
        let mut best = t * rest;
        for i in 1..=400 {
            let y = match side {
                Sign::Positive => y_max * i as f64 / 400.0,
                Sign::Negative => -y_max * i as f64 / 400.0,
            };
            for j in 1..=400 {
                let s = t * j as f64 / 400.0;
                let Ok(c) = h.legendre(-y / s) else { continue };
                best = best.min(v0.v0(y) + s * c + (t - s) * rest);
            }
        }
        best
    }

    #[test]
    fn b_for_zero_data_and_burgers_is_zero() {
        let f = flux("burgers");
        let zero = InitialProfile::constant(0.0);
        for &t in &[0.3, 1.0, 2.5] {
            let b = compute_b(t, &zero, &f, Sign::Positive).unwrap();
            assert!(b.value.abs() < 1e-14);
            assert_eq!(b.y_foot, 0.0);
            assert_eq!(b.rest_fraction, 1.0);
            assert!(b.value <= scan_b(t, &zero, &f, Sign::Positive) + 1e-12);
        }
    }

    #[test]
    fn b_for_zero_data_and_shifted_flux() {
        // scanned optimum over the (y, s) family: b+(t) = -t f(0) = 0 at y = 2t
        let f = flux("shifted");
        let zero = InitialProfile::constant(0.0);
        let t = 1.0;
        let oracle = scan_b(t, &zero, &f, Sign::Positive);
        let b = compute_b(t, &zero, &f, Sign::Positive).unwrap();
        assert!(oracle.abs() < 1e-12);
        assert!((b.value - oracle).abs() < 1e-12);
        assert!((b.y_foot - 2.0 * t).abs() < 1e-12);
        assert_eq!(b.rest_fraction, 0.0);
    }

    #[test]
    fn b_for_large_constant_data_uses_a_direct_curve() {
        let f = flux("burgers");
        let data = InitialProfile::constant(-2.5);
        let t = 0.8;
        let b = compute_b(t, &data, &f, Sign::Positive).unwrap();
        assert_eq!(b.rest_fraction, 0.0);
        assert!((b.y_foot - 2.5 * t).abs() < 1e-12);
        assert!(b.value <= scan_b(t, &data, &f, Sign::Positive) + 1e-12);
        let g = flux("square");
        let bm = compute_b(t, &InitialProfile::constant(-1.0), &g, Sign::Negative).unwrap();
        assert!(bm.value <= scan_b(t, &InitialProfile::constant(-1.0), &g, Sign::Negative) + 1e-12);
    }

    #[test]
    fn b_never_beaten_by_rest_family_scan() {
        let f = flux("shifted");
        let g = flux("square");
        let d = InitialProfile::piecewise_constant(vec![-1.0, -0.3, 0.4, 1.1], vec![0.0, 0.9, -0.5, 0.3, 0.0]).unwrap();
        for &t in &[0.2, 0.7, 1.5] {
            let bp = compute_b(t, &d, &f, Sign::Positive).unwrap();
            assert!(bp.value <= scan_b(t, &d, &f, Sign::Positive) + 1e-12);
            let bm = compute_b(t, &d, &g, Sign::Negative).unwrap();
            assert!(bm.value <= scan_b(t, &d, &g, Sign::Negative) + 1e-12);
        }
    }

    #[test]
    fn bprime_examples() {
        let g = flux("square");
        assert_eq!(compute_bprime(1.0, &g, 0.0).unwrap(), -g.min_value());
        let f = flux("shifted");
        assert_eq!(compute_bprime(1.0, &f, 0.0).unwrap(), 1.0);
        let t = 0.7;
        assert!((compute_bprime(t, &g, -2.0 * t).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn bprime_matches_difference_quotient() {
        let f = flux("shifted");
        let d = InitialProfile::piecewise_constant(vec![0.5, 1.5], vec![0.0, -0.3, 0.2]).unwrap();
        let (t, h) = (0.6, 1e-6);
        let b = compute_b(t, &d, &f, Sign::Positive).unwrap();
        let fd = (compute_b(t + h, &d, &f, Sign::Positive).unwrap().value
            - compute_b(t - h, &d, &f, Sign::Positive).unwrap().value)
            / (2.0 * h);
        assert!((compute_bprime(t, &f, b.y_foot).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn lambda_examples() {
        let f = flux("burgers");
        let g = flux("burgers");
        let conn = Connection::new(-1.0, 1.0);
        // -b'+ <= max(-b'-, f(B)), -b'- < f(B): second branches with f(B) = 1/2
        let (lp, lm) = compute_lambda(0.0, 0.0, &f, &g, &conn).unwrap();
        assert!((lp - 1.0).abs() < 1e-12 && (lm + 1.0).abs() < 1e-12);
        // -b'+ = -b'- = v > f(B)
        let v = 2.0;
        let (lp, lm) = compute_lambda(-v, -v, &f, &g, &conn).unwrap();
        assert!((lp - 2.0).abs() < 1e-12);
        assert!((lm - 2.0).abs() < 1e-12);
        assert!((f.eval(lp) - g.eval(lm)).abs() < 1e-12);
    }

    #[test]
    fn profile_for_zero_data_is_constant() {
        let f = flux("burgers");
        let zero = InitialProfile::constant(0.0);
        let p = build_profile(&zero, &f, &f, Connection::new(-1.0, 1.0), 2.0, 0.05).unwrap();
        assert!(p.lambda_plus.iter().all(|&l| l == p.lambda_plus[0]));
        assert!(p.lambda_minus.iter().all(|&l| l == p.lambda_minus[0]));
        assert!((p.lambda_plus[0] - 1.0).abs() < 1e-12);
        assert!((p.lambda_minus[0] + 1.0).abs() < 1e-12);
        assert!(!p.critical);
    }

    #[test]
    fn critical_profile_is_flagged() {
        let f = flux("shifted");
        let g = flux("square");
        let p = build_profile(&InitialProfile::constant(0.0), &f, &g, Connection::new(0.0, 2.0), 1.0, 0.1).unwrap();
        assert!(p.critical);
        assert!(p.rankine_hugoniot_residual(&f, &g) < 1e-8);
    }

    #[test]
    fn noncritical_counterexample_pipeline_regression() {
        // u0 = 0, A = -1, B = 1 + √2: b'+ = -f(0) = 0 (foot 2t), b'- = -g(θ_g) = 0,
        // so the max branch picks f(B) = 1 and λ± = (B, A).
        let f = flux("shifted");
        let g = flux("square");
        let conn = Connection::new(-1.0, 1.0 + 2f64.sqrt());
        let p = build_profile(&InitialProfile::constant(0.0), &f, &g, conn, 1.0, 0.01).unwrap();
        let k = p.times.len() - 1;
        assert!((p.y_plus[k] - 2.0).abs() < 1e-12);
        assert!(p.bprime_plus[k].abs() < 1e-12 && p.bprime_minus[k].abs() < 1e-12);
        assert!((p.lambda_plus[k] - conn.b).abs() < 1e-10);
        assert!((p.lambda_minus[k] - conn.a).abs() < 1e-10);
    }

    #[test]
    fn rejects_invalid_connection() {
        let f = flux("shifted");
        let g = flux("square");
        assert!(matches!(
            build_profile(&InitialProfile::constant(0.0), &f, &g, Connection::new(1.0, 0.5), 1.0, 0.1),
            Err(InterfaceError::InvalidConnection { .. })
        ));
    }

    #[test]
    fn profile_invariants_on_riemann_data() {
        let f = flux("shifted");
        let g = flux("square");
        let d = InitialProfile::piecewise_constant(vec![-0.8, 0.0, 0.6], vec![0.0, 1.2, -0.4, 0.5]).unwrap();
        let conn = Connection::from_left(&f, &g, -1.0).unwrap();
        let p = build_profile(&d, &f, &g, conn, 2.0, 0.01).unwrap();
        assert!(p.rankine_hugoniot_residual(&f, &g) < 1e-8);
        assert!(p.interface_entropy(&f, &g).iter().all(|&i| i >= -1e-6));
        for w in p.y_plus.windows(2) {
            assert!(w[1] >= w[0] - 1e-8);
        }
        for w in p.y_minus.windows(2) {
            assert!(w[1] <= w[0] + 1e-8);
        }
        // flux matching on the second branch of λ+
        for k in 0..p.times.len() {
            let m = (-p.bprime_minus[k]).max(f.eval(conn.b));
            if -p.bprime_plus[k] <= m {
                assert!((f.eval(p.lambda_plus[k]) - m).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn bprime_freezes_once_compact_data_is_exhausted() {
        let f = flux("shifted");
        let g = flux("square");
        let d = InitialProfile::piecewise_constant(vec![-0.5, 0.5], vec![0.0, 0.4, 0.0]).unwrap();
        let p = build_profile(&d, &f, &g, Connection::new(0.0, 2.0), 6.0, 0.01).unwrap();
        let m = 0.5;
        let mut seen = None;
        for k in 1..p.times.len() {
            if p.y_minus[k] < -m - 1e-12 {
                let first = *seen.get_or_insert(p.bprime_minus[k]);
                assert!((p.bprime_minus[k] - first).abs() < 1e-12);
            }
        }
    }
}
