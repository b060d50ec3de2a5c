//! Value functions `v±(x, t)`, the entropy solution `u = v_x` from the
//! optimal control curves, per-point characteristic feet, and the fronts
//! `R(t)`, `L(t)`.
//!
//! On the side of `x`, a control curve either runs straight from the data
//! (`DataFoot`) or leaves the interface at `t1` (`InterfaceFoot`). The cost of
//! a departure at `t1` is `V(t1) + (t - t1) h*(x / (t - t1))`, where
//! `V(s) = -∫_0^s f(λ+) = -∫_0^s g(λ-)`. On a profile interval fed by one
//! side's data `V` follows `b±` exactly; elsewhere the interface flux is
//! linear between nodes. The cost is C¹ in `t1` with derivative
//! `h(q) - F(t1)`, `q` the state of the straight segment; its sign at the
//! nodes brackets every local minimum, which is refined by bisection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flux::{Connection, ConvexFlux, FluxError, Monotone};
use crate::interface::{compute_b, compute_bprime, foot_is_zero, InterfaceError, InterfaceProfile};
use crate::lax_oleinik::{direct_minimum, tie_tol, FootTie};
use crate::paths::{make_curve, ControlCurve, InitialProfile, PathError, Sign};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HjError {
    #[error(transparent)]
    Flux(#[from] FluxError),
    #[error(transparent)]
    Interface(#[from] InterfaceError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("point (x = {x}, t = {t}) needs x != 0 and t > 0")]
    BadPoint { x: f64, t: f64 },
    #[error("t = {t} exceeds the profile horizon {horizon}")]
    BeyondProfile { t: f64, horizon: f64 },
    #[error("no control curve reaches (x = {x}, t = {t}) inside the flux bracket")]
    SlopeOutOfRange { x: f64, t: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Departures earlier than this fraction of `t` count as data feet.
pub const MIN_DEPARTURE_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Foot {
    #[serde(rename = "data")]
    Data { y: f64 },
    #[serde(rename = "interface")]
    Interface { tau: f64 },
}

impl Foot {
    pub fn is_data(&self) -> bool {
        matches!(self, Foot::Data { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Foot::Data { .. } => "data",
            Foot::Interface { .. } => "interface",
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Foot::Data { y } => y,
            Foot::Interface { tau } => tau,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueSample {
    pub x: f64,
    pub t: f64,
    pub v: f64,
    pub u: f64,
    pub foot: Foot,
    pub optimizer: ControlCurve,
}

/// Flux pair, connection data and the profile they produced.
#[derive(Clone, Copy)]
pub struct Problem<'a> {
    pub f: &'a ConvexFlux,
    pub g: &'a ConvexFlux,
    pub data: &'a InitialProfile,
    pub profile: &'a InterfaceProfile,
}

impl<'a> Problem<'a> {
    fn side_flux(&self, side: Sign) -> &'a ConvexFlux {
        match side {
            Sign::Positive => self.f,
            Sign::Negative => self.g,
        }
    }
}

struct Departure {
    t1: f64,
    cost: f64,
    state: f64,
}

/// Best departure time from the interface toward `(x, t)`.
fn best_departure(pb: &Problem, x: f64, t: f64) -> Result<Option<Departure>, HjError> {
    let side = Sign::of(x);
    let h = pb.side_flux(side);
    let table = pb.profile.departures(side);
    let times = &pb.profile.times;
    let vals = &pb.profile.interface_value;
    let (p_lo, p_hi) = h.slope_range();

    // x / (t - t1) must stay inside the slope range
    let limit = match side {
        Sign::Positive => p_hi,
        Sign::Negative => p_lo,
    };
    if limit == 0.0 || limit.signum() != x.signum() {
        return Ok(None);
    }
    let t_max = t - x / limit;
    if t_max < 0.0 {
        return Ok(None);
    }

    let flux = &pb.profile.flux;
    let n = flux.len() - 1;
    let dt = pb.profile.dt();
    let flux_at = |t1: f64, k: usize| flux[k] + (flux[k + 1] - flux[k]) * ((t1 - times[k]) / dt);
    // side whose data feeds the interface over all of interval k
    let fed_side = |k: usize| {
        let fed = pb.profile.feed_at(k, pb.f);
        fed.filter(|_| fed == pb.profile.feed_at(k + 1, pb.f))
    };
    // V(t1) and the interface flux at t1 in interval k: exact from b_s while
    // side s feeds the interface, linear flux otherwise
    let interface_at = |t1: f64, k: usize| -> Result<(f64, f64), HjError> {
        match fed_side(k) {
            Some(side) => {
                let hs = pb.side_flux(side);
                let b_node = match side {
                    Sign::Positive => pb.profile.b_plus[k],
                    Sign::Negative => pb.profile.b_minus[k],
                };
                let b = compute_b(t1, pb.data, hs, side)?;
                Ok((vals[k] + b.value - b_node, -compute_bprime(t1, hs, b.y_foot)?))
            }
            None => {
                let f1 = flux_at(t1, k);
                Ok((vals[k] - 0.5 * (t1 - times[k]) * (flux[k] + f1), f1))
            }
        }
    };
    let departure_cost = |t1: f64, k: usize| -> Result<Departure, HjError> {
        let s = (x / (t - t1)).clamp(p_lo, p_hi);
        let q = h.deriv_inverse(s)?;
        let (v_int, _) = if t1 > times[k] { interface_at(t1, k)? } else { (vals[k], flux[k]) };
        Ok(Departure {
            t1,
            cost: v_int + (t - t1) * (s * q - h.eval(q)),
            state: q,
        })
    };
    // derivative of the cost, h(q) - F(t1)
    let slope = |t1: f64, k: usize| -> Result<f64, HjError> {
        let q = h.deriv_inverse((x / (t - t1)).clamp(p_lo, p_hi))?;
        Ok(h.eval(q) - interface_at(t1, k)?.1)
    };
    // same sign as the derivative at a node, from the tabulated speeds
    let rising = |k: usize| x.signum() * (x / (t - times[k]) - table.speed[k]) > 0.0;

    let k_end = ((t_max / dt).floor() as usize).min(n - 1);
    let mut cands = vec![departure_cost(0.0, 0)?];
    if t_max > 0.0 {
        cands.push(departure_cost(t_max, k_end)?);
    }
    for k in 0..=k_end {
        if rising(k) {
            // the node value may sit below the carried one, leaving a local minimum there
            let carried = |k: usize| vals[k - 1] - 0.5 * dt * (flux[k - 1] + flux[k]);
            if k >= 1 && times[k] < t_max && vals[k] < carried(k) {
                cands.push(departure_cost(times[k], k)?);
            }
            continue;
        }
        let (a, b) = (times[k], times[k + 1].min(t_max));
        let ends_rising = if times[k + 1] < t_max { rising(k + 1) } else { slope(b, k)? > 0.0 };
        if !ends_rising || !(b > a) {
            continue;
        }
        let (mut lo, mut hi) = (a, b);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if slope(mid, k)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        cands.push(departure_cost(0.5 * (lo + hi), k)?);
    }

    let lowest = cands.iter().map(|c| c.cost).fold(f64::INFINITY, f64::min);
    let tol = tie_tol(lowest);
    Ok(cands
        .into_iter()
        .filter(|c| c.cost <= lowest + tol)
        .reduce(|acc, c| {
            let later = c.t1 > acc.t1;
            match side {
                Sign::Positive if later => c,
                Sign::Negative if !later && c.t1 < acc.t1 => c,
                _ => acc,
            }
        }))
}

/// Optimal value and control curve at `(x, t)`, `x != 0`.
pub fn value_at(x: f64, t: f64, pb: &Problem) -> Result<ValueSample, HjError> {
    if !(x != 0.0 && x.is_finite() && t > 0.0) {
        return Err(HjError::BadPoint { x, t });
    }
    let horizon = pb.profile.horizon();
    if t > horizon * (1.0 + 1e-12) {
        return Err(HjError::BeyondProfile { t, horizon });
    }
    let side = Sign::of(x);
    let h = pb.side_flux(side);
    let (lo, hi, tie) = match side {
        Sign::Positive => (0.0, f64::INFINITY, FootTie::Smallest),
        Sign::Negative => (f64::NEG_INFINITY, 0.0, FootTie::Largest),
    };
    let direct = direct_minimum(h, pb.data, x, t, lo, hi, tie)?;
    let departure = best_departure(pb, x, t)?;

    let use_interface = match (&direct, &departure) {
        (_, None) => false,
        (None, Some(_)) => true,
        (Some(d), Some(dep)) => {
            dep.t1 >= MIN_DEPARTURE_FRACTION * t && dep.cost <= d.cost - tie_tol(d.cost)
        }
    };
    if use_interface {
        let dep = departure.unwrap();
        return Ok(ValueSample {
            x,
            t,
            v: dep.cost,
            u: dep.state,
            foot: Foot::Interface { tau: dep.t1 },
            optimizer: make_curve(t, x, 0.0, 0.0, dep.t1, side)?,
        });
    }
    let d = direct.ok_or(HjError::SlopeOutOfRange { x, t })?;
    Ok(ValueSample {
        x,
        t,
        v: d.cost,
        u: d.state,
        foot: Foot::Data { y: d.foot },
        optimizer: make_curve(t, x, d.foot, 0.0, 0.0, side)?,
    })
}

/// Spatial grid excluding 0: uniform spacing `(hi - lo) / n` away from the
/// interface, refined geometrically (ratio 1.1) down to `1e-4 (hi - lo)` near it.
pub fn clustered_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, HjError> {
    if !(lo < hi) || n < 2 {
        return Err(HjError::InvalidGrid(format!("[{lo}, {hi}] with n = {n}")));
    }
    let width = hi - lo;
    let dx = width / n as f64;
    let dx_min = (1e-4 * width).min(dx);
    let half_line = |reach: f64| -> Vec<f64> {
        let mut xs = Vec::new();
        let mut x = 0.5 * dx_min;
        let mut step = dx_min;
        while x <= reach {
            xs.push(x);
            x += step;
            step = (step * 1.1).min(dx);
        }
        xs
    };
    let mut xs: Vec<f64> = if lo < 0.0 {
        half_line(-lo).into_iter().rev().map(|x| -x).collect()
    } else {
        vec![]
    };
    if hi > 0.0 {
        xs.extend(half_line(hi));
    }
    xs.retain(|&x| x >= lo && x <= hi);
    Ok(xs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionField {
    pub t: f64,
    pub xs: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub foot: Vec<Foot>,
    /// Right front `R(t) >= 0`.
    pub r: f64,
    /// Left front `L(t) <= 0`.
    pub l: f64,
    /// Interface traces `(λ+(t), λ-(t))`.
    pub traces: (f64, f64),
}

pub fn solve_field(t: f64, xs: &[f64], pb: &Problem) -> Result<SolutionField, HjError> {
    let samples = xs
        .par_iter()
        .map(|&x| value_at(x, t, pb))
        .collect::<Result<Vec<_>, _>>()?;
    let foot: Vec<Foot> = samples.iter().map(|s| s.foot).collect();
    let (r, l) = fronts(t, xs, &foot, pb)?;
    Ok(SolutionField {
        t,
        xs: xs.to_vec(),
        u: samples.iter().map(|s| s.u).collect(),
        v: samples.iter().map(|s| s.v).collect(),
        foot,
        r,
        l,
        traces: interface_traces(pb.profile, t)?,
    })
}

/// `R(t) = min{x > 0 : data foot}`, `L(t) = max{x < 0 : data foot}`, bracketed
/// on the nodes and then refined by bisection on the foot type.
pub fn fronts(t: f64, xs: &[f64], foot: &[Foot], pb: &Problem) -> Result<(f64, f64), HjError> {
    let is_data = |x: f64| value_at(x, t, pb).map(|s| s.foot.is_data());
    let refine = |inside: f64, outside: f64| -> Result<f64, HjError> {
        let (mut a, mut b) = (inside, outside);
        for _ in 0..40 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if is_data(m)? {
                b = m;
            } else {
                a = m;
            }
        }
        Ok(b)
    };

    let first_pos = xs.partition_point(|&x| x < 0.0);
    let r = match (first_pos..xs.len()).find(|&i| foot[i].is_data()) {
        None => xs.last().copied().unwrap_or(0.0).max(0.0),
        Some(i) if i == first_pos => 0.0,
        Some(i) => refine(xs[i - 1], xs[i])?,
    };
    let l = match (0..first_pos).rev().find(|&i| foot[i].is_data()) {
        None => xs.first().copied().unwrap_or(0.0).min(0.0),
        Some(i) if i + 1 == first_pos => 0.0,
        Some(i) => refine(xs[i + 1], xs[i])?,
    };
    Ok((r, l))
}

/// `(u(0+, t), u(0-, t)) = (λ+(t), λ-(t))`.
pub fn interface_traces(profile: &InterfaceProfile, t: f64) -> Result<(f64, f64), HjError> {
    Ok((profile.lambda_plus_at(t)?, profile.lambda_minus_at(t)?))
}

/// State leaving the interface at time `tau` into the side of `side`,
/// evaluated from freshly computed feet of the opposite side rather than the
/// gridded profile.
///
/// Non-critical: `f+^{-1}(max(-b'-(τ), f(B)))` for `x > 0`,
/// `g-^{-1}(max(-b'+(τ), g(A)))` for `x < 0`. Critical: `f+^{-1}(g(w))` with
/// `w` the state carried from the left foot (`θ_g` when that foot is 0), and
/// symmetrically `g-^{-1}(f(w))`.
pub fn chain_state(
    side: Sign,
    tau: f64,
    data: &InitialProfile,
    f: &ConvexFlux,
    g: &ConvexFlux,
    conn: &Connection,
    critical: bool,
) -> Result<f64, HjError> {
    let (own, other, other_side, own_branch, floor) = match side {
        Sign::Positive => (f, g, Sign::Negative, Monotone::Increasing, f.eval(conn.b)),
        Sign::Negative => (g, f, Sign::Positive, Monotone::Decreasing, g.eval(conn.a)),
    };
    let b = compute_b(tau, data, other, other_side)?;
    if critical {
        let w = if foot_is_zero(b.y_foot, tau) {
            other.theta()
        } else {
            other.deriv_inverse(-b.y_foot / tau)?
        };
        Ok(own.branch_inverse(own_branch, other.eval(w))?)
    } else {
        let bp = compute_bprime(tau, other, b.y_foot)?;
        Ok(own.branch_inverse(own_branch, (-bp).max(floor))?)
    }
}

/// Counts of violated monotonicity properties of the feet on one field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// `y+(x, t)` non-decreasing on `[R, ∞)`.
    pub y_plus: usize,
    /// `t+(x, t)` non-increasing on `(0, R)`.
    pub t_plus: usize,
    /// `t-(x, t)` non-decreasing on `(L, 0)`.
    pub t_minus: usize,
    /// `y-(x, t)` non-decreasing on `(-∞, L]`.
    pub y_minus: usize,
    /// Front outside `[-C t, C t]`.
    pub fronts: usize,
}

impl MonotonicityReport {
    pub fn total(&self) -> usize {
        self.y_plus + self.t_plus + self.t_minus + self.y_minus + self.fronts
    }
}

pub fn monotonicity(field: &SolutionField, speed_bound: f64, tol: f64) -> MonotonicityReport {
    let mut rep = MonotonicityReport::default();
    let n = field.xs.len();
    for i in 0..n.saturating_sub(1) {
        let (xa, xb) = (field.xs[i], field.xs[i + 1]);
        if xa.signum() != xb.signum() {
            continue;
        }
        match (field.foot[i], field.foot[i + 1]) {
            (Foot::Data { y: ya }, Foot::Data { y: yb }) if yb < ya - tol => {
                if xa > 0.0 {
                    rep.y_plus += 1;
                } else {
                    rep.y_minus += 1;
                }
            }
            (Foot::Interface { tau: ta }, Foot::Interface { tau: tb }) => {
                if xa > 0.0 && tb > ta + tol {
                    rep.t_plus += 1;
                }
                if xa < 0.0 && tb < ta - tol {
                    rep.t_minus += 1;
                }
            }
            // the interface region must be a single block adjacent to 0
            (Foot::Data { .. }, Foot::Interface { .. }) if xa > 0.0 => rep.t_plus += 1,
            (Foot::Interface { .. }, Foot::Data { .. }) if xa < 0.0 => rep.t_minus += 1,
            _ => {}
        }
    }
    let bound = speed_bound * field.t + tol;
    if field.r < -tol || field.r > bound {
        rep.fronts += 1;
    }
    if field.l > tol || field.l < -bound {
        rep.fronts += 1;
    }
    rep
}

/// Gap between the one-sided limits `v(0±, t)`, each obtained by linear
/// extrapolation from `x = ±ε, ±2ε`.
pub fn value_gap_at_interface(t: f64, eps: f64, pb: &Problem) -> Result<f64, HjError> {
    let v = |x: f64| value_at(x, t, pb).map(|s| s.v);
    let right = 2.0 * v(eps)? - v(2.0 * eps)?;
    let left = 2.0 * v(-eps)? - v(-2.0 * eps)?;
    Ok((right - left).abs())
}

impl SolutionField {
    /// CSV with columns `x,u,foot_type,foot_value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,u,foot_type,foot_value\n");
        for i in 0..self.xs.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{},{:.16e}\n",
                self.xs[i],
                self.u[i],
                self.foot[i].kind(),
                self.foot[i].value()
            ));
        }
        out
    }

    pub fn sidecar_json(&self) -> serde_json::Value {
        serde_json::json!({
            "t": self.t,
            "R": self.r,
            "L": self.l,
            "u_plus": self.traces.0,
            "u_minus": self.traces.1,
        })
    }

    /// Values at nodes with `lo < x < hi`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.xs
            .iter()
            .zip(&self.u)
            .filter(|(&x, _)| x > lo && x < hi)
            .map(|(_, &u)| u)
            .collect()
    }
}
