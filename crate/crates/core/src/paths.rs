//! Control curves, initial data primitives, and the cost functionals `J`, `J±`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flux::{ConvexFlux, FluxError};
use crate::numeric::adaptive_simpson;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("curve leaves the {0:?} half-plane")]
    SignViolation(Sign),
    #[error("times must satisfy 0 <= t2 <= t1 <= t (got t2 = {t2}, t1 = {t1}, t = {t})")]
    TimeOrderViolation { t2: f64, t1: f64, t: f64 },
    #[error("curve jumps between ({from}) and ({to}) in zero time")]
    Discontinuous { from: String, to: String },
    #[error(transparent)]
    SlopeOutOfRange(#[from] FluxError),
    #[error("invalid initial data: {0}")]
    InvalidData(String),
}

/// Membership tag for `Γ+` (curves in `x >= 0`) or `Γ-` (curves in `x <= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    fn admits(self, x: f64) -> bool {
        match self {
            Sign::Positive => x >= 0.0,
            Sign::Negative => x <= 0.0,
        }
    }
}

/// One linear piece of a control curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub x_start: f64,
    pub x_end: f64,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn slope(&self) -> f64 {
        (self.x_end - self.x_start) / self.duration()
    }

    pub fn on_interface(&self) -> bool {
        self.x_start == 0.0 && self.x_end == 0.0
    }
}

/// Path `(y, 0) -> (0, t2) -> (0, t1) -> (x, t)`; with `t1 = 0` it is the
/// single segment `(y, 0) -> (x, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlCurve {
    pub t_end: f64,
    pub x_end: f64,
    pub y: f64,
    pub t2: f64,
    pub t1: f64,
    pub sign: Sign,
}

pub fn make_curve(t: f64, x: f64, y: f64, t2: f64, t1: f64, sign: Sign) -> Result<ControlCurve, PathError> {
    if !(0.0 <= t2 && t2 <= t1 && t1 <= t) {
        return Err(PathError::TimeOrderViolation { t2, t1, t });
    }
    if !sign.admits(y) || !sign.admits(x) {
        return Err(PathError::SignViolation(sign));
    }
    if t1 > 0.0 {
        if t2 == 0.0 && y != 0.0 {
            return Err(PathError::Discontinuous {
                from: format!("{y}, 0"),
                to: "0, 0".into(),
            });
        }
        if t1 == t && x != 0.0 {
            return Err(PathError::Discontinuous {
                from: format!("0, {t}"),
                to: format!("{x}, {t}"),
            });
        }
    }
    Ok(ControlCurve {
        t_end: t,
        x_end: x,
        y,
        t2,
        t1,
        sign,
    })
}

impl ControlCurve {
    /// Breakpoint times `[t3 = 0, t2, t1, t0 = t]`.
    pub fn times(&self) -> [f64; 4] {
        [0.0, self.t2, self.t1, self.t_end]
    }

    /// Curve positions at [`Self::times`].
    pub fn positions(&self) -> [f64; 4] {
        if self.is_direct() {
            let at = |s: f64| self.position(s);
            [self.y, at(self.t2), at(self.t1), self.x_end]
        } else {
            [self.y, 0.0, 0.0, self.x_end]
        }
    }

    /// Never touches the interface except possibly at its endpoints.
    pub fn is_direct(&self) -> bool {
        self.t1 == 0.0
    }

    /// Non-degenerate linear pieces in time order.
    pub fn segments(&self) -> Vec<Segment> {
        if self.is_direct() {
            return vec![Segment {
                t_start: 0.0,
                t_end: self.t_end,
                x_start: self.y,
                x_end: self.x_end,
            }];
        }
        let mut out = Vec::with_capacity(3);
        if self.t2 > 0.0 {
            out.push(Segment {
                t_start: 0.0,
                t_end: self.t2,
                x_start: self.y,
                x_end: 0.0,
            });
        }
        if self.t1 > self.t2 {
            out.push(Segment {
                t_start: self.t2,
                t_end: self.t1,
                x_start: 0.0,
                x_end: 0.0,
            });
        }
        if self.t_end > self.t1 {
            out.push(Segment {
                t_start: self.t1,
                t_end: self.t_end,
                x_start: 0.0,
                x_end: self.x_end,
            });
        }
        out
    }

    pub fn position(&self, s: f64) -> f64 {
        for seg in self.segments() {
            if s <= seg.t_end {
                let r = if seg.duration() > 0.0 {
                    (s - seg.t_start) / seg.duration()
                } else {
                    1.0
                };
                return seg.x_start + r * (seg.x_end - seg.x_start);
            }
        }
        self.x_end
    }

    /// Time spent resting on the interface.
    pub fn rest_time(&self) -> f64 {
        self.segments()
            .iter()
            .filter(|s| s.on_interface())
            .map(Segment::duration)
            .sum()
    }
}

/// Bounded initial data `u0`, stored piecewise constant, with its exact
/// primitive `v0(x) = ∫_0^x u0` (so `v0(0) = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialProfile {
    breaks: Vec<f64>,
    values: Vec<f64>,
    primitive: Vec<f64>,
}

impl InitialProfile {
    /// `values[k]` holds on `(breaks[k-1], breaks[k])`, with the outer values
    /// extended to ±∞.
    pub fn piecewise_constant(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self, PathError> {
        if values.len() != breaks.len() + 1 {
            return Err(PathError::InvalidData(format!(
                "{} breaks need {} values, got {}",
                breaks.len(),
                breaks.len() + 1,
                values.len()
            )));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(PathError::InvalidData("breakpoints must be finite and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PathError::InvalidData("values must be finite".into()));
        }
        // merge equal neighbours so every break is a genuine jump
        let mut b = Vec::with_capacity(breaks.len());
        let mut v = vec![values[0]];
        for (k, &x) in breaks.iter().enumerate() {
            if values[k + 1] != *v.last().unwrap() {
                b.push(x);
                v.push(values[k + 1]);
            }
        }
        let mut primitive = Vec::with_capacity(b.len());
        let mut acc = 0.0;
        for k in 0..b.len() {
            if k > 0 {
                acc += v[k] * (b[k] - b[k - 1]);
            }
            primitive.push(acc);
        }
        let mut profile = InitialProfile {
            breaks: b,
            values: v,
            primitive,
        };
        let shift = profile.primitive_at(0.0);
        for p in &mut profile.primitive {
            *p -= shift;
        }
        Ok(profile)
    }

    pub fn constant(c: f64) -> Self {
        InitialProfile {
            breaks: vec![],
            values: vec![c],
            primitive: vec![],
        }
    }

    /// Cell averages of `u0` on a uniform lookup grid of `cells` cells over
    /// `[lo, hi]`, each by adaptive Simpson quadrature to 1e-10. Outside the
    /// grid the data is extended by `u0(lo)` and `u0(hi)`.
    pub fn from_fn<F: Fn(f64) -> f64>(u0: F, lo: f64, hi: f64, cells: usize) -> Result<Self, PathError> {
        if !(lo < hi) || cells == 0 {
            return Err(PathError::InvalidData("empty lookup grid".into()));
        }
        let dx = (hi - lo) / cells as f64;
        let mut breaks = Vec::with_capacity(cells + 1);
        let mut values = Vec::with_capacity(cells + 2);
        values.push(u0(lo));
        for i in 0..cells {
            let a = lo + i as f64 * dx;
            breaks.push(a);
            values.push(adaptive_simpson(&u0, a, a + dx, 1e-10) / dx);
        }
        breaks.push(hi);
        values.push(u0(hi));
        Self::piecewise_constant(breaks, values)
    }

    /// Uniform cells on `[lo, hi]` holding the given samples, zero outside.
    pub fn sampled(lo: f64, hi: f64, samples: &[f64]) -> Result<Self, PathError> {
        if !(lo < hi) || samples.is_empty() {
            return Err(PathError::InvalidData("empty sample array".into()));
        }
        let dx = (hi - lo) / samples.len() as f64;
        let breaks: Vec<f64> = (0..=samples.len()).map(|i| lo + i as f64 * dx).collect();
        let mut values = Vec::with_capacity(samples.len() + 2);
        values.push(0.0);
        values.extend_from_slice(samples);
        values.push(0.0);
        Self::piecewise_constant(breaks, values)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of constant pieces.
    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    /// Piece `k` as `(left end, right end, value)`, ends possibly infinite.
    pub fn piece(&self, k: usize) -> (f64, f64, f64) {
        let a = if k == 0 { f64::NEG_INFINITY } else { self.breaks[k - 1] };
        let b = if k == self.breaks.len() { f64::INFINITY } else { self.breaks[k] };
        (a, b, self.values[k])
    }

    /// Index of the piece containing `x` (right-continuous at breaks).
    pub fn piece_index(&self, x: f64) -> usize {
        self.breaks.partition_point(|&b| b <= x)
    }

    pub fn u0(&self, x: f64) -> f64 {
        self.values[self.piece_index(x)]
    }

    /// `v0(x) = ∫_0^x u0`.
    pub fn v0(&self, x: f64) -> f64 {
        self.primitive_at(x)
    }

    fn primitive_at(&self, x: f64) -> f64 {
        if self.breaks.is_empty() {
            return self.values[0] * x;
        }
        let k = self.piece_index(x);
        if k == 0 {
            self.primitive[0] - self.values[0] * (self.breaks[0] - x)
        } else {
            self.primitive[k - 1] + self.values[k] * (x - self.breaks[k - 1])
        }
    }

    /// `v0` at break `j`.
    pub fn primitive_at_break(&self, j: usize) -> f64 {
        self.primitive[j]
    }

    /// Smallest interval outside of which `u0 = 0`, if the tails vanish.
    pub fn support(&self) -> Option<(f64, f64)> {
        let n = self.values.len();
        if self.values[0] != 0.0 || self.values[n - 1] != 0.0 {
            return None;
        }
        if n == 1 {
            return Some((0.0, 0.0));
        }
        Some((self.breaks[0], self.breaks[self.breaks.len() - 1]))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn value_range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Exact total variation of the piecewise-constant data.
    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }
}

/// `J(γ, v0, h) = v0(γ(0)) + ∫_0^t h*(γ'(θ)) dθ`.
pub fn cost_j(curve: &ControlCurve, v0: &InitialProfile, h: &ConvexFlux) -> Result<f64, PathError> {
    let mut cost = v0.v0(curve.y);
    for seg in curve.segments() {
        cost += seg.duration() * h.legendre(seg.slope())?;
    }
    Ok(cost)
}

/// `J±`: like [`cost_j`] but integrating only over times where the curve is
/// strictly on the `sign` side of the interface.
pub fn cost_jpm(curve: &ControlCurve, v0: &InitialProfile, h: &ConvexFlux, sign: Sign) -> Result<f64, PathError> {
    let mut cost = v0.v0(curve.y);
    for seg in curve.segments() {
        if seg.on_interface() {
            continue;
        }
        let inside = match sign {
            Sign::Positive => seg.x_start.max(seg.x_end) > 0.0,
            Sign::Negative => seg.x_start.min(seg.x_end) < 0.0,
        };
        if inside {
            cost += seg.duration() * h.legendre(seg.slope())?;
        }
    }
    Ok(cost)
}
