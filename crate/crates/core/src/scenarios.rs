//! Scenario files: flux pair, connection, initial data family and domain.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flux::{validate_connection, validate_hypotheses, Connection, ConvexFlux, FluxError, Monotone};
use crate::paths::{InitialProfile, PathError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error(transparent)]
    Flux(#[from] FluxError),
    #[error(transparent)]
    Data(#[from] PathError),
    #[error("connection (A, B) = ({a}, {b}) is invalid: {reason}")]
    InvalidConnection { a: f64, b: f64, reason: String },
    #[error("flux hypotheses fail: {0}")]
    Hypothesis(String),
    #[error("bracket too small: {0}")]
    Bracket(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("cannot read scenario: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxSpec {
    pub key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    pub bracket: [f64; 2],
}

impl FluxSpec {
    pub fn builtin(key: &str, bracket: [f64; 2]) -> Self {
        FluxSpec {
            key: key.into(),
            coeffs: None,
            bracket,
        }
    }

    pub fn polynomial(coeffs: Vec<f64>, bracket: [f64; 2]) -> Self {
        FluxSpec {
            key: "polynomial".into(),
            coeffs: Some(coeffs),
            bracket,
        }
    }

    pub fn build(&self) -> Result<ConvexFlux, ScenarioError> {
        let bracket = (self.bracket[0], self.bracket[1]);
        match (self.key.as_str(), &self.coeffs) {
            ("polynomial", Some(c)) => Ok(ConvexFlux::polynomial(c, bracket)?),
            ("polynomial", None) => Err(ScenarioError::Invalid("polynomial flux needs `coeffs`".into())),
            (key, _) => Ok(ConvexFlux::builtin(key, bracket)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectionMode {
    /// Both states given.
    #[serde(rename = "explicit")]
    Explicit,
    /// `A` given, `B` solved from `f(B) = g(A)`.
    #[serde(rename = "left")]
    FromLeft,
    /// `B` given, `A` solved from `g(A) = f(B)`.
    #[serde(rename = "right")]
    FromRight,
    #[serde(rename = "critical:A=theta_g")]
    CriticalA,
    #[serde(rename = "critical:B=theta_f")]
    CriticalB,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionSpec {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub mode: ConnectionMode,
}

impl ConnectionSpec {
    pub fn resolve(&self, f: &ConvexFlux, g: &ConvexFlux) -> Result<Connection, ScenarioError> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| ScenarioError::Invalid(format!("connection mode needs `{name}`")))
        };
        Ok(match self.mode {
            ConnectionMode::Explicit => Connection::new(need(self.a, "A")?, need(self.b, "B")?),
            ConnectionMode::FromLeft => Connection::from_left(f, g, need(self.a, "A")?)?,
            ConnectionMode::FromRight => Connection::from_right(f, g, need(self.b, "B")?)?,
            ConnectionMode::CriticalA => Connection::from_left(f, g, g.theta())?,
            ConnectionMode::CriticalB => Connection::from_right(f, g, f.theta())?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Both,
}

/// Alternating two-state data on shrinking intervals accumulating at `anchor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryParams {
    pub n_waves: usize,
    pub amplitude: f64,
    /// Ratio of consecutive wave lengths.
    pub decay: f64,
    /// Background state; the waves reach `offset + amplitude`.
    pub offset: f64,
    #[serde(default)]
    pub anchor: f64,
    #[serde(default = "one")]
    pub span: f64,
    #[serde(default = "right")]
    pub side: Side,
    /// When set, `n_waves = round(waves_per_node * N)` on a grid of `N` cells.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waves_per_node: Option<f64>,
    /// Wave `k` (from 0) has amplitude `amplitude (k + 1)^-amplitude_power`.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub amplitude_power: f64,
    /// `[offset, amplitude]` used left of the anchor instead of the shared pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<[f64; 2]>,
}

fn one() -> f64 {
    1.0
}

fn right() -> Side {
    Side::Right
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn default_cells() -> usize {
    4096
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum DataSpec {
    Constant {
        value: f64,
    },
    Riemann {
        left: f64,
        right: f64,
        #[serde(default)]
        at: f64,
    },
    Piecewise {
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
    Sampled {
        lo: f64,
        hi: f64,
        samples: Vec<f64>,
    },
    /// Closed-form smooth profiles: `sine` is `offset + amplitude sin(π x / width)`
    /// on `[-width, width]`; `bump` is `offset + amplitude cos²(π x / (2 width))`
    /// on `|x| < width`. Both equal `offset` elsewhere.
    Smooth {
        profile: String,
        amplitude: f64,
        offset: f64,
        width: f64,
        #[serde(default = "default_cells")]
        cells: usize,
    },
    Oscillatory(OscillatoryParams),
    /// `inner` set to 0 outside `[-m, m]`.
    Compact {
        inner: Box<DataSpec>,
        m: f64,
    },
}

impl DataSpec {
    /// Materializes the data for a grid of `n` cells (only oscillatory data
    /// with `waves_per_node` depends on `n`).
    pub fn build(&self, n: usize) -> Result<InitialProfile, ScenarioError> {
        Ok(match self {
            DataSpec::Constant { value } => InitialProfile::constant(*value),
            DataSpec::Riemann { left, right, at } => InitialProfile::piecewise_constant(vec![*at], vec![*left, *right])?,
            DataSpec::Piecewise { breaks, values } => InitialProfile::piecewise_constant(breaks.clone(), values.clone())?,
            DataSpec::Sampled { lo, hi, samples } => InitialProfile::sampled(*lo, *hi, samples)?,
            DataSpec::Smooth {
                profile,
                amplitude,
                offset,
                width,
                cells,
            } => {
                let (a, c, w) = (*amplitude, *offset, *width);
                if !(w > 0.0) {
                    return Err(ScenarioError::Invalid("smooth data needs width > 0".into()));
                }
                let pi = std::f64::consts::PI;
                match profile.as_str() {
                    "sine" => InitialProfile::from_fn(|x| c + a * (pi * x / w).sin(), -w, w, *cells)?,
                    "bump" => InitialProfile::from_fn(|x| c + a * (0.5 * pi * x / w).cos().powi(2), -w, w, *cells)?,
                    other => return Err(ScenarioError::Invalid(format!("unknown smooth profile `{other}`"))),
                }
            }
            DataSpec::Oscillatory(p) => oscillatory_data(p, n)?,
            DataSpec::Compact { inner, m } => compact_support_data(&inner.build(n)?, *m)?,
        })
    }

    /// Half-width `M` of the support when the data is compactly supported.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            DataSpec::Compact { m, .. } => Some(*m),
            _ => None,
        }
    }
}

/// Number of waves used on a grid of `n` cells.
pub fn wave_count(p: &OscillatoryParams, n: usize) -> usize {
    match p.waves_per_node {
        Some(w) => ((w * n as f64).round() as usize).max(1),
        None => p.n_waves.max(1),
    }
}

pub fn oscillatory_data(p: &OscillatoryParams, n: usize) -> Result<InitialProfile, ScenarioError> {
    if !(p.decay > 0.0 && p.span > 0.0) {
        return Err(ScenarioError::Invalid("oscillatory data needs decay > 0 and span > 0".into()));
    }
    let waves = wave_count(p, n);
    let lengths: Vec<f64> = (0..waves).map(|k| p.decay.powi(k as i32)).collect();
    let total: f64 = lengths.iter().sum();
    // distance from the anchor of the outer edge of each wave
    let mut outer = Vec::with_capacity(waves + 1);
    let mut rest = p.span;
    for l in &lengths {
        outer.push(rest);
        rest -= p.span * l / total;
    }
    outer.push(0.0);

    let [left_offset, left_amp] = p.left.unwrap_or([p.offset, p.amplitude]);
    let mut pieces: Vec<(f64, f64, f64, f64)> = Vec::new(); // (a, b, value, background) in x
    let mut push_side = |sign: f64| {
        let (offset, amplitude) = if sign > 0.0 { (p.offset, p.amplitude) } else { (left_offset, left_amp) };
        for k in 0..waves {
            let amp = amplitude * ((k + 1) as f64).powf(-p.amplitude_power);
            let far = outer[k];
            let near = outer[k + 1].max(0.0);
            let mid = 0.5 * (far + near);
            let (a, b) = if sign > 0.0 {
                (p.anchor + mid, p.anchor + far)
            } else {
                (p.anchor - far, p.anchor - mid)
            };
            if b > a {
                pieces.push((a, b, offset + amp, offset));
            }
        }
    };
    match p.side {
        Side::Right => push_side(1.0),
        Side::Left => push_side(-1.0),
        Side::Both => {
            push_side(-1.0);
            push_side(1.0);
        }
    }
    pieces.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let background = |x: f64| if x < p.anchor { left_offset } else { p.offset };
    let mut breaks = Vec::with_capacity(2 * pieces.len() + 1);
    let mut values = vec![background(f64::NEG_INFINITY)];
    for (a, b, v, _) in pieces {
        if background(a) != *values.last().unwrap() {
            breaks.push(p.anchor);
            values.push(background(a));
        }
        breaks.push(a);
        values.push(v);
        breaks.push(b);
        values.push(background(a));
    }
    if background(f64::INFINITY) != *values.last().unwrap() {
        breaks.push(p.anchor);
        values.push(p.offset);
    }
    Ok(InitialProfile::piecewise_constant(breaks, values)?)
}

/// Sets `data` to 0 outside `[-m, m]`.
pub fn compact_support_data(data: &InitialProfile, m: f64) -> Result<InitialProfile, ScenarioError> {
    if !(m > 0.0) {
        return Err(ScenarioError::Invalid("support radius must be positive".into()));
    }
    let mut breaks = vec![-m];
    let mut values = vec![0.0, data.u0(-m)];
    for &b in data.breaks() {
        if b > -m && b < m {
            breaks.push(b);
            values.push(data.u0(b));
        }
    }
    breaks.push(m);
    values.push(0.0);
    Ok(InitialProfile::piecewise_constant(breaks, values)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub label: String,
    /// Flux `g` on `x < 0`.
    pub flux_left: FluxSpec,
    /// Flux `f` on `x > 0`.
    pub flux_right: FluxSpec,
    pub connection: ConnectionSpec,
    pub data: DataSpec,
    pub domain: [f64; 2],
    /// Interface profile time step; defaults to `t / 1000`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_dt: Option<f64>,
}

/// A validated scenario with its fluxes and connection built.
#[derive(Clone)]
pub struct Loaded {
    pub spec: Scenario,
    pub f: ConvexFlux,
    pub g: ConvexFlux,
    pub connection: Connection,
    pub critical: bool,
}

impl std::fmt::Debug for Loaded {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        out.debug_struct("Loaded")
            .field("label", &self.spec.label)
            .field("connection", &self.connection)
            .field("critical", &self.critical)
            .finish()
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn load(&self) -> Result<Loaded, ScenarioError> {
        let f = self.flux_right.build()?;
        let g = self.flux_left.build()?;
        if !(self.domain[0] < 0.0 && self.domain[1] > 0.0) {
            return Err(ScenarioError::Invalid(format!(
                "domain [{}, {}] must contain the interface",
                self.domain[0], self.domain[1]
            )));
        }
        let report = validate_hypotheses(&f, &g);
        if !(report.h1_ok && report.h2_ok && report.h3_ok) {
            return Err(ScenarioError::Hypothesis(format!(
                "H1 {}, H2 {}, H3 {}",
                report.h1_ok, report.h2_ok, report.h3_ok
            )));
        }
        let connection = self.connection.resolve(&f, &g)?;
        let check = validate_connection(&f, &g, &connection);
        if !check.valid {
            return Err(ScenarioError::InvalidConnection {
                a: connection.a,
                b: connection.b,
                reason: format!(
                    "g(A) = {}, f(B) = {}, g'(A) = {}, f'(B) = {}",
                    g.eval(connection.a),
                    f.eval(connection.b),
                    g.deriv(connection.a),
                    f.deriv(connection.b)
                ),
            });
        }
        let loaded = Loaded {
            spec: self.clone(),
            f,
            g,
            connection,
            critical: check.critical,
        };
        loaded.check_brackets(&self.data.build(256)?)?;
        Ok(loaded)
    }
}

impl Loaded {
    pub fn data(&self, n: usize) -> Result<InitialProfile, ScenarioError> {
        self.spec.data.build(n)
    }

    pub fn is_single_flux(&self) -> bool {
        self.spec.flux_left == self.spec.flux_right
    }

    /// Every state the solution can take lies strictly inside both brackets.
    pub fn check_brackets(&self, data: &InitialProfile) -> Result<(), ScenarioError> {
        let (lo, hi) = data.value_range();
        let (f, g, c) = (&self.f, &self.g, &self.connection);
        let mut states = vec![lo, hi, c.a, c.b, f.theta(), g.theta()];
        for v in [lo, hi, g.theta(), c.a] {
            if g.eval(v) >= f.min_value() {
                states.push(f.branch_inverse(Monotone::Increasing, g.eval(v))?);
            }
        }
        for v in [lo, hi, f.theta(), c.b] {
            if f.eval(v) >= g.min_value() {
                states.push(g.branch_inverse(Monotone::Decreasing, f.eval(v))?);
            }
        }
        for h in [f, g] {
            let (b_lo, b_hi) = h.bracket();
            if let Some(s) = states.iter().find(|&&s| !(s > b_lo && s < b_hi)) {
                return Err(ScenarioError::Bracket(format!(
                    "state {s} is outside the bracket [{b_lo}, {b_hi}] of {}",
                    h.label()
                )));
            }
        }
        Ok(())
    }

    /// `M` for the annulus `I(M, ε)`: the support radius, else the domain reach.
    pub fn region_radius(&self) -> f64 {
        self.spec
            .data
            .support_radius()
            .unwrap_or(self.spec.domain[1].min(-self.spec.domain[0]))
    }

    /// Four value inequalities required for large-time regularity with a
    /// critical connection.
    pub fn value_inequalities(&self) -> [bool; 4] {
        let (f, g) = (&self.f, &self.g);
        let distinct = |a: f64, b: f64| (a - b).abs() > 1e-9;
        [
            distinct(f.min_value(), g.min_value()),
            distinct(f.min_value(), g.eval(0.0)),
            distinct(f.eval(0.0), g.min_value()),
            distinct(f.eval(0.0), g.eval(0.0)),
        ]
    }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "single_flux_burgers",
    "single_flux_burgers_rarefaction",
    "single_flux_burgers_smooth",
    "thm31_quartic",
    "counterexample_ghoshal",
    "noncritical_ghoshal",
    "thm32_shifted",
];

/// Shipped scenarios whose fluxes differ across the interface.
pub const TWO_FLUX_NAMES: &[&str] = &["thm31_quartic", "counterexample_ghoshal", "noncritical_ghoshal", "thm32_shifted"];

pub fn builtin_spec(name: &str) -> Result<Scenario, ScenarioError> {
    let burgers = FluxSpec::builtin("burgers", [-3.0, 3.0]);
    let critical_a = ConnectionSpec {
        a: None,
        b: None,
        mode: ConnectionMode::CriticalA,
    };
    let single = |label: &str, data: DataSpec, domain: [f64; 2]| Scenario {
        label: label.into(),
        flux_left: burgers.clone(),
        flux_right: burgers.clone(),
        connection: critical_a,
        data,
        domain,
        profile_dt: None,
    };
    Ok(match name {
        "single_flux_burgers" => single(
            name,
            DataSpec::Riemann {
                left: 1.0,
                right: 0.0,
                at: 0.0,
            },
            [-2.0, 2.0],
        ),
        "single_flux_burgers_rarefaction" => single(
            name,
            DataSpec::Riemann {
                left: 0.0,
                right: 1.0,
                at: 0.0,
            },
            [-2.0, 2.0],
        ),
        "single_flux_burgers_smooth" => single(
            name,
            DataSpec::Smooth {
                profile: "bump".into(),
                amplitude: 0.25,
                offset: 0.0,
                width: 0.5,
                cells: 4096,
            },
            [-1.0, 2.0],
        ),
        "thm31_quartic" => Scenario {
            label: name.into(),
            flux_left: FluxSpec::builtin("sextic_plus1", [-1.6, 1.6]),
            flux_right: FluxSpec::builtin("quartic", [-1.6, 1.6]),
            connection: ConnectionSpec {
                a: Some(-0.5),
                b: None,
                mode: ConnectionMode::FromLeft,
            },
            data: DataSpec::Oscillatory(OscillatoryParams {
                n_waves: 64,
                amplitude: 0.0,
                decay: 1.0,
                offset: 0.5,
                anchor: 0.0,
                span: 2.0,
                side: Side::Left,
                waves_per_node: Some(0.0625),
                amplitude_power: 0.0,
                left: Some([0.55, 0.6]),
            }),
            domain: [-3.0, 1.0],
            profile_dt: None,
        },
        "counterexample_ghoshal" => Scenario {
            label: name.into(),
            flux_left: FluxSpec::builtin("square", [-3.0, 3.0]),
            flux_right: FluxSpec::builtin("shifted", [-3.0, 3.0]),
            connection: critical_a,
            data: DataSpec::Oscillatory(OscillatoryParams {
                n_waves: 60,
                amplitude: -0.1,
                decay: 0.85,
                offset: 0.0,
                anchor: 2.0,
                span: 1.0,
                side: Side::Left,
                waves_per_node: None,
                amplitude_power: 0.0,
                left: None,
            }),
            domain: [-1.5, 2.5],
            profile_dt: None,
        },
        "noncritical_ghoshal" => Scenario {
            label: name.into(),
            flux_left: FluxSpec::builtin("square", [-3.0, 3.0]),
            flux_right: FluxSpec::builtin("shifted", [-3.0, 3.0]),
            connection: ConnectionSpec {
                a: Some(-1.0),
                b: None,
                mode: ConnectionMode::FromLeft,
            },
            data: DataSpec::Constant { value: 0.0 },
            domain: [-2.0, 4.0],
            profile_dt: None,
        },
        "thm32_shifted" => Scenario {
            label: name.into(),
            flux_left: FluxSpec::polynomial(vec![0.25, 0.0, 1.0], [-3.0, 3.0]),
            flux_right: FluxSpec::builtin("shifted", [-3.0, 3.0]),
            connection: critical_a,
            data: DataSpec::Compact {
                inner: Box::new(DataSpec::Oscillatory(OscillatoryParams {
                    n_waves: 32,
                    amplitude: 1.0,
                    decay: 1.0,
                    offset: -0.5,
                    anchor: 0.0,
                    span: 1.0,
                    side: Side::Both,
                    waves_per_node: None,
                    amplitude_power: 0.0,
                    left: None,
                })),
                m: 1.0,
            },
            domain: [-3.0, 6.0],
            profile_dt: None,
        },
        other => return Err(ScenarioError::UnknownScenario(other.into())),
    })
}

pub fn builtin(name: &str) -> Result<Loaded, ScenarioError> {
    builtin_spec(name)?.load()
}

/// Builtin name or path to a scenario JSON file.
pub fn resolve(reference: &str) -> Result<Loaded, ScenarioError> {
    if BUILTIN_NAMES.contains(&reference) {
        return builtin(reference);
    }
    let path = std::path::Path::new(reference);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{reference}: {e}")))?;
        return Scenario::from_json(&text)?.load();
    }
    Err(ScenarioError::UnknownScenario(reference.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn osc(n_waves: usize, amplitude: f64, decay: f64) -> OscillatoryParams {
        OscillatoryParams {
            n_waves,
            amplitude,
            decay,
            offset: 0.2,
            anchor: 0.0,
            span: 1.0,
            side: Side::Right,
            waves_per_node: None,
            amplitude_power: 0.0,
            left: None,
        }
    }

    #[test]
    fn every_builtin_loads() {
        for name in BUILTIN_NAMES {
            let s = builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.spec.label, *name);
        }
        assert!(matches!(builtin("nope"), Err(ScenarioError::UnknownScenario(_))));
    }

    #[test]
    fn counterexample_is_critical() {
        let s = builtin("counterexample_ghoshal").unwrap();
        assert!(s.critical);
        assert!(s.connection.a.abs() < 1e-12 && (s.connection.b - 2.0).abs() < 1e-10);
        let n = builtin("noncritical_ghoshal").unwrap();
        assert!(!n.critical);
        assert!((n.connection.b - (1.0 + 2f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn thm32_scenario_satisfies_value_inequalities() {
        let s = builtin("thm32_shifted").unwrap();
        assert!(s.critical);
        assert_eq!(s.value_inequalities(), [true; 4]);
        let c = builtin("counterexample_ghoshal").unwrap();
        assert!(!c.value_inequalities()[3]);
    }

    #[test]
    fn oscillatory_tv_and_range() {
        let one = oscillatory_data(&osc(1, 0.7, 0.5), 0).unwrap();
        assert!((one.total_variation() - 1.4).abs() < 1e-14);
        let many = oscillatory_data(&osc(9, 0.7, 0.6), 0).unwrap();
        assert!((many.total_variation() - 2.0 * 0.7 * 9.0).abs() < 1e-12);
        let (lo, hi) = many.value_range();
        assert!(lo == 0.2 && (hi - 0.9).abs() < 1e-15);
        let b = many.breaks();
        assert!(b[0] > 0.0 && *b.last().unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn waves_scale_with_grid() {
        let mut p = osc(1, 1.0, 1.0);
        p.waves_per_node = Some(0.25);
        assert_eq!(wave_count(&p, 256), 64);
        let d = oscillatory_data(&p, 512).unwrap();
        assert!((d.total_variation() - 256.0).abs() < 1e-9);
    }

    #[test]
    fn compact_support_truncates() {
        let d = InitialProfile::constant(1.0);
        let c = compact_support_data(&d, 1.0).unwrap();
        assert_eq!(c.support(), Some((-1.0, 1.0)));
        assert_eq!(c.u0(0.3), 1.0);
        let osc_data = oscillatory_data(
            &OscillatoryParams {
                side: Side::Both,
                span: 2.0,
                ..osc(5, 1.0, 0.8)
            },
            0,
        )
        .unwrap();
        let t = compact_support_data(&osc_data, 1.5).unwrap();
        assert_eq!(t.support(), Some((-1.5, 1.5)));
    }

    #[test]
    fn json_round_trip() {
        for name in BUILTIN_NAMES {
            let s = builtin_spec(name).unwrap();
            assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
        }
        let text = r#"{"label":"x","flux_left":{"key":"square","bracket":[-3,3]},
            "flux_right":{"key":"shifted","bracket":[-3,3]},
            "connection":{"mode":"critical:A=theta_g"},
            "data":{"kind":"constant","params":{"value":0.0}},"domain":[-1,1]}"#;
        let s = Scenario::from_json(text).unwrap().load().unwrap();
        assert!(s.critical);
    }

    #[test]
    fn rejects_invalid_connection() {
        let mut s = builtin_spec("noncritical_ghoshal").unwrap();
        s.connection = ConnectionSpec {
            a: Some(1.0),
            b: Some(1.0 + 2f64.sqrt()),
            mode: ConnectionMode::Explicit,
        };
        assert!(matches!(s.load(), Err(ScenarioError::InvalidConnection { .. })));
    }
}
