use rayon::prelude::*;

use crate::driver::{compare, FormulaRun, RunError};
use crate::flux::ConvexFlux;
use crate::godunov::DEFAULT_CFL;
use crate::hj::{monotonicity, value_gap_at_interface, SolutionField};
use crate::paths::InitialProfile;
use crate::scenarios::{builtin, Loaded, BUILTIN_NAMES, TWO_FLUX_NAMES};

use super::{Check, Thresholds};

const SINGLE_FLUX: [&str; 3] = ["single_flux_burgers", "single_flux_burgers_rarefaction", "single_flux_burgers_smooth"];
const REDUCTION_N: usize = 800;
const INTERFACE_N: usize = 512;
const MONOTONE_N: usize = 400;
const TIMES: [f64; 3] = [0.5, 1.0, 2.0];
const GAP_EPS: [f64; 2] = [1e-3, 1e-4];
const SCAN_POINTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanValue {
    pub u: f64,
    pub y: f64,
    pub cost: f64,
    /// A second minimizer with a different state lies within the cost tie.
    pub ambiguous: bool,
}

/// Classical whole-line Hopf–Lax value `min_y v0(y) + t h*((x - y)/t)` for a
/// single flux: every data piece is minimized exactly (the cost is convex on
/// a piece of constant state), then checked against a uniform scan.
pub fn hopf_lax_scan(h: &ConvexFlux, data: &InitialProfile, x: f64, t: f64) -> Result<ScanValue, RunError> {
    let (p_lo, p_hi) = h.slope_range();
    let (y_lo, y_hi) = (x - t * p_hi, x - t * p_lo);
    let cost = |y: f64| -> Result<f64, RunError> {
        let p = ((x - y) / t).clamp(p_lo, p_hi);
        Ok(data.v0(y) + t * h.legendre(p).map_err(crate::hj::HjError::from)?)
    };
    let mut found: Vec<(f64, f64)> = Vec::new();
    for k in 0..data.piece_count() {
        let (a, b, state) = data.piece(k);
        let (a, b) = (a.max(y_lo), b.min(y_hi));
        if a > b {
            continue;
        }
        let y = (x - t * h.deriv(state)).clamp(a, b);
        found.push((y, cost(y)?));
    }
    for i in 0..=SCAN_POINTS {
        let y = y_lo + (y_hi - y_lo) * i as f64 / SCAN_POINTS as f64;
        found.push((y, cost(y)?));
    }
    let (y, best) = found
        .iter()
        .copied()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("at least one candidate");
    let state = |y: f64| h.deriv_inverse(((x - y) / t).clamp(p_lo, p_hi));
    let u = state(y).map_err(crate::hj::HjError::from)?;
    let tie = 1e-9 * best.abs().max(1.0);
    let mut ambiguous = false;
    for &(yy, c) in &found {
        if c - best <= tie && (state(yy).map_err(crate::hj::HjError::from)? - u).abs() > 1e-6 {
            ambiguous = true;
        }
    }
    Ok(ScanValue {
        u,
        y,
        cost: best,
        ambiguous,
    })
}

fn reduction_one(name: &str, th: &Thresholds) -> Result<(f64, usize, f64, f64), RunError> {
    let s = builtin(name)?;
    let run = FormulaRun::new(&s, REDUCTION_N, 1.0)?;
    let field = run.field(&s, 1.0, REDUCTION_N)?;
    let errors: Vec<Option<f64>> = field
        .xs
        .par_iter()
        .zip(&field.u)
        .map(|(&x, &u)| {
            hopf_lax_scan(&s.f, &run.data, x, 1.0).map(|o| if o.ambiguous { None } else { Some((o.u - u).abs()) })
        })
        .collect::<Result<_, _>>()?;
    let skipped = errors.iter().filter(|e| e.is_none()).count();
    let pointwise = errors.iter().flatten().copied().fold(0.0, f64::max);
    let l1 = compare(&s, 1.0, REDUCTION_N, 1, DEFAULT_CFL)?.l1;
    let dx = (s.spec.domain[1] - s.spec.domain[0]) / REDUCTION_N as f64;
    Ok((pointwise, skipped, l1, th.reduction_l1_cells * dx))
}

pub(crate) fn reduction(th: &Thresholds) -> Check {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in SINGLE_FLUX {
        match reduction_one(name, th) {
            Ok((pointwise, skipped, l1, bound)) => {
                passed &= pointwise <= th.reduction_pointwise && l1 <= bound;
                parts.push(format!("{name}: scan {pointwise:.1e} ({skipped} shock nodes), L1 {l1:.2e} <= {bound:.2e}"));
            }
            Err(e) => return Check::error(format!("{name}: {e}")),
        }
    }
    Check::new(passed, parts.join("; "))
}

struct InterfaceStats {
    rh: f64,
    entropy_min: f64,
    critical_violations: usize,
    gap: f64,
}

fn interface_one(s: &Loaded, t: f64, th: &Thresholds) -> Result<InterfaceStats, RunError> {
    let run = FormulaRun::new(s, INTERFACE_N, t)?;
    let profile = &run.profile;
    let pb = run.problem(s);
    let mut gap = 0.0f64;
    for eps in GAP_EPS {
        gap = gap.max(value_gap_at_interface(t, eps, &pb)?);
    }
    Ok(InterfaceStats {
        rh: profile.rankine_hugoniot_residual(&s.f, &s.g),
        entropy_min: profile.interface_entropy(&s.f, &s.g).into_iter().fold(f64::INFINITY, f64::min),
        critical_violations: profile.critical_entropy_violations(&s.f, &s.g, th.interface_entropy),
        gap,
    })
}

pub(crate) fn interface(th: &Thresholds) -> Check {
    let mut passed = true;
    let (mut rh, mut gap, mut entropy_min, mut violations) = (0.0f64, 0.0f64, f64::INFINITY, 0usize);
    for name in TWO_FLUX_NAMES {
        let s = match builtin(name) {
            Ok(s) => s,
            Err(e) => return Check::error(e),
        };
        for t in TIMES {
            let st = match interface_one(&s, t, th) {
                Ok(st) => st,
                Err(e) => return Check::error(format!("{name} t={t}: {e}")),
            };
            rh = rh.max(st.rh);
            gap = gap.max(st.gap);
            if s.critical {
                violations += st.critical_violations;
                passed &= st.critical_violations == 0;
            } else {
                entropy_min = entropy_min.min(st.entropy_min);
                passed &= st.entropy_min >= -th.interface_entropy;
            }
            passed &= st.rh <= th.rankine_hugoniot && st.gap <= th.value_gap;
        }
    }
    Check::new(
        passed,
        format!(
            "R-H {rh:.1e} (<= {:.0e}), min I_AB {entropy_min:.2e} (>= -{:.0e}), critical violations {violations}, v gap {gap:.1e} (<= {:.0e})",
            th.rankine_hugoniot, th.interface_entropy, th.value_gap
        ),
    )
}

/// Largest `|h'|` over the states seen in the field, the traces and the data.
pub(crate) fn measured_speed(s: &Loaded, run: &FormulaRun, field: &SolutionField) -> f64 {
    let mut c = 0.0f64;
    for (&x, &u) in field.xs.iter().zip(&field.u) {
        let h = if x > 0.0 { &s.f } else { &s.g };
        c = c.max(h.deriv(u).abs());
    }
    for (&lp, &lm) in run.profile.lambda_plus.iter().zip(&run.profile.lambda_minus) {
        c = c.max(s.f.deriv(lp).abs()).max(s.g.deriv(lm).abs());
    }
    let (lo, hi) = run.data.value_range();
    for u in [lo, hi, s.connection.a, s.connection.b] {
        c = c.max(s.f.deriv(u).abs()).max(s.g.deriv(u).abs());
    }
    c
}

pub(crate) fn monotonicity_suite(th: &Thresholds) -> Check {
    let mut total = 0usize;
    let mut fields = 0usize;
    let mut worst = String::new();
    for name in BUILTIN_NAMES {
        let s = match builtin(name) {
            Ok(s) => s,
            Err(e) => return Check::error(e),
        };
        for t in TIMES {
            let result = FormulaRun::new(&s, MONOTONE_N, t).and_then(|run| {
                let field = run.field(&s, t, MONOTONE_N)?;
                let c = measured_speed(&s, &run, &field);
                Ok(monotonicity(&field, c, th.monotonicity))
            });
            match result {
                Ok(rep) => {
                    fields += 1;
                    if rep.total() > 0 {
                        worst = format!("{name} t={t}: {rep:?}");
                    }
                    total += rep.total();
                }
                Err(e) => return Check::error(format!("{name} t={t}: {e}")),
            }
        }
    }
    Check::new(total == 0, format!("{fields} fields, {total} violations {worst}"))
}
