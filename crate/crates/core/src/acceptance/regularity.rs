use crate::diagnostics::{total_variation, TvReport, Verdict};
use crate::driver::{tv_study, FormulaRun, RunError, SolverKind, StudyConfig};
use crate::flux::Monotone;
use crate::godunov::Godunov;
use crate::hj::{value_at, HjError};
use crate::interface::foot_is_zero;
use crate::paths::Sign;
use crate::scenarios::{builtin, Loaded};

use super::{Check, Thresholds};

pub const LEVELS: [usize; 4] = [256, 512, 1024, 2048];
pub const LARGE_TIMES: [f64; 4] = [1.0, 5.0, 10.0, 20.0];
const NEAR: &str = "I(R)+I(L)";
const FULL: &str = "full";
const EXHAUSTION_N: usize = 1024;
/// `u(0+, t)` is sampled at `x = TRACE_OFFSET t`.
const TRACE_OFFSET: f64 = 1e-6;

fn config(t: f64, th: &Thresholds) -> StudyConfig {
    StudyConfig {
        rule: th.verdict,
        ..StudyConfig::at(t)
    }
}

fn series_text(report: &TvReport, region: &str) -> String {
    report
        .series(region)
        .unwrap_or_default()
        .iter()
        .map(|v| format!("{v:.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// TV of the cell averages of the data on each level's finite-volume grid.
fn sampled_data_tv(s: &Loaded, levels: &[usize]) -> Result<Vec<f64>, RunError> {
    let [lo, hi] = s.spec.domain;
    let solver = Godunov::new(&s.f, &s.g, s.connection);
    levels
        .iter()
        .map(|&n| {
            let st = solver.initial_state(lo, hi, n, &s.data(n)?)?;
            Ok(total_variation(&st.averages))
        })
        .collect()
}

pub(crate) fn linf_smoothing(th: &Thresholds) -> Check {
    let run = || -> Result<Check, RunError> {
        let s = builtin("thm31_quartic")?;
        let report = tv_study(&s, &LEVELS, &config(1.0, th), SolverKind::Formula)?;
        let near = report.verdict(NEAR).unwrap_or(Verdict::Inconclusive);
        let data_tv = sampled_data_tv(&s, &LEVELS)?;
        let growth_ok = data_tv.windows(2).all(|w| w[1] >= (1.0 + th.data_growth) * w[0]);
        let data_text: Vec<String> = data_tv.iter().map(|v| format!("{v:.1}")).collect();
        Ok(Check::new(
            near == Verdict::Bounded && growth_ok,
            format!(
                "near-interface TV {} -> {near:?}; data TV {} (>= {:.0}% per level: {growth_ok})",
                series_text(&report, NEAR),
                data_text.join(" "),
                100.0 * th.data_growth
            ),
        ))
    };
    run().unwrap_or_else(Check::error)
}

pub(crate) fn counterexample(th: &Thresholds) -> Check {
    let run = || -> Result<Check, RunError> {
        let s = builtin("counterexample_ghoshal")?;
        let cfg = config(1.0, th);
        let formula = tv_study(&s, &LEVELS, &cfg, SolverKind::Formula)?;
        let fvm = tv_study(&s, &LEVELS, &cfg, SolverKind::Godunov)?;
        let vf = formula.verdict(FULL).unwrap_or(Verdict::Inconclusive);
        let vg = fvm.verdict(FULL).unwrap_or(Verdict::Inconclusive);
        Ok(Check::new(
            vf == Verdict::Growing && vg == Verdict::Growing,
            format!(
                "full TV at t=1: formula {} -> {vf:?}; godunov {} -> {vg:?}",
                series_text(&formula, FULL),
                series_text(&fvm, FULL)
            ),
        ))
    };
    run().unwrap_or_else(Check::error)
}

struct Exhaustion {
    /// Exhausted nodes compared with `f+^{-1}(g(0))`.
    constant_nodes: usize,
    constant_error: f64,
    /// Exhausted nodes where the right data drives the interface, compared with `λ+`.
    driven_nodes: usize,
    driven_error: f64,
    final_constant: bool,
}

/// Once the left foot is at rest or beyond the support, `u(0+, t)` must be
/// `f+^{-1}(g(0))` unless data from the right is entering the interface.
fn exhaustion(s: &Loaded, horizon: f64) -> Result<Exhaustion, RunError> {
    let run = FormulaRun::new(s, EXHAUSTION_N, horizon)?;
    let p = &run.profile;
    let pb = run.problem(s);
    let m = s.region_radius();
    let target = s.f.branch_inverse(Monotone::Increasing, s.g.eval(0.0)).map_err(HjError::from)?;
    let mut out = Exhaustion {
        constant_nodes: 0,
        constant_error: 0.0,
        driven_nodes: 0,
        driven_error: 0.0,
        final_constant: false,
    };
    for k in 1..p.times.len() {
        let t = p.times[k];
        if !(p.y_minus[k] < -m || foot_is_zero(p.y_minus[k], t)) {
            continue;
        }
        let trace = value_at(TRACE_OFFSET * t, t, &pb)?.u;
        let driven = p.feed_at(k, &s.f) == Some(Sign::Positive);
        if driven {
            out.driven_nodes += 1;
            out.driven_error = out.driven_error.max((trace - p.lambda_plus[k]).abs());
        } else {
            out.constant_nodes += 1;
            out.constant_error = out.constant_error.max((trace - target).abs());
        }
        out.final_constant = !driven;
    }
    Ok(out)
}

pub(crate) fn critical_large_time(th: &Thresholds) -> Check {
    let run = || -> Result<Check, RunError> {
        let s = builtin("thm32_shifted")?;
        let inequalities = s.value_inequalities();
        let mut parts = vec![format!("inequalities {inequalities:?}")];
        let mut last = Verdict::Inconclusive;
        let mut first_bounded = None;
        for t in LARGE_TIMES {
            let report = tv_study(&s, &LEVELS, &config(t, th), SolverKind::Formula)?;
            last = report.verdict(NEAR).unwrap_or(Verdict::Inconclusive);
            if last == Verdict::Bounded && first_bounded.is_none() {
                first_bounded = Some(t);
            }
            parts.push(format!("t={t}: {} -> {last:?}", series_text(&report, NEAR)));
        }
        let horizon = LARGE_TIMES[LARGE_TIMES.len() - 1];
        let ex = exhaustion(&s, horizon)?;
        let exhaustion_ok = ex.final_constant
            && ex.constant_nodes > 0
            && ex.constant_error <= th.exhaustion
            && ex.driven_error <= th.exhaustion;
        parts.push(format!(
            "first bounded t {first_bounded:?}; exhausted nodes: {} at f+^-1(g(0)) (error {:.1e}), {} right-driven (error {:.1e})",
            ex.constant_nodes, ex.constant_error, ex.driven_nodes, ex.driven_error
        ));
        Ok(Check::new(
            inequalities.iter().all(|&b| b) && last == Verdict::Bounded && exhaustion_ok,
            parts.join("; "),
        ))
    };
    run().unwrap_or_else(Check::error)
}

