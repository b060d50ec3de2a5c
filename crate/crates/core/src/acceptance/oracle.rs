use crate::diagnostics::{l1_distance, CellFunction};
use crate::driver::{solve_godunov, solve_outputs, RunError, SolveOutputs};
use crate::godunov::{Godunov, DEFAULT_CFL};
use crate::paths::InitialProfile;
use crate::scenarios::builtin;

use super::{Check, Thresholds};

const HEALTH_N: usize = 400;
const HEALTH_T: f64 = 1.0;
const CONSERVATION_SCENARIOS: [&str; 3] = ["thm31_quartic", "counterexample_ghoshal", "thm32_shifted"];
const STEADY_SCENARIOS: [&str; 3] = ["thm32_shifted", "noncritical_ghoshal", "thm31_quartic"];
const CONVERGENCE_SCENARIO: &str = "single_flux_burgers_smooth";
const CONVERGENCE_LEVELS: [usize; 3] = [400, 800, 1600];
const CONVERGENCE_T: f64 = 0.5;
const DETERMINISM_SCENARIO: &str = "thm32_shifted";
const DETERMINISM_TIMES: [f64; 2] = [0.5, 1.0];
const DETERMINISM_N: usize = 256;

/// Largest per-step mass defect once boundary fluxes are accounted for.
fn conservation_defect(name: &str) -> Result<f64, RunError> {
    let s = builtin(name)?;
    let [lo, hi] = s.spec.domain;
    let solver = Godunov::new(&s.f, &s.g, s.connection);
    let mut st = solver.initial_state(lo, hi, HEALTH_N, &s.data(HEALTH_N)?)?;
    let mut worst = 0.0f64;
    solver.evolve_with(&mut st, HEALTH_T, DEFAULT_CFL, |_, rep| {
        worst = worst.max(rep.conservation_defect());
    })?;
    Ok(worst)
}

/// Largest per-step change of `u = A` left of 0, `u = B` right of it.
fn steady_drift(name: &str) -> Result<f64, RunError> {
    let s = builtin(name)?;
    let [lo, hi] = s.spec.domain;
    let conn = s.connection;
    let data = InitialProfile::piecewise_constant(vec![0.0], vec![conn.a, conn.b]).map_err(crate::hj::HjError::from)?;
    let solver = Godunov::new(&s.f, &s.g, conn);
    let mut st = solver.initial_state(lo, hi, HEALTH_N, &data)?;
    let mut previous = st.averages.clone();
    let mut worst = 0.0f64;
    solver.evolve_with(&mut st, HEALTH_T, DEFAULT_CFL, |now, _| {
        for (a, b) in now.averages.iter().zip(&previous) {
            worst = worst.max((a - b).abs());
        }
        previous.clone_from(&now.averages);
    })?;
    Ok(worst)
}

/// Observed order from the L¹ differences of three successive refinements.
fn self_convergence() -> Result<(f64, f64, f64), RunError> {
    let s = builtin(CONVERGENCE_SCENARIO)?;
    let cells: Vec<CellFunction> = CONVERGENCE_LEVELS
        .iter()
        .map(|&n| solve_godunov(&s, CONVERGENCE_T, n, DEFAULT_CFL).map(|st| CellFunction::from_cells(&st.centers, st.dx, &st.averages)))
        .collect::<Result<_, _>>()?;
    let d1 = l1_distance(&cells[0], &cells[1]);
    let d2 = l1_distance(&cells[1], &cells[2]);
    Ok((d1, d2, (d1 / d2).log2()))
}

pub(crate) fn health(th: &Thresholds) -> Check {
    let run = || -> Result<Check, RunError> {
        let mut conservation = 0.0f64;
        for name in CONSERVATION_SCENARIOS {
            conservation = conservation.max(conservation_defect(name)?);
        }
        let mut drift = 0.0f64;
        for name in STEADY_SCENARIOS {
            drift = drift.max(steady_drift(name)?);
        }
        let (d1, d2, order) = self_convergence()?;
        Ok(Check::new(
            conservation <= th.conservation && drift <= th.steady_state && order >= th.convergence_order,
            format!(
                "mass defect {conservation:.1e} (<= {:.0e}), steady drift {drift:.1e} (<= {:.0e}), L1 differences {d1:.2e} {d2:.2e} order {order:.2} (>= {:.2})",
                th.conservation, th.steady_state, th.convergence_order
            ),
        ))
    };
    run().unwrap_or_else(Check::error)
}

fn outputs_text(out: &SolveOutputs) -> String {
    let mut text = out.profile_csv.clone();
    for (t, csv, json) in &out.fields {
        text.push_str(&format!("{t:.16e}\n{csv}{json}\n"));
    }
    text
}

fn solve_with_threads(threads: usize) -> Result<String, RunError> {
    let s = builtin(DETERMINISM_SCENARIO)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::Config(e.to_string()))?;
    pool.install(|| solve_outputs(&s, &DETERMINISM_TIMES, DETERMINISM_N)).map(|o| outputs_text(&o))
}

/// Two runs on the default pool and one single-threaded run must agree byte
/// for byte.
pub(crate) fn determinism() -> Check {
    let run = || -> Result<Check, RunError> {
        let first = solve_with_threads(0)?;
        let second = solve_with_threads(0)?;
        let serial = solve_with_threads(1)?;
        let same = first == second && first == serial;
        Ok(Check::new(
            same,
            format!("{} bytes, repeat identical {}, single-thread identical {}", first.len(), first == second, first == serial),
        ))
    };
    run().unwrap_or_else(Check::error)
}
