//! End-to-end runs: scenario -> profile -> formula field, finite-volume
//! reference, comparisons and TV studies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{cross_compare, refinement_study, tv_regions, Comparison, DiagnosticsError, RegionTv, TvReport, VerdictRule};
use crate::godunov::{FVMState, Godunov, GodunovError, DEFAULT_CFL};
use crate::hj::{clustered_grid, solve_field, HjError, Problem, SolutionField};
use crate::interface::{build_profile, InterfaceError, InterfaceProfile};
use crate::paths::InitialProfile;
use crate::scenarios::{Loaded, ScenarioError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Interface(#[from] InterfaceError),
    #[error(transparent)]
    Hj(#[from] HjError),
    #[error(transparent)]
    Godunov(#[from] GodunovError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl RunError {
    /// Process exit code: 2 for configuration/validation problems, 4 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Scenario(_) | RunError::Config(_) => 2,
            RunError::Diagnostics(DiagnosticsError::TooFewLevels(_)) => 2,
            _ => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Scenario(_) => "scenario",
            RunError::Interface(_) => "interface",
            RunError::Hj(_) => "hj",
            RunError::Godunov(_) => "godunov",
            RunError::Diagnostics(_) => "diagnostics",
            RunError::Config(_) => "config",
        }
    }
}

/// Which solver produced a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Formula,
    Godunov,
}

/// Default number of profile steps over `[0, t]`.
pub const DEFAULT_PROFILE_STEPS: f64 = 1000.0;

pub fn profile_dt(scenario: &Loaded, horizon: f64) -> f64 {
    scenario.spec.profile_dt.unwrap_or(horizon / DEFAULT_PROFILE_STEPS)
}

pub struct FormulaRun {
    pub data: InitialProfile,
    pub profile: InterfaceProfile,
}

impl FormulaRun {
    pub fn new(scenario: &Loaded, n: usize, horizon: f64) -> Result<Self, RunError> {
        if !(horizon > 0.0) {
            return Err(RunError::Config(format!("time {horizon} must be positive")));
        }
        let data = scenario.data(n)?;
        let profile = build_profile(
            &data,
            &scenario.f,
            &scenario.g,
            scenario.connection,
            horizon,
            profile_dt(scenario, horizon),
        )?;
        Ok(FormulaRun { data, profile })
    }

    pub fn problem<'a>(&'a self, scenario: &'a Loaded) -> Problem<'a> {
        Problem {
            f: &scenario.f,
            g: &scenario.g,
            data: &self.data,
            profile: &self.profile,
        }
    }

    pub fn field(&self, scenario: &Loaded, t: f64, n: usize) -> Result<SolutionField, RunError> {
        let [lo, hi] = scenario.spec.domain;
        let xs = clustered_grid(lo, hi, n)?;
        Ok(solve_field(t, &xs, &self.problem(scenario))?)
    }

    /// Field on the given nodes.
    pub fn field_at(&self, scenario: &Loaded, t: f64, xs: &[f64]) -> Result<SolutionField, RunError> {
        Ok(solve_field(t, xs, &self.problem(scenario))?)
    }
}

pub fn solve_formula(scenario: &Loaded, t: f64, n: usize) -> Result<(InterfaceProfile, SolutionField), RunError> {
    let run = FormulaRun::new(scenario, n, t)?;
    let field = run.field(scenario, t, n)?;
    Ok((run.profile, field))
}

pub fn solve_godunov(scenario: &Loaded, t: f64, n: usize, cfl: f64) -> Result<FVMState, RunError> {
    let [lo, hi] = scenario.spec.domain;
    let data = scenario.data(n)?;
    let solver = Godunov::new(&scenario.f, &scenario.g, scenario.connection);
    let mut st = solver.initial_state(lo, hi, n, &data)?;
    solver.evolve(&mut st, t, cfl)?;
    Ok(st)
}

/// Formula field on `N` nodes against a finite-volume run on `N * refine` cells.
pub fn compare(scenario: &Loaded, t: f64, n: usize, refine: usize, cfl: f64) -> Result<Comparison, RunError> {
    let (_, field) = solve_formula(scenario, t, n)?;
    let fvm = solve_godunov(scenario, t, n * refine.max(1), cfl)?;
    Ok(cross_compare(&field, &fvm)?)
}

/// TV of a finite-volume state over `I(M, ε)` and the full grid; fronts are
/// not available there so the interface regions are left empty.
pub fn fvm_regions(st: &FVMState, m: f64, eps: f64) -> Vec<RegionTv> {
    let field = SolutionField {
        t: st.t_now,
        xs: st.centers.clone(),
        u: st.averages.clone(),
        v: vec![],
        foot: vec![],
        r: 0.0,
        l: 0.0,
        traces: (f64::NAN, f64::NAN),
    };
    tv_regions(&field, m, eps).regions
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub t: f64,
    /// Inner radius of `I(M, ε)`.
    pub eps: f64,
    pub rule: VerdictRule,
    pub cfl: f64,
}

impl StudyConfig {
    pub fn at(t: f64) -> Self {
        StudyConfig {
            t,
            eps: 0.1,
            rule: VerdictRule::default(),
            cfl: DEFAULT_CFL,
        }
    }
}

pub fn tv_study(scenario: &Loaded, levels: &[usize], cfg: &StudyConfig, solver: SolverKind) -> Result<TvReport, RunError> {
    let m = scenario.region_radius();
    refinement_study(cfg.t, levels, cfg.rule, |n| -> Result<Vec<RegionTv>, RunError> {
        match solver {
            SolverKind::Formula => {
                let (_, field) = solve_formula(scenario, cfg.t, n)?;
                Ok(tv_regions(&field, m, cfg.eps).regions)
            }
            SolverKind::Godunov => {
                let st = solve_godunov(scenario, cfg.t, n, cfg.cfl)?;
                Ok(fvm_regions(&st, m, cfg.eps))
            }
        }
    })
}

/// Output files of one `solve` run.
pub struct SolveOutputs {
    pub profile_csv: String,
    pub fields: Vec<(f64, String, serde_json::Value)>,
}

/// `build_profile` once up to the largest time, then a field per time.
pub fn solve_outputs(scenario: &Loaded, times: &[f64], n: usize) -> Result<SolveOutputs, RunError> {
    let horizon = times.iter().copied().fold(f64::NAN, f64::max);
    if times.is_empty() || !(horizon > 0.0) || times.iter().any(|&t| !(t > 0.0)) {
        return Err(RunError::Config("times must be positive".into()));
    }
    if n < 16 {
        return Err(RunError::Config(format!("grid size {n} is below 16")));
    }
    let run = FormulaRun::new(scenario, n, horizon)?;
    let mut fields = Vec::with_capacity(times.len());
    for &t in times {
        let field = run.field(scenario, t, n)?;
        fields.push((t, field.to_csv(), field.sidecar_json()));
    }
    Ok(SolveOutputs {
        profile_csv: run.profile.to_csv(),
        fields,
    })
}
