//! The acceptance suite: nine property checks over the shipped scenarios,
//! each reduced to a pass/fail outcome with a one-line summary.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::VerdictRule;

mod consistency;
mod legendre;
mod oracle;
mod regularity;

pub use consistency::{hopf_lax_scan, ScanValue};
pub use legendre::tabulated_biconjugate;

/// Every tolerance and rate the suite compares against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub involution: f64,
    pub envelope: f64,
    pub inverse_chain: f64,
    pub reduction_pointwise: f64,
    /// L¹ bound in units of `Δx`.
    pub reduction_l1_cells: f64,
    pub rankine_hugoniot: f64,
    pub interface_entropy: f64,
    pub value_gap: f64,
    pub monotonicity: f64,
    pub verdict: VerdictRule,
    /// Per-level growth of the sampled data TV in the L∞ scenario.
    pub data_growth: f64,
    pub exhaustion: f64,
    pub conservation: f64,
    pub steady_state: f64,
    pub convergence_order: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            involution: 1e-6,
            envelope: 1e-8,
            inverse_chain: 1e-10,
            reduction_pointwise: 1e-8,
            reduction_l1_cells: 10.0,
            rankine_hugoniot: 1e-6,
            interface_entropy: 1e-6,
            value_gap: 1e-4,
            monotonicity: 1e-8,
            verdict: VerdictRule::default(),
            data_growth: 0.5,
            exhaustion: 1e-6,
            conservation: 1e-12,
            steady_state: 1e-12,
            convergence_order: 0.7,
        }
    }
}

impl Thresholds {
    /// Tolerances divided by `factor`, required rates multiplied by it.
    pub fn tightened(&self, factor: f64) -> Self {
        Thresholds {
            involution: self.involution / factor,
            envelope: self.envelope / factor,
            inverse_chain: self.inverse_chain / factor,
            reduction_pointwise: self.reduction_pointwise / factor,
            reduction_l1_cells: self.reduction_l1_cells / factor,
            rankine_hugoniot: self.rankine_hugoniot / factor,
            interface_entropy: self.interface_entropy / factor,
            value_gap: self.value_gap / factor,
            monotonicity: self.monotonicity / factor,
            verdict: VerdictRule {
                growth: self.verdict.growth * factor,
                stability: self.verdict.stability / factor,
            },
            data_growth: self.data_growth * factor,
            exhaustion: self.exhaustion / factor,
            conservation: self.conservation / factor,
            steady_state: self.steady_state / factor,
            convergence_order: self.convergence_order * factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: u8,
    pub group: &'static str,
    pub title: &'static str,
}

pub const CRITERIA: [Criterion; 9] = [
    Criterion { id: 1, group: "legendre", title: "Legendre suite" },
    Criterion { id: 2, group: "reduction", title: "single-flux reduction" },
    Criterion { id: 3, group: "interface", title: "interface consistency" },
    Criterion { id: 4, group: "monotonicity", title: "monotonicity suite" },
    Criterion { id: 5, group: "thm31", title: "L-infinity interface smoothing" },
    Criterion { id: 6, group: "counterexample", title: "blow-up counterexample" },
    Criterion { id: 7, group: "thm32", title: "large-time regularity, critical connection" },
    Criterion { id: 8, group: "oracle", title: "oracle health" },
    Criterion { id: 9, group: "determinism", title: "determinism" },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u8,
    pub group: String,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.1}s) {}",
            self.id,
            self.group,
            self.title,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

/// Result of one check before timing and labels are attached.
pub(crate) struct Check {
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Check {
            passed,
            detail: detail.into(),
        }
    }

    pub fn error(e: impl std::fmt::Display) -> Self {
        Check::new(false, format!("error: {e}"))
    }
}

/// Criteria whose group or id matches `filter` (all when `None`).
pub fn select(filter: Option<&str>) -> Vec<Criterion> {
    CRITERIA
        .iter()
        .copied()
        .filter(|c| match filter {
            None => true,
            Some(f) => f == c.group || f == c.id.to_string(),
        })
        .collect()
}

pub fn run_criterion(c: Criterion, th: &Thresholds) -> Outcome {
    let start = Instant::now();
    let check = match c.id {
        1 => legendre::criterion(th),
        2 => consistency::reduction(th),
        3 => consistency::interface(th),
        4 => consistency::monotonicity_suite(th),
        5 => regularity::linf_smoothing(th),
        6 => regularity::counterexample(th),
        7 => regularity::critical_large_time(th),
        8 => oracle::health(th),
        9 => oracle::determinism(),
        _ => Check::new(false, "unknown criterion"),
    };
    Outcome {
        id: c.id,
        group: c.group.into(),
        title: c.title.into(),
        passed: check.passed,
        detail: check.detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run(filter: Option<&str>, th: &Thresholds) -> Vec<Outcome> {
    select(filter).into_iter().map(|c| run_criterion(c, th)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_by_group_and_id() {
        assert_eq!(select(Some("legendre")).len(), 1);
        assert_eq!(select(Some("7"))[0].group, "thm32");
        assert_eq!(select(None).len(), 9);
        assert!(select(Some("nothing")).is_empty());
    }

    #[test]
    fn tightening_scales_both_ways() {
        let th = Thresholds::default().tightened(10.0);
        assert!((th.involution - 1e-7).abs() < 1e-20);
        assert!((th.convergence_order - 7.0).abs() < 1e-12);
        assert!((th.verdict.stability - 0.005).abs() < 1e-15);
    }
}
