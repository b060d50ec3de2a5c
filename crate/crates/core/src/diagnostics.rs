//! Total-variation measurements, refinement verdicts, and comparison of the
//! explicit-formula field with the finite-volume reference.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::godunov::FVMState;
use crate::hj::SolutionField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("grids do not overlap or are at different times: {0}")]
    GridMismatch(String),
    #[error("refinement study needs at least 3 levels, got {0}")]
    TooFewLevels(usize),
}

/// `Σ |v[i+1] - v[i]|`.
pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionTv {
    pub name: String,
    pub interval: (f64, f64),
    pub tv: f64,
    /// No node fell inside the region.
    pub empty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictRule {
    /// Relative increase required at every consecutive level for `growing`.
    pub growth: f64,
    /// Relative change between the last two levels allowed for `bounded`.
    pub stability: f64,
}

impl Default for VerdictRule {
    fn default() -> Self {
        VerdictRule {
            growth: 0.20,
            stability: 0.05,
        }
    }
}

impl VerdictRule {
    pub fn classify(&self, series: &[f64]) -> Verdict {
        if series.len() < 2 {
            return Verdict::Inconclusive;
        }
        if series
            .windows(2)
            .all(|w| w[1] >= (1.0 + self.growth) * w[0] && w[1] > 0.0)
        {
            return Verdict::Growing;
        }
        let (a, b) = (series[series.len() - 2], series[series.len() - 1]);
        let scale = a.abs().max(b.abs());
        if scale < 1e-12 || (b - a).abs() <= self.stability * scale {
            return Verdict::Bounded;
        }
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub n: usize,
    pub tv: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvReport {
    pub t: f64,
    pub regions: Vec<RegionTv>,
    pub refinement_levels: Vec<RefinementLevel>,
    pub verdicts: Vec<(String, Verdict)>,
}

fn region_tv(name: &str, xs: &[f64], u: &[f64], lo: f64, hi: f64, closed: bool) -> RegionTv {
    let vals: Vec<f64> = xs
        .iter()
        .zip(u)
        .filter(|(&x, _)| if closed { x >= lo && x <= hi } else { x > lo && x < hi })
        .map(|(_, &v)| v)
        .collect();
    RegionTv {
        name: name.into(),
        interval: (lo, hi),
        tv: total_variation(&vals),
        empty: vals.is_empty(),
    }
}

/// TV over `I(R) = (0, R)`, `I(L) = (L, 0)`, their union,
/// `I(M, ε) = {ε <= |x| <= M}` and the whole grid.
pub fn tv_regions(field: &SolutionField, m: f64, eps: f64) -> TvReport {
    let (xs, u) = (&field.xs, &field.u);
    let ir = region_tv("I(R)", xs, u, 0.0, field.r, false);
    let il = region_tv("I(L)", xs, u, field.l, 0.0, false);
    let near = RegionTv {
        name: "I(R)+I(L)".into(),
        interval: (field.l, field.r),
        tv: ir.tv + il.tv,
        empty: ir.empty && il.empty,
    };
    let pos = region_tv("I(M,eps)+", xs, u, eps, m, true);
    let neg = region_tv("I(M,eps)-", xs, u, -m, -eps, true);
    let annulus = RegionTv {
        name: "I(M,eps)".into(),
        interval: (eps, m),
        tv: pos.tv + neg.tv,
        empty: pos.empty && neg.empty,
    };
    let full = RegionTv {
        name: "full".into(),
        interval: (xs.first().copied().unwrap_or(0.0), xs.last().copied().unwrap_or(0.0)),
        tv: total_variation(u),
        empty: xs.is_empty(),
    };
    TvReport {
        t: field.t,
        regions: vec![ir, il, near, annulus, full],
        refinement_levels: vec![],
        verdicts: vec![],
    }
}

/// Runs `measure` at each level and classifies every named series.
pub fn refinement_study<F, E>(t: f64, levels: &[usize], rule: VerdictRule, measure: F) -> Result<TvReport, E>
where
    F: Fn(usize) -> Result<Vec<RegionTv>, E> + Sync,
    E: Send + From<DiagnosticsError>,
{
    use rayon::prelude::*;
    if levels.len() < 3 {
        return Err(DiagnosticsError::TooFewLevels(levels.len()).into());
    }
    let per_level = levels
        .par_iter()
        .map(|&n| measure(n))
        .collect::<Result<Vec<_>, E>>()?;
    let names: Vec<String> = per_level[0].iter().map(|r| r.name.clone()).collect();
    let refinement_levels = levels
        .iter()
        .zip(&per_level)
        .map(|(&n, regions)| RefinementLevel {
            n,
            tv: regions.iter().map(|r| r.tv).collect(),
        })
        .collect::<Vec<_>>();
    let verdicts = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let series: Vec<f64> = refinement_levels.iter().map(|l| l.tv[j]).collect();
            (name.clone(), rule.classify(&series))
        })
        .collect();
    Ok(TvReport {
        t,
        regions: per_level.last().cloned().unwrap_or_default(),
        refinement_levels,
        verdicts,
    })
}

impl TvReport {
    pub fn verdict(&self, name: &str) -> Option<Verdict> {
        self.verdicts.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.verdicts.iter().position(|(n, _)| n == name).or_else(|| {
            self.regions.iter().position(|r| r.name == name)
        })?;
        Some(self.refinement_levels.iter().map(|l| l.tv[j]).collect())
    }

    /// Flat CSV: one row per (level, region).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,n,region,tv\n");
        for level in &self.refinement_levels {
            for (j, tv) in level.tv.iter().enumerate() {
                let name = self.verdicts.get(j).map(|(n, _)| n.as_str()).unwrap_or("");
                out.push_str(&format!("{:.16e},{},{},{:.16e}\n", self.t, level.n, name, tv));
            }
        }
        if self.refinement_levels.is_empty() {
            for r in &self.regions {
                out.push_str(&format!("{:.16e},,{},{:.16e}\n", self.t, r.name, r.tv));
            }
        }
        out
    }
}

/// Piecewise-constant reconstruction: node `i` owns the cell between the
/// midpoints to its neighbours.
#[derive(Debug, Clone)]
pub struct CellFunction {
    pub edges: Vec<f64>,
    pub values: Vec<f64>,
}

impl CellFunction {
    pub fn from_nodes(xs: &[f64], u: &[f64]) -> Self {
        let n = xs.len();
        let mut edges = Vec::with_capacity(n + 1);
        if n == 1 {
            edges.extend([xs[0] - 0.5, xs[0] + 0.5]);
        } else {
            edges.push(xs[0] - 0.5 * (xs[1] - xs[0]));
            for w in xs.windows(2) {
                edges.push(0.5 * (w[0] + w[1]));
            }
            edges.push(xs[n - 1] + 0.5 * (xs[n - 1] - xs[n - 2]));
        }
        CellFunction {
            edges,
            values: u.to_vec(),
        }
    }

    pub fn from_cells(centers: &[f64], dx: f64, u: &[f64]) -> Self {
        let mut edges: Vec<f64> = centers.iter().map(|c| c - 0.5 * dx).collect();
        edges.push(centers[centers.len() - 1] + 0.5 * dx);
        CellFunction {
            edges,
            values: u.to_vec(),
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        let k = self.edges.partition_point(|&e| e <= x);
        self.values[k.clamp(1, self.values.len()) - 1]
    }

    pub fn span(&self) -> (f64, f64) {
        (self.edges[0], self.edges[self.edges.len() - 1])
    }

    /// Positions of jumps larger than `threshold`.
    pub fn jumps(&self, threshold: f64) -> Vec<f64> {
        self.values
            .windows(2)
            .enumerate()
            .filter(|(_, w)| (w[1] - w[0]).abs() > threshold)
            .map(|(i, _)| self.edges[i + 1])
            .collect()
    }

    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        hi - lo
    }
}

/// L1 distance over the common span on the merged partition.
pub fn l1_distance(a: &CellFunction, b: &CellFunction) -> f64 {
    let lo = a.span().0.max(b.span().0);
    let hi = a.span().1.min(b.span().1);
    let mut cuts: Vec<f64> = a
        .edges
        .iter()
        .chain(&b.edges)
        .copied()
        .filter(|&e| e > lo && e < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let m = 0.5 * (w[0] + w[1]);
            (a.at(m) - b.at(m)).abs() * (w[1] - w[0])
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub l1: f64,
    pub linf_away: f64,
    /// Width excluded around each detected jump.
    pub band: f64,
}

/// L1 distance, and L∞ distance at the finite-volume cell centers away
/// from `5 Δx` bands around jumps larger than half the solution range.
pub fn cross_compare(field: &SolutionField, fvm: &FVMState) -> Result<Comparison, DiagnosticsError> {
    if (field.t - fvm.t_now).abs() > 1e-9 * field.t.max(1.0) {
        return Err(DiagnosticsError::GridMismatch(format!(
            "field at t = {}, finite volume at t = {}",
            field.t, fvm.t_now
        )));
    }
    if field.xs.len() < 2 {
        return Err(DiagnosticsError::GridMismatch("field has fewer than two nodes".into()));
    }
    let a = CellFunction::from_nodes(&field.xs, &field.u);
    let b = CellFunction::from_cells(&fvm.centers, fvm.dx, &fvm.averages);
    let (lo, hi) = (a.span().0.max(b.span().0), a.span().1.min(b.span().1));
    if !(lo < hi) {
        return Err(DiagnosticsError::GridMismatch("no overlap".into()));
    }
    let coarse = field
        .xs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(fvm.dx, f64::max);
    let band = 5.0 * coarse;
    let threshold = 0.5 * a.range().max(b.range());
    let mut jumps = a.jumps(threshold);
    jumps.extend(b.jumps(threshold));
    let linf_away = fvm
        .centers
        .iter()
        .zip(&fvm.averages)
        .filter(|(&x, _)| x > lo && x < hi && jumps.iter().all(|j| (x - j).abs() > band))
        .map(|(&x, &u)| (a.at(x) - u).abs())
        .fold(0.0, f64::max);
    Ok(Comparison {
        l1: l1_distance(&a, &b),
        linf_away,
        band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_examples() {
        assert_eq!(total_variation(&[1.0, 0.0, 1.0]), 2.0);
        assert_eq!(total_variation(&[3.0; 5]), 0.0);
        assert_eq!(total_variation(&[0.0, 0.5, 0.7, 2.0]), 2.0);
        assert_eq!(total_variation(&[4.2]), 0.0);
    }

    #[test]
    fn verdicts() {
        let rule = VerdictRule::default();
        assert_eq!(rule.classify(&[1.0, 1.3, 1.7]), Verdict::Growing);
        assert_eq!(rule.classify(&[1.0, 1.3, 1.31]), Verdict::Bounded);
        assert_eq!(rule.classify(&[1.0, 1.1, 1.3]), Verdict::Inconclusive);
        assert_eq!(rule.classify(&[0.0, 0.0, 0.0]), Verdict::Bounded);
    }

    #[test]
    fn l1_of_shifted_step() {
        let a = CellFunction::from_cells(&[0.5, 1.5, 2.5], 1.0, &[1.0, 0.0, 0.0]);
        let b = CellFunction::from_cells(&[0.5, 1.5, 2.5], 1.0, &[1.0, 1.0, 0.0]);
        assert!((l1_distance(&a, &b) - 1.0).abs() < 1e-15);
        assert_eq!(l1_distance(&a, &a), 0.0);
    }

    #[test]
    fn node_cells_cover_midpoints() {
        let c = CellFunction::from_nodes(&[0.0, 1.0, 3.0], &[1.0, 2.0, 3.0]);
        assert_eq!(c.edges, vec![-0.5, 0.5, 2.0, 4.0]);
        assert_eq!(c.at(1.9), 2.0);
        assert_eq!(c.at(2.1), 3.0);
    }
}
