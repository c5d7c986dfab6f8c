//! Multi-IRS placement and UE association over a grid of candidate spots.
//!
//! The per-pair link metric is computed once into a [`MetricTable`]; the
//! placement problem then only sees an immutable `U x M` [`MetricMatrix`].

mod report;
mod solve;

pub use report::{evaluate_ap_only, evaluate_plan, CoverageRatio, PlanReport};
pub use solve::{
    binomial, solve, solve_bnb, solve_enumerate, solve_exact, solve_greedy_swap, SolveOptions, SolverMethod,
};

use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::LinkModel;
use crate::error::{Error, Result};
use crate::geometry::{CandidateSpot, Scene};
use crate::link::{ergodic_throughput_mc, IrsUnit, LinkMetrics, PowerBudget};
use crate::rng::fading_stream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub n_mc: usize,
    pub seed: u64,
}

/// Link metrics of every (UE, spot) pair plus the AP-only link of each UE.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub n_ues: usize,
    pub n_spots: usize,
    /// Row-major `U x M`.
    pub pairs: Vec<LinkMetrics>,
    pub ap_only: Vec<LinkMetrics>,
    pub mc: McSettings,
}

impl MetricTable {
    pub fn get(&self, u: usize, m: usize) -> &LinkMetrics {
        &self.pairs[u * self.n_spots + m]
    }

    pub fn rate_matrix(&self) -> MetricMatrix {
        MetricMatrix {
            values: self.pairs.iter().map(|p| p.ergodic_rate).collect(),
            n_ues: self.n_ues,
            n_spots: self.n_spots,
            objective: ObjectiveKind::MeanRate,
            mc: Some(self.mc),
        }
    }

    pub fn coverage_matrix(&self, threshold_db: f64) -> MetricMatrix {
        MetricMatrix {
            values: self
                .pairs
                .iter()
                .map(|p| if p.covered(threshold_db) { 1.0 } else { 0.0 })
                .collect(),
            n_ues: self.n_ues,
            n_spots: self.n_spots,
            objective: ObjectiveKind::Coverage { threshold_db },
            mc: Some(self.mc),
        }
    }

    pub fn matrix(&self, objective: ObjectiveKind) -> MetricMatrix {
        match objective {
            ObjectiveKind::MeanRate => self.rate_matrix(),
            ObjectiveKind::Coverage { threshold_db } => self.coverage_matrix(threshold_db),
        }
    }

    /// Covered fraction with no IRS deployed.
    pub fn ap_only_coverage(&self, threshold_db: f64) -> f64 {
        self.ap_only.iter().filter(|m| m.covered(threshold_db)).count() as f64 / self.n_ues as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveKind {
    MeanRate,
    Coverage { threshold_db: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    values: Vec<f64>,
    n_ues: usize,
    n_spots: usize,
    pub objective: ObjectiveKind,
    pub mc: Option<McSettings>,
}

impl MetricMatrix {
    pub fn new(values: Vec<f64>, n_ues: usize, n_spots: usize, objective: ObjectiveKind) -> Result<Self> {
        if values.len() != n_ues * n_spots {
            return Err(Error::invalid(format!(
                "matrix has {} entries, expected {n_ues} x {n_spots}",
                values.len()
            )));
        }
        if n_ues == 0 || n_spots == 0 {
            return Err(Error::invalid("metric matrix needs at least one UE and one spot"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(format!(
                "matrix entries must be finite and >= 0, got {v}"
            )));
        }
        Ok(Self {
            values,
            n_ues,
            n_spots,
            objective,
            mc: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], objective: ObjectiveKind) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Self::new(rows.concat(), rows.len(), m, objective)
    }

    pub fn n_ues(&self) -> usize {
        self.n_ues
    }

    pub fn n_spots(&self) -> usize {
        self.n_spots
    }

    #[inline]
    pub fn get(&self, u: usize, m: usize) -> f64 {
        self.values[u * self.n_spots + m]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.values[u * self.n_spots..(u + 1) * self.n_spots]
    }

    /// Per-UE argmax over `chosen`, lowest spot id on ties.
    pub fn assign(&self, chosen: &[usize]) -> Vec<usize> {
        let mut sorted = chosen.to_vec();
        sorted.sort_unstable();
        (0..self.n_ues)
            .map(|u| {
                let row = self.row(u);
                let mut best = sorted[0];
                for &m in &sorted[1..] {
                    if row[m] > row[best] {
                        best = m;
                    }
                }
                best
            })
            .collect()
    }

    /// `(1/U) sum_u R[u][assignment(u)]`, summed in UE order.
    pub fn objective_of(&self, assignment: &[usize]) -> f64 {
        let total: f64 = assignment.iter().enumerate().map(|(u, &m)| self.get(u, m)).sum();
        total / self.n_ues as f64
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimality {
    ProvenOptimal,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveStats {
    /// Enumerated combinations or expanded search nodes.
    pub nodes: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSolution {
    /// Sorted spot ids.
    pub chosen_spots: Vec<usize>,
    /// Spot id serving each UE.
    pub assignment: Vec<usize>,
    pub objective_value: f64,
    pub optimality: Optimality,
    /// Valid upper bound on the optimum (equals the objective when proven).
    pub upper_bound: f64,
    pub stats: SolveStats,
}

impl PlanSolution {
    pub(crate) fn from_chosen(
        matrix: &MetricMatrix,
        mut chosen: Vec<usize>,
        optimality: Optimality,
        upper_bound: f64,
        nodes: u64,
    ) -> Self {
        chosen.sort_unstable();
        let assignment = matrix.assign(&chosen);
        let objective_value = matrix.objective_of(&assignment);
        let upper_bound = if optimality == Optimality::ProvenOptimal {
            objective_value
        } else {
            upper_bound
        };
        Self {
            chosen_spots: chosen,
            assignment,
            objective_value,
            optimality,
            upper_bound,
            stats: SolveStats {
                nodes,
                elapsed: Duration::ZERO,
            },
        }
    }
}

/// Choose `irs_count` spots of `matrix` and associate every UE with one of them.
#[derive(Debug, Clone, Copy)]
pub struct PlanProblem<'a> {
    pub matrix: &'a MetricMatrix,
    pub irs_count: usize,
}

impl<'a> PlanProblem<'a> {
    pub fn new(matrix: &'a MetricMatrix, irs_count: usize) -> Result<Self> {
        if irs_count == 0 || irs_count > matrix.n_spots() {
            return Err(Error::invalid(format!(
                "IRS count {irs_count} must lie in 1..={}",
                matrix.n_spots()
            )));
        }
        Ok(Self { matrix, irs_count })
    }
}

/// Everything needed to evaluate the links of a scene.
#[derive(Debug, Clone, Copy)]
pub struct LinkContext<'a> {
    pub scene: &'a Scene,
    pub model: &'a LinkModel,
    pub budget: &'a PowerBudget,
}

/// Monte-Carlo metrics of every (UE, spot) pair and of each UE's AP-only link.
///
/// Each pair draws from its own stream keyed by `(seed, u, m)`, so the
/// result is independent of scheduling.
pub fn build_metric_matrix(
    ctx: LinkContext<'_>,
    spots: &[CandidateSpot],
    unit: &IrsUnit,
    mc: McSettings,
) -> Result<MetricTable> {
    if spots.is_empty() {
        return Err(Error::invalid("no candidate spots"));
    }
    if ctx.scene.ues.is_empty() {
        return Err(Error::invalid("no UEs in scene"));
    }
    unit.validate()?;
    let n_ues = ctx.scene.ues.len();
    let n_spots = spots.len();

    let ap_only = (0..n_ues)
        .into_par_iter()
        .map(|u| {
            let links = ctx.model.site_links(ctx.scene, u, None)?;
            let mut rng = fading_stream(mc.seed, u, None);
            ergodic_throughput_mc(&links, None, ctx.budget, mc.n_mc, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let pairs = (0..n_ues * n_spots)
        .into_par_iter()
        .map(|k| {
            let (u, m) = (k / n_spots, k % n_spots);
            let links = ctx.model.site_links(ctx.scene, u, Some(&spots[m]))?;
            let mut rng = fading_stream(mc.seed, u, Some(m));
            ergodic_throughput_mc(&links, Some(unit), ctx.budget, mc.n_mc, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MetricTable {
        n_ues,
        n_spots,
        pairs,
        ap_only,
        mc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_validation() {
        assert!(MetricMatrix::new(vec![1.0, 2.0], 1, 3, ObjectiveKind::MeanRate).is_err());
        assert!(MetricMatrix::new(vec![1.0, -2.0], 1, 2, ObjectiveKind::MeanRate).is_err());
        assert!(MetricMatrix::new(vec![1.0, f64::NAN], 1, 2, ObjectiveKind::MeanRate).is_err());
        assert!(MetricMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]], ObjectiveKind::MeanRate).is_err());
        let m = MetricMatrix::from_rows(&[vec![1.0, 5.0, 2.0], vec![2.0, 1.0, 2.0]], ObjectiveKind::MeanRate).unwrap();
        assert_eq!(m.get(1, 0), 2.0);
        assert!(PlanProblem::new(&m, 0).is_err());
        assert!(PlanProblem::new(&m, 4).is_err());
    }

    #[test]
    fn assignment_ties_take_lowest_id() {
        let m = MetricMatrix::from_rows(&[vec![3.0, 3.0, 1.0]], ObjectiveKind::MeanRate).unwrap();
        assert_eq!(m.assign(&[1, 0, 2]), vec![0]);
    }
}
