use serde::{Deserialize, Serialize};

use super::{MetricTable, PlanSolution};
use crate::error::{Error, Result};
use crate::link::fairness_index;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRatio {
    pub threshold_db: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub mean_rate: f64,
    pub fairness: f64,
    pub per_ue_rates: Vec<f64>,
    pub per_ue_snr_db: Vec<f64>,
    pub coverage: Vec<CoverageRatio>,
}

/// Rates, fairness and coverage of a plan, read from the link table.
///
/// Rejects plans whose assignment does not cover every UE exactly once with
/// a chosen spot.
pub fn evaluate_plan(solution: &PlanSolution, table: &MetricTable, thresholds_db: &[f64]) -> Result<PlanReport> {
    if solution.chosen_spots.is_empty() {
        return Err(Error::InfeasiblePlan("no spot chosen".into()));
    }
    if solution.assignment.len() != table.n_ues {
        return Err(Error::InfeasiblePlan(format!(
            "assignment covers {} UEs, scene has {}",
            solution.assignment.len(),
            table.n_ues
        )));
    }
    if let Some(&m) = solution.chosen_spots.iter().find(|&&m| m >= table.n_spots) {
        return Err(Error::InfeasiblePlan(format!("spot {m} out of range")));
    }
    if let Some((u, m)) = solution
        .assignment
        .iter()
        .enumerate()
        .find(|(_, m)| !solution.chosen_spots.contains(m))
    {
        return Err(Error::InfeasiblePlan(format!("UE {u} assigned to unopened spot {m}")));
    }
    let links: Vec<_> = solution
        .assignment
        .iter()
        .enumerate()
        .map(|(u, &m)| table.get(u, m))
        .collect();
    report_from(links.into_iter().copied(), thresholds_db)
}

/// Report of the AP-only network (no IRS deployed).
pub fn evaluate_ap_only(table: &MetricTable, thresholds_db: &[f64]) -> Result<PlanReport> {
    report_from(table.ap_only.iter().copied(), thresholds_db)
}

fn report_from(links: impl Iterator<Item = crate::link::LinkMetrics>, thresholds_db: &[f64]) -> Result<PlanReport> {
    let links: Vec<_> = links.collect();
    let per_ue_rates: Vec<f64> = links.iter().map(|l| l.ergodic_rate).collect();
    let mean_rate = per_ue_rates.iter().sum::<f64>() / per_ue_rates.len() as f64;
    let fairness = fairness_index(&per_ue_rates)?;
    let coverage = thresholds_db
        .iter()
        .map(|&t| CoverageRatio {
            threshold_db: t,
            ratio: links.iter().filter(|l| l.covered(t)).count() as f64 / links.len() as f64,
        })
        .collect();
    Ok(PlanReport {
        mean_rate,
        fairness,
        per_ue_snr_db: links.iter().map(|l| l.avg_snr_db).collect(),
        per_ue_rates,
        coverage,
    })
}
