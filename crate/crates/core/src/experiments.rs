//! Experiment drivers: single-link sweep, multi-IRS deployment and
//! coverage study. Outputs carry the tool version and scenario hash, and
//! rows are sorted by key so results do not depend on scheduling.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache;
use crate::channel::LosState;
use crate::config::{IrsVariant, ScenarioConfig, TOOL_VERSION};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::link::{ergodic_throughput_mc, IrsMode, LinkSet};
use crate::planner::{
    build_metric_matrix, evaluate_ap_only, evaluate_plan, solve, CoverageRatio, McSettings, MetricMatrix, MetricTable,
    ObjectiveKind, Optimality, PlanProblem, PlanSolution,
};
use crate::rng::{stream, Substream};
use crate::scenario::{irs_unit, link_model, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSweepRow {
    pub r_ai_m: f64,
    /// `active-64`, `passive-256`, ..., or `ap-only`.
    pub variant: String,
    /// Empty for the AP-only row.
    pub erp_exponent: Option<f64>,
    pub ergodic_rate: f64,
    pub avg_snr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSweep {
    pub scenario_hash: String,
    pub rows: Vec<LinkSweepRow>,
}

pub fn variant_label(v: IrsVariant) -> String {
    format!("{}-{}", v.mode, v.elements)
}

/// IRS position of the sweep at distance `r_ai` along the AP-UE line.
pub fn sweep_irs_position(cfg: &ScenarioConfig, r_ai: f64) -> Result<(Point3, Point3)> {
    let ls = cfg
        .link_sweep
        .as_ref()
        .ok_or_else(|| Error::config("link_sweep", "section required for the link sweep"))?;
    Ok((
        Point3::new(r_ai, ls.irs_offset_m, ls.irs_height_m),
        Point3::new(0.0, -1.0, 0.0),
    ))
}

/// Link states of the sweep: both IRS hops in LoS, the direct link blocked.
pub const SWEEP_LOS: LosState = LosState {
    ap_irs: true,
    irs_ue: true,
    ap_ue: false,
};

/// Ergodic rate of every (R_AI, variant, ERP) point plus the AP-only link.
pub fn run_link_sweep(cfg: &ScenarioConfig) -> Result<LinkSweep> {
    cfg.validate()?;
    let ls = cfg
        .link_sweep
        .as_ref()
        .ok_or_else(|| Error::config("link_sweep", "section required for the link sweep"))?;
    let budget = cfg.budget();
    let ue = Point3::new(ls.ue_distance_m, 0.0, cfg.geometry.ue_height_m);
    let seed = cfg.mc.seed;
    let n_mc = cfg.mc.samples;

    let mut jobs = Vec::new();
    for (vi, v) in cfg.irs.variants.iter().enumerate() {
        for (qi, &q) in ls.erp_exponents.iter().enumerate() {
            for (ri, &r) in ls.r_ai_m.iter().enumerate() {
                jobs.push((vi, *v, qi, q, ri, r));
            }
        }
    }
    let mut rows = jobs
        .par_iter()
        .map(|&(vi, v, qi, q, ri, r)| {
            let model = link_model(cfg, q)?;
            let unit = irs_unit(cfg, v, q)?;
            let (pos, normal) = sweep_irs_position(cfg, r)?;
            let links = model.links(pos, normal, ue, SWEEP_LOS)?;
            let id = ((vi as u64 + 1) << 48) | ((qi as u64) << 32) | ri as u64;
            let mut rng = stream(seed, Substream::Sweep, id);
            let m = ergodic_throughput_mc(&links, Some(&unit), &budget, n_mc, &mut rng)?;
            Ok(LinkSweepRow {
                r_ai_m: r,
                variant: variant_label(v),
                erp_exponent: Some(q),
                ergodic_rate: m.ergodic_rate,
                avg_snr_db: m.avg_snr_db,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let model = link_model(cfg, cfg.irs.erp_exponent)?;
    let direct = LinkSet {
        direct: Some(model.direct(ue, SWEEP_LOS.ap_ue)?),
        reflected: None,
    };
    let ap = ergodic_throughput_mc(&direct, None, &budget, n_mc, &mut stream(seed, Substream::Sweep, 0))?;
    for &r in &ls.r_ai_m {
        rows.push(LinkSweepRow {
            r_ai_m: r,
            variant: "ap-only".into(),
            erp_exponent: None,
            ergodic_rate: ap.ergodic_rate,
            avg_snr_db: ap.avg_snr_db,
        });
    }
    rows.sort_by(|a, b| {
        a.variant
            .cmp(&b.variant)
            .then(
                a.erp_exponent
                    .unwrap_or(-1.0)
                    .total_cmp(&b.erp_exponent.unwrap_or(-1.0)),
            )
            .then(a.r_ai_m.total_cmp(&b.r_ai_m))
    });
    Ok(LinkSweep {
        scenario_hash: cfg.scenario_hash(),
        rows,
    })
}

/// Builds (or loads from `cache_dir`) the link table of one IRS variant.
pub fn metric_table(scn: &Scenario, variant: IrsVariant, cache_dir: Option<&Path>) -> Result<MetricTable> {
    let mc = McSettings {
        n_mc: scn.config.mc.samples,
        seed: scn.config.mc.seed,
    };
    let hash = scn.config.scenario_hash();
    let key = cache::CacheKey {
        scenario_hash: &hash,
        variant,
        mc,
    };
    if let Some(dir) = cache_dir {
        let path = dir.join(key.file_name());
        if path.exists() {
            if let Ok(t) = cache::read_table(&path, &key, scn.scene.ues.len(), scn.spots.len()) {
                return Ok(t);
            }
        }
    }
    let table = build_metric_matrix(scn.context(), &scn.spots, &scn.unit(variant)?, mc)?;
    if let Some(dir) = cache_dir {
        std::fs::create_dir_all(dir)?;
        cache::write_table(&dir.join(key.file_name()), &key, &table)?;
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChosenSpot {
    pub id: usize,
    pub position: Point3,
    pub facet_normal: Point3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentRecord {
    pub mode: IrsMode,
    pub elements_per_irs: usize,
    pub irs_count: usize,
    pub chosen: Vec<ChosenSpot>,
    pub assignment: Vec<usize>,
    pub objective_value: f64,
    pub optimality: Optimality,
    pub upper_bound: f64,
    pub nodes: u64,
    pub budget_exceeded: bool,
    pub mean_rate: f64,
    pub fairness: f64,
    pub coverage: Vec<CoverageRatio>,
    pub per_ue_rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub mean_rate: f64,
    pub fairness: f64,
    pub coverage: Vec<CoverageRatio>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentReport {
    pub tool_version: String,
    pub scenario: String,
    pub scenario_hash: String,
    pub seed: u64,
    pub n_mc: usize,
    pub objective: ObjectiveKind,
    pub ues: usize,
    pub candidate_spots: usize,
    pub ap_only: Baseline,
    pub records: Vec<DeploymentRecord>,
}

impl DeploymentReport {
    /// True when some plan stopped at the node budget.
    pub fn budget_exceeded(&self) -> bool {
        self.records.iter().any(|r| r.budget_exceeded)
    }
}

/// Solves with the configured method; a budget stop keeps the incumbent
/// and sets the returned flag.
fn solve_plan(
    scn: &Scenario,
    matrix: &MetricMatrix,
    j: usize,
    warm: Option<&PlanSolution>,
) -> Result<(PlanSolution, bool)> {
    let problem = PlanProblem::new(matrix, j)?;
    let mut opts = scn.config.solver.options();
    opts.warm_start = warm.map(|w| w.chosen_spots.clone());
    match solve(&problem, scn.config.solver.method, &opts) {
        Err(Error::BudgetExceeded { incumbent, .. }) => Ok((*incumbent, true)),
        other => other.map(|s| (s, false)),
    }
}

fn record(
    scn: &Scenario,
    table: &MetricTable,
    variant: IrsVariant,
    sol: &PlanSolution,
    budget_exceeded: bool,
) -> Result<DeploymentRecord> {
    let rep = evaluate_plan(sol, table, &scn.config.objective.thresholds_db)?;
    Ok(DeploymentRecord {
        mode: variant.mode,
        elements_per_irs: variant.elements,
        irs_count: sol.chosen_spots.len(),
        chosen: sol
            .chosen_spots
            .iter()
            .map(|&m| ChosenSpot {
                id: m,
                position: scn.spots[m].position,
                facet_normal: scn.spots[m].facet_normal,
            })
            .collect(),
        assignment: sol.assignment.clone(),
        objective_value: sol.objective_value,
        optimality: sol.optimality,
        upper_bound: sol.upper_bound,
        nodes: sol.stats.nodes,
        budget_exceeded,
        mean_rate: rep.mean_rate,
        fairness: rep.fairness,
        coverage: rep.coverage,
        per_ue_rates: rep.per_ue_rates,
    })
}

/// Plans per variant and IRS count, or per element split when
/// `irs.total_elements` is set (`N_total / k` elements on each of `k` IRSs).
pub fn run_deployment(scn: &Scenario, cache_dir: Option<&Path>) -> Result<DeploymentReport> {
    run_deployment_with(scn, |v| metric_table(scn, v, cache_dir))
}

/// As [`run_deployment`] with a caller-supplied table source.
pub fn run_deployment_with(
    scn: &Scenario,
    mut tables: impl FnMut(IrsVariant) -> Result<MetricTable>,
) -> Result<DeploymentReport> {
    let cfg = &scn.config;
    let objective = cfg.objective.kind();
    let mut records = Vec::new();
    let mut baseline = None;

    let plans: Vec<(IrsVariant, Vec<usize>)> = match cfg.irs.total_elements {
        Some(total) => {
            let mut modes: Vec<IrsMode> = Vec::new();
            for v in &cfg.irs.variants {
                if !modes.contains(&v.mode) {
                    modes.push(v.mode);
                }
            }
            modes
                .into_iter()
                .flat_map(|mode| {
                    cfg.irs.splits.iter().map(move |&k| {
                        (
                            IrsVariant {
                                mode,
                                elements: total / k,
                            },
                            vec![k],
                        )
                    })
                })
                .collect()
        }
        None => cfg
            .irs
            .variants
            .iter()
            .map(|v| (*v, cfg.deploy.irs_counts.clone()))
            .collect(),
    };

    for (variant, counts) in plans {
        let table = tables(variant)?;
        if baseline.is_none() {
            let r = evaluate_ap_only(&table, &cfg.objective.thresholds_db)?;
            baseline = Some(Baseline {
                mean_rate: r.mean_rate,
                fairness: r.fairness,
                coverage: r.coverage,
            });
        }
        let matrix = table.matrix(objective);
        let mut counts = counts;
        counts.sort_unstable();
        let mut prev: Option<PlanSolution> = None;
        for j in counts {
            let (sol, stopped) = solve_plan(scn, &matrix, j, prev.as_ref())?;
            records.push(record(scn, &table, variant, &sol, stopped)?);
            prev = Some(sol);
        }
    }
    records.sort_by(|a, b| {
        (a.mode as u8, a.elements_per_irs, a.irs_count).cmp(&(b.mode as u8, b.elements_per_irs, b.irs_count))
    });

    Ok(DeploymentReport {
        tool_version: TOOL_VERSION.into(),
        scenario: cfg.name.clone(),
        scenario_hash: cfg.scenario_hash(),
        seed: cfg.mc.seed,
        n_mc: cfg.mc.samples,
        objective,
        ues: scn.scene.ues.len(),
        candidate_spots: scn.spots.len(),
        ap_only: baseline.expect("at least one variant"),
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub mode: String,
    pub elements_per_irs: usize,
    /// 0 for the AP-only baseline.
    pub irs_count: usize,
    pub threshold_db: f64,
    pub coverage_ratio: f64,
    pub optimality: Optimality,
    pub budget_exceeded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageStudy {
    pub scenario_hash: String,
    pub rows: Vec<CoverageRow>,
}

impl CoverageStudy {
    pub fn ratio(&self, mode: IrsMode, irs_count: usize, threshold_db: f64) -> Option<f64> {
        let label = mode.to_string();
        self.rows
            .iter()
            .find(|r| {
                (r.mode == label || (irs_count == 0 && r.mode == "ap-only"))
                    && r.irs_count == irs_count
                    && r.threshold_db == threshold_db
            })
            .map(|r| r.coverage_ratio)
    }

    pub fn budget_exceeded(&self) -> bool {
        self.rows.iter().any(|r| r.budget_exceeded)
    }
}

/// Coverage ratio per (variant, J, threshold) under the coverage objective,
/// plus the AP-only ratio as `J = 0`.
pub fn run_coverage(scn: &Scenario, cache_dir: Option<&Path>) -> Result<CoverageStudy> {
    run_coverage_with(scn, |v| metric_table(scn, v, cache_dir))
}

pub fn run_coverage_with(
    scn: &Scenario,
    mut tables: impl FnMut(IrsVariant) -> Result<MetricTable>,
) -> Result<CoverageStudy> {
    let cfg = &scn.config;
    let mut rows = Vec::new();
    let mut counts = cfg.deploy.irs_counts.clone();
    counts.sort_unstable();
    counts.dedup();
    let mut baseline_done = BTreeMap::new();
    for v in &cfg.irs.variants {
        let table = tables(*v)?;
        for &t in &cfg.objective.thresholds_db {
            baseline_done.entry(t.to_bits()).or_insert_with(|| {
                rows.push(CoverageRow {
                    mode: "ap-only".into(),
                    elements_per_irs: 0,
                    irs_count: 0,
                    threshold_db: t,
                    coverage_ratio: table.ap_only_coverage(t),
                    optimality: Optimality::ProvenOptimal,
                    budget_exceeded: false,
                })
            });
            let matrix = table.coverage_matrix(t);
            let mut prev: Option<PlanSolution> = None;
            for &j in &counts {
                if j > matrix.n_spots() {
                    return Err(Error::config(
                        "deploy.irs_counts",
                        format!("{j} exceeds the {} spots", matrix.n_spots()),
                    ));
                }
                let (sol, stopped) = solve_plan(scn, &matrix, j, prev.as_ref())?;
                rows.push(CoverageRow {
                    mode: v.mode.to_string(),
                    elements_per_irs: v.elements,
                    irs_count: j,
                    threshold_db: t,
                    coverage_ratio: sol.objective_value,
                    optimality: sol.optimality,
                    budget_exceeded: stopped,
                });
                prev = Some(sol);
            }
        }
    }
    rows.sort_by(|a, b| {
        a.mode
            .cmp(&b.mode)
            .then(a.elements_per_irs.cmp(&b.elements_per_irs))
            .then(a.threshold_db.total_cmp(&b.threshold_db))
            .then(a.irs_count.cmp(&b.irs_count))
    });
    Ok(CoverageStudy {
        scenario_hash: cfg.scenario_hash(),
        rows,
    })
}

/// CSV with `# key value` header lines.
pub fn write_csv<T: Serialize, W: std::io::Write>(mut out: W, header: &[(&str, String)], rows: &[T]) -> Result<()> {
    for (k, v) in header {
        writeln!(out, "# {k} {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn output_header(cfg: &ScenarioConfig) -> Vec<(&'static str, String)> {
    vec![
        ("tool", format!("irsplan {TOOL_VERSION}")),
        ("scenario", cfg.name.clone()),
        ("scenario_hash", cfg.scenario_hash()),
        ("seed", cfg.mc.seed.to_string()),
        ("n_mc", cfg.mc.samples.to_string()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn small_sweep() -> ScenarioConfig {
        let mut c = presets::link_sweep();
        c.mc.samples = 200;
        c.irs.variants.truncate(2);
        let ls = c.link_sweep.as_mut().unwrap();
        ls.r_ai_m = vec![50.0, 150.0];
        c
    }

    #[test]
    fn sweep_rows_sorted_and_ap_only_constant() {
        let s = run_link_sweep(&small_sweep()).unwrap();
        assert_eq!(s.rows.len(), 2 * 2 * 2 + 2);
        let ap: Vec<_> = s.rows.iter().filter(|r| r.variant == "ap-only").collect();
        assert_eq!(ap.len(), 2);
        assert_eq!(ap[0].ergodic_rate, ap[1].ergodic_rate);
        assert_eq!(s.rows, run_link_sweep(&small_sweep()).unwrap().rows);
        let labels: Vec<_> = s.rows.iter().map(|r| r.variant.clone()).collect();
        let mut sorted = labels.clone();
        sorted.sort();
        assert_eq!(labels, sorted);
    }

    #[test]
    fn sweep_requires_section() {
        let mut c = presets::medium_deploy();
        c.link_sweep = None;
        assert!(matches!(run_link_sweep(&c), Err(Error::Config { .. })));
    }

    #[test]
    fn csv_header_and_rows() {
        let s = run_link_sweep(&small_sweep()).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &output_header(&small_sweep()), &s.rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# tool irsplan"));
        assert!(text.contains("r_ai_m,variant,erp_exponent,ergodic_rate,avg_snr_db"));
        assert!(text.contains("50.0,ap-only,,"));
    }
}
