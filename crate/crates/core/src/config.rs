//! Scenario configuration file (TOML).
//!
//! Powers are given in mW and noise densities in dBm/Hz; both are converted
//! to SI units once, by [`ScenarioConfig::budget`] and friends.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::link::{IrsMode, PowerBudget};
use crate::planner::{ObjectiveKind, SolveOptions, SolverMethod};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub rf: RfConfig,
    #[serde(default)]
    pub power: PowerConfig,
    #[serde(default)]
    pub ap: ApConfig,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub irs: IrsConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub objective: ObjectiveConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub deploy: DeployConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_sweep: Option<LinkSweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfConfig {
    pub carrier_ghz: f64,
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_hz: f64,
    pub amp_noise_psd_dbm_hz: f64,
}

impl Default for RfConfig {
    fn default() -> Self {
        Self {
            carrier_ghz: 2.0,
            bandwidth_hz: 200e3,
            noise_psd_dbm_hz: -174.0,
            amp_noise_psd_dbm_hz: -160.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerConfig {
    /// AP power when no active IRS draws from the budget.
    pub total_mw: f64,
    /// AP power when an active IRS is deployed.
    pub ue_max_mw: f64,
    /// Reflect power of an active IRS.
    pub irs_max_mw: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            total_mw: 10.0,
            ue_max_mw: 5.0,
            irs_max_mw: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApConfig {
    pub height_m: f64,
    pub tilt_deg: f64,
    pub elements: u32,
    pub spacing_wavelengths: f64,
    /// Peak gain of one array element, linear.
    pub element_gain: f64,
}

impl Default for ApConfig {
    fn default() -> Self {
        Self {
            height_m: 25.0,
            tilt_deg: 10.0,
            elements: 8,
            spacing_wavelengths: 0.5,
            element_gain: 1.64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub ue_height_m: f64,
    pub area_x_m: f64,
    pub area_y_m: f64,
    pub layout: Layout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Layout {
    /// `rows x cols` equal footprints separated by equal streets, random
    /// heights and random UEs on the streets.
    Grid {
        rows: usize,
        cols: usize,
        building_x_m: f64,
        building_y_m: f64,
        height_min_m: f64,
        height_max_m: f64,
        ue_count: usize,
        ue_min_spacing_m: f64,
    },
    Explicit {
        /// `[x0, x1, y0, y1, height]` per building.
        buildings: Vec<[f64; 5]>,
        /// `[x, y]` per UE.
        ues: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrsVariant {
    pub mode: IrsMode,
    pub elements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrsConfig {
    pub erp_exponent: f64,
    pub variants: Vec<IrsVariant>,
    /// When set, deployments split this many elements evenly over `k`
    /// IRSs for every `k` in `splits`, ignoring the variant sizes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_elements: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub splits: Vec<usize>,
}

impl Default for IrsConfig {
    fn default() -> Self {
        Self {
            erp_exponent: 1.0,
            variants: vec![
                IrsVariant {
                    mode: IrsMode::Active,
                    elements: 64,
                },
                IrsVariant {
                    mode: IrsMode::Passive,
                    elements: 256,
                },
            ],
            total_elements: None,
            splits: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub cell_width_m: f64,
    pub cell_height_m: f64,
    pub min_mount_height_m: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            cell_width_m: 10.0,
            cell_height_m: 4.0,
            min_mount_height_m: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveChoice {
    #[default]
    Rate,
    Coverage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveConfig {
    pub kind: ObjectiveChoice,
    /// Threshold of the coverage objective.
    pub coverage_threshold_db: f64,
    /// Thresholds reported for every plan.
    pub thresholds_db: Vec<f64>,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        Self {
            kind: ObjectiveChoice::Rate,
            coverage_threshold_db: 20.0,
            thresholds_db: vec![20.0, 30.0],
        }
    }
}

impl ObjectiveConfig {
    pub fn kind(&self) -> ObjectiveKind {
        match self.kind {
            ObjectiveChoice::Rate => ObjectiveKind::MeanRate,
            ObjectiveChoice::Coverage => ObjectiveKind::Coverage {
                threshold_db: self.coverage_threshold_db,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub method: SolverMethod,
    pub enumeration_limit: u64,
    pub node_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolveOptions::default();
        Self {
            method: SolverMethod::Exact,
            enumeration_limit: d.enumeration_limit,
            node_budget: d.node_budget,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            enumeration_limit: self.enumeration_limit,
            node_budget: self.node_budget,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeployConfig {
    /// Numbers of IRSs `J` to plan for (ignored when splitting).
    pub irs_counts: Vec<usize>,
}

impl Default for DeployConfig {
    fn default() -> Self {
        Self {
            irs_counts: vec![1, 2, 3],
        }
    }
}

/// Single-link geometry: AP at the origin, UE at `ue_distance_m` on the x
/// axis, IRS at `(r_ai, irs_offset_m, irs_height_m)` facing `-y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSweepConfig {
    pub ue_distance_m: f64,
    pub irs_offset_m: f64,
    pub irs_height_m: f64,
    pub r_ai_m: Vec<f64>,
    pub erp_exponents: Vec<f64>,
}

fn check(ok: bool, field: &str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, reason))
    }
}

fn positive(v: f64, field: &str) -> Result<()> {
    check(v.is_finite() && v > 0.0, field, "must be positive and finite")
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        check(!self.name.is_empty(), "name", "must not be empty")?;

        positive(self.rf.carrier_ghz, "rf.carrier_ghz")?;
        check(
            (0.5..=100.0).contains(&self.rf.carrier_ghz),
            "rf.carrier_ghz",
            "must lie in [0.5, 100]",
        )?;
        positive(self.rf.bandwidth_hz, "rf.bandwidth_hz")?;
        check(
            self.rf.noise_psd_dbm_hz.is_finite(),
            "rf.noise_psd_dbm_hz",
            "must be finite",
        )?;
        check(
            self.rf.amp_noise_psd_dbm_hz.is_finite(),
            "rf.amp_noise_psd_dbm_hz",
            "must be finite",
        )?;

        positive(self.power.total_mw, "power.total_mw")?;
        positive(self.power.ue_max_mw, "power.ue_max_mw")?;
        positive(self.power.irs_max_mw, "power.irs_max_mw")?;

        positive(self.ap.height_m, "ap.height_m")?;
        check(self.ap.tilt_deg.abs() < 90.0, "ap.tilt_deg", "must lie in (-90, 90)")?;
        check(self.ap.elements >= 1, "ap.elements", "must be >= 1")?;
        positive(self.ap.spacing_wavelengths, "ap.spacing_wavelengths")?;
        positive(self.ap.element_gain, "ap.element_gain")?;

        let g = &self.geometry;
        positive(g.ue_height_m, "geometry.ue_height_m")?;
        check(
            g.ue_height_m < self.ap.height_m,
            "geometry.ue_height_m",
            "must be below the AP",
        )?;
        positive(g.area_x_m, "geometry.area_x_m")?;
        positive(g.area_y_m, "geometry.area_y_m")?;
        match &g.layout {
            Layout::Grid {
                rows,
                cols,
                building_x_m,
                building_y_m,
                height_min_m,
                height_max_m,
                ue_count,
                ue_min_spacing_m,
            } => {
                check(
                    *rows >= 1 && *cols >= 1,
                    "geometry.layout.rows",
                    "grid needs at least one building",
                )?;
                positive(*building_x_m, "geometry.layout.building_x_m")?;
                positive(*building_y_m, "geometry.layout.building_y_m")?;
                check(
                    *cols as f64 * building_x_m < g.area_x_m,
                    "geometry.layout.cols",
                    "buildings do not fit the area along x",
                )?;
                check(
                    *rows as f64 * building_y_m < g.area_y_m,
                    "geometry.layout.rows",
                    "buildings do not fit the area along y",
                )?;
                positive(*height_min_m, "geometry.layout.height_min_m")?;
                check(
                    height_max_m.is_finite() && height_max_m >= height_min_m,
                    "geometry.layout.height_max_m",
                    "must be >= height_min_m",
                )?;
                check(*ue_count >= 1, "geometry.layout.ue_count", "must be >= 1")?;
                check(
                    ue_min_spacing_m.is_finite() && *ue_min_spacing_m >= 0.0,
                    "geometry.layout.ue_min_spacing_m",
                    "must be >= 0",
                )?;
            }
            Layout::Explicit { buildings, ues } => {
                for (i, b) in buildings.iter().enumerate() {
                    check(
                        b.iter().all(|v| v.is_finite()) && b[0] < b[1] && b[2] < b[3] && b[4] > 0.0,
                        &format!("geometry.layout.buildings[{i}]"),
                        "needs x0 < x1, y0 < y1 and height > 0",
                    )?;
                }
                check(!ues.is_empty(), "geometry.layout.ues", "must not be empty")?;
            }
        }

        check(
            self.irs.erp_exponent.is_finite() && self.irs.erp_exponent >= 0.0,
            "irs.erp_exponent",
            "must be >= 0",
        )?;
        check(!self.irs.variants.is_empty(), "irs.variants", "must not be empty")?;
        for (i, v) in self.irs.variants.iter().enumerate() {
            check(v.elements >= 1, &format!("irs.variants[{i}].elements"), "must be >= 1")?;
        }
        if let Some(total) = self.irs.total_elements {
            check(total >= 1, "irs.total_elements", "must be >= 1")?;
            check(
                !self.irs.splits.is_empty(),
                "irs.splits",
                "required with irs.total_elements",
            )?;
            for (i, &k) in self.irs.splits.iter().enumerate() {
                check(
                    k >= 1 && total % k == 0,
                    &format!("irs.splits[{i}]"),
                    "must be a positive divisor of irs.total_elements",
                )?;
            }
        } else {
            check(self.irs.splits.is_empty(), "irs.splits", "requires irs.total_elements")?;
        }

        positive(self.grid.cell_width_m, "grid.cell_width_m")?;
        positive(self.grid.cell_height_m, "grid.cell_height_m")?;
        check(
            self.grid.min_mount_height_m.is_finite() && self.grid.min_mount_height_m >= 0.0,
            "grid.min_mount_height_m",
            "must be >= 0",
        )?;

        check(self.mc.samples >= 1, "mc.samples", "must be >= 1")?;

        check(
            self.objective.coverage_threshold_db.is_finite(),
            "objective.coverage_threshold_db",
            "must be finite",
        )?;
        for (i, t) in self.objective.thresholds_db.iter().enumerate() {
            check(
                t.is_finite(),
                &format!("objective.thresholds_db[{i}]"),
                "must be finite",
            )?;
        }

        check(self.solver.node_budget >= 1, "solver.node_budget", "must be >= 1")?;

        check(
            !self.deploy.irs_counts.is_empty(),
            "deploy.irs_counts",
            "must not be empty",
        )?;
        for (i, &j) in self.deploy.irs_counts.iter().enumerate() {
            check(j >= 1, &format!("deploy.irs_counts[{i}]"), "must be >= 1")?;
        }

        if let Some(ls) = &self.link_sweep {
            positive(ls.ue_distance_m, "link_sweep.ue_distance_m")?;
            check(ls.irs_offset_m.is_finite(), "link_sweep.irs_offset_m", "must be finite")?;
            positive(ls.irs_height_m, "link_sweep.irs_height_m")?;
            check(!ls.r_ai_m.is_empty(), "link_sweep.r_ai_m", "must not be empty")?;
            for (i, r) in ls.r_ai_m.iter().enumerate() {
                check(r.is_finite(), &format!("link_sweep.r_ai_m[{i}]"), "must be finite")?;
            }
            check(
                !ls.erp_exponents.is_empty(),
                "link_sweep.erp_exponents",
                "must not be empty",
            )?;
            for (i, q) in ls.erp_exponents.iter().enumerate() {
                check(
                    q.is_finite() && *q >= 0.0,
                    &format!("link_sweep.erp_exponents[{i}]"),
                    "must be >= 0",
                )?;
            }
        }
        Ok(())
    }

    pub fn budget(&self) -> PowerBudget {
        PowerBudget {
            total_w: self.power.total_mw * 1e-3,
            ue_max_w: self.power.ue_max_mw * 1e-3,
            bandwidth_hz: self.rf.bandwidth_hz,
            noise_psd_w_hz: dbm_to_w(self.rf.noise_psd_dbm_hz),
        }
    }

    pub fn amp_noise_psd_w_hz(&self) -> f64 {
        dbm_to_w(self.rf.amp_noise_psd_dbm_hz)
    }

    pub fn irs_max_w(&self) -> f64 {
        self.power.irs_max_mw * 1e-3
    }

    /// SHA-256 of the canonical serialization with the Monte-Carlo section
    /// reset, so the hash identifies the scenario independently of
    /// `(seed, n_mc)`.
    pub fn scenario_hash(&self) -> String {
        let mut c = self.clone();
        c.mc = McConfig { samples: 0, seed: 0 };
        let digest = Sha256::digest(c.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn dbm_to_w(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}
