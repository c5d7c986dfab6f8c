//! Built-in scenarios.

use crate::config::*;
use crate::error::{Error, Result};
use crate::link::IrsMode;
use crate::planner::SolverMethod;

pub const PRESET_NAMES: [&str; 4] = ["link_sweep", "medium_deploy", "split_1024", "widearea_coverage"];

/// Monte-Carlo draws per pair for the multi-building presets.
pub const DEPLOY_SAMPLES: usize = 200;

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    match name {
        "link_sweep" => Ok(link_sweep()),
        "medium_deploy" => Ok(medium_deploy()),
        "split_1024" => Ok(split_1024()),
        "widearea_coverage" => Ok(widearea_coverage()),
        _ => Err(Error::config(
            "preset",
            format!("unknown preset `{name}`, expected one of {PRESET_NAMES:?}"),
        )),
    }
}

fn base(name: &str, geometry: GeometryConfig) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        rf: RfConfig::default(),
        power: PowerConfig::default(),
        ap: ApConfig::default(),
        geometry,
        irs: IrsConfig::default(),
        grid: GridConfig::default(),
        mc: McConfig::default(),
        objective: ObjectiveConfig::default(),
        solver: SolverConfig::default(),
        deploy: DeployConfig::default(),
        link_sweep: None,
    }
}

/// One UE at 250 m, one IRS 10 m off the AP-UE line at 10 m height.
pub fn link_sweep() -> ScenarioConfig {
    let mut c = base(
        "link_sweep",
        GeometryConfig {
            ue_height_m: 1.5,
            area_x_m: 600.0,
            area_y_m: 600.0,
            layout: Layout::Explicit {
                buildings: Vec::new(),
                ues: vec![[250.0, 0.0]],
            },
        },
    );
    c.irs.variants = vec![
        IrsVariant {
            mode: IrsMode::Active,
            elements: 64,
        },
        IrsVariant {
            mode: IrsMode::Passive,
            elements: 256,
        },
        IrsVariant {
            mode: IrsMode::Passive,
            elements: 4096,
        },
    ];
    c.link_sweep = Some(LinkSweepConfig {
        ue_distance_m: 250.0,
        irs_offset_m: 10.0,
        irs_height_m: 10.0,
        r_ai_m: vec![10.0, 25.0, 50.0, 75.0, 100.0, 125.0, 150.0, 175.0, 200.0, 225.0, 240.0],
        erp_exponents: vec![1.0, 3.0],
    });
    c
}

fn city(area_x: f64, area_y: f64, n: usize, ues: usize) -> GeometryConfig {
    GeometryConfig {
        ue_height_m: 1.5,
        area_x_m: area_x,
        area_y_m: area_y,
        layout: Layout::Grid {
            rows: n,
            cols: n,
            building_x_m: 30.0,
            building_y_m: 40.0,
            height_min_m: 12.0,
            height_max_m: 22.0,
            ue_count: ues,
            ue_min_spacing_m: 2.0,
        },
    }
}

/// 4x4 buildings in a 270 m x 400 m area with 100 UEs.
pub fn medium_deploy() -> ScenarioConfig {
    let mut c = base("medium_deploy", city(270.0, 400.0, 4, 100));
    c.mc.samples = DEPLOY_SAMPLES;
    c.deploy.irs_counts = vec![1, 2, 3, 4, 5, 6];
    c.objective.coverage_threshold_db = 30.0;
    c
}

/// Medium layout with 1024 elements split over 1, 2 or 4 IRSs.
pub fn split_1024() -> ScenarioConfig {
    let mut c = medium_deploy();
    c.name = "split_1024".into();
    c.irs.variants = vec![
        IrsVariant {
            mode: IrsMode::Active,
            elements: 1024,
        },
        IrsVariant {
            mode: IrsMode::Passive,
            elements: 1024,
        },
    ];
    c.irs.total_elements = Some(1024);
    c.irs.splits = vec![1, 2, 4];
    c
}

/// 16x16 buildings in 1080 m x 1600 m, 200 PoIs, coverage objective.
pub fn widearea_coverage() -> ScenarioConfig {
    let mut c = base("widearea_coverage", city(1080.0, 1600.0, 16, 200));
    c.mc.samples = DEPLOY_SAMPLES;
    c.grid = GridConfig {
        cell_width_m: 20.0,
        cell_height_m: 7.0,
        min_mount_height_m: 6.0,
    };
    c.irs.variants = vec![
        IrsVariant {
            mode: IrsMode::Active,
            elements: 64,
        },
        IrsVariant {
            mode: IrsMode::Passive,
            elements: 64,
        },
    ];
    c.objective = ObjectiveConfig {
        kind: ObjectiveChoice::Coverage,
        coverage_threshold_db: 30.0,
        thresholds_db: vec![20.0, 30.0],
    };
    c.solver.method = SolverMethod::Exact;
    c.deploy.irs_counts = vec![1, 2, 3, 4, 5, 6];
    c
}
