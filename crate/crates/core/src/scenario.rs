//! Resolves a [`ScenarioConfig`] into a concrete scene, candidate spots and
//! link model.

use rand::Rng;

use crate::channel::{LinkModel, PatternSet};
use crate::config::{IrsVariant, Layout, ScenarioConfig};
use crate::error::{Error, Result};
use crate::geometry::{
    filter_candidates_by_ap_los, generate_candidate_spots, Area, Building, CandidateSpot, Point3, Scene,
};
use crate::link::{IrsMode, IrsUnit, PowerBudget};
use crate::pattern::{ApArrayPattern, ErpModel};
use crate::planner::LinkContext;
use crate::rng::{stream, Substream};

/// Rejection-sampling attempts per UE before giving up.
const UE_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub scene: Scene,
    /// Spots facing the AP in LoS, re-indexed from 0.
    pub spots: Vec<CandidateSpot>,
    /// Spot count before LoS filtering.
    pub raw_spot_count: usize,
    pub model: LinkModel,
    pub budget: PowerBudget,
}

impl Scenario {
    pub fn build(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let scene = build_scene(config)?;
        let g = &config.grid;
        let raw = generate_candidate_spots(&scene, g.cell_width_m, g.cell_height_m, g.min_mount_height_m)?;
        let spots = filter_candidates_by_ap_los(&raw, &scene);
        let model = link_model(config, config.irs.erp_exponent)?;
        Ok(Self {
            config: config.clone(),
            scene,
            raw_spot_count: raw.len(),
            spots,
            model,
            budget: config.budget(),
        })
    }

    pub fn context(&self) -> LinkContext<'_> {
        LinkContext {
            scene: &self.scene,
            model: &self.model,
            budget: &self.budget,
        }
    }

    pub fn unit(&self, variant: IrsVariant) -> Result<IrsUnit> {
        irs_unit(&self.config, variant, self.config.irs.erp_exponent)
    }
}

pub fn irs_unit(config: &ScenarioConfig, variant: IrsVariant, erp_exponent: f64) -> Result<IrsUnit> {
    let erp = ErpModel::new(erp_exponent)?;
    let unit = match variant.mode {
        IrsMode::Passive => IrsUnit::passive(variant.elements, erp),
        IrsMode::Active => IrsUnit::active(variant.elements, config.irs_max_w(), config.amp_noise_psd_w_hz(), erp),
    };
    unit.validate()?;
    Ok(unit)
}

pub fn ap_position(config: &ScenarioConfig) -> Point3 {
    Point3::new(0.0, 0.0, config.ap.height_m)
}

pub fn link_model(config: &ScenarioConfig, erp_exponent: f64) -> Result<LinkModel> {
    let a = &config.ap;
    let lambda = crate::channel::SPEED_OF_LIGHT / (config.rf.carrier_ghz * 1e9);
    let ap = ApArrayPattern::new(
        a.elements,
        a.spacing_wavelengths * lambda,
        a.tilt_deg,
        a.element_gain,
        lambda,
    )?;
    Ok(LinkModel {
        patterns: PatternSet::new(ap, ErpModel::new(erp_exponent)?),
        fc_ghz: config.rf.carrier_ghz,
        ap_position: ap_position(config),
    })
}

/// Buildings and UEs of the configured layout. Random parts draw from the
/// geometry and UE-placement substreams only.
pub fn build_scene(config: &ScenarioConfig) -> Result<Scene> {
    let g = &config.geometry;
    let area = Area::centered(g.area_x_m, g.area_y_m);
    let seed = config.mc.seed;
    let (buildings, ues) = match &g.layout {
        Layout::Explicit { buildings, ues } => {
            let b = buildings
                .iter()
                .map(|b| Building::from_footprint(b[0], b[1], b[2], b[3], b[4]))
                .collect::<Result<Vec<_>>>()?;
            let u = ues.iter().map(|p| Point3::new(p[0], p[1], g.ue_height_m)).collect();
            (b, u)
        }
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
            let street_x = (g.area_x_m - *cols as f64 * building_x_m) / (*cols as f64 + 1.0);
            let street_y = (g.area_y_m - *rows as f64 * building_y_m) / (*rows as f64 + 1.0);
            let mut rng = stream(seed, Substream::Geometry, 0);
            let mut buildings = Vec::with_capacity(rows * cols);
            for r in 0..*rows {
                for c in 0..*cols {
                    let x0 = area.x_min + street_x + c as f64 * (building_x_m + street_x);
                    let y0 = area.y_min + street_y + r as f64 * (building_y_m + street_y);
                    let h = if height_max_m > height_min_m {
                        rng.random_range(*height_min_m..*height_max_m)
                    } else {
                        *height_min_m
                    };
                    buildings.push(Building::from_footprint(
                        x0,
                        x0 + building_x_m,
                        y0,
                        y0 + building_y_m,
                        h,
                    )?);
                }
            }
            let ues = place_ues(&area, &buildings, *ue_count, *ue_min_spacing_m, g.ue_height_m, seed)?;
            (buildings, ues)
        }
    };
    Scene::new(ap_position(config), config.ap.tilt_deg, buildings, ues, area)
}

/// Uniform UEs on the streets, at least `spacing` apart.
fn place_ues(
    area: &Area,
    buildings: &[Building],
    count: usize,
    spacing: f64,
    height: f64,
    seed: u64,
) -> Result<Vec<Point3>> {
    let mut rng = stream(seed, Substream::UePlacement, 0);
    let mut ues: Vec<Point3> = Vec::with_capacity(count);
    for u in 0..count {
        let mut placed = false;
        for _ in 0..UE_ATTEMPTS {
            let x = rng.random_range(area.x_min..area.x_max);
            let y = rng.random_range(area.y_min..area.y_max);
            let p = Point3::new(x, y, height);
            if buildings.iter().any(|b| b.covers_xy(x, y)) {
                continue;
            }
            if ues.iter().any(|q| (p - *q).norm_2d() < spacing) {
                continue;
            }
            ues.push(p);
            placed = true;
            break;
        }
        if !placed {
            return Err(Error::geometry(format!("could not place UE {u} on the streets")));
        }
    }
    Ok(ues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::*;

    fn grid_config(seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            name: "g".into(),
            rf: RfConfig::default(),
            power: PowerConfig::default(),
            ap: ApConfig::default(),
            geometry: GeometryConfig {
                ue_height_m: 1.5,
                area_x_m: 270.0,
                area_y_m: 400.0,
                layout: Layout::Grid {
                    rows: 4,
                    cols: 4,
                    building_x_m: 30.0,
                    building_y_m: 40.0,
                    height_min_m: 12.0,
                    height_max_m: 22.0,
                    ue_count: 50,
                    ue_min_spacing_m: 2.0,
                },
            },
            irs: IrsConfig::default(),
            grid: GridConfig::default(),
            mc: McConfig { samples: 10, seed },
            objective: ObjectiveConfig::default(),
            solver: SolverConfig::default(),
            deploy: DeployConfig::default(),
            link_sweep: None,
        }
    }

    #[test]
    fn grid_layout_streets() {
        let s = build_scene(&grid_config(1)).unwrap();
        assert_eq!(s.buildings.len(), 16);
        let b = &s.buildings[0];
        assert!((b.min.x - (-135.0 + 30.0)).abs() < 1e-9);
        assert!((b.min.y - (-200.0 + 48.0)).abs() < 1e-9);
        assert!(s.buildings.iter().all(|b| (12.0..22.0).contains(&b.height())));
        assert_eq!(s.ues.len(), 50);
        for (i, p) in s.ues.iter().enumerate() {
            assert!(s.buildings.iter().all(|b| !b.covers_xy(p.x, p.y)));
            for q in &s.ues[..i] {
                assert!((*p - *q).norm_2d() >= 2.0);
            }
        }
    }

    #[test]
    fn scene_depends_on_seed_not_samples() {
        let a = build_scene(&grid_config(1)).unwrap();
        let mut c = grid_config(1);
        c.mc.samples = 999;
        assert_eq!(a, build_scene(&c).unwrap());
        assert_ne!(a, build_scene(&grid_config(2)).unwrap());
    }

    #[test]
    fn spots_all_see_the_ap() {
        let s = Scenario::build(&grid_config(1)).unwrap();
        assert!(!s.spots.is_empty());
        assert!(s.spots.len() < s.raw_spot_count);
        for (i, sp) in s.spots.iter().enumerate() {
            assert_eq!(sp.id, i);
        }
    }
}
