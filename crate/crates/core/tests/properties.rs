use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use irsplan::channel::{adjust_stats_ap_irs, pathloss_uma, rician_k_isotropic, PatternSample};
use irsplan::config::ScenarioConfig;
use irsplan::geometry::*;
use irsplan::link::*;
use irsplan::pattern::{ApArrayPattern, ErpModel, RadiationPattern};
use irsplan::planner::*;
use irsplan::presets;

fn building() -> impl Strategy<Value = Building> {
    (-80.0..60.0f64, -80.0..60.0f64, 5.0..30.0f64, 5.0..30.0f64, 3.0..30.0f64)
        .prop_map(|(x, y, w, d, h)| Building::from_footprint(x, x + w, y, y + d, h).unwrap())
}

fn point() -> impl Strategy<Value = Point3> {
    (-100.0..100.0f64, -100.0..100.0f64, 0.0..35.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn scene(buildings: Vec<Building>) -> Scene {
    Scene::new(
        Point3::new(0.0, 0.0, 25.0),
        10.0,
        buildings,
        Vec::new(),
        Area::centered(400.0, 400.0),
    )
    .unwrap()
}

fn matrix() -> impl Strategy<Value = (Vec<Vec<f64>>, usize)> {
    (1usize..=6, 1usize..=6)
        .prop_flat_map(|(u, m)| (prop::collection::vec(prop::collection::vec(0.0..10.0f64, m), u), 1..=m))
}

fn brute_force(rows: &[Vec<f64>], j: usize) -> f64 {
    let m = rows[0].len();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != j {
            continue;
        }
        let total: f64 = rows
            .iter()
            .map(|r| {
                (0..m)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| r[i])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum();
        best = best.max(total);
    }
    best / rows.len() as f64
}

/// Best objective over every assignment of UEs to the chosen spots.
fn assignment_oracle(rows: &[Vec<f64>], chosen: &[usize]) -> f64 {
    let u = rows.len();
    let j = chosen.len();
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; u];
    loop {
        let total: f64 = idx.iter().enumerate().map(|(k, &c)| rows[k][chosen[c]]).sum();
        best = best.max(total);
        let mut k = 0;
        while k < u {
            idx[k] += 1;
            if idx[k] < j {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == u {
            break;
        }
    }
    best / u as f64
}

fn budget() -> PowerBudget {
    PowerBudget {
        total_w: 10e-3,
        ue_max_w: 5e-3,
        bandwidth_hz: 200e3,
        noise_psd_w_hz: 10f64.powf(-20.4),
    }
}

fn units(n: usize) -> [IrsUnit; 2] {
    let erp = ErpModel::new(1.0).unwrap();
    [
        IrsUnit::passive(n, erp),
        IrsUnit::active(n, 5e-3, 10f64.powf(-19.0), erp),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn los_is_symmetric(bs in prop::collection::vec(building(), 0..6), a in point(), b in point()) {
        prop_assume!((a - b).norm() > 1e-6);
        prop_assert_eq!(los_clear(a, b, &bs), los_clear(b, a, &bs));
    }

    #[test]
    fn adding_a_building_never_clears(bs in prop::collection::vec(building(), 0..6), extra in building(), a in point(), b in point()) {
        prop_assume!((a - b).norm() > 1e-6);
        let before = los_clear(a, b, &bs);
        let mut more = bs.clone();
        more.push(extra);
        prop_assert!(before || !los_clear(a, b, &more));
    }

    #[test]
    fn spots_lie_on_faces(bs in prop::collection::vec(building(), 1..4), w in 2.0..12.0f64, h in 2.0..8.0f64, min_h in 0.0..10.0f64) {
        let s = scene(bs);
        for sp in generate_candidate_spots(&s, w, h, min_h).unwrap() {
            let b = &s.buildings[sp.host_building];
            let p = sp.position;
            let n = sp.facet_normal;
            prop_assert!((n.norm() - 1.0).abs() < 1e-12 && n.z == 0.0);
            prop_assert!(p.z >= min_h && p.z <= b.max.z + 1e-9);
            let on_x = ((p.x - b.min.x).abs() < 1e-9 || (p.x - b.max.x).abs() < 1e-9) && p.y >= b.min.y - 1e-9 && p.y <= b.max.y + 1e-9;
            let on_y = ((p.y - b.min.y).abs() < 1e-9 || (p.y - b.max.y).abs() < 1e-9) && p.x >= b.min.x - 1e-9 && p.x <= b.max.x + 1e-9;
            prop_assert!(on_x || on_y);
        }
    }

    #[test]
    fn filter_is_idempotent(bs in prop::collection::vec(building(), 1..6)) {
        let s = scene(bs);
        let once = filter_candidates_by_ap_los(&generate_candidate_spots(&s, 10.0, 4.0, 6.0).unwrap(), &s);
        let twice = filter_candidates_by_ap_los(&once, &s);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn link_distance_is_euclidean(a in point(), b in point()) {
        let d = (b - a).norm();
        prop_assume!(d > 1e-3);
        let g = link_geometry(a, b, Mount::Downtilt { tilt_deg: 10.0 }, Mount::Isotropic).unwrap();
        prop_assert!((g.distance - d).abs() <= 1e-12 * d);
    }

    #[test]
    fn erp_normalizes_to_full_sphere(q in 0.0..8.0f64) {
        let erp = ErpModel::new(q).unwrap();
        let n = 20_000;
        let h = PI / 2.0 / n as f64;
        // Midpoint rule on the front hemisphere; the back half is zero.
        let integral: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                erp.max_gain() * erp.value(t.to_degrees()).unwrap() * t.sin() * h
            })
            .sum::<f64>() * 2.0 * PI;
        prop_assert!((integral / (4.0 * PI) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn erp_is_nonincreasing(q in 0.0..8.0f64, a in 0.0..90.0f64, b in 0.0..90.0f64) {
        let erp = ErpModel::new(q).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(erp.value(lo).unwrap() >= erp.value(hi).unwrap());
    }

    #[test]
    fn default_ap_overshoot_is_small(theta in -90.0..90.0f64) {
        let ap = ApArrayPattern::half_wavelength(8, 10.0, 1.64, 2.0).unwrap();
        prop_assert!(ap.value(theta) <= 1.001);
    }

    #[test]
    fn ap_pattern_bounded(m in 1u32..16, tilt in 0.0..30.0f64, theta in -90.0..90.0f64) {
        let ap = ApArrayPattern::half_wavelength(m, tilt, 1.64, 2.0).unwrap();
        let v = ap.value(theta);
        // The dipole factor cos^2 peaks at the horizon, so a tilted beam can
        // exceed 1 there by at most 1/cos^2(tilt).
        let c = tilt.to_radians().cos();
        prop_assert!(v >= 0.0 && v <= 1.0 / (c * c) + 1e-12);
        prop_assert!((ap.value(tilt) - 1.0).abs() < 1e-12);
        let doubled = ApArrayPattern::half_wavelength(2 * m, tilt, 1.64, 2.0).unwrap();
        prop_assert!((doubled.peak_gain() - 2.0 * ap.peak_gain()).abs() < 1e-12 * ap.peak_gain());
        prop_assert!((doubled.value(tilt) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_matches_reconstruction(k in 0.0..50.0f64, g1 in 0.1..20.0f64, f1 in 0.0..1.0f64, e1 in 0.1..3.0f64, g2 in 0.1..20.0f64, f2 in 0.0..1.0f64, e2 in 0.1..3.0f64) {
        let a = PatternSample { max_gain: g1, value: f1, averaged_gain: e1 };
        let b = PatternSample { max_gain: g2, value: f2, averaged_gain: e2 };
        let adj = adjust_stats_ap_irs(k, a, b);
        let los = g1 * f1 * g2 * f2;
        let e_nlos = e1 * e2 / (k + 1.0);
        let kt = adj.g_k * k;
        prop_assert!((adj.rho - (k / (k + 1.0) * los + e_nlos)).abs() <= 1e-12 * adj.rho);
        prop_assert!((adj.rho - (kt + 1.0) * e_nlos).abs() <= 1e-12 * adj.rho);
        prop_assert!((adj.e_nlos - e_nlos).abs() <= 1e-12 * e_nlos);
    }

    #[test]
    fn los_pathloss_at_least_nlos(d2 in 1.0..2000.0f64, h_tx in 10.0..30.0f64, fc in 0.5..6.0f64) {
        let d3 = (d2 * d2 + (h_tx - 1.5f64).powi(2)).sqrt();
        let los = pathloss_uma(d3, d2, h_tx, 1.5, fc, true).unwrap();
        let nlos = pathloss_uma(d3, d2, h_tx, 1.5, fc, false).unwrap();
        prop_assert!(los >= nlos);
        prop_assert_eq!(rician_k_isotropic(d3, false), 0.0);
    }

    #[test]
    fn random_phases_never_beat_optimum(seed in any::<u64>(), n in 1usize..24) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let b = budget();
        let mut c = || Complex64::from_polar(rng.random_range(1e-6..1e-4), rng.random_range(0.0..2.0 * PI));
        let h_i: Vec<_> = (0..n).map(|_| c()).collect();
        let h_r: Vec<_> = (0..n).map(|_| c()).collect();
        let h_d = c();
        let amp_i: Vec<f64> = h_i.iter().map(|z| z.norm()).collect();
        let amp_r: Vec<f64> = h_r.iter().map(|z| z.norm()).collect();
        for unit in units(n) {
            let opt = snr_optimal(&amp_i, &amp_r, h_d.norm(), Some(&unit), &b).unwrap();
            let p = unit_amplification(&unit, &amp_i, &b).unwrap();
            let sv2 = unit.amp_noise_power(&b);
            let tx = match unit.mode { IrsMode::Passive => b.total_w, IrsMode::Active => b.ue_max_w };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
            for _ in 0..50 {
                let phases: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
                let g = snr_generic(&h_i, &h_r, h_d, &phases, p, tx, sv2, b.noise_power());
                prop_assert!(g <= opt * (1.0 + 1e-9));
            }
            let aligned = aligned_phases(&h_i, &h_r, h_d);
            let g = snr_generic(&h_i, &h_r, h_d, &aligned, p, tx, sv2, b.noise_power());
            prop_assert!((g - opt).abs() <= 1e-9 * opt);
        }
    }

    #[test]
    fn passive_snr_monotone_in_every_amplitude(
        amps in prop::collection::vec((1e-6..1e-4f64, 1e-6..1e-4f64), 1..16),
        h_d in 0.0..1e-4f64, k in 0usize..16, which in 0usize..3, bump in 1.0..3.0f64,
    ) {
        let b = budget();
        let (mut hi, mut hr): (Vec<f64>, Vec<f64>) = amps.into_iter().unzip();
        let unit = units(hi.len())[0];
        let base = snr_optimal(&hi, &hr, h_d, Some(&unit), &b).unwrap();
        let k = k % hi.len();
        let mut hd = h_d;
        match which {
            0 => hi[k] *= bump,
            1 => hr[k] *= bump,
            _ => hd *= bump,
        }
        prop_assert!(snr_optimal(&hi, &hr, hd, Some(&unit), &b).unwrap() >= base);
    }

    #[test]
    fn active_snr_monotone_in_direct_and_common_reflection(
        amps in prop::collection::vec((1e-6..1e-4f64, 1e-6..1e-4f64), 1..16),
        h_d in 0.0..1e-4f64, bump in 1.0..3.0f64,
    ) {
        let b = budget();
        let (hi, hr): (Vec<f64>, Vec<f64>) = amps.into_iter().unzip();
        let unit = units(hi.len())[1];
        let base = snr_optimal(&hi, &hr, h_d, Some(&unit), &b).unwrap();
        prop_assert!(snr_optimal(&hi, &hr, h_d * bump, Some(&unit), &b).unwrap() >= base);
        // Full-power amplification makes a stronger reflected path a net loss
        // when the direct link dominates; without it the gain is monotone.
        let hr2: Vec<f64> = hr.iter().map(|x| x * bump).collect();
        let reflected = snr_optimal(&hi, &hr, 0.0, Some(&unit), &b).unwrap();
        prop_assert!(snr_optimal(&hi, &hr2, 0.0, Some(&unit), &b).unwrap() >= reflected * (1.0 - 1e-12));
    }

    #[test]
    fn argmax_assignment_is_optimal((rows, j) in matrix(), pick in any::<u64>()) {
        let m = MetricMatrix::from_rows(&rows, ObjectiveKind::MeanRate).unwrap();
        let n = rows[0].len();
        // A deterministic j-subset drawn from `pick`.
        let mut ids: Vec<usize> = (0..n).collect();
        let mut s = pick;
        for i in (1..n).rev() {
            ids.swap(i, (s % (i as u64 + 1)) as usize);
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        }
        let mut chosen = ids[..j].to_vec();
        chosen.sort_unstable();
        let a = m.assign(&chosen);
        prop_assert!(a.iter().all(|x| chosen.contains(x)));
        prop_assert!((m.objective_of(&a) - assignment_oracle(&rows, &chosen)).abs() < 1e-12);
    }

    #[test]
    fn solvers_match_brute_force((rows, j) in matrix()) {
        let m = MetricMatrix::from_rows(&rows, ObjectiveKind::MeanRate).unwrap();
        let p = PlanProblem::new(&m, j).unwrap();
        let opt = brute_force(&rows, j);
        let e = solve_enumerate(&p);
        let b = solve_bnb(&p, &SolveOptions::default()).unwrap();
        let g = solve_greedy_swap(&p);
        prop_assert!((e.objective_value - opt).abs() < 1e-12);
        prop_assert!((b.objective_value - opt).abs() < 1e-12);
        prop_assert!(g.objective_value <= opt + 1e-12);
        prop_assert_eq!(e.optimality, Optimality::ProvenOptimal);
        prop_assert_eq!(b.optimality, Optimality::ProvenOptimal);
    }

    #[test]
    fn optimum_nondecreasing_in_j((rows, _) in matrix(), coverage in any::<bool>()) {
        let rows: Vec<Vec<f64>> = if coverage {
            rows.iter().map(|r| r.iter().map(|&x| if x > 5.0 { 1.0 } else { 0.0 }).collect()).collect()
        } else {
            rows
        };
        let kind = if coverage { ObjectiveKind::Coverage { threshold_db: 20.0 } } else { ObjectiveKind::MeanRate };
        let m = MetricMatrix::from_rows(&rows, kind).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for j in 1..=rows[0].len() {
            let v = solve_exact(&PlanProblem::new(&m, j).unwrap(), &SolveOptions::default()).unwrap().objective_value;
            prop_assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn positive_scaling_keeps_the_plan((rows, j) in matrix(), c in 0.01..100.0f64) {
        let m = MetricMatrix::from_rows(&rows, ObjectiveKind::MeanRate).unwrap();
        let s = m.scaled(c);
        let a = solve_exact(&PlanProblem::new(&m, j).unwrap(), &SolveOptions::default()).unwrap();
        let b = solve_exact(&PlanProblem::new(&s, j).unwrap(), &SolveOptions::default()).unwrap();
        // Only meaningful when scaling introduces no rounding ties.
        prop_assume!((b.objective_value - c * a.objective_value).abs() <= 1e-9 * b.objective_value.abs().max(1.0));
        let opt_a = brute_force(&rows, j);
        prop_assert_eq!(&a.chosen_spots, &b.chosen_spots);
        prop_assert_eq!(&a.assignment, &b.assignment);
        prop_assert!((a.objective_value - opt_a).abs() < 1e-12);
    }

    #[test]
    fn coverage_counts_the_covered_set((rows, j) in matrix()) {
        let bits: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&x| if x > 6.0 { 1.0 } else { 0.0 }).collect()).collect();
        let m = MetricMatrix::from_rows(&bits, ObjectiveKind::Coverage { threshold_db: 20.0 }).unwrap();
        let sol = solve_exact(&PlanProblem::new(&m, j).unwrap(), &SolveOptions::default()).unwrap();
        let covered: Vec<usize> = (0..bits.len()).filter(|&u| bits[u][sol.assignment[u]] == 1.0).collect();
        let any_open: Vec<usize> = (0..bits.len()).filter(|&u| sol.chosen_spots.iter().any(|&s| bits[u][s] == 1.0)).collect();
        prop_assert_eq!(&covered, &any_open);
        prop_assert!((sol.objective_value - covered.len() as f64 / bits.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn config_round_trips(seed in any::<u64>(), samples in 1usize..100_000, q in 0.0..8.0f64, thr in -10.0..50.0f64, power in 1.0..100.0f64) {
        for name in presets::PRESET_NAMES {
            let mut c = presets::preset(name).unwrap();
            c.mc.seed = seed;
            c.mc.samples = samples;
            c.irs.erp_exponent = q;
            c.objective.coverage_threshold_db = thr;
            c.power.total_mw = power;
            c.power.ue_max_mw = power / 2.0;
            c.power.irs_max_mw = power / 2.0;
            prop_assert_eq!(ScenarioConfig::from_toml(&c.to_toml()).unwrap(), c);
        }
    }
}
