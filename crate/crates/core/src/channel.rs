//! Statistical link description: UMa path loss, Rician K-factor and the
//! pattern-induced change of K and of the mean fading power.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{link_geometry, los_clear_from_spot, CandidateSpot, LocalDirection, Mount, Point3, Scene};
use crate::link::LinkSet;
use crate::pattern::{ApArrayPattern, ErpModel, RadiationPattern};

/// Propagation speed used by the path-loss breakpoint and wavelength, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Effective environment height for the UMa breakpoint distance, m.
const UMA_ENV_HEIGHT: f64 = 1.0;

/// 3GPP UMa path loss in dB.
///
/// `h_tx`/`h_rx` may be given in either order: the higher end plays the
/// base-station role. Distances below 1 m are evaluated at 1 m.
pub fn pathloss_uma_db(d3d: f64, d2d: f64, h_tx: f64, h_rx: f64, fc_ghz: f64, los: bool) -> Result<f64> {
    if !(d3d > 0.0) || d2d < 0.0 || !d3d.is_finite() {
        return Err(Error::invalid(format!(
            "path-loss distance must be positive, got {d3d}"
        )));
    }
    if !(0.5..=100.0).contains(&fc_ghz) {
        return Err(Error::invalid(format!("carrier {fc_ghz} GHz outside [0.5, 100]")));
    }
    let d3d = d3d.max(1.0);
    let (h_bs, h_ut) = if h_tx >= h_rx { (h_tx, h_rx) } else { (h_rx, h_tx) };
    let h_bs_eff = (h_bs - UMA_ENV_HEIGHT).max(1e-3);
    let h_ut_eff = (h_ut - UMA_ENV_HEIGHT).max(1e-3);
    let d_bp = 4.0 * h_bs_eff * h_ut_eff * fc_ghz * 1e9 / SPEED_OF_LIGHT;
    let f_term = 20.0 * fc_ghz.log10();

    let pl_los = if d2d <= d_bp {
        28.0 + 22.0 * d3d.log10() + f_term
    } else {
        let dh = h_bs - h_ut;
        28.0 + 40.0 * d3d.log10() + f_term - 9.0 * (d_bp * d_bp + dh * dh).log10()
    };
    if los {
        return Ok(pl_los);
    }
    let pl_nlos = 13.54 + 39.08 * d3d.log10() + f_term - 0.6 * (h_ut - 1.5);
    Ok(pl_los.max(pl_nlos))
}

/// Average channel power gain `10^(-PL/10)` from [`pathloss_uma_db`].
pub fn pathloss_uma(d3d: f64, d2d: f64, h_tx: f64, h_rx: f64, fc_ghz: f64, los: bool) -> Result<f64> {
    Ok(10f64.powf(-pathloss_uma_db(d3d, d2d, h_tx, h_rx, fc_ghz, los)? / 10.0))
}

/// Isotropic Rician factor `K = 13 - 0.03 d` (dB) under LoS, 0 otherwise.
pub fn rician_k_isotropic(d_tr: f64, los: bool) -> f64 {
    if los {
        10f64.powf((13.0 - 0.03 * d_tr) / 10.0)
    } else {
        0.0
    }
}

/// One end of a link as seen by the pattern adjustment: peak gain, pattern
/// value along the LoS direction and sphere-averaged gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSample {
    pub max_gain: f64,
    pub value: f64,
    pub averaged_gain: f64,
}

impl PatternSample {
    pub const ISOTROPIC: Self = Self {
        max_gain: 1.0,
        value: 1.0,
        averaged_gain: 1.0,
    };

    pub fn los_gain(&self) -> f64 {
        self.max_gain * self.value
    }
}

/// Pattern constants reused across every link of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSet {
    pub ap: ApArrayPattern,
    pub ap_averaged_gain: f64,
    pub erp: ErpModel,
    pub erp_averaged_gain: f64,
}

impl PatternSet {
    pub fn new(ap: ApArrayPattern, erp: ErpModel) -> Self {
        Self {
            ap,
            ap_averaged_gain: ap.averaged_gain(),
            erp,
            erp_averaged_gain: erp.averaged_gain(),
        }
    }

    /// AP side; `dir.theta_deg` is the elevation below the horizon.
    pub fn ap_sample(&self, dir: &LocalDirection) -> PatternSample {
        PatternSample {
            max_gain: self.ap.peak_gain(),
            value: self.ap.value(dir.theta_deg),
            averaged_gain: self.ap_averaged_gain,
        }
    }

    /// IRS side; `dir.theta_deg` is the polar angle from the facet normal.
    pub fn erp_sample(&self, dir: &LocalDirection) -> PatternSample {
        PatternSample {
            max_gain: self.erp.max_gain(),
            value: self.erp.value_unchecked(dir.theta_deg.clamp(0.0, 180.0)),
            averaged_gain: self.erp_averaged_gain,
        }
    }
}

/// `(G_K, rho, E_NLoS)` for one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternAdjustment {
    pub g_k: f64,
    pub rho: f64,
    pub e_nlos: f64,
}

/// Shared core of the three link types.
///
/// NLoS scattering is taken as independent at both ends with a uniform
/// angular spectrum, so `E_NLoS = e_tx * e_rx / (K + 1)`.
fn adjust(k: f64, tx: PatternSample, rx: PatternSample) -> PatternAdjustment {
    let los_product = tx.los_gain() * rx.los_gain();
    let e_nlos = tx.averaged_gain * rx.averaged_gain / (k + 1.0);
    PatternAdjustment {
        g_k: los_product / ((k + 1.0) * e_nlos),
        rho: k / (k + 1.0) * los_product + e_nlos,
        e_nlos,
    }
}

/// AP to IRS element: both ends directional.
pub fn adjust_stats_ap_irs(k: f64, ap: PatternSample, irs: PatternSample) -> PatternAdjustment {
    adjust(k, ap, irs)
}

/// IRS element to UE: the UE antenna is isotropic with unit gain.
pub fn adjust_stats_irs_ue(k: f64, irs: PatternSample) -> PatternAdjustment {
    adjust(k, irs, PatternSample::ISOTROPIC)
}

/// AP to UE.
pub fn adjust_stats_ap_ue(k: f64, ap: PatternSample) -> PatternAdjustment {
    adjust(k, ap, PatternSample::ISOTROPIC)
}

/// Statistical description of one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkStats {
    /// Average channel power gain (path loss), linear.
    pub g: f64,
    /// Isotropic Rician factor.
    pub k: f64,
    pub g_k: f64,
    /// Pattern-adjusted Rician factor `G_K * K`.
    pub k_tilde: f64,
    /// Mean fading power gain.
    pub rho: f64,
    pub e_nlos: f64,
    pub los: bool,
}

impl LinkStats {
    pub fn new(g: f64, k: f64, los: bool, adj: PatternAdjustment) -> Self {
        Self {
            g,
            k,
            g_k: adj.g_k,
            k_tilde: adj.g_k * k,
            rho: adj.rho,
            e_nlos: adj.e_nlos,
            los,
        }
    }

    /// Deterministic link: amplitude `sqrt(g * rho)` with no fading spread.
    pub fn deterministic(g: f64, rho: f64) -> Self {
        Self {
            g,
            k: f64::INFINITY,
            g_k: 1.0,
            k_tilde: f64::INFINITY,
            rho,
            e_nlos: 0.0,
            los: true,
        }
    }

    /// Mean received power gain `g * rho`.
    pub fn mean_power(&self) -> f64 {
        self.g * self.rho
    }

    pub fn sampler(&self) -> Result<RiceSampler> {
        RiceSampler::new(self.k_tilde, self.rho * self.g)
    }
}

/// Draws Rice amplitudes with factor `K~` and mean power `power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiceSampler {
    los_amp: f64,
    scatter_amp: f64,
}

impl RiceSampler {
    pub fn new(k_tilde: f64, power: f64) -> Result<Self> {
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::invalid(format!("fading power must be positive, got {power}")));
        }
        if !(k_tilde >= 0.0) {
            return Err(Error::invalid(format!("Rician factor must be >= 0, got {k_tilde}")));
        }
        let (nu, sigma) = if k_tilde.is_infinite() {
            (1.0, 0.0)
        } else {
            ((k_tilde / (k_tilde + 1.0)).sqrt(), (0.5 / (k_tilde + 1.0)).sqrt())
        };
        let s = power.sqrt();
        Ok(Self {
            los_amp: s * nu,
            scatter_amp: s * sigma,
        })
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.scatter_amp == 0.0 {
            return self.los_amp;
        }
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let re = self.los_amp + self.scatter_amp * x;
        let im = self.scatter_amp * y;
        (re * re + im * im).sqrt()
    }
}

/// Fading amplitudes for `n` i.i.d. elements (or one scalar link).
#[derive(Debug, Clone, PartialEq)]
pub struct FadingSample {
    pub amplitudes: Vec<f64>,
}

/// `n` i.i.d. amplitudes `|sqrt(rho) (nu + sigma (X + iY))|` with
/// `nu = sqrt(K~/(K~+1))` and `sigma = sqrt(1/(2(K~+1)))`.
pub fn sample_fading<R: Rng + ?Sized>(k_tilde: f64, rho: f64, n: usize, rng: &mut R) -> Result<FadingSample> {
    if n == 0 {
        return Err(Error::invalid("fading sample needs n >= 1"));
    }
    let s = RiceSampler::new(k_tilde, rho)?;
    Ok(FadingSample {
        amplitudes: (0..n).map(|_| s.draw(rng)).collect(),
    })
}

/// LoS state of the three links of one (UE, spot) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LosState {
    pub ap_irs: bool,
    pub irs_ue: bool,
    pub ap_ue: bool,
}

/// Turns link geometry into [`LinkStats`] for an AP with a fixed pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    pub patterns: PatternSet,
    pub fc_ghz: f64,
    pub ap_position: Point3,
}

impl LinkModel {
    fn ap_mount(&self) -> Mount {
        Mount::Downtilt {
            tilt_deg: self.patterns.ap.tilt_deg,
        }
    }

    /// AP to UE.
    pub fn direct(&self, ue: Point3, los: bool) -> Result<LinkStats> {
        let geo = link_geometry(self.ap_position, ue, self.ap_mount(), Mount::Isotropic)?;
        let g = pathloss_uma(
            geo.distance,
            geo.distance_2d,
            self.ap_position.z,
            ue.z,
            self.fc_ghz,
            los,
        )?;
        let k = rician_k_isotropic(geo.distance, los);
        let ap = self.patterns.ap_sample(&geo.departure.expect("AP mount has a frame"));
        Ok(LinkStats::new(g, k, los, adjust_stats_ap_ue(k, ap)))
    }

    /// AP to one element of an IRS at `pos` facing `normal`.
    pub fn ap_to_irs(&self, pos: Point3, normal: Point3, los: bool) -> Result<LinkStats> {
        let geo = link_geometry(self.ap_position, pos, self.ap_mount(), Mount::Facet { normal })?;
        let g = pathloss_uma(
            geo.distance,
            geo.distance_2d,
            self.ap_position.z,
            pos.z,
            self.fc_ghz,
            los,
        )?;
        let k = rician_k_isotropic(geo.distance, los);
        let ap = self.patterns.ap_sample(&geo.departure.expect("AP mount has a frame"));
        let irs = self.patterns.erp_sample(&geo.arrival.expect("facet mount has a frame"));
        Ok(LinkStats::new(g, k, los, adjust_stats_ap_irs(k, ap, irs)))
    }

    /// One element of an IRS at `pos` facing `normal` to a UE.
    pub fn irs_to_ue(&self, pos: Point3, normal: Point3, ue: Point3, los: bool) -> Result<LinkStats> {
        let geo = link_geometry(pos, ue, Mount::Facet { normal }, Mount::Isotropic)?;
        let g = pathloss_uma(geo.distance, geo.distance_2d, pos.z, ue.z, self.fc_ghz, los)?;
        let k = rician_k_isotropic(geo.distance, los);
        let irs = self
            .patterns
            .erp_sample(&geo.departure.expect("facet mount has a frame"));
        Ok(LinkStats::new(g, k, los, adjust_stats_irs_ue(k, irs)))
    }

    /// All links of a UE served via an IRS at `pos`, with given LoS states.
    pub fn links(&self, pos: Point3, normal: Point3, ue: Point3, los: LosState) -> Result<LinkSet> {
        Ok(LinkSet {
            direct: Some(self.direct(ue, los.ap_ue)?),
            reflected: Some((
                self.ap_to_irs(pos, normal, los.ap_irs)?,
                self.irs_to_ue(pos, normal, ue, los.irs_ue)?,
            )),
        })
    }

    /// LoS states of the pair (UE `u`, `spot`) from the scene's buildings.
    pub fn site_los(&self, scene: &Scene, u: usize, spot: &CandidateSpot) -> LosState {
        let ue = scene.ues[u];
        LosState {
            ap_irs: los_clear_from_spot(spot, self.ap_position, &scene.buildings),
            irs_ue: los_clear_from_spot(spot, ue, &scene.buildings),
            ap_ue: scene.los_clear(self.ap_position, ue),
        }
    }

    /// Site-specific links of UE `u`; `spot = None` gives the AP-only link.
    pub fn site_links(&self, scene: &Scene, u: usize, spot: Option<&CandidateSpot>) -> Result<LinkSet> {
        let ue = *scene
            .ues
            .get(u)
            .ok_or_else(|| Error::invalid(format!("UE index {u} out of range")))?;
        match spot {
            None => Ok(LinkSet {
                direct: Some(self.direct(ue, scene.los_clear(self.ap_position, ue))?),
                reflected: None,
            }),
            Some(s) => self.links(s.position, s.facet_normal, ue, self.site_los(scene, u, s)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uma_los_sub_breakpoint() {
        let d2d = (100.0f64 * 100.0 - 23.5 * 23.5).sqrt();
        let pl = pathloss_uma_db(100.0, d2d, 25.0, 1.5, 2.0, true).unwrap();
        let hand = 28.0 + 22.0 * 2.0 + 20.0 * 2f64.log10();
        assert!((pl - hand).abs() < 1e-12);
        assert!((pl - 78.02).abs() < 0.005);
        let nlos = pathloss_uma_db(100.0, d2d, 25.0, 1.5, 2.0, false).unwrap();
        assert!(nlos > pl);
    }

    #[test]
    fn uma_at_one_meter() {
        let pl = pathloss_uma_db(1.0, 0.5, 25.0, 24.5, 2.0, true).unwrap();
        assert!((pl - 34.02).abs() < 0.005);
        assert!((pathloss_uma(1.0, 0.5, 25.0, 24.5, 2.0, true).unwrap() - 10f64.powf(-pl / 10.0)).abs() < 1e-18);
    }

    #[test]
    fn uma_beyond_breakpoint_and_errors() {
        // d_BP' = 4 * 24 * 0.5 * 2e9 / 3e8 = 320 m.
        let d2d = 1000.0;
        let d3d = (d2d * d2d + 23.5f64 * 23.5).sqrt();
        let pl = pathloss_uma_db(d3d, d2d, 25.0, 1.5, 2.0, true).unwrap();
        let hand = 28.0 + 40.0 * d3d.log10() + 20.0 * 2f64.log10() - 9.0 * (320.0f64 * 320.0 + 23.5 * 23.5).log10();
        assert!((pl - hand).abs() < 1e-9);
        assert!(pathloss_uma_db(0.0, 0.0, 25.0, 1.5, 2.0, true).is_err());
        assert!(pathloss_uma_db(10.0, 5.0, 25.0, 1.5, 200.0, true).is_err());
    }

    #[test]
    fn uma_ordering() {
        for d in [5.0, 30.0, 120.0, 500.0, 2000.0] {
            for (ht, hr) in [(25.0, 1.5), (25.0, 10.0), (10.0, 1.5)] {
                let los = pathloss_uma(d, d * 0.99, ht, hr, 2.0, true).unwrap();
                let nlos = pathloss_uma(d, d * 0.99, ht, hr, 2.0, false).unwrap();
                assert!(los >= nlos);
            }
        }
    }

    #[test]
    fn rician_k_values() {
        assert!((rician_k_isotropic(0.0, true) - 19.952_623_149_688_8).abs() < 1e-9);
        assert!((rician_k_isotropic(100.0, true) - 10.0).abs() < 1e-12);
        assert_eq!(rician_k_isotropic(37.0, false), 0.0);
    }

    #[test]
    fn isotropic_recovery() {
        for k in [0.0, 1.0, 19.95, 1e4] {
            let iso = PatternSample::ISOTROPIC;
            for a in [
                adjust_stats_ap_irs(k, iso, iso),
                adjust_stats_irs_ue(k, iso),
                adjust_stats_ap_ue(k, iso),
            ] {
                assert!((a.g_k - 1.0).abs() < 1e-12);
                assert!((a.rho - 1.0).abs() < 1e-12);
                assert!((a.e_nlos - 1.0 / (k + 1.0)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rayleigh_branch() {
        let ap = PatternSample {
            max_gain: 13.12,
            value: 0.7,
            averaged_gain: 1.1,
        };
        let irs = PatternSample {
            max_gain: 4.0,
            value: 0.5,
            averaged_gain: 1.0,
        };
        let a = adjust_stats_ap_irs(0.0, ap, irs);
        assert_eq!(a.rho, a.e_nlos);
        let s = LinkStats::new(1e-9, 0.0, false, a);
        assert_eq!(s.k_tilde, 0.0);
        let b = adjust_stats_irs_ue(0.0, irs);
        assert_eq!(b.rho, b.e_nlos);
        let c = adjust_stats_ap_ue(0.0, ap);
        assert_eq!(c.rho, c.e_nlos);
    }

    #[test]
    fn hand_substituted_ap_irs() {
        let (k, gtx, ftx, gi, fi, etx, ei) = (10.0, 13.12, 1.0, 4.0, 30f64.to_radians().cos(), 1.09, 1.0);
        let a = adjust_stats_ap_irs(
            k,
            PatternSample {
                max_gain: gtx,
                value: ftx,
                averaged_gain: etx,
            },
            PatternSample {
                max_gain: gi,
                value: fi,
                averaged_gain: ei,
            },
        );
        // Direct substitution.
        let e = etx * ei / 11.0;
        let gk = gtx * gi * ftx * fi / (11.0 * e);
        let rho = 10.0 / 11.0 * gtx * gi * ftx * fi + e;
        assert!((a.e_nlos - e).abs() < 1e-15);
        assert!((a.g_k - gk).abs() < 1e-12 * gk);
        assert!((a.rho - rho).abs() < 1e-12 * rho);
    }

    #[test]
    fn hand_substituted_irs_ue_and_ap_ue() {
        let irs = PatternSample {
            max_gain: 4.0,
            value: 0.5,
            averaged_gain: 1.0,
        };
        let a = adjust_stats_irs_ue(4.0, irs);
        assert!((a.e_nlos - 0.2).abs() < 1e-15);
        assert!((a.g_k - 2.0 / (5.0 * 0.2)).abs() < 1e-12);
        assert!((a.rho - (0.8 * 2.0 + 0.2)).abs() < 1e-12);

        let ap = PatternSample {
            max_gain: 12.72,
            value: 0.49,
            averaged_gain: 1.08,
        };
        let b = adjust_stats_ap_ue(7.0, ap);
        let e = 1.08 / 8.0;
        assert!((b.e_nlos - e).abs() < 1e-15);
        assert!((b.g_k - 12.72 * 0.49 / (8.0 * e)).abs() < 1e-12);
        assert!((b.rho - (7.0 / 8.0 * 12.72 * 0.49 + e)).abs() < 1e-12);
    }

    #[test]
    fn pure_los_takes_full_element_gain() {
        let irs = PatternSample {
            max_gain: 4.0,
            value: 1.0,
            averaged_gain: 1.0,
        };
        let a = adjust_stats_irs_ue(1e12, irs);
        assert!((a.rho - 4.0).abs() < 1e-9);
    }

    #[test]
    fn rho_identities() {
        let ap = PatternSample {
            max_gain: 12.7,
            value: 0.3,
            averaged_gain: 1.08,
        };
        let irs = PatternSample {
            max_gain: 8.0,
            value: 0.2,
            averaged_gain: 1.0,
        };
        for k in [0.0, 0.5, 3.0, 19.95] {
            let a = adjust_stats_ap_irs(k, ap, irs);
            let s = LinkStats::new(1.0, k, k > 0.0, a);
            let p = ap.los_gain() * irs.los_gain();
            let by_k = k / (k + 1.0) * p + a.e_nlos;
            assert!((s.rho - by_k).abs() <= 1e-12 * s.rho);
            // rho = (K~ + 1) E_NLoS and rho K~/(K~+1) = K/(K+1) P.
            assert!((s.rho - (s.k_tilde + 1.0) * s.e_nlos).abs() <= 1e-12 * s.rho);
            let los_part = s.rho * s.k_tilde / (s.k_tilde + 1.0);
            assert!((los_part - k / (k + 1.0) * p).abs() <= 1e-12 * s.rho);
        }
    }

    #[test]
    fn deterministic_fading() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = sample_fading(f64::INFINITY, 1.0, 8, &mut rng).unwrap();
        assert!(s.amplitudes.iter().all(|&a| a == 1.0));
        assert!(sample_fading(1.0, 0.0, 8, &mut rng).is_err());
        assert!(sample_fading(1.0, 1.0, 0, &mut rng).is_err());
    }

    #[test]
    fn rayleigh_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = sample_fading(0.0, 1.0, 100_000, &mut rng).unwrap();
        let p = s.amplitudes.iter().map(|a| a * a).sum::<f64>() / 1e5;
        assert!((p - 1.0).abs() < 0.01, "{p}");
    }

    /// Rice pdf mean by trapezoid quadrature, with `I0` from its power series.
    fn rice_mean_oracle(k: f64, rho: f64) -> f64 {
        let nu = (rho * k / (k + 1.0)).sqrt();
        let s2 = rho / (2.0 * (k + 1.0));
        let i0 = |x: f64| {
            let (mut term, mut sum, mut j) = (1.0, 1.0, 1.0);
            while term > 1e-17 * sum {
                term *= (x / 2.0) * (x / 2.0) / (j * j);
                sum += term;
                j += 1.0;
            }
            sum
        };
        let pdf = |r: f64| r / s2 * (-(r * r + nu * nu) / (2.0 * s2)).exp() * i0(r * nu / s2);
        let (upper, n) = (nu + 12.0 * s2.sqrt(), 200_000);
        let h = upper / n as f64;
        (0..=n)
            .map(|i| {
                let r = i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * r * pdf(r)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn rician_moments_match_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (k, rho) = (10.0, 2.0);
        let s = sample_fading(k, rho, 100_000, &mut rng).unwrap();
        let p = s.amplitudes.iter().map(|a| a * a).sum::<f64>() / 1e5;
        assert!((p / rho - 1.0).abs() < 0.01);
        let mean = s.amplitudes.iter().sum::<f64>() / 1e5;
        let oracle = rice_mean_oracle(k, rho);
        assert!((mean / oracle - 1.0).abs() < 0.005, "{mean} vs {oracle}");
        // Frozen value of the oracle.
        assert!((oracle - RICE_MEAN_K10_RHO2).abs() < 1e-9, "{oracle}");
    }

    /// Closed form sqrt(rho) sqrt(pi/(4(K+1))) e^{-K/2} ((1+K) I0(K/2) + K I1(K/2)).
    const RICE_MEAN_K10_RHO2: f64 = 1.382_569_672_524_037;
}
