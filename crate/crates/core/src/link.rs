//! Optimal SNR of an IRS-assisted link and its Monte-Carlo ergodic metrics.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::LinkStats;
use crate::error::{Error, Result};
use crate::pattern::ErpModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IrsMode {
    Active,
    Passive,
}

impl std::fmt::Display for IrsMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IrsMode::Active => "active",
            IrsMode::Passive => "passive",
        })
    }
}

/// One deployable reflector (without its mounting spot).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrsUnit {
    pub n_elements: usize,
    pub mode: IrsMode,
    /// Maximum reflect power of an active IRS, W. Ignored when passive.
    pub max_power_w: f64,
    /// Amplifier noise PSD of an active element, W/Hz. Ignored when passive.
    pub amp_noise_psd_w_hz: f64,
    pub erp: ErpModel,
}

impl IrsUnit {
    pub fn passive(n_elements: usize, erp: ErpModel) -> Self {
        Self {
            n_elements,
            mode: IrsMode::Passive,
            max_power_w: 0.0,
            amp_noise_psd_w_hz: 0.0,
            erp,
        }
    }

    pub fn active(n_elements: usize, max_power_w: f64, amp_noise_psd_w_hz: f64, erp: ErpModel) -> Self {
        Self {
            n_elements,
            mode: IrsMode::Active,
            max_power_w,
            amp_noise_psd_w_hz,
            erp,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::invalid("IRS needs at least one element"));
        }
        if self.mode == IrsMode::Active && !(self.max_power_w > 0.0 && self.amp_noise_psd_w_hz >= 0.0) {
            return Err(Error::invalid(
                "active IRS needs positive power and nonnegative amplifier noise",
            ));
        }
        Ok(())
    }

    /// Amplifier noise power per element `sigma_v^2 = N_v * B_w`; 0 if passive.
    pub fn amp_noise_power(&self, budget: &PowerBudget) -> f64 {
        match self.mode {
            IrsMode::Active => self.amp_noise_psd_w_hz * budget.bandwidth_hz,
            IrsMode::Passive => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBudget {
    pub total_w: f64,
    /// AP transmit power toward a UE when an active IRS takes the rest.
    pub ue_max_w: f64,
    pub bandwidth_hz: f64,
    pub noise_psd_w_hz: f64,
}

impl PowerBudget {
    /// Receiver noise power `sigma^2 = N_0 * B_w`.
    pub fn noise_power(&self) -> f64 {
        self.noise_psd_w_hz * self.bandwidth_hz
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_w > 0.0 && self.ue_max_w > 0.0 && self.bandwidth_hz > 0.0 && self.noise_psd_w_hz > 0.0) {
            return Err(Error::invalid("power budget entries must be positive"));
        }
        Ok(())
    }
}

/// Uniform amplification `p = sqrt(P_A / (P_u sum|h_i|^2 + N sigma_v^2))`.
pub fn optimal_amplification(h_i: &[f64], ue_power: f64, irs_power: f64, amp_noise: f64) -> Result<f64> {
    let s_ii: f64 = h_i.iter().map(|a| a * a).sum();
    amplification_from_sums(s_ii, h_i.len(), ue_power, irs_power, amp_noise)
}

fn amplification_from_sums(s_ii: f64, n: usize, ue_power: f64, irs_power: f64, amp_noise: f64) -> Result<f64> {
    let den = ue_power * s_ii + n as f64 * amp_noise;
    if !(den > 0.0) {
        return Err(Error::invalid(
            "amplification undefined for zero incident power and zero amplifier noise",
        ));
    }
    Ok((irs_power / den).sqrt())
}

/// Amplification of `unit` for the given incident amplitudes; 1 when passive.
pub fn unit_amplification(unit: &IrsUnit, h_i: &[f64], budget: &PowerBudget) -> Result<f64> {
    match unit.mode {
        IrsMode::Passive => Ok(1.0),
        IrsMode::Active => optimal_amplification(h_i, budget.ue_max_w, unit.max_power_w, unit.amp_noise_power(budget)),
    }
}

/// Output power of an active IRS under amplification `p`.
pub fn amplifier_output_power(p: f64, h_i: &[f64], ue_power: f64, amp_noise: f64) -> f64 {
    let s_ii: f64 = h_i.iter().map(|a| a * a).sum();
    p * p * (ue_power * s_ii + h_i.len() as f64 * amp_noise)
}

/// Per-realization sufficient statistics of the reflected channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelSums {
    /// `sum |h_i,n| |h_r,n|`
    pub s_ir: f64,
    /// `sum |h_i,n|^2`
    pub s_ii: f64,
    /// `sum |h_r,n|^2`
    pub s_rr: f64,
    pub n: usize,
}

impl ChannelSums {
    pub fn from_amplitudes(h_i: &[f64], h_r: &[f64]) -> Self {
        let mut s = Self {
            n: h_i.len(),
            ..Self::default()
        };
        for (a, b) in h_i.iter().zip(h_r) {
            s.s_ir += a * b;
            s.s_ii += a * a;
            s.s_rr += b * b;
        }
        s
    }
}

/// SNR under optimal phases, amplification and AP power.
fn snr_from_sums(sums: &ChannelSums, h_d: f64, unit: Option<&IrsUnit>, budget: &PowerBudget) -> f64 {
    let sigma2 = budget.noise_power();
    let unit = match unit {
        Some(u) if sums.n > 0 => u,
        _ => return budget.total_w * h_d * h_d / sigma2,
    };
    match unit.mode {
        IrsMode::Passive => {
            let a = sums.s_ir + h_d;
            budget.total_w * a * a / sigma2
        }
        IrsMode::Active => {
            let p_u = budget.ue_max_w;
            let p_a = unit.max_power_w;
            let sv2 = unit.amp_noise_power(budget);
            let t = p_u * sums.s_ii + sums.n as f64 * sv2;
            let a = p_a.sqrt() * sums.s_ir + t.sqrt() * h_d;
            p_u * a * a / (p_a * sv2 * sums.s_rr + sigma2 * t)
        }
    }
}

/// Optimal SNR of a UE served by `unit` (or by the AP alone when `unit` is
/// `None` or the amplitude lists are empty).
///
/// Passive: `P_total (sum|h_i||h_r| + |h_d|)^2 / sigma^2`. Active:
/// `P_u (sqrt(P_A) S + sqrt(T) |h_d|)^2 / (P_A sigma_v^2 sum|h_r|^2 + sigma^2 T)`
/// with `T = P_u sum|h_i|^2 + N sigma_v^2`.
pub fn snr_optimal(h_i: &[f64], h_r: &[f64], h_d: f64, unit: Option<&IrsUnit>, budget: &PowerBudget) -> Result<f64> {
    if h_i.len() != h_r.len() {
        return Err(Error::invalid(format!(
            "amplitude lists differ in length: {} vs {}",
            h_i.len(),
            h_r.len()
        )));
    }
    if let Some(u) = unit {
        if !h_i.is_empty() && h_i.len() != u.n_elements {
            return Err(Error::invalid("amplitude list length does not match the IRS size"));
        }
    }
    if h_d < 0.0 || h_i.iter().chain(h_r).any(|&a| a < 0.0) {
        return Err(Error::invalid("amplitudes must be nonnegative"));
    }
    Ok(snr_from_sums(
        &ChannelSums::from_amplitudes(h_i, h_r),
        h_d,
        unit,
        budget,
    ))
}

/// SNR for arbitrary phases and amplification on complex channels:
/// `P_u |sum h_i h_r p e^{j phi} + h_d|^2 / (p^2 sigma_v^2 sum|h_r|^2 + sigma^2)`.
#[allow(clippy::too_many_arguments)]
pub fn snr_generic(
    h_i: &[Complex64],
    h_r: &[Complex64],
    h_d: Complex64,
    phases: &[f64],
    amplification: f64,
    tx_power: f64,
    amp_noise: f64,
    noise: f64,
) -> f64 {
    let mut sig = h_d;
    let mut s_rr = 0.0;
    for ((a, b), phi) in h_i.iter().zip(h_r).zip(phases) {
        sig += a * b * amplification * Complex64::from_polar(1.0, *phi);
        s_rr += b.norm_sqr();
    }
    tx_power * sig.norm_sqr() / (amplification * amplification * amp_noise * s_rr + noise)
}

/// Phases aligning every cascaded path with the direct link.
pub fn aligned_phases(h_i: &[Complex64], h_r: &[Complex64], h_d: Complex64) -> Vec<f64> {
    h_i.iter().zip(h_r).map(|(a, b)| -(a * b).arg() + h_d.arg()).collect()
}

/// Statistics of the three links of one (UE, spot) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSet {
    /// AP-UE link; `None` forces `h_d = 0`.
    pub direct: Option<LinkStats>,
    /// (AP-IRS, IRS-UE); `None` for AP-only service.
    pub reflected: Option<(LinkStats, LinkStats)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkMetrics {
    /// `E{log2(1 + gamma)}`, bits/s/Hz.
    pub ergodic_rate: f64,
    /// `10 log10(E{gamma})`.
    pub avg_snr_db: f64,
    pub mc_samples: usize,
}

impl LinkMetrics {
    pub fn covered(&self, threshold_db: f64) -> bool {
        coverage_indicator(self.avg_snr_db, threshold_db)
    }
}

/// Monte-Carlo ergodic rate and average SNR over `n_mc` fading draws.
///
/// Each draw takes `h_d` first, then alternates `h_i,n`, `h_r,n` per element.
pub fn ergodic_throughput_mc<R: Rng + ?Sized>(
    links: &LinkSet,
    unit: Option<&IrsUnit>,
    budget: &PowerBudget,
    n_mc: usize,
    rng: &mut R,
) -> Result<LinkMetrics> {
    if n_mc == 0 {
        return Err(Error::invalid("n_mc must be >= 1"));
    }
    if let Some(u) = unit {
        u.validate()?;
    }
    let direct = links.direct.map(|s| s.sampler()).transpose()?;
    let reflected = match (links.reflected, unit) {
        (Some((ai, iu)), Some(u)) => Some((ai.sampler()?, iu.sampler()?, u.n_elements)),
        _ => None,
    };
    let mut rate = 0.0;
    let mut snr = 0.0;
    for _ in 0..n_mc {
        let h_d = direct.map_or(0.0, |s| s.draw(rng));
        let mut sums = ChannelSums::default();
        if let Some((si, sr, n)) = &reflected {
            sums.n = *n;
            for _ in 0..*n {
                let a = si.draw(rng);
                let b = sr.draw(rng);
                sums.s_ir += a * b;
                sums.s_ii += a * a;
                sums.s_rr += b * b;
            }
        }
        let g = snr_from_sums(&sums, h_d, unit, budget);
        rate += (1.0 + g).log2();
        snr += g;
    }
    let n = n_mc as f64;
    Ok(LinkMetrics {
        ergodic_rate: rate / n,
        avg_snr_db: 10.0 * (snr / n).log10(),
        mc_samples: n_mc,
    })
}

pub fn coverage_indicator(avg_snr_db: f64, threshold_db: f64) -> bool {
    avg_snr_db >= threshold_db
}

/// Jain's index `(sum R)^2 / (U sum R^2)`.
pub fn fairness_index(rates: &[f64]) -> Result<f64> {
    let sum: f64 = rates.iter().sum();
    let sq: f64 = rates.iter().map(|r| r * r).sum();
    if rates.is_empty() || !(sq > 0.0) {
        return Err(Error::invalid("fairness index needs at least one positive rate"));
    }
    Ok(sum * sum / (rates.len() as f64 * sq))
}
