//! AP array pattern and IRS element radiation pattern (ERP).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadrature step for pattern averaging, degrees.
const AVG_STEP_DEG: f64 = 0.05;

/// A power pattern with a peak gain and a unit-peak normalized shape.
pub trait RadiationPattern {
    /// Peak linear power gain.
    fn max_gain(&self) -> f64;

    /// `(1/4pi) * integral of G * F over the sphere`.
    fn averaged_gain(&self) -> f64;
}

/// Peak gain making a `cos^q` half-space pattern integrate to `4 pi`.
pub fn erp_gain_from_exponent(q: f64) -> f64 {
    2.0 * (q + 1.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn db_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// IRS element pattern `cos^q(theta)` on the front half-space, zero behind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErpModel {
    pub exponent: f64,
}

impl ErpModel {
    pub fn new(exponent: f64) -> Result<Self> {
        if !(exponent >= 0.0 && exponent.is_finite()) {
            return Err(Error::invalid(format!("ERP exponent must be >= 0, got {exponent}")));
        }
        Ok(Self { exponent })
    }

    /// Exponent for a given peak gain, `q = G/2 - 1`.
    pub fn from_gain(gain: f64) -> Result<Self> {
        Self::new(gain / 2.0 - 1.0)
    }

    /// Normalized pattern at polar angle `theta_deg` from the facet normal.
    pub fn value(&self, theta_deg: f64) -> Result<f64> {
        if !(0.0..=180.0).contains(&theta_deg) {
            return Err(Error::invalid(format!(
                "ERP angle {theta_deg} outside [0, 180] degrees"
            )));
        }
        Ok(self.value_unchecked(theta_deg))
    }

    pub(crate) fn value_unchecked(&self, theta_deg: f64) -> f64 {
        if theta_deg > 90.0 {
            return 0.0;
        }
        let c = theta_deg.to_radians().cos().max(0.0);
        if self.exponent == 0.0 {
            1.0
        } else {
            c.powf(self.exponent)
        }
    }
}

impl RadiationPattern for ErpModel {
    fn max_gain(&self) -> f64 {
        erp_gain_from_exponent(self.exponent)
    }

    fn averaged_gain(&self) -> f64 {
        let g = self.max_gain();
        0.5 * simpson(0.0, PI / 2.0, AVG_STEP_DEG.to_radians(), |t| {
            g * self.value_unchecked(t.to_degrees()) * t.sin()
        })
    }
}

/// Fixed pattern of a vertical ULA of dipoles with electrical down-tilt.
///
/// `G_b(theta) = G_e cos^2(theta) * (sin(M v / 2) / (sqrt(M) sin(v / 2)))^2`
/// with `v = 2 pi d / lambda * (sin theta - sin tilt)`; `theta` is the
/// elevation below the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApArrayPattern {
    pub num_elements: u32,
    pub element_spacing_m: f64,
    pub tilt_deg: f64,
    pub element_max_gain: f64,
    pub wavelength_m: f64,
}

impl ApArrayPattern {
    pub fn new(
        num_elements: u32,
        element_spacing_m: f64,
        tilt_deg: f64,
        element_max_gain: f64,
        wavelength_m: f64,
    ) -> Result<Self> {
        if num_elements == 0 {
            return Err(Error::invalid("AP array needs at least one element"));
        }
        if !(element_spacing_m > 0.0 && wavelength_m > 0.0 && element_max_gain > 0.0) {
            return Err(Error::invalid(
                "AP array spacing, wavelength and element gain must be positive",
            ));
        }
        if !(tilt_deg > -90.0 && tilt_deg < 90.0) {
            return Err(Error::invalid("AP tilt must lie in (-90, 90) degrees"));
        }
        Ok(Self {
            num_elements,
            element_spacing_m,
            tilt_deg,
            element_max_gain,
            wavelength_m,
        })
    }

    /// Half-wavelength spaced array at carrier `fc_ghz`.
    pub fn half_wavelength(num_elements: u32, tilt_deg: f64, element_max_gain: f64, fc_ghz: f64) -> Result<Self> {
        let lambda = crate::channel::SPEED_OF_LIGHT / (fc_ghz * 1e9);
        Self::new(num_elements, lambda / 2.0, tilt_deg, element_max_gain, lambda)
    }

    /// `M * G_e * cos^2(tilt)`, the gain along the tilt direction.
    pub fn peak_gain(&self) -> f64 {
        let c = self.tilt_deg.to_radians().cos();
        self.num_elements as f64 * self.element_max_gain * c * c
    }

    /// `(AF / sqrt(M))^2 / M`, equal to 1 at `v = 0`.
    fn array_factor_norm(&self, theta: f64) -> f64 {
        let m = self.num_elements as f64;
        let v =
            2.0 * PI / self.wavelength_m * self.element_spacing_m * (theta.sin() - self.tilt_deg.to_radians().sin());
        let den = (v / 2.0).sin();
        if den.abs() < 1e-12 {
            return 1.0;
        }
        let r = (m * v / 2.0).sin() / (m * den);
        r * r
    }

    /// Absolute gain `G_b(theta)` at elevation `theta_deg` below the horizon.
    pub fn gain(&self, theta_deg: f64) -> f64 {
        let t = theta_deg.to_radians();
        let c = t.cos();
        self.element_max_gain * c * c * self.num_elements as f64 * self.array_factor_norm(t)
    }

    /// Normalized pattern `F(theta) = G_b(theta) / G_tx`; exactly 1 at the tilt.
    pub fn value(&self, theta_deg: f64) -> f64 {
        let t = theta_deg.to_radians();
        let ct = t.cos();
        let c0 = self.tilt_deg.to_radians().cos();
        (ct * ct) / (c0 * c0) * self.array_factor_norm(t)
    }
}

impl RadiationPattern for ApArrayPattern {
    fn max_gain(&self) -> f64 {
        self.peak_gain()
    }

    fn averaged_gain(&self) -> f64 {
        // Isotropic in azimuth: (1/4pi) * 2pi * integral of G_b(el) cos(el).
        0.5 * simpson(-PI / 2.0, PI / 2.0, AVG_STEP_DEG.to_radians(), |t| {
            self.gain(t.to_degrees()) * t.cos()
        })
    }
}

/// Unit-gain isotropic pattern.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Isotropic;

impl RadiationPattern for Isotropic {
    fn max_gain(&self) -> f64 {
        1.0
    }

    fn averaged_gain(&self) -> f64 {
        1.0
    }
}

/// Composite Simpson rule with at most `step` spacing.
fn simpson(a: f64, b: f64, step: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut n = ((b - a) / step).ceil() as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}
