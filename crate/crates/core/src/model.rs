//! Parameter algebra and the closed-form fiber-coupling efficiency.
//!
//! Lengths are in micrometres unless a name says otherwise. Gaussian radii
//! follow the field-amplitude convention `exp(-|x|^2 / 2 r^2)`, for the pump
//! as well as for the fiber mode.

use crate::error::{non_negative, positive, Error, Result};
use crate::special::{erf_over_sigma, sigma_over_erf};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Crystal and geometry scalars that feed `alpha1`, `alpha2`, `beta`.
///
/// The pump and extraordinary walk-offs lie in the crystal principal plane
/// and are taken parallel; the phase-matching transverse wave-vector is
/// perpendicular to them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkOffSet {
    /// Pump walk-off `|M_p|` (transverse displacement per unit length).
    pub m_p: f64,
    /// Walk-off of the extraordinary down-converted photon, `|M|`.
    pub m: f64,
    /// `|Q| / K̄`.
    pub q_over_k: f64,
}

impl WalkOffSet {
    /// Values for BBO at 830 nm with the 3.5 deg cone-intersection geometry.
    pub const BBO_830NM: WalkOffSet = WalkOffSet {
        m_p: 0.07631,
        m: 0.07243,
        q_over_k: 0.036215,
    };

    pub fn new(m_p: f64, m: f64, q_over_k: f64) -> Result<Self> {
        let w = WalkOffSet { m_p, m, q_over_k };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m_p", self.m_p),
            ("m", self.m),
            ("q_over_k", self.q_over_k),
        ] {
            non_negative(name, v)?;
            if v >= 1.0 {
                return Err(Error::domain(name, v, "must be < 1 (paraxial regime)"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBeta {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
}

impl AlphaBeta {
    /// Same crystal seen with the two arms relabelled.
    pub fn exchanged(self) -> Self {
        AlphaBeta {
            alpha1: self.alpha2,
            alpha2: self.alpha1,
            beta: self.beta,
        }
    }
}

pub fn compute_alpha_beta(w: &WalkOffSet) -> Result<AlphaBeta> {
    w.validate()?;
    let q2 = w.q_over_k * w.q_over_k;
    let d = w.m_p - w.m;
    Ok(AlphaBeta {
        alpha1: w.m_p * w.m_p + q2,
        alpha2: d * d + q2,
        beta: w.m * w.m + 4.0 * q2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub crystal_length_um: f64,
    /// Pump field radius at the crystal.
    pub pump_waist_um: f64,
    /// Fiber mode field radius (`MFD / 2√2`).
    pub fiber_mode_radius_um: f64,
    /// Object over image distance of the coupling lens.
    pub inverse_magnification: f64,
    pub walkoffs: WalkOffSet,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        positive("crystal_length_um", self.crystal_length_um)?;
        positive("pump_waist_um", self.pump_waist_um)?;
        positive("fiber_mode_radius_um", self.fiber_mode_radius_um)?;
        positive("inverse_magnification", self.inverse_magnification)?;
        self.walkoffs.validate()
    }

    /// Fiber mode radius imaged back onto the crystal, `w * mu`.
    pub fn imaged_mode_radius_um(&self) -> f64 {
        self.fiber_mode_radius_um * self.inverse_magnification
    }

    pub fn xi(&self) -> f64 {
        self.imaged_mode_radius_um() / self.pump_waist_um
    }

    pub fn with_length(self, crystal_length_um: f64) -> Self {
        ExperimentConfig {
            crystal_length_um,
            ..self
        }
    }

    pub fn with_mu(self, inverse_magnification: f64) -> Self {
        ExperimentConfig {
            inverse_magnification,
            ..self
        }
    }
}

/// Dimensionless quantities the closed form depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub xi: f64,
    pub sigma_c: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub alpha_beta: AlphaBeta,
}

impl ShapeParams {
    /// Builds the shape parameters from `L / r_p` and `xi` alone.
    pub fn from_reduced(length_over_waist: f64, xi: f64, ab: AlphaBeta) -> Result<Self> {
        non_negative("length_over_waist", length_over_waist)?;
        positive("xi", xi)?;
        for (name, v) in [
            ("alpha1", ab.alpha1),
            ("alpha2", ab.alpha2),
            ("beta", ab.beta),
        ] {
            non_negative(name, v)?;
        }
        let xi2 = xi * xi;
        let sigma_c = length_over_waist
            * (((ab.alpha1 + ab.alpha2) * xi2 + ab.beta) / (xi2 * (2.0 + xi2))).sqrt();
        let arm = |alpha: f64| length_over_waist * (alpha / (1.0 + xi2)).sqrt();
        Ok(ShapeParams {
            xi,
            sigma_c,
            sigma1: arm(ab.alpha1),
            sigma2: arm(ab.alpha2),
            alpha_beta: ab,
        })
    }

    /// `4 (1 + xi^2) / (2 + xi^2)^2`, the efficiency of a vanishingly thin crystal.
    pub fn prefactor(&self) -> f64 {
        thin_crystal_limit(self.xi)
    }
}

pub fn thin_crystal_limit(xi: f64) -> f64 {
    let xi2 = xi * xi;
    4.0 * (1.0 + xi2) / ((2.0 + xi2) * (2.0 + xi2))
}

pub fn shape_params(cfg: &ExperimentConfig) -> Result<ShapeParams> {
    cfg.validate()?;
    let ab = compute_alpha_beta(&cfg.walkoffs)?;
    ShapeParams::from_reduced(cfg.crystal_length_um / cfg.pump_waist_um, cfg.xi(), ab)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyResult {
    pub eta: f64,
    pub shape: ShapeParams,
}

pub fn eta_closed_form(sp: &ShapeParams) -> Result<EfficiencyResult> {
    let fields = [
        ("xi", sp.xi),
        ("sigma_c", sp.sigma_c),
        ("sigma1", sp.sigma1),
        ("sigma2", sp.sigma2),
    ];
    for (name, v) in fields {
        if !v.is_finite() {
            return Err(Error::domain(name, v, "must be finite"));
        }
    }
    positive("xi", sp.xi)?;
    let arms = sigma_over_erf(sp.sigma1)? * sigma_over_erf(sp.sigma2)?;
    let eta = sp.prefactor() * erf_over_sigma(sp.sigma_c)? * arms.sqrt();
    if !(eta > 0.0) {
        return Err(Error::domain("eta", eta, "underflowed to zero"));
    }
    // rounding can push the L -> 0, xi -> 0 corner a few ulps above one
    Ok(EfficiencyResult {
        eta: eta.min(1.0),
        shape: *sp,
    })
}

/// Shape parameters followed by the closed form.
pub fn efficiency(cfg: &ExperimentConfig) -> Result<EfficiencyResult> {
    eta_closed_form(&shape_params(cfg)?)
}

/// Gaussian field radius of a fiber mode from its mode-field diameter.
pub fn mode_field_radius(mfd_um: f64) -> Result<f64> {
    Ok(positive("mfd_um", mfd_um)? / (2.0 * SQRT_2))
}

/// Field radius of a pump quoted by its focal spot diameter, `d / 2√2`.
///
/// A 150 um focus gives `r_p ≈ 53 um`.
pub fn pump_waist_from_diameter(diameter_um: f64) -> Result<f64> {
    Ok(positive("diameter_um", diameter_um)? / (2.0 * SQRT_2))
}

/// Thin-lens imaging of the crystal face onto the fiber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Imaging {
    pub inverse_magnification: f64,
    pub image_distance_mm: f64,
}

/// Solves `1/d_bl + 1/d_al = 1/f` and returns `mu = d_bl / d_al = d_bl / f - 1`.
pub fn magnification(focal_mm: f64, object_mm: f64) -> Result<Imaging> {
    positive("focal_mm", focal_mm)?;
    positive("object_mm", object_mm)?;
    if object_mm <= focal_mm {
        return Err(Error::NoRealImage {
            focal_mm,
            object_mm,
        });
    }
    Ok(Imaging {
        inverse_magnification: object_mm / focal_mm - 1.0,
        image_distance_mm: 1.0 / (1.0 / focal_mm - 1.0 / object_mm),
    })
}

fn unit_interval(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(Error::domain(name, v, "must lie in (0, 1]"))
    }
}

/// Raw coincidence efficiency seen behind detectors and filters.
pub fn effective_to_raw(eta_fc: f64, detector_eff: f64, filter_transmission: f64) -> Result<f64> {
    Ok(unit_interval("eta_fc", eta_fc)?
        * unit_interval("detector_eff", detector_eff)?
        * unit_interval("filter_transmission", filter_transmission)?)
}

/// Inverse of [`effective_to_raw`]: strips detector and filter losses from a measurement.
pub fn raw_to_effective(raw: f64, detector_eff: f64, filter_transmission: f64) -> Result<f64> {
    Ok(unit_interval("raw", raw)?
        / (unit_interval("detector_eff", detector_eff)?
            * unit_interval("filter_transmission", filter_transmission)?))
}
