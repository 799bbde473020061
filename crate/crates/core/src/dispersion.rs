//! Walk-off and group-delay parameters from a uniaxial index model.
//!
//! Index data live in JSON files:
//!
//! ```json
//! {
//!   "material": "BBO",
//!   "o": { "form": "sellmeier-1", "coeffs": [A, B, C, D], "range_um": [lo, hi] },
//!   "e": { "form": "sellmeier-1", "coeffs": [A, B, C, D], "range_um": [lo, hi] },
//!   "citation": "..."
//! }
//! ```
//!
//! `sellmeier-1` is `n^2 = A + B / (lambda^2 - C) - D lambda^2` with `lambda` in
//! micrometres; `constant` takes a single coefficient `[n]`.

use crate::error::{positive, Error, Result};
use crate::model::WalkOffSet;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::path::Path;

/// Speed of light in um/fs.
pub const SPEED_OF_LIGHT_UM_PER_FS: f64 = 0.299_792_458;

/// Central-difference step for `dn/dlambda`, in um.
pub const DERIVATIVE_STEP_UM: f64 = 1e-3;

const BUNDLED_BBO: &str = include_str!("../data/bbo.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexForm {
    #[serde(rename = "sellmeier-1")]
    Sellmeier1,
    #[serde(rename = "constant")]
    Constant,
}

/// Refractive index of one principal polarization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrincipalIndex {
    pub form: IndexForm,
    pub coeffs: Vec<f64>,
    pub range_um: [f64; 2],
}

impl PrincipalIndex {
    pub fn constant(n: f64, range_um: [f64; 2]) -> Self {
        PrincipalIndex {
            form: IndexForm::Constant,
            coeffs: vec![n],
            range_um,
        }
    }

    pub fn sellmeier1(coeffs: [f64; 4], range_um: [f64; 2]) -> Self {
        PrincipalIndex {
            form: IndexForm::Sellmeier1,
            coeffs: coeffs.to_vec(),
            range_um,
        }
    }

    /// Index without range checking; NaN where the formula has no real value.
    fn eval(&self, lambda_um: f64) -> f64 {
        match self.form {
            IndexForm::Constant => self.coeffs[0],
            IndexForm::Sellmeier1 => {
                let [a, b, c, d] = [
                    self.coeffs[0],
                    self.coeffs[1],
                    self.coeffs[2],
                    self.coeffs[3],
                ];
                let l2 = lambda_um * lambda_um;
                (a + b / (l2 - c) - d * l2).sqrt()
            }
        }
    }

    fn validate(&self, pol: &'static str) -> Result<()> {
        let expected = match self.form {
            IndexForm::Constant => 1,
            IndexForm::Sellmeier1 => 4,
        };
        if self.coeffs.len() != expected {
            return Err(Error::Data(format!(
                "{pol}: form {:?} takes {expected} coefficients, got {}",
                self.form,
                self.coeffs.len()
            )));
        }
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Data(format!("{pol}: non-finite coefficient")));
        }
        let [lo, hi] = self.range_um;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Data(format!("{pol}: bad range [{lo}, {hi}] um")));
        }
        const SAMPLES: usize = 256;
        for i in 0..=SAMPLES {
            let lambda = lo + (hi - lo) * i as f64 / SAMPLES as f64;
            let n = self.eval(lambda);
            if !(n > 1.0 && n.is_finite()) {
                return Err(Error::Data(format!(
                    "{pol}: index {n} at {lambda} um is not real and > 1"
                )));
            }
        }
        Ok(())
    }
}

/// Uniaxial crystal: ordinary and extraordinary principal indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexModel {
    pub material: String,
    #[serde(rename = "o")]
    pub ordinary: PrincipalIndex,
    #[serde(rename = "e")]
    pub extraordinary: PrincipalIndex,
    pub citation: String,
}

impl IndexModel {
    pub fn new(
        material: impl Into<String>,
        ordinary: PrincipalIndex,
        extraordinary: PrincipalIndex,
        citation: impl Into<String>,
    ) -> Result<Self> {
        let m = IndexModel {
            material: material.into(),
            ordinary,
            extraordinary,
            citation: citation.into(),
        };
        m.validate()?;
        Ok(m)
    }

    /// Same index for both polarizations at every wavelength.
    pub fn dispersionless(n_o: f64, n_e: f64) -> Result<Self> {
        let range = [0.1, 10.0];
        Self::new(
            "dispersionless",
            PrincipalIndex::constant(n_o, range),
            PrincipalIndex::constant(n_e, range),
            "",
        )
    }

    /// BBO coefficients shipped with the crate.
    pub fn bundled_bbo() -> Self {
        Self::from_json(BUNDLED_BBO).expect("bundled BBO table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: IndexModel = serde_json::from_str(text).map_err(|e| Error::Data(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.ordinary.validate("o")?;
        self.extraordinary.validate("e")?;
        let [lo, hi] = self.range_um();
        if lo >= hi {
            return Err(Error::Data("o and e ranges do not overlap".into()));
        }
        Ok(())
    }

    /// Intersection of the two polarizations' validity ranges.
    pub fn range_um(&self) -> [f64; 2] {
        [
            self.ordinary.range_um[0].max(self.extraordinary.range_um[0]),
            self.ordinary.range_um[1].min(self.extraordinary.range_um[1]),
        ]
    }

    fn check_lambda(&self, lambda_um: f64) -> Result<()> {
        let [lo, hi] = self.range_um();
        if lambda_um >= lo && lambda_um <= hi {
            Ok(())
        } else {
            Err(Error::WavelengthOutOfRange {
                wavelength_um: lambda_um,
                lo_um: lo,
                hi_um: hi,
            })
        }
    }

    pub fn n_o(&self, lambda_um: f64) -> Result<f64> {
        self.check_lambda(lambda_um)?;
        Ok(self.ordinary.eval(lambda_um))
    }

    /// Principal extraordinary index (propagation normal to the optic axis).
    pub fn n_e_principal(&self, lambda_um: f64) -> Result<f64> {
        self.check_lambda(lambda_um)?;
        Ok(self.extraordinary.eval(lambda_um))
    }

    /// `n_o > n_e` over the whole range (checked at the range ends and midpoint).
    pub fn is_negative_uniaxial(&self) -> bool {
        let [lo, hi] = self.range_um();
        [lo, 0.5 * (lo + hi), hi]
            .iter()
            .all(|&l| self.ordinary.eval(l) > self.extraordinary.eval(l))
    }
}

fn check_angle(theta: f64) -> Result<f64> {
    if (0.0..=FRAC_PI_2).contains(&theta) {
        Ok(theta)
    } else {
        Err(Error::domain("theta", theta, "must lie in [0, pi/2]"))
    }
}

/// Index of the extraordinary wave at angle `theta` from the optic axis.
pub fn extraordinary_index(model: &IndexModel, lambda_um: f64, theta: f64) -> Result<f64> {
    check_angle(theta)?;
    let no = model.n_o(lambda_um)?;
    let ne = model.n_e_principal(lambda_um)?;
    let (s, c) = theta.sin_cos();
    Ok(1.0 / (c * c / (no * no) + s * s / (ne * ne)).sqrt())
}

/// `tan(rho)` of the Poynting-vector walk-off of the extraordinary wave.
pub fn walk_off_tangent(model: &IndexModel, lambda_um: f64, theta: f64) -> Result<f64> {
    let n = extraordinary_index(model, lambda_um, theta)?;
    // sin(2 theta) is not exactly zero at pi/2 in floating point
    if theta == 0.0 || theta == FRAC_PI_2 {
        return Ok(0.0);
    }
    let no = model.n_o(lambda_um)?;
    let ne = model.n_e_principal(lambda_um)?;
    Ok((0.5 * n * n * (2.0 * theta).sin() * (1.0 / (ne * ne) - 1.0 / (no * no))).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseMatchGeometry {
    pub pump_wavelength_um: f64,
    pub degenerate_wavelength_um: f64,
    /// Optic axis to pump propagation.
    pub cut_angle_rad: f64,
    /// Emission direction outside the crystal, relative to the pump.
    pub external_cone_angle_rad: f64,
}

impl PhaseMatchGeometry {
    /// Default BBO cut angle. Not a measured value; override it when known.
    pub const BBO_DEFAULT_CUT_DEG: f64 = 42.9;

    /// Degenerate down-conversion of `pump_wavelength_um`.
    pub fn degenerate(
        pump_wavelength_um: f64,
        cut_angle_rad: f64,
        external_cone_angle_rad: f64,
    ) -> Result<Self> {
        let g = PhaseMatchGeometry {
            pump_wavelength_um,
            degenerate_wavelength_um: 2.0 * pump_wavelength_um,
            cut_angle_rad,
            external_cone_angle_rad,
        };
        g.validate()?;
        Ok(g)
    }

    /// 415 nm pump, 830 nm pairs, 3.5 deg cone intersection, default cut.
    pub fn bbo_default() -> Self {
        Self::degenerate(
            0.415,
            Self::BBO_DEFAULT_CUT_DEG.to_radians(),
            3.5f64.to_radians(),
        )
        .expect("default geometry is valid")
    }

    pub fn validate(&self) -> Result<()> {
        positive("pump_wavelength_um", self.pump_wavelength_um)?;
        positive("degenerate_wavelength_um", self.degenerate_wavelength_um)?;
        if !(self.cut_angle_rad > 0.0 && self.cut_angle_rad < FRAC_PI_2) {
            return Err(Error::domain(
                "cut_angle_rad",
                self.cut_angle_rad,
                "must lie in (0, pi/2)",
            ));
        }
        if !(self.external_cone_angle_rad >= 0.0 && self.external_cone_angle_rad < FRAC_PI_2) {
            return Err(Error::domain(
                "external_cone_angle_rad",
                self.external_cone_angle_rad,
                "must lie in [0, pi/2)",
            ));
        }
        Ok(())
    }
}

/// Sine of the internal emission angle, `sin(ext) / n_bar`.
pub fn q_over_kbar(geometry: &PhaseMatchGeometry, n_bar: f64) -> Result<f64> {
    if !(n_bar >= 1.0 && n_bar.is_finite()) {
        return Err(Error::domain("n_bar", n_bar, "must be >= 1"));
    }
    let s = geometry.external_cone_angle_rad.sin() / n_bar;
    if !(s.abs() < 1.0) {
        return Err(Error::domain("sin(external)/n_bar", s, "no internal ray"));
    }
    Ok(s.asin().sin())
}

/// Group-delay mismatches, in fs per um of crystal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalParams {
    /// `1/u_o - 1/u_e`.
    pub d_fs_per_um: f64,
    /// `1/u_p - (1/u_o + 1/u_e) / 2`.
    pub lambda_fs_per_um: f64,
}

/// `n - lambda dn/dlambda` with a central difference of half-width `step_um`.
pub fn group_index<F>(index: F, lambda_um: f64, step_um: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    positive("step_um", step_um)?;
    let n = index(lambda_um)?;
    let dn = (index(lambda_um + step_um)? - index(lambda_um - step_um)?) / (2.0 * step_um);
    Ok(n - lambda_um * dn)
}

/// Inverse group velocities `(1/u_o, 1/u_e, 1/u_p)` in fs/um.
pub fn inverse_group_velocities(
    model: &IndexModel,
    geometry: &PhaseMatchGeometry,
    step_um: f64,
) -> Result<[f64; 3]> {
    geometry.validate()?;
    let theta = geometry.cut_angle_rad;
    let ld = geometry.degenerate_wavelength_um;
    let lp = geometry.pump_wavelength_um;
    let ng_o = group_index(|l| model.n_o(l), ld, step_um)?;
    let ng_e = group_index(|l| extraordinary_index(model, l, theta), ld, step_um)?;
    let ng_p = group_index(|l| extraordinary_index(model, l, theta), lp, step_um)?;
    Ok([ng_o, ng_e, ng_p].map(|n| n / SPEED_OF_LIGHT_UM_PER_FS))
}

/// Type-II timing parameters: ordinary and extraordinary photons at the
/// degenerate wavelength, extraordinary pump.
pub fn group_delay_params(
    model: &IndexModel,
    geometry: &PhaseMatchGeometry,
) -> Result<TemporalParams> {
    let [inv_uo, inv_ue, inv_up] = inverse_group_velocities(model, geometry, DERIVATIVE_STEP_UM)?;
    Ok(TemporalParams {
        d_fs_per_um: inv_uo - inv_ue,
        lambda_fs_per_um: inv_up - 0.5 * (inv_uo + inv_ue),
    })
}

/// `K̄` proxy: mean of the o and e(theta) phase indices at the degenerate wavelength.
pub fn mean_generated_index(model: &IndexModel, geometry: &PhaseMatchGeometry) -> Result<f64> {
    let ld = geometry.degenerate_wavelength_um;
    Ok(0.5 * (model.n_o(ld)? + extraordinary_index(model, ld, geometry.cut_angle_rad)?))
}

pub fn build_walkoff_set(model: &IndexModel, geometry: &PhaseMatchGeometry) -> Result<WalkOffSet> {
    geometry.validate()?;
    let theta = geometry.cut_angle_rad;
    let m_p = walk_off_tangent(model, geometry.pump_wavelength_um, theta)?;
    let m = walk_off_tangent(model, geometry.degenerate_wavelength_um, theta)?;
    let q = q_over_kbar(geometry, mean_generated_index(model, geometry)?)?;
    WalkOffSet::new(m_p, m, q)
}

/// Cut angle for collinear, degenerate type-II (e -> o + e) phase matching.
///
/// Bisection of `n_e(theta, lp) - (n_o(ld) + n_e(theta, ld)) / 2` on
/// [30, 60] deg down to 1e-6 rad.
pub fn collinear_type2_angle(model: &IndexModel, pump_wavelength_um: f64) -> Result<f64> {
    let lp = pump_wavelength_um;
    let ld = 2.0 * lp;
    let mismatch = |theta: f64| -> Result<f64> {
        Ok(extraordinary_index(model, lp, theta)?
            - 0.5 * (model.n_o(ld)? + extraordinary_index(model, ld, theta)?))
    };
    let (lo_deg, hi_deg) = (30.0f64, 60.0f64);
    let (mut lo, mut hi) = (lo_deg.to_radians(), hi_deg.to_radians());
    let mut f_lo = mismatch(lo)?;
    let f_hi = mismatch(hi)?;
    if f_lo * f_hi > 0.0 {
        return Err(Error::NoPhaseMatch { lo_deg, hi_deg });
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let f_mid = mismatch(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
