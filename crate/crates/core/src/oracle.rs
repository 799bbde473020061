//! Numerical coupling efficiency straight from the overlap integrals.
//!
//! The biphoton amplitude at the crystal output is, up to constants,
//!
//! ```text
//! Phi(x', x'', tau) = box_[0,L](tau) * E_p((x' + x'' - A tau) / 2) * delta(x' - x'' - B tau)
//! ```
//!
//! with `tau = t / D` (a length) and the walk-off vectors `A = 2 M_p - M`,
//! `B = M + 2 Q / K̄`. The pump temporal envelope factors out of every
//! probability and cancels in the efficiency ratio, so only the spatial part
//! is integrated. The fiber modes are imaged back onto the crystal with radius
//! `w mu`; after the delta function removes one transverse plane,
//!
//! ```text
//! N(tau)  = ∫ d²u  psi(u) psi(u - B tau) E_p(u - (A + B) tau / 2)
//! P12     = ∫ dtau |N(tau)|²
//! P1      = ∫ dtau ∫ d²x |psi(x + B tau) E_p(x + (B - A) tau / 2)|²
//! P2      = ∫ dtau ∫ d²x |psi(x - B tau) E_p(x - (A + B) tau / 2)|²
//! eta     = P12 / sqrt(P1 P2)
//! ```
//!
//! `M` and `M_p` lie along the first transverse axis and `Q` along the second.
//! Gaussian profiles make every transverse integrand separable, so each
//! two-dimensional integral is evaluated as a product of two one-dimensional
//! trapezoid sums; the `tau` integral uses Gauss–Legendre on the hard box.
//! Nothing here uses the closed-form algebra.

use crate::error::{positive, Error, Result};
use crate::model::ExperimentConfig;
use crate::quadrature::{trapezoid, GaussLegendre, KahanSum};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes along the crystal.
    pub n_tau: usize,
    /// Trapezoid points per transverse axis.
    pub n_trans: usize,
    /// Transverse half-width in units of `max(w mu, r_p)`.
    pub extent_factor: f64,
    pub target_rel_err: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            n_tau: 64,
            n_trans: 96,
            extent_factor: 6.0,
            target_rel_err: 1e-5,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_tau < 8 {
            return Err(Error::domain("n_tau", self.n_tau as f64, "must be >= 8"));
        }
        if self.n_trans < 16 {
            return Err(Error::domain(
                "n_trans",
                self.n_trans as f64,
                "must be >= 16",
            ));
        }
        if !(self.extent_factor >= 4.0) || !self.extent_factor.is_finite() {
            return Err(Error::domain(
                "extent_factor",
                self.extent_factor,
                "must be >= 4",
            ));
        }
        positive("target_rel_err", self.target_rel_err)?;
        Ok(())
    }

    /// Both node counts multiplied by `2^level`.
    pub fn refined(&self, level: u32) -> Self {
        QuadratureSpec {
            n_tau: self.n_tau << level,
            n_trans: self.n_trans << level,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub eta_numeric: f64,
    pub est_rel_err: f64,
    /// Unnormalized `(P12, P1, P2)` at the finest level used.
    pub pieces: (f64, f64, f64),
    /// Node counts `(n_tau, n_trans)` of the reported value.
    pub nodes: (usize, usize),
}

/// One Gaussian factor `exp(-precision * (u - center)^2)`.
#[derive(Debug, Clone, Copy)]
struct Factor {
    center: f64,
    precision: f64,
}

/// Which photon carries the `B tau` offset in the integration variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArmLabelling {
    #[default]
    Standard,
    /// Integrate over the second photon's coordinate instead (`B -> -B`, arms swapped).
    Exchanged,
}

/// Transverse overlap densities for one experiment configuration.
#[derive(Debug, Clone)]
pub struct OverlapKernel {
    length_um: f64,
    mode_radius: f64,
    pump_radius: f64,
    /// `A` per transverse axis.
    a: [f64; 2],
    /// `B` per transverse axis.
    b: [f64; 2],
    half_width: f64,
    n_trans: usize,
    /// Squared amplitude normalization of the 1-D fiber mode, `1 / (sqrt(pi) s)`.
    mode_norm2: f64,
    labelling: ArmLabelling,
}

impl OverlapKernel {
    pub fn new(cfg: &ExperimentConfig, q: &QuadratureSpec) -> Result<Self> {
        Self::with_labelling(cfg, q, ArmLabelling::Standard)
    }

    pub fn with_labelling(
        cfg: &ExperimentConfig,
        q: &QuadratureSpec,
        labelling: ArmLabelling,
    ) -> Result<Self> {
        cfg.validate()?;
        q.validate()?;
        let w = cfg.walkoffs;
        let sign = match labelling {
            ArmLabelling::Standard => 1.0,
            ArmLabelling::Exchanged => -1.0,
        };
        let s = cfg.imaged_mode_radius_um();
        let r = cfg.pump_waist_um;
        Ok(OverlapKernel {
            length_um: cfg.crystal_length_um,
            mode_radius: s,
            pump_radius: r,
            a: [2.0 * w.m_p - w.m, 0.0],
            b: [sign * w.m, sign * 2.0 * w.q_over_k],
            half_width: q.extent_factor * s.max(r),
            n_trans: q.n_trans,
            mode_norm2: 1.0 / (PI.sqrt() * s),
            labelling,
        })
    }

    pub fn labelling(&self) -> ArmLabelling {
        self.labelling
    }

    pub fn crystal_length_um(&self) -> f64 {
        self.length_um
    }

    /// Trapezoid integral of a product of Gaussian factors over a window
    /// centred on the product's peak.
    fn axis_integral(&self, factors: &[Factor]) -> f64 {
        let (num, den) = factors.iter().fold((0.0, 0.0), |(n, d), f| {
            (n + f.precision * f.center, d + f.precision)
        });
        let mid = num / den;
        trapezoid(
            mid - self.half_width,
            mid + self.half_width,
            self.n_trans,
            |u| {
                let e: f64 = factors
                    .iter()
                    .map(|f| f.precision * (u - f.center) * (u - f.center))
                    .sum();
                (-e).exp()
            },
        )
    }

    fn mode_amp(&self, center: f64) -> Factor {
        Factor {
            center,
            precision: 0.5 / (self.mode_radius * self.mode_radius),
        }
    }

    fn pump_amp(&self, center: f64) -> Factor {
        Factor {
            center,
            precision: 0.5 / (self.pump_radius * self.pump_radius),
        }
    }

    fn squared(f: Factor) -> Factor {
        Factor {
            precision: 2.0 * f.precision,
            ..f
        }
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        if tau.is_finite() && (0.0..=self.length_um).contains(&tau) {
            Ok(())
        } else {
            Err(Error::domain("tau", tau, "must lie in [0, L]"))
        }
    }

    /// Pair amplitude `N(tau)` projected on both fiber modes.
    ///
    /// Real-valued: every profile involved is a real Gaussian.
    pub fn pair_density(&self, tau: f64) -> Result<f64> {
        self.check_tau(tau)?;
        Ok(self.pair_density_unchecked(tau))
    }

    fn pair_density_unchecked(&self, tau: f64) -> f64 {
        (0..2)
            .map(|axis| {
                let (a, b) = (self.a[axis], self.b[axis]);
                // (psi(u) psi(u - B tau))(normalized) * E_p(u - (A + B) tau / 2)
                let v = self.axis_integral(&[
                    self.mode_amp(0.0),
                    self.mode_amp(b * tau),
                    self.pump_amp(0.5 * (a + b) * tau),
                ]);
                self.mode_norm2 * v
            })
            .product()
    }

    /// Singles density of `arm` (1 or 2) at `tau`, the other photon unconstrained.
    pub fn single_density(&self, arm: u8, tau: f64) -> Result<f64> {
        self.check_tau(tau)?;
        match arm {
            1 | 2 => Ok(self.single_density_unchecked(arm, tau)),
            _ => Err(Error::domain("arm", f64::from(arm), "must be 1 or 2")),
        }
    }

    fn single_density_unchecked(&self, arm: u8, tau: f64) -> f64 {
        (0..2)
            .map(|axis| {
                let (a, b) = (self.a[axis], self.b[axis]);
                let (mode_c, pump_c) = if arm == 1 {
                    (-b * tau, -0.5 * (b - a) * tau)
                } else {
                    (b * tau, 0.5 * (a + b) * tau)
                };
                let v = self.axis_integral(&[
                    Self::squared(self.mode_amp(mode_c)),
                    Self::squared(self.pump_amp(pump_c)),
                ]);
                self.mode_norm2 * v
            })
            .product()
    }

    /// `(P12, P1, P2)` with an `n_tau`-point Gauss–Legendre rule over `[0, L]`.
    pub fn probabilities(&self, n_tau: usize) -> (f64, f64, f64) {
        let rule = GaussLegendre::new(n_tau);
        let (mut p12, mut p1, mut p2) = (
            KahanSum::default(),
            KahanSum::default(),
            KahanSum::default(),
        );
        for (tau, wt) in rule.mapped(0.0, self.length_um) {
            let n = self.pair_density_unchecked(tau);
            p12.add(wt * n * n);
            p1.add(wt * self.single_density_unchecked(1, tau));
            p2.add(wt * self.single_density_unchecked(2, tau));
        }
        let (p1, p2) = (p1.value(), p2.value());
        match self.labelling {
            ArmLabelling::Standard => (p12.value(), p1, p2),
            ArmLabelling::Exchanged => (p12.value(), p2, p1),
        }
    }
}

/// `N(tau)` with the default transverse grid.
pub fn pair_overlap_density(cfg: &ExperimentConfig, tau: f64) -> Result<f64> {
    OverlapKernel::new(cfg, &QuadratureSpec::default())?.pair_density(tau)
}

fn eta_at(
    cfg: &ExperimentConfig,
    q: &QuadratureSpec,
    labelling: ArmLabelling,
) -> Result<(f64, (f64, f64, f64))> {
    let kernel = OverlapKernel::with_labelling(cfg, q, labelling)?;
    let pieces = kernel.probabilities(q.n_tau);
    let (p12, p1, p2) = pieces;
    if !(p12 > 0.0 && p1 > 0.0 && p2 > 0.0) {
        return Err(Error::domain(
            "overlap",
            p12.min(p1).min(p2),
            "probability integral underflowed",
        ));
    }
    Ok((p12 / (p1 * p2).sqrt(), pieces))
}

/// Efficiency from the overlap integrals with up to two grid doublings.
///
/// The error estimate is the relative change between the last two levels.
pub fn eta_numeric(cfg: &ExperimentConfig, q: &QuadratureSpec) -> Result<OracleResult> {
    eta_numeric_labelled(cfg, q, ArmLabelling::Standard)
}

pub fn eta_numeric_labelled(
    cfg: &ExperimentConfig,
    q: &QuadratureSpec,
    labelling: ArmLabelling,
) -> Result<OracleResult> {
    q.validate()?;
    let (mut prev, _) = eta_at(cfg, q, labelling)?;
    let mut last = (prev, prev, f64::INFINITY);
    for level in 1..=2 {
        let spec = q.refined(level);
        let (eta, pieces) = eta_at(cfg, &spec, labelling)?;
        let est = (eta - prev).abs() / eta;
        if est <= q.target_rel_err {
            return Ok(OracleResult {
                eta_numeric: eta,
                est_rel_err: est,
                pieces,
                nodes: (spec.n_tau, spec.n_trans),
            });
        }
        last = (prev, eta, est);
        prev = eta;
    }
    let (coarse, refined, est_rel_err) = last;
    Err(Error::Convergence {
        coarse,
        refined,
        est_rel_err,
        target: q.target_rel_err,
    })
}
