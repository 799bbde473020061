//! Run-configuration documents and resolution of flags into core types.

use crate::args::{ExperimentArgs, WalkoffArgs};
use serde::{Deserialize, Serialize};
use spdcfc_core::dispersion::{build_walkoff_set, IndexModel, PhaseMatchGeometry};
use spdcfc_core::{
    magnification, mode_field_radius, pump_waist_from_diameter, ExperimentConfig, QuadratureSpec,
    WalkOffSet,
};
use std::fmt;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;
pub const SELLMEIER_ENV: &str = "SPDCFC_SELLMEIER_PATH";

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or unreadable configuration: exit 2.
    Usage(String),
    /// Domain or convergence failure: exit 1.
    Domain(spdcfc_core::Error),
    /// A check the command performs did not hold (oracle disagreement): exit 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Domain(e) => write!(f, "error: {e}"),
            CliError::Failed(msg) => write!(f, "check failed: {msg}"),
        }
    }
}

impl From<spdcfc_core::Error> for CliError {
    fn from(e: spdcfc_core::Error) -> Self {
        CliError::Domain(e)
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Index data source plus phase-matching geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionInputs {
    /// Path to a Sellmeier JSON file, or `bbo` for the bundled table.
    pub sellmeier: String,
    pub geometry: PhaseMatchGeometry,
}

/// JSON document accepted by `--config` and produced by `eval --format json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<DispersionInputs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    /// Output echo written by `eval`; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
}

impl RunConfig {
    pub fn new(experiment: ExperimentConfig) -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            experiment: Some(experiment),
            dispersion: None,
            quadrature: None,
            result: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let rc: RunConfig =
            serde_json::from_str(text).map_err(|e| usage(format!("config: {e}")))?;
        if rc.schema_version != SCHEMA_VERSION {
            return Err(usage(format!(
                "config: unsupported schema_version {} (expected {SCHEMA_VERSION})",
                rc.schema_version
            )));
        }
        if let Some(exp) = &rc.experiment {
            exp.validate()?;
        }
        if let Some(q) = &rc.quadrature {
            q.validate()?;
        }
        if let Some(d) = &rc.dispersion {
            d.geometry.validate()?;
        }
        Ok(rc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

pub fn load_optional(path: Option<&Path>) -> Result<Option<RunConfig>, CliError> {
    path.map(RunConfig::load).transpose()
}

pub fn load_index_model(source: &str) -> Result<IndexModel, CliError> {
    if source.eq_ignore_ascii_case("bbo") {
        Ok(IndexModel::bundled_bbo())
    } else {
        Ok(IndexModel::from_path(source)?)
    }
}

/// Walk-offs derived from index data, kept for reporting.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub model: IndexModel,
    pub geometry: PhaseMatchGeometry,
}

fn geometry_from(
    flags: &WalkoffArgs,
    base: Option<&PhaseMatchGeometry>,
) -> Result<PhaseMatchGeometry, CliError> {
    let base = base
        .copied()
        .unwrap_or_else(PhaseMatchGeometry::bbo_default);
    let pump_um = flags
        .pump_nm
        .map_or(base.pump_wavelength_um, |nm| nm * 1e-3);
    let degenerate = if flags.pump_nm.is_some() {
        2.0 * pump_um
    } else {
        base.degenerate_wavelength_um
    };
    let g = PhaseMatchGeometry {
        pump_wavelength_um: pump_um,
        degenerate_wavelength_um: degenerate,
        cut_angle_rad: flags.cut_deg.map_or(base.cut_angle_rad, f64::to_radians),
        external_cone_angle_rad: flags
            .cone_deg
            .map_or(base.external_cone_angle_rad, f64::to_radians),
    };
    g.validate()?;
    Ok(g)
}

/// Walk-off precedence: explicit flags, `--sellmeier`, config file, then
/// the `SPDCFC_SELLMEIER_PATH` environment variable.
pub fn resolve_walkoffs(
    flags: &WalkoffArgs,
    file: Option<&RunConfig>,
) -> Result<Option<(WalkOffSet, Option<Derivation>)>, CliError> {
    let file_walkoffs = file.and_then(|f| f.experiment.map(|e| e.walkoffs));
    let file_dispersion = file.and_then(|f| f.dispersion.as_ref());

    let explicit = [flags.m_p, flags.m, flags.q_over_k];
    if explicit.iter().any(Option::is_some) {
        let base = match (file_walkoffs, explicit.iter().all(Option::is_some)) {
            (_, true) => WalkOffSet {
                m_p: 0.0,
                m: 0.0,
                q_over_k: 0.0,
            },
            (Some(b), false) => b,
            (None, false) => return Err(usage("--Mp, --M and --QK must be given together")),
        };
        let w = WalkOffSet::new(
            flags.m_p.unwrap_or(base.m_p),
            flags.m.unwrap_or(base.m),
            flags.q_over_k.unwrap_or(base.q_over_k),
        )?;
        return Ok(Some((w, None)));
    }

    let derive =
        |source: &str, base_geometry: Option<&PhaseMatchGeometry>| -> Result<_, CliError> {
            let model = load_index_model(source)?;
            let geometry = geometry_from(flags, base_geometry)?;
            let w = build_walkoff_set(&model, &geometry)?;
            Ok(Some((w, Some(Derivation { model, geometry }))))
        };

    if let Some(source) = &flags.sellmeier {
        return derive(source, file_dispersion.map(|d| &d.geometry));
    }
    if let Some(w) = file_walkoffs {
        return Ok(Some((w, None)));
    }
    if let Some(d) = file_dispersion {
        return derive(&d.sellmeier, Some(&d.geometry));
    }
    if let Ok(path) = std::env::var(SELLMEIER_ENV) {
        if !path.is_empty() {
            return derive(&path, None);
        }
    }
    Ok(None)
}

/// Experiment fields gathered from a config file and flags; any may be missing.
#[derive(Debug, Clone, Default)]
pub struct PartialExperiment {
    pub length_um: Option<f64>,
    pub pump_waist_um: Option<f64>,
    pub fiber_mode_radius_um: Option<f64>,
    pub mu: Option<f64>,
    pub walkoffs: Option<WalkOffSet>,
    pub derivation: Option<Derivation>,
    pub file: Option<RunConfig>,
}

impl PartialExperiment {
    pub fn from_args(args: &ExperimentArgs) -> Result<Self, CliError> {
        let file = load_optional(args.config.as_deref())?;
        let base = file.as_ref().and_then(|f| f.experiment);
        let mut p = PartialExperiment {
            length_um: base.map(|b| b.crystal_length_um),
            pump_waist_um: base.map(|b| b.pump_waist_um),
            fiber_mode_radius_um: base.map(|b| b.fiber_mode_radius_um),
            mu: base.map(|b| b.inverse_magnification),
            ..Default::default()
        };
        if let Some(mm) = args.length_mm {
            p.length_um = Some(mm * 1e3);
        }
        if let Some(um) = args.length_um {
            p.length_um = Some(um);
        }
        if let Some(r) = args.rp_um {
            p.pump_waist_um = Some(r);
        }
        if let Some(d) = args.pump_diameter_um {
            p.pump_waist_um = Some(pump_waist_from_diameter(d)?);
        }
        if let Some(w) = args.w_um {
            p.fiber_mode_radius_um = Some(w);
        }
        if let Some(mfd) = args.mfd_um {
            p.fiber_mode_radius_um = Some(mode_field_radius(mfd)?);
        }
        if let Some(mu) = args.mu {
            p.mu = Some(mu);
        }
        if let (Some(f), Some(d)) = (args.f_mm, args.dbl_mm) {
            p.mu = Some(magnification(f, d)?.inverse_magnification);
        }
        if let Some((w, derivation)) = resolve_walkoffs(&args.walkoffs, file.as_ref())? {
            p.walkoffs = Some(w);
            p.derivation = derivation;
        }
        p.file = file;
        Ok(p)
    }

    pub fn require(&self) -> Result<ExperimentConfig, CliError> {
        fn need(v: Option<f64>, flag: &str) -> Result<f64, CliError> {
            v.ok_or_else(|| usage(format!("missing {flag}")))
        }
        let cfg = ExperimentConfig {
            crystal_length_um: need(self.length_um, "--L-mm (or --L-um)")?,
            pump_waist_um: need(self.pump_waist_um, "--rp-um (or --pump-diameter-um)")?,
            fiber_mode_radius_um: need(self.fiber_mode_radius_um, "--w-um (or --mfd-um)")?,
            inverse_magnification: need(self.mu, "--mu (or --f-mm with --dbl-mm)")?,
            walkoffs: self.walkoffs.ok_or_else(|| {
                usage(format!(
                    "missing walk-offs: give --Mp/--M/--QK, --sellmeier, or set {SELLMEIER_ENV}"
                ))
            })?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
