use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a domain constraint (sign, finiteness, range).
    #[error("invalid {name}: {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "no real image: object distance {object_mm} mm must exceed focal length {focal_mm} mm"
    )]
    NoRealImage { focal_mm: f64, object_mm: f64 },

    #[error("wavelength {wavelength_um} um outside index model range [{lo_um}, {hi_um}] um")]
    WavelengthOutOfRange {
        wavelength_um: f64,
        lo_um: f64,
        hi_um: f64,
    },

    #[error(
        "quadrature did not converge: eta = {coarse} vs {refined} after refinement \
         (estimated rel. error {est_rel_err:.3e} > target {target:.3e})"
    )]
    Convergence {
        coarse: f64,
        refined: f64,
        est_rel_err: f64,
        target: f64,
    },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("row {index} (L = {length_um} um, mu = {mu}): {source}")]
    Row {
        index: usize,
        length_um: f64,
        mu: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no sign change of the phase-mismatch in [{lo_deg}, {hi_deg}] deg")]
    NoPhaseMatch { lo_deg: f64, hi_deg: f64 },

    #[error("index data: {0}")]
    Data(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }
}

/// Checks `value > 0` and finite.
pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(name, value, "must be finite and > 0"))
    }
}

/// Checks `value >= 0` and finite.
pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(name, value, "must be finite and >= 0"))
    }
}
