//! Error function and the `erf(s)/s` ratios used by the closed-form efficiency.
//!
//! `erf` combines the everywhere-positive series
//! `erf(x) = 2/sqrt(pi) * exp(-x^2) * sum 2^n x^(2n+1) / (2n+1)!!`
//! below [`SERIES_LIMIT`] with a Lentz continued fraction for `erfc` above it.
//! Neither branch suffers from cancellation, so the absolute error stays
//! at a few ulps on the whole real line.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// `2 / sqrt(pi)`
pub const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Below this argument `erf(s)/s` is evaluated from its Taylor series.
pub const RATIO_SERIES_SWITCH: f64 = 1e-4;

const SERIES_LIMIT: f64 = 3.0;

pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf(-x);
    }
    if x < SERIES_LIMIT {
        erf_series(x)
    } else {
        1.0 - erfc_continued_fraction(x)
    }
}

pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < SERIES_LIMIT {
        1.0 - erf(x)
    } else {
        erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= 2.0 * x2 / f64::from(2 * n + 1);
        sum += term;
        if term <= sum * 1e-17 || n > 200 {
            break;
        }
    }
    TWO_OVER_SQRT_PI * (-x2).exp() * sum
}

/// `erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`, modified Lentz.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = f64::from(k) / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// `erf(s)/s` for `s >= 0`, finite at `s = 0` (limit `2/sqrt(pi)`).
pub fn erf_over_sigma(sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(Error::domain("sigma", sigma, "must be >= 0"));
    }
    if sigma.is_infinite() {
        return Ok(0.0);
    }
    if sigma < RATIO_SERIES_SWITCH {
        let s2 = sigma * sigma;
        Ok(TWO_OVER_SQRT_PI * (1.0 - s2 / 3.0 + s2 * s2 / 10.0))
    } else {
        Ok(erf(sigma) / sigma)
    }
}

/// `s/erf(s)`, the reciprocal of [`erf_over_sigma`].
pub fn sigma_over_erf(sigma: f64) -> Result<f64> {
    if sigma.is_infinite() && sigma > 0.0 {
        return Ok(f64::INFINITY);
    }
    erf_over_sigma(sigma).map(|r| 1.0 / r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn erf_reference_values() {
        assert_eq!(erf(0.0), 0.0);
        assert_abs_diff_eq!(erf(1.0), 0.842_700_792_949_714_9, epsilon = 1e-15);
        assert_abs_diff_eq!(erf(3.0), 0.999_977_909_503_001_4, epsilon = 1e-15);
        assert_abs_diff_eq!(erf(-0.5), -0.520_499_877_813_046_5, epsilon = 1e-15);
        assert_abs_diff_eq!(erfc(5.0), 1.537_459_794_428_034_8e-12, epsilon = 1e-25);
        assert_eq!(erf(40.0), 1.0);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(erf_over_sigma(0.0).unwrap(), TWO_OVER_SQRT_PI);
        assert_abs_diff_eq!(
            erf_over_sigma(1.0).unwrap(),
            0.842_700_792_9,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            erf_over_sigma(3.0).unwrap(),
            0.333_325_969_8,
            epsilon = 1e-10
        );
        assert_eq!(erf_over_sigma(f64::INFINITY).unwrap(), 0.0);
        assert_abs_diff_eq!(
            sigma_over_erf(1.0).unwrap() * erf_over_sigma(1.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn ratio_rejects_negative_and_nan() {
        assert!(erf_over_sigma(-1e-9).is_err());
        assert!(erf_over_sigma(f64::NAN).is_err());
    }

    #[test]
    fn ratio_continuous_at_switchover() {
        let eps = 1e-12;
        let below = erf_over_sigma(RATIO_SERIES_SWITCH - eps).unwrap();
        let above = erf_over_sigma(RATIO_SERIES_SWITCH + eps).unwrap();
        assert!((below - above).abs() <= 1e-12);
    }
}
