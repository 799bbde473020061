//! Test-only references, independent of the library code paths.
#![allow(dead_code)]

use spdcfc_core::{ExperimentConfig, WalkOffSet};

/// Double-double number `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: e }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

impl Dd {
    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let p = Dd::from(q1).mul(Dd::from(d));
        let r = self.add(p.neg());
        let q2 = r.hi / d;
        quick_two_sum(q1, q2)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `erf(x)` from its Maclaurin series, summed in double-double arithmetic.
///
/// Returns the value and the number of series terms used.
pub fn erf_maclaurin_reference(x: f64) -> (f64, usize) {
    const TWO_OVER_SQRT_PI: Dd = Dd {
        hi: std::f64::consts::FRAC_2_SQRT_PI,
        lo: 1.533_545_961_316_588e-17,
    };
    let x2 = Dd::from(x).mul(Dd::from(x));
    // power = x^(2n+1) / n!
    let mut power = Dd::from(x);
    let mut sum = Dd::from(x);
    let mut n = 0usize;
    loop {
        n += 1;
        power = power.mul(x2).div_f64(n as f64);
        let term = power.div_f64((2 * n + 1) as f64);
        sum = if n % 2 == 1 {
            sum.add(term.neg())
        } else {
            sum.add(term)
        };
        if n >= 30 && term.hi.abs() < 1e-34 {
            break;
        }
    }
    (sum.mul(TWO_OVER_SQRT_PI).to_f64(), n + 1)
}

pub fn reference_config(length_um: f64) -> ExperimentConfig {
    ExperimentConfig {
        crystal_length_um: length_um,
        pump_waist_um: 53.0,
        fiber_mode_radius_um: 1.48,
        inverse_magnification: 49.0,
        walkoffs: WalkOffSet::BBO_830NM,
    }
}

/// Reference walk-offs with a chosen crystal length and `xi`, realised through `w`.
pub fn config_with_xi(length_um: f64, xi: f64) -> ExperimentConfig {
    ExperimentConfig {
        fiber_mode_radius_um: xi * 53.0 / 49.0,
        ..reference_config(length_um)
    }
}
