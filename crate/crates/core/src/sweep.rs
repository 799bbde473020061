//! Efficiency curves over crystal length and magnification, and
//! one-variable maximization of the closed form.

use crate::error::{positive, Error, Result};
use crate::model::{
    compute_alpha_beta, efficiency, eta_closed_form, ExperimentConfig, ShapeParams, WalkOffSet,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub l_grid_um: Vec<f64>,
    pub mu_values: Vec<f64>,
    /// Template; crystal length and magnification are overridden per row.
    pub fixed: ExperimentConfig,
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Grid(format!("{name} is empty")));
    }
    if let Some(bad) = grid.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Grid(format!(
            "{name} contains non-positive value {bad}"
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Grid(format!("{name} is not strictly increasing")));
    }
    Ok(())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        check_grid("crystal length grid", &self.l_grid_um)?;
        check_grid("mu grid", &self.mu_values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub length_um: f64,
    pub mu: f64,
    pub xi: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Closed-form efficiency on the `L x mu` grid, L-major.
pub fn efficiency_curve(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.l_grid_um.len() * spec.mu_values.len());
    for &length_um in &spec.l_grid_um {
        for &mu in &spec.mu_values {
            let cfg = spec.fixed.with_length(length_um).with_mu(mu);
            let r = efficiency(&cfg).map_err(|e| Error::Row {
                index: rows.len(),
                length_um,
                mu,
                source: Box::new(e),
            })?;
            rows.push(SweepRow {
                length_um,
                mu,
                xi: r.shape.xi,
                eta: r.eta,
            });
        }
    }
    Ok(SweepResult { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptVariable {
    /// Inverse magnification at fixed fiber mode and pump waist.
    Mu,
    /// Pump waist at fixed crystal length, fiber mode and magnification.
    PumpWaist,
    /// `w mu / r_p` directly.
    Xi,
}

impl fmt::Display for OptVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptVariable::Mu => "mu",
            OptVariable::PumpWaist => "rp",
            OptVariable::Xi => "xi",
        })
    }
}

impl FromStr for OptVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu" => Ok(OptVariable::Mu),
            "rp" | "r_p" => Ok(OptVariable::PumpWaist),
            "xi" => Ok(OptVariable::Xi),
            other => Err(Error::Grid(format!("unknown variable {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub variable: OptVariable,
    pub argmax: f64,
    pub eta_max: f64,
    /// `xi` at the optimum.
    pub xi: f64,
    /// Interval handed to the golden-section stage.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Set when the optimum sits on a bound of the search interval.
    pub at_boundary: bool,
}

const PRESCAN_POINTS: usize = 64;
const REL_TOL: f64 = 1e-6;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn objective(
    cfg: &ExperimentConfig,
    variable: OptVariable,
) -> Result<impl Fn(f64) -> Result<(f64, f64)>> {
    let cfg = *cfg;
    let ab = compute_alpha_beta(&cfg.walkoffs)?;
    Ok(move |x: f64| -> Result<(f64, f64)> {
        let sp = match variable {
            OptVariable::Xi => {
                ShapeParams::from_reduced(cfg.crystal_length_um / cfg.pump_waist_um, x, ab)?
            }
            OptVariable::Mu => crate::model::shape_params(&cfg.with_mu(x))?,
            OptVariable::PumpWaist => crate::model::shape_params(&ExperimentConfig {
                pump_waist_um: x,
                ..cfg
            })?,
        };
        Ok((eta_closed_form(&sp)?.eta, sp.xi))
    })
}

/// Maximizes the closed-form efficiency over one design variable.
///
/// A 64-point geometric pre-scan picks the best cell; golden-section search
/// then refines inside the two neighbouring cells until the bracket is
/// narrower than `1e-6` relative. The pre-scan guards against the objective
/// not being unimodal over the full interval.
pub fn maximize_eta(
    cfg: &ExperimentConfig,
    variable: OptVariable,
    bounds: (f64, f64),
) -> Result<OptResult> {
    let (lo, hi) = bounds;
    positive("lower bound", lo)?;
    positive("upper bound", hi)?;
    if lo >= hi {
        return Err(Error::Grid(format!("empty interval [{lo}, {hi}]")));
    }
    match variable {
        OptVariable::Xi => {
            positive("crystal_length_um", cfg.crystal_length_um)?;
            positive("pump_waist_um", cfg.pump_waist_um)?;
            cfg.walkoffs.validate()?;
        }
        _ => cfg.validate()?,
    }
    let f = objective(cfg, variable)?;

    let ratio = (hi / lo).powf(1.0 / (PRESCAN_POINTS - 1) as f64);
    let grid: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|i| match i {
            0 => lo,
            i if i == PRESCAN_POINTS - 1 => hi,
            i => lo * ratio.powi(i as i32),
        })
        .collect();
    let mut best = 0;
    let mut best_eta = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let (eta, _) = f(x)?;
        if eta > best_eta {
            best = i;
            best_eta = eta;
        }
    }

    let a0 = grid[best.saturating_sub(1)];
    let b0 = grid[(best + 1).min(PRESCAN_POINTS - 1)];
    let (mut a, mut b) = (a0, b0);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?.0;
    let mut fd = f(d)?.0;
    let mut iterations = 0;
    while (b - a) > REL_TOL * 0.5 * (a + b) {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?.0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?.0;
        }
    }

    let mut argmax = if fc >= fd { c } else { d };
    let mut eta_max = fc.max(fd);
    for x in [a0, b0, grid[best]] {
        let (eta, _) = f(x)?;
        if eta > eta_max {
            eta_max = eta;
            argmax = x;
        }
    }
    let near = |edge: f64| (argmax - edge).abs() <= 2.0 * REL_TOL * edge;
    let at_boundary = near(lo) || near(hi);
    let (_, xi) = f(argmax)?;
    Ok(OptResult {
        variable,
        argmax,
        eta_max,
        xi,
        bracket: (a0, b0),
        iterations,
        at_boundary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CeilingRow {
    pub length_um: f64,
    pub xi_opt: f64,
    pub eta_max: f64,
    pub at_boundary: bool,
}

/// Best achievable efficiency per crystal length, maximizing over `xi` in [0.1, 10].
pub fn ceiling_scan(
    pump_waist_um: f64,
    walkoffs: &WalkOffSet,
    l_grid_um: &[f64],
) -> Result<Vec<CeilingRow>> {
    check_grid("crystal length grid", l_grid_um)?;
    l_grid_um
        .iter()
        .map(|&length_um| {
            let cfg = ExperimentConfig {
                crystal_length_um: length_um,
                pump_waist_um,
                // unused when optimizing over xi
                fiber_mode_radius_um: 1.0,
                inverse_magnification: 1.0,
                walkoffs: *walkoffs,
            };
            let r = maximize_eta(&cfg, OptVariable::Xi, (0.1, 10.0))?;
            Ok(CeilingRow {
                length_um,
                xi_opt: r.argmax,
                eta_max: r.eta_max,
                at_boundary: r.at_boundary,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference(length_um: f64) -> ExperimentConfig {
        ExperimentConfig {
            crystal_length_um: length_um,
            pump_waist_um: 53.0,
            fiber_mode_radius_um: 1.48,
            inverse_magnification: 49.0,
            walkoffs: WalkOffSet::BBO_830NM,
        }
    }

    #[test]
    fn curve_single_point_and_ordering() {
        let one = efficiency_curve(&SweepSpec {
            l_grid_um: vec![3000.0],
            mu_values: vec![49.0],
            fixed: reference(1.0),
        })
        .unwrap();
        assert_eq!(one.rows.len(), 1);
        assert_abs_diff_eq!(one.rows[0].eta, 0.435_08, epsilon = 1e-5);

        let two = efficiency_curve(&SweepSpec {
            l_grid_um: vec![1000.0, 3000.0],
            mu_values: vec![25.0, 49.0],
            fixed: reference(1.0),
        })
        .unwrap();
        let keys: Vec<(f64, f64)> = two.rows.iter().map(|r| (r.length_um, r.mu)).collect();
        assert_eq!(
            keys,
            vec![
                (1000.0, 25.0),
                (1000.0, 49.0),
                (3000.0, 25.0),
                (3000.0, 49.0)
            ]
        );
        assert!(two.rows[1].eta > two.rows[3].eta);
    }

    #[test]
    fn curve_rejects_bad_grids() {
        let spec = |l: Vec<f64>, mu: Vec<f64>| SweepSpec {
            l_grid_um: l,
            mu_values: mu,
            fixed: reference(1.0),
        };
        assert!(matches!(
            efficiency_curve(&spec(vec![], vec![49.0])),
            Err(Error::Grid(_))
        ));
        assert!(efficiency_curve(&spec(vec![2.0, 1.0], vec![49.0])).is_err());
        assert!(efficiency_curve(&spec(vec![1.0], vec![0.0])).is_err());
    }

    #[test]
    fn curve_annotates_failing_row() {
        let spec = SweepSpec {
            l_grid_um: vec![1000.0, 2000.0],
            mu_values: vec![49.0],
            fixed: ExperimentConfig {
                pump_waist_um: -1.0,
                ..reference(1.0)
            },
        };
        match efficiency_curve(&spec) {
            Err(Error::Row {
                index, length_um, ..
            }) => {
                assert_eq!(index, 0);
                assert_eq!(length_um, 1000.0);
            }
            other => panic!("expected row error, got {other:?}"),
        }
    }

    #[test]
    fn ceiling_at_two_millimetres() {
        let r = maximize_eta(&reference(2000.0), OptVariable::Xi, (0.1, 10.0)).unwrap();
        // scipy bounded Brent on the same closed form: 0.488965 at xi = 1.17583
        assert_abs_diff_eq!(r.eta_max, 0.488_965_45, epsilon = 1e-8);
        assert_abs_diff_eq!(r.argmax, 1.175_83, epsilon = 1e-4);
        assert!(!r.at_boundary);
        assert!(r.bracket.0 < r.argmax && r.argmax < r.bracket.1);
    }

    #[test]
    fn thin_crystal_optimum_on_lower_bound() {
        let r = maximize_eta(&reference(1e-3), OptVariable::Xi, (0.1, 10.0)).unwrap();
        assert!(r.at_boundary);
        assert_abs_diff_eq!(r.argmax, 0.1, epsilon = 1e-6);
        assert!(r.eta_max > 0.9999);
    }

    #[test]
    fn mu_and_xi_runs_agree() {
        let cfg = reference(2000.0);
        let by_xi = maximize_eta(&cfg, OptVariable::Xi, (0.1, 10.0)).unwrap();
        let k = cfg.fiber_mode_radius_um / cfg.pump_waist_um;
        let by_mu = maximize_eta(&cfg, OptVariable::Mu, (0.1 / k, 10.0 / k)).unwrap();
        assert!((by_xi.eta_max - by_mu.eta_max).abs() <= 1e-9);
        assert_abs_diff_eq!(by_mu.argmax * k, by_xi.argmax, epsilon = 1e-5);
    }

    #[test]
    fn pump_waist_optimization() {
        let r = maximize_eta(&reference(2000.0), OptVariable::PumpWaist, (10.0, 500.0)).unwrap();
        assert!(r.eta_max > 0.0 && r.eta_max <= 1.0);
        let f = |rp: f64| {
            efficiency(&ExperimentConfig {
                pump_waist_um: rp,
                ..reference(2000.0)
            })
            .unwrap()
            .eta
        };
        assert!(r.eta_max >= f(r.bracket.0) && r.eta_max >= f(r.bracket.1));
    }

    #[test]
    fn bad_bounds_rejected() {
        assert!(maximize_eta(&reference(2000.0), OptVariable::Mu, (0.0, 10.0)).is_err());
        assert!(maximize_eta(&reference(2000.0), OptVariable::Mu, (5.0, 5.0)).is_err());
        assert!("foo".parse::<OptVariable>().is_err());
        assert_eq!("rp".parse::<OptVariable>().unwrap(), OptVariable::PumpWaist);
    }

    #[test]
    fn ceiling_non_increasing() {
        let rows = ceiling_scan(
            53.0,
            &WalkOffSet::BBO_830NM,
            &[2000.0, 2500.0, 3000.0, 4000.0, 5000.0],
        )
        .unwrap();
        assert!(rows.windows(2).all(|w| w[1].eta_max <= w[0].eta_max));
        assert!(rows[2].eta_max < rows[0].eta_max);
        let thin = ceiling_scan(53.0, &WalkOffSet::BBO_830NM, &[1e-3]).unwrap();
        assert!(thin[0].at_boundary && thin[0].eta_max > 0.9999);
    }
}
