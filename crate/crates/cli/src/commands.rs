use crate::args::{
    CsvOrJson, EvalArgs, OptVar, OptimizeArgs, OracleArgs, ParamsArgs, SweepArgs, TextOrJson,
};
use crate::config::{
    load_optional, resolve_walkoffs, usage, CliError, PartialExperiment, RunConfig,
};
use crate::format::g9;
use serde::Serialize;
use serde_json::json;
use spdcfc_core::dispersion::{collinear_type2_angle, group_delay_params, mean_generated_index};
use spdcfc_core::{
    compute_alpha_beta, efficiency, efficiency_curve, eta_numeric, maximize_eta, OptVariable,
    QuadratureSpec, SweepSpec,
};
use std::fmt::Write as _;

type CmdResult = Result<String, CliError>;

fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().fold(String::new(), |mut out, (k, v)| {
        let _ = writeln!(out, "{k:<width$}  {v}");
        out
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

pub fn eval(args: &EvalArgs) -> CmdResult {
    let cfg = PartialExperiment::from_args(&args.experiment)?.require()?;
    let r = efficiency(&cfg)?;
    Ok(match args.format {
        TextOrJson::Json => {
            let mut doc = RunConfig::new(cfg);
            doc.result = Some(serde_json::to_value(r).expect("serializable result"));
            to_json(&doc)
        }
        TextOrJson::Text => {
            let sp = r.shape;
            let ab = sp.alpha_beta;
            table(&[
                ("eta", g9(r.eta)),
                ("xi", g9(sp.xi)),
                ("sigma_c", g9(sp.sigma_c)),
                ("sigma1", g9(sp.sigma1)),
                ("sigma2", g9(sp.sigma2)),
                ("alpha1", g9(ab.alpha1)),
                ("alpha2", g9(ab.alpha2)),
                ("beta", g9(ab.beta)),
            ])
        }
    })
}

/// `lo:hi:step` (mm) to an inclusive, strictly increasing grid.
pub fn parse_length_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(usage(format!("--L-range {spec:?}: expected lo:hi:step")));
    };
    let num = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("--L-range {spec:?}: {s:?} is not a number")))
    };
    let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
    if !(lo > 0.0 && hi.is_finite() && step > 0.0 && step.is_finite()) {
        return Err(usage(format!(
            "--L-range {spec:?}: need lo > 0 and step > 0"
        )));
    }
    if hi < lo {
        return Err(usage(format!("--L-range {spec:?}: empty range (hi < lo)")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + step * i as f64).collect())
}

#[derive(Serialize)]
struct JsonSweepRow {
    #[serde(rename = "L_mm")]
    l_mm: f64,
    mu: f64,
    xi: f64,
    eta: f64,
}

pub const SWEEP_HEADER: &str = "L_mm,mu,xi,eta";

pub fn sweep(args: &SweepArgs) -> CmdResult {
    let l_grid_mm = parse_length_range(&args.l_range)?;
    if let Some(bad) = args.mu.iter().find(|m| !(**m > 0.0)) {
        return Err(usage(format!("--mu {bad}: must be > 0")));
    }
    let mut mu_values = args.mu.clone();
    mu_values.sort_by(f64::total_cmp);
    mu_values.dedup();

    let mut partial = PartialExperiment::from_args(&args.experiment.clone().into())?;
    partial.length_um.get_or_insert(l_grid_mm[0] * 1e3);
    partial.mu.get_or_insert(mu_values[0]);
    let fixed = partial.require()?;
    let result = efficiency_curve(&SweepSpec {
        l_grid_um: l_grid_mm.iter().map(|mm| mm * 1e3).collect(),
        mu_values,
        fixed,
    })?;

    Ok(match args.format {
        CsvOrJson::Csv => {
            let mut out = String::from(SWEEP_HEADER);
            out.push('\n');
            for r in &result.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    g9(r.length_um / 1e3),
                    g9(r.mu),
                    g9(r.xi),
                    g9(r.eta)
                );
            }
            out
        }
        CsvOrJson::Json => {
            let rows: Vec<JsonSweepRow> = result
                .rows
                .iter()
                .map(|r| JsonSweepRow {
                    l_mm: r.length_um / 1e3,
                    mu: r.mu,
                    xi: r.xi,
                    eta: r.eta,
                })
                .collect();
            to_json(&json!({ "experiment": fixed, "rows": rows }))
        }
    })
}

/// `lo:hi` with `0 < lo < hi`.
pub fn parse_bounds(spec: &str) -> Result<(f64, f64), CliError> {
    let (lo, hi) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("--bounds {spec:?}: expected lo:hi")))?;
    let num = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("--bounds {spec:?}: {s:?} is not a number")))
    };
    let (lo, hi) = (num(lo)?, num(hi)?);
    if !(lo > 0.0) {
        return Err(usage(format!("--bounds {spec:?}: lower bound must be > 0")));
    }
    if !(hi > lo && hi.is_finite()) {
        return Err(usage(format!("--bounds {spec:?}: need lo < hi")));
    }
    Ok((lo, hi))
}

pub fn optimize(args: &OptimizeArgs) -> CmdResult {
    let bounds = parse_bounds(&args.bounds)?;
    let mut partial = PartialExperiment::from_args(&args.experiment)?;
    let variable = match args.var {
        OptVar::Mu => {
            partial.mu.get_or_insert(bounds.0);
            OptVariable::Mu
        }
        OptVar::Rp => {
            partial.pump_waist_um.get_or_insert(bounds.0);
            OptVariable::PumpWaist
        }
        OptVar::Xi => {
            // only xi enters; w and mu are placeholders when absent
            partial.fiber_mode_radius_um.get_or_insert(1.0);
            partial.mu.get_or_insert(1.0);
            OptVariable::Xi
        }
    };
    let cfg = partial.require()?;
    let r = maximize_eta(&cfg, variable, bounds)?;
    if r.at_boundary {
        eprintln!("warning: optimum lies on the search boundary; interior maximum not established");
    }
    Ok(match args.format {
        TextOrJson::Json => to_json(&r),
        TextOrJson::Text => table(&[
            ("variable", r.variable.to_string()),
            ("argmax", g9(r.argmax)),
            ("eta_max", g9(r.eta_max)),
            ("xi", g9(r.xi)),
            (
                "bracket",
                format!("{}:{}", g9(r.bracket.0), g9(r.bracket.1)),
            ),
            ("iterations", r.iterations.to_string()),
            ("at_boundary", r.at_boundary.to_string()),
        ]),
    })
}

pub fn oracle(args: &OracleArgs) -> CmdResult {
    let partial = PartialExperiment::from_args(&args.experiment)?;
    let cfg = partial.require()?;
    let base = partial
        .file
        .as_ref()
        .and_then(|f| f.quadrature)
        .unwrap_or_default();
    let q = QuadratureSpec {
        n_tau: args.n_tau.unwrap_or(base.n_tau),
        n_trans: args.n_trans.unwrap_or(base.n_trans),
        extent_factor: args.extent.unwrap_or(base.extent_factor),
        target_rel_err: args.target.unwrap_or(base.target_rel_err),
    };
    q.validate().map_err(|e| usage(e.to_string()))?;

    let closed = efficiency(&cfg)?.eta;
    let o = match eta_numeric(&cfg, &q) {
        Ok(o) => o,
        Err(spdcfc_core::Error::Convergence {
            coarse,
            refined,
            est_rel_err,
            target,
        }) => {
            println!(
                "{}",
                table(&[
                    ("eta_closed", g9(closed)),
                    ("eta_numeric_coarse", g9(coarse)),
                    ("eta_numeric_refined", g9(refined)),
                    ("est_rel_err", g9(est_rel_err)),
                    ("target_rel_err", g9(target)),
                ])
                .trim_end()
            );
            return Err(CliError::Failed("quadrature did not converge".into()));
        }
        Err(e) => return Err(e.into()),
    };
    let deviation = (o.eta_numeric - closed).abs() / closed;
    let tolerance = (3.0 * o.est_rel_err).max(1e-4);
    let out = match args.format {
        TextOrJson::Json => to_json(&json!({
            "eta_closed": closed,
            "eta_numeric": o.eta_numeric,
            "rel_deviation": deviation,
            "est_rel_err": o.est_rel_err,
            "tolerance": tolerance,
            "nodes": { "n_tau": o.nodes.0, "n_trans": o.nodes.1 },
        })),
        TextOrJson::Text => table(&[
            ("eta_closed", g9(closed)),
            ("eta_numeric", g9(o.eta_numeric)),
            ("rel_deviation", g9(deviation)),
            ("est_rel_err", g9(o.est_rel_err)),
            ("tolerance", g9(tolerance)),
            (
                "nodes",
                format!("n_tau={} n_trans={}", o.nodes.0, o.nodes.1),
            ),
        ]),
    };
    if deviation > tolerance {
        print!("{out}");
        return Err(CliError::Failed(format!(
            "relative deviation {} exceeds {}",
            g9(deviation),
            g9(tolerance)
        )));
    }
    Ok(out)
}

pub fn params(args: &ParamsArgs) -> CmdResult {
    let file = load_optional(args.config.as_deref())?;
    let (w, derivation) = resolve_walkoffs(&args.walkoffs, file.as_ref())?.ok_or_else(|| {
        usage("missing walk-offs: give --Mp/--M/--QK, --sellmeier, or a config file")
    })?;
    let ab = compute_alpha_beta(&w)?;
    let mut rows = vec![
        ("Mp", g9(w.m_p)),
        ("M", g9(w.m)),
        ("QK", g9(w.q_over_k)),
        ("alpha1", g9(ab.alpha1)),
        ("alpha2", g9(ab.alpha2)),
        ("beta", g9(ab.beta)),
    ];
    let mut extra = serde_json::Map::new();
    if let Some(d) = &derivation {
        let t = group_delay_params(&d.model, &d.geometry)?;
        let n_bar = mean_generated_index(&d.model, &d.geometry)?;
        let collinear = collinear_type2_angle(&d.model, d.geometry.pump_wavelength_um)
            .ok()
            .map(f64::to_degrees);
        rows.extend([
            ("material", d.model.material.clone()),
            ("cut_deg", g9(d.geometry.cut_angle_rad.to_degrees())),
            (
                "cone_deg",
                g9(d.geometry.external_cone_angle_rad.to_degrees()),
            ),
            ("pump_um", g9(d.geometry.pump_wavelength_um)),
            ("n_bar", g9(n_bar)),
            ("D_fs_per_um", g9(t.d_fs_per_um)),
            ("Lambda_fs_per_um", g9(t.lambda_fs_per_um)),
            (
                "collinear_cut_deg",
                collinear.map_or_else(|| "n/a".into(), g9),
            ),
        ]);
        extra.insert("material".into(), json!(d.model.material));
        extra.insert("geometry".into(), json!(d.geometry));
        extra.insert("n_bar".into(), json!(n_bar));
        extra.insert("temporal".into(), json!(t));
        extra.insert("collinear_cut_deg".into(), json!(collinear));
    }
    Ok(match args.format {
        TextOrJson::Text => table(&rows),
        TextOrJson::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("walkoffs".into(), json!(w));
            doc.insert("alpha_beta".into(), json!(ab));
            if !extra.is_empty() {
                doc.insert("dispersion".into(), serde_json::Value::Object(extra));
            }
            to_json(&doc)
        }
    })
}
