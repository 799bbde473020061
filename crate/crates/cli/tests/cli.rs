use std::path::PathBuf;
use std::process::{Command, Output};

const REFERENCE: &[&str] = &[
    "--rp-um", "53", "--w-um", "1.48", "--Mp", "0.07631", "--M", "0.07243", "--QK", "0.036215",
];

fn spdcfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spdcfc"))
        .args(args)
        .env_remove("SPDCFC_SELLMEIER_PATH")
        .output()
        .expect("spawn spdcfc")
}

fn run(args: &[&str]) -> String {
    let out = spdcfc(args);
    assert!(
        out.status.success(),
        "spdcfc {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    spdcfc(args).status.code().expect("exit code")
}

fn with<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = extra.to_vec();
    v.extend_from_slice(REFERENCE);
    v
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

#[test]
fn eval_reproduces_reference_points() {
    let eta3 = field(&run(&with(&["eval", "--L-mm", "3", "--mu", "49"])), "eta");
    let eta1 = field(&run(&with(&["eval", "--L-mm", "1", "--mu", "49"])), "eta");
    assert!((eta3 - 0.43).abs() < 0.01, "{eta3}");
    assert!((eta1 - 0.62).abs() < 0.01, "{eta1}");
    // L in um is the same crystal
    let eta_um = field(
        &run(&with(&["eval", "--L-um", "3000", "--mu", "49"])),
        "eta",
    );
    assert_eq!(eta3, eta_um);
}

#[test]
fn eval_from_pump_diameter_and_imaging() {
    // d = 2√2 r_p
    let d = format!("{}", 53.0 * 2.0 * 2f64.sqrt());
    let a = field(&run(&with(&["eval", "--L-mm", "2", "--mu", "49"])), "eta");
    let out = run(&[
        "eval",
        "--L-mm",
        "2",
        "--mu",
        "49",
        "--pump-diameter-um",
        &d,
        "--w-um",
        "1.48",
        "--Mp",
        "0.07631",
        "--M",
        "0.07243",
        "--QK",
        "0.036215",
    ]);
    assert!((field(&out, "eta") - a).abs() < 1e-8);
    // thin lens: f = 8, d_bl = 400 gives mu = 49
    let b = field(
        &run(&with(&[
            "eval", "--L-mm", "2", "--f-mm", "8", "--dbl-mm", "400",
        ])),
        "eta",
    );
    assert!((a - b).abs() < 1e-8, "{a} vs {b}");
}

#[test]
fn missing_required_parameter_is_usage_error() {
    let out = spdcfc(&["eval", "--L-mm", "3", "--w-um", "1.48", "--mu", "49"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--rp-um"));
    assert_eq!(code(&with(&["eval", "--mu", "49"])), 2);
}

#[test]
fn exit_code_contract() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(
        code(&with(&["eval", "--L-mm", "3", "--mu", "49", "--bogus"])),
        2
    );
    // domain errors: negative length, walk-off outside [0, 1)
    assert_eq!(code(&with(&["eval", "--L-mm=-1", "--mu", "49"])), 1);
    assert_eq!(
        code(&[
            "eval", "--L-mm", "1", "--mu", "49", "--rp-um", "53", "--w-um", "1.48", "--Mp", "1.5",
            "--M", "0", "--QK", "0"
        ]),
        1
    );
    // real image impossible inside the focal length
    assert_eq!(
        code(&with(&[
            "eval", "--L-mm", "1", "--f-mm", "8", "--dbl-mm", "4"
        ])),
        1
    );
}

#[test]
fn sweep_grid_sizes() {
    let csv = run(&with(&["sweep", "--L-range", "0.1:5:0.1", "--mu", "49"]));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(csv.lines().next(), Some("L_mm,mu,xi,eta"));
    assert_eq!(rows.len(), 50);
    let one = rows
        .iter()
        .map(|r| {
            r.split(',')
                .map(|c| c.parse::<f64>().unwrap())
                .collect::<Vec<_>>()
        })
        .find(|c| (c[0] - 1.0).abs() < 1e-9)
        .expect("L = 1 row");
    assert!((one[3] - 0.62).abs() < 0.01, "{one:?}");

    let single = run(&with(&["sweep", "--L-range", "1:1:1", "--mu", "49"]));
    assert_eq!(single.lines().count(), 2);
    assert_eq!(
        code(&with(&["sweep", "--L-range", "5:1:1", "--mu", "49"])),
        2
    );
    assert_eq!(
        code(&with(&["sweep", "--L-range", "1:2:0", "--mu", "49"])),
        2
    );
    assert_eq!(code(&with(&["sweep", "--L-range", "1:2:0.5"])), 2);
}

#[test]
fn sweep_matches_golden_csv() {
    let golden = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/sweep_reference.csv"),
    )
    .unwrap();
    let csv = run(&with(&["sweep", "--L-range", "0.5:3:0.5", "--mu", "49,40"]));
    assert_eq!(csv, golden);
}

#[test]
fn sweep_json_rows() {
    let out = run(&with(&[
        "sweep",
        "--L-range",
        "1:2:1",
        "--mu",
        "40,49",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["L_mm"], 1.0);
    assert_eq!(rows[0]["mu"], 40.0);
    assert_eq!(rows[1]["mu"], 49.0);
}

#[test]
fn optimize_ceiling_and_consistency() {
    let xi_run = run(&with(&[
        "optimize", "--var", "xi", "--bounds", "0.1:10", "--L-mm", "2",
    ]));
    let eta_xi = field(&xi_run, "eta_max");
    assert!((eta_xi - 0.489).abs() < 1e-3, "{eta_xi}");
    assert!(xi_run.contains("at_boundary  false"));

    let mu_run = run(&with(&[
        "optimize", "--var", "mu", "--bounds", "1:200", "--L-mm", "2",
    ]));
    let eta_mu = field(&mu_run, "eta_max");
    assert!((eta_xi - eta_mu).abs() < 1e-6, "{eta_xi} vs {eta_mu}");
    assert!((field(&xi_run, "xi") - field(&mu_run, "xi")).abs() < 1e-3);

    let rp_run = run(&with(&[
        "optimize", "--var", "rp", "--bounds", "5:500", "--L-mm", "2", "--mu", "49",
    ]));
    // r_p also sets L / r_p, so its optimum is a different, higher maximum
    let at_53 = field(&run(&with(&["eval", "--L-mm", "2", "--mu", "49"])), "eta");
    assert!(field(&rp_run, "eta_max") > at_53);
    assert!(rp_run.contains("at_boundary  false"));

    assert_eq!(
        code(&with(&[
            "optimize", "--var", "mu", "--bounds", "0:10", "--L-mm", "2"
        ])),
        2
    );
    assert_eq!(
        code(&with(&[
            "optimize", "--var", "mu", "--bounds", "10:1", "--L-mm", "2"
        ])),
        2
    );
}

#[test]
fn oracle_agrees_with_closed_form() {
    let out = run(&with(&["oracle", "--L-mm", "3", "--mu", "49"]));
    assert!(field(&out, "rel_deviation") < 1e-4);
    // near the thin-crystal limit
    let thin = spdcfc(&with(&["oracle", "--L-um", "1e-3", "--mu", "49"]));
    assert_eq!(
        thin.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&thin.stderr)
    );
    // invalid quadrature settings are usage errors
    assert_eq!(
        code(&with(&[
            "oracle", "--L-mm", "3", "--mu", "49", "--n-tau", "2"
        ])),
        2
    );
}

#[test]
fn params_explicit_and_zero() {
    let out = run(&[
        "params", "--Mp", "0.07631", "--M", "0.07243", "--QK", "0.036215",
    ]);
    let a1 = 0.07631f64.powi(2) + 0.036215f64.powi(2);
    let a2 = (0.07631f64 - 0.07243).powi(2) + 0.036215f64.powi(2);
    let b = 0.07243f64.powi(2) + 4.0 * 0.036215f64.powi(2);
    assert!((field(&out, "alpha1") - a1).abs() < 1e-9 * a1.max(1.0));
    assert!((field(&out, "alpha2") - a2).abs() < 1e-9);
    assert!((field(&out, "beta") - b).abs() < 1e-9);

    let zero = run(&["params", "--Mp", "0", "--M", "0", "--QK", "0"]);
    for k in ["alpha1", "alpha2", "beta"] {
        assert_eq!(field(&zero, k), 0.0);
    }
    assert_eq!(code(&["params"]), 2);
    assert_eq!(code(&["params", "--Mp", "0.07"]), 2);
}

#[test]
fn params_from_index_data() {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/bbo.json");
    for src in ["bbo", data.to_str().unwrap()] {
        let out = run(&["params", "--sellmeier", src]);
        for (k, want) in [("Mp", 0.07631), ("M", 0.07243), ("QK", 0.036215)] {
            let got = field(&out, k);
            assert!((got - want).abs() / want < 0.10, "{k}: {got} vs {want}");
        }
        assert!(field(&out, "D_fs_per_um") > 0.0);
    }
    // environment variable as the fallback source
    let out = Command::new(env!("CARGO_BIN_EXE_spdcfc"))
        .args(["params"])
        .env("SPDCFC_SELLMEIER_PATH", &data)
        .output()
        .unwrap();
    assert!(out.status.success());
    // missing data file
    assert_eq!(
        code(&["params", "--sellmeier", "/nonexistent/table.json"]),
        1
    );
}

#[test]
fn json_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(&with(&[
        "eval", "--L-mm", "2.7", "--mu", "47.3", "--format", "json",
    ]));
    let path = dir.path().join("run.json");
    std::fs::write(&path, &first).unwrap();
    let second = run(&[
        "eval",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let a: serde_json::Value = serde_json::from_str(&first).unwrap();
    let b: serde_json::Value = serde_json::from_str(&second).unwrap();
    let eta = |v: &serde_json::Value| v["result"]["eta"].as_f64().unwrap();
    assert_eq!(eta(&a).to_bits(), eta(&b).to_bits());
    assert_eq!(a, b);

    // flags override the file
    let over = run(&[
        "eval",
        "--config",
        path.to_str().unwrap(),
        "--L-mm",
        "1",
        "--mu",
        "49",
    ]);
    assert!((field(&over, "eta") - 0.6239).abs() < 1e-3);
}

#[test]
fn bad_config_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("garbage.json", "not json"),
        ("schema.json", r#"{"schema_version": 99}"#),
        ("unknown.json", r#"{"schema_version": 1, "surprise": true}"#),
    ];
    for (name, text) in cases {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        assert_eq!(
            code(&with(&[
                "eval",
                "--config",
                p.to_str().unwrap(),
                "--L-mm",
                "1",
                "--mu",
                "49"
            ])),
            2,
            "{name}"
        );
    }
    assert_eq!(code(&["eval", "--config", "/nonexistent.json"]), 2);
}
