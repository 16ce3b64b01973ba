//! End-to-end runs of the `casimir` binary.

use std::path::Path;
use std::process::Command;

fn casimir(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(args)
        .output()
        .expect("binary runs")
}

const ATOM: &str = r#"
state_label = "excited"
[[transitions]]
omega_nk_rad_s = 2.0e15
dipole_sq_C2m2 = 7.19e-59
"#;

fn scenario(reflector: &str, extra: &str) -> String {
    format!(
        r#"
schema_version = 1
units = "reduced"

[atom]
file = "atom.toml"

[reflector]
{reflector}

[sweep]
z_min = 0.3
z_max = 30.0
points = 12
spacing = "log"
unit = "z-tilde"

[slab]
d = 2.0
eta = 1.0e20
{extra}
"#
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn plate_force_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "atom.toml", ATOM);
    let sc = write(
        dir.path(),
        "scenario.toml",
        &scenario("model = \"perfect-electric-mirror\"", ""),
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = casimir(&[
            "plate-force",
            "--scenario",
            &sc,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.contains("# scenario_sha256 = "));
    assert!(text.contains("# units = reduced"));
    assert!(text.contains("# sign_convention = F = -grad U"));
    // Boundary-difference resonant force equals the closed form.
    for row in data_rows(&text) {
        let (quad, closed) = (row[2], row[7]);
        assert!((quad - closed).abs() <= 1e-8 * closed.abs());
    }
}

#[test]
fn units_flag_overrides_scenario() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "atom.toml", ATOM);
    let sc = write(
        dir.path(),
        "scenario.toml",
        &scenario("model = \"perfect-electric-mirror\"", ""),
    );
    let o = casimir(&[
        "cp-potential",
        "--scenario",
        &sc,
        "--units",
        "si",
        "--tol",
        "1e-8",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("# units = si"));
    assert!(text.contains("# rel_tol = 1e-8"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 12);
    // z column in metres, z_tilde column dimensionless.
    assert!(rows[0][0] < 1e-6 && (rows[0][1] - 0.3).abs() < 1e-12);
}

#[test]
fn greens_near_mirror_limit_matches_mirror_in_near_field() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "atom.toml", ATOM);
    let sweep = |refl: &str| {
        scenario(refl, "[greens]\naxis = \"imaginary\"\n")
            .replace("z_min = 0.3", "z_min = 0.01")
            .replace("z_max = 30.0", "z_max = 0.1")
    };
    let a = write(
        dir.path(),
        "pec.toml",
        &sweep("model = \"perfect-electric-mirror\""),
    );
    let b = write(
        dir.path(),
        "eps.toml",
        &sweep("model = \"drude-lorentz\"\neps_background = 1.0e8"),
    );
    let run = |p: &str| {
        let o = casimir(&["greens", "--scenario", p]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        data_rows(&String::from_utf8(o.stdout).unwrap())
    };
    for (m, h) in run(&a).iter().zip(run(&b)) {
        // Electric trace; the magnetic one converges more slowly in ε.
        assert!((h[2] / m[2] - 1.0).abs() < 1e-4);
    }
}

#[test]
fn bad_input_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "atom.toml", ATOM);
    let sc = write(
        dir.path(),
        "scenario.toml",
        &scenario("model = \"perfect-electric-mirror\"", "")
            .replace("schema_version = 1", "schema_version = 9"),
    );
    assert_eq!(
        casimir(&["cp-potential", "--scenario", &sc]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("nope.toml");
    assert_eq!(
        casimir(&["cp-potential", "--scenario", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    // Lossless medium cannot be evaluated on the real axis.
    let lossless = write(
        dir.path(),
        "lossless.toml",
        &scenario("model = \"drude-lorentz\"\neps_background = 4.0", ""),
    );
    assert_eq!(
        casimir(&["greens", "--scenario", &lossless]).status.code(),
        Some(2)
    );
}

#[test]
fn exhausted_budget_exits_with_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "atom.toml", ATOM);
    let refl = "model = \"drude-lorentz\"\neps_background = 2.0\n[[reflector.eps_oscillators]]\nstrength_rad_s = 3e15\nresonance_rad_s = 1.5e15\ndamping_rad_s = 1e14";
    let sc = write(
        dir.path(),
        "scenario.toml",
        &scenario(refl, "[tolerances]\nrel_tol = 1e-14\nmax_evals = 100\n"),
    );
    let o = casimir(&["cp-potential", "--scenario", &sc]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn fig3_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig3.csv");
    let o = casimir(&["fig3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let summary = std::fs::read_to_string(dir.path().join("fig3.summary.txt")).unwrap();
    assert!(summary.contains("attractive for z_tilde < 0.5"));
    assert!(summary.contains("(c) amplitude decreases with thickness: PASS"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("# plate_force_constant = "));
    assert_eq!(data_rows(&csv).len(), 3000);
}
