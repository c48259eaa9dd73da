use std::path::{Path, PathBuf};
use std::process::Command;

use lagwave::config::{builtin, parse_config, parse_config_str, to_json, write_config, ConfigError, Scenario, Wave};
use lagwave::report::{profile_path, snapshot_path};
use lagwave_core::nsm_solver::{Perturbation, Shape};
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lagwave"))
}

fn write_tmp(dir: &Path, name: &str, s: &Scenario) -> PathBuf {
    let p = dir.join(name);
    write_config(s, &p).unwrap();
    p
}

const MINIMAL_CONTACT: &str = r#"{
  "version": 1,
  "name": "minimal",
  "wave": { "kind": "contact", "theta_minus": 1.0, "theta_plus": 1.1, "p_plus": 1.0 }
}"#;

#[test]
fn minimal_contact_config_gets_defaults() {
    let s = parse_config_str(MINIMAL_CONTACT).unwrap();
    assert_eq!(s.gas, lagwave_core::GasParams::default());
    assert_eq!(s.solver, lagwave_core::SolverConfig::default());
    assert_eq!(s.perturbation, Perturbation::none());
    assert_eq!(s.end_states().unwrap().0.v, 1.0);
    // Defaults are written back out explicitly.
    let echoed = to_json(&s);
    assert!(echoed.contains("\"cfl_advective\"") && echoed.contains("\"entropy_ref\""));
}

#[test]
fn dielectric_violation_names_the_bound() {
    let mut s = builtin::unit_contact();
    s.gas.epsilon = 1.0;
    let err = parse_config_str(&to_json(&s)).unwrap_err();
    assert!(matches!(err, ConfigError::DielectricBound { .. }));
    assert!(err.to_string().contains("1/64"), "{err}");
    s.override_dielectric_bound = true;
    assert!(parse_config_str(&to_json(&s)).is_ok());
}

#[test]
fn malformed_field_is_named() {
    let text = MINIMAL_CONTACT.replace("\"p_plus\": 1.0", "\"p_plus\": \"one\"");
    let err = parse_config_str(&text).unwrap_err();
    assert!(err.to_string().contains("wave"), "{err}");
    let text = MINIMAL_CONTACT.replace("\"name\": \"minimal\",", "\"name\": \"minimal\", \"gas\": {\"gamma\": []},");
    let err = parse_config_str(&text).unwrap_err();
    assert!(err.to_string().contains("gas.gamma"), "{err}");
    let text = MINIMAL_CONTACT.replace("\"version\": 1", "\"version\": 7");
    assert!(matches!(parse_config_str(&text), Err(ConfigError::Version { found: 7 })));
}

#[test]
fn builtin_scenarios_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for s in builtin::all() {
        let p = write_tmp(dir.path(), "s.json", &s);
        assert_eq!(parse_config(&p).unwrap(), s);
    }
}

fn arb_scenario() -> impl Strategy<Value = Scenario> {
    (0.5f64..2.0, 0.5f64..2.0, 0.5f64..2.0, -0.5f64..0.5, 0.0f64..0.05, 0.5f64..5.0, 16usize..5000, 0.0f64..10.0).prop_map(
        |(tm, tp, p, u, amp, width, n, t_end)| {
            let mut s = Scenario::new("prop", Wave::Contact { theta_minus: tm, theta_plus: tp, p_plus: p, u_minus: u });
            s.gas.epsilon = 1e-3;
            s.perturbation = Perturbation { shape: Shape::Bump, amplitudes: [amp, -amp, amp / 2.0, 0.0, amp], width, center: 0.1 };
            s.grid.n = n;
            s.solver.t_end = t_end;
            s.checkpoints = vec![t_end / 3.0];
            s
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn config_round_trip(s in arb_scenario()) {
        prop_assert_eq!(parse_config_str(&to_json(&s)).unwrap(), s);
    }
}

#[test]
fn bounds_prints_one_over_64() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(dir.path(), "unit.json", &builtin::unit_contact());
    let out = bin().args(["bounds", "--config"]).arg(&p).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("1/64"), "{stdout}");

    // Same data with ε = 1 is reported and fails.
    let mut s = builtin::unit_contact();
    s.gas.epsilon = 1.0;
    let p = write_tmp(dir.path(), "bad.json", &s);
    let out = bin().args(["bounds", "--config"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["simulate", "--config"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/64"));
}

#[test]
fn zero_strength_profiles_are_constant() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = Scenario::new("flat", Wave::Contact { theta_minus: 1.2, theta_plus: 1.2, p_plus: 1.0, u_minus: 0.3 });
    s.grid.n = 64;
    s.checkpoints = vec![0.5];
    let p = write_tmp(dir.path(), "flat.json", &s);
    let out_dir = dir.path().join("out");
    let st = bin().args(["profile", "--config"]).arg(&p).arg("--out").arg(&out_dir).status().unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(profile_path(&out_dir, 0.5)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,t,V,U,Theta,Vx,Ux,Thetax");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 64);
    for row in &rows {
        assert_eq!(&row[2..], &rows[0][2..]);
    }
    let expected = [1.2, 0.3, 1.2, 0.0, 0.0, 0.0];
    for (got, want) in rows[0][2..].iter().zip(expected) {
        assert!((got - want).abs() < 1e-15);
    }
}

fn small_contact() -> Scenario {
    let mut s = Scenario::new("small", Wave::Contact { theta_minus: 1.0, theta_plus: 1.1, p_plus: 1.0, u_minus: 0.2 });
    s.perturbation = Perturbation::gaussian(0.01, 1.0);
    s.grid.n = 256;
    s.solver.t_end = 2.0;
    s.solver.output_stride = 50;
    s.checkpoints = vec![1.0];
    s
}

#[test]
fn simulate_writes_artifacts_and_reproduces_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(dir.path(), "small.json", &small_contact());
    let first = dir.path().join("a");
    let st = bin().args(["simulate", "--config"]).arg(&p).arg("--out").arg(&first).status().unwrap();
    assert!(st.success());
    let snap = snapshot_path(&first, 0.0);
    let header = std::fs::read_to_string(&snap).unwrap();
    assert!(header.starts_with("x,v,u,theta,E,b\n"));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(first.join("ledger.json")).unwrap()).unwrap();
    for key in ["scenario", "params", "times", "norms", "identities", "fits", "content_hash"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["content_hash"].as_str().unwrap(), small_contact().content_hash());

    // Feed the embedded config back in, on a single worker thread.
    let embedded = dir.path().join("embedded.json");
    std::fs::write(&embedded, serde_json::to_string(&report["params"]).unwrap()).unwrap();
    let second = dir.path().join("b");
    let st = bin()
        .env("LAGWAVE_THREADS", "1")
        .args(["simulate", "--config"])
        .arg(&embedded)
        .arg("--out")
        .arg(&second)
        .status()
        .unwrap();
    assert!(st.success());
    let mut names: Vec<_> = std::fs::read_dir(first.join("snapshots")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 3);
    for name in names {
        let a = std::fs::read(first.join("snapshots").join(&name)).unwrap();
        let b = std::fs::read(second.join("snapshots").join(&name)).unwrap();
        assert!(a == b, "{name:?} differs");
    }
}

#[test]
fn verify_exit_status_follows_checks() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(dir.path(), "conv.json", &{
        let mut s = builtin::convergence();
        s.wave = Wave::Convergence { amplitude: 0.1, resolutions: vec![64, 128] };
        s
    });
    let out = bin().args(["verify", "--config"]).arg(&p).arg("--out").arg(dir.path().join("v")).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("[PASS]  6"));

    let p = write_tmp(dir.path(), "contact.json", &small_contact());
    let out = bin().args(["convergence", "--config"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(dir.path(), "unit.json", &builtin::unit_contact());
    let out = bin().env("LAGWAVE_THREADS", "zero").args(["bounds", "--config"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
