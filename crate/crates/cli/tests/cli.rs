use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use qtraj_cli::config::{InitialState, MethodName, ModelSpec, OutputSpec, PoincareSpec, StepName, TransformSpec};
use qtraj_cli::{parse_config, render, RunConfig};

fn qtraj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtraj")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.json");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn run_ok(sub: &str, config: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", config, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = qtraj(&args);
    assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

const DECAY: &str = r#"{"model": {"builder": "qubit_decay", "gamma": 1.0}, "method": "master",
    "dt": 0.001, "t_final": 2.0, "record_every": 500}"#;

#[test]
fn evolve_master_writes_decay_curve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), DECAY);
    run_ok("evolve-master", &cfg, dir.path(), &[]);
    let (header, rows) = csv(&dir.path().join("master.csv"));
    assert_eq!(header[..3], ["t", "re_rho_0_0", "im_rho_0_0"]);
    assert_eq!(header.len(), 9);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert!((r[1] - (-r[0]).exp()).abs() < 1e-8, "t = {}: {}", r[0], r[1]);
    }
}

#[test]
fn trajectory_writes_states_observables_and_jumps() {
    let dir = tempfile::tempdir().unwrap();
    let text = DECAY.replace("\"master\"", "\"jump\"").replace(
        "\"record_every\": 500",
        "\"record_every\": 100, \"n_traj\": 3, \"outputs\": [\"states\", {\"observable\": {\"name\": \"sigma_z\"}}]",
    );
    let cfg = write_config(dir.path(), &text);
    run_ok("trajectory", &cfg, dir.path(), &[]);
    for i in 0..3 {
        let (header, rows) = csv(&dir.path().join(format!("trajectory_{i}.csv")));
        assert_eq!(header, ["t", "re_psi_0", "im_psi_0", "re_psi_1", "im_psi_1", "re_sigma_z", "im_sigma_z"]);
        assert_eq!(rows.len(), 21);
        assert_eq!(rows[0], [0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let jumps = fs::read_to_string(dir.path().join(format!("jumps_{i}.csv"))).unwrap();
        assert!(jumps.starts_with("t,channel\n"));
        assert!(jumps.lines().count() <= 2);
    }
}

#[test]
fn ensemble_is_identical_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let text = DECAY
        .replace("\"master\"", "\"homodyne\"")
        .replace("\"gamma\": 1.0", "\"gamma\": 1.0, \"rabi\": 2.0")
        .replace("\"record_every\": 500", "\"record_every\": 100, \"n_traj\": 150");
    let cfg = write_config(dir.path(), &text);
    let (a, b) = (dir.path().join("w1"), dir.path().join("w8"));
    run_ok("ensemble", &cfg, &a, &["--workers", "1"]);
    run_ok("ensemble", &cfg, &b, &["--workers", "8"]);
    let fa = fs::read(a.join("ensemble_mean.csv")).unwrap();
    assert_eq!(fa, fs::read(b.join("ensemble_mean.csv")).unwrap());

    let c = dir.path().join("seeded");
    run_ok("ensemble", &cfg, &c, &["--seed", "99"]);
    assert_ne!(fa, fs::read(c.join("ensemble_mean.csv")).unwrap());
}

#[test]
fn invariance_check_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let base = DECAY
        .replace("\"master\"", "\"qsd\"")
        .replace("\"t_final\": 2.0", "\"t_final\": 1.0")
        .replace("\"record_every\": 500", "\"record_every\": 1");

    let ident =
        write_config(dir.path(), &base.replace("\"method\"", "\"transform\": {\"mixing\": [[[1,0]]]}, \"method\""));
    let o = run_ok("invariance-check", &ident, dir.path(), &[]);
    let (_, rows) = csv(&dir.path().join("invariance.csv"));
    assert_eq!(rows.len(), 1001);
    assert!(rows.iter().all(|r| r[1] <= 1e-15));
    assert!(String::from_utf8_lossy(&o.stdout).contains("max trace distance"));

    let phase = write_config(
        dir.path(),
        &base.replace(
            "\"method\"",
            "\"transform\": {\"mixing\": [[[0.5403023058681398,0.8414709848078965]]]}, \"method\"",
        ),
    );
    run_ok("invariance-check", &phase, dir.path(), &[]);

    // a bound of 1e-6·dt cannot hold for a shifted representation
    let tight = write_config(
        dir.path(),
        &base.replace(
            "\"method\"",
            "\"transform\": {\"shifts\": [[0.5,0]]}, \"shift_bound_constant\": 1e-6, \"method\"",
        ),
    );
    let o = qtraj(&["invariance-check", "--config", &tight, "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: invariance bound violated"));
}

#[test]
fn poincare_writes_stroboscopic_samples() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"model": {"builder": "driven_duffing", "fock_dim": 12, "kappa": 0.5, "anharmonicity": 0.1,
        "drive_amplitude": 0.5, "drive_detuning": 1.0}, "method": "qsd", "hamiltonian_step": "exact",
        "dt": 0.031415926535897934, "t_final": 31.41592653589793, "record_every": 10}"#;
    let cfg = write_config(dir.path(), text);
    run_ok("poincare", &cfg, dir.path(), &[]);
    let (header, rows) = csv(&dir.path().join("poincare.csv"));
    assert_eq!(header, ["t", "x", "p"]);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0], [0.0, 0.0, 0.0]);
    assert!((rows[5][0] - 10.0 * std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn errors_are_single_line_and_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        DECAY.replace("\"dt\": 0.001", "\"dt\": 3.0"),
        DECAY.replace("\"method\"", "\"methd\": 1, \"method\""),
        DECAY.replace('}', ""),
        DECAY.replace("\"method\"", "\"transform\": {\"shifts\": [[1,0],[1,0]]}, \"method\""),
    ];
    for text in &cases {
        let cfg = write_config(dir.path(), text);
        let o = qtraj(&["ensemble", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
        assert!(!o.status.success());
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.starts_with("error: ") && err.trim_end().lines().count() == 1, "{err}");
    }
    let o = qtraj(&["ensemble", "--config", "/nonexistent/run.json"]);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: cannot read"));
    // master method cannot drive trajectories
    let cfg = write_config(dir.path(), DECAY);
    let o = qtraj(&["trajectory", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("method"));
}

fn complex() -> impl Strategy<Value = [f64; 2]> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| [a, b])
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    let model = (0.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(gamma, rabi, detuning)| ModelSpec::QubitDecay {
        gamma,
        rabi,
        detuning,
    });
    let method = prop_oneof![
        Just(MethodName::Master),
        Just(MethodName::Qsd),
        Just(MethodName::Heterodyne),
        Just(MethodName::Homodyne),
        Just(MethodName::Jump),
    ];
    let state = prop_oneof![
        Just(None),
        (0usize..2).prop_map(|k| Some(InitialState::Basis(k))),
        (complex(), complex()).prop_map(|(a, b)| Some(InitialState::Amplitudes(vec![[a[0] + 3.0, a[1]], b]))),
    ];
    let transform = prop_oneof![
        Just(None),
        (-3.0f64..3.0, complex()).prop_map(|(theta, c)| Some(TransformSpec {
            mixing: Some(vec![vec![[theta.cos(), theta.sin()]]]),
            shifts: Some(vec![c]),
        })),
    ];
    (model, method, 1usize..50, 1usize..5, 1usize..20, any::<u64>(), state, transform, any::<bool>(), 0.5f64..20.0)
        .prop_map(|(model, method, steps, record_every, n_traj, seed, initial_state, transform, states, c)| RunConfig {
            model,
            method,
            dt: 0.01,
            t_final: 0.01 * steps as f64,
            record_every,
            n_traj,
            master_seed: seed,
            initial_state,
            hamiltonian_step: if states { StepName::Exact } else { StepName::Euler },
            transform,
            outputs: if states { vec![OutputSpec::States] } else { vec![] },
            shift_bound_constant: c,
            out_path: format!("runs/{seed}"),
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_is_identity(cfg in run_config()) {
        prop_assume!(qtraj_cli::prepare(&cfg).is_ok());
        prop_assert_eq!(parse_config(&render(&cfg)).unwrap(), cfg);
    }
}

#[test]
fn poincare_output_round_trips() {
    let mut cfg = parse_config(DECAY).unwrap();
    cfg.record_every = 25;
    cfg.outputs = vec![OutputSpec::Poincare(PoincareSpec { period: 0.5, phase_offset: 0.0 })];
    assert_eq!(parse_config(&render(&cfg)).unwrap(), cfg);
}
