//! End-to-end tests of the `hsolve` binary: exit codes, error messages,
//! output files, and reproducibility, all through the real process
//! boundary.

use std::path::Path;
use std::process::{Command, Output};

fn hsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsolve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

/// A small admissible parameter block shared by the happy-path tests.
fn base_params() -> &'static str {
    "N = 3\nlambda1 = 0.05\nlambda2 = 0.125\ns1 = 0.5\ns2 = 0.5\ns3 = 0.5\n\
     alpha = 1.5\nbeta = 1.5\nh_q = 4\n"
}

#[test]
fn failure_exit_codes_and_messages() {
    let dir = tempfile::tempdir().unwrap();

    // 2: unreadable config path.
    let out = hsolve(&["constants", &dir.path().join("absent.conf").display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.conf"));

    // 3: unknown key, named in the message.
    let path = write_config(dir.path(), "unknown.conf", "N = 3\nwavelength = 5\n");
    let out = hsolve(&["constants", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wavelength"));

    // 3: malformed line, reported with its number.
    let path = write_config(dir.path(), "syntax.conf", "N = 3\nlambda1 0.05\n");
    let out = hsolve(&["constants", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    // 4: missing required key, named in the message.
    let path = write_config(dir.path(), "missing.conf", "N = 3\nlambda1 = 0.05\n");
    let out = hsolve(&["constants", &path]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda2"));

    // 5: a value that does not parse.
    let path = write_config(
        dir.path(),
        "badvalue.conf",
        &format!("{}grid_n = many\nout_dir = {}\n", base_params(), dir.path().display()),
    );
    let out = hsolve(&["solve-ground", &path]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid_n"));

    // 6: structural hypothesis violation, message names the inequality.
    let path = write_config(
        dir.path(),
        "supercritical.conf",
        "N = 3\nlambda1 = 0.05\nlambda2 = 0.125\ns1 = 0.5\ns2 = 0.5\ns3 = 0.5\n\
         alpha = 3\nbeta = 3\nh_q = 4\n",
    );
    let out = hsolve(&["constants", &path]);
    assert_eq!(out.status.code(), Some(6));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("alpha/2*_{s1} + beta/2*_{s2} <= 1"),
        "stderr was: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    // 6: mountain-pass geometry outside the saddle window.
    let path = write_config(
        dir.path(),
        "nowindow.conf",
        &format!(
            "{}r_min = 1e-8\nr_max = 1e8\ngrid_n = 256\nout_dir = {}\n",
            base_params(),
            dir.path().join("mp").display()
        ),
    );
    let out = hsolve(&["solve-mp", &path]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn constants_and_validate_print_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "base.conf", base_params());

    let out = hsolve(&["constants", &path]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    for needle in [
        "Lambda_N",
        "crit_exponent_1",
        "crit_exponent_2",
        "best_constant_1",
        "best_constant_2",
        "level_1",
        "level_2",
        "tau",
        "holder_exponent",
        "sigma",
    ] {
        assert!(text.contains(needle), "constants output lacks {needle}");
    }

    let out = hsolve(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("power sum") && text.contains("subcritical"));
    assert!(text.contains("weight hypotheses hold"));
}

#[test]
fn solve_ground_writes_complete_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let path = write_config(
        dir.path(),
        "ground.conf",
        &format!(
            "{}nu = 50\nr_min = 1e-10\nr_max = 1e10\ngrid_n = 512\nmax_iters = 150\n\
             grad_tol = 1e-7\nseed = 5\nout_dir = {}\n",
            base_params(),
            out_dir.display()
        ),
    );
    let out = hsolve(&["solve-ground", &path]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("result.json")).unwrap())
            .unwrap();
    let energy = record["energy"].as_f64().unwrap();
    let c1 = record["c1"].as_f64().unwrap();
    let c2 = record["c2"].as_f64().unwrap();
    let floor = c1.min(c2);
    assert!((record["gap"].as_f64().unwrap() - (floor - energy)).abs() < 1e-12);
    assert!((record["energy_normalized"].as_f64().unwrap() - energy / floor).abs() < 1e-12);
    assert_eq!(record["nu"].as_f64().unwrap(), 50.0);
    assert_eq!(record["classification"], "Coupled");

    let trace = std::fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("iter,energy,grad_norm\n"));
    assert!(trace.lines().count() > 2);

    // The written profiles parse back with the right mesh.
    for name in ["profile_u.dat", "profile_v.dat"] {
        let field = hardy_sobolev::read_field(&out_dir.join(name)).unwrap();
        assert_eq!(field.n_dim, 3);
        assert_eq!(field.values.len(), 512);
        assert!(field.values.iter().all(|x| x.is_finite()));
    }
}

#[test]
fn sweep_runs_are_reproducible_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sweep");
    let path = write_config(
        dir.path(),
        "sweep.conf",
        &format!(
            "{}nu_list = 0.5, 5\nr_min = 1e-10\nr_max = 1e10\ngrid_n = 512\n\
             max_iters = 120\ngrad_tol = 1e-7\nseed = 9\nout_dir = {}\n",
            base_params(),
            out_dir.display()
        ),
    );
    assert_eq!(hsolve(&["sweep", &path]).status.code(), Some(0));
    let first = std::fs::read(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(hsolve(&["sweep", &path]).status.code(), Some(0));
    assert_eq!(std::fs::read(out_dir.join("sweep.csv")).unwrap(), first);
    assert!(first.starts_with(b"nu,energy,gap,classification,nehari_residual,grad_norm,iters\n"));
}

#[test]
fn regime_subcommand_reports_the_window() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("regime");
    let path = write_config(
        dir.path(),
        "regime.conf",
        &format!(
            "N = 3\nlambda1 = 0.05\nlambda2 = 0.125\ns1 = 0.5\ns2 = 0.5\ns3 = 0.5\n\
             alpha = 2.5\nbeta = 1.5\nh_q = 4\nout_dir = {}\n",
            out_dir.display()
        ),
    );
    let out = hsolve(&["regime", &path]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("regime.json")).unwrap())
            .unwrap();
    assert_eq!(report["saddle_window"], "FirstHigher");
    assert_eq!(report["small_nu_semitrivial"], "Second");
    assert_eq!(report["subcritical"], true);
    // The same report is printed to stdout.
    assert!(String::from_utf8_lossy(&out.stdout).contains("saddle_window"));
}

#[test]
fn config_command_key_drives_the_run_too() {
    // The `command` key inside the config is honored by the library runner;
    // through the CLI the subcommand wins, so `constants` on a sweep config
    // must still print constants.
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "both.conf",
        &format!("command = sweep\nnu_list = 1, 2\n{}", base_params()),
    );
    let out = hsolve(&["constants", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Lambda_N"));
}
