//! Acceptance gate: one test per criterion, each running the verifier binary
//! at the built-in tolerance for that criterion. A failing criterion fails
//! its test with the reported detail line.

use std::fs;
use std::process::Command;

use tempfile::TempDir;

fn run_criterion(name: &str) {
    let tmp = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_liouville4"))
        .current_dir(tmp.path())
        .args(["verify", "--only", name])
        .output()
        .expect("spawn liouville4");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        out.status.success() && stdout.contains("[pass]") && !stdout.contains("[FAIL]"),
        "criterion {name} failed:\n{stdout}{stderr}"
    );
    println!("{}", stdout.trim_end());
}

#[test]
fn criterion_01_beta_star_recovery() {
    run_criterion("beta-star-recovery");
}

#[test]
fn criterion_02_closed_form_reproduction() {
    run_criterion("closed-form-reproduction");
}

#[test]
fn criterion_03_quantization_constant() {
    run_criterion("quantization-constant");
}

#[test]
fn criterion_04_sub_quantization() {
    run_criterion("sub-quantization");
}

#[test]
fn criterion_05_trichotomy() {
    run_criterion("trichotomy");
}

#[test]
fn criterion_06_log_family_mass() {
    run_criterion("log-family-mass");
}

#[test]
fn criterion_07_quad2_mass_law() {
    run_criterion("quad2-mass-law");
}

#[test]
fn criterion_08_neck_energy() {
    run_criterion("neck-energy");
}

#[test]
fn criterion_09_pohozaev_suite() {
    run_criterion("pohozaev-suite");
}

#[test]
fn criterion_10_representation_formula() {
    run_criterion("representation-formula");
}

#[test]
fn criterion_11_estimate_stability() {
    run_criterion("estimate-stability");
}

#[test]
fn criterion_12_determinism() {
    // the in-process check: a fresh context reproduces criteria 3, 7, 9 bit
    // for bit
    run_criterion("determinism");

    // and the process-level check: two runs with identical config produce
    // byte-identical reports and manifests
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [a.path(), b.path()] {
        let out = Command::new(env!("CARGO_BIN_EXE_liouville4"))
            .current_dir(dir)
            .args(["verify", "--only", "quad2-mass-law", "--seed", "5"])
            .output()
            .expect("spawn liouville4");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["out/verify_report.json", "out/manifest.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical runs");
    }
}
