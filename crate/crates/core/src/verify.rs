//! The acceptance gate: twelve numbered end-to-end checks, each pinning a
//! closed-form oracle or structural invariant of the solver stack. Every
//! runner produces a deterministic pass/fail plus a short detail string, so
//! two runs of the suite serialize to identical bytes.

use crate::diagnostics::{
    diagnostic_series, ef1_sup, ef2_residual, intvk_ratio, neck_energy, regime_classify, wpe_sup,
    Regime,
};
use crate::families::{
    build_phi, dlap_v0, dv0, e4v0, lap_v0, log_family, out_frac, quad1_family, quad2_family, v0,
    FamilyMember, Phi, BETA_STAR,
};
use crate::greens::{
    g_delta_radial, h_delta_at_zero, pohozaev_terms, representation_residual, PolyGauss,
    RadialField,
};
use crate::grid::RadialGrid;
use crate::ode::OdeConfig;
use crate::profile::RadialProfile;
use crate::quadrature::{composite, composite_log};
use crate::shooting::{find_beta_star, shoot, ShootResult, TrajectoryClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "beta-star-recovery"),
    (2, "closed-form-reproduction"),
    (3, "quantization-constant"),
    (4, "sub-quantization"),
    (5, "trichotomy"),
    (6, "log-family-mass"),
    (7, "quad2-mass-law"),
    (8, "neck-energy"),
    (9, "pohozaev-suite"),
    (10, "representation-formula"),
    (11, "estimate-stability"),
    (12, "determinism"),
];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Shared expensive artifacts, computed at most once per suite run.
#[derive(Default)]
struct Ctx {
    beta8: OnceLock<Result<f64, String>>,
    shot15: OnceLock<Result<Arc<ShootResult>, String>>,
    phi: OnceLock<Result<Arc<Phi>, String>>,
}

impl Ctx {
    fn beta8(&self) -> Result<f64, String> {
        self.beta8
            .get_or_init(|| find_beta_star(0.5, 1.0, 1e-8).map_err(|e| e.to_string()))
            .clone()
    }

    fn shot15(&self) -> Result<Arc<ShootResult>, String> {
        self.shot15
            .get_or_init(|| {
                shoot(1.5, &OdeConfig::default()).map(Arc::new).map_err(|e| e.to_string())
            })
            .clone()
    }

    fn phi(&self) -> Result<Arc<Phi>, String> {
        self.phi
            .get_or_init(|| build_phi(40.0, 4096).map(Arc::new).map_err(|e| e.to_string()))
            .clone()
    }
}

struct V0Field;

impl RadialField for V0Field {
    fn u(&self, r: f64) -> f64 {
        v0(r)
    }
    fn du(&self, r: f64) -> f64 {
        dv0(r)
    }
    fn w(&self, r: f64) -> f64 {
        lap_v0(r)
    }
    fn dw(&self, r: f64) -> f64 {
        dlap_v0(r)
    }
    fn bih(&self, r: f64) -> f64 {
        e4v0(r)
    }
}

fn result(id: u32, passed: bool, detail: String) -> CriterionResult {
    let name = CRITERIA[(id - 1) as usize].1;
    CriterionResult { id, name, passed, detail }
}

/// 1. find_beta_star(0.5, 1, 1e-8) recovers √(2/3) within tol, in under 30 s.
fn c01(ctx: &Ctx, tol: f64) -> CriterionResult {
    let t0 = Instant::now();
    let r = ctx.beta8();
    let fast = t0.elapsed().as_secs_f64() < 30.0;
    match r {
        Ok(b) => {
            let dev = (b - BETA_STAR).abs();
            result(
                1,
                dev < tol && fast,
                format!("beta* = {b:.12}; |beta* - sqrt(2/3)| = {dev:.3e} (tol {tol:.1e})"),
            )
        }
        Err(e) => result(1, false, format!("beta* search failed: {e}")),
    }
}

/// 2. Shooting at β* = √(2/3) itself reproduces v₀ to sup-norm tol on
///    [0, 50]. (The search-found β* of criterion 1 is resolution-limited to
///    ~1/r_max², which the r²/8 perturbation mode would amplify here.)
fn c02(tol: f64) -> CriterionResult {
    let shot = match shoot(BETA_STAR, &OdeConfig::default()) {
        Ok(s) => s,
        Err(e) => return result(2, false, format!("shoot failed: {e}")),
    };
    let mut sup: f64 = 0.0;
    for j in 0..=2000 {
        // the integration starts at the series-seed radius, not at 0
        let r = (50.0 * j as f64 / 2000.0).max(shot.profile.first_r());
        match shot.profile.u_at(r) {
            Ok(u) => sup = sup.max((u - v0(r)).abs()),
            Err(e) => return result(2, false, format!("profile gap at r = {r}: {e}")),
        }
    }
    result(2, sup < tol, format!("sup |v - v0| on [0, 50] = {sup:.3e} (tol {tol:.1e})"))
}

/// 3. Energy of v₀ (quadrature to 100 + log-tail estimate) = 16π² to rel tol.
fn c03(tol: f64) -> CriterionResult {
    let f = |s: f64| e4v0(s) * s * s * s;
    let quad = composite(&f, 0.0, 12.0, 2048) + composite_log(&f, 12.0, 100.0, 2048);
    let c = v0(100.0) + 2.0 * 100.0f64.ln();
    let tail = (4.0 * c).exp() / (4.0 * 100.0f64.powi(4));
    let energy = crate::TWO_PI_SQ * (quad + tail);
    let rel = (energy - crate::SIXTEEN_PI_SQ).abs() / crate::SIXTEEN_PI_SQ;
    result(
        3,
        rel < tol,
        format!("energy(v0) = {energy:.10}; rel dev from 16 pi^2 = {rel:.3e} (tol {tol:.1e})"),
    )
}

/// 4. β ∈ {1, 1.5, 2} give quadratic-type entire solutions with energies
///    strictly inside (0, 16π²) by the margin factor.
fn c04(ctx: &Ctx, margin: f64) -> CriterionResult {
    let lo = margin * crate::SIXTEEN_PI_SQ;
    let hi = (1.0 - margin) * crate::SIXTEEN_PI_SQ;
    let mut detail = String::new();
    let mut passed = true;
    for beta in [1.0, 1.5, 2.0] {
        let shot = if beta == 1.5 {
            match ctx.shot15() {
                Ok(s) => s,
                Err(e) => return result(4, false, format!("shoot({beta}) failed: {e}")),
            }
        } else {
            match shoot(beta, &OdeConfig::default()) {
                Ok(s) => Arc::new(s),
                Err(e) => return result(4, false, format!("shoot({beta}) failed: {e}")),
            }
        };
        let quad = matches!(shot.class, TrajectoryClass::QuadraticEntire { .. });
        let inside = shot.energy_total > lo && shot.energy_total < hi;
        passed &= quad && inside;
        detail.push_str(&format!(
            "beta = {beta}: {} energy = {:.6}; ",
            shot.class, shot.energy_total
        ));
    }
    detail.push_str(&format!("margin = {margin:.1e}*16 pi^2"));
    result(4, passed, detail)
}

/// 5. Regime trichotomy across the three families, plus d_k ≈ 8a for quad-I.
fn c05(ctx: &Ctx, tol: f64) -> CriterionResult {
    let delta = 0.5;
    let ks = [8u32, 16, 32, 64];

    let log_members: Vec<FamilyMember> = match ks.iter().map(|&k| log_family(k)).collect() {
        Ok(v) => v,
        Err(e) => return result(5, false, format!("log family: {e}")),
    };
    let shot = match ctx.shot15() {
        Ok(s) => s,
        Err(e) => return result(5, false, format!("quad-I shot: {e}")),
    };
    let q1_members: Vec<FamilyMember> =
        match ks.iter().map(|&k| quad1_family(k, &shot)).collect() {
            Ok(v) => v,
            Err(e) => return result(5, false, format!("quad-I family: {e}")),
        };
    let phi = match ctx.phi() {
        Ok(p) => p,
        Err(e) => return result(5, false, format!("quad-II corrector: {e}")),
    };
    let q2_members: Vec<FamilyMember> =
        match [2u32, 3, 4].iter().map(|&k| quad2_family(k, &phi)).collect() {
            Ok(v) => v,
            Err(e) => return result(5, false, format!("quad-II family: {e}")),
        };

    let call = |members: &[FamilyMember]| -> Result<(Regime, Option<f64>), String> {
        let s = diagnostic_series(members, delta).map_err(|e| e.to_string())?;
        let rep = regime_classify(&s).map_err(|e| e.to_string())?;
        Ok((rep.regime, rep.dk_loglog_slope))
    };
    let (r_log, s_log) = match call(&log_members) {
        Ok(v) => v,
        Err(e) => return result(5, false, e),
    };
    let (r_q1, s_q1) = match call(&q1_members) {
        Ok(v) => v,
        Err(e) => return result(5, false, e),
    };
    let (r_q2, s_q2) = match call(&q2_members) {
        Ok(v) => v,
        Err(e) => return result(5, false, e),
    };

    // d_64 = μ²Δu_64(δ) should sit within tol of its limit 8a
    let m64 = &q1_members[3];
    let d64 = m64.mu() * m64.mu() * m64.lap_u(delta);
    let a = match shot.class {
        TrajectoryClass::QuadraticEntire { a_slope } => a_slope,
        _ => return result(5, false, "beta = 1.5 did not classify quadratic".into()),
    };
    let dev = (d64 / (8.0 * a) - 1.0).abs();

    let passed = r_log == Regime::IIa && r_q1 == Regime::IIb && r_q2 == Regime::IIc && dev < tol;
    let fmt = |s: Option<f64>| s.map_or("n/a".into(), |v| format!("{v:.4}"));
    result(
        5,
        passed,
        format!(
            "log -> {r_log} (slope {}); quad-I -> {r_q1} (slope {}); quad-II -> {r_q2} (slope {}); |d_64/8a - 1| = {dev:.3e} (tol {tol:.1e})",
            fmt(s_log),
            fmt(s_q1),
            fmt(s_q2)
        ),
    )
}

/// 6. Log-family mass in B_{1/2} at k = 64 against the closed antiderivative.
fn c06(tol: f64) -> CriterionResult {
    let m = match log_family(64).and_then(|m| m.mass_ball(0.5)) {
        Ok(m) => m,
        Err(e) => return result(6, false, format!("mass: {e}")),
    };
    let of32 = out_frac(32.0);
    let closed = crate::SIXTEEN_PI_SQ * (1.0 - of32);
    let quad_dev = (m / closed - 1.0).abs();
    let rel16 = (m - crate::SIXTEEN_PI_SQ).abs() / crate::SIXTEEN_PI_SQ;
    let of_ok = (of32 - 2.678e-4).abs() < 1e-7;
    let passed = rel16 < tol && quad_dev < 1e-6 && of_ok;
    result(
        6,
        passed,
        format!(
            "mass(B_1/2, k=64) = {m:.8}; outFrac(32) = {of32:.6e}; quadrature vs closed form = {quad_dev:.3e}; rel dev from 16 pi^2 = {rel16:.3e} (tol {tol:.1e})"
        ),
    )
}

/// 7. Quad-II total mass 4π²/k⁸ and the exact origin diagnostic d_k = k⁴.
fn c07(ctx: &Ctx, tol: f64) -> CriterionResult {
    let phi = match ctx.phi() {
        Ok(p) => p,
        Err(e) => return result(7, false, format!("corrector: {e}")),
    };
    let mut detail = String::new();
    let mut passed = true;
    for k in [2u32, 3] {
        let m = match quad2_family(k, &phi) {
            Ok(m) => m,
            Err(e) => return result(7, false, format!("member: {e}")),
        };
        let mass = match m.mass_ball(3.0) {
            Ok(v) => v,
            Err(e) => return result(7, false, format!("mass: {e}")),
        };
        let law = 2.0 * crate::TWO_PI_SQ / (m.k().powi(8));
        let rel = (mass / law - 1.0).abs();
        let dk = m.mu() * m.mu() * m.lap_u(0.0);
        let dk_dev = (dk - m.k().powi(4)).abs();
        passed &= rel < tol && dk_dev < 1e-12 * m.k().powi(4);
        detail.push_str(&format!("k = {k}: mass rel dev = {rel:.3e}, |d_k - k^4| = {dk_dev:.3e}; "));
    }
    detail.push_str(&format!("(tol {tol:.1e})"));
    result(7, passed, detail)
}

/// 8. Neck energies at k = 64 match the closed form and decrease in R.
fn c08(tol: f64) -> CriterionResult {
    let m = match log_family(64) {
        Ok(m) => m,
        Err(e) => return result(8, false, format!("member: {e}")),
    };
    let delta = 0.5;
    let mut prev = f64::INFINITY;
    let mut passed = true;
    let mut detail = String::new();
    for big_r in [5.0, 10.0, 20.0] {
        let neck = match neck_energy(&m, big_r, delta) {
            Ok(v) => v,
            Err(e) => return result(8, false, format!("neck: {e}")),
        };
        let closed = crate::SIXTEEN_PI_SQ * (out_frac(big_r) - out_frac(64.0 * delta));
        let rel = (neck / closed - 1.0).abs();
        passed &= rel < tol && neck < prev;
        prev = neck;
        detail.push_str(&format!("R = {big_r}: neck = {neck:.6}, rel dev = {rel:.3e}; "));
    }
    detail.push_str(&format!("monotone decreasing; (tol {tol:.1e})"));
    result(8, passed, detail)
}

/// 9. Pohozaev identity on 100 seeded random fields plus the v₀ limit.
fn c09(tol: f64, seed: u64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let fld = PolyGauss::sample(&mut rng);
        let r = rng.gen_range(0.5..3.0);
        let t = pohozaev_terms(&fld, r);
        let dev = (t.volume_term - t.boundary_term).abs() / (1.0 + t.boundary_term.abs());
        worst = worst.max(dev);
    }
    let t = pohozaev_terms(&V0Field, 50.0);
    let v0_rel = (t.boundary_term + crate::SIXTEEN_PI_SQ).abs() / crate::SIXTEEN_PI_SQ;
    let passed = worst < tol && v0_rel < 5e-3;
    result(
        9,
        passed,
        format!(
            "worst |volume - boundary| over 100 fields = {worst:.3e} (tol {tol:.1e}); v0 boundary at r = 50: {:.6} (rel dev from -16 pi^2 = {v0_rel:.3e})",
            t.boundary_term
        ),
    )
}

/// 10. Representation formula residuals and the iterated-kernel consistency.
fn c10(tol: f64) -> CriterionResult {
    let delta = 0.5;
    let grid = match RadialGrid::uniform(0.0, 0.6, 512) {
        Ok(g) => g,
        Err(e) => return result(10, false, format!("grid: {e}")),
    };
    let pv0 = match RadialProfile::from_fns(grid.clone(), v0, dv0, lap_v0, dlap_v0) {
        Ok(p) => p,
        Err(e) => return result(10, false, format!("profile: {e}")),
    };
    let res_v0 = match representation_residual(&pv0, delta, |_| 1.0) {
        Ok(v) => v,
        Err(e) => return result(10, false, format!("residual: {e}")),
    };
    let pbi = match RadialProfile::from_fns(grid, |r| -r * r / 8.0, |r| -r / 4.0, |_| 1.0, |_| 0.0)
    {
        Ok(p) => p,
        Err(e) => return result(10, false, format!("profile: {e}")),
    };
    let res_bi = match representation_residual(&pbi, delta, |_| 0.0) {
        Ok(v) => v,
        Err(e) => return result(10, false, format!("residual: {e}")),
    };
    // Δ_r H_δ(0, r) = g_δ(0, r) at 20 interior radii; fourth-order stencils
    // keep the truncation below tolerance at the innermost radius
    let h = 1e-4;
    let mut worst_h: f64 = 0.0;
    for j in 1..=20 {
        let r = delta * j as f64 / 21.0;
        let f = |x: f64| h_delta_at_zero(x, delta).unwrap();
        let (f2p, f1p, f0, f1m, f2m) = (f(r + 2.0 * h), f(r + h), f(r), f(r - h), f(r - 2.0 * h));
        let d2 = (-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * h * h);
        let d1 = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
        let lap = -(d2 + 3.0 * d1 / r);
        let g = g_delta_radial(0.0, r, delta).unwrap();
        worst_h = worst_h.max((lap - g).abs() / g);
    }
    let passed = res_v0 < tol && res_bi < 1e-13 && worst_h < 1e-6;
    result(
        10,
        passed,
        format!(
            "v0 residual = {res_v0:.3e} (tol {tol:.1e}); biharmonic residual = {res_bi:.3e}; worst kernel-consistency rel dev over 20 radii = {worst_h:.3e}"
        ),
    )
}

/// 11. Estimate suite: the v₀ weighted point estimate and bounded variation
///     of each estimator across family members.
fn c11(ctx: &Ctx, tol: f64) -> CriterionResult {
    let delta = 0.5;
    let logs: Vec<FamilyMember> = match [8u32, 16, 32].iter().map(|&k| log_family(k)).collect() {
        Ok(v) => v,
        Err(e) => return result(11, false, format!("log family: {e}")),
    };
    let (wpe16, _) = wpe_sup(&logs[1], delta);
    let wpe_dev = (wpe16 - 1.5650845800732873).abs();
    let (wpe8, _) = wpe_sup(&logs[0], delta);
    let (wpe32, _) = wpe_sup(&logs[2], delta);
    let wpe_spread = (wpe8 - wpe32).abs();

    let phi = match ctx.phi() {
        Ok(p) => p,
        Err(e) => return result(11, false, format!("corrector: {e}")),
    };
    let (m2, m3) = match (quad2_family(2, &phi), quad2_family(3, &phi)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return result(11, false, "quad-II members failed".into()),
    };
    let (e1_2, e1_3) = (ef1_sup(&m2, delta), ef1_sup(&m3, delta));
    let (e2_2, e2_3) = match (ef2_residual(&m2, delta), ef2_residual(&m3, delta)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return result(11, false, "ef2 failed".into()),
    };

    let mut iv = Vec::new();
    for m in &logs {
        match intvk_ratio(m, delta, 1.0) {
            Ok(v) => iv.push(v),
            Err(e) => return result(11, false, format!("intvk: {e}")),
        }
    }
    let iv_span = iv.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / iv.iter().cloned().fold(f64::INFINITY, f64::min);

    let passed = wpe_dev < tol
        && wpe_spread < 1e-9
        && e1_3 <= 2.0 * e1_2
        && e2_3 <= e2_2
        && iv_span <= 2.0;
    result(
        11,
        passed,
        format!(
            "wpe(v0) = {wpe16:.10} (dev {wpe_dev:.3e}, tol {tol:.1e}); wpe k-spread = {wpe_spread:.3e}; ef1 k=2/3: {e1_2:.4e}/{e1_3:.4e}; ef2 k=2/3: {e2_2:.4e}/{e2_3:.4e}; intvk span over k = {iv_span:.3}"
        ),
    )
}

/// 12. Determinism: a cheap criterion subset re-run from scratch renders to
///     identical bytes.
fn c12(seed: u64) -> CriterionResult {
    let run = || {
        let ctx = Ctx::default();
        let rs = vec![c03(1e-8), c07(&ctx, 1e-6), c09(1e-8, seed)];
        format!("{rs:?}")
    };
    let first = run();
    let second = run();
    let passed = first == second;
    result(
        12,
        passed,
        format!("criteria {{3, 7, 9}} re-run from scratch byte-identical: {passed}"),
    )
}

fn default_tol(id: u32) -> f64 {
    match id {
        1 | 2 | 11 => 1e-6,
        3 | 9 => 1e-8,
        4 | 6 => 1e-3,
        5 => 0.02,
        7 => 1e-6,
        8 => 0.01,
        10 => 1e-7,
        _ => 0.0,
    }
}

/// Run the acceptance criteria in order. `tol` overrides each criterion's
/// headline tolerance (the suite should then fail loudly); `only` is a
/// substring filter on criterion names; `seed` drives the random-field suite.
pub fn run_all(tol: Option<f64>, seed: u64, only: Option<&str>) -> Vec<CriterionResult> {
    let ctx = Ctx::default();
    let mut out = Vec::new();
    for (id, name) in CRITERIA {
        if let Some(pat) = only {
            if !name.contains(pat) {
                continue;
            }
        }
        let t = tol.unwrap_or_else(|| default_tol(id));
        let r = match id {
            1 => c01(&ctx, t),
            2 => c02(t),
            3 => c03(t),
            4 => c04(&ctx, t),
            5 => c05(&ctx, t),
            6 => c06(t),
            7 => c07(&ctx, t),
            8 => c08(t),
            9 => c09(t, seed),
            10 => c10(t),
            11 => c11(&ctx, t),
            12 => c12(seed),
            _ => unreachable!(),
        };
        out.push(r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_table_well_formed() {
        assert_eq!(CRITERIA.len(), 12);
        for (i, (id, name)) in CRITERIA.iter().enumerate() {
            assert_eq!(*id as usize, i + 1);
            assert!(!name.is_empty());
        }
    }

    #[test]
    fn cheap_criteria_pass_and_filter_works() {
        let rs = run_all(None, 0, Some("quantization-constant"));
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].id, 3);
        assert!(rs[0].passed, "{}", rs[0].detail);
        assert!(rs[0].detail.contains("rel dev"));
    }

    #[test]
    fn tol_override_fails_a_closed_form_criterion() {
        let rs = run_all(Some(1e-30), 0, Some("quantization-constant"));
        assert!(!rs[0].passed);
    }

    #[test]
    fn determinism_criterion_passes() {
        let rs = run_all(None, 0, Some("determinism"));
        assert_eq!(rs.len(), 1);
        assert!(rs[0].passed, "{}", rs[0].detail);
    }

    #[test]
    fn estimate_criterion_passes() {
        let rs = run_all(None, 0, Some("estimate-stability"));
        assert!(rs[0].passed, "{}", rs[0].detail);
    }

    #[test]
    #[ignore = "full acceptance sweep; the cli acceptance tests run it per-criterion"]
    fn full_suite_passes() {
        for r in run_all(None, 0, None) {
            println!("[{}] {} — {}", if r.passed { "pass" } else { "FAIL" }, r.name, r.detail);
            assert!(r.passed, "criterion {} failed: {}", r.id, r.detail);
        }
    }
}
