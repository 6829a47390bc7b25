//! Radial Poisson solver on [0, R] under the minus convention: given f,
//! produce ψ with Δψ = f via
//!
//! ```text
//! ψ′(r) = −r⁻³ ∫₀^r s³ f(s) ds,      ψ(r) = ψ(0) + ∫₀^r ψ′,
//! ```
//!
//! both integrals as cumulative Gauss tables with partial-interval
//! evaluation, so ψ is evaluable at arbitrary radii (the nested biharmonic
//! solve needs exactly that).

use crate::error::{Error, Result};
use crate::quadrature::Cumulative;
use std::sync::Arc;

type DynF = Box<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoissonMode {
    ZeroAtOrigin,
    /// ψ(R) = 0 at the solve's outer radius.
    ZeroAtDelta,
}

pub struct PoissonSolution {
    a: Arc<Cumulative<DynF>>,
    s: Cumulative<DynF>,
    offset: f64,
    r_end: f64,
}

/// Solve Δψ = f on [0, r_end] with n quadrature cells.
///
/// f must be integrable against r³ at the origin (anything growing worse
/// than r⁻² makes ψ(0) diverge and is rejected if it shows up as a
/// non-finite probe).
pub fn solve_radial_poisson(
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    r_end: f64,
    n: usize,
    mode: PoissonMode,
) -> Result<PoissonSolution> {
    if !(r_end > 0.0) || n < 2 {
        return Err(Error::param("poisson", format!("bad r_end = {r_end} or n = {n}")));
    }
    // reject forcings blowing up worse than r⁻² at the origin (ψ(0) diverges)
    let f1 = f(1e-6 * r_end);
    let f2 = f(1e-3 * r_end);
    if !f1.is_finite() || !f2.is_finite() {
        return Err(Error::param("f", "non-finite near the origin"));
    }
    if f1.abs() > 1e3 * f2.abs().max(f64::MIN_POSITIVE) {
        let q = (f1.abs() / f2.abs().max(f64::MIN_POSITIVE)).ln() / 1e3f64.ln();
        if q > 2.2 {
            return Err(Error::param("f", format!("origin singularity ~ r^-{q:.2} is worse than r^-2")));
        }
    }
    let h = r_end / n as f64;
    let mut nodes: Vec<f64> = (0..=n).map(|i| h * i as f64).collect();
    nodes[n] = r_end;

    let weighted: DynF = Box::new(move |s: f64| s * s * s * f(s));
    let a = Arc::new(Cumulative::build(weighted, nodes.clone()));

    let a2 = Arc::clone(&a);
    let integrand: DynF = Box::new(move |t: f64| {
        // A(t)/t³ → f(0)·t/4 as t → 0; Gauss nodes are interior so t > 0 here
        a2.eval(t) / (t * t * t)
    });
    let s = Cumulative::build(integrand, nodes);

    let mut sol = PoissonSolution { a, s, offset: 0.0, r_end };
    if mode == PoissonMode::ZeroAtDelta {
        sol.offset = -sol.psi(r_end);
    }
    Ok(sol)
}

impl PoissonSolution {
    pub fn r_end(&self) -> f64 {
        self.r_end
    }

    /// ψ(r); r is clamped to [0, r_end].
    pub fn psi(&self, r: f64) -> f64 {
        -self.s.eval(r) + self.offset
    }

    /// ψ′(r) = −A(r)/r³.
    pub fn dpsi(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        -self.a.eval(r) / (r * r * r)
    }

    /// A(r) = ∫₀^r s³ f(s) ds (handy for asymptote matching).
    pub fn moment(&self, r: f64) -> f64 {
        self.a.eval(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finitediff::radial_laplacian;

    #[test]
    fn constant_forcing_zero_at_origin() {
        // Δ(−r²/8) = 1
        let sol = solve_radial_poisson(|_| 1.0, 2.0, 64, PoissonMode::ZeroAtOrigin).unwrap();
        for &r in &[0.0, 0.3, 1.0, 1.73, 2.0] {
            assert!((sol.psi(r) + r * r / 8.0).abs() < 1e-14, "r = {r}");
            assert!((sol.dpsi(r) + r / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_forcing_zero_at_delta() {
        let delta = 0.5;
        let sol = solve_radial_poisson(|_| 1.0, delta, 64, PoissonMode::ZeroAtDelta).unwrap();
        for &r in &[0.0, 0.1, 0.25, 0.5] {
            let exact = (delta * delta - r * r) / 8.0;
            assert!((sol.psi(r) - exact).abs() < 1e-14, "r = {r}");
        }
    }

    #[test]
    fn gaussian_forcing_taylor() {
        // Δψ = e^{−r²/2} ⇒ ψ = −r²/8 + r⁴/48 − r⁶/384 + …
        let sol = solve_radial_poisson(|r: f64| (-r * r / 2.0).exp(), 40.0, 4096, PoissonMode::ZeroAtOrigin).unwrap();
        for &r in &[0.05f64, 0.1, 0.2] {
            let lead = -r * r / 8.0 + r.powi(4) / 48.0;
            assert!(
                (sol.psi(r) - lead).abs() < 1.5 * r.powi(6) / 384.0 + 1e-15,
                "r = {r}: {} vs {lead}",
                sol.psi(r)
            );
        }
    }

    #[test]
    fn laplacian_round_trip() {
        // solve then difference back: recovers f at interior nodes
        let f = |r: f64| (1.0 + r).recip();
        let sol = solve_radial_poisson(f, 1.0, 256, PoissonMode::ZeroAtOrigin).unwrap();
        let nodes: Vec<f64> = (0..=256).map(|i| i as f64 / 256.0).collect();
        let psi: Vec<f64> = nodes.iter().map(|&r| sol.psi(r)).collect();
        let w = radial_laplacian(&nodes, &psi).unwrap();
        for i in 1..nodes.len() - 1 {
            if nodes[i] < 0.1 {
                continue; // 3u′/r amplifies the stencil error next to 0
            }
            let exact = f(nodes[i]);
            assert!((w[i] - exact).abs() < 5e-5, "i = {i}: {} vs {exact}", w[i]);
        }
    }

    #[test]
    fn rejects_hard_singularity() {
        assert!(solve_radial_poisson(|r: f64| 1.0 / (r * r * r * r * r), 1.0, 16, PoissonMode::ZeroAtOrigin).is_err());
    }
}
