//! Concentrating families of radial solutions to Δ²u = V e^{4u} on balls.
//!
//! Three one-parameter families indexed by k (concentration scale μ_k = e^{-u_k(0)}):
//!
//! * log-type: u_k(r) = ln(k√96 / (√96 + k²r²)), V ≡ 1 — rescaled copies of the
//!   entire solution v₀, mass 16π² concentrating at the origin;
//! * quadratic-type I: u_k(r) = v(kr) + ln k for a shot profile v with
//!   v ~ −a r², V ≡ 1 — energy stays strictly below 16π²;
//! * quadratic-type II: u_k(r) = ln k − k⁶r²/8 + k⁻⁸φ(k³r) with
//!   V_k = e^{−4k⁻⁸φ(k³r)} → 1, built so that Δ²u_k = k⁴e^{−k⁶r²/2} exactly —
//!   the mass 4π²/k⁸ vanishes while Δu_k(0) = k⁶ blows up.

use crate::error::{Error, Result};
use crate::ode::OdeConfig;
use crate::poisson::{solve_radial_poisson, PoissonMode, PoissonSolution};
use crate::quadrature::{composite, composite_log};
use crate::shooting::{asymptotic_slope, ShootResult, SlopeFit, TrajectoryClass};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// √96
pub const SQRT_96: f64 = 9.797958971132712;

/// β* = Δv₀(0) = 8/√96 = √(2/3), the shooting threshold.
pub const BETA_STAR: f64 = 0.816496580927726;

/// v₀(r) = ln(√96/(√96 + r²)), the entire log-type solution of Δ²v = e^{4v}.
pub fn v0(r: f64) -> f64 {
    -(r * r / SQRT_96).ln_1p()
}

pub fn dv0(r: f64) -> f64 {
    -2.0 * r / (SQRT_96 + r * r)
}

/// Δv₀ (minus convention: Δ = −(d² + 3/r d))
pub fn lap_v0(r: f64) -> f64 {
    let t = SQRT_96 + r * r;
    (8.0 * SQRT_96 + 4.0 * r * r) / (t * t)
}

pub fn dlap_v0(r: f64) -> f64 {
    let t = SQRT_96 + r * r;
    -24.0 * r / (t * t) + 16.0 * r * r * r / (t * t * t)
}

pub fn e4v0(r: f64) -> f64 {
    let t = SQRT_96 + r * r;
    96.0 * 96.0 / (t * t * t * t)
}

/// Fraction of the total mass 16π² of v₀ lying outside B_R:
/// out_frac(R) = 288/t² − 192√96/t³ with t = √96 + R².
pub fn out_frac(big_r: f64) -> f64 {
    let t = SQRT_96 + big_r * big_r;
    288.0 / (t * t) - 192.0 * SQRT_96 / (t * t * t)
}

/// The corrector pair (ψ₁, φ) for the quadratic-type-II family:
/// Δψ₁ = e^{−s²/2} and Δφ = ψ₁, both vanishing at the origin, solved on
/// [0, r_phi] and continued analytically beyond (the source is spent there, so
/// ψ₁ = c∞ + 1/s² and φ′ = −c∞ s/4 − 1/(2s) − K/s³ hold up to e^{−r_phi²/2}).
pub struct Phi {
    psi1: Arc<PoissonSolution>,
    phi: PoissonSolution,
    r_phi: f64,
    /// lim ψ₁ = −1/2 up to solver error
    pub c_inf: f64,
    /// matching constant in ∫₀^R s³ψ₁ = c∞R⁴/4 + R²/2 + K; exact value −1
    pub k_const: f64,
    phi_end: f64,
}

pub fn build_phi(r_phi: f64, n: usize) -> Result<Phi> {
    if !r_phi.is_finite() || r_phi < 10.0 {
        return Err(Error::param("r_phi", "need r_phi >= 10 so the Gaussian source is spent"));
    }
    if n < 256 {
        return Err(Error::TooCoarse { need: 256, got: n });
    }
    let psi1 = Arc::new(solve_radial_poisson(
        |s| (-0.5 * s * s).exp(),
        r_phi,
        n,
        PoissonMode::ZeroAtOrigin,
    )?);
    let inner = Arc::clone(&psi1);
    let phi = solve_radial_poisson(move |s| inner.psi(s), r_phi, n, PoissonMode::ZeroAtOrigin)?;
    let c_inf = psi1.psi(r_phi) - 1.0 / (r_phi * r_phi);
    let k_const = phi.moment(r_phi) - c_inf * r_phi.powi(4) / 4.0 - r_phi * r_phi / 2.0;
    let phi_end = phi.psi(r_phi);
    Ok(Phi { psi1, phi, r_phi, c_inf, k_const, phi_end })
}

impl Phi {
    pub fn r_phi(&self) -> f64 {
        self.r_phi
    }

    pub fn psi1(&self, s: f64) -> f64 {
        if s <= self.r_phi {
            self.psi1.psi(s)
        } else {
            self.c_inf + 1.0 / (s * s)
        }
    }

    pub fn phi(&self, s: f64) -> f64 {
        if s <= self.r_phi {
            self.phi.psi(s)
        } else {
            let rp = self.r_phi;
            self.phi_end - self.c_inf * (s * s - rp * rp) / 8.0 - 0.5 * (s / rp).ln()
                + 0.5 * self.k_const * (1.0 / (s * s) - 1.0 / (rp * rp))
        }
    }

    pub fn dphi(&self, s: f64) -> f64 {
        if s <= self.r_phi {
            self.phi.dpsi(s)
        } else {
            -self.c_inf * s / 4.0 - 0.5 / s - self.k_const / (s * s * s)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    ClosedForm,
    ProfileBacked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    Log,
    QuadI { beta: f64 },
    QuadII,
}

impl FamilyKind {
    pub fn slug(&self) -> &'static str {
        match self {
            FamilyKind::Log => "log",
            FamilyKind::QuadI { .. } => "quad1",
            FamilyKind::QuadII => "quad2",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub k_values: Vec<u32>,
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        if self.k_values.is_empty() {
            return Err(Error::param("k_values", "must be nonempty"));
        }
        if self.k_values.contains(&0) {
            return Err(Error::param("k_values", "k must be >= 1"));
        }
        if let FamilyKind::QuadI { beta } = self.kind {
            if !beta.is_finite() || beta <= BETA_STAR {
                return Err(Error::param("beta", "quadratic-type I needs beta > beta_star"));
            }
        }
        Ok(())
    }
}

type DynFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Backing {
    Log,
    Quad1 { shoot: Arc<ShootResult>, fit: SlopeFit },
    Quad2 { phi: Arc<Phi> },
    Custom { u: DynFn, du: DynFn, lap: DynFn, vw: DynFn },
}

/// One member of a concentrating family; evaluates u, its radial derivative,
/// Δu, the weight V, and masses of V e^{4u} over balls and annuli.
#[derive(Clone)]
pub struct FamilyMember {
    k: f64,
    mu: f64,
    provenance: Provenance,
    backing: Backing,
}

impl fmt::Debug for FamilyMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilyMember")
            .field("kind", &self.kind_slug())
            .field("k", &self.k)
            .field("mu", &self.mu)
            .finish()
    }
}

/// quadratic-type-I profile evaluation: Taylor inside the seed radius,
/// Hermite on the stored grid, fitted asymptote −aρ² + c ln ρ + d beyond.
fn v_of(shoot: &ShootResult, fit: &SlopeFit, rho: f64) -> f64 {
    let p = &shoot.profile;
    if rho < p.grid.nodes[0] {
        -shoot.beta * rho * rho / 8.0 + rho.powi(4) / 192.0
    } else if rho <= p.last_r() {
        p.u_at(rho).expect("rho within profile range")
    } else {
        -fit.a * rho * rho + fit.c * rho.ln() + fit.d
    }
}

fn dv_of(shoot: &ShootResult, fit: &SlopeFit, rho: f64) -> f64 {
    let p = &shoot.profile;
    if rho < p.grid.nodes[0] {
        -shoot.beta * rho / 4.0 + rho * rho * rho / 48.0
    } else if rho <= p.last_r() {
        p.du_at(rho).expect("rho within profile range")
    } else {
        -2.0 * fit.a * rho + fit.c / rho
    }
}

fn wv_of(shoot: &ShootResult, fit: &SlopeFit, rho: f64) -> f64 {
    let p = &shoot.profile;
    if rho < p.grid.nodes[0] {
        shoot.beta - rho * rho / 8.0
    } else if rho <= p.last_r() {
        p.w_at(rho).expect("rho within profile range")
    } else {
        8.0 * fit.a - 2.0 * fit.c / (rho * rho)
    }
}

impl FamilyMember {
    pub fn k(&self) -> f64 {
        self.k
    }

    /// μ_k = e^{−u_k(0)}
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn kind_slug(&self) -> &'static str {
        match &self.backing {
            Backing::Log => "log",
            Backing::Quad1 { .. } => "quad1",
            Backing::Quad2 { .. } => "quad2",
            Backing::Custom { .. } => "custom",
        }
    }

    pub fn u(&self, r: f64) -> f64 {
        match &self.backing {
            Backing::Log => v0(self.k * r) + self.k.ln(),
            Backing::Quad1 { shoot, fit } => v_of(shoot, fit, self.k * r) + self.k.ln(),
            Backing::Quad2 { phi } => {
                let k6 = self.k.powi(6);
                self.k.ln() - k6 * r * r / 8.0 + self.mu.powi(8) * phi.phi(self.k.powi(3) * r)
            }
            Backing::Custom { u, .. } => u(r),
        }
    }

    pub fn du(&self, r: f64) -> f64 {
        match &self.backing {
            Backing::Log => self.k * dv0(self.k * r),
            Backing::Quad1 { shoot, fit } => self.k * dv_of(shoot, fit, self.k * r),
            Backing::Quad2 { phi } => {
                -self.k.powi(6) * r / 4.0 + self.mu.powi(5) * phi.dphi(self.k.powi(3) * r)
            }
            Backing::Custom { du, .. } => du(r),
        }
    }

    /// Δu_k (minus convention)
    pub fn lap_u(&self, r: f64) -> f64 {
        match &self.backing {
            Backing::Log => self.k * self.k * lap_v0(self.k * r),
            Backing::Quad1 { shoot, fit } => self.k * self.k * wv_of(shoot, fit, self.k * r),
            Backing::Quad2 { phi } => {
                self.k.powi(6) + self.mu * self.mu * phi.psi1(self.k.powi(3) * r)
            }
            Backing::Custom { lap, .. } => lap(r),
        }
    }

    pub fn v_weight(&self, r: f64) -> f64 {
        match &self.backing {
            Backing::Log | Backing::Quad1 { .. } => 1.0,
            Backing::Quad2 { phi } => {
                (-4.0 * self.mu.powi(8) * phi.phi(self.k.powi(3) * r)).exp()
            }
            Backing::Custom { vw, .. } => vw(r),
        }
    }

    /// V_k e^{4u_k}; for quadratic type II the corrector cancels analytically
    /// and the density is exactly k⁴ e^{−k⁶r²/2}.
    pub fn density(&self, r: f64) -> f64 {
        match &self.backing {
            Backing::Quad2 { .. } => {
                self.k.powi(4) * (-self.k.powi(6) * r * r / 2.0).exp()
            }
            _ => self.v_weight(r) * (4.0 * self.u(r)).exp(),
        }
    }

    /// radius scale the density concentrates on
    fn scale(&self) -> f64 {
        match &self.backing {
            Backing::Quad2 { .. } => self.mu.powi(3),
            _ => self.mu,
        }
    }

    /// ∫_{B_R} V_k e^{4u_k} = 2π² ∫₀^R V e^{4u} s³ ds
    pub fn mass_ball(&self, r_ball: f64) -> Result<f64> {
        if !r_ball.is_finite() || r_ball < 0.0 {
            return Err(Error::param("r_ball", "need a finite nonnegative radius"));
        }
        if r_ball == 0.0 {
            return Ok(0.0);
        }
        let f = |s: f64| self.density(s) * s * s * s;
        let split = 12.0 * self.scale();
        let m = if r_ball <= split {
            composite(&f, 0.0, r_ball, 2048)
        } else {
            composite(&f, 0.0, split, 2048) + composite_log(&f, split, r_ball, 2048)
        };
        Ok(crate::TWO_PI_SQ * m)
    }

    pub fn mass_annulus(&self, r0: f64, r1: f64) -> Result<f64> {
        if !(0.0 <= r0 && r0 < r1) || !r1.is_finite() {
            return Err(Error::param("annulus", "need 0 <= r0 < r1 finite"));
        }
        if r0 == 0.0 {
            return self.mass_ball(r1);
        }
        let f = |s: f64| self.density(s) * s * s * s;
        let m = if r1 / r0 > 4.0 {
            composite_log(&f, r0, r1, 2048)
        } else {
            composite(&f, r0, r1, 2048)
        };
        Ok(crate::TWO_PI_SQ * m)
    }
}

pub fn log_family(k: u32) -> Result<FamilyMember> {
    if k == 0 {
        return Err(Error::param("k", "k must be >= 1"));
    }
    let kf = k as f64;
    Ok(FamilyMember {
        k: kf,
        mu: 1.0 / kf,
        provenance: Provenance::ClosedForm,
        backing: Backing::Log,
    })
}

/// Member u_k(r) = v(kr) + ln k from a quadratic-type shot v. Errors unless
/// the shot classified as quadratic.
pub fn quad1_family(k: u32, shoot: &Arc<ShootResult>) -> Result<FamilyMember> {
    if k == 0 {
        return Err(Error::param("k", "k must be >= 1"));
    }
    if !matches!(shoot.class, TrajectoryClass::QuadraticEntire { .. }) {
        return Err(Error::NotQuadratic);
    }
    let fit = asymptotic_slope(&shoot.profile)?;
    let kf = k as f64;
    Ok(FamilyMember {
        k: kf,
        mu: 1.0 / kf,
        provenance: Provenance::ProfileBacked,
        backing: Backing::Quad1 { shoot: Arc::clone(shoot), fit },
    })
}

pub fn quad2_family(k: u32, phi: &Arc<Phi>) -> Result<FamilyMember> {
    if k == 0 {
        return Err(Error::param("k", "k must be >= 1"));
    }
    let kf = k as f64;
    Ok(FamilyMember {
        k: kf,
        mu: 1.0 / kf,
        provenance: Provenance::ClosedForm,
        backing: Backing::Quad2 { phi: Arc::clone(phi) },
    })
}

/// A hand-made member from closures; μ is derived from u(0).
pub fn custom_member(k: f64, u: DynFn, du: DynFn, lap: DynFn, vw: DynFn) -> FamilyMember {
    let mu = (-u(0.0)).exp();
    FamilyMember {
        k,
        mu,
        provenance: Provenance::ClosedForm,
        backing: Backing::Custom { u, du, lap, vw },
    }
}

/// Build all members of a family spec. Shared structure — the shot profile for
/// quadratic type I, the corrector for type II — is computed once.
pub fn build_family(spec: &FamilySpec, config: &OdeConfig) -> Result<Vec<FamilyMember>> {
    spec.validate()?;
    match spec.kind {
        FamilyKind::Log => spec.k_values.iter().map(|&k| log_family(k)).collect(),
        FamilyKind::QuadI { beta } => {
            let shot = Arc::new(crate::shooting::shoot(beta, config)?);
            spec.k_values.iter().map(|&k| quad1_family(k, &shot)).collect()
        }
        FamilyKind::QuadII => {
            let phi = Arc::new(build_phi(40.0, 4096)?);
            spec.k_values.iter().map(|&k| quad2_family(k, &phi)).collect()
        }
    }
}
