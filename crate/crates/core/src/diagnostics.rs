//! Concentration diagnostics along a family: the scale-invariant quantity
//! d_k = μ_k² Δu_k(δ), the mass inside B_δ, the regime call built from both,
//! and the pointwise/integral estimate checks (sup bounds, neck fits,
//! monotonicity windows) that certify which blow-up scenario a family is in.

use crate::error::{Error, Result};
use crate::families::{FamilyMember, SQRT_96};
use crate::profile::RadialProfile;
use crate::quadrature::composite;
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticSeries {
    pub delta: f64,
    pub k: Vec<f64>,
    pub mu: Vec<f64>,
    pub d_k: Vec<f64>,
    pub mass_delta: Vec<f64>,
}

impl DiagnosticSeries {
    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,mu,d_k,mass_delta\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.k[i], self.mu[i], self.d_k[i], self.mass_delta[i]
            ));
        }
        out
    }
}

/// d_k = μ_k² Δu_k(δ) and the mass of V e^{4u} in B_δ, per member.
/// Members must come with strictly increasing k.
pub fn diagnostic_series(members: &[FamilyMember], delta: f64) -> Result<DiagnosticSeries> {
    if members.is_empty() {
        return Err(Error::param("members", "need at least one family member"));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::param("delta", "need 0 < delta < inf"));
    }
    if members.windows(2).any(|w| w[1].k() <= w[0].k()) {
        return Err(Error::param("members", "k must be strictly increasing"));
    }
    let mut s = DiagnosticSeries {
        delta,
        k: Vec::new(),
        mu: Vec::new(),
        d_k: Vec::new(),
        mass_delta: Vec::new(),
    };
    for m in members {
        s.k.push(m.k());
        s.mu.push(m.mu());
        s.d_k.push(m.mu() * m.mu() * m.lap_u(delta));
        s.mass_delta.push(m.mass_ball(delta)?);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii.a")]
    IIa,
    #[serde(rename = "ii.b")]
    IIb,
    #[serde(rename = "ii.c")]
    IIc,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::I => "i",
            Regime::IIa => "ii.a",
            Regime::IIb => "ii.b",
            Regime::IIc => "ii.c",
            Regime::Inconclusive => "inconclusive",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// slope of ln d_k against ln k over the last ≤ 4 members
    pub dk_loglog_slope: Option<f64>,
    /// slope of u_k(0) against ln k over the whole series
    pub u0_trend_slope: f64,
    /// concentrated-mass estimate, clamped to [0, 16π²]
    pub alpha: Option<f64>,
    pub alpha_raw: Option<f64>,
    /// false when the series is too short or the masses are not settling
    pub confident: bool,
}

fn lsq_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Call the blow-up regime from the series alone:
///
/// * regime i — u_k(0) stays bounded (spread < 10 and flat against ln k);
/// * regime ii, by the log-log slope s of d_k: s ≤ −1/2 means d_k → 0 (ii.a),
///   |s| < 1/2 means d_k stabilizes (ii.b), s ≥ 1/2 means d_k → ∞ (ii.c).
///
/// α extrapolates mass_delta in the Richardson variable 1/k² over the last
/// two members, and is only trusted when the last three masses are monotone.
pub fn regime_classify(series: &DiagnosticSeries) -> Result<RegimeReport> {
    let n = series.len();
    if n < 2 {
        return Err(Error::TooCoarse { need: 2, got: n });
    }
    let u0: Vec<f64> = series.mu.iter().map(|&m| -m.ln()).collect();
    let lnk: Vec<f64> = series.k.iter().map(|&k| k.ln()).collect();
    let u0_trend_slope = lsq_slope(&lnk, &u0);
    let u0_spread = u0.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - u0.iter().cloned().fold(f64::INFINITY, f64::min);
    let bounded = u0_spread < 10.0 && u0_trend_slope.abs() < 0.25;

    let w = n.min(4);
    let tail_dk = &series.d_k[n - w..];
    let dk_loglog_slope = if tail_dk.iter().all(|&d| d > 0.0) {
        let lx: Vec<f64> = series.k[n - w..].iter().map(|&k| k.ln()).collect();
        let ly: Vec<f64> = tail_dk.iter().map(|&d| d.ln()).collect();
        Some(lsq_slope(&lx, &ly))
    } else {
        None
    };

    let regime = if bounded {
        Regime::I
    } else {
        match dk_loglog_slope {
            Some(s) if s <= -0.5 => Regime::IIa,
            Some(s) if s < 0.5 => Regime::IIb,
            Some(_) => Regime::IIc,
            None => Regime::Inconclusive,
        }
    };

    let (alpha, alpha_raw, confident) = if n >= 3 {
        let m = &series.mass_delta[n - 3..];
        let monotone = (m[0] <= m[1] && m[1] <= m[2]) || (m[0] >= m[1] && m[1] >= m[2]);
        if monotone {
            let x1 = 1.0 / (series.k[n - 2] * series.k[n - 2]);
            let x2 = 1.0 / (series.k[n - 1] * series.k[n - 1]);
            let raw = m[2] + (m[2] - m[1]) * x2 / (x1 - x2);
            (Some(raw.clamp(0.0, crate::SIXTEEN_PI_SQ)), Some(raw), regime != Regime::Inconclusive)
        } else {
            (None, None, false)
        }
    } else {
        (None, None, false)
    };

    Ok(RegimeReport { regime, dk_loglog_slope, u0_trend_slope, alpha, alpha_raw, confident })
}

/// v_k(x) = u_k(μ_k x) − u_k(0), the unit-height rescaling.
pub fn rescaled_v(member: &FamilyMember, x: f64) -> f64 {
    member.u(member.mu() * x) - member.u(0.0)
}

/// Mass of V e^{4u} in the neck annulus R μ_k ≤ |x| ≤ δ.
pub fn neck_energy(member: &FamilyMember, big_r: f64, delta: f64) -> Result<f64> {
    let inner = big_r * member.mu();
    if !(inner > 0.0) || inner >= delta {
        return Err(Error::param("big_r", "need 0 < R mu < delta"));
    }
    member.mass_annulus(inner, delta)
}

fn refine_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let x = 0.5 * (lo + hi);
    (f(x), x)
}

fn scan_max(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let mut best = (f(lo), lo);
    for j in 1..=n {
        let x = lo + (hi - lo) * j as f64 / n as f64;
        let v = f(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    let h = (hi - lo) / n as f64;
    let (rv, rx) = refine_max(f, (best.1 - h).max(lo), (best.1 + h).min(hi));
    if rv > best.0 {
        (rv, rx)
    } else {
        best
    }
}

/// Weighted point estimate sup_{x ≤ δ/μ} x e^{v_k(x)} in rescaled
/// coordinates: for the log family this is (√96 + …)-capped at 96^{1/4}/2
/// independently of k. Returns (sup, argmax).
pub fn wpe_sup(member: &FamilyMember, delta: f64) -> (f64, f64) {
    let x_max = delta / member.mu();
    let f = |x: f64| x * rescaled_v(member, x).exp();
    scan_max(&f, 0.0, x_max, 4096)
}

/// First-expansion defect sup_{r ≤ δ} |r u′(r) + Δu_k(δ) r²/4|: zero when Δu
/// is constant, small exactly when the quadratic part dominates on B_δ.
pub fn ef1_sup(member: &FamilyMember, delta: f64) -> f64 {
    let lap_d = member.lap_u(delta);
    let f = |r: f64| (r * member.du(r) + lap_d * r * r / 4.0).abs();
    scan_max(&f, 0.0, delta, 4096).0
}

/// Relative paraboloid deviation
/// sup_{0 < r ≤ δ} |u(r) − u(0) + Δu(0) r²/8| / (Δu(0) r²/8).
pub fn ef2_residual(member: &FamilyMember, delta: f64) -> Result<f64> {
    let lap0 = member.lap_u(0.0);
    if !(lap0 > 0.0) {
        return Err(Error::param("member", "needs Δu(0) > 0"));
    }
    let u0 = member.u(0.0);
    let f = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        let para = lap0 * r * r / 8.0;
        (member.u(r) - u0 + para).abs() / para
    };
    Ok(scan_max(&f, 0.0, delta, 4096).0)
}

/// Rescaled L¹ discrepancy of the Laplacian against its boundary value:
/// (2π²/R²) ∫₀^R |μ²Δu_k(μx) − d_k| x³ dx with d_k = μ²Δu_k(δ).
pub fn intvk_ratio(member: &FamilyMember, delta: f64, big_r: f64) -> Result<f64> {
    if !(big_r > 0.0) || !big_r.is_finite() {
        return Err(Error::param("big_r", "need 0 < R < inf"));
    }
    let mu = member.mu();
    let d_k = mu * mu * member.lap_u(delta);
    let f = |x: f64| (mu * mu * member.lap_u(mu * x) - d_k).abs() * x * x * x;
    Ok(crate::TWO_PI_SQ * composite(&f, 0.0, big_r, 2048) / (big_r * big_r))
}

/// Monotonicity window [r_k, δ] with r_k = max(4, R_η) μ and
/// R_η = 1.1 √(η√96/(2−η)), the radius beyond which the rescaled profile has
/// shed all but an η-fraction of curvature at the origin scale. Returns
/// (r_k, break_found), where a break is any sampled u′ > 0 in the window.
pub fn mono_radius(member: &FamilyMember, eta: f64, delta: f64) -> Result<(f64, bool)> {
    if !(eta > 0.0 && eta < 2.0) {
        return Err(Error::param("eta", "need 0 < eta < 2"));
    }
    let r_eta = 1.1 * (eta * SQRT_96 / (2.0 - eta)).sqrt();
    let r_k = r_eta.max(4.0) * member.mu();
    if r_k >= delta {
        return Err(Error::param("eta", "window empty: max(4, R_eta) mu >= delta"));
    }
    let n = 2048;
    let mut break_found = false;
    for j in 0..=n {
        let r = r_k + (delta - r_k) * j as f64 / n as f64;
        if member.du(r) > 0.0 {
            break_found = true;
            break;
        }
    }
    Ok((r_k, break_found))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonotoneBreaks {
    /// first radius with Δu = 0 (curvature sign change)
    pub w_zero: Option<f64>,
    /// first radius after that with u′ = 0 (profile turns around)
    pub du_zero: Option<f64>,
}

fn bisect_root(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scan a stored trajectory for the ordered pair of monotonicity breaks that
/// precedes finite-radius growth: Δu crossing zero, then u′ crossing zero.
/// Roots are sharpened by bisection on the Hermite interpolant.
pub fn detect_monotone_breaks(profile: &RadialProfile) -> MonotoneBreaks {
    let n = profile.len();
    let mut w_zero = None;
    for i in 0..n.saturating_sub(1) {
        if profile.w[i] > 0.0 && profile.w[i + 1] <= 0.0 {
            let (a, b) = (profile.grid.nodes[i], profile.grid.nodes[i + 1]);
            w_zero = Some(bisect_root(&|r| profile.w_at(r).unwrap(), a, b));
            break;
        }
    }
    let mut du_zero = None;
    if let Some(rw) = w_zero {
        for i in 0..n - 1 {
            let (a, b) = (profile.grid.nodes[i], profile.grid.nodes[i + 1]);
            if b <= rw {
                continue;
            }
            if profile.du[i] < 0.0 && profile.du[i + 1] >= 0.0 {
                du_zero = Some(bisect_root(&|r| profile.du_at(r).unwrap(), a.max(rw), b));
                break;
            }
        }
    }
    MonotoneBreaks { w_zero, du_zero }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NeckFit {
    /// fitted log coefficient; 2 for a pure fundamental-solution neck
    pub a: f64,
    pub r0: f64,
}

/// One-parameter least squares for the neck shape on the tail window
/// [r₀, 20 r₀]: with x = r₀/r ∈ [0.05, 1] and ũ(x) = u(r₀/x) − u(r₀), fit
///
/// ```text
/// (x² − 1)/2 − ũ(x) ≈ a · [ln(1/x) + (x² − 1)/2].
/// ```
///
/// The value drifts toward 2 as the window moves into the tail; it is
/// sampling-sensitive, so treat it as a one-digit diagnostic, not a precise
/// functional.
pub fn fit_neck_profile(u: &impl Fn(f64) -> f64, r0: f64) -> NeckFit {
    let n = 256;
    let u_r0 = u(r0);
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        let x = 0.05 + 0.95 * j as f64 / (n - 1) as f64;
        let q = 0.5 * (x * x - 1.0);
        let y = q - (u(r0 / x) - u_r0);
        let g = (1.0 / x).ln() + q;
        num += g * y;
        den += g * g;
    }
    NeckFit { a: num / den, r0 }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub k: f64,
    pub delta: f64,
    pub eta: f64,
    pub big_r: f64,
    pub wpe_sup: f64,
    pub wpe_argmax: f64,
    pub ef1_sup: f64,
    pub ef2_residual: f64,
    pub intvk_ratio: f64,
    pub mono_radius: f64,
    pub mono_break_found: bool,
}

pub fn estimate_report(
    member: &FamilyMember,
    delta: f64,
    eta: f64,
    big_r: f64,
) -> Result<EstimateReport> {
    let (wpe, wpe_x) = wpe_sup(member, delta);
    let (r_k, broken) = mono_radius(member, eta, delta)?;
    Ok(EstimateReport {
        k: member.k(),
        delta,
        eta,
        big_r,
        wpe_sup: wpe,
        wpe_argmax: wpe_x,
        ef1_sup: ef1_sup(member, delta),
        ef2_residual: ef2_residual(member, delta)?,
        intvk_ratio: intvk_ratio(member, delta, big_r)?,
        mono_radius: r_k,
        mono_break_found: broken,
    })
}
