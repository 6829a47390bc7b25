//! Adaptive Dormand–Prince 5(4) integration of the radial system
//!
//! ```text
//! u″ = −3u′/r − w,      w″ = −3w′/r − V(r) e^{4u},
//! ```
//!
//! started from a quartic Taylor seed just off the removable r = 0
//! singularity. Dense output is the sequence of accepted steps; downstream
//! quadrature reuses that grid directly.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::profile::RadialProfile;
use serde::Serialize;

#[derive(Debug, Clone, Copy)]
pub struct OdeConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Series-start radius; `None` uses 10⁻⁴·min(1, √(8/|β|), e^{−u0}).
    pub r_seed: Option<f64>,
    pub r_max: f64,
    /// Secondary growth abort: u crossing this ceiling.
    pub u_ceiling: f64,
    /// Primary growth abort: w·r² dropping below this (negative) threshold.
    /// For V > 0, w is strictly decreasing, so any w < 0 certifies a
    /// non-integrable trajectory; log-type keeps w·r² → 4 and quadratic-type
    /// keeps w > 0, so the certificate never fires on entire solutions.
    pub growth_wr2: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig {
            rtol: 1e-10,
            atol: 1e-12,
            r_seed: None,
            r_max: 50.0,
            u_ceiling: 50.0,
            growth_wr2: -1.0,
            max_steps: 2_000_000,
        }
    }
}

impl OdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::param("tol", "rtol and atol must be positive"));
        }
        if !(self.r_max > 0.0) || !self.r_max.is_finite() {
            return Err(Error::param("r_max", "must be finite and positive"));
        }
        if !self.u_ceiling.is_finite() {
            return Err(Error::param("u_ceiling", "must be finite"));
        }
        if let Some(rs) = self.r_seed {
            if !(rs > 0.0 && rs < self.r_max) {
                return Err(Error::param("r_seed", "must lie in (0, r_max)"));
            }
        }
        if !(self.growth_wr2 < 0.0) {
            return Err(Error::param("growth_wr2", "must be negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TerminationEvent {
    ReachedRmax,
    GrowthAbort { r_stop: f64 },
    StepFailure { r_stop: f64 },
}

impl TerminationEvent {
    pub fn is_growth(&self) -> bool {
        matches!(self, TerminationEvent::GrowthAbort { .. })
    }
}

/// Default seed radius: small enough that the quartic Taylor remainder sits
/// below atol for every curvature scale in play.
pub fn default_r_seed(u0: f64, beta: f64) -> f64 {
    let s_beta = if beta == 0.0 { f64::INFINITY } else { (8.0 / beta.abs()).sqrt() };
    1e-4 * 1.0_f64.min(s_beta).min((-u0).exp())
}

/// Quartic Taylor expansion of the solution at r_seed:
/// u = u0 − βr²/8 + V0·e^{4u0}·r⁴/192 (and its derived tracks).
pub fn taylor_seed(u0: f64, beta: f64, v0: f64, r_seed: f64) -> Result<[f64; 4]> {
    if !(r_seed > 0.0) {
        return Err(Error::param("r_seed", "must be positive"));
    }
    let c = v0 * (4.0 * u0).exp();
    let r2 = r_seed * r_seed;
    Ok([
        u0 - beta * r2 / 8.0 + c * r2 * r2 / 192.0,
        -beta * r_seed / 4.0 + c * r2 * r_seed / 48.0,
        beta - c * r2 / 8.0,
        -c * r_seed / 4.0,
    ])
}

const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type State = [f64; 4];

fn rhs(r: f64, y: &State, v: &impl Fn(f64) -> f64) -> State {
    [
        y[1],
        -3.0 * y[1] / r - y[2],
        y[3],
        -3.0 * y[3] / r - v(r) * (4.0 * y[0]).exp(),
    ]
}

fn axpyn(y: &State, h: f64, coef: &[f64], ks: &[State]) -> State {
    let mut out = *y;
    for (c, k) in coef.iter().zip(ks) {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrate from the Taylor seed to r_max or a termination event.
///
/// Returns the dense accepted-step profile and the event. Deterministic for
/// fixed inputs; never truncates silently (step underflow and step budget
/// exhaustion both surface as `StepFailure`).
pub fn integrate_ivp(
    u0: f64,
    beta: f64,
    v: impl Fn(f64) -> f64,
    config: &OdeConfig,
) -> Result<(RadialProfile, TerminationEvent)> {
    config.validate()?;
    let r0 = match config.r_seed {
        Some(rs) => rs,
        None => default_r_seed(u0, beta).min(config.r_max * 1e-3),
    };
    let mut y = taylor_seed(u0, beta, v(0.0), r0)?;
    let mut r = r0;

    let mut rs = vec![r];
    let mut track: [Vec<f64>; 4] = [vec![y[0]], vec![y[1]], vec![y[2]], vec![y[3]]];

    let mut h = 0.1 * r0;
    let mut k1 = rhs(r, &y, &v);
    let mut event = None;
    let mut steps = 0usize;

    while event.is_none() {
        if r >= config.r_max * (1.0 - 1e-14) {
            event = Some(TerminationEvent::ReachedRmax);
            break;
        }
        steps += 1;
        if steps > config.max_steps {
            event = Some(TerminationEvent::StepFailure { r_stop: r });
            break;
        }
        h = h.min(config.r_max - r);
        if r + h == r {
            event = Some(TerminationEvent::StepFailure { r_stop: r });
            break;
        }

        let k2 = rhs(r + C[1] * h, &axpyn(&y, h, &A2, &[k1]), &v);
        let k3 = rhs(r + C[2] * h, &axpyn(&y, h, &A3, &[k1, k2]), &v);
        let k4 = rhs(r + C[3] * h, &axpyn(&y, h, &A4, &[k1, k2, k3]), &v);
        let k5 = rhs(r + C[4] * h, &axpyn(&y, h, &A5, &[k1, k2, k3, k4]), &v);
        let k6 = rhs(r + C[5] * h, &axpyn(&y, h, &A6, &[k1, k2, k3, k4, k5]), &v);
        let y_new = axpyn(&y, h, &B5, &[k1, k2, k3, k4, k5, k6]);
        let k7 = rhs(r + h, &y_new, &v);

        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err_sq = 0.0;
        for i in 0..4 {
            let mut de = 0.0;
            for j in 0..7 {
                de += E[j] * ks[j][i];
            }
            de *= h;
            let sc = config.atol + config.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (de / sc) * (de / sc);
        }
        let err = (err_sq / 4.0).sqrt();

        if !err.is_finite() {
            h *= 0.25;
            if h < 1e-14 * r.max(1.0) {
                event = Some(TerminationEvent::StepFailure { r_stop: r });
            }
            continue;
        }

        if err <= 1.0 {
            r += h;
            y = y_new;
            k1 = k7; // FSAL
            rs.push(r);
            for i in 0..4 {
                track[i].push(y[i]);
            }
            if y[0] > config.u_ceiling || y[2] * r * r < config.growth_wr2 {
                event = Some(TerminationEvent::GrowthAbort { r_stop: r });
            }
        }

        let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        h *= fac;
        if h < 1e-14 * r.max(1.0) && event.is_none() {
            event = Some(TerminationEvent::StepFailure { r_stop: r });
        }
    }

    let [u, du, w, dw] = track;
    let profile = RadialProfile::new(RadialGrid::new(rs)?, u, du, w, dw)?;
    Ok((profile, event.unwrap()))
}
