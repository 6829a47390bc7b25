//! Finite-difference radial calculus on sampled values: the minus-convention
//! Laplacian Δu = −(u″ + 3u′/r) on nonuniform grids, and a
//! Richardson-extrapolated biharmonic for off-solution inputs.

use crate::error::{Error, Result};

/// Δu = −(u″ + 3u′/r) by centered 3-point differences (one-sided at the
/// ends). At r = 0 the even extension gives Δu(0) = −4u″(0) = −8a with a the
/// r² coefficient fitted through the first three nodes (assumes an even
/// profile there, as every radial quantity here is). The 3u′/r term divides
/// the O(h²) derivative error by r, so expect reduced accuracy on the first
/// few nodes next to the origin.
pub fn radial_laplacian(nodes: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    if n < 3 {
        return Err(Error::TooCoarse { need: 3, got: n });
    }
    if u.len() != n {
        return Err(Error::param("u", "length does not match grid"));
    }
    let mut w = vec![0.0; n];

    // interior
    for i in 1..n - 1 {
        let hm = nodes[i] - nodes[i - 1];
        let hp = nodes[i + 1] - nodes[i];
        let denom = hp * hm * (hp + hm);
        let d1 = (u[i + 1] * hm * hm + u[i] * (hp * hp - hm * hm) - u[i - 1] * hp * hp) / denom;
        let d2 = 2.0 * (u[i - 1] * hp - u[i] * (hp + hm) + u[i + 1] * hm) / denom;
        w[i] = -(d2 + 3.0 * d1 / nodes[i]);
    }

    // left end
    if nodes[0] == 0.0 {
        // even extension: u ≈ u₀ + a r² + b r⁴ through nodes 1 and 2
        let (r1, r2) = (nodes[1], nodes[2]);
        let (d1, d2) = (u[1] - u[0], u[2] - u[0]);
        let a = (d1 * r2.powi(4) - d2 * r1.powi(4)) / (r1 * r1 * r2.powi(4) - r2 * r2 * r1.powi(4));
        w[0] = -8.0 * a;
    } else {
        let (g1, g2) = newton_quad(nodes[0], nodes[1], nodes[2], u[0], u[1], u[2]);
        let d1 = g1 + g2 * (nodes[0] - nodes[1]);
        w[0] = -(2.0 * g2 + 3.0 * d1 / nodes[0]);
    }

    // right end
    let (g1, g2) = newton_quad(
        nodes[n - 3],
        nodes[n - 2],
        nodes[n - 1],
        u[n - 3],
        u[n - 2],
        u[n - 1],
    );
    let d1 = g1 + g2 * (2.0 * nodes[n - 1] - nodes[n - 3] - nodes[n - 2]);
    w[n - 1] = -(2.0 * g2 + 3.0 * d1 / nodes[n - 1]);
    Ok(w)
}

/// Divided differences of the interpolating parabola: returns
/// (f[r0,r1], f[r0,r1,r2]); p′(r) = f[r0,r1] + f[r0,r1,r2]·(2r − r0 − r1).
fn newton_quad(r0: f64, r1: f64, r2: f64, u0: f64, u1: f64, u2: f64) -> (f64, f64) {
    let f01 = (u1 - u0) / (r1 - r0);
    let f12 = (u2 - u1) / (r2 - r1);
    (f01, (f12 - f01) / (r2 - r0))
}

/// Δ²u at r > 2h for a function input, via two nested centered Laplacians
/// on step h with one Richardson halving (leading error O(h⁴)). The nested
/// stencil divides by h⁴, so roundoff grows like ε/h⁴: keep h around
/// 10⁻²·(1 + r) rather than pushing it small.
pub fn biharmonic_fd(u: &impl Fn(f64) -> f64, r: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || r - 2.0 * h <= 0.0 {
        return Err(Error::param("h", "need 0 < 2h < r"));
    }
    let coarse = bih_once(u, r, h);
    let fine = bih_once(u, r, 0.5 * h);
    Ok((4.0 * fine - coarse) / 3.0)
}

fn lap_once(u: &impl Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    let (um, u0, up) = (u(s - h), u(s), u(s + h));
    -((up - 2.0 * u0 + um) / (h * h) + 3.0 * (up - um) / (2.0 * h * s))
}

fn bih_once(u: &impl Fn(f64) -> f64, r: f64, h: f64) -> f64 {
    let wm = lap_once(u, r - h, h);
    let w0 = lap_once(u, r, h);
    let wp = lap_once(u, r + h, h);
    -((wp - 2.0 * w0 + wm) / (h * h) + 3.0 * (wp - wm) / (2.0 * h * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn needs_three_nodes() {
        assert!(radial_laplacian(&[0.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn laplacian_of_r_squared_is_minus_eight() {
        let nodes: Vec<f64> = (0..=20).map(|i| 0.07 * i as f64).collect();
        let u: Vec<f64> = nodes.iter().map(|r| r * r).collect();
        let w = radial_laplacian(&nodes, &u).unwrap();
        for (i, &wi) in w.iter().enumerate() {
            assert!((wi + 8.0).abs() < 1e-9, "i = {i}: {wi}");
        }
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let nodes: Vec<f64> = (0..=10).map(|i| 0.1 + 0.13 * i as f64).collect();
        let u = vec![3.25; nodes.len()];
        let w = radial_laplacian(&nodes, &u).unwrap();
        assert!(w.iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn laplacian_of_v0_at_origin_is_beta_star() {
        let nodes: Vec<f64> = (0..=40).map(|i| 1e-3 * i as f64).collect();
        let u: Vec<f64> = nodes.iter().map(|&r| families::v0(r)).collect();
        let w = radial_laplacian(&nodes, &u).unwrap();
        assert!(
            (w[0] - families::BETA_STAR).abs() < 1e-8,
            "w(0) = {}, beta* = {}",
            w[0],
            families::BETA_STAR
        );
    }

    #[test]
    fn nonuniform_grid_second_order() {
        // sin(r) on a smoothly stretched grid; halving the mesh should cut
        // the worst interior error by about 4
        let worst_err = |n: usize| -> f64 {
            let nodes: Vec<f64> = (0..=n)
                .map(|i| {
                    let t = i as f64 / n as f64;
                    0.5 + 1.2 * t + 0.03 * (6.0 * t).sin()
                })
                .collect();
            let u: Vec<f64> = nodes.iter().map(|r| r.sin()).collect();
            let w = radial_laplacian(&nodes, &u).unwrap();
            let mut worst = 0.0f64;
            for i in 1..nodes.len() - 1 {
                let r = nodes[i];
                let exact = -(-r.sin() + 3.0 * r.cos() / r);
                worst = worst.max((w[i] - exact).abs());
            }
            worst
        };
        let (e0, e1) = (worst_err(60), worst_err(120));
        assert!(e1 < 1e-3, "{e1}");
        assert!(e1 < 0.35 * e0, "e(60) = {e0}, e(120) = {e1}");
    }

    #[test]
    fn biharmonic_of_quartic() {
        // Δ(r⁴) = −24r², Δ(−24r²) = 192
        let f = |r: f64| r.powi(4);
        for r in [0.5, 1.0, 2.0] {
            let b = biharmonic_fd(&f, r, 0.05).unwrap();
            assert!((b - 192.0).abs() < 1e-6, "r = {r}: {b}");
        }
    }

    #[test]
    fn biharmonic_of_v0_matches_exponential() {
        // v₀ solves Δ²v = e^{4v}
        for r in [0.8, 1.7, 3.0] {
            let b = biharmonic_fd(&families::v0, r, 0.015 * (1.0 + r)).unwrap();
            let exact = (4.0 * families::v0(r)).exp();
            assert!(
                ((b - exact) / exact).abs() < 1e-5,
                "r = {r}: fd {b} vs exact {exact}"
            );
        }
    }
}
