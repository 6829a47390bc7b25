use crate::error::{Error, Result};
use crate::grid::RadialGrid;

/// Sampled radial solution: u, u′, w = Δu (minus convention), w′ on a grid.
///
/// The universal currency of the crate. Between nodes, u and w are evaluated
/// by cubic Hermite interpolation from (value, derivative); u′ likewise, with
/// u″ reconstructed from the radial identity u″ = −3u′/r − w.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub w: Vec<f64>,
    pub dw: Vec<f64>,
}

fn hermite(t: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, u: Vec<f64>, du: Vec<f64>, w: Vec<f64>, dw: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        if u.len() != n || du.len() != n || w.len() != n || dw.len() != n {
            return Err(Error::param("profile", "track lengths do not match grid"));
        }
        if grid.origin_included && (du[0] != 0.0 || dw[0] != 0.0) {
            return Err(Error::param("profile", "odd derivatives must vanish at r = 0"));
        }
        Ok(RadialProfile { grid, u, du, w, dw })
    }

    /// Build from closed forms sampled on a grid.
    pub fn from_fns(
        grid: RadialGrid,
        u: impl Fn(f64) -> f64,
        du: impl Fn(f64) -> f64,
        w: impl Fn(f64) -> f64,
        dw: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let us: Vec<f64> = grid.nodes.iter().map(|&r| u(r)).collect();
        let dus: Vec<f64> = grid.nodes.iter().map(|&r| du(r)).collect();
        let ws: Vec<f64> = grid.nodes.iter().map(|&r| w(r)).collect();
        let dws: Vec<f64> = grid.nodes.iter().map(|&r| dw(r)).collect();
        RadialProfile::new(grid, us, dus, ws, dws)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn first_r(&self) -> f64 {
        self.grid.first()
    }

    pub fn last_r(&self) -> f64 {
        self.grid.last()
    }

    fn check_range(&self, r: f64) -> Result<()> {
        let lo = self.first_r();
        let hi = self.last_r();
        if r < lo - 1e-12 * hi.max(1.0) || r > hi * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::OutOfRange { r, lo, hi });
        }
        Ok(())
    }

    pub fn u_at(&self, r: f64) -> Result<f64> {
        self.check_range(r)?;
        let i = self.grid.segment(r);
        let (r0, r1) = (self.grid.nodes[i], self.grid.nodes[i + 1]);
        let h = r1 - r0;
        Ok(hermite((r - r0) / h, h, self.u[i], self.du[i], self.u[i + 1], self.du[i + 1]))
    }

    pub fn du_at(&self, r: f64) -> Result<f64> {
        self.check_range(r)?;
        let i = self.grid.segment(r);
        let (r0, r1) = (self.grid.nodes[i], self.grid.nodes[i + 1]);
        let h = r1 - r0;
        // u″ from the ODE identity; at r = 0 even extension gives u″ = −w/4… not
        // needed: du(0) = 0 and the cubic uses endpoint derivatives only.
        let dd0 = if r0 == 0.0 { 0.0 } else { -3.0 * self.du[i] / r0 - self.w[i] };
        let dd1 = -3.0 * self.du[i + 1] / r1 - self.w[i + 1];
        Ok(hermite((r - r0) / h, h, self.du[i], dd0, self.du[i + 1], dd1))
    }

    pub fn w_at(&self, r: f64) -> Result<f64> {
        self.check_range(r)?;
        let i = self.grid.segment(r);
        let (r0, r1) = (self.grid.nodes[i], self.grid.nodes[i + 1]);
        let h = r1 - r0;
        Ok(hermite((r - r0) / h, h, self.w[i], self.dw[i], self.w[i + 1], self.dw[i + 1]))
    }

    pub fn dw_at(&self, r: f64) -> Result<f64> {
        self.check_range(r)?;
        let i = self.grid.segment(r);
        let (r0, r1) = (self.grid.nodes[i], self.grid.nodes[i + 1]);
        let t = (r - r0) / (r1 - r0);
        Ok(self.dw[i] * (1.0 - t) + self.dw[i + 1] * t)
    }

    /// CSV with header `r,u,du,w,dw`, shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,u,du,w,dw\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.grid.nodes[i], self.u[i], self.du[i], self.w[i], self.dw[i]
            ));
        }
        out
    }
}

/// 2π²∫₀^R V e^{4u} r³ dr on the profile's own grid (per-segment Gauss rule
/// with Hermite-interpolated u). No extrapolation: R must not exceed the last
/// node. The untabulated stub [0, r₀) below an origin-free grid contributes
/// its quartic-order mass 2π²·V(r₀)e^{4u(r₀)}·r₀⁴/4.
pub fn energy_weighted(p: &RadialProfile, r_cap: f64, v: &impl Fn(f64) -> f64) -> Result<f64> {
    if r_cap > p.last_r() * (1.0 + 1e-12) {
        return Err(Error::OutOfRange { r: r_cap, lo: 0.0, hi: p.last_r() });
    }
    if r_cap <= 0.0 {
        return Ok(0.0);
    }
    let r0 = p.first_r();
    let mut total = 0.0;
    if r0 > 0.0 {
        let edge = r_cap.min(r0);
        total += crate::TWO_PI_SQ * v(edge) * (4.0 * p.u[0]).exp() * edge.powi(4) / 4.0;
        if r_cap <= r0 {
            return Ok(total);
        }
    }
    for i in 0..p.len() - 1 {
        let (a, b) = (p.grid.nodes[i], p.grid.nodes[i + 1]);
        if a >= r_cap {
            break;
        }
        let b = b.min(r_cap);
        let c = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut s = 0.0;
        for j in 0..4 {
            let r = c + half * crate::quadrature::GL4_X[j];
            let u = p.u_at(r)?;
            s += crate::quadrature::GL4_W[j] * v(r) * (4.0 * u).exp() * r * r * r;
        }
        total += crate::TWO_PI_SQ * s * half;
    }
    Ok(total)
}

/// `energy_weighted` with V ≡ 1.
pub fn energy(p: &RadialProfile, r_cap: f64) -> Result<f64> {
    energy_weighted(p, r_cap, &|_| 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic_profile() -> RadialProfile {
        // u = r⁴ on [0,2]: du = 4r³, w = −(12r² + 12r²)·…  Δu = −(u″+3u′/r) = −24r²,
        // dw = −48r.
        let g = RadialGrid::uniform(0.0, 2.0, 40).unwrap();
        RadialProfile::from_fns(
            g,
            |r| r.powi(4),
            |r| 4.0 * r.powi(3),
            |r| -24.0 * r * r,
            |r| -48.0 * r,
        )
        .unwrap()
    }

    #[test]
    fn hermite_is_exact_on_cubics() {
        let g = RadialGrid::uniform(0.1, 1.0, 3).unwrap();
        let p = RadialProfile::from_fns(
            g,
            |r| 2.0 * r.powi(3) - r + 0.5,
            |r| 6.0 * r * r - 1.0,
            |_| 0.0,
            |_| 0.0,
        )
        .unwrap();
        for &r in &[0.1f64, 0.37, 0.5, 0.77, 0.99] {
            let exact = 2.0 * r.powi(3) - r + 0.5;
            assert!((p.u_at(r).unwrap() - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolation_error_order() {
        let p = quartic_profile();
        let mut worst = 0.0f64;
        for i in 0..200 {
            let r = 2.0 * (i as f64 + 0.5) / 200.0;
            worst = worst.max((p.u_at(r).unwrap() - r.powi(4)).abs());
        }
        // one segment h = 0.05: Hermite error h⁴·u⁗/384 = 0.05⁴·24/384 ≈ 4e-7
        assert!(worst < 1e-6, "worst = {worst}");
    }

    #[test]
    fn out_of_range_rejected() {
        let p = quartic_profile();
        assert!(p.u_at(2.5).is_err());
        assert!(p.u_at(-0.1).is_err());
    }

    #[test]
    fn energy_of_zero_profile_is_ball_volume() {
        // u ≡ 0 on B₁: 2π²∫₀¹ r³ dr = π²/2, the volume of the unit ball in ℝ⁴.
        let g = RadialGrid::uniform(0.0, 1.0, 32).unwrap();
        let p = RadialProfile::from_fns(g, |_| 0.0, |_| 0.0, |_| 0.0, |_| 0.0).unwrap();
        let e = energy(&p, 1.0).unwrap();
        let exact = std::f64::consts::PI.powi(2) / 2.0;
        assert!((e - exact).abs() < 1e-13, "e = {e}");
    }

    #[test]
    fn energy_refuses_extrapolation() {
        let p = quartic_profile();
        assert!(energy(&p, 3.0).is_err());
    }

    #[test]
    fn energy_partial_cap_consistent() {
        let g = RadialGrid::uniform(0.0, 1.0, 16).unwrap();
        let p = RadialProfile::from_fns(g, |_| 0.0, |_| 0.0, |_| 0.0, |_| 0.0).unwrap();
        // cap strictly inside a segment
        let e = energy(&p, 0.53).unwrap();
        let exact = crate::TWO_PI_SQ * 0.53f64.powi(4) / 4.0;
        assert!((e - exact).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip_precision() {
        let p = quartic_profile();
        let csv = p.to_csv();
        let line = csv.lines().nth(3).unwrap();
        let vals: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(vals[0], p.grid.nodes[2]);
        assert_eq!(vals[1], p.u[2]);
        assert_eq!(vals[3], p.w[2]);
    }
}
