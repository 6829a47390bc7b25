//! Composite 4-point Gauss–Legendre quadrature, plus cumulative tables that
//! support partial-interval evaluation (needed by the nested Poisson/Green
//! solves, where inner integrals must be evaluated at outer quadrature nodes).

/// Gauss–Legendre nodes on [-1, 1].
pub const GL4_X: [f64; 4] = [
    -0.8611363115940526,
    -0.33998104358485626,
    0.33998104358485626,
    0.8611363115940526,
];
pub const GL4_W: [f64; 4] = [
    0.34785484513745385,
    0.6521451548625461,
    0.6521451548625461,
    0.34785484513745385,
];

/// ∫_a^b f over a single interval (exact through degree 7).
pub fn gl4(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for j in 0..4 {
        s += GL4_W[j] * f(c + h * GL4_X[j]);
    }
    s * h
}

/// Composite rule with n uniform subintervals.
pub fn composite(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n > 0 && b >= a);
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        s += gl4(f, a + h * i as f64, a + h * (i + 1) as f64);
    }
    s
}

/// Composite rule with n geometrically spaced subintervals (for integrands
/// living on widely separated scales). Requires 0 < a < b.
pub fn composite_log(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n > 0 && a > 0.0 && b > a);
    let q = (b / a).powf(1.0 / n as f64);
    let mut s = 0.0;
    let mut lo = a;
    for i in 0..n {
        let hi = if i + 1 == n { b } else { lo * q };
        s += gl4(f, lo, hi);
        lo = hi;
    }
    s
}

/// Cumulative ∫_{x₀}^{x} f over a fixed node set, evaluable at any x in range
/// (table value at the enclosing node plus a partial GL4 over the remainder).
pub struct Cumulative<F: Fn(f64) -> f64> {
    f: F,
    nodes: Vec<f64>,
    acc: Vec<f64>,
}

impl<F: Fn(f64) -> f64> Cumulative<F> {
    pub fn build(f: F, nodes: Vec<f64>) -> Self {
        assert!(nodes.len() >= 2);
        let mut acc = Vec::with_capacity(nodes.len());
        acc.push(0.0);
        for i in 1..nodes.len() {
            let s = gl4(&f, nodes[i - 1], nodes[i]);
            let prev = acc[i - 1];
            acc.push(prev + s);
        }
        Cumulative { f, nodes, acc }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn at_node(&self, i: usize) -> f64 {
        self.acc[i]
    }

    pub fn total(&self) -> f64 {
        *self.acc.last().unwrap()
    }

    /// ∫_{x₀}^{x} f; x is clamped to the covered range.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.nodes[0], *self.nodes.last().unwrap());
        let i = self.nodes.partition_point(|&n| n <= x).saturating_sub(1);
        let i = i.min(self.nodes.len() - 2);
        if x == self.nodes[i] {
            return self.acc[i];
        }
        self.acc[i] + gl4(&self.f, self.nodes[i], x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl4_exact_degree7() {
        let v = gl4(&|x: f64| x.powi(7), 0.0, 1.0);
        assert!((v - 0.125).abs() < 1e-15);
        let v = gl4(&|x: f64| 3.0 * x * x, -1.0, 2.0);
        assert!((v - 9.0).abs() < 1e-13);
    }

    #[test]
    fn composite_converges() {
        // ∫₀^π sin = 2
        let v = composite(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 16);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_composite_handles_scale_spread() {
        // ∫_{1e-6}^{1} dx/x = ln(1e6)
        let v = composite_log(&|x: f64| 1.0 / x, 1e-6, 1.0, 200);
        assert!((v - 6.0 * 10f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn cumulative_partial_matches_direct() {
        let nodes: Vec<f64> = (0..=50).map(|i| i as f64 * 0.02).collect();
        let c = Cumulative::build(|x: f64| (2.0 * x).cos(), nodes);
        for &x in &[0.013f64, 0.5, 0.517, 0.999, 1.0] {
            let exact = 0.5 * (2.0 * x).sin();
            assert!((c.eval(x) - exact).abs() < 1e-14, "x = {x}");
        }
    }
}
