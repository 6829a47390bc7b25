use crate::error::{Error, Result};

/// Strictly increasing radii r₀ < … < r_N, all ≥ 0.
///
/// `origin_included` means r₀ = 0 and values stored there are even-extension
/// limits (odd-order radial derivatives vanish at the origin).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub origin_included: bool,
}

impl RadialGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::TooCoarse { need: 1, got: 0 });
        }
        if nodes[0] < 0.0 || !nodes[0].is_finite() {
            return Err(Error::InvalidGrid);
        }
        for i in 1..nodes.len() {
            if !(nodes[i] > nodes[i - 1]) || !nodes[i].is_finite() {
                return Err(Error::InvalidGrid);
            }
        }
        let origin_included = nodes[0] == 0.0;
        Ok(RadialGrid { nodes, origin_included })
    }

    /// n+1 equispaced nodes on [a, b].
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) || n == 0 {
            return Err(Error::param("uniform", format!("bad range [{a}, {b}] / n = {n}")));
        }
        let h = (b - a) / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
        nodes[n] = b; // exact endpoint
        RadialGrid::new(nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Index i with nodes[i] <= r < nodes[i+1] (clamped to the last segment).
    pub fn segment(&self, r: f64) -> usize {
        let n = self.nodes.len();
        let i = self.nodes.partition_point(|&x| x <= r);
        i.saturating_sub(1).min(n.saturating_sub(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted() {
        assert!(RadialGrid::new(vec![0.0, 1.0, 0.5]).is_err());
        assert!(RadialGrid::new(vec![-1.0, 0.0]).is_err());
        assert!(RadialGrid::new(vec![0.0, 0.0]).is_err());
        assert!(RadialGrid::new(vec![]).is_err());
    }

    #[test]
    fn origin_flag() {
        let g = RadialGrid::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert!(g.origin_included);
        let g = RadialGrid::new(vec![0.5, 1.0]).unwrap();
        assert!(!g.origin_included);
    }

    #[test]
    fn segment_lookup() {
        let g = RadialGrid::uniform(0.0, 1.0, 4).unwrap();
        assert_eq!(g.segment(0.0), 0);
        assert_eq!(g.segment(0.1), 0);
        assert_eq!(g.segment(0.25), 1);
        assert_eq!(g.segment(0.99), 3);
        assert_eq!(g.segment(1.0), 3);
    }
}
