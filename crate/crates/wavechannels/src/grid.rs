use crate::error::{Error, Result};

/// Uniform radial grid with nodes r_j = r0 + j h, j = 0..n-1.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    r0: f64,
    h: f64,
    n: usize,
}

impl RadialGrid {
    pub fn new(r0: f64, h: f64, n: usize) -> Result<Self> {
        if !(r0 >= 0.0 && r0.is_finite()) {
            return Err(Error::BadGrid {
                reason: format!("inner radius must be finite and >= 0, got {r0}"),
            });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::BadGrid {
                reason: format!("spacing must be finite and > 0, got {h}"),
            });
        }
        if n < 2 {
            return Err(Error::BadGrid {
                reason: format!("point count must be >= 2, got {n}"),
            });
        }
        Ok(RadialGrid { r0, h, n })
    }

    /// Grid from 0 to at least r_max with spacing h (origin node included).
    pub fn origin_to(r_max: f64, h: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::BadGrid {
                reason: format!("outer radius must be finite and > 0, got {r_max}"),
            });
        }
        let n = (r_max / h).ceil() as usize + 1;
        RadialGrid::new(0.0, h, n)
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, j: usize) -> f64 {
        self.r0 + self.h * j as f64
    }

    pub fn last(&self) -> f64 {
        self.node(self.n - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.node(j))
    }

    pub fn starts_at_origin(&self) -> bool {
        self.r0 == 0.0
    }

    /// Largest j with node(j) <= r + tiny slack, clamped to the grid.
    pub fn index_at_or_before(&self, r: f64) -> usize {
        let t = (r - self.r0) / self.h + 1e-9;
        if t <= 0.0 {
            0
        } else {
            (t.floor() as usize).min(self.n - 1)
        }
    }

    /// Grid scaled by lambda: nodes lambda * r_j.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::BadScale { value: lambda });
        }
        RadialGrid::new(self.r0 * lambda, self.h * lambda, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_uniform() {
        let g = RadialGrid::new(1.0, 0.25, 5).unwrap();
        let nodes: Vec<f64> = g.nodes().collect();
        assert_eq!(nodes, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert_eq!(g.last(), 2.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RadialGrid::new(-1.0, 0.1, 4).is_err());
        assert!(RadialGrid::new(0.0, 0.0, 4).is_err());
        assert!(RadialGrid::new(0.0, 0.1, 1).is_err());
    }

    #[test]
    fn origin_to_covers_requested_radius() {
        let g = RadialGrid::origin_to(10.0, 1.0 / 3.0).unwrap();
        assert!(g.starts_at_origin());
        assert!(g.last() >= 10.0);
    }

    #[test]
    fn index_lookup_clamps() {
        let g = RadialGrid::new(0.0, 0.5, 5).unwrap();
        assert_eq!(g.index_at_or_before(-3.0), 0);
        assert_eq!(g.index_at_or_before(1.0), 2);
        assert_eq!(g.index_at_or_before(1.2), 2);
        assert_eq!(g.index_at_or_before(99.0), 4);
    }
}
