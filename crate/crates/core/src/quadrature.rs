//! Gauss–Hermite rules for expectations over the standard normal.

use crate::error::{BridgeError, Result};
use crate::linalg::symmetric_tridiagonal_eigen;

/// `E[f(z)] ≈ Σ w_i f(z_i)` for `z ~ N(0, 1)`; weights sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub–Welsch on the Jacobi matrix of the probabilists' Hermite
    /// polynomials (zero diagonal, off-diagonal `sqrt(k)`).
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(BridgeError::InvalidConfig("quadrature order must be ≥ 1".into()));
        }
        let off: Vec<f64> = (1..order).map(|k| (k as f64).sqrt()).collect();
        let eig = symmetric_tridiagonal_eigen(&vec![0.0; order], &off, true)?;
        let mut weights: Vec<f64> = (0..order).map(|n| eig.vector(n)[0].powi(2)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut nodes = eig.values;
        // exact symmetry about zero
        for i in 0..order / 2 {
            let j = order - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -x;
            nodes[j] = x;
            let w = 0.5 * (weights[i] + weights[j]);
            weights[i] = w;
            weights[j] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| w * f(z)).sum()
    }
}

/// Tensor-product rule over `dim` independent standard normals.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGaussHermite {
    pub dim: usize,
    /// Flat, `points[i*dim + a]`.
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TensorGaussHermite {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        let rule = GaussHermite::new(order)?;
        let count = order.pow(dim as u32);
        let mut points = Vec::with_capacity(count * dim);
        let mut weights = Vec::with_capacity(count);
        for idx in 0..count {
            let mut rem = idx;
            let mut w = 1.0;
            for _ in 0..dim {
                let i = rem % order;
                rem /= order;
                points.push(rule.nodes[i]);
                w *= rule.weights[i];
            }
            weights.push(w);
        }
        Ok(Self { dim, points, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_moments_exact() {
        let gh = GaussHermite::new(10).unwrap();
        // E[z^{2k}] = (2k − 1)!!, exact up to degree 19
        let mut dbl_fact = 1.0;
        for k in 0..10 {
            if k > 0 {
                dbl_fact *= (2 * k - 1) as f64;
            }
            let m = gh.expect(|z| z.powi(2 * k as i32));
            assert!((m - dbl_fact).abs() < 1e-10 * dbl_fact, "k = {k}");
            assert!(gh.expect(|z| z.powi(2 * k as i32 + 1)).abs() < 1e-10 * dbl_fact.max(1.0));
        }
    }

    #[test]
    fn known_three_point_rule() {
        let gh = GaussHermite::new(3).unwrap();
        let s3 = 3f64.sqrt();
        assert!((gh.nodes[2] - s3).abs() < 1e-14);
        assert!((gh.weights[1] - 2.0 / 3.0).abs() < 1e-14);
        assert!((gh.weights[0] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn smooth_expectation() {
        // E[cos z] = e^{−1/2}
        let gh = GaussHermite::new(21).unwrap();
        assert!((gh.expect(f64::cos) - (-0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn tensor_rule() {
        let t = TensorGaussHermite::new(2, 9).unwrap();
        assert_eq!(t.len(), 81);
        let total: f64 = t.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        // E[x² y²] = 1, E[x² + y⁴] = 4
        let m: f64 = (0..t.len()).map(|i| t.weights[i] * (t.point(i)[0] * t.point(i)[1]).powi(2)).sum();
        assert!((m - 1.0).abs() < 1e-12);
        let m: f64 = (0..t.len()).map(|i| t.weights[i] * (t.point(i)[0].powi(2) + t.point(i)[1].powi(4))).sum();
        assert!((m - 4.0).abs() < 1e-12);
        assert!(GaussHermite::new(0).is_err());
    }
}
