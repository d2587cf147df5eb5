//! Quadrature rules for expectations over a standard normal variable.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes `z_i` and weights `w_i` with `sum w_i f(z_i) ≈ E[f(Z)]`, `Z ~ N(0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl NormalRule {
    /// Gauss–Hermite (probabilists') rule by Golub–Welsch.
    pub fn gauss_hermite(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("Gauss-Hermite needs at least 2 nodes, got {n}")));
        }
        let jacobi = DMatrix::from_fn(n, n, |r, c| {
            if r.abs_diff(c) == 1 {
                (r.max(c) as f64).sqrt()
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // the rule is symmetric about 0; enforce it exactly
        let sym: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let (lo, hi) = (pairs[i], pairs[n - 1 - i]);
                (0.5 * (lo.0 - hi.0), 0.5 * (lo.1 + hi.1))
            })
            .collect();
        Ok(Self::normalized(sym))
    }

    /// Equal spacing `h` on `[-half_width, half_width]` with Gaussian weights.
    /// Converges faster than Gauss–Hermite for integrands with kinks or
    /// rapid oscillation in `z`.
    pub fn trapezoid(spacing: f64, half_width: f64) -> Result<Self> {
        if !(spacing > 0.0 && half_width > 0.0 && spacing.is_finite() && half_width.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad equal-spaced rule h={spacing}, L={half_width}")));
        }
        let half = (half_width / spacing).floor() as i64;
        if half < 1 {
            return Err(Error::InvalidArgument("equal-spaced rule needs at least 2 nodes".into()));
        }
        let pairs = (-half..=half)
            .map(|k| {
                let z = k as f64 * spacing;
                (z, (-0.5 * z * z).exp())
            })
            .collect();
        Ok(Self::normalized(pairs))
    }

    fn normalized(pairs: Vec<(f64, f64)>) -> Self {
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / total).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| w * f(*z)).sum()
    }
}
