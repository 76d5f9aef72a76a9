//! Quadratic losses `g(x) = ½ (x − c)ᵀ Q (x − c)` for symmetric `Q`.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot, norm, sub, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    pub q: Matrix,
    pub center: Vec<f64>,
}

impl Quadratic {
    pub fn new(q: Matrix, center: Vec<f64>) -> Result<Self> {
        if q.rows() != q.cols() {
            return Err(Error::InvalidArgument("Q must be square".into()));
        }
        check_dim(q.rows(), center.len())?;
        if !q.is_symmetric(1e-12) {
            return Err(Error::InvalidArgument("Q must be symmetric".into()));
        }
        Ok(Quadratic { q, center })
    }

    /// `½ ‖x − c‖²`
    pub fn isotropic(center: Vec<f64>) -> Self {
        Quadratic {
            q: Matrix::identity(center.len()),
            center,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let d = sub(x, &self.center);
        Ok(0.5 * dot(&d, &self.q.matvec(&d)?))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        self.q.matvec(&sub(x, &self.center))
    }

    /// Spectral norm of `Q`.
    pub fn lipschitz(&self) -> f64 {
        spectral_radius(&self.q)
    }

    /// Bound on `‖∇g‖` over the ball `‖x‖ ≤ radius`.
    pub fn gradient_bound(&self, radius: f64) -> f64 {
        self.lipschitz() * (radius + norm(&self.center))
    }
}

/// Largest eigenvalue magnitude of a symmetric matrix by power iteration
/// on `Q²`. The estimates `‖Qx‖` increase monotonically; iteration stops
/// once they stall at machine precision.
pub fn spectral_radius(q: &Matrix) -> f64 {
    let n = q.rows();
    if n == 0 {
        return 0.0;
    }
    // Irregular start vector, not orthogonal to any coordinate eigenvector.
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64)
        .collect();
    let mut estimate = 0.0_f64;
    for _ in 0..100_000 {
        let nx = norm(&x);
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = q.matvec(&x).expect("square");
        let next = norm(&y);
        if next - estimate <= 4.0 * f64::EPSILON * next {
            return next;
        }
        estimate = next;
        // Q² has the dominant |λ| on top even when +λ and −λ both occur.
        x = q.matvec(&y).expect("square");
    }
    estimate
}
