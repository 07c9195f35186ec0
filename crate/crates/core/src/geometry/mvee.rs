use nalgebra::{Matrix2, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{ConvexPolygon, Point2};
use crate::error::{Error, Result};

pub const MVEE_DEFAULT_TOL: f64 = 1e-7;
const MAX_ITERATIONS: usize = 100_000;

/// Ellipse `{center + R(rotation)·(u, v) : (u/s0)² + (v/s1)² ≤ 1}`.
///
/// `semi_axes[0] ≥ semi_axes[1]`; `rotation` is the direction of the major axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub center: Point2,
    pub semi_axes: [f64; 2],
    pub rotation: f64,
}

impl Ellipse {
    /// Value of the defining quadratic form; `≤ 1` inside.
    pub fn level(&self, p: Point2) -> f64 {
        let q = (p - self.center).rotated(-self.rotation);
        (q.x / self.semi_axes[0]).powi(2) + (q.y / self.semi_axes[1]).powi(2)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.semi_axes[0] * self.semi_axes[1]
    }

    /// Builds the ellipse `(x - c)ᵀ A (x - c) ≤ 1` from a positive-definite `A`.
    fn from_shape(center: Point2, a: Matrix2<f64>) -> Self {
        let (p, q, r) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
        // Eigen-decomposition of the symmetric 2×2 form in closed form.
        let theta = 0.5 * (2.0 * q).atan2(p - r);
        let (s, c) = theta.sin_cos();
        let l0 = c * c * p + 2.0 * s * c * q + s * s * r;
        let l1 = s * s * p - 2.0 * s * c * q + c * c * r;
        // The smaller eigenvalue belongs to the major axis.
        if l0 <= l1 {
            Ellipse {
                center,
                semi_axes: [1.0 / l0.sqrt(), 1.0 / l1.sqrt()],
                rotation: theta,
            }
        } else {
            Ellipse {
                center,
                semi_axes: [1.0 / l1.sqrt(), 1.0 / l0.sqrt()],
                rotation: theta + 0.5 * std::f64::consts::PI,
            }
        }
    }
}

/// Minimum-volume enclosing ellipse of a planar point set.
///
/// Khachiyan's multiplicative-weights scheme in the lifted space with the
/// Todd–Yıldırım away steps, stopped when every point satisfies the lifted
/// optimality conditions within relative tolerance `tol`. All input points lie
/// in the result inflated by `1 + tol`.
pub fn mvee(points: &[Point2], tol: f64) -> Result<Ellipse> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if points.len() < 3 || ConvexPolygon::hull(points).is_err() {
        return Err(Error::Degenerate("MVEE needs three affinely independent points".into()));
    }
    // Work relative to the centroid for conditioning.
    let n = points.len();
    let origin = points.iter().fold(Point2::default(), |acc, &p| acc + p) * (1.0 / n as f64);
    let lifted: Vec<Vector3<f64>> = points
        .iter()
        .map(|&p| {
            let q = p - origin;
            Vector3::new(q.x, q.y, 1.0)
        })
        .collect();
    let d1 = 3.0; // lifted dimension d + 1
    let mut u = vec![1.0 / n as f64; n];
    let mut m = vec![0.0; n];
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut x = Matrix3::zeros();
        for (w, q) in u.iter().zip(&lifted) {
            x += q * q.transpose() * *w;
        }
        let xinv = x
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("singular MVEE moment matrix".into()))?;
        for (mj, q) in m.iter_mut().zip(&lifted) {
            *mj = (q.transpose() * xinv * q)[(0, 0)];
        }
        let (jp, &mp) = m
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let (jm, &mm) = m
            .iter()
            .enumerate()
            .filter(|(j, _)| u[*j] > 0.0)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let eps_plus = mp / d1 - 1.0;
        let eps_minus = 1.0 - mm / d1;
        if eps_plus <= tol && eps_minus <= tol {
            converged = true;
            break;
        }
        if eps_plus > eps_minus {
            let beta = (mp - d1) / (d1 * (mp - 1.0));
            for w in u.iter_mut() {
                *w *= 1.0 - beta;
            }
            u[jp] += beta;
        } else {
            let uj = u[jm];
            let beta = ((d1 - mm) / (d1 * (mm - 1.0))).min(uj / (1.0 - uj));
            for w in u.iter_mut() {
                *w *= 1.0 + beta;
            }
            u[jm] -= beta;
            if u[jm] < 0.0 {
                u[jm] = 0.0;
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
            residual: f64::NAN,
        });
    }
    let mut c = Point2::default();
    for (w, q) in u.iter().zip(&lifted) {
        c = c + Point2::new(q.x, q.y) * *w;
    }
    let mut cov = Matrix2::zeros();
    for (w, q) in u.iter().zip(&lifted) {
        let v = nalgebra::Vector2::new(q.x - c.x, q.y - c.y);
        cov += v * v.transpose() * *w;
    }
    // A = (d · cov)⁻¹ with d = 2.
    let shape = (cov * 2.0)
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular MVEE covariance".into()))?;
    Ok(Ellipse::from_shape(c + origin, shape))
}
