//! P1 finite elements for the Neumann Laplacian and a smallest-eigenvalue
//! solver for the pencil `K x = μ M x`.
//!
//! Neumann conditions are natural for the weak form, so assembly runs over all
//! vertices with no boundary terms. The consistent mass matrix keeps the
//! discrete eigenvalues above the exact ones (conforming Rayleigh–Ritz).

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{MatMut, Side};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::mesh::{build_mesh, TriangleMesh};
use crate::spectrum::{Spectrum, SpectrumSource};

/// Shift of the inverse iteration; `K − σM` is positive definite for σ < 0.
pub const SHIFT: f64 = -1.0;
/// Target relative residual of every returned eigenpair.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Subspace iteration cap.
pub const MAX_SWEEPS: usize = 500;
/// Extra block vectors beyond the requested count.
pub const GUARD_VECTORS: usize = 5;

/// Symmetric matrix stored as its upper triangle in coordinate form,
/// sorted by `(row, col)` with unique positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSymmetricMatrix {
    pub dimension: usize,
    pub entries: Vec<(usize, usize, f64)>,
    #[serde(skip)]
    csr: Csr,
}

/// Full (both triangles) compressed rows for products.
#[derive(Debug, Clone, Default, PartialEq)]
struct Csr {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymmetricMatrix {
    /// Sums duplicate positions. Lower-triangle input is mirrored into the upper.
    pub fn from_triplets(dimension: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        for t in triplets.iter_mut() {
            if t.0 > t.1 {
                *t = (t.1, t.0, t.2);
            }
        }
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        let csr = Csr::build(dimension, &entries);
        SparseSymmetricMatrix {
            dimension,
            entries,
            csr,
        }
    }

    /// Sum of all entries of the full matrix.
    pub fn total(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| if r == c { v } else { 2.0 * v })
            .sum()
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let csr = &self.csr;
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in csr.row_ptr[i]..csr.row_ptr[i + 1] {
                s += csr.vals[k] * x[csr.cols[k]];
            }
            *yi = s;
        }
    }

    fn mul_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(x.nrows(), x.ncols());
        for j in 0..x.ncols() {
            let xs = x.column(j);
            let mut col = vec![0.0; x.nrows()];
            self.mul_vec(xs.as_slice(), &mut col);
            y.column_mut(j).copy_from_slice(&col);
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.dimension, self.dimension);
        for &(r, c, v) in &self.entries {
            d[(r, c)] = v;
            d[(c, r)] = v;
        }
        d
    }

    /// `self + s·other` on the union pattern.
    pub fn add_scaled(&self, other: &SparseSymmetricMatrix, s: f64) -> SparseSymmetricMatrix {
        let mut t = self.entries.clone();
        t.extend(other.entries.iter().map(|&(r, c, v)| (r, c, s * v)));
        SparseSymmetricMatrix::from_triplets(self.dimension, t)
    }

    fn to_faer_upper(&self) -> Result<SparseColMat<usize, f64>> {
        let trip: Vec<Triplet<usize, usize, f64>> = self
            .entries
            .iter()
            .map(|&(r, c, v)| Triplet::new(r, c, v))
            .collect();
        SparseColMat::try_new_from_triplets(self.dimension, self.dimension, &trip)
            .map_err(|e| Error::Factorization(format!("{e:?}")))
    }
}

impl Csr {
    fn build(n: usize, upper: &[(usize, usize, f64)]) -> Csr {
        let mut counts = vec![0usize; n + 1];
        for &(r, c, _) in upper {
            counts[r + 1] += 1;
            if r != c {
                counts[c + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let nnz = counts[n];
        let mut cols = vec![0; nnz];
        let mut vals = vec![0.0; nnz];
        let mut next = counts.clone();
        for &(r, c, v) in upper {
            cols[next[r]] = c;
            vals[next[r]] = v;
            next[r] += 1;
            if r != c {
                cols[next[c]] = r;
                vals[next[c]] = v;
                next[c] += 1;
            }
        }
        Csr {
            row_ptr: counts,
            cols,
            vals,
        }
    }
}

/// Stiffness and consistent mass matrices of the P1 discretization.
pub fn assemble(mesh: &TriangleMesh) -> Result<(SparseSymmetricMatrix, SparseSymmetricMatrix)> {
    let nt = mesh.triangles.len();
    let mut kt = Vec::with_capacity(6 * nt);
    let mut mt = Vec::with_capacity(6 * nt);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = mesh.triangle_points(t);
        let area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
        let h = (0..3).map(|e| p[e].dist(p[(e + 1) % 3])).fold(0.0, f64::max);
        if !(area >= 1e-14 * h * h) {
            return Err(Error::DegenerateTriangle { index: t, area });
        }
        // ∇φ_i = R(−90°)·(p_{i+2} − p_{i+1}) / (2·area), up to sign conventions
        // that cancel in the products.
        let e = [p[2] - p[1], p[0] - p[2], p[1] - p[0]];
        for i in 0..3 {
            for j in i..3 {
                let k = e[i].dot(e[j]) / (4.0 * area);
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                kt.push((tri[i], tri[j], k));
                mt.push((tri[i], tri[j], m));
            }
        }
    }
    let n = mesh.vertices.len();
    Ok((
        SparseSymmetricMatrix::from_triplets(n, kt),
        SparseSymmetricMatrix::from_triplets(n, mt),
    ))
}

fn check_count(n: usize, m: usize) -> Result<()> {
    if m == 0 || 2 * m > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ m ≤ dimension/2 (m = {m}, dimension = {n})"
        )));
    }
    Ok(())
}

/// Generalized symmetric eigenproblem on a small dense subspace:
/// returns ascending `θ` and `Z` with `Zᵀ B Z = I`.
fn dense_pencil(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let a = (a + a.transpose()) * 0.5;
    let b = (b + b.transpose()) * 0.5;
    let chol = b
        .cholesky()
        .ok_or_else(|| Error::Factorization("Rayleigh–Ritz mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Factorization("singular Cholesky factor".into()))?;
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let v = DMatrix::from_fn(c.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((vals, linv.transpose() * v))
}

/// `‖Kx − μMx‖ / (‖Kx‖ + ‖Mx‖)`: relative to the shifted operator's scale so
/// the zero mode is measured too.
fn relative_residual(kx: &[f64], mx: &[f64], mu: f64) -> f64 {
    let (mut r, mut nk, mut nm) = (0.0, 0.0, 0.0);
    for (a, b) in kx.iter().zip(mx) {
        r += (a - mu * b).powi(2);
        nk += a * a;
        nm += b * b;
    }
    r.sqrt() / (nk.sqrt() + nm.sqrt())
}

/// The `m` smallest eigenvalues of `K x = μ M x`, zero mode included.
///
/// Shift-invert subspace iteration with `σ = −1`, a sparse Cholesky factor of
/// `K − σM`, `m + 5` block vectors and a Rayleigh–Ritz projection per sweep.
pub fn solve_smallest(k: &SparseSymmetricMatrix, mass: &SparseSymmetricMatrix, m: usize) -> Result<Spectrum> {
    let n = k.dimension;
    check_count(n, m)?;
    let p = (m + GUARD_VECTORS).min(n);
    let shifted = k.add_scaled(mass, -SHIFT).to_faer_upper()?;
    let llt = shifted
        .sp_cholesky(Side::Upper)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x = DMatrix::from_fn(n, p, |_, j| if j == 0 { 1.0 } else { rng.random_range(-1.0..1.0) });
    let mut best = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let mut y = mass.mul_block(&x);
        {
            let slice = y.as_mut_slice();
            let view = MatMut::from_column_major_slice_mut(slice, n, p);
            llt.solve_in_place(view);
        }
        let ky = k.mul_block(&y);
        let my = mass.mul_block(&y);
        let kr = y.tr_mul(&ky);
        let mr = y.tr_mul(&my);
        let (theta, z) = dense_pencil(&kr, &mr)?;
        x = &y * &z;
        let kx = &ky * &z;
        let mx = &my * &z;
        let worst = (0..m)
            .map(|i| relative_residual(kx.column(i).as_slice(), mx.column(i).as_slice(), theta[i]))
            .fold(0.0, f64::max);
        best = best.min(worst);
        if worst <= RESIDUAL_TOL {
            let mut values: Vec<f64> = theta[..m].to_vec();
            // The constant mode sits at round-off level; clamp tiny negatives.
            for v in values.iter_mut() {
                if *v < 0.0 && v.abs() < 1e-10 {
                    *v = 0.0;
                }
            }
            return Ok(Spectrum {
                values,
                mesh_h: 0.0,
                refinement_level: 0,
                solver_residual: worst,
                source: SpectrumSource::Fem { level: 0 },
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_SWEEPS,
        residual: best,
    })
}

/// Dense generalized eigensolver used as an independent check of
/// [`solve_smallest`] on small problems (dimension ≤ 600).
pub fn dense_smallest(k: &SparseSymmetricMatrix, mass: &SparseSymmetricMatrix, m: usize) -> Result<Vec<f64>> {
    let n = k.dimension;
    check_count(n, m)?;
    if n > 600 {
        return Err(Error::InvalidArgument(format!("dense solver limited to 600 unknowns, got {n}")));
    }
    let (vals, _) = dense_pencil(&k.to_dense(), &mass.to_dense())?;
    Ok(vals[..m].to_vec())
}

/// Triangulate, refine `levels` times, assemble and solve.
pub fn neumann_spectrum(poly: &ConvexPolygon, m: usize, levels: usize) -> Result<Spectrum> {
    let mesh = build_mesh(poly, levels);
    let (k, mass) = assemble(&mesh)?;
    let mut s = solve_smallest(&k, &mass, m)?;
    s.mesh_h = mesh.h_max;
    s.refinement_level = levels;
    s.source = SpectrumSource::Fem { level: levels };
    Ok(s)
}
