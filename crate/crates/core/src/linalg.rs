//! Dense vectors and matrices sized for low-dimensional experiments.
//!
//! The point sets used by the checkers live in dimensions up to a few
//! hundred, so plain row-major storage and direct algorithms are the right
//! tool: a cyclic Jacobi sweep for symmetric eigenvalues (machine-precision,
//! robust to clustered spectra) and Gaussian elimination with partial
//! pivoting plus one step of iterative refinement for linear solves.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoreError, Result};
use crate::tol;

/// A finite-dimensional point. Entries are validated to be finite on
/// construction so downstream arithmetic never has to re-check.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<f64>::deserialize(d)?;
        Vector::new(entries).map_err(D::Error::custom)
    }
}

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(CoreError::NonFinite { what: "vector entry" });
        }
        Ok(Vector(entries))
    }

    /// Construction for values produced by our own arithmetic; still guards
    /// against overflow because iterates can blow up legitimately.
    pub(crate) fn from_computed(entries: Vec<f64>) -> Result<Self> {
        Vector::new(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector(self.0.iter().map(|a| c * a).collect())
    }

    /// self + c * other, the combination every iteration scheme needs.
    pub fn axpy(&self, c: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.sub(other).norm()
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Row-major dense matrix. Serializes as a list of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[f64]> = self.data.chunks(self.cols).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CoreError::InvalidParameter {
                what: "matrix data",
                why: format!("expected {} entries, got {}", rows * cols, data.len()),
            });
        }
        if data.iter().any(|e| !e.is_finite()) {
            return Err(CoreError::NonFinite { what: "matrix entry" });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(CoreError::Empty { what: "matrix rows" });
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(CoreError::InvalidParameter {
                what: "matrix rows",
                why: "ragged row lengths".into(),
            });
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        Matrix::new(rows.len(), cols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn matvec(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.cols {
            return Err(CoreError::DimensionMismatch { expected: self.cols, got: x.dim() });
        }
        let out = self
            .data
            .chunks(self.cols)
            .map(|row| row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum())
            .collect();
        Vector::from_computed(out)
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(CoreError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::DimensionMismatch { expected: self.rows * self.cols, got: other.rows * other.cols });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::DimensionMismatch { expected: self.rows * self.cols, got: other.rows * other.cols });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| c * a).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Symmetric part (M + M^T) / 2; monotonicity of a linear map is a
    /// property of this part alone.
    pub fn symmetric_part(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(CoreError::InvalidParameter {
                what: "matrix",
                why: "symmetric part requires a square matrix".into(),
            });
        }
        Ok(self.add(&self.transpose())?.scale(0.5))
    }
}

fn jacobi_eigen(m: &Matrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Matrix>)> {
    if !m.is_square() {
        return Err(CoreError::InvalidParameter {
            what: "matrix",
            why: "eigenvalue sweep requires a square matrix".into(),
        });
    }
    let n = m.rows;
    if n == 0 {
        return Err(CoreError::Empty { what: "matrix" });
    }
    let mut a = m.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let mut vectors = if want_vectors { Some(Matrix::identity(n)) } else { None };
    let scale = a.frobenius_norm().max(1.0);

    let off = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a.get(i, j) * a.get(i, j);
            }
        }
        (2.0 * s).sqrt()
    };

    let mut off_now = off(&a);
    let mut sweeps = 0;
    while off_now > tol::EIGEN_STOP * scale {
        if sweeps >= tol::EIGEN_MAX_SWEEPS {
            return Err(CoreError::EigenNonConvergence { sweeps, off_diagonal: off_now });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol::EIGEN_STOP * scale / (n as f64) {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                // Classic stable rotation: t has the smaller magnitude root.
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                if let Some(v) = vectors.as_mut() {
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        sweeps += 1;
        off_now = off(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i).partial_cmp(&a.get(j, j)).expect("eigenvalues are finite")
    });
    let eig: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = vectors.map(|v| {
        let mut sorted = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for k in 0..n {
                sorted.set(k, dst, v.get(k, src));
            }
        }
        sorted
    });
    Ok((eig, vectors))
}

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations, returned in
/// ascending order. Input symmetry is the caller's contract; the lower
/// triangle is mirrored from the upper to remove rounding asymmetry.
pub fn symmetric_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    jacobi_eigen(m, false).map(|(eig, _)| eig)
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors, returned
/// as the columns of the second component.
pub fn symmetric_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let (eig, vectors) = jacobi_eigen(m, true)?;
    Ok((eig, vectors.expect("vectors requested")))
}

/// Operator 2-norm: sqrt of the largest eigenvalue of M^T M.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    let gram = m.transpose().matmul(m)?;
    let eig = symmetric_eigenvalues(&gram)?;
    let top = eig.last().copied().unwrap_or(0.0).max(0.0);
    Ok(top.sqrt())
}

/// Smallest eigenvalue of the symmetric part of a square matrix. Negative
/// values witness failure of monotonicity for the induced linear map.
pub fn min_symmetric_eigenvalue(m: &Matrix) -> Result<f64> {
    let sym = m.symmetric_part()?;
    let eig = symmetric_eigenvalues(&sym)?;
    Ok(*eig.first().expect("non-empty spectrum"))
}

/// Solve M x = b by Gaussian elimination with partial pivoting, one pass of
/// iterative refinement, and a pivot-ratio condition estimate. Fails loudly
/// on near-singular systems instead of returning garbage.
pub fn solve_linear(m: &Matrix, b: &Vector) -> Result<Vector> {
    if !m.is_square() {
        return Err(CoreError::InvalidParameter {
            what: "matrix",
            why: "linear solve requires a square matrix".into(),
        });
    }
    let n = m.rows;
    if b.dim() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: b.dim() });
    }

    let solve_once = |rhs: &Vector| -> Result<Vector> {
        let mut a = m.clone();
        let mut x: Vec<f64> = rhs.as_slice().to_vec();
        let mut max_pivot: f64 = 0.0;
        let mut min_pivot = f64::INFINITY;
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_val = a.get(col, col).abs();
            for r in (col + 1)..n {
                let v = a.get(r, col).abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = r;
                }
            }
            max_pivot = max_pivot.max(pivot_val);
            min_pivot = min_pivot.min(pivot_val);
            let condition_estimate = if min_pivot > 0.0 { max_pivot / min_pivot } else { f64::INFINITY };
            if pivot_val <= f64::EPSILON * max_pivot.max(1.0) {
                return Err(CoreError::Singular { condition_estimate });
            }
            if pivot_row != col {
                for j in 0..n {
                    let tmp = a.get(col, j);
                    a.set(col, j, a.get(pivot_row, j));
                    a.set(pivot_row, j, tmp);
                }
                x.swap(col, pivot_row);
            }
            for r in (col + 1)..n {
                let f = a.get(r, col) / a.get(col, col);
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a.get(r, j) - f * a.get(col, j);
                    a.set(r, j, v);
                }
                x[r] -= f * x[col];
            }
        }
        for col in (0..n).rev() {
            let mut s = x[col];
            for (j, &xj) in x.iter().enumerate().skip(col + 1) {
                s -= a.get(col, j) * xj;
            }
            x[col] = s / a.get(col, col);
        }
        Vector::from_computed(x)
    };

    let x0 = solve_once(b)?;
    // One refinement pass: r = b - M x, x <- x + M^{-1} r.
    let r = b.sub(&m.matvec(&x0)?);
    let x = match solve_once(&r) {
        Ok(dx) => x0.add(&dx),
        Err(_) => x0,
    };

    let residual = b.sub(&m.matvec(&x)?).norm();
    let bound = tol::EQ_TOL * (m.frobenius_norm() * x.norm() + b.norm()).max(1.0);
    if residual > bound {
        return Err(CoreError::Singular { condition_estimate: residual / bound.max(f64::MIN_POSITIVE) });
    }
    Ok(x)
}
