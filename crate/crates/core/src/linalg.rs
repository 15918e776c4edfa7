//! Dense linear algebra helpers on top of `faer`.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

fn solver_failure(reason: impl Into<String>) -> Error {
    Error::SolverFailure {
        reason: reason.into(),
        iterations: 0,
        residual: f64::NAN,
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns. Real symmetric input takes a
/// faster real path.
pub fn hermitian_eigen(m: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let n = m.nrows();
    if is_real(m) {
        let r = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
        let e = r
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| solver_failure(format!("symmetric eigensolver: {e:?}")))?;
        let vals = e.S().column_vector().iter().copied().collect();
        let u = e.U();
        let vecs = Mat::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0));
        return Ok((vals, vecs));
    }
    let h = Mat::<C64>::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let e = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| solver_failure(format!("Hermitian eigensolver: {e:?}")))?;
    let vals = e.S().column_vector().iter().map(|v| v.re).collect();
    Ok((vals, e.U().to_owned()))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &Mat<C64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    if is_real(m) {
        let r = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
        return r
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| solver_failure(format!("symmetric eigensolver: {e:?}")));
    }
    let h = Mat::<C64>::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    h.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| solver_failure(format!("Hermitian eigensolver: {e:?}")))
}

/// Eigenvalues of a general complex matrix (unordered).
pub fn eigenvalues(m: &Mat<C64>) -> Result<Vec<C64>> {
    m.eigenvalues()
        .map_err(|e| solver_failure(format!("general eigensolver: {e:?}")))
}

/// Eigenvalues and right eigenvectors of a general complex matrix.
pub fn eigen(m: &Mat<C64>) -> Result<(Vec<C64>, Mat<C64>)> {
    let e = m
        .eigen()
        .map_err(|e| solver_failure(format!("general eigensolver: {e:?}")))?;
    let vals = e.S().column_vector().iter().copied().collect();
    Ok((vals, e.U().to_owned()))
}

pub fn is_real(m: &Mat<C64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].im == 0.0))
}

/// Orthonormal basis (columns) of the null space of a real matrix, using the
/// singular-value cutoff `rel_tol * sigma_max`.
pub fn real_null_space(a: &Mat<f64>, rel_tol: f64) -> Result<Mat<f64>> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return Ok(Mat::<f64>::identity(n, n));
    }
    let svd = a
        .svd()
        .map_err(|e| solver_failure(format!("SVD: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let smax = s.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_tol * smax;
    let rank = s.iter().filter(|&&v| v > cutoff).count();
    let v = svd.V();
    // singular values come sorted in decreasing order
    Ok(Mat::from_fn(n, n - rank, |i, j| v[(i, rank + j)]))
}

/// Orthonormal basis (columns) of the null space of a complex matrix, with
/// the singular-value cutoff `rel_tol * sigma_max`.
pub fn null_space(a: &Mat<C64>, rel_tol: f64) -> Result<Mat<C64>> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return Ok(Mat::<C64>::identity(n, n));
    }
    let svd = a
        .svd()
        .map_err(|e| solver_failure(format!("SVD: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|v| v.re).collect();
    let smax = s.iter().copied().fold(0.0, f64::max);
    let rank = if smax == 0.0 { 0 } else { s.iter().filter(|&&v| v > rel_tol * smax).count() };
    let v = svd.V();
    Ok(Mat::from_fn(n, n - rank, |i, j| v[(i, rank + j)]))
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(m: &Mat<C64>) -> Mat<C64> {
    let n = m.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm1 * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)] * scale);
    let mut result = Mat::<C64>::identity(n, n);
    let mut term = Mat::<C64>::identity(n, n);
    for k in 1..=18 {
        term = &term * &a;
        let inv = 1.0 / k as f64;
        for j in 0..n {
            for i in 0..n {
                term[(i, j)] *= inv;
            }
        }
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Orthonormal basis of the orthogonal complement of the span of the columns
/// of `v` (which must be orthonormal), via a full Householder QR.
pub fn orthogonal_complement(v: &Mat<C64>) -> Mat<C64> {
    let n = v.nrows();
    let k = v.ncols();
    if k == 0 {
        return Mat::<C64>::identity(n, n);
    }
    let q = v.qr().compute_Q();
    Mat::from_fn(n, n - k, |i, j| q[(i, k + j)])
}

/// `v† m v` for a dense `m`.
pub fn compress(m: &Mat<C64>, v: &Mat<C64>) -> Mat<C64> {
    v.adjoint() * m * v
}

/// Solves `a x = b` by partial-pivot LU.
pub fn solve(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    a.partial_piv_lu().solve(b)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &Mat<C64>) -> f64 {
    let mut out: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

/// Groups ascending values into runs whose neighbours differ by at most `tol`.
/// Returns index ranges into the input.
pub fn group_degenerate(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i] - values[i - 1]).abs() > tol {
            if i > start {
                groups.push(start..i);
            }
            start = i;
        }
    }
    groups
}

/// Matrix-vector product with a dense complex matrix.
pub fn matvec(m: &Mat<C64>, x: &[C64]) -> Vec<C64> {
    let mut y = vec![ZERO; m.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == ZERO {
            continue;
        }
        let col = m.col(j);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += col[i] * xj;
        }
    }
    y
}
