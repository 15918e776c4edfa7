//! Sparse operators, state vectors and orthonormal subspaces.
//!
//! [`Operator`] is a square complex matrix in compressed sparse row form. It is
//! the common currency for Hamiltonians, jump operators, projectors and
//! superoperators. Entries with modulus below [`DROP_TOLERANCE`] are never
//! stored.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Result};
use crate::C64;

/// Entries with modulus below this value are dropped at construction.
pub const DROP_TOLERANCE: f64 = 1e-14;

/// Tolerance used when the Hermitian hint is verified.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square sparse complex matrix (CSR).
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    hermitian_hint: bool,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
            hermitian_hint: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            cols: (0..dim).collect(),
            vals: vec![ONE; dim],
            hermitian_hint: true,
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_triplets(
            values.len(),
            values.iter().enumerate().map(|(i, &v)| (i, i, C64::new(v, 0.0))),
        )
        .expect("diagonal indices are in range")
        .with_hermitian_hint()
    }

    /// Builds an operator from `(row, col, value)` triplets. Duplicate positions
    /// are summed before the drop tolerance is applied.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(invalid(format!(
                    "entry ({r}, {c}) out of range for dimension {dim}"
                )));
            }
            *rows[r].entry(c).or_insert(ZERO) += v;
        }
        Ok(Self::from_rows(dim, rows.into_iter().map(|r| r.into_iter())))
    }

    fn from_rows<R, I>(dim: usize, rows: R) -> Self
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = (usize, C64)>,
    {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v.norm() >= DROP_TOLERANCE {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        debug_assert_eq!(row_ptr.len(), dim + 1);
        Self {
            dim,
            row_ptr,
            cols,
            vals,
            hermitian_hint: false,
        }
    }

    pub fn from_dense(m: &Mat<C64>) -> Result<Self> {
        check_dim(m.nrows(), m.ncols())?;
        let dim = m.nrows();
        Ok(Self::from_rows(
            dim,
            (0..dim).map(|r| (0..dim).map(move |c| (c, m[(r, c)]))),
        ))
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        check_dim(ket.dim(), bra.dim())?;
        let dim = ket.dim();
        let op = Self::from_rows(
            dim,
            ket.amplitudes().iter().map(|&k| {
                bra.amplitudes()
                    .iter()
                    .enumerate()
                    .map(move |(c, &b)| (c, k * b.conj()))
            }),
        );
        Ok(op)
    }

    /// Orthogonal projector `|v⟩⟨v|` onto a single (normalized) vector.
    pub fn projector_onto(v: &StateVector) -> Self {
        Self::outer(v, v)
            .expect("same vector")
            .with_hermitian_hint()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    /// Sets the Hermitian hint after checking `max |A - A†| <= 1e-12`.
    /// The hint is cleared if the check fails.
    pub fn with_hermitian_hint(mut self) -> Self {
        self.hermitian_hint = self.is_hermitian(HERMITIAN_TOLERANCE);
        self
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// All stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
            .expect("transposed indices stay in range");
        out.hermitian_hint = self.hermitian_hint;
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v)))
            .expect("transposed indices stay in range")
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::from_rows(
            self.dim,
            (0..self.dim).map(|r| self.row(r).map(move |(c, v)| (c, v * s))),
        );
        out.hermitian_hint = self.hermitian_hint && s.im == 0.0;
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: C64) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let rows = (0..self.dim).map(|r| {
            let mut acc: BTreeMap<usize, C64> = self.row(r).collect();
            for (c, v) in other.row(r) {
                *acc.entry(c).or_insert(ZERO) += s * v;
            }
            acc
        });
        let mut out = Self::from_rows(self.dim, rows);
        out.hermitian_hint = self.hermitian_hint && other.hermitian_hint && s.im == 0.0;
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, ONE)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -ONE)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut acc = vec![ZERO; self.dim];
        let mut touched = vec![false; self.dim];
        let mut pattern: Vec<usize> = Vec::new();
        let mut rows = Vec::with_capacity(self.dim);
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !touched[c] {
                        touched[c] = true;
                        pattern.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            pattern.sort_unstable();
            let row: Vec<(usize, C64)> = pattern.iter().map(|&c| (c, acc[c])).collect();
            for &c in &pattern {
                acc[c] = ZERO;
                touched[c] = false;
            }
            pattern.clear();
            rows.push(row);
        }
        Ok(Self::from_rows(self.dim, rows))
    }

    /// Kronecker product `self ⊗ other` (first factor is the most significant index).
    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut rows = Vec::with_capacity(dim);
        for ra in 0..self.dim {
            for rb in 0..other.dim {
                let mut row = Vec::new();
                for (ca, va) in self.row(ra) {
                    for (cb, vb) in other.row(rb) {
                        row.push((ca * other.dim + cb, va * vb));
                    }
                }
                rows.push(row);
            }
        }
        let mut out = Self::from_rows(dim, rows);
        out.hermitian_hint = self.hermitian_hint && other.hermitian_hint;
        out
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Hilbert–Schmidt inner product `Tr(self† other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        let mut s = ZERO;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                s += v.conj() * other.get(r, c);
            }
        }
        s
    }

    pub fn hs_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        match self.try_sub(other) {
            Ok(d) => d.max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.triplets()
            .all(|(r, c, v)| (v - self.get(c, r).conj()).norm() <= tol)
            && self
                .adjoint_pattern_covered()
    }

    // Entries present in A† but absent in A would be missed by the row scan above.
    fn adjoint_pattern_covered(&self) -> bool {
        self.triplets()
            .all(|(r, c, v)| self.get(c, r).norm() > 0.0 || v.norm() <= HERMITIAN_TOLERANCE)
    }

    /// Returns true if every stored entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.dim];
        self.apply_into(x, &mut y);
        y
    }

    /// `y = self * x`.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        for (r, yr) in y.iter_mut().enumerate().take(self.dim) {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            let mut s = ZERO;
            for (c, v) in self.cols[span.clone()].iter().zip(&self.vals[span]) {
                s += v * x[*c];
            }
            *yr = s;
        }
    }

    pub fn apply_state(&self, v: &StateVector) -> Result<StateVector> {
        check_dim(self.dim, v.dim())?;
        Ok(StateVector::from_amplitudes(self.apply(v.amplitudes())))
    }

    /// `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &StateVector) -> C64 {
        let av = self.apply(v.amplitudes());
        v.amplitudes()
            .iter()
            .zip(&av)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Dense `self * m`.
    pub fn mul_dense(&self, m: &Mat<C64>) -> Mat<C64> {
        let mut out = Mat::<C64>::zeros(self.dim, m.ncols());
        for r in 0..self.dim {
            for (k, v) in self.row(r) {
                for j in 0..m.ncols() {
                    out[(r, j)] += v * m[(k, j)];
                }
            }
        }
        out
    }

    /// Restriction to the rows and columns in `indices` (in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> Mat<C64> {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in indices.iter().enumerate() {
            pos[i] = k;
        }
        let mut m = Mat::<C64>::zeros(indices.len(), indices.len());
        for (k, &r) in indices.iter().enumerate() {
            for (c, v) in self.row(r) {
                if pos[c] != usize::MAX {
                    m[(k, pos[c])] = v;
                }
            }
        }
        m
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator dimensions must agree")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.try_sub(rhs).expect("operator dimensions must agree")
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.try_mul(rhs).expect("operator dimensions must agree")
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

/// Sum of operators of equal dimension.
pub fn sum_operators<'a, I>(dim: usize, ops: I) -> Result<Operator>
where
    I: IntoIterator<Item = &'a Operator>,
{
    let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); dim];
    let mut herm = true;
    for op in ops {
        check_dim(dim, op.dim())?;
        herm &= op.hermitian_hint();
        for (r, c, v) in op.triplets() {
            *rows[r].entry(c).or_insert(ZERO) += v;
        }
    }
    let mut out = Operator::from_rows(dim, rows);
    out.hermitian_hint = herm;
    Ok(out)
}

/// Dense complex state vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::from_amplitudes(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_amplitudes(vec![ZERO; dim])
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.amplitudes[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-10
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::from_amplitudes(self.amplitudes.iter().map(|a| a * s).collect())
    }

    pub fn axpy(&mut self, s: C64, other: &Self) {
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += s * b;
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                out.push(a * b);
            }
        }
        Self::from_amplitudes(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|⟨self|other⟩|²` for normalized vectors.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn to_column(&self) -> Mat<C64> {
        Mat::from_fn(self.dim(), 1, |i, _| self.amplitudes[i])
    }
}

/// Orthonormal set of vectors spanning a subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    dim_ambient: usize,
    vectors: Vec<StateVector>,
}

impl SubspaceBasis {
    pub fn empty(dim_ambient: usize) -> Self {
        Self {
            dim_ambient,
            vectors: Vec::new(),
        }
    }

    /// Wraps vectors that are already orthonormal; checks the Gram matrix.
    pub fn from_orthonormal(dim_ambient: usize, vectors: Vec<StateVector>) -> Result<Self> {
        for v in &vectors {
            check_dim(dim_ambient, v.dim())?;
        }
        let basis = Self {
            dim_ambient,
            vectors,
        };
        let err = basis.gram_error();
        if err > 1e-10 {
            return Err(invalid(format!("vectors are not orthonormal (Gram error {err:.2e})")));
        }
        Ok(basis)
    }

    /// Gram–Schmidt (two passes) over `vectors`; directions with residual norm
    /// below `tol` are discarded.
    pub fn orthonormalize(dim_ambient: usize, vectors: &[StateVector], tol: f64) -> Result<Self> {
        let mut out: Vec<StateVector> = Vec::new();
        for v in vectors {
            check_dim(dim_ambient, v.dim())?;
            let mut w = v.clone();
            for _ in 0..2 {
                for u in &out {
                    let p = u.inner(&w);
                    w.axpy(-p, u);
                }
            }
            let n = w.norm();
            if n > tol {
                out.push(w.scaled(C64::new(1.0 / n, 0.0)));
            }
        }
        Ok(Self {
            dim_ambient,
            vectors: out,
        })
    }

    /// Basis from the columns of a dense matrix with orthonormal columns.
    pub fn from_columns(m: &Mat<C64>) -> Self {
        let vectors = (0..m.ncols())
            .map(|j| StateVector::from_amplitudes((0..m.nrows()).map(|i| m[(i, j)]).collect()))
            .collect();
        Self {
            dim_ambient: m.nrows(),
            vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<StateVector> {
        self.vectors
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Basis vectors as columns of a dense `dim_ambient × dim` matrix.
    pub fn to_matrix(&self) -> Mat<C64> {
        Mat::from_fn(self.dim_ambient, self.dim(), |i, j| self.vectors[j].amplitudes()[i])
    }

    pub fn projector(&self) -> Operator {
        let mut m = Mat::<C64>::zeros(self.dim_ambient, self.dim_ambient);
        for v in &self.vectors {
            let a = v.amplitudes();
            for i in 0..self.dim_ambient {
                if a[i] == ZERO {
                    continue;
                }
                for j in 0..self.dim_ambient {
                    m[(i, j)] += a[i] * a[j].conj();
                }
            }
        }
        Operator::from_dense(&m)
            .expect("square")
            .with_hermitian_hint()
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(self.dim_ambient);
        for u in &self.vectors {
            out.axpy(u.inner(v), u);
        }
        out
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn distance(&self, v: &StateVector) -> f64 {
        let p = self.project(v);
        let mut r = v.clone();
        r.axpy(C64::new(-1.0, 0.0), &p);
        r.norm()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                err = err.max((a.inner(b) - target).norm());
            }
        }
        err
    }

    /// Orthonormal basis of the orthogonal complement in the ambient space.
    pub fn complement(&self) -> Self {
        let candidates: Vec<StateVector> = self
            .vectors
            .iter()
            .cloned()
            .chain((0..self.dim_ambient).map(|i| StateVector::basis(self.dim_ambient, i)))
            .collect();
        let full = Self::orthonormalize(self.dim_ambient, &candidates, 1e-8)
            .expect("dimensions agree");
        let vectors = full.vectors.into_iter().skip(self.dim()).collect();
        Self {
            dim_ambient: self.dim_ambient,
            vectors,
        }
    }

    /// Largest sine of the principal angles between two subspaces, or 1 if the
    /// dimensions differ.
    pub fn max_principal_angle_sine(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() || self.dim_ambient != other.dim_ambient {
            return 1.0;
        }
        let a = self
            .vectors
            .iter()
            .map(|v| other.distance(v))
            .fold(0.0, f64::max);
        let b = other
            .vectors
            .iter()
            .map(|v| self.distance(v))
            .fold(0.0, f64::max);
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn drops_tiny_entries() {
        let op = Operator::from_triplets(2, [(0, 0, c(1e-15, 0.0)), (1, 1, c(1.0, 0.0))]).unwrap();
        assert_eq!(op.nnz(), 1);
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let op = Operator::from_triplets(2, [(0, 1, c(1.0, 0.0)), (0, 1, c(0.5, 1.0))]).unwrap();
        assert_eq!(op.get(0, 1), c(1.5, 1.0));
        let cancel = Operator::from_triplets(2, [(0, 1, c(1.0, 0.0)), (0, 1, c(-1.0, 0.0))]).unwrap();
        assert_eq!(cancel.nnz(), 0);
    }

    #[test]
    fn out_of_range_triplet_is_rejected() {
        assert!(Operator::from_triplets(2, [(2, 0, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn product_and_kron() {
        let sx = Operator::from_triplets(2, [(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]).unwrap();
        let sx2 = &sx * &sx;
        assert!(sx2.max_abs_diff(&Operator::identity(2)) < 1e-15);
        let k = sx.kron(&Operator::identity(2));
        assert_eq!(k.dim(), 4);
        assert_eq!(k.get(0, 2), c(1.0, 0.0));
        assert_eq!(k.get(1, 3), c(1.0, 0.0));
        assert_eq!(k.get(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn hermitian_hint_is_verified() {
        let a = Operator::from_triplets(2, [(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, -1.0))])
            .unwrap()
            .with_hermitian_hint();
        assert!(a.hermitian_hint());
        let b = Operator::from_triplets(2, [(0, 1, c(1.0, 0.0))])
            .unwrap()
            .with_hermitian_hint();
        assert!(!b.hermitian_hint());
    }

    #[test]
    fn complement_spans_the_rest() {
        let v = StateVector::from_real(&[1.0, 1.0, 0.0]).normalized().unwrap();
        let b = SubspaceBasis::from_orthonormal(3, vec![v.clone()]).unwrap();
        let comp = b.complement();
        assert_eq!(comp.dim(), 2);
        for u in comp.vectors() {
            assert!(u.inner(&v).norm() < 1e-12);
        }
        assert!(comp.gram_error() < 1e-12);
    }
}
