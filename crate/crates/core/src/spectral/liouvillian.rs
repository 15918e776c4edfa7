//! The GKSL generator as a superoperator, its matrix-free action, and its
//! spectral gap.
//!
//! Vectorisation stacks columns: `vec(A X B) = (Bᵀ ⊗ A) vec(X)`, so entry
//! `(i, j)` of a density matrix lives at index `i + j·D`.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::models::LindbladModel;
use crate::operator::{sum_operators, Operator};
use crate::C64;

use super::{GapMethod, GapReport};

/// Relative tolerance (in units of γ) below which an eigenvalue counts as zero.
pub const STEADY_REL_TOL: f64 = 1e-8;
/// Absolute floor of the zero-eigenvalue tolerance.
pub const STEADY_ABS_FLOOR: f64 = 1e-12;

/// Zero tolerance for Liouvillian eigenvalues at dissipation rate `gamma`.
pub fn steady_tolerance(gamma: f64) -> f64 {
    (STEADY_REL_TOL * gamma).max(STEADY_ABS_FLOOR)
}

/// Settings for [`liouvillian_spectrum`].
#[derive(Clone, Debug)]
pub struct LiouvillianOptions {
    /// Largest Hilbert dimension handled by a dense superoperator eigensolve.
    pub dense_max_dim: usize,
    /// Krylov subspace size of the iterative path.
    pub krylov_dim: usize,
    /// Number of slowest modes the iterative path converges.
    pub n_wanted: usize,
    pub max_restarts: usize,
    /// Relative Ritz residual accepted as converged.
    pub tol: f64,
    /// Propagation time of the exponential used by the iterative path; `None`
    /// picks `4 / γ` (or `4 / ‖L‖` for γ = 0).
    pub tau: Option<f64>,
    pub seed: u64,
}

impl Default for LiouvillianOptions {
    fn default() -> Self {
        Self {
            dense_max_dim: 32,
            krylov_dim: 40,
            n_wanted: 6,
            max_restarts: 200,
            tol: 1e-9,
            tau: None,
            seed: 0,
        }
    }
}

/// Eigenvalue information of the Liouvillian.
#[derive(Clone, Debug)]
pub struct LiouvillianSpectrum {
    /// Eigenvalues found, sorted by decreasing real part.
    pub eigenvalues: Vec<C64>,
    pub steady_state_count: usize,
    /// `|Re λ|` of the slowest non-zero mode (0 with several steady states).
    pub gap: f64,
    /// Number of non-zero eigenvalues with vanishing real part.
    pub purely_imaginary: usize,
    pub iterative: bool,
    pub max_residual: f64,
}

/// Full superoperator `𝓛` acting on column-stacked density matrices.
pub fn superoperator(model: &LindbladModel) -> Operator {
    let d = model.dim();
    let id = Operator::identity(d);
    let heff = model.no_jump_hamiltonian();
    // -i (I ⊗ Heff) + i (conj(Heff) ⊗ I)
    let left = id.kron(&heff).scale(C64::new(0.0, -1.0));
    let right = heff.conj().kron(&id).scale(C64::new(0.0, 1.0));
    let mut terms = vec![left, right];
    for l in &model.jumps {
        terms.push(l.conj().kron(l).scale_real(model.gamma));
    }
    sum_operators(d * d, &terms).expect("dimensions agree")
}

/// Column-stacked vector of a matrix.
pub fn vectorize(m: &Mat<C64>) -> Vec<C64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn unvectorize(v: &[C64], d: usize) -> Mat<C64> {
    Mat::from_fn(d, d, |i, j| v[i + j * d])
}

/// `ρ A` for sparse `A`.
fn right_mul(rho: &Mat<C64>, a: &Operator) -> Mat<C64> {
    let d = rho.nrows();
    let mut out = Mat::<C64>::zeros(d, a.dim());
    for k in 0..a.dim() {
        for (j, v) in a.row(k) {
            for i in 0..d {
                out[(i, j)] += rho[(i, k)] * v;
            }
        }
    }
    out
}

/// Matrix-free application of the generator.
pub struct LiouvillianAction {
    heff: Operator,
    heff_adj: Operator,
    jumps: Vec<(Operator, Operator)>,
    gamma: f64,
}

impl LiouvillianAction {
    pub fn new(model: &LindbladModel) -> Self {
        let heff = model.no_jump_hamiltonian();
        let heff_adj = heff.adjoint();
        Self {
            heff,
            heff_adj,
            jumps: model.jumps.iter().map(|l| (l.clone(), l.adjoint())).collect(),
            gamma: model.gamma,
        }
    }

    pub fn apply(&self, rho: &Mat<C64>) -> Mat<C64> {
        let mi = C64::new(0.0, -1.0);
        let mut out = self.heff.mul_dense(rho) * faer::Scale(mi);
        out += right_mul(rho, &self.heff_adj) * faer::Scale(-mi);
        for (l, ld) in &self.jumps {
            let lr = l.mul_dense(rho);
            out += right_mul(&lr, ld) * faer::Scale(C64::new(self.gamma, 0.0));
        }
        out
    }

    /// Upper bound on the induced 1-norm of the superoperator.
    pub fn norm_bound(&self) -> f64 {
        let col_norm = |op: &Operator| -> f64 {
            let mut cols = vec![0.0; op.dim()];
            for (_, c, v) in op.triplets() {
                cols[c] += v.norm();
            }
            cols.into_iter().fold(0.0, f64::max)
        };
        let row_norm = |op: &Operator| -> f64 {
            (0..op.dim())
                .map(|r| op.row(r).map(|(_, v)| v.norm()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        let mut b = 2.0 * col_norm(&self.heff).max(row_norm(&self.heff));
        for (l, _) in &self.jumps {
            b += self.gamma * col_norm(l) * row_norm(l).max(col_norm(l));
        }
        b.max(1e-300)
    }
}

/// `𝓛(ρ)`.
pub fn apply_liouvillian(model: &LindbladModel, rho: &Mat<C64>) -> Mat<C64> {
    LiouvillianAction::new(model).apply(rho)
}

fn classify(eigs: &[C64], gamma: f64) -> (usize, f64, usize) {
    let tol = steady_tolerance(gamma);
    let steady = eigs.iter().filter(|l| l.norm() <= tol).count();
    let purely_imag = eigs
        .iter()
        .filter(|l| l.norm() > tol && l.re.abs() <= tol)
        .count();
    let gap = if steady > 1 {
        0.0
    } else {
        eigs.iter()
            .filter(|l| l.norm() > tol)
            .map(|l| l.re.abs())
            .fold(f64::INFINITY, f64::min)
    };
    (steady, gap, purely_imag)
}

/// Liouvillian eigenvalues nearest the imaginary axis, steady-state count and
/// gap. Small systems use a dense eigensolve of the superoperator; larger ones
/// an explicitly restarted Arnoldi iteration on `exp(τ𝓛)`.
pub fn liouvillian_spectrum(model: &LindbladModel, opts: &LiouvillianOptions) -> Result<LiouvillianSpectrum> {
    let d = model.dim();
    let (mut eigs, iterative, residual) = if d <= opts.dense_max_dim {
        let s = superoperator(model).to_dense();
        (linalg::eigenvalues(&s)?, false, 0.0)
    } else {
        let (e, r) = arnoldi_slowest(model, opts)?;
        (e, true, r)
    };
    eigs.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let (steady_state_count, mut gap, purely_imaginary) = classify(&eigs, model.gamma);
    if !gap.is_finite() {
        gap = 0.0;
    }
    Ok(LiouvillianSpectrum {
        eigenvalues: eigs,
        steady_state_count,
        gap,
        purely_imaginary,
        iterative,
        max_residual: residual,
    })
}

/// Liouvillian gap report with default options.
pub fn liouvillian_gap(model: &LindbladModel) -> Result<GapReport> {
    liouvillian_gap_with(model, &LiouvillianOptions::default())
}

pub fn liouvillian_gap_with(model: &LindbladModel, opts: &LiouvillianOptions) -> Result<GapReport> {
    let spec = liouvillian_spectrum(model, opts)?;
    let mut warnings = Vec::new();
    if spec.purely_imaginary > 0 {
        warnings.push(format!(
            "{} non-zero eigenvalue(s) with vanishing real part",
            spec.purely_imaginary
        ));
    }
    if spec.steady_state_count == 0 {
        warnings.push("no zero eigenvalue found within tolerance".into());
    }
    Ok(GapReport {
        gap: Some(spec.gap),
        gap_estimate: None,
        q: None,
        method: GapMethod::FullLiouvillian,
        steady_state_count: Some(spec.steady_state_count),
        gamma: model.gamma,
        weak_coupling: None,
        warnings,
    })
}

/// `exp(τ𝓛) ρ` by a Taylor series on sub-steps of size at most `1/‖𝓛‖`.
fn propagate(action: &LiouvillianAction, rho: &Mat<C64>, tau: f64, norm: f64) -> Mat<C64> {
    let steps = (tau * norm).ceil().max(1.0) as usize;
    let h = tau / steps as f64;
    let mut cur = rho.clone();
    for _ in 0..steps {
        let mut term = cur.clone();
        let mut acc = cur.clone();
        for k in 1..=40 {
            term = action.apply(&term) * faer::Scale(C64::new(h / k as f64, 0.0));
            acc += &term;
            if linalg::max_abs(&term) <= 1e-17 * linalg::max_abs(&acc) {
                break;
            }
        }
        cur = acc;
    }
    cur
}

fn dot(a: &Mat<C64>, b: &Mat<C64>) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)].conj() * b[(i, j)];
        }
    }
    s
}

fn fro(a: &Mat<C64>) -> f64 {
    dot(a, a).re.sqrt()
}

fn arnoldi_slowest(model: &LindbladModel, opts: &LiouvillianOptions) -> Result<(Vec<C64>, f64)> {
    let d = model.dim();
    let action = LiouvillianAction::new(model);
    let norm = action.norm_bound();
    let tau = opts.tau.unwrap_or(if model.gamma > 0.0 { 4.0 / model.gamma } else { 4.0 / norm });
    let n = d * d;
    let m = opts.krylov_dim.min(n).max(2);
    let k_want = opts.n_wanted.min(m - 1).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v0 = Mat::<C64>::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let mut last_residual = f64::INFINITY;
    for iteration in 0..opts.max_restarts {
        let n0 = fro(&v0);
        v0 *= faer::Scale(C64::new(1.0 / n0, 0.0));
        let mut basis: Vec<Mat<C64>> = vec![v0.clone()];
        let mut hess = Mat::<C64>::zeros(m + 1, m);
        let mut size = m;
        for j in 0..m {
            let mut w = propagate(&action, &basis[j], tau, norm);
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    hess[(i, j)] += c;
                    w -= v * faer::Scale(c);
                }
            }
            let h = fro(&w);
            hess[(j + 1, j)] = C64::new(h, 0.0);
            if h <= 1e-13 {
                size = j + 1;
                break;
            }
            basis.push(w * faer::Scale(C64::new(1.0 / h, 0.0)));
        }
        let hm = Mat::<C64>::from_fn(size, size, |i, j| hess[(i, j)]);
        let (ritz, vecs) = linalg::eigen(&hm)?;
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| ritz[b].norm().total_cmp(&ritz[a].norm()));
        let beta = if size < m { 0.0 } else { hess[(m, m - 1)].norm() };
        let take = k_want.min(size);
        let residuals: Vec<f64> = order[..take]
            .iter()
            .map(|&i| {
                let col = vecs.col(i);
                let nrm = (0..size).map(|r| col[r].norm_sqr()).sum::<f64>().sqrt();
                beta * col[size - 1].norm() / nrm / ritz[i].norm().max(1e-300)
            })
            .collect();
        last_residual = residuals.iter().copied().fold(0.0, f64::max);
        let finish = |idx: &[usize]| -> Vec<C64> {
            idx.iter()
                .map(|&i| {
                    let mu = ritz[i];
                    C64::new(mu.norm().ln() / tau, mu.arg() / tau)
                })
                .collect()
        };
        if last_residual <= opts.tol || size < m {
            return Ok((finish(&order[..take]), last_residual));
        }
        // restart from the sum of the wanted Ritz vectors
        let mut next = Mat::<C64>::zeros(d, d);
        for &i in &order[..take] {
            let col = vecs.col(i);
            for (r, b) in basis.iter().take(size).enumerate() {
                next += b * faer::Scale(col[r]);
            }
        }
        v0 = next;
        let _ = iteration;
    }
    Err(Error::SolverFailure {
        reason: "Arnoldi iteration on the propagator did not converge".into(),
        iterations: opts.max_restarts,
        residual: last_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{aklt_ground_state, aklt_jumps, build_aklt};
    use crate::spin::{ChainSpec, Spin};

    fn amplitude_damping(gamma: f64) -> LindbladModel {
        let chain = ChainSpec::open(1, Spin::HALF).unwrap();
        let lower = Operator::from_triplets(2, [(1, 0, C64::new(1.0, 0.0))]).unwrap();
        LindbladModel::new(chain, Operator::zeros(2), vec![lower], gamma).unwrap()
    }

    #[test]
    fn amplitude_damping_gap_is_half() {
        let spec = liouvillian_spectrum(&amplitude_damping(1.0), &LiouvillianOptions::default()).unwrap();
        assert_eq!(spec.steady_state_count, 1);
        assert!((spec.gap - 0.5).abs() < 1e-12);
        // populations relax at rate 1
        assert!(spec.eigenvalues.iter().any(|l| (l.re + 1.0).abs() < 1e-12));
    }

    #[test]
    fn superoperator_matches_matrix_free_action() {
        let chain = ChainSpec::periodic(3, Spin::ONE).unwrap();
        let m = build_aklt(&chain).unwrap().with_jumps(aklt_jumps(&chain, 1).unwrap(), 0.3).unwrap();
        let s = superoperator(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = Mat::<C64>::from_fn(27, 27, |_, _| C64::new(rng.random::<f64>(), rng.random::<f64>()));
        let a = apply_liouvillian(&m, &rho);
        let b = unvectorize(&s.apply(&vectorize(&rho)), 27);
        assert!(linalg::max_abs(&(&a - &b)) < 1e-12);
    }

    #[test]
    fn target_is_steady() {
        let chain = ChainSpec::periodic(4, Spin::ONE).unwrap();
        let m = build_aklt(&chain).unwrap().with_jumps(aklt_jumps(&chain, 1).unwrap(), 0.1).unwrap();
        let psi = aklt_ground_state(&chain).unwrap();
        let rho = psi.vector.to_column() * psi.vector.to_column().adjoint();
        assert!(linalg::max_abs(&apply_liouvillian(&m, &rho)) < 1e-9);
    }

    #[test]
    fn iterative_path_agrees_with_dense() {
        let chain = ChainSpec::open(3, Spin::HALF).unwrap();
        let (sx, _, sz) = crate::spin::spin_matrices(Spin::HALF).unwrap();
        let h = sum_operators(
            8,
            &[
                crate::spin::embed(&sx.kron(&sx), &[1, 2], &chain).unwrap(),
                crate::spin::embed(&sx.kron(&sx), &[2, 3], &chain).unwrap(),
                crate::spin::embed(&sz, &[1], &chain).unwrap().scale_real(0.3),
                crate::spin::embed(&sz, &[2], &chain).unwrap().scale_real(0.7),
            ],
        )
        .unwrap();
        let lower = Operator::from_triplets(2, [(1, 0, C64::new(1.0, 0.0))]).unwrap();
        let jump = crate::spin::embed(&lower, &[3], &chain).unwrap();
        let m = LindbladModel::new(chain, h, vec![jump], 0.5).unwrap();
        let dense = liouvillian_spectrum(&m, &LiouvillianOptions::default()).unwrap();
        let opts = LiouvillianOptions {
            dense_max_dim: 0,
            ..Default::default()
        };
        let iter = liouvillian_spectrum(&m, &opts).unwrap();
        assert!(iter.iterative);
        assert_eq!(iter.steady_state_count, dense.steady_state_count);
        assert!((iter.gap - dense.gap).abs() < 1e-6 * dense.gap.max(1e-3), "{} vs {}", iter.gap, dense.gap);
    }
}
