//! Weak-coupling (secular) limit of the generator.
//!
//! For `γ` small against every level spacing of `H`, the slow part of the
//! dynamics lives on block-diagonal density matrices `⊕_ε ρ_ε`, one block per
//! degenerate eigenspace, and obeys
//!
//! `dρ_ε/dt = γ Σ_j Σ_ε' A_j ρ_ε' A_j† - (γ/2) {K_ε, ρ_ε}`
//!
//! with `A_j = V_ε† L_j V_ε'` and `K_ε = V_ε† (Σ L†L) V_ε`. Its slowest
//! non-zero rate captures population transfer between excited levels, which
//! can be slower than the coherence decay seen by the effective Hamiltonian.

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg;
use crate::models::LindbladModel;
use crate::C64;

use super::{eigendecompose, liouvillian::steady_tolerance, GapMethod, GapReport};

/// Largest block-diagonal operator space handled by the dense eigensolve.
pub const MAX_SECULAR_DIM: usize = 4000;

#[derive(Clone, Debug)]
pub struct SecularSpectrum {
    /// Eigenvalues of the secular generator, decreasing real part.
    pub eigenvalues: Vec<C64>,
    pub steady_state_count: usize,
    pub gap: f64,
    /// `Σ_ε d_ε²`.
    pub dim: usize,
    /// Smallest spacing between distinct energies.
    pub min_spacing: f64,
}

/// Dense spectrum of the secular generator.
pub fn secular_spectrum(model: &LindbladModel) -> Result<SecularSpectrum> {
    let eig = eigendecompose(&model.hamiltonian)?;
    let blocks: Vec<Mat<C64>> = eig.eigenspaces.iter().map(|s| s.to_matrix()).collect();
    let sizes: Vec<usize> = blocks.iter().map(|b| b.ncols()).collect();
    let dim: usize = sizes.iter().map(|d| d * d).sum();
    if dim > MAX_SECULAR_DIM {
        return Err(Error::CapacityExceeded {
            dim,
            limit: MAX_SECULAR_DIM,
        });
    }
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for d in &sizes {
        offsets.push(acc);
        acc += d * d;
    }
    let d_all = model.dim();
    let v = Mat::<C64>::from_fn(d_all, d_all, |i, j| {
        let mut col = j;
        for b in &blocks {
            if col < b.ncols() {
                return b[(i, col)];
            }
            col -= b.ncols();
        }
        unreachable!("eigenspaces span the space")
    });
    let starts: Vec<usize> = sizes
        .iter()
        .scan(0, |s, d| {
            let out = *s;
            *s += d;
            Some(out)
        })
        .collect();
    let g = model.gamma;
    let vd = v.adjoint().to_owned();
    let transformed: Vec<Mat<C64>> = model.jumps.iter().map(|l| &vd * l.mul_dense(&v)).collect();
    let k = &vd * model.jump_sum().mul_dense(&v);

    let nb = sizes.len();
    let mut gen = Mat::<C64>::zeros(dim, dim);
    // column index of basis element (a, b) of block q
    for q in 0..nb {
        let dq = sizes[q];
        for b in 0..dq {
            for a in 0..dq {
                let col = offsets[q] + a + b * dq;
                for p in 0..nb {
                    let dp = sizes[p];
                    for aj in &transformed {
                        for dd in 0..dp {
                            let right = aj[(starts[p] + dd, starts[q] + b)].conj();
                            if right == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for c in 0..dp {
                                let left = aj[(starts[p] + c, starts[q] + a)];
                                gen[(offsets[p] + c + dd * dp, col)] += left * right * g;
                            }
                        }
                    }
                }
                for c in 0..dq {
                    gen[(offsets[q] + c + b * dq, col)] -= k[(starts[q] + c, starts[q] + a)] * (0.5 * g);
                    gen[(offsets[q] + a + c * dq, col)] -= k[(starts[q] + b, starts[q] + c)] * (0.5 * g);
                }
            }
        }
    }
    let mut eigenvalues = linalg::eigenvalues(&gen)?;
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re));
    let tol = steady_tolerance(g);
    let steady_state_count = eigenvalues.iter().filter(|l| l.norm() <= tol).count();
    let gap = if steady_state_count > 1 {
        0.0
    } else {
        eigenvalues
            .iter()
            .filter(|l| l.norm() > tol)
            .map(|l| l.re.abs())
            .fold(f64::INFINITY, f64::min)
    };
    let min_spacing = eig
        .energies
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(SecularSpectrum {
        eigenvalues,
        steady_state_count,
        gap: if gap.is_finite() { gap } else { 0.0 },
        dim,
        min_spacing,
    })
}

/// Gap of the secular generator as a report.
pub fn secular_gap(model: &LindbladModel) -> Result<GapReport> {
    let s = secular_spectrum(model)?;
    let mut warnings = Vec::new();
    if s.min_spacing < 10.0 * model.gamma {
        warnings.push(format!(
            "level spacing {:.3e} is not large against γ = {:.3e}",
            s.min_spacing, model.gamma
        ));
    }
    Ok(GapReport {
        gap: Some(s.gap),
        gap_estimate: None,
        q: None,
        method: GapMethod::Secular,
        steady_state_count: Some(s.steady_state_count),
        gamma: model.gamma,
        weak_coupling: Some(s.min_spacing >= 10.0 * model.gamma),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{aklt_delta_h, aklt_jumps, build_aklt, default_delta_h_links};
    use crate::spectral::{liouvillian_spectrum, LiouvillianOptions};
    use crate::spin::{ChainSpec, Spin};

    #[test]
    fn matches_liouvillian_with_degenerate_levels() {
        let chain = ChainSpec::periodic(3, Spin::ONE).unwrap();
        let mut jumps = aklt_jumps(&chain, 1).unwrap();
        jumps.extend(aklt_jumps(&chain, 2).unwrap());
        let m = build_aklt(&chain).unwrap().with_jumps(jumps, 1e-4).unwrap();
        let exact = liouvillian_spectrum(&m, &LiouvillianOptions::default()).unwrap();
        let s = secular_spectrum(&m).unwrap();
        assert_eq!(s.steady_state_count, 1);
        assert!((s.gap - exact.gap).abs() < 1e-3 * exact.gap, "{} vs {}", s.gap, exact.gap);
    }

    #[test]
    fn matches_liouvillian_with_repair_term() {
        let chain = ChainSpec::periodic(3, Spin::ONE).unwrap();
        let dh = aklt_delta_h(&chain, &default_delta_h_links(&chain), 2.0).unwrap();
        let m = build_aklt(&chain)
            .unwrap()
            .with_extra_hamiltonian(&dh)
            .unwrap()
            .with_jumps(aklt_jumps(&chain, 1).unwrap(), 1e-3)
            .unwrap();
        let exact = liouvillian_spectrum(&m, &LiouvillianOptions::default()).unwrap().gap;
        let s = secular_gap(&m).unwrap();
        assert!((s.gap.unwrap() - exact).abs() < 1e-3 * exact);
        assert_eq!(s.weak_coupling, Some(true));
    }

    #[test]
    fn dark_states_give_zero_gap() {
        let chain = ChainSpec::periodic(3, Spin::ONE).unwrap();
        let m = build_aklt(&chain).unwrap().with_jumps(aklt_jumps(&chain, 1).unwrap(), 1e-3).unwrap();
        let s = secular_spectrum(&m).unwrap();
        assert!(s.steady_state_count > 1);
        assert_eq!(s.gap, 0.0);
    }
}
