//! Spectral analysis: Hamiltonian eigenspaces, the hot/cold split of a link,
//! the overlap `Q` and gap estimate, the effective non-Hermitian Hamiltonian,
//! dark states, and the Liouvillian gap.

pub mod liouvillian;
pub mod secular;
pub mod sector;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::models::{LindbladModel, TargetState};
use crate::operator::{Operator, StateVector, SubspaceBasis};
use crate::spin::{embed, reduced_density_matrix, total_spin_squared, ChainSpec};
use crate::C64;

pub use liouvillian::{
    apply_liouvillian, liouvillian_gap, liouvillian_gap_with, liouvillian_spectrum, superoperator,
    unvectorize, vectorize, LiouvillianOptions, LiouvillianSpectrum,
};
pub use secular::{secular_gap, secular_spectrum, SecularSpectrum};
pub use sector::{symmetry_sectors, Sector};

/// Relative tolerance (times `max |ε|`) for grouping degenerate eigenvalues.
pub const DEGENERACY_REL_TOL: f64 = 1e-9;
/// Eigenvalues of a reduced density matrix above this count towards its rank.
pub const RANK_TOL: f64 = 1e-10;
/// Hot weight at or below which an eigenstate counts as dark.
pub const DARK_TOL: f64 = 1e-8;

/// How a gap value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethod {
    FullLiouvillian,
    EffectiveHamiltonian,
    TrajectoryFit,
    /// Weak-coupling generator on block-diagonal density matrices.
    Secular,
    /// Only the first-order estimate `Qγ/2` was computed.
    Estimate,
}

/// Result of a gap computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub gap: Option<f64>,
    pub gap_estimate: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    pub method: GapMethod,
    pub steady_state_count: Option<usize>,
    pub gamma: f64,
    /// Whether `γ` is well below `N / d^N`.
    pub weak_coupling: Option<bool>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl GapReport {
    /// `Δ ≤ Δ_est + 1e-9` when both are present.
    pub fn satisfies_bound(&self) -> Option<bool> {
        Some(self.gap? <= self.gap_estimate? + 1e-9)
    }
}

/// Hamiltonian eigenvalues grouped into degenerate eigenspaces.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// One energy per eigenspace, ascending.
    pub energies: Vec<f64>,
    pub eigenspaces: Vec<SubspaceBasis>,
}

impl EigenDecomposition {
    /// `max |H - Σ ε P_ε|`.
    pub fn reconstruction_error(&self, h: &Operator) -> f64 {
        let mut acc = Mat::<C64>::zeros(h.dim(), h.dim());
        for (e, space) in self.energies.iter().zip(&self.eigenspaces) {
            let v = space.to_matrix();
            acc += (&v * v.adjoint()) * faer::Scale(C64::new(*e, 0.0));
        }
        linalg::max_abs(&(&h.to_dense() - &acc))
    }
}

fn degeneracy_tol(values: &[f64]) -> f64 {
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    (DEGENERACY_REL_TOL * scale).max(1e-12)
}

/// Dense eigendecomposition of a Hermitian operator.
pub fn eigendecompose(h: &Operator) -> Result<EigenDecomposition> {
    let (vals, vecs) = linalg::hermitian_eigen(&h.to_dense())?;
    let tol = degeneracy_tol(&vals);
    let mut energies = Vec::new();
    let mut eigenspaces = Vec::new();
    for g in linalg::group_degenerate(&vals, tol) {
        let mean = vals[g.clone()].iter().sum::<f64>() / g.len() as f64;
        energies.push(mean);
        let cols = Mat::from_fn(h.dim(), g.len(), |i, j| vecs[(i, g.start + j)]);
        eigenspaces.push(SubspaceBasis::from_columns(&cols));
    }
    Ok(EigenDecomposition {
        eigenvalues: vals,
        energies,
        eigenspaces,
    })
}

/// Cold (support) and hot (kernel) subspaces of the target's reduced state on
/// a link, as bases of the `d²`-dimensional link space.
pub fn hot_cold_split(target: &TargetState, link: usize, chain: &ChainSpec) -> Result<(SubspaceBasis, SubspaceBasis)> {
    check_dim(chain.dim(), target.dim())?;
    let sites = chain.link_sites(link)?;
    let rho = reduced_density_matrix(&target.vector, &sites, chain)?;
    let (vals, vecs) = linalg::hermitian_eigen(&rho)?;
    let d2 = rho.nrows();
    let cold_idx: Vec<usize> = (0..d2).filter(|&k| vals[k] > RANK_TOL).collect();
    let hot_idx: Vec<usize> = (0..d2).filter(|&k| vals[k] <= RANK_TOL).collect();
    let pick = |idx: &[usize]| SubspaceBasis::from_columns(&Mat::from_fn(d2, idx.len(), |i, j| vecs[(i, idx[j])]));
    Ok((pick(&cold_idx), pick(&hot_idx)))
}

/// Hot-subspace projector of a link embedded into the chain.
pub fn embedded_hot_projector(hot: &SubspaceBasis, link: usize, chain: &ChainSpec) -> Result<Operator> {
    embed(&hot.projector(), &chain.link_sites(link)?, chain)
}

/// Per-eigenspace data inside one symmetry sector.
struct SectorLevel {
    energy: f64,
    /// Eigenvalues of the hot projector compressed into the eigenspace (with
    /// the target direction removed), ascending.
    hot_eigenvalues: Vec<f64>,
    /// Matching eigenvectors in the ambient space (only when requested).
    vectors: Vec<StateVector>,
}

/// Diagonalises `h` sector by sector and, in each eigenspace, the compression
/// of `p_hot`. The target direction is removed from its own eigenspace.
fn levels(
    chain: &ChainSpec,
    h: &Operator,
    p_hot: &Operator,
    target: &TargetState,
    want_vectors: bool,
    force_full: bool,
) -> Result<Vec<SectorLevel>> {
    let (sectors, target_sector) = if force_full {
        (vec![Sector::full(chain.dim())], Some(0))
    } else {
        symmetry_sectors(chain, &[h, p_hot], Some(&target.vector))?
    };
    let mut out = Vec::new();
    for (si, sector) in sectors.iter().enumerate() {
        let hb = sector.compress(h);
        let pb = sector.compress(p_hot);
        let (vals, vecs) = linalg::hermitian_eigen(&hb)?;
        let tcoords = (Some(si) == target_sector).then(|| sector.restrict(&target.vector));
        let tol = degeneracy_tol(&vals);
        for g in linalg::group_degenerate(&vals, tol) {
            let energy = vals[g.clone()].iter().sum::<f64>() / g.len() as f64;
            let mut u = Mat::from_fn(sector.dim(), g.len(), |i, j| vecs[(i, g.start + j)]);
            if let Some(t) = &tcoords {
                if (energy - target.energy).abs() <= tol.max(1e-9) {
                    // coordinates of the target inside this eigenspace
                    let tc = Mat::from_fn(g.len(), 1, |j, _| (0..sector.dim()).map(|i| u[(i, j)].conj() * t[i]).sum::<C64>());
                    let w: f64 = (0..g.len()).map(|j| tc[(j, 0)].norm_sqr()).sum();
                    if w > 0.5 {
                        let tc = tc * faer::Scale(C64::new(1.0 / w.sqrt(), 0.0));
                        let comp = linalg::orthogonal_complement(&tc);
                        u = &u * &comp;
                    }
                }
            }
            if u.ncols() == 0 {
                continue;
            }
            let c = linalg::compress(&pb, &u);
            let (qv, qvecs) = linalg::hermitian_eigen(&c)?;
            let vectors = if want_vectors {
                let amb = &u * &qvecs;
                (0..amb.ncols())
                    .map(|j| {
                        let x: Vec<C64> = (0..amb.nrows()).map(|i| amb[(i, j)]).collect();
                        sector.extend(&x)
                    })
                    .collect()
            } else {
                Vec::new()
            };
            out.push(SectorLevel {
                energy,
                hot_eigenvalues: qv,
                vectors,
            });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

/// `(ε, q_ε)` with levels from different sectors merged by energy.
fn q_table(levels: &[SectorLevel]) -> Vec<(f64, f64)> {
    let energies: Vec<f64> = levels.iter().map(|l| l.energy).collect();
    let tol = degeneracy_tol(&energies);
    let mut table: Vec<(f64, f64)> = Vec::new();
    for l in levels {
        let q = l.hot_eigenvalues.first().copied().unwrap_or(f64::INFINITY).max(0.0);
        match table.last_mut() {
            Some((e, qq)) if (l.energy - *e).abs() <= tol => *qq = qq.min(q),
            _ => table.push((l.energy, q)),
        }
    }
    table
}

/// `Σ L†L` when the model has jumps, otherwise the hot projector of the
/// target's reduced state on `link`. The two agree whenever the jumps cool
/// exactly the hot subspace; on very short chains the reduced state can have
/// a larger kernel than the jumps address, and the rate then follows `Σ L†L`.
fn estimate_projector(model: &LindbladModel, target: &TargetState, link: usize) -> Result<Operator> {
    if model.jumps.is_empty() {
        let (_, hot) = hot_cold_split(target, link, &model.chain)?;
        embedded_hot_projector(&hot, link, &model.chain)
    } else {
        validated_hot_projector(model, target)
    }
}

fn weak_coupling(chain: &ChainSpec, gamma: f64) -> bool {
    gamma <= 0.1 * chain.n_sites as f64 / chain.dim() as f64
}

/// `Q = min_ε q_ε` over excited eigenspaces and `Δ_est = Qγ/2`. `link` selects
/// the hot/cold split used when the model carries no jumps.
pub fn gap_estimate(model: &LindbladModel, target: &TargetState, link: usize) -> Result<GapReport> {
    target.check_eigenstate(&model.hamiltonian, 1e-9)?;
    let p = estimate_projector(model, target, link)?;
    let lv = levels(&model.chain, &model.hamiltonian, &p, target, false, false)?;
    let table = q_table(&lv);
    let q = table.iter().map(|&(_, q)| q).fold(f64::INFINITY, f64::min);
    if !q.is_finite() {
        return Err(Error::InsufficientData("no excited eigenspace".into()));
    }
    // eigenvalues of a projector; rounding can leave -0 or -1e-17
    let q = if q <= 0.0 { 0.0 } else { q };
    Ok(GapReport {
        gap: None,
        gap_estimate: Some(0.5 * q * model.gamma),
        q: Some(q),
        method: GapMethod::Estimate,
        steady_state_count: None,
        gamma: model.gamma,
        weak_coupling: Some(weak_coupling(&model.chain, model.gamma)),
        warnings: Vec::new(),
    })
}

/// Row of the `(ε, q_ε)` table and its binned statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QBin {
    pub lo: f64,
    pub hi: f64,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QProfile {
    /// `(ε, q_ε)` for every distinct energy, the target's own direction
    /// excluded (its level appears only if other states share the energy).
    pub rows: Vec<(f64, f64)>,
    pub bins: Vec<QBin>,
    /// `q` of the target state itself (zero for a valid target).
    pub target_q: f64,
}

/// Full `(ε, q_ε)` table with bin means and standard deviations.
pub fn q_energy_profile(model: &LindbladModel, target: &TargetState, link: usize, bin_width: f64) -> Result<QProfile> {
    if !(bin_width > 0.0) {
        return Err(crate::error::invalid("bin width must be positive"));
    }
    target.check_eigenstate(&model.hamiltonian, 1e-9)?;
    let p = estimate_projector(model, target, link)?;
    let lv = levels(&model.chain, &model.hamiltonian, &p, target, false, false)?;
    let rows = q_table(&lv);
    let target_q = p.expectation(&target.vector).re;
    let mut bins: Vec<QBin> = Vec::new();
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        let start = (first.0 / bin_width).floor() * bin_width;
        let nb = (((last.0 - start) / bin_width).floor() as usize) + 1;
        for b in 0..nb {
            let lo = start + b as f64 * bin_width;
            let hi = lo + bin_width;
            let qs: Vec<f64> = rows
                .iter()
                .filter(|(e, _)| *e >= lo && (*e < hi || (b + 1 == nb && *e <= hi)))
                .map(|&(_, q)| q)
                .collect();
            if qs.is_empty() {
                continue;
            }
            let mean = qs.iter().sum::<f64>() / qs.len() as f64;
            let var = qs.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / qs.len() as f64;
            bins.push(QBin {
                lo,
                hi,
                mean,
                std: var.sqrt(),
                count: qs.len(),
            });
        }
    }
    Ok(QProfile { rows, bins, target_q })
}

/// Decay rates of the effective Hamiltonian together with their first-order
/// values.
#[derive(Clone, Debug)]
pub struct EffectiveSpectrum {
    /// Eigenvalues of `H - ε⊕ - i(γ/2)P_hot` on the excited subspace.
    pub eigenvalues: Vec<C64>,
    /// `-Im λ`, ascending.
    pub rates: Vec<f64>,
    /// `(γ/2)` times every eigenvalue of `P_hot` compressed into each
    /// eigenspace of `H`, ascending.
    pub first_order_rates: Vec<f64>,
    pub sector_dims: Vec<usize>,
}

fn validated_hot_projector(model: &LindbladModel, target: &TargetState) -> Result<Operator> {
    let p = model.hot_projector()?;
    let leak = p.apply_state(&target.vector)?.norm();
    if leak > 1e-9 {
        return Err(Error::IncompatibleJumps(format!(
            "jump operators do not annihilate the target (‖P_hot ψ‖ = {leak:.2e})"
        )));
    }
    Ok(p)
}

/// Spectrum of the effective non-Hermitian Hamiltonian restricted to the
/// excited subspace (the orthogonal complement of the target).
pub fn effective_hamiltonian_spectrum(model: &LindbladModel, target: &TargetState) -> Result<EffectiveSpectrum> {
    target.check_eigenstate(&model.hamiltonian, 1e-9)?;
    let p = validated_hot_projector(model, target)?;
    let h = &model.hamiltonian;
    let (sectors, target_sector) = symmetry_sectors(&model.chain, &[h, &p], Some(&target.vector))?;
    let g = model.gamma;
    // shift that moves the target eigenvalue far below every physical rate
    let big = 1e3 * (1.0 + g + h.max_abs() * h.dim() as f64);
    let mut eigenvalues = Vec::new();
    let mut sector_dims = Vec::new();
    for (si, sector) in sectors.iter().enumerate() {
        let k = sector.dim();
        sector_dims.push(k);
        let hb = sector.compress(h);
        let pb = sector.compress(&p);
        let mut m = Mat::<C64>::from_fn(k, k, |i, j| hb[(i, j)] + pb[(i, j)] * C64::new(0.0, -0.5 * g));
        for i in 0..k {
            m[(i, i)] -= C64::new(target.energy, 0.0);
        }
        let in_target = Some(si) == target_sector;
        if in_target {
            let t = sector.restrict(&target.vector);
            for i in 0..k {
                for j in 0..k {
                    m[(i, j)] += C64::new(0.0, -big) * t[i] * t[j].conj();
                }
            }
        }
        let mut vals = linalg::eigenvalues(&m)?;
        if in_target {
            let pos = vals
                .iter()
                .enumerate()
                .max_by(|a, b| (-a.1.im).total_cmp(&-b.1.im))
                .map(|(i, _)| i)
                .expect("non-empty sector");
            vals.remove(pos);
        }
        eigenvalues.extend(vals);
    }
    let mut rates: Vec<f64> = eigenvalues.iter().map(|l| (-l.im).max(0.0)).collect();
    rates.sort_by(f64::total_cmp);
    let lv = levels(&model.chain, h, &p, target, false, false)?;
    let mut first_order_rates: Vec<f64> = lv
        .iter()
        .flat_map(|l| l.hot_eigenvalues.iter().map(move |q| 0.5 * g * q.clamp(0.0, 1.0)))
        .collect();
    first_order_rates.sort_by(f64::total_cmp);
    Ok(EffectiveSpectrum {
        eigenvalues,
        rates,
        first_order_rates,
        sector_dims,
    })
}

/// Gap of the effective Hamiltonian: the smallest decay rate `-Im λ` on the
/// excited subspace, with the first-order estimate alongside.
pub fn effective_hamiltonian_gap(model: &LindbladModel, target: &TargetState) -> Result<GapReport> {
    let spec = effective_hamiltonian_spectrum(model, target)?;
    let gap = spec.rates.first().copied().unwrap_or(0.0);
    let est = spec.first_order_rates.first().copied().unwrap_or(0.0);
    let q = if model.gamma > 0.0 { Some(2.0 * est / model.gamma) } else { None };
    let dark = spec.rates.iter().filter(|&&r| r <= DARK_TOL * model.gamma.max(1e-300)).count();
    let gap = if dark > 0 { 0.0 } else { gap };
    let mut warnings = Vec::new();
    if dark > 0 && spec.sector_dims.iter().sum::<usize>() < model.dim() {
        warnings.push("dark states are counted in the searched symmetry sectors only; the steady-state count is a lower bound".into());
    }
    if gap > est + 1e-9 {
        warnings.push(format!("gap {gap:.6e} exceeds the estimate {est:.6e}"));
    }
    Ok(GapReport {
        gap: Some(gap),
        gap_estimate: Some(est),
        q,
        method: GapMethod::EffectiveHamiltonian,
        steady_state_count: Some(1 + dark),
        gamma: model.gamma,
        weak_coupling: Some(weak_coupling(&model.chain, model.gamma)),
        warnings,
    })
}

/// An excited eigenstate of `H` with no weight in the hot subspace.
#[derive(Clone, Debug)]
pub struct DarkState {
    pub vector: StateVector,
    pub energy: f64,
    pub hot_weight: f64,
    /// `⟨(S_i + S_{i+1})²⟩` for every link `i` of the chain.
    pub link_spin_squared: Vec<f64>,
    /// `⟨S^z_i + S^z_{i+1}⟩` for every link.
    pub link_sz: Vec<f64>,
}

/// Dark states: eigenvectors of `H` (in the basis diagonalising `P_hot` within
/// each eigenspace) with `⟨P_hot⟩ ≤ 1e-8`, the target excluded. Systems up to
/// dimension 729 are treated in the full space; larger ones per symmetry
/// sector.
pub fn find_dark_states(model: &LindbladModel, target: &TargetState) -> Result<Vec<DarkState>> {
    target.check_eigenstate(&model.hamiltonian, 1e-9)?;
    let p = model.hot_projector()?;
    let chain = &model.chain;
    let lv = levels(chain, &model.hamiltonian, &p, target, true, chain.dim() <= 729)?;
    let s = chain.local_spin;
    let link_j2 = total_spin_squared(2, s)?;
    let (_, _, sz) = crate::spin::spin_matrices(s)?;
    let link_sz_op = &sz.kron(&Operator::identity(s.dim())) + &Operator::identity(s.dim()).kron(&sz);
    let links = chain.links();
    let j2_ops: Vec<Operator> = links
        .iter()
        .map(|&l| embed(&link_j2, &chain.link_sites(l)?, chain))
        .collect::<Result<_>>()?;
    let sz_ops: Vec<Operator> = links
        .iter()
        .map(|&l| embed(&link_sz_op, &chain.link_sites(l)?, chain))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for l in &lv {
        for (q, v) in l.hot_eigenvalues.iter().zip(&l.vectors) {
            if *q <= DARK_TOL {
                out.push(DarkState {
                    vector: v.clone(),
                    energy: l.energy,
                    hot_weight: q.max(0.0),
                    link_spin_squared: j2_ops.iter().map(|o| o.expectation(v).re).collect(),
                    link_sz: sz_ops.iter().map(|o| o.expectation(v).re).collect(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::*;
    use crate::spin::Spin;

    fn aklt(n: usize, gamma: f64) -> (LindbladModel, TargetState) {
        let chain = ChainSpec::periodic(n, Spin::ONE).unwrap();
        let m = build_aklt(&chain).unwrap().with_jumps(aklt_jumps(&chain, 1).unwrap(), gamma).unwrap();
        (m, aklt_ground_state(&chain).unwrap())
    }

    #[test]
    fn aklt_split_dimensions() {
        let (m, t) = aklt(4, 0.1);
        let (cold, hot) = hot_cold_split(&t, 1, &m.chain).unwrap();
        assert_eq!((cold.dim(), hot.dim()), (4, 5));
        let p = embedded_hot_projector(&hot, 1, &m.chain).unwrap();
        assert!(p.max_abs_diff(&aklt_link_hot_projector(&m.chain, 1).unwrap()) < 1e-10);
    }

    #[test]
    fn mg_and_product_splits() {
        let chain = ChainSpec::periodic(4, Spin::HALF).unwrap();
        let (minus, _) = mg_ground_states(&chain).unwrap();
        let (cold, hot) = hot_cold_split(&minus, 1, &chain).unwrap();
        assert_eq!((cold.dim(), hot.dim()), (1, 3));
        let prod = TargetState::new(StateVector::basis(16, 0), "up", 0.0).unwrap();
        let (cold, hot) = hot_cold_split(&prod, 1, &chain).unwrap();
        assert_eq!((cold.dim(), hot.dim()), (1, 3));
    }

    #[test]
    fn eigendecomposition_reconstructs() {
        let (m, _) = aklt(3, 0.0);
        let e = eigendecompose(&m.hamiltonian).unwrap();
        assert!(e.reconstruction_error(&m.hamiltonian) < 1e-8);
        let total: usize = e.eigenspaces.iter().map(|s| s.dim()).sum();
        assert_eq!(total, 27);
    }

    #[test]
    fn q_vanishes_with_dark_states_and_not_beyond() {
        let (m3, t3) = aklt(3, 0.1);
        assert!(gap_estimate(&m3, &t3, 1).unwrap().q.unwrap() < 1e-10);
        let (m5, t5) = aklt(5, 0.1);
        assert!(gap_estimate(&m5, &t5, 1).unwrap().q.unwrap() > 1e-6);
    }

    #[test]
    fn full_hot_projector_gives_unit_q() {
        // H = 1 - |0⟩⟨0| on one qubit pair, P_hot = complement of |00⟩ on the only link
        let chain = ChainSpec::open(2, Spin::HALF).unwrap();
        let t = TargetState::new(StateVector::basis(4, 0), "00", 0.0).unwrap();
        let h = &Operator::identity(4) - &Operator::projector_onto(&t.vector);
        let m = LindbladModel::new(chain, h, vec![], 0.2).unwrap();
        let r = gap_estimate(&m, &t, 1).unwrap();
        assert!((r.q.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.gap_estimate.unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn non_eigenstate_target_is_rejected() {
        let (m, _) = aklt(3, 0.1);
        let bad = TargetState::new(StateVector::basis(27, 0), "x", 0.0).unwrap();
        assert!(matches!(gap_estimate(&m, &bad, 1), Err(Error::InvalidTarget(_))));
    }

    #[test]
    fn sector_q_matches_full_space() {
        let (m, t) = aklt(4, 0.1);
        let (_, hot) = hot_cold_split(&t, 1, &m.chain).unwrap();
        let p = embedded_hot_projector(&hot, 1, &m.chain).unwrap();
        let a = q_table(&levels(&m.chain, &m.hamiltonian, &p, &t, false, false).unwrap());
        let b = q_table(&levels(&m.chain, &m.hamiltonian, &p, &t, false, true).unwrap());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9);
        }
    }

    #[test]
    fn effective_gap_zero_without_dissipation() {
        let (m, t) = aklt(4, 0.0);
        let s = effective_hamiltonian_spectrum(&m, &t).unwrap();
        assert!(s.rates.iter().all(|&r| r.abs() < 1e-10));
        assert_eq!(s.eigenvalues.len(), s.sector_dims.iter().sum::<usize>() - 1);
    }

    #[test]
    fn effective_rates_match_first_order_at_weak_coupling() {
        let chain = ChainSpec::periodic(3, Spin::ONE).unwrap();
        let dh = aklt_delta_h(&chain, &[1, 2], 1.0).unwrap();
        let m = build_aklt(&chain)
            .unwrap()
            .with_extra_hamiltonian(&dh)
            .unwrap()
            .with_jumps(aklt_jumps(&chain, 1).unwrap(), 1e-4)
            .unwrap();
        let t = aklt_ground_state(&chain).unwrap();
        let s = effective_hamiltonian_spectrum(&m, &t).unwrap();
        assert_eq!(s.rates.len(), s.first_order_rates.len());
        for (a, b) in s.rates.iter().zip(&s.first_order_rates) {
            assert!((a - b).abs() <= 1e-2 * 1e-4 + 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn effective_eigenvalues_appear_in_liouvillian() {
        let chain = ChainSpec::periodic(3, Spin::ONE).unwrap();
        let dh = aklt_delta_h(&chain, &[1, 2], 0.7).unwrap();
        let m = build_aklt(&chain)
            .unwrap()
            .with_extra_hamiltonian(&dh)
            .unwrap()
            .with_jumps(aklt_jumps(&chain, 1).unwrap(), 0.1)
            .unwrap();
        let t = aklt_ground_state(&chain).unwrap();
        let s = effective_hamiltonian_spectrum(&m, &t).unwrap();
        let l = liouvillian_spectrum(&m, &LiouvillianOptions::default()).unwrap();
        for lam in &s.eigenvalues {
            let want = C64::new(0.0, -1.0) * lam;
            let best = l.eigenvalues.iter().map(|x| (x - want).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-7, "missing {want}: {best}");
        }
    }

    #[test]
    fn incompatible_jumps_are_rejected() {
        let (m, t) = aklt(3, 0.1);
        let chain = m.chain;
        let mut jumps = aklt_jumps(&chain, 1).unwrap();
        jumps.push(Operator::identity(chain.dim()));
        let m = m.with_jumps(jumps, 0.1).unwrap();
        assert!(matches!(effective_hamiltonian_gap(&m, &t), Err(Error::IncompatibleJumps(_))));
    }

    #[test]
    fn dark_state_quantum_numbers() {
        let (m3, t3) = aklt(3, 0.1);
        let d3 = find_dark_states(&m3, &t3).unwrap();
        assert_eq!(d3.len(), 8);
        for d in &d3 {
            assert!((d.link_spin_squared[0] - 2.0).abs() < 1e-8);
        }
        let (m4, t4) = aklt(4, 0.1);
        let d4 = find_dark_states(&m4, &t4).unwrap();
        assert_eq!(d4.len(), 5);
        for d in &d4 {
            assert!((d.link_spin_squared[0] - 2.0).abs() < 1e-8);
            assert!((d.link_spin_squared[2] - 6.0).abs() < 1e-8);
        }
    }

    #[test]
    fn binned_profile() {
        let (m, t) = aklt(4, 0.1);
        let p = q_energy_profile(&m, &t, 1, 0.5).unwrap();
        assert!(p.target_q.abs() < 1e-12);
        let r = gap_estimate(&m, &t, 1).unwrap();
        let min_q = p.rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        assert!((min_q - r.q.unwrap()).abs() < 1e-12);
        assert_eq!(p.bins.iter().map(|b| b.count).sum::<usize>(), p.rows.len());
    }
}
