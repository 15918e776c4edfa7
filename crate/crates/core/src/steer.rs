//! Steerability: jump-operator validity, necessary conditions for dilute
//! cooling, the kernelizer of a target and the Lie algebra it generates.
//!
//! The kernelizer of `|ψ⟩` is the real span of Hermitian link operators `A`
//! with `A|ψ⟩ = 0`, together with the identity. Its Lie closure acts on the
//! orthogonal complement of the target, so dimensions are reported there.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg;
use crate::models::TargetState;
use crate::operator::{Operator, StateVector, SubspaceBasis};
use crate::spectral::{embedded_hot_projector, hot_cold_split};
use crate::spin::{embed, local_factor, ChainSpec};
use crate::C64;

/// Largest chain dimension accepted by [`build_kernelizer`].
pub const MAX_KERNELIZER_DIM: usize = 729;
/// Largest complement dimension accepted by [`lie_closure_dimension`].
pub const MAX_CLOSURE_DIM: usize = 81;
/// Hilbert–Schmidt residual above which a commutator counts as new.
pub const CLOSURE_TOL: f64 = 1e-10;
/// Residual below which a vector counts as a common eigenvector.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

const CHECK_TOL: f64 = 1e-10;
const ANGLE_TOL: f64 = 1e-8;

/// Outcome of the three checks on a jump set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpValidity {
    /// Every jump acts as `A ⊗ 𝟙` with `A` on the link.
    pub supported_on_link: bool,
    pub nilpotent: bool,
    pub max_square_norm: f64,
    pub kernel_matches_cold: bool,
    /// Dimension of `∩ ker L_j` on the link.
    pub kernel_dim: usize,
    pub cold_dim: usize,
    /// Sine of the largest principal angle between `∩ ker L_j` and the cold
    /// space (1 when the dimensions differ).
    pub kernel_angle: f64,
    pub image_in_cold: bool,
    /// `‖P_hot L_j‖` per jump.
    pub image_residuals: Vec<f64>,
}

impl JumpValidity {
    pub fn all_pass(&self) -> bool {
        self.supported_on_link && self.nilpotent && self.kernel_matches_cold && self.image_in_cold
    }
}

fn frobenius(m: &Mat<C64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// Nilpotency, `∩ ker L_j = 𝒱_cold` and `image(L_j) ⊆ 𝒱_cold` on a link.
pub fn validate_jumps(jumps: &[Operator], target: &TargetState, link: usize, chain: &ChainSpec) -> Result<JumpValidity> {
    let sites = chain.link_sites(link)?;
    let (cold, hot) = hot_cold_split(target, link, chain)?;
    let d2 = chain.local_dim().pow(2);
    let p_hot = hot.projector().to_dense();

    let mut supported = true;
    let mut locals = Vec::with_capacity(jumps.len());
    for l in jumps {
        check_dim(chain.dim(), l.dim())?;
        let loc = local_factor(l, &sites, chain)?;
        let back = embed(&Operator::from_dense(&loc)?, &sites, chain)?;
        if back.max_abs_diff(l) > CHECK_TOL {
            supported = false;
        }
        locals.push(loc);
    }

    let max_square_norm = locals.iter().map(|l| frobenius(&(l * l))).fold(0.0, f64::max);

    let stacked = Mat::<C64>::from_fn(d2 * locals.len(), d2, |r, c| locals[r / d2][(r % d2, c)]);
    let kernel = SubspaceBasis::from_columns(&linalg::null_space(&stacked, 1e-10)?);
    let kernel_angle = if kernel.dim() == cold.dim() {
        kernel.max_principal_angle_sine(&cold)
    } else {
        1.0
    };

    let image_residuals: Vec<f64> = locals.iter().map(|l| frobenius(&(&p_hot * l))).collect();
    Ok(JumpValidity {
        supported_on_link: supported,
        nilpotent: max_square_norm <= CHECK_TOL,
        max_square_norm,
        kernel_matches_cold: kernel.dim() == cold.dim() && kernel_angle <= ANGLE_TOL,
        kernel_dim: kernel.dim(),
        cold_dim: cold.dim(),
        kernel_angle,
        image_in_cold: image_residuals.iter().all(|&r| r <= CHECK_TOL),
        image_residuals,
    })
}

/// True when the target's reduced state on the link is rank deficient.
pub fn necessary_condition_hot(target: &TargetState, link: usize, chain: &ChainSpec) -> Result<bool> {
    let (_, hot) = hot_cold_split(target, link, chain)?;
    Ok(hot.dim() >= 1)
}

/// Hilbert–Schmidt orthonormal Hermitian basis of `d × d` matrices: `𝟙/√d`
/// followed by the generalised Gell-Mann matrices scaled to unit norm.
pub fn gell_mann_basis(d: usize) -> Vec<Mat<C64>> {
    let mut out = vec![Mat::<C64>::identity(d, d) * faer::Scale(C64::new(1.0 / (d as f64).sqrt(), 0.0))];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..d {
        for l in k + 1..d {
            let mut sym = Mat::<C64>::zeros(d, d);
            sym[(k, l)] = C64::new(s, 0.0);
            sym[(l, k)] = C64::new(s, 0.0);
            out.push(sym);
            let mut anti = Mat::<C64>::zeros(d, d);
            anti[(k, l)] = C64::new(0.0, -s);
            anti[(l, k)] = C64::new(0.0, s);
            out.push(anti);
        }
    }
    for k in 1..d {
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut diag = Mat::<C64>::zeros(d, d);
        for j in 0..k {
            diag[(j, j)] = C64::new(norm, 0.0);
        }
        diag[(k, k)] = C64::new(-(k as f64) * norm, 0.0);
        out.push(diag);
    }
    out
}

fn kron_dense(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

/// Hermitian link operators annihilating a target, per link, embedded into
/// the chain. The identity summand is implied by `includes_identity`.
#[derive(Clone, Debug)]
pub struct KernelizerBasis {
    pub chain: ChainSpec,
    pub generators: Vec<Operator>,
    /// Link of each generator.
    pub links: Vec<usize>,
    /// Local (link-space) form of each generator.
    pub local: Vec<Mat<C64>>,
    pub dims_per_link: Vec<(usize, usize)>,
    pub includes_identity: bool,
}

impl KernelizerBasis {
    pub fn dim_on_link(&self, link: usize) -> usize {
        self.dims_per_link.iter().find(|(l, _)| *l == link).map_or(0, |(_, d)| *d)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Kernelizer built from the given generators (every one must be
    /// Hermitian); used for custom or reduced generator sets.
    pub fn from_generators(chain: ChainSpec, generators: Vec<Operator>) -> Result<Self> {
        for g in &generators {
            check_dim(chain.dim(), g.dim())?;
            if !g.is_hermitian(1e-10) {
                return Err(invalid("kernelizer generators must be Hermitian"));
            }
        }
        let n = generators.len();
        Ok(Self {
            chain,
            local: generators.iter().map(|g| g.to_dense()).collect(),
            generators,
            links: vec![0; n],
            dims_per_link: Vec::new(),
            includes_identity: true,
        })
    }

    /// Same kernelizer with generators in a different order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() || order.iter().any(|&i| i >= self.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(invalid("order must be a permutation of the generators"));
        }
        Ok(Self {
            chain: self.chain,
            generators: order.iter().map(|&i| self.generators[i].clone()).collect(),
            links: order.iter().map(|&i| self.links[i]).collect(),
            local: order.iter().map(|&i| self.local[i].clone()).collect(),
            dims_per_link: self.dims_per_link.clone(),
            includes_identity: self.includes_identity,
        })
    }
}

/// Solves `A|ψ⟩ = 0` for Hermitian `A` on every link of the chain.
pub fn build_kernelizer(target: &TargetState, chain: &ChainSpec) -> Result<KernelizerBasis> {
    let dim = chain.dim();
    check_dim(dim, target.dim())?;
    if dim > MAX_KERNELIZER_DIM {
        return Err(Error::CapacityExceeded {
            dim,
            limit: MAX_KERNELIZER_DIM,
        });
    }
    let d = chain.local_dim();
    let single = gell_mann_basis(d);
    let mut link_basis = Vec::with_capacity(d.pow(4));
    for a in &single {
        for b in &single {
            link_basis.push(kron_dense(a, b));
        }
    }
    let mut generators = Vec::new();
    let mut links = Vec::new();
    let mut local = Vec::new();
    let mut dims_per_link = Vec::new();
    for link in chain.links() {
        let sites = chain.link_sites(link)?;
        let columns: Vec<Vec<C64>> = link_basis
            .iter()
            .map(|b| Ok(embed(&Operator::from_dense(b)?, &sites, chain)?.apply(target.vector.amplitudes())))
            .collect::<Result<_>>()?;
        let constraint = Mat::<f64>::from_fn(2 * dim, link_basis.len(), |r, c| {
            let v = columns[c][r % dim];
            if r < dim {
                v.re
            } else {
                v.im
            }
        });
        let null = linalg::real_null_space(&constraint, 1e-10)?;
        dims_per_link.push((link, null.ncols()));
        for k in 0..null.ncols() {
            let mut a = Mat::<C64>::zeros(d * d, d * d);
            for (c, b) in link_basis.iter().enumerate() {
                let w = null[(c, k)];
                if w != 0.0 {
                    a += b * faer::Scale(C64::new(w, 0.0));
                }
            }
            generators.push(embed(&Operator::from_dense(&a)?, &sites, chain)?.with_hermitian_hint());
            links.push(link);
            local.push(a);
        }
    }
    Ok(KernelizerBasis {
        chain: *chain,
        generators,
        links,
        local,
        dims_per_link,
        includes_identity: true,
    })
}

/// Result of the flow condition.
#[derive(Clone, Debug)]
pub struct FlowReport {
    pub passes: bool,
    /// Common eigenvectors of the kernelizer outside
    /// `span{ψ} ⊕ (𝒱_hot ⊗ rest)`, sorted by increasing weight in that space.
    pub witnesses: Vec<StateVector>,
    /// Weight of each witness in `span{ψ} ⊕ (𝒱_hot ⊗ rest)`.
    pub witness_weights: Vec<f64>,
    /// Dimensions of the common eigenspaces found.
    pub common_eigenspace_dims: Vec<usize>,
}

fn random_combination(ops: &[Mat<C64>], rng: &mut ChaCha8Rng) -> Mat<C64> {
    let n = ops[0].nrows();
    let mut g = Mat::<C64>::zeros(n, n);
    for op in ops {
        let c: f64 = rng.sample(StandardNormal);
        g += op * faer::Scale(C64::new(c, 0.0));
    }
    g
}

/// Splits the space into eigenspaces of a random combination, then splits
/// each degenerate eigenspace by a second independent combination.
fn candidate_spaces(ops: &[Mat<C64>], seed: u64) -> Result<Vec<Mat<C64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g1 = random_combination(ops, &mut rng);
    let g2 = random_combination(ops, &mut rng);
    let (v1, u1) = linalg::hermitian_eigen(&g1)?;
    let scale = v1.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let mut out = Vec::new();
    for grp in linalg::group_degenerate(&v1, 1e-9 * scale) {
        let u = Mat::from_fn(u1.nrows(), grp.len(), |i, j| u1[(i, grp.start + j)]);
        if grp.len() == 1 {
            out.push(u);
            continue;
        }
        let c = linalg::compress(&g2, &u);
        let (v2, u2) = linalg::hermitian_eigen(&c)?;
        for sub in linalg::group_degenerate(&v2, 1e-9 * scale) {
            let w = Mat::from_fn(grp.len(), sub.len(), |i, j| u2[(i, sub.start + j)]);
            out.push(&u * &w);
        }
    }
    Ok(out)
}

/// `max_A ‖A W - W (W†AW)‖` plus the spread of `W†AW` around a multiple of
/// the identity.
fn common_eigen_residual(ops: &[Mat<C64>], w: &Mat<C64>) -> f64 {
    let k = w.ncols();
    ops.iter()
        .map(|a| {
            let aw = a * w;
            let c = w.adjoint() * &aw;
            let mut tr = C64::new(0.0, 0.0);
            for i in 0..k {
                tr += c[(i, i)];
            }
            let lam = tr / k as f64;
            let r = &aw - w * faer::Scale(lam);
            frobenius(&r)
        })
        .fold(0.0, f64::max)
}

/// Searches for states other than the target that every kernelizer element
/// leaves invariant and that lie outside `span{ψ} ⊕ (𝒱_hot ⊗ rest)`.
pub fn necessary_condition_flow(kernelizer: &KernelizerBasis, target: &TargetState, link: usize, seed: u64) -> Result<FlowReport> {
    let chain = &kernelizer.chain;
    check_dim(chain.dim(), target.dim())?;
    let dim = chain.dim();
    if kernelizer.is_empty() {
        return Err(invalid("the kernelizer has no generators"));
    }
    let ops: Vec<Mat<C64>> = kernelizer.generators.iter().map(|g| g.to_dense()).collect();
    let (_, hot) = hot_cold_split(target, link, chain)?;
    let allowed = {
        let mut p = embedded_hot_projector(&hot, link, chain)?.to_dense();
        let t = target.vector.to_column();
        p += &t * t.adjoint();
        p
    };
    let mut witnesses = Vec::new();
    let mut witness_weights = Vec::new();
    let mut common_eigenspace_dims = Vec::new();
    for w in candidate_spaces(&ops, seed)? {
        if common_eigen_residual(&ops, &w) > EIGEN_RESIDUAL_TOL * (w.ncols() as f64).sqrt() {
            continue;
        }
        common_eigenspace_dims.push(w.ncols());
        let c = linalg::compress(&allowed, &w);
        let (vals, vecs) = linalg::hermitian_eigen(&c)?;
        for (k, &weight) in vals.iter().enumerate() {
            if weight < 1.0 - 1e-8 {
                let x = &w * vecs.col(k);
                let amps: Vec<C64> = (0..dim).map(|i| x[i]).collect();
                witnesses.push(StateVector::from_amplitudes(amps));
                witness_weights.push(weight.max(0.0));
            }
        }
    }
    let mut order: Vec<usize> = (0..witnesses.len()).collect();
    order.sort_by(|&a, &b| witness_weights[a].total_cmp(&witness_weights[b]));
    let witnesses: Vec<StateVector> = order.iter().map(|&i| witnesses[i].clone()).collect();
    let witness_weights: Vec<f64> = order.iter().map(|&i| witness_weights[i]).collect();
    Ok(FlowReport {
        passes: witnesses.is_empty(),
        witnesses,
        witness_weights,
        common_eigenspace_dims,
    })
}

/// Lie closure of the kernelizer on the target's complement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieClosureReport {
    /// Dimension of the traceless part of the closure on the complement.
    pub dimension: usize,
    /// `(D - 1)² - 1`.
    pub target_dimension: usize,
    pub converged: bool,
    pub generations: usize,
}

impl LieClosureReport {
    pub fn is_full(&self) -> bool {
        self.dimension == self.target_dimension
    }
}

/// Real coordinates of a Hermitian `n × n` matrix in an orthonormal basis.
fn hermitian_coords(m: &Mat<C64>) -> Vec<f64> {
    let n = m.nrows();
    let s = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(m[(i, i)].re);
        for j in i + 1..n {
            out.push(s * m[(i, j)].re);
            out.push(s * m[(i, j)].im);
        }
    }
    out
}

fn from_coords(v: &[f64], n: usize) -> Mat<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = Mat::<C64>::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        m[(i, i)] = C64::new(v[k], 0.0);
        k += 1;
        for j in i + 1..n {
            let z = C64::new(s * v[k], s * v[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Columns of `c` are projected (twice) against the orthonormal columns of
/// `basis`; the left singular vectors of the residual above `CLOSURE_TOL`
/// are returned as new orthonormal directions.
fn new_directions(basis: &Mat<f64>, c: &Mat<f64>) -> Result<Mat<f64>> {
    let mut r = c.clone();
    if basis.ncols() > 0 {
        for _ in 0..2 {
            let coef = basis.transpose() * &r;
            r -= basis * &coef;
        }
    }
    // columns already inside the span need no factorisation
    let keep: Vec<usize> = (0..r.ncols())
        .filter(|&j| r.col(j).iter().map(|x| x * x).sum::<f64>().sqrt() > CLOSURE_TOL)
        .collect();
    if keep.is_empty() {
        return Ok(Mat::zeros(r.nrows(), 0));
    }
    let r = Mat::<f64>::from_fn(r.nrows(), keep.len(), |i, j| r[(i, keep[j])]);
    let svd = r
        .thin_svd()
        .map_err(|e| Error::SolverFailure {
            reason: format!("SVD: {e:?}"),
            iterations: 0,
            residual: f64::NAN,
        })?;
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let rank = s.iter().filter(|&&v| v > CLOSURE_TOL).count();
    let u = svd.U();
    Ok(Mat::from_fn(r.nrows(), rank, |i, j| u[(i, j)]))
}

fn append_columns(basis: &Mat<f64>, extra: &Mat<f64>) -> Mat<f64> {
    let k = basis.ncols();
    Mat::from_fn(basis.nrows(), k + extra.ncols(), |i, j| if j < k { basis[(i, j)] } else { extra[(i, j - k)] })
}

/// Commutators per batch of the closure search.
const CLOSURE_BATCH: usize = 2048;

/// Commutator closure of `{i A}` restricted to the complement of the target.
///
/// The algebra generated by a set is spanned by nested brackets with the
/// generators, so every generation brackets the directions found in the
/// previous one with the (orthonormalised) generators only. Batches of
/// commutators are computed in parallel, collected in a fixed order and
/// orthogonalised against the current basis with an SVD.
pub fn lie_closure_dimension(kernelizer: &KernelizerBasis, target: &TargetState, max_generations: usize) -> Result<LieClosureReport> {
    let dim = kernelizer.chain.dim();
    check_dim(dim, target.dim())?;
    let n = dim - 1;
    if n > MAX_CLOSURE_DIM {
        return Err(Error::CapacityExceeded {
            dim: n,
            limit: MAX_CLOSURE_DIM,
        });
    }
    let target_dimension = n * n - 1;
    let comp = linalg::orthogonal_complement(&target.vector.to_column());
    let max_dim = n * n;

    let seeds: Vec<Vec<f64>> = kernelizer
        .generators
        .iter()
        .map(|g| {
            let v = hermitian_coords(&linalg::compress(&g.to_dense(), &comp));
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter().map(|x| x / norm).collect()
            } else {
                v
            }
        })
        .collect();
    let seed_mat = Mat::<f64>::from_fn(max_dim, seeds.len(), |i, j| seeds[j][i]);
    let mut basis = new_directions(&Mat::<f64>::zeros(max_dim, 0), &seed_mat)?;
    let gens: Vec<Mat<C64>> = (0..basis.ncols())
        .map(|j| from_coords(&(0..max_dim).map(|i| basis[(i, j)]).collect::<Vec<_>>(), n))
        .collect();

    let mut frontier: Vec<Mat<C64>> = gens.clone();
    let mut first = true;
    let mut generations = 0;
    while generations < max_generations && basis.ncols() < max_dim && !frontier.is_empty() {
        generations += 1;
        let pairs: Vec<(usize, usize)> = (0..frontier.len())
            .flat_map(|i| {
                let upto = if first { i } else { gens.len() };
                (0..upto).map(move |j| (i, j))
            })
            .collect();
        let mut found: Vec<Mat<C64>> = Vec::new();
        for chunk in pairs.chunks(CLOSURE_BATCH) {
            if basis.ncols() == max_dim {
                break;
            }
            let cols: Vec<Vec<f64>> = chunk
                .par_iter()
                .map(|&(i, j)| {
                    let a = &frontier[i];
                    let b = &gens[j];
                    hermitian_coords(&((a * b - b * a) * faer::Scale(C64::new(0.0, 1.0))))
                })
                .collect();
            let c = Mat::<f64>::from_fn(max_dim, cols.len(), |i, j| cols[j][i]);
            let extra = new_directions(&basis, &c)?;
            for j in 0..extra.ncols() {
                found.push(from_coords(&(0..max_dim).map(|i| extra[(i, j)]).collect::<Vec<_>>(), n));
            }
            basis = append_columns(&basis, &extra);
        }
        frontier = found;
        first = false;
    }
    let converged = basis.ncols() == max_dim || frontier.is_empty();
    // drop the identity direction when the closure contains it
    let id = hermitian_coords(&Mat::<C64>::identity(n, n));
    let id_col = Mat::<f64>::from_fn(max_dim, 1, |i, _| id[i] / (n as f64).sqrt());
    let has_identity = new_directions(&basis, &id_col)?.ncols() == 0;
    Ok(LieClosureReport {
        dimension: basis.ncols() - usize::from(has_identity),
        target_dimension,
        converged,
        generations,
    })
}

/// Gaussian random element of the kernelizer with the given Hilbert–Schmidt
/// norm.
pub fn sample_delta_h(kernelizer: &KernelizerBasis, seed: u64, norm: f64) -> Result<Operator> {
    if kernelizer.is_empty() {
        return Err(invalid("the kernelizer has no generators"));
    }
    if !(norm >= 0.0) {
        return Err(invalid("norm must be nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = kernelizer.chain.dim();
    let mut acc = Operator::zeros(dim);
    for g in &kernelizer.generators {
        let c: f64 = rng.sample(StandardNormal);
        acc = acc.add_scaled(g, C64::new(c, 0.0))?;
    }
    let hs = acc.hs_norm();
    if hs == 0.0 {
        return Ok(acc);
    }
    Ok(acc.scale_real(norm / hs).with_hermitian_hint())
}

/// Summary of the steerability checks for one target and cooled link.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SteerReport {
    pub hot_dim: usize,
    pub cold_dim: usize,
    pub kernelizer_dim_per_link: Vec<(usize, usize)>,
    pub lie_dim: Option<usize>,
    pub lie_target: Option<usize>,
    pub lie_converged: Option<bool>,
    pub necessary_hot: bool,
    pub necessary_flow: bool,
    /// Weight of each witness in `span{ψ} ⊕ (𝒱_hot ⊗ rest)`.
    pub witness_weights: Vec<f64>,
    /// Witness amplitudes as `[re, im]` pairs.
    pub witnesses: Vec<Vec<[f64; 2]>>,
}

/// Runs every check. The Lie closure runs when `lie_generations` is given
/// and the complement dimension is at most [`MAX_CLOSURE_DIM`].
pub fn steer_report(target: &TargetState, chain: &ChainSpec, link: usize, seed: u64, lie_generations: Option<usize>) -> Result<SteerReport> {
    let (cold, hot) = hot_cold_split(target, link, chain)?;
    let k = build_kernelizer(target, chain)?;
    let flow = necessary_condition_flow(&k, target, link, seed)?;
    let lie = match lie_generations {
        Some(g) if chain.dim() - 1 <= MAX_CLOSURE_DIM => Some(lie_closure_dimension(&k, target, g)?),
        _ => None,
    };
    Ok(SteerReport {
        hot_dim: hot.dim(),
        cold_dim: cold.dim(),
        kernelizer_dim_per_link: k.dims_per_link.clone(),
        lie_dim: lie.as_ref().map(|l| l.dimension),
        lie_target: lie.as_ref().map(|l| l.target_dimension),
        lie_converged: lie.as_ref().map(|l| l.converged),
        necessary_hot: hot.dim() >= 1,
        necessary_flow: flow.passes,
        witness_weights: flow.witness_weights.clone(),
        witnesses: flow
            .witnesses
            .iter()
            .map(|w| w.amplitudes().iter().map(|a| [a.re, a.im]).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::*;
    use crate::spin::{coupled_basis_state, Spin};

    fn aklt(n: usize) -> (ChainSpec, TargetState) {
        let chain = ChainSpec::periodic(n, Spin::ONE).unwrap();
        let t = aklt_ground_state(&chain).unwrap();
        (chain, t)
    }

    #[test]
    fn gell_mann_is_orthonormal() {
        for d in 2..5 {
            let b = gell_mann_basis(d);
            assert_eq!(b.len(), d * d);
            for (i, x) in b.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    let ip = (x.adjoint() * y).diagonal().column_vector().iter().sum::<C64>();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn aklt_jump_set_is_valid() {
        let (chain, t) = aklt(4);
        let v = validate_jumps(&aklt_jumps(&chain, 1).unwrap(), &t, 1, &chain).unwrap();
        assert!(v.all_pass(), "{v:?}");
        assert_eq!((v.kernel_dim, v.cold_dim), (4, 4));
    }

    #[test]
    fn hot_to_hot_jump_breaks_image_containment() {
        let (chain, t) = aklt(4);
        let mut jumps = aklt_jumps(&chain, 1).unwrap();
        let s = Spin::ONE;
        let from = coupled_basis_state(2, s, Spin::from_twice(4), 4).unwrap();
        let to = coupled_basis_state(2, s, Spin::from_twice(4), 2).unwrap();
        jumps[0] = embed(&Operator::outer(&to, &from).unwrap(), &[1, 2], &chain).unwrap();
        let v = validate_jumps(&jumps, &t, 1, &chain).unwrap();
        assert!(!v.image_in_cold);
        assert!(v.nilpotent);
    }

    #[test]
    fn empty_jump_set_fails_kernel_check() {
        let (chain, t) = aklt(4);
        let v = validate_jumps(&[], &t, 1, &chain).unwrap();
        assert!(!v.kernel_matches_cold);
        assert_eq!(v.kernel_dim, 9);
    }

    #[test]
    fn hot_condition_cases() {
        let (chain, t) = aklt(4);
        assert!(necessary_condition_hot(&t, 1, &chain).unwrap());
        let q = ChainSpec::periodic(5, Spin::HALF).unwrap();
        assert!(necessary_condition_hot(&ghz_state(5).unwrap(), 1, &q).unwrap());
        // two qubits in a maximally entangled state of a 2x2 link: the
        // four-site chain with Bell pairs (1,3) and (2,4) has a full-rank link
        let chain = ChainSpec::open(4, Spin::HALF).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![C64::new(0.0, 0.0); 16];
        for a in 0..2 {
            for b in 0..2 {
                // sites 1..4 with site 1 most significant
                let idx = (a << 3) | (b << 2) | (a << 1) | b;
                amps[idx] = C64::new(s * s, 0.0);
            }
        }
        let t = TargetState::new(StateVector::from_amplitudes(amps), "bell pairs", 0.0).unwrap();
        assert!(!necessary_condition_hot(&t, 1, &chain).unwrap());
    }

    #[test]
    fn constructive_jumps_pass_whenever_hot_space_exists() {
        let chain = ChainSpec::periodic(5, Spin::HALF).unwrap();
        for t in [ghz_state(5).unwrap(), w_state(5).unwrap()] {
            assert!(necessary_condition_hot(&t, 1, &chain).unwrap());
            let (cold, hot) = hot_cold_split(&t, 1, &chain).unwrap();
            let jumps = hot_to_cold_jumps(&hot, &cold, &chain, 1).unwrap();
            assert!(validate_jumps(&jumps, &t, 1, &chain).unwrap().all_pass());
        }
    }

    #[test]
    fn aklt_local_kernelizer_is_su5_sized() {
        let (chain, t) = aklt(4);
        let k = build_kernelizer(&t, &chain).unwrap();
        for link in 1..=4 {
            assert_eq!(k.dim_on_link(link), 25);
        }
        for g in &k.generators {
            assert!(g.is_hermitian(1e-12));
            assert!(g.apply_state(&t.vector).unwrap().norm() < 1e-10);
        }
        // J=2 link operators lie inside the local span
        let p2 = spin_two_link_projector().to_dense();
        let span: Vec<&Mat<C64>> = k.local.iter().zip(&k.links).filter(|(_, l)| **l == 1).map(|(m, _)| m).collect();
        let mut residual = p2.clone();
        for b in &span {
            let c: C64 = (b.adjoint() * &p2).diagonal().column_vector().iter().sum();
            residual -= *b * faer::Scale(c);
        }
        assert!(frobenius(&residual) < 1e-10);
    }

    #[test]
    fn product_state_kernelizer() {
        let chain = ChainSpec::open(2, Spin::HALF).unwrap();
        let t = TargetState::new(StateVector::basis(4, 0), "00", 0.0).unwrap();
        let k = build_kernelizer(&t, &chain).unwrap();
        assert_eq!(k.dim_on_link(1), 9);
    }

    #[test]
    fn random_kernelizer_elements_annihilate() {
        let (chain, t) = aklt(3);
        let k = build_kernelizer(&t, &chain).unwrap();
        for seed in 0..5 {
            let dh = sample_delta_h(&k, seed, 2.5).unwrap();
            assert!(dh.apply_state(&t.vector).unwrap().norm() < 1e-10);
            assert!(dh.is_hermitian(1e-12));
            assert!((dh.hs_norm() - 2.5).abs() < 1e-12);
        }
        assert_eq!(sample_delta_h(&k, 1, 1.0).unwrap(), sample_delta_h(&k, 1, 1.0).unwrap());
    }

    #[test]
    fn small_closures() {
        // a qutrit with target |m=-1⟩ leaves a qubit-sized complement
        let chain = ChainSpec::open(1, Spin::ONE).unwrap();
        let t = TargetState::new(StateVector::basis(3, 2), "m=-1", 0.0).unwrap();
        let x = Operator::from_triplets(3, [(0, 1, C64::new(1.0, 0.0)), (1, 0, C64::new(1.0, 0.0))]).unwrap();
        let y = Operator::from_triplets(3, [(0, 1, C64::new(0.0, -1.0)), (1, 0, C64::new(0.0, 1.0))]).unwrap();
        let one = KernelizerBasis::from_generators(chain, vec![x.clone()]).unwrap();
        assert_eq!(lie_closure_dimension(&one, &t, 10).unwrap().dimension, 1);
        let two = KernelizerBasis::from_generators(chain, vec![x, y]).unwrap();
        let r = lie_closure_dimension(&two, &t, 10).unwrap();
        assert_eq!((r.dimension, r.target_dimension), (3, 3));
        assert!(r.converged && r.is_full());
    }

    #[test]
    fn aklt_three_site_closure_is_full_and_order_independent() {
        let (chain, t) = aklt(3);
        let k = build_kernelizer(&t, &chain).unwrap();
        let r = lie_closure_dimension(&k, &t, 20).unwrap();
        assert_eq!(r.dimension, 675);
        assert!(r.converged && r.is_full());
        let mut order: Vec<usize> = (0..k.len()).collect();
        order.reverse();
        order.swap(3, 40);
        let shuffled = lie_closure_dimension(&k.permuted(&order).unwrap(), &t, 20).unwrap();
        assert_eq!(shuffled.dimension, 675);
    }

    #[test]
    fn truncated_closure_reports_not_converged() {
        let (chain, t) = aklt(3);
        let k = build_kernelizer(&t, &chain).unwrap();
        let r = lie_closure_dimension(&k, &t, 0).unwrap();
        assert!(!r.converged);
        assert_eq!(r.generations, 0);
        assert!(r.dimension < 675);
    }

    #[test]
    fn ghz_and_w_flow_witnesses() {
        let chain = ChainSpec::periodic(5, Spin::HALF).unwrap();
        let ghz = ghz_state(5).unwrap();
        let k = build_kernelizer(&ghz, &chain).unwrap();
        let f = necessary_condition_flow(&k, &ghz, 1, 7).unwrap();
        assert!(!f.passes);
        let anti = antisymmetric_ghz_state(5).unwrap();
        assert!(f.witnesses.iter().any(|w| w.fidelity(&anti.vector) > 1.0 - 1e-8));

        let w = w_state(5).unwrap();
        let k = build_kernelizer(&w, &chain).unwrap();
        let f = necessary_condition_flow(&k, &w, 1, 7).unwrap();
        assert!(!f.passes);
        let zero = StateVector::basis(32, 0);
        assert!(f.witnesses.iter().any(|v| v.fidelity(&zero) > 1.0 - 1e-8));
    }

    #[test]
    fn aklt_flow_passes() {
        let (chain, t) = aklt(4);
        let k = build_kernelizer(&t, &chain).unwrap();
        assert!(necessary_condition_flow(&k, &t, 1, 3).unwrap().passes);
    }
}
