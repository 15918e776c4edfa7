//! Concrete models: AKLT and Majumdar–Ghosh chains, their single-link jump
//! operators, analytic target states, the coherent repair term on the AKLT
//! spin-2 link subspace, and GHZ/W qubit targets.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::operator::{sum_operators, Operator, StateVector, SubspaceBasis};
use crate::spin::{coupled_basis_state, embed, total_spin_projector, Boundary, ChainSpec, Spin};
use crate::C64;

/// Tolerance for the Hermiticity of a model Hamiltonian.
pub const HAMILTONIAN_HERMITIAN_TOL: f64 = 1e-12;

/// Hamiltonian, jump operators and dissipation rate of a GKSL generator.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    pub chain: ChainSpec,
    pub hamiltonian: Operator,
    pub jumps: Vec<Operator>,
    pub gamma: f64,
}

impl LindbladModel {
    pub fn new(chain: ChainSpec, hamiltonian: Operator, jumps: Vec<Operator>, gamma: f64) -> Result<Self> {
        check_dim(chain.dim(), hamiltonian.dim())?;
        if !hamiltonian.is_hermitian(HAMILTONIAN_HERMITIAN_TOL) {
            return Err(invalid("Hamiltonian is not Hermitian"));
        }
        for l in &jumps {
            check_dim(chain.dim(), l.dim())?;
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("dissipation rate must be non-negative, got {gamma}")));
        }
        Ok(Self {
            chain,
            hamiltonian: hamiltonian.with_hermitian_hint(),
            jumps,
            gamma,
        })
    }

    /// Hamiltonian-only model (no jumps, zero rate).
    pub fn closed(chain: ChainSpec, hamiltonian: Operator) -> Result<Self> {
        Self::new(chain, hamiltonian, Vec::new(), 0.0)
    }

    pub fn with_jumps(mut self, jumps: Vec<Operator>, gamma: f64) -> Result<Self> {
        for l in &jumps {
            check_dim(self.dim(), l.dim())?;
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("dissipation rate must be non-negative, got {gamma}")));
        }
        self.jumps = jumps;
        self.gamma = gamma;
        Ok(self)
    }

    /// Adds a Hermitian term to the Hamiltonian.
    pub fn with_extra_hamiltonian(mut self, extra: &Operator) -> Result<Self> {
        check_dim(self.dim(), extra.dim())?;
        if !extra.is_hermitian(HAMILTONIAN_HERMITIAN_TOL) {
            return Err(invalid("added term is not Hermitian"));
        }
        self.hamiltonian = self.hamiltonian.try_add(extra)?.with_hermitian_hint();
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.chain.dim()
    }

    /// `Σ_j L_j† L_j`.
    pub fn jump_sum(&self) -> Operator {
        let terms: Vec<Operator> = self.jumps.iter().map(|l| &l.adjoint() * l).collect();
        sum_operators(self.dim(), &terms)
            .expect("jump dimensions validated")
            .with_hermitian_hint()
    }

    /// `Σ L†L`, checked to be Hermitian. It is the hot projector when one
    /// link is cooled and a positive sum of overlapping projectors otherwise.
    pub fn hot_projector(&self) -> Result<Operator> {
        let p = self.jump_sum();
        if !p.is_hermitian(1e-9) {
            return Err(Error::IncompatibleJumps("sum of L†L is not Hermitian".into()));
        }
        Ok(p)
    }

    /// `H - (iγ/2) Σ L†L`.
    pub fn no_jump_hamiltonian(&self) -> Operator {
        self.hamiltonian
            .add_scaled(&self.jump_sum(), C64::new(0.0, -0.5 * self.gamma))
            .expect("dimensions agree")
    }
}

/// A target state with its energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetState {
    pub vector: StateVector,
    pub label: String,
    pub energy: f64,
}

impl TargetState {
    pub fn new(vector: StateVector, label: impl Into<String>, energy: f64) -> Result<Self> {
        let vector = vector.normalized()?;
        Ok(Self {
            vector,
            label: label.into(),
            energy,
        })
    }

    /// Residual `‖Hψ - εψ‖`.
    pub fn eigen_residual(&self, h: &Operator) -> Result<f64> {
        let mut r = h.apply_state(&self.vector)?;
        r.axpy(C64::new(-self.energy, 0.0), &self.vector);
        Ok(r.norm())
    }

    /// Fails with `InvalidTarget` unless the state is an eigenvector of `h`
    /// with the stored energy (within `tol`).
    pub fn check_eigenstate(&self, h: &Operator, tol: f64) -> Result<()> {
        let r = self.eigen_residual(h)?;
        if r > tol {
            return Err(Error::InvalidTarget(format!(
                "'{}' is not an eigenvector with energy {} (residual {r:.2e})",
                self.label, self.energy
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }
}

fn require_aklt_chain(chain: &ChainSpec) -> Result<()> {
    if chain.local_spin != Spin::ONE || chain.boundary != Boundary::Periodic || chain.n_sites < 2 {
        return Err(Error::UnsupportedModel(
            "the AKLT model needs a periodic spin-1 chain with at least two sites".into(),
        ));
    }
    Ok(())
}

fn require_mg_chain(chain: &ChainSpec) -> Result<()> {
    if chain.local_spin != Spin::HALF || chain.boundary != Boundary::Periodic {
        return Err(Error::UnsupportedModel(
            "the Majumdar–Ghosh model needs a periodic spin-1/2 chain".into(),
        ));
    }
    if chain.n_sites < 4 || !chain.n_sites.is_multiple_of(2) {
        return Err(Error::UnsupportedModel(format!(
            "the Majumdar–Ghosh model is supported for even N >= 4 only, got N = {}",
            chain.n_sites
        )));
    }
    Ok(())
}

/// Projector onto total spin 2 of two spin-1 sites.
pub fn spin_two_link_projector() -> Operator {
    total_spin_projector(2, Spin::ONE, Spin::from_twice(4)).expect("J = 2 is admissible")
}

/// `H = Σ_{i=1..N} P_2^{(i,i+1)}` on a periodic spin-1 chain.
pub fn build_aklt(chain: &ChainSpec) -> Result<LindbladModel> {
    require_aklt_chain(chain)?;
    let p2 = spin_two_link_projector();
    let terms: Vec<Operator> = (1..=chain.n_sites)
        .map(|i| embed(&p2, &[i, i + 1], chain))
        .collect::<Result<_>>()?;
    let h = sum_operators(chain.dim(), &terms)?;
    LindbladModel::closed(*chain, h)
}

/// Valence-bond ground state of the periodic AKLT chain from its bond
/// dimension 2 matrix-product representation, normalised numerically.
pub fn aklt_ground_state(chain: &ChainSpec) -> Result<TargetState> {
    require_aklt_chain(chain)?;
    // A[k] for local index k (m = +1, 0, -1), as row-major 2×2 real matrices
    let a = (2.0f64 / 3.0).sqrt();
    let b = (1.0f64 / 3.0).sqrt();
    let mats: [[f64; 4]; 3] = [[0.0, a, 0.0, 0.0], [-b, 0.0, 0.0, b], [0.0, 0.0, -a, 0.0]];
    let n = chain.n_sites;
    let dim = chain.dim();
    let mut amps = Vec::with_capacity(dim);
    for idx in 0..dim {
        let mut prod = [1.0, 0.0, 0.0, 1.0];
        let mut rem = idx;
        let mut digits = vec![0usize; n];
        for slot in digits.iter_mut().rev() {
            *slot = rem % 3;
            rem /= 3;
        }
        for &k in &digits {
            let m = &mats[k];
            prod = [
                prod[0] * m[0] + prod[1] * m[2],
                prod[0] * m[1] + prod[1] * m[3],
                prod[2] * m[0] + prod[3] * m[2],
                prod[2] * m[1] + prod[3] * m[3],
            ];
        }
        amps.push(C64::new(prod[0] + prod[3], 0.0));
    }
    TargetState::new(StateVector::from_amplitudes(amps), "AKLT", 0.0)
}

/// Embeds `|ket⟩⟨bra|` of a two-site link into the chain.
fn link_outer(ket: &StateVector, bra: &StateVector, link: usize, chain: &ChainSpec) -> Result<Operator> {
    let sites = chain.link_sites(link)?;
    embed(&Operator::outer(ket, bra)?, &sites, chain)
}

fn link_state(s: Spin, j_twice: u32, m: i32) -> StateVector {
    coupled_basis_state(2, s, Spin::from_twice(j_twice), 2 * m).expect("valid two-site multiplet")
}

/// The five AKLT cooling operators on a link, mapping each `|2, m⟩` to a
/// `J = 1` state: `|1,1⟩⟨2,2|`, `|1,1⟩⟨2,1|`, `|1,0⟩⟨2,0|`, `|1,-1⟩⟨2,-1|`,
/// `|1,-1⟩⟨2,-2|`.
pub fn aklt_jumps(chain: &ChainSpec, link: usize) -> Result<Vec<Operator>> {
    require_aklt_chain(chain)?;
    let pairs = [(1, 2), (1, 1), (0, 0), (-1, -1), (-1, -2)];
    pairs
        .iter()
        .map(|&(mc, mh)| link_outer(&link_state(Spin::ONE, 2, mc), &link_state(Spin::ONE, 4, mh), link, chain))
        .collect()
}

/// Spin-2 projector of a link, embedded in the chain.
pub fn aklt_link_hot_projector(chain: &ChainSpec, link: usize) -> Result<Operator> {
    require_aklt_chain(chain)?;
    embed(&spin_two_link_projector(), &chain.link_sites(link)?, chain)
}

/// `H = 12 Σ_{i=1..N} P_{3/2}^{(i,i+1,i+2)}` on a periodic spin-1/2 chain.
pub fn build_mg(chain: &ChainSpec) -> Result<LindbladModel> {
    require_mg_chain(chain)?;
    let p = total_spin_projector(3, Spin::HALF, Spin::from_twice(3))?;
    let terms: Vec<Operator> = (1..=chain.n_sites)
        .map(|i| embed(&p, &[i, i + 1, i + 2], chain))
        .collect::<Result<_>>()?;
    let h = sum_operators(chain.dim(), &terms)?.scale_real(12.0);
    LindbladModel::closed(*chain, h)
}

fn singlet_product(chain: &ChainSpec, first: usize) -> Result<StateVector> {
    let n = chain.n_sites;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pairs: Vec<[usize; 2]> = (0..n / 2)
        .map(|k| chain.link_sites(first + 2 * k))
        .collect::<Result<_>>()?;
    let dim = chain.dim();
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for (idx, amp) in amps.iter_mut().enumerate() {
        let mut v = 1.0;
        for &[a, b] in &pairs {
            let da = (idx / chain.stride(a)) % 2;
            let db = (idx / chain.stride(b)) % 2;
            v *= match (da, db) {
                (0, 1) => s,
                (1, 0) => -s,
                _ => 0.0,
            };
            if v == 0.0 {
                break;
            }
        }
        *amp = C64::new(v, 0.0);
    }
    Ok(StateVector::from_amplitudes(amps))
}

/// Dimer ground states `(ψ₋, ψ₊)`: singlets on links `(1,2),(3,4),...` and on
/// `(2,3),(4,5),...,(N,1)` respectively.
pub fn mg_ground_states(chain: &ChainSpec) -> Result<(TargetState, TargetState)> {
    require_mg_chain(chain)?;
    let minus = TargetState::new(singlet_product(chain, 1)?, "MG psi-", 0.0)?;
    let plus = TargetState::new(singlet_product(chain, 2)?, "MG psi+", 0.0)?;
    Ok((minus, plus))
}

/// The three Majumdar–Ghosh cooling operators on a link:
/// `|0,0⟩⟨1,1|`, `|0,0⟩⟨1,-1|`, `|0,0⟩⟨1,0|`.
pub fn mg_jumps(chain: &ChainSpec, link: usize) -> Result<Vec<Operator>> {
    require_mg_chain(chain)?;
    let singlet = link_state(Spin::HALF, 0, 0);
    [1, -1, 0]
        .iter()
        .map(|&m| link_outer(&singlet, &link_state(Spin::HALF, 2, m), link, chain))
        .collect()
}

/// `J_{2,x}` on one link: `Σ_{m=-2..1} |2,m⟩⟨2,m+1| + h.c.` with unit
/// coefficients, as a 9×9 link operator.
pub fn spin_two_hopping() -> Operator {
    let mut acc = Operator::zeros(9);
    for m in -2..=1 {
        let lo = link_state(Spin::ONE, 4, m);
        let hi = link_state(Spin::ONE, 4, m + 1);
        let t = Operator::outer(&lo, &hi).expect("same dimension");
        acc = &(&acc + &t) + &t.adjoint();
    }
    acc.with_hermitian_hint()
}

/// Coherent repair term `α Σ_links J_{2,x}`.
pub fn aklt_delta_h(chain: &ChainSpec, links: &[usize], alpha: f64) -> Result<Operator> {
    require_aklt_chain(chain)?;
    if links.is_empty() {
        return Err(invalid("the repair term needs at least one link"));
    }
    let local = spin_two_hopping();
    let terms: Vec<Operator> = links
        .iter()
        .map(|&l| embed(&local, &chain.link_sites(l)?, chain))
        .collect::<Result<_>>()?;
    Ok(sum_operators(chain.dim(), &terms)?.scale_real(alpha).with_hermitian_hint())
}

/// Links `(1,2), ..., (N-1,N)`: every link except the wrap-around one.
pub fn default_delta_h_links(chain: &ChainSpec) -> Vec<usize> {
    (1..chain.n_sites).collect()
}

fn qubit_chain_check(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid("need at least two qubits"));
    }
    if n > 30 {
        return Err(Error::CapacityExceeded { dim: n, limit: 30 });
    }
    Ok(())
}

/// `(|0...0⟩ + |1...1⟩)/√2`, with `|0⟩` the local basis index 0.
pub fn ghz_state(n: usize) -> Result<TargetState> {
    qubit_chain_check(n)?;
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] = C64::new(s, 0.0);
    amps[dim - 1] = C64::new(s, 0.0);
    TargetState::new(StateVector::from_amplitudes(amps), "GHZ", 0.0)
}

/// `(|0...0⟩ - |1...1⟩)/√2`.
pub fn antisymmetric_ghz_state(n: usize) -> Result<TargetState> {
    qubit_chain_check(n)?;
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] = C64::new(s, 0.0);
    amps[dim - 1] = C64::new(-s, 0.0);
    TargetState::new(StateVector::from_amplitudes(amps), "GHZ-", 0.0)
}

/// Equal superposition of all states with exactly one `|1⟩`.
pub fn w_state(n: usize) -> Result<TargetState> {
    qubit_chain_check(n)?;
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let a = 1.0 / (n as f64).sqrt();
    for k in 0..n {
        amps[1 << k] = C64::new(a, 0.0);
    }
    TargetState::new(StateVector::from_amplitudes(amps), "W", 0.0)
}

/// Jump operators `|c_k⟩⟨h_k|` mapping each hot link vector to a cold link
/// vector (cycling through the cold basis), embedded on the link. This is the
/// generic constructor for user-chosen hot→cold maps.
pub fn hot_to_cold_jumps(hot: &SubspaceBasis, cold: &SubspaceBasis, chain: &ChainSpec, link: usize) -> Result<Vec<Operator>> {
    let d2 = chain.local_dim().pow(2);
    check_dim(d2, hot.dim_ambient())?;
    check_dim(d2, cold.dim_ambient())?;
    if cold.is_empty() {
        return Err(Error::IncompatibleJumps("the cold subspace is empty".into()));
    }
    hot.vectors()
        .iter()
        .enumerate()
        .map(|(k, h)| link_outer(&cold.vectors()[k % cold.dim()], h, link, chain))
        .collect()
}

/// Supported model families for structured configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Aklt,
    Mg,
}

/// Serializable description of a cooling setup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescriptor {
    pub model: ModelKind,
    pub n_sites: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_cooled_links")]
    pub cooled_links: Vec<usize>,
    #[serde(default)]
    pub alpha: f64,
    /// Links carrying the repair term; `None` means every link but the last.
    #[serde(default)]
    pub delta_h_links: Option<Vec<usize>>,
}

fn default_gamma() -> f64 {
    0.1
}

fn default_cooled_links() -> Vec<usize> {
    vec![1]
}

impl ModelDescriptor {
    pub fn chain(&self) -> Result<ChainSpec> {
        let spin = match self.model {
            ModelKind::Aklt => Spin::ONE,
            ModelKind::Mg => Spin::HALF,
        };
        ChainSpec::periodic(self.n_sites, spin)
    }

    /// Builds the model with its jumps and the default target (the AKLT state
    /// or ψ₋).
    pub fn build(&self) -> Result<(LindbladModel, TargetState)> {
        let chain = self.chain()?;
        if self.cooled_links.is_empty() {
            return Err(invalid("at least one cooled link is required"));
        }
        let (model, target, jumps) = match self.model {
            ModelKind::Aklt => {
                let mut m = build_aklt(&chain)?;
                if self.alpha != 0.0 {
                    let links = self
                        .delta_h_links
                        .clone()
                        .unwrap_or_else(|| default_delta_h_links(&chain));
                    m = m.with_extra_hamiltonian(&aklt_delta_h(&chain, &links, self.alpha)?)?;
                }
                let mut jumps = Vec::new();
                for &l in &self.cooled_links {
                    jumps.extend(aklt_jumps(&chain, l)?);
                }
                (m, aklt_ground_state(&chain)?, jumps)
            }
            ModelKind::Mg => {
                if self.alpha != 0.0 {
                    return Err(invalid("the repair term is only defined for the AKLT model"));
                }
                let m = build_mg(&chain)?;
                let mut jumps = Vec::new();
                for &l in &self.cooled_links {
                    jumps.extend(mg_jumps(&chain, l)?);
                }
                (m, mg_ground_states(&chain)?.0, jumps)
            }
        };
        Ok((model.with_jumps(jumps, self.gamma)?, target))
    }
}
