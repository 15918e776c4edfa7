//! Spin operators, chain embeddings, total-spin projectors and coupled states.
//!
//! Conventions: the local basis index `k` corresponds to `m = s - k`, so index 0
//! is the highest weight. Site 1 is the most significant tensor factor. Sites
//! are 1-based and a periodic chain wraps site `N + 1` to site 1.

use std::fmt;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::operator::{sum_operators, Operator, StateVector};
use crate::C64;

/// A non-negative half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { twice: 1 };
    pub const ONE: Spin = Spin { twice: 2 };

    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    /// Parses a value such as `0.5`, `1` or `1.5`.
    pub fn new(value: f64) -> Result<Self> {
        let t = 2.0 * value;
        if !t.is_finite() || t < 0.0 || (t - t.round()).abs() > 1e-12 {
            return Err(invalid(format!("{value} is not a non-negative half-integer")));
        }
        Ok(Self { twice: t.round() as u32 })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Local dimension `2s + 1`.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// `s(s + 1)`.
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }

    /// Magnetic quantum number of local basis index `k`.
    pub fn m_of_index(self, k: usize) -> f64 {
        self.value() - k as f64
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Spin::new(v)
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.value()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Largest Hilbert space a chain may span; sparse operators on bigger
/// spaces no longer fit in memory.
pub const MAX_CHAIN_DIM: usize = 1 << 22;

/// Geometry of a spin chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub local_spin: Spin,
    pub boundary: Boundary,
}

impl ChainSpec {
    pub fn new(n_sites: usize, local_spin: Spin, boundary: Boundary) -> Result<Self> {
        if n_sites == 0 {
            return Err(invalid("a chain needs at least one site"));
        }
        if local_spin.twice() == 0 {
            return Err(invalid("local spin must be at least 1/2"));
        }
        let chain = Self {
            n_sites,
            local_spin,
            boundary,
        };
        let dim = chain
            .local_dim()
            .checked_pow(n_sites as u32)
            .ok_or_else(|| invalid("Hilbert space dimension overflows"))?;
        if dim > MAX_CHAIN_DIM {
            return Err(Error::CapacityExceeded {
                dim,
                limit: MAX_CHAIN_DIM,
            });
        }
        Ok(chain)
    }

    pub fn periodic(n_sites: usize, local_spin: Spin) -> Result<Self> {
        Self::new(n_sites, local_spin, Boundary::Periodic)
    }

    pub fn open(n_sites: usize, local_spin: Spin) -> Result<Self> {
        Self::new(n_sites, local_spin, Boundary::Open)
    }

    pub fn local_dim(&self) -> usize {
        self.local_spin.dim()
    }

    /// Total Hilbert space dimension `d^N`.
    pub fn dim(&self) -> usize {
        self.local_dim().pow(self.n_sites as u32)
    }

    /// Maps a 1-based site index onto `1..=N`, wrapping on periodic chains.
    pub fn wrap_site(&self, site: usize) -> Result<usize> {
        if site == 0 {
            return Err(invalid("sites are 1-based"));
        }
        if site <= self.n_sites {
            return Ok(site);
        }
        match self.boundary {
            Boundary::Periodic => Ok((site - 1) % self.n_sites + 1),
            Boundary::Open => Err(invalid(format!(
                "site {site} is outside an open chain of {} sites",
                self.n_sites
            ))),
        }
    }

    /// Sites `(i, i + 1)` of link `i`, after wrapping.
    pub fn link_sites(&self, link: usize) -> Result<[usize; 2]> {
        if link == 0 || link > self.n_sites {
            return Err(invalid(format!("link {link} out of range 1..={}", self.n_sites)));
        }
        let a = self.wrap_site(link)?;
        let b = self.wrap_site(link + 1)?;
        if a == b {
            return Err(invalid("a link needs two distinct sites"));
        }
        Ok([a, b])
    }

    /// All links of the chain: `1..=N` for periodic, `1..N` for open chains.
    pub fn links(&self) -> Vec<usize> {
        match self.boundary {
            Boundary::Periodic if self.n_sites >= 2 => (1..=self.n_sites).collect(),
            _ => (1..self.n_sites).collect(),
        }
    }

    /// Stride of the basis digit belonging to a 1-based site.
    pub fn stride(&self, site: usize) -> usize {
        self.local_dim().pow((self.n_sites - site) as u32)
    }
}

/// Returns `(Sx, Sy, Sz)` for spin `s` with Condon–Shortley phases.
pub fn spin_matrices(s: Spin) -> Result<(Operator, Operator, Operator)> {
    if s.twice() == 0 {
        return Err(invalid("spin must be at least 1/2"));
    }
    let (sp, sm, sz) = ladder_matrices(s);
    let sx = sp.add_scaled(&sm, C64::new(1.0, 0.0))?.scale_real(0.5).with_hermitian_hint();
    let sy = sp
        .add_scaled(&sm, C64::new(-1.0, 0.0))?
        .scale(C64::new(0.0, -0.5))
        .with_hermitian_hint();
    Ok((sx, sy, sz))
}

/// Returns `(S+, S-, Sz)`.
pub fn ladder_matrices(s: Spin) -> (Operator, Operator, Operator) {
    let d = s.dim();
    let sv = s.value();
    let mut plus = Vec::new();
    for k in 1..d {
        // S+ |m⟩ = sqrt(s(s+1) - m(m+1)) |m+1⟩, with |m⟩ at index k and |m+1⟩ at k-1
        let m = s.m_of_index(k);
        let amp = (sv * (sv + 1.0) - m * (m + 1.0)).sqrt();
        plus.push((k - 1, k, C64::new(amp, 0.0)));
    }
    let sp = Operator::from_triplets(d, plus).expect("indices in range");
    let sm = sp.adjoint();
    let sz = Operator::diagonal(&(0..d).map(|k| s.m_of_index(k)).collect::<Vec<_>>());
    (sp, sm, sz)
}

/// Embeds an operator acting on the listed (1-based) sites into the chain.
pub fn embed(local_op: &Operator, sites: &[usize], chain: &ChainSpec) -> Result<Operator> {
    let d = chain.local_dim();
    let k = sites.len();
    let expected = d
        .checked_pow(k as u32)
        .ok_or_else(|| invalid("too many sites"))?;
    check_dim(expected, local_op.dim())?;
    let wrapped: Vec<usize> = sites
        .iter()
        .map(|&s| chain.wrap_site(s))
        .collect::<Result<_>>()?;
    for (i, a) in wrapped.iter().enumerate() {
        if wrapped[i + 1..].contains(a) {
            return Err(invalid(format!("site {a} listed twice")));
        }
    }
    let strides: Vec<usize> = wrapped.iter().map(|&s| chain.stride(s)).collect();
    let dim = chain.dim();
    let local_rows: Vec<Vec<(usize, C64)>> = (0..expected).map(|r| local_op.row(r).collect()).collect();
    let mut triplets = Vec::with_capacity(dim * local_op.nnz() / expected.max(1) + 1);
    for b in 0..dim {
        let mut l = 0;
        let mut base = b;
        for &st in &strides {
            let digit = (b / st) % d;
            l = l * d + digit;
            base -= digit * st;
        }
        for &(lc, v) in &local_rows[l] {
            let mut c = base;
            let mut rem = lc;
            for &st in strides.iter().rev() {
                c += (rem % d) * st;
                rem /= d;
            }
            triplets.push((b, c, v));
        }
    }
    let out = Operator::from_triplets(dim, triplets)?;
    Ok(if local_op.hermitian_hint() {
        out.with_hermitian_hint()
    } else {
        out
    })
}

/// Components `(Jx, Jy, Jz)` of the total spin of `n` spins `s` on an open
/// register of `n` sites.
pub fn total_spin_components(n: usize, s: Spin) -> Result<[Operator; 3]> {
    let chain = ChainSpec::open(n, s)?;
    let (sx, sy, sz) = spin_matrices(s)?;
    let mut out = Vec::with_capacity(3);
    for op in [&sx, &sy, &sz] {
        let parts: Vec<Operator> = (1..=n).map(|i| embed(op, &[i], &chain)).collect::<Result<_>>()?;
        out.push(sum_operators(chain.dim(), &parts)?.with_hermitian_hint());
    }
    Ok([out.remove(0), out.remove(0), out.remove(0)])
}

/// `(Σ S_k)²` for `n` spins `s`.
pub fn total_spin_squared(n: usize, s: Spin) -> Result<Operator> {
    let [jx, jy, jz] = total_spin_components(n, s)?;
    let terms = [&jx * &jx, &jy * &jy, &jz * &jz];
    Ok(sum_operators(jx.dim(), &terms)?.with_hermitian_hint())
}

/// Total spins that occur when coupling `n` spins `s`, ascending.
pub fn admissible_total_spins(n: usize, s: Spin) -> Vec<Spin> {
    // multiplicity of J is #(M = J) - #(M = J + 1); count M values via twice-M
    let d = s.dim();
    let max_twice = n as i64 * s.twice() as i64;
    let mut counts = vec![0u64; (2 * max_twice + 1) as usize];
    counts[max_twice as usize] = 1;
    let mut current = vec![0u64; counts.len()];
    current[max_twice as usize] = 1;
    for _ in 0..n {
        let mut next = vec![0u64; counts.len()];
        for (idx, &c) in current.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for k in 0..d {
                let delta = s.twice() as i64 - 2 * k as i64;
                let j = idx as i64 + delta;
                if j >= 0 && (j as usize) < next.len() {
                    next[j as usize] += c;
                }
            }
        }
        current = next;
    }
    counts = current;
    let count_at = |twice_m: i64| -> u64 {
        let idx = twice_m + max_twice;
        if idx < 0 || idx as usize >= counts.len() {
            0
        } else {
            counts[idx as usize]
        }
    };
    let parity = max_twice % 2;
    (0..=max_twice)
        .filter(|t| t % 2 == parity)
        .filter(|&t| count_at(t) > count_at(t + 2))
        .map(|t| Spin::from_twice(t as u32))
        .collect()
}

/// Projector onto total spin `j` of `n` coupled spins `s`, built from the
/// spectral polynomial of the total-spin Casimir.
pub fn total_spin_projector(n: usize, s: Spin, j: Spin) -> Result<Operator> {
    let allowed = admissible_total_spins(n, s);
    if !allowed.contains(&j) {
        return Err(invalid(format!(
            "J = {j} is not admissible for {n} spins {s}"
        )));
    }
    let j2 = total_spin_squared(n, s)?;
    let dim = j2.dim();
    let mut p = Operator::identity(dim);
    for &other in allowed.iter().filter(|&&o| o != j) {
        let shift = other.casimir();
        let denom = j.casimir() - shift;
        let factor = j2
            .add_scaled(&Operator::identity(dim), C64::new(-shift, 0.0))?
            .scale_real(1.0 / denom);
        p = &p * &factor;
    }
    Ok(p.with_hermitian_hint())
}

/// Coupled state `|J, mJ⟩` of `n` spins `s`. When the multiplet is degenerate
/// the copy with the smallest intermediate spins is returned (sequential
/// coupling `((1,2),3),...`, singlet-first).
pub fn coupled_basis_state(n: usize, s: Spin, j: Spin, m_twice: i32) -> Result<StateVector> {
    coupled_basis_states(n, s, j, m_twice)?
        .into_iter()
        .next()
        .ok_or_else(|| invalid(format!("J = {j} is not admissible for {n} spins {s}")))
}

/// All copies of `|J, mJ⟩` ordered by intermediate coupling path
/// (lexicographic, smallest intermediate spin first).
pub fn coupled_basis_states(n: usize, s: Spin, j: Spin, m_twice: i32) -> Result<Vec<StateVector>> {
    if n == 0 {
        return Err(invalid("need at least one spin"));
    }
    check_m(j, m_twice)?;
    if n == 1 {
        if j != s {
            return Err(invalid(format!("a single spin {s} has no J = {j} state")));
        }
        let k = ((s.twice() as i32 - m_twice) / 2) as usize;
        return Ok(vec![StateVector::basis(s.dim(), k)]);
    }
    let paths = coupling_paths(n, s, j);
    if paths.is_empty() {
        return Err(invalid(format!("J = {j} is not admissible for {n} spins {s}")));
    }
    paths
        .iter()
        .map(|p| coupled_basis_state_path(s, p, m_twice))
        .collect()
}

fn check_m(j: Spin, m_twice: i32) -> Result<()> {
    let jt = j.twice() as i32;
    if m_twice.abs() > jt || (jt - m_twice) % 2 != 0 {
        return Err(invalid(format!(
            "m = {}/2 is not a valid projection for J = {j}",
            m_twice
        )));
    }
    Ok(())
}

/// Sequences of intermediate spins `[j_12, j_123, ..., J]` coupling `n >= 2`
/// spins `s` to total `j`, in lexicographic order.
pub fn coupling_paths(n: usize, s: Spin, j: Spin) -> Vec<Vec<Spin>> {
    fn rec(prefix: &mut Vec<Spin>, remaining: usize, s: Spin, target: Spin, out: &mut Vec<Vec<Spin>>) {
        let current = *prefix.last().expect("nonempty");
        if remaining == 0 {
            if current == target {
                out.push(prefix[1..].to_vec());
            }
            return;
        }
        let lo = (current.twice() as i64 - s.twice() as i64).unsigned_abs() as u32;
        let hi = current.twice() + s.twice();
        let mut t = lo;
        while t <= hi {
            prefix.push(Spin::from_twice(t));
            rec(prefix, remaining - 1, s, target, out);
            prefix.pop();
            t += 2;
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut prefix = vec![s];
    rec(&mut prefix, n - 1, s, j, &mut out);
    out
}

/// Coupled state along an explicit path of intermediate spins. The path holds
/// `n - 1` entries for `n` spins; its last entry is the total spin.
pub fn coupled_basis_state_path(s: Spin, path: &[Spin], m_twice: i32) -> Result<StateVector> {
    if path.is_empty() {
        return Err(invalid("empty coupling path"));
    }
    let n = path.len() + 1;
    let total = *path.last().expect("nonempty");
    check_m(total, m_twice)?;
    // highest weight of the first spin: basis index 0
    let mut ja = s;
    let mut hw = StateVector::basis(s.dim(), 0);
    let mut n_done = 1usize;
    for &jn in path {
        hw = couple_highest_weight(&hw, n_done, ja, s, jn)?;
        ja = jn;
        n_done += 1;
    }
    debug_assert_eq!(n_done, n);
    lower_to(hw, n_done, s, total, m_twice)
}

/// Given the highest-weight state `|ja, ja⟩` of `n_a` spins, returns the
/// highest-weight state `|J, J⟩` of `n_a + 1` spins.
fn couple_highest_weight(hw_a: &StateVector, n_a: usize, ja: Spin, s: Spin, j: Spin) -> Result<StateVector> {
    let lo = (ja.twice() as i64 - s.twice() as i64).unsigned_abs() as u32;
    if j.twice() < lo || j.twice() > ja.twice() + s.twice() || !(j.twice() + ja.twice() + s.twice()).is_multiple_of(2) {
        return Err(invalid(format!("cannot couple {ja} and {s} to {j}")));
    }
    let d = s.dim();
    let ja_v = ja.value();
    let s_v = s.value();
    let j_v = j.value();
    // states |ja, ma⟩ by lowering the highest weight of the first block
    let (_, jm_a, _) = total_ladders(n_a, s)?;
    let mut a_states = vec![hw_a.clone()];
    let mut cur = hw_a.clone();
    let mut ma = ja_v;
    while ma > -ja_v + 1e-9 {
        let norm = (ja_v * (ja_v + 1.0) - ma * (ma - 1.0)).sqrt();
        cur = jm_a.apply_state(&cur)?.scaled(C64::new(1.0 / norm, 0.0));
        a_states.push(cur.clone());
        ma -= 1.0;
    }
    // coefficients c(ma) for ma = ja down to max(-ja, J - s)
    let mut coeffs: Vec<(f64, f64)> = Vec::new(); // (ma, c)
    let mut c = 1.0;
    let mut ma = ja_v;
    let ma_min = (-ja_v).max(j_v - s_v);
    loop {
        coeffs.push((ma, c));
        if ma - 1.0 < ma_min - 1e-9 {
            break;
        }
        // c(ma-1) from c(ma): c(x) = -c(x+1) b+(mb-1)/a+(x), x = ma - 1, mb = J - x
        let x = ma - 1.0;
        let mb = j_v - x;
        let bp = (s_v * (s_v + 1.0) - (mb - 1.0) * mb).sqrt();
        let ap = (ja_v * (ja_v + 1.0) - x * (x + 1.0)).sqrt();
        c = -c * bp / ap;
        ma = x;
    }
    let dim_a = hw_a.dim();
    let mut out = vec![C64::new(0.0, 0.0); dim_a * d];
    for &(ma, c) in &coeffs {
        let ia = (ja_v - ma).round() as usize;
        let mb = j_v - ma;
        let kb = (s_v - mb).round() as usize;
        for (r, amp) in a_states[ia].amplitudes().iter().enumerate() {
            out[r * d + kb] += amp * c;
        }
    }
    StateVector::from_amplitudes(out).normalized()
}

fn lower_to(hw: StateVector, n: usize, s: Spin, j: Spin, m_twice: i32) -> Result<StateVector> {
    let (_, jm, _) = total_ladders(n, s)?;
    let jv = j.value();
    let mut state = hw;
    let mut m_t = j.twice() as i32;
    while m_t > m_twice {
        let m = m_t as f64 / 2.0;
        let norm = (jv * (jv + 1.0) - m * (m - 1.0)).sqrt();
        state = jm.apply_state(&state)?.scaled(C64::new(1.0 / norm, 0.0));
        m_t -= 2;
    }
    Ok(state)
}

/// `(J+, J-, Jz)` for `n` spins `s`.
pub fn total_ladders(n: usize, s: Spin) -> Result<(Operator, Operator, Operator)> {
    let chain = ChainSpec::open(n, s)?;
    let (sp, sm, sz) = ladder_matrices(s);
    let mut out = Vec::with_capacity(3);
    for op in [&sp, &sm, &sz] {
        let parts: Vec<Operator> = (1..=n).map(|i| embed(op, &[i], &chain)).collect::<Result<_>>()?;
        out.push(sum_operators(chain.dim(), &parts)?);
    }
    Ok((out.remove(0), out.remove(0), out.remove(0)))
}

/// Reduced density matrix of a pure state on the listed sites (in the order
/// given; the first listed site is the most significant factor).
pub fn reduced_density_matrix(state: &StateVector, sites: &[usize], chain: &ChainSpec) -> Result<Mat<C64>> {
    check_dim(chain.dim(), state.dim())?;
    let d = chain.local_dim();
    let wrapped: Vec<usize> = sites.iter().map(|&s| chain.wrap_site(s)).collect::<Result<_>>()?;
    let k = wrapped.len();
    let dk = d.pow(k as u32);
    let rest_sites: Vec<usize> = (1..=chain.n_sites).filter(|s| !wrapped.contains(s)).collect();
    let dr = d.pow(rest_sites.len() as u32);
    let kept_strides: Vec<usize> = wrapped.iter().map(|&s| chain.stride(s)).collect();
    let rest_strides: Vec<usize> = rest_sites.iter().map(|&s| chain.stride(s)).collect();
    let index = |strides: &[usize], idx: usize| -> usize {
        let mut rem = idx;
        let mut out = 0;
        for st in strides.iter().rev() {
            out += (rem % d) * st;
            rem /= d;
        }
        out
    };
    let amps = state.amplitudes();
    let psi = Mat::<C64>::from_fn(dk, dr, |a, r| amps[index(&kept_strides, a) + index(&rest_strides, r)]);
    Ok(&psi * psi.adjoint())
}

/// Local factor of an operator supported on `sites`: `Tr_rest(op) / d^(N-k)`,
/// which recovers `A` from `A ⊗ 𝟙`.
pub fn local_factor(op: &Operator, sites: &[usize], chain: &ChainSpec) -> Result<Mat<C64>> {
    check_dim(chain.dim(), op.dim())?;
    let d = chain.local_dim();
    let wrapped: Vec<usize> = sites.iter().map(|&s| chain.wrap_site(s)).collect::<Result<_>>()?;
    let dk = d.pow(wrapped.len() as u32);
    let dr = chain.dim() / dk;
    let strides: Vec<usize> = wrapped.iter().map(|&s| chain.stride(s)).collect();
    let split = |idx: usize| -> (usize, usize) {
        let mut l = 0;
        let mut base = idx;
        for &st in &strides {
            let digit = (idx / st) % d;
            l = l * d + digit;
            base -= digit * st;
        }
        (l, base)
    };
    let mut out = Mat::<C64>::zeros(dk, dk);
    for (r, c, v) in op.triplets() {
        let (lr, br) = split(r);
        let (lc, bc) = split(c);
        if br == bc {
            out[(lr, lc)] += v;
        }
    }
    Ok(out * faer::Scale(C64::new(1.0 / dr as f64, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    fn close(a: &Operator, b: &Operator, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn spin_half_sz() {
        let (_, _, sz) = spin_matrices(Spin::HALF).unwrap();
        assert_eq!(sz.get(0, 0), C64::new(0.5, 0.0));
        assert_eq!(sz.get(1, 1), C64::new(-0.5, 0.0));
    }

    #[test]
    fn commutation_relations() {
        for twice in 1..=4 {
            let s = Spin::from_twice(twice);
            let (sx, sy, sz) = spin_matrices(s).unwrap();
            let i = C64::new(0.0, 1.0);
            assert!(close(&sx.commutator(&sy).unwrap(), &sz.scale(i), 1e-12));
            assert!(close(&sy.commutator(&sz).unwrap(), &sx.scale(i), 1e-12));
            assert!(close(&sz.commutator(&sx).unwrap(), &sy.scale(i), 1e-12));
            let cas = sum_operators(s.dim(), &[&sx * &sx, &sy * &sy, &sz * &sz]).unwrap();
            assert!(close(&cas, &Operator::identity(s.dim()).scale_real(s.casimir()), 1e-12));
        }
    }

    #[test]
    fn spin_one_sx_spectrum() {
        let (sx, _, _) = spin_matrices(Spin::ONE).unwrap();
        let vals = linalg::hermitian_eigenvalues(&sx.to_dense()).unwrap();
        for (v, want) in vals.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_half_integer() {
        assert!(Spin::new(0.3).is_err());
        assert!(Spin::new(-1.0).is_err());
        assert_eq!(Spin::new(1.5).unwrap().twice(), 3);
    }

    #[test]
    fn embed_identity_and_trace() {
        let chain = ChainSpec::periodic(3, Spin::ONE).unwrap();
        let id = embed(&Operator::identity(9), &[2, 3], &chain).unwrap();
        assert!(close(&id, &Operator::identity(27), 0.0));
        let (sx, _, sz) = spin_matrices(Spin::ONE).unwrap();
        let a = &(&sx * &sz) + &sz;
        let e = embed(&a, &[1], &chain).unwrap();
        assert!((e.trace() - a.trace() * 9.0).norm() < 1e-12);
    }

    #[test]
    fn embed_total_magnetization() {
        let chain = ChainSpec::open(2, Spin::HALF).unwrap();
        let (_, _, sz) = spin_matrices(Spin::HALF).unwrap();
        let m = &embed(&sz, &[1], &chain).unwrap() + &embed(&sz, &[2], &chain).unwrap();
        for (i, want) in [1.0, 0.0, 0.0, -1.0].iter().enumerate() {
            assert!((m.get(i, i).re - want).abs() < 1e-15);
        }
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn embed_homomorphism_and_wrap() {
        let chain = ChainSpec::periodic(3, Spin::ONE).unwrap();
        let (sx, sy, _) = spin_matrices(Spin::ONE).unwrap();
        let lhs = &embed(&sx, &[3], &chain).unwrap() * &embed(&sy, &[1], &chain).unwrap();
        let rhs = embed(&sx.kron(&sy), &[3, 4], &chain).unwrap();
        assert!(close(&lhs, &rhs, 1e-14));
        let open = ChainSpec::open(3, Spin::ONE).unwrap();
        assert!(embed(&sx.kron(&sy), &[3, 4], &open).is_err());
        assert!(embed(&sx, &[1, 2], &chain).is_err());
    }

    #[test]
    fn two_spin_one_projectors() {
        let ps: Vec<Operator> = (0..=2)
            .map(|j| total_spin_projector(2, Spin::ONE, Spin::from_twice(2 * j)).unwrap())
            .collect();
        let ranks: Vec<f64> = ps.iter().map(|p| p.trace().re).collect();
        assert!((ranks[0] - 1.0).abs() < 1e-10);
        assert!((ranks[1] - 3.0).abs() < 1e-10);
        assert!((ranks[2] - 5.0).abs() < 1e-10);
        let sum = sum_operators(9, &ps).unwrap();
        assert!(close(&sum, &Operator::identity(9), 1e-10));
        for (a, pa) in ps.iter().enumerate() {
            for (b, pb) in ps.iter().enumerate() {
                let prod = pa * pb;
                let want = if a == b { pa.clone() } else { Operator::zeros(9) };
                assert!(close(&prod, &want, 1e-10));
            }
        }
    }

    #[test]
    fn projector_matches_eigendecomposition() {
        let j2 = total_spin_squared(2, Spin::ONE).unwrap();
        let (vals, vecs) = linalg::hermitian_eigen(&j2.to_dense()).unwrap();
        let mut oracle = Mat::<C64>::zeros(9, 9);
        for (k, &v) in vals.iter().enumerate() {
            if (v - 6.0).abs() < 1e-8 {
                let col = vecs.col(k);
                for i in 0..9 {
                    for j in 0..9 {
                        oracle[(i, j)] += col[i] * col[j].conj();
                    }
                }
            }
        }
        let p2 = total_spin_projector(2, Spin::ONE, Spin::from_twice(4)).unwrap();
        assert!(linalg::max_abs(&(&p2.to_dense() - &oracle)) < 1e-10);
    }

    #[test]
    fn three_spin_half_projectors() {
        let p32 = total_spin_projector(3, Spin::HALF, Spin::from_twice(3)).unwrap();
        let p12 = total_spin_projector(3, Spin::HALF, Spin::from_twice(1)).unwrap();
        assert!((p32.trace().re - 4.0).abs() < 1e-10);
        assert!((p12.trace().re - 4.0).abs() < 1e-10);
        assert!(total_spin_projector(3, Spin::HALF, Spin::ONE).is_err());
    }

    #[test]
    fn admissible_spins() {
        let v: Vec<u32> = admissible_total_spins(3, Spin::ONE).iter().map(|s| s.twice()).collect();
        assert_eq!(v, vec![0, 2, 4, 6]);
        let v: Vec<u32> = admissible_total_spins(3, Spin::HALF).iter().map(|s| s.twice()).collect();
        assert_eq!(v, vec![1, 3]);
    }

    #[test]
    fn highest_weight_product_state() {
        let st = coupled_basis_state(2, Spin::ONE, Spin::from_twice(4), 4).unwrap();
        assert!(st.max_abs_diff(&StateVector::basis(9, 0)) < 1e-15);
    }

    #[test]
    fn singlet_of_two_qubits() {
        let st = coupled_basis_state(2, Spin::HALF, Spin::from_twice(0), 0).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let want = StateVector::from_real(&[0.0, s, -s, 0.0]);
        assert!(st.max_abs_diff(&want) < 1e-14);
        // independent oracle: the singlet spans the null space of the triplet projector
        let p1 = total_spin_projector(2, Spin::HALF, Spin::ONE).unwrap();
        assert!(p1.apply_state(&st).unwrap().norm() < 1e-12);
    }

    #[test]
    fn coupled_states_are_eigenvectors() {
        for (n, s) in [(2, Spin::ONE), (2, Spin::HALF), (3, Spin::HALF), (3, Spin::ONE), (2, Spin::from_twice(3))] {
            let j2 = total_spin_squared(n, s).unwrap();
            let (jp, jm, jz) = total_ladders(n, s).unwrap();
            for j in admissible_total_spins(n, s) {
                for copy in coupled_basis_states(n, s, j, j.twice() as i32).unwrap().iter().enumerate().map(|(k, _)| k) {
                    let mut mt = j.twice() as i32;
                    while mt >= -(j.twice() as i32) {
                        let st = &coupled_basis_states(n, s, j, mt).unwrap()[copy];
                        assert!(st.is_normalized());
                        let jv = j.value();
                        let m = mt as f64 / 2.0;
                        let r = j2.apply_state(st).unwrap();
                        assert!(r.max_abs_diff(&st.scaled(C64::new(jv * (jv + 1.0), 0.0))) < 1e-10);
                        let z = jz.apply_state(st).unwrap();
                        assert!(z.max_abs_diff(&st.scaled(C64::new(m, 0.0))) < 1e-10);
                        if mt < j.twice() as i32 {
                            let up = &coupled_basis_states(n, s, j, mt + 2).unwrap()[copy];
                            let amp = (jv * (jv + 1.0) - m * (m + 1.0)).sqrt();
                            let r = jp.apply_state(st).unwrap();
                            assert!(r.max_abs_diff(&up.scaled(C64::new(amp, 0.0))) < 1e-10);
                        }
                        if mt > -(j.twice() as i32) {
                            let dn = &coupled_basis_states(n, s, j, mt - 2).unwrap()[copy];
                            let amp = (jv * (jv + 1.0) - m * (m - 1.0)).sqrt();
                            let r = jm.apply_state(st).unwrap();
                            assert!(r.max_abs_diff(&dn.scaled(C64::new(amp, 0.0))) < 1e-10);
                        }
                        mt -= 2;
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_copies_are_orthonormal_and_singlet_first() {
        let copies = coupled_basis_states(3, Spin::HALF, Spin::HALF, 1).unwrap();
        assert_eq!(copies.len(), 2);
        assert!(copies[0].inner(&copies[1]).norm() < 1e-12);
        // first copy has a singlet on sites (1,2)
        let chain = ChainSpec::open(3, Spin::HALF).unwrap();
        let p1 = total_spin_projector(2, Spin::HALF, Spin::ONE).unwrap();
        let e = embed(&p1, &[1, 2], &chain).unwrap();
        assert!(e.apply_state(&copies[0]).unwrap().norm() < 1e-12);
    }

    #[test]
    fn invalid_projection_is_rejected() {
        assert!(coupled_basis_state(2, Spin::ONE, Spin::ONE, 4).is_err());
        assert!(coupled_basis_state(2, Spin::ONE, Spin::ONE, 1).is_err());
    }

    #[test]
    fn reduced_density_of_product_state() {
        let chain = ChainSpec::open(3, Spin::HALF).unwrap();
        // |0⟩ ⊗ |+⟩ ⊗ |1⟩ (index 0 = up)
        let s = 1.0 / 2f64.sqrt();
        let psi = StateVector::from_real(&[1.0, 0.0])
            .kron(&StateVector::from_real(&[s, s]))
            .kron(&StateVector::from_real(&[0.0, 1.0]));
        let r = reduced_density_matrix(&psi, &[2], &chain).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[(i, j)].re - 0.5).abs() < 1e-14);
            }
        }
        let r13 = reduced_density_matrix(&psi, &[3, 1], &chain).unwrap();
        // site 3 is |1⟩ (index 1), site 1 is |0⟩: combined index 1*2 + 0 = 2
        assert!((r13[(2, 2)].re - 1.0).abs() < 1e-14);
    }
}
