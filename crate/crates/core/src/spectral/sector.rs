//! Symmetry-adapted blocks for Hamiltonian-type operators.
//!
//! Three symmetries are detected numerically and used only when every operator
//! involved respects them:
//!
//! - conservation of total `Sz` (basis states are grouped by magnetisation);
//! - full SU(2) invariance with a spin-singlet target, in which case only the
//!   lowest `|M|` sector is kept (every multiplet has a member there and
//!   scalar operators act identically on all members);
//! - a site reflection that maps the chain onto itself around a link.

use faer::Mat;

use crate::error::Result;
use crate::operator::{Operator, StateVector};
use crate::spin::{embed, ladder_matrices, ChainSpec};
use crate::C64;

const SYMMETRY_TOL: f64 = 1e-12;

/// A sparse real isometry: each column is a normalised combination of
/// computational basis states, and distinct columns have disjoint supports.
#[derive(Clone, Debug)]
pub struct Sector {
    pub label: String,
    dim_ambient: usize,
    columns: Vec<Vec<(usize, f64)>>,
}

impl Sector {
    pub fn full(dim: usize) -> Self {
        Self {
            label: "full".into(),
            dim_ambient: dim,
            columns: (0..dim).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    fn index_map(&self) -> Vec<Vec<(usize, f64)>> {
        let mut map = vec![Vec::new(); self.dim_ambient];
        for (j, col) in self.columns.iter().enumerate() {
            for &(b, a) in col {
                map[b].push((j, a));
            }
        }
        map
    }

    /// Dense block `V† A V`.
    pub fn compress(&self, op: &Operator) -> Mat<C64> {
        let map = self.index_map();
        let k = self.dim();
        let mut m = Mat::<C64>::zeros(k, k);
        for (i, col) in self.columns.iter().enumerate() {
            for &(b, a) in col {
                for (c, v) in op.row(b) {
                    for &(j, a2) in &map[c] {
                        m[(i, j)] += v * (a * a2);
                    }
                }
            }
        }
        m
    }

    /// Coordinates `V† ψ`.
    pub fn restrict(&self, v: &StateVector) -> Vec<C64> {
        let amps = v.amplitudes();
        self.columns
            .iter()
            .map(|col| col.iter().map(|&(b, a)| amps[b] * a).sum())
            .collect()
    }

    /// Ambient vector `V x`.
    pub fn extend(&self, x: &[C64]) -> StateVector {
        let mut out = vec![C64::new(0.0, 0.0); self.dim_ambient];
        for (col, &xj) in self.columns.iter().zip(x) {
            for &(b, a) in col {
                out[b] += xj * a;
            }
        }
        StateVector::from_amplitudes(out)
    }
}

/// Twice the total magnetisation of each basis state.
fn magnetisations(chain: &ChainSpec) -> Vec<i32> {
    let d = chain.local_dim();
    let twice_s = chain.local_spin.twice() as i32;
    (0..chain.dim())
        .map(|mut idx| {
            let mut m = 0;
            for _ in 0..chain.n_sites {
                m += twice_s - 2 * (idx % d) as i32;
                idx /= d;
            }
            m
        })
        .collect()
}

fn conserves_magnetisation(op: &Operator, mags: &[i32]) -> bool {
    op.triplets().all(|(r, c, _)| mags[r] == mags[c])
}

fn total_raising(chain: &ChainSpec) -> Result<Operator> {
    let (sp, _, _) = ladder_matrices(chain.local_spin);
    let parts: Vec<Operator> = (1..=chain.n_sites)
        .map(|i| embed(&sp, &[i], chain))
        .collect::<Result<_>>()?;
    crate::operator::sum_operators(chain.dim(), &parts)
}

/// Site permutation of the reflection about `link`: site `i` goes to
/// `2·link + 1 - i` (mod N).
fn reflection_permutation(chain: &ChainSpec, link: usize) -> Vec<usize> {
    let n = chain.n_sites as i64;
    let d = chain.local_dim();
    let site_map: Vec<usize> = (1..=n)
        .map(|i| ((2 * link as i64 + 1 - i - 1).rem_euclid(n) + 1) as usize)
        .collect();
    (0..chain.dim())
        .map(|idx| {
            let mut out = 0;
            for site in 1..=chain.n_sites {
                let digit = (idx / chain.stride(site)) % d;
                out += digit * chain.stride(site_map[site - 1]);
            }
            out
        })
        .collect()
}

fn commutes_with_permutation(op: &Operator, perm: &[usize]) -> bool {
    op.triplets()
        .all(|(r, c, v)| (op.get(perm[r], perm[c]) - v).norm() <= SYMMETRY_TOL)
}

fn is_spin_singlet(v: &StateVector, jplus: &Operator, mags: &[i32]) -> bool {
    let tol = 1e-9;
    let mz: f64 = v
        .amplitudes()
        .iter()
        .zip(mags)
        .map(|(a, &m)| a.norm_sqr() * (m as f64).abs())
        .sum();
    mz < tol && jplus.apply(v.amplitudes()).iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt() < tol
}

/// Symmetry sectors shared by all `ops` and compatible with `target` (when
/// given, the target lies inside exactly one returned sector). Returns the
/// sectors and the index of the one holding the target.
pub fn symmetry_sectors(
    chain: &ChainSpec,
    ops: &[&Operator],
    target: Option<&StateVector>,
) -> Result<(Vec<Sector>, Option<usize>)> {
    let dim = chain.dim();
    let mags = magnetisations(chain);
    let conserve = ops.iter().all(|op| conserves_magnetisation(op, &mags));
    let mut blocks: Vec<(String, Vec<usize>)> = Vec::new();
    if conserve {
        let jp = total_raising(chain)?;
        let su2 = ops.iter().all(|op| {
            op.commutator(&jp).map(|c| c.max_abs() <= 1e-10).unwrap_or(false)
        });
        let singlet_target = target.is_none_or(|t| is_spin_singlet(t, &jp, &mags));
        let m_min = mags.iter().map(|m| m.abs()).min().unwrap_or(0);
        let mut values: Vec<i32> = mags.clone();
        values.sort_unstable();
        values.dedup();
        for m in values {
            if su2 && singlet_target && m != m_min {
                continue;
            }
            let members: Vec<usize> = (0..dim).filter(|&i| mags[i] == m).collect();
            blocks.push((format!("2M={m}"), members));
        }
    } else {
        blocks.push(("full".into(), (0..dim).collect()));
    }

    let reflection = (1..=chain.n_sites).find_map(|link| {
        if chain.n_sites < 3 {
            return None;
        }
        let perm = reflection_permutation(chain, link);
        if ops.iter().all(|op| commutes_with_permutation(op, &perm)) {
            Some(perm)
        } else {
            None
        }
    });

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut sectors = Vec::new();
    for (label, members) in &blocks {
        match &reflection {
            Some(perm) => {
                let mut even = Vec::new();
                let mut odd = Vec::new();
                for &b in members {
                    let rb = perm[b];
                    if rb == b {
                        even.push(vec![(b, 1.0)]);
                    } else if b < rb {
                        even.push(vec![(b, s), (rb, s)]);
                        odd.push(vec![(b, s), (rb, -s)]);
                    }
                }
                for (par, cols) in [("+", even), ("-", odd)] {
                    if !cols.is_empty() {
                        sectors.push(Sector {
                            label: format!("{label},R{par}"),
                            dim_ambient: dim,
                            columns: cols,
                        });
                    }
                }
            }
            None => sectors.push(Sector {
                label: label.clone(),
                dim_ambient: dim,
                columns: members.iter().map(|&b| vec![(b, 1.0)]).collect(),
            }),
        }
    }

    let Some(t) = target else {
        return Ok((sectors, None));
    };
    let weights: Vec<f64> = sectors
        .iter()
        .map(|s| s.restrict(t).iter().map(|a| a.norm_sqr()).sum())
        .collect();
    let total: f64 = t.norm_sqr();
    if let Some(k) = weights.iter().position(|&w| (w - total).abs() <= 1e-10 * total.max(1.0)) {
        return Ok((sectors, Some(k)));
    }
    if reflection.is_some() {
        // target breaks the reflection: redo without it
        let no_reflect: Vec<Sector> = blocks
            .into_iter()
            .map(|(label, members)| Sector {
                label,
                dim_ambient: dim,
                columns: members.iter().map(|&b| vec![(b, 1.0)]).collect(),
            })
            .collect();
        let k = no_reflect.iter().position(|s| {
            let w: f64 = s.restrict(t).iter().map(|a| a.norm_sqr()).sum();
            (w - total).abs() <= 1e-10 * total.max(1.0)
        });
        if let Some(k) = k {
            return Ok((no_reflect, Some(k)));
        }
    }
    Ok((vec![Sector::full(dim)], Some(0)))
}
