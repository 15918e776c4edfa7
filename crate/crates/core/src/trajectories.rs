//! Quantum-jump unravelling of the master equation, bootstrap statistics and
//! gap fits.
//!
//! Between jumps a trajectory evolves under `exp(-i H_eff t)` with
//! `H_eff = H - (iγ/2) Σ L†L`. Propagators for the base step `h` and its dyadic
//! fractions `h / 2^k` are precomputed densely; a step whose squared norm would
//! fall below the trajectory's random threshold is bisected until the finest
//! level, where the jump is applied. The jump channel is drawn with weights
//! `‖L_j ψ‖²`.

use std::io::{Read, Write};

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg;
use crate::models::{LindbladModel, TargetState};
use crate::operator::{Operator, StateVector};
use crate::C64;

/// Largest Hilbert dimension the dense propagator tables accept.
pub const MAX_TRAJECTORY_DIM: usize = 1024;
/// Floor applied to `1 - overlap` before taking logarithms.
pub const OVERLAP_FLOOR: f64 = 1e-14;

/// Initial state of every trajectory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Independent Haar-random pure state per trajectory (ensemble average
    /// `I / D`).
    #[default]
    Haar,
    /// Computational basis state.
    Basis(usize),
    /// The target itself.
    Target,
    Vector(Vec<C64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrajectoryConfig {
    pub n_trajectories: usize,
    /// Final time of the recording grid.
    pub t_max: f64,
    /// Number of grid points, `0` and `t_max` included.
    pub n_times: usize,
    pub seed: u64,
    pub initial: InitialState,
    /// Largest propagation step; `None` uses the grid spacing.
    pub max_step: Option<f64>,
    /// Number of bisection levels used to locate a jump inside a step.
    pub refine_levels: u32,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            n_trajectories: 1000,
            t_max: 100.0,
            n_times: 101,
            seed: 0,
            initial: InitialState::Haar,
            max_step: None,
            refine_levels: 12,
        }
    }
}

impl TrajectoryConfig {
    pub fn time_grid(&self) -> Vec<f64> {
        if self.n_times == 1 {
            return vec![0.0];
        }
        let dt = self.t_max / (self.n_times - 1) as f64;
        (0..self.n_times).map(|k| k as f64 * dt).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.n_trajectories == 0 {
            return Err(invalid("n_trajectories must be positive"));
        }
        if self.n_times < 2 {
            return Err(invalid("the time grid needs at least two points"));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(invalid("t_max must be positive and finite"));
        }
        if let Some(s) = self.max_step {
            if !(s > 0.0) {
                return Err(invalid("max_step must be positive"));
            }
        }
        if self.refine_levels > 40 {
            return Err(invalid("refine_levels must be at most 40"));
        }
        Ok(())
    }
}

/// Overlaps `|⟨ψ_⊕|ψ(t)⟩|²` of every trajectory on the time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEnsemble {
    pub time_grid: Vec<f64>,
    /// `n_traj × n_times`, row per trajectory.
    pub per_trajectory_overlaps: Vec<Vec<f64>>,
    /// RNG seed of each trajectory, derived from the master seed and index.
    pub seeds_used: Vec<u64>,
    pub jump_counts: Vec<usize>,
    pub master_seed: u64,
}

impl TrajectoryEnsemble {
    pub fn n_trajectories(&self) -> usize {
        self.per_trajectory_overlaps.len()
    }

    pub fn n_times(&self) -> usize {
        self.time_grid.len()
    }

    /// Plain ensemble average at each grid time.
    pub fn mean_overlap(&self) -> Vec<f64> {
        let n = self.n_trajectories() as f64;
        (0..self.n_times())
            .map(|k| self.per_trajectory_overlaps.iter().map(|row| row[k]).sum::<f64>() / n)
            .collect()
    }
}

/// Seed of trajectory `index` (SplitMix64 finaliser of the pair).
pub fn trajectory_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Haar-random pure state of dimension `dim`.
pub fn haar_state<R: Rng>(dim: usize, rng: &mut R) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(v) = StateVector::from_amplitudes(amps).normalized() {
            return v;
        }
    }
}

struct Propagators {
    /// `levels[k] = exp(-i H_eff h / 2^k)`.
    levels: Vec<Mat<C64>>,
}

impl Propagators {
    fn new(heff: &Operator, h: f64, refine: u32) -> Self {
        let finest = h / 2f64.powi(refine as i32);
        let gen = heff.to_dense() * faer::Scale(C64::new(0.0, -finest));
        let mut levels = vec![linalg::expm(&gen)];
        for _ in 0..refine {
            let last = levels.last().expect("non-empty");
            levels.push(last * last);
        }
        levels.reverse();
        Self { levels }
    }
}

fn apply_dense(u: &Mat<C64>, psi: &[C64]) -> Vec<C64> {
    linalg::matvec(u, psi)
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

struct Trajectory<'a> {
    props: &'a Propagators,
    jumps: &'a [Operator],
    gamma: f64,
    rng: ChaCha8Rng,
    psi: Vec<C64>,
    threshold: f64,
    n_jumps: usize,
    index: usize,
    time: f64,
}

impl Trajectory<'_> {
    fn draw_threshold(&mut self) {
        // strictly positive so a dark trajectory never jumps
        self.threshold = 1.0 - self.rng.random::<f64>();
        self.threshold = self.threshold.max(f64::MIN_POSITIVE);
    }

    /// Advances by `h / 2^level`, applying any jump that falls inside.
    fn evolve(&mut self, level: usize) -> Result<()> {
        let trial = apply_dense(&self.props.levels[level], &self.psi);
        let n2 = norm_sqr(&trial);
        if !n2.is_finite() {
            return Err(Error::IntegrationFailure {
                trajectory: self.index,
                time: self.time,
                reason: "non-finite state norm".into(),
            });
        }
        if n2 >= self.threshold || self.jumps.is_empty() || self.gamma == 0.0 {
            self.psi = trial;
            return Ok(());
        }
        if level + 1 == self.props.levels.len() {
            self.psi = trial;
            return self.jump();
        }
        self.evolve(level + 1)?;
        self.evolve(level + 1)
    }

    fn jump(&mut self) -> Result<()> {
        let candidates: Vec<Vec<C64>> = self.jumps.iter().map(|l| l.apply(&self.psi)).collect();
        let weights: Vec<f64> = candidates.iter().map(|c| norm_sqr(c)).collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            // the crossing was numerical noise on a state no jump can act on
            let n = norm_sqr(&self.psi).sqrt();
            self.psi.iter_mut().for_each(|a| *a /= n);
            self.draw_threshold();
            return Ok(());
        }
        let mut r = self.rng.random::<f64>() * total;
        let mut chosen = weights.len() - 1;
        for (j, w) in weights.iter().enumerate() {
            if r < *w {
                chosen = j;
                break;
            }
            r -= w;
        }
        let n = weights[chosen].sqrt();
        self.psi = candidates[chosen].iter().map(|a| a / n).collect();
        self.n_jumps += 1;
        self.draw_threshold();
        Ok(())
    }
}

fn initial_state(init: &InitialState, target: &TargetState, dim: usize, rng: &mut ChaCha8Rng) -> Result<Vec<C64>> {
    let v = match init {
        InitialState::Haar => haar_state(dim, rng),
        InitialState::Basis(i) => {
            if *i >= dim {
                return Err(invalid(format!("basis index {i} out of range for dimension {dim}")));
            }
            StateVector::basis(dim, *i)
        }
        InitialState::Target => target.vector.clone(),
        InitialState::Vector(a) => {
            check_dim(dim, a.len())?;
            StateVector::from_amplitudes(a.clone()).normalized()?
        }
    };
    Ok(v.into_amplitudes())
}

fn overlap(target: &[C64], psi: &[C64]) -> f64 {
    let amp: C64 = target.iter().zip(psi).map(|(t, p)| t.conj() * p).sum();
    (amp.norm_sqr() / norm_sqr(psi)).clamp(0.0, 1.0)
}

/// Runs the ensemble in parallel on the current rayon pool. Results do not
/// depend on the number of threads.
pub fn run_ensemble(model: &LindbladModel, target: &TargetState, config: &TrajectoryConfig) -> Result<TrajectoryEnsemble> {
    config.validate()?;
    let dim = model.dim();
    check_dim(dim, target.dim())?;
    if dim > MAX_TRAJECTORY_DIM {
        return Err(Error::CapacityExceeded {
            dim,
            limit: MAX_TRAJECTORY_DIM,
        });
    }
    let grid = config.time_grid();
    let spacing = grid[1] - grid[0];
    let substeps = match config.max_step {
        Some(s) if s < spacing => (spacing / s).ceil() as usize,
        _ => 1,
    };
    let h = spacing / substeps as f64;
    let props = Propagators::new(&model.no_jump_hamiltonian(), h, config.refine_levels);
    let target_amps = target.vector.amplitudes();

    let seeds: Vec<u64> = (0..config.n_trajectories)
        .map(|i| trajectory_seed(config.seed, i as u64))
        .collect();
    let runs: Vec<Result<(Vec<f64>, usize)>> = seeds
        .par_iter()
        .enumerate()
        .map(|(index, &seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = initial_state(&config.initial, target, dim, &mut rng)?;
            let mut traj = Trajectory {
                props: &props,
                jumps: &model.jumps,
                gamma: model.gamma,
                rng,
                psi,
                threshold: 1.0,
                n_jumps: 0,
                index,
                time: 0.0,
            };
            traj.draw_threshold();
            let mut row = Vec::with_capacity(grid.len());
            row.push(overlap(target_amps, &traj.psi));
            for k in 1..grid.len() {
                for s in 0..substeps {
                    traj.time = grid[k - 1] + s as f64 * h;
                    traj.evolve(0)?;
                }
                row.push(overlap(target_amps, &traj.psi));
            }
            Ok((row, traj.n_jumps))
        })
        .collect();
    let mut per_trajectory_overlaps = Vec::with_capacity(runs.len());
    let mut jump_counts = Vec::with_capacity(runs.len());
    for r in runs {
        let (row, n) = r?;
        per_trajectory_overlaps.push(row);
        jump_counts.push(n);
    }
    Ok(TrajectoryEnsemble {
        time_grid: grid,
        per_trajectory_overlaps,
        seeds_used: seeds,
        jump_counts,
        master_seed: config.seed,
    })
}

/// Per-time bootstrap statistics of the ensemble mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    /// Average of the resample means.
    pub mean: Vec<f64>,
    /// Standard deviation of the resample means.
    pub std: Vec<f64>,
    /// `n_resamples × n_times`.
    pub resample_means: Vec<Vec<f64>>,
    pub seed: u64,
}

/// Resamples trajectories with replacement; each resample uses the same
/// trajectory indices at every time so curves stay consistent for refitting.
pub fn bootstrap_mean(ensemble: &TrajectoryEnsemble, n_resamples: usize, seed: u64) -> Result<BootstrapSummary> {
    bootstrap_rows(&ensemble.per_trajectory_overlaps, n_resamples, seed)
}

/// [`bootstrap_mean`] on a bare `n_samples × n_times` matrix.
pub fn bootstrap_rows(rows: &[Vec<f64>], n_resamples: usize, seed: u64) -> Result<BootstrapSummary> {
    if n_resamples < 2 {
        return Err(invalid("need at least two bootstrap resamples"));
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::InsufficientData("empty ensemble".into()));
    }
    let t = rows[0].len();
    if rows.iter().any(|r| r.len() != t) {
        return Err(Error::InvalidData("ragged ensemble matrix".into()));
    }
    let resample_means: Vec<Vec<f64>> = (0..n_resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(trajectory_seed(seed, b as u64));
            let mut acc = vec![0.0; t];
            for _ in 0..n {
                let row = &rows[rng.random_range(0..n)];
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v;
                }
            }
            acc.iter().map(|a| a / n as f64).collect()
        })
        .collect();
    let nb = n_resamples as f64;
    let mean: Vec<f64> = (0..t)
        .map(|k| resample_means.iter().map(|r| r[k]).sum::<f64>() / nb)
        .collect();
    let std: Vec<f64> = (0..t)
        .map(|k| (resample_means.iter().map(|r| (r[k] - mean[k]).powi(2)).sum::<f64>() / nb).sqrt())
        .collect();
    Ok(BootstrapSummary {
        mean,
        std,
        resample_means,
        seed,
    })
}

/// Straight-line fit of `ln(1 - overlap)` against time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// `|slope|`.
    pub gap: f64,
    /// Bootstrap standard deviation of the gap (0 without resamples).
    pub slope_std: f64,
    pub fit_window: (f64, f64),
    pub n_points: usize,
    /// Relative difference of the slopes fitted on the two halves of the
    /// window.
    pub curvature: f64,
}

impl FitResult {
    /// Whether the two half-window slopes agree within 5%.
    pub fn is_linear(&self) -> bool {
        self.curvature <= 0.05
    }
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Default fitting window: the last 60% of the grid.
pub fn default_window(time_grid: &[f64]) -> (f64, f64) {
    let lo = time_grid.first().copied().unwrap_or(0.0);
    let hi = time_grid.last().copied().unwrap_or(0.0);
    (lo + 0.4 * (hi - lo), hi)
}

fn log_excited(overlap: f64) -> f64 {
    (1.0 - overlap).max(OVERLAP_FLOOR).ln()
}

/// Least-squares slope of `ln(1 - overlap)` on the points inside `window`.
pub fn fit_gap(mean_overlap: &[f64], time_grid: &[f64], window: (f64, f64)) -> Result<FitResult> {
    check_dim(time_grid.len(), mean_overlap.len())?;
    let (lo, hi) = window;
    if !(lo < hi) || lo < time_grid[0] - 1e-12 || hi > time_grid[time_grid.len() - 1] + 1e-12 {
        return Err(invalid(format!("fit window ({lo}, {hi}) is not inside the time grid")));
    }
    let eps = 1e-9 * (hi - lo);
    let (x, y): (Vec<f64>, Vec<f64>) = time_grid
        .iter()
        .zip(mean_overlap)
        .filter(|(t, _)| **t >= lo - eps && **t <= hi + eps)
        .map(|(t, o)| (*t, log_excited(*o)))
        .unzip();
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!("{} points in the fit window, need 3", x.len())));
    }
    let (slope, intercept) = line_fit(&x, &y);
    let half = x.len() / 2;
    let curvature = if half >= 2 && x.len() - half >= 2 {
        let (s1, _) = line_fit(&x[..half], &y[..half]);
        let (s2, _) = line_fit(&x[half..], &y[half..]);
        (s1 - s2).abs() / slope.abs().max(f64::MIN_POSITIVE)
    } else {
        0.0
    };
    Ok(FitResult {
        slope,
        intercept,
        gap: slope.abs(),
        slope_std: 0.0,
        fit_window: window,
        n_points: x.len(),
        curvature,
    })
}

/// Fit of the bootstrap mean with the standard deviation of the gaps refitted
/// on every resample.
pub fn fit_gap_bootstrap(summary: &BootstrapSummary, time_grid: &[f64], window: (f64, f64)) -> Result<FitResult> {
    let mut fit = fit_gap(&summary.mean, time_grid, window)?;
    let gaps: Vec<f64> = summary
        .resample_means
        .iter()
        .map(|r| fit_gap(r, time_grid, window).map(|f| f.gap))
        .collect::<Result<_>>()?;
    let m = gaps.iter().sum::<f64>() / gaps.len() as f64;
    fit.slope_std = (gaps.iter().map(|g| (g - m).powi(2)).sum::<f64>() / gaps.len() as f64).sqrt();
    Ok(fit)
}

/// Power law `Δ(N) = m · N^(-α)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub m: f64,
    pub alpha: f64,
}

impl PowerLaw {
    pub fn eval(&self, n: f64) -> f64 {
        self.m * n.powf(-self.alpha)
    }
}

/// Log-log least squares through `(N, Δ)` points.
pub fn power_law_fit(points: &[(f64, f64)]) -> Result<PowerLaw> {
    if points.len() < 2 {
        return Err(Error::InsufficientData("a power law needs at least two points".into()));
    }
    if let Some((n, g)) = points.iter().find(|(n, g)| !(*g > 0.0) || !(*n > 0.0)) {
        return Err(Error::InvalidData(format!("nonpositive point ({n}, {g})")));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    if x.iter().all(|v| (v - x[0]).abs() < 1e-15) {
        return Err(Error::InvalidData("all sizes are equal".into()));
    }
    let (slope, intercept) = line_fit(&x, &y);
    Ok(PowerLaw {
        m: intercept.exp(),
        alpha: -slope,
    })
}

/// Magic bytes of the raw overlap dump.
pub const RAW_MAGIC: &[u8; 8] = b"DLTRAJ01";

/// Writes an `rows × cols` matrix: magic, `rows` and `cols` as little-endian
/// u64, then the values as little-endian f64 in row-major order.
pub fn write_raw<W: Write>(mut w: W, rows: &[Vec<f64>]) -> std::io::Result<()> {
    let cols = rows.first().map_or(0, |r| r.len());
    w.write_all(RAW_MAGIC)?;
    w.write_all(&(rows.len() as u64).to_le_bytes())?;
    w.write_all(&(cols as u64).to_le_bytes())?;
    for r in rows {
        if r.len() != cols {
            return Err(std::io::Error::new(std::io::ErrorKind::InvalidInput, "ragged matrix"));
        }
        for v in r {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()
}

/// Reads a matrix written by [`write_raw`].
pub fn read_raw<R: Read>(mut r: R) -> std::io::Result<Vec<Vec<f64>>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != RAW_MAGIC {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "bad magic"));
    }
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    let rows = u64::from_le_bytes(buf) as usize;
    r.read_exact(&mut buf)?;
    let cols = u64::from_le_bytes(buf) as usize;
    let mut out = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut row = Vec::with_capacity(cols);
        for _ in 0..cols {
            r.read_exact(&mut buf)?;
            row.push(f64::from_le_bytes(buf));
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{aklt_ground_state, aklt_jumps, build_aklt};
    use crate::spin::{ChainSpec, Spin};

    fn decay(gamma: f64) -> (LindbladModel, TargetState) {
        let chain = ChainSpec::open(1, Spin::HALF).unwrap();
        let lower = Operator::from_triplets(2, [(1, 0, C64::new(1.0, 0.0))]).unwrap();
        let m = LindbladModel::new(chain, Operator::zeros(2), vec![lower], gamma).unwrap();
        let t = TargetState::new(StateVector::basis(2, 1), "down", 0.0).unwrap();
        (m, t)
    }

    #[test]
    fn single_jump_per_decaying_trajectory() {
        let (m, t) = decay(1.0);
        let cfg = TrajectoryConfig {
            n_trajectories: 50,
            t_max: 20.0,
            n_times: 21,
            initial: InitialState::Basis(0),
            ..Default::default()
        };
        let e = run_ensemble(&m, &t, &cfg).unwrap();
        for (row, n) in e.per_trajectory_overlaps.iter().zip(&e.jump_counts) {
            assert!(*n <= 1);
            assert!(row.iter().all(|&o| o == 0.0 || o == 1.0));
            assert!(row.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn target_never_jumps() {
        let chain = ChainSpec::periodic(4, Spin::ONE).unwrap();
        let m = build_aklt(&chain).unwrap().with_jumps(aklt_jumps(&chain, 1).unwrap(), 0.1).unwrap();
        let t = aklt_ground_state(&chain).unwrap();
        let cfg = TrajectoryConfig {
            n_trajectories: 4,
            t_max: 50.0,
            n_times: 11,
            initial: InitialState::Target,
            ..Default::default()
        };
        let e = run_ensemble(&m, &t, &cfg).unwrap();
        assert!(e.jump_counts.iter().all(|&n| n == 0));
        for row in &e.per_trajectory_overlaps {
            assert!(row.iter().all(|o| (o - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn unitary_evolution_keeps_eigenstate_overlap() {
        let chain = ChainSpec::periodic(3, Spin::ONE).unwrap();
        let m = build_aklt(&chain).unwrap();
        let t = aklt_ground_state(&chain).unwrap();
        let cfg = TrajectoryConfig {
            n_trajectories: 3,
            t_max: 10.0,
            n_times: 6,
            ..Default::default()
        };
        let e = run_ensemble(&m, &t, &cfg).unwrap();
        for row in &e.per_trajectory_overlaps {
            assert!(row.iter().all(|o| (o - row[0]).abs() < 1e-10));
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let (m, t) = decay(0.7);
        let cfg = TrajectoryConfig {
            n_trajectories: 64,
            t_max: 5.0,
            n_times: 11,
            seed: 11,
            ..Default::default()
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| run_ensemble(&m, &t, &cfg)).unwrap();
        let b = three.install(|| run_ensemble(&m, &t, &cfg)).unwrap();
        assert_eq!(a, b);
        let c = run_ensemble(&m, &t, &TrajectoryConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.per_trajectory_overlaps, c.per_trajectory_overlaps);
    }

    #[test]
    fn constant_ensemble_has_zero_spread() {
        let rows = vec![vec![0.3, 0.4]; 10];
        let s = bootstrap_rows(&rows, 50, 1).unwrap();
        assert!(s.std.iter().all(|&v| v < 1e-15));
        assert!((s.mean[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn two_point_bootstrap_statistics() {
        // resample mean of two draws from {0, 1}: values 0, 1/2, 1 with
        // probabilities 1/4, 1/2, 1/4, so variance 1/8
        let rows = vec![vec![0.0], vec![1.0]];
        let s = bootstrap_rows(&rows, 20000, 5).unwrap();
        assert!((s.mean[0] - 0.5).abs() < 0.01);
        assert!((s.std[0] - (0.125f64).sqrt()).abs() < 0.01);
        assert!(bootstrap_rows(&rows, 1, 0).is_err());
    }

    #[test]
    fn exact_exponential_fit() {
        let t: Vec<f64> = (0..50).map(|k| k as f64 * 0.5).collect();
        let o: Vec<f64> = t.iter().map(|t| 1.0 - (-0.2 * t).exp()).collect();
        let f = fit_gap(&o, &t, default_window(&t)).unwrap();
        assert!((f.slope + 0.2).abs() < 1e-6);
        assert!(f.is_linear());
        assert!(matches!(fit_gap(&o, &t, (0.0, 0.6)), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn overlap_floor_keeps_logs_finite() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let f = fit_gap(&[0.5, 1.0, 1.0, 1.0], &t, (0.0, 3.0)).unwrap();
        assert!(f.slope.is_finite());
    }

    #[test]
    fn power_law_recovery() {
        let pts: Vec<(f64, f64)> = [4.0, 6.0, 8.0, 10.0].iter().map(|&n: &f64| (n, 2.0 * n.powi(-3))).collect();
        let p = power_law_fit(&pts).unwrap();
        assert!((p.m - 2.0).abs() < 1e-9 && (p.alpha - 3.0).abs() < 1e-9);
        assert!(matches!(power_law_fit(&[(2.0, 1.0), (3.0, 0.0)]), Err(Error::InvalidData(_))));
    }

    #[test]
    fn raw_dump_round_trip() {
        let rows = vec![vec![1.0, 2.5, -3.0], vec![0.0, 1e-300, f64::MAX]];
        let mut buf = Vec::new();
        write_raw(&mut buf, &rows).unwrap();
        assert_eq!(buf.len(), 24 + 6 * 8);
        assert_eq!(&buf[8..16], &2u64.to_le_bytes());
        assert_eq!(read_raw(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn haar_states_are_normalised() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..5 {
            assert!(haar_state(7, &mut rng).is_normalized());
        }
    }
}
