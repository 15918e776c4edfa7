//! Task runners: build models from the configuration, run the numerics and
//! write stamped artifacts.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use dilute_core::models::{
    aklt_jumps, ghz_state, hot_to_cold_jumps, w_state, LindbladModel, ModelDescriptor, ModelKind, TargetState,
};
use dilute_core::spectral::{
    effective_hamiltonian_gap, gap_estimate, hot_cold_split, liouvillian_gap_with, secular_gap, GapMethod, GapReport,
    LiouvillianOptions,
};
use dilute_core::spin::{Boundary, ChainSpec, Spin};
use dilute_core::steer::{build_kernelizer, sample_delta_h, steer_report, validate_jumps, JumpValidity, SteerReport};
use dilute_core::trajectories::{
    bootstrap_mean, default_window, fit_gap_bootstrap, power_law_fit, run_ensemble, FitResult, InitialState, PowerLaw,
    TrajectoryConfig,
};
use dilute_core::{Operator, StateVector, C64};

use crate::artifacts::{ArtifactWriter, Stamp};
use crate::config::{
    derive_seed, DeltaHConfig, ExperimentConfig, GapMethodChoice, InitialChoice, ModelName, ScanKind, SteerTarget,
    AUTO_LIOUVILLIAN_MAX_DIM,
};
use crate::error::{CliError, Result};
use crate::regime::{regime_classify, RegimeEstimate};

/// Dense model description for `model = "custom"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomModelFile {
    pub local_dim: usize,
    pub n_sites: usize,
    #[serde(default = "periodic")]
    pub boundary: String,
    /// Row-major real and imaginary parts of `H`.
    pub hamiltonian: ComplexArray,
    pub target: ComplexArray,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexArray {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

fn periodic() -> String {
    "periodic".into()
}

impl ComplexArray {
    fn values(&self, len: usize, what: &str) -> Result<Vec<C64>> {
        if self.re.len() != len || !(self.im.is_empty() || self.im.len() == len) {
            return Err(CliError::config(format!("custom model: {what} needs {len} entries")));
        }
        Ok((0..len)
            .map(|i| C64::new(self.re[i], self.im.get(i).copied().unwrap_or(0.0)))
            .collect())
    }
}

/// A model ready for the numerics, with its jumps grouped per cooled link.
pub struct BuiltModel {
    pub model: LindbladModel,
    pub target: TargetState,
    /// `(link, jumps on that link)`; empty when jumps span more than a link.
    pub link_jumps: Vec<(usize, Vec<Operator>)>,
}

fn load_custom(path: &Path, cfg: &ExperimentConfig) -> Result<BuiltModel> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let file: CustomModelFile =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if file.local_dim < 2 {
        return Err(CliError::config("custom model: local_dim must be at least 2"));
    }
    let boundary = match file.boundary.as_str() {
        "periodic" => Boundary::Periodic,
        "open" => Boundary::Open,
        other => return Err(CliError::config(format!("custom model: unknown boundary {other:?}"))),
    };
    let chain = ChainSpec::new(file.n_sites, Spin::from_twice(file.local_dim as u32 - 1), boundary)?;
    let d = chain.dim();
    let h = file.hamiltonian.values(d * d, "hamiltonian")?;
    let triplets = h
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != C64::new(0.0, 0.0))
        .map(|(k, v)| (k / d, k % d, *v));
    let h = Operator::from_triplets(d, triplets)?;
    let psi = StateVector::from_amplitudes(file.target.values(d, "target")?).normalized()?;
    let energy = h.expectation(&psi).re;
    let target = TargetState::new(psi, "custom", energy)?;
    let mut link_jumps = Vec::new();
    let mut all = Vec::new();
    for &l in &cfg.model.cooled_links {
        let (cold, hot) = hot_cold_split(&target, l, &chain)?;
        let jumps = hot_to_cold_jumps(&hot, &cold, &chain, l)?;
        all.extend(jumps.iter().cloned());
        link_jumps.push((l, jumps));
    }
    let model = LindbladModel::new(chain, h, all, cfg.model.gamma)?;
    Ok(BuiltModel {
        model,
        target,
        link_jumps,
    })
}

/// Builds the configured model for chain length `n`.
pub fn build_model(cfg: &ExperimentConfig, n: usize) -> Result<BuiltModel> {
    let m = &cfg.model;
    let mut built = match m.model {
        ModelName::Custom => load_custom(m.custom_file.as_deref().expect("validated"), cfg)?,
        ModelName::Aklt | ModelName::Mg => {
            let (alpha, links) = match &m.delta_h {
                Some(DeltaHConfig::Links { links, alpha }) => (*alpha, links.clone()),
                _ => (0.0, None),
            };
            let desc = ModelDescriptor {
                model: if m.model == ModelName::Aklt { ModelKind::Aklt } else { ModelKind::Mg },
                n_sites: n,
                gamma: m.gamma,
                cooled_links: m.cooled_links.clone(),
                alpha,
                delta_h_links: links,
            };
            let (model, target) = desc.build()?;
            let link_jumps = if m.model == ModelName::Aklt {
                m.cooled_links
                    .iter()
                    .map(|&l| Ok((l, aklt_jumps(&model.chain, l)?)))
                    .collect::<Result<_>>()?
            } else {
                Vec::new()
            };
            BuiltModel {
                model,
                target,
                link_jumps,
            }
        }
    };
    if let Some(DeltaHConfig::Random { random_seed, norm }) = &m.delta_h {
        let seed = random_seed.unwrap_or_else(|| derive_seed(cfg.seed, &format!("delta_h/{n}")));
        let k = build_kernelizer(&built.target, &built.model.chain)?;
        let dh = sample_delta_h(&k, seed, *norm)?;
        built.model = built.model.with_extra_hamiltonian(&dh)?;
    }
    Ok(built)
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkValidity {
    pub link: usize,
    #[serde(flatten)]
    pub validity: JumpValidity,
}

/// Checks every cooled link's jumps. Nilpotency or image violations are
/// errors; a kernel larger than the cold space (as for short AKLT rings,
/// whose link reduced state has rank 3) is reported as a warning.
pub fn check_jumps(built: &BuiltModel) -> Result<(Vec<LinkValidity>, Vec<String>)> {
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (link, jumps) in &built.link_jumps {
        let v = validate_jumps(jumps, &built.target, *link, &built.model.chain)?;
        if !(v.supported_on_link && v.nilpotent && v.image_in_cold) {
            return Err(dilute_core::Error::IncompatibleJumps(format!("jumps on link {link} fail validation: {v:?}")).into());
        }
        if !v.kernel_matches_cold {
            warnings.push(format!(
                "link {link}: common kernel of the jumps has dimension {}, cold space {}",
                v.kernel_dim, v.cold_dim
            ));
        }
        out.push(LinkValidity {
            link: *link,
            validity: v,
        });
    }
    Ok((out, warnings))
}

fn resolve_method(choice: GapMethodChoice, dim: usize) -> GapMethodChoice {
    match choice {
        GapMethodChoice::Auto if dim <= AUTO_LIOUVILLIAN_MAX_DIM => GapMethodChoice::Liouvillian,
        GapMethodChoice::Auto => GapMethodChoice::Effective,
        c => c,
    }
}

/// Gap by the chosen method merged with the first-order estimate on the
/// first cooled link.
pub fn compute_gap(cfg: &ExperimentConfig, built: &BuiltModel, label: &str) -> Result<GapReport> {
    let link = cfg.model.cooled_links[0];
    let est = gap_estimate(&built.model, &built.target, link)?;
    let mut report = match resolve_method(cfg.gap.method, built.model.dim()) {
        GapMethodChoice::Liouvillian => {
            let opts = LiouvillianOptions {
                seed: derive_seed(cfg.seed, &format!("liouvillian/{label}")),
                ..LiouvillianOptions::default()
            };
            liouvillian_gap_with(&built.model, &opts)?
        }
        GapMethodChoice::Effective => effective_hamiltonian_gap(&built.model, &built.target)?,
        GapMethodChoice::Secular => secular_gap(&built.model)?,
        GapMethodChoice::Estimate | GapMethodChoice::Auto => est.clone(),
    };
    report.gap_estimate = est.gap_estimate;
    report.q = est.q;
    if report.weak_coupling.is_none() {
        report.weak_coupling = est.weak_coupling;
    }
    for w in est.warnings {
        if !report.warnings.contains(&w) {
            report.warnings.push(w);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapRow {
    pub n_sites: usize,
    pub dim: usize,
    pub gamma: f64,
    pub method: GapMethod,
    pub gap: Option<f64>,
    pub gap_estimate: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    pub steady_state_count: Option<usize>,
    pub weak_coupling: Option<bool>,
    pub bound_ok: Option<bool>,
}

impl GapRow {
    fn new(n: usize, dim: usize, r: &GapReport) -> Self {
        Self {
            n_sites: n,
            dim,
            gamma: r.gamma,
            method: r.method,
            gap: r.gap,
            gap_estimate: r.gap_estimate,
            q: r.q,
            steady_state_count: r.steady_state_count,
            weak_coupling: r.weak_coupling,
            bound_ok: r.satisfies_bound(),
        }
    }
}

#[derive(Serialize)]
struct GapEntry {
    n_sites: usize,
    report: GapReport,
    jump_validity: Vec<LinkValidity>,
}

/// Gap and estimate for every configured chain length.
pub fn run_gap(cfg: &ExperimentConfig, out: &ArtifactWriter) -> Result<Vec<PathBuf>> {
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for &n in &cfg.model.n_sites {
        let built = build_model(cfg, n)?;
        let (validity, warnings) = check_jumps(&built)?;
        let mut report = compute_gap(cfg, &built, &n.to_string())?;
        report.warnings.extend(warnings);
        rows.push(GapRow::new(n, built.model.dim(), &report));
        entries.push(GapEntry {
            n_sites: n,
            report,
            jump_validity: validity,
        });
    }
    #[derive(Serialize)]
    struct Data {
        results: Vec<GapEntry>,
    }
    Ok(vec![
        out.csv("gap.csv", &rows)?,
        out.json("gap.json", "gap", &Data { results: entries })?,
    ])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectRow {
    pub t: f64,
    pub mean_overlap: f64,
    pub bootstrap_std: f64,
    /// `ln(1 - mean_overlap)`, empty once the deficit underflows.
    pub ln_one_minus_overlap: Option<f64>,
    /// Fitted line inside the fit window.
    pub fit_ln_one_minus_overlap: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectSummary {
    pub n_sites: usize,
    pub n_traj: usize,
    pub trajectory_master_seed: u64,
    pub bootstrap_seed: u64,
    pub n_bootstrap: usize,
    pub fit: Option<FitResult>,
    pub fit_is_linear: Option<bool>,
    pub fit_error: Option<String>,
    pub warnings: Vec<String>,
    pub total_jumps: usize,
}

/// Quantum-jump ensemble, bootstrap statistics and the gap fit.
pub fn run_traject(cfg: &ExperimentConfig, out: &ArtifactWriter) -> Result<Vec<PathBuf>> {
    let t = &cfg.traject;
    let mut files = Vec::new();
    for &n in &cfg.model.n_sites {
        let built = build_model(cfg, n)?;
        let (_, warnings) = check_jumps(&built)?;
        let initial = match t.initial {
            InitialChoice::Haar => InitialState::Haar,
            InitialChoice::Target => InitialState::Target,
            InitialChoice::Basis => {
                if t.basis_index >= built.model.dim() {
                    return Err(CliError::config(format!("traject.basis_index {} is out of range", t.basis_index)));
                }
                InitialState::Basis(t.basis_index)
            }
        };
        let tc = TrajectoryConfig {
            n_trajectories: t.n_trajectories,
            t_max: t.t_max,
            n_times: t.n_times,
            seed: derive_seed(cfg.seed, &format!("traject/{n}")),
            initial,
            ..TrajectoryConfig::default()
        };
        let ens = run_ensemble(&built.model, &built.target, &tc)?;
        let boot_seed = derive_seed(cfg.seed, &format!("bootstrap/{n}"));
        let boot = bootstrap_mean(&ens, t.n_bootstrap.max(2), boot_seed)?;
        let window = t.window.map(|[a, b]| (a, b)).unwrap_or_else(|| default_window(&ens.time_grid));
        let (fit, fit_error) = match fit_gap_bootstrap(&boot, &ens.time_grid, window) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let mean = ens.mean_overlap();
        let rows: Vec<TrajectRow> = ens
            .time_grid
            .iter()
            .enumerate()
            .map(|(k, &time)| {
                let deficit = 1.0 - mean[k];
                TrajectRow {
                    t: time,
                    mean_overlap: mean[k],
                    bootstrap_std: boot.std[k],
                    ln_one_minus_overlap: (deficit > 0.0).then(|| deficit.ln()),
                    fit_ln_one_minus_overlap: fit
                        .as_ref()
                        .filter(|f| time >= f.fit_window.0 && time <= f.fit_window.1)
                        .map(|f| f.intercept + f.slope * time),
                }
            })
            .collect();
        files.push(out.csv(&format!("traject_n{n}.csv"), &rows)?);
        let summary = TrajectSummary {
            n_sites: n,
            n_traj: ens.n_trajectories(),
            trajectory_master_seed: ens.master_seed,
            bootstrap_seed: boot_seed,
            n_bootstrap: t.n_bootstrap.max(2),
            fit_is_linear: fit.as_ref().map(FitResult::is_linear),
            fit,
            fit_error,
            warnings,
            total_jumps: ens.jump_counts.iter().sum(),
        };
        files.push(out.json(&format!("traject_n{n}.json"), "traject", &summary)?);
        if t.raw {
            files.push(out.raw(&format!("traject_n{n}.f64"), &ens.per_trajectory_overlaps, "trajectory", "time")?);
        }
    }
    Ok(files)
}

#[derive(Clone, Debug, Serialize)]
pub struct SteerRow {
    pub n_sites: usize,
    pub target: String,
    pub link: usize,
    /// Hot→cold jumps built from the target pass every validity check.
    pub constructive_jumps_valid: bool,
    #[serde(flatten)]
    pub report: SteerReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SteerCsvRow {
    pub n_sites: usize,
    pub target: String,
    pub link: usize,
    pub hot_dim: usize,
    pub cold_dim: usize,
    pub kernelizer_dim_on_link: usize,
    pub necessary_hot: bool,
    pub necessary_flow: bool,
    pub n_witnesses: usize,
    pub constructive_jumps_valid: bool,
    pub lie_dim: Option<usize>,
    pub lie_target: Option<usize>,
    pub lie_converged: Option<bool>,
}

fn steer_target(cfg: &ExperimentConfig, n: usize) -> Result<(TargetState, ChainSpec)> {
    match cfg.steer.target {
        SteerTarget::Model => {
            let b = build_model(cfg, n)?;
            Ok((b.target, b.model.chain))
        }
        SteerTarget::Ghz => Ok((ghz_state(n)?, ChainSpec::periodic(n, Spin::HALF)?)),
        SteerTarget::W => Ok((w_state(n)?, ChainSpec::periodic(n, Spin::HALF)?)),
    }
}

/// Necessary conditions, kernelizer and Lie closure per chain length.
pub fn run_steer(cfg: &ExperimentConfig, out: &ArtifactWriter) -> Result<Vec<PathBuf>> {
    let link = cfg.steer.link;
    let mut rows = Vec::new();
    for &n in &cfg.model.n_sites {
        let (target, chain) = steer_target(cfg, n)?;
        if !chain.links().contains(&link) {
            return Err(CliError::config(format!("steer.link {link} is not a link of the {n}-site chain")));
        }
        let gens = cfg.steer.lie_closure.then_some(cfg.steer.max_generations);
        let report = steer_report(&target, &chain, link, derive_seed(cfg.seed, &format!("flow/{n}")), gens)?;
        let (cold, hot) = hot_cold_split(&target, link, &chain)?;
        let constructive_jumps_valid = hot.dim() > 0 && {
            let jumps = hot_to_cold_jumps(&hot, &cold, &chain, link)?;
            validate_jumps(&jumps, &target, link, &chain)?.all_pass()
        };
        rows.push(SteerRow {
            n_sites: n,
            target: target.label.clone(),
            link,
            constructive_jumps_valid,
            report,
        });
    }
    let csv_rows: Vec<SteerCsvRow> = rows
        .iter()
        .map(|r| SteerCsvRow {
            n_sites: r.n_sites,
            target: r.target.clone(),
            link: r.link,
            hot_dim: r.report.hot_dim,
            cold_dim: r.report.cold_dim,
            kernelizer_dim_on_link: r
                .report
                .kernelizer_dim_per_link
                .iter()
                .find(|(l, _)| *l == r.link)
                .map_or(0, |(_, d)| *d),
            necessary_hot: r.report.necessary_hot,
            necessary_flow: r.report.necessary_flow,
            n_witnesses: r.report.witnesses.len(),
            constructive_jumps_valid: r.constructive_jumps_valid,
            lie_dim: r.report.lie_dim,
            lie_target: r.report.lie_target,
            lie_converged: r.report.lie_converged,
        })
        .collect();
    #[derive(Serialize)]
    struct Data {
        results: Vec<SteerRow>,
    }
    Ok(vec![
        out.csv("steer.csv", &csv_rows)?,
        out.json("steer.json", "steer", &Data { results: rows })?,
    ])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaGammaRow {
    pub alpha: f64,
    pub gamma: f64,
    pub gap: f64,
    pub gap_estimate: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    pub steady_state_count: Option<usize>,
    /// `|Δ - Δ_est| / Δ_est`.
    pub rel_deviation: Option<f64>,
    pub bound_ok: Option<bool>,
    /// Relative deviation within [`WEAK_AGREEMENT_TOL`].
    pub weak_agreement: Option<bool>,
}

pub const WEAK_AGREEMENT_TOL: f64 = 0.05;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapVsNRow {
    pub n_sites: usize,
    pub parity: String,
    pub dim: usize,
    pub method: GapMethod,
    pub gap: Option<f64>,
    pub gap_estimate: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParityFit {
    pub parity: String,
    pub n_sites: Vec<usize>,
    pub fit: Option<PowerLaw>,
}

/// Splits `(N, Δ)` points by parity and fits `Δ = m N^{-α}` to each series
/// with at least two positive gaps.
pub fn parity_fits(points: &[(usize, f64)]) -> Vec<ParityFit> {
    ["even", "odd"]
        .iter()
        .enumerate()
        .map(|(p, name)| {
            let sel: Vec<(usize, f64)> = points.iter().copied().filter(|(n, g)| n % 2 == p && *g > 0.0).collect();
            let pts: Vec<(f64, f64)> = sel.iter().map(|&(n, g)| (n as f64, g)).collect();
            ParityFit {
                parity: name.to_string(),
                n_sites: sel.iter().map(|p| p.0).collect(),
                fit: power_law_fit(&pts).ok(),
            }
        })
        .collect()
}

/// Gap grids: α × γ for a fixed chain, or gap against chain length.
pub fn run_scan(cfg: &ExperimentConfig, out: &ArtifactWriter) -> Result<Vec<PathBuf>> {
    match cfg.scan.kind {
        ScanKind::AlphaGamma => {
            if cfg.model.model != ModelName::Aklt {
                return Err(CliError::config("scan.kind = \"alpha_gamma\" needs model = \"aklt\""));
            }
            let n = cfg.model.n_sites[0];
            let cells: Vec<(f64, f64)> = cfg
                .scan
                .alpha
                .iter()
                .flat_map(|&a| cfg.scan.gamma.iter().map(move |&g| (a, g)))
                .collect();
            let rows: Vec<AlphaGammaRow> = cells
                .par_iter()
                .map(|&(alpha, gamma)| {
                    let mut c = cfg.clone();
                    c.model.gamma = gamma;
                    c.model.delta_h = Some(DeltaHConfig::Links {
                        links: match &cfg.model.delta_h {
                            Some(DeltaHConfig::Links { links, .. }) => links.clone(),
                            _ => None,
                        },
                        alpha,
                    });
                    c.gap.method = GapMethodChoice::Liouvillian;
                    let built = build_model(&c, n)?;
                    let r = compute_gap(&c, &built, &format!("{alpha}/{gamma}"))?;
                    let gap = r.gap.unwrap_or(0.0);
                    let rel = r.gap_estimate.filter(|e| *e > 0.0).map(|e| (gap - e).abs() / e);
                    Ok(AlphaGammaRow {
                        alpha,
                        gamma,
                        gap,
                        gap_estimate: r.gap_estimate,
                        q: r.q,
                        steady_state_count: r.steady_state_count,
                        rel_deviation: rel,
                        bound_ok: r.satisfies_bound(),
                        weak_agreement: rel.map(|x| x <= WEAK_AGREEMENT_TOL),
                    })
                })
                .collect::<Result<_>>()?;
            #[derive(Serialize)]
            struct Data<'a> {
                n_sites: usize,
                rows: &'a [AlphaGammaRow],
            }
            Ok(vec![
                out.csv("scan_alpha_gamma.csv", &rows)?,
                out.json("scan_alpha_gamma.json", "scan_alpha_gamma", &Data { n_sites: n, rows: &rows })?,
            ])
        }
        ScanKind::GapVsN => {
            let rows: Vec<GapVsNRow> = cfg
                .model
                .n_sites
                .par_iter()
                .map(|&n| {
                    let built = build_model(cfg, n)?;
                    let r = compute_gap(cfg, &built, &n.to_string())?;
                    Ok(GapVsNRow {
                        n_sites: n,
                        parity: if n % 2 == 0 { "even" } else { "odd" }.into(),
                        dim: built.model.dim(),
                        method: r.method,
                        gap: r.gap,
                        gap_estimate: r.gap_estimate,
                    })
                })
                .collect::<Result<_>>()?;
            let points: Vec<(usize, f64)> = rows.iter().filter_map(|r| r.gap.map(|g| (r.n_sites, g))).collect();
            #[derive(Serialize)]
            struct Data<'a> {
                rows: &'a [GapVsNRow],
                fits: Vec<ParityFit>,
            }
            Ok(vec![
                out.csv("scan_gap_vs_n.csv", &rows)?,
                out.json(
                    "scan_gap_vs_n.json",
                    "scan_gap_vs_n",
                    &Data {
                        rows: &rows,
                        fits: parity_fits(&points),
                    },
                )?,
            ])
        }
    }
}

/// Timescale classification from the `[regime]` table.
pub fn run_regime(cfg: &ExperimentConfig, out: &ArtifactWriter) -> Result<(RegimeEstimate, PathBuf)> {
    let r = cfg
        .regime
        .as_ref()
        .ok_or_else(|| CliError::config("the regime task needs a [regime] table with L, ell, gamma and D"))?;
    let est = regime_classify(r.l, r.ell, r.gamma, r.d)?;
    let path = out.json("regime.json", "regime", &est)?;
    Ok((est, path))
}

/// Writes the resolved configuration (output directory left empty) so a run
/// can be regenerated.
pub fn write_config(cfg: &ExperimentConfig, out: &ArtifactWriter) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct Data {
        config: ExperimentConfig,
    }
    let mut config = cfg.clone();
    config.output_dir = PathBuf::new();
    out.json("config.json", "config", &Data { config })
}

pub fn writer_for(cfg: &ExperimentConfig) -> Result<ArtifactWriter> {
    ArtifactWriter::create(&cfg.output_dir, Stamp::new(cfg))
}
