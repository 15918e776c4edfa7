//! Experiment configuration: a TOML file plus `key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Aklt,
    Mg,
    /// Dense Hamiltonian and target read from a JSON file.
    Custom,
}

/// Repair term added to the Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaHConfig {
    /// `α Σ_links (hopping on the J=2 link space)`; AKLT only.
    Links {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        links: Option<Vec<usize>>,
        alpha: f64,
    },
    /// Gaussian element of the target's kernelizer with the given
    /// Hilbert–Schmidt norm. The seed defaults to one derived from the master
    /// seed.
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        random_seed: Option<u64>,
        norm: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub model: ModelName,
    /// Chain lengths; a single integer, a list, or an inclusive range `"3..6"`.
    #[serde(deserialize_with = "sites_list")]
    pub n_sites: Vec<usize>,
    pub gamma: f64,
    pub cooled_links: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_h: Option<DeltaHConfig>,
    /// JSON file describing a custom model.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom_file: Option<PathBuf>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            model: ModelName::Aklt,
            n_sites: vec![3],
            gamma: 0.1,
            cooled_links: vec![1],
            delta_h: None,
            custom_file: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethodChoice {
    /// Full Liouvillian up to dimension [`AUTO_LIOUVILLIAN_MAX_DIM`],
    /// effective Hamiltonian beyond.
    #[default]
    Auto,
    Liouvillian,
    Effective,
    Secular,
    Estimate,
}

/// Largest Hilbert dimension for which `auto` picks the full Liouvillian.
pub const AUTO_LIOUVILLIAN_MAX_DIM: usize = 32;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GapConfig {
    pub method: GapMethodChoice,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialChoice {
    #[default]
    Haar,
    Target,
    /// Computational basis state `basis_index`.
    Basis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectConfig {
    pub n_trajectories: usize,
    pub t_max: f64,
    pub n_times: usize,
    pub initial: InitialChoice,
    pub basis_index: usize,
    pub n_bootstrap: usize,
    /// Fit window `[t_start, t_end]`; the last 60% of the grid by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Also dump per-trajectory overlaps as a raw little-endian file.
    pub raw: bool,
}

impl Default for TrajectConfig {
    fn default() -> Self {
        Self {
            n_trajectories: 1000,
            t_max: 1000.0,
            n_times: 101,
            initial: InitialChoice::Haar,
            basis_index: 0,
            n_bootstrap: 200,
            window: None,
            raw: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SteerTarget {
    /// The target of the configured model.
    #[default]
    Model,
    Ghz,
    W,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SteerConfig {
    pub target: SteerTarget,
    pub link: usize,
    /// Run the Lie closure when the complement is small enough.
    pub lie_closure: bool,
    pub max_generations: usize,
}

impl Default for SteerConfig {
    fn default() -> Self {
        Self {
            target: SteerTarget::Model,
            link: 1,
            lie_closure: true,
            max_generations: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    /// Gap against chain length with even/odd power-law fits.
    #[default]
    GapVsN,
    /// Full-Liouvillian gap and estimate on an α × γ grid (AKLT).
    AlphaGamma,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub kind: ScanKind,
    pub alpha: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            kind: ScanKind::GapVsN,
            alpha: vec![0.5, 1.0, 2.0],
            gamma: vec![1e-3, 1e-2, 1e-1],
        }
    }
}

/// Inputs of the timescale classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeConfig {
    #[serde(rename = "L")]
    pub l: f64,
    pub ell: f64,
    pub gamma: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub gap: GapConfig,
    #[serde(default)]
    pub traject: TrajectConfig,
    #[serde(default)]
    pub steer: SteerConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeConfig>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: default_output_dir(),
            model: ModelConfig::default(),
            gap: GapConfig::default(),
            traject: TrajectConfig::default(),
            steer: SteerConfig::default(),
            scan: ScanConfig::default(),
            regime: None,
        }
    }
}

fn sites_list<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        One(usize),
        Many(Vec<usize>),
        Range(String),
    }
    match Raw::deserialize(d)? {
        Raw::One(n) => Ok(vec![n]),
        Raw::Many(v) => Ok(v),
        Raw::Range(s) => parse_range(&s).map_err(serde::de::Error::custom),
    }
}

/// Parses an inclusive range `"a..b"`.
pub fn parse_range(s: &str) -> std::result::Result<Vec<usize>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected an inclusive range like \"3..6\", found {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a..=b).collect())
}

/// Sets `path = value` inside a TOML table. The value is parsed as a TOML
/// value when possible and taken as a string otherwise.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override {assignment:?} is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(CliError::config(format!("override {assignment:?} has an empty key")));
    }
    let value = parse_value(raw.trim());
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("nonempty key");
    let mut table = doc;
    for p in parts {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(CliError::config(format!("override {key:?}: {p:?} is not a table"))),
        };
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

impl ExperimentConfig {
    /// Reads the optional config file, applies overrides and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: Self = toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if m.n_sites.is_empty() {
            return Err(CliError::config("model.n_sites must not be empty"));
        }
        if !(m.gamma >= 0.0 && m.gamma.is_finite()) {
            return Err(CliError::config("model.gamma must be a nonnegative number"));
        }
        if m.cooled_links.is_empty() {
            return Err(CliError::config("model.cooled_links must not be empty"));
        }
        let min_n = *m.n_sites.iter().min().expect("nonempty");
        if m.model != ModelName::Custom {
            if let Some(&bad) = m.cooled_links.iter().find(|&&l| l == 0 || l > min_n) {
                return Err(CliError::config(format!("model.cooled_links: link {bad} is not a link of a {min_n}-site chain")));
            }
        }
        if m.model == ModelName::Custom && m.custom_file.is_none() {
            return Err(CliError::config("model.custom_file is required for model = \"custom\""));
        }
        if let Some(DeltaHConfig::Links { alpha, .. }) = &m.delta_h {
            if m.model != ModelName::Aklt {
                return Err(CliError::config("model.delta_h with links/alpha is only defined for the AKLT model"));
            }
            if !alpha.is_finite() {
                return Err(CliError::config("model.delta_h.alpha must be finite"));
            }
        }
        if let Some(DeltaHConfig::Random { norm, .. }) = &m.delta_h {
            if !(*norm >= 0.0 && norm.is_finite()) {
                return Err(CliError::config("model.delta_h.norm must be nonnegative"));
            }
        }
        let t = &self.traject;
        if t.n_trajectories == 0 || t.n_times < 2 || !(t.t_max > 0.0) {
            return Err(CliError::config("traject: n_trajectories ≥ 1, n_times ≥ 2 and t_max > 0 are required"));
        }
        if t.n_bootstrap == 0 {
            return Err(CliError::config("traject.n_bootstrap must be positive"));
        }
        if let Some([a, b]) = t.window {
            if !(a < b && a >= 0.0 && b <= t.t_max) {
                return Err(CliError::config("traject.window must satisfy 0 ≤ start < end ≤ t_max"));
            }
        }
        if self.scan.alpha.is_empty() || self.scan.gamma.is_empty() {
            return Err(CliError::config("scan grids must not be empty"));
        }
        if self.scan.gamma.iter().any(|g| !(*g > 0.0)) {
            return Err(CliError::config("scan.gamma values must be positive"));
        }
        if self.steer.link == 0 {
            return Err(CliError::config("steer.link counts from 1"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, with the output directory left
    /// out so that a rerun elsewhere carries the same stamp.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Seed for one consumer of randomness: the first eight bytes of
/// `SHA-256(master_le ‖ label)`.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(label.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("eight bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::default().validate().unwrap();
        let c = ExperimentConfig::load(None, &[]).unwrap();
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let c = ExperimentConfig::load(
            None,
            &[
                "model.gamma=0.01".into(),
                "model.n_sites=\"3..5\"".into(),
                "model.delta_h.alpha=2".into(),
                "steer.target=ghz".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.model.gamma, 0.01);
        assert_eq!(c.model.n_sites, vec![3, 4, 5]);
        assert_eq!(c.model.delta_h, Some(DeltaHConfig::Links { links: None, alpha: 2.0 }));
        assert_eq!(c.steer.target, SteerTarget::Ghz);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let e = ExperimentConfig::load(None, &["model.gama=0.1".into()]).unwrap_err();
        assert!(e.to_string().contains("gama"), "{e}");
        assert_eq!(e.exit_code(), crate::error::EXIT_CONFIG);
    }

    #[test]
    fn invalid_links_are_rejected() {
        assert!(ExperimentConfig::load(None, &["model.cooled_links=[4]".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["model.cooled_links=[]".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["scan.gamma=[]".into()]).is_err());
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.output_dir = "elsewhere".into();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("5..7").unwrap(), vec![5, 6, 7]);
        assert_eq!(parse_range("5..=5").unwrap(), vec![5]);
        assert!(parse_range("7..5").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn derived_seeds_differ_by_label() {
        assert_ne!(derive_seed(1, "traject"), derive_seed(1, "delta_h"));
        assert_eq!(derive_seed(1, "traject"), derive_seed(1, "traject"));
    }
}
