//! Run configuration: a TOML or JSON file, overridden by command-line flags.
//!
//! The file holds `seed`, `workers`, `out` and one table per command, e.g.
//!
//! ```toml
//! seed = 7
//! [simulate]
//! n = [12, 100]
//! p_t = [10, 50]
//! p = 600
//! q = 200
//! sampler = "data-simulation"
//! ```
//!
//! A previous run's `envelope.json` is also accepted; its `config` object is used.

use std::fs;
use std::path::{Path, PathBuf};

use featsel::fdr::{Correction, GlobalShuffle, NullKind, Statistic};
use featsel::optimizer::{Direction, Pairing};
use featsel::{MethodKind, SamplerKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::ingest::Orientation;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub select: Option<SelectConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fdr: Option<FdrConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymrisk: Option<AsymriskConfig>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let bad = |e: String| CliError::Config(format!("{}: {e}", path.display()));
        let value: serde_json::Value = if path.extension().is_some_and(|e| e == "toml") {
            let t: toml::Value = toml::from_str(&text).map_err(|e| bad(e.to_string()))?;
            serde_json::to_value(t).map_err(|e| bad(e.to_string()))?
        } else {
            serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?
        };
        let value = match value {
            serde_json::Value::Object(mut map) if map.contains_key("tool") && map.contains_key("config") => {
                map.remove("config").expect("checked")
            }
            other => other,
        };
        serde_json::from_value(value).map_err(|e| bad(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub n: Vec<usize>,
    pub p_t: Vec<usize>,
    pub p_u: Vec<usize>,
    pub q_u: Vec<usize>,
    /// Total feature count; when set, `p_u = p − p_t` and `p_u` is ignored.
    pub p: Option<usize>,
    /// Total response count; when set, `q_u = q − p_t` and `q_u` is ignored.
    pub q: Option<usize>,
    pub methods: Vec<MethodKind>,
    pub sampler: SamplerKind,
    pub mc_res: u64,
    pub signal_scale: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            n: vec![2],
            p_t: vec![2],
            p_u: vec![5],
            q_u: vec![0],
            p: None,
            q: None,
            methods: MethodKind::ALL.to_vec(),
            sampler: SamplerKind::WishartExact,
            mc_res: 1_000,
            signal_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    pub n: usize,
    pub method: MethodKind,
    pub direction: Direction,
    /// `discrepancy`, or `l1:p_t,p_u,q_u` for the noise-free test objective `−‖θ − target‖₁`.
    pub objective: String,
    pub mc_res: u64,
    pub survivors: usize,
    pub t_final: usize,
    pub perturbations: usize,
    pub grid_p_t: Vec<usize>,
    pub grid_p_u: Vec<usize>,
    pub grid_q_u: Vec<usize>,
    pub lower: [usize; 3],
    pub upper: [usize; 3],
    pub pairing: Pairing,
    pub exact_sampler: SamplerKind,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        let steps: Vec<usize> = (0..10).map(|k| 1 + 5 * k).collect();
        OptimizeConfig {
            n: 2,
            method: MethodKind::Thresholding,
            direction: Direction::AsymptoticMinusExact,
            objective: "discrepancy".into(),
            mc_res: 2_000,
            survivors: 10,
            t_final: 5,
            perturbations: 10,
            grid_p_t: (2..=6).collect(),
            grid_p_u: steps.clone(),
            grid_q_u: steps,
            lower: [2, 0, 0],
            upper: [12, 80, 80],
            pairing: Pairing::Paired,
            exact_sampler: SamplerKind::DataSimulation,
        }
    }
}

/// Input files and preprocessing shared by `select` and `fdr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub x: PathBuf,
    pub y: PathBuf,
    pub orientation: Orientation,
    pub standardize_x: bool,
    pub standardize_y: bool,
    /// Treat `Y` as counts and convert to log proportions first.
    pub y_counts: bool,
    pub pseudocount: f64,
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig {
            x: PathBuf::new(),
            y: PathBuf::new(),
            orientation: Orientation::ObservationsAsRows,
            standardize_x: false,
            standardize_y: false,
            y_counts: false,
            pseudocount: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectConfig {
    pub input: InputConfig,
    pub method: MethodKind,
    pub statistic: Statistic,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig { input: InputConfig::default(), method: MethodKind::Svd, statistic: Statistic::Covariance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FdrConfig {
    pub input: InputConfig,
    pub method: MethodKind,
    pub null: NullKind,
    /// Defaults to `harmonic` for SVD and `none` for thresholding.
    pub correction: Option<Correction>,
    pub mc_res: u64,
    pub statistic: Statistic,
    pub add_one: bool,
    pub shuffle: GlobalShuffle,
}

impl Default for FdrConfig {
    fn default() -> Self {
        FdrConfig {
            input: InputConfig::default(),
            method: MethodKind::Svd,
            null: NullKind::Global,
            correction: None,
            mc_res: 1_000,
            statistic: Statistic::Correlation,
            add_one: false,
            shuffle: GlobalShuffle::WithinRows,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsymriskConfig {
    /// CSV of scaled means (`p_t` rows, `q` columns); when absent, random
    /// signal blocks are drawn and scaled by `√(n − 1)`.
    pub signal: Option<PathBuf>,
    pub n: usize,
    pub p_t: usize,
    pub p_u: usize,
    pub q_u: usize,
    pub draws: u64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for AsymriskConfig {
    fn default() -> Self {
        AsymriskConfig { signal: None, n: 2, p_t: 2, p_u: 5, q_u: 0, draws: 1, abs_tol: 1e-10, rel_tol: 1e-10 }
    }
}
