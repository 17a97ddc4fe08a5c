use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = dqlab_core::fidelity::DEFAULT_SEED;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Rabi,
    Hadamard,
    Expand,
    FidelitySweep,
    Cz,
    Dephase,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Rabi => "rabi",
            Command::Hadamard => "hadamard",
            Command::Expand => "expand",
            Command::FidelitySweep => "fidelity-sweep",
            Command::Cz => "cz",
            Command::Dephase => "dephase",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Complex number written as `[re, im]`.
pub type ComplexPair = [f64; 2];

/// Time unit is `1/Ω`, energy unit `ħΩ`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RabiParams {
    pub frequency_ratio: f64,
    pub alpha0: ComplexPair,
    pub alpha1: ComplexPair,
    pub beta0: ComplexPair,
    pub beta1: ComplexPair,
    pub detuning: f64,
    pub t_max: f64,
    pub n_points: usize,
}

impl Default for RabiParams {
    fn default() -> Self {
        Self {
            frequency_ratio: 100.0,
            alpha0: [1.0, 0.0],
            alpha1: [0.0, 0.0],
            beta0: [0.0, 0.0],
            beta1: [0.0, 0.0],
            detuning: 0.0,
            t_max: 4.0 * PI,
            n_points: 201,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HadamardParams {
    pub frequency_ratio: f64,
    pub field_ratio: f64,
    pub field_angle: f64,
    pub spin_g_factor: f64,
}

impl Default for HadamardParams {
    fn default() -> Self {
        Self { frequency_ratio: 96.0, field_ratio: 0.0, field_angle: 0.0, spin_g_factor: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpandParams {
    pub frequency_ratio: f64,
    pub field_angle: f64,
    pub ratios: Vec<f64>,
}

impl Default for ExpandParams {
    fn default() -> Self {
        Self { frequency_ratio: 96.0, field_angle: 0.0, ratios: vec![1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 3e-2] }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FidelitySweepParams {
    pub frequency_ratio: f64,
    pub ratios: Vec<f64>,
    pub angles: Vec<f64>,
    /// Haar samples per point; `0` skips the Monte Carlo column.
    pub mc_samples: usize,
}

impl Default for FidelitySweepParams {
    fn default() -> Self {
        Self {
            frequency_ratio: 96.0,
            ratios: vec![0.0, 0.005, 0.01, 0.015, 0.02, 0.025, 0.03],
            angles: vec![0.0],
            mc_samples: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CzParams {
    pub frequency_ratio: f64,
    /// Exchange coupling `h` in units of `ħΩ`.
    pub coupling: ComplexPair,
    /// Interaction time; the balanced root when absent.
    pub time: Option<f64>,
    /// Skip the phase alignment of atom A.
    pub literal: bool,
}

impl Default for CzParams {
    fn default() -> Self {
        Self { frequency_ratio: 100.0, coupling: [1.0, 0.0], time: None, literal: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DephaseState {
    /// `(|00⟩ + |11⟩)/√2` on two qubits.
    BellPlus,
    /// `(|00⟩ − |11⟩)/√2` on two qubits.
    BellMinus,
    /// Degenerate analogue of `|00⟩ + |11⟩`.
    Psi0,
    /// Degenerate analogue of `|01⟩ + |10⟩`.
    Psi1,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DephaseParams {
    pub state: DephaseState,
    pub moment: f64,
    pub noise: f64,
    pub t_max: f64,
    pub n_times: usize,
    pub n_traj: usize,
    pub n_steps: usize,
    /// Sublevel weights of atom A `(a1, a2)`.
    pub a: [ComplexPair; 2],
    /// Sublevel weights of atom B `(b1, b2)`.
    pub b: [ComplexPair; 2],
    /// Per-sublevel phase weights; Zeeman `g·m` when absent.
    pub weights: Option<[f64; 4]>,
    pub spin_g_factor: f64,
}

impl Default for DephaseParams {
    fn default() -> Self {
        let s = [FRAC_1_SQRT_2, 0.0];
        Self {
            state: DephaseState::BellPlus,
            moment: 1.0,
            noise: 1.0,
            t_max: 0.5,
            n_times: 11,
            n_traj: 100_000,
            n_steps: 100,
            a: [s, s],
            b: [s, s],
            weights: None,
            spin_g_factor: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Params {
    Rabi(RabiParams),
    Hadamard(HadamardParams),
    Expand(ExpandParams),
    FidelitySweep(FidelitySweepParams),
    Cz(CzParams),
    Dephase(DephaseParams),
}

/// A fully resolved run.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub command: Command,
    pub params: Params,
    pub output_path: PathBuf,
    pub seed: u64,
    pub format: Format,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    format: Option<Format>,
    #[serde(default)]
    params: Option<serde_json::Value>,
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

fn typed<T: DeserializeOwned + Default>(value: Option<serde_json::Value>) -> CliResult<T> {
    match value {
        None => Ok(T::default()),
        Some(v) => serde_json::from_value(v).map_err(|e| CliError::Config(format!("params: {e}"))),
    }
}

impl ScenarioConfig {
    /// Parses config text for `command`.
    pub fn parse(command: Command, text: &str, source: &Path, overrides: Overrides) -> CliResult<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| {
            if e.is_data() {
                CliError::Config(e.to_string())
            } else {
                CliError::Json { path: source.to_owned(), line: e.line(), column: e.column(), message: e.to_string() }
            }
        })?;
        if let Some(c) = file.command {
            if c != command {
                return Err(CliError::Config(format!(
                    "config is for `{}` but `{}` was requested",
                    c.name(),
                    command.name()
                )));
            }
        }
        let params = match command {
            Command::Rabi => Params::Rabi(typed(file.params)?),
            Command::Hadamard => Params::Hadamard(typed(file.params)?),
            Command::Expand => Params::Expand(typed(file.params)?),
            Command::FidelitySweep => Params::FidelitySweep(typed(file.params)?),
            Command::Cz => Params::Cz(typed(file.params)?),
            Command::Dephase => Params::Dephase(typed(file.params)?),
        };
        Ok(Self {
            command,
            params,
            output_path: overrides.output.or(file.output).unwrap_or_else(|| PathBuf::from(command.name())),
            seed: overrides.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            format: overrides.format.or(file.format).unwrap_or_default(),
        })
    }

    pub fn load(command: Command, path: &Path, overrides: Overrides) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })?;
        Self::parse(command, &text, path, overrides)
    }
}
