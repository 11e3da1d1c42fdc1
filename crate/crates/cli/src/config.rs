//! JSON experiment configurations, one schema per subcommand.

use levyband_core::basis::{BasisFamily, Window};
use levyband_core::gausssup::SupMode;
use levyband_core::levy::LevyModel;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `{"family": "...", "J": n}` — family selector as used across configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: String,
    #[serde(rename = "J", default)]
    pub j: Option<u32>,
}

impl FamilySpec {
    pub fn resolve(&self) -> Result<BasisFamily, CliError> {
        let fam = match (self.family.as_str(), self.j) {
            ("trigonometric", Some(j)) => BasisFamily::Trigonometric(j),
            ("legendre", Some(j)) => BasisFamily::Legendre(j),
            ("haar", j) => {
                if let Some(j) = j {
                    if j != 1 {
                        return Err(CliError::config("haar basis fixes J = 1"));
                    }
                }
                BasisFamily::Haar
            }
            (other, None) if other != "haar" => {
                return Err(CliError::config(format!("family {other:?} requires \"J\"")))
            }
            (other, _) => {
                return Err(CliError::config(format!(
                    "unknown family {other:?} (trigonometric | legendre | haar)"
                )))
            }
        };
        fam.validate().map_err(CliError::from_core)?;
        Ok(fam)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowSpec {
    pub a: f64,
    pub b: f64,
}

impl WindowSpec {
    pub fn resolve(&self) -> Result<Window, CliError> {
        Window::new(self.a, self.b).map_err(CliError::from_core)
    }
}

fn default_mode() -> String {
    "absolute".to_string()
}

pub fn resolve_mode(mode: &str) -> Result<SupMode, CliError> {
    match mode {
        "signed" => Ok(SupMode::Signed),
        "absolute" => Ok(SupMode::Absolute),
        other => Err(CliError::config(format!("mode must be signed|absolute, got {other:?}"))),
    }
}

/// `mc-sup`: Monte Carlo cell suprema with tail comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McSupConfig {
    pub family: FamilySpec,
    pub delta: f64,
    /// Grid per cell for smooth families; ignored (and optional) for Haar.
    #[serde(default)]
    pub grid: Option<usize>,
    pub reps: usize,
    #[serde(default = "default_mode")]
    pub mode: String,
    /// Levels at which tails are compared.
    pub u_list: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

/// `gumbel`: law tables and distances for the m-cell maximum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GumbelConfig {
    pub family: FamilySpec,
    pub window: WindowSpec,
    pub m_list: Vec<usize>,
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Grid per cell when no exact sampler applies.
    #[serde(default)]
    pub grid: Option<usize>,
    /// Emit accompanying-law columns (trigonometric only, needs J >= b-a).
    #[serde(default)]
    pub accompanying: bool,
    /// Bias-shift inputs for the shifted accompanying laws; zero shift if absent.
    #[serde(default)]
    pub shift: Option<ShiftSpec>,
    #[serde(default)]
    pub y_grid: Option<YGridSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShiftSpec {
    pub n: usize,
    pub kappa: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct YGridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for YGridSpec {
    fn default() -> Self {
        Self { min: -5.0, max: 12.0, points: 2001 }
    }
}

/// `band`: one confidence band (reps = 1) or a coverage experiment (reps > 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandConfig {
    /// Data-generating model; optional when increments are ingested.
    #[serde(default)]
    pub model: Option<LevyModel>,
    pub family: FamilySpec,
    pub window: WindowSpec,
    pub kappa: f64,
    #[serde(default)]
    pub n: Option<usize>,
    pub level: f64,
    #[serde(default = "one")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Small-time constant; fitted from the model (then doubled) when absent.
    #[serde(default)]
    pub q: Option<f64>,
    /// Cell count; `optimal_m(n, kappa)` when absent.
    #[serde(default)]
    pub m: Option<usize>,
    /// Read increments from CSV + JSON sidecar instead of simulating.
    #[serde(default)]
    pub ingest: Option<IngestSpec>,
    #[serde(default)]
    pub grid_points: Option<usize>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestSpec {
    pub csv: String,
    pub sidecar: String,
}

/// `simulate`: write an increment sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub model: LevyModel,
    pub n: usize,
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
}

/// `tails`: Lévy density and jump-measure tail on a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailsConfig {
    pub model: LevyModel,
    pub x_min: f64,
    pub x_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    201
}

/// `smalltime`: the small-time diagnostic over a list of steps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmallTimeConfig {
    pub model: LevyModel,
    pub window: WindowSpec,
    pub deltas: Vec<f64>,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    200
}

/// Sidecar schema for increment CSV files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncrementSidecar {
    pub model: Option<LevyModel>,
    pub n: usize,
    pub delta: f64,
    pub seed: u64,
}
