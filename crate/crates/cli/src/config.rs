//! TOML experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use genmat::io::SpaceDescriptor;
use genmat::space::default_deltas;
use genmat::units::Side;
use serde::{Deserialize, Serialize};

pub const CONFIG_SCHEMA: &str = "genmat.config/1";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Axioms,
    Units,
    Center,
    Ideals,
    Representation,
    Derivation,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Axioms, Suite::Units, Suite::Center, Suite::Ideals, Suite::Representation, Suite::Derivation];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Units => "units",
            Suite::Center => "center",
            Suite::Ideals => "ideals",
            Suite::Representation => "representation",
            Suite::Derivation => "derivation",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideName {
    Right,
    Left,
    TwoSided,
}

impl From<SideName> for Side {
    fn from(s: SideName) -> Side {
        match s {
            SideName::Right => Side::Right,
            SideName::Left => Side::Left,
            SideName::TwoSided => Side::TwoSided,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsSection {
    #[serde(default = "default_side")]
    pub side: SideName,
    /// Strictly decreasing radii; defaults to `0.3·φ^{-n}`, `n = 0..5`.
    #[serde(default)]
    pub deltas: Option<Vec<f64>>,
}

fn default_side() -> SideName {
    SideName::Right
}

impl Default for UnitsSection {
    fn default() -> Self {
        Self { side: default_side(), deltas: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Algebra identities (associativity, involution, seminorms, unit).
    #[serde(default = "tight")]
    pub axioms: f64,
    /// Representation homomorphism and adjoint defects.
    #[serde(default = "tight")]
    pub representation: f64,
    /// Ideal membership residuals.
    #[serde(default = "rank")]
    pub ideals: f64,
    /// Lower bound on the commutator defect of the constant kernel.
    #[serde(default = "center_floor")]
    pub center: f64,
}

fn tight() -> f64 {
    1e-12
}

fn rank() -> f64 {
    1e-10
}

fn center_floor() -> f64 {
    0.9
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { axioms: tight(), representation: tight(), ideals: rank(), center: center_floor() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    #[serde(default)]
    pub suite: Option<Suite>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub space: SpaceDescriptor,
    #[serde(default)]
    pub units: UnitsSection,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        if cfg.schema != CONFIG_SCHEMA {
            return Err(format!("schema {:?}, expected {CONFIG_SCHEMA:?}", cfg.schema));
        }
        if let Some(d) = &cfg.units.deltas {
            if d.is_empty() || d.iter().any(|x| !(*x > 0.0)) || d.windows(2).any(|w| w[1] >= w[0]) {
                return Err("units.deltas must be positive and strictly decreasing".into());
            }
        }
        Ok(cfg)
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.units.deltas.clone().unwrap_or_else(default_deltas)
    }
}
