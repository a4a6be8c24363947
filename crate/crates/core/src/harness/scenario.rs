use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adversary::Strategy;
use crate::error::{LabError, Result};
use crate::identify::IdentifierKind;
use crate::lang::{CandidateSet, CandidateSpec, Catalog, Collection, LanguageDescriptor};
use crate::reduction::PoolMode;

/// Which algorithm a game runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    /// A bare identifier in the positive-only game.
    Identifier { identifier: IdentifierKind },
    /// Detection from identification in the positive-only game.
    Alg1 { identifier: IdentifierKind },
    /// Detection from labeled examples.
    Negex,
    /// Identification from detection, with inner detectors built from `identifier`.
    Reduction {
        identifier: IdentifierKind,
        #[serde(default)]
        mode: PoolMode,
    },
}

impl AlgorithmSpec {
    pub fn is_detection(&self) -> bool {
        matches!(self, AlgorithmSpec::Alg1 { .. } | AlgorithmSpec::Negex)
    }

    pub fn label(&self) -> String {
        match self {
            AlgorithmSpec::Identifier { identifier } => identifier.name().to_string(),
            AlgorithmSpec::Alg1 { identifier } => format!("alg1[{identifier}]"),
            AlgorithmSpec::Negex => "negex".to_string(),
            AlgorithmSpec::Reduction { identifier, mode } => match mode {
                PoolMode::Incremental => format!("alg2[alg1[{identifier}]]"),
                PoolMode::FreshCopies => format!("alg2-fresh[alg1[{identifier}]]"),
            },
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A candidate given either as a flag-grammar string (relative to the
/// scenario's collection) or as a structured spec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CandidateField {
    Text(String),
    Spec(CandidateSpec),
}

impl CandidateField {
    pub fn to_spec(&self, collection: &str) -> Result<CandidateSpec> {
        match self {
            CandidateField::Text(text) => CandidateSpec::parse(text, collection),
            CandidateField::Spec(spec) => Ok(spec.clone()),
        }
    }
}

/// One game: `(K, E, G)` plus the algorithm and horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameScenario {
    pub scenario_id: String,
    pub collection: String,
    pub target_index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<CandidateField>,
    pub adversary: Strategy,
    pub algorithm: AlgorithmSpec,
    pub horizon: u64,
}

/// A scenario whose references have been checked and resolved.
#[derive(Clone, Debug)]
pub struct ResolvedScenario {
    pub scenario: GameScenario,
    pub collection: Arc<Collection>,
    pub target: LanguageDescriptor,
    pub candidate: Option<CandidateSet>,
}

impl GameScenario {
    pub fn resolve(&self, catalog: &Catalog) -> Result<ResolvedScenario> {
        if self.scenario_id.trim().is_empty() {
            return Err(LabError::config("scenario_id", "must not be empty"));
        }
        if self.horizon == 0 {
            return Err(LabError::config("horizon", "must be at least 1"));
        }
        if self.target_index == 0 {
            return Err(LabError::config("target_index", "indices start at 1"));
        }
        self.adversary.validate()?;
        let collection = catalog.get(&self.collection)?;
        let target = collection
            .language(self.target_index)
            .map_err(|e| LabError::config("target_index", e.to_string()))?;
        let candidate = match (&self.candidate, self.algorithm.is_detection()) {
            (Some(field), true) => Some(
                field
                    .to_spec(&self.collection)?
                    .resolve(catalog)
                    .map_err(|e| LabError::config("candidate", e.to_string()))?,
            ),
            (None, true) => {
                return Err(LabError::config(
                    "candidate",
                    format!("algorithm {} needs a candidate set", self.algorithm),
                ))
            }
            (_, false) => None,
        };
        Ok(ResolvedScenario {
            scenario: self.clone(),
            collection,
            target,
            candidate,
        })
    }
}

#[derive(Debug, Deserialize)]
struct ScenarioFile {
    #[serde(default)]
    scenario: Vec<GameScenario>,
}

/// Parse a TOML file holding one scenario at top level, or a list under
/// `[[scenario]]`.
pub fn parse_scenarios(text: &str) -> Result<Vec<GameScenario>> {
    let value: toml::Table =
        toml::from_str(text).map_err(|e| LabError::config("config", e.to_string()))?;
    if value.contains_key("scenario") {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| LabError::config("config", e.to_string()))?;
        Ok(file.scenario)
    } else {
        let one: GameScenario =
            toml::from_str(text).map_err(|e| LabError::config("config", e.to_string()))?;
        Ok(vec![one])
    }
}
