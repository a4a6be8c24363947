//! The standard scenario grid used by sweeps and the acceptance suite.

use std::fmt;

use super::scenario::{AlgorithmSpec, CandidateField, GameScenario};
use crate::adversary::Strategy;
use crate::error::Result;
use crate::lang::{CandidateSpec, Catalog, Collection, Element};

/// Largest index a derived superset or subset is searched for.
const RELATIVE_SEARCH: u64 = 64;

/// How a grid candidate relates to the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CandidateRole {
    Target,
    /// A language of the collection strictly containing `K` (else everything).
    Superset,
    /// A language of the collection strictly inside `K` (else `K` minus a point).
    Subset,
    /// `K` plus its least outside element.
    TargetPlusOutside,
    Empty,
    All,
}

impl CandidateRole {
    pub const ALL: [CandidateRole; 6] = [
        CandidateRole::Target,
        CandidateRole::Superset,
        CandidateRole::Subset,
        CandidateRole::TargetPlusOutside,
        CandidateRole::Empty,
        CandidateRole::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CandidateRole::Target => "target",
            CandidateRole::Superset => "superset",
            CandidateRole::Subset => "subset",
            CandidateRole::TargetPlusOutside => "target_plus_outside",
            CandidateRole::Empty => "empty",
            CandidateRole::All => "all",
        }
    }

    /// The candidate playing this role against `L_k`.
    pub fn candidate(self, collection: &Collection, k: u64) -> Result<CandidateSpec> {
        let id = collection.id();
        let target = collection.kind(k)?;
        let lang = |i| CandidateSpec::language_of(id, i);
        let in_range = |j: &u64| collection.check_index(*j).is_ok();
        Ok(match self {
            CandidateRole::Target => lang(k),
            CandidateRole::Superset => {
                let mut found = None;
                for j in (1..=RELATIVE_SEARCH).filter(in_range) {
                    if collection.subset_of(k, j)? && !collection.equals(k, j)? {
                        found = Some(j);
                        break;
                    }
                }
                found.map_or(CandidateSpec::AllOfDomain, lang)
            }
            CandidateRole::Subset => {
                let mut found = None;
                for j in (1..=RELATIVE_SEARCH).filter(in_range) {
                    if collection.subset_of(j, k)? && !collection.equals(j, k)? {
                        found = Some(j);
                        break;
                    }
                }
                match (found, target.nth_ascending(0)) {
                    (Some(j), _) => lang(j),
                    (None, Some(least)) => lang(k).minus(vec![least.value()]),
                    (None, None) => CandidateSpec::Empty,
                }
            }
            CandidateRole::TargetPlusOutside => {
                if target.is_everything() {
                    lang(k)
                } else {
                    let x = (1..).map(Element::from_raw).find(|&x| !target.contains(x));
                    lang(k).union_with(vec![x.expect("K is not everything").value()])
                }
            }
            CandidateRole::Empty => CandidateSpec::Empty,
            CandidateRole::All => CandidateSpec::AllOfDomain,
        })
    }
}

impl fmt::Display for CandidateRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub collections: Vec<String>,
    pub max_target: u64,
    pub roles: Vec<CandidateRole>,
    pub strategies: Vec<Strategy>,
    pub algorithm: AlgorithmSpec,
    pub horizon: u64,
}

impl GridSpec {
    /// Built-in collections, `k <= 8`, all six candidate roles, and
    /// canonical, repeat-heavy (1/2) and block-shuffle (growth 2) adversaries
    /// over seeds 1 and 2.
    pub fn standard(algorithm: AlgorithmSpec, horizon: u64) -> Self {
        let mut strategies = vec![Strategy::Canonical];
        for seed in [1, 2] {
            strategies.push(Strategy::RepeatHeavy {
                seed,
                numerator: 1,
                denominator: 2,
            });
            strategies.push(Strategy::BlockShuffle {
                seed,
                block_growth: 2,
            });
        }
        GridSpec {
            collections: Catalog::standard()
                .iter()
                .map(|c| c.id().to_string())
                .collect(),
            max_target: 8,
            roles: CandidateRole::ALL.to_vec(),
            strategies,
            algorithm,
            horizon,
        }
    }

    /// Expand into scenarios with ids `collection/k/role/strategy`.
    /// Non-detection algorithms ignore the roles.
    pub fn scenarios(&self, catalog: &Catalog) -> Result<Vec<GameScenario>> {
        let mut out = Vec::new();
        let detection = self.algorithm.is_detection();
        for cid in &self.collections {
            let collection = catalog.get(cid)?;
            for k in (1..=self.max_target).filter(|&k| collection.check_index(k).is_ok()) {
                let roles: Vec<Option<CandidateRole>> = if detection {
                    self.roles.iter().copied().map(Some).collect()
                } else {
                    vec![None]
                };
                for role in roles {
                    let candidate = role
                        .map(|r| r.candidate(&collection, k))
                        .transpose()?
                        .map(CandidateField::Spec);
                    for strategy in &self.strategies {
                        let role_part = role.map_or(String::new(), |r| format!("/{r}"));
                        out.push(GameScenario {
                            scenario_id: format!("{cid}/k{k:02}{role_part}/{}", strategy.slug()),
                            collection: cid.clone(),
                            target_index: k,
                            candidate: candidate.clone(),
                            adversary: strategy.clone(),
                            algorithm: self.algorithm.clone(),
                            horizon: self.horizon,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}
