//! Identification from any detector.
//!
//! At round `t` the reduction keeps the consistent set `C'_t` of indices
//! `i <= t` with `E_t ⊆ L_i`, asks a detector copy whether `L_i` hallucinates
//! with respect to the enumeration seen so far, and guesses the least
//! consistent index whose detector answers 1 (or 1 when there is none).
//!
//! Two execution modes give the same answers:
//!
//! * [`PoolMode::Incremental`] keeps one live detector per consistent index
//!   and advances it by one element per round.
//! * [`PoolMode::FreshCopies`] builds a fresh detector for every consistent
//!   index at every round and replays all of `E_t` into it.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{Detector, DetectorFactory, Verdict};
use crate::error::Result;
use crate::identify::{ConsistentSet, Identifier};
use crate::lang::{CandidateSet, Collection, Element};
use crate::ledger::{QueryLedger, QueryPurpose};

/// Below this many live detectors a round is advanced sequentially.
const PARALLEL_THRESHOLD: usize = 48;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolMode {
    #[default]
    Incremental,
    FreshCopies,
}

/// Snapshot of one round: `C'_t`, the verdicts `d_i^t`, the accepted set `N`
/// and the guess.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: u64,
    pub consistent: Vec<u64>,
    /// `d_i^t` for each `i` in `consistent`.
    pub verdicts: BTreeMap<u64, Verdict>,
    pub accepted: Vec<u64>,
    pub guess: u64,
    /// Consistent indices whose detector could not run (counted as verdict 0).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inapplicable: Vec<u64>,
}

struct PoolEntry {
    detector: Option<Box<dyn Detector>>,
    ledger: QueryLedger,
    steps: u64,
    verdict: Verdict,
}

impl PoolEntry {
    fn new(factory: &DetectorFactory, language: CandidateSet) -> Result<Self> {
        let detector = match factory(language) {
            Ok(d) => Some(d),
            Err(e) if e.is_inapplicable() => None,
            Err(e) => return Err(e),
        };
        Ok(PoolEntry {
            detector,
            ledger: QueryLedger::new(),
            steps: 0,
            verdict: Verdict::Hallucinates,
        })
    }

    /// Feed one element; returns the fresh oracle calls it cost.
    fn advance(&mut self, w: Element) -> Result<u64> {
        let Some(detector) = self.detector.as_mut() else {
            return Ok(0);
        };
        let before = self.ledger.total_calls();
        self.steps += 1;
        self.ledger.begin_step(self.steps);
        match detector.observe(w, &mut self.ledger) {
            Ok(v) => self.verdict = v,
            Err(e) if e.is_inapplicable() => {
                self.detector = None;
                self.verdict = Verdict::Hallucinates;
            }
            Err(e) => return Err(e),
        }
        Ok(self.ledger.total_calls() - before)
    }

    fn applicable(&self) -> bool {
        self.detector.is_some()
    }
}

/// The reduction, usable anywhere an [`Identifier`] is.
pub struct ReductionIdentifier {
    collection: Arc<Collection>,
    factory: DetectorFactory,
    mode: PoolMode,
    consistent: ConsistentSet,
    prefix: Vec<Element>,
    pool: BTreeMap<u64, PoolEntry>,
    last_round: Option<RoundRecord>,
}

impl ReductionIdentifier {
    pub fn new(collection: Arc<Collection>, factory: DetectorFactory, mode: PoolMode) -> Self {
        ReductionIdentifier {
            consistent: ConsistentSet::new(
                Arc::clone(&collection),
                QueryPurpose::CollectionQueryConsistency,
            ),
            collection,
            factory,
            mode,
            prefix: Vec::new(),
            pool: BTreeMap::new(),
            last_round: None,
        }
    }

    pub fn mode(&self) -> PoolMode {
        self.mode
    }

    /// The record of the latest round.
    pub fn last_round(&self) -> Option<&RoundRecord> {
        self.last_round.as_ref()
    }

    /// Indices that have a pool entry (every index that was ever consistent).
    pub fn pool_indices(&self) -> BTreeSet<u64> {
        self.pool.keys().copied().collect()
    }

    fn candidate_for(&self, i: u64) -> Result<CandidateSet> {
        Ok(CandidateSet::of_language(self.collection.language(i)?))
    }

    /// One round. The round's record is available from [`Self::last_round`].
    pub fn step(&mut self, w: Element, ledger: &mut QueryLedger) -> Result<u64> {
        self.prefix.push(w);
        let t = self.prefix.len() as u64;
        let update = self.consistent.observe(w, ledger)?;
        let alive: Vec<u64> = self.consistent.indices().iter().copied().collect();

        let mut inner_calls = 0u64;
        match self.mode {
            PoolMode::Incremental => {
                if let Some(i) = update.admitted {
                    // a late copy first catches up on w_1..w_{t-1}
                    let mut entry = PoolEntry::new(&self.factory, self.candidate_for(i)?)?;
                    for &x in &self.prefix[..self.prefix.len() - 1] {
                        inner_calls += entry.advance(x)?;
                    }
                    self.pool.insert(i, entry);
                }
                let mut live: Vec<&mut PoolEntry> = self
                    .pool
                    .iter_mut()
                    .filter(|(i, _)| alive.binary_search(i).is_ok())
                    .map(|(_, e)| e)
                    .collect();
                let costs: Vec<Result<u64>> = if live.len() >= PARALLEL_THRESHOLD {
                    live.par_iter_mut().map(|e| e.advance(w)).collect()
                } else {
                    live.iter_mut().map(|e| e.advance(w)).collect()
                };
                for c in costs {
                    inner_calls += c?;
                }
            }
            PoolMode::FreshCopies => {
                if let Some(i) = update.admitted {
                    self.pool
                        .insert(i, PoolEntry::new(&self.factory, self.candidate_for(i)?)?);
                }
                let prefix = &self.prefix;
                let factory = &self.factory;
                let jobs: Vec<(u64, CandidateSet)> = alive
                    .iter()
                    .map(|&i| Ok((i, self.candidate_for(i)?)))
                    .collect::<Result<_>>()?;
                let run = |(i, language): (u64, CandidateSet)| -> Result<(u64, PoolEntry, u64)> {
                    let mut entry = PoolEntry::new(factory, language)?;
                    let mut calls = 0;
                    for &x in prefix {
                        calls += entry.advance(x)?;
                    }
                    Ok((i, entry, calls))
                };
                let results: Vec<Result<(u64, PoolEntry, u64)>> =
                    if jobs.len() >= PARALLEL_THRESHOLD {
                        jobs.into_par_iter().map(run).collect()
                    } else {
                        jobs.into_iter().map(run).collect()
                    };
                for r in results {
                    let (i, entry, calls) = r?;
                    inner_calls += calls;
                    self.pool.insert(i, entry);
                }
            }
        }
        ledger.record_many(QueryPurpose::CollectionQueryDetector, inner_calls);

        let mut record = RoundRecord {
            t,
            consistent: alive.clone(),
            ..Default::default()
        };
        for &i in &alive {
            let entry = &self.pool[&i];
            if !entry.applicable() {
                record.inapplicable.push(i);
            }
            let verdict = if entry.applicable() {
                entry.verdict
            } else {
                Verdict::Hallucinates
            };
            record.verdicts.insert(i, verdict);
            if verdict == Verdict::NoHallucination {
                record.accepted.push(i);
            }
        }
        record.guess = record.accepted.first().copied().unwrap_or(1);
        let guess = record.guess;
        self.last_round = Some(record);
        Ok(guess)
    }
}

impl Identifier for ReductionIdentifier {
    fn name(&self) -> &'static str {
        "reduction"
    }

    fn observe(&mut self, w: Element, ledger: &mut QueryLedger) -> Result<u64> {
        self.step(w, ledger)
    }

    fn distinct_seen(&self) -> usize {
        self.consistent.seen().len()
    }
}
