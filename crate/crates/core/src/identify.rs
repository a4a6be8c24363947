//! Identification in the limit from positive data.
//!
//! Both identifiers restrict attention to indices `i <= t` at step `t`, so a
//! step asks finitely many membership queries.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::lang::{Collection, Element};
use crate::ledger::{QueryLedger, QueryPurpose};

/// What changed in a [`ConsistentSet`] after one observation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConsistencyUpdate {
    pub new_element: bool,
    pub dropped: Vec<u64>,
    pub admitted: Option<u64>,
}

/// Incrementally maintained `C'_t = { i <= t : E_t ⊆ L_i }`.
///
/// At step `t` the surviving indices are checked against `w_t` only (when it
/// is new) and index `t` is checked against all of `E_t`, so a step asks at
/// most `2t - 1` membership queries. Each `(index, element)` pair is asked at
/// most once over a run.
#[derive(Clone, Debug)]
pub struct ConsistentSet {
    collection: Arc<Collection>,
    purpose: QueryPurpose,
    seen: BTreeSet<Element>,
    alive: BTreeSet<u64>,
    t: u64,
}

impl ConsistentSet {
    pub fn new(collection: Arc<Collection>, purpose: QueryPurpose) -> Self {
        ConsistentSet {
            collection,
            purpose,
            seen: BTreeSet::new(),
            alive: BTreeSet::new(),
            t: 0,
        }
    }

    pub fn observe(&mut self, w: Element, ledger: &mut QueryLedger) -> Result<ConsistencyUpdate> {
        self.t += 1;
        let t = self.t;
        let mut update = ConsistencyUpdate {
            new_element: self.seen.insert(w),
            ..Default::default()
        };
        if update.new_element {
            for &i in &self.alive {
                if !ledger.query_collection(&self.collection, i, w, self.purpose)? {
                    update.dropped.push(i);
                }
            }
            for i in &update.dropped {
                self.alive.remove(i);
            }
        }
        let exists = self.collection.index_bound().is_none_or(|b| t <= b);
        if exists {
            let mut consistent = true;
            for &x in &self.seen {
                if !ledger.query_collection(&self.collection, t, x, self.purpose)? {
                    consistent = false;
                    break;
                }
            }
            if consistent {
                self.alive.insert(t);
                update.admitted = Some(t);
            }
        }
        Ok(update)
    }

    pub fn step(&self) -> u64 {
        self.t
    }

    /// Distinct elements seen so far (`E_t` as a set).
    pub fn seen(&self) -> &BTreeSet<Element> {
        &self.seen
    }

    /// The current consistent indices.
    pub fn indices(&self) -> &BTreeSet<u64> {
        &self.alive
    }

    pub fn contains(&self, i: u64) -> bool {
        self.alive.contains(&i)
    }

    pub fn collection(&self) -> &Arc<Collection> {
        &self.collection
    }
}

/// An online learner that outputs an index guess after each element.
pub trait Identifier: Send {
    fn name(&self) -> &'static str;

    /// Consume `w_t` and return the guess `i_t`.
    fn observe(&mut self, w: Element, ledger: &mut QueryLedger) -> Result<u64>;

    /// Number of distinct elements observed so far.
    fn distinct_seen(&self) -> usize;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentifierKind {
    Telltale,
    ConsistencyMin,
}

impl IdentifierKind {
    pub fn build(self, collection: Arc<Collection>) -> Box<dyn Identifier> {
        self.build_tagged(collection, QueryPurpose::CollectionQueryConsistency)
    }

    /// Build with a specific ledger tag for the identifier's membership queries.
    pub fn build_tagged(
        self,
        collection: Arc<Collection>,
        purpose: QueryPurpose,
    ) -> Box<dyn Identifier> {
        match self {
            IdentifierKind::Telltale => {
                Box::new(TelltaleIdentifier::with_purpose(collection, purpose))
            }
            IdentifierKind::ConsistencyMin => {
                Box::new(ConsistencyMinIdentifier::with_purpose(collection, purpose))
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IdentifierKind::Telltale => "telltale",
            IdentifierKind::ConsistencyMin => "consistency_min",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "telltale" => Ok(IdentifierKind::Telltale),
            "consistency_min" => Ok(IdentifierKind::ConsistencyMin),
            other => Err(LabError::config(
                "identifier",
                format!("unknown identifier {other:?} (expected telltale | consistency_min)"),
            )),
        }
    }
}

impl fmt::Display for IdentifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Identification by enumeration with tell-tales: guess the least `i <= t`
/// with `T_i ⊆ E_t ⊆ L_i`, or 1 when there is none.
#[derive(Clone, Debug)]
pub struct TelltaleIdentifier {
    consistent: ConsistentSet,
    /// Tell-tale elements of admitted index `i` not yet observed.
    missing: HashMap<u64, usize>,
    /// Admitted indices waiting on an unseen tell-tale element.
    waiting: HashMap<Element, Vec<u64>>,
    /// Consistent indices whose tell-tale has been fully observed.
    eligible: BTreeSet<u64>,
}

impl TelltaleIdentifier {
    pub fn new(collection: Arc<Collection>) -> Self {
        Self::with_purpose(collection, QueryPurpose::CollectionQueryConsistency)
    }

    pub fn with_purpose(collection: Arc<Collection>, purpose: QueryPurpose) -> Self {
        TelltaleIdentifier {
            consistent: ConsistentSet::new(collection, purpose),
            missing: HashMap::new(),
            waiting: HashMap::new(),
            eligible: BTreeSet::new(),
        }
    }

    /// Indices currently satisfying both conditions.
    pub fn eligible(&self) -> &BTreeSet<u64> {
        &self.eligible
    }
}

impl Identifier for TelltaleIdentifier {
    fn name(&self) -> &'static str {
        "telltale"
    }

    fn observe(&mut self, w: Element, ledger: &mut QueryLedger) -> Result<u64> {
        let t = self.consistent.step() + 1;
        let collection = Arc::clone(self.consistent.collection());
        // probe the tell-tale oracle for the new index before touching state
        let telltale = if collection.index_bound().is_none_or(|b| t <= b) {
            Some(collection.telltale(t)?.ok_or_else(|| {
                LabError::Inapplicable(format!(
                    "collection {} has no tell-tale for index {t}",
                    collection.id()
                ))
            })?)
        } else {
            None
        };

        let update = self.consistent.observe(w, ledger)?;
        for i in &update.dropped {
            self.eligible.remove(i);
            self.missing.remove(i);
        }
        if update.new_element {
            for i in self.waiting.remove(&w).unwrap_or_default() {
                // dropped indices may still sit in waiting lists
                let Some(left) = self.missing.get_mut(&i) else {
                    continue;
                };
                *left -= 1;
                if *left == 0 {
                    self.eligible.insert(i);
                }
            }
        }
        if let (Some(i), Some(tt)) = (update.admitted, telltale) {
            let unseen: Vec<Element> = tt
                .into_iter()
                .filter(|x| !self.consistent.seen().contains(x))
                .collect();
            if unseen.is_empty() {
                self.eligible.insert(i);
            } else {
                self.missing.insert(i, unseen.len());
                for x in unseen {
                    self.waiting.entry(x).or_default().push(i);
                }
            }
        }
        Ok(self.eligible.first().copied().unwrap_or(1))
    }

    fn distinct_seen(&self) -> usize {
        self.consistent.seen().len()
    }
}

/// The naive learner: least consistent index `i <= t`, or 1.
#[derive(Clone, Debug)]
pub struct ConsistencyMinIdentifier {
    consistent: ConsistentSet,
}

impl ConsistencyMinIdentifier {
    pub fn new(collection: Arc<Collection>) -> Self {
        Self::with_purpose(collection, QueryPurpose::CollectionQueryConsistency)
    }

    pub fn with_purpose(collection: Arc<Collection>, purpose: QueryPurpose) -> Self {
        ConsistencyMinIdentifier {
            consistent: ConsistentSet::new(collection, purpose),
        }
    }
}

impl Identifier for ConsistencyMinIdentifier {
    fn name(&self) -> &'static str {
        "consistency_min"
    }

    fn observe(&mut self, w: Element, ledger: &mut QueryLedger) -> Result<u64> {
        self.consistent.observe(w, ledger)?;
        Ok(self.consistent.indices().first().copied().unwrap_or(1))
    }

    fn distinct_seen(&self) -> usize {
        self.consistent.seen().len()
    }
}
