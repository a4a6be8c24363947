//! Hallucination detectors.
//!
//! A verdict is emitted after every consumed element; there is no verdict
//! before the first one.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::identify::{Identifier, IdentifierKind};
use crate::lang::{CandidateSet, Collection, Element};
use crate::ledger::{QueryLedger, QueryPurpose};

/// `d_t`: 0 means "G hallucinates", 1 means "G does not hallucinate".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Verdict {
    Hallucinates,
    NoHallucination,
}

impl Verdict {
    pub fn from_subset(g_subset_of_k: bool) -> Self {
        if g_subset_of_k {
            Verdict::NoHallucination
        } else {
            Verdict::Hallucinates
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Verdict::Hallucinates => 0,
            Verdict::NoHallucination => 1,
        }
    }
}

impl From<Verdict> for u8 {
    fn from(v: Verdict) -> u8 {
        v.bit()
    }
}

impl TryFrom<u8> for Verdict {
    type Error = String;

    fn try_from(bit: u8) -> std::result::Result<Self, String> {
        match bit {
            0 => Ok(Verdict::Hallucinates),
            1 => Ok(Verdict::NoHallucination),
            other => Err(format!("verdict bit must be 0 or 1, got {other}")),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// A detector in the positive-only game: it sees `w_t` and may query `G`.
pub trait Detector: Send {
    fn name(&self) -> &'static str;

    fn observe(&mut self, w: Element, ledger: &mut QueryLedger) -> Result<Verdict>;

    /// The inner identifier's latest guess, for detectors built on one.
    fn identifier_guess(&self) -> Option<u64> {
        None
    }
}

/// Builds a fresh detector for a given candidate set.
pub type DetectorFactory = Arc<dyn Fn(CandidateSet) -> Result<Box<dyn Detector>> + Send + Sync>;

/// Detection from identification: feed `w_t` to an identifier, take
/// `K̂ = L_{i_t}` and scan the domain prefix `x_1..x_t` for an element of
/// `G` outside `K̂`.
///
/// Answers are cached (`G` per element, `L_i` per `(i, element)`), so a step
/// asks at most one fresh `G` query per scanned element and re-asks nothing
/// after a guess change back to an earlier index.
pub struct IdentificationDetector {
    identifier: Box<dyn Identifier>,
    collection: Arc<Collection>,
    candidate: CandidateSet,
    collection_purpose: QueryPurpose,
    t: u64,
    in_candidate: Vec<Option<bool>>,
    rows: HashMap<u64, Vec<Option<bool>>>,
    guess: Option<u64>,
    /// Least witness `x <= t` for the current guess, once found.
    witness: Option<u64>,
}

impl IdentificationDetector {
    pub fn new(
        identifier: Box<dyn Identifier>,
        collection: Arc<Collection>,
        candidate: CandidateSet,
    ) -> Self {
        IdentificationDetector {
            identifier,
            collection,
            candidate,
            collection_purpose: QueryPurpose::CollectionQueryDetector,
            t: 0,
            in_candidate: Vec::new(),
            rows: HashMap::new(),
            guess: None,
            witness: None,
        }
    }

    pub fn with_identifier(
        kind: IdentifierKind,
        collection: Arc<Collection>,
        candidate: CandidateSet,
    ) -> Self {
        let identifier = kind.build(Arc::clone(&collection));
        Self::new(identifier, collection, candidate)
    }

    fn in_g(&mut self, x: u64, ledger: &mut QueryLedger) -> bool {
        let slot = (x - 1) as usize;
        if self.in_candidate.len() <= slot {
            self.in_candidate.resize(slot + 1, None);
        }
        match self.in_candidate[slot] {
            Some(b) => b,
            None => {
                let b = ledger.query_candidate(&self.candidate, Element::from_raw(x));
                self.in_candidate[slot] = Some(b);
                b
            }
        }
    }

    fn in_guess(&mut self, i: u64, x: u64, ledger: &mut QueryLedger) -> Result<bool> {
        let slot = (x - 1) as usize;
        let row = self.rows.entry(i).or_default();
        if row.len() <= slot {
            row.resize(slot + 1, None);
        }
        if let Some(b) = row[slot] {
            return Ok(b);
        }
        let b = ledger.query_collection(
            &self.collection,
            i,
            Element::from_raw(x),
            self.collection_purpose,
        )?;
        self.rows.get_mut(&i).expect("row exists")[slot] = Some(b);
        Ok(b)
    }

    /// First `x` in `from..=to` with `x ∈ G` and `x ∉ L_i`.
    fn scan(
        &mut self,
        i: u64,
        from: u64,
        to: u64,
        ledger: &mut QueryLedger,
    ) -> Result<Option<u64>> {
        for x in from..=to {
            if self.in_g(x, ledger) && !self.in_guess(i, x, ledger)? {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }
}

impl Detector for IdentificationDetector {
    fn name(&self) -> &'static str {
        "alg1"
    }

    fn observe(&mut self, w: Element, ledger: &mut QueryLedger) -> Result<Verdict> {
        self.t += 1;
        let t = self.t;
        let guess = self.identifier.observe(w, ledger)?;
        if self.guess != Some(guess) {
            self.guess = Some(guess);
            self.witness = self.scan(guess, 1, t, ledger)?;
        } else if self.witness.is_none() {
            // x_1..x_{t-1} are already known to be clean for this guess
            self.witness = self.scan(guess, t, t, ledger)?;
        }
        Ok(if self.witness.is_some() {
            Verdict::Hallucinates
        } else {
            Verdict::NoHallucination
        })
    }

    fn identifier_guess(&self) -> Option<u64> {
        self.guess
    }
}

/// Factory for [`IdentificationDetector`]s over one collection.
pub fn identification_detector_factory(
    collection: Arc<Collection>,
    kind: IdentifierKind,
) -> DetectorFactory {
    Arc::new(move |candidate: CandidateSet| {
        Ok(Box::new(IdentificationDetector::with_identifier(
            kind,
            Arc::clone(&collection),
            candidate,
        )) as Box<dyn Detector>)
    })
}

/// The labeled-game detector: declare a hallucination as soon as some element
/// labeled 0 (outside `K`) is found in `G`. Once declared, it stays declared.
#[derive(Clone, Debug)]
pub struct NegativeExampleDetector {
    candidate: CandidateSet,
    witness: Option<(Element, u64)>,
    t: u64,
}

impl NegativeExampleDetector {
    pub fn new(candidate: CandidateSet) -> Self {
        NegativeExampleDetector {
            candidate,
            witness: None,
            t: 0,
        }
    }

    /// The first `(element, step)` found in `G` with label 0.
    pub fn witness(&self) -> Option<(Element, u64)> {
        self.witness
    }

    pub fn observe(&mut self, w: Element, in_target: bool, ledger: &mut QueryLedger) -> Verdict {
        self.t += 1;
        if self.witness.is_none() && !in_target && ledger.query_candidate(&self.candidate, w) {
            self.witness = Some((w, self.t));
        }
        if self.witness.is_some() {
            Verdict::Hallucinates
        } else {
            Verdict::NoHallucination
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    Alg1,
    Negex,
}

impl DetectorKind {
    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Alg1 => "alg1",
            DetectorKind::Negex => "negex",
        }
    }
}
