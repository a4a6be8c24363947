//! Per-step accounting of oracle calls.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lang::{CandidateSet, Collection, Element};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryPurpose {
    /// `x ∈ G?`
    CandidateQuery,
    /// `x ∈ L_i?` asked to maintain a consistent set.
    CollectionQueryConsistency,
    /// `x ∈ L_i?` asked on behalf of a detector.
    CollectionQueryDetector,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounts {
    pub candidate: u64,
    pub consistency: u64,
    pub detector: u64,
}

impl StepCounts {
    pub fn get(&self, purpose: QueryPurpose) -> u64 {
        match purpose {
            QueryPurpose::CandidateQuery => self.candidate,
            QueryPurpose::CollectionQueryConsistency => self.consistency,
            QueryPurpose::CollectionQueryDetector => self.detector,
        }
    }

    fn slot(&mut self, purpose: QueryPurpose) -> &mut u64 {
        match purpose {
            QueryPurpose::CandidateQuery => &mut self.candidate,
            QueryPurpose::CollectionQueryConsistency => &mut self.consistency,
            QueryPurpose::CollectionQueryDetector => &mut self.detector,
        }
    }

    pub fn total(&self) -> u64 {
        self.candidate + self.consistency + self.detector
    }

    pub fn collection(&self) -> u64 {
        self.consistency + self.detector
    }
}

impl std::ops::AddAssign for StepCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.candidate += rhs.candidate;
        self.consistency += rhs.consistency;
        self.detector += rhs.detector;
    }
}

/// Oracle-call counters keyed by `(step, purpose)`. Step 0 collects calls made
/// before the first element arrives.
#[derive(Clone, Debug, Default)]
pub struct QueryLedger {
    step: u64,
    counts: Vec<StepCounts>,
}

impl QueryLedger {
    pub fn new() -> Self {
        QueryLedger {
            step: 0,
            counts: vec![StepCounts::default()],
        }
    }

    /// Move the ledger to step `t`. Steps never go backwards.
    pub fn begin_step(&mut self, t: u64) {
        assert!(
            t >= self.step,
            "ledger steps are monotone ({} -> {t})",
            self.step
        );
        self.step = t;
        let needed = t as usize + 1;
        if self.counts.len() < needed {
            self.counts.resize(needed, StepCounts::default());
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn record(&mut self, purpose: QueryPurpose) {
        self.record_many(purpose, 1);
    }

    pub fn record_many(&mut self, purpose: QueryPurpose, n: u64) {
        if self.counts.is_empty() {
            self.counts.push(StepCounts::default());
        }
        let step = self.step as usize;
        *self.counts[step].slot(purpose) += n;
    }

    /// Counters for step `t` (zero if nothing happened then).
    pub fn at(&self, t: u64) -> StepCounts {
        self.counts.get(t as usize).copied().unwrap_or_default()
    }

    pub fn totals(&self) -> StepCounts {
        let mut total = StepCounts::default();
        for c in &self.counts {
            total += *c;
        }
        total
    }

    pub fn total_calls(&self) -> u64 {
        self.totals().total()
    }

    /// Ledgered `x ∈ L_i`.
    pub fn query_collection(
        &mut self,
        collection: &Collection,
        i: u64,
        x: Element,
        purpose: QueryPurpose,
    ) -> Result<bool> {
        let answer = collection.contains(i, x)?;
        self.record(purpose);
        Ok(answer)
    }

    /// Ledgered `x ∈ G`.
    pub fn query_candidate(&mut self, candidate: &CandidateSet, x: Element) -> bool {
        self.record(QueryPurpose::CandidateQuery);
        candidate.contains(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{CandidateSpec, Catalog};
    use proptest::prelude::*;

    #[test]
    fn queries_land_on_the_current_step() {
        let mut ledger = QueryLedger::new();
        let m = Collection::multiples();
        let g = CandidateSpec::Empty.resolve(&Catalog::standard()).unwrap();
        ledger.begin_step(1);
        let x = Element::new(6).unwrap();
        assert!(ledger
            .query_collection(&m, 2, x, QueryPurpose::CollectionQueryConsistency)
            .unwrap());
        ledger.begin_step(3);
        assert!(!ledger.query_candidate(&g, x));
        assert_eq!(ledger.at(1).consistency, 1);
        assert_eq!(ledger.at(2), StepCounts::default());
        assert_eq!(ledger.at(3).candidate, 1);
        assert_eq!(ledger.total_calls(), 2);
    }

    #[test]
    fn failed_queries_are_not_counted() {
        let mut ledger = QueryLedger::new();
        let x = Element::new(1).unwrap();
        let r = ledger.query_collection(
            &Collection::multiples(),
            0,
            x,
            QueryPurpose::CollectionQueryDetector,
        );
        assert!(r.is_err());
        assert_eq!(ledger.total_calls(), 0);
    }

    proptest! {
        #[test]
        fn counter_sum_equals_call_count(calls in proptest::collection::vec((0u64..4, 0u8..3), 0..200)) {
            let mut ledger = QueryLedger::new();
            let mut steps: Vec<(u64, u8)> = calls;
            steps.sort_by_key(|c| c.0);
            let mut prev_totals = ledger.totals();
            for (t, p) in &steps {
                ledger.begin_step(*t);
                let purpose = match p {
                    0 => QueryPurpose::CandidateQuery,
                    1 => QueryPurpose::CollectionQueryConsistency,
                    _ => QueryPurpose::CollectionQueryDetector,
                };
                ledger.record(purpose);
                let totals = ledger.totals();
                prop_assert!(totals.candidate >= prev_totals.candidate);
                prop_assert!(totals.consistency >= prev_totals.consistency);
                prop_assert!(totals.detector >= prev_totals.detector);
                prev_totals = totals;
            }
            prop_assert_eq!(ledger.total_calls(), steps.len() as u64);
        }
    }
}
