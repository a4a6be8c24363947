use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::scenario::{AlgorithmSpec, GameScenario, ResolvedScenario};
use crate::adversary::{EnumerationStream, LabeledEnumerationStream, RNG_ALGORITHM};
use crate::detect::{
    identification_detector_factory, Detector, IdentificationDetector, NegativeExampleDetector,
    Verdict,
};
use crate::error::Result;
use crate::lang::{Catalog, Element};
use crate::ledger::QueryLedger;
use crate::reduction::{ReductionIdentifier, RoundRecord};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionQueries {
    pub consistency: u64,
    pub detector: u64,
}

/// One step of a game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRow {
    pub t: u64,
    pub w: Element,
    /// Label `1{w ∈ K}` (labeled games only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guess: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    /// Inner identifier guess of a detector built on one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identifier_guess: Option<u64>,
    /// `C'_t` of the reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistent: Option<Vec<u64>>,
    pub fresh_candidate_queries: u64,
    pub fresh_collection_queries_by_purpose: CollectionQueries,
}

impl TranscriptRow {
    /// The algorithm's output at this step: the guess or the verdict bit.
    pub fn output(&self) -> u64 {
        match (self.guess, self.verdict) {
            (Some(g), _) => g,
            (None, Some(v)) => u64::from(v.bit()),
            (None, None) => unreachable!("every row carries an output"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub scenario_id: String,
    pub algorithm: String,
    pub adversary: String,
    pub rng_algorithm: String,
    pub rows: Vec<TranscriptRow>,
    /// Final-round state of a reduction run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_round: Option<RoundRecord>,
    /// `(element, step)` at which the negative-example detector fired.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negex_witness: Option<(Element, u64)>,
}

impl Transcript {
    pub fn outputs(&self) -> Vec<u64> {
        self.rows.iter().map(TranscriptRow::output).collect()
    }

    /// One JSON record per step, newline-terminated.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for row in &self.rows {
            let line = serde_json::to_string(row).expect("rows serialize");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }
}

/// Finite-horizon evidence of convergence: the output is constant and
/// correct from `t_star` through the horizon. A run can never show more.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub stabilized: bool,
    pub t_star: Option<u64>,
    pub final_output: u64,
    pub correct_at_horizon: bool,
    pub horizon: u64,
}

impl StabilizationReport {
    /// Analyze outputs `o_1..o_T` against a correctness predicate.
    pub fn analyze(outputs: &[u64], correct: impl Fn(u64) -> bool) -> Self {
        let horizon = outputs.len() as u64;
        let final_output = *outputs.last().expect("at least one step");
        let correct_at_horizon = correct(final_output);
        let t_star = correct_at_horizon.then(|| {
            let run = outputs
                .iter()
                .rev()
                .take_while(|&&o| o == final_output)
                .count() as u64;
            horizon - run + 1
        });
        StabilizationReport {
            stabilized: correct_at_horizon,
            t_star,
            final_output,
            correct_at_horizon,
            horizon,
        }
    }

    pub fn summary(&self) -> String {
        match self.t_star {
            Some(t) => format!(
                "stable through horizon {} from t*={t}, output {}",
                self.horizon, self.final_output
            ),
            None => format!(
                "not stable at horizon {}: final output {} is incorrect",
                self.horizon, self.final_output
            ),
        }
    }
}

/// What the algorithm should output in the limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum GroundTruth {
    /// `1{G ⊆ K}` and the least element of `G \ K`, if any.
    Detection {
        g_subset_of_k: bool,
        least_witness: Option<Element>,
    },
    /// Any index `z` with `L_z = K` is correct; `least_index` is the smallest.
    Identification { target_index: u64, least_index: u64 },
}

impl GroundTruth {
    pub fn of(resolved: &ResolvedScenario) -> Result<Self> {
        match &resolved.candidate {
            Some(g) => Ok(GroundTruth::Detection {
                g_subset_of_k: g.is_subset_of(&resolved.target.kind),
                least_witness: g.least_outside(&resolved.target.kind),
            }),
            None => {
                let k = resolved.scenario.target_index;
                let mut least = k;
                for z in 1..k {
                    if resolved.collection.equals(z, k)? {
                        least = z;
                        break;
                    }
                }
                Ok(GroundTruth::Identification {
                    target_index: k,
                    least_index: least,
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub scenario: GameScenario,
    pub ground_truth: GroundTruth,
    pub report: StabilizationReport,
    pub transcript: Transcript,
}

impl GameOutcome {
    /// The report file body: everything but the per-step rows.
    pub fn report_json(&self) -> String {
        #[derive(Serialize)]
        struct ReportFile<'a> {
            scenario: &'a GameScenario,
            algorithm: &'a str,
            adversary: &'a str,
            rng_algorithm: &'a str,
            ground_truth: &'a GroundTruth,
            report: &'a StabilizationReport,
            #[serde(skip_serializing_if = "Option::is_none")]
            final_round: Option<&'a RoundRecord>,
            #[serde(skip_serializing_if = "Option::is_none")]
            negex_witness: Option<(Element, u64)>,
        }
        let body = ReportFile {
            scenario: &self.scenario,
            algorithm: &self.transcript.algorithm,
            adversary: &self.transcript.adversary,
            rng_algorithm: &self.transcript.rng_algorithm,
            ground_truth: &self.ground_truth,
            report: &self.report,
            final_round: self.transcript.final_round.as_ref(),
            negex_witness: self.transcript.negex_witness,
        };
        let mut s = serde_json::to_string_pretty(&body).expect("report serializes");
        s.push('\n');
        s
    }
}

fn row(t: u64, w: Element, ledger: &QueryLedger) -> TranscriptRow {
    let counts = ledger.at(t);
    TranscriptRow {
        t,
        w,
        y: None,
        guess: None,
        verdict: None,
        identifier_guess: None,
        consistent: None,
        fresh_candidate_queries: counts.candidate,
        fresh_collection_queries_by_purpose: CollectionQueries {
            consistency: counts.consistency,
            detector: counts.detector,
        },
    }
}

/// Drive adversary, algorithm and ledger for `horizon` steps.
pub fn run_game(scenario: &GameScenario, catalog: &Catalog) -> Result<GameOutcome> {
    let resolved = scenario.resolve(catalog)?;
    run_resolved(&resolved)
}

pub fn run_resolved(resolved: &ResolvedScenario) -> Result<GameOutcome> {
    let scenario = &resolved.scenario;
    let horizon = scenario.horizon;
    let collection = Arc::clone(&resolved.collection);
    let mut ledger = QueryLedger::new();
    let mut rows = Vec::with_capacity(horizon as usize);
    let mut final_round = None;
    let mut negex_witness = None;

    match &scenario.algorithm {
        AlgorithmSpec::Negex => {
            let g = resolved
                .candidate
                .clone()
                .expect("resolved detection scenario");
            let mut stream =
                LabeledEnumerationStream::new(resolved.target.clone(), scenario.adversary.clone())?;
            let mut detector = NegativeExampleDetector::new(g);
            for t in 1..=horizon {
                ledger.begin_step(t);
                let (w, y) = stream.next_labeled();
                let verdict = detector.observe(w, y, &mut ledger);
                let mut r = row(t, w, &ledger);
                r.y = Some(u8::from(y));
                r.verdict = Some(verdict);
                rows.push(r);
            }
            negex_witness = detector.witness();
        }
        AlgorithmSpec::Alg1 { identifier } => {
            let g = resolved
                .candidate
                .clone()
                .expect("resolved detection scenario");
            let mut stream =
                EnumerationStream::new(resolved.target.clone(), scenario.adversary.clone())?;
            let mut detector =
                IdentificationDetector::with_identifier(*identifier, Arc::clone(&collection), g);
            for t in 1..=horizon {
                ledger.begin_step(t);
                let w = stream.next_element();
                let verdict = detector.observe(w, &mut ledger)?;
                let mut r = row(t, w, &ledger);
                r.verdict = Some(verdict);
                r.identifier_guess = detector.identifier_guess();
                rows.push(r);
            }
        }
        AlgorithmSpec::Identifier { identifier } => {
            let mut stream =
                EnumerationStream::new(resolved.target.clone(), scenario.adversary.clone())?;
            let mut id = identifier.build(Arc::clone(&collection));
            for t in 1..=horizon {
                ledger.begin_step(t);
                let w = stream.next_element();
                let guess = id.observe(w, &mut ledger)?;
                let mut r = row(t, w, &ledger);
                r.guess = Some(guess);
                rows.push(r);
            }
        }
        AlgorithmSpec::Reduction { identifier, mode } => {
            let mut stream =
                EnumerationStream::new(resolved.target.clone(), scenario.adversary.clone())?;
            let factory = identification_detector_factory(Arc::clone(&collection), *identifier);
            let mut reduction = ReductionIdentifier::new(Arc::clone(&collection), factory, *mode);
            for t in 1..=horizon {
                ledger.begin_step(t);
                let w = stream.next_element();
                let guess = reduction.step(w, &mut ledger)?;
                let mut r = row(t, w, &ledger);
                r.guess = Some(guess);
                r.consistent = reduction.last_round().map(|rr| rr.consistent.clone());
                rows.push(r);
            }
            final_round = reduction.last_round().cloned();
        }
    }

    let transcript = Transcript {
        scenario_id: scenario.scenario_id.clone(),
        algorithm: scenario.algorithm.label(),
        adversary: scenario.adversary.to_string(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        rows,
        final_round,
        negex_witness,
    };
    let ground_truth = GroundTruth::of(resolved)?;
    let outputs = transcript.outputs();
    let report = match &ground_truth {
        GroundTruth::Detection { g_subset_of_k, .. } => {
            let expected = u64::from(Verdict::from_subset(*g_subset_of_k).bit());
            StabilizationReport::analyze(&outputs, |o| o == expected)
        }
        GroundTruth::Identification { target_index, .. } => {
            let k = *target_index;
            StabilizationReport::analyze(&outputs, |z| collection.equals(z, k).unwrap_or(false))
        }
    };
    Ok(GameOutcome {
        scenario: scenario.clone(),
        ground_truth,
        report,
        transcript,
    })
}
