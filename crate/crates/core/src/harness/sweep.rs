//! Batch execution of scenarios with one summary row per scenario.

use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::game::{run_game, GameOutcome};
use super::scenario::GameScenario;
use crate::error::{LabError, Result};
use crate::lang::Catalog;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scenario_id: String,
    pub algorithm: String,
    pub stabilized: bool,
    pub t_star: Option<u64>,
    pub correct_at_horizon: bool,
    pub candidate_queries: u64,
    pub consistency_queries: u64,
    pub detector_queries: u64,
    /// `ok`, `inapplicable: ...` or `error: ...`.
    pub status: String,
}

impl SweepRow {
    pub fn from_outcome(outcome: &GameOutcome) -> Self {
        let rows = &outcome.transcript.rows;
        SweepRow {
            scenario_id: outcome.scenario.scenario_id.clone(),
            algorithm: outcome.transcript.algorithm.clone(),
            stabilized: outcome.report.stabilized,
            t_star: outcome.report.t_star,
            correct_at_horizon: outcome.report.correct_at_horizon,
            candidate_queries: rows.iter().map(|r| r.fresh_candidate_queries).sum(),
            consistency_queries: rows
                .iter()
                .map(|r| r.fresh_collection_queries_by_purpose.consistency)
                .sum(),
            detector_queries: rows
                .iter()
                .map(|r| r.fresh_collection_queries_by_purpose.detector)
                .sum(),
            status: "ok".to_string(),
        }
    }

    fn failed(scenario: &GameScenario, err: &LabError) -> Self {
        let status = match err {
            LabError::Inapplicable(msg) => format!("inapplicable: {msg}"),
            other => format!("error: {other}"),
        };
        SweepRow {
            scenario_id: scenario.scenario_id.clone(),
            algorithm: scenario.algorithm.label(),
            stabilized: false,
            t_star: None,
            correct_at_horizon: false,
            candidate_queries: 0,
            consistency_queries: 0,
            detector_queries: 0,
            status,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Run every scenario; a scenario that fails becomes a row with a non-`ok`
/// status. Duplicate ids are rejected up front. Rows are sorted by id.
pub fn run_sweep(scenarios: &[GameScenario], catalog: &Catalog) -> Result<Vec<SweepRow>> {
    let mut ids = BTreeSet::new();
    for s in scenarios {
        if !ids.insert(s.scenario_id.as_str()) {
            return Err(LabError::config(
                "scenario_id",
                format!("duplicate scenario id {:?}", s.scenario_id),
            ));
        }
    }
    let mut rows: Vec<SweepRow> = scenarios
        .par_iter()
        .map(|s| match run_game(s, catalog) {
            Ok(outcome) => SweepRow::from_outcome(&outcome),
            Err(e) => SweepRow::failed(s, &e),
        })
        .collect();
    rows.sort_by(|a, b| a.scenario_id.cmp(&b.scenario_id));
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| LabError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
