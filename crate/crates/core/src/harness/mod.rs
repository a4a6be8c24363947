//! Scenario configuration, game execution, sweeps and the tell-tale checker.

pub mod angluin;
pub mod game;
pub mod grid;
pub mod scenario;
pub mod sweep;

pub use angluin::{
    check_angluin, AngluinCheckResult, AngluinVerdict, CheckBounds, ViolationCertificate,
};
pub use game::{
    run_game, run_resolved, GameOutcome, GroundTruth, StabilizationReport, Transcript,
    TranscriptRow,
};
pub use grid::{CandidateRole, GridSpec};
pub use scenario::{
    parse_scenarios, AlgorithmSpec, CandidateField, GameScenario, ResolvedScenario,
};
pub use sweep::{run_sweep, write_csv, SweepRow};
