//! Command-line driver. Human summaries go to stdout, artifacts to files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adversary::Strategy;
use crate::error::{LabError, Result};
use crate::harness::{
    check_angluin, parse_scenarios, run_game, run_sweep, write_csv, AlgorithmSpec, CandidateField,
    CheckBounds, GameOutcome, GameScenario, GridSpec, StabilizationReport,
};
use crate::identify::IdentifierKind;
use crate::lang::Catalog;
use crate::reduction::PoolMode;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "LIMITLAB_OUT_DIR";

pub const EXIT_OK: i32 = 0;
/// A round trip ran but did not end on `K`.
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INAPPLICABLE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "limitlab",
    version,
    about = "Identification and hallucination-detection games"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one game and write its transcript and report.
    Run(RunArgs),
    /// Run many scenarios and write a summary table.
    Sweep(SweepArgs),
    /// Identifier, detector built on it, and identifier rebuilt from that detector.
    Roundtrip(RoundtripArgs),
    /// Check a tell-tale candidate for one index.
    CheckAngluin(CheckArgs),
    /// List the built-in collections.
    Catalog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Identifier,
    Alg1,
    Negex,
    Reduction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorArg {
    Alg1,
    Negex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentifierArg {
    Telltale,
    ConsistencyMin,
}

impl From<IdentifierArg> for IdentifierKind {
    fn from(a: IdentifierArg) -> Self {
        match a {
            IdentifierArg::Telltale => IdentifierKind::Telltale,
            IdentifierArg::ConsistencyMin => IdentifierKind::ConsistencyMin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Canonical,
    RepeatHeavy,
    BlockShuffle,
    DelayPattern,
}

#[derive(Debug, Clone, Args)]
pub struct AdversaryArgs {
    #[arg(long, value_enum, default_value = "canonical")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repeat probability as `a/b`.
    #[arg(long, default_value = "1/2")]
    pub repeat_prob: String,
    #[arg(long, default_value_t = 2)]
    pub block_growth: u64,
    #[arg(long, default_value_t = 2)]
    pub period: u64,
}

impl AdversaryArgs {
    pub fn strategy(&self) -> Result<Strategy> {
        let s = match self.strategy {
            StrategyArg::Canonical => Strategy::Canonical,
            StrategyArg::RepeatHeavy => {
                let (a, b) = self
                    .repeat_prob
                    .split_once('/')
                    .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                    .ok_or_else(|| {
                        LabError::config("repeat-prob", "expected a/b with integers a < b")
                    })?;
                Strategy::RepeatHeavy {
                    seed: self.seed,
                    numerator: a,
                    denominator: b,
                }
            }
            StrategyArg::BlockShuffle => Strategy::BlockShuffle {
                seed: self.seed,
                block_growth: self.block_growth,
            },
            StrategyArg::DelayPattern => Strategy::DelayPattern {
                period: self.period,
            },
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory (default: $LIMITLAB_OUT_DIR, else ./limitlab-out).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl OutArgs {
    pub fn resolve(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("limitlab-out"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario file (TOML) holding exactly one scenario.
    #[arg(long, conflicts_with_all = ["collection", "target", "g", "detector", "algorithm"])]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub collection: Option<String>,
    #[arg(long)]
    pub target: Option<u64>,
    /// Candidate set: lang:<i>, lang:<i>+{a,b}, lang:<i>-{a,b}, set:{a,b}, all, empty.
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, value_enum, conflicts_with = "algorithm")]
    pub detector: Option<DetectorArg>,
    /// Defaults to alg1 when --g is given, else identifier.
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,
    #[arg(long, value_enum, default_value = "telltale")]
    pub identifier: IdentifierArg,
    /// Replay every detector copy from scratch each round (reduction only).
    #[arg(long)]
    pub fresh_copies: bool,
    #[command(flatten)]
    pub adversary: AdversaryArgs,
    #[arg(long, default_value_t = 1000)]
    pub horizon: u64,
    #[arg(long, default_value = "cli")]
    pub scenario_id: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Scenario file with a `[[scenario]]` list. Without it the standard grid runs.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "alg1")]
    pub algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value = "telltale")]
    pub identifier: IdentifierArg,
    #[arg(long)]
    pub fresh_copies: bool,
    #[arg(long, default_value_t = 200)]
    pub horizon: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RoundtripArgs {
    #[arg(long)]
    pub collection: String,
    #[arg(long)]
    pub target: u64,
    /// Candidate for the detector leg (default: lang:<target>).
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub fresh_copies: bool,
    #[command(flatten)]
    pub adversary: AdversaryArgs,
    #[arg(long, default_value_t = 300)]
    pub horizon: u64,
    #[arg(long, default_value = "roundtrip")]
    pub scenario_id: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub collection: String,
    #[arg(long)]
    pub index: u64,
    /// Comma-separated tell-tale (default: the collection's own).
    #[arg(long, value_delimiter = ',')]
    pub telltale: Option<Vec<u64>>,
    /// `J,M`: index bound and element bound.
    #[arg(long, default_value = "64,64")]
    pub bounds: String,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Map an error to its exit code.
pub fn exit_code(err: &LabError) -> i32 {
    match err {
        LabError::Config { .. } => EXIT_VALIDATION,
        LabError::Inapplicable(_) => EXIT_INAPPLICABLE,
        LabError::Io(_) => EXIT_INTERNAL,
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            let body = serde_json::json!({
                "error": match &e {
                    LabError::Config { .. } => "validation",
                    LabError::Inapplicable(_) => "inapplicable",
                    LabError::Io(_) => "internal",
                },
                "field": match &e { LabError::Config { field, .. } => Some(field.as_str()), _ => None },
                "message": e.to_string(),
                "exit_code": code,
            });
            eprintln!("{body}");
            code
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Run(a) => cmd_run(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Roundtrip(a) => cmd_roundtrip(&a),
        Command::CheckAngluin(a) => cmd_check_angluin(&a),
        Command::Catalog => {
            for c in Catalog::standard().iter() {
                println!("{}\t{}", c.id(), c.summary());
            }
            Ok(EXIT_OK)
        }
    }
}

fn pool_mode(fresh: bool) -> PoolMode {
    if fresh {
        PoolMode::FreshCopies
    } else {
        PoolMode::Incremental
    }
}

fn algorithm_spec(kind: AlgorithmArg, identifier: IdentifierKind, fresh: bool) -> AlgorithmSpec {
    match kind {
        AlgorithmArg::Identifier => AlgorithmSpec::Identifier { identifier },
        AlgorithmArg::Alg1 => AlgorithmSpec::Alg1 { identifier },
        AlgorithmArg::Negex => AlgorithmSpec::Negex,
        AlgorithmArg::Reduction => AlgorithmSpec::Reduction {
            identifier,
            mode: pool_mode(fresh),
        },
    }
}

fn read_config(path: &Path) -> Result<Vec<GameScenario>> {
    let text = fs::read_to_string(path)
        .map_err(|e| LabError::config("config", format!("{}: {e}", path.display())))?;
    parse_scenarios(&text)
}

pub fn scenario_from_run_args(a: &RunArgs) -> Result<GameScenario> {
    if let Some(path) = &a.config {
        let mut all = read_config(path)?;
        if all.len() != 1 {
            return Err(LabError::config(
                "config",
                format!(
                    "run takes exactly one scenario, found {} (use sweep)",
                    all.len()
                ),
            ));
        }
        return Ok(all.remove(0));
    }
    let collection = a
        .collection
        .clone()
        .ok_or_else(|| LabError::config("collection", "required without --config"))?;
    let target = a
        .target
        .ok_or_else(|| LabError::config("target", "required without --config"))?;
    let kind = match (a.detector, a.algorithm) {
        (Some(DetectorArg::Alg1), _) => AlgorithmArg::Alg1,
        (Some(DetectorArg::Negex), _) => AlgorithmArg::Negex,
        (None, Some(k)) => k,
        (None, None) if a.g.is_some() => AlgorithmArg::Alg1,
        (None, None) => AlgorithmArg::Identifier,
    };
    Ok(GameScenario {
        scenario_id: a.scenario_id.clone(),
        collection,
        target_index: target,
        candidate: a.g.clone().map(CandidateField::Text),
        adversary: a.adversary.strategy()?,
        algorithm: algorithm_spec(kind, a.identifier.into(), a.fresh_copies),
        horizon: a.horizon,
    })
}

/// Directory-safe form of a scenario id.
pub fn sanitize_id(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_outcome(dir: &Path, outcome: &GameOutcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("transcript.jsonl"), outcome.transcript.to_jsonl())?;
    fs::write(dir.join("report.json"), outcome.report_json())?;
    Ok(())
}

fn summary_line(id: &str, algorithm: &str, report: &StabilizationReport) -> String {
    let t_star = report.t_star.map_or("-".to_string(), |t| t.to_string());
    format!(
        "{id} {algorithm}: stabilized={} t*={t_star} final={} horizon={}",
        report.stabilized, report.final_output, report.horizon
    )
}

fn cmd_run(a: &RunArgs) -> Result<i32> {
    let scenario = scenario_from_run_args(a)?;
    let outcome = run_game(&scenario, &Catalog::standard())?;
    let dir = a.out.resolve().join(sanitize_id(&scenario.scenario_id));
    write_outcome(&dir, &outcome)?;
    println!(
        "{}",
        summary_line(
            &scenario.scenario_id,
            &outcome.transcript.algorithm,
            &outcome.report
        )
    );
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &SweepArgs) -> Result<i32> {
    let catalog = Catalog::standard();
    let scenarios = match &a.config {
        Some(path) => read_config(path)?,
        None => GridSpec::standard(
            algorithm_spec(a.algorithm, a.identifier.into(), a.fresh_copies),
            a.horizon,
        )
        .scenarios(&catalog)?,
    };
    let rows = run_sweep(&scenarios, &catalog)?;
    let dir = a.out.resolve();
    fs::create_dir_all(&dir)?;
    let path = dir.join("sweep.csv");
    write_csv(&rows, fs::File::create(&path)?)?;
    let ok = rows.iter().filter(|r| r.is_ok()).count();
    let stabilized = rows.iter().filter(|r| r.stabilized).count();
    println!(
        "sweep: {} scenarios, {ok} ran, {stabilized} stabilized, {} not run; table at {}",
        rows.len(),
        rows.len() - ok,
        path.display()
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RoundtripLeg<'a> {
    leg: &'a str,
    algorithm: String,
    report: &'a StabilizationReport,
    final_equals_target: Option<bool>,
}

fn cmd_roundtrip(a: &RoundtripArgs) -> Result<i32> {
    let catalog = Catalog::standard();
    let collection = catalog.get(&a.collection)?;
    if !collection.has_telltale_rule() {
        return Err(LabError::Inapplicable(format!(
            "collection {} has no tell-tale oracle, so the detector leg cannot be built",
            collection.id()
        )));
    }
    let adversary = a.adversary.strategy()?;
    let identifier = IdentifierKind::Telltale;
    let base = GameScenario {
        scenario_id: a.scenario_id.clone(),
        collection: a.collection.clone(),
        target_index: a.target,
        candidate: None,
        adversary,
        algorithm: AlgorithmSpec::Identifier { identifier },
        horizon: a.horizon,
    };
    let legs = [
        ("identifier", base.clone()),
        (
            "detector",
            GameScenario {
                candidate: Some(CandidateField::Text(
                    a.g.clone().unwrap_or_else(|| format!("lang:{}", a.target)),
                )),
                algorithm: AlgorithmSpec::Alg1 { identifier },
                ..base.clone()
            },
        ),
        (
            "reduction",
            GameScenario {
                algorithm: AlgorithmSpec::Reduction {
                    identifier,
                    mode: pool_mode(a.fresh_copies),
                },
                ..base.clone()
            },
        ),
    ];
    let root = a.out.resolve().join(sanitize_id(&a.scenario_id));
    let mut outcomes = Vec::new();
    for (leg, scenario) in &legs {
        let outcome = run_game(scenario, &catalog)?;
        write_outcome(&root.join(leg), &outcome)?;
        outcomes.push((*leg, outcome));
    }
    let mut records = Vec::new();
    let mut all_match = true;
    for (leg, outcome) in &outcomes {
        let equals = match outcome.scenario.algorithm {
            AlgorithmSpec::Alg1 { .. } => None,
            _ => Some(
                outcome.report.stabilized
                    && collection.equals(outcome.report.final_output, a.target)?,
            ),
        };
        all_match &= equals.unwrap_or(true);
        println!(
            "{}",
            summary_line(leg, &outcome.transcript.algorithm, &outcome.report)
        );
        records.push(RoundtripLeg {
            leg,
            algorithm: outcome.transcript.algorithm.clone(),
            report: &outcome.report,
            final_equals_target: equals,
        });
    }
    let body = serde_json::json!({
        "collection": a.collection,
        "target_index": a.target,
        "legs": records,
        "identifiers_end_on_target": all_match,
    });
    fs::write(
        root.join("roundtrip.json"),
        serde_json::to_string_pretty(&body).expect("serializes") + "\n",
    )?;
    println!(
        "roundtrip: identifiers end on K = L_{}: {all_match}",
        a.target
    );
    Ok(if all_match { EXIT_OK } else { EXIT_MISMATCH })
}

fn parse_bounds(text: &str) -> Result<CheckBounds> {
    let (j, m) = text
        .split_once(',')
        .and_then(|(j, m)| Some((j.trim().parse().ok()?, m.trim().parse().ok()?)))
        .ok_or_else(|| LabError::config("bounds", "expected J,M with positive integers"))?;
    Ok(CheckBounds {
        index_bound: j,
        element_bound: m,
    })
}

fn cmd_check_angluin(a: &CheckArgs) -> Result<i32> {
    let catalog = Catalog::standard();
    let collection = catalog.get(&a.collection)?;
    let bounds = parse_bounds(&a.bounds)?;
    let result = check_angluin(&collection, a.index, a.telltale.as_deref(), bounds)?;
    let dir = a.out.resolve();
    fs::create_dir_all(&dir)?;
    let path = dir.join(format!(
        "angluin-{}-{}.json",
        sanitize_id(&a.collection),
        a.index
    ));
    fs::write(
        &path,
        serde_json::to_string_pretty(&result).expect("serializes") + "\n",
    )?;
    let detail = match result.certificate() {
        Some(c) => format!(
            " witness j={} strictness x={}",
            c.witness_index, c.strictness_witness
        ),
        None => String::new(),
    };
    println!(
        "{} index {}: {}{detail} ({})",
        a.collection,
        a.index,
        result.verdict_name(),
        path.display()
    );
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_flags_are_validation_errors() {
        assert_eq!(
            main_with_args(["limitlab", "run", "--bogus"]),
            EXIT_VALIDATION
        );
        assert_eq!(main_with_args(["limitlab"]), EXIT_VALIDATION);
    }

    #[test]
    fn repeat_prob_must_be_a_proper_fraction() {
        let mut a = AdversaryArgs {
            strategy: StrategyArg::RepeatHeavy,
            seed: 1,
            repeat_prob: "2/2".into(),
            block_growth: 2,
            period: 2,
        };
        assert!(a.strategy().is_err());
        a.repeat_prob = "half".into();
        assert!(a.strategy().is_err());
        a.repeat_prob = "1/3".into();
        assert!(a.strategy().is_ok());
    }

    #[test]
    fn ids_are_made_path_safe() {
        assert_eq!(sanitize_id("multiples/k02/all"), "multiples_k02_all");
    }
}
