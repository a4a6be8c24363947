use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn limitlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_limitlab"))
        .args(args)
        .env("LIMITLAB_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn run_negex_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = limitlab(
        dir.path(),
        &[
            "run",
            "--collection",
            "multiples",
            "--target",
            "2",
            "--g",
            "lang:3",
            "--detector",
            "negex",
            "--horizon",
            "50",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("stabilized=true t*=3"));
    let r = report(&dir.path().join("cli/report.json"));
    assert_eq!(r["report"]["t_star"], 3);
    assert_eq!(r["report"]["final_output"], 0);
    let lines = fs::read_to_string(dir.path().join("cli/transcript.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 50);
}

#[test]
fn run_alg1_example_and_empty_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let o = limitlab(
        dir.path(),
        &[
            "run",
            "--collection",
            "finite_prefixes",
            "--target",
            "3",
            "--g",
            "lang:4",
            "--detector",
            "alg1",
            "--identifier",
            "telltale",
            "--horizon",
            "100",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = report(&dir.path().join("cli/report.json"));
    assert_eq!(r["report"]["stabilized"], true);
    assert!(r["report"]["t_star"].as_u64().unwrap() <= 4);

    let o = limitlab(
        dir.path(),
        &[
            "run",
            "--collection",
            "multiples",
            "--target",
            "5",
            "--g",
            "empty",
            "--strategy",
            "block-shuffle",
            "--seed",
            "3",
            "--horizon",
            "40",
            "--scenario-id",
            "e",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("e/transcript.jsonl")).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["verdict"], 1);
    }
}

#[test]
fn run_is_reproducible_byte_for_byte() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "run",
        "--collection",
        "finite_sets",
        "--target",
        "22",
        "--algorithm",
        "reduction",
        "--strategy",
        "repeat-heavy",
        "--seed",
        "11",
        "--repeat-prob",
        "2/3",
        "--horizon",
        "120",
    ];
    assert_eq!(limitlab(a.path(), &args).status.code(), Some(0));
    assert_eq!(limitlab(b.path(), &args).status.code(), Some(0));
    for f in ["cli/transcript.jsonl", "cli/report.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn run_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    fs::write(
        &cfg,
        "scenario_id = \"from-file\"\ncollection = \"multiples\"\ntarget_index = 2\ncandidate = \"lang:4\"\nhorizon = 20\n[adversary]\nstrategy = \"canonical\"\n[algorithm]\nname = \"negex\"\n",
    )
    .unwrap();
    let o = limitlab(dir.path(), &["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("from-file/report.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = limitlab(
        dir.path(),
        &[
            "run",
            "--collection",
            "multiples",
            "--target",
            "2",
            "--horizon",
            "0",
        ],
    );
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("\"field\":\"horizon\""));
    assert_eq!(
        limitlab(dir.path(), &["run", "--nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        limitlab(
            dir.path(),
            &["run", "--collection", "primes", "--target", "2"]
        )
        .status
        .code(),
        Some(2)
    );
    let inapp = limitlab(
        dir.path(),
        &[
            "run",
            "--collection",
            "finite_plus_all",
            "--target",
            "2",
            "--horizon",
            "5",
        ],
    );
    assert_eq!(inapp.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&inapp.stderr).contains("inapplicable"));
}

#[test]
fn roundtrip_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = limitlab(
        dir.path(),
        &[
            "roundtrip",
            "--collection",
            "finite_prefixes",
            "--target",
            "2",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = report(&dir.path().join("roundtrip/roundtrip.json"));
    assert_eq!(r["identifiers_end_on_target"], true);
    assert_eq!(r["legs"][2]["report"]["final_output"], 2);
    assert!(r["legs"]
        .as_array()
        .unwrap()
        .iter()
        .all(|l| l["report"]["stabilized"] == true));

    let o = limitlab(
        dir.path(),
        &[
            "roundtrip",
            "--collection",
            "multiples",
            "--target",
            "6",
            "--scenario-id",
            "six",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = report(&dir.path().join("six/roundtrip.json"));
    assert_eq!(r["legs"][0]["report"]["final_output"], 6);

    let o = limitlab(
        dir.path(),
        &[
            "roundtrip",
            "--collection",
            "finite_plus_all",
            "--target",
            "2",
        ],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("inapplicable"));
}

#[test]
fn check_angluin_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = limitlab(
        dir.path(),
        &[
            "check-angluin",
            "--collection",
            "finite_plus_all",
            "--index",
            "1",
            "--telltale",
            "1,2,3",
            "--bounds",
            "64,64",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("violation_certified"));
    let cert = report(&dir.path().join("angluin-finite_plus_all-1.json"));
    assert_eq!(cert["verdict"], "violation_certified");

    let o = limitlab(
        dir.path(),
        &[
            "check-angluin",
            "--collection",
            "finite_prefixes",
            "--index",
            "5",
        ],
    );
    assert!(stdout(&o).contains("satisfied_exactly"));

    let o = limitlab(
        dir.path(),
        &[
            "check-angluin",
            "--collection",
            "finite_plus_all",
            "--index",
            "1",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_writes_a_sorted_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = limitlab(
        dir.path(),
        &["sweep", "--algorithm", "negex", "--horizon", "60"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let ids: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert_eq!(ids.len(), 960);
}

#[test]
fn catalog_lists_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let o = limitlab(dir.path(), &["catalog"]);
    let text = stdout(&o);
    for id in [
        "multiples",
        "finite_prefixes",
        "finite_sets",
        "finite_plus_all",
    ] {
        assert!(text.contains(id));
    }
}
