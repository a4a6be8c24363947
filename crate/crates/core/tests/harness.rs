mod common;

use common::{member, subset_upto, t_star};
use limitlab::adversary::Strategy;
use limitlab::harness::{
    check_angluin, run_game, run_sweep, write_csv, AlgorithmSpec, AngluinVerdict, CandidateField,
    CandidateRole, CheckBounds, GameScenario, GridSpec, GroundTruth,
};
use limitlab::identify::IdentifierKind;
use limitlab::lang::{Catalog, Element};
use limitlab::LabError;

fn scenario(
    collection: &str,
    k: u64,
    g: Option<&str>,
    algorithm: AlgorithmSpec,
    horizon: u64,
) -> GameScenario {
    GameScenario {
        scenario_id: format!("{collection}-{k}"),
        collection: collection.into(),
        target_index: k,
        candidate: g.map(|g| CandidateField::Text(g.into())),
        adversary: Strategy::Canonical,
        algorithm,
        horizon,
    }
}

#[test]
fn scenario_examples() {
    let catalog = Catalog::standard();
    let out = run_game(
        &scenario("multiples", 2, Some("lang:4"), AlgorithmSpec::Negex, 50),
        &catalog,
    )
    .unwrap();
    assert!(out.report.stabilized);
    assert_eq!((out.report.t_star, out.report.final_output), (Some(1), 1));

    let out = run_game(
        &scenario("multiples", 2, Some("lang:3"), AlgorithmSpec::Negex, 50),
        &catalog,
    )
    .unwrap();
    assert!(out.report.stabilized);
    assert_eq!((out.report.t_star, out.report.final_output), (Some(3), 0));
    assert_eq!(
        out.transcript.negex_witness,
        Some((Element::new(3).unwrap(), 3))
    );
    let bits: Vec<u64> = out.transcript.outputs().into_iter().take(5).collect();
    assert_eq!(bits, vec![1, 1, 0, 0, 0]);

    let cm = AlgorithmSpec::Identifier {
        identifier: IdentifierKind::ConsistencyMin,
    };
    let out = run_game(&scenario("multiples", 2, None, cm, 100), &catalog).unwrap();
    assert!(!out.report.correct_at_horizon);
    assert_eq!(out.report.final_output, 1);
}

#[test]
fn horizon_zero_and_inapplicable_runs_are_errors() {
    let catalog = Catalog::standard();
    let s = scenario("multiples", 2, Some("lang:3"), AlgorithmSpec::Negex, 0);
    assert!(matches!(
        run_game(&s, &catalog),
        Err(LabError::Config { .. })
    ));
    let tt = AlgorithmSpec::Identifier {
        identifier: IdentifierKind::Telltale,
    };
    let s = scenario("finite_plus_all", 3, None, tt, 10);
    assert!(matches!(
        run_game(&s, &catalog),
        Err(LabError::Inapplicable(_))
    ));
}

#[test]
fn ground_truth_matches_brute_force() {
    let catalog = Catalog::standard();
    let spec = GridSpec::standard(AlgorithmSpec::Negex, 5);
    for s in spec.scenarios(&catalog).unwrap() {
        let resolved = s.resolve(&catalog).unwrap();
        let g = resolved.candidate.clone().unwrap();
        let brute = (1..=200)
            .map(|x| Element::new(x).unwrap())
            .find(|&x| g.contains(x) && !member(&s.collection, s.target_index, x.value()));
        match GroundTruth::of(&resolved).unwrap() {
            GroundTruth::Detection {
                g_subset_of_k,
                least_witness,
            } => {
                assert_eq!(least_witness, brute, "{}", s.scenario_id);
                assert_eq!(g_subset_of_k, brute.is_none(), "{}", s.scenario_id);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

#[test]
fn reports_agree_with_reference_t_star() {
    let catalog = Catalog::standard();
    let mut spec = GridSpec::standard(
        AlgorithmSpec::Alg1 {
            identifier: IdentifierKind::Telltale,
        },
        120,
    );
    spec.collections = vec![
        "multiples".into(),
        "finite_prefixes".into(),
        "finite_sets".into(),
    ];
    spec.max_target = 4;
    for s in spec.scenarios(&catalog).unwrap() {
        let out = run_game(&s, &catalog).unwrap();
        let GroundTruth::Detection { g_subset_of_k, .. } = out.ground_truth else {
            unreachable!()
        };
        let expected = u64::from(g_subset_of_k);
        let outputs = out.transcript.outputs();
        assert_eq!(
            out.report.t_star,
            t_star(&outputs, |o| o == expected),
            "{}",
            s.scenario_id
        );
        assert_eq!(out.report.final_output, *outputs.last().unwrap());
    }
}

#[test]
fn standard_grid_cardinality() {
    let spec = GridSpec::standard(AlgorithmSpec::Negex, 10);
    let n = spec.scenarios(&Catalog::standard()).unwrap().len();
    assert_eq!(
        n,
        spec.collections.len()
            * spec.max_target as usize
            * spec.roles.len()
            * spec.strategies.len()
    );
    assert_eq!(CandidateRole::ALL.len(), 6);
}

#[test]
fn negex_grid_is_correct_everywhere_and_sweeps_are_byte_identical() {
    let catalog = Catalog::standard();
    let scenarios = GridSpec::standard(AlgorithmSpec::Negex, 200)
        .scenarios(&catalog)
        .unwrap();
    let rows = run_sweep(&scenarios, &catalog).unwrap();
    assert!(rows.iter().all(|r| r.is_ok() && r.correct_at_horizon));
    let again = run_sweep(&scenarios, &catalog).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_csv(&rows, &mut a).unwrap();
    write_csv(&again, &mut b).unwrap();
    assert_eq!(a, b);
    assert!(a.ends_with(b"\n"));
}

#[test]
fn transcript_rows_carry_the_required_fields() {
    let out = run_game(
        &scenario("multiples", 2, Some("lang:3"), AlgorithmSpec::Negex, 5),
        &Catalog::standard(),
    )
    .unwrap();
    let first = out
        .transcript
        .to_jsonl()
        .lines()
        .next()
        .unwrap()
        .to_string();
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    for key in [
        "t",
        "w",
        "y",
        "verdict",
        "fresh_candidate_queries",
        "fresh_collection_queries_by_purpose",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn angluin_prefix_closed_form_against_brute_force() {
    let c = Catalog::standard().get("finite_prefixes").unwrap();
    for i in 1..=32 {
        // no L_j ⊇ {i} is strictly inside L_i
        let violated = (1..=64).any(|j| {
            member("finite_prefixes", j, i)
                && subset_upto("finite_prefixes", j, i, 64)
                && !subset_upto("finite_prefixes", i, j, 64)
        });
        assert!(!violated);
        let r = check_angluin(&c, i, None, CheckBounds::default()).unwrap();
        assert_eq!(r.verdict_name(), "satisfied_exactly", "i={i}");
    }
}

#[test]
fn angluin_verdicts_agree_with_brute_force_on_coded_sets() {
    let c = Catalog::standard().get("finite_sets").unwrap();
    for i in 1..=63u64 {
        let li: Vec<u64> = (1..=6).filter(|&x| member("finite_sets", i, x)).collect();
        for mask in 0..(1u64 << li.len()) {
            let t: Vec<u64> = li
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &x)| x)
                .collect();
            let violated = (1..=63u64).any(|j| {
                j != i
                    && t.iter().all(|&x| member("finite_sets", j, x))
                    && subset_upto("finite_sets", j, i, 64)
            });
            let r = check_angluin(&c, i, Some(&t), CheckBounds::default()).unwrap();
            match &r.verdict {
                AngluinVerdict::ViolationCertified(cert) => {
                    assert!(violated && cert.replay(&c), "i={i} t={t:?}");
                }
                AngluinVerdict::SatisfiedExactly { .. } => assert!(!violated, "i={i} t={t:?}"),
                AngluinVerdict::InconclusiveWithinBounds => panic!("i={i} t={t:?} inconclusive"),
            }
        }
    }
}
