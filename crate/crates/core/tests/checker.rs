use proptest::prelude::*;
use serde_json::Value as Json;
use sol2eb::checker::*;
use sol2eb::eb::*;
use sol2eb::ebtext::{parse_pred, parse_project, print_project};
use sol2eb::po::{gen_project_pos, PoKind, ProofObligation};
use sol2eb::project::translate_source;
use sol2eb::translate::TranslationReport;

mod support;
use support::{project_with_invariant, small_bounds, violations_replay, EXTRA_INVARIANTS};

const GIFT: &str = include_str!("../corpus/Gift_1_ETH.sol");
const M2: &str = include_str!("../corpus/refinement/Gift_1_ETH_m2.eb");

fn with_refinement() -> (Project, TranslationReport) {
    let loaded = translate_source("Gift_1_ETH.sol", GIFT).unwrap();
    let mut files = print_project(&loaded.project);
    files.push(("Gift_1_ETH_m2.eb".into(), M2.into()));
    (parse_project("Gift_1_ETH", &files).unwrap(), loaded.report.unwrap())
}

fn bare_po(goal: &str, names: &[(&str, Type)]) -> ProofObligation {
    ProofObligation {
        name: "E/x/INV".into(),
        kind: PoKind::Inv,
        machine: "M".into(),
        event: "E".into(),
        label: "x".into(),
        hypotheses: vec![],
        goal: parse_pred(goal).unwrap(),
        free_names: names.iter().map(|(n, t)| (n.to_string(), t.clone())).collect(),
        sets: vec![],
        trivial: false,
    }
}

#[test]
fn abstract_machine_is_discharged_within_default_bounds() {
    let loaded = translate_source("Gift_1_ETH.sol", GIFT).unwrap();
    let report = check_all(&loaded.project, &CheckOptions::default(), loaded.report.as_ref()).unwrap();
    assert_eq!(report.pos.len(), 11);
    for p in &report.pos {
        assert_eq!(p.status, "discharged", "{} {:?}", p.name, p.detail);
        assert!(p.cases > 0, "{}", p.name);
        assert!(p.counterexample.is_none() && p.source_span.is_none());
    }
}

#[test]
fn refinement_exposes_exactly_one_violation() {
    let (project, tr) = with_refinement();
    let report = check_all(&project, &CheckOptions::default(), Some(&tr)).unwrap();
    assert_eq!(report.pos.len(), 13);
    let violated: Vec<&PoResult> = report.violated().collect();
    assert_eq!(violated.len(), 1);
    let v = violated[0];
    assert_eq!((v.machine.as_str(), v.name.as_str()), ("Gift_1_ETH_m2", "SetPass/act2/SIM"));
    assert_eq!(report.unsupported().count(), 0);

    let cex = v.counterexample.as_ref().unwrap();
    assert_eq!(cex["passHasBeenSet"], Json::Bool(true));
    assert!(cex["msg_value"].as_i64().unwrap() >= 1);

    let span = v.source_span.as_ref().unwrap();
    assert_eq!(span.file, "Gift_1_ETH.sol");
    let set_pass_line = GIFT.lines().position(|l| l.contains("function SetPass")).unwrap() as u32 + 1;
    let get_gift_line = GIFT.lines().position(|l| l.contains("function GetGift")).unwrap() as u32 + 1;
    assert!((set_pass_line..get_gift_line).contains(&span.line), "{span:?}");
}

#[test]
fn reported_counterexample_replays() {
    let (project, _) = with_refinement();
    let tp = typecheck(&project).unwrap();
    let pos = gen_project_pos(&tp).unwrap();
    let po = pos.iter().find(|p| p.machine == "Gift_1_ETH_m2" && p.name == "SetPass/act2/SIM").unwrap();
    let bounds = Bounds::default();
    let verdict = check_po(po, &bounds, DEFAULT_BUDGET);
    let cex = verdict.counterexample().expect("violated");
    assert_eq!(replay(po, cex, &bounds), Ok(()));
    assert_eq!(cex.get("passHasBeenSet"), Some(&Value::Bool(true)));
    let balance = |who: &str| {
        let f = cex.get("balanceof").unwrap();
        let key = cex.get(who).unwrap();
        f.images(key).next().unwrap().as_int().unwrap()
    };
    assert!(balance("msg_sender") >= cex.get("msg_value").unwrap().as_int().unwrap());
}

#[test]
fn constant_goal_is_one_case() {
    let v = check_po(&bare_po("0 = 0", &[]), &Bounds::default(), DEFAULT_BUDGET);
    assert_eq!(v.status, Status::DischargedWithinBounds);
    assert_eq!(v.enumerated_cases, 1);
    let v = check_po(&bare_po("0 = 1", &[]), &Bounds::default(), DEFAULT_BUDGET);
    assert!(v.is_violated());
}

#[test]
fn enumeration_counts_every_case() {
    let b = Bounds::new(3, 0, 4).unwrap();
    let v = check_po(&bare_po("x ≤ 4 ∧ y ≥ 0", &[("x", Type::Int), ("y", Type::Int)]), &b, DEFAULT_BUDGET);
    assert_eq!(v.status, Status::DischargedWithinBounds);
    assert_eq!(v.enumerated_cases, 25);
}

#[test]
fn exhausted_budget_is_unsupported() {
    let loaded = translate_source("Gift_1_ETH.sol", GIFT).unwrap();
    let tp = typecheck(&loaded.project).unwrap();
    let pos = gen_project_pos(&tp).unwrap();
    let po = pos.iter().find(|p| p.name == "SetPass/inv4/INV").unwrap();
    let v = check_po(po, &Bounds::default(), 10);
    assert_eq!(v.status, Status::Unsupported(Unsupported::BudgetExceeded { budget: 10 }));

    let opts = CheckOptions { budget: 10, ..CheckOptions::default() };
    let report = check_all(&loaded.project, &opts, None).unwrap();
    assert!(report.unsupported().count() > 0);
    assert!(report.unsupported().all(|p| p.detail.as_deref().is_some_and(|d| d.contains("budget"))));
}

#[test]
fn well_definedness_violation_is_detected() {
    let c = "context C\nconstants k\naxioms\n    @axm1 k ∈ ℤ\nend\n";
    let m = "machine M sees C variables x invariants @inv1 x ∈ ℤ events event INITIALISATION then @act1 x ≔ 0 end \
             event Div any d where @grd1 d ∈ ℤ then @act1 x ≔ x ÷ d end end";
    let project = parse_project("P", &[("c.eb".into(), c.into()), ("m.eb".into(), m.into())]).unwrap();
    let report = check_all(&project, &CheckOptions::default(), None).unwrap();
    let wd = report.pos.iter().find(|p| p.name == "Div/act1/WD").unwrap();
    assert_eq!(wd.status, "violated");
    assert_eq!(wd.counterexample.as_ref().unwrap()["d"], Json::from(0));
}

#[test]
fn all_flag_includes_trivial_obligations() {
    let loaded = translate_source("Gift_1_ETH.sol", GIFT).unwrap();
    let opts = CheckOptions { all: true, ..CheckOptions::default() };
    let report = check_all(&loaded.project, &opts, None).unwrap();
    assert!(report.pos.len() > 11);
    assert!(report.pos.iter().any(|p| p.name == "SetPass/inv2/INV"));
    assert_eq!(report.violated().count(), 0);
}

#[test]
fn json_report_is_byte_stable() {
    let (project, tr) = with_refinement();
    let a = check_all(&project, &CheckOptions::default(), Some(&tr)).unwrap().to_json();
    let b = check_all(&project, &CheckOptions::default(), Some(&tr)).unwrap().to_json();
    assert_eq!(a, b);
}

#[test]
fn json_report_conforms_to_schema() {
    let schema: Json = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let (project, tr) = with_refinement();
    for opts in [CheckOptions::default(), CheckOptions { budget: 10, ..CheckOptions::default() }] {
        let report: Json = serde_json::from_str(&check_all(&project, &opts, Some(&tr)).unwrap().to_json()).unwrap();
        let errors: Vec<String> = validator.iter_errors(&report).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{errors:?}");
    }
    let bad = serde_json::json!({"project": "P", "bounds": {"addr": 0, "int_lo": 0, "int_hi": 1}, "pos": []});
    assert!(!validator.is_valid(&bad));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_violation_replays(idx in 0..EXTRA_INVARIANTS.len(), bounds in small_bounds()) {
        violations_replay(idx, &bounds)?;
    }

    #[test]
    fn violations_persist_in_larger_bounds(idx in 0..EXTRA_INVARIANTS.len(), small in small_bounds()) {
        let inv = EXTRA_INVARIANTS[idx];
        let large = Bounds::new(small.addr_count + 1, small.int_lo - 1, small.int_hi + 1).unwrap();
        prop_assert!(small.within(&large));
        let tp = typecheck(&project_with_invariant(inv)).unwrap();
        for po in gen_project_pos(&tp).unwrap() {
            let vs = check_po(&po, &small, DEFAULT_BUDGET);
            if vs.is_violated() {
                let vl = check_po(&po, &large, DEFAULT_BUDGET);
                prop_assert!(vl.is_violated(), "{} violated in {:?} but not in {:?}", po.name, small, large);
            }
        }
    }
}
