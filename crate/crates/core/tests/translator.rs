use std::collections::BTreeSet;

use sol2eb::eb::*;
use sol2eb::ebtext::{parse_expr, parse_pred, print_project};
use sol2eb::project::translate_source;
use sol2eb::sol::{parse_contract, validate_contract};
use sol2eb::translate::{translate, TranslationReport};

mod support;

const GIFT: &str = include_str!("../corpus/Gift_1_ETH.sol");
const GOLDEN_C: &str = include_str!("../corpus/golden/Gift_1_ETH_c.eb");
const GOLDEN_M1: &str = include_str!("../corpus/golden/Gift_1_ETH_m1.eb");

fn tr(src: &str) -> (Project, TranslationReport) {
    translate(&validate_contract(parse_contract(src).unwrap()).unwrap()).unwrap()
}

fn labelled(items: &[(&str, &str)]) -> Vec<LabeledPred> {
    items.iter().map(|(l, t)| LabeledPred::new(*l, parse_pred(t).unwrap())).collect()
}

#[test]
fn printed_translation_matches_golden_files() {
    let (project, _) = tr(GIFT);
    let files = print_project(&project);
    let names: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(names, ["Gift_1_ETH_c.eb", "Gift_1_ETH_m1.eb"]);
    assert_eq!(files[0].1, GOLDEN_C);
    assert_eq!(files[1].1, GOLDEN_M1);
}

#[test]
fn context_structure() {
    let (project, _) = tr(GIFT);
    let [ctx] = &project.contexts[..] else { panic!() };
    assert_eq!(ctx.sets, ["ADDRESS"]);
    let consts: BTreeSet<&str> = ctx.constants.iter().map(String::as_str).collect();
    assert_eq!(consts, BTreeSet::from(["this", "password", "initial_balance", "TRANSFER_VALUE"]));
    let expected = labelled(&[
        ("axm1", "this ∈ ADDRESS"),
        ("axm2", "password ∈ ℤ"),
        ("axm3", "initial_balance ∈ ℕ1"),
        ("axm4", "TRANSFER_VALUE ∈ ℕ1"),
    ]);
    assert_eq!(ctx.axioms, expected);
}

#[test]
fn set_pass_structure() {
    let (project, _) = tr(GIFT);
    let e = project.machines[0].event("SetPass").unwrap();
    assert_eq!(e.params, ["hash", "msg_sender", "msg_value"]);
    let guards = labelled(&[
        ("grd1", "hash ∈ ℤ"),
        ("grd2", "msg_sender ∈ address_tem \\ {this}"),
        ("grd3", "msg_value ∈ ℕ1"),
        ("grd4", "msg_value ≤ balanceof(msg_sender)"),
        ("grd5", "msg_value ≥ TRANSFER_VALUE"),
    ]);
    assert_eq!(e.guards, guards);
    let act1 = parse_expr("{TRUE ↦ hash, FALSE ↦ hashPass}(bool(passHasBeenSet = FALSE ∧ msg_value ≥ TRANSFER_VALUE))").unwrap();
    let act2 =
        parse_expr("balanceof <+ {this ↦ balanceof(this) + msg_value, msg_sender ↦ balanceof(msg_sender) - msg_value}").unwrap();
    assert_eq!(e.actions, [Action::new("act1", "hashPass", act1), Action::new("act2", "balanceof", act2)]);
}

#[test]
fn machine_structure() {
    let (project, _) = tr(GIFT);
    let m = &project.machines[0];
    assert_eq!((m.name.as_str(), m.sees.as_str(), m.refines.as_deref()), ("Gift_1_ETH_m1", "Gift_1_ETH_c", None));
    assert_eq!(m.variables, ["passHasBeenSet", "hashPass", "address_tem", "balanceof"]);
    let events: Vec<&str> = m.events.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(events, ["INITIALISATION", "NewAccount", "SetPass", "GetGift", "PassHasBeenSet"]);
    let invariants = labelled(&[
        ("inv1", "passHasBeenSet ∈ BOOL"),
        ("inv2", "hashPass ∈ ℤ"),
        ("inv3", "address_tem ⊆ ADDRESS"),
        ("inv4", "balanceof ∈ address_tem → ℕ"),
        ("inv5", "this ∈ address_tem"),
    ]);
    assert_eq!(m.invariants, invariants);
    let get_gift = m.event("GetGift").unwrap();
    assert_eq!(get_gift.params, ["pass", "msg_sender"]);
    assert!(get_gift.guards.iter().all(|g| !g.pred.free_names().contains("msg_value")));
}

#[test]
fn translation_typechecks() {
    let (project, _) = tr(GIFT);
    typecheck(&project).unwrap();
}

#[test]
fn single_boolean_contract() {
    let (project, _) = tr("contract Flag { bool x; }");
    let m = &project.machines[0];
    assert_eq!(m.variables, ["x", "address_tem", "balanceof"]);
    let events: Vec<&str> = m.events.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(events, ["INITIALISATION", "NewAccount"]);
    assert_eq!(m.events[0].action_for("x").map(|a| &a.expr), Some(&Expr::Bool(false)));
    typecheck(&project).unwrap();
}

#[test]
fn integer_defaults_to_zero() {
    let (project, _) = tr("contract C { uint x; function f() { x = x + 1; } }");
    let init = &project.machines[0].events[0];
    assert_eq!(init.action_for("x").map(|a| &a.expr), Some(&Expr::Int(0)));
    let f = project.machines[0].event("f").unwrap();
    assert_eq!(f.action_for("x").map(|a| &a.expr), Some(&parse_expr("x + 1").unwrap()));
}

#[test]
fn report_records_skipped_constructs_and_labels() {
    let (_, report) = tr(GIFT);
    assert_eq!(report.contract, "Gift_1_ETH");
    let skipped: Vec<&str> = report.skipped_constructs.iter().map(|s| s.reason.as_str()).collect();
    assert!(skipped.iter().any(|r| r.contains("GetHash")), "{skipped:?}");
    assert!(skipped.iter().any(|r| r.contains("fallback")), "{skipped:?}");
    assert!(skipped.iter().any(|r| r.contains("return")), "{skipped:?}");
    let span = report.span_for_po("SetPass/act2/WD").unwrap();
    let set_pass_line = GIFT.lines().position(|l| l.contains("function SetPass")).unwrap() as u32 + 1;
    assert!(span.line >= set_pass_line, "{span:?}");
    assert!(report.span_for_po("GetGift/grd2/WD").is_some());
}

#[test]
fn translate_source_names_the_file() {
    let loaded = translate_source("Gift_1_ETH.sol", GIFT).unwrap();
    assert_eq!(loaded.report.unwrap().source.as_deref(), Some("Gift_1_ETH.sol"));
    assert_eq!(loaded.project.name, "Gift_1_ETH");
}

#[test]
fn translation_is_deterministic() {
    assert_eq!(print_project(&tr(GIFT).0), print_project(&tr(GIFT).0));
    assert_eq!(serde_json::to_string(&tr(GIFT).1).unwrap(), serde_json::to_string(&tr(GIFT).1).unwrap());
}

#[test]
fn payable_and_transfer_events_conserve_total_balance() {
    let counts = support::check_conservation(&Bounds::new(2, 0, 3).unwrap()).unwrap();
    assert_eq!(counts.iter().map(|c| c.0).collect::<Vec<_>>(), ["SetPass", "GetGift"]);
}
