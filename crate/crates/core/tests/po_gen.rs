use std::collections::BTreeSet;

use proptest::prelude::*;
use sol2eb::eb::*;
use sol2eb::ebtext::{parse_pred, parse_project};
use sol2eb::po::*;

const GOLDEN_C: &str = include_str!("../corpus/golden/Gift_1_ETH_c.eb");
const GOLDEN_M1: &str = include_str!("../corpus/golden/Gift_1_ETH_m1.eb");
const M2: &str = include_str!("../corpus/refinement/Gift_1_ETH_m2.eb");

fn typed(files: &[&str]) -> TypedProject {
    let fs: Vec<(String, String)> = files.iter().enumerate().map(|(i, t)| (format!("f{i}.eb"), t.to_string())).collect();
    typecheck(&parse_project("Gift_1_ETH", &fs).unwrap()).unwrap()
}

fn reported(pos: &[ProofObligation]) -> Vec<&str> {
    pos.iter().filter(|p| !p.trivial).map(|p| p.name.as_str()).collect()
}

const ABSTRACT_POS: [&str; 11] = [
    "INITIALISATION/inv4/INV",
    "INITIALISATION/inv5/INV",
    "NewAccount/inv4/INV",
    "NewAccount/inv5/INV",
    "SetPass/grd4/WD",
    "SetPass/inv4/INV",
    "SetPass/act1/WD",
    "SetPass/act2/WD",
    "GetGift/inv4/INV",
    "GetGift/act1/WD",
    "PassHasBeenSet/act1/WD",
];

#[test]
fn abstract_machine_inventory() {
    let tp = typed(&[GOLDEN_C, GOLDEN_M1]);
    let pos = gen_project_pos(&tp).unwrap();
    assert_eq!(reported(&pos), ABSTRACT_POS);
}

#[test]
fn every_reported_po_has_a_unique_name() {
    let tp = typed(&[GOLDEN_C, GOLDEN_M1]);
    let pos = gen_project_pos(&tp).unwrap();
    let names: BTreeSet<_> = pos.iter().map(|p| (&p.machine, &p.name)).collect();
    assert_eq!(names.len(), pos.len());
}

#[test]
fn set_pass_invariant_goal_is_the_substituted_invariant() {
    let tp = typed(&[GOLDEN_C, GOLDEN_M1]);
    let pos = gen_project_pos(&tp).unwrap();
    let po = pos.iter().find(|p| p.name == "SetPass/inv4/INV").unwrap();
    assert_eq!(po.kind, PoKind::Inv);
    let expected = parse_pred(
        "balanceof <+ {this ↦ balanceof(this) + msg_value, msg_sender ↦ balanceof(msg_sender) - msg_value} ∈ address_tem → ℕ",
    )
    .unwrap();
    assert_eq!(po.goal, expected);
    for h in ["msg_value ≤ balanceof(msg_sender)", "balanceof ∈ address_tem → ℕ", "TRANSFER_VALUE ∈ ℕ1"] {
        assert!(po.hypotheses.contains(&parse_pred(h).unwrap()), "missing hypothesis {h}");
    }
}

#[test]
fn initialisation_does_not_assume_invariants() {
    let tp = typed(&[GOLDEN_C, GOLDEN_M1]);
    let pos = gen_project_pos(&tp).unwrap();
    let po = pos.iter().find(|p| p.name == "INITIALISATION/inv4/INV").unwrap();
    assert_eq!(po.goal, parse_pred("{this ↦ initial_balance} ∈ {this} → ℕ").unwrap());
    let inv4 = parse_pred("balanceof ∈ address_tem → ℕ").unwrap();
    assert!(!po.hypotheses.contains(&inv4));
}

#[test]
fn guard_wd_uses_membership_in_domain() {
    let tp = typed(&[GOLDEN_C, GOLDEN_M1]);
    let pos = gen_project_pos(&tp).unwrap();
    let po = pos.iter().find(|p| p.name == "SetPass/grd4/WD").unwrap();
    assert_eq!(po.goal, parse_pred("msg_sender ∈ dom(balanceof)").unwrap());
    let grd4 = parse_pred("msg_value ≤ balanceof(msg_sender)").unwrap();
    assert!(!po.hypotheses.contains(&grd4));
    assert!(po.hypotheses.contains(&parse_pred("msg_value ∈ ℕ1").unwrap()));
}

#[test]
fn refinement_inventory() {
    let tp = typed(&[GOLDEN_C, GOLDEN_M1, M2]);
    let pos = gen_project_pos(&tp).unwrap();
    let m2: Vec<&ProofObligation> = pos.iter().filter(|p| p.machine == "Gift_1_ETH_m2").collect();
    let all_names: BTreeSet<&str> = m2.iter().map(|p| p.name.as_str()).collect();
    for n in ["SetPass/grd5/GRD", "SetPass/act1/SIM", "SetPass/act2/SIM", "GetGift/act1/SIM", "INITIALISATION/act4/SIM"] {
        assert!(all_names.contains(n), "missing {n}");
    }
    assert!(m2.iter().all(|p| p.kind != PoKind::Wd), "concrete WD obligations repeat the abstract ones");
    let shown: Vec<&str> = m2.iter().filter(|p| !p.trivial).map(|p| p.name.as_str()).collect();
    assert_eq!(shown, ["SetPass/act1/SIM", "SetPass/act2/SIM"]);
    assert_eq!(reported(&pos).len(), 13);
}

#[test]
fn set_pass_simulation_obligation() {
    let tp = typed(&[GOLDEN_C, GOLDEN_M1, M2]);
    let pos = gen_project_pos(&tp).unwrap();
    let po = pos.iter().find(|p| p.machine == "Gift_1_ETH_m2" && p.name == "SetPass/act2/SIM").unwrap();
    assert_eq!(po.kind, PoKind::Sim);
    let expected = parse_pred(
        "balanceof = balanceof <+ {this ↦ balanceof(this) + msg_value, msg_sender ↦ balanceof(msg_sender) - msg_value}",
    )
    .unwrap();
    assert_eq!(po.goal, expected);
    for h in ["passHasBeenSet = TRUE", "msg_value ∈ ℕ1", "msg_value ≥ TRANSFER_VALUE"] {
        assert!(po.hypotheses.contains(&parse_pred(h).unwrap()), "missing hypothesis {h}");
    }
}

#[test]
fn identical_refinement_is_entirely_trivial() {
    let m2 = GOLDEN_M1
        .replacen("machine Gift_1_ETH_m1", "machine Copy\nrefines Gift_1_ETH_m1", 1)
        .replace("event NewAccount", "event NewAccount refines NewAccount")
        .replace("event SetPass", "event SetPass refines SetPass")
        .replace("event GetGift", "event GetGift refines GetGift")
        .replace("event PassHasBeenSet", "event PassHasBeenSet refines PassHasBeenSet");
    let m2: String = m2
        .lines()
        .filter(|l| !l.starts_with("invariants") && !l.trim_start().starts_with("@inv"))
        .map(|l| format!("{l}\n"))
        .collect();
    let tp = typed(&[GOLDEN_C, GOLDEN_M1, &m2]);
    let pos = gen_project_pos(&tp).unwrap();
    let copy: Vec<&ProofObligation> = pos.iter().filter(|p| p.machine == "Copy").collect();
    assert!(!copy.is_empty());
    assert!(copy.iter().all(|p| p.trivial), "{:?}", copy.iter().filter(|p| !p.trivial).map(|p| &p.name).collect::<Vec<_>>());
}

fn shape_error(m2: &str) -> RefinementShapeError {
    let tp = typed(&[GOLDEN_C, GOLDEN_M1, m2]);
    gen_project_pos(&tp).unwrap_err()
}

#[test]
fn refinement_with_different_variables_is_rejected() {
    let m2 = M2
        .replace(
            "passHasBeenSet hashPass address_tem balanceof",
            "passHasBeenSet hashPass address_tem balanceof extra\ninvariants\n    @inv1 extra ∈ ℤ",
        )
        .replace(
            "@act4 balanceof ≔ {this ↦ initial_balance}",
            "@act4 balanceof ≔ {this ↦ initial_balance}\n        @act5 extra ≔ 0",
        );
    assert!(matches!(shape_error(&m2), RefinementShapeError::VariablesDiffer { .. }));
}

#[test]
fn refinement_dropping_a_parameter_is_rejected() {
    let m2 = M2
        .replacen("any pass msg_sender", "any pass", 1)
        .replacen(
            "@grd2 msg_sender ∈ address_tem ∖ {this}\n    then\n        @act1 balanceof ≔ {TRUE",
            "@grd2 this ∈ address_tem\n    then\n        @act1 balanceof ≔ {TRUE",
            1,
        )
        .replace("{msg_sender ↦ balanceof(msg_sender) + balanceof(this), this ↦ 0}", "{this ↦ 0}");
    let err = shape_error(&m2);
    assert!(
        matches!(err, RefinementShapeError::MissingParameter { ref event, ref param } if event == "GetGift" && param == "msg_sender"),
        "{err}"
    );
}

#[test]
fn unrefined_machine_is_not_a_refinement() {
    let tp = typed(&[GOLDEN_C, GOLDEN_M1]);
    let m = &tp.project.machines[0];
    assert!(matches!(gen_refinement_pos(&tp, m, m), Err(RefinementShapeError::NotARefinement(_))));
}

#[test]
fn total_arithmetic_under_a_maximal_type_invariant_has_no_reported_pos() {
    let c = "context C\nconstants k\naxioms\n    @axm1 k ∈ ℕ\nend\n";
    let m = "machine M sees C variables x invariants @inv1 x ∈ ℤ events event INITIALISATION then @act1 x ≔ k end \
             event Inc then @act1 x ≔ x + 1 end end";
    let tp = typecheck(&parse_project("P", &[("c.eb".into(), c.into()), ("m.eb".into(), m.into())]).unwrap()).unwrap();
    let pos = gen_project_pos(&tp).unwrap();
    assert!(!pos.is_empty());
    assert!(reported(&pos).is_empty());
}

#[test]
fn division_has_a_nonzero_divisor_obligation() {
    let c = "context C\nconstants k\naxioms\n    @axm1 k ∈ ℕ\nend\n";
    let m = "machine M sees C variables x invariants @inv1 x ∈ ℤ events event INITIALISATION then @act1 x ≔ 0 end \
             event Div any d where @grd1 d ∈ ℤ then @act1 x ≔ x ÷ d end end";
    let tp = typecheck(&parse_project("P", &[("c.eb".into(), c.into()), ("m.eb".into(), m.into())]).unwrap()).unwrap();
    let pos = gen_project_pos(&tp).unwrap();
    let po = pos.iter().find(|p| p.name == "Div/act1/WD").unwrap();
    assert_eq!(po.goal, parse_pred("d ≠ 0").unwrap());
}

fn arb_goal() -> impl Strategy<Value = Pred> {
    let atom = prop::sample::select(vec![
        "msg_value ≤ balanceof(msg_sender)",
        "msg_sender ∈ address_tem",
        "this ∈ dom(balanceof)",
        "hashPass = 0",
        "passHasBeenSet = TRUE",
        "balanceof ∈ address_tem → ℕ",
        "TRANSFER_VALUE ≥ 1",
    ])
    .prop_map(|t| parse_pred(t).unwrap());
    prop::collection::vec(atom, 1..4).prop_map(Pred::conj)
}

proptest! {
    #[test]
    fn free_names_cover_exactly_the_goal_and_hypothesis_names(goal in arb_goal()) {
        let tp = typed(&[GOLDEN_C, GOLDEN_M1]);
        let pos = gen_project_pos(&tp).unwrap();
        let po = pos.iter().find(|p| p.name == "SetPass/inv4/INV").unwrap();
        for p in &pos {
            let mut used: BTreeSet<String> = p.goal.free_names();
            for h in &p.hypotheses {
                used.extend(h.free_names());
            }
            used.retain(|n| !p.sets.contains(n));
            let listed: BTreeSet<String> = p.free_names.iter().map(|(n, _)| n.clone()).collect();
            prop_assert_eq!(&listed, &used, "{}", p.name);
        }
        prop_assert!(is_trivial(std::slice::from_ref(&goal), &goal, &po.sets));
        prop_assert!(is_trivial(&po.hypotheses, &Pred::True, &po.sets));
    }
}
