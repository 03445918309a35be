use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use sol2eb::eb::*;
use sol2eb::ebtext::{parse_expr, parse_pred, parse_project};

const GOLDEN_C: &str = include_str!("../corpus/golden/Gift_1_ETH_c.eb");
const GOLDEN_M1: &str = include_str!("../corpus/golden/Gift_1_ETH_m1.eb");

fn gift(m1: &str) -> Project {
    parse_project("Gift_1_ETH", &[("c.eb".into(), GOLDEN_C.into()), ("m1.eb".into(), m1.into())]).unwrap()
}

fn addr(i: u32) -> Value {
    Value::Atom(Atom::new("ADDRESS", i))
}

fn int(n: i128) -> Value {
    Value::Int(n)
}

fn val(pairs: &[(&str, Value)]) -> Valuation {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

#[test]
fn golden_project_typechecks() {
    let typed = typecheck(&gift(GOLDEN_M1)).unwrap();
    let m = typed.machine("Gift_1_ETH_m1").unwrap();
    let vars = typed.variable_types(m);
    let address = Type::Carrier("ADDRESS".into());
    assert_eq!(vars["passHasBeenSet"], Type::Bool);
    assert_eq!(vars["hashPass"], Type::Int);
    assert_eq!(vars["address_tem"], Type::pow(address.clone()));
    assert_eq!(vars["balanceof"], Type::map(address.clone(), Type::Int));
    let consts = typed.constant_types(m);
    assert_eq!(consts["this"], address.clone());
    assert_eq!(consts["TRANSFER_VALUE"], Type::Int);
    let params = typed.param_types(m, "SetPass");
    assert_eq!(params["msg_sender"], address);
    assert_eq!(params["msg_value"], Type::Int);
}

#[test]
fn assigning_an_integer_to_a_boolean_is_rejected() {
    let m1 = GOLDEN_M1.replacen("passHasBeenSet ≔ FALSE", "passHasBeenSet ≔ 3", 1);
    assert_ne!(m1, GOLDEN_M1);
    let err = typecheck(&gift(&m1)).unwrap_err();
    assert!(matches!(err, TypeError::Mismatch { .. }), "{err}");
}

#[test]
fn unknown_identifier_is_rejected() {
    let m1 = GOLDEN_M1.replacen("hashPass ≔ password", "hashPass ≔ nonexistent", 1);
    assert_ne!(m1, GOLDEN_M1);
    assert!(matches!(typecheck(&gift(&m1)), Err(TypeError::Unbound { ref name, .. }) if name == "nonexistent"));
}

fn gift_state() -> (Project, Valuation, Bounds) {
    let project = gift(GOLDEN_M1);
    let bounds = Bounds::default();
    let mut s = val(&[
        ("this", addr(0)),
        ("password", int(0)),
        ("initial_balance", int(1)),
        ("TRANSFER_VALUE", int(1)),
        ("passHasBeenSet", Value::Bool(false)),
        ("hashPass", int(0)),
        ("address_tem", Value::Set([addr(0), addr(1)].into())),
        ("balanceof", Value::map([(addr(0), int(1)), (addr(1), int(3))])),
    ]);
    s.bind_carriers(&project.contexts[0].sets, &bounds);
    (project, s, bounds)
}

#[test]
fn set_pass_moves_the_deposit() {
    let (project, s, bounds) = gift_state();
    let ev = project.machines[0].event("SetPass").unwrap();
    let params = val(&[("hash", int(2)), ("msg_sender", addr(1)), ("msg_value", int(1))]);
    let post = apply_event(ev, &s, &params, &bounds).unwrap();
    assert_eq!(post.get("hashPass"), Some(&int(2)));
    assert_eq!(post.get("balanceof"), Some(&Value::map([(addr(0), int(2)), (addr(1), int(2))])));
    assert_eq!(post.get("passHasBeenSet"), Some(&Value::Bool(false)));
}

#[test]
fn set_pass_with_zero_value_fails_its_positivity_guard() {
    let (project, s, bounds) = gift_state();
    let ev = project.machines[0].event("SetPass").unwrap();
    let params = val(&[("hash", int(2)), ("msg_sender", addr(1)), ("msg_value", int(0))]);
    assert_eq!(apply_event(ev, &s, &params, &bounds), Err(EventError::GuardFailed("grd3".into())));
}

#[test]
fn actions_read_the_pre_state() {
    let mut ev = Event::new("swap");
    ev.actions = vec![Action::new("act1", "x", Expr::name("y")), Action::new("act2", "y", Expr::name("x"))];
    let s = val(&[("x", int(1)), ("y", int(2))]);
    let post = apply_event(&ev, &s, &Valuation::new(), &Bounds::default()).unwrap();
    assert_eq!(post, val(&[("x", int(2)), ("y", int(1))]));
}

#[test]
fn division_by_zero_in_an_action_is_an_event_error() {
    let mut ev = Event::new("div");
    ev.actions = vec![Action::new("act1", "x", parse_expr("x ÷ y").unwrap())];
    let s = val(&[("x", int(1)), ("y", int(0))]);
    let err = apply_event(&ev, &s, &Valuation::new(), &Bounds::default()).unwrap_err();
    assert!(
        matches!(err, EventError::Wd { ref label, failure: WdFailure { kind: WdKind::DivisionByZero, .. } } if label == "act1")
    );
}

#[test]
fn partial_function_enumeration_size() {
    let b = Bounds::new(2, 0, 3).unwrap();
    let ty = Type::map(Type::Carrier("ADDRESS".into()), Type::Int);
    let all = enumerate(&ty, &b).unwrap();
    assert_eq!(all.len(), 5usize.pow(2));
    assert!(all.iter().all(Value::is_function));
    assert_eq!(all.iter().collect::<BTreeSet<_>>().len(), all.len());
}

#[test]
fn quantifier_over_a_carrier_set() {
    let p = parse_pred("∀a·a ∈ ADDRESS ⇒ a ∈ dom(f)").unwrap();
    let project = Project {
        name: "P".into(),
        contexts: vec![Context {
            name: "C".into(),
            sets: vec!["ADDRESS".into()],
            constants: vec!["f".into()],
            axioms: vec![
                LabeledPred::new("axm1", Pred::member(Expr::name("f"), Expr::total_fn(Expr::name("ADDRESS"), Expr::Integers))),
                LabeledPred::new("axm2", p),
            ],
        }],
        machines: vec![],
    };
    let typed = typecheck(&project).unwrap();
    let p = &typed.project.contexts[0].axioms[1].pred;
    let b = Bounds::new(2, 0, 1).unwrap();
    let mut env = val(&[("f", Value::map([(addr(0), int(0))]))]);
    env.bind_carriers(&["ADDRESS".to_string()], &b);
    assert_eq!(eval_pred(p, &env, &b), Ok(false));
    env.insert("f", Value::map([(addr(0), int(0)), (addr(1), int(1))]));
    assert_eq!(eval_pred(p, &env, &b), Ok(true));
}

#[derive(Debug, Clone)]
enum B {
    Var(usize),
    Const(bool),
    Not(Box<B>),
    And(Box<B>, Box<B>),
    Or(Box<B>, Box<B>),
    Implies(Box<B>, Box<B>),
}

fn arb_b() -> impl Strategy<Value = B> {
    let leaf = prop_oneof![(0usize..3).prop_map(B::Var), any::<bool>().prop_map(B::Const)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| B::Not(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| B::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| B::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| B::Implies(Box::new(a), Box::new(b))),
        ]
    })
}

const BVARS: [&str; 3] = ["p", "q", "r"];

fn to_pred(b: &B) -> Pred {
    match b {
        B::Var(i) => Pred::eq(Expr::name(BVARS[*i]), Expr::Bool(true)),
        B::Const(true) => Pred::True,
        B::Const(false) => Pred::False,
        B::Not(a) => Pred::negate(to_pred(a)),
        B::And(a, c) => Pred::and(to_pred(a), to_pred(c)),
        B::Or(a, c) => Pred::or(to_pred(a), to_pred(c)),
        B::Implies(a, c) => Pred::implies(to_pred(a), to_pred(c)),
    }
}

fn truth(b: &B, row: [bool; 3]) -> bool {
    match b {
        B::Var(i) => row[*i],
        B::Const(c) => *c,
        B::Not(a) => !truth(a, row),
        B::And(a, c) => truth(a, row) && truth(c, row),
        B::Or(a, c) => truth(a, row) || truth(c, row),
        B::Implies(a, c) => !truth(a, row) || truth(c, row),
    }
}

#[derive(Debug, Clone)]
enum A {
    Lit(i128),
    Var(usize),
    Op(ArithOp, Box<A>, Box<A>),
}

const IVARS: [&str; 2] = ["m", "n"];

fn arb_a() -> impl Strategy<Value = A> {
    let leaf = prop_oneof![(-20i128..20).prop_map(A::Lit), (0usize..2).prop_map(A::Var)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (prop::sample::select(vec![ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div]), inner.clone(), inner)
            .prop_map(|(op, a, b)| A::Op(op, Box::new(a), Box::new(b)))
    })
}

fn to_expr(a: &A) -> Expr {
    match a {
        A::Lit(n) => Expr::Int(*n),
        A::Var(i) => Expr::name(IVARS[*i]),
        A::Op(op, x, y) => Expr::arith(*op, to_expr(x), to_expr(y)),
    }
}

/// `None` on division by zero.
fn arith(a: &A, env: [i128; 2]) -> Option<i128> {
    Some(match a {
        A::Lit(n) => *n,
        A::Var(i) => env[*i],
        A::Op(op, x, y) => {
            let (x, y) = (arith(x, env)?, arith(y, env)?);
            match op {
                ArithOp::Add => x + y,
                ArithOp::Sub => x - y,
                ArithOp::Mul => x * y,
                ArithOp::Div => {
                    if y == 0 {
                        return None;
                    }
                    let q = x / y;
                    if (x % y != 0) && ((x < 0) != (y < 0)) {
                        q - 1
                    } else {
                        q
                    }
                }
            }
        }
    })
}

fn arb_map() -> impl Strategy<Value = BTreeMap<u32, i128>> {
    prop::collection::btree_map(0u32..3, 0i128..5, 0..=3)
}

fn map_value(m: &BTreeMap<u32, i128>) -> Value {
    Value::map(m.iter().map(|(k, v)| (addr(*k), int(*v))))
}

proptest! {
    #[test]
    fn predicates_follow_their_truth_tables(b in arb_b()) {
        let p = to_pred(&b);
        let bounds = Bounds::default();
        for bits in 0..8u8 {
            let row = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
            let env: Valuation = BVARS.iter().zip(row).map(|(n, v)| (n.to_string(), Value::Bool(v))).collect();
            prop_assert_eq!(eval_pred(&p, &env, &bounds), Ok(truth(&b, row)));
        }
    }

    #[test]
    fn arithmetic_matches_floor_semantics(a in arb_a(), m in -10i128..10, n in -10i128..10) {
        let env = val(&[("m", int(m)), ("n", int(n))]);
        let got = eval_expr(&to_expr(&a), &env, &Bounds::default());
        match arith(&a, [m, n]) {
            Some(v) => prop_assert_eq!(got, Ok(int(v))),
            None => prop_assert!(matches!(got, Err(ref e) if e.is_wd())),
        }
    }

    #[test]
    fn override_agrees_with_map_insertion(f in arb_map(), g in arb_map(), x in 0u32..3) {
        let mut env = val(&[("f", map_value(&f)), ("g", map_value(&g)), ("x", addr(x))]);
        env.bind_carriers(&["ADDRESS".to_string()], &Bounds::default());
        let mut expected = f.clone();
        expected.extend(g.iter().map(|(k, v)| (*k, *v)));
        let ov = Expr::set_op(SetOp::Override, Expr::name("f"), Expr::name("g"));
        let b = Bounds::default();
        prop_assert_eq!(eval_expr(&ov, &env, &b), Ok(map_value(&expected)));
        let dom = eval_expr(&Expr::Dom(Box::new(ov.clone())), &env, &b).unwrap();
        let expected_dom: BTreeSet<Value> = f.keys().chain(g.keys()).map(|k| addr(*k)).collect();
        prop_assert_eq!(dom, Value::Set(expected_dom));
        let applied = eval_expr(&Expr::apply(ov, Expr::name("x")), &env, &b);
        match expected.get(&x) {
            Some(v) => prop_assert_eq!(applied, Ok(int(*v))),
            None => prop_assert!(matches!(applied, Err(ref e) if e.is_wd())),
        }
    }

    #[test]
    fn values_survive_json(f in arb_map()) {
        let ty = Type::map(Type::Carrier("ADDRESS".into()), Type::Int);
        let v = map_value(&f);
        prop_assert_eq!(Value::from_json(&v.to_json(), &ty, &Bounds::default()), Ok(v));
    }
}
