//! Generators and exhaustive oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use sol2eb::checker::{check_po, replay, Status, Unsupported, DEFAULT_BUDGET};
use sol2eb::eb::*;
use sol2eb::ebtext::*;
use sol2eb::po::gen_project_pos;
use sol2eb::project::translate_source;
use sol2eb::sim::{SimError, SimSession};

pub const GIFT: &str = include_str!("../../corpus/Gift_1_ETH.sol");
pub const GOLDEN_C: &str = include_str!("../../corpus/golden/Gift_1_ETH_c.eb");
pub const GOLDEN_M1: &str = include_str!("../../corpus/golden/Gift_1_ETH_m1.eb");

pub fn gift() -> Project {
    translate_source("Gift_1_ETH.sol", GIFT).unwrap().project
}

pub fn arb_ident() -> impl Strategy<Value = String> {
    "[a-z][a-zA-Z0-9_]{0,5}".prop_filter("reserved", |s| !is_reserved(s))
}

pub fn arb_label() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,4}"
}

pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-50i128..50).prop_map(Expr::Int),
        any::<bool>().prop_map(Expr::Bool),
        arb_ident().prop_map(Expr::Name),
        Just(Expr::Integers),
        Just(Expr::Naturals),
        Just(Expr::Naturals1),
        Just(Expr::BoolSet),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (prop::sample::select(vec![ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div]), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Expr::arith(op, a, b)),
            (
                prop::sample::select(vec![SetOp::Union, SetOp::Minus, SetOp::Override, SetOp::Cartesian]),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Expr::set_op(op, a, b)),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Expr::SetLit),
            prop::collection::vec(((-5i128..5).prop_map(Expr::Int), inner.clone()), 1..3).prop_map(Expr::FunLit),
            (arb_ident(), inner.clone()).prop_map(|(f, x)| Expr::apply(Expr::name(f), x)),
            inner.clone().prop_map(|f| Expr::Dom(Box::new(f))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::total_fn(a, b)),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(t, f, c)| Expr::cond_map(t, f, c)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::bool_of(Pred::eq(a, b))),
            (inner.clone(), inner).prop_map(|(f, x)| Expr::apply(Expr::Dom(Box::new(f)), x)),
        ]
    })
}

pub fn arb_pred() -> impl Strategy<Value = Pred> {
    let cmp = prop::sample::select(vec![CmpOp::Eq, CmpOp::Ne, CmpOp::Le, CmpOp::Ge, CmpOp::Lt, CmpOp::Gt]);
    let leaf = prop_oneof![
        Just(Pred::True),
        Just(Pred::False),
        (cmp, arb_expr(), arb_expr()).prop_map(|(op, a, b)| Pred::cmp(op, a, b)),
        (arb_expr(), arb_expr()).prop_map(|(a, b)| Pred::member(a, b)),
        (arb_expr(), arb_expr()).prop_map(|(a, b)| Pred::Subset(a, b)),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Pred::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Pred::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Pred::implies(a, b)),
            inner.clone().prop_map(Pred::negate),
            (prop::collection::vec(arb_ident(), 1..3), inner.clone())
                .prop_map(|(vs, b)| Pred::Forall(vs.into_iter().map(BoundVar::new).collect(), Box::new(b))),
            (prop::collection::vec(arb_ident(), 1..3), inner)
                .prop_map(|(vs, b)| Pred::Exists(vs.into_iter().map(BoundVar::new).collect(), Box::new(b))),
        ]
    })
}

pub fn arb_labeled(prefix: &'static str) -> impl Strategy<Value = Vec<LabeledPred>> {
    prop::collection::vec(arb_pred(), 0..4)
        .prop_map(move |ps| ps.into_iter().enumerate().map(|(i, p)| LabeledPred::new(format!("{prefix}{}", i + 1), p)).collect())
}

pub fn arb_event(refinable: Vec<String>) -> impl Strategy<Value = Event> {
    let refines =
        if refinable.is_empty() { Just(None).boxed() } else { prop::option::of(prop::sample::select(refinable)).boxed() };
    (
        "[A-Z][A-Za-z0-9_]{0,6}",
        refines,
        prop::collection::vec(arb_ident(), 0..3),
        arb_labeled("grd"),
        prop::collection::vec((arb_label(), arb_ident(), arb_expr()), 0..3),
    )
        .prop_map(|(name, refines, params, guards, actions)| Event {
            name,
            refines,
            params,
            guards,
            actions: actions.into_iter().map(|(l, t, e)| Action::new(l, t, e)).collect(),
        })
}

pub fn arb_machine(name: &'static str, refines: Option<(&'static str, Vec<String>)>) -> impl Strategy<Value = Machine> {
    let refinable = refines.as_ref().map(|r| r.1.clone()).unwrap_or_default();
    let abs = refines.map(|r| r.0.to_string());
    (
        prop::collection::vec(arb_ident(), 0..4),
        arb_labeled("inv"),
        prop::collection::vec((arb_label(), arb_ident(), arb_expr()), 0..3),
        prop::collection::vec(arb_event(refinable), 0..4),
    )
        .prop_map(move |(variables, invariants, init_actions, events)| {
            let mut init = Event::new(INITIALISATION);
            init.actions = init_actions.into_iter().map(|(l, t, e)| Action::new(l, t, e)).collect();
            Machine {
                name: name.to_string(),
                refines: abs.clone(),
                sees: "Ctx".to_string(),
                variables,
                invariants,
                events: std::iter::once(init).chain(events).collect(),
            }
        })
}

pub fn arb_project() -> impl Strategy<Value = Project> {
    let ctx = (prop::collection::vec("[A-Z][A-Z0-9_]{1,5}", 0..3), prop::collection::vec(arb_ident(), 0..4), arb_labeled("axm"))
        .prop_map(|(sets, constants, axioms)| Context {
            name: "Ctx".into(),
            sets: sets.into_iter().filter(|s| !is_reserved(s)).collect(),
            constants,
            axioms,
        });
    (ctx, arb_machine("M1", None), any::<bool>())
        .prop_flat_map(|(ctx, m1, refine)| {
            let names: Vec<String> = m1.events.iter().map(|e| e.name.clone()).collect();
            let m2 = if refine { arb_machine("M2", Some(("M1", names))).prop_map(Some).boxed() } else { Just(None).boxed() };
            (Just(ctx), Just(m1), m2)
        })
        .prop_map(|(ctx, m1, m2)| Project {
            name: "Gen".into(),
            contexts: vec![ctx],
            machines: std::iter::once(m1).chain(m2).collect(),
        })
}

/// Print then parse `project`, requiring identity on both the tree and the text.
pub fn round_trip(project: &Project) -> Result<(), TestCaseError> {
    let text = print_project(project);
    let back = parse_project(&project.name, &text)
        .map_err(|e| TestCaseError::fail(format!("{e}\n{}", text.iter().map(|t| t.1.as_str()).collect::<String>())))?;
    prop_assert_eq!(&back, project);
    prop_assert_eq!(print_project(&back), text);
    Ok(())
}

/// Every valuation of `names` drawn from their types within `bounds`.
pub fn product(names: &[(String, Type)], bounds: &Bounds) -> Vec<Valuation> {
    let mut out = vec![Valuation::new()];
    for (n, ty) in names {
        let values = enumerate(ty, bounds).unwrap();
        out = out
            .into_iter()
            .flat_map(|v| {
                values.iter().map(move |x| {
                    let mut w = v.clone();
                    w.insert(n.clone(), x.clone());
                    w
                })
            })
            .collect();
    }
    out
}

pub fn holds_all(preds: &[&LabeledPred], env: &Valuation, bounds: &Bounds) -> bool {
    preds.iter().all(|p| eval_pred(&p.pred, env, bounds) == Ok(true))
}

pub fn total_balance(v: &Valuation) -> i128 {
    let Some(Value::Set(pairs)) = v.get("balanceof") else { panic!("balanceof missing") };
    pairs
        .iter()
        .map(|p| match p {
            Value::Pair(_, b) => b.as_int().unwrap(),
            _ => panic!("not a map"),
        })
        .sum()
}

/// Fires SetPass and GetGift with every parameter from every pre-state
/// satisfying the axioms and invariants, checking that the sum of balances
/// is unchanged. Returns the number of successful firings per event.
pub fn check_conservation(bounds: &Bounds) -> Result<Vec<(&'static str, usize)>, String> {
    let typed = typecheck(&gift()).map_err(|e| e.to_string())?;
    let m = &typed.project.machines[0];
    let ctx = typed.context_of(m);
    let axioms: Vec<&LabeledPred> = ctx.axioms.iter().collect();
    let invariants = typed.all_invariants(m);
    let consts: Vec<(String, Type)> = typed.constant_types(m).clone().into_iter().collect();
    let vars: Vec<(String, Type)> = typed.variable_types(m).clone().into_iter().collect();

    let mut pre_states = Vec::new();
    for mut c in product(&consts, bounds) {
        c.bind_carriers(&ctx.sets, bounds);
        if !holds_all(&axioms, &c, bounds) {
            continue;
        }
        for v in product(&vars, bounds) {
            let mut s = c.clone();
            s.extend(&v);
            if holds_all(&invariants, &s, bounds) {
                pre_states.push(s);
            }
        }
    }
    if pre_states.is_empty() {
        return Err("no pre-state satisfies the axioms and invariants".into());
    }

    let mut counts = Vec::new();
    for name in ["SetPass", "GetGift"] {
        let ev = m.event(name).ok_or(format!("{name} missing"))?;
        let params: Vec<(String, Type)> = typed.param_types(m, name).clone().into_iter().collect();
        let param_vals = product(&params, bounds);
        let mut fired = 0usize;
        for s in &pre_states {
            for p in &param_vals {
                match apply_event(ev, s, p, bounds) {
                    Ok(post) => {
                        fired += 1;
                        if total_balance(&post) != total_balance(s) {
                            return Err(format!("{name} with {p} from {s} changes the total balance"));
                        }
                    }
                    Err(EventError::GuardFailed(_)) => {}
                    Err(e) => return Err(format!("{name} with {p} from {s}: {e}")),
                }
            }
        }
        if fired == 0 {
            return Err(format!("{name} never fired"));
        }
        counts.push((name, fired));
    }
    Ok(counts)
}

/// Visits every state reachable through offered parameters and fires each
/// offer, failing on the first refusal.
fn explore(s: &mut SimSession, seen: &mut BTreeSet<String>, fired: &mut usize) -> Result<(), String> {
    for offer in s.enabled_events().map_err(|e| e.to_string())? {
        if offer.truncated {
            return Err(format!("offers for {} truncated", offer.event));
        }
        for p in &offer.params {
            if let Err(e) = s.fire(&offer.event, p) {
                return Err(format!("offer {} {p} refused in {}: {e}", offer.event, s.state()));
            }
            *fired += 1;
            if seen.insert(s.state().to_json().to_string()) {
                explore(s, seen, fired)?;
            }
            s.undo().map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

/// Explores every constant model of the Gift machine within `bounds`.
/// Returns the number of models and the number of fired offers.
pub fn check_offer_soundness(bounds: Bounds) -> Result<(usize, usize), String> {
    let project = gift();
    let (mut models, mut fired) = (0, 0);
    for this in 0..bounds.addr_count {
        for password in bounds.int_lo..=bounds.int_hi {
            for initial_balance in bounds.int_lo..=bounds.int_hi {
                for transfer_value in bounds.int_lo..=bounds.int_hi {
                    let fixed: Valuation = [
                        ("this", Value::Atom(Atom::new("ADDRESS", this))),
                        ("password", Value::Int(password)),
                        ("initial_balance", Value::Int(initial_balance)),
                        ("TRANSFER_VALUE", Value::Int(transfer_value)),
                    ]
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v))
                    .collect();
                    let mut s = match SimSession::new(&project, None, &fixed, bounds) {
                        Ok(s) => s,
                        Err(SimError::NoConstantModel) => continue,
                        Err(e) => return Err(e.to_string()),
                    };
                    models += 1;
                    s.offer_cap = 10_000;
                    let mut seen = BTreeSet::from([s.state().to_json().to_string()]);
                    let before = fired;
                    explore(&mut s, &mut seen, &mut fired)?;
                    if fired == before {
                        return Err(format!("nothing fired from {}", s.state()));
                    }
                }
            }
        }
    }
    Ok((models, fired))
}

pub const EXTRA_INVARIANTS: &[&str] = &[
    "hashPass ≥ 0",
    "hashPass = password",
    "passHasBeenSet = FALSE",
    "balanceof(this) ≥ initial_balance",
    "balanceof(this) ≤ 4",
    "address_tem = {this}",
    "∀a·a ∈ address_tem ⇒ balanceof(a) ≤ 3",
    "∃a·a ∈ address_tem ∧ a ≠ this",
    "balanceof(this) > 0",
];

pub fn project_with_invariant(inv: &str) -> Project {
    let m1 = GOLDEN_M1.replacen("    @inv5 this ∈ address_tem\n", &format!("    @inv5 this ∈ address_tem\n    @inv6 {inv}\n"), 1);
    parse_project("P", &[("c.eb".into(), GOLDEN_C.into()), ("m1.eb".into(), m1)]).unwrap()
}

pub fn small_bounds() -> impl Strategy<Value = Bounds> {
    (1u32..=2, 0i128..=1, 1i128..=2).prop_map(|(a, lo, hi)| Bounds::new(a, lo, hi.max(lo)).unwrap())
}

/// Every counterexample reported for the Gift machine extended with
/// `EXTRA_INVARIANTS[idx]` replays against its obligation.
pub fn violations_replay(idx: usize, bounds: &Bounds) -> Result<usize, TestCaseError> {
    let tp = typecheck(&project_with_invariant(EXTRA_INVARIANTS[idx])).unwrap();
    let mut replayed = 0;
    for po in gen_project_pos(&tp).unwrap() {
        let v = check_po(&po, bounds, DEFAULT_BUDGET);
        if let Status::Unsupported(Unsupported::ReplayFailed(why)) = &v.status {
            prop_assert!(false, "{}: {}", po.name, why);
        }
        if let Some(cex) = v.counterexample() {
            prop_assert_eq!(replay(&po, cex, bounds), Ok(()), "{}", po.name);
            replayed += 1;
        }
    }
    Ok(replayed)
}
