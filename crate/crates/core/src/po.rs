//! Proof obligations: invariant preservation and well-definedness per
//! machine, guard strengthening and action simulation per refinement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eb::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PoKind {
    #[serde(rename = "INV")]
    Inv,
    #[serde(rename = "WD")]
    Wd,
    #[serde(rename = "GRD")]
    Grd,
    #[serde(rename = "SIM")]
    Sim,
}

impl fmt::Display for PoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoKind::Inv => "INV",
            PoKind::Wd => "WD",
            PoKind::Grd => "GRD",
            PoKind::Sim => "SIM",
        })
    }
}

/// A named sequent `hypotheses ⊢ goal`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofObligation {
    /// `<Event>/<label>/<KIND>`
    pub name: String,
    pub kind: PoKind,
    pub machine: String,
    pub event: String,
    pub label: String,
    pub hypotheses: Vec<Pred>,
    pub goal: Pred,
    /// Constants, then variables, then parameters occurring in the sequent.
    pub free_names: Vec<(String, Type)>,
    /// Carrier sets the sequent may mention.
    pub sets: Vec<String>,
    /// Discharged syntactically; hidden from the default report.
    pub trivial: bool,
}

impl ProofObligation {
    fn new(
        tp: &TypedProject,
        m: &Machine,
        event: &str,
        label: &str,
        kind: PoKind,
        hypotheses: Vec<Pred>,
        goal: Pred,
    ) -> ProofObligation {
        let ctx = tp.context_of(m);
        let mut occurring = BTreeSet::new();
        for h in hypotheses.iter().chain(std::iter::once(&goal)) {
            occurring.extend(h.free_names());
        }
        let mut free_names = Vec::new();
        let mut push = |names: &BTreeMap<String, Type>, order: &[String]| {
            for n in order {
                if occurring.contains(n) && !free_names.iter().any(|(x, _): &(String, Type)| x == n) {
                    free_names.push((n.clone(), names[n].clone()));
                }
            }
        };
        push(tp.constant_types(m), &ctx.constants);
        push(tp.variable_types(m), &m.variables);
        if let Some(ev) = m.event(event) {
            push(tp.param_types(m, event), &ev.params);
        }
        let trivial = is_trivial(&hypotheses, &goal, &ctx.sets);
        ProofObligation {
            name: format!("{event}/{label}/{kind}"),
            kind,
            machine: m.name.clone(),
            event: event.to_string(),
            label: label.to_string(),
            hypotheses,
            goal,
            free_names,
            sets: ctx.sets.clone(),
            trivial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefinementShapeError {
    #[error("machine `{0}` does not refine another machine")]
    NotARefinement(String),
    #[error("`{concrete}` refines `{abstract_}` but their variables differ")]
    VariablesDiffer { concrete: String, abstract_: String },
    #[error("event `{event}` refines `{refines}`, which `{abstract_}` does not define")]
    MissingEvent { event: String, refines: String, abstract_: String },
    #[error("event `{event}` drops abstract parameter `{param}`")]
    MissingParameter { event: String, param: String },
}

/// Goal discharged without evaluation: identical to a hypothesis, a
/// reflexive equality, or a membership or inclusion in a maximal type.
pub fn is_trivial(hypotheses: &[Pred], goal: &Pred, sets: &[String]) -> bool {
    if hypotheses.contains(goal) {
        return true;
    }
    let maximal = |s: &Expr| match s {
        Expr::Integers | Expr::BoolSet => true,
        Expr::Name(n) => sets.contains(n),
        _ => false,
    };
    match goal {
        Pred::True => true,
        Pred::Cmp(CmpOp::Eq, a, b) => a == b,
        Pred::Member(_, s) | Pred::Subset(_, s) => maximal(s),
        Pred::And(a, b) => is_trivial(hypotheses, a, sets) && is_trivial(hypotheses, b, sets),
        _ => false,
    }
}

fn conj2(a: Pred, b: Pred) -> Pred {
    match (a, b) {
        (Pred::True, x) | (x, Pred::True) => x,
        (x, y) => Pred::and(x, y),
    }
}

fn imp(a: &Pred, b: Pred) -> Pred {
    if b == Pred::True {
        Pred::True
    } else {
        Pred::implies(a.clone(), b)
    }
}

/// Well-definedness condition of an expression; `⊤` when always defined.
pub fn wd_expr(e: &Expr) -> Pred {
    match e {
        Expr::Int(_) | Expr::Bool(_) | Expr::Name(_) | Expr::Integers | Expr::Naturals | Expr::Naturals1 | Expr::BoolSet => {
            Pred::True
        }
        Expr::Arith(op, a, b) => {
            let w = conj2(wd_expr(a), wd_expr(b));
            if *op == ArithOp::Div {
                conj2(w, Pred::cmp(CmpOp::Ne, (**b).clone(), Expr::Int(0)))
            } else {
                w
            }
        }
        Expr::SetLit(es) => es.iter().map(wd_expr).fold(Pred::True, conj2),
        Expr::FunLit(ps) => ps.iter().flat_map(|(k, v)| [wd_expr(k), wd_expr(v)]).fold(Pred::True, conj2),
        Expr::SetOp(_, a, b) | Expr::TotalFn(a, b) => conj2(wd_expr(a), wd_expr(b)),
        Expr::Apply(f, x) => conj2(conj2(wd_expr(f), wd_expr(x)), Pred::member((**x).clone(), Expr::Dom(f.clone()))),
        Expr::Dom(f) => wd_expr(f),
        Expr::BoolOf(p) => wd_pred(p),
        Expr::CondMap { if_true, if_false, cond } => {
            let w = conj2(conj2(wd_expr(if_true), wd_expr(if_false)), wd_expr(cond));
            conj2(w, Pred::member((**cond).clone(), Expr::SetLit(vec![Expr::Bool(true), Expr::Bool(false)])))
        }
    }
}

/// Left-to-right well-definedness of a predicate.
pub fn wd_pred(p: &Pred) -> Pred {
    match p {
        Pred::True | Pred::False => Pred::True,
        Pred::Cmp(_, a, b) | Pred::Member(a, b) | Pred::Subset(a, b) => conj2(wd_expr(a), wd_expr(b)),
        Pred::And(a, b) | Pred::Implies(a, b) => conj2(wd_pred(a), imp(a, wd_pred(b))),
        Pred::Or(a, b) => {
            let wb = wd_pred(b);
            conj2(wd_pred(a), if wb == Pred::True { Pred::True } else { Pred::or((**a).clone(), wb) })
        }
        Pred::Not(a) => wd_pred(a),
        Pred::Forall(vs, body) | Pred::Exists(vs, body) => match wd_pred(body) {
            Pred::True => Pred::True,
            w => Pred::Forall(vs.clone(), Box::new(w)),
        },
    }
}

fn axioms(tp: &TypedProject, m: &Machine) -> Vec<Pred> {
    tp.context_of(m).axioms.iter().map(|a| a.pred.clone()).collect()
}

/// INV and WD obligations of one machine.
pub fn gen_machine_pos(tp: &TypedProject, m: &Machine) -> Vec<ProofObligation> {
    let axioms = axioms(tp, m);
    let invariants: Vec<Pred> = tp.all_invariants(m).into_iter().map(|i| i.pred.clone()).collect();
    let mut out = Vec::new();
    for ev in &m.events {
        let init = ev.is_initialisation();
        let mut base = axioms.clone();
        if !init {
            base.extend(invariants.iter().cloned());
        }
        let guards: Vec<Pred> = ev.guards.iter().map(|g| g.pred.clone()).collect();

        for (i, g) in ev.guards.iter().enumerate() {
            let w = wd_pred(&g.pred);
            if w != Pred::True {
                let mut hyps = base.clone();
                hyps.extend(guards[..i].iter().cloned());
                out.push(ProofObligation::new(tp, m, &ev.name, &g.label, PoKind::Wd, hyps, w));
            }
        }

        let mut hyps = base.clone();
        hyps.extend(guards.iter().cloned());
        for a in &ev.actions {
            let w = wd_expr(&a.expr);
            if w != Pred::True {
                out.push(ProofObligation::new(tp, m, &ev.name, &a.label, PoKind::Wd, hyps.clone(), w));
            }
        }

        let subst: BTreeMap<String, Expr> = ev.actions.iter().map(|a| (a.target.clone(), a.expr.clone())).collect();
        for inv in &m.invariants {
            if inv.pred.free_names().iter().any(|n| subst.contains_key(n)) {
                let goal = inv.pred.substitute(&subst);
                out.push(ProofObligation::new(tp, m, &ev.name, &inv.label, PoKind::Inv, hyps.clone(), goal));
            }
        }
    }
    order_like_rodin(out)
}

/// Groups obligations by event, WD of guards first, then INV, then WD of
/// actions, each in label order.
fn order_like_rodin(pos: Vec<ProofObligation>) -> Vec<ProofObligation> {
    let mut events: Vec<String> = Vec::new();
    for p in &pos {
        if !events.contains(&p.event) {
            events.push(p.event.clone());
        }
    }
    let rank = |p: &ProofObligation| match (p.kind, p.label.starts_with("grd")) {
        (PoKind::Wd, true) | (PoKind::Grd, _) => 0,
        (PoKind::Inv, _) => 1,
        _ => 2,
    };
    let mut out = Vec::with_capacity(pos.len());
    for e in events {
        let mut group: Vec<&ProofObligation> = pos.iter().filter(|p| p.event == e).collect();
        group.sort_by_key(|p| rank(p));
        out.extend(group.into_iter().cloned());
    }
    out
}

/// GRD and SIM obligations between `concrete` and the machine it refines.
/// Concrete WD obligations already present verbatim in the abstraction are
/// dropped by [`gen_project_pos`].
pub fn gen_refinement_pos(tp: &TypedProject, abs: &Machine, con: &Machine) -> Result<Vec<ProofObligation>, RefinementShapeError> {
    if con.refines.as_deref() != Some(abs.name.as_str()) {
        return Err(RefinementShapeError::NotARefinement(con.name.clone()));
    }
    let (va, vc): (BTreeSet<_>, BTreeSet<_>) = (abs.variables.iter().collect(), con.variables.iter().collect());
    if va != vc {
        return Err(RefinementShapeError::VariablesDiffer { concrete: con.name.clone(), abstract_: abs.name.clone() });
    }
    let axioms = axioms(tp, con);
    let invariants: Vec<Pred> = tp.all_invariants(con).into_iter().map(|i| i.pred.clone()).collect();
    let mut out = Vec::new();
    for ev in &con.events {
        let init = ev.is_initialisation();
        let refined = if init { Some(INITIALISATION) } else { ev.refines.as_deref() };
        let abs_ev = match refined {
            Some(r) => Some(abs.event(r).ok_or_else(|| RefinementShapeError::MissingEvent {
                event: ev.name.clone(),
                refines: r.to_string(),
                abstract_: abs.name.clone(),
            })?),
            None => None,
        };
        let mut hyps = axioms.clone();
        if !init {
            hyps.extend(invariants.iter().cloned());
        }
        hyps.extend(ev.guards.iter().map(|g| g.pred.clone()));

        let Some(abs_ev) = abs_ev else {
            // A new event refines skip: it must leave every variable unchanged.
            for a in &ev.actions {
                let goal = Pred::eq(a.expr.clone(), Expr::name(&a.target));
                out.push(ProofObligation::new(tp, con, &ev.name, &a.label, PoKind::Sim, hyps.clone(), goal));
            }
            continue;
        };
        for p in &abs_ev.params {
            if !ev.params.contains(p) {
                return Err(RefinementShapeError::MissingParameter { event: ev.name.clone(), param: p.clone() });
            }
        }
        for g in &abs_ev.guards {
            out.push(ProofObligation::new(tp, con, &ev.name, &g.label, PoKind::Grd, hyps.clone(), g.pred.clone()));
        }
        for a in &abs_ev.actions {
            let con_expr = ev.action_for(&a.target).map_or_else(|| Expr::name(&a.target), |c| c.expr.clone());
            let goal = Pred::eq(con_expr, a.expr.clone());
            out.push(ProofObligation::new(tp, con, &ev.name, &a.label, PoKind::Sim, hyps.clone(), goal));
        }
        for c in &ev.actions {
            if abs_ev.action_for(&c.target).is_none() {
                let goal = Pred::eq(c.expr.clone(), Expr::name(&c.target));
                out.push(ProofObligation::new(tp, con, &ev.name, &c.label, PoKind::Sim, hyps.clone(), goal));
            }
        }
    }
    Ok(out)
}

/// Every obligation of the project: per machine in refinement order, its
/// own obligations followed by those of its refinement edge.
pub fn gen_project_pos(tp: &TypedProject) -> Result<Vec<ProofObligation>, RefinementShapeError> {
    let mut out: Vec<ProofObligation> = Vec::new();
    let mut done: BTreeSet<String> = BTreeSet::new();
    while done.len() < tp.project.machines.len() {
        let before = done.len();
        for m in &tp.project.machines {
            if done.contains(&m.name) {
                continue;
            }
            let abs = match &m.refines {
                Some(a) if !done.contains(a) => continue,
                Some(a) => tp.machine(a),
                None => None,
            };
            let mut own = gen_machine_pos(tp, m);
            if let Some(abs) = abs {
                own.retain(|p| {
                    !(p.kind == PoKind::Wd && out.iter().any(|q| q.machine == abs.name && q.name == p.name && q.goal == p.goal))
                });
                own.extend(gen_refinement_pos(tp, abs, m)?);
            }
            out.extend(own);
            done.insert(m.name.clone());
        }
        if done.len() == before {
            break;
        }
    }
    Ok(out)
}
