//! Event-B contexts, machines and the set-theoretic term language.

use std::collections::{BTreeMap, BTreeSet};

use super::types::Type;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Floor division.
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetOp {
    Union,
    Minus,
    Override,
    Cartesian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i128),
    Bool(bool),
    /// Constant, variable, parameter, bound variable or carrier set.
    Name(String),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    SetLit(Vec<Expr>),
    /// `{k1 ↦ v1, …}`
    FunLit(Vec<(Expr, Expr)>),
    SetOp(SetOp, Box<Expr>, Box<Expr>),
    Apply(Box<Expr>, Box<Expr>),
    Dom(Box<Expr>),
    BoolOf(Box<Pred>),
    /// `{TRUE ↦ if_true, FALSE ↦ if_false}(cond)`
    CondMap {
        if_true: Box<Expr>,
        if_false: Box<Expr>,
        cond: Box<Expr>,
    },
    Integers,
    Naturals,
    Naturals1,
    BoolSet,
    /// `A → B`
    TotalFn(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundVar {
    pub name: String,
    /// Filled in by the type checker.
    pub ty: Option<Type>,
}

impl BoundVar {
    pub fn new(name: impl Into<String>) -> Self {
        BoundVar { name: name.into(), ty: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pred {
    True,
    False,
    Cmp(CmpOp, Expr, Expr),
    Member(Expr, Expr),
    Subset(Expr, Expr),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
    Implies(Box<Pred>, Box<Pred>),
    Not(Box<Pred>),
    Forall(Vec<BoundVar>, Box<Pred>),
    Exists(Vec<BoundVar>, Box<Pred>),
}

// Small constructors used throughout translation and PO generation.
impl Expr {
    pub fn name(n: impl Into<String>) -> Expr {
        Expr::Name(n.into())
    }

    pub fn arith(op: ArithOp, a: Expr, b: Expr) -> Expr {
        Expr::Arith(op, Box::new(a), Box::new(b))
    }

    pub fn set_op(op: SetOp, a: Expr, b: Expr) -> Expr {
        Expr::SetOp(op, Box::new(a), Box::new(b))
    }

    pub fn apply(f: Expr, x: Expr) -> Expr {
        Expr::Apply(Box::new(f), Box::new(x))
    }

    pub fn total_fn(a: Expr, b: Expr) -> Expr {
        Expr::TotalFn(Box::new(a), Box::new(b))
    }

    pub fn bool_of(p: Pred) -> Expr {
        Expr::BoolOf(Box::new(p))
    }

    pub fn cond_map(if_true: Expr, if_false: Expr, cond: Expr) -> Expr {
        Expr::CondMap { if_true: Box::new(if_true), if_false: Box::new(if_false), cond: Box::new(cond) }
    }
}

impl Pred {
    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Pred {
        Pred::Cmp(op, a, b)
    }

    pub fn eq(a: Expr, b: Expr) -> Pred {
        Pred::Cmp(CmpOp::Eq, a, b)
    }

    pub fn member(e: Expr, s: Expr) -> Pred {
        Pred::Member(e, s)
    }

    pub fn and(a: Pred, b: Pred) -> Pred {
        Pred::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Pred, b: Pred) -> Pred {
        Pred::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Pred, b: Pred) -> Pred {
        Pred::Implies(Box::new(a), Box::new(b))
    }

    pub fn negate(a: Pred) -> Pred {
        Pred::Not(Box::new(a))
    }

    /// Left-nested conjunction; `⊤` when empty.
    pub fn conj(preds: impl IntoIterator<Item = Pred>) -> Pred {
        preds.into_iter().reduce(Pred::and).unwrap_or(Pred::True)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPred {
    pub label: String,
    pub pred: Pred,
}

impl LabeledPred {
    pub fn new(label: impl Into<String>, pred: Pred) -> Self {
        LabeledPred { label: label.into(), pred }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub label: String,
    pub target: String,
    pub expr: Expr,
}

impl Action {
    pub fn new(label: impl Into<String>, target: impl Into<String>, expr: Expr) -> Self {
        Action { label: label.into(), target: target.into(), expr }
    }
}

pub const INITIALISATION: &str = "INITIALISATION";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub name: String,
    pub refines: Option<String>,
    pub params: Vec<String>,
    pub guards: Vec<LabeledPred>,
    pub actions: Vec<Action>,
}

impl Event {
    pub fn new(name: impl Into<String>) -> Self {
        Event { name: name.into(), refines: None, params: Vec::new(), guards: Vec::new(), actions: Vec::new() }
    }

    pub fn is_initialisation(&self) -> bool {
        self.name == INITIALISATION
    }

    pub fn action_for(&self, var: &str) -> Option<&Action> {
        self.actions.iter().find(|a| a.target == var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub name: String,
    pub sets: Vec<String>,
    pub constants: Vec<String>,
    pub axioms: Vec<LabeledPred>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    pub name: String,
    pub refines: Option<String>,
    pub sees: String,
    pub variables: Vec<String>,
    pub invariants: Vec<LabeledPred>,
    pub events: Vec<Event>,
}

impl Machine {
    pub fn event(&self, name: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.name == name)
    }
}

/// One or more contexts plus the machines that see them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Project {
    pub name: String,
    pub contexts: Vec<Context>,
    pub machines: Vec<Machine>,
}

impl Project {
    pub fn context(&self, name: &str) -> Option<&Context> {
        self.contexts.iter().find(|c| c.name == name)
    }

    pub fn machine(&self, name: &str) -> Option<&Machine> {
        self.machines.iter().find(|m| m.name == name)
    }

    /// The machine with no refinement below it: the last in a `refines` chain.
    pub fn most_concrete(&self) -> Option<&Machine> {
        self.machines.iter().rev().find(|m| !self.machines.iter().any(|o| o.refines.as_deref() == Some(m.name.as_str())))
    }

    /// `m` followed by the machines it refines, nearest first.
    pub fn abstraction_chain<'a>(&'a self, m: &'a Machine) -> Vec<&'a Machine> {
        let mut chain = vec![m];
        let mut cur = m;
        while let Some(parent) = cur.refines.as_deref().and_then(|n| self.machine(n)) {
            if chain.iter().any(|c| c.name == parent.name) {
                break;
            }
            chain.push(parent);
            cur = parent;
        }
        chain
    }
}

impl Expr {
    pub fn free_names(&self, out: &mut BTreeSet<String>) {
        self.collect_free(&mut Vec::new(), out);
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Name(n) => {
                if !bound.contains(n) {
                    out.insert(n.clone());
                }
            }
            Expr::Int(_) | Expr::Bool(_) | Expr::Integers | Expr::Naturals | Expr::Naturals1 | Expr::BoolSet => {}
            Expr::Arith(_, a, b) | Expr::SetOp(_, a, b) | Expr::Apply(a, b) | Expr::TotalFn(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::SetLit(es) => es.iter().for_each(|e| e.collect_free(bound, out)),
            Expr::FunLit(ps) => {
                for (k, v) in ps {
                    k.collect_free(bound, out);
                    v.collect_free(bound, out);
                }
            }
            Expr::Dom(e) => e.collect_free(bound, out),
            Expr::BoolOf(p) => p.collect_free(bound, out),
            Expr::CondMap { if_true, if_false, cond } => {
                if_true.collect_free(bound, out);
                if_false.collect_free(bound, out);
                cond.collect_free(bound, out);
            }
        }
    }

    /// Simultaneous capture-avoiding substitution of free names.
    pub fn substitute(&self, map: &BTreeMap<String, Expr>) -> Expr {
        match self {
            Expr::Name(n) => map.get(n).cloned().unwrap_or_else(|| self.clone()),
            Expr::Int(_) | Expr::Bool(_) | Expr::Integers | Expr::Naturals | Expr::Naturals1 | Expr::BoolSet => self.clone(),
            Expr::Arith(op, a, b) => Expr::arith(*op, a.substitute(map), b.substitute(map)),
            Expr::SetOp(op, a, b) => Expr::set_op(*op, a.substitute(map), b.substitute(map)),
            Expr::Apply(a, b) => Expr::apply(a.substitute(map), b.substitute(map)),
            Expr::TotalFn(a, b) => Expr::total_fn(a.substitute(map), b.substitute(map)),
            Expr::SetLit(es) => Expr::SetLit(es.iter().map(|e| e.substitute(map)).collect()),
            Expr::FunLit(ps) => Expr::FunLit(ps.iter().map(|(k, v)| (k.substitute(map), v.substitute(map))).collect()),
            Expr::Dom(e) => Expr::Dom(Box::new(e.substitute(map))),
            Expr::BoolOf(p) => Expr::BoolOf(Box::new(p.substitute(map))),
            Expr::CondMap { if_true, if_false, cond } => {
                Expr::cond_map(if_true.substitute(map), if_false.substitute(map), cond.substitute(map))
            }
        }
    }

    /// Visits every sub-expression (including those inside predicates), parents first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Arith(_, a, b) | Expr::SetOp(_, a, b) | Expr::Apply(a, b) | Expr::TotalFn(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::SetLit(es) => es.iter().for_each(|e| e.walk(f)),
            Expr::FunLit(ps) => {
                for (k, v) in ps {
                    k.walk(f);
                    v.walk(f);
                }
            }
            Expr::Dom(e) => e.walk(f),
            Expr::BoolOf(p) => p.walk_exprs(f),
            Expr::CondMap { if_true, if_false, cond } => {
                if_true.walk(f);
                if_false.walk(f);
                cond.walk(f);
            }
            _ => {}
        }
    }
}

impl Pred {
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Pred::True | Pred::False => {}
            Pred::Cmp(_, a, b) | Pred::Member(a, b) | Pred::Subset(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Pred::And(a, b) | Pred::Or(a, b) | Pred::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Pred::Not(a) => a.collect_free(bound, out),
            Pred::Forall(vs, body) | Pred::Exists(vs, body) => {
                let n = bound.len();
                bound.extend(vs.iter().map(|v| v.name.clone()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    pub fn substitute(&self, map: &BTreeMap<String, Expr>) -> Pred {
        match self {
            Pred::True | Pred::False => self.clone(),
            Pred::Cmp(op, a, b) => Pred::Cmp(*op, a.substitute(map), b.substitute(map)),
            Pred::Member(a, b) => Pred::Member(a.substitute(map), b.substitute(map)),
            Pred::Subset(a, b) => Pred::Subset(a.substitute(map), b.substitute(map)),
            Pred::And(a, b) => Pred::and(a.substitute(map), b.substitute(map)),
            Pred::Or(a, b) => Pred::or(a.substitute(map), b.substitute(map)),
            Pred::Implies(a, b) => Pred::implies(a.substitute(map), b.substitute(map)),
            Pred::Not(a) => Pred::negate(a.substitute(map)),
            Pred::Forall(vs, body) | Pred::Exists(vs, body) => {
                let (vs, body) = substitute_binder(vs, body, map);
                if matches!(self, Pred::Forall(..)) {
                    Pred::Forall(vs, Box::new(body))
                } else {
                    Pred::Exists(vs, Box::new(body))
                }
            }
        }
    }

    pub fn walk_exprs<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        match self {
            Pred::True | Pred::False => {}
            Pred::Cmp(_, a, b) | Pred::Member(a, b) | Pred::Subset(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Pred::And(a, b) | Pred::Or(a, b) | Pred::Implies(a, b) => {
                a.walk_exprs(f);
                b.walk_exprs(f);
            }
            Pred::Not(a) => a.walk_exprs(f),
            Pred::Forall(_, body) | Pred::Exists(_, body) => body.walk_exprs(f),
        }
    }
}

fn substitute_binder(vs: &[BoundVar], body: &Pred, map: &BTreeMap<String, Expr>) -> (Vec<BoundVar>, Pred) {
    // Bound names are not substituted; rename any that would capture a free
    // name of a replacement expression.
    let mut inner: BTreeMap<String, Expr> =
        map.iter().filter(|(k, _)| !vs.iter().any(|v| &v.name == *k)).map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut captured = BTreeSet::new();
    for e in inner.values() {
        e.free_names(&mut captured);
    }
    let mut avoid = body.free_names();
    avoid.extend(captured.iter().cloned());
    avoid.extend(vs.iter().map(|v| v.name.clone()));
    let mut renamed = Vec::with_capacity(vs.len());
    for v in vs {
        if captured.contains(&v.name) {
            let fresh = (0..).map(|i| format!("{}{}", v.name, i)).find(|c| !avoid.contains(c)).unwrap();
            avoid.insert(fresh.clone());
            inner.insert(v.name.clone(), Expr::Name(fresh.clone()));
            renamed.push(BoundVar { name: fresh, ty: v.ty.clone() });
        } else {
            renamed.push(v.clone());
        }
    }
    (renamed, body.substitute(&inner))
}
