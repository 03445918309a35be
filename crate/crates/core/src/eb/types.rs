//! Type inference and checking for contexts and machines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Bool,
    Carrier(String),
    Pow(Box<Type>),
    Prod(Box<Type>, Box<Type>),
}

impl Type {
    pub fn pow(t: Type) -> Type {
        Type::Pow(Box::new(t))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn map(k: Type, v: Type) -> Type {
        Type::pow(Type::prod(k, v))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("ℤ"),
            Type::Bool => f.write_str("BOOL"),
            Type::Carrier(s) => f.write_str(s),
            Type::Pow(t) => write!(f, "ℙ({t})"),
            Type::Prod(a, b) => {
                let wrap = |t: &Type| if matches!(t, Type::Prod(..)) { format!("({t})") } else { t.to_string() };
                write!(f, "{} × {}", wrap(a), wrap(b))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("{location}: type mismatch between {expected} and {found}")]
    Mismatch { location: String, expected: Type, found: Type },
    #[error("{location}: unknown identifier `{name}`")]
    Unbound { location: String, name: String },
    #[error("{location}: cannot infer a type for `{name}`")]
    Uninferred { location: String, name: String },
    #[error("{location}: {message}")]
    Structure { location: String, message: String },
    #[error("{location}: undeclared reference to `{name}`")]
    Dangling { location: String, name: String },
}

/// Name-to-type tables produced by [`typecheck`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeTables {
    pub constants: BTreeMap<String, BTreeMap<String, Type>>,
    pub variables: BTreeMap<String, BTreeMap<String, Type>>,
    /// machine -> event -> parameter -> type
    pub params: BTreeMap<String, BTreeMap<String, BTreeMap<String, Type>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedProject {
    /// The input with quantifier variables annotated.
    pub project: Project,
    pub types: TypeTables,
}

impl TypedProject {
    pub fn machine(&self, name: &str) -> Option<&Machine> {
        self.project.machine(name)
    }

    pub fn context_of(&self, m: &Machine) -> &Context {
        self.project.context(&m.sees).expect("typecheck resolved `sees`")
    }

    pub fn constant_types(&self, m: &Machine) -> &BTreeMap<String, Type> {
        &self.types.constants[&m.sees]
    }

    pub fn variable_types(&self, m: &Machine) -> &BTreeMap<String, Type> {
        &self.types.variables[&m.name]
    }

    pub fn param_types(&self, m: &Machine, event: &str) -> &BTreeMap<String, Type> {
        &self.types.params[&m.name][event]
    }

    /// Types of every name visible inside `event` of `m`.
    pub fn scope(&self, m: &Machine, event: Option<&str>) -> BTreeMap<String, Type> {
        let mut out = self.constant_types(m).clone();
        out.extend(self.variable_types(m).iter().map(|(k, v)| (k.clone(), v.clone())));
        if let Some(e) = event {
            out.extend(self.param_types(m, e).iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        out
    }

    /// Invariants of `m` followed by those of every machine it refines.
    pub fn all_invariants<'a>(&'a self, m: &'a Machine) -> Vec<&'a LabeledPred> {
        self.project.abstraction_chain(m).into_iter().rev().flat_map(|x| x.invariants.iter()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    Carrier(String),
    Pow(Box<Ty>),
    Prod(Box<Ty>, Box<Ty>),
    Var(u32),
}

impl Ty {
    fn from_type(t: &Type) -> Ty {
        match t {
            Type::Int => Ty::Int,
            Type::Bool => Ty::Bool,
            Type::Carrier(s) => Ty::Carrier(s.clone()),
            Type::Pow(t) => Ty::Pow(Box::new(Ty::from_type(t))),
            Type::Prod(a, b) => Ty::Prod(Box::new(Ty::from_type(a)), Box::new(Ty::from_type(b))),
        }
    }

    fn pow(t: Ty) -> Ty {
        Ty::Pow(Box::new(t))
    }

    fn prod(a: Ty, b: Ty) -> Ty {
        Ty::Prod(Box::new(a), Box::new(b))
    }
}

/// Unification state shared by every formula in one scope.
struct Infer {
    subst: Vec<Option<Ty>>,
    carriers: BTreeSet<String>,
    names: BTreeMap<String, Ty>,
    location: String,
}

impl Infer {
    fn new(carriers: BTreeSet<String>) -> Self {
        Infer { subst: Vec::new(), carriers, names: BTreeMap::new(), location: String::new() }
    }

    fn fresh(&mut self) -> Ty {
        self.subst.push(None);
        Ty::Var(self.subst.len() as u32 - 1)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::Var(v) => match &self.subst[*v as usize] {
                Some(t) => self.resolve(t),
                None => t.clone(),
            },
            Ty::Pow(a) => Ty::pow(self.resolve(a)),
            Ty::Prod(a, b) => Ty::prod(self.resolve(a), self.resolve(b)),
            _ => t.clone(),
        }
    }

    fn finish(&self, t: &Ty) -> Option<Type> {
        Some(match self.resolve(t) {
            Ty::Int => Type::Int,
            Ty::Bool => Type::Bool,
            Ty::Carrier(s) => Type::Carrier(s),
            Ty::Pow(a) => Type::pow(self.finish(&a)?),
            Ty::Prod(a, b) => Type::prod(self.finish(&a)?, self.finish(&b)?),
            Ty::Var(_) => return None,
        })
    }

    fn occurs(&self, v: u32, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Var(w) => v == w,
            Ty::Pow(a) => self.occurs(v, &a),
            Ty::Prod(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
            _ => false,
        }
    }

    fn mismatch(&self, a: &Ty, b: &Ty) -> TypeError {
        let show = |t: &Ty| self.finish(t).unwrap_or_else(|| placeholder(&self.resolve(t)));
        TypeError::Mismatch { location: self.location.clone(), expected: show(a), found: show(b) }
    }

    fn unify(&mut self, expected: &Ty, found: &Ty) -> Result<(), TypeError> {
        let (a, b) = (self.resolve(expected), self.resolve(found));
        match (&a, &b) {
            (Ty::Var(x), Ty::Var(y)) if x == y => Ok(()),
            (Ty::Var(x), t) | (t, Ty::Var(x)) => {
                if self.occurs(*x, t) {
                    return Err(self.mismatch(&a, &b));
                }
                self.subst[*x as usize] = Some(t.clone());
                Ok(())
            }
            (Ty::Int, Ty::Int) | (Ty::Bool, Ty::Bool) => Ok(()),
            (Ty::Carrier(x), Ty::Carrier(y)) if x == y => Ok(()),
            (Ty::Pow(x), Ty::Pow(y)) => self.unify(x, y).map_err(|_| self.mismatch(&a, &b)),
            (Ty::Prod(x1, y1), Ty::Prod(x2, y2)) => {
                self.unify(x1, x2).and_then(|_| self.unify(y1, y2)).map_err(|_| self.mismatch(&a, &b))
            }
            _ => Err(self.mismatch(&a, &b)),
        }
    }

    fn lookup(&mut self, name: &str, bound: &[(String, Ty)]) -> Result<Ty, TypeError> {
        if let Some((_, t)) = bound.iter().rev().find(|(n, _)| n == name) {
            return Ok(t.clone());
        }
        if let Some(t) = self.names.get(name) {
            return Ok(t.clone());
        }
        if self.carriers.contains(name) {
            return Ok(Ty::pow(Ty::Carrier(name.to_string())));
        }
        Err(TypeError::Unbound { location: self.location.clone(), name: name.to_string() })
    }

    fn expr(&mut self, e: &Expr, bound: &mut Vec<(String, Ty)>) -> Result<Ty, TypeError> {
        Ok(match e {
            Expr::Int(_) => Ty::Int,
            Expr::Bool(_) => Ty::Bool,
            Expr::Name(n) => self.lookup(n, bound)?,
            Expr::Arith(_, a, b) => {
                let ta = self.expr(a, bound)?;
                self.unify(&Ty::Int, &ta)?;
                let tb = self.expr(b, bound)?;
                self.unify(&Ty::Int, &tb)?;
                Ty::Int
            }
            Expr::SetLit(es) => {
                let elem = self.fresh();
                for x in es {
                    let t = self.expr(x, bound)?;
                    self.unify(&elem, &t)?;
                }
                Ty::pow(elem)
            }
            Expr::FunLit(ps) => {
                let (k, v) = (self.fresh(), self.fresh());
                for (a, b) in ps {
                    let ta = self.expr(a, bound)?;
                    self.unify(&k, &ta)?;
                    let tb = self.expr(b, bound)?;
                    self.unify(&v, &tb)?;
                }
                Ty::pow(Ty::prod(k, v))
            }
            Expr::SetOp(op, a, b) => {
                let ta = self.expr(a, bound)?;
                let tb = self.expr(b, bound)?;
                match op {
                    SetOp::Union | SetOp::Minus => {
                        let elem = self.fresh();
                        self.unify(&Ty::pow(elem.clone()), &ta)?;
                        self.unify(&ta, &tb)?;
                        Ty::pow(elem)
                    }
                    SetOp::Override => {
                        let rel = Ty::pow(Ty::prod(self.fresh(), self.fresh()));
                        self.unify(&rel, &ta)?;
                        self.unify(&ta, &tb)?;
                        rel
                    }
                    SetOp::Cartesian => {
                        let (x, y) = (self.fresh(), self.fresh());
                        self.unify(&Ty::pow(x.clone()), &ta)?;
                        self.unify(&Ty::pow(y.clone()), &tb)?;
                        Ty::pow(Ty::prod(x, y))
                    }
                }
            }
            Expr::Apply(f, x) => {
                let (k, v) = (self.fresh(), self.fresh());
                let tf = self.expr(f, bound)?;
                self.unify(&Ty::pow(Ty::prod(k.clone(), v.clone())), &tf)?;
                let tx = self.expr(x, bound)?;
                self.unify(&k, &tx)?;
                v
            }
            Expr::Dom(f) => {
                let (k, v) = (self.fresh(), self.fresh());
                let tf = self.expr(f, bound)?;
                self.unify(&Ty::pow(Ty::prod(k.clone(), v)), &tf)?;
                Ty::pow(k)
            }
            Expr::BoolOf(p) => {
                self.pred(p, bound)?;
                Ty::Bool
            }
            Expr::CondMap { if_true, if_false, cond } => {
                let tc = self.expr(cond, bound)?;
                self.unify(&Ty::Bool, &tc)?;
                let t1 = self.expr(if_true, bound)?;
                let t2 = self.expr(if_false, bound)?;
                self.unify(&t1, &t2)?;
                t1
            }
            Expr::Integers | Expr::Naturals | Expr::Naturals1 => Ty::pow(Ty::Int),
            Expr::BoolSet => Ty::pow(Ty::Bool),
            Expr::TotalFn(a, b) => {
                let (x, y) = (self.fresh(), self.fresh());
                let ta = self.expr(a, bound)?;
                self.unify(&Ty::pow(x.clone()), &ta)?;
                let tb = self.expr(b, bound)?;
                self.unify(&Ty::pow(y.clone()), &tb)?;
                Ty::pow(Ty::pow(Ty::prod(x, y)))
            }
        })
    }

    fn pred(&mut self, p: &Pred, bound: &mut Vec<(String, Ty)>) -> Result<(), TypeError> {
        match p {
            Pred::True | Pred::False => Ok(()),
            Pred::Cmp(op, a, b) => {
                let ta = self.expr(a, bound)?;
                let tb = self.expr(b, bound)?;
                if !matches!(op, CmpOp::Eq | CmpOp::Ne) {
                    self.unify(&Ty::Int, &ta)?;
                }
                self.unify(&ta, &tb)
            }
            Pred::Member(e, s) => {
                let te = self.expr(e, bound)?;
                let ts = self.expr(s, bound)?;
                self.unify(&ts, &Ty::pow(te))
            }
            Pred::Subset(a, b) => {
                let elem = self.fresh();
                let ta = self.expr(a, bound)?;
                self.unify(&Ty::pow(elem), &ta)?;
                let tb = self.expr(b, bound)?;
                self.unify(&tb, &ta)
            }
            Pred::And(a, b) | Pred::Or(a, b) | Pred::Implies(a, b) => {
                self.pred(a, bound)?;
                self.pred(b, bound)
            }
            Pred::Not(a) => self.pred(a, bound),
            Pred::Forall(vs, body) | Pred::Exists(vs, body) => {
                let n = bound.len();
                for v in vs {
                    let t = match &v.ty {
                        Some(t) => Ty::from_type(t),
                        None => self.fresh(),
                    };
                    bound.push((v.name.clone(), t));
                }
                let r = self.pred(body, bound);
                bound.truncate(n);
                r
            }
        }
    }

    /// Fills in quantifier annotations once the scope is fully inferred.
    fn annotate(&mut self, p: &mut Pred) -> Result<(), TypeError> {
        let mut bound = Vec::new();
        self.annotate_pred(p, &mut bound)
    }

    fn annotate_pred(&mut self, p: &mut Pred, bound: &mut Vec<(String, Ty)>) -> Result<(), TypeError> {
        match p {
            Pred::Forall(vs, body) | Pred::Exists(vs, body) => {
                // Re-infer the body with fresh variables to recover binder types.
                let n = bound.len();
                let tys: Vec<Ty> = vs
                    .iter()
                    .map(|v| match &v.ty {
                        Some(t) => Ty::from_type(t),
                        None => self.fresh(),
                    })
                    .collect();
                for (v, t) in vs.iter().zip(&tys) {
                    bound.push((v.name.clone(), t.clone()));
                }
                self.pred(body, bound)?;
                self.annotate_pred(body, bound)?;
                bound.truncate(n);
                for (v, t) in vs.iter_mut().zip(&tys) {
                    v.ty = Some(
                        self.finish(t)
                            .ok_or_else(|| TypeError::Uninferred { location: self.location.clone(), name: v.name.clone() })?,
                    );
                }
                Ok(())
            }
            Pred::And(a, b) | Pred::Or(a, b) | Pred::Implies(a, b) => {
                self.annotate_pred(a, bound)?;
                self.annotate_pred(b, bound)
            }
            Pred::Not(a) => self.annotate_pred(a, bound),
            Pred::Cmp(_, a, b) | Pred::Member(a, b) | Pred::Subset(a, b) => {
                self.annotate_expr(a, bound)?;
                self.annotate_expr(b, bound)
            }
            Pred::True | Pred::False => Ok(()),
        }
    }

    fn annotate_expr(&mut self, e: &mut Expr, bound: &mut Vec<(String, Ty)>) -> Result<(), TypeError> {
        match e {
            Expr::BoolOf(p) => self.annotate_pred(p, bound),
            Expr::Arith(_, a, b) | Expr::SetOp(_, a, b) | Expr::Apply(a, b) | Expr::TotalFn(a, b) => {
                self.annotate_expr(a, bound)?;
                self.annotate_expr(b, bound)
            }
            Expr::SetLit(es) => es.iter_mut().try_for_each(|x| self.annotate_expr(x, bound)),
            Expr::FunLit(ps) => ps.iter_mut().try_for_each(|(k, v)| {
                self.annotate_expr(k, bound)?;
                self.annotate_expr(v, bound)
            }),
            Expr::Dom(x) => self.annotate_expr(x, bound),
            Expr::CondMap { if_true, if_false, cond } => {
                self.annotate_expr(if_true, bound)?;
                self.annotate_expr(if_false, bound)?;
                self.annotate_expr(cond, bound)
            }
            _ => Ok(()),
        }
    }

    fn declare(&mut self, names: &[String], what: &str) -> Result<(), TypeError> {
        for n in names {
            if self.carriers.contains(n) || self.names.contains_key(n) {
                return Err(TypeError::Structure {
                    location: self.location.clone(),
                    message: format!("{what} `{n}` clashes with an existing name"),
                });
            }
            let t = self.fresh();
            self.names.insert(n.clone(), t);
        }
        Ok(())
    }

    fn finish_names(&self, names: &[String]) -> Result<BTreeMap<String, Type>, TypeError> {
        names
            .iter()
            .map(|n| {
                self.finish(&self.names[n])
                    .map(|t| (n.clone(), t))
                    .ok_or_else(|| TypeError::Uninferred { location: self.location.clone(), name: n.clone() })
            })
            .collect()
    }
}

fn placeholder(t: &Ty) -> Type {
    match t {
        Ty::Int => Type::Int,
        Ty::Bool => Type::Bool,
        Ty::Carrier(s) => Type::Carrier(s.clone()),
        Ty::Pow(a) => Type::pow(placeholder(a)),
        Ty::Prod(a, b) => Type::prod(placeholder(a), placeholder(b)),
        Ty::Var(v) => Type::Carrier(format!("'t{v}")),
    }
}

fn check_labels<'a>(labels: impl Iterator<Item = &'a str>, location: &str) -> Result<(), TypeError> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(TypeError::Structure { location: location.to_string(), message: format!("duplicate label `{l}`") });
        }
    }
    Ok(())
}

/// Infers the type of every constant, variable and parameter and checks
/// every formula against it.
pub fn typecheck(project: &Project) -> Result<TypedProject, TypeError> {
    let mut out = project.clone();
    let mut tables = TypeTables::default();

    for ctx in &mut out.contexts {
        let location = format!("context {}", ctx.name);
        check_labels(ctx.axioms.iter().map(|a| a.label.as_str()), &location)?;
        let mut inf = Infer::new(ctx.sets.iter().cloned().collect());
        inf.location = location.clone();
        inf.declare(&ctx.constants, "constant")?;
        for ax in &ctx.axioms {
            inf.location = format!("{location}, axiom {}", ax.label);
            inf.pred(&ax.pred, &mut Vec::new())?;
        }
        for ax in &mut ctx.axioms {
            inf.location = format!("{location}, axiom {}", ax.label);
            inf.annotate(&mut ax.pred)?;
        }
        inf.location = location;
        tables.constants.insert(ctx.name.clone(), inf.finish_names(&ctx.constants)?);
    }

    let mut seen_machines: BTreeSet<String> = BTreeSet::new();
    let order = machine_order(project)?;
    for idx in order {
        let m = &mut out.machines[idx];
        let location = format!("machine {}", m.name);
        let ctx =
            project.context(&m.sees).ok_or_else(|| TypeError::Dangling { location: location.clone(), name: m.sees.clone() })?;
        let abs_vars = match &m.refines {
            Some(a) => {
                let abs =
                    project.machine(a).ok_or_else(|| TypeError::Dangling { location: location.clone(), name: a.clone() })?;
                if abs.sees != m.sees {
                    return Err(TypeError::Structure {
                        location,
                        message: format!("refines `{a}` which sees a different context `{}`", abs.sees),
                    });
                }
                tables.variables.get(a).cloned().unwrap_or_default()
            }
            None => BTreeMap::new(),
        };
        check_labels(m.invariants.iter().map(|a| a.label.as_str()), &location)?;
        let mut inf = Infer::new(ctx.sets.iter().cloned().collect());
        inf.location = location.clone();
        for (c, t) in &tables.constants[&ctx.name] {
            inf.names.insert(c.clone(), Ty::from_type(t));
        }
        for v in &m.variables {
            if inf.names.contains_key(v) || inf.carriers.contains(v) {
                return Err(TypeError::Structure {
                    location: location.clone(),
                    message: format!("variable `{v}` clashes with a context name"),
                });
            }
            let t = match abs_vars.get(v) {
                Some(t) => Ty::from_type(t),
                None => inf.fresh(),
            };
            inf.names.insert(v.clone(), t);
        }
        for inv in &m.invariants {
            inf.location = format!("{location}, invariant {}", inv.label);
            inf.pred(&inv.pred, &mut Vec::new())?;
        }
        inf.location = location.clone();
        let var_types = inf.finish_names(&m.variables)?;
        for inv in &mut m.invariants {
            inf.location = format!("{location}, invariant {}", inv.label);
            inf.annotate(&mut inv.pred)?;
        }

        let mut event_names = BTreeSet::new();
        let mut param_tables = BTreeMap::new();
        if !m.events.iter().any(Event::is_initialisation) {
            return Err(TypeError::Structure { location, message: "missing INITIALISATION event".into() });
        }
        for ev in &mut m.events {
            let evloc = format!("{location}, event {}", ev.name);
            if !event_names.insert(ev.name.clone()) {
                return Err(TypeError::Structure { location: evloc, message: "duplicate event name".into() });
            }
            if ev.is_initialisation() && (!ev.params.is_empty() || !ev.guards.is_empty()) {
                return Err(TypeError::Structure {
                    location: evloc,
                    message: "INITIALISATION cannot have parameters or guards".into(),
                });
            }
            check_labels(ev.guards.iter().map(|g| g.label.as_str()).chain(ev.actions.iter().map(|a| a.label.as_str())), &evloc)?;
            let saved = inf.names.clone();
            inf.location = evloc.clone();
            inf.declare(&ev.params, "parameter")?;
            for g in &ev.guards {
                inf.location = format!("{evloc}, guard {}", g.label);
                inf.pred(&g.pred, &mut Vec::new())?;
            }
            let mut targets = BTreeSet::new();
            for a in &ev.actions {
                inf.location = format!("{evloc}, action {}", a.label);
                if !m.variables.contains(&a.target) {
                    return Err(TypeError::Structure {
                        location: inf.location.clone(),
                        message: format!("`{}` is not a variable of this machine", a.target),
                    });
                }
                if !targets.insert(a.target.clone()) {
                    return Err(TypeError::Structure {
                        location: inf.location.clone(),
                        message: format!("`{}` is assigned twice", a.target),
                    });
                }
                let t = inf.expr(&a.expr, &mut Vec::new())?;
                let vt = inf.names[&a.target].clone();
                inf.unify(&vt, &t)?;
            }
            inf.location = evloc.clone();
            let ptypes = inf.finish_names(&ev.params)?;
            for g in &mut ev.guards {
                inf.location = format!("{evloc}, guard {}", g.label);
                inf.annotate(&mut g.pred)?;
            }
            for a in &mut ev.actions {
                inf.location = format!("{evloc}, action {}", a.label);
                inf.annotate_expr(&mut a.expr, &mut Vec::new())?;
            }
            param_tables.insert(ev.name.clone(), ptypes);
            inf.names = saved;
        }
        if m.refines.is_some() {
            for ev in &m.events {
                if let Some(r) = &ev.refines {
                    let abs = project.machine(m.refines.as_deref().unwrap()).unwrap();
                    if abs.event(r).is_none() {
                        return Err(TypeError::Dangling { location: format!("{location}, event {}", ev.name), name: r.clone() });
                    }
                }
            }
        }
        tables.variables.insert(m.name.clone(), var_types);
        tables.params.insert(m.name.clone(), param_tables);
        seen_machines.insert(m.name.clone());
    }

    Ok(TypedProject { project: out, types: tables })
}

/// Machines ordered so that each comes after the one it refines.
fn machine_order(project: &Project) -> Result<Vec<usize>, TypeError> {
    let mut order = Vec::new();
    let mut placed = BTreeSet::new();
    while order.len() < project.machines.len() {
        let before = order.len();
        for (i, m) in project.machines.iter().enumerate() {
            if placed.contains(&i) {
                continue;
            }
            let ready = match &m.refines {
                None => true,
                Some(a) => {
                    if project.machine(a).is_none() {
                        return Err(TypeError::Dangling { location: format!("machine {}", m.name), name: a.clone() });
                    }
                    project.machines.iter().position(|x| &x.name == a).is_some_and(|j| placed.contains(&j))
                }
            };
            if ready {
                order.push(i);
                placed.insert(i);
            }
        }
        if order.len() == before {
            return Err(TypeError::Structure { location: "project".into(), message: "cyclic refinement".into() });
        }
    }
    Ok(order)
}
