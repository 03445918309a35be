//! Evaluation of expressions, predicates and events over finite valuations.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::ast::*;
use super::value::{enumerate, Bounds, Valuation, Value};
use crate::ebtext::print_expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WdKind {
    /// Function applied to an argument outside its domain.
    OutsideDomain,
    /// Applied relation maps the argument to several values.
    NotAFunction,
    DivisionByZero,
}

/// An ill-defined term was evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WdFailure {
    pub kind: WdKind,
    pub site: Box<Expr>,
}

impl fmt::Display for WdFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            WdKind::OutsideDomain => "argument outside the function's domain",
            WdKind::NotAFunction => "applied relation is not functional at the argument",
            WdKind::DivisionByZero => "division by zero",
        };
        write!(f, "{what} in `{}`", print_expr(&self.site))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("well-definedness failure: {0}")]
    Wd(WdFailure),
    #[error("no binding for `{0}`")]
    MissingBinding(String),
    #[error("integer overflow in `{0}`")]
    Overflow(String),
    #[error("cannot materialise the infinite or oversized set `{0}`")]
    Unbounded(String),
    #[error("ill-typed term `{0}`")]
    IllTyped(String),
}

impl EvalError {
    pub fn is_wd(&self) -> bool {
        matches!(self, EvalError::Wd(_))
    }

    fn wd(kind: WdKind, site: &Expr) -> Self {
        EvalError::Wd(WdFailure { kind, site: Box::new(site.clone()) })
    }
}

type R<T> = Result<T, EvalError>;

fn ill(e: &Expr) -> EvalError {
    EvalError::IllTyped(print_expr(e))
}

pub fn eval_expr(e: &Expr, env: &Valuation, bounds: &Bounds) -> R<Value> {
    Ok(eval(e, env, bounds)?.into_owned())
}

pub fn eval_pred(p: &Pred, env: &Valuation, bounds: &Bounds) -> R<bool> {
    Ev { env, bounds }.pred(p)
}

fn eval<'a>(e: &Expr, env: &'a Valuation, bounds: &Bounds) -> R<Cow<'a, Value>> {
    Ev { env, bounds }.expr(e)
}

struct Ev<'a, 'b> {
    env: &'a Valuation,
    bounds: &'b Bounds,
}

impl<'a> Ev<'a, '_> {
    fn int(&self, e: &Expr) -> R<i128> {
        self.expr(e)?.as_int().ok_or_else(|| ill(e))
    }

    fn set(&self, e: &Expr) -> R<Cow<'a, BTreeSet<Value>>> {
        match self.expr(e)? {
            Cow::Borrowed(Value::Set(s)) => Ok(Cow::Borrowed(s)),
            Cow::Owned(Value::Set(s)) => Ok(Cow::Owned(s)),
            _ => Err(ill(e)),
        }
    }

    fn expr(&self, e: &Expr) -> R<Cow<'a, Value>> {
        Ok(Cow::Owned(match e {
            Expr::Int(n) => Value::Int(*n),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Name(n) => {
                return self.env.get(n).map(Cow::Borrowed).ok_or_else(|| EvalError::MissingBinding(n.clone()));
            }
            Expr::Arith(op, a, b) => {
                let (x, y) = (self.int(a)?, self.int(b)?);
                let r = match op {
                    ArithOp::Add => x.checked_add(y),
                    ArithOp::Sub => x.checked_sub(y),
                    ArithOp::Mul => x.checked_mul(y),
                    ArithOp::Div => {
                        if y == 0 {
                            return Err(EvalError::wd(WdKind::DivisionByZero, e));
                        }
                        floor_div(x, y)
                    }
                };
                Value::Int(r.ok_or_else(|| EvalError::Overflow(print_expr(e)))?)
            }
            Expr::SetLit(es) => Value::Set(es.iter().map(|x| self.expr(x).map(Cow::into_owned)).collect::<R<_>>()?),
            Expr::FunLit(ps) => Value::Set(
                ps.iter()
                    .map(|(k, v)| Ok(Value::pair(self.expr(k)?.into_owned(), self.expr(v)?.into_owned())))
                    .collect::<R<_>>()?,
            ),
            Expr::SetOp(op, a, b) => {
                let (x, y) = (self.set(a)?, self.set(b)?);
                Value::Set(match op {
                    SetOp::Union => x.union(&y).cloned().collect(),
                    SetOp::Minus => x.difference(&y).cloned().collect(),
                    SetOp::Override => {
                        let keys: BTreeSet<&Value> = y.iter().filter_map(pair_key).collect();
                        x.iter().filter(|p| pair_key(p).is_none_or(|k| !keys.contains(k))).chain(y.iter()).cloned().collect()
                    }
                    SetOp::Cartesian => x.iter().flat_map(|p| y.iter().map(move |q| Value::pair(p.clone(), q.clone()))).collect(),
                })
            }
            Expr::Apply(f, x) => {
                let fv = self.expr(f)?;
                let xv = self.expr(x)?;
                let mut it = fv.images(&xv);
                let Some(first) = it.next() else { return Err(EvalError::wd(WdKind::OutsideDomain, e)) };
                if it.next().is_some() {
                    return Err(EvalError::wd(WdKind::NotAFunction, e));
                }
                first.clone()
            }
            Expr::Dom(f) => Value::Set(self.set(f)?.iter().filter_map(pair_key).cloned().collect()),
            Expr::BoolOf(p) => Value::Bool(self.pred(p)?),
            Expr::CondMap { if_true, if_false, cond } => {
                // Both branches are evaluated: a set extension is defined only
                // when all of its elements are.
                let t = self.expr(if_true)?;
                let f = self.expr(if_false)?;
                let c = self.expr(cond)?.as_bool().ok_or_else(|| ill(cond))?;
                return Ok(if c { t } else { f });
            }
            Expr::BoolSet => Value::Set([Value::Bool(false), Value::Bool(true)].into()),
            Expr::Integers | Expr::Naturals | Expr::Naturals1 | Expr::TotalFn(..) => {
                return Err(EvalError::Unbounded(print_expr(e)));
            }
        }))
    }

    /// Membership without materialising `s` where it is infinite.
    fn member(&self, x: &Value, s: &Expr) -> R<bool> {
        match s {
            Expr::Integers => Ok(matches!(x, Value::Int(_))),
            Expr::Naturals => Ok(matches!(x, Value::Int(n) if *n >= 0)),
            Expr::Naturals1 => Ok(matches!(x, Value::Int(n) if *n >= 1)),
            Expr::BoolSet => Ok(matches!(x, Value::Bool(_))),
            Expr::SetOp(SetOp::Union, a, b) => Ok(self.member(x, a)? || self.member(x, b)?),
            Expr::SetOp(SetOp::Minus, a, b) => Ok(self.member(x, a)? && !self.member(x, b)?),
            Expr::TotalFn(a, b) => {
                if !x.is_function() {
                    return Ok(false);
                }
                let pairs = x.as_set().expect("functions are sets");
                let dom: BTreeSet<&Value> = pairs.iter().filter_map(pair_key).collect();
                let expected = self.set(a)?;
                if dom.len() != expected.len() || !expected.iter().all(|k| dom.contains(k)) {
                    return Ok(false);
                }
                for p in pairs {
                    if let Value::Pair(_, v) = p {
                        if !self.member(v, b)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            _ => Ok(self.set(s)?.contains(x)),
        }
    }

    fn pred(&self, p: &Pred) -> R<bool> {
        match p {
            Pred::True => Ok(true),
            Pred::False => Ok(false),
            Pred::Cmp(op, a, b) => match op {
                CmpOp::Eq => Ok(self.expr(a)? == self.expr(b)?),
                CmpOp::Ne => Ok(self.expr(a)? != self.expr(b)?),
                _ => {
                    let (x, y) = (self.int(a)?, self.int(b)?);
                    Ok(match op {
                        CmpOp::Le => x <= y,
                        CmpOp::Ge => x >= y,
                        CmpOp::Lt => x < y,
                        CmpOp::Gt => x > y,
                        CmpOp::Eq | CmpOp::Ne => unreachable!(),
                    })
                }
            },
            Pred::Member(x, s) => {
                let v = self.expr(x)?;
                self.member(&v, s)
            }
            Pred::Subset(a, b) => {
                let xs = self.set(a)?;
                for x in xs.iter() {
                    if !self.member(x, b)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            // Left-to-right: the right operand is only evaluated when it matters.
            Pred::And(a, b) => Ok(self.pred(a)? && self.pred(b)?),
            Pred::Or(a, b) => Ok(self.pred(a)? || self.pred(b)?),
            Pred::Implies(a, b) => Ok(!self.pred(a)? || self.pred(b)?),
            Pred::Not(a) => Ok(!self.pred(a)?),
            Pred::Forall(vs, body) => self.quantify(vs, body, true),
            Pred::Exists(vs, body) => self.quantify(vs, body, false),
        }
    }

    fn quantify(&self, vs: &[BoundVar], body: &Pred, universal: bool) -> R<bool> {
        let mut domains = Vec::with_capacity(vs.len());
        for v in vs {
            let ty = v.ty.as_ref().ok_or_else(|| EvalError::IllTyped(format!("untyped bound variable `{}`", v.name)))?;
            domains.push(enumerate(ty, self.bounds).map_err(|e| EvalError::Unbounded(e.0.to_string()))?);
        }
        if domains.iter().any(Vec::is_empty) {
            return Ok(universal);
        }
        let mut env = self.env.clone();
        let mut idx = vec![0usize; vs.len()];
        loop {
            for ((v, d), i) in vs.iter().zip(&domains).zip(&idx) {
                env.insert(v.name.clone(), d[*i].clone());
            }
            let holds = Ev { env: &env, bounds: self.bounds }.pred(body)?;
            if holds != universal {
                return Ok(!universal);
            }
            let mut k = vs.len();
            loop {
                if k == 0 {
                    return Ok(universal);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < domains[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

fn pair_key(p: &Value) -> Option<&Value> {
    match p {
        Value::Pair(k, _) => Some(k),
        _ => None,
    }
}

fn floor_div(x: i128, y: i128) -> Option<i128> {
    let q = x.checked_div(y)?;
    if x % y != 0 && ((x < 0) != (y < 0)) {
        q.checked_sub(1)
    } else {
        Some(q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("guard {0} does not hold")]
    GuardFailed(String),
    #[error("event error in {label}: {failure}")]
    Wd { label: String, failure: WdFailure },
    #[error("{label}: {error}")]
    Eval { label: String, error: EvalError },
}

fn labelled(label: &str, e: EvalError) -> EventError {
    match e {
        EvalError::Wd(failure) => EventError::Wd { label: label.to_string(), failure },
        error => EventError::Eval { label: label.to_string(), error },
    }
}

/// Checks every guard in order, then evaluates all actions against the
/// pre-state and returns `state` with the assigned variables replaced.
///
/// `state` carries constants, carrier sets and variables; `params` the
/// event parameters.
pub fn apply_event(ev: &Event, state: &Valuation, params: &Valuation, bounds: &Bounds) -> Result<Valuation, EventError> {
    let mut env = state.clone();
    env.extend(params);
    for g in &ev.guards {
        if !eval_pred(&g.pred, &env, bounds).map_err(|e| labelled(&g.label, e))? {
            return Err(EventError::GuardFailed(g.label.clone()));
        }
    }
    let mut updates = Vec::with_capacity(ev.actions.len());
    for a in &ev.actions {
        updates.push((a.target.clone(), eval_expr(&a.expr, &env, bounds).map_err(|e| labelled(&a.label, e))?));
    }
    let mut post = state.clone();
    for (k, v) in updates {
        post.insert(k, v);
    }
    Ok(post)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eb::value::Atom;

    fn addr(i: u32) -> Value {
        Value::Atom(Atom::new("ADDRESS", i))
    }

    fn env(pairs: &[(&str, Value)]) -> Valuation {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn override_replaces_existing_key() {
        let e = env(&[("a", addr(1)), ("b", addr(2))]);
        let f = Expr::FunLit(vec![(Expr::name("a"), Expr::Int(1)), (Expr::name("b"), Expr::Int(2))]);
        let g = Expr::FunLit(vec![(Expr::name("a"), Expr::Int(5))]);
        let x = Expr::apply(Expr::set_op(SetOp::Override, f, g), Expr::name("a"));
        assert_eq!(eval_expr(&x, &e, &Bounds::default()), Ok(Value::Int(5)));
    }

    #[test]
    fn cond_map_selects_true_branch() {
        let x = Expr::cond_map(Expr::Int(7), Expr::Int(9), Expr::bool_of(Pred::eq(Expr::Int(1), Expr::Int(1))));
        assert_eq!(eval_expr(&x, &Valuation::new(), &Bounds::default()), Ok(Value::Int(7)));
    }

    #[test]
    fn apply_outside_domain_is_wd_failure() {
        let e = env(&[("this", addr(0)), ("a1", addr(1))]);
        let x = Expr::apply(Expr::FunLit(vec![(Expr::name("this"), Expr::Int(1))]), Expr::name("a1"));
        let err = eval_expr(&x, &e, &Bounds::default()).unwrap_err();
        assert!(matches!(err, EvalError::Wd(WdFailure { kind: WdKind::OutsideDomain, .. })));
    }

    #[test]
    fn total_function_membership() {
        let inv = Pred::member(Expr::name("balanceof"), Expr::total_fn(Expr::name("address_tem"), Expr::Naturals));
        let ok = env(&[("address_tem", Value::Set([addr(0)].into())), ("balanceof", Value::map([(addr(0), Value::Int(1))]))]);
        assert_eq!(eval_pred(&inv, &ok, &Bounds::default()), Ok(true));
        let neg = env(&[("address_tem", Value::Set([addr(0)].into())), ("balanceof", Value::map([(addr(0), Value::Int(-1))]))]);
        assert_eq!(eval_pred(&inv, &neg, &Bounds::default()), Ok(false));
        let partial =
            env(&[("address_tem", Value::Set([addr(0), addr(1)].into())), ("balanceof", Value::map([(addr(0), Value::Int(1))]))]);
        assert_eq!(eval_pred(&inv, &partial, &Bounds::default()), Ok(false));
    }

    #[test]
    fn bounded_quantifier() {
        let p = Pred::Forall(
            vec![BoundVar { name: "x".into(), ty: Some(crate::eb::Type::Int) }],
            Box::new(Pred::implies(
                Pred::member(Expr::name("x"), Expr::Naturals1),
                Pred::cmp(CmpOp::Ge, Expr::name("x"), Expr::Int(1)),
            )),
        );
        assert_eq!(eval_pred(&p, &Valuation::new(), &Bounds::default()), Ok(true));
    }

    #[test]
    fn floor_division() {
        assert_eq!(floor_div(-7, 2), Some(-4));
        assert_eq!(floor_div(7, -2), Some(-4));
        assert_eq!(floor_div(7, 2), Some(3));
        assert_eq!(floor_div(-8, 2), Some(-4));
        let e = Expr::arith(ArithOp::Div, Expr::Int(1), Expr::Int(0));
        assert!(eval_expr(&e, &Valuation::new(), &Bounds::default()).unwrap_err().is_wd());
    }

    #[test]
    fn empty_event_is_skip() {
        let s = env(&[("x", Value::Int(3))]);
        assert_eq!(apply_event(&Event::new("skip"), &s, &Valuation::new(), &Bounds::default()), Ok(s));
    }
}
