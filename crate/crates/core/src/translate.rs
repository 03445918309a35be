//! Translation of a checked contract into an Event-B context and machine.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eb::{self, Action, ArithOp, CmpOp, Context, Event, LabeledPred, Machine, Pred, Project, SetOp, INITIALISATION};
use crate::ebtext::is_reserved;
use crate::sol::ast::{self as sol, BinOp, ExprKind, LValue, StmtKind, SubsetType};
use crate::sol::{CheckedContract, Span, ValueType};

pub const ADDRESS: &str = "ADDRESS";
pub const THIS: &str = "this";
pub const ADDRESS_TEM: &str = "address_tem";
pub const BALANCEOF: &str = "balanceof";
pub const MSG_SENDER: &str = "msg_sender";
pub const MSG_VALUE: &str = "msg_value";
pub const PASSWORD: &str = "password";
pub const INITIAL_BALANCE: &str = "initial_balance";
pub const TRANSFER_VALUE: &str = "TRANSFER_VALUE";
pub const NEW_ACCOUNT: &str = "NewAccount";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("{}:{}: unsupported construct: {construct}", span.line, span.col)]
    UnsupportedConstruct { span: Span, construct: String },
}

impl TranslateError {
    pub fn span(&self) -> Span {
        match self {
            TranslateError::UnsupportedConstruct { span, .. } => *span,
        }
    }
}

fn unsupported<T>(span: Span, construct: impl Into<String>) -> Result<T, TranslateError> {
    Err(TranslateError::UnsupportedConstruct { span, construct: construct.into() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub span: Span,
    pub reason: String,
}

/// Traceability from generated identifiers and labels back to the source.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationReport {
    /// Source file name, when known.
    pub source: Option<String>,
    pub contract: String,
    pub skipped_constructs: Vec<Skipped>,
    /// Generated identifier → description of its origin.
    pub synthesized_names: BTreeMap<String, String>,
    /// `Event` and `Event/label` → source span.
    pub label_table: BTreeMap<String, Span>,
}

impl TranslationReport {
    /// Span for a proof obligation named `Event/label/KIND`.
    pub fn span_for_po(&self, po_name: &str) -> Option<Span> {
        let mut parts = po_name.split('/');
        let event = parts.next()?;
        let label = parts.next()?;
        self.label_table.get(&format!("{event}/{label}")).or_else(|| self.label_table.get(event)).copied()
    }
}

/// Event-B type expression for a subset type.
pub fn translate_type(t: &SubsetType) -> eb::Expr {
    match t {
        SubsetType::Integer | SubsetType::Bytes(_) => eb::Expr::Integers,
        SubsetType::Bool => eb::Expr::BoolSet,
        SubsetType::Address => eb::Expr::name(ADDRESS),
        SubsetType::Mapping(k, v) => eb::Expr::total_fn(translate_type(k), translate_type(v)),
    }
}

fn name(n: &str) -> eb::Expr {
    eb::Expr::name(n)
}

fn bal(of: eb::Expr) -> eb::Expr {
    eb::Expr::apply(name(BALANCEOF), of)
}

fn senders() -> eb::Expr {
    eb::Expr::set_op(SetOp::Minus, name(ADDRESS_TEM), eb::Expr::SetLit(vec![name(THIS)]))
}

struct Labels {
    guards: Vec<(LabeledPred, Span)>,
    actions: Vec<(Action, Span)>,
}

impl Labels {
    fn guard(&mut self, p: Pred, span: Span) {
        let label = format!("grd{}", self.guards.len() + 1);
        self.guards.push((LabeledPred::new(label, p), span));
    }

    fn action(&mut self, target: &str, e: eb::Expr, span: Span) {
        let label = format!("act{}", self.actions.len() + 1);
        self.actions.push((Action::new(label, target, e), span));
    }
}

pub fn translate(contract: &CheckedContract) -> Result<(Project, TranslationReport), TranslateError> {
    Translator::new(contract)?.run()
}

struct Translator<'a> {
    c: &'a CheckedContract,
    report: TranslationReport,
    /// State variable → value type.
    state: BTreeMap<String, ValueType>,
}

impl<'a> Translator<'a> {
    fn new(c: &'a CheckedContract) -> Result<Self, TranslateError> {
        let state = c.ast.state_vars.iter().map(|v| (v.name.name.clone(), ValueType::of(&v.ty))).collect();
        let report = TranslationReport { contract: c.ast.name.name.clone(), ..Default::default() };
        Ok(Translator { c, report, state })
    }

    fn synth(&mut self, n: &str, origin: impl Into<String>) {
        self.report.synthesized_names.insert(n.to_string(), origin.into());
    }

    fn check_name(&self, id: &sol::Ident, generated: &BTreeSet<String>) -> Result<(), TranslateError> {
        if is_reserved(&id.name) || generated.contains(&id.name) {
            return unsupported(id.span, format!("identifier `{}` collides with an Event-B keyword or generated name", id.name));
        }
        Ok(())
    }

    fn run(mut self) -> Result<(Project, TranslationReport), TranslateError> {
        let ast = &self.c.ast;
        let cname = ast.name.name.clone();
        let ctx_name = format!("{cname}_c");
        let m_name = format!("{cname}_m1");

        // Context constants: this, passwords, address seeds, initial_balance, TRANSFER_VALUE.
        let mut constants = vec![(THIS.to_string(), name(ADDRESS))];
        let mut seeds: BTreeMap<String, String> = BTreeMap::new();
        let mut first_password = true;
        for v in &ast.state_vars {
            if v.init.is_none() && matches!(v.ty, SubsetType::Bytes(_)) {
                let c = if first_password { PASSWORD.to_string() } else { format!("{PASSWORD}_{}", v.name.name) };
                first_password = false;
                constants.push((c.clone(), eb::Expr::Integers));
                seeds.insert(v.name.name.clone(), c);
            }
        }
        for v in &ast.state_vars {
            if v.ty == SubsetType::Address {
                let c = format!("{}_init", v.name.name);
                constants.push((c.clone(), name(ADDRESS)));
                seeds.insert(v.name.name.clone(), c);
            }
        }
        constants.push((INITIAL_BALANCE.to_string(), eb::Expr::Naturals1));
        constants.push((TRANSFER_VALUE.to_string(), eb::Expr::Naturals1));

        let mut generated: BTreeSet<String> =
            [ADDRESS, ADDRESS_TEM, BALANCEOF, MSG_SENDER, MSG_VALUE, NEW_ACCOUNT, INITIALISATION]
                .into_iter()
                .map(String::from)
                .collect();
        generated.extend(constants.iter().map(|(n, _)| n.clone()));
        generated.insert(ctx_name.clone());
        generated.insert(m_name.clone());
        for v in &ast.state_vars {
            self.check_name(&v.name, &generated)?;
        }
        for f in &ast.functions {
            if let Some(n) = &f.name {
                self.check_name(n, &generated)?;
            }
            for p in &f.params {
                self.check_name(&p.name, &generated)?;
            }
        }

        self.synth(ADDRESS, "carrier set for the address type");
        self.synth(ADDRESS_TEM, "addresses that have interacted with the contract");
        self.synth(BALANCEOF, "balance of every known address");
        self.synth(THIS, "address of the contract");
        self.synth(INITIAL_BALANCE, "initial balance of the contract");
        self.synth(TRANSFER_VALUE, "minimum value of a payable call");
        self.synth(NEW_ACCOUNT, "a new address starts interacting with the contract");
        for (var, c) in &seeds {
            self.synth(c, format!("initial value of `{var}`"));
        }

        let context = Context {
            name: ctx_name.clone(),
            sets: vec![ADDRESS.to_string()],
            constants: constants.iter().map(|(n, _)| n.clone()).collect(),
            axioms: constants
                .iter()
                .enumerate()
                .map(|(i, (n, s))| LabeledPred::new(format!("axm{}", i + 1), Pred::member(name(n), s.clone())))
                .collect(),
        };

        // Variables, typing invariants and INITIALISATION.
        let mut variables = Vec::new();
        let mut invariants = Vec::new();
        let mut init = Labels { guards: Vec::new(), actions: Vec::new() };
        for v in &ast.state_vars {
            let x = v.name.name.clone();
            variables.push(x.clone());
            invariants.push((Pred::member(name(&x), translate_type(&v.ty)), v.span));
            let value = match (&v.init, &v.ty) {
                (Some(e), _) => self.value(e, &Env::default())?,
                (None, _) if seeds.contains_key(&x) => name(&seeds[&x]),
                (None, t) => default_value(t),
            };
            init.action(&x, value, v.span);
        }
        variables.push(ADDRESS_TEM.to_string());
        variables.push(BALANCEOF.to_string());
        invariants.push((eb::Pred::Subset(name(ADDRESS_TEM), name(ADDRESS)), ast.span));
        invariants.push((Pred::member(name(BALANCEOF), eb::Expr::total_fn(name(ADDRESS_TEM), eb::Expr::Naturals)), ast.span));
        invariants.push((Pred::member(name(THIS), name(ADDRESS_TEM)), ast.span));
        init.action(ADDRESS_TEM, eb::Expr::SetLit(vec![name(THIS)]), ast.span);
        init.action(BALANCEOF, eb::Expr::FunLit(vec![(name(THIS), name(INITIAL_BALANCE))]), ast.span);

        let invariants: Vec<LabeledPred> = invariants
            .into_iter()
            .enumerate()
            .map(|(i, (p, span))| {
                let label = format!("inv{}", i + 1);
                self.report.label_table.insert(label.clone(), span);
                LabeledPred::new(label, p)
            })
            .collect();

        let mut events = vec![self.finish_event(Event::new(INITIALISATION), init, ast.span)];
        events.push(self.new_account(ast.span));

        for (f, info) in ast.functions.iter().zip(&self.c.functions) {
            if info.constant {
                self.report.skipped_constructs.push(Skipped {
                    span: f.span,
                    reason: format!("constant function `{}` does not change state", f.display_name()),
                });
                continue;
            }
            if f.name.is_none() && matches!(&f.body.kind, StmtKind::Seq(s) if s.is_empty()) {
                self.report.skipped_constructs.push(Skipped { span: f.span, reason: "empty fallback function".into() });
                continue;
            }
            events.push(self.function(f, info)?);
        }

        let machine = Machine { name: m_name, refines: None, sees: ctx_name, variables, invariants, events };
        let project = Project { name: cname, contexts: vec![context], machines: vec![machine] };
        Ok((project, self.report))
    }

    fn finish_event(&mut self, mut ev: Event, labels: Labels, span: Span) -> Event {
        self.report.label_table.insert(ev.name.clone(), span);
        for (g, s) in labels.guards {
            self.report.label_table.insert(format!("{}/{}", ev.name, g.label), s);
            ev.guards.push(g);
        }
        for (a, s) in labels.actions {
            self.report.label_table.insert(format!("{}/{}", ev.name, a.label), s);
            ev.actions.push(a);
        }
        ev
    }

    fn new_account(&mut self, span: Span) -> Event {
        let taken: BTreeSet<&str> = self.state.keys().map(String::as_str).collect();
        let fresh = |base: &str, avoid: &str| {
            std::iter::once(base.to_string())
                .chain((1..).map(|i| format!("{base}{i}")))
                .find(|c| !taken.contains(c.as_str()) && c != avoid)
                .unwrap()
        };
        let a = fresh("a", "");
        let b = fresh("b", &a);
        let mut ev = Event::new(NEW_ACCOUNT);
        ev.params = vec![a.clone(), b.clone()];
        let mut l = Labels { guards: Vec::new(), actions: Vec::new() };
        l.guard(Pred::member(name(&a), eb::Expr::set_op(SetOp::Minus, name(ADDRESS), name(ADDRESS_TEM))), span);
        l.guard(Pred::member(name(&b), eb::Expr::Naturals), span);
        l.action(ADDRESS_TEM, eb::Expr::set_op(SetOp::Union, name(ADDRESS_TEM), eb::Expr::SetLit(vec![name(&a)])), span);
        l.action(BALANCEOF, eb::Expr::set_op(SetOp::Union, name(BALANCEOF), eb::Expr::FunLit(vec![(name(&a), name(&b))])), span);
        self.finish_event(ev, l, span)
    }

    fn function(&mut self, f: &sol::FunctionDecl, info: &crate::sol::FunctionInfo) -> Result<Event, TranslateError> {
        let ev_name = f.display_name().to_string();
        let mut ev = Event::new(ev_name.clone());
        let env = Env { params: f.params.iter().map(|p| (p.name.name.clone(), ValueType::of(&p.ty))).collect() };
        let mut l = Labels { guards: Vec::new(), actions: Vec::new() };
        let body_span = f.body.span;

        for p in &f.params {
            ev.params.push(p.name.name.clone());
            let ty = if p.ty == SubsetType::Address { name(ADDRESS) } else { translate_type(&p.ty) };
            l.guard(Pred::member(name(&p.name.name), ty), p.span);
        }
        let needs_sender = info.payable || info.uses_sender || info.has_transfer;
        if needs_sender {
            ev.params.push(MSG_SENDER.to_string());
            self.synth(MSG_SENDER, "caller of a function");
        }
        if info.payable {
            ev.params.push(MSG_VALUE.to_string());
            self.synth(MSG_VALUE, "value sent with a payable call");
        } else if needs_sender {
            l.guard(Pred::member(name(MSG_SENDER), senders()), body_span);
        }

        let mut pending_guards = Vec::new();
        let mut actions = Vec::new();
        self.stmt(&f.body, &env, &mut l, &mut pending_guards, &mut actions)?;
        for (g, s) in pending_guards {
            l.guard(g, s);
        }

        if info.payable {
            l.guard(Pred::member(name(MSG_SENDER), senders()), body_span);
            l.guard(Pred::member(name(MSG_VALUE), eb::Expr::Naturals1), body_span);
            l.guard(Pred::cmp(CmpOp::Le, name(MSG_VALUE), bal(name(MSG_SENDER))), body_span);
            l.guard(Pred::cmp(CmpOp::Ge, name(MSG_VALUE), name(TRANSFER_VALUE)), body_span);
        }
        for (target, e, s) in actions {
            l.action(&target, e, s);
        }
        if info.payable {
            let deposit = eb::Expr::set_op(
                SetOp::Override,
                name(BALANCEOF),
                eb::Expr::FunLit(vec![
                    (name(THIS), eb::Expr::arith(ArithOp::Add, bal(name(THIS)), name(MSG_VALUE))),
                    (name(MSG_SENDER), eb::Expr::arith(ArithOp::Sub, bal(name(MSG_SENDER)), name(MSG_VALUE))),
                ]),
            );
            l.action(BALANCEOF, deposit, body_span);
        }
        Ok(self.finish_event(ev, l, f.span))
    }

    /// Guards from `require` go to `l` directly so they precede guards
    /// collected from transfers, which are appended afterwards.
    fn stmt(
        &mut self,
        s: &sol::Stmt,
        env: &Env,
        l: &mut Labels,
        extra_guards: &mut Vec<(Pred, Span)>,
        actions: &mut Vec<(String, eb::Expr, Span)>,
    ) -> Result<(), TranslateError> {
        match &s.kind {
            StmtKind::Seq(stmts) => {
                for st in stmts {
                    self.stmt(st, env, l, extra_guards, actions)?;
                }
            }
            StmtKind::Require { cond, body } => {
                let g = self.pred(cond, env)?;
                l.guard(g, s.span);
                self.stmt(body, env, l, extra_guards, actions)?;
            }
            StmtKind::Assign { target, value } => {
                let (var, e) = self.assignment(target, value, env)?;
                actions.push((var, e, s.span));
            }
            StmtKind::Transfer { to, amount } => {
                let e = self.transfer(to, amount, env, extra_guards, s.span)?;
                actions.push((BALANCEOF.to_string(), e, s.span));
            }
            StmtKind::Return(_) => {
                self.report.skipped_constructs.push(Skipped { span: s.span, reason: "return value is not modelled".into() });
            }
            StmtKind::If { cond, then, otherwise } => {
                let c = eb::Expr::bool_of(self.pred(cond, env)?);
                let (var, on_true) = self.branch(branch(then), env, extra_guards)?;
                let on_false = match otherwise {
                    Some(o) => {
                        let (var2, e) = self.branch(branch(o), env, extra_guards)?;
                        if var2 != var {
                            return unsupported(s.span, "if branches assigning different variables");
                        }
                        e
                    }
                    None => name(&var),
                };
                actions.push((var, eb::Expr::cond_map(on_true, on_false, c), s.span));
            }
        }
        Ok(())
    }

    fn branch(
        &mut self,
        s: &sol::Stmt,
        env: &Env,
        extra_guards: &mut Vec<(Pred, Span)>,
    ) -> Result<(String, eb::Expr), TranslateError> {
        match &s.kind {
            StmtKind::Assign { target, value } => self.assignment(target, value, env),
            StmtKind::Transfer { to, amount } => {
                Ok((BALANCEOF.to_string(), self.transfer(to, amount, env, extra_guards, s.span)?))
            }
            _ => unsupported(s.span, "if branch that is not a single assignment or transfer"),
        }
    }

    fn assignment(&mut self, target: &LValue, value: &sol::Expr, env: &Env) -> Result<(String, eb::Expr), TranslateError> {
        let v = self.value(value, env)?;
        Ok(match target {
            LValue::Var(id) => (id.name.clone(), v),
            LValue::Index(id, key) => {
                let k = self.value(key, env)?;
                (id.name.clone(), eb::Expr::set_op(SetOp::Override, name(&id.name), eb::Expr::FunLit(vec![(k, v)])))
            }
        })
    }

    fn transfer(
        &mut self,
        to: &sol::Expr,
        amount: &sol::Expr,
        env: &Env,
        extra_guards: &mut Vec<(Pred, Span)>,
        span: Span,
    ) -> Result<eb::Expr, TranslateError> {
        let dest = self.value(to, env)?;
        if to.kind != ExprKind::MsgSender {
            extra_guards.push((Pred::member(dest.clone(), senders()), span));
        }
        let whole = amount.kind == ExprKind::ThisBalance;
        let amt = self.value(amount, env)?;
        if !whole {
            extra_guards.push((Pred::member(amt.clone(), eb::Expr::Naturals), span));
            extra_guards.push((Pred::cmp(CmpOp::Le, amt.clone(), bal(name(THIS))), span));
        }
        let remaining = if whole { eb::Expr::Int(0) } else { eb::Expr::arith(ArithOp::Sub, bal(name(THIS)), amt.clone()) };
        Ok(eb::Expr::set_op(
            SetOp::Override,
            name(BALANCEOF),
            eb::Expr::FunLit(vec![(dest.clone(), eb::Expr::arith(ArithOp::Add, bal(dest), amt)), (name(THIS), remaining)]),
        ))
    }

    fn type_of(&self, e: &sol::Expr, env: &Env) -> ValueType {
        match &e.kind {
            ExprKind::Int { .. }
            | ExprKind::ByteLit(_)
            | ExprKind::MsgValue
            | ExprKind::ThisBalance
            | ExprKind::BalanceOf(_)
            | ExprKind::Sha3(_) => ValueType::Int,
            ExprKind::Bool(_) | ExprKind::Not(_) => ValueType::Bool,
            ExprKind::AddrLit(_) | ExprKind::MsgSender | ExprKind::This => ValueType::Address,
            ExprKind::Var(n) => match env.param_type(n) {
                Some(t) => t,
                None => self.state.get(n).cloned().unwrap_or(ValueType::Int),
            },
            ExprKind::Index(m, _) => match self.type_of(m, env) {
                ValueType::Mapping(_, v) => *v,
                t => t,
            },
            ExprKind::Binary { op, .. } => match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => ValueType::Int,
                _ => ValueType::Bool,
            },
        }
    }

    /// Expression position: booleans become `TRUE`/`FALSE`, names, or `bool(P)`.
    fn value(&mut self, e: &sol::Expr, env: &Env) -> Result<eb::Expr, TranslateError> {
        Ok(match &e.kind {
            ExprKind::Int { value, .. } => eb::Expr::Int(*value),
            ExprKind::ByteLit(h) => match i128::from_str_radix(h, 16) {
                Ok(n) => eb::Expr::Int(n),
                Err(_) => return unsupported(e.span, "byte literal too wide"),
            },
            ExprKind::Bool(b) => eb::Expr::Bool(*b),
            ExprKind::AddrLit(_) => return unsupported(e.span, "address literal"),
            ExprKind::Var(n) => name(n),
            ExprKind::MsgSender => name(MSG_SENDER),
            ExprKind::MsgValue => name(MSG_VALUE),
            ExprKind::This => name(THIS),
            ExprKind::ThisBalance => bal(name(THIS)),
            ExprKind::BalanceOf(a) => bal(self.value(a, env)?),
            ExprKind::Sha3(a) => {
                if self.type_of(a, env) != ValueType::Int {
                    return unsupported(e.span, "hash of a non-integer value");
                }
                self.value(a, env)?
            }
            ExprKind::Index(m, k) => eb::Expr::apply(self.value(m, env)?, self.value(k, env)?),
            ExprKind::Binary { op: op @ (BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div), lhs, rhs } => {
                let op = match op {
                    BinOp::Add => ArithOp::Add,
                    BinOp::Sub => ArithOp::Sub,
                    BinOp::Mul => ArithOp::Mul,
                    _ => ArithOp::Div,
                };
                eb::Expr::arith(op, self.value(lhs, env)?, self.value(rhs, env)?)
            }
            ExprKind::Binary { .. } | ExprKind::Not(_) => eb::Expr::bool_of(self.pred(e, env)?),
        })
    }

    /// Predicate position.
    fn pred(&mut self, e: &sol::Expr, env: &Env) -> Result<Pred, TranslateError> {
        Ok(match &e.kind {
            ExprKind::Bool(true) => Pred::True,
            ExprKind::Bool(false) => Pred::False,
            ExprKind::Var(_) | ExprKind::Index(..) => Pred::eq(self.value(e, env)?, eb::Expr::Bool(true)),
            ExprKind::Not(a) => match &a.kind {
                ExprKind::Var(_) | ExprKind::Index(..) => Pred::eq(self.value(a, env)?, eb::Expr::Bool(false)),
                _ => Pred::negate(self.pred(a, env)?),
            },
            ExprKind::Binary { op, lhs, rhs } => match op {
                BinOp::And => Pred::and(self.pred(lhs, env)?, self.pred(rhs, env)?),
                BinOp::Or => Pred::or(self.pred(lhs, env)?, self.pred(rhs, env)?),
                BinOp::Le | BinOp::Ge | BinOp::Eq | BinOp::Ne => {
                    let cmp = match op {
                        BinOp::Le => CmpOp::Le,
                        BinOp::Ge => CmpOp::Ge,
                        BinOp::Eq => CmpOp::Eq,
                        _ => CmpOp::Ne,
                    };
                    let (a, b) = (self.operand(lhs, rhs, env)?, self.operand(rhs, lhs, env)?);
                    Pred::cmp(cmp, a, b)
                }
                _ => return unsupported(e.span, "arithmetic expression used as a condition"),
            },
            _ => return unsupported(e.span, "non-boolean expression used as a condition"),
        })
    }

    /// A comparison operand; an ether amount compared with `msg.value`
    /// stands for the minimum payable value.
    fn operand(&mut self, e: &sol::Expr, other: &sol::Expr, env: &Env) -> Result<eb::Expr, TranslateError> {
        if matches!(e.kind, ExprKind::Int { unit: Some(_), .. }) && other.kind == ExprKind::MsgValue {
            return Ok(name(TRANSFER_VALUE));
        }
        self.value(e, env)
    }
}

#[derive(Default)]
struct Env {
    params: Vec<(String, ValueType)>,
}

impl Env {
    fn param_type(&self, n: &str) -> Option<ValueType> {
        self.params.iter().find(|(p, _)| p == n).map(|(_, t)| t.clone())
    }
}

fn branch(st: &sol::Stmt) -> &sol::Stmt {
    match &st.kind {
        StmtKind::Seq(v) if v.len() == 1 => &v[0],
        _ => st,
    }
}

fn default_value(t: &SubsetType) -> eb::Expr {
    match t {
        SubsetType::Integer | SubsetType::Bytes(_) => eb::Expr::Int(0),
        SubsetType::Bool => eb::Expr::Bool(false),
        SubsetType::Address => eb::Expr::name(THIS),
        SubsetType::Mapping(k, v) => {
            eb::Expr::set_op(SetOp::Cartesian, translate_type(k), eb::Expr::SetLit(vec![default_value(v)]))
        }
    }
}
