//! Name resolution, subset typing and translatability checks.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::error::ValidationError;

/// Value type of a subset expression once bytes have been folded into integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueType {
    Int,
    Bool,
    Address,
    Mapping(Box<ValueType>, Box<ValueType>),
}

impl ValueType {
    pub fn of(t: &SubsetType) -> ValueType {
        match t {
            SubsetType::Integer | SubsetType::Bytes(_) => ValueType::Int,
            SubsetType::Bool => ValueType::Bool,
            SubsetType::Address => ValueType::Address,
            SubsetType::Mapping(k, v) => ValueType::Mapping(Box::new(Self::of(k)), Box::new(Self::of(v))),
        }
    }
}

impl std::fmt::Display for ValueType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValueType::Int => f.write_str("integer"),
            ValueType::Bool => f.write_str("bool"),
            ValueType::Address => f.write_str("address"),
            ValueType::Mapping(k, v) => write!(f, "mapping({k} => {v})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionInfo {
    pub payable: bool,
    /// `constant`, `view` or `pure`.
    pub constant: bool,
    pub uses_sender: bool,
    pub has_transfer: bool,
    /// State variables written by the body, in first-write order.
    pub assigned: Vec<String>,
}

/// A contract that passed [`validate_contract`].
#[derive(Debug, Clone)]
pub struct CheckedContract {
    pub ast: ContractAst,
    /// Parallel to `ast.functions`.
    pub functions: Vec<FunctionInfo>,
}

impl CheckedContract {
    pub fn state_type(&self, name: &str) -> Option<&SubsetType> {
        self.ast.state_vars.iter().find(|v| v.name.name == name).map(|v| &v.ty)
    }
}

pub fn validate_contract(ast: ContractAst) -> Result<CheckedContract, ValidationError> {
    let mut state: BTreeMap<String, SubsetType> = BTreeMap::new();
    for v in &ast.state_vars {
        if state.insert(v.name.name.clone(), v.ty.clone()).is_some() {
            return Err(ValidationError::DuplicateName { span: v.name.span, name: v.name.name.clone() });
        }
        check_declared_type(&v.ty, v.span)?;
        if let Some(init) = &v.init {
            check_initializer(&v.ty, init)?;
        }
        if v.ty == SubsetType::Address && v.init.is_some() {
            return unsupported(v.span, "initializer on an address state variable");
        }
    }
    let mut names = BTreeSet::new();
    let mut fallback_seen = false;
    let mut infos = Vec::with_capacity(ast.functions.len());
    for f in &ast.functions {
        match &f.name {
            Some(n) => {
                if !names.insert(n.name.clone()) || state.contains_key(&n.name) {
                    return Err(ValidationError::DuplicateName { span: n.span, name: n.name.clone() });
                }
            }
            None => {
                if fallback_seen {
                    return Err(ValidationError::DuplicateName { span: f.span, name: "fallback".into() });
                }
                fallback_seen = true;
            }
        }
        infos.push(FunctionChecker::new(&state, f)?.run()?);
    }
    Ok(CheckedContract { ast, functions: infos })
}

fn unsupported<T>(span: Span, construct: impl Into<String>) -> Result<T, ValidationError> {
    Err(ValidationError::UnsupportedConstruct { span, construct: construct.into() })
}

/// Unwraps a single-statement branch and names the variable it writes.
fn branch_shape(s: &Stmt) -> Result<(&Stmt, String), ValidationError> {
    let single = match &s.kind {
        StmtKind::Seq(stmts) if stmts.len() == 1 => &stmts[0],
        StmtKind::Seq(_) => return unsupported(s.span, "if branch with other than exactly one statement"),
        _ => s,
    };
    let target = match &single.kind {
        StmtKind::Assign { target, .. } => target.base().name.clone(),
        StmtKind::Transfer { .. } => "balanceof".to_string(),
        _ => return unsupported(single.span, "if branch that is not a single assignment or transfer"),
    };
    Ok((single, target))
}

fn check_declared_type(t: &SubsetType, span: Span) -> Result<(), ValidationError> {
    if let SubsetType::Mapping(k, v) = t {
        if k.is_mapping() || v.is_mapping() {
            return unsupported(span, "nested mapping");
        }
        if !matches!(**k, SubsetType::Address | SubsetType::Bool) {
            return unsupported(span, format!("mapping keyed by {k} (only address or bool keys have a finite carrier)"));
        }
        if **v == SubsetType::Address {
            return unsupported(span, "mapping with address values");
        }
    }
    Ok(())
}

fn check_initializer(t: &SubsetType, init: &Expr) -> Result<(), ValidationError> {
    let ok = match (&init.kind, ValueType::of(t)) {
        (ExprKind::Int { .. }, ValueType::Int) => true,
        (ExprKind::ByteLit(h), ValueType::Int) => h.len() <= 31,
        (ExprKind::Bool(_), ValueType::Bool) => true,
        _ => false,
    };
    if ok {
        return Ok(());
    }
    let found = match &init.kind {
        ExprKind::Int { .. } | ExprKind::ByteLit(_) => "integer literal",
        ExprKind::Bool(_) => "bool literal",
        _ => "non-literal expression",
    };
    Err(ValidationError::TypeMismatch { span: init.span, expected: format!("{} literal", ValueType::of(t)), found: found.into() })
}

struct FunctionChecker<'a> {
    state: &'a BTreeMap<String, SubsetType>,
    params: BTreeMap<String, SubsetType>,
    f: &'a FunctionDecl,
    info: FunctionInfo,
    /// Variables written so far, used to reject a later read or write.
    written: BTreeSet<String>,
}

impl<'a> FunctionChecker<'a> {
    fn new(state: &'a BTreeMap<String, SubsetType>, f: &'a FunctionDecl) -> Result<Self, ValidationError> {
        let mut params = BTreeMap::new();
        for p in &f.params {
            check_declared_type(&p.ty, p.span)?;
            if p.ty.is_mapping() {
                return unsupported(p.span, "mapping-typed parameter");
            }
            if params.insert(p.name.name.clone(), p.ty.clone()).is_some() || state.contains_key(&p.name.name) {
                return Err(ValidationError::DuplicateName { span: p.name.span, name: p.name.name.clone() });
            }
        }
        let constant =
            f.has_qualifier(&Qualifier::Constant) || f.has_qualifier(&Qualifier::View) || f.has_qualifier(&Qualifier::Pure);
        let info = FunctionInfo {
            payable: f.has_qualifier(&Qualifier::Payable),
            constant,
            uses_sender: false,
            has_transfer: false,
            assigned: Vec::new(),
        };
        Ok(FunctionChecker { state, params, f, info, written: BTreeSet::new() })
    }

    fn run(mut self) -> Result<FunctionInfo, ValidationError> {
        if self.info.payable && self.info.constant {
            return unsupported(self.f.span, "function that is both payable and constant");
        }
        let f = self.f;
        self.stmt(&f.body, false)?;
        if self.info.constant && !self.info.assigned.is_empty() {
            return unsupported(self.f.span, "constant function writing state");
        }
        Ok(self.info)
    }

    fn stmt(&mut self, s: &Stmt, in_branch: bool) -> Result<(), ValidationError> {
        match &s.kind {
            StmtKind::Seq(stmts) => {
                for st in stmts {
                    self.stmt(st, in_branch)?;
                }
                Ok(())
            }
            StmtKind::Assign { target, value } => {
                let name = &target.base().name;
                let Some(ty) = self.state.get(name) else {
                    if self.params.contains_key(name) {
                        return unsupported(target.base().span, format!("assignment to parameter `{name}`"));
                    }
                    return Err(ValidationError::UnresolvedName { span: target.base().span, name: name.clone() });
                };
                let expected = match (target, ValueType::of(ty)) {
                    (LValue::Var(_), ValueType::Mapping(..)) => {
                        return unsupported(s.span, "assignment of a whole mapping");
                    }
                    (LValue::Var(_), t) => t,
                    (LValue::Index(_, key), ValueType::Mapping(k, v)) => {
                        self.expect(key, &k)?;
                        *v
                    }
                    (LValue::Index(id, _), t) => {
                        return Err(ValidationError::TypeMismatch {
                            span: id.span,
                            expected: "mapping".into(),
                            found: t.to_string(),
                        })
                    }
                };
                self.expect(value, &expected)?;
                self.record_write(name, s.span)
            }
            StmtKind::Require { cond, body } => {
                if in_branch {
                    return unsupported(s.span, "require inside an if branch");
                }
                self.expect(cond, &ValueType::Bool)?;
                self.stmt(body, in_branch)
            }
            StmtKind::If { cond, then, otherwise } => {
                if in_branch {
                    return unsupported(s.span, "nested if statement");
                }
                self.expect(cond, &ValueType::Bool)?;
                let (then_stmt, then_target) = branch_shape(then)?;
                let before = (self.written.clone(), self.info.assigned.clone());
                self.stmt(then_stmt, true)?;
                if let Some(o) = otherwise {
                    let (else_stmt, else_target) = branch_shape(o)?;
                    if else_target != then_target {
                        return unsupported(s.span, "if branches assigning different variables");
                    }
                    let after_then = (self.written.clone(), self.info.assigned.clone());
                    (self.written, self.info.assigned) = before;
                    self.stmt(else_stmt, true)?;
                    (self.written, self.info.assigned) = after_then;
                }
                Ok(())
            }
            StmtKind::Transfer { to, amount } => {
                if self.info.payable {
                    return unsupported(s.span, "transfer inside a payable function");
                }
                self.expect(to, &ValueType::Address)?;
                if to.kind == ExprKind::This {
                    return unsupported(to.span, "transfer to the contract itself");
                }
                self.expect(amount, &ValueType::Int)?;
                self.info.has_transfer = true;
                self.record_write("balanceof", s.span)
            }
            StmtKind::Return(e) => {
                if in_branch {
                    return unsupported(s.span, "return inside an if branch");
                }
                self.infer(e).map(|_| ())
            }
        }
    }

    fn record_write(&mut self, name: &str, span: Span) -> Result<(), ValidationError> {
        if self.written.contains(name) {
            return unsupported(span, format!("reassignment of same variable `{name}` within one statement sequence"));
        }
        if !self.info.assigned.iter().any(|n| n == name) {
            self.info.assigned.push(name.to_string());
        }
        self.written.insert(name.to_string());
        Ok(())
    }

    fn read(&mut self, name: &str, span: Span) -> Result<(), ValidationError> {
        if self.written.contains(name) {
            return unsupported(span, format!("read of `{name}` after it was assigned in the same function"));
        }
        Ok(())
    }

    fn expect(&mut self, e: &Expr, expected: &ValueType) -> Result<(), ValidationError> {
        let found = self.infer(e)?;
        if &found != expected {
            return Err(ValidationError::TypeMismatch { span: e.span, expected: expected.to_string(), found: found.to_string() });
        }
        Ok(())
    }

    fn infer(&mut self, e: &Expr) -> Result<ValueType, ValidationError> {
        Ok(match &e.kind {
            ExprKind::Int { .. } => ValueType::Int,
            ExprKind::Bool(_) => ValueType::Bool,
            ExprKind::ByteLit(h) => {
                if h.len() > 31 {
                    return unsupported(e.span, "byte literal wider than 15 bytes");
                }
                ValueType::Int
            }
            ExprKind::AddrLit(_) => {
                return unsupported(e.span, "address literal (addresses are abstract atoms)");
            }
            ExprKind::Var(name) => {
                if let Some(t) = self.params.get(name) {
                    ValueType::of(t)
                } else if let Some(t) = self.state.get(name) {
                    self.read(name, e.span)?;
                    ValueType::of(t)
                } else {
                    return Err(ValidationError::UnresolvedName { span: e.span, name: name.clone() });
                }
            }
            ExprKind::MsgSender => {
                self.info.uses_sender = true;
                ValueType::Address
            }
            ExprKind::MsgValue => {
                if !self.info.payable {
                    return unsupported(e.span, "msg.value in a non-payable function");
                }
                ValueType::Int
            }
            ExprKind::This => ValueType::Address,
            ExprKind::ThisBalance => {
                self.read("balanceof", e.span)?;
                ValueType::Int
            }
            ExprKind::BalanceOf(a) => {
                self.expect(a, &ValueType::Address)?;
                self.read("balanceof", e.span)?;
                ValueType::Int
            }
            ExprKind::Sha3(a) => {
                if matches!(self.infer(a)?, ValueType::Mapping(..)) {
                    return unsupported(a.span, "hash of a mapping");
                }
                ValueType::Int
            }
            ExprKind::Index(m, k) => {
                let ExprKind::Var(name) = &m.kind else {
                    return unsupported(m.span, "indexing a non-variable");
                };
                if !self.state.contains_key(name) {
                    return Err(ValidationError::UnresolvedName { span: m.span, name: name.clone() });
                }
                match self.infer(m)? {
                    ValueType::Mapping(kt, vt) => {
                        self.expect(k, &kt)?;
                        *vt
                    }
                    other => {
                        return Err(ValidationError::TypeMismatch {
                            span: m.span,
                            expected: "mapping".into(),
                            found: other.to_string(),
                        })
                    }
                }
            }
            ExprKind::Not(a) => {
                self.expect(a, &ValueType::Bool)?;
                ValueType::Bool
            }
            ExprKind::Binary { op, lhs, rhs } => match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                    self.expect(lhs, &ValueType::Int)?;
                    self.expect(rhs, &ValueType::Int)?;
                    ValueType::Int
                }
                BinOp::Le | BinOp::Ge => {
                    self.expect(lhs, &ValueType::Int)?;
                    self.expect(rhs, &ValueType::Int)?;
                    ValueType::Bool
                }
                BinOp::Eq | BinOp::Ne => {
                    let lt = self.infer(lhs)?;
                    if matches!(lt, ValueType::Mapping(..)) {
                        return unsupported(e.span, "comparison of mappings");
                    }
                    self.expect(rhs, &lt)?;
                    ValueType::Bool
                }
                BinOp::And | BinOp::Or => {
                    self.expect(lhs, &ValueType::Bool)?;
                    self.expect(rhs, &ValueType::Bool)?;
                    ValueType::Bool
                }
            },
        })
    }
}
