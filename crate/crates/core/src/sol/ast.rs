//! Syntax tree for the supported Solidity subset.

use serde::{Deserialize, Serialize};

/// Byte range plus 1-based line/column of its first character.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end.max(self.end), line: self.line, col: self.col }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractAst {
    pub name: Ident,
    pub pragma: Option<String>,
    pub state_vars: Vec<StateVarDecl>,
    pub functions: Vec<FunctionDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVarDecl {
    pub name: Ident,
    pub ty: SubsetType,
    pub qualifiers: Vec<Qualifier>,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SubsetType {
    Integer,
    Bool,
    Address,
    /// `bytes` (no width) or `bytesN`.
    Bytes(Option<u8>),
    Mapping(Box<SubsetType>, Box<SubsetType>),
}

impl SubsetType {
    pub fn is_mapping(&self) -> bool {
        matches!(self, SubsetType::Mapping(..))
    }
}

impl std::fmt::Display for SubsetType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubsetType::Integer => f.write_str("uint"),
            SubsetType::Bool => f.write_str("bool"),
            SubsetType::Address => f.write_str("address"),
            SubsetType::Bytes(None) => f.write_str("bytes"),
            SubsetType::Bytes(Some(n)) => write!(f, "bytes{n}"),
            SubsetType::Mapping(k, v) => write!(f, "mapping({k} => {v})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Qualifier {
    Public,
    Private,
    Internal,
    External,
    Payable,
    Constant,
    View,
    Pure,
    Returns(Vec<(SubsetType, Option<Ident>)>),
}

impl Qualifier {
    pub fn keyword(&self) -> &'static str {
        match self {
            Qualifier::Public => "public",
            Qualifier::Private => "private",
            Qualifier::Internal => "internal",
            Qualifier::External => "external",
            Qualifier::Payable => "payable",
            Qualifier::Constant => "constant",
            Qualifier::View => "view",
            Qualifier::Pure => "pure",
            Qualifier::Returns(_) => "returns",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: Ident,
    pub ty: SubsetType,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    /// `None` for the fallback function.
    pub name: Option<Ident>,
    pub params: Vec<Param>,
    pub qualifiers: Vec<Qualifier>,
    /// Always a `StmtKind::Seq` holding the block contents.
    pub body: Stmt,
    pub span: Span,
}

impl FunctionDecl {
    pub fn has_qualifier(&self, q: &Qualifier) -> bool {
        self.qualifiers.iter().any(|x| x == q)
    }

    pub fn display_name(&self) -> &str {
        self.name.as_ref().map_or("fallback", |n| n.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Assign {
        target: LValue,
        value: Expr,
    },
    If {
        cond: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    /// `require(cond)` guarding the remainder of the enclosing block.
    Require {
        cond: Expr,
        body: Box<Stmt>,
    },
    /// Statements in source order; also used for `{ ... }` blocks.
    Seq(Vec<Stmt>),
    Transfer {
        to: Expr,
        amount: Expr,
    },
    Return(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LValue {
    Var(Ident),
    Index(Ident, Expr),
}

impl LValue {
    pub fn base(&self) -> &Ident {
        match self {
            LValue::Var(id) | LValue::Index(id, _) => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EtherUnit {
    Wei,
    Szabo,
    Finney,
    Ether,
}

impl EtherUnit {
    pub fn keyword(self) -> &'static str {
        match self {
            EtherUnit::Wei => "wei",
            EtherUnit::Szabo => "szabo",
            EtherUnit::Finney => "finney",
            EtherUnit::Ether => "ether",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "wei" => EtherUnit::Wei,
            "szabo" => EtherUnit::Szabo,
            "finney" => EtherUnit::Finney,
            "ether" => EtherUnit::Ether,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    /// Decimal literal. A unit suffix does not scale the value.
    Int {
        value: i128,
        unit: Option<EtherUnit>,
    },
    Bool(bool),
    /// `0x...` literal that is not 20 bytes wide.
    ByteLit(String),
    /// `0x...` literal exactly 20 bytes wide.
    AddrLit(String),
    Var(String),
    MsgSender,
    MsgValue,
    This,
    ThisBalance,
    BalanceOf(Box<Expr>),
    Sha3(Box<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Not(Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Le | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div => 6,
        }
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Le | BinOp::Ge | BinOp::Eq | BinOp::Ne)
    }
}

/// Resets every span to the default so trees can be compared by shape.
pub trait EraseSpans {
    fn erase_spans(&mut self);
}

impl EraseSpans for Ident {
    fn erase_spans(&mut self) {
        self.span = Span::default();
    }
}

impl EraseSpans for Expr {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::BalanceOf(e) | ExprKind::Sha3(e) | ExprKind::Not(e) => e.erase_spans(),
            ExprKind::Index(a, b) | ExprKind::Binary { lhs: a, rhs: b, .. } => {
                a.erase_spans();
                b.erase_spans();
            }
            _ => {}
        }
    }
}

impl EraseSpans for Stmt {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            StmtKind::Assign { target, value } => {
                match target {
                    LValue::Var(id) => id.erase_spans(),
                    LValue::Index(id, k) => {
                        id.erase_spans();
                        k.erase_spans();
                    }
                }
                value.erase_spans();
            }
            StmtKind::If { cond, then, otherwise } => {
                cond.erase_spans();
                then.erase_spans();
                if let Some(o) = otherwise {
                    o.erase_spans();
                }
            }
            StmtKind::Require { cond, body } => {
                cond.erase_spans();
                body.erase_spans();
            }
            StmtKind::Seq(stmts) => stmts.iter_mut().for_each(EraseSpans::erase_spans),
            StmtKind::Transfer { to, amount } => {
                to.erase_spans();
                amount.erase_spans();
            }
            StmtKind::Return(e) => e.erase_spans(),
        }
    }
}

impl EraseSpans for Qualifier {
    fn erase_spans(&mut self) {
        if let Qualifier::Returns(items) = self {
            for (_, id) in items {
                if let Some(id) = id {
                    id.erase_spans();
                }
            }
        }
    }
}

impl EraseSpans for ContractAst {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        self.name.erase_spans();
        for v in &mut self.state_vars {
            v.span = Span::default();
            v.name.erase_spans();
            v.qualifiers.iter_mut().for_each(EraseSpans::erase_spans);
            if let Some(init) = &mut v.init {
                init.erase_spans();
            }
        }
        for f in &mut self.functions {
            f.span = Span::default();
            if let Some(n) = &mut f.name {
                n.erase_spans();
            }
            for p in &mut f.params {
                p.span = Span::default();
                p.name.erase_spans();
            }
            f.qualifiers.iter_mut().for_each(EraseSpans::erase_spans);
            f.body.erase_spans();
        }
    }
}

impl ContractAst {
    /// Equality ignoring source positions.
    pub fn structurally_eq(&self, other: &ContractAst) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.erase_spans();
        b.erase_spans();
        a == b
    }
}
