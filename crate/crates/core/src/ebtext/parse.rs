//! Parser for the `.eb` text format, accepting Unicode and ASCII operators.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::eb::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EbTextError {
    #[error("{file}:{line}:{col}: error: {message}")]
    Parse { file: String, line: usize, col: usize, message: String },
    #[error("{file}: error: `{from}` refers to unknown {kind} `{name}`")]
    DanglingReference { file: String, from: String, kind: &'static str, name: String },
    #[error("{file}: error: duplicate component name `{name}`")]
    Duplicate { file: String, name: String },
}

const KEYWORDS: &[&str] = &[
    "context",
    "sets",
    "constants",
    "axioms",
    "end",
    "machine",
    "refines",
    "sees",
    "variables",
    "invariants",
    "events",
    "event",
    "any",
    "where",
    "then",
    "TRUE",
    "FALSE",
    "BOOL",
    "INT",
    "NAT",
    "NAT1",
    "dom",
    "bool",
    "or",
    "not",
    "true",
    "false",
];

/// Whether `name` cannot be used as an identifier in `.eb` text.
pub fn is_reserved(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Label(String),
    Sym(Sym),
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Plus,
    Minus,
    Star,
    Div,
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
    In,
    SubsetEq,
    And,
    Or,
    Not,
    Implies,
    Assign,
    Maplet,
    SetMinus,
    Union,
    Override,
    Cross,
    Arrow,
    Forall,
    Exists,
    Top,
    Bottom,
    Empty,
    Integers,
    Naturals,
    Naturals1,
}

impl Sym {
    fn text(self) -> &'static str {
        match self {
            Sym::LParen => "(",
            Sym::RParen => ")",
            Sym::LBrace => "{",
            Sym::RBrace => "}",
            Sym::Comma => ",",
            Sym::Dot => "·",
            Sym::Plus => "+",
            Sym::Minus => "-",
            Sym::Star => "*",
            Sym::Div => "÷",
            Sym::Eq => "=",
            Sym::Ne => "≠",
            Sym::Le => "≤",
            Sym::Ge => "≥",
            Sym::Lt => "<",
            Sym::Gt => ">",
            Sym::In => "∈",
            Sym::SubsetEq => "⊆",
            Sym::And => "∧",
            Sym::Or => "∨",
            Sym::Not => "¬",
            Sym::Implies => "⇒",
            Sym::Assign => "≔",
            Sym::Maplet => "↦",
            Sym::SetMinus => "∖",
            Sym::Union => "∪",
            Sym::Override => "<+",
            Sym::Cross => "×",
            Sym::Arrow => "→",
            Sym::Forall => "∀",
            Sym::Exists => "∃",
            Sym::Top => "⊤",
            Sym::Bottom => "⊥",
            Sym::Empty => "∅",
            Sym::Integers => "ℤ",
            Sym::Naturals => "ℕ",
            Sym::Naturals1 => "ℕ1",
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

// Longest match first.
const ASCII_SYMS: &[(&str, Sym)] = &[
    ("-->", Sym::Arrow),
    ("|->", Sym::Maplet),
    (":=", Sym::Assign),
    ("<=", Sym::Le),
    (">=", Sym::Ge),
    ("/=", Sym::Ne),
    ("=>", Sym::Implies),
    ("<+", Sym::Override),
    ("<:", Sym::SubsetEq),
    ("\\/", Sym::Union),
    ("**", Sym::Cross),
    ("{}", Sym::Empty),
    ("(", Sym::LParen),
    (")", Sym::RParen),
    ("{", Sym::LBrace),
    ("}", Sym::RBrace),
    (",", Sym::Comma),
    (".", Sym::Dot),
    ("+", Sym::Plus),
    ("-", Sym::Minus),
    ("*", Sym::Star),
    ("/", Sym::Div),
    ("=", Sym::Eq),
    ("<", Sym::Lt),
    (">", Sym::Gt),
    (":", Sym::In),
    ("&", Sym::And),
    ("\\", Sym::SetMinus),
    ("!", Sym::Forall),
    ("#", Sym::Exists),
];

fn unicode_sym(c: char) -> Option<Sym> {
    Some(match c {
        '·' | '•' => Sym::Dot,
        '÷' => Sym::Div,
        '≠' => Sym::Ne,
        '≤' => Sym::Le,
        '≥' => Sym::Ge,
        '∈' => Sym::In,
        '⊆' => Sym::SubsetEq,
        '∧' => Sym::And,
        '∨' => Sym::Or,
        '¬' => Sym::Not,
        '⇒' => Sym::Implies,
        '≔' => Sym::Assign,
        '↦' => Sym::Maplet,
        '∖' => Sym::SetMinus,
        '∪' => Sym::Union,
        '×' => Sym::Cross,
        '→' => Sym::Arrow,
        '∀' => Sym::Forall,
        '∃' => Sym::Exists,
        '⊤' => Sym::Top,
        '⊥' => Sym::Bottom,
        '∅' => Sym::Empty,
        'ℤ' => Sym::Integers,
        'ℕ' => Sym::Naturals,
        '−' => Sym::Minus,
        _ => return None,
    })
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(file: &str, src: &str) -> Result<Vec<Token>, EbTextError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, message: String| EbTextError::Parse { file: file.to_string(), line, col, message };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let tok = if is_ident_start(c) {
            let s: String = chars[i..].iter().take_while(|c| is_ident_char(**c)).collect();
            i += s.len();
            col += s.len();
            match s.as_str() {
                "or" => Tok::Sym(Sym::Or),
                "not" => Tok::Sym(Sym::Not),
                "true" => Tok::Sym(Sym::Top),
                "false" => Tok::Sym(Sym::Bottom),
                "INT" => Tok::Sym(Sym::Integers),
                "NAT" => Tok::Sym(Sym::Naturals),
                "NAT1" => Tok::Sym(Sym::Naturals1),
                _ => Tok::Ident(s),
            }
        } else if c.is_ascii_digit() {
            let s: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
            i += s.len();
            col += s.len();
            Tok::Int(s)
        } else if c == '@' {
            let s: String = chars[i + 1..].iter().take_while(|c| is_ident_char(**c)).collect();
            if s.is_empty() {
                return Err(err(line, col, "expected a label after `@`".into()));
            }
            i += s.len() + 1;
            col += s.len() + 1;
            Tok::Label(s)
        } else if c == 'ℕ' && matches!(chars.get(i + 1), Some('1' | '₁')) {
            i += 2;
            col += 2;
            Tok::Sym(Sym::Naturals1)
        } else if let Some(s) = unicode_sym(c) {
            i += 1;
            col += 1;
            Tok::Sym(s)
        } else if let Some((text, s)) =
            ASCII_SYMS.iter().find(|(t, _)| t.chars().enumerate().all(|(k, tc)| chars.get(i + k) == Some(&tc)))
        {
            i += text.len();
            col += text.len();
            Tok::Sym(*s)
        } else {
            return Err(err(line, col, format!("unexpected character `{c}`")));
        };
        out.push(Token { tok, line: start_line, col: start_col });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

enum Component {
    Context(Context),
    Machine(Machine),
}

struct Parser<'a> {
    file: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

type R<T> = Result<T, EbTextError>;

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(s) => format!("`{s}`"),
        Tok::Label(s) => format!("`@{s}`"),
        Tok::Sym(s) => format!("`{}`", s.text()),
        Tok::Eof => "end of input".into(),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> EbTextError {
        let t = &self.toks[self.pos];
        EbTextError::Parse {
            file: self.file.to_string(),
            line: t.line,
            col: t.col,
            message: format!("expected {expected}, found {}", describe(&t.tok)),
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> R<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    fn is_sym(&self, s: Sym) -> bool {
        self.peek() == &Tok::Sym(s)
    }

    fn eat_sym(&mut self, s: Sym) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: Sym) -> R<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&format!("`{}`", s.text())))
        }
    }

    fn is_ident(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if !is_reserved(s))
    }

    fn ident(&mut self) -> R<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn idents(&mut self) -> R<Vec<String>> {
        let mut out = vec![self.ident()?];
        while self.is_ident() {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn labelled_preds(&mut self) -> R<Vec<LabeledPred>> {
        let mut out = Vec::new();
        while let Tok::Label(l) = self.peek().clone() {
            self.bump();
            out.push(LabeledPred::new(l, self.pred()?));
        }
        if out.is_empty() {
            return Err(self.error("a labelled predicate"));
        }
        Ok(out)
    }

    fn component(&mut self) -> R<Component> {
        let c = if self.eat_kw("context") {
            Component::Context(self.context()?)
        } else if self.eat_kw("machine") {
            Component::Machine(self.machine()?)
        } else {
            return Err(self.error("`context` or `machine`"));
        };
        if self.peek() != &Tok::Eof {
            return Err(self.error("end of input (one component per file)"));
        }
        Ok(c)
    }

    fn context(&mut self) -> R<Context> {
        let name = self.ident()?;
        let sets = if self.eat_kw("sets") { self.idents()? } else { Vec::new() };
        let constants = if self.eat_kw("constants") { self.idents()? } else { Vec::new() };
        let axioms = if self.eat_kw("axioms") { self.labelled_preds()? } else { Vec::new() };
        self.expect_kw("end")?;
        Ok(Context { name, sets, constants, axioms })
    }

    fn machine(&mut self) -> R<Machine> {
        let name = self.ident()?;
        let refines = if self.eat_kw("refines") { Some(self.ident()?) } else { None };
        self.expect_kw("sees")?;
        let sees = self.ident()?;
        let variables = if self.eat_kw("variables") { self.idents()? } else { Vec::new() };
        let invariants = if self.eat_kw("invariants") { self.labelled_preds()? } else { Vec::new() };
        self.expect_kw("events")?;
        let mut events = Vec::new();
        while self.eat_kw("event") {
            events.push(self.event()?);
        }
        if events.is_empty() {
            return Err(self.error("`event`"));
        }
        self.expect_kw("end")?;
        Ok(Machine { name, refines, sees, variables, invariants, events })
    }

    fn event(&mut self) -> R<Event> {
        let name = match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) || s == INITIALISATION => {
                self.bump();
                s
            }
            _ => return Err(self.error("an event name")),
        };
        let mut ev = Event::new(name);
        if self.eat_kw("refines") {
            ev.refines = Some(self.ident()?);
        }
        if self.eat_kw("any") {
            ev.params = self.idents()?;
        }
        if self.eat_kw("where") {
            ev.guards = self.labelled_preds()?;
        }
        if self.eat_kw("then") {
            while let Tok::Label(l) = self.peek().clone() {
                self.bump();
                let target = self.ident()?;
                // `=` in action position is read as assignment.
                if !self.eat_sym(Sym::Assign) && !self.eat_sym(Sym::Eq) {
                    return Err(self.error("`≔`"));
                }
                ev.actions.push(Action::new(l, target, self.expr()?));
            }
            if ev.actions.is_empty() {
                return Err(self.error("a labelled action"));
            }
        }
        self.expect_kw("end")?;
        Ok(ev)
    }

    fn pred(&mut self) -> R<Pred> {
        if self.is_sym(Sym::Forall) || self.is_sym(Sym::Exists) {
            let universal = self.bump() == Tok::Sym(Sym::Forall);
            let mut vs = vec![BoundVar::new(self.ident()?)];
            while self.eat_sym(Sym::Comma) {
                vs.push(BoundVar::new(self.ident()?));
            }
            self.expect_sym(Sym::Dot)?;
            let body = Box::new(self.pred()?);
            return Ok(if universal { Pred::Forall(vs, body) } else { Pred::Exists(vs, body) });
        }
        let lhs = self.junction()?;
        if self.eat_sym(Sym::Implies) {
            let rhs = self.junction()?;
            if self.is_sym(Sym::Implies) {
                return Err(self.error("parentheses around a nested `⇒`"));
            }
            return Ok(Pred::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn junction(&mut self) -> R<Pred> {
        let mut lhs = self.unary_pred()?;
        let mut op: Option<Sym> = None;
        while self.is_sym(Sym::And) || self.is_sym(Sym::Or) {
            let Tok::Sym(s) = self.peek().clone() else { unreachable!() };
            if op.is_some_and(|o| o != s) {
                return Err(self.error("parentheses when mixing `∧` and `∨`"));
            }
            op = Some(s);
            self.bump();
            let rhs = self.unary_pred()?;
            lhs = if s == Sym::And { Pred::and(lhs, rhs) } else { Pred::or(lhs, rhs) };
        }
        Ok(lhs)
    }

    fn unary_pred(&mut self) -> R<Pred> {
        if self.eat_sym(Sym::Not) {
            return Ok(Pred::negate(self.unary_pred()?));
        }
        if self.eat_sym(Sym::Top) {
            return Ok(Pred::True);
        }
        if self.eat_sym(Sym::Bottom) {
            return Ok(Pred::False);
        }
        if self.is_sym(Sym::Forall) || self.is_sym(Sym::Exists) {
            return Err(self.error("parentheses around a quantified operand"));
        }
        if self.is_sym(Sym::LParen) {
            // Either a parenthesised predicate or a comparison whose left
            // operand starts with `(`.
            let save = self.pos;
            match self.relation() {
                Ok(p) => return Ok(p),
                Err(first) => {
                    self.pos = save;
                    self.bump();
                    match self.pred() {
                        Ok(p) if self.is_sym(Sym::RParen) => {
                            self.bump();
                            return Ok(p);
                        }
                        _ => return Err(first),
                    }
                }
            }
        }
        self.relation()
    }

    fn relation(&mut self) -> R<Pred> {
        let a = self.expr()?;
        let Tok::Sym(s) = self.peek().clone() else { return Err(self.error("a relational operator")) };
        let mk: fn(Expr, Expr) -> Pred = match s {
            Sym::Eq => |a, b| Pred::Cmp(CmpOp::Eq, a, b),
            Sym::Ne => |a, b| Pred::Cmp(CmpOp::Ne, a, b),
            Sym::Le => |a, b| Pred::Cmp(CmpOp::Le, a, b),
            Sym::Ge => |a, b| Pred::Cmp(CmpOp::Ge, a, b),
            Sym::Lt => |a, b| Pred::Cmp(CmpOp::Lt, a, b),
            Sym::Gt => |a, b| Pred::Cmp(CmpOp::Gt, a, b),
            Sym::In => Pred::Member,
            Sym::SubsetEq => Pred::Subset,
            _ => return Err(self.error("a relational operator")),
        };
        self.bump();
        let b = self.expr()?;
        Ok(mk(a, b))
    }

    fn expr(&mut self) -> R<Expr> {
        let a = self.set_expr()?;
        if self.eat_sym(Sym::Arrow) {
            let b = self.set_expr()?;
            if self.is_sym(Sym::Arrow) {
                return Err(self.error("parentheses around a nested `→`"));
            }
            return Ok(Expr::total_fn(a, b));
        }
        Ok(a)
    }

    fn set_expr(&mut self) -> R<Expr> {
        let mut lhs = self.additive()?;
        let mut seen: Option<SetOp> = None;
        loop {
            let op = match self.peek() {
                Tok::Sym(Sym::Union) => SetOp::Union,
                Tok::Sym(Sym::SetMinus) => SetOp::Minus,
                Tok::Sym(Sym::Override) => SetOp::Override,
                Tok::Sym(Sym::Cross) => SetOp::Cartesian,
                _ => return Ok(lhs),
            };
            if seen.is_some_and(|s| s != op) {
                return Err(self.error("parentheses when mixing set operators"));
            }
            seen = Some(op);
            self.bump();
            let rhs = self.additive()?;
            lhs = Expr::set_op(op, lhs, rhs);
        }
    }

    fn additive(&mut self) -> R<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Sym(Sym::Plus) => ArithOp::Add,
                Tok::Sym(Sym::Minus) => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr::arith(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> R<Expr> {
        let mut lhs = self.postfix()?;
        loop {
            let op = match self.peek() {
                Tok::Sym(Sym::Star) => ArithOp::Mul,
                Tok::Sym(Sym::Div) => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.postfix()?;
            lhs = Expr::arith(op, lhs, rhs);
        }
    }

    fn postfix(&mut self) -> R<Expr> {
        let mut e = self.primary()?;
        while self.eat_sym(Sym::LParen) {
            let arg = self.expr()?;
            self.expect_sym(Sym::RParen)?;
            e = match e {
                Expr::FunLit(ps) if ps.len() == 2 && ps[0].0 == Expr::Bool(true) && ps[1].0 == Expr::Bool(false) => {
                    let mut it = ps.into_iter();
                    let (_, t) = it.next().unwrap();
                    let (_, f) = it.next().unwrap();
                    Expr::cond_map(t, f, arg)
                }
                f => Expr::apply(f, arg),
            };
        }
        Ok(e)
    }

    fn int_literal(&mut self, negative: bool) -> R<Expr> {
        let Tok::Int(digits) = self.peek().clone() else { return Err(self.error("an integer literal")) };
        let text = if negative { format!("-{digits}") } else { digits };
        let n = text.parse::<i128>().map_err(|_| self.error("an integer literal in range"))?;
        self.bump();
        Ok(Expr::Int(n))
    }

    fn primary(&mut self) -> R<Expr> {
        match self.peek().clone() {
            Tok::Int(_) => self.int_literal(false),
            Tok::Sym(Sym::Minus) if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                self.int_literal(true)
            }
            Tok::Ident(s) => match s.as_str() {
                "TRUE" => {
                    self.bump();
                    Ok(Expr::Bool(true))
                }
                "FALSE" => {
                    self.bump();
                    Ok(Expr::Bool(false))
                }
                "BOOL" => {
                    self.bump();
                    Ok(Expr::BoolSet)
                }
                "dom" => {
                    self.bump();
                    self.expect_sym(Sym::LParen)?;
                    let e = self.expr()?;
                    self.expect_sym(Sym::RParen)?;
                    Ok(Expr::Dom(Box::new(e)))
                }
                "bool" => {
                    self.bump();
                    self.expect_sym(Sym::LParen)?;
                    let p = self.pred()?;
                    self.expect_sym(Sym::RParen)?;
                    Ok(Expr::bool_of(p))
                }
                _ => Ok(Expr::Name(self.ident()?)),
            },
            Tok::Sym(Sym::Integers) => {
                self.bump();
                Ok(Expr::Integers)
            }
            Tok::Sym(Sym::Naturals) => {
                self.bump();
                Ok(Expr::Naturals)
            }
            Tok::Sym(Sym::Naturals1) => {
                self.bump();
                Ok(Expr::Naturals1)
            }
            Tok::Sym(Sym::Empty) => {
                self.bump();
                Ok(Expr::SetLit(Vec::new()))
            }
            Tok::Sym(Sym::LParen) => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(Sym::RParen)?;
                Ok(e)
            }
            Tok::Sym(Sym::LBrace) => {
                self.bump();
                let first = self.expr()?;
                if self.eat_sym(Sym::Maplet) {
                    let mut ps = vec![(first, self.expr()?)];
                    while self.eat_sym(Sym::Comma) {
                        let k = self.expr()?;
                        self.expect_sym(Sym::Maplet)?;
                        ps.push((k, self.expr()?));
                    }
                    self.expect_sym(Sym::RBrace)?;
                    Ok(Expr::FunLit(ps))
                } else {
                    let mut es = vec![first];
                    while self.eat_sym(Sym::Comma) {
                        es.push(self.expr()?);
                    }
                    self.expect_sym(Sym::RBrace)?;
                    Ok(Expr::SetLit(es))
                }
            }
            _ => Err(self.error("an expression")),
        }
    }
}

fn parse_component(file: &str, text: &str) -> R<Component> {
    let toks = lex(file, text)?;
    Parser { file, toks, pos: 0 }.component()
}

pub fn parse_context(file: &str, text: &str) -> R<Context> {
    match parse_component(file, text)? {
        Component::Context(c) => Ok(c),
        Component::Machine(_) => {
            Err(EbTextError::Parse { file: file.into(), line: 1, col: 1, message: "expected a context, found a machine".into() })
        }
    }
}

pub fn parse_machine(file: &str, text: &str) -> R<Machine> {
    match parse_component(file, text)? {
        Component::Machine(m) => Ok(m),
        Component::Context(_) => {
            Err(EbTextError::Parse { file: file.into(), line: 1, col: 1, message: "expected a machine, found a context".into() })
        }
    }
}

/// Parses one component per `(file name, text)` pair and resolves `sees`
/// and `refines` references across them.
pub fn parse_project(name: &str, files: &[(String, String)]) -> R<Project> {
    let mut project = Project { name: name.to_string(), contexts: Vec::new(), machines: Vec::new() };
    let mut origin = Vec::new();
    let mut names = BTreeSet::new();
    for (file, text) in files {
        let (cname, comp) = match parse_component(file, text)? {
            Component::Context(c) => (c.name.clone(), Component::Context(c)),
            Component::Machine(m) => (m.name.clone(), Component::Machine(m)),
        };
        if !names.insert(cname.clone()) {
            return Err(EbTextError::Duplicate { file: file.clone(), name: cname });
        }
        match comp {
            Component::Context(c) => project.contexts.push(c),
            Component::Machine(m) => {
                origin.push(file.clone());
                project.machines.push(m);
            }
        }
    }
    for (m, file) in project.machines.iter().zip(&origin) {
        if project.context(&m.sees).is_none() {
            return Err(EbTextError::DanglingReference {
                file: file.clone(),
                from: m.name.clone(),
                kind: "context",
                name: m.sees.clone(),
            });
        }
        if let Some(r) = &m.refines {
            let Some(abs) = project.machine(r) else {
                return Err(EbTextError::DanglingReference {
                    file: file.clone(),
                    from: m.name.clone(),
                    kind: "machine",
                    name: r.clone(),
                });
            };
            for e in &m.events {
                if let Some(er) = &e.refines {
                    if abs.event(er).is_none() {
                        return Err(EbTextError::DanglingReference {
                            file: file.clone(),
                            from: format!("{}.{}", m.name, e.name),
                            kind: "event",
                            name: er.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(project)
}

/// Parses a single formula, for tests and tooling.
pub fn parse_pred(text: &str) -> R<Pred> {
    let toks = lex("<formula>", text)?;
    let mut p = Parser { file: "<formula>", toks, pos: 0 };
    let out = p.pred()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error("end of formula"));
    }
    Ok(out)
}

pub fn parse_expr(text: &str) -> R<Expr> {
    let toks = lex("<formula>", text)?;
    let mut p = Parser { file: "<formula>", toks, pos: 0 };
    let out = p.expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error("end of expression"));
    }
    Ok(out)
}
