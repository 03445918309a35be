//! Recursive-descent parser for the Solidity subset.

use super::ast::*;
use super::error::SolError;
use super::lexer::{tokenize, Tok, Token};

/// Parses the first (and only) contract declaration in `source`.
pub fn parse_contract(source: &str) -> Result<ContractAst, SolError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0 };
    p.contract()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

const LOOP_KEYWORDS: &[&str] = &["while", "for", "do"];
const QUALIFIERS: &[&str] = &["public", "private", "internal", "external", "payable", "constant", "view", "pure", "returns"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, SolError> {
        Err(SolError::Parse {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn is_ident(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, shown: &str) -> Result<Span, SolError> {
        if self.peek() == &tok {
            Ok(self.bump().span)
        } else {
            self.error(&[shown])
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Span, SolError> {
        if self.is_ident(kw) {
            Ok(self.bump().span)
        } else {
            self.error(&[&format!("`{kw}`")])
        }
    }

    fn ident(&mut self) -> Result<Ident, SolError> {
        match self.peek().clone() {
            Tok::Ident(name) if !is_reserved(&name) => {
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn contract(&mut self) -> Result<ContractAst, SolError> {
        let mut pragma = None;
        if self.is_ident("pragma") {
            self.bump();
            if let Tok::PragmaBody(body) = self.peek().clone() {
                self.bump();
                pragma = Some(body.strip_prefix("solidity").map_or(body.clone(), |v| v.trim().to_string()));
            }
            self.expect(Tok::Semi, "`;`")?;
        }
        if self.peek() == &Tok::Eof {
            return Err(SolError::NoContract { span: self.span() });
        }
        let start = self.expect_keyword("contract")?;
        let name = self.ident()?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut state_vars = Vec::new();
        let mut functions = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => break,
                Tok::Ident(s) if s == "function" => functions.push(self.function()?),
                Tok::Ident(s) if is_type_start(s) => state_vars.push(self.state_var()?),
                _ => return self.error(&["`function`", "type", "`}`"]),
            }
        }
        let end = self.expect(Tok::RBrace, "`}`")?;
        if self.is_ident("contract") {
            let span = self.bump().span;
            let name = match self.peek() {
                Tok::Ident(s) => s.clone(),
                _ => String::new(),
            };
            return Err(SolError::MultipleContracts { span, name });
        }
        if self.peek() != &Tok::Eof {
            return self.error(&["end of input"]);
        }
        Ok(ContractAst { name, pragma, state_vars, functions, span: start.to(end) })
    }

    fn ty(&mut self) -> Result<SubsetType, SolError> {
        let Tok::Ident(word) = self.peek().clone() else {
            return self.error(&["type"]);
        };
        let ty = match word.as_str() {
            "bool" => SubsetType::Bool,
            "address" => SubsetType::Address,
            "integer" => SubsetType::Integer,
            "bytes" => SubsetType::Bytes(None),
            "mapping" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let k = self.ty()?;
                self.expect(Tok::FatArrow, "`=>`")?;
                let v = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(SubsetType::Mapping(Box::new(k), Box::new(v)));
            }
            w if int_width(w).is_some() => SubsetType::Integer,
            w => match w.strip_prefix("bytes").and_then(|n| n.parse::<u8>().ok()) {
                Some(n) if (1..=32).contains(&n) => SubsetType::Bytes(Some(n)),
                _ => return self.error(&["type"]),
            },
        };
        self.bump();
        Ok(ty)
    }

    fn state_var(&mut self) -> Result<StateVarDecl, SolError> {
        let start = self.span();
        let ty = self.ty()?;
        let mut qualifiers = Vec::new();
        loop {
            let q = match self.peek() {
                Tok::Ident(s) if s == "public" => Qualifier::Public,
                Tok::Ident(s) if s == "private" => Qualifier::Private,
                Tok::Ident(s) if s == "internal" => Qualifier::Internal,
                Tok::Ident(s) if s == "constant" => Qualifier::Constant,
                _ => break,
            };
            self.bump();
            qualifiers.push(q);
        }
        let name = self.ident()?;
        let init = if self.eat(&Tok::Assign) { Some(self.expr()?) } else { None };
        let end = self.expect(Tok::Semi, "`;`")?;
        Ok(StateVarDecl { name, ty, qualifiers, init, span: start.to(end) })
    }

    fn function(&mut self) -> Result<FunctionDecl, SolError> {
        let start = self.expect_keyword("function")?;
        let name = match self.peek() {
            Tok::Ident(_) => Some(self.ident()?),
            _ => None,
        };
        self.expect(Tok::LParen, "`(`")?;
        let mut params = Vec::new();
        if self.peek() != &Tok::RParen {
            loop {
                let pstart = self.span();
                let ty = self.ty()?;
                let name = self.ident()?;
                params.push(Param { span: pstart.to(name.span), name, ty });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        let mut qualifiers = Vec::new();
        while let Tok::Ident(s) = self.peek().clone() {
            let q = match s.as_str() {
                "public" => Qualifier::Public,
                "private" => Qualifier::Private,
                "internal" => Qualifier::Internal,
                "external" => Qualifier::External,
                "payable" => Qualifier::Payable,
                "constant" => Qualifier::Constant,
                "view" => Qualifier::View,
                "pure" => Qualifier::Pure,
                "returns" => {
                    self.bump();
                    self.expect(Tok::LParen, "`(`")?;
                    let mut items = Vec::new();
                    loop {
                        let ty = self.ty()?;
                        let name = match self.peek() {
                            Tok::Ident(_) => Some(self.ident()?),
                            _ => None,
                        };
                        items.push((ty, name));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    qualifiers.push(Qualifier::Returns(items));
                    continue;
                }
                _ => {
                    let mut expected: Vec<String> = QUALIFIERS.iter().map(|q| format!("`{q}`")).collect();
                    expected.push("`{`".into());
                    return Err(SolError::Parse { span: self.span(), expected, found: self.peek().describe() });
                }
            };
            self.bump();
            qualifiers.push(q);
        }
        let body = self.block()?;
        let span = start.to(body.span);
        Ok(FunctionDecl { name, params, qualifiers, body, span })
    }

    fn block(&mut self) -> Result<Stmt, SolError> {
        let start = self.expect(Tok::LBrace, "`{`")?;
        let stmts = self.stmt_list()?;
        let end = self.expect(Tok::RBrace, "`}`")?;
        Ok(Stmt { kind: StmtKind::Seq(stmts), span: start.to(end) })
    }

    /// Statements up to the closing brace; `require(b);` swallows the rest.
    fn stmt_list(&mut self) -> Result<Vec<Stmt>, SolError> {
        let mut stmts = Vec::new();
        while self.peek() != &Tok::RBrace {
            if self.is_ident("require") {
                let start = self.bump().span;
                self.expect(Tok::LParen, "`(`")?;
                let cond = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let semi = self.expect(Tok::Semi, "`;`")?;
                let rest = self.stmt_list()?;
                let body_span = match (rest.first(), rest.last()) {
                    (Some(a), Some(b)) => a.span.to(b.span),
                    _ => Span { start: semi.end, end: semi.end, line: semi.line, col: semi.col + 1 },
                };
                let body = Stmt { kind: StmtKind::Seq(rest), span: body_span };
                let span = start.to(body_span.max_end(semi));
                stmts.push(Stmt { kind: StmtKind::Require { cond, body: Box::new(body) }, span });
                break;
            }
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, SolError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::LBrace => self.block(),
            Tok::Ident(kw) if kw == "if" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let cond = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let then = Box::new(self.stmt()?);
                let otherwise = if self.is_ident("else") {
                    self.bump();
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                let end = otherwise.as_ref().map_or(then.span, |o| o.span);
                Ok(Stmt { kind: StmtKind::If { cond, then, otherwise }, span: start.to(end) })
            }
            Tok::Ident(kw) if kw == "return" => {
                self.bump();
                let e = self.expr()?;
                let end = self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt { kind: StmtKind::Return(e), span: start.to(end) })
            }
            Tok::Ident(kw) if LOOP_KEYWORDS.contains(&kw.as_str()) => Err(SolError::Parse {
                span: start,
                expected: vec!["statement".into()],
                found: format!("`{kw}` (loops are not part of the supported subset)"),
            }),
            Tok::Ident(_) | Tok::Hex(_) => {
                let lhs = self.postfix()?;
                if self.peek() == &Tok::Dot && matches!(self.peek_at(1), Tok::Ident(s) if s == "transfer") {
                    self.bump();
                    self.bump();
                    self.expect(Tok::LParen, "`(`")?;
                    let amount = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    let end = self.expect(Tok::Semi, "`;`")?;
                    return Ok(Stmt { kind: StmtKind::Transfer { to: lhs, amount }, span: start.to(end) });
                }
                if !(self.eat(&Tok::Assign) || self.eat(&Tok::ColonAssign)) {
                    return self.error(&["`=`", "`.transfer`"]);
                }
                let target = match lhs.kind {
                    ExprKind::Var(name) => LValue::Var(Ident { name, span: lhs.span }),
                    ExprKind::Index(base, key) => match base.kind {
                        ExprKind::Var(name) => LValue::Index(Ident { name, span: base.span }, *key),
                        _ => {
                            return Err(SolError::Unsupported {
                                span: base.span,
                                message: "only named mappings can be indexed on the left of `=`".into(),
                            })
                        }
                    },
                    _ => {
                        return Err(SolError::Unsupported {
                            span: lhs.span,
                            message: "assignment target must be a variable or mapping entry".into(),
                        })
                    }
                };
                let value = self.expr()?;
                let end = self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt { kind: StmtKind::Assign { target, value }, span: start.to(end) })
            }
            _ => self.error(&["statement"]),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, SolError> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Le => BinOp::Le,
            Tok::Ge => BinOp::Ge,
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::AndAnd => BinOp::And,
            Tok::OrOr => BinOp::Or,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, SolError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop().filter(|op| op.precedence() >= min_prec) {
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SolError> {
        if self.peek() == &Tok::Bang {
            let start = self.bump().span;
            let inner = self.unary()?;
            let span = start.to(inner.span);
            return Ok(Expr { kind: ExprKind::Not(Box::new(inner)), span });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, SolError> {
        let mut e = self.primary()?;
        loop {
            match self.peek() {
                Tok::LBracket => {
                    self.bump();
                    let key = self.expr()?;
                    let end = self.expect(Tok::RBracket, "`]`")?;
                    let span = e.span.to(end);
                    e = Expr { kind: ExprKind::Index(Box::new(e), Box::new(key)), span };
                }
                Tok::Dot => {
                    let member = match self.peek_at(1) {
                        Tok::Ident(s) => s.clone(),
                        _ => {
                            self.bump();
                            return self.error(&["member name"]);
                        }
                    };
                    match member.as_str() {
                        "transfer" => break,
                        "balance" => {
                            self.bump();
                            let end = self.bump().span;
                            let span = e.span.to(end);
                            e = if e.kind == ExprKind::This {
                                Expr { kind: ExprKind::ThisBalance, span }
                            } else {
                                Expr { kind: ExprKind::BalanceOf(Box::new(e)), span }
                            };
                        }
                        _ => {
                            self.bump();
                            return Err(SolError::Unsupported {
                                span: self.span(),
                                message: format!("member `.{member}` is not part of the supported subset"),
                            });
                        }
                    }
                }
                _ => break,
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, SolError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(value) => {
                self.bump();
                let unit = match self.peek() {
                    Tok::Ident(s) => EtherUnit::from_keyword(s),
                    _ => None,
                };
                let span = if unit.is_some() { start.to(self.bump().span) } else { start };
                Ok(Expr { kind: ExprKind::Int { value, unit }, span })
            }
            Tok::Hex(h) => {
                self.bump();
                let kind = if h.len() == 40 { ExprKind::AddrLit(h) } else { ExprKind::ByteLit(h) };
                Ok(Expr { kind, span: start })
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(word) => match word.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr { kind: ExprKind::Bool(word == "true"), span: start })
                }
                "this" => {
                    self.bump();
                    Ok(Expr { kind: ExprKind::This, span: start })
                }
                "msg" => {
                    self.bump();
                    self.expect(Tok::Dot, "`.`")?;
                    let kind = match self.peek() {
                        Tok::Ident(s) if s == "sender" => ExprKind::MsgSender,
                        Tok::Ident(s) if s == "value" => ExprKind::MsgValue,
                        _ => return self.error(&["`sender`", "`value`"]),
                    };
                    let end = self.bump().span;
                    Ok(Expr { kind, span: start.to(end) })
                }
                "sha3" | "keccak256" => {
                    self.bump();
                    self.expect(Tok::LParen, "`(`")?;
                    let inner = self.expr()?;
                    let end = self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr { kind: ExprKind::Sha3(Box::new(inner)), span: start.to(end) })
                }
                _ => {
                    let id = self.ident()?;
                    Ok(Expr { kind: ExprKind::Var(id.name), span: id.span })
                }
            },
            _ => self.error(&["expression"]),
        }
    }
}

trait MaxEnd {
    fn max_end(self, other: Span) -> Span;
}

impl MaxEnd for Span {
    fn max_end(self, other: Span) -> Span {
        if other.end > self.end {
            Span { end: other.end, ..self }
        } else {
            self
        }
    }
}

fn int_width(word: &str) -> Option<u16> {
    let digits = word.strip_prefix("uint").or_else(|| word.strip_prefix("int"))?;
    if digits.is_empty() {
        return Some(256);
    }
    let n: u16 = digits.parse().ok()?;
    (n.is_multiple_of(8) && (8..=256).contains(&n)).then_some(n)
}

fn is_type_start(word: &str) -> bool {
    matches!(word, "bool" | "address" | "integer" | "bytes" | "mapping")
        || int_width(word).is_some()
        || word.strip_prefix("bytes").and_then(|n| n.parse::<u8>().ok()).is_some_and(|n| (1..=32).contains(&n))
}

pub(crate) fn is_reserved(word: &str) -> bool {
    is_type_start(word)
        || LOOP_KEYWORDS.contains(&word)
        || QUALIFIERS.contains(&word)
        || EtherUnit::from_keyword(word).is_some()
        || matches!(
            word,
            "contract"
                | "function"
                | "if"
                | "else"
                | "require"
                | "return"
                | "true"
                | "false"
                | "this"
                | "msg"
                | "sha3"
                | "keccak256"
                | "pragma"
        )
}
