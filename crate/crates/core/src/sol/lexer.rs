use super::ast::Span;
use super::error::SolError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i128),
    Hex(String),
    /// Raw text between `pragma` and the terminating `;`.
    PragmaBody(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Assign,
    ColonAssign,
    EqEq,
    NotEq,
    Le,
    Ge,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
    Slash,
    Bang,
    AndAnd,
    OrOr,
    FatArrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Hex(h) => format!("`0x{h}`"),
            Tok::PragmaBody(_) => "pragma text".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Assign => "=",
            Tok::ColonAssign => ":=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Bang => "!",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::FatArrow => "=>",
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<u8> {
        self.src.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Span {
        Span { start: self.pos, end: self.pos, line: self.line, col: self.col }
    }

    fn close(&self, mut start: Span) -> Span {
        start.end = self.pos;
        start
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SolError> {
    let mut cur = Cursor { src: src.as_bytes(), pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        skip_trivia(&mut cur)?;
        let start = cur.mark();
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, span: start });
            return Ok(out);
        };
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            let mut s = String::new();
            while let Some(c) = cur.peek().filter(|c| c.is_ascii_alphanumeric() || *c == b'_') {
                s.push(c as char);
                cur.bump();
            }
            if s == "pragma" {
                out.push(Token { tok: Tok::Ident(s), span: cur.close(start) });
                skip_trivia(&mut cur)?;
                let body_start = cur.mark();
                let mut body = String::new();
                while let Some(c) = cur.peek().filter(|c| *c != b';') {
                    body.push(c as char);
                    cur.bump();
                }
                out.push(Token { tok: Tok::PragmaBody(body.trim().to_string()), span: cur.close(body_start) });
                continue;
            }
            Tok::Ident(s)
        } else if c == b'0' && matches!(cur.peek_at(1), Some(b'x' | b'X')) {
            cur.bump();
            cur.bump();
            let mut s = String::new();
            while let Some(c) = cur.peek().filter(u8::is_ascii_hexdigit) {
                s.push(c.to_ascii_lowercase() as char);
                cur.bump();
            }
            if s.is_empty() {
                return Err(SolError::Lex { span: cur.close(start), message: "hex literal without digits".into() });
            }
            Tok::Hex(s)
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(c) = cur.peek().filter(u8::is_ascii_digit) {
                s.push(c as char);
                cur.bump();
            }
            let value = s
                .parse::<i128>()
                .map_err(|_| SolError::Lex { span: cur.close(start), message: format!("integer literal `{s}` is too large") })?;
            Tok::Int(value)
        } else {
            cur.bump();
            let next = cur.peek();
            let two = |cur: &mut Cursor<'_>, t: Tok| {
                cur.bump();
                t
            };
            match (c, next) {
                (b'=', Some(b'=')) => two(&mut cur, Tok::EqEq),
                (b'=', Some(b'>')) => two(&mut cur, Tok::FatArrow),
                (b'!', Some(b'=')) => two(&mut cur, Tok::NotEq),
                (b'<', Some(b'=')) => two(&mut cur, Tok::Le),
                (b'>', Some(b'=')) => two(&mut cur, Tok::Ge),
                (b'&', Some(b'&')) => two(&mut cur, Tok::AndAnd),
                (b'|', Some(b'|')) => two(&mut cur, Tok::OrOr),
                (b':', Some(b'=')) => two(&mut cur, Tok::ColonAssign),
                (b'{', _) => Tok::LBrace,
                (b'}', _) => Tok::RBrace,
                (b'(', _) => Tok::LParen,
                (b')', _) => Tok::RParen,
                (b'[', _) => Tok::LBracket,
                (b']', _) => Tok::RBracket,
                (b';', _) => Tok::Semi,
                (b',', _) => Tok::Comma,
                (b'.', _) => Tok::Dot,
                (b'=', _) => Tok::Assign,
                (b'<', _) => Tok::Lt,
                (b'>', _) => Tok::Gt,
                (b'+', _) => Tok::Plus,
                (b'-', _) => Tok::Minus,
                (b'*', _) => Tok::Star,
                (b'/', _) => Tok::Slash,
                (b'!', _) => Tok::Bang,
                _ => {
                    let shown = if c.is_ascii() && !c.is_ascii_control() {
                        format!("`{}`", c as char)
                    } else {
                        format!("byte 0x{c:02x}")
                    };
                    return Err(SolError::Lex { span: cur.close(start), message: format!("unexpected character {shown}") });
                }
            }
        };
        out.push(Token { tok, span: cur.close(start) });
    }
}

fn skip_trivia(cur: &mut Cursor<'_>) -> Result<(), SolError> {
    loop {
        match (cur.peek(), cur.peek_at(1)) {
            (Some(c), _) if c.is_ascii_whitespace() => {
                cur.bump();
            }
            (Some(b'/'), Some(b'/')) => {
                while cur.peek().is_some_and(|c| c != b'\n') {
                    cur.bump();
                }
            }
            (Some(b'/'), Some(b'*')) => {
                let start = cur.mark();
                cur.bump();
                cur.bump();
                loop {
                    match (cur.peek(), cur.peek_at(1)) {
                        (Some(b'*'), Some(b'/')) => {
                            cur.bump();
                            cur.bump();
                            break;
                        }
                        (Some(_), _) => {
                            cur.bump();
                        }
                        (None, _) => {
                            return Err(SolError::Lex { span: cur.close(start), message: "unterminated block comment".into() })
                        }
                    }
                }
            }
            _ => return Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            toks("a>=1 // hi\n/* x */ b!=c&&!d"),
            vec![
                Tok::Ident("a".into()),
                Tok::Ge,
                Tok::Int(1),
                Tok::Ident("b".into()),
                Tok::NotEq,
                Tok::Ident("c".into()),
                Tok::AndAnd,
                Tok::Bang,
                Tok::Ident("d".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn pragma_body_is_raw() {
        assert_eq!(
            toks("pragma solidity ^0.4.17;"),
            vec![Tok::Ident("pragma".into()), Tok::PragmaBody("solidity ^0.4.17".into()), Tok::Semi, Tok::Eof]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize("a\n  bc").unwrap();
        assert_eq!((t[1].span.line, t[1].span.col), (2, 3));
        assert_eq!(&"a\n  bc"[t[1].span.start..t[1].span.end], "bc");
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("a # b").unwrap_err();
        assert!(matches!(err, SolError::Lex { span, .. } if span.col == 3));
        assert!(tokenize("/* open").is_err());
    }
}
