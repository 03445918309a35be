//! Source printer for the subset. Used by round-trip tests.

use std::fmt::Write;

use super::ast::*;

pub fn print_contract(c: &ContractAst) -> String {
    let mut out = String::new();
    if let Some(p) = &c.pragma {
        let _ = writeln!(out, "pragma solidity {p};");
    }
    let _ = writeln!(out, "contract {} {{", c.name.name);
    for v in &c.state_vars {
        let _ = write!(out, "    {}", v.ty);
        for q in &v.qualifiers {
            let _ = write!(out, " {}", q.keyword());
        }
        let _ = write!(out, " {}", v.name.name);
        if let Some(init) = &v.init {
            let _ = write!(out, " = {}", print_expr(init));
        }
        out.push_str(";\n");
    }
    for f in &c.functions {
        out.push_str("    function");
        if let Some(n) = &f.name {
            let _ = write!(out, " {}", n.name);
        }
        let params: Vec<String> = f.params.iter().map(|p| format!("{} {}", p.ty, p.name.name)).collect();
        let _ = write!(out, "({})", params.join(", "));
        for q in &f.qualifiers {
            match q {
                Qualifier::Returns(items) => {
                    let items: Vec<String> = items
                        .iter()
                        .map(|(t, n)| match n {
                            Some(n) => format!("{t} {}", n.name),
                            None => t.to_string(),
                        })
                        .collect();
                    let _ = write!(out, " returns ({})", items.join(", "));
                }
                q => {
                    let _ = write!(out, " {}", q.keyword());
                }
            }
        }
        out.push(' ');
        print_block(&f.body, 1, &mut out);
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn print_block(s: &Stmt, level: usize, out: &mut String) {
    out.push_str("{\n");
    if let StmtKind::Seq(stmts) = &s.kind {
        for st in stmts {
            print_stmt(st, level + 1, out);
        }
    } else {
        print_stmt(s, level + 1, out);
    }
    indent(level, out);
    out.push('}');
}

fn print_stmt(s: &Stmt, level: usize, out: &mut String) {
    match &s.kind {
        StmtKind::Seq(_) => {
            indent(level, out);
            print_block(s, level, out);
            out.push('\n');
        }
        StmtKind::Require { cond, body } => {
            indent(level, out);
            let _ = writeln!(out, "require({});", print_expr(cond));
            if let StmtKind::Seq(stmts) = &body.kind {
                for st in stmts {
                    print_stmt(st, level, out);
                }
            } else {
                print_stmt(body, level, out);
            }
        }
        StmtKind::If { cond, then, otherwise } => {
            indent(level, out);
            let _ = write!(out, "if ({}) ", print_expr(cond));
            print_branch(then, level, out);
            if let Some(o) = otherwise {
                out.push_str(" else ");
                print_branch(o, level, out);
            }
            out.push('\n');
        }
        _ => {
            indent(level, out);
            print_simple(s, out);
            out.push('\n');
        }
    }
}

fn print_branch(s: &Stmt, level: usize, out: &mut String) {
    match &s.kind {
        StmtKind::Seq(_) => print_block(s, level, out),
        StmtKind::Assign { .. } | StmtKind::Transfer { .. } | StmtKind::Return(_) => print_simple(s, out),
        // Nested control flow is always braced so `else` binds unambiguously.
        _ => {
            out.push_str("{\n");
            print_stmt(s, level + 1, out);
            indent(level, out);
            out.push('}');
        }
    }
}

fn print_simple(s: &Stmt, out: &mut String) {
    match &s.kind {
        StmtKind::Assign { target, value } => {
            match target {
                LValue::Var(id) => out.push_str(&id.name),
                LValue::Index(id, k) => {
                    let _ = write!(out, "{}[{}]", id.name, print_expr(k));
                }
            }
            let _ = write!(out, " = {};", print_expr(value));
        }
        StmtKind::Transfer { to, amount } => {
            let _ = write!(out, "{}.transfer({});", print_postfix_operand(to), print_expr(amount));
        }
        StmtKind::Return(e) => {
            let _ = write!(out, "return {};", print_expr(e));
        }
        _ => unreachable!("compound statement printed as simple"),
    }
}

fn print_postfix_operand(e: &Expr) -> String {
    match e.kind {
        ExprKind::Binary { .. } | ExprKind::Not(_) => format!("({})", print_expr(e)),
        _ => print_expr(e),
    }
}

pub fn print_expr(e: &Expr) -> String {
    print_prec(e, 0)
}

fn print_prec(e: &Expr, min: u8) -> String {
    match &e.kind {
        ExprKind::Int { value, unit } => match unit {
            Some(u) => format!("{value} {}", u.keyword()),
            None => value.to_string(),
        },
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::ByteLit(h) | ExprKind::AddrLit(h) => format!("0x{h}"),
        ExprKind::Var(v) => v.clone(),
        ExprKind::MsgSender => "msg.sender".into(),
        ExprKind::MsgValue => "msg.value".into(),
        ExprKind::This => "this".into(),
        ExprKind::ThisBalance => "this.balance".into(),
        ExprKind::BalanceOf(a) => format!("{}.balance", print_postfix_operand(a)),
        ExprKind::Sha3(a) => format!("sha3({})", print_expr(a)),
        ExprKind::Index(m, k) => format!("{}[{}]", print_postfix_operand(m), print_expr(k)),
        ExprKind::Not(a) => format!("!{}", print_prec(a, 7)),
        ExprKind::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            let s = format!("{} {} {}", print_prec(lhs, p), op.symbol(), print_prec(rhs, p + 1));
            if p < min {
                format!("({s})")
            } else {
                s
            }
        }
    }
}
