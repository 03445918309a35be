//! Canonical text for contexts and machines.

use std::fmt::Write;

use crate::eb::*;

const INDENT: &str = "    ";

/// One `(file name, text)` pair per context and machine, contexts first.
pub fn print_project(p: &Project) -> Vec<(String, String)> {
    p.contexts
        .iter()
        .map(|c| (format!("{}.eb", c.name), print_context(c)))
        .chain(p.machines.iter().map(|m| (format!("{}.eb", m.name), print_machine(m))))
        .collect()
}

pub fn print_context(c: &Context) -> String {
    let mut out = format!("context {}\n", c.name);
    if !c.sets.is_empty() {
        let _ = writeln!(out, "sets\n{INDENT}{}", c.sets.join(" "));
    }
    if !c.constants.is_empty() {
        let _ = writeln!(out, "constants\n{INDENT}{}", c.constants.join(" "));
    }
    if !c.axioms.is_empty() {
        out.push_str("axioms\n");
        for a in &c.axioms {
            let _ = writeln!(out, "{INDENT}@{} {}", a.label, print_pred(&a.pred));
        }
    }
    out.push_str("end\n");
    out
}

pub fn print_machine(m: &Machine) -> String {
    let mut out = format!("machine {}\n", m.name);
    if let Some(r) = &m.refines {
        let _ = writeln!(out, "refines {r}");
    }
    let _ = writeln!(out, "sees {}", m.sees);
    if !m.variables.is_empty() {
        let _ = writeln!(out, "variables\n{INDENT}{}", m.variables.join(" "));
    }
    if !m.invariants.is_empty() {
        out.push_str("invariants\n");
        for i in &m.invariants {
            let _ = writeln!(out, "{INDENT}@{} {}", i.label, print_pred(&i.pred));
        }
    }
    out.push_str("events\n");
    for (k, e) in m.events.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        print_event(e, &mut out);
    }
    out.push_str("end\n");
    out
}

fn print_event(e: &Event, out: &mut String) {
    let _ = write!(out, "{INDENT}event {}", e.name);
    if let Some(r) = &e.refines {
        let _ = write!(out, " refines {r}");
    }
    out.push('\n');
    if !e.params.is_empty() {
        let _ = writeln!(out, "{INDENT}any {}", e.params.join(" "));
    }
    if !e.guards.is_empty() {
        let _ = writeln!(out, "{INDENT}where");
        for g in &e.guards {
            let _ = writeln!(out, "{INDENT}{INDENT}@{} {}", g.label, print_pred(&g.pred));
        }
    }
    if !e.actions.is_empty() {
        let _ = writeln!(out, "{INDENT}then");
        for a in &e.actions {
            let _ = writeln!(out, "{INDENT}{INDENT}@{} {} ≔ {}", a.label, a.target, print_expr(&a.expr));
        }
    }
    let _ = writeln!(out, "{INDENT}end");
}

const P_FN: u8 = 1;
const P_SET: u8 = 2;
const P_ADD: u8 = 3;
const P_MUL: u8 = 4;
const P_ATOM: u8 = 5;

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::TotalFn(..) => P_FN,
        Expr::SetOp(..) => P_SET,
        Expr::Arith(ArithOp::Add | ArithOp::Sub, ..) => P_ADD,
        Expr::Arith(..) => P_MUL,
        _ => P_ATOM,
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(e, 0, &mut out);
    out
}

fn expr(e: &Expr, min: u8, out: &mut String) {
    if expr_prec(e) < min {
        out.push('(');
        expr(e, 0, out);
        out.push(')');
        return;
    }
    match e {
        Expr::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Bool(true) => out.push_str("TRUE"),
        Expr::Bool(false) => out.push_str("FALSE"),
        Expr::Name(n) => out.push_str(n),
        Expr::Integers => out.push('ℤ'),
        Expr::Naturals => out.push('ℕ'),
        Expr::Naturals1 => out.push_str("ℕ1"),
        Expr::BoolSet => out.push_str("BOOL"),
        Expr::Arith(op, a, b) => {
            let (p, sym) = match op {
                ArithOp::Add => (P_ADD, "+"),
                ArithOp::Sub => (P_ADD, "-"),
                ArithOp::Mul => (P_MUL, "*"),
                ArithOp::Div => (P_MUL, "÷"),
            };
            expr(a, p, out);
            let _ = write!(out, " {sym} ");
            expr(b, p + 1, out);
        }
        Expr::TotalFn(a, b) => {
            expr(a, P_FN + 1, out);
            out.push_str(" → ");
            expr(b, P_FN + 1, out);
        }
        Expr::SetOp(op, a, b) => {
            let sym = match op {
                SetOp::Union => "∪",
                SetOp::Minus => "∖",
                SetOp::Override => "<+",
                SetOp::Cartesian => "×",
            };
            // Distinct set operators never mix without parentheses.
            let same = matches!(&**a, Expr::SetOp(o, ..) if o == op);
            expr(a, if same { P_SET } else { P_SET + 1 }, out);
            let _ = write!(out, " {sym} ");
            expr(b, P_SET + 1, out);
        }
        Expr::SetLit(es) => {
            if es.is_empty() {
                out.push('∅');
                return;
            }
            out.push('{');
            for (i, x) in es.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(x, 0, out);
            }
            out.push('}');
        }
        Expr::FunLit(ps) => {
            if ps.is_empty() {
                out.push('∅');
                return;
            }
            out.push('{');
            for (i, (k, v)) in ps.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(k, 0, out);
                out.push_str(" ↦ ");
                expr(v, 0, out);
            }
            out.push('}');
        }
        Expr::Apply(f, x) => {
            let bare = matches!(&**f, Expr::Name(_) | Expr::Apply(..) | Expr::Dom(_) | Expr::SetLit(_) | Expr::FunLit(_))
                && !matches!(&**f, Expr::SetLit(v) if v.is_empty())
                && !matches!(&**f, Expr::FunLit(v) if v.is_empty());
            if bare {
                expr(f, P_ATOM, out);
            } else {
                out.push('(');
                expr(f, 0, out);
                out.push(')');
            }
            out.push('(');
            expr(x, 0, out);
            out.push(')');
        }
        Expr::Dom(f) => {
            out.push_str("dom(");
            expr(f, 0, out);
            out.push(')');
        }
        Expr::BoolOf(p) => {
            out.push_str("bool(");
            pred(p, 0, out);
            out.push(')');
        }
        Expr::CondMap { if_true, if_false, cond } => {
            out.push_str("{TRUE ↦ ");
            expr(if_true, 0, out);
            out.push_str(", FALSE ↦ ");
            expr(if_false, 0, out);
            out.push_str("}(");
            expr(cond, 0, out);
            out.push(')');
        }
    }
}

const Q_IMP: u8 = 1;
const Q_JUNCT: u8 = 2;
const Q_ATOM: u8 = 3;

fn pred_prec(p: &Pred) -> u8 {
    match p {
        Pred::Forall(..) | Pred::Exists(..) => 0,
        Pred::Implies(..) => Q_IMP,
        Pred::And(..) | Pred::Or(..) => Q_JUNCT,
        _ => Q_ATOM,
    }
}

pub fn print_pred(p: &Pred) -> String {
    let mut out = String::new();
    pred(p, 0, &mut out);
    out
}

fn paren_pred(p: &Pred, out: &mut String) {
    out.push('(');
    pred(p, 0, out);
    out.push(')');
}

fn pred(p: &Pred, min: u8, out: &mut String) {
    if pred_prec(p) < min {
        paren_pred(p, out);
        return;
    }
    match p {
        Pred::True => out.push('⊤'),
        Pred::False => out.push('⊥'),
        Pred::Cmp(op, a, b) => {
            let sym = match op {
                CmpOp::Eq => "=",
                CmpOp::Ne => "≠",
                CmpOp::Le => "≤",
                CmpOp::Ge => "≥",
                CmpOp::Lt => "<",
                CmpOp::Gt => ">",
            };
            infix(a, sym, b, out);
        }
        Pred::Member(a, b) => infix(a, "∈", b, out),
        Pred::Subset(a, b) => infix(a, "⊆", b, out),
        Pred::Implies(a, b) => {
            pred(a, Q_IMP + 1, out);
            out.push_str(" ⇒ ");
            pred(b, Q_IMP + 1, out);
        }
        Pred::And(a, b) | Pred::Or(a, b) => {
            let is_and = matches!(p, Pred::And(..));
            let left_ok = if is_and { matches!(&**a, Pred::And(..)) } else { matches!(&**a, Pred::Or(..)) };
            if left_ok || pred_prec(a) > Q_JUNCT {
                pred(a, Q_JUNCT, out);
            } else {
                paren_pred(a, out);
            }
            out.push_str(if is_and { " ∧ " } else { " ∨ " });
            pred(b, Q_ATOM, out);
        }
        Pred::Not(a) => {
            out.push('¬');
            match &**a {
                Pred::Not(_) | Pred::True | Pred::False => pred(a, Q_ATOM, out),
                _ => paren_pred(a, out),
            }
        }
        Pred::Forall(vs, body) | Pred::Exists(vs, body) => {
            out.push(if matches!(p, Pred::Forall(..)) { '∀' } else { '∃' });
            let names: Vec<&str> = vs.iter().map(|v| v.name.as_str()).collect();
            out.push_str(&names.join(","));
            out.push('·');
            pred(body, 0, out);
        }
    }
}

fn infix(a: &Expr, sym: &str, b: &Expr, out: &mut String) {
    expr(a, P_FN, out);
    let _ = write!(out, " {sym} ");
    expr(b, P_FN, out);
}
