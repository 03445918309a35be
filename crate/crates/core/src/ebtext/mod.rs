//! The `.eb` text format: one context or machine per file.

mod parse;
mod print;

pub use parse::{is_reserved, parse_context, parse_expr, parse_machine, parse_pred, parse_project, EbTextError};
pub use print::{print_context, print_expr, print_machine, print_pred, print_project};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eb::*;

    #[test]
    fn ascii_aliases() {
        let p = parse_pred("x : NAT1 & y /= 3 => f <+ {a |-> 1} : A --> INT").unwrap();
        assert_eq!(print_pred(&p), "x ∈ ℕ1 ∧ y ≠ 3 ⇒ f <+ {a ↦ 1} ∈ A → ℤ");
    }

    #[test]
    fn cond_map_round_trip() {
        let text = "{TRUE ↦ hash, FALSE ↦ hashPass}(bool(passHasBeenSet = FALSE ∧ msg_value ≥ TRANSFER_VALUE))";
        let e = parse_expr(text).unwrap();
        assert!(matches!(e, Expr::CondMap { .. }));
        assert_eq!(print_expr(&e), text);
    }

    #[test]
    fn mixed_connectives_need_parentheses() {
        assert!(parse_pred("a = 1 ∧ b = 1 ∨ c = 1").is_err());
        let p = parse_pred("(a = 1 ∧ b = 1) ∨ c = 1").unwrap();
        assert_eq!(print_pred(&p), "(a = 1 ∧ b = 1) ∨ c = 1");
    }

    #[test]
    fn empty_machine() {
        let m = Machine {
            name: "M".into(),
            refines: None,
            sees: "C".into(),
            variables: vec![],
            invariants: vec![],
            events: vec![Event::new(INITIALISATION)],
        };
        let text = print_machine(&m);
        assert_eq!(text.split_whitespace().collect::<Vec<_>>().join(" "), "machine M sees C events event INITIALISATION end end");
        assert_eq!(parse_machine("m.eb", &text).unwrap(), m);
    }

    #[test]
    fn action_with_equals_is_assignment() {
        let m = parse_machine(
            "m2.eb",
            "machine M2 refines M1 sees C variables x events event INITIALISATION then @act1 x := 0 end \
             event E refines E then @act1 x = x end end",
        )
        .unwrap();
        assert_eq!(m.events[1].actions[0], Action::new("act1", "x", Expr::name("x")));
    }

    #[test]
    fn dangling_references() {
        let files = vec![("m.eb".to_string(), "machine M sees Nope events event INITIALISATION end end".to_string())];
        assert!(matches!(parse_project("p", &files), Err(EbTextError::DanglingReference { kind: "context", .. })));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_context("c.eb", "context C\naxioms\n  @axm1 x ∈ \nend").unwrap_err();
        let EbTextError::Parse { line, col, .. } = err else { panic!("{err}") };
        assert_eq!((line, col), (4, 1));
    }
}
