//! Event-B intermediate representation, type checker and evaluator.

pub mod ast;
pub mod eval;
pub mod types;
pub mod value;

pub use ast::*;
pub use eval::{apply_event, eval_expr, eval_pred, EvalError, EventError, WdFailure, WdKind};
pub use types::{typecheck, Type, TypeError, TypeTables, TypedProject};
pub use value::{enumerate, Atom, Bounds, BoundsError, Valuation, Value};
