//! Frontend for the supported Solidity subset: lexing, parsing and validation.

pub mod ast;
mod error;
mod lexer;
mod parser;
pub mod print;
mod validate;

pub use ast::{ContractAst, Span};
pub use error::{SolError, ValidationError};
pub use parser::parse_contract;
pub use validate::{validate_contract, CheckedContract, FunctionInfo, ValueType};
