//! Solidity-subset to Event-B translation, proof-obligation generation,
//! bounded checking and machine animation.

pub mod checker;
pub mod cli;
pub mod eb;
pub mod ebtext;
pub mod po;
pub mod project;
pub mod sim;
pub mod sol;
pub mod translate;
