//! Command-line front end: formula parsing, match simulation, unit-tree
//! queries, tautology reports, proof search and proof checking.

mod args;
mod commands;
pub mod repl;
mod report;

pub use args::{AdversaryKind, Budgets, Cli, Command};
pub use commands::{execute, Status};
