//! Command-line front end: text grammar, subcommands and output.

pub mod commands;
pub mod parse;
pub mod render;

use orthinv::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Exit code for a library error: budget overruns get their own code, every
/// other error is a problem with the input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded(_) => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}
