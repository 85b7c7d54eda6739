//! Command-line front end, JSON/CSV reports and text input parsing for
//! [`padic_chabauty_core`].

pub mod cli;
pub mod parallel;
pub mod parse;
pub mod report;

pub use cli::{run, Outcome};
pub use padic_chabauty_core as core;
