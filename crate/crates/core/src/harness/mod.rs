//! Configuration, suite orchestration and reports.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{Config, Mode, MAX_DIMENSION};
pub use report::{Check, ConvergenceRow, ConvergenceTable, Expect, Status, SuiteReport, Totals};
pub use suites::{coordinatize, l1_square, run_suite, run_suites, verify_map_word, MapWordVerification, SUITES};
