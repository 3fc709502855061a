//! Cross-module tests: generator statistics, long-run convergence and the
//! experiment harness end to end.

mod harness;
mod model;
