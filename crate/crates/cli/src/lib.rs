//! Scenario-driven front end: configs in, certificate reports out.
// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod demo;
pub mod output;
pub mod pool;
pub mod suite;
pub mod sweep;

/// Exit codes of the binary.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const CONFIG: i32 = 2;
}
