//! Configuration files, CSV/JSON output, verification suites and the
//! command-line interface built on [`sonine_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod output;
pub mod verify;

pub use sonine_core as core;
