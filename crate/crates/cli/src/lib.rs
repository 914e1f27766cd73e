//! Library side of the `unanimity` command: output formatting, provenance
//! sidecars and the verification suites shared by `verify` and the
//! acceptance tests.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod output;
pub mod suite;
pub mod tables;

/// A problem with the command line that should exit with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}
