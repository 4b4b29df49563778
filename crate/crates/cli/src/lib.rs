//! Library surface of the `dipole-julia` CLI; the binary is a thin
//! argument-parsing wrapper so tests can drive commands directly.

// NaN-rejecting float validation reads as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod failure;
