//! Verification engine for the non-crossing partition calculus of the quantum
//! permutation groups `S_N^+` and quantum reflection groups `H_N^{s+}`.
//!
//! The crate builds partition maps and invariant subspaces, certifies
//! degree-by-degree topological generation by subspace intersection, computes
//! exact Weingarten moments, constructs flat matrix models from Latin squares,
//! tests inner faithfulness level by level, and implements the fusion ring of
//! `H_N^{s+}`.

pub mod cli;
pub mod error;
pub mod exact;
pub mod fusion;
pub mod hopf_image;
pub mod invariants;
pub mod latin;
pub mod models;
pub mod partitions;
pub mod tensor_calc;
pub mod weingarten;

pub use error::{Error, Result};
pub use partitions::{ColoredWord, Partition};
