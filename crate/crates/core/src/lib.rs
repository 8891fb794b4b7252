//! Minimum-cost derangements over symmetric cost matrices.
//!
//! A derangement `D` of `{1..n}` picks, for every point, a partner other
//! than itself; its cost `|D|` sums the matrix entries along those arcs and
//! bounds the optimal tour from below. The improvement loop repeatedly
//! searches the derived matrix of `D` for an admissible negative cycle `C`
//! and moves to `D ∘ C`, which is cheaper by exactly the cycle's weight.
//! Exhaustive oracles certify or refute the result on small instances.

pub mod cli;
pub mod cost;
pub mod engine;
pub mod error;
pub mod improve;
pub mod oracle;
pub mod permutation;

pub use cost::{CostMatrix, DerivedMatrix, Edge, EdgeSet};
pub use engine::{find_negative_cycle, EngineConfig, NegativeCycle, Policy};
pub use error::{Error, Result};
pub use improve::{apply_cycle, improve, ImprovementTrace, LoopConfig, Status};
pub use oracle::{min_derangement, min_tour, OracleResult};
pub use permutation::{CycleForm, DerangementMode, Permutation, RowForm};
