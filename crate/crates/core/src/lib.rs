//! Simulator for randomized (Δ+1)-list coloring in the LOCAL model.

pub mod bidding;
pub mod config;
pub mod decomposition;
pub mod dense;
pub mod error;
pub mod generate;
pub mod graph;
pub mod initial;
pub mod pipeline;
pub mod runtime;
pub mod stats;

pub use config::{Branch, RunConfig};
pub use error::{Error, Result};
pub use generate::GeneratorSpec;
pub use graph::{check_proper, orient, ColoringState, Color, Graph, OrientationView, ProperReport, Vertex};
pub use pipeline::{run_excess_mode, run_full, run_sparse_mode, Fate, LeftoverPartition, Mode, RunStats};
pub use runtime::{Phase, RngPlan, RoundLedger};
