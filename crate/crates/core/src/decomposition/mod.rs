//! Hierarchical almost-clique decomposition.

pub mod exact;
mod hierarchy;
mod levels;
mod verify;

use serde::Serialize;

use crate::error::{Error, Result};

pub use hierarchy::{
    assemble_hierarchy, build_hierarchy, classify_blocks, large_eligible, Block, BlockClass,
    HierarchyView, LayerTag,
};
pub use levels::{almost_cliques, compute_level, dense_vertices, friend_edges, Level};
pub use verify::{
    check_palette_lb, verify_children_bound, verify_cluster_properties, ChildrenReport,
    ChildrenViolation, ClusterReport, ClusterViolation, PaletteLbReport,
};

/// Sparsity ladder ε₁ < ε₂ < … with εᵢ = √εᵢ₋₁.
///
/// `ladder` keeps every rung up to and including the first one with 1/ε < K, so it is
/// one longer than the usable prefix unless the walk reaches ε = 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionConfig {
    pub epsilon1: f64,
    pub k_const: f64,
    pub ladder: Vec<f64>,
    pub ell: usize,
}

impl DecompositionConfig {
    pub fn new(epsilon1: f64, k_const: f64) -> Result<Self> {
        if !(epsilon1 > 0.0 && epsilon1 < 1.0) {
            return Err(Error::Config(format!("epsilon1 must lie in (0,1), got {epsilon1}")));
        }
        if !(k_const > 1.0 && k_const.is_finite()) {
            return Err(Error::Config(format!("K must exceed 1, got {k_const}")));
        }
        let mut ladder = vec![epsilon1];
        let mut ell = 0;
        let mut eps = epsilon1;
        while 1.0 / eps >= k_const {
            ell += 1;
            eps = eps.sqrt();
            if eps >= 1.0 {
                break;
            }
            ladder.push(eps);
        }
        Ok(DecompositionConfig {
            epsilon1,
            k_const,
            ladder,
            ell,
        })
    }

    /// εᵢ for 1 ≤ i ≤ ℓ.
    pub fn eps(&self, i: usize) -> f64 {
        assert!((1..=self.ell).contains(&i), "level {i} outside 1..={}", self.ell);
        self.ladder[i - 1]
    }

    /// The usable rungs ε₁..ε_ℓ.
    pub fn levels(&self) -> &[f64] {
        &self.ladder[..self.ell]
    }
}

/// Ladder starting at ε₁ = Δ^(−1/10).
pub fn sparsity_sequence(delta: u128, k_const: f64) -> DecompositionConfig {
    assert!(delta >= 1, "sparsity sequence needs Δ ≥ 1");
    let eps1 = (delta as f64).powf(-0.1);
    if eps1 >= 1.0 {
        return DecompositionConfig {
            epsilon1: 1.0,
            k_const,
            ladder: vec![1.0],
            ell: 0,
        };
    }
    DecompositionConfig::new(eps1, k_const).expect("Δ^(−1/10) lies in (0,1) and K > 1")
}

/// log₂(1/ε).
pub fn log_inv(eps: f64) -> f64 {
    (1.0 / eps).log2()
}
