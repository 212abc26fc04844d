//! Shared instance builders for the benchmarks.

use localcolor::{GeneratorSpec, Graph, RunConfig};

pub fn instance(spec: &str) -> Graph {
    spec.parse::<GeneratorSpec>().unwrap().generate(1).unwrap()
}

/// ε₁ = 0.05, K = 5: activates the dense stages at bench scale.
pub fn desk_config() -> RunConfig {
    RunConfig {
        epsilon1: Some(0.05),
        k_const: 5.0,
        ..RunConfig::default()
    }
}

pub const INSTANCES: [&str; 3] = ["gnp:n=2048,p=0.016", "regular:n=2048,d=32", "clique-union:sizes=33x64,bridges=256"];
