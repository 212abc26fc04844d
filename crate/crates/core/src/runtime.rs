use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Round constants charged by the phases. Every charge is fixed per phase and
/// never depends on which vertices happened to act.
pub mod rounds {
    /// Leader gathers a weak-diameter-2 cluster (2 rounds) and sends results back (2 rounds).
    pub const GATHER: u64 = 4;
    /// One exchange with direct neighbors.
    pub const EXCHANGE: u64 = 1;
    /// Friend-edge detection for one sparsity level.
    pub const FRIEND_EDGES: u64 = 1;
    /// Almost-clique leader discovery for one level (distance 2 inside a clique).
    pub const CLIQUE_LEADER: u64 = 2;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCharge {
    pub phase: String,
    pub rounds: u64,
}

/// Ordered record of charged LOCAL rounds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundLedger {
    entries: Vec<PhaseCharge>,
    total: u64,
}

impl RoundLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `k` rounds under `phase`. `k` must be positive.
    pub fn charge(&mut self, phase: &str, k: u64) {
        assert!(k > 0, "phase `{phase}` charged zero rounds");
        self.entries.push(PhaseCharge {
            phase: phase.to_string(),
            rounds: k,
        });
        self.total += k;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn entries(&self) -> &[PhaseCharge] {
        &self.entries
    }

    /// Sum of charges whose label starts with `prefix`.
    pub fn rounds_with_prefix(&self, prefix: &str) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.phase.starts_with(prefix))
            .map(|e| e.rounds)
            .sum()
    }

    pub fn entries_with_prefix(&self, prefix: &str) -> Vec<PhaseCharge> {
        self.entries
            .iter()
            .filter(|e| e.phase.starts_with(prefix))
            .cloned()
            .collect()
    }
}

/// Identifies a randomized phase for stream derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(pub u32);

impl Phase {
    pub const ONE_SHOT: Phase = Phase(1);
    pub const DENSE_V1: Phase = Phase(0x100);
    pub const DENSE_V2: Phase = Phase(0x200);
    pub const BIDDING: Phase = Phase(0x300);

    /// Distinguishes the same procedure run in different stages.
    pub const fn stage(self, stage: u32) -> Phase {
        Phase(self.0 + stage)
    }

    /// Separate family for cluster-level draws made by a leader.
    pub const fn leader(self) -> Phase {
        Phase(self.0 | 0x8000_0000)
    }
}

/// Per-vertex deterministic random streams keyed by (seed, vertex, phase, iteration).
#[derive(Debug, Clone)]
pub struct RngPlan {
    seed: u64,
    region: Option<(Arc<Vec<bool>>, u64)>,
}

impl RngPlan {
    pub fn new(seed: u64) -> Self {
        RngPlan { seed, region: None }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same plan, except vertices in `region` draw from streams keyed by `seed`.
    pub fn with_region_seed(&self, region: Vec<bool>, seed: u64) -> Self {
        RngPlan {
            seed: self.seed,
            region: Some((Arc::new(region), seed)),
        }
    }

    pub fn stream(&self, v: Vertex, phase: Phase, iteration: u32) -> ChaCha8Rng {
        let seed = match &self.region {
            Some((mask, s)) if mask.get(v as usize).copied().unwrap_or(false) => *s,
            _ => self.seed,
        };
        let mut rng = ChaCha8Rng::from_seed(derive_key(seed, phase, iteration));
        rng.set_stream(v as u64);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_key(seed: u64, phase: Phase, iteration: u32) -> [u8; 32] {
    let base = splitmix64(splitmix64(seed ^ splitmix64(phase.0 as u64)) ^ ((iteration as u64) << 1 | 1));
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_mut(8).enumerate() {
        let word = splitmix64(base.wrapping_add((i as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93)));
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    key
}

/// Fails unless every pair of members is adjacent or shares a neighbor in `g`.
pub fn check_weak_diameter(g: &Graph, members: &[Vertex]) -> Result<()> {
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            if !g.has_edge(u, v) && g.common_neighbors(u, v) == 0 {
                return Err(Error::Precondition(format!(
                    "cluster has weak diameter above 2: vertices {u} and {v}"
                )));
            }
        }
    }
    Ok(())
}

/// Runs `proc` once at the cluster's minimum-ID leader over the sorted member list and
/// hands each member its result. `proc` must return one value per member, in order.
/// Charges [`rounds::GATHER`].
pub fn cluster_gather_execute<T>(
    g: &Graph,
    members: &[Vertex],
    ledger: &mut RoundLedger,
    phase: &str,
    proc: impl FnOnce(Vertex, &[Vertex]) -> Vec<T>,
) -> Result<Vec<(Vertex, T)>> {
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    check_weak_diameter(g, &sorted)?;
    ledger.charge(phase, rounds::GATHER);
    let Some(&leader) = sorted.first() else {
        return Ok(Vec::new());
    };
    let results = proc(leader, &sorted);
    assert_eq!(results.len(), sorted.len(), "gathered procedure must answer every member");
    Ok(sorted.into_iter().zip(results).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn k4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn ledger_totals_charges() {
        let mut l = RoundLedger::new();
        l.charge("one-shot", 1);
        l.charge("gather", rounds::GATHER);
        assert_eq!(l.total(), 5);
        assert_eq!(l.entries().len(), 2);
        assert_eq!(l.rounds_with_prefix("one"), 1);
    }

    #[test]
    #[should_panic]
    fn zero_charge_panics() {
        RoundLedger::new().charge("x", 0);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let plan = RngPlan::new(7);
        let a: u64 = plan.stream(3, Phase::ONE_SHOT, 0).random();
        let b: u64 = plan.stream(3, Phase::ONE_SHOT, 0).random();
        assert_eq!(a, b);
        let others = [
            plan.stream(4, Phase::ONE_SHOT, 0).random::<u64>(),
            plan.stream(3, Phase::BIDDING, 0).random::<u64>(),
            plan.stream(3, Phase::ONE_SHOT, 1).random::<u64>(),
            RngPlan::new(8).stream(3, Phase::ONE_SHOT, 0).random::<u64>(),
        ];
        for o in others {
            assert_ne!(a, o);
        }
    }

    #[test]
    fn region_seed_only_touches_region() {
        let plan = RngPlan::new(1);
        let alt = plan.with_region_seed(vec![false, true], 99);
        let x: u64 = plan.stream(0, Phase::ONE_SHOT, 0).random();
        assert_eq!(x, alt.stream(0, Phase::ONE_SHOT, 0).random::<u64>());
        let y: u64 = plan.stream(1, Phase::ONE_SHOT, 0).random();
        assert_ne!(y, alt.stream(1, Phase::ONE_SHOT, 0).random::<u64>());
    }

    #[test]
    fn singleton_gather() {
        let g = k4();
        let mut l = RoundLedger::new();
        let out = cluster_gather_execute(&g, &[2], &mut l, "g", |leader, m| {
            assert_eq!(leader, 2);
            m.iter().map(|v| v * 10).collect()
        })
        .unwrap();
        assert_eq!(out, vec![(2, 20)]);
        assert_eq!(l.total(), rounds::GATHER);
    }

    #[test]
    fn k4_gather_assigns_ranks() {
        let g = k4();
        let mut l = RoundLedger::new();
        let out = cluster_gather_execute(&g, &[3, 1, 0, 2], &mut l, "g", |leader, m| {
            assert_eq!(leader, 0);
            (0..m.len()).collect()
        })
        .unwrap();
        assert_eq!(out, vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
    }

    #[test]
    fn disjoint_clusters_are_order_independent() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let run = |first: &[Vertex], second: &[Vertex]| {
            let mut l = RoundLedger::new();
            let mut all = cluster_gather_execute(&g, first, &mut l, "g", |leader, m| {
                m.iter().map(|&v| v + leader).collect()
            })
            .unwrap();
            all.extend(
                cluster_gather_execute(&g, second, &mut l, "g", |leader, m| {
                    m.iter().map(|&v| v + leader).collect()
                })
                .unwrap(),
            );
            all.sort();
            all
        };
        assert_eq!(run(&[0, 1, 2], &[3, 4, 5]), run(&[3, 4, 5], &[0, 1, 2]));
    }

    #[test]
    fn wide_cluster_is_rejected() {
        let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut l = RoundLedger::new();
        let err = cluster_gather_execute(&path, &[0, 1, 2, 3], &mut l, "g", |_, m| vec![(); m.len()]);
        assert!(matches!(err, Err(Error::Precondition(_))));
        assert_eq!(l.total(), 0);
    }
}
