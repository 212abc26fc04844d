use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ClusterSet;
use crate::error::{Error, Result};
use crate::graph::{Color, ColoringState, Graph, OrientationView, Vertex};
use crate::runtime::{rounds, Phase, RngPlan, RoundLedger};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    /// Vertices that drew a color, per cluster.
    pub selected: Vec<usize>,
    pub colored: usize,
}

/// ⌊(1−δ)·size⌋, with a small tolerance so exact products are not rounded down.
pub fn selection_count(size: usize, delta: f64) -> usize {
    let x = (1.0 - delta) * size as f64 + 1e-9;
    (x.floor().max(0.0) as usize).min(size)
}

/// Walks `order`, each vertex drawing uniformly from its available palette minus the
/// draws of earlier neighbors in the same cluster.
fn sequential_pass(
    g: &Graph,
    st: &ColoringState,
    order: &[Vertex],
    plan: &RngPlan,
    phase: Phase,
    iteration: u32,
) -> Result<Vec<(Vertex, Color)>> {
    let mut drawn: HashMap<Vertex, Color> = HashMap::with_capacity(order.len());
    let mut out = Vec::with_capacity(order.len());
    for &v in order {
        let mut taken: Vec<Color> = g
            .neighbors(v)
            .iter()
            .filter_map(|u| drawn.get(u).copied())
            .collect();
        taken.sort_unstable();
        let options: Vec<Color> = st
            .available(g, v)
            .into_iter()
            .filter(|c| taken.binary_search(c).is_err())
            .collect();
        if options.is_empty() {
            return Err(Error::Precondition(format!(
                "vertex {v} has no color left during the sequential pass"
            )));
        }
        let mut rng = plan.stream(v, phase, iteration);
        let c = options[rng.random_range(0..options.len())];
        drawn.insert(v, c);
        out.push((v, c));
    }
    Ok(out)
}

/// Keeps each draw not repeated by an out-neighbor; returns how many committed.
fn resolve(g: &Graph, st: &mut ColoringState, draws: Vec<(Vertex, Color)>, orient: &OrientationView) -> usize {
    let mut choice: Vec<Option<Color>> = vec![None; g.n()];
    for &(v, c) in &draws {
        choice[v as usize] = Some(c);
    }
    let keep: Vec<(Vertex, Color)> = draws
        .into_par_iter()
        .filter(|&(v, c)| !orient.out_neighbors(g, v).any(|u| choice[u as usize] == Some(c)))
        .collect();
    for &(v, c) in &keep {
        st.set(v, c);
    }
    keep.len()
}

/// Version 1: every member draws, clusters walked in `orient` order (smallest key first).
/// Charges one gather plus one exchange.
#[allow(clippy::too_many_arguments)]
pub fn dense_step_v1(
    g: &Graph,
    st: &mut ColoringState,
    clusters: &ClusterSet,
    orient: &OrientationView,
    plan: &RngPlan,
    phase: Phase,
    iteration: u32,
    ledger: &mut RoundLedger,
    label: &str,
) -> Result<StepReport> {
    ledger.charge(label, rounds::GATHER + rounds::EXCHANGE);
    let snapshot: &ColoringState = st;
    let per_cluster: Vec<Vec<(Vertex, Color)>> = clusters
        .clusters()
        .par_iter()
        .map(|c| {
            let mut order: Vec<Vertex> = c.members.iter().copied().filter(|&v| !snapshot.is_colored(v)).collect();
            order.sort_by_key(|&v| orient.key(v));
            debug_assert!(order
                .windows(2)
                .all(|w| !orient.out_neighbors(g, w[0]).any(|u| u == w[1])));
            sequential_pass(g, snapshot, &order, plan, phase, iteration)
        })
        .collect::<Result<_>>()?;
    let selected = per_cluster.iter().map(Vec::len).collect();
    let colored = resolve(g, st, per_cluster.into_iter().flatten().collect(), orient);
    Ok(StepReport { selected, colored })
}

/// Version 2: each cluster's leader picks ⌊(1−δⱼ)|Sⱼ|⌋ uncolored members and a random
/// order, then the same walk and conflict rule as version 1. `deltas[j]` belongs to the
/// j-th cluster of `clusters`.
#[allow(clippy::too_many_arguments)]
pub fn dense_step_v2(
    g: &Graph,
    st: &mut ColoringState,
    clusters: &ClusterSet,
    deltas: &[f64],
    orient: &OrientationView,
    plan: &RngPlan,
    phase: Phase,
    iteration: u32,
    ledger: &mut RoundLedger,
    label: &str,
) -> Result<StepReport> {
    assert_eq!(deltas.len(), clusters.len());
    ledger.charge(label, rounds::GATHER + rounds::EXCHANGE);
    let snapshot: &ColoringState = st;
    let per_cluster: Vec<Vec<(Vertex, Color)>> = clusters
        .clusters()
        .par_iter()
        .zip(deltas.par_iter())
        .map(|(c, &delta)| {
            let mut pool: Vec<Vertex> = c.members.iter().copied().filter(|&v| !snapshot.is_colored(v)).collect();
            let k = selection_count(pool.len(), delta);
            let mut rng = plan.stream(c.members[0], phase.leader(), iteration);
            let (chosen, _) = pool.partial_shuffle(&mut rng, k);
            sequential_pass(g, snapshot, chosen, plan, phase, iteration)
        })
        .collect::<Result<_>>()?;
    let selected = per_cluster.iter().map(Vec::len).collect();
    let colored = resolve(g, st, per_cluster.into_iter().flatten().collect(), orient);
    Ok(StepReport { selected, colored })
}
