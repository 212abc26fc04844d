//! OneShotColoring and the V* / V_bad split.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::Level;
use crate::graph::{Color, ColoringState, Graph, Vertex};
use crate::runtime::{rounds, Phase, RngPlan, RoundLedger};

/// Participation probability, 0 < p < 1/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneShotParams {
    pub p: f64,
}

#[derive(Debug, Clone)]
pub struct InitialOutcome {
    pub state: ColoringState,
    pub vstar: Vec<bool>,
    pub vbad: Vec<Vertex>,
    pub excess_before: Vec<i64>,
    pub excess_after: Vec<i64>,
}

/// Each uncolored vertex joins with probability `p` and draws a color uniformly from
/// Ψ(v); it keeps the color unless a lower-ID neighbor drew the same one or a colored
/// neighbor already holds it. Charges 1 round.
pub fn one_shot_coloring(
    g: &Graph,
    st: &ColoringState,
    p: f64,
    plan: &RngPlan,
    ledger: &mut RoundLedger,
) -> ColoringState {
    assert!((0.0..=1.0).contains(&p), "participation probability {p} outside [0,1]");
    ledger.charge("step2-oneshot", rounds::EXCHANGE);
    let choice: Vec<Option<Color>> = (0..g.n() as Vertex)
        .into_par_iter()
        .map(|v| {
            if st.is_colored(v) || st.palette(v).is_empty() {
                return None;
            }
            let mut rng = plan.stream(v, Phase::ONE_SHOT, 0);
            if !rng.random_bool(p) {
                return None;
            }
            let pal = st.palette(v);
            Some(pal[rng.random_range(0..pal.len())])
        })
        .collect();
    let keep: Vec<Option<Color>> = (0..g.n() as Vertex)
        .into_par_iter()
        .map(|v| {
            let c = choice[v as usize]?;
            let blocked = g.neighbors(v).iter().any(|&u| {
                (u < v && choice[u as usize] == Some(c)) || st.color(u) == Some(c)
            });
            (!blocked).then_some(c)
        })
        .collect();
    let mut out = st.clone();
    for (v, c) in keep.into_iter().enumerate() {
        if let Some(c) = c {
            out.set(v as Vertex, c);
        }
    }
    out
}

/// (f₁, f₂) at `v`: neighbors newly colored outside Ψ(v), and colors of Ψ(v) newly
/// taken by at least two neighbors.
pub fn measure_f1_f2(g: &Graph, before: &ColoringState, after: &ColoringState, v: Vertex) -> (usize, usize) {
    let pal = before.palette(v);
    let mut f1 = 0;
    let mut inside: Vec<Color> = Vec::new();
    for &u in g.neighbors(v) {
        if before.is_colored(u) {
            continue;
        }
        if let Some(c) = after.color(u) {
            if pal.binary_search(&c).is_ok() {
                inside.push(c);
            } else {
                f1 += 1;
            }
        }
    }
    inside.sort_unstable();
    let f2 = inside
        .chunk_by(|a, b| a == b)
        .filter(|run| run.len() >= 2)
        .count();
    (f1, f2)
}

pub fn excess_all(g: &Graph, st: &ColoringState) -> Vec<i64> {
    (0..g.n() as Vertex).into_par_iter().map(|v| st.excess(g, v)).collect()
}

/// An uncolored vertex goes to V_bad when it is ε_ℓ-dense with fewer than Δ/2 uncolored
/// neighbors, or εᵢ-sparse for some ladder level with excess below c_exc·εᵢ²Δ.
/// `levels` are ε₁..ε_ℓ. Charges 1 round.
pub fn split_vstar_vbad(
    g: &Graph,
    levels: &[Level],
    st: &ColoringState,
    c_exc: f64,
    ledger: &mut RoundLedger,
) -> (Vec<bool>, Vec<Vertex>) {
    ledger.charge("step2-split", rounds::EXCHANGE);
    let delta = g.max_degree() as f64;
    let bad: Vec<Option<bool>> = (0..g.n() as Vertex)
        .into_par_iter()
        .map(|v| {
            if st.is_colored(v) {
                return None;
            }
            let top_dense = levels.last().is_some_and(|l| l.is_dense(v));
            if top_dense && 2.0 * (st.uncolored_neighbors(g, v) as f64) < delta {
                return Some(true);
            }
            let excess = st.excess(g, v) as f64;
            let starved = levels
                .iter()
                .any(|l| !l.is_dense(v) && excess < c_exc * l.epsilon * l.epsilon * delta);
            Some(starved)
        })
        .collect();
    let mut vstar = vec![false; g.n()];
    let mut vbad = Vec::new();
    for (v, b) in bad.into_iter().enumerate() {
        match b {
            Some(true) => vbad.push(v as Vertex),
            Some(false) => vstar[v] = true,
            None => {}
        }
    }
    (vstar, vbad)
}

/// OneShotColoring followed by the split.
pub fn initial_step(
    g: &Graph,
    st: &ColoringState,
    params: OneShotParams,
    levels: &[Level],
    c_exc: f64,
    plan: &RngPlan,
    ledger: &mut RoundLedger,
) -> InitialOutcome {
    let excess_before = excess_all(g, st);
    let state = one_shot_coloring(g, st, params.p, plan, ledger);
    let excess_after = excess_all(g, &state);
    let (vstar, vbad) = split_vstar_vbad(g, levels, &state, c_exc, ledger);
    InitialOutcome {
        state,
        vstar,
        vbad,
        excess_before,
        excess_after,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::compute_level;

    #[test]
    fn edgeless_participants_all_keep() {
        let g = Graph::from_edges(2000, &[]).unwrap();
        let st = ColoringState::default_palettes(&g, 0);
        let mut l = RoundLedger::new();
        let out = one_shot_coloring(&g, &st, 0.2, &RngPlan::new(3), &mut l);
        let frac = out.colored_count() as f64 / 2000.0;
        assert!((frac - 0.2).abs() < 0.04, "{frac}");
        assert_eq!(l.total(), 1);
    }

    #[test]
    fn zero_probability_colors_nothing() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let st = ColoringState::default_palettes(&g, 0);
        let out = one_shot_coloring(&g, &st, 0.0, &RngPlan::new(1), &mut RoundLedger::new());
        assert_eq!(out.colored_count(), 0);
    }

    #[test]
    fn single_edge_lower_id_always_keeps() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let st = ColoringState::new(vec![vec![0, 1], vec![0, 1]]);
        let mut upper_kept = 0;
        let trials = 4000;
        for s in 0..trials {
            let out = one_shot_coloring(&g, &st, 1.0, &RngPlan::new(s), &mut RoundLedger::new());
            assert!(out.is_colored(0));
            upper_kept += out.is_colored(1) as u32;
        }
        let f = upper_kept as f64 / trials as f64;
        assert!((f - 0.5).abs() < 0.03, "{f}");
    }

    #[test]
    fn f1_f2_definitions() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let before = ColoringState::new(vec![vec![0, 7], vec![7, 9], vec![7, 9], vec![9]]);
        assert_eq!(measure_f1_f2(&g, &before, &before, 0), (0, 0));
        let mut after = before.clone();
        after.commit(&g, 1, 7).unwrap();
        after.commit(&g, 2, 7).unwrap();
        after.commit(&g, 3, 9).unwrap();
        assert_eq!(measure_f1_f2(&g, &before, &after, 0), (1, 1));
        let gain = after.excess(&g, 0) - before.excess(&g, 0);
        assert!(gain >= 2);
    }

    #[test]
    fn split_boundary_on_uncolored_neighbors() {
        // K5 is dense at ε = 0.5.
        let mut e = Vec::new();
        for u in 0..5u32 {
            for v in u + 1..5 {
                e.push((u, v));
            }
        }
        let g = Graph::from_edges(5, &e).unwrap();
        let lvl = compute_level(&g, 0.5);
        assert!(lvl.is_dense(0));
        let mut st = ColoringState::default_palettes(&g, 0);
        // Δ = 4: two uncolored neighbors keep v in V*, one sends it to V_bad.
        st.commit(&g, 1, 0).unwrap();
        st.commit(&g, 2, 1).unwrap();
        let (vstar, vbad) = split_vstar_vbad(&g, &[lvl.clone()], &st, 1e-9, &mut RoundLedger::new());
        assert!(vstar[0] && vbad.is_empty());
        st.commit(&g, 3, 2).unwrap();
        let (vstar, vbad) = split_vstar_vbad(&g, &[lvl], &st, 1e-9, &mut RoundLedger::new());
        assert!(!vstar[0]);
        assert!(vbad.contains(&0));
    }

    #[test]
    fn all_colored_means_empty_split() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let st = ColoringState::default_palettes(&g, 0)
            .with_assignment(vec![Some(0), Some(1)]);
        let (vstar, vbad) = split_vstar_vbad(&g, &[], &st, 0.1, &mut RoundLedger::new());
        assert!(vstar.iter().all(|&x| !x) && vbad.is_empty());
    }
}
