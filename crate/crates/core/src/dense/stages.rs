//! The six dense stages: small and medium blocks with version 1, large blocks with version 2.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::schedule::{high_degree_feasible, high_degree_rows, layered_default_rows, low_degree_rows};
use super::step::{dense_step_v1, dense_step_v2};
use super::{ClusterSet, DenseSchedule, ScheduleRow, Variant};
use crate::bidding::{simple_bidding_loop, BiddingOutcome};
use crate::config::{Branch, RunConfig};
use crate::decomposition::{BlockClass, HierarchyView};
use crate::error::{Error, Result};
use crate::graph::{orient, Color, ColoringState, Graph, OrientationView, Vertex};
use crate::runtime::{rounds, Phase, RngPlan, RoundLedger};

/// Shared inputs of every stage.
pub struct StageContext<'a> {
    pub g: &'a Graph,
    pub h: &'a HierarchyView,
    pub plan: &'a RngPlan,
    pub beta: f64,
    pub c: u32,
    pub k_const: f64,
    pub max_bidding_iterations: usize,
    pub layer_keys: Vec<u32>,
}

impl<'a> StageContext<'a> {
    pub fn new(g: &'a Graph, h: &'a HierarchyView, plan: &'a RngPlan, cfg: &RunConfig) -> Self {
        StageContext {
            g,
            h,
            plan,
            beta: cfg.beta,
            c: cfg.c,
            k_const: cfg.k_const,
            max_bidding_iterations: cfg.max_bidding_iterations,
            layer_keys: h.layer_keys(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct StageOutcome {
    pub stage: String,
    pub set_size: usize,
    pub colored: usize,
    pub vbad: Vec<Vertex>,
    /// Clusters removed wholesale by invariant restoration.
    pub evicted_clusters: usize,
    /// Vertices added by the final per-layer neighbor bound.
    pub witness_evicted: usize,
    /// Schedule rows in use, one list per layer (version 2 stages only).
    pub rows: Vec<Vec<ScheduleRow>>,
    pub bidding: Option<BiddingOutcome>,
    /// (2δΔ, value used) for the layer-1 small and medium stages.
    pub delta_prime: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TopLargeOutcome {
    pub stage: StageOutcome,
    pub r: Vec<Vertex>,
    pub x: Vec<Vertex>,
    pub schedule: DenseSchedule,
    pub phase3_failed_clusters: usize,
}

fn stage_members(ctx: &StageContext, st: &ColoringState, removed: &[bool], class: BlockClass, top: bool) -> Vec<bool> {
    let mut mask = ctx.h.class_mask(class, |layer| (layer == 1) == top);
    for (v, m) in mask.iter_mut().enumerate() {
        *m = *m && !removed[v] && !st.is_colored(v as Vertex);
    }
    mask
}

fn members_of(mask: &[bool]) -> Vec<Vertex> {
    (0..mask.len() as Vertex).filter(|&v| mask[v as usize]).collect()
}

fn group_by(members: &[Vertex], key: impl Fn(Vertex) -> usize) -> Vec<Vec<Vertex>> {
    let mut groups: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
    for &v in members {
        groups.entry(key(v)).or_default().push(v);
    }
    groups.into_values().collect()
}

/// Every uncolored in-play vertex of V⋆ with more than εᵢ⁵Δ uncolored layer-i neighbors
/// in `stage`, for some i in [2, ℓ]. Charges one exchange.
pub fn witness_check(
    ctx: &StageContext,
    st: &ColoringState,
    stage: &[bool],
    removed: &[bool],
    ledger: &mut RoundLedger,
    label: &str,
) -> Vec<Vertex> {
    ledger.charge(label, rounds::EXCHANGE);
    let h = ctx.h;
    let ell = h.ell();
    if ell < 2 {
        return Vec::new();
    }
    let delta = h.delta as f64;
    let bounds: Vec<f64> = (0..=ell).map(|i| if i >= 2 { h.eps(i).powi(5) * delta } else { f64::INFINITY }).collect();
    (0..ctx.g.n() as Vertex)
        .into_par_iter()
        .filter(|&v| {
            if !h.in_vstar[v as usize] || removed[v as usize] || st.is_colored(v) {
                return false;
            }
            let mut count = vec![0usize; ell + 1];
            for &u in ctx.g.neighbors(v) {
                if stage[u as usize] && !removed[u as usize] && !st.is_colored(u) {
                    if let Some(i) = h.layer(u) {
                        count[i] += 1;
                    }
                }
            }
            (2..=ell).any(|i| count[i] as f64 > bounds[i])
        })
        .collect()
}

fn stage_tag(class: BlockClass, top: bool) -> (&'static str, u32) {
    match (class, top) {
        (BlockClass::Small, false) => ("step3a", 1),
        (BlockClass::Small, true) => ("step3b", 2),
        (BlockClass::Medium, false) => ("step3c", 3),
        (BlockClass::Medium, true) => ("step3d", 4),
        (BlockClass::Large, false) => ("step3e", 5),
        (BlockClass::Large, true) => ("step3f", 6),
    }
}

/// Layer-≥2 small or medium blocks: clusters are the stage set cut by ε_ℓ-almost cliques,
/// six version-1 iterations, then the per-layer neighbor bound.
pub fn color_small_medium(
    ctx: &StageContext,
    st: &mut ColoringState,
    class: BlockClass,
    removed: &[bool],
    ledger: &mut RoundLedger,
) -> Result<StageOutcome> {
    assert!(class != BlockClass::Large);
    let (label, tag) = stage_tag(class, false);
    let mask = stage_members(ctx, st, removed, class, false);
    let members = members_of(&mask);
    let ell = ctx.h.ell();
    let top = ctx.h.level(ell.max(1));
    let clusters = group_by(&members, |v| top.clique(v).expect("layered vertices are ε_ℓ-dense"));
    let cs = ClusterSet::new(ctx.g, clusters, &ctx.layer_keys)?;
    let o = orient(ctx.g, &ctx.layer_keys);
    let before = st.colored_count();
    for k in 0..6 {
        dense_step_v1(ctx.g, st, &cs, &o, ctx.plan, Phase::DENSE_V1.stage(tag), k, ledger, &format!("{label}/v1"))?;
    }
    let vbad = witness_check(ctx, st, &mask, removed, ledger, &format!("{label}/witness"));
    Ok(StageOutcome {
        stage: label.into(),
        set_size: members.len(),
        colored: st.colored_count() - before,
        witness_evicted: vbad.len(),
        vbad,
        ..StageOutcome::default()
    })
}

/// Layer-1 small or medium blocks: one version-1 iteration, vertices above Δ′ uncolored
/// stage neighbors to V_bad, then the simple bidding loop; leftovers to V_bad.
pub fn color_small_medium_top(
    ctx: &StageContext,
    st: &mut ColoringState,
    class: BlockClass,
    removed: &[bool],
    ledger: &mut RoundLedger,
) -> Result<StageOutcome> {
    assert!(class != BlockClass::Large);
    let (label, tag) = stage_tag(class, true);
    let g = ctx.g;
    let mask = stage_members(ctx, st, removed, class, true);
    let members = members_of(&mask);
    let clusters = group_by(&members, |v| ctx.h.block(v).expect("stage vertices lie in blocks"));
    let cs = ClusterSet::new(g, clusters, &ctx.layer_keys)?;
    let o = orient(g, &ctx.layer_keys);
    let before = st.colored_count();
    dense_step_v1(g, st, &cs, &o, ctx.plan, Phase::DENSE_V1.stage(tag), 0, ledger, &format!("{label}/v1"))?;

    let delta = ctx.h.delta as f64;
    let eps1 = ctx.h.eps(1);
    let z = delta / (2.0 * crate::decomposition::log_inv(eps1));
    let raw = 2.0 * (eps1 * delta / z) * delta;
    let dprime = raw.min(z / 2.0);

    ledger.charge(&format!("{label}/degree"), rounds::EXCHANGE);
    let uncolored: Vec<Vertex> = members.iter().copied().filter(|&v| !st.is_colored(v)).collect();
    let (mut vbad, rest): (Vec<Vertex>, Vec<Vertex>) = uncolored.iter().partition(|&&v| {
        above_degree_cap(
            g.neighbors(v)
                .iter()
                .filter(|&&u| mask[u as usize] && !st.is_colored(u))
                .count(),
            dprime,
        )
    });
    let rho = (z / dprime - 1.0).max(f64::MIN_POSITIVE);
    let bidding = simple_bidding_loop(
        g,
        st,
        &rest,
        rho,
        dprime,
        ctx.max_bidding_iterations,
        ctx.plan,
        Phase::BIDDING.stage(tag),
        ledger,
        &format!("{label}/bidding"),
    );
    vbad.extend(bidding.vbad.iter().copied());
    vbad.sort_unstable();
    Ok(StageOutcome {
        stage: label.into(),
        set_size: members.len(),
        colored: st.colored_count() - before,
        vbad,
        bidding: Some(bidding),
        delta_prime: Some((raw, dprime)),
        ..StageOutcome::default()
    })
}

/// More than ⌈Δ′⌉ uncolored stage neighbors.
pub(crate) fn above_degree_cap(count: usize, dprime: f64) -> bool {
    count > dprime.ceil() as usize
}

const SLACK: f64 = 1e-9;

/// Clusters of `cs` violating the size bounds U and L or the degree bound D of their row.
/// `alive` marks stage vertices still in play; the external degree only counts neighbors
/// at the same or a lower layer.
fn invariant_violations(
    ctx: &StageContext,
    st: &ColoringState,
    cs: &ClusterSet,
    alive: &[bool],
    row_of: impl Fn(usize) -> ScheduleRow + Sync,
) -> Vec<usize> {
    let g = ctx.g;
    (0..cs.len())
        .into_par_iter()
        .filter(|&j| {
            let row = row_of(j);
            let left: Vec<Vertex> = cs.clusters()[j]
                .members
                .iter()
                .copied()
                .filter(|&v| !st.is_colored(v))
                .collect();
            let size = left.len() as f64;
            if size > row.u + SLACK || size + SLACK < row.l {
                return true;
            }
            left.iter().any(|&v| {
                let adjacent = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| cs.cluster_of(u) == Some(j) && !st.is_colored(u))
                    .count();
                let anti = left.len() - 1 - adjacent;
                let lv = ctx.layer_keys[v as usize];
                let ext = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| {
                        alive[u as usize]
                            && !st.is_colored(u)
                            && cs.cluster_of(u) != Some(j)
                            && ctx.layer_keys[u as usize] <= lv
                    })
                    .count();
                anti as f64 > row.d + SLACK || ext as f64 > row.d + SLACK
            })
        })
        .collect()
}

/// Runs version-2 iterations with per-iteration rows, evicting violating clusters before
/// every iteration after the first. Returns the surviving set and the evicted vertices.
#[allow(clippy::too_many_arguments)]
fn run_v2_schedule(
    ctx: &StageContext,
    st: &mut ColoringState,
    full: &ClusterSet,
    orientation: &OrientationView,
    iterations: usize,
    row_for: impl Fn(u32, usize) -> ScheduleRow + Sync,
    tag: u32,
    ledger: &mut RoundLedger,
    label: &str,
) -> Result<(ClusterSet, Vec<Vertex>, usize)> {
    let mut cs = full.restrict(|v| !st.is_colored(v));
    let mut alive = cs.mask();
    let mut evicted = Vec::new();
    let mut evicted_clusters = 0;
    for k in 0..iterations {
        if k > 0 {
            ledger.charge(&format!("{label}/restore"), rounds::GATHER);
            let bad = invariant_violations(ctx, st, &cs, &alive, |j| row_for(cs.clusters()[j].layer, k));
            evicted_clusters += bad.len();
            for &j in &bad {
                for &v in &cs.clusters()[j].members {
                    alive[v as usize] = false;
                    if !st.is_colored(v) {
                        evicted.push(v);
                    }
                }
            }
            cs = cs.restrict(|v| alive[v as usize] && !st.is_colored(v));
        }
        let deltas: Vec<f64> = cs.clusters().iter().map(|c| row_for(c.layer, k).delta).collect();
        dense_step_v2(ctx.g, st, &cs, &deltas, orientation, ctx.plan, Phase::DENSE_V2.stage(tag), k as u32, ledger, &format!("{label}/v2"))?;
    }
    evicted.sort_unstable();
    Ok((cs.restrict(|v| !st.is_colored(v)), evicted, evicted_clusters))
}

/// Layer-≥2 large blocks: six version-2 iterations with the default rows of each layer,
/// whole-cluster eviction on invariant failure, then the per-layer neighbor bound.
pub fn color_large(ctx: &StageContext, st: &mut ColoringState, removed: &[bool], ledger: &mut RoundLedger) -> Result<StageOutcome> {
    let (label, tag) = stage_tag(BlockClass::Large, false);
    let h = ctx.h;
    let mask = stage_members(ctx, st, removed, BlockClass::Large, false);
    let members = members_of(&mask);
    let clusters = group_by(&members, |v| h.block(v).expect("stage vertices lie in blocks"));
    let full = ClusterSet::new(ctx.g, clusters, &ctx.layer_keys)?;
    let eps: Vec<f64> = (2..=h.ell().max(1)).map(|i| h.eps(i)).collect();
    let rows = layered_default_rows(&eps, h.delta, ctx.beta, ctx.k_const, 6);
    let o = full.orientation(&ctx.layer_keys);
    let before = st.colored_count();
    let (_, mut vbad, evicted_clusters) = run_v2_schedule(
        ctx,
        st,
        &full,
        &o,
        6,
        |layer, k| rows[layer as usize - 2][k],
        tag,
        ledger,
        label,
    )?;
    let mut gone = removed.to_vec();
    for &v in &vbad {
        gone[v as usize] = true;
    }
    let witness = witness_check(ctx, st, &mask, &gone, ledger, &format!("{label}/witness"));
    let witness_evicted = witness.len();
    vbad.extend(witness);
    vbad.sort_unstable();
    Ok(StageOutcome {
        stage: label.into(),
        set_size: members.len(),
        colored: st.colored_count() - before,
        vbad,
        evicted_clusters,
        witness_evicted,
        rows,
        ..StageOutcome::default()
    })
}

/// Picks the layer-1 large-block table. `Auto` takes the high-degree table when all of its
/// fixed rates fit under 1/K; forcing it when they do not is a configuration error.
#[allow(clippy::too_many_arguments)]
pub fn select_schedule(eps1: f64, delta: usize, n: usize, beta: f64, c: u32, k_const: f64, branch: Branch) -> Result<DenseSchedule> {
    let high = high_degree_rows(eps1, delta, n, beta, c, k_const);
    let feasible = high_degree_feasible(&high);
    match branch {
        Branch::High if !feasible => Err(Error::Config(format!(
            "high-degree schedule infeasible at Δ={delta}, n={n}, c={c}: some fixed rate exceeds 1/K"
        ))),
        Branch::High => Ok(high),
        Branch::Auto if feasible => Ok(high),
        _ => Ok(low_degree_rows(eps1, delta, beta, c, k_const)),
    }
}

/// Layer-1 large blocks. Invariant failures and Phase-3 failures go to V_bad under the
/// low-degree table and to X under the high-degree one. After the last iteration a cluster
/// with at most c² uncolored members facing an uncolored outside out-neighbor has its
/// other members colored by the leader; those c² join R.
pub fn color_large_top(
    ctx: &StageContext,
    st: &mut ColoringState,
    removed: &[bool],
    schedule: &DenseSchedule,
    ledger: &mut RoundLedger,
) -> Result<TopLargeOutcome> {
    let (label, tag) = stage_tag(BlockClass::Large, true);
    let g = ctx.g;
    let h = ctx.h;
    let mask = stage_members(ctx, st, removed, BlockClass::Large, true);
    let members = members_of(&mask);
    let clusters = group_by(&members, |v| h.block(v).expect("stage vertices lie in blocks"));
    let full = ClusterSet::new(g, clusters, &ctx.layer_keys)?;
    let o = full.orientation(&ctx.layer_keys);
    let before = st.colored_count();
    let rows = &schedule.rows;
    let (cs, evicted, evicted_clusters) = run_v2_schedule(ctx, st, &full, &o, rows.len(), |_, k| rows[k], tag, ledger, label)?;

    ledger.charge(&format!("{label}/phase3"), rounds::GATHER);
    let alive = cs.mask();
    let cap = (ctx.c as usize).pow(2);
    let snapshot: &ColoringState = st;
    let verdicts: Vec<(Vec<Vertex>, Vec<(Vertex, Color)>, bool)> = cs
        .clusters()
        .par_iter()
        .enumerate()
        .map(|(j, c)| {
            let (conflicted, free): (Vec<Vertex>, Vec<Vertex>) = c.members.iter().partition(|&&v| {
                o.out_neighbors(g, v)
                    .any(|u| alive[u as usize] && cs.cluster_of(u) != Some(j))
            });
            if conflicted.len() > cap {
                return (c.members.clone(), Vec::new(), false);
            }
            let mut picked: Vec<(Vertex, Color)> = Vec::with_capacity(free.len());
            for &v in &free {
                let color = snapshot
                    .available(g, v)
                    .into_iter()
                    .find(|&col| {
                        !picked
                            .iter()
                            .any(|&(u, cu)| cu == col && g.has_edge(u, v))
                    })
                    .expect("deg+1 palette leaves a color for the leader");
                picked.push((v, color));
            }
            (conflicted, picked, true)
        })
        .collect();
    let mut r = Vec::new();
    let mut failed = Vec::new();
    let mut phase3_failed_clusters = 0;
    for (left, picked, ok) in verdicts {
        if ok {
            r.extend(left);
            for (v, c) in picked {
                st.set(v, c);
            }
        } else {
            phase3_failed_clusters += 1;
            failed.extend(left);
        }
    }
    let mut lost = evicted;
    lost.extend(failed);
    lost.sort_unstable();
    r.sort_unstable();
    let (vbad, x) = match schedule.variant {
        Variant::HighDegree => (Vec::new(), lost),
        _ => (lost, Vec::new()),
    };
    Ok(TopLargeOutcome {
        stage: StageOutcome {
            stage: label.into(),
            set_size: members.len(),
            colored: st.colored_count() - before,
            vbad,
            evicted_clusters,
            rows: vec![rows.clone()],
            ..StageOutcome::default()
        },
        r,
        x,
        schedule: schedule.clone(),
        phase3_failed_clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{build_hierarchy, DecompositionConfig};
    use crate::generate::clique_union;
    use crate::graph::check_proper;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(sizes: &[usize], bridges: usize, eps1: f64, k: f64) -> (Graph, HierarchyView) {
        let g = clique_union(sizes, bridges, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let cfg = DecompositionConfig::new(eps1, k).unwrap();
        let h = build_hierarchy(&g, &vec![true; g.n()], &cfg);
        (g, h)
    }

    fn run_cfg() -> RunConfig {
        RunConfig {
            epsilon1: Some(0.05),
            k_const: 5.0,
            ..RunConfig::default()
        }
    }

    fn reclass(h: &mut HierarchyView, class: BlockClass) {
        for b in &mut h.blocks {
            b.class = class;
        }
    }

    #[test]
    fn degree_cap_boundary() {
        assert!(!above_degree_cap(4, 3.2));
        assert!(above_degree_cap(5, 3.2));
        assert!(!above_degree_cap(3, 3.0));
        assert!(above_degree_cap(4, 3.0));
    }

    #[test]
    fn isolated_layer_one_large_blocks_fully_colored() {
        let (g, h) = setup(&[33, 33, 33], 0, 0.05, 5.0);
        assert!(h.blocks.iter().all(|b| b.layer == 1 && b.class == BlockClass::Large));
        for seed in 0..20 {
            let plan = RngPlan::new(seed);
            let ctx = StageContext::new(&g, &h, &plan, &run_cfg());
            let mut st = ColoringState::default_palettes(&g, 0);
            let sched = select_schedule(h.eps(1), h.delta, g.n(), 64.0, 4, 5.0, Branch::Auto).unwrap();
            let out = color_large_top(&ctx, &mut st, &vec![false; g.n()], &sched, &mut RoundLedger::new()).unwrap();
            assert!(out.r.is_empty() && out.x.is_empty() && out.stage.vbad.is_empty());
            assert!(check_proper(&g, &st).is_valid_complete());
            assert_eq!(out.stage.colored, g.n());
        }
    }

    #[test]
    fn layer_one_small_and_medium_leave_only_vbad() {
        for class in [BlockClass::Small, BlockClass::Medium] {
            let (g, mut h) = setup(&[33, 33, 33], 0, 0.05, 5.0);
            reclass(&mut h, class);
            for seed in 0..20 {
                let plan = RngPlan::new(seed);
                let ctx = StageContext::new(&g, &h, &plan, &run_cfg());
                let mut st = ColoringState::default_palettes(&g, 0);
                let out = color_small_medium_top(&ctx, &mut st, class, &vec![false; g.n()], &mut RoundLedger::new()).unwrap();
                assert!(check_proper(&g, &st).is_proper());
                assert_eq!(out.vbad, st.uncolored_vertices());
                assert_eq!(out.set_size, g.n());
                let (raw, used) = out.delta_prime.unwrap();
                assert!(used <= raw);
            }
        }
    }

    #[test]
    fn layer_two_small_stage_respects_witness_bound() {
        let (g, mut h) = setup(&[65, 65, 65, 65], 30, 1.0 / 32.0, 5.5);
        assert_eq!(h.ell(), 2);
        assert!(h.blocks.iter().any(|b| b.layer == 2));
        reclass(&mut h, BlockClass::Small);
        for seed in 0..10 {
            let plan = RngPlan::new(seed);
            let ctx = StageContext::new(&g, &h, &plan, &RunConfig::default());
            let mut st = ColoringState::default_palettes(&g, 0);
            let removed = vec![false; g.n()];
            let out = color_small_medium(&ctx, &mut st, BlockClass::Small, &removed, &mut RoundLedger::new()).unwrap();
            assert!(check_proper(&g, &st).is_proper());
            let mut gone = removed.clone();
            for &v in &out.vbad {
                gone[v as usize] = true;
            }
            let stage = h.class_mask(BlockClass::Small, |l| l >= 2);
            let again = witness_check(&ctx, &st, &stage, &gone, &mut RoundLedger::new(), "w");
            assert!(again.is_empty(), "seed {seed}: {again:?}");
        }
    }

    #[test]
    fn empty_stages_still_charge() {
        let (g, h) = setup(&[33, 33], 0, 0.05, 5.0);
        assert_eq!(h.ell(), 1);
        let plan = RngPlan::new(0);
        let ctx = StageContext::new(&g, &h, &plan, &run_cfg());
        let mut st = ColoringState::default_palettes(&g, 0);
        let removed = vec![false; g.n()];
        let mut l = RoundLedger::new();
        let a = color_small_medium(&ctx, &mut st, BlockClass::Small, &removed, &mut l).unwrap();
        let b = color_large(&ctx, &mut st, &removed, &mut l).unwrap();
        assert_eq!((a.set_size, a.colored, b.set_size, b.colored), (0, 0, 0, 0));
        assert_eq!(l.rounds_with_prefix("step3a"), 6 * (rounds::GATHER + rounds::EXCHANGE) + rounds::EXCHANGE);
        assert!(l.rounds_with_prefix("step3e") > 0);
    }

    #[test]
    fn schedule_selection() {
        let s = select_schedule(32f64.powf(-0.1), 32, 512, 64.0, 4, 16.0, Branch::Auto).unwrap();
        assert_eq!(s.variant, Variant::LowDegree);
        assert_eq!(s.rows.len(), 11);
        let forced = select_schedule(32f64.powf(-0.1), 32, 512, 64.0, 4, 16.0, Branch::High);
        assert!(matches!(forced, Err(Error::Config(_))));
        let low = select_schedule(32f64.powf(-0.1), 32, 512, 64.0, 4, 16.0, Branch::Low).unwrap();
        assert_eq!(low.variant, Variant::LowDegree);
    }

    #[test]
    fn large_two_plus_isolated_blocks_follow_selection_counts() {
        // Bridges push Δ above 64, so the 65-cliques sit at layer 2 and are all large.
        let (g, h) = setup(&[65, 65, 65, 65], 30, 1.0 / 32.0, 5.5);
        let plan = RngPlan::new(3);
        let ctx = StageContext::new(&g, &h, &plan, &RunConfig::default());
        let mut st = ColoringState::default_palettes(&g, 0);
        let out = color_large(&ctx, &mut st, &vec![false; g.n()], &mut RoundLedger::new()).unwrap();
        assert!(check_proper(&g, &st).is_proper());
        assert!(out.set_size > 0);
        assert!(out.colored + out.vbad.len() <= out.set_size + g.n());
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.rows[0].len(), 6);
    }
}
