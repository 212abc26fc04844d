//! Leftover bookkeeping, deterministic fallbacks and the end-to-end drivers.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::bidding::{run_on_u, run_on_vsp, simple_bidding_loop, BiddingOutcome};
use crate::config::RunConfig;
use crate::decomposition::{assemble_hierarchy, compute_level, dense_vertices, BlockClass, DecompositionConfig, HierarchyView};
use crate::dense::{
    color_large, color_large_top, color_small_medium, color_small_medium_top, select_schedule, StageContext,
    StageOutcome, Variant,
};
use crate::error::{Error, Result};
use crate::graph::{ColoringState, Graph, Vertex};
use crate::initial::{initial_step, one_shot_coloring, OneShotParams};
use crate::runtime::{rounds, Phase, PhaseCharge, RngPlan, RoundLedger};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fate {
    Vbad,
    X,
    R,
}

/// Disjoint holding sets for uncolored vertices awaiting a deterministic finish.
#[derive(Debug, Clone)]
pub struct LeftoverPartition {
    fate: Vec<Option<Fate>>,
}

impl LeftoverPartition {
    pub fn new(n: usize) -> Self {
        LeftoverPartition { fate: vec![None; n] }
    }

    /// Panics if `v` is colored or already held.
    pub fn add(&mut self, st: &ColoringState, v: Vertex, fate: Fate) {
        assert!(!st.is_colored(v), "vertex {v} deposited while colored");
        let slot = &mut self.fate[v as usize];
        assert!(slot.is_none(), "vertex {v} already held as {:?}", slot.unwrap());
        *slot = Some(fate);
    }

    pub fn extend(&mut self, st: &ColoringState, vs: &[Vertex], fate: Fate) {
        for &v in vs {
            self.add(st, v, fate);
        }
    }

    pub fn fate(&self, v: Vertex) -> Option<Fate> {
        self.fate[v as usize]
    }

    pub fn held(&self) -> Vec<bool> {
        self.fate.iter().map(Option::is_some).collect()
    }

    pub fn members(&self, fate: Fate) -> Vec<Vertex> {
        (0..self.fate.len() as Vertex)
            .filter(|&v| self.fate[v as usize] == Some(fate))
            .collect()
    }

    pub fn len(&self, fate: Fate) -> usize {
        self.fate.iter().filter(|f| **f == Some(fate)).count()
    }
}

/// Connected components of the subgraph induced by `subset`, each sorted, ordered by
/// smallest member.
pub fn extract_components(g: &Graph, subset: &[Vertex]) -> Vec<Vec<Vertex>> {
    let mut inside = vec![false; g.n()];
    for &v in subset {
        inside[v as usize] = true;
    }
    let mut seen = vec![false; g.n()];
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    for &s in &sorted {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if inside[u as usize] && !seen[u as usize] {
                    seen[u as usize] = true;
                    comp.push(u);
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Eccentricity of the smallest member inside the component.
fn leader_radius(g: &Graph, comp: &[Vertex]) -> u64 {
    let mut dist: BTreeMap<Vertex, u64> = comp.iter().map(|&v| (v, u64::MAX)).collect();
    let mut queue = VecDeque::from([comp[0]]);
    dist.insert(comp[0], 0);
    let mut far = 0;
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        far = far.max(d);
        for &u in g.neighbors(v) {
            if let Some(du) = dist.get_mut(&u) {
                if *du == u64::MAX {
                    *du = d + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    far
}

fn greedy_component(g: &Graph, st: &mut ColoringState, comp: &[Vertex]) -> Result<()> {
    let mut inside = BTreeMap::new();
    for &v in comp {
        inside.insert(v, ());
    }
    for &v in comp {
        if st.is_colored(v) {
            continue;
        }
        let avail = st.available(g, v);
        let need = g
            .neighbors(v)
            .iter()
            .filter(|u| inside.contains_key(u) && !st.is_colored(**u))
            .count()
            + 1;
        let Some(&c) = avail.first() else {
            return Err(Error::Precondition(format!("vertex {v} has no available color")));
        };
        if avail.len() < need {
            return Err(Error::Precondition(format!(
                "vertex {v} has {} available colors for {} uncolored component neighbors",
                avail.len(),
                need - 1
            )));
        }
        st.set(v, c);
    }
    Ok(())
}

/// Gathers each component at its smallest member and colors it greedily in ID order.
/// Charges 2r+1 rounds for the largest leader radius r; nothing when there is nothing to do.
pub fn det_list_color_components(
    g: &Graph,
    st: &mut ColoringState,
    components: &[Vec<Vertex>],
    ledger: &mut RoundLedger,
    label: &str,
) -> Result<()> {
    let comps: Vec<&Vec<Vertex>> = components.iter().filter(|c| !c.is_empty()).collect();
    if comps.is_empty() {
        return Ok(());
    }
    let radius = comps.iter().map(|c| leader_radius(g, c)).max().unwrap_or(0);
    ledger.charge(label, 2 * radius + 1);
    for c in comps {
        greedy_component(g, st, c)?;
    }
    Ok(())
}

/// Iterated logarithm, base 2.
pub fn log_star(n: usize) -> u64 {
    let mut x = n as f64;
    let mut k = 0;
    while x > 1.0 {
        x = x.log2();
        k += 1;
    }
    k
}

/// Greedy coloring of the bounded-degree set R. Charged log⋆n + Δ_R + 1 rounds, the
/// budget of the standard color-reduction route.
pub fn color_r(g: &Graph, st: &mut ColoringState, r: &[Vertex], ledger: &mut RoundLedger) -> Result<usize> {
    if r.is_empty() {
        return Ok(0);
    }
    let mut mask = vec![false; g.n()];
    for &v in r {
        mask[v as usize] = true;
    }
    let dr = g.induced_max_degree(&mask);
    ledger.charge("step4-R", log_star(g.n()) + dr as u64 + 1);
    for comp in extract_components(g, r) {
        greedy_component(g, st, &comp)?;
    }
    Ok(dr)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Full,
    Excess,
    Sparse,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunStats {
    pub seed: u64,
    pub mode: Mode,
    pub config: RunConfig,
    pub n: usize,
    pub delta: usize,
    pub ell: usize,
    pub epsilons: Vec<f64>,
    pub rounds: Vec<PhaseCharge>,
    pub total_rounds: u64,
    pub colored_by_stage: BTreeMap<String, usize>,
    pub vbad_size: usize,
    pub vbad_components: Vec<usize>,
    pub x_components: Vec<usize>,
    pub r_size: usize,
    pub r_max_degree: usize,
    /// Layer-1 large-block table in use.
    pub branch: Option<Variant>,
    pub stages: Vec<StageOutcome>,
    pub bidding: BTreeMap<String, BiddingOutcome>,
    /// Uncolored vertices found outside every holding set before the last step; always 0
    /// unless a stage mislaid a vertex.
    pub unaccounted: usize,
}

impl RunStats {
    fn new(seed: u64, mode: Mode, cfg: &RunConfig, g: &Graph, dcfg: Option<&DecompositionConfig>) -> Self {
        RunStats {
            seed,
            mode,
            config: cfg.clone(),
            n: g.n(),
            delta: g.max_degree(),
            ell: dcfg.map_or(0, |d| d.ell),
            epsilons: dcfg.map_or_else(Vec::new, |d| d.levels().to_vec()),
            rounds: Vec::new(),
            total_rounds: 0,
            colored_by_stage: BTreeMap::new(),
            vbad_size: 0,
            vbad_components: Vec::new(),
            x_components: Vec::new(),
            r_size: 0,
            r_max_degree: 0,
            branch: None,
            stages: Vec::new(),
            bidding: BTreeMap::new(),
            unaccounted: 0,
        }
    }

    fn finish(&mut self, ledger: RoundLedger) {
        self.total_rounds = ledger.total();
        self.rounds = ledger.entries().to_vec();
    }

    /// Rounds charged by Steps 1 to 3.
    pub fn constant_phase_rounds(&self) -> Vec<PhaseCharge> {
        self.rounds
            .iter()
            .filter(|e| ["step1", "step2", "step3"].iter().any(|p| e.phase.starts_with(p)))
            .cloned()
            .collect()
    }
}

fn require_palettes(g: &Graph, st: &ColoringState, extra: usize) -> Result<()> {
    let need = g.max_degree() + extra;
    match (0..g.n() as Vertex).find(|&v| st.palette(v).len() < need) {
        Some(v) => Err(Error::Precondition(format!(
            "vertex {v} has {} palette colors, needs at least {need}",
            st.palette(v).len()
        ))),
        None => Ok(()),
    }
}

fn finish_vbad(g: &Graph, st: &mut ColoringState, part: &LeftoverPartition, stats: &mut RunStats, ledger: &mut RoundLedger) -> Result<()> {
    let uncolored = st.uncolored_vertices();
    stats.unaccounted = uncolored.iter().filter(|&&v| part.fate(v).is_none()).count();
    stats.vbad_size = part.len(Fate::Vbad);
    let comps = extract_components(g, &uncolored);
    stats.vbad_components = comps.iter().map(Vec::len).collect();
    stats.vbad_components.sort_unstable_by(|a, b| b.cmp(a));
    det_list_color_components(g, st, &comps, ledger, "step8-vbad")
}

fn tally(stats: &mut RunStats, stage: &str, colored: usize) {
    *stats.colored_by_stage.entry(stage.to_string()).or_default() += colored;
}

/// Steps 1 to 3: levels, OneShotColoring with the V⋆/V_bad split, hierarchy, six dense
/// stages. Leaves R, X and V_bad in `part`.
fn constant_time_steps(
    g: &Graph,
    st: &mut ColoringState,
    cfg: &RunConfig,
    dcfg: &DecompositionConfig,
    plan: &RngPlan,
    part: &mut LeftoverPartition,
    stats: &mut RunStats,
    ledger: &mut RoundLedger,
) -> Result<HierarchyView> {
    let levels: Vec<_> = dcfg
        .levels()
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            ledger.charge(&format!("step1-level{}", i + 1), rounds::FRIEND_EDGES + rounds::CLIQUE_LEADER);
            compute_level(g, e)
        })
        .collect();

    let before = st.colored_count();
    let init = initial_step(g, st, OneShotParams { p: cfg.p }, &levels, cfg.c_exc, plan, ledger);
    *st = init.state;
    tally(stats, "step2-oneshot", st.colored_count() - before);
    part.extend(st, &init.vbad, Fate::Vbad);
    tally(stats, "step2-split-vbad", 0);

    let h = assemble_hierarchy(g, levels, &init.vstar, dcfg);
    ledger.charge("step2-partition", rounds::GATHER);

    let ctx = StageContext::new(g, &h, plan, cfg);
    let record = |stats: &mut RunStats, part: &mut LeftoverPartition, st: &ColoringState, out: StageOutcome| {
        tally(stats, &out.stage, out.colored);
        part.extend(st, &out.vbad, Fate::Vbad);
        stats.stages.push(out);
    };
    for (class, top) in [
        (BlockClass::Small, false),
        (BlockClass::Small, true),
        (BlockClass::Medium, false),
        (BlockClass::Medium, true),
    ] {
        let removed = part.held();
        let out = if top {
            color_small_medium_top(&ctx, st, class, &removed, ledger)?
        } else {
            color_small_medium(&ctx, st, class, &removed, ledger)?
        };
        record(stats, part, st, out);
    }
    let removed = part.held();
    let out = color_large(&ctx, st, &removed, ledger)?;
    record(stats, part, st, out);

    let schedule = select_schedule(h.eps(1), h.delta, g.n(), cfg.beta, cfg.c, cfg.k_const, cfg.branch)?;
    stats.branch = Some(schedule.variant);
    let removed = part.held();
    let top = color_large_top(&ctx, st, &removed, &schedule, ledger)?;
    part.extend(st, &top.r, Fate::R);
    part.extend(st, &top.x, Fate::X);
    record(stats, part, st, top.stage);
    Ok(h)
}

/// Full pipeline: Steps 1 to 3, then R, X, U, V_sp and finally V_bad. With ℓ = 0 the whole
/// graph goes to the deterministic fallback.
pub fn run_full(g: &Graph, palettes: ColoringState, cfg: &RunConfig, seed: u64) -> Result<(ColoringState, RunStats)> {
    assert_eq!(palettes.n(), g.n());
    require_palettes(g, &palettes, 1)?;
    let delta = g.max_degree();
    let dcfg = cfg.decomposition(delta)?;
    let mut stats = RunStats::new(seed, Mode::Full, cfg, g, Some(&dcfg));
    let mut ledger = RoundLedger::new();
    let mut st = palettes;
    let mut part = LeftoverPartition::new(g.n());
    let plan = RngPlan::new(seed);

    if dcfg.ell == 0 {
        let all = st.uncolored_vertices();
        part.extend(&st, &all, Fate::Vbad);
        finish_vbad(g, &mut st, &part, &mut stats, &mut ledger)?;
        tally(&mut stats, "step8-vbad", all.len());
        stats.finish(ledger);
        return Ok((st, stats));
    }

    let h = constant_time_steps(g, &mut st, cfg, &dcfg, &plan, &mut part, &mut stats, &mut ledger)?;

    let r = part.members(Fate::R);
    stats.r_size = r.len();
    stats.r_max_degree = color_r(g, &mut st, &r, &mut ledger)?;
    tally(&mut stats, "step4-R", r.len());

    let x = part.members(Fate::X);
    let xc = extract_components(g, &x);
    stats.x_components = xc.iter().map(Vec::len).collect();
    det_list_color_components(g, &mut st, &xc, &mut ledger, "step5-X")?;
    tally(&mut stats, "step5-X", x.len());

    let held = part.held();
    let u: Vec<Vertex> = (0..g.n() as Vertex)
        .filter(|&v| !st.is_colored(v) && !held[v as usize] && h.layer(v).is_some_and(|i| i >= 2))
        .collect();
    let before = st.colored_count();
    let out = run_on_u(g, &mut st, &h, &u, cfg.eta, cfg.max_bidding_iterations, &plan, &mut ledger);
    tally(&mut stats, "step6-U", st.colored_count() - before);
    part.extend(&st, &out.vbad, Fate::Vbad);
    stats.bidding.insert("step6-U".into(), out);

    let held = part.held();
    let vsp: Vec<Vertex> = h.sparse.iter().copied().filter(|&v| !st.is_colored(v) && !held[v as usize]).collect();
    let before = st.colored_count();
    let out = run_on_vsp(g, &mut st, &vsp, cfg.gamma_sp, delta, cfg.max_bidding_iterations, &plan, &mut ledger);
    tally(&mut stats, "step7-Vsp", st.colored_count() - before);
    part.extend(&st, &out.vbad, Fate::Vbad);
    stats.bidding.insert("step7-Vsp".into(), out);

    let before = st.colored_count();
    finish_vbad(g, &mut st, &part, &mut stats, &mut ledger)?;
    tally(&mut stats, "step8-vbad", st.colored_count() - before);
    stats.finish(ledger);
    Ok((st, stats))
}

/// ⌈(log₂ n)^γ⌉.
pub fn excess_palette_extra(n: usize, gamma_pal: f64) -> usize {
    (n.max(2) as f64).log2().powf(gamma_pal).ceil() as usize
}

/// (Δ + log^γ n)-list coloring. Small Δ runs the simple loop on the whole graph with
/// ρ = log^γ n/Δ − 1; otherwise Steps 1, 2, 3, 6, 7 and then the simple loop on R ∪ X.
pub fn run_excess_mode(g: &Graph, palettes: ColoringState, cfg: &RunConfig, seed: u64) -> Result<(ColoringState, RunStats)> {
    assert_eq!(palettes.n(), g.n());
    cfg.validate()?;
    let extra = excess_palette_extra(g.n(), cfg.gamma_pal);
    require_palettes(g, &palettes, extra)?;
    let delta = g.max_degree();
    let logn = (g.n().max(2) as f64).log2();
    let mut ledger = RoundLedger::new();
    let mut st = palettes;
    let mut part = LeftoverPartition::new(g.n());
    let plan = RngPlan::new(seed);

    let small = delta as f64 <= logn.powf(cfg.gamma_pal - 1.0);
    let dcfg = if small { None } else { Some(cfg.decomposition(delta)?) };
    let mut stats = RunStats::new(seed, Mode::Excess, cfg, g, dcfg.as_ref());

    let leftover: Vec<Vertex> = match &dcfg {
        Some(d) if d.ell > 0 => {
            let h = constant_time_steps(g, &mut st, cfg, d, &plan, &mut part, &mut stats, &mut ledger)?;
            let held = part.held();
            let u: Vec<Vertex> = (0..g.n() as Vertex)
                .filter(|&v| !st.is_colored(v) && !held[v as usize] && h.layer(v).is_some_and(|i| i >= 2))
                .collect();
            let out = run_on_u(g, &mut st, &h, &u, cfg.eta, cfg.max_bidding_iterations, &plan, &mut ledger);
            part.extend(&st, &out.vbad, Fate::Vbad);
            stats.bidding.insert("step6-U".into(), out);
            let held = part.held();
            let vsp: Vec<Vertex> = h.sparse.iter().copied().filter(|&v| !st.is_colored(v) && !held[v as usize]).collect();
            let out = run_on_vsp(g, &mut st, &vsp, cfg.gamma_sp, delta, cfg.max_bidding_iterations, &plan, &mut ledger);
            part.extend(&st, &out.vbad, Fate::Vbad);
            stats.bidding.insert("step7-Vsp".into(), out);
            let mut rx = part.members(Fate::R);
            stats.r_size = rx.len();
            rx.extend(part.members(Fate::X));
            rx.sort_unstable();
            rx
        }
        _ => st.uncolored_vertices(),
    };

    let mut mask = vec![false; g.n()];
    for &v in &leftover {
        mask[v as usize] = true;
    }
    let dprime = g.induced_max_degree(&mask).max(1) as f64;
    let rho = (logn.powf(cfg.gamma_pal) / dprime - 1.0).max(f64::MIN_POSITIVE);
    let before = st.colored_count();
    let out = simple_bidding_loop(
        g,
        &mut st,
        &leftover,
        rho,
        dprime,
        cfg.max_bidding_iterations,
        &plan,
        Phase::BIDDING.stage(9),
        &mut ledger,
        "excess-simple",
    );
    tally(&mut stats, "excess-simple", st.colored_count() - before);
    let fresh: Vec<Vertex> = out.vbad.iter().copied().filter(|&v| part.fate(v).is_none()).collect();
    part.extend(&st, &fresh, Fate::Vbad);
    stats.bidding.insert("excess-simple".into(), out);

    let before = st.colored_count();
    finish_vbad(g, &mut st, &part, &mut stats, &mut ledger)?;
    tally(&mut stats, "step8-vbad", st.colored_count() - before);
    stats.finish(ledger);
    Ok((st, stats))
}

/// Every vertex must be `cfg.sparse_epsilon`-sparse. OneShotColoring, then bidding with
/// p(v) = c_exc·ε²Δ and C = c_exc·ε², then the fallback.
pub fn run_sparse_mode(g: &Graph, palettes: ColoringState, cfg: &RunConfig, seed: u64) -> Result<(ColoringState, RunStats)> {
    assert_eq!(palettes.n(), g.n());
    cfg.validate()?;
    require_palettes(g, &palettes, 1)?;
    let eps = cfg.sparse_epsilon;
    if let Some(v) = dense_vertices(g, eps).iter().position(|&d| d) {
        return Err(Error::Precondition(format!("vertex {v} is {eps}-dense")));
    }
    let delta = g.max_degree();
    let mut stats = RunStats::new(seed, Mode::Sparse, cfg, g, None);
    let mut ledger = RoundLedger::new();
    let plan = RngPlan::new(seed);
    let mut part = LeftoverPartition::new(g.n());
    let st0 = palettes;
    let mut st = one_shot_coloring(g, &st0, cfg.p, &plan, &mut ledger);
    tally(&mut stats, "step2-oneshot", st.colored_count());

    let gamma = cfg.c_exc * eps * eps;
    let left = st.uncolored_vertices();
    let before = st.colored_count();
    let out = run_on_vsp(g, &mut st, &left, gamma, delta, cfg.max_bidding_iterations, &plan, &mut ledger);
    tally(&mut stats, "sparse-bidding", st.colored_count() - before);
    part.extend(&st, &out.vbad, Fate::Vbad);
    stats.bidding.insert("sparse-bidding".into(), out);

    let before = st.colored_count();
    finish_vbad(g, &mut st, &part, &mut stats, &mut ledger)?;
    tally(&mut stats, "step8-vbad", st.colored_count() - before);
    stats.finish(ledger);
    Ok((st, stats))
}
