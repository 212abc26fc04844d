//! Monte-Carlo checks of the probabilistic guarantees. Each check has a seeded
//! corruption that must flip it to FAIL.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Binomial, DiscreteCDF};
use statrs::function::factorial::binomial;

use crate::bidding::{bidding_iteration, simple_bidding_loop};
use crate::config::RunConfig;
use crate::dense::{dense_step_v1, dense_step_v2, selection_count, ClusterSet};
use crate::generate::GeneratorSpec;
use crate::graph::{ColoringState, Graph, OrientationView, Vertex};
use crate::initial::{excess_all, one_shot_coloring};
use crate::runtime::{Phase, RngPlan, RoundLedger};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatTestKind {
    Dominance,
    SelectedTail,
    Decay,
    LoopResidue,
    NumUncolored,
    ExcessGain,
}

/// Planted instance: 20 cliques of 50, the last one sees 10 external vertices each.
const CLUSTERS: usize = 20;
const CLUSTER_SIZE: usize = 50;
const EXTERNAL: usize = 10;
const PLANTED_PALETTE: usize = 400;
const V2_DELTA: f64 = 0.1;
/// Frozen constant of the selected-vertex tail bound C(|T|,t)·(κδ)^t.
pub const KAPPA: f64 = 1.0;

const BIDDING_N: usize = 2048;
const BIDDING_D: usize = 64;
const DECAY_C: f64 = 6.0;
const ONE_SHOT_N: usize = 1024;
const ONE_SHOT_D: usize = 64;
const ONE_SHOT_P: f64 = 0.2;

impl StatTestKind {
    pub const ALL: [StatTestKind; 6] = [
        StatTestKind::Dominance,
        StatTestKind::SelectedTail,
        StatTestKind::Decay,
        StatTestKind::LoopResidue,
        StatTestKind::NumUncolored,
        StatTestKind::ExcessGain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StatTestKind::Dominance => "dense-v1-binomial-dominance",
            StatTestKind::SelectedTail => "dense-v2-selected-tail",
            StatTestKind::Decay => "bidding-one-iteration-decay",
            StatTestKind::LoopResidue => "bidding-loop-residue",
            StatTestKind::NumUncolored => "one-shot-uncolored-neighbors",
            StatTestKind::ExcessGain => "one-shot-excess-gain",
        }
    }

    /// The guarantee under test, as stated for the algorithm.
    pub fn anchor(self) -> &'static str {
        match self {
            StatTestKind::Dominance => "DenseColoringStep v1: Pr[uncolored in T >= t] <= Pr[Binomial(|T|, delta) >= t]",
            StatTestKind::SelectedTail => {
                "DenseColoringStep v2: Pr[the number of uncolored vertices in T is at least t] <= C(|T|,t)(kappa delta)^t"
            }
            StatTestKind::Decay => "ColorBidding: one iteration at C >= 6 leaves at most e^(-C/6) uncolored",
            StatTestKind::LoopResidue => "ColorBidding C_k loop with |Psi| >= (1+rho)Delta colors all but a vanishing fraction",
            StatTestKind::NumUncolored => "OneShotColoring: at least (1 - 1.5p)|N(v)| neighbors stay uncolored",
            StatTestKind::ExcessGain => "OneShotColoring: an eps-sparse vertex gains Omega(eps^2 Delta) excess colors",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            StatTestKind::Dominance | StatTestKind::SelectedTail | StatTestKind::Decay => 2000,
            StatTestKind::LoopResidue | StatTestKind::NumUncolored => 100,
            StatTestKind::ExcessGain => 200,
        }
    }

    /// Fewest trials with declared power. Tail bands: 3·SE ≤ 0.07 at any tail value needs
    /// 500. Frequency tests pool vertices, so tens of trials already give thousands of samples.
    pub fn min_trials(self) -> usize {
        match self {
            StatTestKind::Dominance | StatTestKind::SelectedTail => 500,
            StatTestKind::Decay => 100,
            StatTestKind::LoopResidue | StatTestKind::NumUncolored => 20,
            StatTestKind::ExcessGain => 50,
        }
    }

    pub fn corruption(self) -> &'static str {
        match self {
            StatTestKind::Dominance | StatTestKind::SelectedTail => {
                "doubled delta: palettes halved so the true rate doubles, oracle keeps the original delta"
            }
            StatTestKind::Decay | StatTestKind::LoopResidue => "halved palette: |Psi| = Delta+1 instead of 2 Delta",
            StatTestKind::NumUncolored => "doubled p: participation 0.4, threshold kept at p = 0.2",
            StatTestKind::ExcessGain => "quartered p: participation 0.05",
        }
    }
}

/// One point of an empirical tail curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPoint {
    pub t: usize,
    pub empirical: f64,
    pub bound: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatTest {
    pub name: &'static str,
    pub anchor: &'static str,
    pub corruption: Option<&'static str>,
    pub trials: usize,
    pub samples: usize,
    pub observed: f64,
    pub threshold: f64,
    /// "<=" or ">=": how `observed` must compare with `threshold`.
    pub comparison: &'static str,
    pub verdict: Verdict,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<TailPoint>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StatSpec {
    pub seed: u64,
    /// Overrides every test's default trial count.
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatReport {
    pub seed: u64,
    pub tests: Vec<StatTest>,
    /// The same checks under their corruption; each should FAIL.
    pub controls: Vec<StatTest>,
    pub verdict: Verdict,
}

impl StatReport {
    pub fn controls_flipped(&self) -> bool {
        self.controls.iter().all(|c| c.verdict == Verdict::Fail)
    }
}

/// Runs every check and its negative control.
pub fn stat_suite(spec: &StatSpec) -> StatReport {
    let mut tests = Vec::new();
    let mut controls = Vec::new();
    for kind in StatTestKind::ALL {
        tests.push(run_stat_test(kind, spec, false));
        controls.push(run_stat_test(kind, spec, true));
    }
    let verdict = if tests.iter().chain(&controls).any(|t| t.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else if tests.iter().all(|t| t.verdict == Verdict::Pass) && controls.iter().all(|t| t.verdict == Verdict::Fail) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    StatReport {
        seed: spec.seed,
        tests,
        controls,
        verdict,
    }
}

struct Measured {
    samples: usize,
    observed: f64,
    threshold: f64,
    at_most: bool,
    detail: String,
    curve: Option<Vec<TailPoint>>,
}

pub fn run_stat_test(kind: StatTestKind, spec: &StatSpec, corrupt: bool) -> StatTest {
    let trials = spec.trials.unwrap_or(kind.default_trials());
    let mut out = StatTest {
        name: kind.name(),
        anchor: kind.anchor(),
        corruption: corrupt.then(|| kind.corruption()),
        trials,
        samples: 0,
        observed: f64::NAN,
        threshold: f64::NAN,
        comparison: "",
        verdict: Verdict::Inconclusive,
        detail: String::new(),
        curve: None,
    };
    if trials < kind.min_trials() {
        out.detail = format!("{trials} trials, at least {} needed", kind.min_trials());
        return out;
    }
    let seed = spec.seed ^ ((kind as u64 + 1) << 48);
    let m = match kind {
        StatTestKind::Dominance => dominance(seed, trials, corrupt),
        StatTestKind::SelectedTail => selected_tail(seed, trials, corrupt),
        StatTestKind::Decay => decay(seed, trials, corrupt),
        StatTestKind::LoopResidue => loop_residue(seed, trials, corrupt),
        StatTestKind::NumUncolored => num_uncolored(seed, trials, corrupt),
        StatTestKind::ExcessGain => excess_gain(seed, trials, corrupt),
    };
    let pass = if m.at_most {
        m.observed <= m.threshold
    } else {
        m.observed >= m.threshold
    };
    out.samples = m.samples;
    out.observed = m.observed;
    out.threshold = m.threshold;
    out.comparison = if m.at_most { "<=" } else { ">=" };
    out.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
    out.detail = m.detail;
    out.curve = m.curve;
    out
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

/// Cliques `clusters × size` on consecutive IDs; each vertex of the last clique gets
/// `external` distinct neighbors in the other cliques.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub graph: Graph,
    pub clusters: Vec<Vec<Vertex>>,
    /// Index of the clique whose uncolored count is tracked.
    pub target: usize,
    pub external: usize,
}

impl PlantedInstance {
    pub fn new(clusters: usize, size: usize, external: usize, seed: u64) -> Self {
        assert!(clusters >= 2 && external <= (clusters - 1) * size);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        let groups: Vec<Vec<Vertex>> = (0..clusters)
            .map(|j| ((j * size) as Vertex..((j + 1) * size) as Vertex).collect())
            .collect();
        for members in &groups {
            for (i, &u) in members.iter().enumerate() {
                for &v in &members[i + 1..] {
                    edges.push((u, v));
                }
            }
        }
        let outside = (clusters - 1) * size;
        for &v in &groups[clusters - 1] {
            for i in sample(&mut rng, outside, external) {
                edges.push((i as Vertex, v));
            }
        }
        PlantedInstance {
            graph: Graph::from_edges(clusters * size, &edges).expect("planted edges are simple"),
            clusters: groups,
            target: clusters - 1,
            external,
        }
    }

    /// Per-vertex failure bound for a target vertex with palette [0, palette):
    /// external out-neighbors over the colors still open after the rest of its clique drew.
    pub fn delta(&self, palette: usize) -> f64 {
        let size = self.clusters[self.target].len();
        self.external as f64 / (palette - (size - 1)) as f64
    }

    pub fn cluster_set(&self) -> ClusterSet {
        ClusterSet::new(&self.graph, self.clusters.clone(), &vec![1; self.graph.n()]).expect("cliques are valid clusters")
    }

    pub fn state(&self, palette: usize) -> ColoringState {
        ColoringState::new(vec![(0..palette as u32).collect(); self.graph.n()])
    }

    fn target_colored(&self, st: &ColoringState) -> usize {
        self.clusters[self.target].iter().filter(|&&v| st.is_colored(v)).count()
    }
}

/// Empirical tail of `counts` against `bound(t)` with a 3-standard-error band.
/// Covers t = 1..=max_t. Returns the curve and the largest overshoot emp − bound − 3·SE.
pub fn tail_check(counts: &[usize], max_t: usize, bound: impl Fn(usize) -> f64) -> (Vec<TailPoint>, f64) {
    let trials = counts.len() as f64;
    let mut curve = Vec::with_capacity(max_t + 1);
    let mut worst = f64::NEG_INFINITY;
    for t in 1..=max_t {
        let empirical = counts.iter().filter(|&&c| c >= t).count() as f64 / trials;
        let b = bound(t).clamp(0.0, 1.0);
        let std_err = (b * (1.0 - b) / trials).sqrt();
        worst = worst.max(empirical - b - 3.0 * std_err);
        curve.push(TailPoint {
            t,
            empirical,
            bound: b,
            std_err,
        });
    }
    (curve, worst)
}

/// Pr[Binomial(n, p) ≥ t].
pub fn binomial_tail(n: usize, p: f64, t: usize) -> f64 {
    if t == 0 {
        return 1.0;
    }
    Binomial::new(p, n as u64).expect("valid binomial").sf(t as u64 - 1)
}

fn planted_counts(seed: u64, trials: usize, corrupt: bool, v2: bool) -> (PlantedInstance, f64, Vec<usize>) {
    let inst = PlantedInstance::new(CLUSTERS, CLUSTER_SIZE, EXTERNAL, seed);
    let claimed = inst.delta(PLANTED_PALETTE);
    let palette = if corrupt { PLANTED_PALETTE / 2 } else { PLANTED_PALETTE };
    let cs = inst.cluster_set();
    let o = cs.orientation(&vec![1; inst.graph.n()]);
    let deltas = vec![V2_DELTA; cs.len()];
    let selected = selection_count(CLUSTER_SIZE, V2_DELTA);
    let counts = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut st = inst.state(palette);
            let plan = RngPlan::new(trial_seed(seed, trial));
            let mut l = RoundLedger::new();
            if v2 {
                dense_step_v2(&inst.graph, &mut st, &cs, &deltas, &o, &plan, Phase::DENSE_V2, 0, &mut l, "stat")
                    .expect("planted palettes leave room");
                selected - inst.target_colored(&st)
            } else {
                dense_step_v1(&inst.graph, &mut st, &cs, &o, &plan, Phase::DENSE_V1, 0, &mut l, "stat")
                    .expect("planted palettes leave room");
                CLUSTER_SIZE - inst.target_colored(&st)
            }
        })
        .collect();
    (inst, claimed, counts)
}

fn dominance(seed: u64, trials: usize, corrupt: bool) -> Measured {
    let (_, delta, counts) = planted_counts(seed, trials, corrupt, false);
    let (curve, worst) = tail_check(&counts, CLUSTER_SIZE, |t| binomial_tail(CLUSTER_SIZE, delta, t));
    Measured {
        samples: trials,
        observed: worst,
        threshold: 0.0,
        at_most: true,
        detail: format!("|T| = {CLUSTER_SIZE}, delta = {delta:.5}; observed is max_t of empirical - bound - 3 SE"),
        curve: Some(curve),
    }
}

fn selected_tail(seed: u64, trials: usize, corrupt: bool) -> Measured {
    let (_, delta, counts) = planted_counts(seed, trials, corrupt, true);
    let size = selection_count(CLUSTER_SIZE, V2_DELTA);
    let (curve, worst) = tail_check(&counts, size, |t| {
        binomial(size as u64, t as u64) * (KAPPA * delta).powi(t as i32)
    });
    Measured {
        samples: trials,
        observed: worst,
        threshold: 0.0,
        at_most: true,
        detail: format!(
            "|T| = {size} selected, delta = {delta:.5}, kappa = {KAPPA}; observed is max_t of empirical - bound - 3 SE"
        ),
        curve: Some(curve),
    }
}

fn regular(n: usize, d: usize, seed: u64) -> Graph {
    GeneratorSpec::Regular { n, d }.generate(seed).expect("valid regular parameters")
}

/// |Ψ| = 2Δ, or Δ+1 when corrupted.
fn bidding_state(g: &Graph, corrupt: bool) -> ColoringState {
    let d = g.max_degree();
    ColoringState::default_palettes(g, if corrupt { 0 } else { d - 1 })
}

fn decay(seed: u64, trials: usize, corrupt: bool) -> Measured {
    let g = regular(BIDDING_N, BIDDING_D, seed);
    let active = vec![true; g.n()];
    let o = OrientationView::by_id(g.n());
    let uncolored: usize = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut st = bidding_state(&g, corrupt);
            let plan = RngPlan::new(trial_seed(seed, trial));
            bidding_iteration(&g, &mut st, &active, &o, DECAY_C, &plan, Phase::BIDDING, 0, &mut RoundLedger::new(), "stat");
            g.n() - st.colored_count()
        })
        .sum();
    let samples = trials * g.n();
    Measured {
        samples,
        observed: uncolored as f64 / samples as f64,
        threshold: (-DECAY_C / 6.0).exp() + 0.05,
        at_most: true,
        detail: format!("n = {BIDDING_N}, Delta = {BIDDING_D}, C = {DECAY_C}; observed is the uncolored fraction"),
        curve: None,
    }
}

fn loop_residue(seed: u64, trials: usize, corrupt: bool) -> Measured {
    let g = regular(BIDDING_N, BIDDING_D, seed);
    let all: Vec<Vertex> = g.vertices().collect();
    let max_iter = RunConfig::default().max_bidding_iterations;
    let worst = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut st = bidding_state(&g, corrupt);
            let plan = RngPlan::new(trial_seed(seed, trial));
            simple_bidding_loop(&g, &mut st, &all, 1.0, BIDDING_D as f64, max_iter, &plan, Phase::BIDDING, &mut RoundLedger::new(), "stat");
            (g.n() - st.colored_count()) as f64 / g.n() as f64
        })
        .reduce(|| 0.0, f64::max);
    Measured {
        samples: trials,
        observed: worst,
        threshold: 0.01,
        at_most: true,
        detail: format!("n = {BIDDING_N}, Delta = {BIDDING_D}, rho = 1; observed is the worst per-seed uncolored fraction"),
        curve: None,
    }
}

fn num_uncolored(seed: u64, trials: usize, corrupt: bool) -> Measured {
    let g = regular(ONE_SHOT_N, ONE_SHOT_D, seed);
    let delta = g.max_degree() as f64;
    let p = if corrupt { 2.0 * ONE_SHOT_P } else { ONE_SHOT_P };
    let eligible: Vec<Vertex> = g.vertices().filter(|&v| 6.0 * g.degree(v) as f64 >= 5.0 * delta).collect();
    let (hits, samples) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let st0 = ColoringState::default_palettes(&g, 0);
            let st = one_shot_coloring(&g, &st0, p, &RngPlan::new(trial_seed(seed, trial)), &mut RoundLedger::new());
            let hits = eligible
                .iter()
                .filter(|&&v| st.uncolored_neighbors(&g, v) as f64 >= (1.0 - 1.5 * ONE_SHOT_P) * g.degree(v) as f64)
                .count();
            (hits, eligible.len())
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Measured {
        samples,
        observed: hits as f64 / samples.max(1) as f64,
        threshold: 0.99,
        at_most: false,
        detail: format!("p = {p}, Delta = {ONE_SHOT_D}; observed is the fraction of (vertex, trial) samples meeting the bound"),
        curve: None,
    }
}

fn excess_gain(seed: u64, trials: usize, corrupt: bool) -> Measured {
    let g = GeneratorSpec::TriangleFreeRegular {
        n: ONE_SHOT_N,
        d: ONE_SHOT_D,
    }
    .generate(seed)
    .expect("valid triangle-free parameters");
    let cfg = RunConfig::default();
    let delta = g.max_degree() as f64;
    let eps = cfg.sparse_epsilon;
    let need = cfg.c_exc * eps * eps * delta;
    let p = if corrupt { ONE_SHOT_P / 4.0 } else { ONE_SHOT_P };
    let st0 = ColoringState::default_palettes(&g, 0);
    let before = excess_all(&g, &st0);
    let totals = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let st = one_shot_coloring(&g, &st0, p, &RngPlan::new(trial_seed(seed, trial)), &mut RoundLedger::new());
            excess_all(&g, &st)
                .iter()
                .zip(&before)
                .map(|(a, b)| a - b)
                .collect::<Vec<i64>>()
        })
        .reduce(
            || vec![0; g.n()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let good = totals.iter().filter(|&&s| s as f64 / trials as f64 >= need).count();
    Measured {
        samples: trials * g.n(),
        observed: good as f64 / g.n() as f64,
        threshold: 0.99,
        at_most: false,
        detail: format!(
            "p = {p}, Delta = {ONE_SHOT_D}, eps = {eps}, c_exc = {}; observed is the fraction of vertices whose mean gain reaches {need:.4}",
            cfg.c_exc
        ),
        curve: None,
    }
}
