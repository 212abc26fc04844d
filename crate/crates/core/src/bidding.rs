//! ColorBidding, the escalating C_k loop, and the drivers for U and V_sp.

use rand::seq::index::sample;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::HierarchyView;
use crate::graph::{orient, Color, ColoringState, Graph, OrientationView, Vertex};
use crate::runtime::{rounds, Phase, RngPlan, RoundLedger};

/// Contention constant C, per-vertex excess lower bounds p(v), and the derived C_k schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcessParams {
    #[serde(skip)]
    pub p: Vec<f64>,
    pub p_star: f64,
    pub d_star: usize,
    pub c: f64,
    pub lambda: f64,
    pub schedule: Vec<f64>,
    /// The schedule hit the iteration cap before reaching √p⋆.
    pub truncated: bool,
}

impl ExcessParams {
    pub fn new(p: Vec<f64>, p_star: f64, d_star: usize, c: f64, max_iterations: usize) -> Self {
        let lambda = lambda_for(c);
        let (schedule, truncated) = c_schedule(p_star, c, lambda, max_iterations);
        ExcessParams {
            p,
            p_star,
            d_star,
            c,
            lambda,
            schedule,
            truncated,
        }
    }
}

/// λ = 1 when C ≥ 6, else the largest 2^(−j) with (1+λ)e^(−C/6) < 1.
pub fn lambda_for(c: f64) -> f64 {
    if c >= 6.0 {
        return 1.0;
    }
    let decay = (-c / 6.0).exp();
    let mut lambda = 1.0;
    for _ in 0..1100 {
        if (1.0 + lambda) * decay < 1.0 {
            return lambda;
        }
        lambda /= 2.0;
    }
    lambda
}

/// C₁ = min(√p⋆, C), C_k = min(√p⋆, C_{k−1}/((1+λ)e^(−C_{k−1}/6))), stopping at √p⋆ or
/// after `cap` entries.
pub fn c_schedule(p_star: f64, c: f64, lambda: f64, cap: usize) -> (Vec<f64>, bool) {
    let top = p_star.max(0.0).sqrt();
    let mut ck = top.min(c);
    let mut out = vec![ck];
    while ck < top {
        if out.len() >= cap {
            return (out, true);
        }
        ck = top.min(ck / ((1.0 + lambda) * (-ck / 6.0).exp()));
        out.push(ck);
    }
    (out, false)
}

/// Bid probability C/(2|Ψ|), clamped to 1.
pub fn bid_probability(c: f64, palette: usize) -> f64 {
    if palette == 0 {
        0.0
    } else {
        (c / (2.0 * palette as f64)).min(1.0)
    }
}

fn bids(st: &ColoringState, g: &Graph, v: Vertex, c: f64, plan: &RngPlan, phase: Phase, iteration: u32) -> Vec<Color> {
    let avail = st.available(g, v);
    let q = bid_probability(c, avail.len());
    if q <= 0.0 {
        return Vec::new();
    }
    let mut rng = plan.stream(v, phase, iteration);
    let k = Binomial::new(avail.len() as u64, q)
        .expect("valid binomial parameters")
        .sample(&mut rng) as usize;
    let mut chosen: Vec<Color> = sample(&mut rng, avail.len(), k).into_iter().map(|i| avail[i]).collect();
    chosen.sort_unstable();
    chosen
}

/// One ColorBidding round over the uncolored vertices of `active`: each bids on every
/// available color independently with probability C/(2|Ψ(v)|) and keeps its smallest
/// bid not matched by an out-neighbor's bid. Charges 1 round; returns how many committed.
#[allow(clippy::too_many_arguments)]
pub fn bidding_iteration(
    g: &Graph,
    st: &mut ColoringState,
    active: &[bool],
    orient: &OrientationView,
    c: f64,
    plan: &RngPlan,
    phase: Phase,
    iteration: u32,
    ledger: &mut RoundLedger,
    label: &str,
) -> usize {
    ledger.charge(label, rounds::EXCHANGE);
    let snapshot: &ColoringState = st;
    let bid: Vec<Vec<Color>> = (0..g.n() as Vertex)
        .into_par_iter()
        .map(|v| {
            if active[v as usize] && !snapshot.is_colored(v) {
                bids(snapshot, g, v, c, plan, phase, iteration)
            } else {
                Vec::new()
            }
        })
        .collect();
    let keep: Vec<(Vertex, Color)> = (0..g.n() as Vertex)
        .into_par_iter()
        .filter_map(|v| {
            let mine = &bid[v as usize];
            mine.iter()
                .copied()
                .find(|c| {
                    !orient
                        .out_neighbors(g, v)
                        .any(|u| bid[u as usize].binary_search(c).is_ok())
                })
                .map(|c| (v, c))
        })
        .collect();
    for &(v, c) in &keep {
        st.set(v, c);
    }
    keep.len()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BiddingOutcome {
    pub vbad: Vec<Vertex>,
    /// Uncolored vertices of the set at loop start.
    pub scope: usize,
    /// Vertices whose p(v) exceeded their measured excess at loop start.
    pub precheck_evicted: usize,
    pub iterations: usize,
    pub colored_per_iteration: Vec<usize>,
    pub evicted_per_iteration: Vec<usize>,
    pub schedule: Vec<f64>,
    pub lambda: f64,
    pub truncated: bool,
    pub p_star: f64,
    pub d_star: usize,
    pub c: f64,
}

fn contention(g: &Graph, st: &ColoringState, active: &[bool], orient: &OrientationView, p: &[f64], v: Vertex) -> f64 {
    orient
        .out_neighbors(g, v)
        .filter(|&u| active[u as usize] && !st.is_colored(u))
        .map(|u| 1.0 / p[u as usize])
        .sum()
}

/// Runs the C_k schedule over `set`. Vertices with p(v) above |Ψ(v)| − deg_set(v) go to
/// V_bad first; after iteration k < k⋆ any uncolored vertex whose uncolored out-neighbors
/// have Σ 1/p ≥ 1/C_{k+1} goes to V_bad; after the last one every uncolored vertex does.
#[allow(clippy::too_many_arguments)]
pub fn bidding_loop(
    g: &Graph,
    st: &mut ColoringState,
    set: &[Vertex],
    orient: &OrientationView,
    params: &ExcessParams,
    plan: &RngPlan,
    phase: Phase,
    ledger: &mut RoundLedger,
    label: &str,
) -> BiddingOutcome {
    let mut out = BiddingOutcome {
        schedule: params.schedule.clone(),
        lambda: params.lambda,
        truncated: params.truncated,
        p_star: params.p_star,
        d_star: params.d_star,
        c: params.c,
        ..BiddingOutcome::default()
    };
    let mut active = vec![false; g.n()];
    for &v in set {
        if !st.is_colored(v) {
            active[v as usize] = true;
            out.scope += 1;
        }
    }
    ledger.charge(&format!("{label}/precheck"), rounds::EXCHANGE);
    let snapshot: &ColoringState = st;
    let starved: Vec<Vertex> = set
        .par_iter()
        .copied()
        .filter(|&v| {
            active[v as usize] && {
                let deg = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| active[u as usize])
                    .count() as f64;
                params.p[v as usize] > snapshot.available_len(g, v) as f64 - deg
            }
        })
        .collect();
    for &v in &starved {
        active[v as usize] = false;
    }
    out.precheck_evicted = starved.len();
    out.vbad.extend(starved);

    let k_star = params.schedule.len();
    for (k, &ck) in params.schedule.iter().enumerate() {
        let colored = bidding_iteration(g, st, &active, orient, ck, plan, phase, k as u32, ledger, &format!("{label}/bid"));
        out.colored_per_iteration.push(colored);
        out.iterations += 1;
        if k + 1 < k_star {
            ledger.charge(&format!("{label}/check"), rounds::EXCHANGE);
            let next = params.schedule[k + 1];
            let snapshot: &ColoringState = st;
            let evict: Vec<Vertex> = set
                .par_iter()
                .copied()
                .filter(|&v| {
                    active[v as usize]
                        && !snapshot.is_colored(v)
                        && contention(g, snapshot, &active, orient, &params.p, v) >= 1.0 / next
                })
                .collect();
            for &v in &evict {
                active[v as usize] = false;
            }
            out.evicted_per_iteration.push(evict.len());
            out.vbad.extend(evict);
        }
    }
    out.vbad.extend(set.iter().copied().filter(|&v| active[v as usize] && !st.is_colored(v)));
    out.vbad.sort_unstable();
    out
}

/// Loop for |Ψ(v)| ≥ (1+ρ)Δ′ on a graph of maximum degree Δ′: ID orientation,
/// p(v) = ρΔ′ and C = ρ.
#[allow(clippy::too_many_arguments)]
pub fn simple_bidding_loop(
    g: &Graph,
    st: &mut ColoringState,
    set: &[Vertex],
    rho: f64,
    delta_prime: f64,
    max_iterations: usize,
    plan: &RngPlan,
    phase: Phase,
    ledger: &mut RoundLedger,
    label: &str,
) -> BiddingOutcome {
    let p_star = rho * delta_prime;
    let params = ExcessParams::new(vec![p_star; g.n()], p_star, delta_prime.ceil() as usize, rho, max_iterations);
    bidding_loop(g, st, set, &OrientationView::by_id(g.n()), &params, plan, phase, ledger, label)
}

/// Leftover layer-≥2 vertices: layer orientation, p(v) = η·εᵢ₋₁²Δ, C = η / Σ_{j=2}^{ℓ} εⱼ.
#[allow(clippy::too_many_arguments)]
pub fn run_on_u(
    g: &Graph,
    st: &mut ColoringState,
    h: &HierarchyView,
    u: &[Vertex],
    eta: f64,
    max_iterations: usize,
    plan: &RngPlan,
    ledger: &mut RoundLedger,
) -> BiddingOutcome {
    let ell = h.ell();
    if ell < 2 {
        return BiddingOutcome {
            vbad: u.iter().copied().filter(|&v| !st.is_colored(v)).collect(),
            ..BiddingOutcome::default()
        };
    }
    let delta = h.delta as f64;
    let mut p = vec![0.0; g.n()];
    for &v in u {
        let i = h.layer(v).expect("U holds layered vertices");
        assert!(i >= 2, "U holds layers 2 and up");
        let e = h.eps(i - 1);
        p[v as usize] = eta * e * e * delta;
    }
    let e1 = h.eps(1);
    let p_star = eta * e1 * e1 * delta;
    let c = eta / (2..=ell).map(|j| h.eps(j)).sum::<f64>();
    let params = ExcessParams::new(p, p_star, h.delta, c, max_iterations);
    let o = orient(g, &h.layer_keys());
    bidding_loop(g, st, u, &o, &params, plan, Phase::BIDDING.stage(6), ledger, "step6-U")
}

/// Sparse vertices: ID orientation, p(v) = γΔ, C = γ.
#[allow(clippy::too_many_arguments)]
pub fn run_on_vsp(
    g: &Graph,
    st: &mut ColoringState,
    vsp: &[Vertex],
    gamma_sp: f64,
    delta: usize,
    max_iterations: usize,
    plan: &RngPlan,
    ledger: &mut RoundLedger,
) -> BiddingOutcome {
    let p_star = gamma_sp * delta as f64;
    let params = ExcessParams::new(vec![p_star; g.n()], p_star, delta, gamma_sp, max_iterations);
    let o = OrientationView::by_id(g.n());
    bidding_loop(g, st, vsp, &o, &params, plan, Phase::BIDDING.stage(7), ledger, "step7-Vsp")
}
