mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use localcolor::decomposition::{build_hierarchy, verify_children_bound, verify_cluster_properties, DecompositionConfig};
use localcolor::stats::{stat_suite, StatReport, StatSpec, StatTest, StatTestKind, Verdict};
use localcolor::{check_proper, run_full, ColoringState, GeneratorSpec, RunConfig};

fn desk() -> RunConfig {
    RunConfig {
        epsilon1: Some(0.05),
        k_const: 5.0,
        ..RunConfig::default()
    }
}

fn totality() -> (bool, String) {
    let mut runs = 0;
    let mut bad = Vec::new();
    for n in [256usize, 1024, 4096] {
        for d in [8usize, 32, 64] {
            let specs = [
                GeneratorSpec::Gnp { n, p: d as f64 / n as f64 },
                GeneratorSpec::Regular { n, d },
                GeneratorSpec::CliqueUnion {
                    sizes: vec![d; n / d],
                    bridges: n / 8,
                },
            ];
            for spec in specs {
                for seed in 0..23u64 {
                    let g = spec.generate(seed).unwrap();
                    let cfg = if seed % 2 == 0 { RunConfig::default() } else { desk() };
                    runs += 1;
                    match run_full(&g, ColoringState::default_palettes(&g, 0), &cfg, seed) {
                        Ok((st, stats)) if check_proper(&g, &st).is_valid_complete() && stats.unaccounted == 0 => {}
                        Ok(_) => bad.push(format!("{spec:?} seed {seed}: improper or incomplete")),
                        Err(e) => bad.push(format!("{spec:?} seed {seed}: {e}")),
                    }
                }
            }
        }
    }
    (bad.is_empty(), format!("{runs} runs, {} failures {:?}", bad.len(), bad.first()))
}

fn structure() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut checked, mut bad) = (0, 0);
    for _ in 0..1000 {
        let g = if rng.random_bool(0.5) {
            common::random_core_graph(&mut rng, 12..60)
        } else {
            let sizes = (0..rng.random_range(2..7)).map(|_| rng.random_range(4..30)).collect();
            GeneratorSpec::CliqueUnion { sizes, bridges: rng.random_range(0..20) }.generate(rng.random()).unwrap()
        };
        let e1 = [0.02, 0.05, 0.1, 0.15][rng.random_range(0..4)];
        let cfg = DecompositionConfig::new(e1, 5.0).unwrap();
        let h = build_hierarchy(&g, &vec![true; g.n()], &cfg);
        for lvl in h.levels.iter().filter(|l| l.epsilon < 0.2) {
            checked += 1;
            bad += !verify_cluster_properties(&g, lvl.epsilon, &lvl.cliques).unwrap().ok() as usize;
        }
        bad += !verify_children_bound(&h).ok() as usize;
    }
    (bad == 0, format!("1000 graphs, {checked} levels, {bad} violating reports"))
}

fn oracle() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for round in 0..1000 {
        let g = common::random_small_graph(&mut rng, 10);
        let e1 = [0.05, 0.1, 0.2, 0.3, 0.45][rng.random_range(0..5)];
        let k = [1.5, 2.0, 3.0, 5.0][rng.random_range(0..4)];
        let cfg = DecompositionConfig::new(e1, k).unwrap();
        let vstar: Vec<bool> = (0..g.n()).map(|_| rng.random_bool(0.8)).collect();
        if let Err(e) = common::compare_with_oracle(&g, &vstar, &cfg) {
            return (false, format!("graph {round}: {e}"));
        }
    }
    (true, "1000 graphs with n <= 10 match".into())
}

fn stat_line(report: &StatReport, kinds: &[StatTestKind]) -> (bool, String) {
    let picked: Vec<&StatTest> = report
        .tests
        .iter()
        .filter(|t| kinds.iter().any(|k| k.name() == t.name))
        .collect();
    let ok = picked.iter().all(|t| t.verdict == Verdict::Pass);
    let detail = picked
        .iter()
        .map(|t| format!("{} {:.4} {} {:.4}", t.name, t.observed, t.comparison, t.threshold))
        .collect::<Vec<_>>()
        .join("; ");
    (ok, detail)
}

fn n_independence() -> (bool, String) {
    let charges = |n: usize| {
        let g = GeneratorSpec::Regular { n, d: 32 }.generate(8).unwrap();
        run_full(&g, ColoringState::default_palettes(&g, 0), &desk(), 8)
            .unwrap()
            .1
            .constant_phase_rounds()
    };
    let (a, b) = (charges(512), charges(8192));
    let total: u64 = a.iter().map(|e| e.rounds).sum();
    (!a.is_empty() && a == b, format!("{} entries, {total} rounds at n=512 and n=8192", a.len()))
}

fn shattering() -> (bool, String) {
    let (n, d) = (4096usize, 16usize);
    let bound = (d as f64).powi(4) * (n as f64).log2();
    let mut within = 0;
    let mut worst = 0;
    for seed in 0..100u64 {
        let g = GeneratorSpec::Regular { n, d }.generate(seed).unwrap();
        let (_, stats) = run_full(&g, ColoringState::default_palettes(&g, 0), &desk(), seed).unwrap();
        let big = stats.vbad_components.first().copied().unwrap_or(0);
        worst = worst.max(big);
        within += (big as f64 <= bound) as usize;
    }
    (within >= 99, format!("{within}/100 within {bound:.0}, largest component {worst}"))
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |id: usize, name: &str, f: &dyn Fn() -> (bool, String)| {
        let t = Instant::now();
        let (ok, detail) = f();
        all &= ok;
        println!(
            "criterion {id} {name}: {} ({detail}) [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    };
    report(1, "totality", &totality);
    report(2, "cluster structure", &structure);
    report(3, "oracle equivalence", &oracle);
    let suite = stat_suite(&StatSpec { seed: 0, trials: None });
    report(4, "dense dominance", &|| stat_line(&suite, &[StatTestKind::Dominance, StatTestKind::SelectedTail]));
    report(5, "bidding decay", &|| stat_line(&suite, &[StatTestKind::Decay, StatTestKind::LoopResidue]));
    report(6, "one-shot guarantees", &|| stat_line(&suite, &[StatTestKind::NumUncolored, StatTestKind::ExcessGain]));
    report(7, "round n-independence", &n_independence);
    report(8, "shattering", &shattering);
    report(9, "negative controls", &|| {
        let detail = suite
            .controls
            .iter()
            .map(|c| format!("{} {:?}", c.name, c.verdict))
            .collect::<Vec<_>>()
            .join("; ");
        (suite.controls_flipped(), detail)
    });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
