use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use localcolor::decomposition::{build_hierarchy, Block, LayerTag};
use localcolor::graph::{load_coloring, load_palettes, write_coloring, write_graph};
use localcolor::pipeline::excess_palette_extra;
use localcolor::stats::{stat_suite, StatSpec, Verdict};
use localcolor::{
    check_proper, run_excess_mode, run_full, run_sparse_mode, Branch, ColoringState, GeneratorSpec, Graph, ProperReport,
    RunConfig, RunStats, Vertex,
};

#[derive(Parser)]
#[command(name = "localcolor", version, about = "Randomized (Δ+1)-list coloring in a simulated LOCAL model")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph in `p col` / `e u v` format.
    Gen {
        /// gnp:n=..,p=.. | regular:n=..,d=.. | clique-union:sizes=33x8,bridges=40 | tfree:n=..,d=..
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the almost-clique hierarchy as JSON.
    Decompose {
        /// Generator spec or path to a graph file.
        graph: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Color a graph and emit run statistics as JSON.
    Run {
        graph: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent runs on seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Palette file with `<v>: c1 c2 ...` lines; defaults to {0..Δ} (plus the excess-mode slack).
        #[arg(long)]
        palettes: Option<PathBuf>,
        /// Write the coloring as `<v> <color>` lines (single trial only).
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a coloring file against a graph; exits nonzero on any defect.
    Verify {
        graph: String,
        coloring: PathBuf,
        #[arg(long)]
        palettes: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the statistical checks and their negative controls.
    Stats {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides every test's default trial count.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Excess,
    Sparse,
}

#[derive(Args)]
struct ConfigArgs {
    /// ε₁ override; default Δ^(-1/10).
    #[arg(long)]
    epsilon1: Option<f64>,
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    c: Option<u32>,
    #[arg(long = "gamma-pal")]
    gamma_pal: Option<f64>,
    /// low | high | auto
    #[arg(long)]
    branch: Option<Branch>,
}

impl ConfigArgs {
    fn build(&self) -> Result<RunConfig> {
        let d = RunConfig::default();
        let cfg = RunConfig {
            epsilon1: self.epsilon1.or(d.epsilon1),
            k_const: self.k.unwrap_or(d.k_const),
            p: self.p.unwrap_or(d.p),
            beta: self.beta.unwrap_or(d.beta),
            c: self.c.unwrap_or(d.c),
            gamma_pal: self.gamma_pal.unwrap_or(d.gamma_pal),
            branch: self.branch.unwrap_or(d.branch),
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load(graph: &str, seed: u64) -> Result<Graph> {
    let spec = match graph.parse::<GeneratorSpec>() {
        Ok(spec) => spec,
        Err(_) if Path::new(graph).is_file() => GeneratorSpec::File { path: graph.into() },
        Err(e) => bail!("`{graph}` is neither a generator spec nor a readable file: {e}"),
    };
    spec.generate(seed).with_context(|| format!("loading {graph}"))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json(out: &Option<PathBuf>, value: &impl Serialize) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn palettes_for(g: &Graph, path: &Option<PathBuf>, extra: usize) -> Result<ColoringState> {
    Ok(match path {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            ColoringState::new(load_palettes(BufReader::new(f), g.n()).with_context(|| format!("parsing {}", p.display()))?)
        }
        None => ColoringState::default_palettes(g, extra),
    })
}

#[derive(Serialize)]
struct LevelJson<'a> {
    epsilon: f64,
    friend_edges: usize,
    dense: usize,
    cliques: &'a [Vec<Vertex>],
}

#[derive(Serialize)]
struct DecomposeJson<'a> {
    n: usize,
    delta: usize,
    ell: usize,
    epsilons: &'a [f64],
    levels: Vec<LevelJson<'a>>,
    /// 0 for V_sp, i for layer i.
    layers: Vec<u32>,
    blocks: &'a [Block],
    tree_edges: Vec<(Option<usize>, usize)>,
    sparse: &'a [Vertex],
}

#[derive(Serialize)]
struct RunJson {
    report: ProperReport,
    stats: RunStats,
}

fn run_one(g: &Graph, st: ColoringState, mode: ModeArg, cfg: &RunConfig, seed: u64) -> Result<(ColoringState, RunStats)> {
    Ok(match mode {
        ModeArg::Full => run_full(g, st, cfg, seed)?,
        ModeArg::Excess => run_excess_mode(g, st, cfg, seed)?,
        ModeArg::Sparse => run_sparse_mode(g, st, cfg, seed)?,
    })
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen { spec, seed, out } => {
            let g = load(&spec, seed)?;
            let mut w = sink(&out)?;
            write_graph(&g, &mut w)?;
            w.flush()?;
        }
        Cmd::Decompose { graph, seed, config, out } => {
            let g = load(&graph, seed)?;
            let dcfg = config.build()?.decomposition(g.max_degree())?;
            let h = build_hierarchy(&g, &vec![true; g.n()], &dcfg);
            let json = DecomposeJson {
                n: g.n(),
                delta: h.delta,
                ell: h.ell(),
                epsilons: dcfg.levels(),
                levels: h
                    .levels
                    .iter()
                    .map(|l| LevelJson {
                        epsilon: l.epsilon,
                        friend_edges: l.friend_edges.len(),
                        dense: l.dense.iter().filter(|&&d| d).count(),
                        cliques: &l.cliques,
                    })
                    .collect(),
                layers: h
                    .layer_of
                    .iter()
                    .map(|t| match t {
                        Some(LayerTag::Layer(i)) => *i,
                        _ => 0,
                    })
                    .collect(),
                blocks: &h.blocks,
                tree_edges: h.tree_edges(),
                sparse: &h.sparse,
            };
            emit_json(&out, &json)?;
        }
        Cmd::Run {
            graph,
            seed,
            trials,
            mode,
            palettes,
            coloring,
            config,
            out,
        } => {
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            if coloring.is_some() && trials > 1 {
                bail!("--coloring needs a single trial");
            }
            let cfg = config.build()?;
            let g = load(&graph, seed)?;
            let extra = match mode {
                ModeArg::Excess => excess_palette_extra(g.n(), cfg.gamma_pal),
                _ => 0,
            };
            let st0 = palettes_for(&g, &palettes, extra)?;
            let runs = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let (st, stats) = run_one(&g, st0.clone(), mode, &cfg, seed.wrapping_add(t))?;
                    let report = check_proper(&g, &st);
                    Ok((st, RunJson { report, stats }))
                })
                .collect::<Result<Vec<_>>>()?;
            let ok = runs.iter().all(|(_, r)| r.report.is_valid_complete());
            if let Some(path) = &coloring {
                let mut w = sink(&Some(path.clone()))?;
                write_coloring(&runs[0].0, &mut w)?;
                w.flush()?;
            }
            let reports: Vec<RunJson> = runs.into_iter().map(|(_, r)| r).collect();
            if trials == 1 {
                emit_json(&out, &reports[0])?;
            } else {
                emit_json(&out, &reports)?;
            }
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Verify {
            graph,
            coloring,
            palettes,
            seed,
            out,
        } => {
            let g = load(&graph, seed)?;
            let st = palettes_for(&g, &palettes, 0)?;
            let f = File::open(&coloring).with_context(|| format!("opening {}", coloring.display()))?;
            let assignment = load_coloring(BufReader::new(f), g.n()).with_context(|| format!("parsing {}", coloring.display()))?;
            let report = check_proper(&g, &st.with_assignment(assignment));
            emit_json(&out, &report)?;
            if !report.is_valid_complete() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Stats { seed, trials, out } => {
            let report = stat_suite(&StatSpec { seed, trials });
            emit_json(&out, &report)?;
            return Ok(match report.verdict {
                Verdict::Pass => ExitCode::SUCCESS,
                Verdict::Fail => ExitCode::FAILURE,
                Verdict::Inconclusive => ExitCode::from(2),
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    if let Ok(raw) = std::env::var("LOCALCOLOR_THREADS") {
        let threads: usize = raw.parse().with_context(|| format!("LOCALCOLOR_THREADS=`{raw}` is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    dispatch(Cli::parse())
}
