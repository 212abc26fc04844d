//! Seeded random graph generators.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{load_graph, Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Gnp { n: usize, p: f64 },
    Regular { n: usize, d: usize },
    CliqueUnion { sizes: Vec<usize>, bridges: usize },
    TriangleFreeRegular { n: usize, d: usize },
    File { path: PathBuf },
}

impl GeneratorSpec {
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            GeneratorSpec::Gnp { n, p } => gnp(*n, *p, &mut rng),
            GeneratorSpec::Regular { n, d } => regular(*n, *d, &mut rng),
            GeneratorSpec::CliqueUnion { sizes, bridges } => clique_union(sizes, *bridges, &mut rng),
            GeneratorSpec::TriangleFreeRegular { n, d } => triangle_free_regular(*n, *d, &mut rng),
            GeneratorSpec::File { path } => load_graph(BufReader::new(File::open(path)?)),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// G(n, p).
pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(bad(format!("edge probability {p} outside [0,1]")));
    }
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Randomizes a simple graph with 10·m degree-preserving double-edge swap attempts. `allowed` vets each
/// proposed edge.
fn shuffle_edges(edges: &mut [(Vertex, Vertex)], rng: &mut impl Rng, allowed: impl Fn(Vertex, Vertex) -> bool) {
    let key = |a: Vertex, b: Vertex| (a.min(b), a.max(b));
    let mut set: HashSet<(Vertex, Vertex)> = edges.iter().map(|&(a, b)| key(a, b)).collect();
    let m = edges.len();
    if m < 2 {
        return;
    }
    for _ in 0..10 * m {
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if rng.random_bool(0.5) {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b || !allowed(a, d) || !allowed(c, b) {
            continue;
        }
        if set.contains(&key(a, d)) || set.contains(&key(c, b)) {
            continue;
        }
        set.remove(&key(a, b));
        set.remove(&key(c, d));
        set.insert(key(a, d));
        set.insert(key(c, b));
        edges[i] = (a, d);
        edges[j] = (c, b);
    }
}

/// Random d-regular graph: a circulant start scrambled by edge swaps.
pub fn regular(n: usize, d: usize, rng: &mut impl Rng) -> Result<Graph> {
    if (n * d) % 2 == 1 {
        return Err(bad(format!("regular({n},{d}): n·d must be even")));
    }
    if d >= n && !(n == 0 && d == 0) {
        return Err(bad(format!("regular({n},{d}): degree must be below n")));
    }
    let mut edges = Vec::with_capacity(n * d / 2);
    for v in 0..n {
        for k in 1..=d / 2 {
            edges.push((v as Vertex, ((v + k) % n) as Vertex));
        }
        if d % 2 == 1 && v < n / 2 {
            edges.push((v as Vertex, (v + n / 2) as Vertex));
        }
    }
    shuffle_edges(&mut edges, rng, |_, _| true);
    Graph::from_edges(n, &edges)
}

/// Random bipartite d-regular graph on n/2 + n/2 vertices, hence triangle-free.
pub fn triangle_free_regular(n: usize, d: usize, rng: &mut impl Rng) -> Result<Graph> {
    if n % 2 == 1 {
        return Err(bad(format!("triangle_free_regular({n},{d}): n must be even")));
    }
    let half = n / 2;
    if d > half {
        return Err(bad(format!("triangle_free_regular({n},{d}): degree exceeds n/2")));
    }
    let mut edges = Vec::with_capacity(half * d);
    for a in 0..half {
        for k in 0..d {
            edges.push((a as Vertex, (half + (a + k) % half) as Vertex));
        }
    }
    let left = |v: Vertex| (v as usize) < half;
    shuffle_edges(&mut edges, rng, |x, y| left(x) != left(y));
    Graph::from_edges(n, &edges)
}

/// Disjoint cliques of the given sizes plus `bridges` random edges between distinct cliques.
pub fn clique_union(sizes: &[usize], bridges: usize, rng: &mut impl Rng) -> Result<Graph> {
    let n: usize = sizes.iter().sum();
    let mut owner = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut start = 0;
    for (ci, &s) in sizes.iter().enumerate() {
        for a in start..start + s {
            owner.push(ci);
            for b in a + 1..start + s {
                edges.push((a as Vertex, b as Vertex));
            }
        }
        start += s;
    }
    let cross: usize = {
        let total = n * n.saturating_sub(1) / 2;
        total - sizes.iter().map(|s| s * s.saturating_sub(1) / 2).sum::<usize>()
    };
    if bridges > cross {
        return Err(bad(format!("clique_union: {bridges} bridges requested, only {cross} possible")));
    }
    let mut chosen: HashSet<(Vertex, Vertex)> = HashSet::new();
    if bridges * 2 > cross {
        let mut all: Vec<(Vertex, Vertex)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| owner[a] != owner[b])
            .map(|(a, b)| (a as Vertex, b as Vertex))
            .collect();
        all.shuffle(rng);
        chosen.extend(all.into_iter().take(bridges));
    } else {
        while chosen.len() < bridges {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if owner[a] != owner[b] {
                chosen.insert(((a.min(b)) as Vertex, (a.max(b)) as Vertex));
            }
        }
    }
    let mut extra: Vec<_> = chosen.into_iter().collect();
    extra.sort_unstable();
    edges.extend(extra);
    Graph::from_edges(n, &edges)
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// `gnp:n=256,p=0.1`, `regular:n=6,d=2`, `clique-union:sizes=50x20,bridges=100`
    /// (also `sizes=10+12+8`), `tfree:n=128,d=8`, `file:path`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        if kind == "file" {
            return Ok(GeneratorSpec::File { path: rest.into() });
        }
        let mut kv = std::collections::HashMap::new();
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value in `{part}`")))?;
            kv.insert(k.trim(), v.trim());
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| bad(format!("{kind}: missing `{k}`")));
        let int = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| bad(format!("{kind}: `{k}` must be an integer"))) };
        match kind {
            "gnp" => Ok(GeneratorSpec::Gnp {
                n: int("n")?,
                p: get("p")?.parse().map_err(|_| bad("gnp: `p` must be a number"))?,
            }),
            "regular" => Ok(GeneratorSpec::Regular { n: int("n")?, d: int("d")? }),
            "tfree" | "triangle-free-regular" => Ok(GeneratorSpec::TriangleFreeRegular { n: int("n")?, d: int("d")? }),
            "clique-union" => {
                let sizes = parse_sizes(get("sizes")?)?;
                let bridges = if kv.contains_key("bridges") { int("bridges")? } else { 0 };
                Ok(GeneratorSpec::CliqueUnion { sizes, bridges })
            }
            other => Err(bad(format!("unknown generator `{other}` (gnp, regular, clique-union, tfree, file)"))),
        }
    }
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let num = |x: &str| x.parse::<usize>().map_err(|_| bad(format!("bad clique size list `{s}`")));
    if let Some((size, count)) = s.split_once('x') {
        return Ok(vec![num(size)?; num(count)?]);
    }
    s.split('+').map(num).collect()
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Gnp { n, p } => write!(f, "gnp:n={n},p={p}"),
            GeneratorSpec::Regular { n, d } => write!(f, "regular:n={n},d={d}"),
            GeneratorSpec::TriangleFreeRegular { n, d } => write!(f, "tfree:n={n},d={d}"),
            GeneratorSpec::CliqueUnion { sizes, bridges } => {
                let s: Vec<String> = sizes.iter().map(usize::to_string).collect();
                write!(f, "clique-union:sizes={},bridges={bridges}", s.join("+"))
            }
            GeneratorSpec::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}
