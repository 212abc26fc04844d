#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::FromPrimitive;
use rand::Rng;

use localcolor::decomposition::{build_hierarchy, BlockClass, DecompositionConfig, HierarchyView, LayerTag};
use localcolor::{Graph, Vertex};

/// On at most `max_n` vertices: plain G(n, q), or a planted clique inside a denser
/// random core with sparse noise around it.
pub fn random_small_graph(rng: &mut impl Rng, max_n: usize) -> Graph {
    let n = rng.random_range(1..=max_n);
    let mut edges = Vec::new();
    if rng.random_bool(0.5) {
        let q: f64 = rng.random_range(0.2..1.0);
        for u in 0..n as Vertex {
            for v in u + 1..n as Vertex {
                if rng.random_bool(q) {
                    edges.push((u, v));
                }
            }
        }
    } else {
        let core = rng.random_range(1..=n);
        let clique = rng.random_range(1..=core);
        let q_core: f64 = rng.random_range(0.6..1.0);
        let q_out: f64 = rng.random_range(0.0..0.5);
        for u in 0..n as Vertex {
            for v in u + 1..n as Vertex {
                let (a, b) = (u as usize, v as usize);
                let p = if b < clique {
                    1.0
                } else if b < core {
                    q_core
                } else if a < core {
                    q_out / 2.0
                } else {
                    q_out
                };
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// A complete core of random size inside a G(n, q) shell with q near 1; at ε₁ ≈ 0.1 this
/// regularly yields a layer-1 block under a larger layer-2 block.
pub fn random_core_graph(rng: &mut impl Rng, n_range: std::ops::Range<usize>) -> Graph {
    let n = rng.random_range(n_range);
    let core = rng.random_range(4..n);
    let q: f64 = rng.random_range(0.7..1.0);
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if (v as usize) < core || rng.random_bool(q) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

struct Matrix {
    n: usize,
    adj: Vec<Vec<bool>>,
}

impl Matrix {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in g.edges() {
            adj[u as usize][v as usize] = true;
            adj[v as usize][u as usize] = true;
        }
        Matrix { n, adj }
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&b| b).count()
    }

    fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    fn common(&self, u: usize, v: usize) -> usize {
        (0..self.n).filter(|&w| self.adj[u][w] && self.adj[v][w]).count()
    }
}

/// count ≥ (1−ε)Δ on exact rationals.
fn at_least_one_minus(count: usize, eps: f64, delta: usize) -> bool {
    let eps = BigRational::from_f64(eps).unwrap();
    let one = BigRational::from_integer(1.into());
    let lhs = BigRational::from_integer(count.into());
    lhs >= (one - eps) * BigRational::from_integer(delta.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleLevel {
    pub friends: BTreeSet<(Vertex, Vertex)>,
    pub dense: Vec<bool>,
    pub cliques: Vec<Vec<Vertex>>,
}

pub fn oracle_level(g: &Graph, eps: f64) -> OracleLevel {
    let m = Matrix::new(g);
    let delta = m.max_degree();
    let mut friends = BTreeSet::new();
    for u in 0..m.n {
        for v in u + 1..m.n {
            if m.adj[u][v] && at_least_one_minus(m.common(u, v), eps, delta) {
                friends.insert((u as Vertex, v as Vertex));
            }
        }
    }
    let dense: Vec<bool> = (0..m.n)
        .map(|v| {
            let f = friends
                .iter()
                .filter(|&&(a, b)| a as usize == v || b as usize == v)
                .count();
            f >= 1 && at_least_one_minus(f, eps, delta)
        })
        .collect();
    // Flood fill over friend edges between dense vertices.
    let mut seen = vec![false; m.n];
    let mut cliques = Vec::new();
    for s in 0..m.n {
        if !dense[s] || seen[s] {
            continue;
        }
        let mut comp = vec![s as Vertex];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let x = comp[i];
            for y in 0..m.n as Vertex {
                let key = (x.min(y), x.max(y));
                if dense[y as usize] && !seen[y as usize] && friends.contains(&key) {
                    seen[y as usize] = true;
                    comp.push(y);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        cliques.push(comp);
    }
    OracleLevel { friends, dense, cliques }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleBlock {
    pub layer: usize,
    pub members: Vec<Vertex>,
    pub class: BlockClass,
    /// (layer, members) of the nearest enclosing block.
    pub parent: Option<(usize, Vec<Vertex>)>,
}

/// Layers (0 = sparse, None = outside V*) and blocks with classes.
pub fn oracle_hierarchy(g: &Graph, vstar: &[bool], eps: &[f64]) -> (Vec<Option<usize>>, Vec<OracleBlock>) {
    let levels: Vec<OracleLevel> = eps.iter().map(|&e| oracle_level(g, e)).collect();
    let delta = Matrix::new(g).max_degree();
    let layer: Vec<Option<usize>> = (0..g.n())
        .map(|v| {
            vstar[v].then(|| levels.iter().position(|l| l.dense[v]).map_or(0, |i| i + 1))
        })
        .collect();
    let mut raw: Vec<(usize, Vec<Vertex>, Vec<Vertex>)> = Vec::new();
    for (i, l) in levels.iter().enumerate() {
        for c in &l.cliques {
            let members: Vec<Vertex> = c.iter().copied().filter(|&v| layer[v as usize] == Some(i + 1)).collect();
            if !members.is_empty() {
                raw.push((i + 1, members, c.clone()));
            }
        }
    }
    let eligible: Vec<bool> = raw
        .iter()
        .map(|(i, m, _)| m.len() as f64 * (1.0 / eps[i - 1]).log2() >= delta as f64)
        .collect();
    // Lower block a lies under upper block b when all of a sits in b's clique.
    let under = |a: usize, b: usize| raw[a].0 < raw[b].0 && raw[a].1.iter().all(|v| raw[b].2.contains(v));
    let blocks = (0..raw.len())
        .map(|a| {
            let related: Vec<usize> = (0..raw.len()).filter(|&b| under(a, b) || under(b, a)).collect();
            let class = if !eligible[a] {
                BlockClass::Small
            } else if related.iter().all(|&b| {
                !eligible[b] || raw[b].1.len() < raw[a].1.len() || (raw[b].1.len() == raw[a].1.len() && raw[b].0 < raw[a].0)
            }) {
                BlockClass::Large
            } else {
                BlockClass::Medium
            };
            let parent = (0..raw.len())
                .filter(|&b| under(a, b))
                .min_by_key(|&b| raw[b].0)
                .map(|b| (raw[b].0, raw[b].1.clone()));
            OracleBlock {
                layer: raw[a].0,
                members: raw[a].1.clone(),
                class,
                parent,
            }
        })
        .collect();
    (layer, blocks)
}

/// Compares every decomposition output with the brute-force reference.
pub fn compare_with_oracle(g: &Graph, vstar: &[bool], cfg: &DecompositionConfig) -> Result<(), String> {
    let h: HierarchyView = build_hierarchy(g, vstar, cfg);
    for (i, lvl) in h.levels.iter().enumerate() {
        let o = oracle_level(g, lvl.epsilon);
        let friends: BTreeSet<_> = lvl.friend_edges.iter().copied().collect();
        if friends != o.friends {
            return Err(format!("level {}: friend edges {friends:?} vs {:?}", i + 1, o.friends));
        }
        if lvl.dense != o.dense {
            return Err(format!("level {}: dense {:?} vs {:?}", i + 1, lvl.dense, o.dense));
        }
        if lvl.cliques != o.cliques {
            return Err(format!("level {}: cliques {:?} vs {:?}", i + 1, lvl.cliques, o.cliques));
        }
    }
    let (layers, blocks) = oracle_hierarchy(g, vstar, cfg.levels());
    let got_layers: Vec<Option<usize>> = h
        .layer_of
        .iter()
        .map(|t| {
            t.map(|t| match t {
                LayerTag::Layer(i) => i as usize,
                LayerTag::Sparse => 0,
            })
        })
        .collect();
    if got_layers != layers {
        return Err(format!("layers {got_layers:?} vs {layers:?}"));
    }
    let mut got: Vec<OracleBlock> = h
        .blocks
        .iter()
        .map(|b| OracleBlock {
            layer: b.layer,
            members: b.members.clone(),
            class: b.class,
            parent: b.parent.map(|p| (h.blocks[p].layer, h.blocks[p].members.clone())),
        })
        .collect();
    let mut want = blocks;
    let key = |b: &OracleBlock| (b.layer, b.members.clone());
    got.sort_by_key(key);
    want.sort_by_key(key);
    if got != want {
        return Err(format!("blocks {got:?} vs {want:?}"));
    }
    let sparse: Vec<Vertex> = (0..g.n() as Vertex).filter(|&v| layers[v as usize] == Some(0)).collect();
    if h.sparse != sparse {
        return Err(format!("sparse {:?} vs {sparse:?}", h.sparse));
    }
    Ok(())
}
