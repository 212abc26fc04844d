use rayon::prelude::*;
use serde::Serialize;

use super::exact::min_count_one_minus;
use crate::graph::{Graph, Vertex};

/// Friend edges, dense vertices and almost cliques for one sparsity value.
#[derive(Debug, Clone, Serialize)]
pub struct Level {
    pub epsilon: f64,
    pub friend_edges: Vec<(Vertex, Vertex)>,
    pub dense: Vec<bool>,
    /// Almost cliques, each sorted, ordered by minimum member.
    pub cliques: Vec<Vec<Vertex>>,
    #[serde(skip)]
    pub clique_of: Vec<Option<u32>>,
}

impl Level {
    pub fn is_dense(&self, v: Vertex) -> bool {
        self.dense[v as usize]
    }

    pub fn clique(&self, v: Vertex) -> Option<usize> {
        self.clique_of[v as usize].map(|c| c as usize)
    }
}

/// Edges {u,v} (u < v) with |N(u) ∩ N(v)| ≥ (1−ε)Δ.
pub fn friend_edges(g: &Graph, eps: f64) -> Vec<(Vertex, Vertex)> {
    let need = min_count_one_minus(eps, g.max_degree());
    let edges: Vec<_> = g.edges().collect();
    edges
        .into_par_iter()
        .filter(|&(u, v)| g.common_neighbors(u, v) >= need)
        .collect()
}

fn dense_from_friends(g: &Graph, eps: f64, friends: &[(Vertex, Vertex)]) -> Vec<bool> {
    // At Δ = 0 the bound is 0; an isolated vertex is not treated as dense.
    let need = min_count_one_minus(eps, g.max_degree()).max(1);
    let mut count = vec![0usize; g.n()];
    for &(u, v) in friends {
        count[u as usize] += 1;
        count[v as usize] += 1;
    }
    count.into_iter().map(|c| c >= need).collect()
}

/// Vertices with at least (1−ε)Δ ε-friends, as a mask.
pub fn dense_vertices(g: &Graph, eps: f64) -> Vec<bool> {
    dense_from_friends(g, eps, &friend_edges(g, eps))
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[parent[x as usize] as usize];
        parent[x as usize] = p;
        x = p;
    }
    x
}

fn components(n: usize, dense: &[bool], friends: &[(Vertex, Vertex)]) -> Vec<Vec<Vertex>> {
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for &(u, v) in friends {
        if dense[u as usize] && dense[v as usize] {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut by_root: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for v in 0..n as Vertex {
        if dense[v as usize] {
            let r = find(&mut parent, v);
            by_root[r as usize].push(v);
        }
    }
    // Roots are component minima, so this order is by minimum member.
    by_root.into_iter().filter(|c| !c.is_empty()).collect()
}

/// Connected components of the dense vertices under friend edges.
pub fn almost_cliques(g: &Graph, eps: f64) -> Vec<Vec<Vertex>> {
    compute_level(g, eps).cliques
}

pub fn compute_level(g: &Graph, eps: f64) -> Level {
    let friends = friend_edges(g, eps);
    let dense = dense_from_friends(g, eps, &friends);
    let cliques = components(g.n(), &dense, &friends);
    let mut clique_of = vec![None; g.n()];
    for (i, c) in cliques.iter().enumerate() {
        for &v in c {
            clique_of[v as usize] = Some(i as u32);
        }
    }
    Level {
        epsilon: eps,
        friend_edges: friends,
        dense,
        cliques,
        clique_of,
    }
}
