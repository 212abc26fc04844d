use serde::Serialize;

use super::exact::{affine, le, lt};
use super::hierarchy::{BlockClass, HierarchyView};
use super::levels::dense_vertices;
use super::log_inv;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ClusterViolation {
    ExternalDegree { clique: usize, vertex: Vertex, degree: usize },
    AntiDegree { clique: usize, vertex: Vertex, anti_degree: usize },
    Size { clique: usize, size: usize },
    Distance { clique: usize, u: Vertex, v: Vertex },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub epsilon: f64,
    pub cliques_checked: usize,
    pub violations: Vec<ClusterViolation>,
}

impl ClusterReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks external degree ≤ εΔ (toward ε-dense vertices), anti-degree < 3εΔ,
/// |C| ≤ (1+3ε)Δ and pairwise distance ≤ 2 for every clique. Requires ε < 1/5.
pub fn verify_cluster_properties(g: &Graph, eps: f64, cliques: &[Vec<Vertex>]) -> Result<ClusterReport> {
    if !(eps > 0.0 && eps < 0.2) {
        return Err(Error::Precondition(format!(
            "cluster properties are only guaranteed for 0 < ε < 1/5, got {eps}"
        )));
    }
    let delta = g.max_degree();
    let ext_bound = affine(0, &[(1, eps)], delta);
    let anti_bound = affine(0, &[(3, eps)], delta);
    let size_bound = affine(1, &[(3, eps)], delta);
    let dense = dense_vertices(g, eps);
    let n = g.n();
    let mut in_clique = vec![false; n];
    let mut reach = vec![false; n];
    let mut violations = Vec::new();

    for (ci, clique) in cliques.iter().enumerate() {
        for &v in clique {
            in_clique[v as usize] = true;
        }
        if !le(clique.len(), &size_bound) {
            violations.push(ClusterViolation::Size { clique: ci, size: clique.len() });
        }
        for &v in clique {
            let nb = g.neighbors(v);
            let ext = nb
                .iter()
                .filter(|&&u| dense[u as usize] && !in_clique[u as usize])
                .count();
            if !le(ext, &ext_bound) {
                violations.push(ClusterViolation::ExternalDegree { clique: ci, vertex: v, degree: ext });
            }
            let inside = nb.iter().filter(|&&u| in_clique[u as usize]).count();
            let anti = clique.len() - 1 - inside;
            if !lt(anti, &anti_bound) {
                violations.push(ClusterViolation::AntiDegree { clique: ci, vertex: v, anti_degree: anti });
            }

            reach[v as usize] = true;
            for &u in nb {
                reach[u as usize] = true;
                for &w in g.neighbors(u) {
                    reach[w as usize] = true;
                }
            }
            for &u in clique.iter().filter(|&&u| u > v) {
                if !reach[u as usize] {
                    violations.push(ClusterViolation::Distance { clique: ci, u: v, v: u });
                }
            }
            reach[v as usize] = false;
            for &u in nb {
                reach[u as usize] = false;
                for &w in g.neighbors(u) {
                    reach[w as usize] = false;
                }
            }
        }
        for &v in clique {
            in_clique[v as usize] = false;
        }
    }
    Ok(ClusterReport {
        epsilon: eps,
        cliques_checked: cliques.len(),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChildrenViolation {
    pub level: usize,
    pub clique: usize,
    pub children: usize,
    pub total: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChildrenReport {
    pub levels_checked: Vec<usize>,
    pub multi_child_cliques: usize,
    pub violations: Vec<ChildrenViolation>,
}

impl ChildrenReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For each εᵢ-clique (i ≥ 2, εᵢ < 1/5) holding several εᵢ₋₁-cliques, checks that
/// their total size is at most 2(3εᵢ + εᵢ₋₁)Δ.
pub fn verify_children_bound(h: &HierarchyView) -> ChildrenReport {
    let mut report = ChildrenReport {
        levels_checked: Vec::new(),
        multi_child_cliques: 0,
        violations: Vec::new(),
    };
    for i in 2..=h.ell() {
        let (ei, ep) = (h.eps(i), h.eps(i - 1));
        if ei >= 0.2 {
            continue;
        }
        report.levels_checked.push(i);
        let bound = affine(0, &[(6, ei), (2, ep)], h.delta);
        let upper = h.level(i);
        let lower = h.level(i - 1);
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); upper.cliques.len()];
        for (c, members) in lower.cliques.iter().enumerate() {
            let parent = upper.clique(members[0]).expect("lower cliques nest in upper ones");
            kids[parent].push(c);
        }
        for (c, list) in kids.iter().enumerate() {
            if list.len() < 2 {
                continue;
            }
            report.multi_child_cliques += 1;
            let total: usize = list.iter().map(|&k| lower.cliques[k].len()).sum();
            if !le(total, &bound) {
                report.violations.push(ChildrenViolation {
                    level: i,
                    clique: c,
                    children: list.len(),
                    total,
                    bound: (6.0 * ei + 2.0 * ep) * h.delta as f64,
                });
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaletteLbReport {
    /// 9ε_ℓ + 2/log₂(1/ε_ℓ) < 1/12, the smallness the guarantee relies on.
    pub hypothesis_holds: bool,
    pub small_checked: usize,
    pub small_violations: Vec<Vertex>,
    pub medium_checked: usize,
    pub medium_violations: Vec<Vertex>,
}

impl PaletteLbReport {
    pub fn violations(&self) -> usize {
        self.small_violations.len() + self.medium_violations.len()
    }

    /// Violations that count as bugs: zero unless the hypothesis holds.
    pub fn bugs(&self) -> usize {
        if self.hypothesis_holds {
            self.violations()
        } else {
            0
        }
    }

    pub fn hypothesis_void_violations(&self) -> usize {
        self.violations() - self.bugs()
    }
}

/// Small-block vertices with |N(v) ∩ V*| ≥ Δ/3 need Δ/4 neighbors among medium, large
/// and sparse vertices; medium-block layer-i vertices need Δ/(2 log₂(1/εᵢ)) among large
/// and sparse ones.
pub fn check_palette_lb(g: &Graph, h: &HierarchyView) -> PaletteLbReport {
    let hypothesis_holds = h.ell() >= 1 && {
        let e = h.eps(h.ell());
        9.0 * e + 2.0 / log_inv(e) < 1.0 / 12.0
    };
    let delta = h.delta as f64;
    let mut report = PaletteLbReport {
        hypothesis_holds,
        small_checked: 0,
        small_violations: Vec::new(),
        medium_checked: 0,
        medium_violations: Vec::new(),
    };
    let class = |u: Vertex| h.class_of_vertex(u);
    for v in g.vertices() {
        let Some(b) = h.block(v) else { continue };
        let nb = g.neighbors(v);
        match h.blocks[b].class {
            BlockClass::Small => {
                let in_star = nb.iter().filter(|&&u| h.in_vstar[u as usize]).count();
                if 3.0 * (in_star as f64) < delta {
                    continue;
                }
                report.small_checked += 1;
                let good = nb
                    .iter()
                    .filter(|&&u| h.is_sparse(u) || matches!(class(u), Some(BlockClass::Medium | BlockClass::Large)))
                    .count();
                if 4.0 * (good as f64) < delta {
                    report.small_violations.push(v);
                }
            }
            BlockClass::Medium => {
                report.medium_checked += 1;
                let good = nb
                    .iter()
                    .filter(|&&u| h.is_sparse(u) || class(u) == Some(BlockClass::Large))
                    .count();
                let need = delta / (2.0 * log_inv(h.eps(h.blocks[b].layer)));
                if (good as f64) < need {
                    report.medium_violations.push(v);
                }
            }
            BlockClass::Large => {}
        }
    }
    report
}
