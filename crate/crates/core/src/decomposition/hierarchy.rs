use std::collections::HashMap;

use serde::Serialize;

use super::levels::{compute_level, Level};
use super::{log_inv, DecompositionConfig};
use crate::graph::{Graph, Vertex, SPARSE_LAYER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BlockClass {
    Small,
    Medium,
    Large,
}

/// Where a vertex of V* sits: a dense layer 1..=ℓ or the sparse root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LayerTag {
    Layer(u32),
    Sparse,
}

/// A layer-i block: an εᵢ-almost clique intersected with Vᵢ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub layer: usize,
    /// Index of the owning almost clique at level `layer`.
    pub clique: usize,
    pub members: Vec<Vertex>,
    /// Nearest ancestor block; `None` means the V_sp root.
    pub parent: Option<usize>,
    pub class: BlockClass,
}

#[derive(Debug, Clone)]
pub struct HierarchyView {
    pub delta: usize,
    pub config: DecompositionConfig,
    /// `levels[i - 1]` holds level εᵢ.
    pub levels: Vec<Level>,
    pub in_vstar: Vec<bool>,
    pub layer_of: Vec<Option<LayerTag>>,
    pub blocks: Vec<Block>,
    pub block_of: Vec<Option<u32>>,
    pub sparse: Vec<Vertex>,
    by_clique: HashMap<(usize, usize), usize>,
}

impl HierarchyView {
    pub fn ell(&self) -> usize {
        self.levels.len()
    }

    pub fn eps(&self, i: usize) -> f64 {
        self.levels[i - 1].epsilon
    }

    pub fn level(&self, i: usize) -> &Level {
        &self.levels[i - 1]
    }

    /// Dense layer of `v`, if it is a layered vertex of V*.
    pub fn layer(&self, v: Vertex) -> Option<usize> {
        match self.layer_of[v as usize] {
            Some(LayerTag::Layer(i)) => Some(i as usize),
            _ => None,
        }
    }

    pub fn is_sparse(&self, v: Vertex) -> bool {
        self.layer_of[v as usize] == Some(LayerTag::Sparse)
    }

    /// Layer number for orientation; sparse and non-V* vertices map to [`SPARSE_LAYER`].
    pub fn layer_key(&self, v: Vertex) -> u32 {
        self.layer(v).map_or(SPARSE_LAYER, |i| i as u32)
    }

    pub fn layer_keys(&self) -> Vec<u32> {
        (0..self.in_vstar.len() as Vertex).map(|v| self.layer_key(v)).collect()
    }

    pub fn block(&self, v: Vertex) -> Option<usize> {
        self.block_of[v as usize].map(|b| b as usize)
    }

    pub fn block_at(&self, layer: usize, clique: usize) -> Option<usize> {
        self.by_clique.get(&(layer, clique)).copied()
    }

    pub fn class_of_vertex(&self, v: Vertex) -> Option<BlockClass> {
        self.block(v).map(|b| self.blocks[b].class)
    }

    /// Ancestor blocks of `b`, nearest first.
    pub fn ancestors(&self, b: usize) -> Vec<usize> {
        let blk = &self.blocks[b];
        let rep = blk.members[0];
        (blk.layer + 1..=self.ell())
            .filter_map(|j| {
                let c = self.level(j).clique(rep).expect("layered vertices stay dense upward");
                self.block_at(j, c)
            })
            .collect()
    }

    /// Strict descendants of `b`.
    pub fn descendants(&self, b: usize) -> Vec<usize> {
        let blk = &self.blocks[b];
        (0..self.blocks.len())
            .filter(|&d| {
                let o = &self.blocks[d];
                o.layer < blk.layer && self.level(blk.layer).clique(o.members[0]) == Some(blk.clique)
            })
            .collect()
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        let (lo, hi) = if self.blocks[a].layer <= self.blocks[b].layer {
            (a, b)
        } else {
            (b, a)
        };
        let (lo, hi) = (&self.blocks[lo], &self.blocks[hi]);
        lo.layer < hi.layer && self.level(hi.layer).clique(lo.members[0]) == Some(hi.clique)
    }

    /// (parent, child) links of the block tree; `None` is the V_sp root.
    pub fn tree_edges(&self) -> Vec<(Option<usize>, usize)> {
        self.blocks.iter().enumerate().map(|(i, b)| (b.parent, i)).collect()
    }

    pub fn children(&self, parent: Option<usize>) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.parent == parent)
            .map(|(i, _)| i)
            .collect()
    }

    /// Mask of vertices in blocks of class `class` whose layer passes `layers`.
    pub fn class_mask(&self, class: BlockClass, layers: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut mask = vec![false; self.in_vstar.len()];
        for b in &self.blocks {
            if b.class == class && layers(b.layer) {
                for &v in &b.members {
                    mask[v as usize] = true;
                }
            }
        }
        mask
    }
}

/// |B| ≥ Δ / log₂(1/εᵢ).
pub fn large_eligible(size: usize, eps: f64, delta: usize) -> bool {
    size as f64 >= delta as f64 / log_inv(eps)
}

/// Large iff every eligible relative B′ at layer j has |B′| < |B|, or |B′| = |B| with j < i.
pub fn classify_blocks(h: &HierarchyView, delta: usize) -> Vec<BlockClass> {
    let eligible: Vec<bool> = h
        .blocks
        .iter()
        .map(|b| large_eligible(b.members.len(), h.eps(b.layer), delta))
        .collect();
    (0..h.blocks.len())
        .map(|b| {
            if !eligible[b] {
                return BlockClass::Small;
            }
            let me = &h.blocks[b];
            let beats = |o: usize| {
                let other = &h.blocks[o];
                !eligible[o]
                    || other.members.len() < me.members.len()
                    || (other.members.len() == me.members.len() && other.layer < me.layer)
            };
            let large = h.ancestors(b).into_iter().all(beats) && h.descendants(b).into_iter().all(beats);
            if large {
                BlockClass::Large
            } else {
                BlockClass::Medium
            }
        })
        .collect()
}

/// Layers, blocks, tree and classes for `vstar` over precomputed levels ε₁..ε_ℓ.
pub fn assemble_hierarchy(
    g: &Graph,
    levels: Vec<Level>,
    vstar: &[bool],
    cfg: &DecompositionConfig,
) -> HierarchyView {
    assert_eq!(vstar.len(), g.n());
    assert_eq!(levels.len(), cfg.ell);
    let n = g.n();
    let mut layer_of = vec![None; n];
    let mut sparse = Vec::new();
    for v in 0..n as Vertex {
        if !vstar[v as usize] {
            continue;
        }
        let tag = levels
            .iter()
            .position(|l| l.is_dense(v))
            .map_or(LayerTag::Sparse, |i| LayerTag::Layer(i as u32 + 1));
        if tag == LayerTag::Sparse {
            sparse.push(v);
        }
        layer_of[v as usize] = Some(tag);
    }

    let mut by_clique: HashMap<(usize, usize), usize> = HashMap::new();
    let mut blocks: Vec<Block> = Vec::new();
    let mut block_of = vec![None; n];
    for (idx, level) in levels.iter().enumerate() {
        let i = idx + 1;
        for (c, clique) in level.cliques.iter().enumerate() {
            let members: Vec<Vertex> = clique
                .iter()
                .copied()
                .filter(|&v| layer_of[v as usize] == Some(LayerTag::Layer(i as u32)))
                .collect();
            if members.is_empty() {
                continue;
            }
            for &v in &members {
                block_of[v as usize] = Some(blocks.len() as u32);
            }
            by_clique.insert((i, c), blocks.len());
            blocks.push(Block {
                layer: i,
                clique: c,
                members,
                parent: None,
                class: BlockClass::Small,
            });
        }
    }

    let mut h = HierarchyView {
        delta: g.max_degree(),
        config: cfg.clone(),
        levels,
        in_vstar: vstar.to_vec(),
        layer_of,
        blocks,
        block_of,
        sparse,
        by_clique,
    };
    for b in 0..h.blocks.len() {
        h.blocks[b].parent = h.ancestors(b).first().copied();
    }
    let classes = classify_blocks(&h, h.delta);
    for (b, class) in classes.into_iter().enumerate() {
        h.blocks[b].class = class;
    }
    h
}

/// Computes every level εᵢ of `cfg` and the hierarchy over `vstar`.
pub fn build_hierarchy(g: &Graph, vstar: &[bool], cfg: &DecompositionConfig) -> HierarchyView {
    let levels = cfg.levels().iter().map(|&e| compute_level(g, e)).collect();
    assemble_hierarchy(g, levels, vstar, cfg)
}
