//! DenseColoringStep (versions 1 and 2), their parameter schedules and the stage drivers.

mod schedule;
mod stages;
mod step;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, OrientationView, Vertex};
use crate::runtime::check_weak_diameter;

pub use schedule::{
    default_delta, default_rows, high_degree_feasible, high_degree_rows, layered_default_rows, low_degree_rows, DenseSchedule,
    ScheduleRow, Variant,
};
pub use stages::{
    color_large, color_large_top, color_small_medium, color_small_medium_top, select_schedule, witness_check, StageContext,
    StageOutcome, TopLargeOutcome,
};
pub use step::{dense_step_v1, dense_step_v2, selection_count, StepReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cluster {
    /// Position in the (layer, minimum ID) order of the set the cluster was built in.
    pub rank: u32,
    pub layer: u32,
    pub members: Vec<Vertex>,
}

/// Disjoint weak-diameter-2 clusters ordered by (layer, minimum ID).
#[derive(Debug, Clone)]
pub struct ClusterSet {
    clusters: Vec<Cluster>,
    cluster_of: Vec<Option<u32>>,
}

const ID_BITS: u32 = 28;

impl ClusterSet {
    /// Sorts members, drops empty clusters, and checks disjointness and weak diameter.
    /// `layer_keys` gives each vertex's layer; a cluster's layer is its smallest one.
    pub fn new(g: &Graph, clusters: Vec<Vec<Vertex>>, layer_keys: &[u32]) -> Result<Self> {
        assert!(g.n() < 1 << ID_BITS, "vertex IDs must fit in {ID_BITS} bits");
        let mut built: Vec<Cluster> = Vec::new();
        for mut members in clusters {
            if members.is_empty() {
                continue;
            }
            members.sort_unstable();
            members.dedup();
            check_weak_diameter(g, &members)?;
            let layer = members.iter().map(|&v| layer_keys[v as usize]).min().unwrap_or(0);
            built.push(Cluster { rank: 0, layer, members });
        }
        built.sort_by_key(|c| (c.layer, c.members[0]));
        let mut cluster_of = vec![None; g.n()];
        for (j, c) in built.iter_mut().enumerate() {
            c.rank = j as u32;
            for &v in &c.members {
                if cluster_of[v as usize].is_some() {
                    return Err(Error::Precondition(format!("vertex {v} lies in two clusters")));
                }
                cluster_of[v as usize] = Some(j as u32);
            }
        }
        Ok(ClusterSet { clusters: built, cluster_of })
    }

    /// Keeps the members passing `keep`, preserving ranks. Subsets keep weak diameter 2.
    pub fn restrict(&self, keep: impl Fn(Vertex) -> bool) -> ClusterSet {
        let mut cluster_of = vec![None; self.cluster_of.len()];
        let mut clusters = Vec::new();
        for c in &self.clusters {
            let members: Vec<Vertex> = c.members.iter().copied().filter(|&v| keep(v)).collect();
            if members.is_empty() {
                continue;
            }
            for &v in &members {
                cluster_of[v as usize] = Some(clusters.len() as u32);
            }
            clusters.push(Cluster {
                rank: c.rank,
                layer: c.layer,
                members,
            });
        }
        ClusterSet { clusters, cluster_of }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_of(&self, v: Vertex) -> Option<usize> {
        self.cluster_of[v as usize].map(|j| j as usize)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.cluster_of[v as usize].is_some()
    }

    pub fn vertex_count(&self) -> usize {
        self.clusters.iter().map(|c| c.members.len()).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.clusters.iter().flat_map(|c| c.members.iter().copied())
    }

    pub fn mask(&self) -> Vec<bool> {
        self.cluster_of.iter().map(Option::is_some).collect()
    }

    /// (layer, cluster rank, ID) order. Vertices outside the set sort after every
    /// cluster of their layer.
    pub fn order_key(&self, v: Vertex, layer_keys: &[u32]) -> u64 {
        let layer = layer_keys[v as usize].min(255) as u64;
        let rank = match self.cluster_of(v) {
            Some(j) => self.clusters[j].rank as u64,
            None => (1 << ID_BITS) - 1,
        };
        (layer << (2 * ID_BITS)) | (rank << ID_BITS) | v as u64
    }

    pub fn orientation(&self, layer_keys: &[u32]) -> OrientationView {
        OrientationView::from_keys(
            (0..layer_keys.len() as Vertex)
                .map(|v| self.order_key(v, layer_keys))
                .collect(),
        )
    }
}
