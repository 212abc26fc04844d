use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{parse_err, Error, Result};

pub type Vertex = u32;
pub type Color = u32;

/// Layer tag for vertices outside every dense layer. Sorts above all real layers,
/// so edges point from sparse vertices toward dense ones.
pub const SPARSE_LAYER: u32 = u32::MAX;

/// Simple undirected graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph on `n` vertices. Self-loops, duplicate edges and out-of-range
    /// endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Inconsistent(format!(
                    "edge {{{u},{v}}} references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Inconsistent(format!("self-loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::Inconsistent(format!(
                    "duplicate edge {{{},{}}}",
                    key.0, key.1
                )));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let max_degree = degree.iter().copied().max().unwrap_or(0);
        Ok(Graph {
            offsets,
            targets,
            max_degree,
        })
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Δ, measured from the adjacency lists.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.n() as Vertex
    }

    /// Each edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// |N(u) ∩ N(v)| by merging the sorted lists.
    pub fn common_neighbors(&self, u: Vertex, v: Vertex) -> usize {
        let (a, b) = (self.neighbors(u), self.neighbors(v));
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// Maximum degree of the subgraph induced by `mask`.
    pub fn induced_max_degree(&self, mask: &[bool]) -> usize {
        self.vertices()
            .filter(|&v| mask[v as usize])
            .map(|v| {
                self.neighbors(v)
                    .iter()
                    .filter(|&&u| mask[u as usize])
                    .count()
            })
            .max()
            .unwrap_or(0)
    }
}

/// Reads the `p col <n> <m>` / `e <u> <v>` format. Lines starting with `c` are comments.
pub fn load_graph<R: BufRead>(reader: R) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let mut fields = line.split_whitespace();
        let Some(tag) = fields.next() else { continue };
        match tag {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(parse_err(line_no, "second header line"));
                }
                if fields.next() != Some("col") {
                    return Err(parse_err(line_no, "expected `p col <n> <m>`"));
                }
                let n = parse_field(fields.next(), line_no, "vertex count")?;
                let m = parse_field(fields.next(), line_no, "edge count")?;
                if fields.next().is_some() {
                    return Err(parse_err(line_no, "trailing fields after header"));
                }
                header = Some((n, m));
            }
            "e" => {
                let Some((n, _)) = header else {
                    return Err(parse_err(line_no, "edge line before header"));
                };
                let u: usize = parse_field(fields.next(), line_no, "edge endpoint")?;
                let v: usize = parse_field(fields.next(), line_no, "edge endpoint")?;
                if fields.next().is_some() {
                    return Err(parse_err(line_no, "trailing fields after edge"));
                }
                if u >= n || v >= n {
                    return Err(Error::Inconsistent(format!(
                        "line {line_no}: edge {{{u},{v}}} outside 0..{n}"
                    )));
                }
                edges.push((u as Vertex, v as Vertex));
            }
            other => return Err(parse_err(line_no, format!("unknown line tag `{other}`"))),
        }
    }
    let Some((n, m)) = header else {
        return Err(parse_err(1, "missing `p col <n> <m>` header"));
    };
    if edges.len() != m {
        return Err(Error::Inconsistent(format!(
            "header declares {m} edges, found {}",
            edges.len()
        )));
    }
    Graph::from_edges(n, &edges)
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, line: usize, what: &str) -> Result<T> {
    let raw = field.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    raw.parse()
        .map_err(|_| parse_err(line, format!("bad {what} `{raw}`")))
}

pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "p col {} {}", g.n(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "e {u} {v}")?;
    }
    Ok(())
}

/// Reads `<v>: c1 c2 ...` lines. Every vertex must appear exactly once.
pub fn load_palettes<R: BufRead>(reader: R, n: usize) -> Result<Vec<Vec<Color>>> {
    let mut palettes: Vec<Option<Vec<Color>>> = vec![None; n];
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (head, tail) = line
            .split_once(':')
            .ok_or_else(|| parse_err(line_no, "expected `<v>: <colors>`"))?;
        let v: usize = parse_field(Some(head.trim()), line_no, "vertex")?;
        if v >= n {
            return Err(Error::Inconsistent(format!(
                "line {line_no}: palette for vertex {v} outside 0..{n}"
            )));
        }
        let mut colors = tail
            .split_whitespace()
            .map(|c| parse_field(Some(c), line_no, "color"))
            .collect::<Result<Vec<Color>>>()?;
        colors.sort_unstable();
        colors.dedup();
        if palettes[v].replace(colors).is_some() {
            return Err(Error::Inconsistent(format!(
                "line {line_no}: second palette for vertex {v}"
            )));
        }
    }
    palettes
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| Error::Inconsistent(format!("no palette for vertex {v}"))))
        .collect()
}

pub fn write_palettes<W: Write>(st: &ColoringState, mut out: W) -> Result<()> {
    for v in 0..st.n() as Vertex {
        let colors: Vec<String> = st.palette(v).iter().map(|c| c.to_string()).collect();
        writeln!(out, "{v}: {}", colors.join(" "))?;
    }
    Ok(())
}

/// Writes `<v> <color>` for every colored vertex.
pub fn write_coloring<W: Write>(st: &ColoringState, mut out: W) -> Result<()> {
    for v in 0..st.n() as Vertex {
        if let Some(c) = st.color(v) {
            writeln!(out, "{v} {c}")?;
        }
    }
    Ok(())
}

/// Reads `<v> <color>` lines into a per-vertex assignment. Missing vertices stay `None`.
pub fn load_coloring<R: BufRead>(reader: R, n: usize) -> Result<Vec<Option<Color>>> {
    let mut assignment = vec![None; n];
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let mut fields = line.split_whitespace();
        let Some(first) = fields.next() else { continue };
        let v: usize = parse_field(Some(first), line_no, "vertex")?;
        let c: Color = parse_field(fields.next(), line_no, "color")?;
        if fields.next().is_some() {
            return Err(parse_err(line_no, "trailing fields"));
        }
        if v >= n {
            return Err(Error::Inconsistent(format!(
                "line {line_no}: vertex {v} outside 0..{n}"
            )));
        }
        if assignment[v].replace(c).is_some() {
            return Err(Error::Inconsistent(format!(
                "line {line_no}: vertex {v} assigned twice"
            )));
        }
    }
    Ok(assignment)
}

/// Partial list coloring: committed colors plus the original palettes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringState {
    assignment: Vec<Option<Color>>,
    palettes: Vec<Vec<Color>>,
    scope: Option<Vec<bool>>,
}

impl ColoringState {
    pub fn new(mut palettes: Vec<Vec<Color>>) -> Self {
        for p in &mut palettes {
            p.sort_unstable();
            p.dedup();
        }
        ColoringState {
            assignment: vec![None; palettes.len()],
            palettes,
            scope: None,
        }
    }

    /// Gives every vertex the palette {0, ..., Δ + extra}.
    pub fn default_palettes(g: &Graph, extra: usize) -> Self {
        let top = (g.max_degree() + extra) as Color;
        ColoringState::new(vec![(0..=top).collect(); g.n()])
    }

    /// Restores a saved assignment without checking it; pair with [`check_proper`].
    pub fn with_assignment(mut self, assignment: Vec<Option<Color>>) -> Self {
        assert_eq!(assignment.len(), self.n());
        self.assignment = assignment;
        self
    }

    pub fn n(&self) -> usize {
        self.palettes.len()
    }

    pub fn color(&self, v: Vertex) -> Option<Color> {
        self.assignment[v as usize]
    }

    pub fn is_colored(&self, v: Vertex) -> bool {
        self.assignment[v as usize].is_some()
    }

    pub fn assignment(&self) -> &[Option<Color>] {
        &self.assignment
    }

    pub fn palette(&self, v: Vertex) -> &[Color] {
        &self.palettes[v as usize]
    }

    pub fn min_palette_len(&self) -> usize {
        self.palettes.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn scope(&self) -> Option<&[bool]> {
        self.scope.as_deref()
    }

    pub fn set_scope(&mut self, scope: Option<Vec<bool>>) {
        if let Some(s) = &scope {
            assert_eq!(s.len(), self.n());
        }
        self.scope = scope;
    }

    fn in_scope(&self, v: Vertex) -> bool {
        self.scope.as_ref().is_none_or(|s| s[v as usize])
    }

    /// Commits `c` to `v`, rejecting colors outside the palette or already taken by a neighbor.
    pub fn commit(&mut self, g: &Graph, v: Vertex, c: Color) -> Result<()> {
        if self.is_colored(v) {
            return Err(Error::Precondition(format!("vertex {v} is already colored")));
        }
        if self.palette(v).binary_search(&c).is_err() {
            return Err(Error::Precondition(format!(
                "color {c} is not in the palette of vertex {v}"
            )));
        }
        if let Some(&u) = g.neighbors(v).iter().find(|&&u| self.color(u) == Some(c)) {
            return Err(Error::Precondition(format!(
                "color {c} at vertex {v} clashes with neighbor {u}"
            )));
        }
        self.assignment[v as usize] = Some(c);
        Ok(())
    }

    /// Commit for callers that have already ruled out clashes.
    pub(crate) fn set(&mut self, v: Vertex, c: Color) {
        debug_assert!(self.assignment[v as usize].is_none());
        debug_assert!(self.palette(v).binary_search(&c).is_ok());
        self.assignment[v as usize] = Some(c);
    }

    /// Colors of colored neighbors, sorted and deduplicated.
    pub fn neighbor_colors(&self, g: &Graph, v: Vertex) -> Vec<Color> {
        let mut taken: Vec<Color> = g
            .neighbors(v)
            .iter()
            .filter_map(|&u| self.color(u))
            .collect();
        taken.sort_unstable();
        taken.dedup();
        taken
    }

    /// Ψ(v) minus the colors held by neighbors.
    pub fn available(&self, g: &Graph, v: Vertex) -> Vec<Color> {
        let taken = self.neighbor_colors(g, v);
        self.palette(v)
            .iter()
            .copied()
            .filter(|c| taken.binary_search(c).is_err())
            .collect()
    }

    pub fn available_len(&self, g: &Graph, v: Vertex) -> usize {
        let taken = self.neighbor_colors(g, v);
        let palette = self.palette(v);
        palette.len()
            - taken
                .iter()
                .filter(|c| palette.binary_search(c).is_ok())
                .count()
    }

    /// Uncolored neighbors, restricted to the scope when one is set.
    pub fn uncolored_neighbors(&self, g: &Graph, v: Vertex) -> usize {
        g.neighbors(v)
            .iter()
            .filter(|&&u| !self.is_colored(u) && self.in_scope(u))
            .count()
    }

    /// |available palette| minus uncolored neighbors in scope.
    pub fn excess(&self, g: &Graph, v: Vertex) -> i64 {
        self.available_len(g, v) as i64 - self.uncolored_neighbors(g, v) as i64
    }

    pub fn uncolored_vertices(&self) -> Vec<Vertex> {
        (0..self.n() as Vertex).filter(|&v| !self.is_colored(v)).collect()
    }

    pub fn colored_count(&self) -> usize {
        self.assignment.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProperReport {
    pub complete: bool,
    pub conflicts: Vec<(Vertex, Vertex)>,
    pub palette_violations: Vec<Vertex>,
}

impl ProperReport {
    pub fn is_proper(&self) -> bool {
        self.conflicts.is_empty() && self.palette_violations.is_empty()
    }

    pub fn is_valid_complete(&self) -> bool {
        self.complete && self.is_proper()
    }
}

pub fn check_proper(g: &Graph, st: &ColoringState) -> ProperReport {
    let conflicts = g
        .edges()
        .filter(|&(u, v)| st.color(u).is_some() && st.color(u) == st.color(v))
        .collect();
    let palette_violations = g
        .vertices()
        .filter(|&v| {
            st.color(v)
                .is_some_and(|c| st.palette(v).binary_search(&c).is_err())
        })
        .collect();
    ProperReport {
        complete: st.is_complete(),
        conflicts,
        palette_violations,
    }
}

/// Acyclic orientation given by a per-vertex total-order key: every edge points
/// from the endpoint with the larger key to the one with the smaller key.
#[derive(Debug, Clone)]
pub struct OrientationView {
    key: Vec<u64>,
}

impl OrientationView {
    /// Lower ID wins.
    pub fn by_id(n: usize) -> Self {
        OrientationView {
            key: (0..n as u64).collect(),
        }
    }

    /// Keys must be distinct.
    pub fn from_keys(key: Vec<u64>) -> Self {
        OrientationView { key }
    }

    pub fn key(&self, v: Vertex) -> u64 {
        self.key[v as usize]
    }

    /// True when the edge {u, v} is oriented (u, v).
    pub fn points_to(&self, u: Vertex, v: Vertex) -> bool {
        self.key[u as usize] > self.key[v as usize]
    }

    pub fn out_neighbors<'a>(&'a self, g: &'a Graph, v: Vertex) -> impl Iterator<Item = Vertex> + 'a {
        g.neighbors(v)
            .iter()
            .copied()
            .filter(move |&u| self.points_to(v, u))
    }

    pub fn out_degree(&self, g: &Graph, v: Vertex) -> usize {
        self.out_neighbors(g, v).count()
    }
}

/// Orients each edge from the higher layer to the lower one, ties toward the smaller ID.
/// Use [`SPARSE_LAYER`] for vertices outside every layer.
pub fn orient(g: &Graph, layers: &[u32]) -> OrientationView {
    assert_eq!(layers.len(), g.n());
    OrientationView {
        key: layers
            .iter()
            .enumerate()
            .map(|(v, &l)| ((l as u64) << 32) | v as u64)
            .collect(),
    }
}
