//! Immutable simple undirected graphs.
//!
//! Storage is compressed sparse rows with every adjacency list sorted
//! ascending. Each adjacency slot also carries the id of the undirected edge
//! it belongs to, so per-edge state (walk memory) can live in a dense vector.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    edge_ids: Vec<usize>,
    /// Canonical edge list: `u < v`, lexicographically sorted. Index = edge id.
    edges: Vec<(usize, usize)>,
    coords: Option<Vec<[f64; 2]>>,
    community: Option<Vec<usize>>,
}

/// Result of reducing a graph to its largest connected component.
#[derive(Debug, Clone)]
pub struct GiantComponent {
    pub graph: Graph,
    /// `mapping[old] = Some(new)` for retained nodes.
    pub mapping: Vec<Option<usize>>,
}

/// A graph parsed from edge-list text plus the number of input lines that
/// were dropped as self-loops or duplicate edges.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub dropped: usize,
}

impl Graph {
    /// Builds a simple graph. Self-loops, duplicate edges (in either
    /// orientation) and out-of-range endpoints are rejected.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::usage(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if u == v {
                return Err(Error::usage(format!("self-loop at node {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::usage(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(Self::from_canonical(node_count, canon))
    }

    /// Like [`Graph::from_edges`] but silently drops self-loops and
    /// duplicates, returning how many input pairs were discarded.
    pub fn from_edges_lossy<I>(node_count: usize, edges: I) -> Result<(Graph, usize)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut canon = Vec::new();
        let mut dropped = 0;
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::usage(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if u == v {
                dropped += 1;
                continue;
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        dropped += before - canon.len();
        Ok((Self::from_canonical(node_count, canon), dropped))
    }

    // `edges` must already be canonical: u < v, sorted, unique.
    fn from_canonical(node_count: usize, edges: Vec<(usize, usize)>) -> Graph {
        let mut degree = vec![0usize; node_count];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut neighbors = vec![0usize; total];
        let mut edge_ids = vec![0usize; total];
        let mut cursor = offsets[..node_count].to_vec();
        // Walking canonical edges in order fills each list ascending: for a
        // node x, neighbors below x arrive (as v) before neighbors above x
        // (as u), and each group arrives sorted.
        for (id, &(u, v)) in edges.iter().enumerate() {
            neighbors[cursor[v]] = u;
            edge_ids[cursor[v]] = id;
            cursor[v] += 1;
        }
        for (id, &(u, v)) in edges.iter().enumerate() {
            neighbors[cursor[u]] = v;
            edge_ids[cursor[u]] = id;
            cursor[u] += 1;
        }
        Graph {
            offsets,
            neighbors,
            edge_ids,
            edges,
            coords: None,
            community: None,
        }
    }

    pub fn with_coords(mut self, coords: Vec<[f64; 2]>) -> Result<Graph> {
        if coords.len() != self.node_count() {
            return Err(Error::usage(format!(
                "{} coordinates for {} nodes",
                coords.len(),
                self.node_count()
            )));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn with_communities(mut self, community: Vec<usize>) -> Result<Graph> {
        if community.len() != self.node_count() {
            return Err(Error::usage(format!(
                "{} community labels for {} nodes",
                community.len(),
                self.node_count()
            )));
        }
        self.community = Some(community);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, i: usize) -> Result<usize> {
        if i >= self.node_count() {
            return Err(Error::usage(format!(
                "node {i} out of range for {} nodes",
                self.node_count()
            )));
        }
        Ok(self.offsets[i + 1] - self.offsets[i])
    }

    /// Sorted neighbors of `i`. Panics if `i` is out of range.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Edge ids aligned with [`Graph::neighbors`].
    #[inline]
    pub fn neighbor_edge_ids(&self, i: usize) -> &[usize] {
        &self.edge_ids[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// `2|E| / N`.
    pub fn average_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }

    /// Canonical edges (`u < v`, sorted); position is the edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.node_count() || v >= self.node_count() {
            return None;
        }
        let nbrs = self.neighbors(u);
        nbrs.binary_search(&v).ok().map(|pos| self.neighbor_edge_ids(u)[pos])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    pub fn communities(&self) -> Option<&[usize]> {
        self.community.as_deref()
    }

    /// Component label per node; labels are assigned in order of each
    /// component's smallest node index.
    pub fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for root in 0..n {
            if label[root] != usize::MAX {
                continue;
            }
            let c = sizes.len();
            label[root] = c;
            queue.push_back(root);
            let mut size = 0;
            while let Some(x) = queue.pop_front() {
                size += 1;
                for &y in self.neighbors(x) {
                    if label[y] == usize::MAX {
                        label[y] = c;
                        queue.push_back(y);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1.len() <= 1
    }

    /// Largest connected component, relabeled densely in increasing order of
    /// the original indices. Ties go to the component holding the smallest
    /// original index. Coordinates and community labels are carried along.
    pub fn giant_component(&self) -> GiantComponent {
        let (label, sizes) = self.components();
        let n = self.node_count();
        if sizes.len() <= 1 {
            return GiantComponent {
                graph: self.clone(),
                mapping: (0..n).map(Some).collect(),
            };
        }
        let mut best = 0;
        for (c, &s) in sizes.iter().enumerate() {
            if s > sizes[best] {
                best = c;
            }
        }
        let mut mapping = vec![None; n];
        let mut next = 0;
        for (old, &l) in label.iter().enumerate() {
            if l == best {
                mapping[old] = Some(next);
                next += 1;
            }
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|&(u, v)| Some((mapping[u]?, mapping[v]?)))
            .collect();
        // Monotone relabeling keeps the edge list canonical.
        let mut graph = Graph::from_canonical(next, edges);
        let keep = |old: usize| mapping[old].is_some();
        if let Some(c) = &self.coords {
            graph.coords = Some((0..n).filter(|&i| keep(i)).map(|i| c[i]).collect());
        }
        if let Some(c) = &self.community {
            graph.community = Some((0..n).filter(|&i| keep(i)).map(|i| c[i]).collect());
        }
        GiantComponent { graph, mapping }
    }

    /// Serializes as `u v` lines, smaller endpoint first. A `# nodes N`
    /// header is written only when trailing isolated nodes would otherwise be
    /// lost.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let implied = self.edges.iter().map(|&(_, v)| v + 1).max().unwrap_or(0);
        if implied != self.node_count() {
            let _ = writeln!(out, "# nodes {}", self.node_count());
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses edge-list text: two non-negative integers per line, any
    /// whitespace, `#` comments. Node count is the largest index plus one,
    /// or the value of a `# nodes N` comment when that is larger.
    pub fn from_edge_list(text: &str) -> Result<LoadedGraph> {
        let mut pairs = Vec::new();
        let mut declared = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let mut parts = comment.split_whitespace();
                if parts.next() == Some("nodes") {
                    if let Some(Ok(n)) = parts.next().map(str::parse::<usize>) {
                        declared = declared.max(n);
                    }
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                let tok = tok.ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    message: "expected two node indices".into(),
                })?;
                tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("invalid node index {tok:?}"),
                })
            };
            let u = parse(parts.next())?;
            let v = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: "trailing tokens after edge".into(),
                });
            }
            pairs.push((u, v));
        }
        let implied = pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let n = implied.max(declared);
        if n == 0 {
            return Err(Error::usage("edge list holds no nodes"));
        }
        let (graph, dropped) = Graph::from_edges_lossy(n, pairs)?;
        Ok(LoadedGraph { graph, dropped })
    }
}
