//! Simple undirected graphs with a fixed vertex ordering, oriented edges,
//! and the vertex-split extensions used by the extended influence matrix.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop ({0},{0}) is not allowed")]
    SelfLoop(usize),
    #[error("edge ({u},{v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("vertex {0} does not exist (graph has {1} vertices)")]
    NoSuchVertex(usize, usize),
    #[error("pair extension requires two distinct vertices, got {0} twice")]
    IdenticalPair(usize),
}

/// Simple undirected graph. Vertices are `0..n`; the integer order doubles
/// as the total vertex ordering used by all spin-fixing rules downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    connected: bool,
}

impl Graph {
    /// Builds a graph from an edge list. Pairs are normalised to (min,max)
    /// and de-duplicated; self-loops and out-of-range endpoints are rejected.
    pub fn build(n: usize, edge_list: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let connected = Self::compute_connected(n, &adj);
        Ok(Graph {
            n,
            edges,
            adj,
            connected,
        })
    }

    fn compute_connected(n: usize, adj: &[Vec<usize>]) -> bool {
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Normalised (min,max) edge pairs in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).min().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_cycle(&self) -> bool {
        self.n >= 3 && self.connected && self.adj.iter().all(|a| a.len() == 2)
    }

    pub fn is_regular(&self) -> Option<usize> {
        let d = self.adj.first().map(|a| a.len())?;
        if self.adj.iter().all(|a| a.len() == d) {
            Some(d)
        } else {
            None
        }
    }

    /// Oriented edge set M: both directions of every edge, in lexicographic
    /// (tail, head) order.
    pub fn oriented_edges(&self) -> Vec<OrientedEdge> {
        let mut out = Vec::with_capacity(2 * self.edges.len());
        for v in 0..self.n {
            for &w in &self.adj[v] {
                out.push(OrientedEdge { tail: v, head: w });
            }
        }
        out
    }

    /// Induced subgraph on `keep` (must be sorted, deduplicated). Returns the
    /// subgraph plus the old-id list, so `old = keep[new]`; relative vertex
    /// order is preserved.
    pub fn induced_subgraph(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut new_id = BTreeMap::new();
        for (i, &v) in keep.iter().enumerate() {
            new_id.insert(v, i);
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            if let (Some(&a), Some(&b)) = (new_id.get(&u), new_id.get(&v)) {
                edges.push((a, b));
            }
        }
        let g = Graph::build(keep.len(), &edges).expect("induced subgraph is valid");
        (g, keep.to_vec())
    }
}

/// Oriented edge of the host graph; `reverse` is the involution e -> e^{-1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub tail: usize,
    pub head: usize,
}

impl OrientedEdge {
    pub fn new(tail: usize, head: usize) -> Self {
        OrientedEdge { tail, head }
    }

    pub fn reverse(self) -> Self {
        OrientedEdge {
            tail: self.head,
            head: self.tail,
        }
    }
}

impl fmt::Display for OrientedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.tail, self.head)
    }
}

/// Vertex of an extended (vertex-split) graph.
///
/// A split vertex `Split { of, toward }` is the degree-one copy of `of`
/// that faces the neighbour with original id `toward`. Naming split
/// vertices by original ids makes the pair extension independent of the
/// order in which the two splits are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtVertex {
    Original(usize),
    Split { of: usize, toward: usize },
}

impl ExtVertex {
    fn sort_key(self) -> (usize, usize, usize) {
        match self {
            ExtVertex::Original(v) => (v, 0, 0),
            ExtVertex::Split { of, toward } => (of, 1, toward),
        }
    }

    /// Original id of the vertex this label refers to (the split source for
    /// split vertices).
    pub fn base(self) -> usize {
        match self {
            ExtVertex::Original(v) => v,
            ExtVertex::Split { of, .. } => of,
        }
    }
}

impl PartialOrd for ExtVertex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtVertex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for ExtVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtVertex::Original(v) => write!(f, "{v}"),
            ExtVertex::Split { of, toward } => write!(f, "{of}|{toward}"),
        }
    }
}

/// A graph produced by one or more vertex splits, with the canonical label
/// of every integer vertex.
#[derive(Debug, Clone)]
pub struct ExtendedGraph {
    pub graph: Graph,
    pub labels: Vec<ExtVertex>,
    index: BTreeMap<(usize, usize, usize), usize>,
}

impl ExtendedGraph {
    fn from_label_edges(labels: Vec<ExtVertex>, edges: &[(ExtVertex, ExtVertex)]) -> Self {
        let mut labels = labels;
        labels.sort();
        let index: BTreeMap<(usize, usize, usize), usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.sort_key(), i))
            .collect();
        let int_edges: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| (index[&a.sort_key()], index[&b.sort_key()]))
            .collect();
        let graph = Graph::build(labels.len(), &int_edges).expect("extension edges are valid");
        ExtendedGraph {
            graph,
            labels,
            index,
        }
    }

    pub fn id_of(&self, label: ExtVertex) -> Option<usize> {
        self.index.get(&label.sort_key()).copied()
    }

    pub fn label_of(&self, id: usize) -> ExtVertex {
        self.labels[id]
    }

    /// Ids of split vertices of `of`, keyed by the faced neighbour.
    pub fn split_map(&self, of: usize) -> BTreeMap<usize, usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| match l {
                ExtVertex::Split { of: o, toward } if *o == of => Some((*toward, i)),
                _ => None,
            })
            .collect()
    }

    fn label_edge_list(&self) -> Vec<(ExtVertex, ExtVertex)> {
        self.graph
            .edges()
            .iter()
            .map(|&(a, b)| (self.labels[a], self.labels[b]))
            .collect()
    }

    fn split(&self, w_base: usize) -> ExtendedGraph {
        // split every surviving vertex whose base id is w_base (there is
        // exactly one: either the original or nothing)
        let target = self
            .labels
            .iter()
            .position(|l| matches!(l, ExtVertex::Original(v) if *v == w_base))
            .expect("vertex to split must still be an original vertex");
        let target_label = self.labels[target];
        let mut labels: Vec<ExtVertex> = self
            .labels
            .iter()
            .copied()
            .filter(|&l| l != target_label)
            .collect();
        let mut edges: Vec<(ExtVertex, ExtVertex)> = Vec::new();
        for (a, b) in self.label_edge_list() {
            if a == target_label || b == target_label {
                let other = if a == target_label { b } else { a };
                let split = ExtVertex::Split {
                    of: w_base,
                    toward: other.base(),
                };
                labels.push(split);
                edges.push((split, other));
            } else {
                edges.push((a, b));
            }
        }
        ExtendedGraph::from_label_edges(labels, &edges)
    }
}

/// The w-extension: w is replaced by degree-many split vertices, each
/// adjacent only to the neighbour it faces.
pub fn vertex_extension(g: &Graph, w: usize) -> Result<ExtendedGraph, GraphError> {
    if w >= g.vertex_count() {
        return Err(GraphError::NoSuchVertex(w, g.vertex_count()));
    }
    let labels: Vec<ExtVertex> = (0..g.vertex_count()).map(ExtVertex::Original).collect();
    let edges: Vec<(ExtVertex, ExtVertex)> = g
        .edges()
        .iter()
        .map(|&(a, b)| (ExtVertex::Original(a), ExtVertex::Original(b)))
        .collect();
    let base = ExtendedGraph::from_label_edges(labels, &edges);
    Ok(base.split(w))
}

/// The {u,w}-extension; by the canonical split naming the result does not
/// depend on the order of the two splits.
pub fn pair_extension(g: &Graph, u: usize, w: usize) -> Result<ExtendedGraph, GraphError> {
    if u == w {
        return Err(GraphError::IdenticalPair(u));
    }
    let first = vertex_extension(g, w)?;
    if u >= g.vertex_count() {
        return Err(GraphError::NoSuchVertex(u, g.vertex_count()));
    }
    Ok(first.split(u))
}
