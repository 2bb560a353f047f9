//! Undirected simple graphs with per-node identifiers.
//!
//! Nodes are addressed by dense internal indices `0..n`; each carries a
//! [`NodeId`] that is what distributed nodes see. All orderings that leak into
//! outputs are by ID.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::seed;

/// Identifier of a node as seen by the nodes themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Undirected edge between internal indices, normalized so `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

impl Edge {
    pub fn new(x: usize, y: usize) -> Self {
        if x <= y {
            Edge { a: x, b: y }
        } else {
            Edge { a: y, b: x }
        }
    }

    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateId(NodeId),
    #[error("node index {0} out of range")]
    NoSuchNode(usize),
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) already present")]
    ParallelEdge(usize, usize),
}

/// Simple undirected graph; adjacency lists are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<NodeId>,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Edgeless graph over the given IDs (position `i` gets `ids[i]`).
    pub fn new(ids: Vec<NodeId>) -> Result<Self, GraphError> {
        let mut seen = std::collections::HashSet::with_capacity(ids.len());
        for &id in &ids {
            if !seen.insert(id) {
                return Err(GraphError::DuplicateId(id));
            }
        }
        let n = ids.len();
        Ok(Graph {
            ids,
            adj: vec![Vec::new(); n],
            edge_count: 0,
        })
    }

    /// Edgeless graph with IDs `1..=n`.
    pub fn with_sequential_ids(n: usize) -> Self {
        Graph::new((1..=n as u64).map(NodeId).collect()).expect("sequential ids are unique")
    }

    /// Graph with IDs `1..=n` and the given edges (internal indices).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::with_sequential_ids(n);
        for &(x, y) in edges {
            g.add_edge(x, y)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> NodeId {
        self.ids[v]
    }

    /// Reverse lookup; linear in `n`. Use [`Graph::id_index`] for bulk lookups.
    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    pub fn id_index(&self) -> HashMap<NodeId, usize> {
        self.ids.iter().enumerate().map(|(i, &id)| (id, i)).collect()
    }

    pub fn add_edge(&mut self, x: usize, y: usize) -> Result<(), GraphError> {
        let n = self.node_count();
        if x >= n {
            return Err(GraphError::NoSuchNode(x));
        }
        if y >= n {
            return Err(GraphError::NoSuchNode(y));
        }
        if x == y {
            return Err(GraphError::SelfLoop(x));
        }
        match self.adj[x].binary_search(&y) {
            Ok(_) => return Err(GraphError::ParallelEdge(x, y)),
            Err(pos) => self.adj[x].insert(pos, y),
        }
        let pos = self.adj[y].binary_search(&x).unwrap_err();
        self.adj[y].insert(pos, x);
        self.edge_count += 1;
        Ok(())
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        x < self.node_count() && self.adj[x].binary_search(&y).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// All edges, ordered by internal index.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (a, nbrs) in self.adj.iter().enumerate() {
            for &b in nbrs.iter().filter(|&&b| b > a) {
                out.push(Edge { a, b });
            }
        }
        out
    }

    /// All edges ordered lexicographically by `(min id, max id)`.
    pub fn edges_by_id(&self) -> Vec<Edge> {
        let mut edges = self.edges();
        edges.sort_by_key(|e| self.id_key(*e));
        edges
    }

    /// `(min id, max id)` of an edge.
    pub fn id_key(&self, e: Edge) -> (NodeId, NodeId) {
        let (x, y) = (self.ids[e.a], self.ids[e.b]);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }

    /// Subgraph on the same node set containing exactly `edges`.
    pub fn spanning_subgraph<'a, I>(&self, edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = &'a Edge>,
    {
        let mut h = Graph::new(self.ids.clone())?;
        for e in edges {
            h.add_edge(e.a, e.b)?;
        }
        Ok(h)
    }

    /// Hop distance from `src` to `dst` if it is at most `limit`.
    pub fn distance_within(&self, src: usize, dst: usize, limit: usize) -> Option<usize> {
        bounded_distance(src, dst, limit, |v| self.adj[v].iter().copied())
    }

    /// BFS distances from `src`, `usize::MAX` for unreachable nodes; the
    /// search stops expanding beyond depth `limit`.
    pub fn bfs_distances(&self, src: usize, limit: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            if dist[v] >= limit {
                continue;
            }
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// G(n, p) on IDs `1..=n`, one Bernoulli trial per unordered pair.
    pub fn erdos_renyi(n: usize, p: f64, seed_value: u64) -> Self {
        let mut rng = seed::rng_from(seed::derive(seed_value, seed::TAG_FIXTURE, n as u64));
        let mut g = Graph::with_sequential_ids(n);
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < p {
                    g.add_edge(a, b).expect("fresh pair");
                }
            }
        }
        g
    }
}

/// Depth-limited BFS distance over an arbitrary neighbor function.
pub(crate) fn bounded_distance<F, I>(src: usize, dst: usize, limit: usize, nbrs: F) -> Option<usize>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    if src == dst {
        return Some(0);
    }
    let mut dist: HashMap<usize, usize> = HashMap::from([(src, 0)]);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d >= limit {
            continue;
        }
        for w in nbrs(v) {
            if dist.contains_key(&w) {
                continue;
            }
            if w == dst {
                return Some(d + 1);
            }
            dist.insert(w, d + 1);
            queue.push_back(w);
        }
    }
    None
}
