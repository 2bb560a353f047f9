//! Output validation: stretch, size, critical-edge inclusion and the
//! sparse node set.
//!
//! Stretch is checked per edge: an unweighted subgraph is a `k`-spanner iff
//! every graph edge has spanner distance at most `k`, since shortest paths
//! concatenate edges. Size thresholds are compared exactly.

use std::collections::{HashSet, VecDeque};

use num_rational::Rational64;
use thiserror::Error;

use crate::exact::{floor_pow, rational};
use crate::graph::{Edge, Graph};
use crate::graph_model::{ColoredGraph, LowerBoundParams};
use crate::par::Execution;
use crate::traversal::CriticalityReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("spanner edge ({0}, {1}) is not a graph edge")]
    NotSubgraph(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StretchResult {
    pub ok: bool,
    pub k: usize,
    /// Edge with the largest spanner distance; `None` distance means the
    /// endpoints are disconnected in the spanner.
    pub worst: Option<(Edge, Option<usize>)>,
    pub violations: usize,
}

fn spanner_adjacency(g: &Graph, s: &[Edge]) -> Result<Vec<Vec<usize>>, VerifyError> {
    let mut adj = vec![Vec::new(); g.node_count()];
    for e in s {
        if !g.has_edge(e.a, e.b) {
            return Err(VerifyError::NotSubgraph(e.a, e.b));
        }
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    Ok(adj)
}

fn bfs(adj: &[Vec<usize>], src: usize, limit: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        if dist[v] >= limit {
            continue;
        }
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Distance ranking with `None` (disconnected) as the largest.
fn rank(d: Option<usize>) -> usize {
    d.unwrap_or(usize::MAX)
}

/// True iff every edge of `g` has distance at most `k` in `s`.
pub fn stretch_check(
    g: &Graph,
    s: &[Edge],
    k: usize,
    exec: Execution,
) -> Result<StretchResult, VerifyError> {
    let adj = spanner_adjacency(g, s)?;
    // Per source: (worst edge with its bounded distance, violating count).
    let per_node = exec.map_range(g.node_count(), |u| {
        let forward: Vec<usize> = g.neighbors(u).iter().copied().filter(|&v| v > u).collect();
        if forward.is_empty() {
            return (None, 0usize);
        }
        let dist = bfs(&adj, u, k);
        let mut worst: Option<(Edge, Option<usize>)> = None;
        let mut bad = 0;
        for v in forward {
            let d = (dist[v] != usize::MAX).then_some(dist[v]);
            if d.is_none() {
                bad += 1;
            }
            if worst.is_none_or(|(_, wd)| rank(d) > rank(wd)) {
                worst = Some((Edge::new(u, v), d));
            }
        }
        (worst, bad)
    });
    let violations = per_node.iter().map(|(_, b)| b).sum();
    let mut worst: Option<(Edge, Option<usize>)> = None;
    for (w, _) in per_node.into_iter() {
        if let Some(cand) = w {
            if worst.is_none_or(|(_, wd)| rank(cand.1) > rank(wd)) {
                worst = Some(cand);
            }
        }
    }
    // A violating worst edge gets its exact, unbounded distance.
    if let Some((e, None)) = worst {
        let d = bfs(&adj, e.a, usize::MAX)[e.b];
        worst = Some((e, (d != usize::MAX).then_some(d)));
    }
    Ok(StretchResult {
        ok: violations == 0,
        k,
        worst,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeCheck {
    pub ok: bool,
    pub size: usize,
    /// `⌊n^{1+1/t+ε}⌋ + n`.
    pub threshold: u64,
    pub slack: Rational64,
}

/// `1/(16k²)` with `k = 2t − 1`.
pub fn default_slack(t: u32) -> Rational64 {
    let k = 2 * t as i64 - 1;
    rational(1, 16 * k * k)
}

/// True iff `size ≤ n^{1+1/t+ε} + n`, decided exactly.
pub fn size_check(size: usize, n: usize, t: u32, slack: Rational64) -> SizeCheck {
    let exponent = rational(1, 1) + rational(1, t as i64) + slack;
    let threshold = floor_pow(n as u64, exponent) + n as u64;
    SizeCheck {
        ok: size as u64 <= threshold,
        size,
        threshold,
        slack,
    }
}

/// Critical edges absent from `s`.
pub fn critical_inclusion_check(report: &CriticalityReport, s: &[Edge]) -> Vec<Edge> {
    let present: HashSet<Edge> = s.iter().copied().collect();
    report
        .edges()
        .into_iter()
        .filter(|e| !present.contains(e))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseSet {
    /// U-nodes whose output count is at most `threshold`.
    pub members: Vec<usize>,
    /// `⌊n^{2/(k+1)+1/(8k²)}⌋`.
    pub threshold: u64,
    /// `n/2 − ⌊n/log₂ n⌋`.
    pub required: usize,
    /// `|S| ≥ required`.
    pub ok: bool,
}

/// `2/(k+1) + 1/(8k²)`.
pub fn sparse_exponent(k: u32) -> Rational64 {
    let k = k as i64;
    rational(2, k + 1) + rational(1, 8 * k * k)
}

/// `counts` holds one output count per node of `g` (internal-index order).
pub fn sparse_set(g: &ColoredGraph, counts: &[usize], params: &LowerBoundParams) -> SparseSet {
    assert_eq!(counts.len(), g.node_count());
    let n = params.n;
    let threshold = floor_pow(n as u64, sparse_exponent(params.k));
    let members: Vec<usize> = (0..g.half())
        .filter(|&u| counts[u] as u64 <= threshold)
        .collect();
    let required = (n / 2).saturating_sub((n as f64 / (n as f64).log2()).floor() as usize);
    SparseSet {
        ok: members.len() >= required,
        members,
        threshold,
        required,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub stretch: StretchResult,
    pub size: SizeCheck,
    pub missing_critical: Vec<Edge>,
    pub sparse: Option<SparseSet>,
}

impl VerificationReport {
    pub const CSV_HEADER: &'static str = "stretch_ok,k,worst_edge,worst_distance,size,size_threshold,size_ok,missing_critical,sparse_size,sparse_threshold,sparse_required,sparse_ok";

    /// Worst edge is printed as `min_id-max_id`.
    pub fn to_csv_row(&self, g: &Graph) -> String {
        let (worst, dist) = match self.stretch.worst {
            Some((e, d)) => {
                let (a, b) = g.id_key(e);
                (format!("{a}-{b}"), d.map_or("inf".to_string(), |d| d.to_string()))
            }
            None => ("-".to_string(), "-".to_string()),
        };
        let (ss, st, sr, sok) = match &self.sparse {
            Some(s) => (
                s.members.len().to_string(),
                s.threshold.to_string(),
                s.required.to_string(),
                s.ok.to_string(),
            ),
            None => ("-".into(), "-".into(), "-".into(), "-".into()),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.stretch.ok,
            self.stretch.k,
            worst,
            dist,
            self.size.size,
            self.size.threshold,
            self.size.ok,
            self.missing_critical.len(),
            ss,
            st,
            sr,
            sok
        )
    }
}

/// All checks for a spanner of a lower-bound instance.
pub fn verify_instance_output(
    g: &ColoredGraph,
    params: &LowerBoundParams,
    report: &CriticalityReport,
    s: &[Edge],
    counts: &[usize],
    exec: Execution,
) -> Result<VerificationReport, VerifyError> {
    let plain = g.to_graph();
    Ok(VerificationReport {
        stretch: stretch_check(&plain, s, params.k as usize, exec)?,
        size: size_check(s.len(), params.n, params.t, default_slack(params.t)),
        missing_critical: critical_inclusion_check(report, s),
        sparse: Some(sparse_set(g, counts, params)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn stretch_examples() {
        let c5 = cycle(5);
        let all = c5.edges();
        for k in 1..4 {
            assert!(stretch_check(&c5, &all, k, Execution::Sequential).unwrap().ok);
        }
        let missing = Edge::new(0, 4);
        let s: Vec<Edge> = all.iter().copied().filter(|&e| e != missing).collect();
        let r = stretch_check(&c5, &s, 3, Execution::Sequential).unwrap();
        assert!(!r.ok);
        assert_eq!(r.worst, Some((missing, Some(4))));
        assert_eq!(r.violations, 1);

        let k4 = complete(4);
        let star = [Edge::new(0, 1), Edge::new(0, 2), Edge::new(0, 3)];
        let r = stretch_check(&k4, &star, 2, Execution::Parallel).unwrap();
        assert!(r.ok);
        assert_eq!(r.worst.unwrap().1, Some(2));
    }

    #[test]
    fn disconnected_worst_and_non_subgraph() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let r = stretch_check(&g, &[Edge::new(0, 1)], 3, Execution::Sequential).unwrap();
        assert_eq!(r.worst, Some((Edge::new(1, 2), None)));
        assert_eq!(
            stretch_check(&g, &[Edge::new(0, 2)], 3, Execution::Sequential),
            Err(VerifyError::NotSubgraph(0, 2))
        );
    }

    #[test]
    fn size_examples() {
        assert!(size_check(0, 64, 2, default_slack(2)).ok);
        let r = size_check(2016, 64, 2, rational(1, 64));
        assert!(!r.ok);
        assert_eq!(r.threshold, 610);
        assert!(!size_check(2016, 64, 2, default_slack(2)).ok);
        // Exact at a perfect power: 4096^{3/2} = 262144.
        assert_eq!(size_check(0, 4096, 2, rational(0, 1)).threshold, 262144 + 4096);
        assert!(size_check(266240, 4096, 2, rational(0, 1)).ok);
        assert!(!size_check(266241, 4096, 2, rational(0, 1)).ok);
    }

    #[test]
    fn sparse_set_examples() {
        let p = LowerBoundParams::derive(4096, 2).unwrap();
        let ids = (1..=4096).map(NodeId).collect();
        let g = ColoredGraph::from_layout(2048, p.region_size, ids, 4096).unwrap();
        let zeros = vec![0; 4096];
        let s = sparse_set(&g, &zeros, &p);
        assert_eq!(s.threshold, 71);
        assert_eq!(s.required, 1707);
        assert_eq!(s.members.len(), 2048);
        assert!(s.ok);
        let blue: Vec<usize> = (0..4096).map(|v| g.blue_degree(v)).collect();
        let s = sparse_set(&g, &blue, &p);
        assert!(s.members.iter().all(|&u| blue[u] <= 71));
        assert!(!s.ok);
    }

    #[test]
    fn critical_inclusion_examples() {
        let ids = (1..=8).map(NodeId).collect();
        let mut g = ColoredGraph::from_layout(4, 2, ids, 8).unwrap();
        g.add_red_edge(0, 2).unwrap();
        let report = crate::traversal::critical_edges_k(&g, 3, Execution::Sequential);
        let plain = g.to_graph();
        let all = plain.edges();
        assert!(critical_inclusion_check(&report, &all).is_empty());
        let crit = Edge::new(0, 2);
        let s: Vec<Edge> = all.into_iter().filter(|&e| e != crit).collect();
        assert_eq!(critical_inclusion_check(&report, &s), vec![crit]);
        assert!(!stretch_check(&plain, &s, 3, Execution::Sequential).unwrap().ok);
    }
}
