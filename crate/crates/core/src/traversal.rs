//! Critical edges and traversal sequences.
//!
//! A red edge `(u, v)` is critical for stretch `k` when every other `u`–`v`
//! path is longer than `k` hops. Two independent routes decide this:
//! a depth-limited BFS on `G ∖ e` ([`is_critical`]) and exhaustive
//! enumeration of the `2^k` color sequences ([`criticality_via_traversal`]).
//!
//! Reachable sets use cross-level deduplication: level `i+1` holds the nodes
//! reachable from level `i` over an edge of color `T[i+1]` that appear in no
//! earlier level. The union of all levels is `ℛ(T)`.
//!
//! The sequence calculus ([`idealized_reach_exponent`],
//! [`check_dmax_exponent`]) is exact rational arithmetic throughout.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use thiserror::Error;

use crate::graph::{bounded_distance, Edge};
use crate::graph_model::{Color, ColoredGraph, LowerBoundParams};
use crate::par::Execution;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraversalError {
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),
    #[error("({0}, {1}) is a blue edge; only red edges can be critical")]
    BlueEdge(usize, usize),
    #[error("invalid traversal symbol {0:?}")]
    InvalidSymbol(char),
    #[error("traversal sequence must be nonempty")]
    Empty,
    #[error("{0} has no run of three or more B-steps")]
    NoLongBRun(TraversalSequence),
    #[error("{0} has a maximal B-run whose length is not 2")]
    NotProperty2(TraversalSequence),
}

/// A string over `{R, B}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraversalSequence(Vec<Color>);

impl TraversalSequence {
    pub fn new(steps: Vec<Color>) -> Result<Self, TraversalError> {
        if steps.is_empty() {
            return Err(TraversalError::Empty);
        }
        Ok(TraversalSequence(steps))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[Color] {
        &self.0
    }

    /// Maximal runs of B-steps as `(start, length)`, 0-based.
    fn b_runs(&self) -> Vec<(usize, usize)> {
        let mut runs = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            if self.0[i] == Color::Blue {
                let start = i;
                while i < self.0.len() && self.0[i] == Color::Blue {
                    i += 1;
                }
                runs.push((start, i - start));
            } else {
                i += 1;
            }
        }
        runs
    }

    fn has_adjacent_reds(&self) -> bool {
        self.0
            .windows(2)
            .any(|w| w[0] == Color::Red && w[1] == Color::Red)
    }
}

impl fmt::Display for TraversalSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{}", c.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for TraversalSequence {
    type Err = TraversalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let steps = s
            .chars()
            .map(|c| match c {
                'B' => Ok(Color::Blue),
                'R' => Ok(Color::Red),
                other => Err(TraversalError::InvalidSymbol(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        TraversalSequence::new(steps)
    }
}

/// All `2^k` sequences of length `k`, lexicographic with `B < R`.
pub fn all_sequences(k: usize) -> Vec<TraversalSequence> {
    (0..1u64 << k)
        .map(|mask| {
            TraversalSequence(
                (0..k)
                    .map(|i| {
                        if mask >> (k - 1 - i) & 1 == 1 {
                            Color::Red
                        } else {
                            Color::Blue
                        }
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Level sets `ℛ₀..ℛ_k` and their union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachableLevels {
    pub levels: Vec<Vec<usize>>,
    /// Sorted union of all levels.
    pub union: Vec<usize>,
}

impl ReachableLevels {
    pub fn contains(&self, v: usize) -> bool {
        self.union.binary_search(&v).is_ok()
    }
}

fn is_excluded(excluded: Option<Edge>, a: usize, b: usize) -> bool {
    excluded.is_some_and(|e| e == Edge::new(a, b))
}

pub fn reachable_levels(
    g: &ColoredGraph,
    start: usize,
    seq: &TraversalSequence,
    excluded: Option<Edge>,
) -> ReachableLevels {
    expand_levels(g, start, seq, excluded, None)
}

/// Expansion with an optional early-exit target.
fn expand_levels(
    g: &ColoredGraph,
    start: usize,
    seq: &TraversalSequence,
    excluded: Option<Edge>,
    target: Option<usize>,
) -> ReachableLevels {
    let mut seen = vec![false; g.node_count()];
    seen[start] = true;
    let mut levels = vec![vec![start]];
    for &color in seq.steps() {
        let prev = levels.last().expect("level 0 exists");
        let mut next = Vec::new();
        for &x in prev {
            for &y in g.neighbors(x, color) {
                if !seen[y] && !is_excluded(excluded, x, y) {
                    seen[y] = true;
                    next.push(y);
                }
            }
        }
        next.sort_unstable();
        let hit = target.is_some_and(|t| seen[t]);
        levels.push(next);
        if hit {
            break;
        }
    }
    let union = (0..g.node_count()).filter(|&v| seen[v]).collect();
    ReachableLevels { levels, union }
}

fn check_red_edge(g: &ColoredGraph, e: Edge) -> Result<(), TraversalError> {
    match g.edge_color(e.a, e.b) {
        Some(Color::Red) => Ok(()),
        Some(Color::Blue) => Err(TraversalError::BlueEdge(e.a, e.b)),
        None => Err(TraversalError::NotAnEdge(e.a, e.b)),
    }
}

/// True iff `dist_{G∖e}(u, v) > k`.
pub fn is_critical(g: &ColoredGraph, e: Edge, k: usize) -> Result<bool, TraversalError> {
    check_red_edge(g, e)?;
    let d = bounded_distance(e.a, e.b, k, |x| {
        g.all_neighbors(x).filter(move |&y| Edge::new(x, y) != e)
    });
    Ok(d.is_none())
}

/// True iff no length-`k` sequence from `u` reaches `v` in `G ∖ e`.
pub fn criticality_via_traversal(
    g: &ColoredGraph,
    e: Edge,
    k: usize,
) -> Result<bool, TraversalError> {
    check_red_edge(g, e)?;
    let reached = all_sequences(k)
        .iter()
        .any(|seq| expand_levels(g, e.a, seq, Some(e), Some(e.b)).contains(e.b));
    Ok(!reached)
}

/// Union over every length-`k` sequence, i.e. the `k`-hop ball around `start`.
pub fn all_sequence_union(g: &ColoredGraph, start: usize, k: usize) -> Vec<usize> {
    let mut seen = vec![false; g.node_count()];
    for seq in all_sequences(k) {
        for v in reachable_levels(g, start, &seq, None).union {
            seen[v] = true;
        }
    }
    (0..g.node_count()).filter(|&v| seen[v]).collect()
}

/// Incident critical edges per U-node.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityReport {
    pub k: usize,
    /// `C_i` for each U-node (index = internal index).
    pub critical: Vec<Vec<Edge>>,
    /// `Y_i = |C_i|`.
    pub counts: Vec<usize>,
    pub red_degrees: Vec<usize>,
    /// Distinct critical edges.
    pub total: usize,
    pub red_total: usize,
    /// `(1/16)·n^{1/(k+1)}`.
    pub threshold: f64,
    /// `I_{Y_i}`.
    pub flags: Vec<bool>,
}

impl CriticalityReport {
    pub fn edges(&self) -> Vec<Edge> {
        let mut all: Vec<Edge> = self.critical.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// Critical edges as a fraction of red edges (0 when there are none).
    pub fn critical_fraction(&self) -> f64 {
        if self.red_total == 0 {
            0.0
        } else {
            self.total as f64 / self.red_total as f64
        }
    }
}

pub fn critical_edges(g: &ColoredGraph, params: &LowerBoundParams) -> CriticalityReport {
    critical_edges_k(g, params.k as usize, Execution::default())
}

/// Exhaustive [`is_critical`] over all red edges, aggregated per U-node.
pub fn critical_edges_k(g: &ColoredGraph, k: usize, exec: Execution) -> CriticalityReport {
    let red = g.red_edges();
    let verdicts = exec.map(&red, |&e| is_critical(g, e, k).expect("edge is red"));
    let half = g.half();
    let mut critical = vec![Vec::new(); half];
    for (&e, &c) in red.iter().zip(&verdicts) {
        if c {
            critical[e.a].push(e);
            critical[e.b].push(e);
        }
    }
    let counts: Vec<usize> = critical.iter().map(Vec::len).collect();
    let threshold = (g.node_count() as f64).powf(1.0 / (k + 1) as f64) / 16.0;
    CriticalityReport {
        k,
        flags: counts.iter().map(|&y| y as f64 >= threshold).collect(),
        red_degrees: (0..half).map(|u| g.red_degree(u)).collect(),
        total: verdicts.iter().filter(|&&c| c).count(),
        red_total: red.len(),
        counts,
        critical,
        threshold,
    }
}

/// Every maximal B-run has length exactly 2.
pub fn satisfies_property2(seq: &TraversalSequence) -> bool {
    seq.b_runs().iter().all(|&(_, len)| len == 2)
}

/// Rewrites the first run of three or more B-steps, keeping its leading BB
/// and turning the rest of the run into R-steps.
pub fn eliminate_long_b_runs(seq: &TraversalSequence) -> Result<TraversalSequence, TraversalError> {
    let (start, len) = seq
        .b_runs()
        .into_iter()
        .find(|&(_, len)| len >= 3)
        .ok_or_else(|| TraversalError::NoLongBRun(seq.clone()))?;
    let mut steps = seq.0.clone();
    for s in &mut steps[start + 2..start + len] {
        *s = Color::Red;
    }
    Ok(TraversalSequence(steps))
}

/// B-maximality for a Property-2 sequence: no two adjacent R-steps remain.
pub fn is_b_maximal(seq: &TraversalSequence) -> Result<bool, TraversalError> {
    if !satisfies_property2(seq) {
        return Err(TraversalError::NotProperty2(seq.clone()));
    }
    Ok(!seq.has_adjacent_reds())
}

/// All B-maximal sequences of length `k`, in enumeration order.
pub fn enumerate_b_maximal(k: usize) -> Vec<TraversalSequence> {
    all_sequences(k)
        .into_iter()
        .filter(|s| satisfies_property2(s) && !s.has_adjacent_reds())
        .collect()
}

/// Exponent `e` with idealized `|ℛ(T)| = n^e`: each R-step adds `1/(k+1)`,
/// each BB-pair adds `2/(k+1) + 1/(4k²)`.
pub fn idealized_reach_exponent(
    seq: &TraversalSequence,
    k: u32,
) -> Result<Rational64, TraversalError> {
    if !satisfies_property2(seq) {
        return Err(TraversalError::NotProperty2(seq.clone()));
    }
    let k = k as i64;
    let reds = seq.steps().iter().filter(|&&c| c == Color::Red).count() as i64;
    let pairs = seq.b_runs().len() as i64;
    let r_step = Rational64::new(1, k + 1);
    let bb_pair = Rational64::new(2, k + 1) + Rational64::new(1, 4 * k * k);
    Ok(r_step * reds + bb_pair * pairs)
}

/// `1 − 1/k³ − 1/k²`.
pub fn dmax_exponent_bound(k: u32) -> Rational64 {
    let k = k as i64;
    Rational64::from_integer(1) - Rational64::new(1, k * k * k) - Rational64::new(1, k * k)
}

/// Every B-maximal sequence of length `k` has idealized exponent at most
/// `1 − 1/k³ − 1/k²`.
pub fn check_dmax_exponent(k: u32) -> bool {
    let bound = dmax_exponent_bound(k);
    let seqs = enumerate_b_maximal(k as usize);
    !seqs.is_empty()
        && seqs.iter().all(|s| {
            idealized_reach_exponent(s, k).expect("B-maximal sequences have only BB runs")
                <= bound
        })
}
