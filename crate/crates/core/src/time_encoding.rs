//! Graph enumeration codec and the silent-round convergecast.
//!
//! An `n`-node labeled graph over IDs from `1..=id_space` is indexed by a
//! mixed-radix number, most significant first:
//!
//! 1. the edge mask over the `C(n,2)` position pairs `(0,1), (0,2), …`
//!    (bit `j` is the `j`-th pair),
//! 2. the Lehmer rank of the permutation placing the sorted ID subset onto
//!    positions,
//! 3. the colex rank `Σ C(c_i, i+1)` of the ID subset (0-based IDs `c_i`,
//!    ascending).
//!
//! The convergecast spends one bit per tree edge and direction; the
//! information is carried by *which* round the bit is sent in.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::simulator::{self, BitString, InitialKnowledge, Mode, ModelConfig, NodeProgram, RoundContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("id_space {id_space} is smaller than n = {n}")]
    IdSpaceTooSmall { n: usize, id_space: u64 },
    #[error("n must be at least 1")]
    Empty,
    #[error("index {0} is out of range")]
    OutOfRange(BigUint),
    #[error("duplicate id {0}")]
    DuplicateId(NodeId),
    #[error("id {0} outside 1..={1}")]
    IdOutOfSpace(NodeId, u64),
    #[error("convergecast demo supports n ≤ 3, got {0}")]
    TooLarge(usize),
    #[error("{0} enumeration rounds per iteration is beyond desk scale")]
    TooManyRounds(BigUint),
    #[error("tree is not a rooted spanning tree of the graph: {0}")]
    BadTree(String),
    #[error("simulation failed: {0}")]
    Simulation(#[from] simulator::SimError),
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |a, i| a * i)
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// `2^{C(n,2)} · n! · C(id_space, n)`.
pub fn enumeration_size(n: usize, id_space: u64) -> Result<BigUint, CodecError> {
    if n == 0 {
        return Err(CodecError::Empty);
    }
    if id_space < n as u64 {
        return Err(CodecError::IdSpaceTooSmall { n, id_space });
    }
    Ok((BigUint::one() << pair_count(n)) * factorial(n as u64) * binomial(id_space, n as u64))
}

/// Position pairs in mask order.
fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

pub fn encode_graph(g: &Graph, id_space: u64) -> Result<BigUint, CodecError> {
    let n = g.node_count();
    let size = enumeration_size(n, id_space)?;
    let mut seen = BTreeSet::new();
    for &id in g.ids() {
        if id.0 == 0 || id.0 > id_space {
            return Err(CodecError::IdOutOfSpace(id, id_space));
        }
        if !seen.insert(id) {
            return Err(CodecError::DuplicateId(id));
        }
    }
    let subset: Vec<NodeId> = seen.into_iter().collect();

    let mut mask = BigUint::zero();
    for (j, (a, b)) in pairs(n).enumerate() {
        if g.has_edge(a, b) {
            mask.set_bit(j as u64, true);
        }
    }

    // π[i] = rank of ids[i] within the subset; Lehmer code of π.
    let pi: Vec<usize> = g
        .ids()
        .iter()
        .map(|id| subset.binary_search(id).expect("id in subset"))
        .collect();
    let mut perm_rank = BigUint::zero();
    for i in 0..n {
        let smaller_after = pi[i + 1..].iter().filter(|&&x| x < pi[i]).count() as u64;
        perm_rank += factorial((n - 1 - i) as u64) * smaller_after;
    }

    let mut subset_rank = BigUint::zero();
    for (i, id) in subset.iter().enumerate() {
        subset_rank += binomial(id.0 - 1, i as u64 + 1);
    }

    let index = (mask * factorial(n as u64) + perm_rank) * binomial(id_space, n as u64) + subset_rank;
    debug_assert!(index < size);
    Ok(index)
}

pub fn decode_graph(index: &BigUint, n: usize, id_space: u64) -> Result<Graph, CodecError> {
    let size = enumeration_size(n, id_space)?;
    if *index >= size {
        return Err(CodecError::OutOfRange(index.clone()));
    }
    let c = binomial(id_space, n as u64);
    let nf = factorial(n as u64);
    let mut subset_rank = index % &c;
    let rest = index / &c;
    let mut perm_rank = &rest % &nf;
    let mask = rest / &nf;

    // Colex unranking, largest element first.
    let mut subset = vec![NodeId(0); n];
    let mut upper = id_space;
    for i in (0..n).rev() {
        let mut x = upper - 1;
        while binomial(x, i as u64 + 1) > subset_rank {
            x -= 1;
        }
        subset_rank -= binomial(x, i as u64 + 1);
        subset[i] = NodeId(x + 1);
        upper = x;
    }

    let mut remaining: Vec<usize> = (0..n).collect();
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let f = factorial((n - 1 - i) as u64);
        let d = (&perm_rank / &f).to_usize().expect("digit fits");
        perm_rank %= &f;
        ids.push(subset[remaining.remove(d)]);
    }

    let mut g = Graph::new(ids).expect("distinct ids");
    for (j, (a, b)) in pairs(n).enumerate() {
        if mask.bit(j as u64) {
            g.add_edge(a, b).expect("fresh pair");
        }
    }
    Ok(g)
}

/// Rooted tree on the node positions, by parent pointers. It is the
/// communication overlay of the convergecast, so its links need not be
/// edges of the graph being encoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
}

impl SpanningTree {
    /// BFS tree of `g` from `root`.
    pub fn bfs(g: &Graph, root: usize) -> Self {
        let dist = g.bfs_distances(root, usize::MAX);
        let parent = (0..g.node_count())
            .map(|v| {
                if v == root || dist[v] == usize::MAX {
                    None
                } else {
                    g.neighbors(v).iter().copied().find(|&w| dist[w] + 1 == dist[v])
                }
            })
            .collect();
        SpanningTree { root, parent }
    }

    /// The path `0 − 1 − … − (n−1)` rooted at 0.
    pub fn path(n: usize) -> Self {
        SpanningTree {
            root: 0,
            parent: (0..n).map(|v| v.checked_sub(1)).collect(),
        }
    }

    /// Depth of every node; errors unless the pointers form a tree on all
    /// nodes rooted at `root`.
    pub fn depths(&self) -> Result<Vec<usize>, CodecError> {
        let n = self.parent.len();
        if self.root >= n || self.parent[self.root].is_some() {
            return Err(CodecError::BadTree("root or length mismatch".into()));
        }
        let mut depth = vec![None; n];
        depth[self.root] = Some(0);
        for start in 0..n {
            let mut path = Vec::new();
            let mut v = start;
            while depth[v].is_none() {
                if path.len() > n {
                    return Err(CodecError::BadTree("cycle in parent pointers".into()));
                }
                let p = self.parent[v]
                    .ok_or_else(|| CodecError::BadTree(format!("node {v} has no parent")))?;
                if p >= n {
                    return Err(CodecError::BadTree(format!("parent {p} out of range")));
                }
                path.push(v);
                v = p;
            }
            let mut d = depth[v].expect("resolved");
            for &u in path.iter().rev() {
                d += 1;
                depth[u] = Some(d);
            }
        }
        Ok(depth.into_iter().map(|d| d.expect("all resolved")).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergecastReport {
    pub n: usize,
    pub id_space: u64,
    /// Enumeration size, i.e. rounds per iteration.
    pub t: BigUint,
    pub depth: usize,
    /// `2·depth·t`.
    pub rounds_used: BigUint,
    /// Simulator rounds, including the final delivery-only round.
    pub simulated_rounds: u64,
    pub payload_bits: u64,
    /// Bits including the sender-ID charge.
    pub charged_bits: u64,
    pub decoded_at_root: Graph,
    pub decode_ok: bool,
    /// Every node ends up knowing the whole graph.
    pub broadcast_ok: bool,
}

impl ConvergecastReport {
    pub const CSV_HEADER: &'static str = "n,id_space,t,rounds_used,payload_bits,decode_ok";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n, self.id_space, self.t, self.rounds_used, self.payload_bits, self.decode_ok
        )
    }
}

/// Cost line items that the demo does not simulate.
pub const EXTERNAL_COST_ITEMS: [(&str, &str); 2] = [
    ("spanning tree construction", "Õ(n) messages"),
    ("leader election", "Õ(n) messages"),
];

const MAX_ROUNDS_PER_ITERATION: u64 = 1 << 20;

/// Per-node tree role, known in advance.
#[derive(Debug, Clone)]
struct TreeRole {
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    depth: usize,
}

struct ConvergecastProgram {
    roles: BTreeMap<NodeId, TreeRole>,
    /// Each node's neighbourhood in the encoded graph.
    local: BTreeMap<NodeId, Vec<NodeId>>,
    depth: usize,
    t: u64,
    id_space: u64,
}

struct ConvergecastState {
    id: NodeId,
    roster: Vec<NodeId>,
    known: BTreeSet<(usize, usize)>,
}

impl ConvergecastProgram {
    fn knowledge_graph(&self, roster: &[NodeId], known: &BTreeSet<(usize, usize)>) -> Graph {
        let mut g = Graph::new(roster.to_vec()).expect("roster ids are distinct");
        for &(a, b) in known {
            g.add_edge(a, b).expect("known edges are simple");
        }
        g
    }

    fn index_of(&self, s: &ConvergecastState) -> u64 {
        let g = self.knowledge_graph(&s.roster, &s.known);
        encode_graph(&g, self.id_space)
            .expect("roster fits the id space")
            .to_u64()
            .expect("index below the per-iteration bound")
    }

    fn absorb(&self, s: &mut ConvergecastState, offset: u64) {
        let g = decode_graph(&BigUint::from(offset), s.roster.len(), self.id_space)
            .expect("offset within the enumeration");
        for e in g.edges() {
            s.known.insert((e.a, e.b));
        }
    }
}

impl NodeProgram for ConvergecastProgram {
    type State = ConvergecastState;
    type Output = BTreeSet<(usize, usize)>;

    fn init(&self, k: &InitialKnowledge) -> ConvergecastState {
        let roster: Vec<NodeId> = k.roster.to_vec();
        let pos = |id: &NodeId| roster.iter().position(|r| r == id).expect("id on roster");
        let me = pos(&k.id);
        let known = self.local[&k.id]
            .iter()
            .map(|w| {
                let p = pos(w);
                (me.min(p), me.max(p))
            })
            .collect();
        ConvergecastState {
            id: k.id,
            roster,
            known,
        }
    }

    fn on_round(&self, s: &mut ConvergecastState, ctx: &mut RoundContext<'_>) {
        let role = &self.roles[&s.id];
        let (d, t) = (self.depth as u64, self.t);
        for m in ctx.inbox() {
            self.absorb(s, (m.round - 1) % t);
        }
        let r = ctx.round();
        if r > 2 * d * t {
            ctx.terminate();
            return;
        }
        let offset = (r - 1) % t;
        let iteration = (r - 1) / t + 1;
        if iteration <= d {
            // Up phase: depth d − i + 1 reports to its parent.
            if let Some(p) = role.parent {
                if role.depth as u64 == d - iteration + 1 && offset == self.index_of(s) {
                    ctx.send(p, BitString::bit(true));
                }
            }
        } else {
            // Down phase: depth j − 1 informs its children.
            let j = iteration - d;
            if role.depth as u64 == j - 1 && offset == self.index_of(s) {
                for &c in &role.children {
                    ctx.send(c, BitString::bit(true));
                }
            }
        }
    }

    fn output(&self, s: &ConvergecastState) -> BTreeSet<(usize, usize)> {
        s.known.clone()
    }
}

/// Runs the time-encoded convergecast of `g` up `tree` and back down. The
/// simulated network is `tree` itself; each node starts out knowing only
/// its own neighbourhood in `g`.
pub fn convergecast_demo(
    g: &Graph,
    tree: &SpanningTree,
    id_space: u64,
) -> Result<ConvergecastReport, CodecError> {
    let n = g.node_count();
    if n > 3 {
        return Err(CodecError::TooLarge(n));
    }
    let t = enumeration_size(n, id_space)?;
    encode_graph(g, id_space)?;
    if tree.parent.len() != n {
        return Err(CodecError::BadTree(format!(
            "tree has {} nodes, graph has {n}",
            tree.parent.len()
        )));
    }
    let depths = tree.depths()?;
    let depth = depths.iter().copied().max().unwrap_or(0);
    let rounds_used = BigUint::from(2 * depth as u64) * &t;
    let t_small = t
        .to_u64()
        .filter(|&x| x <= MAX_ROUNDS_PER_ITERATION)
        .ok_or_else(|| CodecError::TooManyRounds(t.clone()))?;

    if depth == 0 {
        return Ok(ConvergecastReport {
            n,
            id_space,
            t,
            depth,
            rounds_used,
            simulated_rounds: 0,
            payload_bits: 0,
            charged_bits: 0,
            decoded_at_root: g.clone(),
            decode_ok: true,
            broadcast_ok: true,
        });
    }

    let mut roles = BTreeMap::new();
    for v in 0..n {
        roles.insert(
            g.id(v),
            TreeRole {
                parent: tree.parent[v].map(|p| g.id(p)),
                children: (0..n).filter(|&c| tree.parent[c] == Some(v)).map(|c| g.id(c)).collect(),
                depth: depths[v],
            },
        );
    }
    let mut overlay = Graph::new(g.ids().to_vec()).expect("graph ids are distinct");
    for (v, p) in tree.parent.iter().enumerate() {
        if let Some(p) = *p {
            overlay.add_edge(v, p).expect("tree links are distinct");
        }
    }
    let local = (0..n)
        .map(|v| (g.id(v), g.neighbors(v).iter().map(|&w| g.id(w)).collect()))
        .collect();
    let program = ConvergecastProgram {
        roles,
        local,
        depth,
        t: t_small,
        id_space,
    };
    let config = ModelConfig::new(Mode::CongestKT1, id_space.max(2), 2 * depth as u64 * t_small + 1)?;
    let result = simulator::run(&config, &overlay, &program, &simulator::kt1_init(&overlay, 0))?;

    let payload_bits = result
        .transcripts
        .iter()
        .flatten()
        .map(|m| m.payload.len() as u64)
        .sum();
    let root_known = result.outputs[tree.root].clone();
    let decoded_at_root = program.knowledge_graph(g.ids(), &root_known);
    let broadcast_ok = result.outputs.iter().all(|k| *k == root_known);
    Ok(ConvergecastReport {
        n,
        id_space,
        t,
        depth,
        rounds_used,
        simulated_rounds: result.rounds,
        payload_bits,
        charged_bits: result.ledger.total,
        decode_ok: decoded_at_root == *g,
        decoded_at_root,
        broadcast_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_size_examples() {
        assert_eq!(enumeration_size(1, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(enumeration_size(2, 4).unwrap(), BigUint::from(24u32));
        assert_eq!(enumeration_size(3, 4).unwrap(), BigUint::from(192u32));
        assert!(enumeration_size(3, 2).is_err());
    }

    #[test]
    fn index_zero_is_the_edgeless_sorted_graph() {
        let g = decode_graph(&BigUint::zero(), 3, 4).unwrap();
        assert_eq!(g.ids(), &[NodeId(1), NodeId(2), NodeId(3)]);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(encode_graph(&g, 4).unwrap(), BigUint::zero());
        assert!(decode_graph(&BigUint::from(192u32), 3, 4).is_err());
    }

    #[test]
    fn exhaustive_round_trips() {
        for (n, s) in [(1, 1), (2, 3), (2, 4), (3, 4), (3, 5)] {
            let size = enumeration_size(n, s).unwrap().to_u64().unwrap();
            let mut seen = BTreeSet::new();
            for i in 0..size {
                let g = decode_graph(&BigUint::from(i), n, s).unwrap();
                assert_eq!(encode_graph(&g, s).unwrap(), BigUint::from(i));
                assert!(seen.insert((g.ids().to_vec(), g.edges())));
            }
        }
    }

    #[test]
    fn encoding_rejects_bad_ids() {
        let g = Graph::new(vec![NodeId(1), NodeId(9)]).unwrap();
        assert!(matches!(encode_graph(&g, 4), Err(CodecError::IdOutOfSpace(..))));
    }

    #[test]
    fn two_node_convergecast() {
        let g = Graph::new(vec![NodeId(3), NodeId(1)])
            .map(|mut g| {
                g.add_edge(0, 1).unwrap();
                g
            })
            .unwrap();
        let tree = SpanningTree::bfs(&g, 0);
        let r = convergecast_demo(&g, &tree, 4).unwrap();
        assert!(r.decode_ok && r.broadcast_ok);
        assert_eq!(r.t, BigUint::from(24u32));
        assert_eq!(r.rounds_used, BigUint::from(48u32));
        assert_eq!(r.payload_bits, 2);
    }

    #[test]
    fn every_three_node_graph_reaches_the_root() {
        // Every labeled graph, connected or not, over one fixed path tree.
        let tree = SpanningTree::path(3);
        let mut checked = 0;
        for i in 0..192u64 {
            let g = decode_graph(&BigUint::from(i), 3, 4).unwrap();
            let r = convergecast_demo(&g, &tree, 4).unwrap();
            assert!(r.decode_ok && r.broadcast_ok, "index {i}");
            assert_eq!(r.rounds_used, BigUint::from(2 * r.depth as u64 * 192));
            assert!(r.payload_bits <= 4 * 3);
            assert!(r.rounds_used >= r.t);
            checked += 1;
        }
        assert_eq!(checked, 192);
    }

    #[test]
    fn path_of_three_uses_768_rounds() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let tree = SpanningTree::bfs(&g, 0);
        let r = convergecast_demo(&g, &tree, 4).unwrap();
        assert_eq!(r.depth, 2);
        assert_eq!(r.rounds_used, BigUint::from(768u32));
        assert_eq!(r.payload_bits, 4);
        assert!(r.decode_ok);
    }

    #[test]
    fn demo_guards() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let tree = SpanningTree::bfs(&g, 0);
        assert!(matches!(convergecast_demo(&g, &tree, 4), Err(CodecError::TooLarge(4))));
        let g = Graph::with_sequential_ids(3);
        let cycle = SpanningTree {
            root: 0,
            parent: vec![None, Some(2), Some(1)],
        };
        assert!(matches!(convergecast_demo(&g, &cycle, 4), Err(CodecError::BadTree(_))));
        let short = SpanningTree::path(2);
        assert!(matches!(convergecast_demo(&g, &short, 4), Err(CodecError::BadTree(_))));
    }
}
