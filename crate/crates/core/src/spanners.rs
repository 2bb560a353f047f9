//! Spanner constructions.
//!
//! [`greedy_spanner`] is the sequential oracle. The cluster-based 3-spanner
//! comes in three forms that share their local decision rules and therefore
//! agree edge-for-edge under the same seed:
//!
//! * [`cluster_3spanner_centralized`],
//! * [`cluster_3spanner_two_party`], which also counts exchanged bits,
//! * [`Cluster3Program`], a three-round [`NodeProgram`].
//!
//! Center coins come from each node's private seed
//! ([`simulator::node_seed`]), so all three forms flip the same coins.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use thiserror::Error;

use crate::exact::{ceil_log2, ceil_sqrt};
use crate::graph::{bounded_distance, Edge, Graph, NodeId};
use crate::seed;
use crate::simulator::{self, BitString, InitialKnowledge, NodeProgram, RoundContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpannerError {
    #[error("vertex partition is invalid: {0}")]
    NotAPartition(String),
    #[error("declared output edge ({0}, {1}) is not a graph edge")]
    NotAnEdge(NodeId, NodeId),
    #[error(transparent)]
    Simulation(#[from] simulator::SimError),
}

/// A spanning subgraph given by its edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannerOutput {
    /// Sorted by `(min id, max id)`.
    pub edges: Vec<Edge>,
    /// Output edges incident to each node, as the other endpoint's ID.
    pub per_node: Vec<Vec<NodeId>>,
    /// Exchanged bits, where the construction communicates.
    pub bits: Option<u64>,
    /// Nodes that took the no-center fallback.
    pub fallback_count: usize,
}

impl SpannerOutput {
    pub fn from_edges<I: IntoIterator<Item = Edge>>(g: &Graph, edges: I) -> Self {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort_by_key(|&e| g.id_key(e));
        edges.dedup();
        let mut per_node = vec![Vec::new(); g.node_count()];
        for e in &edges {
            per_node[e.a].push(g.id(e.b));
            per_node[e.b].push(g.id(e.a));
        }
        for l in &mut per_node {
            l.sort_unstable();
        }
        SpannerOutput {
            edges,
            per_node,
            bits: None,
            fallback_count: 0,
        }
    }

    /// Union of per-node declarations; an edge declared by either endpoint
    /// ends up in both endpoints' lists.
    pub fn from_declarations(g: &Graph, declared: &[Vec<NodeId>]) -> Result<Self, SpannerError> {
        let index = g.id_index();
        let mut edges = Vec::new();
        for (v, ids) in declared.iter().enumerate() {
            for id in ids {
                match index.get(id) {
                    Some(&w) if g.has_edge(v, w) => edges.push(Edge::new(v, w)),
                    _ => return Err(SpannerError::NotAnEdge(g.id(v), *id)),
                }
            }
        }
        Ok(SpannerOutput::from_edges(g, edges))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Output edges as sorted `(min id, max id)` pairs.
    pub fn id_pairs(&self, g: &Graph) -> Vec<(NodeId, NodeId)> {
        self.edges.iter().map(|&e| g.id_key(e)).collect()
    }

    /// Per-node output counts, internal-index order.
    pub fn counts(&self) -> Vec<usize> {
        self.per_node.iter().map(Vec::len).collect()
    }

    /// One `min_id max_id` line per edge.
    pub fn to_text(&self, g: &Graph) -> String {
        self.id_pairs(g)
            .iter()
            .map(|(a, b)| format!("{a} {b}\n"))
            .collect()
    }
}

/// Greedy spanner in the default `(min id, max id)` edge order.
pub fn greedy_spanner(g: &Graph, k: usize) -> SpannerOutput {
    greedy_spanner_with_order(g, k, &g.edges_by_id())
}

/// Scans `order` and keeps an edge iff its endpoints are more than `k`
/// apart in the spanner built so far.
pub fn greedy_spanner_with_order(g: &Graph, k: usize, order: &[Edge]) -> SpannerOutput {
    assert!(k >= 1, "stretch must be at least 1");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.node_count()];
    let mut kept = Vec::new();
    for &e in order {
        if bounded_distance(e.a, e.b, k, |x| adj[x].iter().copied()).is_none() {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
            kept.push(e);
        }
    }
    SpannerOutput::from_edges(g, kept)
}

/// Per-node cluster state after the join phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    /// Cluster ID (a center's ID, or the node's own ID after fallback).
    pub cluster: Vec<NodeId>,
    pub center: Vec<bool>,
    /// Degree at most `⌈√n⌉`.
    pub low_degree: Vec<bool>,
    /// Non-center with no neighboring center.
    pub fallback: Vec<bool>,
}

impl ClusterAssignment {
    pub fn fallback_count(&self) -> usize {
        self.fallback.iter().filter(|&&f| f).count()
    }
}

/// `min(1, 2·ln n / √n)`.
pub fn center_probability(n: usize) -> f64 {
    let n = n as f64;
    (2.0 * n.ln() / n.sqrt()).min(1.0)
}

fn low_degree(degree: usize, n: usize) -> bool {
    degree as u64 <= ceil_sqrt(n as u64)
}

/// Phase A for one node: low-degree nodes are always centers; others flip
/// the first coin of their private stream.
fn decide_center(degree: usize, n: usize, node_seed: u64) -> bool {
    low_degree(degree, n) || seed::rng_from(node_seed).random::<f64>() < center_probability(n)
}

/// Phase B: the smallest-ID neighboring center, if any.
fn choose_cluster(neighbor_centers: impl Iterator<Item = NodeId>) -> Option<NodeId> {
    neighbor_centers.min()
}

/// Phase C: for every adjacent cluster other than `own`, the smallest-ID
/// neighbor in it.
fn inter_cluster_choices(
    own: NodeId,
    neighbor_clusters: impl Iterator<Item = (NodeId, NodeId)>,
) -> Vec<NodeId> {
    let mut best: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for (w, c) in neighbor_clusters {
        if c != own {
            best.entry(c)
                .and_modify(|b| *b = (*b).min(w))
                .or_insert(w);
        }
    }
    best.into_values().collect()
}

/// Each node's Phase B edge choices (join edge, or all edges on fallback).
fn join_edges(me: NodeId, neighbors: &[NodeId], center: bool, cluster: NodeId, fallback: bool) -> Vec<NodeId> {
    if center {
        Vec::new()
    } else if fallback {
        neighbors.to_vec()
    } else {
        vec![cluster]
    }
    .into_iter()
    .filter(|&w| w != me)
    .collect()
}

pub fn cluster_assignment(g: &Graph, seed: u64) -> ClusterAssignment {
    let n = g.node_count();
    let center: Vec<bool> = (0..n)
        .map(|v| decide_center(g.degree(v), n, simulator::node_seed(seed, g.id(v))))
        .collect();
    assignment_from_centers(g, center)
}

/// Phase B for a given center set.
pub fn assignment_from_centers(g: &Graph, center: Vec<bool>) -> ClusterAssignment {
    let n = g.node_count();
    assert_eq!(center.len(), n);
    let mut cluster = Vec::with_capacity(n);
    let mut fallback = Vec::with_capacity(n);
    for v in 0..n {
        if center[v] {
            cluster.push(g.id(v));
            fallback.push(false);
            continue;
        }
        let c = choose_cluster(g.neighbors(v).iter().filter(|&&w| center[w]).map(|&w| g.id(w)));
        cluster.push(c.unwrap_or(g.id(v)));
        fallback.push(c.is_none());
    }
    ClusterAssignment {
        cluster,
        low_degree: (0..n).map(|v| low_degree(g.degree(v), n)).collect(),
        center,
        fallback,
    }
}

pub fn cluster_3spanner_centralized(g: &Graph, seed: u64) -> SpannerOutput {
    spanner_from_assignment(g, &cluster_assignment(g, seed))
}

/// Phases B and C on top of a fixed assignment.
pub fn spanner_from_assignment(g: &Graph, a: &ClusterAssignment) -> SpannerOutput {
    let index = g.id_index();
    let mut edges = Vec::new();
    for v in 0..g.node_count() {
        let nbr_ids: Vec<NodeId> = g.neighbors(v).iter().map(|&w| g.id(w)).collect();
        let mut chosen = join_edges(g.id(v), &nbr_ids, a.center[v], a.cluster[v], a.fallback[v]);
        chosen.extend(inter_cluster_choices(
            a.cluster[v],
            g.neighbors(v).iter().map(|&w| (g.id(w), a.cluster[w])),
        ));
        edges.extend(chosen.into_iter().map(|w| Edge::new(v, index[&w])));
    }
    let mut out = SpannerOutput::from_edges(g, edges);
    out.fallback_count = a.fallback_count();
    out
}

/// Local view of one party: owned vertices (internal indices) and, for each,
/// its neighbor IDs. Shared edges are seen by both parties.
struct Party<'a> {
    g: &'a Graph,
    owned: &'a [usize],
}

impl Party<'_> {
    /// Stage 1 message: `(v, v)` for every owned center, ascending by ID.
    fn centers(&self, n: usize, seed: u64) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = self
            .owned
            .iter()
            .filter(|&&v| decide_center(self.g.degree(v), n, simulator::node_seed(seed, self.g.id(v))))
            .map(|&v| self.g.id(v))
            .collect();
        ids.sort_unstable();
        ids
    }
}

fn encode_pairs(pairs: &[(NodeId, NodeId)], width: u32) -> BitString {
    let mut msg = BitString::new();
    for &(v, c) in pairs {
        msg.extend(&BitString::from_uint(v.0 - 1, width));
        msg.extend(&BitString::from_uint(c.0 - 1, width));
    }
    msg
}

fn decode_pairs(msg: &BitString, width: u32) -> Vec<(NodeId, NodeId)> {
    let w = width as usize;
    msg.bits()
        .chunks(2 * w)
        .map(|chunk| {
            let v = BitString::from_bits(chunk[..w].to_vec()).to_uint() + 1;
            let c = BitString::from_bits(chunk[w..].to_vec()).to_uint() + 1;
            (NodeId(v), NodeId(c))
        })
        .collect()
}

/// Alice owns `alice`, Bob owns `bob` (internal indices); together they must
/// partition the vertex set. Returns the spanner and the exchanged bits.
///
/// Stage 1: each party announces `(v, v)` for its centers. Stage 2: each
/// party announces `(v, cluster(v))` for its other vertices. Pairs use
/// `2·⌈log₂ n⌉` bits, so every vertex costs exactly that once.
pub fn cluster_3spanner_two_party(
    g: &Graph,
    alice: &[usize],
    bob: &[usize],
    seed: u64,
) -> Result<(SpannerOutput, u64), SpannerError> {
    let n = g.node_count();
    let mut owner = vec![None; n];
    for (side, owned) in [(0u8, alice), (1u8, bob)] {
        for &v in owned {
            if v >= n {
                return Err(SpannerError::NotAPartition(format!("vertex {v} out of range")));
            }
            if owner[v].replace(side).is_some() {
                return Err(SpannerError::NotAPartition(format!("vertex {v} assigned twice")));
            }
        }
    }
    if let Some(v) = owner.iter().position(Option::is_none) {
        return Err(SpannerError::NotAPartition(format!("vertex {v} unassigned")));
    }
    let max_id = g.ids().iter().map(|id| id.0).max().unwrap_or(1);
    let width = ceil_log2((n as u64).max(max_id));
    let parties = [Party { g, owned: alice }, Party { g, owned: bob }];
    let mut bits = 0u64;

    // Stage 1.
    let stage1: Vec<BitString> = parties
        .iter()
        .map(|p| {
            let pairs: Vec<_> = p.centers(n, seed).into_iter().map(|c| (c, c)).collect();
            encode_pairs(&pairs, width)
        })
        .collect();
    bits += stage1.iter().map(|m| m.len() as u64).sum::<u64>();

    // Each party knows its own centers and learns the other side's.
    let mut known_center: [HashMap<NodeId, bool>; 2] = [HashMap::new(), HashMap::new()];
    for (me, p) in parties.iter().enumerate() {
        let own: Vec<NodeId> = p.centers(n, seed);
        let theirs = decode_pairs(&stage1[1 - me], width);
        for v in 0..n {
            known_center[me].insert(g.id(v), false);
        }
        for c in own.into_iter().chain(theirs.into_iter().map(|(c, _)| c)) {
            known_center[me].insert(c, true);
        }
    }

    // Stage 2: joins of owned non-centers.
    let mut clusters: [HashMap<NodeId, NodeId>; 2] = [HashMap::new(), HashMap::new()];
    let mut fallback = vec![false; n];
    let mut stage2 = Vec::new();
    for (me, p) in parties.iter().enumerate() {
        let mut pairs = Vec::new();
        for &v in p.owned {
            let id = g.id(v);
            let c = if known_center[me][&id] {
                id
            } else {
                let c = choose_cluster(
                    g.neighbors(v)
                        .iter()
                        .map(|&w| g.id(w))
                        .filter(|w| known_center[me][w]),
                );
                fallback[v] = c.is_none();
                let c = c.unwrap_or(id);
                pairs.push((id, c));
                c
            };
            clusters[me].insert(id, c);
        }
        pairs.sort_unstable();
        stage2.push(encode_pairs(&pairs, width));
    }
    bits += stage2.iter().map(|m| m.len() as u64).sum::<u64>();
    for me in 0..2 {
        let other = 1 - me;
        for (v, c) in decode_pairs(&stage2[other], width) {
            clusters[me].insert(v, c);
        }
        for (c, _) in decode_pairs(&stage1[other], width) {
            clusters[me].insert(c, c);
        }
    }

    // Local Phase B/C edge choices, no further communication.
    let index = g.id_index();
    let mut edges = Vec::new();
    for (me, p) in parties.iter().enumerate() {
        for &v in p.owned {
            let id = g.id(v);
            let nbr_ids: Vec<NodeId> = g.neighbors(v).iter().map(|&w| g.id(w)).collect();
            let c = clusters[me][&id];
            let mut chosen = join_edges(id, &nbr_ids, known_center[me][&id], c, fallback[v]);
            chosen.extend(inter_cluster_choices(
                c,
                nbr_ids.iter().map(|w| (*w, clusters[me][w])),
            ));
            edges.extend(chosen.into_iter().map(|w| Edge::new(v, index[&w])));
        }
    }
    let mut out = SpannerOutput::from_edges(g, edges);
    out.bits = Some(bits);
    out.fallback_count = fallback.iter().filter(|&&f| f).count();
    Ok((out, bits))
}

/// Three-round distributed cluster 3-spanner.
///
/// Round 1: center flag (1 bit) to every neighbor. Round 2: non-centers
/// send their cluster ID to every neighbor. Round 3: inter-cluster edge
/// choice, output, terminate. Each node declares the edges it picked;
/// [`SpannerOutput::from_declarations`] symmetrises them.
#[derive(Debug, Clone, Copy)]
pub struct Cluster3Program {
    /// `⌈log₂ id_space⌉`; cluster IDs are sent as `id − 1` in this width.
    pub id_bits: u32,
}

#[derive(Debug, Clone)]
pub struct Cluster3State {
    knowledge: InitialKnowledge,
    center: bool,
    cluster: NodeId,
    fallback: bool,
    neighbor_center: BTreeMap<NodeId, bool>,
    output: Vec<NodeId>,
}

impl Cluster3State {
    pub fn is_fallback(&self) -> bool {
        self.fallback
    }
}

/// Declared output edges and the fallback flag.
pub type Cluster3Output = (Vec<NodeId>, bool);

impl NodeProgram for Cluster3Program {
    type State = Cluster3State;
    type Output = Cluster3Output;

    fn init(&self, k: &InitialKnowledge) -> Cluster3State {
        Cluster3State {
            knowledge: k.clone(),
            center: false,
            cluster: k.id,
            fallback: false,
            neighbor_center: BTreeMap::new(),
            output: Vec::new(),
        }
    }

    fn on_round(&self, s: &mut Cluster3State, ctx: &mut RoundContext<'_>) {
        let k = &s.knowledge;
        match ctx.round() {
            1 => {
                s.center = decide_center(k.degree(), k.n(), k.seed);
                ctx.send_to_neighbors(&BitString::bit(s.center));
            }
            2 => {
                for m in ctx.inbox() {
                    s.neighbor_center.insert(m.sender, m.payload.bits()[0]);
                }
                if !s.center {
                    let c = choose_cluster(
                        s.neighbor_center
                            .iter()
                            .filter(|(_, &is_c)| is_c)
                            .map(|(&w, _)| w),
                    );
                    s.fallback = c.is_none();
                    s.cluster = c.unwrap_or(k.id);
                    ctx.send_to_neighbors(&BitString::from_uint(s.cluster.0 - 1, self.id_bits));
                }
            }
            _ => {
                let mut nbr_cluster: BTreeMap<NodeId, NodeId> = s
                    .neighbor_center
                    .iter()
                    .filter(|(_, &is_c)| is_c)
                    .map(|(&w, _)| (w, w))
                    .collect();
                for m in ctx.inbox() {
                    nbr_cluster.insert(m.sender, NodeId(m.payload.to_uint() + 1));
                }
                let mut out = join_edges(k.id, &k.neighbors, s.center, s.cluster, s.fallback);
                out.extend(inter_cluster_choices(s.cluster, nbr_cluster.into_iter()));
                out.sort_unstable();
                out.dedup();
                s.output = out;
                ctx.terminate();
            }
        }
    }

    fn output(&self, s: &Cluster3State) -> Cluster3Output {
        (s.output.clone(), s.fallback)
    }
}

/// Runs [`Cluster3Program`] under `config` and symmetrises the declared
/// edges. Node seeds derive from `seed` as in the centralized form.
pub fn cluster_3spanner_distributed(
    g: &Graph,
    config: &simulator::ModelConfig,
    seed: u64,
) -> Result<(SpannerOutput, simulator::RunResult<Cluster3Output>), SpannerError> {
    let program = Cluster3Program {
        id_bits: config.id_bits(),
    };
    let result = simulator::run(config, g, &program, &simulator::kt1_init(g, seed))?;
    let declared: Vec<Vec<NodeId>> = result.outputs.iter().map(|(e, _)| e.clone()).collect();
    let mut out = SpannerOutput::from_declarations(g, &declared)?;
    out.fallback_count = result.outputs.iter().filter(|(_, f)| *f).count();
    Ok((out, result))
}

/// Summary row for spanner runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannerSummary {
    pub algorithm: String,
    pub n: usize,
    pub size: usize,
    pub bits: Option<u64>,
    pub rounds: Option<u64>,
    pub stretch_ok: bool,
    pub fallback_count: usize,
}

impl SpannerSummary {
    pub const CSV_HEADER: &'static str = "algorithm,n,size,bits,rounds,stretch_ok,fallback_count";

    pub fn to_csv_row(&self) -> String {
        let opt = |x: Option<u64>| x.map_or("-".to_string(), |v| v.to_string());
        format!(
            "{},{},{},{},{},{},{}",
            self.algorithm,
            self.n,
            self.size,
            opt(self.bits),
            opt(self.rounds),
            self.stretch_ok,
            self.fallback_count
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{Mode, ModelConfig};

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn pairs(g: &Graph, s: &SpannerOutput) -> Vec<(u64, u64)> {
        s.id_pairs(g).into_iter().map(|(a, b)| (a.0, b.0)).collect()
    }

    #[test]
    fn greedy_examples() {
        let k4 = complete(4);
        assert_eq!(pairs(&k4, &greedy_spanner(&k4, 3)), vec![(1, 2), (1, 3), (1, 4)]);
        let c5 = cycle(5);
        assert_eq!(greedy_spanner(&c5, 3).len(), 5);
        let tree = Graph::from_edges(6, &[(0, 1), (0, 2), (2, 3), (2, 4), (4, 5)]).unwrap();
        for k in 1..5 {
            assert_eq!(greedy_spanner(&tree, k).len(), 5);
        }
    }

    #[test]
    fn per_node_lists_are_symmetric() {
        let g = Graph::erdos_renyi(30, 0.3, 2);
        let s = greedy_spanner(&g, 3);
        let index = g.id_index();
        for (v, l) in s.per_node.iter().enumerate() {
            for id in l {
                assert!(s.per_node[index[id]].contains(&g.id(v)));
            }
        }
        assert_eq!(s.counts().iter().sum::<usize>(), 2 * s.len());
    }

    #[test]
    fn all_low_degree_keeps_every_edge() {
        // n = 100, ⌈√n⌉ = 10; cycle degrees are 2.
        let g = cycle(100);
        let s = cluster_3spanner_centralized(&g, 1);
        assert_eq!(s.len(), g.edge_count());
        assert_eq!(s.fallback_count, 0);
    }

    #[test]
    fn k4_with_single_center_yields_star() {
        // At n = 4 the sampling probability saturates, so force the centers.
        let g = complete(4);
        let a = assignment_from_centers(&g, vec![true, false, false, false]);
        let s = spanner_from_assignment(&g, &a);
        assert_eq!(pairs(&g, &s), vec![(1, 2), (1, 3), (1, 4)]);
        assert!(cluster_assignment(&g, 0).center.iter().all(|&c| c));
    }

    #[test]
    fn fallback_adds_all_incident_edges() {
        let g = complete(4);
        let a = assignment_from_centers(&g, vec![false; 4]);
        let s = spanner_from_assignment(&g, &a);
        assert_eq!(s.fallback_count, 4);
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn assignment_invariants() {
        let g = Graph::erdos_renyi(200, 0.2, 5);
        let a = cluster_assignment(&g, 3);
        let index = g.id_index();
        for v in 0..g.node_count() {
            if a.center[v] {
                assert_eq!(a.cluster[v], g.id(v));
            } else if !a.fallback[v] {
                let c = index[&a.cluster[v]];
                assert!(a.center[c] && g.has_edge(v, c));
            }
            if a.low_degree[v] {
                assert!(a.center[v]);
            }
        }
    }

    #[test]
    fn two_party_matches_centralized_and_counts_bits() {
        let g = Graph::erdos_renyi(64, 0.3, 9);
        let central = cluster_3spanner_centralized(&g, 4);
        let alice: Vec<usize> = (0..64).filter(|v| v % 3 == 0).collect();
        let bob: Vec<usize> = (0..64).filter(|v| v % 3 != 0).collect();
        let (s, bits) = cluster_3spanner_two_party(&g, &alice, &bob, 4).unwrap();
        assert_eq!(s.edges, central.edges);
        assert_eq!(bits, 64 * 2 * 6);

        let all: Vec<usize> = (0..64).collect();
        let (s, bits) = cluster_3spanner_two_party(&g, &all, &[], 4).unwrap();
        assert_eq!(s.edges, central.edges);
        assert_eq!(bits, 64 * 2 * 6);
    }

    #[test]
    fn two_party_rejects_non_partitions() {
        let g = cycle(5);
        assert!(cluster_3spanner_two_party(&g, &[0, 1], &[1, 2, 3, 4], 0).is_err());
        assert!(cluster_3spanner_two_party(&g, &[0, 1], &[2, 3], 0).is_err());
        assert!(cluster_3spanner_two_party(&g, &[0, 1, 9], &[2, 3, 4], 0).is_err());
    }

    #[test]
    fn pair_codec_round_trips() {
        let p = vec![(NodeId(1), NodeId(8)), (NodeId(5), NodeId(5))];
        assert_eq!(decode_pairs(&encode_pairs(&p, 3), 3), p);
    }

    fn distributed(g: &Graph, seed: u64, id_space: u64) -> (SpannerOutput, crate::simulator::RunResult<Cluster3Output>) {
        let cfg = ModelConfig::new(Mode::CongestKT1, id_space, 10).unwrap();
        cluster_3spanner_distributed(g, &cfg, seed).unwrap()
    }

    #[test]
    fn distributed_matches_centralized_in_three_rounds() {
        for seed in 0..5 {
            let g = Graph::erdos_renyi(120, 0.25, seed);
            let (s, r) = distributed(&g, seed, 120);
            assert_eq!(r.rounds, 3);
            assert_eq!(s.edges, cluster_3spanner_centralized(&g, seed).edges);
        }
    }

    #[test]
    fn distributed_star_bit_costs() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        for seed in 0..20 {
            let (_, r) = distributed(&g, seed, 16);
            let round1: u64 = r
                .transcripts
                .iter()
                .flatten()
                .filter(|m| m.round == 1)
                .map(|m| m.charged_bits(4))
                .sum();
            let round2: u64 = r
                .transcripts
                .iter()
                .flatten()
                .filter(|m| m.round == 2)
                .map(|m| m.charged_bits(4))
                .sum();
            assert_eq!(round1, 40);
            assert!(round2 <= 64);
        }
    }

    #[test]
    fn summary_row() {
        let s = SpannerSummary {
            algorithm: "greedy".into(),
            n: 4,
            size: 3,
            bits: None,
            rounds: None,
            stretch_ok: true,
            fallback_count: 0,
        };
        assert_eq!(s.to_csv_row(), "greedy,4,3,-,-,true,0");
    }
}
