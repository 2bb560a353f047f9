//! Lock-step synchronous message passing with bit-exact accounting.
//!
//! Every message is charged `payload bits + ⌈log₂ id_space⌉`, the second
//! term paying for the sender ID each message carries. The link bandwidth `B`
//! caps the charged total per `(sender, receiver, round)`.
//!
//! A message sent in round `r` is delivered at the start of round `r + 1`.
//! Messages still in flight when the run halts are appended to the receivers'
//! transcripts, so sent and received totals always agree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::exact::ceil_log2;
use crate::graph::{Graph, NodeId};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    CongestKT1,
    CongestedClique,
    NodeCongestedClique,
    GossipPushPull,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::CongestKT1 => "congest-kt1",
            Mode::CongestedClique => "congested-clique",
            Mode::NodeCongestedClique => "node-congested-clique",
            Mode::GossipPushPull => "gossip-push-pull",
        })
    }
}

pub const DEFAULT_BANDWIDTH_MULTIPLIER: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelConfig {
    pub mode: Mode,
    pub id_space: u64,
    pub bandwidth_multiplier: u32,
    pub max_rounds: u64,
}

impl ModelConfig {
    pub fn new(mode: Mode, id_space: u64, max_rounds: u64) -> Result<Self, SimError> {
        ModelConfig {
            mode,
            id_space,
            bandwidth_multiplier: DEFAULT_BANDWIDTH_MULTIPLIER,
            max_rounds,
        }
        .validated()
    }

    pub fn with_bandwidth_multiplier(mut self, m: u32) -> Result<Self, SimError> {
        self.bandwidth_multiplier = m;
        self.validated()
    }

    fn validated(self) -> Result<Self, SimError> {
        if self.id_space < 2 {
            return Err(SimError::Config(format!("id_space {} < 2", self.id_space)));
        }
        if self.bandwidth_multiplier < 1 {
            return Err(SimError::Config("bandwidth multiplier must be ≥ 1".into()));
        }
        if self.max_rounds < 1 {
            return Err(SimError::Config("max_rounds must be ≥ 1".into()));
        }
        Ok(self)
    }

    /// `⌈log₂ id_space⌉`, the per-message sender-ID charge.
    pub fn id_bits(&self) -> u32 {
        ceil_log2(self.id_space)
    }

    /// `B`, in bits, including the sender-ID charge.
    pub fn link_bandwidth(&self) -> u64 {
        self.bandwidth_multiplier as u64 * self.id_bits() as u64
    }

    /// Largest payload a single message on an otherwise idle link may carry.
    pub fn max_payload(&self) -> u64 {
        self.link_bandwidth() - self.id_bits() as u64
    }

    /// Messages per node per round in the node-congested clique.
    pub fn node_message_budget(&self, n: usize) -> usize {
        ceil_log2(n.max(1) as u64) as usize
    }
}

/// A finite string of bits.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// Low `width` bits of `value`, most significant first.
    pub fn from_uint(value: u64, width: u32) -> Self {
        assert!(width <= 64);
        assert!(width == 64 || value >> width == 0, "{value} does not fit in {width} bits");
        BitString((0..width).rev().map(|i| value >> i & 1 == 1).collect())
    }

    pub fn bit(b: bool) -> Self {
        BitString(vec![b])
    }

    pub fn to_uint(&self) -> u64 {
        assert!(self.0.len() <= 64);
        self.0.iter().fold(0, |acc, &b| acc << 1 | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn extend(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Message {
    pub sender: NodeId,
    pub receiver: NodeId,
    pub payload: BitString,
    /// Round in which the message was sent.
    pub round: u64,
}

impl Message {
    pub fn charged_bits(&self, id_bits: u32) -> u64 {
        self.payload.len() as u64 + id_bits as u64
    }
}

/// What a node knows before round 1 under KT₁.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialKnowledge {
    pub id: NodeId,
    /// Sorted neighbor IDs. Edge colors are not revealed.
    pub neighbors: Vec<NodeId>,
    /// Every node ID, in internal-index order.
    pub roster: Arc<[NodeId]>,
    /// Private randomness, derived from the master seed and the node ID.
    pub seed: u64,
}

impl InitialKnowledge {
    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_neighbor(&self, id: NodeId) -> bool {
        self.neighbors.binary_search(&id).is_ok()
    }

    pub fn n(&self) -> usize {
        self.roster.len()
    }
}

/// Private seed of node `id` under `master_seed`.
pub fn node_seed(master_seed: u64, id: NodeId) -> u64 {
    seed::derive(master_seed, seed::TAG_NODE, id.0)
}

pub fn kt1_init(g: &Graph, master_seed: u64) -> Vec<InitialKnowledge> {
    let roster: Arc<[NodeId]> = g.ids().into();
    (0..g.node_count())
        .map(|v| {
            let mut neighbors: Vec<NodeId> = g.neighbors(v).iter().map(|&w| g.id(w)).collect();
            neighbors.sort_unstable();
            InitialKnowledge {
                id: g.id(v),
                neighbors,
                roster: Arc::clone(&roster),
                seed: node_seed(master_seed, g.id(v)),
            }
        })
        .collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolViolation {
    #[error("round {round}: {sender} sent to unknown node {receiver}")]
    UnknownReceiver {
        round: u64,
        sender: NodeId,
        receiver: NodeId,
    },
    #[error("round {round}: {sender} sent to itself")]
    SelfSend { round: u64, sender: NodeId },
    #[error("round {round}: {sender} sent to non-neighbor {receiver}")]
    NonEdge {
        round: u64,
        sender: NodeId,
        receiver: NodeId,
    },
    #[error("round {round}: link {sender}->{receiver} carried {bits} bits, limit {limit}")]
    Bandwidth {
        round: u64,
        sender: NodeId,
        receiver: NodeId,
        bits: u64,
        limit: u64,
    },
    #[error("round {round}: {sender} sent {count} messages, budget {limit}")]
    MessageBudget {
        round: u64,
        sender: NodeId,
        count: usize,
        limit: usize,
    },
    #[error("round {round}: {sender} initiated contact with {count} partners")]
    GossipPartners {
        round: u64,
        sender: NodeId,
        count: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("invalid model configuration: {0}")]
    Config(String),
    #[error("initial knowledge does not match the graph: {0}")]
    Knowledge(String),
    #[error("protocol violation: {0}")]
    Protocol(#[from] ProtocolViolation),
}

/// Per-round view handed to a node's program.
pub struct RoundContext<'a> {
    round: u64,
    knowledge: &'a InitialKnowledge,
    inbox: &'a [Message],
    outbox: Vec<(NodeId, BitString)>,
    terminated: bool,
}

impl<'a> RoundContext<'a> {
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn knowledge(&self) -> &'a InitialKnowledge {
        self.knowledge
    }

    /// Messages sent to this node in the previous round, ordered by sender ID.
    pub fn inbox(&self) -> &'a [Message] {
        self.inbox
    }

    pub fn send(&mut self, to: NodeId, payload: BitString) {
        self.outbox.push((to, payload));
    }

    pub fn send_to_neighbors(&mut self, payload: &BitString) {
        for &w in &self.knowledge.neighbors {
            self.outbox.push((w, payload.clone()));
        }
    }

    /// Stop after this round. Messages queued this round are still sent.
    pub fn terminate(&mut self) {
        self.terminated = true;
    }
}

/// A deterministic per-node state machine; every node runs the same program.
pub trait NodeProgram {
    type State;
    type Output: Clone + fmt::Debug + PartialEq;

    fn init(&self, knowledge: &InitialKnowledge) -> Self::State;

    fn on_round(&self, state: &mut Self::State, ctx: &mut RoundContext<'_>);

    fn output(&self, state: &Self::State) -> Self::Output;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    AllTerminated,
    RoundLimit,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitLedger {
    pub sent: Vec<u64>,
    pub received: Vec<u64>,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<O> {
    pub mode: Mode,
    pub id_bits: u32,
    pub rounds: u64,
    /// Received messages per node (internal-index order), in delivery order.
    pub transcripts: Vec<Vec<Message>>,
    pub ledger: BitLedger,
    pub outputs: Vec<O>,
    pub status: Termination,
}

impl<O> RunResult<O> {
    /// `L_i`.
    pub fn transcript_bits(&self, v: usize) -> u64 {
        self.transcripts[v]
            .iter()
            .map(|m| m.charged_bits(self.id_bits))
            .sum()
    }
}

pub fn run<P: NodeProgram>(
    config: &ModelConfig,
    g: &Graph,
    program: &P,
    init: &[InitialKnowledge],
) -> Result<RunResult<P::Output>, SimError> {
    let n = g.node_count();
    check_knowledge(g, init)?;
    if g.ids().iter().any(|id| id.0 == 0 || id.0 > config.id_space) {
        return Err(SimError::Config(format!(
            "node ids exceed id_space {}",
            config.id_space
        )));
    }
    let index: HashMap<NodeId, usize> = g.id_index();
    let id_bits = config.id_bits();
    let limit = config.link_bandwidth();
    let budget = config.node_message_budget(n);

    let mut states: Vec<P::State> = init.iter().map(|k| program.init(k)).collect();
    let mut alive = vec![true; n];
    let mut inboxes: Vec<Vec<Message>> = vec![Vec::new(); n];
    let mut transcripts: Vec<Vec<Message>> = vec![Vec::new(); n];
    let mut ledger = BitLedger {
        sent: vec![0; n],
        received: vec![0; n],
        total: 0,
    };
    let mut rounds = 0;
    let mut status = Termination::RoundLimit;

    for round in 1..=config.max_rounds {
        rounds = round;
        let mut next: Vec<Vec<Message>> = vec![Vec::new(); n];
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let mut ctx = RoundContext {
                round,
                knowledge: &init[v],
                inbox: &inboxes[v],
                outbox: Vec::new(),
                terminated: false,
            };
            program.on_round(&mut states[v], &mut ctx);
            let RoundContext {
                outbox, terminated, ..
            } = ctx;
            validate_outbox(config, &init[v], &inboxes[v], &outbox, round, &index, budget, limit)?;
            for (to, payload) in outbox {
                let m = Message {
                    sender: init[v].id,
                    receiver: to,
                    payload,
                    round,
                };
                ledger.sent[v] += m.charged_bits(id_bits);
                next[index[&to]].push(m);
            }
            if terminated {
                alive[v] = false;
            }
        }
        for (v, inbox) in inboxes.iter_mut().enumerate() {
            let delivered = std::mem::take(inbox);
            record(&mut transcripts[v], &mut ledger.received[v], delivered, id_bits);
        }
        for msgs in &mut next {
            msgs.sort_by_key(|m| m.sender);
        }
        inboxes = next;
        if alive.iter().all(|a| !a) {
            status = Termination::AllTerminated;
            break;
        }
    }
    for (v, inbox) in inboxes.into_iter().enumerate() {
        record(&mut transcripts[v], &mut ledger.received[v], inbox, id_bits);
    }
    ledger.total = ledger.received.iter().sum();
    debug_assert_eq!(ledger.total, ledger.sent.iter().sum::<u64>());

    Ok(RunResult {
        mode: config.mode,
        id_bits,
        rounds,
        outputs: states.iter().map(|s| program.output(s)).collect(),
        transcripts,
        ledger,
        status,
    })
}

fn record(transcript: &mut Vec<Message>, received: &mut u64, msgs: Vec<Message>, id_bits: u32) {
    for m in msgs {
        *received += m.charged_bits(id_bits);
        transcript.push(m);
    }
}

fn check_knowledge(g: &Graph, init: &[InitialKnowledge]) -> Result<(), SimError> {
    if init.len() != g.node_count() {
        return Err(SimError::Knowledge(format!(
            "{} records for {} nodes",
            init.len(),
            g.node_count()
        )));
    }
    for (v, k) in init.iter().enumerate() {
        let mut expected: Vec<NodeId> = g.neighbors(v).iter().map(|&w| g.id(w)).collect();
        expected.sort_unstable();
        if k.id != g.id(v) || k.neighbors != expected {
            return Err(SimError::Knowledge(format!("record {v} disagrees with node {}", g.id(v))));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn validate_outbox(
    config: &ModelConfig,
    me: &InitialKnowledge,
    inbox: &[Message],
    outbox: &[(NodeId, BitString)],
    round: u64,
    index: &HashMap<NodeId, usize>,
    budget: usize,
    limit: u64,
) -> Result<(), ProtocolViolation> {
    let sender = me.id;
    let mut per_link: BTreeMap<NodeId, u64> = BTreeMap::new();
    for (to, payload) in outbox {
        let receiver = *to;
        if receiver == sender {
            return Err(ProtocolViolation::SelfSend { round, sender });
        }
        if !index.contains_key(&receiver) {
            return Err(ProtocolViolation::UnknownReceiver {
                round,
                sender,
                receiver,
            });
        }
        let graph_only = matches!(config.mode, Mode::CongestKT1 | Mode::GossipPushPull);
        if graph_only && !me.is_neighbor(receiver) {
            return Err(ProtocolViolation::NonEdge {
                round,
                sender,
                receiver,
            });
        }
        *per_link.entry(receiver).or_default() += payload.len() as u64 + config.id_bits() as u64;
    }
    for (&receiver, &bits) in &per_link {
        if bits > limit {
            return Err(ProtocolViolation::Bandwidth {
                round,
                sender,
                receiver,
                bits,
                limit,
            });
        }
    }
    match config.mode {
        Mode::NodeCongestedClique if outbox.len() > budget => Err(ProtocolViolation::MessageBudget {
            round,
            sender,
            count: outbox.len(),
            limit: budget,
        }),
        Mode::GossipPushPull => {
            let repliers: BTreeSet<NodeId> = inbox.iter().map(|m| m.sender).collect();
            let initiated = per_link.keys().filter(|r| !repliers.contains(r)).count();
            if initiated > 1 {
                Err(ProtocolViolation::GossipPartners {
                    round,
                    sender,
                    count: initiated,
                })
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

/// Re-checks per-link per-round bandwidth from the transcripts alone.
pub fn audit_bandwidth<O>(result: &RunResult<O>, config: &ModelConfig) -> Result<(), ProtocolViolation> {
    let limit = config.link_bandwidth();
    for t in &result.transcripts {
        let mut links: BTreeMap<(u64, NodeId, NodeId), u64> = BTreeMap::new();
        for m in t {
            *links.entry((m.round, m.sender, m.receiver)).or_default() += m.charged_bits(result.id_bits);
        }
        if let Some((&(round, sender, receiver), &bits)) = links.iter().find(|(_, &b)| b > limit) {
            return Err(ProtocolViolation::Bandwidth {
                round,
                sender,
                receiver,
                bits,
                limit,
            });
        }
    }
    Ok(())
}

/// Canonical serialization of node `v`'s transcript: per message, the round
/// (32 bits), sender ID minus one (`id_bits`), payload length (16 bits) and
/// payload.
pub fn collect_transcript_key<O>(result: &RunResult<O>, v: usize) -> String {
    let mut key = BitString::new();
    for m in &result.transcripts[v] {
        key.extend(&BitString::from_uint(m.round, 32));
        key.extend(&BitString::from_uint(m.sender.0 - 1, result.id_bits));
        key.extend(&BitString::from_uint(m.payload.len() as u64, 16));
        key.extend(&m.payload);
    }
    key.to_string()
}

/// One CSV record per run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub mode: Mode,
    pub n: usize,
    pub t: Option<u32>,
    pub seed: u64,
    pub rounds: u64,
    pub total_bits: u64,
    /// Received bits per node, internal-index order.
    pub per_node_bits: Vec<u64>,
}

impl RunSummary {
    pub const CSV_HEADER: &'static str = "mode,n,t,seed,rounds,total_bits,per_node_bits";

    pub fn from_result<O>(result: &RunResult<O>, t: Option<u32>, seed: u64) -> Self {
        RunSummary {
            mode: result.mode,
            n: result.transcripts.len(),
            t,
            seed,
            rounds: result.rounds,
            total_bits: result.ledger.total,
            per_node_bits: result.ledger.received.clone(),
        }
    }

    /// `per_node_bits` is a single `;`-separated field.
    pub fn to_csv_row(&self) -> String {
        let per_node: Vec<String> = self.per_node_bits.iter().map(u64::to_string).collect();
        format!(
            "{},{},{},{},{},{},{}",
            self.mode,
            self.n,
            self.t.map_or("-".to_string(), |t| t.to_string()),
            self.seed,
            self.rounds,
            self.total_bits,
            per_node.join(";")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Noop;
    impl NodeProgram for Noop {
        type State = ();
        type Output = ();
        fn init(&self, _: &InitialKnowledge) {}
        fn on_round(&self, _: &mut (), ctx: &mut RoundContext<'_>) {
            ctx.terminate();
        }
        fn output(&self, _: &()) {}
    }

    /// The node with the given ID sends `payload` once per listed receiver
    /// in round 1; everyone terminates in round 2.
    struct Burst {
        from: NodeId,
        to: Vec<NodeId>,
        payload: BitString,
    }
    impl NodeProgram for Burst {
        type State = NodeId;
        type Output = Vec<String>;
        fn init(&self, k: &InitialKnowledge) -> NodeId {
            k.id
        }
        fn on_round(&self, me: &mut NodeId, ctx: &mut RoundContext<'_>) {
            if ctx.round() == 1 && *me == self.from {
                for &to in &self.to {
                    ctx.send(to, self.payload.clone());
                }
            }
            if ctx.round() == 2 {
                ctx.terminate();
            }
        }
        fn output(&self, _: &NodeId) -> Vec<String> {
            Vec::new()
        }
    }

    fn star(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn ids(r: std::ops::RangeInclusive<u64>) -> Vec<NodeId> {
        r.map(NodeId).collect()
    }

    #[test]
    fn kt1_knowledge() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(kt1_init(&k3, 0).iter().all(|k| k.neighbors.len() == 2));
        let mut g = Graph::with_sequential_ids(3);
        g.add_edge(0, 1).unwrap();
        let init = kt1_init(&g, 0);
        assert!(init[2].neighbors.is_empty());
        assert_eq!(init[2].roster.len(), 3);
        assert_ne!(init[0].seed, init[1].seed);
        assert_eq!(kt1_init(&g, 0), init);
    }

    #[test]
    fn noop_program_terminates_in_round_one() {
        let g = star(5);
        let cfg = ModelConfig::new(Mode::CongestKT1, 16, 10).unwrap();
        let r = run(&cfg, &g, &Noop, &kt1_init(&g, 1)).unwrap();
        assert_eq!(r.rounds, 1);
        assert_eq!(r.ledger.total, 0);
        assert_eq!(r.status, Termination::AllTerminated);
        assert_eq!(collect_transcript_key(&r, 0), "");
    }

    #[test]
    fn star_broadcast_costs_48_bits() {
        let g = star(5);
        let cfg = ModelConfig::new(Mode::CongestKT1, 16, 10)
            .unwrap()
            .with_bandwidth_multiplier(3)
            .unwrap();
        let prog = Burst {
            from: NodeId(1),
            to: ids(2..=5),
            payload: BitString::from_uint(0xA5, 8),
        };
        let r = run(&cfg, &g, &prog, &kt1_init(&g, 1)).unwrap();
        assert_eq!(r.ledger.total, 48);
        assert_eq!(r.ledger.sent[0], 48);
        assert_eq!(r.ledger.received, vec![0, 12, 12, 12, 12]);
        assert_eq!(r.rounds, 2);
        for v in 1..5 {
            assert_eq!(r.transcripts[v][0].round, 1);
            assert_eq!(r.transcript_bits(v), 12);
        }
        assert!(audit_bandwidth(&r, &cfg).is_ok());
    }

    #[test]
    fn default_bandwidth_rejects_the_star_broadcast() {
        let g = star(5);
        let cfg = ModelConfig::new(Mode::CongestKT1, 16, 10).unwrap();
        let prog = Burst {
            from: NodeId(1),
            to: vec![NodeId(2)],
            payload: BitString::from_uint(0xA5, 8),
        };
        let err = run(&cfg, &g, &prog, &kt1_init(&g, 1)).unwrap_err();
        assert!(matches!(
            err,
            SimError::Protocol(ProtocolViolation::Bandwidth { bits: 12, limit: 8, .. })
        ));
    }

    #[test]
    fn non_edge_send_is_a_violation_only_in_kt1() {
        let g = star(5);
        let prog = Burst {
            from: NodeId(2),
            to: vec![NodeId(3)],
            payload: BitString::bit(true),
        };
        let kt1 = ModelConfig::new(Mode::CongestKT1, 16, 10).unwrap();
        assert!(matches!(
            run(&kt1, &g, &prog, &kt1_init(&g, 1)),
            Err(SimError::Protocol(ProtocolViolation::NonEdge { .. }))
        ));
        let clique = ModelConfig::new(Mode::CongestedClique, 16, 10).unwrap();
        assert_eq!(run(&clique, &g, &prog, &kt1_init(&g, 1)).unwrap().ledger.total, 5);
    }

    #[test]
    fn node_congested_clique_budget() {
        let g = Graph::with_sequential_ids(16);
        let cfg = ModelConfig::new(Mode::NodeCongestedClique, 16, 10).unwrap();
        let five = Burst {
            from: NodeId(1),
            to: ids(2..=6),
            payload: BitString::bit(false),
        };
        assert!(matches!(
            run(&cfg, &g, &five, &kt1_init(&g, 1)),
            Err(SimError::Protocol(ProtocolViolation::MessageBudget { count: 5, limit: 4, .. }))
        ));
        let four = Burst {
            from: NodeId(1),
            to: ids(2..=5),
            payload: BitString::bit(false),
        };
        assert!(run(&cfg, &g, &four, &kt1_init(&g, 1)).is_ok());
    }

    #[test]
    fn gossip_allows_one_initiated_partner() {
        let g = star(5);
        let cfg = ModelConfig::new(Mode::GossipPushPull, 16, 10).unwrap();
        let two = Burst {
            from: NodeId(1),
            to: ids(2..=3),
            payload: BitString::bit(true),
        };
        assert!(matches!(
            run(&cfg, &g, &two, &kt1_init(&g, 1)),
            Err(SimError::Protocol(ProtocolViolation::GossipPartners { count: 2, .. }))
        ));
        let one = Burst {
            from: NodeId(1),
            to: vec![NodeId(4)],
            payload: BitString::bit(true),
        };
        assert!(run(&cfg, &g, &one, &kt1_init(&g, 1)).is_ok());
    }

    /// Every node pings all neighbors each round; gossip replies are free.
    struct Echo;
    impl NodeProgram for Echo {
        type State = ();
        type Output = ();
        fn init(&self, _: &InitialKnowledge) {}
        fn on_round(&self, _: &mut (), ctx: &mut RoundContext<'_>) {
            let senders: Vec<NodeId> = ctx.inbox().iter().map(|m| m.sender).collect();
            for s in senders {
                ctx.send(s, BitString::bit(false));
            }
            if ctx.round() == 1 && ctx.knowledge().id == NodeId(2) {
                ctx.send(NodeId(1), BitString::bit(true));
            }
            if ctx.round() == 3 {
                ctx.terminate();
            }
        }
        fn output(&self, _: &()) {}
    }

    #[test]
    fn gossip_replies_do_not_count_as_initiations() {
        let g = star(5);
        let cfg = ModelConfig::new(Mode::GossipPushPull, 16, 10).unwrap();
        let r = run(&cfg, &g, &Echo, &kt1_init(&g, 1)).unwrap();
        assert_eq!(r.rounds, 3);
        // 2->1 in round 1, 1->2 in round 2, 2->1 in round 3 (delivered at halt).
        assert_eq!(r.ledger.total, 15);
        assert_eq!(r.ledger.sent.iter().sum::<u64>(), r.ledger.total);
    }

    #[test]
    fn round_limit_is_reported() {
        let g = star(3);
        let cfg = ModelConfig::new(Mode::CongestKT1, 4, 2).unwrap();
        let r = run(
            &cfg,
            &g,
            &Burst {
                from: NodeId(9),
                to: vec![],
                payload: BitString::new(),
            },
            &kt1_init(&g, 0),
        )
        .unwrap();
        assert_eq!(r.status, Termination::AllTerminated);
        let cfg = ModelConfig::new(Mode::CongestKT1, 4, 1).unwrap();
        let r = run(&cfg, &g, &Echo, &kt1_init(&g, 0)).unwrap();
        assert_eq!(r.status, Termination::RoundLimit);
        assert_eq!(r.rounds, 1);
    }

    #[test]
    fn transcript_keys_are_deterministic_and_injective() {
        let g = star(5);
        let cfg = ModelConfig::new(Mode::CongestKT1, 16, 10).unwrap();
        let mk = |p: u64| Burst {
            from: NodeId(1),
            to: vec![NodeId(3)],
            payload: BitString::from_uint(p, 4),
        };
        let a = run(&cfg, &g, &mk(5), &kt1_init(&g, 1)).unwrap();
        let b = run(&cfg, &g, &mk(5), &kt1_init(&g, 1)).unwrap();
        let c = run(&cfg, &g, &mk(4), &kt1_init(&g, 1)).unwrap();
        assert_eq!(a, b);
        for v in 0..5 {
            assert_eq!(collect_transcript_key(&a, v), collect_transcript_key(&b, v));
        }
        assert_ne!(collect_transcript_key(&a, 2), collect_transcript_key(&c, 2));
        assert_eq!(collect_transcript_key(&a, 1), collect_transcript_key(&c, 1));
        assert_eq!(collect_transcript_key(&a, 2).len(), 32 + 4 + 16 + 4);
    }

    #[test]
    fn mismatched_knowledge_is_rejected() {
        let g = star(4);
        let mut init = kt1_init(&g, 0);
        init[1].neighbors.clear();
        let cfg = ModelConfig::new(Mode::CongestKT1, 4, 2).unwrap();
        assert!(matches!(run(&cfg, &g, &Noop, &init), Err(SimError::Knowledge(_))));
    }

    #[test]
    fn config_validation_and_summary() {
        assert!(ModelConfig::new(Mode::CongestKT1, 16, 0).is_err());
        assert!(ModelConfig::new(Mode::CongestKT1, 1, 5).is_err());
        let cfg = ModelConfig::new(Mode::CongestKT1, 1024, 5).unwrap();
        assert_eq!(cfg.id_bits(), 10);
        assert_eq!(cfg.link_bandwidth(), 20);
        assert_eq!(cfg.max_payload(), 10);
        let g = star(3);
        let r = run(&cfg, &g, &Noop, &kt1_init(&g, 0)).unwrap();
        let row = RunSummary::from_result(&r, Some(2), 7).to_csv_row();
        assert_eq!(row, "congest-kt1,3,2,7,1,0,0;0;0");
    }

    #[test]
    fn bitstring_round_trip() {
        let b = BitString::from_uint(0b1011, 4);
        assert_eq!(b.to_string(), "1011");
        assert_eq!(b.to_uint(), 11);
        assert_eq!(BitString::from_uint(0, 0).len(), 0);
    }
}
