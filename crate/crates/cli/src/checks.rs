//! The invariant suite behind `spanlab check`, numbered like the acceptance
//! criteria. [`Scale::Quick`] shrinks grids for interactive use;
//! [`Scale::Full`] uses the acceptance sizes.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_rational::Rational64;
use spanlab::graph_model::{degree_report, sample_instance, ColoredGraph, LowerBoundParams};
use spanlab::infocost::{
    check_conditioning_bound, check_data_processing, conditional_entropy, entropy,
    mutual_information, DiscreteDistribution,
};
use spanlab::seed::splitmix64;
use spanlab::simulator::{
    self, audit_bandwidth, kt1_init, BitString, InitialKnowledge, Mode, ModelConfig, NodeProgram,
    ProtocolViolation, RoundContext, SimError,
};
use spanlab::spanners::{
    cluster_3spanner_centralized, cluster_3spanner_distributed, cluster_3spanner_two_party,
    greedy_spanner,
};
use spanlab::time_encoding::{convergecast_demo, decode_graph, encode_graph, enumeration_size, SpanningTree};
use spanlab::traversal::{
    all_sequences, check_dmax_exponent, critical_edges_k, criticality_via_traversal,
    eliminate_long_b_runs, enumerate_b_maximal, is_critical, reachable_levels,
};
use spanlab::verify::{critical_inclusion_check, size_check, sparse_set, stretch_check};
use spanlab::{Edge, Execution, Graph, NodeId};

use crate::commands::{experiment, lic_toy, sci, ExperimentConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Scale::Quick => quick,
            Scale::Full => full,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        CheckOutcome {
            id,
            name,
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

pub type CheckFn = fn(Scale) -> CheckOutcome;

pub const ALL: [CheckFn; 13] = [
    criticality_oracle,
    long_b_run_subset,
    dmax_exponent,
    red_degree_statistics,
    greedy_guarantees,
    critical_inclusion,
    two_party_protocol,
    simulator_ledger,
    information_toolkit,
    lic_toy_consistency,
    codec,
    sparse_thresholds,
    experiment_determinism,
];

pub fn run_all(scale: Scale) -> Vec<CheckOutcome> {
    ALL.iter().map(|f| f(scale)).collect()
}

fn params(n: usize, t: u32) -> LowerBoundParams {
    LowerBoundParams::derive(n, t).expect("fixed grid parameters are valid")
}

/// Shortest cycle length, by BFS from every vertex.
pub fn girth(g: &Graph, edges: &[Edge]) -> Option<usize> {
    let n = g.node_count();
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let mut best = None::<usize>;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                } else if parent[v] != w {
                    let c = dist[v] + dist[w] + 1;
                    best = Some(best.map_or(c, |b| b.min(c)));
                }
            }
        }
    }
    best
}

pub fn criticality_oracle(scale: Scale) -> CheckOutcome {
    let per = scale.pick(5, 50);
    let mut edges = 0;
    let mut mismatches = 0;
    for (n, k) in [(64usize, 3usize), (128, 3), (128, 5), (256, 3)] {
        let p = params(n, k.div_ceil(2) as u32);
        let stats = Execution::Parallel.map_range(per, |s| {
            let g = sample_instance(&p, s as u64);
            let red = g.red_edges();
            let bad = red
                .iter()
                .filter(|&&e| {
                    is_critical(&g, e, k).expect("red") != criticality_via_traversal(&g, e, k).expect("red")
                })
                .count();
            (red.len(), bad)
        });
        edges += stats.iter().map(|s| s.0).sum::<usize>();
        mismatches += stats.iter().map(|s| s.1).sum::<usize>();
    }
    CheckOutcome::new(
        1,
        "criticality oracle equivalence",
        mismatches == 0,
        format!("{per} instances per (n, k), {edges} red edges, {mismatches} mismatches"),
    )
}

pub fn long_b_run_subset(scale: Scale) -> CheckOutcome {
    let count = scale.pick(4, 20);
    let (n, k) = (128, 5);
    let p = params(n, 3);
    let pairs: Vec<_> = all_sequences(k)
        .into_iter()
        .filter_map(|s| eliminate_long_b_runs(&s).ok().map(|r| (s, r)))
        .collect();
    let failures: usize = Execution::Parallel
        .map_range(count, |s| {
            let g = sample_instance(&p, s as u64);
            let mut bad = 0;
            for u in 0..g.half() {
                for (seq, rewritten) in &pairs {
                    let before = reachable_levels(&g, u, seq, None).union;
                    let after = reachable_levels(&g, u, rewritten, None);
                    bad += usize::from(!before.iter().all(|&v| after.contains(v)));
                }
            }
            bad
        })
        .iter()
        .sum();
    CheckOutcome::new(
        2,
        "long B-run elimination subset",
        failures == 0,
        format!(
            "{count} instances at n={n}, k={k}, {} rewritable sequences, {failures} failures",
            pairs.len()
        ),
    )
}

pub fn dmax_exponent(_: Scale) -> CheckOutcome {
    let bad: Vec<u32> = (3..=12).filter(|&k| !check_dmax_exponent(k)).collect();
    let six: Vec<String> = enumerate_b_maximal(6).iter().map(ToString::to_string).collect();
    let six_ok = six == ["BBRBBR", "RBBRBB"];
    CheckOutcome::new(
        3,
        "B-maximal exponent bound",
        bad.is_empty() && six_ok,
        format!("failing k: {bad:?}; B-maximal(6) = {{{}}}", six.join(", ")),
    )
}

/// Red-degree moments and tail over a seed sweep at `n = 4096`, `t = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub instances: usize,
    pub mean: f64,
    pub variance: f64,
    pub binomial_mean: f64,
    pub binomial_variance: f64,
    pub max_per_instance: Vec<usize>,
}

pub fn degree_statistics(seeds: usize) -> DegreeStats {
    let p = params(4096, 2);
    let per = Execution::Parallel.map_range(seeds, |s| {
        let g = sample_instance(&p, s as u64);
        let r = degree_report(&g, &p);
        let sum: f64 = r.red_degrees.iter().map(|&d| d as f64).sum();
        let sq: f64 = r.red_degrees.iter().map(|&d| (d * d) as f64).sum();
        (sum, sq, r.red_degrees.len(), r.max)
    });
    let count: usize = per.iter().map(|x| x.2).sum();
    let mean = per.iter().map(|x| x.0).sum::<f64>() / count as f64;
    let variance = per.iter().map(|x| x.1).sum::<f64>() / count as f64 - mean * mean;
    let q = p.red_prob;
    DegreeStats {
        instances: seeds,
        mean,
        variance,
        binomial_mean: p.expected_red_degree,
        binomial_variance: (p.half() - 1) as f64 * q * (1.0 - q),
        max_per_instance: per.iter().map(|x| x.3).collect(),
    }
}

pub const MAX_RED_DEGREE: usize = 31;

pub fn red_degree_statistics(scale: Scale) -> CheckOutcome {
    let s = degree_statistics(scale.pick(10, 100));
    let mean_err = (s.mean - s.binomial_mean).abs() / s.binomial_mean;
    let var_err = (s.variance - s.binomial_variance).abs() / s.binomial_variance;
    let within = s.max_per_instance.iter().filter(|&&m| m <= MAX_RED_DEGREE).count();
    let need = (s.instances * 99).div_ceil(100);
    CheckOutcome::new(
        4,
        "red degree statistics",
        mean_err <= 0.05 && var_err <= 0.15 && within >= need,
        format!(
            "mean {} (target {}), variance {} (target {}), max <= {MAX_RED_DEGREE} in {within}/{}",
            sci(s.mean),
            sci(s.binomial_mean),
            sci(s.variance),
            sci(s.binomial_variance),
            s.instances
        ),
    )
}

/// Small named graphs used across the spanner checks.
pub fn fixtures() -> Vec<(&'static str, Graph)> {
    let cycle = |n: usize| -> Vec<(usize, usize)> { (0..n).map(|i| (i, (i + 1) % n)).collect() };
    let complete = |n: usize| -> Vec<(usize, usize)> {
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
    };
    let mut petersen = cycle(5);
    petersen.extend((0..5).map(|i| (i, i + 5)));
    petersen.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
    let cube: Vec<(usize, usize)> = (0..8usize)
        .flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b))))
        .filter(|(a, b)| a < b)
        .collect();
    let k33: Vec<(usize, usize)> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
    let build = |n, e: &[(usize, usize)]| Graph::from_edges(n, e).expect("fixture edges are simple");
    vec![
        ("C5", build(5, &cycle(5))),
        ("C8", build(8, &cycle(8))),
        ("K4", build(4, &complete(4))),
        ("K7", build(7, &complete(7))),
        ("K3,3", build(6, &k33)),
        ("Petersen", build(10, &petersen)),
        ("Q3", build(8, &cube)),
        ("eight-node", eight_node_fixture().to_graph()),
    ]
}

/// Two regions of two per side plus the red edge (U0, U2).
pub fn eight_node_fixture() -> ColoredGraph {
    let ids = (1..=8).map(NodeId).collect();
    let mut g = ColoredGraph::from_layout(4, 2, ids, 8).expect("fixture layout");
    g.add_red_edge(0, 2).expect("fixture edge");
    g
}

pub fn greedy_guarantees(scale: Scale) -> CheckOutcome {
    let mut graphs: Vec<(String, Graph)> =
        fixtures().into_iter().map(|(name, g)| (name.to_string(), g)).collect();
    let seeds = scale.pick(2, 5);
    for n in [64, 128, 256] {
        for t in [2, 3] {
            for s in 0..seeds {
                graphs.push((format!("G(n={n},t={t},seed={s})"), sample_instance(&params(n, t), s).to_graph()));
            }
        }
    }
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, g) in &graphs {
        for t in [2u32, 3] {
            let k = 2 * t as usize - 1;
            let out = greedy_spanner(g, k);
            let stretch = stretch_check(g, &out.edges, k, Execution::Parallel).expect("subgraph").ok;
            let size = size_check(out.len(), g.node_count(), t, Rational64::from_integer(0)).ok;
            let girth_ok = girth(g, &out.edges).is_none_or(|c| c > 2 * t as usize);
            checked += 1;
            if !(stretch && size && girth_ok) {
                failures.push(format!("{name} t={t}"));
            }
        }
    }
    CheckOutcome::new(
        5,
        "greedy stretch, size and girth",
        failures.is_empty(),
        format!("{checked} graph/stretch pairs, failures: {failures:?}"),
    )
}

pub fn critical_inclusion(scale: Scale) -> CheckOutcome {
    let seeds = scale.pick(2, 5);
    let grid = [(64, 2), (128, 2), (256, 2), (128, 3), (256, 3)];
    let cells: Vec<(usize, u32, u64)> = grid
        .iter()
        .flat_map(|&(n, t)| (0..seeds).map(move |s| (n, t, s)))
        .collect();
    let per = Execution::Parallel.map(&cells, |&(n, t, s)| {
        let p = params(n, t);
        let cg = sample_instance(&p, s);
        let g = cg.to_graph();
        let k = p.k as usize;
        let report = critical_edges_k(&cg, k, Execution::Sequential);
        let mut outputs = vec![greedy_spanner(&g, k).edges];
        if k == 3 {
            outputs.push(cluster_3spanner_centralized(&g, s).edges);
        }
        let (mut checked, mut missing, mut survivors, mut removals) = (0, 0, 0, 0);
        for out in outputs {
            if !stretch_check(&g, &out, k, Execution::Sequential).expect("subgraph").ok {
                continue;
            }
            checked += 1;
            missing += critical_inclusion_check(&report, &out).len();
            for e in report.edges() {
                let reduced: Vec<Edge> = out.iter().copied().filter(|&f| f != e).collect();
                removals += 1;
                if stretch_check(&g, &reduced, k, Execution::Sequential).expect("subgraph").ok {
                    survivors += 1;
                }
            }
        }
        (checked, missing, survivors, removals)
    });
    let sum = |f: fn(&(usize, usize, usize, usize)) -> usize| per.iter().map(f).sum::<usize>();
    let (checked, missing, survivors, removals) =
        (sum(|x| x.0), sum(|x| x.1), sum(|x| x.2), sum(|x| x.3));
    CheckOutcome::new(
        6,
        "critical edge inclusion",
        checked > 0 && missing == 0 && survivors == 0,
        format!(
            "{checked} passing outputs, {missing} missing critical edges, \
             {survivors}/{removals} single removals kept stretch"
        ),
    )
}

/// Per-trial result of the two-party protocol at a given `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPartyTrial {
    pub bits: u64,
    pub stretch_ok: bool,
    pub matches_centralized: bool,
}

pub fn two_party_trials(n: usize, seeds: usize) -> Vec<TwoPartyTrial> {
    let p = params(n, 2);
    Execution::Parallel.map_range(seeds, |s| {
        let g = sample_instance(&p, s as u64).to_graph();
        let alice: Vec<usize> = (0..n / 2).collect();
        let bob: Vec<usize> = (n / 2..n).collect();
        let (out, bits) = cluster_3spanner_two_party(&g, &alice, &bob, s as u64).expect("halves partition");
        TwoPartyTrial {
            bits,
            stretch_ok: stretch_check(&g, &out.edges, 3, Execution::Sequential).expect("subgraph").ok,
            matches_centralized: out.edges == cluster_3spanner_centralized(&g, s as u64).edges,
        }
    })
}

pub fn two_party_protocol(scale: Scale) -> CheckOutcome {
    let n = 1024;
    let trials = two_party_trials(n, scale.pick(10, 100));
    let expected = n as u64 * 2 * 10;
    let exact = trials.iter().filter(|t| t.bits == expected).count();
    let stretch = trials.iter().filter(|t| t.stretch_ok).count();
    let equal = trials.iter().filter(|t| t.matches_centralized).count();
    let need = (trials.len() * 99).div_ceil(100);
    CheckOutcome::new(
        7,
        "two-party 3-spanner protocol",
        exact == trials.len() && stretch >= need && equal == trials.len(),
        format!(
            "{} trials at n={n}: bits = {expected} in {exact}, stretch ok in {stretch}, equal to centralized in {equal}",
            trials.len()
        ),
    )
}

/// Sends `(round, from, to, payload bits)` messages, then stops.
#[derive(Debug, Clone)]
pub struct Script(pub Vec<(u64, NodeId, NodeId, usize)>);

impl NodeProgram for Script {
    type State = NodeId;
    type Output = ();

    fn init(&self, k: &InitialKnowledge) -> NodeId {
        k.id
    }

    fn on_round(&self, id: &mut NodeId, ctx: &mut RoundContext<'_>) {
        let r = ctx.round();
        for &(round, from, to, bits) in &self.0 {
            if round == r && from == *id {
                ctx.send(to, BitString::from_bits(vec![true; bits]));
            }
        }
        if self.0.iter().all(|m| m.0 <= r) {
            ctx.terminate();
        }
    }

    fn output(&self, _: &NodeId) {}
}

fn star(leaves: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..=leaves).map(|l| (0, l)).collect();
    Graph::from_edges(leaves + 1, &edges).expect("star edges are simple")
}

fn complete_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    Graph::from_edges(n, &edges).expect("clique edges are simple")
}

type ScriptResult = Result<simulator::RunResult<()>, SimError>;

/// Name, outcome, and the violation it must raise.
type ViolationFixture = (&'static str, ScriptResult, fn(&ProtocolViolation) -> bool);

fn script_run(mode: Mode, id_space: u64, multiplier: u32, g: &Graph, script: Script) -> ScriptResult {
    let config = ModelConfig::new(mode, id_space, 10)?.with_bandwidth_multiplier(multiplier)?;
    simulator::run(&config, g, &script, &kt1_init(g, 0))
}

pub fn simulator_ledger(_: Scale) -> CheckOutcome {
    let id = NodeId;
    let mut notes = Vec::new();
    let mut ok = true;

    // Star broadcast: 8-bit payload plus a 4-bit sender ID to 4 leaves.
    let broadcast = Script((2..=5).map(|l| (1, id(1), id(l), 8)).collect());
    match script_run(Mode::CongestKT1, 16, 3, &star(4), broadcast) {
        Ok(r) => {
            let conserved = r.ledger.sent.iter().sum::<u64>() == r.ledger.received.iter().sum::<u64>();
            ok &= r.ledger.total == 48 && conserved;
            notes.push(format!("star ledger {} bits", r.ledger.total));
        }
        Err(e) => {
            ok = false;
            notes.push(format!("star run failed: {e}"));
        }
    }

    let violations: [ViolationFixture; 3] = [
        (
            "bandwidth",
            script_run(Mode::CongestKT1, 16, 2, &star(1), Script(vec![(1, id(1), id(2), 5)])),
            |v| matches!(v, ProtocolViolation::Bandwidth { .. }),
        ),
        (
            "budget",
            script_run(
                Mode::NodeCongestedClique,
                16,
                2,
                &complete_graph(16),
                Script((2..=6).map(|l| (1, id(1), id(l), 1)).collect()),
            ),
            |v| matches!(v, ProtocolViolation::MessageBudget { .. }),
        ),
        (
            "gossip",
            script_run(
                Mode::GossipPushPull,
                16,
                2,
                &star(3),
                Script(vec![(1, id(1), id(2), 1), (1, id(1), id(3), 1)]),
            ),
            |v| matches!(v, ProtocolViolation::GossipPartners { .. }),
        ),
    ];
    for (name, result, expected) in violations {
        let raised = matches!(&result, Err(SimError::Protocol(v)) if expected(v));
        ok &= raised;
        notes.push(format!("{name} violation {}", if raised { "raised" } else { "missing" }));
    }

    // Conservation and re-audit on real protocol runs.
    let mut runs = 0;
    for s in 0..5 {
        let g = Graph::erdos_renyi(60, 0.2, s);
        for mode in [Mode::CongestKT1, Mode::CongestedClique] {
            let config = ModelConfig::new(mode, 64, 4).expect("valid config");
            match cluster_3spanner_distributed(&g, &config, s) {
                Ok((_, r)) => {
                    runs += 1;
                    let sent: u64 = r.ledger.sent.iter().sum();
                    let received: u64 = r.ledger.received.iter().sum();
                    ok &= sent == received && sent == r.ledger.total && audit_bandwidth(&r, &config).is_ok();
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("cluster run failed: {e}"));
                }
            }
        }
    }
    notes.push(format!("{runs} protocol runs conserve bits"));
    CheckOutcome::new(8, "simulator ledger", ok, notes.join(", "))
}

/// Deterministic stream of uniforms in `[0, 1)`.
pub struct Uniforms(u64);

impl Uniforms {
    pub fn new(seed: u64) -> Self {
        Uniforms(seed)
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        (splitmix64(self.0) >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Random joint table over `vars`, each with `support` values; about a fifth
/// of the cells are zero.
pub fn random_table(u: &mut Uniforms, vars: &[&str], support: u64) -> DiscreteDistribution {
    let cells = support.pow(vars.len() as u32);
    let mut rows: Vec<(Vec<u64>, f64)> = (0..cells)
        .map(|c| {
            let values = (0..vars.len()).map(|i| c / support.pow(i as u32) % support).collect();
            let w = if u.next_f64() < 0.2 { 0.0 } else { u.next_f64() };
            (values, w)
        })
        .collect();
    let total: f64 = rows.iter().map(|r| r.1).sum();
    if total == 0.0 {
        rows[0].1 = 1.0;
    } else {
        rows.iter_mut().for_each(|r| r.1 /= total);
    }
    DiscreteDistribution::new(vars, rows).expect("normalized table")
}

/// `p(x) p(y|x) p(z|y)` with random kernels.
pub fn random_chain(u: &mut Uniforms, support: u64) -> DiscreteDistribution {
    let mut dist = |len: u64| -> Vec<f64> {
        let w: Vec<f64> = (0..len).map(|_| u.next_f64() + 1e-3).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    };
    let px = dist(support);
    let py: Vec<Vec<f64>> = (0..support).map(|_| dist(support)).collect();
    let pz: Vec<Vec<f64>> = (0..support).map(|_| dist(support)).collect();
    let mut rows = Vec::new();
    for x in 0..support as usize {
        for y in 0..support as usize {
            for z in 0..support as usize {
                rows.push((vec![x as u64, y as u64, z as u64], px[x] * py[x][y] * pz[y][z]));
            }
        }
    }
    let total: f64 = rows.iter().map(|r| r.1).sum();
    rows.iter_mut().for_each(|r| r.1 /= total);
    DiscreteDistribution::new(&["X", "Y", "Z"], rows).expect("normalized chain")
}

/// Tables whose probabilities are exact binary fractions.
fn dyadic_tables() -> Vec<DiscreteDistribution> {
    let xor = "X Y Z p\n0 0 0 1/4\n0 1 1 1/4\n1 0 1 1/4\n1 1 0 1/4\n";
    let skew = "X Y Z p\n0 0 0 1/2\n0 1 1 1/8\n1 0 1 1/8\n1 1 0 1/16\n1 1 1 3/16\n";
    let mut out: Vec<DiscreteDistribution> = [xor, skew]
        .iter()
        .map(|t| DiscreteDistribution::parse_table(t).expect("fixed table"))
        .collect();
    let mut u = Uniforms::new(21);
    for _ in 0..50 {
        // Sixteenths assigned to random cells of a 2×2×2 cube.
        let mut counts = [0u32; 8];
        for _ in 0..16 {
            counts[(u.next_f64() * 8.0) as usize] += 1;
        }
        let rows = (0..8u64).map(|c| (vec![c & 1, c >> 1 & 1, c >> 2], counts[c as usize] as f64 / 16.0));
        out.push(DiscreteDistribution::new(&["X", "Y", "Z"], rows).expect("sixteenths sum to 1"));
    }
    out
}

pub fn information_toolkit(scale: Scale) -> CheckOutcome {
    const TOL: f64 = 1e-9;
    let count = scale.pick(100, 1000);
    let mut notes = Vec::new();

    // I = H[X|Z] − H[X|Y,Z] against the entropy-sum form.
    let mut identity_err = 0f64;
    for d in dyadic_tables() {
        let h = |v: &[&str]| entropy(&d, v).expect("known vars");
        let sum_form = h(&["X", "Z"]) + h(&["Y", "Z"]) - h(&["X", "Y", "Z"]) - h(&["Z"]);
        let mi = mutual_information(&d, &["X"], &["Y"], &["Z"]).expect("known vars");
        let diff = conditional_entropy(&d, &["X"], &["Z"]).expect("known vars")
            - conditional_entropy(&d, &["X"], &["Y", "Z"]).expect("known vars");
        identity_err = identity_err.max((mi - sum_form).abs()).max((mi - diff).abs());
    }
    let identity_ok = identity_err <= 1e-12;
    notes.push(format!("identity max error {}", sci(identity_err)));

    let mut u = Uniforms::new(64);
    let mut conditioning = 0;
    let mut monotone = 0;
    let mut bounded = 0;
    let mut processing = 0;
    for i in 0..count {
        let d = random_table(&mut u, &["X", "Y", "Z1", "Z2"], 2 + (i as u64 % 2));
        let z1 = d.marginal(&["Z1"]).expect("known var");
        conditioning += usize::from(z1.atoms().all(|(z, _)| {
            check_conditioning_bound(&d, "X", "Y", "Z1", "Z2", z[0]).expect("z in support").holds
        }));
        let d = random_table(&mut u, &["X", "Y", "Z"], 2 + (i as u64 % 3));
        let h = |x: &[&str], y: &[&str]| conditional_entropy(&d, x, y).expect("known vars");
        monotone += usize::from(h(&["X"], &["Y", "Z"]) <= h(&["X"], &["Y"]) + TOL);
        let mi = mutual_information(&d, &["X"], &["Y"], &["Z"]).expect("known vars");
        bounded += usize::from(mi <= h(&["X"], &["Z"]) + TOL && mi >= 0.0);
        let chain = random_chain(&mut u, 2 + (i as u64 % 3));
        processing += usize::from(check_data_processing(&chain, "X", "Y", "Z").expect("known vars").holds);
    }
    notes.push(format!(
        "{count} tables each: conditioning bound {conditioning}, H[X|Y,Z] <= H[X|Y] {monotone}, \
         I <= H {bounded}, data processing {processing}"
    ));

    let xor = DiscreteDistribution::parse_table("X Y Z p\n0 0 0 1/4\n0 1 1 1/4\n1 0 1 1/4\n1 1 0 1/4\n")
        .expect("xor table");
    let plain = mutual_information(&xor, &["X"], &["Y"], &[]).expect("known vars");
    let cond = mutual_information(&xor, &["X"], &["Y"], &["Z"]).expect("known vars");
    let xor_ok = plain == 0.0 && cond == 1.0;
    notes.push(format!("xor I[X:Y] = {plain}, I[X:Y|Z] = {cond}"));

    let all = [conditioning, monotone, bounded, processing].iter().all(|&c| c == count);
    CheckOutcome::new(9, "information toolkit", identity_ok && all && xor_ok, notes.join("; "))
}

pub fn lic_toy_consistency(scale: Scale) -> CheckOutcome {
    let trials = scale.pick(20_000, 100_000);
    match lic_toy(trials, 5, Execution::Parallel) {
        Ok(r) => {
            let exact_err = (r.exact.sum - 1.0).abs();
            let sampled = r.sampled.as_ref().map_or(f64::NAN, |s| s.sum);
            CheckOutcome::new(
                10,
                "information cost toy",
                exact_err <= 1e-12 && (sampled - 1.0).abs() <= 0.05,
                format!("exact {} (error {}), sampled {} over {trials} trials", sci(r.exact.sum), sci(exact_err), sci(sampled)),
            )
        }
        Err(e) => CheckOutcome::new(10, "information cost toy", false, e.to_string()),
    }
}

/// Exhaustive bijection check at `(n, id_space)`; returns the index count.
pub fn codec_round_trip(n: usize, id_space: u64) -> Result<u64, String> {
    let size = enumeration_size(n, id_space).map_err(|e| e.to_string())?;
    let total: u64 = size.try_into().map_err(|_| "enumeration too large".to_string())?;
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..total {
        let idx = BigUint::from(i);
        let g = decode_graph(&idx, n, id_space).map_err(|e| e.to_string())?;
        if encode_graph(&g, id_space).map_err(|e| e.to_string())? != idx {
            return Err(format!("index {i} does not round-trip"));
        }
        let key = (g.ids().to_vec(), g.edges_by_id());
        if !seen.insert(format!("{key:?}")) {
            return Err(format!("index {i} repeats a graph"));
        }
    }
    if decode_graph(&BigUint::from(total), n, id_space).is_ok() {
        return Err(format!("index {total} should be out of range"));
    }
    Ok(total)
}

pub fn codec(_: Scale) -> CheckOutcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (n, s, expected) in [(2, 4, 24), (3, 4, 192)] {
        match codec_round_trip(n, s) {
            Ok(c) => {
                ok &= c == expected;
                notes.push(format!("({n},{s}) {c} indices"));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("({n},{s}) {e}"));
            }
        }
    }
    let tree = SpanningTree::path(3);
    let mut decoded = 0;
    for i in 0..192u64 {
        let g = decode_graph(&BigUint::from(i), 3, 4).expect("index in range");
        match convergecast_demo(&g, &tree, 4) {
            Ok(r) => {
                let rounds_ok = r.rounds_used == BigUint::from(2 * r.depth as u64) * &r.t && r.rounds_used >= r.t;
                if r.decode_ok && r.broadcast_ok && r.payload_bits <= 2 * (3 - 1) && rounds_ok {
                    decoded += 1;
                }
            }
            Err(e) => notes.push(format!("index {i}: {e}")),
        }
    }
    ok &= decoded == 192;
    notes.push(format!("convergecast decoded {decoded}/192 over a fixed path tree"));
    CheckOutcome::new(11, "enumeration codec", ok, notes.join(", "))
}

pub fn sparse_thresholds(_: Scale) -> CheckOutcome {
    let p = params(4096, 2);
    let ids = (1..=4096).map(NodeId).collect();
    let g = ColoredGraph::from_layout(2048, p.region_size, ids, 4096).expect("layout");
    let s = sparse_set(&g, &vec![0; 4096], &p);
    CheckOutcome::new(
        12,
        "sparse set thresholds",
        s.threshold == 71 && s.required == 1707,
        format!("per-node threshold {}, required size {}", s.threshold, s.required),
    )
}

pub fn experiment_determinism(scale: Scale) -> CheckOutcome {
    let cfg = ExperimentConfig {
        seeds: scale.pick(3, 10),
        ..ExperimentConfig::default()
    };
    match (experiment(&cfg), experiment(&cfg)) {
        (Ok(a), Ok(b)) => {
            let rows = a.csv.lines().count() - 1;
            CheckOutcome::new(
                13,
                "experiment determinism",
                a.csv == b.csv && a.failed == 0,
                format!("{rows} rows, {} bytes, identical: {}", a.csv.len(), a.csv == b.csv),
            )
        }
        (Err(e), _) | (_, Err(e)) => CheckOutcome::new(13, "experiment determinism", false, e.to_string()),
    }
}
