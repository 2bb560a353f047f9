//! Entropy toolkit, plug-in local information cost and bound curves.
//!
//! All logarithms are base 2 and every quantity is in bits. Mutual
//! information is computed as `I[X:Y|Z] = H[X|Z] − H[X|Y,Z]`, with
//! conditional entropies taken as expectations of slice entropies.
//!
//! [`estimate_lic`] is a plug-in estimator. In exact-enumeration mode it is
//! the true value; in sampled mode it is biased upward at finite sample
//! sizes and should be read as a report, not a measurement.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::graph_model::LowerBoundParams;
use crate::par::Execution;
use crate::seed;
use crate::simulator::{self, BitString, InitialKnowledge, ModelConfig, NodeProgram, RoundContext};

/// Allowed deviation of the total probability from 1.
pub const SUM_TOLERANCE: f64 = 1e-12;
/// Negative information values above `-NEGATIVE_TOLERANCE` are rounding noise.
pub const NEGATIVE_TOLERANCE: f64 = 1e-9;

/// Caveat printed with sampled estimates.
pub const PLUG_IN_BIAS_NOTE: &str =
    "sampled plug-in estimate: biased upward at finite sample sizes";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("invalid distribution: {0}")]
    Invalid(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("value {value} of {var} has zero probability")]
    OutsideSupport { var: String, value: u64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("joint support of size {size} exceeds the cap {cap}")]
    SupportCap { size: usize, cap: usize },
    #[error("source cannot be enumerated exactly")]
    NotEnumerable,
    #[error("all atoms must have {expected} nodes, found {found}")]
    NodeCount { expected: usize, found: usize },
    #[error("simulation failed: {0}")]
    Simulation(#[from] simulator::SimError),
}

/// Joint distribution over named variables with finite integer supports.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    vars: Vec<String>,
    table: BTreeMap<Vec<u64>, f64>,
}

impl DiscreteDistribution {
    /// Repeated assignments are summed; zero-probability rows are dropped.
    pub fn new<S: AsRef<str>>(
        vars: &[S],
        entries: impl IntoIterator<Item = (Vec<u64>, f64)>,
    ) -> Result<Self, InfoError> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let distinct: BTreeSet<&String> = vars.iter().collect();
        if distinct.len() != vars.len() {
            return Err(InfoError::Invalid("duplicate variable name".into()));
        }
        let mut table: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        for (values, p) in entries {
            if values.len() != vars.len() {
                return Err(InfoError::Invalid(format!(
                    "row has {} values for {} variables",
                    values.len(),
                    vars.len()
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(InfoError::Invalid(format!("probability {p} is not in [0, 1]")));
            }
            if p > 0.0 {
                *table.entry(values).or_default() += p;
            }
        }
        let total: f64 = table.values().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(InfoError::Invalid(format!("probabilities sum to {total}")));
        }
        Ok(DiscreteDistribution { vars, table })
    }

    /// Plain-text table: a header of variable names followed by `p`, then one
    /// row per atom. Probabilities may be decimals or `a/b`. `#` starts a
    /// comment.
    pub fn parse_table(text: &str) -> Result<Self, InfoError> {
        let mut rows = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = rows.next().ok_or(InfoError::Parse {
            line: 0,
            message: "empty table".into(),
        })?;
        let mut names: Vec<&str> = header.split_whitespace().collect();
        if names.pop() != Some("p") {
            return Err(InfoError::Parse {
                line: hl,
                message: "last header column must be p".into(),
            });
        }
        let mut entries = Vec::new();
        for (line, row) in rows {
            let fields: Vec<&str> = row.split_whitespace().collect();
            if fields.len() != names.len() + 1 {
                return Err(InfoError::Parse {
                    line,
                    message: format!("expected {} fields", names.len() + 1),
                });
            }
            let values = fields[..names.len()]
                .iter()
                .map(|f| f.parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| InfoError::Parse {
                    line,
                    message: e.to_string(),
                })?;
            let p = parse_probability(fields[names.len()]).ok_or_else(|| InfoError::Parse {
                line,
                message: format!("bad probability {:?}", fields[names.len()]),
            })?;
            entries.push((values, p));
        }
        DiscreteDistribution::new(&names, entries)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Vec<u64>, f64)> {
        self.table.iter().map(|(k, &p)| (k, p))
    }

    pub fn support_size(&self) -> usize {
        self.table.len()
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>, InfoError> {
        names
            .iter()
            .map(|n| {
                self.vars
                    .iter()
                    .position(|v| v == n)
                    .ok_or_else(|| InfoError::UnknownVariable(n.to_string()))
            })
            .collect()
    }

    /// Distribution of the listed variables (in the listed order).
    pub fn marginal(&self, names: &[&str]) -> Result<DiscreteDistribution, InfoError> {
        let idx = self.indices(names)?;
        let mut table: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        for (values, &p) in &self.table {
            *table.entry(idx.iter().map(|&i| values[i]).collect()).or_default() += p;
        }
        Ok(DiscreteDistribution {
            vars: names.iter().map(|s| s.to_string()).collect(),
            table,
        })
    }

    pub fn probability(&self, var: &str, value: u64) -> Result<f64, InfoError> {
        let i = self.indices(&[var])?[0];
        Ok(self
            .table
            .iter()
            .filter(|(v, _)| v[i] == value)
            .map(|(_, p)| p)
            .sum())
    }

    /// Slice `var = value`, renormalized. The variable stays in the table.
    pub fn condition(&self, var: &str, value: u64) -> Result<DiscreteDistribution, InfoError> {
        let i = self.indices(&[var])?[0];
        let mass = self.probability(var, value)?;
        if mass <= 0.0 {
            return Err(InfoError::OutsideSupport {
                var: var.to_string(),
                value,
            });
        }
        Ok(DiscreteDistribution {
            vars: self.vars.clone(),
            table: self
                .table
                .iter()
                .filter(|(v, _)| v[i] == value)
                .map(|(v, &p)| (v.clone(), p / mass))
                .collect(),
        })
    }
}

fn parse_probability(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.parse().ok()?, b.parse().ok()?);
            (b > 0.0).then_some(a / b)
        }
        None => s.parse().ok(),
    }
}

fn plain_entropy(probs: impl Iterator<Item = f64>) -> f64 {
    probs
        .filter(|&p| p > 0.0)
        .map(|p| p * (1.0 / p).log2())
        .sum()
}

/// `H[X]` for the joint variable listed in `x`.
pub fn entropy(d: &DiscreteDistribution, x: &[&str]) -> Result<f64, InfoError> {
    Ok(plain_entropy(d.marginal(x)?.table.into_values()))
}

/// `H[X | Y] = E_y H[X | Y = y]`.
pub fn conditional_entropy(
    d: &DiscreteDistribution,
    x: &[&str],
    y: &[&str],
) -> Result<f64, InfoError> {
    if y.is_empty() {
        return entropy(d, x);
    }
    let xi = d.indices(x)?;
    let yi = d.indices(y)?;
    let mut slices: BTreeMap<Vec<u64>, BTreeMap<Vec<u64>, f64>> = BTreeMap::new();
    for (values, &p) in &d.table {
        let yv: Vec<u64> = yi.iter().map(|&i| values[i]).collect();
        let xv: Vec<u64> = xi.iter().map(|&i| values[i]).collect();
        *slices.entry(yv).or_default().entry(xv).or_default() += p;
    }
    Ok(slices
        .values()
        .map(|slice| {
            let py: f64 = slice.values().sum();
            py * plain_entropy(slice.values().map(|&p| p / py))
        })
        .sum())
}

fn clamp_information(v: f64) -> f64 {
    if v < 0.0 && v > -NEGATIVE_TOLERANCE {
        0.0
    } else {
        v
    }
}

/// `I[X : Y | Z] = H[X|Z] − H[X|Y,Z]`; pass an empty `z` for `I[X : Y]`.
pub fn mutual_information(
    d: &DiscreteDistribution,
    x: &[&str],
    y: &[&str],
    z: &[&str],
) -> Result<f64, InfoError> {
    let yz: Vec<&str> = y.iter().chain(z).copied().collect();
    let v = conditional_entropy(d, x, z)? - conditional_entropy(d, x, &yz)?;
    Ok(clamp_information(v))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `I[X:Y | Z1, Z2] ≥ Pr[Z1 = z] · I[X:Y | Z1 = z, Z2]`.
pub fn check_conditioning_bound(
    d: &DiscreteDistribution,
    x: &str,
    y: &str,
    z1: &str,
    z2: &str,
    z: u64,
) -> Result<InequalityCheck, InfoError> {
    let lhs = mutual_information(d, &[x], &[y], &[z1, z2])?;
    let pz = d.probability(z1, z)?;
    let slice = d.condition(z1, z)?;
    let rhs = pz * mutual_information(&slice, &[x], &[y], &[z2])?;
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - NEGATIVE_TOLERANCE,
    })
}

/// For a chain `X → Y → Z`: `I[X:Y] ≥ I[X:Z]`.
pub fn check_data_processing(
    d: &DiscreteDistribution,
    x: &str,
    y: &str,
    z: &str,
) -> Result<InequalityCheck, InfoError> {
    let lhs = mutual_information(d, &[x], &[y], &[])?;
    let rhs = mutual_information(d, &[x], &[z], &[])?;
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - NEGATIVE_TOLERANCE,
    })
}

/// A graph drawn from the input distribution plus the master seed for the
/// nodes' private randomness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LicAtom {
    pub graph: Graph,
    pub seed: u64,
}

/// Input distribution for [`estimate_lic`]. Every atom has the same node
/// count; node `i` is internal index `i`.
pub trait LicSource: Sync {
    fn node_count(&self) -> usize;

    /// Every atom with its probability, if the distribution is enumerable.
    fn enumerate(&self) -> Option<Vec<(f64, LicAtom)>>;

    fn sample(&self, rng: &mut ChaCha8Rng) -> LicAtom;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LicMode {
    Exact,
    Sampled { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LicEstimate {
    /// Estimated `I[Π_i : G | X_i]` per node.
    pub per_node: Vec<f64>,
    pub sum: f64,
    /// Atoms (exact mode) or samples (sampled mode).
    pub trials: usize,
    /// Distinct graphs observed.
    pub graph_support: usize,
    /// Distinct `(Π_i, G, X_i)` triples observed per node.
    pub joint_support: Vec<usize>,
    pub mode: LicMode,
}

impl LicEstimate {
    pub fn caveat(&self) -> Option<&'static str> {
        matches!(self.mode, LicMode::Sampled { .. }).then_some(PLUG_IN_BIAS_NOTE)
    }
}

/// Canonical key of a labeled graph: IDs in index order, then sorted edges.
fn graph_key(g: &Graph) -> String {
    let mut s = String::new();
    for id in g.ids() {
        let _ = write!(s, "{id},");
    }
    s.push('|');
    let mut edges: Vec<(NodeId, NodeId)> = g.edges().into_iter().map(|e| g.id_key(e)).collect();
    edges.sort_unstable();
    for (a, b) in edges {
        let _ = write!(s, "{a}-{b},");
    }
    s
}

/// KT₁ input of a node: own ID and neighbor IDs.
fn input_key(k: &InitialKnowledge) -> String {
    let mut s = format!("{}:", k.id);
    for w in &k.neighbors {
        let _ = write!(s, "{w},");
    }
    s
}

struct Observation {
    weight: f64,
    graph: String,
    inputs: Vec<String>,
    transcripts: Vec<String>,
}

fn observe<P: NodeProgram>(
    atom: &LicAtom,
    weight: f64,
    n: usize,
    program: &P,
    config: &ModelConfig,
) -> Result<Observation, InfoError> {
    if atom.graph.node_count() != n {
        return Err(InfoError::NodeCount {
            expected: n,
            found: atom.graph.node_count(),
        });
    }
    let init = simulator::kt1_init(&atom.graph, atom.seed);
    let result = simulator::run(config, &atom.graph, program, &init)?;
    Ok(Observation {
        weight,
        graph: graph_key(&atom.graph),
        inputs: init.iter().map(input_key).collect(),
        transcripts: (0..n)
            .map(|v| simulator::collect_transcript_key(&result, v))
            .collect(),
    })
}

fn intern(codes: &mut HashMap<String, u64>, s: &str) -> u64 {
    let next = codes.len() as u64;
    *codes.entry(s.to_string()).or_insert(next)
}

/// Plug-in `I[Π_i : G | X_i]` for every node and their sum.
pub fn estimate_lic<S, P>(
    source: &S,
    program: &P,
    config: &ModelConfig,
    mode: LicMode,
    support_cap: usize,
    exec: Execution,
) -> Result<LicEstimate, InfoError>
where
    S: LicSource,
    P: NodeProgram + Sync,
{
    let n = source.node_count();
    let observations: Vec<Observation> = match mode {
        LicMode::Exact => {
            let atoms = source.enumerate().ok_or(InfoError::NotEnumerable)?;
            exec.map(&atoms, |(w, a)| observe(a, *w, n, program, config))
                .into_iter()
                .collect::<Result<_, _>>()?
        }
        LicMode::Sampled { trials, seed: s } => {
            let w = 1.0 / trials as f64;
            exec.map_range(trials, |i| {
                let mut rng = seed::rng_from(seed::derive(s, seed::TAG_TRIAL, i as u64));
                observe(&source.sample(&mut rng), w, n, program, config)
            })
            .into_iter()
            .collect::<Result<_, _>>()?
        }
    };
    let trials = observations.len();
    let total: f64 = observations.iter().map(|o| o.weight).sum();

    let mut graph_codes = HashMap::new();
    let graph_ids: Vec<u64> = observations
        .iter()
        .map(|o| intern(&mut graph_codes, &o.graph))
        .collect();
    let mut per_node = Vec::with_capacity(n);
    let mut joint_support = Vec::with_capacity(n);
    for v in 0..n {
        let (mut pi_codes, mut x_codes) = (HashMap::new(), HashMap::new());
        let mut joint: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        for (o, &g) in observations.iter().zip(&graph_ids) {
            let key = vec![
                intern(&mut pi_codes, &o.transcripts[v]),
                g,
                intern(&mut x_codes, &o.inputs[v]),
            ];
            *joint.entry(key).or_default() += o.weight / total;
            if joint.len() > support_cap {
                return Err(InfoError::SupportCap {
                    size: joint.len(),
                    cap: support_cap,
                });
            }
        }
        joint_support.push(joint.len());
        // Renormalize away accumulated rounding before validation.
        let mass: f64 = joint.values().sum();
        let d = DiscreteDistribution::new(
            &["PI", "G", "X"],
            joint.into_iter().map(|(k, p)| (k, p / mass)),
        )?;
        per_node.push(mutual_information(&d, &["PI"], &["G"], &["X"])?);
    }
    Ok(LicEstimate {
        sum: per_node.iter().sum(),
        per_node,
        trials,
        graph_support: graph_codes.len(),
        joint_support,
        mode,
    })
}

/// Three nodes with IDs 1, 2, 3: edge {1,2} always, edge {2,3} with
/// probability 1/2.
#[derive(Debug, Clone, Copy, Default)]
pub struct OneBitToy;

impl OneBitToy {
    fn atom(with_edge: bool) -> LicAtom {
        let mut edges = vec![(0, 1)];
        if with_edge {
            edges.push((1, 2));
        }
        LicAtom {
            graph: Graph::from_edges(3, &edges).expect("toy edges are simple"),
            seed: 0,
        }
    }
}

impl LicSource for OneBitToy {
    fn node_count(&self) -> usize {
        3
    }

    fn enumerate(&self) -> Option<Vec<(f64, LicAtom)>> {
        Some(vec![(0.5, Self::atom(false)), (0.5, Self::atom(true))])
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> LicAtom {
        use rand::Rng;
        Self::atom(rng.random::<bool>())
    }
}

/// Node 2 tells node 1 whether it is adjacent to node 3; everyone stops in
/// round 2.
#[derive(Debug, Clone, Copy, Default)]
pub struct OneBitSend;

impl NodeProgram for OneBitSend {
    type State = ();
    type Output = ();

    fn init(&self, _: &InitialKnowledge) {}

    fn on_round(&self, _: &mut (), ctx: &mut RoundContext<'_>) {
        let k = ctx.knowledge();
        if ctx.round() == 1 && k.id == NodeId(2) {
            ctx.send(NodeId(1), BitString::bit(k.is_neighbor(NodeId(3))));
        }
        if ctx.round() == 2 {
            ctx.terminate();
        }
    }

    fn output(&self, _: &()) {}
}

/// Unit-constant Ω-shapes, log base 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCurves {
    pub n: usize,
    pub t: u32,
    /// `(1/t²)·n^{1+1/(2t)}·log n`, information cost and asynchronous
    /// clique bits.
    pub lic: f64,
    /// `n^{1+1/(2t)} / (t²·log n)`, synchronous CONGEST / clique bits.
    pub congest_bits: f64,
    /// `n^{1/(2t)} / (t²·log⁴ n)`, node-congested clique rounds.
    pub node_clique_rounds: f64,
    /// `n^{1/(2t)} / (t²·log³ n)`, push-pull gossip rounds.
    pub gossip_rounds: f64,
    /// The trivial `n` line.
    pub trivial: f64,
    /// `t·m` with `m` the expected edge count of the lower-bound graph.
    pub upper_tm: f64,
}

impl BoundCurves {
    pub const CSV_HEADER: &'static str = "n,t,curve,value";

    /// `(curve id, value)` pairs in fixed order.
    pub fn rows(&self) -> [(&'static str, f64); 7] {
        [
            ("lic", self.lic),
            ("async-clique-bits", self.lic),
            ("congest-bits", self.congest_bits),
            ("node-clique-rounds", self.node_clique_rounds),
            ("gossip-rounds", self.gossip_rounds),
            ("trivial-n", self.trivial),
            ("upper-tm", self.upper_tm),
        ]
    }
}

/// Expected edge count of the lower-bound graph at `(n, t)`.
pub fn expected_edges(p: &LowerBoundParams) -> f64 {
    let half = p.half();
    let r = p.region_size;
    let full = half / r;
    let rest = half % r;
    let blue = (full * r * r + rest * rest) as f64;
    let pairs = (half * (half - 1) / 2) as f64;
    blue + pairs * p.red_prob
}

pub fn bound_curves(n: usize, t: u32) -> BoundCurves {
    let nf = n as f64;
    let tf = t as f64;
    let log = nf.log2();
    let n_half_t = nf.powf(1.0 / (2.0 * tf));
    let m = LowerBoundParams::derive(n, t)
        .map(|p| expected_edges(&p))
        .unwrap_or(f64::NAN);
    BoundCurves {
        n,
        t,
        lic: nf * n_half_t * log / (tf * tf),
        congest_bits: nf * n_half_t / (tf * tf * log),
        node_clique_rounds: n_half_t / (tf * tf * log.powi(4)),
        gossip_rounds: n_half_t / (tf * tf * log.powi(3)),
        trivial: nf,
        upper_tm: tf * m,
    }
}

/// Cost lower bounds implied by a given information cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferBounds {
    /// Asynchronous KT₁ bits: `LIC`.
    pub async_bits: f64,
    /// τ-round synchronous bits: `LIC / (log τ · log n)`.
    pub sync_bits: f64,
    /// Node-congested clique rounds: `LIC / (n log⁴ n)`.
    pub node_clique_rounds: f64,
    /// Gossip rounds: `LIC / (n log³ n)`.
    pub gossip_rounds: f64,
}

pub fn transfer_bounds(lic: f64, n: usize, tau: u64) -> TransferBounds {
    let nf = n as f64;
    let log = nf.log2();
    let log_tau = (tau.max(2) as f64).log2();
    TransferBounds {
        async_bits: lic,
        sync_bits: lic / (log_tau * log),
        node_clique_rounds: lic / (nf * log.powi(4)),
        gossip_rounds: lic / (nf * log.powi(3)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::Mode;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn bits2(table: &[((u64, u64), f64)]) -> DiscreteDistribution {
        DiscreteDistribution::new(
            &["X", "Y"],
            table.iter().map(|&((x, y), p)| (vec![x, y], p)),
        )
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let fair = DiscreteDistribution::new(&["X"], [(vec![0], 0.5), (vec![1], 0.5)]).unwrap();
        assert!(close(entropy(&fair, &["X"]).unwrap(), 1.0));
        let four = DiscreteDistribution::new(&["X"], (0..4).map(|i| (vec![i], 0.25))).unwrap();
        assert!(close(entropy(&four, &["X"]).unwrap(), 2.0));
        let skew =
            DiscreteDistribution::new(&["X"], [(vec![0], 0.5), (vec![1], 0.25), (vec![2], 0.25)])
                .unwrap();
        assert!(close(entropy(&skew, &["X"]).unwrap(), 1.5));
    }

    #[test]
    fn conditional_entropy_examples() {
        let indep = bits2(&[((0, 0), 0.25), ((0, 1), 0.25), ((1, 0), 0.25), ((1, 1), 0.25)]);
        assert!(close(conditional_entropy(&indep, &["X"], &["X"]).unwrap(), 0.0));
        assert!(close(conditional_entropy(&indep, &["X"], &["Y"]).unwrap(), 1.0));
        let copy = bits2(&[((0, 0), 0.25), ((1, 1), 0.25), ((2, 2), 0.25), ((3, 3), 0.25)]);
        assert!(close(conditional_entropy(&copy, &["X"], &["Y"]).unwrap(), 0.0));
    }

    #[test]
    fn mutual_information_examples() {
        let corr = bits2(&[((0, 0), 0.5), ((1, 1), 0.5)]);
        assert!(close(mutual_information(&corr, &["X"], &["Y"], &[]).unwrap(), 1.0));
        let indep = bits2(&[((0, 0), 0.25), ((0, 1), 0.25), ((1, 0), 0.25), ((1, 1), 0.25)]);
        assert_eq!(mutual_information(&indep, &["X"], &["Y"], &[]).unwrap(), 0.0);

        let xor = DiscreteDistribution::new(
            &["X", "Y", "Z"],
            (0..2).flat_map(|x| (0..2).map(move |z| (vec![x, x ^ z, z], 0.25))),
        )
        .unwrap();
        assert_eq!(mutual_information(&xor, &["X"], &["Y"], &[]).unwrap(), 0.0);
        assert_eq!(mutual_information(&xor, &["X"], &["Y"], &["Z"]).unwrap(), 1.0);
    }

    #[test]
    fn validation_and_errors() {
        assert!(DiscreteDistribution::new(&["X"], [(vec![0], 0.5)]).is_err());
        assert!(DiscreteDistribution::new(&["X"], [(vec![0], -0.5), (vec![1], 1.5)]).is_err());
        assert!(DiscreteDistribution::new(&["X", "X"], [(vec![0, 0], 1.0)]).is_err());
        let d = bits2(&[((0, 0), 1.0)]);
        assert!(matches!(entropy(&d, &["Q"]), Err(InfoError::UnknownVariable(_))));
        assert!(matches!(d.condition("X", 1), Err(InfoError::OutsideSupport { .. })));
    }

    #[test]
    fn parse_tabular_file() {
        let text = "# xor\nX Y Z p\n0 0 0 1/4\n0 1 1 1/4\n1 1 0 1/4\n1 0 1 0.25\n";
        let d = DiscreteDistribution::parse_table(text).unwrap();
        assert_eq!(d.vars(), &["X", "Y", "Z"]);
        assert_eq!(d.support_size(), 4);
        assert!(DiscreteDistribution::parse_table("X q\n0 1\n").is_err());
        assert!(DiscreteDistribution::parse_table("X p\n0 1/2\n").is_err());
    }

    #[test]
    fn conditioning_bound_with_constant_z1() {
        let d = DiscreteDistribution::new(
            &["X", "Y", "Z1", "Z2"],
            [
                (vec![0, 0, 7, 0], 0.3),
                (vec![1, 1, 7, 0], 0.2),
                (vec![0, 1, 7, 1], 0.1),
                (vec![1, 0, 7, 1], 0.4),
            ],
        )
        .unwrap();
        let c = check_conditioning_bound(&d, "X", "Y", "Z1", "Z2", 7).unwrap();
        assert!(close(c.lhs, c.rhs) && c.holds);
        assert!(check_conditioning_bound(&d, "X", "Y", "Z1", "Z2", 3).is_err());
    }

    #[test]
    fn data_processing_degenerate_cases() {
        let d = DiscreteDistribution::new(
            &["X", "Y", "Z", "C"],
            [
                (vec![0, 0, 0, 0], 0.4),
                (vec![0, 1, 1, 0], 0.1),
                (vec![1, 1, 1, 0], 0.5),
            ],
        )
        .unwrap();
        let same = check_data_processing(&d, "X", "Y", "Z").unwrap();
        assert!(close(same.lhs, same.rhs) && same.holds);
        let constant = check_data_processing(&d, "X", "Y", "C").unwrap();
        assert_eq!(constant.rhs, 0.0);
        assert!(constant.holds);
    }

    fn toy_config() -> ModelConfig {
        ModelConfig::new(Mode::CongestKT1, 3, 4).unwrap()
    }

    #[test]
    fn one_bit_toy_exact() {
        let e = estimate_lic(
            &OneBitToy,
            &OneBitSend,
            &toy_config(),
            LicMode::Exact,
            1000,
            Execution::Sequential,
        )
        .unwrap();
        assert!(close(e.per_node[0], 1.0));
        assert!(close(e.per_node[1], 0.0) && close(e.per_node[2], 0.0));
        assert!(close(e.sum, 1.0));
        assert_eq!(e.graph_support, 2);
        assert!(e.caveat().is_none());
    }

    #[test]
    fn one_bit_toy_sampled() {
        let e = estimate_lic(
            &OneBitToy,
            &OneBitSend,
            &toy_config(),
            LicMode::Sampled {
                trials: 20_000,
                seed: 3,
            },
            1000,
            Execution::Parallel,
        )
        .unwrap();
        assert!((e.per_node[0] - 1.0).abs() < 0.05);
        assert!(e.caveat().is_some());
    }

    struct Silent;
    impl NodeProgram for Silent {
        type State = ();
        type Output = ();
        fn init(&self, _: &InitialKnowledge) {}
        fn on_round(&self, _: &mut (), ctx: &mut RoundContext<'_>) {
            ctx.terminate();
        }
        fn output(&self, _: &()) {}
    }

    #[test]
    fn silent_protocol_and_support_cap() {
        let e = estimate_lic(
            &OneBitToy,
            &Silent,
            &toy_config(),
            LicMode::Exact,
            1000,
            Execution::Sequential,
        )
        .unwrap();
        assert!(e.per_node.iter().all(|&v| v == 0.0));
        assert!(matches!(
            estimate_lic(&OneBitToy, &OneBitSend, &toy_config(), LicMode::Exact, 1, Execution::Sequential),
            Err(InfoError::SupportCap { .. })
        ));
    }

    #[test]
    fn bound_curve_examples() {
        let c = bound_curves(4096, 2);
        assert!((c.lic - 98304.0).abs() < 1e-6);
        assert!((c.congest_bits - 32768.0 / 48.0).abs() < 1e-9);
        let mut prev = bound_curves(4096, 2);
        for t in 3..8 {
            let c = bound_curves(4096, t);
            assert!(c.lic < prev.lic);
            assert!(c.congest_bits < prev.congest_bits);
            assert!(c.node_clique_rounds < prev.node_clique_rounds);
            assert!(c.gossip_rounds < prev.gossip_rounds);
            prev = c;
        }
        let tb = transfer_bounds(1024.0, 1024, 1024);
        assert!(close(tb.sync_bits, 1024.0 / 100.0));
    }
}
