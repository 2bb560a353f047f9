//! The colored lower-bound graph distribution.
//!
//! Nodes are split into `U` (internal indices `0..n/2`) and `V`
//! (`n/2..n`). Both halves are cut into consecutive regions of
//! `region_size` nodes; region `r` of `U` and region `r` of `V` form a
//! complete bipartite graph of blue edges. Red edges are an Erdős–Rényi
//! graph on `U`. IDs are a uniformly random permutation of the ID space
//! (or of a random `n`-subset of it when the space is larger than `n`).

mod io;

pub use io::{read_instance, write_instance, Instance};

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::exact;
use crate::graph::{Edge, Graph, NodeId};
use crate::seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("node count must be even, got {0}")]
    OddNodeCount(usize),
    #[error("node count must be at least 16, got {0}")]
    TooFewNodes(usize),
    #[error("stretch parameter t must be at least 2, got {0}")]
    StretchTooSmall(u32),
    #[error("id space {id_space} cannot hold {n} distinct ids")]
    IdSpaceTooSmall { n: usize, id_space: u64 },
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("red edge ({0}, {1}) must join two distinct U-side nodes")]
    InvalidRedEdge(usize, usize),
    #[error("red edge ({0}, {1}) already present")]
    DuplicateRedEdge(usize, usize),
    #[error("instance file line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Parameters of the distribution for a given `(n, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundParams {
    pub n: usize,
    pub t: u32,
    /// Stretch `2t − 1`.
    pub k: u32,
    /// `⌊n^{2/(k+1) + 1/(4k²)}⌋`.
    pub region_size: usize,
    /// `3 / (2·n^{1 − 1/(k+1)})`.
    pub red_prob: f64,
    /// `(n/2 − 1)·red_prob`.
    pub expected_red_degree: f64,
    pub id_space: u64,
}

impl LowerBoundParams {
    /// Derives all parameters for `n` nodes and stretch `2t − 1`.
    pub fn derive(n: usize, t: u32) -> Result<Self, ModelError> {
        if n % 2 == 1 {
            return Err(ModelError::OddNodeCount(n));
        }
        if n < 16 {
            return Err(ModelError::TooFewNodes(n));
        }
        if t < 2 {
            return Err(ModelError::StretchTooSmall(t));
        }
        let k = 2 * t - 1;
        let region_size = exact::floor_pow(n as u64, region_exponent(k)) as usize;
        let red_prob = red_probability(n, k);
        Ok(LowerBoundParams {
            n,
            t,
            k,
            region_size,
            red_prob,
            expected_red_degree: (n / 2 - 1) as f64 * red_prob,
            id_space: n as u64,
        })
    }

    pub fn with_id_space(mut self, id_space: u64) -> Result<Self, ModelError> {
        if id_space < self.n as u64 {
            return Err(ModelError::IdSpaceTooSmall {
                n: self.n,
                id_space,
            });
        }
        self.id_space = id_space;
        Ok(self)
    }

    pub fn half(&self) -> usize {
        self.n / 2
    }

    /// Number of regions per side (the last may be partial).
    pub fn region_count(&self) -> usize {
        self.half().div_ceil(self.region_size)
    }

    /// Binomial variance of a U-node's red degree.
    pub fn red_degree_variance(&self) -> f64 {
        (self.half() - 1) as f64 * self.red_prob * (1.0 - self.red_prob)
    }

    /// Range of red degrees for membership in `D`:
    /// `(3/4)n^{1/(k+1)} ± 3·n^{1/(2(k+1))}·√(ln n)`.
    pub fn d_range(&self) -> (f64, f64) {
        let n = self.n as f64;
        let k1 = (self.k + 1) as f64;
        let center = 0.75 * n.powf(1.0 / k1);
        let width = 3.0 * n.powf(1.0 / (2.0 * k1)) * n.ln().sqrt();
        (center - width, center + width)
    }

    /// Threshold on `Y_i` for the event `I_{Y_i} = 1`: `(1/16)·n^{1/(k+1)}`.
    pub fn critical_count_threshold(&self) -> f64 {
        (self.n as f64).powf(1.0 / (self.k + 1) as f64) / 16.0
    }
}

/// `2/(k+1) + 1/(4k²)`.
pub fn region_exponent(k: u32) -> Rational64 {
    let k = k as i64;
    exact::rational(2, k + 1) + exact::rational(1, 4 * k * k)
}

fn red_probability(n: usize, k: u32) -> f64 {
    let exp = exact::rational(k as i64, k as i64 + 1);
    let denom = match exact::exact_pow(n as u64, exp) {
        Some(r) => r as f64,
        None => (n as f64).powf(exact::ratio_to_f64(exp)),
    };
    3.0 / (2.0 * denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    U,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Blue,
    Red,
}

impl Color {
    pub fn symbol(self) -> char {
        match self {
            Color::Blue => 'B',
            Color::Red => 'R',
        }
    }
}

/// A colored instance. Blue edges are implied by the layout; red edges are
/// stored explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    half: usize,
    region_size: usize,
    ids: Vec<NodeId>,
    id_space: u64,
    blue: Vec<Vec<usize>>,
    red: Vec<Vec<usize>>,
}

impl ColoredGraph {
    /// Builds the blue skeleton: `half` nodes per side, consecutive regions of
    /// `region_size`, complete bipartite inside each region. No red edges.
    pub fn from_layout(
        half: usize,
        region_size: usize,
        ids: Vec<NodeId>,
        id_space: u64,
    ) -> Result<Self, ModelError> {
        if half == 0 || region_size == 0 {
            return Err(ModelError::InvalidLayout(
                "half and region size must be positive".into(),
            ));
        }
        if ids.len() != 2 * half {
            return Err(ModelError::InvalidLayout(format!(
                "expected {} ids, got {}",
                2 * half,
                ids.len()
            )));
        }
        let mut sorted: Vec<u64> = ids.iter().map(|i| i.0).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(ModelError::InvalidLayout("duplicate ids".into()));
        }
        if sorted[0] < 1 || *sorted.last().unwrap() > id_space {
            return Err(ModelError::InvalidLayout(format!(
                "ids must lie in [1, {id_space}]"
            )));
        }
        let n = 2 * half;
        let mut blue = vec![Vec::new(); n];
        for u in 0..half {
            let r = u / region_size;
            let lo = r * region_size;
            let hi = ((r + 1) * region_size).min(half);
            blue[u] = (half + lo..half + hi).collect();
            for v in half + lo..half + hi {
                blue[v].push(u);
            }
        }
        Ok(ColoredGraph {
            half,
            region_size,
            ids,
            id_space,
            blue,
            red: vec![Vec::new(); n],
        })
    }

    pub fn add_red_edge(&mut self, a: usize, b: usize) -> Result<(), ModelError> {
        if a == b || a >= self.half || b >= self.half {
            return Err(ModelError::InvalidRedEdge(a, b));
        }
        match self.red[a].binary_search(&b) {
            Ok(_) => return Err(ModelError::DuplicateRedEdge(a, b)),
            Err(p) => self.red[a].insert(p, b),
        }
        let p = self.red[b].binary_search(&a).unwrap_err();
        self.red[b].insert(p, a);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        2 * self.half
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn region_size(&self) -> usize {
        self.region_size
    }

    pub fn id_space(&self) -> u64 {
        self.id_space
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> NodeId {
        self.ids[v]
    }

    pub fn side(&self, v: usize) -> Side {
        if v < self.half {
            Side::U
        } else {
            Side::V
        }
    }

    /// Region index `P(v)`.
    pub fn region(&self, v: usize) -> usize {
        match self.side(v) {
            Side::U => v / self.region_size,
            Side::V => (v - self.half) / self.region_size,
        }
    }

    pub fn neighbors(&self, v: usize, color: Color) -> &[usize] {
        match color {
            Color::Blue => &self.blue[v],
            Color::Red => &self.red[v],
        }
    }

    pub fn all_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.blue[v].iter().chain(self.red[v].iter()).copied()
    }

    pub fn red_degree(&self, v: usize) -> usize {
        self.red[v].len()
    }

    pub fn blue_degree(&self, v: usize) -> usize {
        self.blue[v].len()
    }

    pub fn edge_color(&self, a: usize, b: usize) -> Option<Color> {
        if a >= self.node_count() || b >= self.node_count() {
            return None;
        }
        if self.red[a].binary_search(&b).is_ok() {
            Some(Color::Red)
        } else if self.blue[a].binary_search(&b).is_ok() {
            Some(Color::Blue)
        } else {
            None
        }
    }

    pub fn red_edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for a in 0..self.half {
            for &b in self.red[a].iter().filter(|&&b| b > a) {
                out.push(Edge { a, b });
            }
        }
        out
    }

    pub fn red_edge_count(&self) -> usize {
        self.red.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn blue_edge_count(&self) -> usize {
        self.blue[..self.half].iter().map(Vec::len).sum()
    }

    /// The uncolored graph with the same indices and IDs.
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new(self.ids.clone()).expect("ids validated at construction");
        for u in 0..self.half {
            for &v in &self.blue[u] {
                g.add_edge(u, v).expect("blue edges are simple");
            }
        }
        for e in self.red_edges() {
            g.add_edge(e.a, e.b).expect("red edges are simple");
        }
        g
    }

    /// Copy with every ID mapped through `f`. Used to compare structures up to
    /// relabeling.
    pub fn relabeled<F: Fn(NodeId) -> NodeId>(&self, f: F) -> ColoredGraph {
        let mut g = self.clone();
        g.ids = self.ids.iter().map(|&i| f(i)).collect();
        g
    }
}

/// Independent sub-seeds for red edges and the ID assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSeeds {
    pub edges: u64,
    pub ids: u64,
}

impl SampleSeeds {
    /// Fixed split of a master seed.
    pub fn split(master: u64) -> Self {
        SampleSeeds {
            edges: seed::derive(master, seed::TAG_EDGES, 0),
            ids: seed::derive(master, seed::TAG_IDS, 0),
        }
    }
}

/// Samples an instance; deterministic in `(params, master_seed)`.
pub fn sample_instance(params: &LowerBoundParams, master_seed: u64) -> ColoredGraph {
    sample_with_seeds(params, SampleSeeds::split(master_seed))
}

pub fn sample_with_seeds(params: &LowerBoundParams, seeds: SampleSeeds) -> ColoredGraph {
    let ids = sample_ids(params.n, params.id_space, seeds.ids);
    let mut g = ColoredGraph::from_layout(params.half(), params.region_size, ids, params.id_space)
        .expect("derived params give a valid layout");
    let mut rng = seed::rng_from(seeds.edges);
    for (a, b) in sample_pairs(params.half(), params.red_prob, &mut rng) {
        g.add_red_edge(a, b).expect("each pair is visited once");
    }
    g
}

fn sample_ids(n: usize, id_space: u64, id_seed: u64) -> Vec<NodeId> {
    let mut rng = seed::rng_from(id_seed);
    let mut ids: Vec<u64> = if id_space == n as u64 {
        (1..=id_space).collect()
    } else {
        let mut chosen: Vec<u64> = rand::seq::index::sample(&mut rng, id_space as usize, n)
            .into_iter()
            .map(|i| i as u64 + 1)
            .collect();
        chosen.sort_unstable();
        chosen
    };
    ids.shuffle(&mut rng);
    ids.into_iter().map(NodeId).collect()
}

/// Bernoulli(`p`) selection of unordered pairs `a < b < m` in lexicographic
/// order, by geometric gap skipping.
fn sample_pairs<R: Rng>(m: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if m < 2 || p <= 0.0 {
        return out;
    }
    let total = (m * (m - 1) / 2) as u64;
    if p >= 1.0 {
        for a in 0..m {
            for b in a + 1..m {
                out.push((a, b));
            }
        }
        return out;
    }
    let log_q = (1.0 - p).ln();
    // Row a holds pairs (a, a+1..m); row_start is the flat index of (a, a+1).
    let (mut a, mut row_start) = (0usize, 0u64);
    let mut pos: u64 = 0;
    let mut first = true;
    loop {
        let r: f64 = rng.random();
        let gap = ((1.0 - r).ln() / log_q).floor();
        if !gap.is_finite() || gap >= (total - pos) as f64 {
            break;
        }
        pos += gap as u64 + if first { 0 } else { 1 };
        first = false;
        if pos >= total {
            break;
        }
        while pos >= row_start + (m - 1 - a) as u64 {
            row_start += (m - 1 - a) as u64;
            a += 1;
        }
        out.push((a, a + 1 + (pos - row_start) as usize));
    }
    out
}

/// Red-degree statistics and `D`-membership.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    /// Red degree per U-node (index = internal index).
    pub red_degrees: Vec<usize>,
    pub mean: f64,
    pub min: usize,
    pub max: usize,
    pub d_range: (f64, f64),
    pub in_d: Vec<bool>,
    /// The event `I_D = 1`.
    pub all_in_d: bool,
}

pub fn degree_report(g: &ColoredGraph, params: &LowerBoundParams) -> DegreeReport {
    let red_degrees: Vec<usize> = (0..g.half()).map(|u| g.red_degree(u)).collect();
    let total: usize = red_degrees.iter().sum();
    let d_range = params.d_range();
    let in_d: Vec<bool> = red_degrees
        .iter()
        .map(|&d| (d as f64) >= d_range.0 && (d as f64) <= d_range.1)
        .collect();
    DegreeReport {
        mean: total as f64 / red_degrees.len() as f64,
        min: red_degrees.iter().copied().min().unwrap_or(0),
        max: red_degrees.iter().copied().max().unwrap_or(0),
        all_in_d: in_d.iter().all(|&f| f),
        d_range,
        in_d,
        red_degrees,
    }
}
