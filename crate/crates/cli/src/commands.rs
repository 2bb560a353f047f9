//! Subcommand bodies. Each returns its report text; `main` decides where it
//! goes.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use spanlab::graph_model::{read_instance, write_instance, Instance};
use spanlab::graph_model::{degree_report, sample_instance, LowerBoundParams};
use spanlab::infocost::{
    bound_curves, estimate_lic, BoundCurves, LicEstimate, LicMode, OneBitSend, OneBitToy,
};
use spanlab::simulator::{Mode, ModelConfig};
use spanlab::spanners::{
    cluster_3spanner_centralized, cluster_3spanner_distributed, cluster_3spanner_two_party,
    greedy_spanner, SpannerOutput, SpannerSummary,
};
use spanlab::time_encoding::{convergecast_demo, ConvergecastReport, SpanningTree};
use spanlab::traversal::{critical_edges_k, criticality_via_traversal, is_critical};
use spanlab::verify::stretch_check;
use spanlab::{Execution, Graph};

use crate::error::{read_file, CliError, Result};

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "SPANLAB_OUT_DIR";

/// Fixed float formatting for every CSV: six significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Greedy,
    Cluster3Central,
    Cluster3TwoParty,
    Cluster3Distributed,
    TimeencDemo,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Greedy,
        Algorithm::Cluster3Central,
        Algorithm::Cluster3TwoParty,
        Algorithm::Cluster3Distributed,
        Algorithm::TimeencDemo,
    ];

    fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Cluster3Central => "cluster3-central",
            Algorithm::Cluster3TwoParty => "cluster3-2party",
            Algorithm::Cluster3Distributed => "cluster3-distributed",
            Algorithm::TimeencDemo => "timeenc-demo",
        }
    }

    /// Modes the algorithm can execute in; empty for centralized ones.
    pub fn modes(self) -> &'static [Mode] {
        match self {
            Algorithm::Cluster3Distributed => &[Mode::CongestKT1, Mode::CongestedClique],
            Algorithm::TimeencDemo => &[Mode::CongestKT1],
            _ => &[],
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|a| a.name()).collect();
                format!("unknown algorithm {s:?} (expected one of {})", names.join(", "))
            })
    }
}

pub const MODES: [Mode; 4] = [
    Mode::CongestKT1,
    Mode::CongestedClique,
    Mode::NodeCongestedClique,
    Mode::GossipPushPull,
];

pub fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    MODES
        .into_iter()
        .find(|m| m.to_string() == s)
        .ok_or_else(|| {
            let names: Vec<String> = MODES.iter().map(Mode::to_string).collect();
            format!("unknown mode {s:?} (expected one of {})", names.join(", "))
        })
}

fn check_mode(alg: Algorithm, mode: Option<Mode>) -> Result<Option<Mode>> {
    let allowed = alg.modes();
    match mode {
        None => Ok(allowed.first().copied()),
        Some(m) if allowed.contains(&m) => Ok(Some(m)),
        Some(m) if allowed.is_empty() => Err(CliError::Usage(format!(
            "{alg} is centralized and has no {m} mode"
        ))),
        Some(m) => Err(CliError::Usage(format!("{alg} cannot run in {m} mode"))),
    }
}

// gen

pub fn default_instance_name(n: usize, t: u32, seed: u64) -> String {
    format!("instance_n{n}_t{t}_s{seed}.txt")
}

pub fn param_summary(p: &LowerBoundParams) -> String {
    format!(
        "n {}\nt {}\nk {}\nhalf {}\nregion_size {}\nregions {}\nred_prob {}\nexpected_red_degree {}\nid_space {}\n",
        p.n,
        p.t,
        p.k,
        p.half(),
        p.region_size,
        p.region_count(),
        sci(p.red_prob),
        sci(p.expected_red_degree),
        p.id_space
    )
}

/// Samples an instance; returns it with its file text.
pub fn generate(n: usize, t: u32, seed: u64, id_space: Option<u64>) -> Result<(Instance, String)> {
    let mut params = LowerBoundParams::derive(n, t).map_err(CliError::usage)?;
    if let Some(s) = id_space {
        params = params.with_id_space(s).map_err(CliError::usage)?;
    }
    let inst = Instance {
        graph: sample_instance(&params, seed),
        params: Some(params),
        seed: Some(seed),
    };
    let text = write_instance(&inst);
    Ok((inst, text))
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = read_file(path)?;
    read_instance(&text).map_err(|e| CliError::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

// run

#[derive(Debug, Clone, Copy)]
pub struct RunRequest {
    pub algorithm: Algorithm,
    pub mode: Option<Mode>,
    pub seed: u64,
    /// Overrides the instance's own `t` (needed for hand-built files).
    pub t: Option<u32>,
    pub bandwidth_multiplier: Option<u32>,
    pub exec: Execution,
}

#[derive(Debug, Clone)]
pub enum RunOutcome {
    Spanner {
        summary: SpannerSummary,
        output: SpannerOutput,
    },
    Convergecast(ConvergecastReport),
}

impl RunOutcome {
    pub fn csv(&self) -> String {
        match self {
            RunOutcome::Spanner { summary, .. } => {
                format!("{}\n{}\n", SpannerSummary::CSV_HEADER, summary.to_csv_row())
            }
            RunOutcome::Convergecast(r) => {
                format!("{}\n{}\n", ConvergecastReport::CSV_HEADER, r.to_csv_row())
            }
        }
    }

    /// Output edges as text, if the algorithm produces a spanner.
    pub fn edges_text(&self, g: &Graph) -> Option<String> {
        match self {
            RunOutcome::Spanner { output, .. } => Some(output.to_text(g)),
            RunOutcome::Convergecast(_) => None,
        }
    }

    pub fn stretch_ok(&self) -> bool {
        match self {
            RunOutcome::Spanner { summary, .. } => summary.stretch_ok,
            RunOutcome::Convergecast(r) => r.decode_ok,
        }
    }
}

fn instance_t(inst: &Instance, flag: Option<u32>) -> u32 {
    flag.or(inst.params.map(|p| p.t)).unwrap_or(2)
}

/// Executes one algorithm on an instance's underlying graph.
pub fn run_algorithm(inst: &Instance, req: &RunRequest) -> Result<RunOutcome> {
    let mode = check_mode(req.algorithm, req.mode)?;
    let g = inst.graph.to_graph();
    let n = g.node_count();
    let t = instance_t(inst, req.t);
    if t < 2 {
        return Err(CliError::Usage(format!("t must be at least 2, got {t}")));
    }
    let id_space = inst.graph.id_space();
    let (output, bits, rounds, k) = match req.algorithm {
        Algorithm::Greedy => {
            let k = 2 * t as usize - 1;
            (greedy_spanner(&g, k), None, None, k)
        }
        Algorithm::Cluster3Central => (cluster_3spanner_centralized(&g, req.seed), None, None, 3),
        Algorithm::Cluster3TwoParty => {
            let alice: Vec<usize> = (0..n / 2).collect();
            let bob: Vec<usize> = (n / 2..n).collect();
            let (out, bits) =
                cluster_3spanner_two_party(&g, &alice, &bob, req.seed).map_err(CliError::usage)?;
            (out, Some(bits), None, 3)
        }
        Algorithm::Cluster3Distributed => {
            let mut config = ModelConfig::new(mode.expect("mode checked"), id_space, 4)
                .map_err(CliError::usage)?;
            if let Some(m) = req.bandwidth_multiplier {
                config = config.with_bandwidth_multiplier(m).map_err(CliError::usage)?;
            }
            let (out, result) =
                cluster_3spanner_distributed(&g, &config, req.seed).map_err(CliError::usage)?;
            (out, Some(result.ledger.total), Some(result.rounds), 3)
        }
        Algorithm::TimeencDemo => {
            if n > 3 {
                return Err(CliError::Usage(format!(
                    "timeenc-demo enumerates all graphs and is limited to n <= 3, got n = {n}"
                )));
            }
            let tree = SpanningTree::bfs(&g, 0);
            let report = convergecast_demo(&g, &tree, id_space).map_err(CliError::usage)?;
            return Ok(RunOutcome::Convergecast(report));
        }
    };
    let stretch = stretch_check(&g, &output.edges, k, req.exec).expect("spanner is a subgraph");
    let summary = SpannerSummary {
        algorithm: req.algorithm.to_string(),
        n,
        size: output.len(),
        bits,
        rounds,
        stretch_ok: stretch.ok,
        fallback_count: output.fallback_count,
    };
    Ok(RunOutcome::Spanner { summary, output })
}

// critical

pub const CRITICAL_HEADER: &str = "id,red_degree,y,flag,oracle_agree";

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSummary {
    pub k: usize,
    pub red_edges: usize,
    pub critical_edges: usize,
    pub flagged_nodes: usize,
    pub oracle_agree: bool,
}

/// Per-node criticality CSV, restricted to U-nodes with red edges, plus a
/// final `total` row. Every red edge is also re-checked by the traversal
/// oracle.
pub fn critical_report(inst: &Instance, t: Option<u32>, exec: Execution) -> (String, CriticalSummary) {
    let g = &inst.graph;
    let k = 2 * instance_t(inst, t) as usize - 1;
    let report = critical_edges_k(g, k, exec);
    let red = g.red_edges();
    let agree = exec.map(&red, |&e| {
        is_critical(g, e, k).expect("red edge") == criticality_via_traversal(g, e, k).expect("red edge")
    });
    let mut node_agree = vec![true; g.half()];
    for (e, &ok) in red.iter().zip(&agree) {
        node_agree[e.a] &= ok;
        node_agree[e.b] &= ok;
    }
    let mut csv = format!("{CRITICAL_HEADER}\n");
    for u in 0..g.half() {
        if report.red_degrees[u] == 0 {
            continue;
        }
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            g.id(u),
            report.red_degrees[u],
            report.counts[u],
            u8::from(report.flags[u]),
            node_agree[u]
        );
    }
    let summary = CriticalSummary {
        k,
        red_edges: report.red_total,
        critical_edges: report.total,
        flagged_nodes: report.flags.iter().filter(|&&f| f).count(),
        oracle_agree: agree.iter().all(|&a| a),
    };
    let _ = writeln!(
        csv,
        "total,{},{},{},{}",
        summary.red_edges, summary.critical_edges, summary.flagged_nodes, summary.oracle_agree
    );
    (csv, summary)
}

// experiment

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: Vec<usize>,
    pub t: u32,
    /// Seeds `seed_start .. seed_start + seeds`.
    pub seeds: u64,
    pub seed_start: u64,
    pub algorithm: Algorithm,
    pub mode: Option<Mode>,
    pub bandwidth_multiplier: Option<u32>,
    /// Also compute critical-edge fractions per run.
    pub critical: bool,
    /// Fail unless at least this fraction of runs pass their check.
    pub min_pass_fraction: Option<f64>,
    pub exec: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: vec![64, 128, 256],
            t: 2,
            seeds: 10,
            seed_start: 0,
            algorithm: Algorithm::Greedy,
            mode: None,
            bandwidth_multiplier: None,
            critical: true,
            min_pass_fraction: None,
            exec: Execution::Parallel,
        }
    }
}

pub const EXPERIMENT_HEADER: &str = "kind,n,t,seed,algorithm,status,size,bits,rounds,stretch_ok,\
fallback_count,critical_fraction,mean_red_degree,max_red_degree,\
lic,congest_bits,node_clique_rounds,gossip_rounds,trivial_n,upper_tm";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub csv: String,
    pub runs: usize,
    pub failed: usize,
    /// Runs whose output passed its check (stretch or decode).
    pub passed: usize,
}

impl ExperimentOutput {
    /// Checks the run-completion and pass-fraction requirements.
    pub fn verdict(&self, min_pass_fraction: Option<f64>) -> Result<()> {
        if self.failed > 0 {
            return Err(CliError::Assertion(format!("{} of {} runs failed", self.failed, self.runs)));
        }
        if let Some(f) = min_pass_fraction {
            if (self.passed as f64) < f * self.runs as f64 {
                return Err(CliError::Assertion(format!(
                    "{} of {} runs passed, below the required fraction {f}",
                    self.passed, self.runs
                )));
            }
        }
        Ok(())
    }
}

struct Cell {
    row: String,
    ok: Option<bool>,
}

fn run_cell(cfg: &ExperimentConfig, n: usize, seed: u64) -> Cell {
    let dash = "-";
    let fail = |msg: String| Cell {
        row: format!(
            "run,{n},{},{seed},{},error: {},{}",
            cfg.t,
            cfg.algorithm,
            msg.replace([',', '\n'], ";"),
            [dash; 14].join(",")
        ),
        ok: None,
    };
    let (inst, _) = match generate(n, cfg.t, seed, None) {
        Ok(x) => x,
        Err(e) => return fail(e.to_string()),
    };
    let req = RunRequest {
        algorithm: cfg.algorithm,
        mode: cfg.mode,
        seed,
        t: Some(cfg.t),
        bandwidth_multiplier: cfg.bandwidth_multiplier,
        exec: Execution::Sequential,
    };
    let outcome = match run_algorithm(&inst, &req) {
        Ok(o) => o,
        Err(e) => return fail(e.to_string()),
    };
    let params = inst.params.expect("sampled instance");
    let degrees = degree_report(&inst.graph, &params);
    let critical = if cfg.critical {
        let r = critical_edges_k(&inst.graph, params.k as usize, Execution::Sequential);
        sci(r.critical_fraction())
    } else {
        dash.to_string()
    };
    let opt = |x: Option<u64>| x.map_or(dash.to_string(), |v| v.to_string());
    let (size, bits, rounds, fallback) = match &outcome {
        RunOutcome::Spanner { summary, .. } => (
            summary.size.to_string(),
            opt(summary.bits),
            opt(summary.rounds),
            summary.fallback_count.to_string(),
        ),
        RunOutcome::Convergecast(r) => (
            dash.to_string(),
            r.charged_bits.to_string(),
            r.simulated_rounds.to_string(),
            dash.to_string(),
        ),
    };
    Cell {
        row: format!(
            "run,{n},{},{seed},{},ok,{size},{bits},{rounds},{},{fallback},{critical},{},{},{}",
            cfg.t,
            cfg.algorithm,
            outcome.stretch_ok(),
            sci(degrees.mean),
            degrees.max,
            [dash; 6].join(",")
        ),
        ok: Some(outcome.stretch_ok()),
    }
}

fn curve_row(n: usize, c: &BoundCurves, alg: Algorithm) -> String {
    let dash = "-";
    format!(
        "curve,{n},{},-,{alg},ok,{},{},{},{},{},{},{}",
        c.t,
        [dash; 8].join(","),
        sci(c.lic),
        sci(c.congest_bits),
        sci(c.node_clique_rounds),
        sci(c.gossip_rounds),
        sci(c.trivial),
        sci(c.upper_tm)
    )
}

/// Runs the `n × seed` grid. Cells run under `cfg.exec`; rows come out in
/// config order (per `n`: its seeds ascending, then its bound-curve row).
pub fn experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    if cfg.n.is_empty() {
        return Err(CliError::Usage("experiment needs at least one n".into()));
    }
    if cfg.seeds == 0 {
        return Err(CliError::Usage("experiment needs at least one seed".into()));
    }
    check_mode(cfg.algorithm, cfg.mode)?;
    let grid: Vec<(usize, u64)> = cfg
        .n
        .iter()
        .flat_map(|&n| (0..cfg.seeds).map(move |i| (n, cfg.seed_start + i)))
        .collect();
    let cells = cfg.exec.map(&grid, |&(n, seed)| run_cell(cfg, n, seed));
    let mut csv = format!("{EXPERIMENT_HEADER}\n");
    let per_n = cfg.seeds as usize;
    for (i, &n) in cfg.n.iter().enumerate() {
        for c in &cells[i * per_n..(i + 1) * per_n] {
            csv.push_str(&c.row);
            csv.push('\n');
        }
        csv.push_str(&curve_row(n, &bound_curves(n, cfg.t), cfg.algorithm));
        csv.push('\n');
    }
    Ok(ExperimentOutput {
        csv,
        runs: cells.len(),
        failed: cells.iter().filter(|c| c.ok.is_none()).count(),
        passed: cells.iter().filter(|c| c.ok == Some(true)).count(),
    })
}

// curves

pub fn curves_csv(ns: &[usize], t: u32) -> String {
    let mut csv = format!("{}\n", BoundCurves::CSV_HEADER);
    for &n in ns {
        for (id, v) in bound_curves(n, t).rows() {
            let _ = writeln!(csv, "{n},{t},{id},{}", sci(v));
        }
    }
    csv
}

// lic-toy

pub const LIC_HEADER: &str = "mode,trials,node,value";

#[derive(Debug, Clone, PartialEq)]
pub struct LicToyReport {
    pub exact: LicEstimate,
    pub sampled: Option<LicEstimate>,
}

/// Information cost of the one-bit toy: node 2 tells node 1 whether it is
/// adjacent to node 3. The exact value is 1 bit at node 1.
pub fn lic_toy(trials: usize, seed: u64, exec: Execution) -> Result<LicToyReport> {
    let config = ModelConfig::new(Mode::CongestKT1, 3, 4).map_err(CliError::usage)?;
    let est = |mode| {
        estimate_lic(&OneBitToy, &OneBitSend, &config, mode, 1 << 20, exec).map_err(CliError::usage)
    };
    Ok(LicToyReport {
        exact: est(LicMode::Exact)?,
        sampled: if trials > 0 {
            Some(est(LicMode::Sampled { trials, seed })?)
        } else {
            None
        },
    })
}

impl LicToyReport {
    pub fn csv(&self) -> String {
        let mut csv = format!("{LIC_HEADER}\n");
        for (name, e) in [("exact", Some(&self.exact)), ("sampled", self.sampled.as_ref())] {
            let Some(e) = e else { continue };
            for (i, v) in e.per_node.iter().enumerate() {
                let _ = writeln!(csv, "{name},{},{},{}", e.trials, i + 1, sci(*v));
            }
            let _ = writeln!(csv, "{name},{},sum,{}", e.trials, sci(e.sum));
        }
        csv
    }

    /// The exact estimate must equal one bit.
    pub fn verdict(&self) -> Result<()> {
        let err = (self.exact.sum - 1.0).abs();
        if err > 1e-12 {
            return Err(CliError::Assertion(format!(
                "exact information cost {} differs from 1 bit",
                self.exact.sum
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_and_mode_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        for m in MODES {
            assert_eq!(parse_mode(&m.to_string()).unwrap(), m);
        }
        assert!("dijkstra".parse::<Algorithm>().is_err());
        assert!(parse_mode("local").is_err());
    }

    #[test]
    fn mode_mismatch_is_usage_error() {
        let e = check_mode(Algorithm::Greedy, Some(Mode::CongestKT1)).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(check_mode(Algorithm::Cluster3Distributed, Some(Mode::GossipPushPull)).is_err());
        assert_eq!(
            check_mode(Algorithm::Cluster3Distributed, None).unwrap(),
            Some(Mode::CongestKT1)
        );
    }

    #[test]
    fn sci_has_six_significant_digits() {
        assert_eq!(sci(5.997070312), "5.99707e0");
        assert_eq!(sci(20480.0), "2.04800e4");
    }

    #[test]
    fn gen_rejects_odd_n() {
        assert_eq!(generate(15, 2, 1, None).unwrap_err().exit_code(), 2);
    }
}
