use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spanlab::simulator::Mode;
use spanlab::Execution;
use spanlab_cli::checks::{self, Scale};
use spanlab_cli::commands::{
    self, critical_report, curves_csv, default_instance_name, experiment, generate,
    load_instance, param_summary, run_algorithm, Algorithm, ExperimentConfig, RunRequest,
    OUT_DIR_ENV,
};
use spanlab_cli::config::{parse_list, resolve, resolve_opt, ConfigFile};
use spanlab_cli::error::write_file;
use spanlab_cli::{CliError, Result};

/// Lower-bound instances, spanner runs and information-cost reports.
///
/// Exit codes: 0 ok, 1 assertion failure, 2 usage error, 3 I/O error.
#[derive(Debug, Parser)]
#[command(name = "spanlab", version)]
struct Cli {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Default directory for output files.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
    /// Run grids and per-edge checks on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a lower-bound instance and write it to a file.
    Gen(GenArgs),
    /// Run an algorithm on an instance file.
    Run(RunArgs),
    /// Per-node critical-edge report with an oracle cross-check.
    Critical(CriticalArgs),
    /// Batch runs over an n × seed grid with bound-curve rows.
    Experiment(ExperimentArgs),
    /// Lower-bound curve values.
    Curves(CurvesArgs),
    /// Information cost of the one-bit toy protocol.
    LicToy(LicToyArgs),
    /// Run the invariant suite.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Node count (even, at least 16).
    #[arg(long)]
    n: Option<usize>,
    /// Stretch parameter; the instance targets stretch 2t − 1 [default: 2].
    #[arg(long)]
    t: Option<u32>,
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// ID space size [default: n].
    #[arg(long)]
    id_space: Option<u64>,
    /// Output file [default: <out-dir>/instance_n<N>_t<T>_s<SEED>.txt].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Instance file written by `gen`.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// greedy | cluster3-central | cluster3-2party | cluster3-distributed | timeenc-demo
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Simulator mode for distributed algorithms [default: congest-kt1].
    #[arg(long, value_parser = commands::parse_mode)]
    mode: Option<Mode>,
    /// Algorithm seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the instance's t.
    #[arg(long)]
    t: Option<u32>,
    /// Link bandwidth in units of ⌈log₂ id_space⌉ [default: 2].
    #[arg(long)]
    bandwidth_multiplier: Option<u32>,
}

#[derive(Debug, Args)]
struct CriticalArgs {
    /// Instance file written by `gen`.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Overrides the instance's t.
    #[arg(long)]
    t: Option<u32>,
    /// Output file [default: <out-dir>/<command>.csv, else stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Comma-separated node counts [default: 64,128,256].
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Stretch parameter [default: 2].
    #[arg(long)]
    t: Option<u32>,
    /// Seeds per n [default: 10].
    #[arg(long)]
    seeds: Option<u64>,
    /// First seed [default: 0].
    #[arg(long)]
    seed_start: Option<u64>,
    /// Algorithm for every run [default: greedy].
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Simulator mode for distributed algorithms.
    #[arg(long, value_parser = commands::parse_mode)]
    mode: Option<Mode>,
    /// Link bandwidth in units of ⌈log₂ id_space⌉ [default: 2].
    #[arg(long)]
    bandwidth_multiplier: Option<u32>,
    /// Compute critical-edge fractions [default: true].
    #[arg(long)]
    critical: Option<bool>,
    /// Exit 1 unless at least this fraction of runs pass their check.
    #[arg(long)]
    min_pass_fraction: Option<f64>,
    /// Output file [default: <out-dir>/<command>.csv, else stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurvesArgs {
    /// Comma-separated node counts [default: 64,128,256,512,1024,2048,4096].
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Stretch parameter [default: 2].
    #[arg(long)]
    t: Option<u32>,
    /// Output file [default: <out-dir>/<command>.csv, else stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LicToyArgs {
    /// Samples for the sampled estimate; 0 skips it [default: 100000].
    #[arg(long)]
    trials: Option<usize>,
    /// Sampling seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Output file [default: <out-dir>/<command>.csv, else stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Use the acceptance-size grids.
    #[arg(long)]
    full: bool,
    /// Comma-separated criterion numbers [default: all].
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<u8>>,
}

struct Ctx {
    file: ConfigFile,
    out_dir: Option<PathBuf>,
    exec: Execution,
}

impl Ctx {
    fn known(&self, keys: &[&str]) -> Result<()> {
        let mut all = vec!["out_dir"];
        all.extend_from_slice(keys);
        self.file.ensure_known(&all)
    }

    fn out_dir(&self) -> Result<Option<PathBuf>> {
        resolve_opt(self.out_dir.clone(), &self.file, "out_dir")
    }

    /// Writes to `--out`, else to `<out-dir>/<default>`, else to stdout.
    fn emit(&self, out: Option<PathBuf>, default_name: &str, text: &str) -> Result<()> {
        let target = match resolve_opt(out, &self.file, "out")? {
            Some(p) => Some(p),
            None => self.out_dir()?.map(|d| d.join(default_name)),
        };
        match target {
            Some(p) => {
                write_file(&p, text)?;
                eprintln!("wrote {}", p.display());
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("missing --{flag} (flag or config key)")))
}

fn gen(ctx: &Ctx, a: GenArgs) -> Result<()> {
    ctx.known(&["n", "t", "seed", "id_space", "out"])?;
    let f = &ctx.file;
    let n = required(resolve_opt(a.n, f, "n")?, "n")?;
    let t = resolve(a.t, f, "t", 2)?;
    let seed = resolve(a.seed, f, "seed", 0)?;
    let id_space = resolve_opt(a.id_space, f, "id_space")?;
    let (inst, text) = generate(n, t, seed, id_space)?;
    let path = match resolve_opt(a.out, f, "out")? {
        Some(p) => p,
        None => ctx
            .out_dir()?
            .unwrap_or_else(|| PathBuf::from("."))
            .join(default_instance_name(n, t, seed)),
    };
    write_file(&path, &text)?;
    print!("{}", param_summary(&inst.params.expect("sampled instance")));
    println!("seed {seed}\nred_edges {}\nwrote {}", inst.graph.red_edge_count(), path.display());
    Ok(())
}

fn run(ctx: &Ctx, a: RunArgs) -> Result<()> {
    ctx.known(&["instance", "algorithm", "mode", "seed", "t", "bandwidth_multiplier"])?;
    let f = &ctx.file;
    let path = required(resolve_opt(a.instance, f, "instance")?, "instance")?;
    let mode = match a.mode {
        Some(m) => Some(m),
        None => f.raw("mode").map(commands::parse_mode).transpose().map_err(CliError::Usage)?,
    };
    let req = RunRequest {
        algorithm: required(resolve_opt(a.algorithm, f, "algorithm")?, "algorithm")?,
        mode,
        seed: resolve(a.seed, f, "seed", 0)?,
        t: resolve_opt(a.t, f, "t")?,
        bandwidth_multiplier: resolve_opt(a.bandwidth_multiplier, f, "bandwidth_multiplier")?,
        exec: ctx.exec,
    };
    let inst = load_instance(&path)?;
    let outcome = run_algorithm(&inst, &req)?;
    let csv = outcome.csv();
    print!("{csv}");
    let dir = match ctx.out_dir()? {
        Some(d) => d,
        None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let stem = path.file_stem().map_or("instance".into(), |s| s.to_string_lossy().into_owned());
    let base = format!("{stem}.{}", req.algorithm);
    write_file(&dir.join(format!("{base}.summary.csv")), &csv)?;
    if let Some(edges) = outcome.edges_text(&inst.graph.to_graph()) {
        let p = dir.join(format!("{base}.edges"));
        write_file(&p, &edges)?;
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn critical(ctx: &Ctx, a: CriticalArgs) -> Result<()> {
    ctx.known(&["instance", "t", "out"])?;
    let f = &ctx.file;
    let path = required(resolve_opt(a.instance, f, "instance")?, "instance")?;
    let inst = load_instance(&path)?;
    let (csv, summary) = critical_report(&inst, resolve_opt(a.t, f, "t")?, ctx.exec);
    ctx.emit(a.out, "critical.csv", &csv)?;
    if !summary.oracle_agree {
        return Err(CliError::Assertion("traversal oracle disagrees with BFS criticality".into()));
    }
    Ok(())
}

fn run_experiment(ctx: &Ctx, a: ExperimentArgs) -> Result<()> {
    ctx.known(&[
        "n",
        "t",
        "seeds",
        "seed_start",
        "algorithm",
        "mode",
        "bandwidth_multiplier",
        "critical",
        "min_pass_fraction",
        "out",
    ])?;
    let f = &ctx.file;
    let d = ExperimentConfig::default();
    let n = match a.n {
        Some(v) => v,
        None => f.get_list("n")?.unwrap_or(d.n),
    };
    let mode = match a.mode {
        Some(m) => Some(m),
        None => f.raw("mode").map(commands::parse_mode).transpose().map_err(CliError::Usage)?,
    };
    let cfg = ExperimentConfig {
        n,
        t: resolve(a.t, f, "t", d.t)?,
        seeds: resolve(a.seeds, f, "seeds", d.seeds)?,
        seed_start: resolve(a.seed_start, f, "seed_start", d.seed_start)?,
        algorithm: resolve(a.algorithm, f, "algorithm", d.algorithm)?,
        mode,
        bandwidth_multiplier: resolve_opt(a.bandwidth_multiplier, f, "bandwidth_multiplier")?,
        critical: resolve(a.critical, f, "critical", d.critical)?,
        min_pass_fraction: resolve_opt(a.min_pass_fraction, f, "min_pass_fraction")?,
        exec: ctx.exec,
    };
    let out = experiment(&cfg)?;
    ctx.emit(a.out, "experiment.csv", &out.csv)?;
    eprintln!("{} runs, {} failed, {} passed their check", out.runs, out.failed, out.passed);
    out.verdict(cfg.min_pass_fraction)
}

fn curves(ctx: &Ctx, a: CurvesArgs) -> Result<()> {
    ctx.known(&["n", "t", "out"])?;
    let f = &ctx.file;
    let n = match a.n {
        Some(v) => v,
        None => match f.raw("n") {
            Some(v) => parse_list("n", v)?,
            None => vec![64, 128, 256, 512, 1024, 2048, 4096],
        },
    };
    let t = resolve(a.t, f, "t", 2)?;
    if t < 1 {
        return Err(CliError::Usage("t must be positive".into()));
    }
    ctx.emit(a.out, "curves.csv", &curves_csv(&n, t))
}

fn lic_toy(ctx: &Ctx, a: LicToyArgs) -> Result<()> {
    ctx.known(&["trials", "seed", "out"])?;
    let f = &ctx.file;
    let trials = resolve(a.trials, f, "trials", 100_000)?;
    let seed = resolve(a.seed, f, "seed", 0)?;
    let report = commands::lic_toy(trials, seed, ctx.exec)?;
    ctx.emit(a.out, "lic_toy.csv", &report.csv())?;
    if let Some(note) = report.sampled.as_ref().and_then(|s| s.caveat()) {
        eprintln!("note: {note}");
    }
    report.verdict()
}

fn check(ctx: &Ctx, a: CheckArgs) -> Result<()> {
    ctx.known(&[])?;
    let scale = if a.full { Scale::Full } else { Scale::Quick };
    let mut failed = Vec::new();
    for (i, f) in checks::ALL.iter().enumerate() {
        let id = i as u8 + 1;
        if a.only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let outcome = f(scale);
        println!("{}", outcome.line());
        if !outcome.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(format!("criteria {failed:?} failed")))
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let ctx = Ctx {
        file,
        out_dir: cli.out_dir,
        exec: if cli.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    match cli.command {
        Command::Gen(a) => gen(&ctx, a),
        Command::Run(a) => run(&ctx, a),
        Command::Critical(a) => critical(&ctx, a),
        Command::Experiment(a) => run_experiment(&ctx, a),
        Command::Curves(a) => curves(&ctx, a),
        Command::LicToy(a) => lic_toy(&ctx, a),
        Command::Check(a) => check(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
