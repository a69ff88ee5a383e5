use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dctplus::fast::plan_dctplus;
use dctplus::graph::{build_laplacian, GraphSpec, UpdateKind};
use dctplus::spectral::dense_eigh;
use dctplus::trig::{dct2, idct2};
use dctplus_bench::experiments::{
    accuracy_rows, prune_rows, run_accuracy, run_prune, run_runtime, runtime_rows,
};
use dctplus_bench::report::emit;
use dctplus_bench::{BenchConfig, Mode};
use std::io::Read;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "fastdctplus", version, about = "Fast DCT+ transforms and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean SNR of the fast transform against the dense oracle.
    Accuracy(ExperimentArgs),
    /// Per-transform runtime of DCT, fast DCT+ and NMVP.
    Runtime(ExperimentArgs),
    /// Pruned shared-DCT ensemble against direct computation.
    Prune(ExperimentArgs),
    /// Transform one signal read from a file or standard input.
    Transform(TransformArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Comma-separated graph sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    /// `selfloop:i:w` or `edge:i:j:w` (one-based vertices); repeatable.
    #[arg(long = "update")]
    updates: Vec<UpdateKind>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated keep counts for the pruning sweep.
    #[arg(long, value_delimiter = ',')]
    cp: Option<Vec<usize>>,
    /// Pruning threshold on the path quadratic form.
    #[arg(long)]
    threshold: Option<f64>,
    /// AR(1) correlation of the test signals.
    #[arg(long)]
    correlation: Option<f64>,
    /// Output CSV path (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn into_config(self, mode: Mode) -> BenchConfig {
        let mut c = BenchConfig::new(mode);
        if let Some(v) = self.sizes {
            c.sizes = v;
        }
        if let Some(v) = self.trials {
            c.trials = v;
        }
        if !self.updates.is_empty() {
            c.updates = self.updates;
        }
        if let Some(v) = self.eps {
            c.epsilon = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.cp {
            c.cp = v;
        }
        if let Some(v) = self.correlation {
            c.correlation = v;
        }
        c.threshold = self.threshold;
        c.out = self.out;
        c
    }
}

#[derive(Args)]
struct TransformArgs {
    /// Signal file; standard input when omitted.
    input: Option<PathBuf>,
    /// Rank-one update of the path graph.
    #[arg(long, conflicts_with = "graph")]
    update: Option<UpdateKind>,
    /// Graph description; a single change from the path uses the fast
    /// transform, anything else a dense eigendecomposition.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
    /// Apply the inverse transform instead.
    #[arg(long)]
    inverse: bool,
}

fn read_text(path: Option<&PathBuf>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        }
        None => {
            std::io::stdin().read_to_string(&mut text).context("reading standard input")?;
        }
    }
    Ok(text)
}

fn parse_signal(text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .enumerate()
        .map(|(i, t)| t.parse::<f64>().with_context(|| format!("value {} ('{t}') is not a number", i + 1)))
        .collect()
}

/// The single modification turning the path into `g`, if there is exactly one.
fn single_update(g: &GraphSpec) -> Result<Option<UpdateKind>> {
    let path = GraphSpec::path(g.n())?;
    let weight = |edges: &[(usize, usize, f64)], i: usize, j: usize| {
        edges.iter().filter(|e| e.0 == i && e.1 == j).map(|e| e.2).sum::<f64>()
    };
    let mut changes = Vec::new();
    let mut pairs: Vec<(usize, usize)> = g.edges().iter().chain(path.edges()).map(|e| (e.0, e.1)).collect();
    pairs.sort_unstable();
    pairs.dedup();
    for (i, j) in pairs {
        let d = weight(g.edges(), i, j) - weight(path.edges(), i, j);
        if d != 0.0 {
            changes.push(UpdateKind::edge(i, j, d));
        }
    }
    for &(i, w) in g.self_loops() {
        if w != 0.0 {
            changes.push(UpdateKind::self_loop(i, w));
        }
    }
    Ok(match changes.len() {
        0 => None,
        1 => Some(changes[0]),
        _ => bail!("graph differs from the path in {} places", changes.len()),
    })
}

fn transform(args: TransformArgs) -> Result<()> {
    let s = parse_signal(&read_text(args.input.as_ref())?)?;
    let n = s.len();
    if n < 2 {
        bail!("need at least 2 samples, got {n}");
    }
    let mut dense_graph = None;
    let update = match (&args.update, &args.graph) {
        (Some(u), _) => Some(*u),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let g: GraphSpec = text.parse().with_context(|| format!("parsing {}", path.display()))?;
            if g.n() != n {
                bail!("graph has {} vertices but the signal has {n} samples", g.n());
            }
            match single_update(&g) {
                Ok(u) => u,
                Err(_) => {
                    dense_graph = Some(g);
                    None
                }
            }
        }
        (None, None) => bail!("pass --update or --graph"),
    };
    let out = if let Some(g) = dense_graph {
        let basis = dense_eigh(&build_laplacian(&g)?)?;
        if args.inverse {
            basis.u.mul_vec(&s)?
        } else {
            basis.u.transpose_mul_vec(&s)?
        }
    } else if let Some(u) = update {
        let plan = plan_dctplus(n, &u.to_update(n)?, args.eps)?;
        if args.inverse {
            plan.inverse(&s)?
        } else {
            plan.forward(&s)?
        }
    } else if args.inverse {
        idct2(&s)?
    } else {
        dct2(&s)?
    };
    let line: Vec<String> = out.iter().map(|v| v.to_string()).collect();
    println!("{}", line.join(" "));
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Accuracy(a) => {
            let cfg = a.into_config(Mode::Accuracy);
            emit(cfg.out.as_deref(), &accuracy_rows(&run_accuracy(&cfg)?))?;
        }
        Command::Runtime(a) => {
            let cfg = a.into_config(Mode::Runtime);
            emit(cfg.out.as_deref(), &runtime_rows(&run_runtime(&cfg)?, &cfg.updates))?;
        }
        Command::Prune(a) => {
            let cfg = a.into_config(Mode::Prune);
            emit(cfg.out.as_deref(), &prune_rows(&run_prune(&cfg)?, &cfg.updates))?;
        }
        Command::Transform(t) => transform(t)?,
    }
    Ok(())
}
