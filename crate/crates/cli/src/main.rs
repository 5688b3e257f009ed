use std::fs::{File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use edge_coloring::coloring::write_coloring;
use edge_coloring::fast::FastConfig;
use edge_coloring::harness::{bench, run, Algo, GraphSpec, RunConfig, RunMetrics, Suite};
use edge_coloring::Graph;

#[derive(Parser)]
#[command(name = "edgecolor", version, about = "Edge coloring with at most Δ+1 colors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Color one graph and verify the result.
    Color(ColorArgs),
    /// Run a benchmark suite and write one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ColorArgs {
    /// vizing, msqrtn, fast or slack.
    #[arg(long)]
    algo: Algo,
    /// Graph file: a `p edge <n> <m>` line, then `e <u> <v>` lines with 0-based ids.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    r#in: Option<PathBuf>,
    /// Generated graph as `kind,n,param`, e.g. `regular,4096,sqrt`.
    #[arg(long)]
    gen: Option<GraphSpec>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coloring output, one `u v color` line per edge.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV file to append one metrics row to.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Print the full metrics as JSON on stdout.
    #[arg(long)]
    stats: bool,
    /// Extra colors for `slack`.
    #[arg(long, default_value_t = 1)]
    slack_d: usize,
    /// Leaf degree for `msqrtn`; defaults to ⌈√n⌉.
    #[arg(long)]
    truncate_at: Option<usize>,
    #[command(flatten)]
    fast: FastFlags,
}

#[derive(Args)]
struct FastFlags {
    #[arg(long)]
    const_sample: Option<f64>,
    #[arg(long)]
    const_slack: Option<f64>,
    #[arg(long = "log-exp-L")]
    log_exp_l: Option<f64>,
    #[arg(long)]
    prep_threshold_c: Option<f64>,
    #[arg(long)]
    safety_cap_c: Option<f64>,
}

impl FastFlags {
    fn apply(&self, config: &mut FastConfig) {
        let fields = [
            (self.const_sample, &mut config.const_sample),
            (self.const_slack, &mut config.const_slack),
            (self.log_exp_l, &mut config.log_exp_l),
            (self.prep_threshold_c, &mut config.prep_threshold_c),
            (self.safety_cap_c, &mut config.safety_cap_c),
        ];
        for (flag, field) in fields {
            if let Some(v) = flag {
                *field = v;
            }
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// TOML suite file.
    #[arg(long)]
    suite: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

const METRICS_HEADER: &str =
    "algo,n,m,delta,seed,recolor_cost,wall_time_s,colors_used,palette_bound,uncolored,safety_cap_aborts,verified";

fn metrics_row(m: &RunMetrics) -> String {
    format!(
        "{},{},{},{},{},{},{:.6},{},{},{},{},{}",
        m.algo,
        m.n,
        m.m,
        m.delta,
        m.seed,
        m.recolor_cost,
        m.wall_time_s,
        m.colors_used,
        m.palette_bound,
        m.uncolored,
        m.safety_cap_aborts,
        m.verified
    )
}

fn color(args: ColorArgs) -> Result<bool> {
    let g = match (&args.r#in, &args.gen) {
        (Some(path), _) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            Graph::read_text(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?
        }
        (None, Some(spec)) => spec.generate(args.seed)?,
        (None, None) => bail!("one of --in or --gen is required"),
    };
    let mut config = RunConfig {
        slack_d: args.slack_d,
        truncate_at: args.truncate_at,
        ..RunConfig::default()
    };
    args.fast.apply(&mut config.fast);
    let (colors, metrics) = run(args.algo, &g, &config, args.seed)?;
    if let Some(path) = &args.out {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut out = BufWriter::new(file);
        write_coloring(&g, &colors, &mut out)?;
        out.flush()?;
    }
    if let Some(path) = &args.metrics {
        let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if fresh {
            writeln!(file, "{METRICS_HEADER}")?;
        }
        writeln!(file, "{}", metrics_row(&metrics))?;
    }
    if args.stats {
        println!("{}", serde_json::to_string_pretty(&metrics)?);
    } else {
        println!(
            "{} n={} m={} delta={} colors={} cost={} verified={}",
            metrics.algo, metrics.n, metrics.m, metrics.delta, metrics.colors_used, metrics.recolor_cost, metrics.verified
        );
    }
    Ok(metrics.verified)
}

fn bench_cmd(args: BenchArgs) -> Result<bool> {
    let suite = Suite::load(&args.suite).with_context(|| format!("loading {}", args.suite.display()))?;
    let metrics = bench(&suite, &args.out)?;
    let failed = metrics.iter().filter(|m| !m.verified).count();
    eprintln!("{} runs, {} failed verification", metrics.len(), failed);
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Color(args) => color(args),
        Command::Bench(args) => bench_cmd(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
