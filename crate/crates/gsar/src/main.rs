use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use gsar::config::ExperimentConfig;
use gsar::experiment::{read_results, run_experiment};
use gsar::formats::{read_skeleton, write_trace};
use gsar::plot::{plot_csv, Figure};
use gsar::ply::read_ply;
use gsar_core::metrics::{p2point, psnr_y};
use gsar_core::rotation::Vec3;
use gsar_core::semantics::{absr_weights, ABSR_ALPHA};
use gsar_core::skeleton::{SkeletonGraph, HUMANOID_JOINT_NAMES};
use gsar_core::trace::{gen_trace, TraceKind};

#[derive(Parser)]
#[command(
    name = "gsar",
    version,
    about = "Skeleton-driven avatar transmission simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an SNR sweep and write results.csv and summary.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Overrides the master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Geometry and colour fidelity of a received cloud.
    Metrics {
        #[arg(long)]
        tx: PathBuf,
        #[arg(long)]
        rx: PathBuf,
    },
    /// Importance weights of skeleton joints, highest first.
    Rank {
        #[arg(long)]
        skeleton: Option<PathBuf>,
        #[arg(long, default_value_t = ABSR_ALPHA)]
        alpha: f64,
    },
    /// Animation traces.
    Trace {
        #[command(subcommand)]
        command: TraceCommand,
    },
    /// Plot-ready table for one figure.
    Plot {
        #[arg(long)]
        results: PathBuf,
        /// adjacent-mpjpe, mpjpe, p2point, psnr-y or latency.
        #[arg(long)]
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TraceCommand {
    /// Generate a procedural dance trace as JSON.
    Gen {
        /// upper-body, slight-shaking or full-body.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        frames: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 60.0)]
        fps: f64,
        #[arg(long)]
        skeleton: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn skeleton_or_default(path: Option<&Path>) -> anyhow::Result<SkeletonGraph> {
    Ok(match path {
        Some(p) => read_skeleton(p).with_context(|| format!("reading skeleton {}", p.display()))?,
        None => SkeletonGraph::humanoid(Vec3::new(0.0, 1.0, 0.0)),
    })
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn simulate(config: &Path, out: &Path, seed: Option<u64>) -> anyhow::Result<()> {
    let mut cfg = ExperimentConfig::load(config)
        .with_context(|| format!("loading config {}", config.display()))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let results = run_experiment(cfg)?;
    let (csv, json) = results.save(out)?;
    let summary = results.summary();
    println!(
        "{:<11} {:>7} {:>10} {:>10} {:>8} {:>12}",
        "framework", "snr_db", "mpjpe", "p2point", "psnr_y", "latency_s"
    );
    for c in &summary.cells {
        let m = |v: Option<gsar::experiment::MeanStd>| v.map_or(f64::NAN, |x| x.mean);
        println!(
            "{:<11} {:>7} {:>10.5} {:>10.5} {:>8.2} {:>12.6}",
            c.framework,
            c.snr_db,
            m(c.mpjpe),
            m(c.p2point),
            m(c.psnr_y),
            m(c.latency)
        );
    }
    if !results.failures.is_empty() {
        eprintln!(
            "warning: {} frames failed, see {}",
            results.failures.len(),
            json.display()
        );
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match run(Cli::parse()) {
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            Ok(())
        }
        r => r,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { config, out, seed } => simulate(&config, &out, seed),
        Command::Metrics { tx, rx } => {
            let tx = read_ply(&tx).with_context(|| format!("reading {}", tx.display()))?;
            let rx = read_ply(&rx).with_context(|| format!("reading {}", rx.display()))?;
            emit(
                &format!(
                    "p2point {}\npsnr_y {}\n",
                    p2point(&tx, &rx)?,
                    psnr_y(&tx, &rx)?
                ),
                None,
            )
        }
        Command::Rank { skeleton, alpha } => {
            let graph = skeleton_or_default(skeleton.as_deref())?;
            let w = absr_weights(&graph, alpha, 1e-12, 100_000)?;
            let named = skeleton.is_none();
            let mut text = String::from("rank,node,name,weight\n");
            for (rank, node) in w.ranking().into_iter().enumerate() {
                let name = if named {
                    HUMANOID_JOINT_NAMES[node]
                } else {
                    ""
                };
                text.push_str(&format!("{},{},{},{}\n", rank + 1, node, name, w.0[node]));
            }
            emit(&text, None)
        }
        Command::Trace {
            command:
                TraceCommand::Gen {
                    kind,
                    frames,
                    seed,
                    fps,
                    skeleton,
                    out,
                },
        } => {
            let kind: TraceKind = kind.parse()?;
            let graph = skeleton_or_default(skeleton.as_deref())?;
            let trace = gen_trace(&graph, kind, frames, seed, fps)?;
            match out {
                Some(p) => {
                    write_trace(&trace, &p).with_context(|| format!("writing {}", p.display()))?
                }
                None => {
                    let mut s =
                        serde_json::to_string_pretty(&gsar::formats::TraceFile::from(&trace))?;
                    s.push('\n');
                    emit(&s, None)?;
                }
            }
            Ok(())
        }
        Command::Plot {
            results,
            figure,
            out,
        } => {
            let figure = Figure::parse(&figure)?;
            let records =
                read_results(&results).with_context(|| format!("reading {}", results.display()))?;
            if records.is_empty() {
                bail!("{} holds no results", results.display());
            }
            emit(&plot_csv(&records, figure)?, out.as_deref())
        }
    }
}
