//! SNR sweeps over all configured frameworks, with results tables and
//! summaries.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gsar_core::channel::sample_channel;
use gsar_core::metrics::mpjpe_positions;
use gsar_core::pipeline::{
    derive_seed, prepare_frame, receive_frame, Clock, LatencyMode, SceneAssets,
};
use gsar_core::rotation::Vec3;
use gsar_core::skeleton::SkeletonGraph;
use gsar_core::trace::{gen_trace, AnimationTrace};

use crate::config::ExperimentConfig;
use crate::error::{io_err, Error, Result};
use crate::formats::{read_skeleton, read_trace};

/// Monotonic wall clock.
#[derive(Debug, Clone, Copy)]
pub struct StdClock {
    origin: Instant,
}

impl Default for StdClock {
    fn default() -> Self {
        StdClock {
            origin: Instant::now(),
        }
    }
}

impl Clock for StdClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "frame",
    "framework",
    "snr_db",
    "seed",
    "mpjpe",
    "adj_mpjpe",
    "weighted_err",
    "p2point",
    "psnr_y",
    "t_s",
    "t_w",
    "t_r",
];

/// One results row. Metric cells are empty for a failed frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame: usize,
    pub framework: String,
    pub snr_db: f64,
    pub seed: u64,
    pub mpjpe: Option<f64>,
    pub adj_mpjpe: Option<f64>,
    pub weighted_err: Option<f64>,
    pub p2point: Option<f64>,
    pub psnr_y: Option<f64>,
    pub t_s: Option<f64>,
    pub t_w: Option<f64>,
    pub t_r: Option<f64>,
}

impl FrameRecord {
    pub fn latency(&self) -> Option<f64> {
        Some(self.t_s? + self.t_w? + self.t_r?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub frame: usize,
    pub framework: String,
    pub snr_db: f64,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// Mean and sample standard deviation; `None` when empty.
pub fn mean_std(values: &[f64]) -> Option<MeanStd> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some(MeanStd {
        mean,
        std: var.sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub framework: String,
    pub snr_db: f64,
    pub frames: usize,
    pub failed: usize,
    pub mpjpe: Option<MeanStd>,
    pub adj_mpjpe: Option<MeanStd>,
    pub weighted_err: Option<MeanStd>,
    pub p2point: Option<MeanStd>,
    pub psnr_y: Option<MeanStd>,
    pub t_s: Option<MeanStd>,
    pub t_w: Option<MeanStd>,
    pub t_r: Option<MeanStd>,
    pub latency: Option<MeanStd>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub cells: Vec<CellSummary>,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    /// Ordered by framework, SNR, then frame.
    pub records: Vec<FrameRecord>,
    pub failures: Vec<Failure>,
}

/// Records of one sweep cell, ordered by frame.
pub fn cell<'a>(records: &'a [FrameRecord], framework: &str, snr_db: f64) -> Vec<&'a FrameRecord> {
    records
        .iter()
        .filter(|r| r.framework == framework && r.snr_db == snr_db)
        .collect()
}

fn summarize(framework: &str, snr_db: f64, rows: &[&FrameRecord]) -> CellSummary {
    let col = |f: &dyn Fn(&FrameRecord) -> Option<f64>| {
        mean_std(&rows.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
    };
    CellSummary {
        framework: framework.to_string(),
        snr_db,
        frames: rows.len(),
        failed: rows.iter().filter(|r| r.mpjpe.is_none()).count(),
        mpjpe: col(&|r| r.mpjpe),
        adj_mpjpe: col(&|r| r.adj_mpjpe),
        weighted_err: col(&|r| r.weighted_err),
        p2point: col(&|r| r.p2point),
        psnr_y: col(&|r| r.psnr_y),
        t_s: col(&|r| r.t_s),
        t_w: col(&|r| r.t_w),
        t_r: col(&|r| r.t_r),
        latency: col(&|r| r.latency()),
    }
}

impl ExperimentResults {
    pub fn summary(&self) -> Summary {
        let mut cells = Vec::new();
        for fw in self.config.framework_list() {
            for snr in self.config.snr_list() {
                cells.push(summarize(
                    fw.name(),
                    snr,
                    &cell(&self.records, fw.name(), snr),
                ));
            }
        }
        Summary {
            config: self.config.clone(),
            cells,
            failures: self.failures.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        for r in &self.records {
            out.serialize(r)?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Writes `results.csv` and `summary.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let csv_path = dir.join("results.csv");
        let json_path = dir.join("summary.json");
        fs::write(&csv_path, self.csv_string()?).map_err(io_err(&csv_path))?;
        let mut json = serde_json::to_string_pretty(&self.summary())?;
        json.push('\n');
        fs::write(&json_path, json).map_err(io_err(&json_path))?;
        Ok((csv_path, json_path))
    }
}

/// Reads a results table written by [`ExperimentResults::write_csv`].
pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<FrameRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_results(&text)
}

pub fn parse_results(text: &str) -> Result<Vec<FrameRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!(
            "unexpected results header: {}",
            header.join(",")
        )));
    }
    Ok(rd
        .deserialize()
        .collect::<std::result::Result<Vec<FrameRecord>, _>>()?)
}

/// Skeleton, assets and trace described by a resolved config.
pub struct Inputs {
    pub assets: SceneAssets,
    pub trace: AnimationTrace,
}

pub fn load_inputs(cfg: &ExperimentConfig) -> Result<Inputs> {
    let graph = match &cfg.skeleton {
        Some(p) => read_skeleton(p)?,
        None => SkeletonGraph::humanoid(Vec3::new(0.0, 1.0, 0.0)),
    };
    let c = &cfg.clouds;
    let asset_seed = derive_seed(cfg.seed, u64::MAX, 0);
    let assets = SceneAssets::procedural(graph, c.avatar_points, c.stationary_points, asset_seed)?;
    let trace = match &cfg.trace.path {
        Some(p) => {
            let mut t = read_trace(p)?;
            t.check()?;
            if t.len() < cfg.frames {
                return Err(Error::Config(format!(
                    "trace has {} frames, config asks for {}",
                    t.len(),
                    cfg.frames
                )));
            }
            if t.joint_count() != assets.graph.len() {
                return Err(gsar_core::Error::LengthMismatch {
                    what: "trace joints",
                    expected: assets.graph.len(),
                    found: t.joint_count(),
                }
                .into());
            }
            t.frames.truncate(cfg.frames);
            t
        }
        None => {
            let trace_seed = derive_seed(cfg.seed, u64::MAX, 1);
            gen_trace(
                &assets.graph,
                cfg.trace.kind,
                cfg.frames,
                trace_seed,
                cfg.trace.fps,
            )?
        }
    };
    Ok(Inputs { assets, trace })
}

type Cell = Result<(Vec<Vec3>, gsar_core::metrics::MetricsReport), String>;

/// Every framework and SNR for one frame. Channel and noise streams depend
/// on the frame index only, so all frameworks and SNR points share them.
fn run_one_frame(
    inputs: &Inputs,
    cfg: &ExperimentConfig,
    frame: usize,
    clock: Option<&dyn Clock>,
) -> Vec<Vec<Cell>> {
    let pipeline = cfg.pipeline().expect("resolved config");
    let master = cfg.channel_seed();
    let pose = &inputs.trace.frames[frame];
    let ch_seed = derive_seed(master, frame as u64, 0);
    let noise_seed = derive_seed(master, frame as u64, 1);
    cfg.framework_list()
        .into_iter()
        .map(
            |fw| match prepare_frame(&inputs.assets, &pipeline, fw, pose, clock) {
                Err(e) => cfg.snr_list().iter().map(|_| Err(e.to_string())).collect(),
                Ok(tx) => cfg
                    .snr_list()
                    .into_iter()
                    .map(|snr| {
                        let ch = sample_channel(cfg.channel.n_subchannels, snr, ch_seed)
                            .map_err(|e| e.to_string())?;
                        receive_frame(&inputs.assets, &pipeline, &tx, &ch, noise_seed, clock)
                            .map(|o| (o.joints, o.report))
                            .map_err(|e| e.to_string())
                    })
                    .collect(),
            },
        )
        .collect()
}

/// Runs the full sweep on prepared inputs.
pub fn run_with_inputs(cfg: &ExperimentConfig, inputs: &Inputs) -> Result<ExperimentResults> {
    let clock = StdClock::default();
    let clock: Option<&dyn Clock> = match cfg.pipeline()?.latency {
        LatencyMode::Measured => Some(&clock),
        LatencyMode::Analytic(_) => None,
    };
    let frames: Vec<Vec<Vec<Cell>>> = if clock.is_some() {
        (0..cfg.frames)
            .map(|f| run_one_frame(inputs, cfg, f, clock))
            .collect()
    } else {
        (0..cfg.frames)
            .into_par_iter()
            .map(|f| run_one_frame(inputs, cfg, f, None))
            .collect()
    };
    let master = cfg.channel_seed();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (fi, fw) in cfg.framework_list().into_iter().enumerate() {
        for (si, snr) in cfg.snr_list().into_iter().enumerate() {
            let mut prev: Option<&Vec<Vec3>> = None;
            for (frame, cells) in frames.iter().enumerate() {
                let seed = derive_seed(master, frame as u64, 0);
                let mut rec = FrameRecord {
                    frame,
                    framework: fw.name().to_string(),
                    snr_db: snr,
                    seed,
                    mpjpe: None,
                    adj_mpjpe: None,
                    weighted_err: None,
                    p2point: None,
                    psnr_y: None,
                    t_s: None,
                    t_w: None,
                    t_r: None,
                };
                match &cells[fi][si] {
                    Ok((joints, m)) => {
                        rec.mpjpe = Some(m.mpjpe);
                        rec.adj_mpjpe = prev.and_then(|p| mpjpe_positions(p, joints).ok());
                        rec.weighted_err = Some(m.weighted_error);
                        rec.p2point = Some(m.p2point);
                        rec.psnr_y = Some(m.psnr_y);
                        rec.t_s = Some(m.latency.t_s);
                        rec.t_w = Some(m.latency.t_w);
                        rec.t_r = Some(m.latency.t_r);
                        prev = Some(joints);
                    }
                    Err(e) => {
                        failures.push(Failure {
                            frame,
                            framework: rec.framework.clone(),
                            snr_db: snr,
                            error: e.clone(),
                        });
                        prev = None;
                    }
                }
                records.push(rec);
            }
        }
    }
    Ok(ExperimentResults {
        config: cfg.clone(),
        records,
        failures,
    })
}

/// Resolves the config, loads inputs and runs the sweep.
pub fn run_experiment(cfg: ExperimentConfig) -> Result<ExperimentResults> {
    let cfg = cfg.resolve()?;
    let inputs = load_inputs(&cfg)?;
    run_with_inputs(&cfg, &inputs)
}

/// Frameworks in the order they first appear.
pub fn frameworks_in(records: &[FrameRecord]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in records {
        if !out.contains(&r.framework) {
            out.push(r.framework.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            "frames = 3\nsnr_db = [0.0, 10.0]\n[clouds]\navatar_points = 400\nstationary_points = 100\n\
downsample_points = 128\nupsample_points = 500\n",
        )
        .unwrap()
    }

    #[test]
    fn mean_std_hand_values() {
        assert_eq!(mean_std(&[]), None);
        assert_eq!(
            mean_std(&[3.0]),
            Some(MeanStd {
                mean: 3.0,
                std: 0.0
            })
        );
        let m = mean_std(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.mean, 2.5);
        assert!((m.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn small_sweep_layout() {
        let r = run_experiment(small()).unwrap();
        assert_eq!(r.records.len(), 4 * 2 * 3);
        assert!(r.failures.is_empty());
        for c in r.records.chunks(3) {
            assert_eq!(c[0].adj_mpjpe, None);
            assert!(c[1].adj_mpjpe.is_some() && c[2].adj_mpjpe.is_some());
            assert_eq!(c[0].seed, r.records[0].seed);
        }
        let csv = r.csv_string().unwrap();
        assert!(csv.starts_with(&(CSV_HEADER.join(",") + "\n")));
        assert!(!csv.contains('\r'));
        assert_eq!(parse_results(&csv).unwrap(), r.records);
        let s = r.summary();
        assert_eq!(s.cells.len(), 8);
        assert!(s
            .cells
            .iter()
            .all(|c| c.frames == 3 && c.failed == 0 && c.adj_mpjpe.is_some()));
    }

    #[test]
    fn measured_latency_runs() {
        let mut c = small();
        c.frames = 2;
        c.latency.mode = crate::config::LatencyModeName::Measured;
        let r = run_experiment(c).unwrap();
        assert!(r
            .records
            .iter()
            .all(|x| x.t_s.unwrap() >= 0.0 && x.t_r.unwrap() >= 0.0));
    }

    #[test]
    fn header_checked() {
        assert!(parse_results("a,b\n1,2\n").is_err());
    }
}
