//! Per-frame transmission pipeline for all four frameworks.
//!
//! A frame is prepared once at the transmitter ([`prepare_frame`]) and can
//! then be received over any number of channel realizations
//! ([`receive_frame`]).

use alloc::vec::Vec;

use crate::channel::{
    deserialize_dequantize, quantize_serialize, round_robin, transmit, ChannelCoder,
    ChannelRealization, Coder, QuantizationScheme, Serialized,
};
use crate::error::{Error, Result};
use crate::keypoints::{estimate_joints, label_points};
use crate::metrics::{
    mpjpe_positions, p2point, psnr_y, weighted_semantic_error, Latency, LinkModel, MetricsReport,
};
use crate::pointcloud::{fps_select, skin_pose, upsample_interpolate, PointCloud, SkinBinding};
use crate::recovery::{recover_pose, recover_scene, ReceivedFrame};
use crate::rotation::Vec3;
use crate::scene::{avatar_rest_cloud, stationary_cloud, TABLE_ORIGIN};
use crate::semantics::{
    absr_weights, build_base_knowledge, channel_map, extract_semantics, BaseKnowledge, Framework,
    SemanticFrame, WeightVector, ABSR_ALPHA, POINT_LAYOUT,
};
use crate::skeleton::{Pose, SkeletonGraph};

/// Wall-clock source for measured latency.
pub trait Clock {
    /// Seconds since an arbitrary fixed origin.
    fn now(&self) -> f64;
}

/// Fixed per-item processing costs in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticLatency {
    /// Baseline capture cost per generated scene point.
    pub per_generated_point: f64,
    /// Baseline reconstruction cost per rendered point.
    pub per_rendered_point: f64,
    /// Semantic extraction cost per joint.
    pub per_joint_extract: f64,
    /// Semantic pose recovery cost per joint.
    pub per_joint_render: f64,
}

impl Default for AnalyticLatency {
    fn default() -> Self {
        AnalyticLatency {
            per_generated_point: 0.5e-6,
            per_rendered_point: 1e-6,
            per_joint_extract: 10e-6,
            per_joint_render: 10e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatencyMode {
    Analytic(AnalyticLatency),
    /// Timed with the [`Clock`] handed to the pipeline.
    Measured,
}

impl Default for LatencyMode {
    fn default() -> Self {
        LatencyMode::Analytic(AnalyticLatency::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub scheme: QuantizationScheme,
    pub coder: Coder,
    pub link: LinkModel,
    /// Points the baseline transmits per frame.
    pub downsample_points: usize,
    /// Points the baseline receiver reconstructs.
    pub upsample_points: usize,
    pub latency: LatencyMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            scheme: QuantizationScheme::default(),
            coder: Coder::Identity,
            link: LinkModel::default(),
            downsample_points: 2048,
            upsample_points: 8192,
            latency: LatencyMode::default(),
        }
    }
}

/// Everything shared by transmitter and receiver before streaming.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneAssets {
    pub graph: SkeletonGraph,
    pub binding: SkinBinding,
    pub stationary: PointCloud,
    pub stationary_origin: Vec3,
    pub weights: WeightVector,
    knowledge: Vec<BaseKnowledge>,
}

impl SceneAssets {
    pub fn new(
        graph: SkeletonGraph,
        binding: SkinBinding,
        stationary: PointCloud,
        stationary_origin: Vec3,
    ) -> Result<Self> {
        let weights = absr_weights(&graph, ABSR_ALPHA, 1e-9, 10_000)?;
        let knowledge = [Framework::Gsar, Framework::Egsar, Framework::Ecgsar]
            .into_iter()
            .map(|f| {
                build_base_knowledge(
                    f,
                    Some(&graph),
                    binding.clone(),
                    stationary.clone(),
                    stationary_origin,
                    graph.anchor(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SceneAssets {
            graph,
            binding,
            stationary,
            stationary_origin,
            weights,
            knowledge,
        })
    }

    /// Procedural avatar around `graph` plus the default table.
    pub fn procedural(
        graph: SkeletonGraph,
        avatar_points: usize,
        stationary_points: usize,
        seed: u64,
    ) -> Result<Self> {
        let rest = avatar_rest_cloud(&graph, avatar_points, seed)?;
        let binding = SkinBinding::bind_nearest_bone(&graph, &rest)?;
        let stationary = stationary_cloud(TABLE_ORIGIN, stationary_points, seed);
        SceneAssets::new(graph, binding, stationary, TABLE_ORIGIN)
    }

    /// Base knowledge of a semantic framework.
    pub fn base_knowledge(&self, framework: Framework) -> Result<&BaseKnowledge> {
        self.knowledge
            .iter()
            .find(|k| k.framework == framework)
            .ok_or_else(|| {
                Error::FrameworkMismatch("the point-cloud baseline uses no base knowledge".into())
            })
    }

    /// Full scene for a pose: skinned avatar followed by the stationary
    /// model.
    pub fn scene(&self, pose: &Pose) -> Result<PointCloud> {
        let mut s = skin_pose(&self.binding, pose)?;
        s.extend(&self.stationary);
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Payload {
    Semantic,
    Cloud {
        sent: Vec<Vec3>,
        labels: Vec<Option<usize>>,
    },
}

/// A frame ready to send.
#[derive(Debug, Clone, PartialEq)]
pub struct TxFrame {
    pub framework: Framework,
    /// Ground-truth pose.
    pub pose: Pose,
    /// Scene the receiver is scored against.
    pub reference: PointCloud,
    /// Serialized payload before channel coding.
    pub payload: Serialized,
    pub t_s: f64,
    payload_kind: Payload,
}

/// Result of receiving one frame over one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    /// Recovered (or, for the baseline, estimated) joint positions.
    pub joints: Vec<Vec3>,
    /// Metrics with `adjacent_mpjpe` left empty.
    pub report: MetricsReport,
    pub bit_errors: usize,
    pub sanitized: usize,
    pub scene: PointCloud,
}

fn timed<T>(clock: Option<&dyn Clock>, f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    match clock {
        Some(c) => {
            let t0 = c.now();
            let v = f()?;
            Ok((v, (c.now() - t0).max(0.0)))
        }
        None => Ok((f()?, 0.0)),
    }
}

fn clock_for<'a>(
    cfg: &PipelineConfig,
    clock: Option<&'a dyn Clock>,
) -> Result<Option<&'a dyn Clock>> {
    match cfg.latency {
        LatencyMode::Analytic(_) => Ok(None),
        LatencyMode::Measured => clock
            .map(Some)
            .ok_or_else(|| Error::Config("measured latency needs a clock".into())),
    }
}

/// Transmitter side: scene capture or semantic extraction and
/// serialization.
pub fn prepare_frame(
    assets: &SceneAssets,
    cfg: &PipelineConfig,
    framework: Framework,
    pose: &Pose,
    clock: Option<&dyn Clock>,
) -> Result<TxFrame> {
    let clock = clock_for(cfg, clock)?;
    let scene = assets.scene(pose)?;
    if framework.is_semantic() {
        let (frame, t) = timed(clock, || extract_semantics(pose, framework))?;
        let payload = quantize_serialize(&frame.to_scalars(), frame.layout(), &cfg.scheme)?;
        let t_s = match cfg.latency {
            LatencyMode::Analytic(a) => a.per_joint_extract * pose.len() as f64,
            LatencyMode::Measured => t,
        };
        return Ok(TxFrame {
            framework,
            pose: pose.clone(),
            reference: scene,
            payload,
            t_s,
            payload_kind: Payload::Semantic,
        });
    }
    let n_avatar = assets.binding.len();
    let ((sent_cloud, labels, payload), t) = timed(clock, || {
        let positions = scene.positions();
        let idx = fps_select(&positions, cfg.downsample_points, 0)?;
        let sent_cloud = scene.select(&idx);
        let avatar: Vec<bool> = idx.iter().map(|&i| i < n_avatar).collect();
        let labels = label_points(&sent_cloud.positions(), &avatar, &pose.positions);
        let payload = quantize_serialize(&cloud_scalars(&sent_cloud), &POINT_LAYOUT, &cfg.scheme)?;
        Ok((sent_cloud, labels, payload))
    })?;
    // scored against the noiseless-channel reconstruction
    let clean = cloud_from_scalars(&deserialize_dequantize(
        &payload.bits,
        &POINT_LAYOUT,
        &cfg.scheme,
    )?);
    let reference = upsample_interpolate(&clean, cfg.upsample_points)?;
    let t_s = match cfg.latency {
        LatencyMode::Analytic(a) => a.per_generated_point * scene.len() as f64,
        LatencyMode::Measured => t,
    };
    Ok(TxFrame {
        framework,
        pose: pose.clone(),
        reference,
        payload,
        t_s,
        payload_kind: Payload::Cloud {
            sent: sent_cloud.positions(),
            labels,
        },
    })
}

fn cloud_scalars(c: &PointCloud) -> Vec<f64> {
    let mut out = Vec::with_capacity(c.len() * POINT_LAYOUT.len());
    for p in &c.points {
        out.extend_from_slice(&p.position.to_array());
        out.extend(p.color.iter().map(|&v| v as f64));
    }
    out
}

fn cloud_from_scalars(s: &[f64]) -> PointCloud {
    PointCloud::new(
        s.chunks(POINT_LAYOUT.len())
            .map(|c| {
                crate::pointcloud::Point::new(
                    Vec3::new(c[0], c[1], c[2]),
                    [c[3] as u8, c[4] as u8, c[5] as u8],
                )
            })
            .collect(),
    )
}

/// Channel coding, transmission over `channel` with noise from
/// `noise_seed`, decoding, recovery and scoring.
pub fn receive_frame(
    assets: &SceneAssets,
    cfg: &PipelineConfig,
    tx: &TxFrame,
    channel: &ChannelRealization,
    noise_seed: u64,
    clock: Option<&dyn Clock>,
) -> Result<FrameOutcome> {
    let clock = clock_for(cfg, clock)?;
    let n_items = tx.payload.bits.segments().len();
    let mapping = if tx.framework == Framework::Ecgsar {
        channel_map(&assets.weights, channel)?
    } else {
        round_robin(n_items, channel.n_subchannels())
    };
    let coded = cfg.coder.encode(&tx.payload.bits);
    let received = transmit(&coded, channel, Some(&mapping), noise_seed)?;
    let decoded = cfg.coder.decode(&received.bits);
    let bit_errors = decoded.count_errors(&tx.payload.bits);
    let t_w = cfg
        .link
        .transmission_time(tx.payload.bits.len(), cfg.coder.expansion())?;

    let true_joints = &tx.pose.positions;
    let (joints, scene, sanitized, t_r) = match &tx.payload_kind {
        Payload::Semantic => {
            let knowledge = assets.base_knowledge(tx.framework)?;
            let (out, t) = timed(clock, || {
                let scalars = deserialize_dequantize(
                    &decoded,
                    SemanticFrame::layout_of(tx.framework)?,
                    &cfg.scheme,
                )?;
                let rx = ReceivedFrame {
                    framework: tx.framework,
                    frame: SemanticFrame::from_scalars(tx.framework, &scalars)?,
                    clamped: tx.payload.clamped,
                    bit_errors,
                };
                let rec = recover_pose(&rx, knowledge)?;
                let scene = recover_scene(knowledge, &rec.pose)?;
                Ok((rec, scene))
            })?;
            let (rec, scene) = out;
            let t_r = match cfg.latency {
                LatencyMode::Analytic(a) => a.per_joint_render * rec.pose.len() as f64,
                LatencyMode::Measured => t,
            };
            (rec.pose.positions, scene, rec.sanitized, t_r)
        }
        Payload::Cloud { sent, labels } => {
            let (out, t) = timed(clock, || {
                let cloud = cloud_from_scalars(&deserialize_dequantize(
                    &decoded,
                    &POINT_LAYOUT,
                    &cfg.scheme,
                )?);
                let scene = upsample_interpolate(&cloud, cfg.upsample_points)?;
                Ok((cloud, scene))
            })?;
            let (cloud, scene) = out;
            let joints = estimate_joints(true_joints, sent, labels, &cloud.positions());
            let t_r = match cfg.latency {
                LatencyMode::Analytic(a) => a.per_rendered_point * scene.len() as f64,
                LatencyMode::Measured => t,
            };
            (joints, scene, 0, t_r)
        }
    };
    let report = MetricsReport {
        mpjpe: mpjpe_positions(true_joints, &joints)?,
        adjacent_mpjpe: None,
        weighted_error: weighted_semantic_error(true_joints, &joints, &assets.weights)?,
        p2point: p2point(&tx.reference, &scene)?,
        psnr_y: psnr_y(&tx.reference, &scene)?,
        latency: Latency {
            t_s: tx.t_s,
            t_w,
            t_r,
        },
    };
    Ok(FrameOutcome {
        joints,
        report,
        bit_errors,
        sanitized,
        scene,
    })
}

/// [`prepare_frame`] followed by [`receive_frame`].
pub fn run_frame(
    assets: &SceneAssets,
    cfg: &PipelineConfig,
    framework: Framework,
    pose: &Pose,
    channel: &ChannelRealization,
    noise_seed: u64,
    clock: Option<&dyn Clock>,
) -> Result<FrameOutcome> {
    let tx = prepare_frame(assets, cfg, framework, pose, clock)?;
    receive_frame(assets, cfg, &tx, channel, noise_seed, clock)
}

/// Independent 64-bit stream seed from a master seed and two indices.
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(master) ^ a) ^ b.rotate_left(32))
}
