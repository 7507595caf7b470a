//! Transmitter-side semantics: extraction, base knowledge, node ranking and
//! subchannel mapping.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::channel::{ChannelRealization, Field};
use crate::error::{Error, Result};
use crate::pointcloud::{PointCloud, SkinBinding};
use crate::rotation::{quat_to_euler, EulerAngles, Quaternion, Vec3};
use crate::skeleton::{Pose, SkeletonGraph};

/// The four transmission schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Framework {
    /// Downsampled point cloud with colours every frame.
    PointCloud,
    /// Joint positions and quaternions.
    Gsar,
    /// Joint Euler angles, forward kinematics at the receiver.
    Egsar,
    /// As `Egsar`, with ranked items mapped to the strongest subchannels.
    Ecgsar,
}

impl Framework {
    pub const ALL: [Framework; 4] = [
        Framework::PointCloud,
        Framework::Gsar,
        Framework::Egsar,
        Framework::Ecgsar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Framework::PointCloud => "pointcloud",
            Framework::Gsar => "gsar",
            Framework::Egsar => "egsar",
            Framework::Ecgsar => "ecgsar",
        }
    }

    pub fn is_semantic(self) -> bool {
        self != Framework::PointCloud
    }

    pub fn uses_euler(self) -> bool {
        matches!(self, Framework::Egsar | Framework::Ecgsar)
    }
}

impl fmt::Display for Framework {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Framework {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "pointcloud" | "pc" | "baseline" => Ok(Framework::PointCloud),
            "gsar" => Ok(Framework::Gsar),
            "egsar" => Ok(Framework::Egsar),
            "ecgsar" => Ok(Framework::Ecgsar),
            _ => Err(Error::Config(alloc::format!(
                "unknown framework '{s}' (expected pointcloud, gsar, egsar or ecgsar)"
            ))),
        }
    }
}

/// Item layout of a GSAR joint: position then quaternion `(x, y, z, w)`.
pub const GSAR_LAYOUT: [Field; 7] = [
    Field::Position,
    Field::Position,
    Field::Position,
    Field::Quaternion,
    Field::Quaternion,
    Field::Quaternion,
    Field::Quaternion,
];

/// Item layout of an E-GSAR joint: `(roll, yaw, pitch)`.
pub const EULER_LAYOUT: [Field; 3] = [Field::Euler; 3];

/// Item layout of a baseline point: position then RGB.
pub const POINT_LAYOUT: [Field; 6] = [
    Field::Position,
    Field::Position,
    Field::Position,
    Field::Color,
    Field::Color,
    Field::Color,
];

/// Per-frame semantic payload.
#[derive(Debug, Clone, PartialEq)]
pub enum SemanticFrame {
    Gsar {
        positions: Vec<Vec3>,
        rotations: Vec<Quaternion>,
    },
    Euler {
        angles: Vec<EulerAngles>,
    },
}

impl SemanticFrame {
    pub fn joint_count(&self) -> usize {
        match self {
            SemanticFrame::Gsar { positions, .. } => positions.len(),
            SemanticFrame::Euler { angles } => angles.len(),
        }
    }

    pub fn layout(&self) -> &'static [Field] {
        match self {
            SemanticFrame::Gsar { .. } => &GSAR_LAYOUT,
            SemanticFrame::Euler { .. } => &EULER_LAYOUT,
        }
    }

    /// Item layout used by `framework`.
    pub fn layout_of(framework: Framework) -> Result<&'static [Field]> {
        match framework {
            Framework::Gsar => Ok(&GSAR_LAYOUT),
            Framework::Egsar | Framework::Ecgsar => Ok(&EULER_LAYOUT),
            Framework::PointCloud => Err(Error::FrameworkMismatch(
                "point-cloud payload is not a semantic frame".to_string(),
            )),
        }
    }

    pub fn scalar_count(&self) -> usize {
        self.joint_count() * self.layout().len()
    }

    /// Flattened payload, one item per joint.
    pub fn to_scalars(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.scalar_count());
        match self {
            SemanticFrame::Gsar {
                positions,
                rotations,
            } => {
                for (p, q) in positions.iter().zip(rotations) {
                    out.extend_from_slice(&p.to_array());
                    out.extend_from_slice(&q.to_array());
                }
            }
            SemanticFrame::Euler { angles } => {
                for e in angles {
                    out.extend_from_slice(&[e.roll, e.yaw, e.pitch]);
                }
            }
        }
        out
    }

    /// Inverse of [`SemanticFrame::to_scalars`] for a semantic framework.
    pub fn from_scalars(framework: Framework, scalars: &[f64]) -> Result<Self> {
        let stride = Self::layout_of(framework)?.len();
        if !scalars.len().is_multiple_of(stride) {
            return Err(Error::LengthMismatch {
                what: "semantic scalars",
                expected: (scalars.len() / stride + 1) * stride,
                found: scalars.len(),
            });
        }
        let items = scalars.chunks(stride);
        Ok(if framework == Framework::Gsar {
            SemanticFrame::Gsar {
                positions: items.clone().map(|c| Vec3::new(c[0], c[1], c[2])).collect(),
                rotations: items
                    .map(|c| Quaternion::new(c[3], c[4], c[5], c[6]))
                    .collect(),
            }
        } else {
            SemanticFrame::Euler {
                angles: items.map(|c| EulerAngles::new(c[2], c[0], c[1])).collect(),
            }
        })
    }
}

/// Reads the semantic payload off a pose. GSAR quaternions are normalized;
/// E-GSAR converts each world orientation to Euler angles.
pub fn extract_semantics(pose: &Pose, framework: Framework) -> Result<SemanticFrame> {
    if pose.rotations.len() != pose.positions.len() {
        return Err(Error::LengthMismatch {
            what: "pose rotations",
            expected: pose.positions.len(),
            found: pose.rotations.len(),
        });
    }
    match framework {
        Framework::Gsar => Ok(SemanticFrame::Gsar {
            positions: pose.positions.clone(),
            rotations: pose
                .rotations
                .iter()
                .map(|q| q.normalized().unwrap_or(Quaternion::IDENTITY))
                .collect(),
        }),
        Framework::Egsar | Framework::Ecgsar => Ok(SemanticFrame::Euler {
            angles: pose.rotations.iter().map(|&q| quat_to_euler(q)).collect(),
        }),
        Framework::PointCloud => Err(Error::FrameworkMismatch(
            "the point-cloud baseline has no semantic payload".to_string(),
        )),
    }
}

/// Assets shared once before streaming.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseKnowledge {
    pub framework: Framework,
    /// Avatar appearance bound to its joints.
    pub avatar: SkinBinding,
    /// Rest-pose joint positions the binding refers to.
    pub rest_joints: Vec<Vec3>,
    /// Stationary model, already placed at its initial position.
    pub stationary: PointCloud,
    pub stationary_origin: Vec3,
    /// Present for the Euler frameworks only.
    pub skeleton: Option<SkeletonGraph>,
    /// Avatar root position; present for the Euler frameworks only.
    pub avatar_origin: Option<Vec3>,
}

/// Assembles base knowledge. GSAR drops the skeleton and avatar origin even
/// when given; the Euler frameworks require the skeleton.
pub fn build_base_knowledge(
    framework: Framework,
    graph: Option<&SkeletonGraph>,
    avatar: SkinBinding,
    stationary: PointCloud,
    stationary_origin: Vec3,
    avatar_origin: Vec3,
) -> Result<BaseKnowledge> {
    let rest_joints = match graph {
        Some(g) => g.rest_pose()?.positions,
        None => Vec::new(),
    };
    match framework {
        Framework::PointCloud => Err(Error::FrameworkMismatch(
            "the point-cloud baseline uses no base knowledge".to_string(),
        )),
        Framework::Gsar => Ok(BaseKnowledge {
            framework,
            avatar,
            rest_joints,
            stationary,
            stationary_origin,
            skeleton: None,
            avatar_origin: None,
        }),
        Framework::Egsar | Framework::Ecgsar => {
            let g = graph.ok_or(Error::MissingSkeleton)?;
            if let Err(v) = g.validate() {
                return Err(Error::InvalidGraph(v));
            }
            Ok(BaseKnowledge {
                framework,
                avatar,
                rest_joints,
                stationary,
                stationary_origin,
                skeleton: Some(g.clone()),
                avatar_origin: Some(avatar_origin),
            })
        }
    }
}

/// Non-negative node weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn uniform(n: usize) -> Self {
        WeightVector(vec![1.0 / n as f64; n])
    }

    /// Node indices by weight, heaviest first; ties keep index order.
    pub fn ranking(&self) -> Vec<usize> {
        descending_order(&self.0)
    }
}

fn descending_order(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    idx
}

/// Default damping of the ranking recursion.
pub const ABSR_ALPHA: f64 = 0.7;

/// Node importance by the fixed point of
/// `ω_i = deg(i) / (1 − α) + Σ_j |l_ij| ω_j`, neighbours `j`, rest bone
/// lengths `|l_ij|`, with the iterate L1-normalized after every sweep.
/// Stops once successive normalized iterates differ by less than `epsilon`
/// in L1.
pub fn absr_weights(
    graph: &SkeletonGraph,
    alpha: f64,
    epsilon: f64,
    max_iter: usize,
) -> Result<WeightVector> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(alloc::format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    graph.validate().map_err(Error::InvalidGraph)?;
    let n = graph.len();
    if n == 1 {
        return Ok(WeightVector(vec![1.0]));
    }
    let nbrs = graph.neighbors();
    let base: Vec<f64> = nbrs
        .iter()
        .map(|a| a.len() as f64 / (1.0 - alpha))
        .collect();
    let mut w = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..max_iter {
        for i in 0..n {
            next[i] = base[i] + nbrs[i].iter().map(|&(j, len)| len * w[j]).sum::<f64>();
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let change: f64 = next.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum();
        core::mem::swap(&mut w, &mut next);
        if change < epsilon {
            return Ok(WeightVector(w));
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        last: w,
    })
}

/// Item index to subchannel index.
pub type ChannelMap = Vec<usize>;

/// Pairs items by descending weight with subchannels by descending SNR,
/// rank to rank. Ties go to the lower index; with more items than
/// subchannels the subchannel ranks wrap around.
pub fn channel_map(weights: &WeightVector, channel: &ChannelRealization) -> Result<ChannelMap> {
    let n_sub = channel.n_subchannels();
    if n_sub == 0 {
        return Err(Error::EmptyChannel);
    }
    let items = weights.ranking();
    let subs = descending_order(&channel.strength());
    let mut map = vec![0; items.len()];
    for (rank, &item) in items.iter().enumerate() {
        map[item] = subs[rank % n_sub];
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::SkeletonNode;
    use num_complex::Complex64;

    fn graph(parents: &[Option<usize>], len: f64) -> SkeletonGraph {
        SkeletonGraph::new(
            parents
                .iter()
                .enumerate()
                .map(|(id, &parent)| SkeletonNode {
                    id,
                    parent,
                    rest_offset: if parent.is_some() {
                        Vec3::new(len, 0.0, 0.0)
                    } else {
                        Vec3::ZERO
                    },
                })
                .collect(),
        )
    }

    #[test]
    fn path_is_symmetric() {
        let w = absr_weights(&graph(&[None, Some(0), Some(1)], 1.0), 0.7, 1e-9, 10000).unwrap();
        assert!((w.0[0] - w.0[2]).abs() < 1e-12);
        assert!(w.0[1] > w.0[0]);
        assert!((w.0.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn star_center_dominates() {
        let w = absr_weights(
            &graph(&[None, Some(0), Some(0), Some(0), Some(0)], 1.0),
            0.7,
            1e-9,
            10000,
        )
        .unwrap();
        assert!(w.0[1..].iter().all(|&l| w.0[0] > l));
    }

    #[test]
    fn single_edge_splits_evenly() {
        let w = absr_weights(&graph(&[None, Some(0)], 3.7), 0.7, 1e-9, 10000).unwrap();
        assert!((w.0[0] - 0.5).abs() < 1e-12 && (w.0[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn iteration_budget_reported() {
        let e = absr_weights(&graph(&[None, Some(0), Some(1)], 1.0), 0.7, 0.0, 3).unwrap_err();
        assert!(matches!(e, Error::NotConverged { iterations: 3, ref last } if last.len() == 3));
    }

    fn channel_with_snr_db(db: &[f64]) -> ChannelRealization {
        let gains = db
            .iter()
            .map(|d| Complex64::new(10f64.powf(d / 20.0), 0.0))
            .collect();
        ChannelRealization::new(gains, 1.0, 1.0).unwrap()
    }

    #[test]
    fn rank_pairing() {
        let ch = channel_with_snr_db(&[1.0, 7.0, 4.0]);
        assert_eq!(
            channel_map(&WeightVector(vec![0.5, 0.3, 0.2]), &ch).unwrap(),
            vec![1, 2, 0]
        );
        assert_eq!(
            channel_map(&WeightVector::uniform(3), &ch).unwrap(),
            vec![1, 2, 0]
        );
        assert_eq!(
            channel_map(&WeightVector(vec![0.1, 0.2, 0.3, 0.4]), &ch).unwrap(),
            vec![1, 0, 2, 1]
        );
    }

    #[test]
    fn euler_wire_order() {
        let f = SemanticFrame::Euler {
            angles: vec![EulerAngles::new(1.0, 2.0, 3.0)],
        };
        assert_eq!(f.to_scalars(), vec![2.0, 3.0, 1.0]);
        assert_eq!(
            SemanticFrame::from_scalars(Framework::Egsar, &f.to_scalars()).unwrap(),
            f
        );
    }

    #[test]
    fn extraction_sizes() {
        let g = SkeletonGraph::humanoid(Vec3::new(0.0, 1.0, 0.0));
        let rest = g.rest_pose().unwrap();
        assert_eq!(
            extract_semantics(&rest, Framework::Gsar)
                .unwrap()
                .scalar_count(),
            175
        );
        let e = extract_semantics(&rest, Framework::Egsar).unwrap();
        assert_eq!(e.scalar_count(), 75);
        assert!(e.to_scalars().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn knowledge_variants() {
        let g = SkeletonGraph::humanoid(Vec3::new(0.0, 1.0, 0.0));
        let bk = |f, g| {
            build_base_knowledge(
                f,
                g,
                SkinBinding::default(),
                PointCloud::default(),
                Vec3::ZERO,
                g.map_or(Vec3::ZERO, |g: &SkeletonGraph| g.anchor()),
            )
        };
        assert!(bk(Framework::Gsar, Some(&g)).unwrap().skeleton.is_none());
        assert!(bk(Framework::Egsar, Some(&g)).unwrap().skeleton.is_some());
        assert_eq!(bk(Framework::Ecgsar, None), Err(Error::MissingSkeleton));
        assert!("EC-GSAR".parse::<Framework>().unwrap() == Framework::Ecgsar);
    }
}
