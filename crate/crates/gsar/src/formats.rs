//! JSON files for animation traces, skeletons and base knowledge.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gsar_core::pointcloud::{BoundPoint, Point, PointCloud, SkinBinding};
use gsar_core::rotation::{Quaternion, Vec3};
use gsar_core::semantics::{BaseKnowledge, Framework};
use gsar_core::skeleton::{Pose, SkeletonGraph, SkeletonNode};
use gsar_core::trace::AnimationTrace;

use crate::error::{io_err, Error, Result};
use crate::ply::{read_ply, write_ply};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFrameFile {
    pub positions: Vec<[f64; 3]>,
    pub quaternions: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub fps: f64,
    pub joint_count: usize,
    pub frames: Vec<TraceFrameFile>,
}

impl From<&AnimationTrace> for TraceFile {
    fn from(t: &AnimationTrace) -> Self {
        TraceFile {
            fps: t.fps,
            joint_count: t.joint_count(),
            frames: t
                .frames
                .iter()
                .map(|p| TraceFrameFile {
                    positions: p.positions.iter().map(|v| v.to_array()).collect(),
                    quaternions: p.rotations.iter().map(|q| q.to_array()).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<TraceFile> for AnimationTrace {
    type Error = Error;

    fn try_from(f: TraceFile) -> Result<Self> {
        if !(f.fps > 0.0) {
            return Err(Error::Config(format!(
                "trace fps must be positive, got {}",
                f.fps
            )));
        }
        let frames = f
            .frames
            .into_iter()
            .map(|fr| {
                if fr.positions.len() != f.joint_count || fr.quaternions.len() != f.joint_count {
                    return Err(gsar_core::Error::LengthMismatch {
                        what: "trace frame joints",
                        expected: f.joint_count,
                        found: fr.positions.len().min(fr.quaternions.len()),
                    }
                    .into());
                }
                Ok(Pose {
                    positions: fr.positions.into_iter().map(Vec3::from_array).collect(),
                    rotations: fr
                        .quaternions
                        .into_iter()
                        .map(Quaternion::from_array)
                        .collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AnimationTrace { fps: f.fps, frames })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeFile {
    pub id: usize,
    pub parent: Option<usize>,
    pub rest_offset: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonFile {
    pub nodes: Vec<NodeFile>,
}

impl From<&SkeletonGraph> for SkeletonFile {
    fn from(g: &SkeletonGraph) -> Self {
        SkeletonFile {
            nodes: g
                .nodes
                .iter()
                .map(|n| NodeFile {
                    id: n.id,
                    parent: n.parent,
                    rest_offset: n.rest_offset.to_array(),
                })
                .collect(),
        }
    }
}

impl TryFrom<SkeletonFile> for SkeletonGraph {
    type Error = Error;

    /// Validates the graph.
    fn try_from(f: SkeletonFile) -> Result<Self> {
        let g = SkeletonGraph::new(
            f.nodes
                .into_iter()
                .map(|n| SkeletonNode {
                    id: n.id,
                    parent: n.parent,
                    rest_offset: Vec3::from_array(n.rest_offset),
                })
                .collect(),
        );
        g.validate().map_err(gsar_core::Error::InvalidGraph)?;
        Ok(g)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<AnimationTrace> {
    read_json::<TraceFile>(path.as_ref())?.try_into()
}

pub fn write_trace(trace: &AnimationTrace, path: impl AsRef<Path>) -> Result<()> {
    write_json(&TraceFile::from(trace), path.as_ref())
}

pub fn read_skeleton(path: impl AsRef<Path>) -> Result<SkeletonGraph> {
    read_json::<SkeletonFile>(path.as_ref())?.try_into()
}

pub fn write_skeleton(graph: &SkeletonGraph, path: impl AsRef<Path>) -> Result<()> {
    write_json(&SkeletonFile::from(graph), path.as_ref())
}

/// Base knowledge on disk. Clouds live in PLY files next to the JSON; the
/// avatar cloud is stored in its rest pose with one bound joint per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseKnowledgeFile {
    pub framework: String,
    pub skeleton: Option<SkeletonFile>,
    pub avatar_ply: PathBuf,
    pub bind_nodes: Vec<usize>,
    pub rest_joints: Vec<[f64; 3]>,
    pub stationary_ply: PathBuf,
    pub stationary_origin: [f64; 3],
    pub avatar_origin: Option<[f64; 3]>,
}

fn sibling(json: &Path, suffix: &str) -> PathBuf {
    let stem = json.file_stem().and_then(|s| s.to_str()).unwrap_or("base");
    PathBuf::from(format!("{stem}.{suffix}.ply"))
}

/// Writes `path` and two PLY files beside it.
pub fn write_base_knowledge(bk: &BaseKnowledge, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let dir = path.parent().unwrap_or(Path::new("."));
    let rest_cloud = bk
        .avatar
        .points
        .iter()
        .map(|b| {
            let joint = bk
                .rest_joints
                .get(b.node)
                .ok_or(gsar_core::Error::UnknownNode(b.node))?;
            Ok(Point::new(*joint + b.offset, b.color))
        })
        .collect::<Result<Vec<_>>>()?;
    let avatar_ply = sibling(path, "avatar");
    let stationary_ply = sibling(path, "stationary");
    write_ply(&PointCloud::new(rest_cloud), dir.join(&avatar_ply))?;
    write_ply(&bk.stationary, dir.join(&stationary_ply))?;
    let file = BaseKnowledgeFile {
        framework: bk.framework.name().to_string(),
        skeleton: bk.skeleton.as_ref().map(SkeletonFile::from),
        avatar_ply,
        bind_nodes: bk.avatar.points.iter().map(|b| b.node).collect(),
        rest_joints: bk.rest_joints.iter().map(|v| v.to_array()).collect(),
        stationary_ply,
        stationary_origin: bk.stationary_origin.to_array(),
        avatar_origin: bk.avatar_origin.map(Vec3::to_array),
    };
    write_json(&file, path)
}

/// Reads base knowledge written by [`write_base_knowledge`]. PLY paths are
/// relative to the JSON file.
pub fn read_base_knowledge(path: impl AsRef<Path>) -> Result<BaseKnowledge> {
    let path = path.as_ref();
    let dir = path.parent().unwrap_or(Path::new("."));
    let f: BaseKnowledgeFile = read_json(path)?;
    let framework: Framework = f.framework.parse()?;
    let rest_joints: Vec<Vec3> = f.rest_joints.into_iter().map(Vec3::from_array).collect();
    let rest_cloud = read_ply(dir.join(&f.avatar_ply))?;
    if rest_cloud.len() != f.bind_nodes.len() {
        return Err(gsar_core::Error::LengthMismatch {
            what: "bind nodes",
            expected: rest_cloud.len(),
            found: f.bind_nodes.len(),
        }
        .into());
    }
    let points = rest_cloud
        .points
        .iter()
        .zip(&f.bind_nodes)
        .map(|(p, &node)| {
            let joint = rest_joints
                .get(node)
                .ok_or(gsar_core::Error::UnknownNode(node))?;
            Ok(BoundPoint {
                node,
                offset: p.position - *joint,
                color: p.color,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let skeleton = f.skeleton.map(SkeletonGraph::try_from).transpose()?;
    if framework.uses_euler() && skeleton.is_none() {
        return Err(gsar_core::Error::MissingSkeleton.into());
    }
    Ok(BaseKnowledge {
        framework,
        avatar: SkinBinding { points },
        rest_joints,
        stationary: read_ply(dir.join(&f.stationary_ply))?,
        stationary_origin: Vec3::from_array(f.stationary_origin),
        skeleton,
        avatar_origin: f.avatar_origin.map(Vec3::from_array),
    })
}
