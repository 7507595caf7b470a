//! Skeleton graphs, poses and forward kinematics.
//!
//! A pose stores the *world* orientation of every joint. Rest offsets are
//! expressed in the world frame of the rest pose (all orientations identity),
//! so a child joint sits at `parent_position + R_parent · rest_offset`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::rotation::{EulerAngles, Mat3, Quaternion, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// Offset from the parent joint in the rest pose. For the root this is the
    /// avatar anchor position.
    pub rest_offset: Vec3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphViolation {
    Empty,
    NoRoot,
    MultipleRoots(Vec<usize>),
    IdMismatch { index: usize, id: usize },
    UnknownParent { node: usize, parent: usize },
    Cycle(usize),
    Disconnected(usize),
    ZeroLengthBone(usize),
    NonFinite(usize),
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::Empty => write!(f, "empty graph"),
            GraphViolation::NoRoot => write!(f, "no root"),
            GraphViolation::MultipleRoots(r) => write!(f, "multiple roots {r:?}"),
            GraphViolation::IdMismatch { index, id } => {
                write!(f, "node at index {index} has id {id}")
            }
            GraphViolation::UnknownParent { node, parent } => {
                write!(f, "node {node} references unknown parent {parent}")
            }
            GraphViolation::Cycle(n) => write!(f, "cycle through node {n}"),
            GraphViolation::Disconnected(n) => write!(f, "node {n} is disconnected from the root"),
            GraphViolation::ZeroLengthBone(n) => write!(f, "node {n} has a zero-length bone"),
            GraphViolation::NonFinite(n) => write!(f, "node {n} has a non-finite offset"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonGraph {
    pub nodes: Vec<SkeletonNode>,
}

/// Joint names of the default 25-joint humanoid, indexed by node id.
pub const HUMANOID_JOINT_NAMES: [&str; 25] = [
    "Hips",
    "Spine",
    "Spine1",
    "Spine2",
    "Neck",
    "Head",
    "HeadTop_End",
    "LeftShoulder",
    "LeftArm",
    "LeftForeArm",
    "LeftHand",
    "RightShoulder",
    "RightArm",
    "RightForeArm",
    "RightHand",
    "LeftUpLeg",
    "LeftLeg",
    "LeftFoot",
    "LeftToeBase",
    "LeftToe_End",
    "RightUpLeg",
    "RightLeg",
    "RightFoot",
    "RightToeBase",
    "RightToe_End",
];

impl SkeletonGraph {
    pub fn new(nodes: Vec<SkeletonNode>) -> Self {
        SkeletonGraph { nodes }
    }

    /// Default 25-joint humanoid in T-pose, hips anchored at `anchor`.
    pub fn humanoid(anchor: Vec3) -> Self {
        const P: [(Option<usize>, [f64; 3]); 25] = [
            (None, [0.0, 0.0, 0.0]),
            (Some(0), [0.0, 0.10, 0.0]),
            (Some(1), [0.0, 0.12, 0.0]),
            (Some(2), [0.0, 0.13, 0.0]),
            (Some(3), [0.0, 0.15, 0.0]),
            (Some(4), [0.0, 0.10, 0.02]),
            (Some(5), [0.0, 0.18, 0.0]),
            (Some(3), [0.07, 0.10, 0.0]),
            (Some(7), [0.12, 0.0, 0.0]),
            (Some(8), [0.27, 0.0, 0.0]),
            (Some(9), [0.25, 0.0, 0.0]),
            (Some(3), [-0.07, 0.10, 0.0]),
            (Some(11), [-0.12, 0.0, 0.0]),
            (Some(12), [-0.27, 0.0, 0.0]),
            (Some(13), [-0.25, 0.0, 0.0]),
            (Some(0), [0.09, -0.06, 0.0]),
            (Some(15), [0.0, -0.42, 0.0]),
            (Some(16), [0.0, -0.40, 0.0]),
            (Some(17), [0.0, -0.07, 0.12]),
            (Some(18), [0.0, 0.0, 0.07]),
            (Some(0), [-0.09, -0.06, 0.0]),
            (Some(20), [0.0, -0.42, 0.0]),
            (Some(21), [0.0, -0.40, 0.0]),
            (Some(22), [0.0, -0.07, 0.12]),
            (Some(23), [0.0, 0.0, 0.07]),
        ];
        let nodes = P
            .iter()
            .enumerate()
            .map(|(id, &(parent, off))| SkeletonNode {
                id,
                parent,
                rest_offset: if parent.is_none() {
                    anchor
                } else {
                    Vec3::from_array(off)
                },
            })
            .collect();
        SkeletonGraph { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Collects every structural problem instead of stopping at the first.
    pub fn validate(&self) -> core::result::Result<(), Vec<GraphViolation>> {
        let n = self.nodes.len();
        let mut out = Vec::new();
        if n == 0 {
            return Err(vec![GraphViolation::Empty]);
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                out.push(GraphViolation::IdMismatch {
                    index: i,
                    id: node.id,
                });
            }
            if !node.rest_offset.is_finite() {
                out.push(GraphViolation::NonFinite(i));
            }
            match node.parent {
                Some(p) if p >= n => out.push(GraphViolation::UnknownParent { node: i, parent: p }),
                Some(_) if node.rest_offset.norm() <= 0.0 => {
                    out.push(GraphViolation::ZeroLengthBone(i))
                }
                _ => {}
            }
        }
        let roots: Vec<usize> = (0..n).filter(|&i| self.nodes[i].parent.is_none()).collect();
        match roots.len() {
            0 => out.push(GraphViolation::NoRoot),
            1 => {}
            _ => out.push(GraphViolation::MultipleRoots(roots.clone())),
        }
        let main_root = roots.first().copied();
        for i in 0..n {
            // walk up at most n steps
            let mut cur = i;
            let mut steps = 0;
            let mut ended = None;
            while steps <= n {
                match self.nodes[cur].parent {
                    None => {
                        ended = Some(cur);
                        break;
                    }
                    Some(p) if p >= n => break,
                    Some(p) => cur = p,
                }
                steps += 1;
            }
            match ended {
                Some(r) if Some(r) == main_root => {}
                Some(_) => out.push(GraphViolation::Disconnected(i)),
                None if steps > n => out.push(GraphViolation::Cycle(i)),
                None => {}
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn root(&self) -> Option<usize> {
        self.nodes.iter().position(|n| n.parent.is_none())
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.nodes.len()];
        for node in &self.nodes {
            if let Some(p) = node.parent {
                if p < ch.len() {
                    ch[p].push(node.id);
                }
            }
        }
        ch
    }

    /// Breadth-first order from the root; parents always precede children.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        self.validate().map_err(Error::InvalidGraph)?;
        let children = self.children();
        let root = self
            .root()
            .ok_or(Error::InvalidGraph(vec![GraphViolation::NoRoot]))?;
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            queue.extend(children[i].iter().copied());
        }
        Ok(order)
    }

    /// Length of the bone ending at `i`; zero for the root.
    pub fn bone_length(&self, i: usize) -> f64 {
        match self.nodes[i].parent {
            Some(_) => self.nodes[i].rest_offset.norm(),
            None => 0.0,
        }
    }

    /// Sum of bone lengths on the root-to-`i` path.
    pub fn path_length(&self, i: usize) -> f64 {
        let mut total = 0.0;
        let mut cur = i;
        let mut guard = 0;
        while let Some(p) = self.nodes[cur].parent {
            total += self.nodes[cur].rest_offset.norm();
            cur = p;
            guard += 1;
            if guard > self.nodes.len() {
                break;
            }
        }
        total
    }

    /// Radius of the root-anchored sphere every joint stays inside, whatever
    /// the joint orientations.
    pub fn reach_radius(&self) -> f64 {
        (0..self.nodes.len())
            .map(|i| self.path_length(i))
            .fold(0.0, f64::max)
    }

    /// Undirected edges `(parent, child, bone length)`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.nodes
            .iter()
            .filter_map(|n| n.parent.map(|p| (p, n.id, n.rest_offset.norm())))
            .collect()
    }

    /// Neighbour lists with edge lengths, in node-id order per list.
    pub fn neighbors(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (p, c, len) in self.edges() {
            adj[p].push((c, len));
            adj[c].push((p, len));
        }
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| j);
        }
        adj
    }

    /// Avatar anchor, i.e. the root's rest offset.
    pub fn anchor(&self) -> Vec3 {
        self.root()
            .map(|r| self.nodes[r].rest_offset)
            .unwrap_or(Vec3::ZERO)
    }

    pub fn rest_pose(&self) -> Result<Pose> {
        let eulers = vec![EulerAngles::ZERO; self.nodes.len()];
        forward_kinematics(self, self.anchor(), &eulers)
    }
}

/// World position and world orientation per joint.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    pub positions: Vec<Vec3>,
    pub rotations: Vec<Quaternion>,
}

impl Pose {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.positions.iter().all(|p| p.is_finite()) && self.rotations.iter().all(|q| q.is_finite())
    }
}

/// Positions from per-joint world orientations given as matrices.
pub fn pose_from_world_rotations(
    graph: &SkeletonGraph,
    root_pos: Vec3,
    rotations: &[Mat3],
) -> Result<Vec<Vec3>> {
    let order = graph.topological_order()?;
    if rotations.len() != graph.len() {
        return Err(Error::LengthMismatch {
            what: "joint rotations",
            expected: graph.len(),
            found: rotations.len(),
        });
    }
    let mut pos = vec![Vec3::ZERO; graph.len()];
    for &i in &order {
        pos[i] = match graph.nodes[i].parent {
            None => root_pos,
            Some(p) => pos[p] + rotations[p] * graph.nodes[i].rest_offset,
        };
    }
    Ok(pos)
}

/// Rebuilds joint positions from per-joint Euler orientations.
///
/// The root lands on `root_pos`; every other joint is its parent's position
/// plus the parent's orientation applied to the joint's rest offset, so bone
/// lengths are preserved exactly and every joint stays within
/// [`SkeletonGraph::reach_radius`] of the root.
pub fn forward_kinematics(
    graph: &SkeletonGraph,
    root_pos: Vec3,
    eulers: &[EulerAngles],
) -> Result<Pose> {
    if eulers.len() != graph.len() {
        return Err(Error::LengthMismatch {
            what: "euler angles",
            expected: graph.len(),
            found: eulers.len(),
        });
    }
    let mats: Vec<Mat3> = eulers.iter().map(|e| e.to_rotation()).collect();
    let positions = pose_from_world_rotations(graph, root_pos, &mats)?;
    let rotations = eulers.iter().map(|e| e.to_quaternion()).collect();
    Ok(Pose {
        positions,
        rotations,
    })
}
