//! Coloured point clouds: rigid skinning from poses, farthest point
//! downsampling and midpoint upsampling.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::nn::{k_nearest_brute, KdTree, BRUTE_FORCE_LIMIT};
use crate::rotation::{Mat3, Vec3};
use crate::skeleton::{Pose, SkeletonGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub position: Vec3,
    pub color: [u8; 3],
}

impl Point {
    pub const fn new(position: Vec3, color: [u8; 3]) -> Self {
        Point { position, color }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Point>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Self {
        PointCloud { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| p.position).collect()
    }

    /// Axis-aligned bounds, `None` when empty.
    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let first = self.points.first()?.position;
        Some(self.points.iter().fold((first, first), |(lo, hi), p| {
            (lo.min(p.position), hi.max(p.position))
        }))
    }

    pub fn extend(&mut self, other: &PointCloud) {
        self.points.extend_from_slice(&other.points);
    }

    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud::new(indices.iter().map(|&i| self.points[i]).collect())
    }
}

/// One skinned point: the joint it follows and its offset from that joint in
/// the rest pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub node: usize,
    pub offset: Vec3,
    pub color: [u8; 3],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SkinBinding {
    pub points: Vec<BoundPoint>,
}

fn segment_distance_squared(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.distance_squared(a + ab * t)
}

impl SkinBinding {
    /// Binds every rest-pose point to the bone segment nearest to it. A bone
    /// is driven by the orientation of its parent joint, so the point follows
    /// that joint. Ties go to the lower child id.
    pub fn bind_nearest_bone(
        graph: &SkeletonGraph,
        rest_cloud: &PointCloud,
    ) -> Result<SkinBinding> {
        let rest = graph.rest_pose()?;
        let root = graph.root().ok_or(Error::UnknownNode(0))?;
        let bones: Vec<(usize, usize)> = graph.edges().iter().map(|&(p, c, _)| (p, c)).collect();
        let points = rest_cloud
            .points
            .iter()
            .map(|pt| {
                let mut best = (f64::INFINITY, root);
                for &(p, c) in &bones {
                    let d =
                        segment_distance_squared(pt.position, rest.positions[p], rest.positions[c]);
                    if d < best.0 {
                        best = (d, p);
                    }
                }
                let node = best.1;
                BoundPoint {
                    node,
                    offset: pt.position - rest.positions[node],
                    color: pt.color,
                }
            })
            .collect();
        Ok(SkinBinding { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Places every bound point at its joint's world position plus the joint's
/// world orientation applied to the rest offset. Colours are copied.
pub fn skin_pose(binding: &SkinBinding, pose: &Pose) -> Result<PointCloud> {
    let mats: Vec<Mat3> = pose.rotations.iter().map(|q| q.to_matrix()).collect();
    let n = pose.positions.len().min(mats.len());
    binding
        .points
        .iter()
        .map(|b| {
            if b.node >= n {
                return Err(Error::UnknownNode(b.node));
            }
            Ok(Point::new(
                pose.positions[b.node] + mats[b.node] * b.offset,
                b.color,
            ))
        })
        .collect::<Result<Vec<_>>>()
        .map(PointCloud::new)
}

/// Indices chosen by farthest point sampling, in selection order.
///
/// Starts at `start`; each step takes the unselected point whose distance to
/// the selected set is largest, ties going to the lowest index.
pub fn fps_select(positions: &[Vec3], target: usize, start: usize) -> Result<Vec<usize>> {
    let n = positions.len();
    if target == 0 || target > n {
        return Err(Error::InvalidTarget {
            target,
            available: n,
        });
    }
    if start >= n {
        return Err(Error::UnknownNode(start));
    }
    let mut min_d = vec![f64::INFINITY; n];
    let mut taken = vec![false; n];
    let mut out = Vec::with_capacity(target);
    let mut cur = start;
    loop {
        out.push(cur);
        taken[cur] = true;
        if out.len() == target {
            break;
        }
        let c = positions[cur];
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for i in 0..n {
            if taken[i] {
                continue;
            }
            let d = c.distance_squared(positions[i]);
            if d < min_d[i] {
                min_d[i] = d;
            }
            if min_d[i] > best.0 {
                best = (min_d[i], i);
            }
        }
        cur = best.1;
    }
    Ok(out)
}

pub fn fps_downsample(cloud: &PointCloud, target: usize, start: usize) -> Result<PointCloud> {
    let idx = fps_select(&cloud.positions(), target, start)?;
    Ok(cloud.select(&idx))
}

/// Densifies a cloud to `target` points with midpoints.
///
/// Pass `k` (starting at 1) walks the original points in index order and
/// emits the midpoint between each point and its `k`-th nearest original
/// neighbour; colours average per channel, rounding half up. The output is
/// the original points followed by the generated ones.
pub fn upsample_interpolate(cloud: &PointCloud, target: usize) -> Result<PointCloud> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: n,
        });
    }
    if target < n {
        return Err(Error::InvalidTarget {
            target,
            available: n,
        });
    }
    let extra = target - n;
    let passes = extra.div_ceil(n);
    let k = passes.min(n - 1);
    let positions = cloud.positions();
    let neighbours: Vec<Vec<(usize, f64)>> = if k == 0 {
        Vec::new()
    } else if n <= BRUTE_FORCE_LIMIT / 2 {
        (0..n)
            .map(|i| k_nearest_brute(&positions, positions[i], k, Some(i)))
            .collect()
    } else {
        let grid = KdTree::new(&positions);
        (0..n)
            .map(|i| grid.k_nearest(positions[i], k, Some(i)))
            .collect()
    };
    let mut points = cloud.points.clone();
    points.reserve(extra);
    let mut emitted = 0;
    'outer: for pass in 0..passes {
        let rank = pass % (n - 1);
        for (i, a) in cloud.points.iter().enumerate() {
            if emitted == extra {
                break 'outer;
            }
            let b = &cloud.points[neighbours[i][rank].0];
            let color =
                core::array::from_fn(|c| (a.color[c] as u16 + b.color[c] as u16).div_ceil(2) as u8);
            points.push(Point::new((a.position + b.position) * 0.5, color));
            emitted += 1;
        }
    }
    Ok(PointCloud::new(points))
}
