//! Joint estimation from a received point cloud, used to score the
//! point-cloud baseline on joint error.
//!
//! Transmitted points are labelled with their nearest joint and each
//! received point keeps the label of the point it carries. Each joint
//! estimate moves the true joint by the displacement between the received
//! and transmitted centroids of its label, so any point misplaced by the
//! channel drags the estimate with it.

use alloc::vec;
use alloc::vec::Vec;

use crate::nn::nearest_brute;
use crate::rotation::Vec3;

/// Nearest-joint label of each point. Points flagged `false` in `avatar`
/// stay unlabelled.
pub fn label_points(points: &[Vec3], avatar: &[bool], joints: &[Vec3]) -> Vec<Option<usize>> {
    points
        .iter()
        .zip(avatar)
        .map(|(&p, &a)| {
            if a {
                nearest_brute(joints, p).map(|(j, _)| j)
            } else {
                None
            }
        })
        .collect()
}

#[derive(Clone, Copy, Default)]
struct Acc {
    sum: Vec3,
    n: usize,
}

impl Acc {
    fn add(&mut self, p: Vec3) {
        self.sum += p;
        self.n += 1;
    }

    fn centroid(&self) -> Option<Vec3> {
        (self.n > 0).then(|| self.sum.scale(1.0 / self.n as f64))
    }
}

/// Joint positions estimated from `rx_points`, which correspond to
/// `tx_points` by index. `tx_labels` comes from [`label_points`] on
/// `tx_points`. A joint with no labelled points uses the shift of the
/// whole labelled avatar.
pub fn estimate_joints(
    joints: &[Vec3],
    tx_points: &[Vec3],
    tx_labels: &[Option<usize>],
    rx_points: &[Vec3],
) -> Vec<Vec3> {
    let n = joints.len();
    let mut tx_acc = vec![Acc::default(); n];
    let mut rx_acc = vec![Acc::default(); n];
    let (mut tx_all, mut rx_all) = (Acc::default(), Acc::default());
    for (&p, l) in tx_points.iter().zip(tx_labels) {
        if let Some(j) = *l {
            tx_acc[j].add(p);
            tx_all.add(p);
        }
    }
    for (&p, l) in rx_points.iter().zip(tx_labels) {
        if let Some(j) = *l {
            rx_acc[j].add(p);
            rx_all.add(p);
        }
    }
    let global = match (rx_all.centroid(), tx_all.centroid()) {
        (Some(r), Some(t)) => r - t,
        _ => Vec3::ZERO,
    };
    (0..n)
        .map(|j| match (rx_acc[j].centroid(), tx_acc[j].centroid()) {
            (Some(r), Some(t)) => joints[j] + (r - t),
            _ => joints[j] + global,
        })
        .collect()
}
