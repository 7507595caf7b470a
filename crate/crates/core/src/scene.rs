//! Procedural scene assets: an avatar surface cloud sampled on capsules
//! around the rest-pose bones and a stationary table.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pointcloud::{Point, PointCloud};
use crate::rotation::Vec3;
use crate::skeleton::SkeletonGraph;

const UPPER_COLOR: [u8; 3] = [150, 155, 170];
const LOWER_COLOR: [u8; 3] = [135, 145, 170];
const TABLE_COLOR: [u8; 3] = [139, 94, 60];
const JITTER: i16 = 6;

fn jitter(rng: &mut ChaCha8Rng, base: [u8; 3]) -> [u8; 3] {
    core::array::from_fn(|c| {
        (base[c] as i16 + rng.random_range(-JITTER..=JITTER)).clamp(0, 255) as u8
    })
}

fn unit_vector(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..core::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Any unit vector orthogonal to `d`.
fn orthonormal(d: Vec3) -> (Vec3, Vec3) {
    let a = if d.x.abs() < 0.9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    let u = d.cross(a);
    let u = u.scale(1.0 / u.norm());
    let v = d.cross(u);
    (u, v)
}

struct Capsule {
    a: Vec3,
    b: Vec3,
    radius: f64,
}

impl Capsule {
    fn area(&self) -> f64 {
        let len = self.a.distance(self.b);
        2.0 * core::f64::consts::PI * self.radius * len
            + 4.0 * core::f64::consts::PI * self.radius * self.radius
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec3 {
        let axis = self.b - self.a;
        let len = axis.norm();
        let side = 2.0 * core::f64::consts::PI * self.radius * len;
        if rng.random_range(0.0..self.area()) < side {
            let d = axis.scale(1.0 / len);
            let (u, v) = orthonormal(d);
            let t: f64 = rng.random_range(0.0..1.0);
            let phi: f64 = rng.random_range(0.0..core::f64::consts::TAU);
            self.a + axis * t + (u * phi.cos() + v * phi.sin()) * self.radius
        } else {
            let end = if rng.random_bool(0.5) { self.a } else { self.b };
            end + unit_vector(rng) * self.radius
        }
    }
}

/// Rest-pose avatar surface with `n_points` points.
///
/// Capsule radii scale with bone length; bones on the central vertical
/// column above the root get a torso-sized radius. The avatar is a flat
/// two-tone mannequin: points below the root take the trouser colour, the
/// rest the body colour.
pub fn avatar_rest_cloud(graph: &SkeletonGraph, n_points: usize, seed: u64) -> Result<PointCloud> {
    let rest = graph.rest_pose()?;
    let root = graph.root().ok_or(Error::UnknownNode(0))?;
    let root_pos = rest.positions[root];
    let mut capsules = Vec::new();
    for (p, c, len) in graph.edges() {
        let (a, b) = (rest.positions[p], rest.positions[c]);
        let central =
            (a.x - root_pos.x).abs() < 1e-6 && (b.x - root_pos.x).abs() < 1e-6 && b.y > root_pos.y;
        let radius = if central && p != root && c != root {
            if graph.children()[c].is_empty() {
                0.09
            } else {
                0.12
            }
        } else {
            (0.3 * len).clamp(0.035, 0.09)
        };
        capsules.push(Capsule { a, b, radius });
    }
    if capsules.is_empty() {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: graph.len(),
        });
    }
    let total: f64 = capsules.iter().map(Capsule::area).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa7a7_0001);
    let mut points = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let mut pick = rng.random_range(0.0..total);
        let mut chosen = &capsules[capsules.len() - 1];
        for c in &capsules {
            if pick < c.area() {
                chosen = c;
                break;
            }
            pick -= c.area();
        }
        let pos = chosen.sample(&mut rng);
        let color = if pos.y < root_pos.y {
            LOWER_COLOR
        } else {
            UPPER_COLOR
        };
        points.push(Point::new(pos, color));
    }
    Ok(PointCloud::new(points))
}

/// Default placement of the stationary model.
pub const TABLE_ORIGIN: Vec3 = Vec3::new(1.5, 0.0, 0.0);

/// A table (0.6 m square top at 0.75 m, four legs) around `origin`, which
/// marks the centre of the floor footprint.
pub fn stationary_cloud(origin: Vec3, n_points: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7ab1_e000);
    let half = 0.3;
    let top_y = 0.75;
    let thick = 0.04;
    let leg_r = 0.025;
    let leg_h = top_y - thick / 2.0;
    let top_area = 2.0 * (2.0 * half) * (2.0 * half) + 4.0 * (2.0 * half) * thick;
    let leg_area = 2.0 * core::f64::consts::PI * leg_r * leg_h;
    let total = top_area + 4.0 * leg_area;
    let corners = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)];
    let mut points = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let pick = rng.random_range(0.0..total);
        let local = if pick < top_area {
            // a point on the slab surface: faces chosen by area
            let face = rng.random_range(0.0..top_area);
            let u = rng.random_range(-half..half);
            let v = rng.random_range(-half..half);
            let big = 2.0 * (2.0 * half) * (2.0 * half);
            if face < big {
                let y = if face < big / 2.0 {
                    top_y + thick / 2.0
                } else {
                    top_y - thick / 2.0
                };
                Vec3::new(u, y, v)
            } else {
                let y = top_y + rng.random_range(-thick / 2.0..thick / 2.0);
                match rng.random_range(0..4) {
                    0 => Vec3::new(half, y, v),
                    1 => Vec3::new(-half, y, v),
                    2 => Vec3::new(u, y, half),
                    _ => Vec3::new(u, y, -half),
                }
            }
        } else {
            let (cx, cz) = corners[rng.random_range(0..4)];
            let inset = half - 0.05;
            let phi: f64 = rng.random_range(0.0..core::f64::consts::TAU);
            Vec3::new(
                cx * inset + leg_r * phi.cos(),
                rng.random_range(0.0..leg_h),
                cz * inset + leg_r * phi.sin(),
            )
        };
        points.push(Point::new(origin + local, jitter(&mut rng, TABLE_COLOR)));
    }
    PointCloud::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn avatar_cloud_wraps_the_skeleton() {
        let g = SkeletonGraph::humanoid(Vec3::new(0.0, 1.0, 0.0));
        let c = avatar_rest_cloud(&g, 3000, 1).unwrap();
        assert_eq!(c.len(), 3000);
        let (lo, hi) = c.bounds().unwrap();
        assert!(lo.y > -0.1 && hi.y < 1.9);
        assert!(hi.x < 0.85 && lo.x > -0.85);
        assert_eq!(c, avatar_rest_cloud(&g, 3000, 1).unwrap());
    }

    #[test]
    fn table_stays_clear_of_avatar() {
        let t = stationary_cloud(TABLE_ORIGIN, 1000, 3);
        let (lo, hi) = t.bounds().unwrap();
        assert!(lo.x >= 1.5 - 0.31 && hi.x <= 1.5 + 0.31);
        assert!(lo.y >= 0.0 && hi.y <= 0.78);
    }
}
