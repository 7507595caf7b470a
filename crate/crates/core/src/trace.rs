//! Animation traces: adjacent-frame movement statistics and a procedural
//! dance generator.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rotation::{EulerAngles, Mat3, Quaternion, Vec3};
use crate::skeleton::{pose_from_world_rotations, Pose, SkeletonGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct AnimationTrace {
    pub fps: f64,
    pub frames: Vec<Pose>,
}

impl AnimationTrace {
    pub fn joint_count(&self) -> usize {
        self.frames.first().map_or(0, |f| f.len())
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Checks the constant-joint-count invariant.
    pub fn check(&self) -> Result<()> {
        let n = self.joint_count();
        for f in &self.frames {
            if f.positions.len() != n || f.rotations.len() != n {
                return Err(Error::LengthMismatch {
                    what: "trace frame joints",
                    expected: n,
                    found: f.positions.len().min(f.rotations.len()),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    fn build(values: &[f64], max: f64, bins: usize) -> Histogram {
        let bins = bins.max(1);
        let width = if max > 0.0 { max / bins as f64 } else { 0.0 };
        let mut counts = vec![0; bins];
        for &v in values {
            let b = if width > 0.0 {
                ((v / width) as usize).min(bins - 1)
            } else {
                0
            };
            counts[b] += 1;
        }
        Histogram {
            bin_width: width,
            counts,
        }
    }

    /// Lower edge of every bin.
    pub fn edges(&self) -> Vec<f64> {
        (0..self.counts.len())
            .map(|i| i as f64 * self.bin_width)
            .collect()
    }
}

/// Per-axis extrema of `|l_t - l_{t-1}|` over all joints and transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStats {
    pub min: Vec3,
    pub max: Vec3,
    pub histograms: [Histogram; 3],
}

pub fn trace_stats(trace: &AnimationTrace, bins: usize) -> Result<TraceStats> {
    if trace.frames.len() < 2 {
        return Err(Error::InsufficientFrames {
            needed: 2,
            found: trace.frames.len(),
        });
    }
    trace.check()?;
    let mut per_axis: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for w in trace.frames.windows(2) {
        for (a, b) in w[0].positions.iter().zip(&w[1].positions) {
            let d = *b - *a;
            for (axis, vals) in per_axis.iter_mut().enumerate() {
                vals.push(d.axis(axis).abs());
            }
        }
    }
    let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let min = Vec3::new(lo(&per_axis[0]), lo(&per_axis[1]), lo(&per_axis[2]));
    let max = Vec3::new(hi(&per_axis[0]), hi(&per_axis[1]), hi(&per_axis[2]));
    let histograms = [
        Histogram::build(&per_axis[0], max.x, bins),
        Histogram::build(&per_axis[1], max.y, bins),
        Histogram::build(&per_axis[2], max.z, bins),
    ];
    Ok(TraceStats {
        min,
        max,
        histograms,
    })
}

/// Largest adjacent-frame displacement per axis accepted from the generator,
/// matching the movement range observed on captured dance traces.
pub const MOVEMENT_RANGE: Vec3 = Vec3::new(0.52, 0.76, 0.74);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// Spine, neck, head and arms animated; legs still.
    UpperBody,
    /// Every joint trembles with a small amplitude.
    SlightShaking,
    /// Every joint animated with dance-sized amplitudes.
    FullBody,
}

impl TraceKind {
    pub const ALL: [TraceKind; 3] = [
        TraceKind::UpperBody,
        TraceKind::SlightShaking,
        TraceKind::FullBody,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TraceKind::UpperBody => "upper-body",
            TraceKind::SlightShaking => "slight-shaking",
            TraceKind::FullBody => "full-body",
        }
    }

    /// Worst-case joint displacement per frame the generator allows.
    fn displacement_limit(self) -> f64 {
        match self {
            TraceKind::SlightShaking => 0.09,
            _ => 0.9 * MOVEMENT_RANGE.x.min(MOVEMENT_RANGE.y).min(MOVEMENT_RANGE.z),
        }
    }
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TraceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper-body" | "upper_body" | "upper" => Ok(TraceKind::UpperBody),
            "slight-shaking" | "slight_shaking" | "shaking" => Ok(TraceKind::SlightShaking),
            "full-body" | "full_body" | "full" => Ok(TraceKind::FullBody),
            other => Err(Error::Config(alloc::format!(
                "unknown trace kind '{other}', expected upper-body, slight-shaking or full-body"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct JointMotion {
    amp_deg: [f64; 3],
    freq_hz: [f64; 3],
    phase: [f64; 3],
}

impl JointMotion {
    fn local(&self, t: f64) -> EulerAngles {
        let a = |k: usize| {
            self.amp_deg[k]
                * (2.0 * core::f64::consts::PI * self.freq_hz[k] * t + self.phase[k]).sin()
        };
        EulerAngles::new(a(0), a(1), a(2))
    }

    /// Upper bound on the angular speed in rad/s.
    fn max_rate(&self) -> f64 {
        (0..3)
            .map(|k| 2.0 * core::f64::consts::PI * self.freq_hz[k] * self.amp_deg[k].to_radians())
            .sum()
    }
}

/// Procedural dance trace over `graph` with the root fixed at its anchor.
///
/// Each animated joint gets a local rotation made of three seeded sinusoids.
/// Amplitudes are scaled down when needed so that the analytic worst-case
/// joint displacement between frames stays below the kind's limit.
pub fn gen_trace(
    graph: &SkeletonGraph,
    kind: TraceKind,
    frames: usize,
    seed: u64,
    fps: f64,
) -> Result<AnimationTrace> {
    if frames < 2 {
        return Err(Error::InsufficientFrames {
            needed: 2,
            found: frames,
        });
    }
    if !(fps > 0.0) {
        return Err(Error::Config(alloc::format!(
            "fps must be positive, got {fps}"
        )));
    }
    let order = graph.topological_order()?;
    let rest = graph.rest_pose()?;
    let root = order[0];
    let root_y = rest.positions[root].y;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7ace);

    let mut motions = vec![JointMotion::default(); graph.len()];
    for &i in &order {
        let animated = match kind {
            TraceKind::UpperBody => i != root && rest.positions[i].y > root_y,
            _ => true,
        };
        if !animated {
            continue;
        }
        let (amp, freq) = match kind {
            TraceKind::SlightShaking => ((0.5, 1.5), (0.5, 2.0)),
            TraceKind::UpperBody => ((10.0, 30.0), (0.3, 1.0)),
            TraceKind::FullBody if i == root => ((5.0, 15.0), (0.2, 0.6)),
            TraceKind::FullBody => ((8.0, 25.0), (0.3, 1.0)),
        };
        let m = &mut motions[i];
        for k in 0..3 {
            m.amp_deg[k] = rng.random_range(amp.0..amp.1);
            m.freq_hz[k] = rng.random_range(freq.0..freq.1);
            m.phase[k] = rng.random_range(0.0..core::f64::consts::TAU);
        }
    }

    // worst-case displacement of joint i: sum over strict ancestors a of
    // rate(a) * (path length a -> i) / fps
    let mut bound: f64 = 0.0;
    for i in 0..graph.len() {
        let mut cur = i;
        let mut dist = 0.0;
        let mut b = 0.0;
        while let Some(p) = graph.nodes[cur].parent {
            dist += graph.nodes[cur].rest_offset.norm();
            b += motions[p].max_rate() * dist / fps;
            cur = p;
        }
        bound = bound.max(b);
    }
    let limit = kind.displacement_limit();
    if bound > limit {
        let s = limit / bound;
        for m in &mut motions {
            for a in &mut m.amp_deg {
                *a *= s;
            }
        }
    }

    let anchor = rest.positions[root];
    let mut out = Vec::with_capacity(frames);
    let mut world = vec![Mat3::IDENTITY; graph.len()];
    for f in 0..frames {
        let t = f as f64 / fps;
        for &i in &order {
            let local = motions[i].local(t).to_rotation();
            world[i] = match graph.nodes[i].parent {
                None => local,
                Some(p) => world[p] * local,
            };
        }
        let positions = pose_from_world_rotations(graph, anchor, &world)?;
        let rotations = world.iter().map(Quaternion::from_matrix).collect();
        out.push(Pose {
            positions,
            rotations,
        });
    }
    Ok(AnimationTrace { fps, frames: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pose(points: &[[f64; 3]]) -> Pose {
        Pose {
            positions: points.iter().map(|&p| Vec3::from_array(p)).collect(),
            rotations: vec![Quaternion::IDENTITY; points.len()],
        }
    }

    #[test]
    fn single_frame_rejected() {
        let t = AnimationTrace {
            fps: 60.0,
            frames: vec![pose(&[[0.0; 3]])],
        };
        assert!(matches!(
            trace_stats(&t, 10),
            Err(Error::InsufficientFrames { .. })
        ));
    }

    #[test]
    fn static_trace_has_zero_range() {
        let p = pose(&[[0.0, 1.0, 0.0], [1.0, 2.0, 3.0]]);
        let t = AnimationTrace {
            fps: 60.0,
            frames: vec![p.clone(), p.clone(), p],
        };
        let s = trace_stats(&t, 4).unwrap();
        assert_eq!(s.min, Vec3::ZERO);
        assert_eq!(s.max, Vec3::ZERO);
        assert_eq!(s.histograms[0].counts.iter().sum::<usize>(), 4);
    }

    #[test]
    fn one_joint_moves_on_x() {
        let a = pose(&[[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]);
        let b = pose(&[[0.3, 0.0, 0.0], [1.0, 1.0, 1.0]]);
        let s = trace_stats(
            &AnimationTrace {
                fps: 60.0,
                frames: vec![a, b],
            },
            3,
        )
        .unwrap();
        assert!((s.max.x - 0.3).abs() < 1e-15);
        assert_eq!(s.min.x, 0.0);
        assert_eq!(s.max.y, 0.0);
        assert_eq!(s.histograms[0].counts, vec![1, 0, 1]);
    }

    #[test]
    fn generator_is_deterministic_and_anchored() {
        let g = SkeletonGraph::humanoid(Vec3::new(0.0, 1.0, 0.0));
        for kind in TraceKind::ALL {
            let a = gen_trace(&g, kind, 30, 9, 60.0).unwrap();
            let b = gen_trace(&g, kind, 30, 9, 60.0).unwrap();
            assert_eq!(a, b);
            assert!(a
                .frames
                .iter()
                .all(|f| f.positions[0] == Vec3::new(0.0, 1.0, 0.0)));
        }
    }

    #[test]
    fn upper_body_keeps_legs_still() {
        let g = SkeletonGraph::humanoid(Vec3::new(0.0, 1.0, 0.0));
        let t = gen_trace(&g, TraceKind::UpperBody, 20, 1, 60.0).unwrap();
        for leg in 15..25 {
            assert!(t
                .frames
                .iter()
                .all(|f| f.positions[leg] == t.frames[0].positions[leg]));
        }
        assert!(t.frames[5].positions[10] != t.frames[0].positions[10]);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "full-body".parse::<TraceKind>().unwrap(),
            TraceKind::FullBody
        );
        assert!("moonwalk".parse::<TraceKind>().is_err());
    }
}
