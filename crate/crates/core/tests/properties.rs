use gsar_core::channel::quantize::{dequantize, quantize};
use gsar_core::channel::{sample_channel, transmit, BitStream, ChannelRealization, Field};
use gsar_core::metrics::p2point;
use gsar_core::pointcloud::{skin_pose, BoundPoint, Point, PointCloud, SkinBinding};
use gsar_core::rotation::{quat_to_euler, EulerAngles, Quaternion, Vec3};
use gsar_core::semantics::{absr_weights, channel_map, WeightVector, ABSR_ALPHA};
use gsar_core::skeleton::{forward_kinematics, SkeletonGraph, SkeletonNode};
use gsar_core::trace::{trace_stats, AnimationTrace};
use num_complex::Complex64;
use proptest::prelude::*;

fn unit_quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("non-degenerate", |a| {
            a.iter().map(|x| x * x).sum::<f64>() > 1e-3
        })
        .prop_map(|a| Quaternion::from_array(a).normalized().unwrap())
}

fn euler() -> impl Strategy<Value = EulerAngles> {
    (-180.0f64..180.0, -180.0f64..180.0, -180.0f64..180.0)
        .prop_map(|(p, r, y)| EulerAngles::new(p, r, y))
}

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

/// Random tree: each node's parent has a lower index.
fn skeleton() -> impl Strategy<Value = SkeletonGraph> {
    (2usize..20)
        .prop_flat_map(|n| {
            let parents: Vec<_> = (1..n).map(|i| 0..i).collect();
            let offsets =
                prop::collection::vec(vec3(1.0).prop_filter("bone", |v| v.norm() > 1e-3), n - 1);
            (parents, offsets, vec3(2.0))
        })
        .prop_map(|(parents, offsets, anchor)| {
            let mut nodes = vec![SkeletonNode {
                id: 0,
                parent: None,
                rest_offset: anchor,
            }];
            for (i, (p, o)) in parents.into_iter().zip(offsets).enumerate() {
                nodes.push(SkeletonNode {
                    id: i + 1,
                    parent: Some(p),
                    rest_offset: o,
                });
            }
            SkeletonGraph::new(nodes)
        })
}

fn cloud(max: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((vec3(3.0), prop::array::uniform3(any::<u8>())), 1..max)
        .prop_map(|v| PointCloud::new(v.into_iter().map(|(p, c)| Point::new(p, c)).collect()))
}

proptest! {
    #[test]
    fn euler_round_trip(q in unit_quaternion()) {
        let Quaternion { x, y, z, w } = q;
        prop_assume!((2.0 * (w * y - x * z)).abs() < 0.99);
        let e = quat_to_euler(q);
        prop_assert!(e.to_rotation().max_abs_diff(&q.to_matrix()) < 1e-6);
        for a in [e.pitch, e.roll, e.yaw] {
            prop_assert!((-180.0..=180.0).contains(&a));
        }
    }

    #[test]
    fn fk_keeps_bones_and_reach(g in skeleton(), seed_angles in prop::collection::vec(euler(), 20)) {
        let eulers: Vec<EulerAngles> = seed_angles.into_iter().take(g.len()).collect();
        let root = g.anchor();
        let pose = forward_kinematics(&g, root, &eulers).unwrap();
        prop_assert_eq!(pose.positions[0], root);
        for n in &g.nodes {
            if let Some(p) = n.parent {
                let bone = pose.positions[n.id].distance(pose.positions[p]);
                prop_assert!((bone - n.rest_offset.norm()).abs() < 1e-9);
            }
            prop_assert!(pose.positions[n.id].distance(root) <= g.path_length(n.id) + 1e-9);
            prop_assert!(pose.positions[n.id].distance(root) <= g.reach_radius() + 1e-9);
        }
    }

    #[test]
    fn skinning_is_rigid(
        g in skeleton(),
        angles in prop::collection::vec(euler(), 20),
        offsets in prop::collection::vec((0usize..20, vec3(0.5)), 1..40),
    ) {
        let eulers: Vec<EulerAngles> = angles.into_iter().take(g.len()).collect();
        let pose = forward_kinematics(&g, g.anchor(), &eulers).unwrap();
        let binding = SkinBinding {
            points: offsets
                .iter()
                .map(|&(node, offset)| BoundPoint { node: node % g.len(), offset, color: [node as u8, 1, 2] })
                .collect(),
        };
        let skinned = skin_pose(&binding, &pose).unwrap();
        prop_assert_eq!(skinned.len(), binding.len());
        for (b, p) in binding.points.iter().zip(&skinned.points) {
            prop_assert!((p.position.distance(pose.positions[b.node]) - b.offset.norm()).abs() < 1e-9);
            prop_assert_eq!(p.color, b.color);
        }
    }

    #[test]
    fn p2point_symmetric_and_scaled(a in cloud(40), b in cloud(40), s in 0.1f64..10.0) {
        let d = p2point(&a, &b).unwrap();
        prop_assert_eq!(d, p2point(&b, &a).unwrap());
        prop_assert_eq!(p2point(&a, &a).unwrap(), 0.0);
        let scale = |c: &PointCloud| PointCloud::new(c.points.iter().map(|p| Point::new(p.position * s, p.color)).collect());
        prop_assert!((p2point(&scale(&a), &scale(&b)).unwrap() - s * d).abs() <= 1e-9 * (1.0 + s * d));
    }

    #[test]
    fn channel_map_pairs_best_with_best(
        w in prop::collection::vec(0.0f64..1.0, 1..40),
        gains in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..70),
    ) {
        let ch = ChannelRealization::new(gains.iter().map(|&(r, i)| Complex64::new(r, i)).collect(), 1.0, 0.1).unwrap();
        let weights = WeightVector(w.clone());
        let map = channel_map(&weights, &ch).unwrap();
        prop_assert_eq!(map.len(), w.len());
        let strength = ch.strength();
        let top_item = weights.ranking()[0];
        let best = strength.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(strength[map[top_item]], best);
        let top: Vec<usize> = weights.ranking().into_iter().take(w.len().min(gains.len())).collect();
        let mut used: Vec<usize> = top.iter().map(|&i| map[i]).collect();
        used.sort_unstable();
        used.dedup();
        prop_assert_eq!(used.len(), top.len());
        // a heavier item never gets a weaker subchannel, within the first wrap
        for a in &top {
            for b in &top {
                if w[*a] > w[*b] {
                    prop_assert!(strength[map[*a]] >= strength[map[*b]]);
                }
            }
        }
    }

    #[test]
    fn absr_is_permutation_equivariant(g in skeleton(), perm_seed in any::<u64>()) {
        let n = g.len();
        // permutation keeping node 0 first is not required, any relabelling works
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = perm_seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut nodes: Vec<SkeletonNode> = g
            .nodes
            .iter()
            .map(|nd| SkeletonNode { id: perm[nd.id], parent: nd.parent.map(|p| perm[p]), rest_offset: nd.rest_offset })
            .collect();
        nodes.sort_by_key(|nd| nd.id);
        let h = SkeletonGraph::new(nodes);
        let wg = absr_weights(&g, ABSR_ALPHA, 1e-12, 100_000).unwrap();
        let wh = absr_weights(&h, ABSR_ALPHA, 1e-12, 100_000).unwrap();
        prop_assert!((wg.0.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for i in 0..n {
            prop_assert!(wg.0[i] >= 0.0);
            prop_assert!((wg.0[i] - wh.0[perm[i]]).abs() < 1e-9);
        }
    }

    #[test]
    fn quantizer_round_trip(t in 0.0f64..=1.0, bits in 4u32..=24) {
        for field in [Field::Position, Field::Quaternion, Field::Euler] {
            let r = field.range();
            let v = r.min + t * (r.max - r.min);
            let (idx, clamped) = quantize(v, r, bits);
            prop_assert!(!clamped);
            let half_lsb = (r.max - r.min) / ((1u64 << bits) - 1) as f64 / 2.0;
            prop_assert!((dequantize(idx, r, bits) - v).abs() <= half_lsb * (1.0 + 1e-9));
        }
    }

    #[test]
    fn errors_shrink_with_snr(seed in any::<u64>(), noise_seed in any::<u64>()) {
        let bits: Vec<bool> = (0..2048).map(|i| (i * 7 + 3) % 5 < 2).collect();
        let mut stream = BitStream::new();
        for chunk in bits.chunks(64) {
            stream.push_segment(chunk.iter().copied());
        }
        let mut last = usize::MAX;
        for snr in [0.5, 3.0, 5.0, 8.0, 10.0, 13.0] {
            let ch = sample_channel(16, snr, seed).unwrap();
            let rx = transmit(&stream, &ch, None, noise_seed).unwrap();
            let e = rx.bits.count_errors(&stream);
            prop_assert!(e <= last, "{} errors at {} dB after {}", e, snr, last);
            last = e;
        }
    }

    #[test]
    fn trace_stats_invariances(frames in prop::collection::vec(prop::collection::vec(vec3(2.0), 4), 2..6)) {
        let poses: Vec<_> = frames
            .iter()
            .map(|p| gsar_core::skeleton::Pose { positions: p.clone(), rotations: vec![Quaternion::IDENTITY; 4] })
            .collect();
        let t = AnimationTrace { fps: 60.0, frames: poses.clone() };
        let base = trace_stats(&t, 8).unwrap();
        let rev = AnimationTrace { fps: 60.0, frames: poses.iter().rev().cloned().collect() };
        let perm = AnimationTrace {
            fps: 60.0,
            frames: poses
                .iter()
                .map(|p| gsar_core::skeleton::Pose {
                    positions: vec![p.positions[2], p.positions[0], p.positions[3], p.positions[1]],
                    rotations: p.rotations.clone(),
                })
                .collect(),
        };
        for other in [rev, perm] {
            let s = trace_stats(&other, 8).unwrap();
            prop_assert_eq!(s.min, base.min);
            prop_assert_eq!(s.max, base.max);
        }
    }
}
