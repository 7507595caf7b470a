//! Slow reference implementations shared by integration and acceptance
//! tests.
#![allow(dead_code)]

use gsar_core::channel::{sample_channel, transmit, BitStream};
use gsar_core::pipeline::derive_seed;
use gsar_core::pointcloud::{Point, PointCloud};
use gsar_core::rotation::Vec3;
use gsar_core::skeleton::{SkeletonGraph, SkeletonNode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_cloud(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> PointCloud {
    PointCloud::new(
        (0..n)
            .map(|_| {
                let p = Vec3::new(
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                ) * scale;
                Point::new(p, [rng.random(), rng.random(), rng.random()])
            })
            .collect(),
    )
}

/// Greedy max-min selection recomputing every distance at every step.
pub fn fps_oracle(pts: &[Vec3], k: usize, start: usize) -> Vec<usize> {
    let mut chosen = vec![start];
    while chosen.len() < k {
        let mut best: Option<(f64, usize)> = None;
        for i in 0..pts.len() {
            if chosen.contains(&i) {
                continue;
            }
            let d = chosen
                .iter()
                .map(|&c| {
                    let v = pts[i] - pts[c];
                    v.x * v.x + v.y * v.y + v.z * v.z
                })
                .fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, i));
            }
        }
        chosen.push(best.unwrap().1);
    }
    chosen
}

/// Tree from parent links and bone lengths; bones point along +y.
pub fn tree(parents: &[Option<usize>], lengths: &[f64]) -> SkeletonGraph {
    SkeletonGraph::new(
        parents
            .iter()
            .zip(lengths)
            .enumerate()
            .map(|(id, (&parent, &len))| SkeletonNode {
                id,
                parent,
                rest_offset: if parent.is_some() {
                    Vec3::new(0.0, len, 0.0)
                } else {
                    Vec3::ZERO
                },
            })
            .collect(),
    )
}

pub fn parents_and_lengths(g: &SkeletonGraph) -> (Vec<Option<usize>>, Vec<f64>) {
    let parents = g.nodes.iter().map(|n| n.parent).collect();
    let lengths = g
        .nodes
        .iter()
        .map(|n| {
            if n.parent.is_some() {
                n.rest_offset.norm()
            } else {
                0.0
            }
        })
        .collect();
    (parents, lengths)
}

/// Dense solve of `(c I − A) x = b` by Gaussian elimination with partial
/// pivoting.
fn solve(c: f64, adj: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n)
                .map(|j| if i == j { c - adj[i][j] } else { -adj[i][j] })
                .collect();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for k in col..=n {
                m[r][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// Normalized fixed point of `w ∝ deg/(1 − α) + A w` with bone-length
/// adjacency `A`: the unique `c` for which `(c I − A)^{-1} b` is positive
/// and sums to one, found by bisection.
pub fn absr_oracle(parents: &[Option<usize>], lengths: &[f64], alpha: f64) -> Vec<f64> {
    let n = parents.len();
    let mut adj = vec![vec![0.0; n]; n];
    let mut deg = vec![0.0; n];
    for (i, p) in parents.iter().enumerate() {
        if let Some(p) = *p {
            adj[i][p] = lengths[i];
            adj[p][i] = lengths[i];
            deg[i] += 1.0;
            deg[p] += 1.0;
        }
    }
    let b: Vec<f64> = deg.iter().map(|d| d / (1.0 - alpha)).collect();
    let (mut lo, mut hi) = (
        0.0,
        b.iter().sum::<f64>() + lengths.iter().sum::<f64>() * 2.0 + 1.0,
    );
    for _ in 0..300 {
        let c = 0.5 * (lo + hi);
        let w = solve(c, &adj, &b);
        if w.iter().any(|&x| !(x > 0.0)) || w.iter().sum::<f64>() > 1.0 {
            lo = c;
        } else {
            hi = c;
        }
    }
    let w = solve(hi, &adj, &b);
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

pub const BER_SUBCHANNELS: usize = 64;
const BITS_PER_SUBCHANNEL: usize = 16;

pub fn random_bits(rng: &mut ChaCha8Rng, segments: usize, len: usize) -> BitStream {
    let mut s = BitStream::new();
    for _ in 0..segments {
        s.push_segment((0..len).map(|_| rng.random::<bool>()));
    }
    s
}

/// Bit error rate over independent block-fading realizations of at least
/// `total_bits` bits.
pub fn empirical_ber(snr_db: f64, total_bits: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let block = BER_SUBCHANNELS * BITS_PER_SUBCHANNEL;
    let blocks = total_bits.div_ceil(block);
    let mut errors = 0;
    for b in 0..blocks as u64 {
        let bits = random_bits(&mut rng, BER_SUBCHANNELS, BITS_PER_SUBCHANNEL);
        let ch = sample_channel(BER_SUBCHANNELS, snr_db, derive_seed(seed, b, 0)).unwrap();
        let rx = transmit(&bits, &ch, None, derive_seed(seed, b, 1)).unwrap();
        errors += rx.bits.count_errors(&bits);
    }
    errors as f64 / (blocks * block) as f64
}
