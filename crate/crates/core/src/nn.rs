//! Exact nearest-neighbour queries over a fixed point set.
//!
//! Results are ordered by `(squared distance, index)`, so equal distances
//! always resolve to the lowest index. The k-d tree returns exactly what the
//! brute-force scan returns.

use alloc::vec::Vec;

use crate::rotation::Vec3;

/// Point sets at or below this size are scanned linearly.
pub const BRUTE_FORCE_LIMIT: usize = 4096;

#[inline]
fn better(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Linear scan; `None` only for an empty set.
pub fn nearest_brute(points: &[Vec3], q: Vec3) -> Option<(usize, f64)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, p) in points.iter().enumerate() {
        let d = q.distance_squared(*p);
        if best.is_none_or(|b| better((d, i), b)) {
            best = Some((d, i));
        }
    }
    best.map(|(d, i)| (i, d))
}

/// `k` nearest by linear scan, skipping `exclude`.
pub fn k_nearest_brute(
    points: &[Vec3],
    q: Vec3,
    k: usize,
    exclude: Option<usize>,
) -> Vec<(usize, f64)> {
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for (i, p) in points.iter().enumerate() {
        if Some(i) == exclude {
            continue;
        }
        push_bounded(&mut best, (q.distance_squared(*p), i), k);
    }
    best.into_iter().map(|(d, i)| (i, d)).collect()
}

fn push_bounded(best: &mut Vec<(f64, usize)>, c: (f64, usize), k: usize) {
    if k == 0 {
        return;
    }
    if best.len() == k && !better(c, best[k - 1]) {
        return;
    }
    let pos = best
        .iter()
        .position(|&b| better(c, b))
        .unwrap_or(best.len());
    best.insert(pos, c);
    best.truncate(k);
}

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static k-d tree over a point set.
///
/// A subtree is skipped only when its splitting plane lies strictly farther
/// than the current k-th candidate, so equal-distance points are always
/// examined and the index tie rule holds exactly.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Vec3>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(points: &[Vec3]) -> KdTree {
        let mut tree = KdTree {
            points: points.to_vec(),
            order: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            tree.build(0, points.len());
        }
        tree
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.order[start..end].sort_unstable();
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let (mut lo, mut hi) = (
            self.points[self.order[start]],
            self.points[self.order[start]],
        );
        for &i in &self.order[start..end] {
            lo = lo.min(self.points[i]);
            hi = hi.max(self.points[i]);
        }
        let ext = hi - lo;
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = start + (end - start) / 2;
        let pts = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts[a]
                .axis(axis)
                .total_cmp(&pts[b].axis(axis))
                .then(a.cmp(&b))
        });
        let value = self.points[self.order[mid]].axis(axis);
        self.nodes.push(Node::Split {
            axis,
            value,
            left: 0,
            right: 0,
        });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn nearest(&self, q: Vec3) -> Option<(usize, f64)> {
        self.k_nearest(q, 1, None).into_iter().next()
    }

    /// The `k` nearest points to `q` other than `exclude`, ascending.
    pub fn k_nearest(&self, q: Vec3, k: usize, exclude: Option<usize>) -> Vec<(usize, f64)> {
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        if k > 0 && !self.nodes.is_empty() {
            self.search(0, q, k, exclude, &mut best);
        }
        best.into_iter().map(|(d, i)| (i, d)).collect()
    }

    fn search(
        &self,
        node: usize,
        q: Vec3,
        k: usize,
        exclude: Option<usize>,
        best: &mut Vec<(f64, usize)>,
    ) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if Some(i) != exclude {
                        push_bounded(best, (q.distance_squared(self.points[i]), i), k);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q.axis(axis) - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, q, k, exclude, best);
                if best.len() < k || diff * diff <= best[best.len() - 1].0 {
                    self.search(far, q, k, exclude, best);
                }
            }
        }
    }
}

/// Nearest-neighbour search that picks brute force or the tree by size.
#[derive(Debug, Clone)]
pub enum NearestIndex<'a> {
    Brute(&'a [Vec3]),
    Tree(KdTree),
}

impl<'a> NearestIndex<'a> {
    pub fn new(points: &'a [Vec3]) -> Self {
        if points.len() <= BRUTE_FORCE_LIMIT {
            NearestIndex::Brute(points)
        } else {
            NearestIndex::Tree(KdTree::new(points))
        }
    }

    pub fn nearest(&self, q: Vec3) -> Option<(usize, f64)> {
        match self {
            NearestIndex::Brute(p) => nearest_brute(p, q),
            NearestIndex::Tree(t) => t.nearest(q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(n: usize, seed: u64, spread: f64) -> Vec<Vec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-spread..spread),
                    rng.random_range(-spread..spread),
                    rng.random_range(-spread..spread),
                )
            })
            .collect()
    }

    #[test]
    fn tree_matches_brute_force() {
        for seed in 0..20 {
            let pts = cloud(500, seed, 1.0);
            let grid = KdTree::new(&pts);
            let queries = cloud(200, seed + 100, 3.0);
            for q in queries {
                assert_eq!(grid.nearest(q), nearest_brute(&pts, q));
                assert_eq!(
                    grid.k_nearest(q, 4, Some(3)),
                    k_nearest_brute(&pts, q, 4, Some(3))
                );
            }
        }
    }

    #[test]
    fn ties_resolve_to_lowest_index() {
        let pts = vec![
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
        ];
        let g = KdTree::new(&pts);
        assert_eq!(g.nearest(Vec3::ZERO), Some((0, 1.0)));
        assert_eq!(nearest_brute(&pts, Vec3::ZERO), Some((0, 1.0)));
        assert_eq!(
            g.k_nearest(Vec3::new(1.0, 0.0, 0.0), 2, Some(0))[0],
            (3, 0.0)
        );
    }

    #[test]
    fn degenerate_sets() {
        let flat: Vec<Vec3> = (0..100).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        let g = KdTree::new(&flat);
        assert_eq!(g.nearest(Vec3::new(41.4, 5.0, -2.0)).unwrap().0, 41);
        let same = vec![Vec3::new(1.0, 1.0, 1.0); 10];
        let g = KdTree::new(&same);
        assert_eq!(
            g.k_nearest(Vec3::ZERO, 3, None)
                .iter()
                .map(|x| x.0)
                .collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        assert!(KdTree::new(&[]).nearest(Vec3::ZERO).is_none());
    }
}
