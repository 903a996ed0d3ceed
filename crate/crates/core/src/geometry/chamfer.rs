use rayon::prelude::*;

use super::{Point, PointCloud};

/// Symmetric Chamfer distance: the mean squared distance from each point of
/// `a` to its nearest neighbour in `b`, plus the same term from `b` to `a`.
pub fn chamfer_distance(a: &PointCloud, b: &PointCloud) -> f64 {
    let tree_a = KdTree::build(a.points());
    let tree_b = KdTree::build(b.points());
    mean_nearest(a.points(), &tree_b) + mean_nearest(b.points(), &tree_a)
}

fn mean_nearest(queries: &[Point], tree: &KdTree) -> f64 {
    // fixed summation order keeps the result independent of thread scheduling
    let nearest: Vec<f64> = queries.par_iter().map(|q| tree.nearest_sq(q)).collect();
    nearest.iter().sum::<f64>() / queries.len() as f64
}

/// Implicit balanced kd-tree: each slice is split at its median on axis `depth % 3`.
struct KdTree {
    points: Vec<Point>,
}

impl KdTree {
    fn build(points: &[Point]) -> Self {
        let mut points = points.to_vec();
        split(&mut points, 0);
        Self { points }
    }

    fn nearest_sq(&self, q: &Point) -> f64 {
        let mut best = f64::INFINITY;
        search(&self.points, q, 0, &mut best);
        best
    }
}

fn split(points: &mut [Point], depth: usize) {
    if points.len() <= 1 {
        return;
    }
    let axis = depth % 3;
    let mid = points.len() / 2;
    points.select_nth_unstable_by(mid, |a, b| a[axis].total_cmp(&b[axis]));
    let (left, right) = points.split_at_mut(mid);
    split(left, depth + 1);
    split(&mut right[1..], depth + 1);
}

fn search(points: &[Point], q: &Point, depth: usize, best: &mut f64) {
    if points.is_empty() {
        return;
    }
    let axis = depth % 3;
    let mid = points.len() / 2;
    let pivot = &points[mid];
    let d = (pivot - q).norm_squared();
    if d < *best {
        *best = d;
    }
    let diff = q[axis] - pivot[axis];
    let (near, far) = if diff < 0.0 {
        (&points[..mid], &points[mid + 1..])
    } else {
        (&points[mid + 1..], &points[..mid])
    };
    search(near, q, depth + 1, best);
    if diff * diff < *best {
        search(far, q, depth + 1, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// O(n·m) reference.
    fn brute_force(a: &PointCloud, b: &PointCloud) -> f64 {
        let one_way = |x: &PointCloud, y: &PointCloud| {
            let mut sum = 0.0;
            for p in x.points() {
                let mut best = f64::INFINITY;
                for q in y.points() {
                    let d = (p.x - q.x).powi(2) + (p.y - q.y).powi(2) + (p.z - q.z).powi(2);
                    best = best.min(d);
                }
                sum += best;
            }
            sum / x.len() as f64
        };
        one_way(a, b) + one_way(b, a)
    }

    fn random_cloud(rng: &mut ChaCha8Rng, n: usize) -> PointCloud {
        PointCloud::new(
            (0..n)
                .map(|_| Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn hand_computed_pair() {
        let a = PointCloud::new(vec![Point::origin()]).unwrap();
        let b = PointCloud::new(vec![Point::new(1.0, 0.0, 0.0)]).unwrap();
        assert_eq!(chamfer_distance(&a, &b), 2.0);
    }

    #[test]
    fn self_distance_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_cloud(&mut rng, 300);
        assert_eq!(chamfer_distance(&a, &a), 0.0);
    }

    #[test]
    fn matches_brute_force_on_random_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, m) in [(50, 50), (1, 17), (200, 131)] {
            let a = random_cloud(&mut rng, n);
            let b = random_cloud(&mut rng, m);
            let fast = chamfer_distance(&a, &b);
            let slow = brute_force(&a, &b);
            assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1.0), "{fast} vs {slow}");
        }
    }

    #[test]
    fn duplicate_points_handled() {
        let a = PointCloud::new(vec![Point::new(0.5, 0.5, 0.5); 40]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random_cloud(&mut rng, 40);
        assert!((chamfer_distance(&a, &b) - brute_force(&a, &b)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn symmetric_and_translation_invariant(
            seed in any::<u64>(),
            n in 1usize..60,
            m in 1usize..60,
            shift in prop::array::uniform3(-5.0f64..5.0),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_cloud(&mut rng, n);
            let b = random_cloud(&mut rng, m);
            let d = chamfer_distance(&a, &b);
            prop_assert!(d >= 0.0);
            prop_assert!((d - chamfer_distance(&b, &a)).abs() <= 1e-12 * d.max(1.0));
            let moved = chamfer_distance(&a.translated(shift), &b.translated(shift));
            prop_assert!((d - moved).abs() <= 1e-9 * d.max(1.0));
            prop_assert!((d - brute_force(&a, &b)).abs() <= 1e-9 * d.max(1e-300));
        }
    }
}
