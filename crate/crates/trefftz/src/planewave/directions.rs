use crate::geometry::Point;
use crate::scalar::Real;

/// Ordered list of unit plane-wave directions. `labels[i]` is the 1-based
/// index of `dirs[i]` in the equispaced family it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet<T> {
    pub dirs: Vec<Point<T>>,
    pub labels: Vec<usize>,
}

impl<T: Real> DirectionSet<T> {
    /// p = 2q+1 directions at angles 2π(ℓ-1)/p.
    pub fn equispaced(q: usize) -> Self {
        let p = 2 * q + 1;
        let dirs = (0..p)
            .map(|l| {
                let ang = T::TAU() * T::lit(l as f64) / T::lit(p as f64);
                Point::new(ang.cos(), ang.sin())
            })
            .collect();
        Self { dirs, labels: (1..=p).collect() }
    }

    /// Equispaced set for `q_max`, permuted so that every prefix of length
    /// 2q+1 is a direction set for degree q.
    pub fn hp_ordered(q_max: usize) -> Self {
        let base = Self::equispaced(q_max);
        let order = hp_direction_order(2 * q_max + 1);
        Self {
            dirs: order.iter().map(|&l| base.dirs[l - 1]).collect(),
            labels: order,
        }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    /// Effective degree q with p = 2q+1.
    pub fn q(&self) -> usize {
        (self.dirs.len().max(1) - 1) / 2
    }

    pub fn prefix(&self, n: usize) -> &[Point<T>] {
        &self.dirs[..n]
    }
}

/// Odd indices ascending followed by even indices ascending (1-based).
pub fn hp_direction_order(p_max: usize) -> Vec<usize> {
    (1..=p_max).step_by(2).chain((2..=p_max).step_by(2)).collect()
}

/// Number of edge directions under the maximum rule.
pub fn edge_direction_count(q_adjacent: &[usize]) -> usize {
    2 * q_adjacent.iter().copied().max().unwrap_or(0) + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equispaced_q1() {
        let d = DirectionSet::<f64>::equispaced(1);
        assert_eq!(d.len(), 3);
        assert_eq!(d.dirs[0], Point::new(1.0, 0.0));
        assert!((d.dirs[1].x + 0.5).abs() < 1e-15);
        assert!((d.dirs[1].y - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn directions_sum_to_zero() {
        for q in 1..15 {
            let d = DirectionSet::<f64>::equispaced(q);
            let s = d.dirs.iter().fold(Point::origin(), |a, &b| a + b);
            assert!(s.norm() < 1e-13);
            assert!(d.dirs.iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn hp_order_examples() {
        assert_eq!(hp_direction_order(5), vec![1, 3, 5, 2, 4]);
        assert_eq!(hp_direction_order(3), vec![1, 3, 2]);
    }

    #[test]
    fn hp_prefix_is_a_degree_q_set() {
        // the first 2q+1 reordered directions of the q_max family are the
        // 2q+1 directions of some rotated equispaced-like subset; at least
        // they must be nested and distinct
        let d = DirectionSet::<f64>::hp_ordered(4);
        let mut sorted = d.labels.clone();
        sorted.sort();
        assert_eq!(sorted, (1..=9).collect::<Vec<_>>());
        assert_eq!(&d.labels[..3], &[1, 3, 5]);
    }

    #[test]
    fn maximum_rule() {
        assert_eq!(edge_direction_count(&[1, 3]), 7);
        assert_eq!(edge_direction_count(&[2]), 5);
        assert_eq!(edge_direction_count(&[4, 4]), 9);
    }
}
