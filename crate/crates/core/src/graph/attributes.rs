use serde::{Deserialize, Serialize};

/// Per-structure attributes, in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexAttributes {
    /// Mean voxel-center position, mm.
    pub centroid: [f64; 3],
    pub mean_intensity: f64,
    /// mm³
    pub volume: f64,
}

/// Relation from a source structure to a target structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAttributes {
    /// Target centroid minus source centroid, mm.
    pub centroid_vector: [f64; 3],
    /// Target volume over source volume.
    pub volume_ratio: f64,
    /// Target mean intensity minus source mean intensity.
    pub contrast: f64,
}

impl EdgeAttributes {
    pub fn between(source: &VertexAttributes, target: &VertexAttributes) -> Self {
        Self {
            centroid_vector: [
                target.centroid[0] - source.centroid[0],
                target.centroid[1] - source.centroid[1],
                target.centroid[2] - source.centroid[2],
            ],
            volume_ratio: target.volume / source.volume,
            contrast: target.mean_intensity - source.mean_intensity,
        }
    }

    /// Attributes of the opposite edge.
    pub fn reversed(&self) -> Self {
        Self {
            centroid_vector: self.centroid_vector.map(|v| -v),
            volume_ratio: 1.0 / self.volume_ratio,
            contrast: -self.contrast,
        }
    }
}

/// Correctly rounded floating-point summation (Shewchuk's partials, as in
/// Python's `math.fsum`). The result depends only on the multiset of added
/// values, so sums accumulated in different orders or merged from pieces
/// agree bit for bit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let Some(&last) = p.last() else {
            return 0.0;
        };
        let mut n = p.len() - 1;
        let mut hi = last;
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // round half-even across the remaining partials
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sum_beats_naive_cancellation() {
        let s: ExactSum = [1e100, 1.0, -1e100, 1e-3].into_iter().collect();
        assert_eq!(s.value(), 1.001);
        let s: ExactSum = [0.1; 10].into_iter().collect();
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn exact_sum_is_order_independent() {
        let xs = [0.1, 1e16, -3.7, 2.5e-9, -1e16, 7.25, 1.0 / 3.0];
        let forward: ExactSum = xs.iter().copied().collect();
        let backward: ExactSum = xs.iter().rev().copied().collect();
        let mut merged: ExactSum = xs[..3].iter().copied().collect();
        merged.merge(&xs[3..].iter().copied().collect());
        assert_eq!(forward.value(), backward.value());
        assert_eq!(forward.value(), merged.value());
    }

    #[test]
    fn edge_reversal() {
        let a = VertexAttributes {
            centroid: [1.0, 2.0, 3.0],
            mean_intensity: 10.0,
            volume: 4.0,
        };
        let b = VertexAttributes {
            centroid: [4.0, 0.0, -1.0],
            mean_intensity: 25.0,
            volume: 8.0,
        };
        let ab = EdgeAttributes::between(&a, &b);
        assert_eq!(ab.centroid_vector, [3.0, -2.0, -4.0]);
        assert_eq!(ab.volume_ratio, 2.0);
        assert_eq!(ab.contrast, 15.0);
        assert_eq!(EdgeAttributes::between(&b, &a), ab.reversed());
    }
}
