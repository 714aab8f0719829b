//! Binary sum tree over nonnegative leaf weights with O(log n) update and
//! proportional sampling.

#[derive(Debug, Clone)]
pub struct SumTree {
    size: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    pub fn new(leaves: &[f64]) -> Self {
        let size = leaves.len().next_power_of_two().max(1);
        let mut nodes = vec![0.0; 2 * size];
        nodes[size..size + leaves.len()].copy_from_slice(leaves);
        for i in (1..size).rev() {
            nodes[i] = nodes[2 * i] + nodes[2 * i + 1];
        }
        SumTree { size, nodes }
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.nodes[self.size + i]
    }

    /// Sets leaf i; parents are recomputed from children so no drift builds up.
    pub fn set(&mut self, i: usize, w: f64) {
        let mut j = self.size + i;
        self.nodes[j] = w;
        while j > 1 {
            j /= 2;
            self.nodes[j] = self.nodes[2 * j] + self.nodes[2 * j + 1];
        }
    }

    /// Leaf index whose cumulative interval contains u ∈ [0, total).
    pub fn find(&self, mut u: f64) -> usize {
        let mut j = 1;
        while j < self.size {
            let left = self.nodes[2 * j];
            if u < left || self.nodes[2 * j + 1] <= 0.0 {
                j *= 2;
            } else {
                u -= left;
                j = 2 * j + 1;
            }
        }
        j - self.size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_respects_weights() {
        let mut t = SumTree::new(&[1.0, 0.0, 2.0]);
        assert_eq!(t.total(), 3.0);
        assert_eq!(t.find(0.5), 0);
        assert_eq!(t.find(1.5), 2);
        assert_eq!(t.find(2.999), 2);
        t.set(1, 4.0);
        assert_eq!(t.find(1.5), 1);
        assert_eq!(t.total(), 7.0);
    }
}
