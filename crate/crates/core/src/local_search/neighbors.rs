use crate::model::{Instance, NodeId};

/// Per-node lists of the closest customers by truck distance.
#[derive(Debug, Clone, PartialEq)]
pub struct GranularNeighbors {
    h: f64,
    lists: Vec<Vec<NodeId>>,
}

impl GranularNeighbors {
    pub fn threshold(&self) -> f64 {
        self.h
    }

    /// Closest customers of `v`, nearest first.
    pub fn of(&self, v: NodeId) -> &[NodeId] {
        &self.lists[v]
    }

    pub fn contains(&self, v: NodeId, w: NodeId) -> bool {
        self.lists[v].contains(&w)
    }

    pub fn list_len(&self) -> usize {
        self.lists.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Keeps the `min(⌈h·n⌉, n−1)` closest customers of every node.
pub fn build_granular_neighbors(inst: &Instance, h: f64) -> GranularNeighbors {
    assert!(h > 0.0 && h <= 1.0, "granular threshold must lie in (0, 1]");
    let n = inst.n();
    let keep = if n < 2 { 0 } else { ((h * n as f64).ceil() as usize).min(n - 1) };
    let lists = (0..n + 2)
        .map(|v| {
            let mut c: Vec<NodeId> = (1..=n).filter(|&w| w != v).collect();
            c.sort_by(|&a, &b| inst.truck_dist(v, a).total_cmp(&inst.truck_dist(v, b)).then(a.cmp(&b)));
            c.truncate(keep);
            c
        })
        .collect();
    GranularNeighbors { h, lists }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Parameters;

    fn line(n: usize) -> Instance {
        let pts: Vec<(f64, f64)> = (0..=n).map(|i| (i as f64, 0.0)).collect();
        Instance::euclidean("line", &pts, &vec![true; n], Parameters::default()).unwrap()
    }

    #[test]
    fn list_lengths_follow_the_threshold() {
        assert_eq!(build_granular_neighbors(&line(10), 0.1).list_len(), 1);
        assert_eq!(build_granular_neighbors(&line(50), 0.1).list_len(), 5);
        assert_eq!(build_granular_neighbors(&line(5), 1.0).list_len(), 4);
        assert_eq!(build_granular_neighbors(&line(1), 0.5).list_len(), 0);
    }

    #[test]
    fn nearer_endpoint_first_and_never_self() {
        // Depot 0 at x=0, customers 1 and 2 at x=1 and x=2.
        let nb = build_granular_neighbors(&line(2), 0.5);
        assert_eq!(nb.of(1), &[2]);
        let pts = [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (1.5, 0.0)];
        let inst = Instance::euclidean("l", &pts, &[true; 3], Parameters::default()).unwrap();
        let nb = build_granular_neighbors(&inst, 0.3);
        assert_eq!(nb.of(1), &[3]);
        for v in 0..5 {
            assert!(!nb.of(v).contains(&v));
        }
    }
}
