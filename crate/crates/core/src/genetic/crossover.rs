//! Permutation crossovers. All operate on customer sequences without depots.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{GiantTour, NodeId, TspDSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum CrossoverKind {
    #[default]
    Dx,
    Ox,
    Pmx,
    Obx,
    Pbx,
}

impl CrossoverKind {
    pub const ALL: [CrossoverKind; 5] = [
        CrossoverKind::Dx,
        CrossoverKind::Ox,
        CrossoverKind::Pmx,
        CrossoverKind::Obx,
        CrossoverKind::Pbx,
    ];
}

impl std::fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CrossoverKind::Dx => "dx",
            CrossoverKind::Ox => "ox",
            CrossoverKind::Pmx => "pmx",
            CrossoverKind::Obx => "obx",
            CrossoverKind::Pbx => "pbx",
        })
    }
}

impl std::str::FromStr for CrossoverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dx" => Ok(CrossoverKind::Dx),
            "ox" => Ok(CrossoverKind::Ox),
            "pmx" => Ok(CrossoverKind::Pmx),
            "obx" => Ok(CrossoverKind::Obx),
            "pbx" => Ok(CrossoverKind::Pbx),
            other => Err(format!("unknown crossover `{other}`")),
        }
    }
}

/// Applies `kind`; `sol1` is the decoded solution of `p1` (used by DX only).
pub fn crossover<R: Rng>(
    kind: CrossoverKind,
    p1: &GiantTour,
    sol1: &TspDSolution,
    p2: &GiantTour,
    rng: &mut R,
) -> GiantTour {
    let (a, b) = (p1.as_slice(), p2.as_slice());
    let child = match kind {
        CrossoverKind::Dx => return crossover_dx(p1, sol1, p2, rng),
        CrossoverKind::Ox => {
            let (l, r) = cut(a.len(), rng);
            ox_with_cut(a, b, l, r)
        }
        CrossoverKind::Pmx => {
            let (l, r) = cut(a.len(), rng);
            pmx_with_cut(a, b, l, r)
        }
        CrossoverKind::Obx => obx_with_positions(a, b, &random_positions(a.len(), rng)),
        CrossoverKind::Pbx => pbx_with_positions(a, b, &random_positions(a.len(), rng)),
    };
    GiantTour::from_vec_unchecked(child)
}

/// Two cut indices `l <= r`, distinct whenever `len >= 2`.
fn cut<R: Rng>(len: usize, rng: &mut R) -> (usize, usize) {
    if len < 2 {
        return (0, len.saturating_sub(1));
    }
    let pair = sample(rng, len, 2);
    let (x, y) = (pair.index(0), pair.index(1));
    (x.min(y), x.max(y))
}

/// A uniformly sized, uniformly drawn set of positions, sorted.
fn random_positions<R: Rng>(len: usize, rng: &mut R) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    let k = rng.gen_range(1..=len);
    let mut v = sample(rng, len, k).into_vec();
    v.sort_unstable();
    v
}

/// Crossover that inherits either a run of truck customers or a run of
/// drone customers of `p1`'s decoded solution.
pub fn crossover_dx<R: Rng>(p1: &GiantTour, sol1: &TspDSolution, p2: &GiantTour, rng: &mut R) -> GiantTour {
    let drones: Vec<NodeId> = sol1.deliveries_in_tour_order().iter().map(|d| d.customer).collect();
    let trucks = &sol1.truck_tour[1..sol1.truck_tour.len() - 1];
    let source: &[NodeId] = if rng.gen_bool(0.5) && !drones.is_empty() { &drones } else { trucks };
    let (l, r) = cut(source.len(), rng);
    let kept = if source.is_empty() { &[][..] } else { &source[l..=r] };
    GiantTour::from_vec_unchecked(dx_with_kept(p1.as_slice(), p2.as_slice(), kept))
}

/// Keeps the nodes in `kept` at their positions in `p1` and fills the
/// other positions left to right in `p2` order.
pub fn dx_with_kept(p1: &[NodeId], p2: &[NodeId], kept: &[NodeId]) -> Vec<NodeId> {
    let n = p1.len();
    let mut is_kept = vec![false; n + 2];
    for &v in kept {
        is_kept[v] = true;
    }
    let mut fill = p2.iter().filter(|&&v| !is_kept[v]);
    p1.iter()
        .map(|&v| if is_kept[v] { v } else { *fill.next().expect("enough nodes to fill") })
        .collect()
}

/// Order crossover: `p1[l..=r]` kept in place, the rest taken from `p2`
/// starting after `r` and wrapping around.
pub fn ox_with_cut(p1: &[NodeId], p2: &[NodeId], l: usize, r: usize) -> Vec<NodeId> {
    let n = p1.len();
    if n == 0 {
        return Vec::new();
    }
    let mut used = vec![false; n + 2];
    let mut child = vec![0; n];
    for q in l..=r {
        child[q] = p1[q];
        used[p1[q]] = true;
    }
    let mut fill = (0..n).map(|q| p2[(r + 1 + q) % n]).filter(|&v| !used[v]);
    for q in 0..n - (r - l + 1) {
        child[(r + 1 + q) % n] = fill.next().expect("enough nodes to fill");
    }
    child
}

/// Partially mapped crossover with an inclusive 0-based cut.
pub fn pmx_with_cut(p1: &[NodeId], p2: &[NodeId], l: usize, r: usize) -> Vec<NodeId> {
    let n = p1.len();
    let mut at1 = vec![usize::MAX; n + 2];
    for (q, &v) in p1.iter().enumerate() {
        at1[v] = q;
    }
    let in_cut = |v: NodeId| (l..=r).contains(&at1[v]);
    (0..n)
        .map(|q| {
            if (l..=r).contains(&q) {
                return p1[q];
            }
            let mut v = p2[q];
            while in_cut(v) {
                v = p2[at1[v]];
            }
            v
        })
        .collect()
}

/// Order-based crossover: the nodes found at `positions` of `p2` are
/// reordered inside `p1` to follow their order in `p2`.
pub fn obx_with_positions(p1: &[NodeId], p2: &[NodeId], positions: &[usize]) -> Vec<NodeId> {
    let n = p1.len();
    let mut chosen = vec![false; n + 2];
    for &q in positions {
        chosen[p2[q]] = true;
    }
    let mut order = positions.iter().map(|&q| p2[q]);
    p1.iter()
        .map(|&v| if chosen[v] { order.next().expect("one per chosen node") } else { v })
        .collect()
}

/// Position-based crossover: `p1` is kept at `positions`, the other
/// positions take the remaining nodes in `p2` order.
pub fn pbx_with_positions(p1: &[NodeId], p2: &[NodeId], positions: &[usize]) -> Vec<NodeId> {
    let n = p1.len();
    let mut fixed = vec![false; n];
    let mut used = vec![false; n + 2];
    for &q in positions {
        fixed[q] = true;
        used[p1[q]] = true;
    }
    let mut fill = p2.iter().filter(|&&v| !used[v]);
    (0..n)
        .map(|q| if fixed[q] { p1[q] } else { *fill.next().expect("enough nodes to fill") })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{is_permutation, DroneDelivery};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Straight-line restatement of the inherit-and-fill rule on tours with
    /// depots, used to check `dx_with_kept`.
    fn dx_reference(p1: &[usize], p2: &[usize], kept: &[usize]) -> Vec<usize> {
        let n = p1.len();
        let tsp1: Vec<usize> = std::iter::once(0).chain(p1.iter().copied()).chain([n + 1]).collect();
        let tsp2: Vec<usize> = std::iter::once(0).chain(p2.iter().copied()).chain([n + 1]).collect();
        let mut c = vec![None; n + 2];
        c[0] = Some(0);
        c[n + 1] = Some(n + 1);
        for (q, v) in tsp1.iter().enumerate() {
            if kept.contains(v) {
                c[q] = Some(*v);
            }
        }
        let mut rest = tsp2.iter().filter(|v| !kept.contains(v) && **v != 0 && **v != n + 1);
        for slot in c.iter_mut() {
            if slot.is_none() {
                *slot = rest.next().copied();
            }
        }
        c[1..=n].iter().map(|v| v.unwrap()).collect()
    }

    #[test]
    fn dx_truck_cut_example() {
        let child = dx_with_kept(&[1, 2, 3, 4], &[4, 3, 2, 1], &[2, 3]);
        assert_eq!(child, vec![4, 2, 3, 1]);
        assert_eq!(child, dx_reference(&[1, 2, 3, 4], &[4, 3, 2, 1], &[2, 3]));
    }

    #[test]
    fn dx_matches_reference_on_random_cuts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let n = rng.gen_range(1..12);
            let mut p1: Vec<usize> = (1..=n).collect();
            let mut p2 = p1.clone();
            p1.shuffle(&mut rng);
            p2.shuffle(&mut rng);
            let k = rng.gen_range(0..=n);
            let kept: Vec<usize> = p1.choose_multiple(&mut rng, k).copied().collect();
            assert_eq!(dx_with_kept(&p1, &p2, &kept), dx_reference(&p1, &p2, &kept));
        }
    }

    #[test]
    fn dx_falls_back_to_truck_cut_without_deliveries() {
        let p1 = GiantTour::new(vec![1, 2, 3, 4], 4).unwrap();
        let p2 = GiantTour::new(vec![4, 3, 2, 1], 4).unwrap();
        let sol = TspDSolution::new(vec![0, 1, 2, 3, 4, 5], vec![]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let c = crossover_dx(&p1, &sol, &p2, &mut rng);
            assert!(is_permutation(c.as_slice(), 4));
        }
        // A drone cut copies only drone customers.
        let sol = TspDSolution::new(vec![0, 1, 3, 4, 5], vec![DroneDelivery::new(1, 2, 3)]);
        let mut seen_drone_only = false;
        for _ in 0..50 {
            let c = crossover_dx(&p1, &sol, &p2, &mut rng);
            seen_drone_only |= c.as_slice() == dx_with_kept(&[1, 2, 3, 4], &[4, 3, 2, 1], &[2]);
        }
        assert!(seen_drone_only);
    }

    #[test]
    fn identical_parents_give_the_parent() {
        let p: Vec<usize> = vec![3, 1, 4, 5, 2];
        for (l, r) in [(0, 4), (1, 3), (2, 2)] {
            assert_eq!(ox_with_cut(&p, &p, l, r), p);
            assert_eq!(pmx_with_cut(&p, &p, l, r), p);
        }
        assert_eq!(obx_with_positions(&p, &p, &[0, 2]), p);
        assert_eq!(pbx_with_positions(&p, &p, &[1, 4]), p);
        assert_eq!(dx_with_kept(&p, &p, &[4, 5]), p);
    }

    #[test]
    fn ox_whole_cut_is_the_first_parent() {
        assert_eq!(ox_with_cut(&[1, 2, 3, 4], &[4, 3, 2, 1], 0, 3), vec![1, 2, 3, 4]);
        // Fill starts after the cut and wraps: p2 from index 3 is 1, 4, 3, ...
        assert_eq!(ox_with_cut(&[1, 2, 3, 4, 5], &[5, 4, 3, 2, 1], 1, 2), vec![4, 2, 3, 1, 5]);
    }

    #[test]
    fn pmx_hand_trace() {
        // Cut keeps 3 and 4. Position 0 takes 3 from p2, mapped 3 → 5;
        // position 1 takes 4, mapped 4 → 1; position 4 keeps 2.
        assert_eq!(pmx_with_cut(&[1, 2, 3, 4, 5], &[3, 4, 5, 1, 2], 2, 3), vec![5, 1, 3, 4, 2]);
    }

    #[test]
    fn obx_and_pbx_small_cases() {
        // p2 positions {1, 3} hold 2 and 4; they keep p1's slots in p2's order.
        assert_eq!(obx_with_positions(&[1, 2, 3, 4, 5], &[3, 2, 5, 4, 1], &[1, 3]), vec![1, 2, 3, 4, 5]);
        assert_eq!(obx_with_positions(&[1, 2, 3, 4, 5], &[3, 4, 5, 2, 1], &[1, 3]), vec![1, 4, 3, 2, 5]);
        assert_eq!(pbx_with_positions(&[1, 2, 3, 4, 5], &[5, 4, 3, 2, 1], &[0, 2]), vec![1, 5, 3, 4, 2]);
    }

    proptest! {
        #[test]
        fn every_crossover_yields_a_permutation(seed in 0u64..1_000_000, n in 1usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a: Vec<usize> = (1..=n).collect();
            let mut b = a.clone();
            a.shuffle(&mut rng);
            b.shuffle(&mut rng);
            let p1 = GiantTour::new(a.clone(), n).unwrap();
            let p2 = GiantTour::new(b, n).unwrap();
            let sol = TspDSolution::truck_only(&a, n);
            for kind in CrossoverKind::ALL {
                let c = crossover(kind, &p1, &sol, &p2, &mut rng);
                prop_assert!(is_permutation(c.as_slice(), n), "{kind}: {:?}", c);
            }
        }
    }
}
