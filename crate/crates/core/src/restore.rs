//! TSP-D solution → giant tour, reinserting drone customers at random
//! positions inside their spans.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{GiantTour, TspDSolution};

pub fn restore(sol: &TspDSolution, rng_seed: u64) -> GiantTour {
    restore_with(sol, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

/// Deliveries are handled in launch order; each draw is over the gap as it
/// stands after the earlier insertions.
pub fn restore_with<R: Rng>(sol: &TspDSolution, rng: &mut R) -> GiantTour {
    let td = &sol.truck_tour;
    let end = td[td.len() - 1];
    let mut seq: Vec<usize> = td[1..td.len() - 1].to_vec();
    for d in sol.deliveries_in_tour_order() {
        // Slots are insertion indices; the launch side is exclusive.
        let lo = if d.launch == 0 {
            0
        } else {
            seq.iter().position(|&v| v == d.launch).expect("launch on the tour") + 1
        };
        let hi = if d.rendezvous == end {
            seq.len()
        } else {
            seq.iter().position(|&v| v == d.rendezvous).expect("rendezvous on the tour")
        };
        let slot = rng.gen_range(lo..=hi);
        seq.insert(slot, d.customer);
    }
    GiantTour::from_vec_unchecked(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{penalized_cost, PenaltyConfig, RelaxMode};
    use crate::model::{is_permutation, DroneDelivery, Instance, Objective, Parameters};
    use crate::split::split;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::seq::SliceRandom;

    #[test]
    fn truck_only_drops_depots() {
        let sol = TspDSolution::new(vec![0, 3, 1, 2, 4], vec![]);
        assert_eq!(restore(&sol, 9).as_slice(), &[3, 1, 2]);
    }

    #[test]
    fn single_slot_span() {
        let sol = TspDSolution::new(vec![0, 1, 3, 4], vec![DroneDelivery::new(1, 2, 3)]);
        for seed in 0..10 {
            assert_eq!(restore(&sol, seed).as_slice(), &[1, 2, 3]);
        }
    }

    #[test]
    fn chained_spans_stay_inside() {
        let sol = TspDSolution::new(
            vec![0, 1, 4, 6, 7],
            vec![DroneDelivery::new(0, 2, 1), DroneDelivery::new(1, 3, 6), DroneDelivery::new(6, 5, 7)],
        );
        for seed in 0..50 {
            let gt = restore(&sol, seed);
            let at = |v: usize| gt.as_slice().iter().position(|&x| x == v).unwrap();
            assert!(at(2) < at(1));
            assert!(at(1) < at(3) && at(3) < at(6));
            assert!(at(6) < at(5));
            assert!(at(1) < at(4) && at(4) < at(6));
        }
    }

    proptest! {
        #[test]
        fn round_trip_through_split(seed in 0u64..100_000, n in 1usize..11) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<(f64, f64)> = (0..=n).map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
            let inst = Instance::euclidean("r", &pts, &vec![true; n], Parameters::default()).unwrap();
            let mut seq: Vec<usize> = (1..=n).collect();
            seq.shuffle(&mut rng);
            let cfg = PenaltyConfig::new(1.0, RelaxMode::All);
            let sol = split(&GiantTour::new(seq, n).unwrap(), &inst, &cfg, Objective::MinCost);
            let gt = restore(&sol, seed);
            prop_assert!(is_permutation(gt.as_slice(), n));
            prop_assert_eq!(restore(&sol, seed), gt.clone());
            let truck: Vec<usize> = gt.as_slice().iter().copied().filter(|v| sol.truck_tour.contains(v)).collect();
            prop_assert_eq!(&truck[..], &sol.truck_tour[1..sol.truck_tour.len() - 1]);
            let again = split(&gt, &inst, &cfg, Objective::MinCost);
            let phi = penalized_cost(&again, &inst, &cfg, Objective::MinCost).unwrap();
            let truck_only = penalized_cost(&TspDSolution::truck_only(gt.as_slice(), n), &inst, &cfg, Objective::MinCost).unwrap();
            prop_assert!(phi <= truck_only + 1e-9);
        }
    }
}
