#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use tspd::model::{DroneDelivery, GiantTour, Instance, TspDSolution};

pub fn random_giant_tour<R: Rng>(n: usize, rng: &mut R) -> GiantTour {
    let mut seq: Vec<usize> = (1..=n).collect();
    seq.shuffle(rng);
    GiantTour::new(seq, n).unwrap()
}

/// A structurally valid solution with random sorties; endurance is ignored.
/// Each sortie launches from the latest truck node and rejoins one to three
/// truck nodes later. Sorties may chain.
pub fn random_solution<R: Rng>(inst: &Instance, drone_share: f64, rng: &mut R) -> TspDSolution {
    let n = inst.n();
    let end = n + 1;
    let mut seq: Vec<usize> = (1..=n).collect();
    seq.shuffle(rng);
    let mut truck = vec![0];
    let mut deliveries = Vec::new();
    let mut pending: Option<(usize, usize, usize)> = None;
    for c in seq {
        if pending.is_none() && inst.is_drone_eligible(c) && rng.gen_bool(drone_share) {
            pending = Some((*truck.last().unwrap(), c, rng.gen_range(1..=3)));
            continue;
        }
        truck.push(c);
        if let Some((launch, customer, left)) = pending {
            if left == 1 {
                deliveries.push(DroneDelivery::new(launch, customer, c));
                pending = None;
            } else {
                pending = Some((launch, customer, left - 1));
            }
        }
    }
    if let Some((launch, customer, _)) = pending {
        if launch == 0 {
            truck.push(customer);
        } else {
            deliveries.push(DroneDelivery::new(launch, customer, end));
        }
    }
    truck.push(end);
    TspDSolution::new(truck, deliveries)
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}
