//! Seeded random instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Instance, Parameters};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    /// Side of the square holding every node, km.
    pub area: f64,
    pub drone_eligible_frac: f64,
    /// Everything except coordinates; endurance and fees included.
    pub params: Parameters,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            area: 10.0,
            drone_eligible_frac: 0.8,
            params: Parameters::default(),
        }
    }
}

/// Uniform coordinates in `[0, area]²` with `⌈frac·n⌉` eligible customers
/// drawn uniformly. Named `gen-n{n}-s{seed}`.
pub fn generate_instance(n: usize, seed: u64, gen: &GenParams) -> Instance {
    assert!(n >= 1, "an instance needs at least one customer");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..=n)
        .map(|_| (rng.gen_range(0.0..=gen.area), rng.gen_range(0.0..=gen.area)))
        .collect();
    let count = ((gen.drone_eligible_frac.clamp(0.0, 1.0) * n as f64).ceil() as usize).min(n);
    let mut eligible = vec![false; n];
    for c in sample(&mut rng, n, count) {
        eligible[c] = true;
    }
    Instance::euclidean(format!("gen-n{n}-s{seed}"), &points, &eligible, gen.params).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let g = GenParams::default();
        assert_eq!(generate_instance(12, 5, &g), generate_instance(12, 5, &g));
        assert_ne!(generate_instance(12, 5, &g), generate_instance(12, 6, &g));
    }

    #[test]
    fn eligible_counts() {
        let all = GenParams {
            drone_eligible_frac: 1.0,
            ..GenParams::default()
        };
        assert_eq!(generate_instance(5, 1, &all).drone_eligible().count(), 5);
        let none = GenParams {
            drone_eligible_frac: 0.0,
            ..GenParams::default()
        };
        assert_eq!(generate_instance(5, 1, &none).drone_eligible().count(), 0);
        assert_eq!(generate_instance(10, 1, &GenParams::default()).drone_eligible().count(), 8);
    }

    #[test]
    fn coordinates_stay_in_the_square() {
        let inst = generate_instance(40, 9, &GenParams::default());
        assert!(inst.coords().iter().all(|&(x, y)| (0.0..=10.0).contains(&x) && (0.0..=10.0).contains(&y)));
    }
}
