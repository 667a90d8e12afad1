//! Individuals, subpopulations and biased fitness.

use rand::Rng;

use crate::model::{GiantTour, TspDSolution};

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub chromosome: GiantTour,
    pub decoded: TspDSolution,
    /// Raw objective value of `decoded`.
    pub objective: f64,
    /// Penalty per unit of ω.
    pub violation: f64,
    pub feasible: bool,
    /// φ at the last rank computation.
    pub phi: f64,
    pub diversity: f64,
    pub fit_rank: usize,
    pub div_rank: usize,
    pub bf: f64,
}

impl Individual {
    pub fn new(chromosome: GiantTour, decoded: TspDSolution, objective: f64, violation: f64, feasible: bool) -> Self {
        Individual {
            chromosome,
            decoded,
            objective,
            violation,
            feasible,
            phi: objective,
            diversity: 1.0,
            fit_rank: 0,
            div_rank: 0,
            bf: 0.0,
        }
    }

    pub fn phi_at(&self, omega: f64) -> f64 {
        self.objective + omega * self.violation
    }
}

/// Share of positions holding different customers.
pub fn hamming(a: &GiantTour, b: &GiantTour) -> f64 {
    let (a, b) = (a.as_slice(), b.as_slice());
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).filter(|(x, y)| x != y).count() as f64 / a.len() as f64
}

/// Same chromosome, or the same once reversed.
pub fn is_clone(a: &GiantTour, b: &GiantTour) -> bool {
    a.as_slice() == b.as_slice() || a.as_slice().iter().eq(b.as_slice().iter().rev())
}

pub fn n_close(frac: f64, size: usize) -> usize {
    ((frac * size.saturating_sub(1) as f64).ceil() as usize).max(1)
}

/// Mean distance to the `n_close` closest other members; 1 for a singleton.
pub fn diversity_contribution(idx: usize, members: &[Individual], n_close: usize) -> f64 {
    if members.len() < 2 {
        return 1.0;
    }
    let mut d: Vec<f64> = members
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != idx)
        .map(|(_, m)| hamming(&members[idx].chromosome, &m.chromosome))
        .collect();
    d.sort_by(f64::total_cmp);
    let k = n_close.min(d.len());
    d[..k].iter().sum::<f64>() / k as f64
}

/// Recomputes φ, diversity, both ranks and the biased fitness of every member.
pub fn biased_fitness(members: &mut [Individual], omega: f64, nb_elite: usize, n_close_frac: f64, use_diversity: bool) {
    let size = members.len();
    if size == 0 {
        return;
    }
    let close = n_close(n_close_frac, size);
    for m in members.iter_mut() {
        m.phi = m.phi_at(omega);
    }
    let div: Vec<f64> = (0..size).map(|i| diversity_contribution(i, members, close)).collect();
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| members[a].phi.total_cmp(&members[b].phi));
    for (rank, &i) in order.iter().enumerate() {
        members[i].fit_rank = rank;
    }
    order.sort_by(|&a, &b| div[b].total_cmp(&div[a]));
    for (rank, &i) in order.iter().enumerate() {
        members[i].div_rank = rank;
    }
    let weight = if use_diversity {
        (1.0 - nb_elite as f64 / size as f64).max(0.0)
    } else {
        0.0
    };
    for (m, d) in members.iter_mut().zip(div) {
        m.diversity = d;
        m.bf = m.fit_rank as f64 + weight * m.div_rank as f64;
    }
}

/// Removes members until `keep` remain, clones first, worst biased fitness
/// first, re-ranking after each removal.
pub fn select_survivors(
    members: &mut Vec<Individual>,
    keep: usize,
    omega: f64,
    nb_elite: usize,
    n_close_frac: f64,
    use_diversity: bool,
) {
    while members.len() > keep {
        biased_fitness(members, omega, nb_elite, n_close_frac, use_diversity);
        let has_clone = |i: usize| {
            members
                .iter()
                .enumerate()
                .any(|(j, m)| j != i && is_clone(&members[i].chromosome, &m.chromosome))
        };
        let clones: Vec<usize> = (0..members.len()).filter(|&i| has_clone(i)).collect();
        let pool: Vec<usize> = if clones.is_empty() { (0..members.len()).collect() } else { clones };
        let worst = *pool
            .iter()
            .max_by(|&&a, &&b| members[a].bf.total_cmp(&members[b].bf).then(a.cmp(&b)))
            .expect("non-empty pool");
        members.remove(worst);
    }
}

/// Winner of a uniform binary tournament on biased fitness; ties go to the
/// first draw.
pub fn tournament<R: Rng>(pool: &[&Individual], rng: &mut R) -> usize {
    let a = rng.gen_range(0..pool.len());
    let b = rng.gen_range(0..pool.len());
    if pool[b].bf < pool[a].bf {
        b
    } else {
        a
    }
}
