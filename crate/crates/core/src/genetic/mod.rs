//! The hybrid genetic search main loop.

pub mod crossover;
pub mod population;

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crossover::{crossover, CrossoverKind};
pub use population::{biased_fitness, diversity_contribution, hamming, select_survivors, Individual};

use crate::evaluation::{Evaluation, PenaltyConfig, RelaxMode};
use crate::local_search::{build_granular_neighbors, descend, GranularNeighbors, Route};
use crate::model::{GiantTour, Instance, Objective, TspDSolution};
use crate::restore::restore_with;
use crate::split::split;

const OMEGA_MIN: f64 = 1e-3;
const OMEGA_MAX: f64 = 1e6;
const PENALTY_PERIOD: u64 = 100;
const IMPROVEMENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Ablations {
    pub no_inf: bool,
    pub no_div: bool,
    pub no_repair: bool,
    pub no_restore: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HgaParams {
    pub mu: usize,
    pub lambda: usize,
    pub nb_elite: usize,
    /// Target share of naturally feasible offspring.
    pub xi_ref: f64,
    pub n_close_frac: f64,
    pub omega0: f64,
    pub iter_ni: u64,
    pub iter_div_frac: f64,
    pub p_rep: f64,
    pub h: f64,
    /// Choices per step of the randomized cheapest insertion.
    pub k_insert: usize,
    pub crossover: CrossoverKind,
    pub relax: RelaxMode,
    pub ablations: Ablations,
    pub max_iterations: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for HgaParams {
    fn default() -> Self {
        HgaParams {
            mu: 15,
            lambda: 25,
            nb_elite: 6,
            xi_ref: 0.3,
            n_close_frac: 0.2,
            omega0: 1.0,
            iter_ni: 2500,
            iter_div_frac: 0.3,
            p_rep: 0.5,
            h: 0.1,
            k_insert: 3,
            crossover: CrossoverKind::Dx,
            relax: RelaxMode::All,
            ablations: Ablations::default(),
            max_iterations: None,
            time_limit: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("invalid parameter {name}: {reason}")]
    Invalid { name: &'static str, reason: &'static str },
}

impl HgaParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let bad = |name, reason| Err(ParamError::Invalid { name, reason });
        if self.mu == 0 {
            return bad("mu", "must be positive");
        }
        if self.lambda == 0 {
            return bad("lambda", "must be positive");
        }
        if self.nb_elite > self.mu {
            return bad("nb_elite", "must not exceed mu");
        }
        if !(self.xi_ref > 0.0 && self.xi_ref < 1.0) {
            return bad("xi_ref", "must lie in (0, 1)");
        }
        if !(self.n_close_frac > 0.0 && self.n_close_frac <= 1.0) {
            return bad("n_close_frac", "must lie in (0, 1]");
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return bad("omega0", "must be positive");
        }
        if self.iter_ni == 0 {
            return bad("iter_ni", "must be positive");
        }
        if !(self.iter_div_frac > 0.0 && self.iter_div_frac <= 1.0) {
            return bad("iter_div_frac", "must lie in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.p_rep) {
            return bad("p_rep", "must lie in [0, 1]");
        }
        if !(self.h > 0.0 && self.h <= 1.0) {
            return bad("h", "must lie in (0, 1]");
        }
        if self.k_insert == 0 {
            return bad("k_insert", "must be positive");
        }
        Ok(())
    }

    /// Sets one numeric field from a `key=value` pair, keys named as the
    /// fields. `time_limit` is in seconds.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value.parse().map_err(|_| format!("{key}: `{value}` is not a valid value"))
        }
        match key {
            "mu" => self.mu = num(key, value)?,
            "lambda" => self.lambda = num(key, value)?,
            "nb_elite" => self.nb_elite = num(key, value)?,
            "xi_ref" => self.xi_ref = num(key, value)?,
            "n_close_frac" => self.n_close_frac = num(key, value)?,
            "omega0" => self.omega0 = num(key, value)?,
            "iter_ni" => self.iter_ni = num(key, value)?,
            "iter_div_frac" => self.iter_div_frac = num(key, value)?,
            "p_rep" => self.p_rep = num(key, value)?,
            "h" => self.h = num(key, value)?,
            "k_insert" => self.k_insert = num(key, value)?,
            "max_iterations" => self.max_iterations = Some(num(key, value)?),
            "time_limit" => {
                let secs: f64 = num(key, value)?;
                if !(secs.is_finite() && secs >= 0.0) {
                    return Err(format!("{key}: `{value}` is not a valid value"));
                }
                self.time_limit = Some(Duration::from_secs_f64(secs));
            }
            other => return Err(format!("unknown parameter `{other}`")),
        }
        Ok(())
    }

    /// Relax mode actually used, after ablations.
    pub fn effective_relax(&self) -> RelaxMode {
        if self.ablations.no_inf {
            RelaxMode::None
        } else {
            self.relax
        }
    }

    pub fn iter_div(&self) -> u64 {
        ((self.iter_div_frac * self.iter_ni as f64).ceil() as u64).max(1)
    }
}

/// Per-run statistics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub iterations: u64,
    /// (iteration, best feasible objective) at every improvement.
    pub best_trace: Vec<(u64, f64)>,
    /// (iteration, ω, naturally feasible share) at every penalty update.
    pub penalty_trace: Vec<(u64, f64, f64)>,
    pub diversifications: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HgaRun {
    pub best: TspDSolution,
    pub value: f64,
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationSummary {
    pub deliveries: usize,
    pub truck_excess: f64,
    pub drone_excess: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("no feasible solution found; best infeasible has {} violating deliveries", .summary.deliveries)]
pub struct NoFeasibleFound {
    pub best_infeasible: TspDSolution,
    pub phi: f64,
    pub summary: ViolationSummary,
    pub stats: RunStats,
}

fn summarize(sol: &TspDSolution, inst: &Instance) -> ViolationSummary {
    let ev = Evaluation::new(sol, inst);
    let mut s = ViolationSummary {
        deliveries: 0,
        truck_excess: 0.0,
        drone_excess: 0.0,
    };
    for t in &ev.timeline.deliveries {
        if t.truck_excess > 0.0 || t.drone_excess > 0.0 {
            s.deliveries += 1;
        }
        s.truck_excess += t.truck_excess;
        s.drone_excess += t.drone_excess;
    }
    s
}

/// Both subpopulations and the adaptive penalty.
#[derive(Debug, Clone)]
pub struct Population {
    pub feasible: Vec<Individual>,
    pub infeasible: Vec<Individual>,
    pub omega: f64,
    pub best_feasible: Option<Individual>,
    pub best_infeasible: Option<Individual>,
    /// Natural feasibility of the latest offspring.
    pub window: VecDeque<bool>,
}

impl Population {
    fn new(omega: f64) -> Self {
        Population {
            feasible: Vec::new(),
            infeasible: Vec::new(),
            omega,
            best_feasible: None,
            best_infeasible: None,
            window: VecDeque::with_capacity(PENALTY_PERIOD as usize),
        }
    }

    pub fn len(&self) -> usize {
        self.feasible.len() + self.infeasible.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = &Individual> {
        self.feasible.iter().chain(&self.infeasible)
    }

    fn record_offspring(&mut self, naturally_feasible: bool) {
        if self.window.len() == PENALTY_PERIOD as usize {
            self.window.pop_front();
        }
        self.window.push_back(naturally_feasible);
    }

    pub fn feasible_share(&self) -> f64 {
        if self.window.is_empty() {
            return 0.0;
        }
        self.window.iter().filter(|&&f| f).count() as f64 / self.window.len() as f64
    }
}

/// Multiplies ω by 1.2 or 0.85 when the naturally feasible share leaves the
/// ±0.05 band around the target, clamped to [1e-3, 1e6].
pub fn adjust_penalty(omega: f64, feasible_share: f64, xi_ref: f64) -> f64 {
    let next = if feasible_share < xi_ref - 0.05 {
        omega * 1.2
    } else if feasible_share > xi_ref + 0.05 {
        omega * 0.85
    } else {
        omega
    };
    next.clamp(OMEGA_MIN, OMEGA_MAX)
}

/// Random customer order, each inserted at one of its `k` cheapest truck
/// positions.
pub fn randomized_insertion<R: Rng>(inst: &Instance, k: usize, rng: &mut R) -> GiantTour {
    let n = inst.n();
    let end = inst.end_depot();
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut tour = vec![0, end];
    let mut costs: Vec<(f64, usize)> = Vec::with_capacity(n + 1);
    for c in order {
        costs.clear();
        for q in 0..tour.len() - 1 {
            let (a, b) = (tour[q], tour[q + 1]);
            let extra = inst.truck_dist(a, c) + inst.truck_dist(c, b) - inst.truck_dist(a, b);
            costs.push((extra, q));
        }
        costs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let pick = rng.gen_range(0..k.min(costs.len()));
        tour.insert(costs[pick].1 + 1, c);
    }
    GiantTour::from_vec_unchecked(tour[1..tour.len() - 1].to_vec())
}

struct Engine<'a> {
    inst: &'a Instance,
    params: &'a HgaParams,
    obj: Objective,
    relax: RelaxMode,
    neighbors: GranularNeighbors,
    rng: ChaCha8Rng,
}

/// Outcome of running a chromosome through split, education, repair and
/// restore.
struct Offspring {
    individual: Individual,
    naturally_feasible: bool,
}

impl Engine<'_> {
    fn evaluate(&self, sol: &TspDSolution) -> (f64, f64, bool) {
        let ev = Evaluation::new(sol, self.inst);
        (ev.objective(self.obj), ev.violation(self.obj, self.inst), ev.is_feasible())
    }

    fn develop(&mut self, chromosome: GiantTour, omega: f64) -> Offspring {
        let cfg = PenaltyConfig::new(omega, self.relax);
        let decoded = split(&chromosome, self.inst, &cfg, self.obj);
        let mut route = Route::new(&decoded, self.inst, self.obj, cfg);
        descend(&mut route, &self.neighbors, &mut self.rng);
        let mut sol = route.solution();
        let (mut objective, mut violation, mut feasible) = self.evaluate(&sol);
        let naturally_feasible = feasible;
        if !feasible && !self.params.ablations.no_repair && self.rng.gen_bool(self.params.p_rep) {
            for factor in [10.0, 100.0] {
                route.set_omega(omega * factor);
                descend(&mut route, &self.neighbors, &mut self.rng);
                sol = route.solution();
                (objective, violation, feasible) = self.evaluate(&sol);
                if feasible {
                    break;
                }
            }
        }
        let chromosome = if self.params.ablations.no_restore {
            chromosome
        } else {
            restore_with(&sol, &mut self.rng)
        };
        Offspring {
            individual: Individual::new(chromosome, sol, objective, violation, feasible),
            naturally_feasible,
        }
    }

    fn rank(&self, members: &mut [Individual], omega: f64) {
        biased_fitness(
            members,
            omega,
            self.params.nb_elite,
            self.params.n_close_frac,
            !self.params.ablations.no_div,
        );
    }

    /// Adds an individual; returns true when it improves the best solution
    /// (best infeasible φ while nothing feasible is known).
    fn insert(&self, pop: &mut Population, ind: Individual) -> bool {
        let omega = pop.omega;
        let mut improved = false;
        if ind.feasible {
            if pop.best_feasible.as_ref().is_none_or(|b| ind.objective < b.objective - IMPROVEMENT) {
                pop.best_feasible = Some(ind.clone());
                improved = true;
            }
        } else if pop
            .best_infeasible
            .as_ref()
            .is_none_or(|b| ind.phi_at(omega) < b.phi_at(omega) - IMPROVEMENT)
        {
            pop.best_infeasible = Some(ind.clone());
            improved = pop.best_feasible.is_none();
        }
        let cap = self.params.mu + self.params.lambda;
        let sub = if ind.feasible { &mut pop.feasible } else { &mut pop.infeasible };
        sub.push(ind);
        if sub.len() >= cap {
            select_survivors(
                sub,
                self.params.mu,
                omega,
                self.params.nb_elite,
                self.params.n_close_frac,
                !self.params.ablations.no_div,
            );
        }
        improved
    }

    /// Adds `count` new individuals built as at initialization; returns
    /// true when one of them improves the best solution.
    fn fresh(&mut self, pop: &mut Population, count: usize) -> bool {
        let mut improved = false;
        for _ in 0..count {
            let gt = randomized_insertion(self.inst, self.params.k_insert, &mut self.rng);
            let off = self.develop(gt, pop.omega);
            if off.individual.feasible || !self.params.ablations.no_inf {
                improved |= self.insert(pop, off.individual);
            }
        }
        improved
    }

    fn select_parents<'p>(&mut self, pop: &'p mut Population) -> (&'p Individual, &'p Individual) {
        let omega = pop.omega;
        self.rank(&mut pop.feasible, omega);
        self.rank(&mut pop.infeasible, omega);
        let pool: Vec<&Individual> = pop.members().collect();
        let a = population::tournament(&pool, &mut self.rng);
        let b = population::tournament(&pool, &mut self.rng);
        (pool[a], pool[b])
    }

    fn diversify(&mut self, pop: &mut Population) -> bool {
        let keep = self.params.mu.div_ceil(3);
        let omega = pop.omega;
        for feasible in [true, false] {
            let mut sub = std::mem::take(if feasible { &mut pop.feasible } else { &mut pop.infeasible });
            self.rank(&mut sub, omega);
            sub.sort_by(|a, b| a.bf.total_cmp(&b.bf));
            sub.truncate(keep);
            if feasible {
                if let Some(best) = &pop.best_feasible {
                    if !sub.iter().any(|m| m.chromosome == best.chromosome) {
                        sub.push(best.clone());
                    }
                }
                pop.feasible = sub;
            } else {
                pop.infeasible = sub;
            }
        }
        self.fresh(pop, 4 * self.params.mu)
    }
}

fn note_best(pop: &Population, iter: u64, stats: &mut RunStats) {
    if let Some(b) = &pop.best_feasible {
        if stats.best_trace.last().is_none_or(|&(_, v)| b.objective < v) {
            stats.best_trace.push((iter, b.objective));
        }
    }
}

/// Runs the search and returns the best feasible solution found.
pub fn run_hga(inst: &Instance, params: &HgaParams, obj: Objective, seed: u64) -> Result<HgaRun, NoFeasibleFound> {
    run_hga_traced(inst, params, obj, seed, |_, _| {})
}

/// As [`run_hga`], calling `observe` after every iteration with the
/// iteration number and the population.
pub fn run_hga_traced(
    inst: &Instance,
    params: &HgaParams,
    obj: Objective,
    seed: u64,
    mut observe: impl FnMut(u64, &Population),
) -> Result<HgaRun, NoFeasibleFound> {
    params.validate().expect("valid HGA parameters");
    let start = Instant::now();
    let mut engine = Engine {
        inst,
        params,
        obj,
        relax: params.effective_relax(),
        neighbors: build_granular_neighbors(inst, params.h),
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    let mut pop = Population::new(params.omega0);
    let mut stats = RunStats::default();
    engine.fresh(&mut pop, 4 * params.mu);
    note_best(&pop, 0, &mut stats);

    let iter_div = params.iter_div();
    let mut since_improvement = 0u64;
    let mut since_diversify = 0u64;
    let mut iter = 0u64;
    while since_improvement < params.iter_ni
        && params.max_iterations.is_none_or(|m| iter < m)
        && params.time_limit.is_none_or(|t| start.elapsed() < t)
    {
        iter += 1;
        let mut improved = if pop.is_empty() {
            engine.fresh(&mut pop, 4 * params.mu)
        } else {
            let (p1, p2) = engine.select_parents(&mut pop);
            let child = crossover(params.crossover, &p1.chromosome, &p1.decoded, &p2.chromosome, &mut engine.rng);
            let off = engine.develop(child, pop.omega);
            pop.record_offspring(off.naturally_feasible);
            (off.individual.feasible || !params.ablations.no_inf) && engine.insert(&mut pop, off.individual)
        };
        if improved {
            since_improvement = 0;
            since_diversify = 0;
        } else {
            since_improvement += 1;
            since_diversify += 1;
        }
        if iter % PENALTY_PERIOD == 0 {
            let share = pop.feasible_share();
            pop.omega = adjust_penalty(pop.omega, share, params.xi_ref);
            stats.penalty_trace.push((iter, pop.omega, share));
        }
        if since_diversify >= iter_div {
            improved = engine.diversify(&mut pop);
            stats.diversifications += 1;
            since_diversify = 0;
            if improved {
                since_improvement = 0;
            }
        }
        note_best(&pop, iter, &mut stats);
        observe(iter, &pop);
    }
    stats.iterations = iter;
    stats.wall_time = start.elapsed();

    match pop.best_feasible {
        Some(b) => Ok(HgaRun {
            best: b.decoded,
            value: b.objective,
            stats,
        }),
        None => {
            let b = pop.best_infeasible.expect("at least one individual was developed");
            Err(NoFeasibleFound {
                summary: summarize(&b.decoded, inst),
                phi: b.phi_at(pop.omega),
                best_infeasible: b.decoded,
                stats,
            })
        }
    }
}
