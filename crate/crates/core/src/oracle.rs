//! Exhaustive references for small instances.
//!
//! [`exact_solve`] is a depth-first enumeration of every TSP-D solution with
//! cost-bound pruning, [`enumerate_splits`] lists every order-preserving
//! labeling of one giant tour, and [`event_timeline`] recomputes timelines
//! with a discrete-event simulation instead of a walk along the tour.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::evaluation::{
    arc_weight, delivery_term, penalized_cost, DeliveryTiming, Evaluation, PenaltyConfig, RelaxMode, Timeline,
};
use crate::model::{DroneDelivery, GiantTour, Instance, NodeId, Objective, TspDSolution};

pub const EXACT_LIMIT: usize = 8;
pub const SPLIT_ENUM_LIMIT: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {n} customers, exhaustive search is limited to {limit}")]
    TooLarge { n: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOptimum {
    pub solution: TspDSolution,
    pub value: f64,
}

/// Optimal feasible solution by exhaustive search.
///
/// Only endurance-feasible solutions are considered, whatever the relax
/// mode of `cfg`; the value is the raw objective.
pub fn exact_solve(inst: &Instance, obj: Objective, _cfg: &PenaltyConfig) -> Result<ExactOptimum, OracleError> {
    let n = inst.n();
    if n > EXACT_LIMIT {
        return Err(OracleError::TooLarge { n, limit: EXACT_LIMIT });
    }
    let mut search = Search {
        inst,
        obj,
        n,
        truck: vec![0],
        deliveries: Vec::new(),
        best: None,
        bound: f64::INFINITY,
    };
    search.at_node(0, 0, 0.0, None);
    let (solution, value) = search.best.expect("the truck-only tour is always feasible");
    Ok(ExactOptimum { solution, value })
}

struct Search<'a> {
    inst: &'a Instance,
    obj: Objective,
    n: usize,
    truck: Vec<NodeId>,
    deliveries: Vec<DroneDelivery>,
    best: Option<(TspDSolution, f64)>,
    bound: f64,
}

impl Search<'_> {
    fn slack(&self) -> f64 {
        self.bound + 1e-9 * self.bound.abs().max(1.0)
    }

    /// Truck at `v` with the drone on board. `rejoined` is the delivery that
    /// just landed here, which still needs its relaunch check.
    fn at_node(&mut self, v: NodeId, served: u32, cost: f64, rejoined: Option<(DroneDelivery, f64)>) {
        if cost > self.slack() {
            return;
        }
        let all = (1u32 << self.n) - 1;
        let end = self.n + 1;
        if v == end {
            if served == all {
                self.leaf();
            }
            return;
        }
        // Launch from v (relaunching when a delivery just rejoined here).
        let relaunch_ok = match rejoined {
            Some((d, span)) => delivery_term(self.inst, self.obj, RelaxMode::None, d, span, true).is_some(),
            None => true,
        };
        if relaunch_ok {
            for j in 1..=self.n {
                if served & bit(j) != 0 || !self.inst.is_drone_eligible(j) {
                    continue;
                }
                let p = self.inst.params();
                if self.inst.drone_time(v, j) + p.retrieve_time > p.endurance {
                    continue;
                }
                self.fly(
                    v,
                    served | bit(j),
                    cost,
                    DroneDelivery::new(v, j, usize::MAX),
                    0.0,
                );
            }
        }
        // Truck-only move from v.
        for w in self.next_nodes(v, served) {
            let c = cost + arc_weight(self.inst, self.obj, v, w);
            self.truck.push(w);
            let s = if w == end { served } else { served | bit(w) };
            self.at_node(w, s, c, None);
            self.truck.pop();
        }
    }

    /// Truck leaves `v` while the drone is out on `delivery`; `span` is the
    /// truck time since launch.
    fn fly(&mut self, v: NodeId, served: u32, cost: f64, delivery: DroneDelivery, span: f64) {
        let p = *self.inst.params();
        let end = self.n + 1;
        for w in self.next_nodes(v, served) {
            let leg = self.inst.truck_time(v, w);
            let s = span + leg;
            if delivery.launch != 0 && s + p.retrieve_time > p.endurance {
                continue;
            }
            let c = cost + arc_weight(self.inst, self.obj, v, w);
            if c > self.slack() {
                continue;
            }
            self.truck.push(w);
            let next = if w == end { served } else { served | bit(w) };
            // Rendezvous at w.
            if !(delivery.launch == 0 && w == end) {
                let d = DroneDelivery::new(delivery.launch, delivery.customer, w);
                if let Some(term) = delivery_term(self.inst, self.obj, RelaxMode::None, d, s, false) {
                    self.deliveries.push(d);
                    self.at_node(w, next, c + term.raw, Some((d, s)));
                    self.deliveries.pop();
                }
            }
            // Keep flying past w.
            if w != end {
                self.fly(w, next, c, delivery, s);
            }
            self.truck.pop();
        }
    }

    fn next_nodes(&self, v: NodeId, served: u32) -> Vec<NodeId> {
        let all = (1u32 << self.n) - 1;
        if served == all {
            return vec![self.n + 1];
        }
        let mut out: Vec<NodeId> = (1..=self.n).filter(|&w| served & bit(w) == 0).collect();
        out.sort_by(|&a, &b| self.inst.truck_dist(v, a).total_cmp(&self.inst.truck_dist(v, b)));
        out
    }

    fn leaf(&mut self) {
        let sol = TspDSolution::new(self.truck.clone(), self.deliveries.clone());
        let ev = Evaluation::new(&sol, self.inst);
        if !ev.is_feasible() {
            return;
        }
        let value = ev.objective(self.obj);
        let better = match &self.best {
            None => true,
            Some((b, bv)) => match value.total_cmp(bv) {
                Ordering::Less => true,
                Ordering::Equal => sol.truck_tour < b.truck_tour,
                Ordering::Greater => false,
            },
        };
        if better {
            self.bound = value;
            self.best = Some((sol, value));
        }
    }
}

#[inline]
fn bit(customer: NodeId) -> u32 {
    1u32 << (customer - 1)
}

/// Every order-preserving labeling of `gt` admissible under `cfg`, with its φ.
pub fn enumerate_splits(
    gt: &GiantTour,
    inst: &Instance,
    cfg: &PenaltyConfig,
    obj: Objective,
) -> Result<Vec<(TspDSolution, f64)>, OracleError> {
    let n = inst.n();
    if n > SPLIT_ENUM_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: SPLIT_ENUM_LIMIT,
        });
    }
    let mut path = Vec::with_capacity(n + 2);
    path.push(0);
    path.extend_from_slice(gt.as_slice());
    path.push(n + 1);
    let mut out = Vec::new();
    let mut segments = Vec::new();
    labelings(&path, inst, 0, &mut segments, &mut |segs| {
        let sol = labeled_solution(&path, segs);
        if let Some(phi) = penalized_cost(&sol, inst, cfg, obj) {
            out.push((sol, phi));
        }
    });
    Ok(out)
}

/// Visits every labeling as a list of (launch, drone, rendezvous) positions.
fn labelings(
    path: &[NodeId],
    inst: &Instance,
    from: usize,
    segs: &mut Vec<(usize, usize, usize)>,
    visit: &mut impl FnMut(&[(usize, usize, usize)]),
) {
    let last = path.len() - 1;
    if from == last {
        visit(segs);
        return;
    }
    labelings(path, inst, from + 1, segs, visit);
    for b in from + 2..=last {
        if from == 0 && b == last {
            continue;
        }
        for m in from + 1..b {
            if inst.is_drone_eligible(path[m]) {
                segs.push((from, m, b));
                labelings(path, inst, b, segs, visit);
                segs.pop();
            }
        }
    }
}

fn labeled_solution(path: &[NodeId], segs: &[(usize, usize, usize)]) -> TspDSolution {
    let mut drone = vec![false; path.len()];
    for &(_, m, _) in segs {
        drone[m] = true;
    }
    let truck = path.iter().zip(&drone).filter(|(_, &d)| !d).map(|(&v, _)| v).collect();
    let deliveries = segs
        .iter()
        .map(|&(a, m, b)| DroneDelivery::new(path[a], path[m], path[b]))
        .collect();
    TspDSolution::new(truck, deliveries)
}

/// Number of labelings of a tour whose positions 1..=n have the given
/// drone eligibility, counted by choosing drone position sets directly.
pub fn count_labelings(eligible: &[bool]) -> u64 {
    let n = eligible.len();
    let last = n + 1;
    let mut total = 0;
    for mask in 0u32..(1 << n) {
        let drones: Vec<usize> = (1..=n).filter(|&p| mask & (1 << (p - 1)) != 0).collect();
        if drones.iter().any(|&p| !eligible[p - 1]) {
            continue;
        }
        let is_drone = |p: usize| p >= 1 && p <= n && mask & (1 << (p - 1)) != 0;
        // Candidate spans per drone: endpoints are truck positions with no
        // other drone strictly between them.
        let spans: Vec<Vec<(usize, usize)>> = drones
            .iter()
            .map(|&m| {
                let mut v = Vec::new();
                for a in (0..m).rev() {
                    if is_drone(a) {
                        break;
                    }
                    for b in m + 1..=last {
                        if is_drone(b) {
                            break;
                        }
                        if !(a == 0 && b == last) {
                            v.push((a, b));
                        }
                    }
                }
                v
            })
            .collect();
        total += count_chains(&spans, 0, 0);
    }
    total
}

fn count_chains(spans: &[Vec<(usize, usize)>], idx: usize, after: usize) -> u64 {
    if idx == spans.len() {
        return 1;
    }
    spans[idx]
        .iter()
        .filter(|&&(a, _)| a >= after)
        .map(|&(_, b)| count_chains(spans, idx + 1, b))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    TruckArrives(usize),
    DroneAtCustomer(usize),
    DroneArrives(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Timed {
    at: f64,
    seq: u64,
    event: Event,
}

impl Eq for Timed {}

impl Ord for Timed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.at.total_cmp(&other.at).then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Timed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Timeline of a structurally valid solution by discrete-event simulation.
pub fn event_timeline(sol: &TspDSolution, inst: &Instance) -> Timeline {
    let p = *inst.params();
    let td = &sol.truck_tour;
    let len = td.len();
    let dd = &sol.drone_deliveries;
    let position = |v: NodeId| td.iter().position(|&x| x == v).expect("endpoint on the truck tour");
    let launches: Vec<(usize, usize)> = dd.iter().enumerate().map(|(i, d)| (position(d.launch), i)).collect();
    let rendezvous: Vec<(usize, usize)> = dd.iter().enumerate().map(|(i, d)| (position(d.rendezvous), i)).collect();
    let launched_at = |q: usize| launches.iter().find(|&&(p, _)| p == q).map(|&(_, i)| i);
    let joined_at = |q: usize| rendezvous.iter().find(|&&(p, _)| p == q).map(|&(_, i)| i);

    let mut queue = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |queue: &mut BinaryHeap<Reverse<Timed>>, at: f64, event: Event| {
        queue.push(Reverse(Timed { at, seq, event }));
        seq += 1;
    };

    let mut truck = vec![f64::NAN; len];
    let mut truck_arrival = vec![f64::NAN; len];
    let mut drone_arrival = vec![f64::NAN; dd.len()];
    let mut departure = vec![f64::NAN; dd.len()];
    let mut at_customer = vec![f64::NAN; dd.len()];

    // Leaving position q at time t.
    let leave = |q: usize, t: f64, queue: &mut BinaryHeap<Reverse<Timed>>, push: &mut dyn FnMut(&mut BinaryHeap<Reverse<Timed>>, f64, Event)| {
        if q + 1 < len {
            push(queue, t + inst.truck_time(td[q], td[q + 1]), Event::TruckArrives(q + 1));
        }
    };

    truck[0] = 0.0;
    let start = match launched_at(0) {
        Some(i) => {
            departure[i] = p.launch_time;
            push(&mut queue, p.launch_time + inst.drone_time(dd[i].launch, dd[i].customer), Event::DroneAtCustomer(i));
            p.launch_time
        }
        None => 0.0,
    };
    leave(0, start, &mut queue, &mut push);

    // A position is finished once the truck is there and, for a rendezvous,
    // the drone too.
    let finish = |q: usize,
                      truck: &mut Vec<f64>,
                      truck_arrival: &[f64],
                      drone_arrival: &[f64],
                      departure: &mut Vec<f64>,
                      queue: &mut BinaryHeap<Reverse<Timed>>,
                      push: &mut dyn FnMut(&mut BinaryHeap<Reverse<Timed>>, f64, Event)| {
        let mut t = truck_arrival[q];
        if let Some(i) = joined_at(q) {
            t = truck_arrival[q].max(drone_arrival[i]) + p.retrieve_time;
        }
        if let Some(i) = launched_at(q) {
            t += p.launch_time;
            departure[i] = t;
            push(queue, t + inst.drone_time(dd[i].launch, dd[i].customer), Event::DroneAtCustomer(i));
        }
        truck[q] = t;
        leave(q, t, queue, push);
    };

    while let Some(Reverse(Timed { at, event, .. })) = queue.pop() {
        match event {
            Event::TruckArrives(q) => {
                truck_arrival[q] = at;
                match joined_at(q) {
                    Some(i) if drone_arrival[i].is_nan() => {}
                    _ => finish(q, &mut truck, &truck_arrival, &drone_arrival, &mut departure, &mut queue, &mut push),
                }
            }
            Event::DroneAtCustomer(i) => {
                at_customer[i] = at;
                push(&mut queue, at + inst.drone_time(dd[i].customer, dd[i].rendezvous), Event::DroneArrives(i));
            }
            Event::DroneArrives(i) => {
                drone_arrival[i] = at;
                let q = rendezvous[i].0;
                if !truck_arrival[q].is_nan() {
                    finish(q, &mut truck, &truck_arrival, &drone_arrival, &mut departure, &mut queue, &mut push);
                }
            }
        }
    }

    let mut drone = truck.clone();
    for (i, _) in dd.iter().enumerate() {
        let (a, b) = (launches[i].0, rendezvous[i].0);
        for slot in drone.iter_mut().take(b).skip(a + 1) {
            *slot = truck[a];
        }
    }

    let deliveries = dd
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let (a, b) = (launches[i].0, rendezvous[i].0);
            let mut span = 0.0;
            for q in a..b {
                span += inst.truck_time(td[q], td[q + 1]);
            }
            let out = inst.drone_time(d.launch, d.customer);
            let flight = out + inst.drone_time(d.customer, d.rendezvous);
            let relaunch = launched_at(b).is_some();
            let recover = p.retrieve_time + if relaunch { p.launch_time } else { 0.0 };
            DeliveryTiming {
                departure: departure[i],
                drone_at_customer: at_customer[i],
                drone_at_rendezvous: drone_arrival[i],
                truck_at_rendezvous: truck_arrival[b],
                truck_wait: (drone_arrival[i] - truck_arrival[b]).max(0.0),
                drone_wait: (truck_arrival[b] - drone_arrival[i]).max(0.0),
                truck_span: span,
                drone_flight: flight,
                recover_truck: recover,
                truck_excess: if d.launch == 0 {
                    0.0
                } else {
                    (span + recover - p.endurance).max(0.0)
                },
                drone_excess: (flight + p.retrieve_time - p.endurance).max(0.0),
            }
        })
        .collect();

    Timeline {
        truck,
        drone,
        deliveries,
    }
}
