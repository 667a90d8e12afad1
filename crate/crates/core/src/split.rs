//! Giant tour → TSP-D decoding.
//!
//! Positions run from 0 (start depot) to n+1 (end depot); position p in
//! between holds `gt[p-1]`. A segment (a, m, b) flies the customer at m
//! from a to b while the truck serves every other position of a..=b.
//! Three labels are kept per position, since whether b relaunches the
//! drone changes both its recovery time and which transitions may leave it.

use crate::evaluation::{arc_weight, delivery_term, PenaltyConfig};
use crate::model::{DroneDelivery, GiantTour, Instance, NodeId, Objective, TspDSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    /// Reached by a truck arc, no drone activity.
    Plain,
    /// Rendezvous that does not relaunch.
    Rejoin,
    /// Rendezvous that immediately relaunches.
    Relaunch,
}

#[derive(Debug, Clone, Copy)]
enum Back {
    Start,
    Truck(State),
    Segment { from: usize, drone: usize, state: State },
}

#[derive(Debug, Clone, Copy)]
struct Label {
    cost: f64,
    deliveries: usize,
    back: Back,
}

impl Label {
    const NONE: Label = Label {
        cost: f64::INFINITY,
        deliveries: usize::MAX,
        back: Back::Start,
    };

    fn better_than(&self, other: &Label) -> bool {
        self.cost < other.cost || (self.cost == other.cost && self.deliveries < other.deliveries)
    }
}

/// Result of a split: the decoded solution and its penalized cost.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub solution: TspDSolution,
    pub phi: f64,
}

/// Decodes `gt` into the minimum-φ order-preserving TSP-D solution.
pub fn split(gt: &GiantTour, inst: &Instance, cfg: &PenaltyConfig, obj: Objective) -> TspDSolution {
    split_scored(gt, inst, cfg, obj).solution
}

pub fn split_scored(gt: &GiantTour, inst: &Instance, cfg: &PenaltyConfig, obj: Objective) -> SplitResult {
    let n = inst.n();
    let seq = gt.as_slice();
    debug_assert_eq!(seq.len(), n);
    let last = n + 1;
    let node = |p: usize| -> NodeId {
        if p == 0 {
            0
        } else if p == last {
            last
        } else {
            seq[p - 1]
        }
    };

    // Prefix sums of arc weight and truck time along the full truck path.
    let mut weight = vec![0.0; n + 2];
    let mut time = vec![0.0; n + 2];
    for p in 1..=last {
        weight[p] = weight[p - 1] + arc_weight(inst, obj, node(p - 1), node(p));
        time[p] = time[p - 1] + inst.truck_time(node(p - 1), node(p));
    }

    let idx = |s: State| s as usize;
    let mut labels = vec![[Label::NONE; 3]; n + 2];
    labels[0][idx(State::Plain)] = Label {
        cost: 0.0,
        deliveries: 0,
        back: Back::Start,
    };

    for b in 1..=last {
        let mut here = [Label::NONE; 3];

        // Truck arc into b.
        let arc = arc_weight(inst, obj, node(b - 1), node(b));
        for s in [State::Plain, State::Rejoin] {
            let prev = labels[b - 1][idx(s)];
            if prev.cost.is_finite() {
                let cand = Label {
                    cost: prev.cost + arc,
                    deliveries: prev.deliveries,
                    back: Back::Truck(s),
                };
                if cand.better_than(&here[idx(State::Plain)]) {
                    here[idx(State::Plain)] = cand;
                }
            }
        }

        // Drone segment (a, m, b).
        for a in 0..b.saturating_sub(1) {
            if a == 0 && b == last {
                continue;
            }
            let (start_state, start) = {
                let plain = labels[a][idx(State::Plain)];
                let relaunch = labels[a][idx(State::Relaunch)];
                if relaunch.better_than(&plain) {
                    (State::Relaunch, relaunch)
                } else {
                    (State::Plain, plain)
                }
            };
            if !start.cost.is_finite() {
                continue;
            }
            for m in a + 1..b {
                let j = node(m);
                if !inst.is_drone_eligible(j) {
                    continue;
                }
                let skip_w = weight[m - 1] - weight[a]
                    + arc_weight(inst, obj, node(m - 1), node(m + 1))
                    + weight[b]
                    - weight[m + 1];
                let span = time[m - 1] - time[a] + inst.truck_time(node(m - 1), node(m + 1)) + time[b] - time[m + 1];
                let d = DroneDelivery::new(node(a), j, node(b));
                for (state, relaunch) in [(State::Rejoin, false), (State::Relaunch, true)] {
                    if relaunch && b == last {
                        continue;
                    }
                    let Some(term) = delivery_term(inst, obj, cfg.relax, d, span, relaunch) else {
                        continue;
                    };
                    let cand = Label {
                        cost: start.cost + skip_w + term.penalized(cfg.omega),
                        deliveries: start.deliveries + 1,
                        back: Back::Segment {
                            from: a,
                            drone: m,
                            state: start_state,
                        },
                    };
                    if cand.better_than(&here[idx(state)]) {
                        here[idx(state)] = cand;
                    }
                }
            }
        }
        labels[b] = here;
    }

    let plain = labels[last][idx(State::Plain)];
    let rejoin = labels[last][idx(State::Rejoin)];
    let (mut state, best) = if rejoin.better_than(&plain) {
        (State::Rejoin, rejoin)
    } else {
        (State::Plain, plain)
    };

    let mut truck = Vec::with_capacity(n + 2);
    let mut deliveries = Vec::new();
    let mut b = last;
    truck.push(node(b));
    loop {
        match labels[b][idx(state)].back {
            Back::Start => break,
            Back::Truck(s) => {
                b -= 1;
                state = s;
                truck.push(node(b));
            }
            Back::Segment { from, drone, state: s } => {
                deliveries.push(DroneDelivery::new(node(from), node(drone), node(b)));
                for p in (from..b).rev() {
                    if p != drone {
                        truck.push(node(p));
                    }
                }
                b = from;
                state = s;
            }
        }
    }
    truck.reverse();
    deliveries.reverse();
    SplitResult {
        solution: TspDSolution::new(truck, deliveries),
        phi: best.cost,
    }
}
