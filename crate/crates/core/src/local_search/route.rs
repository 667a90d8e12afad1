//! Indexed view of a solution with incremental evaluation of edits.

use smallvec::SmallVec;

use crate::evaluation::{arc_weight, delivery_term, PenaltyConfig};
use crate::model::{DroneDelivery, Instance, NodeId, Objective, TspDSolution};

pub(crate) const NONE: usize = usize::MAX;

/// A piece of the new truck tour, in terms of the current one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// Positions `l..=r` in their current order.
    Fwd(usize, usize),
    /// Positions `l..=r` reversed.
    Rev(usize, usize),
    /// A single node placed here (new or moved truck node).
    Node(NodeId),
}

/// A candidate modification: the new truck tour as a concatenation of
/// pieces, plus deliveries removed (by index) and added.
///
/// Deliveries lying entirely inside a reversed piece are reoriented.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Edit {
    pub pieces: SmallVec<[Piece; 6]>,
    pub removed: SmallVec<[usize; 4]>,
    pub added: SmallVec<[DroneDelivery; 4]>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Sortie {
    pub d: DroneDelivery,
    pub pi: usize,
    pub pk: usize,
    pub g: f64,
}

/// Current solution with position indexes, prefix sums and per-delivery
/// objective terms.
#[derive(Debug, Clone)]
pub struct Route<'a> {
    pub(crate) inst: &'a Instance,
    pub(crate) obj: Objective,
    pub(crate) cfg: PenaltyConfig,
    pub(crate) td: Vec<NodeId>,
    /// Tour position per node, `NONE` for drone nodes.
    pub(crate) pos: Vec<usize>,
    cw: Vec<f64>,
    ct: Vec<f64>,
    rcw: Vec<f64>,
    rct: Vec<f64>,
    /// Sorted by launch position.
    pub(crate) sorties: Vec<Sortie>,
    pub(crate) launch_at: Vec<usize>,
    pub(crate) rdv_at: Vec<usize>,
    /// Delivery whose span contains the arc leaving each position.
    pub(crate) cover: Vec<usize>,
    /// Delivery serving each drone node.
    pub(crate) drone_of: Vec<usize>,
    /// Launch and rendezvous endpoints at positions `< p`.
    events: Vec<u32>,
    phi: f64,
}

impl<'a> Route<'a> {
    /// Builds the route. Deliveries the relax mode rejects make `phi` infinite.
    pub fn new(sol: &TspDSolution, inst: &'a Instance, obj: Objective, cfg: PenaltyConfig) -> Self {
        let mut r = Route {
            inst,
            obj,
            cfg,
            td: Vec::new(),
            pos: Vec::new(),
            cw: Vec::new(),
            ct: Vec::new(),
            rcw: Vec::new(),
            rct: Vec::new(),
            sorties: Vec::new(),
            launch_at: Vec::new(),
            rdv_at: Vec::new(),
            cover: Vec::new(),
            drone_of: Vec::new(),
            events: Vec::new(),
            phi: 0.0,
        };
        r.rebuild(sol.truck_tour.clone(), &sol.drone_deliveries);
        r
    }

    fn rebuild(&mut self, td: Vec<NodeId>, deliveries: &[DroneDelivery]) {
        let inst = self.inst;
        let len = td.len();
        let nodes = inst.n() + 2;
        self.pos.clear();
        self.pos.resize(nodes, NONE);
        for (p, &v) in td.iter().enumerate() {
            self.pos[v] = p;
        }
        for v in [&mut self.cw, &mut self.ct, &mut self.rcw, &mut self.rct] {
            v.clear();
            v.resize(len, 0.0);
        }
        for p in 1..len {
            let (a, b) = (td[p - 1], td[p]);
            self.cw[p] = self.cw[p - 1] + arc_weight(inst, self.obj, a, b);
            self.ct[p] = self.ct[p - 1] + inst.truck_time(a, b);
            self.rcw[p] = self.rcw[p - 1] + arc_weight(inst, self.obj, b, a);
            self.rct[p] = self.rct[p - 1] + inst.truck_time(b, a);
        }
        self.sorties.clear();
        for &d in deliveries {
            self.sorties.push(Sortie {
                d,
                pi: self.pos[d.launch],
                pk: self.pos[d.rendezvous],
                g: 0.0,
            });
        }
        self.sorties.sort_unstable_by_key(|s| s.pi);
        self.launch_at.clear();
        self.launch_at.resize(len, NONE);
        self.rdv_at.clear();
        self.rdv_at.resize(len, NONE);
        self.cover.clear();
        self.cover.resize(len, NONE);
        self.drone_of.clear();
        self.drone_of.resize(nodes, NONE);
        for (idx, s) in self.sorties.iter().enumerate() {
            self.launch_at[s.pi] = idx;
            self.rdv_at[s.pk] = idx;
            self.drone_of[s.d.customer] = idx;
            for c in &mut self.cover[s.pi..s.pk] {
                *c = idx;
            }
        }
        self.events.clear();
        self.events.resize(len + 1, 0);
        for p in 0..len {
            let here = (self.launch_at[p] != NONE) as u32 + (self.rdv_at[p] != NONE) as u32;
            self.events[p + 1] = self.events[p] + here;
        }
        let mut phi = self.cw[len - 1];
        for idx in 0..self.sorties.len() {
            let s = self.sorties[idx];
            let relaunch = self.launch_at[s.pk] != NONE;
            let g = match delivery_term(inst, self.obj, self.cfg.relax, s.d, self.ct[s.pk] - self.ct[s.pi], relaunch) {
                Some(t) => t.penalized(self.cfg.omega),
                None => f64::INFINITY,
            };
            self.sorties[idx].g = g;
            phi += g;
        }
        self.td = td;
        self.phi = phi;
    }

    /// Penalized cost, from the decomposed objective.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn truck_tour(&self) -> &[NodeId] {
        &self.td
    }

    pub fn deliveries(&self) -> impl Iterator<Item = DroneDelivery> + '_ {
        self.sorties.iter().map(|s| s.d)
    }

    pub fn solution(&self) -> TspDSolution {
        TspDSolution::new(self.td.clone(), self.deliveries().collect())
    }

    pub fn set_omega(&mut self, omega: f64) {
        self.cfg.omega = omega;
        let ds: Vec<DroneDelivery> = self.deliveries().collect();
        let td = std::mem::take(&mut self.td);
        self.rebuild(td, &ds);
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.td.len()
    }

    #[inline]
    pub(crate) fn has_events(&self, p: usize) -> bool {
        self.launch_at[p] != NONE || self.rdv_at[p] != NONE
    }

    /// Endpoint events at positions strictly between `a` and `b`.
    #[inline]
    pub(crate) fn events_between(&self, a: usize, b: usize) -> u32 {
        if b <= a + 1 {
            0
        } else {
            self.events[b] - self.events[a + 1]
        }
    }

    fn reoriented(&self, e: &Edit, idx: usize) -> bool {
        let s = &self.sorties[idx];
        e.pieces
            .iter()
            .any(|p| matches!(*p, Piece::Rev(l, r) if s.pi >= l && s.pk <= r))
    }

    fn launches_after(&self, e: &Edit, x: NodeId) -> bool {
        if e.added.iter().any(|a| a.launch == x) {
            return true;
        }
        let p = self.pos[x];
        if p == NONE {
            return false;
        }
        let l = self.launch_at[p];
        if l != NONE && !e.removed.contains(&l) && !self.reoriented(e, l) {
            return true;
        }
        let r = self.rdv_at[p];
        r != NONE && !e.removed.contains(&r) && self.reoriented(e, r)
    }

    /// Change in φ if `e` were applied; `None` when the result would break
    /// the tour structure or contain a delivery the relax mode rejects.
    pub fn delta(&self, e: &Edit) -> Option<f64> {
        let inst = self.inst;
        let len = self.len();
        let mut offsets: SmallVec<[(f64, usize); 6]> = SmallVec::new();
        let mut arcs = 0.0;
        let mut time = 0.0;
        let mut count = 0;
        let mut prev: Option<NodeId> = None;
        for piece in &e.pieces {
            let (first, last, w, t, n) = match *piece {
                Piece::Fwd(l, r) => (self.td[l], self.td[r], self.cw[r] - self.cw[l], self.ct[r] - self.ct[l], r - l + 1),
                Piece::Rev(l, r) => (self.td[r], self.td[l], self.rcw[r] - self.rcw[l], self.rct[r] - self.rct[l], r - l + 1),
                Piece::Node(x) => (x, x, 0.0, 0.0, 1),
            };
            if let Some(p) = prev {
                arcs += arc_weight(inst, self.obj, p, first);
                time += inst.truck_time(p, first);
            }
            offsets.push((time, count));
            arcs += w;
            time += t;
            count += n;
            prev = Some(last);
        }
        let locate = |x: NodeId| -> Option<(f64, usize)> {
            let p = self.pos[x];
            for (piece, &(t0, c0)) in e.pieces.iter().zip(&offsets) {
                match *piece {
                    Piece::Node(y) if y == x => return Some((t0, c0)),
                    Piece::Fwd(l, r) if p != NONE && l <= p && p <= r => {
                        return Some((t0 + self.ct[p] - self.ct[l], c0 + p - l))
                    }
                    Piece::Rev(l, r) if p != NONE && l <= p && p <= r => {
                        return Some((t0 + self.rct[r] - self.rct[p], c0 + r - p))
                    }
                    _ => {}
                }
            }
            None
        };

        let mut affected: SmallVec<[usize; 12]> = SmallVec::new();
        let add = |idx: usize, affected: &mut SmallVec<[usize; 12]>| {
            if idx != NONE && !e.removed.contains(&idx) && !affected.contains(&idx) {
                affected.push(idx);
            }
        };
        for piece in &e.pieces {
            match *piece {
                Piece::Fwd(l, r) | Piece::Rev(l, r) => {
                    if l > 0 {
                        add(self.cover[l - 1], &mut affected);
                    }
                    if r + 1 < len {
                        add(self.cover[r], &mut affected);
                    }
                    if let Piece::Rev(..) = piece {
                        let start = self.sorties.partition_point(|s| s.pi < l);
                        for idx in start..self.sorties.len() {
                            if self.sorties[idx].pi > r {
                                break;
                            }
                            add(idx, &mut affected);
                        }
                    }
                }
                Piece::Node(x) => {
                    let p = self.pos[x];
                    if p != NONE {
                        if p > 0 {
                            add(self.cover[p - 1], &mut affected);
                        }
                        add(self.cover[p], &mut affected);
                    }
                }
            }
        }
        let launches = e
            .removed
            .iter()
            .map(|&r| self.sorties[r].d.launch)
            .chain(e.added.iter().map(|a| a.launch));
        for x in launches {
            let p = self.pos[x];
            if p != NONE {
                add(self.rdv_at[p], &mut affected);
            }
        }

        let mut delta = arcs - self.cw[len - 1];
        for &r in &e.removed {
            delta -= self.sorties[r].g;
        }
        let term = |d: DroneDelivery| -> Option<f64> {
            if d.launch == 0 && d.rendezvous == inst.end_depot() {
                return None;
            }
            let (ti, pi) = locate(d.launch)?;
            let (tk, pk) = locate(d.rendezvous)?;
            if pi >= pk {
                return None;
            }
            let relaunch = self.launches_after(e, d.rendezvous);
            delivery_term(inst, self.obj, self.cfg.relax, d, tk - ti, relaunch).map(|t| t.penalized(self.cfg.omega))
        };
        for &idx in &affected {
            let s = self.sorties[idx];
            let d = if self.reoriented(e, idx) {
                DroneDelivery::new(s.d.rendezvous, s.d.customer, s.d.launch)
            } else {
                s.d
            };
            delta += term(d)? - s.g;
        }
        for &a in &e.added {
            delta += term(a)?;
        }
        Some(delta)
    }

    /// Applies `e` and rebuilds every index.
    pub fn apply(&mut self, e: &Edit) {
        let mut td = Vec::with_capacity(self.len() + 1);
        for piece in &e.pieces {
            match *piece {
                Piece::Fwd(l, r) => td.extend_from_slice(&self.td[l..=r]),
                Piece::Rev(l, r) => td.extend(self.td[l..=r].iter().rev()),
                Piece::Node(x) => td.push(x),
            }
        }
        let mut ds: Vec<DroneDelivery> = Vec::with_capacity(self.sorties.len() + e.added.len());
        for (idx, s) in self.sorties.iter().enumerate() {
            if e.removed.contains(&idx) {
                continue;
            }
            ds.push(if self.reoriented(e, idx) {
                DroneDelivery::new(s.d.rendezvous, s.d.customer, s.d.launch)
            } else {
                s.d
            });
        }
        ds.extend_from_slice(&e.added);
        self.rebuild(td, &ds);
    }
}
