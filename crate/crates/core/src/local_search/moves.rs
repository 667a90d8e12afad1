//! Candidate generation for the sixteen neighborhoods.

use smallvec::{smallvec, SmallVec};

use super::neighbors::GranularNeighbors;
use super::route::{Edit, Piece, Route, NONE};
use crate::model::{DroneDelivery, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    /// Relocate a truck-only customer after another truck node.
    N1,
    /// Relocate two consecutive truck-only customers, order kept.
    N2,
    /// Relocate two consecutive truck-only customers, order reversed.
    N3,
    /// Swap two truck customers.
    N4,
    /// Swap a pair of consecutive truck customers with one truck customer.
    N5,
    /// Swap two pairs of consecutive truck customers.
    N6,
    /// 2-opt reversing the tour after the first node up to the second.
    N7,
    /// 2-opt reversing the tour from the first node up to before the second.
    N8,
    /// Swap a drone customer with a truck customer outside its span.
    N9,
    /// Swap a delivery's launch node with its drone customer.
    N10,
    /// Swap a delivery's rendezvous node with its drone customer.
    N11,
    /// Swap a delivery's launch and rendezvous nodes.
    N12,
    /// Serve a truck-only customer by drone.
    N13,
    /// Put a drone customer back on the truck.
    N14,
    /// Exchange the customers of two deliveries.
    N15,
    /// Move a delivery to another launch/rendezvous pair.
    N16,
}

impl MoveKind {
    pub const ALL: [MoveKind; 16] = [
        MoveKind::N1,
        MoveKind::N2,
        MoveKind::N3,
        MoveKind::N4,
        MoveKind::N5,
        MoveKind::N6,
        MoveKind::N7,
        MoveKind::N8,
        MoveKind::N9,
        MoveKind::N10,
        MoveKind::N11,
        MoveKind::N12,
        MoveKind::N13,
        MoveKind::N14,
        MoveKind::N15,
        MoveKind::N16,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct Move {
    pub kind: MoveKind,
    pub edit: Edit,
}

/// Pieces for a tour where the given positions hold new nodes.
fn with_slots(r: &Route, slots: &mut [(usize, NodeId)]) -> SmallVec<[Piece; 6]> {
    slots.sort_unstable();
    let mut out = SmallVec::new();
    let mut next = 0;
    for &(p, v) in slots.iter() {
        if p > next {
            out.push(Piece::Fwd(next, p - 1));
        }
        out.push(Piece::Node(v));
        next = p + 1;
    }
    if next < r.len() {
        out.push(Piece::Fwd(next, r.len() - 1));
    }
    out
}

/// Renames delivery endpoints at the positions of the renamed nodes, adding
/// the renamed copies to the edit (deliveries already removed are skipped).
fn rename(r: &Route, e: &mut Edit, map: &[(NodeId, NodeId)]) {
    let sub = |v: NodeId| map.iter().find(|&&(a, _)| a == v).map_or(v, |&(_, b)| b);
    for &(old, _) in map {
        let p = r.pos[old];
        for idx in [r.launch_at[p], r.rdv_at[p]] {
            if idx != NONE && !e.removed.contains(&idx) {
                let d = r.sorties[idx].d;
                e.removed.push(idx);
                e.added.push(DroneDelivery::new(sub(d.launch), d.customer, sub(d.rendezvous)));
            }
        }
    }
}

fn push_fwd(out: &mut SmallVec<[Piece; 6]>, l: usize, r: usize) {
    if l <= r {
        out.push(Piece::Fwd(l, r));
    }
}

/// Moves the block `p1..=p2` right after position `q`.
fn relocate_block(r: &Route, p1: usize, p2: usize, q: usize, reversed: bool) -> Edit {
    let last = r.len() - 1;
    let block = if reversed { Piece::Rev(p1, p2) } else { Piece::Fwd(p1, p2) };
    let mut pieces = SmallVec::new();
    if q < p1 {
        push_fwd(&mut pieces, 0, q);
        pieces.push(block);
        push_fwd(&mut pieces, q + 1, p1 - 1);
        push_fwd(&mut pieces, p2 + 1, last);
    } else {
        push_fwd(&mut pieces, 0, p1 - 1);
        push_fwd(&mut pieces, p2 + 1, q);
        pieces.push(block);
        push_fwd(&mut pieces, q + 1, last);
    }
    Edit {
        pieces,
        ..Edit::default()
    }
}

fn whole(r: &Route) -> SmallVec<[Piece; 6]> {
    smallvec![Piece::Fwd(0, r.len() - 1)]
}

/// Whether the span `pi..pk` is free for delivery `own` (or a new one when
/// `own` is `NONE`) apart from chaining at its endpoints.
fn span_is_free(r: &Route, pi: usize, pk: usize, own: usize) -> bool {
    if pi >= pk {
        return false;
    }
    let ok = |idx: usize| idx == NONE || idx == own;
    if !ok(r.launch_at[pi]) || !ok(r.rdv_at[pk]) || !ok(r.cover[pi]) {
        return false;
    }
    let mut inside = r.events_between(pi, pk);
    if own != NONE {
        let s = r.sorties[own];
        inside -= (s.pi > pi && s.pi < pk) as u32 + (s.pk > pi && s.pk < pk) as u32;
    }
    inside == 0
}

pub(crate) fn is_customer(r: &Route, v: NodeId) -> bool {
    v >= 1 && v <= r.inst.n()
}

/// Candidate moves of `kind` anchored at customer `u`.
pub fn moves_for(r: &Route, nb: &GranularNeighbors, kind: MoveKind, u: NodeId, out: &mut Vec<Move>) {
    let inst = r.inst;
    let end = inst.end_depot();
    let mut emit = |edit: Edit| out.push(Move { kind, edit });
    let pu = r.pos[u];
    let near = nb.of(u);
    match kind {
        MoveKind::N1 => {
            if pu == NONE || r.has_events(pu) {
                return;
            }
            for &v in std::iter::once(&0).chain(near) {
                let q = r.pos[v];
                if q == NONE || v == u || q == pu - 1 || v == end {
                    continue;
                }
                emit(relocate_block(r, pu, pu, q, false));
            }
        }
        MoveKind::N2 | MoveKind::N3 => {
            if pu == NONE || r.has_events(pu) {
                return;
            }
            let x = r.td[pu + 1];
            if !is_customer(r, x) || r.has_events(pu + 1) {
                return;
            }
            let reversed = kind == MoveKind::N3;
            for &v in std::iter::once(&0).chain(near) {
                let q = r.pos[v];
                if q == NONE || v == u || v == x || v == end || (q == pu - 1 && !reversed) {
                    continue;
                }
                if q == pu - 1 {
                    emit(Edit {
                        pieces: {
                            let mut p = SmallVec::new();
                            push_fwd(&mut p, 0, q);
                            p.push(Piece::Rev(pu, pu + 1));
                            push_fwd(&mut p, pu + 2, r.len() - 1);
                            p
                        },
                        ..Edit::default()
                    });
                } else {
                    emit(relocate_block(r, pu, pu + 1, q, reversed));
                }
            }
        }
        MoveKind::N4 => {
            if pu == NONE {
                return;
            }
            for &v in near {
                let pv = r.pos[v];
                if pv == NONE || v <= u && nb.contains(v, u) {
                    continue;
                }
                let mut e = Edit {
                    pieces: with_slots(r, &mut [(pu, v), (pv, u)]),
                    ..Edit::default()
                };
                rename(r, &mut e, &[(u, v), (v, u)]);
                emit(e);
            }
        }
        MoveKind::N5 => {
            if pu == NONE {
                return;
            }
            let u2 = r.td[pu + 1];
            if !is_customer(r, u2) || r.has_events(pu + 1) {
                return;
            }
            let last = r.len() - 1;
            for &v in near {
                let pv = r.pos[v];
                if pv == NONE || v == u2 {
                    continue;
                }
                let mut pieces = SmallVec::new();
                if pv > pu {
                    push_fwd(&mut pieces, 0, pu - 1);
                    pieces.push(Piece::Node(v));
                    push_fwd(&mut pieces, pu + 2, pv - 1);
                    pieces.push(Piece::Node(u));
                    pieces.push(Piece::Node(u2));
                    push_fwd(&mut pieces, pv + 1, last);
                } else {
                    push_fwd(&mut pieces, 0, pv - 1);
                    pieces.push(Piece::Node(u));
                    pieces.push(Piece::Node(u2));
                    push_fwd(&mut pieces, pv + 1, pu - 1);
                    pieces.push(Piece::Node(v));
                    push_fwd(&mut pieces, pu + 2, last);
                }
                let mut e = Edit {
                    pieces,
                    ..Edit::default()
                };
                rename(r, &mut e, &[(u, v), (v, u)]);
                emit(e);
            }
        }
        MoveKind::N6 => {
            if pu == NONE {
                return;
            }
            let u2 = r.td[pu + 1];
            if !is_customer(r, u2) {
                return;
            }
            for &v in near {
                let pv = r.pos[v];
                if pv == NONE || (v <= u && nb.contains(v, u)) {
                    continue;
                }
                let v2 = r.td[pv + 1];
                if !is_customer(r, v2) || v == u2 || v2 == u {
                    continue;
                }
                let mut e = Edit {
                    pieces: with_slots(r, &mut [(pu, v), (pu + 1, v2), (pv, u), (pv + 1, u2)]),
                    ..Edit::default()
                };
                rename(r, &mut e, &[(u, v), (u2, v2), (v, u), (v2, u2)]);
                emit(e);
            }
        }
        MoveKind::N7 | MoveKind::N8 => {
            if pu == NONE {
                return;
            }
            for &v in near {
                let pv = r.pos[v];
                if pv == NONE {
                    continue;
                }
                let (a, b) = if pu < pv { (pu, pv) } else { (pv, pu) };
                if b < a + 2 {
                    continue;
                }
                let (l, rr) = if kind == MoveKind::N7 { (a + 1, b) } else { (a, b - 1) };
                // Deliveries crossing a boundary of the reversed range.
                let straddles = [r.cover[l - 1], r.cover[rr]].into_iter().any(|idx| {
                    idx != NONE && {
                        let s = r.sorties[idx];
                        !(s.pi < l && s.pk > rr)
                    }
                });
                if straddles {
                    continue;
                }
                let mut pieces = SmallVec::new();
                push_fwd(&mut pieces, 0, l - 1);
                pieces.push(Piece::Rev(l, rr));
                push_fwd(&mut pieces, rr + 1, r.len() - 1);
                emit(Edit {
                    pieces,
                    ..Edit::default()
                });
            }
        }
        MoveKind::N9 => {
            if pu == NONE || !inst.is_drone_eligible(u) {
                return;
            }
            for &j in near {
                let idx = r.drone_of[j];
                if idx == NONE {
                    continue;
                }
                let s = r.sorties[idx];
                if pu >= s.pi && pu <= s.pk {
                    continue;
                }
                let mut e = Edit {
                    pieces: with_slots(r, &mut [(pu, j)]),
                    removed: smallvec![idx],
                    added: smallvec![DroneDelivery::new(s.d.launch, u, s.d.rendezvous)],
                };
                rename(r, &mut e, &[(u, j)]);
                emit(e);
            }
        }
        MoveKind::N10 | MoveKind::N11 | MoveKind::N12 => {
            let idx = r.drone_of[u];
            if idx == NONE {
                return;
            }
            let s = r.sorties[idx];
            let (i, j, k) = (s.d.launch, s.d.customer, s.d.rendezvous);
            let mut e = Edit {
                removed: smallvec![idx],
                ..Edit::default()
            };
            match kind {
                MoveKind::N10 => {
                    if !is_customer(r, i) || !inst.is_drone_eligible(i) {
                        return;
                    }
                    e.pieces = with_slots(r, &mut [(s.pi, j)]);
                    e.added.push(DroneDelivery::new(j, i, k));
                    rename(r, &mut e, &[(i, j)]);
                }
                MoveKind::N11 => {
                    if !is_customer(r, k) || !inst.is_drone_eligible(k) {
                        return;
                    }
                    e.pieces = with_slots(r, &mut [(s.pk, j)]);
                    e.added.push(DroneDelivery::new(i, k, j));
                    rename(r, &mut e, &[(k, j)]);
                }
                _ => {
                    if !is_customer(r, i) || !is_customer(r, k) {
                        return;
                    }
                    e.pieces = with_slots(r, &mut [(s.pi, k), (s.pk, i)]);
                    e.added.push(DroneDelivery::new(k, j, i));
                    rename(r, &mut e, &[(i, k), (k, i)]);
                }
            }
            emit(e);
        }
        MoveKind::N13 => {
            if pu == NONE || r.has_events(pu) || !inst.is_drone_eligible(u) {
                return;
            }
            let launches = [r.td[pu - 1], 0];
            let rdvs = [r.td[pu + 1], end];
            let mut seen: SmallVec<[(usize, usize); 32]> = SmallVec::new();
            for &i in launches.iter().chain(near) {
                let pi = r.pos[i];
                if pi == NONE || i == u || i == end {
                    continue;
                }
                for &k in rdvs.iter().chain(near) {
                    let pk = r.pos[k];
                    if pk == NONE || k == u || k == 0 || (i == 0 && k == end) {
                        continue;
                    }
                    if seen.contains(&(pi, pk)) || !span_is_free(r, pi, pk, NONE) {
                        continue;
                    }
                    seen.push((pi, pk));
                    let mut pieces = SmallVec::new();
                    push_fwd(&mut pieces, 0, pu - 1);
                    push_fwd(&mut pieces, pu + 1, r.len() - 1);
                    emit(Edit {
                        pieces,
                        removed: SmallVec::new(),
                        added: smallvec![DroneDelivery::new(i, u, k)],
                    });
                }
            }
        }
        MoveKind::N14 => {
            let idx = r.drone_of[u];
            if idx == NONE {
                return;
            }
            let s = r.sorties[idx];
            let mut spots: SmallVec<[usize; 16]> = SmallVec::new();
            let mut consider = |p: usize| {
                if p != NONE && p + 1 < r.len() && !spots.contains(&p) {
                    spots.push(p);
                }
            };
            consider(0);
            consider(s.pi);
            for &w in near {
                let pw = r.pos[w];
                if pw != NONE {
                    consider(pw);
                    consider(pw - 1);
                }
            }
            for &q in &spots {
                let mut pieces = SmallVec::new();
                push_fwd(&mut pieces, 0, q);
                pieces.push(Piece::Node(u));
                push_fwd(&mut pieces, q + 1, r.len() - 1);
                emit(Edit {
                    pieces,
                    removed: smallvec![idx],
                    added: SmallVec::new(),
                });
            }
        }
        MoveKind::N15 => {
            let a = r.drone_of[u];
            if a == NONE {
                return;
            }
            for b in 0..r.sorties.len() {
                if b == a {
                    continue;
                }
                let (da, db) = (r.sorties[a].d, r.sorties[b].d);
                emit(Edit {
                    pieces: whole(r),
                    removed: smallvec![a, b],
                    added: smallvec![
                        DroneDelivery::new(da.launch, db.customer, da.rendezvous),
                        DroneDelivery::new(db.launch, da.customer, db.rendezvous)
                    ],
                });
            }
        }
        MoveKind::N16 => {
            let idx = r.drone_of[u];
            if idx == NONE {
                return;
            }
            let s = r.sorties[idx];
            let launches = [s.d.launch, 0];
            let rdvs = [s.d.rendezvous, end];
            let mut seen: SmallVec<[(usize, usize); 32]> = SmallVec::new();
            for &i in launches.iter().chain(near) {
                let pi = r.pos[i];
                if pi == NONE || i == end {
                    continue;
                }
                for &k in rdvs.iter().chain(near) {
                    let pk = r.pos[k];
                    if pk == NONE || k == 0 || (i == 0 && k == end) || (pi, pk) == (s.pi, s.pk) {
                        continue;
                    }
                    if seen.contains(&(pi, pk)) || !span_is_free(r, pi, pk, idx) {
                        continue;
                    }
                    seen.push((pi, pk));
                    emit(Edit {
                        pieces: whole(r),
                        removed: smallvec![idx],
                        added: smallvec![DroneDelivery::new(i, u, k)],
                    });
                }
            }
        }
    }
}

/// Every candidate of every neighborhood for every customer.
pub fn all_moves(r: &Route, nb: &GranularNeighbors) -> Vec<Move> {
    let mut out = Vec::new();
    for kind in MoveKind::ALL {
        for u in 1..=r.inst.n() {
            moves_for(r, nb, kind, u, &mut out);
        }
    }
    out
}
