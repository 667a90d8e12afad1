//! Education: first-improvement descent over sixteen neighborhoods,
//! restricted to granular candidate lists.

mod moves;
mod neighbors;
mod route;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use moves::{all_moves, moves_for, Move, MoveKind};
pub use neighbors::{build_granular_neighbors, GranularNeighbors};
pub use route::{Edit, Piece, Route};

use crate::evaluation::PenaltyConfig;
use crate::model::{Instance, Objective, TspDSolution};

/// Smallest accepted improvement.
pub const IMPROVEMENT: f64 = 1e-9;

/// Descends from `sol` until no candidate move improves φ.
pub fn educate(
    sol: &TspDSolution,
    inst: &Instance,
    cfg: &PenaltyConfig,
    obj: Objective,
    neighbors: &GranularNeighbors,
    rng_seed: u64,
) -> TspDSolution {
    let mut route = Route::new(sol, inst, obj, *cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    descend(&mut route, neighbors, &mut rng);
    route.solution()
}

/// In-place descent on a route; returns the number of applied moves.
pub fn descend<R: Rng>(route: &mut Route, neighbors: &GranularNeighbors, rng: &mut R) -> usize {
    let n = route.instance().n();
    let mut customers: Vec<usize> = (1..=n).collect();
    let mut kinds = MoveKind::ALL;
    let mut buf = Vec::new();
    let mut applied = 0;
    loop {
        let mut improved = false;
        customers.shuffle(rng);
        for &u in &customers {
            kinds.shuffle(rng);
            for &kind in &kinds {
                buf.clear();
                moves_for(route, neighbors, kind, u, &mut buf);
                let found = buf
                    .iter()
                    .find(|m| route.delta(&m.edit).is_some_and(|d| d < -IMPROVEMENT));
                if let Some(m) = found {
                    let edit = m.edit.clone();
                    route.apply(&edit);
                    applied += 1;
                    improved = true;
                }
            }
        }
        if !improved {
            return applied;
        }
    }
}

/// Change in φ from applying `mv` to `sol`, or `None` when inapplicable.
pub fn evaluate_move(mv: &Move, sol: &TspDSolution, inst: &Instance, cfg: &PenaltyConfig, obj: Objective) -> Option<f64> {
    Route::new(sol, inst, obj, *cfg).delta(&mv.edit)
}

pub fn apply_move(mv: &Move, sol: &TspDSolution, inst: &Instance, cfg: &PenaltyConfig, obj: Objective) -> TspDSolution {
    let mut r = Route::new(sol, inst, obj, *cfg);
    r.apply(&mv.edit);
    r.solution()
}
