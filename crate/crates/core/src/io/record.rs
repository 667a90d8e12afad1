//! Printed solutions.
//!
//! The human block:
//!
//! ```text
//! instance   gen-n5-s1
//! objective  cost
//! truck      0 3 1 4 6
//! drone      <3,2,1> <1,5,4>
//! value      123.25
//! cost       123.25
//! completion 61.5
//! feasible   yes
//! ```
//!
//! The one-line record is a space-separated list of `key=value` fields:
//!
//! ```text
//! tspd-solution/1 instance=gen-n5-s1 objective=cost value=123.25 cost=123.25 completion=61.5 feasible=1 truck=0,3,1,4,6 drone=3:2:1;1:5:4
//! ```
//!
//! It depends only on the solution and the instance, so identical runs
//! print identical records.

use std::fmt::Write as _;

use crate::evaluation::Evaluation;
use crate::model::{Instance, Objective, TspDSolution};

const RECORD_TAG: &str = "tspd-solution/1";

fn joined(items: impl Iterator<Item = String>, sep: &str) -> String {
    items.collect::<Vec<_>>().join(sep)
}

pub fn format_solution(sol: &TspDSolution, inst: &Instance, obj: Objective) -> String {
    let ev = Evaluation::new(sol, inst);
    let mut out = String::new();
    let _ = writeln!(out, "instance   {}", inst.name());
    let _ = writeln!(out, "objective  {obj}");
    let _ = writeln!(out, "truck      {}", joined(sol.truck_tour.iter().map(|v| v.to_string()), " "));
    let drone = joined(
        sol.deliveries_in_tour_order()
            .iter()
            .map(|d| format!("<{},{},{}>", d.launch, d.customer, d.rendezvous)),
        " ",
    );
    let _ = writeln!(out, "drone      {}", if drone.is_empty() { "-" } else { &drone });
    let _ = writeln!(out, "value      {}", ev.objective(obj));
    let _ = writeln!(out, "cost       {}", ev.cost);
    let _ = writeln!(out, "completion {}", ev.completion);
    let _ = writeln!(out, "feasible   {}", if ev.is_feasible() { "yes" } else { "no" });
    out
}

pub fn solution_record(sol: &TspDSolution, inst: &Instance, obj: Objective) -> String {
    let ev = Evaluation::new(sol, inst);
    let truck = joined(sol.truck_tour.iter().map(|v| v.to_string()), ",");
    let drone = joined(
        sol.deliveries_in_tour_order()
            .iter()
            .map(|d| format!("{}:{}:{}", d.launch, d.customer, d.rendezvous)),
        ";",
    );
    format!(
        "{RECORD_TAG} instance={} objective={obj} value={:?} cost={:?} completion={:?} feasible={} truck={truck} drone={}",
        inst.name(),
        ev.objective(obj),
        ev.cost,
        ev.completion,
        u8::from(ev.is_feasible()),
        if drone.is_empty() { "-" } else { &drone },
    )
}
