//! Instances, chromosomes and truck/drone solutions.
//!
//! Nodes are indexed `0..=n+1`: node `0` is the depot, `1..=n` are the
//! customers and `n+1` is a copy of the depot used as the end of the truck
//! tour. All four travel matrices are stored in full so asymmetric truck
//! networks can be represented.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a node in `0..=n+1`.
pub type NodeId = usize;

/// 40 km/h expressed in km per minute.
pub const DEFAULT_SPEED: f64 = 40.0 / 60.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("instance must contain at least one customer")]
    NoCustomers,
    #[error("{what} has {got} entries, expected {expected}")]
    Dimension {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("{matrix}[{from}][{to}] = {value} is not a finite nonnegative number")]
    BadEntry {
        matrix: &'static str,
        from: usize,
        to: usize,
        value: f64,
    },
    #[error("{matrix}[{node}][{node}] must be zero")]
    NonZeroDiagonal { matrix: &'static str, node: usize },
    #[error("depot {0} cannot be drone eligible")]
    EligibleDepot(usize),
    #[error("parameter {name} = {value} is out of range")]
    Parameter { name: &'static str, value: f64 },
    #[error("giant tour is not a permutation of 1..={n}")]
    NotAPermutation { n: usize },
}

/// Which waiting time each fee is billed against.
///
/// `AsWritten` charges the truck fee on `max(0, truck span - drone flight)`
/// (the drone is the one waiting) and the drone fee on the opposite
/// difference. `AsNamed` charges each vehicle's fee on its own waiting time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WaitFeeConvention {
    #[default]
    AsWritten,
    AsNamed,
}

impl fmt::Display for WaitFeeConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaitFeeConvention::AsWritten => "as_written",
            WaitFeeConvention::AsNamed => "as_named",
        })
    }
}

/// Scalar parameters shared by every node of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Drone endurance, minutes.
    pub endurance: f64,
    /// Launch preparation time, minutes.
    pub launch_time: f64,
    /// Retrieval time, minutes.
    pub retrieve_time: f64,
    /// Truck cost per distance unit.
    pub truck_cost: f64,
    /// Drone cost per distance unit.
    pub drone_cost: f64,
    /// Truck waiting fee per minute.
    pub truck_wait_fee: f64,
    /// Drone waiting fee per minute.
    pub drone_wait_fee: f64,
    /// Distance units per minute.
    pub truck_speed: f64,
    /// Distance units per minute.
    pub drone_speed: f64,
    pub wait_fees: WaitFeeConvention,
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            endurance: 20.0,
            launch_time: 1.0,
            retrieve_time: 1.0,
            truck_cost: 25.0,
            drone_cost: 1.0,
            truck_wait_fee: 1.0,
            drone_wait_fee: 1.0,
            truck_speed: DEFAULT_SPEED,
            drone_speed: DEFAULT_SPEED,
            wait_fees: WaitFeeConvention::AsWritten,
        }
    }
}

impl Parameters {
    fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("endurance", self.endurance),
            ("truck_speed", self.truck_speed),
            ("drone_speed", self.drone_speed),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::Parameter { name, value });
            }
        }
        let nonneg = [
            ("launch_time", self.launch_time),
            ("retrieve_time", self.retrieve_time),
            ("truck_cost", self.truck_cost),
            ("drone_cost", self.drone_cost),
            ("truck_wait_fee", self.truck_wait_fee),
            ("drone_wait_fee", self.drone_wait_fee),
        ];
        for (name, value) in nonneg {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ModelError::Parameter { name, value });
            }
        }
        Ok(())
    }
}

/// Dense square matrix over the `n+2` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(ModelError::Dimension {
                    what: "matrix row",
                    got: row.len(),
                    expected: dim,
                });
            }
            data.extend(row);
        }
        Ok(Matrix { dim, data })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn check(&self, name: &'static str) -> Result<(), ModelError> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let value = self.get(i, j);
                if !(value.is_finite() && value >= 0.0) {
                    return Err(ModelError::BadEntry {
                        matrix: name,
                        from: i,
                        to: j,
                        value,
                    });
                }
            }
            if self.get(i, i) != 0.0 {
                return Err(ModelError::NonZeroDiagonal { matrix: name, node: i });
            }
        }
        Ok(())
    }
}

/// The four travel matrices of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrices {
    pub truck_dist: Matrix,
    pub truck_time: Matrix,
    pub drone_dist: Matrix,
    pub drone_time: Matrix,
}

/// A TSP-D instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    n: usize,
    coords: Vec<(f64, f64)>,
    matrices: Matrices,
    eligible: Vec<bool>,
    params: Parameters,
}

impl Instance {
    /// Builds an instance from explicit matrices over nodes `0..=n+1`.
    ///
    /// `coords` and `eligible` are indexed by node and have `n+2` entries.
    pub fn new(
        name: impl Into<String>,
        coords: Vec<(f64, f64)>,
        matrices: Matrices,
        eligible: Vec<bool>,
        params: Parameters,
    ) -> Result<Self, ModelError> {
        let dim = coords.len();
        if dim < 3 {
            return Err(ModelError::NoCustomers);
        }
        let n = dim - 2;
        for (what, got) in [
            ("eligibility flags", eligible.len()),
            ("truck distance matrix", matrices.truck_dist.dim()),
            ("truck time matrix", matrices.truck_time.dim()),
            ("drone distance matrix", matrices.drone_dist.dim()),
            ("drone time matrix", matrices.drone_time.dim()),
        ] {
            if got != dim {
                return Err(ModelError::Dimension {
                    what,
                    got,
                    expected: dim,
                });
            }
        }
        matrices.truck_dist.check("truck_dist")?;
        matrices.truck_time.check("truck_time")?;
        matrices.drone_dist.check("drone_dist")?;
        matrices.drone_time.check("drone_time")?;
        if eligible[0] {
            return Err(ModelError::EligibleDepot(0));
        }
        if eligible[n + 1] {
            return Err(ModelError::EligibleDepot(n + 1));
        }
        params.validate()?;
        Ok(Instance {
            name: name.into(),
            n,
            coords,
            matrices,
            eligible,
            params,
        })
    }

    /// Builds an instance with Euclidean distances for both vehicles and
    /// times derived from the vehicle speeds.
    ///
    /// `points[0]` is the depot and `points[1..=n]` the customers; the end
    /// depot is appended automatically. `eligible` lists the customer flags
    /// in the same order as `points[1..]`.
    pub fn euclidean(
        name: impl Into<String>,
        points: &[(f64, f64)],
        eligible_customers: &[bool],
        params: Parameters,
    ) -> Result<Self, ModelError> {
        if points.len() < 2 {
            return Err(ModelError::NoCustomers);
        }
        let n = points.len() - 1;
        if eligible_customers.len() != n {
            return Err(ModelError::Dimension {
                what: "eligibility flags",
                got: eligible_customers.len(),
                expected: n,
            });
        }
        let mut coords = points.to_vec();
        coords.push(points[0]);
        let dist = Matrix::from_fn(n + 2, |i, j| {
            let (dx, dy) = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
            if i == j {
                0.0
            } else {
                (dx * dx + dy * dy).sqrt()
            }
        });
        let truck_time = Matrix::from_fn(n + 2, |i, j| dist.get(i, j) / params.truck_speed);
        let drone_time = Matrix::from_fn(n + 2, |i, j| dist.get(i, j) / params.drone_speed);
        let mut eligible = vec![false; n + 2];
        eligible[1..=n].copy_from_slice(eligible_customers);
        Instance::new(
            name,
            coords,
            Matrices {
                truck_dist: dist.clone(),
                truck_time,
                drone_dist: dist,
                drone_time,
            },
            eligible,
            params,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of customers.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Index of the end depot, `n+1`.
    #[inline]
    pub fn end_depot(&self) -> NodeId {
        self.n + 1
    }

    #[inline]
    pub fn is_customer(&self, node: NodeId) -> bool {
        node >= 1 && node <= self.n
    }

    #[inline]
    pub fn truck_dist(&self, i: NodeId, j: NodeId) -> f64 {
        self.matrices.truck_dist.get(i, j)
    }

    #[inline]
    pub fn truck_time(&self, i: NodeId, j: NodeId) -> f64 {
        self.matrices.truck_time.get(i, j)
    }

    #[inline]
    pub fn drone_dist(&self, i: NodeId, j: NodeId) -> f64 {
        self.matrices.drone_dist.get(i, j)
    }

    #[inline]
    pub fn drone_time(&self, i: NodeId, j: NodeId) -> f64 {
        self.matrices.drone_time.get(i, j)
    }

    #[inline]
    pub fn is_drone_eligible(&self, node: NodeId) -> bool {
        self.eligible[node]
    }

    pub fn drone_eligible(&self) -> impl Iterator<Item = NodeId> + '_ {
        (1..=self.n).filter(|&c| self.eligible[c])
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn matrices(&self) -> &Matrices {
        &self.matrices
    }

    /// A copy of this instance with different scalar parameters.
    pub fn with_params(&self, params: Parameters) -> Result<Self, ModelError> {
        params.validate()?;
        Ok(Instance {
            params,
            ..self.clone()
        })
    }

    /// A copy of this instance with a different endurance.
    pub fn with_endurance(&self, endurance: f64) -> Result<Self, ModelError> {
        self.with_params(Parameters {
            endurance,
            ..self.params
        })
    }

    /// True when `⟨i, j, k⟩` belongs to the set of possible drone
    /// deliveries: distinct nodes, eligible `j`, and a flight within the
    /// endurance.
    pub fn is_possible_delivery(&self, i: NodeId, j: NodeId, k: NodeId) -> bool {
        i != j
            && j != k
            && i != k
            && self.eligible[j]
            && self.drone_time(i, j) + self.drone_time(j, k) <= self.params.endurance
    }
}

/// Which of the two objectives is being minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    MinCost,
    MinTime,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::MinCost => "cost",
            Objective::MinTime => "time",
        })
    }
}

/// A chromosome: the customers `1..=n` in visiting order, depots removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GiantTour(Vec<NodeId>);

impl GiantTour {
    pub fn new(seq: Vec<NodeId>, n: usize) -> Result<Self, ModelError> {
        if !is_permutation(&seq, n) {
            return Err(ModelError::NotAPermutation { n });
        }
        Ok(GiantTour(seq))
    }

    /// Wraps a sequence that is already known to be a permutation.
    pub(crate) fn from_vec_unchecked(seq: Vec<NodeId>) -> Self {
        GiantTour(seq)
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<NodeId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// True when `seq` holds each of `1..=n` exactly once.
pub fn is_permutation(seq: &[NodeId], n: usize) -> bool {
    if seq.len() != n {
        return false;
    }
    let mut seen = vec![false; n + 1];
    for &c in seq {
        if c == 0 || c > n || seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

/// A drone sortie `⟨launch, customer, rendezvous⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DroneDelivery {
    pub launch: NodeId,
    pub customer: NodeId,
    pub rendezvous: NodeId,
}

impl DroneDelivery {
    pub fn new(launch: NodeId, customer: NodeId, rendezvous: NodeId) -> Self {
        DroneDelivery {
            launch,
            customer,
            rendezvous,
        }
    }
}

impl fmt::Display for DroneDelivery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{},{}>", self.launch, self.customer, self.rendezvous)
    }
}

/// A truck tour from `0` to `n+1` plus the drone sorties.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TspDSolution {
    pub truck_tour: Vec<NodeId>,
    pub drone_deliveries: Vec<DroneDelivery>,
}

impl TspDSolution {
    pub fn new(truck_tour: Vec<NodeId>, drone_deliveries: Vec<DroneDelivery>) -> Self {
        TspDSolution {
            truck_tour,
            drone_deliveries,
        }
    }

    /// Truck-only solution visiting `seq` in order.
    pub fn truck_only(seq: &[NodeId], n: usize) -> Self {
        let mut truck_tour = Vec::with_capacity(seq.len() + 2);
        truck_tour.push(0);
        truck_tour.extend_from_slice(seq);
        truck_tour.push(n + 1);
        TspDSolution {
            truck_tour,
            drone_deliveries: Vec::new(),
        }
    }

    /// Deliveries sorted by the position of their launch node in the tour.
    pub fn deliveries_in_tour_order(&self) -> Vec<DroneDelivery> {
        let mut pos = vec![usize::MAX; self.truck_tour.iter().max().map_or(0, |m| m + 1)];
        for (p, &v) in self.truck_tour.iter().enumerate() {
            pos[v] = p;
        }
        let mut dd = self.drone_deliveries.clone();
        dd.sort_by_key(|d| pos.get(d.launch).copied().unwrap_or(usize::MAX));
        dd
    }

    /// Same solution with deliveries sorted by launch position, for
    /// comparisons that should not depend on list order.
    pub fn canonical(&self) -> Self {
        TspDSolution {
            truck_tour: self.truck_tour.clone(),
            drone_deliveries: self.deliveries_in_tour_order(),
        }
    }
}

/// A broken structural rule found by [`validate_solution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    TourStart { found: Option<NodeId> },
    TourEnd { found: Option<NodeId> },
    NodeOutOfRange { node: NodeId },
    DepotInsideTour { position: usize },
    DuplicateCustomer { node: NodeId },
    MissingCustomer { node: NodeId },
    DroneNodeInTour { delivery: usize, node: NodeId },
    NotDroneEligible { delivery: usize, node: NodeId },
    RepeatedNode { delivery: usize },
    EndpointNotInTour { delivery: usize, node: NodeId },
    LaunchNotBeforeRendezvous { delivery: usize },
    DepotToDepot { delivery: usize },
    Interleaved { first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TourStart { found } => write!(f, "truck tour must start at depot 0, found {found:?}"),
            Violation::TourEnd { found } => write!(f, "truck tour must end at depot n+1, found {found:?}"),
            Violation::NodeOutOfRange { node } => write!(f, "node {node} out of range"),
            Violation::DepotInsideTour { position } => {
                write!(f, "depot appears inside the truck tour at position {position}")
            }
            Violation::DuplicateCustomer { node } => write!(f, "customer {node} served more than once"),
            Violation::MissingCustomer { node } => write!(f, "customer {node} never served"),
            Violation::DroneNodeInTour { delivery, node } => {
                write!(f, "delivery {delivery}: drone node {node} is also on the truck tour")
            }
            Violation::NotDroneEligible { delivery, node } => {
                write!(f, "delivery {delivery}: customer {node} is not drone eligible")
            }
            Violation::RepeatedNode { delivery } => {
                write!(f, "delivery {delivery}: launch, drone node and rendezvous must differ")
            }
            Violation::EndpointNotInTour { delivery, node } => {
                write!(f, "delivery {delivery}: node {node} is not on the truck tour")
            }
            Violation::LaunchNotBeforeRendezvous { delivery } => {
                write!(f, "delivery {delivery}: launch is not before rendezvous")
            }
            Violation::DepotToDepot { delivery } => {
                write!(f, "delivery {delivery}: launch and rendezvous are both the depot")
            }
            Violation::Interleaved { first, second } => {
                write!(f, "interleaved deliveries {first} and {second}")
            }
        }
    }
}

/// Checks every structural rule of a solution. Endurance is not checked.
///
/// Deliveries may be chained (one rendezvous is the next launch) but spans
/// may not otherwise overlap, and a sortie may not go from the depot back
/// to its duplicate since both are the same location.
pub fn validate_solution(sol: &TspDSolution, inst: &Instance) -> Vec<Violation> {
    let n = inst.n();
    let end = n + 1;
    let td = &sol.truck_tour;
    let mut out = Vec::new();

    if td.first() != Some(&0) {
        out.push(Violation::TourStart {
            found: td.first().copied(),
        });
    }
    if td.last() != Some(&end) || td.len() < 2 {
        out.push(Violation::TourEnd {
            found: td.last().copied(),
        });
    }

    let mut pos = vec![usize::MAX; end + 1];
    let mut served = vec![0u32; end + 1];
    for (p, &v) in td.iter().enumerate() {
        if v > end {
            out.push(Violation::NodeOutOfRange { node: v });
            continue;
        }
        let boundary = (p == 0 && v == 0) || (p == td.len() - 1 && v == end);
        if (v == 0 || v == end) && !boundary {
            out.push(Violation::DepotInsideTour { position: p });
            continue;
        }
        if pos[v] == usize::MAX {
            pos[v] = p;
        }
        if inst.is_customer(v) {
            served[v] += 1;
        }
    }

    let mut spans = Vec::new();
    for (idx, d) in sol.drone_deliveries.iter().enumerate() {
        let nodes = [d.launch, d.customer, d.rendezvous];
        if let Some(&bad) = nodes.iter().find(|&&v| v > end) {
            out.push(Violation::NodeOutOfRange { node: bad });
            continue;
        }
        if d.launch == d.customer || d.customer == d.rendezvous || d.launch == d.rendezvous {
            out.push(Violation::RepeatedNode { delivery: idx });
        }
        if inst.is_customer(d.customer) {
            served[d.customer] += 1;
            if pos[d.customer] != usize::MAX {
                out.push(Violation::DroneNodeInTour {
                    delivery: idx,
                    node: d.customer,
                });
            }
        } else {
            out.push(Violation::NodeOutOfRange { node: d.customer });
        }
        if !inst.is_drone_eligible(d.customer) && inst.is_customer(d.customer) {
            out.push(Violation::NotDroneEligible {
                delivery: idx,
                node: d.customer,
            });
        }
        if d.launch == 0 && d.rendezvous == end {
            out.push(Violation::DepotToDepot { delivery: idx });
        }
        let (pi, pk) = (pos[d.launch], pos[d.rendezvous]);
        if pi == usize::MAX {
            out.push(Violation::EndpointNotInTour {
                delivery: idx,
                node: d.launch,
            });
        }
        if pk == usize::MAX {
            out.push(Violation::EndpointNotInTour {
                delivery: idx,
                node: d.rendezvous,
            });
        }
        if pi != usize::MAX && pk != usize::MAX {
            if pi >= pk {
                out.push(Violation::LaunchNotBeforeRendezvous { delivery: idx });
            } else {
                spans.push((pi, pk, idx));
            }
        }
    }

    for c in 1..=n {
        match served[c] {
            0 => out.push(Violation::MissingCustomer { node: c }),
            1 => {}
            _ => out.push(Violation::DuplicateCustomer { node: c }),
        }
    }

    // Sorted by launch, a span may only start at or after the furthest
    // rendezvous seen so far (chained sorties share that node).
    spans.sort_unstable();
    let mut reach: Option<(usize, usize)> = None;
    for &(pi, pk, idx) in &spans {
        match reach {
            Some((far, owner)) => {
                if pi < far {
                    out.push(Violation::Interleaved {
                        first: owner,
                        second: idx,
                    });
                }
                if pk > far {
                    reach = Some((pk, idx));
                }
            }
            None => reach = Some((pk, idx)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Instance {
        let pts: Vec<(f64, f64)> = (0..=n).map(|i| (i as f64, 0.0)).collect();
        Instance::euclidean("line", &pts, &vec![true; n], Parameters::default()).unwrap()
    }

    #[test]
    fn malformed_tour_reports_out_of_range_and_duplicate_depot() {
        // n = 2, so node 3 is the end depot and appears twice.
        let inst = line(2);
        let sol = TspDSolution::new(vec![0, 1, 2, 3, 3], vec![]);
        let v = validate_solution(&sol, &inst);
        assert!(v.contains(&Violation::DepotInsideTour { position: 3 }), "{v:?}");
        let sol = TspDSolution::new(vec![0, 1, 2, 4, 3], vec![]);
        let v = validate_solution(&sol, &inst);
        assert!(v.contains(&Violation::NodeOutOfRange { node: 4 }), "{v:?}");
    }

    #[test]
    fn canonical_single_delivery_is_valid() {
        let inst = line(3);
        let sol = TspDSolution::new(vec![0, 1, 3, 4], vec![DroneDelivery::new(1, 2, 3)]);
        assert_eq!(validate_solution(&sol, &inst), vec![]);
    }

    #[test]
    fn interleaved_deliveries_are_rejected() {
        let inst = line(5);
        let sol = TspDSolution::new(
            vec![0, 1, 2, 3, 6],
            vec![DroneDelivery::new(1, 4, 3), DroneDelivery::new(2, 5, 3)],
        );
        let v = validate_solution(&sol, &inst);
        assert!(v.iter().any(|x| matches!(x, Violation::Interleaved { .. })), "{v:?}");
    }

    #[test]
    fn chained_deliveries_share_a_node() {
        let inst = line(4);
        let sol = TspDSolution::new(
            vec![0, 1, 3, 5],
            vec![DroneDelivery::new(0, 2, 1), DroneDelivery::new(1, 4, 3)],
        );
        assert_eq!(validate_solution(&sol, &inst), vec![]);
    }

    #[test]
    fn depot_to_depot_sortie_is_rejected() {
        let inst = line(2);
        let sol = TspDSolution::new(vec![0, 1, 3], vec![DroneDelivery::new(0, 2, 3)]);
        assert_eq!(
            validate_solution(&sol, &inst),
            vec![Violation::DepotToDepot { delivery: 0 }]
        );
    }

    #[test]
    fn ineligible_and_missing_customers() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)];
        let inst = Instance::euclidean("x", &pts, &[true, false, true], Parameters::default()).unwrap();
        let sol = TspDSolution::new(vec![0, 1, 4], vec![DroneDelivery::new(0, 2, 1)]);
        let v = validate_solution(&sol, &inst);
        assert!(v.contains(&Violation::NotDroneEligible { delivery: 0, node: 2 }));
        assert!(v.contains(&Violation::MissingCustomer { node: 3 }));
    }

    #[test]
    fn giant_tour_rejects_non_permutations() {
        assert!(GiantTour::new(vec![2, 1, 3], 3).is_ok());
        assert!(GiantTour::new(vec![2, 2, 3], 3).is_err());
        assert!(GiantTour::new(vec![0, 1, 2], 3).is_err());
        assert!(GiantTour::new(vec![1, 2], 3).is_err());
    }

    #[test]
    fn instance_rejects_bad_parameters() {
        let pts = [(0.0, 0.0), (1.0, 0.0)];
        let params = Parameters {
            endurance: 0.0,
            ..Parameters::default()
        };
        assert!(matches!(
            Instance::euclidean("x", &pts, &[true], params),
            Err(ModelError::Parameter { name: "endurance", .. })
        ));
    }
}
