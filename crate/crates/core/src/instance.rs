//! CVRPTW instance loading, validation and normalization, plus the
//! LA-neighborhood computation everything downstream builds on.
//!
//! Times are integers in units of `1/time_scale` of the raw Solomon unit and
//! use the remaining-time convention: a window is `(tw_early, tw_late)` with
//! `tw_early >= tw_late >= 0`, where `tw_early` is the remaining time at the
//! earliest permitted service start (i.e. the most time remaining).

use serde::{Deserialize, Serialize};
use std::fmt;

pub type CustId = usize;
pub type Scaled = i64;

/// A location in the augmented customer set: `Start`/`End` are the co-located
/// depots (written -1/-2 in reports), `Cust(u)` a customer index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Loc {
    Cust(CustId),
    Start,
    End,
}

impl Loc {
    pub fn cust(self) -> Option<CustId> {
        match self {
            Loc::Cust(u) => Some(u),
            _ => None,
        }
    }

    pub fn is_depot(self) -> bool {
        !matches!(self, Loc::Cust(_))
    }

    /// Row index in the (n+2)-square travel matrix.
    pub fn index(self, n: usize) -> usize {
        match self {
            Loc::Cust(u) => {
                debug_assert!(u < n);
                u
            }
            Loc::Start => n,
            Loc::End => n + 1,
        }
    }

    /// Signed id used in dumps and traces: customers are 0-based, depots -1/-2.
    pub fn signed(self) -> i64 {
        match self {
            Loc::Cust(u) => u as i64,
            Loc::Start => -1,
            Loc::End => -2,
        }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signed())
    }
}

/// Small customer bitset; instances are desk scale (n <= 60).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CustSet(pub u64);

impl CustSet {
    pub const EMPTY: CustSet = CustSet(0);

    pub fn full(n: usize) -> CustSet {
        debug_assert!(n <= 60);
        CustSet(if n == 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    pub fn singleton(u: CustId) -> CustSet {
        CustSet(1u64 << u)
    }

    pub fn contains(self, u: CustId) -> bool {
        self.0 & (1u64 << u) != 0
    }

    pub fn insert(self, u: CustId) -> CustSet {
        CustSet(self.0 | (1u64 << u))
    }

    pub fn remove(self, u: CustId) -> CustSet {
        CustSet(self.0 & !(1u64 << u))
    }

    pub fn union(self, other: CustSet) -> CustSet {
        CustSet(self.0 | other.0)
    }

    pub fn inter(self, other: CustSet) -> CustSet {
        CustSet(self.0 & other.0)
    }

    pub fn minus(self, other: CustSet) -> CustSet {
        CustSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: CustSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = CustId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let u = bits.trailing_zeros() as CustId;
                bits &= bits - 1;
                Some(u)
            }
        })
    }
}

impl FromIterator<CustId> for CustSet {
    fn from_iter<I: IntoIterator<Item = CustId>>(iter: I) -> Self {
        let mut s = CustSet::EMPTY;
        for u in iter {
            s = s.insert(u);
        }
        s
    }
}

impl fmt::Debug for CustSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Customer {
    pub id: CustId,
    pub demand: i64,
    /// Remaining time at the earliest permitted service start (t+ in the
    /// remaining-time convention; the larger of the two bounds).
    pub tw_early: Scaled,
    /// Remaining time at the latest permitted service start (t-).
    pub tw_late: Scaled,
    /// Scaled service time; folded into outgoing travel by `normalize`.
    pub service_time: Scaled,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub customers: Vec<Customer>,
    /// Vehicle capacity d_0.
    pub vehicle_capacity: i64,
    /// Scaled horizon t_0; depot windows are (t_0, 0).
    pub horizon: Scaled,
    /// Raw-to-scaled multiplier for times and costs.
    pub time_scale: i64,
    /// Sum of scaled service times, recorded by `normalize` so objectives can
    /// be reported both service-inclusive and distance-only.
    pub cost_offset: Scaled,
    pub normalized: bool,
    /// (n+2)-square travel matrix, row-major, customers first then the start
    /// and end depot rows (identical, co-located). After `normalize` this is
    /// also the cost matrix.
    travel: Vec<Scaled>,
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Instance {
    pub fn n(&self) -> usize {
        self.customers.len()
    }

    fn dim(&self) -> usize {
        self.n() + 2
    }

    pub fn travel(&self, a: Loc, b: Loc) -> Scaled {
        let n = self.n();
        self.travel[a.index(n) * self.dim() + b.index(n)]
    }

    /// Travel cost; equals travel time once normalized.
    pub fn cost(&self, a: Loc, b: Loc) -> Scaled {
        self.travel(a, b)
    }

    pub fn demand(&self, l: Loc) -> i64 {
        match l {
            Loc::Cust(u) => self.customers[u].demand,
            _ => 0,
        }
    }

    /// Window as (tw_early, tw_late) in remaining time; depots get (t_0, 0).
    pub fn window(&self, l: Loc) -> (Scaled, Scaled) {
        match l {
            Loc::Cust(u) => (self.customers[u].tw_early, self.customers[u].tw_late),
            _ => (self.horizon, 0),
        }
    }

    pub fn tw_early(&self, l: Loc) -> Scaled {
        self.window(l).0
    }

    pub fn tw_late(&self, l: Loc) -> Scaled {
        self.window(l).1
    }

    pub fn locs(&self) -> impl Iterator<Item = Loc> {
        let n = self.n();
        (0..n).map(Loc::Cust).chain([Loc::Start, Loc::End])
    }

    fn validate(&self) -> Result<(), InstanceError> {
        if self.customers.is_empty() {
            return Err(InstanceError::Validation("no customers".into()));
        }
        if self.n() > 60 {
            return Err(InstanceError::Validation(format!(
                "instance has {} customers; this solver is built for desk scale (<= 60)",
                self.n()
            )));
        }
        for c in &self.customers {
            if c.demand <= 0 || c.demand > self.vehicle_capacity {
                return Err(InstanceError::Validation(format!(
                    "customer {}: demand {} outside (0, capacity {}]",
                    c.id, c.demand, self.vehicle_capacity
                )));
            }
            if c.tw_late < 0 || c.tw_early < c.tw_late {
                return Err(InstanceError::Validation(format!(
                    "customer {}: window ({}, {}) violates tw_early >= tw_late >= 0",
                    c.id, c.tw_early, c.tw_late
                )));
            }
            if c.service_time < 0 {
                return Err(InstanceError::Validation(format!(
                    "customer {}: negative service time",
                    c.id
                )));
            }
        }
        let n = self.n();
        if self.travel.len() != self.dim() * self.dim() {
            return Err(InstanceError::Validation("travel matrix size mismatch".into()));
        }
        if self.travel.iter().any(|&t| t < 0) {
            return Err(InstanceError::Validation("negative travel entry".into()));
        }
        for b in 0..self.dim() {
            if self.travel[n * self.dim() + b] != self.travel[(n + 1) * self.dim() + b] {
                return Err(InstanceError::Validation("depot rows differ".into()));
            }
        }
        Ok(())
    }

    /// Fold each customer's service time into its outgoing travel entries and
    /// set cost equal to travel (the depot's service time is zero, so depot
    /// rows are unchanged). Records the constant objective offset.
    pub fn normalize(mut self) -> Instance {
        if self.normalized {
            return self;
        }
        let n = self.n();
        let dim = self.dim();
        for u in 0..n {
            let s = self.customers[u].service_time;
            for b in 0..dim {
                self.travel[u * dim + b] += s;
            }
        }
        self.cost_offset = self.customers.iter().map(|c| c.service_time).sum();
        self.normalized = true;
        self
    }

    /// Feasibility of the two-customer route [-1, u, v, -2] with respect to
    /// capacity and time windows, evaluated on the normalized matrices.
    pub fn pair_route_feasible(&self, u: CustId, v: CustId) -> bool {
        debug_assert!(self.normalized);
        debug_assert_ne!(u, v);
        if self.customers[u].demand + self.customers[v].demand > self.vehicle_capacity {
            return false;
        }
        self.route_time_feasible([Loc::Cust(u), Loc::Cust(v)].into_iter())
    }

    /// Run the no-unnecessary-waiting departure chain over
    /// [-1, customers..., -2]; true iff every window is met.
    pub fn route_time_feasible(&self, customers: impl Iterator<Item = Loc>) -> bool {
        let mut prev = Loc::Start;
        let mut t = self.horizon;
        for l in customers.chain([Loc::End]) {
            let arrive = t - self.travel(prev, l);
            let (early, late) = self.window(l);
            if arrive < late {
                return false;
            }
            t = arrive.min(early);
            prev = l;
        }
        true
    }

    /// Serialize the normalized instance (ids, demands, remaining-time
    /// windows, scaled matrices, offset) for external oracle scripts.
    pub fn to_json_string(&self) -> Result<String, InstanceError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Instance, InstanceError> {
        let inst: Instance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    /// Build an instance directly from raw Solomon-unit data. Distances are
    /// Euclidean, scaled by `time_scale` and truncated; windows convert to
    /// remaining time. Used by the generators and tests.
    #[allow(clippy::too_many_arguments)]
    pub fn from_raw(
        id: &str,
        capacity: i64,
        depot_due_raw: f64,
        coords: &[(f64, f64)], // depot first, then customers
        demands: &[i64],
        ready_raw: &[f64],
        due_raw: &[f64],
        service_raw: &[f64],
        time_scale: i64,
    ) -> Result<Instance, InstanceError> {
        let n = coords.len() - 1;
        let scale = time_scale as f64;
        let t0_raw = depot_due_raw;
        let mut customers = Vec::with_capacity(n);
        for u in 0..n {
            customers.push(Customer {
                id: u,
                demand: demands[u + 1],
                tw_early: ((t0_raw - ready_raw[u + 1]) * scale).round() as Scaled,
                tw_late: ((t0_raw - due_raw[u + 1]) * scale).round() as Scaled,
                service_time: (service_raw[u + 1] * scale).round() as Scaled,
            });
        }
        let dim = n + 2;
        let mut travel = vec![0; dim * dim];
        // Matrix rows: customers 0..n-1, then start depot, then end depot.
        let pos = |i: usize| if i < n { coords[i + 1] } else { coords[0] };
        for a in 0..dim {
            for b in 0..dim {
                let (ax, ay) = pos(a);
                let (bx, by) = pos(b);
                let d = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
                travel[a * dim + b] = (d * scale).floor() as Scaled;
            }
        }
        let inst = Instance {
            id: id.to_string(),
            customers,
            vehicle_capacity: capacity,
            horizon: (t0_raw * scale).round() as Scaled,
            time_scale,
            cost_offset: 0,
            normalized: false,
            travel,
        };
        inst.validate()?;
        Ok(inst)
    }
}

/// Parse a Solomon-format benchmark file. The layout is: an instance name,
/// a VEHICLE section whose first all-numeric row is `number capacity`, and a
/// CUSTOMER section of rows `id x y demand ready due service` with row 0 the
/// depot. Header lines are skipped by shape, not by exact text.
pub fn parse_solomon(text: &str, time_scale: i64) -> Result<Instance, InstanceError> {
    if time_scale <= 0 {
        return Err(InstanceError::Validation("time_scale must be positive".into()));
    }
    let mut name = None;
    let mut capacity: Option<i64> = None;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let nums: Option<Vec<f64>> = toks.iter().map(|t| t.parse::<f64>().ok()).collect();
        match nums {
            Some(vals) if vals.len() == 2 && capacity.is_none() => {
                let cap = vals[1];
                if cap <= 0.0 || cap.fract() != 0.0 {
                    return Err(InstanceError::Parse {
                        line: lineno + 1,
                        msg: format!("vehicle capacity must be a positive integer, got {cap}"),
                    });
                }
                capacity = Some(cap as i64);
            }
            Some(vals) if vals.len() == 7 => {
                if capacity.is_none() {
                    return Err(InstanceError::Parse {
                        line: lineno + 1,
                        msg: "customer row before vehicle capacity header".into(),
                    });
                }
                rows.push((lineno + 1, vals));
            }
            Some(_) if capacity.is_some() && !rows.is_empty() => {
                return Err(InstanceError::Parse {
                    line: lineno + 1,
                    msg: format!("malformed customer row: expected 7 fields, got {}", toks.len()),
                });
            }
            _ => {
                if name.is_none() {
                    name = Some(line.to_string());
                }
            }
        }
    }
    let capacity = capacity.ok_or(InstanceError::Validation("missing vehicle capacity".into()))?;
    if rows.len() < 2 {
        return Err(InstanceError::Validation("no customer rows (need depot plus at least one customer)".into()));
    }
    let mut coords = Vec::new();
    let mut demands = Vec::new();
    let mut ready = Vec::new();
    let mut due = Vec::new();
    let mut service = Vec::new();
    for (i, (lineno, vals)) in rows.iter().enumerate() {
        if vals[0] as usize != i {
            return Err(InstanceError::Parse {
                line: *lineno,
                msg: format!("customer ids must be consecutive from 0, got {}", vals[0]),
            });
        }
        if vals[3].fract() != 0.0 || vals[3] < 0.0 {
            return Err(InstanceError::Parse {
                line: *lineno,
                msg: format!("demand must be a nonnegative integer, got {}", vals[3]),
            });
        }
        if vals[5] < vals[4] {
            return Err(InstanceError::Validation(format!(
                "customer {}: due {} earlier than ready {}",
                i, vals[5], vals[4]
            )));
        }
        coords.push((vals[1], vals[2]));
        demands.push(vals[3] as i64);
        ready.push(vals[4]);
        due.push(vals[5]);
        service.push(vals[6]);
    }
    Instance::from_raw(
        name.as_deref().unwrap_or("unnamed"),
        capacity,
        due[0],
        &coords,
        &demands,
        &ready,
        &due,
        &service,
        time_scale,
    )
}

/// Per-customer ordered LA-neighbor lists N_u.
#[derive(Clone, Debug)]
pub struct NeighborSets {
    pub sets: Vec<Vec<CustId>>,
    pub k: usize,
}

impl NeighborSets {
    pub fn neighbors(&self, u: CustId) -> &[CustId] {
        &self.sets[u]
    }

    pub fn neighbor_set(&self, u: CustId) -> CustSet {
        self.sets[u].iter().copied().collect()
    }
}

/// N_u = the k customers v with smallest normalized cost c_uv among those
/// pair-reachable from u in either direction, ties broken by customer id.
pub fn compute_la_neighbors(inst: &Instance, k: usize) -> NeighborSets {
    debug_assert!(inst.normalized);
    let n = inst.n();
    let mut sets = Vec::with_capacity(n);
    for u in 0..n {
        let mut cands: Vec<CustId> = (0..n)
            .filter(|&v| v != u)
            .filter(|&v| inst.pair_route_feasible(u, v) || inst.pair_route_feasible(v, u))
            .collect();
        cands.sort_by_key(|&v| (inst.cost(Loc::Cust(u), Loc::Cust(v)), v));
        cands.truncate(k);
        sets.push(cands);
    }
    NeighborSets { sets, k }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_CUST: &str = "\
toy1

VEHICLE
NUMBER     CAPACITY
  3          200

CUSTOMER
CUST NO.   XCOORD.   YCOORD.   DEMAND    READY TIME   DUE DATE   SERVICE TIME

    0       0          0          0          0         200          0
    1      30          0         10          0         100          5
";

    #[test]
    fn parse_minimal_single_customer() {
        let inst = parse_solomon(ONE_CUST, 10).unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.vehicle_capacity, 200);
        assert_eq!(inst.horizon, 2000);
        let c = &inst.customers[0];
        assert_eq!(c.demand, 10);
        // ready 0 -> most time remaining; due 100 -> (200-100)*10.
        assert_eq!(c.tw_early, 2000);
        assert_eq!(c.tw_late, 1000);
        assert_eq!(c.service_time, 50);
        assert_eq!(inst.travel(Loc::Start, Loc::Cust(0)), 300);
    }

    #[test]
    fn parse_rejects_empty_customer_section() {
        let text = "\
toy0

VEHICLE
NUMBER     CAPACITY
  3          200

CUSTOMER
CUST NO.   XCOORD.   YCOORD.   DEMAND    READY TIME   DUE DATE   SERVICE TIME

    0       0          0          0          0         200          0
";
        assert!(matches!(
            parse_solomon(text, 10),
            Err(InstanceError::Validation(_))
        ));
    }

    #[test]
    fn parse_rejects_due_before_ready() {
        let text = ONE_CUST.replace("0         100          5", "150       100          5");
        assert!(matches!(
            parse_solomon(&text, 10),
            Err(InstanceError::Validation(_))
        ));
    }

    #[test]
    fn parse_rejects_demand_over_capacity() {
        let text = ONE_CUST.replace("1      30          0         10", "1      30          0        300");
        assert!(matches!(
            parse_solomon(&text, 10),
            Err(InstanceError::Validation(_))
        ));
    }

    #[test]
    fn parse_reports_malformed_row_line() {
        let text = format!("{ONE_CUST}    2      30          0         10          0\n");
        match parse_solomon(&text, 10) {
            Err(InstanceError::Parse { line, .. }) => assert_eq!(line, 12),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn normalize_folds_service_time_and_sets_costs() {
        let inst = parse_solomon(ONE_CUST, 10).unwrap();
        let raw_out = inst.travel(Loc::Cust(0), Loc::End);
        let inst = inst.normalize();
        assert_eq!(inst.travel(Loc::Cust(0), Loc::End), raw_out + 50);
        assert_eq!(inst.cost(Loc::Cust(0), Loc::End), inst.travel(Loc::Cust(0), Loc::End));
        // Depot rows carry zero service time.
        assert_eq!(inst.travel(Loc::Start, Loc::Cust(0)), 300);
        assert_eq!(inst.cost_offset, 50);
    }

    fn three_on_a_line() -> Instance {
        // Customers at x = 10, 20, 30 on a line, wide windows.
        Instance::from_raw(
            "line3",
            100,
            1000.0,
            &[(0.0, 0.0), (10.0, 0.0), (20.0, 0.0), (30.0, 0.0)],
            &[0, 10, 10, 10],
            &[0.0, 0.0, 0.0, 0.0],
            &[1000.0, 900.0, 900.0, 900.0],
            &[0.0, 10.0, 10.0, 10.0],
            1,
        )
        .unwrap()
        .normalize()
    }

    #[test]
    fn offset_sums_service_times() {
        let inst = three_on_a_line();
        assert_eq!(inst.cost_offset, 30);
    }

    #[test]
    fn pair_route_capacity_violation() {
        let mut inst = three_on_a_line();
        inst.customers[0].demand = 60;
        inst.customers[1].demand = 60;
        assert!(!inst.pair_route_feasible(0, 1));
        assert!(inst.pair_route_feasible(0, 2));
    }

    #[test]
    fn pair_route_window_violation() {
        // Customer 1 must be served so late that customer 2's window is
        // already shut on arrival: ready_1 = 900 (tw_early = 100) while
        // due_2 = 50 (tw_late = 950).
        let inst = Instance::from_raw(
            "tight",
            100,
            1000.0,
            &[(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)],
            &[0, 10, 10],
            &[0.0, 900.0, 0.0],
            &[1000.0, 950.0, 50.0],
            &[0.0, 0.0, 0.0],
            1,
        )
        .unwrap()
        .normalize();
        assert!(!inst.pair_route_feasible(0, 1));
        assert!(inst.pair_route_feasible(1, 0));
    }

    #[test]
    fn neighbors_k0_and_line_geometry() {
        let inst = three_on_a_line();
        let nbrs = compute_la_neighbors(&inst, 0);
        assert!(nbrs.sets.iter().all(|s| s.is_empty()));
        let nbrs = compute_la_neighbors(&inst, 1);
        assert_eq!(nbrs.neighbors(0), &[1]);
        assert_eq!(nbrs.neighbors(2), &[1]);
        // Middle customer ties to both ends; id tie-break picks 0.
        assert_eq!(nbrs.neighbors(1), &[0]);
    }

    #[test]
    fn neighbors_exclude_time_unreachable() {
        // Customers 0 and 1 are adjacent but their long service times and
        // early deadlines make the pair route infeasible in both directions,
        // so each one's nearest usable neighbor is the distant customer 2.
        let inst = Instance::from_raw(
            "unreach",
            100,
            1000.0,
            &[(0.0, 0.0), (10.0, 0.0), (12.0, 0.0), (30.0, 0.0)],
            &[0, 10, 10, 10],
            &[0.0, 0.0, 0.0, 0.0],
            &[1000.0, 60.0, 60.0, 900.0],
            &[0.0, 50.0, 50.0, 0.0],
            1,
        )
        .unwrap()
        .normalize();
        assert!(!inst.pair_route_feasible(0, 1));
        assert!(!inst.pair_route_feasible(1, 0));
        let nbrs = compute_la_neighbors(&inst, 1);
        assert_eq!(nbrs.neighbors(0), &[2]);
    }

    #[test]
    fn json_round_trip_is_identical() {
        let inst = three_on_a_line();
        let json = inst.to_json_string().unwrap();
        let back = Instance::from_json_str(&json).unwrap();
        assert_eq!(back.travel, inst.travel);
        assert_eq!(back.horizon, inst.horizon);
        assert_eq!(back.cost_offset, inst.cost_offset);
        let json2 = back.to_json_string().unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn normalized_cost_equals_travel_everywhere() {
        let inst = three_on_a_line();
        for a in inst.locs() {
            for b in inst.locs() {
                assert_eq!(inst.cost(a, b), inst.travel(a, b));
            }
        }
    }
}
