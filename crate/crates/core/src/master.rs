//! Master-side orchestration: family orderings (beta), the graph-master
//! restricted master LP over pooled nodes/arcs, the nested column-generation
//! loops, the standard-CG baseline, and ILP postprocessing.

use crate::instance::{CustId, Instance, Loc, Scaled};
use crate::la_frontier::{ArcId, ArcSet, FrontierTable, LAArcKey};
use crate::lp_backend::{Backend, IlpStatus, LinearModel, LpError, LpStatus};
use crate::numeric::Rat;
use crate::pricing::{
    compute_eta, init_partition, price, ArcCostMemo, Duals, NodeCache, PriceMode, PriceOutcome,
    PricingContext, PricingResult, TraceEvent,
};
use crate::report::{Mode, RunReport, SolveConfig};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::{Duration, Instant};

/// A strict total order over customers and depots; the start depot is always
/// minimal and the end depot maximal.
#[derive(Clone, Debug)]
pub struct Beta {
    pos: Vec<usize>,
    n: usize,
}

impl Beta {
    pub fn position(&self, l: Loc) -> usize {
        self.pos[l.index(self.n)]
    }

    /// Arc admissibility under the order: first before every intermediate
    /// and the last, every intermediate before the last.
    pub fn arc_ok(&self, key: &LAArcKey) -> bool {
        let pf = self.position(key.first);
        let pl = self.position(key.last);
        if pf >= pl {
            return false;
        }
        key.intermediates.iter().all(|w| {
            let pw = self.position(Loc::Cust(w));
            pf < pw && pw < pl
        })
    }

    pub fn order(&self) -> Vec<Loc> {
        let mut locs: Vec<Loc> = (0..self.n).map(Loc::Cust).chain([Loc::Start, Loc::End]).collect();
        locs.sort_by_key(|l| self.position(*l));
        locs
    }
}

/// Build the family ordering for a route: route customers keep their visit
/// order; every other customer is inserted directly behind its cheapest
/// pair-feasible anchor among the route customers, with the depot anchor
/// (and anchorless customers) sent to the end of the list. Ties break
/// toward the smaller anchor id.
pub fn build_beta(route: &[CustId], inst: &Instance) -> Beta {
    let n = inst.n();
    let mut order: Vec<Loc> = Vec::with_capacity(n + 2);
    order.push(Loc::Start);
    order.extend(route.iter().map(|&u| Loc::Cust(u)));
    order.push(Loc::End);
    let in_route: HashSet<CustId> = route.iter().copied().collect();
    for v in 0..n {
        if in_route.contains(&v) {
            continue;
        }
        let mut best: Option<(Scaled, i64, Loc)> = None; // (cost, anchor id, anchor)
        for anchor in std::iter::once(Loc::Start).chain(route.iter().map(|&u| Loc::Cust(u))) {
            let feasible = match anchor {
                Loc::Start => inst.route_time_feasible([Loc::Cust(v)].into_iter()),
                Loc::Cust(u) => inst.pair_route_feasible(u, v),
                Loc::End => false,
            };
            if !feasible {
                continue;
            }
            let c = inst.cost(anchor, Loc::Cust(v));
            let key = (c, anchor.signed());
            if best.is_none_or(|(bc, bid, _)| key < (bc, bid)) {
                best = Some((c, anchor.signed(), anchor));
            }
        }
        match best {
            Some((_, _, Loc::Cust(u))) => {
                let at = order.iter().position(|&l| l == Loc::Cust(u)).unwrap();
                order.insert(at + 1, Loc::Cust(v));
            }
            // Customers whose best anchor is the depot go to the end.
            _ => {
                let at = order.len() - 1;
                order.insert(at, Loc::Cust(v));
            }
        }
    }
    let mut pos = vec![0; n + 2];
    for (p, l) in order.iter().enumerate() {
        pos[l.index(n)] = p;
    }
    Beta { pos, n }
}

/// A generated column: its route, ordering, and retained pricing partition.
pub struct Family {
    pub id: usize,
    pub source_route: Vec<CustId>,
    pub beta: Beta,
    pub cache: NodeCache,
    /// Per-arc admissibility under this family's order.
    pub arc_mask: Vec<bool>,
}

/// Pooled exact-graph node (u, d, t).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PoolNode {
    pub loc: Loc,
    pub d: i64,
    pub t: Scaled,
}

#[derive(Clone, Copy, Debug)]
pub struct GmEdge {
    pub from: usize,
    pub to: usize,
    pub arc: ArcId,
    pub cost: Scaled,
}

/// The graph-master RMP state: global node/arc pools shared by all families
/// and one incrementally grown edge list per family.
pub struct GmRmp {
    pub nodes: Vec<PoolNode>,
    node_idx: HashMap<PoolNode, usize>,
    nodes_by_loc: HashMap<Loc, Vec<usize>>,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<ArcId>,
    arc_seen: HashSet<ArcId>,
    pub families: Vec<Family>,
    pub edges: Vec<Vec<GmEdge>>,
    /// Per family: (nodes, arcs) already combined into its edge list.
    watermarks: Vec<(usize, usize)>,
    /// Pool sizes guaranteed by the singleton-route initialization.
    initial_pool: (usize, usize),
}

impl GmRmp {
    /// Pools start with the minimal nodes and arcs expressing every
    /// single-customer route.
    pub fn init(inst: &Instance, arcs: &ArcSet) -> GmRmp {
        let mut rmp = GmRmp {
            nodes: Vec::new(),
            node_idx: HashMap::new(),
            nodes_by_loc: HashMap::new(),
            source: 0,
            sink: 0,
            arcs: Vec::new(),
            arc_seen: HashSet::new(),
            families: Vec::new(),
            edges: Vec::new(),
            watermarks: Vec::new(),
            initial_pool: (0, 0),
        };
        rmp.source = rmp.add_node(PoolNode { loc: Loc::Start, d: inst.vehicle_capacity, t: inst.horizon });
        rmp.sink = rmp.add_node(PoolNode { loc: Loc::End, d: 0, t: 0 });
        for u in 0..inst.n() {
            let entry = inst.tw_early(Loc::Cust(u)).min(inst.horizon - inst.travel(Loc::Start, Loc::Cust(u)));
            rmp.add_node(PoolNode { loc: Loc::Cust(u), d: inst.vehicle_capacity, t: entry });
            let depot_arc = arcs
                .between(Loc::Start, Loc::Cust(u))
                .first()
                .copied()
                .expect("depot arc exists for every customer");
            rmp.add_arc(depot_arc);
            let home_arc = arcs
                .between(Loc::Cust(u), Loc::End)
                .iter()
                .copied()
                .find(|&a| arcs.arcs[a].key.intermediates.is_empty())
                .expect("direct return arc exists for every customer");
            rmp.add_arc(home_arc);
        }
        rmp.initial_pool = (rmp.nodes.len(), rmp.arcs.len());
        rmp
    }

    fn add_node(&mut self, node: PoolNode) -> usize {
        if let Some(&i) = self.node_idx.get(&node) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(node);
        self.node_idx.insert(node, i);
        self.nodes_by_loc.entry(node.loc).or_default().push(i);
        i
    }

    fn add_arc(&mut self, arc: ArcId) {
        if self.arc_seen.insert(arc) {
            self.arcs.push(arc);
        }
    }

    pub fn add_family(&mut self, route: Vec<CustId>, inst: &Instance, arcs: &ArcSet) -> usize {
        let id = self.families.len();
        let beta = build_beta(&route, inst);
        let arc_mask = arcs.arcs.iter().map(|a| beta.arc_ok(&a.key)).collect();
        self.families.push(Family {
            id,
            source_route: route.clone(),
            beta,
            cache: init_partition(inst),
            arc_mask,
        });
        self.edges.push(Vec::new());
        self.watermarks.push((0, 0));
        id
    }

    /// Pool growth from a family-pricing route: its exact-graph nodes and
    /// LA-arcs join the global pools. Idempotent for already-pooled items.
    pub fn absorb_route(&mut self, res: &PricingResult) {
        for &(loc, d, t) in &res.path_nodes {
            self.add_node(PoolNode { loc, d, t });
        }
        for &a in &res.path_arcs {
            self.add_arc(a);
        }
    }

    /// Extend every family's edge list with the combinations made newly
    /// expressible by pool growth (new node, new arc, or new family).
    pub fn grow_edges(&mut self, inst: &Instance, arcs: &ArcSet, table: &FrontierTable, memo: &ArcCostMemo) {
        for fid in 0..self.families.len() {
            let (node_wm, arc_wm) = self.watermarks[fid];
            if node_wm == self.nodes.len() && arc_wm == self.arcs.len() {
                continue;
            }
            let beta = &self.families[fid].beta;
            let mut new_edges = Vec::new();
            for (arc_pos, &aid) in self.arcs.iter().enumerate() {
                let arc = &arcs.arcs[aid];
                if !beta.arc_ok(&arc.key) {
                    continue;
                }
                let froms = self.nodes_by_loc.get(&arc.key.first).map(Vec::as_slice).unwrap_or(&[]);
                let tos = self.nodes_by_loc.get(&arc.key.last).map(Vec::as_slice).unwrap_or(&[]);
                for &i in froms {
                    for &j in tos {
                        let all_old = i < node_wm && j < node_wm && arc_pos < arc_wm;
                        if all_old || i == self.sink || j == self.source {
                            continue;
                        }
                        let (ni, nj) = (self.nodes[i], self.nodes[j]);
                        if ni.d - arc.d_p < nj.d {
                            continue;
                        }
                        if let Some(c) = memo_cost(memo, inst, arcs, table, aid, ni.t, nj.t) {
                            new_edges.push(GmEdge { from: i, to: j, arc: aid, cost: c });
                        }
                    }
                }
            }
            self.edges[fid].extend(new_edges);
            self.watermarks[fid] = (self.nodes.len(), self.arcs.len());
        }
    }

    /// Drop pooled nodes and arcs that carry no flow in the given primal
    /// solution (the optional pool pruning); the singleton-route pool and
    /// the depots always stay. Edge lists are rebuilt on the next growth.
    pub fn prune_pools(&mut self, primal: &[(usize, usize, f64)]) {
        let mut used_nodes: HashSet<usize> = HashSet::new();
        let mut used_arcs: HashSet<ArcId> = HashSet::new();
        for &(fid, eidx, v) in primal {
            if v > 1e-9 {
                let e = self.edges[fid][eidx];
                used_nodes.insert(e.from);
                used_nodes.insert(e.to);
                used_arcs.insert(e.arc);
            }
        }
        let (init_nodes, init_arcs) = self.initial_pool;
        let kept: Vec<PoolNode> = (0..self.nodes.len())
            .filter(|&i| i < init_nodes || used_nodes.contains(&i))
            .map(|i| self.nodes[i])
            .collect();
        let kept_arcs: Vec<ArcId> = self
            .arcs
            .iter()
            .enumerate()
            .filter(|&(pos, a)| pos < init_arcs || used_arcs.contains(a))
            .map(|(_, &a)| a)
            .collect();
        self.nodes.clear();
        self.node_idx.clear();
        self.nodes_by_loc.clear();
        self.arcs.clear();
        self.arc_seen.clear();
        for n in kept {
            self.add_node(n);
        }
        // Source and sink are the first two initial nodes by construction.
        self.source = 0;
        self.sink = 1;
        for a in kept_arcs {
            self.add_arc(a);
        }
        for fid in 0..self.families.len() {
            self.edges[fid].clear();
            self.watermarks[fid] = (0, 0);
        }
    }

    /// The GM constraint system over the current pools as a linear model,
    /// with the variable -> (family, edge) map. Covering rows come first, in
    /// customer order, then per-family flow balance.
    fn build_model(&self, inst: &Instance, arcs: &ArcSet, integer: bool) -> (LinearModel, Vec<(usize, usize)>) {
        let n = inst.n();
        let mut var_of: Vec<(usize, usize)> = Vec::new();
        for (fid, edges) in self.edges.iter().enumerate() {
            for eidx in 0..edges.len() {
                var_of.push((fid, eidx));
            }
        }
        let mut model = LinearModel::new(var_of.len());
        if integer {
            model.integer = vec![true; var_of.len()];
        }
        let mut cover: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut flow: BTreeMap<(usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
        for (j, &(fid, eidx)) in var_of.iter().enumerate() {
            let e = &self.edges[fid][eidx];
            model.objective[j] = e.cost as f64;
            for u in arcs.arcs[e.arc].serviced.iter() {
                cover[u].push((j, 1.0));
            }
            if e.from != self.source && e.from != self.sink {
                flow.entry((fid, e.from)).or_default().push((j, 1.0));
            }
            if e.to != self.source && e.to != self.sink {
                flow.entry((fid, e.to)).or_default().push((j, -1.0));
            }
        }
        for row in cover {
            model.add_ge(row, 1.0);
        }
        for (_, row) in flow {
            model.add_eq(row, 0.0);
        }
        (model, var_of)
    }
}

fn memo_cost(
    memo: &ArcCostMemo,
    inst: &Instance,
    arcs: &ArcSet,
    table: &FrontierTable,
    arc: ArcId,
    t1: Scaled,
    t2: Scaled,
) -> Option<Scaled> {
    memo.cost(inst, arcs, table, arc, t1, t2)
}

/// LP solution of the restricted master.
#[derive(Clone, Debug)]
pub struct MasterSolution {
    pub objective: f64,
    /// Covering duals per customer, nonnegative.
    pub duals: Vec<f64>,
    /// Active primal values: (family, edge index, value) for GM, or
    /// (0, column index, value) for the explicit-column master.
    pub primal: Vec<(usize, usize, f64)>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("restricted master infeasible: {0}")]
    MasterInfeasible(String),
    #[error("no feasible route for some customer")]
    NoRoute,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Solve the GM RMP: minimize total arc cost subject to covering every
/// customer and per-family flow balance at interior pooled nodes. Covering
/// duals are returned; flow-balance duals are discarded.
pub fn solve_gm_rmp(rmp: &GmRmp, inst: &Instance, arcs: &ArcSet, backend: Backend) -> Result<MasterSolution, RunError> {
    let n = inst.n();
    let (model, var_of) = rmp.build_model(inst, arcs, false);
    let sol = backend.solve_lp(&model).map_err(RunError::Lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        other => return Err(RunError::MasterInfeasible(format!("{other:?}"))),
    }
    let duals = sol.duals[..n].iter().map(|&y| y.max(0.0)).collect();
    let primal = sol
        .primal
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 1e-9)
        .map(|(j, &v)| (var_of[j].0, var_of[j].1, v))
        .collect();
    Ok(MasterSolution { objective: sol.objective, duals, primal })
}

/// Integrality pass over the current constraint system; returns
/// (ilp objective, bound, timed_out).
fn postprocess_gm_ilp(
    rmp: &GmRmp,
    inst: &Instance,
    arcs: &ArcSet,
    backend: Backend,
    limit: Duration,
) -> Result<(f64, f64, bool), RunError> {
    let (model, _) = rmp.build_model(inst, arcs, true);
    let sol = backend.solve_ilp(&model, limit).map_err(RunError::Lp)?;
    Ok((sol.objective, sol.bound, sol.status == IlpStatus::TimeLimit))
}

/// Explicit-column weighted set cover (the standard-CG master).
fn solve_cover_lp(
    columns: &[(Vec<CustId>, Scaled)],
    n: usize,
    backend: Backend,
) -> Result<MasterSolution, RunError> {
    let mut model = LinearModel::new(columns.len());
    let mut cover: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (j, (route, cost)) in columns.iter().enumerate() {
        model.objective[j] = *cost as f64;
        for &u in route {
            cover[u].push((j, 1.0));
        }
    }
    for row in cover {
        model.add_ge(row, 1.0);
    }
    let sol = backend.solve_lp(&model).map_err(RunError::Lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        other => return Err(RunError::MasterInfeasible(format!("{other:?}"))),
    }
    let duals = sol.duals.iter().map(|&y| y.max(0.0)).collect();
    let primal = sol
        .primal
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 1e-9)
        .map(|(j, &v)| (0usize, j, v))
        .collect();
    Ok(MasterSolution { objective: sol.objective, duals, primal })
}

fn postprocess_cover_ilp(
    columns: &[(Vec<CustId>, Scaled)],
    n: usize,
    backend: Backend,
    limit: Duration,
) -> Result<(f64, f64, bool), RunError> {
    let mut model = LinearModel::new(columns.len());
    model.integer = vec![true; columns.len()];
    let mut cover: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (j, (route, cost)) in columns.iter().enumerate() {
        model.objective[j] = *cost as f64;
        for &u in route {
            cover[u].push((j, 1.0));
        }
    }
    for row in cover {
        model.add_ge(row, 1.0);
    }
    let sol = backend.solve_ilp(&model, limit).map_err(RunError::Lp)?;
    Ok((sol.objective, sol.bound, sol.status == IlpStatus::TimeLimit))
}

/// Set-cover LP over the full route enumeration (desk-scale oracle).
pub fn enumeration_lp_objective(inst: &Instance, backend: Backend) -> Result<f64, RunError> {
    let routes = crate::pricing::enumerate_routes(inst);
    let sol = solve_cover_lp(&routes, inst.n(), backend)?;
    Ok(sol.objective)
}

struct Timers {
    preprocess: Duration,
    rmp_lp: Duration,
    pricing_exact: Duration,
    pricing_family: Duration,
    mp_loop: Duration,
    ilp: Duration,
}

impl Timers {
    fn new() -> Timers {
        Timers {
            preprocess: Duration::ZERO,
            rmp_lp: Duration::ZERO,
            pricing_exact: Duration::ZERO,
            pricing_family: Duration::ZERO,
            mp_loop: Duration::ZERO,
            ilp: Duration::ZERO,
        }
    }
}

struct Prepared {
    arcs: ArcSet,
    table: FrontierTable,
    memo: ArcCostMemo,
}

fn prepare(inst: &Instance, k: usize) -> Prepared {
    let nbrs = crate::instance::compute_la_neighbors(inst, k);
    let arcs = ArcSet::enumerate(inst, &nbrs);
    let table = FrontierTable::build(inst, &arcs);
    Prepared { arcs, table, memo: ArcCostMemo::new() }
}

fn epsilon_rat(eps: f64) -> Rat {
    Rat::approximate_float(eps).unwrap_or_else(|| Rat::new(1, 1_000_000))
}

/// Run the graph-master solver to LP convergence, then postprocess an
/// integer solution. The outer loop adds one exactly-priced column (family)
/// at a time; the inner loop grows pools until no family prices negative.
pub fn run_gm(inst: &Instance, cfg: &SolveConfig) -> Result<RunReport, RunError> {
    let total_start = Instant::now();
    let mut timers = Timers::new();
    let backend = Backend::resolve(cfg.backend, inst.n());
    let eps = epsilon_rat(cfg.epsilon);
    let neg_eps = -eps;

    let t = Instant::now();
    let prep = prepare(inst, cfg.la_neighbors);
    timers.preprocess = t.elapsed();

    let mp_start = Instant::now();
    let mut rmp = GmRmp::init(inst, &prep.arcs);
    rmp.add_family(Vec::new(), inst, &prep.arcs);
    let mut exact_cache = init_partition(inst);
    let mut trace: Vec<TraceEvent> = Vec::new();
    let mut outer_iterations = 0usize;
    let mut inner_iterations = 0usize;
    let mut converged = false;
    let mut stalled = false;
    let mut lp_objective;
    let mut hit_limit = false;
    let deadline = crate::lp_backend::Deadline::new(cfg.max_seconds.map(Duration::from_secs_f64));

    'outer: loop {
        outer_iterations += 1;
        // Inner loop: solve the GM RMP and price every family until no
        // family-expressible route has negative reduced cost.
        let mut last_duals;
        loop {
            inner_iterations += 1;
            rmp.grow_edges(inst, &prep.arcs, &prep.table, &prep.memo);
            let t = Instant::now();
            let sol = solve_gm_rmp(&rmp, inst, &prep.arcs, backend)?;
            timers.rmp_lp += t.elapsed();
            lp_objective = sol.objective;
            let duals = Duals::from_floats(&sol.duals);
            let pi_arc = duals.arc_sums(&prep.arcs);
            let eta = compute_eta(&prep.arcs, &prep.table, &pi_arc);
            last_duals = (duals, pi_arc, eta);
            let (ref duals, ref pi_arc, eta) = last_duals;

            let t = Instant::now();
            let results: Vec<(usize, PriceOutcome)> = rmp
                .families
                .par_iter_mut()
                .map(|fam| {
                    let ctx = PricingContext {
                        inst,
                        arcs: &prep.arcs,
                        table: &prep.table,
                        duals,
                        pi_arc,
                        memo: &prep.memo,
                        eta,
                        mode: PriceMode::Family(&fam.beta),
                        arc_mask: Some(&fam.arc_mask),
                        alpha: 0.0,
                    };
                    (fam.id, price(&ctx, &mut fam.cache, None))
                })
                .collect();
            timers.pricing_family += t.elapsed();

            let before = (rmp.nodes.len(), rmp.arcs.len());
            let mut any_negative = false;
            for (_, outcome) in &results {
                match outcome {
                    PriceOutcome::Route(res) => {
                        if res.reduced_cost < neg_eps {
                            any_negative = true;
                            rmp.absorb_route(res);
                        }
                    }
                    PriceOutcome::NoRoute => return Err(RunError::NoRoute),
                }
            }
            if !any_negative {
                break;
            }
            if (rmp.nodes.len(), rmp.arcs.len()) == before {
                // Negative columns that add nothing new: the LP tolerance is
                // the binding constraint. Declare the inner loop done.
                log::warn!("inner loop stalled (pools unchanged); continuing with outer loop");
                stalled = true;
                break;
            }
            if deadline.exceeded() {
                hit_limit = true;
                break 'outer;
            }
        }

        if cfg.prune {
            let t = Instant::now();
            let sol = solve_gm_rmp(&rmp, inst, &prep.arcs, backend)?;
            timers.rmp_lp += t.elapsed();
            rmp.prune_pools(&sol.primal);
            rmp.grow_edges(inst, &prep.arcs, &prep.table, &prep.memo);
        }

        // Exact pricing over all routes with the freshest duals.
        let (duals, pi_arc, eta) = &last_duals;
        let t = Instant::now();
        let mut outcome = {
            let ctx = PricingContext {
                inst,
                arcs: &prep.arcs,
                table: &prep.table,
                duals,
                pi_arc,
                memo: &prep.memo,
                eta: *eta,
                mode: PriceMode::Exact,
                arc_mask: None,
                alpha: cfg.alpha,
            };
            price(&ctx, &mut exact_cache, Some(&mut trace))
        };
        // The terminal certificate must be exact: re-run with early exit off
        // if an alpha exit produced a non-improving column.
        if let PriceOutcome::Route(res) = &outcome {
            if !res.exact && res.reduced_cost >= neg_eps {
                let ctx = PricingContext {
                    inst,
                    arcs: &prep.arcs,
                    table: &prep.table,
                    duals,
                    pi_arc,
                    memo: &prep.memo,
                    eta: *eta,
                    mode: PriceMode::Exact,
                    arc_mask: None,
                    alpha: 0.0,
                };
                outcome = price(&ctx, &mut exact_cache, Some(&mut trace));
            }
        }
        timers.pricing_exact += t.elapsed();
        match outcome {
            PriceOutcome::NoRoute => return Err(RunError::NoRoute),
            PriceOutcome::Route(res) => {
                if res.reduced_cost >= neg_eps {
                    converged = true;
                    break;
                }
                if rmp.families.iter().any(|f| f.source_route == res.route) {
                    log::warn!("exact pricing repeated an existing family; stopping on LP tolerance");
                    stalled = true;
                    converged = true;
                    break;
                }
                rmp.add_family(res.route.clone(), inst, &prep.arcs);
            }
        }
        if deadline.exceeded() {
            hit_limit = true;
            break;
        }
    }
    timers.mp_loop = mp_start.elapsed();

    let t = Instant::now();
    let (ilp_objective, _bound, ilp_timeout) = postprocess_gm_ilp(
        &rmp,
        inst,
        &prep.arcs,
        backend,
        Duration::from_secs_f64(cfg.ilp_max_seconds),
    )?;
    timers.ilp = t.elapsed();

    if let Some(path) = &cfg.trace_path {
        write_trace(path, &trace);
    }

    let report = RunReport {
        schema_version: RunReport::SCHEMA_VERSION,
        instance: inst.id.clone(),
        mode: Mode::Gm,
        la_neighbors: cfg.la_neighbors,
        backend: backend.name().to_string(),
        mp_iterations: outer_iterations,
        inner_iterations: Some(inner_iterations),
        columns_generated: rmp.families.len(),
        preprocess_time_ms: ms(timers.preprocess),
        pricing_time_exact_ms: ms(timers.pricing_exact),
        pricing_time_family_ms: Some(ms(timers.pricing_family)),
        rmp_lp_time_ms: ms(timers.rmp_lp),
        mp_loop_time_ms: ms(timers.mp_loop),
        postprocess_ilp_time_ms: ms(timers.ilp),
        total_time_ms: ms(total_start.elapsed()),
        lp_objective,
        ilp_objective,
        gap: ilp_objective - lp_objective,
        converged: converged && !hit_limit,
        hit_time_limit: hit_limit || ilp_timeout,
        stalled,
        cost_offset: inst.cost_offset,
        time_scale: inst.time_scale,
        epsilon: cfg.epsilon,
        alpha: cfg.alpha,
        oracle_objective: None,
        error: None,
    };
    Ok(report)
}

/// Standard column generation: explicit singleton columns, one column added
/// per master iteration, same pricing machinery.
pub fn run_standard_cg(inst: &Instance, cfg: &SolveConfig) -> Result<RunReport, RunError> {
    let total_start = Instant::now();
    let mut timers = Timers::new();
    let backend = Backend::resolve(cfg.backend, inst.n());
    let eps = epsilon_rat(cfg.epsilon);
    let neg_eps = -eps;

    let t = Instant::now();
    let prep = prepare(inst, cfg.la_neighbors);
    timers.preprocess = t.elapsed();

    let mp_start = Instant::now();
    let mut columns: Vec<(Vec<CustId>, Scaled)> = (0..inst.n())
        .map(|u| {
            let route = vec![u];
            let cost = inst.cost(Loc::Start, Loc::Cust(u)) + inst.cost(Loc::Cust(u), Loc::End);
            (route, cost)
        })
        .collect();
    if columns
        .iter()
        .any(|(r, _)| !inst.route_time_feasible(r.iter().map(|&u| Loc::Cust(u))))
    {
        return Err(RunError::NoRoute);
    }
    let mut cache = init_partition(inst);
    let mut trace: Vec<TraceEvent> = Vec::new();
    let mut iterations = 0usize;
    let mut converged = false;
    let mut stalled = false;
    let mut hit_limit = false;
    let mut lp_objective;
    let deadline = crate::lp_backend::Deadline::new(cfg.max_seconds.map(Duration::from_secs_f64));

    loop {
        iterations += 1;
        let t = Instant::now();
        let sol = solve_cover_lp(&columns, inst.n(), backend)?;
        timers.rmp_lp += t.elapsed();
        lp_objective = sol.objective;
        let duals = Duals::from_floats(&sol.duals);
        let pi_arc = duals.arc_sums(&prep.arcs);
        let eta = compute_eta(&prep.arcs, &prep.table, &pi_arc);
        let t = Instant::now();
        let mut outcome = {
            let ctx = PricingContext {
                inst,
                arcs: &prep.arcs,
                table: &prep.table,
                duals: &duals,
                pi_arc: &pi_arc,
                memo: &prep.memo,
                eta,
                mode: PriceMode::Exact,
                arc_mask: None,
                alpha: cfg.alpha,
            };
            price(&ctx, &mut cache, Some(&mut trace))
        };
        if let PriceOutcome::Route(res) = &outcome {
            if !res.exact && res.reduced_cost >= neg_eps {
                let ctx = PricingContext {
                    inst,
                    arcs: &prep.arcs,
                    table: &prep.table,
                    duals: &duals,
                    pi_arc: &pi_arc,
                    memo: &prep.memo,
                    eta,
                    mode: PriceMode::Exact,
                    arc_mask: None,
                    alpha: 0.0,
                };
                outcome = price(&ctx, &mut cache, Some(&mut trace));
            }
        }
        timers.pricing_exact += t.elapsed();
        match outcome {
            PriceOutcome::NoRoute => return Err(RunError::NoRoute),
            PriceOutcome::Route(res) => {
                if res.reduced_cost >= neg_eps {
                    converged = true;
                    break;
                }
                if columns.iter().any(|(r, _)| *r == res.route) {
                    log::warn!("pricing repeated an existing column; stopping on LP tolerance");
                    stalled = true;
                    converged = true;
                    break;
                }
                let cost = crate::pricing::route_cost(inst, &res.route);
                columns.push((res.route, cost));
            }
        }
        if deadline.exceeded() {
            hit_limit = true;
            break;
        }
    }
    timers.mp_loop = mp_start.elapsed();

    let t = Instant::now();
    let (ilp_objective, _bound, ilp_timeout) =
        postprocess_cover_ilp(&columns, inst.n(), backend, Duration::from_secs_f64(cfg.ilp_max_seconds))?;
    timers.ilp = t.elapsed();

    if let Some(path) = &cfg.trace_path {
        write_trace(path, &trace);
    }

    Ok(RunReport {
        schema_version: RunReport::SCHEMA_VERSION,
        instance: inst.id.clone(),
        mode: Mode::Cg,
        la_neighbors: cfg.la_neighbors,
        backend: backend.name().to_string(),
        mp_iterations: iterations,
        inner_iterations: None,
        columns_generated: columns.len(),
        preprocess_time_ms: ms(timers.preprocess),
        pricing_time_exact_ms: ms(timers.pricing_exact),
        pricing_time_family_ms: None,
        rmp_lp_time_ms: ms(timers.rmp_lp),
        mp_loop_time_ms: ms(timers.mp_loop),
        postprocess_ilp_time_ms: ms(timers.ilp),
        total_time_ms: ms(total_start.elapsed()),
        lp_objective,
        ilp_objective,
        gap: ilp_objective - lp_objective,
        converged: converged && !hit_limit,
        hit_time_limit: hit_limit || ilp_timeout,
        stalled,
        cost_offset: inst.cost_offset,
        time_scale: inst.time_scale,
        epsilon: cfg.epsilon,
        alpha: cfg.alpha,
        oracle_objective: None,
        error: None,
    })
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn write_trace(path: &std::path::Path, trace: &[TraceEvent]) {
    use std::io::Write;
    if let Ok(mut f) = std::fs::File::create(path) {
        for ev in trace {
            let _ = writeln!(f, "{ev}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::lp_backend::BackendKind;

    fn line_instance(n: usize) -> Instance {
        let mut coords = vec![(0.0, 0.0)];
        for i in 0..n {
            coords.push((10.0 * (i + 1) as f64, 0.0));
        }
        let demands: Vec<i64> = std::iter::once(0).chain((0..n).map(|_| 10)).collect();
        let ready = vec![0.0; n + 1];
        let due: Vec<f64> = std::iter::once(1000.0).chain((0..n).map(|_| 900.0)).collect();
        let service: Vec<f64> = std::iter::once(0.0).chain((0..n).map(|_| 5.0)).collect();
        Instance::from_raw("line", 100, 1000.0, &coords, &demands, &ready, &due, &service, 1)
            .unwrap()
            .normalize()
    }

    #[test]
    fn beta_inserts_behind_cheapest_anchor() {
        // Route [0, 2]; customer 1 sits next to 0, customer 3 next to 2.
        let inst = line_instance(4);
        let beta = build_beta(&[0, 2], &inst);
        let order = beta.order();
        // 1 inserts behind 0; 3 behind 2.
        assert_eq!(
            order,
            vec![Loc::Start, Loc::Cust(0), Loc::Cust(1), Loc::Cust(2), Loc::Cust(3), Loc::End]
        );
    }

    #[test]
    fn beta_empty_route_is_insertion_order() {
        let inst = line_instance(3);
        let beta = build_beta(&[], &inst);
        // All anchors are the depot, so customers append at the end in id order.
        assert_eq!(
            beta.order(),
            vec![Loc::Start, Loc::Cust(0), Loc::Cust(1), Loc::Cust(2), Loc::End]
        );
        assert!(beta.position(Loc::Start) < beta.position(Loc::Cust(0)));
        assert!(beta.position(Loc::Cust(2)) < beta.position(Loc::End));
    }

    #[test]
    fn beta_window_filters_arcs() {
        let inst = line_instance(3);
        let beta = build_beta(&[0, 1, 2], &inst);
        let ok = LAArcKey {
            first: Loc::Cust(0),
            last: Loc::Cust(2),
            intermediates: crate::instance::CustSet::singleton(1),
        };
        let bad = LAArcKey {
            first: Loc::Cust(2),
            last: Loc::Cust(0),
            intermediates: crate::instance::CustSet::EMPTY,
        };
        assert!(beta.arc_ok(&ok));
        assert!(!beta.arc_ok(&bad));
    }

    #[test]
    fn singleton_pools_cover_with_singleton_routes() {
        let inst = line_instance(3);
        let nbrs = crate::instance::compute_la_neighbors(&inst, 1);
        let arcs = ArcSet::enumerate(&inst, &nbrs);
        let table = FrontierTable::build(&inst, &arcs);
        let memo = ArcCostMemo::new();
        let mut rmp = GmRmp::init(&inst, &arcs);
        rmp.add_family(Vec::new(), &inst, &arcs);
        rmp.grow_edges(&inst, &arcs, &table, &memo);
        let sol = solve_gm_rmp(&rmp, &inst, &arcs, Backend::Simplex).unwrap();
        let expected: f64 = (0..3)
            .map(|u| (inst.cost(Loc::Start, Loc::Cust(u)) + inst.cost(Loc::Cust(u), Loc::End)) as f64)
            .sum();
        assert!((sol.objective - expected).abs() < 1e-6);
        assert!(sol.duals.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn absorbing_pooled_route_is_idempotent() {
        let inst = line_instance(3);
        let nbrs = crate::instance::compute_la_neighbors(&inst, 1);
        let arcs = ArcSet::enumerate(&inst, &nbrs);
        let mut rmp = GmRmp::init(&inst, &arcs);
        let before = (rmp.nodes.len(), rmp.arcs.len());
        // A singleton route reusing only pooled nodes/arcs.
        let entry = inst.tw_early(Loc::Cust(0)).min(inst.horizon - inst.travel(Loc::Start, Loc::Cust(0)));
        let res = PricingResult {
            customers: vec![Loc::Start, Loc::Cust(0), Loc::End],
            route: vec![0],
            reduced_cost: Rat::from_integer(0),
            lb: Rat::from_integer(0),
            eta: Rat::from_integer(0),
            exact: true,
            iterations: 1,
            path_nodes: vec![
                (Loc::Start, inst.vehicle_capacity, inst.horizon),
                (Loc::Cust(0), inst.vehicle_capacity, entry),
                (Loc::End, 0, 0),
            ],
            path_arcs: vec![rmp.arcs[0], rmp.arcs[1]],
            q: vec![0, 0, 1],
        };
        rmp.absorb_route(&res);
        assert_eq!((rmp.nodes.len(), rmp.arcs.len()), before);
    }

    #[test]
    fn gm_and_cg_match_enumeration_on_tiny_instance() {
        let inst = line_instance(4);
        let cfg = SolveConfig { la_neighbors: 2, backend: BackendKind::Simplex, ..SolveConfig::default() };
        let gm = run_gm(&inst, &cfg).unwrap();
        let cg = run_standard_cg(&inst, &cfg).unwrap();
        let oracle = enumeration_lp_objective(&inst, Backend::Simplex).unwrap();
        assert!(gm.converged, "gm converged");
        assert!(cg.converged, "cg converged");
        assert!((gm.lp_objective - oracle).abs() < 1e-6, "gm {} vs oracle {oracle}", gm.lp_objective);
        assert!((cg.lp_objective - oracle).abs() < 1e-6, "cg {} vs oracle {oracle}", cg.lp_objective);
        assert!(gm.gap.abs() < 1e-6);
        assert!(cg.gap.abs() < 1e-6);
    }
}
