//! LA-arcs and their time-parameterized costs.
//!
//! An LA-arc `p = (first, last, intermediates)` is traversed by some ordering
//! of its intermediate customers; which ordering is cheapest depends on the
//! departure time from `first` and the required departure time at `last`.
//! For every arc we keep the Pareto frontier of orderings over
//! (cost, latest feasible start tau2, no-wait start tau1), built bottom-up by
//! prepending the first customer to the frontiers of one-smaller sub-arcs.
//! Arc-cost queries then scan the frontier in cost order.

use crate::instance::{CustId, CustSet, Instance, Loc, NeighborSets, Scaled};
use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::sync::Arc as SArc;

pub type ArcId = usize;

/// Arc identity: first location u_p, last location v_p, intermediate set N_p.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize, PartialOrd, Ord)]
pub struct LAArcKey {
    pub first: Loc,
    pub last: Loc,
    pub intermediates: CustSet,
}

impl LAArcKey {
    pub fn level(&self) -> usize {
        self.intermediates.len()
    }

    /// Sub-arc obtained by promoting intermediate `w` to the first position.
    pub fn sub_arc(&self, w: CustId) -> LAArcKey {
        LAArcKey {
            first: Loc::Cust(w),
            last: self.last,
            intermediates: self.intermediates.remove(w),
        }
    }
}

/// One Pareto-optimal ordering r of an arc with its cost and time profile.
/// `latest_nowait` is tau1: the latest start (most remaining time) that
/// incurs no waiting; `latest_feasible` is tau2: the smallest remaining time
/// at which the ordering is still feasible.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FrontierEntry {
    pub ordering: Vec<Loc>,
    pub cost: Scaled,
    pub latest_nowait: Scaled,
    pub latest_feasible: Scaled,
}

impl FrontierEntry {
    /// Base case: the two-location path [first, last].
    pub fn base_pair(
        first: Loc,
        last: Loc,
        travel: Scaled,
        w_first: (Scaled, Scaled),
        w_last: (Scaled, Scaled),
    ) -> FrontierEntry {
        FrontierEntry {
            ordering: vec![first, last],
            cost: travel,
            latest_nowait: w_first.0.min(w_last.0 + travel),
            latest_feasible: w_first.1.max(w_last.1 + travel),
        }
    }

    /// Departure time at the ordering's last location when leaving its first
    /// location with `t` remaining; `None` when infeasible. Closed form of
    /// the no-unnecessary-waiting recursion.
    pub fn departure_time(&self, t: Scaled, tw_early_first: Scaled) -> Option<Scaled> {
        if t.min(tw_early_first) < self.latest_feasible {
            None
        } else {
            Some(-self.cost + t.min(self.latest_nowait))
        }
    }
}

/// Prepend `new_first` to an ordering, updating (cost, tau1, tau2).
pub fn extend_tau(
    entry: &FrontierEntry,
    new_first: Loc,
    travel: Scaled,
    w_first: (Scaled, Scaled),
) -> FrontierEntry {
    let mut ordering = Vec::with_capacity(entry.ordering.len() + 1);
    ordering.push(new_first);
    ordering.extend_from_slice(&entry.ordering);
    FrontierEntry {
        ordering,
        cost: travel + entry.cost,
        latest_nowait: w_first.0.min(entry.latest_nowait + travel),
        latest_feasible: w_first.1.max(entry.latest_feasible + travel),
    }
}

/// Lowest cost over `entries` (sorted cost-ascending) of an ordering that can
/// start no earlier than `t1` and depart the last location no later than
/// `t2`, both in remaining time. `None` when no ordering qualifies.
pub fn arc_cost_in(entries: &[FrontierEntry], t1: Scaled, t2: Scaled) -> Option<Scaled> {
    entries
        .iter()
        .find(|r| t1 >= r.latest_feasible && t2 <= -r.cost + t1.min(r.latest_nowait))
        .map(|r| r.cost)
}

fn arc_cost_entry_in(entries: &[FrontierEntry], t1: Scaled, t2: Scaled) -> Option<(Scaled, usize)> {
    entries
        .iter()
        .position(|r| t1 >= r.latest_feasible && t2 <= -r.cost + t1.min(r.latest_nowait))
        .map(|i| (entries[i].cost, i))
}

/// An arc of the master set P together with its serviced customers
/// (first plus intermediates; the last location is excluded) and demand d_p.
#[derive(Clone, Debug)]
pub struct LaArc {
    pub key: LAArcKey,
    pub serviced: CustSet,
    pub d_p: i64,
}

/// The enumerated arc set P: depot arcs (-1, u, {}) for every customer, and
/// (u, v, S) for every u, every S within u's LA-neighborhood that fits the
/// vehicle, and every v outside the neighborhood (customers or the end
/// depot). Enumeration order is deterministic.
pub struct ArcSet {
    pub arcs: Vec<LaArc>,
    by_pair: HashMap<(Loc, Loc), Vec<ArcId>>,
    by_first: HashMap<Loc, Vec<ArcId>>,
    targets: HashMap<Loc, Vec<Loc>>,
    pub k: usize,
}

impl ArcSet {
    pub fn enumerate(inst: &Instance, nbrs: &NeighborSets) -> ArcSet {
        let n = inst.n();
        let mut arcs = Vec::new();
        for u in 0..n {
            arcs.push(LaArc {
                key: LAArcKey {
                    first: Loc::Start,
                    last: Loc::Cust(u),
                    intermediates: CustSet::EMPTY,
                },
                serviced: CustSet::EMPTY,
                d_p: 0,
            });
        }
        for u in 0..n {
            let hood = nbrs.neighbor_set(u);
            let members: Vec<CustId> = nbrs.neighbors(u).to_vec();
            let targets: Vec<Loc> = (0..n)
                .filter(|&v| v != u && !hood.contains(v))
                .map(Loc::Cust)
                .chain([Loc::End])
                .collect();
            for mask in 0..(1u32 << members.len()) {
                let mut inter = CustSet::EMPTY;
                for (bit, &w) in members.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        inter = inter.insert(w);
                    }
                }
                let serviced = inter.insert(u);
                let d_p: i64 = serviced.iter().map(|w| inst.customers[w].demand).sum();
                if d_p > inst.vehicle_capacity {
                    continue;
                }
                for &v in &targets {
                    arcs.push(LaArc {
                        key: LAArcKey {
                            first: Loc::Cust(u),
                            last: v,
                            intermediates: inter,
                        },
                        serviced,
                        d_p,
                    });
                }
            }
        }
        let mut by_pair: HashMap<(Loc, Loc), Vec<ArcId>> = HashMap::new();
        let mut by_first: HashMap<Loc, Vec<ArcId>> = HashMap::new();
        for (id, arc) in arcs.iter().enumerate() {
            by_pair.entry((arc.key.first, arc.key.last)).or_default().push(id);
            by_first.entry(arc.key.first).or_default().push(id);
        }
        let mut targets: HashMap<Loc, Vec<Loc>> = HashMap::new();
        let mut pairs: Vec<(Loc, Loc)> = by_pair.keys().copied().collect();
        pairs.sort();
        for (a, b) in pairs {
            targets.entry(a).or_default().push(b);
        }
        ArcSet { arcs, by_pair, by_first, targets, k: nbrs.k }
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn between(&self, a: Loc, b: Loc) -> &[ArcId] {
        self.by_pair.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn arcs_from(&self, a: Loc) -> &[ArcId] {
        self.by_first.get(&a).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Distinct arc destinations reachable from a first location.
    pub fn targets_from(&self, a: Loc) -> &[Loc] {
        self.targets.get(&a).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Frontier table over all arcs reachable from P by repeatedly promoting an
/// intermediate to the front (the extended index the bottom-up construction
/// runs over). Eager mode materializes everything level by level up front;
/// lazy mode fills on demand and is the guard rail for large neighborhoods.
pub struct FrontierTable {
    map: DashMap<LAArcKey, SArc<Vec<FrontierEntry>>>,
    /// Arc cost at the widest query (t1 = tw_early(first), t2 = tw_late(last)),
    /// aligned with the ArcSet; used by the eta computation.
    widest: Vec<Option<Scaled>>,
}

const EAGER_K_LIMIT: usize = 8;

impl FrontierTable {
    /// Build frontiers for the arc set; eager for small neighborhoods, lazy
    /// beyond `EAGER_K_LIMIT` unless forced.
    pub fn build(inst: &Instance, arcs: &ArcSet) -> FrontierTable {
        Self::build_with_mode(inst, arcs, arcs.k > EAGER_K_LIMIT)
    }

    pub fn build_with_mode(inst: &Instance, arcs: &ArcSet, lazy: bool) -> FrontierTable {
        let table = FrontierTable { map: DashMap::new(), widest: Vec::new() };
        if !lazy {
            // Downward closure of P under the sub-arc operation, grouped by
            // level; level m entries depend only on level m-1.
            let mut seen: HashMap<LAArcKey, ()> = HashMap::new();
            let mut todo: Vec<LAArcKey> = arcs.arcs.iter().map(|a| a.key).collect();
            while let Some(key) = todo.pop() {
                if seen.insert(key, ()).is_some() {
                    continue;
                }
                for w in key.intermediates.iter() {
                    todo.push(key.sub_arc(w));
                }
            }
            let max_level = seen.keys().map(|k| k.level()).max().unwrap_or(0);
            let mut levels: Vec<Vec<LAArcKey>> = vec![Vec::new(); max_level + 1];
            for key in seen.keys() {
                levels[key.level()].push(*key);
            }
            for level in levels {
                level.par_iter().for_each(|key| {
                    let entries = table.compute_one(inst, key);
                    table.map.insert(*key, SArc::new(entries));
                });
            }
        }
        let mut table = table;
        table.widest = arcs
            .arcs
            .iter()
            .map(|a| {
                let f = table.frontier(inst, &a.key);
                arc_cost_in(&f, inst.tw_early(a.key.first), inst.tw_late(a.key.last))
            })
            .collect();
        table
    }

    /// One frontier from its sub-frontiers, per the bottom-up recurrence:
    /// prepend `first` to every Pareto ordering of every sub-arc, keep the
    /// feasible ones, then strip dominated entries.
    fn compute_one(&self, inst: &Instance, key: &LAArcKey) -> Vec<FrontierEntry> {
        let w_first = inst.window(key.first);
        if key.level() == 0 {
            let entry = FrontierEntry::base_pair(
                key.first,
                key.last,
                inst.travel(key.first, key.last),
                w_first,
                inst.window(key.last),
            );
            if entry.latest_feasible <= w_first.0 {
                return vec![entry];
            }
            return Vec::new();
        }
        let mut cands = Vec::new();
        for w in key.intermediates.iter() {
            let sub = self.frontier(inst, &key.sub_arc(w));
            let travel = inst.travel(key.first, Loc::Cust(w));
            for prev in sub.iter() {
                let entry = extend_tau(prev, key.first, travel, w_first);
                if entry.latest_feasible <= w_first.0 {
                    cands.push(entry);
                }
            }
        }
        pareto_filter(cands)
    }

    /// Frontier for an arc, computing (and caching) it on demand if the eager
    /// pass did not cover it.
    pub fn frontier(&self, inst: &Instance, key: &LAArcKey) -> SArc<Vec<FrontierEntry>> {
        if let Some(f) = self.map.get(key) {
            return f.clone();
        }
        let entries = SArc::new(self.compute_one(inst, key));
        self.map.entry(*key).or_insert(entries).clone()
    }

    pub fn arc_cost(&self, inst: &Instance, key: &LAArcKey, t1: Scaled, t2: Scaled) -> Option<Scaled> {
        arc_cost_in(&self.frontier(inst, key), t1, t2)
    }

    /// Like `arc_cost` but also yields the index of the chosen ordering.
    pub fn arc_cost_entry(
        &self,
        inst: &Instance,
        key: &LAArcKey,
        t1: Scaled,
        t2: Scaled,
    ) -> Option<(Scaled, usize)> {
        arc_cost_entry_in(&self.frontier(inst, key), t1, t2)
    }

    pub fn ordering(&self, inst: &Instance, key: &LAArcKey, entry: usize) -> Vec<Loc> {
        self.frontier(inst, key)[entry].ordering.clone()
    }

    /// c_p at the widest time query, None when the frontier is empty.
    pub fn widest_cost(&self, arc: ArcId) -> Option<Scaled> {
        self.widest[arc]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Keep one entry per identical (cost, tau1, tau2) triple (lexicographically
/// smallest ordering), then drop every entry dominated under the three-way
/// rule: c_r >= c_s, tau_r2 >= tau_s2 and tau_r1 - c_r <= tau_s1 - c_s with
/// at least one strict. Survivors are sorted by cost ascending.
pub fn pareto_filter(mut cands: Vec<FrontierEntry>) -> Vec<FrontierEntry> {
    cands.sort_by(|a, b| {
        (a.cost, a.latest_feasible, -a.latest_nowait, &a.ordering).cmp(&(
            b.cost,
            b.latest_feasible,
            -b.latest_nowait,
            &b.ordering,
        ))
    });
    cands.dedup_by(|a, b| {
        a.cost == b.cost && a.latest_nowait == b.latest_nowait && a.latest_feasible == b.latest_feasible
    });
    let keep: Vec<bool> = cands
        .iter()
        .map(|r| {
            !cands.iter().any(|s| {
                !std::ptr::eq(r, s)
                    && r.cost >= s.cost
                    && r.latest_feasible >= s.latest_feasible
                    && r.latest_nowait - r.cost <= s.latest_nowait - s.cost
            })
        })
        .collect();
    cands
        .into_iter()
        .zip(keep)
        .filter_map(|(r, k)| k.then_some(r))
        .collect()
}

/// Cache identity for a persisted frontier table.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FrontierCacheKey {
    pub instance_hash: String,
    pub k: usize,
    pub time_scale: i64,
}

impl FrontierCacheKey {
    pub fn new(inst: &Instance, k: usize) -> FrontierCacheKey {
        let json = inst.to_json_string().expect("instance serializes");
        let mut h = Sha256::new();
        h.update(json.as_bytes());
        FrontierCacheKey {
            instance_hash: format!("{:x}", h.finalize()),
            k,
            time_scale: inst.time_scale,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    key: FrontierCacheKey,
    entries: Vec<(LAArcKey, Vec<FrontierEntry>)>,
    widest: Vec<Option<Scaled>>,
}

impl FrontierTable {
    pub fn save_cache(&self, key: &FrontierCacheKey, path: &std::path::Path) -> std::io::Result<()> {
        let mut entries: Vec<(LAArcKey, Vec<FrontierEntry>)> = self
            .map
            .iter()
            .map(|kv| (*kv.key(), kv.value().as_ref().clone()))
            .collect();
        entries.sort_by_key(|(k, _)| *k);
        let file = CacheFile { key: key.clone(), entries, widest: self.widest.clone() };
        std::fs::write(path, serde_json::to_vec(&file)?)
    }

    /// Load a cached table; `None` when the file is missing or keyed for a
    /// different (instance, k, time_scale).
    pub fn load_cache(key: &FrontierCacheKey, path: &std::path::Path) -> Option<FrontierTable> {
        let bytes = std::fs::read(path).ok()?;
        let file: CacheFile = serde_json::from_slice(&bytes).ok()?;
        if &file.key != key {
            return None;
        }
        let map = DashMap::new();
        for (k, v) in file.entries {
            map.insert(k, SArc::new(v));
        }
        Some(FrontierTable { map, widest: file.widest })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;

    // Windows from the two-customer worked example: u = (100, 40),
    // v = (80, 20), travel 15.
    fn base_entry() -> FrontierEntry {
        FrontierEntry::base_pair(Loc::Cust(0), Loc::Cust(1), 15, (100, 40), (80, 20))
    }

    #[test]
    fn base_pair_taus() {
        let e = base_entry();
        assert_eq!(e.cost, 15);
        assert_eq!(e.latest_nowait, 95);
        assert_eq!(e.latest_feasible, 40);
    }

    #[test]
    fn extend_tau_prepends() {
        let e = extend_tau(&base_entry(), Loc::Cust(2), 10, (120, 0));
        assert_eq!(e.cost, 25);
        assert_eq!(e.latest_nowait, 105);
        assert_eq!(e.latest_feasible, 50);
        assert_eq!(e.ordering, vec![Loc::Cust(2), Loc::Cust(0), Loc::Cust(1)]);
    }

    #[test]
    fn departure_time_closed_form() {
        let e = base_entry();
        assert_eq!(e.departure_time(50, 100), Some(35));
        assert_eq!(e.departure_time(120, 100), Some(-15 + 95));
        assert_eq!(e.departure_time(39, 100), None);
    }

    #[test]
    fn infeasible_prepend_is_rejected_by_build_gate() {
        // tau2 of the extension exceeds the new first's tw_early.
        let e = extend_tau(&base_entry(), Loc::Cust(2), 10, (45, 0));
        assert!(e.latest_feasible > 45);
    }

    #[test]
    fn arc_cost_widest_and_unachievable() {
        let entries = vec![base_entry()];
        assert_eq!(arc_cost_in(&entries, 100, 20), Some(15));
        // t2 beyond any achievable departure.
        assert_eq!(arc_cost_in(&entries, 100, 81), None);
    }

    #[test]
    fn arc_cost_skips_cheap_entry_failing_t2() {
        let cheap = FrontierEntry {
            ordering: vec![Loc::Cust(0), Loc::Cust(1)],
            cost: 10,
            latest_nowait: 50,
            latest_feasible: 0,
        };
        let dear = FrontierEntry {
            ordering: vec![Loc::Cust(0), Loc::Cust(2), Loc::Cust(1)],
            cost: 30,
            latest_nowait: 90,
            latest_feasible: 0,
        };
        let entries = vec![cheap, dear];
        // At t1 = 90, cheap departs at 40 < 45 but dear departs at 60.
        assert_eq!(arc_cost_in(&entries, 90, 45), Some(30));
        assert_eq!(arc_cost_in(&entries, 90, 30), Some(10));
    }

    #[test]
    fn pareto_keeps_one_of_identical_triples() {
        let a = FrontierEntry {
            ordering: vec![Loc::Cust(0), Loc::Cust(2), Loc::Cust(1)],
            cost: 10,
            latest_nowait: 50,
            latest_feasible: 5,
        };
        let mut b = a.clone();
        b.ordering = vec![Loc::Cust(0), Loc::Cust(3), Loc::Cust(1)];
        let out = pareto_filter(vec![b.clone(), a.clone()]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].ordering, a.ordering);
    }

    #[test]
    fn pareto_drops_dominated() {
        let good = FrontierEntry {
            ordering: vec![Loc::Cust(0), Loc::Cust(1)],
            cost: 10,
            latest_nowait: 50,
            latest_feasible: 5,
        };
        let bad = FrontierEntry {
            ordering: vec![Loc::Cust(0), Loc::Cust(2), Loc::Cust(1)],
            cost: 12,
            latest_nowait: 50,
            latest_feasible: 6,
        };
        let out = pareto_filter(vec![bad, good.clone()]);
        assert_eq!(out, vec![good]);
    }

    fn small_instance() -> Instance {
        Instance::from_raw(
            "five",
            100,
            300.0,
            &[(0.0, 0.0), (10.0, 0.0), (12.0, 5.0), (8.0, 9.0), (20.0, 20.0), (25.0, 3.0)],
            &[0, 10, 10, 10, 10, 10],
            &[0.0, 0.0, 20.0, 0.0, 50.0, 0.0],
            &[300.0, 250.0, 200.0, 260.0, 220.0, 240.0],
            &[0.0, 10.0, 10.0, 10.0, 10.0, 10.0],
            10,
        )
        .unwrap()
        .normalize()
    }

    #[test]
    fn build_levels_zero_and_one() {
        let inst = small_instance();
        let nbrs = crate::instance::compute_la_neighbors(&inst, 2);
        let arcs = ArcSet::enumerate(&inst, &nbrs);
        let table = FrontierTable::build(&inst, &arcs);
        for arc in &arcs.arcs {
            let f = table.frontier(&inst, &arc.key);
            match arc.key.level() {
                0 => assert!(f.len() <= 1),
                1 => assert!(f.len() <= 1),
                _ => {}
            }
            for e in f.iter() {
                assert_eq!(e.ordering.first().copied(), Some(arc.key.first));
                assert_eq!(e.ordering.last().copied(), Some(arc.key.last));
                assert_eq!(e.ordering.len(), arc.key.level() + 2);
            }
            // Sorted by cost ascending.
            assert!(f.windows(2).all(|w| w[0].cost <= w[1].cost));
        }
    }

    #[test]
    fn eager_and_lazy_agree() {
        let inst = small_instance();
        let nbrs = crate::instance::compute_la_neighbors(&inst, 2);
        let arcs = ArcSet::enumerate(&inst, &nbrs);
        let eager = FrontierTable::build_with_mode(&inst, &arcs, false);
        let lazy = FrontierTable::build_with_mode(&inst, &arcs, true);
        for arc in &arcs.arcs {
            assert_eq!(
                *eager.frontier(&inst, &arc.key),
                *lazy.frontier(&inst, &arc.key),
                "arc {:?}",
                arc.key
            );
        }
        assert_eq!(eager.widest, lazy.widest);
    }

    #[test]
    fn cache_round_trip() {
        let inst = small_instance();
        let nbrs = crate::instance::compute_la_neighbors(&inst, 2);
        let arcs = ArcSet::enumerate(&inst, &nbrs);
        let table = FrontierTable::build(&inst, &arcs);
        let key = FrontierCacheKey::new(&inst, 2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frontiers.json");
        table.save_cache(&key, &path).unwrap();
        let loaded = FrontierTable::load_cache(&key, &path).unwrap();
        for arc in &arcs.arcs {
            assert_eq!(*table.frontier(&inst, &arc.key), *loaded.frontier(&inst, &arc.key));
        }
        // A different parameterization misses.
        let other = FrontierCacheKey::new(&inst, 3);
        assert!(FrontierTable::load_cache(&other, &path).is_none());
    }
}
