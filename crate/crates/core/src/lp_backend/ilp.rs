//! Branch-and-bound on top of any LP backend. Best-bound search, most
//! fractional branching, deterministic tie-breaks; honors a wall-clock limit
//! by returning the incumbent plus the best open bound.

use super::{Backend, Deadline, LinearModel, LpError, LpStatus};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Duration;

const INT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IlpStatus {
    Optimal,
    /// Search hit the time limit; `objective` is the incumbent, `bound` the
    /// best open relaxation value.
    TimeLimit,
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct IlpSolution {
    pub status: IlpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub bound: f64,
    pub nodes: usize,
}

#[derive(Clone)]
struct Node {
    bound: f64,
    id: usize,
    /// (variable, is_upper, value): x_j <= value or x_j >= value.
    fixes: Vec<(usize, bool, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for Node {}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert so the smallest bound pops first.
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then(other.id.cmp(&self.id))
    }
}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn solve_ilp(backend: Backend, model: &LinearModel, limit: Duration) -> Result<IlpSolution, LpError> {
    let deadline = Deadline::new(Some(limit));
    let objective_integral = model
        .objective
        .iter()
        .zip(&model.integer)
        .all(|(c, &int)| !int || c.fract() == 0.0);

    let mut heap = BinaryHeap::new();
    heap.push(Node { bound: f64::NEG_INFINITY, id: 0, fixes: Vec::new() });
    let mut next_id = 1usize;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0usize;
    let mut any_feasible_lp = false;

    while let Some(node) = heap.pop() {
        if let Some((inc, _)) = &incumbent {
            if node.bound >= inc - 1e-9 {
                continue;
            }
        }
        if deadline.exceeded() {
            heap.push(node);
            break;
        }
        nodes += 1;
        let mut sub = model.clone();
        sub.warm_start = None;
        for &(j, is_upper, v) in &node.fixes {
            if is_upper {
                sub.upper[j] = Some(match sub.upper[j] {
                    Some(u) => u.min(v),
                    None => v,
                });
            } else {
                // x_j >= v as a plain row.
                sub.add_ge(vec![(j, 1.0)], v);
            }
        }
        let sol = backend.solve_lp(&sub)?;
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Err(LpError::Solver("ILP relaxation unbounded".into()));
            }
            LpStatus::Optimal => {}
        }
        any_feasible_lp = true;
        let mut bound = sol.objective;
        if objective_integral && model.integer.iter().all(|&b| b) {
            bound = (bound - 1e-6).ceil();
        }
        if let Some((inc, _)) = &incumbent {
            if bound >= inc - 1e-9 {
                continue;
            }
        }
        // Most fractional integer variable, lowest index on ties.
        let mut branch: Option<(usize, f64, f64)> = None;
        for (j, &is_int) in model.integer.iter().enumerate() {
            if !is_int {
                continue;
            }
            let x = sol.primal[j];
            let frac = (x - x.round()).abs();
            if frac > INT_TOL {
                let score = (x - x.floor() - 0.5).abs();
                match branch {
                    Some((_, best, _)) if best <= score => {}
                    _ => branch = Some((j, score, x)),
                }
            }
        }
        match branch {
            None => {
                let better = incumbent.as_ref().map_or(true, |(inc, _)| sol.objective < inc - 1e-9);
                if better {
                    incumbent = Some((sol.objective, sol.primal.clone()));
                }
            }
            Some((j, _, x)) => {
                let mut left = node.fixes.clone();
                left.push((j, true, x.floor()));
                heap.push(Node { bound, id: next_id, fixes: left });
                next_id += 1;
                let mut right = node.fixes;
                right.push((j, false, x.ceil()));
                heap.push(Node { bound, id: next_id, fixes: right });
                next_id += 1;
            }
        }
    }

    let open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    match incumbent {
        Some((obj, primal)) => {
            let timed_out = !heap.is_empty()
                && heap.iter().any(|n| n.bound < obj - 1e-9)
                && deadline.exceeded();
            Ok(IlpSolution {
                status: if timed_out { IlpStatus::TimeLimit } else { IlpStatus::Optimal },
                objective: obj,
                bound: if timed_out { open_bound.min(obj) } else { obj },
                primal,
                nodes,
            })
        }
        None => {
            if deadline.exceeded() && !heap.is_empty() {
                Ok(IlpSolution {
                    status: IlpStatus::TimeLimit,
                    objective: f64::INFINITY,
                    bound: open_bound,
                    primal: vec![0.0; model.num_vars()],
                    nodes,
                })
            } else {
                debug_assert!(!any_feasible_lp || nodes > 0);
                Ok(IlpSolution {
                    status: IlpStatus::Infeasible,
                    objective: f64::INFINITY,
                    bound: f64::INFINITY,
                    primal: vec![0.0; model.num_vars()],
                    nodes,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limit() -> Duration {
        Duration::from_secs(30)
    }

    #[test]
    fn integral_lp_optimum_is_returned_unchanged() {
        for backend in [Backend::Simplex, Backend::Clarabel] {
            let mut m = LinearModel::new(2);
            m.objective = vec![2.0, 3.0];
            m.integer = vec![true, true];
            m.add_ge(vec![(0, 1.0)], 1.0);
            m.add_ge(vec![(1, 1.0)], 1.0);
            let lp = backend.solve_lp(&m).unwrap();
            let ilp = backend.solve_ilp(&m, limit()).unwrap();
            assert_eq!(ilp.status, IlpStatus::Optimal);
            assert!((ilp.objective - lp.objective).abs() < 1e-6);
        }
    }

    #[test]
    fn fractional_vertex_rounds_up() {
        // Pairwise cover forcing x = (1/2, 1/2, 1/2) at the LP optimum;
        // any integer cover costs 2.
        for backend in [Backend::Simplex, Backend::Clarabel] {
            let mut m = LinearModel::new(3);
            m.objective = vec![1.0, 1.0, 1.0];
            m.integer = vec![true, true, true];
            m.add_ge(vec![(0, 1.0), (1, 1.0)], 1.0);
            m.add_ge(vec![(1, 1.0), (2, 1.0)], 1.0);
            m.add_ge(vec![(0, 1.0), (2, 1.0)], 1.0);
            let lp = backend.solve_lp(&m).unwrap();
            assert!((lp.objective - 1.5).abs() < 1e-6);
            let ilp = backend.solve_ilp(&m, limit()).unwrap();
            assert_eq!(ilp.status, IlpStatus::Optimal);
            assert!((ilp.objective - 2.0).abs() < 1e-6);
            assert!(ilp.objective >= lp.objective - 1e-9);
        }
    }

    #[test]
    fn set_partition_toy_picks_three_routes() {
        // Four customers; columns: {0,1}, {2,3}, {0}, {1}, {2}, {3}, {0,1,2,3}
        // with costs making {0,1} + {2} + {3} the unique optimum of 3 + eps
        // structure: cost({0,1}) = 1, singles = 1 each, big = 10, {2,3} = 3.
        let mut m = LinearModel::new(7);
        m.objective = vec![1.0, 3.0, 1.0, 1.0, 1.0, 1.0, 10.0];
        m.integer = vec![true; 7];
        let cover: [&[usize]; 7] = [&[0, 1], &[2, 3], &[0], &[1], &[2], &[3], &[0, 1, 2, 3]];
        for u in 0..4 {
            let coeffs: Vec<(usize, f64)> = cover
                .iter()
                .enumerate()
                .filter(|(_, c)| c.contains(&u))
                .map(|(j, _)| (j, 1.0))
                .collect();
            m.add_ge(coeffs, 1.0);
        }
        let ilp = Backend::Simplex.solve_ilp(&m, limit()).unwrap();
        assert_eq!(ilp.status, IlpStatus::Optimal);
        assert!((ilp.objective - 3.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_ilp_reports_infeasible() {
        let mut m = LinearModel::new(1);
        m.objective = vec![1.0];
        m.integer = vec![true];
        m.upper[0] = Some(1.0);
        m.add_ge(vec![(0, 1.0)], 2.0);
        let ilp = Backend::Simplex.solve_ilp(&m, limit()).unwrap();
        assert_eq!(ilp.status, IlpStatus::Infeasible);
    }
}
