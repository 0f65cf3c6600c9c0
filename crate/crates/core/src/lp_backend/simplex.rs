//! Dense two-phase revised simplex with an explicit basis inverse.
//!
//! Built for desk-scale models (up to a few hundred rows): exact vertex
//! solutions, duals from y = c_B B^-1, deterministic pivoting (Dantzig with
//! lowest-index ties, Bland fallback under prolonged degeneracy).

use super::{ConstraintOp, LinearModel, LpError, LpSolution, LpStatus};

const PIVOT_TOL: f64 = 1e-9;
const ENTER_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;
const REFACTOR_EVERY: usize = 128;
const MAX_ITERS: usize = 400_000;
const STALL_LIMIT: usize = 400;

struct Tableau {
    m: usize,
    /// Sparse columns: structural, then surplus, then artificial.
    cols: Vec<Vec<(usize, f64)>>,
    /// Phase-2 cost per column (artificials carry zero).
    cost2: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Row-major B^-1; row r tracks basis position r.
    binv: Vec<f64>,
    xb: Vec<f64>,
    rhs: Vec<f64>,
    art_start: usize,
}

impl Tableau {
    fn reduced_cost_against(&self, y: &[f64], j: usize, cj: f64) -> f64 {
        cj - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>()
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut w = vec![0.0; self.m];
        for (r, wr) in w.iter_mut().enumerate() {
            let row = &self.binv[r * self.m..(r + 1) * self.m];
            *wr = self.cols[j].iter().map(|&(i, a)| row[i] * a).sum();
        }
        w
    }

    fn dual_row(&self, cost_of: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (r, &bj) in self.basis.iter().enumerate() {
            let c = cost_of(bj);
            if c != 0.0 {
                for i in 0..self.m {
                    y[i] += c * self.binv[r * self.m + i];
                }
            }
        }
        y
    }

    fn pivot(&mut self, row: usize, j: usize, w: &[f64]) {
        let theta = (self.xb[row] / w[row]).max(0.0);
        for r in 0..self.m {
            if r != row {
                self.xb[r] -= theta * w[r];
                if self.xb[r] < 0.0 && self.xb[r] > -1e-9 {
                    self.xb[r] = 0.0;
                }
            }
        }
        self.xb[row] = theta;
        let m = self.m;
        let pivot = w[row];
        let prow: Vec<f64> = self.binv[row * m..(row + 1) * m].iter().map(|v| v / pivot).collect();
        for r in 0..m {
            if r == row {
                self.binv[r * m..(r + 1) * m].copy_from_slice(&prow);
            } else {
                let f = w[r];
                if f != 0.0 {
                    for i in 0..m {
                        self.binv[r * m + i] -= f * prow[i];
                    }
                }
            }
        }
        self.in_basis[self.basis[row]] = false;
        self.in_basis[j] = true;
        self.basis[row] = j;
    }

    /// Rebuild B^-1 from the basis columns by Gauss-Jordan on [B | I], then
    /// refresh the basic values from the original right-hand side.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let width = 2 * m;
        let mut aug = vec![0.0; m * width];
        for (r, &bj) in self.basis.iter().enumerate() {
            for &(i, a) in &self.cols[bj] {
                aug[i * width + r] = a;
            }
        }
        for i in 0..m {
            aug[i * width + m + i] = 1.0;
        }
        for col in 0..m {
            let piv_row = (col..m)
                .max_by(|&a, &b| {
                    aug[a * width + col].abs().partial_cmp(&aug[b * width + col].abs()).unwrap()
                })
                .unwrap();
            if aug[piv_row * width + col].abs() < 1e-12 {
                return Err(LpError::Solver("singular basis during refactorization".into()));
            }
            if piv_row != col {
                for c in 0..width {
                    aug.swap(piv_row * width + c, col * width + c);
                }
            }
            let piv = aug[col * width + col];
            for c in 0..width {
                aug[col * width + c] /= piv;
            }
            for r in 0..m {
                if r != col {
                    let f = aug[r * width + col];
                    if f != 0.0 {
                        for c in 0..width {
                            aug[r * width + c] -= f * aug[col * width + c];
                        }
                    }
                }
            }
        }
        for r in 0..m {
            for c in 0..m {
                self.binv[r * m + c] = aug[r * width + m + c];
            }
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            let v: f64 = row.iter().zip(&self.rhs).map(|(b, x)| b * x).sum();
            self.xb[r] = if v < 0.0 && v > -1e-9 { 0.0 } else { v };
        }
        Ok(())
    }
}

pub fn solve(model: &LinearModel) -> Result<LpSolution, LpError> {
    let n = model.num_vars();
    // Upper bounds become extra rows: x_j <= u  <=>  -x_j >= -u.
    let mut rows: Vec<(Vec<(usize, f64)>, ConstraintOp, f64)> =
        model.constraints.iter().map(|c| (c.coeffs.clone(), c.op, c.rhs)).collect();
    for (j, up) in model.upper.iter().enumerate() {
        if let Some(u) = up {
            rows.push((vec![(j, -1.0)], ConstraintOp::Ge, -*u));
        }
    }
    let m = rows.len();
    if m == 0 {
        if model.objective.iter().any(|&c| c < 0.0) {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective: f64::NEG_INFINITY,
                primal: vec![0.0; n],
                duals: vec![],
            });
        }
        return Ok(LpSolution { status: LpStatus::Optimal, objective: 0.0, primal: vec![0.0; n], duals: vec![] });
    }

    let n_surplus = rows.iter().filter(|r| r.1 == ConstraintOp::Ge).count();
    let total = n + n_surplus + m;
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); total];
    let mut sign = vec![1.0; m];
    let mut rhs = vec![0.0; m];
    let mut next_surplus = n;
    for (i, (coeffs, op, b)) in rows.iter().enumerate() {
        let s = if *b < 0.0 { -1.0 } else { 1.0 };
        sign[i] = s;
        rhs[i] = s * b;
        for &(j, a) in coeffs {
            cols[j].push((i, s * a));
        }
        if *op == ConstraintOp::Ge {
            cols[next_surplus].push((i, -s));
            next_surplus += 1;
        }
    }
    let art_start = n + n_surplus;
    for i in 0..m {
        cols[art_start + i].push((i, 1.0));
    }
    let mut cost2 = vec![0.0; total];
    cost2[..n].copy_from_slice(&model.objective);
    let mut binv = vec![0.0; m * m];
    for r in 0..m {
        binv[r * m + r] = 1.0;
    }
    let mut tab = Tableau {
        m,
        cols,
        cost2,
        basis: (0..m).map(|i| art_start + i).collect(),
        in_basis: (0..total).map(|j| j >= art_start).collect(),
        binv,
        xb: rhs.clone(),
        rhs,
        art_start,
    };

    if let PhaseOutcome::Unbounded = run_phase(&mut tab, true)? {
        return Err(LpError::Solver("phase-1 subproblem unbounded".into()));
    }
    let phase1_obj: f64 = tab
        .basis
        .iter()
        .zip(&tab.xb)
        .filter(|(&bj, _)| bj >= tab.art_start)
        .map(|(_, &v)| v)
        .sum();
    if phase1_obj > FEAS_TOL {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective: f64::INFINITY,
            primal: vec![0.0; n],
            duals: vec![0.0; model.constraints.len()],
        });
    }

    if let PhaseOutcome::Unbounded = run_phase(&mut tab, false)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            primal: vec![0.0; n],
            duals: vec![0.0; model.constraints.len()],
        });
    }

    let mut primal = vec![0.0; n];
    for (r, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            primal[bj] = tab.xb[r].max(0.0);
        }
    }
    let objective: f64 = model.objective.iter().zip(&primal).map(|(c, x)| c * x).sum();
    let cost2 = tab.cost2.clone();
    let y = tab.dual_row(|j| cost2[j]);
    let duals = (0..model.constraints.len()).map(|i| sign[i] * y[i]).collect();
    Ok(LpSolution { status: LpStatus::Optimal, objective, primal, duals })
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

fn run_phase(tab: &mut Tableau, phase_one: bool) -> Result<PhaseOutcome, LpError> {
    let art_start = tab.art_start;
    let candidate_end = if phase_one { tab.cols.len() } else { art_start };
    let cost2 = tab.cost2.clone();
    let cost_of = move |j: usize| -> f64 {
        if phase_one {
            if j >= art_start { 1.0 } else { 0.0 }
        } else {
            cost2[j]
        }
    };
    let mut bland = false;
    let mut stall = 0usize;
    let mut last_obj = f64::INFINITY;
    for iter in 0..MAX_ITERS {
        if iter % REFACTOR_EVERY == 0 && iter > 0 {
            tab.refactor()?;
        }
        let y = tab.dual_row(&cost_of);
        let mut entering: Option<(usize, f64)> = None;
        for j in 0..candidate_end {
            if tab.in_basis[j] {
                continue;
            }
            let d = tab.reduced_cost_against(&y, j, cost_of(j));
            if d < -ENTER_TOL {
                if bland {
                    entering = Some((j, d));
                    break;
                }
                match entering {
                    Some((_, best)) if best <= d => {}
                    _ => entering = Some((j, d)),
                }
            }
        }
        let Some((j, _)) = entering else {
            return Ok(PhaseOutcome::Optimal);
        };
        let w = tab.ftran(j);
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..tab.m {
            // A zero-valued basic artificial may leave on a pivot of either
            // sign; that keeps artificials from re-growing in phase 2.
            let art_kick = tab.basis[r] >= art_start && w[r].abs() > PIVOT_TOL && tab.xb[r] <= FEAS_TOL;
            if w[r] > PIVOT_TOL || art_kick {
                let ratio = if art_kick && w[r] < 0.0 { 0.0 } else { (tab.xb[r] / w[r]).max(0.0) };
                let better = match leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < lratio - 1e-12 || (ratio < lratio + 1e-12 && tab.basis[r] < tab.basis[lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((row, theta)) = leave else {
            return Ok(PhaseOutcome::Unbounded);
        };
        tab.pivot(row, j, &w);
        let obj: f64 = tab.basis.iter().zip(&tab.xb).map(|(&bj, &v)| cost_of(bj) * v).sum();
        if theta <= 1e-12 || obj > last_obj - 1e-12 {
            stall += 1;
            if stall > STALL_LIMIT {
                bland = true;
            }
        } else {
            stall = 0;
            bland = false;
        }
        last_obj = obj;
    }
    Err(LpError::Solver("simplex iteration limit exceeded".into()))
}
