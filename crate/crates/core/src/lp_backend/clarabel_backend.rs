//! Clarabel adapter: sparse interior-point LP solves for the larger
//! graph-master RMPs. Rows are laid out as [equalities | >= rows | variable
//! bounds]; duals map back to the model's constraint order.

use super::{ConstraintOp, LinearModel, LpError, LpSolution, LpStatus};
use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, SolverStatus, SupportedConeT,
    ZeroConeT,
};

pub fn solve(model: &LinearModel) -> Result<LpSolution, LpError> {
    let n = model.num_vars();
    let eq_rows: Vec<usize> = (0..model.constraints.len())
        .filter(|&i| model.constraints[i].op == ConstraintOp::Eq)
        .collect();
    let ge_rows: Vec<usize> = (0..model.constraints.len())
        .filter(|&i| model.constraints[i].op == ConstraintOp::Ge)
        .collect();
    let bounded: Vec<usize> = (0..n).filter(|&j| model.upper[j].is_some()).collect();
    let m_total = eq_rows.len() + ge_rows.len() + n + bounded.len();

    // Triplets in row-major order. Equalities enter as a'x = b; >= rows are
    // negated (-a'x + s = -b, s >= 0); x >= 0 rows are -x + s = 0; upper
    // bounds are x + s = u.
    let mut rows_cols_vals: Vec<(usize, usize, f64)> = Vec::new();
    let mut b = Vec::with_capacity(m_total);
    let mut row = 0usize;
    for &i in &eq_rows {
        for &(j, a) in &model.constraints[i].coeffs {
            rows_cols_vals.push((row, j, a));
        }
        b.push(model.constraints[i].rhs);
        row += 1;
    }
    for &i in &ge_rows {
        for &(j, a) in &model.constraints[i].coeffs {
            rows_cols_vals.push((row, j, -a));
        }
        b.push(-model.constraints[i].rhs);
        row += 1;
    }
    for j in 0..n {
        rows_cols_vals.push((row, j, -1.0));
        b.push(0.0);
        row += 1;
    }
    for &j in &bounded {
        rows_cols_vals.push((row, j, 1.0));
        b.push(model.upper[j].unwrap());
        row += 1;
    }
    debug_assert_eq!(row, m_total);

    let a = csc_from_triplets(m_total, n, &mut rows_cols_vals);
    let p = CscMatrix::<f64>::zeros((n, n));
    let cones: Vec<SupportedConeT<f64>> = vec![
        ZeroConeT(eq_rows.len()),
        NonnegativeConeT(m_total - eq_rows.len()),
    ];
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-11)
        .tol_gap_rel(1e-11)
        .tol_feas(1e-10)
        .max_iter(500u32)
        .build()
        .map_err(|e| LpError::Solver(format!("settings: {e:?}")))?;
    let mut solver = DefaultSolver::new(&p, &model.objective, &a, &b, &cones, settings)
        .map_err(|e| LpError::Solver(format!("setup: {e:?}")))?;
    solver.solve();
    let sol = &solver.solution;
    let status = match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => LpStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => LpStatus::Infeasible,
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => LpStatus::Unbounded,
        other => return Err(LpError::Solver(format!("clarabel status {other:?}"))),
    };
    if status != LpStatus::Optimal {
        return Ok(LpSolution {
            status,
            objective: if status == LpStatus::Infeasible { f64::INFINITY } else { f64::NEG_INFINITY },
            primal: vec![0.0; n],
            duals: vec![0.0; model.constraints.len()],
        });
    }
    let primal: Vec<f64> = sol.x.iter().map(|&x| if x < 0.0 && x > -1e-9 { 0.0 } else { x }).collect();
    let objective: f64 = model.objective.iter().zip(&primal).map(|(c, x)| c * x).sum();
    // Duals: for a'x = b rows the multiplier is -z; for the negated >= rows
    // it is +z (and nonnegative).
    let mut duals = vec![0.0; model.constraints.len()];
    for (pos, &i) in eq_rows.iter().enumerate() {
        duals[i] = -sol.z[pos];
    }
    for (pos, &i) in ge_rows.iter().enumerate() {
        duals[i] = sol.z[eq_rows.len() + pos];
    }
    Ok(LpSolution { status, objective, primal, duals })
}

fn csc_from_triplets(m: usize, n: usize, trips: &mut Vec<(usize, usize, f64)>) -> CscMatrix<f64> {
    trips.sort_by_key(|&(r, c, _)| (c, r));
    let mut colptr = vec![0usize; n + 1];
    let mut rowval = Vec::with_capacity(trips.len());
    let mut nzval = Vec::with_capacity(trips.len());
    for &(r, c, v) in trips.iter() {
        colptr[c + 1] += 1;
        rowval.push(r);
        nzval.push(v);
    }
    for c in 0..n {
        colptr[c + 1] += colptr[c];
    }
    CscMatrix::new(m, n, colptr, rowval, nzval)
}
