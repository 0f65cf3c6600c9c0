//! Machine-readable run reports and the experiment sweep driver.

use crate::instance::Instance;
use crate::lp_backend::BackendKind;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Gm,
    Cg,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "gm" => Ok(Mode::Gm),
            "cg" => Ok(Mode::Cg),
            other => Err(format!("unknown mode '{other}' (expected gm|cg)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Gm => write!(f, "gm"),
            Mode::Cg => write!(f, "cg"),
        }
    }
}

/// Solver configuration; every knob has the documented default.
#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub mode: Mode,
    pub la_neighbors: usize,
    /// Early-termination tolerance for exact pricing (0 disables).
    pub alpha: f64,
    /// Reduced-cost convergence tolerance in scaled cost units.
    pub epsilon: f64,
    pub max_seconds: Option<f64>,
    pub prune: bool,
    pub backend: BackendKind,
    pub trace_path: Option<PathBuf>,
    /// Wall-clock budget for the ILP postprocessing pass.
    pub ilp_max_seconds: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            mode: Mode::Gm,
            la_neighbors: 6,
            alpha: 0.2,
            epsilon: 1e-6,
            max_seconds: None,
            prune: false,
            backend: BackendKind::Auto,
            trace_path: None,
            ilp_max_seconds: 120.0,
        }
    }
}

/// One run's metrics. Every field is present in every report; fields that do
/// not apply to a mode are null.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub instance: String,
    pub mode: Mode,
    pub la_neighbors: usize,
    pub backend: String,
    /// Outer/MP iterations (columns priced over all routes).
    pub mp_iterations: usize,
    /// GM inner iterations; null under standard CG.
    pub inner_iterations: Option<usize>,
    pub columns_generated: usize,
    pub preprocess_time_ms: f64,
    pub pricing_time_exact_ms: f64,
    /// Family pricing time; null under standard CG.
    pub pricing_time_family_ms: Option<f64>,
    pub rmp_lp_time_ms: f64,
    pub mp_loop_time_ms: f64,
    pub postprocess_ilp_time_ms: f64,
    pub total_time_ms: f64,
    pub lp_objective: f64,
    pub ilp_objective: f64,
    pub gap: f64,
    pub converged: bool,
    pub hit_time_limit: bool,
    /// True when an LP-tolerance stall cut a loop short.
    pub stalled: bool,
    pub cost_offset: i64,
    pub time_scale: i64,
    pub epsilon: f64,
    pub alpha: f64,
    /// Enumeration-LP objective when an oracle check was requested.
    pub oracle_objective: Option<f64>,
    /// Failure note for sweep rows that errored out.
    pub error: Option<String>,
}

impl RunReport {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn failed(instance: &str, mode: Mode, k: usize, msg: String) -> RunReport {
        RunReport {
            schema_version: Self::SCHEMA_VERSION,
            instance: instance.to_string(),
            mode,
            la_neighbors: k,
            backend: String::new(),
            mp_iterations: 0,
            inner_iterations: None,
            columns_generated: 0,
            preprocess_time_ms: 0.0,
            pricing_time_exact_ms: 0.0,
            pricing_time_family_ms: None,
            rmp_lp_time_ms: 0.0,
            mp_loop_time_ms: 0.0,
            postprocess_ilp_time_ms: 0.0,
            total_time_ms: 0.0,
            lp_objective: f64::NAN,
            ilp_objective: f64::NAN,
            gap: f64::NAN,
            converged: false,
            hit_time_limit: false,
            stalled: false,
            cost_offset: 0,
            time_scale: 0,
            epsilon: 0.0,
            alpha: 0.0,
            oracle_objective: None,
            error: Some(msg),
        }
    }

    pub const CSV_HEADER: &'static str = "schema_version,instance,mode,la_neighbors,backend,mp_iterations,inner_iterations,columns_generated,preprocess_time_ms,pricing_time_exact_ms,pricing_time_family_ms,rmp_lp_time_ms,mp_loop_time_ms,postprocess_ilp_time_ms,total_time_ms,lp_objective,ilp_objective,gap,converged,hit_time_limit,stalled,cost_offset,time_scale,epsilon,alpha,oracle_objective,error";

    pub fn csv_row(&self) -> String {
        fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.schema_version,
            self.instance,
            self.mode,
            self.la_neighbors,
            self.backend,
            self.mp_iterations,
            opt(&self.inner_iterations),
            self.columns_generated,
            self.preprocess_time_ms,
            self.pricing_time_exact_ms,
            opt(&self.pricing_time_family_ms),
            self.rmp_lp_time_ms,
            self.mp_loop_time_ms,
            self.postprocess_ilp_time_ms,
            self.total_time_ms,
            self.lp_objective,
            self.ilp_objective,
            self.gap,
            self.converged,
            self.hit_time_limit,
            self.stalled,
            self.cost_offset,
            self.time_scale,
            self.epsilon,
            self.alpha,
            opt(&self.oracle_objective),
            opt(&self.error).replace(',', ";"),
        )
    }
}

/// Run one instance under the configured mode.
pub fn run(inst: &Instance, cfg: &SolveConfig) -> Result<RunReport, crate::master::RunError> {
    match cfg.mode {
        Mode::Gm => crate::master::run_gm(inst, cfg),
        Mode::Cg => crate::master::run_standard_cg(inst, cfg),
    }
}

/// Cross-product experiment over instances, modes, and neighborhood sizes.
/// Per-run failures become rows with `error` set; the sweep continues.
pub fn sweep(
    instances: &[Instance],
    modes: &[Mode],
    k_list: &[usize],
    base: &SolveConfig,
    jobs: usize,
) -> Vec<RunReport> {
    let combos: Vec<(usize, Mode, usize)> = instances
        .iter()
        .enumerate()
        .flat_map(|(i, _)| {
            modes
                .iter()
                .flat_map(move |&m| k_list.iter().map(move |&k| (i, m, k)))
                .collect::<Vec<_>>()
        })
        .collect();
    let one = |&(i, mode, k): &(usize, Mode, usize)| -> RunReport {
        let inst = &instances[i];
        let cfg = SolveConfig { mode, la_neighbors: k, trace_path: None, ..base.clone() };
        match run(inst, &cfg) {
            Ok(report) => report,
            Err(e) => RunReport::failed(&inst.id, mode, k, e.to_string()),
        }
    };
    if jobs <= 1 {
        combos.iter().map(one).collect()
    } else {
        use rayon::prelude::*;
        combos.par_iter().map(one).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_row_has_header_arity() {
        let r = RunReport::failed("x", Mode::Cg, 0, "boom, boom".into());
        let header_fields = RunReport::CSV_HEADER.split(',').count();
        assert_eq!(r.csv_row().split(',').count(), header_fields);
    }
}
