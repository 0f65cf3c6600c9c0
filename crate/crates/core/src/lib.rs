//! Column generation solver for the capacitated vehicle routing problem with
//! time windows (CVRPTW), built around local-area (LA) arc pricing and
//! graph-master (GM) stabilization of the restricted master problem.
//!
//! All times are integers on a scaled grid and follow the *remaining-time*
//! convention: clocks count down from the horizon `t_0`, so "earlier" means
//! more time remaining and every customer window satisfies
//! `tw_early >= tw_late`.

pub mod gen;
pub mod instance;
pub mod la_frontier;
pub mod lp_backend;
pub mod master;
pub mod pricing;
pub mod report;

mod numeric;

pub use instance::{CustId, CustSet, Instance, InstanceError, Loc, NeighborSets};
pub use la_frontier::{ArcId, ArcSet, FrontierEntry, FrontierTable, LAArcKey};
pub use lp_backend::{Backend, BackendKind, LinearModel, LpSolution, LpStatus};
pub use master::{Beta, Family, GmRmp, MasterSolution};
pub use numeric::{rat_to_f64, rationalize, Rat};
pub use pricing::{Duals, NodeCache, PriceMode, PricingResult, RelaxedNode};
pub use report::{Mode, RunReport, SolveConfig};
