//! Solver core for online maximization of monotone DR-submodular objectives
//! under linear packing constraints.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! pieces: the objective zoo with its curvature tools, per-step feasible-set
//! oracles, the designed penalty functions with the competitive-ratio
//! formulas, the online Frank-Wolfe engine, and the offline baselines used
//! to measure it. File formats, instance generators and the CLI live in the
//! `drsub-harness` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod error;
pub mod feasible;
pub mod lp;
pub mod math;
pub mod objective;
pub mod offline;
pub mod penalty;

pub use engine::{
    direction, evaluate_trace, run_online, ArrivalSource, DualPoint, EngineConfig, GuardedSource, OnlineInstance,
    OvershootPolicy, RunTrace, TraceEvaluation,
};
pub use error::{Error, Result};
pub use feasible::FeasibleSet;
pub use math::Matrix;
pub use objective::{
    CurvatureReport, DrCheck, DrObjective, LinearObjective, Multilinear, ObjectiveKind, QuadraticDr, SetFunctionTable,
};
pub use penalty::{BoundReport, PenaltyModel, Regime};
