//! Forward-auction winner determination.
//!
//! The model keeps one accept/reject decision and one arrival night per bid;
//! the nightly occupancy variables of the full formulation are implied by the
//! arrival, so solvers only search over [`ModelBid::arrivals`]. Real-room
//! coupling of virtual room types is enforced directly as a per-group, per-night
//! capacity. [`export_lp`] writes the full formulation, including the nightly
//! variables, for external MILP solvers.

mod bench;
mod brute;
mod check;
mod exact;
mod flow;
mod lagrange;
mod heuristic;
mod lp;
mod model;
pub mod random;

pub use bench::{run_benchmark, BenchRow, SolverKind};
pub use brute::{brute_force, brute_force_with_cap, DEFAULT_ENUMERATION_CAP};
pub use check::{validate_solution, validate_stays, SolutionViolation, Stay};
pub use exact::solve_exact;
pub use heuristic::{solve_fcfs, solve_greedy};
pub use lp::export_lp;
pub use model::{build_model, ForwardModel, ModelBid};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::auction::CustomerId;
use crate::money::Money;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// Total room revenue.
    #[default]
    Income,
    /// Revenue minus per-night operating cost of every sold room.
    Profit,
}

impl fmt::Display for ObjectiveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveMode::Income => "income",
            ObjectiveMode::Profit => "profit",
        })
    }
}

impl FromStr for ObjectiveMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "income" => Ok(ObjectiveMode::Income),
            "profit" => Ok(ObjectiveMode::Profit),
            other => Err(format!("unknown objective {other:?} (expected income|profit)")),
        }
    }
}

/// Accepted bids with their arrival nights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClearingSolution {
    pub accepted: BTreeMap<CustomerId, u32>,
    pub objective: Money,
    pub objective_mode: ObjectiveMode,
}

impl ClearingSolution {
    pub fn empty(mode: ObjectiveMode) -> Self {
        ClearingSolution {
            accepted: BTreeMap::new(),
            objective: Money::ZERO,
            objective_mode: mode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveLimits {
    #[serde(with = "duration_millis")]
    pub time_budget: Duration,
    pub node_budget: Option<u64>,
    /// Relative optimality gap at which the search may stop.
    pub gap_tolerance: f64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            time_budget: Duration::from_secs(30),
            node_budget: None,
            gap_tolerance: 0.0,
        }
    }
}

impl SolveLimits {
    pub fn with_time_budget(mut self, budget: Duration) -> Self {
        self.time_budget = budget;
        self
    }

    pub(crate) fn tolerance_cents(&self, objective: i64) -> i64 {
        (self.gap_tolerance * objective.abs().max(100) as f64).floor() as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    FeasibleWithGap,
    InfeasibleInput,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleWithGap => "feasible-with-gap",
            SolveStatus::InfeasibleInput => "infeasible-input",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solution: ClearingSolution,
    pub status: SolveStatus,
    pub nodes_explored: u64,
    #[serde(with = "duration_millis")]
    pub wall_time: Duration,
    pub best_bound: Money,
}

impl SolveResult {
    /// `best_bound - objective` relative to `max(1, |objective|)` in currency units.
    pub fn relative_gap(&self) -> f64 {
        let gap = (self.best_bound - self.solution.objective).as_f64();
        gap / self.solution.objective.as_f64().abs().max(1.0)
    }
}

mod duration_millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1000.0)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = f64::deserialize(d)?;
        if !(ms.is_finite() && ms >= 0.0) {
            return Err(serde::de::Error::custom("duration must be non-negative"));
        }
        // Rounding to whole nanoseconds makes the round trip exact.
        Ok(Duration::from_nanos((ms * 1e6).round() as u64))
    }
}
