use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::auction::Instance;
use crate::error::Result;
use crate::money::Money;

use super::{
    brute_force, build_model, solve_exact, solve_fcfs, solve_greedy, ForwardModel, ObjectiveMode,
    SolveLimits, SolveResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Greedy,
    Fcfs,
    Brute,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::Exact,
        SolverKind::Greedy,
        SolverKind::Fcfs,
        SolverKind::Brute,
    ];

    /// Runs this solver. FCFS takes bids in the order they appear in the
    /// instance, which is their submission order.
    pub fn solve(
        self,
        model: &ForwardModel,
        submission_order: &Instance,
        limits: SolveLimits,
    ) -> Result<SolveResult> {
        match self {
            SolverKind::Exact => Ok(solve_exact(model, limits)),
            SolverKind::Greedy => Ok(solve_greedy(model)),
            SolverKind::Fcfs => {
                let order: Vec<_> = submission_order.bids.iter().map(|b| b.customer_id).collect();
                solve_fcfs(model, &order)
            }
            SolverKind::Brute => brute_force(model),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Exact => "exact",
            SolverKind::Greedy => "greedy",
            SolverKind::Fcfs => "fcfs",
            SolverKind::Brute => "brute",
        })
    }
}

impl FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(SolverKind::Exact),
            "greedy" => Ok(SolverKind::Greedy),
            "fcfs" => Ok(SolverKind::Fcfs),
            "brute" => Ok(SolverKind::Brute),
            other => Err(format!(
                "unknown solver {other:?} (expected exact|greedy|fcfs|brute)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    /// Bids above capacity per room type, comma separated.
    pub contention: String,
    pub solver: SolverKind,
    pub status: String,
    pub objective: Money,
    pub bound: Money,
    pub nodes: u64,
    pub wall_ms: f64,
}

impl BenchRow {
    pub const HEADER: &'static str = "instance\tcontention\tsolver\tstatus\tobjective\tbound\tnodes\twall_ms";

    pub fn tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}",
            self.instance, self.contention, self.solver, self.status, self.objective, self.bound, self.nodes, self.wall_ms
        )
    }
}

/// Solves every instance with every solver. A solver that refuses an
/// instance (brute force above its cap) is reported with status `skipped`.
pub fn run_benchmark(
    instances: &[(String, Instance)],
    solvers: &[SolverKind],
    mode: ObjectiveMode,
    limits: SolveLimits,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for (name, instance) in instances {
        let model = build_model(&instance.auction, &instance.bids, mode)?;
        let contention = super::random::contention(instance)
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",");
        for &solver in solvers {
            let row = match solver.solve(&model, instance, limits) {
                Ok(r) => BenchRow {
                    instance: name.clone(),
                    contention: contention.clone(),
                    solver,
                    status: r.status.to_string(),
                    objective: r.solution.objective,
                    bound: r.best_bound,
                    nodes: r.nodes_explored,
                    wall_ms: r.wall_time.as_secs_f64() * 1000.0,
                },
                Err(_) => BenchRow {
                    instance: name.clone(),
                    contention: contention.clone(),
                    solver,
                    status: "skipped".into(),
                    objective: Money::ZERO,
                    bound: Money::ZERO,
                    nodes: 0,
                    wall_ms: 0.0,
                },
            };
            rows.push(row);
        }
    }
    Ok(rows)
}
