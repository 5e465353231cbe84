use std::time::Instant;

use crate::error::{Error, Result};
use crate::money::Money;

use super::model::ForwardModel;
use super::{ObjectiveMode, SolveResult, SolveStatus};

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

pub fn brute_force(model: &ForwardModel) -> Result<SolveResult> {
    brute_force_with_cap(model, DEFAULT_ENUMERATION_CAP)
}

/// Enumerates every accept/arrival combination and keeps the best feasible
/// one. Shares no code with the other solvers: capacity use and objective are
/// recounted from the raw bid lines for each combination.
pub fn brute_force_with_cap(model: &ForwardModel, cap: u128) -> Result<SolveResult> {
    let started = Instant::now();
    let bids = model.bids();
    let combinations = bids
        .iter()
        .try_fold(1u128, |acc, mb| acc.checked_mul(1 + mb.arrivals.len() as u128))
        .unwrap_or(u128::MAX);
    if combinations > cap {
        return Err(Error::EnumerationCapExceeded { combinations, cap });
    }

    let days = model.days() as usize;
    let types = model.room_types();
    let groups = model.groups();
    let value_of = |i: usize| -> i64 {
        let b = &bids[i].bid;
        b.lines
            .iter()
            .map(|l| {
                let rt = types.iter().find(|rt| rt.id == l.room_type).expect("validated");
                let margin = match model.objective_mode() {
                    ObjectiveMode::Income => l.price_per_night,
                    ObjectiveMode::Profit => l.price_per_night - rt.operating_cost,
                };
                margin.cents() * l.rooms_requested as i64 * b.nights as i64
            })
            .sum()
    };
    let values: Vec<i64> = (0..bids.len()).map(value_of).collect();

    // choice[i] == 0 rejects bid i, otherwise it arrives on arrivals[choice[i] - 1].
    let mut choice = vec![0usize; bids.len()];
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut room_use = vec![0u32; types.len() * days];
    let mut group_use = vec![0u32; groups.len() * days];
    let mut visited = 0u64;
    loop {
        visited += 1;
        room_use.iter_mut().for_each(|u| *u = 0);
        group_use.iter_mut().for_each(|u| *u = 0);
        let mut value = 0i64;
        for (i, &c) in choice.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let b = &bids[i].bid;
            let arrival = bids[i].arrivals[c - 1];
            value += values[i];
            for l in &b.lines {
                let rt = types.iter().position(|rt| rt.id == l.room_type).expect("validated");
                let g = groups
                    .iter()
                    .position(|g| g.member_room_types.contains(&l.room_type))
                    .expect("validated");
                for night in arrival..arrival + b.nights {
                    room_use[rt * days + night as usize - 1] += l.rooms_requested;
                    group_use[g * days + night as usize - 1] += l.rooms_requested;
                }
            }
        }
        let feasible = (0..types.len()).all(|rt| {
            room_use[rt * days..(rt + 1) * days]
                .iter()
                .all(|&u| u <= types[rt].auctioned_count)
        }) && (0..groups.len()).all(|g| {
            group_use[g * days..(g + 1) * days]
                .iter()
                .all(|&u| u <= groups[g].capacity)
        });
        if feasible && best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, choice.clone()));
        }

        // Advance the odometer; the last bid turns fastest.
        let mut pos = choice.len();
        loop {
            if pos == 0 {
                let (value, choice) = best.expect("rejecting everything is feasible");
                let chosen: Vec<(usize, u32)> = choice
                    .iter()
                    .enumerate()
                    .filter(|&(_, &c)| c > 0)
                    .map(|(i, &c)| (i, bids[i].arrivals[c - 1]))
                    .collect();
                let solution = model.solution_from(&chosen);
                debug_assert_eq!(solution.objective.cents(), value);
                return Ok(SolveResult {
                    best_bound: Money::from_cents(value),
                    solution,
                    status: SolveStatus::Optimal,
                    nodes_explored: visited,
                    wall_time: started.elapsed(),
                });
            }
            pos -= 1;
            if choice[pos] < bids[pos].arrivals.len() {
                choice[pos] += 1;
                break;
            }
            choice[pos] = 0;
        }
    }
}
