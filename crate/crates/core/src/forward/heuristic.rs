use std::collections::BTreeSet;
use std::time::Instant;

use crate::auction::CustomerId;
use crate::error::{Error, Result};

use super::exact::root_bound;
use super::model::{ForwardModel, ModelBid, Occupancy};
use super::{SolveResult, SolveStatus};

/// Earliest arrival at which every line of `mb` fits, if any.
fn place(mb: &ModelBid, occ: &Occupancy<'_>) -> Option<u32> {
    mb.arrivals.iter().copied().find(|&a| occ.fits(mb, a))
}

/// First-fit placement of bids in the given order.
pub(crate) fn greedy_assignment(model: &ForwardModel, order: &[usize]) -> Vec<(usize, u32)> {
    let mut occ = Occupancy::new(model);
    let mut chosen = Vec::new();
    for &i in order {
        let mb = &model.bids()[i];
        if mb.coefficient.cents() < 0 {
            continue;
        }
        if let Some(arrival) = place(mb, &occ) {
            occ.place(mb, arrival);
            chosen.push((i, arrival));
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Per-night objective value descending, then stay length descending, then
/// customer id ascending.
pub(crate) fn greedy_order(model: &ForwardModel) -> Vec<usize> {
    let mut order: Vec<usize> = (0..model.bids().len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&model.bids()[a], &model.bids()[b]);
        // coefficient / nights compared without division.
        let lhs = y.coefficient.cents() as i128 * x.bid.nights as i128;
        let rhs = x.coefficient.cents() as i128 * y.bid.nights as i128;
        lhs.cmp(&rhs)
            .then(y.bid.nights.cmp(&x.bid.nights))
            .then(x.customer_id().cmp(&y.customer_id()))
    });
    order
}

fn finish(model: &ForwardModel, chosen: &[(usize, u32)], started: Instant) -> SolveResult {
    let solution = model.solution_from(chosen);
    let bound = root_bound(model, solution.objective).max(solution.objective);
    let status = if bound == solution.objective {
        SolveStatus::Optimal
    } else {
        SolveStatus::FeasibleWithGap
    };
    SolveResult {
        solution,
        status,
        nodes_explored: 0,
        wall_time: started.elapsed(),
        best_bound: bound,
    }
}

/// Greedy placement of non-overlapping offers: best nightly value first, each
/// bid at its earliest arrival that still fits, rejected otherwise.
pub fn solve_greedy(model: &ForwardModel) -> SolveResult {
    let started = Instant::now();
    let chosen = greedy_assignment(model, &greedy_order(model));
    finish(model, &chosen, started)
}

/// First-come first-served: the greedy placement, in submission order.
pub fn solve_fcfs(model: &ForwardModel, arrival_order: &[CustomerId]) -> Result<SolveResult> {
    let started = Instant::now();
    let mut seen = BTreeSet::new();
    let mut order = Vec::with_capacity(arrival_order.len());
    for &c in arrival_order {
        let pos = model
            .bid_position(c)
            .ok_or_else(|| Error::NotAPermutation(format!("customer {c} has no bid")))?;
        if !seen.insert(c) {
            return Err(Error::NotAPermutation(format!("customer {c} appears twice")));
        }
        order.push(pos);
    }
    if order.len() != model.bids().len() {
        return Err(Error::NotAPermutation(format!(
            "{} of {} bidding customers listed",
            order.len(),
            model.bids().len()
        )));
    }
    let chosen = greedy_assignment(model, &order);
    Ok(finish(model, &chosen, started))
}
