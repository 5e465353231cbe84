use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::time::Instant;

use crate::money::Money;

use super::flow::FlowBound;
use super::lagrange::Lagrangian;
use super::heuristic::greedy_assignment;
use super::model::{ForwardModel, Occupancy};
use super::{SolveLimits, SolveResult, SolveStatus};

/// One bid's share of value and room-nights on a single capacity row family
/// (a room type or a real group).
#[derive(Debug, Clone, Copy)]
struct Item {
    depth: usize,
    value: i64,
    weight: i64,
}

/// Upper bound on what the bids at `depth..` can still add.
///
/// Two relaxations are combined and the smaller is used:
///
/// * the plain sum of the remaining objective coefficients;
/// * for each real group, a fractional knapsack over room-nights: the group's
///   share of every remaining bid's value, packed into the residual room-nights
///   of the nights those bids could occupy. The same is done per room type
///   and the group keeps the smaller of its own knapsack and the sum of its
///   members' knapsacks. Summing over groups relaxes the coupling between a
///   bid's lines.
pub(crate) struct Relaxation<'m> {
    model: &'m ForwardModel,
    order: Vec<usize>,
    suffix_value: Vec<i64>,
    group_items: Vec<Vec<Item>>,
    type_items: Vec<Vec<Item>>,
    /// `reach[depth][night - 1]`: some bid at `depth..` can occupy that night.
    reach: Vec<Vec<bool>>,
}

impl<'m> Relaxation<'m> {
    pub fn new(model: &'m ForwardModel, order: Vec<usize>) -> Self {
        let n = order.len();
        let days = model.days() as usize;
        let mut suffix_value = vec![0i64; n + 1];
        for d in (0..n).rev() {
            suffix_value[d] = suffix_value[d + 1] + model.bids()[order[d]].coefficient.cents().max(0);
        }

        let mut group_items = vec![Vec::new(); model.groups().len()];
        let mut type_items = vec![Vec::new(); model.room_types().len()];
        for (depth, &i) in order.iter().enumerate() {
            let mb = &model.bids()[i];
            let nights = mb.bid.nights as i64;
            let mut per_group = vec![(0i64, 0i64); model.groups().len()];
            for (line, &(rt, rooms)) in mb.bid.lines.iter().zip(&mb.demand) {
                let margin = match model.objective_mode() {
                    super::ObjectiveMode::Income => line.price_per_night,
                    super::ObjectiveMode::Profit => {
                        line.price_per_night - model.room_types()[rt].operating_cost
                    }
                };
                let value = margin.cents() * rooms as i64 * nights;
                let weight = rooms as i64 * nights;
                type_items[rt].push(Item { depth, value, weight });
                let g = model.group_of_type(rt);
                per_group[g].0 += value;
                per_group[g].1 += weight;
            }
            for (g, (value, weight)) in per_group.into_iter().enumerate() {
                if weight > 0 {
                    group_items[g].push(Item { depth, value, weight });
                }
            }
        }
        for items in group_items.iter_mut().chain(type_items.iter_mut()) {
            items.retain(|it| it.value > 0);
            items.sort_by(|a, b| by_density(b, a).then(a.depth.cmp(&b.depth)));
        }

        let mut reach = vec![vec![false; days]; n + 1];
        for d in (0..n).rev() {
            let mut row = reach[d + 1].clone();
            let mb = &model.bids()[order[d]];
            if let (Some(&first), Some(&last)) = (mb.arrivals.first(), mb.arrivals.last()) {
                for night in first..last + mb.bid.nights {
                    row[night as usize - 1] = true;
                }
            }
            reach[d] = row;
        }

        Relaxation {
            model,
            order,
            suffix_value,
            group_items,
            type_items,
            reach,
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn bound(&self, depth: usize, occ: &Occupancy<'_>) -> i64 {
        let additive = self.suffix_value[depth];
        if additive == 0 {
            return 0;
        }
        let reach = &self.reach[depth];
        let nights = || (1..=self.model.days()).filter(|&d| reach[d as usize - 1]);

        let mut total = 0i64;
        for (g, group) in self.model.groups().iter().enumerate() {
            let cap: i64 = nights().map(|d| occ.residual_group(g, d) as i64).sum();
            let by_group = knapsack(&self.group_items[g], depth, cap);
            let by_types: i64 = group
                .member_room_types
                .iter()
                .filter_map(|id| self.model.room_types().iter().position(|rt| rt.id == *id))
                .map(|rt| {
                    let cap: i64 = nights().map(|d| occ.residual_room(rt, d) as i64).sum();
                    knapsack(&self.type_items[rt], depth, cap)
                })
                .sum();
            total += by_group.min(by_types);
            if total >= additive {
                return additive;
            }
        }
        total.min(additive)
    }
}

fn by_density(a: &Item, b: &Item) -> Ordering {
    (a.value as i128 * b.weight as i128).cmp(&(b.value as i128 * a.weight as i128))
}

fn knapsack(items: &[Item], depth: usize, mut cap: i64) -> i64 {
    let mut total = 0i64;
    for it in items.iter().filter(|it| it.depth >= depth) {
        if cap <= 0 {
            break;
        }
        if it.weight <= cap {
            total += it.value;
            cap -= it.weight;
        } else {
            // Round up so the bound stays admissible.
            let num = it.value as i128 * cap as i128;
            total += ((num + it.weight as i128 - 1) / it.weight as i128) as i64;
            break;
        }
    }
    total
}

/// Search order: objective coefficient descending, customer id ascending.
pub(crate) fn coefficient_order(model: &ForwardModel) -> Vec<usize> {
    let mut order = model.candidates();
    order.sort_by_key(|&i| {
        let mb = &model.bids()[i];
        (Reverse(mb.coefficient), mb.customer_id())
    });
    order
}

/// Root bound, used as `best_bound` by the heuristics.
pub(crate) fn root_bound(model: &ForwardModel, incumbent: Money) -> Money {
    let order = coefficient_order(model);
    let occ = Occupancy::new(model);
    let fitting: Vec<Vec<u32>> = order
        .iter()
        .map(|&i| {
            let mb = &model.bids()[i];
            mb.arrivals.iter().copied().filter(|&a| occ.fits(mb, a)).collect()
        })
        .collect();
    let knap = Relaxation::new(model, order.clone()).bound(0, &occ);
    let lagrange =
        Lagrangian::new(model, &order).bound(0, &occ, &fitting, incumbent.cents(), ROOT_STEPS);
    let flow = FlowBound::new(model, &order).bound(model, &order, 0, &occ, &fitting, i64::MAX);
    Money::from_cents(knap.min(lagrange).min(flow))
}

struct Search<'m> {
    model: &'m ForwardModel,
    relax: Relaxation<'m>,
    lagrange: Lagrangian,
    flow: FlowBound,
    occ: Occupancy<'m>,
    /// Per depth: arrivals still worth trying, after reduced-cost fixing.
    arrivals: Vec<Vec<u32>>,
    /// Per depth: rejecting this bid cannot lead to a better solution.
    must_accept: Vec<bool>,
    /// Per depth: allowed arrivals of that bid fitting the current occupancy.
    fitting: Vec<Vec<u32>>,
    limits: SolveLimits,
    started: Instant,
    path: Vec<(usize, u32)>,
    best: Vec<(usize, u32)>,
    best_value: i64,
    nodes: u64,
    aborted: bool,
    open_bound: i64,
    pruned_bound: i64,
    /// Best value seen per (depth, usable residual capacity).
    memo: HashMap<(usize, Vec<u16>), i64>,
    /// `demand[depth]`: per (room type, night) then (group, night), the most
    /// rooms the bids at `depth..` could ask for there.
    demand: Vec<Vec<u32>>,
}

fn remaining_demand(model: &ForwardModel, order: &[usize]) -> Vec<Vec<u32>> {
    let days = model.days() as usize;
    let types = model.room_types().len();
    let rows = (types + model.groups().len()) * days;
    let mut demand = vec![vec![0u32; rows]; order.len() + 1];
    for depth in (0..order.len()).rev() {
        let mut row = demand[depth + 1].clone();
        let mb = &model.bids()[order[depth]];
        if let (Some(&first), Some(&last)) = (mb.arrivals.first(), mb.arrivals.last()) {
            for night in first..last + mb.bid.nights {
                let d = night as usize - 1;
                for &(rt, n) in &mb.demand {
                    row[rt * days + d] += n;
                }
                for &(g, n) in &mb.group_demand {
                    row[(types + g) * days + d] += n;
                }
            }
        }
        demand[depth] = row;
    }
    demand
}

const MEMO_CAP: usize = 2_000_000;
const ROOT_STEPS: usize = 300;
const NODE_STEPS: usize = 12;
const DIVE_EVERY: u64 = 8;
const MAX_SWEEPS: usize = 4;
const NEIGHBOURHOOD_NODES: u64 = 4_000;
/// Below this many candidate bids the plain search is fast enough.
const NEIGHBOURHOOD_MIN_BIDS: usize = 30;

impl<'m> Search<'m> {
    /// A search over the bids in `order`, on top of whatever `occ` already
    /// holds.
    fn new(
        model: &'m ForwardModel,
        order: Vec<usize>,
        occ: Occupancy<'m>,
        limits: SolveLimits,
        started: Instant,
    ) -> Self {
        let arrivals = order.iter().map(|&i| model.bids()[i].arrivals.clone()).collect();
        Search {
            model,
            demand: remaining_demand(model, &order),
            lagrange: Lagrangian::new(model, &order),
            flow: FlowBound::new(model, &order),
            fitting: vec![Vec::new(); order.len()],
            must_accept: vec![false; order.len()],
            arrivals,
            relax: Relaxation::new(model, order),
            occ,
            limits,
            started,
            path: Vec::new(),
            best: Vec::new(),
            best_value: i64::MIN,
            nodes: 0,
            aborted: false,
            open_bound: i64::MIN,
            pruned_bound: i64::MIN,
            memo: HashMap::new(),
        }
    }

    fn threshold(&self) -> i64 {
        self.best_value + self.limits.tolerance_cents(self.best_value)
    }

    fn offer(&mut self, value: i64, chosen: &[(usize, u32)]) {
        if value > self.best_value {
            self.best_value = value;
            self.best = chosen.to_vec();
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if let Some(cap) = self.limits.node_budget {
            if self.nodes > cap {
                return true;
            }
        }
        self.nodes.is_multiple_of(256) && self.started.elapsed() >= self.limits.time_budget
    }

    fn refresh_fitting(&mut self, depth: usize) {
        let order = self.relax.order();
        for (d, &i) in order.iter().enumerate().skip(depth) {
            let mb = &self.model.bids()[i];
            let fit = &mut self.fitting[d];
            fit.clear();
            fit.extend(self.arrivals[d].iter().copied().filter(|&a| self.occ.fits(mb, a)));
        }
    }

    /// Root pass: tightens the multipliers while repairing each Lagrangian
    /// solution into a feasible one, then drops every arrival, and every
    /// rejection, whose fixed bound cannot beat the incumbent.
    fn root(&mut self) -> i64 {
        self.refresh_fitting(0);
        let model = self.model;
        let order = self.relax.order().to_vec();
        let fitting = self.fitting.clone();
        let base = self.occ.clone();
        let mut occ = base.clone();
        let mut found: (i64, Vec<(usize, u32)>) = (self.best_value, Vec::new());
        let bound = self.lagrange.bound_with(
            0,
            &self.occ,
            &self.fitting,
            self.threshold(),
            ROOT_STEPS,
            |lag| {
                occ.clone_from(&base);
                let (value, chosen) = repair(model, &order, 0, &fitting, lag, &mut occ);
                if value > found.0 {
                    found = (value, chosen);
                }
            },
        );
        if found.0 > self.best_value {
            self.offer(found.0, &found.1);
        }
        let threshold = self.threshold();
        for d in 0..order.len() {
            let lag = &self.lagrange;
            let mut dropped = i64::MIN;
            self.arrivals[d] = fitting[d]
                .iter()
                .copied()
                .filter(|&a| {
                    let b = lag.fixed_bound(d, Some(a));
                    if b <= threshold {
                        dropped = dropped.max(b);
                    }
                    b > threshold
                })
                .collect();
            let reject = lag.fixed_bound(d, None);
            if reject <= threshold {
                self.must_accept[d] = true;
                dropped = dropped.max(reject);
            }
            if dropped > self.best_value {
                self.pruned_bound = self.pruned_bound.max(dropped);
            }
        }
        self.lagrange.keep_root();
        bound
    }

    /// Tightest bound available on what the bids at `depth..` can add, or
    /// the first one found to be at most `limit`. The flag tells whether the
    /// Lagrangian was evaluated here, so its fixed bounds describe this node.
    fn bound(&mut self, depth: usize, limit: i64) -> (i64, bool) {
        let bound = self.relax.bound(depth, &self.occ);
        if bound <= limit {
            return (bound, false);
        }
        self.refresh_fitting(depth);
        let lagrange = self
            .lagrange
            .bound(depth, &self.occ, &self.fitting, limit, NODE_STEPS);
        let bound = bound.min(lagrange);
        if bound <= limit {
            return (bound, true);
        }
        let order = self.relax.order();
        let flow = self
            .flow
            .bound(self.model, order, depth, &self.occ, &self.fitting, limit);
        (bound.min(flow), true)
    }

    fn dfs(&mut self, depth: usize, value: i64) {
        self.nodes += 1;
        // Rejecting every remaining bid is always feasible.
        if value > self.best_value {
            self.best_value = value;
            self.best = self.path.clone();
        }
        if depth == self.relax.order().len() || self.dominated(depth, value) {
            return;
        }
        let threshold = self.threshold();
        let (remaining, fixed) = self.bound(depth, threshold - value);
        let bound = value + remaining;
        if self.out_of_budget() {
            self.aborted = true;
            self.open_bound = self.open_bound.max(bound);
            return;
        }
        if bound <= threshold {
            if bound > self.best_value {
                self.pruned_bound = self.pruned_bound.max(bound);
            }
            return;
        }

        if fixed && self.nodes.is_multiple_of(DIVE_EVERY) {
            self.dive(depth, value);
        }

        let i = self.relax.order()[depth];
        let mb = &self.model.bids()[i];
        let coef = mb.coefficient.cents();
        let child_bound = |search: &Self, arrival: Option<u32>| {
            if fixed {
                bound.min(value + search.lagrange.fixed_bound(depth, arrival))
            } else {
                bound
            }
        };
        let mut children: Vec<(Option<u32>, i64)> = self.arrivals[depth]
            .iter()
            .filter(|&&a| self.occ.fits(mb, a))
            .map(|&a| (Some(a), child_bound(self, Some(a))))
            .collect();
        if !self.must_accept[depth] {
            children.push((None, child_bound(self, None)));
        }

        for (arrival, child) in children {
            if self.aborted {
                self.open_bound = self.open_bound.max(child);
                continue;
            }
            let threshold = self.threshold();
            if child <= threshold {
                if child > self.best_value {
                    self.pruned_bound = self.pruned_bound.max(child);
                }
                continue;
            }
            match arrival {
                Some(a) => {
                    self.occ.place(mb, a);
                    self.path.push((i, a));
                    self.dfs(depth + 1, value + coef);
                    self.path.pop();
                    self.occ.remove(mb, a);
                }
                None => self.dfs(depth + 1, value),
            }
        }
    }

    /// Large-neighbourhood improvement of the incumbent: for a sliding band
    /// of nights, every bid that could touch the band is freed and re-solved
    /// exactly, under a node budget, with all other accepted bids held in
    /// place. Sweeps repeat while they improve.
    fn improve(&mut self) {
        let model = self.model;
        let days = model.days();
        let width = (days / 4).clamp(4, 14);
        let order = self.relax.order().to_vec();
        for _ in 0..MAX_SWEEPS {
            let mut improved = false;
            let mut start = 1;
            while start <= days {
                let band = start..start + width;
                start += width.div_ceil(2);
                if self.started.elapsed() >= self.limits.time_budget {
                    return;
                }
                let free: Vec<usize> = order
                    .iter()
                    .copied()
                    .filter(|&i| {
                        let mb = &model.bids()[i];
                        match (mb.arrivals.first(), mb.arrivals.last()) {
                            (Some(&lo), Some(&hi)) => lo < band.end && hi + mb.bid.nights > band.start,
                            _ => false,
                        }
                    })
                    .collect();
                if free.is_empty() {
                    continue;
                }
                let mut occ = Occupancy::new(model);
                let mut held = Vec::new();
                let mut moving = Vec::new();
                let mut held_value = 0;
                for &(i, a) in &self.best {
                    if free.contains(&i) {
                        moving.push((i, a));
                    } else {
                        occ.place(&model.bids()[i], a);
                        held.push((i, a));
                        held_value += model.bids()[i].coefficient.cents();
                    }
                }
                let limits = SolveLimits {
                    node_budget: Some(NEIGHBOURHOOD_NODES),
                    gap_tolerance: 0.0,
                    ..self.limits
                };
                let mut sub = Search::new(model, free, occ, limits, self.started);
                sub.offer(self.best_value - held_value, &moving);
                sub.root();
                sub.dfs(0, 0);
                self.nodes += sub.nodes;
                if held_value + sub.best_value > self.best_value {
                    held.extend(sub.best);
                    self.offer(held_value + sub.best_value, &held);
                    improved = true;
                }
            }
            if !improved {
                return;
            }
        }
    }

    /// Completes the current partial solution with the repair heuristic at
    /// this node's multipliers.
    fn dive(&mut self, depth: usize, value: i64) {
        let mut occ = self.occ.clone();
        let (more, chosen) = repair(
            self.model,
            self.relax.order(),
            depth,
            &self.fitting,
            &self.lagrange,
            &mut occ,
        );
        if value + more > self.best_value {
            let mut full = self.path.clone();
            full.extend(chosen);
            self.offer(value + more, &full);
        }
    }

    /// True when another partial solution left the remaining bids the same
    /// usable capacity with at least this value. Residuals are clamped to
    /// what the remaining bids could ever ask for on that night, so states
    /// differing only in capacity nobody can use compare equal.
    fn dominated(&mut self, depth: usize, value: i64) -> bool {
        let demand = &self.demand[depth];
        let days = self.model.days();
        let mut key = Vec::with_capacity(demand.len());
        let mut row = 0;
        for rt in 0..self.model.room_types().len() {
            for d in 1..=days {
                key.push(self.occ.residual_room(rt, d).min(demand[row]) as u16);
                row += 1;
            }
        }
        for g in 0..self.model.groups().len() {
            for d in 1..=days {
                key.push(self.occ.residual_group(g, d).min(demand[row]) as u16);
                row += 1;
            }
        }
        let full = self.memo.len() >= MEMO_CAP;
        match self.memo.entry((depth, key)) {
            Entry::Occupied(e) if *e.get() >= value => true,
            Entry::Occupied(mut e) => {
                e.insert(value);
                false
            }
            Entry::Vacant(e) => {
                if !full {
                    e.insert(value);
                }
                false
            }
        }
    }
}

/// Turns the Lagrangian solution at the current multipliers into a feasible
/// one: bids by best reduced value, each on its best-priced arrival that
/// still fits.
/// Bids before `from` are left as placed in `occ`.
fn repair(
    model: &ForwardModel,
    order: &[usize],
    from: usize,
    fitting: &[Vec<u32>],
    lag: &Lagrangian,
    occ: &mut Occupancy<'_>,
) -> (i64, Vec<(usize, u32)>) {
    let mut ranked: Vec<(f64, usize, Vec<(f64, u32)>)> = fitting
        .iter()
        .enumerate()
        .skip(from)
        .filter(|(_, fit)| !fit.is_empty())
        .map(|(d, fit)| {
            let mut options: Vec<(f64, u32)> = fit.iter().map(|&a| (lag.reduced(d, a), a)).collect();
            options.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
            (options[0].0, d, options)
        })
        .collect();
    ranked.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let mut value = 0;
    let mut chosen = Vec::new();
    for (_, d, options) in ranked {
        let mb = &model.bids()[order[d]];
        if let Some(&(_, a)) = options.iter().find(|&&(_, a)| occ.fits(mb, a)) {
            occ.place(mb, a);
            value += mb.coefficient.cents();
            chosen.push((order[d], a));
        }
    }
    (value, chosen)
}

/// Exact winner determination by depth-first branch and bound.
///
/// Bids are branched in descending objective-coefficient order (ties by
/// customer id); each bid tries its feasible arrivals earliest first, then
/// rejection. The greedy solution seeds the incumbent and a Lagrangian repair
/// heuristic at the root may improve it, as may re-solving bands of nights
/// around the incumbent on harder instances. Nodes are bounded by a room-night
/// knapsack, then a Lagrangian relaxation of the nightly capacities, then a
/// time-indexed flow relaxation, stopping at the first that prunes; the
/// Lagrangian multipliers also rule out children before they are entered.
/// Partial solutions that leave the remaining bids the same usable capacity
/// with no more value are skipped. When a budget runs out the best solution
/// found is returned with a valid upper bound.
pub fn solve_exact(model: &ForwardModel, limits: SolveLimits) -> SolveResult {
    let started = Instant::now();
    let mut search = Search::new(
        model,
        coefficient_order(model),
        Occupancy::new(model),
        limits,
        started,
    );
    let warm = greedy_assignment(model, &super::heuristic::greedy_order(model));
    let warm_value: i64 = warm
        .iter()
        .map(|&(i, _)| model.bids()[i].coefficient.cents())
        .sum();
    search.offer(warm_value, &warm);
    let mut root = search.root();
    if root > search.threshold() && search.relax.order().len() >= NEIGHBOURHOOD_MIN_BIDS {
        search.improve();
        root = search.root();
    }
    search.dfs(0, 0);

    let best_value = search.best_value;
    let tree_bound = best_value.max(search.open_bound).max(search.pruned_bound);
    let best_bound = best_value.max(tree_bound.min(root.max(search.pruned_bound)));
    let within_tolerance = best_bound - best_value <= limits.tolerance_cents(best_value);
    let status = if !search.aborted || within_tolerance {
        SolveStatus::Optimal
    } else {
        SolveStatus::FeasibleWithGap
    };
    let mut chosen = search.best;
    chosen.sort_unstable();
    SolveResult {
        solution: model.solution_from(&chosen),
        status,
        nodes_explored: search.nodes,
        wall_time: started.elapsed(),
        best_bound: Money::from_cents(best_bound),
    }
}
