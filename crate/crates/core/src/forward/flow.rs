//! Time-indexed transportation relaxation.
//!
//! Each remaining bid line becomes a supply of `rooms * nights` room-nights
//! worth its per-night margin each. A line may put at most `rooms` on any
//! night some still-fitting arrival would cover, and nights are limited by the
//! residual room-type and group counts. Lines of one bid are decoupled and may
//! be taken fractionally, so the maximum-value flow bounds what the remaining
//! bids can add. Values sit on the source side only, so filling lines greedily
//! by margin with max-flow augmentation gives that maximum exactly.

use std::collections::VecDeque;

use super::model::{ForwardModel, Occupancy};
use super::ObjectiveMode;

#[derive(Debug, Clone, Copy)]
struct Line {
    depth: usize,
    member: usize,
    rooms: u32,
    margin: i64,
}

#[derive(Debug, Default)]
struct Network {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    prev: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Network {
    fn reset(&mut self, nodes: usize) {
        self.adj.resize_with(nodes.max(self.adj.len()), Vec::new);
        for a in &mut self.adj[..nodes] {
            a.clear();
        }
        self.to.clear();
        self.cap.clear();
        self.prev.clear();
        self.prev.resize(nodes, usize::MAX);
    }

    fn edge(&mut self, from: usize, to: usize, cap: i64) {
        self.adj[from].push(self.to.len());
        self.to.push(to);
        self.cap.push(cap);
        self.adj[to].push(self.to.len());
        self.to.push(from);
        self.cap.push(0);
    }

    /// Pushes up to `limit` units from `source` to `sink` along one shortest
    /// augmenting path. Returns the amount pushed, zero if no path exists.
    fn augment(&mut self, source: usize, sink: usize, limit: i64) -> i64 {
        const NONE: usize = usize::MAX;
        self.prev.iter_mut().for_each(|p| *p = NONE);
        self.queue.clear();
        self.queue.push_back(source);
        self.prev[source] = NONE - 1;
        while let Some(u) = self.queue.pop_front() {
            if u == sink {
                break;
            }
            for &e in &self.adj[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && self.prev[v] == NONE {
                    self.prev[v] = e;
                    self.queue.push_back(v);
                }
            }
        }
        if self.prev[sink] == NONE {
            return 0;
        }
        let mut amount = limit;
        let mut v = sink;
        while v != source {
            let e = self.prev[v];
            amount = amount.min(self.cap[e]);
            v = self.to[e ^ 1];
        }
        let mut v = sink;
        while v != source {
            let e = self.prev[v];
            self.cap[e] -= amount;
            self.cap[e ^ 1] += amount;
            v = self.to[e ^ 1];
        }
        amount
    }
}

pub(crate) struct FlowBound {
    /// Per group: positive-margin lines, margin descending.
    lines: Vec<Vec<Line>>,
    /// Per group: member room-type positions.
    members: Vec<Vec<usize>>,
    net: Network,
}

impl FlowBound {
    pub fn new(model: &ForwardModel, order: &[usize]) -> Self {
        let groups = model.groups().len();
        let mut members = vec![Vec::new(); groups];
        let mut member_of = vec![0usize; model.room_types().len()];
        for rt in 0..model.room_types().len() {
            let g = model.group_of_type(rt);
            member_of[rt] = members[g].len();
            members[g].push(rt);
        }
        let mut lines = vec![Vec::new(); groups];
        for (depth, &i) in order.iter().enumerate() {
            let mb = &model.bids()[i];
            for (line, &(rt, rooms)) in mb.bid.lines.iter().zip(&mb.demand) {
                let margin = match model.objective_mode() {
                    ObjectiveMode::Income => line.price_per_night,
                    ObjectiveMode::Profit => {
                        line.price_per_night - model.room_types()[rt].operating_cost
                    }
                }
                .cents();
                if margin > 0 && rooms > 0 {
                    lines[model.group_of_type(rt)].push(Line {
                        depth,
                        member: member_of[rt],
                        rooms,
                        margin,
                    });
                }
            }
        }
        for group in &mut lines {
            group.sort_by(|a, b| b.margin.cmp(&a.margin).then(a.depth.cmp(&b.depth)));
        }
        FlowBound {
            lines,
            members,
            net: Network::default(),
        }
    }

    /// Bound on the value the bids at `depth..` can add, given the arrivals
    /// of each that still fit. Stops early and returns something above
    /// `limit` once the bound is known to exceed it.
    #[allow(clippy::too_many_arguments)]
    pub fn bound(
        &mut self,
        model: &ForwardModel,
        order: &[usize],
        depth: usize,
        occ: &Occupancy<'_>,
        fitting: &[Vec<u32>],
        limit: i64,
    ) -> i64 {
        let days = model.days() as usize;
        let mut total = 0i64;
        for g in 0..self.members.len() {
            let active = self.lines[g]
                .iter()
                .filter(|l| l.depth >= depth && !fitting[l.depth].is_empty())
                .count();
            if active == 0 {
                continue;
            }
            let members = self.members[g].len();
            let type_base = active;
            let group_base = type_base + members * days;
            let sink = group_base + days;
            let net = &mut self.net;
            net.reset(sink + 1);
            for (m, &rt) in self.members[g].iter().enumerate() {
                for night in 1..=days {
                    let residual = occ.residual_room(rt, night as u32) as i64;
                    if residual > 0 {
                        net.edge(type_base + m * days + night - 1, group_base + night - 1, residual);
                    }
                }
            }
            for night in 1..=days {
                let residual = occ.residual_group(g, night as u32) as i64;
                if residual > 0 {
                    net.edge(group_base + night - 1, sink, residual);
                }
            }

            let mut node = 0;
            let mut covered = vec![false; days];
            for line in self.lines[g].iter().filter(|l| l.depth >= depth) {
                let fit = &fitting[line.depth];
                if fit.is_empty() {
                    continue;
                }
                let nights = model.bids()[order[line.depth]].bid.nights;
                covered.iter_mut().for_each(|c| *c = false);
                for &a in fit {
                    for night in a..a + nights {
                        covered[night as usize - 1] = true;
                    }
                }
                for (n, _) in covered.iter().enumerate().filter(|(_, c)| **c) {
                    net.edge(node, type_base + line.member * days + n, line.rooms as i64);
                }
                let mut supply = line.rooms as i64 * nights as i64;
                while supply > 0 {
                    let pushed = net.augment(node, sink, supply);
                    if pushed == 0 {
                        break;
                    }
                    supply -= pushed;
                    total += pushed * line.margin;
                }
                if total > limit {
                    return total;
                }
                node += 1;
            }
        }
        total
    }
}
