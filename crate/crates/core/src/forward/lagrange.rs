//! Lagrangian bound over the nightly capacity rows.
//!
//! Pricing every (room type, night) and (group, night) row with a multiplier
//! `λ ≥ 0` leaves each remaining bid to pick its best arrival, or rejection,
//! at reduced value `coefficient − Σ λ · rooms` over the stay. Any `λ` gives
//! an upper bound, `Σ best reduced value + Σ λ · residual`; subgradient steps
//! move `λ` toward the tightest one. The multipliers a node ends with seed its
//! children, so deep nodes need only a few steps.

use super::model::{ForwardModel, Occupancy};

#[derive(Debug, Clone)]
struct BidRows {
    coefficient: f64,
    nights: u32,
    /// `(row family, rooms)`: room types first, then coupled groups.
    families: Vec<(usize, f64)>,
}

enum Family {
    Type(usize),
    Group(usize),
}

pub(crate) struct Lagrangian {
    days: usize,
    families: Vec<Family>,
    bids: Vec<BidRows>,
    /// `lambda[depth]`: starting multipliers for a node at that depth.
    lambda: Vec<Vec<f64>>,
    work: Vec<f64>,
    best: Vec<f64>,
    prefix: Vec<f64>,
    residual: Vec<f64>,
    usage: Vec<f64>,
    /// Per depth: the best reduced value at the current multipliers.
    top: Vec<f64>,
    /// Bound at the multipliers left in `work` by the last call to `bound`.
    last: f64,
}

/// Slack for floating-point error when turning the bound into cents.
const EPS: f64 = 1e-3;

impl Lagrangian {
    pub fn new(model: &ForwardModel, order: &[usize]) -> Self {
        let days = model.days() as usize;
        let mut families: Vec<Family> = (0..model.room_types().len()).map(Family::Type).collect();
        let mut group_family = vec![None; model.groups().len()];
        for (g, group) in model.groups().iter().enumerate() {
            let members: u32 = (0..model.room_types().len())
                .filter(|&rt| model.group_of_type(rt) == g)
                .map(|rt| model.room_types()[rt].auctioned_count)
                .sum();
            // A group row only binds when it is tighter than its members.
            if group.capacity < members {
                group_family[g] = Some(families.len());
                families.push(Family::Group(g));
            }
        }
        let bids = order
            .iter()
            .map(|&i| {
                let mb = &model.bids()[i];
                let mut rows: Vec<(usize, f64)> =
                    mb.demand.iter().map(|&(rt, n)| (rt, n as f64)).collect();
                rows.extend(
                    mb.group_demand
                        .iter()
                        .filter_map(|&(g, n)| group_family[g].map(|f| (f, n as f64))),
                );
                BidRows {
                    coefficient: mb.coefficient.cents() as f64,
                    nights: mb.bid.nights,
                    families: rows,
                }
            })
            .collect();
        let rows = families.len() * days;
        Lagrangian {
            days,
            families,
            bids,
            lambda: vec![vec![0.0; rows]; order.len() + 1],
            work: vec![0.0; rows],
            best: vec![0.0; rows],
            prefix: vec![0.0; families_len_prefix(rows, days)],
            residual: vec![0.0; rows],
            usage: vec![0.0; rows],
            top: vec![0.0; order.len()],
            last: f64::INFINITY,
        }
    }

    /// Upper bound, in cents, on what the bids at `depth..` can add given the
    /// arrivals that still fit (`fitting[depth]` onward). Runs up to `steps`
    /// subgradient steps, stopping once the bound drops to `threshold`.
    pub fn bound(
        &mut self,
        depth: usize,
        occ: &Occupancy<'_>,
        fitting: &[Vec<u32>],
        threshold: i64,
        steps: usize,
    ) -> i64 {
        self.bound_with(depth, occ, fitting, threshold, steps, |_| {})
    }

    /// As [`Lagrangian::bound`], calling `visit` after every evaluation so
    /// callers can read [`Lagrangian::reduced`] at each set of multipliers.
    pub fn bound_with(
        &mut self,
        depth: usize,
        occ: &Occupancy<'_>,
        fitting: &[Vec<u32>],
        threshold: i64,
        steps: usize,
        mut visit: impl FnMut(&Self),
    ) -> i64 {
        let days = self.days;
        for (f, family) in self.families.iter().enumerate() {
            for d in 0..days {
                self.residual[f * days + d] = match *family {
                    Family::Type(rt) => occ.residual_room(rt, d as u32 + 1),
                    Family::Group(g) => occ.residual_group(g, d as u32 + 1),
                } as f64;
            }
        }
        self.work.copy_from_slice(&self.lambda[depth]);
        self.best.copy_from_slice(&self.work);

        let target = threshold as f64;
        let mut best = f64::INFINITY;
        let mut mu = 1.0;
        let mut stale = 0;
        for _ in 0..steps.max(1) {
            let value = self.evaluate(depth, fitting);
            visit(self);
            if value < best - 1e-9 {
                best = value;
                self.best.copy_from_slice(&self.work);
                stale = 0;
            } else {
                stale += 1;
                if stale >= 3 {
                    mu /= 2.0;
                    stale = 0;
                }
            }
            if best <= target + 1.0 - EPS {
                break;
            }
            // Projected subgradient: residual minus what the chosen arrivals use.
            let mut norm = 0.0;
            for r in 0..self.work.len() {
                let g = self.residual[r] - self.usage[r];
                if self.work[r] > 0.0 || g < 0.0 {
                    norm += g * g;
                }
            }
            if norm == 0.0 {
                break;
            }
            let step = mu * (value - target).max(1.0) / norm;
            for r in 0..self.work.len() {
                let g = self.residual[r] - self.usage[r];
                self.work[r] = (self.work[r] - step * g).max(0.0);
            }
        }
        if depth + 1 < self.lambda.len() {
            self.lambda[depth + 1].copy_from_slice(&self.best);
        }
        self.work.copy_from_slice(&self.best);
        self.last = self.evaluate(depth, fitting);
        (self.last.min(best) + EPS).floor() as i64
    }

    /// Makes the multipliers from the last root call the starting point for
    /// later root visits.
    pub fn keep_root(&mut self) {
        self.lambda[0].copy_from_slice(&self.best);
    }

    /// Reduced value of bid `depth` arriving on `arrival` at the current
    /// multipliers.
    pub fn reduced(&self, depth: usize, arrival: u32) -> f64 {
        let bid = &self.bids[depth];
        let lo = arrival as usize - 1;
        let hi = lo + bid.nights as usize;
        let days = self.days;
        bid.coefficient
            - bid
                .families
                .iter()
                .map(|&(f, n)| {
                    let base = f * (days + 1);
                    n * (self.prefix[base + hi] - self.prefix[base + lo])
                })
                .sum::<f64>()
    }

    /// Bound for the last node with bid `depth` forced onto `arrival`, or
    /// rejected when `arrival` is `None`. Valid for any bid at or below that
    /// node since the relaxation decomposes by bid.
    pub fn fixed_bound(&self, depth: usize, arrival: Option<u32>) -> i64 {
        let forced = arrival.map_or(0.0, |a| self.reduced(depth, a));
        (self.last - self.top[depth] + forced + EPS).floor() as i64
    }

    /// Bound at the current multipliers; fills `usage` with the rooms the
    /// chosen arrivals take per row.
    fn evaluate(&mut self, depth: usize, fitting: &[Vec<u32>]) -> f64 {
        let days = self.days;
        for f in 0..self.families.len() {
            let base = f * (days + 1);
            self.prefix[base] = 0.0;
            for d in 0..days {
                self.prefix[base + d + 1] = self.prefix[base + d] + self.work[f * days + d];
            }
        }
        self.usage.iter_mut().for_each(|u| *u = 0.0);
        let mut total: f64 = self
            .work
            .iter()
            .zip(&self.residual)
            .map(|(l, r)| l * r)
            .sum();
        for d in depth..self.bids.len() {
            let mut chosen = None;
            let mut top = 0.0;
            for &a in &fitting[d] {
                let reduced = self.reduced(d, a);
                if reduced > top {
                    top = reduced;
                    chosen = Some(a);
                }
            }
            self.top[d] = top;
            if let Some(a) = chosen {
                total += top;
                let bid = &self.bids[d];
                let lo = a as usize - 1;
                for &(f, n) in &bid.families {
                    for night in lo..lo + bid.nights as usize {
                        self.usage[f * days + night] += n;
                    }
                }
            }
        }
        total
    }
}

fn families_len_prefix(rows: usize, days: usize) -> usize {
    rows.checked_div(days).map_or(0, |q| q * (days + 1))
}
