use std::collections::BTreeMap;

use crate::auction::{
    validate_bid, Bid, CustomerId, DateHorizon, ForwardAuction, RealRoomGroup, RoomType,
};
use crate::error::{Error, Result};
use crate::money::Money;

use super::{ClearingSolution, ObjectiveMode};

/// A validated bid with everything the solvers need precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelBid {
    pub bid: Bid,
    /// Feasible arrival nights, ascending.
    pub arrivals: Vec<u32>,
    /// Objective contribution when accepted.
    pub coefficient: Money,
    /// `(room type position, rooms)` per line.
    pub(crate) demand: Vec<(usize, u32)>,
    /// `(group position, rooms)`, summed over the lines sharing a group.
    pub(crate) group_demand: Vec<(usize, u32)>,
}

impl ModelBid {
    pub fn customer_id(&self) -> CustomerId {
        self.bid.customer_id
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardModel {
    horizon: DateHorizon,
    room_types: Vec<RoomType>,
    groups: Vec<RealRoomGroup>,
    group_of_type: Vec<usize>,
    bids: Vec<ModelBid>,
    by_customer: BTreeMap<CustomerId, usize>,
    objective_mode: ObjectiveMode,
}

/// Builds the winner-determination model, rejecting it if any bid fails
/// validation.
pub fn build_model(
    auction: &ForwardAuction,
    bids: &[Bid],
    objective_mode: ObjectiveMode,
) -> Result<ForwardModel> {
    let mut reports: Vec<_> = bids
        .iter()
        .map(|b| validate_bid(b, auction))
        .filter(|r| !r.is_clean())
        .collect();
    let mut by_customer = BTreeMap::new();
    for (i, b) in bids.iter().enumerate() {
        if by_customer.insert(b.customer_id, i).is_some() {
            return Err(Error::InvalidInstance(format!(
                "duplicate customer id {}",
                b.customer_id
            )));
        }
    }
    if !reports.is_empty() {
        reports.sort_by_key(|r| r.customer_id);
        return Err(Error::InvalidBids(reports));
    }

    let room_types = auction.room_types().to_vec();
    let groups = auction.groups().to_vec();
    let type_pos: BTreeMap<_, _> = room_types.iter().enumerate().map(|(i, rt)| (rt.id, i)).collect();
    let group_of_type: Vec<usize> = room_types
        .iter()
        .map(|rt| {
            groups
                .iter()
                .position(|g| g.id == rt.real_group)
                .expect("auction construction checks group membership")
        })
        .collect();

    let model_bids = bids
        .iter()
        .map(|b| {
            let demand: Vec<(usize, u32)> = b
                .lines
                .iter()
                .map(|l| (type_pos[&l.room_type], l.rooms_requested))
                .collect();
            let nightly: Money = b
                .lines
                .iter()
                .zip(&demand)
                .map(|(l, &(rt, _))| {
                    let margin = match objective_mode {
                        ObjectiveMode::Income => l.price_per_night,
                        ObjectiveMode::Profit => l.price_per_night - room_types[rt].operating_cost,
                    };
                    margin * l.rooms_requested as i64
                })
                .sum();
            let mut per_group: BTreeMap<usize, u32> = BTreeMap::new();
            for &(rt, n) in &demand {
                *per_group.entry(group_of_type[rt]).or_default() += n;
            }
            ModelBid {
                arrivals: b.feasible_arrivals(),
                coefficient: nightly * b.nights as i64,
                demand,
                group_demand: per_group.into_iter().collect(),
                bid: b.clone(),
            }
        })
        .collect();

    Ok(ForwardModel {
        horizon: *auction.horizon(),
        room_types,
        groups,
        group_of_type,
        bids: model_bids,
        by_customer,
        objective_mode,
    })
}

impl ForwardModel {
    pub fn horizon(&self) -> &DateHorizon {
        &self.horizon
    }

    pub fn days(&self) -> u32 {
        self.horizon.len()
    }

    pub fn room_types(&self) -> &[RoomType] {
        &self.room_types
    }

    pub fn groups(&self) -> &[RealRoomGroup] {
        &self.groups
    }

    pub fn bids(&self) -> &[ModelBid] {
        &self.bids
    }

    pub fn objective_mode(&self) -> ObjectiveMode {
        self.objective_mode
    }

    pub fn bid(&self, customer: CustomerId) -> Option<&ModelBid> {
        self.by_customer.get(&customer).map(|&i| &self.bids[i])
    }

    pub(crate) fn bid_position(&self, customer: CustomerId) -> Option<usize> {
        self.by_customer.get(&customer).copied()
    }

    pub(crate) fn group_of_type(&self, room_type: usize) -> usize {
        self.group_of_type[room_type]
    }

    /// Number of per-(room type, night) capacity rows.
    pub fn capacity_rows(&self) -> usize {
        self.room_types.len() * self.days() as usize
    }

    /// Number of per-(real group, night) coupling rows.
    pub fn group_rows(&self) -> usize {
        self.groups.len() * self.days() as usize
    }

    /// Bids a solver should consider: those with a non-negative objective
    /// contribution that fit an empty hotel at some arrival.
    pub(crate) fn candidates(&self) -> Vec<usize> {
        let empty = Occupancy::new(self);
        (0..self.bids.len())
            .filter(|&i| {
                let mb = &self.bids[i];
                mb.coefficient >= Money::ZERO
                    && mb.arrivals.iter().any(|&a| empty.fits(mb, a))
            })
            .collect()
    }

    /// Sum of objective coefficients over accepted customers.
    pub fn objective_of(&self, accepted: &BTreeMap<CustomerId, u32>) -> Money {
        accepted
            .keys()
            .filter_map(|c| self.bid(*c))
            .map(|mb| mb.coefficient)
            .sum()
    }

    pub(crate) fn solution_from(&self, chosen: &[(usize, u32)]) -> ClearingSolution {
        let accepted: BTreeMap<_, _> = chosen
            .iter()
            .map(|&(i, l)| (self.bids[i].customer_id(), l))
            .collect();
        ClearingSolution {
            objective: self.objective_of(&accepted),
            accepted,
            objective_mode: self.objective_mode,
        }
    }
}

/// Rooms in use per (room type, night) and per (group, night).
#[derive(Debug, Clone)]
pub(crate) struct Occupancy<'m> {
    model: &'m ForwardModel,
    days: usize,
    room: Vec<u32>,
    group: Vec<u32>,
}

impl<'m> Occupancy<'m> {
    pub fn new(model: &'m ForwardModel) -> Self {
        let days = model.days() as usize;
        Occupancy {
            model,
            days,
            room: vec![0; model.room_types.len() * days],
            group: vec![0; model.groups.len() * days],
        }
    }

    fn slot(&self, row: usize, day: u32) -> usize {
        row * self.days + day as usize - 1
    }

    pub fn residual_room(&self, rt: usize, day: u32) -> u32 {
        self.model.room_types[rt].auctioned_count - self.room[self.slot(rt, day)]
    }

    pub fn residual_group(&self, g: usize, day: u32) -> u32 {
        self.model.groups[g].capacity - self.group[self.slot(g, day)]
    }

    pub fn fits(&self, mb: &ModelBid, arrival: u32) -> bool {
        let stay = mb.bid.stay(arrival);
        if stay.end - 1 > self.model.days() {
            return false;
        }
        stay.into_iter().all(|day| {
            mb.demand.iter().all(|&(rt, n)| self.residual_room(rt, day) >= n)
                && mb
                    .group_demand
                    .iter()
                    .all(|&(g, n)| self.residual_group(g, day) >= n)
        })
    }

    pub fn place(&mut self, mb: &ModelBid, arrival: u32) {
        for day in mb.bid.stay(arrival) {
            for &(rt, n) in &mb.demand {
                let s = self.slot(rt, day);
                self.room[s] += n;
                let g = self.model.group_of_type[rt];
                let s = self.slot(g, day);
                self.group[s] += n;
            }
        }
    }

    pub fn remove(&mut self, mb: &ModelBid, arrival: u32) {
        for day in mb.bid.stay(arrival) {
            for &(rt, n) in &mb.demand {
                let s = self.slot(rt, day);
                self.room[s] -= n;
                let g = self.model.group_of_type[rt];
                let s = self.slot(g, day);
                self.group[s] -= n;
            }
        }
    }
}
