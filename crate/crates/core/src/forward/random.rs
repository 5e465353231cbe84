//! Seeded random forward-auction instances for tests and benchmarks.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::auction::{
    Bid, BidLine, CustomerId, DateHorizon, ForwardAuction, GroupId, Instance, RealRoomGroup,
    RoomType, RoomTypeId,
};
use crate::money::Money;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub customers: u32,
    pub days: u32,
    /// Auctioned rooms per room type.
    pub capacities: Vec<u32>,
    /// Put the first two room types in one real group sized like the first.
    pub shared_group: bool,
    /// Longest stay drawn.
    pub max_nights: u32,
    /// Largest number of spare nights in a bid window beyond the stay.
    pub max_slack: u32,
    /// Chance that a bid carries a blackout night.
    pub blackout_probability: f64,
    /// Most rooms one line asks for; also never more than half the room type.
    pub max_rooms: u32,
}

impl RandomSpec {
    pub fn new(customers: u32, days: u32, capacities: Vec<u32>) -> Self {
        RandomSpec {
            customers,
            days,
            capacities,
            shared_group: false,
            max_nights: (days / 3).clamp(2, 10),
            max_slack: (days / 4).clamp(1, 7),
            blackout_probability: 0.1,
            max_rooms: 5,
        }
    }
}

/// The five small-to-medium hotel configurations used for run-time checks:
/// (nights, capacity per room type, customers).
pub fn medium_hotel_specs() -> Vec<RandomSpec> {
    vec![
        RandomSpec::new(10, 10, vec![7, 7]),
        RandomSpec::new(10, 7, vec![5]),
        RandomSpec::new(20, 14, vec![10, 5]),
        RandomSpec::new(20, 30, vec![5, 5, 5]),
        RandomSpec::new(20, 45, vec![5, 10]),
    ]
}

/// Larger hotels over a 60-night horizon.
pub fn large_hotel_specs() -> Vec<RandomSpec> {
    vec![
        RandomSpec::new(50, 60, vec![30, 30, 10, 10]),
        RandomSpec::new(80, 60, vec![30, 20, 20]),
    ]
}

/// Desk-sized instances for exhaustive cross-checks: at most 6 bids, 8 nights
/// and 2 room types, sometimes sharing one real group.
pub fn tiny_spec(seed: u64) -> RandomSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_7a11);
    let types = rng.random_range(1..=2usize);
    let days = rng.random_range(1..=8u32);
    let capacities = (0..types).map(|_| rng.random_range(1..=3u32)).collect();
    RandomSpec {
        customers: rng.random_range(0..=6),
        days,
        capacities,
        shared_group: types == 2 && rng.random_bool(0.5),
        max_nights: days.min(4),
        max_slack: 4,
        blackout_probability: 0.2,
        max_rooms: 5,
    }
}

fn horizon_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2023, 6, 1).expect("valid date")
}

pub fn random_instance(spec: &RandomSpec, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = DateHorizon::new(horizon_start(), spec.days.max(1)).expect("positive length");
    let days = horizon.len();

    let room_types: Vec<RoomType> = spec
        .capacities
        .iter()
        .enumerate()
        .map(|(i, &cap)| RoomType {
            id: RoomTypeId(i as u32 + 1),
            auctioned_count: cap,
            min_price: Money::from_units(rng.random_range(40..=80)),
            operating_cost: Money::from_units(rng.random_range(0..=30)),
            real_group: GroupId(if spec.shared_group && i == 1 { 1 } else { i as u32 + 1 }),
        })
        .collect();
    let mut groups: Vec<RealRoomGroup> = Vec::new();
    for rt in &room_types {
        match groups.iter_mut().find(|g| g.id == rt.real_group) {
            Some(g) => {
                g.member_room_types.insert(rt.id);
            }
            None => groups.push(RealRoomGroup {
                id: rt.real_group,
                capacity: rt.auctioned_count.max(1),
                member_room_types: BTreeSet::from([rt.id]),
            }),
        }
    }
    let auction = ForwardAuction::new(horizon, room_types.clone(), groups)
        .expect("generated structure is consistent");

    let mut bids = Vec::new();
    for c in 1..=spec.customers {
        let nights = rng.random_range(1..=spec.max_nights.clamp(1, days));
        let slack = rng.random_range(0..=spec.max_slack.min(days - nights));
        let window_lo = rng.random_range(1..=days - nights - slack + 1);
        let window_hi = window_lo + nights + slack - 1;

        let n_lines = rng.random_range(1..=room_types.len().min(2));
        let mut picked = sample(&mut rng, room_types.len(), n_lines).into_vec();
        picked.sort_unstable();
        let lines = picked
            .into_iter()
            .map(|i| {
                let rt = &room_types[i];
                BidLine {
                    room_type: rt.id,
                    rooms_requested: rng.random_range(
                        1..=rt.auctioned_count.div_ceil(2).min(spec.max_rooms).max(1),
                    ),
                    price_per_night: rt.min_price + Money::from_units(rng.random_range(0..=60)),
                }
            })
            .collect();

        let mut bid = Bid {
            customer_id: CustomerId(c as u64),
            lines,
            window_lo,
            window_hi,
            nights,
            blackout_days: BTreeSet::new(),
        };
        if slack > 0 && rng.random_bool(spec.blackout_probability) {
            let day = rng.random_range(window_lo..=window_hi);
            bid.blackout_days.insert(day);
            if bid.feasible_arrivals().is_empty() {
                bid.blackout_days.clear();
            }
        }
        bids.push(bid);
    }

    Instance {
        currency: "EUR".into(),
        auction,
        bids,
    }
}

/// Per room type, the number of bids touching a night whose demand exceeds the
/// auctioned count when every bid arrives as early as it can.
pub fn contention(instance: &Instance) -> Vec<u32> {
    let days = instance.auction.horizon().len() as usize;
    instance
        .auction
        .room_types()
        .iter()
        .map(|rt| {
            let mut load = vec![0u32; days + 1];
            let mut stays = Vec::new();
            for b in &instance.bids {
                let Some(line) = b.lines.iter().find(|l| l.room_type == rt.id) else {
                    continue;
                };
                let Some(&first) = b.feasible_arrivals().first() else {
                    continue;
                };
                for d in b.stay(first) {
                    load[d as usize] += line.rooms_requested;
                }
                stays.push(b.stay(first));
            }
            stays
                .into_iter()
                .filter(|stay| stay.clone().any(|d| load[d as usize] > rt.auctioned_count))
                .count() as u32
        })
        .collect()
}
