//! Small worked scenarios used by tests, examples and the demo store.

use std::collections::BTreeSet;

use chrono::NaiveDate;

use crate::auction::{
    Bid, BidLine, CustomerId, DateHorizon, ForwardAuction, GroupId, Instance, RealRoomGroup,
    RoomType, RoomTypeId,
};
use crate::money::Money;

fn june(day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(2023, 6, day).expect("valid June date")
}

fn line(room_type: u32, rooms: u32, price: i64) -> BidLine {
    BidLine {
        room_type: RoomTypeId(room_type),
        rooms_requested: rooms,
        price_per_night: Money::from_units(price),
    }
}

fn bid(customer: u64, lines: Vec<BidLine>, window: (u32, u32), nights: u32) -> Bid {
    Bid {
        customer_id: CustomerId(customer),
        lines,
        window_lo: window.0,
        window_hi: window.1,
        nights,
        blackout_days: BTreeSet::new(),
    }
}

/// Two double rooms with American breakfast auctioned for 1–15 June 2023 at
/// a €65 floor, and three bids whose only optimal clearing accepts all of
/// them, arriving on 2, 2 and 11 June.
pub fn three_bid_showcase() -> Instance {
    let horizon = DateHorizon::new(june(1), 15).expect("valid horizon");
    let auction = ForwardAuction::with_singleton_groups(
        horizon,
        vec![RoomType {
            id: RoomTypeId(1),
            auctioned_count: 2,
            min_price: Money::from_units(65),
            operating_cost: Money::from_units(25),
            real_group: GroupId(1),
        }],
    )
    .expect("valid auction");
    Instance {
        currency: "EUR".into(),
        auction,
        bids: vec![
            bid(1, vec![line(1, 1, 70)], (2, 4), 3),
            bid(2, vec![line(1, 1, 65)], (2, 12), 9),
            bid(3, vec![line(1, 2, 75)], (10, 13), 3),
        ],
    }
}

/// One room type, one room, one night of horizon slack: bid A pays 100 for
/// night 1, bid B pays 60 a night for nights 1–2. Greedy takes A (100), the
/// optimum is B (120).
pub fn greedy_counterexample() -> Instance {
    let horizon = DateHorizon::new(june(1), 2).expect("valid horizon");
    let auction = ForwardAuction::with_singleton_groups(
        horizon,
        vec![RoomType {
            id: RoomTypeId(1),
            auctioned_count: 1,
            min_price: Money::from_units(50),
            operating_cost: Money::ZERO,
            real_group: GroupId(1),
        }],
    )
    .expect("valid auction");
    Instance {
        currency: "EUR".into(),
        auction,
        bids: vec![
            bid(1, vec![line(1, 1, 100)], (1, 1), 1),
            bid(2, vec![line(1, 1, 60)], (1, 2), 2),
        ],
    }
}

/// 5 one-bed and 10 two-bed rooms, each sold with American, continental or
/// no breakfast: six virtual room types over two real groups.
pub fn virtual_room_hotel(days: u32) -> ForwardAuction {
    let horizon = DateHorizon::new(june(1), days).expect("valid horizon");
    let mut room_types = Vec::new();
    for (group, capacity, first) in [(1u32, 5u32, 1u32), (2, 10, 4)] {
        for (k, floor) in [90, 75, 60].into_iter().enumerate() {
            room_types.push(RoomType {
                id: RoomTypeId(first + k as u32),
                auctioned_count: capacity,
                min_price: Money::from_units(floor + 20 * (group as i64 - 1)),
                operating_cost: Money::from_units(20),
                real_group: GroupId(group),
            });
        }
    }
    let groups = vec![
        RealRoomGroup {
            id: GroupId(1),
            capacity: 5,
            member_room_types: (1..=3).map(RoomTypeId).collect(),
        },
        RealRoomGroup {
            id: GroupId(2),
            capacity: 10,
            member_room_types: (4..=6).map(RoomTypeId).collect(),
        },
    ];
    ForwardAuction::new(horizon, room_types, groups).expect("valid auction")
}

/// Accepted prices of ten past reverse auctions with identical requests.
pub fn ten_auction_accepted_prices() -> Vec<Money> {
    [30, 40, 40, 40, 45, 45, 48, 50, 50, 50]
        .into_iter()
        .map(Money::from_units)
        .collect()
}
