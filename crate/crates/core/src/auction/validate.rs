use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{Bid, BidLine, BidTuple, CustomerId, ForwardAuction, RoomTypeId};
use crate::money::Money;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BidViolation {
    NoLines,
    UnknownRoomType { room_type: RoomTypeId },
    DuplicateRoomType { room_type: RoomTypeId },
    ZeroRooms { room_type: RoomTypeId },
    BelowMinimumPrice { room_type: RoomTypeId, bid: Money, minimum: Money },
    InconsistentWindows,
    ZeroNights,
    WindowOutsideHorizon { window_lo: u32, window_hi: u32, horizon: u32 },
    StayExceedsWindow { nights: u32, window_len: u32 },
    BlackoutOutsideWindow { day: u32 },
    NoFeasibleArrival,
}

impl fmt::Display for BidViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BidViolation::NoLines => write!(f, "bid has no lines"),
            BidViolation::UnknownRoomType { room_type } => {
                write!(f, "unknown room type {room_type}")
            }
            BidViolation::DuplicateRoomType { room_type } => {
                write!(f, "room type {room_type} appears on more than one line")
            }
            BidViolation::ZeroRooms { room_type } => {
                write!(f, "zero rooms requested for room type {room_type}")
            }
            BidViolation::BelowMinimumPrice {
                room_type,
                bid,
                minimum,
            } => write!(
                f,
                "below minimum price on room type {room_type}: {bid} < {minimum}"
            ),
            BidViolation::InconsistentWindows => {
                write!(f, "lines disagree on window or stay length")
            }
            BidViolation::ZeroNights => write!(f, "stay length must be at least one night"),
            BidViolation::WindowOutsideHorizon {
                window_lo,
                window_hi,
                horizon,
            } => write!(
                f,
                "window [{window_lo},{window_hi}] is not inside nights 1..={horizon}"
            ),
            BidViolation::StayExceedsWindow { nights, window_len } => write!(
                f,
                "{nights} nights do not fit a {window_len}-night window"
            ),
            BidViolation::BlackoutOutsideWindow { day } => {
                write!(f, "blackout night {day} is outside the window")
            }
            BidViolation::NoFeasibleArrival => {
                write!(f, "no arrival avoids every blackout night")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BidReport {
    pub customer_id: CustomerId,
    pub violations: Vec<BidViolation>,
}

impl BidReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for BidReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "customer {}: ", self.customer_id)?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_bid(bid: &Bid, auction: &ForwardAuction) -> BidReport {
    let mut violations = Vec::new();

    if bid.lines.is_empty() {
        violations.push(BidViolation::NoLines);
    }
    let mut seen = BTreeSet::new();
    for line in &bid.lines {
        if !seen.insert(line.room_type) {
            violations.push(BidViolation::DuplicateRoomType {
                room_type: line.room_type,
            });
            continue;
        }
        if line.rooms_requested == 0 {
            violations.push(BidViolation::ZeroRooms {
                room_type: line.room_type,
            });
        }
        match auction.room_type(line.room_type) {
            None => violations.push(BidViolation::UnknownRoomType {
                room_type: line.room_type,
            }),
            Some(rt) if line.price_per_night < rt.min_price => {
                violations.push(BidViolation::BelowMinimumPrice {
                    room_type: line.room_type,
                    bid: line.price_per_night,
                    minimum: rt.min_price,
                })
            }
            Some(_) => {}
        }
    }

    let horizon = auction.horizon().len();
    let window_ok = bid.window_lo >= 1 && bid.window_lo <= bid.window_hi && bid.window_hi <= horizon;
    if !window_ok {
        violations.push(BidViolation::WindowOutsideHorizon {
            window_lo: bid.window_lo,
            window_hi: bid.window_hi,
            horizon,
        });
    }
    if bid.nights == 0 {
        violations.push(BidViolation::ZeroNights);
    } else if window_ok && bid.nights > bid.window_len() {
        violations.push(BidViolation::StayExceedsWindow {
            nights: bid.nights,
            window_len: bid.window_len(),
        });
    }
    for &day in &bid.blackout_days {
        if day < bid.window_lo || day > bid.window_hi {
            violations.push(BidViolation::BlackoutOutsideWindow { day });
        }
    }
    if window_ok
        && bid.nights >= 1
        && bid.nights <= bid.window_len()
        && bid.feasible_arrivals().is_empty()
    {
        violations.push(BidViolation::NoFeasibleArrival);
    }

    BidReport {
        customer_id: bid.customer_id,
        violations,
    }
}

/// Groups per-room-type offer tuples into one bid per customer.
///
/// Customers whose tuples disagree on the window or stay length, or repeat a
/// room type, come back as reports instead of bids.
pub fn bids_from_tuples(tuples: &[BidTuple]) -> (Vec<Bid>, Vec<BidReport>) {
    let mut by_customer: BTreeMap<CustomerId, Vec<&BidTuple>> = BTreeMap::new();
    for t in tuples {
        by_customer.entry(t.customer_id).or_default().push(t);
    }

    let mut bids = Vec::new();
    let mut reports = Vec::new();
    for (customer_id, ts) in by_customer {
        let first = ts[0];
        let mut violations = Vec::new();
        if ts.iter().any(|t| {
            (t.window_lo, t.window_hi, t.nights) != (first.window_lo, first.window_hi, first.nights)
        }) {
            violations.push(BidViolation::InconsistentWindows);
        }
        let mut seen = BTreeSet::new();
        for t in &ts {
            if !seen.insert(t.room_type) {
                violations.push(BidViolation::DuplicateRoomType {
                    room_type: t.room_type,
                });
            }
        }
        if violations.is_empty() {
            bids.push(Bid {
                customer_id,
                lines: ts
                    .iter()
                    .map(|t| BidLine {
                        room_type: t.room_type,
                        rooms_requested: t.rooms_requested,
                        price_per_night: t.price_per_night,
                    })
                    .collect(),
                window_lo: first.window_lo,
                window_hi: first.window_hi,
                nights: first.nights,
                blackout_days: BTreeSet::new(),
            });
        } else {
            reports.push(BidReport {
                customer_id,
                violations,
            });
        }
    }
    (bids, reports)
}
