use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::RoomTypeId;
use crate::money::Money;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CustomerId(pub u64);

impl fmt::Display for CustomerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidLine {
    pub room_type: RoomTypeId,
    pub rooms_requested: u32,
    pub price_per_night: Money,
}

/// A customer's sealed forward-auction bid.
///
/// Either every line is granted for the same `nights` consecutive nights inside
/// `[window_lo, window_hi]`, or the whole bid is rejected. Window bounds and
/// blackout days are 1-based night indices into the auction horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bid {
    pub customer_id: CustomerId,
    pub lines: Vec<BidLine>,
    pub window_lo: u32,
    pub window_hi: u32,
    pub nights: u32,
    #[serde(default)]
    pub blackout_days: BTreeSet<u32>,
}

impl Bid {
    /// Every arrival `l` whose stay `[l, l + nights - 1]` fits in the window
    /// and touches no blackout day, ascending.
    pub fn feasible_arrivals(&self) -> Vec<u32> {
        if self.nights == 0 || self.window_lo == 0 || self.window_hi < self.window_lo {
            return Vec::new();
        }
        let Some(last) = (self.window_hi + 1).checked_sub(self.nights) else {
            return Vec::new();
        };
        (self.window_lo..=last)
            .filter(|&l| {
                self.blackout_days
                    .range(l..l + self.nights)
                    .next()
                    .is_none()
            })
            .collect()
    }

    /// Night indices occupied when arriving on `arrival`.
    pub fn stay(&self, arrival: u32) -> std::ops::Range<u32> {
        arrival..arrival + self.nights
    }

    /// Revenue per night over all lines, `sum_r n_{c,r} * b_{c,r}`.
    pub fn nightly_value(&self) -> Money {
        self.lines
            .iter()
            .map(|l| l.price_per_night * l.rooms_requested as i64)
            .sum()
    }

    pub fn window_len(&self) -> u32 {
        (self.window_hi + 1).saturating_sub(self.window_lo)
    }
}

/// One offer tuple as a customer submits it: a single room type, with the
/// stay window repeated on every tuple of the same customer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidTuple {
    pub customer_id: CustomerId,
    pub room_type: RoomTypeId,
    pub rooms_requested: u32,
    pub window_lo: u32,
    pub window_hi: u32,
    pub nights: u32,
    pub price_per_night: Money,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bid(lo: u32, hi: u32, nights: u32, blackout: &[u32]) -> Bid {
        Bid {
            customer_id: CustomerId(1),
            lines: vec![BidLine {
                room_type: RoomTypeId(1),
                rooms_requested: 1,
                price_per_night: Money::from_units(70),
            }],
            window_lo: lo,
            window_hi: hi,
            nights,
            blackout_days: blackout.iter().copied().collect(),
        }
    }

    #[test]
    fn arrivals_without_blackout() {
        assert_eq!(bid(1, 4, 2, &[]).feasible_arrivals(), vec![1, 2, 3]);
    }

    #[test]
    fn weekend_only_bid() {
        // Friday..Thursday window, only the first weekend wanted.
        assert_eq!(bid(1, 7, 2, &[3, 4, 5, 6, 7]).feasible_arrivals(), vec![1]);
    }

    #[test]
    fn blackout_in_every_candidate() {
        assert!(bid(1, 3, 2, &[2]).feasible_arrivals().is_empty());
    }

    #[test]
    fn stay_longer_than_window() {
        assert!(bid(3, 4, 3, &[]).feasible_arrivals().is_empty());
    }

    proptest! {
        #[test]
        fn arrival_count_and_containment(lo in 1u32..30, span in 0u32..30, nights in 1u32..10,
                                         blackout in proptest::collection::btree_set(1u32..70, 0..6)) {
            let hi = lo + span;
            let clean = bid(lo, hi, nights, &[]);
            let expected = (hi + 2).saturating_sub(lo + nights) as usize;
            prop_assert_eq!(clean.feasible_arrivals().len(), expected);

            let b = Bid { blackout_days: blackout.clone(), ..clean };
            for l in b.feasible_arrivals() {
                prop_assert!(l >= lo && l + nights - 1 <= hi);
                prop_assert!(b.stay(l).all(|d| !blackout.contains(&d)));
            }
        }
    }
}
