use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::auction::{CustomerId, GroupId, RoomTypeId};
use crate::money::Money;

use super::model::ForwardModel;
use super::{ClearingSolution, ObjectiveMode};

/// The nights granted to one customer, in the x-variable view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stay {
    pub customer: CustomerId,
    pub nights: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionViolation {
    UnknownCustomer { customer: CustomerId },
    DuplicateCustomer { customer: CustomerId },
    StayLength { customer: CustomerId, expected: u32, actual: u32 },
    NonContiguousStay { customer: CustomerId },
    Window { customer: CustomerId, night: u32, window_lo: u32, window_hi: u32 },
    Blackout { customer: CustomerId, night: u32 },
    RoomCapacity { room_type: RoomTypeId, night: u32, used: u32, capacity: u32 },
    GroupCapacity { group: GroupId, night: u32, used: u32, capacity: u32 },
    ObjectiveMode { reported: ObjectiveMode, model: ObjectiveMode },
    Objective { reported: Money, recomputed: Money },
}

impl fmt::Display for SolutionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SolutionViolation::*;
        match self {
            UnknownCustomer { customer } => write!(f, "customer {customer} has no bid"),
            DuplicateCustomer { customer } => write!(f, "customer {customer} has two stays"),
            StayLength { customer, expected, actual } => write!(
                f,
                "customer {customer} stays {actual} nights instead of {expected}"
            ),
            NonContiguousStay { customer } => {
                write!(f, "customer {customer} stay is not consecutive")
            }
            Window { customer, night, window_lo, window_hi } => write!(
                f,
                "customer {customer} night {night} outside window [{window_lo},{window_hi}]"
            ),
            Blackout { customer, night } => {
                write!(f, "customer {customer} placed on blackout night {night}")
            }
            RoomCapacity { room_type, night, used, capacity } => write!(
                f,
                "room type {room_type} night {night}: {used} rooms used, capacity {capacity}"
            ),
            GroupCapacity { group, night, used, capacity } => write!(
                f,
                "real group {group} night {night}: {used} rooms used, capacity {capacity}"
            ),
            ObjectiveMode { reported, model } => {
                write!(f, "solution is in {reported} mode, model in {model} mode")
            }
            Objective { reported, recomputed } => write!(
                f,
                "reported objective {reported} differs from recomputed {recomputed}"
            ),
        }
    }
}

/// Checks a clearing solution by expanding each arrival into its stay.
pub fn validate_solution(
    model: &ForwardModel,
    solution: &ClearingSolution,
) -> Vec<SolutionViolation> {
    let stays: Vec<Stay> = solution
        .accepted
        .iter()
        .map(|(&customer, &arrival)| {
            let nights = model.bid(customer).map_or(0, |mb| mb.bid.nights);
            Stay {
                customer,
                nights: (arrival..arrival + nights).collect(),
            }
        })
        .collect();
    let mut violations = Vec::new();
    if solution.objective_mode != model.objective_mode() {
        violations.push(SolutionViolation::ObjectiveMode {
            reported: solution.objective_mode,
            model: model.objective_mode(),
        });
    }
    violations.extend(validate_stays(model, &stays, Some(solution.objective)));
    violations
}

/// Checks explicit stays against stay length, contiguity, window, blackout,
/// room-type capacity and real-group capacity, and optionally the objective.
pub fn validate_stays(
    model: &ForwardModel,
    stays: &[Stay],
    reported_objective: Option<Money>,
) -> Vec<SolutionViolation> {
    use SolutionViolation::*;

    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    let mut room_use: BTreeMap<(RoomTypeId, u32), u32> = BTreeMap::new();
    let mut recomputed = Money::ZERO;

    for stay in stays {
        let customer = stay.customer;
        let Some(mb) = model.bid(customer) else {
            violations.push(UnknownCustomer { customer });
            continue;
        };
        if !seen.insert(customer) {
            violations.push(DuplicateCustomer { customer });
            continue;
        }
        recomputed += mb.coefficient;
        let bid = &mb.bid;

        let mut nights = stay.nights.clone();
        nights.sort_unstable();
        if nights.len() as u32 != bid.nights {
            violations.push(StayLength {
                customer,
                expected: bid.nights,
                actual: nights.len() as u32,
            });
        }
        if nights.windows(2).any(|w| w[1] != w[0] + 1) {
            violations.push(NonContiguousStay { customer });
        }
        for &night in &nights {
            if night < bid.window_lo || night > bid.window_hi {
                violations.push(Window {
                    customer,
                    night,
                    window_lo: bid.window_lo,
                    window_hi: bid.window_hi,
                });
            }
            if bid.blackout_days.contains(&night) {
                violations.push(Blackout { customer, night });
            }
            for line in &bid.lines {
                *room_use.entry((line.room_type, night)).or_default() += line.rooms_requested;
            }
        }
    }

    let mut group_use: BTreeMap<(GroupId, u32), u32> = BTreeMap::new();
    for (&(room_type, night), &used) in &room_use {
        let rt = model
            .room_types()
            .iter()
            .find(|rt| rt.id == room_type)
            .expect("bids only reference known room types");
        if used > rt.auctioned_count {
            violations.push(RoomCapacity {
                room_type,
                night,
                used,
                capacity: rt.auctioned_count,
            });
        }
        *group_use.entry((rt.real_group, night)).or_default() += used;
    }
    for (&(group, night), &used) in &group_use {
        let capacity = model
            .groups()
            .iter()
            .find(|g| g.id == group)
            .map_or(0, |g| g.capacity);
        if used > capacity {
            violations.push(GroupCapacity {
                group,
                night,
                used,
                capacity,
            });
        }
    }

    if let Some(reported) = reported_objective {
        if reported != recomputed {
            violations.push(Objective {
                reported,
                recomputed,
            });
        }
    }
    violations
}
