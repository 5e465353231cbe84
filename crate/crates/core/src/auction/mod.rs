//! Forward-auction domain types: the booking horizon, room types, real-room
//! groups and customer bids, plus structural validation.
//!
//! Dates only exist at the edges. Everything past [`DateHorizon::date_index`]
//! works on 1-based night indices into the horizon.

mod bid;
mod horizon;
mod instance;
mod validate;

pub use bid::{Bid, BidLine, BidTuple, CustomerId};
pub use horizon::DateHorizon;
pub use instance::{load_instance, BidDoc, BidLineDoc, Instance, InstanceDoc, RoomTypeDoc};
pub use validate::{bids_from_tuples, validate_bid, BidReport, BidViolation};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::money::Money;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RoomTypeId(pub u32);

impl fmt::Display for RoomTypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupId(pub u32);

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A sellable (possibly virtual) room type, e.g. "double room, continental breakfast".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomType {
    pub id: RoomTypeId,
    /// Rooms of this type put up for auction on every night.
    pub auctioned_count: u32,
    pub min_price: Money,
    pub operating_cost: Money,
    pub real_group: GroupId,
}

/// Physical rooms shared by one or more virtual room types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealRoomGroup {
    pub id: GroupId,
    pub capacity: u32,
    pub member_room_types: BTreeSet<RoomTypeId>,
}

/// Everything the hotelier fixes when opening a forward auction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardAuction {
    horizon: DateHorizon,
    room_types: Vec<RoomType>,
    groups: Vec<RealRoomGroup>,
}

impl ForwardAuction {
    /// Checks the room-type/group structure: unique ids, strictly positive
    /// minimum prices, non-negative costs, and a partition of the room types
    /// into groups that agrees with each type's `real_group`.
    pub fn new(
        horizon: DateHorizon,
        room_types: Vec<RoomType>,
        groups: Vec<RealRoomGroup>,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        let mut seen = BTreeSet::new();
        for rt in &room_types {
            if !seen.insert(rt.id) {
                problems.push(format!("duplicate room type {}", rt.id));
            }
            if rt.min_price <= Money::ZERO {
                problems.push(format!("room type {}: min_price must be positive", rt.id));
            }
            if rt.operating_cost < Money::ZERO {
                problems.push(format!(
                    "room type {}: operating_cost must be non-negative",
                    rt.id
                ));
            }
        }

        let mut owner: BTreeMap<RoomTypeId, GroupId> = BTreeMap::new();
        let mut group_ids = BTreeSet::new();
        for g in &groups {
            if !group_ids.insert(g.id) {
                problems.push(format!("duplicate group {}", g.id));
            }
            if g.capacity == 0 {
                problems.push(format!("group {}: capacity must be positive", g.id));
            }
            for &member in &g.member_room_types {
                if let Some(prev) = owner.insert(member, g.id) {
                    problems.push(format!(
                        "room type {member} belongs to both group {prev} and group {}",
                        g.id
                    ));
                }
                if !seen.contains(&member) {
                    problems.push(format!("group {} lists unknown room type {member}", g.id));
                }
            }
        }
        for rt in &room_types {
            match owner.get(&rt.id) {
                None => problems.push(format!("room type {} belongs to no group", rt.id)),
                Some(&g) if g != rt.real_group => problems.push(format!(
                    "room type {} names group {} but is listed under group {g}",
                    rt.id, rt.real_group
                )),
                Some(_) => {}
            }
        }

        if problems.is_empty() {
            Ok(ForwardAuction {
                horizon,
                room_types,
                groups,
            })
        } else {
            Err(Error::InvalidInstance(problems.join("; ")))
        }
    }

    /// One group per room type, with capacity equal to the auctioned count.
    pub fn with_singleton_groups(horizon: DateHorizon, room_types: Vec<RoomType>) -> Result<Self> {
        let mut room_types = room_types;
        let groups = room_types
            .iter_mut()
            .map(|rt| {
                rt.real_group = GroupId(rt.id.0);
                RealRoomGroup {
                    id: GroupId(rt.id.0),
                    capacity: rt.auctioned_count.max(1),
                    member_room_types: BTreeSet::from([rt.id]),
                }
            })
            .collect();
        Self::new(horizon, room_types, groups)
    }

    pub fn horizon(&self) -> &DateHorizon {
        &self.horizon
    }

    pub fn room_types(&self) -> &[RoomType] {
        &self.room_types
    }

    pub fn groups(&self) -> &[RealRoomGroup] {
        &self.groups
    }

    pub fn room_type(&self, id: RoomTypeId) -> Option<&RoomType> {
        self.room_types.iter().find(|rt| rt.id == id)
    }
}
