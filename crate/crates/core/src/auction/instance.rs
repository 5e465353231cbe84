use std::collections::BTreeSet;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{
    Bid, BidLine, CustomerId, DateHorizon, ForwardAuction, GroupId, RealRoomGroup, RoomType,
    RoomTypeId,
};
use crate::error::{Error, Result};
use crate::money::Money;

pub type BidLineDoc = BidLine;

fn default_currency() -> String {
    "EUR".to_owned()
}

/// On-disk form of a forward auction with its bids.
///
/// Money fields are integer cents in `currency`; window bounds and blackout
/// days are ISO-8601 dates. `groups` may be omitted, in which case every room
/// type is its own real group sized by its `auctioned_count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(default = "default_currency")]
    pub currency: String,
    pub horizon: DateHorizon,
    pub room_types: Vec<RoomTypeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<RealRoomGroup>>,
    #[serde(default)]
    pub bids: Vec<BidDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomTypeDoc {
    pub id: RoomTypeId,
    pub auctioned_count: u32,
    pub min_price: Money,
    #[serde(default)]
    pub operating_cost: Money,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_group: Option<GroupId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BidDoc {
    pub customer_id: CustomerId,
    pub lines: Vec<BidLineDoc>,
    pub window_lo: NaiveDate,
    pub window_hi: NaiveDate,
    pub nights: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blackout_days: Vec<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub currency: String,
    pub auction: ForwardAuction,
    pub bids: Vec<Bid>,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        Self::from_doc(doc)
    }

    pub fn from_doc(doc: InstanceDoc) -> Result<Self> {
        let horizon = doc.horizon;
        let room_types: Vec<RoomType> = doc
            .room_types
            .iter()
            .map(|rt| RoomType {
                id: rt.id,
                auctioned_count: rt.auctioned_count,
                min_price: rt.min_price,
                operating_cost: rt.operating_cost,
                real_group: rt.real_group.unwrap_or(GroupId(rt.id.0)),
            })
            .collect();
        let auction = match doc.groups {
            Some(groups) => ForwardAuction::new(horizon, room_types, groups)?,
            None => ForwardAuction::with_singleton_groups(horizon, room_types)?,
        };

        let index = |date: NaiveDate, location: String| {
            horizon.date_index(date).map_err(|e| Error::Parse {
                location,
                message: e.to_string(),
            })
        };
        let mut bids = Vec::with_capacity(doc.bids.len());
        let mut ids = BTreeSet::new();
        for (i, b) in doc.bids.into_iter().enumerate() {
            if !ids.insert(b.customer_id) {
                return Err(Error::Parse {
                    location: format!("bids[{i}].customer_id"),
                    message: format!("duplicate customer id {}", b.customer_id),
                });
            }
            let window_lo = index(b.window_lo, format!("bids[{i}].window_lo"))?;
            let window_hi = index(b.window_hi, format!("bids[{i}].window_hi"))?;
            let blackout_days = b
                .blackout_days
                .iter()
                .enumerate()
                .map(|(j, &d)| index(d, format!("bids[{i}].blackout_days[{j}]")))
                .collect::<Result<_>>()?;
            bids.push(Bid {
                customer_id: b.customer_id,
                lines: b.lines,
                window_lo,
                window_hi,
                nights: b.nights,
                blackout_days,
            });
        }

        Ok(Instance {
            currency: doc.currency,
            auction,
            bids,
        })
    }

    pub fn to_doc(&self) -> InstanceDoc {
        let horizon = *self.auction.horizon();
        // Indices come from a validated horizon, so date_at only fails on
        // out-of-range bids, which are kept as the nearest edge date.
        let date = |i: u32| {
            horizon
                .date_at(i.clamp(1, horizon.len()))
                .expect("clamped index is in range")
        };
        InstanceDoc {
            currency: self.currency.clone(),
            horizon,
            room_types: self
                .auction
                .room_types()
                .iter()
                .map(|rt| RoomTypeDoc {
                    id: rt.id,
                    auctioned_count: rt.auctioned_count,
                    min_price: rt.min_price,
                    operating_cost: rt.operating_cost,
                    real_group: Some(rt.real_group),
                })
                .collect(),
            groups: Some(self.auction.groups().to_vec()),
            bids: self
                .bids
                .iter()
                .map(|b| BidDoc {
                    customer_id: b.customer_id,
                    lines: b.lines.clone(),
                    window_lo: date(b.window_lo),
                    window_hi: date(b.window_hi),
                    nights: b.nights,
                    blackout_days: b.blackout_days.iter().map(|&d| date(d)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("instance documents always serialize")
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Instance::from_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "horizon": {"start_date": "2023-06-01", "length": 15},
        "room_types": [{"id": 1, "auctioned_count": 2, "min_price": 6500}],
        "bids": [
            {"customer_id": 1, "lines": [{"room_type": 1, "rooms_requested": 1, "price_per_night": 7000}],
             "window_lo": "2023-06-02", "window_hi": "2023-06-04", "nights": 3,
             "blackout_days": ["2023-06-03"]}
        ]
    }"#;

    #[test]
    fn dates_become_indices() {
        let inst = Instance::from_json(DOC).unwrap();
        assert_eq!(inst.currency, "EUR");
        assert_eq!(inst.auction.groups().len(), 1);
        let b = &inst.bids[0];
        assert_eq!((b.window_lo, b.window_hi, b.nights), (2, 4, 3));
        assert_eq!(b.blackout_days.iter().copied().collect::<Vec<_>>(), vec![3]);

        let again = Instance::from_doc(inst.to_doc()).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn out_of_horizon_window_reports_location() {
        let doc = DOC.replace("2023-06-04", "2023-07-04");
        match Instance::from_json(&doc) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "bids[0].window_hi"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let doc = DOC.replace("\"nights\"", "\"nightz\": 1, \"nights\"");
        assert!(Instance::from_json(&doc).is_err());
    }
}
