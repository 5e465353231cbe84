//! Quantitative association rules over past reverse-auction offers.
//!
//! Each record describes a guest request (season, rating, distance to the
//! sea, beds, breakfast, nearby sites) together with the price the guest
//! accepted. [`mine_rules`] finds rules such as
//!
//! ```text
//! distance_to_sea ∈ [5,25] ∧ breakfast_type = 1 ∧ sites_within_10km ≥ 1 → p ≥ 75.00
//! ```
//!
//! and [`estimate_price`] / [`select_offer`] turn the rules that apply to a new
//! request into an offer price plus the cheapest amenity configuration that
//! backs it.

mod dataset;
mod estimate;
mod evaluate;
mod lattice;
mod miner;
mod synthetic;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::money::Money;

pub use dataset::{
    read_dataset, read_dataset_from, write_dataset, write_dataset_to, write_ruleset,
};
pub use estimate::{
    estimate_price, filter_feasible, select_offer, AmenityConfig, EstimateSource, HotelProfile,
    OfferSelection, PriceEstimate,
};
pub use evaluate::{evaluate_estimator, split_train_test, EvalCase, Evaluation};
pub use lattice::CandidateLattice;
pub use miner::{mine_rules, MinerConfig};
pub use synthetic::{distance_appeal, generate_synthetic, synthetic_price, SyntheticAttributes};

/// Lowest and highest accepted price a record may carry.
pub const PRICE_FLOOR: Money = Money::from_units(10);
pub const PRICE_CEILING: Money = Money::from_units(250);

/// One historical reverse auction and the price its guest accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfferRecord {
    /// 1 low, 2 intermediate, 3 high season.
    pub period_visiting: u8,
    pub hotel_rating: f64,
    /// Meters.
    pub distance_to_sea: f64,
    pub beds_requested: u8,
    /// 0 none, 1 continental, 2 American.
    pub breakfast_type: u8,
    pub sites_within_10km: u8,
    /// Per night.
    pub accepted_price: Money,
}

impl OfferRecord {
    pub fn value(&self, attribute: Attribute) -> f64 {
        match attribute {
            Attribute::Period => self.period_visiting.into(),
            Attribute::Rating => self.hotel_rating,
            Attribute::Distance => self.distance_to_sea,
            Attribute::Beds => self.beds_requested.into(),
            Attribute::Breakfast => self.breakfast_type.into(),
            Attribute::Sites => self.sites_within_10km.into(),
        }
    }

    pub fn request(&self) -> RequestAttributes {
        RequestAttributes {
            period_visiting: Some(self.period_visiting),
            hotel_rating: Some(self.hotel_rating),
            distance_to_sea: Some(self.distance_to_sea),
            beds_requested: Some(self.beds_requested),
            breakfast_type: Some(self.breakfast_type),
            sites_within_10km: Some(self.sites_within_10km),
        }
    }

    /// Lists every attribute outside its domain, plus the price range.
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.request().violations();
        if self.accepted_price < PRICE_FLOOR || self.accepted_price > PRICE_CEILING {
            out.push(format!(
                "accepted_price {} outside [{}, {}]",
                self.accepted_price, PRICE_FLOOR, PRICE_CEILING
            ));
        }
        out
    }
}

/// The six request characteristics, in record field order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Attribute {
    #[serde(rename = "period_visiting")]
    Period,
    #[serde(rename = "hotel_rating")]
    Rating,
    #[serde(rename = "distance_to_sea")]
    Distance,
    #[serde(rename = "beds_requested")]
    Beds,
    #[serde(rename = "breakfast_type")]
    Breakfast,
    #[serde(rename = "sites_within_10km")]
    Sites,
}

impl Attribute {
    pub const ALL: [Attribute; 6] = [
        Attribute::Period,
        Attribute::Rating,
        Attribute::Distance,
        Attribute::Beds,
        Attribute::Breakfast,
        Attribute::Sites,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Period => "period_visiting",
            Attribute::Rating => "hotel_rating",
            Attribute::Distance => "distance_to_sea",
            Attribute::Beds => "beds_requested",
            Attribute::Breakfast => "breakfast_type",
            Attribute::Sites => "sites_within_10km",
        }
    }

    pub fn is_categorical(self) -> bool {
        matches!(self, Attribute::Period | Attribute::Breakfast)
    }

    /// Inclusive domain.
    pub fn domain(self) -> (f64, f64) {
        match self {
            Attribute::Period => (1.0, 3.0),
            Attribute::Rating => (1.0, 5.0),
            Attribute::Distance => (0.0, 10_000.0),
            Attribute::Beds => (1.0, 3.0),
            Attribute::Breakfast => (0.0, 2.0),
            Attribute::Sites => (0.0, 10.0),
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A reverse-auction request. Unset attributes are left to the hotelier.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestAttributes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_visiting: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hotel_rating: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_to_sea: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beds_requested: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakfast_type: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites_within_10km: Option<u8>,
}

impl RequestAttributes {
    pub fn get(&self, attribute: Attribute) -> Option<f64> {
        match attribute {
            Attribute::Period => self.period_visiting.map(f64::from),
            Attribute::Rating => self.hotel_rating,
            Attribute::Distance => self.distance_to_sea,
            Attribute::Beds => self.beds_requested.map(f64::from),
            Attribute::Breakfast => self.breakfast_type.map(f64::from),
            Attribute::Sites => self.sites_within_10km.map(f64::from),
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in Attribute::ALL {
            if let Some(v) = self.get(a) {
                let (lo, hi) = a.domain();
                if !(v.is_finite() && lo <= v && v <= hi) {
                    out.push(format!("{a} = {v} outside [{lo}, {hi}]"));
                }
            }
        }
        out
    }
}

/// Condition on one attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Equals(u8),
    /// Closed interval; a missing end is unbounded.
    Range { min: Option<f64>, max: Option<f64> },
}

impl Condition {
    pub fn matches(&self, value: f64) -> bool {
        match *self {
            Condition::Equals(c) => value == f64::from(c),
            Condition::Range { min, max } => {
                min.is_none_or(|m| value >= m) && max.is_none_or(|m| value <= m)
            }
        }
    }

    /// True when every value satisfying `self` also satisfies `other`.
    pub fn within(&self, other: &Condition) -> bool {
        match (*self, *other) {
            (Condition::Equals(a), Condition::Equals(b)) => a == b,
            (Condition::Range { min: a0, max: a1 }, Condition::Range { min: b0, max: b1 }) => {
                let lo_ok = match (a0, b0) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(a), Some(b)) => a >= b,
                };
                let hi_ok = match (a1, b1) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(a), Some(b)) => a <= b,
                };
                lo_ok && hi_ok
            }
            _ => false,
        }
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        fn end(v: Option<f64>, missing: f64) -> f64 {
            v.unwrap_or(missing)
        }
        match (self, other) {
            (Condition::Equals(a), Condition::Equals(b)) => a.cmp(b),
            (Condition::Equals(_), Condition::Range { .. }) => Ordering::Less,
            (Condition::Range { .. }, Condition::Equals(_)) => Ordering::Greater,
            (Condition::Range { min: a0, max: a1 }, Condition::Range { min: b0, max: b1 }) => {
                end(*a0, f64::NEG_INFINITY)
                    .total_cmp(&end(*b0, f64::NEG_INFINITY))
                    .then(end(*a1, f64::INFINITY).total_cmp(&end(*b1, f64::INFINITY)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Antecedent {
    pub attribute: Attribute,
    pub condition: Condition,
}

impl Antecedent {
    pub fn matches(&self, record: &OfferRecord) -> bool {
        self.condition.matches(record.value(self.attribute))
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.attribute
            .cmp(&other.attribute)
            .then_with(|| self.condition.cmp_key(&other.condition))
    }
}

impl fmt::Display for Antecedent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.condition {
            Condition::Equals(v) => write!(f, "{} = {v}", self.attribute),
            Condition::Range {
                min: Some(l),
                max: Some(h),
            } => write!(f, "{} ∈ [{l},{h}]", self.attribute),
            Condition::Range {
                min: Some(l),
                max: None,
            } => write!(f, "{} ≥ {l}", self.attribute),
            Condition::Range {
                min: None,
                max: Some(h),
            } => write!(f, "{} ≤ {h}", self.attribute),
            Condition::Range {
                min: None,
                max: None,
            } => write!(f, "{} any", self.attribute),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AtLeast,
    AtMost,
}

impl Direction {
    pub fn admits(self, bound: Money, price: Money) -> bool {
        match self {
            Direction::AtLeast => price >= bound,
            Direction::AtMost => price <= bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Direction::AtLeast => "≥",
            Direction::AtMost => "≤",
        }
    }
}

/// `antecedents → p ≥ bound` or `antecedents → p ≤ bound`.
///
/// Antecedents are sorted by attribute and name distinct attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceRule {
    pub antecedents: Vec<Antecedent>,
    pub direction: Direction,
    pub bound: Money,
    pub support: f64,
    pub confidence: f64,
}

impl PriceRule {
    pub fn matches(&self, record: &OfferRecord) -> bool {
        self.antecedents.iter().all(|a| a.matches(record))
    }

    /// Antecedents on unset request attributes count as satisfiable.
    pub fn applies_to(&self, request: &RequestAttributes) -> bool {
        self.antecedents.iter().all(|a| match request.get(a.attribute) {
            Some(v) => a.condition.matches(v),
            None => true,
        })
    }

    pub fn admits(&self, price: Money) -> bool {
        self.direction.admits(self.bound, price)
    }

    /// Order used for canonical rule listings.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.direction
            .cmp(&other.direction)
            .then(self.antecedents.len().cmp(&other.antecedents.len()))
            .then_with(|| {
                self.antecedents
                    .iter()
                    .zip(&other.antecedents)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
            .then(self.bound.cmp(&other.bound))
    }

    /// True when `general` applies wherever `self` does.
    pub fn generalized_by(&self, general: &PriceRule) -> bool {
        general.antecedents.iter().all(|g| {
            self.antecedents
                .iter()
                .any(|a| a.attribute == g.attribute && a.condition.within(&g.condition))
        })
    }
}

impl fmt::Display for PriceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.antecedents.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            write!(f, "{a}")?;
        }
        write!(
            f,
            " → p {} {} (sup={:.3}, conf={:.3})",
            self.direction.symbol(),
            self.bound,
            self.support,
            self.confidence
        )
    }
}

/// Sorts rules into their canonical listing order.
pub fn sort_rules(rules: &mut [PriceRule]) {
    rules.sort_by(|a, b| a.total_cmp(b));
}
