use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Attribute, Condition, Direction, PriceRule, RequestAttributes};
use crate::error::{Error, Result};
use crate::money::Money;
use crate::reverse::{optimize_price, AcceptedPriceDistribution, PricingDecision};

/// What a hotel can offer and what it costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HotelProfile {
    pub hotel_rating: f64,
    /// Meters.
    pub distance_to_sea: f64,
    /// Extra cost per night for each breakfast type on offer. Type 0 (no
    /// breakfast) is always available and free.
    #[serde(default)]
    pub breakfast_costs: BTreeMap<u8, Money>,
    /// Cost of the bare room per night.
    pub base_cost: Money,
}

impl HotelProfile {
    pub fn new(hotel_rating: f64, distance_to_sea: f64, base_cost: Money) -> Self {
        HotelProfile {
            hotel_rating,
            distance_to_sea,
            breakfast_costs: BTreeMap::new(),
            base_cost,
        }
    }

    pub fn with_breakfast(mut self, breakfast_type: u8, cost: Money) -> Self {
        self.breakfast_costs.insert(breakfast_type, cost);
        self
    }

    /// `None` when the breakfast type is not offered.
    pub fn breakfast_cost(&self, breakfast_type: u8) -> Option<Money> {
        if breakfast_type == 0 {
            return Some(Money::ZERO);
        }
        self.breakfast_costs.get(&breakfast_type).copied()
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (attr, v) in [
            (Attribute::Rating, self.hotel_rating),
            (Attribute::Distance, self.distance_to_sea),
        ] {
            let (lo, hi) = attr.domain();
            if !(v.is_finite() && lo <= v && v <= hi) {
                out.push(format!("{attr} = {v} outside [{lo}, {hi}]"));
            }
        }
        for (t, c) in &self.breakfast_costs {
            if *t > 2 {
                out.push(format!("unknown breakfast type {t}"));
            }
            if *c < Money::ZERO {
                out.push(format!("breakfast {t} has negative cost {c}"));
            }
        }
        if self.base_cost < Money::ZERO {
            out.push(format!("negative base cost {}", self.base_cost));
        }
        out
    }

    fn satisfies(&self, attribute: Attribute, condition: &Condition) -> bool {
        match (attribute, condition) {
            (Attribute::Rating, c) => c.matches(self.hotel_rating),
            (Attribute::Distance, c) => c.matches(self.distance_to_sea),
            (Attribute::Breakfast, Condition::Equals(t)) => self.breakfast_cost(*t).is_some(),
            _ => true,
        }
    }

    /// Extra cost per night of meeting the rule's amenity requirements.
    fn amenity_cost(&self, rule: &PriceRule) -> Option<Money> {
        match requested_breakfast(rule) {
            Some(t) => self.breakfast_cost(t),
            None => Some(Money::ZERO),
        }
    }
}

fn requested_breakfast(rule: &PriceRule) -> Option<u8> {
    rule.antecedents.iter().find_map(|a| match a.condition {
        Condition::Equals(t) if a.attribute == Attribute::Breakfast => Some(t),
        _ => None,
    })
}

/// Keeps the rules whose antecedents the hotel can satisfy: its fixed rating
/// and distance fall inside the intervals, and any breakfast it names is on
/// offer.
pub fn filter_feasible(rules: &[PriceRule], profile: &HotelProfile) -> Vec<PriceRule> {
    rules
        .iter()
        .filter(|r| {
            r.antecedents
                .iter()
                .all(|a| profile.satisfies(a.attribute, &a.condition))
        })
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateSource {
    /// Highest applicable lower bound, within every applicable upper bound.
    Rules,
    /// Only upper bounds applied; the distribution optimum capped by them.
    UpperBound,
    /// No rule applied.
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceEstimate {
    pub price: Money,
    pub source: EstimateSource,
    pub applicable: Vec<PriceRule>,
    /// Set whenever the fallback distribution was consulted.
    pub fallback: Option<PricingDecision>,
}

/// Estimates the price to offer for `request`.
///
/// The price is the largest lower bound among applicable rules, which must
/// not exceed the smallest applicable upper bound. With upper bounds only, the
/// fallback optimum is capped at the smallest one; with no applicable rule the
/// fallback optimum is used as is.
pub fn estimate_price(
    rules: &[PriceRule],
    request: &RequestAttributes,
    fallback: &AcceptedPriceDistribution,
    cost: Money,
) -> Result<PriceEstimate> {
    let applicable: Vec<PriceRule> = rules
        .iter()
        .filter(|r| r.applies_to(request))
        .cloned()
        .collect();
    let lower = applicable
        .iter()
        .filter(|r| r.direction == Direction::AtLeast)
        .map(|r| r.bound)
        .max();
    let upper = applicable
        .iter()
        .filter(|r| r.direction == Direction::AtMost)
        .map(|r| r.bound)
        .min();

    let (price, source, decision) = match (lower, upper) {
        (Some(lo), Some(hi)) if lo > hi => {
            let (lower_rules, upper_rules) = applicable
                .into_iter()
                .partition(|r| r.direction == Direction::AtLeast);
            return Err(Error::RuleConflict {
                lower_bound: lo,
                upper_bound: hi,
                lower: lower_rules,
                upper: upper_rules,
            });
        }
        (Some(lo), _) => (lo, EstimateSource::Rules, None),
        (None, Some(hi)) => {
            let d = optimize_price(fallback, cost);
            (d.price.min(hi), EstimateSource::UpperBound, Some(d))
        }
        (None, None) => {
            let d = optimize_price(fallback, cost);
            (d.price, EstimateSource::Fallback, Some(d))
        }
    };
    Ok(PriceEstimate {
        price,
        source,
        applicable,
        fallback: decision,
    })
}

/// Amenities the hotel commits to with its offer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AmenityConfig {
    pub breakfast_type: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OfferSelection {
    pub price: Money,
    pub amenities: AmenityConfig,
    /// Extra cost per night of the amenities.
    pub amenity_cost: Money,
    /// The rule backing the offer.
    pub rule: Option<PriceRule>,
    /// No applicable rule admits the price; the hotel's defaults are offered.
    pub defaults_used: bool,
}

/// Picks the cheapest amenity configuration backed by a rule admitting `price`.
///
/// Among applicable rules that admit the price and whose amenities the hotel
/// offers, the one with the lowest amenity cost wins; ties go to fewer
/// antecedents, then to the earlier attribute sequence.
pub fn select_offer(applicable: &[PriceRule], price: Money, profile: &HotelProfile) -> OfferSelection {
    let best = applicable
        .iter()
        .filter(|r| r.admits(price))
        .filter_map(|r| profile.amenity_cost(r).map(|c| (c, r)))
        .min_by(|(ca, a), (cb, b)| {
            ca.cmp(cb)
                .then(a.antecedents.len().cmp(&b.antecedents.len()))
                .then_with(|| {
                    let attrs = |r: &PriceRule| r.antecedents.iter().map(|x| x.attribute).collect::<Vec<_>>();
                    attrs(a).cmp(&attrs(b))
                })
                .then_with(|| a.total_cmp(b))
        });
    match best {
        Some((cost, rule)) => OfferSelection {
            price,
            amenities: AmenityConfig {
                breakfast_type: requested_breakfast(rule).unwrap_or(0),
            },
            amenity_cost: cost,
            rule: Some(rule.clone()),
            defaults_used: false,
        },
        None => OfferSelection {
            price,
            amenities: AmenityConfig::default(),
            amenity_cost: Money::ZERO,
            rule: None,
            defaults_used: true,
        },
    }
}
