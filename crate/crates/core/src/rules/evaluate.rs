use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    estimate_price, filter_feasible, mine_rules, EstimateSource, HotelProfile, MinerConfig,
    OfferRecord,
};
use crate::error::{Error, Result};
use crate::money::Money;
use crate::reverse::{empirical_distribution, optimize_price};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalCase {
    pub record: OfferRecord,
    pub estimate: Money,
    /// `None` when the applicable rules conflicted and the midpoint of the
    /// two bounds was used instead.
    pub source: Option<EstimateSource>,
    pub baseline: Money,
}

impl EvalCase {
    pub fn absolute_error(&self) -> Money {
        (self.estimate - self.record.accepted_price).abs()
    }

    /// Request attributes followed by `estimate(actual)`.
    pub fn row(&self) -> String {
        let r = &self.record;
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}({})",
            r.period_visiting,
            r.hotel_rating,
            r.distance_to_sea,
            r.beds_requested,
            r.breakfast_type,
            r.sites_within_10km,
            self.estimate,
            r.accepted_price
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    /// Euros.
    pub mae: f64,
    pub mape: f64,
    /// Errors of pricing every request at the training distribution's optimum.
    pub baseline_mae: f64,
    pub baseline_mape: f64,
    pub rules: usize,
    pub conflicts: usize,
    pub cases: Vec<EvalCase>,
}

/// Shuffles with a seeded generator and splits off the first
/// `round(train_fraction * n)` records for training.
pub fn split_train_test(
    records: &[OfferRecord],
    train_fraction: f64,
    seed: u64,
) -> (Vec<OfferRecord>, Vec<OfferRecord>) {
    let mut shuffled = records.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = ((train_fraction.clamp(0.0, 1.0) * records.len() as f64).round() as usize)
        .min(records.len());
    let test = shuffled.split_off(cut);
    (shuffled, test)
}

/// Mines on `train` and prices every `test` request, comparing with the
/// accepted price.
///
/// Each test request is priced for a hotel matching its rating and distance
/// and offering every breakfast type. `cost` feeds the distribution optimum
/// used as fallback and as the baseline.
pub fn evaluate_estimator(
    train: &[OfferRecord],
    test: &[OfferRecord],
    config: &MinerConfig,
    cost: Money,
) -> Result<Evaluation> {
    if test.is_empty() {
        return Err(Error::EmptyInput("test set"));
    }
    let rules = mine_rules(train, config)?;
    let train_prices: Vec<Money> = train.iter().map(|r| r.accepted_price).collect();
    let fallback = empirical_distribution(&train_prices)?;
    let baseline = optimize_price(&fallback, cost).price;

    let mut cases = Vec::with_capacity(test.len());
    let mut conflicts = 0;
    for record in test {
        let profile = HotelProfile::new(record.hotel_rating, record.distance_to_sea, cost)
            .with_breakfast(1, Money::ZERO)
            .with_breakfast(2, Money::ZERO);
        let feasible = filter_feasible(&rules, &profile);
        let (estimate, source) = match estimate_price(&feasible, &record.request(), &fallback, cost) {
            Ok(e) => (e.price, Some(e.source)),
            Err(Error::RuleConflict {
                lower_bound,
                upper_bound,
                ..
            }) => {
                conflicts += 1;
                let mid = (lower_bound.cents() + upper_bound.cents()) / 2;
                (Money::from_cents(mid), None)
            }
            Err(e) => return Err(e),
        };
        cases.push(EvalCase {
            record: record.clone(),
            estimate,
            source,
            baseline,
        });
    }

    let (mae, mape) = errors(cases.iter().map(|c| (c.estimate, c.record.accepted_price)));
    let (baseline_mae, baseline_mape) =
        errors(cases.iter().map(|c| (c.baseline, c.record.accepted_price)));
    Ok(Evaluation {
        mae,
        mape,
        baseline_mae,
        baseline_mape,
        rules: rules.len(),
        conflicts,
        cases,
    })
}

/// Mean absolute error in euros and mean absolute percentage error.
fn errors(pairs: impl Iterator<Item = (Money, Money)>) -> (f64, f64) {
    let (mut abs, mut pct, mut n) = (0.0, 0.0, 0usize);
    for (est, actual) in pairs {
        let e = (est - actual).abs().as_f64();
        abs += e;
        pct += e / actual.as_f64();
        n += 1;
    }
    (abs / n as f64, pct / n as f64)
}
