//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use hotel_auction::rules::{
    sort_rules, Antecedent, CandidateLattice, Direction, MinerConfig, OfferRecord, PriceRule,
};
use hotel_auction::Money;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rec(period: u8, rating: f64, dist: f64, beds: u8, bf: u8, sites: u8, price: i64) -> OfferRecord {
    OfferRecord {
        period_visiting: period,
        hotel_rating: rating,
        distance_to_sea: dist,
        beds_requested: beds,
        breakfast_type: bf,
        sites_within_10km: sites,
        accepted_price: Money::from_units(price),
    }
}

pub fn desk_config(bins: usize) -> MinerConfig {
    MinerConfig {
        support: 0.25,
        confidence: 1.0,
        max_antecedents: 2,
        bins,
    }
}

/// Every rule over every antecedent set of the lattice, checked by direct
/// counting, then reduced to the tightest bound per set and stripped of rules
/// some strictly more general valid rule bounds at least as tightly.
pub fn enumerate(records: &[OfferRecord], config: &MinerConfig) -> Vec<PriceRule> {
    let lattice = CandidateLattice::build(records, config.bins);
    let items = lattice.items();
    let n = records.len();

    let mut sets: Vec<Vec<Antecedent>> = Vec::new();
    fn grow(items: &[Antecedent], from: usize, cur: &mut Vec<Antecedent>, max: usize, out: &mut Vec<Vec<Antecedent>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in from..items.len() {
            if cur.iter().any(|a| a.attribute == items[i].attribute) {
                continue;
            }
            cur.push(items[i]);
            grow(items, i + 1, cur, max, out);
            cur.pop();
        }
    }
    grow(items, 0, &mut Vec::new(), config.max_antecedents, &mut sets);

    let mut valid = Vec::new();
    for ants in sets {
        let matched: Vec<&OfferRecord> = records
            .iter()
            .filter(|r| ants.iter().all(|a| a.matches(r)))
            .collect();
        if matched.is_empty() {
            continue;
        }
        for dir in [Direction::AtLeast, Direction::AtMost] {
            let mut best: Option<(Money, usize)> = None;
            for v in matched.iter().map(|r| r.accepted_price) {
                let hits = matched.iter().filter(|r| dir.admits(v, r.accepted_price)).count();
                let support_ok = hits as f64 >= config.support * n as f64 - 1e-9;
                let confidence_ok = hits as f64 >= config.confidence * matched.len() as f64 - 1e-9;
                if !(support_ok && confidence_ok) {
                    continue;
                }
                let tighter = match (best, dir) {
                    (None, _) => true,
                    (Some((b, _)), Direction::AtLeast) => v > b,
                    (Some((b, _)), Direction::AtMost) => v < b,
                };
                if tighter {
                    best = Some((v, hits));
                }
            }
            if let Some((bound, hits)) = best {
                valid.push(PriceRule {
                    antecedents: ants.clone(),
                    direction: dir,
                    bound,
                    support: hits as f64 / n as f64,
                    confidence: hits as f64 / matched.len() as f64,
                });
            }
        }
    }

    let mut kept: Vec<PriceRule> = valid
        .iter()
        .filter(|r| {
            !valid.iter().any(|g| {
                g.direction == r.direction
                    && g.antecedents != r.antecedents
                    && r.generalized_by(g)
                    && g.direction.admits(r.bound, g.bound)
            })
        })
        .cloned()
        .collect();
    sort_rules(&mut kept);
    kept
}

/// Eight offers with a clear price split on breakfast and distance.
pub fn desk_eight() -> Vec<OfferRecord> {
    vec![
        rec(1, 3.0, 50.0, 1, 0, 2, 45),
        rec(1, 3.5, 120.0, 2, 1, 4, 70),
        rec(2, 4.0, 20.0, 2, 1, 5, 90),
        rec(2, 4.5, 300.0, 3, 2, 1, 110),
        rec(3, 2.0, 800.0, 1, 0, 0, 30),
        rec(3, 5.0, 15.0, 2, 2, 7, 140),
        rec(2, 3.0, 60.0, 2, 1, 3, 75),
        rec(1, 4.0, 2000.0, 3, 0, 1, 55),
    ]
}

/// Ten offers with repeated attribute values and prices.
pub fn desk_ten() -> Vec<OfferRecord> {
    vec![
        rec(1, 3.0, 100.0, 2, 1, 3, 60),
        rec(1, 3.0, 100.0, 2, 1, 3, 65),
        rec(1, 3.0, 100.0, 2, 1, 3, 60),
        rec(2, 3.0, 250.0, 1, 0, 3, 40),
        rec(2, 4.0, 250.0, 1, 0, 6, 40),
        rec(2, 4.0, 400.0, 3, 2, 6, 120),
        rec(3, 4.0, 400.0, 3, 2, 6, 125),
        rec(3, 5.0, 10.0, 3, 2, 9, 180),
        rec(3, 5.0, 10.0, 1, 2, 9, 150),
        rec(1, 1.0, 5000.0, 1, 0, 0, 20),
    ]
}

/// Up to ten offers drawn from small attribute pools so that ties and
/// shared bins are common.
pub fn random_desk(seed: u64) -> Vec<OfferRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=10);
    let ratings = [2.0, 3.0, 3.5, 4.0, 5.0];
    let distances = [10.0, 50.0, 100.0, 500.0, 2000.0];
    (0..n)
        .map(|_| {
            rec(
                rng.random_range(1..=3),
                ratings[rng.random_range(0..ratings.len())],
                distances[rng.random_range(0..distances.len())],
                rng.random_range(1..=3),
                rng.random_range(0..=2),
                rng.random_range(0..=10),
                rng.random_range(2..=25) * 10,
            )
        })
        .collect()
}
