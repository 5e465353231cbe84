use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{OfferRecord, PRICE_CEILING, PRICE_FLOOR};
use crate::money::Money;

/// Largest deviation, in cents, added to the deterministic score. Two records
/// with equal attributes therefore differ by at most twice this.
pub const NOISE_CENTS: i64 = 1_500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticAttributes {
    pub period_visiting: u8,
    pub hotel_rating: u8,
    pub distance_to_sea: u32,
    pub beds_requested: u8,
    pub breakfast_type: u8,
    pub sites_within_10km: u8,
}

/// Appeal of the location, peaking at 1 for rooms 100 m from the sea and
/// fading both closer (noise, crowds) and further away.
pub fn distance_appeal(meters: f64) -> f64 {
    let x = meters / 100.0;
    x * (1.0 - x).exp()
}

/// Deterministic price for the attributes plus `noise` cents, clamped to the
/// valid price range. Non-decreasing in every attribute except distance.
pub fn synthetic_price(a: &SyntheticAttributes, noise: i64) -> Money {
    let score = 30.0
        + 25.0 * f64::from(a.period_visiting - 1)
        + 12.0 * f64::from(a.hotel_rating - 1)
        + 15.0 * f64::from(a.beds_requested - 1)
        + 8.0 * f64::from(a.breakfast_type)
        + 3.0 * f64::from(a.sites_within_10km)
        + 25.0 * distance_appeal(f64::from(a.distance_to_sea));
    let cents = (score * 100.0).round() as i64 + noise;
    Money::from_cents(cents.clamp(PRICE_FLOOR.cents(), PRICE_CEILING.cents()))
}

/// `n` records with attributes drawn uniformly over their domains.
/// The same seed always yields the same records.
pub fn generate_synthetic(n: usize, seed: u64) -> Vec<OfferRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a = SyntheticAttributes {
                period_visiting: rng.random_range(1..=3),
                hotel_rating: rng.random_range(1..=5),
                distance_to_sea: rng.random_range(0..=10_000),
                beds_requested: rng.random_range(1..=3),
                breakfast_type: rng.random_range(0..=2),
                sites_within_10km: rng.random_range(0..=10),
            };
            let noise = rng.random_range(-NOISE_CENTS..=NOISE_CENTS);
            OfferRecord {
                period_visiting: a.period_visiting,
                hotel_rating: a.hotel_rating.into(),
                distance_to_sea: a.distance_to_sea.into(),
                beds_requested: a.beds_requested,
                breakfast_type: a.breakfast_type,
                sites_within_10km: a.sites_within_10km,
                accepted_price: synthetic_price(&a, noise),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hundred_records_in_range() {
        let data = generate_synthetic(100, 7);
        assert_eq!(data.len(), 100);
        assert!(data.iter().all(|r| r.violations().is_empty()));
        assert_eq!(data, generate_synthetic(100, 7));
        assert_ne!(data, generate_synthetic(100, 8));
    }

    #[test]
    fn appeal_peaks_at_one_hundred_meters() {
        assert!((distance_appeal(100.0) - 1.0).abs() < 1e-12);
        assert!(distance_appeal(50.0) < 1.0 && distance_appeal(200.0) < 1.0);
        assert_eq!(distance_appeal(0.0), 0.0);
    }

    #[test]
    fn rating_upgrade_never_lowers_price() {
        let base = SyntheticAttributes {
            period_visiting: 1,
            hotel_rating: 2,
            distance_to_sea: 30,
            beds_requested: 1,
            breakfast_type: 1,
            sites_within_10km: 0,
        };
        let better = SyntheticAttributes {
            hotel_rating: 4,
            ..base
        };
        for noise in [-NOISE_CENTS, 0, NOISE_CENTS] {
            assert!(synthetic_price(&better, noise) >= synthetic_price(&base, noise));
        }
    }
}
