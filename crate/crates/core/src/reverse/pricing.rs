use serde::Serialize;

use crate::money::Money;

use super::{AcceptedPriceDistribution, Ratio};

/// Recommended offer for a reverse auction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PricingDecision {
    pub price: Money,
    /// Expected profit in cents.
    pub expected_profit: Ratio,
    pub acceptance_probability: Ratio,
    /// No offer price yields a positive expected profit.
    pub abstain: bool,
}

impl PricingDecision {
    pub fn expected_profit_units(&self) -> f64 {
        ratio_f64(self.expected_profit) / 100.0
    }
}

pub fn ratio_f64(r: Ratio) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `(price - cost) * P(accepted price >= price)`, in cents.
pub fn expected_profit(dist: &AcceptedPriceDistribution, cost: Money, price: Money) -> Ratio {
    Ratio::new(
        (price - cost).cents() * dist.survivors(price) as i64,
        dist.sample_size() as i64,
    )
}

/// Maximizes expected profit over the breakpoints.
///
/// Between two breakpoints the acceptance probability is constant and the
/// margin grows with the price, so the supremum on each piece is attained at
/// its right end, a breakpoint. Ties go to the lower price.
pub fn optimize_price(dist: &AcceptedPriceDistribution, cost: Money) -> PricingDecision {
    let n = dist.sample_size() as i64;
    let mut survivors = n;
    let mut best: Option<(Money, i64, i64)> = None;
    for (&price, &count) in dist.breakpoints().iter().zip(dist.counts()) {
        // Same denominator everywhere, so numerators compare exactly.
        let numer = (price - cost).cents() * survivors;
        if best.is_none_or(|(_, b, _)| numer > b) {
            best = Some((price, numer, survivors));
        }
        survivors -= count as i64;
    }
    let (price, numer, survivors) = best.expect("distributions are never empty");
    PricingDecision {
        price,
        expected_profit: Ratio::new(numer, n),
        acceptance_probability: Ratio::new(survivors, n),
        abstain: numer <= 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub price: Money,
    /// Cents.
    pub expected_profit: f64,
    pub acceptance_probability: f64,
}

/// Expected profit sampled at every breakpoint and at the midpoint between
/// consecutive breakpoints, ascending in price.
pub fn profit_curve(dist: &AcceptedPriceDistribution, cost: Money) -> Vec<CurvePoint> {
    let bps = dist.breakpoints();
    let mut prices = Vec::with_capacity(bps.len() * 2);
    for (i, &p) in bps.iter().enumerate() {
        if i > 0 {
            let mid = Money::from_cents((bps[i - 1].cents() + p.cents()) / 2);
            if mid > bps[i - 1] {
                prices.push(mid);
            }
        }
        prices.push(p);
    }
    prices
        .into_iter()
        .map(|price| CurvePoint {
            price,
            expected_profit: ratio_f64(expected_profit(dist, cost, price)),
            acceptance_probability: ratio_f64(dist.acceptance_probability(price)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::ten_auction_accepted_prices;
    use crate::reverse::empirical_distribution;
    use proptest::prelude::*;

    fn table() -> AcceptedPriceDistribution {
        empirical_distribution(&ten_auction_accepted_prices()).unwrap()
    }

    fn eur(u: i64) -> Money {
        Money::from_units(u)
    }

    #[test]
    fn expected_profit_examples() {
        let d = table();
        assert_eq!(expected_profit(&d, eur(10), eur(40)), Ratio::from_integer(2700));
        assert_eq!(d.acceptance_probability(eur(40)), Ratio::new(9, 10));
        assert_eq!(expected_profit(&d, eur(10), eur(50)), Ratio::from_integer(1200));
        assert_eq!(expected_profit(&d, eur(10), eur(51)), Ratio::from_integer(0));
    }

    #[test]
    fn optimum_examples() {
        let d = table();
        let dec = optimize_price(&d, eur(10));
        assert_eq!((dec.price, dec.expected_profit), (eur(40), Ratio::from_integer(2700)));
        assert!(!dec.abstain);

        let dec = optimize_price(&d, eur(45));
        assert_eq!((dec.price, dec.expected_profit), (eur(50), Ratio::from_integer(150)));

        let dec = optimize_price(&d, eur(60));
        assert!(dec.abstain);
        assert!(dec.expected_profit <= Ratio::from_integer(0));
    }

    #[test]
    fn cost_on_a_breakpoint() {
        let d = empirical_distribution(&[eur(40)]).unwrap();
        let dec = optimize_price(&d, eur(40));
        assert_eq!(dec.expected_profit, Ratio::from_integer(0));
        assert!(dec.abstain);
    }

    #[test]
    fn ties_go_to_the_lower_price() {
        // (20-10)*1 == (30-10)*1/2
        let d = empirical_distribution(&[eur(20), eur(30)]).unwrap();
        assert_eq!(optimize_price(&d, eur(10)).price, eur(20));
    }

    #[test]
    fn curve_has_breakpoints_and_midpoints() {
        let curve = profit_curve(&table(), eur(10));
        let prices: Vec<_> = curve.iter().map(|p| p.price.cents()).collect();
        assert_eq!(prices, vec![3000, 3500, 4000, 4250, 4500, 4650, 4800, 4900, 5000]);
        let top = curve
            .iter()
            .max_by(|a, b| a.expected_profit.total_cmp(&b.expected_profit))
            .unwrap();
        assert_eq!((top.price, top.expected_profit), (eur(40), 2700.0));
    }

    proptest! {
        #[test]
        fn breakpoint_scan_matches_dense_grid(
            samples in proptest::collection::vec(1i64..400, 1..30),
            cost in 0i64..300,
        ) {
            let prices: Vec<Money> = samples.iter().map(|&u| eur(u)).collect();
            let d = empirical_distribution(&prices).unwrap();
            let dec = optimize_price(&d, eur(cost));
            // Every whole-cent price between min-1 and max+1.
            let lo = d.breakpoints()[0].cents() - 100;
            let hi = d.breakpoints().last().unwrap().cents() + 100;
            let mut best = (Money::ZERO, Ratio::from_integer(i64::MIN));
            for c in lo.max(1)..=hi {
                let e = expected_profit(&d, eur(cost), Money::from_cents(c));
                if e > best.1 {
                    best = (Money::from_cents(c), e);
                }
            }
            if best.1 > Ratio::from_integer(0) {
                prop_assert_eq!(dec.expected_profit, best.1);
                prop_assert_eq!(dec.price, best.0);
            } else {
                // Prices above every sample earn exactly zero.
                prop_assert!(dec.abstain);
                prop_assert!(dec.expected_profit <= best.1);
            }
        }

        #[test]
        fn shift_covariance(
            samples in proptest::collection::vec(1i64..400, 1..30),
            cost in 0i64..300,
            shift in 0i64..200,
        ) {
            let base: Vec<Money> = samples.iter().map(|&u| eur(u)).collect();
            let shifted: Vec<Money> = samples.iter().map(|&u| eur(u + shift)).collect();
            let a = optimize_price(&empirical_distribution(&base).unwrap(), eur(cost));
            let b = optimize_price(&empirical_distribution(&shifted).unwrap(), eur(cost + shift));
            prop_assert_eq!(b.price, a.price + eur(shift));
            prop_assert_eq!(b.expected_profit, a.expected_profit);
        }

        #[test]
        fn masses_rebuild_the_cdf(samples in proptest::collection::vec(1i64..100, 1..40)) {
            let prices: Vec<Money> = samples.iter().map(|&u| eur(u)).collect();
            let d = empirical_distribution(&prices).unwrap();
            let total: Ratio = d.masses().into_iter().sum();
            prop_assert_eq!(total, Ratio::from_integer(1));
            prop_assert!(d.masses().iter().all(|m| *m > Ratio::from_integer(0)));
            for (bp, f) in d.breakpoints().iter().zip(d.cumulative()) {
                let direct = samples.iter().filter(|&&s| eur(s) <= *bp).count();
                prop_assert_eq!(f, Ratio::new(direct as i64, samples.len() as i64));
            }
        }
    }
}
