use crate::error::{Error, Result};
use crate::money::Money;

use super::Ratio;

/// Discrete distribution of accepted offer prices.
///
/// Masses are kept as counts over the sample size, so every probability is an
/// exact multiple of `1 / N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptedPriceDistribution {
    breakpoints: Vec<Money>,
    counts: Vec<u64>,
    sample_size: u64,
}

/// Builds the distribution from the accepted prices of past auctions.
///
/// Sorting the `N` samples ascending, the cumulative probability at a distinct
/// price is the last 1-based position holding that price, divided by `N`.
pub fn empirical_distribution(accepted_prices: &[Money]) -> Result<AcceptedPriceDistribution> {
    if accepted_prices.is_empty() {
        return Err(Error::EmptyInput("accepted price sample"));
    }
    if let Some(p) = accepted_prices.iter().find(|p| **p <= Money::ZERO) {
        return Err(Error::InvalidParameter(format!(
            "accepted prices must be positive, got {p}"
        )));
    }
    let mut sorted = accepted_prices.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as u64;

    let mut breakpoints = Vec::new();
    let mut cumulative = Vec::new();
    for (i, &p) in sorted.iter().enumerate() {
        let last_of_run = sorted.get(i + 1) != Some(&p);
        if last_of_run {
            breakpoints.push(p);
            cumulative.push(i as u64 + 1);
        }
    }
    let counts = cumulative
        .iter()
        .scan(0u64, |prev, &c| {
            let mass = c - *prev;
            *prev = c;
            Some(mass)
        })
        .collect();

    Ok(AcceptedPriceDistribution {
        breakpoints,
        counts,
        sample_size: n,
    })
}

impl AcceptedPriceDistribution {
    /// Distinct accepted prices, strictly ascending.
    pub fn breakpoints(&self) -> &[Money] {
        &self.breakpoints
    }

    pub fn sample_size(&self) -> u64 {
        self.sample_size
    }

    /// Number of samples at each breakpoint.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn masses(&self) -> Vec<Ratio> {
        self.counts
            .iter()
            .map(|&c| Ratio::new(c as i64, self.sample_size as i64))
            .collect()
    }

    /// `F(breakpoint_i)` for every breakpoint.
    pub fn cumulative(&self) -> Vec<Ratio> {
        let n = self.sample_size as i64;
        self.counts
            .iter()
            .scan(0i64, |acc, &c| {
                *acc += c as i64;
                Some(Ratio::new(*acc, n))
            })
            .collect()
    }

    /// `P(X <= price)`.
    pub fn cdf(&self, price: Money) -> Ratio {
        let below_or_at: u64 = self
            .breakpoints
            .iter()
            .zip(&self.counts)
            .take_while(|(b, _)| **b <= price)
            .map(|(_, c)| c)
            .sum();
        Ratio::new(below_or_at as i64, self.sample_size as i64)
    }

    /// Number of samples at or above `price`.
    pub fn survivors(&self, price: Money) -> u64 {
        let start = self.breakpoints.partition_point(|b| *b < price);
        self.counts[start..].iter().sum()
    }

    /// `P(X >= price)`: the chance an offer at `price` is not undercut on price.
    pub fn acceptance_probability(&self, price: Money) -> Ratio {
        Ratio::new(self.survivors(price) as i64, self.sample_size as i64)
    }
}
