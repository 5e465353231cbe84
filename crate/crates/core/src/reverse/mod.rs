//! Offer pricing for customer-initiated reverse auctions.
//!
//! Historical accepted prices of matching auctions form a discrete
//! distribution; the hotelier's expected profit at offer price `p` and cost
//! `c` is `(p - c) * P(accepted price >= p)`, maximized by a linear scan of
//! the distinct prices.

mod distribution;
mod pricing;

pub use distribution::{empirical_distribution, AcceptedPriceDistribution};
pub use pricing::{expected_profit, optimize_price, profit_curve, ratio_f64, CurvePoint, PricingDecision};

/// Exact fractions (probabilities, expected profits in cents).
pub type Ratio = num_rational::Ratio<i64>;
