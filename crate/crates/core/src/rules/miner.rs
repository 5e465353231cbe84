use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::lattice::CandidateLattice;
use super::{sort_rules, Attribute, Direction, OfferRecord, PriceRule};
use crate::error::{Error, Result};
use crate::money::Money;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinerConfig {
    /// Minimum fraction of all records that satisfy antecedents and consequent.
    pub support: f64,
    /// Minimum fraction of antecedent matches that also satisfy the consequent.
    pub confidence: f64,
    pub max_antecedents: usize,
    /// Upper limit on equal-frequency bins per numeric attribute.
    pub bins: usize,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            support: 0.15,
            confidence: 0.9,
            max_antecedents: 3,
            bins: 8,
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<()> {
        let frac = |v: f64| v > 0.0 && v <= 1.0;
        if !frac(self.support) {
            return Err(Error::InvalidParameter(format!(
                "support must be in (0, 1], got {}",
                self.support
            )));
        }
        if !frac(self.confidence) {
            return Err(Error::InvalidParameter(format!(
                "confidence must be in (0, 1], got {}",
                self.confidence
            )));
        }
        if self.max_antecedents == 0 {
            return Err(Error::InvalidParameter("max_antecedents must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(Error::InvalidParameter("bins must be at least 1".into()));
        }
        Ok(())
    }
}

/// Smallest count `k` with `k / total >= fraction`, allowing for the rounding
/// in products such as `0.15 * 100`.
pub(crate) fn required_count(fraction: f64, total: usize) -> usize {
    ((fraction * total as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Mines every non-redundant price rule over the candidate lattice.
///
/// For each antecedent set the tightest bound meeting both thresholds is kept
/// per direction. A rule is then dropped when a strictly more general rule
/// (fewer or wider antecedents) bounds the price at least as tightly, since it
/// applies wherever the specific one does.
pub fn mine_rules(records: &[OfferRecord], config: &MinerConfig) -> Result<Vec<PriceRule>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    config.validate()?;

    // Price-sorted records make the k-th smallest matched price the k-th set bit.
    let mut sorted: Vec<&OfferRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.accepted_price);
    let prices: Vec<Money> = sorted.iter().map(|r| r.accepted_price).collect();
    let owned: Vec<OfferRecord> = sorted.into_iter().cloned().collect();

    let lattice = CandidateLattice::build(&owned, config.bins);
    let mut miner = Miner::new(&lattice, &owned, &prices, config);
    miner.enumerate();
    let mut rules = miner.finish();
    sort_rules(&mut rules);
    Ok(rules)
}

type Key = u128;
const KEY_BITS: u32 = 16;

#[derive(Debug, Clone, Copy)]
struct Found {
    bound: Money,
    hits: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Node {
    matched: usize,
    at_least: Option<Found>,
    at_most: Option<Found>,
}

struct Miner<'a> {
    lattice: &'a CandidateLattice,
    prices: &'a [Money],
    n: usize,
    min_hits: usize,
    confidence: f64,
    max_len: usize,
    words: usize,
    masks: Vec<Vec<u64>>,
    attr_of: Vec<Attribute>,
    by_span: HashMap<(Attribute, usize, usize), usize>,
    bin_count: HashMap<Attribute, usize>,
    nodes: HashMap<Key, Node>,
}

impl<'a> Miner<'a> {
    fn new(
        lattice: &'a CandidateLattice,
        records: &[OfferRecord],
        prices: &'a [Money],
        config: &MinerConfig,
    ) -> Self {
        let n = records.len();
        let words = n.div_ceil(64);
        let items = lattice.items();
        assert!(items.len() < (1 << KEY_BITS) - 1, "candidate lattice too large");
        let masks = items
            .iter()
            .map(|a| {
                let mut m = vec![0u64; words];
                for (i, r) in records.iter().enumerate() {
                    if a.matches(r) {
                        m[i / 64] |= 1 << (i % 64);
                    }
                }
                m
            })
            .collect();
        let mut by_span = HashMap::new();
        for (i, a) in items.iter().enumerate() {
            if let Some((lo, hi)) = lattice.span(i) {
                by_span.insert((a.attribute, lo, hi), i);
            }
        }
        let bin_count = Attribute::ALL
            .into_iter()
            .map(|a| (a, lattice.bins(a).len()))
            .collect();
        Miner {
            lattice,
            prices,
            n,
            min_hits: required_count(config.support, n).max(1),
            confidence: config.confidence,
            max_len: config.max_antecedents.min(Attribute::ALL.len()),
            words,
            masks,
            attr_of: items.iter().map(|a| a.attribute).collect(),
            by_span,
            bin_count,
            nodes: HashMap::new(),
        }
    }

    fn enumerate(&mut self) {
        let mut path = Vec::with_capacity(self.max_len);
        let full = vec![u64::MAX; self.words];
        self.extend(&mut path, &full, 0);
    }

    fn extend(&mut self, path: &mut Vec<usize>, cover: &[u64], from: usize) {
        if path.len() == self.max_len {
            return;
        }
        let mut buf = vec![0u64; self.words];
        for item in from..self.masks.len() {
            if path
                .last()
                .is_some_and(|&p| self.attr_of[p] >= self.attr_of[item])
            {
                continue;
            }
            let mut matched = 0;
            for (w, (c, m)) in buf.iter_mut().zip(cover.iter().zip(&self.masks[item])) {
                *w = c & m;
                matched += w.count_ones() as usize;
            }
            if matched < self.min_hits {
                continue;
            }
            path.push(item);
            let node = self.evaluate(&buf, matched);
            self.nodes.insert(key_of(path), node);
            let next = buf.clone();
            self.extend(path, &next, item + 1);
            path.pop();
        }
    }

    fn evaluate(&self, cover: &[u64], matched: usize) -> Node {
        let need = self.min_hits.max(required_count(self.confidence, matched));
        let mut node = Node {
            matched,
            ..Node::default()
        };
        if need > matched {
            return node;
        }
        let lowest = self.nth_set_bit(cover, need - 1);
        let highest = self.nth_set_bit(cover, matched - need);
        let upper = self.prices[lowest];
        let lower = self.prices[highest];
        node.at_least = Some(Found {
            bound: lower,
            hits: self.count_where(cover, |p| p >= lower),
        });
        node.at_most = Some(Found {
            bound: upper,
            hits: self.count_where(cover, |p| p <= upper),
        });
        node
    }

    fn nth_set_bit(&self, cover: &[u64], mut nth: usize) -> usize {
        for (w, &bits) in cover.iter().enumerate() {
            let ones = bits.count_ones() as usize;
            if nth < ones {
                let mut b = bits;
                for _ in 0..nth {
                    b &= b - 1;
                }
                return w * 64 + b.trailing_zeros() as usize;
            }
            nth -= ones;
        }
        unreachable!("cover has fewer set bits than requested")
    }

    fn count_where(&self, cover: &[u64], keep: impl Fn(Money) -> bool) -> usize {
        (0..self.n)
            .filter(|&i| cover[i / 64] >> (i % 64) & 1 == 1 && keep(self.prices[i]))
            .count()
    }

    /// One-step generalizations: widen a numeric interval by a bin, or drop
    /// an antecedent (widening to the full range is also a drop).
    fn parents(&self, items: &[usize]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (pos, &item) in items.iter().enumerate() {
            let dropped: Vec<usize> = items
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != pos)
                .map(|(_, &i)| i)
                .collect();
            match self.lattice.span(item) {
                None => out.push(dropped),
                Some((lo, hi)) => {
                    let attr = self.attr_of[item];
                    let k = self.bin_count[&attr];
                    let mut widened = Vec::new();
                    if lo > 0 {
                        widened.push((lo - 1, hi));
                    }
                    if hi + 1 < k {
                        widened.push((lo, hi + 1));
                    }
                    for (a, b) in widened {
                        match self.by_span.get(&(attr, a, b)) {
                            Some(&wide) => {
                                let mut v = items.to_vec();
                                v[pos] = wide;
                                out.push(v);
                            }
                            None => out.push(dropped.clone()),
                        }
                    }
                }
            }
        }
        out.retain(|p| !p.is_empty());
        out
    }

    /// Strongest bound over the node itself and all its generalizations.
    fn best(&self, key: Key, dir: Direction, memo: &mut HashMap<(Key, Direction), Option<Money>>) -> Option<Money> {
        if let Some(&b) = memo.get(&(key, dir)) {
            return b;
        }
        let node = self.nodes[&key];
        let own = match dir {
            Direction::AtLeast => node.at_least.map(|f| f.bound),
            Direction::AtMost => node.at_most.map(|f| f.bound),
        };
        let inherited = self.best_of_parents(&items_of(key), dir, memo);
        let b = stronger(dir, own, inherited);
        memo.insert((key, dir), b);
        b
    }

    fn best_of_parents(
        &self,
        items: &[usize],
        dir: Direction,
        memo: &mut HashMap<(Key, Direction), Option<Money>>,
    ) -> Option<Money> {
        self.parents(items)
            .into_iter()
            .map(|p| self.best(key_of(&p), dir, memo))
            .fold(None, |acc, b| stronger(dir, acc, b))
    }

    fn finish(self) -> Vec<PriceRule> {
        let mut memo = HashMap::new();
        let mut rules = Vec::new();
        for (&key, node) in &self.nodes {
            let items = items_of(key);
            for (dir, found) in [
                (Direction::AtLeast, node.at_least),
                (Direction::AtMost, node.at_most),
            ] {
                let Some(found) = found else { continue };
                let inherited = self.best_of_parents(&items, dir, &mut memo);
                if inherited.is_some_and(|b| dir.admits(found.bound, b)) {
                    continue;
                }
                rules.push(PriceRule {
                    antecedents: items.iter().map(|&i| self.lattice.items()[i]).collect(),
                    direction: dir,
                    bound: found.bound,
                    support: found.hits as f64 / self.n as f64,
                    confidence: found.hits as f64 / node.matched as f64,
                });
            }
        }
        rules
    }
}

/// `AtLeast` prefers higher bounds, `AtMost` lower ones.
fn stronger(dir: Direction, a: Option<Money>, b: Option<Money>) -> Option<Money> {
    match (a, b) {
        (Some(x), Some(y)) => Some(match dir {
            Direction::AtLeast => x.max(y),
            Direction::AtMost => x.min(y),
        }),
        (x, None) => x,
        (None, y) => y,
    }
}

fn key_of(items: &[usize]) -> Key {
    items
        .iter()
        .fold(0, |k, &i| (k << KEY_BITS) | (i as Key + 1))
}

fn items_of(mut key: Key) -> Vec<usize> {
    let mut out = Vec::new();
    while key != 0 {
        out.push((key & ((1 << KEY_BITS) - 1)) as usize - 1);
        key >>= KEY_BITS;
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::Condition;

    fn rec(period: u8, rating: f64, dist: f64, beds: u8, bf: u8, sites: u8, price: i64) -> OfferRecord {
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

    #[test]
    fn thresholds_tolerate_float_products() {
        assert_eq!(required_count(0.15, 100), 15);
        assert_eq!(required_count(0.9, 10), 9);
        assert_eq!(required_count(0.25, 8), 2);
        assert_eq!(required_count(1.0, 7), 7);
    }

    #[test]
    fn key_round_trip() {
        assert_eq!(items_of(key_of(&[0, 7, 300])), vec![0, 7, 300]);
    }

    #[test]
    fn identical_records_give_exact_single_attribute_rules() {
        let data = vec![rec(2, 3.0, 100.0, 2, 1, 4, 100); 5];
        let cfg = MinerConfig {
            support: 0.4,
            confidence: 1.0,
            ..MinerConfig::default()
        };
        let rules = mine_rules(&data, &cfg).unwrap();
        assert!(!rules.is_empty());
        assert!(rules.iter().all(|r| !r.antecedents.is_empty()));
        for dir in [Direction::AtLeast, Direction::AtMost] {
            let r: Vec<_> = rules.iter().filter(|r| r.direction == dir).collect();
            assert!(r.iter().all(|r| r.bound == Money::from_units(100)));
            assert!(r.iter().all(|r| r.antecedents.len() == 1));
        }
        // Only the categorical attributes yield non-trivial candidates here.
        let attrs: Vec<_> = rules.iter().map(|r| r.antecedents[0].condition).collect();
        assert!(attrs.contains(&Condition::Equals(2)));
        assert!(attrs.contains(&Condition::Equals(1)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            mine_rules(&[], &MinerConfig::default()),
            Err(Error::EmptyInput(_))
        ));
        let data = vec![rec(1, 1.0, 1.0, 1, 0, 0, 50)];
        let bad = MinerConfig {
            support: 0.0,
            ..MinerConfig::default()
        };
        assert!(mine_rules(&data, &bad).is_err());
    }
}
