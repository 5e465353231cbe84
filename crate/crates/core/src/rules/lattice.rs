use super::{Antecedent, Attribute, Condition, OfferRecord};

/// All antecedent conditions a miner may use on a given dataset.
///
/// Numeric attributes are cut into at most `bins` equal-frequency bins (ties
/// never straddle a cut) and every union of consecutive bins short of the full
/// range is a candidate. The outermost bins are open-ended so that unseen
/// values beyond the training range still match. Categorical attributes
/// contribute one equality per observed value.
#[derive(Debug, Clone)]
pub struct CandidateLattice {
    items: Vec<Antecedent>,
    /// First and last bin of each numeric item, `None` for equalities.
    spans: Vec<Option<(usize, usize)>>,
    bins: Vec<(Attribute, Vec<(f64, f64)>)>,
}

impl CandidateLattice {
    pub fn build(records: &[OfferRecord], bins: usize) -> Self {
        let mut items = Vec::new();
        let mut spans = Vec::new();
        let mut all_bins = Vec::new();
        for attribute in Attribute::ALL {
            let mut values: Vec<f64> = records.iter().map(|r| r.value(attribute)).collect();
            values.sort_by(f64::total_cmp);
            if attribute.is_categorical() {
                values.dedup();
                for &v in &values {
                    items.push(Antecedent {
                        attribute,
                        condition: Condition::Equals(v as u8),
                    });
                    spans.push(None);
                }
                continue;
            }
            let cuts = equal_frequency_bins(&values, bins);
            let k = cuts.len();
            for i in 0..k {
                for j in i..k {
                    if i == 0 && j + 1 == k {
                        continue;
                    }
                    items.push(Antecedent {
                        attribute,
                        condition: Condition::Range {
                            min: (i > 0).then(|| cuts[i].0),
                            max: (j + 1 < k).then(|| cuts[j].1),
                        },
                    });
                    spans.push(Some((i, j)));
                }
            }
            all_bins.push((attribute, cuts));
        }
        CandidateLattice {
            items,
            spans,
            bins: all_bins,
        }
    }

    /// Candidates grouped by attribute in record field order.
    pub fn items(&self) -> &[Antecedent] {
        &self.items
    }

    pub(crate) fn span(&self, item: usize) -> Option<(usize, usize)> {
        self.spans[item]
    }

    /// `(smallest, largest)` observed value per bin of a numeric attribute.
    pub fn bins(&self, attribute: Attribute) -> &[(f64, f64)] {
        self.bins
            .iter()
            .find(|(a, _)| *a == attribute)
            .map(|(_, b)| b.as_slice())
            .unwrap_or(&[])
    }
}

/// Splits sorted values into at most `bins` runs of roughly equal size.
///
/// The k-th cut sits after rank `ceil(k n / bins)`, pushed forward past any
/// run of equal values.
fn equal_frequency_bins(sorted: &[f64], bins: usize) -> Vec<(f64, f64)> {
    let n = sorted.len();
    if n == 0 || bins == 0 {
        return Vec::new();
    }
    let mut cuts = Vec::new();
    for k in 1..bins {
        let mut at = (k * n).div_ceil(bins);
        while at < n && sorted[at] == sorted[at - 1] {
            at += 1;
        }
        if at < n && cuts.last() != Some(&at) {
            cuts.push(at);
        }
    }
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for end in cuts.into_iter().chain(std::iter::once(n)) {
        out.push((sorted[start], sorted[end - 1]));
        start = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bins_respect_ties() {
        let v = [1.0, 1.0, 1.0, 2.0, 3.0, 4.0, 4.0, 5.0];
        assert_eq!(
            equal_frequency_bins(&v, 4),
            vec![(1.0, 1.0), (2.0, 2.0), (3.0, 4.0), (5.0, 5.0)]
        );
        assert_eq!(equal_frequency_bins(&[7.0; 5], 8), vec![(7.0, 7.0)]);
        assert_eq!(equal_frequency_bins(&[1.0, 2.0], 8), vec![(1.0, 1.0), (2.0, 2.0)]);
    }

    proptest! {
        #[test]
        fn bins_partition_the_values(
            mut v in proptest::collection::vec(0u8..20, 1..60),
            bins in 1usize..10,
        ) {
            v.sort_unstable();
            let v: Vec<f64> = v.into_iter().map(f64::from).collect();
            let b = equal_frequency_bins(&v, bins);
            prop_assert!(!b.is_empty() && b.len() <= bins);
            prop_assert_eq!(b[0].0, v[0]);
            prop_assert_eq!(b.last().unwrap().1, *v.last().unwrap());
            for w in b.windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
            for x in &v {
                prop_assert_eq!(b.iter().filter(|(lo, hi)| lo <= x && x <= hi).count(), 1);
            }
        }
    }
}
