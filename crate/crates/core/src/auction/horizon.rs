use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The contiguous run of nights a forward auction covers.
///
/// Night `k` (1-based) is `start_date + (k - 1)` days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "HorizonDoc", into = "HorizonDoc")]
pub struct DateHorizon {
    start_date: NaiveDate,
    length: u32,
}

#[derive(Serialize, Deserialize)]
struct HorizonDoc {
    start_date: NaiveDate,
    length: u32,
}

impl TryFrom<HorizonDoc> for DateHorizon {
    type Error = Error;
    fn try_from(doc: HorizonDoc) -> Result<Self> {
        DateHorizon::new(doc.start_date, doc.length)
    }
}

impl From<DateHorizon> for HorizonDoc {
    fn from(h: DateHorizon) -> Self {
        HorizonDoc {
            start_date: h.start_date,
            length: h.length,
        }
    }
}

impl DateHorizon {
    pub fn new(start_date: NaiveDate, length: u32) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidInstance(
                "horizon length must be at least one night".into(),
            ));
        }
        if start_date.checked_add_days(Days::new(length as u64)).is_none() {
            return Err(Error::InvalidInstance("horizon overflows the calendar".into()));
        }
        Ok(DateHorizon { start_date, length })
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
    }

    /// Number of nights, `|D|`.
    pub fn len(&self) -> u32 {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn end_date(&self) -> NaiveDate {
        self.start_date + Days::new(self.length as u64 - 1)
    }

    /// 1-based position of `date` in the horizon.
    pub fn date_index(&self, date: NaiveDate) -> Result<u32> {
        let offset = (date - self.start_date).num_days();
        if offset < 0 || offset >= self.length as i64 {
            return Err(Error::OutOfHorizon {
                date,
                start: self.start_date,
                length: self.length,
            });
        }
        Ok(offset as u32 + 1)
    }

    pub fn date_at(&self, index: u32) -> Option<NaiveDate> {
        (1..=self.length)
            .contains(&index)
            .then(|| self.start_date + Days::new(index as u64 - 1))
    }

    pub fn contains_index(&self, index: u32) -> bool {
        (1..=self.length).contains(&index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn june(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2023, 6, day).unwrap()
    }

    #[test]
    fn index_examples() {
        let h = DateHorizon::new(june(1), 15).unwrap();
        assert_eq!(h.date_index(june(1)).unwrap(), 1);
        assert_eq!(h.date_index(june(3)).unwrap(), 3);
        assert_eq!(h.date_index(june(15)).unwrap(), 15);
        assert!(matches!(
            h.date_index(june(16)),
            Err(Error::OutOfHorizon { .. })
        ));
        assert!(h.date_index(NaiveDate::from_ymd_opt(2023, 5, 31).unwrap()).is_err());
    }

    #[test]
    fn zero_length_rejected() {
        assert!(DateHorizon::new(june(1), 0).is_err());
    }

    proptest! {
        #[test]
        fn index_is_a_bijection(len in 1u32..400, k in 1u32..400, y in 2000i32..2100, doy in 1u32..360) {
            prop_assume!(k <= len);
            let start = NaiveDate::from_yo_opt(y, doy).unwrap();
            let h = DateHorizon::new(start, len).unwrap();
            let d = h.date_at(k).unwrap();
            prop_assert_eq!(h.date_index(d).unwrap(), k);
            prop_assert_eq!(h.date_index(start).unwrap() + k - 1, k);
        }
    }
}
