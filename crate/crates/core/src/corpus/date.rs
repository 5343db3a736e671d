use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A date known only down to some granularity. Negative years are BCE.
///
/// Textual form: `""`, `"1900"`, `"1900-03"`, `"1900-03-01"`, `"-221"`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialDate {
    year: Option<i32>,
    month: Option<u8>,
    day: Option<u8>,
}

impl PartialDate {
    pub const UNKNOWN: PartialDate = PartialDate {
        year: None,
        month: None,
        day: None,
    };

    pub fn new(year: Option<i32>, month: Option<u8>, day: Option<u8>) -> Result<Self, Error> {
        if day.is_some() && month.is_none() {
            return Err(Error::InvalidDate("day without month".into()));
        }
        if month.is_some() && year.is_none() {
            return Err(Error::InvalidDate("month without year".into()));
        }
        if let Some(m) = month {
            if !(1..=12).contains(&m) {
                return Err(Error::InvalidDate(format!("month {m} out of range")));
            }
        }
        if let Some(d) = day {
            if !(1..=31).contains(&d) {
                return Err(Error::InvalidDate(format!("day {d} out of range")));
            }
        }
        Ok(PartialDate { year, month, day })
    }

    pub fn year(y: i32) -> Self {
        PartialDate {
            year: Some(y),
            month: None,
            day: None,
        }
    }

    pub fn year_month(y: i32, m: u8) -> Result<Self, Error> {
        Self::new(Some(y), Some(m), None)
    }

    pub fn get_year(&self) -> Option<i32> {
        self.year
    }

    pub fn get_month(&self) -> Option<u8> {
        self.month
    }

    pub fn get_day(&self) -> Option<u8> {
        self.day
    }

    pub fn is_unknown(&self) -> bool {
        self.year.is_none()
    }
}

impl fmt::Display for PartialDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(y) = self.year {
            write!(f, "{y}")?;
        }
        if let Some(m) = self.month {
            write!(f, "-{m:02}")?;
        }
        if let Some(d) = self.day {
            write!(f, "-{d:02}")?;
        }
        Ok(())
    }
}

impl FromStr for PartialDate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(PartialDate::UNKNOWN);
        }
        let bad = || Error::InvalidDate(s.to_string());
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let mut parts = rest.split('-');
        let year: i32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let year = if neg { -year } else { year };
        let month = parts
            .next()
            .map(|m| m.parse::<u8>().map_err(|_| bad()))
            .transpose()?;
        let day = parts
            .next()
            .map(|d| d.parse::<u8>().map_err(|_| bad()))
            .transpose()?;
        if parts.next().is_some() {
            return Err(bad());
        }
        PartialDate::new(Some(year), month, day)
    }
}

impl Serialize for PartialDate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PartialDate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(de::Error::custom)
    }
}
