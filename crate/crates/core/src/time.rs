//! Global-clock time on an integer microtick lattice.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Microticks per time unit.
pub const TICKS_PER_UNIT: u64 = 1_000_000;

/// An instant of the shared global clock, in microticks.
/// Serializes as its decimal-unit string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Time(u64);

impl Time {
    pub const ZERO: Time = Time(0);
    pub const MAX: Time = Time(u64::MAX);
    /// The smallest representable step.
    pub const TICK: Time = Time(1);

    pub const fn from_ticks(ticks: u64) -> Self {
        Time(ticks)
    }

    pub const fn ticks(self) -> u64 {
        self.0
    }

    pub const fn from_units(units: u64) -> Self {
        Time(units * TICKS_PER_UNIT)
    }

    /// Rounds to the nearest microtick. Negative and non-finite inputs clamp to zero.
    pub fn from_units_f64(units: f64) -> Self {
        if !units.is_finite() || units <= 0.0 {
            return Time::ZERO;
        }
        Time((units * TICKS_PER_UNIT as f64).round() as u64)
    }

    pub fn as_units_f64(self) -> f64 {
        self.0 as f64 / TICKS_PER_UNIT as f64
    }

    /// The instant one microtick later.
    pub fn succ(self) -> Self {
        Time(self.0 + 1)
    }

    pub fn saturating_sub(self, other: Time) -> Time {
        Time(self.0.saturating_sub(other.0))
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

/// Prints as decimal units with six fractional digits, e.g. `2.100000`.
impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}", self.0 / TICKS_PER_UNIT, self.0 % TICKS_PER_UNIT)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid time literal `{0}`")]
pub struct ParseTimeError(pub String);

/// Parses decimal units (`9`, `2.1`, `16.000000`) exactly, without going through floats.
impl FromStr for Time {
    type Err = ParseTimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseTimeError(s.to_string());
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int.is_empty() || frac.len() > 6 {
            return Err(err());
        }
        if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let whole: u64 = int.parse().map_err(|_| err())?;
        let mut micro: u64 = 0;
        for (i, b) in frac.bytes().enumerate() {
            micro += u64::from(b - b'0') * 10u64.pow(5 - i as u32);
        }
        whole
            .checked_mul(TICKS_PER_UNIT)
            .and_then(|w| w.checked_add(micro))
            .map(Time)
            .ok_or_else(err)
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let t: Time = "2.1".parse().unwrap();
        assert_eq!(t.ticks(), 2_100_000);
        assert_eq!(t.to_string(), "2.100000");
        assert_eq!("16".parse::<Time>().unwrap(), Time::from_units(16));
        assert_eq!("0.000001".parse::<Time>().unwrap(), Time::TICK);
        assert!("1.0000001".parse::<Time>().is_err());
        assert!("-1".parse::<Time>().is_err());
        assert!(".5".parse::<Time>().is_err());
    }

    #[test]
    fn serde_uses_units() {
        let t = Time::from_ticks(9_000_001);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, "\"9.000001\"");
        assert_eq!(serde_json::from_str::<Time>(&json).unwrap(), t);
    }

    #[test]
    fn float_conversion_rounds() {
        assert_eq!(Time::from_units_f64(2.1), Time::from_ticks(2_100_000));
        assert_eq!(Time::from_units_f64(-3.0), Time::ZERO);
    }
}
