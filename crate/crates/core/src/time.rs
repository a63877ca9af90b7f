//! Civil UTC time handling.
//!
//! The simulator treats UTC as a uniform time scale (no leap seconds) and
//! represents instants as whole seconds since the Unix epoch. Sub-second
//! precision is never needed: pass endpoints are refined to 1 s and weather
//! products tick at minute scale.

use std::fmt;

const SECS_PER_DAY: i64 = 86_400;

/// An instant in UTC, stored as whole seconds since 1970-01-01T00:00:00Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UtcTime {
    secs: i64,
}

impl UtcTime {
    pub fn from_unix_seconds(secs: i64) -> Self {
        UtcTime { secs }
    }

    pub fn unix_seconds(&self) -> i64 {
        self.secs
    }

    /// Build an instant from a civil date and time-of-day.
    pub fn from_civil(
        year: i32,
        month: u32,
        day: u32,
        hour: u32,
        minute: u32,
        second: u32,
    ) -> Self {
        let days = days_from_civil(year, month, day);
        UtcTime {
            secs: days * SECS_PER_DAY + (hour as i64) * 3600 + (minute as i64) * 60 + second as i64,
        }
    }

    /// Decompose into (year, month, day, hour, minute, second).
    pub fn to_civil(&self) -> (i32, u32, u32, u32, u32, u32) {
        let days = self.secs.div_euclid(SECS_PER_DAY);
        let sod = self.secs.rem_euclid(SECS_PER_DAY);
        let (y, m, d) = civil_from_days(days);
        (
            y,
            m,
            d,
            (sod / 3600) as u32,
            ((sod % 3600) / 60) as u32,
            (sod % 60) as u32,
        )
    }

    /// Parse a strict `YYYY-MM-DDTHH:MM:SSZ` timestamp.
    pub fn parse_iso8601(s: &str) -> Result<Self, TimeParseError> {
        let err = || TimeParseError {
            input: s.to_string(),
        };
        let bytes = s.as_bytes();
        if bytes.len() != 20
            || bytes[4] != b'-'
            || bytes[7] != b'-'
            || bytes[10] != b'T'
            || bytes[13] != b':'
            || bytes[16] != b':'
            || bytes[19] != b'Z'
        {
            return Err(err());
        }
        let num = |r: std::ops::Range<usize>| -> Result<i64, TimeParseError> {
            s[r].parse::<i64>().map_err(|_| err())
        };
        let year = num(0..4)? as i32;
        let month = num(5..7)? as u32;
        let day = num(8..10)? as u32;
        let hour = num(11..13)? as u32;
        let minute = num(14..16)? as u32;
        let second = num(17..19)? as u32;
        if !(1..=12).contains(&month)
            || day < 1
            || day > days_in_month(year, month)
            || hour > 23
            || minute > 59
            || second > 59
        {
            return Err(err());
        }
        Ok(UtcTime::from_civil(year, month, day, hour, minute, second))
    }

    /// Render as `YYYY-MM-DDTHH:MM:SSZ`.
    pub fn format_iso8601(&self) -> String {
        let (y, mo, d, h, mi, s) = self.to_civil();
        format!("{y:04}-{mo:02}-{d:02}T{h:02}:{mi:02}:{s:02}Z")
    }

    pub fn plus_seconds(&self, secs: i64) -> Self {
        UtcTime {
            secs: self.secs + secs,
        }
    }

    pub fn year_month(&self) -> YearMonth {
        let (y, m, _, _, _, _) = self.to_civil();
        YearMonth { year: y, month: m }
    }
}

impl fmt::Display for UtcTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_iso8601())
    }
}

#[derive(Debug, Clone)]
pub struct TimeParseError {
    pub input: String,
}

impl fmt::Display for TimeParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid ISO 8601 timestamp {:?} (expected YYYY-MM-DDTHH:MM:SSZ)",
            self.input
        )
    }
}

impl std::error::Error for TimeParseError {}

/// A half-ordered pair of instants with `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeWindow {
    pub start: UtcTime,
    pub end: UtcTime,
}

impl TimeWindow {
    pub fn new(start: UtcTime, end: UtcTime) -> Option<Self> {
        if start <= end {
            Some(TimeWindow { start, end })
        } else {
            None
        }
    }

    pub fn duration_s(&self) -> i64 {
        self.end.unix_seconds() - self.start.unix_seconds()
    }

    pub fn contains(&self, t: UtcTime) -> bool {
        self.start <= t && t <= self.end
    }
}

/// A calendar month, used for monthly aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn start(&self) -> UtcTime {
        UtcTime::from_civil(self.year, self.month, 1, 0, 0, 0)
    }

    pub fn next(&self) -> YearMonth {
        if self.month == 12 {
            YearMonth {
                year: self.year + 1,
                month: 1,
            }
        } else {
            YearMonth {
                year: self.year,
                month: self.month + 1,
            }
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if is_leap_year(year) {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

/// Days since 1970-01-01 for a proleptic Gregorian civil date.
pub fn days_from_civil(year: i32, month: u32, day: u32) -> i64 {
    let y = if month <= 2 {
        year as i64 - 1
    } else {
        year as i64
    };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = ((month + 9) % 12) as i64;
    let doy = (153 * mp + 2) / 5 + day as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

/// Inverse of [`days_from_civil`].
pub fn civil_from_days(days: i64) -> (i32, u32, u32) {
    let z = days + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    let y = if m <= 2 { y + 1 } else { y };
    (y as i32, m, d)
}

/// Unix seconds (fractional) for a TLE-style epoch: year plus fractional
/// day-of-year, where day 1.0 is January 1 at 00:00 UTC.
pub fn unix_seconds_from_year_doy(year: i32, day_of_year: f64) -> f64 {
    let jan1 = days_from_civil(year, 1, 1) as f64 * SECS_PER_DAY as f64;
    jan1 + (day_of_year - 1.0) * SECS_PER_DAY as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn civil_round_trip() {
        for &(y, m, d) in &[
            (1970, 1, 1),
            (2000, 2, 29),
            (2023, 6, 1),
            (2024, 12, 31),
            (1957, 10, 4),
        ] {
            let days = days_from_civil(y, m, d);
            assert_eq!(civil_from_days(days), (y, m, d));
        }
    }

    #[test]
    fn unix_epoch_is_day_zero() {
        assert_eq!(days_from_civil(1970, 1, 1), 0);
        assert_eq!(UtcTime::from_civil(1970, 1, 1, 0, 0, 0).unix_seconds(), 0);
    }

    #[test]
    fn iso8601_round_trip() {
        let t = UtcTime::parse_iso8601("2023-06-01T12:34:56Z").unwrap();
        assert_eq!(t.format_iso8601(), "2023-06-01T12:34:56Z");
        assert_eq!(t.to_civil(), (2023, 6, 1, 12, 34, 56));
    }

    #[test]
    fn iso8601_rejects_malformed() {
        for bad in [
            "2023-06-01 12:34:56Z",
            "2023-06-01T12:34:56",
            "2023-13-01T00:00:00Z",
            "2023-02-29T00:00:00Z",
            "2023-06-01T24:00:00Z",
            "not a time",
        ] {
            assert!(UtcTime::parse_iso8601(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn year_doy_epoch_conversion() {
        // Day 1.5 of 2024 is Jan 1 12:00 UTC.
        let s = unix_seconds_from_year_doy(2024, 1.5);
        let expect = UtcTime::from_civil(2024, 1, 1, 12, 0, 0).unix_seconds() as f64;
        assert_eq!(s, expect);
    }

    #[test]
    fn year_month_ordering_and_next() {
        let dec = YearMonth {
            year: 2023,
            month: 12,
        };
        assert_eq!(
            dec.next(),
            YearMonth {
                year: 2024,
                month: 1
            }
        );
        assert!(dec < dec.next());
        assert_eq!(dec.to_string(), "2023-12");
    }

    #[test]
    fn leap_years() {
        assert!(is_leap_year(2000));
        assert!(!is_leap_year(1900));
        assert!(is_leap_year(2024));
        assert!(!is_leap_year(2023));
    }
}
