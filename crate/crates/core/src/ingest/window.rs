use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, Days, Months, NaiveDate, NaiveDateTime, TimeZone, Utc};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use super::event::InteractionEvent;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowScheme {
    Weekly,
    Bimonthly,
    CustomDays(u32),
}

impl fmt::Display for WindowScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowScheme::Weekly => f.write_str("weekly"),
            WindowScheme::Bimonthly => f.write_str("bimonthly"),
            WindowScheme::CustomDays(n) => write!(f, "days:{n}"),
        }
    }
}

impl FromStr for WindowScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weekly" => Ok(WindowScheme::Weekly),
            "bimonthly" => Ok(WindowScheme::Bimonthly),
            other => {
                let n = other
                    .strip_prefix("days:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| Error::Config(format!("unknown window scheme `{other}`")))?;
                Ok(WindowScheme::CustomDays(n))
            }
        }
    }
}

impl Serialize for WindowScheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WindowScheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Half-open interval `[start, end)` in UTC.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub index: usize,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub scheme: WindowScheme,
}

impl TimeWindow {
    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        self.start <= t && t < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyPeriod {
    pub name: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl StudyPeriod {
    pub fn new(name: impl Into<String>, start: NaiveDate, end: NaiveDate) -> Result<Self> {
        let p = Self { name: name.into(), start, end };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start > self.end {
            return Err(Error::Config(format!("period `{}` starts after it ends", self.name)));
        }
        Ok(())
    }

    pub fn contains_date(&self, d: NaiveDate) -> bool {
        self.start <= d && d <= self.end
    }
}

pub fn validate_periods(periods: &[StudyPeriod]) -> Result<()> {
    for p in periods {
        p.validate()?;
    }
    for (i, a) in periods.iter().enumerate() {
        for b in &periods[i + 1..] {
            if a.start <= b.end && b.start <= a.end {
                return Err(Error::Config(format!("periods `{}` and `{}` overlap", a.name, b.name)));
            }
        }
    }
    Ok(())
}

pub fn parse_timezone(id: &str) -> Result<Tz> {
    id.parse::<Tz>().map_err(|_| Error::UnknownTimezone(id.to_owned()))
}

fn local_midnight(tz: Tz, date: NaiveDate) -> DateTime<Utc> {
    let naive: NaiveDateTime = date.and_hms_opt(0, 0, 0).expect("midnight");
    // A DST gap at midnight pushes the boundary to the first valid instant.
    let mut probe = naive;
    loop {
        if let Some(t) = tz.from_local_datetime(&probe).earliest() {
            return t.with_timezone(&Utc);
        }
        probe += chrono::Duration::minutes(15);
    }
}

/// Every window of `scheme` covering `period`, contiguous in local time.
pub fn windows_for(period: &StudyPeriod, scheme: WindowScheme, tz: Tz) -> Vec<TimeWindow> {
    let anchor = match scheme {
        WindowScheme::Weekly => period.start - Days::new(u64::from(period.start.weekday().num_days_from_monday())),
        WindowScheme::Bimonthly => period.start.with_day(1).expect("first of month"),
        WindowScheme::CustomDays(_) => period.start,
    };
    let step = |d: NaiveDate| match scheme {
        WindowScheme::Weekly => d + Days::new(7),
        WindowScheme::Bimonthly => d + Months::new(2),
        WindowScheme::CustomDays(n) => d + Days::new(u64::from(n)),
    };
    let mut windows = Vec::new();
    let mut start = anchor;
    while start <= period.end {
        let next = step(start);
        windows.push(TimeWindow {
            index: windows.len(),
            start: local_midnight(tz, start),
            end: local_midnight(tz, next),
            scheme,
        });
        start = next;
    }
    windows
}

#[derive(Debug, Clone)]
pub struct WindowedEvents {
    pub windows: Vec<(TimeWindow, Vec<InteractionEvent>)>,
    pub dropped: usize,
}

/// Window of `t` among contiguous `windows`, if `t` falls inside `period`.
pub fn window_of(windows: &[TimeWindow], period: &StudyPeriod, tz: Tz, t: DateTime<Utc>) -> Option<usize> {
    if !period.contains_date(t.with_timezone(&tz).date_naive()) {
        return None;
    }
    let idx = windows.partition_point(|w| w.start <= t);
    debug_assert!(idx > 0 && windows[idx - 1].contains(t));
    idx.checked_sub(1)
}

/// Buckets events into the period's windows; events outside the period are
/// dropped and counted. Empty windows are kept.
pub fn window_events(
    events: &[InteractionEvent],
    scheme: WindowScheme,
    period: &StudyPeriod,
    timezone: &str,
) -> Result<WindowedEvents> {
    let tz = parse_timezone(timezone)?;
    period.validate()?;
    let windows = windows_for(period, scheme, tz);
    let mut buckets: Vec<Vec<InteractionEvent>> = vec![Vec::new(); windows.len()];
    let mut dropped = 0;
    for ev in events {
        match window_of(&windows, period, tz, ev.created_at) {
            Some(i) => buckets[i].push(ev.clone()),
            None => dropped += 1,
        }
    }
    Ok(WindowedEvents { windows: windows.into_iter().zip(buckets).collect(), dropped })
}
