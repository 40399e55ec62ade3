//! Weekday arithmetic. No holiday calendar: a "trading day" here is any
//! Monday through Friday.

use chrono::{Datelike, Days, NaiveDate, Weekday};

pub fn is_weekday(date: NaiveDate) -> bool {
    !matches!(date.weekday(), Weekday::Sat | Weekday::Sun)
}

/// The first `count` weekdays on or after `start`.
pub fn weekdays_from(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    let mut day = start;
    while out.len() < count {
        if is_weekday(day) {
            out.push(day);
        }
        day = day + Days::new(1);
    }
    out
}

/// Number of weekdays in the half-open range `[from, to)`. Zero when
/// `to <= from`.
pub fn weekdays_between(from: NaiveDate, to: NaiveDate) -> usize {
    if to <= from {
        return 0;
    }
    let span = (to - from).num_days() as usize;
    let full_weeks = span / 7;
    let mut count = full_weeks * 5;
    let mut day = from + Days::new((full_weeks * 7) as u64);
    while day < to {
        if is_weekday(day) {
            count += 1;
        }
        day = day + Days::new(1);
    }
    count
}
