//! Simulated wall clock and the `DD/MM/YY-HH:MM:SS` timestamp format.

use chrono::{Duration, NaiveDateTime};

use super::LedgerError;

pub const TIMESTAMP_FORMAT: &str = "%d/%m/%y-%H:%M:%S";

/// Maps simulated seconds since the scenario epoch onto calendar time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimClock {
    epoch: NaiveDateTime,
}

impl SimClock {
    pub fn new(epoch: NaiveDateTime) -> Self {
        Self { epoch }
    }

    pub fn from_timestamp(ts: &str) -> Result<Self, LedgerError> {
        parse_timestamp(ts).map(Self::new)
    }

    pub fn format(&self, seconds: u64) -> String {
        let at = self.epoch + Duration::seconds(seconds as i64);
        at.format(TIMESTAMP_FORMAT).to_string()
    }
}

impl Default for SimClock {
    fn default() -> Self {
        Self::from_timestamp("01/03/20-00:00:00").expect("valid default epoch")
    }
}

/// Parses a timestamp, requiring the exact zero-padded shape.
pub fn parse_timestamp(ts: &str) -> Result<NaiveDateTime, LedgerError> {
    const SHAPE: &[u8] = b"dd/dd/dd-dd:dd:dd";
    let bytes = ts.as_bytes();
    let shaped = bytes.len() == SHAPE.len()
        && bytes.iter().zip(SHAPE).all(|(&b, &s)| if s == b'd' { b.is_ascii_digit() } else { b == s });
    if !shaped {
        return Err(LedgerError::Format(format!("timestamp {ts:?} is not DD/MM/YY-HH:MM:SS")));
    }
    NaiveDateTime::parse_from_str(ts, TIMESTAMP_FORMAT)
        .map_err(|e| LedgerError::Format(format!("timestamp {ts:?}: {e}")))
}
