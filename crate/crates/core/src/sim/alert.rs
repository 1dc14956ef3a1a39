//! Alert events and their wire format.
//!
//! `ALERT|<ISO8601Z>|<lat 6dp>,<lon 6dp>|pulse=<bpm 1dp>|reason=<THRESHOLD|HELP_SOUND>`

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Start of simulated time; alert timestamps are this epoch plus the
/// in-run offset, so runs are reproducible.
pub fn simulation_epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2018, 5, 1, 10, 0, 0).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlertReason {
    Threshold,
    HelpSound,
}

impl AlertReason {
    fn as_str(&self) -> &'static str {
        match self {
            AlertReason::Threshold => "THRESHOLD",
            AlertReason::HelpSound => "HELP_SOUND",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlertEvent {
    pub timestamp: DateTime<Utc>,
    pub lat: f64,
    pub lon: f64,
    pub pulse_bpm: f64,
    pub reason: AlertReason,
}

/// Render the golden single-line alert format.
pub fn format_alert(ev: &AlertEvent) -> String {
    format!(
        "ALERT|{}|{:.6},{:.6}|pulse={:.1}|reason={}",
        ev.timestamp.format("%Y-%m-%dT%H:%M:%SZ"),
        ev.lat,
        ev.lon,
        ev.pulse_bpm,
        ev.reason.as_str()
    )
}

/// Parse a line produced by [`format_alert`].
pub fn parse_alert(line: &str) -> Result<AlertEvent> {
    let parts: Vec<&str> = line.trim_end().split('|').collect();
    let err = |m: &str| Error::AlertParse(m.to_string());
    if parts.len() != 5 || parts[0] != "ALERT" {
        return Err(err("expected 5 |-separated fields starting with ALERT"));
    }
    let timestamp = DateTime::parse_from_rfc3339(parts[1])
        .map_err(|e| err(&format!("bad timestamp: {e}")))?
        .with_timezone(&Utc);
    let (lat_s, lon_s) = parts[2]
        .split_once(',')
        .ok_or_else(|| err("bad coordinates"))?;
    let lat: f64 = lat_s.parse().map_err(|_| err("bad latitude"))?;
    let lon: f64 = lon_s.parse().map_err(|_| err("bad longitude"))?;
    let pulse_bpm: f64 = parts[3]
        .strip_prefix("pulse=")
        .ok_or_else(|| err("missing pulse field"))?
        .parse()
        .map_err(|_| err("bad pulse"))?;
    let reason = match parts[4].strip_prefix("reason=") {
        Some("THRESHOLD") => AlertReason::Threshold,
        Some("HELP_SOUND") => AlertReason::HelpSound,
        _ => return Err(err("bad reason")),
    };
    Ok(AlertEvent {
        timestamp,
        lat,
        lon,
        pulse_bpm,
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_line() {
        let ev = AlertEvent {
            timestamp: Utc.with_ymd_and_hms(2018, 5, 1, 10, 0, 0).unwrap(),
            lat: 28.5355,
            lon: 77.391,
            pulse_bpm: 141.3,
            reason: AlertReason::Threshold,
        };
        assert_eq!(
            format_alert(&ev),
            "ALERT|2018-05-01T10:00:00Z|28.535500,77.391000|pulse=141.3|reason=THRESHOLD"
        );
    }

    #[test]
    fn origin_renders_six_decimals() {
        let ev = AlertEvent {
            timestamp: simulation_epoch(),
            lat: 0.0,
            lon: 0.0,
            pulse_bpm: 72.0,
            reason: AlertReason::HelpSound,
        };
        assert!(format_alert(&ev).contains("|0.000000,0.000000|"));
    }

    #[test]
    fn round_trip() {
        let ev = AlertEvent {
            timestamp: Utc.with_ymd_and_hms(2019, 12, 31, 23, 59, 59).unwrap(),
            lat: -45.125,
            lon: 179.5,
            pulse_bpm: 50.5,
            reason: AlertReason::HelpSound,
        };
        let parsed = parse_alert(&format_alert(&ev)).unwrap();
        assert_eq!(parsed.timestamp, ev.timestamp);
        assert_eq!(parsed.reason, ev.reason);
        assert!((parsed.lat - ev.lat).abs() < 1e-6);
        assert!((parsed.lon - ev.lon).abs() < 1e-6);
        assert!((parsed.pulse_bpm - ev.pulse_bpm).abs() < 0.05 + 1e-9);
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(parse_alert("not an alert").is_err());
        assert!(parse_alert("ALERT|2018|x|pulse=1|reason=THRESHOLD").is_err());
        assert!(parse_alert("ALERT|2018-05-01T10:00:00Z|0,0|pulse=1|reason=NOPE").is_err());
    }
}
