//! The closed decision loop: per 5-second window, estimate the pulse and
//! either loop back (negative feedback), accumulate an out-of-range streak
//! toward a THRESHOLD alert, or fire a HELP_SOUND alert the moment the
//! help event falls inside the window. At most one alert per run; the
//! first trigger wins and the loop stops there.

use std::fmt::Write as _;

use chrono::Duration;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::sim::alert::{simulation_epoch, AlertEvent, AlertReason};
use crate::sim::estimate::estimate_pulse_rate;
use crate::sim::filter::cancel_noise;
use crate::sim::signal::generate_pulse_signal;
use crate::Result;

/// Decision-window length in seconds.
pub const WINDOW_S: f64 = 5.0;

fn default_bpm_low() -> f64 {
    50.0
}
fn default_bpm_high() -> f64 {
    120.0
}
fn default_consecutive_windows() -> usize {
    3
}
fn default_duration() -> f64 {
    30.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpsCoordinate {
    pub lat: f64,
    pub lon: f64,
}

impl Default for GpsCoordinate {
    fn default() -> Self {
        Self { lat: 0.0, lon: 0.0 }
    }
}

/// One simulated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub true_bpm: f64,
    #[serde(default = "default_duration")]
    pub duration_s: f64,
    #[serde(default)]
    pub noise_rms: f64,
    #[serde(default)]
    pub seed: u64,
    /// Time of a "help" utterance, seconds from run start.
    #[serde(default)]
    pub help_sound_at: Option<f64>,
    #[serde(default)]
    pub gps: GpsCoordinate,
    #[serde(default = "default_bpm_low")]
    pub bpm_low: f64,
    #[serde(default = "default_bpm_high")]
    pub bpm_high: f64,
    #[serde(default = "default_consecutive_windows")]
    pub consecutive_windows: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            true_bpm: 72.0,
            duration_s: default_duration(),
            noise_rms: 0.0,
            seed: 0,
            help_sound_at: None,
            gps: GpsCoordinate::default(),
            bpm_low: default_bpm_low(),
            bpm_high: default_bpm_high(),
            consecutive_windows: default_consecutive_windows(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(20.0..=250.0).contains(&self.true_bpm) {
            return Err(Error::InvalidScenario(format!(
                "true_bpm must be in [20, 250], got {}",
                self.true_bpm
            )));
        }
        if !(self.duration_s > 0.0) {
            return Err(Error::InvalidScenario("duration_s must be positive".into()));
        }
        if !(self.noise_rms >= 0.0) {
            return Err(Error::InvalidScenario("noise_rms must be >= 0".into()));
        }
        if !(self.bpm_low < self.bpm_high) {
            return Err(Error::InvalidScenario(format!(
                "need bpm_low < bpm_high, got {} and {}",
                self.bpm_low, self.bpm_high
            )));
        }
        if !(-90.0..=90.0).contains(&self.gps.lat) || !(-180.0..=180.0).contains(&self.gps.lon) {
            return Err(Error::InvalidScenario("gps out of range".into()));
        }
        if self.consecutive_windows == 0 {
            return Err(Error::InvalidScenario(
                "consecutive_windows must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// In-range pulse: the negative-feedback loop edge.
    InRange,
    /// Out-of-range pulse, streak not yet long enough.
    OutOfRange,
    /// Fewer than two peaks in the window.
    Unmeasurable,
    AlertThreshold,
    AlertHelp,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::InRange => "in_range",
            Branch::OutOfRange => "out_of_range",
            Branch::Unmeasurable => "unmeasurable",
            Branch::AlertThreshold => "alert_threshold",
            Branch::AlertHelp => "alert_help",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogStep {
    pub window_index: usize,
    pub t_start_s: f64,
    pub bpm: Option<f64>,
    pub branch: Branch,
}

/// Run the full sense -> filter -> estimate -> decide loop for a scenario.
pub fn run_decision_loop(cfg: &ScenarioConfig) -> Result<(Option<AlertEvent>, Vec<LogStep>)> {
    cfg.validate()?;
    let raw = generate_pulse_signal(cfg)?;
    let clean = cancel_noise(&raw)?;
    let estimates = estimate_pulse_rate(&clean, WINDOW_S)?;

    let epoch = simulation_epoch();
    let event_at = |t_s: f64, pulse: f64, reason: AlertReason| AlertEvent {
        timestamp: epoch + Duration::milliseconds((t_s * 1000.0).round() as i64),
        lat: cfg.gps.lat,
        lon: cfg.gps.lon,
        pulse_bpm: pulse,
        reason,
    };

    let mut log = Vec::new();
    let mut streak = 0usize;
    let mut last_measured = 0.0f64;
    for (w, est) in estimates.iter().enumerate() {
        let t_start = w as f64 * WINDOW_S;
        let t_end = t_start + WINDOW_S;
        if let Some(bpm) = est {
            last_measured = *bpm;
        }
        // a help utterance inside this window trumps the threshold rule
        if let Some(help_at) = cfg.help_sound_at {
            if help_at >= 0.0 && help_at < t_end {
                log.push(LogStep {
                    window_index: w,
                    t_start_s: t_start,
                    bpm: *est,
                    branch: Branch::AlertHelp,
                });
                let alert = event_at(help_at.floor(), est.unwrap_or(last_measured), AlertReason::HelpSound);
                return Ok((Some(alert), log));
            }
        }
        let branch = match est {
            None => {
                streak = 0;
                Branch::Unmeasurable
            }
            Some(bpm) if *bpm < cfg.bpm_low || *bpm > cfg.bpm_high => {
                streak += 1;
                if streak >= cfg.consecutive_windows {
                    Branch::AlertThreshold
                } else {
                    Branch::OutOfRange
                }
            }
            Some(_) => {
                streak = 0;
                Branch::InRange
            }
        };
        log.push(LogStep {
            window_index: w,
            t_start_s: t_start,
            bpm: *est,
            branch,
        });
        if branch == Branch::AlertThreshold {
            let alert = event_at(t_end, est.unwrap_or(last_measured), AlertReason::Threshold);
            return Ok((Some(alert), log));
        }
    }
    Ok((None, log))
}

/// Step log as CSV `window_index,t_start_s,bpm,branch`.
pub fn render_step_log(log: &[LogStep]) -> String {
    let mut out = String::from("window_index,t_start_s,bpm,branch\n");
    for step in log {
        let bpm = step
            .bpm
            .map(|b| format!("{b:.1}"))
            .unwrap_or_else(|| "NA".to_string());
        let _ = writeln!(
            out,
            "{},{},{},{}",
            step.window_index,
            step.t_start_s,
            bpm,
            step.branch.as_str()
        );
    }
    out
}
