//! Windowed pulse-rate estimation by peak detection.
//!
//! A peak is a local maximum above the window's amplitude threshold --
//! mean + max(0.5 * stdev, 0.5 * (max - mean)), so band-pass ringing lobes
//! between slow beats are rejected -- with at least 0.25 s refractory
//! spacing from the previous accepted peak.
//! bpm = 60 * (peaks - 1) / span between first and last peak; windows with
//! fewer than two peaks are unmeasurable.

use crate::error::Error;
use crate::sim::signal::SignalTrace;
use crate::Result;

const REFRACTORY_S: f64 = 0.25;
const THRESHOLD_SIGMA: f64 = 0.5;
const THRESHOLD_PEAK_FRAC: f64 = 0.5;
const MIN_WINDOW_S: f64 = 2.0;

/// Sample indices of accepted peaks within `samples`.
pub fn detect_peaks(samples: &[f64], sample_rate: f64) -> Vec<usize> {
    if samples.len() < 3 {
        return Vec::new();
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = mean + (THRESHOLD_SIGMA * var.sqrt()).max(THRESHOLD_PEAK_FRAC * (max - mean));
    let refractory = (REFRACTORY_S * sample_rate).round() as usize;

    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..samples.len() - 1 {
        if samples[i] <= threshold {
            continue;
        }
        if samples[i] > samples[i - 1] && samples[i] >= samples[i + 1] {
            if let Some(&last) = peaks.last() {
                if i - last < refractory {
                    continue;
                }
            }
            peaks.push(i);
        }
    }
    peaks
}

/// Estimate bpm per non-overlapping window of `window_s` seconds.
/// `None` entries are unmeasurable windows.
pub fn estimate_pulse_rate(clean: &SignalTrace, window_s: f64) -> Result<Vec<Option<f64>>> {
    if clean.samples.is_empty() {
        return Err(Error::InvalidScenario("empty trace".into()));
    }
    if window_s < MIN_WINDOW_S {
        return Err(Error::InvalidScenario(format!(
            "window must be at least {MIN_WINDOW_S} s, got {window_s}"
        )));
    }
    let window_len = (window_s * clean.sample_rate).round() as usize;
    let mut out = Vec::new();
    let mut start = 0usize;
    while start + window_len <= clean.samples.len() {
        let window = &clean.samples[start..start + window_len];
        out.push(window_bpm(window, clean.sample_rate));
        start += window_len;
    }
    if out.is_empty() {
        // trace shorter than one window: estimate over what there is
        out.push(window_bpm(&clean.samples, clean.sample_rate));
    }
    Ok(out)
}

fn window_bpm(window: &[f64], sample_rate: f64) -> Option<f64> {
    let peaks = detect_peaks(window, sample_rate);
    if peaks.len() < 2 {
        return None;
    }
    let span = (peaks[peaks.len() - 1] - peaks[0]) as f64 / sample_rate;
    Some(60.0 * (peaks.len() - 1) as f64 / span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::decision::ScenarioConfig;
    use crate::sim::filter::cancel_noise;
    use crate::sim::signal::generate_pulse_signal;

    #[test]
    fn clean_sixty_bpm_window() {
        let cfg = ScenarioConfig {
            true_bpm: 60.0,
            duration_s: 10.0,
            noise_rms: 0.0,
            ..Default::default()
        };
        let clean = cancel_noise(&generate_pulse_signal(&cfg).unwrap()).unwrap();
        let estimates = estimate_pulse_rate(&clean, 5.0).unwrap();
        assert_eq!(estimates.len(), 2);
        for est in estimates {
            let bpm = est.expect("measurable");
            assert!((bpm - 60.0).abs() <= 1.0, "estimate {bpm}");
        }
    }

    #[test]
    fn flat_line_unmeasurable() {
        let trace = SignalTrace {
            samples: vec![0.3; 800],
            sample_rate: 100.0,
        };
        let estimates = estimate_pulse_rate(&trace, 5.0).unwrap();
        assert!(estimates.iter().all(|e| e.is_none()));
    }

    #[test]
    fn empty_trace_rejected() {
        let trace = SignalTrace {
            samples: vec![],
            sample_rate: 100.0,
        };
        assert!(estimate_pulse_rate(&trace, 5.0).is_err());
    }

    #[test]
    fn short_window_rejected() {
        let trace = SignalTrace {
            samples: vec![0.0; 100],
            sample_rate: 100.0,
        };
        assert!(estimate_pulse_rate(&trace, 1.0).is_err());
    }
}
