//! Synthetic piezo-sensor waveform: one Gaussian systolic bump per beat,
//! a 0.2 Hz baseline-wander sinusoid, and seeded white noise.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rng::derive_rng;
use crate::sim::decision::ScenarioConfig;
use crate::Result;

/// Fixed simulation sample rate; resolves 20-250 bpm comfortably.
pub const SAMPLE_RATE_HZ: f64 = 100.0;

/// Width of the systolic bump in seconds.
const BUMP_SIGMA_S: f64 = 0.05;
/// Amplitude of the 0.2 Hz baseline wander.
const BASELINE_AMPLITUDE: f64 = 0.1;
const BASELINE_HZ: f64 = 0.2;

/// A sampled voltage sequence (arbitrary gain).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalTrace {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
}

impl SignalTrace {
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

/// Generate the raw sensor trace for a scenario. Beat centers sit at
/// `(k + 1/2) * 60 / true_bpm` seconds. Deterministic per seed.
pub fn generate_pulse_signal(cfg: &ScenarioConfig) -> Result<SignalTrace> {
    cfg.validate()?;
    let n = (cfg.duration_s * SAMPLE_RATE_HZ).round() as usize;
    let mut samples = vec![0.0f64; n];

    for (i, s) in samples.iter_mut().enumerate() {
        let t = i as f64 / SAMPLE_RATE_HZ;
        *s = BASELINE_AMPLITUDE * (2.0 * std::f64::consts::PI * BASELINE_HZ * t).sin();
    }

    let period = 60.0 / cfg.true_bpm;
    let mut beat = 0usize;
    loop {
        let center = (beat as f64 + 0.5) * period;
        if center >= cfg.duration_s {
            break;
        }
        let lo = (((center - 4.0 * BUMP_SIGMA_S) * SAMPLE_RATE_HZ).floor().max(0.0)) as usize;
        let hi = ((center + 4.0 * BUMP_SIGMA_S) * SAMPLE_RATE_HZ).ceil() as usize;
        for i in lo..hi.min(n) {
            let t = i as f64 / SAMPLE_RATE_HZ;
            let d = t - center;
            samples[i] += (-d * d / (2.0 * BUMP_SIGMA_S * BUMP_SIGMA_S)).exp();
        }
        beat += 1;
    }

    if cfg.noise_rms > 0.0 {
        let mut rng = derive_rng(cfg.seed, "signal-noise");
        let dist = Normal::new(0.0, cfg.noise_rms).map_err(|e| {
            Error::InvalidScenario(format!("bad noise_rms: {e}"))
        })?;
        for s in &mut samples {
            *s += dist.sample(&mut rng);
        }
    }

    Ok(SignalTrace {
        samples,
        sample_rate: SAMPLE_RATE_HZ,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::estimate::detect_peaks;

    fn clean_cfg(bpm: f64, duration: f64) -> ScenarioConfig {
        ScenarioConfig {
            true_bpm: bpm,
            duration_s: duration,
            noise_rms: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn sixty_bpm_ten_seconds_ten_peaks() {
        let trace = generate_pulse_signal(&clean_cfg(60.0, 10.0)).unwrap();
        let peaks = detect_peaks(&trace.samples, trace.sample_rate);
        assert_eq!(peaks.len(), 10);
        for pair in peaks.windows(2) {
            let dt = (pair[1] - pair[0]) as f64 / trace.sample_rate;
            assert!((dt - 1.0).abs() < 1e-9, "inter-peak spacing {dt}");
        }
    }

    #[test]
    fn same_seed_identical_trace() {
        let cfg = ScenarioConfig {
            noise_rms: 0.2,
            seed: 31,
            ..Default::default()
        };
        assert_eq!(
            generate_pulse_signal(&cfg).unwrap(),
            generate_pulse_signal(&cfg).unwrap()
        );
    }

    #[test]
    fn out_of_range_bpm_rejected() {
        assert!(generate_pulse_signal(&clean_cfg(10.0, 10.0)).is_err());
        assert!(generate_pulse_signal(&clean_cfg(300.0, 10.0)).is_err());
    }

    #[test]
    fn all_samples_finite() {
        let cfg = ScenarioConfig {
            noise_rms: 0.5,
            ..Default::default()
        };
        let trace = generate_pulse_signal(&cfg).unwrap();
        assert!(trace.samples.iter().all(|s| s.is_finite()));
    }
}
