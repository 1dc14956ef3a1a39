//! Noise cancellation as a 0.7-4.0 Hz band-pass: a second-order Butterworth
//! high-pass cascaded with a second-order Butterworth low-pass (RBJ biquad
//! coefficients, Q = 1/sqrt(2)).

use crate::error::Error;
use crate::sim::signal::SignalTrace;
use crate::Result;

const HIGH_PASS_HZ: f64 = 0.7;
const LOW_PASS_HZ: f64 = 4.0;
const MIN_SAMPLE_RATE_HZ: f64 = 20.0;

/// Direct-form-I biquad section.
#[derive(Debug, Clone, Copy)]
pub struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
}

impl Biquad {
    fn from_normalized(b: [f64; 3], a0: f64, a1: f64, a2: f64) -> Self {
        Self {
            b0: b[0] / a0,
            b1: b[1] / a0,
            b2: b[2] / a0,
            a1: a1 / a0,
            a2: a2 / a0,
            x1: 0.0,
            x2: 0.0,
            y1: 0.0,
            y2: 0.0,
        }
    }

    pub fn low_pass(cutoff_hz: f64, sample_rate: f64) -> Self {
        let w0 = 2.0 * std::f64::consts::PI * cutoff_hz / sample_rate;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * std::f64::consts::FRAC_1_SQRT_2);
        let b1 = 1.0 - cos;
        Self::from_normalized(
            [b1 / 2.0, b1, b1 / 2.0],
            1.0 + alpha,
            -2.0 * cos,
            1.0 - alpha,
        )
    }

    pub fn high_pass(cutoff_hz: f64, sample_rate: f64) -> Self {
        let w0 = 2.0 * std::f64::consts::PI * cutoff_hz / sample_rate;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * std::f64::consts::FRAC_1_SQRT_2);
        let b1 = 1.0 + cos;
        Self::from_normalized(
            [b1 / 2.0, -b1, b1 / 2.0],
            1.0 + alpha,
            -2.0 * cos,
            1.0 - alpha,
        )
    }

    pub fn process(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.b1 * self.x1 + self.b2 * self.x2
            - self.a1 * self.y1
            - self.a2 * self.y2;
        self.x2 = self.x1;
        self.x1 = x;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Band-pass the raw trace to the beat band. Same length and rate out;
/// zero in, zero out.
pub fn cancel_noise(raw: &SignalTrace) -> Result<SignalTrace> {
    if raw.sample_rate < MIN_SAMPLE_RATE_HZ {
        return Err(Error::InvalidScenario(format!(
            "sample rate {} Hz too low for the {HIGH_PASS_HZ}-{LOW_PASS_HZ} Hz band",
            raw.sample_rate
        )));
    }
    let mut hp = Biquad::high_pass(HIGH_PASS_HZ, raw.sample_rate);
    let mut lp = Biquad::low_pass(LOW_PASS_HZ, raw.sample_rate);
    let samples = raw
        .samples
        .iter()
        .map(|&x| lp.process(hp.process(x)))
        .collect();
    Ok(SignalTrace {
        samples,
        sample_rate: raw.sample_rate,
    })
}
