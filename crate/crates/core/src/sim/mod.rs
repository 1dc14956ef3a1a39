//! Deterministic simulation of the bracelet loop: synthetic pulse signal,
//! band-pass noise cancellation, windowed pulse-rate estimation, and the
//! threshold / help-sound alert decision.

pub mod alert;
pub mod decision;
pub mod estimate;
pub mod filter;
pub mod signal;

pub use alert::{format_alert, parse_alert, AlertEvent, AlertReason};
pub use decision::{run_decision_loop, Branch, LogStep, ScenarioConfig};
pub use estimate::estimate_pulse_rate;
pub use filter::cancel_noise;
pub use signal::{generate_pulse_signal, SignalTrace, SAMPLE_RATE_HZ};
