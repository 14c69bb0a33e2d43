use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::stream::PassbandStream;

const MIN_GAIN: f64 = 0.1;
const MAX_GAIN: f64 = 10.0;

/// Gain applied from `start_s` until the next step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainStep {
    pub start_s: f64,
    pub gain: f64,
}

fn validate(schedule: &[GainStep]) -> Result<()> {
    let first = schedule.first().ok_or_else(|| invalid("gain schedule is empty"))?;
    if first.start_s > 0.0 {
        return Err(invalid(format!("gain schedule starts at {} s, must cover t = 0", first.start_s)));
    }
    for w in schedule.windows(2) {
        if w[1].start_s <= w[0].start_s {
            return Err(invalid("gain schedule times must be strictly increasing"));
        }
    }
    if let Some(s) = schedule.iter().find(|s| !(MIN_GAIN..=MAX_GAIN).contains(&s.gain)) {
        return Err(invalid(format!("gain {} outside [{MIN_GAIN}, {MAX_GAIN}]", s.gain)));
    }
    Ok(())
}

/// Scale the ripple piecewise-constantly; the DC level is left alone.
pub fn apply_gain_profile(signal: &PassbandStream, schedule: &[GainStep]) -> Result<PassbandStream> {
    validate(schedule)?;
    let mut step = 0;
    let samples = signal
        .samples
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let t = n as f64 / signal.fs;
            while step + 1 < schedule.len() && schedule[step + 1].start_s <= t {
                step += 1;
            }
            signal.dc + schedule[step].gain * (v - signal.dc)
        })
        .collect();
    Ok(signal.map_ripple(samples))
}

/// Uniform random gains in `[min, max]`, changing every `period` seconds.
pub fn random_gain_schedule<R: Rng>(duration: f64, period: f64, min: f64, max: f64, rng: &mut R) -> Vec<GainStep> {
    let steps = (duration / period).ceil().max(1.0) as usize;
    (0..steps).map(|k| GainStep { start_s: k as f64 * period, gain: rng.random_range(min..=max) }).collect()
}
