use std::f64::consts::PI;

use crate::dsp::{fir_filter, PulseShape, SampleRateConfig};
use crate::error::{invalid, Result};
use crate::stream::PassbandStream;

use super::frame::ChipFrame;

/// Pulse-shape and up-convert one frame, starting at sample 0.
///
/// Output length is `chips * sps_passband + taps - 1`; chip `k` peaks at
/// sample `k * sps_passband + pulse.group_delay()`.
pub fn modulate(frame: &ChipFrame, rates: &SampleRateConfig, pulse: &PulseShape) -> Result<PassbandStream> {
    let chips = frame.chips();
    let n = chips.len() * rates.sps_passband + pulse.taps.len() - 1;
    let mut out = vec![0.0; n];
    modulate_chips_into(&chips, rates, pulse, 0, &mut out)?;
    Ok(PassbandStream::new(out, rates.fs_passband()))
}

/// Add the modulated chips into `out` with chip 0 at sample `start`.
///
/// The carrier phase follows the absolute sample index, so frames placed at
/// different offsets share one continuous carrier. Samples past the end of
/// `out` are dropped.
pub fn modulate_chips_into(
    chips: &[f64],
    rates: &SampleRateConfig,
    pulse: &PulseShape,
    start: usize,
    out: &mut [f64],
) -> Result<()> {
    if pulse.sps != rates.sps_passband {
        return Err(invalid(format!(
            "pulse designed for {} samples/chip, rates use {}",
            pulse.sps, rates.sps_passband
        )));
    }
    let sps = rates.sps_passband;
    let mut impulses = vec![0.0; chips.len() * sps];
    for (k, &c) in chips.iter().enumerate() {
        impulses[k * sps] = c;
    }
    let shaped = fir_filter(&impulses, &pulse.taps)?.samples;
    let w = 2.0 * PI * rates.fc_carrier / rates.fs_passband();
    for (i, v) in shaped.iter().enumerate() {
        let n = start + i;
        if n >= out.len() {
            break;
        }
        out[n] += v * (w * n as f64).cos();
    }
    Ok(())
}
