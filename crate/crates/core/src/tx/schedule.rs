use crate::dsp::{PulseShape, SampleRateConfig};
use crate::error::{invalid, Result};
use crate::stream::PassbandStream;

use super::frame::ChipFrame;
use super::modulate::modulate_chips_into;

/// A frame and the time its first chip goes on air.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledFrame {
    pub start_s: f64,
    pub frame: ChipFrame,
}

/// Information signal carrying every scheduled frame over `duration_s`.
///
/// Start times are rounded to the nearest front-end sample. Frames whose
/// chips would overlap are rejected.
pub fn synthesize(
    frames: &[ScheduledFrame],
    duration_s: f64,
    rates: &SampleRateConfig,
    pulse: &PulseShape,
) -> Result<PassbandStream> {
    let fs = rates.fs_passband();
    let n = (duration_s * fs).round() as usize;
    let mut out = vec![0.0; n];
    let mut spans: Vec<(usize, usize)> = Vec::with_capacity(frames.len());
    for f in frames {
        if !(f.start_s >= 0.0) || f.start_s >= duration_s {
            return Err(invalid(format!("frame start {} s outside [0, {duration_s})", f.start_s)));
        }
        let start = (f.start_s * fs).round() as usize;
        let end = start + f.frame.len() * rates.sps_passband;
        if let Some(&(s, e)) = spans.iter().find(|&&(s, e)| start < e && s < end) {
            return Err(invalid(format!("frame at {} s overlaps another frame on samples {s}..{e}", f.start_s)));
        }
        spans.push((start, end));
        modulate_chips_into(&f.frame.chips(), rates, pulse, start, &mut out)?;
    }
    Ok(PassbandStream::new(out, fs))
}
