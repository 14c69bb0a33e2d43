use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{invalid, Result};
use crate::stream::PassbandStream;

const TAPS: usize = 32;
const HALF: isize = (TAPS / 2) as isize;
const PHASES: usize = 1024;

/// Polyphase windowed-sinc table; row `j` interpolates at fraction `j / PHASES`.
fn table() -> &'static Vec<[f64; TAPS]> {
    static TABLE: OnceLock<Vec<[f64; TAPS]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=PHASES)
            .map(|j| {
                let f = j as f64 / PHASES as f64;
                let mut row = [0.0; TAPS];
                for (k, h) in row.iter_mut().enumerate() {
                    let u = (k as isize - HALF + 1) as f64 - f;
                    let sinc = if u == 0.0 { 1.0 } else { (PI * u).sin() / (PI * u) };
                    let x = u / TAPS as f64;
                    let w = 0.35875
                        + 0.48829 * (2.0 * PI * x).cos()
                        + 0.14128 * (4.0 * PI * x).cos()
                        + 0.01168 * (6.0 * PI * x).cos();
                    *h = sinc * w;
                }
                let sum: f64 = row.iter().sum();
                row.iter_mut().for_each(|h| *h /= sum);
                row
            })
            .collect()
    })
}

/// Band-limited value of `x` at fractional index `t`; zero outside the data.
fn interpolate(x: &[f64], t: f64) -> f64 {
    let base = t.floor();
    let frac = (t - base) * PHASES as f64;
    let j = (frac.floor() as usize).min(PHASES - 1);
    let a = frac - j as f64;
    let (r0, r1) = (&table()[j], &table()[j + 1]);
    let base = base as isize;
    let mut acc = 0.0;
    for k in 0..TAPS {
        let idx = base + k as isize - HALF + 1;
        if idx >= 0 && (idx as usize) < x.len() {
            acc += x[idx as usize] * ((1.0 - a) * r0[k] + a * r1[k]);
        }
    }
    acc
}

/// Resample as if the transmitter's chip clock ran `sro_hz` fast.
///
/// The output keeps the receiver's sample rate; sample `n` reads the input
/// at `n * (1 + sro_hz / chip_rate)`. The carrier moves with the clock.
pub fn apply_sro(signal: &PassbandStream, sro_hz: f64, chip_rate: f64) -> Result<PassbandStream> {
    if !sro_hz.is_finite() || sro_hz.abs() >= chip_rate / 100.0 {
        return Err(invalid(format!("clock offset {sro_hz} Hz out of range")));
    }
    if sro_hz == 0.0 || signal.is_empty() {
        return Ok(signal.clone());
    }
    let ratio = 1.0 + sro_hz / chip_rate;
    let ripple: Vec<f64> = signal.samples.iter().map(|v| v - signal.dc).collect();
    let n_out = ((signal.len() - 1) as f64 / ratio).floor() as usize + 1;
    let samples = (0..n_out).map(|n| signal.dc + interpolate(&ripple, n as f64 * ratio)).collect();
    Ok(signal.map_ripple(samples))
}
