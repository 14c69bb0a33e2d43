use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::stream::PassbandStream;

/// Analytic signal by zeroing the negative half of the spectrum.
fn analytic(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        if k == 0 || (n % 2 == 0 && k == n / 2) {
            continue;
        } else if k < n.div_ceil(2) {
            *v *= 2.0;
        } else {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// Rotate the ripple's carrier by `2*pi*freq_offset*t + phase_offset`.
///
/// A receiver mixing with the nominal carrier then sees its baseband turn
/// by `e^{j(2*pi*df*t + dphi)}`, as if its own oscillator were detuned.
pub fn apply_cfo(signal: &PassbandStream, freq_offset: f64, phase_offset: f64) -> PassbandStream {
    if (freq_offset == 0.0 && phase_offset == 0.0) || signal.is_empty() {
        return signal.clone();
    }
    let ripple: Vec<f64> = signal.samples.iter().map(|v| v - signal.dc).collect();
    let a = analytic(&ripple);
    let w = 2.0 * PI * freq_offset / signal.fs;
    let samples = a
        .iter()
        .enumerate()
        .map(|(n, z)| signal.dc + (z * Complex64::from_polar(1.0, w * n as f64 + phase_offset)).re)
        .collect();
    signal.map_ripple(samples)
}
