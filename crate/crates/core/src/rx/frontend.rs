use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dsp::{fir_filter, PulseShape, SampleRateConfig};
use crate::error::Result;
use crate::stream::{BasebandStream, PassbandStream};

/// Pole of the DC-blocking high-pass (about 10 Hz corner at 64 kHz).
pub const DC_BLOCK_POLE: f64 = 0.999;

/// `y[n] = x[n] - x[n-1] + p*y[n-1]`, started as if the input had always
/// been at `x[0]`, so a bus sitting at its DC level gives exactly zero.
pub fn dc_block(x: &[f64]) -> Vec<f64> {
    let mut prev_x = x.first().copied().unwrap_or(0.0);
    let mut prev_y = 0.0;
    x.iter()
        .map(|&v| {
            let y = v - prev_x + DC_BLOCK_POLE * prev_y;
            prev_x = v;
            prev_y = y;
            y
        })
        .collect()
}

/// Mix with `2 e^{-j Omega0 k}`; the double-frequency image is left for the
/// matched filter. The input is expected to be DC-free.
pub fn downconvert(signal: &PassbandStream, rates: &SampleRateConfig) -> BasebandStream {
    let w = 2.0 * PI * rates.fc_carrier / signal.fs;
    let samples =
        signal.samples.iter().enumerate().map(|(k, &r)| Complex64::from_polar(2.0 * r, -w * k as f64)).collect();
    BasebandStream::new(samples, signal.fs)
}

/// Matched-filter at the front-end rate, delay-compensated: output `n` sits
/// at input sample `n`.
pub fn matched_filter(bb: &BasebandStream, pulse: &PulseShape) -> Result<BasebandStream> {
    let mf = fir_filter(&bb.samples, &pulse.taps)?;
    Ok(BasebandStream::new(mf.samples[mf.group_delay..].to_vec(), bb.fs))
}

/// [`matched_filter`], keeping every `decimation`-th sample: output `d` sits
/// at input sample `d * decimation`.
pub fn matched_filter_decimate(bb: &BasebandStream, pulse: &PulseShape, decimation: usize) -> Result<BasebandStream> {
    if decimation == 0 {
        return Err(crate::error::invalid("decimation must be at least 1"));
    }
    let mf = matched_filter(bb, pulse)?;
    let samples = mf.samples.iter().step_by(decimation).copied().collect();
    Ok(BasebandStream::new(samples, bb.fs / decimation as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::make_pulse_shape;

    #[test]
    fn dc_block_removes_level() {
        let x: Vec<f64> = (0..20_000).map(|n| 15.0 + 0.1 * (PI * n as f64 / 2.0).cos()).collect();
        let y = dc_block(&x);
        let tail = &y[10_000..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        assert!(mean.abs() < 1e-3);
        let peak = tail.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((peak - 0.1).abs() < 1e-3);
        assert!(dc_block(&[15.0; 100]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pure_carrier_maps_to_one() {
        let rates = SampleRateConfig::default();
        let s = PassbandStream::new((0..64).map(|k| (PI * k as f64 / 2.0).cos()).collect(), 64_000.0);
        let bb = downconvert(&s, &rates);
        // 1 + e^{-j 2 Omega0 k}
        for (k, z) in bb.samples.iter().enumerate() {
            let expect = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -PI * k as f64);
            assert!((z - expect).norm() < 1e-12);
        }
        let zero = downconvert(&PassbandStream::new(vec![0.0; 8], 64_000.0), &rates);
        assert!(zero.samples.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn phase_offset_follows_cosine_argument() {
        let rates = SampleRateConfig::default();
        let phi = PI / 6.0;
        let s = PassbandStream::new((0..2000).map(|k| (PI * k as f64 / 2.0 + phi).cos()).collect(), 64_000.0);
        let pulse = make_pulse_shape(0.5, 8, 8).unwrap();
        let bb = matched_filter_decimate(&downconvert(&s, &rates), &pulse, 4).unwrap();
        let z = bb.samples[250];
        assert!((z.arg() - phi).abs() < 5e-3, "angle {}", z.arg());
    }
}
