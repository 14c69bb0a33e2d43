use epmodem::channel::{apply_cfo, apply_impairments, apply_sro, GainSchedule, ImpairmentConfig, RandomGainSchedule};
use epmodem::dsp::{make_pulse_shape, SampleRateConfig};
use epmodem::experiments::random_chip_stream;
use epmodem::rx::{downconvert, matched_filter};
use epmodem::{PassbandStream, PowerSignalConfig};

/// Lag (in samples, fractional) that best aligns `y[n]` with `x[n + lag]`
/// over `range`, refined with a parabola through the integer peak.
fn best_lag(x: &[f64], y: &[f64], range: std::ops::Range<usize>, max_lag: isize) -> f64 {
    let c = |lag: isize| range.clone().map(|n| y[n] * x[(n as isize + lag) as usize]).sum::<f64>();
    let k = (-max_lag..=max_lag).max_by(|&a, &b| c(a).total_cmp(&c(b))).unwrap();
    let (l, m, r) = (c(k - 1), c(k), c(k + 1));
    k as f64 + 0.5 * (l - r) / (l - 2.0 * m + r)
}

#[test]
fn two_hz_offset_drifts_two_chips_per_second() {
    let rates = SampleRateConfig::default();
    let (_, bus) = random_chip_stream(1.1, &rates, &PowerSignalConfig::default(), 3).unwrap();
    let x: Vec<f64> = bus.samples.iter().map(|v| v - bus.dc).collect();
    let y: Vec<f64> = apply_sro(&bus, 2.0, rates.chip_rate).unwrap().samples.iter().map(|v| v - bus.dc).collect();
    let sps = rates.sps_passband as f64;
    let ratio = 2.0 / rates.chip_rate;
    let window = 4000;
    let mut lags = Vec::new();
    for n0 in [1000, 1000 + 64_000] {
        let lag = best_lag(&x, &y, n0..n0 + window, 24);
        // the transmitter runs 250 ppm fast, so its content arrives early
        let centre = (n0 + window / 2) as f64;
        assert!((lag - ratio * centre).abs() < 0.25, "lag {lag} at sample {centre}");
        lags.push(lag);
    }
    let drift_chips = (lags[1] - lags[0]) / sps;
    assert!((drift_chips - 2.0).abs() < 0.05, "drift {drift_chips} chips in 1 s");
}

#[test]
fn cfo_rotates_the_baseband() {
    let rates = SampleRateConfig::default();
    let (_, bus) = random_chip_stream(0.3, &rates, &PowerSignalConfig::default(), 9).unwrap();
    let ripple = |s: &PassbandStream| PassbandStream::new(s.samples.iter().map(|v| v - s.dc).collect(), s.fs);
    let pulse = make_pulse_shape(0.5, 8, rates.sps_passband).unwrap();
    let base = matched_filter(&downconvert(&ripple(&bus), &rates), &pulse).unwrap();
    let shifted = matched_filter(&downconvert(&ripple(&apply_cfo(&bus, 5.0, 0.4)), &rates), &pulse).unwrap();
    // mean rotation over short windows: phase 0.4 rad plus 5 Hz of drift
    let fs = rates.fs_passband();
    for t in [0.05, 0.1, 0.15, 0.2] {
        let n0 = (t * fs) as usize;
        let z: epmodem::Complex64 = (n0..n0 + 640).map(|n| shifted.samples[n] * base.samples[n].conj()).sum();
        let want = 0.4 + 2.0 * std::f64::consts::PI * 5.0 * (t + 320.0 / fs);
        let err = epmodem::dsp::wrap_phase(z.arg() - want);
        assert!(err.abs() < 0.02, "t = {t}: error {err}");
    }
}

#[test]
fn impairment_stack_keeps_the_dc_level() {
    let rates = SampleRateConfig::default();
    let (_, bus) = random_chip_stream(0.5, &rates, &PowerSignalConfig::default(), 1).unwrap();
    let cfg = ImpairmentConfig {
        gain_schedule: GainSchedule::Random(RandomGainSchedule { period_s: 0.175, min_gain: 0.5, max_gain: 1.25 }),
        phase_offset_rad: 0.5,
        freq_offset_hz: 5.0,
        sro_hz: 2.0,
        snr_db: Some(20.0),
        rng_seed: 5,
    };
    let out = apply_impairments(&bus, &cfg, &rates).unwrap();
    assert_eq!(out.dc, bus.dc);
    let mean = out.samples.iter().sum::<f64>() / out.len() as f64;
    assert!((mean - 15.0).abs() < 0.01, "mean {mean}");
}
