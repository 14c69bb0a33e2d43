use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{GainSchedule, ImpairmentConfig, RandomGainSchedule};
use crate::error::{invalid, Result};
use crate::rx::{receive, ReceiverConfig};

use super::link::{build_link, noise_only, score, LinkConfig, LinkScore};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// SNR points in dB; `+inf` disables noise, `-inf` sends noise only.
    pub snrs_db: Vec<f64>,
    /// Runs per SNR point.
    pub seeds: u64,
    pub base_seed: u64,
    /// Frames per run.
    pub frames: usize,
    pub code: usize,
    /// Channel settings other than SNR and seed.
    pub impairments: ImpairmentConfig,
    pub receiver: ReceiverConfig,
}

impl SweepConfig {
    /// Sweep over the combined impairment set: pi/6 phase, 5 Hz carrier
    /// offset, 2 Hz clock offset and the random 175 ms gain schedule.
    pub fn combined(snrs_db: Vec<f64>, seeds: u64) -> Self {
        Self {
            snrs_db,
            seeds,
            base_seed: 0,
            frames: 10,
            code: 3,
            impairments: ImpairmentConfig {
                gain_schedule: GainSchedule::Random(RandomGainSchedule {
                    period_s: 0.175,
                    min_gain: 0.5,
                    max_gain: 1.25,
                }),
                phase_offset_rad: std::f64::consts::FRAC_PI_6,
                freq_offset_hz: 5.0,
                sro_hz: 2.0,
                ..ImpairmentConfig::ideal()
            },
            receiver: ReceiverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub runs: u64,
    pub frames: usize,
    pub detected: usize,
    pub decoded: usize,
    pub false_detections: usize,
    pub bit_errors: usize,
    pub bits: usize,
    /// Bit error rate over the detected frames; NaN if none were detected.
    pub ber: f64,
    /// 95% Wilson interval of `ber`.
    pub ber_low: f64,
    pub ber_high: f64,
    pub detection_rate: f64,
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054;
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let den = 1.0 + z * z / n_f;
    let center = (p + z * z / (2.0 * n_f)) / den;
    let half = z * (p * (1.0 - p) / n_f + z * z / (4.0 * n_f * n_f)).sqrt() / den;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn run_one(cfg: &SweepConfig, snr_db: f64, seed: u64) -> Result<LinkScore> {
    let mut link_cfg = LinkConfig::new(cfg.frames, cfg.code);
    link_cfg.seed = seed;
    link_cfg.rates = cfg.receiver.rates;
    link_cfg.impairments = ImpairmentConfig {
        snr_db: (snr_db != f64::INFINITY).then_some(snr_db),
        rng_seed: seed,
        ..cfg.impairments.clone()
    };
    if snr_db == f64::NEG_INFINITY {
        // same length and noise floor reference as a clean run, no frames
        link_cfg.impairments = ImpairmentConfig::ideal();
        let clean = build_link(&link_cfg)?;
        let sigma = clean.signal.ripple_power().sqrt();
        let noise = noise_only(clean.signal.len(), clean.signal.fs, link_cfg.power.v_dc, sigma, seed)?;
        let r = receive(&noise, cfg.code, &cfg.receiver)?;
        return Ok(LinkScore { expected: cfg.frames, false_detections: r.frames.len(), ..LinkScore::default() });
    }
    if snr_db.is_nan() {
        return Err(invalid("SNR must not be NaN"));
    }
    let link = build_link(&link_cfg)?;
    let r = receive(&link.signal, cfg.code, &cfg.receiver)?;
    Ok(score(&link.sent, cfg.code, &r, link_cfg.impairments.sro_hz, &link_cfg.rates))
}

/// BER and detection rate per SNR point, runs spread over worker threads.
///
/// Rows come back sorted by SNR; run `s` of every point uses seed
/// `base_seed + s`.
pub fn ber_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.snrs_db.is_empty() {
        return Err(invalid("SNR list is empty"));
    }
    if cfg.seeds == 0 {
        return Err(invalid("seed count must be at least 1"));
    }
    let mut snrs = cfg.snrs_db.clone();
    snrs.sort_by(f64::total_cmp);
    snrs.dedup();
    let jobs: Vec<(f64, u64)> =
        snrs.iter().flat_map(|&s| (0..cfg.seeds).map(move |k| (s, cfg.base_seed.wrapping_add(k)))).collect();
    let results: Vec<LinkScore> = jobs.par_iter().map(|&(s, seed)| run_one(cfg, s, seed)).collect::<Result<_>>()?;
    let per_point = cfg.seeds as usize;
    Ok(snrs
        .iter()
        .zip(results.chunks(per_point))
        .map(|(&snr_db, runs)| {
            let sum = |f: fn(&LinkScore) -> usize| runs.iter().map(f).sum::<usize>();
            let (bits, bit_errors) = (sum(|r| r.bits), sum(|r| r.bit_errors));
            let frames = sum(|r| r.expected);
            let detected = sum(|r| r.detected);
            let (ber_low, ber_high) = wilson_interval(bit_errors, bits);
            SweepRow {
                snr_db,
                runs: cfg.seeds,
                frames,
                detected,
                decoded: sum(|r| r.decoded),
                false_detections: sum(|r| r.false_detections),
                bit_errors,
                bits,
                ber: if bits == 0 { f64::NAN } else { bit_errors as f64 / bits as f64 },
                ber_low,
                ber_high,
                detection_rate: detected as f64 / frames.max(1) as f64,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 480);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && (0.5 - lo - (hi - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn rejects_empty_sweep() {
        assert!(ber_sweep(&SweepConfig::combined(vec![], 1)).is_err());
        assert!(ber_sweep(&SweepConfig::combined(vec![10.0], 0)).is_err());
    }

    #[test]
    fn rows_sorted_and_clean_point_is_error_free() {
        let mut cfg = SweepConfig::combined(vec![f64::INFINITY, f64::NEG_INFINITY], 1);
        cfg.frames = 2;
        let rows = ber_sweep(&cfg).unwrap();
        assert_eq!(rows[0].snr_db, f64::NEG_INFINITY);
        assert_eq!(rows[0].detected, 0);
        assert!(rows[0].ber.is_nan());
        assert_eq!((rows[1].detected, rows[1].bit_errors), (2, 0));
    }
}
