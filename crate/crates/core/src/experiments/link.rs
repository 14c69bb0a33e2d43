use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::channel::{apply_impairments, ImpairmentConfig};
use crate::dsp::{make_pulse_shape, SampleRateConfig};
use crate::error::{invalid, Result};
use crate::rng::{streams, substream};
use crate::rx::Reception;
use crate::stream::PassbandStream;
use crate::tx::{
    encode_payload, frame_for_message, inject_power_signal, synthesize, EnergyPacketMessage, PowerSignalConfig,
    ScheduledFrame, FRAME_CHIPS, SYNC_WORD_LEN,
};

/// Frames further than this from their expected position do not count as detections.
pub const MATCH_TOLERANCE_CHIPS: f64 = 4.0;

/// A burst of random messages sent through the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub frames: usize,
    /// Spreading codes, cycled frame by frame.
    pub codes: Vec<usize>,
    /// Silence before the first frame.
    pub lead_s: f64,
    /// Silence between frames.
    pub gap_s: f64,
    /// Silence after the last frame.
    pub tail_s: f64,
    pub impairments: ImpairmentConfig,
    pub power: PowerSignalConfig,
    pub rates: SampleRateConfig,
    /// Seeds the messages; the channel uses `impairments.rng_seed`.
    pub seed: u64,
}

impl LinkConfig {
    pub fn new(frames: usize, code: usize) -> Self {
        Self {
            frames,
            codes: vec![code],
            lead_s: 0.01,
            gap_s: 0.005,
            tail_s: 0.01,
            impairments: ImpairmentConfig::ideal(),
            power: PowerSignalConfig::default(),
            rates: SampleRateConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentFrame {
    pub message: EnergyPacketMessage,
    pub code: usize,
    pub start_s: f64,
    /// End of the sync word on the transmitter's clock.
    pub sync_end_s: f64,
    pub bits: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct Link {
    pub sent: Vec<SentFrame>,
    /// Bus voltage as seen by the receivers.
    pub signal: PassbandStream,
}

pub fn random_message<R: Rng>(rng: &mut R) -> EnergyPacketMessage {
    EnergyPacketMessage::new(rng.random(), rng.random(), rng.random_range(1..=u16::MAX))
}

/// Generate, modulate and impair the configured frames.
pub fn build_link(cfg: &LinkConfig) -> Result<Link> {
    if cfg.codes.is_empty() {
        return Err(invalid("link needs at least one spreading code"));
    }
    let pulse = make_pulse_shape(0.5, 8, cfg.rates.sps_passband)?;
    let tc = cfg.rates.chip_interval();
    let frame_s = FRAME_CHIPS as f64 * tc;
    let mut rng = substream(cfg.seed, streams::PAYLOAD);
    let mut sent = Vec::with_capacity(cfg.frames);
    let mut scheduled = Vec::with_capacity(cfg.frames);
    for k in 0..cfg.frames {
        let start_s = cfg.lead_s + k as f64 * (frame_s + cfg.gap_s);
        // keep frame starts on the chip grid
        let start_s = (start_s / tc).round() * tc;
        let message = random_message(&mut rng);
        let code = cfg.codes[k % cfg.codes.len()];
        scheduled.push(ScheduledFrame { start_s, frame: frame_for_message(&message, code)? });
        sent.push(SentFrame {
            message,
            code,
            start_s,
            sync_end_s: start_s + SYNC_WORD_LEN as f64 * tc,
            bits: encode_payload(&message),
        });
    }
    let duration = cfg.lead_s + cfg.frames as f64 * (frame_s + cfg.gap_s) + cfg.tail_s;
    let info = synthesize(&scheduled, duration, &cfg.rates, &pulse)?;
    let bus = inject_power_signal(&info, &cfg.power)?;
    let signal = apply_impairments(&bus, &cfg.impairments, &cfg.rates)?;
    Ok(Link { sent, signal })
}

/// Bus voltage with white noise of standard deviation `sigma` and no frames.
pub fn noise_only(len: usize, fs: f64, v_dc: f64, sigma: f64, seed: u64) -> Result<PassbandStream> {
    let normal = Normal::new(0.0, sigma).map_err(|e| invalid(e.to_string()))?;
    let mut rng = substream(seed, streams::AWGN);
    let samples = (0..len).map(|_| v_dc + normal.sample(&mut rng)).collect();
    Ok(PassbandStream { samples, fs, dc: v_dc })
}

/// How one receiver did against the frames sent on its code.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct LinkScore {
    /// Frames sent on the receiver's code.
    pub expected: usize,
    /// Of those, frames found by frame sync.
    pub detected: usize,
    /// Of those, frames that passed the CRC.
    pub decoded: usize,
    /// Frame-sync events that match no frame on this code.
    pub false_detections: usize,
    pub bit_errors: usize,
    /// Bits compared (detected frames only).
    pub bits: usize,
    #[serde(skip)]
    pub sent_bits: Vec<bool>,
    #[serde(skip)]
    pub received_bits: Vec<bool>,
}

impl LinkScore {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            f64::NAN
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    pub fn detection_rate(&self) -> f64 {
        if self.expected == 0 {
            f64::NAN
        } else {
            self.detected as f64 / self.expected as f64
        }
    }
}

/// Match reported frames to sent frames on `code` by detection time.
///
/// Expected times are mapped onto the receiver's clock, which runs
/// `sro_hz / chip_rate` slow against the transmitter.
pub fn score(
    sent: &[SentFrame],
    code: usize,
    reception: &Reception,
    sro_hz: f64,
    rates: &SampleRateConfig,
) -> LinkScore {
    let tc = rates.chip_interval();
    let stretch = 1.0 + sro_hz / rates.chip_rate;
    let mine: Vec<&SentFrame> = sent.iter().filter(|f| f.code == code).collect();
    let mut out = LinkScore { expected: mine.len(), ..Default::default() };
    let mut used = vec![false; reception.frames.len()];
    for f in &mine {
        let expect = f.sync_end_s / stretch;
        let hit = reception
            .frames
            .iter()
            .enumerate()
            .filter(|(i, r)| !used[*i] && (r.detection_time_s - expect).abs() <= MATCH_TOLERANCE_CHIPS * tc)
            .min_by(|a, b| {
                let da = (a.1.detection_time_s - expect).abs();
                let db = (b.1.detection_time_s - expect).abs();
                da.total_cmp(&db)
            });
        if let Some((i, r)) = hit {
            used[i] = true;
            out.detected += 1;
            if r.message.is_some() {
                out.decoded += 1;
            }
            if r.bits.len() == f.bits.len() {
                out.bits += f.bits.len();
                out.bit_errors += r.bits.iter().zip(&f.bits).filter(|(a, b)| a != b).count();
                out.sent_bits.extend(&f.bits);
                out.received_bits.extend(&r.bits);
            }
        }
    }
    out.false_detections = used.iter().filter(|u| !**u).count();
    out
}

/// Correlation of two bit strings mapped to +-1, for lags `-max_lag..=max_lag`.
pub fn bit_xcorr(a: &[bool], b: &[bool], max_lag: usize) -> Vec<(isize, f64)> {
    let pm = |x: bool| if x { 1.0 } else { -1.0 };
    let max_lag = max_lag as isize;
    (-max_lag..=max_lag)
        .map(|lag| {
            let sum = (0..a.len() as isize)
                .filter_map(|i| {
                    let j = i + lag;
                    (j >= 0 && (j as usize) < b.len()).then(|| pm(a[i as usize]) * pm(b[j as usize]))
                })
                .sum();
            (lag, sum)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rx::{receive, ReceiverConfig};

    #[test]
    fn clean_link_scores_perfectly() {
        let cfg = LinkConfig::new(2, 3);
        let link = build_link(&cfg).unwrap();
        let r = receive(&link.signal, 3, &ReceiverConfig::default()).unwrap();
        let s = score(&link.sent, 3, &r, 0.0, &cfg.rates);
        assert_eq!((s.expected, s.detected, s.decoded, s.false_detections), (2, 2, 2, 0));
        assert_eq!(s.ber(), 0.0);
    }

    #[test]
    fn xcorr_of_identical_strings_peaks_at_zero() {
        let a = [true, false, false, true, true, false];
        let c = bit_xcorr(&a, &a, 2);
        assert_eq!(c[2], (0, 6.0));
        assert!(c.iter().filter(|(l, _)| *l != 0).all(|(_, v)| *v < 6.0));
    }
}
