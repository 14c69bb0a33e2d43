//! Channel impairments applied to the transmitted bus waveform.
//!
//! Every block acts on the ripple around the stream's nominal DC level and
//! leaves the DC level itself untouched.

mod awgn;
mod cfo;
mod gain;
mod sro;

pub use awgn::add_awgn;
pub use cfo::apply_cfo;
pub use gain::{apply_gain_profile, random_gain_schedule, GainStep};
pub use sro::apply_sro;

use serde::{Deserialize, Serialize};

use crate::dsp::SampleRateConfig;
use crate::error::Result;
use crate::rng::{streams, substream};
use crate::stream::PassbandStream;

/// Randomly drawn piecewise-constant gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomGainSchedule {
    pub period_s: f64,
    pub min_gain: f64,
    pub max_gain: f64,
}

/// Either explicit `(start, gain)` steps or a random schedule drawn from
/// the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GainSchedule {
    Steps(Vec<GainStep>),
    Random(RandomGainSchedule),
}

impl Default for GainSchedule {
    fn default() -> Self {
        GainSchedule::Steps(vec![GainStep { start_s: 0.0, gain: 1.0 }])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpairmentConfig {
    #[serde(default)]
    pub gain_schedule: GainSchedule,
    #[serde(default)]
    pub phase_offset_rad: f64,
    #[serde(default)]
    pub freq_offset_hz: f64,
    /// Transmit chip-clock offset in Hz.
    #[serde(default)]
    pub sro_hz: f64,
    /// `None` means no noise.
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub rng_seed: u64,
}

impl Default for ImpairmentConfig {
    fn default() -> Self {
        Self {
            gain_schedule: GainSchedule::default(),
            phase_offset_rad: 0.0,
            freq_offset_hz: 0.0,
            sro_hz: 0.0,
            snr_db: None,
            rng_seed: 0,
        }
    }
}

impl ImpairmentConfig {
    /// Impairments with every block disabled.
    pub fn ideal() -> Self {
        Self::default()
    }

    /// Concrete gain steps for a signal of `duration` seconds.
    pub fn resolve_gain_schedule(&self, duration: f64) -> Vec<GainStep> {
        match &self.gain_schedule {
            GainSchedule::Steps(s) => s.clone(),
            GainSchedule::Random(r) => {
                let mut rng = substream(self.rng_seed, streams::GAIN_SCHEDULE);
                random_gain_schedule(duration, r.period_s, r.min_gain, r.max_gain, &mut rng)
            }
        }
    }
}

/// Gain, then carrier offset, then clock offset, then noise.
pub fn apply_impairments(
    signal: &PassbandStream,
    cfg: &ImpairmentConfig,
    rates: &SampleRateConfig,
) -> Result<PassbandStream> {
    let schedule = cfg.resolve_gain_schedule(signal.duration());
    let s = apply_gain_profile(signal, &schedule)?;
    let s = apply_cfo(&s, cfg.freq_offset_hz, cfg.phase_offset_rad);
    let s = apply_sro(&s, cfg.sro_hz, rates.chip_rate)?;
    match cfg.snr_db {
        Some(snr) => add_awgn(&s, snr, cfg.rng_seed),
        None => Ok(s),
    }
}
