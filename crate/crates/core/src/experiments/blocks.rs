use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::channel::{apply_impairments, GainSchedule, GainStep, ImpairmentConfig, RandomGainSchedule};
use crate::dsp::{make_pulse_shape, wrap_phase, SampleRateConfig};
use crate::error::{invalid, Result};
use crate::rng::{streams, substream};
use crate::rx::{receive, AgcState, ChipSample, ProbeRow, ReceiverConfig};
use crate::stream::PassbandStream;
use crate::tx::{inject_power_signal, modulate_chips_into, PowerSignalConfig, FRAME_CHIPS};

use super::link::{build_link, score, LinkConfig, LinkScore, SentFrame};

/// Deadline for carrier acquisition and start of its steady-state window.
pub const CARRIER_SETTLE_S: f64 = 0.025;
/// Phase accuracy that counts as converged.
pub const PHASE_TOLERANCE: f64 = 0.02;
/// Chips skipped before the timing loop is judged.
pub const TIMING_SETTLE_CHIPS: usize = 1000;

/// Stimulus and channel settings shared by the block tests.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockConfig {
    pub phase_offset_rad: f64,
    pub freq_offset_hz: f64,
    pub sro_hz: f64,
    pub snr_db: Option<f64>,
    /// Code of the receiver under test.
    pub code: usize,
    /// Code of the transmitted frames; `None` alternates codes 3 and 5.
    pub stimulus_code: Option<usize>,
    /// Frame count for frame-based stimuli.
    pub frames: usize,
    /// Length of chip-stream stimuli.
    pub duration_s: f64,
    pub seed: u64,
    pub receiver: ReceiverConfig,
}

impl Default for BlockConfig {
    fn default() -> Self {
        Self {
            phase_offset_rad: 0.0,
            freq_offset_hz: 0.0,
            sro_hz: 0.0,
            snr_db: None,
            code: 3,
            stimulus_code: None,
            frames: 10,
            duration_s: 1.0,
            seed: 0,
            receiver: ReceiverConfig { record_probes: true, ..ReceiverConfig::default() },
        }
    }
}

impl BlockConfig {
    fn impairments(&self) -> ImpairmentConfig {
        ImpairmentConfig {
            phase_offset_rad: self.phase_offset_rad,
            freq_offset_hz: self.freq_offset_hz,
            sro_hz: self.sro_hz,
            snr_db: self.snr_db,
            rng_seed: self.seed,
            ..ImpairmentConfig::ideal()
        }
    }

    fn receiver(&self) -> ReceiverConfig {
        ReceiverConfig { record_probes: true, ..self.receiver.clone() }
    }
}

/// Continuous random +-1 chips on the bus, starting at t = 0.
pub fn random_chip_stream(
    duration_s: f64,
    rates: &SampleRateConfig,
    power: &PowerSignalConfig,
    seed: u64,
) -> Result<(Vec<f64>, PassbandStream)> {
    let n_chips = (duration_s * rates.chip_rate).floor() as usize;
    let mut rng = substream(seed, streams::STIMULUS);
    let chips: Vec<f64> = (0..n_chips).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let pulse = make_pulse_shape(0.5, 8, rates.sps_passband)?;
    let mut info = vec![0.0; n_chips * rates.sps_passband];
    modulate_chips_into(&chips, rates, &pulse, 0, &mut info)?;
    let bus = inject_power_signal(&PassbandStream::new(info, rates.fs_passband()), power)?;
    Ok((chips, bus))
}

/// Gain trajectory of the AGC alone for a constant input magnitude `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgcStepReport {
    pub c: f64,
    pub reference: f64,
    pub alpha: f64,
    /// `R / c`.
    pub target: f64,
    /// Samples until the distance to the target first shrank by `e`.
    pub time_constant_samples: Option<usize>,
    /// `1 / (alpha * c)`.
    pub nominal_time_constant: f64,
    /// Relative gain error after `5 / (alpha * c)` samples.
    pub error_after_5_tau: f64,
    #[serde(skip)]
    pub gains: Vec<f64>,
}

pub fn agc_step_response(c: f64, reference: f64, alpha: f64) -> AgcStepReport {
    let mut agc = AgcState::new(reference, alpha);
    let target = reference / c;
    let tau = 1.0 / (alpha * c);
    let n = (10.0 * tau).ceil() as usize;
    let mut gains = Vec::with_capacity(n + 1);
    gains.push(agc.gain());
    for _ in 0..n {
        agc.step(num_complex::Complex64::from_polar(c, 0.3));
        gains.push(agc.gain());
    }
    let gap0 = (gains[0] - target).abs();
    let time_constant_samples = gains.iter().position(|g| (g - target).abs() <= gap0 / std::f64::consts::E);
    let k5 = (5.0 * tau).ceil() as usize;
    AgcStepReport {
        c,
        reference,
        alpha,
        target,
        time_constant_samples,
        nominal_time_constant: tau,
        error_after_5_tau: (gains[k5] - target).abs() / target,
        gains,
    }
}

/// AGC inside the receiver, driven through a random gain schedule.
#[derive(Debug, Clone, Serialize)]
pub struct AgcReport {
    pub schedule: Vec<GainStep>,
    /// Mean AGC output magnitude over the second half of each gain segment.
    pub settled_levels: Vec<f64>,
    /// `(max - min) / mean` of `settled_levels`.
    pub level_spread: f64,
    #[serde(skip)]
    pub probes: Vec<ProbeRow>,
}

pub fn agc_test(cfg: &BlockConfig) -> Result<AgcReport> {
    let rx = cfg.receiver();
    let (_, bus) = random_chip_stream(cfg.duration_s, &rx.rates, &PowerSignalConfig::default(), cfg.seed)?;
    let mut imp = cfg.impairments();
    imp.gain_schedule = GainSchedule::Random(RandomGainSchedule { period_s: 0.175, min_gain: 0.5, max_gain: 1.25 });
    let schedule = imp.resolve_gain_schedule(bus.duration());
    imp.gain_schedule = GainSchedule::Steps(schedule.clone());
    let signal = apply_impairments(&bus, &imp, &rx.rates)?;
    let r = receive(&signal, cfg.code, &rx)?;
    let mut settled_levels = Vec::new();
    for (k, step) in schedule.iter().enumerate() {
        let end = schedule.get(k + 1).map_or(bus.duration(), |s| s.start_s);
        let mid = 0.5 * (step.start_s + end);
        let seg: Vec<f64> = r.probes.iter().filter(|p| p.time_s >= mid && p.time_s < end).map(|p| p.agc_out).collect();
        if !seg.is_empty() {
            settled_levels.push(seg.iter().sum::<f64>() / seg.len() as f64);
        }
    }
    let mean = settled_levels.iter().sum::<f64>() / settled_levels.len().max(1) as f64;
    let (lo, hi) = settled_levels.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    Ok(AgcReport { schedule, settled_levels, level_spread: (hi - lo) / mean, probes: r.probes })
}

/// Carrier loop against a phase and/or frequency offset.
#[derive(Debug, Clone, Serialize)]
pub struct CarrierReport {
    /// Last time the accumulator was more than [`PHASE_TOLERANCE`] (modulo pi)
    /// away from the true carrier phase; `None` if it never settled.
    pub settle_time_s: Option<f64>,
    pub final_phase_acc: f64,
    pub final_phase_error: f64,
    /// Signed mean detector output after [`CARRIER_SETTLE_S`].
    pub residual_ped_mean: f64,
    /// Largest angle of a despread symbol to the real axis after [`CARRIER_SETTLE_S`].
    pub max_symbol_angle: f64,
    pub score: LinkScore,
    #[serde(skip)]
    pub probes: Vec<ProbeRow>,
    /// True carrier phase at every probe row.
    #[serde(skip)]
    pub expected_phase: Vec<f64>,
}

/// Angle between two carrier phases, ignoring the BPSK pi ambiguity.
fn phase_distance(a: f64, b: f64) -> f64 {
    0.5 * wrap_phase(2.0 * (a - b))
}

pub fn carrier_test(cfg: &BlockConfig) -> Result<CarrierReport> {
    let rx = cfg.receiver();
    let rates = &rx.rates;
    let code = cfg.stimulus_code.unwrap_or(cfg.code);
    let link_cfg = LinkConfig {
        lead_s: 0.0,
        gap_s: 0.0,
        impairments: cfg.impairments(),
        seed: cfg.seed,
        ..LinkConfig::new(cfg.frames, code)
    };
    let link = build_link(&link_cfg)?;
    let r = receive(&link.signal, cfg.code, &rx)?;

    let fs = rates.fs_passband();
    let stretch = 1.0 + cfg.sro_hz / rates.chip_rate;
    let df = (rates.fc_carrier + cfg.freq_offset_hz) * stretch - rates.fc_carrier;
    let dec = rates.decimation() as f64;
    // judge the loop only while frames are on the bus
    let last = link.sent.last().ok_or_else(|| invalid("carrier test needs at least one frame"))?;
    let active_end = (last.start_s + FRAME_CHIPS as f64 * rates.chip_interval()) * stretch;
    let probes: Vec<ProbeRow> = r.probes.iter().filter(|p| p.time_s <= active_end).cloned().collect();
    let expected_phase: Vec<f64> =
        (0..probes.len()).map(|d| wrap_phase(cfg.phase_offset_rad + 2.0 * PI * df * dec * d as f64 / fs)).collect();
    let settle_time_s = match probes
        .iter()
        .zip(&expected_phase)
        .rposition(|(p, &e)| phase_distance(p.phase_acc, e).abs() > PHASE_TOLERANCE)
    {
        None => Some(0.0),
        Some(i) if i + 1 < probes.len() => Some(probes[i + 1].time_s),
        Some(_) => None,
    };
    let steady: Vec<f64> = probes.iter().filter(|p| p.time_s >= CARRIER_SETTLE_S).map(|p| p.phase_err).collect();
    let residual_ped_mean = steady.iter().sum::<f64>() / steady.len().max(1) as f64;

    let mut max_symbol_angle: f64 = 0.0;
    for f in &r.frames {
        for (k, s) in f.symbols.iter().enumerate() {
            let chip = f.sync_end_chip + 1 + 8 * k;
            if r.chips.get(chip).is_some_and(|c| c.time_s >= CARRIER_SETTLE_S) {
                max_symbol_angle = max_symbol_angle.max(crate::rx::ped(*s).error.abs());
            }
        }
    }
    let last = probes.last().ok_or_else(|| invalid("stimulus too short"))?;
    let final_phase_error = phase_distance(last.phase_acc, *expected_phase.last().unwrap_or(&0.0));
    Ok(CarrierReport {
        settle_time_s,
        final_phase_acc: last.phase_acc,
        final_phase_error,
        residual_ped_mean,
        max_symbol_angle,
        score: score(&link.sent, cfg.code, &r, cfg.sro_hz, rates),
        probes,
        expected_phase,
    })
}

/// Timing loop against a clock offset.
#[derive(Debug, Clone, Serialize)]
pub struct TimingReport {
    /// Mean magnitude of the two chip clusters after settling.
    pub amplitude: f64,
    /// Worst cluster standard deviation relative to `amplitude`.
    pub cluster_sigma: f64,
    /// Period of the fractional delay (in samples) ramp, in chips.
    pub mu_period_chips: Option<f64>,
    /// Period of the chip-clock phase ramp, in chips.
    pub chip_phase_period_chips: Option<f64>,
    /// `chip_rate / sro`.
    pub expected_period_chips: Option<f64>,
    #[serde(skip)]
    pub chips: Vec<ChipSample>,
}

/// Period of a sawtooth in [0, 1) from the slope of its unwrapped version.
fn ramp_period(x: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let mut unwrapped = Vec::with_capacity(x.len());
    let mut offset = 0.0;
    unwrapped.push(x[0]);
    for w in x.windows(2) {
        let d = w[1] - w[0];
        if d > 0.5 {
            offset -= 1.0;
        } else if d < -0.5 {
            offset += 1.0;
        }
        unwrapped.push(w[1] + offset);
    }
    let n = unwrapped.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = unwrapped.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in unwrapped.iter().enumerate() {
        sxy += (i as f64 - mx) * (y - my);
        sxx += (i as f64 - mx).powi(2);
    }
    let slope = sxy / sxx;
    (slope.abs() > 1e-12).then(|| 1.0 / slope.abs())
}

pub fn timing_test(cfg: &BlockConfig) -> Result<TimingReport> {
    let rx = cfg.receiver();
    let (_, bus) = random_chip_stream(cfg.duration_s, &rx.rates, &PowerSignalConfig::default(), cfg.seed)?;
    let signal = apply_impairments(&bus, &cfg.impairments(), &rx.rates)?;
    let r = receive(&signal, cfg.code, &rx)?;
    if r.chips.len() <= TIMING_SETTLE_CHIPS + 2 {
        return Err(invalid("stimulus too short for the timing test"));
    }
    // drop the settling period and the filter tail at the end
    let steady = &r.chips[TIMING_SETTLE_CHIPS..r.chips.len() - 16];
    let mut clusters = [Vec::new(), Vec::new()];
    for c in steady {
        clusters[usize::from(c.value.re < 0.0)].push(c.value);
    }
    let mut amplitude = 0.0;
    let mut sigma: f64 = 0.0;
    for cl in &clusters {
        if cl.is_empty() {
            continue;
        }
        let mean = cl.iter().sum::<num_complex::Complex64>() / cl.len() as f64;
        let var = cl.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / cl.len() as f64;
        amplitude += 0.5 * mean.norm();
        sigma = sigma.max(var.sqrt());
    }
    let mus: Vec<f64> = steady.iter().map(|c| c.mu).collect();
    let phases: Vec<f64> = steady.iter().map(|c| c.chip_phase).collect();
    Ok(TimingReport {
        amplitude,
        cluster_sigma: sigma / amplitude,
        mu_period_chips: ramp_period(&mus),
        chip_phase_period_chips: ramp_period(&phases),
        expected_period_chips: (cfg.sro_hz != 0.0).then(|| rx.rates.chip_rate / cfg.sro_hz.abs()),
        chips: r.chips,
    })
}

/// Frame sync against a stream of frames on one or two codes.
#[derive(Debug, Clone, Serialize)]
pub struct FrameSyncReport {
    pub code: usize,
    pub score: LinkScore,
    /// Detection times of every frame-sync event.
    pub detections: Vec<f64>,
    pub ambiguous: usize,
    #[serde(skip)]
    pub sent: Vec<SentFrame>,
    #[serde(skip)]
    pub probes: Vec<ProbeRow>,
}

pub fn framesync_test(cfg: &BlockConfig) -> Result<FrameSyncReport> {
    let rx = cfg.receiver();
    let codes = match cfg.stimulus_code {
        Some(c) => vec![c],
        None => vec![3, 5],
    };
    let link_cfg =
        LinkConfig { codes, impairments: cfg.impairments(), seed: cfg.seed, ..LinkConfig::new(cfg.frames, cfg.code) };
    let link = build_link(&link_cfg)?;
    let r = receive(&link.signal, cfg.code, &rx)?;
    Ok(FrameSyncReport {
        code: cfg.code,
        score: score(&link.sent, cfg.code, &r, cfg.sro_hz, &rx.rates),
        detections: r.frames.iter().map(|f| f.detection_time_s).collect(),
        ambiguous: r.frames.iter().filter(|f| f.ambiguous).count(),
        sent: link.sent,
        probes: r.probes,
    })
}
