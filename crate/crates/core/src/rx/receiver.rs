use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::{loop_gains, make_pulse_shape, spreading_code, LoopGains, SampleRateConfig};
use crate::error::{invalid, Error, Result};
use crate::stream::PassbandStream;
use crate::tx::{decode_payload, EnergyPacketMessage, PAYLOAD_CHIPS};

use super::agc::AgcState;
use super::carrier::CarrierLoopState;
use super::demod::{dbpsk_demod, despread};
use super::framesync::{FrameEvent, FrameSyncState, DEFAULT_THRESHOLD};
use super::frontend::{dc_block, downconvert, matched_filter};
use super::timing::{TimingLoopState, N};

/// Second-order loop design parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopConfig {
    pub bn: f64,
    pub zeta: f64,
    pub k0: f64,
    pub kd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgcConfig {
    pub reference: f64,
    pub alpha: f64,
    pub min_gain: f64,
    pub max_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReceiverConfig {
    pub rates: SampleRateConfig,
    pub rolloff: f64,
    pub span: usize,
    pub agc: AgcConfig,
    pub carrier: LoopConfig,
    /// Carrier-loop samples weaker than this fraction of the AGC reference
    /// feed no phase error.
    pub ped_gate: f64,
    pub timing: LoopConfig,
    /// Frame-sync level on the normalized correlation.
    pub sync_threshold: f64,
    /// Keep one probe row per loop-rate sample.
    pub record_probes: bool,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self {
            rates: SampleRateConfig::default(),
            rolloff: 0.5,
            span: 8,
            agc: AgcConfig { reference: 1.0, alpha: 0.0025, min_gain: 1e-6, max_gain: 1e6 },
            carrier: LoopConfig { bn: 200.0, zeta: 0.7071, k0: 1.0, kd: 1.0 },
            ped_gate: 0.25,
            timing: LoopConfig { bn: 100.0, zeta: 0.7071, k0: -1.0, kd: 2.55 },
            sync_threshold: DEFAULT_THRESHOLD,
            record_probes: false,
        }
    }
}

impl ReceiverConfig {
    pub fn validate(&self) -> Result<()> {
        self.rates.validate()?;
        if !(self.sync_threshold > 0.0 && self.sync_threshold <= 1.0) {
            return Err(invalid(format!("sync threshold must be in (0, 1], got {}", self.sync_threshold)));
        }
        let a = &self.agc;
        if !(a.reference > 0.0 && a.alpha > 0.0 && a.min_gain > 0.0 && a.min_gain < a.max_gain) {
            return Err(invalid("AGC needs reference > 0, alpha > 0 and 0 < min_gain < max_gain"));
        }
        if !(0.0..1.0).contains(&self.ped_gate) {
            return Err(invalid(format!("PED gate must be in [0, 1), got {}", self.ped_gate)));
        }
        self.carrier_gains()?;
        self.timing_gains()?;
        Ok(())
    }

    /// The carrier loop runs on every loop-rate sample, so it is designed
    /// for an update interval of `Tc / N`.
    pub fn carrier_gains(&self) -> Result<LoopGains> {
        let c = &self.carrier;
        loop_gains(c.bn, c.zeta, c.k0, c.kd, self.rates.chip_interval() / N as f64)
    }

    /// The timing loop updates once per chip.
    pub fn timing_gains(&self) -> Result<LoopGains> {
        let t = &self.timing;
        loop_gains(t.bn, t.zeta, t.k0, t.kd, self.rates.chip_interval())
    }
}

/// A CRC-clean message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReceivedMessage {
    pub message: EnergyPacketMessage,
    /// End of the sync word on the transmitter's time axis.
    pub detection_time_s: f64,
    /// When the receiver had the last payload sample ("valid data").
    pub valid_time_s: f64,
    pub metric: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FrameOutcome {
    Decoded,
    ChecksumMismatch {
        computed: u8,
        received: u8,
    },
    /// The stream ended before the payload was complete.
    Truncated,
}

/// Every frame-sync event, decoded or not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameReport {
    pub detection_time_s: f64,
    pub valid_time_s: Option<f64>,
    pub sync_end_chip: usize,
    pub metric: f64,
    pub ambiguous: bool,
    pub outcome: FrameOutcome,
    pub message: Option<EnergyPacketMessage>,
    #[serde(skip)]
    pub bits: Vec<bool>,
    #[serde(skip)]
    pub symbols: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RxEventKind {
    LossOfSignal,
    AmbiguousSync,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RxEvent {
    pub time_s: f64,
    pub kind: RxEventKind,
}

/// One recovered chip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChipSample {
    pub time_s: f64,
    pub value: Complex64,
    pub mu: f64,
    pub chip_phase: f64,
    pub ted_error: f64,
}

/// Loop internals at one loop-rate sample; chip-rate values are held
/// between strobes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub time_s: f64,
    pub agc_gain: f64,
    /// Magnitude at the AGC output.
    pub agc_out: f64,
    pub phase_err: f64,
    pub phase_acc: f64,
    pub ted_err: f64,
    pub mu: f64,
    pub chip_phase: f64,
    pub corr_metric: f64,
    pub carrier_lock: bool,
    pub timing_lock: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Reception {
    pub messages: Vec<ReceivedMessage>,
    pub frames: Vec<FrameReport>,
    pub chips: Vec<ChipSample>,
    pub events: Vec<RxEvent>,
    pub probes: Vec<ProbeRow>,
}

struct Timebase {
    fs: f64,
    decimation: f64,
    delay: f64,
    tc: f64,
}

impl Timebase {
    /// Transmit-side time of loop-rate position `p`.
    fn at(&self, p: f64) -> f64 {
        (self.decimation * p - self.delay) / self.fs
    }

    /// Time the receiver holds loop-rate sample `d`.
    fn available(&self, d: usize) -> f64 {
        (self.delay + self.decimation * d as f64) / self.fs
    }
}

fn decode_frame(
    ev: &FrameEvent,
    chips: &[ChipSample],
    timing_bases: &[usize],
    code_index: usize,
    tb: &Timebase,
) -> Result<FrameReport> {
    let code = spreading_code(code_index)?;
    let detection = chips[ev.sync_end].time_s + tb.tc;
    let end = ev.payload_start + PAYLOAD_CHIPS;
    if end > chips.len() {
        return Ok(FrameReport {
            detection_time_s: detection,
            valid_time_s: None,
            sync_end_chip: ev.sync_end,
            metric: ev.metric,
            ambiguous: ev.ambiguous,
            outcome: FrameOutcome::Truncated,
            message: None,
            bits: Vec::new(),
            symbols: Vec::new(),
        });
    }
    let values: Vec<Complex64> = chips[ev.payload_start..end].iter().map(|c| c.value).collect();
    let symbols = despread(&values, &code, 0)?;
    let bits = dbpsk_demod(&symbols);
    let (outcome, message) = match decode_payload(&bits) {
        Ok(m) => (FrameOutcome::Decoded, Some(m)),
        Err(Error::ChecksumMismatch { computed, received }) => {
            (FrameOutcome::ChecksumMismatch { computed, received }, None)
        }
        Err(e) => return Err(e),
    };
    Ok(FrameReport {
        detection_time_s: detection,
        valid_time_s: Some(tb.available(timing_bases[end - 1] + 2)),
        sync_end_chip: ev.sync_end,
        metric: ev.metric,
        ambiguous: ev.ambiguous,
        outcome,
        message,
        bits,
        symbols,
    })
}

/// Run the full receiver over a bus-voltage stream for the load that owns
/// spreading code `load_code`.
///
/// Order: DC block, down-conversion, matched filter and decimation to two
/// samples per chip, AGC, carrier loop, timing loop, frame sync,
/// despreading and DBPSK demodulation. Frames failing the CRC show up in
/// `frames` only.
pub fn receive(signal: &PassbandStream, load_code: usize, config: &ReceiverConfig) -> Result<Reception> {
    config.validate()?;
    let rates = &config.rates;
    if (signal.fs - rates.fs_passband()).abs() > 1e-9 * rates.fs_passband() {
        return Err(invalid(format!("stream sampled at {} Hz, receiver expects {}", signal.fs, rates.fs_passband())));
    }
    let decimation = rates.decimation();
    let pulse = make_pulse_shape(config.rolloff, config.span, rates.sps_passband)?;
    let tb = Timebase {
        fs: signal.fs,
        decimation: decimation as f64,
        delay: pulse.group_delay() as f64,
        tc: rates.chip_interval(),
    };

    let blocked = PassbandStream::new(dc_block(&signal.samples), signal.fs);
    let filtered = matched_filter(&downconvert(&blocked, rates), &pulse)?;

    let a = &config.agc;
    let mut agc = AgcState::new(a.reference, a.alpha).with_limits(a.min_gain, a.max_gain);
    let mut carrier = CarrierLoopState::new(config.carrier_gains()?).with_gate(config.ped_gate * config.agc.reference);
    let mut timing = TimingLoopState::new(config.timing_gains()?);
    let mut sync = FrameSyncState::new(load_code, config.sync_threshold)?;

    let mut out = Reception::default();
    let mut bases = Vec::new();
    let mut pending: Vec<FrameEvent> = Vec::new();
    let (mut ted_err, mut mu, mut chip_phase) = (0.0, 0.0, 0.0);

    // the AGC runs at the matched-filter rate, so its mean input level does
    // not depend on where the loop-rate samples fall within a chip
    for (n, &u) in filtered.samples.iter().enumerate() {
        let leveled = agc.step(u);
        if n % decimation != 0 {
            continue;
        }
        let d = n / decimation;
        let y = carrier.step(leveled);
        if let Some(st) = timing.push(y) {
            let time_s = tb.at(st.position());
            (ted_err, mu, chip_phase) = (st.ted_error, st.mu, st.chip_phase());
            out.chips.push(ChipSample { time_s, value: st.value, mu, chip_phase, ted_error: ted_err });
            bases.push(st.base);
            if st.loss_of_signal {
                out.events.push(RxEvent { time_s, kind: RxEventKind::LossOfSignal });
            }
            if let Some(ev) = sync.step(st.value) {
                if ev.ambiguous {
                    out.events.push(RxEvent { time_s, kind: RxEventKind::AmbiguousSync });
                }
                pending.push(ev);
            }
            while pending.first().is_some_and(|ev| ev.payload_start + PAYLOAD_CHIPS <= out.chips.len()) {
                let ev = pending.remove(0);
                out.frames.push(decode_frame(&ev, &out.chips, &bases, load_code, &tb)?);
            }
        }
        if config.record_probes {
            out.probes.push(ProbeRow {
                time_s: tb.at(d as f64),
                agc_gain: agc.gain(),
                agc_out: leveled.norm(),
                phase_err: carrier.last_error,
                phase_acc: carrier.phase_acc,
                ted_err,
                mu,
                chip_phase,
                corr_metric: sync.metric(),
                carrier_lock: carrier.locked(),
                timing_lock: timing.locked(),
            });
        }
    }
    for ev in pending {
        out.frames.push(decode_frame(&ev, &out.chips, &bases, load_code, &tb)?);
    }
    out.messages = out
        .frames
        .iter()
        .filter_map(|f| {
            Some(ReceivedMessage {
                message: f.message?,
                detection_time_s: f.detection_time_s,
                valid_time_s: f.valid_time_s?,
                metric: f.metric,
            })
        })
        .collect();
    Ok(out)
}
