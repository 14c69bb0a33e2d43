use rayon::prelude::*;
use serde::Serialize;

use crate::channel::apply_impairments;
use crate::dsp::make_pulse_shape;
use crate::error::{invalid, Result};
use crate::experiments::MATCH_TOLERANCE_CHIPS;
use crate::export::Table;
use crate::rx::{receive, FrameReport, Reception};
use crate::tx::{
    encode_payload, frame_for_message, inject_power_signal, synthesize, EnergyPacketMessage, ScheduledFrame,
    SYNC_WORD_LEN,
};

use super::controller::{Activation, LoadController};
use super::scenario::GridScenario;

/// A CRC-clean message addressed to the load that received it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub load: String,
    pub detection_time_s: f64,
    pub valid_time_s: f64,
    pub message: EnergyPacketMessage,
    pub activation: Activation,
}

/// Any frame seen by a load's receiver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadFrame {
    pub load: String,
    #[serde(flatten)]
    pub report: FrameReport,
}

/// Sampled simulation output on the front-end time grid.
#[derive(Debug, Clone)]
pub struct ScenarioTrace {
    pub fs: f64,
    pub time_s: Vec<f64>,
    /// Generator output: `v_dc` plus the information ripple.
    pub bus_voltage: Vec<f64>,
    pub load_names: Vec<String>,
    /// `load_currents[k][n]` is load `k` at sample `n`.
    pub load_currents: Vec<Vec<f64>>,
    pub total_current: Vec<f64>,
    pub detections: Vec<Detection>,
    pub frames: Vec<LoadFrame>,
    /// Per-load receiver output, in load order.
    pub receptions: Vec<Reception>,
}

impl ScenarioTrace {
    pub fn load_index(&self, name: &str) -> Option<usize> {
        self.load_names.iter().position(|n| n == name)
    }

    /// `time_s, bus_voltage, i_<load>..., total_current`.
    pub fn table(&self) -> Table {
        let mut cols = vec!["time_s".to_string(), "bus_voltage".to_string()];
        cols.extend(self.load_names.iter().map(|n| format!("i_{n}")));
        cols.push("total_current".into());
        let mut t = Table::new(cols);
        for n in 0..self.time_s.len() {
            let mut row = vec![self.time_s[n], self.bus_voltage[n]];
            row.extend(self.load_currents.iter().map(|c| c[n]));
            row.push(self.total_current[n]);
            t.push(row);
        }
        t
    }
}

/// Energy drawn by load `load` over `[t0, t1)`: sum of `v * i / fs`.
pub fn packet_energy(trace: &ScenarioTrace, load: usize, t0: f64, t1: f64) -> Result<f64> {
    let currents = trace.load_currents.get(load).ok_or_else(|| invalid(format!("no load {load}")))?;
    let end = trace.time_s.len() as f64 / trace.fs;
    if !(t0 >= 0.0 && t0 <= t1 && t1 <= end + 1e-12) {
        return Err(invalid(format!("interval [{t0}, {t1}) outside the trace [0, {end})")));
    }
    let lo = (t0 * trace.fs - 1e-9).ceil().max(0.0) as usize;
    let hi = ((t1 * trace.fs - 1e-9).ceil() as usize).min(currents.len());
    Ok((lo..hi).map(|n| trace.bus_voltage[n] * currents[n]).sum::<f64>() / trace.fs)
}

pub fn run_scenario(s: &GridScenario) -> Result<ScenarioTrace> {
    s.validate()?;
    let rates = &s.rates;
    let fs = rates.fs_passband();
    let pulse = make_pulse_shape(0.5, 8, rates.sps_passband)?;
    let frames = s
        .tx_schedule
        .iter()
        .map(|e| Ok(ScheduledFrame { start_s: e.time_s, frame: frame_for_message(&e.message, s.entry_code(e)?)? }))
        .collect::<Result<Vec<_>>>()?;
    let info = synthesize(&frames, s.sim_duration_s, rates, &pulse)?;
    let bus = inject_power_signal(&info, &s.power())?;
    let received = apply_impairments(&bus, &s.impairments, rates)?;

    let rx = s.receiver_config();
    let receptions = s.loads.par_iter().map(|l| receive(&received, l.code, &rx)).collect::<Result<Vec<Reception>>>()?;

    let n = bus.len();
    let time_s: Vec<f64> = (0..n).map(|k| k as f64 / fs).collect();
    let mut load_currents = Vec::with_capacity(s.loads.len());
    let mut detections = Vec::new();
    let mut frames_seen = Vec::new();
    for (load, reception) in s.loads.iter().zip(&receptions) {
        frames_seen.extend(reception.frames.iter().map(|f| LoadFrame { load: load.name.clone(), report: f.clone() }));
        // act on the first sample at or after the message is complete
        let mut commands: Vec<(usize, f64, &crate::rx::ReceivedMessage)> = reception
            .messages
            .iter()
            .filter(|m| m.message.dest_address == load.address && m.message.is_dispatch())
            .map(|m| {
                let k = (m.valid_time_s * fs - 1e-9).ceil().max(0.0) as usize;
                (k, k as f64 / fs, m)
            })
            .collect();
        commands.sort_by_key(|c| c.0);
        let mut ctrl = LoadController::new(load.idle_current_a);
        let mut next = 0;
        let mut current = Vec::with_capacity(n);
        for (k, &t) in time_s.iter().enumerate() {
            while next < commands.len() && commands[next].0 <= k {
                let (_, start, m) = commands[next];
                let activation = ctrl.command(&m.message, start);
                detections.push(Detection {
                    load: load.name.clone(),
                    detection_time_s: m.detection_time_s,
                    valid_time_s: m.valid_time_s,
                    message: m.message,
                    activation,
                });
                next += 1;
            }
            current.push(ctrl.current(t));
        }
        load_currents.push(current);
    }
    let total_current = (0..n).map(|k| load_currents.iter().map(|c| c[k]).sum()).collect();
    detections.sort_by(|a, b| a.activation.start_s.total_cmp(&b.activation.start_s));
    Ok(ScenarioTrace {
        fs,
        time_s,
        bus_voltage: bus.samples,
        load_names: s.loads.iter().map(|l| l.name.clone()).collect(),
        load_currents,
        total_current,
        detections,
        frames: frames_seen,
        receptions,
    })
}

/// How one receiver listening on a frame's code handled it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverCheck {
    pub load: String,
    pub detected: bool,
    pub decoded: bool,
    pub detection_time_s: Option<f64>,
    pub bit_errors: Option<usize>,
}

/// One scheduled frame and every receiver on its code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameCheck {
    pub time_s: f64,
    pub code: usize,
    pub message: EnergyPacketMessage,
    /// End of the sync word on the receivers' clock.
    pub expected_detection_s: f64,
    pub receivers: Vec<ReceiverCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseEnergy {
    pub start_s: f64,
    pub until_s: f64,
    pub current_a: f64,
    pub energy_j: f64,
    /// `v_dc * current * duration`.
    pub nominal_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadEnergy {
    pub load: String,
    pub total_j: f64,
    pub pulses: Vec<PulseEnergy>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub sim_duration_s: f64,
    pub frames: Vec<FrameCheck>,
    pub detections: Vec<Detection>,
    pub energy: Vec<LoadEnergy>,
    pub bits: usize,
    pub bit_errors: usize,
    /// NaN when no scheduled frame reached a receiver.
    pub ber: f64,
    /// Every scheduled frame was decoded by every receiver on its code.
    pub all_decoded: bool,
}

impl ScenarioSummary {
    pub fn new(s: &GridScenario, trace: &ScenarioTrace) -> Result<Self> {
        let tc = s.rates.chip_interval();
        let stretch = 1.0 + s.impairments.sro_hz / s.rates.chip_rate;
        let mut frames = Vec::with_capacity(s.tx_schedule.len());
        let (mut bits, mut bit_errors) = (0, 0);
        for e in &s.tx_schedule {
            let code = s.entry_code(e)?;
            let expected = (e.time_s + SYNC_WORD_LEN as f64 * tc) / stretch;
            let sent = encode_payload(&e.message);
            let mut receivers = Vec::new();
            for (load, reception) in s.loads.iter().zip(&trace.receptions).filter(|(l, _)| l.code == code) {
                let hit = reception
                    .frames
                    .iter()
                    .filter(|f| (f.detection_time_s - expected).abs() <= MATCH_TOLERANCE_CHIPS * tc)
                    .min_by(|a, b| {
                        (a.detection_time_s - expected).abs().total_cmp(&(b.detection_time_s - expected).abs())
                    });
                let errors = hit
                    .filter(|f| f.bits.len() == sent.len())
                    .map(|f| f.bits.iter().zip(&sent).filter(|(a, b)| a != b).count());
                if let Some(k) = errors {
                    bits += sent.len();
                    bit_errors += k;
                }
                receivers.push(ReceiverCheck {
                    load: load.name.clone(),
                    detected: hit.is_some(),
                    decoded: hit.is_some_and(|f| f.message == Some(e.message)),
                    detection_time_s: hit.map(|f| f.detection_time_s),
                    bit_errors: errors,
                });
            }
            frames.push(FrameCheck {
                time_s: e.time_s,
                code,
                message: e.message,
                expected_detection_s: expected,
                receivers,
            });
        }
        let end = trace.time_s.len() as f64 / trace.fs;
        let mut energy = Vec::with_capacity(s.loads.len());
        for (k, load) in s.loads.iter().enumerate() {
            let pulses = trace
                .detections
                .iter()
                .filter(|d| d.load == load.name)
                .map(|d| {
                    let a = d.activation;
                    let until = a.until_s.min(end);
                    Ok(PulseEnergy {
                        start_s: a.start_s,
                        until_s: a.until_s,
                        current_a: a.current_a,
                        energy_j: packet_energy(trace, k, a.start_s, until)?,
                        nominal_j: s.v_dc * a.current_a * (until - a.start_s),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            energy.push(LoadEnergy { load: load.name.clone(), total_j: packet_energy(trace, k, 0.0, end)?, pulses });
        }
        Ok(Self {
            sim_duration_s: s.sim_duration_s,
            all_decoded: frames.iter().all(|f| f.receivers.iter().all(|r| r.decoded)),
            frames,
            detections: trace.detections.clone(),
            energy,
            bits,
            bit_errors,
            ber: if bits == 0 { f64::NAN } else { bit_errors as f64 / bits as f64 },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridsim::LoadSpec;

    fn scenario(schedule: &str) -> GridScenario {
        GridScenario::from_json(&format!(
            r#"{{
                "loads": [
                    {{"name": "L1", "address": 1, "code": 3}},
                    {{"name": "L3", "address": 3, "code": 6, "idle_current_a": 4.0}}
                ],
                "tx_schedule": {schedule},
                "sim_duration_s": 0.12
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn empty_schedule_keeps_idle_currents() {
        let s = scenario("[]");
        let t = run_scenario(&s).unwrap();
        assert!(t.load_currents[0].iter().all(|&i| i == 0.0));
        assert!(t.load_currents[1].iter().all(|&i| i == 4.0));
        assert!(t.detections.is_empty());
        assert!(t.total_current.iter().all(|&i| i == 4.0));
    }

    #[test]
    fn pulse_follows_detection() {
        let s =
            scenario(r#"[{"time_s": 0.01, "message": {"dest_address": 1, "current_ma": 2000, "duration_ms": 35}}]"#);
        let t = run_scenario(&s).unwrap();
        assert_eq!(t.detections.len(), 1);
        let d = &t.detections[0];
        assert!(d.activation.start_s >= d.valid_time_s);
        let on = t.load_currents[0].iter().filter(|&&i| i == 2.0).count();
        assert_eq!(on, (0.035 * t.fs).round() as usize);
        let first = t.load_currents[0].iter().position(|&i| i == 2.0).unwrap();
        assert!(t.time_s[first] >= d.valid_time_s);
        let sum = ScenarioSummary::new(&s, &t).unwrap();
        assert!(sum.all_decoded);
        assert_eq!(sum.bit_errors, 0);
        let p = &sum.energy[0].pulses[0];
        assert!((p.energy_j - p.nominal_j).abs() / p.nominal_j < 1e-2);
    }

    #[test]
    fn constant_draw_energy() {
        let s = GridScenario {
            loads: vec![LoadSpec { name: "L".into(), address: 1, code: 3, idle_current_a: 4.0 }],
            tx_schedule: vec![],
            sim_duration_s: 1.0,
            ..scenario("[]")
        };
        let t = run_scenario(&s).unwrap();
        let e = packet_energy(&t, 0, 0.0, 1.0).unwrap();
        assert!((e - 60.0).abs() / 60.0 < 1e-3, "{e}");
        assert_eq!(packet_energy(&t, 0, 0.5, 0.5).unwrap(), 0.0);
        assert!(packet_energy(&t, 0, 0.5, 2.0).is_err());
    }
}
