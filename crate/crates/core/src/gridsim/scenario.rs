use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ImpairmentConfig;
use crate::dsp::{spreading_code, SampleRateConfig};
use crate::error::{Error, Result};
use crate::rx::ReceiverConfig;
use crate::tx::{EnergyPacketMessage, PowerSignalConfig, FRAME_CHIPS};

fn default_v_dc() -> f64 {
    15.0
}

fn default_mod_index() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSpec {
    pub name: String,
    pub address: u8,
    /// Spreading code the load's receiver listens on.
    pub code: usize,
    #[serde(default)]
    pub idle_current_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TxEntry {
    /// Time the first chip goes on air.
    pub time_s: f64,
    pub message: EnergyPacketMessage,
    /// Spreading code; defaults to the code of the load with the message's
    /// address.
    #[serde(default)]
    pub code: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridScenario {
    #[serde(default = "default_v_dc")]
    pub v_dc: f64,
    #[serde(default = "default_mod_index")]
    pub mod_index: f64,
    #[serde(default)]
    pub rates: SampleRateConfig,
    pub loads: Vec<LoadSpec>,
    #[serde(default)]
    pub tx_schedule: Vec<TxEntry>,
    pub sim_duration_s: f64,
    #[serde(default)]
    pub impairments: ImpairmentConfig,
    /// Receiver settings shared by all loads; `rates` always come from the
    /// scenario.
    #[serde(default)]
    pub receiver: Option<ReceiverConfig>,
}

fn scenario_err(msg: impl Into<String>) -> Error {
    Error::Scenario(msg.into())
}

impl GridScenario {
    /// Parse and validate. Syntax and schema errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn power(&self) -> PowerSignalConfig {
        PowerSignalConfig { v_dc: self.v_dc, mod_index: self.mod_index }
    }

    pub fn receiver_config(&self) -> ReceiverConfig {
        ReceiverConfig { rates: self.rates, ..self.receiver.clone().unwrap_or_default() }
    }

    /// Spreading code of schedule entry `i`.
    pub fn entry_code(&self, entry: &TxEntry) -> Result<usize> {
        match entry.code {
            Some(c) => Ok(c),
            None => {
                self.loads.iter().find(|l| l.address == entry.message.dest_address).map(|l| l.code).ok_or_else(|| {
                    scenario_err(format!(
                        "tx_schedule entry at {} s: no load has address {} and no code is given",
                        entry.time_s, entry.message.dest_address
                    ))
                })
            }
        }
    }

    pub fn frame_duration_s(&self) -> f64 {
        FRAME_CHIPS as f64 / self.rates.chip_rate
    }

    pub fn validate(&self) -> Result<()> {
        self.rates.validate()?;
        self.power().validate()?;
        self.receiver_config().validate()?;
        if !(self.sim_duration_s > 0.0 && self.sim_duration_s.is_finite()) {
            return Err(scenario_err(format!("sim_duration_s must be positive, got {}", self.sim_duration_s)));
        }
        let mut addresses = HashSet::new();
        let mut names = HashSet::new();
        for (i, l) in self.loads.iter().enumerate() {
            if !addresses.insert(l.address) {
                return Err(scenario_err(format!("loads[{i}]: address {} is used twice", l.address)));
            }
            if !names.insert(l.name.as_str()) {
                return Err(scenario_err(format!("loads[{i}]: name '{}' is used twice", l.name)));
            }
            spreading_code(l.code).map_err(|e| scenario_err(format!("loads[{i}]: {e}")))?;
            if !(l.idle_current_a.is_finite() && l.idle_current_a >= 0.0) {
                return Err(scenario_err(format!("loads[{i}]: idle_current_a must be >= 0")));
            }
        }
        let frame_s = self.frame_duration_s();
        let mut spans = Vec::with_capacity(self.tx_schedule.len());
        for (i, e) in self.tx_schedule.iter().enumerate() {
            if !(e.time_s >= 0.0 && e.time_s + frame_s <= self.sim_duration_s) {
                return Err(scenario_err(format!(
                    "tx_schedule[{i}]: frame at {} s must start at or after 0 and end by {} s",
                    e.time_s, self.sim_duration_s
                )));
            }
            let code = self.entry_code(e)?;
            spreading_code(code).map_err(|err| scenario_err(format!("tx_schedule[{i}]: {err}")))?;
            if let Some(j) = spans.iter().position(|&(s, end)| e.time_s < end && s < e.time_s + frame_s) {
                return Err(scenario_err(format!("tx_schedule[{i}] overlaps tx_schedule[{j}] on the bus")));
            }
            spans.push((e.time_s, e.time_s + frame_s));
        }
        Ok(())
    }
}
