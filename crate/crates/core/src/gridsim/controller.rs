use serde::Serialize;

use crate::tx::EnergyPacketMessage;

/// Slack on the end of a pulse so that `t0 + duration` lands outside it
/// despite rounding in the time grid.
const END_TOLERANCE_S: f64 = 1e-9;

/// One accepted command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Activation {
    pub start_s: f64,
    pub until_s: f64,
    pub current_a: f64,
    /// Set when this command cut short an earlier, still running one.
    pub overrode: bool,
}

/// Current drawn by one load: the commanded setpoint for the commanded time,
/// the idle current otherwise. A later command replaces a running one.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadController {
    pub idle_a: f64,
    setpoint_a: f64,
    until_s: f64,
}

impl LoadController {
    pub fn new(idle_a: f64) -> Self {
        Self { idle_a, setpoint_a: idle_a, until_s: f64::NEG_INFINITY }
    }

    fn active(&self, t: f64) -> bool {
        t < self.until_s - END_TOLERANCE_S
    }

    /// Start `msg` at `t`.
    pub fn command(&mut self, msg: &EnergyPacketMessage, t: f64) -> Activation {
        let overrode = self.active(t);
        if overrode {
            log::warn!("command at {t} s replaces a pulse running until {} s", self.until_s);
        }
        self.setpoint_a = msg.current_a();
        self.until_s = t + msg.duration_s();
        Activation { start_s: t, until_s: self.until_s, current_a: self.setpoint_a, overrode }
    }

    pub fn current(&self, t: f64) -> f64 {
        if self.active(t) {
            self.setpoint_a
        } else {
            self.idle_a
        }
    }
}
