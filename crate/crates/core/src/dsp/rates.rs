use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Sample-rate plan of the link.
///
/// The front end runs at `sps_passband` samples per chip; after matched
/// filtering the receiver decimates to [`Self::SPS_TIMING`] samples per
/// chip, which the Gardner detector needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRateConfig {
    /// Chip rate in Hz (1/T_c).
    pub chip_rate: f64,
    /// Carrier frequency in Hz.
    pub fc_carrier: f64,
    /// Front-end samples per chip.
    pub sps_passband: usize,
}

impl Default for SampleRateConfig {
    fn default() -> Self {
        Self { chip_rate: 8_000.0, fc_carrier: 16_000.0, sps_passband: 8 }
    }
}

impl SampleRateConfig {
    pub const SPS_TIMING: usize = 2;

    pub fn new(chip_rate: f64, fc_carrier: f64, sps_passband: usize) -> Result<Self> {
        let cfg = Self { chip_rate, fc_carrier, sps_passband };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chip_rate > 0.0 && self.chip_rate.is_finite()) {
            return Err(invalid(format!("chip_rate must be positive, got {}", self.chip_rate)));
        }
        if self.sps_passband < Self::SPS_TIMING || self.sps_passband % Self::SPS_TIMING != 0 {
            return Err(invalid(format!(
                "sps_passband must be a positive multiple of {}, got {}",
                Self::SPS_TIMING,
                self.sps_passband
            )));
        }
        if !(self.fc_carrier > 0.0 && self.fc_carrier < self.fs_passband() / 2.0) {
            return Err(invalid(format!(
                "carrier {} Hz must lie in (0, fs/2 = {} Hz)",
                self.fc_carrier,
                self.fs_passband() / 2.0
            )));
        }
        Ok(())
    }

    pub fn fs_passband(&self) -> f64 {
        self.chip_rate * self.sps_passband as f64
    }

    /// Chip interval T_c in seconds.
    pub fn chip_interval(&self) -> f64 {
        1.0 / self.chip_rate
    }

    /// Sample rate entering the synchronization loops.
    pub fn fs_timing(&self) -> f64 {
        self.chip_rate * Self::SPS_TIMING as f64
    }

    /// Decimation factor between the front end and the loops.
    pub fn decimation(&self) -> usize {
        self.sps_passband / Self::SPS_TIMING
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let r = SampleRateConfig::default();
        r.validate().unwrap();
        assert_eq!(r.fs_passband(), 64_000.0);
        assert_eq!(r.chip_interval(), 125e-6);
        assert_eq!(r.decimation(), 4);
    }

    #[test]
    fn rejects_carrier_above_nyquist() {
        assert!(SampleRateConfig::new(8_000.0, 40_000.0, 8).is_err());
        assert!(SampleRateConfig::new(8_000.0, 16_000.0, 3).is_err());
    }
}
