use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::stream::PassbandStream;

/// DC bus level and the size of the information ripple riding on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSignalConfig {
    pub v_dc: f64,
    /// Peak ripple as a fraction of `v_dc`.
    pub mod_index: f64,
}

impl Default for PowerSignalConfig {
    fn default() -> Self {
        Self { v_dc: 15.0, mod_index: 0.02 }
    }
}

impl PowerSignalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mod_index > 0.0 && self.mod_index <= 0.05) {
            return Err(invalid(format!("mod_index must be in (0, 0.05], got {}", self.mod_index)));
        }
        if !self.v_dc.is_finite() {
            return Err(invalid("v_dc must be finite"));
        }
        Ok(())
    }
}

/// Superimpose the information signal on the bus voltage:
/// `v = v_dc * (1 + mod_index * info / max|info|)`.
pub fn inject_power_signal(info: &PassbandStream, cfg: &PowerSignalConfig) -> Result<PassbandStream> {
    cfg.validate()?;
    let peak = info.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { cfg.mod_index * cfg.v_dc / peak } else { 0.0 };
    let samples = info.samples.iter().map(|v| cfg.v_dc + scale * v).collect();
    Ok(PassbandStream { samples, fs: info.fs, dc: cfg.v_dc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{make_pulse_shape, SampleRateConfig};
    use crate::tx::{frame_for_message, modulate, EnergyPacketMessage};

    #[test]
    fn zero_info_gives_flat_bus() {
        let s = PassbandStream::new(vec![0.0; 100], 64_000.0);
        let v = inject_power_signal(&s, &PowerSignalConfig::default()).unwrap();
        assert!(v.samples.iter().all(|&x| x == 15.0));
    }

    #[test]
    fn mean_and_peak_ripple() {
        let r = SampleRateConfig::default();
        let p = make_pulse_shape(0.5, 8, 8).unwrap();
        let f = frame_for_message(&EnergyPacketMessage::new(1, 2000, 35), 3).unwrap();
        let info = modulate(&f, &r, &p).unwrap();
        let cfg = PowerSignalConfig::default();
        let v = inject_power_signal(&info, &cfg).unwrap();
        let mean = v.samples.iter().sum::<f64>() / v.len() as f64;
        assert!((mean - 15.0).abs() < 0.1, "mean {mean}");
        let dev = v.samples.iter().fold(0.0f64, |m, x| m.max((x - 15.0).abs()));
        assert!((dev - cfg.mod_index * cfg.v_dc).abs() < 1e-12);
    }

    #[test]
    fn mod_index_bounds() {
        let s = PassbandStream::new(vec![1.0], 1.0);
        assert!(inject_power_signal(&s, &PowerSignalConfig { v_dc: 15.0, mod_index: 0.0 }).is_err());
        assert!(inject_power_signal(&s, &PowerSignalConfig { v_dc: 15.0, mod_index: 0.06 }).is_err());
    }
}
