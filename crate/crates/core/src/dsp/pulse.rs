use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{invalid, Result};

/// Unit-energy square-root raised-cosine pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseShape {
    pub taps: Vec<f64>,
    pub rolloff: f64,
    /// Length in chips.
    pub span: usize,
    /// Samples per chip the taps were designed for.
    pub sps: usize,
}

impl PulseShape {
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t * t).sum()
    }

    /// Delay of the center tap in samples.
    pub fn group_delay(&self) -> usize {
        (self.taps.len() - 1) / 2
    }
}

fn srrc(t: f64, beta: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    let edge = 1.0 / (4.0 * beta);
    if (t.abs() - edge).abs() < 1e-9 {
        let a = PI / (4.0 * beta);
        return beta * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
    let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
    num / den
}

/// Square-root raised-cosine taps spanning `span` chips at `sps` samples
/// per chip (`span * sps + 1` taps), scaled to unit energy.
pub fn make_pulse_shape(rolloff: f64, span: usize, sps: usize) -> Result<PulseShape> {
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(invalid(format!("rolloff must be in (0, 1], got {rolloff}")));
    }
    if span < 4 {
        return Err(invalid(format!("pulse span must be at least 4 chips, got {span}")));
    }
    if sps < 2 {
        return Err(invalid(format!("pulse needs at least 2 samples per chip, got {sps}")));
    }
    let half = (span * sps / 2) as i64;
    let mut taps: Vec<f64> = (-half..=half).map(|n| srrc(n as f64 / sps as f64, rolloff)).collect();
    let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|t| *t /= norm);
    Ok(PulseShape { taps, rolloff, span, sps })
}
