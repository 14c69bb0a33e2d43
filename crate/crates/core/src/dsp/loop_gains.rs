use crate::error::{invalid, Result};

/// Ratio of natural frequency to noise bandwidth, omega_n = 1.89 * B_n.
pub const NATURAL_FREQ_PER_BN: f64 = 1.89;

/// Proportional-integral gains of a second-order loop.
///
/// The loop filter is `F(z) = kp + ki / (1 - z^-1)`; both gains already
/// include the `1 / (k0 * kd)` normalization, so a negative NCO gain gives
/// negative gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopGains {
    pub kp: f64,
    pub ki: f64,
    /// Noise bandwidth in Hz.
    pub bn: f64,
    pub zeta: f64,
    pub k0: f64,
    pub kd: f64,
    /// Loop update interval in seconds.
    pub tc: f64,
}

/// Design PI gains for noise bandwidth `bn`, damping `zeta`, NCO gain `k0`,
/// detector gain `kd` and update interval `tc`.
///
/// Both gains share the denominator `4 + 4*zeta*wn*tc + (wn*tc)^2`.
pub fn loop_gains(bn: f64, zeta: f64, k0: f64, kd: f64, tc: f64) -> Result<LoopGains> {
    if !(bn >= 0.0) {
        return Err(invalid(format!("noise bandwidth must be >= 0, got {bn}")));
    }
    if !(zeta > 0.0) {
        return Err(invalid(format!("damping must be > 0, got {zeta}")));
    }
    if !(tc > 0.0) {
        return Err(invalid(format!("update interval must be > 0, got {tc}")));
    }
    let k = k0 * kd;
    if k == 0.0 || !k.is_finite() {
        return Err(invalid(format!("k0 * kd must be finite and nonzero, got {k}")));
    }
    let theta = NATURAL_FREQ_PER_BN * bn * tc;
    let den = 4.0 + 4.0 * zeta * theta + theta * theta;
    Ok(LoopGains { kp: 8.0 * zeta * theta / den / k, ki: 4.0 * theta * theta / den / k, bn, zeta, k0, kd, tc })
}
