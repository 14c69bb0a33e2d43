use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dsp::{wrap_phase, LoopGains};

use super::stats::MovingStats;

/// Lock is declared while the moving mean of `|e|` over this many loop
/// samples (64 chips at two samples per chip) stays below [`LOCK_LEVEL`].
pub const LOCK_WINDOW: usize = 128;
pub const LOCK_LEVEL: f64 = 0.1;

/// Phase detector output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PedOutput {
    /// Angle to the nearest BPSK point (0 or pi), in (-pi/2, pi/2].
    pub error: f64,
    /// Set when the input was exactly zero.
    pub degenerate: bool,
}

/// Decision-directed BPSK phase error: `atan2(Im y, Re y) - atan2(0, sign(Re y))`.
pub fn ped(y: Complex64) -> PedOutput {
    if y.re == 0.0 && y.im == 0.0 {
        return PedOutput { error: 0.0, degenerate: true };
    }
    let decision = if y.re >= 0.0 { 0.0 } else { PI };
    PedOutput { error: wrap_phase(y.arg() - decision), degenerate: false }
}

/// Mean detector output against the true offset, over unit symbols `+1` and `-1`.
pub fn ped_s_curve(offsets: &[f64]) -> Vec<f64> {
    offsets
        .iter()
        .map(|&phi| {
            let a = ped(Complex64::from_polar(1.0, phi)).error;
            let b = ped(Complex64::from_polar(1.0, phi + PI)).error;
            0.5 * (a + b)
        })
        .collect()
}

/// Decision-directed carrier loop: rotator, PED, PI filter, accumulator.
#[derive(Debug, Clone)]
pub struct CarrierLoopState {
    pub gains: LoopGains,
    pub integrator: f64,
    /// Correction phase, wrapped to (-pi, pi].
    pub phase_acc: f64,
    pub last_error: f64,
    /// Samples with `|y|` below this feed no error into the loop.
    pub gate: f64,
    lock: MovingStats,
}

impl CarrierLoopState {
    pub fn new(gains: LoopGains) -> Self {
        Self { gains, integrator: 0.0, phase_acc: 0.0, last_error: 0.0, gate: 0.0, lock: MovingStats::new(LOCK_WINDOW) }
    }

    /// Ignore samples weaker than `gate`, such as chip transitions and guard chips.
    /// Near a zero crossing a carrier offset leaves a quadrature residue whose
    /// angle is large and biased by the sampling phase.
    pub fn with_gate(mut self, gate: f64) -> Self {
        self.gate = gate;
        self
    }

    pub fn step(&mut self, x: Complex64) -> Complex64 {
        let y = x * Complex64::from_polar(1.0, -self.phase_acc);
        let gated = y.norm() < self.gate;
        let e = if gated { 0.0 } else { ped(y).error };
        self.integrator += self.gains.ki * e;
        self.phase_acc = wrap_phase(self.phase_acc + self.gains.kp * e + self.integrator);
        self.last_error = e;
        if !gated {
            self.lock.push(e.abs());
        }
        y
    }

    pub fn locked(&self) -> bool {
        self.lock.full() && self.lock.mean() < LOCK_LEVEL
    }

    /// Per-sample frequency estimate held by the integrator, in rad/sample.
    pub fn frequency(&self) -> f64 {
        self.integrator
    }
}
