use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Feedback AGC: `y = x*u`, then `x <- x*(1 - alpha*|u|) + alpha*R`.
///
/// With a constant input magnitude `c` the gain settles at `R/c` with time
/// constant `1/(alpha*c)` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgcState {
    /// Current gain.
    pub x: f64,
    /// Reference output magnitude.
    pub r: f64,
    pub alpha: f64,
    pub min_gain: f64,
    pub max_gain: f64,
}

impl AgcState {
    pub fn new(r: f64, alpha: f64) -> Self {
        Self { x: 1.0, r, alpha, min_gain: 1e-6, max_gain: 1e6 }
    }

    pub fn with_limits(mut self, min_gain: f64, max_gain: f64) -> Self {
        self.min_gain = min_gain;
        self.max_gain = max_gain;
        self.x = self.x.clamp(min_gain, max_gain);
        self
    }

    pub fn gain(&self) -> f64 {
        self.x
    }

    pub fn step(&mut self, u: Complex64) -> Complex64 {
        let y = u * self.x;
        self.x = (self.x * (1.0 - self.alpha * u.norm()) + self.alpha * self.r).clamp(self.min_gain, self.max_gain);
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settles_at_reference_over_amplitude() {
        let mut agc = AgcState::new(1.0, 0.01);
        for _ in 0..5000 {
            agc.step(Complex64::new(0.0, 2.0));
        }
        assert!((agc.gain() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn time_constant() {
        let c = 2.0;
        let mut agc = AgcState::new(1.0, 0.01);
        let target = 0.5;
        let gap0 = agc.gain() - target;
        for _ in 0..50 {
            agc.step(Complex64::new(c, 0.0));
        }
        let ratio = gap0 / (agc.gain() - target);
        assert!((ratio - std::f64::consts::E).abs() / std::f64::consts::E < 0.05, "ratio {ratio}");
    }

    #[test]
    fn keeps_phase_and_survives_silence() {
        let mut agc = AgcState::new(1.0, 0.05).with_limits(1e-6, 1e3);
        let u = Complex64::from_polar(0.3, 1.1);
        let y = agc.step(u);
        assert!((y.arg() - 1.1).abs() < 1e-12);
        for _ in 0..1_000_000 {
            agc.step(Complex64::new(0.0, 0.0));
        }
        assert_eq!(agc.gain(), 1e3);
        for _ in 0..10 {
            agc.step(Complex64::new(1e9, 0.0));
        }
        assert!(agc.gain() >= 1e-6);
    }
}
