use num_complex::Complex64;

use crate::dsp::LoopGains;

use super::farrow::farrow_interpolate;
use super::stats::MovingStats;

/// Loop-rate samples per chip.
pub const N: usize = 2;
/// Consecutive all-zero chips that count as loss of signal.
pub const LOSS_OF_SIGNAL_CHIPS: usize = 100;
/// Chips in the TED-error variance window used for the lock flag.
pub const LOCK_WINDOW: usize = 64;
/// Lock when the windowed TED variance falls below this share of its
/// value at acquisition.
pub const LOCK_RATIO: f64 = 0.1;
/// Detector output is limited to this magnitude before the loop filter.
/// Right after a silent stretch the AGC gain is still high and the raw
/// error (quadratic in amplitude) can be tens of times its in-lock size.
pub const ERROR_LIMIT: f64 = 1.0;

/// Gardner detector `Re{ conj(y_half) * (y_prev - y_curr) }`.
///
/// Positive when the strobes run early on a transition.
pub fn gardner_ted(y_prev: Complex64, y_half: Complex64, y_curr: Complex64) -> f64 {
    (y_half.conj() * (y_prev - y_curr)).re
}

/// Decrementing modulo-1 counter that marks chip boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingControl {
    /// `delta`, always in [0, 1).
    pub counter: f64,
    /// Fractional delay at the last strobe.
    pub mu: f64,
}

impl Default for TimingControl {
    fn default() -> Self {
        Self { counter: 0.0, mu: 0.0 }
    }
}

impl TimingControl {
    /// Advance one sample with step `1/N + nu`; returns the strobe flag and
    /// the (possibly held) fractional delay.
    pub fn step(&mut self, nu: f64) -> (bool, f64) {
        let m = 1.0 / N as f64 + nu;
        let before = self.counter;
        let next = before - m;
        let strobe = next < 0.0;
        self.counter = next.rem_euclid(1.0);
        if self.counter >= 1.0 {
            self.counter = 0.0;
        }
        if strobe {
            self.mu = (N as f64 * before).clamp(0.0, 1.0 - f64::EPSILON);
        }
        (strobe, self.mu)
    }
}

/// One recovered chip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strobe {
    pub value: Complex64,
    /// Interpolation base sample `m`; the chip sits at `m + mu`.
    pub base: usize,
    pub mu: f64,
    pub ted_error: f64,
    /// Set on the chip that completes a run of [`LOSS_OF_SIGNAL_CHIPS`] zeros.
    pub loss_of_signal: bool,
}

impl Strobe {
    /// Position of the chip in loop-rate samples.
    pub fn position(&self) -> f64 {
        self.base as f64 + self.mu
    }

    /// Chip-clock phase in [0, 1).
    pub fn chip_phase(&self) -> f64 {
        (self.position() / N as f64).rem_euclid(1.0)
    }
}

/// Farrow interpolator, Gardner detector, PI filter and modulo-1 control.
#[derive(Debug, Clone)]
pub struct TimingLoopState {
    pub gains: LoopGains,
    pub integrator: f64,
    /// Loop-filter output added to the counter step.
    pub nu: f64,
    pub control: TimingControl,
    pub last_error: f64,
    history: [Complex64; 5],
    pushed: usize,
    prev_chip: Option<Complex64>,
    zero_run: usize,
    errors: MovingStats,
    acquisition_var: Option<f64>,
}

impl TimingLoopState {
    pub fn new(gains: LoopGains) -> Self {
        Self {
            gains,
            integrator: 0.0,
            nu: 0.0,
            control: TimingControl::default(),
            last_error: 0.0,
            history: [Complex64::default(); 5],
            pushed: 0,
            prev_chip: None,
            zero_run: 0,
            errors: MovingStats::new(LOCK_WINDOW),
            acquisition_var: None,
        }
    }

    /// Feed one loop-rate sample. The control runs two samples behind the
    /// input so the interpolator always has `x(m+2)`.
    pub fn push(&mut self, x: Complex64) -> Option<Strobe> {
        self.history.rotate_left(1);
        self.history[4] = x;
        self.pushed += 1;
        if self.pushed < 5 {
            return None;
        }
        let m = self.pushed - 3;
        let (strobe, mu) = self.control.step(self.nu);
        if !strobe {
            return None;
        }
        let h = &self.history;
        let chip = farrow_interpolate([h[1], h[2], h[3], h[4]], mu);
        let half = farrow_interpolate([h[0], h[1], h[2], h[3]], mu);

        let mut e = 0.0;
        if let Some(prev) = self.prev_chip {
            e = gardner_ted(prev, half, chip).clamp(-ERROR_LIMIT, ERROR_LIMIT);
            self.integrator += self.gains.ki * e;
            self.nu = self.gains.kp * e + self.integrator;
        }
        self.prev_chip = Some(chip);
        self.last_error = e;

        let mut loss = false;
        if chip.norm_sqr() == 0.0 {
            self.zero_run += 1;
            if self.zero_run == LOSS_OF_SIGNAL_CHIPS {
                loss = true;
                self.errors.clear();
                self.acquisition_var = None;
            }
        } else {
            self.zero_run = 0;
            self.errors.push(e);
            if self.acquisition_var.is_none() && self.errors.full() {
                self.acquisition_var = Some(self.errors.variance());
            }
        }
        Some(Strobe { value: chip, base: m, mu, ted_error: e, loss_of_signal: loss })
    }

    pub fn locked(&self) -> bool {
        match self.acquisition_var {
            Some(acq) => self.errors.full() && self.errors.variance() < LOCK_RATIO * acq,
            None => false,
        }
    }
}

/// Run the timing loop over a whole two-samples-per-chip stream.
pub fn timing_recovery(samples: &[Complex64], gains: LoopGains) -> Vec<Strobe> {
    let mut state = TimingLoopState::new(gains);
    samples.iter().filter_map(|&x| state.push(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ted_examples() {
        assert_eq!(gardner_ted(c(1.0), c(0.0), c(-1.0)), 0.0);
        assert_eq!(gardner_ted(c(1.0), c(0.37), c(1.0)), 0.0);
        assert!(gardner_ted(c(1.0), c(0.2), c(-1.0)) > 0.0);
    }

    #[test]
    fn strobes_every_n_samples_without_input() {
        let mut t = TimingControl::default();
        let strobes = (0..1_000_000).filter(|_| t.step(0.0).0).count();
        assert_eq!(strobes, 1_000_000 / N);
    }

    #[test]
    fn positive_nu_strobes_faster() {
        let mut t = TimingControl::default();
        let nu = 0.01;
        let steps = 10_000;
        let strobes = (0..steps).filter(|_| t.step(nu).0).count();
        let interval = steps as f64 / strobes as f64;
        assert!(interval < N as f64);
        assert!((interval - 1.0 / (0.5 + nu)).abs() < 0.01);
    }

    #[test]
    fn counter_stays_in_unit_interval() {
        let mut t = TimingControl::default();
        for k in 0..100_000 {
            let nu = 0.2 * ((k as f64) * 0.013).sin();
            let (_, mu) = t.step(nu);
            assert!((0.0..1.0).contains(&t.counter));
            assert!((0.0..1.0).contains(&mu));
        }
    }
}
