//! Numeric primitives shared by transmitter and receiver.

mod fir;
mod hadamard;
mod loop_gains;
mod pulse;
mod rates;

pub use fir::{fir_filter, Filtered};
pub use hadamard::{hadamard, spreading_code, HadamardMatrix, SpreadingCode, SPREADING_FACTOR};
pub use loop_gains::{loop_gains, LoopGains, NATURAL_FREQ_PER_BN};
pub use pulse::{make_pulse_shape, PulseShape};
pub use rates::SampleRateConfig;

use std::f64::consts::PI;

/// Wrap an angle to (-pi, pi].
pub fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}
