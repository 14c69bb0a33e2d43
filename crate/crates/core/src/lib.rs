//! Energy-packet powerline transceiver.
//!
//! The crate covers both ends of a power/signal dual-modulated DC bus link:
//!
//! * [`tx`] turns energy-packet control messages into a bus-voltage waveform
//!   (DBPSK coding, Walsh-Hadamard spreading, sync word, pulse shaping,
//!   carrier modulation and ripple superposition).
//! * [`channel`] applies gain, carrier offset, clock offset and noise.
//! * [`rx`] is a self-synchronizing receiver: AGC, decision-directed carrier
//!   loop, Farrow/Gardner timing recovery, correlator frame sync,
//!   despreading and DBPSK demodulation.
//! * [`gridsim`] runs a DC grid with one broadcasting generator and several
//!   load converters that act on the messages they decode.
//! * [`experiments`] packages the isolated block tests and BER sweeps used
//!   by the command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::approx_constant)]

pub mod channel;
pub mod dsp;
mod error;
pub mod experiments;
pub mod export;
pub mod gridsim;
pub mod rng;
pub mod rx;
mod stream;
pub mod tx;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use stream::{BasebandStream, PassbandStream};

pub use dsp::{LoopGains, PulseShape, SampleRateConfig};
pub use gridsim::{run_scenario, GridScenario, ScenarioSummary, ScenarioTrace};
pub use rx::{receive, ReceiverConfig, Reception};
pub use tx::{ChipFrame, EnergyPacketMessage, PowerSignalConfig};

/// Crate version, embedded in every exported file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
