//! Stimuli, block tests and sweeps behind the `blocktest` and `ber-sweep`
//! commands.

mod blocks;
mod link;
mod sweep;

pub use blocks::{
    agc_step_response, agc_test, carrier_test, framesync_test, random_chip_stream, timing_test, AgcReport,
    AgcStepReport, BlockConfig, CarrierReport, FrameSyncReport, TimingReport, CARRIER_SETTLE_S, PHASE_TOLERANCE,
    TIMING_SETTLE_CHIPS,
};
pub use link::{
    bit_xcorr, build_link, noise_only, random_message, score, Link, LinkConfig, LinkScore, SentFrame,
    MATCH_TOLERANCE_CHIPS,
};
pub use sweep::{ber_sweep, wilson_interval, SweepConfig, SweepRow};
