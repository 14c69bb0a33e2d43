//! Self-synchronizing receiver.
//!
//! Each block is a small state machine that can be driven on its own;
//! [`receive`] chains them in the order DC block, down-conversion, matched
//! filter, AGC, carrier loop, timing loop, frame sync, despreading and
//! DBPSK demodulation.

mod agc;
mod carrier;
mod demod;
mod farrow;
mod framesync;
mod frontend;
mod receiver;
mod stats;
mod timing;

pub use agc::AgcState;
pub use carrier::{ped, ped_s_curve, CarrierLoopState, PedOutput};
pub use demod::{dbpsk_demod, despread};
pub use farrow::{farrow_interpolate, FARROW_COEFFS};
pub use framesync::{
    FrameEvent, FrameSyncState, AMBIGUITY_RATIO, DEFAULT_THRESHOLD, POST_PAYLOAD_HOLDOFF, SEARCH_WINDOW,
};
pub use frontend::{dc_block, downconvert, matched_filter, matched_filter_decimate, DC_BLOCK_POLE};
pub use receiver::{
    receive, AgcConfig, ChipSample, FrameOutcome, FrameReport, LoopConfig, ProbeRow, ReceivedMessage, ReceiverConfig,
    Reception, RxEvent, RxEventKind,
};
pub use timing::{
    gardner_ted, timing_recovery, Strobe, TimingControl, TimingLoopState, ERROR_LIMIT, LOSS_OF_SIGNAL_CHIPS, N,
};
