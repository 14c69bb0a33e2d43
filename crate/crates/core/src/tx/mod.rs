//! Transmit chain: message -> bits -> DBPSK symbols -> chips -> frame ->
//! pulse-shaped carrier -> ripple on the DC bus.

mod coding;
mod frame;
mod message;
mod modulate;
mod power;
mod schedule;

pub use coding::{dbpsk_encode, spread};
pub use frame::{
    build_frame, frame_for_message, sync_codeword, sync_word, ChipFrame, FRAME_CHIPS, GUARD_LEN, PAYLOAD_CHIPS,
    PAYLOAD_SYMBOLS, SYNC_CODEWORD_LEN, SYNC_WORD_LEN,
};
pub use message::{crc8, decode_payload, encode_payload, EnergyPacketMessage, PAYLOAD_BITS};
pub use modulate::{modulate, modulate_chips_into};
pub use power::{inject_power_signal, PowerSignalConfig};
pub use schedule::{synthesize, ScheduledFrame};
