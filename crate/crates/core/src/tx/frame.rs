use crate::dsp::{spreading_code, SPREADING_FACTOR};
use crate::error::{invalid, Result};

use super::coding::{dbpsk_encode, spread};
use super::message::{encode_payload, EnergyPacketMessage, PAYLOAD_BITS};

pub const SYNC_CODEWORD_LEN: usize = SPREADING_FACTOR * SPREADING_FACTOR;
pub const GUARD_LEN: usize = 14;
pub const SYNC_WORD_LEN: usize = SYNC_CODEWORD_LEN + GUARD_LEN;
/// DBPSK symbols carrying one message (reference symbol included).
pub const PAYLOAD_SYMBOLS: usize = PAYLOAD_BITS + 1;
pub const PAYLOAD_CHIPS: usize = PAYLOAD_SYMBOLS * SPREADING_FACTOR;
pub const FRAME_CHIPS: usize = SYNC_WORD_LEN + PAYLOAD_CHIPS;

/// Sync word plus spread payload.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipFrame {
    sync_word: Vec<f64>,
    payload_chips: Vec<f64>,
}

impl ChipFrame {
    pub fn sync_word(&self) -> &[f64] {
        &self.sync_word
    }

    pub fn payload_chips(&self) -> &[f64] {
        &self.payload_chips
    }

    pub fn len(&self) -> usize {
        self.sync_word.len() + self.payload_chips.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn chips(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        v.extend_from_slice(&self.sync_word);
        v.extend_from_slice(&self.payload_chips);
        v
    }
}

/// 64-chip codeword for spreading code `code_index`: the code's own row
/// used as eight symbols, each spread by the code.
pub fn sync_codeword(code_index: usize) -> Result<Vec<f64>> {
    let code = spreading_code(code_index)?;
    let symbols: Vec<f64> = code.iter().map(|&c| f64::from(c)).collect();
    Ok(spread(&symbols, &code))
}

/// Codeword followed by the silent guard interval (78 chips).
pub fn sync_word(code_index: usize) -> Result<Vec<f64>> {
    let mut w = sync_codeword(code_index)?;
    w.resize(SYNC_WORD_LEN, 0.0);
    Ok(w)
}

pub fn build_frame(payload_chips: &[f64], dest: usize) -> Result<ChipFrame> {
    if payload_chips.len() % SPREADING_FACTOR != 0 {
        return Err(invalid(format!(
            "payload length {} is not a multiple of the spreading factor",
            payload_chips.len()
        )));
    }
    Ok(ChipFrame { sync_word: sync_word(dest)?, payload_chips: payload_chips.to_vec() })
}

/// Complete frame for a message on spreading code `code_index`.
pub fn frame_for_message(msg: &EnergyPacketMessage, code_index: usize) -> Result<ChipFrame> {
    let code = spreading_code(code_index)?;
    let symbols = dbpsk_encode(&encode_payload(msg));
    build_frame(&spread(&symbols, &code), code_index)
}
