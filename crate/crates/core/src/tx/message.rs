use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bits in one encoded message: address(8) | current(16) | duration(16) | crc(8).
pub const PAYLOAD_BITS: usize = 48;

const CRC8: crc::Crc<u8> = crc::Crc::<u8>::new(&crc::CRC_8_SMBUS);

/// Control payload of an energy packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyPacketMessage {
    pub dest_address: u8,
    /// Current setpoint in milliamps.
    pub current_ma: u16,
    /// Packet duration in milliseconds.
    pub duration_ms: u16,
}

impl EnergyPacketMessage {
    pub fn new(dest_address: u8, current_ma: u16, duration_ms: u16) -> Self {
        Self { dest_address, current_ma, duration_ms }
    }

    fn header_bytes(&self) -> [u8; 5] {
        let c = self.current_ma.to_be_bytes();
        let d = self.duration_ms.to_be_bytes();
        [self.dest_address, c[0], c[1], d[0], d[1]]
    }

    /// CRC-8 (poly 0x07, init 0) over the 40 header bits.
    pub fn checksum(&self) -> u8 {
        crc8(&self.header_bytes())
    }

    pub fn current_a(&self) -> f64 {
        f64::from(self.current_ma) * 1e-3
    }

    pub fn duration_s(&self) -> f64 {
        f64::from(self.duration_ms) * 1e-3
    }

    /// A dispatch command must request a nonzero duration.
    pub fn is_dispatch(&self) -> bool {
        self.duration_ms > 0
    }
}

pub fn crc8(bytes: &[u8]) -> u8 {
    CRC8.checksum(bytes)
}

/// Serialize to 48 bits, most significant bit first.
pub fn encode_payload(msg: &EnergyPacketMessage) -> Vec<bool> {
    let header = msg.header_bytes();
    header
        .iter()
        .chain(std::iter::once(&msg.checksum()))
        .flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
        .collect()
}

/// Parse 48 bits and verify the checksum.
pub fn decode_payload(bits: &[bool]) -> Result<EnergyPacketMessage> {
    if bits.len() != PAYLOAD_BITS {
        return Err(Error::PayloadLength { expected: PAYLOAD_BITS, found: bits.len() });
    }
    let bytes: Vec<u8> = bits.chunks(8).map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b))).collect();
    let computed = crc8(&bytes[..5]);
    if computed != bytes[5] {
        return Err(Error::ChecksumMismatch { computed, received: bytes[5] });
    }
    Ok(EnergyPacketMessage {
        dest_address: bytes[0],
        current_ma: u16::from_be_bytes([bytes[1], bytes[2]]),
        duration_ms: u16::from_be_bytes([bytes[3], bytes[4]]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits_of(s: &str) -> Vec<bool> {
        s.chars().filter(|c| !c.is_whitespace()).map(|c| c == '1').collect()
    }

    #[test]
    fn known_pattern() {
        let m = EnergyPacketMessage::new(0, 0, 1);
        // crc8 of 00 00 00 00 01 with poly 0x07 is 0x07
        assert_eq!(m.checksum(), 0x07);
        let expected = bits_of("00000000 00000000 00000000 00000000 00000001 00000111");
        assert_eq!(encode_payload(&m), expected);
    }

    #[test]
    fn crc_check_value() {
        // standard check value for CRC-8/SMBUS
        assert_eq!(crc8(b"123456789"), 0xF4);
    }

    #[test]
    fn every_single_bit_flip_is_detected() {
        let m = EnergyPacketMessage::new(0x5A, 2000, 35);
        let bits = encode_payload(&m);
        for i in 0..PAYLOAD_BITS {
            let mut b = bits.clone();
            b[i] = !b[i];
            assert!(
                matches!(decode_payload(&b), Err(Error::ChecksumMismatch { .. })),
                "flip at bit {i} went undetected"
            );
        }
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(matches!(decode_payload(&[true; 47]), Err(Error::PayloadLength { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn round_trip(a: u8, c: u16, d: u16) {
            let m = EnergyPacketMessage::new(a, c, d);
            let bits = encode_payload(&m);
            prop_assert_eq!(bits.len(), PAYLOAD_BITS);
            prop_assert_eq!(decode_payload(&bits).unwrap(), m);
        }
    }
}
