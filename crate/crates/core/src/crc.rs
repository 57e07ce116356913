//! CRC-32 (IEEE 802.3: poly 0x04C11DB7, reflected, init and xorout
//! 0xFFFFFFFF) over bit sequences.
//!
//! Bits are one per `u8` (0 or 1). A byte stream corresponds to the bit
//! stream taking each byte least-significant bit first, so the value over
//! whole bytes equals the usual byte-oriented CRC-32.

pub const CRC_BITS: usize = 32;

const POLY_REFLECTED: u32 = 0xEDB8_8320;

pub fn crc32_bits(bits: &[u8]) -> u32 {
    let mut crc = 0xFFFF_FFFFu32;
    for &b in bits {
        crc ^= u32::from(b & 1);
        crc = if crc & 1 != 0 {
            (crc >> 1) ^ POLY_REFLECTED
        } else {
            crc >> 1
        };
    }
    !crc
}

pub fn crc32_bytes(bytes: &[u8]) -> u32 {
    let bits: Vec<u8> = bytes
        .iter()
        .flat_map(|&byte| (0..8).map(move |i| (byte >> i) & 1))
        .collect();
    crc32_bits(&bits)
}

/// Payload followed by its 32 CRC bits, least-significant bit first.
pub fn crc_append(payload: &[u8]) -> Vec<u8> {
    let crc = crc32_bits(payload);
    let mut frame = Vec::with_capacity(payload.len() + CRC_BITS);
    frame.extend_from_slice(payload);
    frame.extend((0..CRC_BITS).map(|i| ((crc >> i) & 1) as u8));
    frame
}

pub fn crc_check(frame: &[u8]) -> bool {
    if frame.len() < CRC_BITS {
        return false;
    }
    let (payload, tail) = frame.split_at(frame.len() - CRC_BITS);
    let crc = crc32_bits(payload);
    tail.iter()
        .enumerate()
        .all(|(i, &b)| u32::from(b & 1) == (crc >> i) & 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn check_value() {
        assert_eq!(crc32_bytes(b"123456789"), 0xCBF4_3926);
        assert_eq!(crc32_bytes(b""), 0);
    }

    #[test]
    fn every_single_flip_detected_on_256_bit_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let payload: Vec<u8> = (0..224).map(|_| rng.random_range(0..2)).collect();
        let frame = crc_append(&payload);
        assert_eq!(frame.len(), 256);
        assert!(crc_check(&frame));
        for i in 0..frame.len() {
            let mut bad = frame.clone();
            bad[i] ^= 1;
            assert!(!crc_check(&bad), "flip at {i} undetected");
        }
    }

    #[test]
    fn short_frame_fails() {
        assert!(!crc_check(&[0; 8]));
    }
}
