//! Packed binary sequences, LSB-first within each byte.

use std::fmt;

/// A bit sequence packed LSB-first. Trailing pad bits of the last block are
/// kept zero and ignored by every operation.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitSeq {
    blocks: Vec<u64>,
    len: usize,
}

impl BitSeq {
    pub fn new() -> BitSeq {
        BitSeq::default()
    }

    pub fn with_capacity(bits: usize) -> BitSeq {
        BitSeq {
            blocks: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> BitSeq {
        BitSeq {
            blocks: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of length {}", self.len);
        (self.blocks[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of length {}", self.len);
        let b = &mut self.blocks[i / 64];
        if bit {
            *b |= 1u64 << (i % 64);
        } else {
            *b &= !(1u64 << (i % 64));
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.blocks.push(0);
        }
        if bit {
            *self.blocks.last_mut().unwrap() |= 1u64 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.blocks[i / 64] ^= 1u64 << (i % 64);
    }

    /// Appends the low `width` bits of `value`, least significant first.
    pub fn push_word_bits(&mut self, value: u64, width: u32) {
        for j in 0..width {
            self.push((value >> j) & 1 == 1);
        }
    }

    pub fn popcount(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// XOR with another sequence of the same length.
    pub fn xor(&self, rhs: &BitSeq) -> BitSeq {
        assert_eq!(self.len, rhs.len, "length mismatch");
        let blocks = self
            .blocks
            .iter()
            .zip(&rhs.blocks)
            .map(|(a, b)| a ^ b)
            .collect();
        let mut out = BitSeq {
            blocks,
            len: self.len,
        };
        out.clear_padding();
        out
    }

    fn clear_padding(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn from_bools(bits: &[bool]) -> BitSeq {
        let mut s = BitSeq::with_capacity(bits.len());
        for &b in bits {
            s.push(b);
        }
        s
    }

    /// Parses a string of `0`/`1` characters in sequence order (first
    /// character is bit 0).
    pub fn parse(text: &str) -> Option<BitSeq> {
        let mut s = BitSeq::with_capacity(text.len());
        for ch in text.chars() {
            match ch {
                '0' => s.push(false),
                '1' => s.push(true),
                _ => return None,
            }
        }
        Some(s)
    }

    /// LSB-first byte packing.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in 0..self.len {
            if self.get(i) {
                out[i / 8] |= 1 << (i % 8);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> BitSeq {
        assert!(len <= bytes.len() * 8);
        let mut s = BitSeq::with_capacity(len);
        for i in 0..len {
            s.push((bytes[i / 8] >> (i % 8)) & 1 == 1);
        }
        s
    }

    /// Raw 64-bit blocks, for word-at-a-time scans.
    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }
}

impl fmt::Debug for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSeq(")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn push_get_roundtrip() {
        let mut s = BitSeq::new();
        for i in 0..130 {
            s.push(i % 3 == 0);
        }
        for i in 0..130 {
            assert_eq!(s.get(i), i % 3 == 0);
        }
    }

    #[test]
    fn bytes_are_lsb_first() {
        let s = BitSeq::parse("10000001").unwrap();
        assert_eq!(s.to_bytes(), vec![0b1000_0001]);
        let t = BitSeq::parse("110").unwrap();
        assert_eq!(t.to_bytes(), vec![0b011]);
    }

    #[test]
    fn word_bits_lsb_first() {
        let mut s = BitSeq::new();
        s.push_word_bits(6, 4); // 0110 -> bits 0,1,1,0
        assert_eq!(s.to_string(), "0110");
    }

    proptest! {
        #[test]
        fn prop_byte_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let s = BitSeq::from_bools(&bits);
            let back = BitSeq::from_bytes(&s.to_bytes(), bits.len());
            prop_assert_eq!(s, back);
        }

        #[test]
        fn prop_xor_involution(bits in proptest::collection::vec(any::<bool>(), 1..200), seed in any::<u64>()) {
            let data = BitSeq::from_bools(&bits);
            let mut key = BitSeq::with_capacity(bits.len());
            let mut st = seed | 1;
            for _ in 0..bits.len() {
                st = st.wrapping_mul(6364136223846793005).wrapping_add(1);
                key.push(st >> 63 == 1);
            }
            let enc = data.xor(&key);
            prop_assert_eq!(enc.xor(&key), data);
        }
    }
}
