//! Fixed-length bit vectors backed by `u64` blocks.
//!
//! Rule activations over training rows and per-observation activation
//! signatures are both bit vectors; set intersections reduce to block-wise
//! AND plus popcount.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// A fixed-length bit vector. Unused bits of the last block are kept zero so
/// that equality and ordering are structural.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitVec {
    blocks: Vec<u64>,
    len: usize,
}

impl BitVec {
    /// All-zero vector of `len` bits.
    pub fn zeros(len: usize) -> Self {
        BitVec {
            blocks: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bools: I) -> Self {
        let mut blocks = Vec::new();
        let mut len = 0;
        let mut current = 0u64;
        for b in bools {
            if b {
                current |= 1 << (len & 63);
            }
            len += 1;
            if len & 63 == 0 {
                blocks.push(current);
                current = 0;
            }
        }
        if len & 63 != 0 {
            blocks.push(current);
        }
        BitVec { blocks, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        (self.blocks[index >> 6] >> (index & 63)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        let mask = 1u64 << (index & 63);
        if value {
            self.blocks[index >> 6] |= mask;
        } else {
            self.blocks[index >> 6] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Block-wise AND. Panics if lengths differ.
    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        BitVec {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        }
    }

    /// Popcount of the AND without materializing it.
    pub fn and_count(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Indices of set bits in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// First `new_len` bits.
    pub fn truncated(&self, new_len: usize) -> BitVec {
        assert!(new_len <= self.len);
        let mut blocks: Vec<u64> = self.blocks[..new_len.div_ceil(64)].to_vec();
        if new_len & 63 != 0 {
            if let Some(last) = blocks.last_mut() {
                *last &= (1u64 << (new_len & 63)) - 1;
            }
        }
        BitVec {
            blocks,
            len: new_len,
        }
    }

    /// Encode as a '0'/'1' string, bit 0 first.
    pub fn to_bitstring(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    /// Parse a '0'/'1' string, bit 0 first. Returns `None` on other characters.
    pub fn from_bitstring(s: &str) -> Option<BitVec> {
        let mut bools = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bools.push(false),
                '1' => bools.push(true),
                _ => return None,
            }
        }
        Some(BitVec::from_bools(bools))
    }
}
