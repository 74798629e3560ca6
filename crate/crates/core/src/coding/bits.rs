use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest bit string handled by exhaustive routines.
pub const MAX_BITS: usize = 64;

/// Fixed-length bit string; position 0 is the leftmost character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Bits {
    len: usize,
    mask: u64,
}

impl Bits {
    pub fn new(len: usize, mask: u64) -> Result<Self> {
        if len > MAX_BITS {
            return Err(Error::Input(format!(
                "bit strings longer than {MAX_BITS} are not supported"
            )));
        }
        if len < MAX_BITS && mask >> len != 0 {
            return Err(Error::Input(format!("mask {mask:#x} has bits beyond length {len}")));
        }
        Ok(Self { len, mask })
    }

    pub fn zeros(len: usize) -> Self {
        Self { len, mask: 0 }
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let mask = bits.iter().enumerate().fold(0u64, |m, (i, &b)| m | (u64::from(b) << i));
        Self::new(bits.len(), mask)
    }

    /// Every string of length `len`, in mask order.
    pub fn all(len: usize) -> impl Iterator<Item = Bits> {
        assert!(len < MAX_BITS, "enumeration of {len}-bit strings");
        (0..(1u64 << len)).map(move |mask| Bits { len, mask })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn get(&self, i: usize) -> bool {
        (self.mask >> i) & 1 == 1
    }

    pub fn with(&self, i: usize, value: bool) -> Self {
        let mask = if value {
            self.mask | (1 << i)
        } else {
            self.mask & !(1 << i)
        };
        Self { len: self.len, mask }
    }

    pub fn weight(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn distance(&self, other: &Bits) -> u32 {
        (self.mask ^ other.mask).count_ones()
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        Bits {
            len: self.len.max(other.len),
            mask: self.mask ^ other.mask,
        }
    }

    /// Inner product modulo 2.
    pub fn dot(&self, other: &Bits) -> bool {
        (self.mask & other.mask).count_ones() % 2 == 1
    }

    /// Key whose numeric order is the lexicographic order of the strings.
    pub fn lex_key(&self) -> u64 {
        if self.len == 0 {
            0
        } else {
            self.mask.reverse_bits() >> (MAX_BITS - self.len)
        }
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Bits at the given positions, in that order.
    pub fn select(&self, positions: &[usize]) -> Bits {
        let mask = positions
            .iter()
            .enumerate()
            .fold(0u64, |m, (k, &p)| m | (u64::from(self.get(p)) << k));
        Bits {
            len: positions.len(),
            mask,
        }
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bools = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Input(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bools(&bools)
    }
}

impl TryFrom<String> for Bits {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Bits> for String {
    fn from(b: Bits) -> Self {
        b.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_positions() {
        let b: Bits = "0010".parse().unwrap();
        assert!(b.get(2) && !b.get(0));
        assert_eq!(b.to_string(), "0010");
        assert_eq!(b.weight(), 1);
        assert!("01x".parse::<Bits>().is_err());
    }

    #[test]
    fn lex_key_orders_strings() {
        let mut all: Vec<Bits> = Bits::all(4).collect();
        all.sort_by_key(Bits::lex_key);
        let strings: Vec<String> = all.iter().map(Bits::to_string).collect();
        let mut sorted = strings.clone();
        sorted.sort();
        assert_eq!(strings, sorted);
    }

    #[test]
    fn dot_is_bilinear() {
        for x in Bits::all(4) {
            for y in Bits::all(4) {
                let r: Bits = "1011".parse().unwrap();
                assert_eq!(r.dot(&x.xor(&y)), r.dot(&x) ^ r.dot(&y));
            }
        }
    }
}
