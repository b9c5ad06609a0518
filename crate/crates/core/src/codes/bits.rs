use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite string of bits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(pub Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn extend(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `width` low-order bits of `v`, most significant first.
    pub fn from_uint(v: u64, width: usize) -> Self {
        BitString(
            (0..width)
                .rev()
                .map(|i| i < 64 && (v >> i) & 1 == 1)
                .collect(),
        )
    }

    pub fn to_uint(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::invalid(format!("not a bit: {c:?}"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitString::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Elias gamma code of a positive integer.
pub fn elias_int_encode(l: u64) -> Result<BitString> {
    if l == 0 {
        return Err(Error::invalid(
            "Elias gamma code is defined for positive integers only",
        ));
    }
    let bits = 64 - l.leading_zeros() as usize;
    let mut out = BitString(vec![false; bits - 1]);
    out.extend(&BitString::from_uint(l, bits));
    Ok(out)
}

/// Decode one gamma codeword from the front of `bits`; returns the value and
/// the number of bits consumed.
pub fn elias_int_decode(bits: &[bool]) -> Result<(u64, usize)> {
    let zeros = bits.iter().take_while(|&&b| !b).count();
    if zeros >= 64 {
        return Err(Error::Decode("gamma prefix too long".into()));
    }
    let end = 2 * zeros + 1;
    if bits.len() < end {
        return Err(Error::Decode("truncated gamma codeword".into()));
    }
    let v = bits[zeros..end]
        .iter()
        .fold(0u64, |acc, &b| (acc << 1) | b as u64);
    Ok((v, end))
}

/// Length of the gamma codeword for `l >= 1`.
pub fn elias_len(l: u64) -> usize {
    2 * (63 - l.leading_zeros() as usize) + 1
}

/// Whether no codeword in the set is a proper prefix of another. Duplicates
/// are treated as one codeword.
pub fn is_prefix_free(words: &[BitString]) -> bool {
    let mut v: Vec<&BitString> = words.iter().collect();
    v.sort();
    v.dedup();
    v.windows(2).all(|w| !w[0].is_prefix_of(w[1]))
}

/// Kraft sum over the distinct codewords.
pub fn kraft_sum(words: &[BitString]) -> f64 {
    let mut v: Vec<&BitString> = words.iter().collect();
    v.sort();
    v.dedup();
    v.iter().map(|w| 2f64.powi(-(w.len() as i32))).sum()
}
