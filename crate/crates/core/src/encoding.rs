//! Integer-to-bitstring codes for d-level systems.
//!
//! Four families are supported: standard binary (SB), reflected Gray code,
//! unary (one-hot) and block unary, where each block of `g` levels is stored
//! in a small local SB or Gray register and exactly one block is non-empty.
//!
//! Bit index 0 is the least significant bit and maps to the lowest qubit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported level count.
pub const MAX_LEVELS: usize = 1 << 16;

/// Ordered bits, index 0 = least significant / lowest qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// The low `len` bits of `value`.
    pub fn from_value(value: usize, len: usize) -> Self {
        Self {
            bits: (0..len)
                .map(|i| i < usize::BITS as usize && (value >> i) & 1 == 1)
                .collect(),
        }
    }

    /// Parses big-endian text ("0101" = x3 x2 x1 x0); spaces are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for ch in text.chars().rev() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                ' ' | '_' => {}
                other => return Err(Error::Parse(format!("unexpected '{other}' in bit string"))),
            }
        }
        if bits.is_empty() {
            return Err(Error::Parse("empty bit string".into()));
        }
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Integer value of the bits in `range` (low index = low bit).
    pub fn value_of(&self, range: std::ops::Range<usize>) -> usize {
        range
            .enumerate()
            .filter(|&(_, i)| self.bits[i])
            .fold(0, |acc, (shift, _)| acc | (1 << shift))
    }

    /// Big-endian text with a space between every `width` bits (counted from bit 0).
    pub fn to_blocks(&self, width: usize) -> String {
        let mut out = String::with_capacity(self.len() + self.len() / width.max(1));
        for i in (0..self.len()).rev() {
            out.push(if self.bits[i] { '1' } else { '0' });
            if width > 0 && i > 0 && i % width == 0 {
                out.push(' ');
            }
        }
        out
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.bits.iter().rev() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        BitString::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Number of unequal bits between two equal-length strings.
pub fn hamming_distance(a: &BitString, b: &BitString) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.bits.iter().zip(&b.bits).filter(|(x, y)| x != y).count())
}

/// `ceil(log2(n))` for `n >= 1`.
pub fn ceil_log2(n: usize) -> usize {
    assert!(n >= 1, "ceil_log2 of zero");
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

pub(crate) fn gray(value: usize) -> usize {
    value ^ (value >> 1)
}

pub(crate) fn gray_inverse(mut g: usize) -> usize {
    let mut value = 0;
    while g != 0 {
        value ^= g;
        g >>= 1;
    }
    value
}

/// Code used inside each block of a block-unary encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalCode {
    Sb,
    Gray,
}

impl LocalCode {
    fn encode(self, value: usize) -> usize {
        match self {
            LocalCode::Sb => value,
            LocalCode::Gray => gray(value),
        }
    }

    fn decode(self, word: usize) -> usize {
        match self {
            LocalCode::Sb => word,
            LocalCode::Gray => gray_inverse(word),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncodingKind {
    Sb,
    Gray,
    Unary,
    BlockUnary { local: LocalCode, g: usize },
}

/// A code together with the number of levels it must represent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodingSpec {
    #[serde(flatten)]
    pub kind: EncodingKind,
    pub d: usize,
}

impl EncodingSpec {
    pub fn new(kind: EncodingKind, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidEncoding(format!(
                "d must be at least 2, got {d}"
            )));
        }
        if d > MAX_LEVELS {
            return Err(Error::InvalidEncoding(format!(
                "d = {d} exceeds the cap of {MAX_LEVELS}"
            )));
        }
        if let EncodingKind::BlockUnary { g, .. } = kind {
            if g == 0 {
                return Err(Error::InvalidEncoding(
                    "block size g must be positive".into(),
                ));
            }
        }
        Ok(Self { kind, d })
    }

    pub fn sb(d: usize) -> Result<Self> {
        Self::new(EncodingKind::Sb, d)
    }

    pub fn gray(d: usize) -> Result<Self> {
        Self::new(EncodingKind::Gray, d)
    }

    pub fn unary(d: usize) -> Result<Self> {
        Self::new(EncodingKind::Unary, d)
    }

    pub fn block_unary(local: LocalCode, g: usize, d: usize) -> Result<Self> {
        Self::new(EncodingKind::BlockUnary { local, g }, d)
    }

    /// Same code family at a different level count.
    pub fn with_levels(&self, d: usize) -> Result<Self> {
        Self::new(self.kind, d)
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.kind, EncodingKind::Sb | EncodingKind::Gray)
    }

    /// Short label used in reports and file names.
    pub fn label(&self) -> String {
        match self.kind {
            EncodingKind::Sb => "sb".into(),
            EncodingKind::Gray => "gray".into(),
            EncodingKind::Unary => "unary".into(),
            EncodingKind::BlockUnary { local, g } => match local {
                LocalCode::Sb => format!("bu-sb-g{g}"),
                LocalCode::Gray => format!("bu-gray-g{g}"),
            },
        }
    }

    /// Bits per block for block unary, `ceil(log2(g + 1))`.
    pub fn block_width(&self) -> Option<usize> {
        match self.kind {
            EncodingKind::BlockUnary { g, .. } => Some(ceil_log2(g + 1)),
            _ => None,
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self.kind {
            EncodingKind::Sb | EncodingKind::Gray => ceil_log2(self.d),
            EncodingKind::Unary => self.d,
            EncodingKind::BlockUnary { g, .. } => self.d.div_ceil(g) * ceil_log2(g + 1),
        }
    }

    fn check_level(&self, l: usize) -> Result<()> {
        if l >= self.d {
            Err(Error::LevelOutOfRange {
                level: l,
                d: self.d,
            })
        } else {
            Ok(())
        }
    }

    pub fn encode(&self, l: usize) -> Result<BitString> {
        self.check_level(l)?;
        let n = self.num_qubits();
        Ok(match self.kind {
            EncodingKind::Sb => BitString::from_value(l, n),
            EncodingKind::Gray => BitString::from_value(gray(l), n),
            EncodingKind::Unary => {
                let mut bits = BitString::zeros(n);
                bits.set(l, true);
                bits
            }
            EncodingKind::BlockUnary { local, g } => {
                let width = ceil_log2(g + 1);
                let block = l / g;
                let word = local.encode(l % g + 1);
                let mut bits = BitString::zeros(n);
                for i in 0..width {
                    bits.set(block * width + i, (word >> i) & 1 == 1);
                }
                bits
            }
        })
    }

    pub fn decode(&self, bits: &BitString) -> Result<usize> {
        let n = self.num_qubits();
        if bits.len() != n {
            return Err(Error::LengthMismatch {
                left: bits.len(),
                right: n,
            });
        }
        let invalid = || Error::InvalidCodeword(bits.to_string());
        let level = match self.kind {
            EncodingKind::Sb => bits.value_of(0..n),
            EncodingKind::Gray => gray_inverse(bits.value_of(0..n)),
            EncodingKind::Unary => {
                if bits.count_ones() != 1 {
                    return Err(invalid());
                }
                bits.bits().iter().position(|&b| b).unwrap()
            }
            EncodingKind::BlockUnary { local, g } => {
                let width = ceil_log2(g + 1);
                let mut found = None;
                for block in 0..n / width {
                    let word = bits.value_of(block * width..(block + 1) * width);
                    if word != 0 {
                        if found.is_some() {
                            return Err(invalid());
                        }
                        found = Some((block, word));
                    }
                }
                let (block, word) = found.ok_or_else(invalid)?;
                let value = local.decode(word);
                if value == 0 || value > g {
                    return Err(invalid());
                }
                block * g + value - 1
            }
        };
        if level >= self.d {
            return Err(invalid());
        }
        Ok(level)
    }

    /// Qubits whose values determine level `l`.
    pub fn bitmask_subset(&self, l: usize) -> Result<Vec<usize>> {
        self.check_level(l)?;
        Ok(match self.kind {
            EncodingKind::Sb | EncodingKind::Gray => (0..self.num_qubits()).collect(),
            EncodingKind::Unary => vec![l],
            EncodingKind::BlockUnary { g, .. } => {
                let width = ceil_log2(g + 1);
                let block = l / g;
                (block * width..(block + 1) * width).collect()
            }
        })
    }

    /// Human-readable codeword, block-separated for block unary.
    pub fn display(&self, bits: &BitString) -> String {
        match self.block_width() {
            Some(w) => bits.to_blocks(w),
            None => bits.to_string(),
        }
    }

    /// All codewords in level order.
    pub fn codewords(&self) -> Vec<BitString> {
        (0..self.d).map(|l| self.encode(l).unwrap()).collect()
    }
}

impl fmt::Display for EncodingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(d={})", self.label(), self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bu_gray3(d: usize) -> EncodingSpec {
        EncodingSpec::block_unary(LocalCode::Gray, 3, d).unwrap()
    }

    #[test]
    fn qubit_counts() {
        assert_eq!(EncodingSpec::sb(12).unwrap().num_qubits(), 4);
        assert_eq!(EncodingSpec::unary(12).unwrap().num_qubits(), 12);
        assert_eq!(bu_gray3(12).num_qubits(), 8);
        assert_eq!(EncodingSpec::gray(2).unwrap().num_qubits(), 1);
        assert_eq!(EncodingSpec::sb(17).unwrap().num_qubits(), 5);
    }

    #[test]
    fn closed_form_qubit_counts() {
        for d in 2..=64usize {
            let k = (d as f64).log2().ceil() as usize;
            assert_eq!(EncodingSpec::sb(d).unwrap().num_qubits(), k);
            assert_eq!(EncodingSpec::gray(d).unwrap().num_qubits(), k);
            assert_eq!(EncodingSpec::unary(d).unwrap().num_qubits(), d);
            for g in [3usize, 5, 7] {
                let width = ((g + 1) as f64).log2().ceil() as usize;
                let blocks = (d as f64 / g as f64).ceil() as usize;
                for local in [LocalCode::Sb, LocalCode::Gray] {
                    let spec = EncodingSpec::block_unary(local, g, d).unwrap();
                    assert_eq!(spec.num_qubits(), blocks * width);
                }
            }
        }
    }

    #[test]
    fn table_rows() {
        let sb = EncodingSpec::sb(12).unwrap();
        let gray = EncodingSpec::gray(12).unwrap();
        let unary = EncodingSpec::unary(12).unwrap();
        assert_eq!(sb.encode(5).unwrap().to_string(), "0101");
        assert_eq!(gray.encode(2).unwrap().to_string(), "0011");
        assert_eq!(unary.encode(0).unwrap().to_string(), "000000000001");
        let gray_rows = [
            "0000", "0001", "0011", "0010", "0110", "0111", "0101", "0100", "1100", "1101", "1111",
            "1110",
        ];
        for (l, row) in gray_rows.iter().enumerate() {
            assert_eq!(&gray.encode(l).unwrap().to_string(), row);
        }
    }

    #[test]
    fn block_unary_rows() {
        let spec = bu_gray3(12);
        assert_eq!(spec.display(&spec.encode(4).unwrap()), "00 00 11 00");
        let bu_sb = EncodingSpec::block_unary(LocalCode::Sb, 3, 12).unwrap();
        let rows = [
            "00 00 00 01",
            "00 00 00 10",
            "00 00 00 11",
            "00 00 01 00",
            "00 00 10 00",
            "00 00 11 00",
            "00 01 00 00",
            "00 10 00 00",
            "00 11 00 00",
            "01 00 00 00",
            "10 00 00 00",
            "11 00 00 00",
        ];
        for (l, row) in rows.iter().enumerate() {
            assert_eq!(&bu_sb.display(&bu_sb.encode(l).unwrap()), row);
        }
        let g5 = EncodingSpec::block_unary(LocalCode::Gray, 5, 12).unwrap();
        assert_eq!(g5.display(&g5.encode(3).unwrap()), "000 000 110");
        assert_eq!(g5.display(&g5.encode(10).unwrap()), "001 000 000");
        let g7 = EncodingSpec::block_unary(LocalCode::Gray, 7, 12).unwrap();
        assert_eq!(g7.display(&g7.encode(5).unwrap()), "000 101");
        assert_eq!(g7.display(&g7.encode(11).unwrap()), "111 000");
    }

    #[test]
    fn decode_examples() {
        let unary = EncodingSpec::unary(4).unwrap();
        assert_eq!(unary.decode(&BitString::parse("0100").unwrap()).unwrap(), 2);
        assert!(matches!(
            unary.decode(&BitString::parse("0110").unwrap()),
            Err(Error::InvalidCodeword(_))
        ));
        let gray = EncodingSpec::gray(12).unwrap();
        assert_eq!(gray.decode(&BitString::parse("0111").unwrap()).unwrap(), 5);
        // 15 in SB is a 4-bit word but not a level of d = 12.
        let sb = EncodingSpec::sb(12).unwrap();
        assert!(sb.decode(&BitString::parse("1111").unwrap()).is_err());
        assert!(sb.decode(&BitString::parse("111").unwrap()).is_err());
        let bu = bu_gray3(12);
        assert!(bu
            .decode(&BitString::parse("00 00 00 00").unwrap())
            .is_err());
        assert!(bu
            .decode(&BitString::parse("00 01 00 01").unwrap())
            .is_err());
    }

    #[test]
    fn out_of_range_level() {
        let sb = EncodingSpec::sb(12).unwrap();
        assert_eq!(
            sb.encode(12),
            Err(Error::LevelOutOfRange { level: 12, d: 12 })
        );
        assert!(sb.bitmask_subset(40).is_err());
    }

    #[test]
    fn bitmask_subsets() {
        assert_eq!(
            EncodingSpec::unary(12).unwrap().bitmask_subset(7).unwrap(),
            vec![7]
        );
        assert_eq!(bu_gray3(12).bitmask_subset(2).unwrap(), vec![0, 1]);
        assert_eq!(bu_gray3(12).bitmask_subset(3).unwrap(), vec![2, 3]);
        assert_eq!(
            EncodingSpec::sb(12).unwrap().bitmask_subset(0).unwrap(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn hamming_examples() {
        let sb = EncodingSpec::sb(8).unwrap();
        let gray = EncodingSpec::gray(8).unwrap();
        let d = |s: &EncodingSpec| {
            hamming_distance(&s.encode(3).unwrap(), &s.encode(4).unwrap()).unwrap()
        };
        assert_eq!(d(&sb), 3);
        assert_eq!(d(&gray), 1);
        let x = sb.encode(6).unwrap();
        assert_eq!(hamming_distance(&x, &x).unwrap(), 0);
        assert!(hamming_distance(&x, &BitString::zeros(4)).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(EncodingSpec::sb(1).is_err());
        assert!(EncodingSpec::sb(MAX_LEVELS + 1).is_err());
        assert!(EncodingSpec::block_unary(LocalCode::Sb, 0, 4).is_err());
    }

    #[test]
    fn spec_json_shape() {
        let spec = bu_gray3(12);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            text,
            r#"{"kind":"block_unary","local":"gray","g":3,"d":12}"#
        );
        let back: EncodingSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_spec() -> impl Strategy<Value = EncodingSpec> {
            (
                2usize..=64,
                0usize..6,
                prop::sample::select(vec![3usize, 5, 7]),
            )
                .prop_map(|(d, kind, g)| {
                    let kind = match kind {
                        0 => EncodingKind::Sb,
                        1 => EncodingKind::Gray,
                        2 => EncodingKind::Unary,
                        3 => EncodingKind::BlockUnary {
                            local: LocalCode::Sb,
                            g,
                        },
                        _ => EncodingKind::BlockUnary {
                            local: LocalCode::Gray,
                            g,
                        },
                    };
                    EncodingSpec::new(kind, d).unwrap()
                })
        }

        proptest! {
            #[test]
            fn decode_inverts_encode(spec in any_spec()) {
                let words = spec.codewords();
                for (l, w) in words.iter().enumerate() {
                    prop_assert_eq!(spec.decode(w).unwrap(), l);
                    match spec.kind {
                        EncodingKind::Unary => prop_assert_eq!(w.count_ones(), 1),
                        EncodingKind::BlockUnary { .. } => {
                            let width = spec.block_width().unwrap();
                            let nonzero = (0..spec.num_qubits() / width)
                                .filter(|b| w.value_of(b * width..(b + 1) * width) != 0)
                                .count();
                            prop_assert_eq!(nonzero, 1);
                        }
                        _ => {}
                    }
                }
                let mut sorted = words.clone();
                sorted.sort();
                sorted.dedup();
                prop_assert_eq!(sorted.len(), spec.d);
            }

            #[test]
            fn gray_neighbours_differ_by_one_bit(d in 2usize..=1024) {
                let spec = EncodingSpec::gray(d).unwrap();
                for l in 0..d - 1 {
                    let a = spec.encode(l).unwrap();
                    let b = spec.encode(l + 1).unwrap();
                    prop_assert_eq!(hamming_distance(&a, &b).unwrap(), 1);
                }
            }
        }
    }
}
