//! Anchored binary sequences and the generalized Thue-Morse construction.
//!
//! A [`BitSeq`] occupies the integer interval `[anchor, anchor + len - 1]`.
//! Concatenation normally re-anchors at 0; marking one part with a dagger
//! keeps that part at its own indices instead.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("malformed sequence `{0}`: expected bits optionally followed by @anchor")]
    Malformed(String),
    #[error("stage {stage} needs {needed} bits of the generating function, got {got}")]
    TooFewBits { stage: usize, needed: usize, got: usize },
    #[error("the two functions agree on their first {0} bits")]
    NoDisagreement(usize),
    #[error("dagger index {0} is out of range")]
    DaggerOutOfRange(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct BitSeq {
    pub anchor: i64,
    pub bits: Vec<bool>,
}

impl BitSeq {
    pub fn new(bits: Vec<bool>, anchor: i64) -> Self {
        BitSeq { anchor, bits }
    }

    pub fn empty() -> Self {
        BitSeq::default()
    }

    /// Parses `0101`, anchored at 0.
    pub fn from_bits(s: &str) -> Result<Self, SeqError> {
        format!("{s}@0").parse()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Last occupied index; `anchor - 1` when empty.
    pub fn end(&self) -> i64 {
        self.anchor + self.len() as i64 - 1
    }

    pub fn get(&self, i: i64) -> Option<bool> {
        let k = i - self.anchor;
        if k < 0 {
            return None;
        }
        self.bits.get(k as usize).copied()
    }

    pub fn complement(&self) -> BitSeq {
        BitSeq {
            anchor: self.anchor,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn reanchored(&self, anchor: i64) -> BitSeq {
        BitSeq {
            anchor,
            bits: self.bits.clone(),
        }
    }

    /// Restriction to `[lo, hi]` intersected with the domain.
    pub fn window(&self, lo: i64, hi: i64) -> BitSeq {
        let lo = lo.max(self.anchor);
        let hi = hi.min(self.end());
        if hi < lo {
            return BitSeq::new(Vec::new(), lo);
        }
        let s = (lo - self.anchor) as usize;
        let e = (hi - self.anchor) as usize;
        BitSeq::new(self.bits[s..=e].to_vec(), lo)
    }

    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.bit_string(), self.anchor)
    }
}

impl FromStr for BitSeq {
    type Err = SeqError;

    /// `bits` or `bits@anchor`; the empty string is the empty sequence.
    fn from_str(s: &str) -> Result<Self, SeqError> {
        let bad = || SeqError::Malformed(s.to_string());
        let (bits, anchor) = match s.split_once('@') {
            Some((b, a)) => (b, a.trim().parse::<i64>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let bits = bits
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BitSeq { anchor, bits })
    }
}

/// Concatenates `parts`. Without a dagger the result starts at 0; with a
/// dagger on part `m`, part `m` keeps its indices.
pub fn concat(parts: &[BitSeq], dagger: Option<usize>) -> Result<BitSeq, SeqError> {
    let bits: Vec<bool> = parts.iter().flat_map(|p| p.bits.iter().copied()).collect();
    let anchor = match dagger {
        None => 0,
        Some(m) if m < parts.len() => {
            let before: usize = parts[..m].iter().map(BitSeq::len).sum();
            parts[m].anchor - before as i64
        }
        Some(m) => return Err(SeqError::DaggerOutOfRange(m)),
    };
    Ok(BitSeq { anchor, bits })
}

/// Every translation `d` with `needle(i) = hay(i + d)` on the whole domain
/// of `needle`, ascending.
pub fn embeddings(needle: &BitSeq, hay: &BitSeq) -> Vec<i64> {
    if needle.is_empty() {
        return vec![0];
    }
    if needle.len() > hay.len() {
        return Vec::new();
    }
    (0..=hay.len() - needle.len())
        .filter(|&s| hay.bits[s..s + needle.len()] == needle.bits[..])
        .map(|s| hay.anchor + s as i64 - needle.anchor)
        .collect()
}

/// Least embedding translation, if any.
pub fn embeds(needle: &BitSeq, hay: &BitSeq) -> Option<i64> {
    embeddings(needle, hay).into_iter().next()
}

/// Stage `stage` of the generalized Thue-Morse sequence for the function
/// whose first values are `f`.
pub fn gtm(f: &[bool], stage: usize) -> Result<BitSeq, SeqError> {
    Ok(gtm_stages(f, stage)?.pop().unwrap())
}

/// Stages `0..=stage`.
pub fn gtm_stages(f: &[bool], stage: usize) -> Result<Vec<BitSeq>, SeqError> {
    if f.len() < stage {
        return Err(SeqError::TooFewBits {
            stage,
            needed: stage,
            got: f.len(),
        });
    }
    let mut out = vec![BitSeq::new(vec![false, false, true], 0)];
    for i in 0..stage {
        let prev = &out[i];
        let mid = BitSeq::new(vec![f[i]], 0);
        let next = if i % 2 == 0 {
            concat(&[prev.clone(), mid, prev.complement()], Some(0))?
        } else {
            concat(&[prev.complement(), mid, prev.clone()], Some(2))?
        };
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dissimilarity {
    /// Least index where the two functions differ.
    pub index: usize,
    /// Stage `index + 2` of the first sequence.
    pub witness: BitSeq,
    /// Stage of the second sequence searched for the witness.
    pub checked_stage: usize,
    /// Whether the witness is absent from that stage.
    pub absent: bool,
}

/// Finds the first disagreement of `f` and `g` within `depth` bits and
/// tests that stage `i + 2` of the sequence for `f` does not occur in
/// stage `i + 4` of the sequence for `g`.
pub fn dissimilarity_witness(f: &[bool], g: &[bool], depth: usize) -> Result<Dissimilarity, SeqError> {
    let limit = depth.min(f.len()).min(g.len());
    let i = (0..limit)
        .find(|&i| f[i] != g[i])
        .ok_or(SeqError::NoDisagreement(limit))?;
    let witness = gtm(f, i + 2)?;
    let hay = gtm(g, i + 4)?;
    let absent = embeds(&witness, &hay).is_none();
    Ok(Dissimilarity {
        index: i,
        witness,
        checked_stage: i + 4,
        absent,
    })
}

/// Splits stage `j + 2` into four blocks, each equal as a bit string to
/// stage `j` or its complement, separated by single bits. Returns the
/// blocks' orientations (`true` for the complement) and the separators.
pub fn four_block_decomposition(f: &[bool], j: usize) -> Result<Option<([bool; 4], [bool; 3])>, SeqError> {
    let base = gtm(f, j)?;
    let whole = gtm(f, j + 2)?;
    let l = base.len();
    let comp = base.complement();
    let mut orient = [false; 4];
    let mut seps = [false; 3];
    for b in 0..4 {
        let s = b * (l + 1);
        let block = &whole.bits[s..s + l];
        if block == base.bits.as_slice() {
            orient[b] = false;
        } else if block == comp.bits.as_slice() {
            orient[b] = true;
        } else {
            return Ok(None);
        }
        if b < 3 {
            seps[b] = whole.bits[s + l];
        }
    }
    Ok(Some((orient, seps)))
}

/// Length of the longest window of `seq` containing no occurrence of
/// `needle`.
pub fn longest_gap(seq: &BitSeq, needle: &BitSeq) -> usize {
    let hits: Vec<usize> = embeddings(needle, &BitSeq::new(seq.bits.clone(), 0))
        .into_iter()
        .map(|d| (d + needle.anchor) as usize)
        .collect();
    let n = seq.len();
    let m = needle.len();
    let mut longest = 0;
    let mut start = 0;
    for &h in hits.iter().chain(std::iter::once(&n)) {
        // occurrence at h spans [h, h + m - 1]; windows avoiding it end before h + m - 1
        let end = if h == n { n } else { h + m - 1 };
        longest = longest.max(end - start);
        start = h + 1;
    }
    longest
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn concat_with_and_without_dagger() {
        let a: BitSeq = "0101@-1".parse().unwrap();
        let b: BitSeq = "110@-2".parse().unwrap();
        assert_eq!(concat(&[a.clone(), b.clone()], None).unwrap().to_string(), "0101110@0");
        assert_eq!(
            concat(&[a.clone(), b.clone()], Some(0)).unwrap().to_string(),
            "0101110@-1"
        );
        assert_eq!(
            concat(&[a.clone(), b.clone()], Some(1)).unwrap().to_string(),
            "0101110@-6"
        );
        assert_eq!(concat(&[a, b], Some(2)), Err(SeqError::DaggerOutOfRange(2)));
    }

    #[test]
    fn embedding_offsets() {
        let needle = BitSeq::from_bits("01").unwrap();
        let hay = BitSeq::from_bits("1011").unwrap();
        assert_eq!(embeds(&needle, &hay), Some(1));
        assert_eq!(embeds(&BitSeq::empty(), &hay), Some(0));
        assert_eq!(embeds(&BitSeq::from_bits("00").unwrap(), &hay), None);
        let shifted: BitSeq = "01@5".parse().unwrap();
        assert_eq!(embeds(&shifted, &hay), Some(-4));
    }

    #[test]
    fn first_stages() {
        let zeros = [false; 8];
        let ones = [true; 8];
        assert_eq!(gtm(&zeros, 0).unwrap().to_string(), "001@0");
        assert_eq!(gtm(&ones, 1).unwrap().to_string(), "0011110@0");
        assert_eq!(gtm(&zeros, 2).unwrap().to_string(), "110100100010110@-8");
        assert_eq!(gtm(&ones, 2).unwrap().to_string(), "110000110011110@-8");
        assert_eq!(gtm(&zeros, 3).unwrap().get(7), Some(false));
        assert_eq!(gtm(&ones, 3).unwrap().get(7), Some(true));
        assert!(matches!(gtm(&zeros[..1], 2), Err(SeqError::TooFewBits { .. })));
    }

    #[test]
    fn parse_and_display() {
        let s: BitSeq = "0110@-3".parse().unwrap();
        assert_eq!((s.anchor, s.end()), (-3, 0));
        assert_eq!(s.get(-2), Some(true));
        assert_eq!(s.get(1), None);
        assert!("01x".parse::<BitSeq>().is_err());
        assert!("01@z".parse::<BitSeq>().is_err());
    }

    #[test]
    fn gap_measure() {
        let s = BitSeq::from_bits("0010000001").unwrap();
        let needle = BitSeq::from_bits("001").unwrap();
        // windows avoiding both occurrences: [1, 8] has length 8
        assert_eq!(longest_gap(&s, &needle), 8);
    }

    #[test]
    fn witness_for_constant_functions() {
        let d = dissimilarity_witness(&bits("0000"), &bits("1111"), 4).unwrap();
        assert_eq!(d.index, 0);
        assert_eq!(d.witness, gtm(&bits("00"), 2).unwrap());
        assert!(matches!(
            dissimilarity_witness(&bits("01"), &bits("01"), 2),
            Err(SeqError::NoDisagreement(2))
        ));
    }
}
