//! The Nordstrom-Robinson code and the inner codes cut from it.
//!
//! The (16, 256, 6) code is the Gray image of the octacode, the self-dual
//! extended quadratic-residue code of length 8 over Z/4.

use thiserror::Error;

use crate::codes::{Code, CodeBody, CodeError, Word};
use crate::gf::{Fe, Gf};

/// Generator of the octacode over Z/4.
const OCTACODE: [[u8; 8]; 4] = [
    [1, 0, 0, 0, 3, 1, 2, 1],
    [0, 1, 0, 0, 1, 2, 3, 1],
    [0, 0, 1, 0, 3, 3, 3, 2],
    [0, 0, 0, 1, 2, 3, 1, 1],
];

/// Gray map Z/4 -> F_2^2: 0 -> 00, 1 -> 01, 2 -> 11, 3 -> 10.
const GRAY: [[u8; 2]; 4] = [[0, 0], [0, 1], [1, 1], [1, 0]];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NrError {
    #[error("position {position} out of range for length {n}")]
    Position { position: usize, n: usize },
    #[error("shortening leaves no codewords")]
    EmptyResult,
    #[error("requested {m} codewords from a code of size {size}")]
    TooMany { m: usize, size: usize },
    #[error("operation needs a listed code")]
    NotListed,
    #[error(transparent)]
    Code(#[from] CodeError),
}

fn binary() -> Gf {
    Gf::new(2, 1).expect("GF(2)")
}

/// The 256 words of the Nordstrom-Robinson code, sorted lexicographically.
pub fn build_nr16() -> Code {
    let mut words: Vec<Word> = Vec::with_capacity(256);
    for idx in 0..256u32 {
        let msg = [idx & 3, (idx >> 2) & 3, (idx >> 4) & 3, (idx >> 6) & 3];
        let mut word = Vec::with_capacity(16);
        for col in 0..8 {
            let s = msg.iter().zip(&OCTACODE).map(|(m, row)| m * row[col] as u32).sum::<u32>() % 4;
            word.extend(GRAY[s as usize].iter().map(|&b| Fe::from_encoding(b as u32)));
        }
        words.push(word);
    }
    words.sort();
    Code::listed(binary(), 16, words).expect("octacode image has distinct words")
}

fn listed_words(code: &Code) -> Result<&[Word], NrError> {
    match code.body() {
        CodeBody::Listed(w) => Ok(w),
        CodeBody::Linear(_) => Err(NrError::NotListed),
    }
}

/// Keeps the words with 0 at `position` and deletes that coordinate.
pub fn one_shorten(code: &Code, position: usize) -> Result<Code, NrError> {
    let n = code.len();
    if position >= n {
        return Err(NrError::Position { position, n });
    }
    if n == 1 {
        return Err(NrError::EmptyResult);
    }
    let words: Vec<Word> = listed_words(code)?
        .iter()
        .filter(|w| w[position].is_zero())
        .map(|w| {
            let mut s = w.clone();
            s.remove(position);
            s
        })
        .collect();
    if words.is_empty() {
        return Err(NrError::EmptyResult);
    }
    Ok(Code::listed(code.field().clone(), n - 1, words)?)
}

/// The `m` lexicographically first codewords.
pub fn subcode_first(code: &Code, m: usize) -> Result<Code, NrError> {
    let mut words = listed_words(code)?.to_vec();
    if m > words.len() {
        return Err(NrError::TooMany { m, size: words.len() });
    }
    words.sort();
    words.truncate(m);
    Ok(Code::listed(code.field().clone(), code.len(), words)?)
}

/// Shortened NR at position 0.
pub fn shortened_nr() -> Code {
    one_shorten(&build_nr16(), 0).expect("NR16 shortens to 128 words")
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::codes::{distance_set, Caps};

    #[test]
    fn nr16_shape() {
        let nr = build_nr16();
        assert_eq!(nr.size(), Some(256));
        assert_eq!(distance_set(&nr, Caps::default()).unwrap(), BTreeSet::from([6, 8, 10, 16]));
        let words = nr.codewords().unwrap();
        assert!(words.contains(&vec![Fe::ZERO; 16]));
        let weights: BTreeSet<usize> =
            words.iter().map(|w| w.iter().filter(|s| !s.is_zero()).count()).collect();
        assert_eq!(weights, BTreeSet::from([0, 6, 8, 10, 16]));
    }

    #[test]
    fn shortening_at_every_position() {
        let nr = build_nr16();
        for pos in 0..16 {
            let s = one_shorten(&nr, pos).unwrap();
            assert_eq!((s.len(), s.size()), (15, Some(128)), "position {pos}");
            assert_eq!(distance_set(&s, Caps::default()).unwrap(), BTreeSet::from([6, 8, 10]));
        }
    }

    #[test]
    fn shorten_edge_cases() {
        let gf = binary();
        let zero = Code::listed(gf.clone(), 3, vec![vec![Fe::ZERO; 3]]).unwrap();
        let s = one_shorten(&zero, 1).unwrap();
        assert_eq!((s.len(), s.size()), (2, Some(1)));
        let ones = Code::listed(gf, 2, vec![vec![Fe::ONE; 2]]).unwrap();
        assert_eq!(one_shorten(&ones, 0).unwrap_err(), NrError::EmptyResult);
        assert_eq!(one_shorten(&ones, 2).unwrap_err(), NrError::Position { position: 2, n: 2 });
    }

    #[test]
    fn subcodes() {
        let s = shortened_nr();
        let all = subcode_first(&s, 128).unwrap();
        assert_eq!(all.codewords().unwrap(), s.codewords().unwrap());
        let four = subcode_first(&s, 4).unwrap();
        assert_eq!(four.size(), Some(4));
        assert_eq!(four.codewords().unwrap()[0], vec![Fe::ZERO; 15]);
        assert_eq!(subcode_first(&s, 129).unwrap_err(), NrError::TooMany { m: 129, size: 128 });
    }
}
