//! Cantor ultrametric, Hamming distance and subcubes of `{0,1}^n`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::matrioshka::{bits_to_string, parse_bits, BitSequence};

/// A nonempty fixed-length binary word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<bool>);

impl Word {
    pub fn new(bits: Vec<bool>) -> Result<Word> {
        if bits.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Word(bits))
    }

    /// The word spelling `value` in `n` bits, most significant first.
    pub fn from_index(value: u64, n: usize) -> Word {
        assert!(n >= 1 && (n >= 64 || value >> n == 0), "value does not fit in {n} bits");
        Word((0..n).rev().map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn flipped(&self, i: usize) -> Word {
        let mut bits = self.0.clone();
        bits[i] = !bits[i];
        Word(bits)
    }

    pub fn push(&self, bit: bool) -> Word {
        let mut bits = self.0.clone();
        bits.push(bit);
        Word(bits)
    }
}

impl AsRef<[bool]> for Word {
    fn as_ref(&self) -> &[bool] {
        &self.0
    }
}

impl AsRef<[bool]> for BitSequence {
    fn as_ref(&self) -> &[bool] {
        self.bits()
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        Word::new(parse_bits(s.trim())?)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits_to_string(&self.0))
    }
}

/// A value of the Cantor metric: `0` or `2^-k` with `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CantorDistance {
    Zero,
    /// `2^-k`
    Pow(usize),
}

impl CantorDistance {
    pub fn is_zero(&self) -> bool {
        matches!(self, CantorDistance::Zero)
    }

    pub fn to_rational(&self) -> BigRational {
        match *self {
            CantorDistance::Zero => BigRational::from_integer(BigInt::from(0)),
            CantorDistance::Pow(k) => BigRational::new(BigInt::from(1), BigInt::from(1) << k),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            CantorDistance::Zero => 0.0,
            CantorDistance::Pow(k) => 0.5f64.powi(k as i32),
        }
    }
}

impl Ord for CantorDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CantorDistance::Zero, CantorDistance::Zero) => Ordering::Equal,
            (CantorDistance::Zero, _) => Ordering::Less,
            (_, CantorDistance::Zero) => Ordering::Greater,
            // larger exponent, smaller distance
            (CantorDistance::Pow(a), CantorDistance::Pow(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for CantorDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CantorDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CantorDistance::Zero => f.write_str("0"),
            CantorDistance::Pow(_) => write!(f, "{}", self.to_rational()),
        }
    }
}

fn check_lengths(x: &[bool], y: &[bool]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    Ok(())
}

/// `2^-k` for the first (1-based) differing position `k`, `0` if equal.
pub fn cantor_distance<A: AsRef<[bool]>>(x: &A, y: &A) -> Result<CantorDistance> {
    let (x, y) = (x.as_ref(), y.as_ref());
    check_lengths(x, y)?;
    Ok(match x.iter().zip(y).position(|(a, b)| a != b) {
        Some(i) => CantorDistance::Pow(i + 1),
        None => CantorDistance::Zero,
    })
}

pub fn hamming(x: &Word, y: &Word) -> Result<usize> {
    check_lengths(&x.0, &y.0)?;
    Ok(x.0.iter().zip(&y.0).filter(|(a, b)| a != b).count())
}

pub fn adjacent(x: &Word, y: &Word) -> Result<bool> {
    Ok(hamming(x, y)? == 1)
}

/// The `n` words at Hamming distance one, by flipped position.
pub fn neighbors(w: &Word) -> Vec<Word> {
    (0..w.len()).map(|i| w.flipped(i)).collect()
}

/// All words of length `n >= 1`, built by appending 0 to one copy of the
/// `(n-1)`-cube and 1 to another.
pub fn hypercube(n: usize) -> Vec<Word> {
    assert!(n >= 1, "hypercube dimension must be positive");
    let mut words = vec![Word(vec![false]), Word(vec![true])];
    for _ in 1..n {
        let (zeros, ones) = split_cube(&words);
        words = zeros.into_iter().chain(ones).collect();
    }
    words
}

/// The two copies of an `n`-cube inside the `(n+1)`-cube, by last bit.
pub fn split_cube(words: &[Word]) -> (Vec<Word>, Vec<Word>) {
    (
        words.iter().map(|w| w.push(false)).collect(),
        words.iter().map(|w| w.push(true)).collect(),
    )
}

/// Words of length `n` sharing `fixed_prefix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubcubeDescriptor {
    n: usize,
    fixed_prefix: Vec<bool>,
}

impl SubcubeDescriptor {
    pub fn new(n: usize, fixed_prefix: Vec<bool>) -> Result<SubcubeDescriptor> {
        if fixed_prefix.len() > n {
            return Err(Error::LengthMismatch { left: fixed_prefix.len(), right: n });
        }
        Ok(SubcubeDescriptor { n, fixed_prefix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fixed_prefix(&self) -> &[bool] {
        &self.fixed_prefix
    }

    pub fn prefix_len(&self) -> usize {
        self.fixed_prefix.len()
    }

    pub fn free_dims(&self) -> usize {
        self.n - self.fixed_prefix.len()
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.len() == self.n && w.0.starts_with(&self.fixed_prefix)
    }

    /// `2^free_dims`, or `None` past `u128`.
    pub fn vertex_count(&self) -> Option<u128> {
        1u128.checked_shl(self.free_dims() as u32)
    }

    pub fn vertices(&self) -> Result<Vec<Word>> {
        let free = self.free_dims();
        if free > 20 {
            return Err(Error::SizeLimit(format!("{free}-dimensional subcube is too large to list")));
        }
        Ok((0..1u64 << free)
            .map(|i| {
                let mut bits = self.fixed_prefix.clone();
                bits.extend((0..free).rev().map(|j| (i >> j) & 1 == 1));
                Word(bits)
            })
            .collect())
    }
}

impl fmt::Display for SubcubeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", bits_to_string(&self.fixed_prefix), "*".repeat(self.free_dims()))
    }
}

/// Smallest subcube fixed by the longest common prefix of `words`.
pub fn subcube(words: &[Word]) -> Result<SubcubeDescriptor> {
    let first = words.first().ok_or(Error::EmptyInput)?;
    let n = first.len();
    let mut p = n;
    for w in &words[1..] {
        check_lengths(&first.0, &w.0)?;
        p = p.min(first.0.iter().zip(&w.0).take_while(|(a, b)| a == b).count());
    }
    SubcubeDescriptor::new(n, first.0[..p].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn cantor_examples() {
        assert_eq!(cantor_distance(&w("0110"), &w("0110")).unwrap(), CantorDistance::Zero);
        let d = cantor_distance(&w("0110"), &w("0100")).unwrap();
        assert_eq!(d.to_string(), "1/8");
        assert_eq!(cantor_distance(&w("1000"), &w("0000")).unwrap().to_string(), "1/2");
        assert_eq!(
            cantor_distance(&w("01"), &w("011")).unwrap_err(),
            Error::LengthMismatch { left: 2, right: 3 }
        );
    }

    #[test]
    fn distance_order_matches_rationals() {
        let all = [CantorDistance::Zero, CantorDistance::Pow(1), CantorDistance::Pow(2), CantorDistance::Pow(70)];
        for a in all {
            for b in all {
                assert_eq!(a.cmp(&b), a.to_rational().cmp(&b.to_rational()));
            }
        }
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&w("0101"), &w("0101")).unwrap(), 0);
        assert_eq!(hamming(&w("0101"), &w("0110")).unwrap(), 2);
        assert_eq!(hamming(&w("0000"), &w("1111")).unwrap(), 4);
        assert!(adjacent(&w("0000"), &w("0100")).unwrap());
    }

    #[test]
    fn subcube_examples() {
        let s = subcube(&[w("0101")]).unwrap();
        assert_eq!((s.prefix_len(), s.free_dims()), (4, 0));
        let s = subcube(&[w("0101"), w("0110")]).unwrap();
        assert_eq!((s.prefix_len(), s.free_dims(), s.to_string()), (2, 2, "01**".to_string()));
        assert_eq!(s.vertices().unwrap().len(), 4);
        let s = subcube(&[w("0000"), w("1000")]).unwrap();
        assert_eq!((s.prefix_len(), s.vertex_count()), (0, Some(16)));
        assert_eq!(subcube(&[]).unwrap_err(), Error::EmptyInput);
        assert!(subcube(&[w("01"), w("0")]).is_err());
    }

    #[test]
    fn hypercube_structure() {
        let cube = hypercube(4);
        assert_eq!(cube.len(), 16);
        for v in &cube {
            let ns = neighbors(v);
            assert_eq!(ns.len(), 4);
            assert!(ns.iter().all(|u| hamming(u, v).unwrap() == 1));
        }
        let (zeros, ones) = split_cube(&hypercube(3));
        assert!(zeros.iter().all(|v| !v.get(3)) && ones.iter().all(|v| v.get(3)));
    }

    #[test]
    fn empty_word_rejected() {
        assert_eq!(Word::new(vec![]).unwrap_err(), Error::EmptyInput);
        assert!("01x".parse::<Word>().is_err());
    }
}
