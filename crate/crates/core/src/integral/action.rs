use num_integer::Integer;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::metric::Word;

/// Widest bit vector an action accepts; cylinders are evaluated as `u64` masks.
pub const MAX_DIMENSION: usize = 64;

/// `S[g] = g^T Q g + w^T g` on bit vectors `g`, with Planck constant `hbar`.
///
/// `Q` is kept exact as integers over a common denominator so that the
/// quadratic part is summed without rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionFunctional {
    n: usize,
    q: Vec<Rational64>,
    q_num: Vec<i64>,
    q_den: i64,
    w: Vec<f64>,
    hbar: f64,
}

impl ActionFunctional {
    /// `q` is row-major `n x n`, or empty for `Q = 0`.
    pub fn new(q: Vec<Rational64>, w: Vec<f64>, hbar: f64) -> Result<ActionFunctional> {
        let n = w.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if n > MAX_DIMENSION {
            return Err(Error::SizeLimit(format!("action dimension {n} exceeds {MAX_DIMENSION}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if let Some(bad) = w.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("w entry {bad} is not finite")));
        }
        let q = if q.is_empty() { vec![Rational64::from_integer(0); n * n] } else { q };
        if q.len() != n * n {
            return Err(Error::LengthMismatch { left: n * n, right: q.len() });
        }
        for i in 0..n {
            for j in 0..i {
                if q[i * n + j] != q[j * n + i] {
                    return Err(Error::NotSymmetric(format!(
                        "Q[{i}][{j}] = {} but Q[{j}][{i}] = {}",
                        q[i * n + j],
                        q[j * n + i]
                    )));
                }
            }
        }
        let overflow = || Error::SizeLimit("Q entries too large for exact evaluation".into());
        let q_den = q.iter().try_fold(1i64, |acc, r| {
            let l = acc.lcm(r.denom());
            (l > 0 && l <= i64::MAX / 2).then_some(l).ok_or_else(overflow)
        })?;
        let q_num = q
            .iter()
            .map(|r| r.numer().checked_mul(q_den / r.denom()).ok_or_else(overflow))
            .collect::<Result<Vec<i64>>>()?;
        let bound = q_num.iter().try_fold(0i64, |acc, x| acc.checked_add(x.checked_abs()?));
        if bound.is_none() {
            return Err(overflow());
        }
        Ok(ActionFunctional { n, q, q_num, q_den, w, hbar })
    }

    pub fn zero(n: usize) -> Result<ActionFunctional> {
        Self::new(Vec::new(), vec![0.0; n], 1.0)
    }

    /// Parses lines `hbar <x>`, `w <x1> ... <xn>` and an optional `Q`
    /// followed by `n` rows of `n` rationals. `#` starts a comment.
    pub fn parse(text: &str) -> Result<ActionFunctional> {
        let mut hbar = 1.0;
        let mut w = None;
        let mut rows: Option<Vec<Vec<Rational64>>> = None;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap_or_default();
            match (head, rows.as_mut()) {
                ("hbar", _) => {
                    let v = tokens.next().ok_or_else(|| Error::Parse("hbar needs a value".into()))?;
                    hbar = parse_real(v)?;
                }
                ("w", _) => w = Some(tokens.map(parse_real).collect::<Result<Vec<f64>>>()?),
                ("Q", _) => rows = Some(Vec::new()),
                (_, Some(rows)) => rows.push(line.split_whitespace().map(parse_rational).collect::<Result<_>>()?),
                _ => return Err(Error::Parse(format!("unexpected action line '{line}'"))),
            }
        }
        let w = w.ok_or_else(|| Error::Parse("action needs a 'w' line".into()))?;
        let n = w.len();
        let q = match rows {
            None => Vec::new(),
            Some(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse(format!("Q must have {n} rows of {n} entries")));
                }
                rows.concat()
            }
        };
        Self::new(q, w, hbar)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn q(&self, i: usize, j: usize) -> Rational64 {
        self.q[i * self.n + j]
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn is_zero(&self) -> bool {
        self.q_num.iter().all(|&x| x == 0) && self.w.iter().all(|&x| x == 0.0)
    }

    /// `g^T Q g` for the bit vector whose bit `k-1` is `g_k`, exact.
    pub fn quadratic(&self, mask: u64) -> Rational64 {
        Rational64::new(self.quadratic_numerator(mask), self.q_den)
    }

    fn quadratic_numerator(&self, mask: u64) -> i64 {
        let mut total = 0i64;
        let mut rows = mask;
        while rows != 0 {
            let i = rows.trailing_zeros() as usize;
            rows &= rows - 1;
            let row = &self.q_num[i * self.n..(i + 1) * self.n];
            let mut cols = mask;
            while cols != 0 {
                let j = cols.trailing_zeros() as usize;
                cols &= cols - 1;
                total += row[j];
            }
        }
        total
    }

    fn linear(&self, mask: u64) -> f64 {
        let mut total = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            total += self.w[i];
        }
        total
    }

    /// `S[g]` for a mask; bits at or past `dimension` must be clear.
    pub fn eval_mask(&self, mask: u64) -> f64 {
        self.quadratic_numerator(mask) as f64 / self.q_den as f64 + self.linear(mask)
    }

    /// `S[g] / hbar`.
    pub fn phase(&self, mask: u64) -> f64 {
        self.eval_mask(mask) / self.hbar
    }
}

/// `S[g]` for a word of length `S.dimension`.
pub fn action_eval(s: &ActionFunctional, gamma: &Word) -> Result<f64> {
    if gamma.len() != s.dimension() {
        return Err(Error::LengthMismatch { left: s.dimension(), right: gamma.len() });
    }
    Ok(s.eval_mask(word_mask(gamma.bits())))
}

/// Mask with bit `k-1` set iff `bits[k-1]`.
pub fn word_mask(bits: &[bool]) -> u64 {
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
}

pub fn parse_rational(text: &str) -> Result<Rational64> {
    let bad = || Error::Parse(format!("'{text}' is not a rational"));
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => Ok(Rational64::from_integer(text.trim().parse().map_err(|_| bad())?)),
    }
}

/// A float, or a rational `p/q` converted to float.
pub fn parse_real(text: &str) -> Result<f64> {
    if text.contains('/') {
        let r = parse_rational(text)?;
        return Ok(*r.numer() as f64 / *r.denom() as f64);
    }
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Parse(format!("'{text}' is not a number")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn examples() {
        let zero = ActionFunctional::zero(3).unwrap();
        assert_eq!(action_eval(&zero, &"101".parse().unwrap()).unwrap(), 0.0);
        let lin = ActionFunctional::new(vec![], vec![1.0, 2.0], 1.0).unwrap();
        assert_eq!(action_eval(&lin, &"11".parse().unwrap()).unwrap(), 3.0);
        let quad = ActionFunctional::new(vec![r(1, 1), r(1, 1), r(1, 1), r(0, 1)], vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(action_eval(&quad, &"11".parse().unwrap()).unwrap(), 3.0);
        assert_eq!(action_eval(&quad, &"1".parse().unwrap()).unwrap_err(), Error::LengthMismatch { left: 2, right: 1 });
    }

    #[test]
    fn exact_quadratic() {
        let q = vec![r(1, 3), r(-1, 6), r(-1, 6), r(1, 2)];
        let s = ActionFunctional::new(q, vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(s.quadratic(0b11), r(1, 2));
        assert_eq!(s.quadratic(0b01), r(1, 3));
    }

    #[test]
    fn rejects_bad_input() {
        let asym = vec![r(0, 1), r(1, 1), r(0, 1), r(0, 1)];
        assert_eq!(ActionFunctional::new(asym, vec![0.0; 2], 1.0).unwrap_err().name(), "NotSymmetric");
        assert_eq!(ActionFunctional::new(vec![], vec![1.0], 0.0).unwrap_err().name(), "InvalidParameter");
        assert_eq!(ActionFunctional::new(vec![], vec![], 1.0).unwrap_err(), Error::EmptyInput);
        assert_eq!(ActionFunctional::new(vec![], vec![0.0; 65], 1.0).unwrap_err().name(), "SizeLimit");
    }

    #[test]
    fn parse_text() {
        let s = ActionFunctional::parse("hbar 2\nw 1 2\nQ\n1 1/2\n1/2 0\n").unwrap();
        assert_eq!((s.dimension(), s.hbar()), (2, 2.0));
        assert_eq!(s.q(0, 1), r(1, 2));
        assert_eq!(s.phase(0b11), (1.0 + 1.0 + 3.0) / 2.0);
        assert!(ActionFunctional::parse("hbar 1\n").is_err());
        assert!(ActionFunctional::parse("w 1 2\nQ\n1 0\n").is_err());
        assert_eq!(parse_real("1/4").unwrap(), 0.25);
    }
}
