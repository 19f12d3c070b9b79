use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use crate::arith::{is_prime, prime_factors};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::tower::{Tower, TowerKind};

/// A linear character of a finite abelian group. Values are stored as
/// fractions of a turn in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct Character {
    group: Arc<FiniteGroup>,
    exponents: Vec<usize>,
    turns: Vec<Rational64>,
}

impl Character {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Coordinates of the character against the cyclic basis.
    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    /// `chi(g) = exp(2 pi i turn(g))`.
    pub fn turn(&self, g: usize) -> Rational64 {
        self.turns[g]
    }

    pub fn value(&self, g: usize) -> Complex64 {
        turn_to_complex(self.turns[g])
    }

    pub fn is_trivial(&self) -> bool {
        self.turns.iter().all(Zero::is_zero)
    }

    /// Order of the character in the dual group.
    pub fn order(&self) -> usize {
        self.turns.iter().fold(1, |acc, t| num_integer::lcm(acc, *t.denom() as usize))
    }
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        self.group.same_as(&other.group) && self.turns == other.turns
    }
}

pub fn turn_to_complex(t: Rational64) -> Complex64 {
    let t = t - Rational64::from_integer(t.floor().to_integer());
    // exact at the quarter turns so that trivial sums cancel cleanly
    match (*t.numer(), *t.denom()) {
        (0, _) => Complex64::new(1.0, 0.0),
        (1, 4) => Complex64::new(0.0, 1.0),
        (1, 2) => Complex64::new(-1.0, 0.0),
        (3, 4) => Complex64::new(0.0, -1.0),
        (p, q) => Complex64::from_polar(1.0, TAU * p as f64 / q as f64),
    }
}

fn reduce_turn(t: Rational64) -> Rational64 {
    t - Rational64::from_integer(t.floor().to_integer())
}

/// Cyclic basis of an abelian group: `(generator, order)` pairs, grouped by
/// prime ascending, and the coordinates of every element against it.
#[derive(Clone, Debug)]
pub struct CyclicDecomposition {
    pub basis: Vec<(usize, usize)>,
    pub coords: Vec<Vec<usize>>,
}

pub fn cyclic_decomposition(g: &FiniteGroup) -> Result<CyclicDecomposition> {
    if !g.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let n = g.order();
    let orders: Vec<usize> = (0..n).map(|x| g.element_order(x)).collect();
    let mut basis = Vec::new();
    for p in prime_factors(n) {
        let sylow: Vec<usize> = (0..n).filter(|&x| is_p_power(orders[x], p)).collect();
        let mut span = vec![g.identity()];
        while span.len() < sylow.len() {
            let in_span: std::collections::HashSet<usize> = span.iter().copied().collect();
            // largest order whose cyclic group meets the span only in the identity
            let pick = sylow
                .iter()
                .copied()
                .filter(|&x| (1..orders[x]).all(|e| !in_span.contains(&g.pow(x, e))))
                .max_by(|&a, &b| orders[a].cmp(&orders[b]).then(b.cmp(&a)))
                .ok_or_else(|| Error::InvalidParameter("cyclic decomposition failed".into()))?;
            let mut next = Vec::with_capacity(span.len() * orders[pick]);
            for e in 0..orders[pick] {
                let y = g.pow(pick, e);
                next.extend(span.iter().map(|&s| g.mul(s, y)));
            }
            span = next;
            basis.push((pick, orders[pick]));
        }
    }
    let radices: Vec<usize> = basis.iter().map(|&(_, o)| o).collect();
    let mut coords = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut tuple = vec![0usize; basis.len()];
    loop {
        let x = basis
            .iter()
            .zip(&tuple)
            .fold(g.identity(), |acc, (&(b, _), &e)| g.mul(acc, g.pow(b, e)));
        if seen[x] {
            return Err(Error::InvalidParameter("cyclic basis is not independent".into()));
        }
        seen[x] = true;
        coords[x] = tuple.clone();
        if !advance(&mut tuple, &radices) {
            break;
        }
    }
    Ok(CyclicDecomposition { basis, coords })
}

fn is_p_power(mut m: usize, p: usize) -> bool {
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// Lexicographic successor within the given radices; false after the last tuple.
fn advance(tuple: &mut [usize], radices: &[usize]) -> bool {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if tuple[i] < radices[i] {
            return true;
        }
        tuple[i] = 0;
    }
    false
}

/// All `|G|` characters, ordered lexicographically by exponent tuple.
pub fn characters(g: &Arc<FiniteGroup>) -> Result<Vec<Character>> {
    let dec = cyclic_decomposition(g)?;
    let radices: Vec<usize> = dec.basis.iter().map(|&(_, o)| o).collect();
    let mut out = Vec::with_capacity(g.order());
    let mut exps = vec![0usize; radices.len()];
    loop {
        let turns = dec
            .coords
            .iter()
            .map(|c| {
                let t = c
                    .iter()
                    .zip(&exps)
                    .zip(&radices)
                    .fold(Rational64::zero(), |acc, ((&ci, &ai), &ni)| acc + Rational64::new((ci * ai) as i64, ni as i64));
                reduce_turn(t)
            })
            .collect();
        out.push(Character { group: g.clone(), exponents: exps.clone(), turns });
        if !advance(&mut exps, &radices) {
            break;
        }
    }
    Ok(out)
}

/// Smallest level `k` such that `chi` is constant on the fibers of the
/// projection from the top level to level `k`.
pub fn conductor_level(chi: &Character, tower: &Tower) -> Result<usize> {
    let d = tower.depth();
    if !chi.group.same_as(tower.level(d)?) {
        return Err(Error::GroupMismatch("character is not defined on the top level".into()));
    }
    for k in 0..d {
        let mut first: HashMap<usize, Rational64> = HashMap::new();
        let mut constant = true;
        for x in 0..tower.order(d) {
            let base = tower.project(d, x, k)?;
            if *first.entry(base).or_insert(chi.turns[x]) != chi.turns[x] {
                constant = false;
                break;
            }
        }
        if constant {
            return Ok(k);
        }
    }
    Ok(d)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    Ok(())
}

fn weighted_characters(tower: &Tower, lambda: f64) -> Result<Vec<(Character, f64)>> {
    check_lambda(lambda)?;
    let top = tower.level(tower.depth())?;
    characters(top)?
        .into_iter()
        .map(|chi| {
            let k = conductor_level(&chi, tower)?;
            Ok((chi, (-lambda * k as f64).exp()))
        })
        .collect()
}

/// `Z = sum over characters of exp(-lambda * conductor level)`.
pub fn partition_function(tower: &Tower, lambda: f64) -> Result<f64> {
    Ok(weighted_characters(tower, lambda)?.iter().map(|(_, w)| w).sum())
}

/// Multiplicity of each conductor level among the top-level characters.
pub fn conductor_histogram(tower: &Tower) -> Result<Vec<usize>> {
    let mut counts = vec![0; tower.depth() + 1];
    for chi in characters(tower.level(tower.depth())?)? {
        counts[conductor_level(&chi, tower)?] += 1;
    }
    Ok(counts)
}

/// `<alpha_q1 ... alpha_qm> = (1/Z) sum_chi prod_j chi(Frob_qj) exp(-lambda level(chi))`
/// on a cyclotomic tower.
pub fn frobenius_correlation(tower: &Tower, primes: &[u64], lambda: f64) -> Result<Complex64> {
    let TowerKind::Cyclotomic { p } = tower.kind() else {
        return Err(Error::KindMismatch(format!(
            "Frobenius correlations need a cyclotomic tower, not {}",
            tower.kind().name()
        )));
    };
    let top = tower.level(tower.depth())?;
    let modulus = (p as usize).pow(tower.depth() as u32);
    let mut frobs = Vec::with_capacity(primes.len());
    for &q in primes {
        if !is_prime(q) {
            return Err(Error::InvalidParameter(format!("{q} is not prime")));
        }
        if q == p {
            return Err(Error::Ramified { p, q });
        }
        let index = top
            .index_of_residue((q % modulus as u64) as usize)
            .ok_or(Error::Ramified { p, q })?;
        frobs.push(index);
    }
    let weighted = weighted_characters(tower, lambda)?;
    let z: f64 = weighted.iter().map(|(_, w)| w).sum();
    let total = weighted.iter().fold(Complex64::new(0.0, 0.0), |acc, (chi, w)| {
        let turn = frobs.iter().fold(Rational64::zero(), |t, &f| t + chi.turn(f));
        acc + turn_to_complex(turn) * *w
    });
    Ok(total / z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, GroupSpec};
    use crate::tower::{make_tower, TowerSpec};

    fn units(n: usize) -> Arc<FiniteGroup> {
        make_group(&GroupSpec::Units(n)).unwrap()
    }

    fn tower(line: &str) -> Arc<Tower> {
        make_tower(&TowerSpec::parse_line(line).unwrap()).unwrap()
    }

    #[test]
    fn trivial_group() {
        let chars = characters(&units(2)).unwrap();
        assert_eq!(chars.len(), 1);
        assert!(chars[0].is_trivial());
    }

    #[test]
    fn units_five() {
        let g = units(5);
        let chars = characters(&g).unwrap();
        assert_eq!(chars.len(), 4);
        for chi in &chars {
            assert_eq!(chi.value(g.identity()), Complex64::new(1.0, 0.0));
            assert_eq!(4 % chi.order(), 0);
            if !chi.is_trivial() {
                let s: Complex64 = (0..4).map(|x| chi.value(x)).sum();
                assert!(s.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn homomorphism_law() {
        let g = units(16);
        for chi in characters(&g).unwrap() {
            for a in 0..g.order() {
                for b in 0..g.order() {
                    assert_eq!(reduce_turn(chi.turn(a) + chi.turn(b)), chi.turn(g.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn decomposition_by_prime() {
        // (Z/21)^x = Z2 x Z6 = Z2 x Z2 x Z3
        let dec = cyclic_decomposition(&units(21)).unwrap();
        let orders: Vec<usize> = dec.basis.iter().map(|&(_, o)| o).collect();
        assert_eq!(orders, vec![2, 2, 3]);
        let gl = make_group(&GroupSpec::Gl2 { k: 1 }).unwrap();
        assert_eq!(characters(&gl).unwrap_err(), Error::NotAbelian);
    }

    #[test]
    fn conductor_levels() {
        let t = tower("cyclotomic p=3 depth=2");
        let chars = characters(t.level(2).unwrap()).unwrap();
        let levels: Vec<usize> = chars.iter().map(|c| conductor_level(c, &t).unwrap()).collect();
        assert_eq!(levels.iter().filter(|&&l| l == 0).count(), 1);
        assert_eq!(levels.iter().filter(|&&l| l == 1).count(), 1);
        assert_eq!(levels.iter().filter(|&&l| l == 2).count(), 4);
        assert_eq!(conductor_histogram(&t).unwrap(), vec![1, 1, 4]);
        let other = characters(&units(7)).unwrap();
        assert_eq!(conductor_level(&other[1], &t).unwrap_err().name(), "GroupMismatch");
    }

    #[test]
    fn partition_values() {
        let t = tower("cyclotomic p=3 depth=2");
        assert!((partition_function(&t, 2f64.ln()).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(partition_function(&t, 0.0).unwrap(), 6.0);
        assert!(partition_function(&t, -1.0).is_err());
        assert_eq!(partition_function(&tower("cyclotomic p=2 depth=1"), 1.0).unwrap(), 1.0);
    }

    #[test]
    fn correlations() {
        let t = tower("cyclotomic p=5 depth=1");
        assert_eq!(frobenius_correlation(&t, &[], 0.3).unwrap(), Complex64::new(1.0, 0.0));
        assert!(frobenius_correlation(&t, &[2], 0.0).unwrap().norm() < 1e-12);
        assert!((frobenius_correlation(&t, &[11], 0.0).unwrap() - 1.0).norm() < 1e-12);
        assert_eq!(frobenius_correlation(&t, &[5], 0.0).unwrap_err(), Error::Ramified { p: 5, q: 5 });
        let b = tower("binary depth=2");
        assert_eq!(frobenius_correlation(&b, &[3], 0.0).unwrap_err().name(), "KindMismatch");
    }
}
