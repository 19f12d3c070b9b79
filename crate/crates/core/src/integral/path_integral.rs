use std::thread;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::action::ActionFunctional;
use super::measure::CylinderMeasure;
use crate::error::{Error, Result};
use crate::matrioshka::{build_partition_tree, EncodingConvention};

/// Largest depth summed exhaustively.
pub const MAX_EXACT_DEPTH: usize = 24;

/// Environment variable holding the worker count (default 1).
pub const WORKERS_ENV: &str = "PROFINITE_WORKERS";

pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ResultMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64, stderr: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathIntegralResult {
    pub value: Complex64,
    pub depth: usize,
    /// `|I_n - I_{n-1}|` with `I_0 = 1`; exact mode only.
    pub delta_prev: Option<f64>,
    pub mode: ResultMode,
}

/// The level-`n` cylinders of `mu` as action masks. For Cantor measures
/// the mask is the prefix itself; for towers it is the partition code,
/// padded on the right with zeros.
fn cylinder_masks(mu: &CylinderMeasure, s: &ActionFunctional, n: usize) -> Result<Option<Vec<u64>>> {
    match mu {
        CylinderMeasure::Cantor { .. } => {
            if s.dimension() < n {
                return Err(Error::LengthMismatch { left: s.dimension(), right: n });
            }
            Ok(None)
        }
        CylinderMeasure::Tower(t) => {
            let tree = build_partition_tree(t, &EncodingConvention::default())?;
            let need = tree.max_code_len(n);
            if s.dimension() < need {
                return Err(Error::LengthMismatch { left: s.dimension(), right: need });
            }
            Ok(Some(
                (0..t.order(n))
                    .map(|x| super::action::word_mask(tree.code_at_level(n, x)))
                    .collect(),
            ))
        }
    }
}

fn check_depth(mu: &CylinderMeasure, n: usize) -> Result<()> {
    if n == 0 || n > mu.depth() {
        return Err(Error::LevelOrder(format!("depth {n} outside 1..={}", mu.depth())));
    }
    Ok(())
}

pub fn path_integral(mu: &CylinderMeasure, s: &ActionFunctional, mode: Mode, n: usize) -> Result<PathIntegralResult> {
    path_integral_with_workers(mu, s, mode, n, workers_from_env())
}

pub fn path_integral_with_workers(
    mu: &CylinderMeasure,
    s: &ActionFunctional,
    mode: Mode,
    n: usize,
    workers: usize,
) -> Result<PathIntegralResult> {
    check_depth(mu, n)?;
    let workers = workers.max(1);
    match mode {
        Mode::Exact => {
            if n > MAX_EXACT_DEPTH {
                return Err(Error::SizeLimit(format!("exact summation limited to depth {MAX_EXACT_DEPTH}")));
            }
            let value = exact_sum(mu, s, n, workers)?;
            let prev = if n == 1 { Complex64::new(1.0, 0.0) } else { exact_sum(mu, s, n - 1, workers)? };
            Ok(PathIntegralResult {
                value,
                depth: n,
                delta_prev: Some((value - prev).norm()),
                mode: ResultMode::Exact,
            })
        }
        Mode::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::InvalidParameter("Monte Carlo needs at least 2 samples".into()));
            }
            let masks = cylinder_masks(mu, s, n)?;
            let count = mu.level_size(n)?;
            let stats = monte_carlo(s, masks.as_deref(), count, samples, seed, workers);
            Ok(PathIntegralResult {
                value: stats.mean,
                depth: n,
                delta_prev: None,
                mode: ResultMode::MonteCarlo { samples, seed, stderr: stats.stderr() },
            })
        }
    }
}

fn exact_sum(mu: &CylinderMeasure, s: &ActionFunctional, n: usize, workers: usize) -> Result<Complex64> {
    let masks = cylinder_masks(mu, s, n)?;
    let count = mu.level_size(n)? as usize;
    let phase = |i: usize| {
        let mask = match &masks {
            Some(m) => m[i],
            None => i as u64,
        };
        Complex64::from_polar(1.0, s.phase(mask))
    };
    let total = balanced_sum(0, count, workers, &phase);
    // Haar: every cylinder has mass 1/count
    Ok(total / count as f64)
}

fn pairwise<F: Fn(usize) -> Complex64>(lo: usize, hi: usize, f: &F) -> Complex64 {
    if hi - lo == 1 {
        return f(lo);
    }
    let mid = lo + (hi - lo) / 2;
    pairwise(lo, mid, f) + pairwise(mid, hi, f)
}

/// Pairwise sum of `f` over `lo..hi`. Workers each reduce whole subtrees of
/// the same tree, so the result does not depend on `workers`.
pub fn balanced_sum<F: Fn(usize) -> Complex64 + Sync>(lo: usize, hi: usize, workers: usize, f: &F) -> Complex64 {
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    if workers <= 1 {
        return pairwise(lo, hi, f);
    }
    let split_depth = usize::BITS as usize - (workers - 1).leading_zeros() as usize + 1;
    let mut ranges = Vec::new();
    collect_ranges(lo, hi, split_depth, &mut ranges);
    let mut partial = vec![Complex64::new(0.0, 0.0); ranges.len()];
    thread::scope(|scope| {
        let chunk = ranges.len().div_ceil(workers);
        for (rs, out) in ranges.chunks(chunk).zip(partial.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (&(a, b), slot) in rs.iter().zip(out.iter_mut()) {
                    *slot = pairwise(a, b, f);
                }
            });
        }
    });
    let mut next = partial.into_iter();
    combine(lo, hi, split_depth, &mut next)
}

fn collect_ranges(lo: usize, hi: usize, depth: usize, out: &mut Vec<(usize, usize)>) {
    if depth == 0 || hi - lo == 1 {
        out.push((lo, hi));
        return;
    }
    let mid = lo + (hi - lo) / 2;
    collect_ranges(lo, mid, depth - 1, out);
    collect_ranges(mid, hi, depth - 1, out);
}

fn combine(lo: usize, hi: usize, depth: usize, parts: &mut impl Iterator<Item = Complex64>) -> Complex64 {
    if depth == 0 || hi - lo == 1 {
        return parts.next().expect("one partial sum per range");
    }
    let mid = lo + (hi - lo) / 2;
    let left = combine(lo, mid, depth - 1, parts);
    left + combine(mid, hi, depth - 1, parts)
}

/// Running mean and `sum |x - mean|^2` of complex samples.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Welford {
    pub count: u64,
    pub mean: Complex64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: Complex64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += (delta.conj() * (x - self.mean)).re;
    }

    /// Pools two disjoint sample sets.
    pub fn merge(&self, other: &Welford) -> Welford {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        Welford {
            count,
            mean: self.mean + delta * (nb / count as f64),
            m2: self.m2 + other.m2 + delta.norm_sqr() * na * nb / count as f64,
        }
    }

    /// Standard error of the mean, `sqrt(m2 / (N - 1) / N)`.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        let n = self.count as f64;
        (self.m2 / (n - 1.0) / n).sqrt()
    }
}

fn monte_carlo(s: &ActionFunctional, masks: Option<&[u64]>, count: u64, samples: u64, seed: u64, workers: usize) -> Welford {
    let workers = (workers as u64).min(samples) as usize;
    let run = |w: usize| {
        let share = samples / workers as u64 + u64::from((w as u64) < samples % workers as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(w as u64);
        let mut acc = Welford::default();
        for _ in 0..share {
            let i = rng.random_range(0..count);
            let mask = masks.map_or(i, |m| m[i as usize]);
            acc.push(Complex64::from_polar(1.0, s.phase(mask)));
        }
        acc
    };
    if workers == 1 {
        return run(0);
    }
    let parts: Vec<Welford> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers).map(|w| scope.spawn(move || run(w))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    parts.iter().fold(Welford::default(), |acc, p| acc.merge(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{make_tower, TowerSpec};
    use std::f64::consts::PI;

    fn linear(w: Vec<f64>) -> ActionFunctional {
        ActionFunctional::new(vec![], w, 1.0).unwrap()
    }

    #[test]
    fn normalization() {
        let mu = CylinderMeasure::cantor(12).unwrap();
        let r = path_integral_with_workers(&mu, &ActionFunctional::zero(12).unwrap(), Mode::Exact, 12, 1).unwrap();
        assert_eq!(r.value, Complex64::new(1.0, 0.0));
        assert_eq!(r.delta_prev, Some(0.0));
    }

    #[test]
    fn one_bit_examples() {
        let mu = CylinderMeasure::cantor(1).unwrap();
        let r = path_integral_with_workers(&mu, &linear(vec![PI]), Mode::Exact, 1, 1).unwrap();
        assert!(r.value.norm() < 1e-15);
        let r = path_integral_with_workers(&mu, &linear(vec![PI / 2.0]), Mode::Exact, 1, 1).unwrap();
        assert!((r.value - Complex64::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn workers_do_not_change_the_sum() {
        let w: Vec<f64> = (0..13).map(|k| 0.37 * k as f64 + 0.1).collect();
        let mu = CylinderMeasure::cantor(13).unwrap();
        let s = linear(w);
        let one = path_integral_with_workers(&mu, &s, Mode::Exact, 13, 1).unwrap();
        for workers in [2, 3, 4, 7, 16] {
            let many = path_integral_with_workers(&mu, &s, Mode::Exact, 13, workers).unwrap();
            assert_eq!(one.value.re.to_bits(), many.value.re.to_bits());
            assert_eq!(one.value.im.to_bits(), many.value.im.to_bits());
        }
    }

    #[test]
    fn tower_integral_uses_codes() {
        // level 1 of cyclotomic(3) has codes 0 and 1
        let t = make_tower(&TowerSpec::parse_line("cyclotomic p=3 depth=2").unwrap()).unwrap();
        let mu = CylinderMeasure::Tower(t);
        let r = path_integral_with_workers(&mu, &linear(vec![PI, 0.0, 0.0]), Mode::Exact, 1, 1).unwrap();
        assert!(r.value.norm() < 1e-15);
        let short = linear(vec![0.0, 0.0]);
        assert_eq!(
            path_integral_with_workers(&mu, &short, Mode::Exact, 2, 1).unwrap_err(),
            Error::LengthMismatch { left: 2, right: 3 }
        );
    }

    #[test]
    fn limits() {
        let mu = CylinderMeasure::cantor(30).unwrap();
        let s = ActionFunctional::zero(30).unwrap();
        assert_eq!(path_integral_with_workers(&mu, &s, Mode::Exact, 25, 1).unwrap_err().name(), "SizeLimit");
        assert_eq!(path_integral_with_workers(&mu, &s, Mode::Exact, 31, 1).unwrap_err().name(), "LevelOrder");
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let mu = CylinderMeasure::cantor(8).unwrap();
        let s = linear((0..8).map(|k| k as f64 * 0.3).collect());
        let mode = Mode::MonteCarlo { samples: 20_000, seed: 7 };
        let a = path_integral_with_workers(&mu, &s, mode, 8, 3).unwrap();
        let b = path_integral_with_workers(&mu, &s, mode, 8, 3).unwrap();
        assert_eq!(a, b);
        let exact = path_integral_with_workers(&mu, &s, Mode::Exact, 8, 1).unwrap();
        let ResultMode::MonteCarlo { stderr, .. } = a.mode else { panic!("wrong mode") };
        assert!((a.value - exact.value).norm() < 4.0 * stderr);
    }

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<Complex64> = (0..50).map(|i| Complex64::from_polar(1.0, i as f64 * 0.7)).collect();
        let mut all = Welford::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Welford::default(), Welford::default());
        xs[..17].iter().for_each(|&x| a.push(x));
        xs[17..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(&b);
        assert!((merged.mean - all.mean).norm() < 1e-14);
        assert!((merged.m2 - all.m2).abs() < 1e-12);
    }
}
