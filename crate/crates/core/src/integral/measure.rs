use std::sync::Arc;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::tower::{Cylinder, Tower};

/// Deepest implicit Cantor space; level masses `2^-k` must fit in an `i64` ratio.
pub const MAX_CANTOR_DEPTH: usize = 62;

/// Uniform (Haar) cylinder measure.
///
/// `Tower` measures live on a built tower. `Cantor` is the binary tower
/// `{0,1}^depth` without its Cayley tables, for depths whose top level
/// would exceed the group size budget.
#[derive(Clone, Debug)]
pub enum CylinderMeasure {
    Tower(Arc<Tower>),
    Cantor { depth: usize },
}

pub fn haar_measure(tower: &Arc<Tower>) -> CylinderMeasure {
    CylinderMeasure::Tower(tower.clone())
}

impl CylinderMeasure {
    pub fn cantor(depth: usize) -> Result<CylinderMeasure> {
        if depth == 0 || depth > MAX_CANTOR_DEPTH {
            return Err(Error::SizeLimit(format!("Cantor depth must be in 1..={MAX_CANTOR_DEPTH}")));
        }
        Ok(CylinderMeasure::Cantor { depth })
    }

    pub fn depth(&self) -> usize {
        match self {
            CylinderMeasure::Tower(t) => t.depth(),
            CylinderMeasure::Cantor { depth } => *depth,
        }
    }

    /// Number of level-`k` cylinders; `1` at level 0.
    pub fn level_size(&self, k: usize) -> Result<u64> {
        if k > self.depth() {
            return Err(Error::LevelOrder(format!("level {k} outside 0..={}", self.depth())));
        }
        Ok(match self {
            CylinderMeasure::Tower(t) => t.order(k) as u64,
            CylinderMeasure::Cantor { .. } => 1u64 << k,
        })
    }

    /// Mass of a single level-`k` cylinder.
    pub fn point_mass(&self, k: usize) -> Result<Rational64> {
        Ok(Rational64::new(1, self.level_size(k)? as i64))
    }

    pub fn cylinder_mass(&self, z: &Cylinder) -> Result<Rational64> {
        match self {
            CylinderMeasure::Tower(t) if t.same_as(z.tower()) => self.point_mass(z.level()),
            _ => Err(Error::TowerMismatch),
        }
    }

    /// Mass of the binary prefix cylinder `[w]`.
    pub fn prefix_mass(&self, prefix_len: usize) -> Result<Rational64> {
        match self {
            CylinderMeasure::Cantor { .. } => self.point_mass(prefix_len),
            CylinderMeasure::Tower(_) => Err(Error::KindMismatch("prefix cylinders need a Cantor measure".into())),
        }
    }

    /// Total mass of level `k + 1` lying over `base` at level `k`.
    pub fn fiber_mass(&self, k: usize, base: usize) -> Result<Rational64> {
        let mass = self.point_mass(k + 1)?;
        let count = match self {
            CylinderMeasure::Tower(t) => t.fiber(k, base).len(),
            CylinderMeasure::Cantor { .. } => 2,
        };
        Ok((0..count).fold(Rational64::from_integer(0), |acc, _| acc + mass))
    }

    pub fn total_mass(&self, k: usize) -> Result<Rational64> {
        let size = self.level_size(k)?;
        let mass = self.point_mass(k)?;
        Ok(mass * Rational64::from_integer(size as i64))
    }
}

pub fn cylinder_mass(mu: &CylinderMeasure, z: &Cylinder) -> Result<Rational64> {
    mu.cylinder_mass(z)
}

/// Levels `k` where some fiber mass differs from the mass of its base point
/// or the total mass is not 1. Empty for every valid tower.
pub fn compatibility_failures(mu: &CylinderMeasure) -> Result<Vec<usize>> {
    let one = Rational64::from_integer(1);
    let mut bad = Vec::new();
    for k in 0..mu.depth() {
        let bases = match mu {
            CylinderMeasure::Tower(_) => mu.level_size(k)? as usize,
            // every Cantor fiber looks the same
            CylinderMeasure::Cantor { .. } => 1,
        };
        let base_mass = mu.point_mass(k)?;
        let ok = (0..bases).all(|b| mu.fiber_mass(k, b).map(|m| m == base_mass).unwrap_or(false));
        if !ok || mu.total_mass(k + 1)? != one {
            bad.push(k);
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{make_tower, TowerSpec};

    fn tower(line: &str) -> Arc<Tower> {
        make_tower(&TowerSpec::parse_line(line).unwrap()).unwrap()
    }

    #[test]
    fn masses() {
        let t = tower("cyclotomic p=3 depth=2");
        let mu = haar_measure(&t);
        assert_eq!(mu.cylinder_mass(&Cylinder::whole(&t)).unwrap(), Rational64::from_integer(1));
        assert_eq!(mu.cylinder_mass(&Cylinder::new(&t, 1, 1).unwrap()).unwrap(), Rational64::new(1, 2));
        assert_eq!(mu.point_mass(2).unwrap(), Rational64::new(1, 6));
        let b = tower("binary depth=3");
        assert_eq!(haar_measure(&b).cylinder_mass(&Cylinder::new(&b, 3, 5).unwrap()).unwrap(), Rational64::new(1, 8));
        assert_eq!(mu.cylinder_mass(&Cylinder::whole(&b)).unwrap_err(), Error::TowerMismatch);
    }

    #[test]
    fn cantor_measure() {
        let mu = CylinderMeasure::cantor(24).unwrap();
        assert_eq!(mu.prefix_mass(3).unwrap(), Rational64::new(1, 8));
        assert!(compatibility_failures(&mu).unwrap().is_empty());
        assert!(CylinderMeasure::cantor(63).is_err());
    }

    #[test]
    fn compatible() {
        for line in ["binary depth=4", "cyclotomic p=3 depth=3", "aut_f2ab depth=2"] {
            assert!(compatibility_failures(&haar_measure(&tower(line))).unwrap().is_empty());
        }
    }
}
