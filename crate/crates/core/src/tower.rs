//! Inverse systems of finite groups `G_1 <- G_2 <- ... <- G_d` with
//! surjective bonds, their coherent elements and coset cylinders.
//!
//! Levels are numbered from 1; level 0 stands for the whole space.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::group::{make_group, FiniteGroup, GroupElement, GroupSpec, Homomorphism, Structure, MAX_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TowerKind {
    /// `({0,1}^k, xor)`, bonds drop the last coordinate.
    Binary,
    /// `Z/p^k`, bonds reduce mod `p^k`.
    Padic { p: u64 },
    /// `(Z/p^k)^x`, bonds reduce mod `p^k`.
    Cyclotomic { p: u64 },
    /// `(Z/2^k)^2`, the abelianised free group on two generators mod `2^k`.
    F2Ab,
    /// `GL(2, Z/2^k)`, automorphisms of the previous kind's levels.
    AutF2Ab,
    Custom,
}

impl TowerKind {
    pub fn name(&self) -> &'static str {
        match self {
            TowerKind::Binary => "binary",
            TowerKind::Padic { .. } => "padic",
            TowerKind::Cyclotomic { .. } => "cyclotomic",
            TowerKind::F2Ab => "f2ab",
            TowerKind::AutF2Ab => "aut_f2ab",
            TowerKind::Custom => "custom",
        }
    }
}

/// Explicit levels and bonds of a custom tower. `bonds[k-1]` maps level
/// `k+1` onto level `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CustomLevels {
    pub groups: Vec<GroupSpec>,
    pub bonds: Vec<Vec<usize>>,
}

/// Everything needed to rebuild a tower.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerSpec {
    pub kind: TowerKind,
    pub depth: usize,
    pub custom: Option<CustomLevels>,
}

impl TowerSpec {
    pub fn new(kind: TowerKind, depth: usize) -> TowerSpec {
        TowerSpec { kind, depth, custom: None }
    }

    pub fn custom(groups: Vec<GroupSpec>, bonds: Vec<Vec<usize>>) -> TowerSpec {
        TowerSpec {
            kind: TowerKind::Custom,
            depth: groups.len(),
            custom: Some(CustomLevels { groups, bonds }),
        }
    }

    /// Parses the one-line form `tower <kind> [p=<p>] depth=<d>`; the
    /// leading `tower` keyword is optional.
    pub fn parse_line(line: &str) -> Result<TowerSpec> {
        let mut tokens = line.split_whitespace().peekable();
        if tokens.peek() == Some(&"tower") {
            tokens.next();
        }
        let kind_name = tokens
            .next()
            .ok_or_else(|| Error::Parse("tower spec needs a kind".into()))?;
        let mut p = None;
        let mut depth = None;
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{tok}'")))?;
            let parsed: u64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("bad value in '{tok}'")))?;
            match key {
                "p" => p = Some(parsed),
                "depth" => depth = Some(parsed as usize),
                _ => return Err(Error::Parse(format!("unknown tower key '{key}'"))),
            }
        }
        let depth = depth.ok_or_else(|| Error::Parse("tower spec needs depth=<d>".into()))?;
        let need_p = || p.ok_or_else(|| Error::Parse(format!("tower kind '{kind_name}' needs p=<p>")));
        let kind = match kind_name {
            "binary" => TowerKind::Binary,
            "padic" => TowerKind::Padic { p: need_p()? },
            "cyclotomic" => TowerKind::Cyclotomic { p: need_p()? },
            "f2ab" => TowerKind::F2Ab,
            "aut_f2ab" => TowerKind::AutF2Ab,
            "custom" => TowerKind::Custom,
            other => return Err(Error::Parse(format!("unknown tower kind '{other}'"))),
        };
        if p.is_some() && !matches!(kind, TowerKind::Padic { .. } | TowerKind::Cyclotomic { .. }) {
            return Err(Error::Parse(format!("tower kind '{kind_name}' takes no p=")));
        }
        Ok(TowerSpec { kind, depth, custom: None })
    }

    /// Parses a tower file: the header line, then for custom towers one
    /// group spec per level followed by `bond <k>: i0 i1 ...` lines.
    pub fn parse_file(text: &str, base_dir: Option<&Path>) -> Result<TowerSpec> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty tower file".into()))?;
        let mut spec = Self::parse_line(header)?;
        if spec.kind != TowerKind::Custom {
            if let Some(extra) = lines.next() {
                return Err(Error::Parse(format!("unexpected line after tower header: '{extra}'")));
            }
            return Ok(spec);
        }
        let mut groups = Vec::new();
        let mut bonds: Vec<Option<Vec<usize>>> = Vec::new();
        for line in lines {
            if let Some(rest) = line.strip_prefix("bond") {
                let (k, images) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("bond line needs ':' in '{line}'")))?;
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad bond index in '{line}'")))?;
                let images = images
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad bond image '{t}'"))))
                    .collect::<Result<Vec<_>>>()?;
                if k == 0 {
                    return Err(Error::Parse("bonds are numbered from 1".into()));
                }
                if bonds.len() < k {
                    bonds.resize(k, None);
                }
                bonds[k - 1] = Some(images);
            } else {
                if !bonds.is_empty() {
                    return Err(Error::Parse(format!("group line after bond lines: '{line}'")));
                }
                groups.push(GroupSpec::parse_in(line, base_dir)?);
            }
        }
        if groups.len() != spec.depth {
            return Err(Error::Parse(format!(
                "custom tower declares depth={} but lists {} groups",
                spec.depth,
                groups.len()
            )));
        }
        let bonds = bonds
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| Error::Parse(format!("missing bond {}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        if bonds.len() + 1 != groups.len().max(1) {
            return Err(Error::Parse(format!("expected {} bond lines", groups.len().saturating_sub(1))));
        }
        spec.custom = Some(CustomLevels { groups, bonds });
        Ok(spec)
    }

    /// The full file form; identical to the header line except for custom towers.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{self}\n");
        if let Some(c) = &self.custom {
            for g in &c.groups {
                out.push_str(&format!("{g}\n"));
            }
            for (i, b) in c.bonds.iter().enumerate() {
                let images: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                out.push_str(&format!("bond {}: {}\n", i + 1, images.join(" ")));
            }
        }
        out
    }

    fn with_depth(&self, depth: usize) -> TowerSpec {
        let custom = self.custom.as_ref().map(|c| CustomLevels {
            groups: c.groups[..depth].to_vec(),
            bonds: c.bonds[..depth.saturating_sub(1)].to_vec(),
        });
        TowerSpec { kind: self.kind, depth, custom }
    }
}

impl fmt::Display for TowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tower {}", self.kind.name())?;
        if let TowerKind::Padic { p } | TowerKind::Cyclotomic { p } = self.kind {
            write!(f, " p={p}")?;
        }
        write!(f, " depth={}", self.depth)
    }
}

/// A finite truncation of a profinite group.
#[derive(Debug)]
pub struct Tower {
    spec: TowerSpec,
    levels: Vec<Arc<FiniteGroup>>,
    bonds: Vec<Homomorphism>,
    /// `fibers[k][b]`: level-`(k+1)` elements over the level-`k` element `b`,
    /// ascending. `fibers[0][0]` is the whole of level 1.
    fibers: Vec<Vec<Vec<usize>>>,
}

pub fn make_tower(spec: &TowerSpec) -> Result<Arc<Tower>> {
    Tower::build(spec).map(Arc::new)
}

fn top_order(kind: TowerKind, depth: usize) -> Option<u128> {
    let d = u32::try_from(depth).ok()?;
    match kind {
        TowerKind::Binary => 2u128.checked_pow(d),
        TowerKind::Padic { p } => (p as u128).checked_pow(d),
        TowerKind::Cyclotomic { p } => (p as u128).checked_pow(d - 1).map(|x| x * (p as u128 - 1)),
        TowerKind::F2Ab => 4u128.checked_pow(d),
        TowerKind::AutF2Ab => 16u128.checked_pow(d - 1).map(|x| 6 * x),
        TowerKind::Custom => Some(0),
    }
}

impl Tower {
    fn build(spec: &TowerSpec) -> Result<Tower> {
        if spec.depth == 0 {
            return Err(Error::InvalidParameter("tower depth must be >= 1".into()));
        }
        if let TowerKind::Padic { p } | TowerKind::Cyclotomic { p } = spec.kind {
            if !is_prime(p) {
                return Err(Error::InvalidParameter(format!("p={p} is not prime")));
            }
        }
        match top_order(spec.kind, spec.depth) {
            Some(n) if n <= MAX_ORDER as u128 => {}
            _ => {
                return Err(Error::SizeLimit(format!(
                    "{spec} has top-level order above {MAX_ORDER}"
                )))
            }
        }
        let d = spec.depth;
        if spec.kind == TowerKind::Custom {
            let c = spec
                .custom
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("custom tower without levels".into()))?;
            let groups = c.groups.iter().map(make_group).collect::<Result<Vec<_>>>()?;
            return Self::from_levels(spec.clone(), groups, c.bonds.clone(), true);
        }
        let levels = (1..=d)
            .map(|k| {
                let k32 = k as u32;
                let g = match spec.kind {
                    TowerKind::Binary => GroupSpec::Bits(k),
                    TowerKind::Padic { p } => GroupSpec::Cyclic(p.pow(k32) as usize),
                    TowerKind::Cyclotomic { p } => GroupSpec::Units(p.pow(k32) as usize),
                    TowerKind::F2Ab => {
                        let c = GroupSpec::Cyclic(1 << k);
                        GroupSpec::Product(Box::new(c.clone()), Box::new(c))
                    }
                    TowerKind::AutF2Ab => GroupSpec::Gl2 { k: k32 },
                    TowerKind::Custom => unreachable!(),
                };
                make_group(&g)
            })
            .collect::<Result<Vec<_>>>()?;
        let bonds = (1..d)
            .map(|k| reduction_map(&levels[k], &levels[k - 1]))
            .collect::<Result<Vec<_>>>()?;
        Self::from_levels(spec.clone(), levels, bonds, true)
    }

    /// A custom tower from explicit groups and bond image lists.
    pub fn custom(groups: Vec<Arc<FiniteGroup>>, bonds: Vec<Vec<usize>>) -> Result<Arc<Tower>> {
        let spec = TowerSpec::custom(groups.iter().map(|g| g.spec().clone()).collect(), bonds.clone());
        Self::from_levels(spec, groups, bonds, true).map(Arc::new)
    }

    /// Like [`Tower::custom`] but without the homomorphism and surjectivity
    /// checks, so that broken systems can be fed to [`validate_tower`].
    pub fn custom_unchecked(groups: Vec<Arc<FiniteGroup>>, bonds: Vec<Vec<usize>>) -> Result<Arc<Tower>> {
        let spec = TowerSpec::custom(groups.iter().map(|g| g.spec().clone()).collect(), bonds.clone());
        Self::from_levels(spec, groups, bonds, false).map(Arc::new)
    }

    fn from_levels(spec: TowerSpec, levels: Vec<Arc<FiniteGroup>>, images: Vec<Vec<usize>>, check: bool) -> Result<Tower> {
        if levels.is_empty() {
            return Err(Error::InvalidParameter("tower needs at least one level".into()));
        }
        if images.len() + 1 != levels.len() {
            return Err(Error::LengthMismatch { left: levels.len() - 1, right: images.len() });
        }
        if let Some(top) = levels.last() {
            if top.order() > MAX_ORDER {
                return Err(Error::SizeLimit(format!("top-level order above {MAX_ORDER}")));
            }
        }
        let mut bonds = Vec::with_capacity(images.len());
        for (k, image) in images.into_iter().enumerate() {
            let (src, dst) = (levels[k + 1].clone(), levels[k].clone());
            let hom = if check {
                let hom = Homomorphism::new(src, dst, image)?;
                if !hom.is_surjective() {
                    return Err(Error::BondNotSurjective { bond: k + 1 });
                }
                hom
            } else {
                Homomorphism::unchecked(src, dst, image)?
            };
            bonds.push(hom);
        }
        let mut fibers = vec![vec![(0..levels[0].order()).collect::<Vec<_>>()]];
        for (k, bond) in bonds.iter().enumerate() {
            let mut f = vec![Vec::new(); levels[k].order()];
            for (x, &b) in bond.image().iter().enumerate() {
                f[b].push(x);
            }
            fibers.push(f);
        }
        Ok(Tower { spec, levels, bonds, fibers })
    }

    pub fn spec(&self) -> &TowerSpec {
        &self.spec
    }

    pub fn kind(&self) -> TowerKind {
        self.spec.kind
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// The group at level `k`, `1 <= k <= depth`.
    pub fn level(&self, k: usize) -> Result<&Arc<FiniteGroup>> {
        self.check_level(k)?;
        Ok(&self.levels[k - 1])
    }

    /// Order of level `k`; level 0 has a single point.
    pub fn order(&self, k: usize) -> usize {
        if k == 0 {
            1
        } else {
            self.levels[k - 1].order()
        }
    }

    pub fn orders(&self) -> Vec<usize> {
        self.levels.iter().map(|g| g.order()).collect()
    }

    /// The bond `G_{k+1} -> G_k`, `1 <= k < depth`.
    pub fn bond(&self, k: usize) -> Result<&Homomorphism> {
        if k == 0 || k >= self.depth() {
            return Err(Error::LevelOrder(format!("no bond {k} in a depth-{} tower", self.depth())));
        }
        Ok(&self.bonds[k - 1])
    }

    pub fn bonds(&self) -> &[Homomorphism] {
        &self.bonds
    }

    /// Level-`(k+1)` elements lying over `base` at level `k`, ascending.
    /// `k = 0` gives all of level 1.
    pub fn fiber(&self, k: usize, base: usize) -> &[usize] {
        &self.fibers[k][base]
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.depth() {
            Err(Error::LevelOrder(format!("level {k} outside 1..={}", self.depth())))
        } else {
            Ok(())
        }
    }

    /// Composite of bonds from level `j` down to level `i <= j`.
    pub fn project(&self, j: usize, index: usize, i: usize) -> Result<usize> {
        self.check_level(j)?;
        if i > j {
            return Err(Error::LevelOrder(format!("cannot project level {j} up to level {i}")));
        }
        if index >= self.order(j) {
            return Err(Error::InvalidParameter(format!("index {index} out of range at level {j}")));
        }
        if i == 0 {
            return Ok(0);
        }
        let mut x = index;
        for k in (i..j).rev() {
            x = self.bonds[k - 1].apply(x);
        }
        Ok(x)
    }

    /// [`Tower::project`] on a group element, which must belong to level `j`.
    pub fn project_element(&self, g: &GroupElement, j: usize, i: usize) -> Result<GroupElement> {
        self.check_level(j)?;
        if !g.group().same_as(&self.levels[j - 1]) {
            return Err(Error::GroupMismatch(format!("element is not in level {j}")));
        }
        if i == 0 {
            return Err(Error::LevelOrder("level 0 is the whole space, not a group".into()));
        }
        let x = self.project(j, g.index(), i)?;
        self.levels[i - 1].element(x)
    }

    pub fn same_as(&self, other: &Tower) -> bool {
        std::ptr::eq(self, other) || self.spec == other.spec
    }

    /// The first `depth` levels as a tower of their own.
    pub fn truncate(&self, depth: usize) -> Result<Arc<Tower>> {
        if depth == 0 || depth > self.depth() {
            return Err(Error::LevelOrder(format!("cannot truncate depth {} to {depth}", self.depth())));
        }
        Ok(Arc::new(Tower {
            spec: self.spec.with_depth(depth),
            levels: self.levels[..depth].to_vec(),
            bonds: self.bonds[..depth - 1].to_vec(),
            fibers: self.fibers[..depth].to_vec(),
        }))
    }

    /// Index of a level-`k` element by label.
    pub fn index_of(&self, k: usize, label: &str) -> Result<usize> {
        self.level(k)?
            .index_of(label)
            .ok_or_else(|| Error::Parse(format!("no element '{label}' at level {k}")))
    }
}

/// Reduction `upper -> lower` between consecutive levels of a built-in kind.
fn reduction_map(upper: &FiniteGroup, lower: &FiniteGroup) -> Result<Vec<usize>> {
    let n = upper.order();
    let image = match (&upper.structure, &lower.structure) {
        (Structure::Bits, Structure::Bits) => (0..n).map(|x| x >> 1).collect(),
        (Structure::Cyclic { .. } | Structure::Units { .. }, Structure::Cyclic { n: m } | Structure::Units { n: m, .. }) => (0..n)
            .map(|x| {
                let r = upper.residue(x).expect("residue group") % m;
                lower.index_of_residue(r).expect("reduction stays in the lower level")
            })
            .collect(),
        (Structure::Product { left: ul, right: ur }, Structure::Product { left: ll, right: lr }) => {
            let left = reduction_map(ul, ll)?;
            let right = reduction_map(ur, lr)?;
            (0..n)
                .map(|x| left[x / ur.order()] * lr.order() + right[x % ur.order()])
                .collect()
        }
        (Structure::Gl2 { mats: upper_mats, .. }, Structure::Gl2 { modulus: m, mats: lower_mats }) => upper_mats
            .iter()
            .map(|x| {
                let r = [x[0] % m, x[1] % m, x[2] % m, x[3] % m];
                lower_mats.binary_search(&r).expect("reduction of an invertible matrix")
            })
            .collect(),
        _ => {
            return Err(Error::KindMismatch(format!(
                "no reduction map from {} to {}",
                upper.spec(),
                lower.spec()
            )))
        }
    };
    Ok(image)
}

/// Splits a comma-separated element list, ignoring commas inside brackets.
pub fn split_labels(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    out.push(cur.trim().to_string());
    out
}

/// One component per level, compatible under the bonds.
#[derive(Clone, Debug)]
pub struct CoherentElement {
    tower: Arc<Tower>,
    components: Vec<usize>,
}

pub fn coherent_element(tower: &Arc<Tower>, components: Vec<usize>) -> Result<CoherentElement> {
    let d = tower.depth();
    if components.len() != d {
        return Err(Error::LengthMismatch { left: d, right: components.len() });
    }
    for (k, &c) in components.iter().enumerate() {
        if c >= tower.order(k + 1) {
            return Err(Error::InvalidParameter(format!("component {c} out of range at level {}", k + 1)));
        }
    }
    for k in 1..d {
        if tower.bonds[k - 1].apply(components[k]) != components[k - 1] {
            return Err(Error::IncoherentAtLevel(k));
        }
    }
    Ok(CoherentElement { tower: tower.clone(), components })
}

impl CoherentElement {
    /// The unique coherent element with the given top-level component.
    pub fn lift(tower: &Arc<Tower>, top: usize) -> Result<CoherentElement> {
        let d = tower.depth();
        let components = (1..=d)
            .map(|k| tower.project(d, top, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoherentElement { tower: tower.clone(), components })
    }

    /// From per-level labels; a single label is read as the top component.
    pub fn from_labels(tower: &Arc<Tower>, labels: &[String]) -> Result<CoherentElement> {
        let d = tower.depth();
        if labels.len() == 1 && d > 1 {
            return Self::lift(tower, tower.index_of(d, &labels[0])?);
        }
        if labels.len() != d {
            return Err(Error::LengthMismatch { left: d, right: labels.len() });
        }
        let components = labels
            .iter()
            .enumerate()
            .map(|(k, l)| tower.index_of(k + 1, l))
            .collect::<Result<Vec<_>>>()?;
        coherent_element(tower, components)
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn components(&self) -> &[usize] {
        &self.components
    }

    /// Component at level `k` (1-based).
    pub fn at(&self, k: usize) -> usize {
        self.components[k - 1]
    }

    pub fn top(&self) -> usize {
        *self.components.last().expect("towers have depth >= 1")
    }

    pub fn component(&self, k: usize) -> Result<GroupElement> {
        self.tower.level(k)?.element(self.components[k - 1])
    }

    pub fn labels(&self) -> Vec<String> {
        self.components
            .iter()
            .enumerate()
            .map(|(k, &c)| self.tower.levels[k].label(c).to_string())
            .collect()
    }

    /// The same element seen in the tower truncated to `depth` levels.
    pub fn truncate(&self, tower: &Arc<Tower>) -> Result<CoherentElement> {
        let d = tower.depth();
        if d > self.components.len() {
            return Err(Error::LevelOrder("cannot truncate to a deeper tower".into()));
        }
        coherent_element(tower, self.components[..d].to_vec())
    }
}

impl PartialEq for CoherentElement {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components && self.tower.same_as(&other.tower)
    }
}

impl Eq for CoherentElement {}

impl fmt::Display for CoherentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.labels().join(","))
    }
}

/// All coherent elements, ordered by top-level index.
pub fn coherent_elements(tower: &Arc<Tower>) -> Vec<CoherentElement> {
    let d = tower.depth();
    (0..tower.order(d))
        .map(|top| CoherentElement::lift(tower, top).expect("top index in range"))
        .collect()
}

/// The clopen set of coherent elements whose level-`level` component is
/// `base`. Level 0 is the whole space.
#[derive(Clone, Debug)]
pub struct Cylinder {
    tower: Arc<Tower>,
    level: usize,
    base: usize,
}

impl Cylinder {
    pub fn new(tower: &Arc<Tower>, level: usize, base: usize) -> Result<Cylinder> {
        if level > tower.depth() {
            return Err(Error::LevelOrder(format!("level {level} exceeds depth {}", tower.depth())));
        }
        if base >= tower.order(level) {
            return Err(Error::InvalidParameter(format!("base {base} out of range at level {level}")));
        }
        Ok(Cylinder { tower: tower.clone(), level, base })
    }

    pub fn whole(tower: &Arc<Tower>) -> Cylinder {
        Cylinder { tower: tower.clone(), level: 0, base: 0 }
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn contains(&self, x: &CoherentElement) -> bool {
        self.tower.same_as(&x.tower) && (self.level == 0 || x.at(self.level) == self.base)
    }

    /// Level-`j` elements inside the cylinder, `j >= level`.
    pub fn members_at(&self, j: usize) -> Result<Vec<usize>> {
        if j < self.level || j > self.tower.depth() {
            return Err(Error::LevelOrder(format!("level {j} not below cylinder level {}", self.level)));
        }
        let mut cell = vec![self.base];
        for k in self.level..j {
            cell = cell.iter().flat_map(|&b| self.tower.fiber(k, b).iter().copied()).collect();
        }
        cell.sort_unstable();
        Ok(cell)
    }
}

impl PartialEq for Cylinder {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.base == other.base && self.tower.same_as(&other.tower)
    }
}

pub fn coset_cylinder(tower: &Arc<Tower>, x: &CoherentElement, k: usize) -> Result<Cylinder> {
    if !tower.same_as(&x.tower) {
        return Err(Error::TowerMismatch);
    }
    if k > tower.depth() {
        return Err(Error::LevelOrder(format!("level {k} exceeds depth {}", tower.depth())));
    }
    if k == 0 {
        return Ok(Cylinder::whole(tower));
    }
    Cylinder::new(tower, k, x.at(k))
}

/// Per-bond findings of [`validate_tower`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BondCheck {
    /// The bond `G_{bond+1} -> G_bond`.
    pub bond: usize,
    pub surjective: bool,
    pub homomorphism: bool,
    pub strict_refinement: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub orders: Vec<usize>,
    pub bonds: Vec<BondCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.bonds
            .iter()
            .all(|b| b.surjective && b.homomorphism && b.strict_refinement)
    }

    pub fn is_inverse_system(&self) -> bool {
        self.bonds.iter().all(|b| b.surjective && b.homomorphism)
    }
}

pub fn validate_tower(tower: &Tower) -> ValidationReport {
    let bonds = tower
        .bonds
        .iter()
        .enumerate()
        .map(|(i, b)| BondCheck {
            bond: i + 1,
            surjective: b.is_surjective(),
            homomorphism: b.law_violation().is_none(),
            strict_refinement: b.source().order() > b.target().order(),
        })
        .collect();
    ValidationReport { orders: tower.orders(), bonds }
}
