//! Finite groups given by Cayley tables, homomorphisms between them and
//! brute-force automorphism enumeration.
//!
//! Every group carries a canonical ordering of its elements, fixed per
//! construction kind. That ordering is the tie-breaking convention used by
//! every encoding built on top of the group, so it must never change:
//!
//! * `cyclic n`: residues `0..n` ascending,
//! * `units n`: residues coprime to `n`, ascending,
//! * `product G H`: lexicographic on `(index in G, index in H)`,
//! * `gl2 2^k`: invertible matrices, lexicographic on row-major entries,
//! * `bits k`: words of `{0,1}^k` in lexicographic order,
//! * `table`: the order the labels are listed in.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{coprime, is_prime};
use crate::error::{Error, Result};

/// Largest group order any constructor accepts.
pub const MAX_ORDER: usize = 4096;
/// Largest `k` accepted by `gl2 2^k`.
pub const MAX_GL2_EXPONENT: u32 = 3;

const EXHAUSTIVE_ASSOCIATIVITY: usize = 64;
const ASSOCIATIVITY_SAMPLES: usize = 100_000;
const ASSOCIATIVITY_SEED: u64 = 0x5eed_a550c;

/// Textual description of a group, one line:
/// `cyclic N | units N | product <spec> <spec> | gl2 2^K | bits K | table <file>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Cyclic(usize),
    Units(usize),
    Product(Box<GroupSpec>, Box<GroupSpec>),
    Gl2 { k: u32 },
    Bits(usize),
    Table {
        source: String,
        labels: Vec<String>,
        rows: Vec<Vec<usize>>,
    },
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<GroupSpec> {
        Self::parse_in(text, None)
    }

    /// Parses a spec, resolving `table` paths relative to `base_dir`.
    pub fn parse_in(text: &str, base_dir: Option<&Path>) -> Result<GroupSpec> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let mut pos = 0;
        let spec = parse_tokens(&tokens, &mut pos, base_dir)?;
        if let Some(extra) = tokens.get(pos) {
            return Err(Error::Parse(format!("unexpected token '{extra}' in group spec")));
        }
        Ok(spec)
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            GroupSpec::Cyclic(_) => GroupKind::Cyclic,
            GroupSpec::Units(_) => GroupKind::UnitsMod,
            GroupSpec::Product(..) => GroupKind::Product,
            GroupSpec::Gl2 { .. } => GroupKind::Gl2Mod,
            GroupSpec::Bits(_) => GroupKind::Bits,
            GroupSpec::Table { .. } => GroupKind::FromTable,
        }
    }
}

fn parse_tokens(tokens: &[&str], pos: &mut usize, base_dir: Option<&Path>) -> Result<GroupSpec> {
    let head = *tokens
        .get(*pos)
        .ok_or_else(|| Error::Parse("group spec ended early".into()))?;
    *pos += 1;
    let mut arg = |what: &str| -> Result<String> {
        let t = tokens
            .get(*pos)
            .ok_or_else(|| Error::Parse(format!("'{head}' needs {what}")))?;
        *pos += 1;
        Ok(t.to_string())
    };
    let number = |t: String| -> Result<usize> {
        t.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad number '{t}' in group spec")))
    };
    match head {
        "cyclic" => Ok(GroupSpec::Cyclic(number(arg("an order")?)?)),
        "units" => Ok(GroupSpec::Units(number(arg("a modulus")?)?)),
        "bits" => Ok(GroupSpec::Bits(number(arg("a length")?)?)),
        "gl2" => {
            let m = arg("a modulus 2^K")?;
            let k = m
                .strip_prefix("2^")
                .and_then(|k| k.parse::<u32>().ok())
                .ok_or_else(|| Error::Parse(format!("gl2 modulus must be written 2^K, got '{m}'")))?;
            Ok(GroupSpec::Gl2 { k })
        }
        "table" => {
            let file = arg("a file")?;
            let path = match base_dir {
                Some(dir) => dir.join(&file),
                None => Path::new(&file).to_path_buf(),
            };
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let (labels, rows) = parse_table(&text)?;
            Ok(GroupSpec::Table {
                source: file,
                labels,
                rows,
            })
        }
        "product" => {
            let left = parse_tokens(tokens, pos, base_dir)?;
            let right = parse_tokens(tokens, pos, base_dir)?;
            Ok(GroupSpec::Product(Box::new(left), Box::new(right)))
        }
        other => Err(Error::Parse(format!("unknown group kind '{other}'"))),
    }
}

/// Table file: first line the labels, then one row of 0-based indices per element.
pub fn parse_table(text: &str) -> Result<(Vec<String>, Vec<Vec<usize>>)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let labels: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty table file".into()))?
        .split_whitespace()
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| {
            l.split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad table entry '{t}'")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((labels, rows))
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic {n}"),
            GroupSpec::Units(n) => write!(f, "units {n}"),
            GroupSpec::Product(a, b) => write!(f, "product {a} {b}"),
            GroupSpec::Gl2 { k } => write!(f, "gl2 2^{k}"),
            GroupSpec::Bits(k) => write!(f, "bits {k}"),
            GroupSpec::Table { source, .. } => write!(f, "table {source}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic,
    UnitsMod,
    Product,
    Gl2Mod,
    Bits,
    FromTable,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Cyclic => "cyclic",
            GroupKind::UnitsMod => "units_mod",
            GroupKind::Product => "product",
            GroupKind::Gl2Mod => "gl2_mod",
            GroupKind::Bits => "bits",
            GroupKind::FromTable => "from_table",
        })
    }
}

/// Kind-specific coordinates, kept so that reduction maps between levels
/// can be computed arithmetically instead of by parsing labels.
#[derive(Debug)]
pub(crate) enum Structure {
    Cyclic { n: usize },
    Units { n: usize, residues: Vec<usize> },
    Product { left: Arc<FiniteGroup>, right: Arc<FiniteGroup> },
    Gl2 { modulus: usize, mats: Vec<[usize; 4]> },
    Bits,
    Table,
}

/// A validated finite group.
#[derive(Debug)]
pub struct FiniteGroup {
    spec: GroupSpec,
    labels: Vec<String>,
    table: Vec<u16>,
    identity: usize,
    inverses: Vec<usize>,
    label_index: HashMap<String, usize>,
    pub(crate) structure: Structure,
}

pub fn make_group(spec: &GroupSpec) -> Result<Arc<FiniteGroup>> {
    FiniteGroup::from_spec(spec).map(Arc::new)
}

impl FiniteGroup {
    pub fn from_spec(spec: &GroupSpec) -> Result<FiniteGroup> {
        match spec {
            GroupSpec::Cyclic(n) => Self::cyclic(*n),
            GroupSpec::Units(n) => Self::units(*n),
            GroupSpec::Bits(k) => Self::bits(*k),
            GroupSpec::Gl2 { k } => Self::gl2(*k),
            GroupSpec::Product(a, b) => Self::product(make_group(a)?, make_group(b)?),
            GroupSpec::Table { source, labels, rows } => {
                Self::table_group(source.clone(), labels.clone(), rows)
            }
        }
    }

    pub fn cyclic(n: usize) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::InvalidParameter("cyclic group needs order >= 1".into()));
        }
        check_order(n)?;
        let labels = (0..n).map(|r| r.to_string()).collect();
        let table = build_table(n, |a, b| (a + b) % n);
        Self::assemble(GroupSpec::Cyclic(n), labels, table, Structure::Cyclic { n })
    }

    pub fn units(n: usize) -> Result<FiniteGroup> {
        if n < 2 {
            return Err(Error::InvalidParameter("units group needs modulus >= 2".into()));
        }
        let residues: Vec<usize> = (1..n).filter(|&r| coprime(r as u64, n as u64)).collect();
        check_order(residues.len())?;
        let mut position = vec![usize::MAX; n];
        for (i, &r) in residues.iter().enumerate() {
            position[r] = i;
        }
        let labels = residues.iter().map(|r| r.to_string()).collect();
        let table = build_table(residues.len(), |a, b| position[residues[a] * residues[b] % n]);
        Self::assemble(GroupSpec::Units(n), labels, table, Structure::Units { n, residues })
    }

    /// `({0,1}^k, xor)`, labelled by words; the word's first letter is the
    /// most significant bit of the index.
    pub fn bits(k: usize) -> Result<FiniteGroup> {
        if k == 0 {
            return Err(Error::InvalidParameter("bits group needs length >= 1".into()));
        }
        if k >= usize::BITS as usize || (1usize << k) > MAX_ORDER {
            return Err(Error::SizeLimit(format!("bits {k} exceeds order {MAX_ORDER}")));
        }
        let n = 1usize << k;
        let labels = (0..n)
            .map(|i| (0..k).rev().map(|j| if (i >> j) & 1 == 1 { '1' } else { '0' }).collect())
            .collect();
        let table = build_table(n, |a, b| a ^ b);
        Self::assemble(GroupSpec::Bits(k), labels, table, Structure::Bits)
    }

    pub fn gl2(k: u32) -> Result<FiniteGroup> {
        if k == 0 {
            return Err(Error::InvalidParameter("gl2 needs modulus 2^K with K >= 1".into()));
        }
        if k > MAX_GL2_EXPONENT {
            return Err(Error::SizeLimit(format!(
                "gl2 2^{k} exceeds the limit 2^{MAX_GL2_EXPONENT}"
            )));
        }
        let m = 1usize << k;
        let mut mats = Vec::new();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        // invertible mod 2^k iff the determinant is odd
                        if (a * d + b * c) % 2 == 1 {
                            mats.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        check_order(mats.len())?;
        let key = |x: &[usize; 4]| ((x[0] * m + x[1]) * m + x[2]) * m + x[3];
        let mut position = vec![usize::MAX; m * m * m * m];
        for (i, x) in mats.iter().enumerate() {
            position[key(x)] = i;
        }
        let table = build_table(mats.len(), |i, j| {
            let (x, y) = (&mats[i], &mats[j]);
            let z = [
                (x[0] * y[0] + x[1] * y[2]) % m,
                (x[0] * y[1] + x[1] * y[3]) % m,
                (x[2] * y[0] + x[3] * y[2]) % m,
                (x[2] * y[1] + x[3] * y[3]) % m,
            ];
            position[key(&z)]
        });
        let labels = mats
            .iter()
            .map(|x| format!("[{},{};{},{}]", x[0], x[1], x[2], x[3]))
            .collect();
        Self::assemble(GroupSpec::Gl2 { k }, labels, table, Structure::Gl2 { modulus: m, mats })
    }

    pub fn product(left: Arc<FiniteGroup>, right: Arc<FiniteGroup>) -> Result<FiniteGroup> {
        let (n, r) = (left.order(), right.order());
        let order = n
            .checked_mul(r)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or_else(|| Error::SizeLimit(format!("product order {n}*{r} exceeds {MAX_ORDER}")))?;
        let mut labels = Vec::with_capacity(order);
        for i in 0..n {
            for j in 0..r {
                labels.push(format!("({},{})", left.label(i), right.label(j)));
            }
        }
        let table = build_table(order, |a, b| {
            left.mul(a / r, b / r) * r + right.mul(a % r, b % r)
        });
        let spec = GroupSpec::Product(Box::new(left.spec.clone()), Box::new(right.spec.clone()));
        Self::assemble(spec, labels, table, Structure::Product { left, right })
    }

    /// A group given by an explicit Cayley table, in the given label order.
    pub fn from_table(labels: Vec<String>, rows: &[Vec<usize>]) -> Result<FiniteGroup> {
        Self::table_group("<inline>".into(), labels, rows)
    }

    fn table_group(source: String, labels: Vec<String>, rows: &[Vec<usize>]) -> Result<FiniteGroup> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        check_order(n)?;
        if rows.len() != n {
            return Err(Error::LengthMismatch { left: n, right: rows.len() });
        }
        let mut table = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::LengthMismatch { left: n, right: row.len() });
            }
            for &x in row {
                if x >= n {
                    return Err(Error::InvalidParameter(format!("table entry {x} out of range")));
                }
                table.push(x as u16);
            }
        }
        let spec = GroupSpec::Table {
            source,
            labels: labels.clone(),
            rows: rows.to_vec(),
        };
        Self::assemble(spec, labels, table, Structure::Table)
    }

    fn assemble(spec: GroupSpec, labels: Vec<String>, table: Vec<u16>, structure: Structure) -> Result<FiniteGroup> {
        let n = labels.len();
        let mut label_index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if label_index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate element label '{l}'")));
            }
        }
        check_latin(n, &table)?;
        check_associative(n, &table)?;
        let at = |a: usize, b: usize| table[a * n + b] as usize;
        // In a group the only idempotent is the identity.
        let identity = (0..n)
            .find(|&e| at(e, e) == e)
            .ok_or(Error::AxiomViolation { axiom: "identity", witness: [0, 0, 0] })?;
        if let Some(x) = (0..n).find(|&x| at(identity, x) != x || at(x, identity) != x) {
            return Err(Error::AxiomViolation { axiom: "identity", witness: [identity, x, x] });
        }
        let inverses = (0..n)
            .map(|a| (0..n).find(|&b| at(a, b) == identity).expect("latin rows hit the identity"))
            .collect();
        Ok(FiniteGroup {
            spec,
            labels,
            table,
            identity,
            inverses,
            label_index,
            structure,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn kind(&self) -> GroupKind {
        self.spec.kind()
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    /// Table lookup on element indices. Panics on out-of-range indices.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn pow(&self, a: usize, mut e: usize) -> usize {
        let (mut base, mut acc) = (a, self.identity);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn row(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.order();
        self.table[a * n..(a + 1) * n].iter().map(|&x| x as usize)
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a + 1..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Structural identity: same construction spec. Groups from identical
    /// specs are interchangeable.
    pub fn same_as(&self, other: &FiniteGroup) -> bool {
        std::ptr::eq(self, other) || self.spec == other.spec
    }

    pub fn element(self: &Arc<Self>, index: usize) -> Result<GroupElement> {
        GroupElement::new(self.clone(), index)
    }

    pub fn element_by_label(self: &Arc<Self>, label: &str) -> Result<GroupElement> {
        let index = self
            .index_of(label)
            .ok_or_else(|| Error::Parse(format!("no element labelled '{label}' in {}", self.spec)))?;
        GroupElement::new(self.clone(), index)
    }

    /// Residue represented by an element of a cyclic or units group.
    pub(crate) fn residue(&self, index: usize) -> Option<usize> {
        match &self.structure {
            Structure::Cyclic { .. } => Some(index),
            Structure::Units { residues, .. } => Some(residues[index]),
            _ => None,
        }
    }

    pub(crate) fn index_of_residue(&self, r: usize) -> Option<usize> {
        match &self.structure {
            Structure::Cyclic { n } => (r < *n).then_some(r),
            Structure::Units { residues, .. } => residues.binary_search(&r).ok(),
            _ => None,
        }
    }
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        Err(Error::SizeLimit(format!("group order {n} exceeds {MAX_ORDER}")))
    } else {
        Ok(())
    }
}

fn build_table(n: usize, op: impl Fn(usize, usize) -> usize) -> Vec<u16> {
    let mut table = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            table.push(op(a, b) as u16);
        }
    }
    table
}

fn check_latin(n: usize, table: &[u16]) -> Result<()> {
    let mut seen = vec![usize::MAX; n];
    for a in 0..n {
        seen.fill(usize::MAX);
        for b in 0..n {
            let c = table[a * n + b] as usize;
            if seen[c] != usize::MAX {
                return Err(Error::AxiomViolation { axiom: "latin square (row)", witness: [a, seen[c], b] });
            }
            seen[c] = b;
        }
    }
    for b in 0..n {
        seen.fill(usize::MAX);
        for a in 0..n {
            let c = table[a * n + b] as usize;
            if seen[c] != usize::MAX {
                return Err(Error::AxiomViolation { axiom: "latin square (column)", witness: [seen[c], a, b] });
            }
            seen[c] = a;
        }
    }
    Ok(())
}

fn check_associative(n: usize, table: &[u16]) -> Result<()> {
    let at = |a: usize, b: usize| table[a * n + b] as usize;
    let check = |a: usize, b: usize, c: usize| {
        if at(at(a, b), c) == at(a, at(b, c)) {
            Ok(())
        } else {
            Err(Error::AxiomViolation { axiom: "associativity", witness: [a, b, c] })
        }
    };
    if n <= EXHAUSTIVE_ASSOCIATIVITY {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    check(a, b, c)?;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(ASSOCIATIVITY_SEED);
        for _ in 0..ASSOCIATIVITY_SAMPLES {
            let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            check(a, b, c)?;
        }
    }
    Ok(())
}

/// An element of a specific group.
#[derive(Clone, Debug)]
pub struct GroupElement {
    group: Arc<FiniteGroup>,
    index: usize,
}

impl GroupElement {
    pub fn new(group: Arc<FiniteGroup>, index: usize) -> Result<GroupElement> {
        if index >= group.order() {
            return Err(Error::InvalidParameter(format!(
                "element index {index} out of range for order {}",
                group.order()
            )));
        }
        Ok(GroupElement { group, index })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn label(&self) -> &str {
        self.group.label(self.index)
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        if !self.group.same_as(&other.group) {
            return Err(Error::GroupMismatch(format!(
                "cannot multiply elements of {} and {}",
                self.group.spec(),
                other.group.spec()
            )));
        }
        Ok(GroupElement {
            group: self.group.clone(),
            index: self.group.mul(self.index, other.index),
        })
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            group: self.group.clone(),
            index: self.group.inverse(self.index),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.index == self.group.identity()
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.group.same_as(&other.group)
    }
}

impl Eq for GroupElement {}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A group homomorphism stored as its image list.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    image: Vec<usize>,
    surjective: bool,
}

impl Homomorphism {
    /// Checks the homomorphism law on every pair.
    pub fn new(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, image: Vec<usize>) -> Result<Homomorphism> {
        let hom = Self::unchecked(source, target, image)?;
        if let Some((a, b)) = hom.law_violation() {
            return Err(Error::NotHomomorphism { a, b });
        }
        Ok(hom)
    }

    /// Only the shape of the image list is checked.
    pub fn unchecked(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, image: Vec<usize>) -> Result<Homomorphism> {
        if image.len() != source.order() {
            return Err(Error::LengthMismatch { left: source.order(), right: image.len() });
        }
        if let Some(&bad) = image.iter().find(|&&x| x >= target.order()) {
            return Err(Error::InvalidParameter(format!("image index {bad} out of range")));
        }
        let mut hit = vec![false; target.order()];
        for &x in &image {
            hit[x] = true;
        }
        let surjective = hit.iter().all(|&h| h);
        Ok(Homomorphism { source, target, image, surjective })
    }

    /// First pair `(a, b)` with `image(ab) != image(a) image(b)`.
    pub fn law_violation(&self) -> Option<(usize, usize)> {
        let n = self.source.order();
        for a in 0..n {
            for b in 0..n {
                let lhs = self.image[self.source.mul(a, b)];
                let rhs = self.target.mul(self.image[a], self.image[b]);
                if lhs != rhs {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, index: usize) -> usize {
        self.image[index]
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }
}

/// A bijective endomorphism.
#[derive(Clone, Debug)]
pub struct Automorphism(Homomorphism);

impl Automorphism {
    pub fn image(&self) -> &[usize] {
        self.0.image()
    }

    pub fn apply(&self, index: usize) -> usize {
        self.0.apply(index)
    }

    pub fn as_homomorphism(&self) -> &Homomorphism {
        &self.0
    }
}

/// A generating set chosen greedily: elements of largest order first,
/// ties broken by canonical index.
pub(crate) fn greedy_generators(g: &FiniteGroup) -> Vec<usize> {
    let n = g.order();
    let orders: Vec<usize> = (0..n).map(|a| g.element_order(a)).collect();
    let mut candidates: Vec<usize> = (0..n).collect();
    candidates.sort_by_key(|&a| (std::cmp::Reverse(orders[a]), a));
    let mut in_subgroup = vec![false; n];
    in_subgroup[g.identity()] = true;
    let mut members = vec![g.identity()];
    let mut gens = Vec::new();
    for a in candidates {
        if in_subgroup[a] {
            continue;
        }
        gens.push(a);
        // close the subgroup under right multiplication by all generators
        let mut queue: VecDeque<usize> = members.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            for &s in &gens {
                let y = g.mul(x, s);
                if !in_subgroup[y] {
                    in_subgroup[y] = true;
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
        if members.len() == n {
            break;
        }
    }
    gens
}

/// Extends generator images to the generated subgroup, checking
/// `phi(x s) = phi(x) phi(s)` and injectivity along the way.
fn extend_images(g: &FiniteGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let n = g.order();
    let mut phi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    phi[g.identity()] = g.identity();
    used[g.identity()] = true;
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let y = g.mul(x, s);
            let v = g.mul(phi[x], t);
            if phi[y] == usize::MAX {
                if used[v] {
                    return None;
                }
                phi[y] = v;
                used[v] = true;
                queue.push_back(y);
            } else if phi[y] != v {
                return None;
            }
        }
    }
    Some(phi)
}

/// All automorphisms of `g`, sorted lexicographically by image list.
pub fn enumerate_automorphisms(g: &Arc<FiniteGroup>) -> Result<Vec<Automorphism>> {
    let n = g.order();
    if n > MAX_ORDER {
        return Err(Error::SizeLimit(format!("automorphism enumeration limited to order {MAX_ORDER}")));
    }
    let gens = greedy_generators(g);
    let orders: Vec<usize> = (0..n).map(|a| g.element_order(a)).collect();
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut images = Vec::with_capacity(gens.len());
    search_automorphisms(g, &gens, &orders, &mut images, &mut found);
    found.sort();
    found
        .into_iter()
        .map(|image| Ok(Automorphism(Homomorphism::new(g.clone(), g.clone(), image)?)))
        .collect()
}

fn search_automorphisms(
    g: &FiniteGroup,
    gens: &[usize],
    orders: &[usize],
    images: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    let depth = images.len();
    if depth == gens.len() {
        if let Some(phi) = extend_images(g, gens, images) {
            if phi.iter().all(|&x| x != usize::MAX) {
                found.push(phi);
            }
        }
        return;
    }
    let want = orders[gens[depth]];
    for t in 0..g.order() {
        if orders[t] != want || images.contains(&t) {
            continue;
        }
        images.push(t);
        // prune on the subgroup generated so far
        if extend_images(g, &gens[..=depth], images).is_some() {
            search_automorphisms(g, gens, orders, images, found);
        }
        images.pop();
    }
}

/// Image of the prime `q` in `(Z/p^n)^x`, the Frobenius at `q` in the
/// cyclotomic extension of conductor `p^n`.
pub fn frobenius_element(p: u64, n: u32, q: u64) -> Result<GroupElement> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("level must be >= 1".into()));
    }
    if !coprime(q, p) {
        return Err(Error::Ramified { p, q });
    }
    let modulus = p
        .checked_pow(n)
        .filter(|&m| m / p * (p - 1) <= MAX_ORDER as u64)
        .ok_or_else(|| Error::SizeLimit(format!("units mod {p}^{n} exceed order {MAX_ORDER}")))?;
    let group = make_group(&GroupSpec::Units(modulus as usize))?;
    let index = group
        .index_of_residue((q % modulus) as usize)
        .expect("q is a unit mod p^n");
    GroupElement::new(group, index)
}

/// Subgroup generated by `gens`, by breadth-first search from the identity.
#[cfg(test)]
pub(crate) fn closure(g: &FiniteGroup, gens: &[usize]) -> std::collections::HashSet<usize> {
    let mut seen = std::collections::HashSet::from([g.identity()]);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for &s in gens {
            let y = g.mul(x, s);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(text: &str) -> Arc<FiniteGroup> {
        make_group(&GroupSpec::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn trivial_group() {
        let g = group("cyclic 1");
        assert_eq!(g.order(), 1);
        assert_eq!(enumerate_automorphisms(&g).unwrap().len(), 1);
    }

    #[test]
    fn units_mod_8_labels() {
        let g = group("units 8");
        assert_eq!(g.order(), 4);
        assert_eq!(g.labels(), ["1", "3", "5", "7"]);
        assert_eq!(group("units 9").order(), 6);
    }

    #[test]
    fn multiplication_examples() {
        let u5 = group("units 5");
        let two = u5.element_by_label("2").unwrap();
        let three = u5.element_by_label("3").unwrap();
        assert_eq!(two.multiply(&three).unwrap().label(), "1");
        let c4 = group("cyclic 4");
        let x = c4.element_by_label("3").unwrap();
        assert_eq!(x.multiply(&x).unwrap().label(), "2");
        let e = c4.element(c4.identity()).unwrap();
        assert_eq!(e.multiply(&x).unwrap(), x);
    }

    #[test]
    fn mixed_groups_are_rejected() {
        let a = group("cyclic 4").element(1).unwrap();
        let b = group("cyclic 5").element(1).unwrap();
        assert_eq!(a.multiply(&b).unwrap_err().name(), "GroupMismatch");
        // same spec built twice is the same group
        let c = group("cyclic 4").element(3).unwrap();
        assert_eq!(a.multiply(&c).unwrap().index(), 0);
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(enumerate_automorphisms(&group("product cyclic 2 cyclic 2")).unwrap().len(), 6);
        assert_eq!(enumerate_automorphisms(&group("cyclic 8")).unwrap().len(), 4);
        assert_eq!(enumerate_automorphisms(&group("cyclic 12")).unwrap().len(), 4);
        assert_eq!(enumerate_automorphisms(&group("units 9")).unwrap().len(), 2);
    }

    #[test]
    fn automorphisms_are_sorted_and_distinct() {
        let auts = enumerate_automorphisms(&group("product cyclic 2 cyclic 4")).unwrap();
        for w in auts.windows(2) {
            assert!(w[0].image() < w[1].image());
        }
        assert_eq!(auts[0].image(), (0..8).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn gl2_orders() {
        assert_eq!(group("gl2 2^1").order(), 6);
        assert_eq!(group("gl2 2^2").order(), 96);
        assert_eq!(FiniteGroup::gl2(4).unwrap_err().name(), "SizeLimit");
        assert!(!group("gl2 2^1").is_abelian());
    }

    #[test]
    fn bad_table_reports_triple() {
        // Latin square that is not associative (a loop of order 5).
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let labels = (0..5).map(|i| format!("e{i}")).collect();
        match FiniteGroup::from_table(labels, &rows) {
            Err(Error::AxiomViolation { axiom, witness }) => {
                assert_eq!(axiom, "associativity");
                let at = |a: usize, b: usize| rows[a][b];
                let [a, b, c] = witness;
                assert_ne!(at(at(a, b), c), at(a, at(b, c)));
            }
            other => panic!("expected AxiomViolation, got {other:?}"),
        }
        let not_latin = vec![vec![0, 1], vec![1, 1]];
        let err = FiniteGroup::from_table(vec!["a".into(), "b".into()], &not_latin).unwrap_err();
        assert_eq!(err.name(), "AxiomViolation");
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_element(5, 1, 7).unwrap().label(), "2");
        assert_eq!(frobenius_element(3, 2, 2).unwrap().label(), "2");
        assert!(frobenius_element(5, 2, 101).unwrap().is_identity());
        assert_eq!(frobenius_element(5, 1, 5).unwrap_err(), Error::Ramified { p: 5, q: 5 });
    }

    #[test]
    fn spec_round_trips_through_display() {
        for text in ["cyclic 6", "units 9", "product cyclic 2 product cyclic 3 units 5", "gl2 2^2", "bits 3"] {
            assert_eq!(GroupSpec::parse(text).unwrap().to_string(), text);
        }
        assert!(GroupSpec::parse("product cyclic 2").is_err());
        assert!(GroupSpec::parse("cyclic 2 3").is_err());
        assert!(GroupSpec::parse("gl2 8").is_err());
    }

    #[test]
    fn homomorphism_checks() {
        let c4 = group("cyclic 4");
        let c2 = group("cyclic 2");
        let red = Homomorphism::new(c4.clone(), c2.clone(), vec![0, 1, 0, 1]).unwrap();
        assert!(red.is_surjective());
        assert!(Homomorphism::new(c4.clone(), c2.clone(), vec![0, 0, 0, 0]).unwrap().law_violation().is_none());
        assert!(matches!(
            Homomorphism::new(c4, c2, vec![1, 1, 1, 1]),
            Err(Error::NotHomomorphism { .. })
        ));
    }

    #[test]
    fn closure_of_generators_is_whole_group() {
        for text in ["gl2 2^2", "units 16", "product cyclic 4 cyclic 6"] {
            let g = group(text);
            assert_eq!(closure(&g, &greedy_generators(&g)).len(), g.order());
        }
    }
}
