//! Binary clopen partitions of a tower ("cubic matrioshka") and the codes
//! they assign to coherent elements.
//!
//! Cells are lists of elements of one level in canonical order. A cell of
//! size `m > 1` splits into its first `ceil(m/2)` elements (bit 0) and the
//! remaining `floor(m/2)` (bit 1). A singleton cell at level `k < d` is
//! replaced by its fiber at level `k + 1` and splitting resumes, so the
//! code of an element at depth `d` extends its code at every shallower
//! depth.
//!
//! The module also provides the fixed-width per-level block encoding, in
//! which the level-`k` label is the level-`(k-1)` label followed by the
//! element's position inside its fiber.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::arith::{ceil_log2, from_bits, to_bits};
use crate::error::{Error, Result};
use crate::group::MAX_ORDER;
use crate::tower::{CoherentElement, Cylinder, Tower};

/// Current convention identifier, written next to every serialized code.
pub const CONVENTION_VERSION: &str = "cma-v1";

/// The rules that make the partition tree unique: canonical element order
/// and the `ceil/floor` halving split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingConvention {
    version: String,
}

impl Default for EncodingConvention {
    fn default() -> Self {
        EncodingConvention { version: CONVENTION_VERSION.to_string() }
    }
}

impl EncodingConvention {
    /// A convention with the standard rules under another version tag.
    pub fn tagged(version: impl Into<String>) -> Self {
        EncodingConvention { version: version.into() }
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Size of the bit-0 half of a cell of `m` elements.
    pub fn split(&self, m: usize) -> usize {
        m.div_ceil(2)
    }
}

/// A finite root-to-node path in a partition tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSequence {
    bits: Vec<bool>,
    depth_reached: usize,
    convention_version: String,
}

impl BitSequence {
    pub fn new(bits: Vec<bool>, depth_reached: usize, convention_version: impl Into<String>) -> Self {
        BitSequence { bits, depth_reached, convention_version: convention_version.into() }
    }

    /// Parses an ASCII `0`/`1` string.
    pub fn parse(text: &str, depth_reached: usize, convention_version: &str) -> Result<Self> {
        Ok(Self::new(parse_bits(text)?, depth_reached, convention_version))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn depth_reached(&self) -> usize {
        self.depth_reached
    }

    pub fn convention_version(&self) -> &str {
        &self.convention_version
    }

    pub fn is_prefix_of(&self, other: &BitSequence) -> bool {
        self.convention_version == other.convention_version && other.bits.starts_with(&self.bits)
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits_to_string(&self.bits))
    }
}

pub fn parse_bits(text: &str) -> Result<Vec<bool>> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("'{other}' is not a bit"))),
        })
        .collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Debug)]
struct Node {
    level: usize,
    members: Vec<usize>,
    children: Option<[usize; 2]>,
}

/// The complete binary tree of clopen cells of a tower.
#[derive(Debug)]
pub struct PartitionTree {
    tower: Arc<Tower>,
    convention: EncodingConvention,
    nodes: Vec<Node>,
    /// `codes[k-1][x]`: path at which the level-`k` element `x` becomes a singleton.
    codes: Vec<Vec<Vec<bool>>>,
}

pub fn build_partition_tree(tower: &Arc<Tower>, convention: &EncodingConvention) -> Result<PartitionTree> {
    let d = tower.depth();
    if tower.order(d) > MAX_ORDER {
        return Err(Error::SizeLimit(format!("partition trees limited to {MAX_ORDER} leaves")));
    }
    let mut tree = PartitionTree {
        tower: tower.clone(),
        convention: convention.clone(),
        nodes: Vec::new(),
        codes: (1..=d).map(|k| vec![Vec::new(); tower.order(k)]).collect(),
    };
    let root = tower.fiber(0, 0).to_vec();
    let mut prefix = Vec::new();
    tree.grow(1, root, &mut prefix);
    Ok(tree)
}

impl PartitionTree {
    fn grow(&mut self, mut level: usize, mut members: Vec<usize>, prefix: &mut Vec<bool>) -> usize {
        let d = self.tower.depth();
        while members.len() == 1 {
            self.codes[level - 1][members[0]] = prefix.clone();
            if level == d {
                break;
            }
            members = self.tower.fiber(level, members[0]).to_vec();
            level += 1;
        }
        let id = self.nodes.len();
        let split = self.convention.split(members.len());
        let halves = (members.len() > 1).then(|| (members[..split].to_vec(), members[split..].to_vec()));
        self.nodes.push(Node { level, members, children: None });
        if let Some((left, right)) = halves {
            prefix.push(false);
            let l = self.grow(level, left, prefix);
            prefix.pop();
            prefix.push(true);
            let r = self.grow(level, right, prefix);
            prefix.pop();
            self.nodes[id].children = Some([l, r]);
        }
        id
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn convention(&self) -> &EncodingConvention {
        &self.convention
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Leaves of the tree; each is a single top-level element.
    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.children.is_none()).count()
    }

    /// Code of the level-`k` element `x`: the path to the node where it is
    /// first isolated.
    pub fn code_at_level(&self, k: usize, x: usize) -> &[bool] {
        &self.codes[k - 1][x]
    }

    /// Longest code among level-`k` elements.
    pub fn max_code_len(&self, k: usize) -> usize {
        self.codes[k - 1].iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn encode(&self, x: &CoherentElement) -> Result<BitSequence> {
        if !self.tower.same_as(x.tower()) {
            return Err(Error::TowerMismatch);
        }
        let mut node = &self.nodes[0];
        let mut bits = Vec::new();
        while let Some([l, r]) = node.children {
            let c = x.at(node.level);
            let split = self.convention.split(node.members.len());
            let bit = match node.members.binary_search(&c) {
                Ok(pos) => pos >= split,
                Err(_) => return Err(Error::InvalidParameter(format!("element {x} not in its cell"))),
            };
            bits.push(bit);
            node = &self.nodes[if bit { r } else { l }];
        }
        Ok(BitSequence::new(bits, self.tower.depth(), self.convention.version()))
    }

    /// Follows `bits` from the root. A full path yields the element, a
    /// proper prefix the cell it reaches.
    pub fn decode_bits(&self, bits: &[bool]) -> Result<Decoded> {
        let mut node = &self.nodes[0];
        for (i, &bit) in bits.iter().enumerate() {
            match node.children {
                Some([l, r]) => node = &self.nodes[if bit { r } else { l }],
                None => return Err(Error::InvalidCode { index: i }),
            }
        }
        if node.children.is_none() && node.level == self.tower.depth() {
            return CoherentElement::lift(&self.tower, node.members[0]).map(Decoded::Element);
        }
        Ok(Decoded::Cell(Cell {
            tower: self.tower.clone(),
            level: node.level,
            members: node.members.clone(),
        }))
    }

    pub fn decode(&self, code: &BitSequence) -> Result<Decoded> {
        if code.convention_version != self.convention.version {
            return Err(Error::InvalidParameter(format!(
                "code uses convention {} but the tree uses {}",
                code.convention_version, self.convention.version
            )));
        }
        self.decode_bits(&code.bits)
    }
}

pub fn encode(tree: &PartitionTree, x: &CoherentElement) -> Result<BitSequence> {
    tree.encode(x)
}

pub fn decode(tree: &PartitionTree, code: &BitSequence) -> Result<Decoded> {
    tree.decode(code)
}

#[derive(Clone, Debug)]
pub enum Decoded {
    Element(CoherentElement),
    Cell(Cell),
}

/// A node of the partition tree: the coherent elements whose level-`level`
/// component lies in `members`.
#[derive(Clone, Debug)]
pub struct Cell {
    tower: Arc<Tower>,
    level: usize,
    members: Vec<usize>,
}

impl Cell {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: &CoherentElement) -> bool {
        self.tower.same_as(x.tower()) && self.members.binary_search(&x.at(self.level)).is_ok()
    }

    /// Every coherent element in the cell, by top-level index.
    pub fn elements(&self) -> Vec<CoherentElement> {
        let d = self.tower.depth();
        let mut tops: Vec<usize> = self
            .members
            .iter()
            .flat_map(|&m| {
                Cylinder::new(&self.tower, self.level, m)
                    .and_then(|z| z.members_at(d))
                    .expect("cell members are valid")
            })
            .collect();
        tops.sort_unstable();
        tops.into_iter()
            .map(|t| CoherentElement::lift(&self.tower, t).expect("index in range"))
            .collect()
    }

    /// The coarsest coset cylinder equal to this cell, if there is one.
    pub fn cylinder(&self) -> Option<Cylinder> {
        let (mut level, mut members) = (self.level, self.members.clone());
        loop {
            if members.len() == 1 {
                return Cylinder::new(&self.tower, level, members[0]).ok();
            }
            let base = self.tower.project(level, members[0], level - 1).ok()?;
            if self.tower.fiber(level - 1, base) != members.as_slice() {
                return None;
            }
            if level == 1 {
                return Some(Cylinder::whole(&self.tower));
            }
            level -= 1;
            members = vec![base];
        }
    }
}

/// Per-level fixed-width labels of one coherent element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCode {
    blocks: Vec<Vec<bool>>,
    widths: Vec<usize>,
    label_widths: Vec<usize>,
    m_values: Vec<usize>,
    convention_version: String,
}

impl BlockCode {
    pub fn blocks(&self) -> &[Vec<bool>] {
        &self.blocks
    }

    /// Width of each padded block.
    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    /// Width of each block before padding.
    pub fn label_widths(&self) -> &[usize] {
        &self.label_widths
    }

    pub fn m_values(&self) -> &[usize] {
        &self.m_values
    }

    /// `ceil(log2 m_k)`, the fewest bits that can name every level-`k` element.
    pub fn min_widths(&self) -> Vec<usize> {
        self.m_values.iter().map(|&m| ceil_log2(m)).collect()
    }

    pub fn convention_version(&self) -> &str {
        &self.convention_version
    }

    /// Block `k` (1-based) without its leading pad bits.
    pub fn stripped(&self, k: usize) -> Result<&[bool]> {
        self.check_index(k)?;
        let block = &self.blocks[k - 1];
        Ok(&block[block.len() - self.label_widths[k - 1]..])
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.blocks.len() {
            Err(Error::LevelOrder(format!("block {k} outside 1..={}", self.blocks.len())))
        } else {
            Ok(())
        }
    }

    /// `b1:...|b2:...|...`
    pub fn payload(&self) -> String {
        self.blocks
            .iter()
            .enumerate()
            .map(|(i, b)| format!("b{}:{}", i + 1, bits_to_string(b)))
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Fixed-width block labels of `x`. Each block is left-padded with zeros to
/// `max(ceil(log2 m_k), label width)`; the two agree unless the fibers are
/// too uneven for `ceil(log2 m_k)` bits to hold a prefix-coherent label.
pub fn block_encode(tower: &Arc<Tower>, x: &CoherentElement) -> Result<BlockCode> {
    if !tower.same_as(x.tower()) {
        return Err(Error::TowerMismatch);
    }
    let d = tower.depth();
    if tower.order(d) > MAX_ORDER {
        return Err(Error::SizeLimit(format!("block codes limited to order {MAX_ORDER}")));
    }
    let mut label = Vec::new();
    let mut code = BlockCode {
        blocks: Vec::with_capacity(d),
        widths: Vec::with_capacity(d),
        label_widths: Vec::with_capacity(d),
        m_values: Vec::with_capacity(d),
        convention_version: CONVENTION_VERSION.to_string(),
    };
    let mut base = 0;
    for k in 1..=d {
        let fiber = tower.fiber(k - 1, base);
        let pos = fiber
            .binary_search(&x.at(k))
            .map_err(|_| Error::IncoherentAtLevel(k - 1))?;
        label.extend(to_bits(pos, ceil_log2(fiber.len())));
        let m = tower.order(k);
        let width = ceil_log2(m).max(label.len());
        let mut block = vec![false; width - label.len()];
        block.extend_from_slice(&label);
        code.blocks.push(block);
        code.widths.push(width);
        code.label_widths.push(label.len());
        code.m_values.push(m);
        base = x.at(k);
    }
    Ok(code)
}

/// Block `k` with pad bits removed, cut to the label width of level `k-1`.
/// Coherence means this equals the stripped block `k-1`.
pub fn block_truncate(code: &BlockCode, k: usize) -> Result<Vec<bool>> {
    let stripped = code.stripped(k)?;
    let keep = if k == 1 { 0 } else { code.label_widths[k - 2] };
    Ok(stripped[..keep].to_vec())
}

/// Inverts [`block_encode`], checking every block.
pub fn block_decode(tower: &Arc<Tower>, blocks: &[Vec<bool>]) -> Result<CoherentElement> {
    let d = tower.depth();
    if blocks.len() != d {
        return Err(Error::LengthMismatch { left: d, right: blocks.len() });
    }
    let top = &blocks[d - 1];
    // fibers over one bond all have the same size, so any path gives the widths
    let mut widths = Vec::with_capacity(d);
    let mut base = 0;
    for k in 0..d {
        let fiber = tower.fiber(k, base);
        widths.push(ceil_log2(fiber.len()));
        base = fiber[0];
    }
    let label_len: usize = widths.iter().sum();
    if label_len > top.len() {
        return Err(Error::InvalidCode { index: 0 });
    }
    let pad = top.len() - label_len;
    if let Some(i) = top[..pad].iter().position(|&b| b) {
        return Err(Error::InvalidCode { index: i });
    }
    let mut cursor = pad;
    let mut components = Vec::with_capacity(d);
    let mut base = 0;
    for (k, &w) in widths.iter().enumerate() {
        let fiber = tower.fiber(k, base);
        let pos = from_bits(&top[cursor..cursor + w]);
        if pos >= fiber.len() {
            return Err(Error::InvalidCode { index: cursor });
        }
        cursor += w;
        base = fiber[pos];
        components.push(base);
    }
    let x = crate::tower::coherent_element(tower, components)?;
    let again = block_encode(tower, &x)?;
    if again.blocks != blocks {
        let k = again.blocks.iter().zip(blocks).position(|(a, b)| a != b).unwrap_or(0);
        return Err(Error::InvalidCode { index: k });
    }
    Ok(x)
}

/// Parses `b1:...|b2:...`.
pub fn parse_block_payload(text: &str) -> Result<Vec<Vec<bool>>> {
    text.split('|')
        .enumerate()
        .map(|(i, part)| {
            let (tag, bits) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("block '{part}' needs a 'b<k>:' tag")))?;
            if tag.trim() != format!("b{}", i + 1) {
                return Err(Error::Parse(format!("expected tag b{}, got '{tag}'", i + 1)));
            }
            parse_bits(bits.trim())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Bits(Vec<bool>),
    Blocks(Vec<Vec<bool>>),
}

/// A code as written to disk: `conv=<version>;<tower line>;bits=<0/1>` or
/// `conv=<version>;<tower line>;blocks=b1:...|b2:...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerializedCode {
    pub convention: String,
    pub tower: String,
    pub payload: Payload,
}

impl fmt::Display for SerializedCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conv={};{};", self.convention, self.tower)?;
        match &self.payload {
            Payload::Bits(b) => write!(f, "bits={}", bits_to_string(b)),
            Payload::Blocks(blocks) => {
                let text: Vec<String> = blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| format!("b{}:{}", i + 1, bits_to_string(b)))
                    .collect();
                write!(f, "blocks={}", text.join("|"))
            }
        }
    }
}

impl FromStr for SerializedCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().splitn(3, ';');
        let conv = parts.next().unwrap_or_default();
        let convention = conv
            .strip_prefix("conv=")
            .ok_or_else(|| Error::Parse(format!("serialized code must start with conv=, got '{conv}'")))?
            .to_string();
        let tower = parts
            .next()
            .ok_or_else(|| Error::Parse("serialized code lacks the tower line".into()))?
            .trim()
            .to_string();
        let body = parts
            .next()
            .ok_or_else(|| Error::Parse("serialized code lacks a payload".into()))?
            .trim();
        let payload = if let Some(bits) = body.strip_prefix("bits=") {
            Payload::Bits(parse_bits(bits)?)
        } else if let Some(blocks) = body.strip_prefix("blocks=") {
            Payload::Blocks(parse_block_payload(blocks)?)
        } else {
            return Err(Error::Parse(format!("unknown payload '{body}'")));
        };
        Ok(SerializedCode { convention, tower, payload })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{coherent_elements, make_tower, TowerSpec};

    fn tower(line: &str) -> Arc<Tower> {
        make_tower(&TowerSpec::parse_line(line).unwrap()).unwrap()
    }

    fn element(t: &Arc<Tower>, labels: &[&str]) -> CoherentElement {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        CoherentElement::from_labels(t, &labels).unwrap()
    }

    fn code(text: &str) -> BitSequence {
        BitSequence::parse(text, 0, CONVENTION_VERSION).unwrap()
    }

    #[test]
    fn binary_tower_codes_are_coordinates() {
        let t = tower("binary depth=3");
        let tree = build_partition_tree(&t, &EncodingConvention::default()).unwrap();
        for x in coherent_elements(&t) {
            let label = x.labels().pop().unwrap();
            assert_eq!(tree.encode(&x).unwrap().to_string(), label);
        }
    }

    #[test]
    fn cyclotomic_three_codes() {
        let t1 = tower("cyclotomic p=3 depth=1");
        let tree1 = build_partition_tree(&t1, &EncodingConvention::default()).unwrap();
        assert_eq!(tree1.encode(&element(&t1, &["1"])).unwrap().to_string(), "0");
        assert_eq!(tree1.encode(&element(&t1, &["2"])).unwrap().to_string(), "1");

        let t = tower("cyclotomic p=3 depth=2");
        let tree = build_partition_tree(&t, &EncodingConvention::default()).unwrap();
        let codes: Vec<String> = ["2", "5", "8"]
            .iter()
            .map(|top| tree.encode(&element(&t, &["2", top])).unwrap().to_string())
            .collect();
        assert_eq!(codes, vec!["100", "101", "11"]);
        assert_eq!(tree.leaf_count(), 6);
    }

    #[test]
    fn decode_prefix_gives_cell() {
        let t = tower("cyclotomic p=3 depth=2");
        let tree = build_partition_tree(&t, &EncodingConvention::default()).unwrap();
        match tree.decode(&code("10")).unwrap() {
            Decoded::Cell(cell) => {
                let members: Vec<String> = cell.elements().iter().map(|x| x.to_string()).collect();
                assert_eq!(members, vec!["2,2", "2,5"]);
                assert!(cell.cylinder().is_none());
            }
            other => panic!("expected a cell, got {other:?}"),
        }
        match tree.decode(&code("1")).unwrap() {
            Decoded::Cell(cell) => {
                let z = cell.cylinder().unwrap();
                assert_eq!((z.level(), t.level(1).unwrap().label(z.base())), (1, "2"));
            }
            other => panic!("expected a cell, got {other:?}"),
        }
        match tree.decode(&code("")).unwrap() {
            Decoded::Cell(cell) => assert_eq!(cell.cylinder().unwrap().level(), 0),
            other => panic!("expected the root, got {other:?}"),
        }
        assert_eq!(tree.decode(&code("110")).unwrap_err(), Error::InvalidCode { index: 2 });
    }

    #[test]
    fn decode_binary_word() {
        let t = tower("binary depth=2");
        let tree = build_partition_tree(&t, &EncodingConvention::default()).unwrap();
        match tree.decode(&code("01")).unwrap() {
            Decoded::Element(x) => assert_eq!(x.labels(), vec!["0", "01"]),
            other => panic!("expected an element, got {other:?}"),
        }
    }

    #[test]
    fn convention_version_is_checked() {
        let t = tower("binary depth=2");
        let tree = build_partition_tree(&t, &EncodingConvention::default()).unwrap();
        let foreign = BitSequence::parse("01", 2, "cma-v0").unwrap();
        assert!(tree.decode(&foreign).is_err());
        assert_ne!(foreign, code("01"));
    }

    #[test]
    fn tower_mismatch() {
        let a = tower("binary depth=2");
        let b = tower("padic p=2 depth=2");
        let tree = build_partition_tree(&a, &EncodingConvention::default()).unwrap();
        let x = CoherentElement::lift(&b, 3).unwrap();
        assert_eq!(tree.encode(&x).unwrap_err(), Error::TowerMismatch);
    }

    #[test]
    fn block_examples() {
        let t = tower("cyclotomic p=3 depth=2");
        let x = element(&t, &["2", "5"]);
        let code = block_encode(&t, &x).unwrap();
        assert_eq!(code.payload(), "b1:1|b2:101");
        assert_eq!(code.widths(), &[1, 3]);
        assert_eq!(code.min_widths(), vec![1, 3]);
        assert!(block_truncate(&code, 1).unwrap().is_empty());
        assert_eq!(block_truncate(&code, 2).unwrap(), vec![true]);
        assert_eq!(block_truncate(&code, 3).unwrap_err().name(), "LevelOrder");
        assert_eq!(block_decode(&t, code.blocks()).unwrap(), x);
    }

    #[test]
    fn trivial_level_has_empty_block() {
        let t = tower("cyclotomic p=2 depth=2");
        let x = CoherentElement::lift(&t, 1).unwrap();
        let code = block_encode(&t, &x).unwrap();
        assert_eq!(code.m_values(), &[1, 2]);
        assert!(code.blocks()[0].is_empty());
        assert_eq!(code.widths()[1], 1);
    }

    #[test]
    fn padding_is_on_the_left() {
        // level 2 of aut_f2ab: 6 * 16 elements, label = 3 + 4 bits, no padding
        let t = tower("aut_f2ab depth=2");
        let code = block_encode(&t, &CoherentElement::lift(&t, 95).unwrap()).unwrap();
        assert_eq!(code.widths(), &[3, 7]);
        // units mod 16: orders 1, 2, 4, 8; level 3 label has 2 bits but width 2
        let t = tower("cyclotomic p=5 depth=2");
        let code = block_encode(&t, &CoherentElement::lift(&t, 19).unwrap()).unwrap();
        assert_eq!(code.m_values(), &[4, 20]);
        assert_eq!(code.label_widths(), &[2, 5]);
        assert_eq!(code.widths(), &[2, 5]);
    }

    #[test]
    fn wide_labels_are_not_cut() {
        // fibers of size 3 three times: label needs 6 bits, ceil(log2 54) = 6,
        // and at depth 4 the label needs 7 bits while ceil(log2 54) = 6
        let t = tower("cyclotomic p=3 depth=4");
        let x = CoherentElement::lift(&t, 53).unwrap();
        let code = block_encode(&t, &x).unwrap();
        assert_eq!(code.min_widths(), vec![1, 3, 5, 6]);
        assert_eq!(code.label_widths(), &[1, 3, 5, 7]);
        assert_eq!(code.widths(), &[1, 3, 5, 7]);
        for k in 2..=4 {
            assert_eq!(block_truncate(&code, k).unwrap(), code.stripped(k - 1).unwrap());
        }
    }

    #[test]
    fn serialized_round_trip() {
        let s: SerializedCode = "conv=cma-v1;tower cyclotomic p=3 depth=2;bits=101".parse().unwrap();
        assert_eq!(s.tower, "tower cyclotomic p=3 depth=2");
        assert_eq!(s.payload, Payload::Bits(vec![true, false, true]));
        assert_eq!(s.to_string(), "conv=cma-v1;tower cyclotomic p=3 depth=2;bits=101");
        let b: SerializedCode = "conv=cma-v1;tower binary depth=2;blocks=b1:0|b2:01".parse().unwrap();
        assert_eq!(b.to_string(), "conv=cma-v1;tower binary depth=2;blocks=b1:0|b2:01");
        assert!("tower binary depth=2;bits=0".parse::<SerializedCode>().is_err());
        assert!(parse_block_payload("b2:0|b1:1").is_err());
    }
}
