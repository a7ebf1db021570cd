//! Polar code definition, encoding, and decode-tree geometry.
//!
//! A polar code of block length `N = 2^n` is described by its tree depth `n`
//! and an information set: the set of input positions that carry data. All
//! other positions are frozen to 0. Encoding is the modulo-2 product with the
//! `n`-fold Kronecker power of the kernel `[[1,0],[1,1]]` in natural
//! (non-bit-reversed) order.
//!
//! Leaf indices are 1-based in the public interface (information sets, code
//! description files); ranges handed out by [`DecodeNode`] are 0-based and
//! documented as such.

use crate::error::{invalid, Error, Result};

/// A polar code: tree depth `n`, block length `N = 2^n`, and information set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarCode {
    n: u32,
    /// `info_mask[i]` is true when 0-based leaf `i` carries an information bit.
    info_mask: Vec<bool>,
}

impl PolarCode {
    /// Builds a code from a 1-based information set.
    ///
    /// The indices must be distinct and lie in `1..=N`; they may be given in
    /// any order. Fails with the first violated invariant.
    pub fn new(n: u32, info_set: &[usize]) -> Result<Self> {
        if !(1..=30).contains(&n) {
            return invalid(format!("tree depth n={n} outside supported range 1..=30"));
        }
        let block = 1usize << n;
        let mut mask = vec![false; block];
        for &idx in info_set {
            if idx < 1 || idx > block {
                return invalid(format!("information index {idx} out of range 1..={block}"));
            }
            if mask[idx - 1] {
                return invalid(format!("duplicate information index {idx}"));
            }
            mask[idx - 1] = true;
        }
        Ok(Self { n, info_mask: mask })
    }

    /// Builds a code from a 0-based information mask of length `2^n`.
    pub fn from_info_mask(n: u32, info_mask: Vec<bool>) -> Result<Self> {
        if !(1..=30).contains(&n) {
            return invalid(format!("tree depth n={n} outside supported range 1..=30"));
        }
        if info_mask.len() != 1usize << n {
            return invalid(format!(
                "info mask length {} does not match block length {}",
                info_mask.len(),
                1usize << n
            ));
        }
        Ok(Self { n, info_mask })
    }

    /// Tree depth `n`.
    pub fn tree_depth(&self) -> u32 {
        self.n
    }

    /// Block length `N = 2^n`.
    pub fn block_length(&self) -> usize {
        self.info_mask.len()
    }

    /// Number of information bits `K`.
    pub fn dimension(&self) -> usize {
        self.info_mask.iter().filter(|&&b| b).count()
    }

    /// Code rate `K/N`.
    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.block_length() as f64
    }

    /// The information set as ascending 1-based indices.
    pub fn info_set(&self) -> Vec<usize> {
        self.info_mask
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i + 1))
            .collect()
    }

    /// Whether 0-based leaf `i` carries an information bit.
    pub fn is_info(&self, i: usize) -> bool {
        self.info_mask[i]
    }

    /// The information mask, indexed by 0-based leaf.
    pub fn info_mask(&self) -> &[bool] {
        &self.info_mask
    }

    /// Number of information leaves inside a 0-based leaf range.
    pub fn count_info_in(&self, range: std::ops::Range<usize>) -> usize {
        self.info_mask[range].iter().filter(|&&b| b).count()
    }

    /// The root of the decode tree `T_n`.
    pub fn root(&self) -> DecodeNode {
        DecodeNode::root(self.n)
    }
}

/// Validates an externally supplied code description.
///
/// Unlike [`PolarCode::new`], this takes the claimed block length explicitly
/// so that `N != 2^n` mismatches in files can be reported. Returns the first
/// violated invariant.
pub fn validate_code(n: u32, block_length: usize, info_set: &[usize]) -> Result<()> {
    if n < 1 {
        return invalid("tree depth n must be at least 1");
    }
    if block_length != 1usize.checked_shl(n).unwrap_or(0) {
        return invalid(format!("block length {block_length} is not 2^{n}"));
    }
    PolarCode::new(n, info_set).map(|_| ())
}

/// A node of the decode tree `T_n`, identified by depth and in-level index.
///
/// The root has depth 0; leaves have depth `n`. A node at depth `d` with index
/// `i` covers the 0-based leaf range `[i * 2^(n-d), (i+1) * 2^(n-d))` and
/// carries messages of size `N_v = 2^(n-d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DecodeNode {
    tree_depth: u32,
    depth: u32,
    index: usize,
}

impl DecodeNode {
    /// The root node of `T_n`.
    pub fn root(tree_depth: u32) -> Self {
        Self { tree_depth, depth: 0, index: 0 }
    }

    /// A node at `depth` with in-level `index` in `T_n`.
    pub fn new(tree_depth: u32, depth: u32, index: usize) -> Result<Self> {
        if depth > tree_depth {
            return invalid(format!("node depth {depth} exceeds tree depth {tree_depth}"));
        }
        if index >= 1usize << depth {
            return invalid(format!("node index {index} out of range at depth {depth}"));
        }
        Ok(Self { tree_depth, depth, index })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Message size `N_v = 2^(n - depth)`.
    pub fn message_size(&self) -> usize {
        1usize << (self.tree_depth - self.depth)
    }

    /// The 0-based leaf indices descended from this node.
    pub fn leaf_range(&self) -> std::ops::Range<usize> {
        let size = self.message_size();
        self.index * size..(self.index + 1) * size
    }

    pub fn is_leaf(&self) -> bool {
        self.depth == self.tree_depth
    }

    /// Left and right children; the left child covers the lower leaf half.
    pub fn children(&self) -> Result<(DecodeNode, DecodeNode)> {
        if self.is_leaf() {
            return invalid("leaf node has no children");
        }
        let left = DecodeNode {
            tree_depth: self.tree_depth,
            depth: self.depth + 1,
            index: 2 * self.index,
        };
        let right = DecodeNode { index: 2 * self.index + 1, ..left };
        Ok((left, right))
    }
}

/// In-place butterfly form of the polar transform `x = u G_n` over GF(2).
///
/// Natural (non-bit-reversed) order. `G_n` is an involution, so applying this
/// twice restores the input.
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        let mut base = 0;
        while base < n {
            for j in base..base + half {
                bits[j] ^= bits[j + half];
            }
            base += 2 * half;
        }
        half *= 2;
    }
}

/// Encodes an input vector: `x = u G_n` over GF(2).
///
/// `u` must have length `N`, values in {0,1}, and zeros at all frozen
/// positions.
pub fn encode(u: &[u8], code: &PolarCode) -> Result<Vec<u8>> {
    let n = code.block_length();
    if u.len() != n {
        return invalid(format!("input length {} does not match block length {n}", u.len()));
    }
    for (i, &b) in u.iter().enumerate() {
        if b > 1 {
            return invalid(format!("input value {b} at position {} is not a bit", i + 1));
        }
        if b == 1 && !code.is_info(i) {
            return invalid(format!("frozen position {} carries a nonzero bit", i + 1));
        }
    }
    let mut x = u.to_vec();
    polar_transform(&mut x);
    Ok(x)
}

/// A parsed code description file.
///
/// Format: one `key=value` per line with keys `n` (tree depth), optional `L`
/// (list size), and `A` (comma-separated 1-based information indices). Blank
/// lines and `#` comments are ignored.
#[derive(Debug, Clone)]
pub struct CodeFile {
    pub code: PolarCode,
    pub list_size: Option<usize>,
}

impl CodeFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<u32> = None;
        let mut list_size: Option<usize> = None;
        let mut info: Option<Vec<usize>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let value = value.trim();
            match key.trim() {
                "n" => {
                    n = Some(value.parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad tree depth {value:?}", lineno + 1))
                    })?)
                }
                "L" => {
                    list_size = Some(value.parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad list size {value:?}", lineno + 1))
                    })?)
                }
                "A" => {
                    let mut set = Vec::new();
                    if !value.is_empty() {
                        for part in value.split(',') {
                            set.push(part.trim().parse().map_err(|_| {
                                Error::Parse(format!("line {}: bad index {part:?}", lineno + 1))
                            })?);
                        }
                    }
                    info = Some(set);
                }
                other => {
                    return Err(Error::Parse(format!("line {}: unknown key {other:?}", lineno + 1)))
                }
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing n= line".into()))?;
        let info = info.ok_or_else(|| Error::Parse("missing A= line".into()))?;
        Ok(Self { code: PolarCode::new(n, &info)?, list_size })
    }

    /// Renders the description in the file format accepted by [`parse`].
    ///
    /// [`parse`]: CodeFile::parse
    pub fn render(&self) -> String {
        let mut out = format!("n={}\n", self.code.tree_depth());
        if let Some(l) = self.list_size {
            out.push_str(&format!("L={l}\n"));
        }
        let set: Vec<String> = self.code.info_set().iter().map(|i| i.to_string()).collect();
        out.push_str(&format!("A={}\n", set.join(",")));
        out
    }
}
