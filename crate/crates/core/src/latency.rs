//! Clock-cycle cost model for SCL decoding.
//!
//! The decode tree is pruned at Rate-1, Rate-0, and Repetition subtrees, and
//! each node kind is charged a fixed number of clock cycles:
//!
//! | kind       | cycles                  |
//! |------------|-------------------------|
//! | Leaf       | 1                       |
//! | Rate-1     | min(N_v, L)             |
//! | Rate-0     | log2(N_v)               |
//! | Repetition | 1 + log2(N_v)           |
//! | Standard   | 3 + left + right        |
//!
//! A standard node spends one cycle on each of the left LLRs, right LLRs, and
//! the bit-estimate merge, plus whatever its children take. Only the Rate-1
//! cost depends on the list size. Information-leaf path sorting is modelled
//! as a single cycle regardless of L.

use crate::code::{DecodeNode, PolarCode};
use crate::construction::{construct_code, design_snr_for_rate};
use crate::error::{invalid, Result};
use rayon::prelude::*;

/// Classification of a decode-tree node given the information set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    Rate1,
    Rate0,
    Repetition,
    Standard,
}

impl std::fmt::Display for NodeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            NodeKind::Leaf => "leaf",
            NodeKind::Rate1 => "rate1",
            NodeKind::Rate0 => "rate0",
            NodeKind::Repetition => "repetition",
            NodeKind::Standard => "standard",
        };
        f.write_str(name)
    }
}

/// Classifies a node. Checks run in order: Leaf, Rate-1 (all leaves
/// informational), Rate-0 (all frozen), Repetition (exactly the rightmost
/// leaf informational), else Standard.
pub fn classify_node(v: &DecodeNode, code: &PolarCode) -> NodeKind {
    if v.is_leaf() {
        return NodeKind::Leaf;
    }
    let range = v.leaf_range();
    let rightmost = range.end - 1;
    let info = code.count_info_in(range);
    if info == v.message_size() {
        NodeKind::Rate1
    } else if info == 0 {
        NodeKind::Rate0
    } else if info == 1 && code.is_info(rightmost) {
        NodeKind::Repetition
    } else {
        NodeKind::Standard
    }
}

/// Clock cycles to decode the subtree rooted at `v`.
pub fn tc_node(v: &DecodeNode, code: &PolarCode, list_size: usize) -> u64 {
    let log2_size = (code.tree_depth() - v.depth()) as u64;
    match classify_node(v, code) {
        NodeKind::Leaf => 1,
        NodeKind::Rate1 => v.message_size().min(list_size) as u64,
        NodeKind::Rate0 => log2_size,
        NodeKind::Repetition => 1 + log2_size,
        NodeKind::Standard => {
            let (l, r) = v.children().expect("standard node has children");
            3 + tc_node(&l, code, list_size) + tc_node(&r, code, list_size)
        }
    }
}

/// One visited node of the pruned decode tree and its cycle contribution.
/// Standard nodes contribute their own 3 cycles; pruned subtrees contribute
/// their full cost.
#[derive(Debug, Clone)]
pub struct NodeCost {
    pub node: DecodeNode,
    pub kind: NodeKind,
    pub cost: u64,
}

/// Total decoding cost plus the per-node breakdown.
#[derive(Debug, Clone)]
pub struct TcReport {
    pub total: u64,
    pub per_node: Vec<NodeCost>,
}

/// Evaluates the cost model from the root, with a per-node breakdown in
/// pre-order over the pruned tree. The contributions sum to `total`.
pub fn tc_code(code: &PolarCode, list_size: usize) -> TcReport {
    fn walk(v: DecodeNode, code: &PolarCode, list_size: usize, out: &mut Vec<NodeCost>) -> u64 {
        let kind = classify_node(&v, code);
        if kind == NodeKind::Standard {
            out.push(NodeCost { node: v, kind, cost: 3 });
            let (l, r) = v.children().expect("standard node has children");
            3 + walk(l, code, list_size, out) + walk(r, code, list_size, out)
        } else {
            let cost = tc_node(&v, code, list_size);
            out.push(NodeCost { node: v, kind, cost });
            cost
        }
    }
    let mut per_node = Vec::new();
    let total = walk(code.root(), code, list_size, &mut per_node);
    debug_assert_eq!(total, per_node.iter().map(|c| c.cost).sum::<u64>());
    TcReport { total, per_node }
}

/// Worst-case cost over all information sets: the all-standard recurrence
/// `C(d) = 3 + 2 C(d-1)`, `C(0) = 1`, which solves to `2^(n+2) - 3`.
pub fn tc_worst_case_bound(n: u32) -> u64 {
    (1u64 << (n + 2)) - 3
}

/// How each sweep point picks its construction design SNR.
#[derive(Debug, Clone, Copy)]
pub enum DesignRule {
    /// SNR at which BPSK capacity equals `rate + 0.02` (per-rate matching).
    CapacityMatched,
    /// A fixed design SNR in dB for every rate point.
    FixedSnrDb(f64),
}

/// One row of a rate sweep.
#[derive(Debug, Clone)]
pub struct RateSweepRow {
    pub rate: f64,
    pub k: usize,
    pub tc: u64,
}

/// Evaluates the cost model across a rate grid, constructing each code via
/// density evolution at the design rule's SNR.
pub fn tc_rate_sweep(
    n: u32,
    list_size: usize,
    rates: &[f64],
    design: DesignRule,
) -> Result<Vec<RateSweepRow>> {
    if rates.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return invalid("rates must lie strictly inside (0, 1)");
    }
    let block = 1usize << n;
    rates
        .par_iter()
        .map(|&rate| {
            let snr_db = match design {
                DesignRule::CapacityMatched => design_snr_for_rate(rate)?,
                DesignRule::FixedSnrDb(x) => x,
            };
            let k = ((rate * block as f64).round() as usize).clamp(0, block);
            let code = construct_code(n, k, snr_db)?;
            Ok(RateSweepRow { rate, k, tc: tc_code(&code, list_size).total })
        })
        .collect()
}
