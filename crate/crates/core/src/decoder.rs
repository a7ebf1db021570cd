//! Successive-cancellation (SC) and SC-list (SCL) decoders over the decode
//! tree, with optional fast handling of all-frozen (Rate-0) and
//! all-information (Rate-1) subtrees.
//!
//! The list decoder tracks up to `L` candidate paths. At every information
//! leaf each path forks on the bit value and the `L` candidates with the
//! smallest path metric survive. With fast nodes enabled, a Rate-0 subtree
//! only charges the metric for its input LLRs and a Rate-1 subtree forks
//! only on the `min(N_v, L)` least-reliable positions before hard-deciding
//! the rest.
//!
//! Fast/plain equivalence: Rate-0 handling, single-path decoding (`L = 1`),
//! and Rate-1 nodes entered by one live path match the plain descent bit for
//! bit. When several paths enter a Rate-1 node, the shortcut's metric
//! increments only telescope to the plain decoder's at complete-subtree
//! boundaries, so the in-node prunes compare different partial sums and the
//! survivor sets can differ on a small fraction of noisy frames.

use std::rc::Rc;

use crate::code::{polar_transform, PolarCode};
use crate::error::{invalid, Result};

/// Input LLRs are clamped to this magnitude, keeping every combination and
/// metric finite while metric differences stay far above the test
/// tolerances.
pub const LLR_MAX: f64 = 40.0;

/// Numerically stable `ln(1 + e^z)`.
pub fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Check-side LLR combination `2 arctanh(tanh(a/2) tanh(b/2))`, clamped to
/// `±LLR_MAX`.
///
/// Evaluated through the equivalent log-domain form
/// `sign(a) sign(b) (min(|a|,|b|) + ln(1+e^{-(|a|+|b|)}) - ln(1+e^{-||a|-|b||}))`,
/// which stays accurate where the tanh product saturates. See
/// [`f_combine_minsum`] for the approximation.
pub fn f_combine(a: f64, b: f64) -> f64 {
    let (aa, ab) = (a.abs(), b.abs());
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let magnitude = aa.min(ab) + log1p_exp(-(aa + ab)) - log1p_exp(-(aa - ab).abs());
    (sign * magnitude).clamp(-LLR_MAX, LLR_MAX)
}

/// Min-sum approximation of [`f_combine`]: `sign(a) sign(b) min(|a|, |b|)`.
///
/// Off by at most `ln 2` from the exact form; kept for speed studies and
/// excluded from the fast/plain equivalence guarantees.
pub fn f_combine_minsum(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let v = sign * a.abs().min(b.abs());
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        v.clamp(-LLR_MAX, LLR_MAX)
    }
}

/// Variable-side LLR combination: `b + (1 - 2 beta) a`, clamped to `±LLR_MAX`.
pub fn g_combine(a: f64, b: f64, beta: u8) -> f64 {
    let v = if beta == 0 { b + a } else { b - a };
    v.clamp(-LLR_MAX, LLR_MAX)
}

/// Bit-estimate combination: first half `left XOR right`, second half `right`.
pub fn beta_combine(left: &[u8], right: &[u8]) -> Result<Vec<u8>> {
    if left.len() != right.len() {
        return invalid(format!(
            "beta halves have different lengths: {} vs {}",
            left.len(),
            right.len()
        ));
    }
    Ok(merge_beta(left, right))
}

fn merge_beta(left: &[u8], right: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(left.len() * 2);
    out.extend(left.iter().zip(right).map(|(l, r)| l ^ r));
    out.extend_from_slice(right);
    out
}

/// Path-metric update for one decided bit: `pm + ln(1 + e^{-(1-2u) alpha})`.
///
/// The penalty is zero when the decision agrees with a confident LLR and
/// accumulates otherwise; it is never negative.
pub fn pm_update(pm: f64, u_hat: u8, alpha: f64) -> f64 {
    let z = if u_hat == 0 { -alpha } else { alpha };
    let penalty = log1p_exp(z);
    debug_assert!(penalty >= 0.0);
    pm + penalty
}

/// Rate-0 path-metric update: charges `Σ ln(1 + e^{-alpha_k})` for an
/// all-frozen subtree without descending into it.
pub fn rate0_pm_update(pm: f64, alpha: &[f64]) -> f64 {
    alpha.iter().fold(pm, |m, &a| m + log1p_exp(-a))
}

fn hard_bit(alpha: f64) -> u8 {
    // Ties (alpha == 0) decide bit 0.
    if alpha < 0.0 {
        1
    } else {
        0
    }
}

/// A survivor of a fast Rate-1 node computation.
#[derive(Debug, Clone)]
pub struct Rate1Survivor {
    /// Index of the incoming path this survivor descends from.
    pub parent: usize,
    /// Updated path metric (every position charged).
    pub pm: f64,
    /// Decided subtree codeword bits.
    pub beta: Vec<u8>,
    /// Whether any position deviates from the hard decision.
    pub flipped: bool,
}

/// Fast Rate-1 node rule for list decoding.
///
/// Each incoming path is `(pm, alpha)` with `alpha` the node's input LLRs.
/// Positions are processed in ascending `|alpha|` order per path: the first
/// `min(N_v, L)` fork the path (pruning back to `L` candidates after each),
/// the rest take the hard decision `beta = 0 iff alpha >= 0`. The metric is
/// charged for every position. A flip at a position costs exactly `|alpha|`
/// more than the hard decision, so candidates flipping outside the
/// least-reliable set can never reach the survivor list.
pub fn rate1_fast_decode(paths: &[(f64, &[f64])], list_size: usize) -> Vec<Rate1Survivor> {
    assert!(!paths.is_empty() && list_size >= 1);
    let n_v = paths[0].1.len();

    struct Prep {
        order: Vec<usize>,
        hard_penalty: Vec<f64>,
        magnitude: Vec<f64>,
    }
    let preps: Vec<Prep> = paths
        .iter()
        .map(|(_, alpha)| {
            debug_assert_eq!(alpha.len(), n_v);
            let magnitude: Vec<f64> = alpha.iter().map(|a| a.abs()).collect();
            let mut order: Vec<usize> = (0..n_v).collect();
            order.sort_by(|&x, &y| magnitude[x].total_cmp(&magnitude[y]).then(x.cmp(&y)));
            let hard_penalty = magnitude.iter().map(|&m| log1p_exp(-m)).collect();
            Prep { order, hard_penalty, magnitude }
        })
        .collect();

    #[derive(Clone)]
    struct Cand {
        parent: usize,
        pm: f64,
        flips: Vec<usize>,
        seq: u64,
    }
    let mut next_seq = paths.len() as u64;
    let mut cands: Vec<Cand> = paths
        .iter()
        .enumerate()
        .map(|(j, &(pm, _))| Cand { parent: j, pm, flips: Vec::new(), seq: j as u64 })
        .collect();

    let splits = n_v.min(list_size);
    for t in 0..splits {
        let mut forked = Vec::with_capacity(cands.len() * 2);
        for c in cands.drain(..) {
            let prep = &preps[c.parent];
            let pos = prep.order[t];
            let h = prep.hard_penalty[pos];
            let mut flip = c.clone();
            flip.pm = c.pm + h + prep.magnitude[pos];
            flip.flips.push(pos);
            flip.seq = next_seq;
            next_seq += 1;
            let mut keep = c;
            keep.pm += h;
            forked.push(keep);
            forked.push(flip);
        }
        forked.sort_by(|a, b| a.pm.total_cmp(&b.pm).then(a.seq.cmp(&b.seq)));
        forked.truncate(list_size);
        cands = forked;
    }

    cands
        .into_iter()
        .map(|mut c| {
            let prep = &preps[c.parent];
            for t in splits..n_v {
                c.pm += prep.hard_penalty[prep.order[t]];
            }
            let mut beta: Vec<u8> = paths[c.parent].1.iter().map(|&a| hard_bit(a)).collect();
            for &pos in &c.flips {
                beta[pos] ^= 1;
            }
            Rate1Survivor { parent: c.parent, pm: c.pm, beta, flipped: !c.flips.is_empty() }
        })
        .collect()
}

/// LLR combination rule used on the check side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CombineRule {
    #[default]
    Exact,
    MinSum,
}

/// List decoder configuration.
#[derive(Debug, Clone, Copy)]
pub struct SclConfig {
    pub list_size: usize,
    pub fast_nodes: bool,
    pub rule: CombineRule,
}

/// Decoder output: the input estimate, its re-encoding, and the path metric.
#[derive(Debug, Clone, PartialEq)]
pub struct ScOutput {
    pub u_hat: Vec<u8>,
    pub x_hat: Vec<u8>,
    pub pm: f64,
}

/// One finished candidate path of the list decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderPath {
    pub path_id: u64,
    pub u_hat: Vec<u8>,
    pub pm: f64,
}

/// Full list-decoder result: best path plus the survivor list sorted by
/// ascending path metric (ties by lower path id).
#[derive(Debug, Clone)]
pub struct SclResult {
    pub best: ScOutput,
    pub paths: Vec<DecoderPath>,
}

/// Plain successive-cancellation decoding (single path).
///
/// Frozen leaves decide 0; at `alpha = 0` the tie decides 0.
pub fn sc_decode(llr: &[f64], code: &PolarCode) -> Result<ScOutput> {
    if llr.len() != code.block_length() {
        return invalid(format!(
            "LLR length {} does not match block length {}",
            llr.len(),
            code.block_length()
        ));
    }
    let clamped: Vec<f64> = llr.iter().map(|x| x.clamp(-LLR_MAX, LLR_MAX)).collect();
    let mut u = vec![0u8; code.block_length()];
    let mut pm = 0.0;
    let x = sc_subtree(&clamped, 0, code, &mut u, &mut pm);
    Ok(ScOutput { u_hat: u, x_hat: x, pm })
}

fn sc_subtree(alpha: &[f64], base: usize, code: &PolarCode, u: &mut [u8], pm: &mut f64) -> Vec<u8> {
    if alpha.len() == 1 {
        let bit = if code.is_info(base) { hard_bit(alpha[0]) } else { 0 };
        *pm = pm_update(*pm, bit, alpha[0]);
        u[base] = bit;
        return vec![bit];
    }
    let half = alpha.len() / 2;
    let left_alpha: Vec<f64> = (0..half).map(|i| f_combine(alpha[i], alpha[i + half])).collect();
    let left = sc_subtree(&left_alpha, base, code, u, pm);
    let right_alpha: Vec<f64> =
        (0..half).map(|i| g_combine(alpha[i], alpha[i + half], left[i])).collect();
    let right = sc_subtree(&right_alpha, base + half, code, u, pm);
    merge_beta(&left, &right)
}

/// Successive-cancellation list decoding.
///
/// Returns the smallest-metric path and the full sorted survivor list. With
/// `fast_nodes` set, Rate-0 and Rate-1 subtrees are resolved by the shortcut
/// rules; the output is bit-identical to the plain descent.
pub fn scl_decode(
    llr: &[f64],
    code: &PolarCode,
    list_size: usize,
    fast_nodes: bool,
) -> Result<SclResult> {
    scl_decode_with(llr, code, &SclConfig { list_size, fast_nodes, rule: CombineRule::Exact })
}

/// [`scl_decode`] with an explicit configuration.
pub fn scl_decode_with(llr: &[f64], code: &PolarCode, config: &SclConfig) -> Result<SclResult> {
    if llr.len() != code.block_length() {
        return invalid(format!(
            "LLR length {} does not match block length {}",
            llr.len(),
            code.block_length()
        ));
    }
    if config.list_size < 1 {
        return invalid("list size must be at least 1");
    }
    let clamped: Vec<f64> = llr.iter().map(|x| x.clamp(-LLR_MAX, LLR_MAX)).collect();
    let root = ListPath {
        id: 0,
        pm: 0.0,
        u: vec![0u8; code.block_length()],
        alpha_stack: vec![Rc::new(clamped)],
        beta_stack: Vec::new(),
        beta_out: Vec::new(),
    };
    let mut state = ListState { paths: vec![root], next_id: 1, code, config: *config };
    state.decode_subtree(code.root());

    let mut paths = state.paths;
    paths.sort_by(|a, b| a.pm.total_cmp(&b.pm).then(a.id.cmp(&b.id)));
    let best = &paths[0];
    let best_out = ScOutput { u_hat: best.u.clone(), x_hat: best.beta_out.clone(), pm: best.pm };
    let list = paths
        .into_iter()
        .map(|p| DecoderPath { path_id: p.id, u_hat: p.u, pm: p.pm })
        .collect();
    Ok(SclResult { best: best_out, paths: list })
}

#[derive(Clone)]
struct ListPath {
    id: u64,
    pm: f64,
    u: Vec<u8>,
    /// LLR inputs per tree level; entries are immutable once pushed, so
    /// forked paths share them.
    alpha_stack: Vec<Rc<Vec<f64>>>,
    /// Left-child bit estimates awaiting the right child.
    beta_stack: Vec<Vec<u8>>,
    /// Bit estimates of the subtree just decoded.
    beta_out: Vec<u8>,
}

struct ListState<'a> {
    paths: Vec<ListPath>,
    next_id: u64,
    code: &'a PolarCode,
    config: SclConfig,
}

fn combine_with(rule: CombineRule, a: f64, b: f64) -> f64 {
    match rule {
        CombineRule::Exact => f_combine(a, b),
        CombineRule::MinSum => f_combine_minsum(a, b),
    }
}

impl ListState<'_> {
    fn decode_subtree(&mut self, node: crate::code::DecodeNode) {
        if node.is_leaf() {
            self.leaf_step(node.leaf_range().start);
            return;
        }
        if self.config.fast_nodes {
            let info = self.code.count_info_in(node.leaf_range());
            if info == 0 {
                self.rate0_step(node.message_size());
                return;
            }
            if info == node.message_size() {
                self.rate1_step(node);
                return;
            }
        }
        let (left, right) = node.children().expect("non-leaf node");
        let half = node.message_size() / 2;
        let rule = self.config.rule;

        for p in &mut self.paths {
            let a = Rc::clone(p.alpha_stack.last().expect("alpha present"));
            let la: Vec<f64> = (0..half).map(|i| combine_with(rule, a[i], a[i + half])).collect();
            p.alpha_stack.push(Rc::new(la));
        }
        self.decode_subtree(left);
        for p in &mut self.paths {
            p.alpha_stack.pop();
            let b = std::mem::take(&mut p.beta_out);
            p.beta_stack.push(b);
        }

        for p in &mut self.paths {
            let a = Rc::clone(p.alpha_stack.last().expect("alpha present"));
            let bl = p.beta_stack.last().expect("left beta present");
            let ra: Vec<f64> = (0..half).map(|i| g_combine(a[i], a[i + half], bl[i])).collect();
            p.alpha_stack.push(Rc::new(ra));
        }
        self.decode_subtree(right);
        for p in &mut self.paths {
            p.alpha_stack.pop();
            let br = std::mem::take(&mut p.beta_out);
            let bl = p.beta_stack.pop().expect("left beta present");
            p.beta_out = merge_beta(&bl, &br);
        }
    }

    fn leaf_step(&mut self, leaf: usize) {
        if !self.code.is_info(leaf) {
            for p in &mut self.paths {
                let a = p.alpha_stack.last().expect("alpha present")[0];
                p.pm = pm_update(p.pm, 0, a);
                p.beta_out = vec![0];
            }
            return;
        }
        let mut forked = Vec::with_capacity(self.paths.len() * 2);
        for p in self.paths.drain(..) {
            let a = p.alpha_stack.last().expect("alpha present")[0];
            let mut one = p.clone();
            let mut zero = p;
            zero.pm = pm_update(zero.pm, 0, a);
            zero.u[leaf] = 0;
            zero.beta_out = vec![0];
            one.pm = pm_update(one.pm, 1, a);
            one.id = self.next_id;
            self.next_id += 1;
            one.u[leaf] = 1;
            one.beta_out = vec![1];
            forked.push(zero);
            forked.push(one);
        }
        self.paths = forked;
        self.prune();
    }

    fn rate0_step(&mut self, size: usize) {
        for p in &mut self.paths {
            let a = Rc::clone(p.alpha_stack.last().expect("alpha present"));
            let before = p.pm;
            p.pm = rate0_pm_update(p.pm, &a);
            debug_assert!(p.pm >= before);
            p.beta_out = vec![0u8; size];
            // Frozen leaves stay zero in u.
        }
    }

    fn rate1_step(&mut self, node: crate::code::DecodeNode) {
        let alphas: Vec<Rc<Vec<f64>>> = self
            .paths
            .iter()
            .map(|p| Rc::clone(p.alpha_stack.last().expect("alpha present")))
            .collect();
        let inputs: Vec<(f64, &[f64])> = self
            .paths
            .iter()
            .zip(&alphas)
            .map(|(p, a)| (p.pm, a.as_slice()))
            .collect();
        let survivors = rate1_fast_decode(&inputs, self.config.list_size);
        debug_assert!(survivors.len() <= self.config.list_size);

        let range = node.leaf_range();
        let mut next = Vec::with_capacity(survivors.len());
        for s in survivors {
            let mut p = self.paths[s.parent].clone();
            debug_assert!(s.pm >= p.pm);
            p.pm = s.pm;
            if s.flipped {
                p.id = self.next_id;
                self.next_id += 1;
            }
            // The subtree is unconstrained, so its input bits are recovered by
            // inverting the transform; G is an involution.
            let mut u_sub = s.beta.clone();
            polar_transform(&mut u_sub);
            p.u[range.clone()].copy_from_slice(&u_sub);
            p.beta_out = s.beta;
            next.push(p);
        }
        self.paths = next;
    }

    fn prune(&mut self) {
        let before = self.paths.len();
        self.paths.sort_by(|a, b| a.pm.total_cmp(&b.pm).then(a.id.cmp(&b.id)));
        self.paths.truncate(self.config.list_size);
        debug_assert_eq!(self.paths.len(), before.min(self.config.list_size));
    }
}
