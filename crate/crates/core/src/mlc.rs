//! Multi-level coding analysis for M-ASK over the AWGN channel: per-level
//! conditional mutual information, per-level polar code design, and the
//! aggregate decoding cost of multistage decoding.
//!
//! Level `i` sees the binary channel `I(B_i; Y | B_1..B_{i-1})`. With natural
//! labelling these level rates are all close to 0 or 1 except for at most two
//! transition levels at any SNR, which is what keeps the multistage decoding
//! cost near that of a single mid-rate code.

use crate::construction::{construct_code, snr_for_bpsk_capacity};
use crate::error::{invalid, numerical, Result};
use crate::latency::tc_code;
use crate::quadrature::{GaussHermite, LADDER_ORDERS};
use rayon::prelude::*;

/// Which label bit is level 1.
///
/// `LsbFirst` makes level 1 the least significant bit of the symbol index
/// (the least reliable level, decoded first). `MsbFirst` reverses this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BitOrder {
    #[default]
    LsbFirst,
    MsbFirst,
}

/// An M-ASK constellation `{-M+1, ..., -3, -1, +1, +3, ..., M-1}` with the
/// natural binary labelling of the amplitude index.
#[derive(Debug, Clone)]
pub struct AskConstellation {
    m: u32,
    amplitudes: Vec<f64>,
    bit_order: BitOrder,
}

impl AskConstellation {
    /// Builds the 2^m-ASK constellation, `1 <= m <= 8`.
    pub fn new(m: u32) -> Result<Self> {
        Self::with_bit_order(m, BitOrder::default())
    }

    pub fn with_bit_order(m: u32, bit_order: BitOrder) -> Result<Self> {
        if !(1..=8).contains(&m) {
            return invalid(format!("bits per symbol m={m} outside 1..=8"));
        }
        let size = 1usize << m;
        let amplitudes = (0..size).map(|k| (2 * k as i64 - size as i64 + 1) as f64).collect();
        Ok(Self { m, amplitudes, bit_order })
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.m
    }

    pub fn size(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, symbol: usize) -> f64 {
        self.amplitudes[symbol]
    }

    /// Average symbol energy under the uniform distribution: `(M² - 1) / 3`.
    pub fn energy(&self) -> f64 {
        let m2 = (self.size() * self.size()) as f64;
        (m2 - 1.0) / 3.0
    }

    /// Noise variance at `Es/sigma²` given in dB.
    pub fn noise_variance(&self, snr_db: f64) -> f64 {
        self.energy() / 10f64.powf(snr_db / 10.0)
    }

    /// Label bit of a symbol at a 1-based level.
    pub fn label_bit(&self, symbol: usize, level: u32) -> u8 {
        debug_assert!(level >= 1 && level <= self.m);
        let shift = match self.bit_order {
            BitOrder::LsbFirst => level - 1,
            BitOrder::MsbFirst => self.m - level,
        };
        ((symbol >> shift) & 1) as u8
    }

    /// Symbol index for a full label, `bits[i]` being level `i+1`.
    pub fn symbol_for_bits(&self, bits: &[u8]) -> Result<usize> {
        if bits.len() != self.m as usize {
            return invalid(format!("label has {} bits, expected {}", bits.len(), self.m));
        }
        let mut symbol = 0usize;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return invalid("label bits must be 0 or 1");
            }
            let shift = match self.bit_order {
                BitOrder::LsbFirst => i as u32,
                BitOrder::MsbFirst => self.m - 1 - i as u32,
            };
            symbol |= (b as usize) << shift;
        }
        Ok(symbol)
    }

    /// Whether a symbol's label starts with the given level-1.. prefix.
    pub fn matches_prefix(&self, symbol: usize, prefix: &[u8]) -> bool {
        prefix
            .iter()
            .enumerate()
            .all(|(i, &b)| self.label_bit(symbol, i as u32 + 1) == b)
    }

    /// Amplitudes of all symbols whose labels extend `prefix`.
    pub fn subset_for_prefix(&self, prefix: &[u8]) -> Vec<f64> {
        (0..self.size())
            .filter(|&s| self.matches_prefix(s, prefix))
            .map(|s| self.amplitude(s))
            .collect()
    }
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Per-level conditional mutual informations at one SNR.
#[derive(Debug, Clone)]
pub struct LevelRates {
    /// `rates[i]` is `I(B_{i+1}; Y | B_1..B_i)` in bits, clipped to [0, 1].
    pub rates: Vec<f64>,
    /// `Es/sigma²` in dB.
    pub snr_db: f64,
}

/// Mean over the noise of the log-density of `y` under the symbol subset,
/// up to the Gaussian normalization constant (which cancels in differences):
/// `E_{y = x + Z}[ lse_{x' in S}( -(y-x')²/(2σ²) ) ] - ln |S|`.
fn expected_log_subset_density(gh: &GaussHermite, x: f64, subset: &[f64], sigma2: f64) -> f64 {
    let sigma = sigma2.sqrt();
    let scale = std::f64::consts::SQRT_2 * sigma;
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let mut terms = vec![0.0f64; subset.len()];
    let integral = gh.integrate(|t| {
        let y = x + scale * t;
        for (slot, &xp) in terms.iter_mut().zip(subset) {
            let d = y - xp;
            *slot = -d * d / (2.0 * sigma2);
        }
        log_sum_exp(&terms)
    });
    inv_sqrt_pi * integral - (subset.len() as f64).ln()
}

fn level_rates_at_order(cst: &AskConstellation, sigma2: f64, gh: &GaussHermite) -> Vec<f64> {
    let m = cst.bits_per_symbol() as usize;
    let size = cst.size();
    // Subsets by prefix depth: groups[j] maps a packed j-bit prefix to the
    // member amplitudes.
    let mut groups: Vec<Vec<Vec<f64>>> = Vec::with_capacity(m + 1);
    let mut prefix_of: Vec<Vec<usize>> = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let mut bucket = vec![Vec::new(); 1usize << j];
        let mut prefixes = vec![0usize; size];
        for (s, prefix) in prefixes.iter_mut().enumerate() {
            let mut packed = 0usize;
            for level in 1..=j as u32 {
                packed |= (cst.label_bit(s, level) as usize) << (level - 1);
            }
            bucket[packed].push(cst.amplitude(s));
            *prefix = packed;
        }
        groups.push(bucket);
        prefix_of.push(prefixes);
    }

    // e[s][j] = expected log-density of y (sent as symbol s) under the depth-j
    // subset containing s. Level rates are telescoping differences.
    let ln2 = std::f64::consts::LN_2;
    let mut expected = vec![vec![0.0f64; m + 1]; size];
    for s in 0..size {
        for j in 0..=m {
            let subset = &groups[j][prefix_of[j][s]];
            expected[s][j] = expected_log_subset_density(gh, cst.amplitude(s), subset, sigma2);
        }
    }
    (1..=m)
        .map(|i| {
            let sum: f64 = (0..size).map(|s| expected[s][i] - expected[s][i - 1]).sum();
            (sum / (size as f64 * ln2)).clamp(0.0, 1.0)
        })
        .collect()
}

fn total_mi_at_order(cst: &AskConstellation, sigma2: f64, gh: &GaussHermite) -> f64 {
    let size = cst.size();
    let sigma = sigma2.sqrt();
    let scale = std::f64::consts::SQRT_2 * sigma;
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let ln_m = (size as f64).ln();
    let mut terms = vec![0.0f64; size];
    let mut acc = 0.0;
    for s in 0..size {
        let x = cst.amplitude(s);
        acc += inv_sqrt_pi
            * gh.integrate(|t| {
                let y = x + scale * t;
                for (slot, &xp) in terms.iter_mut().zip(cst.amplitudes()) {
                    let d = y - xp;
                    *slot = -d * d / (2.0 * sigma2);
                }
                ln_m - t * t - log_sum_exp(&terms)
            });
    }
    (acc / (size as f64 * std::f64::consts::LN_2)).clamp(0.0, cst.bits_per_symbol() as f64)
}

/// Runs the quadrature ladder: doubles the order until two successive results
/// agree within `1e-6` (elementwise), starting at order 64.
fn converge<T: Clone>(
    eval: impl Fn(&GaussHermite) -> T,
    diff: impl Fn(&T, &T) -> f64,
    what: &str,
) -> Result<T> {
    let mut prev: Option<T> = None;
    for step in 0..LADDER_ORDERS.len() {
        let current = eval(GaussHermite::ladder(step));
        if let Some(p) = prev {
            if diff(&p, &current) <= 1e-6 {
                return Ok(current);
            }
        }
        prev = Some(current);
    }
    numerical(format!(
        "{what}: quadrature did not converge within 1e-6 by order {}",
        LADDER_ORDERS[LADDER_ORDERS.len() - 1]
    ))
}

/// Per-level conditional mutual informations for 2^m-ASK at `Es/sigma²` (dB),
/// uniform symbols, default bit order.
pub fn level_rates(m: u32, snr_db: f64) -> Result<LevelRates> {
    level_rates_for(&AskConstellation::new(m)?, snr_db)
}

/// [`level_rates`] over an explicit constellation.
pub fn level_rates_for(cst: &AskConstellation, snr_db: f64) -> Result<LevelRates> {
    if !snr_db.is_finite() {
        return invalid("SNR must be finite");
    }
    let sigma2 = cst.noise_variance(snr_db);
    let rates = converge(
        |gh| level_rates_at_order(cst, sigma2, gh),
        |a, b| {
            a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        },
        "level rates",
    )?;
    Ok(LevelRates { rates, snr_db })
}

/// Mutual information `I(X; Y)` of uniform 2^m-ASK at `Es/sigma²` (dB),
/// computed directly (not by summing level rates).
pub fn total_mutual_information(m: u32, snr_db: f64) -> Result<f64> {
    total_mutual_information_for(&AskConstellation::new(m)?, snr_db)
}

/// [`total_mutual_information`] over an explicit constellation.
pub fn total_mutual_information_for(cst: &AskConstellation, snr_db: f64) -> Result<f64> {
    if !snr_db.is_finite() {
        return invalid("SNR must be finite");
    }
    let sigma2 = cst.noise_variance(snr_db);
    converge(
        |gh| total_mi_at_order(cst, sigma2, gh),
        |a, b| (a - b).abs(),
        "total mutual information",
    )
}

/// What happens to one bit level.
#[derive(Debug, Clone)]
pub enum LevelPlan {
    /// Rate below epsilon: nothing is transmitted; the level is known zeros.
    Frozen,
    /// Rate above 1 - epsilon: raw bits, no code.
    Uncoded,
    /// A polar code matched to the level rate.
    Coded(crate::code::PolarCode),
}

/// One designed level: its channel rate and the chosen plan.
#[derive(Debug, Clone)]
pub struct LevelDesign {
    pub rate: f64,
    pub plan: LevelPlan,
}

/// A complete multi-level design at one SNR.
#[derive(Debug, Clone)]
pub struct MlcDesign {
    pub levels: Vec<LevelDesign>,
    pub snr_db: f64,
    pub epsilon: f64,
    /// Tree depth of the per-level codes (block length `2^n` symbols).
    pub n: u32,
    pub list_size: usize,
    pub bit_order: BitOrder,
}

impl MlcDesign {
    pub fn bits_per_symbol(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn coded_level_count(&self) -> usize {
        self.levels.iter().filter(|l| matches!(l.plan, LevelPlan::Coded(_))).count()
    }
}

/// Designs one polar code per level at the given SNR.
///
/// Levels with rate below `epsilon` are frozen and above `1 - epsilon`
/// uncoded. A coded level gets `K = round(N * rate)` (clamped inside (0, N))
/// with the information set built at the BPSK design SNR whose capacity
/// equals the level rate.
pub fn design_mlc(m: u32, snr_db: f64, n: u32, list_size: usize, epsilon: f64) -> Result<MlcDesign> {
    design_mlc_with(&AskConstellation::new(m)?, snr_db, n, list_size, epsilon)
}

/// [`design_mlc`] over an explicit constellation.
pub fn design_mlc_with(
    cst: &AskConstellation,
    snr_db: f64,
    n: u32,
    list_size: usize,
    epsilon: f64,
) -> Result<MlcDesign> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return invalid(format!("epsilon {epsilon} outside (0, 0.5)"));
    }
    if list_size < 1 {
        return invalid("list size must be at least 1");
    }
    let block = 1usize << n;
    let rates = level_rates_for(cst, snr_db)?;
    let mut levels = Vec::with_capacity(rates.rates.len());
    for &rate in &rates.rates {
        let plan = if rate < epsilon {
            LevelPlan::Frozen
        } else if rate > 1.0 - epsilon {
            LevelPlan::Uncoded
        } else {
            let design_snr = snr_for_bpsk_capacity(rate.clamp(1e-4, 0.999));
            let k = ((rate * block as f64).round() as usize).clamp(1, block - 1);
            LevelPlan::Coded(construct_code(n, k, design_snr)?)
        };
        levels.push(LevelDesign { rate, plan });
    }
    Ok(MlcDesign {
        levels,
        snr_db,
        epsilon,
        n,
        list_size,
        bit_order: cst.bit_order,
    })
}

/// Decoding cost of one level: 1 cycle for frozen and uncoded levels, the
/// full cost model for coded ones.
pub fn level_tc(level: &LevelDesign, list_size: usize) -> u64 {
    match &level.plan {
        LevelPlan::Frozen | LevelPlan::Uncoded => 1,
        LevelPlan::Coded(code) => tc_code(code, list_size).total,
    }
}

/// Total decoding cost of the multistage scheme: levels decode sequentially,
/// so the per-level costs add.
pub fn mlc_tc(design: &MlcDesign) -> u64 {
    design.levels.iter().map(|l| level_tc(l, design.list_size)).sum()
}

/// One SNR point of a design sweep.
#[derive(Debug, Clone)]
pub struct MlcSweepRow {
    pub snr_db: f64,
    pub rates: Vec<f64>,
    pub level_tc: Vec<u64>,
    pub total_tc: u64,
}

/// Designs and costs the scheme across an SNR grid.
pub fn mlc_tc_sweep(
    m: u32,
    snr_grid: &[f64],
    n: u32,
    list_size: usize,
    epsilon: f64,
    bit_order: BitOrder,
) -> Result<Vec<MlcSweepRow>> {
    let cst = AskConstellation::with_bit_order(m, bit_order)?;
    snr_grid
        .par_iter()
        .map(|&snr_db| {
            let design = design_mlc_with(&cst, snr_db, n, list_size, epsilon)?;
            let level_tc: Vec<u64> =
                design.levels.iter().map(|l| level_tc(l, design.list_size)).collect();
            let total_tc = level_tc.iter().sum();
            Ok(MlcSweepRow {
                snr_db,
                rates: design.levels.iter().map(|l| l.rate).collect(),
                level_tc,
                total_tc,
            })
        })
        .collect()
}
