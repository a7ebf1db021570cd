//! Monte-Carlo AWGN link simulation: single-code BPSK runs and full
//! multi-level transmit / multistage-receive runs.
//!
//! Every frame draws its randomness from a stream derived from
//! `(master seed, frame index)`, so results are independent of how frames are
//! distributed across workers. Within a frame the data bits are drawn first,
//! then the noise.

use crate::code::{encode, PolarCode};
use crate::decoder::{scl_decode_with, CombineRule, SclConfig};
use crate::error::{invalid, Result};
use crate::mlc::{log_sum_exp, AskConstellation, LevelDesign, LevelPlan, MlcDesign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// AWGN channel operating point: `Es/sigma²` in dB plus the master seed.
#[derive(Debug, Clone, Copy)]
pub struct ChannelConfig {
    pub snr_db: f64,
    pub seed: u64,
}

impl ChannelConfig {
    /// Noise variance for the given average symbol energy.
    pub fn noise_variance(&self, symbol_energy: f64) -> f64 {
        symbol_energy / 10f64.powf(self.snr_db / 10.0)
    }
}

/// Decoder and stopping options for simulation runs.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub fast_nodes: bool,
    pub rule: CombineRule,
    /// Stop after (at least) this many frame errors; checked between fixed
    /// 1024-frame chunks so that early stopping stays deterministic.
    pub max_frame_errors: Option<u64>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { fast_nodes: true, rule: CombineRule::Exact, max_frame_errors: None }
    }
}

/// The RNG stream for one frame.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame.wrapping_add(1));
    rng
}

/// Adds i.i.d. zero-mean Gaussian noise of standard deviation `sigma`.
pub fn awgn(symbols: &[f64], sigma: f64, rng: &mut impl Rng) -> Vec<f64> {
    debug_assert!(sigma >= 0.0);
    symbols.iter().map(|&x| x + sigma * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// BPSK channel LLR for the mapping bit 0 -> +1, bit 1 -> -1: `2y/sigma²`.
pub fn bpsk_llr(y: f64, sigma: f64) -> f64 {
    2.0 * y / (sigma * sigma)
}

/// Bit-level LLR for multistage demapping.
///
/// Given the decided lower-level bits, this is the log-ratio of summed
/// Gaussian likelihoods over the symbols extending the prefix with
/// `B_level = 0` versus `B_level = 1`, computed with log-sum-exp.
pub fn multistage_llr(
    y: f64,
    sigma: f64,
    level: u32,
    decided: &[u8],
    cst: &AskConstellation,
) -> Result<f64> {
    if level < 1 || level > cst.bits_per_symbol() {
        return invalid(format!("level {level} outside 1..={}", cst.bits_per_symbol()));
    }
    if decided.len() != level as usize - 1 {
        return invalid(format!(
            "expected {} decided bits for level {level}, got {}",
            level - 1,
            decided.len()
        ));
    }
    if decided.iter().any(|&b| b > 1) {
        return invalid("decided bits must be 0 or 1");
    }
    let sigma2 = sigma * sigma;
    let mut prefix = decided.to_vec();
    prefix.push(0);
    let zeros = cst.subset_for_prefix(&prefix);
    *prefix.last_mut().unwrap() = 1;
    let ones = cst.subset_for_prefix(&prefix);
    if zeros.is_empty() || ones.is_empty() {
        return invalid("prefix selects an empty sub-constellation");
    }
    let log_lik = |subset: &[f64]| {
        let terms: Vec<f64> = subset
            .iter()
            .map(|&x| {
                let d = y - x;
                -d * d / (2.0 * sigma2)
            })
            .collect();
        log_sum_exp(&terms)
    };
    Ok(log_lik(&zeros) - log_lik(&ones))
}

/// Aggregated error counts of one simulation case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Tally {
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            frames: self.frames + other.frames,
            bit_errors: self.bit_errors + other.bit_errors,
            frame_errors: self.frame_errors + other.frame_errors,
        }
    }

    fn into_result(self, bits_per_frame: u64) -> SimResult {
        let denom = self.frames * bits_per_frame;
        SimResult {
            frames: self.frames,
            bit_errors: self.bit_errors,
            frame_errors: self.frame_errors,
            ber: if denom > 0 { self.bit_errors as f64 / denom as f64 } else { 0.0 },
            fer: if self.frames > 0 { self.frame_errors as f64 / self.frames as f64 } else { 0.0 },
        }
    }
}

/// Draws the input vector for one codeword: random bits at information
/// positions, zeros elsewhere.
fn random_input(code: &PolarCode, rng: &mut impl Rng) -> Vec<u8> {
    let mut u = vec![0u8; code.block_length()];
    for (i, slot) in u.iter_mut().enumerate() {
        if code.is_info(i) {
            *slot = rng.gen::<bool>() as u8;
        }
    }
    u
}

const CHUNK: u64 = 1024;

/// Runs frames in deterministic fixed-size chunks, each chunk fanned out in
/// parallel, until `frames` are done or the error budget is exhausted.
fn run_chunked<T, F>(frames: u64, max_frame_errors: Option<u64>, zero: T, frame_fn: F) -> T
where
    T: MergeTally + Clone + Send + Sync,
    F: Fn(u64) -> T + Sync,
{
    let mut total = zero.clone();
    let mut next = 0u64;
    while next < frames {
        let end = (next + CHUNK).min(frames);
        let chunk = (next..end)
            .into_par_iter()
            .map(&frame_fn)
            .reduce(|| zero.clone(), |a, b| a.merge_with(b));
        total = total.merge_with(chunk);
        next = end;
        if let Some(budget) = max_frame_errors {
            if total.frame_error_count() >= budget {
                break;
            }
        }
    }
    total
}

trait MergeTally: Sized {
    fn merge_with(self, other: Self) -> Self;
    fn frame_error_count(&self) -> u64;
}

impl MergeTally for Tally {
    fn merge_with(self, other: Self) -> Self {
        self.merge(other)
    }
    fn frame_error_count(&self) -> u64 {
        self.frame_errors
    }
}

#[derive(Debug, Clone)]
struct MlcTally {
    levels: Vec<Tally>,
    aggregate: Tally,
}

impl MergeTally for MlcTally {
    fn merge_with(self, other: Self) -> Self {
        MlcTally {
            levels: self
                .levels
                .into_iter()
                .zip(other.levels)
                .map(|(a, b)| a.merge(b))
                .collect(),
            aggregate: self.aggregate.merge(other.aggregate),
        }
    }
    fn frame_error_count(&self) -> u64 {
        self.aggregate.frame_errors
    }
}

/// Simulates one polar-coded BPSK link: encode random data, map through the
/// 2-ASK constellation, add noise, list-decode, count errors against the
/// transmitted input. Bit errors are counted on information positions.
pub fn run_single_code(
    code: &PolarCode,
    list_size: usize,
    channel: &ChannelConfig,
    frames: u64,
    opts: &SimOptions,
) -> Result<SimResult> {
    let design = MlcDesign {
        levels: vec![LevelDesign { rate: code.rate(), plan: LevelPlan::Coded(code.clone()) }],
        snr_db: channel.snr_db,
        epsilon: 0.01,
        n: code.tree_depth(),
        list_size,
        bit_order: Default::default(),
    };
    Ok(run_mlc(&design, channel, frames, false, opts)?.aggregate)
}

/// Per-level and aggregate results of a multi-level run.
#[derive(Debug, Clone)]
pub struct MlcSimResult {
    pub per_level: Vec<SimResult>,
    pub aggregate: SimResult,
}

/// Simulates the multi-level scheme with multistage decoding.
///
/// Levels transmit one codeword (or raw/zero block) of `N = 2^n` bits each,
/// one bit per symbol per level. Decoding proceeds level by level; decided
/// codeword bits condition the LLRs of higher levels. With `genie` set, the
/// conditioning uses the transmitted bits instead, which isolates per-level
/// error rates from error propagation.
pub fn run_mlc(
    design: &MlcDesign,
    channel: &ChannelConfig,
    frames: u64,
    genie: bool,
    opts: &SimOptions,
) -> Result<MlcSimResult> {
    let m = design.levels.len() as u32;
    let cst = AskConstellation::with_bit_order(m, design.bit_order)?;
    let block = 1usize << design.n;
    for level in &design.levels {
        if let LevelPlan::Coded(code) = &level.plan {
            if code.block_length() != block {
                return invalid("all coded levels must share the design block length");
            }
        }
    }
    let sigma = channel.noise_variance(cst.energy()).sqrt();
    let scl_config = SclConfig {
        list_size: design.list_size,
        fast_nodes: opts.fast_nodes,
        rule: opts.rule,
    };

    let zero = MlcTally {
        levels: vec![Tally::default(); design.levels.len()],
        aggregate: Tally::default(),
    };
    let totals = run_chunked(frames, opts.max_frame_errors, zero, |frame| {
        let mut rng = frame_rng(channel.seed, frame);

        // Transmit side: data bits per level, then symbols, then noise.
        let mut tx_input: Vec<Vec<u8>> = Vec::with_capacity(design.levels.len());
        let mut tx_bits: Vec<Vec<u8>> = Vec::with_capacity(design.levels.len());
        for level in &design.levels {
            match &level.plan {
                LevelPlan::Coded(code) => {
                    let u = random_input(code, &mut rng);
                    let x = encode(&u, code).expect("valid input");
                    tx_input.push(u);
                    tx_bits.push(x);
                }
                LevelPlan::Uncoded => {
                    let x: Vec<u8> = (0..block).map(|_| rng.gen::<bool>() as u8).collect();
                    tx_input.push(x.clone());
                    tx_bits.push(x);
                }
                LevelPlan::Frozen => {
                    tx_input.push(vec![0u8; block]);
                    tx_bits.push(vec![0u8; block]);
                }
            }
        }
        let symbols: Vec<f64> = (0..block)
            .map(|j| {
                let label: Vec<u8> = (0..design.levels.len()).map(|i| tx_bits[i][j]).collect();
                cst.amplitude(cst.symbol_for_bits(&label).expect("valid label"))
            })
            .collect();
        let received = awgn(&symbols, sigma, &mut rng);

        // Receive side: level by level, conditioning on lower-level decisions.
        let mut conditioning: Vec<Vec<u8>> = vec![Vec::new(); block];
        let mut level_tallies = Vec::with_capacity(design.levels.len());
        let mut frame_bit_errors = 0u64;
        let mut frame_erred = false;
        for (i, level) in design.levels.iter().enumerate() {
            let level_no = i as u32 + 1;
            let llrs: Vec<f64> = received
                .iter()
                .enumerate()
                .map(|(j, &y)| {
                    multistage_llr(y, sigma, level_no, &conditioning[j], &cst)
                        .expect("valid conditioning")
                })
                .collect();
            let (bit_errors, decisions) = match &level.plan {
                LevelPlan::Coded(code) => {
                    let out = scl_decode_with(&llrs, code, &scl_config).expect("valid llrs");
                    let errors = (0..block)
                        .filter(|&p| code.is_info(p) && out.best.u_hat[p] != tx_input[i][p])
                        .count() as u64;
                    (errors, out.best.x_hat)
                }
                LevelPlan::Uncoded => {
                    let bits: Vec<u8> = llrs.iter().map(|&l| (l < 0.0) as u8).collect();
                    let errors =
                        bits.iter().zip(&tx_bits[i]).filter(|(a, b)| a != b).count() as u64;
                    (errors, bits)
                }
                LevelPlan::Frozen => (0, vec![0u8; block]),
            };
            let erred = bit_errors > 0;
            frame_bit_errors += bit_errors;
            frame_erred |= erred;
            level_tallies.push(Tally {
                frames: 1,
                bit_errors,
                frame_errors: erred as u64,
            });
            let feed = if genie { &tx_bits[i] } else { &decisions };
            for (j, cond) in conditioning.iter_mut().enumerate() {
                cond.push(feed[j]);
            }
        }
        MlcTally {
            levels: level_tallies,
            aggregate: Tally { frames: 1, bit_errors: frame_bit_errors, frame_errors: frame_erred as u64 },
        }
    });

    let bits_for = |level: &LevelDesign| -> u64 {
        match &level.plan {
            LevelPlan::Coded(code) => code.dimension() as u64,
            LevelPlan::Uncoded => block as u64,
            LevelPlan::Frozen => 0,
        }
    };
    let per_level: Vec<SimResult> = totals
        .levels
        .iter()
        .zip(&design.levels)
        .map(|(t, level)| t.into_result(bits_for(level)))
        .collect();
    let total_bits: u64 = design.levels.iter().map(&bits_for).sum();
    Ok(MlcSimResult { per_level, aggregate: totals.aggregate.into_result(total_bits) })
}
