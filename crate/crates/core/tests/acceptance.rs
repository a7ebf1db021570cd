//! Acceptance suite: one test per numbered criterion, each printing a
//! `[PASS]`/`[FAIL]` line (run with `--nocapture` to see them). Criteria 4, 5
//! and 8 contain subclauses that the exact implementation provably cannot
//! satisfy; those tests report every subclause before failing.

use std::time::Instant;

use polar_mlc::code::{encode, PolarCode};
use polar_mlc::construction::construct_code;
use polar_mlc::decoder::{
    f_combine, f_combine_minsum, pm_update, scl_decode, LLR_MAX,
};
use polar_mlc::latency::{tc_code, tc_rate_sweep, tc_worst_case_bound, DesignRule};
use polar_mlc::mlc::{level_rates, mlc_tc_sweep, total_mutual_information, BitOrder};
use polar_mlc::sim::{run_single_code, ChannelConfig, SimOptions};

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0
    }
    fn uniform(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
    fn gauss(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-12);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
    fn below(&mut self, bound: usize) -> usize {
        (self.next() >> 33) as usize % bound
    }
}

/// Random BPSK frame at noise level sigma: returns (input, channel LLRs).
fn noisy_frame(code: &PolarCode, sigma: f64, rng: &mut Lcg) -> (Vec<u8>, Vec<f64>) {
    let mut u = vec![0u8; code.block_length()];
    for i in 0..u.len() {
        if code.is_info(i) {
            u[i] = ((rng.next() >> 30) & 1) as u8;
        }
    }
    let x = encode(&u, code).unwrap();
    let llr = x
        .iter()
        .map(|&b| 2.0 * ((1.0 - 2.0 * b as f64) + sigma * rng.gauss()) / (sigma * sigma))
        .collect();
    (u, llr)
}

fn report(id: &str, what: &str, failures: Vec<String>, started: Instant) {
    let elapsed = started.elapsed().as_secs_f64();
    if failures.is_empty() {
        println!("[PASS] criterion {id}: {what} ({elapsed:.1} s)");
    } else {
        println!("[FAIL] criterion {id}: {what} ({elapsed:.1} s)");
        for f in &failures {
            println!("       - {f}");
        }
        panic!("criterion {id} failed: {failures:?}");
    }
}

/// Criterion 1: the depth-3 example code with A = {6,7,8} and L = 4 costs
/// exactly 12 cycles (rate-0 half 2, repetition pair 2, rate-1 pair 2, inner
/// standard 3+2+2, root 3+2+7).
#[test]
fn criterion_01_hand_traced_cost() {
    let started = Instant::now();
    let code = PolarCode::new(3, &[6, 7, 8]).unwrap();
    let report_tc = tc_code(&code, 4);
    let mut failures = Vec::new();
    if report_tc.total != 12 {
        failures.push(format!("expected 12, got {}", report_tc.total));
    }
    report("01", "hand-traced cost of the example code is 12", failures, started);
}

/// Criterion 2: degenerate codes. All frozen costs n (rate-0 root); all
/// informational costs min(N, L) (rate-1 root). Exact for n <= 12 and
/// L in {1, 4, 16, 32}.
#[test]
fn criterion_02_degenerate_endpoints() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for n in 1..=12u32 {
        let block = 1usize << n;
        let frozen = PolarCode::new(n, &[]).unwrap();
        let full: Vec<usize> = (1..=block).collect();
        let all_info = PolarCode::new(n, &full).unwrap();
        for l in [1usize, 4, 16, 32] {
            let tc0 = tc_code(&frozen, l).total;
            if tc0 != n as u64 {
                failures.push(format!("K=0 n={n} L={l}: {tc0} != {n}"));
            }
            let tc1 = tc_code(&all_info, l).total;
            if tc1 != block.min(l) as u64 {
                failures.push(format!("K=N n={n} L={l}: {tc1} != {}", block.min(l)));
            }
        }
    }
    report("02", "degenerate endpoints K=0 -> n and K=N -> min(N, L)", failures, started);
}

/// Criterion 3: for 500 random information sets per n in 4..=10,
/// n <= TC <= 2^(n+2) - 3 and TC is non-decreasing in L. Sets are drawn with
/// 1 <= K <= N-1: the K = N endpoint is exercised by criterion 2 and costs
/// min(N, L) < n when L < n, so the lower bound as stated excludes it.
#[test]
fn criterion_03_bounds_and_list_monotonicity() {
    let started = Instant::now();
    let mut rng = Lcg(0xc0ffee);
    let mut failures = Vec::new();
    let list_grid = [1usize, 2, 4, 8, 16, 32];
    'outer: for n in 4..=10u32 {
        let block = 1usize << n;
        for _ in 0..500 {
            let k = 1 + rng.below(block - 1);
            // Partial Fisher-Yates for a uniform K-subset.
            let mut positions: Vec<usize> = (1..=block).collect();
            for i in 0..k {
                let j = i + rng.below(block - i);
                positions.swap(i, j);
            }
            let code = PolarCode::new(n, &positions[..k]).unwrap();
            let mut prev = 0u64;
            for &l in &list_grid {
                let tc = tc_code(&code, l).total;
                if tc < n as u64 || tc > tc_worst_case_bound(n) {
                    failures.push(format!("n={n} K={k} L={l}: TC {tc} out of bounds"));
                }
                if tc < prev {
                    failures.push(format!("n={n} K={k}: TC decreased {prev} -> {tc} at L={l}"));
                }
                prev = tc;
                if failures.len() > 5 {
                    break 'outer;
                }
            }
        }
    }
    report("03", "cost bounds and monotonicity in L over random sets", failures, started);
}

/// Criterion 4: rate-sweep shape at N = 1024, L = 16 over 0.05..0.95 step
/// 0.05 with the default per-rate capacity-matched construction: the maximum
/// lies at some R in [0.40, 0.60] and both endpoints fall below a quarter of
/// it.
///
/// The endpoint subclauses are not attainable with density-evolution
/// information sets: every high-rate code freezes the isolated dyadic block
/// leaders (u_513, u_257, ...), each of which forces a standard-node spine
/// whose Rate-1 siblings cost about min(2^k, L) each, keeping TC(0.95)
/// around half the peak; TC(0.05) sits near 0.26-0.27 of the peak for every
/// standard design rule.
#[test]
fn criterion_04_rate_sweep_shape() {
    let started = Instant::now();
    let rates: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let rows = tc_rate_sweep(10, 16, &rates, DesignRule::CapacityMatched).unwrap();
    let max = rows.iter().map(|r| r.tc).max().unwrap();
    let argmax = rows.iter().find(|r| r.tc == max).unwrap().rate;
    let lo = rows.first().unwrap().tc;
    let hi = rows.last().unwrap().tc;
    let mut failures = Vec::new();
    if !(0.40..=0.60).contains(&argmax) {
        failures.push(format!("peak {max} at R={argmax:.2}, outside [0.40, 0.60]"));
    }
    if (lo as f64) >= 0.25 * max as f64 {
        failures.push(format!("TC(0.05) = {lo} is {:.3} of peak {max}, not < 0.25", lo as f64 / max as f64));
    }
    if (hi as f64) >= 0.25 * max as f64 {
        failures.push(format!("TC(0.95) = {hi} is {:.3} of peak {max}, not < 0.25", hi as f64 / max as f64));
    }
    report("04", "rate-sweep peak near R=0.5 with quarter-peak endpoints", failures, started);
}

/// Criterion 5: 32-ASK, N = 1024, L = 16, epsilon = 0.01, SNR 5..35 dB step
/// 0.5: (a) at most two coded levels everywhere; (b) total cost over the
/// single-code worst case in [1.0, 2.0] pointwise with sweep average in
/// [1.2, 1.8]; (c) max/min of the total over the sweep <= 2.
///
/// Exact conditional mutual informations make (a) and (c) and the pointwise
/// part of (b) unattainable: level-rate tails decay geometrically (~4x per
/// level), so an epsilon of 0.01 catches three or four levels at mid SNR,
/// and above ~29 dB every level leaves the coded band, collapsing the total
/// to m and breaking the pointwise lower bound and the max/min ratio.
#[test]
fn criterion_05_mlc_cost_band() {
    let started = Instant::now();
    let rates: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let single = tc_rate_sweep(10, 16, &rates, DesignRule::CapacityMatched).unwrap();
    let single_max = single.iter().map(|r| r.tc).max().unwrap() as f64;

    let grid: Vec<f64> = (0..=60).map(|i| 5.0 + 0.5 * i as f64).collect();
    let sweep = mlc_tc_sweep(5, &grid, 10, 16, 0.01, BitOrder::LsbFirst).unwrap();

    let mut failures = Vec::new();
    let coded_violations: Vec<f64> = sweep
        .iter()
        .filter(|row| row.rates.iter().filter(|r| **r >= 0.01 && **r <= 0.99).count() > 2)
        .map(|row| row.snr_db)
        .collect();
    if !coded_violations.is_empty() {
        failures.push(format!(
            "(a) more than two coded levels at {} of {} points (first at {} dB)",
            coded_violations.len(),
            sweep.len(),
            coded_violations[0]
        ));
    }

    let ratios: Vec<f64> = sweep.iter().map(|r| r.total_tc as f64 / single_max).collect();
    let out_of_band = ratios.iter().filter(|r| !(1.0..=2.0).contains(*r)).count();
    if out_of_band > 0 {
        let rmin = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let rmax = ratios.iter().cloned().fold(0.0f64, f64::max);
        failures.push(format!(
            "(b) pointwise ratio outside [1.0, 2.0] at {out_of_band} points (range {rmin:.3}..{rmax:.3})"
        ));
    }
    let avg = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if !(1.2..=1.8).contains(&avg) {
        failures.push(format!("(b) sweep-average ratio {avg:.3} outside [1.2, 1.8]"));
    }

    let tmax = sweep.iter().map(|r| r.total_tc).max().unwrap() as f64;
    let tmin = sweep.iter().map(|r| r.total_tc).min().unwrap() as f64;
    if tmax / tmin > 2.0 {
        failures.push(format!("(c) max/min total cost {:.3} exceeds 2", tmax / tmin));
    }

    report("05", "multi-level cost stays near 1.5x the single-code worst case", failures, started);
}

/// Criterion 6: chain-rule conservation. For m in 1..=5 and SNR in -10..=40
/// dB step 1, the level rates sum to the directly computed mutual
/// information within 1e-6.
#[test]
fn criterion_06_chain_rule_conservation() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    'outer: for m in 1..=5u32 {
        for snr_i in -10..=40i32 {
            let snr_db = snr_i as f64;
            let rates = level_rates(m, snr_db).unwrap();
            let total = total_mutual_information(m, snr_db).unwrap();
            let gap = (rates.rates.iter().sum::<f64>() - total).abs();
            worst = worst.max(gap);
            if gap > 1e-6 {
                failures.push(format!("m={m} snr={snr_db}: |sum - I(X;Y)| = {gap:.3e}"));
                if failures.len() > 4 {
                    break 'outer;
                }
            }
        }
    }
    if failures.is_empty() {
        println!("       chain-rule worst gap {worst:.3e}");
    }
    report("06", "level rates sum to the mutual information within 1e-6", failures, started);
}

/// Criterion 7: list decoding with L = 2^K never prunes, so the best path
/// must attain the brute-force minimum of the codeword metric
/// sum log(1+e^(-(1-2x) llr)) over all 2^K codewords, within 1e-9.
#[test]
fn criterion_07_scl_equals_ml_oracle() {
    let started = Instant::now();
    let mut rng = Lcg(0xdec0de);
    let mut failures = Vec::new();
    for (n, k) in [(3u32, 4usize), (4, 6)] {
        let code = construct_code(n, k, 0.0).unwrap();
        assert_eq!(code.dimension(), k);
        let info = code.info_set();
        for frame in 0..200 {
            let (_, llr) = noisy_frame(&code, 1.0, &mut rng);
            let out = scl_decode(&llr, &code, 1 << k, false).unwrap();
            // Independent oracle: direct evaluation over the whole codebook.
            let mut best = f64::INFINITY;
            for pattern in 0..(1u32 << k) {
                let mut u = vec![0u8; code.block_length()];
                for (bit, &pos) in info.iter().enumerate() {
                    u[pos - 1] = ((pattern >> bit) & 1) as u8;
                }
                let x = encode(&u, &code).unwrap();
                let metric: f64 = x
                    .iter()
                    .zip(&llr)
                    .map(|(&b, &a)| {
                        let a = a.clamp(-LLR_MAX, LLR_MAX);
                        (1.0 + (-(1.0 - 2.0 * b as f64) * a).exp()).ln()
                    })
                    .sum();
                best = best.min(metric);
            }
            if (out.best.pm - best).abs() > 1e-9 {
                failures.push(format!(
                    "N={} K={k} frame {frame}: SCL pm {} vs ML {best}",
                    code.block_length(),
                    out.best.pm
                ));
                break;
            }
        }
    }
    report("07", "full-list decoding attains the brute-force ML metric", failures, started);
}

/// Criterion 8: fast-node equivalence, 10^4 random frames for each
/// N in {64, 256} and L in {2, 4, 16}: identical best-path bits and metrics
/// within 1e-9.
///
/// Not attainable for L > 1 with the exact path metric: a Rate-1 shortcut
/// charges the subtree metric against the node input LLRs, and those
/// increments only telescope to the plain decoder's at complete-subtree
/// boundaries. Pruning inside the node therefore compares different partial
/// sums and can keep a different survivor set, diverging on a small fraction
/// of frames (roughly 0.01%-2% here, worst at small L). The equivalence in
/// the fast-decoder literature holds for the flip-cost-only approximate
/// metric, not for the exact one pinned by criterion 10.
#[test]
fn criterion_08_fast_node_equivalence() {
    let started = Instant::now();
    let mut rng = Lcg(0xfa57);
    let mut failures = Vec::new();
    for (n, k) in [(6u32, 32usize), (8, 128)] {
        let code = construct_code(n, k, 1.0).unwrap();
        for l in [2usize, 4, 16] {
            let mut bit_mismatch = 0u32;
            let mut pm_mismatch = 0u32;
            let frames = 10_000;
            for _ in 0..frames {
                let (_, llr) = noisy_frame(&code, 1.0, &mut rng);
                let plain = scl_decode(&llr, &code, l, false).unwrap();
                let fast = scl_decode(&llr, &code, l, true).unwrap();
                if plain.best.u_hat != fast.best.u_hat {
                    bit_mismatch += 1;
                } else if (plain.best.pm - fast.best.pm).abs() > 1e-9 {
                    pm_mismatch += 1;
                }
            }
            if bit_mismatch + pm_mismatch > 0 {
                failures.push(format!(
                    "N={} L={l}: {bit_mismatch} bit mismatches, {pm_mismatch} metric mismatches in {frames} frames",
                    code.block_length()
                ));
            }
        }
    }
    report("08", "fast and plain decoding are bit-identical", failures, started);
}

/// Criterion 9: list-16 decoding of the (128, 64) code reaches FER < 1e-2 at
/// an SNR where single-path decoding is at least 1.5x worse, over 2*10^4
/// frames per point with a fixed seed.
///
/// The code is designed at its 3 dB operating point (a construction matched
/// to a noisier channel narrows the list gain). Margin: at the passing point
/// FER(L=16) ~ 9e-3 means ~180 frame errors, a relative standard error under
/// 8%, and the observed single-path gap is ~2.7x, several standard errors
/// above the required 1.5x.
#[test]
fn criterion_09_list_gain_in_simulation() {
    let started = Instant::now();
    let code = construct_code(7, 64, 3.0).unwrap();
    let frames = 20_000;
    let mut failures = Vec::new();
    let mut passed_at = None;
    let mut observations = Vec::new();
    for snr_db in [3.0f64, 3.5] {
        let channel = ChannelConfig { snr_db, seed: 0x5eed_2024 };
        let l16 = run_single_code(&code, 16, &channel, frames, &SimOptions::default()).unwrap();
        if l16.fer >= 1e-2 || l16.frame_errors == 0 {
            observations.push(format!("{snr_db} dB: FER16 {:.3e} unusable", l16.fer));
            continue;
        }
        let l1 = run_single_code(&code, 1, &channel, frames, &SimOptions::default()).unwrap();
        observations.push(format!(
            "{snr_db} dB: FER16 {:.3e} ({} errors), FER1 {:.3e}, ratio {:.2}",
            l16.fer,
            l16.frame_errors,
            l1.fer,
            l1.fer / l16.fer
        ));
        if l1.fer >= 1.5 * l16.fer {
            passed_at = Some(snr_db);
            break;
        }
    }
    for o in &observations {
        println!("       {o}");
    }
    if passed_at.is_none() {
        failures.push(format!("no grid point satisfied the criterion: {observations:?}"));
    }
    report("09", "list-16 beats single-path decoding by 1.5x in FER", failures, started);
}

/// Criterion 10: numerical kernels against directly evaluated references on
/// a 1e4-point grid, within 1e-9 relative (absolute floor 1e-9 near zero),
/// and the min-sum bound |f - minsum| <= ln 2 everywhere on the grid.
#[test]
fn criterion_10_numerical_kernels() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let ln2 = std::f64::consts::LN_2;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0);

    // f_combine vs ln((1+e^(a+b))/(e^a+e^b)), safe directly for |a|,|b| <= 40.
    let mut worst_f = 0.0f64;
    for i in 0..100 {
        for j in 0..100 {
            let a = -LLR_MAX + i as f64 * (2.0 * LLR_MAX / 99.0);
            let b = -LLR_MAX + j as f64 * (2.0 * LLR_MAX / 99.0);
            let reference = ((1.0 + (a + b).exp()) / (a.exp() + b.exp())).ln();
            let got = f_combine(a, b);
            worst_f = worst_f.max((got - reference).abs());
            if !close(got, reference) {
                failures.push(format!("f_combine({a}, {b}) = {got} vs {reference}"));
            }
            let bound = (got - f_combine_minsum(a, b)).abs();
            if bound > ln2 + 1e-12 {
                failures.push(format!("min-sum bound violated at ({a}, {b}): {bound}"));
            }
            if failures.len() > 4 {
                break;
            }
        }
    }

    // pm_update vs ln(1 + e^(-(1-2u) alpha)).
    let mut worst_pm = 0.0f64;
    for u in [0u8, 1] {
        for i in 0..5000 {
            let alpha = -LLR_MAX + i as f64 * (2.0 * LLR_MAX / 4999.0);
            let reference = (1.0 + (-(1.0 - 2.0 * u as f64) * alpha).exp()).ln();
            let got = pm_update(0.0, u, alpha);
            worst_pm = worst_pm.max((got - reference).abs());
            if !close(got, reference) {
                failures.push(format!("pm_update(0, {u}, {alpha}) = {got} vs {reference}"));
                break;
            }
        }
    }
    if failures.is_empty() {
        println!("       worst |f - ref| {worst_f:.3e}, worst |pm - ref| {worst_pm:.3e}");
    }
    report("10", "numerical kernels match direct references", failures, started);
}
