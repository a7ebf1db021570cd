//! Information-set construction for the AWGN channel via density evolution
//! under the Gaussian approximation.
//!
//! Each bit channel is tracked by the mean of its LLR distribution. Starting
//! from the BPSK root mean `mu0 = 2/sigma²`, the check-side child gets
//! `phi_inv(1 - (1 - phi(mu))²)` and the variable-side child gets `2 mu`. The
//! K leaves with the largest means form the information set.

use crate::code::PolarCode;
use crate::decoder::log1p_exp;
use crate::error::{invalid, numerical, Result};
use crate::quadrature::GaussHermite;

/// Saturation cap for LLR means. `phi` underflows to zero slightly above this
/// point, so means are clamped here to keep the recursion finite at extreme
/// design SNRs.
pub const MU_MAX: f64 = 2500.0;

const PHI_LINEAR_END: f64 = 0.1;
const PHI_EXP_END: f64 = 10.0;

fn phi_exp_piece(x: f64) -> f64 {
    (-0.4527 * x.powf(0.86) + 0.0218).exp()
}

fn phi_tail_raw(x: f64) -> f64 {
    (std::f64::consts::PI / x).sqrt() * (-x / 4.0).exp() * (1.0 - 10.0 / (7.0 * x))
}

/// The tail piece is rescaled to continue the exp fit at the seam.
fn tail_scale() -> f64 {
    phi_exp_piece(PHI_EXP_END) / phi_tail_raw(PHI_EXP_END)
}

/// The Gaussian-approximation function `phi(mu) = 1 - E[tanh(U/2)]` for
/// `U ~ N(mu, 2 mu)`, as the standard piecewise fit.
///
/// Pieces: linear on `[0, 0.1]` anchored at `phi(0) = 1`, the exponential fit
/// `exp(-0.4527 x^0.86 + 0.0218)` on `[0.1, 10]`, and the asymptotic tail
/// `sqrt(pi/x) e^{-x/4} (1 - 10/(7x))` beyond, rescaled for continuity at the
/// seam. Strictly decreasing with `phi(0) = 1` and `phi(x) -> 0`.
pub fn phi(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < PHI_LINEAR_END {
        let end = phi_exp_piece(PHI_LINEAR_END);
        1.0 + (x / PHI_LINEAR_END) * (end - 1.0)
    } else if x <= PHI_EXP_END {
        phi_exp_piece(x)
    } else {
        tail_scale() * phi_tail_raw(x)
    }
}

/// Numerical inverse of [`phi`] on `(0, 1]`.
///
/// The linear and exponential pieces invert in closed form; the tail is
/// bisected. Values at or below `phi(MU_MAX)` return `MU_MAX`.
pub fn phi_inv(y: f64) -> f64 {
    if y >= 1.0 {
        return 0.0;
    }
    let linear_end = phi_exp_piece(PHI_LINEAR_END);
    if y >= linear_end {
        return PHI_LINEAR_END * (1.0 - y) / (1.0 - linear_end);
    }
    if y >= phi_exp_piece(PHI_EXP_END) {
        return ((0.0218 - y.ln()) / 0.4527).powf(1.0 / 0.86);
    }
    if y <= phi(MU_MAX) {
        return MU_MAX;
    }
    let mut lo = PHI_EXP_END;
    let mut hi = MU_MAX;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-10 * lo.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Slope of the linear small-argument piece of `phi`: `phi(x) = 1 - s x`.
fn phi_linear_slope() -> f64 {
    (1.0 - phi_exp_piece(PHI_LINEAR_END)) / PHI_LINEAR_END
}

/// Check-node mean update in the log domain: `ln of phi_inv(p (2 - p))` for
/// `p = phi(e^l)`.
///
/// Below the linear seam the update is exactly `check(mu) = s mu²`, so it is
/// applied as `ln s + 2 l` without ever forming the (underflowing) mean
/// itself. This keeps the reliability ordering of deeply check-degraded
/// channels intact, which the frozen-set structure of high-rate codes
/// depends on.
fn check_mean_log(l: f64) -> f64 {
    if l <= PHI_LINEAR_END.ln() {
        phi_linear_slope().ln() + 2.0 * l
    } else {
        let p = phi(l.exp());
        phi_inv(p * (2.0 - p)).clamp(f64::MIN_POSITIVE, MU_MAX).ln()
    }
}

/// Per-leaf LLR means produced by density evolution at a design SNR.
#[derive(Debug, Clone)]
pub struct ReliabilityProfile {
    /// Mean LLR of each bit channel, in natural leaf order (length `N`).
    /// Hopeless channels may underflow to zero here; ordering decisions use
    /// [`log_mu`](Self::log_mu).
    pub mu: Vec<f64>,
    /// Natural log of each mean; always finite, the selection key.
    pub log_mu: Vec<f64>,
    /// Design SNR `Es/sigma²` in dB.
    pub design_snr_db: f64,
}

/// Runs Gaussian-approximation density evolution over `T_n` for BPSK on the
/// AWGN channel at the given design SNR.
///
/// Means saturate at [`MU_MAX`], so extreme design SNRs stay finite.
pub fn ga_density_evolution(n: u32, design_snr_db: f64) -> Result<ReliabilityProfile> {
    if n < 1 {
        return invalid("tree depth n must be at least 1");
    }
    if !design_snr_db.is_finite() {
        return invalid("design SNR must be finite");
    }
    let sigma2 = 10f64.powf(-design_snr_db / 10.0);
    let log_cap = MU_MAX.ln();
    let mut log_means = vec![(2.0 / sigma2).min(MU_MAX).ln()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(log_means.len() * 2);
        for &l in &log_means {
            next.push(check_mean_log(l));
            next.push((l + std::f64::consts::LN_2).min(log_cap));
        }
        log_means = next;
    }
    if log_means.iter().any(|l| !l.is_finite()) {
        return numerical("density evolution produced a non-finite mean");
    }
    let mu = log_means.iter().map(|l| l.exp()).collect();
    Ok(ReliabilityProfile { mu, log_mu: log_means, design_snr_db })
}

/// Picks the `k` most reliable leaves as the information set (1-based,
/// ascending). Ties break toward the larger leaf index.
pub fn select_info_set(profile: &ReliabilityProfile, k: usize) -> Result<Vec<usize>> {
    let n = profile.log_mu.len();
    if k > n {
        return invalid(format!("K={k} exceeds block length {n}"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        profile.log_mu[b]
            .partial_cmp(&profile.log_mu[a])
            .expect("means are finite")
            .then(b.cmp(&a))
    });
    let mut set: Vec<usize> = order[..k].iter().map(|&i| i + 1).collect();
    set.sort_unstable();
    Ok(set)
}

/// Convenience wrapper: density evolution plus selection.
pub fn construct_code(n: u32, k: usize, design_snr_db: f64) -> Result<PolarCode> {
    let profile = ga_density_evolution(n, design_snr_db)?;
    let info = select_info_set(&profile, k)?;
    PolarCode::new(n, &info)
}

/// Mutual information of BPSK over the AWGN channel at `Es/sigma²` in dB.
pub fn bpsk_capacity(snr_db: f64) -> f64 {
    let sigma2 = 10f64.powf(-snr_db / 10.0);
    let sigma = sigma2.sqrt();
    let gh = GaussHermite::ladder(1);
    // 1 - E[log2(1 + e^{-L})] with L the LLR of the transmitted bit.
    let c = 1.0
        - gh.expect_normal(1.0, sigma, |y| log1p_exp(-2.0 * y / sigma2)) / std::f64::consts::LN_2;
    c.clamp(0.0, 1.0)
}

/// The design SNR at which BPSK capacity equals `rate + 0.02` (clamped into
/// the achievable range). Used to match each sweep point's code to its rate.
pub fn design_snr_for_rate(rate: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rate) {
        return invalid(format!("rate {rate} outside [0,1]"));
    }
    Ok(snr_for_bpsk_capacity((rate + 0.02).clamp(1e-4, 0.999)))
}

/// Inverts [`bpsk_capacity`] by bisection on `[-45, 45]` dB.
pub fn snr_for_bpsk_capacity(target: f64) -> f64 {
    let mut lo = -45.0f64;
    let mut hi = 45.0f64;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if bpsk_capacity(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
