//! Gauss–Hermite quadrature for expectations under Gaussian noise.

use crate::error::{numerical, Result};
use std::sync::OnceLock;

/// Quadrature orders used by the adaptive doubling ladder, coarsest first.
pub const LADDER_ORDERS: [usize; 4] = [64, 128, 256, 512];

/// Nodes and weights for ∫ e^{-t²} f(t) dt ≈ Σ w_i f(t_i).
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Computes a rule via Golub-Welsch: the nodes are the eigenvalues of the
    /// Jacobi matrix of the Hermite recurrence and the weights come from the
    /// first components of its eigenvectors.
    pub fn new(order: usize) -> Result<Self> {
        if !(1..=2000).contains(&order) {
            return numerical(format!("Gauss-Hermite order {order} unsupported"));
        }
        let n = order;
        let mut diag = vec![0.0f64; n];
        let mut off: Vec<f64> = (0..n).map(|j| ((j + 1) as f64 / 2.0).sqrt()).collect();
        off[n - 1] = 0.0;
        let mut first = vec![0.0f64; n];
        first[0] = 1.0;
        tridiag_ql_first_components(&mut diag, &mut off, &mut first)?;

        let sqrt_pi = std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> = diag
            .into_iter()
            .zip(first)
            .map(|(node, c)| (node, sqrt_pi * c * c))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Symmetrize the ± node pairs.
        let mut nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let mut weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        for i in 0..n / 2 {
            let t = 0.5 * (nodes[n - 1 - i] - nodes[i]);
            nodes[i] = -t;
            nodes[n - 1 - i] = t;
            let w = 0.5 * (weights[i] + weights[n - 1 - i]);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// The shared rule for one of [`LADDER_ORDERS`], computed once.
    pub fn ladder(step: usize) -> &'static GaussHermite {
        static RULES: OnceLock<Vec<GaussHermite>> = OnceLock::new();
        let rules = RULES.get_or_init(|| {
            LADDER_ORDERS
                .iter()
                .map(|&o| GaussHermite::new(o).expect("ladder orders are supported"))
                .collect()
        });
        &rules[step]
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// ∫ e^{-t²} f(t) dt.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// E[f(Z)] for Z ~ N(mean, sigma²).
    pub fn expect_normal(&self, mean: f64, sigma: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let scale = std::f64::consts::SQRT_2 * sigma;
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        inv_sqrt_pi * self.integrate(|t| f(mean + scale * t))
    }
}

/// QL with implicit shifts on a symmetric tridiagonal matrix, rotating a
/// single row vector along so that only the first eigenvector components are
/// tracked. `diag` ends up holding the eigenvalues (unsorted); `off[i]` is
/// the subdiagonal entry between rows i and i+1 with `off[n-1]` scratch.
fn tridiag_ql_first_components(diag: &mut [f64], off: &mut [f64], row: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iterations = 0;
        'outer: loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break 'outer;
            }
            iterations += 1;
            if iterations > 100 {
                return numerical("tridiagonal QL iteration did not converge");
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(if g == 0.0 { 1.0 } else { g }));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let mut f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    continue 'outer;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                f = row[i + 1];
                row[i + 1] = s * row[i] + c * f;
                row[i] = c * row[i] - s * f;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}
