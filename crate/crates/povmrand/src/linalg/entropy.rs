//! Shannon and von Neumann entropies, quantum relative entropy.
//!
//! All logarithms are base 2; results are in bits. The 0 log 0 = 0
//! convention applies throughout, and eigenvalue dust in [-1e-9, 0) is
//! clamped to zero before any logarithm.

use super::matrix::{DensityState, DEFAULT_TOL};
use super::{hermitian_eig, LinalgError};

/// Weights below this are treated as exact zeros inside entropy sums.
const ZERO_WEIGHT: f64 = 1e-12;

fn plogp(p: f64) -> f64 {
    if p <= ZERO_WEIGHT {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy H(p) = -sum p_i log2 p_i of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> Result<f64, LinalgError> {
    let mut total = 0.0;
    for &x in p {
        if x < -ZERO_WEIGHT {
            return Err(LinalgError::InvalidDistribution(x));
        }
        total += x.max(0.0);
    }
    if (total - 1.0).abs() > DEFAULT_TOL {
        return Err(LinalgError::InvalidDistribution(total));
    }
    Ok(p.iter().map(|&x| plogp(x.max(0.0))).sum())
}

/// Entropy contribution of a raw nonnegative weight vector that need not be
/// normalized to machine precision; negative dust is clamped.
pub(crate) fn entropy_of_weights(weights: &[f64]) -> f64 {
    weights.iter().map(|&x| plogp(x.max(0.0))).sum()
}

/// von Neumann entropy S(rho) = -tr(rho log2 rho), in bits.
pub fn von_neumann_entropy(rho: &DensityState) -> Result<f64, LinalgError> {
    let (eigenvalues, _) = hermitian_eig(rho.matrix())?;
    Ok(entropy_of_weights(&eigenvalues))
}

/// Quantum relative entropy S(rho || sigma) = tr(rho log2 rho - rho log2 sigma).
///
/// Returns `f64::INFINITY` when the support of rho leaks outside the support
/// of sigma; that is a legitimate value, not an error.
pub fn relative_entropy(rho: &DensityState, sigma: &DensityState) -> Result<f64, LinalgError> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let (r_vals, r_vecs) = hermitian_eig(rho.matrix())?;
    let (s_vals, s_vecs) = hermitian_eig(sigma.matrix())?;

    // tr(rho log rho)
    let mut acc = -entropy_of_weights(&r_vals);
    // -tr(rho log sigma) expanded over both eigenbases.
    for (rl, rv) in r_vals.iter().zip(&r_vecs) {
        let rl = rl.max(0.0);
        if rl <= ZERO_WEIGHT {
            continue;
        }
        for (sl, sv) in s_vals.iter().zip(&s_vecs) {
            let overlap = rv.inner(sv).norm_sqr();
            if overlap <= 1e-14 {
                continue;
            }
            let sl = sl.max(0.0);
            if sl <= ZERO_WEIGHT {
                // rho has weight where sigma vanishes: infinite divergence.
                if rl * overlap > DEFAULT_TOL {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            acc -= rl * overlap * sl.log2();
        }
    }
    // Rounding can push the result a hair below zero when rho == sigma.
    Ok(acc.max(0.0))
}
