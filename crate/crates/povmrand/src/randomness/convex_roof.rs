//! Convex-roof minimization over pure-state ensembles.
//!
//! Every n-term ensemble of a rank-r state arises from its eigen-ensemble
//! through an n x r matrix with orthonormal columns, so the search space is
//! a real vector mapped through `orthonormal_columns`. The objective needs
//! only the outcome weights <psi|O_i|psi> of each unnormalized ensemble ket:
//! for orthogonal projectors the dephased entropy of a pure state is exactly
//! the Shannon entropy of those weights, and the same expression covers the
//! Born entropy of POVM elements used by the dilated evaluations.

use super::search::{nelder_mead, orthonormal_columns};
use super::{BoundType, OptimizerConfig, PureDecomposition, RandomnessError, RandomnessReport};
use crate::entropy_of_weights;
use crate::exec;
use crate::linalg::{hermitian_eig, C64, ComplexMatrix, DensityState, Ket};
use crate::naimark::Pvm;
use crate::oracle::Rng;

/// Eigen-ensemble weight threshold.
const ENSEMBLE_EIGENVALUE: f64 = 1e-12;

/// Minimize sum_j q_j H(outcome weights of psi_j) over ensembles of `rho`.
///
/// `operators` are the outcome operators (PVM projectors or POVM elements)
/// acting on rho's own space. Returns the best value, the achieving
/// ensemble, and whether the value is exact (rank-1 input) or an upper
/// bound.
pub(crate) fn convex_roof_min(
    rho: &DensityState,
    operators: &[ComplexMatrix],
    cfg: &OptimizerConfig,
) -> Result<(f64, PureDecomposition, BoundType), RandomnessError> {
    let (eigenvalues, eigenvectors) = hermitian_eig(rho.matrix())?;
    let ensemble: Vec<(f64, Ket)> = eigenvalues
        .iter()
        .zip(eigenvectors)
        .filter(|(l, _)| **l > ENSEMBLE_EIGENVALUE)
        .map(|(l, v)| (*l, v))
        .collect();
    let rank = ensemble.len();

    // Pure input: the only ensemble is the state itself; the roof is exact.
    if rank <= 1 {
        let ket = ensemble
            .first()
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| Ket::basis(rho.dim(), 0));
        let value = outcome_entropy(ket.amplitudes(), operators);
        let certificate = PureDecomposition::new(vec![1.0], vec![ket]);
        return Ok((value.max(0.0), certificate, BoundType::Exact));
    }

    // Scaled eigen-kets w_k = sqrt(lambda_k) v_k.
    let dim = rho.dim();
    let scaled: Vec<Vec<C64>> = ensemble
        .iter()
        .map(|(l, v)| v.amplitudes().iter().map(|z| z * l.sqrt()).collect())
        .collect();

    let terms = cfg.decomposition_terms.unwrap_or(rank * rank).max(rank);
    let param_len = 2 * terms * rank;

    let objective = |params: &[f64]| -> f64 {
        let columns = orthonormal_columns(params, terms, rank);
        let mut total = 0.0;
        for j in 0..terms {
            let amps = ensemble_ket(&columns, &scaled, j, dim);
            let q: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
            if q <= ENSEMBLE_EIGENVALUE {
                continue;
            }
            // q * H(p/q) written without the normalization.
            let weights = outcome_weights(&amps, operators);
            total += entropy_of_weights(&weights) - entropy_of_weights(&[q]);
        }
        total
    };

    // Restart 0 is the eigen-ensemble itself (identity embedding); the rest
    // are random frames.
    let identity_start = {
        let mut params = vec![0.0; param_len];
        for k in 0..rank {
            params[2 * (k * terms + k)] = 1.0;
        }
        params
    };
    let eigen_value = objective(&identity_start);

    let restarts = cfg.restarts.max(1);
    let base_rng = Rng::new(cfg.seed);
    let best = exec::scan_min(restarts, |r| {
        let start: Vec<f64> = if r == 0 {
            identity_start.clone()
        } else {
            let mut rng = base_rng.derive(r as u64);
            (0..param_len).map(|_| rng.normal()).collect()
        };
        let (x, v) = nelder_mead(
            &objective,
            &start,
            0.15,
            cfg.max_iterations,
            cfg.convergence_tol,
        );
        (v, x)
    })
    .expect("at least one restart");

    // The identity start is in restart 0's simplex, but guard explicitly.
    let (value, params) = if eigen_value < best.1 {
        (eigen_value, identity_start)
    } else {
        (best.1, best.2)
    };
    Ok((
        value.max(0.0),
        decode_ensemble(&params, &scaled, terms, rank, dim),
        BoundType::UpperBound,
    ))
}

/// Ensemble ket j of the frame: sum_k T[j,k] sqrt(lambda_k) |v_k>.
fn ensemble_ket(columns: &[Vec<C64>], scaled: &[Vec<C64>], j: usize, dim: usize) -> Vec<C64> {
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for (col, w) in columns.iter().zip(scaled) {
        let t = col[j];
        if t.norm_sqr() == 0.0 {
            continue;
        }
        for (a, wk) in amps.iter_mut().zip(w) {
            *a += t * wk;
        }
    }
    amps
}

fn decode_ensemble(
    params: &[f64],
    scaled: &[Vec<C64>],
    terms: usize,
    rank: usize,
    dim: usize,
) -> PureDecomposition {
    let columns = orthonormal_columns(params, terms, rank);
    let mut weights = Vec::new();
    let mut kets = Vec::new();
    for j in 0..terms {
        let amps = ensemble_ket(&columns, scaled, j, dim);
        let q: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if q <= ENSEMBLE_EIGENVALUE {
            continue;
        }
        weights.push(q);
        kets.push(Ket::normalized(amps).expect("nonzero ensemble ket"));
    }
    PureDecomposition::new(weights, kets)
}

fn outcome_weights(amps: &[C64], operators: &[ComplexMatrix]) -> Vec<f64> {
    operators
        .iter()
        .map(|op| {
            let image = op.apply(amps);
            amps.iter()
                .zip(&image)
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>()
                .max(0.0)
        })
        .collect()
}

/// H of the normalized outcome distribution of a unit amplitude vector.
pub(crate) fn outcome_entropy(amps: &[C64], operators: &[ComplexMatrix]) -> f64 {
    entropy_of_weights(&outcome_weights(amps, operators))
}

/// Convex-roof randomness R_c(rho, P) of a state under a PVM.
///
/// The search is seeded with the eigen-ensemble (whose value it therefore
/// never exceeds) plus random orthonormal frames; the reported value is an
/// upper bound except for rank-1 inputs where the roof is closed-form.
pub fn r_c_pvm(
    rho: &DensityState,
    pvm: &Pvm,
    cfg: &OptimizerConfig,
) -> Result<RandomnessReport, RandomnessError> {
    if rho.dim() != pvm.dim() {
        return Err(RandomnessError::DimensionMismatch);
    }
    let (value, certificate, bound_type) = convex_roof_min(rho, pvm.projectors(), cfg)?;
    Ok(RandomnessReport {
        value,
        bound_type,
        pure_certificate: Some(certificate),
        decomposition_certificate: None,
        note: None,
    })
}
