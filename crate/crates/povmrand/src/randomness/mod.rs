//! Intrinsic-randomness functionals for PVMs and POVMs: the relative-entropy
//! measure R_q, the convex-roof measure R_c, randomness of extremal POVMs
//! through the canonical extension, the convex-roof value over POVM
//! decompositions, state-independent minima, and the analytic bounds.

mod cf;
mod convex_roof;
mod dilated;
mod minimize;
mod search;

pub use cf::r_cf;
pub use convex_roof::r_c_pvm;
pub use dilated::r_extremal;
pub use minimize::min_randomness;

use crate::linalg::{
    relative_entropy, von_neumann_entropy, ComplexMatrix, DensityState, Ket, LinalgError,
};
use crate::naimark::Pvm;
use crate::povm::{Decomposition, Povm, PovmError, ZERO_ELEMENT_TRACE};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum RandomnessError {
    #[error("dimension mismatch between state and measurement")]
    DimensionMismatch,
    #[error("input POVM is not extremal; use the convex-roof route instead")]
    NotExtremalInput,
    #[error("no feasible decomposition reached the residual gate")]
    NoFeasiblePoint,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Povm(#[from] PovmError),
}

/// Which randomness functional to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// Convex-roof measure (per-copy adversary).
    Rc,
    /// Conditional-entropy measure (joint adversary).
    Rq,
}

/// Whether a reported value is exact or an optimizer upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundType {
    Exact,
    UpperBound,
}

/// Pure-state ensemble q_j, |psi_j> realizing a density operator.
#[derive(Clone, Debug)]
pub struct PureDecomposition {
    weights: Vec<f64>,
    kets: Vec<Ket>,
}

impl PureDecomposition {
    pub fn new(weights: Vec<f64>, kets: Vec<Ket>) -> Self {
        assert_eq!(weights.len(), kets.len());
        Self { weights, kets }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kets(&self) -> &[Ket] {
        &self.kets
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// sum_j q_j |psi_j><psi_j|
    pub fn mixture(&self) -> ComplexMatrix {
        let d = self.kets[0].dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (q, k) in self.weights.iter().zip(&self.kets) {
            m = &m + &k.projector().scale(*q);
        }
        m
    }

    /// Max-norm residual against a target state.
    pub fn reconstruction_residual(&self, rho: &DensityState) -> f64 {
        (&self.mixture() - rho.matrix()).max_norm()
    }
}

/// Optimizer knobs shared by every search in this module. `seed` pins all
/// randomness; reports are bit-for-bit reproducible for a fixed seed.
#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    /// Number of decomposition terms; `None` selects the Caratheodory-style
    /// default (rank^2 for state ensembles, m d^2 for POVM decompositions).
    pub decomposition_terms: Option<usize>,
    pub penalty_weight: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 2000,
            convergence_tol: 1e-7,
            decomposition_terms: None,
            penalty_weight: 1e3,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Reduced budget for inner optimizations nested inside an outer search.
    pub(crate) fn inner(&self, tag: u64) -> Self {
        Self {
            restarts: self.restarts.clamp(1, 2),
            max_iterations: (self.max_iterations / 8).max(120),
            convergence_tol: self.convergence_tol.max(1e-6),
            decomposition_terms: None,
            penalty_weight: self.penalty_weight,
            seed: crate::oracle::Rng::new(self.seed).derive(tag).next_u64(),
        }
    }
}

/// Value of a randomness functional plus the certificate that achieved it.
#[derive(Clone, Debug)]
pub struct RandomnessReport {
    pub value: f64,
    pub bound_type: BoundType,
    pub pure_certificate: Option<PureDecomposition>,
    pub decomposition_certificate: Option<Decomposition>,
    /// Caveats that belong in the report rather than a side channel, e.g.
    /// an inconclusive extremality verdict or a pure-state-scan bound.
    pub note: Option<String>,
}

impl RandomnessReport {
    pub(crate) fn exact(value: f64) -> Self {
        Self {
            value,
            bound_type: BoundType::Exact,
            pure_certificate: None,
            decomposition_certificate: None,
            note: None,
        }
    }
}

/// Block-dephasing sum_i P_i rho P_i.
pub fn block_dephase(rho: &DensityState, pvm: &Pvm) -> Result<DensityState, RandomnessError> {
    if rho.dim() != pvm.dim() {
        return Err(RandomnessError::DimensionMismatch);
    }
    let mut out = ComplexMatrix::zeros(rho.dim(), rho.dim());
    for p in pvm.projectors() {
        out = &out + &(&(p * rho.matrix()) * p);
    }
    // Symmetrize away rounding; dephasing preserves Hermiticity exactly.
    let sym = (&out + &out.conjugate_transpose()).scale(0.5);
    Ok(DensityState::new(sym)?)
}

/// R_q(rho, P) = S(Delta(rho)) - S(rho), in bits.
pub fn r_q_pvm(rho: &DensityState, pvm: &Pvm) -> Result<f64, RandomnessError> {
    let dephased = block_dephase(rho, pvm)?;
    let value = von_neumann_entropy(&dephased)? - von_neumann_entropy(rho)?;
    Ok(value.max(0.0))
}

/// Randomness of a pure state under a PVM: S(Delta(|psi><psi|)).
pub fn r_c_pure_pvm(psi: &Ket, pvm: &Pvm) -> Result<f64, RandomnessError> {
    let rho = DensityState::from_ket(psi);
    let dephased = block_dephase(&rho, pvm)?;
    Ok(von_neumann_entropy(&dephased)?)
}

/// R_q expressed as a relative entropy, S(rho || Delta(rho)). Agrees with
/// `r_q_pvm` by the conditional-entropy identity; kept as the independent
/// algebraic route for cross-checking.
pub fn r_q_pvm_relative(rho: &DensityState, pvm: &Pvm) -> Result<f64, RandomnessError> {
    let dephased = block_dephase(rho, pvm)?;
    Ok(relative_entropy(rho, &dephased)?)
}

/// True iff |psi> is a common eigenstate of every element: for all i,
/// || M_i |psi> - <psi|M_i|psi> |psi> || < 1e-8.
pub fn is_non_random_pure(psi: &Ket, p: &Povm) -> bool {
    if psi.dim() != p.dim() {
        return false;
    }
    for m in p.elements() {
        let image = m.apply(psi.amplitudes());
        let mean: f64 = psi
            .amplitudes()
            .iter()
            .zip(&image)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let defect: f64 = psi
            .amplitudes()
            .iter()
            .zip(&image)
            .map(|(a, b)| (b - a * mean).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if defect >= 1e-8 {
            return false;
        }
    }
    true
}

/// Non-randomness condition over a decomposition: for every component j and
/// every i != i', || N^j_i rho N^j_{i'} ||_max < 1e-8.
pub fn check_nonrandom_condition(
    rho: &DensityState,
    dec: &Decomposition,
) -> Result<bool, RandomnessError> {
    for comp in dec.components() {
        if comp.dim() != rho.dim() {
            return Err(RandomnessError::DimensionMismatch);
        }
        let images: Vec<ComplexMatrix> = comp
            .elements()
            .iter()
            .map(|m| m * rho.matrix())
            .collect();
        for (i, left) in images.iter().enumerate() {
            for (ip, right) in comp.elements().iter().enumerate() {
                if i == ip {
                    continue;
                }
                if (left * right).max_norm() >= 1e-8 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Cheap necessary filter before any non-randomness claim:
/// [rho, M_i] = 0 for all i within 1e-8 in max norm.
pub fn commutation_check(rho: &DensityState, p: &Povm) -> bool {
    if rho.dim() != p.dim() {
        return false;
    }
    p.elements().iter().all(|m| {
        let forward = rho.matrix() * m;
        let backward = m * rho.matrix();
        (&forward - &backward).max_norm() < 1e-8
    })
}

/// State-dependent lower bound on the Born entropy of a SIC measurement:
/// log2( d(d+1) / (tr(rho^2) + 1) ).
pub fn rastegin_bound(rho: &DensityState) -> f64 {
    let d = rho.dim() as f64;
    (d * (d + 1.0) / (rho.purity() + 1.0)).log2()
}

/// Theorem lower bound for SIC measurements: log2((d+1)/2).
pub fn sic_lower_bound(d: usize) -> f64 {
    ((d as f64 + 1.0) / 2.0).log2()
}

/// Upper bound from the maximally mixed state: R_q(1/d, M) <= log2(d).
pub fn mixed_upper_bound(d: usize) -> f64 {
    (d as f64).log2()
}

/// Born probabilities of a pure state, skipping zero-padding elements.
pub(crate) fn born_entropy(psi: &Ket, p: &Povm) -> f64 {
    let probs: Vec<f64> = p
        .elements()
        .iter()
        .map(|m| {
            if m.trace().re < ZERO_ELEMENT_TRACE {
                0.0
            } else {
                psi.expectation(m).max(0.0)
            }
        })
        .collect();
    crate::entropy_of_weights(&probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::naimark::Pvm;
    use crate::povm::{sic_qubit, trivial_povm};

    fn z_pvm() -> Pvm {
        Pvm::new(
            2,
            vec![Ket::basis(2, 0).projector(), Ket::basis(2, 1).projector()],
        )
        .unwrap()
    }

    fn plus() -> Ket {
        let inv = 1.0 / 2.0f64.sqrt();
        Ket::normalized(vec![C64::new(inv, 0.0), C64::new(inv, 0.0)]).unwrap()
    }

    #[test]
    fn dephase_by_identity_pvm_is_identity_map() {
        let pvm = Pvm::new(2, vec![ComplexMatrix::identity(2)]).unwrap();
        let rho = DensityState::from_ket(&plus());
        let out = block_dephase(&rho, &pvm).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 1e-12));
    }

    #[test]
    fn dephase_plus_in_z() {
        let rho = DensityState::from_ket(&plus());
        let out = block_dephase(&rho, &z_pvm()).unwrap();
        assert!(out.matrix().approx_eq(&ComplexMatrix::diagonal(&[0.5, 0.5]), 1e-12));
    }

    #[test]
    fn dephase_is_idempotent() {
        let rho = DensityState::from_ket(&plus());
        let once = block_dephase(&rho, &z_pvm()).unwrap();
        let twice = block_dephase(&once, &z_pvm()).unwrap();
        assert!(once.matrix().approx_eq(twice.matrix(), 1e-12));
    }

    #[test]
    fn rq_of_diagonal_state_is_zero() {
        let rho = DensityState::new(ComplexMatrix::diagonal(&[0.3, 0.7])).unwrap();
        assert!(r_q_pvm(&rho, &z_pvm()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rq_plus_under_z_is_one() {
        let rho = DensityState::from_ket(&plus());
        assert!((r_q_pvm(&rho, &z_pvm()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rq_maximally_mixed_under_z_is_zero() {
        let rho = DensityState::maximally_mixed(2);
        assert!(r_q_pvm(&rho, &z_pvm()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rq_identities_agree() {
        let rho = DensityState::from_ket(&plus());
        let a = r_q_pvm(&rho, &z_pvm()).unwrap();
        let b = r_q_pvm_relative(&rho, &z_pvm()).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn pure_coincidence() {
        let psi = plus();
        let a = r_c_pure_pvm(&psi, &z_pvm()).unwrap();
        let b = r_q_pvm(&DensityState::from_ket(&psi), &z_pvm()).unwrap();
        assert!((a - b).abs() < 1e-10);
        assert!((a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenstate_has_zero_pure_randomness() {
        assert!(r_c_pure_pvm(&Ket::basis(2, 0), &z_pvm()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn non_random_detection() {
        let z = Povm::new(
            2,
            vec![Ket::basis(2, 0).projector(), Ket::basis(2, 1).projector()],
        )
        .unwrap();
        assert!(is_non_random_pure(&Ket::basis(2, 0), &z));
        assert!(!is_non_random_pure(&Ket::basis(2, 0), &sic_qubit()));
        let flat = trivial_povm(2, &[0.3, 0.7]).unwrap();
        assert!(is_non_random_pure(&plus(), &flat));
    }

    #[test]
    fn nonrandom_condition_over_decompositions() {
        let z_povm = Povm::new(
            2,
            vec![Ket::basis(2, 0).projector(), Ket::basis(2, 1).projector()],
        )
        .unwrap();
        let single = crate::povm::Decomposition::new(vec![1.0], vec![z_povm.clone()], z_povm.clone());

        let rho0 = DensityState::from_ket(&Ket::basis(2, 0));
        assert!(check_nonrandom_condition(&rho0, &single).unwrap());

        let rho_plus = DensityState::from_ket(&plus());
        assert!(!check_nonrandom_condition(&rho_plus, &single).unwrap());

        // 1/2 against the two-PVM mixture: each PVM dephases it trivially.
        let x_povm = crate::povm::vn_x_qubit();
        let mixed_parent = crate::povm::mix(&[0.5, 0.5], &[z_povm.clone(), x_povm.clone()]).unwrap();
        let dec = crate::povm::Decomposition::new(
            vec![0.5, 0.5],
            vec![z_povm, x_povm],
            mixed_parent,
        );
        let maximally_mixed = DensityState::maximally_mixed(2);
        assert!(check_nonrandom_condition(&maximally_mixed, &dec).unwrap());
        assert!(!check_nonrandom_condition(&rho_plus, &dec).unwrap());
    }

    #[test]
    fn commutation_filter() {
        let p = sic_qubit();
        assert!(commutation_check(&DensityState::maximally_mixed(2), &p));
        let z = Povm::new(
            2,
            vec![Ket::basis(2, 0).projector(), Ket::basis(2, 1).projector()],
        )
        .unwrap();
        assert!(!commutation_check(&DensityState::from_ket(&plus()), &z));
        let flat = trivial_povm(2, &[0.5, 0.5]).unwrap();
        assert!(commutation_check(&DensityState::from_ket(&plus()), &flat));
    }

    #[test]
    fn bounds_evaluate() {
        let pure = DensityState::from_ket(&Ket::basis(2, 0));
        assert!((rastegin_bound(&pure) - 3.0f64.log2()).abs() < 1e-12);
        let mixed = DensityState::maximally_mixed(2);
        assert!((rastegin_bound(&mixed) - 2.0).abs() < 1e-12);
        assert!((sic_lower_bound(2) - 1.5f64.log2()).abs() < 1e-12);
        assert!((mixed_upper_bound(2) - 1.0).abs() < 1e-12);
        assert!((sic_lower_bound(3) - 1.0).abs() < 1e-12);
        assert!((mixed_upper_bound(3) - 3.0f64.log2()).abs() < 1e-12);
        // gap below one bit for all small d
        for d in 2..12 {
            let gap = mixed_upper_bound(d) - sic_lower_bound(d);
            assert!(gap > 0.0 && gap < 1.0);
        }
    }
}
