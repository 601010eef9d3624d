//! Randomness of extremal POVMs through the canonical Naimark extension,
//! plus the fast equivalent forms used inside optimizer loops.

use super::convex_roof::convex_roof_min;
use super::{
    born_entropy, r_q_pvm, Measure, OptimizerConfig, PureDecomposition,
    RandomnessError, RandomnessReport,
};
use crate::entropy_of_weights;
use crate::linalg::{hermitian_eig, matrix_sqrt_psd, C64, DensityState, Ket};
use crate::naimark::{canonical_extension, embed_state};
use crate::povm::{extremality_check, ExtremalityStatus, Povm, ZERO_ELEMENT_TRACE};

/// Precomputed facts about an input state shared across component
/// evaluations.
#[derive(Clone, Debug)]
pub(crate) struct StateInfo {
    pub rho: DensityState,
    pub entropy: f64,
    pub pure_ket: Option<Ket>,
}

impl StateInfo {
    pub fn new(rho: &DensityState) -> Result<Self, RandomnessError> {
        let (eigenvalues, eigenvectors) = hermitian_eig(rho.matrix())?;
        let entropy = entropy_of_weights(&eigenvalues);
        let significant = eigenvalues.iter().filter(|&&l| l > 1e-9).count();
        let pure_ket = if significant <= 1 {
            Some(eigenvectors.into_iter().next().expect("d >= 1"))
        } else {
            None
        };
        Ok(Self {
            rho: rho.clone(),
            entropy,
            pure_ket,
        })
    }
}

/// Randomness of one POVM evaluated through its canonical extension, in the
/// algebraically reduced form:
///
/// - pure input: Born entropy H({tr(M_i rho)}) for either measure;
/// - mixed, Rq: S(⊕_i A_i rho A_i) - S(rho) with A_i = M_i^{1/2}, using the
///   unitary block structure of the dephased dilated state;
/// - mixed, Rc: convex roof of the Born entropy over ensembles of rho, which
///   the pure-ancilla support constraint makes equivalent to the roof on the
///   dilated space.
pub(crate) fn component_randomness(
    info: &StateInfo,
    component: &Povm,
    measure: Measure,
    inner_cfg: &OptimizerConfig,
) -> Result<f64, RandomnessError> {
    if let Some(ket) = &info.pure_ket {
        return Ok(born_entropy(ket, component));
    }
    match measure {
        Measure::Rq => {
            let mut weights = Vec::new();
            for m in component.elements() {
                if m.trace().re < ZERO_ELEMENT_TRACE {
                    continue;
                }
                let root = matrix_sqrt_psd(m)?;
                let block = &(&root * info.rho.matrix()) * &root;
                let sym = (&block + &block.conjugate_transpose()).scale(0.5);
                let (vals, _) = hermitian_eig(&sym)?;
                weights.extend(vals.into_iter().map(|v| v.max(0.0)));
            }
            Ok((entropy_of_weights(&weights) - info.entropy).max(0.0))
        }
        Measure::Rc => {
            let (value, _, _) = convex_roof_min(&info.rho, component.elements(), inner_cfg)?;
            Ok(value)
        }
    }
}

/// Randomness of an extremal POVM: build the canonical extension, embed
/// rho (x) |0><0|, and evaluate the chosen functional on the dilated PVM.
///
/// Errors on a `NotExtremal` verdict; an `Inconclusive` one (independent
/// elements of rank above one) is accepted and flagged in the report note.
pub fn r_extremal(
    rho: &DensityState,
    p: &Povm,
    measure: Measure,
    cfg: &OptimizerConfig,
) -> Result<RandomnessReport, RandomnessError> {
    if rho.dim() != p.dim() {
        return Err(RandomnessError::DimensionMismatch);
    }
    let verdict = extremality_check(p)?;
    if verdict.status == ExtremalityStatus::NotExtremal {
        return Err(RandomnessError::NotExtremalInput);
    }

    let ext = canonical_extension(p)?;
    let embedded = embed_state(rho, &ext)?;

    let mut report = match measure {
        Measure::Rq => RandomnessReport::exact(r_q_pvm(&embedded, &ext.pvm)?),
        Measure::Rc => {
            let (value, dilated_cert, bound_type) =
                convex_roof_min(&embedded, ext.pvm.projectors(), cfg)?;
            let certificate = project_certificate(&dilated_cert, ext.system_dim, ext.ancilla_dim);
            RandomnessReport {
                value,
                bound_type,
                pure_certificate: Some(certificate),
                decomposition_certificate: None,
                note: None,
            }
        }
    };
    if verdict.status == ExtremalityStatus::Inconclusive {
        report.note = Some(
            "extremality inconclusive (independent elements of rank > 1); \
             value assumes the canonical extension is optimal"
                .to_string(),
        );
    }
    Ok(report)
}

/// Certificate kets of the embedded state live on A (x) Q with support in
/// the ancilla-0 slice; strip the ancilla factor.
fn project_certificate(dilated: &PureDecomposition, d: usize, m: usize) -> PureDecomposition {
    let mut kets = Vec::with_capacity(dilated.len());
    for ket in dilated.kets() {
        let amps: Vec<C64> = (0..d).map(|a| ket.amplitudes()[a * m]).collect();
        kets.push(Ket::normalized(amps).unwrap_or_else(|_| Ket::basis(d, 0)));
    }
    PureDecomposition::new(dilated.weights().to_vec(), kets)
}
