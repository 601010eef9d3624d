//! POVM representation, validation, refinement and grouping, extremality
//! machinery, and the named qubit measurement families.

mod extremal;
mod families;

pub use extremal::{extremal_decompose, extremality_check, Decomposition, ExtremalityStatus, ExtremalityVerdict};
pub use families::{depolarize, mub_qubit, sic_qubit, trivial_povm, vn_x_qubit};

use crate::linalg::{hermitian_eig, ComplexMatrix, LinalgError, DEFAULT_TOL};
use thiserror::Error;

/// Elements whose trace falls below this are treated as zero padding.
pub const ZERO_ELEMENT_TRACE: f64 = 1e-10;

/// Eigenvalues above this count toward an element's rank.
pub(crate) const RANK_EIGENVALUE: f64 = 1e-9;

#[derive(Debug, Clone, Error)]
pub enum PovmError {
    #[error("element {index} is not Hermitian (defect {residual:.3e})")]
    NotHermitian { index: usize, residual: f64 },
    #[error("element {index} is not PSD (eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { index: usize, min_eigenvalue: f64 },
    #[error("elements do not sum to the identity (residual {residual:.3e})")]
    IncompleteSum { residual: f64 },
    #[error("dimension mismatch between POVMs or elements")]
    DimensionMismatch,
    #[error("weights do not form a probability vector (sum {0})")]
    InvalidWeights(f64),
    #[error("extremal decomposition exceeded depth 64; numerical stagnation")]
    MaxDepthExceeded,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Ordered list of PSD elements summing to the identity. Zero elements are
/// permitted as positional padding.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    /// Build and validate.
    pub fn new(dim: usize, elements: Vec<ComplexMatrix>) -> Result<Self, PovmError> {
        let p = Self { dim, elements };
        p.validate()?;
        Ok(p)
    }

    /// Build without validating; for internal construction paths whose output
    /// is valid by algebra. Tests still call `validate` on the results.
    pub(crate) fn from_parts_unchecked(dim: usize, elements: Vec<ComplexMatrix>) -> Self {
        Self { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes, including zero padding.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    /// Check all type invariants, reporting the first violation with the
    /// offending index and residual.
    pub fn validate(&self) -> Result<(), PovmError> {
        if self.elements.is_empty() {
            return Err(PovmError::IncompleteSum { residual: 1.0 });
        }
        for (i, m) in self.elements.iter().enumerate() {
            if m.rows() != self.dim || m.cols() != self.dim {
                return Err(PovmError::DimensionMismatch);
            }
            if !m.is_hermitian(DEFAULT_TOL) {
                return Err(PovmError::NotHermitian {
                    index: i,
                    residual: m.hermiticity_residual(),
                });
            }
            let (eigenvalues, _) = hermitian_eig(m)?;
            if let Some(&min) = eigenvalues.last() {
                if min < -DEFAULT_TOL {
                    return Err(PovmError::NotPsd {
                        index: i,
                        min_eigenvalue: min,
                    });
                }
            }
        }
        let residual = self.completeness_residual();
        if residual > DEFAULT_TOL {
            return Err(PovmError::IncompleteSum { residual });
        }
        Ok(())
    }

    /// Max-norm distance of sum_i M_i from the identity.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for m in &self.elements {
            sum = &sum + m;
        }
        (&sum - &ComplexMatrix::identity(self.dim)).max_norm()
    }

    /// True iff every nonzero element has exactly one eigenvalue above 1e-9.
    pub fn is_rank_one(&self) -> Result<bool, PovmError> {
        for m in &self.elements {
            if m.trace().re < ZERO_ELEMENT_TRACE {
                continue;
            }
            let (eigenvalues, _) = hermitian_eig(m)?;
            let rank = eigenvalues.iter().filter(|&&x| x > RANK_EIGENVALUE).count();
            if rank != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Indexes of elements that are not zero padding.
    pub(crate) fn nonzero_indexes(&self) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, m)| m.trace().re >= ZERO_ELEMENT_TRACE)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Element-wise convex combination of POVMs, zero-padding shorter ones.
pub fn mix(weights: &[f64], povms: &[Povm]) -> Result<Povm, PovmError> {
    if weights.len() != povms.len() || povms.is_empty() {
        return Err(PovmError::DimensionMismatch);
    }
    check_probability_vector(weights)?;
    let dim = povms[0].dim();
    if povms.iter().any(|p| p.dim() != dim) {
        return Err(PovmError::DimensionMismatch);
    }
    let len = povms.iter().map(Povm::len).max().unwrap();
    let mut elements = vec![ComplexMatrix::zeros(dim, dim); len];
    for (w, p) in weights.iter().zip(povms) {
        for (i, m) in p.elements().iter().enumerate() {
            elements[i] = &elements[i] + &m.scale(*w);
        }
    }
    Ok(Povm::from_parts_unchecked(dim, elements))
}

/// Merge elements by a total index map: group i collects every element j
/// with `mapping[j] == i`.
pub fn coarse_grain(p: &Povm, mapping: &[usize], groups: usize) -> Result<Povm, PovmError> {
    if mapping.len() != p.len() || mapping.iter().any(|&g| g >= groups) {
        return Err(PovmError::DimensionMismatch);
    }
    let mut elements = vec![ComplexMatrix::zeros(p.dim(), p.dim()); groups];
    for (j, &g) in mapping.iter().enumerate() {
        elements[g] = &elements[g] + p.element(j);
    }
    Ok(Povm::from_parts_unchecked(p.dim(), elements))
}

/// Split every element into its nonzero scaled eigenprojectors.
///
/// Returns the rank-1 refinement together with the group map back into the
/// original outcome indexes, so `coarse_grain(refined, mapping, p.len())`
/// reproduces the input within the eigensolver's reconstruction error.
pub fn refine_rank_one(p: &Povm) -> Result<(Povm, Vec<usize>), PovmError> {
    let mut elements = Vec::new();
    let mut mapping = Vec::new();
    for (i, m) in p.elements().iter().enumerate() {
        if m.trace().re < ZERO_ELEMENT_TRACE {
            continue;
        }
        let (eigenvalues, vectors) = hermitian_eig(m)?;
        for (lambda, v) in eigenvalues.iter().zip(&vectors) {
            if *lambda > RANK_EIGENVALUE {
                elements.push(v.projector().scale(*lambda));
                mapping.push(i);
            }
        }
    }
    Ok((Povm::from_parts_unchecked(p.dim(), elements), mapping))
}

pub(crate) fn check_probability_vector(weights: &[f64]) -> Result<(), PovmError> {
    let mut sum = 0.0;
    for &w in weights {
        if w < -1e-12 {
            return Err(PovmError::InvalidWeights(w));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > DEFAULT_TOL {
        return Err(PovmError::InvalidWeights(sum));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Ket;

    #[test]
    fn single_identity_element_is_valid() {
        let p = Povm::new(2, vec![ComplexMatrix::identity(2)]).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn half_identity_pair_is_valid() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(Povm::new(2, vec![half.clone(), half]).is_ok());
    }

    #[test]
    fn incomplete_sum_rejected() {
        let e = Ket::basis(2, 0).projector();
        let err = Povm::new(2, vec![e.clone(), e]).unwrap_err();
        assert!(matches!(err, PovmError::IncompleteSum { .. }));
    }

    #[test]
    fn non_psd_rejected_with_index() {
        let good = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let bad = ComplexMatrix::diagonal(&[0.5, 1.5]);
        let fix = ComplexMatrix::diagonal(&[-0.5, -0.5]);
        let err = Povm::new(2, vec![good, bad, fix]).unwrap_err();
        match err {
            PovmError::NotPsd { index, .. } => assert_eq!(index, 2),
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }

    #[test]
    fn rank_one_detection() {
        let z0 = Ket::basis(2, 0).projector();
        let z1 = Ket::basis(2, 1).projector();
        let pvm = Povm::new(2, vec![z0, z1]).unwrap();
        assert!(pvm.is_rank_one().unwrap());

        let half = ComplexMatrix::identity(2).scale(0.5);
        let flat = Povm::new(2, vec![half.clone(), half]).unwrap();
        assert!(!flat.is_rank_one().unwrap());
    }

    #[test]
    fn mix_single_term_is_identity_map() {
        let p = sic_qubit();
        let mixed = mix(&[1.0], std::slice::from_ref(&p)).unwrap();
        for (a, b) in mixed.elements().iter().zip(p.elements()) {
            assert!(a.approx_eq(b, 1e-15));
        }
    }

    #[test]
    fn mix_z_and_x_bases() {
        let z = Povm::new(2, vec![Ket::basis(2, 0).projector(), Ket::basis(2, 1).projector()])
            .unwrap();
        let x = vn_x_qubit();
        let mixed = mix(&[0.5, 0.5], &[z, x]).unwrap();
        assert!(mixed.validate().is_ok());
        let expected0 = &Ket::basis(2, 0).projector().scale(0.5)
            + &vn_x_qubit().element(0).scale(0.5);
        assert!(mixed.element(0).approx_eq(&expected0, 1e-12));
    }

    #[test]
    fn coarse_grain_identity_map() {
        let p = sic_qubit();
        let same = coarse_grain(&p, &[0, 1, 2, 3], 4).unwrap();
        for (a, b) in same.elements().iter().zip(p.elements()) {
            assert!(a.approx_eq(b, 1e-15));
        }
    }

    #[test]
    fn coarse_grain_all_to_one_gives_identity() {
        let p = sic_qubit();
        let merged = coarse_grain(&p, &[0, 0, 0, 0], 1).unwrap();
        assert!(merged.element(0).approx_eq(&ComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn coarse_grain_sic_pairs() {
        let p = sic_qubit();
        let merged = coarse_grain(&p, &[0, 0, 1, 1], 2).unwrap();
        let expected0 = &p.element(0).clone() + p.element(1);
        assert!(merged.element(0).approx_eq(&expected0, 1e-15));
        assert!(merged.validate().is_ok());
    }

    #[test]
    fn refine_rank_one_fixed_point() {
        let p = sic_qubit();
        let (refined, mapping) = refine_rank_one(&p).unwrap();
        assert_eq!(refined.len(), 4);
        assert_eq!(mapping, vec![0, 1, 2, 3]);
        for (a, b) in refined.elements().iter().zip(p.elements()) {
            assert!(a.approx_eq(b, 1e-10));
        }
    }

    #[test]
    fn refine_flat_povm() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        let flat = Povm::new(2, vec![half.clone(), half]).unwrap();
        let (refined, mapping) = refine_rank_one(&flat).unwrap();
        assert_eq!(refined.len(), 4);
        assert_eq!(mapping, vec![0, 0, 1, 1]);
        let back = coarse_grain(&refined, &mapping, 2).unwrap();
        for (a, b) in back.elements().iter().zip(flat.elements()) {
            assert!(a.approx_eq(b, 1e-10));
        }
    }

    #[test]
    fn refine_identity_povm() {
        let p = Povm::new(2, vec![ComplexMatrix::identity(2)]).unwrap();
        let (refined, mapping) = refine_rank_one(&p).unwrap();
        assert_eq!(refined.len(), 2);
        assert_eq!(mapping, vec![0, 0]);
        assert!(refined.element(0).approx_eq(&Ket::basis(2, 0).projector(), 1e-12));
    }

    #[test]
    fn refine_round_trip_preserves_zero_padding() {
        let z0 = Ket::basis(2, 0).projector();
        let z1 = Ket::basis(2, 1).projector();
        let zero = ComplexMatrix::zeros(2, 2);
        let p = Povm::new(2, vec![z0, zero, z1]).unwrap();
        let (refined, mapping) = refine_rank_one(&p).unwrap();
        assert_eq!(mapping, vec![0, 2]);
        let back = coarse_grain(&refined, &mapping, 3).unwrap();
        for (a, b) in back.elements().iter().zip(p.elements()) {
            assert!(a.approx_eq(b, 1e-10));
        }
    }
}
