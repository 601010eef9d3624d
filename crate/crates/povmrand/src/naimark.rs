//! Canonical Naimark extensions: realize a POVM as a PVM on system (x)
//! ancilla with a pure reference ancilla state.
//!
//! Index convention everywhere: A (x) Q with the ancilla fastest-varying,
//! global index a * m + q for system index a and ancilla index q.

use crate::linalg::{
    complete_isometry_to_unitary, matrix_sqrt_psd, partial_trace, ComplexMatrix,
    DensityState, Ket, LinalgError, Subsystem,
};
use crate::povm::Povm;

/// Projection-valued measure: Hermitian idempotent, pairwise orthogonal
/// projectors summing to the identity.
#[derive(Clone, Debug)]
pub struct Pvm {
    dim: usize,
    projectors: Vec<ComplexMatrix>,
}

impl Pvm {
    pub fn new(dim: usize, projectors: Vec<ComplexMatrix>) -> Result<Self, LinalgError> {
        let pvm = Self { dim, projectors };
        let defect = pvm.invariant_residual();
        if defect > 1e-8 {
            return Err(LinalgError::NotIsometry(defect));
        }
        Ok(pvm)
    }

    pub(crate) fn from_parts_unchecked(dim: usize, projectors: Vec<ComplexMatrix>) -> Self {
        Self { dim, projectors }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn projector(&self, i: usize) -> &ComplexMatrix {
        &self.projectors[i]
    }

    /// Worst violation over idempotence, orthogonality, Hermiticity, and
    /// completeness.
    pub fn invariant_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for (i, p) in self.projectors.iter().enumerate() {
            worst = worst.max(p.hermiticity_residual());
            worst = worst.max((&(p * p) - p).max_norm());
            for q in self.projectors.iter().skip(i + 1) {
                worst = worst.max((p * q).max_norm());
            }
            sum = &sum + p;
        }
        worst.max((&sum - &ComplexMatrix::identity(self.dim)).max_norm())
    }
}

/// A POVM dilated to a PVM via `P_i = U^dag (1 (x) |i><i|) U` with the
/// ancilla prepared in the reference basis state `ancilla_index`.
#[derive(Clone, Debug)]
pub struct NaimarkExtension {
    pub system_dim: usize,
    pub ancilla_dim: usize,
    pub unitary: ComplexMatrix,
    pub pvm: Pvm,
    pub ancilla_index: usize,
}

/// Build the canonical extension of a POVM.
///
/// With A_i = M_i^{1/2}, the map |psi> -> sum_i (A_i |psi>) (x) |i> is an
/// isometry V (V^dag V = sum_i M_i = 1). Completing the columns of V placed
/// at ancilla index 0 to a unitary U gives projectors
/// P_i = U^dag (1 (x) |i><i|) U with tr_Q[P_i (1 (x) |0><0|)] = M_i.
pub fn canonical_extension(p: &Povm) -> Result<NaimarkExtension, LinalgError> {
    let d = p.dim();
    let m = p.len();
    let n = d * m;

    // dm x d isometry in the A (x) Q ordering: row a*m + i holds (A_i)[a, :].
    let mut v = ComplexMatrix::zeros(n, d);
    for (i, element) in p.elements().iter().enumerate() {
        let root = matrix_sqrt_psd(element)?;
        for a in 0..d {
            for b in 0..d {
                v[(a * m + i, b)] = root[(a, b)];
            }
        }
    }

    // Complete to a unitary, then reorder columns so column a*m+0 carries
    // V[:, a] and the filler columns occupy the remaining ancilla slots.
    let completed = complete_isometry_to_unitary(&v)?;
    let mut u = ComplexMatrix::zeros(n, n);
    let mut filler = d; // next filler column in `completed`
    for a in 0..d {
        for q in 0..m {
            let target = a * m + q;
            let source = if q == 0 {
                a
            } else {
                let s = filler;
                filler += 1;
                s
            };
            for r in 0..n {
                u[(r, target)] = completed[(r, source)];
            }
        }
    }

    // P_i = U^dag (1 (x) |i><i|) U = C_i^dag C_i where C_i is the row block
    // of U at ancilla index i.
    let mut projectors = Vec::with_capacity(m);
    for i in 0..m {
        let mut proj = ComplexMatrix::zeros(n, n);
        for a in 0..d {
            let row = a * m + i;
            for r in 0..n {
                let ur = u[(row, r)].conj();
                if ur.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    proj[(r, c)] += ur * u[(row, c)];
                }
            }
        }
        projectors.push(proj);
    }

    Ok(NaimarkExtension {
        system_dim: d,
        ancilla_dim: m,
        unitary: u,
        pvm: Pvm::from_parts_unchecked(n, projectors),
        ancilla_index: 0,
    })
}

/// Consistency condition: max_i || tr_Q[P_i (1 (x) |0><0|)] - M_i ||_max.
pub fn consistency_check(ext: &NaimarkExtension, p: &Povm) -> Result<f64, LinalgError> {
    let d = ext.system_dim;
    let m = ext.ancilla_dim;
    if p.dim() != d || p.len() != m || ext.pvm.len() != m {
        return Err(LinalgError::DimensionMismatch {
            expected: m,
            found: p.len(),
        });
    }
    let ancilla = Ket::basis(m, ext.ancilla_index).projector();
    let sigma = ComplexMatrix::identity(d).kron(&ancilla);
    let mut worst = 0.0f64;
    for (proj, element) in ext.pvm.projectors().iter().zip(p.elements()) {
        let reduced = partial_trace(&(proj * &sigma), (d, m), Subsystem::A)?;
        worst = worst.max((&reduced - element).max_norm());
    }
    Ok(worst)
}

/// Embed a system state as rho (x) |0><0| on the dilated space.
pub fn embed_state(rho: &DensityState, ext: &NaimarkExtension) -> Result<DensityState, LinalgError> {
    if rho.dim() != ext.system_dim {
        return Err(LinalgError::DimensionMismatch {
            expected: ext.system_dim,
            found: rho.dim(),
        });
    }
    let d = ext.system_dim;
    let m = ext.ancilla_dim;
    let mut out = ComplexMatrix::zeros(d * m, d * m);
    let q = ext.ancilla_index;
    for a in 0..d {
        for b in 0..d {
            out[(a * m + q, b * m + q)] = rho.matrix()[(a, b)];
        }
    }
    DensityState::new(out)
}

/// Born probabilities tr(M_i rho) of a POVM on a state.
pub fn born_probabilities(rho: &DensityState, p: &Povm) -> Result<Vec<f64>, LinalgError> {
    if rho.dim() != p.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: p.dim(),
            found: rho.dim(),
        });
    }
    Ok(p.elements()
        .iter()
        .map(|m| (m * rho.matrix()).trace().re.max(0.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{unitarity_residual, C64};
    use crate::povm::{sic_qubit, trivial_povm};

    fn z_pvm_povm() -> Povm {
        Povm::new(
            2,
            vec![Ket::basis(2, 0).projector(), Ket::basis(2, 1).projector()],
        )
        .unwrap()
    }

    #[test]
    fn trivial_single_element_extension() {
        let p = Povm::new(2, vec![ComplexMatrix::identity(2)]).unwrap();
        let ext = canonical_extension(&p).unwrap();
        assert_eq!(ext.ancilla_dim, 1);
        assert_eq!(ext.pvm.len(), 1);
        assert!(consistency_check(&ext, &p).unwrap() < 1e-12);
    }

    #[test]
    fn z_basis_extension_consistent() {
        let p = z_pvm_povm();
        let ext = canonical_extension(&p).unwrap();
        assert_eq!(ext.pvm.dim(), 4);
        assert!(unitarity_residual(&ext.unitary) < 1e-10);
        assert!(ext.pvm.invariant_residual() < 1e-10);
        assert!(consistency_check(&ext, &p).unwrap() < 1e-9);
    }

    #[test]
    fn sic_extension_consistent() {
        let p = sic_qubit();
        let ext = canonical_extension(&p).unwrap();
        assert_eq!(ext.pvm.dim(), 8);
        assert!(consistency_check(&ext, &p).unwrap() < 1e-8);
        // Every projector has rank d = 2 (trace counts rank for projectors).
        for proj in ext.pvm.projectors() {
            assert!((proj.trace().re - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn mismatched_extension_has_large_residual() {
        let ext = canonical_extension(&sic_qubit()).unwrap();
        let residual = consistency_check(&ext, &crate::povm::mub_qubit()).unwrap();
        assert!(residual > 0.1);
    }

    #[test]
    fn projector_form_matches_unitary() {
        let p = sic_qubit();
        let ext = canonical_extension(&p).unwrap();
        let n = ext.pvm.dim();
        for (i, proj) in ext.pvm.projectors().iter().enumerate() {
            let mut marker = ComplexMatrix::zeros(ext.ancilla_dim, ext.ancilla_dim);
            marker[(i, i)] = C64::new(1.0, 0.0);
            let block = ComplexMatrix::identity(ext.system_dim).kron(&marker);
            let direct = &(&ext.unitary.conjugate_transpose() * &block) * &ext.unitary;
            assert_eq!(direct.rows(), n);
            assert!((proj - &direct).max_norm() < 1e-10);
        }
    }

    #[test]
    fn embed_maximally_mixed() {
        let p = z_pvm_povm();
        let ext = canonical_extension(&p).unwrap();
        let rho = DensityState::maximally_mixed(2);
        let embedded = embed_state(&rho, &ext).unwrap();
        // diag(1/2, 0, 1/2, 0) in the A (x) Q ordering.
        let expected = ComplexMatrix::diagonal(&[0.5, 0.0, 0.5, 0.0]);
        assert!(embedded.matrix().approx_eq(&expected, 1e-12));
    }

    #[test]
    fn embed_pure_stays_pure() {
        let p = sic_qubit();
        let ext = canonical_extension(&p).unwrap();
        let rho = DensityState::from_ket(&Ket::basis(2, 0));
        let embedded = embed_state(&rho, &ext).unwrap();
        assert!((embedded.purity() - 1.0).abs() < 1e-10);
        assert!((embedded.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ancilla_phase_freedom_leaves_projectors_unchanged() {
        let p = trivial_povm(2, &[0.5, 0.5]).unwrap();
        let ext = canonical_extension(&p).unwrap();
        // D = diag phases on the ancilla; U' = (1 (x) D) U.
        let mut d_phase = ComplexMatrix::zeros(2, 2);
        d_phase[(0, 0)] = C64::from_polar(1.0, 0.7);
        d_phase[(1, 1)] = C64::from_polar(1.0, -1.3);
        let lifted = ComplexMatrix::identity(2).kron(&d_phase);
        let u2 = &lifted * &ext.unitary;
        for (i, proj) in ext.pvm.projectors().iter().enumerate() {
            let mut marker = ComplexMatrix::zeros(2, 2);
            marker[(i, i)] = C64::new(1.0, 0.0);
            let block = ComplexMatrix::identity(2).kron(&marker);
            let direct = &(&u2.conjugate_transpose() * &block) * &u2;
            assert!((proj - &direct).max_norm() < 1e-9);
        }
    }
}
