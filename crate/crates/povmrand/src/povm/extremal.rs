//! Extremality certification and decomposition of POVMs into extremal ones.
//!
//! A POVM is extremal when it is not a nontrivial convex mixture of other
//! POVMs. Linear independence of the nonzero elements is necessary in
//! general and sufficient for rank-1 POVMs, which is what the splitting
//! construction below exploits: refine to rank-1, then repeatedly peel off
//! maximal-weight vertices of the coefficient polytope until the remainder
//! is itself independent.

use super::{coarse_grain, refine_rank_one, Povm, PovmError, ZERO_ELEMENT_TRACE};
use crate::linalg::{hermitian_eig, C64, ComplexMatrix};

/// Max-norm residual below which a candidate linear dependence is accepted;
/// doubles as the relative singular-value scale it corresponds to.
const WITNESS_RESIDUAL: f64 = 1e-8;

/// Splitting recursion guard.
const MAX_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremalityStatus {
    Extremal,
    NotExtremal,
    Inconclusive,
}

/// Outcome of the linear-independence extremality test.
///
/// `NotExtremal` always carries a witness: real coefficients over the full
/// element list (zero padding included) with `sum_i a_i M_i = 0` within 1e-8
/// in max norm and not all entries zero.
#[derive(Clone, Debug)]
pub struct ExtremalityVerdict {
    pub status: ExtremalityStatus,
    pub witness: Option<Vec<f64>>,
}

/// Convex decomposition of a POVM into component POVMs.
///
/// Carries the decomposed parent so the reconstruction invariant
/// `sum_j r_j N^j = parent` can be checked without extra context.
#[derive(Clone, Debug)]
pub struct Decomposition {
    weights: Vec<f64>,
    components: Vec<Povm>,
    parent: Povm,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, components: Vec<Povm>, parent: Povm) -> Self {
        assert_eq!(weights.len(), components.len());
        Self {
            weights,
            components,
            parent,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[Povm] {
        &self.components
    }

    pub fn parent(&self) -> &Povm {
        &self.parent
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Reconstruct the mixture sum_j r_j N^j.
    pub fn mixture(&self) -> Result<Povm, PovmError> {
        super::mix(&self.weights, &self.components)
    }

    /// Max-norm residual of the reconstruction against the parent.
    pub fn reconstruction_residual(&self) -> Result<f64, PovmError> {
        let mixed = self.mixture()?;
        if mixed.len() != self.parent.len() || mixed.dim() != self.parent.dim() {
            return Err(PovmError::DimensionMismatch);
        }
        let mut worst = 0.0f64;
        for (a, b) in mixed.elements().iter().zip(self.parent.elements()) {
            worst = worst.max((a - b).max_norm());
        }
        Ok(worst)
    }
}

/// Vectorize a Hermitian d x d matrix into d^2 real coordinates: the d
/// diagonal entries, then re/im of each strictly upper entry.
fn vectorize_hermitian(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.rows();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        v.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            // sqrt(2) keeps the Euclidean norm equal to the Frobenius norm,
            // so singular values match operator-space geometry.
            v.push(std::f64::consts::SQRT_2 * m[(i, j)].re);
            v.push(std::f64::consts::SQRT_2 * m[(i, j)].im);
        }
    }
    v
}

/// Candidate null-space witness of a set of Hermitian matrices: the Gram
/// eigenvector of the smallest eigenvalue (the right-singular vector of the
/// vectorized stack for its smallest singular value).
fn gram_null_candidate(mats: &[&ComplexMatrix]) -> Vec<f64> {
    let k = mats.len();
    let vectors: Vec<Vec<f64>> = mats.iter().map(|m| vectorize_hermitian(m)).collect();
    let mut gram = ComplexMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let dot: f64 = vectors[a].iter().zip(&vectors[b]).map(|(x, y)| x * y).sum();
            gram[(a, b)] = C64::new(dot, 0.0);
            gram[(b, a)] = C64::new(dot, 0.0);
        }
    }
    let (_, eigenvectors) = hermitian_eig(&gram).expect("real symmetric Gram matrix");
    eigenvectors
        .last()
        .expect("nonempty element list")
        .amplitudes()
        .iter()
        .map(|z| z.re)
        .collect()
}

/// Canonicalize witness sign: the largest-magnitude coefficient (lowest index
/// on ties) is made positive.
fn canonicalize_sign(witness: &mut [f64]) {
    let mut best = 0usize;
    for (i, &x) in witness.iter().enumerate() {
        if x.abs() > witness[best].abs() + 1e-15 {
            best = i;
        }
    }
    if witness[best] < 0.0 {
        for x in witness.iter_mut() {
            *x = -*x;
        }
    }
}

fn witness_residual(mats: &[&ComplexMatrix], witness: &[f64]) -> f64 {
    let d = mats[0].rows();
    let mut acc = ComplexMatrix::zeros(d, d);
    for (a, m) in witness.iter().zip(mats) {
        acc = &acc + &m.scale(*a);
    }
    acc.max_norm()
}

/// If the matrices are linearly dependent, return a verified unit witness.
///
/// The Gram spectrum alone cannot decide the call: squaring costs half the
/// digits, so an exactly dependent set can show a smallest singular value
/// right at the noise floor near 1e-8 of the largest. The candidate
/// eigenvector itself is accurate, so the residual ||sum a_i M_i||_max is
/// what decides, and it is exactly the bound the witness must satisfy
/// anyway.
fn dependence_witness(mats: &[&ComplexMatrix]) -> Option<Vec<f64>> {
    if mats.len() < 2 {
        return None;
    }
    let mut witness = gram_null_candidate(mats);
    canonicalize_sign(&mut witness);
    (witness_residual(mats, &witness) < WITNESS_RESIDUAL).then_some(witness)
}

/// Linear-independence extremality test.
///
/// Nonzero elements are vectorized over the reals (d diagonal entries plus
/// re/im of the upper triangle); a dependence is declared only when the
/// null candidate's witness reproduces zero within 1e-8 in max norm.
/// Independent rank-1 POVMs are certified `Extremal`; independent
/// higher-rank POVMs are `Inconclusive` because independence is merely
/// necessary there.
pub fn extremality_check(p: &Povm) -> Result<ExtremalityVerdict, PovmError> {
    let active = p.nonzero_indexes();
    let mats: Vec<&ComplexMatrix> = active.iter().map(|&i| p.element(i)).collect();
    if let Some(w) = dependence_witness(&mats) {
        let mut full = vec![0.0; p.len()];
        for (slot, value) in active.iter().zip(&w) {
            full[*slot] = *value;
        }
        return Ok(ExtremalityVerdict {
            status: ExtremalityStatus::NotExtremal,
            witness: Some(full),
        });
    }
    let status = if p.is_rank_one()? {
        ExtremalityStatus::Extremal
    } else {
        ExtremalityStatus::Inconclusive
    };
    Ok(ExtremalityVerdict {
        status,
        witness: None,
    })
}

/// Least-squares correction pushing a coefficient vector back onto the
/// completeness constraint sum_i c_i D_i = 1 over its active support.
///
/// Needed because the peel step divides by (1 - lambda), which amplifies
/// whatever completeness drift the remainder carries; re-snapping after
/// every peel holds the drift at the floating-point floor, and the
/// correction perturbs the overall mixture only by (remaining weight) x
/// (drift), which is negligible.
fn snap_completeness(coefficients: &mut [f64], directions: &[ComplexMatrix], dim: usize) {
    let active: Vec<usize> = (0..coefficients.len())
        .filter(|&i| coefficients[i] > ZERO_ELEMENT_TRACE)
        .collect();
    let k = active.len();
    if k == 0 {
        return;
    }
    let mut residual = ComplexMatrix::zeros(dim, dim);
    for &i in &active {
        residual = &residual + &directions[i].scale(coefficients[i]);
    }
    residual = &residual - &ComplexMatrix::identity(dim);

    // Normal equations over the support: G delta = -b with
    // G_ab = tr(D_a D_b), b_a = tr(D_a R); minimal-norm solution through the
    // eigen-pseudoinverse (support may still be dependent mid-peel).
    let mut gram = ComplexMatrix::zeros(k, k);
    let mut rhs = vec![0.0f64; k];
    for (pa, &a) in active.iter().enumerate() {
        rhs[pa] = -(&directions[a] * &residual).trace().re;
        for (pb, &b) in active.iter().enumerate().skip(pa) {
            let dot = (&directions[a] * &directions[b]).trace().re;
            gram[(pa, pb)] = C64::new(dot, 0.0);
            gram[(pb, pa)] = C64::new(dot, 0.0);
        }
    }
    let (eigenvalues, eigenvectors) = match hermitian_eig(&gram) {
        Ok(pair) => pair,
        Err(_) => return,
    };
    let cutoff = eigenvalues.first().copied().unwrap_or(0.0).max(0.0) * 1e-12;
    let mut delta = vec![0.0f64; k];
    for (l, v) in eigenvalues.iter().zip(&eigenvectors) {
        if *l <= cutoff {
            continue;
        }
        let amps = v.amplitudes();
        let proj: f64 = amps.iter().zip(&rhs).map(|(z, r)| z.re * r).sum();
        for (slot, amp) in delta.iter_mut().zip(amps) {
            *slot += amp.re * proj / l;
        }
    }
    for (pos, &i) in active.iter().enumerate() {
        coefficients[i] = (coefficients[i] + delta[pos]).max(0.0);
    }
}

/// One splitting step of the coefficient walk: rescale by (1 - a_i / a_max),
/// which zeroes every coordinate attaining the maximal witness coefficient
/// and keeps the rest nonnegative.
fn kill_max(coefficients: &mut [f64], active: &[usize], witness: &[f64]) -> Result<(), PovmError> {
    let a_max = witness.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if a_max <= 0.0 {
        return Err(PovmError::MaxDepthExceeded);
    }
    for (pos, &idx) in active.iter().enumerate() {
        let factor = 1.0 - witness[pos] / a_max;
        coefficients[idx] *= factor.max(0.0);
    }
    Ok(())
}

/// Decompose a POVM into a convex mixture of extremal POVMs.
///
/// The input is refined to rank-1 projector pieces; in the resulting
/// coefficient polytope {x >= 0 : sum_i x_i D_i = 1} the algorithm walks to a
/// vertex by repeatedly applying the splitting rescale above, peels the
/// vertex off with the largest feasible weight, and repeats on the
/// remainder. Vertices have linearly independent support, so every leaf is
/// extremal; grouping back through the refinement map yields components on
/// the original outcome set. The result is one valid decomposition, not a
/// canonical one.
pub fn extremal_decompose(p: &Povm) -> Result<Decomposition, PovmError> {
    let (refined, mapping) = refine_rank_one(p)?;
    let n = refined.len();

    // Split each refined element into trace (coefficient) and unit-trace
    // direction; the walk only ever touches the coefficients.
    let mut coefficients: Vec<f64> = Vec::with_capacity(n);
    let mut directions: Vec<ComplexMatrix> = Vec::with_capacity(n);
    for m in refined.elements() {
        let t = m.trace().re;
        coefficients.push(t);
        directions.push(m.scale(1.0 / t));
    }

    let mut weights = Vec::new();
    let mut leaves: Vec<Vec<f64>> = Vec::new();
    let mut remaining = 1.0f64;

    for _round in 0..MAX_DEPTH {
        let active: Vec<usize> = (0..n)
            .filter(|&i| coefficients[i] > ZERO_ELEMENT_TRACE)
            .collect();
        let scaled: Vec<ComplexMatrix> = active
            .iter()
            .map(|&i| directions[i].scale(coefficients[i]))
            .collect();
        let refs: Vec<&ComplexMatrix> = scaled.iter().collect();
        if dependence_witness(&refs).is_none() {
            // Independent support: the remainder is itself an extremal leaf.
            weights.push(remaining);
            leaves.push(coefficients.clone());
            remaining = 0.0;
            break;
        }

        // Walk the coefficient vector to a vertex of the polytope.
        let mut vertex = coefficients.clone();
        let mut walked = false;
        for _step in 0..=n {
            let v_active: Vec<usize> = (0..n)
                .filter(|&i| vertex[i] > ZERO_ELEMENT_TRACE)
                .collect();
            let v_scaled: Vec<ComplexMatrix> = v_active
                .iter()
                .map(|&i| directions[i].scale(vertex[i]))
                .collect();
            let v_refs: Vec<&ComplexMatrix> = v_scaled.iter().collect();
            match dependence_witness(&v_refs) {
                Some(w) => kill_max(&mut vertex, &v_active, &w)?,
                None => {
                    walked = true;
                    break;
                }
            }
        }
        if !walked {
            return Err(PovmError::MaxDepthExceeded);
        }
        snap_completeness(&mut vertex, &directions, p.dim());

        // Largest weight keeping the remainder elementwise nonnegative.
        let mut lambda = f64::INFINITY;
        let mut dies = usize::MAX;
        for i in 0..n {
            if vertex[i] > ZERO_ELEMENT_TRACE {
                let ratio = coefficients[i] / vertex[i];
                if ratio < lambda {
                    lambda = ratio;
                    dies = i;
                }
            }
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(PovmError::MaxDepthExceeded);
        }
        if lambda >= 1.0 - 1e-9 {
            // The remainder would carry no weight: the vertex is the input.
            weights.push(remaining);
            leaves.push(vertex);
            remaining = 0.0;
            break;
        }
        weights.push(remaining * lambda);
        leaves.push(vertex.clone());
        for i in 0..n {
            coefficients[i] = (coefficients[i] - lambda * vertex[i]) / (1.0 - lambda);
        }
        coefficients[dies] = 0.0;
        snap_completeness(&mut coefficients, &directions, p.dim());
        remaining *= 1.0 - lambda;
    }
    if remaining > 0.0 {
        return Err(PovmError::MaxDepthExceeded);
    }

    // Group each leaf back into the original outcome positions.
    let mut components = Vec::with_capacity(leaves.len());
    for leaf in &leaves {
        let elements: Vec<ComplexMatrix> = (0..n)
            .map(|i| directions[i].scale(leaf[i]))
            .collect();
        let leaf_povm = Povm::from_parts_unchecked(p.dim(), elements);
        components.push(coarse_grain(&leaf_povm, &mapping, p.len())?);
    }

    // Drop negligible weights and renormalize the rest.
    let mut kept_weights = Vec::new();
    let mut kept_components = Vec::new();
    for (w, c) in weights.into_iter().zip(components) {
        if w > 1e-12 {
            kept_weights.push(w);
            kept_components.push(c);
        }
    }
    let total: f64 = kept_weights.iter().sum();
    for w in &mut kept_weights {
        *w /= total;
    }

    Ok(Decomposition::new(kept_weights, kept_components, p.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Ket;
    use crate::povm::{mub_qubit, sic_qubit, trivial_povm, vn_x_qubit};

    fn z_pvm() -> Povm {
        Povm::new(
            2,
            vec![Ket::basis(2, 0).projector(), Ket::basis(2, 1).projector()],
        )
        .unwrap()
    }

    #[test]
    fn z_basis_pvm_is_extremal() {
        let v = extremality_check(&z_pvm()).unwrap();
        assert_eq!(v.status, ExtremalityStatus::Extremal);
    }

    #[test]
    fn sic_is_extremal() {
        let v = extremality_check(&sic_qubit()).unwrap();
        assert_eq!(v.status, ExtremalityStatus::Extremal);
    }

    #[test]
    fn vn_x_is_extremal() {
        let v = extremality_check(&vn_x_qubit()).unwrap();
        assert_eq!(v.status, ExtremalityStatus::Extremal);
    }

    #[test]
    fn flat_pair_has_witness() {
        let p = trivial_povm(2, &[0.5, 0.5]).unwrap();
        let v = extremality_check(&p).unwrap();
        assert_eq!(v.status, ExtremalityStatus::NotExtremal);
        let w = v.witness.unwrap();
        // Identical elements: witness proportional to (1, -1).
        assert!((w[0] + w[1]).abs() < 1e-10);
        assert!(w[0].abs() > 0.1);
    }

    #[test]
    fn mub_is_not_extremal() {
        let p = mub_qubit();
        let v = extremality_check(&p).unwrap();
        assert_eq!(v.status, ExtremalityStatus::NotExtremal);
        // The witness must really annihilate the mixture.
        let w = v.witness.unwrap();
        let mut acc = ComplexMatrix::zeros(2, 2);
        for (a, m) in w.iter().zip(p.elements()) {
            acc = &acc + &m.scale(*a);
        }
        assert!(acc.max_norm() < 1e-8);
    }

    #[test]
    fn disjoint_slot_mixture_is_not_extremal() {
        // Classical mixture of two measurements with disjoint outcome labels:
        // always dependent through the two completeness relations.
        let zero = ComplexMatrix::zeros(2, 2);
        let z_padded = Povm::new(
            2,
            vec![
                Ket::basis(2, 0).projector(),
                Ket::basis(2, 1).projector(),
                zero.clone(),
                zero.clone(),
            ],
        )
        .unwrap();
        let x = vn_x_qubit();
        let x_padded = Povm::new(
            2,
            vec![zero.clone(), zero, x.element(0).clone(), x.element(1).clone()],
        )
        .unwrap();
        let mixed = super::super::mix(&[0.3, 0.7], &[z_padded, x_padded]).unwrap();
        let v = extremality_check(&mixed).unwrap();
        assert_eq!(v.status, ExtremalityStatus::NotExtremal);
    }

    #[test]
    fn same_slot_two_outcome_mixture_is_inconclusive() {
        // {M, 1-M} with M full rank is linearly independent, so the
        // independence test cannot certify non-extremality here.
        let mixed = super::super::mix(&[0.3, 0.7], &[z_pvm(), vn_x_qubit()]).unwrap();
        let v = extremality_check(&mixed).unwrap();
        assert_eq!(v.status, ExtremalityStatus::Inconclusive);
    }

    #[test]
    fn decompose_extremal_input_is_single_component() {
        let dec = extremal_decompose(&sic_qubit()).unwrap();
        assert_eq!(dec.len(), 1);
        assert!((dec.weights()[0] - 1.0).abs() < 1e-12);
        assert!(dec.reconstruction_residual().unwrap() < 1e-8);
    }

    #[test]
    fn decompose_flat_pair() {
        let p = trivial_povm(2, &[0.5, 0.5]).unwrap();
        let dec = extremal_decompose(&p).unwrap();
        assert!(dec.reconstruction_residual().unwrap() < 1e-8);
        let total: f64 = dec.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        for c in dec.components() {
            assert!(c.validate().is_ok());
            let (refined, _) = refine_rank_one(c).unwrap();
            let verdict = extremality_check(&refined).unwrap();
            assert_eq!(verdict.status, ExtremalityStatus::Extremal);
        }
    }

    #[test]
    fn decompose_mub_recovers_two_pvms() {
        let dec = extremal_decompose(&mub_qubit()).unwrap();
        assert!(dec.reconstruction_residual().unwrap() < 1e-8);
        assert_eq!(dec.len(), 2);
        for (w, c) in dec.weights().iter().zip(dec.components()) {
            assert!((w - 0.5).abs() < 1e-9);
            assert!(c.validate().is_ok());
            // Each component is a projector pair split across the 4 slots.
            let nonzero = c.nonzero_indexes();
            assert_eq!(nonzero.len(), 2);
        }
    }
}


