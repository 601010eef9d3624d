//! Independent brute-force baselines and seeded instance generators.
//!
//! Everything here is deliberately simple and slow: grids instead of
//! optimizers, direct Born-rule entropy instead of dilations. These are the
//! yardsticks the optimizers are validated against, so they share no code
//! with the search paths.

use crate::linalg::{hermitian_eig, C64, ComplexMatrix, DensityState, Ket};
use crate::povm::{Decomposition, Povm};
use crate::{entropy_of_weights, exec};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum OracleError {
    #[error("unsupported dimension {0}; grids cover d in {{2, 3}}")]
    UnsupportedDimension(usize),
    #[error("brute-force randomness assumes a rank-1 POVM; refine first")]
    UnsupportedPovm,
    #[error("resolution {0} below minimum of 2")]
    ResolutionTooSmall(usize),
}

/// Counter-based deterministic generator (splitmix64 finalizer).
///
/// Identical seeds reproduce identical streams, and any position in the
/// stream can be reached directly, so work can be partitioned across
/// threads without changing results.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    counter: u64,
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    /// Independent stream addressed by a tag; used to give each restart or
    /// grid chunk its own reproducible randomness.
    pub fn derive(&self, tag: u64) -> Rng {
        Rng {
            seed: mix64(self.seed ^ mix64(tag.wrapping_add(0x9E37_79B9_7F4A_7C15))),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(
            self.seed
                .wrapping_add(self.counter.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        )
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }
}

/// Deterministic grid of pure states on C^2 (Bloch angles) or C^3 (four
/// product angles).
#[derive(Clone, Debug)]
pub struct PureStateGrid {
    dim: usize,
    resolution: usize,
}

impl PureStateGrid {
    pub fn new(dim: usize, resolution: usize) -> Result<Self, OracleError> {
        if dim != 2 && dim != 3 {
            return Err(OracleError::UnsupportedDimension(dim));
        }
        if resolution < 2 {
            return Err(OracleError::ResolutionTooSmall(resolution));
        }
        Ok(Self { dim, resolution })
    }

    pub fn len(&self) -> usize {
        let r = self.resolution;
        match self.dim {
            2 => r * 2 * r,
            _ => r * r * (2 * r) * (2 * r),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The grid point at a flat index; total order is fixed, so parallel
    /// partitioning cannot change which ket any index denotes.
    pub fn ket(&self, index: usize) -> Ket {
        let r = self.resolution;
        match self.dim {
            2 => {
                let phi_steps = 2 * r;
                let i = index / phi_steps;
                let j = index % phi_steps;
                let theta = PI * i as f64 / (r - 1) as f64;
                let phi = 2.0 * PI * j as f64 / phi_steps as f64;
                let c = (theta / 2.0).cos();
                let s = (theta / 2.0).sin();
                Ket::normalized(vec![C64::new(c, 0.0), C64::from_polar(s, phi)])
                    .unwrap_or_else(|_| Ket::basis(2, 0))
            }
            _ => {
                let phi_steps = 2 * r;
                let mut rest = index;
                let l = rest % phi_steps;
                rest /= phi_steps;
                let k = rest % phi_steps;
                rest /= phi_steps;
                let j = rest % r;
                let i = rest / r;
                let alpha = (PI / 2.0) * i as f64 / (r - 1) as f64;
                let beta = (PI / 2.0) * j as f64 / (r - 1) as f64;
                let phi1 = 2.0 * PI * k as f64 / phi_steps as f64;
                let phi2 = 2.0 * PI * l as f64 / phi_steps as f64;
                let a0 = alpha.cos();
                let a1 = alpha.sin() * beta.cos();
                let a2 = alpha.sin() * beta.sin();
                Ket::normalized(vec![
                    C64::new(a0, 0.0),
                    C64::from_polar(a1, phi1),
                    C64::from_polar(a2, phi2),
                ])
                .unwrap_or_else(|_| Ket::basis(3, 0))
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Ket> + '_ {
        (0..self.len()).map(move |i| self.ket(i))
    }
}

/// Stream of grid pure states for d in {2, 3}.
pub fn grid_pure_states(dim: usize, resolution: usize) -> Result<PureStateGrid, OracleError> {
    PureStateGrid::new(dim, resolution)
}

/// Brute-force minimum over the grid of the Born-entropy randomness
/// H({<psi|M_i|psi>}).
///
/// Valid as a randomness oracle only for rank-1 POVMs, where the canonical
/// extension makes the outcome entropy of a pure state exactly the Shannon
/// entropy of its Born distribution.
pub fn brute_force_min_pure(p: &Povm, resolution: usize) -> Result<(f64, Ket), OracleError> {
    if !p.is_rank_one().map_err(|_| OracleError::UnsupportedPovm)? {
        return Err(OracleError::UnsupportedPovm);
    }
    let grid = PureStateGrid::new(p.dim(), resolution)?;
    let elements = p.elements().to_vec();
    let best = exec::scan_min(grid.len(), |i| {
        let ket = grid.ket(i);
        let probs: Vec<f64> = elements.iter().map(|m| ket.expectation(m).max(0.0)).collect();
        (entropy_of_weights(&probs), ket)
    })
    .expect("grid is nonempty");
    Ok((best.1, best.2))
}

/// Haar-like random unit ket (normalized complex Gaussian vector).
pub fn random_ket(dim: usize, rng: &mut Rng) -> Ket {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| rng.complex_normal()).collect();
        if let Ok(k) = Ket::normalized(amps) {
            return k;
        }
    }
}

/// Random m-outcome POVM on C^d: Wishart pieces G_i = X_i X_i^dag whitened
/// by S^{-1/2} with S = sum G_i.
pub fn random_povm(dim: usize, outcomes: usize, rng: &mut Rng) -> Povm {
    assert!(outcomesize_ok(outcomes), "need at least one outcome");
    let gs: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let mut x = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    x[(i, j)] = rng.complex_normal();
                }
            }
            &x * &x.conjugate_transpose()
        })
        .collect();
    let mut s = ComplexMatrix::zeros(dim, dim);
    for g in &gs {
        s = &s + g;
    }
    let (eigenvalues, vectors) = hermitian_eig(&s).expect("Wishart sum is Hermitian");
    let mut s_inv_root = ComplexMatrix::zeros(dim, dim);
    for (l, v) in eigenvalues.iter().zip(&vectors) {
        // Sum of full-rank Wishart matrices is positive definite.
        s_inv_root = &s_inv_root + &v.projector().scale(1.0 / l.max(1e-300).sqrt());
    }
    let elements: Vec<ComplexMatrix> = gs
        .iter()
        .map(|g| {
            let m = &(&s_inv_root * g) * &s_inv_root;
            hermitize(&m)
        })
        .collect();
    Povm::from_parts_unchecked(dim, elements)
}

fn outcomesize_ok(m: usize) -> bool {
    m >= 1
}

fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    let adj = m.conjugate_transpose();
    (m + &adj).scale(0.5)
}

/// Random density matrix of the requested rank: rho = Y Y^dag / tr with Y a
/// d x rank complex Gaussian.
pub fn random_density(dim: usize, rank: usize, rng: &mut Rng) -> DensityState {
    assert!(rank >= 1 && rank <= dim, "rank must lie in 1..=dim");
    let mut y = ComplexMatrix::zeros(dim, rank);
    for i in 0..dim {
        for j in 0..rank {
            y[(i, j)] = rng.complex_normal();
        }
    }
    let m = &y * &y.conjugate_transpose();
    let tr = m.trace().re;
    DensityState::new(hermitize(&m.scale(1.0 / tr))).expect("Wishart state is valid")
}

/// Acceptance gate for decompositions: max of the reconstruction residual
/// against the target and every component invariant violation.
pub fn verify_decomposition(dec: &Decomposition, target: &Povm) -> f64 {
    let mut worst: f64 = 0.0;

    // sum_j r_j N^j versus the target, element-wise.
    let dim = target.dim();
    let mut sums = vec![ComplexMatrix::zeros(dim, dim); target.len()];
    for (w, comp) in dec.weights().iter().zip(dec.components()) {
        if comp.dim() != dim || comp.len() != target.len() {
            return f64::INFINITY;
        }
        for (acc, m) in sums.iter_mut().zip(comp.elements()) {
            *acc = &*acc + &m.scale(*w);
        }
    }
    for (acc, m) in sums.iter().zip(target.elements()) {
        worst = worst.max((acc - m).max_norm());
    }

    // Weight vector.
    let total: f64 = dec.weights().iter().sum();
    worst = worst.max((total - 1.0).abs());
    for &w in dec.weights() {
        if w < 0.0 {
            worst = worst.max(-w);
        }
    }

    // Component invariants.
    for comp in dec.components() {
        worst = worst.max(comp.completeness_residual());
        for m in comp.elements() {
            worst = worst.max(m.hermiticity_residual());
            if let Ok((eigenvalues, _)) = hermitian_eig(&hermitize(m)) {
                if let Some(&min) = eigenvalues.last() {
                    if min < 0.0 {
                        worst = worst.max(-min);
                    }
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{extremal_decompose, sic_qubit, vn_x_qubit};

    #[test]
    fn rng_reproducible() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let c = Rng::new(43);
        assert_ne!(a.derive(0).next_u64(), c.derive(0).next_u64());
    }

    #[test]
    fn grid_includes_poles() {
        let grid = grid_pure_states(2, 2).unwrap();
        assert_eq!(grid.len(), 8);
        let kets: Vec<Ket> = grid.iter().collect();
        let zero = Ket::basis(2, 0);
        let one = Ket::basis(2, 1);
        assert!(kets.iter().any(|k| k.inner(&zero).norm() > 1.0 - 1e-12));
        assert!(kets.iter().any(|k| k.inner(&one).norm() > 1.0 - 1e-12));
    }

    #[test]
    fn grid_kets_are_unit() {
        let grid = grid_pure_states(3, 3).unwrap();
        for ket in grid.iter() {
            assert!((ket.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_rejects_large_dims() {
        assert!(matches!(
            grid_pure_states(4, 8),
            Err(OracleError::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn brute_force_z_basis_is_zero() {
        let z = Povm::new(
            2,
            vec![Ket::basis(2, 0).projector(), Ket::basis(2, 1).projector()],
        )
        .unwrap();
        let (value, _) = brute_force_min_pure(&z, 32).unwrap();
        assert!(value.abs() < 1e-9);
    }

    #[test]
    fn brute_force_x_basis_is_zero_at_plus() {
        // Odd resolution so theta = pi/2 lies exactly on the grid.
        let (value, argmin) = brute_force_min_pure(&vn_x_qubit(), 65).unwrap();
        assert!(value.abs() < 1e-9);
        let plus_overlap = argmin.expectation(vn_x_qubit().element(0));
        let minus_overlap = argmin.expectation(vn_x_qubit().element(1));
        assert!(plus_overlap > 1.0 - 1e-9 || minus_overlap > 1.0 - 1e-9);
    }

    #[test]
    fn brute_force_sic_approaches_log3() {
        let (value, _) = brute_force_min_pure(&sic_qubit(), 200).unwrap();
        assert!((value - 3.0f64.log2()).abs() < 1e-3, "got {value}");
    }

    #[test]
    fn brute_force_rejects_full_rank() {
        let flat = crate::povm::trivial_povm(2, &[0.5, 0.5]).unwrap();
        assert!(matches!(
            brute_force_min_pure(&flat, 8),
            Err(OracleError::UnsupportedPovm)
        ));
    }

    #[test]
    fn finer_grids_do_not_increase_minimum() {
        let p = sic_qubit();
        let coarse = brute_force_min_pure(&p, 50).unwrap().0;
        let fine = brute_force_min_pure(&p, 100).unwrap().0;
        assert!(fine <= coarse + 1e-12);
    }

    #[test]
    fn random_povm_is_valid_and_deterministic() {
        for seed in 0..30 {
            let mut rng = Rng::new(seed);
            let p = random_povm(3, 5, &mut rng);
            assert!(p.validate().is_ok(), "seed {seed}");
        }
        let a = random_povm(2, 3, &mut Rng::new(7));
        let b = random_povm(2, 3, &mut Rng::new(7));
        for (x, y) in a.elements().iter().zip(b.elements()) {
            assert!(x.approx_eq(y, 0.0));
        }
    }

    #[test]
    fn random_povm_single_outcome_is_identity() {
        let p = random_povm(2, 1, &mut Rng::new(5));
        assert!(p.element(0).approx_eq(&ComplexMatrix::identity(2), 1e-10));
    }

    #[test]
    fn random_density_ranks() {
        let mut rng = Rng::new(11);
        let pure = random_density(3, 1, &mut rng);
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        let full = random_density(3, 3, &mut rng);
        assert!(full.purity() < 0.999);
        assert!(full.rank(1e-9) == 3);
    }

    #[test]
    fn verify_decomposition_flags_corruption() {
        let p = crate::povm::mub_qubit();
        let dec = extremal_decompose(&p).unwrap();
        assert!(verify_decomposition(&dec, &p) < 1e-8);

        let mut weights = dec.weights().to_vec();
        weights[0] += 0.01;
        weights[1] -= 0.01;
        let corrupted = Decomposition::new(weights, dec.components().to_vec(), p.clone());
        assert!(verify_decomposition(&corrupted, &p) > 1e-3);
    }

    #[test]
    fn verify_single_identity_decomposition() {
        let p = Povm::new(2, vec![ComplexMatrix::identity(2)]).unwrap();
        let dec = Decomposition::new(vec![1.0], vec![p.clone()], p.clone());
        assert!(verify_decomposition(&dec, &p) < 1e-15);
    }
}
