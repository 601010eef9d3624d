//! Named qubit measurement families and trivial/depolarized constructions.

use super::{check_probability_vector, mix, Povm, PovmError};
use crate::linalg::{C64, ComplexMatrix, Ket};
use std::f64::consts::PI;

fn ket(amps: Vec<C64>) -> Ket {
    Ket::normalized(amps).expect("family kets are nonzero")
}

/// The qubit SIC measurement {|0><0|/2, |phi_k><phi_k|/2} with
/// |phi_k> = sqrt(1/3)|0> + e^{2 k pi i / 3} sqrt(2/3)|1>.
pub fn sic_qubit() -> Povm {
    let mut elements = vec![Ket::basis(2, 0).projector().scale(0.5)];
    let a = (1.0f64 / 3.0).sqrt();
    let b = (2.0f64 / 3.0).sqrt();
    for k in 0..3 {
        let phase = C64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
        let phi = ket(vec![C64::new(a, 0.0), phase * b]);
        elements.push(phi.projector().scale(0.5));
    }
    Povm::from_parts_unchecked(2, elements)
}

/// The two-basis qubit measurement {|0><0|/2, |1><1|/2, |+><+|/2, |-><-|/2}.
pub fn mub_qubit() -> Povm {
    let inv = 1.0 / 2.0f64.sqrt();
    let plus = ket(vec![C64::new(inv, 0.0), C64::new(inv, 0.0)]);
    let minus = ket(vec![C64::new(inv, 0.0), C64::new(-inv, 0.0)]);
    Povm::from_parts_unchecked(
        2,
        vec![
            Ket::basis(2, 0).projector().scale(0.5),
            Ket::basis(2, 1).projector().scale(0.5),
            plus.projector().scale(0.5),
            minus.projector().scale(0.5),
        ],
    )
}

/// The X-basis von Neumann measurement {|+><+|, |-><-|}.
pub fn vn_x_qubit() -> Povm {
    let inv = 1.0 / 2.0f64.sqrt();
    let plus = ket(vec![C64::new(inv, 0.0), C64::new(inv, 0.0)]);
    let minus = ket(vec![C64::new(inv, 0.0), C64::new(-inv, 0.0)]);
    Povm::from_parts_unchecked(2, vec![plus.projector(), minus.projector()])
}

/// State-independent POVM {w_i 1_d}.
pub fn trivial_povm(dim: usize, weights: &[f64]) -> Result<Povm, PovmError> {
    check_probability_vector(weights)?;
    let id = ComplexMatrix::identity(dim);
    Ok(Povm::from_parts_unchecked(
        dim,
        weights.iter().map(|&w| id.scale(w)).collect(),
    ))
}

/// (1 - mu) p + mu I where I is the uniform trivial POVM on p's outcomes.
pub fn depolarize(p: &Povm, mu: f64) -> Result<Povm, PovmError> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(PovmError::InvalidWeights(mu));
    }
    let m = p.len();
    let uniform = trivial_povm(p.dim(), &vec![1.0 / m as f64; m])?;
    mix(&[1.0 - mu, mu], &[p.clone(), uniform])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;

    #[test]
    fn sic_overlaps_are_one_third() {
        let p = sic_qubit();
        assert!(p.validate().is_ok());
        // Recover the fiducial kets from the rank-1 elements.
        let kets: Vec<Ket> = p
            .elements()
            .iter()
            .map(|m| hermitian_eig(m).unwrap().1[0].clone())
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let overlap = kets[i].inner(&kets[j]).norm_sqr();
                assert!(
                    (overlap - 1.0 / 3.0).abs() < 1e-12,
                    "overlap({i},{j}) = {overlap}"
                );
            }
        }
    }

    #[test]
    fn mub_is_valid() {
        assert!(mub_qubit().validate().is_ok());
    }

    #[test]
    fn trivial_halves() {
        let p = trivial_povm(2, &[0.5, 0.5]).unwrap();
        assert!(p.validate().is_ok());
        assert!(p.element(0).approx_eq(&ComplexMatrix::identity(2).scale(0.5), 1e-15));
    }

    #[test]
    fn trivial_single() {
        let p = trivial_povm(2, &[1.0]).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn trivial_qutrit_thirds() {
        let p = trivial_povm(3, &[1.0 / 3.0; 3]).unwrap();
        assert!(p.validate().is_ok());
    }

    #[test]
    fn depolarize_endpoints() {
        let base = vn_x_qubit();
        let at_zero = depolarize(&base, 0.0).unwrap();
        for (a, b) in at_zero.elements().iter().zip(base.elements()) {
            assert!(a.approx_eq(b, 1e-15));
        }
        let at_one = depolarize(&base, 1.0).unwrap();
        for m in at_one.elements() {
            assert!(m.approx_eq(&ComplexMatrix::identity(2).scale(0.5), 1e-15));
        }
    }

    #[test]
    fn depolarize_half_mixes_elementwise() {
        let p = depolarize(&vn_x_qubit(), 0.5).unwrap();
        let expected = &vn_x_qubit().element(0).scale(0.5)
            + &ComplexMatrix::identity(2).scale(0.25);
        assert!(p.element(0).approx_eq(&expected, 1e-15));
        assert!(p.validate().is_ok());
    }
}
