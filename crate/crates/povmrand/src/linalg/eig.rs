//! Hermitian eigendecomposition (cyclic Jacobi with complex rotations),
//! PSD square roots, and isometry-to-unitary completion.

use super::matrix::{C64, ComplexMatrix, Ket, DEFAULT_TOL};
use super::LinalgError;

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues sorted descending and the matching orthonormal
/// eigenvectors, so that `H = sum_k lambda_k |v_k><v_k|` within 1e-8 in max
/// norm for the sizes this crate deals with.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, Vec<Ket>), LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::DimensionMismatch {
            expected: h.rows(),
            found: h.cols(),
        });
    }
    if !h.is_hermitian(DEFAULT_TOL) {
        return Err(LinalgError::NonHermitian(h.hermiticity_residual()));
    }
    let n = h.rows();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }

    // Work on an exactly-Hermitian copy so rotation updates stay symmetric.
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let stop = 1e-14 * scale;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // Phase factor turning the 2x2 block real symmetric.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Rotation R: identity except
                //   R[p,p] = c           R[p,q] = s
                //   R[q,p] = -s*conj(ph) R[q,q] = c*conj(ph)
                let rqp = -s * phase.conj();
                let rqq = c * phase.conj();
                // A <- R^dag A R ; update columns p,q then rows p,q.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * rqp;
                    a[(k, q)] = akp * s + akq * rqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * rqp.conj();
                    a[(q, k)] = apk * s + aqk * rqq.conj();
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * rqp;
                    v[(k, q)] = vkp * s + vkq * rqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigenvalues: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| eigenvalues[j].partial_cmp(&eigenvalues[i]).unwrap());

    let sorted_values: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let mut vectors = Vec::with_capacity(n);
    for &col in &order {
        let amps: Vec<C64> = (0..n).map(|row| v[(row, col)]).collect();
        vectors.push(Ket::normalized(amps).expect("Jacobi columns stay unit norm"));
    }
    Ok((sorted_values, vectors))
}

/// Hermitian PSD square root via the spectral decomposition.
///
/// Eigenvalue dust in [-1e-9, 0) is clamped to zero; anything more negative
/// is a genuine positivity violation.
pub fn matrix_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let (eigenvalues, vectors) = hermitian_eig(m)?;
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (lambda, vec) in eigenvalues.iter().zip(&vectors) {
        let clamped = if *lambda < 0.0 {
            if *lambda < -DEFAULT_TOL {
                return Err(LinalgError::NotPsd(*lambda));
            }
            0.0
        } else {
            *lambda
        };
        if clamped == 0.0 {
            continue;
        }
        let root = clamped.sqrt();
        let amps = vec.amplitudes();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += amps[i] * amps[j].conj() * root;
            }
        }
    }
    Ok(out)
}

/// Complete an n x d isometry (orthonormal columns) to an n x n unitary whose
/// first d columns equal the input exactly.
///
/// The remaining columns come from Gram-Schmidt over the standard basis in
/// index order; candidates whose residual after projection falls below 1e-6
/// are skipped, which keeps the completion deterministic.
pub fn complete_isometry_to_unitary(v: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let n = v.rows();
    let d = v.cols();
    if d > n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: d,
        });
    }
    // Check V^dag V = 1_d.
    for a in 0..d {
        for b in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += v[(k, a)].conj() * v[(k, b)];
            }
            let target = if a == b { 1.0 } else { 0.0 };
            if (acc - C64::new(target, 0.0)).norm() > DEFAULT_TOL {
                return Err(LinalgError::NotIsometry((acc - C64::new(target, 0.0)).norm()));
            }
        }
    }

    let mut columns: Vec<Vec<C64>> = (0..d)
        .map(|c| (0..n).map(|r| v[(r, c)]).collect())
        .collect();

    for k in 0..n {
        if columns.len() == n {
            break;
        }
        let mut w = vec![C64::new(0.0, 0.0); n];
        w[k] = C64::new(1.0, 0.0);
        // Two projection passes; the second cleans up rounding from the first.
        for _ in 0..2 {
            for col in &columns {
                let overlap: C64 = col.iter().zip(&w).map(|(u, x)| u.conj() * x).sum();
                for (wi, ui) in w.iter_mut().zip(col) {
                    *wi -= overlap * ui;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        for z in &mut w {
            *z /= norm;
        }
        columns.push(w);
    }
    if columns.len() != n {
        // Cannot happen for a genuine isometry: the standard basis always
        // contains a candidate with residual >= 1/sqrt(n).
        return Err(LinalgError::NotIsometry(f64::NAN));
    }

    let mut u = ComplexMatrix::zeros(n, n);
    for (c, col) in columns.iter().enumerate() {
        for r in 0..n {
            u[(r, c)] = col[r];
        }
    }
    Ok(u)
}

/// Max-norm distance of U^dag U from the identity.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let gram = &u.conjugate_transpose() * u;
    (&gram - &ComplexMatrix::identity(u.cols())).max_norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(eigenvalues: &[f64], vectors: &[Ket]) -> ComplexMatrix {
        let n = vectors[0].dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (l, v) in eigenvalues.iter().zip(vectors) {
            out = &out + &v.projector().scale(*l);
        }
        out
    }

    #[test]
    fn identity_eigenvalues() {
        let (vals, _) = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_sorted_descending() {
        let (vals, vecs) = hermitian_eig(&ComplexMatrix::diagonal(&[1.0, 3.0])).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!((vecs[0].amplitudes()[1].norm() - 1.0).abs() < 1e-12);
        assert!((vecs[1].amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        // Fixed arbitrary Hermitian 4x4.
        let mut h = ComplexMatrix::zeros(4, 4);
        let seeds = [
            (0, 0, 0.7, 0.0),
            (1, 1, -0.2, 0.0),
            (2, 2, 1.1, 0.0),
            (3, 3, 0.4, 0.0),
            (0, 1, 0.3, 0.5),
            (0, 2, -0.1, 0.2),
            (0, 3, 0.6, -0.4),
            (1, 2, 0.05, -0.3),
            (1, 3, -0.7, 0.1),
            (2, 3, 0.2, 0.25),
        ];
        for (i, j, re, im) in seeds {
            h[(i, j)] = C64::new(re, im);
            if i != j {
                h[(j, i)] = C64::new(re, -im);
            }
        }
        let (vals, vecs) = hermitian_eig(&h).unwrap();
        let back = reconstruct(&vals, &vecs);
        assert!((&back - &h).max_norm() < 1e-10);
        // Orthonormality of eigenvectors.
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((vecs[i].inner(&vecs[j]) - C64::new(target, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig(&m), Err(LinalgError::NonHermitian(_))));
    }

    #[test]
    fn sqrt_diagonal() {
        let r = matrix_sqrt_psd(&ComplexMatrix::diagonal(&[4.0, 9.0])).unwrap();
        assert!(r.approx_eq(&ComplexMatrix::diagonal(&[2.0, 3.0]), 1e-12));
    }

    #[test]
    fn sqrt_rank_one_projector() {
        // 0.5 |+><+| has square root |+><+| / sqrt(2).
        let plus = Ket::normalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let m = plus.projector().scale(0.5);
        let r = matrix_sqrt_psd(&m).unwrap();
        let expected = plus.projector().scale(1.0 / 2.0f64.sqrt());
        assert!(r.approx_eq(&expected, 1e-12));
        assert!((&r * &r).approx_eq(&m, 1e-12));
    }

    #[test]
    fn sqrt_rejects_negative() {
        let m = ComplexMatrix::diagonal(&[1.0, -0.5]);
        assert!(matches!(matrix_sqrt_psd(&m), Err(LinalgError::NotPsd(_))));
    }

    #[test]
    fn completion_square_input_unchanged() {
        let u = complete_isometry_to_unitary(&ComplexMatrix::identity(3)).unwrap();
        assert!(u.approx_eq(&ComplexMatrix::identity(3), 1e-15));
    }

    #[test]
    fn completion_single_column() {
        let v = ComplexMatrix::from_real(2, 1, &[1.0, 0.0]);
        let u = complete_isometry_to_unitary(&v).unwrap();
        assert_eq!(u[(0, 0)], C64::new(1.0, 0.0));
        assert!(unitarity_residual(&u) < 1e-12);
    }

    #[test]
    fn completion_preserves_columns() {
        // 4x2 isometry from two orthonormal vectors with phases.
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        let v = ComplexMatrix::from_rows(
            4,
            2,
            vec![
                C64::new(inv_sqrt2, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, inv_sqrt2),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(inv_sqrt2, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, -inv_sqrt2),
            ],
        );
        let u = complete_isometry_to_unitary(&v).unwrap();
        for r in 0..4 {
            for c in 0..2 {
                assert_eq!(u[(r, c)], v[(r, c)]);
            }
        }
        assert!(unitarity_residual(&u) < 1e-10);
    }

    #[test]
    fn completion_rejects_non_isometry() {
        let v = ComplexMatrix::from_real(2, 1, &[1.0, 1.0]);
        assert!(matches!(
            complete_isometry_to_unitary(&v),
            Err(LinalgError::NotIsometry(_))
        ));
    }
}
