//! Derivative-free local search (Nelder-Mead) and the smooth
//! parameterizations shared by the randomness optimizers.

use crate::linalg::C64;

/// Minimize `f` from `x0` with a standard Nelder-Mead simplex.
///
/// Budget is counted in objective evaluations. Stops early once the simplex
/// value spread falls below `tol`.
pub(crate) fn nelder_mead<F>(
    f: &F,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    tol: f64,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    // Initial simplex: x0 plus a step along each coordinate.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() < tol {
            break;
        }

        // Centroid of all but the worst point.
        let mut centroid = vec![0.0; n];
        for (x, _) in simplex.iter().take(n) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }

        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[n].0)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let fr = eval(&reflect, &mut evals);

        if fr < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + gamma * (r - c))
                .collect();
            let fe = eval(&expand, &mut evals);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let fc = eval(&contract, &mut evals);
            if fc < simplex[n].1 {
                simplex[n] = (contract, fc);
            } else {
                // Shrink toward the best vertex.
                let pivot = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = pivot
                        .iter()
                        .zip(&entry.0)
                        .map(|(p, xi)| p + sigma * (xi - p))
                        .collect();
                    let v = eval(&x, &mut evals);
                    *entry = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v)
}

/// Interpret 2*n*r reals as a complex n x r matrix and orthonormalize its
/// columns (modified Gram-Schmidt, two passes). Degenerate columns fall back
/// to cycling standard basis vectors, keeping the map total and
/// deterministic.
pub(crate) fn orthonormal_columns(params: &[f64], n: usize, r: usize) -> Vec<Vec<C64>> {
    assert!(r <= n, "need at least as many rows as columns");
    assert_eq!(params.len(), 2 * n * r);
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(r);
    for c in 0..r {
        let mut col: Vec<C64> = (0..n)
            .map(|i| {
                let base = 2 * (c * n + i);
                C64::new(params[base], params[base + 1])
            })
            .collect();
        let mut fallback = 0usize;
        loop {
            for _ in 0..2 {
                for prev in &columns {
                    let overlap: C64 = prev.iter().zip(&col).map(|(u, x)| u.conj() * x).sum();
                    for (xi, ui) in col.iter_mut().zip(prev) {
                        *xi -= overlap * ui;
                    }
                }
            }
            let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-10 {
                for z in &mut col {
                    *z /= norm;
                }
                break;
            }
            // Rare: the raw column collapsed onto the span of the previous
            // ones. Substitute the next standard basis vector.
            col = vec![C64::new(0.0, 0.0); n];
            col[fallback % n] = C64::new(1.0, 0.0);
            fallback += 1;
        }
        columns.push(col);
    }
    columns
}

/// Map 2d reals to a unit ket (normalized complex amplitudes); the zero
/// vector falls back to |0>.
pub(crate) fn unit_ket_params(params: &[f64], d: usize) -> Vec<C64> {
    assert_eq!(params.len(), 2 * d);
    let mut amps: Vec<C64> = (0..d)
        .map(|i| C64::new(params[2 * i], params[2 * i + 1]))
        .collect();
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        amps = vec![C64::new(0.0, 0.0); d];
        amps[0] = C64::new(1.0, 0.0);
        return amps;
    }
    for z in &mut amps {
        *z /= norm;
    }
    amps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + (x[1] + 0.5).powi(2) + 2.0;
        let (x, v) = nelder_mead(&f, &[0.0, 0.0], 0.5, 800, 1e-12);
        assert!((x[0] - 1.5).abs() < 1e-4);
        assert!((x[1] + 0.5).abs() < 1e-4);
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn orthonormal_columns_are_orthonormal() {
        let params: Vec<f64> = (0..24).map(|i| (i as f64 * 0.37).sin()).collect();
        let cols = orthonormal_columns(&params, 4, 3);
        for a in 0..3 {
            for b in 0..3 {
                let dot: C64 = cols[a].iter().zip(&cols[b]).map(|(x, y)| x.conj() * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((dot - C64::new(target, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn orthonormal_columns_handles_degenerate_input() {
        // All-zero parameters: still produces an orthonormal frame.
        let cols = orthonormal_columns(&[0.0; 16], 4, 2);
        let dot: C64 = cols[0].iter().zip(&cols[1]).map(|(x, y)| x.conj() * y).sum();
        assert!(dot.norm() < 1e-12);
    }

    #[test]
    fn unit_ket_normalizes() {
        let amps = unit_ket_params(&[3.0, 0.0, 0.0, 4.0], 2);
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
