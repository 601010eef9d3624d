//! Dense complex matrices, unit kets, and density operators.
//!
//! Everything is row-major `Vec<Complex64>` with `f64` scalars. Dimensions
//! stay small (a few dozen at most), so no attempt is made at blocking or
//! sparsity; clarity and determinism win.

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use super::LinalgError;

/// Default absolute tolerance for element-wise comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

pub type C64 = Complex64;

/// Dense complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major slice of entries.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(rows * cols, data.len(), "entry count must be rows*cols");
        Self { rows, cols, data }
    }

    /// Build from row-major real entries (imaginary parts zero).
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(rows * cols, data.len());
        Self {
            rows,
            cols,
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn conjugate_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= factor;
        }
        out
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= factor;
        }
        out
    }

    /// Largest entry magnitude (max norm).
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Element-wise comparison with an absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            if self[(i, i)].im.abs() > tol {
                return false;
            }
            for j in (i + 1)..self.cols {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Hermiticity defect: max |A_ij - conj(A_ji)|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Kronecker product, left factor slow (index = a*cols(rhs) + q).
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for a in 0..self.rows {
            for b in 0..self.cols {
                let f = self[(a, b)];
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for q in 0..rhs.rows {
                    for r in 0..rhs.cols {
                        out[(a * rhs.rows + q, b * rhs.cols + r)] = f * rhs[(q, r)];
                    }
                }
            }
        }
        out
    }

    /// `self * ket` as a raw amplitude vector.
    pub fn apply(&self, amplitudes: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, amplitudes.len());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * amplitudes[j];
            }
            out[i] = acc;
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let f = self[(i, k)];
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += f * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Unit vector in C^d.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amplitudes: Vec<C64>,
}

impl Ket {
    /// Wrap amplitudes that are already normalized; errors if the norm is off
    /// by more than `DEFAULT_TOL`.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, LinalgError> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(LinalgError::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize arbitrary amplitudes into a unit ket.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self, LinalgError> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(LinalgError::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Computational basis ket |i>.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// <self|other>
    pub fn inner(&self, other: &Ket) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |self><self|
    pub fn projector(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        m
    }

    /// <self|M|self>, real part (M assumed Hermitian).
    pub fn expectation(&self, m: &ComplexMatrix) -> f64 {
        let mv = m.apply(&self.amplitudes);
        self.amplitudes
            .iter()
            .zip(&mv)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// |self> tensor |other>, left factor slow.
    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for q in &other.amplitudes {
                amplitudes.push(a * q);
            }
        }
        Ket { amplitudes }
    }
}

/// Positive unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    matrix: ComplexMatrix,
}

impl DensityState {
    /// Validate Hermiticity, positivity (eigenvalues >= -1e-9) and unit trace.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        if !matrix.is_hermitian(DEFAULT_TOL) {
            return Err(LinalgError::NonHermitian(matrix.hermiticity_residual()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DEFAULT_TOL || tr.im.abs() > DEFAULT_TOL {
            return Err(LinalgError::InvalidTrace(tr.re));
        }
        let (eigenvalues, _) = super::hermitian_eig(&matrix)?;
        if let Some(&min) = eigenvalues.last() {
            if min < -DEFAULT_TOL {
                return Err(LinalgError::NotPsd(min));
            }
        }
        Ok(Self { matrix })
    }

    pub fn from_ket(ket: &Ket) -> Self {
        Self {
            matrix: ket.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Mixture sum_k w_k rho_k; weights must form a probability vector.
    pub fn mixture(weights: &[f64], states: &[DensityState]) -> Result<Self, LinalgError> {
        assert_eq!(weights.len(), states.len());
        let dim = states[0].dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            m = &m + &s.matrix().scale(*w);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        let (eigenvalues, _) = super::hermitian_eig(&self.matrix).expect("validated Hermitian");
        eigenvalues.iter().filter(|&&x| x > tol).count()
    }
}

/// Which tensor factor `partial_trace` keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    /// The slow-varying left factor (system A).
    A,
    /// The fast-varying right factor (ancilla Q).
    Q,
}

/// Partial trace of an operator on A (x) Q with global index a*dim_q + q.
///
/// Keeping `A` yields tr_Q(X); keeping `Q` yields tr_A(X). The total trace is
/// preserved either way.
pub fn partial_trace(
    x: &ComplexMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    let (da, dq) = dims;
    let n = da * dq;
    if x.rows() != n || x.cols() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: x.rows(),
        });
    }
    match keep {
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(da, da);
            for a in 0..da {
                for b in 0..da {
                    let mut acc = C64::new(0.0, 0.0);
                    for q in 0..dq {
                        acc += x[(a * dq + q, b * dq + q)];
                    }
                    out[(a, b)] = acc;
                }
            }
            Ok(out)
        }
        Subsystem::Q => {
            let mut out = ComplexMatrix::zeros(dq, dq);
            for q in 0..dq {
                for r in 0..dq {
                    let mut acc = C64::new(0.0, 0.0);
                    for a in 0..da {
                        acc += x[(a * dq + q, a * dq + r)];
                    }
                    out[(q, r)] = acc;
                }
            }
            Ok(out)
        }
    }
}
