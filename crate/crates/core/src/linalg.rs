//! Dense complex matrices and the spectral primitives used by the algebra
//! layer: Hermitian eigenvalues (cyclic Jacobi), spectral norm, LU inversion
//! and Haar-distributed unitaries.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::rng::SplitMix64;

/// Off-diagonal mass, relative to the Frobenius norm, below which a Jacobi
/// sweep loop terminates.
pub const JACOBI_THRESHOLD: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 64;
/// `invert` rejects matrices with `sigma_min < SINGULAR_RTOL * sigma_max`.
pub const SINGULAR_RTOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular (sigma_min / sigma_max = {ratio:e})")]
    Singular { ratio: f64 },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ComplexMatrix { rows: r, cols: c, data: rows.concat() }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Square matrix with i.i.d. standard complex Gaussian entries.
    pub fn ginibre(n: usize, rng: &mut SplitMix64) -> Self {
        Self::from_fn(n, n, |_, _| rng.complex_normal())
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex64]) {
        assert_eq!(col.len(), self.rows);
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out.data[i * rhs.cols..(i + 1) * rhs.cols].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi rotations.
///
/// Only the Hermitian part of `h` is read (the upper triangle is assumed to
/// mirror the lower one).
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    assert!(h.is_square(), "hermitian_eigenvalues needs a square matrix");
    let n = h.rows();
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return vec![0.0; n];
    }

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_THRESHOLD * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

// One Jacobi step annihilating a[p][q]. With a[p][q] = r e^{i phi}, the
// unitary G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on the (p, q) plane
// makes (G* A G)[p][q] vanish.
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let z = a[(p, q)];
    let r = z.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = z / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = phase.conj();
    let n = a.rows();

    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * e * s;
        a[(k, q)] = akp * s + akq * e * c;
    }
    // A <- G* A
    let ec = e.conj();
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * ec * s;
        a[(q, k)] = apk * s + aqk * ec * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Largest singular value, as the square root of the largest eigenvalue of
/// `m* m`.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let gram = &m.adjoint() * m;
    hermitian_eigenvalues(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Singular values in descending order.
///
/// Computed from the Hermitian dilation `[[0, m], [m*, 0]]`, whose
/// eigenvalues are `±sigma_i`, so small singular values are resolved to
/// absolute accuracy `eps * sigma_max` instead of `sqrt(eps) * sigma_max`.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let (r, c) = (m.rows(), m.cols());
    let k = r.min(c);
    if k == 0 {
        return Vec::new();
    }
    let mut dilation = ComplexMatrix::zeros(r + c, r + c);
    for i in 0..r {
        for j in 0..c {
            dilation[(i, r + j)] = m[(i, j)];
            dilation[(r + j, i)] = m[(i, j)].conj();
        }
    }
    let eig = hermitian_eigenvalues(&dilation);
    eig.iter().rev().take(k).map(|&x| x.max(0.0)).collect()
}

/// Inverse by LU with partial pivoting.
pub fn invert(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let sv = singular_values(m);
    let (max, min) = (sv[0], *sv.last().unwrap());
    if max == 0.0 || min < SINGULAR_RTOL * max {
        let ratio = if max == 0.0 { 0.0 } else { min / max };
        return Err(LinalgError::Singular { ratio });
    }

    let n = m.rows();
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm())).unwrap();
        if pivot != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = tmp;
            }
            perm.swap(k, pivot);
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / d;
            lu[(i, k)] = f;
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
        }
    }

    let mut inv = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        // solve L y = P e_col, then U x = y
        let mut x: Vec<Complex64> = perm.iter().map(|&p| if p == col { ONE } else { ZERO }).collect();
        for i in 0..n {
            for j in 0..i {
                let l = lu[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = lu[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= lu[(i, i)];
        }
        inv.set_column(col, &x);
    }
    Ok(inv)
}

/// Householder QR of a square matrix: returns `(q, r)` with `m = q r`.
pub fn qr(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    assert!(m.is_square(), "qr expects a square matrix");
    let n = m.rows();
    let mut r = m.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let x: Vec<Complex64> = (k..n).map(|i| r[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { ONE } else { x[0] / x[0].norm() };
        let alpha = -phase * norm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // R <- H R on rows k.., H = I - 2 v v* / (v* v)
        for j in 0..n {
            let dot: Complex64 = (k..n).map(|i| v[i - k].conj() * r[(i, j)]).sum();
            let f = dot * (2.0 / vnorm2);
            for i in k..n {
                r[(i, j)] -= v[i - k] * f;
            }
        }
        // Q <- Q H on columns k..
        for i in 0..n {
            let dot: Complex64 = (k..n).map(|j| q[(i, j)] * v[j - k]).sum();
            let f = dot * (2.0 / vnorm2);
            for j in k..n {
                q[(i, j)] -= f * v[j - k].conj();
            }
        }
        for i in k + 1..n {
            r[(i, k)] = ZERO;
        }
    }
    (q, r)
}

/// Haar-distributed unitary: QR of a Ginibre sample with the gauge fixed so
/// that `R` has a positive real diagonal (column `j` of `Q` is multiplied by
/// `R_jj / |R_jj|`).
pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = SplitMix64::new(seed);
    haar_unitary(n, &mut rng)
}

pub fn haar_unitary(n: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    assert!(n >= 1, "unitary dimension must be positive");
    let g = ComplexMatrix::ginibre(n, rng);
    let (mut q, r) = qr(&g);
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 { ONE } else { d / d.norm() };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}
