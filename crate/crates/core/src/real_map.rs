//! Real-linear maps between algebras, stored as real matrices in the fixed
//! real coordinate basis (see [`crate::algebra`]).

use thiserror::Error;

use crate::algebra::{Element, Signature};
use crate::exec::Execution;
use crate::linalg::{self, ComplexMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealMapError {
    #[error("matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    Shape { rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
}

/// Matrix of shape `codomain.real_dim() × domain.real_dim()`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealLinearMap {
    domain: Signature,
    codomain: Signature,
    matrix: Vec<f64>,
}

impl RealLinearMap {
    pub fn new(domain: Signature, codomain: Signature, matrix: Vec<Vec<f64>>) -> Result<Self, RealMapError> {
        let (er, ec) = (codomain.real_dim(), domain.real_dim());
        let cols = matrix.first().map_or(0, Vec::len);
        if matrix.len() != er || matrix.iter().any(|r| r.len() != ec) {
            return Err(RealMapError::Shape { rows: matrix.len(), cols, expected_rows: er, expected_cols: ec });
        }
        Ok(RealLinearMap { domain, codomain, matrix: matrix.concat() })
    }

    /// Assembles the matrix column by column from the images of the real
    /// basis elements.
    pub fn from_fn<F>(domain: &Signature, codomain: &Signature, f: F) -> Self
    where
        F: Fn(&Element) -> Element + Sync + Send,
    {
        Self::from_fn_with(domain, codomain, Execution::Sequential, f)
    }

    pub fn from_fn_with<F>(domain: &Signature, codomain: &Signature, exec: Execution, f: F) -> Self
    where
        F: Fn(&Element) -> Element + Sync + Send,
    {
        let (rows, cols) = (codomain.real_dim(), domain.real_dim());
        let columns = exec.map(cols, |k| {
            let image = f(&Element::real_basis(domain, k));
            assert_eq!(image.signature(), codomain, "image has the wrong signature");
            image.to_real_coords()
        });
        let mut matrix = vec![0.0; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                matrix[i * cols + j] = v;
            }
        }
        RealLinearMap { domain: domain.clone(), codomain: codomain.clone(), matrix }
    }

    pub fn identity(signature: &Signature) -> Self {
        Self::from_fn(signature, signature, Element::clone)
    }

    pub fn domain(&self) -> &Signature {
        &self.domain
    }

    pub fn codomain(&self) -> &Signature {
        &self.codomain
    }

    pub fn rows(&self) -> usize {
        self.codomain.real_dim()
    }

    pub fn cols(&self) -> usize {
        self.domain.real_dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.cols() + j]
    }

    pub fn row_vecs(&self) -> Vec<Vec<f64>> {
        self.matrix.chunks(self.cols()).map(<[f64]>::to_vec).collect()
    }

    pub fn apply(&self, x: &Element) -> Element {
        assert_eq!(x.signature(), &self.domain, "argument does not match the domain signature");
        let v = x.to_real_coords();
        let cols = self.cols();
        let out: Vec<f64> = self.matrix.chunks(cols).map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        Element::from_real_coords(&self.codomain, &out).expect("dimension fixed by construction")
    }

    /// Largest entrywise difference of the two matrices.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.matrix.len(), other.matrix.len(), "shape mismatch");
        self.matrix.iter().zip(&other.matrix).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Smallest singular value of the real matrix (0 when not square).
    pub fn min_singular_value(&self) -> f64 {
        if self.rows() != self.cols() {
            return 0.0;
        }
        let m = ComplexMatrix::from_fn(self.rows(), self.cols(), |i, j| self.entry(i, j).into());
        linalg::singular_values(&m).last().copied().unwrap_or(0.0)
    }

    /// `self + noise`, used to build near-miss counterexamples.
    pub fn perturbed(&self, noise: impl FnMut() -> f64) -> Self {
        let mut noise = noise;
        RealLinearMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.iter().map(|&v| v + noise()).collect(),
        }
    }

    /// Map with the given matrix entries supplied by `f(row, col)`.
    pub fn from_entries(domain: &Signature, codomain: &Signature, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let (rows, cols) = (codomain.real_dim(), domain.real_dim());
        let mut matrix = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                matrix.push(f(i, j));
            }
        }
        RealLinearMap { domain: domain.clone(), codomain: codomain.clone(), matrix }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn sig(v: &[usize]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identity_matrix() {
        let s = sig(&[1, 2]);
        let id = RealLinearMap::identity(&s);
        for i in 0..id.rows() {
            for j in 0..id.cols() {
                assert_eq!(id.entry(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        assert!((id.min_singular_value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_matches_closure() {
        let s = sig(&[2, 1]);
        let mut rng = SplitMix64::new(2);
        let u = Element::random_unitary(&s, &mut rng);
        let f = |x: &Element| &(&u * &x.adjoint()) * &u.adjoint();
        let map = RealLinearMap::from_fn(&s, &s, f);
        let x = Element::random_ginibre(&s, &mut rng);
        assert!(map.apply(&x).max_abs_diff(&f(&x)) < 1e-13);
    }

    #[test]
    fn shape_is_validated() {
        let s = sig(&[1]);
        assert!(RealLinearMap::new(s.clone(), s.clone(), vec![vec![1.0, 0.0]]).is_err());
        assert!(RealLinearMap::new(s.clone(), s.clone(), vec![vec![1.0, 0.0], vec![0.0]]).is_err());
        assert!(RealLinearMap::new(s.clone(), s, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).is_ok());
    }

    #[test]
    fn execution_modes_build_identical_maps() {
        let s = sig(&[1, 3]);
        let f = |x: &Element| x.transpose();
        assert_eq!(
            RealLinearMap::from_fn_with(&s, &s, Execution::Sequential, f),
            RealLinearMap::from_fn_with(&s, &s, Execution::Parallel, f)
        );
    }
}
