//! Finite-dimensional C*-algebras modelled as direct sums of full matrix
//! algebras `M_{n_1} ⊕ … ⊕ M_{n_k}`.
//!
//! Real coordinates are block-major, then row-major over `(p, q)`, then the
//! real part before the imaginary part: coordinate `2 (offset_b + p n_b + q)`
//! is the coefficient of `E^b_{pq}` and the next one that of `i E^b_{pq}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix};
use crate::rng::SplitMix64;

/// Default tolerance for boolean structure checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Smallest accepted `sigma_min / sigma_max` per block for sampled invertibles.
const INVERTIBLE_SAMPLE_RATIO: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("signature must have at least one block")]
    EmptySignature,
    #[error("block {0} has dimension 0")]
    ZeroBlock(usize),
    #[error("signature mismatch: expected {expected}, got {found}")]
    SignatureMismatch { expected: Signature, found: Signature },
    #[error("block {block}: expected a {dim}x{dim} matrix")]
    BlockShape { block: usize, dim: usize },
    #[error("not a central projection: block {block} is at distance {residual:e} from 0 and 1")]
    NotCentralProjection { block: usize, residual: f64 },
    #[error("element is not invertible (block {block})")]
    NotInvertible { block: usize },
    #[error("expected {expected} real coordinates, got {found}")]
    CoordinateLength { expected: usize, found: usize },
}

/// Block dimensions `n_1, …, n_k` of `⊕ M_{n_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature(Vec<usize>);

impl Signature {
    pub fn new(blocks: Vec<usize>) -> Result<Self, AlgebraError> {
        if blocks.is_empty() {
            return Err(AlgebraError::EmptySignature);
        }
        if let Some(i) = blocks.iter().position(|&n| n == 0) {
            return Err(AlgebraError::ZeroBlock(i));
        }
        Ok(Signature(blocks))
    }

    pub fn blocks(&self) -> &[usize] {
        &self.0
    }

    pub fn num_blocks(&self) -> usize {
        self.0.len()
    }

    /// Complex dimension `Σ n_i²`.
    pub fn complex_dim(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }

    pub fn real_dim(&self) -> usize {
        2 * self.complex_dim()
    }

    /// Offset of block `b` in the complex coordinate ordering.
    pub fn block_offset(&self, b: usize) -> usize {
        self.0[..b].iter().map(|n| n * n).sum()
    }

    /// Block dimensions sorted ascending; two algebras are *-isomorphic iff
    /// these agree.
    pub fn sorted_blocks(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }

    /// `(block, p, q)` for complex coordinate `k`.
    pub fn locate(&self, mut k: usize) -> (usize, usize, usize) {
        for (b, &n) in self.0.iter().enumerate() {
            if k < n * n {
                return (b, k / n, k % n);
            }
            k -= n * n;
        }
        panic!("coordinate out of range for {self}");
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// An element of `⊕ M_{n_i}`, one square matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    signature: Signature,
    blocks: Vec<ComplexMatrix>,
}

impl Element {
    pub fn new(signature: Signature, blocks: Vec<ComplexMatrix>) -> Result<Self, AlgebraError> {
        if blocks.len() != signature.num_blocks() {
            return Err(AlgebraError::SignatureMismatch {
                expected: signature.clone(),
                found: Signature(blocks.iter().map(ComplexMatrix::rows).collect()),
            });
        }
        for (b, (m, &n)) in blocks.iter().zip(signature.blocks()).enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(AlgebraError::BlockShape { block: b, dim: n });
            }
        }
        Ok(Element { signature, blocks })
    }

    pub fn from_fn(signature: &Signature, mut f: impl FnMut(usize, usize) -> ComplexMatrix) -> Self {
        let blocks = signature.blocks().iter().enumerate().map(|(b, &n)| f(b, n)).collect();
        Element { signature: signature.clone(), blocks }
    }

    pub fn zero(signature: &Signature) -> Self {
        Self::from_fn(signature, |_, n| ComplexMatrix::zeros(n, n))
    }

    pub fn identity(signature: &Signature) -> Self {
        Self::from_fn(signature, |_, n| ComplexMatrix::identity(n))
    }

    /// `z · I`.
    pub fn scalar(signature: &Signature, z: Complex64) -> Self {
        Self::from_fn(signature, |_, n| ComplexMatrix::identity(n).scale(z))
    }

    /// Matrix unit `E^b_{pq}`.
    pub fn matrix_unit(signature: &Signature, block: usize, p: usize, q: usize) -> Self {
        let mut x = Self::zero(signature);
        x.blocks[block][(p, q)] = Complex64::new(1.0, 0.0);
        x
    }

    /// Identity of block `b`, a minimal central projection.
    pub fn block_identity(signature: &Signature, block: usize) -> Self {
        Self::from_fn(
            signature,
            |b, n| {
                if b == block {
                    ComplexMatrix::identity(n)
                } else {
                    ComplexMatrix::zeros(n, n)
                }
            },
        )
    }

    /// Real basis element `k` (see the module docs for the ordering).
    pub fn real_basis(signature: &Signature, k: usize) -> Self {
        let (b, p, q) = signature.locate(k / 2);
        let mut x = Self::matrix_unit(signature, b, p, q);
        if k % 2 == 1 {
            x.blocks[b][(p, q)] = Complex64::new(0.0, 1.0);
        }
        x
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &ComplexMatrix {
        &self.blocks[b]
    }

    pub fn into_blocks(self) -> Vec<ComplexMatrix> {
        self.blocks
    }

    pub fn map_blocks(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Element { signature: self.signature.clone(), blocks: self.blocks.iter().map(f).collect() }
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(ComplexMatrix::adjoint)
    }

    /// Blockwise transpose in the standard matrix-unit basis.
    pub fn transpose(&self) -> Self {
        self.map_blocks(ComplexMatrix::transpose)
    }

    /// Entrywise conjugate, `ā = (a*)ᵀ`.
    pub fn conj(&self) -> Self {
        self.map_blocks(ComplexMatrix::conj)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        self.map_blocks(|m| m.scale(z))
    }

    pub fn scale_real(&self, r: f64) -> Self {
        self.scale(Complex64::new(r, 0.0))
    }

    /// Operator norm: the largest block spectral norm.
    pub fn op_norm(&self) -> f64 {
        self.blocks.iter().map(linalg::spectral_norm).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.assert_same(other);
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }

    /// `‖self − other‖` in operator norm.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).op_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_defect() <= tol
    }

    /// `max(‖x*x − I‖, ‖xx* − I‖)`.
    pub fn unitary_defect(&self) -> f64 {
        let id = Element::identity(&self.signature);
        let a = (&(&self.adjoint() * self) - &id).op_norm();
        let b = (&(self * &self.adjoint()) - &id).op_norm();
        a.max(b)
    }

    /// Recognizes central projections. In `⊕ M_{n_i}` the center is spanned
    /// by the block identities, so each block has to be `0·I` or `1·I`.
    pub fn is_central_projection(&self, tol: f64) -> Result<CentralProjection, AlgebraError> {
        let mut flags = Vec::with_capacity(self.blocks.len());
        for (b, m) in self.blocks.iter().enumerate() {
            let n = m.rows();
            let id = ComplexMatrix::identity(n);
            let to_zero = linalg::spectral_norm(m);
            let to_one = linalg::spectral_norm(&(m - &id));
            if to_one <= tol {
                flags.push(true);
            } else if to_zero <= tol {
                flags.push(false);
            } else {
                return Err(AlgebraError::NotCentralProjection { block: b, residual: to_zero.min(to_one) });
            }
        }
        Ok(CentralProjection { signature: self.signature.clone(), flags })
    }

    pub fn is_invertible(&self) -> bool {
        self.blocks.iter().all(|m| linalg::invert(m).is_ok())
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(b, m)| linalg::invert(m).map_err(|_| AlgebraError::NotInvertible { block: b }))
            .collect::<Result<_, _>>()?;
        Ok(Element { signature: self.signature.clone(), blocks })
    }

    /// Real coordinate vector of length `signature.real_dim()`.
    pub fn to_real_coords(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|m| m.as_slice().iter().flat_map(|z| [z.re, z.im])).collect()
    }

    pub fn from_real_coords(signature: &Signature, coords: &[f64]) -> Result<Self, AlgebraError> {
        if coords.len() != signature.real_dim() {
            return Err(AlgebraError::CoordinateLength { expected: signature.real_dim(), found: coords.len() });
        }
        let mut rest = coords;
        let blocks = signature
            .blocks()
            .iter()
            .map(|&n| {
                let (head, tail) = rest.split_at(2 * n * n);
                rest = tail;
                let data = head.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
                ComplexMatrix::from_vec(n, n, data).expect("length checked")
            })
            .collect();
        Ok(Element { signature: signature.clone(), blocks })
    }

    /// Element with i.i.d. standard complex Gaussian entries.
    pub fn random_ginibre(signature: &Signature, rng: &mut SplitMix64) -> Self {
        Self::from_fn(signature, |_, n| ComplexMatrix::ginibre(n, rng))
    }

    /// Blockwise Ginibre sample, each block resampled until its singular
    /// value ratio is at least `1e-6`.
    pub fn random_invertible(signature: &Signature, seed: u64) -> Self {
        Self::sample_invertible(signature, &mut SplitMix64::new(seed))
    }

    pub fn sample_invertible(signature: &Signature, rng: &mut SplitMix64) -> Self {
        Self::from_fn(signature, |_, n| loop {
            let g = ComplexMatrix::ginibre(n, rng);
            let sv = linalg::singular_values(&g);
            if sv[0] > 0.0 && sv[n - 1] >= INVERTIBLE_SAMPLE_RATIO * sv[0] {
                break g;
            }
        })
    }

    /// Blockwise Haar unitary.
    pub fn random_unitary(signature: &Signature, rng: &mut SplitMix64) -> Self {
        Self::from_fn(signature, |_, n| linalg::haar_unitary(n, rng))
    }

    /// Symmetry `s = u d u*` with `u` blockwise Haar and `d` a uniformly
    /// random diagonal sign pattern.
    pub fn random_symmetry(signature: &Signature, seed: u64) -> Self {
        Self::sample_symmetry(signature, &mut SplitMix64::new(seed))
    }

    pub fn sample_symmetry(signature: &Signature, rng: &mut SplitMix64) -> Self {
        use rand::Rng;
        Self::from_fn(signature, |_, n| {
            let u = linalg::haar_unitary(n, rng);
            let signs: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(if rng.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0)).collect();
            Self::symmetry_from_parts(&u, &signs)
        })
    }

    fn symmetry_from_parts(u: &ComplexMatrix, signs: &[Complex64]) -> ComplexMatrix {
        let d = ComplexMatrix::diagonal(signs);
        let s = &(u * &d) * &u.adjoint();
        // exact Hermitian symmetrization; the residual s² − I is unaffected
        ComplexMatrix::from_fn(s.rows(), s.cols(), |i, j| (s[(i, j)] + s[(j, i)].conj()) * 0.5)
    }

    fn assert_same(&self, other: &Self) {
        assert_eq!(self.signature, other.signature, "signature mismatch");
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.assert_same(rhs);
        Element {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.assert_same(rhs);
        Element {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.assert_same(rhs);
        Element {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a * b).collect(),
        }
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_blocks(|m| -m)
    }
}

/// A projection in the center: a 0/1 choice per block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralProjection {
    signature: Signature,
    flags: Vec<bool>,
}

impl CentralProjection {
    pub fn new(signature: Signature, flags: Vec<bool>) -> Result<Self, AlgebraError> {
        if flags.len() != signature.num_blocks() {
            return Err(AlgebraError::SignatureMismatch {
                expected: signature.clone(),
                found: Signature(vec![1; flags.len()]),
            });
        }
        Ok(CentralProjection { signature, flags })
    }

    pub fn full(signature: &Signature) -> Self {
        CentralProjection { signature: signature.clone(), flags: vec![true; signature.num_blocks()] }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    /// `I − P`.
    pub fn complement(&self) -> Self {
        CentralProjection { signature: self.signature.clone(), flags: self.flags.iter().map(|f| !f).collect() }
    }

    pub fn to_element(&self) -> Element {
        Element::from_fn(&self.signature, |b, n| {
            if self.flags[b] {
                ComplexMatrix::identity(n)
            } else {
                ComplexMatrix::zeros(n, n)
            }
        })
    }

    /// `P x`, computed by selecting blocks.
    pub fn apply(&self, x: &Element) -> Element {
        assert_eq!(&self.signature, x.signature(), "signature mismatch");
        Element::from_fn(
            &self.signature,
            |b, n| {
                if self.flags[b] {
                    x.block(b).clone()
                } else {
                    ComplexMatrix::zeros(n, n)
                }
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[usize]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn signature_validation() {
        assert_eq!(Signature::new(vec![]), Err(AlgebraError::EmptySignature));
        assert_eq!(Signature::new(vec![2, 0]), Err(AlgebraError::ZeroBlock(1)));
        let s = sig(&[1, 1, 3]);
        assert_eq!(s.real_dim(), 22);
        assert_eq!(s.locate(2), (2, 0, 0));
        assert_eq!(s.locate(10), (2, 2, 2));
    }

    #[test]
    fn identity_examples() {
        let one = Element::identity(&sig(&[1]));
        assert_eq!(one.block(0)[(0, 0)], c(1., 0.));
        let id = Element::identity(&sig(&[2, 3]));
        assert_eq!(id.block(0), &ComplexMatrix::identity(2));
        assert_eq!(id.block(1), &ComplexMatrix::identity(3));
        for s in [sig(&[1]), sig(&[2, 3]), sig(&[1, 1, 3])] {
            let id = Element::identity(&s);
            assert!((id.op_norm() - 1.0).abs() < 1e-15);
            assert!(id.is_unitary(1e-12));
            assert!(id.is_invertible());
        }
    }

    #[test]
    fn op_norm_examples() {
        let s = sig(&[1, 1]);
        let x = Element::new(s, vec![ComplexMatrix::diagonal(&[c(3., 0.)]), ComplexMatrix::diagonal(&[c(0., 4.)])])
            .unwrap();
        assert!((x.op_norm() - 4.0).abs() < 1e-14);
        let nil = ComplexMatrix::from_rows(&[vec![c(0., 0.), c(2., 0.)], vec![c(0., 0.), c(0., 0.)]]);
        let y = Element::new(sig(&[2]), vec![nil]).unwrap();
        assert!((y.op_norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn is_unitary_examples() {
        let s = sig(&[2, 1]);
        assert!(Element::identity(&s).is_unitary(1e-9));
        assert!(!Element::identity(&s).scale_real(2.0).is_unitary(1e-9));
        let u = Element::random_unitary(&s, &mut SplitMix64::new(4));
        assert!(u.is_unitary(1e-9));
    }

    #[test]
    fn central_projection_examples() {
        let s = sig(&[2, 1]);
        assert_eq!(Element::identity(&s).is_central_projection(1e-9).unwrap().flags(), &[true, true]);
        assert_eq!(Element::zero(&s).is_central_projection(1e-9).unwrap().flags(), &[false, false]);
        let half = Element::block_identity(&s, 0);
        assert_eq!(half.is_central_projection(1e-9).unwrap().flags(), &[true, false]);

        let p = Element::new(sig(&[2]), vec![ComplexMatrix::diagonal(&[c(1., 0.), c(0., 0.)])]).unwrap();
        assert!(matches!(p.is_central_projection(1e-9), Err(AlgebraError::NotCentralProjection { block: 0, .. })));
    }

    #[test]
    fn central_projection_roundtrips_through_element() {
        let s = sig(&[1, 2, 3]);
        let p = CentralProjection::new(s.clone(), vec![true, false, true]).unwrap();
        let e = p.to_element();
        assert_eq!(e.is_central_projection(1e-12).unwrap(), p);
        assert_eq!(&e + &p.complement().to_element(), Element::identity(&s));
        let x = Element::random_ginibre(&s, &mut SplitMix64::new(1));
        assert_eq!(p.apply(&x), &e * &x);
    }

    #[test]
    fn invertibility() {
        let s = sig(&[2, 1]);
        assert!(Element::identity(&s).is_invertible());
        let x =
            Element::from_fn(&s, |b, n| if b == 1 { ComplexMatrix::zeros(n, n) } else { ComplexMatrix::identity(n) });
        assert!(!x.is_invertible());
        assert!(matches!(x.inverse(), Err(AlgebraError::NotInvertible { block: 1 })));

        let g = Element::random_invertible(&sig(&[3, 2]), 42);
        assert!(g.is_invertible());
        let inv = g.inverse().unwrap();
        assert!((&g * &inv).distance(&Element::identity(g.signature())) <= 1e-10);
    }

    #[test]
    fn random_invertible_is_deterministic() {
        let s = sig(&[1]);
        let a = Element::random_invertible(&s, 9);
        assert_eq!(a, Element::random_invertible(&s, 9));
        assert!(a.block(0)[(0, 0)].norm() > 0.0);
    }

    #[test]
    fn random_symmetry_examples() {
        let s1 = sig(&[1]);
        for seed in 0..20 {
            let s = Element::random_symmetry(&s1, seed);
            let z = s.block(0)[(0, 0)];
            assert!((z - c(1., 0.)).norm() < 1e-12 || (z + c(1., 0.)).norm() < 1e-12, "{z}");
        }
        let u = linalg::random_unitary(3, 1);
        let ones = vec![c(1., 0.); 3];
        assert!(Element::symmetry_from_parts(&u, &ones).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);

        let sg = sig(&[1, 2, 3]);
        for seed in 0..20 {
            let s = Element::random_symmetry(&sg, seed);
            let id = Element::identity(&sg);
            assert!((&(&s * &s) - &id).op_norm() <= 1e-10);
            assert!(s.distance(&s.adjoint()) <= 1e-10);
        }
    }

    #[test]
    fn real_coordinates_follow_basis_convention() {
        let s = sig(&[1, 2]);
        let x = Element::real_basis(&s, 3);
        // coordinate 3 = imaginary part of complex coordinate 1 = block 1, (0, 0)
        assert_eq!(x.block(1)[(0, 0)], c(0., 1.));
        let mut coords = vec![0.0; s.real_dim()];
        coords[3] = 1.0;
        assert_eq!(x.to_real_coords(), coords);
        assert_eq!(Element::from_real_coords(&s, &coords).unwrap(), x);
        assert!(Element::from_real_coords(&s, &coords[1..]).is_err());
    }
}
