//! Jordan *-isomorphisms between direct sums of matrix algebras.
//!
//! Every such map sends block `i` of the domain onto a block `σ(i)` of the
//! codomain of the same size, acting there as `x ↦ w x w*` or
//! `x ↦ w xᵀ w*` for a unitary `w`. [`JordanStarIso`] stores exactly that
//! data; [`verify_jordan_star_iso`] certifies an arbitrary real-linear map
//! and [`factor_jordan_iso`] recovers the structured form from it.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::algebra::{Element, Signature};
use crate::exec::Execution;
use crate::linalg::{self, ComplexMatrix};
use crate::real_map::RealLinearMap;
use crate::report::{Check, Report};
use crate::rng::SplitMix64;

/// Unitaries in a structured Jordan map must be unitary to this accuracy.
pub const UNITARY_TOL: f64 = 1e-10;

/// Entries of a unit vector below this modulus are skipped when choosing the
/// phase pivot.
const PHASE_PIVOT: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JordanError {
    #[error("element signature {found} does not match the domain {expected}")]
    SignatureMismatch { expected: Signature, found: Signature },
    #[error("block multisets differ: {domain} vs {codomain}")]
    IncompatibleSignatures { domain: Signature, codomain: Signature },
    #[error("invalid Jordan map: {0}")]
    InvalidStructure(String),
    #[error("not a Jordan *-isomorphism: check `{check}` has residual {residual:e}")]
    NotJordanIso { check: &'static str, residual: f64 },
    #[error("block {block}: neither multiplicative nor anti-multiplicative (residuals {direct:e}, {transpose:e})")]
    AmbiguousBlock { block: usize, direct: f64, transpose: f64 },
}

/// Whether a block acts as an algebra isomorphism or an anti-isomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Direct,
    Transpose,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JordanStarIso {
    domain: Signature,
    codomain: Signature,
    perm: Vec<usize>,
    flags: Vec<Orientation>,
    unitaries: Vec<ComplexMatrix>,
}

impl JordanStarIso {
    /// Validates the structure. `Transpose` on a 1×1 block is rewritten to
    /// the canonical `Direct`.
    pub fn new(
        domain: Signature,
        codomain: Signature,
        perm: Vec<usize>,
        mut flags: Vec<Orientation>,
        unitaries: Vec<ComplexMatrix>,
    ) -> Result<Self, JordanError> {
        let k = domain.num_blocks();
        if codomain.num_blocks() != k || perm.len() != k || flags.len() != k || unitaries.len() != k {
            return Err(JordanError::InvalidStructure(format!(
                "{k} domain blocks but {} codomain blocks, {} perm entries, {} flags, {} unitaries",
                codomain.num_blocks(),
                perm.len(),
                flags.len(),
                unitaries.len()
            )));
        }
        let mut seen = vec![false; k];
        for (i, &j) in perm.iter().enumerate() {
            if j >= k || std::mem::replace(&mut seen[j], true) {
                return Err(JordanError::InvalidStructure(format!("perm is not a bijection (entry {i})")));
            }
            let n = domain.blocks()[i];
            if codomain.blocks()[j] != n {
                return Err(JordanError::InvalidStructure(format!(
                    "perm maps block {i} of size {n} to block {j} of size {}",
                    codomain.blocks()[j]
                )));
            }
            let w = &unitaries[i];
            if w.rows() != n || w.cols() != n {
                return Err(JordanError::InvalidStructure(format!("unitaries[{i}] must be {n}x{n}")));
            }
            let defect = linalg::spectral_norm(&(&(&w.adjoint() * w) - &ComplexMatrix::identity(n)));
            if !(defect <= UNITARY_TOL) {
                return Err(JordanError::InvalidStructure(format!(
                    "unitaries[{i}] is not unitary (defect {defect:e})"
                )));
            }
            if n == 1 {
                flags[i] = Orientation::Direct;
            }
        }
        Ok(JordanStarIso { domain, codomain, perm, flags, unitaries })
    }

    pub fn identity(signature: &Signature) -> Self {
        let k = signature.num_blocks();
        JordanStarIso {
            domain: signature.clone(),
            codomain: signature.clone(),
            perm: (0..k).collect(),
            flags: vec![Orientation::Direct; k],
            unitaries: signature.blocks().iter().map(|&n| ComplexMatrix::identity(n)).collect(),
        }
    }

    /// Identity block structure with the given orientation and unitary on
    /// every block; mainly for the single-block case.
    pub fn uniform(
        signature: &Signature,
        orientation: Orientation,
        unitaries: Vec<ComplexMatrix>,
    ) -> Result<Self, JordanError> {
        let k = signature.num_blocks();
        Self::new(signature.clone(), signature.clone(), (0..k).collect(), vec![orientation; k], unitaries)
    }

    pub fn domain(&self) -> &Signature {
        &self.domain
    }

    pub fn codomain(&self) -> &Signature {
        &self.codomain
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn flags(&self) -> &[Orientation] {
        &self.flags
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    /// Same map with each unitary rephased so that the first entry of its
    /// first column with modulus above `1e-8` is real positive; for 1×1
    /// blocks the unitary becomes `[1]`. The map itself is unchanged.
    pub fn canonicalized(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.unitaries {
            let phase = canonical_phase(&w.column(0));
            *w = w.scale(phase.conj());
            if w.rows() == 1 {
                *w = ComplexMatrix::identity(1);
            }
        }
        out
    }

    /// Largest entrywise distance between the unitaries of two maps with the
    /// same block structure, or `None` when perm or flags differ.
    pub fn unitary_distance(&self, other: &Self) -> Option<f64> {
        if self.domain != other.domain
            || self.codomain != other.codomain
            || self.perm != other.perm
            || self.flags != other.flags
        {
            return None;
        }
        Some(self.unitaries.iter().zip(&other.unitaries).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max))
    }

    pub fn apply(&self, x: &Element) -> Result<Element, JordanError> {
        if x.signature() != &self.domain {
            return Err(JordanError::SignatureMismatch { expected: self.domain.clone(), found: x.signature().clone() });
        }
        let mut blocks = vec![None; self.codomain.num_blocks()];
        for (i, xi) in x.blocks().iter().enumerate() {
            let w = &self.unitaries[i];
            let inner = match self.flags[i] {
                Orientation::Direct => xi.clone(),
                Orientation::Transpose => xi.transpose(),
            };
            blocks[self.perm[i]] = Some(&(w * &inner) * &w.adjoint());
        }
        let blocks = blocks.into_iter().map(|b| b.expect("perm is a bijection")).collect();
        Ok(Element::new(self.codomain.clone(), blocks).expect("block sizes preserved"))
    }

    /// Matrix of [`JordanStarIso::apply`] in the real coordinate basis.
    pub fn to_real_linear_map(&self) -> RealLinearMap {
        RealLinearMap::from_fn(&self.domain, &self.codomain, |x| self.apply(x).expect("basis element of the domain"))
    }
}

/// Unimodular `z` such that `conj(z) · v` has its first non-negligible
/// entry real positive.
fn canonical_phase(v: &[Complex64]) -> Complex64 {
    v.iter().find(|z| z.norm() > PHASE_PIVOT).map_or(Complex64::new(1.0, 0.0), |z| z / z.norm())
}

/// Jordan *-isomorphism with uniformly random dimension-preserving block
/// assignment, independent Haar unitaries and fair orientation flags.
pub fn random_jordan_iso(domain: &Signature, codomain: &Signature, seed: u64) -> Result<JordanStarIso, JordanError> {
    sample_jordan_iso(domain, codomain, &mut SplitMix64::new(seed))
}

pub fn sample_jordan_iso(
    domain: &Signature,
    codomain: &Signature,
    rng: &mut SplitMix64,
) -> Result<JordanStarIso, JordanError> {
    if domain.sorted_blocks() != codomain.sorted_blocks() {
        return Err(JordanError::IncompatibleSignatures { domain: domain.clone(), codomain: codomain.clone() });
    }
    let mut perm = vec![0; domain.num_blocks()];
    let mut dims = domain.sorted_blocks();
    dims.dedup();
    for d in dims {
        let sources: Vec<usize> = (0..domain.num_blocks()).filter(|&i| domain.blocks()[i] == d).collect();
        let mut targets: Vec<usize> = (0..codomain.num_blocks()).filter(|&j| codomain.blocks()[j] == d).collect();
        targets.shuffle(rng);
        for (i, j) in sources.into_iter().zip(targets) {
            perm[i] = j;
        }
    }
    let mut flags = Vec::with_capacity(domain.num_blocks());
    let mut unitaries = Vec::with_capacity(domain.num_blocks());
    for &n in domain.blocks() {
        let transpose = n > 1 && rng.random_bool(0.5);
        flags.push(if transpose { Orientation::Transpose } else { Orientation::Direct });
        unitaries.push(linalg::haar_unitary(n, rng));
    }
    Ok(JordanStarIso { domain: domain.clone(), codomain: codomain.clone(), perm, flags, unitaries }.canonicalized())
}

pub const CHECK_COMPLEX_LINEAR: &str = "complex_linear";
pub const CHECK_UNITAL: &str = "unital";
pub const CHECK_STAR: &str = "star";
pub const CHECK_JORDAN: &str = "jordan";
pub const CHECK_BIJECTIVE: &str = "bijective";

/// Certifies that `map` is a Jordan *-isomorphism.
///
/// Checks, in order: complex linearity on every real basis element, `L(I) = I`,
/// `L(e*) = L(e)*` on the basis, the polarized Jordan identity
/// `L(ef + fe) = L(e)L(f) + L(f)L(e)` over all pairs of matrix units, and
/// full rank of the real matrix (smallest singular value above `tol`).
/// Residuals are operator norms.
pub fn verify_jordan_star_iso(map: &RealLinearMap, tol: f64) -> Report {
    verify_jordan_star_iso_with(map, tol, Execution::default())
}

pub fn verify_jordan_star_iso_with(map: &RealLinearMap, tol: f64, exec: Execution) -> Report {
    let dom = map.domain();
    let i = Complex64::new(0.0, 1.0);
    let real_dim = dom.real_dim();
    let images: Vec<Element> = (0..real_dim).map(|k| map.apply(&Element::real_basis(dom, k))).collect();

    // L(i e) = i L(e); on the basis, i·E = (iE) and i·(iE) = −E.
    let complex_linear = (0..real_dim / 2)
        .map(|k| {
            let (re, im) = (&images[2 * k], &images[2 * k + 1]);
            let a = (im - &re.scale(i)).op_norm();
            let b = (&(-re) - &im.scale(i)).op_norm();
            a.max(b)
        })
        .fold(0.0, crate::exec::f64_max);

    let unital = map.apply(&Element::identity(dom)).distance(&Element::identity(map.codomain()));

    let star = (0..real_dim)
        .map(|k| {
            let e = Element::real_basis(dom, k);
            map.apply(&e.adjoint()).distance(&images[k].adjoint())
        })
        .fold(0.0, crate::exec::f64_max);

    let d = dom.complex_dim();
    let jordan = exec.max(d * d, |idx| {
        let (a, b) = (idx / d, idx % d);
        let (e, f) = (Element::real_basis(dom, 2 * a), Element::real_basis(dom, 2 * b));
        let (le, lf) = (&images[2 * a], &images[2 * b]);
        let lhs = map.apply(&(&(&e * &f) + &(&f * &e)));
        let rhs = &(le * lf) + &(lf * le);
        lhs.distance(&rhs)
    });

    let bijective = map.min_singular_value();

    Report::new(vec![
        Check::at_most(CHECK_COMPLEX_LINEAR, complex_linear, tol),
        Check::at_most(CHECK_UNITAL, unital, tol),
        Check::at_most(CHECK_STAR, star, tol),
        Check::at_most(CHECK_JORDAN, jordan, tol),
        Check::above(CHECK_BIJECTIVE, bijective, tol),
    ])
}

/// Recovers the structured form of a Jordan *-isomorphism given as a real
/// matrix. The recovered unitaries are phase-canonical.
pub fn factor_jordan_iso(map: &RealLinearMap, tol: f64) -> Result<JordanStarIso, JordanError> {
    let report = verify_jordan_star_iso(map, tol);
    if let Some(c) = report.first_failure() {
        return Err(JordanError::NotJordanIso { check: c.name, residual: c.value });
    }
    factor_verified(map, tol)
}

fn factor_verified(map: &RealLinearMap, tol: f64) -> Result<JordanStarIso, JordanError> {
    let (dom, cod) = (map.domain(), map.codomain());
    let k = dom.num_blocks();

    let mut perm = Vec::with_capacity(k);
    for b in 0..k {
        let image = map.apply(&Element::block_identity(dom, b));
        let target = image
            .is_central_projection(tol)
            .ok()
            .and_then(|p| {
                let on: Vec<usize> = (0..p.flags().len()).filter(|&j| p.flags()[j]).collect();
                (on.len() == 1).then(|| on[0])
            })
            .filter(|&j| cod.blocks()[j] == dom.blocks()[b]);
        match target {
            Some(j) if !perm.contains(&j) => perm.push(j),
            _ => {
                return Err(JordanError::NotJordanIso {
                    check: "block_structure",
                    residual: image.distance(&Element::zero(cod)),
                })
            }
        }
    }

    let mut flags = Vec::with_capacity(k);
    let mut unitaries = Vec::with_capacity(k);
    for (b, &j) in perm.iter().enumerate() {
        let n = dom.blocks()[b];
        let unit = |p: usize, q: usize| map.apply(&Element::matrix_unit(dom, b, p, q)).block(j).clone();
        if n == 1 {
            flags.push(Orientation::Direct);
            unitaries.push(ComplexMatrix::identity(1));
            continue;
        }
        let (direct, transpose) = if n == 2 {
            let target = unit(0, 0);
            ((&unit(0, 1) * &unit(1, 0)).max_abs_diff(&target), (&unit(1, 0) * &unit(0, 1)).max_abs_diff(&target))
        } else {
            let target = unit(0, 2);
            ((&unit(0, 1) * &unit(1, 2)).max_abs_diff(&target), (&unit(1, 2) * &unit(0, 1)).max_abs_diff(&target))
        };
        let orientation = match (direct <= tol, transpose <= tol) {
            (true, false) => Orientation::Direct,
            (false, true) => Orientation::Transpose,
            _ => return Err(JordanError::AmbiguousBlock { block: b, direct, transpose }),
        };
        // image(p, q) = w E_pq w* in either orientation
        let image = |p: usize, q: usize| match orientation {
            Orientation::Direct => unit(p, q),
            Orientation::Transpose => unit(q, p),
        };
        let e11 = image(0, 0);
        let pivot = (0..n).max_by(|&a, &c| column_norm(&e11, a).total_cmp(&column_norm(&e11, c))).expect("n >= 1");
        let mut xi = e11.column(pivot);
        let norm = column_norm(&e11, pivot);
        let phase = canonical_phase(&xi);
        for z in &mut xi {
            *z = *z / norm * phase.conj();
        }
        let mut w = ComplexMatrix::zeros(n, n);
        for col in 0..n {
            w.set_column(col, &image(col, 0).mul_vec(&xi));
        }
        flags.push(orientation);
        unitaries.push(w);
    }

    let result = JordanStarIso::new(dom.clone(), cod.clone(), perm, flags, unitaries)
        .map_err(|_| JordanError::NotJordanIso { check: "unitary", residual: f64::INFINITY })?;
    let residual = result.to_real_linear_map().max_abs_diff(map);
    if !(residual <= 10.0 * tol) {
        return Err(JordanError::NotJordanIso { check: "reconstruction", residual });
    }
    Ok(result)
}

fn column_norm(m: &ComplexMatrix, j: usize) -> f64 {
    (0..m.rows()).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt()
}
