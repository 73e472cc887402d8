//! Surjective real-linear isometries between finite-dimensional C*-algebras.
//!
//! Every such map has the canonical form
//!
//! ```text
//! T(a) = u P J(a) + u (I − P) J(a)*
//! ```
//!
//! with `u` unitary, `P` a central projection and `J` a Jordan
//! *-isomorphism, and every map of this form is an isometry. This module
//! builds maps from such certificates ([`build_isometry`]), recovers the
//! certificate from a bare real matrix ([`decompose_isometry`]), and checks
//! the algebraic identities those maps satisfy on random samples.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{CentralProjection, Element, Signature};
use crate::exec::Execution;
use crate::jordan::{self, JordanError, JordanStarIso, Orientation};
use crate::linalg::ComplexMatrix;
use crate::real_map::RealLinearMap;
use crate::report::{Check, Report};
use crate::rng::SplitMix64;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsometryError {
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("map is not normalized: ‖L(I) − I‖ = {residual:e}")]
    NotNormalized { residual: f64 },
    #[error("classification needs single-block signatures, got {domain} -> {codomain}")]
    NotSingleBlock { domain: Signature, codomain: Signature },
    #[error(transparent)]
    Decompose(#[from] DecomposeFailure),
    #[error("real-linear extension is inconsistent at basis column {column}: residual {residual:e}")]
    InconsistentExtension { column: usize, residual: f64 },
    #[error("black-box image has signature {found}, expected {expected}")]
    CodomainMismatch { expected: Signature, found: Signature },
}

/// The data `(u, P, J)` of the canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryCertificate {
    u: Element,
    projection: CentralProjection,
    jordan: JordanStarIso,
}

impl IsometryCertificate {
    pub fn new(u: Element, projection: CentralProjection, jordan: JordanStarIso) -> Result<Self, IsometryError> {
        let cod = jordan.codomain();
        if u.signature() != cod {
            return Err(IsometryError::InvalidCertificate(format!(
                "u has signature {} but J maps into {cod}",
                u.signature()
            )));
        }
        if projection.signature() != cod {
            return Err(IsometryError::InvalidCertificate(format!(
                "P has {} flags but the codomain has {} blocks",
                projection.flags().len(),
                cod.num_blocks()
            )));
        }
        let defect = u.unitary_defect();
        if !(defect <= crate::algebra::DEFAULT_TOL) {
            return Err(IsometryError::InvalidCertificate(format!("u is not unitary (defect {defect:e})")));
        }
        Ok(IsometryCertificate { u, projection, jordan })
    }

    /// `u = I`, `P = I`, `J = id`.
    pub fn identity(signature: &Signature) -> Self {
        IsometryCertificate {
            u: Element::identity(signature),
            projection: CentralProjection::full(signature),
            jordan: JordanStarIso::identity(signature),
        }
    }

    /// Random certificate: blockwise Haar `u`, fair coin per block for `P`,
    /// and a random Jordan *-isomorphism.
    pub fn random(domain: &Signature, codomain: &Signature, seed: u64) -> Result<Self, IsometryError> {
        use rand::Rng;
        let mut rng = SplitMix64::new(seed);
        let jordan = jordan::sample_jordan_iso(domain, codomain, &mut rng)
            .map_err(|e| IsometryError::InvalidCertificate(e.to_string()))?;
        let u = Element::random_unitary(codomain, &mut rng);
        let flags = (0..codomain.num_blocks()).map(|_| rng.random_bool(0.5)).collect();
        let projection = CentralProjection::new(codomain.clone(), flags).expect("flag count matches");
        Ok(IsometryCertificate { u, projection, jordan })
    }

    pub fn u(&self) -> &Element {
        &self.u
    }

    pub fn projection(&self) -> &CentralProjection {
        &self.projection
    }

    pub fn jordan(&self) -> &JordanStarIso {
        &self.jordan
    }

    pub fn domain(&self) -> &Signature {
        self.jordan.domain()
    }

    pub fn codomain(&self) -> &Signature {
        self.jordan.codomain()
    }

    /// `u (P J(a) + (I − P) J(a)*)`.
    pub fn apply(&self, a: &Element) -> Element {
        let j = self.jordan.apply(a).expect("argument in the domain");
        let inner = &self.projection.apply(&j) + &self.projection.complement().apply(&j.adjoint());
        &self.u * &inner
    }

    /// Same certificate with `J` phase-canonicalized.
    pub fn canonicalized(&self) -> Self {
        IsometryCertificate { jordan: self.jordan.canonicalized(), ..self.clone() }
    }

    /// Compares two certificates: `None` unless the projections agree
    /// exactly and the Jordan maps share perm and flags; otherwise the
    /// largest entrywise deviation of `u` and of the canonical unitaries.
    pub fn distance(&self, other: &Self) -> Option<(f64, f64)> {
        if self.projection != other.projection {
            return None;
        }
        let dj = self.jordan.canonicalized().unitary_distance(&other.jordan.canonicalized())?;
        Some((self.u.max_abs_diff(&other.u), dj))
    }
}

/// Matrix of the canonical-form map of `cert`, assembled column by column.
pub fn build_isometry(cert: &IsometryCertificate) -> RealLinearMap {
    RealLinearMap::from_fn(cert.domain(), cert.codomain(), |a| cert.apply(a))
}

/// Stage of the decomposition at which a map was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureStage {
    IncompatibleSignatures,
    NotUnitaryAtIdentity,
    NotSymmetry,
    NotCentral,
    JordanCheckFailed(&'static str),
}

impl fmt::Display for FailureStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureStage::IncompatibleSignatures => f.write_str("IncompatibleSignatures"),
            FailureStage::NotUnitaryAtIdentity => f.write_str("NotUnitaryAtIdentity"),
            FailureStage::NotSymmetry => f.write_str("NotSymmetry"),
            FailureStage::NotCentral => f.write_str("NotCentral"),
            FailureStage::JordanCheckFailed(sub) => write!(f, "JordanCheckFailed({sub})"),
        }
    }
}

impl FailureStage {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "IncompatibleSignatures" => FailureStage::IncompatibleSignatures,
            "NotUnitaryAtIdentity" => FailureStage::NotUnitaryAtIdentity,
            "NotSymmetry" => FailureStage::NotSymmetry,
            "NotCentral" => FailureStage::NotCentral,
            other => {
                let sub = other.strip_prefix("JordanCheckFailed(")?.strip_suffix(')')?;
                FailureStage::JordanCheckFailed(subcheck_name(sub)?)
            }
        })
    }
}

fn subcheck_name(s: &str) -> Option<&'static str> {
    [
        jordan::CHECK_COMPLEX_LINEAR,
        jordan::CHECK_UNITAL,
        jordan::CHECK_STAR,
        jordan::CHECK_JORDAN,
        jordan::CHECK_BIJECTIVE,
        "block_structure",
        "orientation",
        "unitary",
        "reconstruction",
    ]
    .into_iter()
    .find(|&n| n == s)
}

/// Negative certificate: the first structural check that failed.
#[derive(Clone, Copy, Debug, Error, PartialEq)]
#[error("decomposition failed at {stage} (residual {residual:e})")]
pub struct DecomposeFailure {
    pub stage: FailureStage,
    pub residual: f64,
}

/// `a ↦ u* L(a)` for `u = L(I)`, after checking that `u` is unitary.
pub fn normalize(map: &RealLinearMap, tol: f64) -> Result<RealLinearMap, DecomposeFailure> {
    let u = map.apply(&Element::identity(map.domain()));
    let defect = u.unitary_defect();
    if !(defect <= tol) {
        return Err(DecomposeFailure { stage: FailureStage::NotUnitaryAtIdentity, residual: defect });
    }
    let u_adj = u.adjoint();
    Ok(RealLinearMap::from_fn(map.domain(), map.codomain(), |a| &u_adj * &map.apply(a)))
}

/// Recovers `(u, P, J)` from a real-linear map, running the structural
/// checks in order and stopping at the first failure:
///
/// 1. `u = L(I)` must be unitary;
/// 2. `T₀ = u* L`;
/// 3. `s = −i T₀(iI)` must be a symmetry;
/// 4. `P = (s + I)/2` must be a central projection;
/// 5. `J = P T₀(·) + (I − P) T₀(·)*` must be a Jordan *-isomorphism;
/// 6. `J` is factored into structured form, and the rebuilt map must match
///    `L` within `10·tol` entrywise.
pub fn decompose_isometry(map: &RealLinearMap, tol: f64) -> Result<IsometryCertificate, DecomposeFailure> {
    let (dom, cod) = (map.domain(), map.codomain());
    if dom.real_dim() != cod.real_dim() {
        return Err(DecomposeFailure {
            stage: FailureStage::IncompatibleSignatures,
            residual: dom.real_dim().abs_diff(cod.real_dim()) as f64,
        });
    }

    let u = map.apply(&Element::identity(dom));
    let t0 = normalize(map, tol)?;

    let s = t0.apply(&Element::scalar(dom, I)).scale(-I);
    let id = Element::identity(cod);
    let sym = s.distance(&s.adjoint()).max((&(&s * &s) - &id).op_norm());
    if !(sym <= tol) {
        return Err(DecomposeFailure { stage: FailureStage::NotSymmetry, residual: sym });
    }

    let p_elem = (&s + &id).scale_real(0.5);
    let projection = match p_elem.is_central_projection(tol) {
        Ok(p) => p,
        Err(crate::algebra::AlgebraError::NotCentralProjection { residual, .. }) => {
            return Err(DecomposeFailure { stage: FailureStage::NotCentral, residual })
        }
        Err(_) => unreachable!("is_central_projection only reports NotCentralProjection"),
    };

    let complement = projection.complement();
    let jmap = RealLinearMap::from_fn(dom, cod, |a| {
        let t = t0.apply(a);
        &projection.apply(&t) + &complement.apply(&t.adjoint())
    });
    let report = jordan::verify_jordan_star_iso(&jmap, tol);
    if let Some(c) = report.first_failure() {
        return Err(DecomposeFailure { stage: FailureStage::JordanCheckFailed(c.name), residual: c.value });
    }
    let jordan = jordan::factor_jordan_iso(&jmap, tol).map_err(|e| match e {
        JordanError::NotJordanIso { check, residual } => {
            DecomposeFailure { stage: FailureStage::JordanCheckFailed(check), residual }
        }
        JordanError::AmbiguousBlock { direct, transpose, .. } => {
            DecomposeFailure { stage: FailureStage::JordanCheckFailed("orientation"), residual: direct.min(transpose) }
        }
        other => unreachable!("factoring a verified map cannot fail with {other}"),
    })?;

    let cert = IsometryCertificate { u, projection, jordan };
    let residual = build_isometry(&cert).max_abs_diff(map);
    if !(residual <= 10.0 * tol) {
        return Err(DecomposeFailure { stage: FailureStage::JordanCheckFailed("reconstruction"), residual });
    }
    Ok(cert)
}

/// Reconstructs the real-linear extension of a map known only on the
/// invertible group.
///
/// For each real basis element `e`, `e + λI` is invertible when
/// `λ = 2(‖e‖ + 1)`, so the column is `f(e + λI) − λ f(I)`. The same column
/// is recomputed with `λ + 1`; a disagreement beyond `tol` means no
/// real-linear extension exists.
pub fn extend_black_box<F>(f: F, domain: &Signature, tol: f64) -> Result<RealLinearMap, IsometryError>
where
    F: Fn(&Element) -> Element + Sync + Send,
{
    let id = Element::identity(domain);
    let f_id = f(&id);
    let codomain = f_id.signature().clone();
    let columns = Execution::default().map(domain.real_dim(), |k| {
        let e = Element::real_basis(domain, k);
        let lambda = 2.0 * (e.op_norm() + 1.0);
        let column = |l: f64| -> Result<Element, IsometryError> {
            let image = f(&(&e + &id.scale_real(l)));
            if image.signature() != &codomain {
                return Err(IsometryError::CodomainMismatch {
                    expected: codomain.clone(),
                    found: image.signature().clone(),
                });
            }
            Ok(&image - &f_id.scale_real(l))
        };
        let first = column(lambda)?;
        let second = column(lambda + 1.0)?;
        let residual = first.max_abs_diff(&second);
        if !(residual <= tol) {
            return Err(IsometryError::InconsistentExtension { column: k, residual });
        }
        Ok(first.to_real_coords())
    });
    let columns = columns.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(RealLinearMap::from_entries(domain, &codomain, |i, j| columns[j][i]))
}

/// Trial count, seed, tolerance and execution mode of a sampled check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialPlan {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub execution: Execution,
}

impl TrialPlan {
    pub fn new(trials: usize, seed: u64, tol: f64) -> Self {
        TrialPlan { trials, seed, tol, execution: Execution::default() }
    }

    pub fn with_execution(self, execution: Execution) -> Self {
        TrialPlan { execution, ..self }
    }

    fn rng(&self, trial: usize) -> SplitMix64 {
        SplitMix64::derived(self.seed, trial as u64)
    }
}

pub const CHECK_TRIPLE: &str = "triple";
pub const CHECK_STAR: &str = "star";
pub const CHECK_ABA: &str = "aba";
pub const CHECK_SQUARE: &str = "square";
pub const CHECK_SYMMETRY_SQUARE: &str = "symmetry_square";
pub const CHECK_SYMMETRY_STAR: &str = "symmetry_star";
pub const CHECK_METRIC: &str = "metric";
pub const CHECK_NORM: &str = "norm";

/// Jordan triple identity `L(ab*c + cb*a) = L(a)L(b)*L(c) + L(c)L(b)*L(a)`
/// over random triples.
pub fn verify_triple_identity(map: &RealLinearMap, plan: &TrialPlan) -> Report {
    let dom = map.domain();
    let residual = plan.execution.max(plan.trials, |t| {
        let mut rng = plan.rng(t);
        let a = Element::random_ginibre(dom, &mut rng);
        let b = Element::random_ginibre(dom, &mut rng);
        let c = Element::random_ginibre(dom, &mut rng);
        triple_residual(map, &a, &b, &c)
    });
    Report::new(vec![Check::at_most(CHECK_TRIPLE, residual, plan.tol)])
}

fn triple_residual(map: &RealLinearMap, a: &Element, b: &Element, c: &Element) -> f64 {
    let bs = b.adjoint();
    let lhs = map.apply(&(&(&(a * &bs) * c) + &(&(c * &bs) * a)));
    let (la, lbs, lc) = (map.apply(a), map.apply(b).adjoint(), map.apply(c));
    let rhs = &(&(&la * &lbs) * &lc) + &(&(&lc * &lbs) * &la);
    lhs.distance(&rhs)
}

fn require_normalized(map: &RealLinearMap, tol: f64) -> Result<(), IsometryError> {
    let residual = map.apply(&Element::identity(map.domain())).distance(&Element::identity(map.codomain()));
    if residual <= tol {
        Ok(())
    } else {
        Err(IsometryError::NotNormalized { residual })
    }
}

/// For a unital map: `L(a*) = L(a)*`, `L(aba) = L(a)L(b)L(a)` and
/// `L(a²) = L(a)²` over random pairs.
pub fn verify_star_square(map: &RealLinearMap, plan: &TrialPlan) -> Result<Report, IsometryError> {
    require_normalized(map, plan.tol)?;
    let dom = map.domain();
    let residuals = plan.execution.map(plan.trials, |t| {
        let mut rng = plan.rng(t);
        let a = Element::random_ginibre(dom, &mut rng);
        let b = Element::random_ginibre(dom, &mut rng);
        let (la, lb) = (map.apply(&a), map.apply(&b));
        let star = map.apply(&a.adjoint()).distance(&la.adjoint());
        let aba = map.apply(&(&(&a * &b) * &a)).distance(&(&(&la * &lb) * &la));
        let square = map.apply(&(&a * &a)).distance(&(&la * &la));
        [star, aba, square]
    });
    let max = |k: usize| residuals.iter().map(|r| r[k]).fold(0.0, crate::exec::f64_max);
    Ok(Report::new(vec![
        Check::at_most(CHECK_STAR, max(0), plan.tol),
        Check::at_most(CHECK_ABA, max(1), plan.tol),
        Check::at_most(CHECK_SQUARE, max(2), plan.tol),
    ]))
}

/// For a unital map: images of symmetries (`s = s*`, `s² = I`) are
/// symmetries. Runs `I`, `−I` and `trials` random symmetries.
pub fn symmetry_correspondence_check(map: &RealLinearMap, plan: &TrialPlan) -> Result<Report, IsometryError> {
    require_normalized(map, plan.tol)?;
    let (dom, cod) = (map.domain(), map.codomain());
    let id = Element::identity(cod);
    let residuals = plan.execution.map(plan.trials + 2, |t| {
        let s = match t {
            0 => Element::identity(dom),
            1 => Element::scalar(dom, Complex64::new(-1.0, 0.0)),
            _ => Element::sample_symmetry(dom, &mut plan.rng(t - 2)),
        };
        let ls = map.apply(&s);
        [(&(&ls * &ls) - &id).op_norm(), ls.distance(&ls.adjoint())]
    });
    let max = |k: usize| residuals.iter().map(|r| r[k]).fold(0.0, crate::exec::f64_max);
    Ok(Report::new(vec![
        Check::at_most(CHECK_SYMMETRY_SQUARE, max(0), plan.tol),
        Check::at_most(CHECK_SYMMETRY_STAR, max(1), plan.tol),
    ]))
}

/// Distance preservation on random pairs of invertibles, and norm
/// preservation on random singular elements.
pub fn isometry_spot_check(map: &RealLinearMap, plan: &TrialPlan) -> Report {
    let dom = map.domain();
    let residuals = plan.execution.map(plan.trials, |t| {
        let mut rng = plan.rng(t);
        let a = Element::sample_invertible(dom, &mut rng);
        let b = Element::sample_invertible(dom, &mut rng);
        let metric = (map.apply(&a).distance(&map.apply(&b)) - a.distance(&b)).abs();
        // rank-deficient in every block: drop the first column
        let x = Element::random_ginibre(dom, &mut rng).map_blocks(|m| {
            let mut m = m.clone();
            m.set_column(0, &vec![Complex64::new(0.0, 0.0); m.rows()]);
            m
        });
        let norm = (map.apply(&x).op_norm() - x.op_norm()).abs();
        [metric, norm]
    });
    let max = |k: usize| residuals.iter().map(|r| r[k]).fold(0.0, crate::exec::f64_max);
    Report::new(vec![Check::at_most(CHECK_METRIC, max(0), plan.tol), Check::at_most(CHECK_NORM, max(1), plan.tol)])
}

/// The four shapes of a surjective isometry of `M_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BhForm {
    /// `a ↦ u w a w*`
    Conjugation,
    /// `a ↦ u w a* w*`
    AdjointForm,
    /// `a ↦ u w aᵀ w*`
    TransposeForm,
    /// `a ↦ u w ā w*`
    BarForm,
}

impl BhForm {
    pub const ALL: [BhForm; 4] = [BhForm::Conjugation, BhForm::AdjointForm, BhForm::TransposeForm, BhForm::BarForm];

    /// 1-based position in the list of forms.
    pub fn number(self) -> usize {
        match self {
            BhForm::Conjugation => 1,
            BhForm::AdjointForm => 2,
            BhForm::TransposeForm => 3,
            BhForm::BarForm => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BhForm::Conjugation => "Conjugation",
            BhForm::AdjointForm => "AdjointForm",
            BhForm::TransposeForm => "TransposeForm",
            BhForm::BarForm => "BarForm",
        }
    }

    /// `a`, `a*`, `aᵀ` or `ā`.
    pub fn inner(self, a: &ComplexMatrix) -> ComplexMatrix {
        match self {
            BhForm::Conjugation => a.clone(),
            BhForm::AdjointForm => a.adjoint(),
            BhForm::TransposeForm => a.transpose(),
            BhForm::BarForm => a.conj(),
        }
    }

    /// `u w inner(a) w*`.
    pub fn apply(self, u: &ComplexMatrix, w: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
        &(&(u * w) * &self.inner(a)) * &w.adjoint()
    }

    /// The form as a real-linear map on `M_n`.
    pub fn to_real_linear_map(self, u: &ComplexMatrix, w: &ComplexMatrix) -> RealLinearMap {
        let sig = Signature::new(vec![u.rows()]).expect("positive dimension");
        RealLinearMap::from_fn(&sig, &sig, |a| {
            Element::new(sig.clone(), vec![self.apply(u, w, a.block(0))]).expect("square block")
        })
    }
}

impl fmt::Display for BhForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BhClassification {
    pub form: BhForm,
    pub u: ComplexMatrix,
    pub w: ComplexMatrix,
}

/// Classifies a surjective isometry of `M_n` into one of the four forms.
/// The center of `M_n` is trivial, so `P` is `0` or `I`.
pub fn classify_bh(map: &RealLinearMap, tol: f64) -> Result<BhClassification, IsometryError> {
    if map.domain().num_blocks() != 1 || map.codomain().num_blocks() != 1 {
        return Err(IsometryError::NotSingleBlock { domain: map.domain().clone(), codomain: map.codomain().clone() });
    }
    let cert = decompose_isometry(map, tol)?;
    let form = match (cert.projection.flags()[0], cert.jordan.flags()[0]) {
        (true, Orientation::Direct) => BhForm::Conjugation,
        (false, Orientation::Direct) => BhForm::AdjointForm,
        (true, Orientation::Transpose) => BhForm::TransposeForm,
        (false, Orientation::Transpose) => BhForm::BarForm,
    };
    Ok(BhClassification { form, u: cert.u.block(0).clone(), w: cert.jordan.unitaries()[0].clone() })
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

    fn plain_cert(s: &Signature, flags: Vec<bool>) -> IsometryCertificate {
        IsometryCertificate::new(
            Element::identity(s),
            CentralProjection::new(s.clone(), flags).unwrap(),
            JordanStarIso::identity(s),
        )
        .unwrap()
    }

    #[test]
    fn build_examples() {
        let s = sig(&[2, 1]);
        assert_eq!(build_isometry(&IsometryCertificate::identity(&s)), RealLinearMap::identity(&s));

        let s1 = sig(&[1]);
        assert_eq!(build_isometry(&plain_cert(&s1, vec![false])), RealLinearMap::from_fn(&s1, &s1, Element::conj));

        let s11 = sig(&[1, 1]);
        let map = build_isometry(&plain_cert(&s11, vec![false, true]));
        let x = Element::new(
            s11.clone(),
            vec![ComplexMatrix::diagonal(&[c(1., 2.)]), ComplexMatrix::diagonal(&[c(3., 4.)])],
        )
        .unwrap();
        let expect =
            Element::new(s11, vec![ComplexMatrix::diagonal(&[c(1., -2.)]), ComplexMatrix::diagonal(&[c(3., 4.)])])
                .unwrap();
        assert_eq!(map.apply(&x), expect);
    }

    #[test]
    fn certificate_validation() {
        let s = sig(&[2]);
        let bad_u = Element::identity(&s).scale_real(2.0);
        let err = IsometryCertificate::new(bad_u, CentralProjection::full(&s), JordanStarIso::identity(&s));
        assert!(matches!(err, Err(IsometryError::InvalidCertificate(_))));
        let wrong_sig = CentralProjection::full(&sig(&[1, 1]));
        let err = IsometryCertificate::new(Element::identity(&s), wrong_sig, JordanStarIso::identity(&s));
        assert!(matches!(err, Err(IsometryError::InvalidCertificate(_))));
    }

    #[test]
    fn built_maps_send_invertibles_to_invertibles() {
        let s = sig(&[1, 2]);
        let c = IsometryCertificate::random(&s, &s, 8).unwrap();
        let map = build_isometry(&c);
        for seed in 0..5 {
            assert!(map.apply(&Element::random_invertible(&s, seed)).is_invertible());
        }
    }

    #[test]
    fn decompose_identity_on_scalars() {
        let s = sig(&[1]);
        let cert = decompose_isometry(&RealLinearMap::identity(&s), 1e-9).unwrap();
        assert_eq!(cert.projection().flags(), &[true]);
        assert_eq!(cert.u(), &Element::identity(&s));
        assert_eq!(cert.jordan(), &JordanStarIso::identity(&s));
    }

    #[test]
    fn decompose_conjugations() {
        let s = sig(&[1]);
        let cert = decompose_isometry(&RealLinearMap::from_fn(&s, &s, Element::conj), 1e-9).unwrap();
        assert_eq!(cert.projection().flags(), &[false]);
        assert_eq!(cert.jordan(), &JordanStarIso::identity(&s));

        let s11 = sig(&[1, 1]);
        let map = build_isometry(&plain_cert(&s11, vec![false, true]));
        let cert = decompose_isometry(&map, 1e-9).unwrap();
        assert_eq!(cert.projection().flags(), &[false, true]);
        assert_eq!(cert.u(), &Element::identity(&s11));
        assert_eq!(cert.jordan(), &JordanStarIso::identity(&s11));
    }

    #[test]
    fn decompose_roundtrip_seed_3() {
        let s = sig(&[2, 2]);
        let c = IsometryCertificate::random(&s, &s, 3).unwrap();
        let back = decompose_isometry(&build_isometry(&c), 1e-9).unwrap();
        let (du, dj) = back.distance(&c).expect("same P, perm and flags");
        assert!(du <= 1e-10, "{du}");
        assert!(dj <= 1e-9, "{dj}");
    }

    #[test]
    fn decompose_rejects_stages() {
        let s = sig(&[2]);
        let twice = RealLinearMap::from_fn(&s, &s, |x| x.scale_real(2.0));
        assert_eq!(decompose_isometry(&twice, 1e-9).unwrap_err().stage, FailureStage::NotUnitaryAtIdentity);

        // unital, but T₀(iI) = iI·diag(1, −1) is not i times a central symmetry
        let d = Element::new(s.clone(), vec![ComplexMatrix::diagonal(&[c(1., 0.), c(-1., 0.)])]).unwrap();
        let skew = RealLinearMap::from_fn(&s, &s, |x| {
            let re = x.block(0).map(|z| c(z.re, 0.0));
            let im = x.block(0).map(|z| c(z.im, 0.0));
            let re = Element::new(s.clone(), vec![re]).unwrap();
            let im = Element::new(s.clone(), vec![im]).unwrap();
            &re + &(&d * &im).scale(c(0., 1.))
        });
        let f = decompose_isometry(&skew, 1e-9).unwrap_err();
        assert_eq!(f.stage, FailureStage::NotCentral);
        assert!(f.residual > 1e-9);

        // a ↦ a + i·Im-part twist: T₀(iI) = 2iI, s = 2I is no symmetry
        let stretch = RealLinearMap::from_fn(&s, &s, |x| {
            let re = Element::new(s.clone(), vec![x.block(0).map(|z| c(z.re, 0.0))]).unwrap();
            let im = Element::new(s.clone(), vec![x.block(0).map(|z| c(0.0, 2.0 * z.im))]).unwrap();
            &re + &im
        });
        assert_eq!(decompose_isometry(&stretch, 1e-9).unwrap_err().stage, FailureStage::NotSymmetry);

        let other = sig(&[1]);
        let mismatch = RealLinearMap::from_entries(&s, &other, |_, _| 0.0);
        assert_eq!(decompose_isometry(&mismatch, 1e-9).unwrap_err().stage, FailureStage::IncompatibleSignatures);
    }

    #[test]
    fn decompose_rejects_unital_non_jordan() {
        // x ↦ xᵀ on the first row only breaks multiplicativity while keeping
        // L(I) = I and T₀(iI) = iI
        let s = sig(&[2]);
        let map = RealLinearMap::from_fn(&s, &s, |x| {
            let m = x.block(0);
            let mut out = m.clone();
            out[(0, 1)] = m[(1, 0)];
            out[(1, 0)] = m[(1, 0)];
            Element::new(s.clone(), vec![out]).unwrap()
        });
        let f = decompose_isometry(&map, 1e-9).unwrap_err();
        assert!(matches!(f.stage, FailureStage::JordanCheckFailed(_)), "{f}");
    }

    #[test]
    fn failure_stage_names_roundtrip() {
        for stage in [
            FailureStage::IncompatibleSignatures,
            FailureStage::NotUnitaryAtIdentity,
            FailureStage::NotSymmetry,
            FailureStage::NotCentral,
            FailureStage::JordanCheckFailed("jordan"),
            FailureStage::JordanCheckFailed("reconstruction"),
        ] {
            assert_eq!(FailureStage::parse(&stage.to_string()), Some(stage));
        }
        assert_eq!(FailureStage::parse("JordanCheckFailed(nope)"), None);
        assert_eq!(FailureStage::JordanCheckFailed("star").to_string(), "JordanCheckFailed(star)");
    }

    #[test]
    fn extend_identity_and_built_map() {
        let s = sig(&[1, 2]);
        let ext = extend_black_box(|a: &Element| a.clone(), &s, 1e-10).unwrap();
        assert!(ext.max_abs_diff(&RealLinearMap::identity(&s)) <= 1e-12);

        let c = IsometryCertificate::random(&s, &s, 21).unwrap();
        let built = build_isometry(&c);
        let f = |a: &Element| {
            assert!(a.is_invertible());
            c.apply(a)
        };
        let ext = extend_black_box(f, &s, 1e-10).unwrap();
        assert!(ext.max_abs_diff(&built) <= 1e-10);
    }

    #[test]
    fn extend_rejects_quadratic_term() {
        let s = sig(&[2]);
        let f = |a: &Element| a + &(a * a).scale_real(1e-3);
        let err = extend_black_box(f, &s, 1e-10).unwrap_err();
        match err {
            IsometryError::InconsistentExtension { residual, .. } => assert!(residual > 1e-4),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn triple_identity_at_unit_triple() {
        let s = sig(&[2, 1]);
        let map = build_isometry(&IsometryCertificate::random(&s, &s, 4).unwrap());
        let id = Element::identity(&s);
        assert!(triple_residual(&map, &id, &id, &id) <= 1e-12);
        let report = verify_triple_identity(&RealLinearMap::identity(&s), &TrialPlan::new(20, 0, 1e-12));
        assert_eq!(report.checks[0].value, 0.0);
    }

    #[test]
    fn triple_identity_fails_for_non_isometry() {
        let s = sig(&[2]);
        let twice = RealLinearMap::from_fn(&s, &s, |x| x.scale_real(2.0));
        assert!(!verify_triple_identity(&twice, &TrialPlan::new(5, 0, 1e-9)).passed());
    }

    #[test]
    fn star_square_examples() {
        let s = sig(&[2]);
        let r = verify_star_square(&RealLinearMap::identity(&s), &TrialPlan::new(20, 1, 1e-12)).unwrap();
        assert!(r.passed() && r.max_value() == 0.0);
        let s1 = sig(&[1]);
        let conj = RealLinearMap::from_fn(&s1, &s1, Element::conj);
        assert!(verify_star_square(&conj, &TrialPlan::new(20, 1, 1e-12)).unwrap().passed());

        let c = IsometryCertificate::random(&s, &s, 5).unwrap();
        let err = verify_star_square(&build_isometry(&c), &TrialPlan::new(5, 1, 1e-9));
        assert!(matches!(err, Err(IsometryError::NotNormalized { .. })));
    }

    #[test]
    fn symmetry_correspondence_on_identity() {
        let s = sig(&[1, 2]);
        let r = symmetry_correspondence_check(&RealLinearMap::identity(&s), &TrialPlan::new(10, 0, 1e-9)).unwrap();
        assert!(r.passed(), "{r}");
        let twice = RealLinearMap::from_fn(&s, &s, |x| x.scale_real(2.0));
        assert!(symmetry_correspondence_check(&twice, &TrialPlan::new(10, 0, 1e-9)).is_err());
    }

    #[test]
    fn spot_check_identity_is_exact() {
        let s = sig(&[3]);
        let r = isometry_spot_check(&RealLinearMap::identity(&s), &TrialPlan::new(20, 0, 1e-12));
        assert_eq!(r.max_value(), 0.0);
    }

    #[test]
    fn spot_check_catches_perturbation() {
        let s = sig(&[2]);
        let mut rng = SplitMix64::new(77);
        let noisy = RealLinearMap::identity(&s).perturbed(|| 1e-3 * rng.normal());
        let r = isometry_spot_check(&noisy, &TrialPlan::new(100, 0, 1e-9));
        assert!(!r.passed());
        assert!(r.get(CHECK_METRIC).unwrap().value >= 1e-4, "{r}");
    }

    #[test]
    fn classify_examples() {
        let s = sig(&[2]);
        let id = classify_bh(&RealLinearMap::identity(&s), 1e-9).unwrap();
        assert_eq!(id.form, BhForm::Conjugation);
        assert!(id.w.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(id.u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let t = classify_bh(&RealLinearMap::from_fn(&s, &s, Element::transpose), 1e-9).unwrap();
        assert_eq!(t.form, BhForm::TransposeForm);
        assert!(t.w.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let id2 = ComplexMatrix::identity(2);
        for form in BhForm::ALL {
            let got = classify_bh(&form.to_real_linear_map(&id2, &id2), 1e-9).unwrap();
            assert_eq!(got.form, form);
        }

        assert!(matches!(
            classify_bh(&RealLinearMap::identity(&sig(&[1, 1])), 1e-9),
            Err(IsometryError::NotSingleBlock { .. })
        ));
    }

    #[test]
    fn four_forms_separate_test_matrix() {
        let a = ComplexMatrix::from_rows(&[vec![c(1., 0.), c(0., 1.)], vec![c(0., 0.), c(0., 0.)]]);
        let id = ComplexMatrix::identity(2);
        let images: Vec<ComplexMatrix> = BhForm::ALL.iter().map(|f| f.apply(&id, &id, &a)).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(images[i].max_abs_diff(&images[j]) >= 1.0, "forms {i} and {j} coincide");
            }
        }
    }
}
