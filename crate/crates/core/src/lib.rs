//! Surjective isometries between the invertible groups of finite-dimensional
//! C*-algebras `M_{n_1} ⊕ … ⊕ M_{n_k}`.
//!
//! Such a map is the restriction of a real-linear isometry
//! `T(a) = u P J(a) + u (I − P) J(a)*` with `u` unitary, `P` a central
//! projection and `J` a Jordan *-isomorphism. The crate builds these maps
//! from certificates, decomposes arbitrary real matrices back into
//! certificates (or a named failure stage), and verifies the identities
//! involved on random samples.
//!
//! Layers, bottom up: [`linalg`] (dense complex matrices), [`algebra`]
//! (block-diagonal elements), [`jordan`] (Jordan *-isomorphisms),
//! [`isometry`] (certificates and checks) and [`json`] (interchange).

// `!(x <= tol)` is used on purpose: it also rejects NaN residuals.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod exec;
pub mod isometry;
pub mod jordan;
pub mod json;
pub mod linalg;
pub mod real_map;
pub mod report;
pub mod rng;

pub use algebra::{CentralProjection, Element, Signature};
pub use exec::Execution;
pub use isometry::{
    build_isometry, classify_bh, decompose_isometry, extend_black_box, isometry_spot_check,
    symmetry_correspondence_check, verify_star_square, verify_triple_identity, BhClassification, BhForm,
    DecomposeFailure, FailureStage, IsometryCertificate, IsometryError, TrialPlan,
};
pub use jordan::{factor_jordan_iso, random_jordan_iso, verify_jordan_star_iso, JordanStarIso, Orientation};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64;
pub use real_map::RealLinearMap;
pub use report::{Check, Report};
pub use rng::SplitMix64;
