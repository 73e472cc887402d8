//! JSON interchange formats.
//!
//! ```text
//! signature    {"blocks":[n1,...,nk]}
//! element      {"signature":[n1,...,nk],"blocks":[[[re,im],...],...]}
//! jordan       {"perm":[...],"flags":["direct"|"transpose",...],"unitaries":[matrix,...]}
//! map          {"domain":[...],"codomain":[...],"matrix":[[...],...]}
//! certificate  {"u":element,"P":[bool,...],"J":jordan}
//! failure      {"stage":string,"residual":number}
//! ```
//!
//! A matrix is a flat row-major list of `[re, im]` pairs. Output is compact,
//! newline-terminated and uses shortest round-trip float formatting, with
//! `-0.0` written as `0.0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{CentralProjection, Element, Signature};
use crate::isometry::{BhClassification, DecomposeFailure, FailureStage, IsometryCertificate};
use crate::jordan::{JordanStarIso, Orientation};
use crate::linalg::ComplexMatrix;
use crate::real_map::RealLinearMap;

/// Malformed or inconsistent input; the message names the offending field.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct FormatError(pub String);

impl FormatError {
    fn at(field: &str, msg: impl std::fmt::Display) -> Self {
        FormatError(format!("{field}: {msg}"))
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError(e.to_string())
    }
}

type Pair = [f64; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureJson {
    pub blocks: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub signature: Vec<usize>,
    pub blocks: Vec<Vec<Pair>>,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "lowercase")]
pub enum FlagJson {
    Direct,
    Transpose,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JordanJson {
    pub perm: Vec<usize>,
    pub flags: Vec<FlagJson>,
    pub unitaries: Vec<Vec<Pair>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    pub domain: Vec<usize>,
    pub codomain: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub u: ElementJson,
    #[serde(rename = "P")]
    pub p: Vec<bool>,
    #[serde(rename = "J")]
    pub j: JordanJson,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureJson {
    pub stage: String,
    pub residual: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationJson {
    pub form: String,
    pub number: usize,
    pub u: Vec<Pair>,
    pub w: Vec<Pair>,
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if x.is_finite() {
        x
    } else {
        f64::MAX.copysign(x)
    }
}

fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<Pair> {
    m.as_slice().iter().map(|z| [clean(z.re), clean(z.im)]).collect()
}

fn pairs_to_matrix(field: &str, pairs: &[Pair], n: usize) -> Result<ComplexMatrix, FormatError> {
    if pairs.len() != n * n {
        return Err(FormatError::at(
            field,
            format!("expected {} entries for a {n}x{n} block, got {}", n * n, pairs.len()),
        ));
    }
    let data = pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    Ok(ComplexMatrix::from_vec(n, n, data).expect("length checked"))
}

fn square_side(field: &str, len: usize) -> Result<usize, FormatError> {
    let n = (len as f64).sqrt().round() as usize;
    if n == 0 || n * n != len {
        return Err(FormatError::at(field, format!("{len} entries do not form a square matrix")));
    }
    Ok(n)
}

fn signature(field: &str, blocks: &[usize]) -> Result<Signature, FormatError> {
    Signature::new(blocks.to_vec()).map_err(|e| FormatError::at(field, e))
}

fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serializes");
    s.push('\n');
    s
}

impl From<&Signature> for SignatureJson {
    fn from(s: &Signature) -> Self {
        SignatureJson { blocks: s.blocks().to_vec() }
    }
}

impl SignatureJson {
    pub fn decode(&self) -> Result<Signature, FormatError> {
        signature("blocks", &self.blocks)
    }
}

impl From<&Element> for ElementJson {
    fn from(x: &Element) -> Self {
        ElementJson {
            signature: x.signature().blocks().to_vec(),
            blocks: x.blocks().iter().map(matrix_to_pairs).collect(),
        }
    }
}

impl ElementJson {
    pub fn decode(&self, field: &str) -> Result<Element, FormatError> {
        let sig = signature(&format!("{field}.signature"), &self.signature)?;
        if self.blocks.len() != sig.num_blocks() {
            return Err(FormatError::at(
                &format!("{field}.blocks"),
                format!("expected {} blocks, got {}", sig.num_blocks(), self.blocks.len()),
            ));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(sig.blocks())
            .enumerate()
            .map(|(b, (pairs, &n))| pairs_to_matrix(&format!("{field}.blocks[{b}]"), pairs, n))
            .collect::<Result<_, _>>()?;
        Ok(Element::new(sig, blocks).expect("shapes checked"))
    }
}

impl From<&JordanStarIso> for JordanJson {
    fn from(j: &JordanStarIso) -> Self {
        JordanJson {
            perm: j.perm().to_vec(),
            flags: j
                .flags()
                .iter()
                .map(|f| match f {
                    Orientation::Direct => FlagJson::Direct,
                    Orientation::Transpose => FlagJson::Transpose,
                })
                .collect(),
            unitaries: j.unitaries().iter().map(matrix_to_pairs).collect(),
        }
    }
}

impl JordanJson {
    /// The domain signature is read off the unitary sizes.
    pub fn decode(&self, field: &str, codomain: &Signature) -> Result<JordanStarIso, FormatError> {
        let dims = self
            .unitaries
            .iter()
            .enumerate()
            .map(|(i, w)| square_side(&format!("{field}.unitaries[{i}]"), w.len()))
            .collect::<Result<Vec<_>, _>>()?;
        let domain = signature(&format!("{field}.unitaries"), &dims)?;
        let unitaries = self
            .unitaries
            .iter()
            .zip(&dims)
            .enumerate()
            .map(|(i, (w, &n))| pairs_to_matrix(&format!("{field}.unitaries[{i}]"), w, n))
            .collect::<Result<Vec<_>, _>>()?;
        let flags = self
            .flags
            .iter()
            .map(|f| match f {
                FlagJson::Direct => Orientation::Direct,
                FlagJson::Transpose => Orientation::Transpose,
            })
            .collect();
        JordanStarIso::new(domain, codomain.clone(), self.perm.clone(), flags, unitaries)
            .map_err(|e| FormatError::at(field, e))
    }
}

impl From<&RealLinearMap> for MapJson {
    fn from(m: &RealLinearMap) -> Self {
        MapJson {
            domain: m.domain().blocks().to_vec(),
            codomain: m.codomain().blocks().to_vec(),
            matrix: m.row_vecs().into_iter().map(|row| row.into_iter().map(clean).collect()).collect(),
        }
    }
}

impl MapJson {
    pub fn decode(&self) -> Result<RealLinearMap, FormatError> {
        let domain = signature("domain", &self.domain)?;
        let codomain = signature("codomain", &self.codomain)?;
        if let Some(i) = self.matrix.iter().flatten().position(|v| !v.is_finite()) {
            return Err(FormatError::at("matrix", format!("entry {i} is not finite")));
        }
        RealLinearMap::new(domain, codomain, self.matrix.clone()).map_err(|e| FormatError::at("matrix", e))
    }
}

impl From<&IsometryCertificate> for CertificateJson {
    fn from(c: &IsometryCertificate) -> Self {
        CertificateJson { u: c.u().into(), p: c.projection().flags().to_vec(), j: c.jordan().into() }
    }
}

impl CertificateJson {
    pub fn decode(&self) -> Result<IsometryCertificate, FormatError> {
        let u = self.u.decode("u")?;
        let p = CentralProjection::new(u.signature().clone(), self.p.clone()).map_err(|e| FormatError::at("P", e))?;
        let j = self.j.decode("J", u.signature())?;
        IsometryCertificate::new(u, p, j).map_err(|e| FormatError(e.to_string()))
    }
}

impl From<&DecomposeFailure> for FailureJson {
    fn from(f: &DecomposeFailure) -> Self {
        FailureJson { stage: f.stage.to_string(), residual: clean(f.residual) }
    }
}

impl FailureJson {
    pub fn decode(&self) -> Result<DecomposeFailure, FormatError> {
        let stage = FailureStage::parse(&self.stage)
            .ok_or_else(|| FormatError::at("stage", format!("unknown stage {:?}", self.stage)))?;
        Ok(DecomposeFailure { stage, residual: self.residual })
    }
}

impl From<&BhClassification> for ClassificationJson {
    fn from(c: &BhClassification) -> Self {
        ClassificationJson {
            form: c.form.name().to_string(),
            number: c.form.number(),
            u: matrix_to_pairs(&c.u),
            w: matrix_to_pairs(&c.w),
        }
    }
}

pub fn encode_signature(s: &Signature) -> String {
    to_string(&SignatureJson::from(s))
}

pub fn decode_signature(text: &str) -> Result<Signature, FormatError> {
    serde_json::from_str::<SignatureJson>(text)?.decode()
}

pub fn encode_element(x: &Element) -> String {
    to_string(&ElementJson::from(x))
}

pub fn decode_element(text: &str) -> Result<Element, FormatError> {
    serde_json::from_str::<ElementJson>(text)?.decode("element")
}

pub fn encode_map(m: &RealLinearMap) -> String {
    to_string(&MapJson::from(m))
}

pub fn decode_map(text: &str) -> Result<RealLinearMap, FormatError> {
    serde_json::from_str::<MapJson>(text)?.decode()
}

pub fn encode_certificate(c: &IsometryCertificate) -> String {
    to_string(&CertificateJson::from(c))
}

pub fn decode_certificate(text: &str) -> Result<IsometryCertificate, FormatError> {
    serde_json::from_str::<CertificateJson>(text)?.decode()
}

pub fn encode_failure(f: &DecomposeFailure) -> String {
    to_string(&FailureJson::from(f))
}

pub fn decode_failure(text: &str) -> Result<DecomposeFailure, FormatError> {
    serde_json::from_str::<FailureJson>(text)?.decode()
}

pub fn encode_classification(c: &BhClassification) -> String {
    to_string(&ClassificationJson::from(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::build_isometry;
    use proptest::prelude::*;

    fn sig(v: &[usize]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    #[test]
    fn element_layout() {
        let s = sig(&[1, 2]);
        let x = Element::real_basis(&s, 3);
        assert_eq!(
            encode_element(&x),
            "{\"signature\":[1,2],\"blocks\":[[[0.0,0.0]],[[0.0,1.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]]]}\n"
        );
        assert_eq!(encode_signature(&s), "{\"blocks\":[1,2]}\n");
        assert_eq!(decode_signature("{\"blocks\":[1,2]}").unwrap(), s);
    }

    #[test]
    fn negative_zero_is_normalized() {
        let s = sig(&[1]);
        let x = Element::scalar(&s, Complex64::new(-0.0, -0.0));
        assert_eq!(encode_element(&x), "{\"signature\":[1],\"blocks\":[[[0.0,0.0]]]}\n");
    }

    #[test]
    fn identity_certificate_text() {
        let c = IsometryCertificate::identity(&sig(&[1]));
        let text = encode_certificate(&c);
        assert_eq!(
            text,
            "{\"u\":{\"signature\":[1],\"blocks\":[[[1.0,0.0]]]},\"P\":[true],\"J\":{\"perm\":[0],\"flags\":[\"direct\"],\"unitaries\":[[[1.0,0.0]]]}}\n"
        );
        assert_eq!(decode_certificate(&text).unwrap(), c);
    }

    #[test]
    fn errors_name_the_field() {
        let e = decode_certificate("{\"u\":{\"signature\":[1],\"blocks\":[[[1.0,0.0]]]},\"P\":[true]}").unwrap_err();
        assert!(e.0.contains("`J`"), "{e}");
        let e = decode_element("{\"signature\":[2],\"blocks\":[[[1.0,0.0]]]}").unwrap_err();
        assert!(e.0.starts_with("element.blocks[0]"), "{e}");
        let e = decode_map("{\"domain\":[1],\"codomain\":[1],\"matrix\":[[1.0]]}").unwrap_err();
        assert!(e.0.starts_with("matrix"), "{e}");
        let e = decode_map("{\"domain\":[],\"codomain\":[1],\"matrix\":[]}").unwrap_err();
        assert!(e.0.starts_with("domain"), "{e}");
        let e = decode_certificate(
            "{\"u\":{\"signature\":[1],\"blocks\":[[[1.0,0.0]]]},\"P\":[true],\"J\":{\"perm\":[0],\"flags\":[\"direct\"],\"unitaries\":[[[1.0,0.0],[0.0,0.0]]]}}",
        )
        .unwrap_err();
        assert!(e.0.starts_with("J.unitaries[0]"), "{e}");
        let e = decode_failure("{\"stage\":\"Nope\",\"residual\":1.0}").unwrap_err();
        assert!(e.0.starts_with("stage"), "{e}");
    }

    #[test]
    fn failure_roundtrip() {
        let f = DecomposeFailure { stage: FailureStage::JordanCheckFailed("jordan"), residual: 0.25 };
        let text = encode_failure(&f);
        assert_eq!(text, "{\"stage\":\"JordanCheckFailed(jordan)\",\"residual\":0.25}\n");
        assert_eq!(decode_failure(&text).unwrap(), f);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn certificates_and_maps_roundtrip_losslessly(seed in any::<u64>(), shape in 0usize..4) {
            let s = sig([&[1][..], &[2], &[1, 2], &[2, 2]][shape]);
            let c = IsometryCertificate::random(&s, &s, seed).unwrap();
            prop_assert_eq!(decode_certificate(&encode_certificate(&c)).unwrap(), c.clone());
            let m = build_isometry(&c);
            prop_assert_eq!(decode_map(&encode_map(&m)).unwrap(), m);
        }
    }
}
