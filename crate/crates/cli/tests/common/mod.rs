#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use cstar_isometry::{
    CentralProjection, Complex64, ComplexMatrix, Element, IsometryCertificate, JordanStarIso, Orientation, Signature,
    SplitMix64,
};

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

pub fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cstar-iso"))
        .args(args)
        .stdin(if stdin.is_some() { Stdio::piped() } else { Stdio::null() })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn cstar-iso");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    let out = child.wait_with_output().unwrap();
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn coin(rng: &mut SplitMix64) -> bool {
    rng.normal() > 0.0
}

/// Random permutation matrix with phases in {±1, ±i}: every product and sum
/// the pipeline forms from it is exact in floating point.
fn monomial(n: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let mut cols: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.fork_seed() % (i as u64 + 1)) as usize;
        cols.swap(i, j);
    }
    let phases =
        [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
    let mut m = ComplexMatrix::zeros(n, n);
    for (r, &c) in cols.iter().enumerate() {
        m[(r, c)] = phases[(rng.fork_seed() % 4) as usize];
    }
    m
}

/// Certificate whose build/decompose pipeline involves no rounding.
pub fn exact_certificate(blocks: &[usize], seed: u64) -> IsometryCertificate {
    let sig = Signature::new(blocks.to_vec()).unwrap();
    let mut rng = SplitMix64::new(seed);
    let k = sig.num_blocks();
    let mut perm = vec![0; k];
    for &d in &sig.sorted_blocks() {
        let same: Vec<usize> = (0..k).filter(|&i| sig.blocks()[i] == d).collect();
        let mut targets = same.clone();
        if targets.len() > 1 && coin(&mut rng) {
            targets.rotate_left(1);
        }
        for (i, j) in same.into_iter().zip(targets) {
            perm[i] = j;
        }
    }
    let flags = (0..k).map(|_| if coin(&mut rng) { Orientation::Transpose } else { Orientation::Direct }).collect();
    let unitaries = sig.blocks().iter().map(|&n| monomial(n, &mut rng)).collect();
    let jordan = JordanStarIso::new(sig.clone(), sig.clone(), perm, flags, unitaries).unwrap().canonicalized();
    let u = Element::from_fn(&sig, |_, n| monomial(n, &mut rng));
    let projection = CentralProjection::new(sig.clone(), (0..k).map(|_| coin(&mut rng)).collect()).unwrap();
    IsometryCertificate::new(u, projection, jordan).unwrap()
}
