use std::fmt::Write as _;
use std::io::{Read, Write};

use cstar_isometry::isometry::{self, normalize};
use cstar_isometry::{
    json, Check, Execution, IsometryCertificate, RealLinearMap, Report, Signature, SplitMix64, TrialPlan,
};

use crate::{Cli, Command, Common};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

const KNOWN_CHECKS: [&str; 5] = ["triple", "star", "square", "symmetry", "metric"];

/// Unreadable or ill-formed input; maps to exit code 1.
struct Malformed(String);

pub fn run(cli: Cli) -> i32 {
    let common = cli.common;
    if common.tol.is_nan() || common.tol <= 0.0 {
        eprintln!("error: --tol must be positive");
        return EXIT_MALFORMED;
    }
    if common.trials == 0 {
        eprintln!("error: --trials must be at least 1");
        return EXIT_MALFORMED;
    }
    let result = match &cli.command {
        Command::Build { cert } => build(&common, cert),
        Command::Decompose { map } => decompose(&common, map),
        Command::Verify { map, checks } => verify(&common, map, checks),
        Command::Fuzz { signature } => fuzz(&common, signature),
        Command::Classify { map } => classify(&common, map),
    };
    match result {
        Ok(code) => code,
        Err(Malformed(msg)) => {
            eprintln!("error: {msg}");
            EXIT_MALFORMED
        }
    }
}

fn read_input(path: &str) -> Result<String, Malformed> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Malformed(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Malformed(format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn write_output(path: &str, text: &str) -> Result<(), Malformed> {
    if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Malformed(format!("stdout: {e}")))
    } else {
        std::fs::write(path, text).map_err(|e| Malformed(format!("{path}: {e}")))
    }
}

fn read_map(path: &str) -> Result<RealLinearMap, Malformed> {
    json::decode_map(&read_input(path)?).map_err(|e| Malformed(format!("{path}: {e}")))
}

fn build(common: &Common, path: &str) -> Result<i32, Malformed> {
    let cert = json::decode_certificate(&read_input(path)?).map_err(|e| Malformed(format!("{path}: {e}")))?;
    write_output(&common.out, &json::encode_map(&isometry::build_isometry(&cert)))?;
    Ok(EXIT_OK)
}

fn decompose(common: &Common, path: &str) -> Result<i32, Malformed> {
    let map = read_map(path)?;
    match isometry::decompose_isometry(&map, common.tol) {
        Ok(cert) => {
            write_output(&common.out, &json::encode_certificate(&cert))?;
            Ok(EXIT_OK)
        }
        Err(failure) => {
            write_output(&common.out, &json::encode_failure(&failure))?;
            eprintln!("{failure}");
            Ok(EXIT_FAILED)
        }
    }
}

fn verify(common: &Common, path: &str, checks: &[String]) -> Result<i32, Malformed> {
    if let Some(bad) = checks.iter().find(|c| !KNOWN_CHECKS.contains(&c.as_str())) {
        return Err(Malformed(format!("checks: unknown check {bad:?} (expected one of {})", KNOWN_CHECKS.join(","))));
    }
    let map = read_map(path)?;
    let plan = TrialPlan::new(common.trials, common.seed, common.tol);
    let wants = |name: &str| checks.iter().any(|c| c == name);

    let mut report = Report::default();
    if wants("triple") {
        report.extend(isometry::verify_triple_identity(&map, &plan));
    }
    if wants("star") || wants("square") || wants("symmetry") {
        match normalize(&map, common.tol) {
            Ok(t0) => {
                if wants("star") || wants("square") {
                    let r = isometry::verify_star_square(&t0, &plan).expect("normalized map");
                    for c in r.checks {
                        let keep = if c.name == isometry::CHECK_STAR { wants("star") } else { wants("square") };
                        if keep {
                            report.checks.push(c);
                        }
                    }
                }
                if wants("symmetry") {
                    report.extend(isometry::symmetry_correspondence_check(&t0, &plan).expect("normalized map"));
                }
            }
            Err(f) => report.checks.push(Check::at_most("normalize", f.residual, common.tol)),
        }
    }
    if wants("metric") {
        report.extend(isometry::isometry_spot_check(&map, &plan));
    }

    let mut text = report.to_string();
    writeln!(text, "result           {}", if report.passed() { "PASS" } else { "FAIL" }).unwrap();
    write_output(&common.out, &text)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}

struct FuzzOutcome {
    roundtrip_ok: bool,
    u_dev: f64,
    w_dev: f64,
    rejected: bool,
    reject_stage: String,
}

fn fuzz(common: &Common, blocks: &[usize]) -> Result<i32, Malformed> {
    let sig = Signature::new(blocks.to_vec()).map_err(|e| Malformed(format!("signature: {e}")))?;
    let tol = common.tol;
    let outcomes = Execution::default().map(common.trials, |t| {
        let mut rng = SplitMix64::derived(common.seed, t as u64);
        let cert = IsometryCertificate::random(&sig, &sig, rng.fork_seed()).expect("same signature");
        let map = isometry::build_isometry(&cert);
        let (roundtrip_ok, u_dev, w_dev) = match isometry::decompose_isometry(&map, tol) {
            Ok(back) => match back.distance(&cert) {
                Some((du, dw)) => (du <= tol && dw <= tol, du, dw),
                None => (false, f64::NAN, f64::NAN),
            },
            Err(_) => (false, f64::NAN, f64::NAN),
        };
        let gauss = RealLinearMap::from_entries(&sig, &sig, |_, _| rng.normal());
        let (rejected, reject_stage) = match isometry::decompose_isometry(&gauss, tol) {
            Ok(_) => (false, String::from("accepted")),
            Err(f) => (true, f.stage.to_string()),
        };
        FuzzOutcome { roundtrip_ok, u_dev, w_dev, rejected, reject_stage }
    });

    let n = outcomes.len();
    let ok = outcomes.iter().filter(|o| o.roundtrip_ok).count();
    let rejected = outcomes.iter().filter(|o| o.rejected).count();
    let max = |f: fn(&FuzzOutcome) -> f64| outcomes.iter().map(f).fold(0.0, cstar_isometry::exec::f64_max);
    let mut stages: Vec<(String, usize)> = Vec::new();
    for o in &outcomes {
        match stages.iter_mut().find(|(s, _)| *s == o.reject_stage) {
            Some((_, count)) => *count += 1,
            None => stages.push((o.reject_stage.clone(), 1)),
        }
    }
    stages.sort();

    let mut text = String::new();
    writeln!(text, "signature        {sig}").unwrap();
    writeln!(text, "roundtrip        {ok}/{n} max_u_dev={:.3e} max_w_dev={:.3e}", max(|o| o.u_dev), max(|o| o.w_dev))
        .unwrap();
    writeln!(text, "rejection        {rejected}/{n}").unwrap();
    for (stage, count) in &stages {
        writeln!(text, "  {stage} {count}").unwrap();
    }
    let passed = ok == n && rejected == n;
    writeln!(text, "result           {}", if passed { "PASS" } else { "FAIL" }).unwrap();
    write_output(&common.out, &text)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

fn classify(common: &Common, path: &str) -> Result<i32, Malformed> {
    let map = read_map(path)?;
    match isometry::classify_bh(&map, common.tol) {
        Ok(c) => {
            write_output(&common.out, &json::encode_classification(&c))?;
            Ok(EXIT_OK)
        }
        Err(isometry::IsometryError::Decompose(f)) => {
            write_output(&common.out, &json::encode_failure(&f))?;
            eprintln!("{f}");
            Ok(EXIT_FAILED)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(EXIT_FAILED)
        }
    }
}
