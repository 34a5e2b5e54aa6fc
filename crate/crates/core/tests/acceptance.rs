//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use nkverify::lagrangian::builtin_lagrangians;
use nkverify::report::{CheckRecord, Status, VerificationReport};
use nkverify::suites::{lagrangian_suite, proof_suite, structure_suite, ProofMode, SuiteOptions};

const SEED: u64 = 7;

struct Outcome {
    ok: bool,
    note: String,
}

fn outcome(ok: bool, note: impl Into<String>) -> Outcome {
    Outcome { ok, note: note.into() }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn record<'a>(r: &'a VerificationReport, id: &str) -> &'a CheckRecord {
    r.find(id).unwrap_or_else(|| panic!("missing record {id}"))
}

fn failing(r: &VerificationReport, ids: &[String]) -> Vec<String> {
    ids.iter()
        .filter(|id| record(r, id).status != Status::Pass)
        .map(|id| format!("{id}={:.3e}", record(r, id).max_residual))
        .collect()
}

fn opts() -> SuiteOptions {
    SuiteOptions { seed: SEED, ..SuiteOptions::default() }
}

fn structure_algebra() -> Outcome {
    let (r, dt) = timed(|| structure_suite(1000, 1, &opts()));
    let ids: Vec<String> = ["j_squared", "j_isometry", "p_squared", "jp_anticommute", "metric_forms_agree"]
        .iter()
        .map(|s| format!("structure.{s}"))
        .collect();
    let bad = failing(&r, &ids);
    let samples_ok = ids.iter().all(|id| record(&r, id).samples >= 1000);
    outcome(bad.is_empty() && samples_ok && dt < Duration::from_secs(2), format!("{dt:.2?}; failing {bad:?}"))
}

fn nearly_kaehler() -> Outcome {
    let (r, dt) = timed(|| structure_suite(1, 200, &opts()));
    let ids = vec!["structure.g_diagonal".to_string(), "structure.g_skew".to_string()];
    let bad = failing(&r, &ids);
    let res = ids.iter().map(|id| record(&r, id).max_residual).fold(0.0, f64::max);
    outcome(bad.is_empty() && dt < Duration::from_secs(30), format!("max {res:.2e}; {dt:.2?}"))
}

fn lagrangian_report() -> VerificationReport {
    lagrangian_suite(&builtin_lagrangians(), 5, &opts())
}

fn frame_formula(r: &VerificationReport) -> Outcome {
    let ids: Vec<String> =
        builtin_lagrangians().iter().map(|i| format!("lagrangian.{}.frame_formula", i.label())).collect();
    let bad = failing(r, &ids);
    let res = ids.iter().map(|id| record(r, id).max_residual).fold(0.0, f64::max);
    outcome(bad.is_empty() && res <= 1e-4, format!("max {res:.2e}"))
}

fn lagrangian_analyzer(r: &VerificationReport) -> Outcome {
    let mut ids = Vec::new();
    for imm in builtin_lagrangians() {
        for (check, tol) in [
            ("is_lagrangian", 1e-9),
            ("minimality", 1e-5),
            ("cubic_symmetry", 1e-5),
            ("angle_sum", 1e-5),
            ("codazzi", 1e-4),
        ] {
            let id = format!("lagrangian.{}.{check}", imm.label());
            assert!(record(r, &id).tolerance <= tol);
            assert_eq!(record(r, &id).samples, 125);
            ids.push(id);
        }
    }
    let bad = failing(r, &ids);
    outcome(bad.is_empty(), format!("{} records on 5^3 grids; failing {bad:?}", ids.len()))
}

fn exact_identities() -> Outcome {
    let (r, dt) = timed(|| proof_suite(100, ProofMode::All, &opts()));
    let needs = [
        ("codazzi.angle_connection", 100),
        ("codazzi.system1", 100),
        ("codazzi.det_factorization", 100),
        ("codazzi.case1", 50),
        ("codazzi.case2", 50),
        ("codazzi.case3", 50),
    ];
    let mut bad = Vec::new();
    for (id, n) in needs {
        let c = record(&r, id);
        if c.status != Status::Pass || c.samples < n {
            bad.push(format!("{id} ({:?}, {} samples)", c.status, c.samples));
        }
    }
    let k = &record(&r, "codazzi.system1").details["clearing_factor_k2"];
    outcome(bad.is_empty() && dt < Duration::from_secs(60), format!("{dt:.2?}; K2 = {k}; failing {bad:?}"))
}

fn umbilical_lemma() -> Outcome {
    let r = proof_suite(100, ProofMode::Numeric, &opts());
    let mut bad = Vec::new();
    for n in [2, 3, 4] {
        let c = record(&r, &format!("humfit.umbilical_lemma.n{n}"));
        if c.status != Status::Pass || c.samples < 100 {
            bad.push(n);
        }
    }
    outcome(bad.is_empty(), format!("failing dimensions {bad:?}"))
}

fn theorem_shadow(r: &VerificationReport) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for imm in builtin_lagrangians() {
        let c = record(r, &format!("humfit.theorem.{}", imm.label()));
        let candidates = c.details["falsification_candidates"].as_array().map_or(usize::MAX, Vec::len);
        ok &= c.status == Status::Pass && candidates == 0;
        notes.push(format!(
            "{}: {} fitted, {} rejected",
            imm.label(),
            c.details["fitted_points"],
            c.details["rejected_points"]
        ));
    }
    outcome(ok, notes.join("; "))
}

fn run_cli(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_nkverify"))
        .args(args)
        .env_remove("NKVERIFY_SEED")
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code())
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("nkverify-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let tensor = dir.join("tensor.json");
    std::fs::write(&tensor, nkverify::humfit::build_h_from_V(&[0.3, -0.2, 0.9]).to_json()).unwrap();
    let tensor = tensor.to_str().unwrap().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["structure", "--seed", "11"],
        vec!["lagrangian", "--seed", "11"],
        vec!["lagrangian", "--example", "twisted-control", "--grid", "2", "--seed", "11"],
        vec!["proof", "--trials", "20", "--seed", "11"],
        vec!["fit", &tensor, "--seed", "11"],
        vec!["structure", "--seed", "11", "--format", "text"],
    ];
    let mut bad = Vec::new();
    for args in &commands {
        let (a, ca) = run_cli(args);
        let (b, cb) = run_cli(args);
        if a != b || ca != cb || a.is_empty() {
            bad.push(args.join(" "));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(bad.is_empty(), format!("{} commands run twice; differing {bad:?}", commands.len()))
}

type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn main() {
    let lag = lagrangian_report();
    let criteria: Vec<Criterion> = vec![
        ("1 structure identities", Box::new(structure_algebra)),
        ("2 nearly Kaehler G", Box::new(nearly_kaehler)),
        ("3 frame formula for G", Box::new(|| frame_formula(&lag))),
        ("4 Lagrangian analyzer", Box::new(|| lagrangian_analyzer(&lag))),
        ("5 exact identity suite", Box::new(exact_identities)),
        ("6 totally umbilical lemma", Box::new(umbilical_lemma)),
        ("7 theorem shadow", Box::new(|| theorem_shadow(&lag))),
        ("8 determinism", Box::new(determinism)),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let o = f();
        if !o.ok {
            failures += 1;
        }
        println!("criterion {name}: {} ({})", if o.ok { "PASS" } else { "FAIL" }, o.note);
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
