use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use specint::setcore::format::parse_family;

fn specint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specint")).args(args).env_remove("SPECINT_THREADS").output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// The top-level contract of the published schema.
fn assert_schema(doc: &Value) {
    let schema = schema();
    let obj = doc.as_object().unwrap();
    let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for key in &required {
        assert!(obj.contains_key(*key), "missing {key}");
    }
    assert_eq!(obj.len(), required.len(), "unexpected top-level keys");
    assert_eq!(doc["schema_version"], schema["properties"]["schema_version"]["const"]);
    assert_eq!(doc["tool"], "specint");
    let commands = schema["properties"]["command"]["enum"].as_array().unwrap();
    assert!(commands.contains(&doc["command"]));
    assert!(doc["seed"].is_null() || doc["seed"].is_u64());
    assert!(doc["timing"]["wall_ms"].as_f64().unwrap() >= 0.0);
    assert!(doc["violations"].as_array().unwrap().iter().all(Value::is_string));
}

#[test]
fn height_of_two_consecutive_integers() {
    let out = specint(&["height", "--set", "{0,1}"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("h=2"));
    let doc = report(&out);
    assert_schema(&doc);
    assert_eq!(doc["results"]["h"], 2);
    assert_eq!(doc["results"]["set"], serde_json::json!([0, 1]));
}

#[test]
fn height_memo_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("memo.json");
    let out = specint(&["height", "--set", "{0,1,5}", "--original", "--dump-memo", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["h"], 3);
    let memo: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let entries = memo.as_array().unwrap();
    assert!(entries.iter().any(|e| e["set"] == serde_json::json!([0, 1]) && e["h"] == 2));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(specint(&["height", "--set", "{0,1}", "--bogus"]).status.code(), Some(2));
    assert_eq!(specint(&["nonsense"]).status.code(), Some(2));
    assert_eq!(specint(&["height", "--set", "{0,"]).status.code(), Some(2));
    assert_eq!(specint(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(specint(&["search", "--n", "4", "--m", "all", "--time-limit", "5 parsecs"]).status.code(), Some(2));
    assert_eq!(specint(&["bounds", "--n", "10", "--csv", "--threads", "x"]).status.code(), Some(2));
    assert_eq!(specint(&["--help"]).status.code(), Some(0));
    assert_eq!(specint(&["--version"]).status.code(), Some(0));
}

#[test]
fn thread_count_from_environment() {
    let ok = Command::new(env!("CARGO_BIN_EXE_specint"))
        .args(["search", "--n", "6", "--m", "evens"])
        .env("SPECINT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(report(&ok)["results"]["best"], 8);
    let bad = Command::new(env!("CARGO_BIN_EXE_specint"))
        .args(["search", "--n", "6", "--m", "evens"])
        .env("SPECINT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let out = specint(&["verify", "--suite", "axioms", "--max-n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out);
    assert_schema(&doc);
    assert_eq!(doc["violations"], serde_json::json!([]));

    for args in [
        vec!["verify", "--suite", "constants"],
        vec!["verify", "--suite", "sgall", "--samples", "1000", "--seed", "7"],
        vec!["verify", "--suite", "katona", "--max-n", "7"],
        vec!["verify", "--suite", "procedure", "--variant", "symmetric", "--max-n", "6", "--samples", "20"],
    ] {
        let out = specint(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(report(&out)["seed"], 7);
    }
    // the short-interval sweep has gaps at small s
    let out = specint(&["verify", "--suite", "bhp", "--max-s", "200"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["violations"].as_array().unwrap().len(), 4);
}

#[test]
fn seeded_runs_reproduce() {
    let run = |seed: &str| {
        let mut doc = report(&specint(&["procedure", "--random-n", "6", "--seed", seed, "--strategy", "greedy"]));
        doc["timing"] = Value::Null;
        doc
    };
    let a = run("42");
    assert_eq!(a["seed"], 42);
    assert_eq!(a, run("42"));
    assert_ne!(a["results"]["trace"], run("43")["results"]["trace"]);
}

#[test]
fn construct_round_trips_and_feeds_procedure() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.txt");
    let out = specint(&["construct", "--name", "eventown", "--n", "8", "--out", fam.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out);
    assert_schema(&doc);
    assert_eq!(doc["results"]["size"], 16);
    let text = std::fs::read_to_string(&fam).unwrap();
    let family = parse_family(&text).unwrap();
    assert_eq!(specint::setcore::format::write_family(&family), text);

    let trace = dir.path().join("trace.json");
    let out = specint(&[
        "procedure", "--a", fam.to_str().unwrap(), "--b", fam.to_str().unwrap(), "--m", "evens",
        "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = report(&out);
    assert_eq!(doc["results"]["case_sequence"], "C2 C2 C2 C2 C2 C2 C2 C2");
    let trace: specint::procedure::ProcedureTrace =
        serde_json::from_str(&std::fs::read_to_string(trace).unwrap()).unwrap();
    assert!(specint::procedure::verify_trace(&trace).is_clean());
    assert_eq!(trace.steps[0].pf.numerator().to_string(), "1");
}

#[test]
fn remark_construction_writes_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("remark");
    let out = specint(&["construct", "--name", "remark", "--n", "8", "--d", "2", "--out", prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out);
    assert_eq!(doc["results"]["m"], "{0,1,3,5,7}");
    assert_eq!(doc["results"]["a_size"], 256);
    assert_eq!(doc["results"]["b_size"], 9);
    for suffix in [".a.fam", ".b.fam"] {
        let mut p = prefix.clone().into_os_string();
        p.push(suffix);
        assert!(parse_family(&std::fs::read_to_string(p).unwrap()).is_ok());
    }
}

#[test]
fn search_family_and_pair() {
    let out = specint(&["search", "--n", "6", "--m", "evens", "--mode", "family", "--time-limit", "60s"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out);
    assert_schema(&doc);
    assert_eq!(doc["results"]["best"], 8);
    assert_eq!(doc["results"]["optimal"], true);
    let witness = parse_family(doc["results"]["witness"].as_str().unwrap()).unwrap();
    assert_eq!(witness.len(), 8);

    let out = specint(&["search", "--n", "4", "--m", "{0,1}", "--mode", "pair"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out);
    assert_eq!(doc["results"]["optimal"], true);
    assert!(doc["results"]["best"].as_u64().unwrap() >= 16);
}

#[test]
fn number_theory_commands() {
    let out = specint(&["primes", "--s", "100", "--gamma", "0.525"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["prime"], 97);

    let out = specint(&["primes", "--s", "126"]);
    assert_eq!(out.status.code(), Some(1));

    let out = specint(&["fw-check", "--k", "5", "--t", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out);
    assert_eq!(doc["results"]["condition"]["gcd"], "3");
    assert_eq!(doc["results"]["condition"]["holds"], true);

    let out = specint(&["fw-check", "--k", "5", "--t", "2", "--n", "8"]);
    assert_eq!(report(&out)["results"]["oracle"]["holds"], true);

    let out = specint(&["misint", "--n", "100", "--t", "19", "--eps", "0.15"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out);
    assert_schema(&doc);
    assert_eq!(doc["results"]["missing_primes"], serde_json::json!([]));
    let expected = specint::bounds::binomial(100, 59) * 100u32;
    assert_eq!(doc["results"]["total_bound"], expected.to_string());

    let out = specint(&["misint", "--n", "100", "--t", "19", "--csv"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("k,s,prime,"));
    assert_eq!(csv.lines().count(), 22);
}

#[test]
fn bounds_sweep_as_csv() {
    let out = specint(&["bounds", "--n", "10", "--n-to", "14", "--l", "2", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 6);
    let out = specint(&["bounds", "--n", "100", "--l", "3", "--triviality-max-n", "20000"]);
    let doc = report(&out);
    assert_schema(&doc);
    assert_eq!(doc["results"]["triviality_threshold"], 3);
    let first = doc["results"]["rows"][0]["pair"]["first"]["log2"].as_f64().unwrap();
    assert!((first - 212.6435429379022).abs() < 1e-9);
}

#[test]
fn report_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = specint(&["primes", "--s", "1000", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_schema(&doc);
}
