use std::process::{Command, Output};

use metgroup_cli::catalog::list_catalog;
use metgroup_cli::{run, verify_report, without_runtime, RunOptions, SCHEMA_VERSION};
use serde_json::{json, Value};

fn run_doc(doc: Value) -> (Value, i32) {
    let out = run(&doc, &RunOptions::default());
    (out.report, out.exit)
}

fn error_pointer(report: &Value) -> &str {
    report["error"]["pointer"].as_str().unwrap_or("")
}

fn bin(args: &[&str], stdin: Option<&str>) -> Output {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_metgroup"))
        .args(args)
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn axioms_on_s4() {
    let (r, code) = run_doc(json!({"task": "axioms", "group": {"type": "sym", "n": 4, "norm": "hamming"}}));
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "true");
    for a in ["(0)", "(1)", "(2)", "(3)"] {
        assert_eq!(r["result"]["axioms"][a], true);
    }
    assert_eq!(r["schema_version"], SCHEMA_VERSION);
}

#[test]
fn bigseq_example_is_false_with_a_three_cycle() {
    let (r, code) = run_doc(json!({
        "task": "bigseq",
        "group": {"type": "sym", "n": 3, "norm": "hamming_normalized"},
        "r": "9/10", "t": "101/100", "eps": ["1/10", "1/10", "1/10", "1/10", "1/10"],
    }));
    assert_eq!(code, 1);
    let g: Vec<usize> = serde_json::from_value(r["witness"]["g"].clone()).unwrap();
    assert!(g.iter().enumerate().all(|(i, &x)| x != i + 1), "{g:?} is not a 3-cycle");
    assert!(verify_report(&r).unwrap().ok());
}

#[test]
fn ultra_example() {
    let (r, code) = run_doc(json!({"task": "ultra", "rule": "lee_third", "power": 3, "range": [3, 30], "tol": "1/2"}));
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["bound"]["holds"], true);
}

#[test]
fn config_errors_carry_pointers() {
    let cases = [
        (json!({"task": "nope"}), "/task"),
        (json!({"group": {"type": "sym", "n": 3}}), "/task"),
        (json!({"task": "axioms", "group": {"type": "sym", "n": 3, "norm": "lee"}}), "/group/norm"),
        (json!({"task": "axioms", "group": {"type": "sym", "n": 3}, "bogus": 1}), "/bogus"),
        (json!({"task": "axioms", "group": {"type": "sym", "n": 3}, "parameters": {"bogus": 1}}), "/parameters/bogus"),
        (json!({"task": "bigseq", "group": {"type": "sym", "n": 3}, "r": 0.5, "t": "1", "eps": ["1"]}), "/r"),
        (json!({"task": "bigseq", "group": {"type": "sym", "n": 3}, "r": "1/2", "t": "1", "eps": ["1", 0.1]}), "/eps/1"),
        (json!({"task": "iet"}), "/seed"),
        (json!({"task": "axioms", "groups": []}), "/groups"),
        (json!({"task": "axioms", "group": {"type": "sym", "n": 3}, "seed": -1}), "/seed"),
        (json!({"task": "scan", "groups": [{"type": "alt", "n": 5}, {"type": "cyclic_lee", "m": 4}], "r": "1/2", "t": "1"}), "/groups/1"),
        (json!({"task": "axioms", "group": {"type": "sym", "n": 3}, "budgets": {"time": 5}}), "/budgets/time"),
        (json!([1, 2]), ""),
    ];
    for (doc, ptr) in cases {
        let (r, code) = run_doc(doc.clone());
        assert_eq!(code, 3, "{doc} -> {r}");
        assert_eq!(error_pointer(&r), ptr, "{doc} -> {r}");
    }
}

#[test]
fn budget_exhaustion_is_inconclusive() {
    let (r, code) = run_doc(json!({
        "task": "axioms",
        "group": {"type": "sym", "n": 6},
        "budgets": {"elements": 100},
    }));
    assert_eq!(code, 2, "{r}");
    assert_eq!(r["verdict"], "inconclusive");
    assert_eq!(r["error"]["kind"], "capability");
}

#[test]
fn randomized_tasks_are_deterministic() {
    let docs = [
        json!({"task": "iet", "seed": 7, "samples": 200, "embed_max": 3}),
        json!({"task": "axioms", "group": {"type": "sl_fp", "n": 2, "p": 5}, "mode": "sampled", "samples": 100, "seed": 3}),
        json!({"task": "cover", "op": "perturbation", "group": {"type": "sym", "n": 4, "norm": "hamming_normalized"}, "count": 20, "seed": 11}),
        json!({"task": "dirlim", "system": {"type": "sym_chain", "degrees": [4, 5]}, "r": "1/2", "t": "1", "n": 8, "samples": 5, "seed": 2}),
    ];
    for d in docs {
        let (a, ca) = run_doc(d.clone());
        let (b, cb) = run_doc(d.clone());
        assert_eq!(ca, cb);
        assert!(ca < 3, "{a}");
        assert_eq!(
            serde_json::to_string(&without_runtime(&a)).unwrap(),
            serde_json::to_string(&without_runtime(&b)).unwrap()
        );
    }
}

#[test]
fn seed_override_changes_the_run() {
    let doc = json!({"task": "cover", "op": "perturbation", "group": {"type": "sym", "n": 4, "norm": "hamming_normalized"}, "count": 5, "seed": 1});
    let a = run(&doc, &RunOptions::default()).report;
    let b = run(&doc, &RunOptions { seed: Some(99) }).report;
    assert_eq!(a["seed"], 1);
    assert_eq!(b["seed"], 99);
}

#[test]
fn catalog_lists_types_and_every_norm_round_trips() {
    let c = list_catalog();
    let types: Vec<&str> = c["group_types"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for t in ["sym", "alt", "cyclic_lee", "sl_fp", "iet"] {
        assert!(types.contains(&t));
    }
    assert_eq!(c["schema_version"], SCHEMA_VERSION);
    let small = |t: &str| match t {
        "sym" | "alt" => json!({"type": t, "n": 4}),
        "cyclic_lee" => json!({"type": t, "m": 8}),
        "sl_fp" => json!({"type": t, "n": 2, "p": 3}),
        _ => json!({"type": t, "n": 3}),
    };
    for norm in c["norms"].as_array().unwrap() {
        for t in norm["group_types"].as_array().unwrap() {
            let mut g = small(t.as_str().unwrap());
            g["norm"] = norm["id"].clone();
            let (r, code) = run_doc(json!({"task": "axioms", "group": g.clone()}));
            assert_eq!(code, 0, "{g}: {r}");
            assert_eq!(r["group"], g);
        }
    }
}

#[test]
fn scaled_norms() {
    let (r, code) = run_doc(json!({
        "task": "axioms",
        "group": {"type": "cyclic_lee", "m": 6, "norm": {"id": "lee", "scale": "3/2"}},
    }));
    assert_eq!(code, 0);
    assert_eq!(r["group"]["norm"]["scale"], "3/2");
}

#[test]
fn certificates_re_verify_and_tampering_is_caught() {
    let (r, code) = run_doc(json!({
        "task": "cover", "op": "conj_ball",
        "group": {"type": "alt", "n": 5},
        "g": "(1 2 3)", "target": "(1 2 3 4 5)",
    }));
    assert_eq!(code, 0, "{r}");
    assert!(!r["certificate"].is_null());
    let v = verify_report(&r).unwrap();
    assert!(v.ok() && !v.checks.is_empty());

    let mut bad = r.clone();
    bad["certificate"]["claimed_product"] = json!([2, 1, 4, 3, 5]);
    assert!(!verify_report(&bad).unwrap().ok());

    let mut bad = r.clone();
    bad["schema_version"] = json!("0.0.1");
    assert!(verify_report(&bad).is_err());
}

#[test]
fn axiom_witness_re_verifies() {
    // Conjugacy length on an abelian group is zero everywhere, so it is a
    // pseudo-norm; force a failing witness through a forged report instead.
    let (r, _) = run_doc(json!({"task": "axioms", "group": {"type": "sym", "n": 3}}));
    let mut forged = r.clone();
    forged["verdict"] = json!("false");
    forged["witness"] = json!({"axiom": "(1)", "g": [2, 1, 3], "h": [1, 3, 2]});
    let v = verify_report(&forged).unwrap();
    assert!(!v.ok());
}

#[test]
fn thickened_cover_witness() {
    let (r, code) = run_doc(json!({
        "task": "cover", "op": "thickened",
        "group": {"type": "sym", "n": 4},
        "sets": [[[1, 2, 3, 4]], {"conj_ball": "(1 2 3)", "level": 1}],
        "eps": ["0", "0"],
    }));
    assert_eq!(code, 1, "{r}");
    assert!(verify_report(&r).unwrap().ok());
    let (r, code) = run_doc(json!({
        "task": "cover", "op": "thickened",
        "group": {"type": "sym", "n": 4},
        "sets": ["all"],
        "eps": ["0"],
    }));
    assert_eq!(code, 0, "{r}");
}

#[test]
fn scan_and_star_on_small_families() {
    let (r, code) = run_doc(json!({
        "task": "scan",
        "groups": [{"type": "alt", "n": 5, "norm": "hamming_normalized"}],
        "r": "1/2", "t": "101/100",
    }));
    assert_eq!(code, 0, "{r}");
    assert!(r["result"]["n"].as_u64().unwrap() >= 1);

    let (r, code) = run_doc(json!({
        "task": "scan",
        "groups": [{"type": "sym", "n": 4, "norm": "hamming_normalized"}],
        "r": "1/2", "t": "101/100",
    }));
    assert_eq!(code, 1, "{r}");
    assert!(verify_report(&r).unwrap().ok());

    let (r, code) = run_doc(json!({"task": "star", "groups": [{"type": "alt", "n": 5}], "k_list": [1, 2]}));
    assert!(code <= 1, "{r}");
    assert_eq!(r["result"]["clause_two"].as_array().unwrap().len(), 2);
}

#[test]
fn sl_probe_csv_and_tree() {
    let out = run(&json!({"task": "sl", "op": "probe", "n": 2, "p": 5}), &RunOptions::default());
    assert_eq!(out.exit, 0, "{}", out.report);
    let csv = out.csv.unwrap();
    assert!(csv.starts_with("matrix,jordan_length,normal_generation_number"));
    assert_eq!(csv.lines().count(), 1 + 118);

    let (r, code) = run_doc(json!({
        "task": "tree", "group": {"type": "alt", "n": 5, "norm": "hamming_normalized"},
        "family": {"conj_ball": "(1 2 3)"}, "grid": ["1/5", "2/5", "3/5"], "depth_cap": 6,
    }));
    assert!(code == 0 || code == 2, "{r}");
}

#[test]
fn binary_exit_codes_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("report.json");
    std::fs::write(&cfg, r#"{"task":"bigseq","group":{"type":"sym","n":3,"norm":"hamming_normalized"},"r":"9/10","t":"101/100","eps":["1/10","1/10","1/10","1/10","1/10"]}"#).unwrap();
    let o = bin(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", "2"], None);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["verdict"], "false");

    let o = bin(&["verify-report", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));

    let o = bin(&[], Some(r#"{"task":"axioms","group":{"type":"sym","n":4,"norm":"hamming"}}"#));
    assert_eq!(o.status.code(), Some(0));

    let o = bin(&[], Some("{not json"));
    assert_eq!(o.status.code(), Some(3));

    let o = bin(&["--format", "csv"], Some(r#"{"task":"sl","n":2,"p":3}"#));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.starts_with("matrix,"), "{text}");

    let o = bin(&["catalog"], None);
    assert_eq!(o.status.code(), Some(0));
    let c: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(c["schema_version"], SCHEMA_VERSION);

    let o = bin(&["--seed", "5"], Some(r#"{"task":"iet","samples":10,"embed_max":2}"#));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn brenner_checks() {
    let (r, code) = run_doc(json!({"task": "brenner", "check": "identity"}));
    assert_eq!(code, 0, "{r}");
    let (r, code) = run_doc(json!({"task": "brenner", "check": "conjugator", "group": {"type": "sym", "n": 4}}));
    assert_eq!(code, 0, "{r}");
    let (r, code) = run_doc(json!({"task": "brenner", "check": "sigma_infinity", "sigma": "(1 2)(3 4 5)", "n": 13, "seed": 1}));
    assert_eq!(code, 0, "{r}");
    assert!(verify_report(&r).unwrap().ok());
    let (r, code) = run_doc(json!({"task": "brenner", "check": "sigma_infinity", "sigma": "(1 2 3 4 5)(6 7 8)", "n": 9, "seed": 1}));
    assert_eq!(code, 3, "{r}");
}

#[test]
fn dirlim_certificates_re_verify() {
    let (r, code) = run_doc(json!({
        "task": "dirlim",
        "system": {"type": "sl_chain", "p": 2, "dims": [2, 4]},
        "r": "1/4", "t": "1", "n": 6, "samples": 4, "seed": 9,
    }));
    assert!(code <= 1, "{r}");
    let v = verify_report(&r).unwrap();
    assert!(v.ok(), "{:?}", v.checks);
}
