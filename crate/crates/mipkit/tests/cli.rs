//! End-to-end runs of the command-line interface through `cli::run`,
//! checking exit codes, frozen JSON lines, and byte determinism.

use mipkit::cli::run;

fn mipkit(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("mipkit").chain(args.iter().copied());
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn realize_emits_the_expected_json() {
    let (code, out, _) = mipkit(&["realize", "--family", "G4", "--m", "6", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(out, "{\"family\":\"G4\",\"m\":6,\"order\":64,\"exponent\":16}\n");
}

#[test]
fn fingerprint_reports_the_expected_center() {
    let (code, out, _) = mipkit(&["fingerprint", "--family", "G4", "--m", "6", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["center"], serde_json::json!([16]));
    assert_eq!(v["class"], serde_json::json!({"value": 2, "reason": "cyclic_derived"}));
}

#[test]
fn invariants_json_is_frozen() {
    let (code, out, _) = mipkit(&["invariants", "--family", "G17", "--m", "6", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "{\"family\":\"G17\",\"m\":6,\"order\":64,\"exponent\":16,\"center\":[4],\
         \"abelianization\":[8,2],\"derived_order\":4,\
         \"lower_central_factors\":[[8,2],[2],[2]],\"class\":3}\n"
    );
}

#[test]
fn jennings_json_is_frozen() {
    let (code, out, _) = mipkit(&["jennings", "--family", "C", "--m", "3", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "{\"family\":\"C\",\"m\":3,\"p\":2,\"term_orders\":[8,4,2,2,1],\
         \"factors\":[[2],[2],[],[2]],\"double_factors\":[[4],[2],[2],[2]]}\n"
    );
}

#[test]
fn algebra_dims_json_is_frozen() {
    let (code, out, _) = mipkit(&["algebra-dims", "--family", "D", "--m", "3", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "{\"family\":\"D\",\"m\":3,\"p\":2,\"dim\":8,\"filtration\":[8,7,5,3,1,0],\
         \"nilpotency_index\":5,\"class_sum_ideal_dim\":4,\"derived_ideal_dim\":4,\
         \"derived_delta_dim\":3,\"derived_min_generators\":1}\n"
    );
}

#[test]
fn unit_class_json_is_frozen() {
    let (code, out, _) = mipkit(&["unit-class", "--family", "Q", "--m", "3", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "{\"family\":\"Q\",\"m\":3,\"p\":2,\"order\":8,\"derived_order\":2,\
         \"unit_class\":2,\"class_determination\":2,\"equals_derived_order\":true}\n"
    );
}

#[test]
fn table_at_m6_passes_with_the_documented_deviations() {
    let (code, out, _) = mipkit(&["table", "--m", "6", "--json"]);
    assert_eq!(code, 0, "documented deviations must not fail the run");
    let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.len(), 25);
    for row in &rows {
        let family = row["family"].as_str().unwrap();
        let expected = if family == "G15" || family == "G16" {
            "documented discrepancy"
        } else {
            "ok"
        };
        assert_eq!(row["status"], expected, "{family}");
    }
    assert_eq!(rows[14]["gamma2"], serde_json::json!([8]));
    assert_eq!(rows[14]["discrepancies"][0]["field"], "gamma2_generators");
}

#[test]
fn table_covers_the_m5_families() {
    let (code, out, _) = mipkit(&["table", "--m", "5", "--json"]);
    assert_eq!(code, 0);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.len(), 19);
    assert_eq!(rows.last().unwrap()["family"], "G26");
}

#[test]
fn separate_exits_zero_on_the_hard_quintet() {
    let (code, out, _) = mipkit(&["separate", "--groups", "4,5,10,17,22", "--m", "6"]);
    assert_eq!(code, 0);
    assert!(out.contains("all pairs separated"), "{out}");
    assert!(out.contains("G4 vs G17: derived_d"), "{out}");
}

#[test]
fn separate_exits_two_when_nothing_separates() {
    let (code, out, _) = mipkit(&["separate", "--groups", "4,4", "--m", "6", "--json"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pairs"][0]["field"], "NOT SEPARATED");
}

#[test]
fn usage_errors_exit_one_and_name_the_family() {
    let (code, _, err) = mipkit(&["realize", "--family", "G27", "--m", "6"]);
    assert_eq!(code, 1);
    assert!(err.contains("G27"), "{err}");

    let (code, _, err) = mipkit(&["realize", "--family", "G19", "--m", "5"]);
    assert_eq!(code, 1);
    assert!(err.contains("G19") && err.contains("m >= 6"), "{err}");

    let (code, _, _) = mipkit(&["realize", "--m", "6"]);
    assert_eq!(code, 1, "missing --family is a usage error");

    let (code, _, _) = mipkit(&["no-such-verb"]);
    assert_eq!(code, 1);

    let (code, _, _) = mipkit(&["separate", "--groups", "4", "--m", "6"]);
    assert_eq!(code, 1, "a single group cannot be separated");
}

#[test]
fn bad_primes_are_rejected_not_fed_to_the_algebra() {
    for p in ["0", "1", "4", "257"] {
        let (code, _, err) = mipkit(&["algebra-dims", "--family", "D", "--m", "3", "--p", p]);
        assert_eq!(code, 1, "p = {p}");
        assert!(err.contains("--p"), "{err}");
    }

    // valid prime, but the catalog groups are 2-groups
    let (code, _, err) = mipkit(&["jennings", "--family", "D", "--m", "3", "--p", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("not a power of 3"), "{err}");

    let (code, _, err) = mipkit(&["unit-class", "--family", "Q", "--m", "3", "--p", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("p = 2 only"), "{err}");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = mipkit(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("table"), "{out}");
}

#[test]
fn repeated_invocations_are_byte_identical() {
    for args in [
        vec!["fingerprint", "--family", "G22", "--m", "7", "--json"],
        vec!["table", "--m", "6", "--json"],
        vec!["separate", "--groups", "4,5,10,17,22", "--m", "6", "--json"],
        vec!["jennings", "--family", "G2", "--m", "6"],
    ] {
        let (c1, out1, _) = mipkit(&args);
        let (c2, out2, _) = mipkit(&args);
        assert_eq!(c1, c2);
        assert_eq!(out1, out2, "nondeterministic output for {args:?}");
        assert_eq!(c1, 0);
    }
}

#[test]
fn cache_directory_round_trips_and_survives_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["fingerprint", "--family", "G4", "--m", "6", "--json", "--cache", cache];

    let (c1, cold, _) = mipkit(&args);
    assert_eq!(c1, 0);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1, "one table cached");

    let (c2, warm, _) = mipkit(&args);
    assert_eq!(c2, 0);
    assert_eq!(cold, warm, "cache hit must not change output");

    let path = files[0].as_ref().unwrap().path();
    std::fs::write(&path, b"MIPKgarbage").unwrap();
    let (c3, repaired, _) = mipkit(&args);
    assert_eq!(c3, 0, "corrupt cache entries fall back to enumeration");
    assert_eq!(cold, repaired);
}
