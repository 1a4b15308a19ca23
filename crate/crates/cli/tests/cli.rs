use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratavol"))
        .args(args)
        .env_remove("STRATAVOL_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn volumes_table_for_genus_four() {
    let out = run(&["volumes", "--gmax", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "g,n,a_gn");
    assert_eq!(lines.len(), 11);
    assert!(lines.contains(&"4,2,5197/29030400"));
    assert!(lines.contains(&"4,4,335/7962624"));
}

#[test]
fn volumes_edge_cases() {
    let one = run(&["volumes", "--gmax", "1", "--format", "json"]);
    assert!(one.status.success());
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["a_gn"], "1/24");

    let zero = run(&["volumes", "--gmax", "0", "--format", "json"]);
    assert!(zero.status.success());
    let v: serde_json::Value = serde_json::from_slice(&zero.stdout).unwrap();
    assert!(v.as_array().unwrap().is_empty());

    let big = run(&["volumes", "--gmax", "11"]);
    assert_eq!(big.status.code(), Some(2));
}

#[test]
fn pnumbers_listing() {
    let out = run(&["pnumbers", "--weight", "8", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let values: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["value"].as_str().unwrap()).collect();
    assert_eq!(values, ["1", "2", "1", "24", "18", "11", "720", "600", "684", "486", "335"]);

    let one = run(&["pnumbers", "--weight", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert!(v.as_array().unwrap().is_empty());

    let two = run(&["pnumbers", "--weight", "2"]);
    assert_eq!(stdout(&two).trim(), "p_{2} = 1");
}

#[test]
fn series_routes_agree() {
    let a = run(&["series", "--order", "8", "--format", "json"]);
    let b = run(&["series", "--order", "8", "--route", "lagrange", "--format", "json"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn brute_force_counts() {
    let torus = run(&["count", "ribbon", "--genus", "1", "--black", "4", "--white", "4"]);
    assert!(torus.status.success());
    assert_eq!(stdout(&torus).trim(), "1");

    let trees = run(&["count", "trees", "--black", "5,1", "--white", "4,2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&trees.stdout).unwrap();
    assert_eq!(v["value"], "2");

    let sts = run(&["count", "sts", "--genus", "1", "--max-squares", "3"]);
    assert!(stdout(&sts).trim_end().ends_with("cumulative = 8"));
}

#[test]
fn verify_suites_exit_cleanly() {
    for suite in ["bivariate", "multivariate", "walls"] {
        let out = run(&["verify", suite]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", stdout(&out));
        assert!(!stdout(&out).contains("FAIL"));
    }
}

#[test]
fn unknown_flags_are_errors() {
    let out = run(&["volumes", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "oracle-sts", "--convention", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "walls", "--seed", "7", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn cache_roundtrip_and_corruption() {
    let dir = std::env::temp_dir().join(format!("stratavol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pnumbers.json");
    let _ = std::fs::remove_file(&path);
    let with_cache = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_stratavol"))
            .args(args)
            .env("STRATAVOL_CACHE", &path)
            .output()
            .unwrap()
    };

    let first = with_cache(&["pnumbers", "--weight", "6"]);
    assert!(first.status.success());
    assert!(path.exists());
    let second = with_cache(&["pnumbers", "--weight", "6"]);
    assert_eq!(first.stdout, second.stdout);

    let text = std::fs::read_to_string(&path).unwrap();
    let mut records: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    for r in &mut records {
        r["value"] = serde_json::json!("999");
    }
    std::fs::write(&path, serde_json::to_string(&records).unwrap()).unwrap();
    let bad = with_cache(&["pnumbers", "--weight", "6"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("error"));
    let _ = std::fs::remove_dir_all(&dir);
}
