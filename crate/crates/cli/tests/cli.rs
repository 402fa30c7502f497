use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gamma6")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify"]);
    assert_eq!(ok.status.code(), Some(0));
    let report = json(&ok);
    let entries = report.as_array().unwrap();
    assert!(entries.iter().all(|e| e["status"] != "fail"));
    assert!(entries.iter().any(|e| e["identity-name"].as_str().unwrap().contains("J0-")));

    let bad = run(&["verify", "--corrupt-s"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(json(&bad).as_array().unwrap().iter().any(|e| e["status"] == "fail"));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["cloud", "--depth", "13"]).status.code(), Some(2));
    assert_eq!(run(&["lemniscate", "--samples", "2"]).status.code(), Some(2));
    assert_eq!(run(&["chain", "--word", "AS"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn cloud_csv_shape() {
    let out = run(&["cloud", "--depth", "0", "--samples", "100"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re_z,im_z,t,word_length"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 100);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[3], "0");
    }
}

#[test]
fn cloud_ply_header() {
    let out = run(&["cloud", "--depth", "1", "--samples", "16", "--format", "ply"]);
    assert!(out.status.success());
    let end = out.stdout.windows(11).position(|w| w == b"end_header\n").unwrap() + 11;
    let header = std::str::from_utf8(&out.stdout[..end]).unwrap();
    assert!(header.starts_with("ply\nformat binary_little_endian 1.0\n"));
    let count: usize = header
        .lines()
        .find_map(|l| l.strip_prefix("element vertex "))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(out.stdout.len() - end, count * 12);
}

#[test]
fn linking_report() {
    let out = run(&["linking", "--samples", "256"]);
    assert!(out.status.success());
    let pairs = json(&out);
    let pairs = pairs.as_array().unwrap();
    assert_eq!(pairs.len(), 5);
    for p in pairs {
        assert_eq!(p["integer"].as_i64().unwrap().abs(), 1);
        assert!(p["residual"].as_f64().unwrap() < 0.1);
    }
}

#[test]
fn orbit_counts() {
    let counts = |gens: &str, n: &str| -> Vec<u64> {
        let out = run(&["orbit", "--generators", gens, "--max-len", n]);
        assert!(out.status.success());
        json(&out)["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect()
    };
    assert_eq!(counts("gamma-prime", "2"), vec![1, 5, 17]);
    assert_eq!(counts("ab", "2"), vec![1, 5, 17]);
    assert_eq!(counts("gamma-prime", "4"), vec![1, 5, 17, 53, 161]);
    assert_eq!(counts("ab", "4"), vec![1, 5, 17, 53, 157]);
}

#[test]
fn dirichlet_queries() {
    let inside = json(&run(&["dirichlet", "--word", ""]));
    assert_eq!(inside["location"], "inside");
    let outside = json(&run(&["dirichlet", "--word", "A"]));
    assert_eq!(outside["location"], "outside");
    assert_eq!(outside["faces"][0], "J0-");
}

#[test]
fn lemniscate_json() {
    let out = run(&["lemniscate", "--samples", "512", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v.is_object());
}

#[test]
fn chain_random_is_seeded() {
    let a = run(&["chain", "--random", "3", "--max-len", "4", "--seed", "5"]);
    let b = run(&["chain", "--random", "3", "--max-len", "4", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).as_array().unwrap().iter().all(|c| c["certified"] == true));
}
