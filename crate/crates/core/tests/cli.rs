use std::process::{Command, Output};

fn unimap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unimap")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_prints_census_values() {
    let o = unimap(&["count", "--n", "5", "--n-min", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in ["n,g,count", "4,0,14", "4,1,70", "4,2,21", "5,0,42", "5,1,420", "5,2,483"] {
        assert!(text.lines().any(|l| l == line), "missing {line} in\n{text}");
    }
}

#[test]
fn oracle_census_json() {
    let o = unimap(&["--format", "json", "oracle", "census", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"]["0"], 5);
    assert_eq!(v["counts"]["1"], 10);
}

#[test]
fn sample_emits_valid_jsonl() {
    let (n, g) = (30, 7);
    let o = unimap(&["--seed", "4", "sample", "--n", "30", "--g", "7", "--samples", "300", "--emit-cdt"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 300);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let vertices = v["v"].as_u64().unwrap() as usize;
        assert_eq!(vertices, n + 1 - 2 * g);
        let edges = v["edges"].as_array().unwrap();
        assert_eq!(edges.len(), n);
        assert!(edges.iter().flat_map(|e| e.as_array().unwrap()).all(|x| (x.as_u64().unwrap() as usize) < vertices));
        let cdt = &v["cdt"];
        assert_eq!(cdt["tree"].as_str().unwrap().len(), 2 * n);
        assert_eq!(cdt["perm"].as_array().unwrap().len(), n + 1);
        assert_eq!(cdt["signs"].as_array().unwrap().len(), vertices);
    }
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let base = ["--seed", "11", "verify", "local-limit", "--n", "200", "--g", "50", "--r", "1", "--samples", "1500"];
    let one = unimap(&[&base[..], &["--workers", "1"]].concat());
    let four = unimap(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.status.code(), four.status.code());
    let other_seed = unimap(&["--seed", "12", "verify", "local-limit", "--n", "200", "--g", "50", "--r", "1", "--samples", "1500"]);
    assert_ne!(one.stdout, other_seed.stdout);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gw.csv");
    let args = ["--seed", "3", "gw", "--xi", "0.3", "--r", "1", "--samples", "4000"];
    let direct = unimap(&args);
    let to_file = unimap(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(to_file.status.code(), direct.status.code());
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(unimap(&["root-degree", "--n", "4", "--g", "1", "--samples", "20000", "--exact"]).status.code(), Some(0));
    // finite-size bias at n = 20 is far above the limit-law tolerance
    assert_eq!(unimap(&["root-degree", "--n", "20", "--g", "5", "--samples", "20000"]).status.code(), Some(1));
    assert_eq!(unimap(&["sample", "--n", "4", "--g", "3"]).status.code(), Some(2));
    assert_eq!(unimap(&["beta", "--theta", "0.7"]).status.code(), Some(2));
    assert_eq!(unimap(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(unimap(&["oracle", "census", "--n", "40"]).status.code(), Some(2));
    let o = unimap(&["count", "--n", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn surgery_verification_passes() {
    let o = unimap(&["verify", "surgery", "--k-max", "2", "--n-max", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn help_documents_csv_columns() {
    let o = unimap(&["root-degree", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("outcome,count,freq,prob,se,z,tested"));
}
