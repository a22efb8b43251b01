use std::fs;
use std::process::{Command, Output};

fn romik(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_romik"))
        .args(args)
        .env_remove("ROMIK_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn compute_prints_exact_signed_values() {
    let out = romik(&["compute", "--seq", "d", "--max", "8"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "0 1\n1 1\n2 -1\n3 51\n4 849\n5 -26199\n6 1341999\n7 82018251\n8 18703396449\n"
    );
}

#[test]
fn grid_p7_block_vanishes() {
    let out = romik(&["grid", "--prime", "7", "--max-n", "60", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let f: Vec<u64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        if f[1] <= 24 && f[0] > 24 {
            assert_eq!(f[2], 0, "{line}");
        }
        rows += 1;
    }
    assert_eq!(rows, 60 * 61 / 2);
}

#[test]
fn verify_exit_statuses() {
    assert_eq!(romik(&["verify", "--suite", "mod5", "--max", "150"]).status.code(), Some(0));
    assert_eq!(romik(&["verify", "--suite", "mod-p", "--prime", "5"]).status.code(), Some(2));
    assert_eq!(romik(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(romik(&["grid", "--max-n", "5"]).status.code(), Some(2));
}

#[test]
fn corrupted_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let store = romik(&["cache", "store", "--max", "10", "--cache-dir", path]);
    assert!(store.status.success());

    let load = romik(&["cache", "load", "--cache-dir", path]);
    assert!(stdout(&load).contains("complete through n = 10"));

    let d = dir.path().join("d.txt");
    let text = fs::read_to_string(&d).unwrap().replace("\n4 849\n", "\n");
    fs::write(&d, text).unwrap();
    let load = romik(&["cache", "load", "--cache-dir", path]);
    assert_eq!(load.status.code(), Some(3));
    let err = String::from_utf8(load.stderr).unwrap();
    assert!(err.contains("gap") && err.contains("d.txt"), "{err}");
}

#[test]
fn cache_dir_from_environment_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_romik"))
        .args(["compute", "--seq", "u", "--max", "6"])
        .env("ROMIK_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let u = fs::read_to_string(dir.path().join("u.txt")).unwrap();
    assert!(u.starts_with("ROMIKCACHE v1 seq=u\n0 1\n1 6\n2 256\n"));

    let again = romik(&["compute", "--seq", "u", "--max", "6", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(again.stdout, out.stdout);
}
