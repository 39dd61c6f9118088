use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use labe_core::abe::{noise_budget_check, SystemParams};
use labe_core::encoding::from_bytes;

const SEED: &str = "0123456789abcdef0123456789abcdef0123456789abcdef0123456789abcdef";

fn labe(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_labe")).current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// A directory holding toy parameters, keys for "a AND b" and a 4-byte
/// message, built once per test binary.
fn world() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap().keep();
        std::fs::write(dir.join("msg"), b"ping").unwrap();
        for args in [
            &["params", "--n", "4", "--L", "2", "--out", "params"][..],
            &["setup", "--params", "params", "--pp", "pp", "--msk", "msk", "--seed", SEED],
            &["keygen", "--pp", "pp", "--msk", "msk", "--policy", "a AND b", "--out", "sk", "--seed", SEED],
        ] {
            let out = labe(&dir, args);
            assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        }
        dir
    })
}

#[test]
fn params_file_passes_the_budget_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = labe(dir.path(), &["params", "--n", "4", "--L", "2", "--profile", "toy", "--out", "p"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for key in ["q bits", "m ", "sigma", "alpha"] {
        assert!(text.contains(key), "{text}");
    }
    let params: SystemParams = from_bytes(&std::fs::read(dir.path().join("p")).unwrap()).unwrap();
    assert!(noise_budget_check(&params));
}

#[test]
fn paper_profile_width_is_at_least_n_to_the_three_halves() {
    let dir = tempfile::tempdir().unwrap();
    let out = labe(dir.path(), &["params", "--n", "100000", "--L", "2", "--profile", "paper", "--out", "p"]);
    assert_eq!(code(&out), 0);
    let m: u64 = stdout(&out)
        .lines()
        .find_map(|l| l.strip_prefix("m ").map(|v| v.trim().parse().unwrap()))
        .unwrap();
    assert!(m * m >= 100_000u64.pow(3));
}

#[test]
fn row_budget_above_n_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = labe(dir.path(), &["params", "--n", "2", "--L", "3", "--out", "p"]);
    assert_eq!(code(&out), 2);
    assert!(!dir.path().join("p").exists());
}

#[test]
fn four_byte_round_trip() {
    let dir = world();
    let ct = dir.join("rt.ct");
    let out = labe(dir, &["encrypt", "--pp", "pp", "--attrs", "a,b", "--in", "msg", "--out", "rt.ct"]);
    assert_eq!(code(&out), 0);
    assert!(ct.exists());
    let out = labe(dir, &["decrypt", "--pp", "pp", "--sk", "sk", "--in", "rt.ct", "--out", "rt.txt"]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(dir.join("rt.txt")).unwrap(), b"ping");
}

#[test]
fn unauthorized_exits_3_without_output() {
    let dir = world();
    assert_eq!(code(&labe(dir, &["encrypt", "--pp", "pp", "--attrs", "a", "--in", "msg", "--out", "ua.ct"])), 0);
    let out = labe(dir, &["decrypt", "--pp", "pp", "--sk", "sk", "--in", "ua.ct", "--out", "ua.txt"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("policy not satisfied"));
    assert!(!dir.join("ua.txt").exists());
}

#[test]
fn corrupted_magic_exits_4() {
    let dir = world();
    assert_eq!(code(&labe(dir, &["encrypt", "--pp", "pp", "--attrs", "a,b", "--in", "msg", "--out", "cm.ct"])), 0);
    let mut bytes = std::fs::read(dir.join("cm.ct")).unwrap();
    bytes[..4].copy_from_slice(b"XXXX");
    std::fs::write(dir.join("cm.ct"), bytes).unwrap();
    let out = labe(dir, &["decrypt", "--pp", "pp", "--sk", "sk", "--in", "cm.ct", "--out", "cm.txt"]);
    assert_eq!(code(&out), 4);
    assert!(!dir.join("cm.txt").exists());
}

#[test]
fn seeded_commands_are_reproducible() {
    let dir = world();
    let run = |out: &str| {
        assert_eq!(code(&labe(dir, &["encrypt", "--pp", "pp", "--attrs", "a,b", "--in", "msg", "--out", out, "--seed", SEED])), 0);
        std::fs::read(dir.join(out)).unwrap()
    };
    assert_eq!(run("s1.ct"), run("s2.ct"));
    let out = labe(dir, &["encrypt", "--pp", "pp", "--attrs", " b, a,a ", "--in", "msg", "--out", "s3.ct", "--seed", SEED]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(dir.join("s3.ct")).unwrap(), run("s4.ct"));
    assert_eq!(code(&labe(dir, &["encrypt", "--pp", "pp", "--attrs", "a,b", "--in", "msg", "--out", "s5.ct"])), 0);
    assert_ne!(std::fs::read(dir.join("s5.ct")).unwrap(), run("s6.ct"));
}

#[test]
fn seeded_setup_is_reproducible() {
    let dir = world();
    let out = labe(dir, &["setup", "--params", "params", "--pp", "pp2", "--msk", "msk2", "--seed", SEED]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(dir.join("pp")).unwrap(), std::fs::read(dir.join("pp2")).unwrap());
    assert_eq!(std::fs::read(dir.join("msk")).unwrap(), std::fs::read(dir.join("msk2")).unwrap());
}

#[cfg(unix)]
#[test]
fn master_key_is_owner_only() {
    use std::os::unix::fs::PermissionsExt;
    let mode = std::fs::metadata(world().join("msk")).unwrap().permissions().mode();
    assert_eq!(mode & 0o777, 0o600);
}

#[test]
fn bad_arguments_exit_2() {
    let dir = world();
    for args in [
        &["encrypt", "--pp", "pp", "--attrs", " , ", "--in", "msg", "--out", "e.ct"][..],
        &["encrypt", "--pp", "pp", "--attrs", "a", "--in", "msg", "--out", "msg"],
        &["keygen", "--pp", "pp", "--msk", "msk", "--policy", "a", "--out", "k", "--seed", "xyz"],
        &["keygen", "--pp", "pp", "--msk", "msk", "--policy", "a", "--out", "k", "--seed", &"zz".repeat(32)],
        &["keygen", "--pp", "pp", "--msk", "msk", "--policy", "a AND b AND c", "--out", "k"],
    ] {
        assert_eq!(code(&labe(dir, args)), 2, "{args:?}");
    }
    assert_eq!(std::fs::read(dir.join("msg")).unwrap(), b"ping");
    assert!(!dir.join("e.ct").exists());
    assert!(!dir.join("k").exists());
}

#[test]
fn wrong_artifact_type_exits_4() {
    let dir = world();
    let out = labe(dir, &["decrypt", "--pp", "pp", "--sk", "msk", "--in", "pp", "--out", "w.txt"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn policy_inspect_dumps_the_share_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = labe(dir.path(), &["policy-inspect", "--policy", "a"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("l       1") && text.contains("n_cols  1") && text.contains("a  [1]"), "{text}");

    let out = labe(dir.path(), &["policy-inspect", "--policy", "a AND b"]);
    let text = stdout(&out);
    assert!(text.contains("l       2") && text.contains("n_cols  2"), "{text}");
    assert!(text.contains("a  [1, 1]") && text.contains("b  [0, -1]"), "{text}");
}

#[test]
fn policy_syntax_error_exits_5_with_offset() {
    let dir = tempfile::tempdir().unwrap();
    let out = labe(dir.path(), &["policy-inspect", "--policy", "a AND"]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 5"));
    let out = labe(world(), &["keygen", "--pp", "pp", "--msk", "msk", "--policy", "(a OR", "--out", "k5"]);
    assert_eq!(code(&out), 5);
}
