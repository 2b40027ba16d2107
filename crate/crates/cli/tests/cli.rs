use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eurbound"))
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eurbound-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn bounds(out: &Output) -> Vec<(String, f64)> {
    rows(out).into_iter().map(|r| (r[0].clone(), r[6].parse().unwrap())).collect()
}

const BELL: &str = "dims 2 2\n0.7071067811865476 0\n0 0\n0 0\n0.7071067811865476 0\n";

#[test]
fn bell_state_bounds_reach_one() {
    let dir = scratch_dir("bell");
    let f = write(&dir, "bell.txt", BELL);
    let out = bin().args(["bound", f.to_str().unwrap(), "--x", "computational", "--z", "hadamard"]).output().unwrap();
    assert!(out.status.success());
    let b = bounds(&out);
    for name in ["mu", "fsd"] {
        let v = b.iter().find(|(n, _)| n == name).unwrap().1;
        assert!((v - 1.0).abs() < 1e-9, "{name}: {v}");
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn product_state_is_not_certified() {
    let dir = scratch_dir("product");
    let f = write(&dir, "prod.txt", "dims 2 2\n1 0\n0 0\n0 0\n0 0\n");
    let out = bin().args(["bound", f.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    for r in rows(&out) {
        let v: f64 = r[6].parse().unwrap();
        assert!(v <= 1e-12, "{}: {v}", r[0]);
        assert_eq!(r[8], "0");
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn separable_mixture_is_not_certified() {
    // equal mixture of |00> and |++>
    let mut m = [[0.0f64; 4]; 4];
    m[0][0] += 0.5;
    for row in m.iter_mut() {
        for e in row.iter_mut() {
            *e += 0.5 * 0.25;
        }
    }
    let mut text = String::from("dims 2 2\ndensematrix\n");
    for row in m {
        for e in row {
            text.push_str(&format!("{e} 0\n"));
        }
    }
    let dir = scratch_dir("mixture");
    let f = write(&dir, "mix.txt", &text);
    let out = bin().args(["bound", f.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for (name, v) in bounds(&out) {
        assert!(v <= 1e-9, "{name}: {v}");
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = scratch_dir("config");
    let bad_norm = write(&dir, "bad.txt", "dims 1 2\n1 0\n1 0\n");
    let cases: Vec<Vec<String>> = vec![
        vec!["fig1".into(), "--lmin".into(), "1".into()],
        vec!["fig2".into(), "--points".into(), "0".into()],
        vec!["audit".into(), "--relation".into(), "nope".into()],
        vec!["audit".into(), "--dims".into(), "9x9".into()],
        vec!["fig8".into(), "--g".into(), "1".into()],
        vec!["bound".into(), dir.join("missing.txt").to_string_lossy().into()],
        vec!["bound".into(), bad_norm.to_string_lossy().into()],
        vec!["fig1".into(), "--threads".into(), "0".into()],
        vec!["nonsense".into()],
    ];
    for args in cases {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn failed_run_leaves_no_file() {
    let dir = scratch_dir("partial");
    let target = dir.join("out.csv");
    let out = bin()
        .args(["fig1", "--lmin", "1", "-o", target.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let leftovers: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert!(leftovers.is_empty());

    let out = bin().args(["fig1", "--lmax", "4", "-o", target.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("# eurbound"));
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn repeated_runs_match() {
    let args = ["audit", "--relation", "fsd", "--dims", "3x3", "--trials", "100", "--seed", "4"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).args(["--threads", "3"]).output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(rows(&a), rows(&b));
    assert_eq!(rows(&a)[0][rows(&a)[0].len() - 1], "0");
}
