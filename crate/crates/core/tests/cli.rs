use std::path::Path;
use std::process::{Command, Output};

fn bohmdec(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bohmdec"));
    c.args(args).env_remove("BOHMDEC_THREADS").env("SOURCE_DATE_EPOCH", "1700000000");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

const SMALL: &str = "name = small
experiments = timescales, velocity-ensemble, conditional-velocity-bimodality
time.values = 0, 2
grid.nx = 96
grid.np = 96
velocity.points = 11
bimodality.modes = 64
bimodality.slices = 16
seed = 7
";

#[test]
fn list_experiments_names_all_seven() {
    let o = bohmdec(&["list-experiments"], &[]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert_eq!(s.lines().count(), 7);
    assert!(s.contains("conditional-velocity-bimodality"));
}

#[test]
fn unknown_key_exits_2_with_suggestion_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.scn", "name = x\ngama = 0.1\n");
    let out = dir.path().join("out");
    let o = bohmdec(&["run", &f, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("model.gamma"), "{err}");
    assert!(!out.exists());
    assert_eq!(bohmdec(&["validate", &f], &[]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    // timescales succeeds; the decoherence factor is outside its short-time window
    let f = write(dir.path(), "s.scn", "name = x\nexperiments = timescales, decoherence-insufficiency\ndecoherence.time = 1\n");
    let out = dir.path().join("out");
    let o = bohmdec(&["run", &f, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("decoherence-insufficiency"));
    assert!(!out.exists());
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.scn", SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(bohmdec(&["run", &f, "--out", a.to_str().unwrap(), "--threads", "1"], &[]).status.success());
    assert!(bohmdec(&["run", &f, "--out", b.to_str().unwrap()], &[("BOHMDEC_THREADS", "3")]).status.success());
    let (ta, tb) = (tree(&a), tree(&b));
    // timescales 2, velocity-ensemble 4, bimodality 3, manifests included
    assert_eq!(ta.len(), 9);
    // manifests record output.dir, which differs; every other file must match exactly
    for ((na, ba), (nb, bb)) in ta.iter().zip(&tb) {
        assert_eq!(na, nb);
        if !na.ends_with("manifest.json") {
            assert!(ba == bb, "{na} differs");
        }
    }
}

#[test]
fn manifest_records_hash_seed_and_file_digests() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.scn", SMALL);
    let out = dir.path().join("o");
    assert!(bohmdec(&["run", &f, "--out", out.to_str().unwrap(), "--seed", "11"], &[]).status.success());
    let m: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("small/conditional-velocity-bimodality/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["seed"], 11);
    assert_eq!(m["scenario"]["seed"], "11");
    assert_eq!(m["created_at"], "2023-11-14T22:13:20Z");
    assert_eq!(m["scenario_hash"].as_str().unwrap().len(), 64);
    assert!(m["git_rev"].is_string());
    assert_eq!(m["task_seeds"].as_object().unwrap().len(), 17);
    let csv = std::fs::read(out.join("small/conditional-velocity-bimodality/slices.csv")).unwrap();
    let digest = bohmdec::cli::Artifact { file: String::new(), bytes: csv }.sha256();
    assert_eq!(m["files"]["slices.csv"], digest);
}

#[test]
fn velocity_csv_has_the_fixed_schema() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.scn", SMALL);
    let out = dir.path().join("o");
    assert!(bohmdec(&["run", &f, "--out", out.to_str().unwrap()], &[]).status.success());
    let body = std::fs::read_to_string(out.join("small/velocity-ensemble/velocity_t1.csv")).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("x,v_E,p_cl_over_m,margin"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 4);
    // 17 significant digits
    assert_eq!(first[0].split('e').next().unwrap().trim_start_matches('-').len(), 18);
}
