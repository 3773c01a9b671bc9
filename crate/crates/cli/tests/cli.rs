use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

struct Env {
    dir: TempDir,
}

impl Env {
    fn new() -> Self {
        Env {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn cache(&self) -> PathBuf {
        self.dir.path().join("cache.json")
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_excircle"))
            .args(args)
            .env("EXCIRCLE_CACHE", self.cache())
            .output()
            .unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn find_example_triangle() {
    let env = Env::new();
    let o = env.run(&["find", "--n", "3", "--height", "100"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("N=3  25, 27, 8"), "{}", stdout(&o));
}

#[test]
fn find_nothing_at_rank_zero() {
    let env = Env::new();
    let o = env.run(&["find", "--n", "1", "--height", "200"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).is_empty());
}

#[test]
fn find_rejects_small_and_decimal_ratios() {
    let env = Env::new();
    let o = env.run(&["find", "--n", "1/5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("1/4"));
    assert_eq!(code(&env.run(&["find", "--n", "0.5"])), 2);
    assert_eq!(code(&env.run(&["find", "--n", "3/0"])), 2);
}

#[test]
fn find_formats() {
    let env = Env::new();
    let o = env.run(&["--no-cache", "find", "--n", "5", "--height", "200", "--csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,f,g,h"));
    assert!(lines.any(|l| l == "5,121,147,40" || l == "5,147,121,40"), "{text}");
    assert!(!text.contains('"'));

    let o = env.run(&["--no-cache", "find", "--n", "3", "--height", "100", "--json"]);
    let first: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(first["n"], "3");
    assert_eq!(first["h"], "8");
    assert_eq!(first["x"], "9/10");
    assert!(!env.cache().exists());
}

#[test]
fn verify_reports_all_ratios() {
    let env = Env::new();
    let o = env.run(&["verify", "--sides", "25,27,8"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("excircle at h: R/r = 3  [integer]"), "{text}");
    assert!(text.contains("incircle:      R/r = 45/11\n"), "{text}");
    assert_eq!(text.matches("R/r =").count(), 4);

    let o = env.run(&["verify", "--sides", "675,676,14"]);
    assert!(stdout(&o).contains("excircle at h: R/r = 48  [integer]"));

    assert_eq!(code(&env.run(&["verify", "--sides", "1,2,3"])), 2);
    assert_eq!(code(&env.run(&["verify", "--sides", "1,2,10"])), 2);
    assert_eq!(code(&env.run(&["verify", "--sides", "1,2"])), 2);
}

#[test]
fn builtin_table_verifies() {
    let env = Env::new();
    let o = env.run(&["table"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,f,g,h,status");
    assert_eq!(lines.len(), 29);
    assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));
    assert!(lines.contains(&"27,24900840,26234439,1866059,ok"));
    assert!(lines.contains(&"50,2401,2535,160,ok"));
    assert!(lines.contains(&"41,158251147734128961,179454792712801424,23209487182638905,ok"));
}

#[test]
fn table_from_file() {
    let env = Env::new();
    let rows = env.path("rows.csv");
    std::fs::write(&rows, "N,f,g,h\n3,25,27,8\n8,49,50,6\n").unwrap();
    let o = env.run(&["table", "--rows", rows.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 3);

    std::fs::write(&rows, "3,25,27,8\n4,25,27,8\n").unwrap();
    let o = env.run(&["table", "--rows", rows.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("4,25,27,8,mismatch"));

    std::fs::write(&rows, "3,25,27\n").unwrap();
    assert_eq!(code(&env.run(&["table", "--rows", rows.to_str().unwrap()])), 2);
}

#[test]
fn torsion_output() {
    let env = Env::new();
    let o = env.run(&["torsion", "--n", "2/3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("Z/2Z x Z/6Z, M=4/3"));
    assert!(stdout(&o).contains("order 2: (5/9, 0)"));
    let o = env.run(&["torsion", "--n", "3"]);
    assert_eq!(stdout(&o).lines().next(), Some("Z/6Z"));
    assert!(stdout(&o).contains("order 12 excluded: yes"));
    assert_eq!(code(&env.run(&["torsion", "--n", "1/4"])), 2);
}

#[test]
fn family_output() {
    let env = Env::new();
    let o = env.run(&["family", "--m", "2", "--variant", "minus"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("N=3  25, 27, 8\n"), "{}", stdout(&o));
    let o = env.run(&["family", "--m", "3", "--variant", "plus", "--json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["n"], "10");
    assert_eq!(v["triangle"]["f"], "121");
    assert_eq!(code(&env.run(&["family", "--m", "1", "--variant", "plus"])), 2);
    assert_eq!(code(&env.run(&["family", "--m", "2", "--variant", "sideways"])), 2);
}

#[test]
fn sequence_json_lines() {
    let env = Env::new();
    let o = env.run(&["sequence", "--n", "3", "--count", "2", "--height", "100"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let recs: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[1]["f"], "98315");
    assert_eq!(recs[1]["u"], "3481/16");
    assert_eq!(code(&env.run(&["sequence", "--n", "1", "--height", "50"])), 3);
    assert_eq!(code(&env.run(&["sequence", "--n", "3", "--count", "0"])), 2);
}

fn svg_counts(path: &Path) -> (usize, usize, String) {
    let svg = std::fs::read_to_string(path).unwrap();
    (svg.matches("<circle").count(), svg.matches("<path").count(), svg)
}

#[test]
fn poncelet_figure() {
    let env = Env::new();
    let out = env.path("fig.svg");
    let scene = env.path("scene.json");
    let args = [
        "--no-cache",
        "poncelet",
        "--n",
        "5/4",
        "--count",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--scene-json",
        scene.to_str().unwrap(),
    ];
    let o = env.run(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (circles, paths, first) = svg_counts(&out);
    assert_eq!((circles, paths), (2, 3));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&scene).unwrap()).unwrap();
    let ratio = v["big_radius"].as_f64().unwrap() / v["small_radius"].as_f64().unwrap();
    assert!((ratio - 1.25).abs() < 1e-12);
    assert_eq!(v["triangles"].as_array().unwrap().len(), 3);

    assert_eq!(code(&env.run(&args)), 0);
    assert_eq!(svg_counts(&out).2, first);
}

#[test]
fn oracle_output() {
    let env = Env::new();
    let o = env.run(&["oracle", "--perimeter", "60", "--n", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l == "3,25,27,8"), "{}", stdout(&o));
    assert_eq!(code(&env.run(&["oracle", "--perimeter", "100", "--n", "1"])), 3);
    let o = env.run(&["oracle", "--perimeter", "9"]);
    assert_eq!(stdout(&o).lines().count(), 8);
}

#[test]
fn cache_round_trip_and_tamper() {
    let env = Env::new();
    assert_eq!(code(&env.run(&["find", "--n", "3", "--height", "100"])), 0);
    let text = std::fs::read_to_string(env.cache()).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["entries"]["3"][0]["source"], "search");

    // Height 1 finds nothing, so this result must come from the cache.
    let o = env.run(&["find", "--n", "3", "--height", "1", "--count", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("25, 27, 8"));
    assert!(stderr(&o).is_empty(), "{}", stderr(&o));
    // Reading alone does not rewrite the file.
    assert_eq!(std::fs::read_to_string(env.cache()).unwrap(), text);

    let mut doc = doc;
    doc["entries"]["3"][0]["triangle"]["h"] = "9".into();
    std::fs::write(env.cache(), serde_json::to_string(&doc).unwrap()).unwrap();
    let o = env.run(&["find", "--n", "3", "--height", "1", "--count", "1"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("dropping cache entry for N=3"), "{}", stderr(&o));

    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["entries"]["3"][0]["point"]["v"] = "-242/27".into();
    doc["entries"]["3"][0]["point"]["u"] = "-11/8".into();
    std::fs::write(env.cache(), serde_json::to_string(&doc).unwrap()).unwrap();
    let o = env.run(&["find", "--n", "3", "--height", "1", "--count", "1"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("not on E_3"), "{}", stderr(&o));
}

#[test]
fn corrupt_cache_is_ignored() {
    let env = Env::new();
    std::fs::write(env.cache(), "{not json").unwrap();
    let o = env.run(&["find", "--n", "3", "--height", "100"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("ignoring malformed cache"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(env.cache()).unwrap()).unwrap();
    assert_eq!(doc["entries"]["3"].as_array().unwrap().len(), 1);

    std::fs::write(env.cache(), r#"{"schema_version": 99, "entries": {}}"#).unwrap();
    let o = env.run(&["find", "--n", "3", "--height", "100"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("schema_version"));
}

#[test]
fn commands_are_deterministic() {
    let env = Env::new();
    let a = env.run(&["--no-cache", "find", "--n", "10", "--height", "300", "--json"]);
    let b = env.run(&["--no-cache", "find", "--n", "10", "--height", "300", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&a), 0);
}
