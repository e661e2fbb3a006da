use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sepcodes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Parses a binary list file into rows of bits.
fn rows(text: &str) -> Vec<Vec<u8>> {
    text.lines().skip(1).map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect()).collect()
}

/// Naive triple loop, independent of the library's bitmask checker.
fn naive_separating(words: &[Vec<u8>]) -> bool {
    for (i, x) in words.iter().enumerate() {
        for (j, y) in words.iter().enumerate() {
            for (k, z) in words.iter().enumerate() {
                if i == j || j == k || i == k {
                    continue;
                }
                let between = (0..y.len()).all(|c| y[c] == x[c] || y[c] == z[c]);
                if between {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn nr_build_pipes_into_check() {
    let built = run(&["nr", "build"]);
    assert_eq!(code(&built), 0);
    let checked = run_stdin(&["check", "sep2"], &built.stdout);
    assert_eq!(code(&checked), 0);
    assert_eq!(json(&checked)["checks"][0]["result"], "pass");

    let full = run(&["nr", "build", "--full"]);
    let checked = run_stdin(&["check", "sep21"], &full.stdout);
    assert_eq!(code(&checked), 1);
    assert!(json(&checked)["checks"][0]["witness"].is_object());

    let d = run_stdin(&["check", "distances"], &full.stdout);
    assert_eq!(json(&d)["checks"][0]["value"], serde_json::json!([6, 8, 10, 16]));
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(code(&run_stdin(&["check", "sep21"], b"2 3 1 list\n0 1\n")), 2);
    assert_eq!(code(&run_stdin(&["check", "sep21"], b"not a code")), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["check", "sep21", "/nonexistent/file"])), 2);
    assert_eq!(code(&run(&["field", "info", "--p", "6"])), 2);
    assert_eq!(code(&run(&["rates", "--q", "27"])), 2);
    let o = run(&["agcode", "build", "--curve", "hermitian", "--p", "2", "--k", "3", "--n", "4"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn flipped_bits_match_independent_recheck() {
    let base = run(&["nr", "build"]);
    let text = String::from_utf8(base.stdout).unwrap();
    let words = rows(&text);
    let header = text.lines().next().unwrap().to_string();
    let (mut fails, mut passes) = (0, 0);
    // deterministic sweep of (word, coordinate) flips
    for t in 0..12usize {
        let (w, c) = ((t * 37) % words.len(), (t * 5) % 15);
        let mut corrupted = words.clone();
        corrupted[w][c] ^= 1;
        let mut sorted = corrupted.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != corrupted.len() {
            continue;
        }
        let mut file = header.clone() + "\n";
        for r in &corrupted {
            let line: Vec<String> = r.iter().map(|b| b.to_string()).collect();
            file.push_str(&line.join(" "));
            file.push('\n');
        }
        let o = run_stdin(&["check", "sep21"], file.as_bytes());
        let expected = naive_separating(&corrupted);
        assert_eq!(code(&o), if expected { 0 } else { 1 }, "flip word {w} coordinate {c}");
        if expected {
            passes += 1;
        } else {
            fails += 1;
            let wit = &json(&o)["checks"][0]["witness"];
            let get = |k: &str| -> Vec<u8> {
                wit[k].as_array().unwrap().iter().map(|v| v.as_u64().unwrap() as u8).collect()
            };
            let (x, y, z) = (get("x"), get("y"), get("z"));
            assert!((0..15).all(|i| y[i] == x[i] || y[i] == z[i]), "witness is not a collinear triple");
        }
    }
    assert!(fails + passes > 0);
}

#[test]
fn code_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let nr = dir.path().join("nr.txt");
    let sub = dir.path().join("sub.txt");
    let again = dir.path().join("again.txt");
    assert_eq!(code(&run(&["nr", "build", "--full", "-o", p(&nr)])), 0);
    assert_eq!(code(&run(&["nr", "shorten", "--position", "0", p(&nr), "-o", p(&sub)])), 0);
    let short = std::fs::read_to_string(&sub).unwrap();
    assert!(short.starts_with("2 15 128 list"));
    assert_eq!(short, String::from_utf8(run(&["nr", "build"]).stdout).unwrap());
    assert_eq!(code(&run(&["nr", "subcode", "--m", "128", p(&sub), "-o", p(&again)])), 0);
    assert_eq!(std::fs::read_to_string(&again).unwrap(), short);
    assert_eq!(code(&run(&["nr", "subcode", "--m", "129", p(&sub)])), 2);
}

#[test]
fn agcode_build_certify_and_concat() {
    let dir = tempfile::tempdir().unwrap();
    let outer = dir.path().join("outer.txt");
    let div = dir.path().join("d.json");
    let inner = dir.path().join("inner.txt");
    let cat = dir.path().join("cat.txt");
    let o = run(&[
        "agcode", "build", "--curve", "hermitian", "--p", "2", "--k", "2", "--all-points", "-o", p(&outer),
        "--divisor-out", p(&div),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert = json(&o);
    assert_eq!((cert["l2DG"].as_u64(), cert["degD"].as_i64(), cert["dim"].as_u64()), (Some(0), Some(4), Some(4)));
    assert!(cert["checks"].as_array().unwrap().iter().all(|c| c["result"] == "pass"));

    // the written divisor certifies the same code
    let c = run(&["agcode", "certify", p(&div), "--n", "9"]);
    assert_eq!(code(&c), 0);
    assert_eq!(json(&c)["dim"], 4);
    assert_eq!(code(&run(&["check", "intersecting", p(&outer)])), 0);
    let rr = run(&["curve", "rr-dim", p(&div)]);
    assert_eq!(json(&rr)["l"], 4);

    let nr = run(&["nr", "build"]);
    let sub = run_stdin(&["nr", "subcode", "--m", "4", "-o", p(&inner)], &nr.stdout);
    assert_eq!(code(&sub), 0);
    let o = run(&["concat", "--outer", p(&outer), "--inner", p(&inner), "-o", p(&cat)]);
    assert_eq!(code(&o), 0);
    let report = json(&o);
    assert_eq!(report["checks"][0]["value"]["n"], 135);
    assert!(std::fs::read_to_string(&cat).unwrap().starts_with("2 135 256 list"));
    assert_eq!(code(&run(&["check", "sep21", p(&cat)])), 0);
    let s = run(&["--seed", "4", "concat", "--outer", p(&outer), "--inner", p(&inner), "--verify", "sampled"]);
    assert_eq!(code(&s), 0);
    assert_eq!(json(&s)["checks"][0]["mode"], "sampled(100000, seed 4)");
}

#[test]
fn agcode_pair_writes_mutual_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "agcode", "pair", "--curve", "hermitian", "--p", "2", "--k", "2", "--n", "9", "--m", "3", "--out-dir",
        p(dir.path()),
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["lSum"], 0);
    let (a, b) = (dir.path().join("code1.txt"), dir.path().join("code2.txt"));
    assert_eq!(code(&run(&["check", "mutual", p(&a), p(&b)])), 0);
    assert_eq!(code(&run(&["check", "mutual", p(&a)])), 2);
    let d1 = run(&["curve", "rr-dim", p(&dir.path().join("d1.json"))]);
    assert_eq!(json(&d1)["l"], v["dim"]);
}

#[test]
fn curve_commands() {
    let pts = run(&["curve", "points", "--curve", "hermitian", "--p", "3", "--k", "2"]);
    let text = String::from_utf8(pts.stdout).unwrap();
    assert_eq!(text.lines().count(), 28);
    assert_eq!(text.lines().last(), Some("27 inf"));
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.json");
    let o = run(&["curve", "canonical", "--curve", "hermitian", "--p", "3", "--k", "2"]);
    std::fs::write(&k, &o.stdout).unwrap();
    assert_eq!(json(&run(&["curve", "rr-dim", p(&k)]))["l"], 3);
    let basis = json(&run(&["curve", "rr-basis", p(&k)]));
    assert_eq!(basis["basis"].as_array().unwrap().len(), 3);
    let line = run(&["curve", "points", "--curve", "p1", "--p", "2"]);
    assert_eq!(String::from_utf8(line.stdout).unwrap(), "0 0 0\n1 1 0\n2 inf\n");
}

#[test]
fn field_and_rates() {
    assert_eq!(run(&["field", "op", "--p", "2", "--k", "2", "mul", "2", "3"]).stdout, b"1\n");
    assert_eq!(code(&run(&["field", "op", "--p", "2", "--k", "2", "inv", "0"])), 2);
    let info = json(&run(&["field", "info", "--p", "11", "--k", "2"]));
    assert_eq!(info["q"], 121);
    let r = json(&run(&["rates", "--json"]));
    let closed = r["entries"].as_array().unwrap().iter().find(|e| e["name"] == "closed_form").unwrap();
    assert!((closed["value"].as_f64().unwrap() - 0.207565).abs() < 1e-6);
}

#[test]
fn caps_from_environment() {
    let nr = run(&["nr", "build"]);
    let o = bin()
        .args(["check", "sep21"])
        .env("TRIPLE_CAP", "1000")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .and_then(|mut c| {
            c.stdin.take().unwrap().write_all(&nr.stdout)?;
            c.wait_with_output()
        })
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds cap"));
    assert_eq!(code(&run_stdin(&["check", "sep21", "--sampled", "5000"], &nr.stdout)), 0);
}

#[test]
fn repro_is_byte_identical() {
    let a = run(&["--no-timings", "--seed", "3", "repro", "--trials", "2000"]);
    let b = run(&["--no-timings", "--seed", "3", "repro", "--trials", "2000"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let ledger = v["ledger"]["entries"].as_array().unwrap();
    assert!(ledger.iter().any(|e| e["name"] == "new_concat"));
    assert!(v["checks"].as_array().unwrap().len() >= 12);
}
