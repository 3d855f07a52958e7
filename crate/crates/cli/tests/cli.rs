use std::fs;
use std::process::Command;

use pfsa_cli::bench::{run_bench, write_csv, BenchConfig};
use pfsa_cli::run;
use pfsa_core::machine::Pfsa;

fn pfsa(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pfsa").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn fixture_file(dir: &tempfile::TempDir) -> String {
    let path = dir.path().join("fixture.txt");
    let p = path.to_str().unwrap().to_string();
    assert_eq!(pfsa(&["gen-fixture", "--out", &p]).0, 0);
    p
}

#[test]
fn gen_fixture_writes_648_binary_symbols() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture_file(&dir)).unwrap();
    assert_eq!(text.len(), 648);
    assert!(text.chars().all(|c| c == '0' || c == '1'));
}

#[test]
fn infer_reports_method_specific_state_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(&dir);
    for (method, states) in [("ip", 3), ("cssr", 4), ("clique", 3)] {
        let (code, out, err) = pfsa(&["infer", "--method", method, "--L", "2", "--alpha", "0.05", "--in", &input]);
        assert_eq!(code, 0, "{err}");
        let m = Pfsa::from_json(&out).unwrap();
        assert_eq!(m.num_states(), states, "{method}");
        assert_eq!(m.to_json(), out);
    }
    let (code, out, _) = pfsa(&["infer", "--method", "ip", "--in", &input, "--format", "dot", "--test", "ks"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph"));
}

#[test]
fn infer_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(&dir);
    let out = dir.path().join("m.json");
    let (code, stdout, _) = pfsa(&["infer", "--method", "clique", "--in", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert_eq!(Pfsa::from_json(&fs::read_to_string(out).unwrap()).unwrap().num_states(), 3);
}

#[test]
fn graph_and_lp_exports() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(&dir);
    let (code, out, _) = pfsa(&["graph", "--in", &input, "--L", "2", "--alpha", "0.05"]);
    assert_eq!(code, 0);
    assert_eq!(out, "00 10\n11 10\n");
    let (code, out, _) = pfsa(&["lp", "--in", &input]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Minimize\n obj: p_0 + p_1 + p_2 + p_3\n"));
    assert!(out.contains("func_0_0"));
    let (_, out, _) = pfsa(&["lp", "--in", &input, "--nondeterministic"]);
    assert!(!out.contains("func_0_0"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(&dir);
    let (code, _, err) = pfsa(&["infer", "--method", "ip", "--bogus"]);
    assert_eq!(code, 2);
    assert!(err.contains("--bogus"));
    assert_eq!(pfsa(&["infer", "--method", "nope", "--in", &input]).0, 2);
    assert_eq!(pfsa(&["infer", "--method", "ip", "--alpha", "1.5", "--in", &input]).0, 2);
    assert_eq!(pfsa(&["infer", "--method", "ip", "--L", "0", "--in", &input]).0, 2);
    assert_eq!(pfsa(&["infer", "--method", "ip", "--in", "/definitely/missing"]).0, 1);
    let short = dir.path().join("short.txt");
    fs::write(&short, "01").unwrap();
    assert_eq!(pfsa(&["infer", "--method", "cssr", "--L", "2", "--in", short.to_str().unwrap()]).0, 1);
    assert_eq!(pfsa(&["--help"]).0, 0);
}

#[test]
fn binary_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_file(&dir);
    let out = Command::new(env!("CARGO_BIN_EXE_pfsa"))
        .args(["infer", "--method", "ip", "--in", &input])
        .output()
        .unwrap();
    assert!(out.status.success());
    let status = Command::new(env!("CARGO_BIN_EXE_pfsa")).arg("frobnicate").output().unwrap().status;
    assert_eq!(status.code(), Some(2));
}

const SMALL: &str = "methods = [\"cssr\", \"ip\", \"clique\"]
alphabet_sizes = [2, 3]
lengths = [60, 200]
L = 2
alpha = 0.05
seed = 9
repetitions = 2
threads = 3
";

fn strip_seconds(csv: &str) -> String {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            if f.len() == 7 && !l.starts_with('#') {
                f[4] = "";
            }
            f.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn bench_csv_is_deterministic_and_complete() {
    let cfg = BenchConfig::parse(SMALL).unwrap();
    let render = || {
        let rows = run_bench(&cfg).unwrap();
        let mut buf = Vec::new();
        write_csv(&cfg, &rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    };
    let a = render();
    let b = render();
    assert_eq!(strip_seconds(&a), strip_seconds(&b));
    let body: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "method,alphabet,length,rep,seconds,states,flag");
    assert_eq!(body.len(), 1 + 3 * 2 * 2 * 2);
    assert!(a.starts_with("# source: seeded random deterministic pFSA"));
}

#[test]
fn bench_flags_follow_state_counts() {
    let cfg = BenchConfig::parse(SMALL).unwrap();
    let rows = run_bench(&cfg).unwrap();
    for point in rows.chunks(3) {
        let ip = point[1].states.unwrap();
        let cssr = &point[0];
        let clique = &point[2];
        assert_eq!(cssr.flags.contains(&"cssr-below-optimum"), cssr.states.unwrap() < ip);
        if let Some(c) = clique.states {
            assert_eq!(clique.flags.contains(&"mismatch"), c != ip);
            assert!(c >= ip);
        }
    }
}

#[test]
fn bench_config_validation() {
    assert!(BenchConfig::parse(&SMALL.replace("repetitions = 2", "repetitions = 0")).is_err());
    assert!(BenchConfig::parse(&SMALL.replace("[60, 200]", "[200, 60]")).is_err());
    assert!(BenchConfig::parse(&SMALL.replace("\"ip\"", "\"lp\"")).is_err());
    assert!(BenchConfig::parse(&format!("{SMALL}colour = 3\n")).is_err());
    let cfg = BenchConfig::parse(SMALL).unwrap();
    assert_eq!(cfg.timeout.as_secs(), 300);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.conf");
    fs::write(&path, SMALL.replace("lengths = [60, 200]", "lengths = [60]")).unwrap();
    let (code, out, _) = pfsa(&["bench", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3 * 2 * 2);
    fs::write(&path, "methods = 3").unwrap();
    assert_eq!(pfsa(&["bench", "--config", path.to_str().unwrap()]).0, 1);
}
