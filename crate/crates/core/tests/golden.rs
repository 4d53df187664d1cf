//! Every corpus request runs end to end and matches its committed report.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test --test golden`.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use subtile::io::{run, AnalysisRequest, Report};

fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "sub"))
        .collect();
    files.sort();
    files
}

fn golden_path(req: &Path) -> PathBuf {
    let name = req.file_stem().unwrap().to_string_lossy().to_string();
    req.parent().unwrap().join("golden").join(format!("{name}.json"))
}

// The version stamp is the one field allowed to differ.
fn stamped(mut r: Report) -> String {
    r.version = String::new();
    r.to_json()
}

#[test]
fn corpus_matches_golden_reports() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let files = corpus();
    assert!(files.len() >= 6);
    let mut mismatched = Vec::new();
    for path in &files {
        // Parse the text directly so the budget environment variable cannot leak in.
        let req = AnalysisRequest::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
        let t = Instant::now();
        let report = run(&req).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(t.elapsed() < Duration::from_secs(10), "{} took {:?}", path.display(), t.elapsed());
        let json = stamped(report.clone());
        assert_eq!(stamped(run(&req).unwrap()), json, "{} is not deterministic", path.display());
        assert_eq!(Report::from_json(&report.to_json()).unwrap(), report, "{} does not round-trip", path.display());
        let gold = golden_path(path);
        if update {
            std::fs::write(&gold, &json).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&gold).unwrap_or_else(|_| panic!("missing {}", gold.display()));
        if want != json {
            mismatched.push(path.display().to_string());
        }
    }
    assert!(mismatched.is_empty(), "reports differ from golden: {mismatched:?}");
}

#[test]
fn corpus_verdicts() {
    let expect = [
        ("babbba_obstructed", "obstructed"),
        ("bbbbaa_swap", "certificate"),
        ("fibonacci_conjugacy", "certificate"),
        ("root_power", "certificate"),
    ];
    for (name, tag) in expect {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.sub"));
        let req = AnalysisRequest::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
        let r = run(&req).unwrap();
        match &r.payload {
            subtile::io::Payload::Conjugacy(c) => {
                assert_eq!(c.verdict.tag(), tag, "{name}");
                assert_eq!(c.rechecked, Some(true), "{name}");
            }
            _ => panic!("{name}: not a conjugacy report"),
        }
        assert_eq!(r.exit_code(), 0);
    }
}

#[test]
fn requests_round_trip() {
    for path in corpus() {
        let req = AnalysisRequest::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(AnalysisRequest::parse(&req.to_string()).unwrap(), req, "{}", path.display());
    }
}
