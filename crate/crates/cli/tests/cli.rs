//! Exit-code and surface behavior of the `colorlit` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_colorlit")
}

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

#[test]
fn lexicon_dump_exits_zero_and_prints_table() {
    let out = run(&["lexicon", "--dump"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    for color in ["red", "green", "black", "white", "blue", "brown", "gray", "yellow", "pink", "purple"] {
        assert!(stdout.contains(&format!("\"{color}\"")), "missing {color}");
    }
    assert!(stdout.contains("\"grey\""));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn missing_required_flag_is_usage_error() {
    let out = run(&["extract", "--catalog", "x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["extract", "--help"]).status.code(), Some(0));
}

#[test]
fn analyze_with_missing_model_dir_is_io_error_naming_path() {
    let dir = tempfile::tempdir().unwrap();
    let hits = dir.path().join("hits.jsonl");
    std::fs::write(&hits, "").unwrap();
    let missing = dir.path().join("no-such-models");
    let out = run(&[
        "analyze",
        "--hits",
        hits.to_str().unwrap(),
        "--catalog",
        fixture("desk/catalog.csv").to_str().unwrap(),
        "--model",
        missing.to_str().unwrap(),
        "--norms",
        fixture("desk/norms.csv").to_str().unwrap(),
        "--out",
        dir.path().join("reports").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no-such-models"), "stderr: {stderr}");
}

#[test]
fn malformed_catalog_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = dir.path().join("catalog.csv");
    std::fs::write(&catalog, "work_id,gutenberg_id,author,title,year\nx,0,a,t,1800\n").unwrap();
    let out = run(&[
        "extract",
        "--catalog",
        catalog.to_str().unwrap(),
        "--conllu-dir",
        dir.path().to_str().unwrap(),
        "--out",
        dir.path().join("hits.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_conllu_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "extract",
        "--catalog",
        fixture("desk/catalog.csv").to_str().unwrap(),
        "--conllu-dir",
        dir.path().to_str().unwrap(),
        "--out",
        dir.path().join("hits.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("w1.conllu"));
}

#[test]
fn duplicate_lexicon_lemma_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let lexicon = dir.path().join("lexicon.json");
    std::fs::write(&lexicon, r#"{"red": ["scarlet"], "pink": ["scarlet"]}"#).unwrap();
    let out = run(&["lexicon", "--lexicon", lexicon.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_authors_rejects_malformed_author_list() {
    let out = run(&[
        "compare-authors",
        "--hits",
        "h.jsonl",
        "--catalog",
        "c.csv",
        "--vec",
        "v.vec",
        "--authors",
        "only-one-name",
        "--color",
        "yellow",
        "--out",
        "outdir",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_authors_writes_projection_points() {
    let dir = tempfile::tempdir().unwrap();
    let hits = dir.path().join("hits.jsonl");
    let reports = dir.path().join("proj");

    let extract = run(&[
        "extract",
        "--catalog",
        fixture("desk/catalog.csv").to_str().unwrap(),
        "--conllu-dir",
        fixture("desk/conllu").to_str().unwrap(),
        "--lexicon",
        fixture("desk/lexicon.json").to_str().unwrap(),
        "--out",
        hits.to_str().unwrap(),
    ]);
    assert!(extract.status.success());

    let out = run(&[
        "compare-authors",
        "--hits",
        hits.to_str().unwrap(),
        "--catalog",
        fixture("desk/catalog.csv").to_str().unwrap(),
        "--vec",
        fixture("desk/vectors.vec").to_str().unwrap(),
        "--authors",
        "Alice North,Bruno South",
        "--color",
        "red",
        "--out",
        reports.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(reports.join("projections.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("color,author,lemma,x,y"));
    // Alice North's red nouns: blood, cheek, flame, lamp, ribbon, sorrow, wine
    // Bruno South's: banner, cloak, rose
    assert_eq!(lines.clone().count(), 10);
    assert!(csv.contains("red,Alice North,blood"));
    assert!(csv.contains("red,Bruno South,banner"));
}

/// Minimal one-shot HTTP stub for the fetch tests.
fn serve_one(status: u16, body: String) -> String {
    use std::io::{BufRead, BufReader, Write};
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        {
            let mut reader = BufReader::new(&mut stream);
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap() == 0 || line.trim_end().is_empty() {
                    break;
                }
            }
        }
        let response = format!(
            "HTTP/1.1 {status} X\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        );
        stream.write_all(response.as_bytes()).unwrap();
    });
    format!("http://{addr}")
}

#[test]
fn fetch_writes_cleaned_text_via_mirror_env() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = dir.path().join("catalog.csv");
    std::fs::write(
        &catalog,
        "work_id,gutenberg_id,author,title,year\nsolo,55,An Author,Solo,1890\n",
    )
    .unwrap();
    let base = serve_one(
        200,
        "header junk\n*** START OF THE PROJECT GUTENBERG EBOOK SOLO ***\nthe story itself\n*** END OF THE PROJECT GUTENBERG EBOOK SOLO ***\nlicense junk\n".into(),
    );
    let out_dir = dir.path().join("texts");
    let out = Command::new(bin())
        .env("COLORLIT_MIRROR", &base)
        .args([
            "fetch",
            "--catalog",
            catalog.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(out_dir.join("solo.txt")).unwrap();
    assert_eq!(text, "the story itself");
}

#[test]
fn quiet_suppresses_progress() {
    let dir = tempfile::tempdir().unwrap();
    let hits = dir.path().join("hits.jsonl");
    let out = run(&[
        "--quiet",
        "extract",
        "--catalog",
        fixture("extract/catalog.csv").to_str().unwrap(),
        "--conllu-dir",
        fixture("extract/conllu").to_str().unwrap(),
        "--out",
        hits.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}
