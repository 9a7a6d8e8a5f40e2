use std::process::{Command, Output};
use tempfile::TempDir;

fn trispec(dir: &TempDir, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trispec"))
        .args(args)
        .env("TRISPEC_CONSTANTS_DIR", dir.path())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const T337: [&str; 6] = ["--p", "3", "--q", "3", "--r", "7"];

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run(dir: &TempDir, cmd: &str, extra: &[&str]) -> Output {
    let mut args = vec![cmd.to_string()];
    args.extend(with(&T337, extra));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    trispec(dir, &refs)
}

#[test]
fn spectrum_json_has_metadata_and_entries() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, "spectrum", &["--max-length", "6.0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (meta, entries) = trispec::spectrum::from_json(&stdout(&o)).unwrap();
    assert!(meta.c > 0.0);
    assert_eq!(meta.l0, (6.0 / meta.c).ceil() as usize);
    assert_eq!(meta.source, "enumeration");
    assert!(!entries.is_empty());
    // The constants were cached in the requested directory.
    assert!(dir.path().join("3_3_7.json").exists());
}

#[test]
fn spectrum_csv_round_trips_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = run(&dir, "spectrum", &["--max-length", "5.0"]);
    let b = run(&dir, "spectrum", &["--max-length", "5.0", "--threads", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stderr(&a).starts_with("# p=3 q=3 r=7 ell0=5 c="));
    let entries = trispec::spectrum::from_csv(&stdout(&a)).unwrap();
    assert!(!entries.is_empty());
    assert_eq!(trispec::spectrum::to_csv(&entries).unwrap(), stdout(&a));

    let file = dir.path().join("s.csv");
    let c = run(&dir, "spectrum", &["--max-length", "5.0", "--out", file.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&file).unwrap(), a.stdout);
}

#[test]
fn invalid_triplet_is_a_user_error() {
    let dir = TempDir::new().unwrap();
    let o = trispec(&dir, &["spectrum", "--p", "2", "--q", "3", "--r", "7", "--max-length", "6.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("p ≥ 3 required"), "{}", stderr(&o));
    let o = trispec(&dir, &["constant", "--p", "3", "--q", "3", "--r", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tiny_and_invalid_length_bounds() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, "spectrum", &["--max-length", "0.1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(trispec::spectrum::from_json(&stdout(&o)).unwrap().1.is_empty());
    let o = run(&dir, "spectrum", &["--max-length", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = trispec(&dir, &["spectrum", "--p", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn code_reports_the_u_l_period() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, "code", &["--word", "a2ba2ba2b2*"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("word: a2ba2ba2b2*"));
    assert!(text.contains("admissible: true"));
    assert!(text.contains("geometric code: a2ba2ba2b2*"));
    let length: f64 = text.lines().find_map(|l| l.strip_prefix("length: ")).unwrap().parse().unwrap();
    let trace: f64 = text.lines().find_map(|l| l.strip_prefix("trace: ")).unwrap().parse().unwrap();
    assert!((length - 2.0 * (trace / 2.0).acosh()).abs() < 1e-12);
    assert!(text.lines().any(|l| l.starts_with("L: ")));
    assert!(text.lines().any(|l| l.starts_with("zigzags: ")));
}

#[test]
fn malformed_words_report_the_position() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, "code", &["--word", "a2bxa"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position 3"), "{}", stderr(&o));
    let o = run(&dir, "code", &["--word", "a5b"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn words_streams_admissible_words() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, "words", &["--max-L", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let o = run(&dir, "words", &["--max-L", "2"]);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l.ends_with('*') && trispec::words::CyclicWord::parse(l).is_ok()));
}

#[test]
fn constant_prints_c_and_report() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, "constant", &[]);
    assert_eq!(o.status.code(), Some(0));
    let c: f64 = stdout(&o).trim().strip_prefix("c = ").unwrap().parse().unwrap();
    assert!((c - 0.868003).abs() < 1e-6);
    let o = run(&dir, "constant", &["--report"]);
    assert!(stdout(&o).contains("argmin window"));
    assert!(stdout(&o).contains("\"configurations\""));
}

#[test]
fn validate_agrees_for_345() {
    let dir = TempDir::new().unwrap();
    let o = trispec(&dir, &["validate", "--p", "3", "--q", "4", "--r", "5", "--max-length", "5.0"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("spectra agree"));
    // A ball too small to reach every class shows up as a diff.
    let o = trispec(&dir, &["validate", "--p", "3", "--q", "4", "--r", "5", "--max-length", "5.0", "--radius", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn render_writes_valid_self_contained_svg() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("t.svg");
    let o = run(
        &dir,
        "render",
        &[
            "--depth", "4", "--word", "a2ba2ba2b2", "--geodesic", "0.3,-2.0", "--path", "1.0", "--intervals", "--out",
            file.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = std::fs::read_to_string(&file).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert!(!svg.contains("href"));
    let groups = doc.descendants().filter(|n| n.attribute("id").is_some_and(|id| id.starts_with("overlay-"))).count();
    assert_eq!(groups, 4);
    let o = run(&dir, "render", &["--depth", "99"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&dir, "render", &["--geodesic", "1.0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_and_version_succeed() {
    let dir = TempDir::new().unwrap();
    assert_eq!(trispec(&dir, &["--help"]).status.code(), Some(0));
    assert_eq!(trispec(&dir, &["--version"]).status.code(), Some(0));
    assert_eq!(trispec(&dir, &["frobnicate"]).status.code(), Some(2));
}
