use std::path::PathBuf;
use std::process::{Command, Output};

fn bench_file(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "benchmarks", name].iter().collect()
}

fn repinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repinv")).args(args).output().unwrap()
}

fn infer(name: &str, extra: &[&str]) -> Output {
    let path = bench_file(name);
    let mut args = vec!["infer", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    repinv(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const NO_DUP: &str = "fun (l : list) -> let rec nd (l : list) : bool = match l with \
     | Nil -> true | Cons (h, tl) -> not (lookup tl h) && nd tl in nd l";

#[test]
fn infer_exit_codes() {
    let o = infer("listset.inv", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lookup"), "{}", stdout(&o));

    let o = infer("buggyset.inv", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("Counterexample"));
    assert!(stdout(&o).contains("insert"));

    let o = infer("listset-eset.inv", &["--mode", "oneshot"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported mode"));

    let o = infer("sorted-table.inv", &["--mode", "conjstr"]);
    assert_eq!(o.status.code(), Some(3));

    let o = infer("heap.inv", &["--timeout", "1", "--budget-apps", "1000000", "--budget-abstract-count", "100000"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn bad_input_is_a_usage_error() {
    let dir = std::env::temp_dir().join(format!("repinv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.inv");
    std::fs::write(&bad, "type list = Nil | Cons of nat *\n").unwrap();
    let o = repinv(&["infer", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert_eq!(repinv(&["infer", dir.join("missing.inv").to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(repinv(&["infer"]).status.code(), Some(2), "clap reports usage errors itself");
}

#[test]
fn check_verdicts() {
    let f = bench_file("listset.inv");
    let f = f.to_str().unwrap();
    assert_eq!(repinv(&["check", f, NO_DUP]).status.code(), Some(0));
    assert_eq!(repinv(&["check", f, "fun (l : list) -> true"]).status.code(), Some(5));
    let head = "fun (l : list) -> match l with Nil -> true | Cons (h, tl) -> h <> 1";
    assert_eq!(repinv(&["check", f, head]).status.code(), Some(5));
    assert_eq!(repinv(&["check", f, "fun (l : list) -> 3"]).status.code(), Some(1));
}

#[test]
fn empty_corpus_gives_header_only() {
    let dir = std::env::temp_dir().join(format!("repinv-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let manifest = dir.join("corpus.toml");
    std::fs::write(&manifest, "# nothing here\n").unwrap();
    let o = repinv(&["bench", manifest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Name,Size,Time,TVT,TVC,MVT,TST,TSC,MST,Outcome,Mode\n");
}

#[test]
fn bench_rows_and_csv_file() {
    let dir = std::env::temp_dir().join(format!("repinv-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for f in ["toy-cycle.inv", "toy-leak.inv"] {
        std::fs::copy(bench_file(f), dir.join(f)).unwrap();
    }
    let manifest = dir.join("corpus.toml");
    std::fs::write(
        &manifest,
        "[[benchmark]]\nname = \"cycle\"\nfile = \"toy-cycle.inv\"\nexpect = \"invariant\"\n\n\
         [[benchmark]]\nname = \"leak\"\nfile = \"toy-leak.inv\"\nexpect = \"spec-violation\"\n\n\
         [[benchmark]]\nname = \"gone\"\nfile = \"missing.inv\"\nexpect = \"invariant\"\n",
    )
    .unwrap();
    let csv = dir.join("out.csv");
    let o = repinv(&["bench", manifest.to_str().unwrap(), "--repeat", "2", "--mode", "hanoi", "--mode", "la", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let summary: Vec<(&str, &str, &str)> = rows.iter().map(|r| (r[0], r[9], r[10])).collect();
    assert_eq!(
        summary,
        [
            ("cycle", "invariant", "hanoi"),
            ("cycle", "invariant", "la"),
            ("leak", "spec-violation", "hanoi"),
            ("leak", "spec-violation", "la"),
            ("gone", "error", "hanoi"),
            ("gone", "error", "la"),
        ]
    );
}
