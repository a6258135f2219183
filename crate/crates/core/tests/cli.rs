use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

struct Work {
    dir: tempfile::TempDir,
}

impl Work {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_noiserank"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.path(name)).unwrap()
    }

    fn write(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }

    fn synth(&self, per_class: usize, rate: f64) {
        self.ok(&[
            "synth",
            "--per-class",
            &per_class.to_string(),
            "--noise-rate",
            &rate.to_string(),
            "--seed",
            "7",
            "--out-embeddings",
            "e.bin",
            "--out-labels",
            "l.tsv",
            "--out-truth",
            "t.tsv",
        ]);
    }
}

fn lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.is_empty()).collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

/// Score rows with a strictly decreasing score, so rank i has id `s{i}`.
fn write_ranked_scores(path: &Path, n: usize) {
    let text: String = (1..=n)
        .map(|r| format!("{r}\ts{r:04}\tc{}\t{}\t1\n", r % 3, (n - r) as f64 * 0.01 - 1.0))
        .collect();
    fs::write(path, text).unwrap();
}

#[test]
fn synth_rank_flags_a_planted_mislabel() {
    let w = Work::new();
    // Two tight 1-D clusters plus one B-labeled point at A's center.
    let pts = [0.0f32, 0.1, 0.2, 10.0, 10.1, 10.2, 0.05];
    let mut bytes = b"NRK1".to_vec();
    bytes.extend_from_slice(&7u32.to_le_bytes());
    bytes.extend_from_slice(&1u32.to_le_bytes());
    for p in pts {
        bytes.extend_from_slice(&p.to_le_bytes());
    }
    fs::write(w.path("e.bin"), bytes).unwrap();
    w.write("l.tsv", "a0\tA\na1\tA\na2\tA\nb0\tB\nb1\tB\nb2\tB\nx\tB\n");
    let stdout = w.ok(&[
        "rank", "--embeddings", "e.bin", "--labels", "l.tsv", "--k", "3", "--normalize", "false",
        "--out", "s.tsv", "--evidence", "ev.tsv", "--removed", "rm.tsv", "--prototypes", "p.tsv",
    ]);
    assert!(stdout.contains("1 flagged"), "{stdout}");
    let scores = w.read("s.tsv");
    let top: Vec<&str> = lines(&scores)[0].split('\t').collect();
    assert_eq!(&top[..3], &["1", "x", "B"]);
    assert_eq!(top[4], "0");
    assert_eq!(lines(&w.read("rm.tsv")), vec!["x"]);
    assert_eq!(lines(&w.read("p.tsv")), vec!["A\ta1", "B\tb0"]);
    assert!(w.read("ev.tsv").contains("x\ta1\tc10\t"));
    assert!(w.path("s.tsv.manifest").exists());

    let explained = w.ok(&["explain", "--scores", "s.tsv", "--evidence", "ev.tsv", "--id", "x"]);
    assert!(explained.contains("a1\tc10"), "{explained}");
}

#[test]
fn synth_then_rank_end_to_end() {
    let w = Work::new();
    w.synth(60, 0.2);
    assert_eq!(lines(&w.read("l.tsv")).len(), 180);
    w.ok(&["rank", "--embeddings", "e.bin", "--labels", "l.tsv", "--k", "20", "--out", "s.tsv", "--evidence", "ev.tsv"]);
    let report = w.ok(&["eval", "--scores", "s.tsv", "--truth", "t.tsv", "--out", "r.txt", "--evidence", "ev.tsv", "--blame-out", "bm.tsv"]);
    assert!(report.contains("recall"), "{report}");
    let kv = w.read("r.txt");
    let recall: f64 = kv
        .lines()
        .find_map(|l| l.strip_prefix("recall="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(recall > 0.5, "{kv}");
    assert_eq!(lines(&w.read("bm.tsv")).len(), 4);
}

#[test]
fn missing_label_file_is_an_input_error() {
    let w = Work::new();
    w.synth(10, 0.1);
    let out = w.run(&["rank", "--embeddings", "e.bin", "--labels", "nope.tsv", "--out", "s.tsv"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.tsv"));
}

#[test]
fn bad_parameters_and_usage() {
    let w = Work::new();
    w.synth(10, 0.1);
    let base = ["rank", "--embeddings", "e.bin", "--labels", "l.tsv", "--out", "s.tsv"];
    let with = |extra: &[&str]| {
        let mut v = base.to_vec();
        v.extend_from_slice(extra);
        code(&w.run(&v))
    };
    assert_eq!(with(&["--alpha", "0.2"]), 4);
    assert_eq!(with(&["--k", "0"]), 4);
    assert_eq!(with(&["--blame-factor", "0.5"]), 4);
    assert_eq!(with(&["--clique-scope", "everything"]), 4);
    assert_eq!(code(&w.run(&["rank", "--bogus"])), 2);
}

#[test]
fn config_file_is_overridden_by_flags_and_recorded() {
    let w = Work::new();
    w.synth(20, 0.1);
    w.write("run.cfg", "k=7\nalpha=0.8\nblame_factor=1.5\n");
    w.ok(&[
        "rank", "--embeddings", "e.bin", "--labels", "l.tsv", "--config", "run.cfg", "--alpha", "0.6",
        "--out", "s.tsv", "--manifest", "m.txt",
    ]);
    let m = w.read("m.txt");
    let ls = lines(&m);
    assert!(ls.contains(&"k=7"), "{m}");
    assert!(ls.contains(&"alpha=0.6"), "{m}");
    assert!(ls.contains(&"blame_factor=1.5"), "{m}");
    assert!(ls.iter().any(|l| l.starts_with("tool_version=")));
    assert!(ls.iter().any(|l| l.starts_with("output.scores=")));

    // Replaying the manifest reproduces the scores exactly.
    let first = w.read("s.tsv");
    w.ok(&["rank", "--config", "m.txt", "--out", "s2.tsv"]);
    assert_eq!(first, w.read("s2.tsv"));
}

#[test]
fn denoise_keeps_flags_by_default() {
    let w = Work::new();
    w.write(
        "s.tsv",
        "1\tz\tA\t0.5\t0\n2\ty\tB\t0.0\t1\n3\tx\tA\t-0.2\t1\n",
    );
    let stdout = w.ok(&["denoise", "--scores", "s.tsv", "--out", "k.txt", "--removed", "r.txt"]);
    assert!(stdout.contains("kept 2 of 3"), "{stdout}");
    assert_eq!(lines(&w.read("k.txt")), vec!["y", "x"]);
    assert_eq!(lines(&w.read("r.txt")), vec!["z"]);

    w.write("l.tsv", "x\tA\ny\tB\nz\tA\n");
    assert_eq!(code(&w.run(&["denoise", "--scores", "s.tsv", "--out", "k.txt", "--delta=-0.1"])), 4);
    w.ok(&["denoise", "--scores", "s.tsv", "--out", "k.txt", "--labels", "l.tsv", "--delta", "0.1"]);
    assert_eq!(lines(&w.read("k.txt")), vec!["x", "y"]);
}

#[test]
fn denoise_top_percent_counts() {
    let w = Work::new();
    write_ranked_scores(&w.path("s.tsv"), 1000);
    w.ok(&["denoise", "--scores", "s.tsv", "--out", "k.txt", "--removed", "r.txt", "--top-percent", "1.8"]);
    let removed = w.read("r.txt");
    let want: Vec<String> = (1..=18).map(|r| format!("s{r:04}")).collect();
    assert_eq!(lines(&removed), want);
    assert_eq!(lines(&w.read("k.txt")).len(), 982);

    w.ok(&["denoise", "--scores", "s.tsv", "--out", "k.txt", "--removed", "r.txt", "--top-percent", "0"]);
    assert!(lines(&w.read("r.txt")).is_empty());
    assert_eq!(lines(&w.read("k.txt")).len(), 1000);

    assert_eq!(code(&w.run(&["denoise", "--scores", "s.tsv", "--out", "k.txt", "--top-percent", "101"])), 4);
    assert_eq!(code(&w.run(&["denoise", "--scores", "s.tsv", "--out", "k.txt", "--top-percent", "100"])), 6);
}

#[test]
fn eval_on_a_perfect_table() {
    let w = Work::new();
    w.write("s.tsv", "1\ta\tX\t0.9\t0\n2\tb\tY\t0.4\t0\n3\tc\tX\t-0.1\t1\n4\td\tY\t-0.3\t1\n");
    w.write("t.tsv", "a\tY\t1\nb\tX\t1\nc\tX\t0\nd\tY\t0\n");
    let out = w.ok(&["eval", "--scores", "s.tsv", "--truth", "t.tsv"]);
    assert!(out.contains("recall 100.00%"), "{out}");
    assert!(out.contains("precision 100.00%"), "{out}");
    assert!(out.contains("average error rate 0.00%"), "{out}");
}

#[test]
fn explain_unknown_id_is_not_found() {
    let w = Work::new();
    w.synth(10, 0.1);
    w.ok(&["rank", "--embeddings", "e.bin", "--labels", "l.tsv", "--k", "5", "--out", "s.tsv", "--evidence", "ev.tsv"]);
    let out = w.run(&["explain", "--scores", "s.tsv", "--evidence", "ev.tsv", "--id", "no-such-id"]);
    assert_eq!(code(&out), 5);
}

#[test]
fn sweep_over_an_objective_table() {
    let w = Work::new();
    w.write("one.tsv", "20\t0.6\t1.5\t0.25\n");
    let out = w.ok(&["sweep", "--objective", "one.tsv", "--out", "sw.tsv", "--best-config", "best.cfg"]);
    assert!(out.contains("best k=20 alpha=0.6 blame_factor=1.5"), "{out}");
    let best = w.read("best.cfg");
    assert!(lines(&best).contains(&"k=20"), "{best}");
    assert!(lines(&best).contains(&"alpha=0.6"), "{best}");

    // Equal losses: the smaller k wins.
    w.write("tie.tsv", "50\t0.5\t1\t0.1\n10\t0.5\t1\t0.1\n20\t0.5\t1\t0.3\n");
    w.ok(&["sweep", "--objective", "tie.tsv", "--out", "sw.tsv", "--best-config", "best.cfg"]);
    assert!(lines(&w.read("best.cfg")).contains(&"k=10"));

    // Then the smaller alpha, then the smaller blame factor.
    w.write("tie2.tsv", "10\t0.5\t1\t0.5\n10\t0.8\t1\t0.1\n10\t0.6\t2\t0.1\n10\t0.6\t1.5\t0.1\n");
    w.ok(&["sweep", "--objective", "tie2.tsv", "--out", "sw.tsv", "--best-config", "best.cfg"]);
    let best = w.read("best.cfg");
    assert!(lines(&best).contains(&"alpha=0.6"), "{best}");
    assert!(lines(&best).contains(&"blame_factor=1.5"), "{best}");
}

#[test]
fn sweep_without_an_objective_is_rejected() {
    let w = Work::new();
    let out = w.run(&["sweep", "--out", "sw.tsv"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn sweep_with_truth_writes_fifteen_evaluations() {
    let w = Work::new();
    w.synth(40, 0.2);
    w.ok(&["sweep", "--embeddings", "e.bin", "--labels", "l.tsv", "--truth", "t.tsv", "--out", "sw.tsv"]);
    assert_eq!(lines(&w.read("sw.tsv")).len(), 15);
}
