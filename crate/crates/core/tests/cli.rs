use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use imgrank::eval::{make_folds, run_methods, Method};
use imgrank::imaging::{Dataset, FeatureVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn imgrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imgrank")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn small_corpus(dir: &Path) -> std::path::PathBuf {
    let root = dir.join("corpus");
    let out = imgrank(&[
        "synth",
        "--out",
        s(&root),
        "--classes",
        "3",
        "--per-class",
        "10",
        "--seed",
        "7",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    root
}

fn count_files(root: &Path) -> usize {
    fs::read_dir(root)
        .unwrap()
        .map(|d| fs::read_dir(d.unwrap().path()).unwrap().count())
        .sum()
}

#[test]
fn synth_layout_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = small_corpus(dir.path());
    assert_eq!(fs::read_dir(&a).unwrap().count(), 3);
    assert_eq!(count_files(&a), 30);

    let b = dir.path().join("again");
    assert!(imgrank(&[
        "synth",
        "--out",
        s(&b),
        "--classes",
        "3",
        "--per-class",
        "10",
        "--seed",
        "7"
    ])
    .status
    .success());
    for class in fs::read_dir(&a).unwrap() {
        let class = class.unwrap();
        for img in fs::read_dir(class.path()).unwrap() {
            let img = img.unwrap().path();
            let twin = b.join(class.file_name()).join(img.file_name().unwrap());
            assert_eq!(fs::read(&img).unwrap(), fs::read(&twin).unwrap(), "{}", img.display());
        }
    }
}

#[test]
fn extract_shape_and_idempotence() {
    let dir = tempfile::tempdir().unwrap();
    let root = small_corpus(dir.path());
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    assert!(imgrank(&["extract", "--root", s(&root), "--out", s(&first)])
        .status
        .success());
    assert!(imgrank(&["extract", "--root", s(&root), "--out", s(&second)])
        .status
        .success());

    let text = fs::read_to_string(&first).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 31);
    assert!(lines[0].starts_with("id,label,f0,f1,"));
    assert!(lines[0].ends_with(",f166"));
    assert!(lines.iter().all(|l| l.split(',').count() == 169));
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn corrupted_image_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let root = small_corpus(dir.path());
    let class = fs::read_dir(&root).unwrap().next().unwrap().unwrap().path();
    let bad = class.join("broken.png");
    fs::write(&bad, b"\x89PNG\r\n\x1a\nnot really").unwrap();

    let out = imgrank(&["extract", "--root", s(&root), "--out", s(&dir.path().join("f.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("broken.png"), "{}", stderr(&out));
}

#[test]
fn eval_writes_reports_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let root = small_corpus(dir.path());
    let features = dir.path().join("f.csv");
    assert!(imgrank(&["extract", "--root", s(&root), "--out", s(&features)])
        .status
        .success());
    let config = dir.path().join("run.cfg");
    fs::write(
        &config,
        "# small corpus\nnmf_rank = 5\npca_dims = 5\ngraph_k = 4\nn_folds = 5\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");

    let out = imgrank(&[
        "eval",
        "--features",
        s(&features),
        "--config",
        s(&config),
        "--out-dir",
        s(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), table);
    assert!(table.contains("# nmf_rank = 5"));
    assert!(table.contains("# alpha = 0.99"));
    for method in Method::ALL {
        assert!(table.lines().any(|l| l.starts_with(method.name())), "{}", method.name());
        assert!(out_dir.join(format!("confusion_{}.csv", method.slug())).is_file());
    }
    let csv = fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("method,fold,rate"));
    assert_eq!(csv.lines().count(), 1 + 5 * 6);
}

#[test]
fn config_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let features = dir.path().join("f.csv");
    fs::write(&features, "id,label,f0\na/1,a,0.5\nb/1,b,0.25\n").unwrap();
    let out_dir = dir.path().join("out");
    let eval_with = |config: &str| {
        let path = dir.path().join("c.cfg");
        fs::write(&path, config).unwrap();
        imgrank(&[
            "eval",
            "--features",
            s(&features),
            "--config",
            s(&path),
            "--out-dir",
            s(&out_dir),
        ])
    };

    let out = eval_with("n_folds = 1\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("n_folds must be ≥ 2"), "{}", stderr(&out));

    let out = eval_with("graph_kk = 3\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("graph_kk"), "{}", stderr(&out));

    assert_eq!(imgrank(&["eval", "--features"]).status.code(), Some(1));
    assert_eq!(imgrank(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_csv_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let features = dir.path().join("f.csv");
    fs::write(&features, "id,label,f0,f1\na/1,a,0.5,0.5\na/2,a,0.5,oops\n").unwrap();
    let out = imgrank(&[
        "eval",
        "--features",
        s(&features),
        "--out-dir",
        s(&dir.path().join("out")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn indistinguishable_classes_score_at_chance() {
    // both classes draw from one distribution, so every method guesses
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let per_class = 100;
    let records = (0..2 * per_class)
        .map(|i| FeatureVector {
            id: format!("r{i:03}"),
            label: Some(if i < per_class { "a" } else { "b" }.into()),
            values: (0..12).map(|_| rng.random::<f64>()).collect(),
        })
        .collect();
    let data = Dataset::new(records).unwrap();
    let config = imgrank::cli::Config {
        nmf_rank: 4,
        pca_dims: 4,
        nmf_max_iter: 100,
        graph_k: 5,
        n_folds: 5,
        ..Default::default()
    };
    let partition = make_folds(&data, config.n_folds, config.seed).unwrap();
    // 3 binomial standard deviations at p = 0.5
    let bound = 3.0 * (0.25 / data.len() as f64).sqrt();
    for report in run_methods(&data, &partition, &Method::ALL, &config).unwrap() {
        assert!(
            (report.average_rate - 0.5).abs() <= bound,
            "{}: {}",
            report.method.name(),
            report.average_rate
        );
    }
}
