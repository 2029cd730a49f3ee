//! Command-line driver: `synth`, `extract` and `eval`.

mod config;
pub mod synth;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{Config, KEYS as CONFIG_KEYS};

use crate::error::{Error, Result};
use crate::eval::{confusion_csv, make_folds, render_report, run_methods, EvalReport, Method};
use crate::imaging::{extract_dataset, read_features, write_features, Dataset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "imgrank",
    version,
    about = "Image classification with NMF/PCA reduction and manifold ranking"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic directory-per-class image corpus.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        classes: usize,
        #[arg(long = "per-class", default_value_t = 50)]
        per_class: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Extract the 167-d feature vector of every image into a CSV cache.
    Extract {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-validate the five methods and write the report files.
    Eval {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
}

pub fn cmd_synth(out: &Path, classes: usize, per_class: usize, seed: u64) -> Result<()> {
    synth::write_corpus(out, classes, per_class, seed)
}

/// Extracts features for the corpus under `root` and writes the CSV cache.
pub fn cmd_extract(root: &Path, out: &Path) -> Result<Dataset> {
    let dataset = extract_dataset(root)?;
    write_features(out, &dataset)?;
    Ok(dataset)
}

/// Output of [`cmd_eval`].
pub struct EvalRun {
    pub config: Config,
    pub reports: Vec<EvalReport>,
    /// Contents of `report.txt`.
    pub table: String,
}

/// Runs every method on the cached features and writes `report.txt`,
/// `report.csv` and one `confusion_<method>.csv` per method into `out_dir`.
pub fn cmd_eval(features: &Path, config: Option<&Path>, out_dir: &Path) -> Result<EvalRun> {
    let config = match config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    let dataset = read_features(features)?;
    if dataset.is_empty() {
        return Err(Error::InvalidInput(format!("{} holds no records", features.display())));
    }
    let partition = make_folds(&dataset, config.n_folds, config.seed)?;
    let reports = run_methods(&dataset, &partition, &Method::ALL, &config)?;
    let rendered = render_report(&reports, Some(&config))?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let write = |name: String, contents: &str| {
        let path = out_dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))
    };
    write("report.txt".into(), &rendered.text)?;
    write("report.csv".into(), &rendered.csv)?;
    for report in &reports {
        write(
            format!("confusion_{}.csv", report.method.slug()),
            &confusion_csv(report),
        )?;
    }
    Ok(EvalRun {
        config,
        reports,
        table: rendered.text,
    })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 success, 1 usage error, 2 data error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Synth {
            out,
            classes,
            per_class,
            seed,
        } => cmd_synth(&out, classes, per_class, seed),
        Command::Extract { root, out } => cmd_extract(&root, &out).map(|ds| {
            eprintln!("extracted {} images in {} classes", ds.len(), ds.classes().len());
        }),
        Command::Eval {
            features,
            config,
            out_dir,
        } => cmd_eval(&features, config.as_deref(), &out_dir).map(|run| print!("{}", run.table)),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_DATA
            }
        }
    }
}
