//! The full experiment at desk scale: synthetic corpus, feature extraction,
//! 10-fold cross-validation of all five methods, and the rendered table.
//!
//!     cargo run --release --example cross_validation [-- CLASSES PER_CLASS]

use imgrank::cli::synth::write_corpus;
use imgrank::cli::Config;
use imgrank::eval::{make_folds, render_report, run_methods, Method};
use imgrank::imaging::extract_dataset;

fn main() -> imgrank::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("counts are integers"));
    let classes = args.next().unwrap_or(20);
    let per_class = args.next().unwrap_or(50);

    let tmp = tempfile::tempdir().expect("temp dir");
    let config = Config::default();
    write_corpus(tmp.path(), classes, per_class, config.seed)?;
    let dataset = extract_dataset(tmp.path())?;
    println!("{} images in {} classes", dataset.len(), dataset.classes().len());

    let partition = make_folds(&dataset, config.n_folds, config.seed)?;
    println!("fold sizes {:?}", partition.fold_sizes());
    let reports = run_methods(&dataset, &partition, &Method::ALL, &config)?;
    print!("{}", render_report(&reports, Some(&config))?.text);
    for r in &reports {
        if r.fallbacks > 0 {
            println!(
                "{}: {} queries fell back to Euclidean 1-NN",
                r.method.name(),
                r.fallbacks
            );
        }
    }
    Ok(())
}
