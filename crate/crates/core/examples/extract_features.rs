//! Renders a tiny synthetic corpus, extracts the 167-d descriptors and
//! writes the feature cache.
//!
//!     cargo run --example extract_features [-- OUT_DIR]

use std::path::PathBuf;

use imgrank::cli::synth::write_corpus;
use imgrank::imaging::{extract_dataset, write_features, COLOR_BINS, FEATURE_DIM, LBP_BINS};

fn main() -> imgrank::Result<()> {
    let tmp = tempfile::tempdir().expect("temp dir");
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| tmp.path().to_path_buf(), PathBuf::from);
    let corpus = out.join("corpus");
    write_corpus(&corpus, 3, 4, 1)?;

    let dataset = extract_dataset(&corpus)?;
    println!(
        "{} images, classes {:?}, {FEATURE_DIM} features each",
        dataset.len(),
        dataset.classes()
    );
    for record in dataset.records().iter().step_by(4) {
        let v = &record.values;
        let peak = |block: &[f64]| {
            block
                .iter()
                .cloned()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0
        };
        println!(
            "{:<22} block sums {:?}  peak colour bin {:>2}  peak LBP bin {:>2}  peak orientation {:>3}°",
            record.id,
            record.block_sums().map(|s| (s * 1e6).round() / 1e6),
            peak(&v[..COLOR_BINS]),
            peak(&v[COLOR_BINS..COLOR_BINS + LBP_BINS]),
            10 * peak(&v[COLOR_BINS + LBP_BINS..]),
        );
    }

    let csv = out.join("features.csv");
    write_features(&csv, &dataset)?;
    println!("wrote {}", csv.display());
    Ok(())
}
