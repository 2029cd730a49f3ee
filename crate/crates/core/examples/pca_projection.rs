//! Fits PCA to correlated Gaussian-ish data, prints the spectrum and saves
//! the model in the plain-text matrix format.
//!
//!     cargo run --example pca_projection [-- OUT_DIR]

use std::path::PathBuf;

use imgrank::dimred::{pca_fit, PcaModel};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> imgrank::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let scales = [5.0, 2.0, 0.5, 0.1, 0.1, 0.1];
    let x = DMatrix::from_fn(200, 6, |_, j| scales[j] * (rng.random::<f64>() - 0.5));

    let model = pca_fit(&x, 3)?;
    let total: f64 = (0..6).map(|j| x.column(j).variance() * 200.0 / 199.0).sum();
    println!("eigenvalue  explained");
    for l in model.eigenvalues.iter() {
        println!("{l:>10.4}  {:>8.1}%", 100.0 * l / total);
    }
    let show = |v: &[f64]| v.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>().join(" ");
    println!("first component: {}", show(model.components.column(0).as_slice()));

    let sample = x.row(0).transpose();
    let z = model.transform(&sample)?;
    let back = model.reconstruct(&z);
    println!("sample 0 → z = {}", show(z.as_slice()));
    println!(
        "reconstruction error with 3 of 6 components: {:.3e}",
        (back - &sample).norm()
    );

    let tmp = tempfile::tempdir().expect("temp dir");
    let dir = std::env::args()
        .nth(1)
        .map_or_else(|| tmp.path().to_path_buf(), PathBuf::from);
    std::fs::create_dir_all(&dir).expect("output dir");
    model.save(&dir)?;
    let loaded = PcaModel::load(&dir)?;
    assert_eq!(
        loaded.transform(&DVector::zeros(6))?,
        model.transform(&DVector::zeros(6))?
    );
    println!("saved pca_mean.mat, pca_u.mat, pca_lambda.mat to {}", dir.display());
    Ok(())
}
