//! Factorizes data built from a few nonnegative parts and shows the
//! objective trace and the recovered codes.
//!
//!     cargo run --example nmf_basis

use imgrank::dimred::nmf_fit;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> imgrank::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // four disjoint "parts" over 24 dimensions
    let parts = DMatrix::from_fn(4, 24, |p, j| if j / 6 == p { 1.0 } else { 0.0 });
    let mixing = DMatrix::from_fn(40, 4, |_, _| rng.random::<f64>());
    let x = &mixing * &parts;

    let (model, h) = nmf_fit(&x, 4, 1000, 1e-9, 42)?;
    let trace = &model.objective_trace;
    println!("{} iterations", model.iterations_run);
    for &i in &[0, 9, 99, trace.len() - 1] {
        if let Some(e) = trace.get(i) {
            println!("  iter {:>4}  ‖X̃ − WH‖ = {e:.3e}", i + 1);
        }
    }

    println!("basis columns (rounded, one row per dimension group):");
    for group in 0..4 {
        let row: Vec<String> = (0..4).map(|c| format!("{:5.2}", model.w[(group * 6, c)])).collect();
        println!("  dims {:>2}..{:>2}: {}", group * 6, group * 6 + 5, row.join(" "));
    }

    let sample = x.row(0).transpose();
    let code = model.transform(&sample, 2000, 1e-12)?;
    let show = |v: Vec<f64>| v.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>().join(" ");
    println!(
        "training code of sample 0: {}",
        show(h.column(0).iter().copied().collect())
    );
    println!("re-encoded with W frozen:  {}", show(code.iter().copied().collect()));
    Ok(())
}
