//! Labels the test points of one split with manifold-ranking 1-NN and with
//! plain Euclidean 1-NN.
//!
//!     cargo run --example classify

use imgrank::classify::{euclidean_nn_classify, rank_nn_classify, LabeledIndex};
use imgrank::graphrank::{auto_sigma, build_knn_graph, Sigma};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> imgrank::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let classes = 3;
    let per_class = 20;
    let n = classes * per_class;
    let centers = [(0.0, 0.0), (3.0, 0.0), (1.5, 2.5)];
    let truth: Vec<usize> = (0..n).map(|i| i / per_class).collect();
    let pts = DMatrix::from_fn(n, 2, |i, j| {
        let c = centers[truth[i]];
        (if j == 0 { c.0 } else { c.1 }) + 1.2 * (rng.random::<f64>() - 0.5)
    });

    // every fourth point is held out
    let test: Vec<usize> = (0..n).filter(|i| i % 4 == 0).collect();
    let train: Vec<usize> = (0..n).filter(|i| i % 4 != 0).collect();
    let index = LabeledIndex::new(n, train.iter().map(|&i| (i, truth[i])).collect(), test.clone())?;

    let train_pts = DMatrix::from_fn(train.len(), 2, |r, j| pts[(train[r], j)]);
    let train_labels: Vec<usize> = train.iter().map(|&i| truth[i]).collect();
    let sigma = auto_sigma(&train_pts, 5)?;
    let graph = build_knn_graph(&pts, 5, Sigma::Fixed(sigma))?;

    let (mut ranked_hits, mut euclid_hits) = (0, 0);
    for &q in &test {
        let ranked = rank_nn_classify(&graph, Some(&pts), &index, q, 0.99)?;
        let euclid = euclidean_nn_classify(&train_pts, &train_labels, &pts.row(q).transpose())?;
        ranked_hits += usize::from(ranked.class == truth[q]);
        euclid_hits += usize::from(euclid == truth[q]);
        println!(
            "node {q:>2} true {}  ranked {} (via node {:>2}{})  euclidean {}",
            truth[q],
            ranked.class,
            ranked.node,
            if ranked.fallback { ", fallback" } else { "" },
            euclid
        );
    }
    println!(
        "ranking 1-NN {ranked_hits}/{}  euclidean 1-NN {euclid_hits}/{}",
        test.len(),
        test.len()
    );
    Ok(())
}
