//! Ranks points on two interleaved arcs from a single query: the scores
//! follow the arc instead of straight-line distance.
//!
//!     cargo run --example manifold_ranking [-- EDGES_FILE]

use std::f64::consts::PI;

use imgrank::graphrank::{build_knn_graph, manifold_rank_closed, manifold_rank_iterative, Sigma, Solve};
use nalgebra::DMatrix;

fn main() -> imgrank::Result<()> {
    let per_arc = 30;
    let pts = DMatrix::from_fn(2 * per_arc, 2, |i, j| {
        let t = PI * (i % per_arc) as f64 / (per_arc - 1) as f64;
        let (x, y) = if i < per_arc {
            (t.cos(), t.sin())
        } else {
            (1.0 - t.cos(), 0.4 - t.sin())
        };
        if j == 0 {
            x
        } else {
            y
        }
    });
    let graph = build_knn_graph(&pts, 4, Sigma::Auto)?;
    let query = 0;

    let closed = manifold_rank_closed(&graph, query, 0.99)?;
    let iter = manifold_rank_iterative(&graph, query, 0.99, 1e-12, 100_000)?;
    if let Solve::Iterative { iterations, converged } = iter.solve {
        println!(
            "iterative solve: {iterations} iterations, converged {converged}, max gap to closed form {:.2e}",
            (&closed.scores - &iter.scores).amax()
        );
    }

    let others: Vec<usize> = (0..pts.nrows()).filter(|&i| i != query).collect();
    let dist = |i: usize| (pts.row(i) - pts.row(query)).norm();
    let mut by_score = others.clone();
    by_score.sort_by(|&a, &b| closed.scores[b].total_cmp(&closed.scores[a]));
    let mut by_dist = others;
    by_dist.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)));

    println!("query {query} sits at the end of arc A (nodes 0..{per_arc})");
    println!("rank  by score        by distance");
    for r in 0..8 {
        let (s, d) = (by_score[r], by_dist[r]);
        let arc = |i: usize| if i < per_arc { 'A' } else { 'B' };
        println!("{:>4}  node {s:>2} arc {}   node {d:>2} arc {}", r + 1, arc(s), arc(d));
    }
    let first_b = |order: &[usize]| order.iter().position(|&i| i >= per_arc).unwrap() + 1;
    println!(
        "first arc-B node: rank {} by score, rank {} by distance",
        first_b(&by_score),
        first_b(&by_dist)
    );

    if let Some(path) = std::env::args().nth(1) {
        graph.write_edges(path.as_ref())?;
        println!("edge list written to {path}");
    }
    Ok(())
}
