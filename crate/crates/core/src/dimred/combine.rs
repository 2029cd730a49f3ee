use nalgebra::{DMatrix, DVector};

/// Norms below this are treated as zero blocks.
const ZERO_NORM: f64 = 1e-12;

/// Divides `v` by its Euclidean norm; near-zero vectors become exact zeros.
pub fn normalize_block(v: &DVector<f64>) -> DVector<f64> {
    let norm = v.norm();
    if norm < ZERO_NORM {
        DVector::zeros(v.len())
    } else {
        v / norm
    }
}

/// `normalize(h) ‖ normalize(z)`.
pub fn combine(h: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
    let (h, z) = (normalize_block(h), normalize_block(z));
    DVector::from_iterator(h.len() + z.len(), h.iter().chain(z.iter()).copied())
}

/// Row-wise [`combine`] of two sample-per-row matrices.
pub fn combine_rows(h: &DMatrix<f64>, z: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(h.nrows(), z.nrows(), "row counts differ");
    let mut out = DMatrix::zeros(h.nrows(), h.ncols() + z.ncols());
    for i in 0..h.nrows() {
        let row = combine(&h.row(i).transpose(), &z.row(i).transpose());
        out.row_mut(i).copy_from(&row.transpose());
    }
    out
}

#[cfg(test)]
mod tests {
    use nalgebra::dvector;
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn arithmetic() {
        let out = combine(&dvector![3.0, 4.0], &dvector![1.0, 0.0]);
        assert_eq!(out, dvector![0.6, 0.8, 1.0, 0.0]);
    }

    #[test]
    fn zero_block_stays_zero() {
        let out = combine(&dvector![0.0, 0.0], &dvector![0.0, 2.0]);
        assert_eq!(out, dvector![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn concatenates_dimensions() {
        let out = combine(&DVector::from_element(30, 0.1), &DVector::from_element(30, -2.0));
        assert_eq!(out.len(), 60);
    }

    proptest! {
        #[test]
        fn block_norms_are_zero_or_one(
            h in prop::collection::vec(-1e6f64..1e6, 1..12),
            z in prop::collection::vec(-1e6f64..1e6, 1..12),
        ) {
            let (k, p) = (h.len(), z.len());
            let out = combine(&DVector::from_vec(h), &DVector::from_vec(z));
            for block in [out.rows(0, k), out.rows(k, p)] {
                let n = block.norm();
                prop_assert!(n == 0.0 || (n - 1.0).abs() <= 1e-9, "norm {}", n);
            }
        }
    }
}
