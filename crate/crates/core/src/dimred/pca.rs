//! PCA by symmetric eigendecomposition of the sample covariance.

use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::matio::{read_matrix, write_matrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    pub mean: DVector<f64>,
    /// D×p, orthonormal columns.
    pub components: DMatrix<f64>,
    /// Descending.
    pub eigenvalues: DVector<f64>,
}

/// Flips `v` so that its largest-magnitude entry (first one on ties) is
/// positive.
fn fix_sign(mut v: DVector<f64>) -> DVector<f64> {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
    v
}

/// Fits a `p`-component PCA to the N×D sample-per-row matrix `x`.
pub fn pca_fit(x: &DMatrix<f64>, p: usize) -> Result<PcaModel> {
    let (n, d) = x.shape();
    if n < 2 {
        return Err(Error::out_of_range("pca sample count N", n, "≥ 2"));
    }
    if p == 0 || p > (n - 1).min(d) {
        return Err(Error::out_of_range(
            "pca dims p",
            p,
            format!("1 ≤ p ≤ min(N − 1, D) = {}", (n - 1).min(d)),
        ));
    }
    let mean = x.row_mean().transpose();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = centered.tr_mul(&centered) / (n - 1) as f64;
    let cov = (&cov + cov.transpose()) * 0.5;

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    // stable: equal eigenvalues keep solver order
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order.truncate(p);

    let eigenvalues = DVector::from_iterator(p, order.iter().map(|&i| eig.eigenvalues[i]));
    let columns: Vec<DVector<f64>> = order
        .iter()
        .map(|&i| fix_sign(eig.eigenvectors.column(i).into_owned()))
        .collect();
    Ok(PcaModel {
        mean,
        components: DMatrix::from_columns(&columns),
        eigenvalues,
    })
}

impl PcaModel {
    pub fn dims(&self) -> usize {
        self.components.ncols()
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `z = Uᵀ(x − μ)`.
    pub fn transform(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.components.tr_mul(&(x - &self.mean)))
    }

    /// Projects every row of `x`.
    pub fn transform_rows(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.ncols(),
            });
        }
        let mut centered = x.clone();
        for mut row in centered.row_iter_mut() {
            row -= self.mean.transpose();
        }
        Ok(centered * &self.components)
    }

    /// `μ + U z`.
    pub fn reconstruct(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.mean + &self.components * z
    }

    /// Writes `pca_mean.mat` (D×1), `pca_u.mat` (D×p) and `pca_lambda.mat`
    /// (p×1) into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        write_matrix(
            &dir.join("pca_mean.mat"),
            &DMatrix::from_column_slice(self.dim(), 1, self.mean.as_slice()),
        )?;
        write_matrix(&dir.join("pca_u.mat"), &self.components)?;
        write_matrix(
            &dir.join("pca_lambda.mat"),
            &DMatrix::from_column_slice(self.dims(), 1, self.eigenvalues.as_slice()),
        )
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let mean = read_matrix(&dir.join("pca_mean.mat"))?;
        let components = read_matrix(&dir.join("pca_u.mat"))?;
        let lambda = read_matrix(&dir.join("pca_lambda.mat"))?;
        if mean.ncols() != 1 || lambda.ncols() != 1 {
            return Err(Error::InvalidInput(
                "pca mean and eigenvalues must be column vectors".into(),
            ));
        }
        if components.nrows() != mean.nrows() {
            return Err(Error::DimensionMismatch {
                expected: mean.nrows(),
                got: components.nrows(),
            });
        }
        if components.ncols() != lambda.nrows() {
            return Err(Error::DimensionMismatch {
                expected: components.ncols(),
                got: lambda.nrows(),
            });
        }
        Ok(Self {
            mean: mean.column(0).into_owned(),
            components,
            eigenvalues: lambda.column(0).into_owned(),
        })
    }
}
