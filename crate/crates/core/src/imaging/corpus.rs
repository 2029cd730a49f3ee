use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use super::descriptors::{extract_features, COLOR_BINS, FEATURE_DIM, LBP_BINS};
use super::grid::RgbGrid;
use crate::error::{Error, Result};
use crate::fmt::sig;

/// Raster extensions recognised in a corpus (compared case-insensitively).
pub const IMAGE_EXTENSIONS: [&str; 4] = ["png", "jpg", "jpeg", "bmp"];

#[derive(Clone, Debug)]
pub struct ImageRecord {
    pub id: String,
    pub path: PathBuf,
    pub label: String,
    pub pixels: RgbGrid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub id: String,
    pub label: Option<String>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    /// Sums of the colour, texture and shape blocks.
    pub fn block_sums(&self) -> [f64; 3] {
        let (color, rest) = self.values.split_at(COLOR_BINS);
        let (texture, shape) = rest.split_at(LBP_BINS);
        [color, texture, shape].map(|b| b.iter().sum())
    }
}

/// Labelled feature vectors in canonical `(class, id)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    records: Vec<FeatureVector>,
    classes: Vec<String>,
}

impl Dataset {
    /// Sorts `records` into canonical order. Ids must be unique and all
    /// vectors must share one dimension.
    pub fn new(mut records: Vec<FeatureVector>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate record id {}", r.id)));
            }
        }
        if let Some(first) = records.first() {
            let dim = first.values.len();
            if let Some(bad) = records.iter().find(|r| r.values.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: bad.values.len(),
                });
            }
        }
        records.sort_by(|a, b| {
            (a.label.as_deref().unwrap_or(""), a.id.as_str()).cmp(&(b.label.as_deref().unwrap_or(""), b.id.as_str()))
        });
        let mut classes: Vec<String> = records.iter().filter_map(|r| r.label.clone()).collect();
        classes.dedup();
        Ok(Self { records, classes })
    }

    pub fn records(&self) -> &[FeatureVector] {
        &self.records
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.records.first().map_or(0, |r| r.values.len())
    }

    /// Class index of every record; errors on unlabelled records.
    pub fn class_indices(&self) -> Result<Vec<usize>> {
        self.records
            .iter()
            .map(|r| {
                let label = r
                    .label
                    .as_deref()
                    .ok_or_else(|| Error::InvalidInput(format!("record {} has no label", r.id)))?;
                Ok(self
                    .classes
                    .iter()
                    .position(|c| c == label)
                    .expect("classes cover labels"))
            })
            .collect()
    }

    /// N×D matrix, one record per row.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), self.dim(), |i, j| self.records[i].values[j])
    }

    /// Copy of the dataset with record `i` relabelled to `labels[i]`.
    /// Canonical order is not re-established.
    pub fn with_labels(&self, labels: &[Option<String>]) -> Self {
        assert_eq!(labels.len(), self.len());
        let records: Vec<FeatureVector> = self
            .records
            .iter()
            .zip(labels)
            .map(|(r, l)| FeatureVector {
                label: l.clone(),
                ..r.clone()
            })
            .collect();
        let mut classes: Vec<String> = records.iter().filter_map(|r| r.label.clone()).collect();
        classes.sort();
        classes.dedup();
        Self { records, classes }
    }
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?;
    paths.sort();
    Ok(paths)
}

/// Lists `(image path, class)` pairs of a `root/<class>/<image>` corpus in
/// lexicographic order.
pub fn load_corpus(root: &Path) -> Result<Vec<(PathBuf, String)>> {
    if !root.is_dir() {
        return Err(Error::MissingRoot(root.to_path_buf()));
    }
    let class_dirs: Vec<PathBuf> = sorted_entries(root)?.into_iter().filter(|p| p.is_dir()).collect();
    if class_dirs.is_empty() {
        return Err(Error::NoClasses(root.to_path_buf()));
    }
    let mut listing = Vec::new();
    for dir in class_dirs {
        let class = dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| Error::InvalidInput(format!("non UTF-8 class directory {}", dir.display())))?
            .to_string();
        let images: Vec<PathBuf> = sorted_entries(&dir)?
            .into_iter()
            .filter(|p| p.is_file() && is_image(p))
            .collect();
        if images.is_empty() {
            return Err(Error::EmptyClass(class));
        }
        listing.extend(images.into_iter().map(|p| (p, class.clone())));
    }
    Ok(listing)
}

/// Decodes one image into an [`ImageRecord`] with id `<label>/<file name>`.
pub fn read_record(path: &Path, label: &str) -> Result<ImageRecord> {
    let decode_err = |reason: String| Error::Decode {
        path: path.to_path_buf(),
        reason,
    };
    let img = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| decode_err(e.to_string()))?
        .decode()
        .map_err(|e| decode_err(e.to_string()))?
        .to_rgb8();
    let pixels = RgbGrid::from(&img);
    if pixels.width() < 3 || pixels.height() < 3 {
        return Err(Error::ImageTooSmall {
            path: path.to_path_buf(),
            width: pixels.width(),
            height: pixels.height(),
        });
    }
    let file = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    Ok(ImageRecord {
        id: format!("{label}/{file}"),
        path: path.to_path_buf(),
        label: label.to_string(),
        pixels,
    })
}

/// Loads and describes every image under `root`.
pub fn extract_dataset(root: &Path) -> Result<Dataset> {
    let listing = load_corpus(root)?;
    let records = listing
        .iter()
        .map(|(path, label)| read_record(path, label).map(|r| extract_features(&r)))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(records)
}

/// Writes the feature cache: header `id,label,f0,...,f166`, values with 9
/// significant digits.
pub fn write_features(path: &Path, dataset: &Dataset) -> Result<()> {
    let csv_err = |e: csv::Error| Error::io(path, e.into());
    let mut out = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["id".to_string(), "label".to_string()];
    let dim = if dataset.is_empty() { FEATURE_DIM } else { dataset.dim() };
    header.extend((0..dim).map(|i| format!("f{i}")));
    out.write_record(&header).map_err(csv_err)?;
    for r in dataset.records() {
        let mut row = vec![r.id.clone(), r.label.clone().unwrap_or_default()];
        row.extend(r.values.iter().map(|&v| sig(v, 9)));
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a feature cache written by [`write_features`]. An empty label
/// column means "unlabelled".
pub fn read_features(path: &Path) -> Result<Dataset> {
    let parse_err = |line: u64, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => parse_err(1, format!("{other:?}")),
        })?;
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.len() < 3 || &header[0] != "id" || &header[1] != "label" {
        return Err(parse_err(1, "expected header id,label,f0,...".into()));
    }
    for (i, name) in header.iter().skip(2).enumerate() {
        if name != format!("f{i}") {
            return Err(parse_err(1, format!("column {} should be f{i}, found {name}", i + 2)));
        }
    }
    let dim = header.len() - 2;
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != dim + 2 {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", dim + 2, row.len()),
            ));
        }
        let values = row
            .iter()
            .skip(2)
            .map(|f| {
                let v: f64 = f
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid number `{f}`")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_err(line, format!("non-finite value `{f}`")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let label = (!row[1].is_empty()).then(|| row[1].to_string());
        records.push(FeatureVector {
            id: row[0].to_string(),
            label,
            values,
        });
    }
    Dataset::new(records)
}
