//! Corpus loading and visual feature extraction.
//!
//! Every image is resampled to 128×128 and described by three normalized
//! histograms that are concatenated into one [`FeatureVector`]:
//!
//! | block   | range        | descriptor                                   |
//! |---------|--------------|----------------------------------------------|
//! | colour  | `[0, 72)`    | HSV histogram, 8 hue × 3 saturation × 3 value |
//! | texture | `[72, 131)`  | uniform LBP over the 3×3 ring, 59 bins       |
//! | shape   | `[131, 167)` | Sobel edge orientations, 36 bins of 10°      |

mod corpus;
mod descriptors;
mod grid;

pub use corpus::{
    extract_dataset, load_corpus, read_features, read_record, write_features, Dataset, FeatureVector, ImageRecord,
    IMAGE_EXTENSIONS,
};
pub use descriptors::{
    color_histogram, extract_features, lbp_bin, lbp_code, preprocess, shape_descriptor, texture_descriptor, COLOR_BINS,
    FEATURE_DIM, LBP_BINS, SHAPE_BINS, SIZE,
};
pub use grid::{GrayGrid, RgbGrid};
