use super::corpus::{FeatureVector, ImageRecord};
use super::grid::{GrayGrid, RgbGrid};

/// Side length every image is resampled to before description.
pub const SIZE: usize = 128;
pub const COLOR_BINS: usize = 72;
pub const LBP_BINS: usize = 59;
pub const SHAPE_BINS: usize = 36;
pub const FEATURE_DIM: usize = COLOR_BINS + LBP_BINS + SHAPE_BINS;

const HUE_BINS: usize = 8;
const SAT_BINS: usize = 3;
const VAL_BINS: usize = 3;

/// Sobel magnitudes at or below this value are not counted as edges.
const EDGE_THRESHOLD: f64 = 16.0;

/// Offsets `(dx, dy)` of the 3×3 ring, clockwise from the top-left corner.
const RING: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0)];

/// Nearest-neighbour resample to 128×128 plus the rounded Rec. 601 luma.
pub fn preprocess(pixels: &RgbGrid) -> (RgbGrid, GrayGrid) {
    let (w, h) = (pixels.width(), pixels.height());
    let rgb = RgbGrid::from_fn(SIZE, SIZE, |x, y| pixels.get(x * w / SIZE, y * h / SIZE));
    let gray = GrayGrid::new(SIZE, SIZE, rgb.pixels().iter().map(|&p| luma(p)).collect());
    (rgb, gray)
}

fn luma([r, g, b]: [u8; 3]) -> u8 {
    let y = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
    y.round().clamp(0.0, 255.0) as u8
}

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
fn rgb_to_hsv([r, g, b]: [u8; 3]) -> (f64, f64, f64) {
    let (r, g, b) = (f64::from(r), f64::from(g), f64::from(b));
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max / 255.0;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    (if h >= 360.0 { 0.0 } else { h }, s, v)
}

fn quantize(value: f64, range: f64, bins: usize) -> usize {
    ((value / range * bins as f64).floor() as usize).min(bins - 1)
}

fn normalize(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// 72-bin HSV histogram; bin index is `h * 9 + s * 3 + v`.
pub fn color_histogram(rgb: &RgbGrid) -> Vec<f64> {
    let mut counts = [0u64; COLOR_BINS];
    for &p in rgb.pixels() {
        counts[color_bin(p)] += 1;
    }
    normalize(&counts)
}

fn color_bin(p: [u8; 3]) -> usize {
    let (h, s, v) = rgb_to_hsv(p);
    quantize(h, 360.0, HUE_BINS) * SAT_BINS * VAL_BINS
        + quantize(s, 1.0, SAT_BINS) * VAL_BINS
        + quantize(v, 1.0, VAL_BINS)
}

/// 8-bit LBP code at an interior pixel. Ring position 0 (top-left) is the
/// most significant bit; a bit is set when the neighbour is ≥ the centre.
pub fn lbp_code(gray: &GrayGrid, x: usize, y: usize) -> u8 {
    let center = gray.get(x, y);
    RING.iter().fold(0u8, |code, &(dx, dy)| {
        let n = gray.get((x as isize + dx) as usize, (y as isize + dy) as usize);
        (code << 1) | u8::from(n >= center)
    })
}

/// Histogram bin of an LBP code: the 58 uniform codes in ascending order,
/// then one shared bin for everything else.
pub fn lbp_bin(code: u8) -> usize {
    LBP_TABLE[code as usize]
}

const fn is_uniform(code: u8) -> bool {
    (code ^ code.rotate_left(1)).count_ones() <= 2
}

const LBP_TABLE: [usize; 256] = {
    let mut table = [LBP_BINS - 1; 256];
    let mut next = 0;
    let mut code = 0;
    while code < 256 {
        if is_uniform(code as u8) {
            table[code] = next;
            next += 1;
        }
        code += 1;
    }
    assert!(next == LBP_BINS - 1);
    table
};

/// 59-bin uniform LBP histogram over the interior pixels.
pub fn texture_descriptor(gray: &GrayGrid) -> Vec<f64> {
    let mut counts = [0u64; LBP_BINS];
    for y in 1..gray.height() - 1 {
        for x in 1..gray.width() - 1 {
            counts[lbp_bin(lbp_code(gray, x, y))] += 1;
        }
    }
    normalize(&counts)
}

fn sobel(gray: &GrayGrid, x: usize, y: usize) -> (f64, f64) {
    let p = |dx: isize, dy: isize| f64::from(gray.get((x as isize + dx) as usize, (y as isize + dy) as usize));
    let gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
    let gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
    (gx, gy)
}

/// 36-bin histogram of Sobel gradient orientations (y axis pointing down),
/// counting only pixels whose magnitude exceeds 16. Edge-free images get the
/// uniform vector.
pub fn shape_descriptor(gray: &GrayGrid) -> Vec<f64> {
    let mut counts = [0u64; SHAPE_BINS];
    for y in 1..gray.height() - 1 {
        for x in 1..gray.width() - 1 {
            let (gx, gy) = sobel(gray, x, y);
            if gx.hypot(gy) <= EDGE_THRESHOLD {
                continue;
            }
            let mut deg = gy.atan2(gx).to_degrees();
            if deg < 0.0 {
                deg += 360.0;
            }
            counts[quantize(deg, 360.0, SHAPE_BINS)] += 1;
        }
    }
    if counts.iter().all(|&c| c == 0) {
        return vec![1.0 / SHAPE_BINS as f64; SHAPE_BINS];
    }
    normalize(&counts)
}

/// Colour ‖ texture ‖ shape descriptor of one image.
pub fn extract_features(record: &ImageRecord) -> FeatureVector {
    let (rgb, gray) = preprocess(&record.pixels);
    let mut values = Vec::with_capacity(FEATURE_DIM);
    values.extend(color_histogram(&rgb));
    values.extend(texture_descriptor(&gray));
    values.extend(shape_descriptor(&gray));
    FeatureVector {
        id: record.id.clone(),
        label: Some(record.label.clone()),
        values,
    }
}
