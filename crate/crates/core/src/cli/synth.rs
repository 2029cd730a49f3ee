//! Synthetic stand-in corpus: one colour + oriented-stripe prototype per
//! class, rendered with per-pixel channel noise.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imaging::{RgbGrid, SIZE};

/// Per-channel noise amplitude.
const JITTER: i32 = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prototype {
    pub base: [f64; 3],
    /// Stripe normal direction in radians, `[0, π)`.
    pub orientation: f64,
    /// Stripe cycles across the image.
    pub frequency: f64,
}

impl Prototype {
    pub fn draw(rng: &mut impl Rng) -> Self {
        let hue = rng.random_range(0.0..360.0);
        let sat = rng.random_range(0.45..1.0);
        let val = rng.random_range(0.55..1.0);
        Self {
            base: hsv_to_rgb(hue, sat, val),
            orientation: rng.random_range(0.0..PI),
            frequency: rng.random_range(3.0..12.0),
        }
    }

    /// One noisy sample at a random stripe phase.
    pub fn render(&self, rng: &mut impl Rng) -> RgbGrid {
        let phase = rng.random_range(0.0..2.0 * PI);
        let (dx, dy) = (self.orientation.cos(), self.orientation.sin());
        let omega = 2.0 * PI * self.frequency / SIZE as f64;
        RgbGrid::from_fn(SIZE, SIZE, |x, y| {
            let t = omega * (x as f64 * dx + y as f64 * dy) + phase;
            let shade = 0.25 + 0.75 * (0.5 + 0.5 * t.sin());
            self.base.map(|c| {
                let v = (c * shade).round() as i32 + rng.random_range(-JITTER..=JITTER);
                v.clamp(0, 255) as u8
            })
        })
    }
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [f64; 3] {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r, g, b].map(|ch| (ch + m) * 255.0)
}

/// Writes `out/class_NN/img_NNN.png`, `per_class` images for each of
/// `classes` classes. Same seed, same bytes.
pub fn write_corpus(out: &Path, classes: usize, per_class: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class_width = classes.saturating_sub(1).to_string().len().max(2);
    let image_width = per_class.saturating_sub(1).to_string().len().max(3);
    for c in 0..classes {
        let proto = Prototype::draw(&mut rng);
        let dir = out.join(format!("class_{c:0class_width$}"));
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for i in 0..per_class {
            let path = dir.join(format!("img_{i:0image_width$}.png"));
            proto
                .render(&mut rng)
                .to_image()
                .save(&path)
                .map_err(|e| Error::io(&path, std::io::Error::other(e)))?;
        }
    }
    Ok(())
}
