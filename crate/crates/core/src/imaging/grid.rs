use image::RgbImage;

/// Row-major grid of RGB pixels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbGrid {
    width: usize,
    height: usize,
    data: Vec<[u8; 3]>,
}

impl RgbGrid {
    pub fn new(width: usize, height: usize, data: Vec<[u8; 3]>) -> Self {
        assert_eq!(
            data.len(),
            width * height,
            "pixel buffer does not match {width}x{height}"
        );
        Self { width, height, data }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self::new(width, height, vec![rgb; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.data[y * self.width + x]
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.data
    }

    pub fn to_image(&self) -> RgbImage {
        let raw = self.data.iter().flatten().copied().collect();
        RgbImage::from_raw(self.width as u32, self.height as u32, raw).expect("buffer length matches dimensions")
    }
}

impl From<&RgbImage> for RgbGrid {
    fn from(img: &RgbImage) -> Self {
        let data = img.pixels().map(|p| p.0).collect();
        Self::new(img.width() as usize, img.height() as usize, data)
    }
}

/// Row-major grid of 8-bit luma values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayGrid {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayGrid {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Self {
        assert_eq!(
            data.len(),
            width * height,
            "pixel buffer does not match {width}x{height}"
        );
        Self { width, height, data }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }
}
