//! Axis-aligned rectangles in the complex plane and pixel-grid geometry.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Rectangle `[re_min, re_max] x [im_min, im_max]` in the complex plane.
///
/// Pixel row 0 is the top of the rectangle (`im_max`), matching image
/// conventions, and pixel centers sit at half-integer offsets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Viewport {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        assert!(
            re_max > re_min && im_max > im_min,
            "viewport must have positive extent"
        );
        Viewport {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    /// Square window centered at `center` with half-side `half`.
    pub fn square(center: Complex64, half: f64) -> Self {
        assert!(half > 0.0);
        Viewport {
            re_min: center.re - half,
            re_max: center.re + half,
            im_min: center.im - half,
            im_max: center.im + half,
        }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    /// Horizontal extent of one pixel on a `cols`-wide grid.
    pub fn pixel_width(&self, cols: u32) -> f64 {
        self.width() / cols as f64
    }

    /// Vertical extent of one pixel on a `rows`-tall grid.
    pub fn pixel_height(&self, rows: u32) -> f64 {
        self.height() / rows as f64
    }

    /// Largest pixel side length for a `cols x rows` grid.
    pub fn pixel_size(&self, cols: u32, rows: u32) -> f64 {
        self.pixel_width(cols).max(self.pixel_height(rows))
    }

    /// Diagonal of one pixel for a `cols x rows` grid.
    pub fn pixel_diagonal(&self, cols: u32, rows: u32) -> f64 {
        let w = self.pixel_width(cols);
        let h = self.pixel_height(rows);
        (w * w + h * h).sqrt()
    }

    /// Center of pixel `(col, row)`; row 0 is the top row.
    pub fn pixel_center(&self, col: u32, row: u32, cols: u32, rows: u32) -> Complex64 {
        let re = self.re_min + (col as f64 + 0.5) * self.pixel_width(cols);
        let im = self.im_max - (row as f64 + 0.5) * self.pixel_height(rows);
        Complex64::new(re, im)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}
