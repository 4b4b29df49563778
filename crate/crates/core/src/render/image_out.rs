//! PNG output and the JSON metadata sidecar for a classified grid.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{RenderError, RenderGrid};
use crate::viewport::Viewport;

const INNER_GRAY: u8 = 255;
const OUTER_GRAY: u8 = 200;
const BOUNDARY_GRAY: u8 = 0;

/// Write the grid as an 8-bit grayscale PNG: inner basin white, outer basin
/// light gray, boundary and undecided pixels black. Byte-deterministic for a
/// given grid.
pub fn render_png(grid: &RenderGrid, path: &Path) -> Result<(), RenderError> {
    let mask = grid.boundary_mask();
    let mut pixels = Vec::with_capacity(mask.len());
    for (idx, &on_boundary) in mask.iter().enumerate() {
        let gray = if on_boundary {
            BOUNDARY_GRAY
        } else {
            match grid.labels()[idx] {
                super::PixelLabel::Inner => INNER_GRAY,
                super::PixelLabel::Outer => OUTER_GRAY,
                super::PixelLabel::Undecided => BOUNDARY_GRAY,
            }
        };
        pixels.push(gray);
    }
    let img = image::GrayImage::from_raw(grid.width, grid.height, pixels)
        .expect("pixel buffer matches grid dimensions");
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => RenderError::Io(io),
            other => RenderError::BadRequest(other.to_string()),
        })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LabelHistogram {
    pub inner: usize,
    pub outer: usize,
    pub undecided: usize,
}

/// Sidecar describing how a grid was produced.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridMetadata {
    pub viewport: Viewport,
    pub width: u32,
    pub height: u32,
    pub max_iter: u32,
    pub labels: LabelHistogram,
}

impl GridMetadata {
    pub fn new(grid: &RenderGrid) -> Self {
        let (inner, outer, undecided) = grid.label_histogram();
        GridMetadata {
            viewport: grid.viewport,
            width: grid.width,
            height: grid.height,
            max_iter: grid.max_iter,
            labels: LabelHistogram {
                inner,
                outer,
                undecided,
            },
        }
    }
}

pub fn write_sidecar(grid: &RenderGrid, path: &Path) -> Result<(), RenderError> {
    let meta = GridMetadata::new(grid);
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    std::fs::write(path, json)?;
    Ok(())
}
