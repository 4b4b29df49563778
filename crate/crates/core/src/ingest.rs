//! Turn a target shape into a finite pixel set on a lattice, keeping it
//! clear of the base map's invariant circle.

use std::collections::HashSet;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::rmap::BaseMap;
use crate::viewport::Viewport;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("shape contains no occupied pixels/points")]
    EmptyShape,
    #[error("pixel pitch must be positive, got {0}")]
    BadPitch(f64),
    #[error("cannot read image: {0}")]
    Image(#[from] image::ImageError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A shape to be approximated: a thresholded bitmap placed in the plane by a
/// viewport, an explicit point list, or a polyline through vertices.
#[derive(Clone, Debug)]
pub enum TargetShape {
    Bitmap {
        width: u32,
        height: u32,
        /// Row-major occupancy, row 0 at the top of the viewport.
        occupied: Vec<bool>,
        viewport: Viewport,
    },
    Points(Vec<Complex64>),
    Polyline(Vec<Complex64>),
}

impl TargetShape {
    /// Load a grayscale image (PGM or PNG); pixels darker than 50% luminance
    /// count as occupied.
    pub fn from_image_path(path: &Path, viewport: Viewport) -> Result<Self, IngestError> {
        let img = image::open(path)?.into_luma8();
        let (width, height) = img.dimensions();
        let occupied = img.pixels().map(|p| p.0[0] < 128).collect();
        Ok(TargetShape::Bitmap {
            width,
            height,
            occupied,
            viewport,
        })
    }
}

/// Lattice approximation of a shape: cell centers at integer multiples of
/// `pitch`, no duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct PixelSet {
    pub points: Vec<Complex64>,
    pub pitch: f64,
}

impl PixelSet {
    /// Wrap an existing point list (e.g. read back from CSV, where the
    /// originating lattice pitch is unknown and recorded as 0).
    pub fn from_points(points: Vec<Complex64>) -> Self {
        PixelSet { points, pitch: 0.0 }
    }
}

/// A pixel-set point too close to the base circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisjointViolation {
    pub point: Complex64,
    /// Distance from the point to the circle `|z - p| = r`.
    pub distance: f64,
}

fn snap(value: f64, pitch: f64) -> f64 {
    // +0.0 canonicalizes -0.0 so exact-equality dedup treats them as one.
    pitch * (value / pitch).round() + 0.0
}

fn snap_point(z: Complex64, pitch: f64) -> Complex64 {
    Complex64::new(snap(z.re, pitch), snap(z.im, pitch))
}

/// Snap shape samples to the `pitch` lattice and deduplicate.
///
/// Every candidate sample moves by at most `pitch * sqrt(2) / 2` (half the
/// cell diagonal), which bounds the Hausdorff distance between the shape
/// samples and the returned set. Polylines are sampled at step `pitch / 2`
/// before snapping.
pub fn pixelate(shape: &TargetShape, pitch: f64) -> Result<PixelSet, IngestError> {
    if !(pitch > 0.0) || !pitch.is_finite() {
        return Err(IngestError::BadPitch(pitch));
    }
    let candidates: Vec<Complex64> = match shape {
        TargetShape::Bitmap {
            width,
            height,
            occupied,
            viewport,
        } => {
            let mut pts = Vec::new();
            for row in 0..*height {
                for col in 0..*width {
                    if occupied[(row * width + col) as usize] {
                        pts.push(viewport.pixel_center(col, row, *width, *height));
                    }
                }
            }
            pts
        }
        TargetShape::Points(pts) => pts.clone(),
        TargetShape::Polyline(vertices) => {
            if vertices.len() < 2 {
                return Err(IngestError::EmptyShape);
            }
            let step = pitch / 2.0;
            let mut pts = Vec::new();
            for pair in vertices.windows(2) {
                let (u, v) = (pair[0], pair[1]);
                let len = (v - u).norm();
                let steps = ((len / step).ceil() as usize).max(1);
                for i in 0..=steps {
                    let t = i as f64 / steps as f64;
                    pts.push(u + (v - u) * t);
                }
            }
            pts
        }
    };
    if candidates.is_empty() {
        return Err(IngestError::EmptyShape);
    }
    let mut seen = HashSet::with_capacity(candidates.len());
    let mut points = Vec::new();
    for z in candidates {
        let s = snap_point(z, pitch);
        if seen.insert((s.re.to_bits(), s.im.to_bits())) {
            points.push(s);
        }
    }
    Ok(PixelSet { points, pitch })
}

/// Every point of `set` closer than `margin` to the base circle, with its
/// distance. An empty result means the set is safely disjoint.
pub fn validate_disjoint(set: &PixelSet, base: &BaseMap, margin: f64) -> Vec<DisjointViolation> {
    let r = base.circle_radius();
    let p = base.center();
    set.points
        .iter()
        .filter_map(|&y| {
            let distance = ((y - p).norm() - r).abs();
            (distance < margin).then_some(DisjointViolation { point: y, distance })
        })
        .collect()
}

/// Block-letter "HI" glyph, one character per lattice cell.
const HI_GLYPH: [&str; 10] = [
    "##....##..######",
    "##....##..######",
    "##....##....##..",
    "##....##....##..",
    "########....##..",
    "##....##....##..",
    "##....##....##..",
    "##....##....##..",
    "##....##..######",
    "##....##..######",
];

const HI_PITCH: f64 = 0.06;

/// Deterministic 80-point pixel set spelling "HI" in the upper half-plane,
/// inside the annulus `1.1 < |z| < 2` around the unit circle.
pub fn hi_fixture() -> PixelSet {
    let x0 = -0.45;
    let y0 = 1.84;
    let mut points = Vec::with_capacity(80);
    for (row, line) in HI_GLYPH.iter().enumerate() {
        for (col, ch) in line.bytes().enumerate() {
            if ch == b'#' {
                points.push(Complex64::new(
                    x0 + col as f64 * HI_PITCH,
                    y0 - row as f64 * HI_PITCH,
                ));
            }
        }
    }
    PixelSet {
        points,
        pitch: HI_PITCH,
    }
}
