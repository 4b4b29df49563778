//! Julia-set rendering: basin classification on a pixel grid with boundary
//! extraction, inverse iteration through a polynomial root finder, and PNG
//! output.

mod grid;
mod image_out;
mod inverse;
mod roots;

use num_complex::Complex64;
use thiserror::Error;

use crate::rmap::MapError;

pub use grid::{classify_grid, classify_grid_adaptive, extract_boundary, PixelLabel, RenderGrid};
pub use image_out::{render_png, write_sidecar, GridMetadata, LabelHistogram};
pub use inverse::inverse_orbit;
pub use roots::{poly_roots, poly_roots_with_guesses};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("grid is a single basin with no boundary")]
    DegenerateGrid,
    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: u32 },
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("seed coincides with a fixed point of the map")]
    FixedPointSeed,
    #[error("bad render request: {0}")]
    BadRequest(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A sampled Julia set and how it was produced.
#[derive(Clone, Debug)]
pub struct JuliaCloud {
    pub points: Vec<Complex64>,
    pub method: CloudMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloudMethod {
    /// Basin-boundary pixels of a `width x height` classified grid.
    Boundary { width: u32, height: u32 },
    /// Random backward orbit: `count` retained points after `burn_in`.
    Inverse {
        count: usize,
        burn_in: usize,
        seed: u64,
    },
}
