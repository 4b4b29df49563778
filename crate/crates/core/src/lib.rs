//! Designer Julia sets: approximate a planar target shape by the Julia set
//! of a rational map built from a power map and one "dipole" factor
//! `(z - a)/(z - b)` per target point.
//!
//! The pipeline:
//!
//! 1. [`ingest`] turns a shape (bitmap, points, polyline) into a finite
//!    pixel set `Y` away from the invariant circle of the base map.
//! 2. [`rmap`] builds the perturbed map `g(z) = p + C (z-p)^N Π (z-a_i)/(z-b_i)`
//!    with one dipole of separation `eps` centered at each point of `Y`.
//! 3. [`render`] draws the Julia set of `g` by basin classification on a
//!    pixel grid (and, alternatively, by inverse iteration).
//! 4. [`limit`] samples the limit set: `Y`, its iterated preimages under the
//!    base map, and the invariant circle.
//! 5. [`metric`] measures the Hausdorff distance between the rendered Julia
//!    set and the limit set; as `eps` shrinks the distance drops.

// Negated float comparisons are used on purpose throughout: a NaN must fail
// validation and certification checks, and `!(a <= b)` is true for NaN
// where `a > b` would silently pass it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csvio;
pub mod ingest;
pub mod limit;
pub mod metric;
pub mod render;
pub mod rmap;
pub mod viewport;

pub use num_complex::Complex64;
