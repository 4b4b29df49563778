//! Sampled limit set: the pixel set `Y`, its iterated preimages under the
//! base map, and the invariant circle.
//!
//! Preimages are N-th roots taken in closed form, never via the general
//! root finder: the solutions of `C (z - p)^N = y - p` are `p` plus the
//! N-th roots of `(y - p)/C`. Each preimage layer moves the moduli toward
//! the circle radius, so a finite depth suffices for any tolerance.

use num_complex::Complex64;
use thiserror::Error;

use crate::ingest::PixelSet;
use crate::rmap::BaseMap;

/// Hard cap on total sampled points; layers grow as |Y| * N^j.
const MAX_POINTS: usize = 1 << 24;

#[derive(Debug, Error)]
pub enum LimitError {
    #[error("the map center has no preimage fan (y = p)")]
    CenterPoint,
    #[error("need at least 8 circle samples, got {0}")]
    TooFewCircleSamples(u32),
    #[error("limit set would exceed {MAX_POINTS} points (|Y| = {pixels}, depth {depth})")]
    TooManyPoints { pixels: usize, depth: u32 },
}

/// Point cloud sampling `Y`, its preimage layers, and the base circle.
///
/// `layers[i]` tags `points[i]`: 0 for `Y` itself, `j > 0` for the j-th
/// preimage layer, -1 for a circle sample.
#[derive(Clone, Debug)]
pub struct LimitSet {
    pub points: Vec<Complex64>,
    pub layers: Vec<i32>,
    pub depth: u32,
    pub circle_samples: u32,
}

impl LimitSet {
    pub fn layer(&self, which: i32) -> Vec<Complex64> {
        self.points
            .iter()
            .zip(&self.layers)
            .filter(|(_, &l)| l == which)
            .map(|(&z, _)| z)
            .collect()
    }
}

/// The N solutions of `f(z) = y`, i.e. `p` plus the N-th roots of
/// `(y - p)/C`, ordered by increasing argument offset.
pub fn preimage_point(base: &BaseMap, y: Complex64) -> Result<Vec<Complex64>, LimitError> {
    let w = (y - base.center()) / base.scale();
    if w == Complex64::new(0.0, 0.0) {
        return Err(LimitError::CenterPoint);
    }
    let n = base.degree();
    let (r, theta) = w.to_polar();
    let root_r = r.powf(1.0 / n as f64);
    Ok((0..n)
        .map(|j| {
            let angle = (theta + std::f64::consts::TAU * j as f64) / n as f64;
            base.center() + Complex64::from_polar(root_r, angle)
        })
        .collect())
}

/// Layers 0..=depth of iterated preimages of `set` under `base`, plus
/// `circle_samples` equally spaced samples of the invariant circle.
pub fn limit_set(
    base: &BaseMap,
    set: &PixelSet,
    depth: u32,
    circle_samples: u32,
) -> Result<LimitSet, LimitError> {
    if circle_samples < 8 {
        return Err(LimitError::TooFewCircleSamples(circle_samples));
    }
    let n = base.degree() as usize;
    let mut expected = set.points.len();
    let mut total = expected + circle_samples as usize;
    for _ in 0..depth {
        expected = expected.saturating_mul(n);
        total = total.saturating_add(expected);
        if total > MAX_POINTS {
            return Err(LimitError::TooManyPoints {
                pixels: set.points.len(),
                depth,
            });
        }
    }

    let mut points = set.points.clone();
    let mut layers = vec![0i32; points.len()];
    let mut current = set.points.clone();
    for j in 1..=depth {
        let mut next = Vec::with_capacity(current.len() * n);
        for &y in &current {
            next.extend(preimage_point(base, y)?);
        }
        points.extend_from_slice(&next);
        layers.extend(std::iter::repeat_n(j as i32, next.len()));
        current = next;
    }

    let r = base.circle_radius();
    for m in 0..circle_samples {
        let angle = std::f64::consts::TAU * m as f64 / circle_samples as f64;
        points.push(base.center() + Complex64::from_polar(r, angle));
        layers.push(-1);
    }

    Ok(LimitSet {
        points,
        layers,
        depth,
        circle_samples,
    })
}

/// Smallest depth K such that every layer-K point lies within `tol` of the
/// base circle, computed from the modulus recursion `s -> (s / |C|)^(1/N)`
/// applied to the extreme moduli of `set`.
pub fn depth_for_tolerance(base: &BaseMap, set: &PixelSet, tol: f64) -> u32 {
    debug_assert!(tol > 0.0);
    let p = base.center();
    let r = base.circle_radius();
    let c_norm = base.scale().norm();
    let inv_n = 1.0 / base.degree() as f64;
    let mut s_min = f64::INFINITY;
    let mut s_max = 0.0f64;
    for &y in &set.points {
        let s = (y - p).norm();
        s_min = s_min.min(s);
        s_max = s_max.max(s);
    }
    debug_assert!(s_min > 0.0, "pixel set touches the map center");
    let mut depth = 0;
    while (s_min - r).abs().max((s_max - r).abs()) > tol {
        s_min = (s_min / c_norm).powf(inv_n);
        s_max = (s_max / c_norm).powf(inv_n);
        depth += 1;
        if depth >= 10_000 {
            break;
        }
    }
    depth
}
