//! Basin classification on a pixel grid and boundary extraction.
//!
//! Each pixel center is iterated under the map until it enters the certified
//! inner disk (`Inner`), clears the certified outer radius (`Outer`), or
//! exhausts the iteration budget (`Undecided`). The Julia set is read off as
//! the pixels where the basin labels change, plus the undecided pixels.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{CloudMethod, JuliaCloud, RenderError};
use crate::rmap::{DipoleMap, EscapeRadii, SpherePoint};
use crate::viewport::Viewport;

/// Side length of the square tiles that are classified in parallel.
const TILE: u32 = 64;

/// Cap on automatic iteration doubling.
const ADAPTIVE_ROUNDS: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PixelLabel {
    Inner,
    Outer,
    Undecided,
}

/// Classified pixel grid over a viewport.
#[derive(Clone, Debug)]
pub struct RenderGrid {
    pub viewport: Viewport,
    pub width: u32,
    pub height: u32,
    pub max_iter: u32,
    pub radii: EscapeRadii,
    labels: Vec<PixelLabel>,
    iterations: Vec<u32>,
}

impl RenderGrid {
    pub fn label(&self, col: u32, row: u32) -> PixelLabel {
        self.labels[(row * self.width + col) as usize]
    }

    pub fn iteration_count(&self, col: u32, row: u32) -> u32 {
        self.iterations[(row * self.width + col) as usize]
    }

    pub fn labels(&self) -> &[PixelLabel] {
        &self.labels
    }

    pub fn pixel_center(&self, col: u32, row: u32) -> Complex64 {
        self.viewport
            .pixel_center(col, row, self.width, self.height)
    }

    /// (inner, outer, undecided) pixel counts.
    pub fn label_histogram(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for l in &self.labels {
            match l {
                PixelLabel::Inner => counts.0 += 1,
                PixelLabel::Outer => counts.1 += 1,
                PixelLabel::Undecided => counts.2 += 1,
            }
        }
        counts
    }

    /// Pixels that belong to the extracted boundary: undecided, or labeled
    /// with a 4-neighbor carrying the opposite basin label.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let (w, h) = (self.width as i64, self.height as i64);
        let mut mask = vec![false; self.labels.len()];
        for row in 0..h {
            for col in 0..w {
                let idx = (row * w + col) as usize;
                let label = self.labels[idx];
                if label == PixelLabel::Undecided {
                    mask[idx] = true;
                    continue;
                }
                for (dc, dr) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                    let (nc, nr) = (col + dc, row + dr);
                    if nc < 0 || nr < 0 || nc >= w || nr >= h {
                        continue;
                    }
                    let neighbor = self.labels[(nr * w + nc) as usize];
                    let flips = matches!(
                        (label, neighbor),
                        (PixelLabel::Inner, PixelLabel::Outer)
                            | (PixelLabel::Outer, PixelLabel::Inner)
                    );
                    if flips {
                        mask[idx] = true;
                        break;
                    }
                }
            }
        }
        mask
    }
}

fn classify_point(
    map: &DipoleMap,
    radii: &EscapeRadii,
    start: Complex64,
    max_iter: u32,
) -> (PixelLabel, u32) {
    let p = map.base().center();
    let mut z = start;
    for it in 0..=max_iter {
        if (z - p).norm() <= radii.inner {
            return (PixelLabel::Inner, it);
        }
        if z.norm() >= radii.outer {
            return (PixelLabel::Outer, it);
        }
        if it == max_iter {
            break;
        }
        match map.eval_complex(z) {
            SpherePoint::Infinity => return (PixelLabel::Outer, it + 1),
            SpherePoint::Finite(w) => z = w,
        }
    }
    (PixelLabel::Undecided, max_iter)
}

/// Classify every pixel center of a `width x height` grid over `viewport`.
///
/// Deterministic: tiles are classified in parallel but stitched in a fixed
/// order, and per-pixel work is pure.
pub fn classify_grid(
    map: &DipoleMap,
    viewport: Viewport,
    width: u32,
    height: u32,
    max_iter: u32,
) -> Result<RenderGrid, RenderError> {
    if width < 16 || height < 16 {
        return Err(RenderError::BadRequest(format!(
            "grid must be at least 16x16, got {width}x{height}"
        )));
    }
    if max_iter < 1 {
        return Err(RenderError::BadRequest("max_iter must be positive".into()));
    }
    let radii = map.escape_radii()?;

    struct Tile {
        col0: u32,
        row0: u32,
        cols: u32,
        rows: u32,
    }
    let mut tiles = Vec::new();
    let mut row0 = 0;
    while row0 < height {
        let rows = TILE.min(height - row0);
        let mut col0 = 0;
        while col0 < width {
            let cols = TILE.min(width - col0);
            tiles.push(Tile {
                col0,
                row0,
                cols,
                rows,
            });
            col0 += cols;
        }
        row0 += rows;
    }

    let results: Vec<(usize, Vec<(PixelLabel, u32)>)> = tiles
        .par_iter()
        .enumerate()
        .map(|(tix, tile)| {
            let mut cells = Vec::with_capacity((tile.cols * tile.rows) as usize);
            for row in tile.row0..tile.row0 + tile.rows {
                for col in tile.col0..tile.col0 + tile.cols {
                    let z = viewport.pixel_center(col, row, width, height);
                    cells.push(classify_point(map, &radii, z, max_iter));
                }
            }
            (tix, cells)
        })
        .collect();

    let mut labels = vec![PixelLabel::Undecided; (width * height) as usize];
    let mut iterations = vec![0u32; (width * height) as usize];
    for (tix, cells) in results {
        let tile = &tiles[tix];
        let mut k = 0;
        for row in tile.row0..tile.row0 + tile.rows {
            for col in tile.col0..tile.col0 + tile.cols {
                let idx = (row * width + col) as usize;
                labels[idx] = cells[k].0;
                iterations[idx] = cells[k].1;
                k += 1;
            }
        }
    }

    Ok(RenderGrid {
        viewport,
        width,
        height,
        max_iter,
        radii,
        labels,
        iterations,
    })
}

/// [`classify_grid`] with automatic iteration deepening: if undecided pixels
/// far from any basin flip exceed 5% of the grid, the budget doubles (up to
/// five rounds). Undecided pixels hugging the basin boundary are expected --
/// they are the Julia set -- and do not trigger deepening.
pub fn classify_grid_adaptive(
    map: &DipoleMap,
    viewport: Viewport,
    width: u32,
    height: u32,
    initial_max_iter: u32,
) -> Result<RenderGrid, RenderError> {
    let mut max_iter = initial_max_iter.max(1);
    let mut grid = classify_grid(map, viewport, width, height, max_iter)?;
    for _ in 0..ADAPTIVE_ROUNDS {
        if stray_undecided_fraction(&grid) <= 0.05 {
            break;
        }
        max_iter *= 2;
        grid = classify_grid(map, viewport, width, height, max_iter)?;
    }
    Ok(grid)
}

/// Fraction of pixels that are undecided yet lie outside a 2-pixel
/// neighborhood of any Inner/Outer label flip.
fn stray_undecided_fraction(grid: &RenderGrid) -> f64 {
    let (w, h) = (grid.width as i64, grid.height as i64);
    let mut flip = vec![false; grid.labels.len()];
    for row in 0..h {
        for col in 0..w {
            let idx = (row * w + col) as usize;
            let label = grid.labels[idx];
            if label == PixelLabel::Undecided {
                continue;
            }
            for (dc, dr) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (nc, nr) = (col + dc, row + dr);
                if nc < 0 || nr < 0 || nc >= w || nr >= h {
                    continue;
                }
                let neighbor = grid.labels[(nr * w + nc) as usize];
                let flips = matches!(
                    (label, neighbor),
                    (PixelLabel::Inner, PixelLabel::Outer) | (PixelLabel::Outer, PixelLabel::Inner)
                );
                if flips {
                    flip[idx] = true;
                    break;
                }
            }
        }
    }
    let mut stray = 0usize;
    for row in 0..h {
        for col in 0..w {
            let idx = (row * w + col) as usize;
            if grid.labels[idx] != PixelLabel::Undecided {
                continue;
            }
            let mut near_flip = false;
            'scan: for dr in -2i64..=2 {
                for dc in -2i64..=2 {
                    let (nc, nr) = (col + dc, row + dr);
                    if nc < 0 || nr < 0 || nc >= w || nr >= h {
                        continue;
                    }
                    if flip[(nr * w + nc) as usize] {
                        near_flip = true;
                        break 'scan;
                    }
                }
            }
            if !near_flip {
                stray += 1;
            }
        }
    }
    stray as f64 / grid.labels.len() as f64
}

/// Centers of boundary pixels, row-major. Errors if the grid is a single
/// basin with no boundary at all.
pub fn extract_boundary(grid: &RenderGrid) -> Result<JuliaCloud, RenderError> {
    let mask = grid.boundary_mask();
    let mut points = Vec::new();
    for row in 0..grid.height {
        for col in 0..grid.width {
            if mask[(row * grid.width + col) as usize] {
                points.push(grid.pixel_center(col, row));
            }
        }
    }
    if points.is_empty() {
        return Err(RenderError::DegenerateGrid);
    }
    Ok(JuliaCloud {
        points,
        method: CloudMethod::Boundary {
            width: grid.width,
            height: grid.height,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmap::BaseMap;

    fn squaring_grid(size: u32, max_iter: u32) -> RenderGrid {
        let map = DipoleMap::bare(BaseMap::power(2).unwrap());
        let vp = Viewport::new(-2.0, 2.0, -2.0, 2.0);
        classify_grid(&map, vp, size, size, max_iter).unwrap()
    }

    #[test]
    fn squaring_map_labels() {
        let grid = squaring_grid(64, 128);
        // Center pixel is inside the unit disk: Inner.
        assert_eq!(grid.label(32, 32), PixelLabel::Inner);
        // Corner pixel is far outside: Outer quickly.
        assert_eq!(grid.label(0, 0), PixelLabel::Outer);
        assert!(grid.iteration_count(0, 0) <= 1);
    }

    #[test]
    fn fixed_point_on_the_circle_stays_undecided() {
        let map = DipoleMap::bare(BaseMap::power(2).unwrap());
        let radii = map.escape_radii().unwrap();
        // z = 1 is a fixed point on the Julia set: never escapes.
        let (label, iters) = classify_point(&map, &radii, Complex64::new(1.0, 0.0), 64);
        assert_eq!(label, PixelLabel::Undecided);
        assert_eq!(iters, 64);
        // z = 3 is outside the outer radius at iteration 0.
        let (label, iters) = classify_point(&map, &radii, Complex64::new(3.0, 0.0), 64);
        assert_eq!(label, PixelLabel::Outer);
        assert_eq!(iters, 0);
        // z = 0 is the superattracting center.
        let (label, iters) = classify_point(&map, &radii, Complex64::new(0.0, 0.0), 64);
        assert_eq!(label, PixelLabel::Inner);
        assert_eq!(iters, 0);
    }

    #[test]
    fn boundary_of_squaring_map_traces_the_unit_circle() {
        let grid = squaring_grid(256, 256);
        let cloud = extract_boundary(&grid).unwrap();
        assert!(!cloud.points.is_empty());
        let diag = grid.viewport.pixel_diagonal(256, 256);
        for z in &cloud.points {
            assert!(
                (z.norm() - 1.0).abs() <= 2.0 * diag,
                "boundary pixel {z} strays from the circle"
            );
        }
    }

    #[test]
    fn degenerate_grid_errors() {
        // A viewport deep inside the basin of infinity: all Outer.
        let map = DipoleMap::bare(BaseMap::power(2).unwrap());
        let vp = Viewport::new(10.0, 12.0, 10.0, 12.0);
        let grid = classify_grid(&map, vp, 16, 16, 32).unwrap();
        assert!(matches!(
            extract_boundary(&grid),
            Err(RenderError::DegenerateGrid)
        ));
    }

    #[test]
    fn label_soundness_replays() {
        let grid = squaring_grid(64, 128);
        let map = DipoleMap::bare(BaseMap::power(2).unwrap());
        for row in (0..64).step_by(7) {
            for col in (0..64).step_by(7) {
                let z = grid.pixel_center(col, row);
                let (label, iters) = classify_point(&map, &grid.radii, z, grid.max_iter);
                assert_eq!(label, grid.label(col, row));
                assert_eq!(iters, grid.iteration_count(col, row));
            }
        }
    }

    #[test]
    fn inner_orbit_keeps_contracting() {
        let map = DipoleMap::bare(BaseMap::power(2).unwrap());
        let radii = map.escape_radii().unwrap();
        let mut z = Complex64::new(radii.inner, 0.0);
        let mut dist = z.norm();
        for _ in 0..10 {
            z = map.eval_complex(z).as_complex().unwrap();
            let next = z.norm();
            assert!(next <= dist / 2.0 + f64::EPSILON);
            dist = next;
            if dist == 0.0 {
                break;
            }
        }
    }
}
