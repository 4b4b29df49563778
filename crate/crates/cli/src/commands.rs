//! Pipeline commands: pixelate -> build -> render -> limitset -> hausdorff,
//! the eps-sweep `converge`, and the canned `figure1` run.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use dipole_julia::csvio;
use dipole_julia::ingest::{self, PixelSet, TargetShape};
use dipole_julia::limit;
use dipole_julia::metric::{self, Flavor};
use dipole_julia::render::{self, CloudMethod, JuliaCloud};
use dipole_julia::rmap::{BaseMap, BaseSpec, Dipole, DipoleMap, MapFile};
use dipole_julia::viewport::Viewport;

use crate::failure::Failure;

pub const DEFAULT_MAX_ITER: u32 = 512;
pub const DEFAULT_GRID: u32 = 1024;
pub const DEFAULT_INVERSE_COUNT: usize = 20_000;
pub const DEFAULT_BURN_IN: usize = 50;
pub const FIGURE1_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.02];

pub fn default_viewport() -> Viewport {
    Viewport::new(-2.0, 2.0, -2.0, 2.0)
}

/// How dipole orientations are assigned across a pixel set.
///
/// With a constant orientation the per-dipole far fields (each ~ eps/d) add
/// coherently over k dipoles and swamp the base dynamics even at small eps.
/// Alternating the orientation between consecutive pixels cancels adjacent
/// far fields pairwise (the array acts like quadrupoles), which keeps the
/// perturbation small at practical separations; it is the default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaPolicy {
    Alternating,
    Constant(f64),
}

impl ThetaPolicy {
    pub fn orientation(&self, index: usize) -> f64 {
        match self {
            ThetaPolicy::Alternating => {
                if index.is_multiple_of(2) {
                    0.0
                } else {
                    std::f64::consts::PI
                }
            }
            ThetaPolicy::Constant(theta) => *theta,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ThetaPolicy::Alternating => "alternating".to_string(),
            ThetaPolicy::Constant(theta) => format!("constant {theta}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderMethod {
    Boundary,
    Inverse,
}

#[derive(Clone, Copy, Debug)]
pub struct GridSize {
    pub width: u32,
    pub height: u32,
}

/// Per-eps outcome of a convergence sweep.
#[derive(Clone, Debug, Serialize)]
pub struct EpsRecord {
    pub eps: f64,
    pub d_h: f64,
    pub width: u32,
    pub height: u32,
    pub seconds: f64,
    pub max_iter_used: u32,
    pub limit_depth: u32,
    pub circle_samples: u32,
    pub png: String,
}

/// A full eps sweep against one pixel set and base map.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRun {
    pub base: BaseSpec,
    pub theta_policy: String,
    pub pixel_count: usize,
    pub viewport: Viewport,
    pub eps: Vec<f64>,
    pub records: Vec<EpsRecord>,
    pub table: String,
    pub pngs: Vec<String>,
}

fn read_pixel_set(path: &Path) -> Result<PixelSet, Failure> {
    let points = csvio::read_points_csv(path)?;
    if points.is_empty() {
        return Err(Failure::Data(format!(
            "{} contains no points",
            path.display()
        )));
    }
    Ok(PixelSet::from_points(points))
}

fn read_map(path: &Path) -> Result<DipoleMap, Failure> {
    let text = fs::read_to_string(path)?;
    let file: MapFile = serde_json::from_str(&text)?;
    Ok(file.to_map()?)
}

fn is_image_ext(path: &Path) -> bool {
    matches!(
        path.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("png" | "pgm" | "pnm" | "ppm")
    )
}

/// Rasterize an input shape onto the `pitch` lattice and write a point CSV.
pub fn cmd_pixelate(
    input: &Path,
    polyline: bool,
    pitch: f64,
    viewport: Option<Viewport>,
    out: &Path,
) -> Result<(), Failure> {
    let shape = if is_image_ext(input) {
        let vp = viewport.ok_or_else(|| {
            Failure::Usage("bitmap input needs --viewport to place it in the plane".into())
        })?;
        TargetShape::from_image_path(input, vp)?
    } else {
        let points = csvio::read_points_csv(input)?;
        if polyline {
            TargetShape::Polyline(points)
        } else {
            TargetShape::Points(points)
        }
    };
    let set = ingest::pixelate(&shape, pitch)?;
    csvio::write_points_csv(out, &set.points)?;
    let bound = pitch * std::f64::consts::SQRT_2 / 2.0;
    let extra = if polyline {
        format!(" + sampling step {}", pitch / 2.0)
    } else {
        String::new()
    };
    println!(
        "wrote {} points to {} (pitch {pitch}, Hausdorff bound {bound:.6}{extra})",
        set.points.len(),
        out.display()
    );
    Ok(())
}

/// Attach one dipole per pixel-set point and write the map JSON.
pub fn cmd_build(
    pixels: &Path,
    degree: u32,
    scale: Complex64,
    center: Complex64,
    eps: f64,
    theta: ThetaPolicy,
    out: &Path,
) -> Result<(), Failure> {
    let set = match read_pixel_set(pixels) {
        Ok(s) => s,
        Err(Failure::Data(msg)) if msg.contains("no points") => {
            eprintln!("warning: empty pixel set; writing the bare base map");
            PixelSet::from_points(Vec::new())
        }
        Err(e) => return Err(e),
    };
    let base = BaseMap::new(degree, scale, center)?;
    let map = build_validated_map(&base, &set, eps, theta)?;
    let json = serde_json::to_string_pretty(&MapFile::from_map(&map)).expect("map serializes");
    fs::write(out, json)?;
    println!(
        "wrote map with {} dipoles (degree {}/{}) to {}",
        map.dipoles().len(),
        map.numerator_degree(),
        map.denominator_degree(),
        out.display()
    );
    Ok(())
}

/// Disjointness check at margin `eps`, then map construction.
fn build_validated_map(
    base: &BaseMap,
    set: &PixelSet,
    eps: f64,
    theta: ThetaPolicy,
) -> Result<DipoleMap, Failure> {
    let violations = ingest::validate_disjoint(set, base, eps);
    if !violations.is_empty() {
        let mut msg = format!(
            "{} point(s) are within eps = {eps} of the base circle:",
            violations.len()
        );
        for v in violations.iter().take(10) {
            msg.push_str(&format!(" {} (distance {:.6});", v.point, v.distance));
        }
        if violations.len() > 10 {
            msg.push_str(" ...");
        }
        return Err(Failure::Data(msg));
    }
    let dipoles = set
        .points
        .iter()
        .enumerate()
        .map(|(i, &c)| Dipole::new(c, eps, theta.orientation(i)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::from)?;
    DipoleMap::new(*base, dipoles).map_err(Failure::from)
}

/// Render a map: PNG + metadata sidecar + a Julia cloud CSV, boundary or
/// inverse per `method`. Output files are `<prefix>.png/.json/.csv`.
#[allow(clippy::too_many_arguments)]
pub fn cmd_render(
    map_path: &Path,
    viewport: Viewport,
    grid: GridSize,
    max_iter: u32,
    method: RenderMethod,
    count: usize,
    burn_in: usize,
    seed: u64,
    out_prefix: &Path,
) -> Result<(), Failure> {
    let map = read_map(map_path)?;
    let rendered =
        render::classify_grid_adaptive(&map, viewport, grid.width, grid.height, max_iter)?;
    let png = out_prefix.with_extension("png");
    let sidecar = out_prefix.with_extension("json");
    let cloud_path = out_prefix.with_extension("csv");
    render::render_png(&rendered, &png)?;
    render::write_sidecar(&rendered, &sidecar)?;
    let cloud = match method {
        RenderMethod::Boundary => render::extract_boundary(&rendered)?,
        RenderMethod::Inverse => {
            let seed_point = inverse_seed(&map, viewport);
            render::inverse_orbit(&map, seed_point, count, burn_in, seed)?
        }
    };
    csvio::write_points_csv(&cloud_path, &cloud.points)?;
    describe_cloud(&cloud);
    println!(
        "wrote {}, {}, {}",
        png.display(),
        sidecar.display(),
        cloud_path.display()
    );
    Ok(())
}

fn describe_cloud(cloud: &JuliaCloud) {
    match cloud.method {
        CloudMethod::Boundary { width, height } => {
            println!(
                "boundary cloud: {} points from a {width}x{height} grid",
                cloud.points.len()
            );
        }
        CloudMethod::Inverse {
            count,
            burn_in,
            seed,
        } => {
            println!(
                "inverse cloud: {count} points (burn-in {burn_in}, seed {seed}), {} retained",
                cloud.points.len()
            );
        }
    }
}

/// A deterministic backward-orbit seed: a point on the viewport scale that
/// is neither fixed point of the map.
fn inverse_seed(map: &DipoleMap, viewport: Viewport) -> Complex64 {
    let p = map.base().center();
    let half = (viewport.width().max(viewport.height())) / 2.0;
    p + Complex64::new(half * 0.9, half * 0.37)
}

/// Sample the limit set for the base of `map_path` against a pixel set.
pub fn cmd_limitset(
    map_path: &Path,
    pixels: &Path,
    depth: Option<u32>,
    tol: Option<f64>,
    circle_samples: Option<u32>,
    out: &Path,
) -> Result<(), Failure> {
    let text = fs::read_to_string(map_path)?;
    let file: MapFile = serde_json::from_str(&text)?;
    let base = file.to_base()?;
    let set = read_pixel_set(pixels)?;
    let depth = match (depth, tol) {
        (Some(k), _) => k,
        (None, Some(t)) if t > 0.0 => limit::depth_for_tolerance(&base, &set, t),
        _ => {
            return Err(Failure::Usage(
                "need --depth K or a positive --tol to choose the preimage depth".into(),
            ))
        }
    };
    let samples = circle_samples.unwrap_or_else(|| {
        let r = base.circle_radius();
        match tol {
            Some(t) if t > 0.0 => 256u32.max((std::f64::consts::TAU * r / t).ceil() as u32),
            _ => 256,
        }
    });
    let ls = limit::limit_set(&base, &set, depth, samples)?;
    csvio::write_limit_set_csv(out, &ls)?;
    println!(
        "wrote {} limit-set points (depth {depth}, {samples} circle samples) to {}",
        ls.points.len(),
        out.display()
    );
    Ok(())
}

/// Hausdorff report between two point CSVs, written as JSON.
pub fn cmd_hausdorff(
    a_path: &Path,
    b_path: &Path,
    flavor: Flavor,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let a = csvio::read_points_csv(a_path)?;
    let b = csvio::read_points_csv(b_path)?;
    let report = metric::hausdorff_points(&a, &b, flavor)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    match out {
        Some(path) => {
            fs::write(path, &json)?;
            println!("d_sym = {} (report in {})", report.d_sym, path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

/// Everything `cmd_converge` needs beyond the pixel set itself.
#[derive(Clone, Debug)]
pub struct ConvergeParams {
    pub degree: u32,
    pub scale: Complex64,
    pub center: Complex64,
    pub theta: ThetaPolicy,
    pub eps: Vec<f64>,
    pub viewport: Viewport,
    pub grid: GridSize,
    pub max_iter: u32,
    pub out_dir: PathBuf,
}

/// For each eps (strictly decreasing): validate disjointness, build the
/// dipole map, render its Julia set, sample the limit set at the matching
/// tolerance, and record the Hausdorff distance. Emits one PNG + sidecar per
/// eps plus `table.csv` and `run.json`.
pub fn cmd_converge(set: &PixelSet, params: &ConvergeParams) -> Result<ConvergenceRun, Failure> {
    if params.eps.is_empty() {
        return Err(Failure::Usage("eps list is empty".into()));
    }
    if !params.eps.windows(2).all(|w| w[1] < w[0]) {
        return Err(Failure::Usage(format!(
            "eps list must be strictly decreasing, got {:?}",
            params.eps
        )));
    }
    if params.eps.iter().any(|&e| !(e > 0.0)) {
        return Err(Failure::Usage("eps values must be positive".into()));
    }
    fs::create_dir_all(&params.out_dir)?;
    let base = BaseMap::new(params.degree, params.scale, params.center)?;

    let mut records = Vec::new();
    let mut pngs = Vec::new();
    for &eps in &params.eps {
        let started = Instant::now();
        let map = build_validated_map(&base, set, eps, params.theta)
            .map_err(|e| stage_failure(eps, e))?;
        let grid = render::classify_grid_adaptive(
            &map,
            params.viewport,
            params.grid.width,
            params.grid.height,
            params.max_iter,
        )
        .map_err(|e| stage_failure(eps, e.into()))?;
        let boundary = render::extract_boundary(&grid).map_err(|e| stage_failure(eps, e.into()))?;

        let name = format!("julia-eps{eps:.4}");
        let png = params.out_dir.join(format!("{name}.png"));
        render::render_png(&grid, &png).map_err(|e| stage_failure(eps, e.into()))?;
        render::write_sidecar(&grid, &params.out_dir.join(format!("{name}-grid.json")))
            .map_err(|e| stage_failure(eps, e.into()))?;

        // Resolution-matched limit set: preimage depth and circle sampling
        // both follow the render pixel size.
        let pixel = params
            .viewport
            .pixel_size(params.grid.width, params.grid.height);
        let depth = limit::depth_for_tolerance(&base, set, pixel);
        let samples =
            256u32.max((std::f64::consts::TAU * base.circle_radius() / pixel).ceil() as u32);
        let limit_set = limit::limit_set(&base, set, depth, samples)
            .map_err(|e| stage_failure(eps, e.into()))?;

        let report = metric::hausdorff_points(&boundary.points, &limit_set.points, Flavor::Planar)
            .map_err(|e| stage_failure(eps, e.into()))?;

        let seconds = started.elapsed().as_secs_f64();
        println!(
            "eps {eps:>6}: d_H = {:.6} ({} boundary pixels, depth {depth}, {seconds:.1}s)",
            report.d_sym,
            boundary.points.len()
        );
        records.push(EpsRecord {
            eps,
            d_h: report.d_sym,
            width: params.grid.width,
            height: params.grid.height,
            seconds,
            max_iter_used: grid.max_iter,
            limit_depth: depth,
            circle_samples: samples,
            png: png.display().to_string(),
        });
        pngs.push(png.display().to_string());
    }

    // Deterministic table: timing lives only in run.json.
    let table_path = params.out_dir.join("table.csv");
    let mut table = String::from("eps,d_h,width,height\n");
    for r in &records {
        table.push_str(&format!(
            "{:?},{:?},{},{}\n",
            r.eps, r.d_h, r.width, r.height
        ));
    }
    fs::write(&table_path, &table)?;

    let run = ConvergenceRun {
        base: BaseSpec {
            degree: params.degree,
            scale: [params.scale.re, params.scale.im],
            p: [params.center.re, params.center.im],
        },
        theta_policy: params.theta.describe(),
        pixel_count: set.points.len(),
        viewport: params.viewport,
        eps: params.eps.clone(),
        records,
        table: table_path.display().to_string(),
        pngs,
    };
    let run_json = serde_json::to_string_pretty(&run).expect("run serializes");
    fs::write(params.out_dir.join("run.json"), run_json)?;
    Ok(run)
}

fn stage_failure(eps: f64, e: Failure) -> Failure {
    match e {
        Failure::Io(m) => Failure::Io(format!("at eps {eps}: {m}")),
        Failure::Usage(m) => Failure::Usage(format!("at eps {eps}: {m}")),
        Failure::Data(m) => Failure::Data(format!("at eps {eps}: {m}")),
        Failure::Numeric(m) => Failure::Numeric(format!("at eps {eps}: {m}")),
    }
}

/// The canned demonstration: the 80-point "HI" fixture, degree 2, eps
/// sweeping 0.2 / 0.1 / 0.05 / 0.02. Deterministic outputs.
pub fn cmd_figure1(
    out_dir: &Path,
    grid: Option<GridSize>,
    max_iter: u32,
) -> Result<ConvergenceRun, Failure> {
    let set = ingest::hi_fixture();
    fs::create_dir_all(out_dir)?;
    csvio::write_points_csv(&out_dir.join("pixels.csv"), &set.points)?;
    let grid = grid.unwrap_or(GridSize {
        width: DEFAULT_GRID,
        height: DEFAULT_GRID,
    });
    let params = ConvergeParams {
        degree: 2,
        scale: Complex64::new(1.0, 0.0),
        center: Complex64::new(0.0, 0.0),
        theta: ThetaPolicy::Alternating,
        eps: FIGURE1_EPS.to_vec(),
        viewport: default_viewport(),
        grid,
        max_iter,
        out_dir: out_dir.to_path_buf(),
    };
    cmd_converge(&set, &params)
}
