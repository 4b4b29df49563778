use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;

use dipole_julia::metric::Flavor;
use dipole_julia::viewport::Viewport;
use dipole_julia_cli::commands::{self, ConvergeParams, GridSize, RenderMethod, ThetaPolicy};
use dipole_julia_cli::failure::Failure;

/// Build Julia-set approximations of planar shapes and measure their
/// Hausdorff convergence.
#[derive(Parser)]
#[command(name = "dipole-julia", version, about)]
struct Cli {
    /// JSON config file supplying defaults for any flag; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker thread cap for the parallel stages.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct RenderFlags {
    /// Viewport as re_min,re_max,im_min,im_max.
    #[arg(long)]
    viewport: Option<String>,

    /// Grid size as W or WxH.
    #[arg(long)]
    grid: Option<String>,

    /// Initial iteration budget per pixel (doubles automatically while
    /// undecided pixels pile up away from the basin boundary).
    #[arg(long)]
    max_iter: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize a shape (image or point/polyline CSV) onto a lattice.
    Pixelate {
        /// PNG/PGM image or a CSV of points.
        #[arg(long)]
        input: PathBuf,
        /// Treat CSV rows as polyline vertices instead of bare points.
        #[arg(long)]
        polyline: bool,
        /// Lattice pitch.
        #[arg(long)]
        pitch: Option<f64>,
        /// Viewport placing a bitmap in the plane: re_min,re_max,im_min,im_max.
        #[arg(long)]
        viewport: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a dipole map from a pixel-set CSV.
    Build {
        #[arg(long)]
        pixels: PathBuf,
        /// Base map degree N (at least 2).
        #[arg(long)]
        degree: Option<u32>,
        /// Base map scale C as re or re,im.
        #[arg(long)]
        scale: Option<String>,
        /// Base map center p as re or re,im.
        #[arg(long)]
        center: Option<String>,
        /// Dipole separation.
        #[arg(long)]
        eps: Option<f64>,
        /// Constant dipole orientation in radians (default: alternate 0/pi
        /// between consecutive pixels, which keeps the far fields canceled).
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a map JSON: PNG, metadata sidecar, and a Julia cloud CSV.
    Render {
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        render: RenderFlags,
        /// boundary (grid labels) or inverse (backward orbit).
        #[arg(long)]
        method: Option<String>,
        /// Inverse-orbit point count.
        #[arg(long)]
        count: Option<usize>,
        /// Inverse-orbit burn-in.
        #[arg(long)]
        burn_in: Option<usize>,
        /// RNG seed for the inverse orbit.
        #[arg(long)]
        seed: Option<u64>,
        /// Output prefix; writes <prefix>.png/.json/.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the limit set of a map's base against a pixel set.
    Limitset {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        pixels: PathBuf,
        /// Preimage depth K.
        #[arg(long)]
        depth: Option<u32>,
        /// Or: pick the depth so layer-K points sit within tol of the circle.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        circle_samples: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hausdorff distance between two point CSVs.
    Hausdorff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// planar or chordal.
        #[arg(long)]
        flavor: Option<String>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep eps over one pixel set: render, measure d_H, tabulate.
    Converge {
        #[arg(long)]
        pixels: PathBuf,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        scale: Option<String>,
        #[arg(long)]
        center: Option<String>,
        /// Comma-separated strictly decreasing separations, e.g. 0.2,0.1,0.05.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        theta: Option<f64>,
        #[command(flatten)]
        render: RenderFlags,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The canned 80-dipole "HI" sweep at eps = 0.2, 0.1, 0.05, 0.02.
    Figure1 {
        #[command(flatten)]
        render: RenderFlags,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Optional JSON config mirroring the flags.
#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct Config {
    viewport: Option<[f64; 4]>,
    grid: Option<String>,
    max_iter: Option<u32>,
    pitch: Option<f64>,
    degree: Option<u32>,
    scale: Option<String>,
    center: Option<String>,
    eps: Option<String>,
    theta: Option<f64>,
    method: Option<String>,
    count: Option<usize>,
    burn_in: Option<usize>,
    seed: Option<u64>,
    flavor: Option<String>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
}

fn load_config(path: Option<&PathBuf>) -> Result<Config, Failure> {
    match path {
        None => Ok(Config::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("bad config {}: {e}", p.display())))
        }
    }
}

fn parse_viewport(text: &str) -> Result<Viewport, Failure> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("cannot parse viewport {text:?}")))?;
    if parts.len() != 4 || parts[1] <= parts[0] || parts[3] <= parts[2] {
        return Err(Failure::Usage(format!(
            "viewport must be re_min,re_max,im_min,im_max with positive extent, got {text:?}"
        )));
    }
    Ok(Viewport::new(parts[0], parts[1], parts[2], parts[3]))
}

fn parse_grid(text: &str) -> Result<GridSize, Failure> {
    let bad = || Failure::Usage(format!("cannot parse grid {text:?} (want W or WxH)"));
    let (w, h) = match text.split_once('x') {
        Some((w, h)) => (w.trim(), h.trim()),
        None => (text.trim(), text.trim()),
    };
    let width = w.parse::<u32>().map_err(|_| bad())?;
    let height = h.parse::<u32>().map_err(|_| bad())?;
    Ok(GridSize { width, height })
}

fn parse_complex(text: &str) -> Result<Complex64, Failure> {
    let bad = || {
        Failure::Usage(format!(
            "cannot parse complex number {text:?} (want re or re,im)"
        ))
    };
    match text.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(Complex64::new(text.trim().parse().map_err(|_| bad())?, 0.0)),
    }
}

fn parse_eps_list(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("cannot parse eps value {s:?}")))
        })
        .collect()
}

struct Resolver {
    config: Config,
}

impl Resolver {
    fn viewport(&self, flag: &Option<String>) -> Result<Option<Viewport>, Failure> {
        match (flag, self.config.viewport) {
            (Some(text), _) => parse_viewport(text).map(Some),
            (None, Some([a, b, c, d])) => {
                if b <= a || d <= c {
                    return Err(Failure::Usage("config viewport has empty extent".into()));
                }
                Ok(Some(Viewport::new(a, b, c, d)))
            }
            (None, None) => Ok(None),
        }
    }

    fn grid(&self, flags: &RenderFlags) -> Result<Option<GridSize>, Failure> {
        match (&flags.grid, &self.config.grid) {
            (Some(t), _) | (None, Some(t)) => parse_grid(t).map(Some),
            (None, None) => Ok(None),
        }
    }

    fn complex(
        &self,
        flag: &Option<String>,
        key: &Option<String>,
    ) -> Result<Option<Complex64>, Failure> {
        match (flag, key) {
            (Some(t), _) | (None, Some(t)) => parse_complex(t).map(Some),
            (None, None) => Ok(None),
        }
    }

    fn method(&self, flag: &Option<String>) -> Result<RenderMethod, Failure> {
        match flag.as_deref().or(self.config.method.as_deref()) {
            None | Some("boundary") => Ok(RenderMethod::Boundary),
            Some("inverse") => Ok(RenderMethod::Inverse),
            Some(other) => Err(Failure::Usage(format!(
                "method must be boundary or inverse, got {other:?}"
            ))),
        }
    }

    fn flavor(&self, flag: &Option<String>) -> Result<Flavor, Failure> {
        match flag.as_deref().or(self.config.flavor.as_deref()) {
            None | Some("planar") => Ok(Flavor::Planar),
            Some("chordal") => Ok(Flavor::Chordal),
            Some(other) => Err(Failure::Usage(format!(
                "flavor must be planar or chordal, got {other:?}"
            ))),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = load_config(cli.config.as_ref())?;
    if let Some(jobs) = cli.jobs.or(config.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot size the worker pool: {e}")))?;
    }
    let r = Resolver { config };

    match cli.command {
        Command::Pixelate {
            input,
            polyline,
            pitch,
            viewport,
            out,
        } => {
            let pitch = pitch
                .or(r.config.pitch)
                .ok_or_else(|| Failure::Usage("pixelate needs --pitch".into()))?;
            let vp = r.viewport(&viewport)?;
            commands::cmd_pixelate(&input, polyline, pitch, vp, &out)
        }
        Command::Build {
            pixels,
            degree,
            scale,
            center,
            eps,
            theta,
            out,
        } => {
            let degree = degree
                .or(r.config.degree)
                .ok_or_else(|| Failure::Usage("build needs --degree".into()))?;
            let scale = r
                .complex(&scale, &r.config.scale)?
                .unwrap_or(Complex64::new(1.0, 0.0));
            let center = r
                .complex(&center, &r.config.center)?
                .unwrap_or(Complex64::new(0.0, 0.0));
            let eps = eps
                .or_else(|| {
                    r.config
                        .eps
                        .as_deref()
                        .and_then(|t| parse_eps_list(t).ok()?.first().copied())
                })
                .ok_or_else(|| Failure::Usage("build needs --eps".into()))?;
            let theta = match theta.or(r.config.theta) {
                Some(t) => ThetaPolicy::Constant(t),
                None => ThetaPolicy::Alternating,
            };
            commands::cmd_build(&pixels, degree, scale, center, eps, theta, &out)
        }
        Command::Render {
            map,
            render,
            method,
            count,
            burn_in,
            seed,
            out,
        } => {
            let viewport = r
                .viewport(&render.viewport)?
                .unwrap_or_else(commands::default_viewport);
            let grid = r.grid(&render)?.unwrap_or(GridSize {
                width: commands::DEFAULT_GRID,
                height: commands::DEFAULT_GRID,
            });
            let max_iter = render
                .max_iter
                .or(r.config.max_iter)
                .unwrap_or(commands::DEFAULT_MAX_ITER);
            let method = r.method(&method)?;
            let count = count
                .or(r.config.count)
                .unwrap_or(commands::DEFAULT_INVERSE_COUNT);
            let burn_in = burn_in
                .or(r.config.burn_in)
                .unwrap_or(commands::DEFAULT_BURN_IN);
            let seed = seed.or(r.config.seed).unwrap_or(0);
            commands::cmd_render(
                &map, viewport, grid, max_iter, method, count, burn_in, seed, &out,
            )
        }
        Command::Limitset {
            map,
            pixels,
            depth,
            tol,
            circle_samples,
            out,
        } => commands::cmd_limitset(&map, &pixels, depth, tol, circle_samples, &out),
        Command::Hausdorff { a, b, flavor, out } => {
            let flavor = r.flavor(&flavor)?;
            commands::cmd_hausdorff(&a, &b, flavor, out.as_deref())
        }
        Command::Converge {
            pixels,
            degree,
            scale,
            center,
            eps,
            theta,
            render,
            out,
        } => {
            let set = dipole_julia::ingest::PixelSet::from_points(
                dipole_julia::csvio::read_points_csv(&pixels)?,
            );
            if set.points.is_empty() {
                return Err(Failure::Data(format!(
                    "{} contains no points",
                    pixels.display()
                )));
            }
            let degree = degree
                .or(r.config.degree)
                .ok_or_else(|| Failure::Usage("converge needs --degree".into()))?;
            let scale = r
                .complex(&scale, &r.config.scale)?
                .unwrap_or(Complex64::new(1.0, 0.0));
            let center = r
                .complex(&center, &r.config.center)?
                .unwrap_or(Complex64::new(0.0, 0.0));
            let eps_text = eps
                .or_else(|| r.config.eps.clone())
                .ok_or_else(|| Failure::Usage("converge needs --eps".into()))?;
            let params = ConvergeParams {
                degree,
                scale,
                center,
                theta: match theta.or(r.config.theta) {
                    Some(t) => ThetaPolicy::Constant(t),
                    None => ThetaPolicy::Alternating,
                },
                eps: parse_eps_list(&eps_text)?,
                viewport: r
                    .viewport(&render.viewport)?
                    .unwrap_or_else(commands::default_viewport),
                grid: r.grid(&render)?.unwrap_or(GridSize {
                    width: commands::DEFAULT_GRID,
                    height: commands::DEFAULT_GRID,
                }),
                max_iter: render
                    .max_iter
                    .or(r.config.max_iter)
                    .unwrap_or(commands::DEFAULT_MAX_ITER),
                out_dir: out
                    .or_else(|| r.config.out.clone())
                    .unwrap_or_else(|| PathBuf::from("out")),
            };
            commands::cmd_converge(&set, &params).map(|_| ())
        }
        Command::Figure1 { render, out } => {
            let grid = r.grid(&render)?;
            let max_iter = render
                .max_iter
                .or(r.config.max_iter)
                .unwrap_or(commands::DEFAULT_MAX_ITER);
            let out_dir = out
                .or_else(|| r.config.out.clone())
                .unwrap_or_else(|| PathBuf::from("figure1"));
            commands::cmd_figure1(&out_dir, grid, max_iter).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
