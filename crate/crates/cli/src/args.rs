use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypersurface_spectra::{Field, Kind, Result, SpaceSpec};

#[derive(Parser, Debug)]
#[command(name = "hsspec", version, about = "First-eigenvalue bounds for hypersurfaces in rank-1 symmetric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form spectra of geodesic spheres over a grid of radii.
    Spectrum {
        #[command(flatten)]
        space: SpaceArgs,
        /// Inclusive grid `a:b:steps`.
        #[arg(long, value_parser = parse_grid)]
        r_grid: Grid,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Central-difference residuals of the traced Riccati equation.
    Riccati {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_parser = parse_grid)]
        r_grid: Grid,
        #[arg(long, default_value_t = 1e-5)]
        h: f64,
        /// Residuals above this fail the run.
        #[arg(long, default_value_t = 1e-6)]
        max_residual: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Center of mass of a weighted point cloud.
    Com {
        #[command(flatten)]
        space: SpaceArgs,
        /// Point-cloud JSON file.
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum, default_value_t = GArg::InverseT)]
        g: GArg,
        /// Defaults to 1e-10 (1 + cloud diameter).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Verify the eigenvalue bound on one generated or loaded mesh.
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        shape: ShapeArgs,
        /// Icosphere level (surfaces) or segment count (curves).
        #[arg(long, required_unless_present = "mesh")]
        subdiv: Option<usize>,
        /// Mesh file (`.off` or JSON) used instead of a generated shape.
        #[arg(long, conflicts_with_all = ["shape", "subdiv"])]
        mesh: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Verify the bound over several subdivision levels.
    Study {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        shape: ShapeArgs,
        /// Comma-separated levels, at least three.
        #[arg(long, value_delimiter = ',', required = true)]
        subdivs: Vec<usize>,
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
pub struct SpaceArgs {
    #[arg(long, value_enum)]
    pub field: Option<FieldArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
}

impl SpaceArgs {
    pub fn is_empty(&self) -> bool {
        self.field.is_none() && self.n.is_none() && self.kind.is_none()
    }

    pub fn resolve(&self) -> std::result::Result<SpaceSpec, String> {
        match (self.field, self.n, self.kind) {
            (Some(f), Some(n), Some(k)) => SpaceSpec::new(f.into(), n, k.into()).map_err(|e| e.to_string()),
            _ => Err("--field, --n and --kind are all required".into()),
        }
    }

    /// Checks flags given alongside a file that carries its own space.
    pub fn check_matches(&self, actual: SpaceSpec) -> std::result::Result<(), String> {
        if self.is_empty() {
            return Ok(());
        }
        let given = self.resolve()?;
        if given != actual {
            return Err(format!("flags describe {given} but the file is in {actual}"));
        }
        Ok(())
    }
}

#[derive(Args, Debug)]
pub struct ShapeArgs {
    /// geodesic-sphere, circle, ellipsoid, ellipse or perturbed-sphere.
    #[arg(long)]
    pub shape: Option<String>,
    /// Shape parameter `key=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
}

#[derive(Args, Debug)]
pub struct TolArgs {
    /// Constant `C` of the tolerance `C h max(rhs, 1)`.
    #[arg(long, default_value_t = 0.5)]
    pub c: f64,
    /// Center-of-mass tolerance.
    #[arg(long)]
    pub com_tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FieldArg {
    #[value(name = "R")]
    R,
    #[value(name = "C")]
    C,
    #[value(name = "H")]
    H,
    #[value(name = "Ca")]
    Ca,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Field {
        match f {
            FieldArg::R => Field::R,
            FieldArg::C => Field::C,
            FieldArg::H => Field::H,
            FieldArg::Ca => Field::Ca,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Compact,
    Noncompact,
    Euclidean,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Compact => Kind::Compact,
            KindArg::Noncompact => Kind::Noncompact,
            KindArg::Euclidean => Kind::Euclidean,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GArg {
    InverseT,
    Constant,
}

/// Inclusive grid of `steps` equally spaced values from `start` to `end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let span = self.end - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.end } else { self.start + span * i as f64 / last })
            .collect()
    }
}

pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected a:b:steps, got `{s}`"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number"));
    let (start, end) = (num(a)?, num(b)?);
    let steps: usize = n.trim().parse().map_err(|_| format!("`{n}` is not a step count"))?;
    if steps == 0 {
        return Err("grid needs at least one step".into());
    }
    if steps == 1 && start != end {
        return Err(format!("a single-step grid needs a == b, got {start}:{end}"));
    }
    if !start.is_finite() || !end.is_finite() {
        return Err("grid endpoints must be finite".into());
    }
    Ok(Grid { start, end, steps })
}

pub fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

pub fn shape_of(args: &ShapeArgs) -> Result<hypersurface_spectra::discrete_laplace::ShapeFamily> {
    let name = args.shape.as_deref().ok_or_else(|| {
        hypersurface_spectra::Error::UnsupportedFamily("--shape is required".into())
    })?;
    hypersurface_spectra::discrete_laplace::ShapeFamily::from_params(name, &args.params)
}
