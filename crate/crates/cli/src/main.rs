mod args;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use hypersurface_spectra::bound_verifier::{refinement_study, verify_bound, verify_mesh, Tolerances};
use hypersurface_spectra::center_of_mass::{default_tolerance, solve_com, CloudFile, MassDistribution};
use hypersurface_spectra::discrete_laplace::io::read_mesh_file;
use hypersurface_spectra::spaces::ricci_constant;
use hypersurface_spectra::sphere_spectrum::{crossing_threshold, lambda1_geodesic_sphere, norm_a_sq, riccati_residual, trace_a};
use hypersurface_spectra::{Error, Kind, SpaceSpec};

use args::{shape_of, Cli, Command, GArg, Grid, OutputArgs, TolArgs};

/// Why a run did not finish cleanly; maps onto the exit status.
enum Failure {
    /// A mathematical check failed (exit 2).
    Check(String),
    /// Bad usage or a runtime error (exit 1).
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CrossingViolation { .. } | Error::NonConvergence { .. } | Error::SolverNonConvergence { .. } => {
                Failure::Check(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Runtime(s)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit<T: Serialize>(value: &T, out: &OutputArgs) -> Result<(), Failure> {
    let text = output::render(value, out.format)?;
    output::write(&text, out.output.as_deref())?;
    Ok(())
}

fn tolerances(t: &TolArgs) -> Result<Tolerances, Failure> {
    if !(t.c > 0.0) {
        return Err(Failure::Runtime(format!("--c must be positive, got {}", t.c)));
    }
    Ok(Tolerances {
        c: t.c,
        com_tol: t.com_tol,
        ..Tolerances::default()
    })
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Spectrum { space, r_grid, out } => spectrum(space.resolve()?, r_grid, &out),
        Command::Riccati {
            space,
            r_grid,
            h,
            max_residual,
            out,
        } => riccati(space.resolve()?, r_grid, h, max_residual, &out),
        Command::Com {
            space,
            points,
            g,
            tol,
            max_iter,
            out,
        } => {
            let text = std::fs::read_to_string(&points).map_err(|e| format!("{}: {e}", points.display()))?;
            let file: CloudFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", points.display()))?;
            space.check_matches(file.space)?;
            let cloud = file.into_cloud()?;
            let g = match g {
                GArg::InverseT => MassDistribution::InverseT,
                GArg::Constant => MassDistribution::Constant,
            };
            let tol = tol.unwrap_or_else(|| default_tolerance(cloud.diameter()));
            let result = solve_com(&cloud, &g, tol, max_iter)?;
            emit(&result, &out)?;
            if !result.converged {
                return Err(Failure::Check(format!(
                    "center of mass not converged: residual {} > {tol}",
                    result.residual
                )));
            }
            Ok(())
        }
        Command::Verify {
            space,
            shape,
            subdiv,
            mesh,
            tol,
            out,
        } => {
            let tol = tolerances(&tol)?;
            let report = match mesh {
                Some(path) => {
                    let mesh = read_mesh_file(&path)?;
                    space.check_matches(mesh.space())?;
                    verify_mesh(&mesh, &tol)?
                }
                None => {
                    let subdiv = subdiv.ok_or_else(|| "--subdiv is required".to_string())?;
                    verify_bound(space.resolve()?, shape_of(&shape)?, subdiv, &tol)?
                }
            };
            emit(&report, &out)?;
            let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
            if !failed.is_empty() {
                return Err(Failure::Check(failed.join(", ")));
            }
            Ok(())
        }
        Command::Study {
            space,
            shape,
            subdivs,
            tol,
            out,
        } => {
            let tol = tolerances(&tol)?;
            let study = refinement_study(space.resolve()?, shape_of(&shape)?, &subdivs, &tol)?;
            emit(&study, &out)?;
            let failed: Vec<String> = study
                .reports
                .iter()
                .flat_map(|r| {
                    r.checks
                        .iter()
                        .filter(|c| !c.pass)
                        .map(move |c| format!("{} at level {}", c.name, r.subdiv.unwrap_or(0)))
                })
                .collect();
            if !failed.is_empty() {
                return Err(Failure::Check(failed.join(", ")));
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    r: f64,
    lambda1: Option<f64>,
    trace_a: f64,
    norm_a_sq: f64,
    ricci: f64,
    threshold: Option<f64>,
    threshold_ok: bool,
}

fn spectrum(space: SpaceSpec, grid: Grid, out: &OutputArgs) -> Result<(), Failure> {
    let threshold = match space.kind() {
        Kind::Compact => Some(crossing_threshold(&space)?).filter(|t| t.is_finite()),
        _ => None,
    };
    let mut violations = Vec::new();
    let mut rows = Vec::new();
    for r in grid.values() {
        let lambda1 = match lambda1_geodesic_sphere(&space, r) {
            Ok(v) => Some(v),
            Err(e @ Error::CrossingViolation { .. }) => {
                violations.push(e.to_string());
                None
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(SpectrumRow {
            r,
            lambda1,
            trace_a: trace_a(&space, r)?,
            norm_a_sq: norm_a_sq(&space, r)?,
            ricci: ricci_constant(&space),
            threshold,
            threshold_ok: lambda1.is_some(),
        });
    }
    emit(&rows, out)?;
    if !violations.is_empty() {
        return Err(Failure::Check(violations.join("; ")));
    }
    Ok(())
}

#[derive(Serialize)]
struct RiccatiRow {
    r: f64,
    h: f64,
    residual: f64,
    threshold: f64,
    pass: bool,
}

fn riccati(space: SpaceSpec, grid: Grid, h: f64, max_residual: f64, out: &OutputArgs) -> Result<(), Failure> {
    let rows = grid
        .values()
        .into_iter()
        .map(|r| {
            let residual = riccati_residual(&space, r, h)?;
            Ok(RiccatiRow {
                r,
                h,
                residual,
                threshold: max_residual,
                pass: residual <= max_residual,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    emit(&rows, out)?;
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    if rows.iter().any(|r| !r.pass) {
        return Err(Failure::Check(format!(
            "Riccati residual {worst} exceeds {max_residual}"
        )));
    }
    Ok(())
}

