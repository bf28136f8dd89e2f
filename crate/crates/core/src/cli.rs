//! Command-line front end. Reports are JSON on standard output; exit code 0
//! means the tested criterion holds, 2 a mathematical negative, 1 an error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::algebra::MultiPoly;
use crate::polytope::mixed_volume;
use crate::problem::{pair, terms_of, PolyFile, PolytopeListFile, ProblemFile, ResidueFile, ToleranceFile};
use crate::reconstruct::{class_certificate, interpolate, ReconstructError};
use crate::residues::{khovanskii_predict, residue_scale, residue_sum};
use crate::traces::{affineness_test, coordinate_affineness, default_grid_radius, AffinenessReport, TraceError};

/// Relative size of a residue sum counted as zero.
pub const VANISHING_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "abeltrace", version, about = "Trace tests, interpolation and class checks for hypersurface germs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Fit tolerance on unit-scaled samples.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Grid points per parameter axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Seed for the random linear form and sample points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Continuation waypoints per tracked path.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether the traces of the coordinates are affine in a_0.
    TraceTest {
        file: PathBuf,
        /// Test only the last coordinate.
        #[arg(long)]
        single: bool,
    },
    /// Recover the interpolating polynomial and write it to a file.
    Interpolate {
        file: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compare degrees of norms with predicted intersection numbers.
    ClassCheck { file: PathBuf },
    /// Evaluate a global residue sum and the Khovanskii prediction.
    ResidueCheck { file: PathBuf },
    /// Print the normalized mixed volume of a list of polytopes.
    MixedVolume { file: PathBuf },
}

/// A finished command: its report and exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub code: u8,
}

impl Outcome {
    fn holds(report: Value, holds: bool) -> Self {
        Self {
            report,
            code: if holds { 0 } else { 2 },
        }
    }
}

/// Operational failure with a message naming the stage or field.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn err(stage: &str, e: impl std::fmt::Display) -> CliError {
    CliError(format!("{stage}: {e}"))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| err(&path.display().to_string(), e))
}

impl Cli {
    fn overrides(&self) -> ToleranceFile {
        ToleranceFile {
            fit: self.tol,
            steps: self.steps,
            grid_size: self.grid,
            ..Default::default()
        }
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        match &self.command {
            Command::TraceTest { file, single } => self.trace_test(file, *single),
            Command::Interpolate { file, out } => self.interpolate(file, out),
            Command::ClassCheck { file } => self.class_check(file),
            Command::ResidueCheck { file } => residue_check(file),
            Command::MixedVolume { file } => mixed_volume_cmd(file),
        }
    }

    fn load(&self, path: &Path) -> Result<(ProblemFile, crate::traces::TraceProblem), CliError> {
        let text = read(path)?;
        let file = ProblemFile::parse(&text).map_err(|e| err(&path.display().to_string(), e))?;
        let prob = file
            .problem(&self.overrides())
            .map_err(|e| err(&path.display().to_string(), e))?;
        Ok((file, prob))
    }

    fn trace_test(&self, path: &Path, single: bool) -> Result<Outcome, CliError> {
        let (_, prob) = self.load(path)?;
        let n = prob.dim();
        let rep: AffinenessReport = if single {
            let r = default_grid_radius(&prob).map_err(|e| err("affineness_test", e))?;
            affineness_test(&prob, &[MultiPoly::var(n, n - 1)], r, prob.tolerances().grid_size)
        } else {
            coordinate_affineness(&prob)
        }
        .map_err(|e| err("affineness_test", e))?;
        let first = (if single { n - 1 } else { 0 })..n;
        let coords: Vec<Value> = first
            .zip(&rep.verdicts)
            .map(|(i, v)| {
                json!({
                    "coordinate": i,
                    "residual": v.residual,
                    "affine": v.is_within_degree,
                    "fit": terms_of(&v.fit.pruned(1e-12)),
                })
            })
            .collect();
        let grid = rep.verdicts.first().map(|v| &v.grid);
        let report = json!({
            "command": "trace-test",
            "verdict": if rep.positive() { "positive" } else { "negative" },
            "tolerance": prob.tolerances().fit,
            "grid": grid.map(|g| json!({
                "center": g.center.iter().copied().map(pair).collect::<Vec<_>>(),
                "radius": g.radius,
                "size": g.size,
            })),
            "coordinates": coords,
        });
        Ok(Outcome::holds(report, rep.positive()))
    }

    fn seed(&self, file: &ProblemFile) -> u64 {
        self.seed.unwrap_or(file.seed)
    }

    fn interpolate(&self, path: &Path, out: &Path) -> Result<Outcome, CliError> {
        let (file, prob) = self.load(path)?;
        let seed = self.seed(&file);
        let res = match interpolate(&prob, seed) {
            Ok(r) => r,
            Err(e) => return pipeline_failure("interpolate", e),
        };
        let text = PolyFile::new(&res.q).to_json();
        std::fs::write(out, text + "\n").map_err(|e| err(&out.display().to_string(), e))?;
        let report = json!({
            "command": "interpolate",
            "q": terms_of(&res.q),
            "germ_residual": res.germ_residual,
            "raw_germ_residual": res.raw_germ_residual,
            "cofactor_residual": res.cofactor_residual,
            "bernstein_degree": res.bernstein_degree,
            "germs": prob.germs().len(),
            "u": res.u.coefficients().iter().copied().map(pair).collect::<Vec<_>>(),
            "char_poly_residuals": res.char_poly.residuals,
            "seed": seed,
            "output": out.display().to_string(),
        });
        Ok(Outcome::holds(report, true))
    }

    fn class_check(&self, path: &Path) -> Result<Outcome, CliError> {
        let (file, prob) = self.load(path)?;
        let spec = file
            .class_spec()
            .map_err(|e| err(&path.display().to_string(), e))?
            .ok_or_else(|| err("class_spec", "the problem file has no class specification"))?;
        let seed = self.seed(&file);
        let res = match interpolate(&prob, seed) {
            Ok(r) => r,
            Err(e) => return pipeline_failure("interpolate", e),
        };
        let cert = match class_certificate(&prob, &res, &spec, seed) {
            Ok(c) => c,
            Err(e) => return pipeline_failure("class_certificate", e),
        };
        let rows: Vec<Value> = cert
            .rows
            .iter()
            .enumerate()
            .map(|(j, r)| {
                json!({
                    "divisor": j,
                    "observed": r.observed,
                    "predicted": r.predicted,
                    "retries": r.retries,
                    "match": r.observed as u64 == r.predicted,
                })
            })
            .collect();
        let report = json!({
            "command": "class-check",
            "certificate": if cert.positive() { "positive" } else { "negative" },
            "divisors": rows,
            "seed": seed,
        });
        Ok(Outcome::holds(report, cert.positive()))
    }
}

fn reason(e: &ReconstructError) -> &'static str {
    match e {
        ReconstructError::NoLinearForm { .. } => "NoLinearForm",
        ReconstructError::FitResidualExceeded { .. } => "FitResidualExceeded",
        ReconstructError::ValidationFailed { .. } => "ValidationFailed",
        ReconstructError::DegreeMismatch { .. } => "DegreeMismatch",
        ReconstructError::InvalidSpec(_) => "InvalidSpec",
        ReconstructError::Trace(TraceError::NoPolynomialFit { .. }) => "NoPolynomialFit",
        ReconstructError::Trace(_) => "TraceError",
        ReconstructError::Algebra(_) => "AlgebraError",
        ReconstructError::Polytope(_) => "PolytopeError",
        ReconstructError::Residue(_) => "ResidueError",
        ReconstructError::Curve(_) => "CurveError",
    }
}

/// Negatives become a report with exit code 2; other errors propagate.
fn pipeline_failure(command: &str, e: ReconstructError) -> Result<Outcome, CliError> {
    if !e.is_negative() {
        return Err(err(e.stage(), e));
    }
    let report = json!({
        "command": command,
        "stage": e.stage(),
        "reason": reason(&e),
        "message": e.to_string(),
    });
    Ok(Outcome { report, code: 2 })
}

fn residue_check(path: &Path) -> Result<Outcome, CliError> {
    let name = path.display().to_string();
    let file = ResidueFile::parse(&read(path)?).map_err(|e| err(&name, e))?;
    let h = file.numerator().map_err(|e| err(&name, e))?;
    let sys = file.system().map_err(|e| err(&name, e))?;
    let value = residue_sum(&h, &sys, file.toric).map_err(|e| err("residue_sum", e))?;
    let scale = residue_scale(&h, &sys, file.toric).map_err(|e| err("residue_sum", e))?;
    let vanishing = file.toric
        && khovanskii_predict(&h, sys.equations()).map_err(|e| err("khovanskii_predict", e))?;
    let holds = !vanishing || value.norm() <= VANISHING_TOLERANCE * scale.max(1.0);
    let report = json!({
        "command": "residue-check",
        "value": pair(value),
        "abs": value.norm(),
        "scale": scale,
        "toric": file.toric,
        "predicted": if vanishing { "vanishing" } else { "none" },
    });
    Ok(Outcome::holds(report, holds))
}

fn mixed_volume_cmd(path: &Path) -> Result<Outcome, CliError> {
    let name = path.display().to_string();
    let file = PolytopeListFile::parse(&read(path)?).map_err(|e| err(&name, e))?;
    let polys = file.polytopes().map_err(|e| err(&name, e))?;
    let mv = mixed_volume(&polys).map_err(|e| err("mixed_volume", e))?;
    Ok(Outcome::holds(json!(mv), true))
}
