//! Subcommand implementations and exit-code mapping.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use oscquad_core::geometry::Mesh;
use oscquad_core::{Error, IntegrandKind, IntegrandSpec};

use crate::domains::Domain;
use crate::meshio::{load_mesh, MeshIoError};
use crate::parallel;
use crate::selftest;
use crate::settings::Settings;
use crate::sweep::{self, SweepOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

pub const INTEGRATE_HEADER: &str =
    "omega,value_re,value_im,err_est,time_ms,n_leaves,n_boundary_segments,svd_calls,max_depth";
pub const ORACLE_HEADER: &str = "omega,ref_re,ref_im";

#[derive(Debug, Parser)]
#[command(
    name = "oscquad",
    version,
    about = "Adaptive Levin quadrature of oscillatory integrals over curved triangle meshes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrates one integrand at one frequency.
    Integrate {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        omega: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Integrates over a list or range of frequencies and writes CSV rows.
    Sweep {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        omegas: Omegas,
        /// Also compute a reference value per frequency.
        #[arg(long)]
        oracle: bool,
        /// Leave the time_ms column empty so output is reproducible.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Computes the reference value by brute-force quadrature.
    Oracle {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        omega: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Writes a built-in domain as a mesh file.
    GenDomain {
        /// reftri, unitsquare or resonance.
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the built-in invariant checks.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Problem {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    pub integrand: IntegrandKind,
    /// Plane-wave direction.
    #[arg(long, value_parser = parse_pair, default_value = "1,0")]
    pub dir: [f64; 2],
    /// Center of the quadratic and radial phases.
    #[arg(long, value_parser = parse_pair, default_value = "0,0")]
    pub center: [f64; 2],
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Omegas {
    #[arg(long)]
    pub omega: Option<f64>,
    /// Comma-separated frequencies.
    #[arg(long)]
    pub omegas: Option<String>,
    /// `lo:hi:points_per_decade`, log-spaced.
    #[arg(long)]
    pub omega_range: Option<String>,
}

#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` settings file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides one setting, e.g. `--set k=6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output file; standard output by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<IntegrandKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let bad = || format!("expected 'x,y', found '{s}'");
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok([
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ])
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Mesh(#[from] MeshIoError),
    #[error(transparent)]
    Settings(#[from] crate::settings::SettingsError),
    #[error(transparent)]
    Solver(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
    #[error("{0} selftest check(s) failed")]
    Selftest(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(e) if e.is_nonconvergence() => EXIT_NONCONVERGENCE,
            CliError::Selftest(_) => EXIT_SELFTEST,
            _ => EXIT_USAGE,
        }
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Output {
            path: p.display().to_string(),
            source,
        }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Output {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn spec_of(p: &Problem, omega: f64) -> IntegrandSpec {
    IntegrandSpec::new(p.integrand, omega)
        .with_direction(p.dir)
        .with_center(p.center)
}

fn load(p: &Problem, c: &Common) -> Result<(Mesh, Settings), CliError> {
    let settings = Settings::load(c.config.as_deref(), &c.set)?;
    Ok((load_mesh(&p.mesh)?, settings))
}

fn integrate(
    problem: &Problem,
    omega: f64,
    common: &Common,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let (mesh, settings) = load(problem, common)?;
    let f = sweep::integrand_for(&spec_of(problem, omega), omega, &mesh)?;
    let start = Instant::now();
    let r = parallel::integrate_mesh(&mesh, &f, &settings.levin, parallel::thread_count())?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let text = format!(
        "{INTEGRATE_HEADER}\n{omega:.17e},{:.17e},{:.17e},{:.17e},{ms:.3},{},{},{},{}\n",
        r.value.re,
        r.value.im,
        r.err_est,
        r.n_leaves,
        r.n_boundary_segments,
        r.svd_calls,
        r.max_depth_reached
    );
    emit(common.out.as_deref(), &text, stdout)
}

fn oracle(
    problem: &Problem,
    omega: f64,
    common: &Common,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let (mesh, mut settings) = load(problem, common)?;
    settings.oracle_max_omega = f64::INFINITY;
    let f = sweep::integrand_for(&spec_of(problem, omega), omega, &mesh)?;
    let v = sweep::reference(&mesh, &f, &settings, parallel::thread_count())?
        .expect("reference is always computed here");
    emit(
        common.out.as_deref(),
        &format!(
            "{ORACLE_HEADER}\n{omega:.17e},{:.17e},{:.17e}\n",
            v.re, v.im
        ),
        stdout,
    )
}

fn omega_values(o: &Omegas) -> Result<Vec<f64>, CliError> {
    let list = match (o.omega, &o.omegas, &o.omega_range) {
        (Some(w), _, _) => sweep::omega_list(&w.to_string()),
        (_, Some(s), _) => sweep::omega_list(s),
        (_, _, Some(r)) => sweep::omega_range(r),
        _ => Ok(Vec::new()),
    }
    .map_err(CliError::Usage)?;
    if list.is_empty() {
        return Err(CliError::Usage("no frequencies given".into()));
    }
    Ok(list)
}

fn run_sweep(
    problem: &Problem,
    omegas: &Omegas,
    oracle: bool,
    timing: bool,
    common: &Common,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let omegas = omega_values(omegas)?;
    let (mesh, settings) = load(problem, common)?;
    let opts = SweepOptions {
        oracle,
        timing,
        threads: parallel::thread_count(),
    };
    let rows = sweep::run(
        &mesh,
        &spec_of(problem, 0.0),
        &omegas,
        &settings,
        opts,
        &mut |m| {
            let _ = writeln!(stderr, "warning: {m}");
        },
    );
    emit(common.out.as_deref(), &sweep::to_csv(&rows), stdout)
}

fn gen_domain(name: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let d: Domain = name.parse().map_err(CliError::Usage)?;
    emit(out, &d.mesh_file().to_text(), stdout)
}

fn run_selftest(common: &Common, stdout: &mut dyn Write) -> Result<(), CliError> {
    let settings = Settings::load(common.config.as_deref(), &common.set)?;
    let checks = selftest::run(&settings);
    emit(common.out.as_deref(), &selftest::table(&checks), stdout)?;
    match checks.iter().filter(|c| c.outcome.is_err()).count() {
        0 => Ok(()),
        n => Err(CliError::Selftest(n)),
    }
}

pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Integrate {
            problem,
            omega,
            common,
        } => integrate(&problem, omega, &common, stdout),
        Command::Sweep {
            problem,
            omegas,
            oracle,
            no_timing,
            common,
        } => run_sweep(
            &problem, &omegas, oracle, !no_timing, &common, stdout, stderr,
        ),
        Command::Oracle {
            problem,
            omega,
            common,
        } => oracle(&problem, omega, &common, stdout),
        Command::GenDomain { name, out } => gen_domain(&name, out.as_deref(), stdout),
        Command::Selftest { common } => run_selftest(&common, stdout),
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
