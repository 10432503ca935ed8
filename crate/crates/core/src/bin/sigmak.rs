use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use sigmak::cli::{self, parse_config, Command, ConeSpec, RunConfig, RunReport};
use sigmak::{Error, Result};

/// Numerical checks for conformal metrics with constant sigma_k curvature
/// and constant boundary mean curvature on the unit ball.
#[derive(Parser)]
#[command(name = "sigmak", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Build a canonical metric from (case, sigma, H) and check it.
    Canonical(Common),
    /// Run pointwise and integral identity suites on a field.
    Identities(Common),
    /// Round-trip and feasibility over a grid of targets.
    Sweep(Common),
    /// Cone membership of spectra or symmetric matrices.
    Cone {
        #[command(flatten)]
        common: Common,
        /// Query file; read from stdin when neither this nor --config is given.
        input: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path. CSV tables are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quadrature resolution N.
    #[arg(long)]
    quadrature_n: Option<usize>,
    /// Overrides every check tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Worker threads for quadrature.
    #[arg(long)]
    threads: Option<usize>,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))
}

fn load(common: &Common, required: bool) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => parse_config(&read_text(p)?)?,
        None if required => return Err(Error::Argument("--config is required".into())),
        None => parse_config("{}")?,
    };
    if let Some(n) = common.quadrature_n {
        cfg.quadrature_n = n;
    }
    if let Some(t) = common.tolerance {
        cfg.tolerances.pointwise = t;
        cfg.tolerances.boundary = t;
        cfg.tolerances.quadrature = t;
    }
    Ok(cfg)
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Argument(format!("cannot write {}: {e}", path.display()))
}

fn emit(report: &RunReport, out: Option<PathBuf>) -> Result<()> {
    let json = report.to_json()?;
    let Some(path) = out else {
        let mut stdout = std::io::stdout().lock();
        return writeln!(stdout, "{json}").map_err(|e| Error::Argument(format!("stdout: {e}")));
    };
    std::fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))?;
    if !report.checks.is_empty() {
        let csv = path.with_extension("csv");
        report.write_checks_csv(BufWriter::new(File::create(&csv).map_err(|e| io_err(&csv, e))?))?;
    }
    if !report.sweep.is_empty() {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let csv = path.with_file_name(format!("{stem}_sweep.csv"));
        report.write_sweep_csv(BufWriter::new(File::create(&csv).map_err(|e| io_err(&csv, e))?))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<bool> {
    let (command, common, input) = match cli.command {
        Sub::Canonical(c) => (Command::Canonical, c, None),
        Sub::Identities(c) => (Command::Identities, c, None),
        Sub::Sweep(c) => (Command::Sweep, c, None),
        Sub::Cone { common, input } => (Command::Cone, common, Some(input)),
    };
    let mut cfg = load(&common, command != Command::Cone)?;
    if let Some(input) = input {
        let text = match (input, &cfg.cone) {
            (Some(p), _) => Some(read_text(&p)?),
            (None, Some(_)) => None,
            (None, None) => {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Argument(format!("stdin: {e}")))?;
                Some(s)
            }
        };
        if let Some(queries) = text {
            cfg.cone = Some(ConeSpec { queries });
        }
    }
    if let Some(t) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Argument(format!("--threads: {e}")))?;
    }
    let out = common.out.or_else(|| cfg.output.as_ref().map(PathBuf::from));
    let report = cli::run(command, cfg)?;
    emit(&report, out)?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("sigmak: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("sigmak: {e}");
            ExitCode::from(2)
        }
    }
}
