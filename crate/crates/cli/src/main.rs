mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use handelman::certify::{
    certificate_matrix, inspect, inspect_simplex, read_certificate, read_problem, to_schmudgen,
    verify_certificate, verify_sos, write_certificate, write_sos, CertifyConfig, CertifyError, Domain,
    FileError, HandelmanCertificate, Problem, VerifyError,
};
use handelman::exactalg::{parse_rat, Rat};
use handelman::polya::{PolyaError, Progress, Sweep};
use handelman::polytope::{barycentric_coords, PolytopeError};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "handelman", version, about = "Positivity certificates for polynomial matrices on polytopes")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a certificate for a problem file.
    Certify {
        input: PathBuf,
        /// Certificate path (default: <input>.cert.json).
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        job: JobArgs,
    },
    /// Check a certificate against a problem file.
    Verify { certificate: PathBuf, input: PathBuf },
    /// Regroup a certificate into sum of squares form.
    Schmudgen {
        certificate: PathBuf,
        /// Also verify the certificate against this problem file.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output path (default: <certificate>.sos.json).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print normalization data and bounds without expanding.
    Inspect {
        input: PathBuf,
        #[command(flatten)]
        job: JobArgs,
    },
}

#[derive(Args)]
struct JobArgs {
    /// Sampler seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base lattice resolution of the simplex sampler.
    #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u32).range(1..))]
    resolution: u32,
    #[arg(long, default_value_t = 3)]
    refine_rounds: u32,
    /// Search cap on N (default: the degree bound).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n_cap: Option<u64>,
    #[arg(long, default_value_t = 6)]
    escalation_rounds: u32,
    /// Memory cap for a single expansion level.
    #[arg(long, default_value_t = 2048, value_parser = clap::value_parser!(u64).range(1..))]
    mem_cap_mb: u64,
    /// Abort the expansion after this many seconds.
    #[arg(long)]
    max_seconds: Option<f64>,
    /// Relative inflation of spectral norm bounds, e.g. 1/100.
    #[arg(long, default_value = "0", value_parser = parse_nonnegative_rat)]
    inflation: Rat,
}

fn parse_nonnegative_rat(s: &str) -> Result<Rat, String> {
    let r = parse_rat(s).map_err(|e| e.to_string())?;
    if r < Rat::from_integer(0.into()) {
        return Err("must be nonnegative".into());
    }
    Ok(r)
}

impl JobArgs {
    fn config(&self) -> Result<CertifyConfig, CliError> {
        let mut config = CertifyConfig {
            resolution: self.resolution,
            refine_rounds: self.refine_rounds,
            seed: self.seed,
            inflation: self.inflation.clone(),
            n_cap: self.n_cap,
            escalation_rounds: self.escalation_rounds,
            ..CertifyConfig::default()
        };
        config.limits.max_bytes = self.mem_cap_mb.saturating_mul(1 << 20);
        if let Some(s) = self.max_seconds {
            let limit = Duration::try_from_secs_f64(s)
                .ok()
                .filter(|d| !d.is_zero())
                .ok_or_else(|| CliError::Usage(format!("--max-seconds must be positive, got {s}")))?;
            config.limits.deadline = Some(Instant::now() + limit);
        }
        Ok(config)
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: FileError },
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error("verification failed: {0}")]
    Verify(#[from] VerifyError),
    #[error("verification failed: certificate is for a different domain than the problem file")]
    DomainMismatch,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Write { .. } | CliError::Parse { .. } => 2,
            CliError::Verify(_) | CliError::DomainMismatch => 1,
            CliError::Certify(e) => match e {
                CertifyError::Polytope(
                    PolytopeError::Unbounded(..)
                    | PolytopeError::EmptyInterior
                    | PolytopeError::NotNormalizable
                    | PolytopeError::BInconsistent(_)
                    | PolytopeError::AffinelyDependent,
                ) => 3,
                CertifyError::NotPositiveDefinite { .. } | CertifyError::Exhausted { .. } => 4,
                CertifyError::Polya(PolyaError::Exhausted { .. }) => 4,
                CertifyError::Polya(PolyaError::MemoryCap { .. }) => 5,
                CertifyError::Polya(PolyaError::TimeLimit { .. }) => 6,
                _ => 2,
            },
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn load_problem(path: &Path) -> Result<Problem, CliError> {
    read_problem(&read_text(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn load_certificate(path: &Path) -> Result<HandelmanCertificate, CliError> {
    read_certificate(&read_text(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// `dir/name.json` -> `dir/name.<suffix>.json`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let stem = stem.strip_suffix(".cert").unwrap_or(stem);
    path.with_file_name(format!("{stem}.{suffix}.json"))
}

fn show_progress(p: &Progress) {
    match &p.sweep {
        Sweep::AllPd => eprintln!("level N = {}: {} coefficients, all positive definite", p.n, p.points),
        Sweep::Failure { alpha, minor } => eprintln!(
            "level N = {}: {} coefficients, {alpha} fails at leading minor {minor}",
            p.n, p.points
        ),
    }
}

fn cmd_certify(input: &Path, output: Option<PathBuf>, job: &JobArgs) -> Result<(), CliError> {
    let problem = load_problem(input)?;
    let config = job.config()?;
    let cert = problem.certify(&config, &mut show_progress)?;
    let out = output.unwrap_or_else(|| sibling(input, "cert"));
    write_text(&out, &write_certificate(&cert))?;
    print!("{}", report::domain(&problem)?);
    print!("{}", report::bounds(&cert.report));
    println!("terms: {}", cert.terms.len());
    println!("certificate: {}", out.display());
    Ok(())
}

fn same_domain(cert: &HandelmanCertificate, problem: &Problem) -> bool {
    match &problem.domain {
        Domain::Polyhedron(p) => cert.vertices.is_none() && cert.polyhedron == *p,
        Domain::Simplex(v) => cert.vertices.as_ref() == Some(v),
    }
}

fn cmd_verify(certificate: &Path, input: &Path) -> Result<(), CliError> {
    let cert = load_certificate(certificate)?;
    let problem = load_problem(input)?;
    if !same_domain(&cert, &problem) {
        return Err(CliError::DomainMismatch);
    }
    verify_certificate(&cert, &problem.matrix)?;
    println!(
        "pass: {} positive definite coefficients, expansion equals F exactly (N = {}, degree {})",
        cert.terms.len(),
        cert.n,
        cert.degree
    );
    Ok(())
}

fn cmd_schmudgen(certificate: &Path, input: Option<PathBuf>, output: Option<PathBuf>) -> Result<(), CliError> {
    let cert = load_certificate(certificate)?;
    let f = match input {
        Some(path) => {
            let problem = load_problem(&path)?;
            if !same_domain(&cert, &problem) {
                return Err(CliError::DomainMismatch);
            }
            verify_certificate(&cert, &problem.matrix)?;
            problem.matrix
        }
        None => certificate_matrix(&cert)?,
    };
    let sos = to_schmudgen(&cert)?;
    verify_sos(&sos, &f)?;
    let out = output.unwrap_or_else(|| sibling(certificate, "sos"));
    write_text(&out, &write_sos(&sos))?;
    print!("{}", report::sos(&sos));
    println!("sos certificate: {}", out.display());
    Ok(())
}

fn cmd_inspect(input: &Path, job: &JobArgs) -> Result<(), CliError> {
    let problem = load_problem(input)?;
    let config = job.config()?;
    print!("{}", report::domain(&problem)?);
    let bounds = match &problem.domain {
        Domain::Polyhedron(p) => inspect(&problem.matrix, p, &config)?.report,
        Domain::Simplex(v) => {
            let s = barycentric_coords(v).map_err(CertifyError::from)?;
            inspect_simplex(&problem.matrix, &s, &config)?
        }
    };
    print!("{}", report::bounds(&bounds));
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Certify { input, output, job } => cmd_certify(&input, output, &job),
        Command::Verify { certificate, input } => cmd_verify(&certificate, &input),
        Command::Schmudgen {
            certificate,
            input,
            output,
        } => cmd_schmudgen(&certificate, input, output),
        Command::Inspect { input, job } => cmd_inspect(&input, &job),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HANDELMAN_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
