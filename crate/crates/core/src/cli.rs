//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid arguments or config, 2 runtime failure,
//! 3 selftest failure.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_ber_config, parse_papr_config};
use crate::nonlinearity::builtin_profiles;
use crate::selftest;
use crate::simulate::{papr_ccdf, run_sweep, with_threads, write_sweep_csv, CcdfPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "otm",
    version,
    about = "Transform-nonlinearity modulation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// BER/FER sweep over Eb/N0.
    Ber(RunArgs),
    /// PAPR CCDF of conventional or pre-coded OFDM.
    Papr(RunArgs),
    /// Print the built-in nonlinearity profiles as JSON.
    Profiles {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Fill the wall_time_s column (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Runtime(m) => m,
        }
    }
}

/// Run the CLI on `argv` (program name first) and return the exit code.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Ber(args) => ber(&args),
        Command::Papr(args) => papr(&args),
        Command::Profiles { out } => profiles(out.as_deref()),
        Command::Selftest { threads } => return run_selftest(threads),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn read_config(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("cannot read config {}: {e}", path.display())))
}

fn ber(args: &RunArgs) -> Result<(), Failure> {
    let doc = read_config(&args.config)?;
    let mut cfg = parse_ber_config(&doc).map_err(|e| Failure::Invalid(e.to_string()))?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    check_out_dir(args.out.as_deref())?;
    let rows = with_threads(args.threads, || run_sweep(&cfg))
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf, args.timing).map_err(|e| Failure::Runtime(e.to_string()))?;
    emit(args.out.as_deref(), &buf)
}

fn papr(args: &RunArgs) -> Result<(), Failure> {
    let doc = read_config(&args.config)?;
    let mut cfg = parse_papr_config(&doc).map_err(|e| Failure::Invalid(e.to_string()))?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    check_out_dir(args.out.as_deref())?;
    let points = with_threads(args.threads, || papr_ccdf(&cfg))
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    let mut buf = Vec::new();
    write_ccdf_csv(&points, &mut buf).map_err(|e| Failure::Runtime(e.to_string()))?;
    emit(args.out.as_deref(), &buf)
}

fn profiles(out: Option<&Path>) -> Result<(), Failure> {
    check_out_dir(out)?;
    let mut doc = serde_json::to_string_pretty(&builtin_profiles())
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    doc.push('\n');
    emit(out, doc.as_bytes())
}

fn run_selftest(threads: usize) -> i32 {
    let checks = with_threads(threads, selftest::run);
    let mut ok = true;
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        ok &= c.passed;
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_SELFTEST
    }
}

/// CSV with header `threshold_db,ccdf`.
pub fn write_ccdf_csv<W: Write>(points: &[CcdfPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "threshold_db,ccdf")?;
    for p in points {
        writeln!(out, "{:.1},{:.6e}", p.threshold_db, p.ccdf)?;
    }
    Ok(())
}

fn out_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

// Reject an unwritable destination before any compute starts.
fn check_out_dir(out: Option<&Path>) -> Result<(), Failure> {
    let Some(path) = out else { return Ok(()) };
    let dir = out_dir(path);
    if !dir.is_dir() {
        return Err(Failure::Invalid(format!(
            "output directory {} does not exist",
            dir.display()
        )));
    }
    if path.is_dir() {
        return Err(Failure::Invalid(format!(
            "output path {} is a directory",
            path.display()
        )));
    }
    Ok(())
}

/// Write to a temporary file next to `path` and rename it into place.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let Some(path) = out else {
        return io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Runtime(e.to_string()));
    };
    let runtime = |e: io::Error| Failure::Runtime(format!("writing {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(out_dir(path)).map_err(runtime)?;
    tmp.write_all(bytes).map_err(runtime)?;
    tmp.as_file().sync_all().map_err(runtime)?;
    tmp.persist(path).map_err(|e| runtime(e.error))?;
    Ok(())
}
