use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gbspectra::export;
use gbspectra::toeplitz::extract_symbol;
use gbspectra::verify::{config::parse_seed, run, ExperimentConfig};
use gbspectra::{assemble_1d, assemble_a_1d, GBSplineBasis, SectionSpace, SymbolKind};

#[derive(Parser)]
#[command(
    name = "gbspectra",
    version,
    about = "Spectral checks for generalized B-spline Galerkin matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a config file and write report.csv / summary.json.
    Run {
        config: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Seed of the randomized property checks (decimal or 0x-hex).
        #[arg(long)]
        seed: Option<String>,
        /// Degrees, comma separated.
        #[arg(long)]
        p: Option<String>,
        /// Element counts, comma separated.
        #[arg(long)]
        n: Option<String>,
        /// Section spaces, e.g. `poly` or `trig:1.0:nested`; repeatable.
        #[arg(long)]
        space: Vec<String>,
        #[arg(long)]
        checks: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fill the `ms` column with wall times (makes the report non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Print the symbol coefficients `(k, c_k)` followed by a 512-point sample.
    Symbol {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        space: SectionSpace,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Kind::F)]
        kind: Kind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one assembled 1D matrix.
    Assemble {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        space: SectionSpace,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::A)]
        matrix: Which,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, value_enum, default_value_t = Format::Dense)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// stiffness symbol
    F,
    /// mass symbol
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    /// nK + βH + (γ/n)M
    A,
    M,
    K,
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dense,
    Banded,
}

const SAMPLE_POINTS: usize = 512;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            jobs,
            seed,
            p,
            n,
            space,
            checks,
            out,
            timings,
        } => cmd_run(config, jobs, seed, p, n, space, checks, out, timings),
        Command::Symbol {
            p,
            space,
            n,
            kind,
            out,
        } => cmd_symbol(p, space, n, kind, out).map(|_| true),
        Command::Assemble {
            p,
            n,
            space,
            out,
            matrix,
            beta,
            gamma,
            format,
        } => cmd_assemble(p, n, space, out, matrix, beta, gamma, format).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(gbspectra::Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    config: PathBuf,
    jobs: Option<usize>,
    seed: Option<String>,
    p: Option<String>,
    n: Option<String>,
    space: Vec<String>,
    checks: Option<String>,
    out: Option<PathBuf>,
    timings: bool,
) -> gbspectra::Result<bool> {
    let mut cfg = ExperimentConfig::from_file(&config)?;
    if let Some(p) = p {
        cfg.set("p", &p)?;
    }
    if let Some(n) = n {
        cfg.set("n", &n)?;
    }
    if !space.is_empty() {
        cfg.set("spaces", &space.join(","))?;
    }
    if let Some(checks) = checks {
        cfg.set("checks", &checks)?;
    }
    if let Some(out) = out {
        cfg.out = out;
    }
    if let Some(seed) = seed {
        cfg.seed = parse_seed(&seed)?;
    }
    if jobs.is_some() {
        cfg.jobs = jobs;
    }
    cfg.timings |= timings;

    let outcome = run(&cfg)?;
    for e in &outcome.summary.errors {
        eprintln!("error: {e}");
    }
    for row in outcome.rows.iter().filter(|r| !r.pass) {
        eprintln!(
            "FAIL {} p={} {} alpha={} {} n={} measured={} bound={}",
            row.check, row.p, row.space, row.alpha, row.mode, row.n, row.measured, row.bound
        );
    }
    let s = &outcome.summary;
    println!(
        "{} checks, {} passed, {} failed; report in {}",
        s.total,
        s.passed,
        s.failed,
        outcome.out_dir.display()
    );
    Ok(outcome.passed())
}

fn open_output(out: Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_symbol(
    p: usize,
    space: SectionSpace,
    n: usize,
    kind: Kind,
    out: Option<PathBuf>,
) -> gbspectra::Result<()> {
    let kind = match kind {
        Kind::F => SymbolKind::Stiffness,
        Kind::H => SymbolKind::Mass,
    };
    let symbol = extract_symbol(p, space, n, kind)?;
    let mut w = open_output(out)?;
    export::write_symbol_csv(&mut w, &symbol)?;
    writeln!(w)?;
    export::write_samples_csv(&mut w, &export::symbol_samples(&symbol, SAMPLE_POINTS))?;
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_assemble(
    p: usize,
    n: usize,
    space: SectionSpace,
    out: PathBuf,
    matrix: Which,
    beta: f64,
    gamma: f64,
    format: Format,
) -> gbspectra::Result<()> {
    let set = assemble_1d(GBSplineBasis::uniform(n, p, space)?)?;
    let x = match matrix {
        Which::A => assemble_a_1d(&set, beta, gamma)?,
        Which::M => set.mass.clone(),
        Which::K => set.stiffness.clone(),
        Which::H => set.advection.clone(),
    };
    let mut w = BufWriter::new(File::create(&out)?);
    match format {
        Format::Dense => export::write_matrix_csv(&mut w, &x)?,
        Format::Banded => export::write_banded(&mut w, &x)?,
    }
    w.flush()?;
    Ok(())
}
