mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use weiltrace::Error;

use crate::commands::Outcome;
use crate::config::{Defaults, Format, Overrides, RunConfig, ZeroSourceSpec};

const EXIT_PARSE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_RESIDUAL: u8 = 4;

/// Term-by-term checks of the Weil explicit formula, the continuous-spectral
/// term of the trace formula, and related identities.
#[derive(Parser, Debug)]
#[command(name = "weiltrace", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Flat key = value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Zero source: a file path or compute:<t_max>.
    #[arg(long, global = true)]
    zeros: Option<String>,
    /// Cache root for computed zeros [env: APP_CACHE].
    #[arg(long = "zeros-cache", global = true)]
    zeros_cache: Option<PathBuf>,
    /// Target absolute error of the special functions [env: APP_PRECISION].
    #[arg(long, global = true)]
    precision: Option<f64>,
    /// Residual tolerance (each command has its own default).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// json or csv.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Identity checks.
    #[command(subcommand)]
    Verify(Verify),
    /// Lower bound for the ζ zero sum across truncation heights.
    BoundSweep {
        /// g0 spec; the bound is for its convolution square.
        #[arg(long, default_value = "bump:logr=0.3")]
        g0: String,
        /// T grid: lo:hi:logN, lo:hi:N or a list [default: 20 log-spaced points in (√3/2, 100]].
        #[arg(long = "T")]
        t: Option<String>,
    },
    /// Weil functional over a grid of additive supports.
    WeilPositivity {
        #[arg(long = "t", default_value = "log2/2,log2")]
        t: String,
    },
    /// Compute, import and export zero lists.
    #[command(subcommand)]
    Zeros(ZerosCmd),
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Spectral side against the explicit formula for ζ.
    ZetaExplicit {
        /// Test-function spec, e.g. bump:logr=log8,center=0 (repeatable).
        #[arg(long)]
        g: Vec<String>,
        #[arg(long, default_value = "thm_1_1_sign_resolved")]
        variant: String,
    },
    /// Zero sum against the explicit formula for Dirichlet L-functions.
    HeckeExplicit {
        /// Character label q.k (repeatable) [default: 1.0, 3.1, 4.1].
        #[arg(long)]
        chi: Vec<String>,
        #[arg(long)]
        g: Vec<String>,
        /// Zeros of the conjugate character, when --zeros is a file.
        #[arg(long = "conjugate-zeros")]
        conjugate_zeros: Option<PathBuf>,
    },
    /// Principal-value integral against −2ψ(s).
    GaussWeil {
        /// Point s, e.g. 0.5 or 1+i (repeatable).
        #[arg(long = "s")]
        s: Vec<String>,
    },
    /// Convergence of the Maaß–Selberg relation to its limit.
    MaassSelberg {
        #[arg(long = "s")]
        s: Vec<String>,
        #[arg(long = "T", default_value_t = 2.0)]
        t: f64,
        #[arg(long, value_delimiter = ',', default_value = "1e-3,1e-4")]
        h: Vec<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum ZerosCmd {
    /// Compute zeros (and fill the cache when one is configured).
    Compute {
        #[arg(long = "t-max")]
        t_max: f64,
        #[arg(long, default_value = "zeta")]
        lfunction: String,
    },
    /// Check a zero file and copy it into the cache.
    Import {
        path: PathBuf,
        #[arg(long, default_value = "zeta")]
        lfunction: String,
    },
    /// Write zeros from the configured source to a file.
    Export {
        path: PathBuf,
        #[arg(long, default_value = "zeta")]
        lfunction: String,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Io(_) | Error::Parameter(_) | Error::Domain(_) => EXIT_PARSE,
        Error::Quadrature { .. }
        | Error::InsufficientHeight { .. }
        | Error::IncompleteScan { .. }
        | Error::Pole { .. }
        | Error::NearZero { .. } => EXIT_NUMERIC,
    }
}

fn defaults(cmd: &Command) -> Defaults {
    let (zeros, tolerance, format) = match cmd {
        Command::Verify(Verify::ZetaExplicit { .. }) => (1000.0, 1e-6, Format::Json),
        Command::Verify(Verify::HeckeExplicit { .. }) => (200.0, 1e-5, Format::Json),
        Command::Verify(_) => (1000.0, 1e-8, Format::Json),
        Command::BoundSweep { .. } => (1000.0, 1e-6, Format::Csv),
        Command::WeilPositivity { .. } => (1000.0, 1e-9, Format::Json),
        Command::Zeros(_) => (1000.0, 1e-6, Format::Json),
    };
    Defaults { zeros: ZeroSourceSpec::Compute(zeros), tolerance, format }
}

fn run(cli: &Cli) -> Result<(RunConfig, Outcome), Error> {
    let g = &cli.global;
    let flags = Overrides {
        config: g.config.clone(),
        zeros: g.zeros.clone(),
        cache: g.zeros_cache.clone(),
        precision: g.precision,
        tolerance: g.tolerance,
        format: g.format.clone(),
        output: g.output.clone(),
    };
    let env = |k: &str| std::env::var(k).ok();
    let mut cfg = RunConfig::resolve(&flags, &env, defaults(&cli.command))?;
    let outcome = match &cli.command {
        Command::Verify(Verify::ZetaExplicit { g, variant }) => commands::verify_zeta_explicit(&cfg, g, variant)?,
        Command::Verify(Verify::HeckeExplicit { chi, g, conjugate_zeros }) => {
            commands::verify_hecke_explicit(&cfg, chi, g, conjugate_zeros.as_deref())?
        }
        Command::Verify(Verify::GaussWeil { s }) => commands::verify_gauss_weil(&cfg, s)?,
        Command::Verify(Verify::MaassSelberg { s, t, h }) => commands::verify_maass_selberg(s, *t, h)?,
        Command::BoundSweep { g0, t } => commands::bound_sweep(&cfg, g0, t.as_deref())?,
        Command::WeilPositivity { t } => commands::weil_positivity(&cfg, t)?,
        Command::Zeros(ZerosCmd::Compute { t_max, lfunction }) => commands::zeros_compute(&cfg, lfunction, *t_max)?,
        Command::Zeros(ZerosCmd::Import { path, lfunction }) => commands::zeros_import(&cfg, path, lfunction)?,
        Command::Zeros(ZerosCmd::Export { path, lfunction, t_max }) => {
            if let Some(t) = t_max {
                cfg.zeros = ZeroSourceSpec::Compute(*t);
            }
            commands::zeros_export(&cfg, path, lfunction)?
        }
    };
    Ok((cfg, outcome))
}

fn emit(cfg: &RunConfig, outcome: &Outcome, zeros_cmd: bool) -> Result<(), Error> {
    if zeros_cmd && cfg.output.is_none() {
        // zero management talks to the terminal unless a report file is asked for
        println!("{}", outcome.message);
        return Ok(());
    }
    let body = match cfg.format {
        Format::Json => output::to_json(&outcome.document(cfg)),
        Format::Csv => outcome.csv.clone().unwrap_or_else(|| output::to_csv(&outcome.results)),
    };
    match &cfg.output {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, body)?;
            println!("{}", outcome.message);
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            eprintln!("{}", outcome.message);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let zeros_cmd = matches!(cli.command, Command::Zeros(_));
    let (cfg, outcome) = match run(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = emit(&cfg, &outcome, zeros_cmd) {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("FAIL: {} outside tolerance", outcome.command);
        ExitCode::from(EXIT_RESIDUAL)
    }
}
