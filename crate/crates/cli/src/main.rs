use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kmn_cli::commands::{run_classify, run_fracderiv, run_reduce, run_verify, CliError};
use kmn_cli::config::SessionConfig;
use kmn_cli::report::{emit_report, read_report};

#[derive(Parser)]
#[command(name = "kmn", version, about = "Lie symmetry classification and reduction for a time-fractional KdV-type equation")]
struct Cli {
    #[command(flatten)]
    session: SessionArgs,
    #[command(subcommand)]
    command: Command,
}

/// Flags mirror the config-file keys and override them.
#[derive(Args)]
struct SessionArgs {
    /// `key = value` file applied before the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    case: Option<String>,
    /// `generic` or an exact rational.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Dispersion coefficient, e.g. `k*t^b`.
    #[arg(long, global = true)]
    g: Option<String>,
    #[arg(long, global = true)]
    m: Option<String>,
    #[arg(long, global = true)]
    n: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    zeta: Option<String>,
    #[arg(long, global = true)]
    truncation: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    tol_rel: Option<String>,
    #[arg(long, global = true)]
    tol_abs: Option<String>,
    /// Parameter values, e.g. `a=1/4, b=3/10, k=7/10`.
    #[arg(long, global = true)]
    params: Option<String>,
    #[arg(long, global = true)]
    points: Option<String>,
    /// Path for the JSON report.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the symmetry generators of the equation or catalog case.
    Classify,
    /// Reduce by a generator to an ordinary fractional equation.
    Reduce {
        /// Index into the classified generators.
        #[arg(long)]
        generator: Option<usize>,
    },
    /// Check whether a given generator is a symmetry.
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        xi_t: String,
        #[arg(long, allow_hyphen_values = true)]
        xi_x: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
    },
    /// Evaluate a fractional derivative in t by the power rule and by Grünwald–Letnikov.
    FracDeriv {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        at: f64,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
    },
    /// Print the summary of a saved report.
    Report { path: PathBuf },
}

fn session(args: &SessionArgs) -> Result<SessionConfig, CliError> {
    let mut cfg = SessionConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Engine(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    let flags = [
        ("case", &args.case),
        ("alpha", &args.alpha),
        ("g", &args.g),
        ("m", &args.m),
        ("n", &args.n),
        ("zeta", &args.zeta),
        ("truncation", &args.truncation),
        ("seed", &args.seed),
        ("tol-rel", &args.tol_rel),
        ("tol-abs", &args.tol_abs),
        ("params", &args.params),
        ("points", &args.points),
        ("out", &args.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<i32, Box<dyn std::error::Error>> {
    if let Command::Report { path } = &cli.command {
        let doc = read_report(path)?;
        print!("{}", doc.summary());
        return Ok(doc.exit_code());
    }
    let cfg = session(&cli.session)?;
    let doc = match &cli.command {
        Command::Classify => run_classify(&cfg)?,
        Command::Reduce { generator } => run_reduce(&cfg, *generator)?,
        Command::Verify { xi_t, xi_x, eta } => run_verify(&cfg, [xi_t, xi_x, eta])?,
        Command::FracDeriv { expr, at, dt } => run_fracderiv(&cfg, expr, *at, *dt)?,
        Command::Report { .. } => unreachable!("handled above"),
    };
    let summary = emit_report(&doc, cfg.out.as_deref().map(std::path::Path::new))?;
    print!("{summary}");
    Ok(doc.exit_code())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
