//! `filldist`: sample random 2-complexes and report spectral gaps, fillings
//! and distortion certificates as CSV or JSON.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use filldist_core::harness::{render_records, run_on_complex, run_sweep, write_records};
use filldist_core::{Complex2, Embedding, Error, ExperimentConfig, Mode, OutputFormat, PSpec};

#[derive(Parser)]
#[command(name = "filldist", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Face counts and edge degrees.
    Sample(Opts),
    /// Spectral gaps and the real first Betti number.
    Spectra(Opts),
    /// Minimum GF(2) fillings of every triangle.
    Fill(Opts),
    /// Area inequality and triangle distortion for a Gaussian or given embedding.
    Embed(Opts),
    /// Distortion lower-bound certificate.
    Certificate(Opts),
    /// Everything above.
    Sweep(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Opts {
    /// Vertex counts, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    n: Vec<usize>,
    /// Face probability.
    #[arg(long, conflicts_with = "eps")]
    p: Option<f64>,
    /// Use p = n^(eps - 1).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Embedding dimension (default n).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Evaluate this complex (JSON) instead of sampling.
    #[arg(long)]
    complex: Option<PathBuf>,
    /// Vertex coordinates (JSON); requires --complex.
    #[arg(long, requires = "complex")]
    embedding: Option<PathBuf>,
    /// Experiment configuration (JSON); other flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::ContractViolation(_) => Failure::Config(e.to_string()),
            _ => Failure::Io(e.to_string()),
        }
    }
}

fn io_context(path: &std::path::Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn build_config(mode: Mode, opts: &Opts) -> Result<ExperimentConfig, Failure> {
    let mut config = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => {
            let p_spec = match (opts.p, opts.eps) {
                (Some(p), _) => PSpec::P(p),
                (None, Some(eps)) => PSpec::Eps(eps),
                // A loaded complex needs no face probability.
                (None, None) if opts.complex.is_some() => PSpec::P(0.0),
                (None, None) => return Err(Failure::Config("one of --p or --eps is required".into())),
            };
            ExperimentConfig::new(mode, opts.n.clone(), p_spec)
        }
    };
    config.mode = mode;
    if !opts.n.is_empty() {
        config.n_values = opts.n.clone();
    }
    if let Some(p) = opts.p {
        config.p_spec = PSpec::P(p);
    }
    if let Some(eps) = opts.eps {
        config.p_spec = PSpec::Eps(eps);
    }
    if let Some(t) = opts.trials {
        config.trials = t;
    }
    if let Some(s) = opts.seed {
        config.master_seed = s;
    }
    if opts.dim.is_some() {
        config.ambient_dim = opts.dim;
    }
    if opts.threads.is_some() {
        config.threads = opts.threads;
    }
    if opts.out.is_some() {
        config.output_path = opts.out.clone();
    }
    match opts.format {
        Some(Format::Csv) => config.format = OutputFormat::Csv,
        Some(Format::Json) => config.format = OutputFormat::Json,
        None => {}
    }
    Ok(config)
}

fn run(mode: Mode, opts: &Opts) -> Result<(), Failure> {
    let mut config = build_config(mode, opts)?;
    let records = match &opts.complex {
        Some(path) => {
            let x = Complex2::load(path).map_err(io_context(path))?;
            let emb = match &opts.embedding {
                Some(path) => Some(Embedding::load(path).map_err(io_context(path))?),
                None => None,
            };
            config.n_values = vec![x.n()];
            config.validate()?;
            vec![run_on_complex(&config, &x, emb.as_ref())?]
        }
        None => run_sweep(&config)?,
    };
    match &config.output_path {
        Some(path) => write_records(&records, path, config.format).map_err(io_context(path)),
        None => {
            print!("{}", render_records(&records, config.format)?);
            if config.format == OutputFormat::Json {
                println!();
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, opts) = match &cli.command {
        Command::Sample(o) => (Mode::Sample, o),
        Command::Spectra(o) => (Mode::Spectra, o),
        Command::Fill(o) => (Mode::Fill, o),
        Command::Embed(o) => (Mode::Embed, o),
        Command::Certificate(o) => (Mode::Certificate, o),
        Command::Sweep(o) => (Mode::Sweep, o),
    };
    match run(mode, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
