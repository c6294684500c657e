use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use omega_ergodic::ergodic::HorizonMode;
use omega_ergodic::harness::{
    emit, parse_prime_list, run, CheckpointPolicy, ExperimentId, ExperimentSpec, Format, DEFAULT_THREADS_ENV,
};
use omega_ergodic::Error;

#[derive(Parser)]
#[command(name = "omega", version, about = "Ergodic averages along Ω(n) over squarefree and k-full integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Squarefree average of f(T^Ω(n) x), n coprime to S.
    #[command(name = "thm-squarefree")]
    ThmSquarefree(RunArgs),
    /// Squarefree average of 1_{p_max ∈ T}·F(totient statistic)·f(T^Ω(n) x).
    #[command(name = "thm-bkw-loyd")]
    ThmBkwLoyd(RunArgs),
    /// Squarefree average of g(S_n 0) for a torus action.
    #[command(name = "thm-multiplicative")]
    ThmMultiplicative(RunArgs),
    /// Squarefree average of f(T^Ω(mn+r) x).
    #[command(name = "thm-ap")]
    ThmAp(RunArgs),
    /// Average of f(T^Ω(n) x) over k-full n.
    #[command(name = "thm-kfull-ergodic")]
    ThmKfullErgodic(RunArgs),
    /// Average of F((Ω(n) − k log log N)/(k √log log N)) over k-full n.
    #[command(name = "thm-kfull-ek")]
    ThmKfullEk(RunArgs),
    /// The product of the two k-full averages above.
    #[command(name = "thm-kfull-loyd")]
    ThmKfullLoyd(RunArgs),
    /// Shift deltas of a(j) = cos(πj/s) over squarefree (s = 1) or k-full (s = k) n.
    Richter(RunArgs),
    /// Q_k(N)/N^{1/k} with --k, else the density of squarefree n coprime to S.
    Counts(RunArgs),
    /// Exact convolution identities for every subset of S.
    Identities(RunArgs),
    /// Brute-force reference values for fixtures.
    #[cfg(feature = "oracle")]
    #[command(hide = true)]
    Oracle { quantity: String, args: Vec<u64> },
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// TOML file with spec keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    /// Comma-separated prime set S.
    #[arg(long, value_name = "P1,P2,..")]
    exclude_primes: Option<String>,
    /// p_max family T.
    #[arg(long, value_parser = ["all", "1mod4"])]
    prime_family: Option<String>,
    /// golden, sqrt2 or custom:<value>.
    #[arg(long)]
    alpha: Option<String>,
    /// Circle function: sin2, cos, sin, cos2, tri.
    #[arg(long)]
    ffun: Option<String>,
    /// Compact function: hat, raised_cosine, plateau, one.
    #[arg(long)]
    bigf: Option<String>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Geometric ratio (e.g. 1.7783) or a comma list of N values.
    #[arg(long)]
    checkpoints: Option<String>,
    /// Normalize at every checkpoint or only at the final N.
    #[arg(long, value_parser = ["per-checkpoint", "fixed"])]
    horizon: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Environment variable holding the worker count (default OMEGA_THREADS).
    #[arg(long, value_name = "VAR")]
    threads_env: Option<String>,
    /// Fill the ms column with wall time.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    memory_cap_mb: Option<u64>,
}

impl RunArgs {
    fn into_spec(self, experiment: ExperimentId) -> Result<ExperimentSpec, Error> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::from_toml_file(path)?,
            None => ExperimentSpec::default(),
        };
        spec.experiment = experiment;
        macro_rules! set {
            ($($field:ident),*) => {$( if let Some(v) = self.$field { spec.$field = v.into(); } )*};
        }
        set!(n, alpha, ffun, bigf, seed, memory_cap_mb);
        if self.k.is_some() {
            spec.k = self.k;
        }
        if self.m.is_some() {
            spec.m = self.m;
        }
        if self.r.is_some() {
            spec.r = self.r;
        }
        if let Some(t) = self.prime_family {
            spec.prime_family = Some(t);
        }
        if let Some(s) = &self.exclude_primes {
            spec.exclude_primes = parse_prime_list(s)?;
        }
        if let Some(c) = &self.checkpoints {
            spec.checkpoints = c.parse::<CheckpointPolicy>()?;
        }
        if let Some(h) = &self.horizon {
            spec.horizon = if h == "fixed" { HorizonMode::Fixed } else { HorizonMode::PerCheckpoint };
        }
        if let Some(f) = &self.format {
            spec.format = f.parse::<Format>()?;
        }
        if self.out.is_some() {
            spec.out = self.out;
        }
        spec.timing |= self.timing;
        let var = self.threads_env.as_deref().unwrap_or(DEFAULT_THREADS_ENV);
        if let Ok(v) = std::env::var(var) {
            spec.threads = v
                .trim()
                .parse()
                .map_err(|_| Error::Validation(vec![format!("threads: {var}={v:?} is not a positive integer")]))?;
        }
        Ok(spec)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Argument(_) | Error::Domain(_) | Error::Unsupported(_) => 2,
        Error::Serialization(_) => 2,
        Error::Capacity(_) | Error::OutOfRange { .. } | Error::Overflow(_) => 3,
        Error::Io(_) => 4,
    }
}

fn execute(experiment: ExperimentId, args: RunArgs) -> Result<(), Error> {
    let spec = args.into_spec(experiment)?;
    let report = run(&spec)?;
    match &spec.out {
        Some(path) => emit(&report, spec.format, path)?,
        None => std::io::stdout().lock().write_all(report.render(spec.format)?.as_bytes())?,
    }
    if !report.passed() {
        let r = report.final_row();
        eprintln!(
            "note: final |value - predicted| = {} exceeds tolerance {} or a check failed",
            r.map_or(f64::NAN, |r| r.abs_err),
            report.tolerance
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::ThmSquarefree(a) => (ExperimentId::ThmSquarefree, a),
        Command::ThmBkwLoyd(a) => (ExperimentId::ThmBkwLoyd, a),
        Command::ThmMultiplicative(a) => (ExperimentId::ThmMultiplicative, a),
        Command::ThmAp(a) => (ExperimentId::ThmAp, a),
        Command::ThmKfullErgodic(a) => (ExperimentId::ThmKfullErgodic, a),
        Command::ThmKfullEk(a) => (ExperimentId::ThmKfullEk, a),
        Command::ThmKfullLoyd(a) => (ExperimentId::ThmKfullLoyd, a),
        Command::Richter(a) => (ExperimentId::Richter, a),
        Command::Counts(a) => (ExperimentId::Counts, a),
        Command::Identities(a) => (ExperimentId::Identities, a),
        #[cfg(feature = "oracle")]
        Command::Oracle { quantity, args } => {
            return match omega_oracle::mint(&quantity, &args) {
                Ok(r) => {
                    println!("{}", r.value);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
    };
    match execute(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
