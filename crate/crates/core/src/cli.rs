//! Command-line front end. Data goes to `out`, diagnostics to `err`.
//!
//! Exit codes: 0 on success (and `--help`), 2 on flag errors, 1 when the
//! computation itself fails. CSV numbers are written with 17 significant
//! digits so every value round-trips.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fitting::{fit, load_samples, ModelKind, SampleFormat};
use crate::metrics::{convergence_gap, rician_pdf_gap, shadowed_capacity};
use crate::model::{build_mixture, GammaComponent, Regime, ShadowedParams};
use crate::numerics::{linspace, logspace};
use crate::sampling::{sample, sample_sharded, RngState};

/// Environment variable capping worker threads (0 = automatic).
pub const THREADS_ENV: &str = "FADEKIT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fadekit",
    version,
    about = "Exact statistics for κ-μ shadowed fading with integer μ and m"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Gamma mixture (weights, shapes, scales) as JSON.
    Mixture(ModelArgs),
    /// Evaluate pdf, cdf or mgf on a grid; CSV `x,value`.
    Eval(EvalArgs),
    /// Ergodic capacity over a mean-SNR grid in dB; CSV `snr_db,capacity_bpshz`.
    Capacity(CapacityArgs),
    /// Draw samples, one value per line.
    Sample(SampleArgs),
    /// Fit models to a sample file; JSON report.
    Fit(FitArgs),
    /// Sup-norm CDF gap to the κ-μ limit for each m; CSV `m,sup_gap`.
    Converge(ConvergeArgs),
    /// Sup-norm pdf gap between Rician shadowed and Rician; CSV `m,sup_pdf_gap`.
    ApproxRician(ApproxRicianArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Mean SNR γ̄ (linear).
    #[arg(long)]
    gbar: f64,
    /// Ratio κ of dominant to scattered power.
    #[arg(long)]
    kappa: f64,
    /// Number of clusters μ (integer).
    #[arg(long)]
    mu: u32,
    /// Shadowing parameter m (integer).
    #[arg(long)]
    m: u32,
}

impl ModelArgs {
    fn params(&self) -> Result<ShadowedParams> {
        ShadowedParams::new(self.gbar, self.kappa, self.mu, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Pdf,
    Cdf,
    Mgf,
}

/// `a:b:n`, n points from a to b inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
struct GridSpec {
    a: f64,
    b: f64,
    n: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected a:b:n, got {s:?}"));
        };
        let a: f64 = a.parse().map_err(|_| format!("bad grid start {a:?}"))?;
        let b: f64 = b.parse().map_err(|_| format!("bad grid end {b:?}"))?;
        let n: usize = n.parse().map_err(|_| format!("bad grid count {n:?}"))?;
        if !(a.is_finite() && b.is_finite()) || n == 0 || (n > 1 && b <= a) || (n == 1 && a != b) {
            return Err(format!(
                "grid needs finite a < b and n >= 1 (n = 1 only with a = b), got {s:?}"
            ));
        }
        Ok(Self { a, b, n })
    }
}

impl GridSpec {
    fn points(&self, log: bool) -> Result<Vec<f64>> {
        if log && self.a <= 0.0 {
            return Err(Error::InvalidParams("a log grid needs a > 0".into()));
        }
        Ok(if self.n == 1 {
            vec![self.a]
        } else if log {
            logspace(self.a, self.b, self.n)
        } else {
            linspace(self.a, self.b, self.n)
        })
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Quantity to evaluate.
    #[arg(long, value_enum)]
    what: Quantity,
    /// Evaluation grid `a:b:n` (x for pdf/cdf, s for mgf).
    #[arg(long, allow_hyphen_values = true)]
    grid: GridSpec,
    /// Space grid points logarithmically (needs a > 0).
    #[arg(long)]
    log: bool,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    /// Ratio κ of dominant to scattered power.
    #[arg(long)]
    kappa: f64,
    /// Number of clusters μ (integer).
    #[arg(long)]
    mu: u32,
    /// Shadowing parameter m (integer).
    #[arg(long)]
    m: u32,
    /// Mean-SNR grid in dB, `a:b:n`.
    #[arg(long, allow_hyphen_values = true)]
    gbar_db_grid: GridSpec,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of draws.
    #[arg(long)]
    n: usize,
    /// RNG seed.
    #[arg(long)]
    seed: u64,
    /// Independent parallel streams; 1 keeps a single sequential stream.
    #[arg(long, default_value_t = 1)]
    shards: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Plain,
    Csv,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Sample file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Input layout; `.csv` files default to csv, everything else to plain.
    #[arg(long, value_enum)]
    format: Option<InputFormat>,
    /// Largest μ tried (1..=50).
    #[arg(long, default_value_t = 6)]
    mu_max: u32,
    /// Largest m tried (1..=50).
    #[arg(long, default_value_t = 6)]
    m_max: u32,
    /// Comma-separated model families.
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "shadowed-int,rician,nakagami"
    )]
    models: Vec<ModelKind>,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    /// Ratio κ of dominant to scattered power.
    #[arg(long)]
    kappa: f64,
    /// Number of clusters μ (integer).
    #[arg(long)]
    mu: u32,
    /// Mean SNR γ̄ (linear).
    #[arg(long, default_value_t = 1.0)]
    gbar: f64,
    /// Comma-separated m values.
    #[arg(long, required = true, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    m_list: Vec<u32>,
}

#[derive(Debug, Args)]
struct ApproxRicianArgs {
    /// Rician K factor.
    #[arg(long = "K")]
    k: f64,
    /// Mean SNR γ̄ (linear).
    #[arg(long, default_value_t = 1.0)]
    gbar: f64,
    /// Comma-separated m values.
    #[arg(long, required = true, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    m_list: Vec<u32>,
}

#[derive(Serialize)]
struct MixtureReport<'a> {
    regime: Regime,
    components: &'a [GammaComponent],
    checks: Checks,
}

#[derive(Serialize)]
struct Checks {
    weight_sum: f64,
    mean: f64,
}

/// Format a float with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv<W: Write>(out: &mut W, header: &str, rows: &[(String, f64)]) -> Result<()> {
    let mut buf = String::with_capacity(rows.len() * 48);
    buf.push_str(header);
    buf.push('\n');
    for (k, v) in rows {
        buf.push_str(k);
        buf.push(',');
        buf.push_str(&fmt_num(*v));
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}

fn execute<W: Write>(cmd: Command, out: &mut W) -> Result<()> {
    match cmd {
        Command::Mixture(a) => {
            let model = build_mixture(&a.params()?)?;
            write_json(
                out,
                &MixtureReport {
                    regime: model.regime(),
                    components: model.components(),
                    checks: Checks {
                        weight_sum: model.weight_sum(),
                        mean: model.mean(),
                    },
                },
            )
        }
        Command::Eval(a) => {
            let params = a.model.params()?;
            let model = build_mixture(&params)?;
            let rows = a
                .grid
                .points(a.log)?
                .into_iter()
                .map(|x| {
                    let v = match a.what {
                        Quantity::Pdf => model.pdf(x),
                        Quantity::Cdf => model.cdf(x),
                        Quantity::Mgf => model.mgf(x),
                    }?;
                    Ok((fmt_num(x), v))
                })
                .collect::<Result<Vec<_>>>()?;
            write_csv(out, "x,value", &rows)
        }
        Command::Capacity(a) => {
            let rows = a
                .gbar_db_grid
                .points(false)?
                .into_iter()
                .map(|db| {
                    let g = 10f64.powf(db / 10.0);
                    let model = build_mixture(&ShadowedParams::new(g, a.kappa, a.mu, a.m)?)?;
                    Ok((fmt_num(db), shadowed_capacity(&model)?))
                })
                .collect::<Result<Vec<_>>>()?;
            write_csv(out, "snr_db,capacity_bpshz", &rows)
        }
        Command::Sample(a) => {
            let params = a.model.params()?;
            let xs = if a.shards <= 1 {
                sample(&params, a.n, &mut RngState::new(a.seed))?
            } else {
                sample_sharded(&params, a.n, a.seed, a.shards)?
            };
            let mut buf = String::with_capacity(xs.len() * 24);
            for x in xs {
                buf.push_str(&fmt_num(x));
                buf.push('\n');
            }
            match a.out {
                Some(path) => {
                    let mut f = BufWriter::new(File::create(path)?);
                    f.write_all(buf.as_bytes())?;
                    f.flush()?;
                }
                None => out.write_all(buf.as_bytes())?,
            }
            Ok(())
        }
        Command::Fit(a) => {
            let format = match a.format {
                Some(InputFormat::Csv) => SampleFormat::Csv,
                Some(InputFormat::Plain) => SampleFormat::Plain,
                None if a.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => SampleFormat::Csv,
                None => SampleFormat::Plain,
            };
            let sample = load_samples(File::open(&a.input)?, format)?;
            let result = fit(&sample, a.mu_max, a.m_max, &a.models)?;
            write_json(out, &result)
        }
        Command::Converge(a) => {
            let report = convergence_gap(a.kappa, a.mu, a.gbar, &a.m_list)?;
            let rows: Vec<_> = report
                .m_values
                .iter()
                .zip(&report.sup_gaps)
                .map(|(m, g)| (m.to_string(), *g))
                .collect();
            write_csv(out, "m,sup_gap", &rows)
        }
        Command::ApproxRician(a) => {
            let rows = a
                .m_list
                .iter()
                .map(|&m| Ok((m.to_string(), rician_pdf_gap(a.k, m, a.gbar)?)))
                .collect::<Result<Vec<_>>>()?;
            write_csv(out, "m,sup_pdf_gap", &rows)
        }
    }
}

fn thread_count() -> std::result::Result<usize, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("{THREADS_ENV} must be a nonnegative integer, got {v:?}")),
        Err(_) => Ok(0),
    }
}

/// Parse `args` (including the program name) and run one subcommand.
pub fn run<I, T, O, E>(args: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            // help and version are regular output
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let threads = match thread_count() {
        Ok(t) => t,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return 1;
        }
    };
    let mut buf = Vec::new();
    match pool.install(|| execute(cli.command, &mut buf)) {
        Ok(()) => match out.write_all(&buf).and_then(|_| out.flush()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
