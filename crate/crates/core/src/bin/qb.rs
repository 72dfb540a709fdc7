use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use qbang::bang::{bang_degree, BangProfile};
use qbang::funcmodel::series::{domination_check, log_coefficient, search_constant};
use qbang::funcmodel::FunctionModel;
use qbang::harness::{self, emit_report, load_config, write_output, Format, RunOptions, Suite};
use qbang::sequences::{from_generator, log_convex_minorant, Generator};

#[derive(Parser)]
#[command(
    name = "qb",
    version,
    about = "Bang norms, Bang degree and Remez-type bounds for Denjoy-Carleman classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bang degree of a class at a given sup-norm.
    Degree {
        /// Generator as JSON, e.g. {"kind":"analytic","C":1.0}.
        #[arg(long)]
        generator: String,
        #[arg(long = "sup-norm")]
        sup_norm: f64,
        /// Last stored index J of the sequence.
        #[arg(long, default_value_t = 200)]
        length: usize,
    },
    /// Bang norm profile of a function on a uniform grid, as CSV.
    Profile {
        /// Function as JSON, e.g. {"kind":"sinusoid","k":3,"amplitude":1.0}.
        #[arg(long)]
        function: String,
        #[arg(long)]
        generator: String,
        /// Number of grid steps on [0, 1].
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 200)]
        length: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites from a configuration file.
    #[command(after_help = suite_help())]
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Overrides QB_SEED and the configuration seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Report file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Record per-check wall time (reports are then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Build a construction and print its data.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Log-convex minorant and contact set of a positive sequence.
    Minorant {
        /// JSON array of positive values.
        #[arg(long)]
        values: String,
    },
}

#[derive(Subcommand)]
enum Construct {
    /// The non-extendable even power series with c_j = exp(-C j / log(j + e)).
    Nonextendable {
        #[arg(long = "C")]
        c: f64,
        #[arg(long = "K")]
        k: usize,
        /// Largest order in the domination table.
        #[arg(long, default_value_t = 20)]
        orders: usize,
    },
}

fn suite_help() -> String {
    let mut s = String::from("Suites:\n");
    for suite in Suite::ALL {
        s.push_str(&format!("  {:<16} {}\n", suite.name(), suite.statement()));
    }
    s.push_str("\nExit status: 0 no failed check, 1 a check failed, 2 configuration error, 3 runtime error.");
    s
}

/// An error with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait ExitStatus<T> {
    fn usage(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ExitStatus<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code: 2,
            error: e.into(),
        })
    }

    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code: 3,
            error: e.into(),
        })
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text)
        .with_context(|| format!("invalid {what} JSON"))
        .usage()
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(e).context("writing to stdout").runtime()
        }
        _ => Ok(()),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .context("serializing output")
        .runtime()?;
    text.push('\n');
    emit(&text)
}

fn generator(text: &str) -> Result<Generator, Failure> {
    let g: Generator = parse_json("generator", text)?;
    g.validate().usage()?;
    Ok(g)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Degree {
            generator: g,
            sup_norm,
            length,
        } => {
            let gen = generator(&g)?;
            let seq = from_generator(&gen, length + 1).usage()?;
            let d = bang_degree(&seq, sup_norm).runtime()?;
            print_json(&d)?;
        }
        Command::Profile {
            function,
            generator: g,
            grid,
            length,
            out,
        } => {
            let f: FunctionModel = parse_json("function", &function)?;
            let gen = generator(&g)?;
            let seq = from_generator(&gen, length + 1).usage()?;
            let csv = BangProfile::uniform(&f, &seq, grid).runtime()?.to_csv();
            match out {
                Some(path) => write_output(&path, &csv).runtime()?,
                None => emit(&csv)?,
            }
        }
        Command::Verify {
            config,
            seed,
            out,
            format,
            timings,
        } => {
            let mut cfg = load_config(&config).usage()?;
            let env_seed = match std::env::var("QB_SEED") {
                Ok(v) => Some(
                    v.trim()
                        .parse::<u64>()
                        .map_err(|e| anyhow!("QB_SEED={v:?}: {e}"))
                        .usage()?,
                ),
                Err(_) => None,
            };
            if let Some(s) = seed.or(env_seed) {
                cfg.seed = s;
            }
            let report =
                harness::run_suite_with(&cfg, RunOptions { timings }).map_err(|e| Failure {
                    code: e.exit_code() as u8,
                    error: e.into(),
                })?;
            match out {
                Some(path) => emit_report(&report, format, &path).runtime()?,
                None => match format {
                    Format::Json => emit(&report.to_json())?,
                    Format::Csv => emit(&report.to_csv())?,
                },
            }
            let s = report.summary;
            eprintln!(
                "pass {} fail {} inconclusive {}",
                s.pass, s.fail, s.inconclusive
            );
            if report.has_failures() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Construct {
            what: Construct::Nonextendable { c, k, orders },
        } => {
            let f = FunctionModel::nonextendable(c, k).usage()?;
            let rows: Vec<_> = domination_check(c, k, orders)
                .into_iter()
                .map(|r| serde_json::json!({"n": r.n, "log_sum": r.log_sum, "log_bound": r.log_bound, "holds": r.holds()}))
                .collect();
            let coefficients: Vec<_> = (0..=k.min(20))
                .step_by(2)
                .map(|j| serde_json::json!([j, log_coefficient(c, j).exp()]))
                .collect();
            print_json(&serde_json::json!({
                "function": f,
                "coefficients": coefficients,
                "domination": rows,
                "smallest_passing_power_of_two": search_constant(k, orders),
            }))?;
        }
        Command::Minorant { values } => {
            let v: Vec<f64> = parse_json("values", &values)?;
            let m = log_convex_minorant(&v).usage()?;
            let minorant: Vec<f64> = m.minorant.log_values().iter().map(|x| x.exp()).collect();
            print_json(&serde_json::json!({"minorant": minorant, "contact_set": m.contact_set}))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
