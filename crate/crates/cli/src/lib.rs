//! The `pfsa` command line.

pub mod bench;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use pfsa_core::cssr::CssrConfig;
use pfsa_core::exact::{build_ip_model, SearchLimits};
use pfsa_core::sequence::{gen_fixture, SuccessorTable, SymbolSequence, TokenMode, WindowCounts};
use pfsa_core::stats::{compatibility_graph, DistributionTest, TestConfig};
use pfsa_core::{infer, Method};

pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pfsa", version, about = "Minimum-state probabilistic automaton inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Tokens {
    /// One symbol per character, whitespace ignored.
    Chars,
    /// Whitespace-separated tokens.
    Whitespace,
}

#[derive(Debug, clap::Args)]
struct DataArgs {
    /// Input sequence file; standard input when omitted or `-`.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(short = 'L', long = "L", default_value_t = 2)]
    max_len: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// chi2, chi2-counts or ks.
    #[arg(long, default_value = "chi2", value_parser = parse_test)]
    test: DistributionTest,
    #[arg(long, value_enum, default_value = "chars")]
    tokens: Tokens,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the 648-symbol reference sequence.
    GenFixture {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Infer a machine from a sequence.
    Infer {
        #[arg(long, value_parser = parse_method)]
        method: Method,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Search budget in seconds for the exact method.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Dump the compatibility graph as an edge list.
    Graph {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the 0/1 program for the minimum-state problem in LP format.
    Lp {
        #[command(flatten)]
        data: DataArgs,
        /// Drop the determinism constraints.
        #[arg(long)]
        nondeterministic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the runtime comparison and write CSV.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_test(s: &str) -> Result<DistributionTest, String> {
    s.parse()
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_DATA
        }
    }
}

enum Failure {
    Usage(String),
    Data(String),
}

fn data<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Data(e.to_string())
}

fn read_sequence(args: &DataArgs) -> Result<SymbolSequence, Failure> {
    let text = match &args.input {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(data)?;
            s
        }
    };
    let mode = match args.tokens {
        Tokens::Chars => TokenMode::Chars,
        Tokens::Whitespace => TokenMode::Whitespace,
    };
    SymbolSequence::parse(&text, mode).map_err(data)
}

fn cssr_config(args: &DataArgs) -> Result<CssrConfig, Failure> {
    let test = TestConfig::new(args.test, args.alpha).map_err(|e| Failure::Usage(e.to_string()))?;
    CssrConfig::new(args.max_len, test).map_err(|e| Failure::Usage(e.to_string()))
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(data),
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::GenFixture { out } => emit(&out, &gen_fixture().to_text(), stdout),
        Command::Infer {
            method,
            data: args,
            out,
            format,
            timeout,
        } => {
            let cfg = cssr_config(&args)?;
            let time_limit = match timeout {
                Some(t) if t > 0.0 && t.is_finite() => Some(Duration::from_secs_f64(t)),
                Some(t) => return Err(Failure::Usage(format!("timeout must be positive, got {t}"))),
                None => None,
            };
            let seq = read_sequence(&args)?;
            let inf = infer(&seq, method, &cfg, &SearchLimits { time_limit }).map_err(data)?;
            let text = match format {
                Format::Json => inf.machine.to_json(),
                Format::Dot => inf.machine.to_dot(),
            };
            emit(&out, &text, stdout)
        }
        Command::Graph { data: args, out } => {
            let cfg = cssr_config(&args)?;
            let seq = read_sequence(&args)?;
            let wc = WindowCounts::new(&seq, cfg.max_len).map_err(data)?;
            let graph = compatibility_graph(&wc.strings(), &wc, &cfg.test).map_err(data)?;
            emit(&out, &graph.to_edge_list(wc.alphabet()), stdout)
        }
        Command::Lp {
            data: args,
            nondeterministic,
            out,
        } => {
            let cfg = cssr_config(&args)?;
            let seq = read_sequence(&args)?;
            let wc = WindowCounts::new(&seq, cfg.max_len).map_err(data)?;
            let w = wc.strings();
            let graph = compatibility_graph(&w, &wc, &cfg.test).map_err(data)?;
            let model = build_ip_model(&graph, &SuccessorTable::new(&w, &wc), !nondeterministic);
            emit(&out, &model.to_lp(), stdout)
        }
        Command::Bench { config, out } => {
            let text = fs::read_to_string(&config).map_err(|e| Failure::Data(format!("{}: {e}", config.display())))?;
            let cfg = bench::BenchConfig::parse(&text).map_err(|e| Failure::Data(format!("{}: {e}", config.display())))?;
            let rows = bench::run_bench(&cfg).map_err(Failure::Data)?;
            let mut buf = Vec::new();
            bench::write_csv(&cfg, &rows, &mut buf).map_err(data)?;
            emit(&out, &String::from_utf8(buf).expect("csv is utf-8"), stdout)
        }
    }
}
