use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spectra_persist::{
    betti, decompose, default_r_max, pages_direct, pages_from_barcode, parse_any, parse_distance_matrix, parse_pages,
    parse_point_cloud, random_complex, recover_barcode, rips, serialize_simplicial, verify, write_barcode, write_pages,
    Error, FieldSpec, FilteredChainComplex, OutputFormat,
};

/// Persistence barcodes and spectral-sequence pages of filtered chain complexes.
#[derive(Parser, Debug)]
#[command(name = "spectra-persist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the barcode of a complex.
    Barcode(Input),
    /// Print spectral-sequence page dimensions.
    Pages(Input),
    /// Cross-check barcode and pages; exit 0 only if every check passes.
    Verify(Input),
    /// Build a Vietoris-Rips complex from a point cloud or distance matrix.
    Rips(Input),
    /// Read a page table and print the barcode it determines.
    Recover(Input),
    /// Print the persistent Betti number b_n^{i,j}.
    Betti(Input),
}

#[derive(Args, Debug)]
struct Input {
    /// Input file, or "-" for standard input.
    path: Option<String>,
}

#[derive(Args, Debug)]
struct Opts {
    /// Coefficient field: a prime p or "q".
    #[arg(long, global = true, default_value = "2", value_parser = parse_field)]
    field: FieldSpec,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Last finite page to compute (default: filtration span + 1).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    r_max: Option<u64>,
    /// Seed for --random.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Lowest birth level for recover (default: lowest level in the table).
    #[arg(long, global = true, allow_hyphen_values = true)]
    s_min: Option<i64>,
    #[arg(long, global = true, value_enum, default_value_t = Engine::Barcode)]
    engine: Engine,
    /// Largest simplex dimension for rips.
    #[arg(long, global = true, default_value_t = 2)]
    max_dim: usize,
    /// Largest simplex diameter for rips (default: unbounded).
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Use a seeded random complex with this many generators instead of a file.
    #[arg(long, global = true)]
    random: Option<usize>,
    /// Read rips input as a distance matrix.
    #[arg(long, global = true)]
    dist: bool,
    #[arg(long, global = true, allow_hyphen_values = true)]
    i: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    j: Option<i64>,
    #[arg(long, global = true, default_value_t = 0, allow_hyphen_values = true)]
    degree: i32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Tsv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Tsv => OutputFormat::Tsv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Engine {
    Barcode,
    Direct,
    Both,
}

fn parse_field(s: &str) -> Result<FieldSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Why a command stopped: data problems exit 1, misuse exits 2.
enum Failure {
    Data(String),
    Usage(String),
    /// Already reported on stdout (failed checks, differing engines).
    Silent,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read_input(input: &Input) -> Result<String, Failure> {
    match input.path.as_deref() {
        None => Err(Failure::Usage("missing input path (use '-' for standard input)".into())),
        Some("-") => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text)?;
            Ok(text)
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{path}: {e}"))),
    }
}

fn load_complex(input: &Input, opts: &Opts) -> Result<FilteredChainComplex, Failure> {
    match (opts.random, &input.path) {
        (Some(_), Some(_)) => Err(Failure::Usage("give either an input path or --random, not both".into())),
        (Some(n), None) => Ok(random_complex(opts.field, n, opts.seed)),
        (None, _) => Ok(parse_any(&read_input(input)?, opts.field)?),
    }
}

fn emit(out: &mut impl Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let opts = &cli.opts;
    let fmt = OutputFormat::from(opts.format);
    let stdout = io::stdout();
    let mut out = io::LineWriter::new(stdout.lock());
    match &cli.command {
        Command::Barcode(input) => {
            let (_, bars) = decompose(&load_complex(input, opts)?)?;
            emit(&mut out, &write_barcode(&bars, fmt))
        }
        Command::Pages(input) => {
            let c = load_complex(input, opts)?;
            let r_max = opts.r_max.unwrap_or_else(|| default_r_max(&c));
            let from_bars = || -> Result<_, Failure> { Ok(pages_from_barcode(&decompose(&c)?.1, r_max)?) };
            match opts.engine {
                Engine::Barcode => emit(&mut out, &write_pages(&from_bars()?, fmt)),
                Engine::Direct => emit(&mut out, &write_pages(&pages_direct(&c, r_max)?, fmt)),
                Engine::Both => {
                    let (a, b) = (from_bars()?, pages_direct(&c, r_max)?);
                    emit(&mut out, &format!("## engine barcode\n{}", write_pages(&a, fmt)))?;
                    emit(&mut out, &format!("## engine direct\n{}", write_pages(&b, fmt)))?;
                    let diff = a.diff(&b);
                    if diff.is_empty() {
                        return emit(&mut out, "DIFF: none\n");
                    }
                    for (p, n, s, x, y) in diff {
                        emit(&mut out, &format!("DIFF: page {p} n={n} s={s}: barcode {x}, direct {y}\n"))?;
                    }
                    Err(Failure::Silent)
                }
            }
        }
        Command::Verify(input) => {
            let c = load_complex(input, opts)?;
            let report = verify(&c, opts.r_max.unwrap_or_else(|| default_r_max(&c)))?;
            emit(&mut out, &format!("{report}\n"))?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Silent)
            }
        }
        Command::Rips(input) => {
            let text = read_input(input)?;
            let cloud = if opts.dist { parse_distance_matrix(&text)? } else { parse_point_cloud(&text)? };
            if opts.threshold.is_some_and(|t| t.is_nan() || t < 0.0) {
                return Err(Failure::Usage("--threshold must be a nonnegative number".into()));
            }
            let fsc = rips(&cloud, opts.max_dim, opts.threshold);
            emit(&mut out, &serialize_simplicial(&fsc, opts.field)?)
        }
        Command::Recover(input) => {
            let table = parse_pages(&read_input(input)?)?;
            let s_min = opts.s_min.or_else(|| table.support().iter().map(|&(_, s)| s).min()).unwrap_or(0);
            emit(&mut out, &write_barcode(&recover_barcode(&table, s_min)?, fmt))
        }
        Command::Betti(input) => {
            let (Some(i), Some(j)) = (opts.i, opts.j) else {
                return Err(Failure::Usage("betti needs --i and --j".into()));
            };
            let (_, bars) = decompose(&load_complex(input, opts)?)?;
            emit(&mut out, &format!("{}\n", betti(&bars, opts.degree, i, j)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Silent) => ExitCode::from(1),
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
