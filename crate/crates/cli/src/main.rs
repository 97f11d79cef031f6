use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freqspec::report::{
    self, comparison_csv, estimate_csv, exact_csv, read_curve, EstimateReport,
    ExactConfig, ExactReport, QueryOptions, RunKind,
};
use freqspec::spectrum::{compare_spectra, overlap, sigma_grid, DEFAULT_EXACT_CAP};
use freqspec::{exact_spectrum, parse_fimi, Error, Registry, TransactionDatabase};

mod plot;

use plot::{Series, Style};

const EXIT_USER: u8 = 1;
const EXIT_CAP: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "freqspec", version, about = "Estimate the pattern frequency spectrum of a FIMI dataset")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample random lattice paths and fit a decreasing curve.
    Estimate(SampleArgs),
    /// Same as estimate, on a copy of the data with each column shuffled independently.
    Baseline(SampleArgs),
    /// Enumerate all frequent itemsets down to --sigma-min.
    Exact(ExactArgs),
    /// Per-threshold log10 error between two curve files (CSV or JSON).
    Compare(CompareArgs),
    /// List the registered estimators and curve fits.
    Strategies,
}

#[derive(Args)]
struct CommonOut {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write results here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also render an SVG plot.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    /// Number of sampled paths [default: 5000].
    #[arg(long)]
    paths: Option<usize>,
    /// Smallest threshold, in rows [default: 1].
    #[arg(long)]
    sigma_min: Option<u32>,
    /// Largest threshold, in rows [default: min(1000, rows)].
    #[arg(long)]
    sigma_max: Option<u32>,
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true)]
    include_empty_set: bool,
    /// Path estimator (see `strategies`).
    #[arg(long, default_value = freqspec::registry::DEFAULT_ESTIMATOR)]
    estimator: String,
    /// Curve fit (see `strategies`).
    #[arg(long, default_value = freqspec::registry::DEFAULT_FIT)]
    fit: String,
    /// Worker threads, or `auto` for one per core.
    #[arg(long, default_value = "auto")]
    threads: Threads,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    sigma_min: u32,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: u64,
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true)]
    include_empty_set: bool,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct CompareArgs {
    left: PathBuf,
    right: PathBuf,
    /// Number of thresholds spread over the common domain.
    #[arg(long, default_value_t = 50)]
    grid_points: usize,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy)]
enum Threads {
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Threads::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Threads::Fixed(n)),
            _ => Err(format!("expected a positive integer or `auto`, got {s:?}")),
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn user(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USER,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => EXIT_CAP,
            Error::Json(_) => EXIT_INTERNAL,
            _ => EXIT_USER,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USER)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Estimate(args) => run_sampling(args, RunKind::Estimate),
        Command::Baseline(args) => run_sampling(args, RunKind::Baseline),
        Command::Exact(args) => run_exact(args),
        Command::Compare(args) => run_compare(args),
        Command::Strategies => {
            let r = Registry::builtin();
            println!("estimators: {}", r.estimator_names().join(", "));
            println!("fits: {}", r.fit_names().join(", "));
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<TransactionDatabase, Failure> {
    let file = fs::File::open(path)
        .map_err(|e| Failure::user(format!("cannot open {}: {e}", path.display())))?;
    parse_fimi(BufReader::new(file)).map_err(|e| match e {
        Error::Io(io) => Failure::user(format!("cannot read {}: {io}", path.display())),
        other => Failure::user(format!("{}: {other}", path.display())),
    })
}

fn emit(out: &CommonOut, body: &str) -> Result<(), Failure> {
    match &out.output {
        Some(p) => fs::write(p, body)
            .map_err(|e| Failure::user(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout().write_all(body.as_bytes()).map_err(|e| Failure {
            code: EXIT_INTERNAL,
            message: format!("cannot write to standard output: {e}"),
        }),
    }
}

fn write_plot(path: &Path, series: &[Series], title: &str) -> Result<(), Failure> {
    fs::write(path, plot::render(series, title))
        .map_err(|e| Failure::user(format!("cannot write {}: {e}", path.display())))
}

fn run_sampling(args: SampleArgs, kind: RunKind) -> Result<(), Failure> {
    let db = load(&args.input)?;
    let registry = Registry::builtin();
    let options = QueryOptions {
        sigma_min: args.sigma_min,
        sigma_max: args.sigma_max,
        paths: args.paths,
        seed: args.seed,
        include_empty_set: Some(args.include_empty_set),
        estimator: Some(args.estimator.clone()),
        fit: Some(args.fit.clone()),
    };
    let query = options.resolve(&db);
    query.validate(db.n_rows())?;
    registry.estimator(&query.estimator)?;
    registry.fit(&query.fit)?;

    let pool = match args.threads {
        Threads::Auto => rayon::ThreadPoolBuilder::new(),
        Threads::Fixed(n) => rayon::ThreadPoolBuilder::new().num_threads(n),
    }
    .build()
    .map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("cannot start worker threads: {e}"),
    })?;
    let threads = pool.current_num_threads();
    let result = pool.install(|| report::run_spectrum(&db, &query, kind, &registry))?;

    eprintln!(
        "{}: rows={} attrs={} paths={} sigma=[{}, {}] seed={} threads={} time={:.3}s",
        kind.as_str(),
        result.n_rows,
        result.n_attrs,
        query.paths,
        query.sigma_min,
        query.sigma_max,
        query.seed,
        threads,
        result.elapsed.as_secs_f64()
    );

    let body = match args.out.format {
        Format::Csv => estimate_csv(&result),
        Format::Json => {
            let rep = EstimateReport::new(
                &result,
                kind,
                Some(args.input.display().to_string()),
                Some(threads),
            );
            let mut s = report::to_json(&rep)?;
            s.push('\n');
            s
        }
    };
    emit(&args.out, &body)?;

    if let Some(p) = &args.out.plot {
        let (label, color) = match kind {
            RunKind::Baseline => ("baseline", plot::BASELINE_COLOR),
            _ => ("estimate", plot::ESTIMATE_COLOR),
        };
        let series = [
            Series {
                label: "path estimates".into(),
                color: plot::POINT_COLOR,
                style: Style::Scatter,
                points: result.points.iter().map(|p| (f64::from(p.sigma), p.estimate)).collect(),
            },
            Series {
                label: label.into(),
                color,
                style: Style::Step,
                points: result.curve.iter().collect(),
            },
        ];
        write_plot(p, &series, &args.input.display().to_string())?;
    }
    Ok(())
}

fn run_exact(args: ExactArgs) -> Result<(), Failure> {
    let db = load(&args.input)?;
    if args.sigma_min < 1 || args.sigma_min as usize > db.n_rows() {
        return Err(Failure::user(format!(
            "--sigma-min must lie in [1, {}] for this dataset, got {}",
            db.n_rows(),
            args.sigma_min
        )));
    }
    let start = Instant::now();
    let exact = exact_spectrum(&db, args.sigma_min, args.exact_cap, args.include_empty_set)
        .map_err(|e| match e {
            Error::CapExceeded { cap } => Failure {
                code: EXIT_CAP,
                message: format!(
                    "more than {cap} frequent itemsets at sigma >= {}; raise --exact-cap or --sigma-min",
                    args.sigma_min
                ),
            },
            other => other.into(),
        })?;
    let elapsed = start.elapsed();
    eprintln!(
        "exact: rows={} attrs={} sigma_min={} itemsets={} time={:.3}s",
        db.n_rows(),
        db.n_attrs(),
        args.sigma_min,
        exact.total(),
        elapsed.as_secs_f64()
    );
    let body = match args.out.format {
        Format::Csv => exact_csv(&exact),
        Format::Json => {
            let config = ExactConfig {
                command: RunKind::Exact,
                input: Some(args.input.display().to_string()),
                sigma_min: args.sigma_min,
                include_empty_set: args.include_empty_set,
                exact_cap: args.exact_cap,
            };
            let rep = ExactReport::new(&exact, config, &db, elapsed.as_secs_f64() * 1e3);
            let mut s = report::to_json(&rep)?;
            s.push('\n');
            s
        }
    };
    emit(&args.out, &body)?;
    if let Some(p) = &args.out.plot {
        let series = [Series {
            label: "exact".into(),
            color: plot::EXACT_COLOR,
            style: Style::Step,
            points: exact.to_curve().iter().collect(),
        }];
        write_plot(p, &series, &args.input.display().to_string())?;
    }
    Ok(())
}

fn run_compare(args: CompareArgs) -> Result<(), Failure> {
    let read = |p: &Path| -> Result<_, Failure> {
        let text = fs::read_to_string(p)
            .map_err(|e| Failure::user(format!("cannot read {}: {e}", p.display())))?;
        Ok(read_curve(&text, &p.display().to_string())?)
    };
    let left = read(&args.left)?;
    let right = read(&args.right)?;
    let Some((lo, hi)) = overlap(&left, &right) else {
        return Err(Failure::user("the two curves have no thresholds in common"));
    };
    let (l0, l1) = freqspec::Spectrum::domain(&left);
    let (r0, r1) = freqspec::Spectrum::domain(&right);
    if (l0, l1) != (r0, r1) {
        eprintln!(
            "warning: domains differ ([{l0}, {l1}] vs [{r0}, {r1}]); comparing on the overlap [{lo}, {hi}]"
        );
    }
    let grid = sigma_grid(lo, hi, args.grid_points);
    let cmp = compare_spectra(&left, &right, &grid);
    eprintln!(
        "compare: points={} median_log10_error={:.4} max_log10_error={:.4}",
        cmp.rows.len(),
        cmp.median().unwrap_or(0.0),
        cmp.max().unwrap_or(0.0)
    );
    let body = match args.out.format {
        Format::Csv => comparison_csv(&cmp),
        Format::Json => {
            let doc = serde_json::json!({
                "left": args.left.display().to_string(),
                "right": args.right.display().to_string(),
                "domain": [lo, hi],
                "median_log10_error": cmp.median(),
                "max_log10_error": cmp.max(),
                "rows": cmp.rows,
            });
            let mut s = serde_json::to_string_pretty(&doc).map_err(Error::from)?;
            s.push('\n');
            s
        }
    };
    emit(&args.out, &body)?;
    if let Some(p) = &args.out.plot {
        let series = [
            Series {
                label: args.left.display().to_string(),
                color: plot::ESTIMATE_COLOR,
                style: Style::Step,
                points: left.iter().collect(),
            },
            Series {
                label: args.right.display().to_string(),
                color: plot::EXACT_COLOR,
                style: Style::Step,
                points: right.iter().collect(),
            },
        ];
        write_plot(p, &series, "comparison")?;
    }
    Ok(())
}
