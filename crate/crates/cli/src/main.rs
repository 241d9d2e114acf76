//! lcpoly: seeded experiments on distributions of polynomials in
//! log-concave random vectors.
//!
//! Exit codes: 0 success, 2 theorem-true check failed, 64 usage/config
//! error, 74 I/O error.

mod config;
mod suites;
mod svg;

use clap::{Args, Parser, Subcommand};
use config::{ExperimentConfig, Suite};
use lcpoly::LogConcaveMeasure;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use suites::CliError;

const EXIT_THEOREM: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(name = "lcpoly", version, about = "polynomials in log-concave random vectors: sampling, TV estimation, inequality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one checker suite (or `all`).
    Check {
        /// main-bound | carbery-wright | moments | reverse-poincare |
        /// poincare | density-variance | all
        suite: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// TV between pushforwards of g and g + delta*h over a delta grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Calibrate the empirical main-bound constant over an ensemble.
    EstimateConstant {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Draw a sample set and dump it to CSV.
    Sample {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Default)]
struct CommonArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Measure family: gaussian | exponential | box | ball | potential.
    #[arg(long, visible_alias = "family")]
    measure: Option<String>,
    /// Dimension (defaults to 1, or to the bounds length for boxes).
    #[arg(long)]
    dim: Option<usize>,
    /// Box lower bound(s): one value for all coordinates or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<String>,
    /// Box upper bound(s).
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<String>,
    /// Exponential scale(s): one value or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Ball or potential support radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Convex potential V as a polynomial expression (family = potential).
    #[arg(long)]
    potential: Option<String>,
    /// Polynomial f.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Polynomial g.
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    /// Polynomial h (sweep direction).
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    /// Direction components, comma separated (normalized on use).
    #[arg(long, allow_hyphen_values = true)]
    e: Option<String>,
    /// Delta grid: lo:hi:COUNTlog, lo:hi:COUNTlin or a comma list.
    #[arg(long)]
    deltas: Option<String>,
    /// Threshold grid for carbery-wright (same syntax as --deltas).
    #[arg(long)]
    t_grid: Option<String>,
    /// Moment order q (moments suite).
    #[arg(long)]
    q: Option<f64>,
    /// Polynomial degree d (estimate-constant).
    #[arg(long)]
    d: Option<u32>,
    /// Random (g, h) pairs per measure (estimate-constant).
    #[arg(long)]
    trials: Option<usize>,
    /// Coefficient scale of random polynomials.
    #[arg(long)]
    coefficient_scale: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    n: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Histogram bin count (default: automatic).
    #[arg(long)]
    bins: Option<usize>,
    /// Write the report JSON here (default: stdout).
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Write CSV rows here.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Write an SVG plot here (suites with plots).
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn parse_f64_list(spec: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad numeric value '{s}'")))
        })
        .collect()
}

fn broadcast(values: Vec<f64>, dim: usize, what: &str) -> Result<Vec<f64>, CliError> {
    if values.len() == dim {
        Ok(values)
    } else if values.len() == 1 {
        Ok(vec![values[0]; dim])
    } else {
        Err(CliError::Usage(format!(
            "{what}: expected 1 or {dim} values, got {}",
            values.len()
        )))
    }
}

fn build_measure(args: &CommonArgs) -> Result<Option<LogConcaveMeasure>, CliError> {
    let Some(family) = &args.measure else {
        return Ok(None);
    };
    let lo = args.lo.as_deref().map(parse_f64_list).transpose()?;
    let hi = args.hi.as_deref().map(parse_f64_list).transpose()?;
    let lambda = args.lambda.as_deref().map(parse_f64_list).transpose()?;
    let m = match family.as_str() {
        "gaussian" | "standard_gaussian" | "standard-gaussian" => {
            LogConcaveMeasure::standard_gaussian(args.dim.unwrap_or(1))
        }
        "exponential" | "product_exponential" | "product-exponential" | "laplace" => {
            let dim = args.dim.unwrap_or_else(|| lambda.as_ref().map_or(1, Vec::len));
            let lambdas = broadcast(lambda.unwrap_or_else(|| vec![1.0]), dim, "--lambda")?;
            LogConcaveMeasure::product_exponential(lambdas)?
        }
        "box" | "uniform_box" | "uniform-box" => {
            let lo = lo.ok_or_else(|| CliError::Usage("uniform-box needs --lo".into()))?;
            let hi = hi.ok_or_else(|| CliError::Usage("uniform-box needs --hi".into()))?;
            let dim = args.dim.unwrap_or_else(|| lo.len().max(hi.len()));
            LogConcaveMeasure::uniform_box(
                broadcast(lo, dim, "--lo")?,
                broadcast(hi, dim, "--hi")?,
            )?
        }
        "ball" | "uniform_ball" | "uniform-ball" => {
            let radius = args.radius.ok_or_else(|| CliError::Usage("uniform-ball needs --radius".into()))?;
            LogConcaveMeasure::uniform_ball(args.dim.unwrap_or(1), radius)?
        }
        "potential" | "general_potential" | "general-potential" => {
            let dim = args.dim.unwrap_or(1);
            let text = args
                .potential
                .as_ref()
                .ok_or_else(|| CliError::Usage("general-potential needs --potential EXPR".into()))?;
            let v = lcpoly::parse(text, dim)?;
            let radius = args.radius.ok_or_else(|| CliError::Usage("general-potential needs --radius".into()))?;
            LogConcaveMeasure::general_potential(v, radius, true)?
        }
        other => return Err(CliError::Usage(format!("unknown measure family '{other}'"))),
    };
    Ok(Some(m))
}

fn config_from_args(args: &CommonArgs) -> Result<ExperimentConfig, CliError> {
    let file_cfg: ExperimentConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config parse error: {e}")))?
        }
        None => ExperimentConfig::default(),
    };
    let e = args.e.as_deref().map(parse_f64_list).transpose()?;
    let flag_cfg = ExperimentConfig {
        suite: None,
        measure: build_measure(args)?,
        f: args.f.clone(),
        g: args.g.clone(),
        h: args.h.clone(),
        e,
        deltas: args.deltas.clone(),
        t_grid: args.t_grid.clone(),
        q: args.q,
        d: args.d,
        trials: args.trials,
        coefficient_scale: args.coefficient_scale,
        n: args.n,
        seed: args.seed,
        bins: args.bins,
        out_json: args.out_json.as_ref().map(|p| p.display().to_string()),
        out_csv: args.out_csv.as_ref().map(|p| p.display().to_string()),
        svg: args.svg.as_ref().map(|p| p.display().to_string()),
    };
    Ok(file_cfg.overlay(flag_cfg))
}

fn init_thread_pool() -> Result<(), CliError> {
    if let Ok(spec) = std::env::var("LCPOLY_THREADS") {
        let threads: usize = spec
            .parse()
            .map_err(|_| CliError::Usage(format!("LCPOLY_THREADS must be an integer, got '{spec}'")))?;
        if threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        }
    }
    Ok(())
}

fn write_artifact(path: &str, bytes: &str) -> Result<(), CliError> {
    if let Some(parent) = Path::new(path).parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

fn run_suite_command(suite: Suite, args: &CommonArgs) -> Result<u8, CliError> {
    let cfg = config_from_args(args)?;
    let output = suites::run(suite, &cfg)?;

    let json_text = serde_json::to_string_pretty(&output.doc).expect("doc serializes");
    match &cfg.out_json {
        Some(path) => {
            write_artifact(path, &(json_text + "\n"))?;
            for line in &output.summary {
                println!("{line}");
            }
        }
        None => println!("{json_text}"),
    }
    if let (Some(path), Some(csv)) = (&cfg.out_csv, &output.csv) {
        write_artifact(path, csv)?;
    }
    if let (Some(path), Some(svg)) = (&cfg.svg, &output.svg) {
        write_artifact(path, svg)?;
    }
    Ok(if output.theorem_failure { EXIT_THEOREM } else { 0 })
}

fn run_sample_command(args: &CommonArgs) -> Result<u8, CliError> {
    let cfg = config_from_args(args)?;
    let m = cfg
        .measure
        .clone()
        .ok_or_else(|| CliError::Usage("sample needs a measure (--measure/--family)".into()))?;
    let n = cfg.n.unwrap_or(1000);
    let seed = cfg.seed.unwrap_or(42);
    let s = m.sample(n, seed)?;

    let mut csv = format!(
        "# format_version,{}\n# config,{}\n",
        config::FORMAT_VERSION,
        serde_json::to_string(&cfg).expect("config serializes")
    );
    let header: Vec<String> = (1..=s.dim()).map(|i| format!("x{i}")).collect();
    csv.push_str(&header.join(","));
    csv.push('\n');
    for p in s.iter_points() {
        let row: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    match &cfg.out_csv {
        Some(path) => {
            write_artifact(path, &csv)?;
            println!("wrote {n} points to {path}");
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn dispatch() -> Result<u8, CliError> {
    init_thread_pool()?;
    let cli = Cli::parse();
    match &cli.command {
        Command::Check { suite, common } => {
            let suite = Suite::parse(suite)
                .ok_or_else(|| CliError::Usage(format!("unknown suite '{suite}'")))?;
            if matches!(suite, Suite::Sweep | Suite::EstimateConstant) {
                return Err(CliError::Usage(format!(
                    "suite '{}' has its own subcommand",
                    suite.name()
                )));
            }
            run_suite_command(suite, common)
        }
        Command::Sweep { common } => run_suite_command(Suite::Sweep, common),
        Command::EstimateConstant { common } => run_suite_command(Suite::EstimateConstant, common),
        Command::Sample { common } => run_sample_command(common),
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
