//! `cpci`: critical point confidence intervals from the command line.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cpci_core::critical::{classify_field, count_types};
use cpci_core::egf::{load_ensemble, load_model, save_ensemble, save_model};
use cpci_core::export::{format_sig9, read_summaries, write_classification, write_counts, write_summaries};
use cpci_core::render::{render_map, GlyphStyle};
use cpci_core::stats::{coverage_experiment, summarize, ConfidenceLevel, ProbabilitySummary};
use cpci_core::synth::{estimate_moments, ground_truth_counts, sample_ensemble, MomentModel, Seed};
use cpci_core::{Ensemble, Error};

#[derive(Debug, Parser)]
#[command(
    name = "cpci",
    version,
    about = "Confidence intervals for critical point probabilities in scalar field ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the critical points of one ensemble member
    Classify {
        #[arg(long)]
        input: PathBuf,
        /// Zero-based member index
        #[arg(long, default_value_t = 0)]
        member: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Per-vertex point estimates and Jeffreys intervals for all three types
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        gamma: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the raw occurrence counts to this CSV file
        #[arg(long)]
        counts: Option<PathBuf>,
    },
    /// Print the nine values of one vertex from a summary CSV
    Query {
        #[arg(long)]
        input: PathBuf,
        i: usize,
        j: usize,
    },
    /// Draw a summary CSV as an SVG glyph map
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Glyph radius at probability 1 (default 0.45 * cell)
        #[arg(long)]
        rmax: Option<f64>,
        /// Grid spacing in pixels
        #[arg(long, default_value_t = 40.0)]
        cell: f64,
        /// Require p_hat = p_lower = p_upper in every row
        #[arg(long)]
        ground_truth: bool,
    },
    /// Fit, sample and evaluate the multivariate normal ensemble model
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Monte-Carlo coverage of Jeffreys intervals
    Coverage {
        /// Comma-separated true probabilities
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        /// Comma-separated ensemble sizes
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.95)]
        gamma: f64,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum SynthCommand {
    /// Estimate mean and covariance factor from an EGF ensemble
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Draw ensembles from a model into a directory of EGF files
    Sample {
        #[arg(long)]
        input: PathBuf,
        /// Output directory
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Ensembles per size
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte-Carlo ground-truth probabilities
    Truth(TruthArgs),
}

#[derive(Debug, Args)]
struct TruthArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.95)]
    gamma: f64,
    /// Write the Monte-Carlo Jeffreys intervals instead of collapsing each
    /// interval onto its point estimate
    #[arg(long)]
    intervals: bool,
}

#[derive(Debug)]
enum CliError {
    /// Bad arguments or input files; exit code 2.
    Usage(String),
    /// Anything else; exit code 1.
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => CliError::Internal(io.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> CliError {
    match CliError::from(e) {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn read_ensemble(path: &Path) -> CliResult<Ensemble> {
    load_ensemble(open(path)?).map_err(|e| with_path(path, e))
}

fn read_model(path: &Path) -> CliResult<MomentModel> {
    load_model(open(path)?).map_err(|e| with_path(path, e))
}

fn level(gamma: f64) -> CliResult<ConfidenceLevel> {
    Ok(ConfidenceLevel::new(gamma)?)
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed command leaves no partial output. `None` writes
/// to stdout.
fn emit(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> CliResult) -> CliResult {
    let Some(path) = path else {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        body(&mut lock)?;
        return Ok(lock.flush()?);
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Classify { input, member, output } => {
            let e = read_ensemble(&input)?;
            let field = e.members().get(member).ok_or_else(|| {
                usage(format!(
                    "member index {member} out of range: ensemble has {} members",
                    e.len()
                ))
            })?;
            let types = classify_field(field, e.topology())?;
            emit(output.as_deref(), |w| {
                Ok(write_classification(w, e.topology(), &types)?)
            })
        }
        Command::Estimate {
            input,
            gamma,
            output,
            counts,
        } => {
            let level = level(gamma)?;
            let e = read_ensemble(&input)?;
            let type_counts = count_types(&e);
            let summaries = type_counts
                .iter()
                .map(|c| summarize(c, level))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(path) = counts.as_deref() {
                emit(Some(path), |w| Ok(write_counts(w, e.topology(), &type_counts)?))?;
            }
            emit(output.as_deref(), |w| Ok(write_summaries(w, e.topology(), &summaries)?))
        }
        Command::Query { input, i, j } => {
            let table = read_summaries(open(&input)?).map_err(|e| with_path(&input, e))?;
            let row = table.row(i, j)?;
            let mut out = io::stdout().lock();
            let m = table.m.map_or_else(|| "unknown".to_owned(), |m| m.to_string());
            let gamma = table.gamma.map_or_else(|| "unknown".to_owned(), format_sig9);
            writeln!(out, "vertex ({i}, {j})  m={m}  gamma={gamma}")?;
            writeln!(out, "{:<8} {:>14} {:>14} {:>14}", "type", "p_hat", "p_lower", "p_upper")?;
            for (k, name) in ["min", "max", "saddle"].iter().enumerate() {
                let f = &row.fields[3 * k..3 * k + 3];
                writeln!(out, "{:<8} {:>14} {:>14} {:>14}", name, f[0], f[1], f[2])?;
            }
            Ok(())
        }
        Command::Render {
            input,
            output,
            rmax,
            cell,
            ground_truth,
        } => {
            let style = GlyphStyle {
                r_max: rmax.unwrap_or(0.45 * cell),
                cell,
                ..GlyphStyle::default()
            };
            style.validate()?;
            let table = read_summaries(open(&input)?).map_err(|e| with_path(&input, e))?;
            if ground_truth {
                if let Some(r) = table.rows.iter().find(|r| !r.is_degenerate()) {
                    return Err(usage(format!(
                        "--ground-truth: row ({}, {}) has p_lower, p_hat, p_upper not all equal",
                        r.i, r.j
                    )));
                }
            }
            let svg = render_map(&table.summaries()?, &table.topology, &style)?;
            emit(output.as_deref(), |w| Ok(w.write_all(svg.as_bytes())?))
        }
        Command::Synth(cmd) => run_synth(cmd),
        Command::Coverage {
            p,
            sizes,
            gamma,
            reps,
            seed,
            output,
        } => {
            let level = level(gamma)?;
            if let Some(bad) = p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(usage(format!("probability {bad} outside [0, 1]")));
            }
            let mut reports = Vec::new();
            for &pt in &p {
                for &m in &sizes {
                    reports.push(coverage_experiment(pt, m, level, reps, seed)?);
                }
            }
            emit(output.as_deref(), |w| {
                writeln!(w, "p,m,gamma,reps,coverage,mean_width")?;
                for r in &reports {
                    writeln!(
                        w,
                        "{},{},{},{},{},{}",
                        format_sig9(r.p_true),
                        r.m,
                        format_sig9(r.gamma),
                        r.reps,
                        format_sig9(r.empirical_coverage()),
                        format_sig9(r.mean_width)
                    )?;
                }
                Ok(())
            })
        }
    }
}

fn run_synth(cmd: SynthCommand) -> CliResult {
    match cmd {
        SynthCommand::Fit { input, output } => {
            let e = read_ensemble(&input)?;
            let model = estimate_moments(&e)?;
            emit(output.as_deref(), |w| Ok(save_model(&model, w)?))
        }
        SynthCommand::Sample {
            input,
            output,
            sizes,
            count,
            seed,
        } => {
            if count == 0 {
                return Err(usage("--count must be at least 1"));
            }
            if let Some(bad) = sizes.iter().find(|&&m| m == 0) {
                return Err(usage(format!("ensemble size {bad} must be at least 1")));
            }
            let model = read_model(&input)?;
            fs::create_dir_all(&output)?;
            let mut ordinal = 0u64;
            for &m in &sizes {
                for k in 0..count {
                    let ensemble = sample_ensemble(&model, m, Seed(seed).offset(ordinal))?;
                    let path = output.join(format!("ensemble_m{m}_{k:02}.egf"));
                    emit(Some(&path), |w| Ok(save_ensemble(&ensemble, w)?))?;
                    ordinal += 1;
                }
            }
            Ok(())
        }
        SynthCommand::Truth(args) => {
            let level = level(args.gamma)?;
            let model = read_model(&args.input)?;
            let counts = ground_truth_counts(&model, args.draws, Seed(args.seed))?;
            let summaries = counts
                .iter()
                .map(|c| {
                    let s = summarize(c, level)?;
                    Ok(if args.intervals {
                        s
                    } else {
                        ProbabilitySummary::degenerate(s.minimum.p_hat, s.maximum.p_hat, s.saddle.p_hat, c.m, level)
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            emit(args.output.as_deref(), |w| {
                Ok(write_summaries(w, model.topology(), &summaries)?)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(m) | CliError::Internal(m)) = &e;
            eprintln!("cpci: {m}");
            ExitCode::from(e.code())
        }
    }
}
