use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sharbly::galois::{MatchSearch, REFERENCE_TORSION};
use sharbly::hecke::SpaceKind;
use sharbly::pipeline::{
    parse_packages, reference_packages, render_compute, render_matches, render_predictions, render_reference_table2,
    render_table1, render_table2, run_compute, run_hecke, run_match, run_predict, ComputeReport, Format, JobConfig,
    PipelineError,
};

#[derive(Parser)]
#[command(name = "sharbly", version, about = "Torsion homology and Hecke eigenvalues of congruence subgroups of SL(m, Z)")]
struct Cli {
    /// More logging (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Primes that can be orders of torsion elements of Γ₀(N) in SL(4, Z).
    Predict {
        /// Levels: `11`, `11,19` or `1-60`; repeatable.
        #[arg(long, required = true)]
        level: Vec<String>,
        #[arg(long, value_enum, default_value_t = OutFormat::Txt)]
        format: OutFormat,
    },
    /// Torsion reports and Hecke eigenpackages for every odd torsion prime.
    Compute(Job),
    /// Hecke eigenpackages at given primes p.
    Hecke {
        #[command(flatten)]
        job: Job,
        /// Which part of the mod-p homology to act on.
        #[arg(long, value_enum, default_value_t = Space::Torsion)]
        space: Space,
    },
    /// Match eigenpackages from a JSON file against sums of characters.
    Match {
        /// Output of `compute` or `hecke` in JSON, or a list of packages.
        file: Option<PathBuf>,
        /// Use the built-in reference eigenclasses instead of a file.
        #[arg(long, conflicts_with = "file")]
        reference: bool,
        /// Largest degree of the field of character values.
        #[arg(long, default_value_t = 2)]
        extension: u32,
        #[arg(long, value_enum, default_value_t = OutFormat::Txt)]
        format: OutFormat,
    },
    /// Odd torsion table and Hecke polynomial table.
    Tables {
        #[command(flatten)]
        job: Job,
        /// Print the built-in reference tables without computing.
        #[arg(long)]
        reference: bool,
    },
}

#[derive(Args)]
struct Job {
    #[arg(long, default_value_t = 4)]
    rank: usize,
    /// Levels: `11`, `11,19` or `11-31`; repeatable.
    #[arg(long)]
    level: Vec<String>,
    /// Cohomological degree (default 5 for rank 4, the top degree otherwise).
    #[arg(long)]
    degree: Option<usize>,
    /// Hecke primes ℓ.
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5, 7])]
    ell: Vec<u64>,
    /// Torsion primes p (a filter for `compute`, the primes to use for `hecke`).
    #[arg(long, value_delimiter = ',')]
    p: Vec<u64>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Txt)]
    format: OutFormat,
    /// Reduction steps allowed per cycle.
    #[arg(long)]
    budget: Option<usize>,
    /// Row operations allowed per Smith normal form.
    #[arg(long)]
    snf_budget: Option<u64>,
    /// Print polynomial coefficients in [0, p) instead of balanced.
    #[arg(long)]
    nonnegative: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
    Txt,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Format {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
            OutFormat::Txt => Format::Txt,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Torsion,
    Full,
}

fn parse_levels(specs: &[String]) -> Result<Vec<u64>, PipelineError> {
    let bad = |s: &str| PipelineError::Parse(format!("bad level {s:?}"));
    let mut out = vec![];
    for part in specs.iter().flat_map(|s| s.split(',')) {
        let part = part.trim();
        if let Some((a, b)) = part.split_once('-') {
            let a: u64 = a.trim().parse().map_err(|_| bad(part))?;
            let b: u64 = b.trim().parse().map_err(|_| bad(part))?;
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad(part))?);
        }
    }
    Ok(out)
}

impl Job {
    fn config(&self) -> Result<JobConfig, PipelineError> {
        let mut cfg = JobConfig::new(self.rank, parse_levels(&self.level)?);
        if let Some(d) = self.degree {
            cfg.degree = d;
        }
        cfg.hecke_primes = self.ell.clone();
        if !self.p.is_empty() {
            cfg.torsion_primes = Some(self.p.clone());
        }
        if let Some(b) = self.budget {
            cfg.reduction_budget = b;
        }
        cfg.snf_budget = self.snf_budget;
        cfg.cache_dir = self.cache_dir.clone();
        cfg.balanced = !self.nonnegative;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_compute(report: &ComputeReport, format: Format) -> Result<bool, PipelineError> {
    print!("{}", render_compute(report, format)?);
    for l in report.levels.iter().filter(|l| !l.completed()) {
        log::error!("level {} did not complete", l.level);
    }
    Ok(report.all_completed())
}

/// `Ok(false)` when some level failed.
fn run(cli: Cli) -> Result<bool, PipelineError> {
    match cli.command {
        Command::Predict { level, format } => {
            let rows = run_predict(&parse_levels(&level)?);
            print!("{}", render_predictions(&rows, format.into()));
            Ok(true)
        }
        Command::Compute(job) => {
            let cfg = job.config()?;
            print_compute(&run_compute(&cfg)?, job.format.into())
        }
        Command::Hecke { job, space } => {
            let cfg = job.config()?;
            if job.p.is_empty() {
                return Err(PipelineError::Config("hecke needs at least one --p".into()));
            }
            let kind = match space {
                Space::Torsion => SpaceKind::Torsion,
                Space::Full => SpaceKind::Full,
            };
            let mut ok = true;
            for &p in &job.p {
                ok &= print_compute(&run_hecke(&cfg, p, kind)?, job.format.into())?;
            }
            Ok(ok)
        }
        Command::Match { file, reference, extension, format } => {
            let packages = if reference {
                reference_packages(true)?
            } else {
                let path = file.ok_or_else(|| PipelineError::Config("match needs a file or --reference".into()))?;
                parse_packages(&std::fs::read_to_string(path)?)?
            };
            let reports = run_match(&packages, MatchSearch { extension_degree: extension })?;
            print!("{}", render_matches(&reports, format.into()));
            Ok(true)
        }
        Command::Tables { job, reference } => {
            let format: Format = job.format.into();
            if reference {
                print!("{}", render_table1(REFERENCE_TORSION, format));
                println!();
                print!("{}", render_reference_table2(format, !job.nonnegative)?);
                return Ok(true);
            }
            let cfg = job.config()?;
            let report = run_compute(&cfg)?;
            print!("{}", render_table1(&report.table1(), format));
            println!();
            print!("{}", render_table2(&report.packages(), format)?);
            for l in report.levels.iter().filter(|l| !l.completed()) {
                eprintln!("level {} failed: {}", l.level, l.error.as_deref().unwrap_or("unknown error"));
            }
            Ok(report.all_completed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default)).init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
