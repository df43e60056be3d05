//! Batch front-end: parse operator specs, run checks, emit reports.
//!
//! Exit codes: 0 when every requested check holds / is below tolerance,
//! 1 when a check fails, 2 on input or domain errors.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wcoball_cli::checks::{run_job, Report};
use wcoball_cli::jobspec::{parse_seed_str, parse_spec, JobSpec};

#[derive(Parser)]
#[command(name = "wcoball", version, about = "Weighted composition operators on the ball: classification checks, residuals, and matrix exports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the classification predicates requested by the job spec.
    Classify(JobArgs),
    /// Run the matrix and kernel symmetry residuals.
    CheckSymmetry(JobArgs),
    /// Validate the conjugation attached to the job spec.
    CheckConjugation(JobArgs),
    /// Build the truncated operator matrix and export it as JSON.
    BuildMatrix(JobArgs),
    /// Run the full acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Job spec file (JSON object or array); "-" reads stdin.
    spec: PathBuf,
    /// Truncation degree override.
    #[arg(long)]
    degree: Option<u32>,
    /// Sample count override for kernel-identity checks.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed override (decimal or 0x-hex).
    #[arg(long)]
    seed: Option<String>,
    /// Tolerance overrides, NAME=VALUE (repeatable).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Write the report (or matrix) to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SuiteArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Classify(args) => run_with_defaults(args, default_classify_checks),
        Command::CheckSymmetry(args) => {
            run_with_defaults(args, |_| vec!["matrix_symmetry".into(), "kernel_symmetry".into()])
        }
        Command::CheckConjugation(args) => {
            run_with_defaults(args, |_| vec!["conjugation_validity".into()])
        }
        Command::BuildMatrix(args) => build_matrix(args),
        Command::Suite(args) => suite(args),
    }
}

/// Classification check inferred from the space and conjugation when the
/// job does not name its checks.
fn default_classify_checks(job: &JobSpec) -> Vec<String> {
    use wcoball::operator::ConjugationSpec;
    use wcoball::space::SpaceKind;
    match (job.space.kind, &job.conjugation) {
        (SpaceKind::Dirichlet, Some(ConjugationSpec::JCU { .. })) => {
            vec!["classify_dirichlet_JCU".into()]
        }
        (SpaceKind::Dirichlet, _) => vec!["classify_dirichlet_J".into()],
        (SpaceKind::Hardy, _) => vec!["hardy_unitary".into(), "hardy_hermitian".into()],
    }
}

fn read_spec_bytes(path: &Path) -> Result<Vec<u8>, String> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|e| format!("reading {}: {e}", path.display()))
    }
}

fn load_jobs(args: &JobArgs) -> Result<Vec<JobSpec>, String> {
    let bytes = read_spec_bytes(&args.spec)?;
    let mut jobs = parse_spec(&bytes).map_err(|e| e.to_string())?;
    let overrides = parse_tolerance_overrides(&args.tol)?;
    for job in &mut jobs {
        if let Some(d) = args.degree {
            job.degree_cap = Some(d);
        }
        if let Some(s) = args.samples {
            job.sample_count = Some(s);
        }
        if let Some(seed) = &args.seed {
            job.seed =
                Some(parse_seed_str(seed).ok_or_else(|| format!("bad --seed value {seed:?}"))?);
        }
        for (name, value) in &overrides {
            job.tolerances.insert(name.clone(), *value);
        }
    }
    Ok(jobs)
}

fn parse_tolerance_overrides(items: &[String]) -> Result<Vec<(String, f64)>, String> {
    items
        .iter()
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| format!("--tol expects NAME=VALUE, got {item:?}"))?;
            let value: f64 = value
                .parse()
                .map_err(|e| format!("--tol {name}: bad value {value:?} ({e})"))?;
            Ok((name.to_string(), value))
        })
        .collect()
}

fn run_with_defaults(
    args: JobArgs,
    defaults: impl Fn(&JobSpec) -> Vec<String>,
) -> Result<bool, String> {
    let mut jobs = load_jobs(&args)?;
    for job in &mut jobs {
        if job.checks.is_empty() {
            job.checks = defaults(job);
        }
    }
    let mut reports = Vec::new();
    for (index, job) in jobs.iter().enumerate() {
        reports.push(run_job(job, index).map_err(|e| format!("job {index}: {e}"))?);
    }
    let report = Report { passed: reports.iter().all(|j| j.passed), jobs: reports };
    emit(&report, args.format, args.out.as_deref())?;
    Ok(report.passed)
}

fn build_matrix(args: JobArgs) -> Result<bool, String> {
    let mut jobs = load_jobs(&args)?;
    for job in &mut jobs {
        if job.checks.is_empty() {
            job.checks = vec!["matrix_export".into()];
        }
    }
    let mut reports = Vec::new();
    for (index, job) in jobs.iter().enumerate() {
        let mut report = run_job(job, index).map_err(|e| format!("job {index}: {e}"))?;
        if let Some(out) = &args.out {
            for check in &mut report.checks {
                if let Some(artifact) = check.artifact.take() {
                    let path = indexed_path(out, index, jobs.len());
                    let text = serde_json::to_string_pretty(&artifact)
                        .expect("artifact serializes");
                    std::fs::write(&path, text)
                        .map_err(|e| format!("writing {}: {e}", path.display()))?;
                    check.diagnostics.insert(
                        "written_to".into(),
                        serde_json::Value::String(path.display().to_string()),
                    );
                }
            }
        }
        reports.push(report);
    }
    let report = Report { passed: reports.iter().all(|j| j.passed), jobs: reports };
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        Format::Text => report.render_text(),
    };
    println!("{text}");
    Ok(report.passed)
}

fn indexed_path(base: &Path, index: usize, total: usize) -> PathBuf {
    if total <= 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    let ext = base.extension().map(|s| s.to_string_lossy());
    let name = match ext {
        Some(ext) => format!("{stem}-{index}.{ext}"),
        None => format!("{stem}-{index}"),
    };
    base.with_file_name(name)
}

fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<(), String> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes"),
        Format::Text => report.render_text(),
    };
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn suite(args: SuiteArgs) -> Result<bool, String> {
    let outcomes = wcoball::acceptance::run_all();
    let passed = outcomes.iter().all(|o| o.passed);
    let text = match args.format {
        Format::Json => {
            let items: Vec<serde_json::Value> = outcomes
                .iter()
                .map(|o| {
                    serde_json::json!({
                        "id": o.id,
                        "name": o.name,
                        "passed": o.passed,
                        "detail": o.detail,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&serde_json::json!({
                "passed": passed,
                "criteria": items,
            }))
            .expect("suite serializes")
        }
        Format::Text => {
            let mut lines: Vec<String> = outcomes.iter().map(|o| o.line()).collect();
            lines.push(format!("suite: {}", if passed { "PASS" } else { "FAIL" }));
            lines.join("\n")
        }
    };
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("writing {}: {e}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(passed)
}
