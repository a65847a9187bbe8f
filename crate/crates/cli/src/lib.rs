//! Library side of the `bpselect` binary: config handling, the four
//! subcommands and the exit-code mapping. `main.rs` only parses flags.

pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bpselect::harness::{
    parse_results_csv, render_report, results_csv, run_experiment, selection_cascade, verdict_line, ExperimentConfig,
    HarnessError, MatchMatrix, ReportFormat, SelectionReport,
};
use bpselect::optimizers::ConfigError;
use bpselect::stats::{anova_csv, anova_text, duncan_csv, duncan_text, ttest_csv, ttest_text};
use thiserror::Error;

pub use config::{manifest_entries, manifest_text, parse_config};

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const REPORT_TEXT_FILE: &str = "report.txt";
pub const REPORT_CSV_FILE: &str = "report.csv";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input data error: {0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 1 config, 2 dataset or results file, 3 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(e) => e.into(),
            HarnessError::Dataset(_) | HarnessError::Results(_) => CliError::Data(e.to_string()),
            HarnessError::Network(_) | HarnessError::Stats(_) | HarnessError::Workers(_) => {
                CliError::Internal(e.to_string())
            }
        }
    }
}

/// Writes `contents` to a temporary file in the target directory and renames
/// it into place, so readers see either the old file or the complete new one.
pub fn atomic_write(path: &Path, contents: &str) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::Internal(format!("writing {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(fail)?;
    let mut tmp = tempfile::Builder::new().prefix(".bpselect-").tempfile_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Reads a config file (if any) and applies command-line overrides.
pub fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<ExperimentConfig, CliError> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::Config(format!("reading {}: {e}", p.display())))?,
        None => String::new(),
    };
    parse_config(&text, overrides)
}

/// Where diagnostics go; the binary uses stderr, tests can collect them.
pub trait Console: Sync {
    fn progress(&self, done: usize, total: usize);
    fn warn(&self, message: &str);
}

pub struct Stderr;

impl Console for Stderr {
    fn progress(&self, done: usize, total: usize) {
        // roughly every 5%, plus the last run
        let step = (total / 20).max(1);
        if done % step == 0 || done == total {
            eprintln!("[bpselect] {done}/{total} runs finished");
        }
    }

    fn warn(&self, message: &str) {
        eprintln!("[bpselect] warning: {message}");
    }
}

pub struct Quiet;

impl Console for Quiet {
    fn progress(&self, _: usize, _: usize) {}
    fn warn(&self, _: &str) {}
}

fn manifest_comments(workers: usize) -> Vec<String> {
    vec![
        format!("bpselect {}", env!("CARGO_PKG_VERSION")),
        format!("workers = {workers} (affects runtime only, not results)"),
    ]
}

/// Trains everything and writes the results file and the manifest. Nothing
/// is written if any run fails.
pub fn cmd_run(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    workers: usize,
    console: &dyn Console,
) -> Result<MatchMatrix, CliError> {
    for w in cfg.validate()? {
        console.warn(&w);
    }
    let m = run_experiment(cfg, workers, &|done, total| console.progress(done, total))?;
    atomic_write(&out_dir.join(RESULTS_FILE), &results_csv(&m))?;
    atomic_write(&out_dir.join(MANIFEST_FILE), &manifest_text(cfg, &manifest_comments(workers)))?;
    Ok(m)
}

fn check_analyzable(m: &MatchMatrix) -> Result<(), CliError> {
    if m.labels.len() < 2 {
        return Err(CliError::Config(format!(
            "the results contain {} algorithm(s); choosing between algorithms needs at least 2",
            m.labels.len()
        )));
    }
    if m.replicates() < 2 {
        return Err(CliError::Config(format!(
            "the results contain {} replicate(s) per algorithm; the analysis needs at least 2",
            m.replicates()
        )));
    }
    Ok(())
}

/// Runs the cascade and writes `report.txt` and `report.csv`. The resolved
/// config heads both reports. Returns the report and its verdict line.
pub fn analyze_matrix(
    m: &MatchMatrix,
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(SelectionReport, String), CliError> {
    check_analyzable(m)?;
    let report = selection_cascade(m, cfg.alpha)?;
    let header = manifest_entries(cfg);
    atomic_write(&out_dir.join(REPORT_TEXT_FILE), &render_report(m, &report, ReportFormat::Text, &header))?;
    atomic_write(&out_dir.join(REPORT_CSV_FILE), &render_report(m, &report, ReportFormat::Csv, &header))?;
    let verdict = verdict_line(&report);
    Ok((report, verdict))
}

pub fn read_results(path: &Path) -> Result<MatchMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("reading {}: {e}", path.display())))?;
    parse_results_csv(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// The manifest written next to a results file, if there is one.
pub fn sibling_manifest(results: &Path) -> Option<PathBuf> {
    let p = results.with_file_name(MANIFEST_FILE);
    p.is_file().then_some(p)
}

/// Analyzes an existing results file. `cfg` supplies alpha and the report
/// header.
pub fn cmd_analyze(results: &Path, cfg: &ExperimentConfig, out_dir: &Path) -> Result<String, CliError> {
    let m = read_results(results)?;
    Ok(analyze_matrix(&m, cfg, out_dir)?.1)
}

/// `run` followed by analysis of the fresh matrix.
pub fn cmd_pipeline(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    workers: usize,
    console: &dyn Console,
) -> Result<String, CliError> {
    let m = cmd_run(cfg, out_dir, workers, console)?;
    Ok(analyze_matrix(&m, cfg, out_dir)?.1)
}

/// Like `analyze`, and additionally writes each statistical table as its
/// own text and CSV file. Returns the written file names after the verdict.
pub fn cmd_tables(results: &Path, cfg: &ExperimentConfig, out_dir: &Path) -> Result<(String, Vec<String>), CliError> {
    let m = read_results(results)?;
    let (report, verdict) = analyze_matrix(&m, cfg, out_dir)?;
    let mut written = vec![REPORT_TEXT_FILE.to_string(), REPORT_CSV_FILE.to_string()];
    let mut put = |name: String, contents: String| -> Result<(), CliError> {
        atomic_write(&out_dir.join(&name), &contents)?;
        written.push(name);
        Ok(())
    };
    for (i, stage) in report.stages.iter().enumerate() {
        let n = i + 1;
        put(format!("stage{n}_anova.txt"), anova_text(&stage.anova, &format!("Stage {n}: ANOVA")))?;
        put(format!("stage{n}_anova.csv"), anova_csv(&stage.anova))?;
        if let Some(d) = &stage.duncan {
            put(format!("stage{n}_duncan.txt"), duncan_text(d, &format!("Stage {n}: Duncan multiple range test")))?;
            put(format!("stage{n}_duncan.csv"), duncan_csv(d))?;
        }
    }
    if let Some(t) = &report.final_ttest {
        put("ttest.txt".into(), ttest_text(t, "Independent Samples Test"))?;
        put("ttest.csv".into(), ttest_csv(t))?;
    }
    Ok((verdict, written))
}
