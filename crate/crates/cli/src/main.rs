use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bpselect_cli::{
    cmd_analyze, cmd_pipeline, cmd_run, cmd_tables, load_config, sibling_manifest, CliError, Stderr,
};

/// Train each backpropagation algorithm repeatedly on a test-item validity
/// dataset, then pick the best one with ANOVA, Duncan's test and a t-test.
#[derive(Parser)]
#[command(name = "bpselect", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train all (algorithm, replicate) pairs; write results.csv and manifest.txt.
    Run(Common),
    /// Analyze a results file; write report.txt and report.csv.
    Analyze {
        results: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// `run` then `analyze` in one go.
    Pipeline(Common),
    /// Like `analyze`, plus one file per statistical table.
    Tables {
        results: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file. For analyze/tables the manifest next
    /// to the results file is used when this is omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: `out` for run/pipeline, the results
    /// file's directory for analyze/tables].
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads; 0 means one per core. Never changes outputs.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<String>,
    /// Comma-separated, e.g. `trainlm,traingd`.
    #[arg(long)]
    algorithms: Option<String>,
    #[arg(long)]
    replicates: Option<String>,
    #[arg(long)]
    match_tolerance: Option<String>,
    /// Layer sizes, e.g. `6-10-1`.
    #[arg(long)]
    topology: Option<String>,
    /// Any other config key, e.g. `--set max_epochs=200`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn overrides(&self) -> Result<Vec<(String, String)>, CliError> {
        let mut out = Vec::new();
        for s in &self.set {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, found `{s}`")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        let named = [
            ("seed", self.seed.map(|s| s.to_string())),
            ("alpha", self.alpha.clone()),
            ("algorithms", self.algorithms.clone()),
            ("replicates", self.replicates.clone()),
            ("match_tolerance", self.match_tolerance.clone()),
            ("topology", self.topology.clone()),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        }
        Ok(out)
    }

    fn out_dir_or(&self, fallback: &Path) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| fallback.to_path_buf())
    }
}

fn results_dir(results: &Path) -> PathBuf {
    match results.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(c) => {
            let cfg = load_config(c.config.as_deref(), &c.overrides()?)?;
            let out = c.out_dir_or(Path::new("out"));
            let m = cmd_run(&cfg, &out, c.workers, &Stderr)?;
            eprintln!(
                "[bpselect] wrote {} rows to {}",
                m.labels.len() * m.replicates(),
                out.join(bpselect_cli::RESULTS_FILE).display()
            );
        }
        Command::Pipeline(c) => {
            let cfg = load_config(c.config.as_deref(), &c.overrides()?)?;
            let out = c.out_dir_or(Path::new("out"));
            println!("{}", cmd_pipeline(&cfg, &out, c.workers, &Stderr)?);
        }
        Command::Analyze { results, common: c } => {
            let config = c.config.clone().or_else(|| sibling_manifest(&results));
            let cfg = load_config(config.as_deref(), &c.overrides()?)?;
            println!("{}", cmd_analyze(&results, &cfg, &c.out_dir_or(&results_dir(&results)))?);
        }
        Command::Tables { results, common: c } => {
            let config = c.config.clone().or_else(|| sibling_manifest(&results));
            let cfg = load_config(config.as_deref(), &c.overrides()?)?;
            let out = c.out_dir_or(&results_dir(&results));
            let (verdict, files) = cmd_tables(&results, &cfg, &out)?;
            for f in files {
                eprintln!("[bpselect] wrote {}", out.join(f).display());
            }
            println!("{verdict}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bpselect: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
