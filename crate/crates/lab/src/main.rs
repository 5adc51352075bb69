use std::path::PathBuf;
use std::process::ExitCode;

use chenlee_lab::config::{parse_config_for, to_toml, Experiment, RunConfig};
use chenlee_lab::{output, run_experiment, LabError, RunOptions};
use clap::{CommandFactory, FromArgMatches, Parser};

const OUT_ENV: &str = "CHENLEE_LAB_OUT";

/// Runs one experiment and writes CSV reports, checks.csv, metrics.csv and
/// manifest.json to <out>/<experiment>/.
///
/// Exit status: 0 all checks pass, 1 some check fails, 2 usage or
/// configuration error, 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "chenlee-lab", version)]
struct Cli {
    /// solve, smoothing, contraction, illposed-c3, illposed-c2nd, beta-limit, eta-limit or decay
    experiment: Experiment,
    /// TOML run configuration; may omit `experiment`. Without it every
    /// default listed below applies.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Scale the selected sweep down roughly 4x.
    #[arg(long)]
    quick: bool,
    /// Worker threads for sweep members (0 = one per core).
    #[arg(long, value_name = "N", default_value_t = 0)]
    jobs: usize,
    /// Output root; CHENLEE_LAB_OUT overrides it, then `output_dir` from the
    /// config, then ./chenlee-out.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn defaults_help() -> String {
    let mut text = String::from("Defaults (experiment-specific tables apply to their experiment only):\n\n");
    text.push_str(&to_toml(&RunConfig::new(Experiment::Solve)).unwrap_or_default());
    text
}

fn load(cli: &Cli) -> Result<RunConfig, LabError> {
    let cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
            parse_config_for(&text, cli.experiment)?
        }
        None => RunConfig::new(cli.experiment),
    };
    let cfg = if cli.quick { cfg.quick() } else { cfg };
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: Option<&RunConfig>) -> PathBuf {
    std::env::var_os(OUT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| cli.out.clone())
        .or_else(|| cfg.and_then(|c| c.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("chenlee-out"))
}

fn fail(err: &LabError, dir: PathBuf, experiment: Experiment) -> ExitCode {
    eprintln!("error: {err}");
    let record = err.record();
    match output::write_error(&dir.join(experiment.name()), &record) {
        Ok(p) => eprintln!("error record: {}", p.display()),
        Err(e) => eprintln!("could not write error record: {e}"),
    }
    ExitCode::from(record.exit_code as u8)
}

fn main() -> ExitCode {
    let matches = Cli::command().after_long_help(defaults_help()).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => return fail(&e, out_dir(&cli, None), cli.experiment),
    };
    let opts = RunOptions { jobs: cli.jobs, quick: cli.quick, out_dir: out_dir(&cli, Some(&cfg)) };
    let summary = match run_experiment(&cfg, &opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("error record: {}", opts.out_dir.join(cfg.experiment.name()).join("error.json").display());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    for (table, c) in summary.outcome.checks() {
        println!(
            "{} {}/{}: measured {:e}, allowed [{:e}, {:e}]",
            if c.passed() { "PASS" } else { "FAIL" },
            table,
            c.name,
            c.measured,
            c.lower,
            c.upper
        );
    }
    let passed = summary.outcome.passed();
    println!("{} {} -> {}", if passed { "PASS" } else { "FAIL" }, cfg.experiment, summary.dir.display());
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
