use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tma::config::{DirectivityModeOpt, RunConfig, SceneConfig};
use tma::error::TmaError;
use tma::io::write_series;
use tma::report;

/// Time-modulated array harmonic beamforming simulator.
#[derive(Parser)]
#[command(name = "tma", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct AnalysisFlags {
    /// Override the config's angle step in degrees.
    #[arg(long)]
    angle_step: Option<f64>,
    /// Override the config's harmonic band limit Q.
    #[arg(long = "harmonics")]
    q_max: Option<usize>,
    /// Override the config's directivity mode.
    #[arg(long, value_parser = parse_mode)]
    directivity_mode: Option<DirectivityModeOpt>,
}

fn parse_mode(s: &str) -> Result<DirectivityModeOpt, String> {
    match s {
        "pattern-only" => Ok(DirectivityModeOpt::PatternOnly),
        "total-power" => Ok(DirectivityModeOpt::TotalPower),
        "both" => Ok(DirectivityModeOpt::Both),
        _ => Err("expected pattern-only | total-power | both".to_string()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the harmonic power patterns of a config into a CSV file.
    Pattern {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        analysis: AnalysisFlags,
    },
    /// Print the metrics report (efficiency, directivity, beam stats) as JSON.
    Metrics {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        analysis: AnalysisFlags,
    },
    /// Simulate a scene file end to end and write the link report.
    Simulate {
        /// Scene file.
        #[arg(long)]
        config: PathBuf,
        /// Output prefix: writes <prefix>.json and optionally <prefix>.tmas.
        #[arg(long)]
        out: PathBuf,
        /// Also dump the combiner time series in the binary format.
        #[arg(long)]
        dump_series: bool,
    },
    /// Compare 2..3 configs sharing a geometry side by side.
    Compare {
        /// Config path; repeat two or three times.
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
        /// Optional CSV output path (defaults to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        analysis: AnalysisFlags,
    },
}

fn apply_flags(cfg: &mut RunConfig, flags: &AnalysisFlags) {
    if let Some(step) = flags.angle_step {
        cfg.analysis.angle_step_deg = step;
    }
    if let Some(q) = flags.q_max {
        cfg.analysis.q_max = q;
    }
    if let Some(mode) = flags.directivity_mode {
        cfg.analysis.directivity_mode = mode;
    }
}

fn run(cli: Cli) -> tma::Result<()> {
    match cli.command {
        Command::Pattern {
            config,
            out,
            analysis,
        } => {
            let mut cfg = RunConfig::from_path(&config)?;
            apply_flags(&mut cfg, &analysis);
            let csv = report::pattern_csv(&cfg, analysis.angle_step)?;
            fs::write(&out, csv)?;
        }
        Command::Metrics { config, analysis } => {
            let mut cfg = RunConfig::from_path(&config)?;
            apply_flags(&mut cfg, &analysis);
            let value = report::metrics_report(&cfg)?;
            print!("{}", report::to_json_string(&value));
        }
        Command::Simulate {
            config,
            out,
            dump_series,
        } => {
            let scene = SceneConfig::from_path(&config)?;
            let (value, series) = report::simulate_report(&scene, dump_series)?;
            let json_path = out.with_extension("json");
            fs::write(&json_path, report::to_json_string(&value))?;
            if let Some((fs_rate, series)) = series {
                let mut file = fs::File::create(out.with_extension("tmas"))?;
                write_series(&mut file, fs_rate, &series)?;
            }
        }
        Command::Compare {
            config,
            out,
            analysis,
        } => {
            let mut cfgs = Vec::new();
            for path in &config {
                let mut cfg = RunConfig::from_path(path)?;
                apply_flags(&mut cfg, &analysis);
                cfgs.push(cfg);
            }
            let (table, _) = report::compare(&cfgs)?;
            match out {
                Some(path) => fs::write(&path, table)?,
                None => print!("{table}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // worker count for the parallel sweeps; default to rayon's heuristic
    if let Ok(workers) = std::env::var("TMA_WORKERS") {
        if let Ok(n) = workers.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                TmaError::InvalidArgument(_) | TmaError::Config(_) | TmaError::Io(_) => {
                    ExitCode::from(2)
                }
                TmaError::Numeric(_) => ExitCode::from(3),
            }
        }
    }
}
