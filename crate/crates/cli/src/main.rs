use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serkit::audio_io::Emotion;
use serkit::experiment::{self, ClipSelector, ExperimentConfig, HarnessError, SynthConfig};

/// Speech emotion recognition experiments.
#[derive(Parser, Debug)]
#[command(name = "serkit", version)]
struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "serkit-out")]
    out: PathBuf,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Replace one seed, e.g. `dropout=3`. Repeatable.
    #[arg(long = "seed-override", global = true, value_name = "K=V")]
    seed_override: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scan the corpora: manifest.csv and histogram.csv.
    Scan,
    /// Split and plan augmentation; optionally render the augmented clips.
    Augment {
        #[arg(long, value_name = "DIR")]
        dump_augmented: Option<PathBuf>,
    },
    /// Extract features.csv in the configured feature mode.
    Extract,
    /// Full pipeline for the configured feature mode and model.
    Run,
    /// Feature mode x model grid on one shared split.
    Compare,
    /// Waveform and spectrogram exports for one clip.
    Viz {
        #[arg(long)]
        emotion: Option<Emotion>,
        /// Suffix of the clip path.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Decimate the waveform to at most this many points.
        #[arg(long)]
        max_points: Option<usize>,
    },
    /// Write the synthetic 8-class corpus (RAVDESS naming) into --out.
    Synth {
        #[arg(long, default_value_t = 20)]
        clips_per_class: usize,
        #[arg(long, default_value_t = 3.0)]
        seconds: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let path = cli.config.as_deref().ok_or_else(|| HarnessError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    for kv in &cli.seed_override {
        cfg.apply_seed_override(kv)?;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring worker threads")?;
    }
    let out: &Path = &cli.out;
    if let Command::Synth { clips_per_class, seconds, seed } = cli.command {
        let cfg = SynthConfig { clips_per_class, seconds, seed, ..SynthConfig::default() };
        let files = experiment::write_synthetic_corpus(out, &cfg)?;
        println!("wrote {} clips under {}", files.len(), out.display());
        return Ok(());
    }
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Scan => {
            experiment::cmd_scan(&cfg, out)?;
        }
        Command::Augment { dump_augmented } => {
            experiment::cmd_augment(&cfg, out, dump_augmented.as_deref())?;
        }
        Command::Extract => {
            experiment::cmd_extract(&cfg, out)?;
        }
        Command::Run => {
            experiment::cmd_run(&cfg, out)?;
        }
        Command::Compare => {
            experiment::cmd_compare(&cfg, out)?;
        }
        Command::Viz { emotion, path, max_points } => {
            let selector = ClipSelector { emotion: *emotion, path: path.clone() };
            experiment::cmd_viz(&cfg, out, &selector, *max_points)?;
        }
        Command::Synth { .. } => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<HarnessError>().map_or(1, HarnessError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
