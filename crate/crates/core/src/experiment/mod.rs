//! Experiment harness: config, synthetic corpus and the pipeline commands
//! behind the `serkit` binary.

use std::path::PathBuf;

mod config;
mod pipeline;
mod synth;

pub use config::{ExperimentConfig, ModelKind};
pub use pipeline::{
    cmd_augment, cmd_compare, cmd_extract, cmd_run, cmd_scan, cmd_viz, extract_records, load_clip, plan_split,
    project_mode, scan_corpora, split_hash, train_cell, CellOutcome, ClipSelector, CompareRow, Features,
    SplitPlan, COMPARISON_HEADER,
};
pub use synth::{synth_clip, synth_file_name, write_synthetic_corpus, SynthConfig};

use crate::audio_io::AudioError;
use crate::augment::AugmentError;
use crate::dataset::DatasetError;
use crate::dsp::DspError;
use crate::nn::NnError;
use crate::viz::VizError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Config(String),
    #[error("path does not exist: {}", .0.display())]
    MissingPath(PathBuf),
    #[error("no clip matches {0}")]
    ClipNotFound(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} of {total} comparison cells failed")]
    CellsFailed { failed: usize, total: usize },
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Viz(#[from] VizError),
}

impl HarnessError {
    /// 2 for usage and config problems, 1 for everything that fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::MissingPath(_) => 2,
            _ => 1,
        }
    }
}
