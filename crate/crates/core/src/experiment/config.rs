use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::audio_io::Corpus;
use crate::augment::AugmentPlan;
use crate::dataset::SplitSpec;
use crate::dsp::{FeatureConfig, FeatureMode, MelConfig, StftConfig, WaveletFamily, WaveletSpec, WindowKind};
use crate::nn::{AdamConfig, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cnn,
    Lstm,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Cnn => "cnn",
            ModelKind::Lstm => "lstm",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything a run depends on. Parsed from TOML with unknown keys rejected;
/// relative roots resolve against the config file's directory and are
/// stored absolute, so a written-out config replays from anywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub cremad_root: Option<PathBuf>,
    pub ravdess_root: Option<PathBuf>,
    pub savee_root: Option<PathBuf>,
    pub tess_root: Option<PathBuf>,

    pub sample_rate_hz: u32,
    pub clip_seconds: f64,

    pub augment: bool,
    pub noise_rate: f64,
    pub stretch_rates: Vec<f64>,
    pub pitch_semitones: Vec<f64>,

    pub feature_mode: FeatureMode,
    pub model: ModelKind,
    pub compare_modes: Vec<FeatureMode>,
    pub compare_models: Vec<ModelKind>,

    pub n_fft: usize,
    pub hop: usize,
    pub window: WindowKind,
    pub n_mels: usize,
    pub n_mfcc: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    pub log_floor: f64,
    pub wavelet: WaveletFamily,
    pub wavelet_levels: usize,

    pub test_fraction: f64,
    pub shuffle: bool,

    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,

    pub augment_seed: u64,
    pub init_seed: u64,
    pub shuffle_seed: u64,
    pub dropout_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let plan = AugmentPlan::default();
        let (stft, mel) = (StftConfig::default(), MelConfig::default());
        Self {
            cremad_root: None,
            ravdess_root: None,
            savee_root: None,
            tess_root: None,
            sample_rate_hz: crate::audio_io::PIPELINE_RATE_HZ,
            clip_seconds: crate::audio_io::CLIP_SECONDS,
            augment: true,
            noise_rate: plan.noise_rate,
            stretch_rates: plan.stretch_rates,
            pitch_semitones: plan.pitch_semitones,
            feature_mode: FeatureMode::Mfcc,
            model: ModelKind::Cnn,
            compare_modes: FeatureMode::ALL.to_vec(),
            compare_models: vec![ModelKind::Cnn, ModelKind::Lstm],
            n_fft: stft.n_fft,
            hop: stft.hop,
            window: stft.window,
            n_mels: mel.n_mels,
            n_mfcc: mel.n_mfcc,
            fmin_hz: mel.fmin_hz,
            fmax_hz: mel.fmax_hz,
            log_floor: mel.log_floor,
            wavelet: WaveletFamily::Db4,
            wavelet_levels: 5,
            test_fraction: 0.25,
            shuffle: true,
            epochs: 50,
            batch_size: 64,
            learning_rate: AdamConfig::default().lr,
            augment_seed: 0,
            init_seed: 0,
            shuffle_seed: 0,
            dropout_seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// Parses, rebases relative roots onto the file's directory and validates.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for root in cfg.roots_mut() {
            if let Some(p) = root.as_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
                if let Ok(abs) = std::fs::canonicalize(&*p) {
                    *p = abs;
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses without touching the filesystem.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(format!("config: {}", e.message())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    fn roots_mut(&mut self) -> [&mut Option<PathBuf>; 4] {
        [&mut self.cremad_root, &mut self.ravdess_root, &mut self.savee_root, &mut self.tess_root]
    }

    /// Enabled corpora in fixed order.
    pub fn roots(&self) -> Vec<(Corpus, &Path)> {
        [&self.cremad_root, &self.ravdess_root, &self.savee_root, &self.tess_root]
            .into_iter()
            .zip(Corpus::ALL)
            .filter_map(|(r, c)| r.as_deref().map(|p| (c, p)))
            .collect()
    }

    /// `key=value` for one of the four seeds: `augment`, `init`, `shuffle`, `dropout`.
    pub fn apply_seed_override(&mut self, kv: &str) -> Result<(), HarnessError> {
        let bad = || HarnessError::Config(format!("bad seed override {kv:?}; expected <augment|init|shuffle|dropout>=<u64>"));
        let (k, v) = kv.split_once('=').ok_or_else(bad)?;
        let v: u64 = v.trim().parse().map_err(|_| bad())?;
        let slot = match k.trim().trim_end_matches("_seed") {
            "augment" => &mut self.augment_seed,
            "init" => &mut self.init_seed,
            "shuffle" => &mut self.shuffle_seed,
            "dropout" => &mut self.dropout_seed,
            _ => return Err(bad()),
        };
        *slot = v;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let roots = self.roots();
        if roots.is_empty() {
            return Err(HarnessError::Config("no dataset root configured".into()));
        }
        for (_, p) in &roots {
            if !p.is_dir() {
                return Err(HarnessError::MissingPath(p.to_path_buf()));
            }
        }
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.sample_rate_hz == 0 {
            return bad("sample_rate_hz must be positive".into());
        }
        if !(self.clip_seconds > 0.0 && self.clip_seconds.is_finite()) {
            return bad(format!("clip_seconds {} must be positive", self.clip_seconds));
        }
        self.augment_plan().validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        let fc = self.feature_config();
        fc.stft.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        fc.mel.validate(self.sample_rate_hz as f64).map_err(|e| HarnessError::Config(e.to_string()))?;
        let clip_len = (self.clip_seconds * self.sample_rate_hz as f64).round() as usize;
        if clip_len < self.n_fft {
            return bad(format!("clip of {clip_len} samples is shorter than n_fft {}", self.n_fft));
        }
        if self.wavelet_levels == 0 || self.wavelet_levels > crate::dsp::max_levels(clip_len, fc.wavelet.filter_len()) {
            return bad(format!("wavelet_levels {} not possible for {clip_len} samples", self.wavelet_levels));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test_fraction {} must be in (0, 1)", self.test_fraction));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate {} must be positive", self.learning_rate));
        }
        if self.compare_modes.is_empty() || self.compare_models.is_empty() {
            return bad("compare_modes and compare_models must be non-empty".into());
        }
        Ok(())
    }

    pub fn augment_plan(&self) -> AugmentPlan {
        if !self.augment {
            return AugmentPlan::disabled(self.augment_seed);
        }
        AugmentPlan {
            noise_rate: self.noise_rate,
            stretch_rates: self.stretch_rates.clone(),
            pitch_semitones: self.pitch_semitones.clone(),
            seed: self.augment_seed,
        }
    }

    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            stft: StftConfig { n_fft: self.n_fft, hop: self.hop, window: self.window },
            mel: MelConfig {
                n_mels: self.n_mels,
                fmin_hz: self.fmin_hz,
                fmax_hz: self.fmax_hz,
                n_mfcc: self.n_mfcc,
                log_floor: self.log_floor,
            },
            wavelet: WaveletSpec::new(self.wavelet, self.wavelet_levels),
        }
    }

    /// The split is driven by the shuffle seed; epoch shuffles use streams
    /// derived from it, so the two never coincide.
    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec { test_fraction: self.test_fraction, seed: self.shuffle_seed, shuffle: self.shuffle }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            shuffle_seed: self.shuffle_seed,
            dropout_seed: self.dropout_seed,
            adam: AdamConfig { lr: self.learning_rate, ..AdamConfig::default() },
        }
    }
}
