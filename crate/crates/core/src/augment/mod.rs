//! Label-preserving augmentation: noise injection, time stretching and pitch
//! shifting.
//!
//! Augmented records are virtual: [`expand`] only produces records whose
//! provenance names the transform, and [`apply`] renders the audio on demand.

mod vocoder;

use crate::audio_io::{resample_ratio, AudioClip, ClipRecord, Provenance};
use crate::rng::{derive_seed, Xoshiro256};

pub use vocoder::{VOCODER_HOP, VOCODER_WINDOW};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AugmentError {
    #[error("clip of {len} samples is shorter than the {needed}-sample analysis window")]
    ClipTooShort { len: usize, needed: usize },
    #[error("invalid augmentation parameter: {0}")]
    InvalidParameter(String),
}

/// Which transforms to apply and with what parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentPlan {
    /// Noise standard deviation as a fraction of the clip peak; 0 disables noise.
    pub noise_rate: f64,
    pub stretch_rates: Vec<f64>,
    pub pitch_semitones: Vec<f64>,
    pub seed: u64,
}

impl Default for AugmentPlan {
    fn default() -> Self {
        Self {
            noise_rate: 0.035,
            stretch_rates: vec![0.8, 1.2],
            pitch_semitones: vec![-2.0, 2.0],
            seed: 0,
        }
    }
}

impl AugmentPlan {
    /// No transforms enabled.
    pub fn disabled(seed: u64) -> Self {
        Self { noise_rate: 0.0, stretch_rates: vec![], pitch_semitones: vec![], seed }
    }

    pub fn validate(&self) -> Result<(), AugmentError> {
        if !(self.noise_rate >= 0.0 && self.noise_rate.is_finite()) {
            return Err(AugmentError::InvalidParameter(format!("noise rate {}", self.noise_rate)));
        }
        if let Some(r) = self.stretch_rates.iter().find(|r| !(**r > 0.5 && **r < 2.0)) {
            return Err(AugmentError::InvalidParameter(format!("stretch rate {r} outside (0.5, 2)")));
        }
        if let Some(s) = self.pitch_semitones.iter().find(|s| !(s.abs() <= 12.0)) {
            return Err(AugmentError::InvalidParameter(format!("pitch shift {s} outside [-12, 12]")));
        }
        Ok(())
    }

    /// Number of augmented variants produced per original.
    pub fn variants_per_clip(&self) -> usize {
        usize::from(self.noise_rate > 0.0) + self.stretch_rates.len() + self.pitch_semitones.len()
    }
}

/// `out[i] = x[i] + rate * max|x| * g[i]` with `g` i.i.d. standard normal
/// from a generator seeded with `seed`.
pub fn add_noise(clip: &AudioClip, rate: f64, seed: u64) -> Result<AudioClip, AugmentError> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(AugmentError::InvalidParameter(format!("noise rate {rate}")));
    }
    if rate == 0.0 {
        return Ok(clip.clone());
    }
    let amp = rate * clip.peak();
    let mut rng = Xoshiro256::new(seed);
    let samples = clip.samples.iter().map(|x| x + amp * rng.normal()).collect();
    Ok(AudioClip::new(samples, clip.sample_rate_hz))
}

/// Phase-vocoder time stretch; output duration is `round(len / rate)` samples
/// and pitch is unchanged. `rate` must lie in `[0.5, 2.0]`.
pub fn time_stretch(clip: &AudioClip, rate: f64) -> Result<AudioClip, AugmentError> {
    if !(0.5..=2.0).contains(&rate) {
        return Err(AugmentError::InvalidParameter(format!("stretch rate {rate} outside [0.5, 2]")));
    }
    if clip.len() < VOCODER_WINDOW {
        return Err(AugmentError::ClipTooShort { len: clip.len(), needed: VOCODER_WINDOW });
    }
    Ok(AudioClip::new(vocoder::stretch(&clip.samples, rate), clip.sample_rate_hz))
}

/// Shifts pitch by `semitones` keeping duration: stretch to `f` times the
/// duration (`f = 2^(semitones/12)`), then resample by `1/f`.
pub fn pitch_shift(clip: &AudioClip, semitones: f64) -> Result<AudioClip, AugmentError> {
    if !(semitones.abs() <= 12.0) {
        return Err(AugmentError::InvalidParameter(format!("pitch shift {semitones} outside [-12, 12]")));
    }
    if clip.len() < VOCODER_WINDOW {
        return Err(AugmentError::ClipTooShort { len: clip.len(), needed: VOCODER_WINDOW });
    }
    if semitones == 0.0 {
        return Ok(clip.clone());
    }
    let factor = 2f64.powf(semitones / 12.0);
    let stretched = vocoder::stretch(&clip.samples, 1.0 / factor);
    let mut samples = resample_ratio(&stretched, 1.0 / factor);
    samples.resize(clip.len(), 0.0);
    Ok(AudioClip::new(samples, clip.sample_rate_hz))
}

/// Renders the audio a record's provenance describes from its source clip.
pub fn apply(clip: &AudioClip, provenance: &Provenance) -> Result<AudioClip, AugmentError> {
    match *provenance {
        Provenance::Original => Ok(clip.clone()),
        Provenance::Noise { rate, seed } => add_noise(clip, rate, seed),
        Provenance::Stretch { rate } => time_stretch(clip, rate),
        Provenance::Pitch { semitones } => pitch_shift(clip, semitones),
    }
}

/// Each original record followed by its augmented variants (noise, then each
/// stretch rate, then each pitch shift). The noise seed of the `i`-th input
/// record is `derive_seed(plan.seed, i)`, independent of processing order.
/// Records that are already augmented pass through unchanged.
pub fn expand(records: &[ClipRecord], plan: &AugmentPlan) -> Vec<ClipRecord> {
    let mut out = Vec::with_capacity(records.len() * (1 + plan.variants_per_clip()));
    for (i, rec) in records.iter().enumerate() {
        out.push(rec.clone());
        if !rec.provenance.is_original() {
            continue;
        }
        let variant = |provenance| ClipRecord { provenance, ..rec.clone() };
        if plan.noise_rate > 0.0 {
            out.push(variant(Provenance::Noise {
                rate: plan.noise_rate,
                seed: derive_seed(plan.seed, i as u64),
            }));
        }
        out.extend(plan.stretch_rates.iter().map(|&rate| variant(Provenance::Stretch { rate })));
        out.extend(plan.pitch_semitones.iter().map(|&semitones| variant(Provenance::Pitch { semitones })));
    }
    out
}

/// File name for a dumped augmented clip: `<stem>__<provenance>.wav`.
pub fn augmented_file_name(record: &ClipRecord) -> String {
    let stem = record.path.file_stem().and_then(|s| s.to_str()).unwrap_or("clip");
    format!("{stem}__{}.wav", record.provenance)
}
