//! Audio decoding, resampling and corpus scanning.
//!
//! Clips are carried as `f64` mono samples in `[-1, 1]`. The four supported
//! corpora (CREMA-D, RAVDESS, SAVEE, TESS) each encode the emotion label in
//! their file names; [`scan_dataset`] maps those codes onto the shared
//! eight-label [`Emotion`] set.

mod manifest;
mod resample;
mod scan;
mod wav;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub use manifest::{read_manifest, write_manifest, MANIFEST_HEADER};
pub use resample::{resample, resample_ratio, Resampler, SINC_ZERO_CROSSINGS};
pub use scan::{parse_label, scan_dataset, ScanReport, SkippedFile};
pub use wav::{encode_wav, parse_wav, read_wav, write_wav, WavEncoding};

/// Sample rate every clip is converted to before analysis.
pub const PIPELINE_RATE_HZ: u32 = 16_000;
/// Fixed analysis length applied after resampling.
pub const CLIP_SECONDS: f64 = 3.0;

#[derive(Debug, thiserror::Error)]
pub enum AudioError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed WAV container: {0}")]
    MalformedContainer(String),
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("WAV file has zero frames")]
    EmptyAudio,
    #[error("{path}: unknown label code {code:?}")]
    UnknownLabelCode { path: PathBuf, code: String },
    #[error("no usable clips found under {0}")]
    EmptyScan(PathBuf),
    #[error("sample rate must be positive")]
    InvalidRate,
    #[error("bad manifest: {0}")]
    BadManifest(String),
}

impl AudioError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AudioError::Io { path: path.into(), source }
    }
}

/// A mono clip with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate_hz: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Self {
        Self { samples, sample_rate_hz }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Truncates or zero-pads to `round(seconds * rate)` samples, keeping the start.
    pub fn fix_length(mut self, seconds: f64) -> Self {
        let n = (seconds * self.sample_rate_hz as f64).round() as usize;
        self.samples.resize(n, 0.0);
        self
    }
}

/// The eight canonical emotion labels, in canonical (one-hot) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Emotion {
    Neutral,
    Calm,
    Happy,
    Sad,
    Angry,
    Fear,
    Disgust,
    Surprise,
}

impl Emotion {
    pub const COUNT: usize = 8;
    pub const ALL: [Emotion; 8] = [
        Emotion::Neutral,
        Emotion::Calm,
        Emotion::Happy,
        Emotion::Sad,
        Emotion::Angry,
        Emotion::Fear,
        Emotion::Disgust,
        Emotion::Surprise,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Emotion> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Neutral => "neutral",
            Emotion::Calm => "calm",
            Emotion::Happy => "happy",
            Emotion::Sad => "sad",
            Emotion::Angry => "angry",
            Emotion::Fear => "fear",
            Emotion::Disgust => "disgust",
            Emotion::Surprise => "surprise",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown emotion {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corpus {
    Cremad,
    Ravdess,
    Savee,
    Tess,
}

impl Corpus {
    pub const ALL: [Corpus; 4] = [Corpus::Cremad, Corpus::Ravdess, Corpus::Savee, Corpus::Tess];

    pub fn name(self) -> &'static str {
        match self {
            Corpus::Cremad => "cremad",
            Corpus::Ravdess => "ravdess",
            Corpus::Savee => "savee",
            Corpus::Tess => "tess",
        }
    }
}

impl fmt::Display for Corpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Corpus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Corpus::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown dataset {s:?}"))
    }
}

/// Where a record's audio comes from: the file itself, or the file passed
/// through one augmentation transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Original,
    Noise { rate: f64, seed: u64 },
    Stretch { rate: f64 },
    Pitch { semitones: f64 },
}

impl Provenance {
    pub fn is_original(&self) -> bool {
        matches!(self, Provenance::Original)
    }
}

/// Tags are comma-free and filesystem-safe: `original`, `noise_r0.035_s42`,
/// `stretch_r0.8`, `pitch_st+2`.
impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Original => f.write_str("original"),
            Provenance::Noise { rate, seed } => write!(f, "noise_r{rate}_s{seed}"),
            Provenance::Stretch { rate } => write!(f, "stretch_r{rate}"),
            Provenance::Pitch { semitones } => write!(f, "pitch_st{semitones:+}"),
        }
    }
}

impl FromStr for Provenance {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad provenance tag {s:?}");
        if s == "original" {
            return Ok(Provenance::Original);
        }
        if let Some(rest) = s.strip_prefix("noise_r") {
            let (rate, seed) = rest.split_once("_s").ok_or_else(bad)?;
            return Ok(Provenance::Noise {
                rate: rate.parse().map_err(|_| bad())?,
                seed: seed.parse().map_err(|_| bad())?,
            });
        }
        if let Some(rate) = s.strip_prefix("stretch_r") {
            return Ok(Provenance::Stretch { rate: rate.parse().map_err(|_| bad())? });
        }
        if let Some(st) = s.strip_prefix("pitch_st") {
            return Ok(Provenance::Pitch { semitones: st.parse().map_err(|_| bad())? });
        }
        Err(bad())
    }
}

/// One labeled clip, possibly a virtual augmentation of a file on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipRecord {
    pub path: PathBuf,
    pub dataset: Corpus,
    pub emotion: Emotion,
    pub speaker: Option<String>,
    pub provenance: Provenance,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn provenance_tags_round_trip() {
        for p in [
            Provenance::Original,
            Provenance::Noise { rate: 0.035, seed: 17 },
            Provenance::Stretch { rate: 0.8 },
            Provenance::Pitch { semitones: -2.0 },
            Provenance::Pitch { semitones: 2.5 },
        ] {
            let tag = p.to_string();
            assert!(!tag.contains(','));
            assert_eq!(tag.parse::<Provenance>().unwrap(), p);
        }
        assert_eq!(Provenance::Pitch { semitones: 2.0 }.to_string(), "pitch_st+2");
    }

    #[test]
    fn emotion_order_is_canonical() {
        assert_eq!(Emotion::Angry.index(), 4);
        for (i, e) in Emotion::ALL.iter().enumerate() {
            assert_eq!(e.index(), i);
            assert_eq!(e.name().parse::<Emotion>().unwrap(), *e);
        }
    }

    #[test]
    fn fix_length_pads_and_truncates() {
        let c = AudioClip::new(vec![1.0; 10], 4);
        assert_eq!(c.clone().fix_length(1.0).samples, vec![1.0; 4]);
        let padded = c.fix_length(3.0).samples;
        assert_eq!(padded.len(), 12);
        assert_eq!(&padded[10..], &[0.0, 0.0]);
    }
}
