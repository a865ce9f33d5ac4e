use super::{
    frame_signal, mfcc_summary, wavelet_features, DspError, MelConfig, MfccExtractor, StftConfig,
    WaveletFamily, WaveletSpec,
};
use crate::audio_io::AudioClip;
use crate::matrix::Matrix;

/// Named real feature values for one clip.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema: Vec<String>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, schema: Vec<String>) -> Self {
        assert_eq!(values.len(), schema.len(), "values and schema differ in length");
        Self { values, schema }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn extend(&mut self, other: FeatureVector) {
        for (v, name) in other.values.into_iter().zip(other.schema) {
            if !self.schema.contains(&name) {
                self.values.push(v);
                self.schema.push(name);
            }
        }
    }
}

/// Fraction of adjacent sample pairs whose signs differ, per frame. Zero counts as positive.
pub fn zcr(frames: &[Vec<f64>]) -> Vec<f64> {
    frames
        .iter()
        .map(|f| {
            assert!(f.len() >= 2, "zero-crossing rate needs frames of at least 2 samples");
            let changes = f.windows(2).filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0)).count();
            changes as f64 / (f.len() - 1) as f64
        })
        .collect()
}

/// Root mean square per frame.
pub fn rms(frames: &[Vec<f64>]) -> Vec<f64> {
    frames
        .iter()
        .map(|f| {
            assert!(!f.is_empty(), "rms of an empty frame");
            (f.iter().map(|v| v * v).sum::<f64>() / f.len() as f64).sqrt()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    Mfcc,
    Wavelet,
    Combined,
}

impl FeatureMode {
    pub const ALL: [FeatureMode; 3] = [FeatureMode::Mfcc, FeatureMode::Wavelet, FeatureMode::Combined];

    pub fn name(self) -> &'static str {
        match self {
            FeatureMode::Mfcc => "mfcc",
            FeatureMode::Wavelet => "wavelet",
            FeatureMode::Combined => "combined",
        }
    }
}

impl std::fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FeatureMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown feature mode {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub stft: StftConfig,
    pub mel: MelConfig,
    pub wavelet: WaveletSpec,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            stft: StftConfig::default(),
            mel: MelConfig::default(),
            wavelet: WaveletSpec::new(WaveletFamily::Db4, 5),
        }
    }
}

/// Reusable extractor for one sample rate; shareable across threads.
pub struct FeatureExtractor {
    cfg: FeatureConfig,
    mfcc: MfccExtractor,
}

impl FeatureExtractor {
    pub fn new(cfg: FeatureConfig, rate_hz: u32) -> Result<Self, DspError> {
        let mfcc = MfccExtractor::new(cfg.stft, cfg.mel, rate_hz)?;
        Ok(Self { cfg, mfcc })
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.cfg
    }

    /// MFCC frame sequence, `T x n_mfcc`.
    pub fn mfcc_frames(&self, clip: &AudioClip) -> Matrix {
        self.mfcc.compute(&clip.samples)
    }

    fn time_domain(&self, clip: &AudioClip) -> FeatureVector {
        let frames = frame_signal(&clip.samples, self.cfg.stft.n_fft, self.cfg.stft.hop);
        let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        FeatureVector::new(
            vec![mean(zcr(&frames)), mean(rms(&frames))],
            vec!["zcr".into(), "rms".into()],
        )
    }

    /// `mfcc`: `mfcc_*, zcr, rms`; `wavelet`: `dwt_*, zcr, rms`; `combined`:
    /// the mfcc schema followed by the wavelet schema, without repeating
    /// `zcr`/`rms`.
    pub fn extract(&self, clip: &AudioClip, mode: FeatureMode) -> Result<FeatureVector, DspError> {
        if clip.samples.len() < 2 {
            return Err(DspError::TooShort { len: clip.samples.len(), needed: 2 });
        }
        let mfcc_part = || -> Result<FeatureVector, DspError> {
            let mut v = mfcc_summary(&self.mfcc_frames(clip))?;
            v.extend(self.time_domain(clip));
            Ok(v)
        };
        let wavelet_part = || -> Result<FeatureVector, DspError> {
            let mut v = wavelet_features(clip, &self.cfg.wavelet)?;
            v.extend(self.time_domain(clip));
            Ok(v)
        };
        match mode {
            FeatureMode::Mfcc => mfcc_part(),
            FeatureMode::Wavelet => wavelet_part(),
            FeatureMode::Combined => {
                let mut v = mfcc_part()?;
                v.extend(wavelet_part()?);
                Ok(v)
            }
        }
    }
}

pub fn extract(clip: &AudioClip, mode: FeatureMode, cfg: &FeatureConfig) -> Result<FeatureVector, DspError> {
    FeatureExtractor::new(cfg.clone(), clip.sample_rate_hz)?.extract(clip, mode)
}
