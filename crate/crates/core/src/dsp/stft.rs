use std::f64::consts::PI;

use num_complex::Complex64;

use super::{DspError, Fft};
use crate::audio_io::AudioClip;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Hann,
    Hamming,
}

impl std::str::FromStr for WindowKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hann" => Ok(WindowKind::Hann),
            "hamming" => Ok(WindowKind::Hamming),
            _ => Err(format!("unknown window {s:?}")),
        }
    }
}

/// Periodic (DFT-even) window of length `n`.
pub fn window(kind: WindowKind, n: usize) -> Vec<f64> {
    let (a0, a1) = match kind {
        WindowKind::Hann => (0.5, 0.5),
        WindowKind::Hamming => (0.54, 0.46),
    };
    (0..n)
        .map(|i| a0 - a1 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StftConfig {
    pub n_fft: usize,
    pub hop: usize,
    pub window: WindowKind,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self { n_fft: 1024, hop: 256, window: WindowKind::Hann }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<(), DspError> {
        if self.n_fft == 0 || !self.n_fft.is_power_of_two() {
            return Err(DspError::NonPowerOfTwoLength(self.n_fft));
        }
        if self.hop == 0 || self.hop > self.n_fft {
            return Err(DspError::InvalidConfig(format!(
                "hop {} must be in 1..={}",
                self.hop, self.n_fft
            )));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        self.n_fft / 2 + 1
    }
}

/// Splits `x` into frames of `frame_len` spaced by `hop`.
///
/// Yields `floor((len - frame_len) / hop) + 1` frames when `len >= frame_len`,
/// otherwise a single zero-padded frame. Trailing samples that do not fill a
/// whole frame are dropped.
pub fn frame_signal(x: &[f64], frame_len: usize, hop: usize) -> Vec<Vec<f64>> {
    assert!(frame_len >= 1 && hop >= 1, "frame_len and hop must be positive");
    if x.len() < frame_len {
        let mut f = x.to_vec();
        f.resize(frame_len, 0.0);
        return vec![f];
    }
    let count = (x.len() - frame_len) / hop + 1;
    (0..count).map(|t| x[t * hop..t * hop + frame_len].to_vec()).collect()
}

/// Short-time spectrum: `columns[t][k]` is bin `k` of frame `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StftMatrix {
    pub n_bins: usize,
    pub columns: Vec<Vec<Complex64>>,
}

impl StftMatrix {
    pub fn n_frames(&self) -> usize {
        self.columns.len()
    }

    pub fn power(&self, frame: usize, bin: usize) -> f64 {
        self.columns[frame][bin].norm_sqr()
    }
}

pub(crate) struct StftPlan {
    cfg: StftConfig,
    fft: Fft,
    window: Vec<f64>,
}

impl StftPlan {
    pub(crate) fn new(cfg: StftConfig) -> Result<Self, DspError> {
        cfg.validate()?;
        Ok(Self { cfg, fft: Fft::new(cfg.n_fft)?, window: window(cfg.window, cfg.n_fft) })
    }

    pub(crate) fn run(&self, samples: &[f64]) -> StftMatrix {
        let n_bins = self.cfg.n_bins();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.cfg.n_fft];
        let columns = frame_signal(samples, self.cfg.n_fft, self.cfg.hop)
            .into_iter()
            .map(|frame| {
                for ((b, x), w) in buf.iter_mut().zip(&frame).zip(&self.window) {
                    *b = Complex64::new(x * w, 0.0);
                }
                self.fft.process(&mut buf, false);
                buf[..n_bins].to_vec()
            })
            .collect();
        StftMatrix { n_bins, columns }
    }
}

/// `columns[t] = fft(window * frame_t)[0..=n_fft/2]` over the frames of
/// [`frame_signal`] (no centre padding).
pub fn stft(clip: &AudioClip, cfg: &StftConfig) -> Result<StftMatrix, DspError> {
    if clip.is_empty() {
        return Err(DspError::TooShort { len: 0, needed: 1 });
    }
    Ok(StftPlan::new(*cfg)?.run(&clip.samples))
}
