//! Signal analysis kernels: framing, FFT/STFT, mel filterbank, DCT-II, MFCCs,
//! the periodized discrete wavelet transform, zero-crossing rate and RMS.

mod dct;
mod features;
mod fft;
mod mel;
mod mfcc;
mod stft;
mod wavelet;

pub use dct::{dct_ii, DctBasis};
pub use features::{
    extract, rms, zcr, FeatureConfig, FeatureExtractor, FeatureMode, FeatureVector,
};
pub use fft::{fft, Fft};
pub use mel::{hz_to_mel, mel_filterbank, mel_to_hz, MelConfig, MelFilterbank};
pub use mfcc::{mfcc, mfcc_summary, MfccExtractor};
pub use stft::{frame_signal, stft, window, StftConfig, StftMatrix, WindowKind};
pub use wavelet::{
    dwt_level, idwt_level, max_levels, wavedec, waverec, wavelet_features, WaveletFamily,
    WaveletSpec, WAVELET_LOG_EPS,
};

pub use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DspError {
    #[error("FFT length {0} is not a power of two")]
    NonPowerOfTwoLength(usize),
    #[error("mel filter {index} is degenerate (no distinct FFT bin support)")]
    DegenerateFilter { index: usize },
    #[error("DWT input length {0} is odd; pad to even length first")]
    OddLength(usize),
    #[error("input of length {len} is shorter than the required {needed}")]
    TooShort { len: usize, needed: usize },
    #[error("{levels} decomposition levels requested, at most {max} possible")]
    TooManyLevels { levels: usize, max: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
