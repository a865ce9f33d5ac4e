use super::DspError;
use crate::matrix::Matrix;

/// `m = 2595 log10(1 + f / 700)`.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MelConfig {
    pub n_mels: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    pub n_mfcc: usize,
    /// Floor applied to mel energies before the natural log.
    pub log_floor: f64,
}

impl Default for MelConfig {
    fn default() -> Self {
        Self { n_mels: 40, fmin_hz: 0.0, fmax_hz: 8000.0, n_mfcc: 40, log_floor: 1e-10 }
    }
}

impl MelConfig {
    pub fn validate(&self, rate_hz: f64) -> Result<(), DspError> {
        let bad = |m: String| Err(DspError::InvalidConfig(m));
        if self.n_mels == 0 || self.n_mfcc == 0 || self.n_mfcc > self.n_mels {
            return bad(format!("need 1 <= n_mfcc ({}) <= n_mels ({})", self.n_mfcc, self.n_mels));
        }
        if !(self.fmin_hz >= 0.0 && self.fmin_hz < self.fmax_hz && self.fmax_hz <= rate_hz / 2.0) {
            return bad(format!(
                "need 0 <= fmin ({}) < fmax ({}) <= {}",
                self.fmin_hz,
                self.fmax_hz,
                rate_hz / 2.0
            ));
        }
        if !(self.log_floor > 0.0) {
            return bad("log_floor must be positive".into());
        }
        Ok(())
    }
}

/// Triangular filters (rows) over the `n_fft/2 + 1` FFT bins (columns), with
/// peak weight 1 at each filter's centre frequency.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    pub weights: Matrix,
    pub centers_hz: Vec<f64>,
}

/// Builds `n_mels` triangles whose edges and centres are `n_mels + 2` points
/// equally spaced on the mel scale between `fmin` and `fmax`.
///
/// Fails with [`DspError::DegenerateFilter`] when two adjacent centres fall on
/// the same nearest FFT bin or a filter covers no bin at all.
pub fn mel_filterbank(cfg: &MelConfig, n_fft: usize, rate_hz: f64) -> Result<MelFilterbank, DspError> {
    cfg.validate(rate_hz)?;
    if n_fft < 2 {
        return Err(DspError::InvalidConfig("n_fft must be at least 2".into()));
    }
    let n_bins = n_fft / 2 + 1;
    let (mlo, mhi) = (hz_to_mel(cfg.fmin_hz), hz_to_mel(cfg.fmax_hz));
    let step = (mhi - mlo) / (cfg.n_mels + 1) as f64;
    let edges: Vec<f64> = (0..cfg.n_mels + 2).map(|i| mel_to_hz(mlo + step * i as f64)).collect();
    let bin_hz = rate_hz / n_fft as f64;

    let mut weights = Matrix::zeros(cfg.n_mels, n_bins);
    for m in 0..cfg.n_mels {
        let (left, center, right) = (edges[m], edges[m + 1], edges[m + 2]);
        if m > 0 && (edges[m] / bin_hz).round() == (center / bin_hz).round() {
            return Err(DspError::DegenerateFilter { index: m });
        }
        let row = weights.row_mut(m);
        for (k, w) in row.iter_mut().enumerate() {
            let f = k as f64 * bin_hz;
            let rise = (f - left) / (center - left);
            let fall = (right - f) / (right - center);
            *w = rise.min(fall).max(0.0);
        }
        if row.iter().all(|&w| w <= 0.0) {
            return Err(DspError::DegenerateFilter { index: m });
        }
    }
    Ok(MelFilterbank { weights, centers_hz: edges[1..=cfg.n_mels].to_vec() })
}
