use super::stft::StftPlan;
use super::{mel_filterbank, DctBasis, DspError, FeatureVector, MelConfig, MelFilterbank, StftConfig};
use crate::audio_io::AudioClip;
use crate::matrix::Matrix;

/// MFCC pipeline with the filterbank, DCT basis and FFT plan built once.
pub struct MfccExtractor {
    plan: StftPlan,
    filterbank: MelFilterbank,
    dct: DctBasis,
    log_floor: f64,
}

impl MfccExtractor {
    pub fn new(stft_cfg: StftConfig, mel_cfg: MelConfig, rate_hz: u32) -> Result<Self, DspError> {
        let plan = StftPlan::new(stft_cfg)?;
        let filterbank = mel_filterbank(&mel_cfg, stft_cfg.n_fft, rate_hz as f64)?;
        let dct = DctBasis::new(mel_cfg.n_mels, mel_cfg.n_mfcc)?;
        Ok(Self { plan, filterbank, dct, log_floor: mel_cfg.log_floor })
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    /// `T x n_mfcc`: power spectrum, mel energies, `ln(max(e, floor))`, DCT-II.
    pub fn compute(&self, samples: &[f64]) -> Matrix {
        let spec = self.plan.run(samples);
        let fb = &self.filterbank.weights;
        let mut out = Matrix::zeros(0, self.dct.n_out());
        let mut power = vec![0.0; spec.n_bins];
        let mut log_mel = vec![0.0; fb.rows()];
        for col in &spec.columns {
            for (p, z) in power.iter_mut().zip(col) {
                *p = z.norm_sqr();
            }
            for (lm, filt) in log_mel.iter_mut().zip(fb.iter_rows()) {
                let e: f64 = filt.iter().zip(&power).map(|(w, p)| w * p).sum();
                *lm = e.max(self.log_floor).ln();
            }
            out.push_row(&self.dct.apply(&log_mel));
        }
        out
    }
}

pub fn mfcc(clip: &AudioClip, stft_cfg: &StftConfig, mel_cfg: &MelConfig) -> Result<Matrix, DspError> {
    if clip.is_empty() {
        return Err(DspError::TooShort { len: 0, needed: 1 });
    }
    Ok(MfccExtractor::new(*stft_cfg, *mel_cfg, clip.sample_rate_hz)?.compute(&clip.samples))
}

/// Per-coefficient temporal mean, named `mfcc_00 .. mfcc_{n-1}`.
pub fn mfcc_summary(m: &Matrix) -> Result<FeatureVector, DspError> {
    if m.rows() == 0 {
        return Err(DspError::TooShort { len: 0, needed: 1 });
    }
    let t = m.rows() as f64;
    let mut values = vec![0.0; m.cols()];
    for row in m.iter_rows() {
        for (acc, v) in values.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in &mut values {
        *v /= t;
    }
    let schema = (0..m.cols()).map(|i| format!("mfcc_{i:02}")).collect();
    Ok(FeatureVector::new(values, schema))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silence_is_the_floor_cepstrum() {
        let clip = AudioClip::new(vec![0.0; 4096], 16000);
        let mel = MelConfig::default();
        let m = mfcc(&clip, &StftConfig::default(), &mel).unwrap();
        let c0 = mel.log_floor.ln() * (mel.n_mels as f64).sqrt();
        for row in m.iter_rows() {
            assert!((row[0] - c0).abs() < 1e-9);
            assert!(row[1..].iter().all(|v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn summary_is_column_mean() {
        let m = Matrix::from_vec(2, 3, vec![1., 2., 3., 3., 4., 7.]);
        let s = mfcc_summary(&m).unwrap();
        assert_eq!(s.values, vec![2., 3., 5.]);
        assert_eq!(s.schema, vec!["mfcc_00", "mfcc_01", "mfcc_02"]);

        let single = Matrix::from_vec(1, 2, vec![0.25, -1.5]);
        assert_eq!(mfcc_summary(&single).unwrap().values, vec![0.25, -1.5]);
        assert!(mfcc_summary(&Matrix::zeros(0, 3)).is_err());
    }
}
