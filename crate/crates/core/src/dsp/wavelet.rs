//! Periodized orthonormal discrete wavelet transform.
//!
//! One analysis level correlates the circularly extended signal with the
//! lowpass and highpass reconstruction filters at even shifts:
//! `a[n] = sum_k rec_lo[k] x[(2n + k) mod N]`, `d[n] = sum_k rec_hi[k] x[(2n + k) mod N]`.
//! This is the same as convolving with the (time-reversed) decomposition
//! filters. The operator is orthonormal, so synthesis is its transpose and
//! energy is conserved band by band.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{DspError, FeatureVector};
use crate::audio_io::AudioClip;

/// Added inside the log of each band energy.
pub const WAVELET_LOG_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletFamily {
    Haar,
    /// Daubechies with four vanishing moments (8 taps).
    Db4,
}

impl std::str::FromStr for WaveletFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "haar" => Ok(WaveletFamily::Haar),
            "db4" => Ok(WaveletFamily::Db4),
            _ => Err(format!("unknown wavelet family {s:?}")),
        }
    }
}

impl WaveletFamily {
    pub fn name(self) -> &'static str {
        match self {
            WaveletFamily::Haar => "haar",
            WaveletFamily::Db4 => "db4",
        }
    }
}

// Scaling filter from minimum-phase spectral factorisation, rounded from 50
// significant digits.
const DB4_REC_LO: [f64; 8] = [
    0.2303778133088965,
    0.7148465705529157,
    0.6308807679298589,
    -0.027983769416859854,
    -0.18703481171909309,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
];

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletSpec {
    pub family: WaveletFamily,
    pub levels: usize,
    pub dec_lo: Vec<f64>,
    pub dec_hi: Vec<f64>,
    pub rec_lo: Vec<f64>,
    pub rec_hi: Vec<f64>,
}

impl WaveletSpec {
    /// `rec_hi[k] = (-1)^k rec_lo[L-1-k]`; decomposition filters are the
    /// time reversals of the reconstruction filters.
    pub fn new(family: WaveletFamily, levels: usize) -> Self {
        let rec_lo: Vec<f64> = match family {
            WaveletFamily::Haar => vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            WaveletFamily::Db4 => DB4_REC_LO.to_vec(),
        };
        let l = rec_lo.len();
        let rec_hi: Vec<f64> = (0..l)
            .map(|k| if k % 2 == 0 { rec_lo[l - 1 - k] } else { -rec_lo[l - 1 - k] })
            .collect();
        let dec_lo = rec_lo.iter().rev().copied().collect();
        let dec_hi = rec_hi.iter().rev().copied().collect();
        Self { family, levels, dec_lo, dec_hi, rec_lo, rec_hi }
    }

    pub fn filter_len(&self) -> usize {
        self.rec_lo.len()
    }

    /// Band names in coefficient order: `a{L}, d{L}, ..., d1`.
    pub fn band_names(&self) -> Vec<String> {
        let mut names = vec![format!("a{}", self.levels)];
        names.extend((1..=self.levels).rev().map(|j| format!("d{j}")));
        names
    }
}

/// One analysis level. Input must be even and at least one filter long.
pub fn dwt_level(x: &[f64], spec: &WaveletSpec) -> Result<(Vec<f64>, Vec<f64>), DspError> {
    let n = x.len();
    if n % 2 != 0 {
        return Err(DspError::OddLength(n));
    }
    if n < spec.filter_len() {
        return Err(DspError::TooShort { len: n, needed: spec.filter_len() });
    }
    let half = n / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for i in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (k, (lo, hi)) in spec.rec_lo.iter().zip(&spec.rec_hi).enumerate() {
            let v = x[(2 * i + k) % n];
            a += lo * v;
            d += hi * v;
        }
        approx[i] = a;
        detail[i] = d;
    }
    Ok((approx, detail))
}

/// Inverse of [`dwt_level`].
pub fn idwt_level(approx: &[f64], detail: &[f64], spec: &WaveletSpec) -> Vec<f64> {
    assert_eq!(approx.len(), detail.len(), "band lengths differ");
    let n = approx.len() * 2;
    let mut x = vec![0.0; n];
    for (i, (a, d)) in approx.iter().zip(detail).enumerate() {
        for (k, (lo, hi)) in spec.rec_lo.iter().zip(&spec.rec_hi).enumerate() {
            x[(2 * i + k) % n] += lo * a + hi * d;
        }
    }
    x
}

/// `floor(log2(len / filter_len)) + 1`, or 0 when the signal is shorter than the filter.
pub fn max_levels(len: usize, filter_len: usize) -> usize {
    if len < filter_len || filter_len == 0 {
        return 0;
    }
    (len / filter_len).ilog2() as usize + 1
}

/// Multilevel decomposition into `[a_L, d_L, ..., d_1]`, after zero-padding
/// `x` to a multiple of `2^L`.
pub fn wavedec(x: &[f64], spec: &WaveletSpec) -> Result<Vec<Vec<f64>>, DspError> {
    let max = max_levels(x.len(), spec.filter_len());
    if spec.levels == 0 || spec.levels > max {
        return Err(DspError::TooManyLevels { levels: spec.levels, max });
    }
    let block = 1usize << spec.levels;
    let mut approx = x.to_vec();
    approx.resize(x.len().div_ceil(block) * block, 0.0);

    let mut details = Vec::with_capacity(spec.levels);
    for _ in 0..spec.levels {
        let (a, d) = dwt_level(&approx, spec)?;
        details.push(d);
        approx = a;
    }
    let mut bands = vec![approx];
    bands.extend(details.into_iter().rev());
    Ok(bands)
}

/// Inverse of [`wavedec`]; returns the padded-length signal.
pub fn waverec(bands: &[Vec<f64>], spec: &WaveletSpec) -> Vec<f64> {
    assert!(!bands.is_empty(), "no bands");
    let mut approx = bands[0].clone();
    for detail in &bands[1..] {
        approx = idwt_level(&approx, detail, spec);
    }
    approx
}

/// Per band `[ln(eps + energy), mean |c|, std(c)]`, `3 (L + 1)` values in
/// band order `a{L}, d{L} .. d1`.
pub fn wavelet_features(clip: &AudioClip, spec: &WaveletSpec) -> Result<FeatureVector, DspError> {
    let bands = wavedec(&clip.samples, spec)?;
    let mut values = Vec::with_capacity(bands.len() * 3);
    let mut schema = Vec::with_capacity(bands.len() * 3);
    for (band, name) in bands.iter().zip(spec.band_names()) {
        let n = band.len() as f64;
        let energy: f64 = band.iter().map(|c| c * c).sum();
        let mean_abs = band.iter().map(|c| c.abs()).sum::<f64>() / n;
        let mean = band.iter().sum::<f64>() / n;
        let var = band.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n;
        values.extend([(WAVELET_LOG_EPS + energy).ln(), mean_abs, var.sqrt()]);
        schema.extend(["loge", "meanabs", "std"].map(|s| format!("dwt_{name}_{s}")));
    }
    Ok(FeatureVector::new(values, schema))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_constant_closed_form() {
        let spec = WaveletSpec::new(WaveletFamily::Haar, 1);
        let (a, d) = dwt_level(&[1.5; 4], &spec).unwrap();
        let s2 = 2f64.sqrt();
        assert!(a.iter().all(|v| (v - 1.5 * s2).abs() < 1e-15));
        assert!(d.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn quadrature_mirror_relation_is_exact() {
        for fam in [WaveletFamily::Haar, WaveletFamily::Db4] {
            let s = WaveletSpec::new(fam, 1);
            let l = s.filter_len();
            for k in 0..l {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(s.rec_hi[k], sign * s.rec_lo[l - 1 - k]);
                assert_eq!(s.dec_lo[k], s.rec_lo[l - 1 - k]);
            }
            assert!((s.rec_lo.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-12, "{fam:?}");
        }
    }

    #[test]
    fn level_preconditions() {
        let spec = WaveletSpec::new(WaveletFamily::Db4, 1);
        assert_eq!(dwt_level(&[0.0; 9], &spec), Err(DspError::OddLength(9)));
        assert_eq!(dwt_level(&[0.0; 6], &spec), Err(DspError::TooShort { len: 6, needed: 8 }));
    }

    #[test]
    fn level_limits() {
        assert_eq!(max_levels(4096, 8), 10);
        assert_eq!(max_levels(7, 8), 0);
        let spec = WaveletSpec::new(WaveletFamily::Db4, 4);
        assert_eq!(wavedec(&[0.0; 40], &spec), Err(DspError::TooManyLevels { levels: 4, max: 3 }));
    }

    #[test]
    fn wavedec_pads_and_counts() {
        let spec = WaveletSpec::new(WaveletFamily::Haar, 3);
        let x: Vec<f64> = (0..37).map(|i| i as f64).collect();
        let bands = wavedec(&x, &spec).unwrap();
        assert_eq!(bands.iter().map(Vec::len).sum::<usize>(), 40);
        assert_eq!(bands.len(), 4);
        let rec = waverec(&bands, &spec);
        for (a, b) in rec.iter().zip(x.iter().chain([0.0; 3].iter())) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn feature_schema_and_silence() {
        let spec = WaveletSpec::new(WaveletFamily::Db4, 5);
        let f = wavelet_features(&AudioClip::new(vec![0.0; 4800], 16000), &spec).unwrap();
        assert_eq!(f.values.len(), 18);
        assert_eq!(&f.schema[..3], &["dwt_a5_loge", "dwt_a5_meanabs", "dwt_a5_std"]);
        assert_eq!(f.schema[17], "dwt_d1_std");
        for chunk in f.values.chunks(3) {
            assert_eq!(chunk, &[WAVELET_LOG_EPS.ln(), 0.0, 0.0]);
        }
    }
}
