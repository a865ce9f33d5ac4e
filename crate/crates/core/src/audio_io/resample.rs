//! Band-limited sample-rate conversion by Hann-windowed sinc interpolation.
//!
//! Output sample `m` sits at source position `t = m * in / out`. Its value is
//! `sum_k x[k] h(t - k)` with `h(d) = fc * sinc(fc * d) * hann(d / half_width)`,
//! `fc = min(1, out / in)` and `half_width = SINC_ZERO_CROSSINGS / fc`. Each
//! output is divided by the sum of the weights it used, so DC passes exactly,
//! including next to the clip edges where the kernel is cut off.

use std::f64::consts::PI;

use super::{AudioClip, AudioError};

/// Zero crossings of the sinc kernel kept on each side of the centre tap.
pub const SINC_ZERO_CROSSINGS: usize = 32;

/// Largest number of polyphase branches cached before falling back to
/// evaluating the kernel per output sample.
const MAX_CACHED_PHASES: u64 = 16_384;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

#[derive(Debug, Clone, Copy)]
struct Kernel {
    cutoff: f64,
    half_width: f64,
    /// Taps reach from `-reach` to `reach + 1` around the integer part of `t`.
    reach: i64,
}

impl Kernel {
    fn new(ratio: f64) -> Self {
        let cutoff = ratio.min(1.0);
        let half_width = SINC_ZERO_CROSSINGS as f64 / cutoff;
        Self { cutoff, half_width, reach: half_width.ceil() as i64 }
    }

    fn weight(&self, d: f64) -> f64 {
        let u = d / self.half_width;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        let window = 0.5 + 0.5 * (PI * u).cos();
        self.cutoff * sinc(self.cutoff * d) * window
    }

    fn taps(&self, frac: f64) -> Vec<f64> {
        (-self.reach..=self.reach + 1).map(|j| self.weight(frac - j as f64)).collect()
    }
}

/// Applies precomputed (or freshly computed) taps at integer base `n`.
fn interpolate(x: &[f64], n: i64, taps: &[f64], reach: i64) -> f64 {
    let len = x.len() as i64;
    let first = n - reach;
    let lo = first.max(0);
    let hi = (n + reach + 1).min(len - 1);
    let mut acc = 0.0;
    let mut norm = 0.0;
    for k in lo..=hi {
        let w = taps[(k - first) as usize];
        acc += w * x[k as usize];
        norm += w;
    }
    if norm.abs() < 1e-12 {
        0.0
    } else {
        acc / norm
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rational-ratio resampler with a cached polyphase tap table.
#[derive(Debug, Clone)]
pub struct Resampler {
    up: u64,
    down: u64,
    kernel: Kernel,
    phases: Option<Vec<Vec<f64>>>,
}

impl Resampler {
    pub fn new(in_rate: u32, out_rate: u32) -> Result<Self, AudioError> {
        if in_rate == 0 || out_rate == 0 {
            return Err(AudioError::InvalidRate);
        }
        let g = gcd(in_rate as u64, out_rate as u64);
        let (up, down) = (out_rate as u64 / g, in_rate as u64 / g);
        let kernel = Kernel::new(out_rate as f64 / in_rate as f64);
        let phases = (up <= MAX_CACHED_PHASES)
            .then(|| (0..up).map(|p| kernel.taps(p as f64 / up as f64)).collect());
        Ok(Self { up, down, kernel, phases })
    }

    /// Output length for an input of `len` samples: `round(len * out / in)`.
    pub fn output_len(&self, len: usize) -> usize {
        let (num, den) = (len as u128 * self.up as u128, self.down as u128);
        ((2 * num + den) / (2 * den)) as usize
    }

    pub fn process(&self, x: &[f64]) -> Vec<f64> {
        if self.up == self.down {
            return x.to_vec();
        }
        if x.is_empty() {
            return Vec::new();
        }
        (0..self.output_len(x.len()) as u64)
            .map(|m| {
                let num = m * self.down;
                let n = (num / self.up) as i64;
                let phase = num % self.up;
                match &self.phases {
                    Some(table) => interpolate(x, n, &table[phase as usize], self.kernel.reach),
                    None => {
                        let taps = self.kernel.taps(phase as f64 / self.up as f64);
                        interpolate(x, n, &taps, self.kernel.reach)
                    }
                }
            })
            .collect()
    }
}

pub fn resample(clip: &AudioClip, target_hz: u32) -> Result<AudioClip, AudioError> {
    if target_hz == 0 || clip.sample_rate_hz == 0 {
        return Err(AudioError::InvalidRate);
    }
    if target_hz == clip.sample_rate_hz {
        return Ok(clip.clone());
    }
    let r = Resampler::new(clip.sample_rate_hz, target_hz)?;
    Ok(AudioClip::new(r.process(&clip.samples), target_hz))
}

/// Resamples by an arbitrary positive ratio `out_len / in_len`, producing
/// `round(len * ratio)` samples.
pub fn resample_ratio(x: &[f64], ratio: f64) -> Vec<f64> {
    assert!(ratio > 0.0 && ratio.is_finite(), "ratio must be positive");
    if x.is_empty() {
        return Vec::new();
    }
    let kernel = Kernel::new(ratio);
    let out_len = (x.len() as f64 * ratio).round() as usize;
    (0..out_len)
        .map(|m| {
            let t = m as f64 / ratio;
            let n = t.floor();
            let taps = kernel.taps(t - n);
            interpolate(x, n as i64, &taps, kernel.reach)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rate_is_exact() {
        let clip = AudioClip::new(vec![0.1, -0.2, 0.3], 16000);
        assert_eq!(resample(&clip, 16000).unwrap(), clip);
    }

    #[test]
    fn lengths_follow_rounding_rule() {
        let r = Resampler::new(48000, 16000).unwrap();
        assert_eq!(r.output_len(48000), 16000);
        assert_eq!(r.output_len(10), 3);
        let r = Resampler::new(44100, 16000).unwrap();
        assert_eq!(r.output_len(44100), 16000);
        assert_eq!(r.output_len(100), 36);
    }

    #[test]
    fn dc_is_preserved_for_rate_pairs() {
        for (a, b) in [(48000, 16000), (16000, 44100), (22050, 16000), (24414, 16000), (8000, 16000)] {
            let clip = AudioClip::new(vec![0.7; 4000], a);
            let out = resample(&clip, b).unwrap().samples;
            let n = out.len();
            for &v in &out[n / 4..3 * n / 4] {
                assert!((v - 0.7).abs() < 1e-3, "{a}->{b}: {v}");
            }
        }
    }

    #[test]
    fn ratio_path_matches_rational_path() {
        let x: Vec<f64> = (0..500).map(|i| (i as f64 * 0.05).sin()).collect();
        let a = Resampler::new(3, 2).unwrap().process(&x);
        let b = resample_ratio(&x, 2.0 / 3.0);
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_rate_is_rejected() {
        let clip = AudioClip::new(vec![0.0; 4], 16000);
        assert!(matches!(resample(&clip, 0), Err(AudioError::InvalidRate)));
    }
}
