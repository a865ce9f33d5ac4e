//! Desk-scale stand-in corpus: one harmonic template per emotion, written
//! with RAVDESS file naming so it goes through the regular scanner.
//!
//! Class `c` has fundamental `100 * 1.3^c` Hz, a class-specific spectral
//! tilt and syllable-rate amplitude modulation. Every clip draws its own
//! pitch jitter, vibrato, gain, onset and background noise.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use super::HarnessError;
use crate::audio_io::{write_wav, AudioClip, Emotion};
use crate::rng::{derive_seed, Xoshiro256};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub clips_per_class: usize,
    pub seconds: f64,
    pub sample_rate_hz: u32,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { clips_per_class: 20, seconds: 3.0, sample_rate_hz: 16_000, seed: 0 }
    }
}

const ACTORS: usize = 10;

struct Template {
    f0: f64,
    tilt: f64,
    am_hz: f64,
}

fn template(class: usize) -> Template {
    Template {
        f0: 100.0 * 1.3f64.powi(class as i32),
        tilt: 0.7 + 0.25 * (class % 4) as f64,
        am_hz: 2.0 + 0.8 * class as f64,
    }
}

/// Renders clip `k` of class `class`.
pub fn synth_clip(class: usize, k: usize, cfg: &SynthConfig) -> AudioClip {
    let t = template(class);
    let mut rng = Xoshiro256::new(derive_seed(cfg.seed, (class * 100_000 + k) as u64));
    let rate = cfg.sample_rate_hz as f64;
    let n = (cfg.seconds * rate).round() as usize;
    let f0 = t.f0 * (1.0 + 0.03 * rng.normal());
    let tilt = t.tilt + 0.05 * rng.normal();
    let vib_hz = rng.uniform_range(4.0, 6.0);
    let vib_depth = rng.uniform_range(0.005, 0.015);
    let gain = rng.uniform_range(0.3, 0.8);
    let onset = (rng.uniform_range(0.0, 0.3) * rate) as usize;
    let offset = n - (rng.uniform_range(0.0, 0.3) * rate) as usize;
    let noise = rng.uniform_range(0.005, 0.02);
    let am_phase = rng.uniform_range(0.0, 2.0 * PI);

    let n_harm = ((0.45 * rate / f0) as usize).clamp(1, 30);
    let amps: Vec<f64> = (1..=n_harm).map(|h| (h as f64).powf(-tilt)).collect();
    let norm: f64 = amps.iter().sum();
    let phases: Vec<f64> = (0..n_harm).map(|_| rng.uniform_range(0.0, 2.0 * PI)).collect();

    let mut phase = 0.0;
    let mut x = vec![0.0; n];
    for (i, s) in x.iter_mut().enumerate() {
        let time = i as f64 / rate;
        let f = f0 * (1.0 + vib_depth * (2.0 * PI * vib_hz * time).sin());
        phase += 2.0 * PI * f / rate;
        let voiced = if (onset..offset).contains(&i) {
            let env = 0.6 + 0.4 * (2.0 * PI * t.am_hz * time + am_phase).sin();
            let tone: f64 = amps.iter().zip(&phases).enumerate().map(|(h, (a, p))| a * ((h + 1) as f64 * phase + p).sin()).sum();
            env * tone / norm
        } else {
            0.0
        };
        *s = gain * voiced + noise * rng.normal();
    }
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.99 {
        x.iter_mut().for_each(|v| *v *= 0.99 / peak);
    }
    AudioClip::new(x, cfg.sample_rate_hz)
}

/// Relative path of clip `k` of a class: `Actor_AA/03-01-EE-01-01-RR-AA.wav`.
pub fn synth_file_name(emotion: Emotion, k: usize) -> PathBuf {
    let actor = k % ACTORS + 1;
    let rep = k / ACTORS + 1;
    PathBuf::from(format!("Actor_{actor:02}")).join(format!("03-01-{:02}-01-01-{rep:02}-{actor:02}.wav", emotion.index() + 1))
}

/// Writes `8 * clips_per_class` 16-bit WAV files under `dir`.
pub fn write_synthetic_corpus(dir: &Path, cfg: &SynthConfig) -> Result<Vec<PathBuf>, HarnessError> {
    use rayon::prelude::*;
    let jobs: Vec<(Emotion, usize)> =
        Emotion::ALL.iter().flat_map(|&e| (0..cfg.clips_per_class).map(move |k| (e, k))).collect();
    jobs.par_iter()
        .map(|&(e, k)| {
            let path = dir.join(synth_file_name(e, k));
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|source| HarnessError::Io { path: parent.into(), source })?;
            }
            write_wav(&path, &synth_clip(e.index(), k, cfg))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio_io::{parse_label, Corpus};

    #[test]
    fn names_parse_as_ravdess() {
        for e in Emotion::ALL {
            for k in [0, 9, 10, 19] {
                let (got, speaker) = parse_label(Corpus::Ravdess, &synth_file_name(e, k)).unwrap();
                assert_eq!(got, e);
                assert_eq!(speaker.unwrap(), format!("{:02}", k % 10 + 1));
            }
        }
        let names: std::collections::HashSet<_> = (0..20).map(|k| synth_file_name(Emotion::Fear, k)).collect();
        assert_eq!(names.len(), 20);
    }

    #[test]
    fn clips_are_bounded_and_seeded() {
        let cfg = SynthConfig { seconds: 0.5, ..Default::default() };
        let a = synth_clip(7, 3, &cfg);
        assert_eq!(a.len(), 8000);
        assert!(a.peak() < 1.0 && a.peak() > 0.05);
        assert_eq!(a, synth_clip(7, 3, &cfg));
        assert_ne!(a, synth_clip(7, 4, &cfg));
    }
}
