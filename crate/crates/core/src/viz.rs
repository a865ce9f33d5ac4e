//! Data exports for plotting: class histogram, waveform and spectrogram.
//!
//! Spectrogram power is normalised so that a full-scale sine peaks near
//! 0 dB: `dB = 10 log10(|X|^2 / (sum(w) / 2)^2 + 1e-12)`, clipped to
//! `[-80, 0]`. The PGM maps `-80..0` dB linearly onto `0..255` with the DC
//! bin on the bottom image row; the CSV keeps the dB values with DC first.

use std::io::Write;

use crate::audio_io::{AudioClip, ClipRecord, Emotion};
use crate::dsp::{stft, window, DspError, StftConfig};
use crate::matrix::Matrix;

pub const FLOOR_DB: f64 = -80.0;
pub const POWER_EPS: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum VizError {
    #[error("clip of {len} samples is shorter than the {n_fft}-sample frame")]
    TooShort { len: usize, n_fft: usize },
    #[error("empty clip")]
    EmptyClip,
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Record counts per label in canonical order.
pub fn class_histogram(records: &[ClipRecord]) -> [usize; Emotion::COUNT] {
    let mut counts = [0; Emotion::COUNT];
    for r in records {
        counts[r.emotion.index()] += 1;
    }
    counts
}

pub fn write_histogram_csv<W: Write>(counts: &[usize; Emotion::COUNT], mut out: W) -> std::io::Result<()> {
    writeln!(out, "emotion,count")?;
    for (e, n) in Emotion::ALL.iter().zip(counts) {
        writeln!(out, "{e},{n}")?;
    }
    Ok(())
}

/// `(time_s, amplitude)` per sample. With `max_points`, longer clips are cut
/// into `max_points / 2` buckets that each contribute their minimum and
/// maximum sample, in time order.
pub fn waveplot_points(clip: &AudioClip, max_points: Option<usize>) -> Vec<(f64, f64)> {
    let rate = clip.sample_rate_hz as f64;
    let x = &clip.samples;
    let at = |i: usize| (i as f64 / rate, x[i]);
    match max_points {
        Some(m) if x.len() > m.max(2) => {
            let buckets = (m / 2).max(1);
            let mut pts = Vec::with_capacity(2 * buckets);
            for b in 0..buckets {
                let (lo, hi) = (b * x.len() / buckets, (b + 1) * x.len() / buckets);
                let imin = (lo..hi).min_by(|&i, &j| x[i].total_cmp(&x[j])).unwrap();
                let imax = (lo..hi).max_by(|&i, &j| x[i].total_cmp(&x[j])).unwrap();
                let (a, c) = if imin <= imax { (imin, imax) } else { (imax, imin) };
                pts.push(at(a));
                if c != a {
                    pts.push(at(c));
                }
            }
            pts
        }
        _ => (0..x.len()).map(at).collect(),
    }
}

pub fn waveplot_export<W: Write>(clip: &AudioClip, max_points: Option<usize>, mut out: W) -> Result<(), VizError> {
    if clip.is_empty() {
        return Err(VizError::EmptyClip);
    }
    writeln!(out, "time_s,amplitude")?;
    for (t, a) in waveplot_points(clip, max_points) {
        writeln!(out, "{t},{a}")?;
    }
    Ok(())
}

/// dB matrix (`n_fft/2 + 1` rows, DC first; one column per frame).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramImage {
    pub db: Matrix,
}

impl SpectrogramImage {
    pub fn rows(&self) -> usize {
        self.db.rows()
    }

    pub fn cols(&self) -> usize {
        self.db.cols()
    }

    /// Grey levels in image order: top row is the highest frequency bin.
    pub fn pixels(&self) -> Vec<u8> {
        let mut px = Vec::with_capacity(self.rows() * self.cols());
        for r in (0..self.rows()).rev() {
            px.extend(self.db.row(r).iter().map(|d| ((d - FLOOR_DB) / -FLOOR_DB * 255.0).round() as u8));
        }
        px
    }

    pub fn write_pgm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.cols(), self.rows())?;
        out.write_all(&self.pixels())
    }

    /// Header `bin,frame_0..frame_{T-1}`; one row per frequency bin.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.cols()).map(|t| format!("frame_{t}")).collect();
        writeln!(out, "bin,{}", header.join(","))?;
        for r in 0..self.rows() {
            let cells: Vec<String> = self.db.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{r},{}", cells.join(","))?;
        }
        Ok(())
    }
}

pub fn spectrogram(clip: &AudioClip, cfg: &StftConfig) -> Result<SpectrogramImage, VizError> {
    if clip.len() < cfg.n_fft {
        return Err(VizError::TooShort { len: clip.len(), n_fft: cfg.n_fft });
    }
    let spec = stft(clip, cfg)?;
    let ref_amp = window(cfg.window, cfg.n_fft).iter().sum::<f64>() / 2.0;
    let norm = ref_amp * ref_amp;
    let mut db = Matrix::zeros(spec.n_bins, spec.n_frames());
    for t in 0..spec.n_frames() {
        for k in 0..spec.n_bins {
            let v = 10.0 * (spec.power(t, k) / norm + POWER_EPS).log10();
            db[(k, t)] = v.clamp(FLOOR_DB, 0.0);
        }
    }
    Ok(SpectrogramImage { db })
}

pub fn spectrogram_export<P: Write, C: Write>(
    clip: &AudioClip,
    cfg: &StftConfig,
    pgm: P,
    csv: C,
) -> Result<SpectrogramImage, VizError> {
    let img = spectrogram(clip, cfg)?;
    img.write_pgm(pgm)?;
    img.write_csv(csv)?;
    Ok(img)
}
