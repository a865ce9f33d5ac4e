//! STFT phase vocoder: re-times a signal by interpolating frame magnitudes at
//! fractional positions and accumulating each bin's measured phase advance.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dsp::{window, Fft, WindowKind};

pub const VOCODER_WINDOW: usize = 1024;
pub const VOCODER_HOP: usize = 256;

fn wrap_phase(p: f64) -> f64 {
    p - 2.0 * PI * ((p + PI) / (2.0 * PI)).floor()
}

/// Re-times `x` by `rate` (`rate > 1` is faster), returning exactly
/// `round(len / rate)` samples. Caller guarantees `len >= VOCODER_WINDOW`.
pub(crate) fn stretch(x: &[f64], rate: f64) -> Vec<f64> {
    let (n_fft, hop) = (VOCODER_WINDOW, VOCODER_HOP);
    let n_bins = n_fft / 2 + 1;
    let fft = Fft::new(n_fft).expect("vocoder window is a power of two");
    let win = window(WindowKind::Hann, n_fft);

    // Centred frames covering every input sample.
    let n_frames = 1 + x.len().div_ceil(hop);
    let mut padded = vec![0.0; (n_frames - 1) * hop + n_fft];
    padded[n_fft / 2..n_fft / 2 + x.len()].copy_from_slice(x);

    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    let spectra: Vec<Vec<Complex64>> = (0..n_frames)
        .map(|t| {
            let frame = &padded[t * hop..t * hop + n_fft];
            for ((b, v), w) in buf.iter_mut().zip(frame).zip(&win) {
                *b = Complex64::new(v * w, 0.0);
            }
            fft.process(&mut buf, false);
            buf[..n_bins].to_vec()
        })
        .collect();
    let zero_frame = vec![Complex64::new(0.0, 0.0); n_bins];
    let frame_at = |i: usize| spectra.get(i).unwrap_or(&zero_frame);

    let advance: Vec<f64> = (0..n_bins).map(|k| 2.0 * PI * hop as f64 * k as f64 / n_fft as f64).collect();
    let mut phase: Vec<f64> = spectra[0].iter().map(|z| z.arg()).collect();

    let n_out = (n_frames as f64 / rate).ceil() as usize;
    let out_len = (n_out - 1) * hop + n_fft;
    let mut y = vec![0.0; out_len];
    let mut wss = vec![0.0; out_len];

    for step in 0..n_out {
        let t = step as f64 * rate;
        let i = t.floor() as usize;
        let alpha = t - i as f64;
        let (cur, next) = (frame_at(i), frame_at(i + 1));

        for k in 0..n_bins {
            let mag = (1.0 - alpha) * cur[k].norm() + alpha * next[k].norm();
            buf[k] = Complex64::from_polar(mag, phase[k]);
            let dphase = wrap_phase(next[k].arg() - cur[k].arg() - advance[k]);
            phase[k] += advance[k] + dphase;
        }
        // Hermitian completion so the inverse transform is real.
        for k in n_bins..n_fft {
            buf[k] = buf[n_fft - k].conj();
        }
        buf[0].im = 0.0;
        buf[n_fft / 2].im = 0.0;
        fft.process(&mut buf, true);

        let base = step * hop;
        for j in 0..n_fft {
            y[base + j] += buf[j].re * win[j];
            wss[base + j] += win[j] * win[j];
        }
    }

    for (v, w) in y.iter_mut().zip(&wss) {
        if *w > 1e-10 {
            *v /= w;
        }
    }

    let target = (x.len() as f64 / rate).round() as usize;
    let mut out: Vec<f64> = y.into_iter().skip(n_fft / 2).take(target).collect();
    out.resize(target, 0.0);
    out
}
