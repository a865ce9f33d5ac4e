//! Independent reference implementations shared by the integration tests and
//! the acceptance runner. Nothing here calls the kernel it is checking.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use serkit::nn::{
    conv1d_backward, conv1d_forward, dense_backward, dense_forward, dropout_mask, lstm_backward, lstm_forward,
    maxpool1d_backward, maxpool1d_forward, softmax_cross_entropy, Activation, LstmGrads, LstmParams, Mode, Model,
    Padding, Tensor,
};
use serkit::rng::Xoshiro256;

pub const FD_STEP: f64 = 1e-5;

pub fn naive_dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = x.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut out: Vec<Complex64> = (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, v)| {
                    // Reduce the index product first so the angle stays small.
                    let ang = sign * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    v * Complex64::new(ang.cos(), ang.sin())
                })
                .sum()
        })
        .collect();
    if inverse {
        out.iter_mut().for_each(|v| *v /= n as f64);
    }
    out
}

/// Orthonormal DCT-II by direct summation, scaling applied after the sum.
pub fn direct_dct(x: &[f64], n_out: usize) -> Vec<f64> {
    let n = x.len() as f64;
    (0..n_out)
        .map(|k| {
            let s: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| v * ((2.0 * i as f64 + 1.0) * k as f64 * PI / (2.0 * n)).cos())
                .sum();
            s * if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() }
        })
        .collect()
}

/// HTK-scale triangular filters over continuous bin frequencies.
pub fn reference_mel_filters(n_mels: usize, n_fft: usize, rate: f64, fmin: f64, fmax: f64) -> Vec<Vec<f64>> {
    let to_mel = |f: f64| 2595.0 * (1.0 + f / 700.0).log10();
    let to_hz = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
    let (lo, hi) = (to_mel(fmin), to_mel(fmax));
    let pts: Vec<f64> = (0..n_mels + 2).map(|i| to_hz(lo + (hi - lo) * i as f64 / (n_mels + 1) as f64)).collect();
    (0..n_mels)
        .map(|m| {
            (0..=n_fft / 2)
                .map(|k| {
                    let f = k as f64 * rate / n_fft as f64;
                    if f <= pts[m] || f >= pts[m + 2] {
                        0.0
                    } else if f <= pts[m + 1] {
                        (f - pts[m]) / (pts[m + 1] - pts[m])
                    } else {
                        (pts[m + 2] - f) / (pts[m + 2] - pts[m + 1])
                    }
                })
                .collect()
        })
        .collect()
}

/// MFCC frames built stage by stage: periodic Hann, naive DFT power,
/// reference filters, floored natural log, direct DCT.
pub fn stagewise_mfcc(x: &[f64], rate: f64, n_fft: usize, hop: usize, n_mels: usize, n_mfcc: usize, floor: f64) -> Vec<Vec<f64>> {
    let win: Vec<f64> = (0..n_fft).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n_fft as f64).cos()).collect();
    let filters = reference_mel_filters(n_mels, n_fft, rate, 0.0, rate / 2.0);
    let n_frames = if x.len() < n_fft { 1 } else { (x.len() - n_fft) / hop + 1 };
    (0..n_frames)
        .map(|t| {
            let frame: Vec<Complex64> = (0..n_fft)
                .map(|i| Complex64::new(x.get(t * hop + i).copied().unwrap_or(0.0) * win[i], 0.0))
                .collect();
            let spec = naive_dft(&frame, false);
            let power: Vec<f64> = spec[..=n_fft / 2].iter().map(|z| z.norm_sqr()).collect();
            let log_mel: Vec<f64> = filters
                .iter()
                .map(|f| f.iter().zip(&power).map(|(w, p)| w * p).sum::<f64>().max(floor).ln())
                .collect();
            direct_dct(&log_mel, n_mfcc)
        })
        .collect()
}

/// Triple-loop cross-correlation with explicit zero padding.
pub fn brute_conv(x: &[f64], len: usize, c_in: usize, w: &[f64], k: usize, c_out: usize, b: &[f64], same: bool) -> Vec<f64> {
    let pad = if same { (k - 1) / 2 } else { 0 };
    let out_len = if same { len } else { len - k + 1 };
    let mut y = vec![0.0; out_len * c_out];
    for t in 0..out_len {
        for o in 0..c_out {
            let mut s = b[o];
            for j in 0..k {
                let pos = t as i64 + j as i64 - pad as i64;
                if pos < 0 || pos >= len as i64 {
                    continue;
                }
                for c in 0..c_in {
                    s += x[pos as usize * c_in + c] * w[(j * c_in + c) * c_out + o];
                }
            }
            y[t * c_out + o] = s;
        }
    }
    y
}

pub fn tone(freq: f64, n: usize, rate: f64) -> Vec<f64> {
    (0..n).map(|i| 0.5 * (2.0 * PI * freq * i as f64 / rate).sin()).collect()
}

/// Strongest bin (below 2 kHz) of a Hann-windowed naive DFT over the middle
/// 8192 samples; returns `(frequency, bin width)`.
pub fn dominant_hz(x: &[f64], rate: f64) -> (f64, f64) {
    let n = 8192;
    let start = (x.len() - n) / 2;
    let bin_width = rate / n as f64;
    let max_bin = (2000.0 / bin_width) as usize;
    let seg: Vec<f64> = (0..n)
        .map(|i| x[start + i] * (0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()))
        .collect();
    let mut best = (0, 0.0);
    for k in 1..max_bin {
        let (mut re, mut im) = (0.0, 0.0);
        for (i, v) in seg.iter().enumerate() {
            let ang = -2.0 * PI * ((k * i) % n) as f64 / n as f64;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        if re * re + im * im > best.1 {
            best = (k, re * re + im * im);
        }
    }
    (best.0 as f64 * bin_width, bin_width)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `|a - n| / max(|a|, |n|)` over whole gradient vectors; 0 when both vanish.
pub fn rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = analytic.iter().zip(numeric).map(|(a, b)| a - b).collect();
    let scale = norm(analytic).max(norm(numeric));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

/// Central differences of `f` with respect to every entry of `v`.
pub fn numeric_grad(v: &mut [f64], mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    (0..v.len())
        .map(|i| {
            let orig = v[i];
            v[i] = orig + FD_STEP;
            let up = f(v);
            v[i] = orig - FD_STEP;
            let down = f(v);
            v[i] = orig;
            (up - down) / (2.0 * FD_STEP)
        })
        .collect()
}

pub fn randn(rng: &mut Xoshiro256, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.normal()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn between(rng: &mut Xoshiro256, lo: usize, hi: usize) -> usize {
    lo + rng.below((hi - lo + 1) as u64) as usize
}

/// Worst relative error per gradient over a batch of random instances.
#[derive(Debug, Clone, Copy)]
pub struct GradCheck {
    pub instances: usize,
    pub worst: f64,
}

impl GradCheck {
    fn new() -> Self {
        Self { instances: 0, worst: 0.0 }
    }

    fn record(&mut self, errs: &[f64]) {
        self.instances += 1;
        for &e in errs {
            self.worst = self.worst.max(e);
        }
    }
}

/// Loss `sum(y * r)` for a random projection `r`, so `dL/dy = r`.
pub fn check_conv(instances: usize, seed: u64) -> GradCheck {
    let mut rng = Xoshiro256::new(seed);
    let mut out = GradCheck::new();
    while out.instances < instances {
        let (len, c_in, c_out) = (between(&mut rng, 3, 11), between(&mut rng, 1, 3), between(&mut rng, 1, 4));
        let k = [1, 3, 5][rng.below(3) as usize];
        let padding = if rng.below(2) == 0 || k > len { Padding::Same } else { Padding::Valid };
        let x = Tensor::new(vec![len, c_in], randn(&mut rng, len * c_in)).unwrap();
        let w = randn(&mut rng, k * c_in * c_out);
        let mut b = randn(&mut rng, c_out);
        let y = conv1d_forward(&x, &w, &b, k, padding).unwrap();
        let r = Tensor::new(y.shape().to_vec(), randn(&mut rng, y.len())).unwrap();
        let (mut dw, mut db) = (vec![0.0; w.len()], vec![0.0; b.len()]);
        let dx = conv1d_backward(&x, &w, k, padding, &r, &mut dw, &mut db).unwrap();

        let loss = |x: &Tensor, w: &[f64], b: &[f64]| dot(conv1d_forward(x, w, b, k, padding).unwrap().data(), r.data());
        let nw = numeric_grad(&mut w.clone(), |w| loss(&x, w, &b));
        let nb = numeric_grad(&mut b, |b| loss(&x, &w, b));
        let nx = numeric_grad(&mut x.data().to_vec(), |xs| {
            loss(&Tensor::new(vec![len, c_in], xs.to_vec()).unwrap(), &w, &b)
        });
        out.record(&[rel_err(&dw, &nw), rel_err(&db, &nb), rel_err(dx.data(), &nx)]);
    }
    out
}

/// Inputs whose window maxima are within `2 * FD_STEP` of a runner-up are
/// redrawn, since the pooled value is not differentiable at a tie.
pub fn check_maxpool(instances: usize, seed: u64) -> GradCheck {
    let mut rng = Xoshiro256::new(seed);
    let mut out = GradCheck::new();
    while out.instances < instances {
        let (pool, stride, c) = (between(&mut rng, 2, 5), between(&mut rng, 1, 3), between(&mut rng, 1, 3));
        let len = between(&mut rng, pool, pool + 8);
        let xs = randn(&mut rng, len * c);
        let x = Tensor::new(vec![len, c], xs.clone()).unwrap();
        let (y, arg) = maxpool1d_forward(&x, pool, stride).unwrap();
        let near_tie = (0..y.shape()[0]).any(|t| {
            (0..c).any(|ch| {
                let win: Vec<f64> = (0..pool).map(|j| xs[(t * stride + j) * c + ch]).collect();
                let m = y.data()[t * c + ch];
                win.iter().filter(|&&v| v != m && m - v < 2.0 * FD_STEP).count() > 0
            })
        });
        if near_tie {
            continue;
        }
        let r = Tensor::new(y.shape().to_vec(), randn(&mut rng, y.len())).unwrap();
        let dx = maxpool1d_backward(x.shape(), &arg, &r).unwrap();
        let nx = numeric_grad(&mut xs.clone(), |v| {
            let t = Tensor::new(vec![len, c], v.to_vec()).unwrap();
            dot(maxpool1d_forward(&t, pool, stride).unwrap().0.data(), r.data())
        });
        out.record(&[rel_err(dx.data(), &nx)]);
    }
    out
}

/// Relu instances with a pre-activation within `1e-3` of zero are redrawn.
pub fn check_dense(instances: usize, seed: u64) -> GradCheck {
    let mut rng = Xoshiro256::new(seed);
    let mut out = GradCheck::new();
    while out.instances < instances {
        let (d, u) = (between(&mut rng, 1, 6), between(&mut rng, 1, 6));
        let act = if rng.below(2) == 0 { Activation::Relu } else { Activation::Linear };
        let x = randn(&mut rng, d);
        let w = randn(&mut rng, d * u);
        let b = randn(&mut rng, u);
        let pre = dense_forward(&x, &w, &b, Activation::Linear).unwrap();
        if act == Activation::Relu && pre.iter().any(|v| v.abs() < 1e-3) {
            continue;
        }
        let y = dense_forward(&x, &w, &b, act).unwrap();
        let r = randn(&mut rng, u);
        let (mut dw, mut db) = (vec![0.0; w.len()], vec![0.0; u]);
        let dx = dense_backward(&x, &w, &y, act, &r, &mut dw, &mut db).unwrap();
        let loss = |x: &[f64], w: &[f64], b: &[f64]| dot(&dense_forward(x, w, b, act).unwrap(), &r);
        let nw = numeric_grad(&mut w.clone(), |v| loss(&x, v, &b));
        let nb = numeric_grad(&mut b.clone(), |v| loss(&x, &w, v));
        let nx = numeric_grad(&mut x.clone(), |v| loss(v, &w, &b));
        out.record(&[rel_err(&dw, &nw), rel_err(&db, &nb), rel_err(&dx, &nx)]);
    }
    out
}

/// Covers all eight gate matrices (via the two stacked weight blocks), the
/// biases and the input sequence.
pub fn check_lstm(instances: usize, seed: u64) -> GradCheck {
    let mut rng = Xoshiro256::new(seed);
    let mut out = GradCheck::new();
    while out.instances < instances {
        let (t, d, u) = (between(&mut rng, 1, 4), between(&mut rng, 1, 3), between(&mut rng, 1, 4));
        let x = Tensor::new(vec![t, d], randn(&mut rng, t * d)).unwrap();
        let scale = |v: Vec<f64>| v.into_iter().map(|a| 0.5 * a).collect::<Vec<_>>();
        let wx = scale(randn(&mut rng, d * 4 * u));
        let wh = scale(randn(&mut rng, u * 4 * u));
        let b = scale(randn(&mut rng, 4 * u));
        let r = randn(&mut rng, u);
        let p = LstmParams { units: u, wx: &wx, wh: &wh, b: &b };
        let (_, cache) = lstm_forward(&x, p).unwrap();
        let (mut gwx, mut gwh, mut gb) = (vec![0.0; wx.len()], vec![0.0; wh.len()], vec![0.0; b.len()]);
        let dx = lstm_backward(&x, p, &cache, &r, LstmGrads { wx: &mut gwx, wh: &mut gwh, b: &mut gb }).unwrap();

        let loss = |x: &Tensor, wx: &[f64], wh: &[f64], b: &[f64]| {
            dot(&lstm_forward(x, LstmParams { units: u, wx, wh, b }).unwrap().0, &r)
        };
        let nwx = numeric_grad(&mut wx.clone(), |v| loss(&x, v, &wh, &b));
        let nwh = numeric_grad(&mut wh.clone(), |v| loss(&x, &wx, v, &b));
        let nb = numeric_grad(&mut b.clone(), |v| loss(&x, &wx, &wh, v));
        let nx = numeric_grad(&mut x.data().to_vec(), |v| {
            loss(&Tensor::new(vec![t, d], v.to_vec()).unwrap(), &wx, &wh, &b)
        });
        out.record(&[rel_err(&gwx, &nwx), rel_err(&gwh, &nwh), rel_err(&gb, &nb), rel_err(dx.data(), &nx)]);
    }
    out
}

pub fn check_softmax_ce(instances: usize, seed: u64) -> GradCheck {
    let mut rng = Xoshiro256::new(seed);
    let mut out = GradCheck::new();
    while out.instances < instances {
        let logits: Vec<f64> = randn(&mut rng, 8).into_iter().map(|v| 3.0 * v).collect();
        let mut target = vec![0.0; 8];
        target[rng.below(8) as usize] = 1.0;
        let (_, probs) = softmax_cross_entropy(&logits, &target);
        let analytic: Vec<f64> = probs.iter().zip(&target).map(|(p, t)| p - t).collect();
        let numeric = numeric_grad(&mut logits.clone(), |z| softmax_cross_entropy(z, &target).0);
        out.record(&[rel_err(&analytic, &numeric)]);
    }
    out
}

/// With its mask fixed, dropout is linear in the input.
pub fn check_dropout(instances: usize, seed: u64) -> GradCheck {
    let mut rng = Xoshiro256::new(seed);
    let mut out = GradCheck::new();
    while out.instances < instances {
        let n = between(&mut rng, 1, 20);
        let mask = dropout_mask(n, 0.3, rng.next_u64());
        let x = randn(&mut rng, n);
        let r = randn(&mut rng, n);
        let analytic: Vec<f64> = mask.iter().zip(&r).map(|(m, r)| m * r).collect();
        let numeric = numeric_grad(&mut x.clone(), |v| {
            v.iter().zip(&mask).zip(&r).map(|((x, m), r)| x * m * r).sum()
        });
        out.record(&[rel_err(&analytic, &numeric)]);
    }
    out
}

/// Full-model parameter gradient (eval mode) against central differences.
pub fn check_model(model: &Model, x: &Tensor, label: usize) -> f64 {
    let mut target = vec![0.0; 8];
    target[label] = 1.0;
    let (_, _, analytic) = model.loss_and_gradient(x, &target, Mode::Eval, 0).unwrap();
    let mut probe = model.clone();
    let mut params = model.params().to_vec();
    let numeric = numeric_grad(&mut params, |p| {
        probe.params_mut().copy_from_slice(p);
        let logits = probe.forward(x, Mode::Eval, 0).unwrap().logits;
        softmax_cross_entropy(&logits, &target).0
    });
    rel_err(&analytic, &numeric)
}
