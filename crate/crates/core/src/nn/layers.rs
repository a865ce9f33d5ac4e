//! Layer kernels. Weight layouts are row-major: conv kernels `K x C_in x C_out`,
//! dense weights `D x U`, LSTM input weights `D x 4U` and recurrent weights
//! `U x 4U` with gate blocks ordered input, forget, cell, output.
//!
//! Backward kernels accumulate parameter gradients into caller buffers and
//! return the gradient with respect to the layer input.

use super::{NnError, Tensor};
use crate::rng::Xoshiro256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Linear,
    Relu,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Linear => "linear",
            Activation::Relu => "relu",
        }
    }

    fn apply(self, v: &mut [f64]) {
        if self == Activation::Relu {
            v.iter_mut().for_each(|x| *x = x.max(0.0));
        }
    }

    /// Turns `dy` into the pre-activation gradient using the layer output.
    fn backprop(self, y: &[f64], dy: &mut [f64]) {
        if self == Activation::Relu {
            for (d, &o) in dy.iter_mut().zip(y) {
                if o <= 0.0 {
                    *d = 0.0;
                }
            }
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Activation::Linear),
            "relu" => Ok(Activation::Relu),
            _ => Err(format!("unknown activation {s:?}")),
        }
    }
}

pub fn relu(v: f64) -> f64 {
    v.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    Same,
    Valid,
}

impl Padding {
    pub fn name(self) -> &'static str {
        match self {
            Padding::Same => "same",
            Padding::Valid => "valid",
        }
    }

    /// Output length and left padding for input length `len`.
    pub fn geometry(self, len: usize, kernel: usize) -> Option<(usize, usize)> {
        match self {
            Padding::Same => (len >= 1).then_some((len, (kernel - 1) / 2)),
            Padding::Valid => (len >= kernel).then(|| (len - kernel + 1, 0)),
        }
    }
}

impl std::str::FromStr for Padding {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "same" => Ok(Padding::Same),
            "valid" => Ok(Padding::Valid),
            _ => Err(format!("unknown padding {s:?}")),
        }
    }
}

fn conv_dims(x: &Tensor, w: &[f64], c_out: usize, kernel: usize, padding: Padding) -> Result<(usize, usize, usize, usize), NnError> {
    let (len, c_in) = x.dims2()?;
    if kernel == 0 || w.len() != kernel * c_in * c_out {
        return Err(NnError::ShapeMismatch(format!(
            "conv kernel holds {} values, expected {kernel}x{c_in}x{c_out}",
            w.len()
        )));
    }
    let (out_len, pad) = padding
        .geometry(len, kernel)
        .ok_or_else(|| NnError::ShapeMismatch(format!("input length {len} shorter than kernel {kernel}")))?;
    Ok((len, c_in, out_len, pad))
}

/// Cross-correlation `y[t, o] = b[o] + sum_{k,c} x[t + k - pad, c] w[k, c, o]`,
/// zero outside the input. No activation.
pub fn conv1d_forward(x: &Tensor, w: &[f64], b: &[f64], kernel: usize, padding: Padding) -> Result<Tensor, NnError> {
    let c_out = b.len();
    let (len, c_in, out_len, pad) = conv_dims(x, w, c_out, kernel, padding)?;
    let xd = x.data();
    let mut y = Vec::with_capacity(out_len * c_out);
    for t in 0..out_len {
        y.extend_from_slice(b);
        let acc = &mut y[t * c_out..];
        for k in 0..kernel {
            let Some(src) = (t + k).checked_sub(pad).filter(|&s| s < len) else { continue };
            for c in 0..c_in {
                let xv = xd[src * c_in + c];
                let wrow = &w[(k * c_in + c) * c_out..][..c_out];
                for (a, wv) in acc.iter_mut().zip(wrow) {
                    *a += xv * wv;
                }
            }
        }
    }
    Tensor::new(vec![out_len, c_out], y)
}

/// Backward of [`conv1d_forward`] given the pre-activation gradient `dy`.
pub fn conv1d_backward(
    x: &Tensor,
    w: &[f64],
    kernel: usize,
    padding: Padding,
    dy: &Tensor,
    dw: &mut [f64],
    db: &mut [f64],
) -> Result<Tensor, NnError> {
    let c_out = db.len();
    let (len, c_in, out_len, pad) = conv_dims(x, w, c_out, kernel, padding)?;
    if dy.shape() != [out_len, c_out] || dw.len() != w.len() {
        return Err(NnError::ShapeMismatch("conv gradient buffers".into()));
    }
    let (xd, dyd) = (x.data(), dy.data());
    let mut dx = vec![0.0; len * c_in];
    for t in 0..out_len {
        let g = &dyd[t * c_out..][..c_out];
        for (acc, v) in db.iter_mut().zip(g) {
            *acc += v;
        }
        for k in 0..kernel {
            let Some(src) = (t + k).checked_sub(pad).filter(|&s| s < len) else { continue };
            for c in 0..c_in {
                let off = (k * c_in + c) * c_out;
                let xv = xd[src * c_in + c];
                let mut dot = 0.0;
                for ((dwv, wv), gv) in dw[off..off + c_out].iter_mut().zip(&w[off..off + c_out]).zip(g) {
                    *dwv += xv * gv;
                    dot += wv * gv;
                }
                dx[src * c_in + c] += dot;
            }
        }
    }
    Tensor::new(vec![len, c_in], dx)
}

/// Valid max pooling per channel. Returns the pooled tensor and, for each
/// output element, the flat input index of its (first) maximum.
pub fn maxpool1d_forward(x: &Tensor, pool: usize, stride: usize) -> Result<(Tensor, Vec<usize>), NnError> {
    let (len, c) = x.dims2()?;
    if pool == 0 || stride == 0 {
        return Err(NnError::InvalidSpec("pool and stride must be positive".into()));
    }
    if len < pool {
        return Err(NnError::InputTooShort { len, pool });
    }
    let out_len = (len - pool) / stride + 1;
    let xd = x.data();
    let mut y = Vec::with_capacity(out_len * c);
    let mut arg = Vec::with_capacity(out_len * c);
    for t in 0..out_len {
        for ch in 0..c {
            let mut best = t * stride * c + ch;
            for j in 1..pool {
                let idx = (t * stride + j) * c + ch;
                if xd[idx] > xd[best] {
                    best = idx;
                }
            }
            y.push(xd[best]);
            arg.push(best);
        }
    }
    Ok((Tensor::new(vec![out_len, c], y)?, arg))
}

/// Routes each output gradient to the input position that won the max.
pub fn maxpool1d_backward(in_shape: &[usize], argmax: &[usize], dy: &Tensor) -> Result<Tensor, NnError> {
    if argmax.len() != dy.len() {
        return Err(NnError::ShapeMismatch("pool gradient does not match its argmax table".into()));
    }
    let mut dx = Tensor::zeros(in_shape.to_vec());
    let d = dx.data_mut();
    for (&i, g) in argmax.iter().zip(dy.data()) {
        d[i] += g;
    }
    Ok(dx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Inverted-dropout multipliers: 0 with probability `rate`, else `1/(1-rate)`.
pub fn dropout_mask(n: usize, rate: f64, seed: u64) -> Vec<f64> {
    let keep = 1.0 / (1.0 - rate);
    let mut rng = Xoshiro256::new(seed);
    (0..n).map(|_| if rng.uniform() < rate { 0.0 } else { keep }).collect()
}

pub fn dropout(x: &Tensor, rate: f64, mode: Mode, seed: u64) -> Tensor {
    assert!((0.0..1.0).contains(&rate), "dropout rate must lie in [0, 1)");
    if mode == Mode::Eval || rate == 0.0 {
        return x.clone();
    }
    let mask = dropout_mask(x.len(), rate, seed);
    let mut y = x.clone();
    y.data_mut().iter_mut().zip(&mask).for_each(|(v, m)| *v *= m);
    y
}

fn dense_check(x: &[f64], w: &[f64], units: usize) -> Result<(), NnError> {
    if w.len() != x.len() * units {
        return Err(NnError::ShapeMismatch(format!(
            "dense weights hold {} values, expected {}x{units}",
            w.len(),
            x.len()
        )));
    }
    Ok(())
}

/// `activation(x W + b)`.
pub fn dense_forward(x: &[f64], w: &[f64], b: &[f64], activation: Activation) -> Result<Vec<f64>, NnError> {
    let units = b.len();
    dense_check(x, w, units)?;
    let mut y = b.to_vec();
    for (xv, wrow) in x.iter().zip(w.chunks_exact(units)) {
        for (a, wv) in y.iter_mut().zip(wrow) {
            *a += xv * wv;
        }
    }
    activation.apply(&mut y);
    Ok(y)
}

/// Backward of [`dense_forward`]; `y` is the forward output.
pub fn dense_backward(
    x: &[f64],
    w: &[f64],
    y: &[f64],
    activation: Activation,
    dy: &[f64],
    dw: &mut [f64],
    db: &mut [f64],
) -> Result<Vec<f64>, NnError> {
    let units = db.len();
    dense_check(x, w, units)?;
    if y.len() != units || dy.len() != units || dw.len() != w.len() {
        return Err(NnError::ShapeMismatch("dense gradient buffers".into()));
    }
    let mut g = dy.to_vec();
    activation.backprop(y, &mut g);
    for (a, v) in db.iter_mut().zip(&g) {
        *a += v;
    }
    let mut dx = vec![0.0; x.len()];
    for ((xv, wrow), (dwrow, dxv)) in x
        .iter()
        .zip(w.chunks_exact(units))
        .zip(dw.chunks_exact_mut(units).zip(dx.iter_mut()))
    {
        let mut dot = 0.0;
        for ((dwv, wv), gv) in dwrow.iter_mut().zip(wrow).zip(&g) {
            *dwv += xv * gv;
            dot += wv * gv;
        }
        *dxv = dot;
    }
    Ok(dx)
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// LSTM parameters borrowed from a flat buffer.
#[derive(Debug, Clone, Copy)]
pub struct LstmParams<'a> {
    pub units: usize,
    /// `D x 4U`
    pub wx: &'a [f64],
    /// `U x 4U`
    pub wh: &'a [f64],
    /// `4U`
    pub b: &'a [f64],
}

/// Gradient buffers matching [`LstmParams`].
#[derive(Debug)]
pub struct LstmGrads<'a> {
    pub wx: &'a mut [f64],
    pub wh: &'a mut [f64],
    pub b: &'a mut [f64],
}

/// Per-step activations kept for the backward pass. Each row of `gates`
/// holds the activated `i, f, g, o` blocks.
#[derive(Debug, Clone)]
pub struct LstmCache {
    gates: Vec<f64>,
    cells: Vec<f64>,
    hidden: Vec<f64>,
}

impl<'a> LstmParams<'a> {
    fn check(&self, d: usize) -> Result<(), NnError> {
        let g = 4 * self.units;
        if self.wx.len() != d * g || self.wh.len() != self.units * g || self.b.len() != g {
            return Err(NnError::ShapeMismatch(format!(
                "lstm parameters do not match input width {d} and {} units",
                self.units
            )));
        }
        Ok(())
    }
}

/// Runs the sequence through the cell and returns the final hidden state.
pub fn lstm_forward(x: &Tensor, p: LstmParams<'_>) -> Result<(Vec<f64>, LstmCache), NnError> {
    let (steps, d) = x.dims2()?;
    if steps == 0 {
        return Err(NnError::ShapeMismatch("lstm needs at least one time step".into()));
    }
    p.check(d)?;
    let u = p.units;
    let g4 = 4 * u;
    let xd = x.data();
    let mut cache = LstmCache {
        gates: Vec::with_capacity(steps * g4),
        cells: vec![0.0; (steps + 1) * u],
        hidden: vec![0.0; (steps + 1) * u],
    };
    let mut z = vec![0.0; g4];
    for t in 0..steps {
        z.copy_from_slice(p.b);
        for (xv, wrow) in xd[t * d..(t + 1) * d].iter().zip(p.wx.chunks_exact(g4)) {
            for (a, wv) in z.iter_mut().zip(wrow) {
                *a += xv * wv;
            }
        }
        for (hv, wrow) in cache.hidden[t * u..(t + 1) * u].iter().zip(p.wh.chunks_exact(g4)) {
            for (a, wv) in z.iter_mut().zip(wrow) {
                *a += hv * wv;
            }
        }
        for (j, v) in z.iter_mut().enumerate() {
            *v = if (2 * u..3 * u).contains(&j) { v.tanh() } else { sigmoid(*v) };
        }
        for j in 0..u {
            let (i, f, g, o) = (z[j], z[u + j], z[2 * u + j], z[3 * u + j]);
            let c = f * cache.cells[t * u + j] + i * g;
            cache.cells[(t + 1) * u + j] = c;
            cache.hidden[(t + 1) * u + j] = o * c.tanh();
        }
        cache.gates.extend_from_slice(&z);
    }
    let h = cache.hidden[steps * u..].to_vec();
    Ok((h, cache))
}

/// Backpropagation through time from a gradient on the final hidden state.
pub fn lstm_backward(
    x: &Tensor,
    p: LstmParams<'_>,
    cache: &LstmCache,
    dh_last: &[f64],
    grads: LstmGrads<'_>,
) -> Result<Tensor, NnError> {
    let (steps, d) = x.dims2()?;
    p.check(d)?;
    let u = p.units;
    let g4 = 4 * u;
    if dh_last.len() != u || grads.wx.len() != p.wx.len() || grads.wh.len() != p.wh.len() || grads.b.len() != g4 {
        return Err(NnError::ShapeMismatch("lstm gradient buffers".into()));
    }
    let xd = x.data();
    let mut dx = vec![0.0; steps * d];
    let mut dh = dh_last.to_vec();
    let mut dc = vec![0.0; u];
    let mut dz = vec![0.0; g4];
    for t in (0..steps).rev() {
        let gates = &cache.gates[t * g4..(t + 1) * g4];
        let c_prev = &cache.cells[t * u..(t + 1) * u];
        let c = &cache.cells[(t + 1) * u..(t + 2) * u];
        for j in 0..u {
            let (i, f, g, o) = (gates[j], gates[u + j], gates[2 * u + j], gates[3 * u + j]);
            let tc = c[j].tanh();
            dc[j] += dh[j] * o * (1.0 - tc * tc);
            dz[j] = dc[j] * g * i * (1.0 - i);
            dz[u + j] = dc[j] * c_prev[j] * f * (1.0 - f);
            dz[2 * u + j] = dc[j] * i * (1.0 - g * g);
            dz[3 * u + j] = dh[j] * tc * o * (1.0 - o);
            dc[j] *= f;
        }
        for (a, v) in grads.b.iter_mut().zip(&dz) {
            *a += v;
        }
        let xt = &xd[t * d..(t + 1) * d];
        for ((xv, wrow), (dwrow, dxv)) in xt
            .iter()
            .zip(p.wx.chunks_exact(g4))
            .zip(grads.wx.chunks_exact_mut(g4).zip(dx[t * d..(t + 1) * d].iter_mut()))
        {
            let mut dot = 0.0;
            for ((dwv, wv), gv) in dwrow.iter_mut().zip(wrow).zip(&dz) {
                *dwv += xv * gv;
                dot += wv * gv;
            }
            *dxv = dot;
        }
        let h_prev = &cache.hidden[t * u..(t + 1) * u];
        for ((hv, wrow), (dwrow, dhv)) in h_prev
            .iter()
            .zip(p.wh.chunks_exact(g4))
            .zip(grads.wh.chunks_exact_mut(g4).zip(dh.iter_mut()))
        {
            let mut dot = 0.0;
            for ((dwv, wv), gv) in dwrow.iter_mut().zip(wrow).zip(&dz) {
                *dwv += hv * gv;
                dot += wv * gv;
            }
            *dhv = dot;
        }
    }
    Tensor::new(vec![steps, d], dx)
}
