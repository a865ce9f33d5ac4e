use std::fmt;
use std::io::{BufRead, Write};

use super::layers::{
    conv1d_backward, conv1d_forward, dense_backward, dense_forward, dropout_mask, lstm_backward, lstm_forward,
    maxpool1d_backward, maxpool1d_forward, Activation, LstmCache, LstmGrads, LstmParams, Mode, Padding,
};
use super::optim::{softmax, softmax_cross_entropy};
use super::{NnError, Tensor};
use crate::rng::{derive_seed, Xoshiro256};

pub const N_CLASSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LayerSpec {
    Conv1D { filters: usize, kernel: usize, padding: Padding, activation: Activation },
    MaxPool1D { pool: usize, stride: usize },
    Dropout { rate: f64 },
    Flatten,
    Dense { units: usize, activation: Activation },
    Lstm { units: usize },
    SoftmaxOutput { classes: usize },
}

impl fmt::Display for LayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LayerSpec::Conv1D { filters, kernel, padding, activation } => write!(
                f,
                "conv1d filters={filters} kernel={kernel} padding={} activation={}",
                padding.name(),
                activation.name()
            ),
            LayerSpec::MaxPool1D { pool, stride } => write!(f, "maxpool1d pool={pool} stride={stride}"),
            LayerSpec::Dropout { rate } => write!(f, "dropout rate={rate}"),
            LayerSpec::Flatten => write!(f, "flatten"),
            LayerSpec::Dense { units, activation } => write!(f, "dense units={units} activation={}", activation.name()),
            LayerSpec::Lstm { units } => write!(f, "lstm units={units}"),
            LayerSpec::SoftmaxOutput { classes } => write!(f, "softmax classes={classes}"),
        }
    }
}

impl std::str::FromStr for LayerSpec {
    type Err = NnError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || NnError::InvalidSpec(format!("cannot parse layer {s:?}"));
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or_else(bad)?;
        let kv: Vec<(&str, &str)> = parts.map(|p| p.split_once('=').ok_or_else(bad)).collect::<Result<_, _>>()?;
        let get = |key: &str| kv.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).ok_or_else(bad);
        let num = |key: &str| get(key)?.parse::<usize>().map_err(|_| bad());
        Ok(match kind {
            "conv1d" => LayerSpec::Conv1D {
                filters: num("filters")?,
                kernel: num("kernel")?,
                padding: get("padding")?.parse().map_err(|_| bad())?,
                activation: get("activation")?.parse().map_err(|_| bad())?,
            },
            "maxpool1d" => LayerSpec::MaxPool1D { pool: num("pool")?, stride: num("stride")? },
            "dropout" => LayerSpec::Dropout { rate: get("rate")?.parse().map_err(|_| bad())? },
            "flatten" => LayerSpec::Flatten,
            "dense" => LayerSpec::Dense {
                units: num("units")?,
                activation: get("activation")?.parse().map_err(|_| bad())?,
            },
            "lstm" => LayerSpec::Lstm { units: num("units")? },
            "softmax" => LayerSpec::SoftmaxOutput { classes: num("classes")? },
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelSpec {
    pub layers: Vec<LayerSpec>,
    /// Adjustments made while fitting a preset to its input length.
    pub notes: Vec<String>,
}

const CNN_POOL: usize = 5;
const CNN_STRIDE: usize = 2;

/// Four conv blocks (256, 256, 128, 64 filters, kernel 5, same padding, relu)
/// each followed by max-pool(5, 2), dropout 0.2 before the last block, then
/// Dense(32, relu), dropout 0.3, Dense(8) and softmax. Pools that would see
/// fewer than 5 positions for this `input_len` are dropped and noted.
pub fn cnn_preset(input_len: usize) -> ModelSpec {
    let conv = |filters| LayerSpec::Conv1D { filters, kernel: 5, padding: Padding::Same, activation: Activation::Relu };
    let mut layers = Vec::new();
    let mut notes = Vec::new();
    let mut len = input_len;
    for (block, filters) in [256, 256, 128, 64].into_iter().enumerate() {
        if block == 3 {
            layers.push(LayerSpec::Dropout { rate: 0.2 });
        }
        layers.push(conv(filters));
        if len >= CNN_POOL {
            layers.push(LayerSpec::MaxPool1D { pool: CNN_POOL, stride: CNN_STRIDE });
            len = (len - CNN_POOL) / CNN_STRIDE + 1;
        } else {
            notes.push(format!(
                "dropped max-pool after conv block {}: length {len} is shorter than pool {CNN_POOL}",
                block + 1
            ));
        }
    }
    layers.extend([
        LayerSpec::Flatten,
        LayerSpec::Dense { units: 32, activation: Activation::Relu },
        LayerSpec::Dropout { rate: 0.3 },
        LayerSpec::Dense { units: N_CLASSES, activation: Activation::Linear },
        LayerSpec::SoftmaxOutput { classes: N_CLASSES },
    ]);
    ModelSpec { layers, notes }
}

/// LSTM(128), dropout 0.3, Dense(8) and softmax.
pub fn lstm_preset() -> ModelSpec {
    ModelSpec {
        layers: vec![
            LayerSpec::Lstm { units: 128 },
            LayerSpec::Dropout { rate: 0.3 },
            LayerSpec::Dense { units: N_CLASSES, activation: Activation::Linear },
            LayerSpec::SoftmaxOutput { classes: N_CLASSES },
        ],
        notes: Vec::new(),
    }
}

/// A spec entry resolved against its input shape, with its slice of the
/// flat parameter buffer.
#[derive(Debug, Clone)]
struct Layer {
    spec: LayerSpec,
    in_shape: Vec<usize>,
    out_shape: Vec<usize>,
    offset: usize,
    /// Sizes of consecutive parameter blocks (weights first, bias last).
    blocks: Vec<usize>,
}

impl Layer {
    fn n_params(&self) -> usize {
        self.blocks.iter().sum()
    }
}

enum Cache {
    Conv { input: Tensor, output: Tensor },
    Pool { argmax: Vec<usize> },
    Dropout { mask: Option<Vec<f64>> },
    Flatten,
    Dense { input: Vec<f64>, output: Vec<f64> },
    Lstm { input: Tensor, cache: LstmCache },
}

/// Forward state of one sample, consumed by [`Model::backward`].
pub struct Trace {
    caches: Vec<Cache>,
    pub logits: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Model {
    spec: ModelSpec,
    input_shape: Vec<usize>,
    seed: u64,
    layers: Vec<Layer>,
    params: Vec<f64>,
}

fn resolve(spec: &ModelSpec, input_shape: &[usize]) -> Result<Vec<Layer>, NnError> {
    if spec.layers.last() != Some(&LayerSpec::SoftmaxOutput { classes: N_CLASSES }) {
        return Err(NnError::InvalidSpec(format!("final layer must be softmax over {N_CLASSES} classes")));
    }
    let mut shape = input_shape.to_vec();
    let mut offset = 0;
    let mut layers = Vec::new();
    for (idx, &ls) in spec.layers.iter().enumerate() {
        let want_seq = |shape: &[usize]| match shape {
            [l, c] => Ok((*l, *c)),
            _ => Err(NnError::InvalidSpec(format!("layer {idx} ({ls}) needs a sequence input, got {shape:?}"))),
        };
        let want_flat = |shape: &[usize]| match shape {
            [n] => Ok(*n),
            _ => Err(NnError::InvalidSpec(format!("layer {idx} ({ls}) needs a flat input, got {shape:?}"))),
        };
        let (out_shape, blocks) = match ls {
            LayerSpec::Conv1D { filters, kernel, padding, .. } => {
                let (l, c) = want_seq(&shape)?;
                if filters == 0 || kernel == 0 {
                    return Err(NnError::InvalidSpec(format!("layer {idx}: empty convolution")));
                }
                let (out_len, _) = padding
                    .geometry(l, kernel)
                    .ok_or(NnError::InvalidArchitectureForInputLength { layer: idx, len: l, needed: kernel })?;
                (vec![out_len, filters], vec![kernel * c * filters, filters])
            }
            LayerSpec::MaxPool1D { pool, stride } => {
                let (l, c) = want_seq(&shape)?;
                if pool == 0 || stride == 0 {
                    return Err(NnError::InvalidSpec(format!("layer {idx}: pool and stride must be positive")));
                }
                if l < pool {
                    return Err(NnError::InvalidArchitectureForInputLength { layer: idx, len: l, needed: pool });
                }
                (vec![(l - pool) / stride + 1, c], vec![])
            }
            LayerSpec::Dropout { rate } => {
                if !(0.0..1.0).contains(&rate) {
                    return Err(NnError::InvalidSpec(format!("layer {idx}: dropout rate {rate}")));
                }
                (shape.clone(), vec![])
            }
            LayerSpec::Flatten => (vec![shape.iter().product()], vec![]),
            LayerSpec::Dense { units, .. } => {
                let d = want_flat(&shape)?;
                (vec![units], vec![d * units, units])
            }
            LayerSpec::Lstm { units } => {
                let (_, d) = want_seq(&shape)?;
                (vec![units], vec![d * 4 * units, units * 4 * units, 4 * units])
            }
            LayerSpec::SoftmaxOutput { classes } => {
                if idx + 1 != spec.layers.len() {
                    return Err(NnError::InvalidSpec("softmax must be the final layer".into()));
                }
                if want_flat(&shape)? != classes {
                    return Err(NnError::InvalidSpec(format!("softmax over {classes} classes fed {shape:?}")));
                }
                (shape.clone(), vec![])
            }
        };
        let layer = Layer { spec: ls, in_shape: shape, out_shape: out_shape.clone(), offset, blocks };
        offset += layer.n_params();
        layers.push(layer);
        shape = out_shape;
    }
    Ok(layers)
}

/// Builds the model and draws its initial parameters: weights uniform in
/// `±sqrt(6 / (fan_in + fan_out))`, biases zero except the LSTM forget gate (1).
pub fn build_model(spec: &ModelSpec, input_shape: &[usize], seed: u64) -> Result<Model, NnError> {
    let layers = resolve(spec, input_shape)?;
    let total = layers.iter().map(Layer::n_params).sum();
    let mut params = vec![0.0; total];
    let mut rng = Xoshiro256::new(seed);
    for layer in &layers {
        let mut glorot = |off: usize, n: usize, fan_in: usize, fan_out: usize| {
            let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for p in &mut params[off..off + n] {
                *p = rng.uniform_range(-a, a);
            }
        };
        let off = layer.offset;
        match layer.spec {
            LayerSpec::Conv1D { filters, kernel, .. } => {
                let c = layer.in_shape[1];
                glorot(off, layer.blocks[0], kernel * c, kernel * filters);
            }
            LayerSpec::Dense { units, .. } => glorot(off, layer.blocks[0], layer.in_shape[0], units),
            LayerSpec::Lstm { units } => {
                let d = layer.in_shape[1];
                glorot(off, layer.blocks[0], d, 4 * units);
                glorot(off + layer.blocks[0], layer.blocks[1], units, 4 * units);
                let b = off + layer.blocks[0] + layer.blocks[1];
                params[b + units..b + 2 * units].fill(1.0);
            }
            _ => {}
        }
    }
    Ok(Model { spec: spec.clone(), input_shape: input_shape.to_vec(), seed, layers, params })
}

impl Model {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn input_shape(&self) -> &[usize] {
        &self.input_shape
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    /// Parameter count of each layer, in order.
    pub fn layer_param_counts(&self) -> Vec<usize> {
        self.layers.iter().map(Layer::n_params).collect()
    }

    /// Output shape of each layer, in order.
    pub fn layer_shapes(&self) -> Vec<Vec<usize>> {
        self.layers.iter().map(|l| l.out_shape.clone()).collect()
    }

    fn block(&self, layer: &Layer, i: usize) -> std::ops::Range<usize> {
        let start = layer.offset + layer.blocks[..i].iter().sum::<usize>();
        start..start + layer.blocks[i]
    }

    /// Runs one sample. In train mode each dropout layer draws its mask from
    /// `derive_seed(dropout_seed, layer_index)`.
    pub fn forward(&self, x: &Tensor, mode: Mode, dropout_seed: u64) -> Result<Trace, NnError> {
        if x.shape() != self.input_shape.as_slice() {
            return Err(NnError::ShapeMismatch(format!(
                "model expects {:?}, got {:?}",
                self.input_shape,
                x.shape()
            )));
        }
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut act = x.clone();
        for (idx, layer) in self.layers.iter().enumerate() {
            let p = &self.params;
            let (next, cache) = match layer.spec {
                LayerSpec::Conv1D { kernel, padding, activation, .. } => {
                    let mut y =
                        conv1d_forward(&act, &p[self.block(layer, 0)], &p[self.block(layer, 1)], kernel, padding)?;
                    if activation == Activation::Relu {
                        y.data_mut().iter_mut().for_each(|v| *v = v.max(0.0));
                    }
                    (y.clone(), Cache::Conv { input: act, output: y })
                }
                LayerSpec::MaxPool1D { pool, stride } => {
                    let (y, argmax) = maxpool1d_forward(&act, pool, stride)?;
                    (y, Cache::Pool { argmax })
                }
                LayerSpec::Dropout { rate } => {
                    if mode == Mode::Train && rate > 0.0 {
                        let mask = dropout_mask(act.len(), rate, derive_seed(dropout_seed, idx as u64));
                        act.data_mut().iter_mut().zip(&mask).for_each(|(v, m)| *v *= m);
                        (act, Cache::Dropout { mask: Some(mask) })
                    } else {
                        (act, Cache::Dropout { mask: None })
                    }
                }
                LayerSpec::Flatten => {
                    let n = act.len();
                    (act.reshape(vec![n])?, Cache::Flatten)
                }
                LayerSpec::Dense { activation, .. } => {
                    let input = act.into_data();
                    let y = dense_forward(&input, &p[self.block(layer, 0)], &p[self.block(layer, 1)], activation)?;
                    (Tensor::flat(y.clone()), Cache::Dense { input, output: y })
                }
                LayerSpec::Lstm { units } => {
                    let lp = LstmParams {
                        units,
                        wx: &p[self.block(layer, 0)],
                        wh: &p[self.block(layer, 1)],
                        b: &p[self.block(layer, 2)],
                    };
                    let (h, cache) = lstm_forward(&act, lp)?;
                    (Tensor::flat(h), Cache::Lstm { input: act, cache })
                }
                LayerSpec::SoftmaxOutput { .. } => break,
            };
            debug_assert!(next.is_finite(), "non-finite activation after layer {idx}");
            caches.push(cache);
            act = next;
        }
        Ok(Trace { caches, logits: act.into_data() })
    }

    pub fn predict_proba(&self, x: &Tensor) -> Result<Vec<f64>, NnError> {
        Ok(softmax(&self.forward(x, Mode::Eval, 0)?.logits))
    }

    /// Gradient of the loss with respect to every parameter, given the
    /// gradient on the logits.
    pub fn backward(&self, trace: Trace, dlogits: &[f64]) -> Result<Vec<f64>, NnError> {
        let mut grads = vec![0.0; self.params.len()];
        self.backward_into(trace, dlogits, &mut grads)?;
        Ok(grads)
    }

    fn backward_into(&self, trace: Trace, dlogits: &[f64], grads: &mut [f64]) -> Result<Tensor, NnError> {
        let mut g = Tensor::flat(dlogits.to_vec());
        let p = &self.params;
        for (layer, cache) in self.layers.iter().zip(trace.caches).rev() {
            g = match (layer.spec, cache) {
                (LayerSpec::Conv1D { kernel, padding, activation, .. }, Cache::Conv { input, output }) => {
                    if activation == Activation::Relu {
                        for (d, o) in g.data_mut().iter_mut().zip(output.data()) {
                            if *o <= 0.0 {
                                *d = 0.0;
                            }
                        }
                    }
                    let (w, b) = (self.block(layer, 0), self.block(layer, 1));
                    let (dw, db) = grads[w.start..b.end].split_at_mut(w.len());
                    conv1d_backward(&input, &p[w], kernel, padding, &g, dw, db)?
                }
                (LayerSpec::MaxPool1D { .. }, Cache::Pool { argmax }) => {
                    maxpool1d_backward(&layer.in_shape, &argmax, &g)?
                }
                (LayerSpec::Dropout { .. }, Cache::Dropout { mask }) => {
                    if let Some(mask) = mask {
                        g.data_mut().iter_mut().zip(&mask).for_each(|(v, m)| *v *= m);
                    }
                    g
                }
                (LayerSpec::Flatten, Cache::Flatten) => g.reshape(layer.in_shape.clone())?,
                (LayerSpec::Dense { activation, .. }, Cache::Dense { input, output }) => {
                    let (w, b) = (self.block(layer, 0), self.block(layer, 1));
                    let (dw, db) = grads[w.start..b.end].split_at_mut(w.len());
                    Tensor::flat(dense_backward(&input, &p[w], &output, activation, g.data(), dw, db)?)
                }
                (LayerSpec::Lstm { units }, Cache::Lstm { input, cache }) => {
                    let (wx, wh, b) = (self.block(layer, 0), self.block(layer, 1), self.block(layer, 2));
                    let lp = LstmParams { units, wx: &p[wx.clone()], wh: &p[wh.clone()], b: &p[b.clone()] };
                    let region = &mut grads[wx.start..b.end];
                    let (gwx, rest) = region.split_at_mut(wx.len());
                    let (gwh, gb) = rest.split_at_mut(wh.len());
                    lstm_backward(&input, lp, &cache, g.data(), LstmGrads { wx: gwx, wh: gwh, b: gb })?
                }
                _ => unreachable!("cache does not match its layer"),
            };
        }
        Ok(g)
    }

    /// Loss, probabilities and parameter gradient for one labelled sample.
    pub fn loss_and_gradient(
        &self,
        x: &Tensor,
        target: &[f64],
        mode: Mode,
        dropout_seed: u64,
    ) -> Result<(f64, Vec<f64>, Vec<f64>), NnError> {
        let trace = self.forward(x, mode, dropout_seed)?;
        let (loss, probs) = softmax_cross_entropy(&trace.logits, target);
        let dlogits: Vec<f64> = probs.iter().zip(target).map(|(p, t)| p - t).collect();
        let grads = self.backward(trace, &dlogits)?;
        Ok((loss, probs, grads))
    }

    /// Gradient of the loss with respect to the input sample (eval mode).
    pub fn input_gradient(&self, x: &Tensor, target: &[f64]) -> Result<Tensor, NnError> {
        let trace = self.forward(x, Mode::Eval, 0)?;
        let (_, probs) = softmax_cross_entropy(&trace.logits, target);
        let dlogits: Vec<f64> = probs.iter().zip(target).map(|(p, t)| p - t).collect();
        let mut scratch = vec![0.0; self.params.len()];
        self.backward_into(trace, &dlogits, &mut scratch)
    }

    /// Text header (format tag, seed, input shape, layers, parameter block
    /// shapes, `END`) followed by the parameters as little-endian f64.
    pub fn save<W: Write>(&self, mut out: W) -> Result<(), NnError> {
        writeln!(out, "{CHECKPOINT_MAGIC}")?;
        writeln!(out, "seed {}", self.seed)?;
        writeln!(out, "input {}", join(&self.input_shape))?;
        writeln!(out, "layers {}", self.spec.layers.len())?;
        for l in &self.spec.layers {
            writeln!(out, "{l}")?;
        }
        for (i, l) in self.layers.iter().enumerate().filter(|(_, l)| !l.blocks.is_empty()) {
            writeln!(out, "params {i} {}", join(&l.blocks))?;
        }
        writeln!(out, "total {}", self.params.len())?;
        writeln!(out, "END")?;
        for p in &self.params {
            out.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load<R: BufRead>(mut input: R) -> Result<Model, NnError> {
        let mut line = String::new();
        let mut next_line = |input: &mut R| -> Result<String, NnError> {
            line.clear();
            if input.read_line(&mut line)? == 0 {
                return Err(NnError::Checkpoint("truncated header".into()));
            }
            Ok(line.trim_end().to_owned())
        };
        let bad = |what: &str| NnError::Checkpoint(format!("bad {what}"));
        if next_line(&mut input)? != CHECKPOINT_MAGIC {
            return Err(bad("format tag"));
        }
        let field = |l: String, key: &str| -> Result<String, NnError> {
            l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')).map(str::to_owned).ok_or_else(|| bad(key))
        };
        let seed = field(next_line(&mut input)?, "seed")?.parse().map_err(|_| bad("seed"))?;
        let input_shape = field(next_line(&mut input)?, "input")?
            .split_whitespace()
            .map(|v| v.parse::<usize>().map_err(|_| bad("input shape")))
            .collect::<Result<Vec<_>, _>>()?;
        let n_layers: usize = field(next_line(&mut input)?, "layers")?.parse().map_err(|_| bad("layer count"))?;
        let mut spec = ModelSpec::default();
        for _ in 0..n_layers {
            spec.layers.push(next_line(&mut input)?.parse()?);
        }
        let mut model = build_model(&spec, &input_shape, seed)?;
        loop {
            let l = next_line(&mut input)?;
            if l == "END" {
                break;
            }
            if let Some(total) = l.strip_prefix("total ") {
                if total.parse::<usize>().ok() != Some(model.params.len()) {
                    return Err(bad("parameter total"));
                }
            }
        }
        let mut buf = [0u8; 8];
        for p in &mut model.params {
            input.read_exact(&mut buf).map_err(|_| NnError::Checkpoint("truncated parameters".into()))?;
            *p = f64::from_le_bytes(buf);
        }
        if input.read(&mut buf)? != 0 {
            return Err(NnError::Checkpoint("trailing bytes after parameters".into()));
        }
        Ok(model)
    }
}

pub const CHECKPOINT_MAGIC: &str = "SERKIT-CHECKPOINT 1";

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cnn_preset_lengths() {
        let spec = cnn_preset(42);
        assert_eq!(spec.notes.len(), 1);
        let m = build_model(&spec, &[42, 1], 0).unwrap();
        let flat = m.layer_shapes().into_iter().find(|s| s.len() == 1).unwrap();
        assert_eq!(flat, vec![2 * 64]);

        let spec = cnn_preset(60);
        assert_eq!(spec.notes.len(), 1);
        let spec = cnn_preset(100);
        assert!(spec.notes.is_empty());
        assert!(build_model(&spec, &[100, 1], 0).is_ok());
    }

    #[test]
    fn undersized_pool_is_rejected() {
        let spec = ModelSpec {
            layers: vec![
                LayerSpec::MaxPool1D { pool: 5, stride: 2 },
                LayerSpec::Flatten,
                LayerSpec::Dense { units: 8, activation: Activation::Linear },
                LayerSpec::SoftmaxOutput { classes: 8 },
            ],
            notes: vec![],
        };
        assert!(matches!(
            build_model(&spec, &[4, 1], 0),
            Err(NnError::InvalidArchitectureForInputLength { layer: 0, len: 4, needed: 5 })
        ));
    }

    #[test]
    fn dense_parameter_count() {
        let m = build_model(&cnn_preset(42), &[42, 1], 0).unwrap();
        let dense = m.layer_param_counts()[m.spec().layers.iter().position(|l| *l == LayerSpec::Flatten).unwrap() + 1];
        assert_eq!(dense, 64 * 2 * 32 + 32);
    }

    #[test]
    fn init_is_seeded() {
        let a = build_model(&lstm_preset(), &[5, 3], 7).unwrap();
        let b = build_model(&lstm_preset(), &[5, 3], 7).unwrap();
        let c = build_model(&lstm_preset(), &[5, 3], 8).unwrap();
        assert_eq!(a.params(), b.params());
        assert_ne!(a.params(), c.params());
    }

    #[test]
    fn checkpoint_round_trip() {
        let m = build_model(&cnn_preset(20), &[20, 1], 3).unwrap();
        let mut buf = Vec::new();
        m.save(&mut buf).unwrap();
        let back = Model::load(&buf[..]).unwrap();
        assert_eq!(back.params(), m.params());
        assert_eq!(back.spec().layers, m.spec().layers);
        assert_eq!(back.seed(), 3);
        assert!(Model::load(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn layer_spec_text_round_trip() {
        for l in cnn_preset(42).layers.into_iter().chain(lstm_preset().layers) {
            assert_eq!(l.to_string().parse::<LayerSpec>().unwrap(), l);
        }
    }
}
