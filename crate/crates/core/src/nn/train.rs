use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use super::layers::Mode;
use super::model::{Model, N_CLASSES};
use super::optim::{adam_update, softmax_cross_entropy, AdamConfig, AdamState};
use super::{NnError, Tensor};
use crate::audio_io::Emotion;
use crate::dataset::argmax;
use crate::rng::{derive_seed, Xoshiro256};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub shuffle_seed: u64,
    pub dropout_seed: u64,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 50, batch_size: 64, shuffle_seed: 0, dropout_seed: 0, adam: AdamConfig::default() }
    }
}

/// Labelled model inputs.
#[derive(Debug, Clone, Default)]
pub struct Samples {
    pub inputs: Vec<Tensor>,
    pub labels: Vec<Emotion>,
}

impl Samples {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Each matrix row becomes a `[D, 1]` sequence.
    pub fn from_rows(x: &crate::matrix::Matrix, labels: &[Emotion]) -> Self {
        Self { inputs: x.iter_rows().map(|r| Tensor::column(r.to_vec())).collect(), labels: labels.to_vec() }
    }
}

/// `counts[true][predicted]` in canonical label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub counts: [[u64; N_CLASSES]; N_CLASSES],
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..N_CLASSES).map(|i| self.counts[i][i]).sum()
    }

    /// Trace over total; 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.correct() as f64 / n as f64,
        }
    }

    pub fn row_sums(&self) -> [u64; N_CLASSES] {
        self.counts.map(|r| r.iter().sum())
    }

    /// Per-class recall; `None` for classes absent from the evaluated set.
    pub fn recall(&self) -> [Option<f64>; N_CLASSES] {
        let rows = self.row_sums();
        std::array::from_fn(|i| (rows[i] > 0).then(|| self.counts[i][i] as f64 / rows[i] as f64))
    }

    /// Label header row and column, true classes down the side.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let names: Vec<&str> = Emotion::ALL.iter().map(|e| e.name()).collect();
        writeln!(out, "true\\pred,{}", names.join(","))?;
        for (name, row) in names.iter().zip(&self.counts) {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(out, "{name},{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub train_acc: f64,
    pub test_acc: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochStats>,
    /// Confusion of the final model on the evaluation set.
    pub confusion: Confusion,
    pub test_accuracy: f64,
    pub notes: Vec<String>,
}

impl TrainReport {
    /// `epoch,loss,train_acc,test_acc`: the reproducible part of the curves.
    pub fn write_curves_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "epoch,loss,train_acc,test_acc")?;
        for e in &self.epochs {
            writeln!(out, "{},{},{},{}", e.epoch, e.loss, e.train_acc, e.test_acc)?;
        }
        Ok(())
    }

    /// `epoch,seconds`: wall-clock per epoch.
    pub fn write_timing_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "epoch,seconds")?;
        for e in &self.epochs {
            writeln!(out, "{},{:.6}", e.epoch, e.seconds)?;
        }
        Ok(())
    }

    pub fn mean_epoch_seconds(&self) -> f64 {
        if self.epochs.is_empty() {
            0.0
        } else {
            self.epochs.iter().map(|e| e.seconds).sum::<f64>() / self.epochs.len() as f64
        }
    }
}

struct BatchSum {
    loss: f64,
    correct: usize,
    grads: Vec<f64>,
}

fn one_hot_row(e: Emotion) -> [f64; N_CLASSES] {
    let mut t = [0.0; N_CLASSES];
    t[e.index()] = 1.0;
    t
}

/// Sums per-sample results over `idx` with a fixed binary-tree topology, so
/// the floating-point result is independent of how work is scheduled.
fn reduce(
    model: &Model,
    data: &Samples,
    idx: &[usize],
    first_pos: usize,
    step_seed: u64,
) -> Result<BatchSum, NnError> {
    if idx.len() == 1 {
        let i = idx[0];
        let seed = derive_seed(step_seed, first_pos as u64);
        let (loss, probs, grads) =
            model.loss_and_gradient(&data.inputs[i], &one_hot_row(data.labels[i]), Mode::Train, seed)?;
        let correct = usize::from(argmax(&probs) == data.labels[i].index());
        return Ok(BatchSum { loss, correct, grads });
    }
    let mid = idx.len() / 2;
    let (a, b) = rayon::join(
        || reduce(model, data, &idx[..mid], first_pos, step_seed),
        || reduce(model, data, &idx[mid..], first_pos + mid, step_seed),
    );
    let (mut a, b) = (a?, b?);
    a.loss += b.loss;
    a.correct += b.correct;
    a.grads.iter_mut().zip(&b.grads).for_each(|(x, y)| *x += y);
    Ok(a)
}

/// Mini-batch Adam on the mean cross-entropy. Each epoch reshuffles with
/// `derive_seed(shuffle_seed, epoch)`; the dropout masks of batch step `s`,
/// sample position `j` derive from `(dropout_seed, s, j)`. After every
/// epoch the model is evaluated on `test`.
pub fn train(model: &mut Model, train: &Samples, test: &Samples, cfg: &TrainConfig) -> Result<TrainReport, NnError> {
    if cfg.batch_size == 0 {
        return Err(NnError::InvalidSpec("batch size must be positive".into()));
    }
    if cfg.epochs > 0 && train.is_empty() {
        return Err(NnError::ShapeMismatch("no training samples".into()));
    }
    let mut adam = AdamState::new(model.n_params(), cfg.adam);
    let mut epochs = Vec::with_capacity(cfg.epochs);
    let mut step = 0u64;
    for epoch in 0..cfg.epochs {
        let start = Instant::now();
        let mut order: Vec<usize> = (0..train.len()).collect();
        Xoshiro256::new(derive_seed(cfg.shuffle_seed, epoch as u64)).shuffle(&mut order);
        let (mut loss, mut correct) = (0.0, 0);
        for batch in order.chunks(cfg.batch_size) {
            let sum = reduce(model, train, batch, 0, derive_seed(cfg.dropout_seed, step))?;
            let scale = 1.0 / batch.len() as f64;
            let grads: Vec<f64> = sum.grads.iter().map(|g| g * scale).collect();
            adam_update(model.params_mut(), &grads, &mut adam)?;
            loss += sum.loss;
            correct += sum.correct;
            step += 1;
        }
        if !model.params().iter().all(|p| p.is_finite()) {
            return Err(NnError::Diverged { epoch: epoch + 1 });
        }
        let test_acc = evaluate(model, test)?.accuracy();
        let stats = EpochStats {
            epoch: epoch + 1,
            loss: loss / train.len() as f64,
            train_acc: correct as f64 / train.len() as f64,
            test_acc,
            seconds: start.elapsed().as_secs_f64(),
        };
        log::info!(
            "epoch {:>3}: loss {:.4} train_acc {:.3} test_acc {:.3} ({:.1}s)",
            stats.epoch,
            stats.loss,
            stats.train_acc,
            stats.test_acc,
            stats.seconds
        );
        epochs.push(stats);
    }
    let confusion = evaluate(model, test)?;
    Ok(TrainReport { epochs, test_accuracy: confusion.accuracy(), confusion, notes: model.spec().notes.clone() })
}

/// Argmax prediction per sample, tallied as `confusion[true][pred]`.
pub fn evaluate(model: &Model, data: &Samples) -> Result<Confusion, NnError> {
    let preds = data
        .inputs
        .par_iter()
        .map(|x| model.predict_proba(x).map(|p| argmax(&p)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut c = Confusion::default();
    for (p, e) in preds.into_iter().zip(&data.labels) {
        c.counts[e.index()][p] += 1;
    }
    Ok(c)
}

/// Mean loss of the model over `data` in eval mode.
pub fn mean_loss(model: &Model, data: &Samples) -> Result<f64, NnError> {
    let losses = data
        .inputs
        .par_iter()
        .zip(&data.labels)
        .map(|(x, e)| {
            let logits = model.forward(x, Mode::Eval, 0)?.logits;
            Ok(softmax_cross_entropy(&logits, &one_hot_row(*e)).0)
        })
        .collect::<Result<Vec<_>, NnError>>()?;
    Ok(losses.iter().sum::<f64>() / losses.len().max(1) as f64)
}
