//! A small feed-forward network with manual backpropagation and SGD.
//!
//! The architecture is a stack of affine+ReLU hidden layers, a bias-free
//! linear "junction" that maps the backbone width down to the embedding
//! dimension `d` (its output is the feature vector), and a classification
//! head that is either a [`FixedClassifier`] or a weight-normalized
//! trainable baseline. Fixed head weights receive no updates, ever; the
//! trainable baseline re-normalizes its rows to unit length after every
//! SGD step and keeps its bias at zero, so the two heads differ only in
//! whether the directions move.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{nll_and_probs, ClassifierError, FixedClassifier};
use crate::data::Dataset;
use crate::geometry::vecmath::{dot, norm};
use crate::metrics;
use crate::rng;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("input has dimension {got}, network expects {want}")]
    Shape { want: usize, got: usize },
    #[error("training diverged at epoch {epoch}: loss {loss}")]
    TrainingDiverged { epoch: usize, loss: f64 },
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error("checkpoint format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Dense affine map, weights stored row-major (`out_dim` x `in_dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Affine {
    fn forward(&self, x: &[f64]) -> Vec<f64> {
        (0..self.out_dim)
            .map(|r| {
                let row = &self.weights[r * self.in_dim..(r + 1) * self.in_dim];
                dot(row, x) + self.biases[r]
            })
            .collect()
    }
}

/// Hidden layer: affine map plus an optional ReLU.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayer {
    pub affine: Affine,
    pub relu: bool,
}

/// Bias-free linear junction onto the embedding space; its output is the
/// feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Junction {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
}

impl Junction {
    fn forward(&self, x: &[f64]) -> Vec<f64> {
        (0..self.out_dim)
            .map(|r| dot(&self.weights[r * self.in_dim..(r + 1) * self.in_dim], x))
            .collect()
    }
}

/// Learned classification head: unit-norm rows, zero bias.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainableHead {
    pub rows: Vec<Vec<f64>>,
    /// Re-normalize rows after every SGD step (the default baseline).
    pub normalize: bool,
}

impl TrainableHead {
    fn logits(&self, f: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| dot(r, f)).collect()
    }
}

/// The classification head variants.
#[derive(Debug, Clone, PartialEq)]
pub enum Head {
    Fixed(FixedClassifier),
    Trainable(TrainableHead),
}

impl Head {
    pub fn dim(&self) -> usize {
        match self {
            Head::Fixed(c) => c.dim(),
            Head::Trainable(t) => t.rows[0].len(),
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            Head::Fixed(c) => c.num_real(),
            Head::Trainable(t) => t.rows.len(),
        }
    }

    fn target_index(&self, label: usize) -> usize {
        match self {
            Head::Fixed(c) => c.assignment()[label],
            Head::Trainable(_) => label,
        }
    }

    fn logits(&self, f: &[f64]) -> Result<Vec<f64>, NetworkError> {
        match self {
            Head::Fixed(c) => Ok(c.logits(f)?.into_values()),
            Head::Trainable(t) => Ok(t.logits(f)),
        }
    }

    /// Direction a class's features are pulled toward.
    pub fn class_direction(&self, class: usize) -> &[f64] {
        match self {
            Head::Fixed(c) => c.class_direction(class),
            Head::Trainable(t) => &t.rows[class],
        }
    }

    fn predict(&self, f: &[f64]) -> Result<usize, NetworkError> {
        match self {
            Head::Fixed(c) => Ok(c.predict(f)?),
            Head::Trainable(t) => {
                let z = t.logits(f);
                let mut best = 0;
                for (j, &v) in z.iter().enumerate() {
                    if v > z[best] {
                        best = j;
                    }
                }
                Ok(best)
            }
        }
    }
}

/// Head requested at initialization time.
pub enum HeadSpec {
    Fixed(FixedClassifier),
    Trainable { num_classes: usize, normalize: bool },
}

/// Hidden layers, junction, head.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    pub hidden: Vec<HiddenLayer>,
    pub junction: Junction,
    pub head: Head,
}

/// Hyperparameters of one training run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 10,
            batch_size: 32,
            seed: 42,
            shuffle: true,
        }
    }
}

/// Metrics recorded after each epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_acc: f64,
    /// Per-class angle (radians) between the train-split mean feature and
    /// the class direction; `None` when the class has no samples.
    pub mean_angles: Vec<Option<f64>>,
    pub min_pairwise_mean_angle: Option<f64>,
}

/// Full per-epoch log of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRun {
    pub num_classes: usize,
    pub records: Vec<EpochRecord>,
}

impl TrainRun {
    pub fn final_test_accuracy(&self) -> Option<f64> {
        self.records.last().map(|r| r.test_acc)
    }

    /// CSV columns: epoch, train_loss, train_acc, test_acc,
    /// mean_angle_class_0..K-1, min_pairwise_mean_angle.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let angle_cols: Vec<String> = (0..self.num_classes)
            .map(|c| format!("mean_angle_class_{c}"))
            .collect();
        writeln!(
            w,
            "epoch,train_loss,train_acc,test_acc,{},min_pairwise_mean_angle",
            angle_cols.join(",")
        )?;
        for r in &self.records {
            let angles: Vec<String> = r.mean_angles.iter().map(|a| fmt_opt(*a)).collect();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.epoch,
                r.train_loss,
                r.train_acc,
                r.test_acc,
                angles.join(","),
                fmt_opt(r.min_pairwise_mean_angle)
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        fs::write(path, buf)
    }

    pub fn from_csv(path: &Path) -> Result<Self, NetworkError> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| NetworkError::Format("empty metrics csv".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 5 {
            return Err(NetworkError::Format("too few metric columns".into()));
        }
        let num_classes = cols.len() - 5;
        let mut records = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != cols.len() {
                return Err(NetworkError::Format(format!("ragged metrics row `{line}`")));
            }
            let parse = |s: &str| -> Result<f64, NetworkError> {
                s.parse()
                    .map_err(|_| NetworkError::Format(format!("bad float `{s}`")))
            };
            let mean_angles = f[4..4 + num_classes]
                .iter()
                .map(|s| parse(s).map(opt_of))
                .collect::<Result<Vec<_>, _>>()?;
            records.push(EpochRecord {
                epoch: f[0]
                    .parse()
                    .map_err(|_| NetworkError::Format(format!("bad epoch `{}`", f[0])))?,
                train_loss: parse(f[1])?,
                train_acc: parse(f[2])?,
                test_acc: parse(f[3])?,
                mean_angles,
                min_pairwise_mean_angle: opt_of(parse(f[cols.len() - 1])?),
            });
        }
        Ok(TrainRun {
            num_classes,
            records,
        })
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "NaN".to_string(),
    }
}

fn opt_of(x: f64) -> Option<f64> {
    if x.is_nan() {
        None
    } else {
        Some(x)
    }
}

/// Builds a model with Glorot-uniform weights and zero biases.
///
/// `layer_widths[0]` is the input width; the remaining entries are hidden
/// widths (each hidden layer uses ReLU). The junction maps the last width
/// to `d`. Trainable head rows are drawn and then normalized. The draw
/// order (hidden layers, junction, head) is fixed, so a seed fully
/// determines the model.
pub fn init_model(
    layer_widths: &[usize],
    d: usize,
    head_spec: HeadSpec,
    seed: u64,
) -> Result<NetworkModel, NetworkError> {
    if layer_widths.is_empty() {
        return Err(NetworkError::InvalidArchitecture(
            "layer_widths must contain at least the input width".into(),
        ));
    }
    if layer_widths.iter().any(|&w| w == 0) || d == 0 {
        return Err(NetworkError::InvalidArchitecture(
            "all widths must be at least 1".into(),
        ));
    }
    if let HeadSpec::Fixed(c) = &head_spec {
        if c.dim() != d {
            return Err(NetworkError::InvalidArchitecture(format!(
                "junction output {d} does not match head dimension {}",
                c.dim()
            )));
        }
    }

    let mut rng = rng::stream(seed, rng::STREAM_INIT);
    let mut glorot = |fan_in: usize, fan_out: usize, n: usize| -> Vec<f64> {
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        (0..n)
            .map(|_| rng::uniform(&mut rng, -limit, limit))
            .collect()
    };

    let mut hidden = Vec::new();
    for w in layer_widths.windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        hidden.push(HiddenLayer {
            affine: Affine {
                in_dim: fan_in,
                out_dim: fan_out,
                weights: glorot(fan_in, fan_out, fan_in * fan_out),
                biases: vec![0.0; fan_out],
            },
            relu: true,
        });
    }

    let last = *layer_widths.last().unwrap();
    let junction = Junction {
        in_dim: last,
        out_dim: d,
        weights: glorot(last, d, last * d),
    };

    let head = match head_spec {
        HeadSpec::Fixed(c) => Head::Fixed(c),
        HeadSpec::Trainable {
            num_classes,
            normalize,
        } => {
            if num_classes < 2 {
                return Err(NetworkError::InvalidArchitecture(
                    "trainable head needs at least 2 classes".into(),
                ));
            }
            let rows = (0..num_classes)
                .map(|_| {
                    let row = glorot(d, num_classes, d);
                    crate::geometry::vecmath::normalized(&row)
                })
                .collect();
            Head::Trainable(TrainableHead { rows, normalize })
        }
    };

    Ok(NetworkModel {
        hidden,
        junction,
        head,
    })
}

/// Gradient buffers mirroring the trainable parameter layout.
struct Gradients {
    hidden_w: Vec<Vec<f64>>,
    hidden_b: Vec<Vec<f64>>,
    junction_w: Vec<f64>,
    head_rows: Vec<Vec<f64>>,
}

impl NetworkModel {
    pub fn input_dim(&self) -> usize {
        self.hidden
            .first()
            .map(|l| l.affine.in_dim)
            .unwrap_or(self.junction.in_dim)
    }

    pub fn embedding_dim(&self) -> usize {
        self.junction.out_dim
    }

    pub fn num_classes(&self) -> usize {
        self.head.num_classes()
    }

    /// Total number of trainable scalar parameters (fixed head excluded).
    pub fn num_trainable_params(&self) -> usize {
        let hidden: usize = self
            .hidden
            .iter()
            .map(|l| l.affine.weights.len() + l.affine.biases.len())
            .sum();
        let head = match &self.head {
            Head::Fixed(_) => 0,
            Head::Trainable(t) => t.rows.len() * t.rows[0].len(),
        };
        hidden + self.junction.weights.len() + head
    }

    fn check_input(&self, x: &[f64]) -> Result<(), NetworkError> {
        if x.len() != self.input_dim() {
            return Err(NetworkError::Shape {
                want: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    fn forward_one(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>), NetworkError> {
        self.check_input(x)?;
        let mut h = x.to_vec();
        for layer in &self.hidden {
            let mut a = layer.affine.forward(&h);
            if layer.relu {
                for v in &mut a {
                    *v = v.max(0.0);
                }
            }
            h = a;
        }
        let f = self.junction.forward(&h);
        let z = self.head.logits(&f)?;
        Ok((f, z))
    }

    /// Features (junction output) and logits for a batch.
    pub fn forward(
        &self,
        x_batch: &[Vec<f64>],
    ) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>), NetworkError> {
        let mut features = Vec::with_capacity(x_batch.len());
        let mut logits = Vec::with_capacity(x_batch.len());
        for x in x_batch {
            let (f, z) = self.forward_one(x)?;
            features.push(f);
            logits.push(z);
        }
        Ok((features, logits))
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, NetworkError> {
        let (f, _) = self.forward_one(x)?;
        self.head.predict(&f)
    }

    /// Mean cross-entropy of a batch without taking a step.
    pub fn batch_loss(&self, x_batch: &[Vec<f64>], y_batch: &[usize]) -> Result<f64, NetworkError> {
        if x_batch.is_empty() {
            return Err(ClassifierError::EmptyBatch.into());
        }
        let n = x_batch.len() as f64;
        let mut total = 0.0;
        for (x, &y) in x_batch.iter().zip(y_batch) {
            let (_, z) = self.forward_one(x)?;
            let (nll, _) = nll_and_probs(&z, self.head.target_index(y));
            total += nll / n;
        }
        Ok(total)
    }

    /// Trainable parameters flattened in a fixed order: hidden weights and
    /// biases per layer, junction weights, trainable head rows.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in &self.hidden {
            out.extend_from_slice(&layer.affine.weights);
            out.extend_from_slice(&layer.affine.biases);
        }
        out.extend_from_slice(&self.junction.weights);
        if let Head::Trainable(t) = &self.head {
            for row in &t.rows {
                out.extend_from_slice(row);
            }
        }
        out
    }

    /// Inverse of [`Self::flat_params`].
    pub fn set_flat_params(&mut self, flat: &[f64]) {
        let mut it = flat.iter();
        let mut take = |dst: &mut [f64]| {
            for v in dst {
                *v = *it.next().expect("flat parameter vector too short");
            }
        };
        for layer in &mut self.hidden {
            take(&mut layer.affine.weights);
            take(&mut layer.affine.biases);
        }
        take(&mut self.junction.weights);
        if let Head::Trainable(t) = &mut self.head {
            for row in &mut t.rows {
                take(row);
            }
        }
        assert!(it.next().is_none(), "flat parameter vector too long");
    }

    /// Fraction of samples classified correctly.
    pub fn accuracy(&self, samples: &[crate::data::Sample]) -> Result<f64, NetworkError> {
        if samples.is_empty() {
            return Ok(0.0);
        }
        let mut correct = 0usize;
        for s in samples {
            if self.predict(&s.x)? == s.y {
                correct += 1;
            }
        }
        Ok(correct as f64 / samples.len() as f64)
    }

    /// One SGD step on a mini-batch. Returns the pre-step mean batch loss.
    ///
    /// Backpropagates through the head softmax, the junction and each
    /// hidden layer (ReLU subgradient at 0 is 0). Fixed-head weights are
    /// not touched; trainable-head rows are re-normalized after the step.
    pub fn backward_and_step(
        &mut self,
        x_batch: &[Vec<f64>],
        y_batch: &[usize],
        lr: f64,
    ) -> Result<f64, NetworkError> {
        if x_batch.is_empty() {
            return Err(ClassifierError::EmptyBatch.into());
        }
        if x_batch.len() != y_batch.len() {
            return Err(ClassifierError::BatchMismatch {
                features: x_batch.len(),
                labels: y_batch.len(),
            }
            .into());
        }
        let num_classes = self.head.num_classes();
        for &y in y_batch {
            if y >= num_classes {
                return Err(ClassifierError::InvalidLabel {
                    label: y,
                    num_real: num_classes,
                }
                .into());
            }
        }

        let n = x_batch.len() as f64;
        let mut grads = Gradients {
            hidden_w: self
                .hidden
                .iter()
                .map(|l| vec![0.0; l.affine.weights.len()])
                .collect(),
            hidden_b: self
                .hidden
                .iter()
                .map(|l| vec![0.0; l.affine.biases.len()])
                .collect(),
            junction_w: vec![0.0; self.junction.weights.len()],
            head_rows: match &self.head {
                Head::Fixed(_) => Vec::new(),
                Head::Trainable(t) => t.rows.iter().map(|r| vec![0.0; r.len()]).collect(),
            },
        };

        let mut total_loss = 0.0;
        for (x, &y) in x_batch.iter().zip(y_batch) {
            self.check_input(x)?;

            // Forward, keeping pre-activations for the backward pass.
            let mut pre: Vec<Vec<f64>> = Vec::with_capacity(self.hidden.len());
            let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.hidden.len() + 1);
            acts.push(x.clone());
            for layer in &self.hidden {
                let a = layer.affine.forward(acts.last().unwrap());
                let h = if layer.relu {
                    a.iter().map(|v| v.max(0.0)).collect()
                } else {
                    a.clone()
                };
                pre.push(a);
                acts.push(h);
            }
            let f = self.junction.forward(acts.last().unwrap());
            let z = self.head.logits(&f)?;
            let target = self.head.target_index(y);
            let (nll, mut p) = nll_and_probs(&z, target);
            total_loss += nll / n;

            // d loss / d logits, already divided by the batch size.
            p[target] -= 1.0;
            for v in &mut p {
                *v /= n;
            }

            // Head: gradient wrt the feature (and the rows, when trainable).
            let mut df = vec![0.0; f.len()];
            match &self.head {
                Head::Fixed(c) => {
                    for (pj, w) in p.iter().zip(c.weights().rows()) {
                        for (g, wc) in df.iter_mut().zip(w) {
                            *g += pj * wc;
                        }
                    }
                }
                Head::Trainable(t) => {
                    for ((pj, row), grow) in p.iter().zip(&t.rows).zip(&mut grads.head_rows) {
                        for (g, wc) in df.iter_mut().zip(row) {
                            *g += pj * wc;
                        }
                        for (gr, fc) in grow.iter_mut().zip(&f) {
                            *gr += pj * fc;
                        }
                    }
                }
            }

            // Junction (no bias): dJ[r][c] = df[r] * h[c]; dh = J^T df.
            let h_last = acts.last().unwrap();
            let mut dh = vec![0.0; self.junction.in_dim];
            for r in 0..self.junction.out_dim {
                let row = &self.junction.weights[r * self.junction.in_dim..];
                for c in 0..self.junction.in_dim {
                    grads.junction_w[r * self.junction.in_dim + c] += df[r] * h_last[c];
                    dh[c] += row[c] * df[r];
                }
            }

            // Hidden layers, last to first.
            for l in (0..self.hidden.len()).rev() {
                let layer = &self.hidden[l];
                let mut delta = dh.clone();
                if layer.relu {
                    for (dv, a) in delta.iter_mut().zip(&pre[l]) {
                        if *a <= 0.0 {
                            *dv = 0.0;
                        }
                    }
                }
                let input = &acts[l];
                let mut dprev = vec![0.0; layer.affine.in_dim];
                for r in 0..layer.affine.out_dim {
                    let row = &layer.affine.weights[r * layer.affine.in_dim..];
                    for c in 0..layer.affine.in_dim {
                        grads.hidden_w[l][r * layer.affine.in_dim + c] += delta[r] * input[c];
                        dprev[c] += row[c] * delta[r];
                    }
                    grads.hidden_b[l][r] += delta[r];
                }
                dh = dprev;
            }
        }

        if !total_loss.is_finite() {
            return Err(NetworkError::TrainingDiverged {
                epoch: 0,
                loss: total_loss,
            });
        }

        // Apply the step.
        for (l, layer) in self.hidden.iter_mut().enumerate() {
            for (w, g) in layer.affine.weights.iter_mut().zip(&grads.hidden_w[l]) {
                *w -= lr * g;
            }
            for (b, g) in layer.affine.biases.iter_mut().zip(&grads.hidden_b[l]) {
                *b -= lr * g;
            }
        }
        for (w, g) in self.junction.weights.iter_mut().zip(&grads.junction_w) {
            *w -= lr * g;
        }
        if let Head::Trainable(t) = &mut self.head {
            for (row, g) in t.rows.iter_mut().zip(&grads.head_rows) {
                for (w, gv) in row.iter_mut().zip(g) {
                    *w -= lr * gv;
                }
                if t.normalize {
                    let nrm = norm(row);
                    if nrm > 0.0 {
                        for w in row.iter_mut() {
                            *w /= nrm;
                        }
                    }
                }
            }
        }

        Ok(total_loss)
    }

    /// Runs `cfg.epochs` of shuffled mini-batch SGD, recording per-epoch
    /// metrics. Deterministic given the seed; each epoch's shuffle draws
    /// from its own stream keyed by the epoch index.
    pub fn train(&mut self, ds: &Dataset, cfg: &TrainConfig) -> Result<TrainRun, NetworkError> {
        self.train_observed(ds, cfg, |_, _| {})
    }

    /// [`Self::train`] with a per-epoch observer (used for feature dumps).
    pub fn train_observed(
        &mut self,
        ds: &Dataset,
        cfg: &TrainConfig,
        mut observer: impl FnMut(usize, &NetworkModel),
    ) -> Result<TrainRun, NetworkError> {
        let n = ds.train.len();
        if n == 0 && cfg.epochs > 0 {
            return Err(NetworkError::InvalidArchitecture(
                "cannot train on an empty train split".into(),
            ));
        }
        let num_classes = self.head.num_classes();
        let mut records = Vec::with_capacity(cfg.epochs);
        for epoch in 1..=cfg.epochs {
            let mut order: Vec<usize> = (0..n).collect();
            if cfg.shuffle {
                let mut shuffle_rng = rng::stream(cfg.seed, rng::STREAM_SHUFFLE + epoch as u64);
                order.shuffle(&mut shuffle_rng);
            }
            let mut loss_sum = 0.0;
            for chunk in order.chunks(cfg.batch_size.max(1)) {
                let x_batch: Vec<Vec<f64>> = chunk.iter().map(|&i| ds.train[i].x.clone()).collect();
                let y_batch: Vec<usize> = chunk.iter().map(|&i| ds.train[i].y).collect();
                let batch_loss = self
                    .backward_and_step(&x_batch, &y_batch, cfg.learning_rate)
                    .map_err(|e| match e {
                        NetworkError::TrainingDiverged { loss, .. } => {
                            NetworkError::TrainingDiverged { epoch, loss }
                        }
                        other => other,
                    })?;
                loss_sum += batch_loss * chunk.len() as f64;
            }
            let train_loss = loss_sum / n as f64;

            records.push(self.epoch_metrics(epoch, train_loss, ds, num_classes)?);
            observer(epoch, self);
        }
        Ok(TrainRun {
            num_classes,
            records,
        })
    }

    fn epoch_metrics(
        &self,
        epoch: usize,
        train_loss: f64,
        ds: &Dataset,
        num_classes: usize,
    ) -> Result<EpochRecord, NetworkError> {
        let train_acc = self.accuracy(&ds.train)?;
        let test_acc = self.accuracy(&ds.test)?;
        let (features, labels) = self.train_features(ds)?;
        let dirs: Vec<Vec<f64>> = (0..num_classes)
            .map(|c| self.head.class_direction(c).to_vec())
            .collect();
        let mean_angles = metrics::mean_direction_angles(&dirs, &features, &labels);
        let means = metrics::class_means(num_classes, &features, &labels);
        Ok(EpochRecord {
            epoch,
            train_loss,
            train_acc,
            test_acc,
            mean_angles,
            min_pairwise_mean_angle: metrics::min_pairwise_angle(&means),
        })
    }

    /// Features of the train split in dataset order, with labels.
    pub fn train_features(
        &self,
        ds: &Dataset,
    ) -> Result<(Vec<Vec<f64>>, Vec<usize>), NetworkError> {
        let xs: Vec<Vec<f64>> = ds.train.iter().map(|s| s.x.clone()).collect();
        let (features, _) = self.forward(&xs)?;
        Ok((features, ds.train.iter().map(|s| s.y).collect()))
    }

    /// Writes the checkpoint: `model.json` metadata plus one CSV blob per
    /// weight tensor.
    pub fn save_checkpoint(&self, dir: &Path) -> Result<(), NetworkError> {
        fs::create_dir_all(dir)?;
        let mut hidden_meta = Vec::new();
        for (i, layer) in self.hidden.iter().enumerate() {
            write_matrix_csv(
                &dir.join(format!("hidden_{i}_weights.csv")),
                &layer.affine.weights,
                layer.affine.in_dim,
            )?;
            write_matrix_csv(
                &dir.join(format!("hidden_{i}_biases.csv")),
                &layer.affine.biases,
                layer.affine.biases.len(),
            )?;
            hidden_meta.push(HiddenMeta {
                in_dim: layer.affine.in_dim,
                out_dim: layer.affine.out_dim,
                relu: layer.relu,
            });
        }
        write_matrix_csv(
            &dir.join("junction.csv"),
            &self.junction.weights,
            self.junction.in_dim,
        )?;
        let head_meta = match &self.head {
            Head::Fixed(c) => {
                c.save(
                    &dir.join("classifier.json"),
                    &dir.join("classifier_weights.csv"),
                )?;
                HeadMeta::Fixed
            }
            Head::Trainable(t) => {
                let flat: Vec<f64> = t.rows.iter().flatten().copied().collect();
                write_matrix_csv(&dir.join("head.csv"), &flat, t.rows[0].len())?;
                HeadMeta::Trainable {
                    num_classes: t.rows.len(),
                    normalize: t.normalize,
                }
            }
        };
        let meta = ModelMeta {
            hidden: hidden_meta,
            junction_in: self.junction.in_dim,
            junction_out: self.junction.out_dim,
            head: head_meta,
        };
        fs::write(
            dir.join("model.json"),
            serde_json::to_string_pretty(&meta).unwrap(),
        )?;
        Ok(())
    }

    pub fn load_checkpoint(dir: &Path) -> Result<Self, NetworkError> {
        let meta: ModelMeta = serde_json::from_str(&fs::read_to_string(dir.join("model.json"))?)
            .map_err(|e| NetworkError::Format(e.to_string()))?;
        let mut hidden = Vec::new();
        for (i, h) in meta.hidden.iter().enumerate() {
            let weights = read_matrix_csv(&dir.join(format!("hidden_{i}_weights.csv")))?;
            let biases = read_matrix_csv(&dir.join(format!("hidden_{i}_biases.csv")))?;
            if weights.len() != h.in_dim * h.out_dim || biases.len() != h.out_dim {
                return Err(NetworkError::Format(format!(
                    "hidden layer {i} blob size mismatch"
                )));
            }
            hidden.push(HiddenLayer {
                affine: Affine {
                    in_dim: h.in_dim,
                    out_dim: h.out_dim,
                    weights,
                    biases,
                },
                relu: h.relu,
            });
        }
        let junction_w = read_matrix_csv(&dir.join("junction.csv"))?;
        if junction_w.len() != meta.junction_in * meta.junction_out {
            return Err(NetworkError::Format("junction blob size mismatch".into()));
        }
        let head = match meta.head {
            HeadMeta::Fixed => Head::Fixed(FixedClassifier::load(&dir.join("classifier.json"))?),
            HeadMeta::Trainable {
                num_classes,
                normalize,
            } => {
                let flat = read_matrix_csv(&dir.join("head.csv"))?;
                if num_classes == 0 || flat.len() % num_classes != 0 {
                    return Err(NetworkError::Format("head blob size mismatch".into()));
                }
                let d = flat.len() / num_classes;
                let rows = flat.chunks(d).map(|c| c.to_vec()).collect();
                Head::Trainable(TrainableHead { rows, normalize })
            }
        };
        Ok(NetworkModel {
            hidden,
            junction: Junction {
                in_dim: meta.junction_in,
                out_dim: meta.junction_out,
                weights: junction_w,
            },
            head,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct HiddenMeta {
    in_dim: usize,
    out_dim: usize,
    relu: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum HeadMeta {
    Fixed,
    Trainable { num_classes: usize, normalize: bool },
}

#[derive(Serialize, Deserialize)]
struct ModelMeta {
    hidden: Vec<HiddenMeta>,
    junction_in: usize,
    junction_out: usize,
    head: HeadMeta,
}

fn write_matrix_csv(path: &Path, values: &[f64], row_len: usize) -> std::io::Result<()> {
    let mut buf = String::new();
    for row in values.chunks(row_len.max(1)) {
        let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        buf.push_str(&line.join(","));
        buf.push('\n');
    }
    fs::write(path, buf)
}

fn read_matrix_csv(path: &Path) -> Result<Vec<f64>, NetworkError> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        for field in line.split(',') {
            out.push(
                field
                    .parse()
                    .map_err(|_| NetworkError::Format(format!("bad float `{field}`")))?,
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gaussian_blobs;
    use crate::geometry::{build_polygon, build_simplex};

    fn polygon_head(k_total: usize, num_real: usize) -> HeadSpec {
        HeadSpec::Fixed(FixedClassifier::new(build_polygon(k_total).unwrap(), num_real).unwrap())
    }

    #[test]
    fn same_seed_gives_bit_identical_models() {
        let a = init_model(&[2, 16], 2, polygon_head(10, 10), 5).unwrap();
        let b = init_model(&[2, 16], 2, polygon_head(10, 10), 5).unwrap();
        assert_eq!(a, b);
        let c = init_model(&[2, 16], 2, polygon_head(10, 10), 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn forward_produces_one_logit_per_vertex() {
        let m = init_model(&[2, 16], 2, polygon_head(10, 10), 1).unwrap();
        let (f, z) = m.forward(&[vec![0.3, -0.7]]).unwrap();
        assert_eq!(f[0].len(), 2);
        assert_eq!(z[0].len(), 10);
    }

    #[test]
    fn init_statistics_are_centered() {
        // 1000 Glorot draws: sample mean within 3 sigma of zero.
        let m = init_model(&[100, 10], 2, polygon_head(4, 4), 9).unwrap();
        let w = &m.hidden[0].affine.weights;
        assert_eq!(w.len(), 1000);
        let limit = (6.0 / 110.0_f64).sqrt();
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        let sigma_mean = limit / (3.0 * w.len() as f64).sqrt();
        assert!(
            mean.abs() < 3.0 * sigma_mean,
            "mean {mean} vs 3sigma {sigma_mean}"
        );
        assert!(w.iter().all(|x| x.abs() <= limit));
        assert!(m.hidden[0].affine.biases.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn invalid_architectures_are_rejected() {
        assert!(init_model(&[], 2, polygon_head(4, 4), 0).is_err());
        assert!(init_model(&[2, 0], 2, polygon_head(4, 4), 0).is_err());
        // Junction out must match the head dimension.
        assert!(init_model(&[2], 3, polygon_head(4, 4), 0).is_err());
    }

    #[test]
    fn zero_weights_forward_to_zero() {
        let mut m = init_model(&[3, 4], 2, polygon_head(4, 4), 2).unwrap();
        for w in m.hidden[0].affine.weights.iter_mut() {
            *w = 0.0;
        }
        for w in m.junction.weights.iter_mut() {
            *w = 0.0;
        }
        let (f, z) = m.forward(&[vec![1.0, -2.0, 3.0]]).unwrap();
        assert!(f[0].iter().all(|&v| v == 0.0));
        assert!(z[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_junction_exposes_the_vertex_order() {
        // No hidden layers, junction set to the identity: the logits are
        // the polygon-4 dots (x1, x2, -x1, -x2).
        let mut m = init_model(&[2], 2, polygon_head(4, 4), 3).unwrap();
        m.junction.weights = vec![1.0, 0.0, 0.0, 1.0];
        let (_, z) = m.forward(&[vec![0.25, -1.5]]).unwrap();
        let expected = [0.25, -1.5, -0.25, 1.5];
        for (a, b) in z[0].iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn batch_rows_match_single_forward() {
        let m = init_model(
            &[3, 8, 5],
            3,
            HeadSpec::Fixed(FixedClassifier::new(build_simplex(4).unwrap(), 4).unwrap()),
            7,
        )
        .unwrap();
        let batch: Vec<Vec<f64>> = (0..8)
            .map(|i| vec![i as f64 * 0.1, -0.3 * i as f64, 0.5])
            .collect();
        let (bf, bz) = m.forward(&batch).unwrap();
        for (i, x) in batch.iter().enumerate() {
            let (f, z) = m.forward(&[x.clone()]).unwrap();
            assert_eq!(bf[i], f[0]);
            assert_eq!(bz[i], z[0]);
        }
    }

    #[test]
    fn zero_learning_rate_changes_nothing() {
        let mut m = init_model(&[2, 8], 2, polygon_head(6, 6), 11).unwrap();
        let before = m.clone();
        let loss = m
            .backward_and_step(&[vec![0.5, -0.5], vec![1.0, 1.0]], &[0, 3], 0.0)
            .unwrap();
        assert!(loss > 0.0);
        assert_eq!(m, before);
    }

    #[test]
    fn fixed_head_weights_never_move() {
        let ds = gaussian_blobs(4, 2, 30, 0.4, 21).unwrap();
        let mut m = init_model(&[2, 8], 2, polygon_head(4, 4), 21).unwrap();
        let before = match &m.head {
            Head::Fixed(c) => c.clone(),
            _ => unreachable!(),
        };
        for _ in 0..100 {
            let x: Vec<Vec<f64>> = ds.train[..8].iter().map(|s| s.x.clone()).collect();
            let y: Vec<usize> = ds.train[..8].iter().map(|s| s.y).collect();
            m.backward_and_step(&x, &y, 0.2).unwrap();
        }
        match &m.head {
            Head::Fixed(c) => assert_eq!(c, &before),
            _ => unreachable!(),
        }
    }

    #[test]
    fn trainable_head_rows_stay_unit_norm() {
        let ds = gaussian_blobs(4, 2, 30, 0.4, 22).unwrap();
        let mut m = init_model(
            &[2, 8],
            2,
            HeadSpec::Trainable {
                num_classes: 4,
                normalize: true,
            },
            22,
        )
        .unwrap();
        for chunk in ds.train.chunks(8) {
            let x: Vec<Vec<f64>> = chunk.iter().map(|s| s.x.clone()).collect();
            let y: Vec<usize> = chunk.iter().map(|s| s.y).collect();
            m.backward_and_step(&x, &y, 0.3).unwrap();
            if let Head::Trainable(t) = &m.head {
                for row in &t.rows {
                    assert!((norm(row) - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn backward_matches_central_differences_on_every_parameter() {
        // width-(4, 8) backbone into a 3-d simplex head.
        let c = FixedClassifier::new(build_simplex(4).unwrap(), 4).unwrap();
        let m0 = init_model(&[4, 8], 3, HeadSpec::Fixed(c), 13).unwrap();
        let mut rng = crate::rng::stream(14, 3);
        let x: Vec<Vec<f64>> = (0..6)
            .map(|_| {
                (0..4)
                    .map(|_| crate::rng::uniform(&mut rng, -1.0, 1.0))
                    .collect()
            })
            .collect();
        let y: Vec<usize> = (0..6).map(|i| i % 4).collect();

        // Analytic gradient read back from a unit-lr step.
        let mut stepped = m0.clone();
        stepped.backward_and_step(&x, &y, 1.0).unwrap();
        let p0 = m0.flat_params();
        let p1 = stepped.flat_params();
        let analytic: Vec<f64> = p0.iter().zip(&p1).map(|(a, b)| a - b).collect();

        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for i in 0..p0.len() {
            let mut plus = m0.clone();
            let mut pp = p0.clone();
            pp[i] += h;
            plus.set_flat_params(&pp);
            let mut minus = m0.clone();
            pp[i] -= 2.0 * h;
            minus.set_flat_params(&pp);
            let fd =
                (plus.batch_loss(&x, &y).unwrap() - minus.batch_loss(&x, &y).unwrap()) / (2.0 * h);
            let rel = (analytic[i] - fd).abs() / fd.abs().max(1e-6);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-4, "worst relative error {worst}");
    }

    #[test]
    fn training_is_deterministic_and_logs_every_epoch() {
        let ds = gaussian_blobs(4, 2, 40, 0.4, 30).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.2,
            epochs: 4,
            batch_size: 16,
            seed: 77,
            shuffle: true,
        };
        let mut m1 = init_model(&[2, 8], 2, polygon_head(4, 4), cfg.seed).unwrap();
        let run1 = m1.train(&ds, &cfg).unwrap();
        let mut m2 = init_model(&[2, 8], 2, polygon_head(4, 4), cfg.seed).unwrap();
        let run2 = m2.train(&ds, &cfg).unwrap();
        assert_eq!(run1, run2);
        assert_eq!(m1, m2);
        assert_eq!(run1.records.len(), 4);
        for (i, r) in run1.records.iter().enumerate() {
            assert_eq!(r.epoch, i + 1);
            assert_eq!(r.mean_angles.len(), 4);
        }
    }

    #[test]
    fn zero_epochs_leaves_the_model_at_init() {
        let ds = gaussian_blobs(3, 2, 20, 0.4, 31).unwrap();
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let mut m = init_model(&[2, 4], 2, polygon_head(3, 3), 8).unwrap();
        let at_init = m.clone();
        let run = m.train(&ds, &cfg).unwrap();
        assert!(run.records.is_empty());
        assert_eq!(m, at_init);
    }

    #[test]
    fn separable_two_class_blobs_reach_full_accuracy() {
        let ds = gaussian_blobs(2, 2, 60, 0.3, 32).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.1,
            epochs: 10,
            batch_size: 16,
            seed: 5,
            shuffle: true,
        };
        let mut m = init_model(&[2, 8], 2, polygon_head(2, 2), cfg.seed).unwrap();
        let run = m.train(&ds, &cfg).unwrap();
        assert_eq!(run.final_test_accuracy().unwrap(), 1.0);
    }

    #[test]
    fn loss_decreases_over_the_first_epoch_on_separable_data() {
        let ds = gaussian_blobs(4, 2, 50, 0.3, 33).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.05,
            epochs: 2,
            batch_size: 8,
            seed: 3,
            shuffle: true,
        };
        let mut m = init_model(&[2, 8], 2, polygon_head(4, 4), cfg.seed).unwrap();
        let x: Vec<Vec<f64>> = ds.train.iter().map(|s| s.x.clone()).collect();
        let y: Vec<usize> = ds.train.iter().map(|s| s.y).collect();
        let initial = m.batch_loss(&x, &y).unwrap();
        m.train(&ds, &cfg).unwrap();
        let after = m.batch_loss(&x, &y).unwrap();
        assert!(after < initial, "{after} !< {initial}");
    }

    #[test]
    fn invalid_labels_are_rejected_by_the_step() {
        let mut m = init_model(&[2, 4], 2, polygon_head(4, 2), 8).unwrap();
        let err = m.backward_and_step(&[vec![0.1, 0.2]], &[2], 0.1);
        assert!(matches!(
            err,
            Err(NetworkError::Classifier(
                ClassifierError::InvalidLabel { .. }
            ))
        ));
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let ds = gaussian_blobs(4, 2, 20, 0.4, 34).unwrap();
        for head in [
            polygon_head(6, 4),
            HeadSpec::Trainable {
                num_classes: 4,
                normalize: true,
            },
        ] {
            let mut m = init_model(&[2, 5, 3], 2, head, 17).unwrap();
            m.train(
                &ds,
                &TrainConfig {
                    epochs: 2,
                    ..TrainConfig::default()
                },
            )
            .unwrap();
            let sub = dir
                .path()
                .join(format!("ckpt_{}", m.num_trainable_params()));
            m.save_checkpoint(&sub).unwrap();
            let back = NetworkModel::load_checkpoint(&sub).unwrap();
            assert_eq!(m, back);
        }
    }

    #[test]
    fn metrics_csv_has_the_exact_column_order() {
        let run = TrainRun {
            num_classes: 3,
            records: vec![EpochRecord {
                epoch: 1,
                train_loss: 0.5,
                train_acc: 0.75,
                test_acc: 0.5,
                mean_angles: vec![Some(0.1), None, Some(0.3)],
                min_pairwise_mean_angle: Some(0.9),
            }],
        };
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "epoch,train_loss,train_acc,test_acc,mean_angle_class_0,mean_angle_class_1,mean_angle_class_2,min_pairwise_mean_angle"
        );
        assert_eq!(lines.next().unwrap(), "1,0.5,0.75,0.5,0.1,NaN,0.3,0.9");

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.csv");
        run.to_csv(&path).unwrap();
        let parsed = TrainRun::from_csv(&path).unwrap();
        assert_eq!(parsed, run);
    }

    #[test]
    fn trainable_params_are_counted() {
        let m = init_model(&[2, 8], 2, polygon_head(10, 10), 1).unwrap();
        // hidden: 2*8 + 8; junction: 8*2; fixed head contributes nothing.
        assert_eq!(m.num_trainable_params(), 16 + 8 + 16);
        let t = init_model(
            &[2, 8],
            2,
            HeadSpec::Trainable {
                num_classes: 10,
                normalize: true,
            },
            1,
        )
        .unwrap();
        assert_eq!(t.num_trainable_params(), 16 + 8 + 16 + 20);
    }
}
