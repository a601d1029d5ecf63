//! The fixed classification head.
//!
//! A [`FixedClassifier`] owns a polytope weight matrix whose rows never
//! change during training. Classes are mapped onto vertices by an
//! injective assignment; vertices without a class are virtual negatives:
//! they contribute to the softmax denominator (carving an angular margin
//! around themselves) but never receive data and are never predicted.
//!
//! Logits are plain inner products `z_j = w_j . f` with unit-norm rows and
//! zero bias, so the feature norm acts as a per-sample concentration and
//! the angle carries the class information. Features are never normalized
//! and no temperature is applied.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::vecmath::dot;
use crate::geometry::{GeometryError, PolytopeKind, WeightMatrix};

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("feature has dimension {got}, classifier expects {want}")]
    Shape { want: usize, got: usize },
    #[error("label {label} out of range: {num_real} real classes")]
    InvalidLabel { label: usize, num_real: usize },
    #[error("assignment is not injective into {k_total} vertex indices")]
    InvalidPermutation { k_total: usize },
    #[error("{num_real} real classes exceed {k_total} vertices")]
    TooManyClasses { num_real: usize, k_total: usize },
    #[error("batch must be non-empty")]
    EmptyBatch,
    #[error("feature batch and label batch have different lengths ({features} vs {labels})")]
    BatchMismatch { features: usize, labels: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("classifier file format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Scores for every vertex (real and virtual) of a fixed classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitVector(Vec<f64>);

impl LogitVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }
}

/// A polytope weight matrix with a real/virtual class split.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedClassifier {
    weights: WeightMatrix,
    num_real: usize,
    /// Class label -> vertex index; injective.
    assignment: Vec<usize>,
}

impl FixedClassifier {
    /// Wraps a weight matrix with `num_real` data-bearing classes mapped
    /// onto the first `num_real` vertices; the rest are virtual.
    pub fn new(weights: WeightMatrix, num_real: usize) -> Result<Self, ClassifierError> {
        let k_total = weights.num_vertices();
        if num_real > k_total {
            return Err(ClassifierError::TooManyClasses { num_real, k_total });
        }
        Ok(FixedClassifier {
            weights,
            num_real,
            assignment: (0..num_real).collect(),
        })
    }

    /// Same weights, classes remapped by `perm` (class label -> vertex).
    pub fn with_assignment(&self, perm: &[usize]) -> Result<Self, ClassifierError> {
        let k_total = self.k_total();
        if perm.len() != self.num_real {
            return Err(ClassifierError::InvalidPermutation { k_total });
        }
        let mut seen = vec![false; k_total];
        for &v in perm {
            if v >= k_total || seen[v] {
                return Err(ClassifierError::InvalidPermutation { k_total });
            }
            seen[v] = true;
        }
        Ok(FixedClassifier {
            weights: self.weights.clone(),
            num_real: self.num_real,
            assignment: perm.to_vec(),
        })
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    pub fn k_total(&self) -> usize {
        self.weights.num_vertices()
    }

    pub fn num_real(&self) -> usize {
        self.num_real
    }

    pub fn num_virtual(&self) -> usize {
        self.k_total() - self.num_real
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// The fixed weight direction assigned to a class label.
    pub fn class_direction(&self, class: usize) -> &[f64] {
        self.weights.row(self.assignment[class])
    }

    /// Vertex indices that carry no class.
    pub fn virtual_vertices(&self) -> Vec<usize> {
        let mut assigned = vec![false; self.k_total()];
        for &v in &self.assignment {
            assigned[v] = true;
        }
        (0..self.k_total()).filter(|&v| !assigned[v]).collect()
    }

    fn check_dim(&self, f: &[f64]) -> Result<(), ClassifierError> {
        if f.len() != self.dim() {
            return Err(ClassifierError::Shape {
                want: self.dim(),
                got: f.len(),
            });
        }
        Ok(())
    }

    fn check_batch(&self, f_batch: &[Vec<f64>], y_batch: &[usize]) -> Result<(), ClassifierError> {
        if f_batch.is_empty() {
            return Err(ClassifierError::EmptyBatch);
        }
        if f_batch.len() != y_batch.len() {
            return Err(ClassifierError::BatchMismatch {
                features: f_batch.len(),
                labels: y_batch.len(),
            });
        }
        for f in f_batch {
            self.check_dim(f)?;
        }
        for &y in y_batch {
            if y >= self.num_real {
                return Err(ClassifierError::InvalidLabel {
                    label: y,
                    num_real: self.num_real,
                });
            }
        }
        Ok(())
    }

    /// Inner products against every vertex direction; no bias, no feature
    /// normalization.
    pub fn logits(&self, f: &[f64]) -> Result<LogitVector, ClassifierError> {
        self.check_dim(f)?;
        Ok(LogitVector(
            self.weights.rows().iter().map(|w| dot(w, f)).collect(),
        ))
    }

    /// Softmax over all vertices (real and virtual), stabilized by max
    /// subtraction.
    pub fn probabilities(&self, f: &[f64]) -> Result<Vec<f64>, ClassifierError> {
        let z = self.logits(f)?;
        Ok(softmax(z.values()))
    }

    /// Mean cross-entropy of the batch: `-log softmax` at each sample's
    /// assigned vertex, with the softmax running over every vertex.
    pub fn loss(&self, f_batch: &[Vec<f64>], y_batch: &[usize]) -> Result<f64, ClassifierError> {
        self.check_batch(f_batch, y_batch)?;
        let n = f_batch.len() as f64;
        let mut total = 0.0;
        for (f, &y) in f_batch.iter().zip(y_batch) {
            let z = self.logits(f)?;
            let (nll, _) = nll_and_probs(z.values(), self.assignment[y]);
            total += nll;
        }
        Ok(total / n)
    }

    /// Gradient of [`Self::loss`] with respect to each feature vector:
    /// `W^T (p_i - onehot(vertex(y_i))) / N`. The weights are fixed, so
    /// there is no weight gradient.
    pub fn loss_gradient(
        &self,
        f_batch: &[Vec<f64>],
        y_batch: &[usize],
    ) -> Result<Vec<Vec<f64>>, ClassifierError> {
        self.check_batch(f_batch, y_batch)?;
        let n = f_batch.len() as f64;
        let mut grads = Vec::with_capacity(f_batch.len());
        for (f, &y) in f_batch.iter().zip(y_batch) {
            let z = self.logits(f)?;
            let (_, mut p) = nll_and_probs(z.values(), self.assignment[y]);
            p[self.assignment[y]] -= 1.0;
            let mut g = vec![0.0; self.dim()];
            for (pj, w) in p.iter().zip(self.weights.rows()) {
                for (gc, wc) in g.iter_mut().zip(w) {
                    *gc += pj * wc / n;
                }
            }
            grads.push(g);
        }
        Ok(grads)
    }

    /// Predicted class label: argmax over real-class vertices only, ties
    /// broken toward the lowest label.
    pub fn predict(&self, f: &[f64]) -> Result<usize, ClassifierError> {
        self.check_dim(f)?;
        let mut best = 0;
        let mut best_score = dot(self.class_direction(0), f);
        for c in 1..self.num_real {
            let score = dot(self.class_direction(c), f);
            if score > best_score {
                best = c;
                best_score = score;
            }
        }
        Ok(best)
    }

    /// Argmax over every vertex, virtual included; used to measure how
    /// often features stray into virtual-class territory.
    pub fn vertex_argmax(&self, f: &[f64]) -> Result<usize, ClassifierError> {
        let z = self.logits(f)?;
        let mut best = 0;
        for (j, &v) in z.values().iter().enumerate() {
            if v > z.values()[best] {
                best = j;
            }
        }
        Ok(best)
    }

    /// Writes the classifier as JSON metadata plus a weight CSV.
    pub fn save(&self, json_path: &Path, weights_csv_path: &Path) -> Result<(), ClassifierError> {
        self.weights.to_csv(weights_csv_path)?;
        let meta = ClassifierMeta {
            kind: self.weights.kind(),
            d: self.dim(),
            k_total: self.k_total(),
            num_real: self.num_real,
            assignment: self.assignment.clone(),
            weights_csv_path: weights_csv_path.to_string_lossy().into_owned(),
        };
        fs::write(json_path, serde_json::to_string_pretty(&meta).unwrap())?;
        Ok(())
    }

    /// Loads a classifier saved by [`Self::save`]. A relative weight CSV
    /// path resolves against the JSON file's directory.
    pub fn load(json_path: &Path) -> Result<Self, ClassifierError> {
        let text = fs::read_to_string(json_path)?;
        let meta: ClassifierMeta =
            serde_json::from_str(&text).map_err(|e| ClassifierError::Format(e.to_string()))?;
        let csv_path = Path::new(&meta.weights_csv_path);
        let csv_path = if csv_path.is_relative() {
            json_path
                .parent()
                .map(|p| p.join(csv_path))
                .unwrap_or_else(|| csv_path.to_path_buf())
        } else {
            csv_path.to_path_buf()
        };
        let weights = WeightMatrix::from_csv(&csv_path)?;
        if weights.kind() != meta.kind
            || weights.dim() != meta.d
            || weights.num_vertices() != meta.k_total
        {
            return Err(ClassifierError::Format(
                "metadata does not match the weight CSV".into(),
            ));
        }
        let base = FixedClassifier::new(weights, meta.num_real)?;
        base.with_assignment(&meta.assignment)
    }
}

#[derive(Serialize, Deserialize)]
struct ClassifierMeta {
    kind: PolytopeKind,
    d: usize,
    #[serde(rename = "K_total")]
    k_total: usize,
    num_real: usize,
    assignment: Vec<usize>,
    weights_csv_path: String,
}

/// Stabilized softmax.
pub(crate) fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Negative log softmax at `target`, plus the probability vector.
pub(crate) fn nll_and_probs(z: &[f64], target: usize) -> (f64, Vec<f64>) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let nll = sum.ln() + m - z[target];
    (nll, exps.into_iter().map(|e| e / sum).collect())
}
