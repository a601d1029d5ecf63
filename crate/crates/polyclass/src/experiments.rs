//! Scripted end-to-end experiments.
//!
//! Each runner trains models and produces a serializable report; given an
//! output directory it also writes the standard run layout:
//!
//! ```text
//! run_dir/
//!   config.json            experiment + training configuration
//!   metrics.csv            per-epoch training log
//!   weights/               model checkpoint (and fixed classifier files)
//!   features_final.csv     train-split features after the last epoch
//!   features_epoch_{k}.csv per-epoch dumps (only with the dump flag)
//!   report.json            the experiment report
//! ```
//!
//! Sweep runs are independent (own model, own derived seed) and may execute
//! on worker threads; `POLYCLASS_THREADS` caps the worker count. Results are
//! assembled by run index, so the thread schedule never changes any output.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{ClassifierError, FixedClassifier};
use crate::data::{permute_labels, random_permutation, DataError, Dataset};
use crate::geometry::vecmath::angle_between;
use crate::geometry::{
    build_cube, build_hadamard, build_orthoplex, build_polygon, build_simplex, embedding_dim,
    GeometryError, PolytopeKind,
};
use crate::metrics;
use crate::network::{
    init_model, Head, HeadSpec, NetworkError, NetworkModel, TrainConfig, TrainRun,
};
use crate::rng;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Classification head requested for an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum HeadConfig {
    Fixed {
        kind: PolytopeKind,
        /// Total vertex count; only free for polygon heads (defaults to the
        /// class count). Other kinds derive it from the dimension.
        #[serde(skip_serializing_if = "Option::is_none", default)]
        k_total: Option<usize>,
        /// Embedding dimension override. Defaults to the smallest dimension
        /// whose polytope holds every class (polygon: always 2; hadamard:
        /// defaults to the class count).
        #[serde(skip_serializing_if = "Option::is_none", default)]
        dim: Option<usize>,
    },
    Trainable {
        dim: usize,
        normalize: bool,
    },
}

impl HeadConfig {
    pub fn fixed(kind: PolytopeKind) -> Self {
        HeadConfig::Fixed {
            kind,
            k_total: None,
            dim: None,
        }
    }

    /// Resolves the head for `num_classes` data classes, returning the head
    /// request for model init plus the embedding dimension.
    pub fn build(&self, num_classes: usize) -> Result<(HeadSpec, usize), ExperimentError> {
        match self {
            HeadConfig::Trainable { dim, normalize } => Ok((
                HeadSpec::Trainable {
                    num_classes,
                    normalize: *normalize,
                },
                *dim,
            )),
            HeadConfig::Fixed { kind, k_total, dim } => {
                let matrix = match kind {
                    PolytopeKind::Polygon => {
                        if dim.is_some_and(|d| d != 2) {
                            return Err(ExperimentError::InvalidConfig(
                                "polygon heads live in dimension 2".into(),
                            ));
                        }
                        build_polygon(k_total.unwrap_or(num_classes))?
                    }
                    PolytopeKind::Simplex => {
                        let d = dim.unwrap_or(embedding_dim(PolytopeKind::Simplex, num_classes)?);
                        build_simplex(d + 1)?
                    }
                    PolytopeKind::Cube => {
                        let d = dim.unwrap_or(embedding_dim(PolytopeKind::Cube, num_classes)?);
                        build_cube(d)?
                    }
                    PolytopeKind::Orthoplex => {
                        let d = dim.unwrap_or(embedding_dim(PolytopeKind::Orthoplex, num_classes)?);
                        build_orthoplex(d)?
                    }
                    PolytopeKind::Hadamard => {
                        build_hadamard(dim.unwrap_or(num_classes), num_classes)?
                    }
                };
                if let Some(k) = k_total {
                    if *k != matrix.num_vertices() {
                        return Err(ExperimentError::InvalidConfig(format!(
                            "requested {k} vertices but {kind} in dimension {} has {}",
                            matrix.dim(),
                            matrix.num_vertices()
                        )));
                    }
                }
                if matrix.num_vertices() < num_classes {
                    return Err(ExperimentError::InvalidConfig(format!(
                        "{kind} with {} vertices cannot host {num_classes} classes",
                        matrix.num_vertices()
                    )));
                }
                let d = matrix.dim();
                let head = FixedClassifier::new(matrix, num_classes)?;
                Ok((HeadSpec::Fixed(head), d))
            }
        }
    }
}

/// Everything needed to train one model on one dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainSetup {
    pub hidden_widths: Vec<usize>,
    pub head: HeadConfig,
    pub train: TrainConfig,
    /// Also dump train-split features after every epoch.
    #[serde(default)]
    pub dump_features_epochs: bool,
}

impl TrainSetup {
    fn widths(&self, input_dim: usize) -> Vec<usize> {
        let mut widths = vec![input_dim];
        widths.extend_from_slice(&self.hidden_widths);
        widths
    }

    /// Initializes the model for this setup on the given dataset.
    pub fn init(&self, ds: &Dataset) -> Result<NetworkModel, ExperimentError> {
        let (head, d) = self.head.build(ds.num_classes)?;
        Ok(init_model(
            &self.widths(ds.input_dim),
            d,
            head,
            self.train.seed,
        )?)
    }
}

/// Angle between each class's mean feature and its assigned fixed weight.
/// Classes with no samples report `None`.
pub fn class_mean_angles(
    classifier: &FixedClassifier,
    f_batch: &[Vec<f64>],
    y_batch: &[usize],
) -> Result<Vec<Option<f64>>, ExperimentError> {
    for &y in y_batch {
        if y >= classifier.num_real() {
            return Err(ClassifierError::InvalidLabel {
                label: y,
                num_real: classifier.num_real(),
            }
            .into());
        }
    }
    let dirs: Vec<Vec<f64>> = (0..classifier.num_real())
        .map(|c| classifier.class_direction(c).to_vec())
        .collect();
    Ok(metrics::mean_direction_angles(&dirs, f_batch, y_batch))
}

/// Feature-mean alignment through training, fixed head vs trainable twin.
///
/// Angle series carry `epochs + 1` rows: index 0 holds the initialization
/// state, row `e` the state after epoch `e`. Weight drift is the largest
/// angle between any class direction and its initial value.
#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    pub epochs: usize,
    pub num_classes: usize,
    pub fixed_mean_angles: Vec<Vec<Option<f64>>>,
    pub trainable_mean_angles: Vec<Vec<Option<f64>>>,
    pub fixed_weight_drift: Vec<f64>,
    pub trainable_weight_drift: Vec<f64>,
    pub final_min_pairwise_angle: Option<f64>,
    pub fixed_final_test_accuracy: Option<f64>,
    pub trainable_final_test_accuracy: Option<f64>,
}

impl StationarityReport {
    /// Final per-class angles of the fixed-head run.
    pub fn final_fixed_angles(&self) -> &[Option<f64>] {
        self.fixed_mean_angles
            .last()
            .expect("at least the init row")
    }
}

struct AngleTrace {
    angles: Vec<Vec<Option<f64>>>,
    drift: Vec<f64>,
    initial_dirs: Vec<Vec<f64>>,
}

impl AngleTrace {
    fn new(model: &NetworkModel, ds: &Dataset) -> Result<Self, ExperimentError> {
        let initial_dirs: Vec<Vec<f64>> = (0..model.num_classes())
            .map(|c| model.head.class_direction(c).to_vec())
            .collect();
        let mut trace = AngleTrace {
            angles: Vec::new(),
            drift: Vec::new(),
            initial_dirs,
        };
        trace.record(model, ds)?;
        Ok(trace)
    }

    fn record(&mut self, model: &NetworkModel, ds: &Dataset) -> Result<(), ExperimentError> {
        let (features, labels) = model.train_features(ds)?;
        let dirs: Vec<Vec<f64>> = (0..model.num_classes())
            .map(|c| model.head.class_direction(c).to_vec())
            .collect();
        self.angles
            .push(metrics::mean_direction_angles(&dirs, &features, &labels));
        let drift = dirs
            .iter()
            .zip(&self.initial_dirs)
            .map(|(now, init)| angle_between(now, init))
            .fold(0.0_f64, f64::max);
        self.drift.push(drift);
        Ok(())
    }
}

/// Trains the configured fixed head plus a trainable twin and tracks how
/// class feature means align with the class directions epoch by epoch.
pub fn run_stationarity(
    setup: &TrainSetup,
    ds: &Dataset,
    out_dir: Option<&Path>,
) -> Result<StationarityReport, ExperimentError> {
    if matches!(setup.head, HeadConfig::Trainable { .. }) {
        return Err(ExperimentError::InvalidConfig(
            "stationarity compares a fixed head against its trainable twin; configure a fixed head"
                .into(),
        ));
    }
    let mut fixed_model = setup.init(ds)?;
    let d = fixed_model.embedding_dim();

    let fixed_trace = Mutex::new(AngleTrace::new(&fixed_model, ds)?);
    let dumps: Mutex<Vec<(usize, Vec<Vec<f64>>, Vec<usize>)>> = Mutex::new(Vec::new());
    let fixed_run = fixed_model.train_observed(ds, &setup.train, |epoch, model| {
        let _ = fixed_trace.lock().unwrap().record(model, ds);
        if setup.dump_features_epochs {
            if let Ok((f, y)) = model.train_features(ds) {
                dumps.lock().unwrap().push((epoch, f, y));
            }
        }
    })?;
    let fixed_trace = fixed_trace.into_inner().unwrap();
    if fixed_trace.angles.len() != setup.train.epochs + 1 {
        return Err(ExperimentError::InvalidConfig(
            "failed to record feature angles for every epoch".into(),
        ));
    }

    // Trainable twin: same backbone widths, same seed, same dimension.
    let twin_setup = TrainSetup {
        hidden_widths: setup.hidden_widths.clone(),
        head: HeadConfig::Trainable {
            dim: d,
            normalize: true,
        },
        train: setup.train.clone(),
        dump_features_epochs: false,
    };
    let mut twin_model = twin_setup.init(ds)?;
    let twin_trace = Mutex::new(AngleTrace::new(&twin_model, ds)?);
    let twin_run = twin_model.train_observed(ds, &setup.train, |_, model| {
        let _ = twin_trace.lock().unwrap().record(model, ds);
    })?;
    let twin_trace = twin_trace.into_inner().unwrap();
    if twin_trace.angles.len() != setup.train.epochs + 1 {
        return Err(ExperimentError::InvalidConfig(
            "failed to record feature angles for every epoch".into(),
        ));
    }

    let (final_features, final_labels) = fixed_model.train_features(ds)?;
    let final_means = metrics::class_means(ds.num_classes, &final_features, &final_labels);

    let report = StationarityReport {
        epochs: setup.train.epochs,
        num_classes: ds.num_classes,
        fixed_mean_angles: fixed_trace.angles,
        trainable_mean_angles: twin_trace.angles,
        fixed_weight_drift: fixed_trace.drift,
        trainable_weight_drift: twin_trace.drift,
        final_min_pairwise_angle: metrics::min_pairwise_angle(&final_means),
        fixed_final_test_accuracy: fixed_run.final_test_accuracy(),
        trainable_final_test_accuracy: twin_run.final_test_accuracy(),
    };

    if let Some(dir) = out_dir {
        let config = serde_json::json!({
            "experiment": "stationarity",
            "dataset": ds.provenance,
            "setup": setup,
        });
        write_run_dir(dir, &config, &fixed_run, &fixed_model, ds, &report)?;
        twin_run.to_csv(&dir.join("metrics_trainable.csv"))?;
        for (epoch, f, y) in dumps.into_inner().unwrap() {
            write_features_csv(&dir.join(format!("features_epoch_{epoch}.csv")), &f, &y)?;
        }
    }
    Ok(report)
}

/// Accuracy statistics over seeded label permutations.
#[derive(Debug, Clone, Serialize)]
pub struct PermutationSweepReport {
    pub permutations: Vec<Vec<usize>>,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n-1 denominator).
    pub std_dev: f64,
    /// Normal-approximation 95% half width: `1.96 * std / sqrt(n)`.
    pub ci95_half_width: f64,
}

/// Trains one fresh model per label permutation and aggregates the final
/// test accuracies. Permutations are seeded from the run index unless an
/// explicit list is given.
pub fn run_permutation_sweep(
    setup: &TrainSetup,
    ds: &Dataset,
    n_perms: usize,
    explicit_perms: Option<&[Vec<usize>]>,
    out_dir: Option<&Path>,
) -> Result<PermutationSweepReport, ExperimentError> {
    if n_perms < 2 {
        return Err(ExperimentError::InvalidConfig(format!(
            "a sweep needs at least 2 permutations, got {n_perms}"
        )));
    }
    if let Some(perms) = explicit_perms {
        if perms.len() != n_perms {
            return Err(ExperimentError::InvalidConfig(format!(
                "{} explicit permutations for {n_perms} runs",
                perms.len()
            )));
        }
    }

    let results: Vec<Mutex<Option<Result<(Vec<usize>, f64), ExperimentError>>>> =
        (0..n_perms).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = worker_count(n_perms);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_perms {
                    break;
                }
                let outcome = sweep_run(setup, ds, explicit_perms, i);
                *results[i].lock().unwrap() = Some(outcome);
            });
        }
    });

    let mut permutations = Vec::with_capacity(n_perms);
    let mut accuracies = Vec::with_capacity(n_perms);
    for cell in results {
        let (perm, acc) = cell
            .into_inner()
            .unwrap()
            .expect("every sweep index is visited")?;
        permutations.push(perm);
        accuracies.push(acc);
    }

    let mean = accuracies.iter().sum::<f64>() / n_perms as f64;
    let var = accuracies
        .iter()
        .map(|a| (a - mean) * (a - mean))
        .sum::<f64>()
        / (n_perms - 1) as f64;
    let std_dev = var.sqrt();
    let report = PermutationSweepReport {
        permutations,
        accuracies,
        mean,
        std_dev,
        ci95_half_width: 1.96 * std_dev / (n_perms as f64).sqrt(),
    };

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        let config = serde_json::json!({
            "experiment": "permutation_sweep",
            "dataset": ds.provenance,
            "n_perms": n_perms,
            "setup": setup,
        });
        fs::write(
            dir.join("config.json"),
            serde_json::to_string_pretty(&config).unwrap(),
        )?;
        let mut runs = String::from("run,final_test_acc\n");
        for (i, acc) in report.accuracies.iter().enumerate() {
            runs.push_str(&format!("{i},{acc}\n"));
        }
        fs::write(dir.join("runs.csv"), runs)?;
        fs::write(
            dir.join("report.json"),
            serde_json::to_string_pretty(&report).unwrap(),
        )?;
    }
    Ok(report)
}

fn sweep_run(
    setup: &TrainSetup,
    ds: &Dataset,
    explicit_perms: Option<&[Vec<usize>]>,
    index: usize,
) -> Result<(Vec<usize>, f64), ExperimentError> {
    // Only the label permutation varies across runs: its seed derives from
    // the run index, while every model trains from the same base seed.
    // Identical permutations therefore produce identical accuracies.
    let perm_seed = rng::derive_seed(setup.train.seed, index as u64);
    let perm = match explicit_perms {
        Some(perms) => perms[index].clone(),
        None => random_permutation(ds.num_classes, perm_seed),
    };
    let permuted = permute_labels(ds, &perm)?;
    let mut model = setup.init(&permuted)?;
    let run = model.train(&permuted, &setup.train)?;
    let acc = run
        .final_test_accuracy()
        .ok_or_else(|| ExperimentError::InvalidConfig("sweep with zero epochs".into()))?;
    Ok((perm, acc))
}

/// How often test features land on virtual vertices, and how close the
/// nearest feature comes to each virtual direction.
#[derive(Debug, Clone, Serialize)]
pub struct VirtualMarginReport {
    pub k_total: usize,
    pub num_real: usize,
    /// Fraction of test samples whose all-vertex argmax is virtual.
    pub virtual_fraction: f64,
    /// `(vertex index, angle in radians)` of the closest test feature.
    pub per_virtual_nearest_angle: Vec<(usize, f64)>,
    pub test_accuracy: f64,
}

/// Trains the configured fixed head (which may carry virtual vertices) and
/// measures the virtual-argmax fraction on the test split.
pub fn run_virtual_margin(
    setup: &TrainSetup,
    ds: &Dataset,
    out_dir: Option<&Path>,
) -> Result<VirtualMarginReport, ExperimentError> {
    let mut model = setup.init(ds)?;
    let run = model.train(ds, &setup.train)?;
    let classifier = match &model.head {
        Head::Fixed(c) => c.clone(),
        Head::Trainable(_) => {
            return Err(ExperimentError::InvalidConfig(
                "virtual-margin analysis needs a fixed head".into(),
            ))
        }
    };

    let xs: Vec<Vec<f64>> = ds.test.iter().map(|s| s.x.clone()).collect();
    let (features, _) = model.forward(&xs)?;
    let virtual_set = classifier.virtual_vertices();
    let mut virtual_hits = 0usize;
    for f in &features {
        if virtual_set.contains(&classifier.vertex_argmax(f)?) {
            virtual_hits += 1;
        }
    }
    let virtual_fraction = if features.is_empty() {
        0.0
    } else {
        virtual_hits as f64 / features.len() as f64
    };

    let per_virtual_nearest_angle = virtual_set
        .iter()
        .map(|&v| {
            let dir = classifier.weights().row(v);
            let nearest = features
                .iter()
                .map(|f| angle_between(f, dir))
                .fold(f64::INFINITY, f64::min);
            (v, nearest)
        })
        .collect();

    let test_accuracy = model.accuracy(&ds.test)?;
    let report = VirtualMarginReport {
        k_total: classifier.k_total(),
        num_real: classifier.num_real(),
        virtual_fraction,
        per_virtual_nearest_angle,
        test_accuracy,
    };

    if let Some(dir) = out_dir {
        let config = serde_json::json!({
            "experiment": "virtual_margin",
            "dataset": ds.provenance,
            "setup": setup,
        });
        write_run_dir(dir, &config, &run, &model, ds, &report)?;
    }
    Ok(report)
}

/// Paired accuracies: Hadamard head vs the regular-polytope head at the
/// same embedding dimension.
#[derive(Debug, Clone, Serialize)]
pub struct HadamardComparisonReport {
    pub dim: usize,
    pub polytope_kind: PolytopeKind,
    pub polytope_accuracy: f64,
    pub hadamard_accuracy: f64,
    pub gap: f64,
}

/// Picks the regular polytope hosting `k` classes at dimension `d`:
/// the polygon in the plane, otherwise the simplex/orthoplex/cube whose
/// vertex count first covers `k`.
pub fn matching_polytope(d: usize, k: usize) -> Result<PolytopeKind, ExperimentError> {
    if d == 2 {
        Ok(PolytopeKind::Polygon)
    } else if k == d + 1 {
        Ok(PolytopeKind::Simplex)
    } else if k <= 2 * d {
        Ok(PolytopeKind::Orthoplex)
    } else if d <= 30 && (k as u64) <= (1u64 << d) {
        Ok(PolytopeKind::Cube)
    } else {
        Err(ExperimentError::InvalidConfig(format!(
            "no regular polytope in dimension {d} holds {k} classes"
        )))
    }
}

/// Trains the same backbone twice, once with a Hadamard head and once with
/// the matching polytope head, both at embedding dimension `d`.
pub fn run_hadamard_comparison(
    setup: &TrainSetup,
    ds: &Dataset,
    d: usize,
    out_dir: Option<&Path>,
) -> Result<HadamardComparisonReport, ExperimentError> {
    let polytope_kind = matching_polytope(d, ds.num_classes)?;
    let polytope_setup = TrainSetup {
        head: HeadConfig::Fixed {
            kind: polytope_kind,
            k_total: None,
            dim: if polytope_kind == PolytopeKind::Polygon {
                None
            } else {
                Some(d)
            },
        },
        ..setup.clone()
    };
    let hadamard_setup = TrainSetup {
        head: HeadConfig::Fixed {
            kind: PolytopeKind::Hadamard,
            k_total: None,
            dim: Some(d),
        },
        ..setup.clone()
    };

    let mut polytope_model = polytope_setup.init(ds)?;
    let polytope_run = polytope_model.train(ds, &polytope_setup.train)?;
    let mut hadamard_model = hadamard_setup.init(ds)?;
    let hadamard_run = hadamard_model.train(ds, &hadamard_setup.train)?;

    let polytope_accuracy = polytope_model.accuracy(&ds.test)?;
    let hadamard_accuracy = hadamard_model.accuracy(&ds.test)?;
    let report = HadamardComparisonReport {
        dim: d,
        polytope_kind,
        polytope_accuracy,
        hadamard_accuracy,
        gap: polytope_accuracy - hadamard_accuracy,
    };

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        let config = serde_json::json!({
            "experiment": "hadamard_comparison",
            "dataset": ds.provenance,
            "dim": d,
            "setup": setup,
        });
        fs::write(
            dir.join("config.json"),
            serde_json::to_string_pretty(&config).unwrap(),
        )?;
        for (name, run, model) in [
            ("polytope", &polytope_run, &polytope_model),
            ("hadamard", &hadamard_run, &hadamard_model),
        ] {
            let sub = dir.join(name);
            fs::create_dir_all(&sub)?;
            run.to_csv(&sub.join("metrics.csv"))?;
            model.save_checkpoint(&sub.join("weights"))?;
        }
        fs::write(
            dir.join("report.json"),
            serde_json::to_string_pretty(&report).unwrap(),
        )?;
    }
    Ok(report)
}

/// Writes the standard run directory layout.
fn write_run_dir<R: Serialize>(
    dir: &Path,
    config: &serde_json::Value,
    run: &TrainRun,
    model: &NetworkModel,
    ds: &Dataset,
    report: &R,
) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("config.json"),
        serde_json::to_string_pretty(config).unwrap(),
    )?;
    run.to_csv(&dir.join("metrics.csv"))?;
    model.save_checkpoint(&dir.join("weights"))?;
    let (features, labels) = model.train_features(ds)?;
    write_features_csv(&dir.join("features_final.csv"), &features, &labels)?;
    fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(report).unwrap(),
    )?;
    Ok(())
}

/// Feature dump CSV: header `y,f_0..f_{d-1}`, full precision.
pub fn write_features_csv(
    path: &Path,
    features: &[Vec<f64>],
    labels: &[usize],
) -> Result<(), std::io::Error> {
    let d = features.first().map(|f| f.len()).unwrap_or(0);
    let cols: Vec<String> = (0..d).map(|i| format!("f_{i}")).collect();
    let mut buf = format!("y,{}\n", cols.join(","));
    for (f, y) in features.iter().zip(labels) {
        let vals: Vec<String> = f.iter().map(|x| format!("{x:.16e}")).collect();
        buf.push_str(&format!("{y},{}\n", vals.join(",")));
    }
    fs::write(path, buf)
}

/// Reads a feature dump written by [`write_features_csv`].
pub fn read_features_csv(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<usize>), ExperimentError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| ExperimentError::InvalidConfig("empty features csv".into()))?;
    if !header.starts_with("y,") {
        return Err(ExperimentError::InvalidConfig(format!(
            "unexpected features header `{header}`"
        )));
    }
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        labels.push(
            fields[0].parse().map_err(|_| {
                ExperimentError::InvalidConfig(format!("bad label `{}`", fields[0]))
            })?,
        );
        features.push(
            fields[1..]
                .iter()
                .map(|v| {
                    v.parse()
                        .map_err(|_| ExperimentError::InvalidConfig(format!("bad feature `{v}`")))
                })
                .collect::<Result<Vec<f64>, _>>()?,
        );
    }
    Ok((features, labels))
}

fn worker_count(n_jobs: usize) -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cap = std::env::var("POLYCLASS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(available);
    cap.min(n_jobs).max(1)
}
