//! Command-line front end: argument parsing, config-file merging and the
//! subcommand implementations.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 training
//! diverged. Flags override config-file values, which override defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use polyclass::classifier::FixedClassifier;
use polyclass::data::{self, Dataset};
use polyclass::experiments::{self, read_features_csv, ExperimentError, HeadConfig, TrainSetup};
use polyclass::geometry::{self, adjacent_angle_of, angle_sweep, PolytopeKind, WeightMatrix};
use polyclass::network::{NetworkError, NetworkModel, TrainConfig, TrainRun};
use polyclass::svg::{self, class_color, Series};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Diverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Diverged(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Diverged(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<geometry::GeometryError> for CliError {
    fn from(e: geometry::GeometryError) -> Self {
        match e {
            geometry::GeometryError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Network(NetworkError::TrainingDiverged { epoch, loss }) => {
                CliError::Diverged(format!("training diverged at epoch {epoch} (loss {loss})"))
            }
            ExperimentError::Io(io) => CliError::Io(io.to_string()),
            ExperimentError::Network(NetworkError::Io(io)) => CliError::Io(io.to_string()),
            ExperimentError::Data(data::DataError::Io(io)) => CliError::Io(io.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<data::DataError> for CliError {
    fn from(e: data::DataError) -> Self {
        match e {
            data::DataError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        CliError::from(ExperimentError::Network(e))
    }
}

#[derive(Parser)]
#[command(
    name = "polyclass",
    version,
    about = "Regular-polytope fixed classifiers: construction, training, geometry checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build a polytope weight matrix and print its shape and angles.
    Weights(WeightsArgs),
    /// Tabulate adjacent-vertex angles over a dimension sweep.
    Angles(AnglesArgs),
    /// Train a fixed-head model (plus its trainable twin) and write a run
    /// directory with stationarity metrics.
    Train(RunArgs),
    /// Train one model per random label permutation and aggregate.
    Sweep(SweepArgs),
    /// Train with unassigned (virtual) vertices and measure their margin.
    Virtual(RunArgs),
    /// Compare a Hadamard head against the matching polytope head.
    Hadamard(HadamardArgs),
    /// Render an SVG chart from a run directory.
    Plot(PlotArgs),
    /// Summarize a run directory or a weight CSV.
    Inspect(InspectArgs),
}

#[derive(Args)]
pub struct WeightsArgs {
    /// simplex | cube | orthoplex | polygon | hadamard
    #[arg(long)]
    kind: String,
    /// Number of data-bearing classes.
    #[arg(long)]
    classes: Option<usize>,
    /// Embedding dimension (overrides the per-kind default).
    #[arg(long)]
    dim: Option<usize>,
    /// Total vertex count (polygon only).
    #[arg(long)]
    k_total: Option<usize>,
    /// Write the matrix as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AnglesArgs {
    /// Inclusive dimension range.
    #[arg(long, num_args = 2, value_names = ["DMIN", "DMAX"])]
    sweep: Vec<usize>,
    /// Comma-separated kinds (default: simplex,cube,orthoplex).
    #[arg(long)]
    kinds: Option<String>,
    /// Write the table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render a line chart.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
pub struct DataArgs {
    /// blobs | digits | mnist
    #[arg(long)]
    dataset: Option<String>,
    /// Directory holding IDX files (mnist) or to generate into (digits).
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Class count for generated datasets.
    #[arg(long)]
    classes: Option<usize>,
    /// Input dimension for blob datasets.
    #[arg(long)]
    input_dim: Option<usize>,
    /// Samples per class for generated datasets.
    #[arg(long)]
    per_class: Option<usize>,
    /// Blob standard deviation.
    #[arg(long)]
    spread: Option<f64>,
    /// Dataset seed (defaults to the training seed).
    #[arg(long)]
    data_seed: Option<u64>,
    /// Keep only these labels (comma-separated), relabeled 0..K'-1.
    #[arg(long)]
    keep: Option<String>,
    /// Cap on training samples after subsetting.
    #[arg(long)]
    max_train: Option<usize>,
}

#[derive(Args)]
pub struct ModelArgs {
    /// Head kind: simplex | cube | orthoplex | polygon | hadamard | trainable
    #[arg(long)]
    head: Option<String>,
    /// Total vertex count (polygon heads).
    #[arg(long)]
    k_total: Option<usize>,
    /// Embedding dimension override.
    #[arg(long)]
    dim: Option<usize>,
    /// Comma-separated hidden layer widths.
    #[arg(long)]
    hidden: Option<String>,
    /// Keep trainable-head rows unit-norm after each step.
    #[arg(long)]
    normalize: Option<bool>,
}

#[derive(Args)]
pub struct FitArgs {
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Visit training samples in dataset order.
    #[arg(long)]
    no_shuffle: bool,
    /// Dump train-split features after every epoch.
    #[arg(long)]
    dump_features: bool,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
pub struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    fit: FitArgs,
    /// Run directory to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    fit: FitArgs,
    /// Number of label permutations.
    #[arg(long)]
    n_perms: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct HadamardArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Run directory produced by train/virtual.
    #[arg(long)]
    run: PathBuf,
    /// features | angles | accuracy
    #[arg(long)]
    what: String,
    /// Overlay decision-boundary bisector lines (features plot).
    #[arg(long)]
    bisectors: bool,
    /// Output SVG path (default: <run>/plot_<what>.svg).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct InspectArgs {
    /// Run directory to summarize.
    #[arg(long)]
    run: Option<PathBuf>,
    /// Weight CSV to summarize.
    #[arg(long)]
    weights: Option<PathBuf>,
}

/// Optional config-file values; command-line flags take precedence.
#[derive(Deserialize, Default)]
#[serde(default)]
struct FileConfig {
    dataset: Option<String>,
    data_dir: Option<PathBuf>,
    classes: Option<usize>,
    input_dim: Option<usize>,
    per_class: Option<usize>,
    spread: Option<f64>,
    data_seed: Option<u64>,
    keep: Option<String>,
    max_train: Option<usize>,
    head: Option<String>,
    k_total: Option<usize>,
    dim: Option<usize>,
    hidden: Option<String>,
    normalize: Option<bool>,
    epochs: Option<usize>,
    lr: Option<f64>,
    batch_size: Option<usize>,
    seed: Option<u64>,
    shuffle: Option<bool>,
    n_perms: Option<usize>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("bad config file: {e}")))
            }
        }
    }
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad list entry `{p}`")))
        })
        .collect()
}

/// Everything the training-style subcommands share, resolved from flags,
/// config file and defaults.
struct Resolved {
    dataset: Dataset,
    setup: TrainSetup,
    n_perms: usize,
    hadamard_dim: usize,
}

fn resolve(
    data: &DataArgs,
    model: &ModelArgs,
    fit: &FitArgs,
    n_perms_flag: Option<usize>,
) -> Result<Resolved, CliError> {
    let file = FileConfig::load(fit.config.as_deref())?;

    let seed = fit.seed.or(file.seed).unwrap_or(42);
    let train = TrainConfig {
        learning_rate: fit.lr.or(file.lr).unwrap_or(0.5),
        epochs: fit.epochs.or(file.epochs).unwrap_or(20),
        batch_size: fit.batch_size.or(file.batch_size).unwrap_or(32),
        seed,
        shuffle: if fit.no_shuffle {
            false
        } else {
            file.shuffle.unwrap_or(true)
        },
    };

    let classes = data.classes.or(file.classes).unwrap_or(10);
    let dataset_kind = data
        .dataset
        .clone()
        .or(file.dataset)
        .unwrap_or_else(|| "blobs".to_string());
    let data_seed = data.data_seed.or(file.data_seed).unwrap_or(seed);
    let per_class = data.per_class.or(file.per_class).unwrap_or(200);
    let mut dataset = match dataset_kind.as_str() {
        "blobs" => data::gaussian_blobs(
            classes,
            data.input_dim.or(file.input_dim).unwrap_or(2),
            per_class,
            data.spread.or(file.spread).unwrap_or(0.3),
            data_seed,
        )?,
        "digits" => {
            // Synthetic seven-segment digits through the IDX pipeline.
            let tmp;
            let dir = match data.data_dir.clone().or(file.data_dir.clone()) {
                Some(d) => d,
                None => {
                    tmp = std::env::temp_dir()
                        .join(format!("polyclass_digits_{per_class}_{data_seed}"));
                    tmp.clone()
                }
            };
            if !dir.join("train-images-idx3-ubyte").exists() {
                data::digits::write_idx_dir(&dir, per_class, per_class.div_ceil(4), data_seed)?;
            }
            data::mnist_from_dir(&dir)?
        }
        "mnist" => {
            let dir = data
                .data_dir
                .clone()
                .or(file.data_dir)
                .ok_or_else(|| CliError::Usage("--data-dir is required for mnist".into()))?;
            data::mnist_from_dir(&dir)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown dataset `{other}` (expected blobs, digits or mnist)"
            )))
        }
    };

    if let Some(keep) = data.keep.clone().or(file.keep) {
        let labels = parse_usize_list(&keep)?;
        dataset = data::subset_classes(&dataset, &labels, true)?;
    }
    if let Some(cap) = data.max_train.or(file.max_train) {
        dataset.train.truncate(cap);
    }

    let head_name = model
        .head
        .clone()
        .or(file.head)
        .unwrap_or_else(|| "polygon".to_string());
    let k_total = model.k_total.or(file.k_total);
    let dim = model.dim.or(file.dim);
    let head = if head_name == "trainable" {
        HeadConfig::Trainable {
            dim: dim.unwrap_or(2),
            normalize: model.normalize.or(file.normalize).unwrap_or(true),
        }
    } else {
        let kind: PolytopeKind = head_name
            .parse()
            .map_err(|e: geometry::GeometryError| CliError::Usage(e.to_string()))?;
        HeadConfig::Fixed { kind, k_total, dim }
    };

    let hidden = match model.hidden.clone().or(file.hidden) {
        Some(h) => parse_usize_list(&h)?,
        None => vec![32],
    };

    Ok(Resolved {
        dataset,
        setup: TrainSetup {
            hidden_widths: hidden,
            head,
            train,
            dump_features_epochs: fit.dump_features,
        },
        n_perms: n_perms_flag.or(file.n_perms).unwrap_or(10),
        hadamard_dim: dim.unwrap_or(2),
    })
}

fn deg(rad: f64) -> f64 {
    rad.to_degrees()
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Weights(args) => cmd_weights(args),
        Command::Angles(args) => cmd_angles(args),
        Command::Train(args) => cmd_train(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Virtual(args) => cmd_virtual(args),
        Command::Hadamard(args) => cmd_hadamard(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Inspect(args) => cmd_inspect(args),
    }
}

fn cmd_weights(args: WeightsArgs) -> Result<(), CliError> {
    let kind: PolytopeKind = args
        .kind
        .parse()
        .map_err(|e: geometry::GeometryError| CliError::Usage(e.to_string()))?;
    let matrix = match kind {
        PolytopeKind::Simplex => {
            let k = match (args.dim, args.classes) {
                (Some(d), _) => d + 1,
                (None, Some(k)) => k,
                (None, None) => {
                    return Err(CliError::Usage("simplex needs --classes or --dim".into()))
                }
            };
            geometry::build_simplex(k)?
        }
        PolytopeKind::Cube => {
            let d = match (args.dim, args.classes) {
                (Some(d), _) => d,
                (None, Some(k)) => geometry::embedding_dim(kind, k)?,
                (None, None) => {
                    return Err(CliError::Usage("cube needs --classes or --dim".into()))
                }
            };
            geometry::build_cube(d)?
        }
        PolytopeKind::Orthoplex => {
            let d = match (args.dim, args.classes) {
                (Some(d), _) => d,
                (None, Some(k)) => geometry::embedding_dim(kind, k)?,
                (None, None) => {
                    return Err(CliError::Usage("orthoplex needs --classes or --dim".into()))
                }
            };
            geometry::build_orthoplex(d)?
        }
        PolytopeKind::Polygon => {
            let k = args
                .k_total
                .or(args.classes)
                .ok_or_else(|| CliError::Usage("polygon needs --classes or --k-total".into()))?;
            geometry::build_polygon(k)?
        }
        PolytopeKind::Hadamard => {
            let k = args
                .classes
                .ok_or_else(|| CliError::Usage("hadamard needs --classes".into()))?;
            geometry::build_hadamard(args.dim.unwrap_or(k), k)?
        }
    };
    let num_real = args.classes.unwrap_or(matrix.num_vertices());
    if num_real > matrix.num_vertices() {
        return Err(CliError::Usage(format!(
            "{num_real} classes exceed the {} vertices of this {kind}",
            matrix.num_vertices()
        )));
    }
    let angle = match adjacent_angle_of(&matrix) {
        Some(a) => format!("{:.3}", deg(a)),
        None => "n/a".to_string(),
    };
    println!(
        "kind={} d={} K_total={} virtual={} adjacent_angle_deg={}",
        kind,
        matrix.dim(),
        matrix.num_vertices(),
        matrix.num_vertices() - num_real,
        angle
    );
    if let Some(out) = args.out {
        matrix.to_csv(&out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_angles(args: AnglesArgs) -> Result<(), CliError> {
    if args.sweep.len() != 2 {
        return Err(CliError::Usage("--sweep takes DMIN DMAX".into()));
    }
    let (d_min, d_max) = (args.sweep[0], args.sweep[1]);
    if d_min > d_max || d_min == 0 {
        return Err(CliError::Usage(format!("bad sweep range {d_min}..{d_max}")));
    }
    let kinds: Vec<PolytopeKind> = match &args.kinds {
        None => vec![
            PolytopeKind::Simplex,
            PolytopeKind::Cube,
            PolytopeKind::Orthoplex,
        ],
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e: geometry::GeometryError| CliError::Usage(e.to_string()))
            })
            .collect::<Result<_, _>>()?,
    };
    let rows = angle_sweep(&kinds, d_min, d_max);
    let mut csv = String::from("kind,dim,angle_rad,angle_deg\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.kind,
            r.dim,
            r.angle,
            deg(r.angle)
        ));
    }
    match &args.out {
        Some(path) => {
            fs::write(path, &csv)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{csv}"),
    }
    if let Some(path) = &args.svg {
        let series: Vec<Series> = kinds
            .iter()
            .enumerate()
            .map(|(i, &kind)| Series {
                name: kind.to_string(),
                points: rows
                    .iter()
                    .filter(|r| r.kind == kind)
                    .map(|r| (r.dim as f64, deg(r.angle)))
                    .collect(),
                color: class_color(i),
            })
            .collect();
        let chart = svg::line_chart(
            &series,
            "embedding dimension",
            "adjacent angle (deg)",
            "angle between adjacent weights",
        );
        fs::write(path, chart)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_train(args: RunArgs) -> Result<(), CliError> {
    let resolved = resolve(&args.data, &args.model, &args.fit, None)?;
    let report =
        experiments::run_stationarity(&resolved.setup, &resolved.dataset, Some(&args.out))?;
    let final_angles: Vec<String> = report
        .final_fixed_angles()
        .iter()
        .map(|a| match a {
            Some(v) => format!("{:.1}", deg(*v)),
            None => "n/a".to_string(),
        })
        .collect();
    println!(
        "train: test_acc={:.4} min_pairwise_mean_angle_deg={} final_class_angles_deg=[{}] run_dir={}",
        report.fixed_final_test_accuracy.unwrap_or(f64::NAN),
        report
            .final_min_pairwise_angle
            .map(|a| format!("{:.1}", deg(a)))
            .unwrap_or_else(|| "n/a".into()),
        final_angles.join(","),
        args.out.display()
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let resolved = resolve(&args.data, &args.model, &args.fit, args.n_perms)?;
    let report = experiments::run_permutation_sweep(
        &resolved.setup,
        &resolved.dataset,
        resolved.n_perms,
        None,
        Some(&args.out),
    )?;
    println!(
        "sweep: n={} mean_acc={:.4} std={:.4} ci95_half_width={:.4} run_dir={}",
        report.accuracies.len(),
        report.mean,
        report.std_dev,
        report.ci95_half_width,
        args.out.display()
    );
    Ok(())
}

fn cmd_virtual(args: RunArgs) -> Result<(), CliError> {
    let resolved = resolve(&args.data, &args.model, &args.fit, None)?;
    let report =
        experiments::run_virtual_margin(&resolved.setup, &resolved.dataset, Some(&args.out))?;
    println!(
        "virtual: K={}/{} virtual_fraction={:.4} test_acc={:.4} run_dir={}",
        report.num_real,
        report.k_total,
        report.virtual_fraction,
        report.test_accuracy,
        args.out.display()
    );
    Ok(())
}

fn cmd_hadamard(args: HadamardArgs) -> Result<(), CliError> {
    let resolved = resolve(&args.data, &args.model, &args.fit, None)?;
    let report = experiments::run_hadamard_comparison(
        &resolved.setup,
        &resolved.dataset,
        resolved.hadamard_dim,
        Some(&args.out),
    )?;
    println!(
        "hadamard: d={} polytope={} polytope_acc={:.4} hadamard_acc={:.4} gap={:.4} run_dir={}",
        report.dim,
        report.polytope_kind,
        report.polytope_accuracy,
        report.hadamard_accuracy,
        report.gap,
        args.out.display()
    );
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| args.run.join(format!("plot_{}.svg", args.what)));
    let svg_text = match args.what.as_str() {
        "features" => {
            let classifier = FixedClassifier::load(&args.run.join("weights/classifier.json"))
                .map_err(|e| {
                    CliError::Usage(format!(
                        "feature scatter needs a fixed-head run directory: {e}"
                    ))
                })?;
            let (features, labels) = read_features_csv(&args.run.join("features_final.csv"))?;
            svg::feature_scatter(&classifier, &features, &labels, args.bisectors)?
        }
        "angles" => {
            let run = TrainRun::from_csv(&args.run.join("metrics.csv"))?;
            let series: Vec<Series> = (0..run.num_classes)
                .map(|c| Series {
                    name: format!("class {c}"),
                    points: run
                        .records
                        .iter()
                        .filter_map(|r| r.mean_angles[c].map(|a| (r.epoch as f64, deg(a))))
                        .collect(),
                    color: class_color(c),
                })
                .collect();
            svg::line_chart(
                &series,
                "epoch",
                "mean-feature angle (deg)",
                "class mean alignment",
            )
        }
        "accuracy" => {
            let run = TrainRun::from_csv(&args.run.join("metrics.csv"))?;
            let series = vec![
                Series {
                    name: "train".into(),
                    points: run
                        .records
                        .iter()
                        .map(|r| (r.epoch as f64, r.train_acc))
                        .collect(),
                    color: class_color(0),
                },
                Series {
                    name: "test".into(),
                    points: run
                        .records
                        .iter()
                        .map(|r| (r.epoch as f64, r.test_acc))
                        .collect(),
                    color: class_color(1),
                },
            ];
            svg::line_chart(&series, "epoch", "accuracy", "accuracy over epochs")
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown plot `{other}` (expected features, angles or accuracy)"
            )))
        }
    };
    fs::write(&out, svg_text)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> Result<(), CliError> {
    match (&args.run, &args.weights) {
        (Some(run), None) => {
            let config = fs::read_to_string(run.join("config.json"))?;
            let config: serde_json::Value = serde_json::from_str(&config)
                .map_err(|e| CliError::Usage(format!("bad config.json: {e}")))?;
            println!(
                "experiment: {}",
                config
                    .get("experiment")
                    .and_then(|v| v.as_str())
                    .unwrap_or("unknown")
            );
            println!(
                "dataset: {}",
                config
                    .get("dataset")
                    .and_then(|v| v.as_str())
                    .unwrap_or("unknown")
            );
            let metrics = run.join("metrics.csv");
            if metrics.exists() {
                let log = TrainRun::from_csv(&metrics)?;
                println!("epochs logged: {}", log.records.len());
                if let Some(last) = log.records.last() {
                    println!(
                        "final: train_loss={:.4} train_acc={:.4} test_acc={:.4}",
                        last.train_loss, last.train_acc, last.test_acc
                    );
                }
            }
            let weights = run.join("weights");
            if weights.join("model.json").exists() {
                let model = NetworkModel::load_checkpoint(&weights)?;
                println!(
                    "model: input_dim={} embedding_dim={} trainable_params={}",
                    model.input_dim(),
                    model.embedding_dim(),
                    model.num_trainable_params()
                );
            }
            Ok(())
        }
        (None, Some(path)) => {
            let w = WeightMatrix::from_csv(path)?;
            let mut min_angle = f64::INFINITY;
            let mut max_angle: f64 = 0.0;
            for i in 0..w.num_vertices() {
                for j in i + 1..w.num_vertices() {
                    let a = geometry::vecmath::angle_between(w.row(i), w.row(j));
                    min_angle = min_angle.min(a);
                    max_angle = max_angle.max(a);
                }
            }
            println!(
                "kind={} d={} K_total={} min_pairwise_angle_deg={:.3} max_pairwise_angle_deg={:.3}",
                w.kind(),
                w.dim(),
                w.num_vertices(),
                deg(min_angle),
                deg(max_angle)
            );
            Ok(())
        }
        _ => Err(CliError::Usage(
            "inspect needs exactly one of --run or --weights".into(),
        )),
    }
}
