//! Dataset loading and generation.
//!
//! Supports the big-endian IDX image/label format (magic `0x00000803` for
//! images, `0x00000801` for labels), synthetic Gaussian blob datasets whose
//! class means sit on polytope layouts, and a deterministic seven-segment
//! digit renderer that writes IDX files — a stand-in for handwritten-digit
//! data in environments without the real files.

use std::fs;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::geometry::{build_orthoplex, build_polygon};
use crate::rng;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("idx format: {0}")]
    Format(String),
    #[error("image/label pair is inconsistent: {images} images vs {labels} labels")]
    InconsistentPair { images: usize, labels: usize },
    #[error("label {0} not present in the dataset")]
    InvalidLabel(usize),
    #[error("permutation must be a bijection on the class labels")]
    InvalidPermutation,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One labeled input vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: usize,
}

/// Labeled train/test splits with shared dimensionality and class count.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    pub input_dim: usize,
    pub num_classes: usize,
    pub provenance: String,
}

impl Dataset {
    pub fn from_splits(
        train: Vec<Sample>,
        test: Vec<Sample>,
        num_classes: usize,
        provenance: impl Into<String>,
    ) -> Result<Self, DataError> {
        let input_dim = train
            .first()
            .or(test.first())
            .map(|s| s.x.len())
            .ok_or_else(|| DataError::InvalidArgument("dataset is empty".into()))?;
        for s in train.iter().chain(&test) {
            if s.x.len() != input_dim {
                return Err(DataError::InvalidArgument(
                    "samples have inconsistent dimensions".into(),
                ));
            }
            if s.y >= num_classes {
                return Err(DataError::InvalidLabel(s.y));
            }
        }
        Ok(Dataset {
            train,
            test,
            input_dim,
            num_classes,
            provenance: provenance.into(),
        })
    }

    /// Cache CSV with header `split,y,x_0..x_{D-1}`.
    pub fn to_csv(&self, path: &Path) -> Result<(), DataError> {
        let mut buf = String::new();
        let cols: Vec<String> = (0..self.input_dim).map(|i| format!("x_{i}")).collect();
        buf.push_str(&format!("split,y,{}\n", cols.join(",")));
        for (split, samples) in [("train", &self.train), ("test", &self.test)] {
            for s in samples {
                let xs: Vec<String> = s.x.iter().map(|v| format!("{v:.16e}")).collect();
                buf.push_str(&format!("{split},{},{}\n", s.y, xs.join(",")));
            }
        }
        fs::write(path, buf)?;
        Ok(())
    }

    pub fn from_csv(path: &Path) -> Result<Self, DataError> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| DataError::Format("empty dataset csv".into()))?;
        if !header.starts_with("split,y,") {
            return Err(DataError::Format(format!("unexpected header `{header}`")));
        }
        let dim = header.split(',').count() - 2;
        let mut train = Vec::new();
        let mut test = Vec::new();
        let mut max_label = 0usize;
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != dim + 2 {
                return Err(DataError::Format(format!("ragged row `{line}`")));
            }
            let y: usize = fields[1]
                .parse()
                .map_err(|_| DataError::Format(format!("bad label `{}`", fields[1])))?;
            let x: Result<Vec<f64>, _> = fields[2..].iter().map(|v| v.parse()).collect();
            let x = x.map_err(|_| DataError::Format(format!("bad feature row `{line}`")))?;
            max_label = max_label.max(y);
            match fields[0] {
                "train" => train.push(Sample { x, y }),
                "test" => test.push(Sample { x, y }),
                other => {
                    return Err(DataError::Format(format!("unknown split `{other}`")));
                }
            }
        }
        Dataset::from_splits(train, test, max_label + 1, "csv-cache")
    }
}

fn read_u32_be(r: &mut impl Read) -> Result<u32, DataError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| DataError::Format("truncated header".into()))?;
    Ok(u32::from_be_bytes(buf))
}

/// Parses an IDX image/label pair into samples, pixels scaled to `[0, 1]`.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Vec<Sample>, DataError> {
    let mut img = fs::File::open(images_path)?;
    let magic = read_u32_be(&mut img)?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(DataError::Format(format!(
            "image magic {magic:#010x}, expected {IDX_IMAGES_MAGIC:#010x}"
        )));
    }
    let count = read_u32_be(&mut img)? as usize;
    let rows = read_u32_be(&mut img)? as usize;
    let cols = read_u32_be(&mut img)? as usize;
    let mut pixels = Vec::new();
    img.read_to_end(&mut pixels)?;
    if pixels.len() != count * rows * cols {
        return Err(DataError::Format(format!(
            "expected {} pixel bytes, found {}",
            count * rows * cols,
            pixels.len()
        )));
    }

    let mut lab = fs::File::open(labels_path)?;
    let magic = read_u32_be(&mut lab)?;
    if magic != IDX_LABELS_MAGIC {
        return Err(DataError::Format(format!(
            "label magic {magic:#010x}, expected {IDX_LABELS_MAGIC:#010x}"
        )));
    }
    let label_count = read_u32_be(&mut lab)? as usize;
    let mut labels = Vec::new();
    lab.read_to_end(&mut labels)?;
    if labels.len() != label_count {
        return Err(DataError::Format(format!(
            "expected {label_count} label bytes, found {}",
            labels.len()
        )));
    }
    if count != label_count {
        return Err(DataError::InconsistentPair {
            images: count,
            labels: label_count,
        });
    }

    Ok(pixels
        .chunks(rows * cols)
        .zip(&labels)
        .map(|(chunk, &y)| Sample {
            x: chunk.iter().map(|&b| b as f64 / 255.0).collect(),
            y: y as usize,
        })
        .collect())
}

/// Writes an IDX image/label pair (the inverse of [`load_idx`]).
pub fn write_idx(
    images_path: &Path,
    labels_path: &Path,
    images: &[Vec<u8>],
    labels: &[u8],
    rows: usize,
    cols: usize,
) -> Result<(), DataError> {
    if images.len() != labels.len() {
        return Err(DataError::InconsistentPair {
            images: images.len(),
            labels: labels.len(),
        });
    }
    let mut buf = Vec::with_capacity(16 + images.len() * rows * cols);
    buf.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
    buf.extend_from_slice(&(images.len() as u32).to_be_bytes());
    buf.extend_from_slice(&(rows as u32).to_be_bytes());
    buf.extend_from_slice(&(cols as u32).to_be_bytes());
    for img in images {
        if img.len() != rows * cols {
            return Err(DataError::InvalidArgument(format!(
                "image has {} pixels, expected {}",
                img.len(),
                rows * cols
            )));
        }
        buf.extend_from_slice(img);
    }
    fs::write(images_path, buf)?;

    let mut buf = Vec::with_capacity(8 + labels.len());
    buf.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    buf.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    buf.extend_from_slice(labels);
    fs::write(labels_path, buf)?;
    Ok(())
}

/// Loads `train-*` and `t10k-*` IDX files from a directory.
pub fn mnist_from_dir(dir: &Path) -> Result<Dataset, DataError> {
    let train = load_idx(
        &dir.join("train-images-idx3-ubyte"),
        &dir.join("train-labels-idx1-ubyte"),
    )?;
    let test = load_idx(
        &dir.join("t10k-images-idx3-ubyte"),
        &dir.join("t10k-labels-idx1-ubyte"),
    )?;
    let num_classes = train
        .iter()
        .chain(&test)
        .map(|s| s.y)
        .max()
        .map(|m| m + 1)
        .unwrap_or(0);
    Dataset::from_splits(train, test, num_classes, "idx-dir")
}

/// Gaussian blobs with class means on a polytope layout.
///
/// Means sit at `3 *` the polygon vertices when `d_in == 2`, otherwise at
/// `3 *` the interleaved orthoplex vertices (which requires `k <= 2*d_in`).
/// Per class, the first 80% of samples go to the train split. Uses the
/// polar-method Gaussian, so a seed pins the dataset bit-for-bit.
pub fn gaussian_blobs(
    k: usize,
    d_in: usize,
    n_per_class: usize,
    spread: f64,
    seed: u64,
) -> Result<Dataset, DataError> {
    if k < 2 {
        return Err(DataError::InvalidArgument(format!(
            "need at least 2 classes, got {k}"
        )));
    }
    if spread <= 0.0 {
        return Err(DataError::InvalidArgument(format!(
            "spread must be positive, got {spread}"
        )));
    }
    if n_per_class == 0 {
        return Err(DataError::InvalidArgument(
            "n_per_class must be positive".into(),
        ));
    }
    let layout = if d_in == 2 {
        build_polygon(k)
    } else {
        build_orthoplex(d_in)
    }
    .map_err(|e| DataError::InvalidArgument(e.to_string()))?;
    if layout.num_vertices() < k {
        return Err(DataError::InvalidArgument(format!(
            "{k} classes do not fit the orthoplex layout in dimension {d_in}"
        )));
    }

    let mut r = rng::stream(seed, 0);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let n_train = (n_per_class * 4) / 5;
    for class in 0..k {
        let mean: Vec<f64> = layout.row(class).iter().map(|v| 3.0 * v).collect();
        for i in 0..n_per_class {
            let x: Vec<f64> = mean
                .iter()
                .map(|m| m + spread * rng::standard_normal(&mut r))
                .collect();
            let sample = Sample { x, y: class };
            if i < n_train {
                train.push(sample);
            } else {
                test.push(sample);
            }
        }
    }
    Dataset::from_splits(
        train,
        test,
        k,
        format!("blobs(k={k},d={d_in},n={n_per_class},spread={spread},seed={seed})"),
    )
}

/// Keeps only the listed labels. With `relabel`, classes are renumbered
/// `0..K'-1` in the order given; otherwise original labels are kept.
pub fn subset_classes(
    ds: &Dataset,
    labels_to_keep: &[usize],
    relabel: bool,
) -> Result<Dataset, DataError> {
    if labels_to_keep.is_empty() {
        return Err(DataError::InvalidArgument("no labels to keep".into()));
    }
    for &l in labels_to_keep {
        if l >= ds.num_classes {
            return Err(DataError::InvalidLabel(l));
        }
    }
    let map: std::collections::HashMap<usize, usize> = labels_to_keep
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    if map.len() != labels_to_keep.len() {
        return Err(DataError::InvalidArgument("duplicate labels".into()));
    }
    let filter = |samples: &[Sample]| -> Vec<Sample> {
        samples
            .iter()
            .filter(|s| map.contains_key(&s.y))
            .map(|s| Sample {
                x: s.x.clone(),
                y: if relabel { map[&s.y] } else { s.y },
            })
            .collect()
    };
    let num_classes = if relabel {
        labels_to_keep.len()
    } else {
        ds.num_classes
    };
    Dataset::from_splits(
        filter(&ds.train),
        filter(&ds.test),
        num_classes,
        format!("{}+subset", ds.provenance),
    )
}

/// Applies a label bijection to both splits.
pub fn permute_labels(ds: &Dataset, perm: &[usize]) -> Result<Dataset, DataError> {
    if perm.len() != ds.num_classes {
        return Err(DataError::InvalidPermutation);
    }
    let mut seen = vec![false; ds.num_classes];
    for &p in perm {
        if p >= ds.num_classes || seen[p] {
            return Err(DataError::InvalidPermutation);
        }
        seen[p] = true;
    }
    let map = |samples: &[Sample]| -> Vec<Sample> {
        samples
            .iter()
            .map(|s| Sample {
                x: s.x.clone(),
                y: perm[s.y],
            })
            .collect()
    };
    Dataset::from_splits(
        map(&ds.train),
        map(&ds.test),
        ds.num_classes,
        format!("{}+perm", ds.provenance),
    )
}

/// Seeded Fisher-Yates permutation of `0..k`.
pub fn random_permutation(k: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..k).collect();
    let mut r = rng::stream(seed, rng::STREAM_PERMUTATION);
    perm.shuffle(&mut r);
    perm
}

/// Deterministic seven-segment digit images in the 28x28 IDX layout.
pub mod digits {
    use super::*;

    const ROWS: usize = 28;
    const COLS: usize = 28;

    // Segment endpoints on the 28x28 canvas: (x0, y0, x1, y1).
    const SEGMENTS: [(f64, f64, f64, f64); 7] = [
        (8.0, 5.0, 20.0, 5.0),    // A: top
        (20.0, 5.0, 20.0, 14.0),  // B: upper right
        (20.0, 14.0, 20.0, 23.0), // C: lower right
        (8.0, 23.0, 20.0, 23.0),  // D: bottom
        (8.0, 14.0, 8.0, 23.0),   // E: lower left
        (8.0, 5.0, 8.0, 14.0),    // F: upper left
        (8.0, 14.0, 20.0, 14.0),  // G: middle
    ];

    // Which segments each digit lights up (A..G as bits 0..6).
    const DIGIT_SEGMENTS: [u8; 10] = [
        0b0111111, // 0: ABCDEF
        0b0000110, // 1: BC
        0b1011011, // 2: ABDEG
        0b1001111, // 3: ABCDG
        0b1100110, // 4: BCFG
        0b1101101, // 5: ACDFG
        0b1111101, // 6: ACDEFG
        0b0000111, // 7: ABC
        0b1111111, // 8
        0b1101111, // 9: ABCDFG
    ];

    fn segment_distance(px: f64, py: f64, seg: (f64, f64, f64, f64)) -> f64 {
        let (x0, y0, x1, y1) = seg;
        let (dx, dy) = (x1 - x0, y1 - y0);
        let len2 = dx * dx + dy * dy;
        let t = (((px - x0) * dx + (py - y0) * dy) / len2).clamp(0.0, 1.0);
        let (cx, cy) = (x0 + t * dx, y0 + t * dy);
        ((px - cx) * (px - cx) + (py - cy) * (py - cy)).sqrt()
    }

    /// Renders one digit glyph, translated by `(dx, dy)` pixels with the
    /// given stroke thickness.
    pub fn render(digit: usize, dx: f64, dy: f64, thickness: f64) -> Vec<u8> {
        assert!(digit < 10);
        let mask = DIGIT_SEGMENTS[digit];
        let mut img = vec![0u8; ROWS * COLS];
        for row in 0..ROWS {
            for col in 0..COLS {
                let px = col as f64 - dx;
                let py = row as f64 - dy;
                let mut intensity: f64 = 0.0;
                for (s, seg) in SEGMENTS.iter().enumerate() {
                    if mask >> s & 1 == 1 {
                        let dist = segment_distance(px, py, *seg);
                        intensity = intensity.max(((thickness - dist) / thickness).clamp(0.0, 1.0));
                    }
                }
                img[row * COLS + col] = (intensity * 255.0).round() as u8;
            }
        }
        img
    }

    /// Generates jittered digit images: per-sample random translation,
    /// stroke thickness and pixel noise.
    pub fn generate(n_per_class: usize, seed: u64) -> (Vec<Vec<u8>>, Vec<u8>) {
        let mut r = rng::stream(seed, 0);
        let mut images = Vec::with_capacity(10 * n_per_class);
        let mut labels = Vec::with_capacity(10 * n_per_class);
        for _ in 0..n_per_class {
            for digit in 0..10u8 {
                let dx = rng::uniform(&mut r, -2.5, 2.5);
                let dy = rng::uniform(&mut r, -2.5, 2.5);
                let thickness = rng::uniform(&mut r, 1.6, 2.6);
                let mut img = render(digit as usize, dx, dy, thickness);
                for px in img.iter_mut() {
                    let noisy = *px as f64 / 255.0 + 0.04 * rng::standard_normal(&mut r);
                    *px = (noisy.clamp(0.0, 1.0) * 255.0).round() as u8;
                }
                images.push(img);
                labels.push(digit);
            }
        }
        (images, labels)
    }

    /// Writes a full train/t10k IDX directory of synthetic digits.
    pub fn write_idx_dir(
        dir: &Path,
        n_train_per_class: usize,
        n_test_per_class: usize,
        seed: u64,
    ) -> Result<(), DataError> {
        fs::create_dir_all(dir)?;
        let (train_images, train_labels) = generate(n_train_per_class, seed);
        let (test_images, test_labels) = generate(n_test_per_class, seed.wrapping_add(1));
        write_idx(
            &dir.join("train-images-idx3-ubyte"),
            &dir.join("train-labels-idx1-ubyte"),
            &train_images,
            &train_labels,
            ROWS,
            COLS,
        )?;
        write_idx(
            &dir.join("t10k-images-idx3-ubyte"),
            &dir.join("t10k-labels-idx1-ubyte"),
            &test_images,
            &test_labels,
            ROWS,
            COLS,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idx_fixture_parses_per_format_description() {
        // Hand-built pair: 2 images of 2x2 pixels plus 2 labels. Expected
        // values derive from the published byte layout, not from load_idx.
        let dir = tempfile::tempdir().unwrap();
        let images = dir.path().join("imgs");
        let labels = dir.path().join("labs");
        let mut img_bytes = vec![0x00, 0x00, 0x08, 0x03];
        img_bytes.extend_from_slice(&2u32.to_be_bytes());
        img_bytes.extend_from_slice(&2u32.to_be_bytes());
        img_bytes.extend_from_slice(&2u32.to_be_bytes());
        img_bytes.extend_from_slice(&[0, 51, 102, 153, 204, 255, 10, 20]);
        fs::write(&images, &img_bytes).unwrap();
        let mut lab_bytes = vec![0x00, 0x00, 0x08, 0x01];
        lab_bytes.extend_from_slice(&2u32.to_be_bytes());
        lab_bytes.extend_from_slice(&[7, 3]);
        fs::write(&labels, &lab_bytes).unwrap();

        let samples = load_idx(&images, &labels).unwrap();
        assert_eq!(samples.len(), 2);
        assert_eq!(samples[0].y, 7);
        assert_eq!(samples[1].y, 3);
        let expected: Vec<f64> = [0, 51, 102, 153]
            .iter()
            .map(|&b| b as f64 / 255.0)
            .collect();
        assert_eq!(samples[0].x, expected);
        let expected: Vec<f64> = [204, 255, 10, 20]
            .iter()
            .map(|&b| b as f64 / 255.0)
            .collect();
        assert_eq!(samples[1].x, expected);
    }

    #[test]
    fn idx_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let images = dir.path().join("imgs");
        let labels = dir.path().join("labs");

        // Wrong magic.
        fs::write(&images, [0x00, 0x00, 0x08, 0x01, 0, 0, 0, 0]).unwrap();
        fs::write(&labels, [0x00, 0x00, 0x08, 0x01, 0, 0, 0, 0]).unwrap();
        assert!(matches!(
            load_idx(&images, &labels),
            Err(DataError::Format(_))
        ));

        // Truncated pixel payload.
        let mut img_bytes = vec![0x00, 0x00, 0x08, 0x03];
        img_bytes.extend_from_slice(&1u32.to_be_bytes());
        img_bytes.extend_from_slice(&2u32.to_be_bytes());
        img_bytes.extend_from_slice(&2u32.to_be_bytes());
        img_bytes.extend_from_slice(&[1, 2]); // needs 4 bytes
        fs::write(&images, &img_bytes).unwrap();
        assert!(matches!(
            load_idx(&images, &labels),
            Err(DataError::Format(_))
        ));

        // 2 images vs 1 label.
        let mut img_bytes = vec![0x00, 0x00, 0x08, 0x03];
        img_bytes.extend_from_slice(&2u32.to_be_bytes());
        img_bytes.extend_from_slice(&1u32.to_be_bytes());
        img_bytes.extend_from_slice(&1u32.to_be_bytes());
        img_bytes.extend_from_slice(&[1, 2]);
        fs::write(&images, &img_bytes).unwrap();
        let mut lab_bytes = vec![0x00, 0x00, 0x08, 0x01];
        lab_bytes.extend_from_slice(&1u32.to_be_bytes());
        lab_bytes.push(0);
        fs::write(&labels, &lab_bytes).unwrap();
        assert!(matches!(
            load_idx(&images, &labels),
            Err(DataError::InconsistentPair {
                images: 2,
                labels: 1
            })
        ));
    }

    #[test]
    fn idx_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let images: Vec<Vec<u8>> = vec![vec![0, 255, 128, 64], vec![1, 2, 3, 4]];
        let labels = vec![9u8, 0u8];
        let ip = dir.path().join("imgs");
        let lp = dir.path().join("labs");
        write_idx(&ip, &lp, &images, &labels, 2, 2).unwrap();
        let samples = load_idx(&ip, &lp).unwrap();
        for (s, (img, &y)) in samples.iter().zip(images.iter().zip(&labels)) {
            assert_eq!(s.y, y as usize);
            let expected: Vec<f64> = img.iter().map(|&b| b as f64 / 255.0).collect();
            assert_eq!(s.x, expected);
        }
    }

    #[test]
    fn blobs_are_deterministic_and_split_80_20() {
        let a = gaussian_blobs(4, 2, 50, 0.3, 7).unwrap();
        let b = gaussian_blobs(4, 2, 50, 0.3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.train.len(), 4 * 40);
        assert_eq!(a.test.len(), 4 * 10);
        let c = gaussian_blobs(4, 2, 50, 0.3, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn blob_splits_are_disjoint_across_seeds() {
        for seed in 0..50 {
            let ds = gaussian_blobs(3, 2, 20, 0.5, seed).unwrap();
            for tr in &ds.train {
                for te in &ds.test {
                    assert_ne!(tr.x, te.x);
                }
            }
        }
    }

    #[test]
    fn tiny_spread_blobs_sit_on_their_means() {
        let ds = gaussian_blobs(5, 2, 10, 1e-9, 3).unwrap();
        let layout = build_polygon(5).unwrap();
        for s in ds.train.iter().chain(&ds.test) {
            let mean: Vec<f64> = layout.row(s.y).iter().map(|v| 3.0 * v).collect();
            for (a, b) in s.x.iter().zip(&mean) {
                assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn blobs_nearest_mean_oracle_exceeds_99_percent() {
        let ds = gaussian_blobs(10, 2, 100, 0.3, 11).unwrap();
        let layout = build_polygon(10).unwrap();
        let mut correct = 0;
        let all: Vec<&Sample> = ds.train.iter().chain(&ds.test).collect();
        for s in &all {
            let nearest = (0..10)
                .min_by(|&a, &b| {
                    let da: f64 =
                        s.x.iter()
                            .zip(layout.row(a))
                            .map(|(x, m)| (x - 3.0 * m) * (x - 3.0 * m))
                            .sum();
                    let db: f64 =
                        s.x.iter()
                            .zip(layout.row(b))
                            .map(|(x, m)| (x - 3.0 * m) * (x - 3.0 * m))
                            .sum();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            if nearest == s.y {
                correct += 1;
            }
        }
        let acc = correct as f64 / all.len() as f64;
        assert!(acc > 0.99, "nearest-mean accuracy {acc}");
    }

    #[test]
    fn blobs_high_dim_uses_orthoplex_layout() {
        let ds = gaussian_blobs(6, 3, 10, 0.1, 5).unwrap();
        assert_eq!(ds.input_dim, 3);
        assert!(gaussian_blobs(8, 3, 10, 0.1, 5).is_err()); // 8 > 2*3
    }

    #[test]
    fn subset_keeps_and_relabels() {
        let ds = gaussian_blobs(6, 2, 20, 0.3, 1).unwrap();
        let sub = subset_classes(&ds, &[0, 1, 2, 3], true).unwrap();
        assert_eq!(sub.num_classes, 4);
        assert!(sub.train.iter().all(|s| s.y < 4));
        assert_eq!(sub.train.len(), 4 * 16);

        let all = subset_classes(&ds, &[0, 1, 2, 3, 4, 5], true).unwrap();
        assert_eq!(
            all,
            Dataset {
                provenance: all.provenance.clone(),
                ..ds.clone()
            }
        );

        let single = subset_classes(&ds, &[5], true).unwrap();
        assert_eq!(single.num_classes, 1);
        assert!(single.train.iter().all(|s| s.y == 0));

        assert!(matches!(
            subset_classes(&ds, &[9], true),
            Err(DataError::InvalidLabel(9))
        ));
    }

    #[test]
    fn subset_without_relabel_preserves_labels() {
        let ds = gaussian_blobs(4, 2, 10, 0.3, 1).unwrap();
        let sub = subset_classes(&ds, &[2, 3], false).unwrap();
        assert_eq!(sub.num_classes, 4);
        assert!(sub.train.iter().all(|s| s.y == 2 || s.y == 3));
    }

    #[test]
    fn permutation_round_trip_and_histogram() {
        let ds = gaussian_blobs(5, 2, 20, 0.3, 2).unwrap();
        let perm = random_permutation(5, 99);
        assert_eq!(perm, random_permutation(5, 99));

        let permuted = permute_labels(&ds, &perm).unwrap();
        let mut inverse = vec![0usize; 5];
        for (old, &new) in perm.iter().enumerate() {
            inverse[new] = old;
        }
        let restored = permute_labels(&permuted, &inverse).unwrap();
        assert_eq!(restored.train, ds.train);
        assert_eq!(restored.test, ds.test);

        let hist = |samples: &[Sample]| {
            let mut h = vec![0usize; 5];
            for s in samples {
                h[s.y] += 1;
            }
            h
        };
        let mut before = hist(&ds.train);
        let mut after = hist(&permuted.train);
        before.sort_unstable();
        after.sort_unstable();
        assert_eq!(before, after);

        let identity: Vec<usize> = (0..5).collect();
        assert_eq!(permute_labels(&ds, &identity).unwrap().train, ds.train);

        assert!(matches!(
            permute_labels(&ds, &[0, 0, 1, 2, 3]),
            Err(DataError::InvalidPermutation)
        ));
    }

    #[test]
    fn dataset_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ds = gaussian_blobs(3, 2, 10, 0.4, 4).unwrap();
        let path = dir.path().join("cache.csv");
        ds.to_csv(&path).unwrap();
        let back = Dataset::from_csv(&path).unwrap();
        assert_eq!(ds.train, back.train);
        assert_eq!(ds.test, back.test);
        assert_eq!(ds.num_classes, back.num_classes);
    }

    #[test]
    fn synthetic_digits_build_an_idx_dir() {
        let dir = tempfile::tempdir().unwrap();
        digits::write_idx_dir(dir.path(), 3, 2, 77).unwrap();
        let ds = mnist_from_dir(dir.path()).unwrap();
        assert_eq!(ds.num_classes, 10);
        assert_eq!(ds.train.len(), 30);
        assert_eq!(ds.test.len(), 20);
        assert_eq!(ds.input_dim, 28 * 28);
        // Pixels are scaled into [0, 1] with real ink somewhere.
        assert!(ds
            .train
            .iter()
            .all(|s| s.x.iter().all(|&p| (0.0..=1.0).contains(&p))));
        assert!(ds.train.iter().any(|s| s.x.iter().any(|&p| p > 0.5)));
    }

    #[test]
    fn digit_glyphs_are_distinct() {
        let imgs: Vec<Vec<u8>> = (0..10).map(|d| digits::render(d, 0.0, 0.0, 2.0)).collect();
        for i in 0..10 {
            for j in i + 1..10 {
                let diff: usize = imgs[i].iter().zip(&imgs[j]).filter(|(a, b)| a != b).count();
                assert!(diff > 20, "digits {i} and {j} differ in only {diff} pixels");
            }
        }
    }
}
