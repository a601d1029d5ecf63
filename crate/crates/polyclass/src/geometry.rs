//! Regular polytope vertex sets used as fixed classifier geometries.
//!
//! Each construction returns a [`WeightMatrix`]: unit-norm row vectors in
//! `R^d`, one per polytope vertex. The module also computes the angular
//! structure of those vertex sets — adjacency graphs, closed-form angles
//! between adjacent vertices, angular bisectors (the decision boundaries of
//! a zero-bias classifier), and the duality relation between a polytope's
//! bisector set and the vertex set of its dual.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for constructed quantities (row norms, exact dot products).
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Tolerance for derived angle checks.
pub const ANGLE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("class count must be at least 2, got {0}")]
    InvalidClassCount(usize),
    #[error("invalid dimension {dim} for {kind}: {reason}")]
    InvalidDimension {
        kind: PolytopeKind,
        dim: usize,
        reason: &'static str,
    },
    #[error("{0} has no canonical adjacency")]
    NoCanonicalAdjacency(PolytopeKind),
    #[error("bisector of an antipodal pair is undefined")]
    UndefinedBisector,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("weight matrix file format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The five supported fixed-classifier geometries.
///
/// `Polygon` lives in `R^2` only; `Hadamard` is the orthogonal-columns
/// baseline rather than a regular polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolytopeKind {
    Simplex,
    Cube,
    Orthoplex,
    Polygon,
    Hadamard,
}

impl PolytopeKind {
    pub const ALL: [PolytopeKind; 5] = [
        PolytopeKind::Simplex,
        PolytopeKind::Cube,
        PolytopeKind::Orthoplex,
        PolytopeKind::Polygon,
        PolytopeKind::Hadamard,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolytopeKind::Simplex => "simplex",
            PolytopeKind::Cube => "cube",
            PolytopeKind::Orthoplex => "orthoplex",
            PolytopeKind::Polygon => "polygon",
            PolytopeKind::Hadamard => "hadamard",
        }
    }
}

impl fmt::Display for PolytopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolytopeKind {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "simplex" => Ok(PolytopeKind::Simplex),
            "cube" => Ok(PolytopeKind::Cube),
            "orthoplex" => Ok(PolytopeKind::Orthoplex),
            "polygon" => Ok(PolytopeKind::Polygon),
            "hadamard" => Ok(PolytopeKind::Hadamard),
            other => Err(GeometryError::InvalidArgument(format!(
                "unknown polytope kind `{other}`"
            ))),
        }
    }
}

/// Small vector helpers shared across the crate.
pub mod vecmath {
    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    pub fn norm(a: &[f64]) -> f64 {
        dot(a, a).sqrt()
    }

    pub fn normalized(a: &[f64]) -> Vec<f64> {
        let n = norm(a);
        a.iter().map(|x| x / n).collect()
    }

    /// Angle in `[0, pi]` between two nonzero vectors.
    pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
        let c = dot(a, b) / (norm(a) * norm(b));
        c.clamp(-1.0, 1.0).acos()
    }
}

use vecmath::{dot, norm, normalized};

/// A set of unit-norm classifier directions, one row per polytope vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    kind: PolytopeKind,
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl WeightMatrix {
    /// Builds a matrix from explicit rows, checking shape and unit norms.
    pub fn new(kind: PolytopeKind, dim: usize, rows: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(GeometryError::InvalidArgument(format!(
                    "row {i} has length {}, expected {dim}",
                    row.len()
                )));
            }
            let n = norm(row);
            if (n - 1.0).abs() > CONSTRUCTION_TOL {
                return Err(GeometryError::InvalidArgument(format!(
                    "row {i} has norm {n}, expected 1"
                )));
            }
        }
        Ok(WeightMatrix { kind, dim, rows })
    }

    pub fn kind(&self) -> PolytopeKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn dot(&self, i: usize, j: usize) -> f64 {
        dot(&self.rows[i], &self.rows[j])
    }

    pub fn gram(&self) -> Vec<Vec<f64>> {
        let k = self.num_vertices();
        (0..k)
            .map(|i| (0..k).map(|j| self.dot(i, j)).collect())
            .collect()
    }

    /// Writes the matrix as CSV: a `dim,kind,K_total` header line, one line
    /// of values, then one row per vertex at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "dim,kind,K_total")?;
        writeln!(w, "{},{},{}", self.dim, self.kind, self.num_vertices())?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self, path: &Path) -> Result<(), GeometryError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        fs::write(path, buf)?;
        Ok(())
    }

    pub fn from_csv(path: &Path) -> Result<Self, GeometryError> {
        let text = fs::read_to_string(path)?;
        Self::parse_csv(&text)
    }

    pub fn parse_csv(text: &str) -> Result<Self, GeometryError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| GeometryError::Format("empty file".into()))?;
        if header.trim() != "dim,kind,K_total" {
            return Err(GeometryError::Format(format!(
                "unexpected header `{header}`"
            )));
        }
        let meta = lines
            .next()
            .ok_or_else(|| GeometryError::Format("missing metadata line".into()))?;
        let fields: Vec<&str> = meta.trim().split(',').collect();
        if fields.len() != 3 {
            return Err(GeometryError::Format(format!(
                "metadata line `{meta}` must have 3 fields"
            )));
        }
        let dim: usize = fields[0]
            .parse()
            .map_err(|_| GeometryError::Format(format!("bad dim `{}`", fields[0])))?;
        let kind: PolytopeKind = fields[1].parse()?;
        let k_total: usize = fields[2]
            .parse()
            .map_err(|_| GeometryError::Format(format!("bad K_total `{}`", fields[2])))?;
        let mut rows = Vec::with_capacity(k_total);
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, _> = line.trim().split(',').map(|v| v.parse()).collect();
            let row = row.map_err(|_| GeometryError::Format(format!("bad vertex row `{line}`")))?;
            rows.push(row);
        }
        if rows.len() != k_total {
            return Err(GeometryError::Format(format!(
                "expected {k_total} vertex rows, found {}",
                rows.len()
            )));
        }
        WeightMatrix::new(kind, dim, rows)
    }
}

/// Undirected edge set over vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyGraph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl AdjacencyGraph {
    fn new(vertex_count: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = pairs
            .into_iter()
            .filter(|&(i, j)| i != j)
            .map(|(i, j)| (i.min(j), i.max(j)))
            .collect();
        AdjacencyGraph {
            vertex_count,
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(i, j)| {
                if i == v {
                    Some(j)
                } else if j == v {
                    Some(i)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Embedding dimension needed to host `k` classes on the given polytope:
/// `K-1` for the simplex, `ceil(log2 K)` for the cube, `ceil(K/2)` for the
/// orthoplex. Polygon and Hadamard take their dimension explicitly.
pub fn embedding_dim(kind: PolytopeKind, k: usize) -> Result<usize, GeometryError> {
    if k < 2 {
        return Err(GeometryError::InvalidClassCount(k));
    }
    match kind {
        PolytopeKind::Simplex => Ok(k - 1),
        PolytopeKind::Cube => Ok(ceil_log2(k)),
        PolytopeKind::Orthoplex => Ok(k.div_ceil(2)),
        other => Err(GeometryError::InvalidArgument(format!(
            "{other} takes an explicit dimension, not a class count"
        ))),
    }
}

fn ceil_log2(k: usize) -> usize {
    debug_assert!(k >= 2);
    (usize::BITS - (k - 1).leading_zeros()) as usize
}

/// Regular simplex on `k` vertices in `R^{k-1}`.
///
/// Built from the standard basis `e_1..e_{k-1}` plus the extra vertex
/// `alpha * sum(e_i)` with `alpha = (1 - sqrt(k)) / (k - 1)`, then shifted
/// about the centroid and normalized. All pairwise dot products equal
/// `-1/(k-1)` and the rows sum to the zero vector.
pub fn build_simplex(k: usize) -> Result<WeightMatrix, GeometryError> {
    if k < 2 {
        return Err(GeometryError::InvalidClassCount(k));
    }
    let d = k - 1;
    let alpha = (1.0 - (k as f64).sqrt()) / d as f64;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k);
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        rows.push(e);
    }
    rows.push(vec![alpha; d]);
    // Centroid shift makes the vertex set symmetric about the origin.
    let centroid: Vec<f64> = (0..d)
        .map(|c| rows.iter().map(|r| r[c]).sum::<f64>() / k as f64)
        .collect();
    let rows = rows
        .into_iter()
        .map(|r| {
            let shifted: Vec<f64> = r.iter().zip(&centroid).map(|(x, c)| x - c).collect();
            normalized(&shifted)
        })
        .collect();
    WeightMatrix::new(PolytopeKind::Simplex, d, rows)
}

/// Orthoplex (cross-polytope) vertices `{±e_1, ..., ±e_d}`.
///
/// Rows are interleaved `+e_1, -e_1, +e_2, -e_2, ...` so that with an odd
/// number of real classes the single unassigned vertex is the last one.
pub fn build_orthoplex(d: usize) -> Result<WeightMatrix, GeometryError> {
    if d < 1 {
        return Err(GeometryError::InvalidDimension {
            kind: PolytopeKind::Orthoplex,
            dim: d,
            reason: "dimension must be at least 1",
        });
    }
    let mut rows = Vec::with_capacity(2 * d);
    for axis in 0..d {
        for sign in [1.0, -1.0] {
            let mut row = vec![0.0; d];
            row[axis] = sign;
            rows.push(row);
        }
    }
    WeightMatrix::new(PolytopeKind::Orthoplex, d, rows)
}

/// Single hypercube vertex: coordinate `i` is `+1/sqrt(d)` when bit `i` of
/// `index` is set, else `-1/sqrt(d)` (bit 0 is the least significant).
pub fn cube_vertex(d: usize, index: u64) -> Vec<f64> {
    let scale = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|bit| if index >> bit & 1 == 1 { scale } else { -scale })
        .collect()
}

/// Hypercube vertices, all `2^d` sign patterns normalized to unit length,
/// enumerated in binary counting order.
pub fn build_cube(d: usize) -> Result<WeightMatrix, GeometryError> {
    if !(1..=30).contains(&d) {
        return Err(GeometryError::InvalidDimension {
            kind: PolytopeKind::Cube,
            dim: d,
            reason: "dimension must be in 1..=30 (2^d rows are materialized)",
        });
    }
    let rows = (0..1u64 << d).map(|j| cube_vertex(d, j)).collect();
    WeightMatrix::new(PolytopeKind::Cube, d, rows)
}

/// Regular `k`-gon in `R^2`: row `j` is `(cos 2*pi*j/k, sin 2*pi*j/k)`.
pub fn build_polygon(k: usize) -> Result<WeightMatrix, GeometryError> {
    if k < 2 {
        return Err(GeometryError::InvalidClassCount(k));
    }
    let rows = (0..k)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            vec![theta.cos(), theta.sin()]
        })
        .collect();
    WeightMatrix::new(PolytopeKind::Polygon, 2, rows)
}

/// Hadamard baseline: `k` directions from the columns of a Sylvester
/// Hadamard matrix.
///
/// Let `m` be the smallest power of two with `m >= max(d, k)`. The first
/// `k` columns of `H_m` are truncated to their first `d` entries and
/// normalized. When `d < k` the truncated columns are no longer mutually
/// orthogonal and distinct classes can receive identical or opposite
/// directions.
pub fn build_hadamard(d: usize, k: usize) -> Result<WeightMatrix, GeometryError> {
    if d < 1 {
        return Err(GeometryError::InvalidDimension {
            kind: PolytopeKind::Hadamard,
            dim: d,
            reason: "dimension must be at least 1",
        });
    }
    if k < 2 {
        return Err(GeometryError::InvalidClassCount(k));
    }
    // Sylvester entry: H_m[i][j] = (-1)^popcount(i & j) for any power-of-two
    // m exceeding both indices, so truncated columns never need the full
    // matrix materialized.
    let entry = |i: usize, j: usize| -> f64 {
        if (i & j).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let rows = (0..k)
        .map(|col| {
            let truncated: Vec<f64> = (0..d).map(|i| entry(i, col)).collect();
            normalized(&truncated)
        })
        .collect();
    WeightMatrix::new(PolytopeKind::Hadamard, d, rows)
}

/// Edge graph of the polytope underlying `w`.
///
/// Simplex: complete graph. Cube: Hamming-distance-1 index pairs.
/// Orthoplex: every non-antipodal pair (exactly the dot-0 pairs). Polygon:
/// consecutive indices mod K. Hadamard has no canonical adjacency.
pub fn adjacency(w: &WeightMatrix) -> Result<AdjacencyGraph, GeometryError> {
    let k = w.num_vertices();
    match w.kind() {
        PolytopeKind::Simplex => Ok(AdjacencyGraph::new(
            k,
            (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))),
        )),
        PolytopeKind::Cube => Ok(AdjacencyGraph::new(
            k,
            (0..k).flat_map(|i| {
                (i + 1..k).filter_map(move |j| ((i ^ j).count_ones() == 1).then_some((i, j)))
            }),
        )),
        PolytopeKind::Orthoplex => Ok(AdjacencyGraph::new(
            k,
            (0..k).flat_map(|i| {
                // Antipode of row 2m is row 2m+1 in the interleaved layout.
                (i + 1..k).filter_map(move |j| (j != i ^ 1).then_some((i, j)))
            }),
        )),
        PolytopeKind::Polygon => Ok(AdjacencyGraph::new(k, (0..k).map(|i| (i, (i + 1) % k)))),
        PolytopeKind::Hadamard => Err(GeometryError::NoCanonicalAdjacency(PolytopeKind::Hadamard)),
    }
}

/// Closed-form angle between a vertex and its adjacent vertices.
///
/// Simplex: `arccos(-1/d)`; cube: `arccos((d-2)/d)`; orthoplex: `pi/2`
/// (defined for `d >= 2`; at `d = 1` the only other vertex is antipodal).
pub fn adjacent_angle(kind: PolytopeKind, d: usize) -> Result<f64, GeometryError> {
    match kind {
        PolytopeKind::Simplex => {
            if d < 1 {
                return Err(GeometryError::InvalidDimension {
                    kind,
                    dim: d,
                    reason: "dimension must be at least 1",
                });
            }
            Ok((-1.0 / d as f64).acos())
        }
        PolytopeKind::Cube => {
            if d < 1 {
                return Err(GeometryError::InvalidDimension {
                    kind,
                    dim: d,
                    reason: "dimension must be at least 1",
                });
            }
            Ok(((d as f64 - 2.0) / d as f64).acos())
        }
        PolytopeKind::Orthoplex => {
            if d < 2 {
                return Err(GeometryError::InvalidDimension {
                    kind,
                    dim: d,
                    reason: "adjacent vertices require dimension at least 2",
                });
            }
            Ok(std::f64::consts::FRAC_PI_2)
        }
        other => Err(GeometryError::InvalidArgument(format!(
            "adjacent angle is parameterized by dimension only for simplex, \
             cube and orthoplex; got {other}"
        ))),
    }
}

/// Adjacent-vertex angle of an already-built matrix, when one is defined.
/// Polygon uses its consecutive gap `2*pi/K`; Hadamard has none.
pub fn adjacent_angle_of(w: &WeightMatrix) -> Option<f64> {
    match w.kind() {
        PolytopeKind::Simplex | PolytopeKind::Cube => adjacent_angle(w.kind(), w.dim()).ok(),
        PolytopeKind::Orthoplex => adjacent_angle(PolytopeKind::Orthoplex, w.dim()).ok(),
        PolytopeKind::Polygon => Some(2.0 * std::f64::consts::PI / w.num_vertices() as f64),
        PolytopeKind::Hadamard => None,
    }
}

/// One row of an angle sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleSweepRow {
    pub kind: PolytopeKind,
    pub dim: usize,
    pub angle: f64,
}

/// Tabulates `adjacent_angle` for each kind over an inclusive dimension
/// range. Combinations with no defined angle (orthoplex at `d = 1`) are
/// skipped.
pub fn angle_sweep(kinds: &[PolytopeKind], d_min: usize, d_max: usize) -> Vec<AngleSweepRow> {
    let mut rows = Vec::new();
    for &kind in kinds {
        for d in d_min..=d_max {
            if let Ok(angle) = adjacent_angle(kind, d) {
                rows.push(AngleSweepRow {
                    kind,
                    dim: d,
                    angle,
                });
            }
        }
    }
    rows
}

/// Unit angular bisector `(w_i + w_j) / ||w_i + w_j||` of two vertex
/// directions. Errors on antipodal pairs, whose bisector is undefined.
pub fn bisector(w: &WeightMatrix, i: usize, j: usize) -> Result<Vec<f64>, GeometryError> {
    if i == j {
        return Err(GeometryError::InvalidArgument(
            "bisector needs two distinct vertices".into(),
        ));
    }
    let sum: Vec<f64> = w.row(i).iter().zip(w.row(j)).map(|(a, b)| a + b).collect();
    let n = norm(&sum);
    if n < 1e-9 {
        return Err(GeometryError::UndefinedBisector);
    }
    Ok(sum.iter().map(|x| x / n).collect())
}

/// Outcome of a single structural predicate inside a duality report.
#[derive(Debug, Clone, Serialize)]
pub struct PredicateCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail summary of the dual-structure predicates for one geometry.
#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub kind: PolytopeKind,
    pub size: usize,
    pub checks: Vec<PredicateCheck>,
}

impl DualityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, passed: bool, detail: String) -> PredicateCheck {
    PredicateCheck {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Verifies that the decision-boundary set (the adjacent-pair bisectors)
/// has the structure of the dual polytope.
///
/// * cube: every bisector has exactly one zero coordinate, the rest of
///   equal magnitude (orthoplex-like facet directions);
/// * orthoplex: every bisector has exactly two nonzero coordinates of
///   magnitude `1/sqrt(2)` (cube-like 2-face structure);
/// * polygon: the bisectors form the dual `K`-gon rotated by `pi/K`;
/// * simplex: each bisector opposes the centroid of the remaining
///   vertices (self-duality; for `K = 3` this is exactly `-w_k`).
///
/// `size` is the embedding dimension for simplex/cube/orthoplex and the
/// vertex count for polygon.
pub fn duality_report(kind: PolytopeKind, size: usize) -> Result<DualityReport, GeometryError> {
    let w = match kind {
        PolytopeKind::Cube => {
            if size < 2 {
                return Err(GeometryError::InvalidDimension {
                    kind,
                    dim: size,
                    reason: "duality needs dimension at least 2",
                });
            }
            build_cube(size)?
        }
        PolytopeKind::Orthoplex => {
            if size < 2 {
                return Err(GeometryError::InvalidDimension {
                    kind,
                    dim: size,
                    reason: "duality needs dimension at least 2",
                });
            }
            build_orthoplex(size)?
        }
        PolytopeKind::Polygon => {
            if size < 3 {
                return Err(GeometryError::InvalidClassCount(size));
            }
            build_polygon(size)?
        }
        PolytopeKind::Simplex => {
            if size < 2 {
                return Err(GeometryError::InvalidDimension {
                    kind,
                    dim: size,
                    reason: "self-duality needs dimension at least 2",
                });
            }
            build_simplex(size + 1)?
        }
        PolytopeKind::Hadamard => {
            return Err(GeometryError::NoCanonicalAdjacency(PolytopeKind::Hadamard))
        }
    };

    let graph = adjacency(&w)?;
    let mut bisectors = Vec::new();
    for (i, j) in graph.edges() {
        bisectors.push(((i, j), bisector(&w, i, j)?));
    }

    let mut checks = Vec::new();

    // Every bisector ties the logits of the pair it separates.
    let max_tie_gap = bisectors
        .iter()
        .map(|((i, j), b)| (dot(b, w.row(*i)) - dot(b, w.row(*j))).abs())
        .fold(0.0_f64, f64::max);
    checks.push(check(
        "bisector_logit_tie",
        max_tie_gap <= CONSTRUCTION_TOL,
        format!(
            "max |b.w_i - b.w_j| = {max_tie_gap:.3e} over {} pairs",
            bisectors.len()
        ),
    ));

    match kind {
        PolytopeKind::Cube => {
            let d = w.dim();
            let expected_edges = d * (1 << (d - 1));
            checks.push(check(
                "edge_count",
                bisectors.len() == expected_edges,
                format!("{} edges, expected {expected_edges}", bisectors.len()),
            ));
            let magnitude = 1.0 / ((d - 1) as f64).sqrt();
            let ok = bisectors.iter().all(|(_, b)| {
                let zeros = b.iter().filter(|x| x.abs() <= CONSTRUCTION_TOL).count();
                let equal = b
                    .iter()
                    .filter(|x| x.abs() > CONSTRUCTION_TOL)
                    .all(|x| (x.abs() - magnitude).abs() <= ANGLE_TOL);
                zeros == 1 && equal
            });
            checks.push(check(
                "one_zero_coordinate",
                ok,
                "each bisector has one zero coordinate and the rest of equal magnitude".into(),
            ));
        }
        PolytopeKind::Orthoplex => {
            let half_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            let ok = bisectors.iter().all(|(_, b)| {
                let nonzero: Vec<f64> = b
                    .iter()
                    .filter(|x| x.abs() > CONSTRUCTION_TOL)
                    .copied()
                    .collect();
                nonzero.len() == 2
                    && nonzero
                        .iter()
                        .all(|x| (x.abs() - half_sqrt2).abs() <= ANGLE_TOL)
            });
            checks.push(check(
                "two_nonzero_coords_half_sqrt2",
                ok,
                "each bisector has exactly two nonzero coordinates of magnitude 1/sqrt(2)".into(),
            ));
        }
        PolytopeKind::Polygon => {
            let k = w.num_vertices();
            let tau = 2.0 * std::f64::consts::PI;
            // Consecutive pair (j, j+1) should bisect at the gap midpoint.
            let ok = bisectors.iter().all(|((i, j), b)| {
                let lo = (*i).min(*j);
                // The wrap-around edge (0, k-1) sits at the last midpoint.
                let idx = if (lo == 0) && (i.max(j) == &(k - 1)) && k > 2 {
                    k - 1
                } else {
                    lo
                };
                let expected = ((2 * idx + 1) as f64) * std::f64::consts::PI / k as f64;
                let actual = b[1].atan2(b[0]).rem_euclid(tau);
                let diff = (actual - expected)
                    .abs()
                    .min(tau - (actual - expected).abs());
                diff <= ANGLE_TOL
            });
            checks.push(check(
                "dual_polygon_rotated_half_step",
                ok,
                format!("{k} bisectors at angles (2j+1)*pi/{k}"),
            ));
        }
        PolytopeKind::Simplex => {
            let ok = bisectors.iter().all(|((i, j), b)| {
                let mut rest = vec![0.0; w.dim()];
                for v in 0..w.num_vertices() {
                    if v != *i && v != *j {
                        for (r, x) in rest.iter_mut().zip(w.row(v)) {
                            *r += x;
                        }
                    }
                }
                let opposite = normalized(&rest);
                b.iter()
                    .zip(&opposite)
                    .all(|(x, y)| (x + y).abs() <= ANGLE_TOL)
            });
            checks.push(check(
                "self_dual_opposes_remaining_centroid",
                ok,
                "each bisector is the negated centroid direction of the remaining vertices".into(),
            ));
        }
        PolytopeKind::Hadamard => unreachable!(),
    }

    Ok(DualityReport { kind, size, checks })
}
