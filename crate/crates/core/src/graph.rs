//! Weighted undirected graphs with self-loops, generalized Laplacians
//! `L = D − W + V` and the rank-one updates that relate them.
//!
//! Vertex indices are zero-based in the API. The plain-text graph format and
//! the textual update descriptors (`selfloop:i:w`, `edge:i:j:w`) are one-based.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{check_len, Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    self_loops: Vec<(usize, f64)>,
}

impl GraphSpec {
    /// Validates and normalizes the edge list so that every edge is stored
    /// as `(i, j, w)` with `i < j`.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>, self_loops: Vec<(usize, f64)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("graph needs at least 2 vertices, got {n}")));
        }
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (i, j, w) in edges {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
            if i == j {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {i}) is a self-loop; use the self-loop list"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidGraph(format!("edge ({i}, {j}) has non-finite weight")));
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if !seen.insert((a, b)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
            normalized.push((a, b, w));
        }
        let mut loop_nodes = BTreeSet::new();
        for &(i, w) in &self_loops {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if !w.is_finite() {
                return Err(Error::InvalidGraph(format!("self-loop at {i} has non-finite weight")));
            }
            if !loop_nodes.insert(i) {
                return Err(Error::InvalidGraph(format!("duplicate self-loop at {i}")));
            }
        }
        Ok(Self {
            n,
            edges: normalized,
            self_loops,
        })
    }

    /// Unit-weight path `0 − 1 − … − (n−1)`.
    pub fn path(n: usize) -> Result<Self> {
        let edges = (0..n.saturating_sub(1)).map(|i| (i, i + 1, 1.0)).collect();
        Self::new(n, edges, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn self_loops(&self) -> &[(usize, f64)] {
        &self.self_loops
    }

    /// Adds `w` to the self-loop weight at `i`.
    pub fn with_self_loop(&self, i: usize, w: f64) -> Result<Self> {
        let mut loops = self.self_loops.clone();
        match loops.iter_mut().find(|(node, _)| *node == i) {
            Some(entry) => entry.1 += w,
            None => loops.push((i, w)),
        }
        Self::new(self.n, self.edges.clone(), loops)
    }

    /// Adds `w` to the weight of edge `(i, j)`, creating it if absent.
    pub fn with_edge_delta(&self, i: usize, j: usize, w: f64) -> Result<Self> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let mut edges = self.edges.clone();
        match edges.iter_mut().find(|(x, y, _)| *x == a && *y == b) {
            Some(entry) => entry.2 += w,
            None => edges.push((a, b, w)),
        }
        Self::new(self.n, edges, self.self_loops.clone())
    }

    /// Applies the graph modification described by `kind`.
    pub fn with_update(&self, kind: &UpdateKind) -> Result<Self> {
        match *kind {
            UpdateKind::SelfLoop { node, weight } => self.with_self_loop(node, weight),
            UpdateKind::EdgeDelta { i, j, weight } => self.with_edge_delta(i, j, weight),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for &(i, j, w) in &self.edges {
            writeln!(f, "e {} {} {}", i + 1, j + 1, w)?;
        }
        for &(i, w) in &self.self_loops {
            writeln!(f, "s {} {}", i + 1, w)?;
        }
        Ok(())
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    /// Parses the line format: first `n`, then `e i j w` and `s i w` lines
    /// with one-based vertices. Blank lines and `#` comments are skipped.
    fn from_str(text: &str) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut n = None;
        let mut edges = Vec::new();
        let mut loops = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let Some(size) = n else {
                if fields.len() != 1 {
                    return Err(parse_err(line, "expected vertex count".into()));
                }
                n = Some(
                    fields[0]
                        .parse::<usize>()
                        .map_err(|e| parse_err(line, format!("bad vertex count: {e}")))?,
                );
                continue;
            };
            let vertex = |s: &str| -> Result<usize> {
                let v = s
                    .parse::<usize>()
                    .map_err(|e| parse_err(line, format!("bad vertex '{s}': {e}")))?;
                if v == 0 || v > size {
                    return Err(parse_err(line, format!("vertex {v} outside 1..={size}")));
                }
                Ok(v - 1)
            };
            let weight = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| parse_err(line, format!("bad weight '{s}': {e}")))
            };
            match fields.as_slice() {
                ["e", i, j, w] => edges.push((vertex(i)?, vertex(j)?, weight(w)?)),
                ["s", i, w] => loops.push((vertex(i)?, weight(w)?)),
                _ => return Err(parse_err(line, format!("unrecognized record '{content}'"))),
            }
        }
        let n = n.ok_or_else(|| parse_err(0, "empty graph description".into()))?;
        GraphSpec::new(n, edges, loops)
    }
}

/// Dense symmetric generalized Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedLaplacian {
    matrix: DenseMatrix,
}

impl GeneralizedLaplacian {
    /// Wraps a matrix after checking it is square and exactly symmetric.
    pub fn from_matrix(matrix: DenseMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                got: matrix.cols(),
            });
        }
        let n = matrix.rows();
        for i in 0..n {
            for j in i + 1..n {
                let diff = (matrix[(i, j)] - matrix[(j, i)]).abs();
                if diff != 0.0 {
                    return Err(Error::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(Self { matrix })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }
}

/// Graph modification expressed on vertices, independent of the graph size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateKind {
    SelfLoop { node: usize, weight: f64 },
    EdgeDelta { i: usize, j: usize, weight: f64 },
}

impl UpdateKind {
    pub fn self_loop(node: usize, weight: f64) -> Self {
        Self::SelfLoop { node, weight }
    }

    /// Normalizes so that `i < j`.
    pub fn edge(i: usize, j: usize, weight: f64) -> Self {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        Self::EdgeDelta { i, j, weight }
    }

    pub fn weight(&self) -> f64 {
        match *self {
            Self::SelfLoop { weight, .. } | Self::EdgeDelta { weight, .. } => weight,
        }
    }

    /// `ρ vvᵀ` for an `n`-vertex graph.
    pub fn to_update(&self, n: usize) -> Result<RankOneUpdate> {
        RankOneUpdate::from_kind(n, *self)
    }
}

impl fmt::Display for UpdateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::SelfLoop { node, weight } => write!(f, "selfloop:{}:{}", node + 1, weight),
            Self::EdgeDelta { i, j, weight } => write!(f, "edge:{}:{}:{}", i + 1, j + 1, weight),
        }
    }
}

impl FromStr for UpdateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidUpdate(format!("'{s}': {msg}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let vertex = |p: &str| -> Result<usize> {
            match p.parse::<usize>() {
                Ok(0) => Err(bad("vertices are one-based".into())),
                Ok(v) => Ok(v - 1),
                Err(e) => Err(bad(format!("bad vertex '{p}': {e}"))),
            }
        };
        let weight = |p: &str| p.parse::<f64>().map_err(|e| bad(format!("bad weight '{p}': {e}")));
        match parts.as_slice() {
            ["selfloop", i, w] => Ok(Self::self_loop(vertex(i)?, weight(w)?)),
            ["edge", i, j, w] => {
                let (i, j) = (vertex(i)?, vertex(j)?);
                if i == j {
                    return Err(bad("edge endpoints must differ".into()));
                }
                Ok(Self::edge(i, j, weight(w)?))
            }
            _ => Err(bad("expected selfloop:i:w or edge:i:j:w".into())),
        }
    }
}

/// `L ↦ L + ρ vvᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneUpdate {
    rho: f64,
    v: Vec<f64>,
    kind: Option<UpdateKind>,
}

impl RankOneUpdate {
    /// Arbitrary symmetric rank-one term. Requires `ρ ≠ 0` and `v ≠ 0`.
    pub fn new(rho: f64, v: Vec<f64>) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::InvalidSize(format!("update vector length {}", v.len())));
        }
        if !(rho.is_finite() && rho != 0.0) {
            return Err(Error::InvalidUpdate(format!("rho must be finite and nonzero, got {rho}")));
        }
        if v.iter().any(|x| !x.is_finite()) || v.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidUpdate("v must be finite and nonzero".into()));
        }
        Ok(Self { rho, v, kind: None })
    }

    pub fn from_kind(n: usize, kind: UpdateKind) -> Result<Self> {
        let mut v = vec![0.0; n];
        match kind {
            UpdateKind::SelfLoop { node, .. } => {
                if node >= n {
                    return Err(Error::IndexOutOfRange { index: node, n });
                }
                v[node] = 1.0;
            }
            UpdateKind::EdgeDelta { i, j, .. } => {
                for idx in [i, j] {
                    if idx >= n {
                        return Err(Error::IndexOutOfRange { index: idx, n });
                    }
                }
                if i == j {
                    return Err(Error::InvalidUpdate("edge endpoints must differ".into()));
                }
                v[i] = 1.0;
                v[j] = -1.0;
            }
        }
        let mut update = Self::new(kind.weight(), v)?;
        update.kind = Some(kind);
        Ok(update)
    }

    pub fn self_loop(n: usize, node: usize, weight: f64) -> Result<Self> {
        Self::from_kind(n, UpdateKind::self_loop(node, weight))
    }

    pub fn edge(n: usize, i: usize, j: usize, weight: f64) -> Result<Self> {
        Self::from_kind(n, UpdateKind::edge(i, j, weight))
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn kind(&self) -> Option<UpdateKind> {
        self.kind
    }

    /// Same direction with the opposite sign of `ρ`.
    pub fn negated(&self) -> Self {
        Self {
            rho: -self.rho,
            v: self.v.clone(),
            kind: self.kind.map(|k| match k {
                UpdateKind::SelfLoop { node, weight } => UpdateKind::SelfLoop { node, weight: -weight },
                UpdateKind::EdgeDelta { i, j, weight } => UpdateKind::EdgeDelta { i, j, weight: -weight },
            }),
        }
    }
}

/// Laplacian of the unit-weight path: tridiagonal with diagonal
/// `(1, 2, …, 2, 1)` and off-diagonals `−1`.
pub fn path_laplacian(n: usize) -> Result<GeneralizedLaplacian> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("path graph needs n >= 2, got {n}")));
    }
    build_laplacian(&GraphSpec::path(n)?)
}

/// `L = D − W + V`.
pub fn build_laplacian(g: &GraphSpec) -> Result<GeneralizedLaplacian> {
    let n = g.n();
    let mut m = DenseMatrix::zeros(n, n);
    for &(i, j, w) in g.edges() {
        m[(i, i)] += w;
        m[(j, j)] += w;
        m[(i, j)] -= w;
        m[(j, i)] -= w;
    }
    for &(i, w) in g.self_loops() {
        m[(i, i)] += w;
    }
    GeneralizedLaplacian::from_matrix(m)
}

/// `L + ρ vvᵀ`, symmetric by construction.
pub fn apply_rank_one(l: &GeneralizedLaplacian, u: &RankOneUpdate) -> Result<GeneralizedLaplacian> {
    check_len(l.n(), u.n())?;
    let mut m = l.matrix().clone();
    let v = u.v();
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        for (j, &vj) in v.iter().enumerate() {
            m[(i, j)] += u.rho() * (vi * vj);
        }
    }
    GeneralizedLaplacian::from_matrix(m)
}

/// One term `w · vvᵀ` of the edge-wise Laplacian decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct BabyLaplacian {
    pub weight: f64,
    pub vector: Vec<f64>,
}

/// Splits `L` into one rank-one term per edge (`eᵢ − eⱼ`) and per self-loop
/// (`eᵢ`).
pub fn baby_decomposition(g: &GraphSpec) -> Vec<BabyLaplacian> {
    let n = g.n();
    let mut terms = Vec::with_capacity(g.edges().len() + g.self_loops().len());
    for &(i, j, w) in g.edges() {
        let mut vector = vec![0.0; n];
        vector[i] = 1.0;
        vector[j] = -1.0;
        terms.push(BabyLaplacian { weight: w, vector });
    }
    for &(i, w) in g.self_loops() {
        let mut vector = vec![0.0; n];
        vector[i] = 1.0;
        terms.push(BabyLaplacian { weight: w, vector });
    }
    terms
}

/// `sᵀ L s`
pub fn quadratic_form(l: &GeneralizedLaplacian, s: &[f64]) -> Result<f64> {
    let ls = l.matrix().mul_vec(s)?;
    Ok(crate::linalg::dot(s, &ls))
}

/// `sᵀ L s` for the unit path without forming `L`: `Σ (s_{j+1} − s_j)²`.
pub fn path_quadratic_form(s: &[f64]) -> f64 {
    s.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum()
}
