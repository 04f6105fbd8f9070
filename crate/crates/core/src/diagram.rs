//! Finite poset-indexed diagrams of vector spaces given on covering pairs.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub from: usize,
    pub to: usize,
    /// `dims[to] x dims[from]`.
    pub matrix: Matrix,
}

/// Nodes with a dimension each and one matrix per covering pair. The
/// covering pairs must form a Hasse diagram (acyclic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectDiagram {
    pub field: Field,
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub covers: Vec<Cover>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl VectDiagram {
    pub fn new(field: Field, labels: Vec<String>, dims: Vec<usize>, mut covers: Vec<Cover>) -> Result<Self> {
        let n = labels.len();
        if dims.len() != n {
            return Err(Error::ShapeMismatch(format!("{} dimensions for {n} nodes", dims.len())));
        }
        covers.sort_by_key(|c| (c.from, c.to));
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for (k, c) in covers.iter_mut().enumerate() {
            if c.from >= n || c.to >= n || c.from == c.to {
                return Err(Error::Precondition(format!("cover ({}, {}) is not between two nodes", c.from, c.to)));
            }
            if c.matrix.shape() != (dims[c.to], dims[c.from]) {
                return Err(Error::ShapeMismatch(format!(
                    "cover {} -> {} has shape {:?}",
                    labels[c.from],
                    labels[c.to],
                    c.matrix.shape()
                )));
            }
            c.matrix = std::mem::replace(&mut c.matrix, Matrix::zeros(0, 0)).normalized(field);
            up[c.from].push(k);
            down[c.to].push(k);
        }
        let mut indeg: Vec<usize> = down.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&a| indeg[a] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(a) = queue.pop_front() {
            topo.push(a);
            for &k in &up[a] {
                let b = covers[k].to;
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    queue.push_back(b);
                }
            }
        }
        if topo.len() != n {
            return Err(Error::Precondition("covering pairs contain a cycle".into()));
        }
        Ok(VectDiagram { field, labels, dims, covers, up, down, topo })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Indices into `covers` leaving `a`.
    pub fn out_covers(&self, a: usize) -> &[usize] {
        &self.up[a]
    }

    /// Indices into `covers` entering `a`.
    pub fn in_covers(&self, a: usize) -> &[usize] {
        &self.down[a]
    }

    pub fn node(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Composite from `a` to every node above it (including `a` itself),
    /// taken along the first covering path in topological order.
    pub fn maps_from(&self, a: usize) -> BTreeMap<usize, Matrix> {
        self.sweep(a, false).expect("no checking")
    }

    /// `F(a <= b)`, or `None` when `a` is not below `b`.
    pub fn map_between(&self, a: usize, b: usize) -> Option<Matrix> {
        self.maps_from(a).remove(&b)
    }

    fn sweep(&self, a: usize, check: bool) -> Result<BTreeMap<usize, Matrix>> {
        let mut out: BTreeMap<usize, Matrix> = BTreeMap::new();
        out.insert(a, Matrix::identity(self.dims[a]));
        for &b in &self.topo {
            let Some(m) = out.get(&b).cloned() else { continue };
            for &k in &self.up[b] {
                let c = &self.covers[k];
                let composite = c.matrix.mul(&m, self.field)?;
                match out.get(&c.to) {
                    Some(prev) if check && *prev != composite => {
                        return Err(Error::Incoherent(format!(
                            "two covering paths from {} to {} give different maps",
                            self.labels[a], self.labels[c.to]
                        )))
                    }
                    Some(_) => {}
                    None => {
                        out.insert(c.to, composite);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Every pair of covering paths with common ends gives the same map.
    pub fn check_commutative(&self) -> Result<()> {
        for a in 0..self.len() {
            self.sweep(a, true)?;
        }
        Ok(())
    }

    /// Induced sub-diagram on `keep` (listed order); covers are the covering
    /// pairs of the induced order, with composite matrices.
    pub fn restrict(&self, keep: &[usize]) -> Result<VectDiagram> {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let reach: Vec<BTreeMap<usize, Matrix>> = keep.iter().map(|&a| self.maps_from(a)).collect();
        let mut covers = Vec::new();
        for (i, &a) in keep.iter().enumerate() {
            for (&b, m) in &reach[i] {
                let Some(&j) = pos.get(&b) else { continue };
                if a == b {
                    continue;
                }
                // b covers a inside keep unless some kept c sits strictly between
                let between = keep
                    .iter()
                    .enumerate()
                    .any(|(k, &c)| c != a && c != b && reach[i].contains_key(&c) && reach[k].contains_key(&b));
                if !between {
                    covers.push(Cover { from: i, to: j, matrix: m.clone() });
                }
            }
        }
        let labels = keep.iter().map(|&a| self.labels[a].clone()).collect();
        let dims = keep.iter().map(|&a| self.dims[a]).collect();
        VectDiagram::new(self.field, labels, dims, covers)
    }

    /// Plain-text export: nodes with dimensions, then covers with matrices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "field: {}", self.field);
        out.push_str("nodes:\n");
        for (l, d) in self.labels.iter().zip(&self.dims) {
            let _ = writeln!(out, "  {l}: {d}");
        }
        out.push_str("covers:\n");
        for c in &self.covers {
            let _ = writeln!(out, "  {} -> {}: {}", self.labels[c.from], self.labels[c.to], c.matrix);
        }
        out
    }

    pub fn parse(text: &str) -> Result<VectDiagram> {
        let err = |line: usize, m: &str| Error::Syntax { line: line + 1, column: 1, message: m.to_string() };
        let mut field = Field::Rational;
        let (mut labels, mut dims, mut covers) = (Vec::new(), Vec::new(), Vec::new());
        let mut section = "";
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if !raw.starts_with(' ') {
                let (key, rest) = line.split_once(':').ok_or_else(|| err(k, "expected `key:`"))?;
                match key {
                    "field" => {
                        let r = rest.trim();
                        field = match r {
                            "Q" => Field::Rational,
                            _ => {
                                let p = r
                                    .strip_prefix("GF(")
                                    .and_then(|s| s.strip_suffix(')'))
                                    .and_then(|s| s.parse::<u64>().ok())
                                    .ok_or_else(|| err(k, "unknown field"))?;
                                Field::from_characteristic(p)?
                            }
                        }
                    }
                    "nodes" | "covers" => section = if key == "nodes" { "nodes" } else { "covers" },
                    _ => return Err(err(k, &format!("unknown key `{key}`"))),
                }
                continue;
            }
            match section {
                "nodes" => {
                    let (l, d) = line.rsplit_once(':').ok_or_else(|| err(k, "expected `label: dim`"))?;
                    labels.push(l.trim().to_string());
                    dims.push(d.trim().parse::<usize>().map_err(|_| err(k, "bad dimension"))?);
                }
                "covers" => {
                    let (pair, m) = line.split_once(": [").ok_or_else(|| err(k, "expected `a -> b: [..]`"))?;
                    let (a, b) = pair.split_once(" -> ").ok_or_else(|| err(k, "expected `a -> b`"))?;
                    let find = |l: &str| {
                        labels.iter().position(|x: &String| x == l.trim()).ok_or_else(|| err(k, "unknown node"))
                    };
                    let (a, b) = (find(a)?, find(b)?);
                    let matrix = Matrix::parse(&format!("[{m}"), dims[b], dims[a])?;
                    covers.push(Cover { from: a, to: b, matrix });
                }
                _ => return Err(err(k, "entry outside a section")),
            }
        }
        VectDiagram::new(field, labels, dims, covers)
    }
}

/// Outcome of an isomorphism search between two diagrams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoSearch {
    /// One invertible matrix per node of the first diagram.
    Isomorphic(Vec<Matrix>),
    /// The first distinguishing node or arrow.
    Differs(String),
}

/// Deterministic small coefficients for combining kernel vectors.
fn trial_coefficients(trial: u64, count: usize, field: Field) -> Vec<crate::field::Q> {
    let mut state = trial.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    (0..count)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            field.from_int((state % 7) as i64 - 3)
        })
        .collect()
}

impl VectDiagram {
    /// Looks for node-wise isomorphisms `eta_a: F(a) -> G(node_map[a])`
    /// commuting with every cover of `self`. Solves the linear commutation
    /// constraints, then tries the identity and a few combinations of the
    /// solution space for invertibility.
    pub fn isomorphism_to(&self, other: &VectDiagram, node_map: &[usize]) -> Result<IsoSearch> {
        let f = self.field;
        if node_map.len() != self.len() {
            return Err(Error::ShapeMismatch("node map must cover every node".into()));
        }
        if self.len() != other.len() {
            return Ok(IsoSearch::Differs(format!("{} nodes against {}", self.len(), other.len())));
        }
        for (a, &b) in node_map.iter().enumerate() {
            if self.dims[a] != other.dims[b] {
                return Ok(IsoSearch::Differs(format!(
                    "node {}: dimension {} against {}",
                    self.labels[a], self.dims[a], other.dims[b]
                )));
            }
        }
        let mut targets = vec![None; other.len()];
        for (a, &b) in node_map.iter().enumerate() {
            targets[b] = Some(a);
        }
        if targets.iter().any(Option::is_none) {
            return Ok(IsoSearch::Differs("node map is not a bijection".into()));
        }
        for c in &other.covers {
            let (a, b) = (targets[c.from].unwrap(), targets[c.to].unwrap());
            if !self.covers.iter().any(|d| d.from == a && d.to == b) {
                return Ok(IsoSearch::Differs(format!(
                    "arrow {} -> {} has no counterpart",
                    other.labels[c.from], other.labels[c.to]
                )));
            }
        }
        let mut offset = Vec::with_capacity(self.len());
        let mut unknowns = 0;
        for &d in &self.dims {
            offset.push(unknowns);
            unknowns += d * d;
        }
        let var = |a: usize, i: usize, j: usize| offset[a] + i * self.dims[a] + j;
        let mut rows: Vec<Vec<crate::field::Q>> = Vec::new();
        let mut gmaps = Vec::with_capacity(self.covers.len());
        for c in &self.covers {
            let Some(g) = other.map_between(node_map[c.from], node_map[c.to]) else {
                return Ok(IsoSearch::Differs(format!(
                    "arrow {} -> {} has no counterpart",
                    self.labels[c.from], self.labels[c.to]
                )));
            };
            let (da, db) = (self.dims[c.from], self.dims[c.to]);
            // eta_b * F - G * eta_a = 0, entry (i, j)
            for i in 0..db {
                for j in 0..da {
                    let mut row = vec![f.zero(); unknowns];
                    for k in 0..db {
                        row[var(c.to, i, k)] = f.add(&row[var(c.to, i, k)], &c.matrix[(k, j)]);
                    }
                    for k in 0..da {
                        row[var(c.from, k, j)] = f.sub(&row[var(c.from, k, j)], &g[(i, k)]);
                    }
                    rows.push(row);
                }
            }
            gmaps.push(g);
        }
        let unpack = |v: &[crate::field::Q]| -> Vec<Matrix> {
            (0..self.len())
                .map(|a| {
                    let d = self.dims[a];
                    let mut m = Matrix::zeros(d, d);
                    for i in 0..d {
                        for j in 0..d {
                            m[(i, j)] = v[var(a, i, j)].clone();
                        }
                    }
                    m
                })
                .collect()
        };
        let commutes = |eta: &[Matrix]| {
            self.covers
                .iter()
                .zip(&gmaps)
                .all(|(c, g)| eta[c.to].mul(&c.matrix, f).unwrap() == g.mul(&eta[c.from], f).unwrap())
        };
        let invertible = |eta: &[Matrix]| eta.iter().all(|m| m.is_invertible(f));
        let identity: Vec<Matrix> = self.dims.iter().map(|&d| Matrix::identity(d)).collect();
        if commutes(&identity) {
            return Ok(IsoSearch::Isomorphic(identity));
        }
        let kernel = if rows.is_empty() {
            (0..unknowns).map(|k| (0..unknowns).map(|j| if j == k { f.one() } else { f.zero() }).collect()).collect()
        } else {
            let m = Matrix::from_rows(rows.len(), unknowns, rows)?;
            m.kernel(f)
        };
        if kernel.is_empty() {
            return Ok(IsoSearch::Differs("only the zero map commutes with every arrow".into()));
        }
        const TRIALS: u64 = 64;
        for trial in 0..TRIALS {
            let coeffs = trial_coefficients(trial, kernel.len(), f);
            let mut v = vec![f.zero(); unknowns];
            for (c, k) in coeffs.iter().zip(&kernel) {
                for (x, y) in v.iter_mut().zip(k) {
                    *x = f.add(x, &f.mul(c, y));
                }
            }
            let eta = unpack(&v);
            if invertible(&eta) {
                debug_assert!(commutes(&eta));
                return Ok(IsoSearch::Isomorphic(eta));
            }
        }
        Ok(IsoSearch::Differs(format!(
            "no invertible commuting map among {TRIALS} samples of a {}-dimensional solution space",
            kernel.len()
        )))
    }
}
