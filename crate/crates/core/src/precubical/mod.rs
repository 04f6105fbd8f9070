//! Finite loop-free precubical sets.
//!
//! A `d`-cell has `2d` faces, stored at index `2(i-1)+a` for axis `i` and
//! sign `a`. For a square the four faces are, in that order, the left,
//! right, bottom and top edges; the square is traversed from its lower
//! corner (bottom then right) to its upper corner (left then top).

mod grid;
mod text;

use std::collections::HashMap;
use std::fmt;

pub use grid::{grid_vertex_name, GridPospace};
pub use text::{parse_document, parse_precubical, Document};

use crate::error::{Error, Result};

pub const MAX_DIMENSION: usize = 3;

/// Named cells with faces given by name, as read from a file. No
/// invariant is assumed; [`validate`] reports on it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellInventory {
    /// `cells[d]` lists `(name, faces)`; vertices have no faces.
    pub cells: Vec<Vec<(String, Vec<String>)>>,
}

impl CellInventory {
    pub fn add(&mut self, dim: usize, name: impl Into<String>, faces: Vec<String>) {
        while self.cells.len() <= dim {
            self.cells.push(Vec::new());
        }
        self.cells[dim].push((name.into(), faces));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DimensionTooHigh { dim: usize },
    DuplicateName { name: String },
    FaceCount { cell: String, expected: usize, found: usize },
    DanglingFace { cell: String, face: String },
    WrongFaceDimension { cell: String, face: String, expected: usize },
    Identity { cell: String, i: usize, a: usize, j: usize, b: usize, lhs: String, rhs: String },
    Cycle { vertices: Vec<String> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionTooHigh { dim } => {
                write!(f, "dimension {dim} exceeds the supported maximum {MAX_DIMENSION}")
            }
            Violation::DuplicateName { name } => write!(f, "duplicate cell name `{name}`"),
            Violation::FaceCount { cell, expected, found } => {
                write!(f, "cell `{cell}` has {found} faces, expected {expected}")
            }
            Violation::DanglingFace { cell, face } => {
                write!(f, "cell `{cell}` refers to unknown face `{face}`")
            }
            Violation::WrongFaceDimension { cell, face, expected } => {
                write!(f, "face `{face}` of `{cell}` is not a {expected}-cell")
            }
            Violation::Identity { cell, i, a, j, b, lhs, rhs } => {
                write!(f, "cell `{cell}`: d_{i}^{a} d_{j}^{b} = `{lhs}` but d_{}^{b} d_{i}^{a} = `{rhs}`", j - 1)
            }
            Violation::Cycle { vertices } => {
                write!(f, "directed cycle {} -> {}", vertices.join(" -> "), vertices[0])
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks face references, precubical identities and loop-freeness.
pub fn validate(inv: &CellInventory) -> ValidationReport {
    let mut out = Vec::new();
    let top = inv.cells.len().saturating_sub(1);
    if inv.cells.len() > MAX_DIMENSION + 1 && inv.cells[MAX_DIMENSION + 1..].iter().any(|c| !c.is_empty()) {
        out.push(Violation::DimensionTooHigh { dim: top });
    }

    let mut dim_of: HashMap<&str, usize> = HashMap::new();
    for (d, cells) in inv.cells.iter().enumerate() {
        for (name, _) in cells {
            if dim_of.insert(name, d).is_some() {
                out.push(Violation::DuplicateName { name: name.clone() });
            }
        }
    }

    // resolved[d][c] is filled only when all faces of the cell resolve
    let mut ok = true;
    for (d, cells) in inv.cells.iter().enumerate() {
        for (name, faces) in cells {
            if faces.len() != 2 * d {
                out.push(Violation::FaceCount { cell: name.clone(), expected: 2 * d, found: faces.len() });
                ok = false;
                continue;
            }
            for face in faces {
                match dim_of.get(face.as_str()) {
                    None => {
                        out.push(Violation::DanglingFace { cell: name.clone(), face: face.clone() });
                        ok = false;
                    }
                    Some(&fd) if fd + 1 != d => {
                        out.push(Violation::WrongFaceDimension {
                            cell: name.clone(),
                            face: face.clone(),
                            expected: d - 1,
                        });
                        ok = false;
                    }
                    _ => {}
                }
            }
        }
    }
    if !ok {
        return ValidationReport { violations: out };
    }

    let faces_of: HashMap<&str, &Vec<String>> = inv.cells.iter().flatten().map(|(n, f)| (n.as_str(), f)).collect();
    let face = |c: &str, i: usize, a: usize| -> &str { &faces_of[c][2 * (i - 1) + a] };
    for (d, cells) in inv.cells.iter().enumerate().skip(2) {
        for (name, _) in cells {
            for j in 2..=d {
                for i in 1..j {
                    for a in 0..2 {
                        for b in 0..2 {
                            let lhs = face(face(name, j, b), i, a);
                            let rhs = face(face(name, i, a), j - 1, b);
                            if lhs != rhs {
                                out.push(Violation::Identity {
                                    cell: name.clone(),
                                    i,
                                    a,
                                    j,
                                    b,
                                    lhs: lhs.to_string(),
                                    rhs: rhs.to_string(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    if let Some(cycle) = find_cycle(inv) {
        out.push(Violation::Cycle { vertices: cycle });
    }
    ValidationReport { violations: out }
}

fn find_cycle(inv: &CellInventory) -> Option<Vec<String>> {
    let verts: Vec<&str> = inv.cells.first().map(|c| c.iter().map(|(n, _)| n.as_str()).collect()).unwrap_or_default();
    let idx: HashMap<&str, usize> = verts.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut succ = vec![Vec::new(); verts.len()];
    for (_, f) in inv.cells.get(1).into_iter().flatten() {
        succ[idx[f[0].as_str()]].push(idx[f[1].as_str()]);
    }
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; verts.len()];
    for root in 0..verts.len() {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(&mut (v, ref mut k)) = stack.last_mut() {
            if *k < succ[v].len() {
                let w = succ[v][*k];
                *k += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => {
                        let pos = stack.iter().position(|&(u, _)| u == w).unwrap();
                        return Some(stack[pos..].iter().map(|&(u, _)| verts[u].to_string()).collect());
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// A validated loop-free precubical set of dimension at most 3.
///
/// Cells are indexed per dimension in the order they were given; that
/// order fixes every basis computed downstream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecubicalSet {
    names: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<String, usize>>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    corners: HashMap<(usize, usize), Vec<usize>>,
}

impl PrecubicalSet {
    pub fn new(inv: &CellInventory) -> Result<Self> {
        let report = validate(inv);
        if !report.is_valid() {
            return Err(Error::Invalid(report));
        }
        let mut cells = inv.cells.clone();
        while cells.last().is_some_and(|c| c.is_empty()) {
            cells.pop();
        }
        if cells.is_empty() {
            cells.push(Vec::new());
        }
        let names: Vec<Vec<String>> = cells.iter().map(|c| c.iter().map(|(n, _)| n.clone()).collect()).collect();
        let index: Vec<HashMap<String, usize>> =
            names.iter().map(|ns| ns.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect()).collect();
        let faces: Vec<Vec<Vec<usize>>> = cells
            .iter()
            .enumerate()
            .map(|(d, cs)| cs.iter().map(|(_, fs)| fs.iter().map(|f| index[d - 1][f]).collect()).collect())
            .collect();
        let nv = names[0].len();
        let mut out_edges = vec![Vec::new(); nv];
        let mut in_edges = vec![Vec::new(); nv];
        if let Some(edges) = faces.get(1) {
            for (e, f) in edges.iter().enumerate() {
                out_edges[f[0]].push(e);
                in_edges[f[1]].push(e);
            }
        }
        let mut corners: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        if let Some(squares) = faces.get(2) {
            for (s, f) in squares.iter().enumerate() {
                corners.entry((f[2], f[1])).or_default().push(s);
            }
        }
        Ok(PrecubicalSet { names, faces, index, out_edges, in_edges, corners })
    }

    pub fn inventory(&self) -> CellInventory {
        let cells = self
            .names
            .iter()
            .enumerate()
            .map(|(d, ns)| {
                ns.iter()
                    .enumerate()
                    .map(|(c, n)| {
                        let fs = if d == 0 {
                            Vec::new()
                        } else {
                            self.faces[d][c].iter().map(|&f| self.names[d - 1][f].clone()).collect()
                        };
                        (n.clone(), fs)
                    })
                    .collect()
            })
            .collect();
        CellInventory { cells }
    }

    /// Re-runs every check; a constructed set always yields an empty report.
    pub fn validate(&self) -> ValidationReport {
        validate(&self.inventory())
    }

    /// Highest dimension carrying a cell (0 for the empty set).
    pub fn dimension(&self) -> usize {
        self.names.len() - 1
    }

    pub fn count(&self, dim: usize) -> usize {
        self.names.get(dim).map_or(0, Vec::len)
    }

    pub fn name(&self, dim: usize, cell: usize) -> &str {
        &self.names[dim][cell]
    }

    pub fn names(&self, dim: usize) -> &[String] {
        self.names.get(dim).map_or(&[], |v| v.as_slice())
    }

    pub fn find(&self, dim: usize, name: &str) -> Option<usize> {
        self.index.get(dim)?.get(name).copied()
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.find(0, name).ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge(&self, name: &str) -> Result<usize> {
        self.find(1, name).ok_or_else(|| Error::UnknownCell(name.to_string()))
    }

    /// Face `d_i^a` of a `dim`-cell, with `i` counted from 1.
    pub fn face(&self, dim: usize, cell: usize, i: usize, a: usize) -> usize {
        self.faces[dim][cell][2 * (i - 1) + a]
    }

    pub fn faces(&self, dim: usize, cell: usize) -> &[usize] {
        &self.faces[dim][cell]
    }

    pub fn src(&self, edge: usize) -> usize {
        self.faces[1][edge][0]
    }

    pub fn dst(&self, edge: usize) -> usize {
        self.faces[1][edge][1]
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Squares whose lower corner is `first` followed by `second`.
    pub fn squares_at_corner(&self, first: usize, second: usize) -> &[usize] {
        self.corners.get(&(first, second)).map_or(&[], |v| v.as_slice())
    }

    /// The upper corner `(left, top)` of a square.
    pub fn upper_corner(&self, square: usize) -> (usize, usize) {
        let f = &self.faces[2][square];
        (f[0], f[3])
    }

    pub fn lower_corner(&self, square: usize) -> (usize, usize) {
        let f = &self.faces[2][square];
        (f[2], f[1])
    }

    /// Vertices reachable from `v` by directed edge paths, `v` included.
    pub fn reachable_from(&self, v: usize) -> Vec<bool> {
        self.sweep(v, |x| self.out_edges[x].iter().map(|&e| self.dst(e)).collect())
    }

    /// Vertices from which `v` is reachable, `v` included.
    pub fn reaching(&self, v: usize) -> Vec<bool> {
        self.sweep(v, |x| self.in_edges[x].iter().map(|&e| self.src(e)).collect())
    }

    fn sweep(&self, v: usize, next: impl Fn(usize) -> Vec<usize>) -> Vec<bool> {
        let mut seen = vec![false; self.count(0)];
        seen[v] = true;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for y in next(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Vertices in a topological order (sources first, ties by index).
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.count(0);
        let mut indeg: Vec<usize> = (0..n).map(|v| self.in_edges[v].len()).collect();
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &e in &self.out_edges[v] {
                let w = self.dst(e);
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        order
    }

    /// Renames every cell through `f`, keeping the structure.
    pub fn relabeled(&self, f: impl Fn(usize, &str) -> String) -> Result<Self> {
        let mut inv = self.inventory();
        let rename: Vec<HashMap<String, String>> =
            self.names.iter().enumerate().map(|(d, ns)| ns.iter().map(|n| (n.clone(), f(d, n))).collect()).collect();
        for (d, cells) in inv.cells.iter_mut().enumerate() {
            for (n, fs) in cells.iter_mut() {
                *n = rename[d][n.as_str()].clone();
                for x in fs.iter_mut() {
                    *x = rename[d - 1][x.as_str()].clone();
                }
            }
        }
        Self::new(&inv)
    }

    pub fn to_text(&self) -> String {
        text::serialize(self)
    }
}
