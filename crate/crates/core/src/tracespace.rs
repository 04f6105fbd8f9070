//! Directed edge paths and the swap complex of paths between two vertices.
//!
//! The swap complex has one vertex per edge path, one edge per elementary
//! rewrite across a square (lower corner to upper corner) and one 2-cell
//! per pair of independent rewrites on the same path.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::precubical::PrecubicalSet;

/// A directed edge path; a constant path has one vertex and no edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePath {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl EdgePath {
    pub fn constant(v: usize) -> Self {
        EdgePath { vertices: vec![v], edges: Vec::new() }
    }

    pub fn from_edges(x: &PrecubicalSet, start: usize, edges: &[usize]) -> Result<Self> {
        let mut vertices = vec![start];
        for &e in edges {
            let here = *vertices.last().unwrap();
            if x.src(e) != here {
                return Err(Error::Composability(format!(
                    "edge `{}` does not start at `{}`",
                    x.name(1, e),
                    x.name(0, here)
                )));
            }
            vertices.push(x.dst(e));
        }
        Ok(EdgePath { vertices, edges: edges.to_vec() })
    }

    /// Reads `a>b>c` (vertex sequence), a single vertex, or edge names
    /// separated by commas or spaces.
    pub fn parse(x: &PrecubicalSet, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.contains('>') || x.find(0, text).is_some() {
            let vs: Vec<usize> = text.split('>').map(|v| x.vertex(v.trim())).collect::<Result<_>>()?;
            let mut edges = Vec::new();
            for w in vs.windows(2) {
                let cands: Vec<usize> = x.out_edges(w[0]).iter().copied().filter(|&e| x.dst(e) == w[1]).collect();
                match cands.as_slice() {
                    [e] => edges.push(*e),
                    [] => {
                        return Err(Error::Composability(format!(
                            "no edge from `{}` to `{}`",
                            x.name(0, w[0]),
                            x.name(0, w[1])
                        )))
                    }
                    _ => {
                        return Err(Error::Composability(format!(
                            "several edges from `{}` to `{}`; name the edges instead",
                            x.name(0, w[0]),
                            x.name(0, w[1])
                        )))
                    }
                }
            }
            return Self::from_edges(x, vs[0], &edges);
        }
        let edges: Vec<usize> = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|e| x.edge(e))
            .collect::<Result<_>>()?;
        if edges.is_empty() {
            return Err(Error::UnknownCell(text.to_string()));
        }
        Self::from_edges(x, x.src(edges[0]), &edges)
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    /// True for a constant path.
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn concat(&self, other: &EdgePath) -> Result<EdgePath> {
        if self.end() != other.start() {
            return Err(Error::Composability(format!(
                "path ends at vertex {} but the next starts at {}",
                self.end(),
                other.start()
            )));
        }
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(EdgePath { vertices, edges })
    }

    /// The subpath spanning edges `from..to`.
    pub fn slice(&self, from: usize, to: usize) -> EdgePath {
        EdgePath { vertices: self.vertices[from..=to].to_vec(), edges: self.edges[from..to].to_vec() }
    }

    pub fn label(&self, x: &PrecubicalSet) -> String {
        let names: Vec<&str> = self.vertices.iter().map(|&v| x.name(0, v)).collect();
        names.join(">")
    }

    pub fn display<'a>(&'a self, x: &'a PrecubicalSet) -> impl fmt::Display + 'a {
        struct D<'a>(&'a EdgePath, &'a PrecubicalSet);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.label(self.1))
            }
        }
        D(self, x)
    }
}

/// All directed edge paths from `a` to `b`, lexicographic in edge indices.
pub fn enumerate_dipaths(x: &PrecubicalSet, a: usize, b: usize) -> Vec<EdgePath> {
    enumerate_dipaths_capped(x, a, b, usize::MAX).expect("no cap")
}

pub fn enumerate_dipaths_capped(x: &PrecubicalSet, a: usize, b: usize, cap: usize) -> Result<Vec<EdgePath>> {
    let useful = x.reaching(b);
    let mut out = Vec::new();
    if !useful[a] {
        return Ok(out);
    }
    let mut path = EdgePath::constant(a);
    let mut stack: Vec<usize> = vec![0];
    loop {
        let v = path.end();
        if stack.len() == path.vertices.len() && *stack.last().unwrap() == 0 && v == b {
            out.push(path.clone());
            if out.len() > cap {
                return Err(Error::CapExceeded { what: "edge paths", count: out.len(), cap });
            }
        }
        let k = stack.last_mut().unwrap();
        let outs = x.out_edges(v);
        while *k < outs.len() && !useful[x.dst(outs[*k])] {
            *k += 1;
        }
        if *k < outs.len() {
            let e = outs[*k];
            *k += 1;
            path.edges.push(e);
            path.vertices.push(x.dst(e));
            stack.push(0);
        } else {
            stack.pop();
            if stack.is_empty() {
                break;
            }
            path.edges.pop();
            path.vertices.pop();
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Swap {
    pub path: usize,
    pub position: usize,
    pub square: usize,
    pub target: usize,
}

/// Two independent swaps out of one path. The four swaps bound the
/// 2-cell as `bottom + right - top - left`, where bottom and left leave
/// the base path and right and top enter the doubly swapped path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SwapSquare {
    pub bottom: usize,
    pub right: usize,
    pub top: usize,
    pub left: usize,
}

#[derive(Clone, Debug)]
pub struct TraceComplex {
    pub start: usize,
    pub end: usize,
    pub paths: Vec<EdgePath>,
    pub swaps: Vec<Swap>,
    pub squares2: Vec<SwapSquare>,
    path_index: HashMap<Vec<usize>, usize>,
    swap_index: HashMap<(usize, usize, usize), usize>,
    square_index: HashMap<(usize, usize, usize), usize>,
}

impl TraceComplex {
    pub fn path_index(&self, p: &EdgePath) -> Option<usize> {
        if p.start() != self.start || p.end() != self.end {
            return None;
        }
        self.path_index.get(&p.edges).copied()
    }

    pub fn swap_at(&self, path: usize, position: usize, square: usize) -> Option<usize> {
        self.swap_index.get(&(path, position, square)).copied()
    }

    /// Looks a 2-cell up by its two leaving swaps.
    pub fn square_at(&self, bottom: usize, left: usize) -> Option<usize> {
        let s = &self.swaps[bottom];
        let key = (s.path, bottom, left);
        self.square_index.get(&key).copied()
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.paths.len());
        for s in &self.swaps {
            uf.union(s.path, s.target);
        }
        uf.classes()
    }

    /// Component index of every path, components numbered by least member.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![0; self.paths.len()];
        for (c, members) in self.components().iter().enumerate() {
            for &m in members {
                label[m] = c;
            }
        }
        label
    }
}

fn apply_swap(x: &PrecubicalSet, p: &EdgePath, position: usize, square: usize) -> EdgePath {
    let (l, t) = x.upper_corner(square);
    let mut q = p.clone();
    q.edges[position] = l;
    q.edges[position + 1] = t;
    q.vertices[position + 1] = x.dst(l);
    q
}

pub fn trace_complex(x: &PrecubicalSet, a: usize, b: usize) -> TraceComplex {
    trace_complex_capped(x, a, b, usize::MAX).expect("no cap")
}

pub fn trace_complex_capped(x: &PrecubicalSet, a: usize, b: usize, cap: usize) -> Result<TraceComplex> {
    let paths = enumerate_dipaths_capped(x, a, b, cap)?;
    let path_index: HashMap<Vec<usize>, usize> = paths.iter().enumerate().map(|(i, p)| (p.edges.clone(), i)).collect();
    let mut swaps = Vec::new();
    let mut swap_index = HashMap::new();
    let mut by_path = vec![Vec::new(); paths.len()];
    for (i, p) in paths.iter().enumerate() {
        for k in 0..p.len().saturating_sub(1) {
            for &s in x.squares_at_corner(p.edges[k], p.edges[k + 1]) {
                let q = apply_swap(x, p, k, s);
                let target = path_index[&q.edges];
                swap_index.insert((i, k, s), swaps.len());
                by_path[i].push(swaps.len());
                swaps.push(Swap { path: i, position: k, square: s, target });
            }
        }
    }
    let mut squares2 = Vec::new();
    let mut square_index = HashMap::new();
    for (i, here) in by_path.iter().enumerate() {
        for &s1 in here {
            for &s2 in here {
                let (w1, w2) = (swaps[s1], swaps[s2]);
                if w2.position < w1.position + 2 {
                    continue;
                }
                let pk = w1.target;
                let pl = w2.target;
                let right = swap_index[&(pk, w2.position, w2.square)];
                let top = swap_index[&(pl, w1.position, w1.square)];
                debug_assert_eq!(swaps[right].target, swaps[top].target);
                square_index.insert((i, s1, s2), squares2.len());
                squares2.push(SwapSquare { bottom: s1, right, top, left: s2 });
            }
        }
    }
    Ok(TraceComplex { start: a, end: b, paths, swaps, squares2, path_index, swap_index, square_index })
}

/// A cell-to-cell map between swap complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularMap {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
}

impl CellularMap {
    pub fn identity(t: &TraceComplex) -> Self {
        CellularMap {
            vertices: (0..t.paths.len()).collect(),
            edges: (0..t.swaps.len()).collect(),
            faces: (0..t.squares2.len()).collect(),
        }
    }

    pub fn compose(&self, after: &CellularMap) -> CellularMap {
        CellularMap {
            vertices: self.vertices.iter().map(|&v| after.vertices[v]).collect(),
            edges: self.edges.iter().map(|&e| after.edges[e]).collect(),
            faces: self.faces.iter().map(|&f| after.faces[f]).collect(),
        }
    }

    /// Image component of each source component.
    pub fn on_components(&self, source: &TraceComplex, target: &TraceComplex) -> Vec<usize> {
        let labels = target.component_labels();
        source.components().iter().map(|c| labels[self.vertices[c[0]]]).collect()
    }
}

/// The map `p -> u.p.v` from the complex at `(a, b)` to the complex at
/// `(u.start, v.end)`.
pub fn extension_map(source: &TraceComplex, target: &TraceComplex, u: &EdgePath, v: &EdgePath) -> Result<CellularMap> {
    if u.end() != source.start || v.start() != source.end {
        return Err(Error::Composability("extension does not meet the endpoints of the trace".into()));
    }
    if u.start() != target.start || v.end() != target.end {
        return Err(Error::Composability("extension does not land in the target complex".into()));
    }
    let shift = u.len();
    let vertices: Vec<usize> = source
        .paths
        .iter()
        .map(|p| {
            let q = u.concat(p)?.concat(v)?;
            target.path_index(&q).ok_or_else(|| Error::Composability("extended path missing from target".into()))
        })
        .collect::<Result<_>>()?;
    let edges: Vec<usize> = source
        .swaps
        .iter()
        .map(|s| target.swap_at(vertices[s.path], s.position + shift, s.square).expect("swap survives extension"))
        .collect();
    let faces: Vec<usize> = source
        .squares2
        .iter()
        .map(|sq| target.square_at(edges[sq.bottom], edges[sq.left]).expect("2-cell survives extension"))
        .collect();
    Ok(CellularMap { vertices, edges, faces })
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins two classes; the smaller root wins so roots are least members.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Classes sorted by least member, members ascending.
    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = self.find(i);
            by_root[r].push(i);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }
}
