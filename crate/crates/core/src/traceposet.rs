//! The poset of all edge paths ordered by two-sided extension.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::poset::{HasseOrder, Poset};
use crate::precubical::PrecubicalSet;
use crate::tracespace::EdgePath;

pub const DEFAULT_CAP: usize = 20_000;

/// `Some((u, v))` with `g = u.f.v` when `f <= g`.
///
/// Paths visit each vertex at most once, so the position of `f` inside
/// `g` and hence the witness are unique.
pub fn leq(f: &EdgePath, g: &EdgePath) -> Option<(EdgePath, EdgePath)> {
    let i = g.vertices.iter().position(|&v| v == f.start())?;
    let j = i + f.len();
    if j >= g.vertices.len() || g.edges[i..j] != f.edges[..] {
        return None;
    }
    Some((g.slice(0, i), g.slice(j, g.len())))
}

#[derive(Clone, Debug)]
pub struct TracePoset {
    /// Sorted by length, then start vertex, then edges.
    pub elements: Vec<EdgePath>,
    index: HashMap<EdgePath, usize>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

/// Every edge path of `x`, failing once more than `cap` are found.
pub fn build_trace_poset(x: &PrecubicalSet, cap: usize) -> Result<TracePoset> {
    let mut elements: Vec<EdgePath> = (0..x.count(0)).map(EdgePath::constant).collect();
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            for &e in x.out_edges(p.end()) {
                let mut q = p.clone();
                q.edges.push(e);
                q.vertices.push(x.dst(e));
                next.push(q);
            }
        }
        if elements.len() + next.len() > cap {
            return Err(Error::CapExceeded { what: "traces", count: elements.len() + next.len(), cap });
        }
        elements.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(TracePoset::from_elements(elements))
}

impl TracePoset {
    /// Sub-poset on a set of paths closed under the order between its
    /// members; covers are one-edge extensions inside the set.
    pub fn from_elements(mut elements: Vec<EdgePath>) -> Self {
        elements.sort_by(|a, b| (a.len(), a.start(), &a.edges).cmp(&(b.len(), b.start(), &b.edges)));
        elements.dedup();
        let index: HashMap<EdgePath, usize> = elements.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let n = elements.len();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for (j, g) in elements.iter().enumerate() {
            if g.is_constant() {
                continue;
            }
            let mut lower = vec![g.slice(1, g.len()), g.slice(0, g.len() - 1)];
            lower.dedup();
            for f in lower {
                if let Some(&i) = index.get(&f) {
                    up[i].push(j);
                    down[j].push(i);
                }
            }
        }
        for l in up.iter_mut().chain(down.iter_mut()) {
            l.sort();
        }
        TracePoset { elements, index, up, down }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, p: &EdgePath) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Paths extending `alpha`.
    pub fn upset(&self, alpha: &EdgePath) -> Vec<EdgePath> {
        self.elements.iter().filter(|g| leq(alpha, g).is_some()).cloned().collect()
    }

    /// Number of covering pairs.
    pub fn cover_count(&self) -> usize {
        self.up.iter().map(Vec::len).sum()
    }

    /// Dense copy, labelled by vertex sequences.
    pub fn to_poset(&self, x: &PrecubicalSet) -> Poset {
        let labels = self.elements.iter().map(|p| p.label(x)).collect();
        let rel: Vec<(usize, usize)> =
            self.up.iter().enumerate().flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b))).collect();
        Poset::from_relations(labels, &rel).expect("trace order is antisymmetric")
    }

    /// Hasse diagram as text, one covering pair per line.
    pub fn hasse_text(&self, x: &PrecubicalSet) -> String {
        let mut out = String::new();
        for (a, bs) in self.up.iter().enumerate() {
            for &b in bs {
                out.push_str(&format!("{} < {}\n", self.elements[a].label(x), self.elements[b].label(x)));
            }
        }
        out
    }
}

impl HasseOrder for TracePoset {
    fn size(&self) -> usize {
        self.len()
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        leq(&self.elements[a], &self.elements[b]).is_some()
    }

    fn covers_up(&self, a: usize) -> &[usize] {
        &self.up[a]
    }

    fn covers_down(&self, a: usize) -> &[usize] {
        &self.down[a]
    }
}

/// `{p : alpha <= p <= f}`, as paths.
pub fn interval(alpha: &EdgePath, f: &EdgePath) -> Result<Vec<EdgePath>> {
    let Some((u, _)) = leq(alpha, f) else {
        return Err(Error::Precondition("the anchor is not below the trace".into()));
    };
    let (i, j) = (u.len(), u.len() + alpha.len());
    let mut out = Vec::new();
    for a in 0..=i {
        for b in j..=f.len() {
            out.push(f.slice(a, b));
        }
    }
    Ok(out)
}

/// The chain from the constant trace at the start of `f` up to `f`,
/// one edge at a time.
pub fn start_anchored_chain(f: &EdgePath) -> Vec<EdgePath> {
    (0..=f.len()).map(|k| f.slice(0, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poset::maximal_chains;
    use crate::tracespace::enumerate_dipaths;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Whether `f`'s edge list occurs contiguously in `g` at a vertex of `g`.
    fn contains_oracle(f: &EdgePath, g: &EdgePath) -> bool {
        (0..g.vertices.len()).any(|i| {
            g.vertices[i] == f.start() && i + f.len() < g.vertices.len() && g.edges[i..i + f.len()] == f.edges[..]
        })
    }

    #[test]
    fn matchbox_extremes() {
        let x = fixtures::matchbox();
        let p = build_trace_poset(&x, DEFAULT_CAP).unwrap();
        let minimal: Vec<&EdgePath> = p.minimal().into_iter().map(|i| &p.elements[i]).collect();
        assert_eq!(minimal.len(), 8);
        assert!(minimal.iter().all(|f| f.is_constant()));
        let o = x.vertex("O").unwrap();
        let top = x.vertex("P").unwrap();
        let mut maximal: Vec<EdgePath> = p.maximal().into_iter().map(|i| p.elements[i].clone()).collect();
        maximal.sort();
        assert_eq!(maximal, enumerate_dipaths(&x, o, top));
    }

    #[test]
    fn witness_of_prefix() {
        let x = fixtures::matchbox();
        let alpha = EdgePath::parse(&x, "O>X>XY>P").unwrap();
        let a1 = EdgePath::parse(&x, "O>X").unwrap();
        let (u, v) = leq(&a1, &alpha).unwrap();
        assert!(u.is_constant());
        assert_eq!(v.label(&x), "X>XY>P");
        assert_eq!(leq(&alpha, &alpha).map(|(u, v)| (u.len(), v.len())), Some((0, 0)));
        let beta = EdgePath::parse(&x, "O>X>XZ>P").unwrap();
        assert!(leq(&alpha, &beta).is_none() && leq(&beta, &alpha).is_none());
    }

    #[test]
    fn order_matches_containment_on_small_grid() {
        let x = fixtures::load("grid-2x2").unwrap().unwrap();
        let p = build_trace_poset(&x, DEFAULT_CAP).unwrap();
        let n = p.len();
        let mut relations = 0;
        for a in 0..n {
            for b in 0..n {
                let (f, g) = (&p.elements[a], &p.elements[b]);
                let r = leq(f, g);
                assert_eq!(r.is_some(), contains_oracle(f, g));
                if let Some((u, v)) = r {
                    relations += 1;
                    assert_eq!(&u.concat(f).unwrap().concat(&v).unwrap(), g);
                }
            }
        }
        // 9 vertices, 12 edges, paths of length 2..=4 on the grid digraph
        assert_eq!(n, 9 + 12 + 14 + 12 + 6);
        assert!(relations > n);
        // antisymmetry and transitivity through the dense copy
        let dense = p.to_poset(&x);
        assert_eq!(dense.relations().len() + n, relations);
    }

    #[test]
    fn intervals() {
        let x = fixtures::matchbox();
        let alpha = EdgePath::parse(&x, "O>X>XY>P").unwrap();
        let start = EdgePath::constant(x.vertex("O").unwrap());
        let chain = interval(&start, &alpha).unwrap();
        assert_eq!(chain.len(), 4);
        assert_eq!(chain, start_anchored_chain(&alpha));
        assert_eq!(interval(&alpha, &alpha).unwrap(), vec![alpha.clone()]);
        // anchor at X: legs of length 1 and 2
        let mid = EdgePath::constant(x.vertex("X").unwrap());
        assert_eq!(interval(&mid, &alpha).unwrap().len(), 2 * 3);
        assert!(interval(&alpha, &start).is_err());
    }

    #[test]
    fn anchored_maximal_chains() {
        let x = fixtures::matchbox();
        let p = build_trace_poset(&x, DEFAULT_CAP).unwrap();
        let o = p.index_of(&EdgePath::constant(x.vertex("O").unwrap())).unwrap();
        let chains = maximal_chains(&p, Some(o), 1000).unwrap();
        assert_eq!(chains.len(), 6);
        assert!(chains.iter().all(|c| c.len() == 4));
        // interior anchor: lattice paths in the leg-length grid per maximal trace
        let xv = p.index_of(&EdgePath::constant(x.vertex("X").unwrap())).unwrap();
        let through = maximal_chains(&p, Some(xv), 1000).unwrap();
        let mut expected = 0;
        for m in p.maximal() {
            let t = &p.elements[m];
            if let Some(i) = t.vertices.iter().position(|&v| v == x.vertex("X").unwrap()) {
                expected += binomial(t.len(), i);
            }
        }
        assert_eq!(through.len(), expected);
        for c in &through {
            assert!(p.elements[c[0]].is_constant());
            assert!(p.covers_up(*c.last().unwrap()).is_empty());
        }
    }

    #[test]
    fn single_vertex_and_cap() {
        let x = fixtures::load("unit-square").unwrap().unwrap();
        assert!(matches!(build_trace_poset(&x, 5), Err(Error::CapExceeded { what: "traces", .. })));
        let p = build_trace_poset(&crate::precubical::parse_precubical("vertices: a\n").unwrap(), 10).unwrap();
        assert_eq!(p.len(), 1);
    }
}
