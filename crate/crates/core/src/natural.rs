//! Natural homology diagrams over sub-posets of the trace poset, and
//! persistence along a single trace.

use std::collections::{BTreeMap, HashMap};

use crate::diagram::{Cover, VectDiagram};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::homology::{
    chain_complex_of_trace, chain_map_of_cellular, compute_basis, induced_map_unchecked, ChainComplex, HomologyBasis,
};
use crate::matrix::Matrix;
use crate::persistence::{FilteredComplex, PersistenceModule};
use crate::poset::HasseOrder;
use crate::precubical::PrecubicalSet;
use crate::traceposet::{self, build_trace_poset, TracePoset};
use crate::tracespace::{extension_map, trace_complex_capped, EdgePath, TraceComplex};

/// Which traces a diagram is built on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    Whole,
    /// Every trace extending the given one.
    Upset(EdgePath),
    /// Traces between the anchor and the trace.
    Interval(EdgePath, EdgePath),
}

struct Space {
    complex: TraceComplex,
    /// Component of every path, for degree 1.
    labels: Vec<usize>,
    /// Chain complex and `H_1` basis, for degree 2.
    higher: Option<(ChainComplex, HomologyBasis)>,
    dim: usize,
}

/// Trace complexes and homology bases, one per endpoint pair.
pub struct HomologyCache<'a> {
    pub x: &'a PrecubicalSet,
    pub field: Field,
    pub degree: usize,
    pub cap: usize,
    spaces: HashMap<(usize, usize), Space>,
}

impl<'a> HomologyCache<'a> {
    pub fn new(x: &'a PrecubicalSet, field: Field, degree: usize, cap: usize) -> Result<Self> {
        if !(1..=2).contains(&degree) {
            return Err(Error::Precondition(format!("degree {degree} is not supported (use 1 or 2)")));
        }
        Ok(HomologyCache { x, field, degree, cap, spaces: HashMap::new() })
    }

    fn ensure(&mut self, a: usize, b: usize) -> Result<()> {
        if self.spaces.contains_key(&(a, b)) {
            return Ok(());
        }
        let complex = trace_complex_capped(self.x, a, b, self.cap)?;
        let labels = complex.component_labels();
        let (higher, dim) = if self.degree == 1 {
            (None, labels.iter().max().map_or(0, |m| m + 1))
        } else {
            let c = chain_complex_of_trace(&complex, self.field);
            let basis = compute_basis(&c, 1);
            let dim = basis.rank();
            (Some((c, basis)), dim)
        };
        self.spaces.insert((a, b), Space { complex, labels, higher, dim });
        Ok(())
    }

    /// Dimension of `H_{n-1}` of the trace space between `a` and `b`.
    pub fn dim(&mut self, a: usize, b: usize) -> Result<usize> {
        self.ensure(a, b)?;
        Ok(self.spaces[&(a, b)].dim)
    }

    pub fn complex(&mut self, a: usize, b: usize) -> Result<&TraceComplex> {
        self.ensure(a, b)?;
        Ok(&self.spaces[&(a, b)].complex)
    }

    /// Matrix induced by the unique extension of `f` to `g`.
    pub fn map(&mut self, f: &EdgePath, g: &EdgePath) -> Result<Matrix> {
        let (u, v) =
            traceposet::leq(f, g).ok_or_else(|| Error::Precondition("the traces are not comparable".into()))?;
        let (s, t) = ((f.start(), f.end()), (g.start(), g.end()));
        self.ensure(s.0, s.1)?;
        self.ensure(t.0, t.1)?;
        let (src, tgt) = (&self.spaces[&s], &self.spaces[&t]);
        if self.degree == 1 {
            let mut m = Matrix::zeros(tgt.dim, src.dim);
            let mut seen = vec![false; src.dim];
            // least path of each component represents its class
            for (p, &c) in src.labels.iter().enumerate() {
                if seen[c] {
                    continue;
                }
                seen[c] = true;
                let image = u.concat(&src.complex.paths[p])?.concat(&v)?;
                let q = tgt
                    .complex
                    .path_index(&image)
                    .ok_or_else(|| Error::Composability("extended path is missing".into()))?;
                m[(tgt.labels[q], c)] = self.field.one();
            }
            return Ok(m);
        }
        let cell = extension_map(&src.complex, &tgt.complex, &u, &v)?;
        let chain = chain_map_of_cellular(&cell, &tgt.complex);
        let (sc, sb) = src.higher.as_ref().unwrap();
        let (tc, tb) = tgt.higher.as_ref().unwrap();
        induced_map_unchecked(&chain, sc, tc, sb, tb)
    }
}

/// Natural homology in degree `n` (carrying `H_{n-1}` of trace spaces)
/// over a region of the trace poset.
#[derive(Clone, Debug)]
pub struct NatDiagram {
    pub degree: usize,
    pub poset: TracePoset,
    /// Labels are vertex sequences; node `i` is `poset.elements[i]`.
    pub diagram: VectDiagram,
}

impl NatDiagram {
    pub fn traces(&self) -> &[EdgePath] {
        &self.poset.elements
    }

    pub fn dims(&self) -> &[usize] {
        &self.diagram.dims
    }

    /// Nodes grouped by endpoints, with the common dimension.
    pub fn endpoint_classes(&self) -> Vec<((usize, usize), Vec<usize>, usize)> {
        let mut by: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, f) in self.traces().iter().enumerate() {
            by.entry((f.start(), f.end())).or_default().push(i);
        }
        by.into_iter().map(|(k, v)| (k, v.clone(), self.diagram.dims[v[0]])).collect()
    }

    /// Restriction to the listed traces, in order.
    pub fn restrict_to(&self, traces: &[EdgePath]) -> Result<VectDiagram> {
        let keep: Vec<usize> = traces
            .iter()
            .map(|t| self.poset.index_of(t).ok_or_else(|| Error::Precondition("trace outside the diagram".into())))
            .collect::<Result<_>>()?;
        self.diagram.restrict(&keep)
    }
}

fn region_traces(x: &PrecubicalSet, region: &Region, cap: usize) -> Result<Vec<EdgePath>> {
    match region {
        Region::Whole => Ok(build_trace_poset(x, cap)?.elements),
        Region::Upset(alpha) => {
            // grow extensions on both sides of alpha
            let mut out = vec![alpha.clone()];
            let mut frontier = vec![alpha.clone()];
            let mut seen: std::collections::HashSet<EdgePath> = out.iter().cloned().collect();
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for p in &frontier {
                    for &e in x.out_edges(p.end()) {
                        let q = p.concat(&EdgePath::from_edges(x, p.end(), &[e])?)?;
                        if seen.insert(q.clone()) {
                            next.push(q);
                        }
                    }
                    for &e in x.in_edges(p.start()) {
                        let q = EdgePath::from_edges(x, x.src(e), &[e])?.concat(p)?;
                        if seen.insert(q.clone()) {
                            next.push(q);
                        }
                    }
                }
                out.extend(next.iter().cloned());
                if out.len() > cap {
                    return Err(Error::CapExceeded { what: "traces", count: out.len(), cap });
                }
                frontier = next;
            }
            Ok(out)
        }
        Region::Interval(alpha, f) => traceposet::interval(alpha, f),
    }
}

/// Builds the diagram with dimensions from the trace spaces at each
/// node's endpoints and matrices induced by extension.
pub fn natural_homology(
    x: &PrecubicalSet,
    degree: usize,
    region: &Region,
    field: Field,
    cap: usize,
) -> Result<NatDiagram> {
    let mut cache = HomologyCache::new(x, field, degree, cap)?;
    let poset = TracePoset::from_elements(region_traces(x, region, cap)?);
    let mut dims = Vec::with_capacity(poset.len());
    for f in &poset.elements {
        dims.push(cache.dim(f.start(), f.end())?);
    }
    let mut covers = Vec::with_capacity(poset.cover_count());
    for a in 0..poset.len() {
        for &b in poset.covers_up(a) {
            let matrix = cache.map(&poset.elements[a], &poset.elements[b])?;
            covers.push(Cover { from: a, to: b, matrix });
        }
    }
    let labels = poset.elements.iter().map(|p| p.label(x)).collect();
    let diagram = VectDiagram::new(field, labels, dims, covers)?;
    Ok(NatDiagram { degree, poset, diagram })
}

fn check_chain(f: &EdgePath, chain: &[EdgePath]) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::NotAChain("empty chain".into()));
    }
    for w in chain.windows(2) {
        if w[0] == w[1] || traceposet::leq(&w[0], &w[1]).is_none() {
            return Err(Error::NotAChain("consecutive traces are not strictly increasing".into()));
        }
    }
    if traceposet::leq(chain.last().unwrap(), f).is_none() {
        return Err(Error::NotAChain("the chain leaves the interval below the trace".into()));
    }
    Ok(())
}

/// The module `H_{n-1}` along a chain below `f`, indexed by position.
pub fn persistence_along_trace(
    x: &PrecubicalSet,
    f: &EdgePath,
    chain: &[EdgePath],
    degree: usize,
    field: Field,
) -> Result<PersistenceModule> {
    check_chain(f, chain)?;
    let mut cache = HomologyCache::new(x, field, degree, usize::MAX)?;
    let dims = chain.iter().map(|c| cache.dim(c.start(), c.end())).collect::<Result<Vec<_>>>()?;
    let maps = chain.windows(2).map(|w| cache.map(&w[0], &w[1])).collect::<Result<Vec<_>>>()?;
    PersistenceModule::over_naturals(field, dims, maps)
}

/// Nested images of the trace complexes along the chain inside the one
/// at the last element's endpoints.
pub fn filtration_of_trace(
    x: &PrecubicalSet,
    f: &EdgePath,
    chain: &[EdgePath],
    field: Field,
) -> Result<FilteredComplex> {
    check_chain(f, chain)?;
    let top = chain.last().unwrap();
    let target = trace_complex_capped(x, top.start(), top.end(), usize::MAX)?;
    let never = usize::MAX;
    let mut births =
        vec![vec![never; target.paths.len()], vec![never; target.swaps.len()], vec![never; target.squares2.len()]];
    for (i, c) in chain.iter().enumerate() {
        let (u, v) = traceposet::leq(c, top).expect("checked");
        let source = trace_complex_capped(x, c.start(), c.end(), usize::MAX)?;
        let m = extension_map(&source, &target, &u, &v)?;
        for (dim, image) in [&m.vertices, &m.edges, &m.faces].into_iter().enumerate() {
            for &cell in image {
                births[dim][cell] = births[dim][cell].min(i);
            }
        }
    }
    // cells outside every image appear at the last stage
    let last = chain.len() - 1;
    for b in births.iter_mut().flatten() {
        if *b == never {
            *b = last;
        }
    }
    let complex = chain_complex_of_trace(&target, field);
    let labels = vec![
        target.paths.iter().map(|p| p.label(x)).collect(),
        target.swaps.iter().map(|s| format!("{}@{}", x.name(2, s.square), s.position)).collect(),
        (0..target.squares2.len()).map(|k| format!("q{k}")).collect(),
    ];
    let births: Vec<Vec<usize>> = births.into_iter().take(complex.top() + 1).collect();
    Ok(FilteredComplex::new(complex, births, chain.len())?.with_labels(labels))
}
