//! Chain complexes over a field, homology bases and induced maps.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::matrix::{axpy, Matrix, Reducer, SparseMatrix, SparseVec};
use crate::tracespace::{CellularMap, TraceComplex};

/// Finite chain complex; `boundaries[k]` maps degree `k` to degree `k-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub field: Field,
    dims: Vec<usize>,
    boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// `boundaries[k-1]` is the boundary out of degree `k`.
    pub fn new(field: Field, dims: Vec<usize>, boundaries: Vec<SparseMatrix>) -> Result<Self> {
        if boundaries.len() + 1 != dims.len().max(1) {
            return Err(Error::ShapeMismatch("need one boundary per positive degree".into()));
        }
        let mut all = vec![SparseMatrix::new(0, dims.first().copied().unwrap_or(0))];
        for (k, b) in boundaries.into_iter().enumerate() {
            if b.nrows != dims[k] || b.ncols() != dims[k + 1] {
                return Err(Error::ShapeMismatch(format!("boundary out of degree {} has the wrong shape", k + 1)));
            }
            let cols = b.cols.into_iter().map(|c| SparseMatrix::column_from(c, field)).collect();
            all.push(SparseMatrix { nrows: b.nrows, cols });
        }
        let c = ChainComplex { field, dims, boundaries: all };
        for k in 2..c.dims.len() {
            if !c.boundaries[k - 1].mul(&c.boundaries[k], field).is_zero() {
                return Err(Error::ShapeMismatch(format!("boundary squares to nonzero in degree {k}")));
            }
        }
        Ok(c)
    }

    pub fn top(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// The boundary out of degree `k`, empty outside the stored range.
    pub fn boundary(&self, k: usize) -> SparseMatrix {
        if k == 0 {
            return SparseMatrix::new(0, self.dim(0));
        }
        self.boundaries.get(k).cloned().unwrap_or_else(|| SparseMatrix::new(self.dim(k - 1), self.dim(k)))
    }

    pub fn squares_to_zero(&self) -> bool {
        (2..self.dims.len()).all(|k| self.boundary(k - 1).mul(&self.boundary(k), self.field).is_zero())
    }

    pub fn betti(&self, k: usize) -> usize {
        let z = self.dim(k) - self.boundary(k).rank(self.field);
        z - self.boundary(k + 1).rank(self.field)
    }

    /// The subcomplex spanned by `keep[k]` in each degree, in that order.
    /// Returns it with the inclusion chain map.
    pub fn subcomplex(&self, keep: &[Vec<usize>]) -> Result<(ChainComplex, ChainMap)> {
        let pos: Vec<HashMap<usize, usize>> =
            keep.iter().map(|ks| ks.iter().enumerate().map(|(i, &g)| (g, i)).collect()).collect();
        let dims: Vec<usize> = keep.iter().map(Vec::len).collect();
        let mut boundaries = Vec::new();
        for k in 1..keep.len() {
            let full = self.boundary(k);
            let mut m = SparseMatrix::new(dims[k - 1], dims[k]);
            for (j, &g) in keep[k].iter().enumerate() {
                let mut col = Vec::new();
                for (i, x) in &full.cols[g] {
                    match pos[k - 1].get(i) {
                        Some(&r) => col.push((r, x.clone())),
                        None => {
                            return Err(Error::Precondition(format!(
                                "generator {g} of degree {k} has a face outside the subcomplex"
                            )))
                        }
                    }
                }
                m.cols[j] = SparseMatrix::column_from(col, self.field);
            }
            boundaries.push(m);
        }
        let sub = ChainComplex::new(self.field, dims.clone(), boundaries)?;
        let components = (0..keep.len())
            .map(|k| SparseMatrix { nrows: self.dim(k), cols: keep[k].iter().map(|&g| vec![(g, Q::one())]).collect() })
            .collect();
        Ok((sub, ChainMap { components }))
    }
}

/// Degree-wise matrices `C_k -> D_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub components: Vec<SparseMatrix>,
}

impl ChainMap {
    pub fn component(&self, k: usize, source: &ChainComplex, target: &ChainComplex) -> SparseMatrix {
        self.components.get(k).cloned().unwrap_or_else(|| SparseMatrix::new(target.dim(k), source.dim(k)))
    }

    /// Checks shapes and `d f = f d` in every degree.
    pub fn check(&self, source: &ChainComplex, target: &ChainComplex) -> Result<()> {
        let f = source.field;
        let top = source.top().max(target.top()) + 1;
        for k in 0..=top {
            let fk = self.component(k, source, target);
            if fk.nrows != target.dim(k) || fk.ncols() != source.dim(k) {
                return Err(Error::NotAChainMap(format!("component in degree {k} has the wrong shape")));
            }
        }
        for k in 1..=top {
            let lhs = target.boundary(k).mul(&self.component(k, source, target), f);
            let rhs = self.component(k - 1, source, target).mul(&source.boundary(k), f);
            if lhs != rhs {
                return Err(Error::NotAChainMap(format!("does not commute with the boundary in degree {k}")));
            }
        }
        Ok(())
    }

    pub fn compose(&self, after: &ChainMap, field: Field) -> ChainMap {
        let n = self.components.len().min(after.components.len());
        ChainMap { components: (0..n).map(|k| after.components[k].mul(&self.components[k], field)).collect() }
    }
}

/// Chosen basis of `H_k`: representative cycles plus the data needed to
/// express any cycle in that basis.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub degree: usize,
    pub reps: Vec<SparseVec>,
    reducer: Reducer,
}

impl HomologyBasis {
    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the class of a cycle.
    pub fn coordinates(&self, cycle: &SparseVec) -> Result<Vec<Q>> {
        let f = self.reducer.field();
        let (rest, used) = self.reducer.reduce(cycle.clone());
        if !rest.is_empty() {
            return Err(Error::Precondition("vector is not a cycle".into()));
        }
        let mut acc = SparseVec::new();
        for (k, c) in &used {
            acc = axpy(&acc, c, self.reducer.tag(*k), f);
        }
        let mut out = vec![Q::zero(); self.rank()];
        for (i, x) in acc {
            out[i] = x;
        }
        Ok(out)
    }
}

/// Basis of the cycles in degree `k`: standard vectors in degree 0,
/// otherwise one cycle per column of the boundary that reduces to zero.
pub fn cycle_basis(c: &ChainComplex, k: usize) -> Vec<SparseVec> {
    let n = c.dim(k);
    if k == 0 {
        return (0..n).map(|i| vec![(i, Q::one())]).collect();
    }
    let f = c.field;
    let d = c.boundary(k);
    let mut red = Reducer::new(f);
    let mut out = Vec::new();
    for (j, col) in d.cols.iter().enumerate() {
        let before = red.len();
        if let Some(used) = red.insert_tagged(col.clone(), vec![(j, Q::one())]) {
            let mut z: SparseVec = vec![(j, Q::one())];
            for (s, x) in &used {
                z = axpy(&z, &f.neg(x), red.tag(*s), f);
            }
            out.push(z);
        } else {
            debug_assert_eq!(red.len(), before + 1);
        }
    }
    out
}

pub fn compute_basis(c: &ChainComplex, k: usize) -> HomologyBasis {
    let f = c.field;
    let mut reducer = Reducer::new(f);
    for col in &c.boundary(k + 1).cols {
        reducer.insert_tagged(col.clone(), Vec::new());
    }
    let mut reps = Vec::new();
    for z in cycle_basis(c, k) {
        let tag = vec![(reps.len(), Q::one())];
        if reducer.insert_tagged(z.clone(), tag).is_none() {
            reps.push(z);
        }
    }
    HomologyBasis { degree: k, reps, reducer }
}

/// Matrix of the map induced on `H_k` in the chosen bases.
pub fn induced_map(
    f: &ChainMap,
    source: &ChainComplex,
    target: &ChainComplex,
    source_basis: &HomologyBasis,
    target_basis: &HomologyBasis,
) -> Result<Matrix> {
    f.check(source, target)?;
    induced_map_unchecked(f, source, target, source_basis, target_basis)
}

pub(crate) fn induced_map_unchecked(
    f: &ChainMap,
    source: &ChainComplex,
    target: &ChainComplex,
    source_basis: &HomologyBasis,
    target_basis: &HomologyBasis,
) -> Result<Matrix> {
    let k = source_basis.degree;
    let fk = f.component(k, source, target);
    let mut m = Matrix::zeros(target_basis.rank(), source_basis.rank());
    for (j, rep) in source_basis.reps.iter().enumerate() {
        let image = fk.apply(rep, source.field);
        for (i, x) in target_basis.coordinates(&image)?.into_iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    Ok(m)
}

/// Vertices are paths, 1-cells are swaps oriented from lower to upper
/// corner, 2-cells are independent swap pairs.
pub fn chain_complex_of_trace(t: &TraceComplex, field: Field) -> ChainComplex {
    let one = Q::one();
    let minus = field.neg(&one);
    let mut d1 = SparseMatrix::new(t.paths.len(), t.swaps.len());
    for (j, s) in t.swaps.iter().enumerate() {
        d1.cols[j] = SparseMatrix::column_from([(s.target, one.clone()), (s.path, minus.clone())], field);
    }
    let mut d2 = SparseMatrix::new(t.swaps.len(), t.squares2.len());
    for (j, q) in t.squares2.iter().enumerate() {
        d2.cols[j] = SparseMatrix::column_from(
            [(q.bottom, one.clone()), (q.right, one.clone()), (q.top, minus.clone()), (q.left, minus.clone())],
            field,
        );
    }
    ChainComplex::new(field, vec![t.paths.len(), t.swaps.len(), t.squares2.len()], vec![d1, d2])
        .expect("swap complex boundaries compose to zero")
}

pub fn chain_map_of_cellular(m: &CellularMap, target: &TraceComplex) -> ChainMap {
    let one = Q::one();
    let comp = |images: &[usize], nrows: usize| SparseMatrix {
        nrows,
        cols: images.iter().map(|&i| vec![(i, one.clone())]).collect(),
    };
    ChainMap {
        components: vec![
            comp(&m.vertices, target.paths.len()),
            comp(&m.edges, target.swaps.len()),
            comp(&m.faces, target.squares2.len()),
        ],
    }
}

/// Abstract simplicial complex on vertices `0..n`, closed under faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    /// `simplices[k]` lists the sorted `k`-simplices in lexicographic order.
    pub simplices: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    pub fn from_maximal(maximal: &[Vec<usize>]) -> Self {
        let mut all: std::collections::BTreeSet<Vec<usize>> = Default::default();
        for s in maximal {
            let mut s = s.clone();
            s.sort();
            s.dedup();
            let n = s.len();
            for mask in 1u32..(1 << n) {
                all.insert((0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect());
            }
        }
        let top = all.iter().map(Vec::len).max().unwrap_or(0);
        let mut simplices = vec![Vec::new(); top];
        for s in all {
            simplices[s.len() - 1].push(s);
        }
        for level in &mut simplices {
            level.sort();
        }
        SimplicialComplex { simplices }
    }

    pub fn index(&self, s: &[usize]) -> Option<usize> {
        self.simplices.get(s.len().checked_sub(1)?)?.binary_search_by(|t| t.as_slice().cmp(s)).ok()
    }

    pub fn chain_complex(&self, field: Field) -> ChainComplex {
        let dims: Vec<usize> = self.simplices.iter().map(Vec::len).collect();
        let mut boundaries = Vec::new();
        for k in 1..self.simplices.len() {
            let mut d = SparseMatrix::new(dims[k - 1], dims[k]);
            for (j, s) in self.simplices[k].iter().enumerate() {
                let entries = (0..s.len()).map(|i| {
                    let mut face = s.clone();
                    face.remove(i);
                    let sign = if i % 2 == 0 { Q::one() } else { -Q::one() };
                    (self.index(&face).unwrap(), sign)
                });
                d.cols[j] = SparseMatrix::column_from(entries, field);
            }
            boundaries.push(d);
        }
        ChainComplex::new(field, dims, boundaries).expect("simplicial boundaries compose to zero")
    }

    /// Chain map of a vertex map into `target`; degenerate images vanish.
    pub fn chain_map(&self, target: &SimplicialComplex, vertex_map: &[usize], field: Field) -> Result<ChainMap> {
        let mut components = Vec::new();
        for k in 0..self.simplices.len() {
            let nrows = target.simplices.get(k).map_or(0, Vec::len);
            let mut m = SparseMatrix::new(nrows, self.simplices[k].len());
            for (j, s) in self.simplices[k].iter().enumerate() {
                let image: Vec<usize> = s.iter().map(|&v| vertex_map[v]).collect();
                let mut sorted = image.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() < image.len() {
                    continue;
                }
                let Some(i) = target.index(&sorted) else {
                    return Err(Error::NotAChainMap(format!("image of simplex {s:?} is not in the target")));
                };
                let inversions = (0..image.len())
                    .flat_map(|a| (a + 1..image.len()).map(move |b| (a, b)))
                    .filter(|&(a, b)| image[a] > image[b])
                    .count();
                let sign = if inversions % 2 == 0 { Q::one() } else { -Q::one() };
                m.cols[j] = SparseMatrix::column_from([(i, sign)], field);
            }
            components.push(m);
        }
        Ok(ChainMap { components })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;
    use crate::fixtures;
    use crate::tracespace::{extension_map, trace_complex, EdgePath};
    use proptest::prelude::*;

    #[test]
    fn single_edge_boundary() {
        let k = SimplicialComplex::from_maximal(&[vec![0, 1]]);
        let c = k.chain_complex(Field::Rational);
        assert_eq!(c.boundary(1).to_dense(), Matrix::from_i64(&[&[-1], &[1]]));
    }

    #[test]
    fn circle_and_disk() {
        let circle = SimplicialComplex::from_maximal(&[vec![0, 1], vec![1, 2], vec![0, 2]]);
        let disk = SimplicialComplex::from_maximal(&[vec![0, 1, 2]]);
        for f in [Field::Rational, Field::Prime(2), Field::Prime(3)] {
            let c = circle.chain_complex(f);
            assert_eq!((c.betti(0), c.betti(1)), (1, 1));
            let d = disk.chain_complex(f);
            assert!(d.squares_to_zero());
            assert_eq!((d.betti(0), d.betti(1), d.betti(2)), (1, 0, 0));
        }
    }

    #[test]
    fn matchbox_trace_space_is_a_tree() {
        let x = fixtures::matchbox();
        let t = trace_complex(&x, x.vertex("O").unwrap(), x.vertex("P").unwrap());
        for f in [Field::Rational, Field::Prime(2), Field::Prime(3), Field::Prime(5)] {
            let c = chain_complex_of_trace(&t, f);
            assert!(c.squares_to_zero());
            assert_eq!((c.betti(0), c.betti(1)), (1, 0));
        }
    }

    #[test]
    fn matchbox_boundary_matches_incidence_at_t_one() {
        // each swap column holds exactly one -1 and one +1, on paths that
        // differ in two consecutive edges
        let x = fixtures::matchbox();
        let t = trace_complex(&x, x.vertex("O").unwrap(), x.vertex("P").unwrap());
        let d = chain_complex_of_trace(&t, Field::Rational).boundary(1).to_dense();
        assert_eq!(d.shape(), (6, 5));
        for j in 0..5 {
            let mut col: Vec<Q> = d.column(j).into_iter().filter(|v| !v.is_zero()).collect();
            col.sort();
            assert_eq!(col, vec![q(-1), q(1)]);
        }
        assert_eq!(d.rank(Field::Rational), 5);
    }

    #[test]
    fn extension_merges_components_on_h0() {
        let x = fixtures::matchbox();
        let (o, xy, p) = (x.vertex("O").unwrap(), x.vertex("XY").unwrap(), x.vertex("P").unwrap());
        let small = trace_complex(&x, o, xy);
        let big = trace_complex(&x, o, p);
        let f = Field::Rational;
        let (cs, cb) = (chain_complex_of_trace(&small, f), chain_complex_of_trace(&big, f));
        let v = EdgePath::parse(&x, "XY>P").unwrap();
        let m = extension_map(&small, &big, &EdgePath::constant(o), &v).unwrap();
        let g = chain_map_of_cellular(&m, &big);
        let (bs, bb) = (compute_basis(&cs, 0), compute_basis(&cb, 0));
        let h = induced_map(&g, &cs, &cb, &bs, &bb).unwrap();
        assert_eq!(h, Matrix::from_i64(&[&[1, 1]]));
        assert_eq!(h.rank(f), 1);
    }

    #[test]
    fn identity_induces_identity() {
        let k = SimplicialComplex::from_maximal(&[vec![0, 1], vec![1, 2], vec![0, 2], vec![3]]);
        let c = k.chain_complex(Field::Rational);
        let id = k.chain_map(&k, &[0, 1, 2, 3], Field::Rational).unwrap();
        for deg in 0..2 {
            let b = compute_basis(&c, deg);
            assert_eq!(induced_map(&id, &c, &c, &b, &b).unwrap(), Matrix::identity(b.rank()));
        }
    }

    #[test]
    fn non_chain_map_is_rejected() {
        let k = SimplicialComplex::from_maximal(&[vec![0, 1]]);
        let c = k.chain_complex(Field::Rational);
        let mut bad = k.chain_map(&k, &[0, 1], Field::Rational).unwrap();
        bad.components[1] = SparseMatrix::new(1, 1);
        let b = compute_basis(&c, 0);
        assert!(matches!(induced_map(&bad, &c, &c, &b, &b), Err(Error::NotAChainMap(_))));
    }

    #[test]
    fn classes_do_not_depend_on_representatives() {
        // two homologous cycles on an annulus-like complex get equal coordinates
        let k = SimplicialComplex::from_maximal(&[vec![0, 1, 3], vec![1, 2, 3], vec![0, 2], vec![2, 4], vec![0, 4]]);
        let c = k.chain_complex(Field::Rational);
        let b = compute_basis(&c, 1);
        for z in cycle_basis(&c, 1) {
            let coords = b.coordinates(&z).unwrap();
            for bd in &c.boundary(2).cols {
                let shifted = axpy(&z, &q(3), bd, Field::Rational);
                assert_eq!(b.coordinates(&shifted).unwrap(), coords);
            }
        }
    }

    fn random_complex() -> impl Strategy<Value = SimplicialComplex> {
        proptest::collection::vec(proptest::collection::btree_set(0usize..5, 1..4), 1..6).prop_map(|ss| {
            SimplicialComplex::from_maximal(&ss.into_iter().map(|s| s.into_iter().collect()).collect::<Vec<_>>())
        })
    }

    proptest! {
        #[test]
        fn functoriality(k in random_complex(), f1 in proptest::collection::vec(0usize..5, 5), f2 in proptest::collection::vec(0usize..5, 5)) {
            let f = Field::Rational;
            // vertex maps are simplicial into the full simplex on five vertices
            let full = SimplicialComplex::from_maximal(&[vec![0, 1, 2, 3, 4]]);
            let image: Vec<Vec<usize>> = k.simplices.iter().flatten().map(|s| s.iter().map(|&v| f1[v]).collect()).collect();
            let mid = SimplicialComplex::from_maximal(&image);
            let g1 = k.chain_map(&mid, &f1, f).unwrap();
            let g2 = mid.chain_map(&full, &f2, f).unwrap();
            let (c0, c1, c2) = (k.chain_complex(f), mid.chain_complex(f), full.chain_complex(f));
            for deg in 0..2 {
                let (b0, b1, b2) = (compute_basis(&c0, deg), compute_basis(&c1, deg), compute_basis(&c2, deg));
                let h1 = induced_map(&g1, &c0, &c1, &b0, &b1).unwrap();
                let h2 = induced_map(&g2, &c1, &c2, &b1, &b2).unwrap();
                let h = induced_map(&g1.compose(&g2, f), &c0, &c2, &b0, &b2).unwrap();
                prop_assert_eq!(h, h2.mul(&h1, f).unwrap());
            }
        }

        #[test]
        fn betti_is_rank_nullity(k in random_complex()) {
            for f in [Field::Rational, Field::Prime(2), Field::Prime(3), Field::Prime(5)] {
                let c = k.chain_complex(f);
                prop_assert!(c.squares_to_zero());
                let chi: i64 = (0..=c.top()).map(|d| if d % 2 == 0 { c.dim(d) as i64 } else { -(c.dim(d) as i64) }).sum();
                let chi_h: i64 = (0..=c.top()).map(|d| if d % 2 == 0 { c.betti(d) as i64 } else { -(c.betti(d) as i64) }).sum();
                prop_assert_eq!(chi, chi_h);
                for d in 0..=c.top() {
                    prop_assert_eq!(compute_basis(&c, d).rank(), c.betti(d));
                }
            }
        }
    }
}
