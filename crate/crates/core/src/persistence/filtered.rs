use std::collections::HashMap;

use num_traits::One;

use super::echelon::{Echelon, GradedMatrix};
use super::module::{Barcode, Interval, PersistenceModule};
use crate::error::{Error, Result};
use crate::field::Q;
use crate::homology::{compute_basis, induced_map_unchecked, ChainComplex, ChainMap};
use crate::matrix::{axpy, SparseMatrix, SparseVec};

/// A chain complex whose generators appear at stages `0..stages`.
///
/// Stage `i` is the subcomplex of generators born at or before `i`.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    pub complex: ChainComplex,
    pub births: Vec<Vec<usize>>,
    pub stages: usize,
    /// Optional generator names per degree, used in echelon printouts.
    pub labels: Option<Vec<Vec<String>>>,
}

impl FilteredComplex {
    pub fn new(complex: ChainComplex, births: Vec<Vec<usize>>, stages: usize) -> Result<Self> {
        for k in 0..=complex.top() {
            let b = births.get(k).map_or(0, Vec::len);
            if b != complex.dim(k) {
                return Err(Error::ShapeMismatch(format!("degree {k}: {b} births for {} generators", complex.dim(k))));
            }
        }
        for k in 1..births.len() {
            let d = complex.boundary(k);
            for (j, col) in d.cols.iter().enumerate() {
                if births[k][j] >= stages {
                    return Err(Error::Precondition(format!(
                        "generator {j} of degree {k} is born after the last stage"
                    )));
                }
                if let Some((i, _)) = col.iter().find(|(i, _)| births[k - 1][*i] > births[k][j]) {
                    return Err(Error::Precondition(format!(
                        "generator {j} of degree {k} is born before its face {i}"
                    )));
                }
            }
        }
        if births.first().is_some_and(|b| b.iter().any(|&x| x >= stages)) {
            return Err(Error::Precondition("a vertex is born after the last stage".into()));
        }
        Ok(FilteredComplex { complex, births, stages, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Self {
        self.labels = Some(labels);
        self
    }

    fn birth(&self, k: usize, g: usize) -> usize {
        self.births[k][g]
    }

    /// Generators alive at stage `i`, per degree, in original order.
    pub fn alive(&self, i: usize) -> Vec<Vec<usize>> {
        self.births.iter().map(|bs| (0..bs.len()).filter(|&g| bs[g] <= i).collect()).collect()
    }

    /// The subcomplex at stage `i`.
    pub fn stage(&self, i: usize) -> Result<ChainComplex> {
        Ok(self.complex.subcomplex(&self.alive(i))?.0)
    }
}

/// `H_k` of every stage with the maps induced by inclusion.
pub fn persistent_homology(fc: &FilteredComplex, k: usize) -> Result<PersistenceModule> {
    let field = fc.complex.field;
    let alive: Vec<Vec<Vec<usize>>> = (0..fc.stages).map(|i| fc.alive(i)).collect();
    let stages: Vec<ChainComplex> =
        alive.iter().map(|a| fc.complex.subcomplex(a).map(|s| s.0)).collect::<Result<_>>()?;
    let bases: Vec<_> = stages.iter().map(|c| compute_basis(c, k)).collect();
    let mut maps = Vec::new();
    for i in 0..fc.stages.saturating_sub(1) {
        let (from, to) = (&alive[i], &alive[i + 1]);
        let components = (0..from.len())
            .map(|d| {
                let pos: HashMap<usize, usize> = to[d].iter().enumerate().map(|(p, &g)| (g, p)).collect();
                SparseMatrix { nrows: to[d].len(), cols: from[d].iter().map(|g| vec![(pos[g], Q::one())]).collect() }
            })
            .collect();
        let inc = ChainMap { components };
        maps.push(induced_map_unchecked(&inc, &stages[i], &stages[i + 1], &bases[i], &bases[i + 1])?);
    }
    let dims = bases.iter().map(|b| b.rank()).collect();
    PersistenceModule::over_naturals(field, dims, maps)
}

/// Reduction of the boundary into degree `k`, written in a homogeneous
/// basis of the `k`-cycles.
pub fn filtered_echelon(fc: &FilteredComplex, k: usize) -> Echelon {
    let f = fc.complex.field;
    let n = fc.complex.dim(k);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&g| (fc.birth(k, g), g));
    let mut pos = vec![0; n];
    for (p, &g) in order.iter().enumerate() {
        pos[g] = p;
    }
    // cycles keyed by their latest generator in filtration order
    let mut cycles: Vec<(usize, SparseVec)> = Vec::new();
    if k == 0 {
        for &g in &order {
            cycles.push((g, vec![(g, Q::one())]));
        }
    } else {
        let d = fc.complex.boundary(k);
        let mut lows: HashMap<usize, usize> = HashMap::new();
        let mut reduced: Vec<(SparseVec, SparseVec)> = Vec::new();
        for &g in &order {
            let mut col = d.cols[g].clone();
            let mut comb: SparseVec = vec![(g, Q::one())];
            while let Some((low, x)) = col.last().cloned() {
                let Some(&r) = lows.get(&low) else { break };
                let (rc, rcomb) = &reduced[r];
                let c = f.neg(&f.div(&x, &rc.last().unwrap().1).unwrap());
                col = axpy(&col, &c, rc, f);
                comb = axpy(&comb, &c, rcomb, f);
            }
            match col.last() {
                Some((low, _)) => {
                    lows.insert(*low, reduced.len());
                    reduced.push((col, comb));
                }
                None => cycles.push((g, comb)),
            }
        }
    }
    let lead_of: HashMap<usize, usize> = cycles.iter().enumerate().map(|(i, (g, _))| (*g, i)).collect();
    let coords = |mut w: SparseVec| -> SparseVec {
        let mut out = Vec::new();
        while let Some(&(g, ref x)) = w.iter().max_by_key(|(g, _)| pos[*g]) {
            let i = lead_of[&g];
            let (_, z) = &cycles[i];
            let lead = &z.iter().find(|e| e.0 == g).unwrap().1;
            let c = f.div(x, lead).unwrap();
            w = axpy(&w, &f.neg(&c), z, f);
            out.push((i, c));
        }
        out.sort_by_key(|e| e.0);
        out
    };
    let up = fc.complex.boundary(k + 1);
    let columns: Vec<SparseVec> = up.cols.iter().map(|c| coords(c.clone())).collect();
    let row_degrees = cycles.iter().map(|(g, _)| fc.birth(k, *g)).collect();
    let col_degrees = (0..up.ncols()).map(|c| fc.birth(k + 1, c)).collect();
    let labels = cycles
        .iter()
        .map(|(g, _)| match &fc.labels {
            Some(l) => l[k][*g].clone(),
            None => format!("z{g}"),
        })
        .collect();
    GradedMatrix::new(f, row_degrees, col_degrees, columns)
        .expect("filtration is homogeneous")
        .with_labels(labels)
        .reduce()
}

/// Barcode of `H_k` read off [`filtered_echelon`], in stage units.
pub fn filtered_barcode(fc: &FilteredComplex, k: usize) -> Barcode {
    let at = |d: usize| Q::from_integer((d as i64).into());
    Barcode::new(
        filtered_echelon(fc, k).intervals().into_iter().map(|(b, d)| Interval::new(at(b), d.map(at))).collect(),
    )
}
