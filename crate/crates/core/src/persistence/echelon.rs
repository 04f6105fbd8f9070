//! Column-echelon reduction of homogeneous matrices over `k[t]`.
//!
//! An entry in row `r` and column `c` stands for `x * t^(deg c - deg r)`,
//! so only the coefficient `x` is stored. Rows are sorted by decreasing
//! degree (ties keep their order) and the pivot of a column is its
//! topmost nonzero entry. Columns are processed by increasing degree and
//! only ever receive multiples of earlier columns, which keeps every
//! operation homogeneous.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::matrix::{axpy, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMatrix {
    pub field: Field,
    pub row_degrees: Vec<usize>,
    pub col_degrees: Vec<usize>,
    /// Sparse columns indexed by original row.
    pub columns: Vec<SparseVec>,
    pub row_labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub matrix: GradedMatrix,
    /// Original row indices, top to bottom.
    pub row_order: Vec<usize>,
    /// Original column indices, left to right.
    pub col_order: Vec<usize>,
    /// Reduced columns in processing order.
    pub reduced: Vec<SparseVec>,
    /// Pivot row (original index) and power of `t`, per processed column.
    pub pivots: Vec<Option<(usize, usize)>>,
}

impl GradedMatrix {
    pub fn new(
        field: Field,
        row_degrees: Vec<usize>,
        col_degrees: Vec<usize>,
        columns: Vec<SparseVec>,
    ) -> Result<Self> {
        if columns.len() != col_degrees.len() {
            return Err(Error::ShapeMismatch("one degree per column".into()));
        }
        for (c, col) in columns.iter().enumerate() {
            for (r, _) in col {
                if *r >= row_degrees.len() || row_degrees[*r] > col_degrees[c] {
                    return Err(Error::ShapeMismatch(format!("entry ({r}, {c}) is not homogeneous")));
                }
            }
        }
        let row_labels = (0..row_degrees.len()).map(|r| format!("r{r}")).collect();
        Ok(GradedMatrix { field, row_degrees, col_degrees, columns, row_labels })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.row_degrees.len());
        self.row_labels = labels;
        self
    }

    pub fn reduce(&self) -> Echelon {
        let f = self.field;
        let mut row_order: Vec<usize> = (0..self.row_degrees.len()).collect();
        row_order.sort_by(|a, b| self.row_degrees[*b].cmp(&self.row_degrees[*a]).then(a.cmp(b)));
        let mut rank = vec![0; row_order.len()];
        for (pos, &r) in row_order.iter().enumerate() {
            rank[r] = pos;
        }
        let mut col_order: Vec<usize> = (0..self.columns.len()).collect();
        col_order.sort_by_key(|&c| (self.col_degrees[c], c));

        // topmost nonzero row of a column
        let pivot_of = |col: &SparseVec| col.iter().min_by_key(|(r, _)| rank[*r]).map(|(r, x)| (*r, x.clone()));
        let mut owner: HashMap<usize, usize> = HashMap::new();
        let mut reduced: Vec<SparseVec> = Vec::new();
        let mut pivots = Vec::new();
        for &c in &col_order {
            let mut col = self.columns[c].clone();
            while let Some((r, x)) = pivot_of(&col) {
                let Some(&k) = owner.get(&r) else { break };
                let y = reduced[k].iter().find(|e| e.0 == r).unwrap().1.clone();
                let factor = f.neg(&f.div(&x, &y).unwrap());
                col = axpy(&col, &factor, &reduced[k], f);
            }
            let piv = pivot_of(&col).map(|(r, _)| (r, self.col_degrees[c] - self.row_degrees[r]));
            if let Some((r, _)) = piv {
                owner.insert(r, reduced.len());
            }
            reduced.push(col);
            pivots.push(piv);
        }
        Echelon { matrix: self.clone(), row_order, col_order, reduced, pivots }
    }
}

impl Echelon {
    /// Interval per row in degree units: `(birth, Some(death))` for a
    /// pivot row, `(birth, None)` for a free row. Zero-length intervals
    /// are dropped.
    pub fn intervals(&self) -> Vec<(usize, Option<usize>)> {
        let mut killed: HashMap<usize, usize> = HashMap::new();
        for (pos, piv) in self.pivots.iter().enumerate() {
            if let Some((r, _)) = piv {
                killed.insert(*r, self.matrix.col_degrees[self.col_order[pos]]);
            }
        }
        let mut out = Vec::new();
        for &r in &self.row_order {
            let b = self.matrix.row_degrees[r];
            match killed.get(&r) {
                Some(&d) if d == b => {}
                Some(&d) => out.push((b, Some(d))),
                None => out.push((b, None)),
            }
        }
        out
    }

    /// Rows that are not pivots of any column.
    pub fn free_rows(&self) -> Vec<usize> {
        let pivots: Vec<usize> = self.pivots.iter().flatten().map(|p| p.0).collect();
        self.row_order.iter().copied().filter(|r| !pivots.contains(r)).collect()
    }

    /// Powers of `t` at the pivots, in processing order.
    pub fn pivot_powers(&self) -> Vec<Option<usize>> {
        self.pivots.iter().map(|p| p.map(|(_, n)| n)).collect()
    }
}

fn term(x: &Q, power: usize) -> String {
    let coeff = x.to_string();
    match power {
        0 => coeff,
        _ => {
            let t = if power == 1 { "t".to_string() } else { format!("t^{power}") };
            match coeff.as_str() {
                "1" => t,
                "-1" => format!("-{t}"),
                _ => format!("{coeff}{t}"),
            }
        }
    }
}

impl fmt::Display for Echelon {
    /// The reduced matrix with rows in reduction order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &r in &self.row_order {
            write!(f, "{} (deg {}):", self.matrix.row_labels[r], self.matrix.row_degrees[r])?;
            for (pos, col) in self.reduced.iter().enumerate() {
                let cdeg = self.matrix.col_degrees[self.col_order[pos]];
                let cell = col
                    .iter()
                    .find(|e| e.0 == r)
                    .map_or("0".to_string(), |(_, x)| term(x, cdeg - self.matrix.row_degrees[r]));
                write!(f, " {cell}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
