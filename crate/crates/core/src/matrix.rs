//! Dense and sparse matrices over a [`Field`].

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{parse_q, Field, Q};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Vec<Q>>) -> Result<Self> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!("expected a {rows}x{cols} matrix")));
        }
        Ok(Matrix { rows, cols, data: entries.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| crate::field::q(x))).collect();
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn normalized(mut self, field: Field) -> Self {
        for x in &mut self.data {
            *x = field.normalize(std::mem::take(x));
        }
        self
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix, field: Field) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let v = field.add(&out[(i, j)], &field.mul(a, b));
                        out[(i, j)] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Q], field: Field) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = field.add(&acc, &field.mul(a, b));
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self, field: Field) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = field.inv(&m[(r, c)]).expect("nonzero pivot");
            for j in 0..m.cols {
                let v = field.mul(&m[(r, j)], &inv);
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in 0..m.cols {
                    let v = field.sub(&m[(i, j)], &field.mul(&f, &m[(r, j)]));
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, field: Field) -> usize {
        self.rref(field).1.len()
    }

    pub fn is_invertible(&self, field: Field) -> bool {
        self.is_square() && self.rank(field) == self.rows
    }

    pub fn inverse(&self, field: Field) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Q::one();
        }
        let (red, pivots) = aug.rref(field);
        if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = red[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Basis of the null space, one column vector per free column.
    pub fn kernel(&self, field: Field) -> Vec<Vec<Q>> {
        let (red, pivots) = self.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = field.neg(&red[(r, f)]);
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Parses `[a b; c d]` with a known shape, so that empty matrices keep it.
    pub fn parse(text: &str, rows: usize, cols: usize) -> Result<Matrix> {
        let bad = |m: &str| Error::ShapeMismatch(format!("matrix `{text}`: {m}"));
        let inner =
            text.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(|| bad("missing brackets"))?;
        let mut entries = Vec::new();
        if rows * cols > 0 {
            for row in inner.split(';') {
                let parsed: Option<Vec<Q>> = row.split_whitespace().map(parse_q).collect();
                entries.push(parsed.ok_or_else(|| bad("bad entry"))?);
            }
        } else if !inner.trim().is_empty() {
            return Err(bad("expected no entries"));
        }
        if rows * cols == 0 {
            return Ok(Self::zeros(rows, cols));
        }
        Self::from_rows(rows, cols, entries).map_err(|_| bad("wrong shape"))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows * self.cols == 0 {
            return write!(f, "[]");
        }
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

/// Sparse vector: strictly increasing indices, nonzero values.
pub type SparseVec = Vec<(usize, Q)>;

/// `a + c * b` for sparse vectors.
pub fn axpy(a: &SparseVec, c: &Q, b: &SparseVec, field: Field) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, field.mul(c, &b[j].1)));
            j += 1;
        } else {
            let v = field.add(&a[i].1, &field.mul(c, &b[j].1));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Column-sparse matrix, the storage used for boundary operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, cols: vec![Vec::new(); ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    /// Builds a column from unsorted entries, summing repeats.
    pub fn column_from(entries: impl IntoIterator<Item = (usize, Q)>, field: Field) -> SparseVec {
        let mut v: Vec<(usize, Q)> = entries.into_iter().collect();
        v.sort_by_key(|e| e.0);
        let mut out: SparseVec = Vec::with_capacity(v.len());
        for (i, x) in v {
            let x = field.normalize(x);
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 = field.add(&last.1, &x),
                _ => out.push((i, x)),
            }
        }
        out.retain(|e| !e.1.is_zero());
        out
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.nrows, self.ncols());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, x) in col {
                m[(*i, j)] = x.clone();
            }
        }
        m
    }

    pub fn from_dense(m: &Matrix) -> Self {
        let cols = (0..m.cols())
            .map(|j| (0..m.rows()).filter(|&i| !m[(i, j)].is_zero()).map(|i| (i, m[(i, j)].clone())).collect())
            .collect();
        SparseMatrix { nrows: m.rows(), cols }
    }

    pub fn apply(&self, v: &SparseVec, field: Field) -> SparseVec {
        let mut acc = SparseVec::new();
        for (j, c) in v {
            acc = axpy(&acc, c, &self.cols[*j], field);
        }
        acc
    }

    pub fn mul(&self, other: &SparseMatrix, field: Field) -> SparseMatrix {
        assert_eq!(self.ncols(), other.nrows);
        SparseMatrix { nrows: self.nrows, cols: other.cols.iter().map(|c| self.apply(c, field)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn rank(&self, field: Field) -> usize {
        let mut red = Reducer::new(field);
        self.cols.iter().filter(|c| red.insert(c.to_vec()).is_none()).count()
    }
}

/// Incremental column reduction with "lowest nonzero" pivots.
///
/// `insert` reduces a vector against the stored pivots and either stores it
/// (returning `None`) or reports how it decomposes. Every stored column
/// carries a tag recording its combination of the inserted inputs.
#[derive(Clone, Debug)]
pub struct Reducer {
    field: Field,
    pivot_of_row: std::collections::HashMap<usize, usize>,
    columns: Vec<(SparseVec, SparseVec)>,
}

impl Reducer {
    pub fn new(field: Field) -> Self {
        Reducer { field, pivot_of_row: Default::default(), columns: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Reduces `v` and returns the remainder together with the combination
    /// of stored columns that was subtracted, as a map column index -> coeff.
    pub fn reduce(&self, mut v: SparseVec) -> (SparseVec, SparseVec) {
        let f = self.field;
        let mut used = SparseVec::new();
        while let Some((low, x)) = v.last().cloned() {
            let Some(&k) = self.pivot_of_row.get(&low) else { break };
            let (col, _) = &self.columns[k];
            let c = f.div(&x, &col.last().unwrap().1).unwrap();
            v = axpy(&v, &f.neg(&c), col, f);
            used = axpy(&used, &c, &vec![(k, Q::one())], f);
        }
        (v, used)
    }

    /// Stores `v` with the given tag when it is independent. Returns the
    /// dependency (as stored-column coefficients) when it is not.
    pub fn insert_tagged(&mut self, v: SparseVec, tag: SparseVec) -> Option<SparseVec> {
        let (rest, used) = self.reduce(v);
        if rest.is_empty() {
            return Some(used);
        }
        // keep the tag consistent: rest = v - sum used_k * col_k
        let f = self.field;
        let mut t = tag;
        for (k, c) in &used {
            t = axpy(&t, &f.neg(c), &self.columns[*k].1, f);
        }
        self.pivot_of_row.insert(rest.last().unwrap().0, self.columns.len());
        self.columns.push((rest, t));
        None
    }

    pub fn insert(&mut self, v: SparseVec) -> Option<SparseVec> {
        let id = self.columns.len();
        self.insert_tagged(v, vec![(id, Q::one())])
    }

    pub fn column(&self, k: usize) -> &SparseVec {
        &self.columns[k].0
    }

    pub fn tag(&self, k: usize) -> &SparseVec {
        &self.columns[k].1
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;
    use proptest::prelude::*;

    #[test]
    fn display_and_parse_round_trip() {
        let m = Matrix::from_i64(&[&[1, -1], &[0, 2]]);
        assert_eq!(m.to_string(), "[1 -1; 0 2]");
        assert_eq!(Matrix::parse("[1 -1; 0 2]", 2, 2).unwrap(), m);
        assert_eq!(Matrix::zeros(0, 3).to_string(), "[]");
        assert_eq!(Matrix::parse("[]", 0, 3).unwrap(), Matrix::zeros(0, 3));
        assert!(Matrix::parse("[1 2]", 2, 1).is_err());
    }

    #[test]
    fn inverse_of_upper_triangular() {
        let m = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        let inv = m.inverse(Field::Rational).unwrap();
        assert_eq!(inv, Matrix::from_i64(&[&[1, -1], &[0, 1]]));
        let two = Matrix::from_i64(&[&[2, 0], &[0, 1]]).normalized(Field::Prime(2));
        assert!(two.inverse(Field::Prime(2)).is_none());
    }

    #[test]
    fn kernel_of_boundary() {
        // boundary of a triangle's edges in terms of its vertices
        let d = Matrix::from_i64(&[&[-1, -1, 0], &[1, 0, -1], &[0, 1, 1]]);
        let k = d.kernel(Field::Rational);
        assert_eq!(k.len(), 1);
        assert!(d.apply(&k[0], Field::Rational).iter().all(Zero::is_zero));
    }

    fn small_matrix(r: usize, c: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-2i64..3, r * c).prop_map(move |v| {
            let rows: Vec<Vec<Q>> = v.chunks(c.max(1)).take(r).map(|ch| ch.iter().map(|&x| q(x)).collect()).collect();
            Matrix::from_rows(r, c, if c == 0 { vec![vec![]; r] } else { rows }).unwrap()
        })
    }

    proptest! {
        #[test]
        fn sparse_rank_matches_dense(m in small_matrix(4, 5), p in prop_oneof![Just(0u64), Just(2), Just(3)]) {
            let f = Field::from_characteristic(p).unwrap();
            let m = m.normalized(f);
            prop_assert_eq!(SparseMatrix::from_dense(&m).rank(f), m.rank(f));
            prop_assert_eq!(m.rank(f), m.transpose().rank(f));
        }

        #[test]
        fn inverse_is_two_sided(m in small_matrix(3, 3)) {
            let f = Field::Rational;
            if let Some(inv) = m.inverse(f) {
                prop_assert_eq!(m.mul(&inv, f).unwrap(), Matrix::identity(3));
                prop_assert_eq!(inv.mul(&m, f).unwrap(), Matrix::identity(3));
            } else {
                prop_assert!(m.rank(f) < 3);
            }
        }

        #[test]
        fn reducer_tags_track_combinations(m in small_matrix(4, 6)) {
            let f = Field::Rational;
            let sm = SparseMatrix::from_dense(&m);
            let mut red = Reducer::new(f);
            for (j, c) in sm.cols.iter().enumerate() {
                red.insert_tagged(c.clone(), vec![(j, Q::one())]);
            }
            for k in 0..red.len() {
                prop_assert_eq!(sm.apply(red.tag(k), f), red.column(k).clone());
            }
        }
    }
}
