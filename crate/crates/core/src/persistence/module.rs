use std::cmp::Ordering;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::field::{parse_q, Field, Q};
use crate::matrix::Matrix;

/// A finite sequence of vector spaces over increasing rational indices.
///
/// The module is zero below the first index and constant on each
/// half-open step `[indices[i], indices[i+1])`. With `tail` set it stays
/// constant after the last index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistenceModule {
    pub field: Field,
    pub indices: Vec<Q>,
    pub dims: Vec<usize>,
    /// `maps[i]` goes from the space at `indices[i]` to the next one.
    pub maps: Vec<Matrix>,
    pub tail: bool,
}

impl PersistenceModule {
    pub fn new(field: Field, indices: Vec<Q>, dims: Vec<usize>, maps: Vec<Matrix>, tail: bool) -> Result<Self> {
        if indices.len() != dims.len() || maps.len() + 1 != dims.len().max(1) {
            return Err(Error::ShapeMismatch("need one space per index and one map per step".into()));
        }
        if let Some(i) = indices.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NonMonotone(i + 1));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.shape() != (dims[i + 1], dims[i]) {
                return Err(Error::ShapeMismatch(format!("map {i} has shape {:?}", m.shape())));
            }
        }
        let maps = maps.into_iter().map(|m| m.normalized(field)).collect();
        Ok(PersistenceModule { field, indices, dims, maps, tail })
    }

    /// Indexed by `0, 1, ..., n-1` and constant afterwards.
    pub fn over_naturals(field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self> {
        let indices = (0..dims.len()).map(|i| Q::from_integer((i as i64).into())).collect();
        Self::new(field, indices, dims, maps, true)
    }

    pub fn zero(field: Field) -> Self {
        PersistenceModule { field, indices: Vec::new(), dims: Vec::new(), maps: Vec::new(), tail: true }
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Position of the step containing `t`, if `t` is not below the first index.
    pub fn step(&self, t: &Q) -> Option<usize> {
        match self.indices.partition_point(|x| x <= t) {
            0 => None,
            p => Some(p - 1),
        }
    }

    pub fn dim_at(&self, t: &Q) -> usize {
        self.step(t).map_or(0, |i| self.dims[i])
    }

    /// The structure map from `M_s` to `M_t`, `s <= t`.
    pub fn map_between(&self, s: &Q, t: &Q) -> Matrix {
        assert!(s <= t, "structure maps go upwards");
        match (self.step(s), self.step(t)) {
            (None, _) => Matrix::zeros(self.dim_at(t), 0),
            (Some(i), Some(j)) => self.composite(i, j),
            (Some(_), None) => unreachable!(),
        }
    }

    /// Composite of the listed maps from step `i` to step `j`.
    pub fn composite(&self, i: usize, j: usize) -> Matrix {
        let mut m = Matrix::identity(self.dims[i]);
        for k in i..j {
            m = self.maps[k].mul(&m, self.field).expect("shapes checked at construction");
        }
        m
    }

    /// True when the tail flag is set or the last listed map is invertible.
    pub fn is_stabilized(&self) -> bool {
        self.tail || self.maps.last().is_some_and(|m| m.is_invertible(self.field)) || self.is_empty()
    }

    /// Reindexes through a strictly increasing embedding of the positions.
    pub fn complete_to_real(&self, embedding: &[Q]) -> Result<PersistenceModule> {
        if embedding.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "embedding has {} values for {} indices",
                embedding.len(),
                self.len()
            )));
        }
        if let Some(i) = embedding.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NonMonotone(i + 1));
        }
        let mut out = self.clone();
        out.indices = embedding.to_vec();
        Ok(out)
    }

    /// The direct sum of interval modules, with basis ordered like the
    /// sorted intervals.
    pub fn from_barcode(field: Field, barcode: &Barcode) -> PersistenceModule {
        let mut indices: Vec<Q> =
            barcode.intervals.iter().flat_map(|iv| std::iter::once(iv.birth.clone()).chain(iv.death.clone())).collect();
        indices.sort();
        indices.dedup();
        let alive: Vec<Vec<usize>> = indices
            .iter()
            .map(|t| (0..barcode.intervals.len()).filter(|&k| barcode.intervals[k].contains(t)).collect())
            .collect();
        let dims = alive.iter().map(Vec::len).collect();
        let maps = alive
            .windows(2)
            .map(|w| {
                let mut m = Matrix::zeros(w[1].len(), w[0].len());
                for (c, k) in w[0].iter().enumerate() {
                    if let Some(r) = w[1].iter().position(|x| x == k) {
                        m[(r, c)] = Q::one();
                    }
                }
                m
            })
            .collect();
        PersistenceModule { field, indices, dims, maps, tail: true }
    }

    /// `N_t = M_{t+eps}`.
    pub fn shifted(&self, eps: &Q) -> PersistenceModule {
        let mut out = self.clone();
        out.indices = self.indices.iter().map(|t| t - eps).collect();
        out
    }
}

/// Half-open interval `[birth, death)`; `death = None` means infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub birth: Q,
    pub death: Option<Q>,
}

impl Interval {
    pub fn new(birth: Q, death: Option<Q>) -> Self {
        Interval { birth, death }
    }

    pub fn finite(b: i64, d: i64) -> Self {
        Interval { birth: Q::from_integer(b.into()), death: Some(Q::from_integer(d.into())) }
    }

    pub fn infinite(b: i64) -> Self {
        Interval { birth: Q::from_integer(b.into()), death: None }
    }

    pub fn contains(&self, t: &Q) -> bool {
        &self.birth <= t && self.death.as_ref().is_none_or(|d| t < d)
    }

    pub fn length(&self) -> Option<Q> {
        self.death.as_ref().map(|d| d - &self.birth)
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.birth.cmp(&other.birth).then_with(|| match (&self.death, &other.death) {
            (Some(a), Some(b)) => a.cmp(b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        })
    }
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.death {
            Some(d) => write!(f, "[{}, {})", self.birth, d),
            None => write!(f, "[{}, inf)", self.birth),
        }
    }
}

/// Multiset of intervals, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Barcode {
    pub intervals: Vec<Interval>,
}

impl Barcode {
    pub fn new(mut intervals: Vec<Interval>) -> Self {
        intervals.retain(|iv| iv.death.as_ref().is_none_or(|d| d > &iv.birth));
        intervals.sort();
        Barcode { intervals }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn dim_at(&self, t: &Q) -> usize {
        self.intervals.iter().filter(|iv| iv.contains(t)).count()
    }

    /// Number of intervals alive at both `s` and `t`.
    pub fn rank_between(&self, s: &Q, t: &Q) -> usize {
        self.intervals.iter().filter(|iv| iv.contains(s) && iv.contains(t)).count()
    }

    /// Pushes every endpoint through a monotone map.
    pub fn map_endpoints(&self, f: impl Fn(&Q) -> Q) -> Barcode {
        Barcode::new(self.intervals.iter().map(|iv| Interval::new(f(&iv.birth), iv.death.as_ref().map(&f))).collect())
    }

    pub fn parse(text: &str) -> Result<Barcode> {
        let mut out = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Syntax { line: k + 1, column: 1, message: m.to_string() };
            let inner =
                line.strip_prefix('[').and_then(|l| l.strip_suffix(')')).ok_or_else(|| err("expected `[b, d)`"))?;
            let (b, d) = inner.split_once(',').ok_or_else(|| err("expected `,`"))?;
            let birth = parse_q(b).ok_or_else(|| err("bad birth"))?;
            let death = match d.trim() {
                "inf" => None,
                d => Some(parse_q(d).ok_or_else(|| err("bad death"))?),
            };
            if death.as_ref().is_some_and(|d| d <= &birth) {
                return Err(err("empty interval"));
            }
            out.push(Interval::new(birth, death));
        }
        Ok(Barcode::new(out))
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}
