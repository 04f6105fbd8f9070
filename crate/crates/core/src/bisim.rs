//! Bisimulations between poset-indexed diagrams of vector spaces.
//!
//! A relation is a set of triples `(x, eta, y)` with `eta: F(x) -> G(y)`
//! invertible. It is a bisimulation when every node of either diagram
//! occurs in it and every arrow out of `x` (resp. `y`) is matched by an
//! arrow out of `y` (resp. `x`) whose square with the triples commutes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diagram::VectDiagram;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub x: usize,
    pub eta: Matrix,
    pub y: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BisimRelation {
    pub triples: Vec<Triple>,
}

impl BisimRelation {
    pub fn identity(f: &VectDiagram) -> Self {
        let triples = (0..f.len()).map(|x| Triple { x, eta: Matrix::identity(f.dims[x]), y: x }).collect();
        BisimRelation { triples }
    }

    /// Swaps the sides, inverting every matrix.
    pub fn transposed(&self, field: Field) -> Result<Self> {
        let triples = self
            .triples
            .iter()
            .map(|t| {
                let eta =
                    t.eta.inverse(field).ok_or_else(|| Error::NotInvertible(format!("triple ({}, {})", t.x, t.y)))?;
                Ok(Triple { x: t.y, eta, y: t.x })
            })
            .collect::<Result<_>>()?;
        Ok(BisimRelation { triples })
    }

    /// One line per triple: `x ~ y: [matrix]`.
    pub fn to_text(&self, f: &VectDiagram, g: &VectDiagram) -> String {
        self.triples.iter().map(|t| format!("{} ~ {}: {}\n", f.labels[t.x], g.labels[t.y], t.eta)).collect()
    }

    pub fn parse(text: &str, f: &VectDiagram, g: &VectDiagram) -> Result<Self> {
        let mut triples = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| Error::Syntax { line: k + 1, column: 1, message: m.to_string() };
            let (pair, m) = line.split_once(": [").ok_or_else(|| err("expected `x ~ y: [..]`"))?;
            let (a, b) = pair.split_once(" ~ ").ok_or_else(|| err("expected `x ~ y`"))?;
            let x = f.node(a.trim()).ok_or_else(|| err("unknown node on the left"))?;
            let y = g.node(b.trim()).ok_or_else(|| err("unknown node on the right"))?;
            let eta = Matrix::parse(&format!("[{m}"), g.dims[y], f.dims[x])?;
            triples.push(Triple { x, eta, y });
        }
        Ok(BisimRelation { triples })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Composites out of every node, identities included.
fn reach(d: &VectDiagram) -> Vec<BTreeMap<usize, Matrix>> {
    (0..d.len()).map(|a| d.maps_from(a)).collect()
}

fn check_typed(f: &VectDiagram, g: &VectDiagram, r: &BisimRelation) -> Result<()> {
    if f.field != g.field {
        return Err(Error::IllTypedRelation("diagrams over different fields".into()));
    }
    for t in &r.triples {
        if t.x >= f.len() || t.y >= g.len() {
            return Err(Error::IllTypedRelation(format!("triple ({}, {}) names a missing node", t.x, t.y)));
        }
        if f.dims[t.x] != g.dims[t.y] || t.eta.shape() != (g.dims[t.y], f.dims[t.x]) {
            return Err(Error::IllTypedRelation(format!(
                "{} ~ {}: dimensions do not match",
                f.labels[t.x], g.labels[t.y]
            )));
        }
        if !t.eta.is_invertible(f.field) {
            return Err(Error::IllTypedRelation(format!(
                "{} ~ {}: matrix is not invertible",
                f.labels[t.x], g.labels[t.y]
            )));
        }
    }
    Ok(())
}

/// State shared by verification and refinement: both diagrams, their
/// composites, and the triples indexed by either end.
struct Transfer<'a> {
    f: &'a VectDiagram,
    g: &'a VectDiagram,
    reach_f: Vec<BTreeMap<usize, Matrix>>,
    reach_g: Vec<BTreeMap<usize, Matrix>>,
}

impl<'a> Transfer<'a> {
    fn new(f: &'a VectDiagram, g: &'a VectDiagram) -> Self {
        Transfer { f, g, reach_f: reach(f), reach_g: reach(g) }
    }

    /// First cover out of either end of `triples[t]` that no live triple
    /// matches, described in words.
    fn failure(
        &self,
        triples: &[Triple],
        alive: &[bool],
        by_x: &[Vec<usize>],
        by_y: &[Vec<usize>],
        t: usize,
    ) -> Option<String> {
        let field = self.f.field;
        let Triple { x, eta, y } = &triples[t];
        for &k in self.f.out_covers(*x) {
            let c = &self.f.covers[k];
            let ok = by_x[c.to].iter().filter(|&&s| alive[s]).any(|&s| {
                let s = &triples[s];
                self.reach_g[*y]
                    .get(&s.y)
                    .is_some_and(|gj| s.eta.mul(&c.matrix, field).unwrap() == gj.mul(eta, field).unwrap())
            });
            if !ok {
                return Some(format!(
                    "triple {} ~ {}: arrow {} -> {} has no matching arrow",
                    self.f.labels[*x], self.g.labels[*y], self.f.labels[*x], self.f.labels[c.to]
                ));
            }
        }
        for &k in self.g.out_covers(*y) {
            let c = &self.g.covers[k];
            let ok = by_y[c.to].iter().filter(|&&s| alive[s]).any(|&s| {
                let s = &triples[s];
                self.reach_f[*x]
                    .get(&s.x)
                    .is_some_and(|fi| s.eta.mul(fi, field).unwrap() == c.matrix.mul(eta, field).unwrap())
            });
            if !ok {
                return Some(format!(
                    "triple {} ~ {}: arrow {} -> {} has no matching arrow",
                    self.f.labels[*x], self.g.labels[*y], self.g.labels[*y], self.g.labels[c.to]
                ));
            }
        }
        None
    }
}

fn index_by(n: usize, triples: &[Triple], end: impl Fn(&Triple) -> usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n];
    for (i, t) in triples.iter().enumerate() {
        out[end(t)].push(i);
    }
    out
}

fn totality(f: &VectDiagram, g: &VectDiagram, triples: &[Triple], alive: &[bool]) -> Option<String> {
    let mut seen_x = vec![false; f.len()];
    let mut seen_y = vec![false; g.len()];
    for (t, _) in triples.iter().zip(alive).filter(|(_, &a)| a) {
        seen_x[t.x] = true;
        seen_y[t.y] = true;
    }
    if let Some(x) = seen_x.iter().position(|s| !s) {
        return Some(format!("node {} of the first diagram is unrelated", f.labels[x]));
    }
    if let Some(y) = seen_y.iter().position(|s| !s) {
        return Some(format!("node {} of the second diagram is unrelated", g.labels[y]));
    }
    None
}

/// Checks both conditions, with transfer tested on covering arrows of the
/// moving side against every arrow (composites and identities) of the
/// other side.
pub fn verify_bisimulation(f: &VectDiagram, g: &VectDiagram, r: &BisimRelation) -> Result<Verdict> {
    check_typed(f, g, r)?;
    let alive = vec![true; r.triples.len()];
    if let Some(why) = totality(f, g, &r.triples, &alive) {
        return Ok(Verdict::Fails(why));
    }
    let tr = Transfer::new(f, g);
    let by_x = index_by(f.len(), &r.triples, |t| t.x);
    let by_y = index_by(g.len(), &r.triples, |t| t.y);
    for t in 0..r.triples.len() {
        if let Some(why) = tr.failure(&r.triples, &alive, &by_x, &by_y, t) {
            return Ok(Verdict::Fails(why));
        }
    }
    Ok(Verdict::Holds)
}

/// Where candidate isomorphisms come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discipline {
    /// Signed permutation matrices.
    SignedPermutation,
    /// Every invertible matrix over the diagrams' prime field.
    FullLinear,
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Discipline::SignedPermutation => "signed-perm",
            Discipline::FullLinear => "full-linear",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(BisimRelation),
    /// `exhaustive` is set when no bisimulation exists at all, not just
    /// none within the discipline.
    NotFound {
        exhaustive: bool,
        reason: String,
    },
    /// The candidate set exceeded the cap.
    Inconclusive(String),
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Candidate isomorphisms of `k^n` under a discipline, without repeats.
pub fn candidate_isos(n: usize, field: Field, d: Discipline, cap: usize) -> Result<Vec<Matrix>> {
    let mut out = BTreeSet::new();
    match d {
        Discipline::SignedPermutation => {
            for p in permutations(n) {
                for signs in 0..1u32 << n {
                    let mut m = Matrix::zeros(n, n);
                    for (j, &i) in p.iter().enumerate() {
                        m[(i, j)] = field.from_int(if signs >> j & 1 == 1 { -1 } else { 1 });
                    }
                    out.insert(m.to_string());
                    if out.len() > cap {
                        return Err(Error::CapExceeded { what: "candidate isomorphisms", count: out.len(), cap });
                    }
                }
            }
        }
        Discipline::FullLinear => {
            let Field::Prime(p) = field else {
                return Err(Error::Precondition("the full linear discipline needs a prime field".into()));
            };
            let total = (p as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
            if total > cap as u128 * 4 {
                return Err(Error::CapExceeded {
                    what: "candidate isomorphisms",
                    count: total.min(usize::MAX as u128) as usize,
                    cap,
                });
            }
            for code in 0..total as u64 {
                let mut m = Matrix::zeros(n, n);
                let mut c = code;
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = field.from_int((c % p as u64) as i64);
                        c /= p as u64;
                    }
                }
                if m.is_invertible(field) {
                    out.insert(m.to_string());
                    if out.len() > cap {
                        return Err(Error::CapExceeded { what: "candidate isomorphisms", count: out.len(), cap });
                    }
                }
            }
        }
    }
    out.into_iter().map(|s| Matrix::parse(&s, n, n)).collect()
}

/// `(rank, target dimension)` of every covering arrow out of `a`.
fn cover_signature(d: &VectDiagram, a: usize) -> BTreeSet<(usize, usize)> {
    d.out_covers(a).iter().map(|&k| (d.covers[k].matrix.rank(d.field), d.dims[d.covers[k].to])).collect()
}

/// The same over every arrow out of `a`, identity included.
fn arrow_signature(d: &VectDiagram, maps: &BTreeMap<usize, Matrix>) -> BTreeSet<(usize, usize)> {
    maps.iter().map(|(&b, m)| (m.rank(d.field), d.dims[b])).collect()
}

/// Whether the discipline's negatives rule out every bisimulation.
///
/// With all spaces of dimension at most one and every cover a scalar in
/// {0, 1, -1}, replacing each scalar of a bisimulation by its sign (over
/// the rationals, or in GF(2) and GF(3) where the units are {1, -1})
/// gives another bisimulation, so signed permutations suffice.
fn discipline_is_exhaustive(f: &VectDiagram, g: &VectDiagram, d: Discipline) -> bool {
    match d {
        Discipline::FullLinear => true,
        Discipline::SignedPermutation => {
            let small_units = matches!(f.field, Field::Rational | Field::Prime(2) | Field::Prime(3));
            let unit = |d: &VectDiagram| {
                d.dims.iter().all(|&k| k <= 1)
                    && d.covers.iter().all(|c| {
                        c.matrix.rank(d.field) == 0 || {
                            let e = &c.matrix[(0, 0)];
                            *e == d.field.one() || *e == d.field.from_int(-1)
                        }
                    })
            };
            small_units && unit(f) && unit(g)
        }
    }
}

/// Largest bisimulation built from candidate triples, by deleting
/// triples whose transfer fails until nothing changes.
///
/// Candidates pair nodes of equal dimension whose covering arrows can be
/// matched by rank and target dimension, with every isomorphism the
/// discipline offers. Node dimensions above `max_dim` are refused.
pub fn search_bisimulation(
    f: &VectDiagram,
    g: &VectDiagram,
    discipline: Discipline,
    max_dim: usize,
    cap: usize,
) -> Result<SearchOutcome> {
    if f.field != g.field {
        return Err(Error::IllTypedRelation("diagrams over different fields".into()));
    }
    let dims_g: BTreeSet<usize> = g.dims.iter().copied().collect();
    let dims_f: BTreeSet<usize> = f.dims.iter().copied().collect();
    for (d, other, side) in [(f, &dims_g, "first"), (g, &dims_f, "second")] {
        if let Some(a) = (0..d.len()).find(|&a| !other.contains(&d.dims[a])) {
            return Ok(SearchOutcome::NotFound {
                exhaustive: true,
                reason: format!(
                    "node {} of the {side} diagram has dimension {}, which the other diagram never takes",
                    d.labels[a], d.dims[a]
                ),
            });
        }
    }
    if let Some(&k) = f.dims.iter().chain(&g.dims).find(|&&k| k > max_dim) {
        return Err(Error::Precondition(format!("dimension {k} exceeds the search bound {max_dim}")));
    }
    let tr = Transfer::new(f, g);
    let sig_f: Vec<_> = (0..f.len()).map(|a| (cover_signature(f, a), arrow_signature(f, &tr.reach_f[a]))).collect();
    let sig_g: Vec<_> = (0..g.len()).map(|a| (cover_signature(g, a), arrow_signature(g, &tr.reach_g[a]))).collect();
    let mut isos: BTreeMap<usize, Vec<Matrix>> = BTreeMap::new();
    let mut triples = Vec::new();
    for x in 0..f.len() {
        for y in 0..g.len() {
            let k = f.dims[x];
            if k != g.dims[y] || !sig_f[x].0.is_subset(&sig_g[y].1) || !sig_g[y].0.is_subset(&sig_f[x].1) {
                continue;
            }
            if !isos.contains_key(&k) {
                match candidate_isos(k, f.field, discipline, cap) {
                    Ok(c) => isos.insert(k, c),
                    Err(Error::CapExceeded { count, .. }) => {
                        return Ok(SearchOutcome::Inconclusive(format!(
                            "{count} candidate isomorphisms in dimension {k}"
                        )))
                    }
                    Err(e) => return Err(e),
                };
            }
            for eta in &isos[&k] {
                triples.push(Triple { x, eta: eta.clone(), y });
                if triples.len() > cap {
                    return Ok(SearchOutcome::Inconclusive(format!("more than {cap} candidate triples")));
                }
            }
        }
    }
    let by_x = index_by(f.len(), &triples, |t| t.x);
    let by_y = index_by(g.len(), &triples, |t| t.y);
    let mut alive = vec![true; triples.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for t in 0..triples.len() {
            if alive[t] && tr.failure(&triples, &alive, &by_x, &by_y, t).is_some() {
                alive[t] = false;
                changed = true;
            }
        }
    }
    if let Some(reason) = totality(f, g, &triples, &alive) {
        return Ok(SearchOutcome::NotFound { exhaustive: discipline_is_exhaustive(f, g, discipline), reason });
    }
    let relation =
        BisimRelation { triples: triples.into_iter().zip(alive).filter(|(_, a)| *a).map(|(t, _)| t).collect() };
    debug_assert!(verify_bisimulation(f, g, &relation).unwrap().holds());
    Ok(SearchOutcome::Found(relation))
}
