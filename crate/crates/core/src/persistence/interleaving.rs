use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use super::barcode;
use super::module::{Barcode, Interval, PersistenceModule};
use crate::error::{Error, Result};
use crate::field::Q;
use crate::matrix::Matrix;
use crate::tracespace::EdgePath;

/// A nonnegative rational or infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(Q),
    Infinity,
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinity) => Ordering::Less,
            (Extended::Infinity, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinity, Extended::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::Infinity => write!(f, "inf"),
        }
    }
}

/// Piecewise-constant family of matrices: the value at `t` is the entry
/// with the largest key `<= t`, and the zero map below the first key.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MapFamily {
    pub pieces: Vec<(Q, Matrix)>,
}

impl MapFamily {
    pub fn new(mut pieces: Vec<(Q, Matrix)>) -> Self {
        pieces.sort_by(|a, b| a.0.cmp(&b.0));
        MapFamily { pieces }
    }

    /// Samples `f` at every point; points must cover all breakpoints.
    pub fn sample(points: &BTreeSet<Q>, f: impl Fn(&Q) -> Matrix) -> Self {
        MapFamily { pieces: points.iter().map(|t| (t.clone(), f(t))).collect() }
    }

    pub fn at(&self, t: &Q, rows: usize, cols: usize) -> Matrix {
        match self.pieces.partition_point(|(k, _)| k <= t) {
            0 => Matrix::zeros(rows, cols),
            p => self.pieces[p - 1].1.clone(),
        }
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Q> {
        self.pieces.iter().map(|p| &p.0)
    }

    pub fn identity_on(m: &PersistenceModule) -> Self {
        MapFamily { pieces: m.indices.iter().zip(&m.dims).map(|(t, &d)| (t.clone(), Matrix::identity(d))).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterleavingCheck {
    pub holds: bool,
    /// First failing equation (1 to 4) with its indices.
    pub violation: Option<String>,
}

/// Points where some side of an interleaving equation can change.
fn grid(m: &PersistenceModule, n: &PersistenceModule, eps: &Q, families: &[&MapFamily]) -> Vec<Q> {
    let mut base: BTreeSet<Q> = m.indices.iter().chain(&n.indices).cloned().collect();
    for f in families {
        base.extend(f.breakpoints().cloned());
    }
    let two = eps + eps;
    let mut all = BTreeSet::new();
    for t in &base {
        all.insert(t.clone());
        all.insert(t - eps);
        all.insert(t - &two);
    }
    if let Some(lo) = all.first().cloned() {
        all.insert(lo - Q::one());
    }
    all.into_iter().collect()
}

/// Checks the four interleaving equations at every pair `i <= j` of
/// grid points; `phi_t: M_t -> N_{t+eps}` and `psi_t: N_t -> M_{t+eps}`.
pub fn verify_interleaving(
    m: &PersistenceModule,
    n: &PersistenceModule,
    eps: &Q,
    phi: &MapFamily,
    psi: &MapFamily,
) -> Result<InterleavingCheck> {
    if eps < &Q::zero() {
        return Err(Error::Precondition("epsilon must be nonnegative".into()));
    }
    let f = m.field;
    let pts = grid(m, n, eps, &[phi, psi]);
    let phi_at = |t: &Q| phi.at(t, n.dim_at(&(t + eps)), m.dim_at(t));
    let psi_at = |t: &Q| psi.at(t, m.dim_at(&(t + eps)), n.dim_at(t));
    for t in &pts {
        let (a, b) = (phi_at(t), psi_at(t));
        if a.shape() != (n.dim_at(&(t + eps)), m.dim_at(t)) || b.shape() != (m.dim_at(&(t + eps)), n.dim_at(t)) {
            return Err(Error::ShapeMismatch(format!("interleaving maps at {t} have the wrong shape")));
        }
    }
    let fail = |eq: usize, i: &Q, j: Option<&Q>| {
        let at = match j {
            Some(j) => format!("i = {i}, j = {j}"),
            None => format!("i = {i}"),
        };
        Ok(InterleavingCheck { holds: false, violation: Some(format!("equation ({eq}) fails at {at}")) })
    };
    let mul = |a: &Matrix, b: &Matrix| a.mul(b, f).expect("shapes checked");
    for (x, i) in pts.iter().enumerate() {
        let ie = i + eps;
        for j in &pts[x..] {
            let je = j + eps;
            if mul(&phi_at(j), &m.map_between(i, j)) != mul(&n.map_between(&ie, &je), &phi_at(i)) {
                return fail(1, i, Some(j));
            }
            if mul(&psi_at(j), &n.map_between(i, j)) != mul(&m.map_between(&ie, &je), &psi_at(i)) {
                return fail(2, i, Some(j));
            }
        }
        let i2 = &ie + eps;
        if mul(&psi_at(&ie), &phi_at(i)) != m.map_between(i, &i2) {
            return fail(3, i, None);
        }
        if mul(&phi_at(&ie), &psi_at(i)) != n.map_between(i, &i2) {
            return fail(4, i, None);
        }
    }
    Ok(InterleavingCheck { holds: true, violation: None })
}

/// `M` against `M` shifted down by `eps`, with the canonical maps.
pub fn shift_interleaving(m: &PersistenceModule, eps: &Q) -> (PersistenceModule, MapFamily, MapFamily) {
    let n = m.shifted(eps);
    let two = eps + eps;
    let mut pts: BTreeSet<Q> = BTreeSet::new();
    for t in &m.indices {
        pts.insert(t.clone());
        pts.insert(t - eps);
        pts.insert(t - &two);
    }
    let phi = MapFamily::sample(&pts, |t| m.map_between(t, &(t + &two)));
    let psi = MapFamily::sample(&pts, |t| {
        let d = n.dim_at(t);
        Matrix::identity(d)
    });
    (n, phi, psi)
}

fn half_length(iv: &Interval) -> Extended {
    match iv.length() {
        Some(l) => Extended::Finite(l / Q::from_integer(2.into())),
        None => Extended::Infinity,
    }
}

fn match_cost(a: &Interval, b: &Interval) -> Extended {
    let db = (&a.birth - &b.birth).abs();
    match (&a.death, &b.death) {
        (Some(x), Some(y)) => Extended::Finite(db.max((x - y).abs())),
        (None, None) => Extended::Finite(db),
        _ => Extended::Infinity,
    }
}

trait Abs {
    fn abs(self) -> Self;
}

impl Abs for Q {
    fn abs(self) -> Q {
        if self < Q::zero() {
            -self
        } else {
            self
        }
    }
}

/// Perfect matching between `a + diag(b)` and `b + diag(a)` using only
/// pairs of cost at most `delta`. Returns the partner in `b` of every
/// interval of `a` (or `None` for the diagonal).
fn feasible(a: &[Interval], b: &[Interval], delta: &Extended) -> Option<Vec<Option<usize>>> {
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    // left: a_0.., then diagonal copies for b; right: b_0.., then diagonal copies for a
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..na {
        for j in 0..nb {
            if &match_cost(&a[i], &b[j]) <= delta {
                adj[i].push(j);
            }
        }
        if &half_length(&a[i]) <= delta {
            adj[i].push(nb + i);
        }
    }
    for j in 0..nb {
        if &half_length(&b[j]) <= delta {
            adj[na + j].push(j);
        }
        for i in 0..na {
            adj[na + j].push(nb + i);
        }
    }
    let mut right_of: Vec<Option<usize>> = vec![None; n];
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], right_of: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if right_of[v].is_none_or(|w| augment(w, adj, seen, right_of)) {
                right_of[v] = Some(u);
                return true;
            }
        }
        false
    }
    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, &adj, &mut seen, &mut right_of) {
            return None;
        }
    }
    let mut partner = vec![None; na];
    for (v, u) in right_of.iter().enumerate() {
        if let Some(u) = u {
            if *u < na && v < nb {
                partner[*u] = Some(v);
            }
        }
    }
    Some(partner)
}

fn bottleneck(a: &Barcode, b: &Barcode) -> (Extended, Vec<Option<usize>>) {
    let (a, b) = (&a.intervals, &b.intervals);
    let mut cands: BTreeSet<Extended> = BTreeSet::new();
    cands.insert(Extended::Finite(Q::zero()));
    for x in a {
        cands.insert(half_length(x));
        for y in b {
            cands.insert(match_cost(x, y));
        }
    }
    for y in b {
        cands.insert(half_length(y));
    }
    for c in cands {
        if c == Extended::Infinity {
            break;
        }
        if let Some(p) = feasible(a, b, &c) {
            return (c, p);
        }
    }
    (Extended::Infinity, Vec::new())
}

/// Bottleneck distance between the barcodes of the two modules.
pub fn interleaving_distance(m: &PersistenceModule, n: &PersistenceModule) -> Result<Extended> {
    Ok(bottleneck(&barcode(m)?, &barcode(n)?).0)
}

/// Canonical maps between interval modules for a matching: a matched
/// pair `I -> J` contributes `1` at `t` when `t` lies in `I` and `t+eps`
/// in `J`.
pub fn matched_interval_maps(
    a: &Barcode,
    b: &Barcode,
    partner: &[Option<usize>],
    eps: &Q,
    field: crate::field::Field,
) -> (PersistenceModule, PersistenceModule, MapFamily, MapFamily) {
    let m = PersistenceModule::from_barcode(field, a);
    let n = PersistenceModule::from_barcode(field, b);
    let mut pts: BTreeSet<Q> = BTreeSet::new();
    for t in m.indices.iter().chain(&n.indices) {
        pts.insert(t.clone());
        pts.insert(t - eps);
    }
    let alive =
        |bc: &Barcode, t: &Q| -> Vec<usize> { (0..bc.len()).filter(|&k| bc.intervals[k].contains(t)).collect() };
    let build = |from: &Barcode, to: &Barcode, pairs: &[(usize, usize)]| {
        MapFamily::sample(&pts, |t| {
            let (src, dst) = (alive(from, t), alive(to, &(t + eps)));
            let mut mat = Matrix::zeros(dst.len(), src.len());
            for &(x, y) in pairs {
                if let (Some(c), Some(r)) = (src.iter().position(|&k| k == x), dst.iter().position(|&k| k == y)) {
                    mat[(r, c)] = Q::one();
                }
            }
            mat
        })
    };
    let pairs: Vec<(usize, usize)> = partner.iter().enumerate().filter_map(|(i, p)| p.map(|j| (i, j))).collect();
    let back: Vec<(usize, usize)> = pairs.iter().map(|&(i, j)| (j, i)).collect();
    let phi = build(a, b, &pairs);
    let psi = build(b, a, &back);
    (m, n, phi, psi)
}

/// Distance together with a verified interleaving at that distance.
pub fn certify_distance(m: &PersistenceModule, n: &PersistenceModule) -> Result<(Extended, Option<InterleavingCheck>)> {
    let (a, b) = (barcode(m)?, barcode(n)?);
    let (d, partner) = bottleneck(&a, &b);
    let Extended::Finite(eps) = &d else { return Ok((d, None)) };
    let (ma, nb, phi, psi) = matched_interval_maps(&a, &b, &partner, eps, m.field);
    let check = verify_interleaving(&ma, &nb, eps, &phi, &psi)?;
    Ok((d, Some(check)))
}

/// Minimum over all partial matchings, by exhaustive search.
pub fn bottleneck_oracle(a: &Barcode, b: &Barcode) -> Extended {
    fn go(i: usize, a: &[Interval], b: &[Interval], used: &mut Vec<bool>, worst: Extended, best: &mut Extended) {
        if worst >= *best {
            return;
        }
        if i == a.len() {
            let mut w = worst;
            for (j, y) in b.iter().enumerate() {
                if !used[j] {
                    w = w.max(half_length(y));
                }
            }
            if w < *best {
                *best = w;
            }
            return;
        }
        go(i + 1, a, b, used, worst.clone().max(half_length(&a[i])), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, a, b, used, worst.clone().max(match_cost(&a[i], &b[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = Extended::Infinity;
    let mut used = vec![false; b.len()];
    // an all-infinite answer still needs one complete pass
    go(0, &a.intervals, &b.intervals, &mut used, Extended::Finite(Q::zero()), &mut best);
    if best == Extended::Infinity {
        return Extended::Infinity;
    }
    best
}

/// `max(|u|, |v|)` when `q = u.p.v`, and `0` when `p` is not below `q`.
pub fn trace_poset_weight(p: &EdgePath, q: &EdgePath) -> usize {
    match crate::traceposet::leq(p, q) {
        Some((u, v)) => u.len().max(v.len()),
        None => 0,
    }
}
