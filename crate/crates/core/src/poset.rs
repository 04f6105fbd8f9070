//! Finite posets, their maximal chains and chain diagrams.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Order access shared by dense posets and trace posets.
pub trait HasseOrder {
    fn size(&self) -> usize;
    fn leq(&self, a: usize, b: usize) -> bool;
    /// Elements covering `a`, ascending.
    fn covers_up(&self, a: usize) -> &[usize];
    /// Elements covered by `a`, ascending.
    fn covers_down(&self, a: usize) -> &[usize];

    fn minimal(&self) -> Vec<usize> {
        (0..self.size()).filter(|&a| self.covers_down(a).is_empty()).collect()
    }

    fn maximal(&self) -> Vec<usize> {
        (0..self.size()).filter(|&a| self.covers_up(a).is_empty()).collect()
    }
}

/// Poset on `0..n` with a dense order matrix and labelled elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    pub labels: Vec<String>,
    order: Vec<Vec<bool>>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

impl Poset {
    /// Order generated by `relations` (pairs `a <= b`), closed reflexively
    /// and transitively.
    pub fn from_relations(labels: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut order = vec![vec![false; n]; n];
        for (a, row) in order.iter_mut().enumerate() {
            row[a] = true;
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(Error::Precondition(format!("relation ({a}, {b}) outside 0..{n}")));
            }
            order[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if order[i][k] {
                    for j in 0..n {
                        if order[k][j] {
                            order[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if order[i][j] && order[j][i] {
                    return Err(Error::Antisymmetry(i, j));
                }
            }
        }
        Ok(Self::from_order(labels, order))
    }

    fn from_order(labels: Vec<String>, order: Vec<Vec<bool>>) -> Self {
        let n = labels.len();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                if a != b && order[a][b] && !(0..n).any(|c| c != a && c != b && order[a][c] && order[c][b]) {
                    up[a].push(b);
                    down[b].push(a);
                }
            }
        }
        Poset { labels, order, up, down }
    }

    /// Total order on the given labels, in list order.
    pub fn chain(labels: Vec<String>) -> Self {
        let rel: Vec<(usize, usize)> = (1..labels.len()).map(|i| (i - 1, i)).collect();
        Self::from_relations(labels, &rel).expect("a chain is a poset")
    }

    /// Induced sub-poset on `keep` (in the given order), with the same labels.
    pub fn restrict(&self, keep: &[usize]) -> Poset {
        let labels = keep.iter().map(|&a| self.labels[a].clone()).collect();
        let order = keep.iter().map(|&a| keep.iter().map(|&b| self.order[a][b]).collect()).collect();
        Self::from_order(labels, order)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Strict relations `a < b`.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|a| (0..n).filter(move |&b| a != b).map(move |b| (a, b)))
            .filter(|&(a, b)| self.order[a][b])
            .collect()
    }

    /// Same labels with the same strict order, ignoring element positions.
    pub fn same_as(&self, other: &Poset) -> bool {
        let pos: HashMap<&str, usize> = other.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if self.len() != other.len() || pos.len() != other.len() {
            return false;
        }
        let Some(map) = self.labels.iter().map(|l| pos.get(l.as_str()).copied()).collect::<Option<Vec<usize>>>() else {
            return false;
        };
        (0..self.len()).all(|a| (0..self.len()).all(|b| self.order[a][b] == other.order[map[a]][map[b]]))
    }

    pub fn is_chain(&self, set: &[usize]) -> bool {
        set.iter().all(|&a| set.iter().all(|&b| self.order[a][b] || self.order[b][a]))
    }

    /// Hasse diagram as text, one covering pair per line.
    pub fn hasse_text(&self) -> String {
        let mut out = String::new();
        for a in 0..self.len() {
            for &b in &self.up[a] {
                out.push_str(&format!("{} < {}\n", self.labels[a], self.labels[b]));
            }
        }
        out
    }
}

impl HasseOrder for Poset {
    fn size(&self) -> usize {
        self.len()
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.order[a][b]
    }

    fn covers_up(&self, a: usize) -> &[usize] {
        &self.up[a]
    }

    fn covers_down(&self, a: usize) -> &[usize] {
        &self.down[a]
    }
}

/// Saturated walks from `from` along `step`, appended to `out`.
fn walks(from: usize, step: impl Fn(usize) -> Vec<usize>, cap: usize, out: &mut Vec<Vec<usize>>) -> Result<()> {
    let mut stack = vec![vec![from]];
    while let Some(path) = stack.pop() {
        let here = *path.last().unwrap();
        let next = step(here);
        if next.is_empty() {
            if out.len() >= cap {
                return Err(Error::CapExceeded { what: "maximal chains", count: out.len() + 1, cap });
            }
            out.push(path);
            continue;
        }
        for &n in next.iter().rev() {
            let mut q = path.clone();
            q.push(n);
            stack.push(q);
        }
    }
    Ok(())
}

/// Maximal chains as increasing element lists, sorted. With an anchor,
/// only chains through it.
pub fn maximal_chains(p: &impl HasseOrder, through: Option<usize>, cap: usize) -> Result<Vec<Vec<usize>>> {
    let up = |a: usize| p.covers_up(a).to_vec();
    let down = |a: usize| p.covers_down(a).to_vec();
    let mut out = Vec::new();
    match through {
        None => {
            for m in p.minimal() {
                walks(m, up, cap, &mut out)?;
            }
        }
        Some(a) => {
            let (mut below, mut above) = (Vec::new(), Vec::new());
            walks(a, down, cap, &mut below)?;
            walks(a, up, cap, &mut above)?;
            if below.len().saturating_mul(above.len()) > cap {
                return Err(Error::CapExceeded { what: "maximal chains", count: below.len() * above.len(), cap });
            }
            for b in &below {
                for u in &above {
                    let mut c: Vec<usize> = b.iter().rev().copied().collect();
                    c.extend_from_slice(&u[1..]);
                    out.push(c);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Every nonempty chain, as increasing element lists.
pub fn all_chains(p: &impl HasseOrder, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = p.size();
    let mut out = Vec::new();
    // extend chains upwards by any strictly larger element
    let mut stack: Vec<Vec<usize>> = (0..n).rev().map(|a| vec![a]).collect();
    while let Some(c) = stack.pop() {
        let top = *c.last().unwrap();
        for b in (0..n).rev() {
            if b != top && p.leq(top, b) {
                let mut d = c.clone();
                d.push(b);
                stack.push(d);
            }
        }
        if out.len() >= cap {
            return Err(Error::CapExceeded { what: "chains", count: out.len() + 1, cap });
        }
        out.push(c);
    }
    out.sort();
    Ok(out)
}

/// The intersection of two chains, as an increasing list.
pub fn pullback(c1: &[usize], c2: &[usize]) -> Vec<usize> {
    let s: BTreeSet<usize> = c2.iter().copied().collect();
    c1.iter().copied().filter(|a| s.contains(a)).collect()
}

/// Maximal chains of the sub-poset induced on the intersection.
pub fn quasi_pullbacks(p: &Poset, c1: &[usize], c2: &[usize]) -> Vec<Vec<usize>> {
    let common = pullback(c1, c2);
    if common.is_empty() {
        return Vec::new();
    }
    let sub = p.restrict(&common);
    let chains = maximal_chains(&sub, None, usize::MAX).expect("no cap");
    chains.into_iter().map(|c| c.into_iter().map(|i| common[i]).collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainFlavor {
    /// Every chain, with all inclusions.
    All,
    /// Maximal chains and their pairwise intersections.
    MaxPullback,
    /// Maximal chains and the maximal chains of pairwise intersections.
    MaxQuasi,
    /// Maximal chains only.
    Maximal,
}

impl ChainFlavor {
    pub fn name(&self) -> &'static str {
        match self {
            ChainFlavor::All => "all",
            ChainFlavor::MaxPullback => "pullback",
            ChainFlavor::MaxQuasi => "quasi",
            ChainFlavor::Maximal => "maximal",
        }
    }
}

/// Objects are chains (increasing element lists); an arrow `(i, j)` is
/// the inclusion of object `i` into object `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCategory {
    pub objects: Vec<Vec<usize>>,
    pub arrows: Vec<(usize, usize)>,
}

pub fn chain_category(p: &Poset, flavor: ChainFlavor, cap: usize) -> Result<ChainCategory> {
    let mut objects: Vec<Vec<usize>> = match flavor {
        ChainFlavor::All => all_chains(p, cap)?,
        _ => maximal_chains(p, None, cap)?,
    };
    let maximal = objects.len();
    if matches!(flavor, ChainFlavor::MaxPullback | ChainFlavor::MaxQuasi) {
        let mut seen: BTreeSet<Vec<usize>> = objects.iter().cloned().collect();
        for i in 0..maximal {
            for j in i + 1..maximal {
                let extra = match flavor {
                    ChainFlavor::MaxPullback => vec![pullback(&objects[i], &objects[j])],
                    _ => quasi_pullbacks(p, &objects[i], &objects[j]),
                };
                for c in extra {
                    if !c.is_empty() && seen.insert(c.clone()) {
                        objects.push(c);
                    }
                }
            }
        }
        if objects.len() > cap {
            return Err(Error::CapExceeded { what: "chain objects", count: objects.len(), cap });
        }
    }
    let index: HashMap<&Vec<usize>, usize> = objects.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut arrows = Vec::new();
    match flavor {
        ChainFlavor::All => {
            // inclusions that drop one element generate all others
            for (j, c) in objects.iter().enumerate() {
                if c.len() < 2 {
                    continue;
                }
                for k in 0..c.len() {
                    let mut d = c.clone();
                    d.remove(k);
                    arrows.push((index[&d], j));
                }
            }
        }
        _ => {
            let subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.contains(x));
            for i in maximal..objects.len() {
                for j in 0..objects.len() {
                    if i != j && subset(&objects[i], &objects[j]) {
                        arrows.push((i, j));
                    }
                }
            }
        }
    }
    arrows.sort();
    Ok(ChainCategory { objects, arrows })
}
