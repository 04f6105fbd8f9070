//! Colimits of diagrams of posets and of poset-indexed functors glued
//! along isomorphisms, and the comparison of natural homology with the
//! colimit of its restrictions to chains.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::diagram::{Cover, IsoSearch, VectDiagram};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::natural::{natural_homology, HomologyCache, Region};
use crate::poset::{chain_category, ChainCategory, ChainFlavor, HasseOrder, Poset};
use crate::precubical::PrecubicalSet;
use crate::tracespace::{EdgePath, UnionFind};

/// Order-embedding between two objects of a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    /// Image of each source element.
    pub map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetDiagram {
    pub objects: Vec<Poset>,
    pub arrows: Vec<Arrow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetColimit {
    /// Classes labelled by their least member.
    pub poset: Poset,
    /// Class of every element of every object.
    pub injections: Vec<Vec<usize>>,
    /// Members `(object, element)` of each class, ascending.
    pub classes: Vec<Vec<(usize, usize)>>,
}

impl PosetDiagram {
    /// One object per chain of `p`, one arrow per listed inclusion.
    pub fn of_chains(p: &Poset, cat: &ChainCategory) -> PosetDiagram {
        let objects =
            cat.objects.iter().map(|c| Poset::chain(c.iter().map(|&a| p.labels[a].clone()).collect())).collect();
        let arrows = cat
            .arrows
            .iter()
            .map(|&(s, t)| {
                let target = &cat.objects[t];
                let map = cat.objects[s].iter().map(|a| target.iter().position(|b| b == a).unwrap()).collect();
                Arrow { source: s, target: t, map }
            })
            .collect();
        PosetDiagram { objects, arrows }
    }
}

/// Disjoint union of the objects, elements identified along arrows and
/// ordered by the transitive closure of every object's order.
pub fn colimit_posets(d: &PosetDiagram) -> Result<PosetColimit> {
    let mut offset = Vec::with_capacity(d.objects.len());
    let mut total = 0;
    for o in &d.objects {
        offset.push(total);
        total += o.len();
    }
    let mut uf = UnionFind::new(total);
    for a in &d.arrows {
        let (s, t) = (&d.objects[a.source], &d.objects[a.target]);
        if a.map.len() != s.len() || a.map.iter().any(|&y| y >= t.len()) {
            return Err(Error::Precondition(format!("arrow {} -> {} is not a map of elements", a.source, a.target)));
        }
        for x in 0..s.len() {
            for y in 0..s.len() {
                if s.leq(x, y) != t.leq(a.map[x], a.map[y]) {
                    return Err(Error::Precondition(format!(
                        "arrow {} -> {} is not an order-embedding",
                        a.source, a.target
                    )));
                }
            }
            uf.union(offset[a.source] + x, offset[a.target] + a.map[x]);
        }
    }
    let flat = uf.classes();
    let mut class_of = vec![0; total];
    for (c, members) in flat.iter().enumerate() {
        for &m in members {
            class_of[m] = c;
        }
    }
    let locate = |g: usize| {
        let o = offset.partition_point(|&x| x <= g) - 1;
        (o, g - offset[o])
    };
    let mut rel = Vec::new();
    for (o, p) in d.objects.iter().enumerate() {
        for (x, y) in p.relations() {
            let (cx, cy) = (class_of[offset[o] + x], class_of[offset[o] + y]);
            if cx == cy {
                return Err(Error::Antisymmetry(cx, cy));
            }
            rel.push((cx, cy));
        }
    }
    let labels = flat
        .iter()
        .map(|m| {
            let (o, x) = locate(m[0]);
            d.objects[o].labels[x].clone()
        })
        .collect();
    let poset = Poset::from_relations(labels, &rel)?;
    let injections =
        (0..d.objects.len()).map(|o| (0..d.objects[o].len()).map(|x| class_of[offset[o] + x]).collect()).collect();
    let classes = flat.iter().map(|m| m.iter().map(|&g| locate(g)).collect()).collect();
    Ok(PosetColimit { poset, injections, classes })
}

/// A poset with a functor on it; the functor's nodes are the poset's
/// elements in the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersObject {
    pub poset: Poset,
    pub functor: VectDiagram,
}

/// Inclusion of posets with a natural isomorphism between the functors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersArrow {
    pub source: usize,
    pub target: usize,
    pub map: Vec<usize>,
    /// `isos[x]: F_source(x) -> F_target(map[x])`.
    pub isos: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersFunctorDiagram {
    pub field: Field,
    pub objects: Vec<PersObject>,
    pub arrows: Vec<PersArrow>,
}

impl PersFunctorDiagram {
    pub fn underlying(&self) -> PosetDiagram {
        PosetDiagram {
            objects: self.objects.iter().map(|o| o.poset.clone()).collect(),
            arrows: self
                .arrows
                .iter()
                .map(|a| Arrow { source: a.source, target: a.target, map: a.map.clone() })
                .collect(),
        }
    }

    /// Restrictions of `functor` (indexed like `p`) to the objects of a
    /// chain category, glued by identities.
    pub fn restrictions(p: &Poset, functor: &VectDiagram, cat: &ChainCategory) -> Result<PersFunctorDiagram> {
        let shape = PosetDiagram::of_chains(p, cat);
        let mut objects = Vec::with_capacity(cat.objects.len());
        for (c, poset) in cat.objects.iter().zip(shape.objects) {
            objects.push(PersObject { poset, functor: functor.restrict(c)? });
        }
        let arrows = shape
            .arrows
            .into_iter()
            .map(|a| {
                let isos = cat.objects[a.source].iter().map(|&x| Matrix::identity(functor.dims[x])).collect();
                PersArrow { source: a.source, target: a.target, map: a.map, isos }
            })
            .collect();
        Ok(PersFunctorDiagram { field: functor.field, objects, arrows })
    }
}

/// The glued functor on the colimit poset. The value at a class is the
/// value at its least member; other members are transported to it along
/// the first path found by breadth-first search over the arrows.
pub fn colimit_pers(d: &PersFunctorDiagram) -> Result<(PosetColimit, VectDiagram)> {
    let f = d.field;
    let colim = colimit_posets(&d.underlying())?;
    for (o, obj) in d.objects.iter().enumerate() {
        if obj.functor.len() != obj.poset.len() {
            return Err(Error::ShapeMismatch(format!("object {o}: functor and poset sizes differ")));
        }
    }
    // adjacency between (object, element) pairs, with the iso oriented forward
    let mut adj: BTreeMap<(usize, usize), Vec<((usize, usize), usize, bool)>> = BTreeMap::new();
    for (k, a) in d.arrows.iter().enumerate() {
        for (x, &y) in a.map.iter().enumerate() {
            let iso = &a.isos[x];
            let (ds, dt) = (d.objects[a.source].functor.dims[x], d.objects[a.target].functor.dims[y]);
            if ds != dt {
                return Err(Error::ClassDimension(format!(
                    "{} has dimension {ds} in object {} and {dt} in object {}",
                    d.objects[a.source].poset.labels[x], a.source, a.target
                )));
            }
            if iso.shape() != (dt, ds) || !iso.is_invertible(f) {
                return Err(Error::NotInvertible(format!("arrow {k} at {}", d.objects[a.source].poset.labels[x])));
            }
            adj.entry((a.source, x)).or_default().push(((a.target, y), k, true));
            adj.entry((a.target, y)).or_default().push(((a.source, x), k, false));
        }
    }
    // to_rep[(o, x)]: F_o(x) -> value at the class representative
    let mut to_rep: BTreeMap<(usize, usize), Matrix> = BTreeMap::new();
    let mut dims = Vec::with_capacity(colim.classes.len());
    for members in &colim.classes {
        let rep = members[0];
        let dim = d.objects[rep.0].functor.dims[rep.1];
        dims.push(dim);
        to_rep.insert(rep, Matrix::identity(dim));
        let mut queue = VecDeque::from([rep]);
        while let Some(n) = queue.pop_front() {
            let here = to_rep[&n].clone();
            let Some(next) = adj.get(&n) else { continue };
            for &(m, k, forward) in next {
                if to_rep.contains_key(&m) {
                    continue;
                }
                let a = &d.arrows[k];
                let x = if forward { n.1 } else { m.1 };
                // forward: iso goes n -> m, so m reaches the rep through its inverse
                let t = if forward {
                    here.mul(&a.isos[x].inverse(f).expect("checked"), f)?
                } else {
                    here.mul(&a.isos[x], f)?
                };
                to_rep.insert(m, t);
                queue.push_back(m);
            }
        }
        for &(o, x) in members {
            if d.objects[o].functor.dims[x] != dim {
                return Err(Error::ClassDimension(format!("{} in object {o}", d.objects[o].poset.labels[x])));
            }
        }
    }
    // every generating relation between covering classes must give one map
    let mut gamma: BTreeMap<(usize, usize), Matrix> = BTreeMap::new();
    for (o, obj) in d.objects.iter().enumerate() {
        for (x, y) in obj.poset.relations() {
            let (cx, cy) = (colim.injections[o][x], colim.injections[o][y]);
            if !colim.poset.covers_up(cx).contains(&cy) {
                continue;
            }
            let local = obj
                .functor
                .map_between(x, y)
                .ok_or_else(|| Error::Incoherent("functor misses a relation of its poset".into()))?;
            let back = to_rep[&(o, x)].inverse(f).expect("transport is invertible");
            let g = to_rep[&(o, y)].mul(&local, f)?.mul(&back, f)?;
            match gamma.get(&(cx, cy)) {
                Some(prev) if *prev != g => {
                    return Err(Error::Incoherent(format!(
                        "objects disagree on the map {} -> {}",
                        colim.poset.labels[cx], colim.poset.labels[cy]
                    )))
                }
                Some(_) => {}
                None => {
                    gamma.insert((cx, cy), g);
                }
            }
        }
    }
    let covers = gamma.into_iter().map(|((from, to), matrix)| Cover { from, to, matrix }).collect();
    let glued = VectDiagram::new(f, colim.poset.labels.clone(), dims, covers)?;
    Ok((colim, glued))
}

/// Colimit of the chain diagram of `p` for a flavor, compared with `p`.
pub fn reconstructs(p: &Poset, flavor: ChainFlavor, cap: usize) -> Result<bool> {
    let cat = chain_category(p, flavor, cap)?;
    Ok(colimit_posets(&PosetDiagram::of_chains(p, &cat))?.poset.same_as(p))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Report {
    pub flavor: ChainFlavor,
    pub natural_nodes: usize,
    pub chain_objects: usize,
    pub colimit_nodes: usize,
    pub outcome: IsoSearch,
}

impl Theorem1Report {
    pub fn isomorphic(&self) -> bool {
        matches!(self.outcome, IsoSearch::Isomorphic(_))
    }
}

impl fmt::Display for Theorem1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "flavor: {}", self.flavor.name())?;
        writeln!(f, "natural nodes: {}", self.natural_nodes)?;
        writeln!(f, "chain objects: {}", self.chain_objects)?;
        writeln!(f, "colimit nodes: {}", self.colimit_nodes)?;
        match &self.outcome {
            IsoSearch::Isomorphic(_) => write!(f, "isomorphic"),
            IsoSearch::Differs(why) => write!(f, "not isomorphic: {why}"),
        }
    }
}

/// Natural homology of the upset of the constant trace at `anchor`,
/// against the colimit of persistence modules computed along each
/// chain of the chosen chain category.
pub fn verify_theorem1(
    x: &PrecubicalSet,
    anchor: usize,
    degree: usize,
    flavor: ChainFlavor,
    field: Field,
    cap: usize,
) -> Result<Theorem1Report> {
    let nat = natural_homology(x, degree, &Region::Upset(EdgePath::constant(anchor)), field, cap)?;
    let p = nat.poset.to_poset(x);
    let cat = chain_category(&p, flavor, cap)?;
    let shape = PosetDiagram::of_chains(&p, &cat);
    let mut cache = HomologyCache::new(x, field, degree, cap)?;
    let mut objects = Vec::with_capacity(cat.objects.len());
    for (c, poset) in cat.objects.iter().zip(shape.objects) {
        let traces: Vec<&EdgePath> = c.iter().map(|&i| &nat.traces()[i]).collect();
        let dims = traces.iter().map(|t| cache.dim(t.start(), t.end())).collect::<Result<Vec<_>>>()?;
        let covers = traces
            .windows(2)
            .enumerate()
            .map(|(k, w)| Ok(Cover { from: k, to: k + 1, matrix: cache.map(w[0], w[1])? }))
            .collect::<Result<Vec<_>>>()?;
        let functor = VectDiagram::new(field, poset.labels.clone(), dims, covers)?;
        objects.push(PersObject { poset, functor });
    }
    let arrows = shape
        .arrows
        .into_iter()
        .map(|a| {
            let isos = a.map.iter().map(|&y| Matrix::identity(objects[a.target].functor.dims[y])).collect();
            PersArrow { source: a.source, target: a.target, map: a.map, isos }
        })
        .collect();
    let glued = PersFunctorDiagram { field, objects, arrows };
    let (colim, g) = colimit_pers(&glued)?;
    let outcome = if !colim.poset.same_as(&p) {
        IsoSearch::Differs("the colimit poset differs from the upset".into())
    } else {
        let node_map: Vec<usize> = nat.diagram.labels.iter().map(|l| g.node(l).expect("same labels")).collect();
        nat.diagram.isomorphism_to(&g, &node_map)?
    };
    Ok(Theorem1Report {
        flavor,
        natural_nodes: nat.traces().len(),
        chain_objects: cat.objects.len(),
        colimit_nodes: colim.poset.len(),
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::tests::random_diagram;
    use crate::fixtures;
    use crate::poset::tests::{diamond, random_poset};
    use crate::traceposet::build_trace_poset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FLAVORS: [ChainFlavor; 3] = [ChainFlavor::All, ChainFlavor::MaxPullback, ChainFlavor::MaxQuasi];

    #[test]
    fn diamond_needs_the_completion() {
        let d = diamond();
        for fl in FLAVORS {
            assert!(reconstructs(&d, fl, 1000).unwrap(), "{fl:?}");
        }
        let cat = chain_category(&d, ChainFlavor::Maximal, 1000).unwrap();
        let c = colimit_posets(&PosetDiagram::of_chains(&d, &cat)).unwrap();
        assert_eq!(c.poset.len(), 6);
        assert!(!c.poset.same_as(&d));
    }

    #[test]
    fn single_object() {
        let p = Poset::chain(vec!["a".into(), "b".into()]);
        let d =
            PosetDiagram { objects: vec![p.clone()], arrows: vec![Arrow { source: 0, target: 0, map: vec![0, 1] }] };
        assert!(colimit_posets(&d).unwrap().poset.same_as(&p));
    }

    #[test]
    fn twisted_gluing_breaks_antisymmetry() {
        let p = Poset::chain(vec!["a".into(), "b".into()]);
        let q = Poset::chain(vec!["c".into(), "d".into()]);
        let s = Poset::chain(vec!["s".into()]);
        let d = PosetDiagram {
            objects: vec![p, q, s.clone(), s],
            arrows: vec![
                Arrow { source: 2, target: 0, map: vec![0] },
                Arrow { source: 2, target: 1, map: vec![1] },
                Arrow { source: 3, target: 0, map: vec![1] },
                Arrow { source: 3, target: 1, map: vec![0] },
            ],
        };
        assert!(matches!(colimit_posets(&d), Err(Error::Antisymmetry(..))));
    }

    #[test]
    fn random_posets_are_reconstructed() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let p = random_poset(&mut rng, 8);
            for fl in FLAVORS {
                assert!(reconstructs(&p, fl, 1 << 12).unwrap());
            }
        }
    }

    #[test]
    fn fixture_posets_are_reconstructed() {
        for name in ["matchbox", "unit-square", "grid-2x2"] {
            let x = fixtures::load(name).unwrap().unwrap();
            let p = build_trace_poset(&x, 20_000).unwrap().to_poset(&x);
            for fl in FLAVORS {
                assert!(reconstructs(&p, fl, 1 << 20).unwrap(), "{name} {fl:?}");
            }
        }
    }

    fn scrambled(rng: &mut ChaCha8Rng, d: PersFunctorDiagram) -> PersFunctorDiagram {
        // change the basis of every node of every object, adjusting the isos
        let f = d.field;
        let mut bases: Vec<Vec<Matrix>> = Vec::new();
        let mut objects = Vec::new();
        for o in &d.objects {
            let b: Vec<Matrix> = o
                .functor
                .dims
                .iter()
                .map(|&k| loop {
                    let mut m = Matrix::zeros(k, k);
                    for i in 0..k {
                        for j in 0..k {
                            m[(i, j)] = f.from_int(rng.gen_range(-2..=2));
                        }
                    }
                    if m.is_invertible(f) {
                        break m;
                    }
                })
                .collect();
            let covers = o
                .functor
                .covers
                .iter()
                .map(|c| Cover {
                    from: c.from,
                    to: c.to,
                    matrix: b[c.to].mul(&c.matrix, f).unwrap().mul(&b[c.from].inverse(f).unwrap(), f).unwrap(),
                })
                .collect();
            let functor = VectDiagram::new(f, o.functor.labels.clone(), o.functor.dims.clone(), covers).unwrap();
            objects.push(PersObject { poset: o.poset.clone(), functor });
            bases.push(b);
        }
        let arrows = d
            .arrows
            .iter()
            .map(|a| {
                let isos = a
                    .map
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| {
                        let inv = bases[a.source][x].inverse(f).unwrap();
                        bases[a.target][y].mul(&a.isos[x], f).unwrap().mul(&inv, f).unwrap()
                    })
                    .collect();
                PersArrow { source: a.source, target: a.target, map: a.map.clone(), isos }
            })
            .collect();
        PersFunctorDiagram { field: f, objects, arrows }
    }

    #[test]
    fn restrict_then_glue_is_isomorphic() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for round in 0..100 {
            let field = if round % 2 == 0 { Field::Rational } else { Field::Prime(2) };
            let p = random_poset(&mut rng, 6);
            let (d, _) = random_diagram(&mut rng, &p, field);
            let fl = FLAVORS[round % 3];
            let cat = chain_category(&p, fl, 1 << 12).unwrap();
            let pieces = scrambled(&mut rng, PersFunctorDiagram::restrictions(&p, &d, &cat).unwrap());
            let (colim, g) = colimit_pers(&pieces).unwrap();
            assert!(colim.poset.same_as(&p));
            let node_map: Vec<usize> = d.labels.iter().map(|l| g.node(l).unwrap()).collect();
            match d.isomorphism_to(&g, &node_map).unwrap() {
                IsoSearch::Isomorphic(_) => {}
                IsoSearch::Differs(why) => panic!("round {round}: {why}"),
            }
            // gluing again changes nothing
            let cat2 = chain_category(&colim.poset, fl, 1 << 12).unwrap();
            let (_, g2) = colimit_pers(&PersFunctorDiagram::restrictions(&colim.poset, &g, &cat2).unwrap()).unwrap();
            assert_eq!(g2, g);
        }
    }

    #[test]
    fn mismatched_dimensions_are_caught() {
        let a = Poset::chain(vec!["a".into()]);
        let one = VectDiagram::new(Field::Rational, vec!["a".into()], vec![1], vec![]).unwrap();
        let two = VectDiagram::new(Field::Rational, vec!["a".into()], vec![2], vec![]).unwrap();
        let d = PersFunctorDiagram {
            field: Field::Rational,
            objects: vec![PersObject { poset: a.clone(), functor: one }, PersObject { poset: a, functor: two }],
            arrows: vec![PersArrow { source: 0, target: 1, map: vec![0], isos: vec![Matrix::zeros(2, 1)] }],
        };
        assert!(matches!(colimit_pers(&d), Err(Error::ClassDimension(_))));
    }

    #[test]
    fn colimit_recovers_natural_homology_on_small_complexes() {
        let x = fixtures::load("unit-square").unwrap().unwrap();
        let v = x.vertex("v0_0").unwrap();
        for fl in FLAVORS {
            let r = verify_theorem1(&x, v, 1, fl, Field::Rational, 100_000).unwrap();
            assert!(r.isomorphic(), "{r}");
        }
        let point = crate::precubical::parse_precubical("vertices: a\n").unwrap();
        let r = verify_theorem1(&point, 0, 1, ChainFlavor::All, Field::Rational, 10).unwrap();
        assert!(r.isomorphic());
        assert_eq!(r.natural_nodes, 1);
    }
}
