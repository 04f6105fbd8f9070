//! Acceptance criteria 1-8, one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use nathom::bisim::{search_bisimulation, Discipline, SearchOutcome};
use nathom::colimit::{colimit_pers, colimit_posets, verify_theorem1, PersFunctorDiagram, PosetDiagram};
use nathom::diagram::{Cover, IsoSearch, VectDiagram};
use nathom::field::{q, q_frac};
use nathom::homology::SimplicialComplex;
use nathom::natural::{filtration_of_trace, natural_homology, persistence_along_trace, Region};
use nathom::persistence::{
    barcode, certify_distance, filtered_barcode, interleaving_distance, shift_interleaving, verify_interleaving,
    Barcode, Extended, FilteredComplex, Interval, MapFamily, PersistenceModule,
};
use nathom::poset::{chain_category, ChainFlavor, HasseOrder, Poset};
use nathom::traceposet::{build_trace_poset, start_anchored_chain, TracePoset};
use nathom::tracespace::{enumerate_dipaths, trace_complex};
use nathom::{fixtures, EdgePath, Field, Matrix, PrecubicalSet, Q};
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn vertex(x: &PrecubicalSet, name: &str) -> usize {
    x.vertex(name).unwrap()
}

// 1: barcodes along the six maximal traces of the matchbox.
fn matchbox_barcodes() -> Outcome {
    let x = fixtures::matchbox();
    let long = Barcode::new(vec![Interval::infinite(0), Interval::finite(2, 3)]);
    let short = Barcode::new(vec![Interval::infinite(0)]);
    let traces = enumerate_dipaths(&x, vertex(&x, "O"), vertex(&x, "P"));
    ensure(traces.len() == 6, || format!("{} maximal traces", traces.len()))?;
    for f in &traces {
        let start = Instant::now();
        let chain = start_anchored_chain(f);
        let along = barcode(&persistence_along_trace(&x, f, &chain, 1, Field::Rational).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let echelon =
            filtered_barcode(&filtration_of_trace(&x, f, &chain, Field::Rational).map_err(|e| e.to_string())?, 0);
        within(start.elapsed(), Duration::from_secs(1), &f.label(&x))?;
        let label = f.label(&x);
        let expected = if label == "O>X>XY>P" || label == "O>Y>XY>P" { &long } else { &short };
        ensure(&along == expected && &echelon == expected, || format!("{label}: {along} / {echelon}"))?;
    }
    Ok("alpha, zeta: [0, inf) + [2, 3); the other four: [0, inf)".into())
}

// 2: the upset of the origin in the matchbox.
fn matchbox_upset() -> Outcome {
    let start = Instant::now();
    let x = fixtures::matchbox();
    let o = EdgePath::constant(vertex(&x, "O"));
    let nat = natural_homology(&x, 1, &Region::Upset(o), Field::Rational, 20_000).map_err(|e| e.to_string())?;
    let classes = nat.endpoint_classes();
    let mut dims: Vec<usize> = classes.iter().map(|c| c.2).collect();
    dims.sort();
    ensure(dims == [1, 1, 1, 1, 1, 1, 1, 2], || format!("class dimensions {dims:?}"))?;
    let xy = vertex(&x, "XY");
    for ((_, b), _, d) in &classes {
        ensure((*b == xy) == (*d == 2), || format!("class ending at {} has dimension {d}", x.name(0, *b)))?;
    }
    let d = &nat.diagram;
    for c in &d.covers {
        ensure(c.matrix.rank(d.field) >= 1, || format!("zero map {} -> {}", d.labels[c.from], d.labels[c.to]))?;
    }
    d.check_commutative().map_err(|e| e.to_string())?;
    within(start.elapsed(), Duration::from_secs(5), "upset diagram")?;
    Ok(format!(
        "{} traces in {} endpoint classes, dims {dims:?}, {} covers all nonzero",
        d.len(),
        classes.len(),
        d.covers.len()
    ))
}

// 3: natural homology against the glued chain modules.
fn natural_homology_as_colimit() -> Outcome {
    let start = Instant::now();
    let x = fixtures::matchbox();
    let mut parts = Vec::new();
    for fl in [ChainFlavor::All, ChainFlavor::MaxPullback, ChainFlavor::MaxQuasi] {
        let r = verify_theorem1(&x, vertex(&x, "O"), 1, fl, Field::Rational, 1 << 20).map_err(|e| e.to_string())?;
        ensure(r.isomorphic(), || r.to_string())?;
        parts.push(format!("{}: {} chains", fl.name(), r.chain_objects));
    }
    within(start.elapsed(), Duration::from_secs(30), "three flavors")?;
    Ok(format!("isomorphic ({})", parts.join(", ")))
}

// 4: the two complexes of the introduction.
fn fig1_discrimination() -> Outcome {
    let start = Instant::now();
    let max_components = |x: &PrecubicalSet| {
        let mut best = 0;
        for a in 0..x.count(0) {
            let reach = x.reachable_from(a);
            for b in (0..x.count(0)).filter(|&b| reach[b]) {
                best = best.max(trace_complex(x, a, b).components().len());
            }
        }
        best
    };
    let (left, right) = (fixtures::fig1_left(), fixtures::fig1_right());
    let (l, r) = (max_components(&left), max_components(&right));
    ensure((l, r) == (3, 4), || format!("maximum component counts {l} and {r}"))?;
    let diagram =
        |x: &PrecubicalSet| natural_homology(x, 1, &Region::Whole, Field::Rational, 20_000).map(|n| n.diagram);
    let (f, g) = (diagram(&left).map_err(|e| e.to_string())?, diagram(&right).map_err(|e| e.to_string())?);
    ensure(f.dims.iter().max() == Some(&3) && g.dims.iter().max() == Some(&4), || "unexpected node dimensions".into())?;
    let outcome =
        search_bisimulation(&f, &g, Discipline::SignedPermutation, 4, 1_000_000).map_err(|e| e.to_string())?;
    let SearchOutcome::NotFound { exhaustive: true, reason } = outcome else {
        return Err(format!("search gave {outcome:?}"));
    };
    within(start.elapsed(), Duration::from_secs(10), "discrimination")?;
    Ok(format!("max components 3 vs 4; no bisimulation ({reason})"))
}

/// Random filtered simplicial complex with at most 8 cells and 5 stages.
fn random_filtration(rng: &mut ChaCha8Rng, field: Field) -> Option<(SimplicialComplex, FilteredComplex)> {
    let n = rng.gen_range(1..=4);
    let maximal: Vec<Vec<usize>> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let k = rng.gen_range(1..=3.min(n));
            let mut s: Vec<usize> = (0..n).collect();
            while s.len() > k {
                s.remove(rng.gen_range(0..s.len()));
            }
            s
        })
        .collect();
    let k = SimplicialComplex::from_maximal(&maximal);
    if k.simplices.iter().map(Vec::len).sum::<usize>() > 8 {
        return None;
    }
    let stages = rng.gen_range(1..=5);
    let mut births: Vec<Vec<usize>> = Vec::new();
    for (d, level) in k.simplices.iter().enumerate() {
        let mut row = Vec::new();
        for s in level {
            let floor = if d == 0 {
                0
            } else {
                (0..s.len())
                    .map(|i| {
                        let mut face = s.clone();
                        face.remove(i);
                        births[d - 1][k.index(&face).unwrap()]
                    })
                    .max()
                    .unwrap()
            };
            row.push(rng.gen_range(floor..stages));
        }
        births.push(row);
    }
    let fc = FilteredComplex::new(k.chain_complex(field), births, stages).unwrap();
    Some((k, fc))
}

/// Rank of `H_k(K_i) -> H_k(K_j)` as `dim Z_i - dim(Z_i cap B_j)`,
/// with cycles and boundaries written in the full chain group.
fn rank_oracle(k: &SimplicialComplex, births: &[Vec<usize>], field: Field, deg: usize, i: usize, j: usize) -> usize {
    let dense_boundary = |d: usize, alive_at: usize| -> Matrix {
        // columns: d-simplices alive at the stage; rows: all (d-1)-simplices
        let cols: Vec<usize> = (0..k.simplices[d].len()).filter(|&c| births[d][c] <= alive_at).collect();
        let rows = if d == 0 { 0 } else { k.simplices[d - 1].len() };
        let mut m = Matrix::zeros(rows, cols.len());
        for (c, &s) in cols.iter().enumerate() {
            let simplex = &k.simplices[d][s];
            if d == 0 {
                continue;
            }
            for r in 0..simplex.len() {
                let mut face = simplex.clone();
                face.remove(r);
                m[(k.index(&face).unwrap(), c)] = field.from_int(if r % 2 == 0 { 1 } else { -1 });
            }
        }
        m
    };
    let embed = |d: usize, alive_at: usize, v: &[Q]| -> Vec<Q> {
        let cols: Vec<usize> = (0..k.simplices[d].len()).filter(|&c| births[d][c] <= alive_at).collect();
        let mut out = vec![field.zero(); k.simplices[d].len()];
        for (c, &s) in cols.iter().enumerate() {
            out[s] = v[c].clone();
        }
        out
    };
    let cycles: Vec<Vec<Q>> = dense_boundary(deg, i).kernel(field).iter().map(|v| embed(deg, i, v)).collect();
    let boundaries: Vec<Vec<Q>> = if deg + 1 < k.simplices.len() {
        let b = dense_boundary(deg + 1, j);
        (0..b.cols()).map(|c| b.column(c)).collect()
    } else {
        Vec::new()
    };
    let span_rank = |vs: &[Vec<Q>]| -> usize {
        if vs.is_empty() {
            return 0;
        }
        Matrix::from_rows(vs.len(), vs[0].len(), vs.to_vec()).unwrap().rank(field)
    };
    let z = span_rank(&cycles);
    let b = span_rank(&boundaries);
    let both: Vec<Vec<Q>> = cycles.iter().chain(&boundaries).cloned().collect();
    let intersection = z + b - span_rank(&both);
    z - intersection
}

// 5: barcodes from the echelon form against ranks of composite maps.
fn echelon_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 240 {
        let field = if checked % 2 == 0 { Field::Rational } else { Field::Prime(2) };
        let Some((simplices, fc)) = random_filtration(&mut rng, field) else { continue };
        checked += 1;
        for deg in 0..=fc.complex.top() {
            let bars = filtered_barcode(&fc, deg);
            for i in 0..fc.stages {
                for j in i..fc.stages {
                    let expected = rank_oracle(&simplices, &fc.births, field, deg, i, j);
                    let got = bars.rank_between(&q(i as i64), &q(j as i64));
                    ensure(expected == got, || {
                        format!("H{deg} rank {i}->{j}: barcode {got}, oracle {expected} ({field})")
                    })?;
                }
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(60), "echelon oracle")?;
    Ok(format!("{checked} random filtered complexes over Q and GF(2)"))
}

fn random_poset(rng: &mut ChaCha8Rng, max: usize) -> Poset {
    let n = rng.gen_range(1..=max);
    let density = rng.gen_range(0.1..0.6);
    let mut rel = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                rel.push((a, b));
            }
        }
    }
    Poset::from_relations((0..n).map(|i| format!("p{i}")).collect(), &rel).unwrap()
}

fn diamond() -> Poset {
    Poset::from_relations(vec!["x".into(), "y1".into(), "y2".into(), "z".into()], &[(0, 1), (0, 2), (1, 3), (2, 3)])
        .unwrap()
}

fn reproduces(p: &Poset, flavor: ChainFlavor) -> Result<bool, String> {
    let cat = chain_category(p, flavor, 1 << 20).map_err(|e| e.to_string())?;
    let c = colimit_posets(&PosetDiagram::of_chains(p, &cat)).map_err(|e| e.to_string())?;
    Ok(c.poset.same_as(p))
}

/// Traces of a fig-1 complex staying inside the top-right 2x2 block.
fn corner_block(x: &PrecubicalSet) -> Poset {
    let all = build_trace_poset(x, 20_000).unwrap();
    let inside = |v: usize| {
        let name = x.name(0, v);
        name.trim_start_matches('v').split('_').all(|c| c.parse::<usize>().unwrap() >= 3)
    };
    let kept: Vec<EdgePath> = all.elements.into_iter().filter(|p| p.vertices.iter().all(|&v| inside(v))).collect();
    TracePoset::from_elements(kept).to_poset(x)
}

// 6: colimits of chain diagrams.
fn poset_colimits() -> Outcome {
    let flavors = [ChainFlavor::All, ChainFlavor::MaxPullback, ChainFlavor::MaxQuasi];
    let mut posets: Vec<(String, Poset)> = Vec::new();
    for name in ["matchbox", "unit-square", "grid-2x2"] {
        let x = fixtures::load(name).unwrap().unwrap();
        posets.push((name.into(), build_trace_poset(&x, 20_000).unwrap().to_poset(&x)));
    }
    for (name, x) in [("fig1-left", fixtures::fig1_left()), ("fig1-right", fixtures::fig1_right())] {
        posets.push((format!("{name} corner"), corner_block(&x)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for i in 0..120 {
        posets.push((format!("random {i}"), random_poset(&mut rng, 8)));
    }
    for (name, p) in &posets {
        for fl in flavors {
            ensure(reproduces(p, fl)?, || format!("{name}: {} colimit differs", fl.name()))?;
        }
    }
    let d = diamond();
    ensure(!reproduces(&d, ChainFlavor::Maximal)?, || "maximal chains alone reproduce the diamond".into())?;
    Ok(format!(
        "{} posets reproduced by all three flavors; diamond not reproduced by maximal chains alone",
        posets.len()
    ))
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize, field: Field) -> Matrix {
    loop {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = field.from_int(rng.gen_range(-2..=2));
            }
        }
        if m.is_invertible(field) {
            return m;
        }
    }
}

/// Sum of interval modules on convex sets `up(b) \ up(d)`, written in a
/// random basis at every node.
fn random_functor(rng: &mut ChaCha8Rng, p: &Poset, field: Field) -> VectDiagram {
    let n = p.len();
    let intervals: Vec<Vec<bool>> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let b = rng.gen_range(0..n);
            let d = if rng.gen_bool(0.5) { Some(rng.gen_range(0..n)) } else { None };
            (0..n).map(|x| p.leq(b, x) && d.is_none_or(|d| !p.leq(d, x))).collect()
        })
        .collect();
    let alive: Vec<Vec<usize>> = (0..n).map(|x| (0..intervals.len()).filter(|&k| intervals[k][x]).collect()).collect();
    let basis: Vec<Matrix> = alive.iter().map(|a| random_invertible(rng, a.len(), field)).collect();
    let mut covers = Vec::new();
    for a in 0..n {
        for &b in p.covers_up(a) {
            let mut m = Matrix::zeros(alive[b].len(), alive[a].len());
            for (c, k) in alive[a].iter().enumerate() {
                if let Some(r) = alive[b].iter().position(|x| x == k) {
                    m[(r, c)] = field.one();
                }
            }
            let m = basis[b].mul(&m, field).unwrap().mul(&basis[a].inverse(field).unwrap(), field).unwrap();
            covers.push(Cover { from: a, to: b, matrix: m });
        }
    }
    VectDiagram::new(field, p.labels.clone(), alive.iter().map(Vec::len).collect(), covers).unwrap()
}

// 7: restrict to chains, glue back.
fn pers_gluing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let flavors = [ChainFlavor::All, ChainFlavor::MaxPullback, ChainFlavor::MaxQuasi];
    let rounds = 120;
    for round in 0..rounds {
        let field = if round % 3 == 2 { Field::Prime(3) } else { Field::Rational };
        let p = random_poset(&mut rng, 6);
        let d = random_functor(&mut rng, &p, field);
        let cat = chain_category(&p, flavors[round % 3], 1 << 16).map_err(|e| e.to_string())?;
        let pieces = PersFunctorDiagram::restrictions(&p, &d, &cat).map_err(|e| e.to_string())?;
        let (colim, g) = colimit_pers(&pieces).map_err(|e| format!("round {round}: {e}"))?;
        for members in &colim.classes {
            let dims: Vec<usize> = members.iter().map(|&(o, x)| pieces.objects[o].functor.dims[x]).collect();
            ensure(dims.windows(2).all(|w| w[0] == w[1]), || format!("round {round}: class dimensions {dims:?}"))?;
        }
        ensure(colim.poset.same_as(&p), || format!("round {round}: glued poset differs"))?;
        let node_map: Vec<usize> = d.labels.iter().map(|l| g.node(l).unwrap()).collect();
        match d.isomorphism_to(&g, &node_map).map_err(|e| e.to_string())? {
            IsoSearch::Isomorphic(_) => {}
            IsoSearch::Differs(why) => return Err(format!("round {round}: {why}")),
        }
    }
    Ok(format!("{rounds} random diagrams glued back isomorphically"))
}

fn half(x: &Q) -> Q {
    x / q(2)
}

/// Minimum over every partial matching of the worst cost, where a matched
/// pair costs the larger endpoint gap and an unmatched bar half its length.
fn matching_oracle(a: &[Interval], b: &[Interval]) -> Extended {
    fn gap(x: &Interval, y: &Interval) -> Extended {
        let births = (&x.birth - &y.birth).abs();
        match (&x.death, &y.death) {
            (Some(d), Some(e)) => Extended::Finite(births.max((d - e).abs())),
            (None, None) => Extended::Finite(births),
            _ => Extended::Infinity,
        }
    }
    fn alone(x: &Interval) -> Extended {
        x.length().map_or(Extended::Infinity, |l| Extended::Finite(half(&l)))
    }
    fn go(i: usize, a: &[Interval], b: &[Interval], used: &mut [bool], worst: Extended) -> Extended {
        if i == a.len() {
            return b.iter().zip(used.iter()).filter(|(_, &u)| !u).map(|(y, _)| alone(y)).fold(worst, Ord::max);
        }
        let mut best = go(i + 1, a, b, used, worst.clone().max(alone(&a[i])));
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(go(i + 1, a, b, used, worst.clone().max(gap(&a[i], &b[j]))));
                used[j] = false;
            }
        }
        best
    }
    go(0, a, b, &mut vec![false; b.len()], Extended::Finite(q(0)))
}

fn random_barcode(rng: &mut ChaCha8Rng) -> Barcode {
    let n = rng.gen_range(0..=5);
    Barcode::new(
        (0..n)
            .map(|_| {
                let b = q_frac(rng.gen_range(0..12), 2);
                let death = if rng.gen_bool(0.25) { None } else { Some(&b + q_frac(rng.gen_range(1..8), 2)) };
                Interval::new(b, death)
            })
            .collect(),
    )
}

// 8: interleavings.
fn interleavings() -> Outcome {
    let mut modules: Vec<(String, PersistenceModule)> = Vec::new();
    for (name, _) in fixtures::ALL {
        let x = fixtures::load(name).unwrap().unwrap();
        let p = build_trace_poset(&x, 20_000).unwrap();
        for m in p.maximal() {
            let f = &p.elements[m];
            let module = persistence_along_trace(&x, f, &start_anchored_chain(f), 1, Field::Rational)
                .map_err(|e| e.to_string())?;
            modules.push((format!("{name} {}", f.label(&x)), module));
        }
    }
    let zero = q(0);
    for (label, m) in &modules {
        let id = MapFamily::identity_on(m);
        let c = verify_interleaving(m, m, &zero, &id, &id).map_err(|e| e.to_string())?;
        ensure(c.holds, || format!("{label}: self-interleaving fails: {:?}", c.violation))?;
    }
    // shifts on a representative module per distinct barcode
    let mut distinct: BTreeMap<String, &PersistenceModule> = BTreeMap::new();
    for (_, m) in &modules {
        distinct.entry(barcode(m).map_err(|e| e.to_string())?.to_string()).or_insert(m);
    }
    for (bars, m) in &distinct {
        for eps in [q_frac(1, 2), q(1), q(3)] {
            let (n, phi, psi) = shift_interleaving(m, &eps);
            let c = verify_interleaving(m, &n, &eps, &phi, &psi).map_err(|e| e.to_string())?;
            ensure(c.holds, || format!("{bars}: shift by {eps} fails: {:?}", c.violation))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pairs = 400;
    for _ in 0..pairs {
        let (a, b) = (random_barcode(&mut rng), random_barcode(&mut rng));
        let (ma, mb) = (
            PersistenceModule::from_barcode(Field::Rational, &a),
            PersistenceModule::from_barcode(Field::Rational, &b),
        );
        let d = interleaving_distance(&ma, &mb).map_err(|e| e.to_string())?;
        let expected = matching_oracle(&a.intervals, &b.intervals);
        ensure(d == expected, || format!("{a:?} vs {b:?}: {d} against {expected}"))?;
    }
    let x = fixtures::matchbox();
    let alpha = EdgePath::parse(&x, "O>X>XY>P").unwrap();
    let m = persistence_along_trace(&x, &alpha, &start_anchored_chain(&alpha), 1, Field::Rational)
        .map_err(|e| e.to_string())?;
    let embedding: Vec<Q> = (0..m.len()).map(|i| q(i as i64)).collect();
    let real = m.complete_to_real(&embedding).map_err(|e| e.to_string())?;
    let (d, check) = certify_distance(&m, &real).map_err(|e| e.to_string())?;
    ensure(d <= Extended::Finite(q(1)) && check.is_some_and(|c| c.holds), || format!("completion at distance {d}"))?;
    Ok(format!(
        "{} fixture modules self-interleave, {} barcodes shift-interleave, {pairs} random pairs match the oracle, completion at distance {d}",
        modules.len(),
        distinct.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("matchbox barcodes", matchbox_barcodes),
        ("matchbox upset diagram", matchbox_upset),
        ("natural homology as a colimit", natural_homology_as_colimit),
        ("fig-1 discrimination", fig1_discrimination),
        ("echelon against rank oracle", echelon_oracle),
        ("poset colimit laws", poset_colimits),
        ("restrict and glue", pers_gluing),
        ("interleavings", interleavings),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.2}s): {detail}", k + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name} ({secs:.2}s): {why}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
