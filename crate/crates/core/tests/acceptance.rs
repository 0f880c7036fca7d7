//! Acceptance criteria, one printed line each. Runs with `harness = false`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use clubcat::algebra::{algebra_associativity_check, colimit_act, sset_stability_check, AlgebraObject};
use clubcat::diagram::find_diagram_isomorphism;
use clubcat::fincat::{find_isomorphism, FinCategory};
use clubcat::fixtures;
use clubcat::operads::{
    ass, club_to_operad, com, ns_iso_check, operad_to_club, swap_pair, sym_inclusion, sym_operad_to_club,
};
use clubcat::semidirect::{club_check, semidirect, Guardrails};
use clubcat::simpset::{
    boundary, disjoint_union, is_kan_fibration, iso_sset, one_point, product, standard_simplex, SimplicialMap,
    SimplicialSet,
};
use clubcat::sset_club::{associativity_check, compose, delta, pair_category, unit_law_check, PairFamily, SimplexFamily};
use clubcat::suite::{run_suite, SuiteConfig, SuiteReport, SUITES};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

/// Counts functors `c -> d` by trying every object and morphism assignment.
fn count_functors(c: &FinCategory, d: &FinCategory) -> usize {
    let n = c.object_count();
    let mut count = 0;
    let mut omap = vec![0; n];
    loop {
        count += count_morphism_maps(c, d, &omap, &mut Vec::new());
        let mut i = 0;
        while i < n && omap[i] + 1 == d.object_count() {
            omap[i] = 0;
            i += 1;
        }
        if i == n {
            return count;
        }
        omap[i] += 1;
    }
}

fn count_morphism_maps(c: &FinCategory, d: &FinCategory, omap: &[usize], mmap: &mut Vec<usize>) -> usize {
    let m = mmap.len();
    if m == c.morphism_count() {
        let ids = (0..c.object_count()).all(|x| mmap[c.identity(x)] == d.identity(omap[x]));
        let comps = c.comp_table().iter().all(|(&(g, f), &gf)| d.compose(mmap[g], mmap[f]) == Some(mmap[gf]));
        return usize::from(ids && comps);
    }
    let (s, t) = (omap[c.src(m)], omap[c.tgt(m)]);
    let mut total = 0;
    for cand in (0..d.morphism_count()).filter(|&k| d.src(k) == s && d.tgt(k) == t) {
        mmap.push(cand);
        total += count_morphism_maps(c, d, omap, mmap);
        mmap.pop();
    }
    total
}

/// Strictly increasing chains of length `k + 1` in the poset `[1] x [1]`.
fn square_chains(k: usize) -> usize {
    let pts = [(0, 0), (0, 1), (1, 0), (1, 1)];
    fn go(pts: &[(u8, u8)], last: Option<(u8, u8)>, left: usize) -> usize {
        if left == 0 {
            return 1;
        }
        pts.iter()
            .filter(|&&p| last.is_none_or(|l| l != p && l.0 <= p.0 && l.1 <= p.1))
            .map(|&p| go(pts, Some(p), left - 1))
            .sum()
    }
    go(&pts, None, k + 1)
}

/// First `(n, k)` with a horn `Lambda[n,k] -> Delta[1]` that does not extend
/// to `Delta[n]`. Maps into the nerve of `0 < 1` are vertex labellings
/// monotone along every edge present.
fn first_unfillable_horn_into_interval(max_dim: usize) -> Option<(usize, usize)> {
    for n in 1..=max_dim {
        for k in 0..=n {
            let in_horn = |i: usize, j: usize| (0..=n).any(|m| m != k && m != i && m != j);
            let pairs = || (0..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)));
            let monotone = |b: u32, horn_only: bool| {
                pairs().filter(|&(i, j)| !horn_only || in_horn(i, j)).all(|(i, j)| (b >> i) & 1 <= (b >> j) & 1)
            };
            // vertices outside the horn are free in a filler
            let fixed: u32 = (0..=n).filter(|&i| in_horn(i, i)).map(|i| 1 << i).sum();
            for bits in 0..1u32 << (n + 1) {
                let fills = (0..1u32 << (n + 1)).any(|b| b & fixed == bits & fixed && monotone(b, false));
                if monotone(bits, true) && !fills {
                    return Some((n, k));
                }
            }
        }
    }
    None
}

/// Union-find count of connected components.
fn components(s: &SimplicialSet) -> usize {
    let n = s.nondeg_count(0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    for e in 0..if s.trunc() >= 1 { s.nondeg_count(1) } else { 0 } {
        let a = root(&mut parent, s.stored_face(1, e, 0).base);
        let b = root(&mut parent, s.stored_face(1, e, 1).base);
        parent[a] = b;
    }
    (0..n).filter(|&i| root(&mut parent, i) == i).count()
}

fn coproduct(x: &AlgebraObject, y: &AlgebraObject) -> AlgebraObject {
    let (dx, dy) = (&x.diagram, &y.diagram);
    let cat = dx.category();
    let sizes = (0..cat.object_count()).map(|o| dx.size(o) + dy.size(o)).collect();
    let maps = (0..cat.morphism_count())
        .map(|m| {
            let off = dx.size(cat.tgt(m));
            dx.map(m).iter().copied().chain(dy.map(m).iter().map(|&e| e + off)).collect()
        })
        .collect();
    AlgebraObject::new(x.shape.clone(), sizes, maps).expect("coproduct of set functors")
}

fn law_clean(r: &SuiteReport, law: &str, min: usize) -> Result<(), String> {
    let l = r.law(law).ok_or(format!("law {law} missing"))?;
    ensure(l.checked >= min, format!("{law}: only {} checked", l.checked))?;
    ensure(l.failures.is_empty(), format!("{law}: {:?}", l.failures.first()))
}

fn monoidal(report: &Result<(SuiteReport, Duration), String>) -> Outcome {
    let (r, t) = report.as_ref().map_err(Clone::clone)?;
    ensure(r.samples >= 100, "fewer than 100 triples")?;
    law_clean(r, "associator is an isomorphism", 100)?;
    law_clean(r, "unitors are isomorphisms", 300)?;
    law_clean(r, "triangle", 100)?;
    law_clean(r, "pentagon", 100)?;
    law_clean(r, "associator naturality", 100)?;
    ensure(r.passed, "report not passed")?;
    ensure(*t < Duration::from_secs(60), format!("took {t:?}"))?;
    Ok(format!("{} triples, zero failures, {:.1}s", r.samples, t.as_secs_f64()))
}

fn nonsymmetry() -> Outcome {
    let (d, d2) = fixtures::nonsymmetry_pair();
    let oracle = |x: &clubcat::diagram::DiagramInCat, y: &clubcat::diagram::DiagramInCat| {
        x.fibers().iter().map(|f| count_functors(f, y.base())).sum::<usize>()
    };
    let (o1, o2) = (oracle(&d, &d2), oracle(&d2, &d));
    ensure((o1, o2) == (4, 2), format!("enumeration gives {o1} and {o2}"))?;
    let a = semidirect(&d, &d2).map_err(err)?;
    let b = semidirect(&d2, &d).map_err(err)?;
    let (na, nb) = (a.diagram().base().object_count(), b.diagram().base().object_count());
    ensure((na, nb) == (o1, o2), format!("products have {na} and {nb} objects"))?;
    ensure(find_isomorphism(a.diagram().base(), b.diagram().base()).is_none(), "bases are isomorphic")?;
    ensure(find_diagram_isomorphism(a.diagram(), b.diagram()).is_none(), "diagrams are isomorphic")?;
    Ok(format!("|Ob(D⋉D′)| = {na}, |Ob(D′⋉D)| = {nb}, no isomorphism"))
}

fn operads() -> Outcome {
    let g = &Guardrails::for_law_checks();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut ops = vec![ass(4)];
    ops.extend((0..20).map(|_| fixtures::random_operad(&mut rng, false)));
    for (i, op) in ops.iter().enumerate() {
        ns_iso_check(op.collection(), g).map_err(|e| format!("operad {i}: {e:?}"))?;
        let club = operad_to_club(op, g).map_err(err)?;
        let r = club_check(&club, g).map_err(err)?;
        ensure(r.passed(), format!("operad {i} club fails: {:?}", r.failures))?;
        let back = club_to_operad(&club, op.collection(), g).map_err(err)?;
        ensure(&back == op, format!("operad {i} does not round-trip"))?;
    }
    for i in 0..20 {
        let c = fixtures::random_collection(&mut rng);
        ns_iso_check(&c, g).map_err(|e| format!("collection {i}: {e:?}"))?;
    }
    let (mut mutations, mut rejected) = (0, 0);
    while mutations < 50 {
        let op = fixtures::random_operad(&mut rng, true);
        let Some(bad) = fixtures::mutate_operad(&mut rng, &op) else { continue };
        mutations += 1;
        rejected += usize::from(!club_check(&operad_to_club(&bad, g).map_err(err)?, g).map_err(err)?.passed());
    }
    ensure(rejected == mutations, format!("{rejected}/{mutations} mutations rejected"))?;
    Ok(format!("Ass cap 4 + 20 operads + 20 collections round-trip, {rejected}/{mutations} mutations rejected"))
}

fn symmetric() -> Outcome {
    let g = &Guardrails::for_law_checks();
    let inc = sym_inclusion(&com(3).sigma, g).map_err(err)?;
    ensure(inc.injective, "inclusion not injective")?;
    let witness = inc.missing_object.ok_or("inclusion is surjective")?;
    for (name, op) in [("Com", com(3)), ("swap pair", swap_pair())] {
        let r = club_check(&sym_operad_to_club(&op, g).map_err(err)?, g).map_err(err)?;
        ensure(r.passed(), format!("{name}: {:?}", r.failures))?;
    }
    Ok(format!("injective, missing object {witness}; Com and swap pair pass"))
}

fn sset_laws() -> Outcome {
    let trunc = 3;
    for s in [one_point(trunc), standard_simplex(1, trunc), standard_simplex(2, trunc), boundary(2, trunc)] {
        for r in unit_law_check(&Arc::new(s)) {
            ensure(r.passed(), format!("{}: {:?}", r.law, r.failures))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bases = [standard_simplex(1, trunc), standard_simplex(2, trunc), boundary(2, trunc)].map(Arc::new);
    let mut nontrivial = 0;
    for i in 0..24 {
        let base = &bases[i % 3];
        let psi = Arc::new(fixtures::random_family(&mut rng, base));
        nontrivial += usize::from(*psi != SimplexFamily::point(base.clone()));
        let u = fixtures::random_family(&mut rng, base);
        let r = associativity_check(&PairFamily::from_outer(psi, &u)).map_err(err)?;
        ensure(r.passed(), format!("family {i}: {:?}", r.failures))?;
    }
    ensure(nontrivial >= 20, format!("only {nontrivial} non-point families"))?;
    let d1 = Arc::new(standard_simplex(1, trunc));
    let oracle: Vec<usize> = (0..=trunc).map(square_chains).collect();
    ensure(oracle[..3] == [4, 5, 2], format!("chain oracle {oracle:?}"))?;
    for (s, t) in [(d1.clone(), d1.clone()), (Arc::new(boundary(2, trunc)), d1.clone()), (d1.clone(), Arc::new(standard_simplex(2, trunc)))] {
        let c = compose(&SimplexFamily::constant(s.clone(), t.clone()));
        ensure(iso_sset(&c.sset, &Arc::new(product(&s, &t))).is_some(), "constant composite is not the product")?;
    }
    let c = compose(&SimplexFamily::constant(d1.clone(), d1.clone()));
    ensure(c.sset.nondeg_counts() == oracle, format!("Δ[1]×Δ[1] counts {:?} vs {oracle:?}", c.sset.nondeg_counts()))?;
    Ok(format!("unit laws on 4 shapes, {nontrivial} nontrivial families associative, Δ[1]×Δ[1] = {:?}", &oracle[..3]))
}

fn delta_not_invertible() -> Outcome {
    let x = fixtures::collapse_family(2);
    let pairs = pair_category(&x).map_err(err)?;
    let (_, d) = delta(&x, &compose(&x), &pairs).map_err(err)?;
    ensure(d.violations().is_empty(), format!("not a functor: {:?}", d.violations()))?;
    let bijective = |v: &[usize], n: usize| {
        let mut s = v.to_vec();
        s.sort_unstable();
        s.dedup();
        v.len() == n && s.len() == n
    };
    let on_objects = bijective(d.omap(), d.tgt().object_count());
    let on_morphisms = bijective(d.mmap(), d.tgt().morphism_count());
    ensure(!(on_objects && on_morphisms), "delta is bijective")?;
    ensure(!d.is_isomorphism(), "delta reports an isomorphism")?;
    Ok(format!(
        "δ: {} → {} objects, {} → {} morphisms",
        d.src().object_count(),
        d.tgt().object_count(),
        d.src().morphism_count(),
        d.tgt().morphism_count()
    ))
}

fn algebra() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checks = 0;
    for shape in fixtures::algebra_shapes(2) {
        let pi0 = components(&shape);
        for n in 0..=3 {
            let got = colimit_act(&AlgebraObject::constant(shape.clone(), n)).size;
            ensure(got == n * pi0, format!("constant {n}: {got} vs {}", n * pi0))?;
            checks += 1;
        }
        for _ in 0..3 {
            let x = fixtures::random_set_family(&mut rng, &shape, 3);
            let y = fixtures::random_set_family(&mut rng, &shape, 3);
            let sum = colimit_act(&coproduct(&x, &y)).size;
            let parts = colimit_act(&x).size + colimit_act(&y).size;
            ensure(sum == parts, format!("coproduct {sum} vs {parts}"))?;
            checks += 1;
        }
    }
    let r = algebra_associativity_check(20, 3).map_err(err)?;
    ensure(r.samples >= 20, format!("only {} samples", r.samples))?;
    ensure(r.passed(), format!("{:?}", r.failures.first()))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(120), format!("took {t:?}"))?;
    Ok(format!("{checks} colimit identities, {} two-level samples, {:.1}s", r.samples, t.as_secs_f64()))
}

fn fibrations() -> Outcome {
    let trunc = 3;
    for n in 1..=3 {
        let mut s = one_point(trunc);
        for _ in 1..n {
            s = disjoint_union(&s, &one_point(trunc));
        }
        let r = is_kan_fibration(&SimplicialMap::to_point(Arc::new(s)), 2).map_err(err)?;
        ensure(r.holds(), format!("{n} points over a point: {:?}", r.witness))?;
    }
    let r = is_kan_fibration(&SimplicialMap::to_point(Arc::new(standard_simplex(1, trunc))), 2).map_err(err)?;
    let w = r.witness.ok_or("Δ[1] → Δ[0] reported Kan")?;
    let oracle = first_unfillable_horn_into_interval(2).ok_or("oracle found no unfillable horn")?;
    ensure((w.n, w.k) == oracle, format!("witness Λ[{},{}] vs oracle {oracle:?}", w.n, w.k))?;
    let s = sset_stability_check(50, 5).map_err(err)?;
    ensure(s.samples >= 50, format!("only {} samples", s.samples))?;
    ensure(s.passed(), format!("{:?}", s.violations.first()))?;
    Ok(format!("discrete fibrations hold, Λ[{},{}] witness, {} stability samples clean", w.n, w.k, s.samples))
}

fn determinism(first_monoidal: Option<&SuiteReport>) -> Outcome {
    let cfg = SuiteConfig { seed: 42, ..SuiteConfig::default() };
    for name in SUITES {
        let a = match (name, first_monoidal) {
            ("monoidal-laws", Some(r)) => r.to_json(),
            _ => run_suite(name, &cfg).map_err(err)?.to_json(),
        };
        let b = run_suite(name, &cfg).map_err(err)?.to_json();
        ensure(a == b, format!("{name} differs between runs"))?;
    }
    Ok(format!("{} suites byte-identical across two runs", SUITES.len()))
}

fn main() {
    let cfg = SuiteConfig { seed: 42, ..SuiteConfig::default() };
    let (mono, t) = timed(|| run_suite("monoidal-laws", &cfg));
    let mono = mono.map(|r| (r, t)).map_err(err);
    let criteria: Vec<Criterion> = vec![
        ("monoidal laws", Box::new(|| monoidal(&mono))),
        ("non-symmetry witness", Box::new(nonsymmetry)),
        ("operad correspondence", Box::new(operads)),
        ("symmetric case", Box::new(symmetric)),
        ("sset club laws", Box::new(sset_laws)),
        ("δ non-invertibility", Box::new(delta_not_invertible)),
        ("algebra laws", Box::new(algebra)),
        ("fibration machinery", Box::new(fibrations)),
        ("determinism", Box::new(|| determinism(mono.as_ref().ok().map(|(r, _)| r)))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
