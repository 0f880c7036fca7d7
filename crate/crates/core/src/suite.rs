//! Seeded law-check suites with deterministic JSON reports.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{algebra_associativity_check, colimit_act, sset_stability_check, AlgebraObject};
use crate::diagram::DiagramInCat;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::io::FORMAT_VERSION;
use crate::operads::{
    ass, club_to_operad, com, ns_iso_check, operad_to_club, swap_pair, sym_inclusion, sym_operad_to_club, unit_only,
    unital_ass, NsOperad,
};
use crate::semidirect::{
    associator, associator_naturality_check, club_check, invert, is_verified_inverse, pentagon_check, triangle_check,
    unitors, Guardrails, LawFailure, TripleProducts,
};
use crate::simpset::{
    boundary, disjoint_union, is_kan_fibration, iso_sset, one_point, product, standard_simplex, MonotoneMap, Simplex,
    SimplicialMap, SimplicialSet,
};
use crate::sset_club::{
    associativity_check, compose, delta, delta_naturality_check, pair_category, unit_law_check, ClubMorphismSSet,
    PairFamily, SimplexFamily,
};

pub const SUITES: [&str; 6] = ["monoidal-laws", "club-check", "sset-laws", "operad-bijection", "algebra-laws", "stability"];

#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    pub seed: u64,
    /// per-suite default when unset
    pub samples: Option<usize>,
    pub trunc: Option<usize>,
    /// `for_sampling` for the monoidal suite and `for_law_checks` elsewhere when unset
    pub guard: Option<Guardrails>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawResult {
    pub law: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub version: u64,
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trunc: Option<usize>,
    pub passed: bool,
    pub laws: Vec<LawResult>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        let mut out = format!("{}: {}\n", self.suite, if self.passed { "PASS" } else { "FAIL" });
        for l in &self.laws {
            out += &format!("  {}: {} checked, {} failed\n", l.law, l.checked, l.failures.len());
            if let Some(f) = l.failures.first() {
                out += &format!("    first failure: {f}\n");
            }
        }
        for n in &self.notes {
            out += &format!("  note: {n}\n");
        }
        out
    }

    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.law == name)
    }
}

#[derive(Default)]
struct Laws {
    laws: Vec<LawResult>,
    notes: Vec<String>,
}

impl Laws {
    fn record(&mut self, law: &str, failure: Option<String>) {
        let i = match self.laws.iter().position(|l| l.law == law) {
            Some(i) => i,
            None => {
                self.laws.push(LawResult { law: law.to_string(), checked: 0, failures: Vec::new() });
                self.laws.len() - 1
            }
        };
        self.laws[i].checked += 1;
        self.laws[i].failures.extend(failure);
    }

    fn expect(&mut self, law: &str, ok: bool, witness: impl FnOnce() -> String) {
        self.record(law, (!ok).then(witness));
    }

    fn finish(self, suite: &str, cfg: &SuiteConfig, samples: usize, trunc: Option<usize>) -> SuiteReport {
        let passed = self.laws.iter().all(|l| l.failures.is_empty());
        SuiteReport {
            version: FORMAT_VERSION,
            suite: suite.to_string(),
            seed: cfg.seed,
            samples,
            trunc,
            passed,
            laws: self.laws,
            notes: self.notes,
        }
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match name {
        "monoidal-laws" => monoidal_laws(cfg),
        "club-check" => club_laws(cfg),
        "sset-laws" => sset_laws(cfg),
        "operad-bijection" => operad_bijection(cfg),
        "algebra-laws" => algebra_laws(cfg),
        "stability" => stability(cfg),
        other => Err(Error::Schema(format!("unknown suite {other}; expected one of {}", SUITES.join(", ")))),
    }
}

impl SuiteConfig {
    fn guard_or(&self, default: Guardrails) -> Guardrails {
        self.guard.unwrap_or(default)
    }
}

fn failure_text(f: Option<LawFailure>) -> Option<String> {
    f.map(|f| f.witness)
}

fn monoidal_laws(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let samples = cfg.samples.unwrap_or(100);
    let guard = cfg.guard_or(Guardrails::for_sampling());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut laws = Laws::default();
    let mut rejected = 0usize;
    let mut accepted = 0usize;
    while accepted < samples {
        let [x, y, z]: [Arc<DiagramInCat>; 3] =
            std::array::from_fn(|_| Arc::new(fixtures::random_diagram(&mut rng, 3, 3)));
        let f = fixtures::random_morphism_into(&mut rng, &x, 2);
        let g = fixtures::random_morphism_into(&mut rng, &y, 2);
        let h = fixtures::random_morphism_into(&mut rng, &z, 2);
        match monoidal_sample(&x, &y, &z, [&f, &g, &h], &guard) {
            Ok(results) => {
                for (law, r) in results {
                    laws.record(law, r);
                }
                accepted += 1;
            }
            Err(Error::Guardrail(_)) => {
                rejected += 1;
                if rejected > 20 * samples.max(1) {
                    return Err(Error::Guardrail("too many samples exceed the guardrails".into()));
                }
            }
            Err(e) => return Err(e),
        }
    }
    laws.notes.push(format!("{accepted} triples with bases and fibers of at most 3 objects; {rejected} resampled for exceeding guardrails"));
    laws.notes.push("pentagon checked on (X, X, Y, Z)".into());
    Ok(laws.finish("monoidal-laws", cfg, samples, None))
}

type Sample = Vec<(&'static str, Option<String>)>;

fn monoidal_sample(
    x: &Arc<DiagramInCat>,
    y: &Arc<DiagramInCat>,
    z: &Arc<DiagramInCat>,
    ms: [&crate::diagram::DiagramMorphism; 3],
    guard: &Guardrails,
) -> Result<Sample> {
    let mut out = Vec::new();
    let p = TripleProducts::new(x, y, z, guard)?;
    let a = associator(&p)?;
    let problems = a.validate();
    let iso = match invert(&a) {
        Some(inv) if problems.is_empty() && is_verified_inverse(&a, &inv) => None,
        Some(_) => Some(format!("associator round trip failed: {problems:?}")),
        None => Some("associator is not invertible".into()),
    };
    out.push(("associator is an isomorphism", iso));
    for d in [x, y, z] {
        let r = match unitors(d, guard) {
            Ok(_) => None,
            Err(Error::Invalid(m)) => Some(m),
            Err(e) => return Err(e),
        };
        out.push(("unitors are isomorphisms", r));
    }
    out.push(("triangle", failure_text(triangle_check(x, y, guard)?)));
    out.push(("pentagon", failure_text(pentagon_check(x, x, y, z, guard)?)));
    out.push(("associator naturality", failure_text(associator_naturality_check(ms[0], ms[1], ms[2], guard)?)));
    Ok(out)
}

fn club_laws(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mutations = cfg.samples.unwrap_or(10);
    let g = &cfg.guard_or(Guardrails::for_law_checks());
    let mut laws = Laws::default();
    let named: Vec<(&str, NsOperad)> = vec![
        ("unit operad", unit_only()),
        ("Ass cap 4", ass(4)),
        ("unital Ass cap 3", unital_ass(3)),
    ];
    for (name, op) in named {
        let report = club_check(&operad_to_club(&op, g)?, g)?;
        laws.expect("club laws (operad clubs)", report.passed(), || format!("{name}: {:?}", report.failures));
    }
    for (name, op) in [("Com cap 3", com(3)), ("swap pair", swap_pair())] {
        let report = club_check(&sym_operad_to_club(&op, g)?, g)?;
        laws.expect("club laws (symmetric operad clubs)", report.passed(), || format!("{name}: {:?}", report.failures));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..mutations {
        let op = fixtures::random_operad(&mut rng, true);
        let Some(bad) = fixtures::mutate_operad(&mut rng, &op) else { continue };
        let report = club_check(&operad_to_club(&bad, g)?, g)?;
        let witness = report.failures.first().map(|f| format!("{}: {}", f.law, f.witness));
        laws.expect("corrupted composition is rejected", !report.passed(), || "a corrupted operad passed".into());
        if let Some(w) = witness {
            if laws.notes.is_empty() {
                laws.notes.push(format!("first corruption witness: {w}"));
            }
        }
    }
    Ok(laws.finish("club-check", cfg, mutations, None))
}

fn operad_bijection(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let samples = cfg.samples.unwrap_or(20);
    let g = &cfg.guard_or(Guardrails::for_law_checks());
    let mut laws = Laws::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let round_trip = |laws: &mut Laws, op: &NsOperad| -> Result<()> {
        let iso = ns_iso_check(op.collection(), g);
        laws.expect("P∘P ≅ P ⋉ P", iso.is_ok(), || format!("{:?}", iso.as_ref().err()));
        let club = operad_to_club(op, g)?;
        let report = club_check(&club, g)?;
        laws.expect("operad club satisfies the club laws", report.passed(), || format!("{:?}", report.failures));
        let back = club_to_operad(&club, op.collection(), g);
        laws.expect("club_to_operad inverts operad_to_club", back.as_ref().ok() == Some(op), || {
            format!("round trip differs for {:?}", op.collection().levels())
        });
        Ok(())
    };
    round_trip(&mut laws, &ass(4))?;
    for _ in 0..samples {
        let op = fixtures::random_operad(&mut rng, false);
        round_trip(&mut laws, &op)?;
    }
    let mut mutations = 0;
    while mutations < 50 {
        let op = fixtures::random_operad(&mut rng, true);
        let Some(bad) = fixtures::mutate_operad(&mut rng, &op) else { continue };
        mutations += 1;
        let report = club_check(&operad_to_club(&bad, g)?, g)?;
        laws.expect("mutated composition fails the club laws", !report.passed(), || {
            format!("mutation of {:?} passed", bad.collection().levels())
        });
    }
    let inc = sym_inclusion(&com(3).sigma, g)?;
    laws.expect("symmetric P∘P ⊂ P ⋉ P is injective", inc.injective, || "not injective".into());
    laws.expect("symmetric P∘P ⊂ P ⋉ P is not surjective", inc.missing_object.is_some(), || "surjective".into());
    if let Some(m) = &inc.missing_object {
        laws.notes.push(format!("object of the symmetric composite outside the image: {m}"));
    }
    for (name, op) in [("Com cap 3", com(3)), ("swap pair", swap_pair())] {
        let report = club_check(&sym_operad_to_club(&op, g)?, g)?;
        laws.expect("symmetric operad club satisfies the club laws", report.passed(), || {
            format!("{name}: {:?}", report.failures)
        });
    }
    laws.notes.push(format!("Ass at cap 4 plus {samples} random operads; 50 mutations of group operads"));
    Ok(laws.finish("operad-bijection", cfg, samples, None))
}

fn sset_laws(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let trunc = cfg.trunc.unwrap_or(3);
    let samples = cfg.samples.unwrap_or(20);
    let mut laws = Laws::default();
    for s in [one_point(trunc), standard_simplex(1, trunc), standard_simplex(2, trunc), boundary(2, trunc)] {
        for r in unit_law_check(&Arc::new(s)) {
            laws.expect("unit laws", r.passed(), || format!("{}: {:?}", r.law, r.failures));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bases = [standard_simplex(1, trunc), standard_simplex(2, trunc), boundary(2, trunc)].map(Arc::new);
    let mut point_fallbacks = 0;
    for i in 0..samples {
        let base = &bases[i % bases.len()];
        let psi = Arc::new(fixtures::random_family(&mut rng, base));
        point_fallbacks += usize::from(*psi == SimplexFamily::point(base.clone()));
        let u = fixtures::random_family(&mut rng, base);
        let r = associativity_check(&PairFamily::from_outer(psi, &u))?;
        laws.expect("associativity", r.passed(), || format!("sample {i}: {:?}", r.failures));
    }
    // the pair category grows quickly with the truncation
    let low = bases.clone().map(|b| Arc::new(b.truncated(trunc.min(2))));
    for i in 0..5 {
        let psi = Arc::new(fixtures::random_family(&mut rng, &low[i % low.len()]));
        let n = delta_naturality_check(&ClubMorphismSSet::identity(psi))?;
        laws.expect("delta naturality", n.passed(), || format!("sample {i}: {:?}", n.failures));
    }
    let d1 = Arc::new(standard_simplex(1, trunc));
    let c = compose(&SimplexFamily::constant(d1.clone(), d1.clone()));
    let p = Arc::new(product(&d1, &d1));
    laws.expect("constant family composes to the product", iso_sset(&c.sset, &p).is_some(), || {
        format!("{:?} vs {:?}", c.sset.nondeg_counts(), p.nondeg_counts())
    });
    laws.notes.push(format!("Δ[1] × Δ[1] non-degenerate counts {:?}", c.sset.nondeg_counts()));
    let x = fixtures::collapse_family(trunc.min(2));
    let pairs = pair_category(&x)?;
    let (_, d) = delta(&x, &compose(&x), &pairs)?;
    laws.expect("delta is a functor", d.violations().is_empty(), || format!("{:?}", d.violations()));
    laws.expect("delta is not invertible", !d.is_isomorphism(), || "delta is an isomorphism".into());
    laws.notes.push(format!(
        "{samples} random families over Δ[1], Δ[2], ∂Δ[2] at trunc {trunc}, {point_fallbacks} of them the point family"
    ));
    Ok(laws.finish("sset-laws", cfg, samples, Some(trunc)))
}

/// Connected components of `S` from its vertices and edges.
fn components(s: &SimplicialSet) -> usize {
    let n = s.nondeg_count(0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    if s.trunc() >= 1 {
        for e in 0..s.nondeg_count(1) {
            let a = find(&mut parent, s.stored_face(1, e, 0).base);
            let b = find(&mut parent, s.stored_face(1, e, 1).base);
            parent[a] = b;
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

fn coproduct(x: &AlgebraObject, y: &AlgebraObject) -> Result<AlgebraObject> {
    let s = &x.shape;
    let nd = |k, v| Simplex::nondegenerate(k, v);
    let sizes: Vec<Vec<usize>> = (0..=s.trunc())
        .map(|k| (0..s.nondeg_count(k)).map(|v| x.value(&nd(k, v)) + y.value(&nd(k, v))).collect())
        .collect();
    let faces = (0..=s.trunc())
        .map(|k| {
            (0..s.nondeg_count(k))
                .map(|v| {
                    if k == 0 {
                        return Vec::new();
                    }
                    (0..=k)
                        .map(|i| {
                            let th = MonotoneMap::face(k, i);
                            let off = x.value(s.stored_face(k, v, i));
                            let left = (0..x.value(&nd(k, v))).map(|e| x.act(&nd(k, v), &th, e));
                            let right = (0..y.value(&nd(k, v))).map(|e| off + y.act(&nd(k, v), &th, e));
                            left.chain(right).collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect::<Vec<Vec<Vec<Vec<usize>>>>>();
    AlgebraObject::from_set_family(s.clone(), &sizes, &faces)
}

fn algebra_laws(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let samples = cfg.samples.unwrap_or(20);
    let mut laws = Laws::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for shape in fixtures::algebra_shapes(2) {
        for n in 0..=3 {
            let c = colimit_act(&AlgebraObject::constant(shape.clone(), n));
            let want = n * components(&shape);
            laws.expect("constant diagram", c.size == want, || format!("constant {n}: {} vs {want}", c.size));
        }
        let x = fixtures::random_set_family(&mut rng, &shape, 3);
        let y = fixtures::random_set_family(&mut rng, &shape, 3);
        let sum = colimit_act(&coproduct(&x, &y)?).size;
        let parts = colimit_act(&x).size + colimit_act(&y).size;
        laws.expect("coproduct", sum == parts, || format!("{sum} vs {parts}"));
    }
    let r = algebra_associativity_check(samples, cfg.seed)?;
    laws.laws.push(LawResult { law: "two-stage action equals composite action".into(), checked: r.samples, failures: r.failures });
    laws.notes.push(r.coverage);
    Ok(laws.finish("algebra-laws", cfg, samples, None))
}

fn stability(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let samples = cfg.samples.unwrap_or(50);
    let trunc = 2;
    let mut laws = Laws::default();
    // horns up to dimension 2 need simplices of dimension 3
    let kan_trunc = 3;
    for n in 1..=3 {
        let mut s = one_point(kan_trunc);
        for _ in 1..n {
            s = disjoint_union(&s, &one_point(kan_trunc));
        }
        let r = is_kan_fibration(&SimplicialMap::to_point(Arc::new(s)), kan_trunc - 1)?;
        laws.expect("discrete over a point is Kan", r.holds(), || format!("{:?}", r.witness));
    }
    let r = is_kan_fibration(&SimplicialMap::to_point(Arc::new(standard_simplex(1, kan_trunc))), kan_trunc - 1)?;
    laws.expect("Δ[1] → Δ[0] is not Kan", !r.holds(), || "no horn witness found".into());
    if let Some(w) = &r.witness {
        laws.notes.push(format!("Δ[1] → Δ[0] horn witness: Λ[{},{}] faces {:?} over {}", w.n, w.k, w.faces, w.target));
    }
    let s = sset_stability_check(samples, cfg.seed)?;
    laws.laws.push(LawResult { law: "fibrations are stable under composition".into(), checked: s.samples, failures: s.violations });
    laws.notes.push(s.coverage);
    Ok(laws.finish("stability", cfg, samples, Some(trunc)))
}
