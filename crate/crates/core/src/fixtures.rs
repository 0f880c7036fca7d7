//! Seeded random fixtures and the small named examples used by the suites.

use std::ops::ControlFlow;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{DiagramInCat, DiagramMorphism};
use crate::fincat::{compose_functors, for_each_functor, FinCategory, Functor};
use crate::algebra::{two_level, AlgebraObject, SetFunctor, TwoLevel};
use crate::operads::{monoid_operad, Collection, NsOperad};
use crate::simpset::{
    boundary, disjoint_union, enumerate_maps, one_point, standard_simplex, Simplex, SimplicialMap, SimplicialSet,
};
use crate::sset_club::{ClubMorphismSSet, SimplexFamily};

/// Small fibers with at most `max_objects` objects.
pub fn fiber_pool(max_objects: usize) -> Vec<Arc<FinCategory>> {
    let all = [
        FinCategory::terminal(),
        FinCategory::discrete_n(2),
        FinCategory::walking_arrow(),
        FinCategory::discrete_n(3),
        FinCategory::ordinal(2),
        FinCategory::preorder(&["0", "1", "2"], |i, j| i == j || (i == 0 && j > 0)),
    ];
    all.into_iter().filter(|c| c.object_count() <= max_objects).map(Arc::new).collect()
}

fn all_functors(c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> Vec<Functor> {
    let mut out = Vec::new();
    for_each_functor(c, d, None, |o, m| {
        out.push(Functor::from_parts(c.clone(), d.clone(), o.to_vec(), m.to_vec()));
        ControlFlow::Continue(())
    });
    out
}

/// A random finite poset on `n` objects, as a category.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize) -> FinCategory {
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
        for cell in row.iter_mut().skip(i + 1) {
            *cell = rng.gen_bool(0.5);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    FinCategory::preorder(&names, |i, j| leq[i][j])
}

/// A random valid diagram: discrete base with arbitrary fibers, a chain
/// with random step functors, or a constant diagram over a random poset.
pub fn random_diagram<R: Rng>(rng: &mut R, max_base: usize, max_fiber_objects: usize) -> DiagramInCat {
    let pool = fiber_pool(max_fiber_objects);
    let n = rng.gen_range(1..=max_base.max(1));
    match rng.gen_range(0..3) {
        0 => {
            let base = Arc::new(FinCategory::discrete_n(n));
            let fibers: Vec<_> = (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect();
            let maps = (0..n).map(|i| Functor::identity(fibers[i].clone())).collect();
            DiagramInCat::new(base, fibers, maps).expect("discrete diagram")
        }
        1 => {
            let base = Arc::new(FinCategory::ordinal(n - 1));
            let fibers: Vec<_> = (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect();
            let steps: Vec<Functor> = (0..n.saturating_sub(1))
                .map(|i| all_functors(&fibers[i], &fibers[i + 1]).choose(rng).unwrap().clone())
                .collect();
            let maps = base
                .morphisms()
                .iter()
                .map(|m| {
                    let mut f = Functor::identity(fibers[m.src].clone());
                    for step in &steps[m.src..m.tgt] {
                        f = compose_functors(step, &f).expect("chain step");
                    }
                    f
                })
                .collect();
            DiagramInCat::new(base, fibers, maps).expect("chain diagram")
        }
        _ => {
            let base = Arc::new(random_poset(rng, n));
            let fiber = pool.choose(rng).unwrap().clone();
            let maps = vec![Functor::identity(fiber.clone()); base.morphism_count()];
            DiagramInCat::new(base, vec![fiber; n], maps).expect("constant diagram")
        }
    }
}

/// `F^* X`: the diagram `(D1, R o F)` with the identity-component morphism to `X`.
pub fn pullback(f: &Functor, x: &Arc<DiagramInCat>) -> DiagramMorphism {
    let d1 = f.src();
    let fibers: Vec<_> = (0..d1.object_count()).map(|d| x.fiber(f.obj(d)).clone()).collect();
    let maps = (0..d1.morphism_count()).map(|m| x.fiber_map(f.mor(m)).clone()).collect();
    let src = Arc::new(DiagramInCat::new(d1.clone(), fibers.clone(), maps).expect("pullback"));
    let rho = fibers.into_iter().map(Functor::identity).collect();
    DiagramMorphism::new(src, x.clone(), f.clone(), rho).expect("pullback morphism")
}

/// A natural section of `X` as a morphism `X -> constantify(D)` over the
/// identity, chosen at random among the first few when any exists.
pub fn random_section<R: Rng>(rng: &mut R, x: &Arc<DiagramInCat>) -> Option<DiagramMorphism> {
    let base = x.base();
    let n = base.object_count();
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut pick = vec![0usize; n];
    fn search(x: &DiagramInCat, d: usize, pick: &mut Vec<usize>, found: &mut Vec<Vec<usize>>) {
        if found.len() >= 64 {
            return;
        }
        if d == pick.len() {
            found.push(pick.clone());
            return;
        }
        for a in 0..x.fiber(d).object_count() {
            pick[d] = a;
            let ok = x.base().morphisms().iter().enumerate().all(|(m, mor)| {
                mor.src.max(mor.tgt) > d || x.fiber_map(m).obj(pick[mor.src]) == pick[mor.tgt]
            });
            if ok {
                search(x, d + 1, pick, found);
            }
        }
    }
    search(x, 0, &mut pick, &mut found);
    let choice = found.choose(rng)?.clone();
    let one = Arc::new(FinCategory::terminal());
    let src = Arc::new(crate::diagram::constantify(base));
    let rho = (0..n)
        .map(|d| {
            let fib = x.fiber(d);
            Functor::from_parts(one.clone(), fib.clone(), vec![choice[d]], vec![fib.identity(choice[d])])
        })
        .collect();
    Some(DiagramMorphism::new(x.clone(), src, Functor::identity(base.clone()), rho).expect("section"))
}

/// The morphism `constantify(D) -> X` over the identity with trivial components.
pub fn collapse(x: &Arc<DiagramInCat>) -> DiagramMorphism {
    let src = Arc::new(crate::diagram::constantify(x.base()));
    let one = src.fiber(0).clone();
    let rho = x
        .fibers()
        .iter()
        .map(|f| {
            Functor::from_parts(f.clone(), one.clone(), vec![0; f.object_count()], vec![0; f.morphism_count()])
        })
        .collect();
    DiagramMorphism::new(src, x.clone(), Functor::identity(x.base().clone()), rho).expect("collapse")
}

/// A random morphism into `x`: a pullback along a random functor from a
/// small random base, sometimes preceded by a collapse.
pub fn random_morphism_into<R: Rng>(rng: &mut R, x: &Arc<DiagramInCat>, max_base: usize) -> DiagramMorphism {
    let n = rng.gen_range(1..=max_base.max(1));
    let d1 = Arc::new(if rng.gen_bool(0.5) { FinCategory::discrete_n(n) } else { random_poset(rng, n) });
    let functors = all_functors(&d1, x.base());
    let f = functors.choose(rng).expect("functors into a nonempty base").clone();
    let p = pullback(&f, x);
    if rng.gen_bool(0.3) {
        return crate::diagram::compose_diagram_morphisms(&p, &collapse(p.src())).expect("composable");
    }
    p
}

/// The two diagrams of the non-symmetry example: `X = (1, R(*) = 2)` and
/// `Y = (2, constant 1)` with `2` the discrete category on two objects.
pub fn nonsymmetry_pair() -> (Arc<DiagramInCat>, Arc<DiagramInCat>) {
    let one = Arc::new(FinCategory::terminal());
    let two = Arc::new(FinCategory::discrete_n(2));
    let x = DiagramInCat::new(one, vec![two.clone()], vec![Functor::identity(two.clone())]).expect("x");
    let y = crate::diagram::constantify(&two);
    (Arc::new(x), Arc::new(y))
}

/// Small simplicial sets used as random fibers.
pub fn sset_pool(trunc: usize) -> Vec<Arc<SimplicialSet>> {
    vec![
        Arc::new(one_point(trunc)),
        Arc::new(disjoint_union(&one_point(trunc), &one_point(trunc))),
        Arc::new(standard_simplex(1, trunc)),
        Arc::new(boundary(2, trunc)),
    ]
}

/// A random family over `base` with fibers from the pool and face maps
/// chosen by backtracking until the simplicial identities hold. Falls back
/// to the point family after repeated failures.
pub fn random_family<R: Rng>(rng: &mut R, base: &Arc<SimplicialSet>) -> SimplexFamily {
    let pool = sset_pool(base.trunc());
    for _ in 0..32 {
        let values: Vec<Vec<Arc<SimplicialSet>>> = (0..=base.trunc())
            .map(|k| (0..base.nondeg_count(k)).map(|_| pool.choose(rng).unwrap().clone()).collect())
            .collect();
        let face_maps = (0..=base.trunc()).map(|k| vec![Vec::new(); base.nondeg_count(k)]).collect();
        let mut fam = SimplexFamily::from_parts(base.clone(), values, face_maps);
        if fill_faces(rng, &mut fam) {
            debug_assert!(fam.validate().is_empty());
            return fam;
        }
    }
    SimplexFamily::point(base.clone())
}

fn fill_faces<R: Rng>(rng: &mut R, fam: &mut SimplexFamily) -> bool {
    let base = fam.base().clone();
    for k in 1..=base.trunc() {
        for y in 0..base.nondeg_count(k) {
            let cands: Vec<Vec<SimplicialMap>> = (0..=k)
                .map(|i| {
                    let face = base.stored_face(k, y, i);
                    let mut c = enumerate_maps(&fam.values[k][y], fam.value(face), 32);
                    c.shuffle(rng);
                    c
                })
                .collect();
            let mut chosen = Vec::new();
            if !pick_faces(fam, k, y, &cands, &mut chosen) {
                return false;
            }
            fam.face_maps[k][y] = chosen;
        }
    }
    true
}

fn pick_faces(
    fam: &SimplexFamily,
    k: usize,
    y: usize,
    cands: &[Vec<SimplicialMap>],
    chosen: &mut Vec<SimplicialMap>,
) -> bool {
    let j = chosen.len();
    if j == cands.len() {
        return true;
    }
    for c in &cands[j] {
        if k < 2 || (0..j).all(|i| fam.identity_holds(k, y, i, j, &chosen[i], c)) {
            chosen.push(c.clone());
            if pick_faces(fam, k, y, cands, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Over `Delta[1]`: vertices get `Delta[1]` and two points, the edge gets
/// `Delta[1]`, with the identity and the collapse to the first point.
pub fn collapse_family(trunc: usize) -> SimplexFamily {
    let base = Arc::new(standard_simplex(1, trunc));
    let a = Arc::new(standard_simplex(1, trunc));
    let two = Arc::new(disjoint_union(&one_point(trunc), &one_point(trunc)));
    let to_two = enumerate_maps(&a, &two, 1).remove(0);
    let values = vec![vec![a.clone(), two], vec![a.clone()]];
    // d0 of the edge is vertex [1], d1 is vertex [0]
    let face_maps = vec![vec![Vec::new(), Vec::new()], vec![vec![to_two, SimplicialMap::identity(a)]]];
    let mut values = values;
    let mut face_maps = face_maps;
    values.resize(trunc + 1, Vec::new());
    face_maps.resize(trunc + 1, Vec::new());
    SimplexFamily::new(base, values, face_maps).unwrap()
}

/// Small commutative monoids as `(size, table, unit, is_group)`.
pub fn small_monoids() -> Vec<(usize, Vec<Vec<usize>>, usize, bool)> {
    vec![
        (1, vec![vec![0]], 0, true),
        (2, vec![vec![0, 1], vec![1, 0]], 0, true),
        (3, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]], 0, true),
        (2, vec![vec![0, 1], vec![1, 1]], 0, false),
        (2, vec![vec![0, 0], vec![0, 1]], 1, false),
    ]
}

/// A random graded collection small enough for `P∘P` within the law-check
/// guardrails.
pub fn random_collection<R: Rng>(rng: &mut R) -> Collection {
    let cap = rng.gen_range(1..=3);
    let max = if cap == 3 { 1 } else { 2 };
    let levels = (0..=cap)
        .map(|n| {
            let size = if n == 1 { rng.gen_range(1..=max) } else { rng.gen_range(0..=max) };
            (0..size).map(|i| format!("p{n}_{i}")).collect()
        })
        .collect();
    Collection::new(levels).unwrap()
}

/// A random operad of a small commutative monoid; `groups_only` restricts to
/// nontrivial groups at cap at least 2, where every composition entry is
/// pinned down by the laws. At cap 1, setting `1·1 = 1` in Z/2 gives the
/// lawful OR monoid.
pub fn random_operad<R: Rng>(rng: &mut R, groups_only: bool) -> NsOperad {
    let pool: Vec<_> = small_monoids().into_iter().filter(|m| !groups_only || (m.3 && m.0 > 1)).collect();
    let (size, table, unit, _) = pool.choose(rng).unwrap().clone();
    let cap = rng.gen_range(if groups_only { 2 } else { 1 }..=3);
    let nullary = cap < 3 && rng.gen_bool(0.5);
    monoid_operad(size, &table, unit, cap, nullary)
}

/// Replaces one composition entry by a different element of the same arity.
pub fn mutate_operad<R: Rng>(rng: &mut R, op: &NsOperad) -> Option<NsOperad> {
    let c = op.collection();
    let choices: Vec<_> = op.gamma().iter().filter(|(_, &r)| c.ids(c.arity(r)).len() > 1).collect();
    let (t, &r) = *choices.choose(rng)?;
    let others: Vec<usize> = c.ids(c.arity(r)).filter(|&g| g != r).collect();
    Some(op.with_entry(t.clone(), *others.choose(rng).unwrap()))
}

/// Shapes used for two-level algebra samples.
pub fn algebra_shapes(trunc: usize) -> Vec<Arc<SimplicialSet>> {
    let pt = one_point(trunc);
    vec![
        Arc::new(standard_simplex(1, trunc)),
        Arc::new(boundary(2, trunc)),
        Arc::new(disjoint_union(&pt, &pt)),
        Arc::new(standard_simplex(2, trunc)),
    ]
}

/// A random set-valued family over `shape` with values of size at most
/// `max`; degeneracies act as identities. Falls back to the constant
/// singleton.
pub fn random_set_family<R: Rng>(rng: &mut R, shape: &Arc<SimplicialSet>, max: usize) -> AlgebraObject {
    for _ in 0..64 {
        let sizes: Vec<Vec<usize>> =
            (0..=shape.trunc()).map(|k| (0..shape.nondeg_count(k)).map(|_| rng.gen_range(0..=max)).collect()).collect();
        let mut ok = true;
        let faces: Vec<Vec<Vec<Vec<usize>>>> = (0..=shape.trunc())
            .map(|k| {
                (0..shape.nondeg_count(k))
                    .map(|y| {
                        if k == 0 {
                            return Vec::new();
                        }
                        (0..=k)
                            .map(|i| {
                                let face = shape.stored_face(k, y, i);
                                let n = sizes[face.base_dim()][face.base];
                                if n == 0 && sizes[k][y] > 0 {
                                    ok = false;
                                    return Vec::new();
                                }
                                (0..sizes[k][y]).map(|_| rng.gen_range(0..n.max(1))).collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        if ok {
            if let Ok(x) = AlgebraObject::from_set_family(shape.clone(), &sizes, &faces) {
                return x;
            }
        }
    }
    AlgebraObject::constant(shape.clone(), 1)
}

/// Objects reachable from `seeds` along morphisms.
fn upset(cat: &FinCategory, seeds: &[usize]) -> Vec<bool> {
    let mut inside = vec![false; cat.object_count()];
    let mut stack = seeds.to_vec();
    while let Some(o) = stack.pop() {
        if !inside[o] {
            inside[o] = true;
            stack.extend(cat.out_objects(o).iter().copied());
        }
    }
    inside
}

/// A random family over `shape` and a functor on its pair category of the
/// form `E(s) ⊔ U_1 ⊔ .. ⊔ U_r`: `E` pulled back from a random set family
/// on `shape`, each `U_i` a singleton on an upward-closed set of objects.
/// Values have at most 3 elements.
pub fn random_two_level<R: Rng>(rng: &mut R, shape: &Arc<SimplicialSet>) -> crate::Result<TwoLevel> {
    let family = Arc::new(random_family(rng, shape));
    let emax = rng.gen_range(1..=2);
    let e = random_set_family(rng, shape, emax);
    let r = rng.gen_range(0..=3 - emax);
    two_level(family, |pairs| {
        let pc = pairs.product.category().clone();
        let ups: Vec<Vec<bool>> = (0..r)
            .map(|_| {
                let seeds: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..pc.object_count())).collect();
                upset(&pc, &seeds)
            })
            .collect();
        let base_size = |o: usize| e.diagram.size(pairs.product.object(o).0);
        let extra = |o: usize| ups.iter().filter(|u| u[o]).count();
        let sizes = (0..pc.object_count()).map(|o| base_size(o) + extra(o)).collect();
        let maps = (0..pc.morphism_count())
            .map(|m| {
                let (s, t) = (pc.src(m), pc.tgt(m));
                let (_, alpha, _) = pairs.product.morphism(m);
                let mut f: Vec<usize> = e.diagram.map(alpha).to_vec();
                let (mut at_s, mut at_t) = (0, 0);
                for u in &ups {
                    if u[s] {
                        f.push(base_size(t) + at_t);
                        at_s += 1;
                    }
                    if u[t] {
                        at_t += 1;
                    }
                }
                debug_assert_eq!(at_s + base_size(s), f.len());
                f
            })
            .collect();
        SetFunctor::from_parts(pc.clone(), sizes, maps)
    })
}

/// `f ⊔ g`.
pub fn sum_map(f: &SimplicialMap, g: &SimplicialMap) -> SimplicialMap {
    let src = Arc::new(disjoint_union(f.src(), g.src()));
    let tgt = Arc::new(disjoint_union(f.tgt(), g.tgt()));
    let images = (0..=src.trunc())
        .map(|k| {
            let mut level: Vec<Simplex> = f.images()[k].clone();
            level.extend(g.images()[k].iter().map(|s| Simplex {
                eta: s.eta.clone(),
                base: s.base + f.tgt().nondeg_count(s.base_dim()),
            }));
            level
        })
        .collect();
    SimplicialMap::from_parts(src, tgt, images)
}

/// The left inclusion `a -> a ⊔ c`.
pub fn inl_map(a: &Arc<SimplicialSet>, c: &Arc<SimplicialSet>) -> SimplicialMap {
    let tgt = Arc::new(disjoint_union(a, c));
    let images =
        (0..=a.trunc()).map(|k| (0..a.nondeg_count(k)).map(|x| Simplex::nondegenerate(k, x)).collect()).collect();
    SimplicialMap::from_parts(a.clone(), tgt, images)
}

/// `psi ⊔ T` fibrewise, with the face maps extended by the identity.
fn widen(psi: &SimplexFamily, t: &Arc<SimplicialSet>) -> crate::Result<SimplexFamily> {
    let b = psi.base();
    let id_t = SimplicialMap::identity(t.clone());
    let values = (0..=b.trunc())
        .map(|k| (0..b.nondeg_count(k)).map(|y| Arc::new(disjoint_union(psi.value_nd(k, y), t))).collect())
        .collect();
    let faces = (0..=b.trunc())
        .map(|k| {
            (0..b.nondeg_count(k))
                .map(|y| if k == 0 { Vec::new() } else { (0..=k).map(|i| sum_map(psi.face_map(k, y, i), &id_t)).collect() })
                .collect()
        })
        .collect();
    SimplexFamily::new(b.clone(), values, faces)
}

/// Joins families over `S` and `S''` into one over `S ⊔ S''`.
fn join(left: &SimplexFamily, right: &SimplexFamily) -> crate::Result<SimplexFamily> {
    let (a, c) = (left.base(), right.base());
    let base = Arc::new(disjoint_union(a, c));
    let values = (0..=base.trunc())
        .map(|k| {
            (0..a.nondeg_count(k))
                .map(|y| left.value_nd(k, y).clone())
                .chain((0..c.nondeg_count(k)).map(|y| right.value_nd(k, y).clone()))
                .collect()
        })
        .collect();
    let faces = (0..=base.trunc())
        .map(|k| {
            let side = |fam: &SimplexFamily, y: usize| -> Vec<SimplicialMap> {
                if k == 0 {
                    Vec::new()
                } else {
                    (0..=k).map(|i| fam.face_map(k, y, i).clone()).collect()
                }
            };
            (0..a.nondeg_count(k)).map(|y| side(left, y)).chain((0..c.nondeg_count(k)).map(|y| side(right, y))).collect()
        })
        .collect();
    SimplexFamily::new(base, values, faces)
}

/// Morphisms of `sset ⋉ sset` at truncation 2, cycling through four kinds:
/// inclusion of a summand of the base with widened fibres, identities,
/// a vertex inclusion under constant families, and fibrewise inclusions of
/// a summand.
pub fn random_stability_sample<R: Rng>(rng: &mut R, i: usize) -> crate::Result<ClubMorphismSSet> {
    let shapes = algebra_shapes(2);
    let pool = sset_pool(2);
    let shape = shapes.choose(rng).unwrap().clone();
    let psi = Arc::new(random_family(rng, &shape));
    let t = pool.choose(rng).unwrap().clone();
    let phi_inl = |src: &SimplexFamily| -> Vec<Vec<SimplicialMap>> {
        (0..=src.base().trunc())
            .map(|k| (0..src.base().nondeg_count(k)).map(|y| inl_map(src.value_nd(k, y), &t)).collect())
            .collect()
    };
    match i % 4 {
        0 => {
            let other = shapes.choose(rng).unwrap().clone();
            let rest = random_family(rng, &other);
            let tgt = Arc::new(join(&widen(&psi, &t)?, &rest)?);
            let f = SimplicialMap::from_parts(shape.clone(), tgt.base().clone(), inl_map(&shape, &other).images().to_vec());
            ClubMorphismSSet::new(psi.clone(), tgt, f, phi_inl(&psi))
        }
        1 => Ok(ClubMorphismSSet::identity(psi)),
        2 => {
            let d1 = Arc::new(standard_simplex(1, 2));
            let pt = Arc::new(one_point(2));
            let src = Arc::new(SimplexFamily::constant(pt.clone(), t.clone()));
            let tgt = Arc::new(SimplexFamily::constant(d1.clone(), t.clone()));
            let v = rng.gen_range(0..2);
            let images = (0..=2).map(|k| if k == 0 { vec![Simplex::nondegenerate(0, v)] } else { Vec::new() }).collect();
            let f = SimplicialMap::new(pt, d1, images)?;
            let phi = vec![vec![SimplicialMap::identity(t.clone())], Vec::new(), Vec::new()];
            ClubMorphismSSet::new(src, tgt, f, phi)
        }
        _ => {
            let tgt = Arc::new(widen(&psi, &t)?);
            let f = SimplicialMap::identity(shape.clone());
            ClubMorphismSSet::new(psi.clone(), tgt, f, phi_inl(&psi))
        }
    }
}
