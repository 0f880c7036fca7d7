//! Club actions on categories: `C(M)`, colimit algebras over finite sets,
//! I-points and the fibration predicate.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap as HashMap;

use crate::diagram::{constantify, DiagramInCat};
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, Functor, Morphism};
use crate::semidirect::{semidirect_with, Guardrails};
use crate::simpset::{
    from_levelwise, horn_lifting, is_injective, monotone_maps, simplex_category, HornClass, HornWitness, Levelwise,
    MonotoneMap, Simplex, SimplexCategory, SimplicialMap, SimplicialSet,
};
use crate::sset_club::{compose, compose_morphism, delta, pair_category, ClubMorphismSSet, PairCategory, SimplexFamily};

/// A functor into finite sets, stored as element counts and functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunctor {
    cat: Arc<FinCategory>,
    sizes: Vec<usize>,
    maps: Vec<Vec<usize>>,
}

impl SetFunctor {
    pub fn new(cat: Arc<FinCategory>, sizes: Vec<usize>, maps: Vec<Vec<usize>>) -> Result<Self> {
        let f = Self { cat, sizes, maps };
        let problems = f.validate();
        if problems.is_empty() {
            Ok(f)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    pub fn from_parts(cat: Arc<FinCategory>, sizes: Vec<usize>, maps: Vec<Vec<usize>>) -> Self {
        Self { cat, sizes, maps }
    }

    pub fn constant(cat: Arc<FinCategory>, n: usize) -> Self {
        let sizes = vec![n; cat.object_count()];
        let maps = vec![(0..n).collect(); cat.morphism_count()];
        Self { cat, sizes, maps }
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.cat
    }

    pub fn size(&self, o: usize) -> usize {
        self.sizes[o]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn map(&self, m: usize) -> &[usize] {
        &self.maps[m]
    }

    /// Shapes, identities and every entry of the composition table.
    pub fn validate(&self) -> Vec<String> {
        let c = &*self.cat;
        let mut out = Vec::new();
        if self.sizes.len() != c.object_count() || self.maps.len() != c.morphism_count() {
            return vec!["one set per object and one function per morphism required".into()];
        }
        for (m, f) in self.maps.iter().enumerate() {
            let (s, t) = (c.src(m), c.tgt(m));
            if f.len() != self.sizes[s] || f.iter().any(|&v| v >= self.sizes[t]) {
                out.push(format!("function at {} has the wrong shape", c.morphisms()[m].id));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for o in 0..c.object_count() {
            if self.maps[c.identity(o)].iter().enumerate().any(|(i, &v)| i != v) {
                out.push(format!("identity at {} is not sent to the identity", c.objects()[o]));
            }
        }
        let mut entries: Vec<_> = c.comp_table().iter().collect();
        entries.sort_unstable();
        for (&(g, f), &gf) in entries {
            let bad = (0..self.sizes[c.src(f)]).any(|e| self.maps[g][self.maps[f][e]] != self.maps[gf][e]);
            if bad {
                out.push(format!(
                    "composition {} o {} is not preserved",
                    c.morphisms()[g].id,
                    c.morphisms()[f].id
                ));
            }
        }
        out
    }

    /// `D o F`.
    pub fn precompose(&self, f: &Functor) -> SetFunctor {
        let sizes = f.omap().iter().map(|&o| self.sizes[o]).collect();
        let maps = f.mmap().iter().map(|&m| self.maps[m].clone()).collect();
        SetFunctor { cat: f.src().clone(), sizes, maps }
    }
}

/// A colimit of a [`SetFunctor`]: classes of `(object, element)` pairs,
/// numbered in the order of their least member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colimit {
    pub size: usize,
    offsets: Vec<usize>,
    classes: Vec<usize>,
    /// least `(object, element)` of each class
    pub representatives: Vec<(usize, usize)>,
}

impl Colimit {
    pub fn class_of(&self, o: usize, e: usize) -> usize {
        self.classes[self.offsets[o] + e]
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (x, y) = (find(parent, a), find(parent, b));
    if x != y {
        parent[x.max(y)] = x.min(y);
    }
}

/// Disjoint union of all values quotiented by every function of the
/// diagram, with union-find.
pub fn colimit(d: &SetFunctor) -> Colimit {
    colimit_along(d, |_| true)
}

/// Colimit using only the morphisms accepted by `keep`.
fn colimit_along(d: &SetFunctor, keep: impl Fn(usize) -> bool) -> Colimit {
    let c = &*d.cat;
    let mut offsets = vec![0];
    for &s in &d.sizes {
        offsets.push(offsets.last().unwrap() + s);
    }
    let total = *offsets.last().unwrap();
    let mut parent: Vec<usize> = (0..total).collect();
    for m in (0..c.morphism_count()).filter(|&m| keep(m)) {
        let (s, t) = (c.src(m), c.tgt(m));
        for (e, &v) in d.maps[m].iter().enumerate() {
            union(&mut parent, offsets[s] + e, offsets[t] + v);
        }
    }
    let mut id_of = HashMap::default();
    let mut representatives = Vec::new();
    let mut classes = vec![0; total];
    let mut o = 0;
    for x in 0..total {
        while offsets[o + 1] <= x {
            o += 1;
        }
        let r = find(&mut parent, x);
        let id = *id_of.entry(r).or_insert_with(|| {
            representatives.push((o, x - offsets[o]));
            representatives.len() - 1
        });
        classes[x] = id;
    }
    Colimit { size: representatives.len(), offsets, classes, representatives }
}

/// Default size bound for the category of finite sets.
pub const FINSET_BOUND: usize = 3;

/// The skeletal category of finite sets `0, 1, .., bound` with all functions.
pub fn finsets(bound: usize) -> FinCategory {
    let mut funcs: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for a in 0..=bound {
        for b in 0..=bound {
            let total = b.pow(a as u32);
            for mut code in 0..total {
                let mut f = Vec::with_capacity(a);
                for _ in 0..a {
                    f.push(code % b);
                    code /= b;
                }
                funcs.push((a, b, f));
            }
        }
    }
    let index: HashMap<(usize, usize, Vec<usize>), usize> =
        funcs.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    let mors = funcs
        .iter()
        .map(|(a, b, f)| {
            let vals: Vec<String> = f.iter().map(usize::to_string).collect();
            Morphism { id: format!("{a}->{b}:[{}]", vals.join(",")), src: *a, tgt: *b }
        })
        .collect();
    let identities = (0..=bound).map(|a| index[&(a, a, (0..a).collect())]).collect();
    let mut comp = HashMap::default();
    for (fi, (a, b, f)) in funcs.iter().enumerate() {
        for (gi, (b2, c, g)) in funcs.iter().enumerate() {
            if b2 == b {
                let gf: Vec<usize> = f.iter().map(|&x| g[x]).collect();
                comp.insert((gi, fi), index[&(*a, *c, gf)]);
            }
        }
    }
    let names = (0..=bound).map(|a| a.to_string()).collect();
    FinCategory::from_indexed(names, mors, identities, comp)
}

/// `C(M)`: the base of `C ⋉ M` with `M` the constant diagram.
pub fn act_category(c: &Arc<DiagramInCat>, m: &Arc<FinCategory>, guard: &Guardrails) -> Result<Arc<FinCategory>> {
    let cm = Arc::new(constantify(m));
    Ok(semidirect_with(c, &cm, guard, None)?.diagram().base().clone())
}

/// An object of `SSet(M)` for `M` the finite sets: a shape `S` and a
/// functor from the category of simplices of `S`.
#[derive(Debug, Clone)]
pub struct AlgebraObject {
    pub shape: Arc<SimplicialSet>,
    pub cat: SimplexCategory,
    pub diagram: SetFunctor,
}

impl AlgebraObject {
    pub fn new(shape: Arc<SimplicialSet>, sizes: Vec<usize>, maps: Vec<Vec<usize>>) -> Result<Self> {
        let cat = simplex_category(&shape);
        let diagram = SetFunctor::new(cat.category.clone(), sizes, maps)?;
        Ok(Self { shape, cat, diagram })
    }

    pub fn constant(shape: Arc<SimplicialSet>, n: usize) -> Self {
        let cat = simplex_category(&shape);
        let diagram = SetFunctor::constant(cat.category.clone(), n);
        Self { shape, cat, diagram }
    }

    /// Values on non-degenerate simplices and a function per stored face;
    /// degeneracies act as identities.
    pub fn from_set_family(
        shape: Arc<SimplicialSet>,
        sizes: &[Vec<usize>],
        faces: &[Vec<Vec<Vec<usize>>>],
    ) -> Result<Self> {
        let cat = simplex_category(&shape);
        let obj_sizes = cat.objects.iter().map(|x| sizes[x.base_dim()][x.base]).collect();
        let maps = cat
            .morphisms
            .iter()
            .map(|(o, theta)| {
                let x = &cat.objects[*o];
                let chain = shape.face_chain(x, theta);
                (0..sizes[x.base_dim()][x.base])
                    .map(|e| chain.iter().fold(e, |cur, &(k, y, i)| faces[k][y][i][cur]))
                    .collect()
            })
            .collect();
        let diagram = SetFunctor::new(cat.category.clone(), obj_sizes, maps)?;
        Ok(Self { shape, cat, diagram })
    }

    pub fn value(&self, x: &Simplex) -> usize {
        self.diagram.size(self.cat.object_of(x).expect("simplex within truncation"))
    }

    /// `D(theta at x)(e)`.
    pub fn act(&self, x: &Simplex, theta: &MonotoneMap, e: usize) -> usize {
        let o = self.cat.object_of(x).expect("simplex within truncation");
        self.diagram.map(self.cat.morphism_of(o, theta).expect("operator within truncation"))[e]
    }
}

/// The canonical algebra structure: take the colimit.
pub fn colimit_act(x: &AlgebraObject) -> Colimit {
    colimit(&x.diagram)
}

/// A two-level object: a family `psi` over `S` and a set-valued functor on
/// `S ⋉_psi SSet`.
#[derive(Debug, Clone)]
pub struct TwoLevel {
    pub family: Arc<SimplexFamily>,
    pub pairs: PairCategory,
    pub diagram: SetFunctor,
}

/// Outcome of a law check over samples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleReport {
    pub samples: usize,
    pub failures: Vec<String>,
    /// shapes, truncation and sample counts covered
    pub coverage: String,
}

impl SampleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Acting in two stages, fibre colimits first and then over `S`.
/// `None` when the induced functor on `S` is not well defined.
pub fn two_stage_colimit(t: &TwoLevel) -> Option<(Colimit, Colimit)> {
    let p = &t.pairs;
    let pc = p.product.category().clone();
    let base = &p.base;
    let is_vertical = |m: usize| {
        let (_, alpha, _) = p.product.morphism(m);
        base.category.is_identity(alpha)
    };
    let stage1 = colimit_along(&t.diagram, is_vertical);
    // classes per base object, in order of appearance
    let mut local: Vec<Vec<usize>> = vec![Vec::new(); base.objects.len()];
    let mut local_index: HashMap<usize, (usize, usize)> = HashMap::default();
    for (cls, &(o, _)) in stage1.representatives.iter().enumerate() {
        let (a, _) = p.product.object(o);
        local_index.insert(cls, (a, local[a].len()));
        local[a].push(cls);
    }
    let sizes: Vec<usize> = local.iter().map(Vec::len).collect();
    let mut maps: Vec<Vec<usize>> = Vec::with_capacity(base.morphisms.len());
    for (bm, (a, theta)) in base.morphisms.iter().enumerate() {
        let s = &base.objects[*a];
        let mut f = vec![usize::MAX; sizes[*a]];
        for o in 0..pc.object_count() {
            let (oa, ob) = p.product.object(o);
            if oa != *a {
                continue;
            }
            let tsimp = &p.fiber(s).objects[ob];
            let m = p.morphism_of(&t.family, s, tsimp, theta, &MonotoneMap::identity(tsimp.dim()))?;
            debug_assert_eq!(p.product.morphism(m).1, bm);
            let tgt = pc.tgt(m);
            for e in 0..t.diagram.size(o) {
                let from = local_index[&stage1.class_of(o, e)].1;
                let to = local_index[&stage1.class_of(tgt, t.diagram.map(m)[e])].1;
                if f[from] == usize::MAX {
                    f[from] = to;
                } else if f[from] != to {
                    return None;
                }
            }
        }
        maps.push(f);
    }
    let induced = SetFunctor::from_parts(base.category.clone(), sizes, maps);
    if !induced.validate().is_empty() {
        return None;
    }
    let stage2 = colimit(&induced);
    // final class of each stage-1 class
    let finals: Vec<usize> = (0..stage1.size)
        .map(|cls| {
            let (a, i) = local_index[&cls];
            stage2.class_of(a, i)
        })
        .collect();
    let flat = Colimit {
        size: stage2.size,
        offsets: stage1.offsets.clone(),
        classes: stage1.classes.iter().map(|&c| finals[c]).collect(),
        representatives: stage2.representatives.clone(),
    };
    Some((flat, stage2))
}

/// Compares the two-stage colimit with the colimit over the composite
/// `compose(psi)` along `delta`; returns a description of the first
/// discrepancy.
pub fn compare_two_level(t: &TwoLevel) -> Result<Option<String>> {
    let Some((two, _)) = two_stage_colimit(t) else {
        return Ok(Some("the fibre colimits do not form a functor on S".into()));
    };
    let comp = compose(&t.family);
    let (tcat, d) = delta(&t.family, &comp, &t.pairs)?;
    let one = colimit(&t.diagram.precompose(&d));
    if one.size != two.size {
        return Ok(Some(format!("one stage gives {} elements, two stages give {}", one.size, two.size)));
    }
    let mut image = vec![usize::MAX; one.size];
    for o in 0..tcat.objects.len() {
        for e in 0..t.diagram.size(d.obj(o)) {
            let c1 = one.class_of(o, e);
            let c2 = two.class_of(d.obj(o), e);
            if image[c1] == usize::MAX {
                image[c1] = c2;
            } else if image[c1] != c2 {
                return Ok(Some(format!("comparison map is not well defined at {}", tcat.category.objects()[o])));
            }
        }
    }
    let mut hit = image.clone();
    hit.sort_unstable();
    hit.dedup();
    if hit.len() != one.size || hit.contains(&usize::MAX) {
        return Ok(Some("comparison map is not a bijection".into()));
    }
    Ok(None)
}

/// Samples two-level families with values of size at most 3 and checks
/// that acting in two stages agrees with acting after composition.
pub fn algebra_associativity_check(samples: usize, seed: u64) -> Result<SampleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = crate::fixtures::algebra_shapes(2);
    let mut report = SampleReport::default();
    for i in 0..samples {
        let shape = shapes[i % shapes.len()].clone();
        let t = crate::fixtures::random_two_level(&mut rng, &shape)?;
        if let Some(why) = compare_two_level(&t)? {
            report.failures.push(format!("sample {i}: {why}"));
        }
        report.samples += 1;
    }
    let names: Vec<String> = shapes.iter().map(|s| s.names(0).len().to_string()).collect();
    report.coverage = format!(
        "{} samples, trunc 2, shapes with vertex counts [{}], values of size <= 3",
        report.samples,
        names.join(",")
    );
    Ok(report)
}

/// Simplicial set of elements: the `k`-simplices are pairs `(x, e)` with
/// `x` a `k`-simplex of the shape and `e` an element over it.
#[derive(Debug, Clone)]
pub struct ElementsSSet {
    pub sset: Arc<SimplicialSet>,
    /// level elements
    pub points: Vec<Vec<(Simplex, usize)>>,
    /// normal form of each level element
    pub normal_forms: Vec<Vec<Simplex>>,
    index: Vec<HashMap<(Simplex, usize), usize>>,
}

impl ElementsSSet {
    pub fn simplex_of(&self, x: &Simplex, e: usize) -> Option<&Simplex> {
        let k = x.dim();
        self.index.get(k)?.get(&(x.clone(), e)).map(|&i| &self.normal_forms[k][i])
    }
}

fn elements_sset(
    shape: &SimplicialSet,
    size: &dyn Fn(&Simplex) -> usize,
    act: &dyn Fn(&Simplex, &MonotoneMap, usize) -> usize,
    label: &dyn Fn(&Simplex, usize) -> String,
) -> ElementsSSet {
    let n = shape.trunc();
    let points: Vec<Vec<(Simplex, usize)>> = (0..=n)
        .map(|k| shape.simplices(k).into_iter().flat_map(|x| (0..size(&x)).map(move |e| (x.clone(), e))).collect())
        .collect();
    let index: Vec<HashMap<(Simplex, usize), usize>> =
        points.iter().map(|l| l.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect()).collect();
    let names = points.iter().map(|l| l.iter().map(|(x, e)| label(x, *e)).collect()).collect();
    let step = |x: &Simplex, e: usize, theta: &MonotoneMap, to: usize| {
        let y = shape.apply_unchecked(x, theta);
        index[to][&(y, act(x, theta, e))]
    };
    let faces = (0..=n)
        .map(|k| {
            points[k]
                .iter()
                .map(|(x, e)| {
                    if k == 0 {
                        Vec::new()
                    } else {
                        (0..=k).map(|i| step(x, *e, &MonotoneMap::face(k, i), k - 1)).collect()
                    }
                })
                .collect()
        })
        .collect();
    let degens = (0..n)
        .map(|k| {
            points[k]
                .iter()
                .map(|(x, e)| (0..=k).map(|i| step(x, *e, &MonotoneMap::degeneracy(k, i), k + 1)).collect())
                .collect()
        })
        .collect();
    let lw = Levelwise { names, faces, degens };
    debug_assert!(lw.validate().is_empty());
    let (sset, normal_forms) = from_levelwise(&lw);
    ElementsSSet { sset: Arc::new(sset), points, normal_forms, index }
}

/// The map of element sets induced by `(x, e) -> (f(x), g(x, e))`.
fn induced_elements_map(
    src: &ElementsSSet,
    tgt: &ElementsSSet,
    f: &SimplicialMap,
    g: &dyn Fn(&Simplex, usize) -> usize,
) -> Result<SimplicialMap> {
    let images = (0..=src.sset.trunc())
        .map(|k| {
            src.points[k]
                .iter()
                .zip(&src.normal_forms[k])
                .filter(|(_, nf)| !nf.is_degenerate())
                .map(|((x, e), _)| {
                    tgt.simplex_of(&f.apply(x), g(x, *e))
                        .cloned()
                        .ok_or_else(|| Error::Mismatch("induced map leaves the target".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SimplicialMap::new(src.sset.clone(), tgt.sset.clone(), images)
}

fn encode_tuple(es: &[usize], base: usize) -> usize {
    es.iter().rev().fold(0, |acc, &e| acc * base + e)
}

fn decode_tuple(mut code: usize, base: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let e = code % base.max(1);
            code /= base.max(1);
            e
        })
        .collect()
}

/// An I-point of dimension `n` for the generator `I` with `gen` elements:
/// an `n`-simplex `x` and, for every operator `u: [m] -> [n]`, a map
/// `I -> D(u^* x)`, natural in `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IPoint {
    pub n: usize,
    pub x: Simplex,
    pub family: Vec<(MonotoneMap, Vec<usize>)>,
}

/// All I-points of dimension `n`. Naturality forces the family from its
/// value at the identity, so each is generated from a tuple in `D(x)^gen`.
pub fn i_points(x: &AlgebraObject, gen: usize, n: usize) -> Result<Vec<IPoint>> {
    let trunc = x.shape.trunc();
    if n > trunc {
        return Err(Error::Truncation(format!("dimension {n} exceeds truncation {trunc}")));
    }
    let ops: Vec<MonotoneMap> = (0..=trunc).flat_map(|m| monotone_maps(m, n)).collect();
    let mut out = Vec::new();
    for s in x.shape.simplices(n) {
        let size = x.value(&s);
        for code in 0..size.pow(gen as u32) {
            let top = decode_tuple(code, size, gen);
            let family = ops.iter().map(|u| (u.clone(), top.iter().map(|&e| x.act(&s, u, e)).collect())).collect();
            out.push(IPoint { n, x: s.clone(), family });
        }
    }
    Ok(out)
}

/// The simplicial set `I(D)` of I-points.
pub fn i_points_sset(x: &AlgebraObject, gen: usize) -> ElementsSSet {
    let size = |s: &Simplex| x.value(s).pow(gen as u32);
    let act = |s: &Simplex, th: &MonotoneMap, code: usize| {
        let base = x.value(s);
        let tgt = x.value(&x.shape.apply_unchecked(s, th));
        let es: Vec<usize> = decode_tuple(code, base, gen).into_iter().map(|e| x.act(s, th, e)).collect();
        encode_tuple(&es, tgt)
    };
    let label = |s: &Simplex, code: usize| {
        let es: Vec<String> = decode_tuple(code, x.value(s), gen).iter().map(usize::to_string).collect();
        format!("{}<{}>", x.shape.label(s), es.join(","))
    };
    elements_sset(&x.shape, &size, &act, &label)
}

/// A morphism `(F, phi)` of algebra objects: `phi_x: D(x) -> D'(F x)`.
#[derive(Debug, Clone)]
pub struct AlgebraMorphism {
    pub src: Arc<AlgebraObject>,
    pub tgt: Arc<AlgebraObject>,
    pub f: SimplicialMap,
    /// indexed by the objects of the source simplex category
    pub phi: Vec<Vec<usize>>,
}

impl AlgebraMorphism {
    pub fn new(src: Arc<AlgebraObject>, tgt: Arc<AlgebraObject>, f: SimplicialMap, phi: Vec<Vec<usize>>) -> Result<Self> {
        let m = Self { src, tgt, f, phi };
        let problems = m.validate();
        if problems.is_empty() {
            Ok(m)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    pub fn identity(x: Arc<AlgebraObject>) -> Self {
        let f = SimplicialMap::identity(x.shape.clone());
        let phi = x.diagram.sizes().iter().map(|&n| (0..n).collect()).collect();
        Self { src: x.clone(), tgt: x, f, phi }
    }

    pub fn validate(&self) -> Vec<String> {
        let (a, b) = (&*self.src, &*self.tgt);
        if *self.f.src() != a.shape || *self.f.tgt() != b.shape {
            return vec!["base map does not match the shapes".into()];
        }
        let mut out = Vec::new();
        if self.phi.len() != a.cat.objects.len() {
            return vec!["one component per simplex required".into()];
        }
        for (o, x) in a.cat.objects.iter().enumerate() {
            let fx = self.f.apply(x);
            if self.phi[o].len() != a.diagram.size(o) || self.phi[o].iter().any(|&v| v >= b.value(&fx)) {
                out.push(format!("component at {} has the wrong shape", a.shape.label(x)));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (m, (o, theta)) in a.cat.morphisms.iter().enumerate() {
            let x = &a.cat.objects[*o];
            let t = a.cat.category.tgt(m);
            let fx = self.f.apply(x);
            for e in 0..a.diagram.size(*o) {
                if b.act(&fx, theta, self.phi[*o][e]) != self.phi[t][a.diagram.map(m)[e]] {
                    out.push(format!("naturality fails at {}", a.cat.category.morphisms()[m].id));
                    break;
                }
            }
        }
        out
    }

    fn component(&self, x: &Simplex) -> &[usize] {
        &self.phi[self.src.cat.object_of(x).expect("simplex within truncation")]
    }
}

/// `(F, phi)_I` by postcomposition with `phi`.
pub fn induced_map(m: &AlgebraMorphism, gen: usize) -> Result<SimplicialMap> {
    let src = i_points_sset(&m.src, gen);
    let tgt = i_points_sset(&m.tgt, gen);
    let g = |x: &Simplex, code: usize| {
        let es: Vec<usize> = decode_tuple(code, m.src.value(x), gen).iter().map(|&e| m.component(x)[e]).collect();
        encode_tuple(&es, m.tgt.value(&m.f.apply(x)))
    };
    induced_elements_map(&src, &tgt, &m.f, &g)
}

/// Why a morphism is or is not a fibration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibrationReport {
    pub injective: bool,
    /// first generator whose induced map has an unliftable horn
    pub failing: Option<(usize, HornWitness)>,
}

impl FibrationReport {
    pub fn holds(&self) -> bool {
        self.injective && self.failing.is_none()
    }
}

fn lifting_report(
    injective: bool,
    gens: &[usize],
    class: HornClass,
    induced: impl Fn(usize) -> Result<SimplicialMap>,
) -> Result<FibrationReport> {
    let mut failing = None;
    for &g in gens {
        let map = induced(g)?;
        let max_dim = map.src().trunc().saturating_sub(1).max(1);
        if let Some(w) = horn_lifting(&map, max_dim, class)?.witness {
            failing = Some((g, w));
            break;
        }
    }
    Ok(FibrationReport { injective, failing })
}

/// `F` injective and every `(F, phi)_I` lifts against the chosen horns up
/// to one below the truncation.
pub fn is_fibration(m: &AlgebraMorphism, gens: &[usize], class: HornClass) -> Result<FibrationReport> {
    lifting_report(is_injective(&m.f), gens, class, |g| induced_map(m, g))
}

/// I-points of a family of simplicial sets for `I = Delta[j]`:
/// pairs `(x, t)` with `t` a `j`-simplex of `psi(x)`.
pub fn family_points_sset(psi: &SimplexFamily, j: usize) -> ElementsSSet {
    let cache: HashMap<(usize, usize), Vec<Simplex>> = (0..=psi.base().trunc())
        .flat_map(|k| (0..psi.base().nondeg_count(k)).map(move |y| (k, y)))
        .map(|(k, y)| ((k, y), psi.value_nd(k, y).simplices(j)))
        .collect();
    let lists = |x: &Simplex| &cache[&(x.base_dim(), x.base)];
    let size = |x: &Simplex| lists(x).len();
    let act = |x: &Simplex, th: &MonotoneMap, i: usize| {
        let t = psi.act(x, th, &lists(x)[i]);
        let y = psi.base().apply_unchecked(x, th);
        lists(&y).iter().position(|s| *s == t).expect("action stays in the fibre")
    };
    let label = |x: &Simplex, i: usize| format!("{}<{}>", psi.base().label(x), psi.value(x).label(&lists(x)[i]));
    elements_sset(psi.base(), &size, &act, &label)
}

/// The fibration predicate for morphisms of `sset ⋉ sset` with the
/// generators `Delta[j]`, `j <= trunc`.
pub fn is_sset_fibration(m: &ClubMorphismSSet, class: HornClass) -> Result<FibrationReport> {
    let trunc = m.src().base().trunc();
    let gens: Vec<usize> = (0..=trunc).collect();
    lifting_report(is_injective(m.base_map()), &gens, class, |j| {
        let src = family_points_sset(m.src(), j);
        let tgt = family_points_sset(m.tgt(), j);
        let g = |x: &Simplex, i: usize| {
            let t = &m.src().value(x).simplices(j)[i];
            let fx = m.base_map().apply(x);
            let image = m.phi_at(x).apply(t);
            m.tgt().value(&fx).simplices(j).iter().position(|s| *s == image).expect("phi lands in the fibre")
        };
        induced_elements_map(&src, &tgt, m.base_map(), &g)
    })
}

/// Injectivity and horn lifting for a plain map.
pub fn map_fibration(f: &SimplicialMap, class: HornClass) -> Result<FibrationReport> {
    let max_dim = f.src().trunc().saturating_sub(1).max(1);
    let witness = horn_lifting(f, max_dim, class)?.witness;
    Ok(FibrationReport { injective: is_injective(f), failing: witness.map(|w| (0, w)) })
}

/// Samples morphisms of `sset ⋉ sset` at truncation 2 and checks that
/// composition keeps injective data injective and fibrations fibrations.
pub fn sset_stability_check(samples: usize, seed: u64) -> Result<StabilityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = StabilityReport::default();
    for i in 0..samples {
        let m = crate::fixtures::random_stability_sample(&mut rng, i)?;
        let (cs, ct) = (compose(m.src()), compose(m.tgt()));
        let composite = compose_morphism(&m, &cs, &ct)?;
        let data_injective =
            is_injective(m.base_map()) && m.src().base().simplices(0).iter().all(|x| is_injective(m.phi_at(x)));
        if data_injective {
            report.injective_samples += 1;
            if !is_injective(&composite) {
                report.violations.push(format!("sample {i}: composite of injective data is not injective"));
            }
        }
        if is_sset_fibration(&m, HornClass::All)?.holds() {
            report.fibration_samples += 1;
            let after = map_fibration(&composite, HornClass::All)?;
            if !after.holds() {
                let why = match after.failing {
                    Some((_, w)) => format!("horn ({}, {}) over {}", w.n, w.k, w.target),
                    None => "not injective".into(),
                };
                report.violations.push(format!("sample {i}: composite is not a fibration: {why}"));
            }
        }
        report.samples += 1;
    }
    report.coverage = format!(
        "{} samples at trunc 2: {} with injective data, {} fibrations",
        report.samples, report.injective_samples, report.fibration_samples
    );
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StabilityReport {
    pub samples: usize,
    pub injective_samples: usize,
    pub fibration_samples: usize,
    pub violations: Vec<String>,
    pub coverage: String,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Builds two-level data from a family and a functor on its pair category.
pub fn two_level(family: Arc<SimplexFamily>, diagram: impl FnOnce(&PairCategory) -> SetFunctor) -> Result<TwoLevel> {
    let pairs = pair_category(&family)?;
    let diagram = diagram(&pairs);
    let problems = diagram.validate();
    if !problems.is_empty() {
        return Err(Error::Invalid(problems.join("; ")));
    }
    Ok(TwoLevel { family, pairs, diagram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::unit_diagram;
    use crate::fincat::find_isomorphism;
    use crate::operads::{encode_ns, unital_ass};
    use crate::simpset::{boundary, disjoint_union, one_point, standard_simplex};

    fn set_family(shape: &Arc<SimplicialSet>, sizes: &[Vec<usize>], faces: &[Vec<Vec<Vec<usize>>>]) -> AlgebraObject {
        AlgebraObject::from_set_family(shape.clone(), sizes, faces).unwrap()
    }

    /// Closure of the generating relation by repeated relaxation.
    fn brute_colimit_size(d: &SetFunctor) -> usize {
        let c = d.category();
        let elems: Vec<(usize, usize)> = (0..c.object_count()).flat_map(|o| (0..d.size(o)).map(move |e| (o, e))).collect();
        let mut label: Vec<usize> = (0..elems.len()).collect();
        let pos = |o: usize, e: usize| elems.iter().position(|&p| p == (o, e)).unwrap();
        loop {
            let mut changed = false;
            for m in 0..c.morphism_count() {
                for e in 0..d.size(c.src(m)) {
                    let (a, b) = (pos(c.src(m), e), pos(c.tgt(m), d.map(m)[e]));
                    let l = label[a].min(label[b]);
                    for x in [a, b] {
                        if label[x] != l {
                            let old = label[x];
                            label.iter_mut().filter(|v| **v == old).for_each(|v| *v = l);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        label.sort_unstable();
        label.dedup();
        label.len()
    }

    #[test]
    fn finsets_is_a_category() {
        let f = finsets(2);
        assert!(f.validate().is_empty());
        // 1 + (1 + 1 + 1) + (1 + 2 + 4) functions out of 0, 1, 2 elements
        assert_eq!(f.morphism_count(), 11);
    }

    #[test]
    fn act_category_examples() {
        let g = Guardrails::for_law_checks();
        let two = Arc::new(FinCategory::discrete_n(2));
        let unit = Arc::new(unit_diagram());
        assert!(find_isomorphism(&act_category(&unit, &two, &g).unwrap(), &two).is_some());
        let arrow = Arc::new(FinCategory::walking_arrow());
        assert!(find_isomorphism(&act_category(&unit, &arrow, &g).unwrap(), &arrow).is_some());
        let ass = Arc::new(encode_ns(unital_ass(2).collection(), &g).unwrap());
        assert_eq!(act_category(&ass, &two, &g).unwrap().object_count(), 1 + 2 + 4);
        let one = Arc::new(FinCategory::terminal());
        let c1 = act_category(&ass, &one, &g).unwrap();
        assert!(find_isomorphism(&c1, ass.base()).is_some());
    }

    #[test]
    fn colimit_identities() {
        let d2 = Arc::new(standard_simplex(2, 2));
        let c = colimit_act(&AlgebraObject::constant(d2, 3));
        assert_eq!(c.size, 3);
        let pt = one_point(2);
        let two = Arc::new(disjoint_union(&pt, &pt));
        assert_eq!(colimit_act(&AlgebraObject::constant(two, 2)).size, 4);
        let empty = AlgebraObject::constant(Arc::new(standard_simplex(1, 2)), 0);
        assert_eq!(colimit_act(&empty).size, 0);
    }

    /// The span `{a,b} <- {p,q} -> {c,d}` with `p -> a, q -> a` and
    /// `p -> c, q -> d` has pushout `{a~c~d, b}`.
    #[test]
    fn pushout_over_an_edge() {
        let d1 = Arc::new(standard_simplex(1, 1));
        let sizes = vec![vec![2, 2], vec![2]];
        // d0 lands in vertex 1, d1 in vertex 0
        let faces = vec![vec![Vec::new(), Vec::new()], vec![vec![vec![0, 1], vec![0, 0]]]];
        let x = set_family(&d1, &sizes, &faces);
        let c = colimit_act(&x);
        assert_eq!(c.size, 2);
        assert_eq!(c.size, brute_colimit_size(&x.diagram));
    }

    #[test]
    fn colimits_match_brute_force_on_random_families() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for shape in crate::fixtures::algebra_shapes(2) {
            for _ in 0..3 {
                let x = crate::fixtures::random_set_family(&mut rng, &shape, 2);
                assert!(x.diagram.validate().is_empty());
                assert_eq!(colimit_act(&x).size, brute_colimit_size(&x.diagram));
            }
        }
    }

    #[test]
    fn colimit_is_invariant_under_shape_isomorphism() {
        let a = Arc::new(boundary(2, 2));
        let b = Arc::new(crate::simpset::horn(2, 1, 2));
        let c = Arc::new(disjoint_union(&standard_simplex(1, 2), &one_point(2)));
        for s in [a, b, c] {
            let t = Arc::new((*s).clone());
            assert!(crate::simpset::iso_sset(&s, &t).is_some());
            assert_eq!(colimit_act(&AlgebraObject::constant(s, 2)), colimit_act(&AlgebraObject::constant(t, 2)));
        }
    }

    #[test]
    fn two_level_constant_and_point_cases() {
        let shape = Arc::new(boundary(2, 2));
        let t = Arc::new(disjoint_union(&one_point(2), &one_point(2)));
        let fam = Arc::new(SimplexFamily::constant(shape.clone(), t.clone()));
        let tl = two_level(fam, |p| SetFunctor::constant(p.product.category().clone(), 2)).unwrap();
        assert_eq!(compare_two_level(&tl).unwrap(), None);
        // colimit over the product shape: 2 * pi0(S) * pi0(T)
        let (two, _) = two_stage_colimit(&tl).unwrap();
        assert_eq!(two.size, 2 * 2);
        let prod = Arc::new(crate::simpset::product(&shape, &t));
        assert_eq!(colimit_act(&AlgebraObject::constant(prod, 2)).size, two.size);
        let pfam = Arc::new(SimplexFamily::point(shape.clone()));
        let tl = two_level(pfam, |p| SetFunctor::constant(p.product.category().clone(), 3)).unwrap();
        assert_eq!(two_stage_colimit(&tl).unwrap().0.size, 3);
        assert_eq!(compare_two_level(&tl).unwrap(), None);
    }

    #[test]
    fn associativity_on_samples() {
        let r = algebra_associativity_check(6, 5).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.samples, 6);
    }

    /// Every natural family over `Delta[n]`, by enumerating all assignments.
    fn brute_i_points(x: &AlgebraObject, n: usize) -> usize {
        let trunc = x.shape.trunc();
        let ops: Vec<MonotoneMap> = (0..=trunc).flat_map(|m| monotone_maps(m, n)).collect();
        let mut count = 0;
        for s in x.shape.simplices(n) {
            let sizes: Vec<usize> = ops.iter().map(|u| x.value(&x.shape.apply_unchecked(&s, u))).collect();
            let total: usize = sizes.iter().product();
            for mut code in 0..total {
                let e: Vec<usize> = sizes
                    .iter()
                    .map(|&k| {
                        let v = code % k;
                        code /= k;
                        v
                    })
                    .collect();
                let natural = ops.iter().enumerate().all(|(a, u)| {
                    let us = x.shape.apply_unchecked(&s, u);
                    (0..=trunc).flat_map(|m| monotone_maps(m, u.dom())).all(|th| {
                        let b = ops.iter().position(|v| *v == u.after(&th)).unwrap();
                        x.act(&us, &th, e[a]) == e[b]
                    })
                });
                count += usize::from(natural);
            }
        }
        count
    }

    #[test]
    fn i_point_counts() {
        let p = Arc::new(one_point(2));
        let x = AlgebraObject::constant(p.clone(), 2);
        assert_eq!(i_points(&x, 1, 0).unwrap().len(), 2);
        let e = AlgebraObject::constant(p, 0);
        let es = i_points_sset(&e, 1);
        assert_eq!(es.sset.nondeg_counts(), vec![0, 0, 0]);
        let d1 = Arc::new(standard_simplex(1, 2));
        let sizes = vec![vec![2, 2], vec![2]];
        let faces = vec![vec![Vec::new(), Vec::new()], vec![vec![vec![1, 0], vec![0, 0]]]];
        let x = set_family(&d1, &sizes, &faces);
        for n in 0..=2 {
            assert_eq!(i_points(&x, 1, n).unwrap().len(), brute_i_points(&x, n), "dimension {n}");
        }
        let s = i_points_sset(&x, 1);
        assert!(s.sset.validate().is_empty());
        assert_eq!(i_points_sset(&x, 2).sset.nondeg_count(0), 8);
    }

    #[test]
    fn generators_separate_fixtures() {
        let d1 = Arc::new(standard_simplex(1, 2));
        let a = AlgebraObject::constant(d1.clone(), 2);
        let sizes = vec![vec![2, 1], vec![1]];
        let faces = vec![vec![Vec::new(), Vec::new()], vec![vec![vec![0], vec![1]]]];
        let b = set_family(&d1, &sizes, &faces);
        let counts = |x: &AlgebraObject| (1..=2).map(|g| i_points_sset(x, g).sset.nondeg_counts()).collect::<Vec<_>>();
        assert_ne!(counts(&a), counts(&b));
    }

    #[test]
    fn fibration_predicate() {
        let d1 = Arc::new(standard_simplex(1, 2));
        let x = Arc::new(AlgebraObject::constant(d1.clone(), 1));
        assert!(is_fibration(&AlgebraMorphism::identity(x.clone()), &[1], HornClass::All).unwrap().holds());

        let p = Arc::new(one_point(2));
        let y = Arc::new(AlgebraObject::constant(p.clone(), 1));
        let collapse = SimplicialMap::to_point(d1.clone());
        let phi = vec![vec![0]; x.cat.objects.len()];
        let m = AlgebraMorphism::new(x.clone(), y.clone(), collapse, phi).unwrap();
        assert!(!is_fibration(&m, &[1], HornClass::All).unwrap().injective);

        let images = vec![vec![Simplex::nondegenerate(0, 0)], Vec::new(), Vec::new()];
        let vertex = SimplicialMap::new(p.clone(), d1.clone(), images).unwrap();
        let phi = vec![vec![0]; y.cat.objects.len()];
        let m = AlgebraMorphism::new(y, x, vertex, phi).unwrap();
        let r = is_fibration(&m, &[1], HornClass::All).unwrap();
        assert!(r.injective);
        let (g, w) = r.failing.unwrap();
        assert_eq!((g, w.n, w.k), (1, 1, 0));
    }

    #[test]
    fn inner_horns_are_configurable() {
        let d1 = Arc::new(standard_simplex(1, 3));
        let f = SimplicialMap::to_point(d1);
        assert!(!map_fibration(&f, HornClass::All).unwrap().holds());
        assert!(horn_lifting(&f, 2, HornClass::Inner).unwrap().holds());
    }

    #[test]
    fn stability_on_samples() {
        let r = sset_stability_check(8, 1).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert!(r.fibration_samples > 0);
    }
}
