//! The semi-direct product of diagrams in `Cat`.
//!
//! For diagrams `X = (D, R)` and `Y = (D', R')` the product `X ⋉ Y` has as
//! base objects the pairs `(d, psi)` with `psi: R(d) -> D'`, as base
//! morphisms the pairs `(f, phi)` with `phi: psi_1 => psi_2 o R(f)`, and as
//! fiber over `(d, psi)` the category `R(d) ⋉_psi Y` of pairs `(a, b)` with
//! `b` in `R'(psi a)`.
//!
//! Products keep their decoding tables so that the coherence maps
//! (associator, unitors, action on morphisms) can be written as lookups.

use rustc_hash::FxHashMap as HashMap;
use std::sync::Arc;

use crate::diagram::{compose_diagram_morphisms, DiagramInCat, DiagramMorphism};
use crate::error::{Error, Result};
use crate::fincat::{for_each_functor, nat_trans_components, FinCategory, Functor, Morphism};

/// Size bounds for product construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guardrails {
    /// Objects in the base of either operand.
    pub max_base_objects: usize,
    /// Morphisms in any fiber of the left operand (domains of enumerated functors).
    pub max_fiber_morphisms: usize,
    /// Objects in the base of the product.
    pub max_product_objects: usize,
    /// Morphisms in the base of the product.
    pub max_product_morphisms: usize,
    /// Composable pairs in the base of the product.
    pub max_composites: usize,
}

impl Default for Guardrails {
    fn default() -> Self {
        Self {
            max_base_objects: 16,
            max_fiber_morphisms: 8,
            max_product_objects: 4096,
            max_product_morphisms: 1 << 16,
            max_composites: 1 << 20,
        }
    }
}

impl Guardrails {
    /// Bounds used by the law checks, which form iterated products whose
    /// left operands are themselves products.
    pub fn for_law_checks() -> Self {
        Self {
            max_base_objects: 1 << 16,
            max_fiber_morphisms: 64,
            max_product_objects: 1 << 17,
            max_product_morphisms: 1 << 19,
            max_composites: 1 << 22,
        }
    }

    /// Bounds for sampled coherence checks, where oversized samples are
    /// redrawn rather than ground through.
    pub fn for_sampling() -> Self {
        Self {
            max_base_objects: 1 << 16,
            max_fiber_morphisms: 64,
            max_product_objects: 4096,
            max_product_morphisms: 1 << 16,
            max_composites: 1 << 20,
        }
    }
}

fn same<T: PartialEq>(a: &Arc<T>, b: &Arc<T>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
}

/// The category `R(d) ⋉_psi Y` with its decoding tables. Objects are
/// ordered by `a` then `b`; morphisms by source pair, then `alpha`, then `beta`.
#[derive(Debug, Clone)]
pub struct FiberProduct {
    category: Arc<FinCategory>,
    objects: Vec<(usize, usize)>,
    /// first pair index over each `a`
    offsets: Vec<usize>,
    /// (source pair, alpha, beta)
    morphisms: Vec<(usize, usize, usize)>,
    /// first morphism index out of each pair
    starts: Vec<usize>,
}

impl FiberProduct {
    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    /// `(a, b)` of a pair object.
    pub fn object(&self, i: usize) -> (usize, usize) {
        self.objects[i]
    }

    pub fn find_object(&self, a: usize, b: usize) -> Option<usize> {
        let i = self.offsets.get(a)? + b;
        (i < self.offsets[a + 1]).then_some(i)
    }

    /// `(source pair, alpha, beta)` of a pair morphism.
    pub fn morphism(&self, i: usize) -> (usize, usize, usize) {
        self.morphisms[i]
    }

    pub fn find_morphism(&self, src: usize, alpha: usize, beta: usize) -> Option<usize> {
        let (lo, hi) = (*self.starts.get(src)?, *self.starts.get(src + 1)?);
        self.morphisms[lo..hi].binary_search_by(|m| (m.1, m.2).cmp(&(alpha, beta))).ok().map(|k| lo + k)
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        self.offsets[a] + b
    }

    fn midx(&self, src: usize, alpha: usize, beta: usize) -> usize {
        self.find_morphism(src, alpha, beta).expect("pair morphism present")
    }
}

/// Builds `R(d) ⋉_psi Y` from the fiber `R(d)`, a functor `psi: R(d) -> D'`
/// and the right diagram `Y = (D', R')`.
pub fn fiber_semidirect(left_fiber: &Arc<FinCategory>, psi: &Functor, right: &DiagramInCat) -> Result<FiberProduct> {
    if !same(psi.src(), left_fiber) || !same(psi.tgt(), right.base()) {
        return Err(Error::Mismatch("psi must go from the left fiber to the right base".into()));
    }
    let lf = &**left_fiber;
    let mut objects = Vec::new();
    let mut names = Vec::new();
    let mut offsets = Vec::with_capacity(lf.object_count() + 1);
    for a in 0..lf.object_count() {
        offsets.push(objects.len());
        let fib = right.fiber(psi.obj(a));
        for b in 0..fib.object_count() {
            objects.push((a, b));
            names.push(format!("({},{})", lf.objects()[a], fib.objects()[b]));
        }
    }
    offsets.push(objects.len());
    let mut morphisms = Vec::new();
    let mut mors = Vec::new();
    let mut starts = Vec::with_capacity(objects.len() + 1);
    for (s, &(a1, b1)) in objects.iter().enumerate() {
        starts.push(morphisms.len());
        for alpha in lf.hom_from(a1) {
            let a2 = lf.tgt(alpha);
            let pushed = right.fiber_map(psi.mor(alpha)).obj(b1);
            let fib2 = right.fiber(psi.obj(a2));
            for beta in fib2.hom_from(pushed) {
                morphisms.push((s, alpha, beta));
                mors.push(Morphism {
                    id: format!(
                        "({},{}|{})",
                        lf.morphisms()[alpha].id,
                        fib2.morphisms()[beta].id,
                        right.fiber(psi.obj(a1)).objects()[b1]
                    ),
                    src: s,
                    tgt: offsets[a2] + fib2.tgt(beta),
                });
            }
        }
    }
    starts.push(morphisms.len());
    let mut fp = FiberProduct { category: Arc::new(FinCategory::terminal()), objects, offsets, morphisms, starts };
    let identities = fp
        .objects
        .iter()
        .enumerate()
        .map(|(s, &(a, b))| fp.midx(s, lf.identity(a), right.fiber(psi.obj(a)).identity(b)))
        .collect();
    let mut comp = HashMap::default();
    for (m1, &(s1, alpha1, beta1)) in fp.morphisms.iter().enumerate() {
        let t = mors[m1].tgt;
        for m2 in fp.starts[t]..fp.starts[t + 1] {
            let (_, alpha2, beta2) = fp.morphisms[m2];
            let alpha = lf.compose(alpha2, alpha1).ok_or_else(|| {
                Error::Invalid("left fiber composition table is not total".into())
            })?;
            let fib3 = right.fiber(psi.obj(lf.tgt(alpha2)));
            let moved = right.fiber_map(psi.mor(alpha2)).mor(beta1);
            let beta = fib3
                .compose(beta2, moved)
                .ok_or_else(|| Error::Invalid("right fiber composition table is not total".into()))?;
            let gf = fp
                .find_morphism(s1, alpha, beta)
                .ok_or_else(|| Error::Invalid("fiber product not closed under composition".into()))?;
            comp.insert((m2, m1), gf);
        }
    }
    fp.category = Arc::new(FinCategory::from_indexed(names, mors, identities, comp));
    Ok(fp)
}

/// `X ⋉ Y` together with decoding tables for its base and fibers.
#[derive(Debug, Clone)]
pub struct Semidirect {
    left: Arc<DiagramInCat>,
    right: Arc<DiagramInCat>,
    diagram: Arc<DiagramInCat>,
    objects: Vec<(usize, Functor)>,
    obj_lookup: HashMap<(usize, Vec<usize>, Vec<usize>), usize>,
    /// (source, target, f, phi components)
    morphisms: Vec<(usize, usize, usize, Vec<usize>)>,
    mor_lookup: HashMap<(usize, usize, usize, Vec<usize>), usize>,
    fibers: Vec<FiberProduct>,
}

impl Semidirect {
    pub fn left(&self) -> &Arc<DiagramInCat> {
        &self.left
    }

    pub fn right(&self) -> &Arc<DiagramInCat> {
        &self.right
    }

    pub fn diagram(&self) -> &Arc<DiagramInCat> {
        &self.diagram
    }

    /// `(d, psi)` of a base object.
    pub fn object(&self, o: usize) -> (usize, &Functor) {
        let (d, ref psi) = self.objects[o];
        (d, psi)
    }

    pub fn find_object(&self, d: usize, omap: &[usize], mmap: &[usize]) -> Option<usize> {
        self.obj_lookup.get(&(d, omap.to_vec(), mmap.to_vec())).copied()
    }

    /// `(source, target, f, phi)` of a base morphism.
    pub fn morphism(&self, m: usize) -> (usize, usize, usize, &[usize]) {
        let (s, t, f, ref phi) = self.morphisms[m];
        (s, t, f, phi)
    }

    pub fn find_morphism(&self, src: usize, tgt: usize, f: usize, phi: &[usize]) -> Option<usize> {
        self.mor_lookup.get(&(src, tgt, f, phi.to_vec())).copied()
    }

    pub fn fiber(&self, o: usize) -> &FiberProduct {
        &self.fibers[o]
    }

    fn lookup_object(&self, d: usize, omap: Vec<usize>, mmap: Vec<usize>) -> Result<usize> {
        self.obj_lookup
            .get(&(d, omap, mmap))
            .copied()
            .ok_or_else(|| Error::Invalid("image object missing from the target product".into()))
    }

    fn lookup_morphism(&self, s: usize, t: usize, f: usize, phi: Vec<usize>) -> Result<usize> {
        self.mor_lookup
            .get(&(s, t, f, phi))
            .copied()
            .ok_or_else(|| Error::Invalid("image morphism missing from the target product".into()))
    }
}

/// `X ⋉ Y` with the default guardrails.
pub fn semidirect(x: &Arc<DiagramInCat>, y: &Arc<DiagramInCat>) -> Result<Semidirect> {
    semidirect_with(x, y, &Guardrails::default(), None)
}

/// `X ⋉ Y`, optionally restricted to the full subcategory of base objects
/// whose fiber has at most `fiber_cap` objects.
pub fn semidirect_with(
    x: &Arc<DiagramInCat>,
    y: &Arc<DiagramInCat>,
    guard: &Guardrails,
    fiber_cap: Option<usize>,
) -> Result<Semidirect> {
    for (side, diag) in [("left", x), ("right", y)] {
        if diag.base().object_count() > guard.max_base_objects {
            return Err(Error::Guardrail(format!(
                "{side} base has {} objects (bound {})",
                diag.base().object_count(),
                guard.max_base_objects
            )));
        }
    }
    if let Some(f) = x.fibers().iter().find(|f| f.morphism_count() > guard.max_fiber_morphisms) {
        return Err(Error::Guardrail(format!(
            "left fiber has {} morphisms (bound {})",
            f.morphism_count(),
            guard.max_fiber_morphisms
        )));
    }
    let dx = x.base();
    let dy = y.base();
    let weights: Vec<usize> = y.fibers().iter().map(|f| f.object_count()).collect();

    // objects
    let mut objects: Vec<(usize, Functor)> = Vec::new();
    let mut overflow = false;
    for d in 0..dx.object_count() {
        let rd = x.fiber(d);
        let bound = fiber_cap.map(|c| (weights.as_slice(), c));
        for_each_functor(rd, dy, bound, |omap, mmap| {
            if objects.len() >= guard.max_product_objects {
                overflow = true;
                return std::ops::ControlFlow::Break(());
            }
            objects.push((d, Functor::from_parts(rd.clone(), dy.clone(), omap.to_vec(), mmap.to_vec())));
            std::ops::ControlFlow::Continue(())
        });
        if overflow {
            return Err(Error::Guardrail(format!(
                "product base exceeds {} objects",
                guard.max_product_objects
            )));
        }
    }
    let obj_lookup: HashMap<(usize, Vec<usize>, Vec<usize>), usize> = objects
        .iter()
        .enumerate()
        .map(|(i, (d, psi))| ((*d, psi.omap().to_vec(), psi.mmap().to_vec()), i))
        .collect();
    let mut by_base: Vec<Vec<usize>> = vec![Vec::new(); dx.object_count()];
    for (i, (d, _)) in objects.iter().enumerate() {
        by_base[*d].push(i);
    }

    // morphisms
    let mut morphisms: Vec<(usize, usize, usize, Vec<usize>)> = Vec::new();
    for (f, mor) in dx.morphisms().iter().enumerate() {
        let rf = x.fiber_map(f);
        let rd1 = x.fiber(mor.src);
        // targets grouped by the object table of psi_2 o R(f)
        let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::default();
        for &t in &by_base[mor.tgt] {
            let psi2 = &objects[t].1;
            let key: Vec<usize> = rf.omap().iter().map(|&a| psi2.obj(a)).collect();
            groups.entry(key).or_default().push(t);
        }
        for &s in &by_base[mor.src] {
            let psi1 = &objects[s].1;
            let choices: Vec<&[usize]> = (0..rd1.object_count()).map(|a| dy.out_objects(psi1.obj(a))).collect();
            let keys = candidate_keys(&choices, &groups);
            for key in keys {
                for &t in &groups[key] {
                    let psi2 = &objects[t].1;
                    let g_mmap: Vec<usize> = rf.mmap().iter().map(|&m| psi2.mor(m)).collect();
                    for comps in nat_trans_components(rd1, dy, (psi1.omap(), psi1.mmap()), (key, &g_mmap)) {
                        morphisms.push((s, t, f, comps));
                        if morphisms.len() > guard.max_product_morphisms {
                            return Err(Error::Guardrail(format!(
                                "product base exceeds {} morphisms",
                                guard.max_product_morphisms
                            )));
                        }
                    }
                }
            }
        }
    }
    morphisms.sort();
    let mor_lookup: HashMap<(usize, usize, usize, Vec<usize>), usize> =
        morphisms.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();

    // base category
    let obj_names: Vec<String> = objects
        .iter()
        .map(|(d, psi)| format!("({}|{}|{})", dx.objects()[*d], join(psi.omap()), join(psi.mmap())))
        .collect();
    let mors: Vec<Morphism> = morphisms
        .iter()
        .map(|(s, t, f, phi)| Morphism {
            id: format!("({}|{}):{}>{}", dx.morphisms()[*f].id, join(phi), s, t),
            src: *s,
            tgt: *t,
        })
        .collect();
    let identities: Vec<usize> = objects
        .iter()
        .enumerate()
        .map(|(o, (d, psi))| {
            let phi: Vec<usize> = (0..psi.src().object_count()).map(|a| dy.identity(psi.obj(a))).collect();
            mor_lookup[&(o, o, dx.identity(*d), phi)]
        })
        .collect();
    // morphisms are sorted, so those leaving s occupy start[s]..start[s + 1]
    let mut start = vec![0usize; objects.len() + 1];
    for m in &morphisms {
        start[m.0 + 1] += 1;
    }
    for i in 0..objects.len() {
        start[i + 1] += start[i];
    }
    let composites: usize = morphisms.iter().map(|m| start[m.1 + 1] - start[m.1]).sum();
    if composites > guard.max_composites {
        return Err(Error::Guardrail(format!(
            "product base has {composites} composable pairs (bound {})",
            guard.max_composites
        )));
    }
    let mut comp = HashMap::default();
    comp.reserve(composites);
    let mut phi = Vec::new();
    for (i1, (s1, t1, f1, phi1)) in morphisms.iter().enumerate() {
        let rf1 = x.fiber_map(*f1);
        let from_s1 = &morphisms[start[*s1]..start[*s1 + 1]];
        for (i2, (_, t2, f2, phi2)) in morphisms.iter().enumerate().take(start[*t1 + 1]).skip(start[*t1]) {
            let f = dx
                .compose(*f2, *f1)
                .ok_or_else(|| Error::Invalid("left base composition table is not total".into()))?;
            phi.clear();
            for (a, &c1) in phi1.iter().enumerate() {
                phi.push(
                    dy.compose(phi2[rf1.obj(a)], c1)
                        .ok_or_else(|| Error::Invalid("right base composition table is not total".into()))?,
                );
            }
            let pos = from_s1
                .binary_search_by(|m| (m.1, m.2, m.3.as_slice()).cmp(&(*t2, f, phi.as_slice())))
                .map_err(|_| Error::Invalid("product base not closed under composition".into()))?;
            comp.insert((i2, i1), start[*s1] + pos);
        }
    }
    let base = Arc::new(FinCategory::from_indexed(obj_names, mors, identities, comp));

    // fibers and fiber maps
    let fibers: Vec<FiberProduct> = objects
        .iter()
        .map(|(d, psi)| fiber_semidirect(x.fiber(*d), psi, y))
        .collect::<Result<_>>()?;
    let fiber_maps: Vec<Functor> = morphisms
        .iter()
        .map(|(s, t, f, phi)| {
            let (src, tgt) = (&fibers[*s], &fibers[*t]);
            let rf = x.fiber_map(*f);
            let omap: Vec<usize> = src
                .objects
                .iter()
                .map(|&(a, b)| tgt.idx(rf.obj(a), y.fiber_map(phi[a]).obj(b)))
                .collect();
            let mmap: Vec<usize> = src
                .morphisms
                .iter()
                .map(|&(sp, alpha, beta)| {
                    let a2 = x.fiber(objects[*s].0).tgt(alpha);
                    let image_src = omap[sp];
                    tgt.midx(image_src, rf.mor(alpha), y.fiber_map(phi[a2]).mor(beta))
                })
                .collect();
            Functor::from_parts(src.category.clone(), tgt.category.clone(), omap, mmap)
        })
        .collect();
    let diagram = Arc::new(DiagramInCat::from_parts(
        base,
        fibers.iter().map(|f| f.category.clone()).collect(),
        fiber_maps,
    ));
    Ok(Semidirect { left: x.clone(), right: y.clone(), diagram, objects, obj_lookup, morphisms, mor_lookup, fibers })
}

/// Target keys reachable from a source whose objects can move to
/// `choices[a]`. Walks the candidate product or the existing keys,
/// whichever is smaller.
fn candidate_keys<'a>(choices: &[&[usize]], groups: &'a HashMap<Vec<usize>, Vec<usize>>) -> Vec<&'a Vec<usize>> {
    if choices.iter().any(|c| c.is_empty()) {
        return Vec::new();
    }
    let product = choices.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
    let mut out: Vec<&Vec<usize>> = match product {
        Some(p) if p <= groups.len() => {
            let mut out = Vec::new();
            let mut stack = vec![0usize; choices.len()];
            loop {
                let key: Vec<usize> = stack.iter().zip(choices).map(|(&k, c)| c[k]).collect();
                if let Some((k, _)) = groups.get_key_value(&key) {
                    out.push(k);
                }
                if !advance(&mut stack, choices) {
                    break;
                }
            }
            out
        }
        _ => groups
            .keys()
            .filter(|k| k.iter().zip(choices).all(|(y, c)| c.binary_search(y).is_ok()))
            .collect(),
    };
    out.sort();
    out
}

/// Odometer step over the product of the candidate lists; false once exhausted.
fn advance(stack: &mut [usize], choices: &[&[usize]]) -> bool {
    for i in (0..stack.len()).rev() {
        stack[i] += 1;
        if stack[i] < choices[i].len() {
            return true;
        }
        stack[i] = 0;
    }
    false
}

/// `A ⋉ B` for `A: X1 -> X2`, `B: Y1 -> Y2`, between the given products
/// `src = X1 ⋉ Y1` and `tgt = X2 ⋉ Y2`.
///
/// On base objects `(d, psi) |-> (F_A d, F_B o psi o rho^A_d)`; the fiber
/// components send `(a, b) |-> (rho^A_d a, rho^B_{psi(rho^A_d a)} b)`.
pub fn semidirect_on_morphisms(
    a: &DiagramMorphism,
    b: &DiagramMorphism,
    src: &Semidirect,
    tgt: &Semidirect,
) -> Result<DiagramMorphism> {
    if !same(a.src(), &src.left) || !same(b.src(), &src.right) || !same(a.tgt(), &tgt.left) || !same(b.tgt(), &tgt.right) {
        return Err(Error::Mismatch("morphisms do not match the given products".into()));
    }
    let fa = a.base();
    let fb = b.base();
    let mut omap = Vec::with_capacity(src.objects.len());
    for (d, psi) in &src.objects {
        let rho = a.rho(*d);
        let o: Vec<usize> = rho.omap().iter().map(|&x| fb.obj(psi.obj(x))).collect();
        let m: Vec<usize> = rho.mmap().iter().map(|&x| fb.mor(psi.mor(x))).collect();
        omap.push(tgt.lookup_object(fa.obj(*d), o, m)?);
    }
    let mut mmap = Vec::with_capacity(src.morphisms.len());
    for (s, t, f, phi) in &src.morphisms {
        let rho1 = a.rho(src.objects[*s].0);
        let comps: Vec<usize> = (0..rho1.src().object_count()).map(|x| fb.mor(phi[rho1.obj(x)])).collect();
        mmap.push(tgt.lookup_morphism(omap[*s], omap[*t], fa.mor(*f), comps)?);
    }
    let base = Functor::from_parts(src.diagram.base().clone(), tgt.diagram.base().clone(), omap.clone(), mmap);
    let mut rhos = Vec::with_capacity(src.objects.len());
    for (o, (d, psi)) in src.objects.iter().enumerate() {
        let ra = a.rho(*d);
        let from = &tgt.fibers[omap[o]];
        let to = &src.fibers[o];
        let fo: Vec<usize> = from
            .objects
            .iter()
            .map(|&(x, y)| {
                let xa = ra.obj(x);
                to.idx(xa, b.rho(psi.obj(xa)).obj(y))
            })
            .collect();
        let fm: Vec<usize> = from
            .morphisms
            .iter()
            .map(|&(sp, alpha, beta)| {
                let a2 = ra.obj(ra.src().tgt(alpha));
                to.midx(fo[sp], ra.mor(alpha), b.rho(psi.obj(a2)).mor(beta))
            })
            .collect();
        rhos.push(Functor::from_parts(from.category.clone(), to.category.clone(), fo, fm));
    }
    Ok(DiagramMorphism::from_parts(src.diagram.clone(), tgt.diagram.clone(), base, rhos))
}

/// The products needed to state an associator for `(X, Y, Z)`.
#[derive(Debug, Clone)]
pub struct TripleProducts {
    pub xy: Semidirect,
    pub xy_z: Semidirect,
    pub yz: Semidirect,
    pub x_yz: Semidirect,
}

impl TripleProducts {
    pub fn new(
        x: &Arc<DiagramInCat>,
        y: &Arc<DiagramInCat>,
        z: &Arc<DiagramInCat>,
        guard: &Guardrails,
    ) -> Result<Self> {
        let xy = semidirect_with(x, y, guard, None)?;
        let xy_z = semidirect_with(&xy.diagram, z, guard, None)?;
        let yz = semidirect_with(y, z, guard, None)?;
        let x_yz = semidirect_with(x, &yz.diagram, guard, None)?;
        Ok(Self { xy, xy_z, yz, x_yz })
    }
}

/// The associator `(X ⋉ Y) ⋉ Z -> X ⋉ (Y ⋉ Z)`, sending `((d, psi), chi)`
/// to `(d, a |-> (psi a, chi(a, -)))`. Every fiber component relabels
/// `(a, (b, c))` as `((a, b), c)`.
pub fn associator(p: &TripleProducts) -> Result<DiagramMorphism> {
    associator_between(&p.xy, &p.xy_z, &p.yz, &p.x_yz)
}

pub fn associator_between(
    xy: &Semidirect,
    xy_z: &Semidirect,
    yz: &Semidirect,
    x_yz: &Semidirect,
) -> Result<DiagramMorphism> {
    if !same(&xy_z.left, &xy.diagram) || !same(&x_yz.right, &yz.diagram) {
        return Err(Error::Mismatch("associator products do not fit together".into()));
    }
    let x = &xy.left;
    let y = &xy.right;
    // xi for each object of (X ⋉ Y) ⋉ Z, as (object of X ⋉ (Y ⋉ Z), per-a object of Y ⋉ Z)
    let mut xi_objs: Vec<Vec<usize>> = Vec::with_capacity(xy_z.objects.len());
    let mut omap = Vec::with_capacity(xy_z.objects.len());
    for (o_xy, chi) in &xy_z.objects {
        let (d, psi) = (&xy.objects[*o_xy].0, &xy.objects[*o_xy].1);
        let fxy = &xy.fibers[*o_xy];
        let rd = x.fiber(*d);
        let mut xi_o = Vec::with_capacity(rd.object_count());
        for a in 0..rd.object_count() {
            let ry = y.fiber(psi.obj(a));
            let co: Vec<usize> = (0..ry.object_count()).map(|b| chi.obj(fxy.idx(a, b))).collect();
            let cm: Vec<usize> = (0..ry.morphism_count())
                .map(|beta| {
                    let s = fxy.idx(a, ry.src(beta));
                    chi.mor(fxy.midx(s, rd.identity(a), beta))
                })
                .collect();
            xi_o.push(yz.lookup_object(psi.obj(a), co, cm)?);
        }
        let mut xi_m = Vec::with_capacity(rd.morphism_count());
        for alpha in 0..rd.morphism_count() {
            let (a1, a2) = (rd.src(alpha), rd.tgt(alpha));
            let ry1 = y.fiber(psi.obj(a1));
            let push = y.fiber_map(psi.mor(alpha));
            let ry2 = y.fiber(psi.obj(a2));
            let phi: Vec<usize> = (0..ry1.object_count())
                .map(|b| {
                    let s = fxy.idx(a1, b);
                    chi.mor(fxy.midx(s, alpha, ry2.identity(push.obj(b))))
                })
                .collect();
            xi_m.push(yz.lookup_morphism(xi_o[a1], xi_o[a2], psi.mor(alpha), phi)?);
        }
        omap.push(x_yz.lookup_object(*d, xi_o.clone(), xi_m)?);
        xi_objs.push(xi_o);
    }
    let mut mmap = Vec::with_capacity(xy_z.morphisms.len());
    for (s, t, m_xy, omega) in &xy_z.morphisms {
        let (_, _, f, phi) = &xy.morphisms[*m_xy];
        let o1 = xy_z.objects[*s].0;
        let (d1, psi1) = (&xy.objects[o1].0, &xy.objects[o1].1);
        let fxy = &xy.fibers[o1];
        let rd = x.fiber(*d1);
        let rf = x.fiber_map(*f);
        let mut big_phi = Vec::with_capacity(rd.object_count());
        for a in 0..rd.object_count() {
            let ry = y.fiber(psi1.obj(a));
            let comps: Vec<usize> = (0..ry.object_count()).map(|b| omega[fxy.idx(a, b)]).collect();
            big_phi.push(yz.lookup_morphism(xi_objs[*s][a], xi_objs[*t][rf.obj(a)], phi[a], comps)?);
        }
        mmap.push(x_yz.lookup_morphism(omap[*s], omap[*t], *f, big_phi)?);
    }
    let base = Functor::from_parts(xy_z.diagram.base().clone(), x_yz.diagram.base().clone(), omap.clone(), mmap);
    let mut rhos = Vec::with_capacity(xy_z.objects.len());
    for (o, (o_xy, _)) in xy_z.objects.iter().enumerate() {
        let from = &x_yz.fibers[omap[o]];
        let to = &xy_z.fibers[o];
        let fxy = &xy.fibers[*o_xy];
        let fo: Vec<usize> = from
            .objects
            .iter()
            .map(|&(a, c)| {
                let (b, zz) = yz.fibers[xi_objs[o][a]].objects[c];
                to.idx(fxy.idx(a, b), zz)
            })
            .collect();
        let fm: Vec<usize> = from
            .morphisms
            .iter()
            .map(|&(sp, alpha, gamma)| {
                let a1 = from.objects[sp].0;
                let a2 = x.fiber(xy.objects[*o_xy].0).tgt(alpha);
                let (_, beta, zeta) = yz.fibers[xi_objs[o][a2]].morphisms[gamma];
                let (_, c1) = from.objects[sp];
                let (b1, _) = yz.fibers[xi_objs[o][a1]].objects[c1];
                let src_xy = fxy.idx(a1, b1);
                let m_xy = fxy.midx(src_xy, alpha, beta);
                to.midx(fo[sp], m_xy, zeta)
            })
            .collect();
        rhos.push(Functor::from_parts(from.category.clone(), to.category.clone(), fo, fm));
    }
    Ok(DiagramMorphism::from_parts(xy_z.diagram.clone(), x_yz.diagram.clone(), base, rhos))
}

/// Inverse of a diagram morphism whose base and components are isomorphisms.
pub fn invert(m: &DiagramMorphism) -> Option<DiagramMorphism> {
    let base_inv = m.base().inverse()?;
    let mut rhos = Vec::with_capacity(m.tgt().base().object_count());
    for d2 in 0..m.tgt().base().object_count() {
        rhos.push(m.rho(base_inv.obj(d2)).inverse()?);
    }
    Some(DiagramMorphism::from_parts(m.tgt().clone(), m.src().clone(), base_inv, rhos))
}

/// True when `inv o m` and `m o inv` are identities.
pub fn is_verified_inverse(m: &DiagramMorphism, inv: &DiagramMorphism) -> bool {
    let forward = compose_diagram_morphisms(inv, m);
    let backward = compose_diagram_morphisms(m, inv);
    match (forward, backward) {
        (Ok(f), Ok(b)) => {
            f == DiagramMorphism::identity(m.src().clone()) && b == DiagramMorphism::identity(m.tgt().clone())
        }
        _ => false,
    }
}

fn is_unit(x: &DiagramInCat) -> bool {
    x.base().morphism_count() == 1 && x.fiber(0).morphism_count() == 1
}

/// Right unitor `X ⋉ 1 -> X` for `xu = X ⋉ unit`.
pub fn right_unitor(xu: &Semidirect) -> Result<DiagramMorphism> {
    let x = &xu.left;
    if !is_unit(&xu.right) {
        return Err(Error::Mismatch("right operand is not the unit".into()));
    }
    let omap: Vec<usize> = xu.objects.iter().map(|(d, _)| *d).collect();
    let mmap: Vec<usize> = xu.morphisms.iter().map(|(_, _, f, _)| *f).collect();
    let base = Functor::from_parts(xu.diagram.base().clone(), x.base().clone(), omap, mmap);
    let rhos = xu
        .objects
        .iter()
        .enumerate()
        .map(|(o, (d, _))| {
            let rd = x.fiber(*d);
            let fib = &xu.fibers[o];
            let fo: Vec<usize> = (0..rd.object_count()).map(|a| fib.idx(a, 0)).collect();
            let fm: Vec<usize> = (0..rd.morphism_count())
                .map(|alpha| fib.midx(fo[rd.src(alpha)], alpha, 0))
                .collect();
            Functor::from_parts(rd.clone(), fib.category.clone(), fo, fm)
        })
        .collect();
    Ok(DiagramMorphism::from_parts(xu.diagram.clone(), x.clone(), base, rhos))
}

/// Left unitor `1 ⋉ X -> X` for `ux = unit ⋉ X`.
pub fn left_unitor(ux: &Semidirect) -> Result<DiagramMorphism> {
    let x = &ux.right;
    if !is_unit(&ux.left) {
        return Err(Error::Mismatch("left operand is not the unit".into()));
    }
    let omap: Vec<usize> = ux.objects.iter().map(|(_, psi)| psi.obj(0)).collect();
    let mmap: Vec<usize> = ux.morphisms.iter().map(|(_, _, _, phi)| phi[0]).collect();
    let base = Functor::from_parts(ux.diagram.base().clone(), x.base().clone(), omap, mmap);
    let rhos = ux
        .objects
        .iter()
        .enumerate()
        .map(|(o, (_, psi))| {
            let rx = x.fiber(psi.obj(0));
            let fib = &ux.fibers[o];
            let fo: Vec<usize> = (0..rx.object_count()).map(|b| fib.idx(0, b)).collect();
            let fm: Vec<usize> = (0..rx.morphism_count())
                .map(|beta| fib.midx(fo[rx.src(beta)], 0, beta))
                .collect();
            Functor::from_parts(rx.clone(), fib.category.clone(), fo, fm)
        })
        .collect();
    Ok(DiagramMorphism::from_parts(ux.diagram.clone(), x.clone(), base, rhos))
}

/// Both unitors of `X` with verified inverses.
#[derive(Debug, Clone)]
pub struct Unitors {
    pub unit_x: Semidirect,
    pub x_unit: Semidirect,
    pub left: DiagramMorphism,
    pub left_inverse: DiagramMorphism,
    pub right: DiagramMorphism,
    pub right_inverse: DiagramMorphism,
}

pub fn unitors(x: &Arc<DiagramInCat>, guard: &Guardrails) -> Result<Unitors> {
    let unit = Arc::new(crate::diagram::unit_diagram());
    let unit_x = semidirect_with(&unit, x, guard, None)?;
    let x_unit = semidirect_with(x, &unit, guard, None)?;
    let left = left_unitor(&unit_x)?;
    let right = right_unitor(&x_unit)?;
    let left_inverse = invert(&left).ok_or_else(|| Error::Invalid("left unitor is not invertible".into()))?;
    let right_inverse = invert(&right).ok_or_else(|| Error::Invalid("right unitor is not invertible".into()))?;
    if !is_verified_inverse(&left, &left_inverse) || !is_verified_inverse(&right, &right_inverse) {
        return Err(Error::Invalid("unitor round trips are not identities".into()));
    }
    Ok(Unitors { unit_x, x_unit, left, left_inverse, right, right_inverse })
}

/// Outcome of a coherence or club law check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawFailure {
    pub law: String,
    pub witness: String,
}

fn compare(law: &str, left: &DiagramMorphism, right: &DiagramMorphism) -> Option<LawFailure> {
    if left == right {
        None
    } else {
        Some(LawFailure { law: law.to_string(), witness: left.first_difference(right).unwrap_or_default() })
    }
}

/// Triangle identity `(id_X ⋉ l_Y) o a_{X,1,Y} = r_X ⋉ id_Y`.
pub fn triangle_check(x: &Arc<DiagramInCat>, y: &Arc<DiagramInCat>, guard: &Guardrails) -> Result<Option<LawFailure>> {
    let unit = Arc::new(crate::diagram::unit_diagram());
    let p = TripleProducts::new(x, &unit, y, guard)?;
    let xy = semidirect_with(x, y, guard, None)?;
    let a = associator(&p)?;
    let l = left_unitor(&p.yz)?;
    let r = right_unitor(&p.xy)?;
    let id_x = DiagramMorphism::identity(x.clone());
    let id_y = DiagramMorphism::identity(y.clone());
    let lhs = compose_diagram_morphisms(&semidirect_on_morphisms(&id_x, &l, &p.x_yz, &xy)?, &a)?;
    let rhs = semidirect_on_morphisms(&r, &id_y, &p.xy_z, &xy)?;
    Ok(compare("triangle", &lhs, &rhs))
}

/// Pentagon identity for four diagrams.
pub fn pentagon_check(
    w: &Arc<DiagramInCat>,
    x: &Arc<DiagramInCat>,
    y: &Arc<DiagramInCat>,
    z: &Arc<DiagramInCat>,
    guard: &Guardrails,
) -> Result<Option<LawFailure>> {
    let g = guard;
    let wx = semidirect_with(w, x, g, None)?;
    let wx_y = semidirect_with(&wx.diagram, y, g, None)?;
    let wxy_z = semidirect_with(&wx_y.diagram, z, g, None)?;
    let yz = semidirect_with(y, z, g, None)?;
    let wx_yz = semidirect_with(&wx.diagram, &yz.diagram, g, None)?;
    let x_yz = semidirect_with(x, &yz.diagram, g, None)?;
    let w_xyz = semidirect_with(w, &x_yz.diagram, g, None)?;
    let xy = semidirect_with(x, y, g, None)?;
    let w_xy = semidirect_with(w, &xy.diagram, g, None)?;
    let wxy_z2 = semidirect_with(&w_xy.diagram, z, g, None)?;
    let xy_z = semidirect_with(&xy.diagram, z, g, None)?;
    let w_xyz2 = semidirect_with(w, &xy_z.diagram, g, None)?;

    // ((WX)Y)Z -> (WX)(YZ) -> W(X(YZ))
    let a1 = associator_between(&wx_y, &wxy_z, &yz, &wx_yz)?;
    let a2 = associator_between(&wx, &wx_yz, &x_yz, &w_xyz)?;
    let top = compose_diagram_morphisms(&a2, &a1)?;

    // ((WX)Y)Z -> (W(XY))Z -> W((XY)Z) -> W(X(YZ))
    let a_wxy = associator_between(&wx, &wx_y, &xy, &w_xy)?;
    let step1 = semidirect_on_morphisms(&a_wxy, &DiagramMorphism::identity(z.clone()), &wxy_z, &wxy_z2)?;
    let step2 = associator_between(&w_xy, &wxy_z2, &xy_z, &w_xyz2)?;
    let a_xyz = associator_between(&xy, &xy_z, &yz, &x_yz)?;
    let step3 = semidirect_on_morphisms(&DiagramMorphism::identity(w.clone()), &a_xyz, &w_xyz2, &w_xyz)?;
    let bottom = compose_diagram_morphisms(&step3, &compose_diagram_morphisms(&step2, &step1)?)?;
    Ok(compare("pentagon", &top, &bottom))
}

/// Associator naturality for morphisms `A: X1 -> X2`, `B: Y1 -> Y2`, `C: Z1 -> Z2`.
pub fn associator_naturality_check(
    a: &DiagramMorphism,
    b: &DiagramMorphism,
    c: &DiagramMorphism,
    guard: &Guardrails,
) -> Result<Option<LawFailure>> {
    let p1 = TripleProducts::new(a.src(), b.src(), c.src(), guard)?;
    let p2 = TripleProducts::new(a.tgt(), b.tgt(), c.tgt(), guard)?;
    let ab = semidirect_on_morphisms(a, b, &p1.xy, &p2.xy)?;
    let ab_c = semidirect_on_morphisms(&ab, c, &p1.xy_z, &p2.xy_z)?;
    let bc = semidirect_on_morphisms(b, c, &p1.yz, &p2.yz)?;
    let a_bc = semidirect_on_morphisms(a, &bc, &p1.x_yz, &p2.x_yz)?;
    let lhs = compose_diagram_morphisms(&associator(&p2)?, &ab_c)?;
    let rhs = compose_diagram_morphisms(&a_bc, &associator(&p1)?)?;
    Ok(compare("associator naturality", &lhs, &rhs))
}

/// A monoid in diagrams under ⋉. `mu` has source the product `C ⋉ C`
/// (restricted to fibers of at most `fiber_cap` objects when set), `eta`
/// has source the unit diagram.
#[derive(Debug, Clone)]
pub struct ClubStructure {
    pub carrier: Arc<DiagramInCat>,
    pub mu: DiagramMorphism,
    pub eta: DiagramMorphism,
    pub fiber_cap: Option<usize>,
}

/// Result of [`club_check`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClubReport {
    pub failures: Vec<LawFailure>,
    pub checked_objects: usize,
}

impl ClubReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The square `C ⋉ C` used as the source of `mu`.
pub fn club_square(carrier: &Arc<DiagramInCat>, guard: &Guardrails, fiber_cap: Option<usize>) -> Result<Semidirect> {
    semidirect_with(carrier, carrier, guard, fiber_cap)
}

/// Checks associativity `mu o (mu ⋉ id) = mu o (id ⋉ mu) o assoc` and both
/// unit laws as strict equalities of tables.
pub fn club_check(club: &ClubStructure, guard: &Guardrails) -> Result<ClubReport> {
    let c = &club.carrier;
    let cap = club.fiber_cap;
    let cc = club_square(c, guard, cap)?;
    let mut report = ClubReport::default();
    let mu_problems = {
        let m = DiagramMorphism::from_parts(cc.diagram.clone(), c.clone(), club.mu.base().clone(), club.mu.rhos().to_vec());
        if club.mu.base().omap().len() != cc.diagram.base().object_count()
            || club.mu.base().mmap().len() != cc.diagram.base().morphism_count()
            || club.mu.rhos().len() != cc.diagram.base().object_count()
        {
            vec!["mu does not have C ⋉ C as its source".to_string()]
        } else {
            m.validate()
        }
    };
    if !mu_problems.is_empty() {
        return Err(Error::Invalid(format!("mu: {}", mu_problems.join("; "))));
    }
    let eta_problems = club.eta.validate();
    if !eta_problems.is_empty() {
        return Err(Error::Invalid(format!("eta: {}", eta_problems.join("; "))));
    }
    let mu = DiagramMorphism::from_parts(cc.diagram.clone(), c.clone(), club.mu.base().clone(), club.mu.rhos().to_vec());
    let id_c = DiagramMorphism::identity(c.clone());

    // associativity
    let cc_c = semidirect_with(&cc.diagram, c, guard, cap)?;
    let c_cc = semidirect_with(c, &cc.diagram, guard, cap)?;
    report.checked_objects += cc_c.diagram.base().object_count();
    let assoc = associator_between(&cc, &cc_c, &cc, &c_cc)?;
    let mu_id = semidirect_on_morphisms(&mu, &id_c, &cc_c, &cc);
    let id_mu = semidirect_on_morphisms(&id_c, &mu, &c_cc, &cc);
    match (mu_id, id_mu) {
        (Ok(mu_id), Ok(id_mu)) => {
            let lhs = compose_diagram_morphisms(&mu, &mu_id)?;
            let rhs = compose_diagram_morphisms(&mu, &compose_diagram_morphisms(&id_mu, &assoc)?)?;
            report.failures.extend(compare("associativity", &lhs, &rhs));
        }
        _ => report.failures.push(LawFailure {
            law: "associativity".into(),
            witness: "mu does not preserve the fiber cap".into(),
        }),
    }

    // unit laws
    let unit = club.eta.src().clone();
    let uc = semidirect_with(&unit, c, guard, cap)?;
    let cu = semidirect_with(c, &unit, guard, cap)?;
    report.checked_objects += uc.diagram.base().object_count() + cu.diagram.base().object_count();
    let eta_id = semidirect_on_morphisms(&club.eta, &id_c, &uc, &cc);
    let id_eta = semidirect_on_morphisms(&id_c, &club.eta, &cu, &cc);
    match eta_id {
        Ok(eta_id) => {
            let lhs = compose_diagram_morphisms(&mu, &eta_id)?;
            report.failures.extend(compare("left unit", &lhs, &left_unitor(&uc)?));
        }
        Err(_) => report.failures.push(LawFailure { law: "left unit".into(), witness: "eta ⋉ id leaves the fiber cap".into() }),
    }
    match id_eta {
        Ok(id_eta) => {
            let lhs = compose_diagram_morphisms(&mu, &id_eta)?;
            report.failures.extend(compare("right unit", &lhs, &right_unitor(&cu)?));
        }
        Err(_) => report.failures.push(LawFailure { law: "right unit".into(), witness: "id ⋉ eta leaves the fiber cap".into() }),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{constantify, find_diagram_isomorphism, unit_diagram};
    use crate::fincat::find_isomorphism;
    use crate::fixtures::{nonsymmetry_pair, random_diagram, random_morphism_into};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arc(d: DiagramInCat) -> Arc<DiagramInCat> {
        Arc::new(d)
    }

    fn constant(base: FinCategory, fiber: FinCategory) -> Arc<DiagramInCat> {
        let base = Arc::new(base);
        let fiber = Arc::new(fiber);
        let maps = vec![Functor::identity(fiber.clone()); base.morphism_count()];
        arc(DiagramInCat::new(base.clone(), vec![fiber; base.object_count()], maps).unwrap())
    }

    #[test]
    fn nonsymmetry_counts_and_no_iso() {
        let (x, y) = nonsymmetry_pair();
        let xy = semidirect(&x, &y).unwrap();
        let yx = semidirect(&y, &x).unwrap();
        assert_eq!(xy.diagram().base().object_count(), 4);
        assert_eq!(yx.diagram().base().object_count(), 2);
        assert!(find_isomorphism(xy.diagram().base(), yx.diagram().base()).is_none());
        assert!(find_diagram_isomorphism(xy.diagram(), yx.diagram()).is_none());
    }

    #[test]
    fn discrete_counting_oracle() {
        let base = Arc::new(FinCategory::discrete_n(2));
        let fibers = vec![Arc::new(FinCategory::discrete_n(2)), Arc::new(FinCategory::discrete_n(3))];
        let maps = fibers.iter().map(|f| Functor::identity(f.clone())).collect();
        let x = arc(DiagramInCat::new(base, fibers, maps).unwrap());
        let y = constant(FinCategory::discrete_n(3), FinCategory::terminal());
        let p = semidirect(&x, &y).unwrap();
        assert_eq!(p.diagram().base().object_count(), 3usize.pow(2) + 3usize.pow(3));
        assert!(p.diagram().base().is_discrete());
    }

    #[test]
    fn arrow_fiber_against_pair_enumeration() {
        let arrow = Arc::new(FinCategory::walking_arrow());
        let x = constant(FinCategory::terminal(), FinCategory::walking_arrow());
        let y = constant(FinCategory::walking_arrow(), FinCategory::walking_arrow());
        for psi in crate::fincat::enumerate_functors(&arrow, y.base()).unwrap() {
            let fp = fiber_semidirect(x.fiber(0), &psi, &y).unwrap();
            assert!(fp.category().validate().is_empty());
            // brute force: every (alpha, beta, b1) with beta starting at R'psi(alpha)(b1)
            let mut count = 0;
            for alpha in 0..arrow.morphism_count() {
                for b1 in 0..2 {
                    let start = y.fiber_map(psi.mor(alpha)).obj(b1);
                    let fib = y.fiber(psi.obj(arrow.tgt(alpha)));
                    count += (0..fib.morphism_count()).filter(|&b| fib.src(b) == start).count();
                }
            }
            assert_eq!(fp.category().object_count(), 4);
            assert_eq!(fp.category().morphism_count(), count);
        }
    }

    #[test]
    fn unit_fiber_collapses() {
        let x = constant(FinCategory::terminal(), FinCategory::terminal());
        let y = constant(FinCategory::terminal(), FinCategory::walking_arrow());
        let p = semidirect(&x, &y).unwrap();
        assert!(find_isomorphism(p.fiber(0).category(), y.fiber(0)).is_some());
    }

    #[test]
    fn products_are_valid_and_unitors_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = arc(random_diagram(&mut rng, 3, 3));
            let y = arc(random_diagram(&mut rng, 3, 3));
            let p = semidirect(&x, &y).unwrap();
            assert!(p.diagram().validate().is_empty());
            assert!(p.diagram().base().validate().is_empty());
            let u = unitors(&x, &Guardrails::default()).unwrap();
            assert!(u.left.validate().is_empty());
            assert!(u.right.validate().is_empty());
            let unit = arc(unit_diagram());
            assert!(find_diagram_isomorphism(&semidirect(&x, &unit).unwrap().diagram().clone(), &x).is_some());
        }
    }

    #[test]
    fn unitors_coincide_at_unit() {
        let unit = arc(unit_diagram());
        let u = unitors(&unit, &Guardrails::default()).unwrap();
        assert_eq!(u.left, u.right);
    }

    #[test]
    fn bifunctor_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Guardrails::default();
        for _ in 0..15 {
            let x3 = arc(random_diagram(&mut rng, 2, 3));
            let y3 = arc(random_diagram(&mut rng, 2, 3));
            let a2 = random_morphism_into(&mut rng, &x3, 2);
            let b2 = random_morphism_into(&mut rng, &y3, 2);
            let a1 = random_morphism_into(&mut rng, a2.src(), 2);
            let b1 = random_morphism_into(&mut rng, b2.src(), 2);
            let p1 = semidirect_with(a1.src(), b1.src(), &g, None).unwrap();
            let p2 = semidirect_with(a2.src(), b2.src(), &g, None).unwrap();
            let p3 = semidirect_with(&x3, &y3, &g, None).unwrap();
            let id = semidirect_on_morphisms(
                &DiagramMorphism::identity(x3.clone()),
                &DiagramMorphism::identity(y3.clone()),
                &p3,
                &p3,
            )
            .unwrap();
            assert_eq!(id, DiagramMorphism::identity(p3.diagram().clone()));
            let ab1 = semidirect_on_morphisms(&a1, &b1, &p1, &p2).unwrap();
            let ab2 = semidirect_on_morphisms(&a2, &b2, &p2, &p3).unwrap();
            assert!(ab1.validate().is_empty());
            let lhs = semidirect_on_morphisms(
                &compose_diagram_morphisms(&a2, &a1).unwrap(),
                &compose_diagram_morphisms(&b2, &b1).unwrap(),
                &p1,
                &p3,
            )
            .unwrap();
            assert_eq!(lhs, compose_diagram_morphisms(&ab2, &ab1).unwrap());
        }
    }

    #[test]
    fn associator_is_iso_and_coherent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Guardrails::for_law_checks();
        for _ in 0..10 {
            let x = arc(random_diagram(&mut rng, 2, 2));
            let y = arc(random_diagram(&mut rng, 2, 2));
            let z = arc(random_diagram(&mut rng, 2, 2));
            let p = TripleProducts::new(&x, &y, &z, &g).unwrap();
            let a = associator(&p).unwrap();
            assert!(a.validate().is_empty());
            let inv = invert(&a).expect("associator invertible");
            assert!(is_verified_inverse(&a, &inv));
            assert_eq!(triangle_check(&x, &z, &g).unwrap(), None);
            assert_eq!(pentagon_check(&x, &y, &z, &x, &g).unwrap(), None);
        }
    }

    #[test]
    fn associator_of_trivial_diagrams_is_identity() {
        let one = arc(unit_diagram());
        let p = TripleProducts::new(&one, &one, &one, &Guardrails::default()).unwrap();
        let a = associator(&p).unwrap();
        assert_eq!(a.base().omap(), &[0]);
        assert!(a.rhos().iter().all(|r| r.omap() == [0]));
    }

    #[test]
    fn associator_naturality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Guardrails::for_law_checks();
        for _ in 0..8 {
            let xs: Vec<_> = (0..3).map(|_| arc(random_diagram(&mut rng, 2, 2))).collect();
            let ms: Vec<_> = xs.iter().map(|x| random_morphism_into(&mut rng, x, 2)).collect();
            assert_eq!(associator_naturality_check(&ms[0], &ms[1], &ms[2], &g).unwrap(), None);
        }
    }

    fn trivial_club() -> ClubStructure {
        let unit = arc(unit_diagram());
        let uu = semidirect(&unit, &unit).unwrap();
        ClubStructure {
            carrier: unit.clone(),
            mu: left_unitor(&uu).unwrap(),
            eta: DiagramMorphism::identity(unit),
            fiber_cap: None,
        }
    }

    #[test]
    fn trivial_club_passes() {
        let report = club_check(&trivial_club(), &Guardrails::default()).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn monoid_club_and_remapped_mu() {
        // constantify(M) for the monoid Z/2 is a club: mu sends (*, psi) to psi(*)
        let z2 = Arc::new(FinCategory::monoid(&["e", "t"], &[vec![0, 1], vec![1, 0]]));
        let c = arc(constantify(&z2));
        let cc = semidirect(&c, &c).unwrap();
        assert!(left_unitor(&cc).is_err());
        let omap = vec![0; cc.diagram().base().object_count()];
        let mmap: Vec<usize> = (0..cc.diagram().base().morphism_count())
            .map(|m| {
                let (_, _, f, phi) = cc.morphism(m);
                z2.compose(phi[0], f).unwrap()
            })
            .collect();
        let base = Functor::new(cc.diagram().base().clone(), z2.clone(), omap, mmap).unwrap();
        let rhos = (0..cc.diagram().base().object_count())
            .map(|o| {
                let fib = cc.fiber(o).category().clone();
                Functor::new(c.fiber(0).clone(), fib, vec![0], vec![0]).unwrap()
            })
            .collect();
        let mu = DiagramMorphism::new(cc.diagram().clone(), c.clone(), base, rhos).unwrap();
        let one = arc(unit_diagram());
        let eta_base = Functor::new(one.base().clone(), z2.clone(), vec![0], vec![0]).unwrap();
        let eta = DiagramMorphism::new(one.clone(), c.clone(), eta_base, vec![Functor::identity(one.fiber(0).clone())])
            .unwrap();
        let club = ClubStructure { carrier: c.clone(), mu: mu.clone(), eta, fiber_cap: None };
        let report = club_check(&club, &Guardrails::default()).unwrap();
        assert!(report.passed(), "{:?}", report.failures);

        // a multiplication that ignores psi breaks the left unit law
        let bad_mmap: Vec<usize> =
            (0..cc.diagram().base().morphism_count()).map(|m| cc.morphism(m).2).collect();
        let bad_base = Functor::new(cc.diagram().base().clone(), z2.clone(), vec![0], bad_mmap).unwrap();
        let bad = DiagramMorphism::new(cc.diagram().clone(), c.clone(), bad_base, mu.rhos().to_vec()).unwrap();
        let report = club_check(&ClubStructure { mu: bad, ..club }, &Guardrails::default()).unwrap();
        assert!(report.failures.iter().any(|f| f.law == "left unit"));
    }
}
