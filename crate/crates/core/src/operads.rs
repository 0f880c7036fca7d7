//! Set-theoretic operads as diagrams in `Cat`, the composite collection
//! `P∘P`, and the passage between operadic compositions and club structures.

use std::collections::BTreeMap;
use std::sync::Arc;

use rustc_hash::FxHashMap as HashMap;

use crate::diagram::{unit_diagram, DiagramInCat, DiagramMorphism};
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, Functor, Morphism};
use crate::semidirect::{club_square, invert, is_verified_inverse, ClubStructure, Guardrails, Semidirect};

/// Graded finite sets `P_0, ..., P_cap`. Elements are numbered globally,
/// arity by arity, in listing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collection {
    levels: Vec<Vec<String>>,
    offsets: Vec<usize>,
}

impl Collection {
    pub fn new(levels: Vec<Vec<String>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Schema("a collection needs at least arity 0".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for n in levels.iter().flatten() {
            if !seen.insert(n.clone()) {
                return Err(Error::Schema(format!("duplicate element {n}")));
            }
        }
        let mut offsets = vec![0];
        for l in &levels {
            offsets.push(offsets.last().unwrap() + l.len());
        }
        Ok(Self { levels, offsets })
    }

    pub fn cap(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &[String] {
        self.levels.get(n).map_or(&[], Vec::as_slice)
    }

    pub fn levels(&self) -> &[Vec<String>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn arity(&self, g: usize) -> usize {
        self.offsets.partition_point(|&o| o <= g) - 1
    }

    pub fn name(&self, g: usize) -> &str {
        let n = self.arity(g);
        &self.levels[n][g - self.offsets[n]]
    }

    pub fn global(&self, n: usize, i: usize) -> usize {
        self.offsets[n] + i
    }

    /// Global ids of arity `n`.
    pub fn ids(&self, n: usize) -> std::ops::Range<usize> {
        if n > self.cap() {
            return 0..0;
        }
        self.offsets[n]..self.offsets[n + 1]
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        (0..self.len()).find(|&g| self.name(g) == name)
    }
}

/// All tuples `[p, q_1, .., q_n]` with `p in P_n` and `sum arity(q_i) <= cap`,
/// ordered by total arity, then `p`, then the `q`s lexicographically.
fn tuples(p: &Collection, q: &Collection, cap: usize) -> Vec<Vec<usize>> {
    let mut by_arity: Vec<Vec<Vec<usize>>> = vec![Vec::new(); cap + 1];
    for n in 0..=p.cap() {
        for pg in p.ids(n) {
            let mut cur = vec![pg];
            fn go(q: &Collection, n: usize, left: usize, cur: &mut Vec<usize>, sum: usize, out: &mut Vec<Vec<Vec<usize>>>) {
                if cur.len() == n + 1 {
                    out[sum].push(cur.clone());
                    return;
                }
                for m in 0..=left.min(q.cap()) {
                    for g in q.ids(m) {
                        cur.push(g);
                        go(q, n, left - m, cur, sum + m, out);
                        cur.pop();
                    }
                }
            }
            go(q, n, cap, &mut cur, 0, &mut by_arity);
        }
    }
    by_arity.into_iter().flatten().collect()
}

fn tuple_arity(q: &Collection, t: &[usize]) -> usize {
    t[1..].iter().map(|&g| q.arity(g)).sum()
}

fn tuple_name(p: &Collection, q: &Collection, t: &[usize]) -> String {
    let args: Vec<&str> = t[1..].iter().map(|&g| q.name(g)).collect();
    format!("({};{})", p.name(t[0]), args.join(","))
}

/// `P∘Q` up to the smaller cap, with the tuple behind each element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircCollection {
    pub collection: Collection,
    /// `tuples[g] = [p, q_1, .., q_n]`
    pub tuples: Vec<Vec<usize>>,
}

/// `(P∘Q)_k = ⨿_{m_1+..+m_n=k} P_n × Q_{m_1} × .. × Q_{m_n}`.
pub fn circ(p: &Collection, q: &Collection) -> CircCollection {
    let cap = p.cap().min(q.cap());
    let ts = tuples(p, q, cap);
    let mut levels = vec![Vec::new(); cap + 1];
    for t in &ts {
        levels[tuple_arity(q, t)].push(tuple_name(p, q, t));
    }
    let collection = Collection::new(levels).expect("tuple names are distinct");
    CircCollection { collection, tuples: ts }
}

fn fiber_of_arity(cache: &mut Vec<Arc<FinCategory>>, n: usize) -> Arc<FinCategory> {
    while cache.len() <= n {
        let k = cache.len();
        cache.push(Arc::new(FinCategory::discrete_n(k)));
    }
    cache[n].clone()
}

fn check_size(c: &Collection, guard: &Guardrails) -> Result<()> {
    if c.len() > guard.max_base_objects {
        return Err(Error::Guardrail(format!(
            "collection has {} elements (bound {})",
            c.len(),
            guard.max_base_objects
        )));
    }
    Ok(())
}

/// The discrete diagram sending `p in P_n` to the discrete ordered `n`.
pub fn encode_ns(c: &Collection, guard: &Guardrails) -> Result<DiagramInCat> {
    check_size(c, guard)?;
    let names: Vec<String> = (0..c.len()).map(|g| c.name(g).to_string()).collect();
    let base = Arc::new(FinCategory::discrete(&names));
    let mut cache = Vec::new();
    let fibers: Vec<_> = (0..c.len()).map(|g| fiber_of_arity(&mut cache, c.arity(g))).collect();
    let maps = fibers.iter().map(|f| Functor::identity(f.clone())).collect();
    DiagramInCat::new(base, fibers, maps)
}

/// The functor `k -> fiber` that is the identity on positions, for a
/// discrete fiber whose objects are already in lexicographic block order.
fn positional(src: &Arc<FinCategory>, tgt: &Arc<FinCategory>) -> Functor {
    let omap: Vec<usize> = (0..src.object_count()).collect();
    let mmap = (0..src.morphism_count()).map(|m| tgt.identity(src.src(m))).collect();
    Functor::from_parts(src.clone(), tgt.clone(), omap, mmap)
}

fn is_positional(f: &Functor) -> bool {
    f.src().object_count() == f.tgt().object_count() && f.omap().iter().enumerate().all(|(i, &o)| i == o)
}

/// The object of `P ⋉ P` with `psi` picking `qs`.
fn product_object(pp: &Semidirect, p: usize, qs: &[usize]) -> Option<usize> {
    let dy = pp.right().base();
    let mmap: Vec<usize> = qs.iter().map(|&q| dy.identity(q)).collect();
    pp.find_object(p, qs, &mmap)
}

/// The verified isomorphism `encode(P∘P) -> P ⋉ P`.
#[derive(Debug, Clone)]
pub struct NsIso {
    pub circ: CircCollection,
    pub encoded: Arc<DiagramInCat>,
    pub product: Semidirect,
    pub iso: DiagramMorphism,
    pub inverse: DiagramMorphism,
}

/// Builds both sides, matches `(p; q_1..q_n)` with the object whose `psi`
/// picks `q_1..q_n`, and verifies the match is an isomorphism both ways.
pub fn ns_iso_check(p: &Collection, guard: &Guardrails) -> Result<NsIso> {
    let c = circ(p, p);
    let encoded = Arc::new(encode_ns(&c.collection, guard)?);
    let enc_p = Arc::new(encode_ns(p, guard)?);
    let product = club_square(&enc_p, guard, Some(p.cap()))?;
    let pb = product.diagram().base();
    if pb.object_count() != c.collection.len() {
        return Err(Error::Invalid(format!(
            "P ⋉ P has {} objects but P∘P has {}",
            pb.object_count(),
            c.collection.len()
        )));
    }
    let omap = c
        .tuples
        .iter()
        .map(|t| product_object(&product, t[0], &t[1..]).ok_or_else(|| Error::Invalid(format!("no object for {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let mmap = omap.iter().map(|&o| pb.identity(o)).collect();
    let base = Functor::new(encoded.base().clone(), pb.clone(), omap.clone(), mmap)?;
    let rho = omap
        .iter()
        .enumerate()
        .map(|(g, &o)| positional(product.diagram().fiber(o), encoded.fiber(g)))
        .collect();
    let iso = DiagramMorphism::new(encoded.clone(), product.diagram().clone(), base, rho)?;
    let inverse = invert(&iso).ok_or_else(|| Error::Invalid("the tuple matching is not invertible".into()))?;
    if !is_verified_inverse(&iso, &inverse) {
        return Err(Error::Invalid("inverse failed verification".into()));
    }
    Ok(NsIso { circ: c, encoded, product, iso, inverse })
}

/// A non-symmetric operad truncated at the collection's cap: `gamma` is
/// stored for every tuple whose output arity is within the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsOperad {
    collection: Collection,
    unit: usize,
    gamma: BTreeMap<Vec<usize>, usize>,
}

impl NsOperad {
    pub fn new(collection: Collection, unit: usize, gamma: BTreeMap<Vec<usize>, usize>) -> Result<Self> {
        let op = Self { collection, unit, gamma };
        let shape = op.shape_problems();
        if !shape.is_empty() {
            return Err(Error::Schema(shape.join("; ")));
        }
        let laws = op.validate();
        if laws.is_empty() {
            Ok(op)
        } else {
            Err(Error::Invalid(laws.join("; ")))
        }
    }

    /// Unchecked; `validate` reports law failures.
    pub fn from_parts(collection: Collection, unit: usize, gamma: BTreeMap<Vec<usize>, usize>) -> Self {
        Self { collection, unit, gamma }
    }

    pub fn collection(&self) -> &Collection {
        &self.collection
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn gamma(&self) -> &BTreeMap<Vec<usize>, usize> {
        &self.gamma
    }

    pub fn compose(&self, t: &[usize]) -> Option<usize> {
        self.gamma.get(t).copied()
    }

    /// Replaces one table entry.
    pub fn with_entry(&self, t: Vec<usize>, result: usize) -> Self {
        let mut g = self.gamma.clone();
        g.insert(t, result);
        Self { collection: self.collection.clone(), unit: self.unit, gamma: g }
    }

    fn shape_problems(&self) -> Vec<String> {
        let c = &self.collection;
        let mut out = Vec::new();
        if self.unit >= c.len() || c.arity(self.unit) != 1 {
            out.push("unit must lie in arity 1".to_string());
            return out;
        }
        let expected = tuples(c, c, c.cap());
        for t in &expected {
            match self.gamma.get(t) {
                None => out.push(format!("gamma missing for {}", tuple_name(c, c, t))),
                Some(&r) if r >= c.len() || c.arity(r) != tuple_arity(c, t) => {
                    out.push(format!("gamma of {} has the wrong arity", tuple_name(c, c, t)))
                }
                _ => {}
            }
        }
        if self.gamma.len() != expected.len() {
            out.push("gamma has entries outside the cap".into());
        }
        out
    }

    /// Unitality and associativity on every composable tuple within the cap.
    pub fn validate(&self) -> Vec<String> {
        let mut out = self.shape_problems();
        if !out.is_empty() {
            return out;
        }
        let c = &self.collection;
        let e = self.unit;
        for p in 0..c.len() {
            let n = c.arity(p);
            if self.gamma[&vec![e, p]] != p {
                out.push(format!("left unit fails at {}", c.name(p)));
            }
            let mut t = vec![p];
            t.extend(std::iter::repeat_n(e, n));
            if n <= c.cap() && self.gamma[&t] != p {
                out.push(format!("right unit fails at {}", c.name(p)));
            }
        }
        for t in tuples(c, c, c.cap()) {
            let inner = self.gamma[&t];
            let k = c.arity(inner);
            // all r-tuples of total arity within the cap, split along the q's
            let mut rs = vec![inner];
            let mut found = None;
            for_each_args(c, k, c.cap(), &mut rs, &mut |r| {
                let lhs = self.gamma[r];
                let mut args = Vec::new();
                let mut pos = 1;
                for &q in &t[1..] {
                    let m = c.arity(q);
                    let mut sub = vec![q];
                    sub.extend_from_slice(&r[pos..pos + m]);
                    pos += m;
                    args.push(self.gamma[&sub]);
                }
                let mut outer = vec![t[0]];
                outer.extend(args);
                if self.gamma[&outer] != lhs {
                    found = Some(format!(
                        "associativity fails at {} then {}",
                        tuple_name(c, c, &t),
                        tuple_name(c, c, r)
                    ));
                    return false;
                }
                true
            });
            out.extend(found);
        }
        out
    }
}

/// Calls `visit` on `[head, r_1, .., r_k]` for all `r` with total arity at
/// most `cap`; stops when `visit` returns false.
fn for_each_args(
    c: &Collection,
    k: usize,
    cap: usize,
    cur: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if cur.len() == k + 1 {
        return visit(cur);
    }
    let used: usize = cur[1..].iter().map(|&g| c.arity(g)).sum();
    for m in 0..=(cap - used).min(c.cap()) {
        for g in c.ids(m) {
            cur.push(g);
            let go_on = for_each_args(c, k, cap, cur, visit);
            cur.pop();
            if !go_on {
                return false;
            }
        }
    }
    true
}

/// The club on `encode(P)`: `mu` sends `(p; q)` to `gamma(p; q)` with
/// positional `rho`, `eta` picks the unit.
pub fn operad_to_club(p: &NsOperad, guard: &Guardrails) -> Result<ClubStructure> {
    let c = &p.collection;
    let carrier = Arc::new(encode_ns(c, guard)?);
    let cc = club_square(&carrier, guard, Some(c.cap()))?;
    let ccb = cc.diagram().base();
    let omap = (0..ccb.object_count())
        .map(|o| {
            let (d, psi) = cc.object(o);
            let mut t = vec![d];
            t.extend_from_slice(psi.omap());
            p.compose(&t).ok_or_else(|| Error::Invalid(format!("gamma undefined at {}", tuple_name(c, c, &t))))
        })
        .collect::<Result<Vec<_>>>()?;
    let mmap = (0..ccb.morphism_count()).map(|m| carrier.base().identity(omap[ccb.src(m)])).collect();
    let base = Functor::new(ccb.clone(), carrier.base().clone(), omap.clone(), mmap)?;
    let rho = omap.iter().enumerate().map(|(o, &g)| positional(carrier.fiber(g), cc.diagram().fiber(o))).collect();
    let mu = DiagramMorphism::new(cc.diagram().clone(), carrier.clone(), base, rho)?;
    let eta = unit_morphism(&carrier, p.unit)?;
    Ok(ClubStructure { carrier, mu, eta, fiber_cap: Some(c.cap()) })
}

fn unit_morphism(carrier: &Arc<DiagramInCat>, e: usize) -> Result<DiagramMorphism> {
    let unit = Arc::new(unit_diagram());
    let cb = carrier.base();
    let base = Functor::new(unit.base().clone(), cb.clone(), vec![e], vec![cb.identity(e)])?;
    let rho = vec![positional(carrier.fiber(e), unit.fiber(0))];
    DiagramMorphism::new(unit, carrier.clone(), base, rho)
}

/// Reads `gamma` back from `mu`. Fails unless every `rho` is the
/// order-preserving identification.
pub fn club_to_operad(club: &ClubStructure, c: &Collection, guard: &Guardrails) -> Result<NsOperad> {
    let cc = club_square(&club.carrier, guard, club.fiber_cap)?;
    if club.mu.base().omap().len() != cc.diagram().base().object_count() {
        return Err(Error::Mismatch("mu does not have C ⋉ C as its source".into()));
    }
    if !club.mu.rhos().iter().all(is_positional) || !club.eta.rhos().iter().all(is_positional) {
        return Err(Error::Invalid("rho does not preserve the order on the fibers".into()));
    }
    let mut gamma = BTreeMap::new();
    for o in 0..cc.diagram().base().object_count() {
        let (d, psi) = cc.object(o);
        let mut t = vec![d];
        t.extend_from_slice(psi.omap());
        gamma.insert(t, club.mu.base().obj(o));
    }
    NsOperad::new(c.clone(), club.eta.base().obj(0), gamma)
}

fn single_levels(cap: usize, nullary: bool, prefix: &str) -> Vec<Vec<String>> {
    (0..=cap).map(|n| if n == 0 && !nullary { Vec::new() } else { vec![format!("{prefix}{n}")] }).collect()
}

fn one_per_level(cap: usize, nullary: bool, prefix: &str) -> NsOperad {
    let c = Collection::new(single_levels(cap, nullary, prefix)).unwrap();
    let gamma = tuples(&c, &c, cap).into_iter().map(|t| {
        let k = tuple_arity(&c, &t);
        let r = c.ids(k).start;
        (t, r)
    });
    let unit = c.ids(1).start;
    NsOperad::new(c.clone(), unit, gamma.collect()).expect("one element per arity is an operad")
}

/// `Ass` without a nullary operation: `P_n = {*}` for `1 <= n <= cap`.
pub fn ass(cap: usize) -> NsOperad {
    one_per_level(cap, false, "m")
}

/// `Ass` with the nullary operation: `P_n = {*}` for `0 <= n <= cap`.
pub fn unital_ass(cap: usize) -> NsOperad {
    one_per_level(cap, true, "m")
}

/// Only the unit.
pub fn unit_only() -> NsOperad {
    let c = Collection::new(vec![Vec::new(), vec!["e".into()]]).unwrap();
    let gamma = [(vec![0, 0], 0)].into_iter().collect();
    NsOperad::new(c, 0, gamma).unwrap()
}

/// The operad of a commutative monoid `M`: `P_n = M` for every stored arity
/// and `gamma(p; q) = p * q_1 * .. * q_n`.
pub fn monoid_operad(size: usize, mul: &[Vec<usize>], unit: usize, cap: usize, nullary: bool) -> NsOperad {
    let levels: Vec<Vec<String>> = (0..=cap)
        .map(|n| if n == 0 && !nullary { Vec::new() } else { (0..size).map(|x| format!("{x}@{n}")).collect() })
        .collect();
    let c = Collection::new(levels).unwrap();
    let local = |g: usize| g - c.ids(c.arity(g)).start;
    let gamma = tuples(&c, &c, cap)
        .into_iter()
        .map(|t| {
            let v = t.iter().fold(unit, |acc, &g| mul[acc][local(g)]);
            let k = tuple_arity(&c, &t);
            (t, c.global(k, v))
        })
        .collect();
    NsOperad::from_parts(c.clone(), c.global(1, unit), gamma)
}

/// Permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

fn compose_perm(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

/// Symmetric-group tables per arity with lookup by permutation.
#[derive(Debug, Clone)]
struct Perms {
    lists: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl Perms {
    fn up_to(n: usize) -> Self {
        let lists: Vec<Vec<Vec<usize>>> = (0..=n).map(permutations).collect();
        let index = lists.iter().map(|l| l.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect()).collect();
        Self { lists, index }
    }

    fn idx(&self, p: &[usize]) -> usize {
        self.index[p.len()][p]
    }
}

/// The permutation of `0..k` induced by `sigma` on blocks of sizes `sizes`
/// and `taus` inside them: position `(i, j)` goes to `(sigma(i), tau_i(j))`.
pub fn block_permutation(sigma: &[usize], sizes: &[usize], taus: &[Vec<usize>]) -> Vec<usize> {
    let n = sigma.len();
    let mut tgt_sizes = vec![0; n];
    for i in 0..n {
        tgt_sizes[sigma[i]] = sizes[i];
    }
    let mut tgt_off = vec![0; n];
    for i in 1..n {
        tgt_off[i] = tgt_off[i - 1] + tgt_sizes[i - 1];
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..sizes[i] {
            out.push(tgt_off[sigma[i]] + taus[i][j]);
        }
    }
    out
}

/// A collection with a left `S_n`-action on each `P_n`:
/// `actions[n][s][i]` is the local index of `sigma_s . p_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaCollection {
    pub collection: Collection,
    pub actions: Vec<Vec<Vec<usize>>>,
}

impl SigmaCollection {
    pub fn new(collection: Collection, actions: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let s = Self { collection, actions };
        let problems = s.validate();
        if problems.is_empty() {
            Ok(s)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    /// Every group acts trivially.
    pub fn trivial(collection: Collection) -> Self {
        let actions = (0..=collection.cap())
            .map(|n| {
                let size = collection.level(n).len();
                vec![(0..size).collect(); permutations(n).len()]
            })
            .collect();
        Self { collection, actions }
    }

    /// `sigma . g` for a global element.
    pub fn act(&self, sigma: &[usize], g: usize, perms_index: &HashMap<Vec<usize>, usize>) -> usize {
        let c = &self.collection;
        let n = c.arity(g);
        let local = g - c.ids(n).start;
        c.global(n, self.actions[n][perms_index[sigma]][local])
    }

    /// Identity acts trivially and `(st).p = s.(t.p)`.
    pub fn validate(&self) -> Vec<String> {
        let c = &self.collection;
        let mut out = Vec::new();
        if self.actions.len() != c.cap() + 1 {
            return vec!["one action table per arity required".into()];
        }
        for n in 0..=c.cap() {
            let perms = permutations(n);
            let size = c.level(n).len();
            let table = &self.actions[n];
            if table.len() != perms.len() || table.iter().any(|row| row.len() != size || row.iter().any(|&x| x >= size)) {
                out.push(format!("arity {n}: action table has the wrong shape"));
                continue;
            }
            let pidx: HashMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
            if table[0].iter().enumerate().any(|(i, &x)| i != x) {
                out.push(format!("arity {n}: identity does not act trivially"));
            }
            for (a, pa) in perms.iter().enumerate() {
                for (b, pb) in perms.iter().enumerate() {
                    let ab = pidx[&compose_perm(pa, pb)];
                    if (0..size).any(|i| table[ab][i] != table[a][table[b][i]]) {
                        out.push(format!("arity {n}: action is not a left action"));
                    }
                }
            }
        }
        out.dedup();
        out
    }
}

/// The diagram of a `Σ`-collection: `Hom(p, q) = {sigma : sigma . p = q}`,
/// with `R(sigma)` permuting the positions of `n`.
#[derive(Debug, Clone)]
pub struct SymEncoding {
    pub diagram: Arc<DiagramInCat>,
    /// `(element, permutation index)` of each base morphism
    pub morphisms: Vec<(usize, usize)>,
    /// first morphism index out of each element
    pub starts: Vec<usize>,
}

impl SymEncoding {
    fn morphism(&self, g: usize, perm: usize) -> usize {
        self.starts[g] + perm
    }
}

pub fn encode_sym(s: &SigmaCollection, guard: &Guardrails) -> Result<SymEncoding> {
    let c = &s.collection;
    check_size(c, guard)?;
    let perms = Perms::up_to(c.cap());
    let mut morphisms = Vec::new();
    let mut mors = Vec::new();
    let mut starts = Vec::new();
    for g in 0..c.len() {
        let n = c.arity(g);
        starts.push(morphisms.len());
        for (pi, p) in perms.lists[n].iter().enumerate() {
            let tgt = s.act(p, g, &perms.index[n]);
            let label: Vec<String> = p.iter().map(usize::to_string).collect();
            mors.push(Morphism { id: format!("[{}]:{}", label.join(","), c.name(g)), src: g, tgt });
            morphisms.push((g, pi));
        }
    }
    starts.push(morphisms.len());
    let identities = (0..c.len()).map(|g| starts[g]).collect();
    let mut comp = HashMap::default();
    for (f, &(g, a)) in morphisms.iter().enumerate() {
        let n = c.arity(g);
        let t = mors[f].tgt;
        for b in 0..perms.lists[n].len() {
            let h = starts[t] + b;
            let ba = perms.idx(&compose_perm(&perms.lists[n][b], &perms.lists[n][a]));
            comp.insert((h, f), starts[g] + ba);
        }
    }
    let names: Vec<String> = (0..c.len()).map(|g| c.name(g).to_string()).collect();
    let base = Arc::new(FinCategory::from_indexed(names, mors, identities, comp));
    let mut cache = Vec::new();
    let fibers: Vec<_> = (0..c.len()).map(|g| fiber_of_arity(&mut cache, c.arity(g))).collect();
    let maps = morphisms
        .iter()
        .map(|&(g, a)| {
            let f = &fibers[g];
            let p = &perms.lists[c.arity(g)][a];
            let mmap = (0..f.morphism_count()).map(|m| f.identity(p[f.src(m)])).collect();
            Functor::from_parts(f.clone(), f.clone(), p.clone(), mmap)
        })
        .collect();
    let diagram = Arc::new(DiagramInCat::new(base, fibers, maps)?);
    Ok(SymEncoding { diagram, morphisms, starts })
}

/// A symmetric operad: an operad on the underlying collection whose
/// compositions are equivariant for `S_n × S_{m_1} × .. × S_{m_n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymOperad {
    pub sigma: SigmaCollection,
    pub operad: NsOperad,
}

impl SymOperad {
    pub fn new(sigma: SigmaCollection, operad: NsOperad) -> Result<Self> {
        if sigma.collection != operad.collection {
            return Err(Error::Mismatch("action and operad live on different collections".into()));
        }
        let s = Self { sigma, operad };
        let mut problems = s.sigma.validate();
        problems.extend(s.operad.validate());
        if problems.is_empty() {
            problems = s.equivariance_problems();
        }
        if problems.is_empty() {
            Ok(s)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    /// `gamma(g . (p; q)) = pi(g) . gamma(p; q)` where `g = (sigma; tau)`
    /// moves `tau_i . q_i` to position `sigma(i)`.
    pub fn equivariance_problems(&self) -> Vec<String> {
        let c = &self.operad.collection;
        let perms = Perms::up_to(c.cap());
        let mut out = Vec::new();
        for t in tuples(c, c, c.cap()) {
            let n = t.len() - 1;
            let sizes: Vec<usize> = t[1..].iter().map(|&q| c.arity(q)).collect();
            let k: usize = sizes.iter().sum();
            let r = self.operad.gamma[&t];
            for sigma in &perms.lists[n] {
                let mut bad = false;
                for_each_taus(&perms, &sizes, &mut Vec::new(), &mut |taus| {
                    let mut moved = vec![0; n + 1];
                    moved[0] = self.sigma.act(sigma, t[0], &perms.index[n]);
                    for i in 0..n {
                        moved[1 + sigma[i]] = self.sigma.act(&taus[i], t[1 + i], &perms.index[sizes[i]]);
                    }
                    let pi = block_permutation(sigma, &sizes, taus);
                    debug_assert_eq!(pi.len(), k);
                    if self.operad.gamma[&moved] != self.sigma.act(&pi, r, &perms.index[k]) {
                        bad = true;
                        return false;
                    }
                    true
                });
                if bad {
                    out.push(format!("equivariance fails at {}", tuple_name(c, c, &t)));
                    break;
                }
            }
        }
        out
    }
}

fn for_each_taus(
    perms: &Perms,
    sizes: &[usize],
    cur: &mut Vec<Vec<usize>>,
    visit: &mut dyn FnMut(&[Vec<usize>]) -> bool,
) -> bool {
    if cur.len() == sizes.len() {
        return visit(cur);
    }
    for p in &perms.lists[sizes[cur.len()]] {
        cur.push(p.clone());
        let go_on = for_each_taus(perms, sizes, cur, visit);
        cur.pop();
        if !go_on {
            return false;
        }
    }
    true
}

/// Decodes a base morphism `(s, t, f, phi)` of `P ⋉ P` over the symmetric
/// encoding into `(sigma, taus)` and the block sizes of its source.
fn decode_sym_morphism(
    enc: &SymEncoding,
    perms: &Perms,
    c: &Collection,
    pp: &Semidirect,
    m: usize,
) -> (Vec<usize>, Vec<Vec<usize>>, Vec<usize>) {
    let (s, _, f, phi) = pp.morphism(m);
    let (_, psi) = pp.object(s);
    let (p, a) = enc.morphisms[f];
    let sigma = perms.lists[c.arity(p)][a].clone();
    let taus = phi
        .iter()
        .map(|&pm| {
            let (q, b) = enc.morphisms[pm];
            perms.lists[c.arity(q)][b].clone()
        })
        .collect();
    let sizes = psi.omap().iter().map(|&q| c.arity(q)).collect();
    (sigma, taus, sizes)
}

/// The club on the symmetric encoding: `mu` sends `(p; q)` to
/// `gamma(p; q)` and `(sigma; tau)` to the induced block permutation.
pub fn sym_operad_to_club(p: &SymOperad, guard: &Guardrails) -> Result<ClubStructure> {
    let c = &p.operad.collection;
    let enc = encode_sym(&p.sigma, guard)?;
    let carrier = enc.diagram.clone();
    let perms = Perms::up_to(c.cap());
    let cc = club_square(&carrier, guard, Some(c.cap()))?;
    let ccb = cc.diagram().base();
    let omap = (0..ccb.object_count())
        .map(|o| {
            let (d, psi) = cc.object(o);
            let mut t = vec![d];
            t.extend_from_slice(psi.omap());
            p.operad.compose(&t).ok_or_else(|| Error::Invalid(format!("gamma undefined at {}", tuple_name(c, c, &t))))
        })
        .collect::<Result<Vec<_>>>()?;
    let mmap = (0..ccb.morphism_count())
        .map(|m| {
            let (sigma, taus, sizes) = decode_sym_morphism(&enc, &perms, c, &cc, m);
            enc.morphism(omap[ccb.src(m)], perms.idx(&block_permutation(&sigma, &sizes, &taus)))
        })
        .collect();
    let base = Functor::new(ccb.clone(), carrier.base().clone(), omap.clone(), mmap)?;
    let rho = omap.iter().enumerate().map(|(o, &g)| positional(carrier.fiber(g), cc.diagram().fiber(o))).collect();
    let mu = DiagramMorphism::new(cc.diagram().clone(), carrier.clone(), base, rho)?;
    let eta = unit_morphism(&carrier, p.operad.unit)?;
    Ok(ClubStructure { carrier, mu, eta, fiber_cap: Some(c.cap()) })
}

/// `P∘P` as a `Σ`-collection: `(S_k × tuples) / ~` with
/// `[pi . pi(g), t] = [pi, g . t]`, and `S_k` acting on the left factor.
#[derive(Debug, Clone)]
pub struct SymCirc {
    pub sigma: SigmaCollection,
    pub tuples: Vec<Vec<usize>>,
    /// class of `[identity, t]` for each tuple
    pub class_of_tuple: Vec<usize>,
}

pub fn circ_sym(p: &SigmaCollection) -> SymCirc {
    let c = &p.collection;
    let cap = c.cap();
    let perms = Perms::up_to(cap);
    let ts = tuples(c, c, cap);
    let tindex: HashMap<Vec<usize>, usize> = ts.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let mut levels = vec![Vec::new(); cap + 1];
    let mut actions: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut class_of_tuple = vec![0; ts.len()];
    let mut level_start = 0;
    for k in 0..=cap {
        let in_level: Vec<usize> = (0..ts.len()).filter(|&i| tuple_arity(c, &ts[i]) == k).collect();
        let nk = perms.lists[k].len();
        // node (pi, local tuple)
        let local: HashMap<usize, usize> = in_level.iter().enumerate().map(|(l, &i)| (i, l)).collect();
        let node = |pi: usize, l: usize| l * nk + pi;
        let mut parent: Vec<usize> = (0..in_level.len() * nk).collect();
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
        for (l, &ti) in in_level.iter().enumerate() {
            let t = &ts[ti];
            let n = t.len() - 1;
            let sizes: Vec<usize> = t[1..].iter().map(|&q| c.arity(q)).collect();
            for sigma in &perms.lists[n] {
                for_each_taus(&perms, &sizes, &mut Vec::new(), &mut |taus| {
                    let mut moved = vec![0; n + 1];
                    moved[0] = p.act(sigma, t[0], &perms.index[n]);
                    for i in 0..n {
                        moved[1 + sigma[i]] = p.act(&taus[i], t[1 + i], &perms.index[sizes[i]]);
                    }
                    let lg = local[&tindex[&moved]];
                    let pg = block_permutation(sigma, &sizes, taus);
                    for (a, pa) in perms.lists[k].iter().enumerate() {
                        let left = node(perms.idx(&compose_perm(pa, &pg)), l);
                        let right = node(a, lg);
                        let (x, y) = (find(&mut parent, left), find(&mut parent, right));
                        if x != y {
                            parent[x.max(y)] = x.min(y);
                        }
                    }
                    true
                });
            }
        }
        let mut class_id: HashMap<usize, usize> = HashMap::default();
        let mut reps = Vec::new();
        for x in 0..parent.len() {
            let r = find(&mut parent, x);
            if let std::collections::hash_map::Entry::Vacant(v) = class_id.entry(r) {
                v.insert(reps.len());
                reps.push(x);
            }
        }
        levels[k] = reps
            .iter()
            .map(|&x| {
                let (l, pi) = (x / nk, x % nk);
                let label: Vec<String> = perms.lists[k][pi].iter().map(usize::to_string).collect();
                format!("[{}]{}", label.join(","), tuple_name(c, c, &ts[in_level[l]]))
            })
            .collect();
        for (l, &ti) in in_level.iter().enumerate() {
            class_of_tuple[ti] = level_start + class_id[&find(&mut parent, node(0, l))];
        }
        let table = perms.lists[k]
            .iter()
            .map(|s| {
                reps.iter()
                    .map(|&x| {
                        let (l, pi) = (x / nk, x % nk);
                        let moved = node(perms.idx(&compose_perm(s, &perms.lists[k][pi])), l);
                        class_id[&find(&mut parent, moved)]
                    })
                    .collect()
            })
            .collect();
        actions.push(table);
        level_start += reps.len();
    }
    let collection = Collection::new(levels).expect("class labels are distinct");
    SymCirc { sigma: SigmaCollection { collection, actions }, tuples: ts, class_of_tuple }
}

/// The inclusion `P ⋉ P -> encode(P∘P)` with its injectivity check and a
/// witness of non-surjectivity when one exists.
#[derive(Debug, Clone)]
pub struct SymInclusion {
    pub product: Semidirect,
    pub target: SymEncoding,
    pub morphism: DiagramMorphism,
    pub injective: bool,
    /// an object of `P∘P` outside the image
    pub missing_object: Option<String>,
}

pub fn sym_inclusion(p: &SigmaCollection, guard: &Guardrails) -> Result<SymInclusion> {
    let c = &p.collection;
    let perms = Perms::up_to(c.cap());
    let enc = encode_sym(p, guard)?;
    let pp = club_square(&enc.diagram, guard, Some(c.cap()))?;
    let sc = circ_sym(p);
    let target = encode_sym(&sc.sigma, guard)?;
    let tindex: HashMap<&[usize], usize> = sc.tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let ppb = pp.diagram().base();
    let omap: Vec<usize> = (0..ppb.object_count())
        .map(|o| {
            let (d, psi) = pp.object(o);
            let mut t = vec![d];
            t.extend_from_slice(psi.omap());
            sc.class_of_tuple[tindex[t.as_slice()]]
        })
        .collect();
    let mmap: Vec<usize> = (0..ppb.morphism_count())
        .map(|m| {
            let (sigma, taus, sizes) = decode_sym_morphism(&enc, &perms, c, &pp, m);
            target.morphism(omap[ppb.src(m)], perms.idx(&block_permutation(&sigma, &sizes, &taus)))
        })
        .collect();
    let base = Functor::new(ppb.clone(), target.diagram.base().clone(), omap.clone(), mmap.clone())?;
    let rho = omap
        .iter()
        .enumerate()
        .map(|(o, &g)| positional(target.diagram.fiber(g), pp.diagram().fiber(o)))
        .collect();
    let morphism = DiagramMorphism::new(pp.diagram().clone(), target.diagram.clone(), base, rho)?;
    let distinct = |v: &[usize]| {
        let mut s = v.to_vec();
        s.sort_unstable();
        s.windows(2).all(|w| w[0] != w[1])
    };
    let injective = distinct(&omap) && distinct(&mmap);
    let hit: std::collections::HashSet<usize> = omap.iter().copied().collect();
    let missing_object =
        (0..sc.sigma.collection.len()).find(|g| !hit.contains(g)).map(|g| sc.sigma.collection.name(g).to_string());
    Ok(SymInclusion { product: pp, target, morphism, injective, missing_object })
}

/// `Com`: one operation per arity `1..=cap`, trivial actions.
pub fn com(cap: usize) -> SymOperad {
    let op = ass(cap);
    let sigma = SigmaCollection::trivial(op.collection.clone());
    SymOperad::new(sigma, op).expect("Com is a symmetric operad")
}

/// `P_1 = {e}`, `P_2 = {a, b}` with the transposition swapping `a` and `b`;
/// compositions are forced by the unit laws.
pub fn swap_pair() -> SymOperad {
    let c = Collection::new(vec![Vec::new(), vec!["e".into()], vec!["a".into(), "b".into()]]).unwrap();
    let gamma: BTreeMap<Vec<usize>, usize> = tuples(&c, &c, 2)
        .into_iter()
        .map(|t| {
            let r = if t[0] == 0 { t[1] } else { t[0] };
            (t, r)
        })
        .collect();
    let op = NsOperad::new(c.clone(), 0, gamma).unwrap();
    let actions = vec![vec![vec![]], vec![vec![0]], vec![vec![0, 1], vec![1, 0]]];
    let sigma = SigmaCollection::new(c, actions).unwrap();
    SymOperad::new(sigma, op).expect("swap pair is a symmetric operad")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semidirect::club_check;

    fn guard() -> Guardrails {
        Guardrails::for_law_checks()
    }

    /// Brute-force count of compositions of `k` into positive parts with at
    /// most `cap` parts.
    fn compositions(k: usize) -> usize {
        if k == 0 {
            return 1;
        }
        (1..=k).map(|first| compositions(k - first)).sum()
    }

    #[test]
    fn encodings_and_circ_counts() {
        let u = unit_only();
        let d = encode_ns(u.collection(), &guard()).unwrap();
        assert_eq!((d.base().object_count(), d.fiber(0).object_count()), (1, 1));
        let a3 = unital_ass(3);
        assert_eq!(encode_ns(a3.collection(), &guard()).unwrap().base().object_count(), 4);
        let a4 = ass(4);
        let cc = circ(a4.collection(), a4.collection());
        assert_eq!(cc.collection.level(4).len(), compositions(4));
        assert_eq!(compositions(4), 8);
        let mag = Collection::new(vec![vec![], vec!["x".into()], vec!["m".into()], vec!["t1".into(), "t2".into()]]).unwrap();
        assert_eq!(encode_ns(&mag, &guard()).unwrap().base().object_count(), 4);
        // unit substitution on either side
        let uc = u.collection();
        for k in 0..=1 {
            assert_eq!(circ(&mag, uc).collection.level(k).len(), mag.level(k).len());
            assert_eq!(circ(uc, &mag).collection.level(k).len(), mag.level(k).len());
        }
    }

    #[test]
    fn ns_iso_on_fixtures() {
        for c in [unit_only().collection().clone(), ass(3).collection().clone(), unital_ass(3).collection().clone()] {
            let iso = ns_iso_check(&c, &guard()).unwrap();
            for k in 0..=c.cap() {
                let lhs = iso.circ.collection.level(k).len();
                let rhs = (0..iso.product.diagram().base().object_count())
                    .filter(|&o| iso.product.diagram().fiber(o).object_count() == k)
                    .count();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn ass_club_round_trip() {
        let a = ass(3);
        let club = operad_to_club(&a, &guard()).unwrap();
        assert!(club_check(&club, &guard()).unwrap().passed());
        assert_eq!(club_to_operad(&club, a.collection(), &guard()).unwrap(), a);
        let again = operad_to_club(&club_to_operad(&club, a.collection(), &guard()).unwrap(), &guard()).unwrap();
        assert_eq!(again.mu, club.mu);
        assert_eq!(again.eta, club.eta);
        let u = unit_only();
        assert!(club_check(&operad_to_club(&u, &guard()).unwrap(), &guard()).unwrap().passed());
    }

    /// Every candidate structure on `P_1 = {e, a}`: club_check passes exactly
    /// for the monoid structures.
    #[test]
    fn bijection_exhaustive_on_two_unary_operations() {
        let c = Collection::new(vec![vec![], vec!["e".into(), "a".into()]]).unwrap();
        let ts = tuples(&c, &c, 1);
        let mut passed = 0;
        for unit in 0..2 {
            for bits in 0..16usize {
                let gamma: BTreeMap<Vec<usize>, usize> =
                    ts.iter().enumerate().map(|(i, t)| (t.clone(), (bits >> i) & 1)).collect();
                let op = NsOperad::from_parts(c.clone(), unit, gamma);
                let lawful = op.validate().is_empty();
                let club = operad_to_club(&op, &guard()).unwrap();
                let ok = club_check(&club, &guard()).unwrap().passed();
                assert_eq!(lawful, ok, "unit {unit} table {bits:04b}");
                if ok {
                    passed += 1;
                    assert_eq!(club_to_operad(&club, &c, &guard()).unwrap(), op);
                }
            }
        }
        // two monoid structures per choice of unit
        assert_eq!(passed, 4);
    }

    #[test]
    fn non_associative_gamma_fails_club_check() {
        let z2 = vec![vec![0, 1], vec![1, 0]];
        let op = monoid_operad(2, &z2, 0, 2, false);
        assert!(op.validate().is_empty());
        let t = vec![op.collection().global(2, 1), op.collection().global(1, 1), op.collection().global(1, 1)];
        let old = op.compose(&t).unwrap();
        let other = if old == op.collection().global(2, 0) { op.collection().global(2, 1) } else { op.collection().global(2, 0) };
        let bad = op.with_entry(t, other);
        assert!(!bad.validate().is_empty());
        let report = club_check(&operad_to_club(&bad, &guard()).unwrap(), &guard()).unwrap();
        assert!(!report.passed());
        assert!(report.failures.iter().any(|f| f.law == "associativity" || f.law.contains("unit")));
    }

    #[test]
    fn permutations_and_blocks() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
        // swapping blocks of sizes (1, 2)
        assert_eq!(block_permutation(&[1, 0], &[1, 2], &[vec![0], vec![0, 1]]), vec![2, 0, 1]);
    }

    #[test]
    fn symmetric_fixtures() {
        let g = guard();
        let c = com(3);
        let enc = encode_sym(&c.sigma, &g).unwrap();
        assert!(enc.diagram.validate().is_empty());
        assert_eq!(enc.diagram.base().object_count(), 3);
        assert_eq!(enc.diagram.base().morphism_count(), 1 + 2 + 6);
        let club = sym_operad_to_club(&c, &g).unwrap();
        assert!(club_check(&club, &g).unwrap().passed());

        let s = swap_pair();
        let enc = encode_sym(&s.sigma, &g).unwrap();
        let (a, b) = (s.operad.collection().find("a").unwrap(), s.operad.collection().find("b").unwrap());
        assert!(!enc.diagram.base().hom(a, b).is_empty());
        assert!(club_check(&sym_operad_to_club(&s, &g).unwrap(), &g).unwrap().passed());
    }

    #[test]
    fn sym_inclusion_for_ass_at_three() {
        let c = com(3);
        let inc = sym_inclusion(&c.sigma, &guard()).unwrap();
        assert!(inc.injective);
        assert!(inc.morphism.validate().is_empty());
        let pp3 = (0..inc.product.diagram().base().object_count())
            .filter(|&o| inc.product.diagram().fiber(o).object_count() == 3)
            .count();
        let circ3 = inc.target.diagram.fibers().iter().filter(|f| f.object_count() == 3).count();
        assert_eq!((pp3, circ3), (4, 5));
        assert!(inc.missing_object.is_some());
    }

    #[test]
    fn random_operads_round_trip_and_mutations_fail() {
        use crate::fixtures::{mutate_operad, random_collection, random_operad};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..4 {
            let c = random_collection(&mut rng);
            ns_iso_check(&c, &guard()).unwrap();
            let op = random_operad(&mut rng, false);
            assert!(op.validate().is_empty());
            let club = operad_to_club(&op, &guard()).unwrap();
            assert!(club_check(&club, &guard()).unwrap().passed());
            assert_eq!(club_to_operad(&club, op.collection(), &guard()).unwrap(), op);
        }
        for _ in 0..4 {
            let op = random_operad(&mut rng, true);
            let bad = mutate_operad(&mut rng, &op).unwrap();
            assert!(!club_check(&operad_to_club(&bad, &guard()).unwrap(), &guard()).unwrap().passed());
        }
    }

    /// Every single-entry corruption of the group operads used for mutation
    /// sampling breaks a law.
    #[test]
    fn group_operads_pin_every_entry() {
        for (size, table, unit, group) in crate::fixtures::small_monoids() {
            if !group || size < 2 {
                continue;
            }
            for cap in 2..=3 {
                for nullary in [false, true].into_iter().filter(|&n| !n || cap < 3) {
                    let op = monoid_operad(size, &table, unit, cap, nullary);
                    let c = op.collection();
                    for (t, &r) in op.gamma() {
                        for other in c.ids(c.arity(r)).filter(|&g| g != r) {
                            let bad = op.with_entry(t.clone(), other);
                            assert!(!bad.validate().is_empty(), "{size} cap {cap}: {t:?} -> {other}");
                        }
                    }
                }
            }
        }
    }
}
