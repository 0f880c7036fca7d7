//! Finite categories stored as explicit tables, together with functors,
//! natural transformations, exhaustive enumeration and isomorphism search.
//!
//! Everything is indexed internally: objects and morphisms are addressed by
//! their position in the insertion order of the input, which is also the
//! canonical order used by every enumeration.

use rustc_hash::FxHashMap as HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Default bound on the number of morphisms of a category taking part in an
/// enumeration.
pub const DEFAULT_MAX_ENUM_MORPHISMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Debug, Clone)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<usize>,
    comp: HashMap<(usize, usize), usize>,
    obj_index: OnceLock<HashMap<String, usize>>,
    mor_index: OnceLock<HashMap<String, usize>>,
    homs: HashMap<(usize, usize), Vec<usize>>,
    out_objects: Vec<Vec<usize>>,
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.comp == other.comp
    }
}

impl Eq for FinCategory {}

/// One violated category law, with the witnessing morphisms (by id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CategoryViolation {
    IdentityEndpoints { object: String },
    CompNotTotal { g: String, f: String },
    CompNotComposable { g: String, f: String },
    CompWrongEndpoints { g: String, f: String, gf: String },
    LeftIdentity { f: String },
    RightIdentity { f: String },
    Associativity { h: String, g: String, f: String },
}

impl fmt::Display for CategoryViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::IdentityEndpoints { object } => {
                write!(out, "identity of {object} has wrong endpoints")
            }
            Self::CompNotTotal { g, f } => write!(out, "comp not total: {g} o {f} missing"),
            Self::CompNotComposable { g, f } => {
                write!(out, "comp lists non-composable pair {g} o {f}")
            }
            Self::CompWrongEndpoints { g, f, gf } => {
                write!(out, "comp {g} o {f} = {gf} has wrong endpoints")
            }
            Self::LeftIdentity { f } => write!(out, "left identity law fails at {f}"),
            Self::RightIdentity { f } => write!(out, "right identity law fails at {f}"),
            Self::Associativity { h, g, f } => {
                write!(out, "associativity fails at ({h}, {g}, {f})")
            }
        }
    }
}

impl FinCategory {
    /// Builds a category from named tables. Dangling or duplicate ids are
    /// schema errors; law violations are not checked here (see [`validate`]).
    ///
    /// [`validate`]: FinCategory::validate
    pub fn from_tables(
        objects: Vec<String>,
        morphisms: Vec<(String, String, String)>,
        identities: &[(String, String)],
        comp: &[(String, String, String)],
    ) -> Result<Self> {
        let mut obj_index = HashMap::default();
        for (i, o) in objects.iter().enumerate() {
            if obj_index.insert(o.clone(), i).is_some() {
                return Err(Error::Schema(format!("duplicate object id {o}")));
            }
        }
        let mut mors = Vec::with_capacity(morphisms.len());
        let mut mor_index = HashMap::default();
        for (id, s, t) in morphisms {
            let src = *obj_index
                .get(&s)
                .ok_or_else(|| Error::Schema(format!("morphism {id}: unknown source {s}")))?;
            let tgt = *obj_index
                .get(&t)
                .ok_or_else(|| Error::Schema(format!("morphism {id}: unknown target {t}")))?;
            if mor_index.insert(id.clone(), mors.len()).is_some() {
                return Err(Error::Schema(format!("duplicate morphism id {id}")));
            }
            mors.push(Morphism { id, src, tgt });
        }
        let lookup = |m: &str| {
            mor_index
                .get(m)
                .copied()
                .ok_or_else(|| Error::Schema(format!("unknown morphism id {m}")))
        };
        let mut ids = vec![usize::MAX; objects.len()];
        for (o, m) in identities {
            let x = *obj_index
                .get(o)
                .ok_or_else(|| Error::Schema(format!("identity for unknown object {o}")))?;
            ids[x] = lookup(m)?;
        }
        if let Some(x) = ids.iter().position(|&m| m == usize::MAX) {
            return Err(Error::Schema(format!("no identity for object {}", objects[x])));
        }
        let mut table = HashMap::default();
        for (g, f, gf) in comp {
            let key = (lookup(g)?, lookup(f)?);
            let val = lookup(gf)?;
            if let Some(prev) = table.insert(key, val) {
                if prev != val {
                    return Err(Error::Schema(format!("conflicting comp entries for {g} o {f}")));
                }
            }
        }
        Ok(Self::from_indexed(objects, mors, ids, table))
    }

    /// Builds a category from already-indexed data. Callers guarantee ids are
    /// unique and indices in range.
    pub(crate) fn from_indexed(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        comp: HashMap<(usize, usize), usize>,
    ) -> Self {
        let obj_index = OnceLock::new();
        let mor_index = OnceLock::new();
        let mut homs: HashMap<(usize, usize), Vec<usize>> = HashMap::default();
        for (i, m) in morphisms.iter().enumerate() {
            homs.entry((m.src, m.tgt)).or_default().push(i);
        }
        let mut out_objects = vec![Vec::new(); objects.len()];
        for &(s, t) in homs.keys() {
            out_objects[s].push(t);
        }
        for v in &mut out_objects {
            v.sort_unstable();
        }
        Self { objects, morphisms, identities, comp, obj_index, mor_index, homs, out_objects }
    }

    /// Discrete category with the given object names.
    pub fn discrete<S: ToString>(names: &[S]) -> Self {
        let objects: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let morphisms = objects
            .iter()
            .enumerate()
            .map(|(i, o)| Morphism { id: format!("id_{o}"), src: i, tgt: i })
            .collect();
        let identities = (0..objects.len()).collect();
        let comp = (0..objects.len()).map(|i| ((i, i), i)).collect();
        Self::from_indexed(objects, morphisms, identities, comp)
    }

    /// Discrete category on `n` objects named `0..n`.
    pub fn discrete_n(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Self::discrete(&names)
    }

    /// The terminal category with one object `*`.
    pub fn terminal() -> Self {
        Self::discrete(&["*"])
    }

    /// Category of a finite preorder; `leq(i, j)` must be reflexive and transitive.
    /// Morphism `i -> j` is named `i<j` (identities `id_i`).
    pub fn preorder<S: ToString>(names: &[S], leq: impl Fn(usize, usize) -> bool) -> Self {
        let objects: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let n = objects.len();
        let mut morphisms = Vec::new();
        let mut index = HashMap::default();
        let mut identities = vec![0; n];
        for i in 0..n {
            for j in 0..n {
                if leq(i, j) {
                    let id = if i == j {
                        identities[i] = morphisms.len();
                        format!("id_{}", objects[i])
                    } else {
                        format!("{}<{}", objects[i], objects[j])
                    };
                    index.insert((i, j), morphisms.len());
                    morphisms.push(Morphism { id, src: i, tgt: j });
                }
            }
        }
        let mut comp = HashMap::default();
        for (&(i, j), &f) in &index {
            for k in 0..n {
                if let Some(&g) = index.get(&(j, k)) {
                    comp.insert((g, f), index[&(i, k)]);
                }
            }
        }
        Self::from_indexed(objects, morphisms, identities, comp)
    }

    /// The walking arrow `0 -> 1`.
    pub fn walking_arrow() -> Self {
        Self::preorder(&["0", "1"], |i, j| i <= j)
    }

    /// The ordinal `[n]` as a category: objects `0..=n`, one arrow `i -> j` when `i <= j`.
    pub fn ordinal(n: usize) -> Self {
        let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        Self::preorder(&names, |i, j| i <= j)
    }

    /// One-object category of a finite monoid given by its multiplication
    /// table (`table[a][b] = a*b`, element 0 the unit).
    pub fn monoid(elements: &[&str], table: &[Vec<usize>]) -> Self {
        let objects = vec!["*".to_string()];
        let morphisms =
            elements.iter().map(|e| Morphism { id: e.to_string(), src: 0, tgt: 0 }).collect();
        let mut comp = HashMap::default();
        for (a, row) in table.iter().enumerate() {
            for (b, &ab) in row.iter().enumerate() {
                comp.insert((a, b), ab);
            }
        }
        Self::from_indexed(objects, morphisms, vec![0], comp)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identities[x]
    }

    pub fn identities(&self) -> &[usize] {
        &self.identities
    }

    pub fn src(&self, m: usize) -> usize {
        self.morphisms[m].src
    }

    pub fn tgt(&self, m: usize) -> usize {
        self.morphisms[m].tgt
    }

    /// `g o f`, when listed.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp.get(&(g, f)).copied()
    }

    pub fn comp_table(&self) -> &HashMap<(usize, usize), usize> {
        &self.comp
    }

    /// Morphisms `x -> y` in canonical order.
    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        self.homs.get(&(x, y)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Objects `y` with a nonempty `hom(x, y)`, ascending.
    pub fn out_objects(&self, x: usize) -> &[usize] {
        &self.out_objects[x]
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.obj_index
            .get_or_init(|| self.objects.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect())
            .get(id)
            .copied()
    }

    pub fn morphism_index(&self, id: &str) -> Option<usize> {
        self.mor_index
            .get_or_init(|| self.morphisms.iter().enumerate().map(|(i, m)| (m.id.clone(), i)).collect())
            .get(id)
            .copied()
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identities[self.morphisms[m].src] == m
    }

    /// True when the only morphisms are identities.
    pub fn is_discrete(&self) -> bool {
        self.morphisms.len() == self.objects.len()
            && (0..self.morphisms.len()).all(|m| self.is_identity(m))
    }

    /// Composition table in canonical order `(g, f, g o f)`, by ids.
    pub fn comp_entries(&self) -> Vec<(String, String, String)> {
        let mut entries: Vec<_> = self.comp.iter().map(|(&(g, f), &h)| (f, g, h)).collect();
        entries.sort_unstable();
        entries
            .into_iter()
            .map(|(f, g, h)| {
                (
                    self.morphisms[g].id.clone(),
                    self.morphisms[f].id.clone(),
                    self.morphisms[h].id.clone(),
                )
            })
            .collect()
    }

    /// Exhaustively checks the category laws. Empty iff valid.
    pub fn validate(&self) -> Vec<CategoryViolation> {
        let mut out = Vec::new();
        let name = |m: usize| self.morphisms[m].id.clone();
        for (x, &i) in self.identities.iter().enumerate() {
            if self.morphisms[i].src != x || self.morphisms[i].tgt != x {
                out.push(CategoryViolation::IdentityEndpoints { object: self.objects[x].clone() });
            }
        }
        let mut keys: Vec<_> = self.comp.keys().copied().collect();
        keys.sort_unstable();
        for (g, f) in keys {
            let gf = self.comp[&(g, f)];
            let (mg, mf, mgf) = (&self.morphisms[g], &self.morphisms[f], &self.morphisms[gf]);
            if mf.tgt != mg.src {
                out.push(CategoryViolation::CompNotComposable { g: name(g), f: name(f) });
            } else if mgf.src != mf.src || mgf.tgt != mg.tgt {
                out.push(CategoryViolation::CompWrongEndpoints { g: name(g), f: name(f), gf: name(gf) });
            }
        }
        for f in 0..self.morphisms.len() {
            for &g in self.hom_from(self.morphisms[f].tgt).iter() {
                if !self.comp.contains_key(&(g, f)) {
                    out.push(CategoryViolation::CompNotTotal { g: name(g), f: name(f) });
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (f, m) in self.morphisms.iter().enumerate() {
            if self.comp[&(self.identities[m.tgt], f)] != f {
                out.push(CategoryViolation::LeftIdentity { f: name(f) });
            }
            if self.comp[&(f, self.identities[m.src])] != f {
                out.push(CategoryViolation::RightIdentity { f: name(f) });
            }
        }
        for f in 0..self.morphisms.len() {
            for &g in &self.hom_from(self.morphisms[f].tgt) {
                let gf = self.comp[&(g, f)];
                for &h in &self.hom_from(self.morphisms[g].tgt) {
                    let left = self.comp[&(h, gf)];
                    let right = self.comp[&(self.comp[&(h, g)], f)];
                    if left != right {
                        out.push(CategoryViolation::Associativity { h: name(h), g: name(g), f: name(f) });
                    }
                }
            }
        }
        out
    }

    /// All morphisms with source `x`, canonical order.
    pub fn hom_from(&self, x: usize) -> Vec<usize> {
        let mut v: Vec<usize> =
            self.out_objects[x].iter().flat_map(|&y| self.hom(x, y).iter().copied()).collect();
        v.sort_unstable();
        v
    }

    fn check_enum_size(&self, limit: usize) -> Result<()> {
        if self.morphisms.len() > limit {
            return Err(Error::Guardrail(format!(
                "category with {} morphisms exceeds enumeration bound {limit}",
                self.morphisms.len()
            )));
        }
        Ok(())
    }
}

/// A functor between finite categories, stored as object and morphism tables.
#[derive(Debug, Clone)]
pub struct Functor {
    src: Arc<FinCategory>,
    tgt: Arc<FinCategory>,
    omap: Vec<usize>,
    mmap: Vec<usize>,
}

fn same_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.omap == other.omap
            && self.mmap == other.mmap
            && same_category(&self.src, &other.src)
            && same_category(&self.tgt, &other.tgt)
    }
}

impl Eq for Functor {}

impl Functor {
    /// Checked constructor: the tables must satisfy the functor laws.
    pub fn new(
        src: Arc<FinCategory>,
        tgt: Arc<FinCategory>,
        omap: Vec<usize>,
        mmap: Vec<usize>,
    ) -> Result<Self> {
        let f = Self { src, tgt, omap, mmap };
        let problems = f.violations();
        if problems.is_empty() {
            Ok(f)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    pub(crate) fn from_parts(
        src: Arc<FinCategory>,
        tgt: Arc<FinCategory>,
        omap: Vec<usize>,
        mmap: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(omap.len(), src.object_count());
        debug_assert_eq!(mmap.len(), src.morphism_count());
        Self { src, tgt, omap, mmap }
    }

    pub fn identity(c: Arc<FinCategory>) -> Self {
        let omap = (0..c.object_count()).collect();
        let mmap = (0..c.morphism_count()).collect();
        Self { src: c.clone(), tgt: c, omap, mmap }
    }

    /// The functor sending everything to `obj` and its identity.
    pub fn constant(src: Arc<FinCategory>, tgt: Arc<FinCategory>, obj: usize) -> Self {
        let id = tgt.identity(obj);
        let omap = vec![obj; src.object_count()];
        let mmap = vec![id; src.morphism_count()];
        Self { src, tgt, omap, mmap }
    }

    pub fn src(&self) -> &Arc<FinCategory> {
        &self.src
    }

    pub fn tgt(&self) -> &Arc<FinCategory> {
        &self.tgt
    }

    pub fn omap(&self) -> &[usize] {
        &self.omap
    }

    pub fn mmap(&self) -> &[usize] {
        &self.mmap
    }

    pub fn obj(&self, x: usize) -> usize {
        self.omap[x]
    }

    pub fn mor(&self, m: usize) -> usize {
        self.mmap[m]
    }

    /// Tables only, ignoring the categories; cheap equality key.
    pub fn tables_eq(&self, other: &Self) -> bool {
        self.omap == other.omap && self.mmap == other.mmap
    }

    /// Every violated functor law, as human-readable lines.
    pub fn violations(&self) -> Vec<String> {
        let (c, d) = (&*self.src, &*self.tgt);
        let mut out = Vec::new();
        if self.omap.len() != c.object_count() || self.mmap.len() != c.morphism_count() {
            out.push("table sizes do not match the source category".to_string());
            return out;
        }
        if let Some(x) = self.omap.iter().position(|&y| y >= d.object_count()) {
            out.push(format!("object {} mapped out of range", c.objects()[x]));
            return out;
        }
        if let Some(m) = self.mmap.iter().position(|&n| n >= d.morphism_count()) {
            out.push(format!("morphism {} mapped out of range", c.morphisms()[m].id));
            return out;
        }
        for (m, mor) in c.morphisms().iter().enumerate() {
            let image = &d.morphisms()[self.mmap[m]];
            if image.src != self.omap[mor.src] || image.tgt != self.omap[mor.tgt] {
                out.push(format!("morphism {} not sent between images of its endpoints", mor.id));
            }
        }
        for x in 0..c.object_count() {
            if self.mmap[c.identity(x)] != d.identity(self.omap[x]) {
                out.push(format!("identity of {} not preserved", c.objects()[x]));
            }
        }
        let mut entries: Vec<_> = c.comp_table().iter().collect();
        entries.sort_unstable();
        for (&(g, f), &gf) in entries {
            if d.compose(self.mmap[g], self.mmap[f]) != Some(self.mmap[gf]) {
                out.push(format!(
                    "composite {} o {} not preserved",
                    c.morphisms()[g].id,
                    c.morphisms()[f].id
                ));
            }
        }
        out
    }

    /// `self o inner`.
    pub fn after(&self, inner: &Functor) -> Result<Functor> {
        compose_functors(self, inner)
    }

    /// Bijective on objects and morphisms.
    pub fn is_isomorphism(&self) -> bool {
        self.src.object_count() == self.tgt.object_count()
            && self.src.morphism_count() == self.tgt.morphism_count()
            && is_permutation(&self.omap)
            && is_permutation(&self.mmap)
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<Functor> {
        if !self.is_isomorphism() {
            return None;
        }
        Some(Functor {
            src: self.tgt.clone(),
            tgt: self.src.clone(),
            omap: invert(&self.omap),
            mmap: invert(&self.mmap),
        })
    }
}

fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    v.iter().all(|&i| i < v.len() && !std::mem::replace(&mut seen[i], true))
}

fn invert(v: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; v.len()];
    for (i, &j) in v.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// `outer o inner`.
pub fn compose_functors(outer: &Functor, inner: &Functor) -> Result<Functor> {
    if !same_category(&inner.tgt, &outer.src) {
        return Err(Error::Mismatch("functor composition: target of inner is not source of outer".into()));
    }
    Ok(Functor {
        src: inner.src.clone(),
        tgt: outer.tgt.clone(),
        omap: inner.omap.iter().map(|&x| outer.omap[x]).collect(),
        mmap: inner.mmap.iter().map(|&m| outer.mmap[m]).collect(),
    })
}

/// A natural transformation between parallel functors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    pub src: Functor,
    pub tgt: Functor,
    pub components: Vec<usize>,
}

impl NatTrans {
    /// Lines describing every failed endpoint or naturality condition.
    pub fn violations(&self) -> Vec<String> {
        let (c, d) = (&*self.src.src, &*self.src.tgt);
        let mut out = Vec::new();
        for x in 0..c.object_count() {
            let m = &d.morphisms()[self.components[x]];
            if m.src != self.src.obj(x) || m.tgt != self.tgt.obj(x) {
                out.push(format!("component at {} has wrong endpoints", c.objects()[x]));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (m, mor) in c.morphisms().iter().enumerate() {
            let left = d.compose(self.tgt.mor(m), self.components[mor.src]);
            let right = d.compose(self.components[mor.tgt], self.src.mor(m));
            if left.is_none() || left != right {
                out.push(format!("naturality square at {} does not commute", mor.id));
            }
        }
        out
    }
}

/// Options for bounded functor enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumBounds<'a> {
    /// Reject categories with more morphisms than this.
    pub max_morphisms: usize,
    /// Stop with an error once this many functors have been produced.
    pub max_results: usize,
    /// Optional object weights on the target with an upper bound on the
    /// summed weight of the image of all source objects. Branches are pruned.
    pub weight_bound: Option<(&'a [usize], usize)>,
}

impl Default for EnumBounds<'_> {
    fn default() -> Self {
        Self { max_morphisms: DEFAULT_MAX_ENUM_MORPHISMS, max_results: usize::MAX, weight_bound: None }
    }
}

struct FunctorSearch<'a> {
    c: &'a FinCategory,
    d: &'a FinCategory,
    /// Morphisms to assign after each object step.
    steps: Vec<Vec<usize>>,
    /// Composition triples (g, f, gf) checked when the key morphism is assigned.
    checks: Vec<Vec<(usize, usize, usize)>>,
    omap: Vec<usize>,
    mmap: Vec<usize>,
    weight: usize,
}

/// Callback over `(omap, mmap)` of each functor found.
type Visit<'v> = dyn FnMut(&[usize], &[usize]) -> ControlFlow<()> + 'v;

impl<'a> FunctorSearch<'a> {
    fn new(c: &'a FinCategory, d: &'a FinCategory) -> Self {
        let mut steps = vec![Vec::new(); c.object_count()];
        let mut position = vec![0usize; c.morphism_count()];
        let mut by_step: Vec<(usize, usize)> =
            c.morphisms().iter().enumerate().map(|(i, m)| (m.src.max(m.tgt), i)).collect();
        by_step.sort_unstable();
        for (counter, (step, m)) in by_step.into_iter().enumerate() {
            steps[step].push(m);
            position[m] = counter;
        }
        let mut checks = vec![Vec::new(); c.morphism_count()];
        for (&(g, f), &gf) in c.comp_table() {
            let last = [g, f, gf].into_iter().max_by_key(|&m| position[m]).unwrap();
            checks[last].push((g, f, gf));
        }
        Self {
            c,
            d,
            steps,
            checks,
            omap: vec![usize::MAX; c.object_count()],
            mmap: vec![usize::MAX; c.morphism_count()],
            weight: 0,
        }
    }

    fn run(
        &mut self,
        x: usize,
        weights: Option<(&[usize], usize)>,
        visit: &mut Visit<'_>,
    ) -> ControlFlow<()> {
        if x == self.c.object_count() {
            return visit(&self.omap, &self.mmap);
        }
        for y in 0..self.d.object_count() {
            if let Some((w, bound)) = weights {
                if self.weight + w[y] > bound {
                    continue;
                }
                self.weight += w[y];
            }
            self.omap[x] = y;
            let flow = self.assign_morphisms(x, 0, weights, visit);
            if let Some((w, _)) = weights {
                self.weight -= w[y];
            }
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn assign_morphisms(
        &mut self,
        x: usize,
        k: usize,
        weights: Option<(&[usize], usize)>,
        visit: &mut Visit<'_>,
    ) -> ControlFlow<()> {
        if k == self.steps[x].len() {
            return self.run(x + 1, weights, visit);
        }
        let m = self.steps[x][k];
        let mor = &self.c.morphisms()[m];
        let (a, b) = (self.omap[mor.src], self.omap[mor.tgt]);
        let candidates: Vec<usize> = if self.c.is_identity(m) {
            vec![self.d.identity(a)]
        } else {
            self.d.hom(a, b).to_vec()
        };
        for cand in candidates {
            self.mmap[m] = cand;
            let ok = self.checks[m]
                .iter()
                .all(|&(g, f, gf)| self.d.compose(self.mmap[g], self.mmap[f]) == Some(self.mmap[gf]));
            if ok {
                self.assign_morphisms(x, k + 1, weights, visit)?;
            }
        }
        self.mmap[m] = usize::MAX;
        ControlFlow::Continue(())
    }
}

/// Visits every functor `c -> d` in canonical order (object choices
/// lexicographic, morphism choices interleaved as soon as both endpoints
/// are fixed).
pub fn for_each_functor(
    c: &FinCategory,
    d: &FinCategory,
    weights: Option<(&[usize], usize)>,
    mut visit: impl FnMut(&[usize], &[usize]) -> ControlFlow<()>,
) {
    let mut search = FunctorSearch::new(c, d);
    let _ = search.run(0, weights, &mut visit);
}

/// All functors `c -> d`, with the default guardrail.
pub fn enumerate_functors(c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> Result<Vec<Functor>> {
    enumerate_functors_bounded(c, d, &EnumBounds::default())
}

pub fn enumerate_functors_bounded(
    c: &Arc<FinCategory>,
    d: &Arc<FinCategory>,
    bounds: &EnumBounds<'_>,
) -> Result<Vec<Functor>> {
    c.check_enum_size(bounds.max_morphisms)?;
    d.check_enum_size(bounds.max_morphisms)?;
    let mut out = Vec::new();
    let mut overflow = false;
    for_each_functor(c, d, bounds.weight_bound, |omap, mmap| {
        if out.len() == bounds.max_results {
            overflow = true;
            return ControlFlow::Break(());
        }
        out.push(Functor::from_parts(c.clone(), d.clone(), omap.to_vec(), mmap.to_vec()));
        ControlFlow::Continue(())
    });
    if overflow {
        return Err(Error::Guardrail(format!(
            "more than {} functors between categories of sizes {} and {}",
            bounds.max_results,
            c.object_count(),
            d.object_count()
        )));
    }
    Ok(out)
}

/// Component families `(F x -> G x)_x` satisfying naturality, in canonical
/// order. Functors are given by their tables over `c -> d`.
pub(crate) fn nat_trans_components(
    c: &FinCategory,
    d: &FinCategory,
    f: (&[usize], &[usize]),
    g: (&[usize], &[usize]),
) -> Vec<Vec<usize>> {
    let n = c.object_count();
    let mut squares = vec![Vec::new(); n];
    for (m, mor) in c.morphisms().iter().enumerate() {
        squares[mor.src.max(mor.tgt)].push(m);
    }
    let mut out = Vec::new();
    let mut comps = vec![usize::MAX; n];
    fn go(
        x: usize,
        c: &FinCategory,
        d: &FinCategory,
        f: (&[usize], &[usize]),
        g: (&[usize], &[usize]),
        squares: &[Vec<usize>],
        comps: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if x == c.object_count() {
            out.push(comps.clone());
            return;
        }
        for &cand in d.hom(f.0[x], g.0[x]) {
            comps[x] = cand;
            let ok = squares[x].iter().all(|&m| {
                let mor = &c.morphisms()[m];
                d.compose(g.1[m], comps[mor.src]) == d.compose(comps[mor.tgt], f.1[m])
            });
            if ok {
                go(x + 1, c, d, f, g, squares, comps, out);
            }
        }
        comps[x] = usize::MAX;
    }
    go(0, c, d, f, g, &squares, &mut comps, &mut out);
    out
}

/// All natural transformations `f => g`.
pub fn enumerate_nat_trans(f: &Functor, g: &Functor) -> Result<Vec<NatTrans>> {
    if !same_category(&f.src, &g.src) || !same_category(&f.tgt, &g.tgt) {
        return Err(Error::Mismatch("natural transformations need parallel functors".into()));
    }
    Ok(nat_trans_components(&f.src, &f.tgt, (&f.omap, &f.mmap), (&g.omap, &g.mmap))
        .into_iter()
        .map(|components| NatTrans { src: f.clone(), tgt: g.clone(), components })
        .collect())
}

fn object_signature(c: &FinCategory, x: usize) -> (usize, usize, usize) {
    let out: usize = c.out_objects(x).iter().map(|&y| c.hom(x, y).len()).sum();
    let inc = c.morphisms().iter().filter(|m| m.tgt == x).count();
    (c.hom(x, x).len(), out, inc)
}

/// Visits every isomorphism `c -> d` in canonical search order.
pub fn for_each_isomorphism(
    c: &FinCategory,
    d: &FinCategory,
    mut visit: impl FnMut(&[usize], &[usize]) -> ControlFlow<()>,
) {
    if c.object_count() != d.object_count() || c.morphism_count() != d.morphism_count() {
        return;
    }
    let sig_c: Vec<_> = (0..c.object_count()).map(|x| object_signature(c, x)).collect();
    let sig_d: Vec<_> = (0..d.object_count()).map(|x| object_signature(d, x)).collect();
    let mut checks = vec![Vec::new(); c.morphism_count()];
    for (&(g, f), &gf) in c.comp_table() {
        let last = g.max(f).max(gf);
        checks[last].push((g, f, gf));
    }
    struct State<'a> {
        c: &'a FinCategory,
        d: &'a FinCategory,
        sig_c: Vec<(usize, usize, usize)>,
        sig_d: Vec<(usize, usize, usize)>,
        checks: Vec<Vec<(usize, usize, usize)>>,
        omap: Vec<usize>,
        mmap: Vec<usize>,
        used_o: Vec<bool>,
        used_m: Vec<bool>,
    }
    fn objects(
        s: &mut State<'_>,
        x: usize,
        visit: &mut Visit<'_>,
    ) -> ControlFlow<()> {
        if x == s.c.object_count() {
            return morphisms(s, 0, visit);
        }
        for y in 0..s.d.object_count() {
            if s.used_o[y] || s.sig_c[x] != s.sig_d[y] {
                continue;
            }
            s.omap[x] = y;
            let ok = (0..=x).all(|j| {
                let yj = s.omap[j];
                s.c.hom(x, j).len() == s.d.hom(y, yj).len()
                    && s.c.hom(j, x).len() == s.d.hom(yj, y).len()
            });
            if ok {
                s.used_o[y] = true;
                objects(s, x + 1, visit)?;
                s.used_o[y] = false;
            }
        }
        ControlFlow::Continue(())
    }
    fn morphisms(
        s: &mut State<'_>,
        m: usize,
        visit: &mut Visit<'_>,
    ) -> ControlFlow<()> {
        if m == s.c.morphism_count() {
            return visit(&s.omap, &s.mmap);
        }
        let mor = &s.c.morphisms()[m];
        let (a, b) = (s.omap[mor.src], s.omap[mor.tgt]);
        let candidates: Vec<usize> = if s.c.is_identity(m) {
            vec![s.d.identity(a)]
        } else {
            s.d.hom(a, b).iter().copied().filter(|&n| !s.d.is_identity(n)).collect()
        };
        for cand in candidates {
            if s.used_m[cand] {
                continue;
            }
            s.mmap[m] = cand;
            let ok = s.checks[m]
                .iter()
                .all(|&(g, f, gf)| s.d.compose(s.mmap[g], s.mmap[f]) == Some(s.mmap[gf]));
            if ok {
                s.used_m[cand] = true;
                morphisms(s, m + 1, visit)?;
                s.used_m[cand] = false;
            }
        }
        ControlFlow::Continue(())
    }
    let mut state = State {
        c,
        d,
        sig_c,
        sig_d,
        checks,
        omap: vec![usize::MAX; c.object_count()],
        mmap: vec![usize::MAX; c.morphism_count()],
        used_o: vec![false; d.object_count()],
        used_m: vec![false; d.morphism_count()],
    };
    let _ = objects(&mut state, 0, &mut visit);
}

/// First isomorphism `c -> d` in canonical search order, if any.
pub fn find_isomorphism(c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> Option<Functor> {
    let mut found = None;
    for_each_isomorphism(c, d, |omap, mmap| {
        found = Some(Functor::from_parts(c.clone(), d.clone(), omap.to_vec(), mmap.to_vec()));
        ControlFlow::Break(())
    });
    found
}

/// Up to `limit` isomorphisms `c -> d`.
pub fn isomorphisms(c: &Arc<FinCategory>, d: &Arc<FinCategory>, limit: usize) -> Vec<Functor> {
    let mut found = Vec::new();
    for_each_isomorphism(c, d, |omap, mmap| {
        found.push(Functor::from_parts(c.clone(), d.clone(), omap.to_vec(), mmap.to_vec()));
        if found.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(c: FinCategory) -> Arc<FinCategory> {
        Arc::new(c)
    }

    /// Idempotent monoid {1, e} with e*e = e.
    fn idempotent() -> FinCategory {
        FinCategory::monoid(&["1", "e"], &[vec![0, 1], vec![1, 1]])
    }

    /// Every object map and morphism map, filtered by the functor laws.
    fn brute_force_functor_count(c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> usize {
        let (no, nm) = (c.object_count(), c.morphism_count());
        let (to, tm) = (d.object_count(), d.morphism_count());
        let mut count = 0;
        let total_o = to.pow(no as u32);
        let total_m = tm.pow(nm as u32);
        for oc in 0..total_o {
            let omap: Vec<usize> = (0..no).map(|i| (oc / to.pow(i as u32)) % to).collect();
            for mc in 0..total_m {
                let mmap: Vec<usize> = (0..nm).map(|i| (mc / tm.pow(i as u32)) % tm).collect();
                let f = Functor::from_parts(c.clone(), d.clone(), omap.clone(), mmap);
                if f.violations().is_empty() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn discrete_and_arrow_are_valid() {
        assert!(FinCategory::discrete_n(2).validate().is_empty());
        let arrow = FinCategory::walking_arrow();
        assert_eq!(arrow.morphism_count(), 3);
        assert!(arrow.validate().is_empty());
        assert!(FinCategory::ordinal(3).validate().is_empty());
        assert!(idempotent().validate().is_empty());
    }

    #[test]
    fn missing_composite_is_reported() {
        let c = FinCategory::from_tables(
            vec!["a".into(), "b".into()],
            vec![
                ("ia".into(), "a".into(), "a".into()),
                ("ib".into(), "b".into(), "b".into()),
                ("f".into(), "a".into(), "b".into()),
            ],
            &[("a".into(), "ia".into()), ("b".into(), "ib".into())],
            &[
                ("ia".into(), "ia".into(), "ia".into()),
                ("ib".into(), "ib".into(), "ib".into()),
                ("f".into(), "ia".into(), "f".into()),
            ],
        )
        .unwrap();
        let report = c.validate();
        assert_eq!(report, vec![CategoryViolation::CompNotTotal { g: "ib".into(), f: "f".into() }]);
    }

    #[test]
    fn dangling_target_is_a_schema_error() {
        let err = FinCategory::from_tables(
            vec!["a".into()],
            vec![("f".into(), "a".into(), "zz".into())],
            &[],
            &[],
        )
        .unwrap_err();
        assert!(err.to_string().contains("zz"));
    }

    #[test]
    fn functor_counts() {
        let two = arc(FinCategory::discrete_n(2));
        let one = arc(FinCategory::terminal());
        assert_eq!(enumerate_functors(&two, &two).unwrap().len(), 4);
        assert_eq!(enumerate_functors(&one, &one).unwrap().len(), 1);
        let arrow = arc(FinCategory::walking_arrow());
        // frozen from the brute-force oracle below
        assert_eq!(enumerate_functors(&arrow, &arrow).unwrap().len(), 3);
    }

    #[test]
    fn functor_enumeration_matches_brute_force() {
        let cats: Vec<Arc<FinCategory>> = vec![
            arc(FinCategory::terminal()),
            arc(FinCategory::discrete_n(2)),
            arc(FinCategory::walking_arrow()),
            arc(FinCategory::ordinal(2)),
            arc(idempotent()),
            arc(FinCategory::discrete_n(0)),
        ];
        for c in &cats {
            for d in &cats {
                let listed = enumerate_functors(c, d).unwrap();
                assert_eq!(listed.len(), brute_force_functor_count(c, d));
                for (i, f) in listed.iter().enumerate() {
                    assert!(f.violations().is_empty());
                    assert!(listed[..i].iter().all(|g| !g.tables_eq(f)));
                }
            }
        }
    }

    #[test]
    fn composing_with_identity_and_constants() {
        let arrow = arc(FinCategory::walking_arrow());
        let two = arc(FinCategory::discrete_n(2));
        let fs = enumerate_functors(&two, &arrow).unwrap();
        let id = Functor::identity(arrow.clone());
        for f in &fs {
            assert_eq!(&compose_functors(&id, f).unwrap(), f);
            assert_eq!(&compose_functors(f, &Functor::identity(two.clone())).unwrap(), f);
        }
        let c1 = Functor::constant(two.clone(), arrow.clone(), 0);
        let c2 = Functor::constant(arrow.clone(), two.clone(), 1);
        assert_eq!(compose_functors(&c2, &c1).unwrap(), Functor::constant(two.clone(), two, 1));
        assert!(compose_functors(&c1, &c1).is_err());
    }

    #[test]
    fn nat_trans_counts() {
        let two = arc(FinCategory::discrete_n(2));
        let id = Functor::identity(two.clone());
        assert_eq!(enumerate_nat_trans(&id, &id).unwrap().len(), 1);
        let a = Functor::constant(two.clone(), two.clone(), 0);
        let b = Functor::constant(two.clone(), two.clone(), 1);
        assert!(enumerate_nat_trans(&a, &b).unwrap().is_empty());
    }

    #[test]
    fn nat_trans_match_component_filter() {
        let arrow = arc(FinCategory::walking_arrow());
        let sources = [arc(FinCategory::walking_arrow()), arc(FinCategory::discrete_n(2))];
        for c in &sources {
            let fs = enumerate_functors(c, &arrow).unwrap();
            for f in &fs {
                for g in &fs {
                    let listed = enumerate_nat_trans(f, g).unwrap();
                    // all component families over arrow morphisms, filtered
                    let n = c.object_count();
                    let m = arrow.morphism_count();
                    let mut expected = 0;
                    for code in 0..m.pow(n as u32) {
                        let comps: Vec<usize> = (0..n).map(|i| (code / m.pow(i as u32)) % m).collect();
                        let t = NatTrans { src: f.clone(), tgt: g.clone(), components: comps };
                        if t.violations().is_empty() {
                            expected += 1;
                        }
                    }
                    assert_eq!(listed.len(), expected);
                    for t in &listed {
                        for (k, mor) in c.morphisms().iter().enumerate() {
                            let left = arrow.compose(g.mor(k), t.components[mor.src]);
                            let right = arrow.compose(t.components[mor.tgt], f.mor(k));
                            assert_eq!(left, right);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn isomorphism_search() {
        let arrow = arc(FinCategory::walking_arrow());
        let found = find_isomorphism(&arrow, &arrow).unwrap();
        assert_eq!(found, Functor::identity(arrow.clone()));
        let one = arc(FinCategory::terminal());
        let two = arc(FinCategory::discrete_n(2));
        assert!(find_isomorphism(&one, &two).is_none());
        let permuted = arc(
            FinCategory::from_tables(
                vec!["y".into(), "x".into()],
                vec![
                    ("f".into(), "x".into(), "y".into()),
                    ("iy".into(), "y".into(), "y".into()),
                    ("ix".into(), "x".into(), "x".into()),
                ],
                &[("x".into(), "ix".into()), ("y".into(), "iy".into())],
                &[
                    ("iy".into(), "f".into(), "f".into()),
                    ("f".into(), "ix".into(), "f".into()),
                    ("ix".into(), "ix".into(), "ix".into()),
                    ("iy".into(), "iy".into(), "iy".into()),
                ],
            )
            .unwrap(),
        );
        assert!(permuted.validate().is_empty());
        let iso = find_isomorphism(&arrow, &permuted).unwrap();
        assert!(iso.violations().is_empty() && iso.is_isomorphism());
        assert!(find_isomorphism(&permuted, &arrow).is_some());
        assert!(find_isomorphism(&arrow, &arc(FinCategory::discrete_n(2))).is_none());
    }

    #[test]
    fn enumeration_guardrail() {
        let big = arc(FinCategory::discrete_n(70));
        let one = arc(FinCategory::terminal());
        assert!(matches!(enumerate_functors(&big, &one), Err(Error::Guardrail(_))));
    }
}
