//! Diagrams in `Cat` over a finite base, and the morphisms `(F, rho)` between them.
//!
//! A morphism `X -> X'` consists of a base functor `F: D -> D'` and, for
//! every object `d` of `D`, a functor `rho_d: R'(F d) -> R(d)` (the
//! transformation points from `R' o F` back to `R`).

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{compose_functors, for_each_isomorphism, isomorphisms, FinCategory, Functor};

#[derive(Debug, Clone)]
pub struct DiagramInCat {
    base: Arc<FinCategory>,
    fibers: Vec<Arc<FinCategory>>,
    fiber_maps: Vec<Functor>,
}

impl PartialEq for DiagramInCat {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.fibers == other.fibers && self.fiber_maps == other.fiber_maps
    }
}

impl DiagramInCat {
    /// Shape check only: one fiber per object, one functor per morphism
    /// between the right fibers. Functoriality is checked by [`validate`].
    ///
    /// [`validate`]: DiagramInCat::validate
    pub fn new(
        base: Arc<FinCategory>,
        fibers: Vec<Arc<FinCategory>>,
        fiber_maps: Vec<Functor>,
    ) -> Result<Self> {
        if fibers.len() != base.object_count() || fiber_maps.len() != base.morphism_count() {
            return Err(Error::Schema("diagram needs one fiber per object and one map per morphism".into()));
        }
        for (m, mor) in base.morphisms().iter().enumerate() {
            let f = &fiber_maps[m];
            let same = |a: &Arc<FinCategory>, b: &Arc<FinCategory>| Arc::ptr_eq(a, b) || **a == **b;
            if !same(f.src(), &fibers[mor.src]) || !same(f.tgt(), &fibers[mor.tgt]) {
                return Err(Error::Schema(format!("fiber map of {} has wrong endpoints", mor.id)));
            }
        }
        Ok(Self { base, fibers, fiber_maps })
    }

    pub(crate) fn from_parts(
        base: Arc<FinCategory>,
        fibers: Vec<Arc<FinCategory>>,
        fiber_maps: Vec<Functor>,
    ) -> Self {
        Self { base, fibers, fiber_maps }
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn fiber(&self, d: usize) -> &Arc<FinCategory> {
        &self.fibers[d]
    }

    pub fn fibers(&self) -> &[Arc<FinCategory>] {
        &self.fibers
    }

    pub fn fiber_map(&self, m: usize) -> &Functor {
        &self.fiber_maps[m]
    }

    pub fn fiber_maps(&self) -> &[Functor] {
        &self.fiber_maps
    }

    /// Exhaustive functoriality check of `R`. Empty iff valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .base
            .validate()
            .into_iter()
            .map(|v| format!("base: {v}"))
            .collect();
        for (d, fiber) in self.fibers.iter().enumerate() {
            out.extend(fiber.validate().into_iter().map(|v| format!("fiber {}: {v}", self.base.objects()[d])));
        }
        if !out.is_empty() {
            return out;
        }
        let ids = |m: usize| self.base.morphisms()[m].id.clone();
        for (m, f) in self.fiber_maps.iter().enumerate() {
            for v in f.violations() {
                out.push(format!("fiber map of {}: {v}", ids(m)));
            }
        }
        for d in 0..self.base.object_count() {
            let m = self.base.identity(d);
            if !self.fiber_maps[m].tables_eq(&Functor::identity(self.fibers[d].clone())) {
                out.push(format!("fiber map of identity {} is not the identity functor", ids(m)));
            }
        }
        let mut entries: Vec<_> = self.base.comp_table().iter().map(|(&k, &v)| (k, v)).collect();
        entries.sort_unstable();
        for ((g, f), gf) in entries {
            match compose_functors(&self.fiber_maps[g], &self.fiber_maps[f]) {
                Ok(c) if c.tables_eq(&self.fiber_maps[gf]) => {}
                _ => out.push(format!("R({} o {}) != R({}) o R({})", ids(g), ids(f), ids(g), ids(f))),
            }
        }
        out
    }
}

/// The diagram `M -> Cat` sending everything to the terminal category.
pub fn constantify(m: &Arc<FinCategory>) -> DiagramInCat {
    let one = Arc::new(FinCategory::terminal());
    let id = Functor::identity(one.clone());
    DiagramInCat {
        base: m.clone(),
        fibers: vec![one; m.object_count()],
        fiber_maps: vec![id; m.morphism_count()],
    }
}

/// The monoidal unit: base `1`, fiber `1`.
pub fn unit_diagram() -> DiagramInCat {
    constantify(&Arc::new(FinCategory::terminal()))
}

#[derive(Debug, Clone)]
pub struct DiagramMorphism {
    src: Arc<DiagramInCat>,
    tgt: Arc<DiagramInCat>,
    base: Functor,
    rho: Vec<Functor>,
}

impl PartialEq for DiagramMorphism {
    /// Equal as tables: base functors and every `rho` component.
    fn eq(&self, other: &Self) -> bool {
        self.base.tables_eq(&other.base)
            && self.rho.len() == other.rho.len()
            && self.rho.iter().zip(&other.rho).all(|(a, b)| a.tables_eq(b))
    }
}

impl DiagramMorphism {
    /// Checked constructor; fails with the full list of violations.
    pub fn new(
        src: Arc<DiagramInCat>,
        tgt: Arc<DiagramInCat>,
        base: Functor,
        rho: Vec<Functor>,
    ) -> Result<Self> {
        let m = Self { src, tgt, base, rho };
        let problems = m.validate();
        if problems.is_empty() {
            Ok(m)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    pub(crate) fn from_parts(
        src: Arc<DiagramInCat>,
        tgt: Arc<DiagramInCat>,
        base: Functor,
        rho: Vec<Functor>,
    ) -> Self {
        Self { src, tgt, base, rho }
    }

    pub fn identity(x: Arc<DiagramInCat>) -> Self {
        let base = Functor::identity(x.base.clone());
        let rho = x.fibers.iter().map(|f| Functor::identity(f.clone())).collect();
        Self { src: x.clone(), tgt: x, base, rho }
    }

    pub fn src(&self) -> &Arc<DiagramInCat> {
        &self.src
    }

    pub fn tgt(&self) -> &Arc<DiagramInCat> {
        &self.tgt
    }

    pub fn base(&self) -> &Functor {
        &self.base
    }

    pub fn rho(&self, d: usize) -> &Functor {
        &self.rho[d]
    }

    pub fn rhos(&self) -> &[Functor] {
        &self.rho
    }

    /// Endpoints of every component and strict naturality per base morphism.
    pub fn validate(&self) -> Vec<String> {
        let (x, y) = (&*self.src, &*self.tgt);
        let mut out = Vec::new();
        if **self.base.src() != *x.base || **self.base.tgt() != *y.base {
            out.push("base functor has wrong endpoints".to_string());
            return out;
        }
        out.extend(self.base.violations().into_iter().map(|v| format!("base functor: {v}")));
        if self.rho.len() != x.base.object_count() {
            out.push("one rho component per source object required".to_string());
            return out;
        }
        for (d, r) in self.rho.iter().enumerate() {
            let name = &x.base.objects()[d];
            if **r.src() != *y.fibers[self.base.obj(d)] || **r.tgt() != *x.fibers[d] {
                out.push(format!("rho at {name} has wrong endpoints"));
                continue;
            }
            out.extend(r.violations().into_iter().map(|v| format!("rho at {name}: {v}")));
        }
        if !out.is_empty() {
            return out;
        }
        for (m, mor) in x.base.morphisms().iter().enumerate() {
            let left = compose_functors(&x.fiber_maps[m], &self.rho[mor.src]);
            let right = compose_functors(&self.rho[mor.tgt], &y.fiber_maps[self.base.mor(m)]);
            match (left, right) {
                (Ok(l), Ok(r)) if l.tables_eq(&r) => {}
                _ => out.push(format!("rho not natural at {}", mor.id)),
            }
        }
        out
    }

    /// `self o inner`.
    pub fn after(&self, inner: &DiagramMorphism) -> Result<DiagramMorphism> {
        compose_diagram_morphisms(self, inner)
    }

    /// First source object where two parallel morphisms differ, by id.
    pub fn first_difference(&self, other: &DiagramMorphism) -> Option<String> {
        let objects = self.src.base.objects();
        (0..objects.len())
            .find(|&d| self.base.obj(d) != other.base.obj(d) || !self.rho[d].tables_eq(&other.rho[d]))
            .map(|d| objects[d].clone())
            .or_else(|| {
                (0..self.base.mmap().len())
                    .find(|&m| self.base.mor(m) != other.base.mor(m))
                    .map(|m| self.src.base.morphisms()[m].id.clone())
            })
    }
}

/// `outer o inner`: base `outer.F o inner.F`, `rho_d = inner.rho_d o outer.rho_{inner.F(d)}`.
pub fn compose_diagram_morphisms(outer: &DiagramMorphism, inner: &DiagramMorphism) -> Result<DiagramMorphism> {
    if !(Arc::ptr_eq(&inner.tgt, &outer.src) || *inner.tgt == *outer.src) {
        return Err(Error::Mismatch("diagram morphisms are not composable".into()));
    }
    let base = compose_functors(&outer.base, &inner.base)?;
    let rho = (0..inner.rho.len())
        .map(|d| compose_functors(&inner.rho[d], &outer.rho[inner.base.obj(d)]))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagramMorphism { src: inner.src.clone(), tgt: outer.tgt.clone(), base, rho })
}

/// Lifts `f: M -> M'` to `constantify(M) -> constantify(M')` with identity components.
pub fn lift_functor(f: &Functor, src: Arc<DiagramInCat>, tgt: Arc<DiagramInCat>) -> Result<DiagramMorphism> {
    let rho = (0..src.base.object_count())
        .map(|d| Functor::identity(src.fibers[d].clone()))
        .collect();
    DiagramMorphism::new(src, tgt, f.clone(), rho)
}

/// Searches for an isomorphism of diagrams `X -> Y`: a base isomorphism
/// together with fiber isomorphisms satisfying strict naturality. The first
/// one in canonical search order is returned.
pub fn find_diagram_isomorphism(x: &Arc<DiagramInCat>, y: &Arc<DiagramInCat>) -> Option<DiagramMorphism> {
    let mut found = None;
    for_each_isomorphism(&x.base, &y.base, |omap, mmap| {
        let base = Functor::from_parts(x.base.clone(), y.base.clone(), omap.to_vec(), mmap.to_vec());
        let candidates: Vec<Vec<Functor>> = (0..x.base.object_count())
            .map(|d| isomorphisms(&y.fibers[omap[d]], &x.fibers[d], 10_000))
            .collect();
        if candidates.iter().any(Vec::is_empty) {
            return ControlFlow::Continue(());
        }
        let mut chosen: Vec<Functor> = Vec::new();
        if choose_rho(x, y, &base, &candidates, &mut chosen) {
            found = Some(DiagramMorphism::from_parts(x.clone(), y.clone(), base, chosen));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    found
}

fn choose_rho(
    x: &DiagramInCat,
    y: &DiagramInCat,
    base: &Functor,
    candidates: &[Vec<Functor>],
    chosen: &mut Vec<Functor>,
) -> bool {
    let d = chosen.len();
    if d == candidates.len() {
        return true;
    }
    for cand in &candidates[d] {
        chosen.push(cand.clone());
        let ok = x.base.morphisms().iter().enumerate().all(|(m, mor)| {
            if mor.src.max(mor.tgt) != d {
                return true;
            }
            let l = compose_functors(&x.fiber_maps[m], &chosen[mor.src]);
            let r = compose_functors(&chosen[mor.tgt], &y.fiber_maps[base.mor(m)]);
            matches!((l, r), (Ok(l), Ok(r)) if l.tables_eq(&r))
        });
        if ok && choose_rho(x, y, base, candidates, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::enumerate_functors;

    #[test]
    fn constant_diagrams_are_valid() {
        assert!(constantify(&Arc::new(FinCategory::discrete_n(2))).validate().is_empty());
        let arrow = constantify(&Arc::new(FinCategory::walking_arrow()));
        assert!(arrow.validate().is_empty());
        let unit = unit_diagram();
        assert_eq!(unit.base().object_count(), 1);
        assert_eq!(unit.base().morphism_count(), 1);
        assert_eq!(unit, constantify(&Arc::new(FinCategory::terminal())));
        assert!(unit.validate().is_empty());
    }

    #[test]
    fn broken_functoriality_is_witnessed() {
        // base 0 -> 1 -> 2, fibers the discrete 2, and R(0<2) swapping objects
        let base = Arc::new(FinCategory::ordinal(2));
        let two = Arc::new(FinCategory::discrete_n(2));
        let swap = Functor::new(two.clone(), two.clone(), vec![1, 0], vec![1, 0]).unwrap();
        let maps: Vec<Functor> = base
            .morphisms()
            .iter()
            .map(|m| if m.id == "0<2" { swap.clone() } else { Functor::identity(two.clone()) })
            .collect();
        let d = DiagramInCat::new(base, vec![two.clone(); 3], maps).unwrap();
        let report = d.validate();
        assert_eq!(report.len(), 1, "{report:?}");
        assert!(report[0].contains("1<2") && report[0].contains("0<1"));
    }

    #[test]
    fn composition_laws() {
        let arrow = Arc::new(FinCategory::walking_arrow());
        let x = Arc::new(constantify(&arrow));
        let fs = enumerate_functors(&arrow, &arrow).unwrap();
        let lifted: Vec<_> = fs.iter().map(|f| lift_functor(f, x.clone(), x.clone()).unwrap()).collect();
        let id = DiagramMorphism::identity(x.clone());
        for a in &lifted {
            assert_eq!(&compose_diagram_morphisms(&id, a).unwrap(), a);
            assert_eq!(&compose_diagram_morphisms(a, &id).unwrap(), a);
            for b in &lifted {
                let ba = compose_diagram_morphisms(b, a).unwrap();
                assert!(ba.validate().is_empty());
                // lifting preserves composition
                let direct = lift_functor(&compose_functors(b.base(), a.base()).unwrap(), x.clone(), x.clone()).unwrap();
                assert_eq!(ba, direct);
                for c in &lifted {
                    let left = compose_diagram_morphisms(c, &ba).unwrap();
                    let right = compose_diagram_morphisms(&compose_diagram_morphisms(c, b).unwrap(), a).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn hom_bijection_with_constant_fibers() {
        // morphisms constantify(M) -> X with X having terminal fibers <-> functors M -> base(X)
        let m = Arc::new(FinCategory::walking_arrow());
        let target_base = Arc::new(FinCategory::ordinal(2));
        let mm = Arc::new(constantify(&m));
        let x = Arc::new(constantify(&target_base));
        let functors = enumerate_functors(&m, &target_base).unwrap();
        let one = Arc::new(FinCategory::terminal());
        let ones = enumerate_functors(&one, &one).unwrap();
        assert_eq!(ones.len(), 1);
        let mut count = 0;
        for f in &functors {
            let rho = vec![ones[0].clone(); m.object_count()];
            if DiagramMorphism::new(mm.clone(), x.clone(), f.clone(), rho).is_ok() {
                count += 1;
            }
        }
        assert_eq!(count, functors.len());
    }

    #[test]
    fn diagram_isomorphism_search() {
        let u = Arc::new(unit_diagram());
        let found = find_diagram_isomorphism(&u, &u).unwrap();
        assert!(found.validate().is_empty());
        let two = Arc::new(constantify(&Arc::new(FinCategory::discrete_n(2))));
        assert!(find_diagram_isomorphism(&u, &two).is_none());
    }
}
