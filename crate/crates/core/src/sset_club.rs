//! The `⋉`-monoid on simplicial sets: simplex-indexed families, the
//! bisimplicial set they span, its diagonal with the comparison functor
//! `delta`, and the unit and associativity checks.
//!
//! Families act covariantly on operators: `psi` sends the
//! operator `theta: s -> theta^* s` to a map `psi(s) -> psi(theta^* s)`.
//! Degenerate simplices carry the value of their non-degenerate base and
//! degeneracy operators act as identities, so a family is given by values on
//! non-degenerate simplices and one map per stored face.

use std::sync::Arc;

use rustc_hash::FxHashMap as HashMap;

use crate::diagram::DiagramInCat;
use crate::error::{Error, Result};
use crate::fincat::Functor;
use crate::semidirect::{fiber_semidirect, FiberProduct};
use crate::simpset::{
    from_levelwise, iso_sset, one_point, simplex_category, simplex_category_map, BisimplicialSet, Levelwise,
    MonotoneMap, Simplex, SimplexCategory, SimplicialMap, SimplicialSet,
};

/// An object `{S, psi}` of `SSet ⋉ SSet`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexFamily {
    base: Arc<SimplicialSet>,
    /// `values[k][y]` for non-degenerate `y`
    pub(crate) values: Vec<Vec<Arc<SimplicialSet>>>,
    /// `face_maps[k][y][i]: psi(y) -> psi(d_i y)`
    pub(crate) face_maps: Vec<Vec<Vec<SimplicialMap>>>,
}

/// Alias matching the monoid's object name.
pub type ClubObjectSSet = SimplexFamily;

impl SimplexFamily {
    pub fn new(
        base: Arc<SimplicialSet>,
        values: Vec<Vec<Arc<SimplicialSet>>>,
        face_maps: Vec<Vec<Vec<SimplicialMap>>>,
    ) -> Result<Self> {
        let f = Self { base, values, face_maps };
        let shape = f.shape_problems();
        if !shape.is_empty() {
            return Err(Error::Schema(shape.join("; ")));
        }
        let problems = f.validate();
        if problems.is_empty() {
            Ok(f)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    pub(crate) fn from_parts(
        base: Arc<SimplicialSet>,
        values: Vec<Vec<Arc<SimplicialSet>>>,
        face_maps: Vec<Vec<Vec<SimplicialMap>>>,
    ) -> Self {
        Self { base, values, face_maps }
    }

    /// `psi` constant at `t` with identity actions.
    pub fn constant(base: Arc<SimplicialSet>, t: Arc<SimplicialSet>) -> Self {
        let n = base.trunc();
        let values = (0..=n).map(|k| vec![t.clone(); base.nondeg_count(k)]).collect();
        let id = SimplicialMap::identity(t);
        let face_maps = (0..=n)
            .map(|k| (0..base.nondeg_count(k)).map(|_| if k == 0 { Vec::new() } else { vec![id.clone(); k + 1] }).collect())
            .collect();
        Self { base, values, face_maps }
    }

    /// The unit on the right: every fiber is the point.
    pub fn point(base: Arc<SimplicialSet>) -> Self {
        let pt = Arc::new(one_point(base.trunc()));
        Self::constant(base, pt)
    }

    pub fn base(&self) -> &Arc<SimplicialSet> {
        &self.base
    }

    /// `psi(y)` for the non-degenerate `k`-simplex `y`.
    pub fn value_nd(&self, k: usize, y: usize) -> &Arc<SimplicialSet> {
        &self.values[k][y]
    }

    /// `psi(s)` for any simplex.
    pub fn value(&self, s: &Simplex) -> &Arc<SimplicialSet> {
        &self.values[s.base_dim()][s.base]
    }

    pub fn face_map(&self, k: usize, y: usize, i: usize) -> &SimplicialMap {
        &self.face_maps[k][y][i]
    }

    /// `psi(s, theta)(t)`.
    pub fn act(&self, s: &Simplex, theta: &MonotoneMap, t: &Simplex) -> Simplex {
        self.base
            .face_chain(s, theta)
            .into_iter()
            .fold(t.clone(), |cur, (k, y, i)| self.face_maps[k][y][i].apply(&cur))
    }

    /// `psi(s, theta)` as a map `psi(s) -> psi(theta^* s)`.
    pub fn action(&self, s: &Simplex, theta: &MonotoneMap) -> SimplicialMap {
        let src = self.value(s).clone();
        let tgt = self.value(&self.base.apply_unchecked(s, theta)).clone();
        let images = (0..=src.trunc())
            .map(|k| (0..src.nondeg_count(k)).map(|x| self.act(s, theta, &Simplex::nondegenerate(k, x))).collect())
            .collect();
        SimplicialMap::from_parts(src, tgt, images)
    }

    fn shape_problems(&self) -> Vec<String> {
        let b = &*self.base;
        let mut out = Vec::new();
        for k in 0..=b.trunc() {
            let nv = self.values.get(k).map_or(0, Vec::len);
            let nf = self.face_maps.get(k).map_or(0, Vec::len);
            if nv != b.nondeg_count(k) || nf != b.nondeg_count(k) {
                out.push(format!("dimension {k}: one fiber and one face list per simplex required"));
                continue;
            }
            for y in 0..nv {
                let name = &b.names(k)[y];
                if self.values[k][y].trunc() != b.trunc() {
                    out.push(format!("fiber over {name} has a different truncation"));
                }
                let expected = if k == 0 { 0 } else { k + 1 };
                if self.face_maps[k][y].len() != expected {
                    out.push(format!("{name} needs {expected} face maps"));
                    continue;
                }
                for (i, m) in self.face_maps[k][y].iter().enumerate() {
                    let face = b.stored_face(k, y, i);
                    if **m.src() != *self.values[k][y] || **m.tgt() != **self.value(face) {
                        out.push(format!("face map d{i}@{name} has the wrong source or target"));
                    }
                }
            }
        }
        out
    }

    /// Face maps are simplicial maps and satisfy `d_i d_j = d_{j-1} d_i`.
    pub fn validate(&self) -> Vec<String> {
        let mut out = self.shape_problems();
        if !out.is_empty() {
            return out;
        }
        let b = &*self.base;
        for k in 1..=b.trunc() {
            for y in 0..b.nondeg_count(k) {
                for (i, m) in self.face_maps[k][y].iter().enumerate() {
                    for e in m.validate() {
                        out.push(format!("face map d{i}@{}: {e}", b.names(k)[y]));
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for k in 2..=b.trunc() {
            for y in 0..b.nondeg_count(k) {
                for j in 0..=k {
                    for i in 0..j {
                        let (mi, mj) = (&self.face_maps[k][y][i], &self.face_maps[k][y][j]);
                        if !self.identity_holds(k, y, i, j, mi, mj) {
                            out.push(format!("d{i} d{j} != d{} d{i} on the fiber over {}", j - 1, b.names(k)[y]));
                        }
                    }
                }
            }
        }
        out
    }

    /// `psi(d_j y, d_i) o mj == psi(d_i y, d_{j-1}) o mi` on every stored
    /// simplex of `psi(y)`; only lower-dimensional face maps are consulted.
    pub(crate) fn identity_holds(
        &self,
        k: usize,
        y: usize,
        i: usize,
        j: usize,
        mi: &SimplicialMap,
        mj: &SimplicialMap,
    ) -> bool {
        let b = &*self.base;
        let fj = b.stored_face(k, y, j);
        let fi = b.stored_face(k, y, i);
        let di = MonotoneMap::face(k - 1, i);
        let dj1 = MonotoneMap::face(k - 1, j - 1);
        let v = &self.values[k][y];
        (0..=v.trunc()).all(|n| {
            (0..v.nondeg_count(n)).all(|t| {
                let t = Simplex::nondegenerate(n, t);
                self.act(fj, &di, &mj.apply(&t)) == self.act(fi, &dj1, &mi.apply(&t))
            })
        })
    }
}

/// The bisimplicial set `T_{m,n} = {(s, t) : s in S_m, t in psi(s)_n}`.
pub fn bisimplicial_of(x: &SimplexFamily) -> BisimplicialSet {
    let s = &*x.base;
    let n = s.trunc();
    let bases: Vec<Vec<Simplex>> = (0..=n).map(|m| s.simplices(m)).collect();
    let base_index: Vec<HashMap<Simplex, usize>> =
        bases.iter().map(|l| l.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect()).collect();
    // fiber simplices of psi(y) per level, with their positions
    let fiber_levels: Vec<Vec<Vec<Vec<Simplex>>>> = (0..=n)
        .map(|k| (0..s.nondeg_count(k)).map(|y| (0..=n).map(|q| x.values[k][y].simplices(q)).collect()).collect())
        .collect();
    let fiber_index: Vec<Vec<Vec<HashMap<Simplex, usize>>>> = fiber_levels
        .iter()
        .map(|ys| {
            ys.iter()
                .map(|qs| qs.iter().map(|l| l.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect()).collect())
                .collect()
        })
        .collect();
    let fib = |b: &Simplex, q: usize| &fiber_levels[b.base_dim()][b.base][q];
    // offsets[m][q][a]: first cell over the a-th m-simplex of S in bidegree (m, q)
    let offsets: Vec<Vec<Vec<usize>>> = (0..=n)
        .map(|m| {
            (0..=n)
                .map(|q| {
                    let mut acc = 0;
                    let mut v = Vec::with_capacity(bases[m].len() + 1);
                    for b in &bases[m] {
                        v.push(acc);
                        acc += fib(b, q).len();
                    }
                    v.push(acc);
                    v
                })
                .collect()
        })
        .collect();
    let cell = |m: usize, q: usize, b: &Simplex, t: &Simplex| {
        let a = base_index[m][b];
        offsets[m][q][a] + fiber_index[b.base_dim()][b.base][q][t]
    };
    let mut names = vec![vec![Vec::new(); n + 1]; n + 1];
    let mut hface = vec![vec![Vec::new(); n + 1]; n + 1];
    let mut hdegen = vec![vec![Vec::new(); n + 1]; n + 1];
    let mut vface = vec![vec![Vec::new(); n + 1]; n + 1];
    let mut vdegen = vec![vec![Vec::new(); n + 1]; n + 1];
    for m in 0..=n {
        for q in 0..=n {
            for b in &bases[m] {
                let fv = x.value(b);
                for t in fib(b, q) {
                    names[m][q].push(format!("({},{})", s.label(b), fv.label(t)));
                    hface[m][q].push(if m == 0 {
                        Vec::new()
                    } else {
                        (0..=m)
                            .map(|i| {
                                let th = MonotoneMap::face(m, i);
                                cell(m - 1, q, &s.apply_unchecked(b, &th), &x.act(b, &th, t))
                            })
                            .collect()
                    });
                    hdegen[m][q].push(if m == n {
                        Vec::new()
                    } else {
                        (0..=m)
                            .map(|i| {
                                let th = MonotoneMap::degeneracy(m, i);
                                cell(m + 1, q, &s.apply_unchecked(b, &th), &x.act(b, &th, t))
                            })
                            .collect()
                    });
                    vface[m][q].push(if q == 0 {
                        Vec::new()
                    } else {
                        (0..=q).map(|i| cell(m, q - 1, b, &fv.apply_face(t, i))).collect()
                    });
                    vdegen[m][q].push(if q == n {
                        Vec::new()
                    } else {
                        (0..=q)
                            .map(|i| cell(m, q + 1, b, &fv.apply_unchecked(t, &MonotoneMap::degeneracy(q, i))))
                            .collect()
                    });
                }
            }
        }
    }
    BisimplicialSet { trunc: n, names, hface, hdegen, vface, vdegen }
}

/// `Delta({S, psi})`: the diagonal of the bisimplicial set, with each level
/// element remembered as its pair `(s, t)`.
#[derive(Debug, Clone)]
pub struct Composite {
    pub sset: Arc<SimplicialSet>,
    /// `cells[k][e] = (s, t)` with `s in S_k`, `t in psi(s)_k`
    pub cells: Vec<Vec<(Simplex, Simplex)>>,
    /// normal form in `sset` of each level element
    pub normal_forms: Vec<Vec<Simplex>>,
    cell_index: Vec<HashMap<(Simplex, Simplex), usize>>,
    nf_index: Vec<HashMap<Simplex, usize>>,
}

impl Composite {
    pub fn cell_of(&self, k: usize, s: &Simplex, t: &Simplex) -> Option<usize> {
        self.cell_index[k].get(&(s.clone(), t.clone())).copied()
    }

    /// The pair behind a simplex of the composite.
    pub fn pair_of(&self, x: &Simplex) -> &(Simplex, Simplex) {
        let k = x.dim();
        &self.cells[k][self.nf_index[k][x]]
    }

    /// The simplex of the composite carrying the pair `(s, t)`.
    pub fn simplex_of(&self, s: &Simplex, t: &Simplex) -> Option<&Simplex> {
        let k = s.dim();
        self.cell_of(k, s, t).map(|e| &self.normal_forms[k][e])
    }
}

/// `Delta({S, psi}) = diag T`.
pub fn compose(x: &SimplexFamily) -> Composite {
    let s = &*x.base;
    let n = s.trunc();
    let cells: Vec<Vec<(Simplex, Simplex)>> = (0..=n)
        .map(|k| {
            s.simplices(k).into_iter().flat_map(|b| x.value(&b).simplices(k).into_iter().map(move |t| (b.clone(), t))).collect()
        })
        .collect();
    let cell_index: Vec<HashMap<(Simplex, Simplex), usize>> =
        cells.iter().map(|l| l.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect()).collect();
    let op = |b: &Simplex, t: &Simplex, th: &MonotoneMap, k: usize| -> usize {
        let b2 = s.apply_unchecked(b, th);
        let t2 = x.act(b, th, &x.value(b).apply_unchecked(t, th));
        cell_index[k][&(b2, t2)]
    };
    let names = cells
        .iter()
        .map(|l| l.iter().map(|(b, t)| format!("({},{})", s.label(b), x.value(b).label(t))).collect())
        .collect();
    let faces = (0..=n)
        .map(|k| {
            cells[k]
                .iter()
                .map(|(b, t)| {
                    if k == 0 {
                        return Vec::new();
                    }
                    (0..=k).map(|i| op(b, t, &MonotoneMap::face(k, i), k - 1)).collect()
                })
                .collect()
        })
        .collect();
    let degens = (0..n)
        .map(|k| {
            cells[k].iter().map(|(b, t)| (0..=k).map(|i| op(b, t, &MonotoneMap::degeneracy(k, i), k + 1)).collect()).collect()
        })
        .collect();
    let (sset, normal_forms) = from_levelwise(&Levelwise { names, faces, degens });
    let nf_index = normal_forms.iter().map(|l| l.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect()).collect();
    Composite { sset: Arc::new(sset), cells, normal_forms, cell_index, nf_index }
}

/// `S ⋉_psi SSet` as a fiber product, with the simplex categories used to
/// decode it.
#[derive(Debug, Clone)]
pub struct PairCategory {
    pub base: SimplexCategory,
    /// simplex category of `psi(y)` per non-degenerate `y`
    pub fibers: Vec<Vec<Arc<SimplexCategory>>>,
    pub product: FiberProduct,
}

impl PairCategory {
    pub fn fiber(&self, s: &Simplex) -> &SimplexCategory {
        &self.fibers[s.base_dim()][s.base]
    }

    pub fn object_of(&self, s: &Simplex, t: &Simplex) -> Option<usize> {
        let a = self.base.object_of(s)?;
        let b = self.fiber(s).object_of(t)?;
        self.product.find_object(a, b)
    }

    /// The morphism out of `(s, t)` given by `theta` on `s` and `theta2`
    /// on the pushed simplex `psi(s, theta)(t)`.
    pub fn morphism_of(
        &self,
        x: &SimplexFamily,
        s: &Simplex,
        t: &Simplex,
        theta: &MonotoneMap,
        theta2: &MonotoneMap,
    ) -> Option<usize> {
        let src = self.object_of(s, t)?;
        let a = self.base.object_of(s)?;
        let alpha = self.base.morphism_of(a, theta)?;
        let pushed = x.act(s, theta, t);
        let s2 = x.base.apply_unchecked(s, theta);
        let fib = self.fiber(&s2);
        let beta = fib.morphism_of(fib.object_of(&pushed)?, theta2)?;
        self.product.find_morphism(src, alpha, beta)
    }
}

/// Builds `S ⋉_psi SSet` as `R(S) ⋉_id (R o psi)`.
pub fn pair_category(x: &SimplexFamily) -> Result<PairCategory> {
    let s = &*x.base;
    let base = simplex_category(s);
    let fibers: Vec<Vec<Arc<SimplexCategory>>> = (0..=s.trunc())
        .map(|k| (0..s.nondeg_count(k)).map(|y| Arc::new(simplex_category(&x.values[k][y]))).collect())
        .collect();
    let fiber_of = |v: &Simplex| fibers[v.base_dim()][v.base].clone();
    let cats = base.objects.iter().map(|v| fiber_of(v).category.clone()).collect();
    let maps = base
        .morphisms
        .iter()
        .map(|(o, theta)| {
            let v = &base.objects[*o];
            let w = s.apply_unchecked(v, theta);
            simplex_category_map(&x.action(v, theta), &fiber_of(v), &fiber_of(&w))
        })
        .collect::<Result<Vec<_>>>()?;
    let right = DiagramInCat::new(base.category.clone(), cats, maps)?;
    let product = fiber_semidirect(&base.category, &Functor::identity(base.category.clone()), &right)?;
    Ok(PairCategory { base, fibers, product })
}

/// `delta: T -> S ⋉_psi SSet` sending `(s, t)` to the pair object and an
/// operator `theta` to `(theta, theta)`.
pub fn delta(x: &SimplexFamily, comp: &Composite, pairs: &PairCategory) -> Result<(SimplexCategory, Functor)> {
    let tcat = simplex_category(&comp.sset);
    let omap = tcat
        .objects
        .iter()
        .map(|v| {
            let (s, t) = comp.pair_of(v);
            pairs.object_of(s, t).ok_or_else(|| Error::Mismatch("delta: pair object missing".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mmap = tcat
        .morphisms
        .iter()
        .map(|(o, theta)| {
            let (s, t) = comp.pair_of(&tcat.objects[*o]);
            pairs.morphism_of(x, s, t, theta, theta).ok_or_else(|| Error::Mismatch("delta: pair morphism missing".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = Functor::new(tcat.category.clone(), pairs.product.category().clone(), omap, mmap)?;
    Ok((tcat, f))
}

/// A morphism `{f, phi}: {S, psi} -> {S', psi'}`. `phi` is given on
/// non-degenerate simplices; a degenerate simplex uses its base's component.
#[derive(Debug, Clone)]
pub struct ClubMorphismSSet {
    src: Arc<SimplexFamily>,
    tgt: Arc<SimplexFamily>,
    f: SimplicialMap,
    /// `phi[k][y]: psi(y) -> psi'(f(y))`
    phi: Vec<Vec<SimplicialMap>>,
}

impl ClubMorphismSSet {
    pub fn new(
        src: Arc<SimplexFamily>,
        tgt: Arc<SimplexFamily>,
        f: SimplicialMap,
        phi: Vec<Vec<SimplicialMap>>,
    ) -> Result<Self> {
        let m = Self { src, tgt, f, phi };
        let problems = m.validate();
        if problems.is_empty() {
            Ok(m)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    pub(crate) fn from_parts(
        src: Arc<SimplexFamily>,
        tgt: Arc<SimplexFamily>,
        f: SimplicialMap,
        phi: Vec<Vec<SimplicialMap>>,
    ) -> Self {
        Self { src, tgt, f, phi }
    }

    pub fn identity(x: Arc<SimplexFamily>) -> Self {
        let f = SimplicialMap::identity(x.base.clone());
        let phi = x.values.iter().map(|l| l.iter().map(|v| SimplicialMap::identity(v.clone())).collect()).collect();
        Self { src: x.clone(), tgt: x, f, phi }
    }

    pub fn src(&self) -> &Arc<SimplexFamily> {
        &self.src
    }

    pub fn tgt(&self) -> &Arc<SimplexFamily> {
        &self.tgt
    }

    pub fn base_map(&self) -> &SimplicialMap {
        &self.f
    }

    /// `phi_s`.
    pub fn phi_at(&self, s: &Simplex) -> &SimplicialMap {
        &self.phi[s.base_dim()][s.base]
    }

    /// Shapes, component validity and naturality on every stored face.
    pub fn validate(&self) -> Vec<String> {
        let (x, y) = (&*self.src, &*self.tgt);
        let mut out = Vec::new();
        if **self.f.src() != *x.base || **self.f.tgt() != *y.base {
            out.push("base map does not go between the two bases".into());
            return out;
        }
        out.extend(self.f.validate().into_iter().map(|e| format!("base map: {e}")));
        let b = &*x.base;
        for k in 0..=b.trunc() {
            if self.phi.get(k).map_or(0, Vec::len) != b.nondeg_count(k) {
                out.push(format!("dimension {k}: one component per simplex required"));
                return out;
            }
            for v in 0..b.nondeg_count(k) {
                let p = &self.phi[k][v];
                let sv = Simplex::nondegenerate(k, v);
                if **p.src() != *x.values[k][v] || **p.tgt() != **y.value(&self.f.apply(&sv)) {
                    out.push(format!("component at {} has the wrong source or target", b.names(k)[v]));
                    continue;
                }
                out.extend(p.validate().into_iter().map(|e| format!("component at {}: {e}", b.names(k)[v])));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for k in 1..=b.trunc() {
            for v in 0..b.nondeg_count(k) {
                let sv = Simplex::nondegenerate(k, v);
                let fv = self.f.apply(&sv);
                let val = &x.values[k][v];
                for i in 0..=k {
                    let th = MonotoneMap::face(k, i);
                    let face = b.stored_face(k, v, i);
                    let natural = (0..=val.trunc()).all(|q| {
                        (0..val.nondeg_count(q)).all(|t| {
                            let t = Simplex::nondegenerate(q, t);
                            y.act(&fv, &th, &self.phi[k][v].apply(&t)) == self.phi_at(face).apply(&x.act(&sv, &th, &t))
                        })
                    });
                    if !natural {
                        out.push(format!("naturality fails for d{i} at {}", b.names(k)[v]));
                    }
                }
            }
        }
        out
    }

    /// `self o inner`.
    pub fn after(&self, inner: &ClubMorphismSSet) -> Result<ClubMorphismSSet> {
        if *inner.tgt != *self.src {
            return Err(Error::Mismatch("club morphisms are not composable".into()));
        }
        let f = self.f.after(&inner.f)?;
        let phi = inner
            .phi
            .iter()
            .enumerate()
            .map(|(k, l)| {
                l.iter()
                    .enumerate()
                    .map(|(v, p)| self.phi_at(&inner.f.apply(&Simplex::nondegenerate(k, v))).after(p))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { src: inner.src.clone(), tgt: self.tgt.clone(), f, phi })
    }
}

/// `Delta({f, phi})`: `(s, t) -> (f(s), phi_s(t))` on the diagonal.
pub fn compose_morphism(m: &ClubMorphismSSet, src: &Composite, tgt: &Composite) -> Result<SimplicialMap> {
    let t = &src.sset;
    let images = (0..=t.trunc())
        .map(|k| {
            (0..t.nondeg_count(k))
                .map(|v| {
                    let (s, u) = src.pair_of(&Simplex::nondegenerate(k, v));
                    tgt.simplex_of(&m.f.apply(s), &m.phi_at(s).apply(u))
                        .cloned()
                        .ok_or_else(|| Error::Mismatch("image pair missing from the target composite".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SimplicialMap::new(src.sset.clone(), tgt.sset.clone(), images)
}

/// Named law with the failures found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub law: String,
    pub failures: Vec<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `delta' o R(Delta(m)) == (f, phi)_* o delta` on every object and
/// morphism of the source simplex category.
pub fn delta_naturality_check(m: &ClubMorphismSSet) -> Result<LawReport> {
    let (x, y) = (&*m.src, &*m.tgt);
    let (cx, cy) = (compose(x), compose(y));
    let (px, py) = (pair_category(x)?, pair_category(y)?);
    let (tx, dx) = delta(x, &cx, &px)?;
    let (ty, dy) = delta(y, &cy, &py)?;
    let map = compose_morphism(m, &cx, &cy)?;
    let rf = simplex_category_map(&map, &tx, &ty)?;
    let mut failures = Vec::new();
    let push_obj = |o: usize| -> Option<usize> {
        let (a, b) = px.product.object(dx.obj(o));
        let s = &px.base.objects[a];
        let t = &px.fiber(s).objects[b];
        py.object_of(&m.f.apply(s), &m.phi_at(s).apply(t))
    };
    for o in 0..tx.objects.len() {
        if Some(dy.obj(rf.obj(o))) != push_obj(o) {
            failures.push(format!("object {}", tx.category.objects()[o]));
        }
    }
    for (i, _) in tx.morphisms.iter().enumerate() {
        // decode delta(mu) = (alpha, beta) and push it along (f, phi)
        let (src, alpha, beta) = px.product.morphism(dx.mor(i));
        let (a, b) = px.product.object(src);
        let s = &px.base.objects[a];
        let t = &px.fiber(s).objects[b];
        let (_, theta) = &px.base.morphisms[alpha];
        let s2 = x.base.apply_unchecked(s, theta);
        let (_, theta2) = &px.fiber(&s2).morphisms[beta];
        let pushed = py.morphism_of(y, &m.f.apply(s), &m.phi_at(s).apply(t), theta, theta2);
        if Some(dy.mor(rf.mor(i))) != pushed {
            failures.push(format!("morphism {}", tx.category.morphisms()[i].id));
        }
    }
    Ok(LawReport { law: "delta naturality".into(), failures })
}

/// Both unit laws for `s`: `Delta(1, const s) ≅ s` and `Delta(s, point) ≅ s`.
pub fn unit_law_check(s: &Arc<SimplicialSet>) -> Vec<LawReport> {
    let pt = Arc::new(one_point(s.trunc()));
    let left = compose(&SimplexFamily::constant(pt, s.clone()));
    let right = compose(&SimplexFamily::point(s.clone()));
    let report = |law: &str, c: &Composite| LawReport {
        law: law.into(),
        failures: if iso_sset(&c.sset, s).is_some() { Vec::new() } else { vec!["no isomorphism found".into()] },
    };
    vec![report("left unit", &left), report("right unit", &right)]
}

/// An object of `SSet ⋉ (SSet ⋉ SSet)`: an outer family `psi` over `S` and,
/// over each non-degenerate `y`, an inner family `chi(y, -)` over `psi(y)`,
/// with club morphisms along the faces of `S`.
#[derive(Debug, Clone)]
pub struct PairFamily {
    pub outer: Arc<SimplexFamily>,
    /// `inner[k][y]` over `psi(y)`
    pub inner: Vec<Vec<Arc<SimplexFamily>>>,
    /// `faces[k][y][i]: inner(y) -> inner(d_i y)` over `psi(y, d_i)`
    pub faces: Vec<Vec<Vec<ClubMorphismSSet>>>,
}

impl PairFamily {
    /// `chi` constant along `S` and independent of `t`: `chi(s, t) = u(s)`.
    pub fn from_outer(outer: Arc<SimplexFamily>, u: &SimplexFamily) -> Self {
        let s = outer.base.clone();
        let inner: Vec<Vec<Arc<SimplexFamily>>> = (0..=s.trunc())
            .map(|k| {
                (0..s.nondeg_count(k))
                    .map(|y| Arc::new(SimplexFamily::constant(outer.values[k][y].clone(), u.values[k][y].clone())))
                    .collect()
            })
            .collect();
        let faces = (0..=s.trunc())
            .map(|k| {
                (0..s.nondeg_count(k))
                    .map(|y| {
                        if k == 0 {
                            return Vec::new();
                        }
                        (0..=k)
                            .map(|i| {
                                let face = s.stored_face(k, y, i);
                                let tgt = inner[face.base_dim()][face.base].clone();
                                let f = outer.face_maps[k][y][i].clone();
                                let pv = &outer.values[k][y];
                                let phi = (0..=pv.trunc())
                                    .map(|q| vec![u.face_maps[k][y][i].clone(); pv.nondeg_count(q)])
                                    .collect();
                                ClubMorphismSSet::from_parts(inner[k][y].clone(), tgt, f, phi)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { outer, inner, faces }
    }

    pub fn validate(&self) -> Vec<String> {
        let s = &*self.outer.base;
        let mut out = self.outer.validate();
        for k in 0..=s.trunc() {
            for y in 0..s.nondeg_count(k) {
                let name = &s.names(k)[y];
                out.extend(self.inner[k][y].validate().into_iter().map(|e| format!("inner family at {name}: {e}")));
                for (i, m) in self.faces[k][y].iter().enumerate() {
                    let face = s.stored_face(k, y, i);
                    if *m.src != *self.inner[k][y] || *m.tgt != *self.inner[face.base_dim()][face.base] {
                        out.push(format!("face d{i}@{name} joins the wrong inner families"));
                        continue;
                    }
                    if m.f != self.outer.face_maps[k][y][i] {
                        out.push(format!("face d{i}@{name} does not lie over psi"));
                    }
                    out.extend(m.validate().into_iter().map(|e| format!("face d{i}@{name}: {e}")));
                }
            }
        }
        out
    }

    /// `theta` acting on a triple `(s, t, u)` with `s in S`, `t in psi(s)`,
    /// `u in chi(s, t)`: horizontally on `s`, pushing `t` and `u` along.
    fn act_h(&self, s: &Simplex, theta: &MonotoneMap, t: &Simplex, u: &Simplex) -> (Simplex, Simplex, Simplex) {
        let mut t = t.clone();
        let mut u = u.clone();
        for (k, y, i) in self.outer.base.face_chain(s, theta) {
            u = self.faces[k][y][i].phi_at(&t).apply(&u);
            t = self.outer.face_maps[k][y][i].apply(&t);
        }
        (self.outer.base.apply_unchecked(s, theta), t, u)
    }
}

/// A simplex of a two-step composite, read as its triple `(s, t, u)`.
type Triple = (Simplex, Simplex, Simplex);

/// Levels of a two-step composite with face and degeneracy tables, all
/// expressed on triples.
struct TripleTables {
    levels: Vec<Vec<Triple>>,
    faces: Vec<Vec<Vec<Triple>>>,
    degens: Vec<Vec<Vec<Triple>>>,
}

fn triple_tables(c: &Composite, decode: impl Fn(&(Simplex, Simplex)) -> Triple) -> TripleTables {
    let n = c.sset.trunc();
    let levels = c.cells.iter().map(|l| l.iter().map(&decode).collect()).collect();
    let faces = (0..=n)
        .map(|k| {
            c.normal_forms[k]
                .iter()
                .map(|x| {
                    if k == 0 {
                        return Vec::new();
                    }
                    (0..=k).map(|i| decode(c.pair_of(&c.sset.apply_face(x, i)))).collect()
                })
                .collect()
        })
        .collect();
    let degens = (0..n)
        .map(|k| {
            c.normal_forms[k]
                .iter()
                .map(|x| {
                    (0..=k)
                        .map(|i| decode(c.pair_of(&c.sset.apply_unchecked(x, &MonotoneMap::degeneracy(k, i)))))
                        .collect()
                })
                .collect()
        })
        .collect();
    TripleTables { levels, faces, degens }
}

/// Both ways of composing a pair family: inner composites first, or the
/// outer composite first. The results must agree simplex for simplex once
/// each simplex is read as its triple `(s, t, u)`.
pub fn associativity_check(p: &PairFamily) -> Result<LawReport> {
    let problems = p.validate();
    if !problems.is_empty() {
        return Err(Error::Invalid(problems.join("; ")));
    }
    let left = inner_first(p)?;
    let right = outer_first(p)?;
    let mut failures = Vec::new();
    let n = p.outer.base.trunc();
    for k in 0..=n {
        let mut a: Vec<&Triple> = left.levels[k].iter().collect();
        let mut b: Vec<&Triple> = right.levels[k].iter().collect();
        a.sort();
        b.sort();
        if a != b {
            failures.push(format!("level {k}: the two composites have different simplices"));
            continue;
        }
        let pos: HashMap<&Triple, usize> = right.levels[k].iter().enumerate().map(|(i, t)| (t, i)).collect();
        for (i, tr) in left.levels[k].iter().enumerate() {
            let j = pos[tr];
            if k > 0 && left.faces[k][i] != right.faces[k][j] {
                failures.push(format!("faces differ at level {k}"));
            }
            if k < n && left.degens[k][i] != right.degens[k][j] {
                failures.push(format!("degeneracies differ at level {k}"));
            }
        }
    }
    failures.dedup();
    Ok(LawReport { law: "associativity".into(), failures })
}

/// `Delta(S, s -> Delta(psi(s), chi(s, -)))`.
fn inner_first(p: &PairFamily) -> Result<TripleTables> {
    let s = p.outer.base.clone();
    let n = s.trunc();
    let inner: Vec<Vec<Composite>> = p.inner.iter().map(|l| l.iter().map(|f| compose(f)).collect()).collect();
    let values = inner.iter().map(|l| l.iter().map(|c| c.sset.clone()).collect()).collect();
    let face_maps = (0..=n)
        .map(|k| {
            (0..s.nondeg_count(k))
                .map(|y| {
                    p.faces[k][y]
                        .iter()
                        .enumerate()
                        .map(|(i, m)| {
                            let face = s.stored_face(k, y, i);
                            compose_morphism(m, &inner[k][y], &inner[face.base_dim()][face.base])
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let fam = SimplexFamily::new(s, values, face_maps)?;
    let comp = compose(&fam);
    Ok(triple_tables(&comp, |(b, w)| {
        let (t, u) = inner[b.base_dim()][b.base].pair_of(w).clone();
        (b.clone(), t, u)
    }))
}

/// `Delta(Delta(S, psi), chi)`.
fn outer_first(p: &PairFamily) -> Result<TripleTables> {
    let comp = compose(&p.outer);
    let t = comp.sset.clone();
    let n = t.trunc();
    let chi = |b: &Simplex, u: &Simplex| p.inner[b.base_dim()][b.base].value(u).clone();
    let values: Vec<Vec<Arc<SimplicialSet>>> = (0..=n)
        .map(|k| {
            (0..t.nondeg_count(k))
                .map(|v| {
                    let (b, u) = comp.pair_of(&Simplex::nondegenerate(k, v));
                    chi(b, u)
                })
                .collect()
        })
        .collect();
    let face_maps = (0..=n)
        .map(|k| {
            (0..t.nondeg_count(k))
                .map(|v| {
                    if k == 0 {
                        return Ok(Vec::new());
                    }
                    let (b, u) = comp.pair_of(&Simplex::nondegenerate(k, v)).clone();
                    let inner_fam = &p.inner[b.base_dim()][b.base];
                    let src = values[k][v].clone();
                    (0..=k)
                        .map(|i| {
                            let th = MonotoneMap::face(k, i);
                            let face = t.stored_face(k, v, i);
                            let tgt = values[face.base_dim()][face.base].clone();
                            let u2 = p.outer.value(&b).apply_unchecked(&u, &th);
                            let images = (0..=src.trunc())
                                .map(|q| {
                                    (0..src.nondeg_count(q))
                                        .map(|w| {
                                            let w = Simplex::nondegenerate(q, w);
                                            let moved = inner_fam.act(&u, &th, &w);
                                            p.act_h(&b, &th, &u2, &moved).2
                                        })
                                        .collect()
                                })
                                .collect();
                            SimplicialMap::new(src.clone(), tgt, images)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let fam = SimplexFamily::new(t, values, face_maps)?;
    let comp2 = compose(&fam);
    Ok(triple_tables(&comp2, |(x, w)| {
        let (b, u) = comp.pair_of(x).clone();
        (b, u, w.clone())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simpset::{boundary, is_injective, product, standard_simplex, surjections};

    fn closed_count(s: &SimplicialSet, k: usize) -> usize {
        (0..=k).map(|j| s.nondeg_count(j) * surjections(k, j).len()).sum()
    }

    #[test]
    fn family_functoriality_exhaustive() {
        let x = crate::fixtures::collapse_family(2);
        let sc = simplex_category(&x.base);
        for (o, th) in &sc.morphisms {
            let s = &sc.objects[*o];
            let s2 = x.base.apply_unchecked(s, th);
            if th.is_identity() {
                assert_eq!(x.action(s, th), SimplicialMap::identity(x.value(s).clone()));
            }
            for q in 0..=2 {
                for th2 in crate::simpset::monotone_maps(q, th.dom()) {
                    let direct = x.action(s, &th.after(&th2));
                    let steps = x.action(&s2, &th2).after(&x.action(s, th)).unwrap();
                    assert_eq!(direct, steps);
                }
            }
        }
    }

    #[test]
    fn bidegree_counts_against_oracle() {
        let x = crate::fixtures::collapse_family(2);
        let b = bisimplicial_of(&x);
        assert!(b.validate().is_empty());
        for m in 0..=2 {
            for q in 0..=2 {
                let expect: usize = x.base.simplices(m).iter().map(|s| closed_count(x.value(s), q)).sum();
                assert_eq!(b.names[m][q].len(), expect, "bidegree ({m},{q})");
            }
        }
    }

    #[test]
    fn constant_family_gives_product() {
        let s = Arc::new(standard_simplex(1, 3));
        let t = Arc::new(boundary(2, 3));
        let c = compose(&SimplexFamily::constant(s.clone(), t.clone()));
        assert!(iso_sset(&c.sset, &Arc::new(product(&s, &t))).is_some());
        let b = bisimplicial_of(&SimplexFamily::constant(s.clone(), t.clone()));
        let ext = crate::simpset::external_product(&s, &t);
        for m in 0..=3 {
            for q in 0..=3 {
                assert_eq!(b.names[m][q].len(), ext.names[m][q].len());
            }
        }
    }

    #[test]
    fn unit_laws() {
        for s in [one_point(3), standard_simplex(2, 3), boundary(2, 3)] {
            for r in unit_law_check(&Arc::new(s)) {
                assert!(r.passed(), "{}", r.law);
            }
        }
    }

    #[test]
    fn delta_is_a_functor_but_not_invertible() {
        let x = crate::fixtures::collapse_family(2);
        let comp = compose(&x);
        let pairs = pair_category(&x).unwrap();
        let (tcat, d) = delta(&x, &comp, &pairs).unwrap();
        assert!(d.violations().is_empty());
        assert!(tcat.category.object_count() < pairs.product.category().object_count());
        assert!(!d.is_isomorphism());
    }

    #[test]
    fn morphisms_identity_composite_and_naturality() {
        let x = Arc::new(crate::fixtures::collapse_family(2));
        let cx = compose(&x);
        let id = ClubMorphismSSet::identity(x.clone());
        assert!(id.validate().is_empty());
        let m = compose_morphism(&id, &cx, &cx).unwrap();
        assert_eq!(m, SimplicialMap::identity(cx.sset.clone()));
        assert!(delta_naturality_check(&id).unwrap().passed());

        // family over Delta[1] constant at Delta[1], mapped to the constant point family
        let s = Arc::new(standard_simplex(1, 2));
        let c = Arc::new(SimplexFamily::constant(s.clone(), Arc::new(standard_simplex(1, 2))));
        let p = Arc::new(SimplexFamily::point(s.clone()));
        let to_pt = SimplicialMap::to_point(Arc::new(standard_simplex(1, 2)));
        let phi = vec![vec![to_pt.clone(); 2], vec![to_pt.clone()], Vec::new()];
        let g = ClubMorphismSSet::new(c.clone(), p.clone(), SimplicialMap::identity(s.clone()), phi).unwrap();
        assert!(delta_naturality_check(&g).unwrap().passed());

        // composites: Delta(g o id) == Delta(g) o Delta(id)
        let cc = compose(&c);
        let cp = compose(&p);
        let gid = g.after(&ClubMorphismSSet::identity(c.clone())).unwrap();
        let lhs = compose_morphism(&gid, &cc, &cp).unwrap();
        let rhs = compose_morphism(&g, &cc, &cp)
            .unwrap()
            .after(&compose_morphism(&ClubMorphismSSet::identity(c), &cc, &cc).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn injective_morphisms_stay_injective() {
        let s = Arc::new(standard_simplex(1, 2));
        let b = Arc::new(boundary(2, 2));
        let d2 = Arc::new(standard_simplex(2, 2));
        let x = Arc::new(SimplexFamily::constant(s.clone(), b.clone()));
        let y = Arc::new(SimplexFamily::constant(s.clone(), d2.clone()));
        let images = (0..=2).map(|k| (0..b.nondeg_count(k)).map(|v| Simplex::nondegenerate(k, v)).collect()).collect();
        let inc = SimplicialMap::new(b, d2, images).unwrap();
        let phi = vec![vec![inc.clone(); 2], vec![inc], Vec::new()];
        let m = ClubMorphismSSet::new(x.clone(), y.clone(), SimplicialMap::identity(s), phi).unwrap();
        let f = compose_morphism(&m, &compose(&x), &compose(&y)).unwrap();
        assert!(is_injective(&f));
        assert!(delta_naturality_check(&m).unwrap().passed());
    }

    #[test]
    fn associativity_on_fixtures() {
        let s = Arc::new(standard_simplex(1, 2));
        let pt = SimplexFamily::point(s.clone());
        let p = PairFamily::from_outer(Arc::new(SimplexFamily::point(s.clone())), &pt);
        assert!(associativity_check(&p).unwrap().passed());

        let t = Arc::new(standard_simplex(1, 2));
        let u = Arc::new(boundary(2, 2));
        let outer = Arc::new(SimplexFamily::constant(s.clone(), t.clone()));
        let uf = SimplexFamily::constant(s.clone(), u.clone());
        let p = PairFamily::from_outer(outer, &uf);
        assert!(associativity_check(&p).unwrap().passed());
        let left = inner_first(&p).unwrap();
        let triple = product(&product(&s, &t), &u);
        for k in 0..=2 {
            assert_eq!(left.levels[k].len(), closed_count(&triple, k));
        }

        let outer = Arc::new(crate::fixtures::collapse_family(2));
        let p = PairFamily::from_outer(outer, &crate::fixtures::collapse_family(2));
        assert!(p.validate().is_empty());
        assert!(associativity_check(&p).unwrap().passed());
    }

    #[test]
    fn random_families_are_associative_and_natural() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for base in [standard_simplex(1, 2), standard_simplex(2, 2), boundary(2, 2)] {
            let base = Arc::new(base);
            for _ in 0..2 {
                let psi = Arc::new(crate::fixtures::random_family(&mut rng, &base));
                assert!(psi.validate().is_empty());
                let u = crate::fixtures::random_family(&mut rng, &base);
                let p = PairFamily::from_outer(psi.clone(), &u);
                let r = associativity_check(&p).unwrap();
                assert!(r.passed(), "{:?}", r.failures);
                let c = compose(&psi);
                let pairs = pair_category(&psi).unwrap();
                assert!(delta(&psi, &c, &pairs).is_ok());
                assert!(delta_naturality_check(&ClubMorphismSSet::identity(psi)).unwrap().passed());
            }
        }
    }
}
