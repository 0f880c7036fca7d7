//! JSON files. Every top-level document carries `"version"` and `"kind"`;
//! nested values use the bare formats.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{AlgebraMorphism, AlgebraObject};
use crate::diagram::{unit_diagram, DiagramInCat, DiagramMorphism};
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, Functor};
use crate::operads::{permutations, Collection, NsOperad, SigmaCollection, SymOperad};
use crate::semidirect::{club_square, ClubStructure, Guardrails};
use crate::simpset::{MonotoneMap, Simplex, SimplicialMap, SimplicialSet};
use crate::sset_club::SimplexFamily;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismJson {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryJson {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismJson>,
    pub identities: BTreeMap<String, String>,
    pub comp: Vec<[String; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorJson {
    pub omap: BTreeMap<String, String>,
    pub mmap: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramJson {
    pub base: CategoryJson,
    pub fibers: BTreeMap<String, CategoryJson>,
    pub fiber_maps: BTreeMap<String, FunctorJson>,
}

/// Base functor and `rho` components keyed by source object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDataJson {
    pub base: FunctorJson,
    pub rho: BTreeMap<String, FunctorJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClubJson {
    pub carrier: DiagramJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_cap: Option<usize>,
    pub mu: MorphismDataJson,
    pub eta: MorphismDataJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexJson {
    pub eta: Vec<usize>,
    pub base: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SSetJson {
    pub trunc: usize,
    pub nondeg: BTreeMap<String, Vec<String>>,
    pub faces: BTreeMap<String, Vec<SimplexJson>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SMapJson {
    pub images: BTreeMap<String, SimplexJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFileJson {
    pub src: SSetJson,
    pub tgt: SSetJson,
    pub images: BTreeMap<String, SimplexJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClubObjectJson {
    pub base: SSetJson,
    pub fibers: BTreeMap<String, SSetJson>,
    /// keys `d{i}@{simplex}`
    pub fiber_maps: BTreeMap<String, SMapJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaJson {
    pub op: String,
    pub args: Vec<String>,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperadJson {
    pub cap: usize,
    pub levels: BTreeMap<String, Vec<String>>,
    pub unit: String,
    pub gamma: Vec<GammaJson>,
    /// arity -> permutation (as `[..]`) -> element -> image
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>>,
}

/// A set-valued family: sizes on non-degenerate simplices, one function
/// per stored face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraObjectJson {
    pub shape: SSetJson,
    pub sizes: BTreeMap<String, usize>,
    /// keys `d{i}@{simplex}`
    pub faces: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraMorphismJson {
    pub src: AlgebraObjectJson,
    pub tgt: AlgebraObjectJson,
    pub images: BTreeMap<String, SimplexJson>,
    /// components on non-degenerate simplices
    pub phi: BTreeMap<String, Vec<usize>>,
}

/// A parsed top-level file.
#[derive(Debug, Clone)]
pub enum Document {
    Category(FinCategory),
    Diagram(DiagramInCat),
    Club(ClubStructure),
    SSet(SimplicialSet),
    Map(SimplicialMap),
    ClubObject(SimplexFamily),
    Operad(NsOperad),
    SymOperad(SymOperad),
    Algebra(AlgebraObject),
    AlgebraMorphism(AlgebraMorphism),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Category(_) => "category",
            Document::Diagram(_) => "diagram",
            Document::Club(_) => "club",
            Document::SSet(_) => "sset",
            Document::Map(_) => "map",
            Document::ClubObject(_) => "club-object",
            Document::Operad(_) | Document::SymOperad(_) => "operad",
            Document::Algebra(_) => "algebra-object",
            Document::AlgebraMorphism(_) => "algebra-morphism",
        }
    }
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn invalid(problems: Vec<String>) -> Result<()> {
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(problems.join("; ")))
    }
}

/// Wraps a body with the version and kind fields.
pub fn envelope<T: Serialize>(kind: &str, body: &T) -> Result<Value> {
    let mut v = serde_json::to_value(body)?;
    let obj = v.as_object_mut().ok_or_else(|| schema("document body must be an object"))?;
    obj.insert("version".into(), Value::from(FORMAT_VERSION));
    obj.insert("kind".into(), Value::from(kind));
    Ok(v)
}

/// Checks version and kind and returns the body.
pub fn open_envelope(mut v: Value) -> Result<(String, Value)> {
    let obj = v.as_object_mut().ok_or_else(|| schema("document must be a JSON object"))?;
    match obj.remove("version") {
        Some(Value::Number(n)) if n.as_u64() == Some(FORMAT_VERSION) => {}
        Some(other) => return Err(schema(format!("unsupported version {other}"))),
        None => return Err(schema("missing version field")),
    }
    let kind = match obj.remove("kind") {
        Some(Value::String(s)) => s,
        _ => return Err(schema("missing kind field")),
    };
    Ok((kind, v))
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

// categories and functors

pub fn category_to_json(c: &FinCategory) -> CategoryJson {
    let morphisms = c
        .morphisms()
        .iter()
        .map(|m| MorphismJson { id: m.id.clone(), src: c.objects()[m.src].clone(), tgt: c.objects()[m.tgt].clone() })
        .collect();
    let identities =
        (0..c.object_count()).map(|o| (c.objects()[o].clone(), c.morphisms()[c.identity(o)].id.clone())).collect();
    let comp = c.comp_entries().into_iter().map(|(g, f, gf)| [g, f, gf]).collect();
    CategoryJson { objects: c.objects().to_vec(), morphisms, identities, comp }
}

/// Parses and validates, including that every composable pair is listed.
pub fn category_from_json(j: &CategoryJson) -> Result<FinCategory> {
    let mors = j.morphisms.iter().map(|m| (m.id.clone(), m.src.clone(), m.tgt.clone())).collect();
    let ids: Vec<(String, String)> = j.identities.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
    let comp: Vec<(String, String, String)> = j.comp.iter().map(|[g, f, gf]| (g.clone(), f.clone(), gf.clone())).collect();
    let c = FinCategory::from_tables(j.objects.clone(), mors, &ids, &comp)?;
    invalid(c.validate().iter().map(|v| v.to_string()).collect())?;
    Ok(c)
}

pub fn functor_to_json(f: &Functor) -> FunctorJson {
    let (s, t) = (f.src(), f.tgt());
    FunctorJson {
        omap: (0..s.object_count()).map(|o| (s.objects()[o].clone(), t.objects()[f.obj(o)].clone())).collect(),
        mmap: (0..s.morphism_count())
            .map(|m| (s.morphisms()[m].id.clone(), t.morphisms()[f.mor(m)].id.clone()))
            .collect(),
    }
}

pub fn functor_from_json(src: &Arc<FinCategory>, tgt: &Arc<FinCategory>, j: &FunctorJson) -> Result<Functor> {
    let omap = src
        .objects()
        .iter()
        .map(|o| {
            let v = j.omap.get(o).ok_or_else(|| schema(format!("functor: no image for object {o}")))?;
            tgt.object_index(v).ok_or_else(|| schema(format!("functor: unknown target object {v}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mmap = src
        .morphisms()
        .iter()
        .map(|m| {
            let v = j.mmap.get(&m.id).ok_or_else(|| schema(format!("functor: no image for morphism {}", m.id)))?;
            tgt.morphism_index(v).ok_or_else(|| schema(format!("functor: unknown target morphism {v}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if j.omap.len() != omap.len() || j.mmap.len() != mmap.len() {
        return Err(schema("functor: entries for unknown source ids"));
    }
    Functor::new(src.clone(), tgt.clone(), omap, mmap)
}

// diagrams

pub fn diagram_to_json(d: &DiagramInCat) -> DiagramJson {
    let b = d.base();
    DiagramJson {
        base: category_to_json(b),
        fibers: (0..b.object_count()).map(|o| (b.objects()[o].clone(), category_to_json(d.fiber(o)))).collect(),
        fiber_maps: (0..b.morphism_count())
            .map(|m| (b.morphisms()[m].id.clone(), functor_to_json(d.fiber_map(m))))
            .collect(),
    }
}

pub fn diagram_from_json(j: &DiagramJson) -> Result<DiagramInCat> {
    let base = Arc::new(category_from_json(&j.base)?);
    let fibers = base
        .objects()
        .iter()
        .map(|o| {
            let c = j.fibers.get(o).ok_or_else(|| schema(format!("diagram: no fiber for object {o}")))?;
            Ok(Arc::new(category_from_json(c)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let maps = base
        .morphisms()
        .iter()
        .map(|m| {
            let f = j.fiber_maps.get(&m.id).ok_or_else(|| schema(format!("diagram: no fiber map for {}", m.id)))?;
            functor_from_json(&fibers[m.src], &fibers[m.tgt], f)
        })
        .collect::<Result<Vec<_>>>()?;
    if j.fibers.len() != fibers.len() || j.fiber_maps.len() != maps.len() {
        return Err(schema("diagram: entries for unknown base ids"));
    }
    let d = DiagramInCat::new(base, fibers, maps)?;
    invalid(d.validate())?;
    Ok(d)
}

fn morphism_data_to_json(m: &DiagramMorphism) -> MorphismDataJson {
    let b = m.src().base();
    MorphismDataJson {
        base: functor_to_json(m.base()),
        rho: (0..b.object_count()).map(|o| (b.objects()[o].clone(), functor_to_json(m.rho(o)))).collect(),
    }
}

fn morphism_data_from_json(src: &Arc<DiagramInCat>, tgt: &Arc<DiagramInCat>, j: &MorphismDataJson) -> Result<DiagramMorphism> {
    let base = functor_from_json(src.base(), tgt.base(), &j.base)?;
    let rho = src
        .base()
        .objects()
        .iter()
        .enumerate()
        .map(|(o, name)| {
            let r = j.rho.get(name).ok_or_else(|| schema(format!("morphism: no rho at {name}")))?;
            functor_from_json(tgt.fiber(base.obj(o)), src.fiber(o), r)
        })
        .collect::<Result<Vec<_>>>()?;
    DiagramMorphism::new(src.clone(), tgt.clone(), base, rho)
}

pub fn club_to_json(c: &ClubStructure) -> ClubJson {
    ClubJson {
        carrier: diagram_to_json(&c.carrier),
        fiber_cap: c.fiber_cap,
        mu: morphism_data_to_json(&c.mu),
        eta: morphism_data_to_json(&c.eta),
    }
}

pub fn club_from_json(j: &ClubJson, guard: &Guardrails) -> Result<ClubStructure> {
    let carrier = Arc::new(diagram_from_json(&j.carrier)?);
    let cc = club_square(&carrier, guard, j.fiber_cap)?;
    let mu = morphism_data_from_json(cc.diagram(), &carrier, &j.mu)?;
    let eta = morphism_data_from_json(&Arc::new(unit_diagram()), &carrier, &j.eta)?;
    Ok(ClubStructure { carrier, mu, eta, fiber_cap: j.fiber_cap })
}

// simplicial sets

fn simplex_to_json(s: &SimplicialSet, x: &Simplex) -> SimplexJson {
    SimplexJson { eta: x.eta.values().to_vec(), base: s.names(x.base_dim())[x.base].clone() }
}

fn simplex_from_json(s: &SimplicialSet, j: &SimplexJson) -> Result<Simplex> {
    let (k, b) = s.find(&j.base).ok_or_else(|| schema(format!("unknown simplex {}", j.base)))?;
    let eta = MonotoneMap::new(j.eta.clone(), k)?;
    if !eta.is_surjective() {
        return Err(schema(format!("operator on {} is not a degeneracy", j.base)));
    }
    Ok(Simplex { eta, base: b })
}

pub fn sset_to_json(s: &SimplicialSet) -> SSetJson {
    let nondeg = (0..=s.trunc()).map(|k| (k.to_string(), s.names(k).to_vec())).collect();
    let mut faces = BTreeMap::new();
    for k in 1..=s.trunc() {
        for (x, name) in s.names(k).iter().enumerate() {
            faces.insert(name.clone(), (0..=k).map(|i| simplex_to_json(s, s.stored_face(k, x, i))).collect());
        }
    }
    SSetJson { trunc: s.trunc(), nondeg, faces }
}

pub fn sset_from_json(j: &SSetJson) -> Result<SimplicialSet> {
    let mut names = vec![Vec::new(); j.trunc + 1];
    for (k, list) in &j.nondeg {
        let k: usize = k.parse().map_err(|_| schema(format!("bad dimension key {k}")))?;
        if k > j.trunc {
            return Err(schema(format!("dimension {k} above truncation {}", j.trunc)));
        }
        names[k] = list.clone();
    }
    let mut all = std::collections::HashSet::new();
    for n in names.iter().flatten() {
        if !all.insert(n) {
            return Err(schema(format!("duplicate simplex id {n}")));
        }
    }
    let mut faces: Vec<Vec<Vec<Simplex>>> = vec![Vec::new(); j.trunc + 1];
    faces[0] = vec![Vec::new(); names[0].len()];
    for k in 1..=j.trunc {
        for name in &names[k] {
            let fs = j.faces.get(name).ok_or_else(|| schema(format!("no faces for {name}")))?;
            if fs.len() != k + 1 {
                return Err(schema(format!("{name} needs {} faces", k + 1)));
            }
            let resolved = fs
                .iter()
                .map(|f| {
                    let dim = names.iter().position(|l| l.contains(&f.base)).ok_or_else(|| schema(format!("unknown simplex {}", f.base)))?;
                    let base = names[dim].iter().position(|n| *n == f.base).unwrap();
                    let eta = MonotoneMap::new(f.eta.clone(), dim)?;
                    if f.eta.len() != k || !eta.is_surjective() {
                        return Err(schema(format!("face of {name} with a bad operator")));
                    }
                    Ok(Simplex { eta, base })
                })
                .collect::<Result<Vec<_>>>()?;
            faces[k].push(resolved);
        }
    }
    let face_count: usize = names[1..].iter().map(Vec::len).sum();
    if j.faces.len() != face_count {
        return Err(schema("faces listed for unknown simplices"));
    }
    SimplicialSet::new(j.trunc, names, faces)
}

pub fn smap_to_json(f: &SimplicialMap) -> SMapJson {
    let (s, t) = (f.src(), f.tgt());
    let mut images = BTreeMap::new();
    for k in 0..=s.trunc() {
        for (x, name) in s.names(k).iter().enumerate() {
            images.insert(name.clone(), simplex_to_json(t, f.image(k, x)));
        }
    }
    SMapJson { images }
}

pub fn smap_from_json(src: &Arc<SimplicialSet>, tgt: &Arc<SimplicialSet>, j: &SMapJson) -> Result<SimplicialMap> {
    let images = (0..=src.trunc())
        .map(|k| {
            src.names(k)
                .iter()
                .map(|n| simplex_from_json(tgt, j.images.get(n).ok_or_else(|| schema(format!("map: no image for {n}")))?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if j.images.len() != src.nondeg_counts().iter().sum::<usize>() {
        return Err(schema("map: images for unknown simplices"));
    }
    SimplicialMap::new(src.clone(), tgt.clone(), images)
}

fn face_key(i: usize, name: &str) -> String {
    format!("d{i}@{name}")
}

pub fn club_object_to_json(x: &SimplexFamily) -> ClubObjectJson {
    let b = x.base();
    let mut fibers = BTreeMap::new();
    let mut fiber_maps = BTreeMap::new();
    for k in 0..=b.trunc() {
        for (y, name) in b.names(k).iter().enumerate() {
            fibers.insert(name.clone(), sset_to_json(x.value_nd(k, y)));
            if k > 0 {
                for i in 0..=k {
                    fiber_maps.insert(face_key(i, name), smap_to_json(x.face_map(k, y, i)));
                }
            }
        }
    }
    ClubObjectJson { base: sset_to_json(b), fibers, fiber_maps }
}

pub fn club_object_from_json(j: &ClubObjectJson) -> Result<SimplexFamily> {
    let base = Arc::new(sset_from_json(&j.base)?);
    let values: Vec<Vec<Arc<SimplicialSet>>> = (0..=base.trunc())
        .map(|k| {
            base.names(k)
                .iter()
                .map(|n| Ok(Arc::new(sset_from_json(j.fibers.get(n).ok_or_else(|| schema(format!("no fiber over {n}")))?)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let value_of = |s: &Simplex| values[s.base_dim()][s.base].clone();
    let faces = (0..=base.trunc())
        .map(|k| {
            base.names(k)
                .iter()
                .enumerate()
                .map(|(y, n)| {
                    if k == 0 {
                        return Ok(Vec::new());
                    }
                    (0..=k)
                        .map(|i| {
                            let key = face_key(i, n);
                            let m = j.fiber_maps.get(&key).ok_or_else(|| schema(format!("no fiber map {key}")))?;
                            smap_from_json(&values[k][y], &value_of(base.stored_face(k, y, i)), m)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SimplexFamily::new(base, values, faces)
}

// operads

fn perm_key(p: &[usize]) -> String {
    let v: Vec<String> = p.iter().map(usize::to_string).collect();
    format!("[{}]", v.join(","))
}

pub fn operad_to_json(op: &NsOperad, actions: Option<&SigmaCollection>) -> OperadJson {
    let c = op.collection();
    let levels = (0..=c.cap()).map(|n| (n.to_string(), c.level(n).to_vec())).collect();
    let gamma = op
        .gamma()
        .iter()
        .map(|(t, &r)| GammaJson {
            op: c.name(t[0]).to_string(),
            args: t[1..].iter().map(|&g| c.name(g).to_string()).collect(),
            result: c.name(r).to_string(),
        })
        .collect();
    let actions = actions.map(|s| {
        (2..=c.cap())
            .map(|n| {
                let by_perm = permutations(n)
                    .iter()
                    .enumerate()
                    .map(|(pi, p)| {
                        let m = c.level(n).iter().enumerate().map(|(i, e)| (e.clone(), c.level(n)[s.actions[n][pi][i]].clone()));
                        (perm_key(p), m.collect())
                    })
                    .collect();
                (n.to_string(), by_perm)
            })
            .collect()
    });
    OperadJson { cap: c.cap(), levels, unit: c.name(op.unit()).to_string(), gamma, actions }
}

/// Parses an operad; with `"actions"` present the result is symmetric.
pub fn operad_from_json(j: &OperadJson) -> Result<Document> {
    let mut levels = vec![Vec::new(); j.cap + 1];
    for (k, l) in &j.levels {
        let k: usize = k.parse().map_err(|_| schema(format!("bad arity key {k}")))?;
        if k > j.cap {
            return Err(schema(format!("arity {k} above cap {}", j.cap)));
        }
        levels[k] = l.clone();
    }
    let c = Collection::new(levels)?;
    let id = |n: &str| c.find(n).ok_or_else(|| schema(format!("unknown operation {n}")));
    let mut gamma = BTreeMap::new();
    for g in &j.gamma {
        let mut t = vec![id(&g.op)?];
        for a in &g.args {
            t.push(id(a)?);
        }
        if gamma.insert(t, id(&g.result)?).is_some() {
            return Err(schema(format!("gamma listed twice for {}", g.op)));
        }
    }
    let op = NsOperad::new(c.clone(), id(&j.unit)?, gamma)?;
    let Some(acts) = &j.actions else {
        return Ok(Document::Operad(op));
    };
    let mut sigma = SigmaCollection::trivial(c.clone());
    for (k, by_perm) in acts {
        let n: usize = k.parse().map_err(|_| schema(format!("bad arity key {k}")))?;
        if n > j.cap {
            return Err(schema(format!("action in arity {n} above cap")));
        }
        let perms = permutations(n);
        for (pk, m) in by_perm {
            let pi = perms.iter().position(|p| perm_key(p) == *pk).ok_or_else(|| schema(format!("bad permutation {pk}")))?;
            for (e, img) in m {
                let from = c.level(n).iter().position(|x| x == e).ok_or_else(|| schema(format!("{e} is not of arity {n}")))?;
                let to = c.level(n).iter().position(|x| x == img).ok_or_else(|| schema(format!("{img} is not of arity {n}")))?;
                sigma.actions[n][pi][from] = to;
            }
        }
    }
    invalid(sigma.validate())?;
    Ok(Document::SymOperad(SymOperad::new(sigma, op)?))
}

// algebra objects over finite sets

pub fn algebra_to_json(x: &AlgebraObject) -> Result<AlgebraObjectJson> {
    let s = &*x.shape;
    let mut sizes = BTreeMap::new();
    let mut faces = BTreeMap::new();
    for k in 0..=s.trunc() {
        for (y, name) in s.names(k).iter().enumerate() {
            let v = Simplex::nondegenerate(k, y);
            sizes.insert(name.clone(), x.value(&v));
            if k > 0 {
                for i in 0..=k {
                    let f = (0..x.value(&v)).map(|e| x.act(&v, &MonotoneMap::face(k, i), e)).collect();
                    faces.insert(face_key(i, name), f);
                }
            }
        }
    }
    Ok(AlgebraObjectJson { shape: sset_to_json(s), sizes, faces })
}

pub fn algebra_from_json(j: &AlgebraObjectJson) -> Result<AlgebraObject> {
    let shape = Arc::new(sset_from_json(&j.shape)?);
    let sizes: Vec<Vec<usize>> = (0..=shape.trunc())
        .map(|k| {
            shape
                .names(k)
                .iter()
                .map(|n| j.sizes.get(n).copied().ok_or_else(|| schema(format!("no size for {n}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let faces = (0..=shape.trunc())
        .map(|k| {
            shape
                .names(k)
                .iter()
                .enumerate()
                .map(|(y, n)| {
                    if k == 0 {
                        return Ok(Vec::new());
                    }
                    (0..=k)
                        .map(|i| {
                            let key = face_key(i, n);
                            let f = j.faces.get(&key).ok_or_else(|| schema(format!("no face function {key}")))?;
                            let face = shape.stored_face(k, y, i);
                            let n_tgt = sizes[face.base_dim()][face.base];
                            if f.len() != sizes[k][y] || f.iter().any(|&v| v >= n_tgt) {
                                return Err(schema(format!("face function {key} has the wrong shape")));
                            }
                            Ok(f.clone())
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraObject::from_set_family(shape, &sizes, &faces)
}

pub fn algebra_morphism_to_json(m: &AlgebraMorphism) -> Result<AlgebraMorphismJson> {
    let s = &*m.src.shape;
    let mut phi = BTreeMap::new();
    for k in 0..=s.trunc() {
        for (y, name) in s.names(k).iter().enumerate() {
            let o = m.src.cat.object_of(&Simplex::nondegenerate(k, y)).expect("simplex within truncation");
            phi.insert(name.clone(), m.phi[o].clone());
        }
    }
    Ok(AlgebraMorphismJson {
        src: algebra_to_json(&m.src)?,
        tgt: algebra_to_json(&m.tgt)?,
        images: smap_to_json(&m.f).images,
        phi,
    })
}

pub fn algebra_morphism_from_json(j: &AlgebraMorphismJson) -> Result<AlgebraMorphism> {
    let src = Arc::new(algebra_from_json(&j.src)?);
    let tgt = Arc::new(algebra_from_json(&j.tgt)?);
    let f = smap_from_json(&src.shape, &tgt.shape, &SMapJson { images: j.images.clone() })?;
    let phi = src
        .cat
        .objects
        .iter()
        .map(|x| {
            let name = &src.shape.names(x.base_dim())[x.base];
            j.phi.get(name).cloned().ok_or_else(|| schema(format!("no component at {name}")))
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraMorphism::new(src, tgt, f, phi)
}

// documents

pub fn document_to_value(d: &Document) -> Result<Value> {
    match d {
        Document::Category(c) => envelope("category", &category_to_json(c)),
        Document::Diagram(x) => envelope("diagram", &diagram_to_json(x)),
        Document::Club(c) => envelope("club", &club_to_json(c)),
        Document::SSet(s) => envelope("sset", &sset_to_json(s)),
        Document::Map(f) => envelope(
            "map",
            &MapFileJson { src: sset_to_json(f.src()), tgt: sset_to_json(f.tgt()), images: smap_to_json(f).images },
        ),
        Document::ClubObject(x) => envelope("club-object", &club_object_to_json(x)),
        Document::Operad(op) => envelope("operad", &operad_to_json(op, None)),
        Document::SymOperad(op) => envelope("operad", &operad_to_json(&op.operad, Some(&op.sigma))),
        Document::Algebra(x) => envelope("algebra-object", &algebra_to_json(x)?),
        Document::AlgebraMorphism(m) => envelope("algebra-morphism", &algebra_morphism_to_json(m)?),
    }
}

pub fn document_from_value(v: Value, guard: &Guardrails) -> Result<Document> {
    let (kind, body) = open_envelope(v)?;
    Ok(match kind.as_str() {
        "category" => Document::Category(category_from_json(&serde_json::from_value(body)?)?),
        "diagram" => Document::Diagram(diagram_from_json(&serde_json::from_value(body)?)?),
        "club" => Document::Club(club_from_json(&serde_json::from_value(body)?, guard)?),
        "sset" => Document::SSet(sset_from_json(&serde_json::from_value(body)?)?),
        "map" => {
            let j: MapFileJson = serde_json::from_value(body)?;
            let src = Arc::new(sset_from_json(&j.src)?);
            let tgt = Arc::new(sset_from_json(&j.tgt)?);
            Document::Map(smap_from_json(&src, &tgt, &SMapJson { images: j.images })?)
        }
        "club-object" => Document::ClubObject(club_object_from_json(&serde_json::from_value(body)?)?),
        "operad" => operad_from_json(&serde_json::from_value(body)?)?,
        "algebra-object" => Document::Algebra(algebra_from_json(&serde_json::from_value(body)?)?),
        "algebra-morphism" => Document::AlgebraMorphism(algebra_morphism_from_json(&serde_json::from_value(body)?)?),
        other => return Err(schema(format!("unknown kind {other}"))),
    })
}

pub fn parse_str(s: &str, guard: &Guardrails) -> Result<Document> {
    document_from_value(serde_json::from_str(s)?, guard)
}

pub fn read_document(path: &Path, guard: &Guardrails) -> Result<Document> {
    let s = std::fs::read_to_string(path)?;
    parse_str(&s, guard)
}

pub fn serialize(d: &Document) -> Result<String> {
    Ok(to_pretty(&document_to_value(d)?))
}

pub fn write_document(path: &Path, d: &Document) -> Result<()> {
    std::fs::write(path, serialize(d)?)?;
    Ok(())
}
