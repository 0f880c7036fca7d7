//! Truncated, finitely generated simplicial sets in Eilenberg–Zilber normal
//! form.
//!
//! Only non-degenerate simplices are stored, each with its faces. A general
//! simplex is a pair `(eta, y)` with `eta: [k] ->> [j]` a surjection and `y`
//! a non-degenerate `j`-simplex, standing for `eta^*(y)`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap as HashMap;

use crate::error::{Error, Result};
use crate::fincat::{FinCategory, Functor, Morphism};

/// Default truncation level.
pub const DEFAULT_TRUNC: usize = 3;

/// A monotone map `[m] -> [n]` given by its values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonotoneMap {
    values: Vec<usize>,
    cod: usize,
}

impl MonotoneMap {
    pub fn new(values: Vec<usize>, cod: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("monotone map needs at least one value".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) || values.iter().any(|&v| v > cod) {
            return Err(Error::Invalid(format!("{values:?} is not a monotone map into [{cod}]")));
        }
        Ok(Self { values, cod })
    }

    pub(crate) fn raw(values: Vec<usize>, cod: usize) -> Self {
        Self { values, cod }
    }

    pub fn identity(n: usize) -> Self {
        Self { values: (0..=n).collect(), cod: n }
    }

    /// The coface `[n-1] -> [n]` missing `i`.
    pub fn face(n: usize, i: usize) -> Self {
        Self { values: (0..n).map(|x| if x < i { x } else { x + 1 }).collect(), cod: n }
    }

    /// The codegeneracy `[n+1] -> [n]` hitting `i` twice.
    pub fn degeneracy(n: usize, i: usize) -> Self {
        Self { values: (0..=n + 1).map(|x| if x <= i { x } else { x - 1 }).collect(), cod: n }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn dom(&self) -> usize {
        self.values.len() - 1
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    /// `self o inner`.
    pub fn after(&self, inner: &MonotoneMap) -> MonotoneMap {
        debug_assert_eq!(inner.cod, self.dom());
        Self { values: inner.values.iter().map(|&x| self.values[x]).collect(), cod: self.cod }
    }

    pub fn is_injective(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        self.values[0] == 0
            && *self.values.last().unwrap() == self.cod
            && self.values.windows(2).all(|w| w[1] <= w[0] + 1)
    }

    pub fn is_identity(&self) -> bool {
        self.dom() == self.cod && self.is_injective()
    }
}

impl fmt::Display for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.values.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
    }
}

/// All monotone maps `[m] -> [n]` in lexicographic order.
pub fn monotone_maps(m: usize, n: usize) -> Vec<MonotoneMap> {
    let mut out = Vec::new();
    let mut values = vec![0usize; m + 1];
    fn go(i: usize, lo: usize, n: usize, values: &mut Vec<usize>, out: &mut Vec<MonotoneMap>) {
        if i == values.len() {
            out.push(MonotoneMap { values: values.clone(), cod: n });
            return;
        }
        for v in lo..=n {
            values[i] = v;
            go(i + 1, v, n, values, out);
        }
    }
    go(0, 0, n, &mut values, &mut out);
    out
}

/// All surjections `[k] ->> [j]` in lexicographic order.
pub fn surjections(k: usize, j: usize) -> Vec<MonotoneMap> {
    if j > k {
        return Vec::new();
    }
    monotone_maps(k, j).into_iter().filter(MonotoneMap::is_surjective).collect()
}

/// Epi-mono factorization `theta = delta o sigma`.
pub fn ez_factor(theta: &MonotoneMap) -> (MonotoneMap, MonotoneMap) {
    let mut image: Vec<usize> = theta.values.clone();
    image.dedup();
    let j = image.len() - 1;
    let sigma = theta.values.iter().map(|v| image.binary_search(v).unwrap()).collect();
    (MonotoneMap { values: image, cod: theta.cod }, MonotoneMap { values: sigma, cod: j })
}

/// `eta^*(y)` for a surjection `eta` and a non-degenerate simplex index `y`
/// in dimension `eta.cod()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Simplex {
    pub eta: MonotoneMap,
    pub base: usize,
}

impl Simplex {
    /// The non-degenerate simplex `base` of dimension `dim`.
    pub fn nondegenerate(dim: usize, base: usize) -> Self {
        Self { eta: MonotoneMap::identity(dim), base }
    }

    pub fn dim(&self) -> usize {
        self.eta.dom()
    }

    pub fn base_dim(&self) -> usize {
        self.eta.cod()
    }

    pub fn is_degenerate(&self) -> bool {
        self.dim() != self.base_dim()
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.dim(), self.base_dim(), self.base, &self.eta.values).cmp(&(
            other.dim(),
            other.base_dim(),
            other.base,
            &other.eta.values,
        ))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A simplicial set truncated at `trunc`, stored by its non-degenerate
/// simplices and their faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialSet {
    trunc: usize,
    names: Vec<Vec<String>>,
    /// `faces[k][x][i]` is `d_i` of the non-degenerate `k`-simplex `x`.
    faces: Vec<Vec<Vec<Simplex>>>,
}

impl SimplicialSet {
    /// Checked constructor: shapes, normal forms and the simplicial identities.
    pub fn new(trunc: usize, mut names: Vec<Vec<String>>, mut faces: Vec<Vec<Vec<Simplex>>>) -> Result<Self> {
        if names.len() > trunc + 1 {
            return Err(Error::Truncation(format!(
                "non-degenerate simplices in dimension {} exceed truncation {trunc}",
                names.len() - 1
            )));
        }
        names.resize(trunc + 1, Vec::new());
        faces.resize(trunc + 1, Vec::new());
        let s = Self { trunc, names, faces };
        let problems = s.shape_problems();
        if !problems.is_empty() {
            return Err(Error::Schema(problems.join("; ")));
        }
        let problems = s.validate();
        if problems.is_empty() {
            Ok(s)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    pub(crate) fn from_parts(trunc: usize, names: Vec<Vec<String>>, faces: Vec<Vec<Vec<Simplex>>>) -> Self {
        Self { trunc, names, faces }
    }

    fn shape_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashMap::default();
        for (k, level) in self.names.iter().enumerate() {
            for n in level {
                if seen.insert(n.clone(), k).is_some() {
                    out.push(format!("duplicate simplex id {n}"));
                }
            }
            let fk = &self.faces[k];
            if k == 0 {
                if fk.iter().any(|f| !f.is_empty()) {
                    out.push("vertices have no faces".into());
                }
                continue;
            }
            if fk.len() != level.len() {
                out.push(format!("dimension {k}: faces missing"));
                continue;
            }
            for (x, f) in fk.iter().enumerate() {
                if f.len() != k + 1 {
                    out.push(format!("{} needs {} faces", level[x], k + 1));
                    continue;
                }
                for (i, nf) in f.iter().enumerate() {
                    let ok = nf.dim() == k - 1
                        && nf.eta.is_surjective()
                        && nf.base < self.names.get(nf.base_dim()).map_or(0, Vec::len);
                    if !ok {
                        out.push(format!("face {i} of {} is not a normal form of a known simplex", level[x]));
                    }
                }
            }
        }
        if self.faces[0].len() != self.names[0].len() && !self.faces[0].is_empty() {
            out.push("vertex face table has the wrong length".into());
        }
        out
    }

    /// The simplicial identities `d_i d_j = d_{j-1} d_i` (i < j) on every
    /// stored simplex, reported by simplex id.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for k in 2..=self.trunc {
            for x in 0..self.names[k].len() {
                for j in 0..=k {
                    for i in 0..j {
                        let l = self.apply_face(&self.faces[k][x][j], i);
                        let r = self.apply_face(&self.faces[k][x][i], j - 1);
                        if l != r {
                            out.push(format!("d{i} d{j} != d{} d{i} at {}", j - 1, self.names[k][x]));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Non-degenerate simplex ids of dimension `k`.
    pub fn names(&self, k: usize) -> &[String] {
        self.names.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn nondeg_count(&self, k: usize) -> usize {
        self.names(k).len()
    }

    /// Non-degenerate counts per dimension `0..=trunc`.
    pub fn nondeg_counts(&self) -> Vec<usize> {
        (0..=self.trunc).map(|k| self.nondeg_count(k)).collect()
    }

    /// `(dimension, index)` of a non-degenerate simplex id.
    pub fn find(&self, name: &str) -> Option<(usize, usize)> {
        self.names.iter().enumerate().find_map(|(k, l)| l.iter().position(|n| n == name).map(|i| (k, i)))
    }

    /// Stored face `d_i` of the non-degenerate `k`-simplex `x`.
    pub fn stored_face(&self, k: usize, x: usize, i: usize) -> &Simplex {
        &self.faces[k][x][i]
    }

    /// `theta^*(x)` in normal form for `theta: [m] -> [dim x]`.
    pub fn apply(&self, x: &Simplex, theta: &MonotoneMap) -> Result<Simplex> {
        if theta.cod() != x.dim() {
            return Err(Error::Mismatch(format!("operator into [{}] applied to a {}-simplex", theta.cod(), x.dim())));
        }
        if theta.dom() > self.trunc {
            return Err(Error::Truncation(format!(
                "operator from [{}] exceeds truncation {}",
                theta.dom(),
                self.trunc
            )));
        }
        Ok(self.apply_unchecked(x, theta))
    }

    pub(crate) fn apply_unchecked(&self, x: &Simplex, theta: &MonotoneMap) -> Simplex {
        let (delta, sigma) = ez_factor(&x.eta.after(theta));
        let y = self.inject(x.base_dim(), x.base, &delta);
        Simplex { eta: y.eta.after(&sigma), base: y.base }
    }

    /// `delta^*(y)` for an injective `delta` into a non-degenerate `y`,
    /// peeling off the largest missing index through the stored faces.
    fn inject(&self, dim: usize, y: usize, delta: &MonotoneMap) -> Simplex {
        if delta.dom() == dim {
            return Simplex::nondegenerate(dim, y);
        }
        let missing = (0..=dim).rev().find(|v| delta.values.binary_search(v).is_err()).unwrap();
        let rest = MonotoneMap {
            values: delta.values.iter().map(|&v| if v < missing { v } else { v - 1 }).collect(),
            cod: dim - 1,
        };
        self.apply_unchecked(&self.faces[dim][y][missing], &rest)
    }

    /// The stored faces visited when computing `theta^*(x)`, as
    /// `(dimension, simplex, face index)` steps in order. Degeneracies
    /// contribute no steps.
    pub fn face_chain(&self, x: &Simplex, theta: &MonotoneMap) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        self.chain_into(x, theta, &mut out);
        out
    }

    fn chain_into(&self, x: &Simplex, theta: &MonotoneMap, out: &mut Vec<(usize, usize, usize)>) {
        let (delta, _) = ez_factor(&x.eta.after(theta));
        let dim = x.base_dim();
        if delta.dom() == dim {
            return;
        }
        let missing = (0..=dim).rev().find(|v| delta.values.binary_search(v).is_err()).unwrap();
        let rest = MonotoneMap {
            values: delta.values.iter().map(|&v| if v < missing { v } else { v - 1 }).collect(),
            cod: dim - 1,
        };
        out.push((dim, x.base, missing));
        self.chain_into(&self.faces[dim][x.base][missing], &rest, out);
    }

    /// `d_i x`.
    pub fn apply_face(&self, x: &Simplex, i: usize) -> Simplex {
        self.apply_unchecked(x, &MonotoneMap::face(x.dim(), i))
    }

    /// `s_i x`; fails at the truncation level.
    pub fn degeneracy(&self, x: &Simplex, i: usize) -> Result<Simplex> {
        self.apply(x, &MonotoneMap::degeneracy(x.dim(), i))
    }

    /// Every simplex of dimension `k` in canonical order.
    pub fn simplices(&self, k: usize) -> Vec<Simplex> {
        let mut out = Vec::new();
        for j in 0..=k.min(self.trunc) {
            let surj = surjections(k, j);
            for base in 0..self.nondeg_count(j) {
                for eta in &surj {
                    out.push(Simplex { eta: eta.clone(), base });
                }
            }
        }
        out
    }

    /// Canonical string for a simplex: its id when non-degenerate, else
    /// `s[eta]id`.
    pub fn label(&self, x: &Simplex) -> String {
        let name = &self.names[x.base_dim()][x.base];
        if x.is_degenerate() {
            format!("s{}{}", x.eta, name)
        } else {
            name.clone()
        }
    }

    /// The same data cut down to dimension `trunc`.
    pub fn truncated(&self, trunc: usize) -> Self {
        let keep = trunc.min(self.trunc) + 1;
        let mut names = self.names[..keep].to_vec();
        let mut faces = self.faces[..keep].to_vec();
        names.resize(trunc + 1, Vec::new());
        faces.resize(trunc + 1, Vec::new());
        Self { trunc, names, faces }
    }
}

/// `Delta[n]` truncated at `trunc`; simplex ids are vertex lists `[0,1,2]`.
pub fn standard_simplex(n: usize, trunc: usize) -> SimplicialSet {
    simplex_subcomplex(n, trunc, |_| true)
}

/// `Delta[0]`.
pub fn one_point(trunc: usize) -> SimplicialSet {
    standard_simplex(0, trunc)
}

/// The boundary of `Delta[n]`.
pub fn boundary(n: usize, trunc: usize) -> SimplicialSet {
    simplex_subcomplex(n, trunc, |s| s.len() <= n)
}

/// The horn `Lambda[n, k]`: the boundary without the face opposite `k`.
pub fn horn(n: usize, k: usize, trunc: usize) -> SimplicialSet {
    simplex_subcomplex(n, trunc, |s| s.len() <= n && !(s.len() == n && !s.contains(&k)))
}

fn vertex_list(s: &[usize]) -> String {
    format!("[{}]", s.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
}

/// The subcomplex of `Delta[n]` on the vertex lists accepted by `keep`
/// (which must be closed under taking faces).
pub fn simplex_subcomplex(n: usize, trunc: usize, keep: impl Fn(&[usize]) -> bool) -> SimplicialSet {
    let mut lists: Vec<Vec<Vec<usize>>> = vec![Vec::new(); trunc + 1];
    for k in 0..=n.min(trunc) {
        lists[k] = monotone_maps(k, n)
            .into_iter()
            .filter(MonotoneMap::is_injective)
            .map(|m| m.values)
            .filter(|s| keep(s))
            .collect();
    }
    let names = lists.iter().map(|l| l.iter().map(|s| vertex_list(s)).collect()).collect();
    let faces = (0..=trunc)
        .map(|k| {
            if k == 0 {
                return vec![Vec::new(); lists[0].len()];
            }
            lists[k]
                .iter()
                .map(|s| {
                    (0..=k)
                        .map(|i| {
                            let mut f = s.clone();
                            f.remove(i);
                            Simplex::nondegenerate(k - 1, lists[k - 1].iter().position(|t| *t == f).unwrap())
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    SimplicialSet::from_parts(trunc, names, faces)
}

/// Disjoint union; ids become `inl(x)` and `inr(x)`.
pub fn disjoint_union(s: &SimplicialSet, t: &SimplicialSet) -> SimplicialSet {
    let trunc = s.trunc.min(t.trunc);
    let mut names = Vec::new();
    let mut faces = Vec::new();
    for k in 0..=trunc {
        names.push(
            s.names(k).iter().map(|n| format!("inl({n})")).chain(t.names(k).iter().map(|n| format!("inr({n})"))).collect(),
        );
        let shift = |f: &Simplex| {
            let off = s.nondeg_count(f.base_dim());
            Simplex { eta: f.eta.clone(), base: f.base + off }
        };
        let mut level: Vec<Vec<Simplex>> = s.faces[k].clone();
        level.extend(t.faces[k].iter().map(|fs| fs.iter().map(shift).collect()));
        faces.push(level);
    }
    SimplicialSet::from_parts(trunc, names, faces)
}

/// The finest surjection through which both `a` and `b` factor, and the
/// two factors.
fn common_flats(a: &MonotoneMap, b: &MonotoneMap) -> (MonotoneMap, MonotoneMap, MonotoneMap) {
    let k = a.dom();
    let mut eps = vec![0usize; k + 1];
    for x in 1..=k {
        let flat = a.values[x] == a.values[x - 1] && b.values[x] == b.values[x - 1];
        eps[x] = eps[x - 1] + usize::from(!flat);
    }
    let r = eps[k];
    let mut fa = vec![0usize; r + 1];
    let mut fb = vec![0usize; r + 1];
    for x in 0..=k {
        fa[eps[x]] = a.values[x];
        fb[eps[x]] = b.values[x];
    }
    (MonotoneMap { values: eps, cod: r }, MonotoneMap { values: fa, cod: a.cod }, MonotoneMap { values: fb, cod: b.cod })
}

/// Product computed by pair normalization: a pair `(eta_1^* y, eta_2^* z)`
/// is `eps^*` of a non-degenerate pair, `eps` the common flats of `eta_1, eta_2`.
pub fn product(s: &SimplicialSet, t: &SimplicialSet) -> SimplicialSet {
    let trunc = s.trunc.min(t.trunc);
    let mut pairs: Vec<Vec<(Simplex, Simplex)>> = Vec::new();
    let mut index: Vec<HashMap<(Simplex, Simplex), usize>> = Vec::new();
    for r in 0..=trunc {
        let mut level = Vec::new();
        for a in s.simplices(r) {
            for b in t.simplices(r) {
                let flat = (1..=r).any(|x| {
                    a.eta.values[x] == a.eta.values[x - 1] && b.eta.values[x] == b.eta.values[x - 1]
                });
                if !flat {
                    level.push((a.clone(), b));
                }
            }
        }
        index.push(level.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect());
        pairs.push(level);
    }
    let normalize = |a: &Simplex, b: &Simplex| -> Simplex {
        let (eps, fa, fb) = common_flats(&a.eta, &b.eta);
        let r = eps.cod();
        let key = (Simplex { eta: fa, base: a.base }, Simplex { eta: fb, base: b.base });
        Simplex { eta: eps, base: index[r][&key] }
    };
    let names = pairs
        .iter()
        .map(|l| l.iter().map(|(a, b)| format!("({},{})", s.label(a), t.label(b))).collect())
        .collect();
    let faces = pairs
        .iter()
        .enumerate()
        .map(|(k, l)| {
            l.iter()
                .map(|(a, b)| {
                    if k == 0 {
                        return Vec::new();
                    }
                    (0..=k).map(|i| normalize(&s.apply_face(a, i), &t.apply_face(b, i))).collect()
                })
                .collect()
        })
        .collect();
    SimplicialSet::from_parts(trunc, names, faces)
}

/// A simplicial set given level by level with all face and degeneracy maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Levelwise {
    pub names: Vec<Vec<String>>,
    /// `faces[k][x][i]`, `k >= 1`.
    pub faces: Vec<Vec<Vec<usize>>>,
    /// `degens[k][x][i]`, `k < trunc`.
    pub degens: Vec<Vec<Vec<usize>>>,
}

impl Levelwise {
    pub fn trunc(&self) -> usize {
        self.names.len() - 1
    }

    /// The simplicial identities on the level data.
    pub fn validate(&self) -> Vec<String> {
        let n = self.trunc();
        let mut out = Vec::new();
        let d = |k: usize, x: usize, i: usize| self.faces[k][x][i];
        let s = |k: usize, x: usize, i: usize| self.degens[k][x][i];
        for k in 0..=n {
            for x in 0..self.names[k].len() {
                let name = &self.names[k][x];
                if k >= 2 {
                    for j in 0..=k {
                        for i in 0..j {
                            if d(k - 1, d(k, x, j), i) != d(k - 1, d(k, x, i), j - 1) {
                                out.push(format!("d{i} d{j} at {name}"));
                            }
                        }
                    }
                }
                if k < n {
                    for j in 0..=k {
                        let y = s(k, x, j);
                        for i in 0..=k + 1 {
                            let lhs = d(k + 1, y, i);
                            let ok = if i == j || i == j + 1 {
                                lhs == x
                            } else if i < j {
                                k >= 1 && lhs == s(k - 1, d(k, x, i), j - 1)
                            } else {
                                k >= 1 && lhs == s(k - 1, d(k, x, i - 1), j)
                            };
                            if !ok {
                                out.push(format!("d{i} s{j} at {name}"));
                            }
                        }
                        if k + 1 < n {
                            for i in 0..=j {
                                if s(k + 1, s(k, x, j), i) != s(k + 1, s(k, x, i), j + 1) {
                                    out.push(format!("s{i} s{j} at {name}"));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// All simplices of `s` level by level, in canonical order.
pub fn to_levelwise(s: &SimplicialSet) -> Levelwise {
    let n = s.trunc;
    let levels: Vec<Vec<Simplex>> = (0..=n).map(|k| s.simplices(k)).collect();
    let index: Vec<HashMap<Simplex, usize>> =
        levels.iter().map(|l| l.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect()).collect();
    let names = levels.iter().map(|l| l.iter().map(|x| s.label(x)).collect()).collect();
    let faces = (0..=n)
        .map(|k| {
            levels[k]
                .iter()
                .map(|x| if k == 0 { Vec::new() } else { (0..=k).map(|i| index[k - 1][&s.apply_face(x, i)]).collect() })
                .collect()
        })
        .collect();
    let degens = (0..n)
        .map(|k| {
            levels[k]
                .iter()
                .map(|x| {
                    (0..=k).map(|i| index[k + 1][&s.apply_unchecked(x, &MonotoneMap::degeneracy(k, i))]).collect()
                })
                .collect()
        })
        .collect();
    Levelwise { names, faces, degens }
}

/// Normal-form presentation of a levelwise simplicial set, plus the normal
/// form of every level element. `x` is degenerate iff `x = s_i d_i x` for
/// some `i`.
pub fn from_levelwise(l: &Levelwise) -> (SimplicialSet, Vec<Vec<Simplex>>) {
    let n = l.trunc();
    let mut names: Vec<Vec<String>> = vec![Vec::new(); n + 1];
    let mut faces: Vec<Vec<Vec<Simplex>>> = vec![Vec::new(); n + 1];
    let mut nf: Vec<Vec<Simplex>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut level = Vec::with_capacity(l.names[k].len());
        for x in 0..l.names[k].len() {
            let split = (k >= 1)
                .then(|| (0..k).find(|&i| l.degens[k - 1][l.faces[k][x][i]][i] == x))
                .flatten();
            match split {
                Some(i) => {
                    let y: &Simplex = &nf[k - 1][l.faces[k][x][i]];
                    level.push(Simplex { eta: y.eta.after(&MonotoneMap::degeneracy(k - 1, i)), base: y.base });
                }
                None => {
                    level.push(Simplex::nondegenerate(k, names[k].len()));
                    names[k].push(l.names[k][x].clone());
                    faces[k].push(if k == 0 {
                        Vec::new()
                    } else {
                        (0..=k).map(|i| nf[k - 1][l.faces[k][x][i]].clone()).collect()
                    });
                }
            }
        }
        nf.push(level);
    }
    (SimplicialSet::from_parts(n, names, faces), nf)
}

/// A bisimplicial set truncated at `trunc` in both directions, stored level
/// by level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimplicialSet {
    pub trunc: usize,
    /// `names[m][n]`
    pub names: Vec<Vec<Vec<String>>>,
    /// `hface[m][n][x][i]` into `(m-1, n)`
    pub hface: Vec<Vec<Vec<Vec<usize>>>>,
    /// `hdegen[m][n][x][i]` into `(m+1, n)`
    pub hdegen: Vec<Vec<Vec<Vec<usize>>>>,
    /// `vface[m][n][x][i]` into `(m, n-1)`
    pub vface: Vec<Vec<Vec<Vec<usize>>>>,
    /// `vdegen[m][n][x][i]` into `(m, n+1)`
    pub vdegen: Vec<Vec<Vec<Vec<usize>>>>,
}

impl BisimplicialSet {
    /// The diagonal as level data: `T_k = B_{k,k}`, operators act as `(theta, theta)`.
    pub fn diag_levelwise(&self) -> Levelwise {
        let n = self.trunc;
        let names = (0..=n).map(|k| self.names[k][k].clone()).collect();
        let faces = (0..=n)
            .map(|k| {
                (0..self.names[k][k].len())
                    .map(|x| {
                        if k == 0 {
                            return Vec::new();
                        }
                        (0..=k).map(|i| self.hface[k][k - 1][self.vface[k][k][x][i]][i]).collect()
                    })
                    .collect()
            })
            .collect();
        let degens = (0..n)
            .map(|k| {
                (0..self.names[k][k].len())
                    .map(|x| (0..=k).map(|i| self.hdegen[k][k + 1][self.vdegen[k][k][x][i]][i]).collect())
                    .collect()
            })
            .collect();
        Levelwise { names, faces, degens }
    }

    /// Horizontal and vertical identities and their commutation.
    pub fn validate(&self) -> Vec<String> {
        let n = self.trunc;
        let mut out = Vec::new();
        for m in 0..=n {
            for q in 0..=n {
                let row = Levelwise {
                    names: (0..=n).map(|a| self.names[a][q].clone()).collect(),
                    faces: (0..=n).map(|a| self.hface[a][q].clone()).collect(),
                    degens: (0..n).map(|a| self.hdegen[a][q].clone()).collect(),
                };
                let col = Levelwise {
                    names: (0..=n).map(|b| self.names[m][b].clone()).collect(),
                    faces: (0..=n).map(|b| self.vface[m][b].clone()).collect(),
                    degens: (0..n).map(|b| self.vdegen[m][b].clone()).collect(),
                };
                if m == 0 {
                    out.extend(row.validate().into_iter().map(|e| format!("horizontal at column {q}: {e}")));
                }
                if q == 0 {
                    out.extend(col.validate().into_iter().map(|e| format!("vertical at row {m}: {e}")));
                }
                for x in 0..self.names[m][q].len() {
                    if m >= 1 && q >= 1 {
                        for i in 0..=m {
                            for j in 0..=q {
                                let a = self.vface[m - 1][q][self.hface[m][q][x][i]][j];
                                let b = self.hface[m][q - 1][self.vface[m][q][x][j]][i];
                                if a != b {
                                    out.push(format!("faces do not commute at {}", self.names[m][q][x]));
                                }
                            }
                        }
                    }
                    if m < n && q >= 1 {
                        for i in 0..=m {
                            for j in 0..=q {
                                let a = self.vface[m + 1][q][self.hdegen[m][q][x][i]][j];
                                let b = self.hdegen[m][q - 1][self.vface[m][q][x][j]][i];
                                if a != b {
                                    out.push(format!("hdegen and vface do not commute at {}", self.names[m][q][x]));
                                }
                            }
                        }
                    }
                    if q < n && m >= 1 {
                        for i in 0..=m {
                            for j in 0..=q {
                                let a = self.hface[m][q + 1][self.vdegen[m][q][x][j]][i];
                                let b = self.vdegen[m - 1][q][self.hface[m][q][x][i]][j];
                                if a != b {
                                    out.push(format!("vdegen and hface do not commute at {}", self.names[m][q][x]));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// `diag(B)` in normal form.
pub fn diag(b: &BisimplicialSet) -> SimplicialSet {
    from_levelwise(&b.diag_levelwise()).0
}

/// The external product `B_{m,n} = S_m x T_n`.
pub fn external_product(s: &SimplicialSet, t: &SimplicialSet) -> BisimplicialSet {
    let trunc = s.trunc.min(t.trunc);
    let ls = to_levelwise(&s.truncated(trunc));
    let lt = to_levelwise(&t.truncated(trunc));
    let grid = |f: &dyn Fn(usize, usize) -> Vec<Vec<usize>>| -> Vec<Vec<Vec<Vec<usize>>>> {
        (0..=trunc).map(|m| (0..=trunc).map(|n| f(m, n)).collect()).collect()
    };
    let names = (0..=trunc)
        .map(|m| {
            (0..=trunc)
                .map(|n| {
                    let mut v = Vec::new();
                    for a in &ls.names[m] {
                        for b in &lt.names[n] {
                            v.push(format!("({a},{b})"));
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let hface = grid(&|m, n| {
        let w = lt.names[n].len();
        (0..ls.names[m].len() * w)
            .map(|x| if m == 0 { Vec::new() } else { ls.faces[m][x / w].iter().map(|&a| a * w + x % w).collect() })
            .collect()
    });
    let hdegen = grid(&|m, n| {
        let w = lt.names[n].len();
        (0..ls.names[m].len() * w)
            .map(|x| if m == trunc { Vec::new() } else { ls.degens[m][x / w].iter().map(|&a| a * w + x % w).collect() })
            .collect()
    });
    let vface = grid(&|m, n| {
        let w = lt.names[n].len();
        (0..ls.names[m].len() * w)
            .map(|x| {
                if n == 0 {
                    return Vec::new();
                }
                let w2 = lt.names[n - 1].len();
                lt.faces[n][x % w].iter().map(|&b| (x / w) * w2 + b).collect()
            })
            .collect()
    });
    let vdegen = grid(&|m, n| {
        let w = lt.names[n].len();
        (0..ls.names[m].len() * w)
            .map(|x| {
                if n == trunc {
                    return Vec::new();
                }
                let w2 = lt.names[n + 1].len();
                lt.degens[n][x % w].iter().map(|&b| (x / w) * w2 + b).collect()
            })
            .collect()
    });
    BisimplicialSet { trunc, names, hface, hdegen, vface, vdegen }
}

/// The category of simplices in the operator orientation: objects are all
/// simplices up to the truncation, `Hom(s_m, s_n)` is the set of
/// `theta: [n] -> [m]` with `theta^* s_m = s_n`, and `g o f` is
/// `theta_f o theta_g`.
#[derive(Debug, Clone)]
pub struct SimplexCategory {
    pub category: Arc<FinCategory>,
    pub objects: Vec<Simplex>,
    /// `(source object, theta)`
    pub morphisms: Vec<(usize, MonotoneMap)>,
    obj_lookup: HashMap<Simplex, usize>,
    mor_lookup: HashMap<(usize, MonotoneMap), usize>,
}

impl SimplexCategory {
    pub fn object_of(&self, x: &Simplex) -> Option<usize> {
        self.obj_lookup.get(x).copied()
    }

    pub fn morphism_of(&self, src: usize, theta: &MonotoneMap) -> Option<usize> {
        self.mor_lookup.get(&(src, theta.clone())).copied()
    }
}

pub fn simplex_category(s: &SimplicialSet) -> SimplexCategory {
    let n = s.trunc;
    let objects: Vec<Simplex> = (0..=n).flat_map(|k| s.simplices(k)).collect();
    let obj_lookup: HashMap<Simplex, usize> = objects.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let ops: Vec<Vec<Vec<MonotoneMap>>> = (0..=n).map(|m| (0..=n).map(|q| monotone_maps(q, m)).collect()).collect();
    let mut morphisms = Vec::new();
    let mut mors = Vec::new();
    let mut mor_lookup = HashMap::default();
    for (o, x) in objects.iter().enumerate() {
        for q in 0..=n {
            for theta in &ops[x.dim()][q] {
                let y = s.apply_unchecked(x, theta);
                mor_lookup.insert((o, theta.clone()), morphisms.len());
                mors.push(Morphism { id: format!("{}:{}", s.label(x), theta), src: o, tgt: obj_lookup[&y] });
                morphisms.push((o, theta.clone()));
            }
        }
    }
    let identities = objects
        .iter()
        .enumerate()
        .map(|(o, x)| mor_lookup[&(o, MonotoneMap::identity(x.dim()))])
        .collect();
    let mut out_of = vec![Vec::new(); objects.len()];
    for (i, m) in mors.iter().enumerate() {
        out_of[m.src].push(i);
    }
    let mut comp = HashMap::default();
    for (f, (src, tf)) in morphisms.iter().enumerate() {
        for &g in &out_of[mors[f].tgt] {
            let tg = &morphisms[g].1;
            comp.insert((g, f), mor_lookup[&(*src, tf.after(tg))]);
        }
    }
    let names = objects.iter().map(|x| s.label(x)).collect();
    let category = Arc::new(FinCategory::from_indexed(names, mors, identities, comp));
    SimplexCategory { category, objects, morphisms, obj_lookup, mor_lookup }
}

/// A map of simplicial sets, given by the images of non-degenerate simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialMap {
    src: Arc<SimplicialSet>,
    tgt: Arc<SimplicialSet>,
    /// `images[k][x]`
    images: Vec<Vec<Simplex>>,
}

impl SimplicialMap {
    pub fn new(src: Arc<SimplicialSet>, tgt: Arc<SimplicialSet>, images: Vec<Vec<Simplex>>) -> Result<Self> {
        let m = Self { src, tgt, images };
        let problems = m.validate();
        if problems.is_empty() {
            Ok(m)
        } else {
            Err(Error::Invalid(problems.join("; ")))
        }
    }

    pub(crate) fn from_parts(src: Arc<SimplicialSet>, tgt: Arc<SimplicialSet>, images: Vec<Vec<Simplex>>) -> Self {
        Self { src, tgt, images }
    }

    pub fn identity(s: Arc<SimplicialSet>) -> Self {
        let images = (0..=s.trunc).map(|k| (0..s.nondeg_count(k)).map(|x| Simplex::nondegenerate(k, x)).collect()).collect();
        Self { src: s.clone(), tgt: s, images }
    }

    /// The unique map to `Delta[0]`.
    pub fn to_point(s: Arc<SimplicialSet>) -> Self {
        let pt = Arc::new(one_point(s.trunc));
        let images = (0..=s.trunc)
            .map(|k| vec![Simplex { eta: MonotoneMap::raw(vec![0; k + 1], 0), base: 0 }; s.nondeg_count(k)])
            .collect();
        Self { src: s, tgt: pt, images }
    }

    pub fn src(&self) -> &Arc<SimplicialSet> {
        &self.src
    }

    pub fn tgt(&self) -> &Arc<SimplicialSet> {
        &self.tgt
    }

    pub fn image(&self, k: usize, x: usize) -> &Simplex {
        &self.images[k][x]
    }

    pub fn images(&self) -> &[Vec<Simplex>] {
        &self.images
    }

    /// `f(x)` for any simplex of the source.
    pub fn apply(&self, x: &Simplex) -> Simplex {
        let y = &self.images[x.base_dim()][x.base];
        self.tgt.apply_unchecked(y, &x.eta)
    }

    /// Dimensions preserved and `f d_i = d_i f` on every stored simplex.
    pub fn validate(&self) -> Vec<String> {
        let (s, t) = (&*self.src, &*self.tgt);
        let mut out = Vec::new();
        if s.trunc != t.trunc {
            out.push("source and target truncations differ".into());
            return out;
        }
        for k in 0..=s.trunc {
            if self.images.get(k).map_or(0, Vec::len) != s.nondeg_count(k) {
                out.push(format!("dimension {k}: one image per simplex required"));
                return out;
            }
            for (x, y) in self.images[k].iter().enumerate() {
                let ok = y.dim() == k && y.eta.is_surjective() && y.base < t.nondeg_count(y.base_dim());
                if !ok {
                    out.push(format!("image of {} is not a {k}-simplex of the target", s.names[k][x]));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for k in 1..=s.trunc {
            for x in 0..s.nondeg_count(k) {
                for i in 0..=k {
                    if self.apply(&s.faces[k][x][i]) != t.apply_face(&self.images[k][x], i) {
                        out.push(format!("f d{i} != d{i} f at {}", s.names[k][x]));
                    }
                }
            }
        }
        out
    }

    /// `self o inner`.
    pub fn after(&self, inner: &SimplicialMap) -> Result<SimplicialMap> {
        if !(Arc::ptr_eq(&inner.tgt, &self.src) || *inner.tgt == *self.src) {
            return Err(Error::Mismatch("simplicial maps are not composable".into()));
        }
        let images = inner.images.iter().map(|l| l.iter().map(|y| self.apply(y)).collect()).collect();
        Ok(Self { src: inner.src.clone(), tgt: self.tgt.clone(), images })
    }
}

/// `R(f)`: the functor of simplex categories induced by `f`.
pub fn simplex_category_map(f: &SimplicialMap, src: &SimplexCategory, tgt: &SimplexCategory) -> Result<Functor> {
    let omap = src
        .objects
        .iter()
        .map(|x| tgt.object_of(&f.apply(x)).ok_or_else(|| Error::Mismatch("image outside target simplices".into())))
        .collect::<Result<Vec<_>>>()?;
    let mmap = src
        .morphisms
        .iter()
        .map(|(o, theta)| {
            tgt.morphism_of(omap[*o], theta).ok_or_else(|| Error::Mismatch("operator outside target truncation".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Functor::from_parts(src.category.clone(), tgt.category.clone(), omap, mmap))
}

/// Every simplicial map `src -> tgt` in canonical search order, at most
/// `limit` of them.
pub fn enumerate_maps(src: &Arc<SimplicialSet>, tgt: &Arc<SimplicialSet>, limit: usize) -> Vec<SimplicialMap> {
    let mut out = Vec::new();
    if src.trunc != tgt.trunc {
        return out;
    }
    let cands: Vec<Vec<Simplex>> = (0..=src.trunc).map(|k| tgt.simplices(k)).collect();
    let mut images: Vec<Vec<Simplex>> =
        (0..=src.trunc).map(|k| vec![Simplex::nondegenerate(k, 0); src.nondeg_count(k)]).collect();
    fn go(
        s: &SimplicialSet,
        t: &SimplicialSet,
        cands: &[Vec<Simplex>],
        k: usize,
        x: usize,
        images: &mut Vec<Vec<Simplex>>,
        out: &mut Vec<Vec<Vec<Simplex>>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if k > s.trunc {
            out.push(images.clone());
            return;
        }
        if x == s.nondeg_count(k) {
            return go(s, t, cands, k + 1, 0, images, out, limit);
        }
        for c in &cands[k] {
            let ok = (0..=k).all(|i| {
                k == 0 || {
                    let f = &s.faces[k][x][i];
                    t.apply_unchecked(&images[f.base_dim()][f.base], &f.eta) == t.apply_face(c, i)
                }
            });
            if ok {
                images[k][x] = c.clone();
                go(s, t, cands, k, x + 1, images, out, limit);
            }
        }
    }
    let mut raw = Vec::new();
    go(src, tgt, &cands, 0, 0, &mut images, &mut raw, limit);
    out.extend(raw.into_iter().map(|im| SimplicialMap::from_parts(src.clone(), tgt.clone(), im)));
    out
}

/// Injective in every dimension, decided on non-degenerate simplices: they
/// must go to distinct non-degenerate simplices.
pub fn is_injective(f: &SimplicialMap) -> bool {
    (0..=f.src.trunc).all(|k| {
        let mut seen = std::collections::HashSet::new();
        f.images[k].iter().all(|y| !y.is_degenerate() && seen.insert(y.base))
    })
}

/// An unliftable square `(Lambda[n,k] -> X, Delta[n] -> Y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornWitness {
    pub n: usize,
    pub k: usize,
    /// Labels of the horn faces `x_i`, `i != k`, in order.
    pub faces: Vec<String>,
    /// Label of the target simplex in `Y`.
    pub target: String,
}

/// Result of a Kan check up to a dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KanReport {
    pub max_dim: usize,
    pub witness: Option<HornWitness>,
}

impl KanReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Which horns must lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HornClass {
    /// every `Lambda[n,k]`: Kan fibrations
    #[default]
    All,
    /// `0 < k < n` only: inner fibrations
    Inner,
}

impl HornClass {
    fn includes(self, n: usize, k: usize) -> bool {
        match self {
            HornClass::All => true,
            HornClass::Inner => 0 < k && k < n,
        }
    }
}

/// Checks horn lifting for every `n <= max_dim` and `k <= n`; the first
/// failing square in canonical order is returned as witness.
pub fn is_kan_fibration(f: &SimplicialMap, max_dim: usize) -> Result<KanReport> {
    horn_lifting(f, max_dim, HornClass::All)
}

/// Horn lifting restricted to a class of horns.
pub fn horn_lifting(f: &SimplicialMap, max_dim: usize, class: HornClass) -> Result<KanReport> {
    let x = &*f.src;
    let y = &*f.tgt;
    if max_dim + 1 > x.trunc.max(1) {
        return Err(Error::Truncation(format!(
            "Kan check up to dimension {max_dim} needs truncation at least {}",
            max_dim + 1
        )));
    }
    let lx = to_levelwise(x);
    let ly = to_levelwise(y);
    let ys: Vec<HashMap<Simplex, usize>> = (0..=y.trunc)
        .map(|k| y.simplices(k).into_iter().enumerate().map(|(i, s)| (s, i)).collect())
        .collect();
    let xs: Vec<Vec<Simplex>> = (0..=x.trunc).map(|k| x.simplices(k)).collect();
    let fmap: Vec<Vec<usize>> = (0..=x.trunc).map(|k| xs[k].iter().map(|s| ys[k][&f.apply(s)]).collect()).collect();
    for n in 1..=max_dim {
        // lifts indexed by their horn data for fast lookup
        let mut fillers: HashMap<(usize, Vec<usize>, usize), ()> = HashMap::default();
        for k in 0..=n {
            for z in 0..xs[n].len() {
                let horn: Vec<usize> = (0..=n).filter(|&i| i != k).map(|i| lx.faces[n][z][i]).collect();
                fillers.insert((k, horn, fmap[n][z]), ());
            }
        }
        for k in (0..=n).filter(|&k| class.includes(n, k)) {
            let mut horn = vec![usize::MAX; n + 1];
            let mut found = None;
            horn_search(&lx, n, k, 0, &mut horn, &mut |h| {
                let faces: Vec<usize> = (0..=n).filter(|&i| i != k).map(|i| h[i]).collect();
                for t in 0..ly.names[n].len() {
                    let matches = (0..=n).filter(|&i| i != k).all(|i| ly.faces[n][t][i] == fmap[n - 1][h[i]]);
                    if matches && !fillers.contains_key(&(k, faces.clone(), t)) {
                        found = Some(HornWitness {
                            n,
                            k,
                            faces: faces.iter().map(|&v| lx.names[n - 1][v].clone()).collect(),
                            target: ly.names[n][t].clone(),
                        });
                        return false;
                    }
                }
                true
            });
            if found.is_some() {
                return Ok(KanReport { max_dim, witness: found });
            }
        }
    }
    Ok(KanReport { max_dim, witness: None })
}

/// Enumerates compatible horn tuples `(x_i)_{i != k}` with
/// `d_i x_j = d_{j-1} x_i` for `i < j`; `visit` returns false to stop.
fn horn_search(
    l: &Levelwise,
    n: usize,
    k: usize,
    i: usize,
    horn: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if i > n {
        return visit(horn);
    }
    if i == k {
        return horn_search(l, n, k, i + 1, horn, visit);
    }
    for c in 0..l.names[n - 1].len() {
        let ok = (0..i).filter(|&a| a != k).all(|a| n < 2 || l.faces[n - 1][c][a] == l.faces[n - 1][horn[a]][i - 1]);
        if ok {
            horn[i] = c;
            if !horn_search(l, n, k, i + 1, horn, visit) {
                return false;
            }
        }
    }
    horn[i] = usize::MAX;
    true
}

/// First isomorphism `S -> T` in canonical search order, if any.
pub fn iso_sset(s: &Arc<SimplicialSet>, t: &Arc<SimplicialSet>) -> Option<SimplicialMap> {
    if s.trunc != t.trunc || s.nondeg_counts() != t.nondeg_counts() {
        return None;
    }
    let n = s.trunc;
    let mut images: Vec<Vec<Simplex>> = (0..=n).map(|k| vec![Simplex::nondegenerate(k, 0); s.nondeg_count(k)]).collect();
    let mut used: Vec<Vec<bool>> = (0..=n).map(|k| vec![false; t.nondeg_count(k)]).collect();
    fn go(
        s: &SimplicialSet,
        t: &SimplicialSet,
        k: usize,
        x: usize,
        images: &mut Vec<Vec<Simplex>>,
        used: &mut Vec<Vec<bool>>,
    ) -> bool {
        if k > s.trunc {
            return true;
        }
        if x == s.nondeg_count(k) {
            return go(s, t, k + 1, 0, images, used);
        }
        for c in 0..t.nondeg_count(k) {
            if used[k][c] {
                continue;
            }
            let ok = k == 0
                || (0..=k).all(|i| {
                    let f = &s.faces[k][x][i];
                    let img = images[f.base_dim()][f.base].clone();
                    t.apply_unchecked(&img, &f.eta) == t.faces[k][c][i]
                });
            if ok {
                images[k][x] = Simplex::nondegenerate(k, c);
                used[k][c] = true;
                if go(s, t, k, x + 1, images, used) {
                    return true;
                }
                used[k][c] = false;
            }
        }
        false
    }
    if go(s, t, 0, 0, &mut images, &mut used) {
        Some(SimplicialMap::from_parts(s.clone(), t.clone(), images))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mm(v: &[usize], n: usize) -> MonotoneMap {
        MonotoneMap::new(v.to_vec(), n).unwrap()
    }

    #[test]
    fn ez_factor_examples() {
        let (d, s) = ez_factor(&mm(&[0, 0, 2], 2));
        assert_eq!((d.values(), s.values()), (&[0, 2][..], &[0, 0, 1][..]));
        // uniqueness: exactly one (mono, epi) pair composes to the map
        let all: Vec<_> = (0..=2)
            .flat_map(|j| {
                monotone_maps(j, 2)
                    .into_iter()
                    .filter(MonotoneMap::is_injective)
                    .flat_map(move |d| surjections(2, j).into_iter().map(move |s| (d.clone(), s)))
            })
            .filter(|(d, s)| d.after(s) == mm(&[0, 0, 2], 2))
            .collect();
        assert_eq!(all.len(), 1);
        let id = MonotoneMap::identity(3);
        assert_eq!(ez_factor(&id), (id.clone(), id.clone()));
        let sj = mm(&[0, 1, 1, 2], 2);
        assert_eq!(ez_factor(&sj), (MonotoneMap::identity(2), sj.clone()));
    }

    #[test]
    fn standard_simplex_counts_and_faces() {
        let d2 = standard_simplex(2, 3);
        assert_eq!(d2.nondeg_counts(), vec![3, 3, 1, 0]);
        assert!(d2.validate().is_empty());
        let top = Simplex::nondegenerate(2, 0);
        let faces: Vec<String> = (0..3).map(|i| d2.label(&d2.apply_face(&top, i))).collect();
        assert_eq!(faces, vec!["[1,2]", "[0,2]", "[0,1]"]);
        assert_eq!(boundary(2, 3).nondeg_counts(), vec![3, 3, 0, 0]);
        assert_eq!(horn(2, 0, 3).nondeg_counts(), vec![3, 2, 0, 0]);
    }

    #[test]
    fn operators_compose_contravariantly() {
        let d2 = standard_simplex(2, 3);
        for k in 0..=3 {
            for x in d2.simplices(k) {
                assert_eq!(d2.apply(&x, &MonotoneMap::identity(k)).unwrap(), x);
                for m in 0..=3 {
                    for th in monotone_maps(m, k) {
                        let once = d2.apply(&x, &th).unwrap();
                        for q in 0..=3 {
                            for th2 in monotone_maps(q, m) {
                                assert_eq!(d2.apply(&once, &th2).unwrap(), d2.apply(&x, &th.after(&th2)).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    /// Brute-force oracle: pairs of monotone vertex sequences in [1]x[1],
    /// non-degenerate iff consecutive pairs differ.
    #[test]
    fn square_counts_against_oracle() {
        let p = product(&standard_simplex(1, 3), &standard_simplex(1, 3));
        assert!(p.validate().is_empty());
        let oracle: Vec<usize> = (0..=3)
            .map(|k| {
                let seqs = monotone_maps(k, 1);
                let mut c = 0;
                for a in &seqs {
                    for b in &seqs {
                        if (1..=k).all(|x| (a.apply(x), b.apply(x)) != (a.apply(x - 1), b.apply(x - 1))) {
                            c += 1;
                        }
                    }
                }
                c
            })
            .collect();
        assert_eq!(oracle, vec![4, 5, 2, 0]);
        assert_eq!(p.nondeg_counts(), oracle);
    }

    #[test]
    fn levelwise_round_trip_and_diagonal() {
        for s in [standard_simplex(2, 3), boundary(2, 3), horn(3, 1, 3)] {
            let l = to_levelwise(&s);
            assert!(l.validate().is_empty());
            let (back, _) = from_levelwise(&l);
            assert!(iso_sset(&Arc::new(back), &Arc::new(s.clone())).is_some());
        }
        let a = standard_simplex(1, 3);
        let b = boundary(2, 3);
        let ext = external_product(&a, &b);
        assert!(ext.validate().is_empty());
        let d = Arc::new(diag(&ext));
        let p = Arc::new(product(&a, &b));
        assert!(iso_sset(&d, &p).is_some());
    }

    #[test]
    fn simplex_category_sizes() {
        let c = simplex_category(&one_point(1));
        assert_eq!(c.category.object_count(), 2);
        let s1 = c.objects.iter().position(|x| x.dim() == 1).unwrap();
        assert_eq!(c.category.hom(s1, s1).len(), 3);
        assert!(c.category.validate().is_empty());
        let c = simplex_category(&standard_simplex(1, 1));
        assert_eq!(c.category.object_count(), 5);
        let two = disjoint_union(&one_point(0), &one_point(0));
        assert!(simplex_category(&two).category.is_discrete());
        // closed form: sum over j of #nondeg_j * #surjections [k] ->> [j]
        let d2 = standard_simplex(2, 3);
        let expect: usize = (0..=3)
            .map(|k| (0..=k).map(|j| d2.nondeg_count(j) * surjections(k, j).len()).sum::<usize>())
            .sum();
        assert_eq!(simplex_category(&d2).category.object_count(), expect);
    }

    #[test]
    fn injectivity() {
        let d2 = Arc::new(standard_simplex(2, 3));
        let b = Arc::new(boundary(2, 3));
        let images = (0..=3).map(|k| (0..b.nondeg_count(k)).map(|x| Simplex::nondegenerate(k, x)).collect()).collect();
        let inc = SimplicialMap::new(b, d2.clone(), images).unwrap();
        assert!(is_injective(&inc));
        assert!(is_injective(&SimplicialMap::identity(d2)));
        let collapse = SimplicialMap::to_point(Arc::new(standard_simplex(1, 3)));
        assert!(collapse.validate().is_empty());
        assert!(!is_injective(&collapse));
    }

    #[test]
    fn kan_checks() {
        let pt = Arc::new(one_point(3));
        assert!(is_kan_fibration(&SimplicialMap::identity(pt), 2).unwrap().holds());
        let disc = Arc::new(disjoint_union(&one_point(3), &one_point(3)));
        assert!(is_kan_fibration(&SimplicialMap::to_point(disc), 2).unwrap().holds());
        let f = SimplicialMap::to_point(Arc::new(standard_simplex(1, 3)));
        assert!(is_kan_fibration(&f, 1).unwrap().holds());
        let r = is_kan_fibration(&f, 2).unwrap();
        let w = r.witness.unwrap();
        assert_eq!((w.n, w.k), (2, 0));
        assert!(is_kan_fibration(&f, 3).is_err());
    }

    #[test]
    fn map_enumeration_and_induced_functor() {
        let a = Arc::new(standard_simplex(1, 2));
        let b = Arc::new(standard_simplex(1, 2));
        // monotone self-maps of [1]
        let maps = enumerate_maps(&a, &b, usize::MAX);
        assert_eq!(maps.len(), 3);
        assert!(maps.iter().all(|m| m.validate().is_empty()));
        let ca = simplex_category(&a);
        for m in &maps {
            let f = simplex_category_map(m, &ca, &ca).unwrap();
            assert!(f.violations().is_empty());
        }
        let d2 = standard_simplex(2, 3);
        let top = Simplex::nondegenerate(2, 0);
        let th = MonotoneMap::new(vec![0, 0, 1], 2).unwrap();
        let chain = d2.face_chain(&top, &th);
        assert_eq!(chain, vec![(2, 0, 2)]);
    }

    #[test]
    fn iso_search() {
        let a = Arc::new(standard_simplex(1, 3));
        let renamed = {
            let mut s = (*a).clone();
            s.names[0] = vec!["p".into(), "q".into()];
            s.names[1] = vec!["e".into()];
            Arc::new(s)
        };
        assert!(iso_sset(&a, &renamed).is_some());
        assert!(iso_sset(&a, &Arc::new(boundary(2, 3))).is_none());
        let unit = Arc::new(product(&one_point(3), &boundary(2, 3)));
        assert!(iso_sset(&unit, &Arc::new(boundary(2, 3))).is_some());
    }
}
