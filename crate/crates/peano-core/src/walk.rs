//! Walks on finite reflexive graphs.
//!
//! A walk stores its vertex sequence exactly as traversed. Circular walks
//! store the closing repeat `⟨w(0), …, w(ℓ−1), w(0)⟩` and report length `ℓ`;
//! lasso walks record the index at which the circular part starts.
//! Every sequence-level predicate (reduced, uncrossed, refinement, winding)
//! runs over the stored sequence, which for circular walks is the same as
//! reading indices mod `ℓ`.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{EpiViolation, Graph, GraphMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("vertex {vertex} out of range")]
    VertexOutOfRange { vertex: usize },
    #[error("entries {index} and {} are not adjacent", index + 1)]
    NotAdjacent { index: usize },
    #[error("circular walk must end where it starts and have length at least 1")]
    NotClosed,
    #[error("invalid lasso split {split}")]
    BadSplit { split: usize },
    #[error("walks live on different graphs")]
    HostMismatch,
    #[error("walk is not reduced at index {index}")]
    NotReduced { index: usize },
    #[error("map is not a homomorphism")]
    NotHomomorphism,
    #[error("map is not a monotone epimorphism: {0}")]
    NotMonotoneEpi(EpiViolation),
    #[error("concatenation seam is not an edge")]
    SeamNotAdjacent,
}

/// Shape of a walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkKind {
    Plain,
    Circular,
    /// `vertices[..split]` is the tail, `vertices[split..]` the circular part.
    Lasso {
        split: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    host: Arc<Graph>,
    vertices: Vec<usize>,
    kind: WalkKind,
}

pub(crate) fn same_host(a: &Arc<Graph>, b: &Arc<Graph>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Walk {
    pub fn new(host: Arc<Graph>, vertices: Vec<usize>, kind: WalkKind) -> Result<Self, WalkError> {
        for &v in &vertices {
            if v >= host.n() {
                return Err(WalkError::VertexOutOfRange { vertex: v });
            }
        }
        for (i, pair) in vertices.windows(2).enumerate() {
            if !host.adjacent(pair[0], pair[1]) {
                return Err(WalkError::NotAdjacent { index: i });
            }
        }
        match kind {
            WalkKind::Plain => {}
            WalkKind::Circular => {
                if vertices.len() < 2 || vertices[0] != vertices[vertices.len() - 1] {
                    return Err(WalkError::NotClosed);
                }
            }
            WalkKind::Lasso { split } => {
                let n = vertices.len();
                if split + 2 > n || vertices[split] != vertices[n - 1] {
                    return Err(WalkError::BadSplit { split });
                }
            }
        }
        Ok(Walk {
            host,
            vertices,
            kind,
        })
    }

    pub fn plain(host: Arc<Graph>, vertices: Vec<usize>) -> Result<Self, WalkError> {
        Self::new(host, vertices, WalkKind::Plain)
    }

    /// A circular walk from its stored sequence, closing repeat included.
    pub fn circular(host: Arc<Graph>, vertices: Vec<usize>) -> Result<Self, WalkError> {
        Self::new(host, vertices, WalkKind::Circular)
    }

    /// A circular walk from one lap `⟨c(0), …, c(ℓ−1)⟩`; the closing repeat is appended.
    pub fn closed_lap(host: Arc<Graph>, lap: &[usize]) -> Result<Self, WalkError> {
        let mut v = lap.to_vec();
        if let Some(&first) = lap.first() {
            v.push(first);
        }
        Self::circular(host, v)
    }

    pub fn lasso(host: Arc<Graph>, vertices: Vec<usize>, split: usize) -> Result<Self, WalkError> {
        Self::new(host, vertices, WalkKind::Lasso { split })
    }

    pub fn empty(host: Arc<Graph>) -> Self {
        Walk {
            host,
            vertices: Vec::new(),
            kind: WalkKind::Plain,
        }
    }

    pub fn host(&self) -> &Arc<Graph> {
        &self.host
    }

    pub fn kind(&self) -> WalkKind {
        self.kind
    }

    /// The stored sequence.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Reported length: `ℓ` for circular walks, the number of entries otherwise.
    pub fn len(&self) -> usize {
        match self.kind {
            WalkKind::Circular => self.vertices.len() - 1,
            _ => self.vertices.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `w(i)`, with negative indices counted from the end of the stored sequence.
    pub fn at(&self, i: isize) -> usize {
        if i < 0 {
            self.vertices[(self.vertices.len() as isize + i) as usize]
        } else {
            self.vertices[i as usize]
        }
    }

    pub fn first(&self) -> Option<usize> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.vertices.last().copied()
    }

    /// The distinct entries of one lap for circular walks, all entries otherwise.
    pub fn body(&self) -> &[usize] {
        &self.vertices[..self.len()]
    }

    pub fn contains(&self, x: usize) -> bool {
        self.vertices.contains(&x)
    }

    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.vertices.iter().copied().collect()
    }

    pub fn vertex_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.host.n()];
        for &v in &self.vertices {
            m[v] = true;
        }
        m
    }

    /// Every entry of `self` occurs in `other`.
    pub fn is_confined_to(&self, other: &Walk) -> bool {
        let m = other.vertex_mask();
        self.vertices
            .iter()
            .all(|&v| m.get(v).copied().unwrap_or(false))
    }

    pub fn is_confined_to_mask(&self, mask: &[bool]) -> bool {
        self.vertices.iter().all(|&v| mask[v])
    }

    /// The tail of a lasso; `None` for other kinds.
    pub fn lasso_tail(&self) -> Option<Walk> {
        match self.kind {
            WalkKind::Lasso { split } => {
                Some(self.with(self.vertices[..split].to_vec(), WalkKind::Plain))
            }
            _ => None,
        }
    }

    /// The circular part of a lasso; `None` for other kinds.
    pub fn lasso_circle(&self) -> Option<Walk> {
        match self.kind {
            WalkKind::Lasso { split } => {
                Some(self.with(self.vertices[split..].to_vec(), WalkKind::Circular))
            }
            _ => None,
        }
    }

    /// The stored sequence as a plain walk.
    pub fn as_plain(&self) -> Walk {
        self.with(self.vertices.clone(), WalkKind::Plain)
    }

    /// Plain prefix of `t` stored entries.
    pub fn prefix(&self, t: usize) -> Walk {
        self.with(self.vertices[..t].to_vec(), WalkKind::Plain)
    }

    /// Plain slice of stored entries `a..b`.
    pub fn slice(&self, a: usize, b: usize) -> Walk {
        self.with(self.vertices[a..b].to_vec(), WalkKind::Plain)
    }

    /// The walk traversed backwards. Lassos become plain walks.
    pub fn reversed(&self) -> Walk {
        let mut v = self.vertices.clone();
        v.reverse();
        let kind = match self.kind {
            WalkKind::Circular => WalkKind::Circular,
            _ => WalkKind::Plain,
        };
        self.with(v, kind)
    }

    /// Same host, new sequence; the caller guarantees validity.
    pub(crate) fn with(&self, vertices: Vec<usize>, kind: WalkKind) -> Walk {
        Walk {
            host: self.host.clone(),
            vertices,
            kind,
        }
    }
}

/// Taxonomy flags of a walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WalkFlags {
    pub reduced: bool,
    pub uncrossed: bool,
    pub path: bool,
    pub spaced_path: bool,
}

fn all_distinct(seq: &[usize]) -> bool {
    let mut s = BTreeSet::new();
    seq.iter().all(|&x| s.insert(x))
}

fn spaced_linear(g: &Graph, seq: &[usize]) -> bool {
    for i in 0..seq.len() {
        for j in 0..seq.len() {
            if g.adjacent(seq[i], seq[j]) != (i.abs_diff(j) <= 1) {
                return false;
            }
        }
    }
    true
}

fn spaced_cyclic(g: &Graph, lap: &[usize]) -> bool {
    let l = lap.len();
    for i in 0..l {
        for j in 0..l {
            let d = i.abs_diff(j);
            let cyc = d.min(l - d);
            if g.adjacent(lap[i], lap[j]) != (cyc <= 1) {
                return false;
            }
        }
    }
    true
}

pub fn is_reduced_seq(seq: &[usize]) -> bool {
    seq.windows(2).all(|p| p[0] != p[1])
}

pub fn is_uncrossed_seq(seq: &[usize]) -> bool {
    let n = seq.len();
    let mut succ = alloc::collections::BTreeMap::new();
    for i in 0..n.saturating_sub(1) {
        if let Some(&s) = succ.get(&seq[i]) {
            if s != seq[i + 1] {
                return false;
            }
        } else {
            succ.insert(seq[i], seq[i + 1]);
        }
    }
    true
}

/// Computes the reduced, uncrossed, path and spaced-path flags.
///
/// For circular walks, path and spaced are read cyclically over one lap.
/// For lassos, path and spaced mean lasso path and spaced lasso path.
pub fn classify(w: &Walk) -> WalkFlags {
    let seq = w.vertices();
    let g = w.host();
    let reduced = is_reduced_seq(seq);
    let uncrossed = is_uncrossed_seq(seq);
    let (path, spaced_path) = match w.kind() {
        WalkKind::Plain => (all_distinct(seq), spaced_linear(g, seq)),
        WalkKind::Circular => {
            let lap = w.body();
            (all_distinct(lap), spaced_cyclic(g, lap))
        }
        WalkKind::Lasso { split } => {
            let tail = &seq[..split];
            let lap = &seq[split..seq.len() - 1];
            let disjoint = tail.iter().all(|x| !lap.contains(x));
            let path = disjoint && all_distinct(tail) && all_distinct(lap);
            (
                path,
                path && spaced_linear(g, tail) && spaced_cyclic(g, lap),
            )
        }
    };
    WalkFlags {
        reduced,
        uncrossed,
        path,
        spaced_path,
    }
}

fn first_occurrences(seq: &[usize]) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    seq.iter().copied().filter(|&x| seen.insert(x)).collect()
}

/// `w ⊑ v`: every initial vertex set of `v` is an initial vertex set of `w`.
///
/// Equivalently, the order in which `v` first visits its vertices is a
/// prefix of the order in which `w` first visits its vertices.
pub fn refines(w: &Walk, v: &Walk) -> Result<bool, WalkError> {
    if !same_host(w.host(), v.host()) {
        return Err(WalkError::HostMismatch);
    }
    Ok(refines_seq(w.vertices(), v.vertices()))
}

pub fn refines_seq(w: &[usize], v: &[usize]) -> bool {
    let fw = first_occurrences(w);
    let fv = first_occurrences(v);
    fw.len() >= fv.len() && fw[..fv.len()] == fv[..]
}

/// Searches for a strictly increasing `f` with `f(0) = 0` such that `w`
/// stays on `v(j)` for `f(j) ≤ i < f(j+1)` and on `v(−1)` from `f(−1)` on.
///
/// Returns the lexicographically least witness. When both walks are lassos,
/// the tail of `w` must be confined to the tail of `v` and the circle of `w`
/// to the circle of `v`.
pub fn monotonically_refines(w: &Walk, v: &Walk) -> Result<Option<Vec<usize>>, WalkError> {
    if !same_host(w.host(), v.host()) {
        return Err(WalkError::HostMismatch);
    }
    if let (Some(wt), Some(vt)) = (w.lasso_tail(), v.lasso_tail()) {
        let wc = w.lasso_circle().expect("lasso");
        let vc = v.lasso_circle().expect("lasso");
        if !wt.is_confined_to(&vt) || !wc.is_confined_to(&vc) {
            return Ok(None);
        }
    }
    Ok(monotone_witness(w.vertices(), v.vertices()))
}

/// Sequence-level monotone refinement witness.
pub fn monotone_witness(w: &[usize], v: &[usize]) -> Option<Vec<usize>> {
    let (n, m) = (w.len(), v.len());
    if m == 0 || n == 0 {
        return (m == 0 && n == 0).then(Vec::new);
    }
    // run[i]: end (exclusive) of the run of equal values starting at i
    let mut run = vec![n; n];
    for i in (0..n - 1).rev() {
        run[i] = if w[i] == w[i + 1] { run[i + 1] } else { i + 1 };
    }
    // feas[j*n + i]: w[i..] can be matched by v[j..], each block nonempty
    let mut feas = vec![false; m * n];
    for i in 0..n {
        feas[(m - 1) * n + i] = w[i] == v[m - 1] && run[i] == n;
    }
    for j in (0..m - 1).rev() {
        for i in 0..n {
            if w[i] != v[j] {
                continue;
            }
            feas[j * n + i] = (i + 1..=run[i].min(n - 1)).any(|k| feas[(j + 1) * n + k]);
        }
    }
    if !feas[0] {
        return None;
    }
    let mut f = Vec::with_capacity(m);
    let mut i = 0;
    f.push(0);
    for j in 0..m - 1 {
        let k = (i + 1..=run[i].min(n - 1)).find(|&k| feas[(j + 1) * n + k])?;
        f.push(k);
        i = k;
    }
    Some(f)
}

/// Pointwise image `f·w`; the kind is preserved.
pub fn induce(f: &GraphMap, w: &Walk) -> Result<Walk, WalkError> {
    if !same_host(f.domain(), w.host()) {
        return Err(WalkError::HostMismatch);
    }
    if !f.is_homomorphism() {
        return Err(WalkError::NotHomomorphism);
    }
    Ok(induce_unchecked(f, w))
}

pub(crate) fn induce_unchecked(f: &GraphMap, w: &Walk) -> Walk {
    let vertices = w.vertices().iter().map(|&x| f.apply(x)).collect();
    Walk {
        host: f.codomain().clone(),
        vertices,
        kind: w.kind(),
    }
}

/// Collapses consecutive duplicates.
///
/// A circular walk that collapses to a single vertex becomes a plain walk
/// of length 1; a lasso whose tail ends on the circle's start vertex has the
/// split moved onto the merged entry.
pub fn reduce(w: &Walk) -> Walk {
    let seq = w.vertices();
    let mut out: Vec<usize> = Vec::with_capacity(seq.len());
    let mut split_out = None;
    for (i, &x) in seq.iter().enumerate() {
        let dup = out.last() == Some(&x);
        if let WalkKind::Lasso { split } = w.kind() {
            if i == split {
                split_out = Some(if dup { out.len() - 1 } else { out.len() });
            }
        }
        if !dup {
            out.push(x);
        }
    }
    let kind = match w.kind() {
        WalkKind::Plain => WalkKind::Plain,
        WalkKind::Circular => {
            if out.len() >= 2 {
                WalkKind::Circular
            } else {
                WalkKind::Plain
            }
        }
        WalkKind::Lasso { .. } => {
            let s = split_out.expect("split index inside the walk");
            if out.len() >= s + 2 {
                WalkKind::Lasso { split: s }
            } else {
                WalkKind::Plain
            }
        }
    };
    w.with(out, kind)
}

/// `w⌢v`, keeping every entry of both walks.
///
/// When `v` is circular and `w` is nonempty the result is a lasso split at
/// the first entry of `v`; whether it is a lasso path is left to [`classify`].
pub fn concat(w: &Walk, v: &Walk) -> Result<Walk, WalkError> {
    if !same_host(w.host(), v.host()) {
        return Err(WalkError::HostMismatch);
    }
    if w.is_empty() {
        return Ok(v.clone());
    }
    if v.is_empty() {
        return Ok(w.as_plain());
    }
    if !w.host().adjacent(w.at(-1), v.at(0)) {
        return Err(WalkError::SeamNotAdjacent);
    }
    let mut seq = w.vertices().to_vec();
    let split = seq.len();
    seq.extend_from_slice(v.vertices());
    let kind = match v.kind() {
        WalkKind::Circular => WalkKind::Lasso { split },
        _ => WalkKind::Plain,
    };
    Ok(w.with(seq, kind))
}

/// Like [`concat`], but a seam vertex shared by both walks is kept once.
pub fn join(w: &Walk, v: &Walk) -> Result<Walk, WalkError> {
    if !w.is_empty() && !v.is_empty() && w.at(-1) == v.at(0) && same_host(w.host(), v.host()) {
        let trimmed = w.prefix(w.vertices().len() - 1);
        return concat(&trimmed, v);
    }
    concat(w, v)
}

/// Lifts a reduced walk along a monotone epimorphism.
///
/// The result `v` is reduced, `f·v` monotonically refines `w`, and `v` has
/// the kind of `w`. Paths lift to paths and circular paths to circular paths;
/// lasso paths lift to lasso paths whenever the tail can be attached to the
/// lifted circle without leaving the preimage of the tail.
pub fn lift_walk(f: &GraphMap, w: &Walk) -> Result<Walk, WalkError> {
    if !same_host(f.codomain(), w.host()) {
        return Err(WalkError::HostMismatch);
    }
    f.check_monotone_epimorphism()
        .map_err(WalkError::NotMonotoneEpi)?;
    if let Some(i) = w.vertices().windows(2).position(|p| p[0] == p[1]) {
        return Err(WalkError::NotReduced { index: i });
    }
    let lifter = Lifter::new(f);
    let seq = w.vertices();
    let vertices = match w.kind() {
        _ if seq.is_empty() => Vec::new(),
        WalkKind::Plain => {
            let start = lifter.pre[seq[0]][0];
            lifter.lift_from(start, seq)
        }
        WalkKind::Circular => lifter
            .lift_circle(seq, None)
            .expect("unconstrained circular lift"),
        WalkKind::Lasso { split } => return Ok(lifter.lift_lasso(seq, split)),
    };
    let kind = w.kind();
    Ok(Walk {
        host: f.domain().clone(),
        vertices,
        kind,
    })
}

struct Lifter<'a> {
    f: &'a GraphMap,
    g: &'a Graph,
    pre: Vec<Vec<usize>>,
}

impl<'a> Lifter<'a> {
    fn new(f: &'a GraphMap) -> Self {
        let g = f.domain().as_ref();
        let mut pre = vec![Vec::new(); f.codomain().n()];
        for x in 0..g.n() {
            pre[f.apply(x)].push(x);
        }
        Lifter { f, g, pre }
    }

    fn mask_of(&self, labels: &[usize]) -> Vec<bool> {
        (0..self.g.n())
            .map(|x| labels.contains(&self.f.apply(x)))
            .collect()
    }

    // shortest path from `from` inside f⁻¹(a) ∪ f⁻¹(b) to a vertex satisfying `target`
    fn step(&self, from: usize, a: usize, target: &[bool]) -> Vec<usize> {
        let mut allowed = self.mask_of(&[a]);
        for (x, &t) in target.iter().enumerate() {
            allowed[x] |= t;
        }
        self.g
            .shortest_path_within(from, target, &allowed)
            .expect("preimages of an edge are connected")
    }

    // lifts `seq` starting at `start` ∈ f⁻¹(seq[0]) with successive BFS steps
    fn lift_from(&self, start: usize, seq: &[usize]) -> Vec<usize> {
        let mut out = vec![start];
        for p in seq.windows(2) {
            let target = self.mask_of(&[p[1]]);
            let path = self.step(*out.last().expect("nonempty"), p[0], &target);
            out.extend_from_slice(&path[1..]);
        }
        out
    }

    // Lifts a stored circular sequence. With `anchor = Some(y)` the lift
    // starts at y; otherwise at the least vertex of f⁻¹(c(0)) adjacent to
    // f⁻¹(c(ℓ−1)), which makes the lift a circular path when c is one.
    // Returns None only if an anchored closing would break the path shape
    // and `strict` callers must fall back.
    fn lift_circle(&self, seq: &[usize], anchor: Option<usize>) -> Option<Vec<usize>> {
        let l = seq.len() - 1;
        let (c0, clast) = (seq[0], seq[l - 1]);
        let last_mask = self.mask_of(&[clast]);
        let x0 = match anchor {
            Some(y) => y,
            None => *self.pre[c0]
                .iter()
                .find(|&&x| self.g.neighbors(x).iter().any(|&y| last_mask[y]))
                .expect("edge c(ℓ−1) c(0) is covered"),
        };
        let mut out = self.lift_from(x0, &seq[..l]);
        // close up: walk inside f⁻¹(c(ℓ−1)) to a neighbor of x0, or, when that
        // is impossible, through f⁻¹(c(0)) back to x0
        let cur = *out.last().expect("nonempty");
        let mut near = vec![false; self.g.n()];
        for &y in self.g.neighbors(x0) {
            near[y] = last_mask[y];
        }
        if let Some(path) = self.g.shortest_path_within(cur, &near, &last_mask) {
            out.extend_from_slice(&path[1..]);
            out.push(x0);
        } else {
            let mut target = vec![false; self.g.n()];
            target[x0] = true;
            let allowed = self.mask_of(&[clast, c0]);
            let path = self.g.shortest_path_within(cur, &target, &allowed)?;
            out.extend_from_slice(&path[1..]);
        }
        if out.len() == 2 {
            // a lap of length 1 cannot be reduced; c was not reduced either
            return None;
        }
        Some(out)
    }

    fn lift_lasso(&self, seq: &[usize], split: usize) -> Walk {
        let host = self.f.domain().clone();
        let circle_seq = &seq[split..];
        if split == 0 {
            let v = self.lift_circle(circle_seq, None).expect("circular lift");
            return Walk {
                host,
                vertices: v,
                kind: WalkKind::Lasso { split: 0 },
            };
        }
        let tail_seq = &seq[..split];
        let tail_start = self.pre[tail_seq[0]][0];
        let circle_label = circle_seq[0];
        let last_label = tail_seq[split - 1];

        // preferred: attach the tail to a circle built as a circular path
        if let Some(circle) = self.lift_circle(circle_seq, None) {
            let lap = &circle[..circle.len() - 1];
            let mut on_lap = vec![false; self.g.n()];
            for &x in lap {
                on_lap[x] = true;
            }
            let tail_lift = if split == 1 {
                vec![tail_start]
            } else {
                self.lift_from(tail_start, tail_seq)
            };
            let arrive = *tail_lift.last().expect("nonempty");
            let last_mask = self.mask_of(&[last_label]);
            let mut target = vec![false; self.g.n()];
            for x in 0..self.g.n() {
                target[x] = last_mask[x]
                    && self
                        .g
                        .neighbors(x)
                        .iter()
                        .any(|&y| on_lap[y] && self.f.apply(y) == circle_label);
            }
            if let Some(path) = self.g.shortest_path_within(arrive, &target, &last_mask) {
                let mut tail = tail_lift;
                tail.extend_from_slice(&path[1..]);
                let end = *tail.last().expect("nonempty");
                let y0 = *self
                    .g
                    .neighbors(end)
                    .iter()
                    .find(|&&y| on_lap[y] && self.f.apply(y) == circle_label)
                    .expect("target has a lap neighbor");
                let pos = lap.iter().position(|&x| x == y0).expect("on lap");
                let mut v = tail;
                let s = v.len();
                v.extend(lap[pos..].iter().chain(&lap[..pos]).copied());
                v.push(y0);
                return Walk {
                    host,
                    vertices: v,
                    kind: WalkKind::Lasso { split: s },
                };
            }
        }

        // general: tail first, then a circle anchored where the tail lands
        let full_tail = self.lift_from(tail_start, &seq[..=split]);
        let y0 = *full_tail.last().expect("nonempty");
        let s = full_tail.len() - 1;
        let circle = self
            .lift_circle(circle_seq, Some(y0))
            .expect("anchored circular lift");
        let mut v = full_tail[..s].to_vec();
        v.extend_from_slice(&circle);
        Walk {
            host,
            vertices: v,
            kind: WalkKind::Lasso { split: s },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_monotone_epimorphisms;

    fn g(n: usize, e: &[(usize, usize)]) -> Arc<Graph> {
        Arc::new(Graph::new(n, e).unwrap())
    }

    fn p(n: usize) -> Arc<Graph> {
        Arc::new(Graph::path(n).unwrap())
    }

    fn c(n: usize) -> Arc<Graph> {
        Arc::new(Graph::cycle(n).unwrap())
    }

    // definitional oracle for refinement over every s and t
    fn refines_oracle(w: &[usize], v: &[usize]) -> bool {
        (0..=v.len()).all(|s| {
            let target: BTreeSet<_> = v[..s].iter().collect();
            (0..=w.len()).any(|t| w[..t].iter().collect::<BTreeSet<_>>() == target)
        })
    }

    // exhaustive oracle over all strictly increasing f
    fn monotone_oracle(w: &[usize], v: &[usize]) -> Option<Vec<usize>> {
        let (n, m) = (w.len(), v.len());
        if m == 0 || n == 0 {
            return (m == 0 && n == 0).then(Vec::new);
        }
        let mut best: Option<Vec<usize>> = None;
        let mut f = vec![0usize; m];
        fn rec(
            j: usize,
            f: &mut Vec<usize>,
            w: &[usize],
            v: &[usize],
            best: &mut Option<Vec<usize>>,
        ) {
            let (n, m) = (w.len(), v.len());
            if j == m {
                let ok = (0..n).all(|i| {
                    let jj = (0..m).rev().find(|&jj| f[jj] <= i).unwrap();
                    w[i] == v[jj]
                });
                if ok && best.as_ref().is_none_or(|b| f[..] < b[..]) {
                    *best = Some(f.clone());
                }
                return;
            }
            for k in f[j - 1] + 1..n {
                f[j] = k;
                rec(j + 1, f, w, v, best);
            }
        }
        rec(1, &mut f, w, v, &mut best);
        best
    }

    #[test]
    fn classify_examples() {
        let p3 = p(3);
        let all = WalkFlags {
            reduced: true,
            uncrossed: true,
            path: true,
            spaced_path: true,
        };
        assert_eq!(
            classify(&Walk::plain(p3.clone(), vec![0, 1, 2]).unwrap()),
            all
        );
        let back = classify(&Walk::plain(p3.clone(), vec![0, 1, 0]).unwrap());
        assert_eq!(
            back,
            WalkFlags {
                reduced: true,
                uncrossed: true,
                path: false,
                spaced_path: false
            }
        );
        assert!(!classify(&Walk::plain(p3.clone(), vec![0, 0, 1]).unwrap()).reduced);
        let crossed = Walk::plain(p3, vec![1, 0, 1, 2]).unwrap();
        assert!(!classify(&crossed).uncrossed);
    }

    #[test]
    fn circular_classification_is_cyclic() {
        let c4 = c(4);
        let lap = Walk::closed_lap(c4.clone(), &[0, 1, 2, 3]).unwrap();
        assert_eq!(lap.len(), 4);
        let fl = classify(&lap);
        assert!(fl.reduced && fl.uncrossed && fl.path && fl.spaced_path);
        // as a plain walk the closing repeat breaks path
        assert!(!classify(&lap.as_plain()).path);
        let c3 = c(3);
        assert!(classify(&Walk::closed_lap(c3, &[0, 1, 2]).unwrap()).spaced_path);
        let k4 = Arc::new(Graph::complete(4).unwrap());
        assert!(!classify(&Walk::closed_lap(k4, &[0, 1, 2, 3]).unwrap()).spaced_path);
        assert_eq!(
            Walk::circular(c4.clone(), vec![0, 1]),
            Err(WalkError::NotClosed)
        );
        assert_eq!(Walk::circular(c4, vec![0]), Err(WalkError::NotClosed));
    }

    #[test]
    fn lasso_classification() {
        let h = g(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 2)]);
        let l = Walk::lasso(h.clone(), vec![0, 1, 2, 3, 4, 2], 2).unwrap();
        let fl = classify(&l);
        assert!(fl.path && fl.spaced_path);
        assert_eq!(l.lasso_tail().unwrap().vertices(), &[0, 1]);
        assert_eq!(l.lasso_circle().unwrap().len(), 3);
        assert_eq!(
            Walk::lasso(h, vec![0, 1, 2, 3], 2),
            Err(WalkError::BadSplit { split: 2 })
        );
    }

    #[test]
    fn construction_checks_adjacency() {
        assert_eq!(
            Walk::plain(p(3), vec![0, 2]),
            Err(WalkError::NotAdjacent { index: 0 })
        );
        assert_eq!(
            Walk::plain(p(3), vec![3]),
            Err(WalkError::VertexOutOfRange { vertex: 3 })
        );
        assert!(Walk::plain(p(3), vec![1, 1]).is_ok());
    }

    #[test]
    fn refines_examples() {
        let p3 = p(3);
        let abc = Walk::plain(p3.clone(), vec![0, 1, 2]).unwrap();
        let ab = Walk::plain(p3.clone(), vec![0, 1]).unwrap();
        let ba = Walk::plain(p3.clone(), vec![1, 0]).unwrap();
        assert!(refines(&abc, &ab).unwrap());
        assert!(!refines(&ba, &ab).unwrap());
        assert!(refines(&ab, &Walk::empty(p3.clone())).unwrap());
        assert!(!refines(&Walk::empty(p3.clone()), &ab).unwrap());
        assert_eq!(
            refines(&ab, &Walk::plain(p(4), vec![0]).unwrap()),
            Err(WalkError::HostMismatch)
        );
    }

    #[test]
    fn monotone_examples() {
        let p2 = p(2);
        let w = Walk::plain(p2.clone(), vec![0, 0, 1, 1, 1]).unwrap();
        let v = Walk::plain(p2.clone(), vec![0, 1]).unwrap();
        assert_eq!(monotonically_refines(&w, &v).unwrap(), Some(vec![0, 2]));
        let zigzag = Walk::plain(p2.clone(), vec![0, 1, 0, 1]).unwrap();
        assert_eq!(monotonically_refines(&zigzag, &v).unwrap(), None);
        assert_eq!(
            monotonically_refines(&zigzag, &zigzag).unwrap(),
            Some(vec![0, 1, 2, 3])
        );
        // stuttered coarse walk: least witness
        let aa = Walk::plain(p2.clone(), vec![0, 0]).unwrap();
        let aaa = Walk::plain(p2, vec![0, 0, 0]).unwrap();
        assert_eq!(monotonically_refines(&aaa, &aa).unwrap(), Some(vec![0, 1]));
    }

    #[test]
    fn monotone_lasso_confinement() {
        let h = g(4, &[(0, 1), (1, 2), (2, 3), (3, 1)]);
        let coarse = Walk::lasso(h.clone(), vec![0, 1, 2, 3, 1], 1).unwrap();
        let fine = Walk::lasso(h.clone(), vec![0, 0, 1, 2, 3, 1], 2).unwrap();
        assert!(monotonically_refines(&fine, &coarse).unwrap().is_some());
        // tail entering the circle's vertex breaks the lasso clause
        let fine_bad = Walk::lasso(h, vec![0, 1, 1, 2, 3, 1], 2).unwrap();
        assert!(monotonically_refines(&fine_bad, &coarse).unwrap().is_none());
    }

    #[test]
    fn monotone_matches_oracle_exhaustively() {
        // all sequences over {0,1,2} of length ≤ 5 against length ≤ 3 on K3
        let k3 = Arc::new(Graph::complete(3).unwrap());
        let seqs = |max: usize| {
            let mut out = vec![vec![]];
            let mut frontier = vec![vec![]];
            for _ in 0..max {
                let mut next = Vec::new();
                for s in &frontier {
                    for x in 0..3 {
                        let mut t: Vec<usize> = s.clone();
                        t.push(x);
                        next.push(t);
                    }
                }
                out.extend(next.iter().cloned());
                frontier = next;
            }
            out
        };
        for w in seqs(5) {
            for v in seqs(3) {
                let ww = Walk::plain(k3.clone(), w.clone()).unwrap();
                let vv = Walk::plain(k3.clone(), v.clone()).unwrap();
                assert_eq!(
                    monotonically_refines(&ww, &vv).unwrap(),
                    monotone_oracle(&w, &v),
                    "{w:?} {v:?}"
                );
                assert_eq!(
                    refines(&ww, &vv).unwrap(),
                    refines_oracle(&w, &v),
                    "{w:?} {v:?}"
                );
            }
        }
    }

    #[test]
    fn induce_examples() {
        let c6 = c(6);
        let c3 = c(3);
        let lap = Walk::closed_lap(c6.clone(), &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(induce(&GraphMap::identity(c6.clone()), &lap).unwrap(), lap);
        let wrap = GraphMap::new(c6.clone(), c3.clone(), (0..6).map(|i| i % 3).collect()).unwrap();
        let img = induce(&wrap, &lap).unwrap();
        assert_eq!(img.vertices(), &[0, 1, 2, 0, 1, 2, 0]);
        assert_eq!(img.kind(), WalkKind::Circular);
        let one = p(1);
        let constant = GraphMap::new(c6.clone(), one, vec![0; 6]).unwrap();
        assert_eq!(induce(&constant, &lap).unwrap().vertices(), &[0; 7]);
        let bad = GraphMap::new(p(3), p(3), vec![0, 2, 0]).unwrap();
        assert_eq!(
            induce(&bad, &Walk::plain(p(3), vec![0]).unwrap()),
            Err(WalkError::NotHomomorphism)
        );
    }

    #[test]
    fn concat_examples() {
        let p3 = p(3);
        let a = Walk::plain(p3.clone(), vec![0, 1]).unwrap();
        let b = Walk::plain(p3.clone(), vec![1, 2]).unwrap();
        assert_eq!(concat(&a, &b).unwrap().vertices(), &[0, 1, 1, 2]);
        assert_eq!(join(&a, &b).unwrap().vertices(), &[0, 1, 2]);
        assert_eq!(concat(&Walk::empty(p3.clone()), &b).unwrap(), b);
        let far = Walk::plain(p3.clone(), vec![0]).unwrap();
        assert_eq!(
            concat(&far, &Walk::plain(p3, vec![2]).unwrap()),
            Err(WalkError::SeamNotAdjacent)
        );
        let h = g(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 2)]);
        let tail = Walk::plain(h.clone(), vec![0, 1]).unwrap();
        let loop_ = Walk::closed_lap(h, &[2, 3, 4]).unwrap();
        let l = concat(&tail, &loop_).unwrap();
        assert_eq!(l.kind(), WalkKind::Lasso { split: 2 });
        assert!(classify(&l).path);
    }

    #[test]
    fn reduce_examples() {
        let p2 = p(2);
        let w = Walk::plain(p2.clone(), vec![0, 0, 1]).unwrap();
        assert_eq!(reduce(&w).vertices(), &[0, 1]);
        let r = Walk::plain(p2, vec![0, 1, 0]).unwrap();
        assert_eq!(reduce(&r), r);
        let h = g(4, &[(0, 1), (1, 2), (2, 3), (3, 1)]);
        let l = Walk::lasso(h.clone(), vec![0, 1, 1, 2, 3, 1], 2).unwrap();
        let rl = reduce(&l);
        assert_eq!(rl.vertices(), &[0, 1, 2, 3, 1]);
        assert_eq!(rl.kind(), WalkKind::Lasso { split: 1 });
    }

    fn check_lift(f: &GraphMap, w: &Walk) {
        let v = lift_walk(f, w).unwrap();
        let img = induce(f, &v).unwrap();
        assert!(classify(&v).reduced, "{w:?} -> {v:?}");
        assert!(
            monotonically_refines(&img, w).unwrap().is_some(),
            "{w:?} -> {v:?}"
        );
        assert_eq!(
            core::mem::discriminant(&v.kind()),
            core::mem::discriminant(&w.kind())
        );
        let (fw, fv) = (classify(w), classify(&v));
        if fw.path && !matches!(w.kind(), WalkKind::Lasso { .. }) {
            assert!(fv.path, "{w:?} -> {v:?}");
        }
    }

    #[test]
    fn lift_examples() {
        let c6 = c(6);
        let lap = Walk::closed_lap(c6.clone(), &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(
            lift_walk(&GraphMap::identity(c6.clone()), &lap).unwrap(),
            lap
        );
        let c3 = c(3);
        let collapse =
            GraphMap::new(c6.clone(), c3.clone(), (0..6).map(|i| i / 2).collect()).unwrap();
        check_lift(&collapse, &Walk::closed_lap(c3, &[0, 1, 2]).unwrap());
        let p6 = p(6);
        let p2 = p(2);
        let half = GraphMap::new(p6, p2.clone(), vec![0, 0, 0, 1, 1, 1]).unwrap();
        let v = lift_walk(&half, &Walk::plain(p2, vec![0, 1]).unwrap()).unwrap();
        assert_eq!(v.vertices(), &[0, 1, 2, 3]);
        assert!(matches!(
            lift_walk(&collapse, &Walk::plain(c(3), vec![0, 0]).unwrap()),
            Err(WalkError::NotReduced { index: 0 })
        ));
    }

    #[test]
    fn lift_all_small_epis() {
        let domains = [
            g(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]),
            g(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]),
            g(6, &[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 3), (1, 2)]),
        ];
        let codomains = [
            c(3),
            p(3),
            g(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            g(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]),
        ];
        for d in &domains {
            for h in &codomains {
                for a in enumerate_monotone_epimorphisms(d, h) {
                    let f = GraphMap::new(d.clone(), h.clone(), a).unwrap();
                    for w in reduced_walks(h, 5) {
                        check_lift(&f, &w);
                    }
                }
            }
        }
    }

    pub(crate) fn reduced_walks(h: &Arc<Graph>, max_len: usize) -> Vec<Walk> {
        let mut seqs: Vec<Vec<usize>> = (0..h.n()).map(|x| vec![x]).collect();
        let mut all = seqs.clone();
        for _ in 1..max_len {
            let mut next = Vec::new();
            for s in &seqs {
                for &y in h.neighbors(*s.last().unwrap()) {
                    let mut t = s.clone();
                    t.push(y);
                    next.push(t);
                }
            }
            all.extend(next.iter().cloned());
            seqs = next;
        }
        let mut out = Vec::new();
        for s in all {
            out.push(Walk::plain(h.clone(), s.clone()).unwrap());
            if s.len() >= 3 && s[0] == s[s.len() - 1] {
                out.push(Walk::circular(h.clone(), s.clone()).unwrap());
            }
            for split in 1..s.len() {
                if s.len() - split >= 3 && s[split] == s[s.len() - 1] {
                    out.push(Walk::lasso(h.clone(), s.clone(), split).unwrap());
                }
            }
        }
        out
    }
}
