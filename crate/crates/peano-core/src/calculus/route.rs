//! Fine routes: simple paths of fine vertices that realize nerve walks, and
//! the fattening step that turns segmented routes into blocks.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Graph;
use crate::space::BrickPartition;
use crate::walk::{Walk, WalkKind};

use super::CalculusError;

/// Lowest-index breadth-first route from `sources` to the first dequeued
/// vertex satisfying `target`, moving only through `allowed` vertices.
/// Sources are always admitted.
pub(crate) fn bfs_route(
    g: &Graph,
    sources: &[usize],
    allowed: impl Fn(usize) -> bool,
    target: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if parent[s] == usize::MAX {
            parent[s] = s;
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        if target(x) {
            let mut path = vec![x];
            let mut cur = x;
            while parent[cur] != cur {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &y in g.neighbors(x) {
            if parent[y] == usize::MAX && allowed(y) {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

/// Breadth-first route through phases `0..phases`: a step stays in its
/// phase or advances by one, and phase `k` only admits vertices with
/// `allowed(k, x)`. Starts in phase 0 at `starts` and ends at the first
/// dequeued vertex of the last phase satisfying `target`.
///
/// Returns `(vertex, phase)` pairs; a vertex may repeat across phases.
pub(crate) fn phased_route(
    g: &Graph,
    phases: usize,
    starts: &[usize],
    allowed: impl Fn(usize, usize) -> bool,
    target: impl Fn(usize) -> bool,
) -> Option<Vec<(usize, usize)>> {
    let n = g.n();
    let mut parent = vec![usize::MAX; n * phases];
    let mut queue = VecDeque::new();
    for &s in starts {
        if parent[s] == usize::MAX && allowed(0, s) {
            parent[s] = s;
            queue.push_back(s);
        }
    }
    while let Some(state) = queue.pop_front() {
        let (k, x) = (state / n, state % n);
        if k + 1 == phases && target(x) {
            let mut out = vec![(x, k)];
            let mut cur = state;
            while parent[cur] != cur {
                cur = parent[cur];
                out.push((cur % n, cur / n));
            }
            out.reverse();
            return Some(out);
        }
        for &y in g.neighbors(x) {
            for k2 in [k, k + 1] {
                if k2 < phases && allowed(k2, y) {
                    let next = k2 * n + y;
                    if parent[next] == usize::MAX {
                        parent[next] = state;
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    None
}

/// Two internally vertex-disjoint directed paths from `s` to `t`.
///
/// `out(x)` lists the permitted successors of `x`; only vertices with
/// `inside(x)` are used. Augmenting paths are found breadth-first over arcs
/// in construction order, so the result is deterministic.
pub(crate) fn two_disjoint_paths(
    n: usize,
    s: usize,
    t: usize,
    inside: impl Fn(usize) -> bool,
    out: impl Fn(usize) -> Vec<usize>,
) -> Option<[Vec<usize>; 2]> {
    // split vertex x into 2x (in) and 2x+1 (out); arcs carry capacity
    let mut head: Vec<usize> = Vec::new();
    let mut cap: Vec<i32> = Vec::new();
    let mut first: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    let mut add = |a: usize, b: usize, c: i32, first: &mut Vec<Vec<usize>>| {
        first[a].push(head.len());
        head.push(b);
        cap.push(c);
        first[b].push(head.len());
        head.push(a);
        cap.push(0);
    };
    for x in 0..n {
        if !inside(x) {
            continue;
        }
        let c = if x == s || x == t { 2 } else { 1 };
        add(2 * x, 2 * x + 1, c, &mut first);
        for y in out(x) {
            if inside(y) && y != x {
                add(2 * x + 1, 2 * y, 1, &mut first);
            }
        }
    }
    let (src, sink) = (2 * s, 2 * t + 1);
    for _ in 0..2 {
        let mut via = vec![usize::MAX; 2 * n];
        let mut seen = vec![false; 2 * n];
        seen[src] = true;
        let mut queue = VecDeque::from([src]);
        while let Some(a) = queue.pop_front() {
            if a == sink {
                break;
            }
            for &e in &first[a] {
                let b = head[e];
                if cap[e] > 0 && !seen[b] {
                    seen[b] = true;
                    via[b] = e;
                    queue.push_back(b);
                }
            }
        }
        if !seen[sink] {
            return None;
        }
        let mut b = sink;
        while b != src {
            let e = via[b];
            cap[e] -= 1;
            cap[e ^ 1] += 1;
            b = head[e ^ 1];
        }
    }
    // flow sits on the reverse arcs (odd indices) of saturated forward arcs
    let mut used: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..2 * n {
        for &e in &first[a] {
            if e % 2 == 0 && cap[e ^ 1] > 0 && a % 2 == 1 {
                used.entry(a / 2).or_default().push(head[e] / 2);
            }
        }
    }
    let mut paths: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for path in paths.iter_mut() {
        let mut x = s;
        path.push(x);
        while x != t {
            let next = used.get_mut(&x)?.pop()?;
            x = next;
            path.push(x);
        }
    }
    if paths[0] == paths[1] && paths[0].len() > 2 {
        return None;
    }
    Some(paths)
}

/// Splits a route at changes of `label`, after every `max_len` entries, and
/// before every position listed in `breaks`.
pub(crate) fn segment(
    label: &[usize],
    route: &[usize],
    max_len: usize,
    breaks: &[usize],
) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in route.iter().enumerate() {
        let fresh = match out.last() {
            None => true,
            Some(cur) => {
                label[cur[cur.len() - 1]] != label[x] || cur.len() >= max_len || breaks.contains(&i)
            }
        };
        if fresh {
            out.push(vec![x]);
        } else {
            out.last_mut().expect("nonempty").push(x);
        }
    }
    out
}

/// How the segments of a track are strung together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TrackKind {
    Plain,
    Circular,
    /// Segments `split..` form the circle.
    Lasso {
        split: usize,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Track {
    pub segments: Vec<Vec<usize>>,
    pub kind: TrackKind,
}

impl Track {
    // positions i and j may hold touching blocks
    fn near(&self, i: usize, j: usize) -> bool {
        self.kind.near(self.segments.len(), i, j)
    }
}

impl TrackKind {
    /// Whether positions `i` and `j` of a track with `m` positions may hold touching blocks.
    pub(crate) fn near(self, m: usize, i: usize, j: usize) -> bool {
        match self {
            TrackKind::Plain => i.abs_diff(j) <= 1,
            TrackKind::Circular => {
                let d = i.abs_diff(j);
                d.min(m - d) <= 1
            }
            TrackKind::Lasso { split } => {
                let (a, b) = (i.min(j), i.max(j));
                if b < split {
                    b - a <= 1
                } else if a >= split {
                    let d = b - a;
                    d.min(m - split - d) <= 1
                } else {
                    a + 1 == split && b == split
                }
            }
        }
    }
}

pub(crate) struct FattenOptions<'a> {
    /// Grow seeds into unclaimed vertices of their own coarse block, for at
    /// most this many layers.
    pub grow: Option<usize>,
    /// Give every diagonal step of a track a common face neighbor from one
    /// of its two ends, so blocks pulled back to finer levels stay thick.
    pub fill_corners: bool,
    /// Growth is only attempted when this returns true for (seed, vertex).
    pub can_grow: &'a dyn Fn(usize, usize) -> bool,
    /// Leftover vertices are cut along cells of side `3^chop` before taking components.
    pub chop: Option<u32>,
}

pub(crate) struct Fattened {
    pub partition: BrickPartition,
    pub walks: Vec<Walk>,
}

/// Builds a partition refining `p` whose first blocks are the (possibly
/// grown) segments of the tracks, then returns each track as a nerve walk.
///
/// Identical segments in different tracks become one block. Growth never
/// lets two blocks touch when some track holds them at non-adjacent
/// positions, so it cannot spoil the spacing of a track.
pub(crate) fn fatten(
    p: &BrickPartition,
    tracks: &[Track],
    opts: &FattenOptions<'_>,
) -> Result<Fattened, CalculusError> {
    let space = p.space();
    let g = space.fine();
    let n = space.n();
    let mut owner = vec![usize::MAX; n];
    let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut seeds: Vec<Vec<usize>> = Vec::new();
    let mut places: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut seed_of = Vec::with_capacity(tracks.len());
    for (ti, track) in tracks.iter().enumerate() {
        let mut row = Vec::with_capacity(track.segments.len());
        for (pos, seg) in track.segments.iter().enumerate() {
            if seg.is_empty() {
                return Err(CalculusError::Construction("empty route segment"));
            }
            let id = match ids.get(seg) {
                Some(&id) => id,
                None => {
                    let id = seeds.len();
                    let pb = p.block_of()[seg[0]];
                    for &x in seg {
                        if owner[x] != usize::MAX || p.block_of()[x] != pb {
                            return Err(CalculusError::Construction(
                                "route segments overlap or straddle blocks",
                            ));
                        }
                        owner[x] = id;
                    }
                    ids.insert(seg.clone(), id);
                    seeds.push(seg.clone());
                    places.push(Vec::new());
                    id
                }
            };
            places[id].push((ti, pos));
            row.push(id);
        }
        seed_of.push(row);
    }
    let compatible = |a: usize, b: usize| -> bool {
        if a == b {
            return true;
        }
        for &(ta, pa) in &places[a] {
            for &(tb, pb) in &places[b] {
                if ta == tb && !tracks[ta].near(pa, pb) {
                    return false;
                }
            }
        }
        true
    };
    if opts.fill_corners {
        let strong = space.strong();
        for (track, row) in tracks.iter().zip(&seed_of) {
            let route: Vec<(usize, usize)> = track
                .segments
                .iter()
                .zip(row)
                .flat_map(|(seg, &id)| seg.iter().map(move |&x| (x, id)))
                .collect();
            for pair in route.windows(2) {
                let ((x, a), (y, b)) = (pair[0], pair[1]);
                if strong.adjacent(x, y) {
                    continue;
                }
                'fill: for &c in strong.neighbors(x) {
                    if owner[c] != usize::MAX || !strong.adjacent(c, y) {
                        continue;
                    }
                    for id in [a, b] {
                        let home = p.block_of()[seeds[id][0]];
                        if p.block_of()[c] == home
                            && g.neighbors(c)
                                .iter()
                                .all(|&z| owner[z] == usize::MAX || compatible(id, owner[z]))
                        {
                            owner[c] = id;
                            break 'fill;
                        }
                    }
                }
            }
        }
    }
    if let Some(radius) = opts.grow {
        let mut layer = vec![usize::MAX; n];
        let mut frontier: Vec<usize> = Vec::new();
        for seg in &seeds {
            for &x in seg {
                layer[x] = 0;
                frontier.push(x);
            }
        }
        let mut cur = 0;
        while !frontier.is_empty() && cur < radius {
            cur += 1;
            let mut cand: Vec<usize> = frontier
                .iter()
                .flat_map(|&x| g.neighbors(x).iter().copied())
                .filter(|&y| owner[y] == usize::MAX)
                .collect();
            cand.sort_unstable();
            cand.dedup();
            let mut next = Vec::new();
            for x in cand {
                let pb = p.block_of()[x];
                let mut options: Vec<usize> = g
                    .neighbors(x)
                    .iter()
                    .filter(|&&y| owner[y] != usize::MAX && layer[y] < cur && p.block_of()[y] == pb)
                    .map(|&y| owner[y])
                    .filter(|&b| (opts.can_grow)(b, x))
                    .collect();
                options.sort_unstable();
                options.dedup();
                let pick = options.into_iter().find(|&b| {
                    g.neighbors(x)
                        .iter()
                        .all(|&y| owner[y] == usize::MAX || compatible(b, owner[y]))
                });
                if let Some(b) = pick {
                    owner[x] = b;
                    layer[x] = cur;
                    next.push(x);
                }
            }
            frontier = next;
        }
    }
    // leftover vertices: components of (coarse block, chop cell) classes
    let side = opts.chop.map(|c| 3usize.pow(c));
    let key = |x: usize| -> (usize, [usize; 3]) {
        let cell = space.cell(x);
        let c = match side {
            Some(s) => [cell[0] / s, cell[1] / s, cell[2] / s],
            None => [0; 3],
        };
        (p.block_of()[x], c)
    };
    let mut next_id = seeds.len();
    for s in 0..n {
        if owner[s] != usize::MAX {
            continue;
        }
        let k = key(s);
        owner[s] = next_id;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if owner[y] == usize::MAX && key(y) == k {
                    owner[y] = next_id;
                    stack.push(y);
                }
            }
        }
        next_id += 1;
    }
    let partition = BrickPartition::new(space.clone(), owner)?;
    let host = partition.nerve().clone();
    let mut walks = Vec::with_capacity(tracks.len());
    for (track, row) in tracks.iter().zip(&seed_of) {
        let w = match track.kind {
            TrackKind::Plain => Walk::plain(host.clone(), row.clone()),
            TrackKind::Circular => Walk::closed_lap(host.clone(), row),
            TrackKind::Lasso { split } => {
                let mut seq = row.clone();
                seq.push(row[split]);
                Walk::new(host.clone(), seq, WalkKind::Lasso { split })
            }
        }?;
        walks.push(w);
    }
    Ok(Fattened { partition, walks })
}

/// The common refinement of `p` by several induced routes.
///
/// Each route is cut into segments as by [`segment`]. A route vertex gets
/// the tuple of maximal runs, one per route through it, along which the
/// tuple of segments stays constant; two adjacent vertices of one route are
/// consecutive on it, so these runs are contiguous on every route through
/// them and each route becomes a spaced path of runs. Leftover vertices are
/// cut as in [`fatten`].
pub(crate) fn overlay(
    p: &BrickPartition,
    routes: &[Vec<usize>],
    max_len: usize,
    chop: u32,
) -> Result<(BrickPartition, Vec<Walk>), CalculusError> {
    let space = p.space();
    let n = space.n();
    let none = usize::MAX;
    let mut seg = vec![vec![none; n]; routes.len()];
    for (t, route) in routes.iter().enumerate() {
        for (i, part) in segment(p.block_of(), route, max_len, &[])
            .iter()
            .enumerate()
        {
            for &x in part {
                seg[t][x] = i;
            }
        }
    }
    let key = |x: usize| -> Vec<usize> { seg.iter().map(|s| s[x]).collect() };
    let mut run = vec![vec![none; n]; routes.len()];
    for (t, route) in routes.iter().enumerate() {
        let mut id = 0;
        for (i, &x) in route.iter().enumerate() {
            if i > 0 && key(x) != key(route[i - 1]) {
                id += 1;
            }
            run[t][x] = id;
        }
    }
    let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut owner = vec![none; n];
    for route in routes {
        for &x in route {
            let label: Vec<usize> = run.iter().map(|r| r[x]).collect();
            let next = ids.len();
            owner[x] = *ids.entry(label).or_insert(next);
        }
    }
    let side = 3usize.pow(chop);
    let cell_key = |x: usize| -> (usize, [usize; 3]) {
        let c = space.cell(x);
        (p.block_of()[x], [c[0] / side, c[1] / side, c[2] / side])
    };
    let g = space.fine();
    let mut next_id = ids.len();
    for s in 0..n {
        if owner[s] != none {
            continue;
        }
        let k = cell_key(s);
        owner[s] = next_id;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if owner[y] == none && cell_key(y) == k {
                    owner[y] = next_id;
                    stack.push(y);
                }
            }
        }
        next_id += 1;
    }
    let partition = BrickPartition::new(space.clone(), owner)?;
    let host = partition.nerve().clone();
    let mut walks = Vec::with_capacity(routes.len());
    for route in routes {
        let mut seq: Vec<usize> = Vec::new();
        for &x in route {
            let b = partition.block_of()[x];
            if seq.last() != Some(&b) {
                seq.push(b);
            }
        }
        walks.push(Walk::plain(host.clone(), seq)?);
    }
    Ok((partition, walks))
}

/// Whether non-consecutive entries of a route are never adjacent.
#[cfg(test)]
pub(crate) fn is_induced(g: &Graph, route: &[usize]) -> bool {
    let mut pos = BTreeMap::new();
    for (i, &x) in route.iter().enumerate() {
        if pos.insert(x, i).is_some() {
            return false;
        }
    }
    route.iter().enumerate().all(|(i, &x)| {
        g.neighbors(x).iter().all(|y| match pos.get(y) {
            Some(&j) => i.abs_diff(j) <= 1,
            None => true,
        })
    })
}
