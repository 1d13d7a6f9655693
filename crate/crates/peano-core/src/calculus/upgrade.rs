use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::graph::Graph;
use crate::space::BrickPartition;
use crate::walk::{classify, is_uncrossed_seq, Walk};

use super::route::{fatten, overlay, segment, FattenOptions, Track, TrackKind};
use super::{pair_monotone_witness, pair_refines, CalculusError, WalkOnPartition};

/// Buffers (fine distance to older parts of the routes) tried at each step.
const BUFFERS: [usize; 3] = [3, 1, 0];

/// One induction step: leave the current block set and enter `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Step {
    through: Vec<usize>,
    target: usize,
}

/// Uncrossed walks are followed block by block; crossed walks only need
/// to reach their blocks in order of first occurrence.
fn steps_of(v: &[usize]) -> Vec<Step> {
    if is_uncrossed_seq(v) {
        v.windows(2)
            .map(|p| Step {
                through: vec![p[0]],
                target: p[1],
            })
            .collect()
    } else {
        let mut seen: Vec<usize> = Vec::new();
        for &b in v {
            if !seen.contains(&b) {
                seen.push(b);
            }
        }
        (1..seen.len())
            .map(|k| Step {
                through: seen[..k].to_vec(),
                target: seen[k],
            })
            .collect()
    }
}

/// A spaced path `w` on a refinement of `p` with `(W,w) ⪯ (p,v)`; when `v`
/// is uncrossed, `ρ·w` monotonically refines `v`.
///
/// The walk is realized as an induced fine route: every extension from the
/// current end stays in the allowed blocks, avoids the route and everything
/// adjacent to it except the end, and prefers to keep a buffer from older
/// parts of the route. The route is then cut at block changes into short
/// segments, which become the blocks of `w`.
pub fn upgrade_to_path(
    p: &Arc<BrickPartition>,
    v: &Walk,
    budget: u32,
) -> Result<WalkOnPartition, CalculusError> {
    let (partition, mut walks) = upgrade_many(p, core::slice::from_ref(v), budget)?;
    WalkOnPartition::new(partition, walks.remove(0))
}

/// Upgrades several reduced walks onto one common refinement.
///
/// Each walk gets its own induced route from the deepest vertex of its
/// first block. Routes may cross each other; the blocks of the common
/// refinement are the maximal runs along which every route stays in one
/// segment, so each output is still a spaced path.
pub fn upgrade_many(
    p: &Arc<BrickPartition>,
    vs: &[Walk],
    budget: u32,
) -> Result<(Arc<BrickPartition>, Vec<Walk>), CalculusError> {
    upgrade_many_with(p, vs, budget, None)
}

/// Extra cost of entering each fine vertex at the given level.
pub(crate) type Preference<'a> = &'a dyn Fn(&BrickPartition) -> Vec<u32>;

/// [`upgrade_many`], with route extensions taking the cheapest path under
/// `pref` instead of the shortest one.
pub(crate) fn upgrade_many_with(
    p: &Arc<BrickPartition>,
    vs: &[Walk],
    budget: u32,
    pref: Option<Preference<'_>>,
) -> Result<(Arc<BrickPartition>, Vec<Walk>), CalculusError> {
    if vs.is_empty() {
        return Err(CalculusError::Precondition("nothing to upgrade".into()));
    }
    for v in vs {
        WalkOnPartition::new(p.clone(), v.clone())?;
        if v.is_empty() || !classify(v).reduced {
            return Err(CalculusError::Precondition(
                "upgrade_to_path needs a nonempty reduced walk".into(),
            ));
        }
    }
    let steps: Vec<Vec<Step>> = vs.iter().map(|v| steps_of(v.vertices())).collect();
    let base = p.space().level();
    let mut failure = None;
    'levels: for level in base..=base + budget {
        let fine = p.pull_to_level(level);
        let cost = pref.map(|f| f(&fine));
        let mut routes = Vec::with_capacity(vs.len());
        for (t, (v, track)) in vs.iter().zip(&steps).enumerate() {
            let mut r = Router::new(
                fine.space().fine(),
                fine.block_of(),
                deepest(&fine, v.vertices()[0]),
                cost.as_deref(),
            );
            for (k, step) in track.iter().enumerate() {
                if r.extend(step).is_none() {
                    failure = Some((level, Some((t, k))));
                    continue 'levels;
                }
            }
            routes.push(r.route);
        }
        let extra = level - base;
        let max_len = 3usize.pow(extra);
        let chop = extra.saturating_sub(1);
        let (partition, walks) = if routes.len() == 1 {
            let track = Track {
                segments: segment(fine.block_of(), &routes[0], max_len, &[]),
                kind: TrackKind::Plain,
            };
            let opts = FattenOptions {
                fill_corners: true,
                grow: Some(usize::MAX),
                can_grow: &|_, _| true,
                chop: Some(chop),
            };
            let f = fatten(&fine, &[track], &opts)?;
            (f.partition, f.walks)
        } else {
            overlay(&fine, &routes, max_len, chop)?
        };
        let partition = Arc::new(partition);
        let mut ok = true;
        for (w, v) in walks.iter().zip(vs) {
            let out = WalkOnPartition::new(partition.clone(), w.clone())?;
            let input = WalkOnPartition::new(p.clone(), v.clone())?;
            let monotone_ok =
                !is_uncrossed_seq(v.vertices()) || pair_monotone_witness(&out, &input)?.is_some();
            ok &= classify(w).spaced_path && pair_refines(&out, &input)? && monotone_ok;
        }
        if ok {
            return Ok((partition, walks));
        }
        failure = Some((level, None));
    }
    let detail = match failure.expect("at least one level tried") {
        (level, Some((t, k))) => format!("induction step {k} of walk {t} blocked at level {level}"),
        (level, None) => format!("postconditions failed at level {level}"),
    };
    Err(CalculusError::budget("upgrade_to_path", detail))
}

/// The vertex of block `b` farthest from the other blocks, lowest index first.
fn deepest(p: &BrickPartition, b: usize) -> usize {
    let g = p.space().fine();
    let outside: Vec<usize> = (0..g.n()).filter(|&x| p.block_of()[x] != b).collect();
    if outside.is_empty() {
        return p.block(b)[0];
    }
    let d = g.bfs(&outside);
    let mut best = p.block(b)[0];
    for &x in p.block(b) {
        if d[x] > d[best] {
            best = x;
        }
    }
    best
}

/// An induced fine route under construction.
///
/// Extensions never use `taken` vertices, vertices of the route, or
/// vertices adjacent to the route before its end. They prefer to stay more
/// than a buffer away from the old part of the route (all but the last
/// `2·buffer + 2` entries) and from other tracks; the marks for each
/// nonzero buffer are kept up to date as the route grows.
#[derive(Clone)]
struct Router<'a> {
    g: &'a Graph,
    block: &'a [usize],
    route: Vec<usize>,
    on_route: Vec<bool>,
    touched: Vec<bool>,
    touched_upto: usize,
    cost: Option<&'a [u32]>,
    near: [Vec<bool>; 2],
    aged: [usize; 2],
    parent: Vec<usize>,
    dist: Vec<u64>,
    stamp: Vec<u32>,
    round: u32,
}

impl<'a> Router<'a> {
    fn new(g: &'a Graph, block: &'a [usize], start: usize, cost: Option<&'a [u32]>) -> Self {
        let n = g.n();
        let mut on_route = vec![false; n];
        on_route[start] = true;
        Router {
            g,
            block,
            route: vec![start],
            on_route,
            touched: vec![false; n],
            touched_upto: 0,
            cost,
            near: [vec![false; n], vec![false; n]],
            aged: [0, 0],
            parent: vec![0; n],
            dist: vec![0; n],
            stamp: vec![0; n],
            round: 0,
        }
    }

    fn mark_near(&mut self, which: usize, x: usize) {
        let radius = BUFFERS[which];
        let mut seen = BTreeSet::from([x]);
        let mut frontier = vec![x];
        self.near[which][x] = true;
        for _ in 0..radius {
            let mut next = Vec::new();
            for &a in &frontier {
                for &b in self.g.neighbors(a) {
                    if seen.insert(b) {
                        self.near[which][b] = true;
                        next.push(b);
                    }
                }
            }
            frontier = next;
        }
    }

    fn refresh(&mut self) {
        let len = self.route.len();
        while self.touched_upto + 1 < len {
            let x = self.route[self.touched_upto];
            self.touched[x] = true;
            for &y in self.g.neighbors(x) {
                self.touched[y] = true;
            }
            self.touched_upto += 1;
        }
        for which in 0..2 {
            let keep = 2 * BUFFERS[which] + 2;
            while self.aged[which] + keep < len {
                let x = self.route[self.aged[which]];
                self.mark_near(which, x);
                self.aged[which] += 1;
            }
        }
    }

    fn extend(&mut self, step: &Step) -> Option<()> {
        let end = *self.route.last().expect("nonempty route");
        for which in 0..BUFFERS.len() {
            let found = self.search(end, step, which);
            if let Some(path) = found {
                for &x in &path[1..] {
                    self.on_route[x] = true;
                }
                self.route.extend_from_slice(&path[1..]);
                self.refresh();
                return Some(());
            }
        }
        None
    }

    // cheapest path through the allowed blocks, reusing buffers across calls
    fn search(&mut self, end: usize, step: &Step, which: usize) -> Option<Vec<usize>> {
        self.round += 1;
        let round = self.round;
        let usable = |s: &Self, x: usize| {
            (step.through.contains(&s.block[x]) || s.block[x] == step.target)
                && !s.on_route[x]
                && !s.touched[x]
                && (which >= 2 || !s.near[which][x])
        };
        let mut heap = BinaryHeap::from([Reverse((0u64, end))]);
        self.stamp[end] = round;
        self.parent[end] = end;
        self.dist[end] = 0;
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > self.dist[x] {
                continue;
            }
            if x != end && self.block[x] == step.target {
                let mut path = vec![x];
                let mut cur = x;
                while self.parent[cur] != cur {
                    cur = self.parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &y in self.g.neighbors(x) {
                if !usable(self, y) {
                    continue;
                }
                let nd = d + 1 + self.cost.map_or(0, |c| u64::from(c[y]));
                if self.stamp[y] != round || nd < self.dist[y] {
                    self.stamp[y] = round;
                    self.dist[y] = nd;
                    self.parent[y] = x;
                    heap.push(Reverse((nd, y)));
                }
            }
        }
        None
    }
}
