use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{enumerate_monotone_epimorphisms, Graph, GraphMap};
use crate::space::refinement_assignment;
use crate::walk::{classify, Walk};

use super::refute::{identity_candidate, refute_candidate, Refutation, Violation};
use super::{AmalgamationCandidate, AmalgamationError, IrreconcilablePair, RobustCycleWitness};

/// Graphs are enumerated explicitly only up to this many vertices.
pub const EXPLICIT_MAX_VERTICES: usize = 6;

/// Reachable automaton states beyond which the search gives up.
pub const STATE_LIMIT: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub z_vertex_bound: usize,
    pub z_length_bound: usize,
}

/// Tallies of the explicit enumeration, one per filter stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExplicitCounts {
    /// Connected graphs up to isomorphism with `|W| ≤ |Z| ≤` the vertex bound.
    pub graphs: usize,
    /// Ordered pairs of monotone epimorphisms `Z → W`.
    pub epi_pairs: usize,
    /// Pairs with `ρα₀, ρα₁` within distance 1 in `U`.
    pub close_pairs: usize,
    /// Close pairs admitting a reduced `z` within the length bound with `α_i·z ⊑ w_i`.
    pub with_walk: usize,
}

/// Tallies of the pair automaton.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AutomatonCounts {
    /// Reachable states in total.
    pub states: usize,
    /// Reachable states in which neither side has covered its path.
    pub tracking: usize,
    /// Reachable states in which exactly one side has covered its path.
    pub one_side_done: usize,
    /// Reachable states in which both sides have covered their paths.
    pub accepting: usize,
    /// Whether every reachable state was found within the length bound,
    /// so the result holds for walks of any length.
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurvivorOrigin {
    /// Realized from an accepting run of the pair automaton.
    Automaton,
    /// Found by explicit enumeration of graphs, maps and walks.
    Explicit,
    /// `Z = W` with identity maps.
    Identity,
}

/// A candidate meeting every amalgamation condition.
#[derive(Debug, Clone)]
pub struct Survivor {
    pub origin: SurvivorOrigin,
    pub candidate: AmalgamationCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NearMissKind {
    /// The run of the automaton that gets furthest along `w_side` while
    /// both sides still follow their paths.
    Stalled { side: usize, reached: [usize; 2] },
    /// `Z = W`, identity maps, `z = w_side`; only side `1 − side` can fail.
    OneSided { side: usize },
}

/// A candidate that fails at least one condition, with its refutation.
#[derive(Debug, Clone)]
pub struct NearMiss {
    pub kind: NearMissKind,
    pub candidate: AmalgamationCandidate,
    pub refutation: Refutation,
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub bounds: SearchBounds,
    pub w_blocks: usize,
    pub automaton: AutomatonCounts,
    /// Length of the shortest accepting run, if any.
    pub shortest_accepting: Option<usize>,
    pub explicit: Option<ExplicitCounts>,
    pub survivors: Vec<Survivor>,
    pub near_misses: Vec<NearMiss>,
    pub notes: Vec<String>,
}

/// Searches for amalgamation candidates for the pair.
///
/// A pair automaton tracks `(α₀·z(j), α₁·z(j))`. While side `i` has not yet
/// covered `w_i`, a refining walk can only step back, stay, or step forward
/// along the spaced path `w_i`; once it has, it moves freely in `W`. Both
/// images must lie over blocks of `U` that are equal or adjacent. Every
/// candidate, whatever the size of `Z`, yields a run of the automaton, and
/// every accepting run is realized by a candidate on
/// `Z ⊆ W ⊠ W`, so the automaton decides existence for walks up to the
/// length bound.
///
/// When the vertex bound is at most [`EXPLICIT_MAX_VERTICES`], all connected
/// graphs up to isomorphism, all pairs of monotone epimorphisms into `W`
/// and all short walks are enumerated as well.
///
/// Near-misses are the stalled automaton runs and the identity candidates
/// along either path; each goes through [`refute_candidate`].
pub fn exhaustive_search(
    witness: &RobustCycleWitness,
    pair: &IrreconcilablePair,
    bounds: SearchBounds,
) -> Result<SearchReport, AmalgamationError> {
    let w_nerve = pair.w_partition.nerve().clone();
    for w in pair.paths() {
        if !classify(w).spaced_path || **w.host() != *w_nerve {
            return Err(AmalgamationError::Precondition(
                "both walks of the pair must be spaced paths on the nerve of W".into(),
            ));
        }
    }
    let to_u = refinement_assignment(&pair.w_partition, &witness.u_pair.partition)?;
    let u_nerve = witness.u_pair.partition.nerve().clone();
    let mut report = SearchReport {
        bounds,
        w_blocks: w_nerve.n(),
        automaton: AutomatonCounts::default(),
        shortest_accepting: None,
        explicit: None,
        survivors: Vec::new(),
        near_misses: Vec::new(),
        notes: Vec::new(),
    };
    if bounds.z_length_bound == 0 {
        report
            .notes
            .push("length bound 0 admits only the empty walk, which refines nothing".into());
        return Ok(report);
    }
    let lines = Lines {
        w: [pair.w0.vertices(), pair.w1.vertices()],
        nerve: &w_nerve,
        to_u: &to_u,
        u: &u_nerve,
    };
    let run = lines.explore(bounds.z_length_bound)?;
    report.automaton = run.counts;
    if let Some(goal) = run.first_accepting {
        let path = run.path_to(goal);
        report.shortest_accepting = Some(path.len());
        report.survivors.push(Survivor {
            origin: SurvivorOrigin::Automaton,
            candidate: lines.realize(&path)?,
        });
    }
    if !run.counts.closed {
        report.notes.push(format!(
            "automaton frontier not exhausted at length {}",
            bounds.z_length_bound
        ));
    }

    if bounds.z_vertex_bound <= EXPLICIT_MAX_VERTICES {
        let (counts, found) = explicit_search(&lines, &w_nerve, bounds)?;
        report.explicit = Some(counts);
        report.survivors.extend(found.into_iter().map(|candidate| Survivor {
            origin: SurvivorOrigin::Explicit,
            candidate,
        }));
    } else {
        report.notes.push(format!(
            "explicit graph enumeration skipped: vertex bound {} exceeds {EXPLICIT_MAX_VERTICES}; \
             the automaton covers every size of Z",
            bounds.z_vertex_bound
        ));
    }

    for side in 0..2 {
        if let Some(state) = run.furthest_tracking(side) {
            let path = run.path_to(state);
            let candidate = lines.realize(&path)?;
            let reached = [state.0.index(), state.1.index()];
            route(
                &mut report,
                witness,
                pair,
                NearMissKind::Stalled { side, reached },
                candidate,
                SurvivorOrigin::Automaton,
            )?;
        }
        route(
            &mut report,
            witness,
            pair,
            NearMissKind::OneSided { side },
            identity_candidate(pair, side),
            SurvivorOrigin::Identity,
        )?;
    }
    Ok(report)
}

/// Sends a candidate through the refuter; those failing a condition are
/// near-misses, the others survivors.
fn route(
    report: &mut SearchReport,
    witness: &RobustCycleWitness,
    pair: &IrreconcilablePair,
    kind: NearMissKind,
    candidate: AmalgamationCandidate,
    origin: SurvivorOrigin,
) -> Result<(), AmalgamationError> {
    match refute_candidate(witness, pair, &candidate) {
        Ok(refutation) if matches!(refutation.violation, Violation::Condition(_)) => {
            report.near_misses.push(NearMiss {
                kind,
                candidate,
                refutation,
            });
        }
        Ok(_) | Err(AmalgamationError::Consistent(_)) => {
            report.survivors.push(Survivor { origin, candidate });
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

/// Position of one side: on `w(a)` before the path is covered, or at a
/// free vertex of `W` afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Pos {
    Track(u32),
    Free(u32),
}

impl Pos {
    fn index(self) -> usize {
        match self {
            Pos::Track(a) | Pos::Free(a) => a as usize,
        }
    }
}

type State = (Pos, Pos);

struct Lines<'a> {
    w: [&'a [usize]; 2],
    nerve: &'a Arc<Graph>,
    to_u: &'a [usize],
    u: &'a Graph,
}

struct Run {
    seen: BTreeMap<State, (State, u32)>,
    start: State,
    first_accepting: Option<State>,
    counts: AutomatonCounts,
}

impl Run {
    fn path_to(&self, mut s: State) -> Vec<State> {
        let mut out = vec![s];
        while s != self.start {
            s = self.seen[&s].0;
            out.push(s);
        }
        out.reverse();
        out
    }

    /// The tracking state furthest along side `side`, ties to the earliest.
    fn furthest_tracking(&self, side: usize) -> Option<State> {
        self.seen
            .iter()
            .filter(|(s, _)| matches!(s, (Pos::Track(_), Pos::Track(_))))
            .max_by_key(|(s, (_, d))| {
                let a = if side == 0 { s.0.index() } else { s.1.index() };
                (a, core::cmp::Reverse(*d))
            })
            .map(|(s, _)| *s)
    }
}

impl Lines<'_> {
    fn vertex(&self, side: usize, p: Pos) -> usize {
        match p {
            Pos::Track(a) => self.w[side][a as usize],
            Pos::Free(x) => x as usize,
        }
    }

    fn start(&self, side: usize) -> Pos {
        if self.w[side].len() == 1 {
            Pos::Free(self.w[side][0] as u32)
        } else {
            Pos::Track(0)
        }
    }

    fn moves(&self, side: usize, p: Pos) -> Vec<Pos> {
        let w = self.w[side];
        let last = w.len() as u32 - 1;
        match p {
            Pos::Track(a) => {
                let mut out = Vec::with_capacity(3);
                if a > 0 {
                    out.push(Pos::Track(a - 1));
                }
                out.push(Pos::Track(a));
                out.push(if a + 1 == last {
                    Pos::Free(w[last as usize] as u32)
                } else {
                    Pos::Track(a + 1)
                });
                out
            }
            Pos::Free(x) => core::iter::once(x)
                .chain(self.nerve.neighbors(x as usize).iter().map(|&y| y as u32))
                .map(Pos::Free)
                .collect(),
        }
    }

    fn coupled(&self, s: State) -> bool {
        self.u.adjacent(
            self.to_u[self.vertex(0, s.0)],
            self.to_u[self.vertex(1, s.1)],
        )
    }

    /// Breadth-first search over states reachable by runs of at most `len` states.
    fn explore(&self, len: usize) -> Result<Run, AmalgamationError> {
        let start = (self.start(0), self.start(1));
        let mut run = Run {
            seen: BTreeMap::new(),
            start,
            first_accepting: None,
            counts: AutomatonCounts {
                closed: true,
                ..Default::default()
            },
        };
        if !self.coupled(start) {
            return Ok(run);
        }
        run.seen.insert(start, (start, 1));
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            let depth = run.seen[&s].1;
            match s {
                (Pos::Track(_), Pos::Track(_)) => run.counts.tracking += 1,
                (Pos::Free(_), Pos::Free(_)) => {
                    run.counts.accepting += 1;
                    run.first_accepting.get_or_insert(s);
                }
                _ => run.counts.one_side_done += 1,
            }
            let next0 = self.moves(0, s.0);
            let next1 = self.moves(1, s.1);
            for &a in &next0 {
                for &b in &next1 {
                    let t = (a, b);
                    if t == s || run.seen.contains_key(&t) || !self.coupled(t) {
                        continue;
                    }
                    if depth as usize >= len {
                        run.counts.closed = false;
                        continue;
                    }
                    run.seen.insert(t, (s, depth + 1));
                    queue.push_back(t);
                }
            }
            if run.seen.len() > STATE_LIMIT {
                return Err(AmalgamationError::Precondition(format!(
                    "resource limit: more than {STATE_LIMIT} automaton states; \
                     {} tracking and {} one-sided states explored so far",
                    run.counts.tracking, run.counts.one_side_done
                )));
            }
        }
        run.counts.states = run.seen.len();
        Ok(run)
    }

    /// A candidate on `Z ⊆ W ⊠ W` whose walk is the given run.
    ///
    /// `Z` holds the diagonal, and for each state `(x, y)` the square
    /// `g × g` of a path `g` from `x` to `y` that stays over the blocks of `U`
    /// under `x` and `y`. The projections are monotone epimorphisms whose
    /// images stay within distance 1 in `U`.
    fn realize(&self, run: &[State]) -> Result<AmalgamationCandidate, AmalgamationError> {
        let n = self.nerve.n();
        let mut extra: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut pairs = Vec::with_capacity(run.len());
        for &s in run {
            let (x, y) = (self.vertex(0, s.0), self.vertex(1, s.1));
            pairs.push((x, y));
            if x == y {
                continue;
            }
            let g = self.path_over(x, y).ok_or_else(|| {
                AmalgamationError::Check(format!("no path from {x} to {y} over their U blocks"))
            })?;
            for &p in &g {
                for &q in &g {
                    if p != q {
                        let next = n + extra.len();
                        extra.entry((p, q)).or_insert(next);
                    }
                }
            }
        }
        let id = |p: usize, q: usize| -> Option<usize> {
            if p == q {
                Some(p)
            } else {
                extra.get(&(p, q)).copied()
            }
        };
        let total = n + extra.len();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); total];
        for (a, b) in self.nerve.edges() {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let closed = |x: usize| {
            core::iter::once(x).chain(self.nerve.neighbors(x).iter().copied())
        };
        for (&(p, q), &v) in &extra {
            for r in closed(p) {
                for t in closed(q) {
                    if let Some(o) = id(r, t) {
                        if o != v {
                            adj[v].insert(o);
                            adj[o].insert(v);
                        }
                    }
                }
            }
        }
        let mut first = vec![0; total];
        let mut second = vec![0; total];
        for x in 0..n {
            first[x] = x;
            second[x] = x;
        }
        for (&(p, q), &v) in &extra {
            first[v] = p;
            second[v] = q;
        }
        let z_graph = Arc::new(Graph::from_adjacency(
            adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        )?);
        let w = self.nerve.clone();
        let z_seq = pairs
            .iter()
            .map(|&(x, y)| id(x, y).expect("every state is a vertex of Z"))
            .collect();
        Ok(AmalgamationCandidate {
            alpha0: GraphMap::new(z_graph.clone(), w.clone(), first)?,
            alpha1: GraphMap::new(z_graph.clone(), w, second)?,
            z: Walk::plain(z_graph.clone(), z_seq)?,
            z_graph,
        })
    }

    /// Shortest path in `W` from `x` to `y` over the `U` blocks of `x` and `y`.
    fn path_over(&self, x: usize, y: usize) -> Option<Vec<usize>> {
        let (a, b) = (self.to_u[x], self.to_u[y]);
        let mut parent = BTreeMap::from([(x, x)]);
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            if v == y {
                let mut path = vec![y];
                let mut cur = y;
                while cur != x {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &t in self.nerve.neighbors(v) {
                let u = self.to_u[t];
                if (u == a || u == b) && !parent.contains_key(&t) {
                    parent.insert(t, v);
                    queue.push_back(t);
                }
            }
        }
        None
    }
}

/// Explicit enumeration of `(Z, α₀, α₁, z)` for small vertex bounds.
fn explicit_search(
    lines: &Lines<'_>,
    w_nerve: &Arc<Graph>,
    bounds: SearchBounds,
) -> Result<(ExplicitCounts, Vec<AmalgamationCandidate>), AmalgamationError> {
    let mut counts = ExplicitCounts::default();
    let mut found = Vec::new();
    for k in w_nerve.n().max(1)..=bounds.z_vertex_bound {
        for z_graph in connected_graphs(k) {
            counts.graphs += 1;
            let z_graph = Arc::new(z_graph);
            let epis: Vec<Vec<usize>> =
                enumerate_monotone_epimorphisms(&z_graph, w_nerve).collect();
            for a0 in &epis {
                for a1 in &epis {
                    counts.epi_pairs += 1;
                    if !(0..k).all(|x| lines.u.adjacent(lines.to_u[a0[x]], lines.to_u[a1[x]])) {
                        continue;
                    }
                    counts.close_pairs += 1;
                    let Some(z) = refining_walk(&z_graph, [a0, a1], lines.w, bounds.z_length_bound)
                    else {
                        continue;
                    };
                    counts.with_walk += 1;
                    if found.len() < 8 {
                        found.push(AmalgamationCandidate {
                            alpha0: GraphMap::new(z_graph.clone(), w_nerve.clone(), a0.clone())?,
                            alpha1: GraphMap::new(z_graph.clone(), w_nerve.clone(), a1.clone())?,
                            z: Walk::plain(z_graph.clone(), z)?,
                            z_graph: z_graph.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok((counts, found))
}

/// A shortest reduced walk on `z` of at most `len` vertices along which
/// `α_i·z ⊑ w_i` for both sides.
fn refining_walk(
    z: &Graph,
    alpha: [&[usize]; 2],
    w: [&[usize]; 2],
    len: usize,
) -> Option<Vec<usize>> {
    // a state is a vertex of Z and the number of covered vertices per side
    type St = (usize, usize, usize);
    let step = |side: usize, covered: usize, v: usize| -> Option<usize> {
        let w = w[side];
        if covered == w.len() || w[..covered].contains(&v) {
            Some(covered)
        } else if w[covered] == v {
            Some(covered + 1)
        } else {
            None
        }
    };
    let mut parent: BTreeMap<St, St> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for x in 0..z.n() {
        let (Some(c0), Some(c1)) = (step(0, 0, alpha[0][x]), step(1, 0, alpha[1][x])) else {
            continue;
        };
        if c0 == 0 || c1 == 0 {
            continue;
        }
        let s = (x, c0, c1);
        parent.insert(s, s);
        queue.push_back((s, 1));
    }
    while let Some((s, depth)) = queue.pop_front() {
        if s.1 == w[0].len() && s.2 == w[1].len() {
            let mut out = vec![s.0];
            let mut cur = s;
            while parent[&cur] != cur {
                cur = parent[&cur];
                out.push(cur.0);
            }
            out.reverse();
            return Some(out);
        }
        if depth >= len {
            continue;
        }
        for &y in z.neighbors(s.0) {
            let (Some(c0), Some(c1)) = (step(0, s.1, alpha[0][y]), step(1, s.2, alpha[1][y]))
            else {
                continue;
            };
            let t = (y, c0, c1);
            if let alloc::collections::btree_map::Entry::Vacant(e) = parent.entry(t) {
                e.insert(s);
                queue.push_back((t, depth + 1));
            }
        }
    }
    None
}

/// Lexicographically least upper-triangle adjacency code over all vertex
/// orders, read column by column; equal codes mean isomorphic graphs.
///
/// Supports up to 11 vertices.
pub fn canonical_code(g: &Graph) -> u64 {
    let n = g.n();
    assert!(n <= 11, "canonical_code supports at most 11 vertices");
    let mut best = u64::MAX;
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search_code(g, &mut order, &mut used, 0, &mut best);
    best
}

fn search_code(g: &Graph, order: &mut Vec<usize>, used: &mut [bool], code: u64, best: &mut u64) {
    let n = g.n();
    let j = order.len();
    if j == n {
        *best = (*best).min(code);
        return;
    }
    // bits still to come after column j
    let rest = (j + 1..n).map(|c| c as u32).sum::<u32>();
    for v in 0..n {
        if used[v] {
            continue;
        }
        let mut c = code;
        for &u in order.iter() {
            c = (c << 1) | u64::from(g.adjacent(u, v));
        }
        if (c << rest) > *best {
            continue;
        }
        used[v] = true;
        order.push(v);
        search_code(g, order, used, c, best);
        order.pop();
        used[v] = false;
    }
}

/// Connected graphs on `k` vertices, one per isomorphism class, each
/// labeled so that its code under the identity order is canonical.
pub fn connected_graphs(k: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let m = pairs.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << m) {
        let edges: Vec<(usize, usize)> = (0..m)
            .filter(|&b| mask >> (m - 1 - b) & 1 == 1)
            .map(|b| pairs[b])
            .collect();
        let Ok(g) = Graph::new(k, &edges) else {
            continue;
        };
        if !g.is_connected_subset(&(0..k).collect::<Vec<_>>()) {
            continue;
        }
        if canonical_code(&g) == mask {
            out.push(g);
        }
    }
    out
}
