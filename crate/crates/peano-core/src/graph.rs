//! Finite reflexive connected graphs, path metrics and graph maps.
//!
//! Vertices are dense indices `0..n`. Loops are implicit: [`Graph::adjacent`]
//! answers `true` on equal indices and [`Graph::edge_relation`] reports them,
//! but neighbor lists only hold distinct vertices.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Errors raised by graph construction and graph queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is disconnected: vertex {unreachable} not reachable from 0")]
    Disconnected { unreachable: usize },
    #[error("empty vertex set")]
    EmptySet,
    #[error("maps do not share domain and codomain")]
    MapMismatch,
    #[error("assignment has length {got}, domain has {expected} vertices")]
    AssignmentLength { got: usize, expected: usize },
}

/// A finite reflexive symmetric connected graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edges())
            .finish()
    }
}

impl Graph {
    /// Builds a graph from an edge list. Loops and duplicates are ignored.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        Self::from_adjacency(adj)
    }

    /// Builds a graph from neighbor lists, which are symmetrized and deduplicated.
    pub fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let n = adj.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut extra = Vec::new();
        for (a, list) in adj.iter().enumerate() {
            for &b in list {
                if b >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: b, n });
                }
                extra.push((b, a));
            }
        }
        for (b, a) in extra {
            adj[b].push(a);
        }
        for (a, list) in adj.iter_mut().enumerate() {
            list.retain(|&b| b != a);
            list.sort_unstable();
            list.dedup();
        }
        let g = Graph { adj };
        let dist = g.bfs(&[0]);
        if let Some(unreachable) = dist.iter().position(|&d| d == usize::MAX) {
            return Err(GraphError::Disconnected { unreachable });
        }
        Ok(g)
    }

    /// The path graph `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges)
    }

    /// The cycle graph on `n` vertices (for `n < 3` this degenerates to a path).
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Self::new(n, &edges)
    }

    /// The complete graph on `n` vertices.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Neighbors of `x`, excluding `x` itself, in increasing order.
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }

    /// The reflexive adjacency predicate.
    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        x == y || self.adj[x].binary_search(&y).is_ok()
    }

    /// Proper edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    /// The full edge relation as unordered pairs `(i, j)` with `i <= j`, loops included.
    pub fn edge_relation(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, list) in self.adj.iter().enumerate() {
            out.push((a, a));
            out.extend(list.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn check_vertex(&self, x: usize) -> Result<(), GraphError> {
        if x < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: x,
                n: self.n(),
            })
        }
    }

    /// Multi-source breadth-first distances; unreachable entries are `usize::MAX`.
    pub fn bfs(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Length of a shortest path from `x` to `y`.
    pub fn distance(&self, x: usize, y: usize) -> Result<usize, GraphError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        Ok(self.bfs(&[x])[y])
    }

    /// All-pairs distance table, row-major.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.n();
        let mut d = Vec::with_capacity(n * n);
        for x in 0..n {
            d.extend(self.bfs(&[x]));
        }
        DistanceMatrix { n, d }
    }

    /// The closed ball `{x : d(x, a) <= radius}`.
    pub fn ball(&self, a: &[usize], radius: usize) -> Result<BTreeSet<usize>, GraphError> {
        if a.is_empty() {
            return Err(GraphError::EmptySet);
        }
        for &x in a {
            self.check_vertex(x)?;
        }
        let dist = self.bfs(a);
        Ok((0..self.n()).filter(|&x| dist[x] <= radius).collect())
    }

    /// Whether `set` induces a connected subgraph. The empty set counts as connected.
    pub fn is_connected_subset(&self, set: &[usize]) -> bool {
        let mut members: Vec<usize> = set.to_vec();
        members.sort_unstable();
        members.dedup();
        let Some(&root) = members.first() else {
            return true;
        };
        let mut seen = vec![false; members.len()];
        seen[0] = true;
        let mut stack = vec![root];
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if let Ok(i) = members.binary_search(&y) {
                    if !seen[i] {
                        seen[i] = true;
                        reached += 1;
                        stack.push(y);
                    }
                }
            }
        }
        reached == members.len()
    }

    /// Connected components of the subgraph induced by `mask`, each sorted, ordered by least element.
    pub fn components_of_mask(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if !mask[s] || seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &y in &self.adj[x] {
                    if mask[y] && !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// A shortest path from `from` to any vertex of `to`, staying inside `allowed`.
    /// Ties are broken toward lower indices.
    pub fn shortest_path_within(
        &self,
        from: usize,
        to: &[bool],
        allowed: &[bool],
    ) -> Option<Vec<usize>> {
        if !allowed[from] {
            return None;
        }
        let mut parent = vec![usize::MAX; self.n()];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if to[x] {
                let mut path = vec![x];
                let mut cur = x;
                while cur != from {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &y in &self.adj[x] {
                if allowed[y] && parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// The subgraph induced on `vertices` (in the given order), if connected.
    pub fn induced(&self, vertices: &[usize]) -> Result<Graph, GraphError> {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter(|&&w| index[w] != usize::MAX)
                    .map(|&w| index[w])
                    .collect()
            })
            .collect();
        Graph::from_adjacency(adj)
    }
}

/// Dense all-pairs distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<usize>,
}

impl DistanceMatrix {
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.d[x * self.n + y]
    }
}

/// Which clause of the monotone-epimorphism definition fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EpiViolation {
    /// The edge `(x, y)` of the domain is sent to a non-edge.
    NotHomomorphism { edge: (usize, usize) },
    /// No domain edge maps onto the codomain edge.
    EdgeNotCovered { edge: (usize, usize) },
    /// The codomain vertex has no preimage.
    EmptyPreimage { vertex: usize },
    /// The preimage of `vertex` is disconnected; `witness` is a preimage
    /// vertex outside the component of the least preimage vertex.
    DisconnectedPreimage { vertex: usize, witness: usize },
}

impl fmt::Display for EpiViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotHomomorphism { edge } => write!(f, "edge {edge:?} is not sent to an edge"),
            Self::EdgeNotCovered { edge } => write!(f, "codomain edge {edge:?} is not covered"),
            Self::EmptyPreimage { vertex } => write!(f, "vertex {vertex} has empty preimage"),
            Self::DisconnectedPreimage { vertex, witness } => {
                write!(
                    f,
                    "preimage of {vertex} is disconnected (witness {witness})"
                )
            }
        }
    }
}

/// A total function between the vertex sets of two graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMap {
    domain: Arc<Graph>,
    codomain: Arc<Graph>,
    assignment: Vec<usize>,
}

impl GraphMap {
    pub fn new(
        domain: Arc<Graph>,
        codomain: Arc<Graph>,
        assignment: Vec<usize>,
    ) -> Result<Self, GraphError> {
        if assignment.len() != domain.n() {
            return Err(GraphError::AssignmentLength {
                got: assignment.len(),
                expected: domain.n(),
            });
        }
        for &v in &assignment {
            codomain.check_vertex(v)?;
        }
        Ok(GraphMap {
            domain,
            codomain,
            assignment,
        })
    }

    pub fn identity(g: Arc<Graph>) -> Self {
        let assignment = (0..g.n()).collect();
        GraphMap {
            domain: g.clone(),
            codomain: g,
            assignment,
        }
    }

    pub fn domain(&self) -> &Arc<Graph> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Graph> {
        &self.codomain
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GraphMap) -> Result<GraphMap, GraphError> {
        if *self.codomain != *other.domain {
            return Err(GraphError::MapMismatch);
        }
        let assignment = self
            .assignment
            .iter()
            .map(|&x| other.assignment[x])
            .collect();
        Ok(GraphMap {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            assignment,
        })
    }

    pub fn is_homomorphism(&self) -> bool {
        self.domain
            .edges()
            .iter()
            .all(|&(a, b)| self.codomain.adjacent(self.apply(a), self.apply(b)))
    }

    /// Checks every clause of the monotone-epimorphism definition.
    pub fn check_monotone_epimorphism(&self) -> Result<(), EpiViolation> {
        check_monotone_epi(&self.domain, &self.codomain, &self.assignment)
    }

    pub fn is_monotone_epimorphism(&self) -> bool {
        self.check_monotone_epimorphism().is_ok()
    }
}

/// Maximum over the domain of `d(f(x), g(x))`.
pub fn sup_distance(f: &GraphMap, g: &GraphMap) -> Result<usize, GraphError> {
    if *f.domain != *g.domain || *f.codomain != *g.codomain {
        return Err(GraphError::MapMismatch);
    }
    let mut best = 0;
    for x in 0..f.domain.n() {
        let d = f.codomain.distance(f.apply(x), g.apply(x))?;
        best = best.max(d);
    }
    Ok(best)
}

pub(crate) fn check_monotone_epi(g: &Graph, h: &Graph, f: &[usize]) -> Result<(), EpiViolation> {
    for (a, b) in g.edges() {
        if !h.adjacent(f[a], f[b]) {
            return Err(EpiViolation::NotHomomorphism { edge: (a, b) });
        }
    }
    let mut pre: Vec<Vec<usize>> = vec![Vec::new(); h.n()];
    for (x, &y) in f.iter().enumerate() {
        pre[y].push(x);
    }
    for (v, p) in pre.iter().enumerate() {
        if p.is_empty() {
            return Err(EpiViolation::EmptyPreimage { vertex: v });
        }
    }
    let mut seen = vec![false; g.n()];
    let mut stack = Vec::new();
    for (v, p) in pre.iter().enumerate() {
        seen[p[0]] = true;
        stack.push(p[0]);
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if f[y] == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if let Some(&witness) = p.iter().find(|&&x| !seen[x]) {
            return Err(EpiViolation::DisconnectedPreimage { vertex: v, witness });
        }
    }
    let mut covered = BTreeSet::new();
    for (a, b) in g.edges() {
        let (x, y) = (f[a], f[b]);
        if x != y {
            covered.insert((x.min(y), x.max(y)));
        }
    }
    for e in h.edges() {
        if !covered.contains(&e) {
            return Err(EpiViolation::EdgeNotCovered { edge: e });
        }
    }
    Ok(())
}

/// Lazily enumerates every monotone epimorphism `g -> h`, in lexicographic
/// order of the assignment vector.
pub fn enumerate_monotone_epimorphisms<'a>(g: &'a Graph, h: &'a Graph) -> MonotoneEpis<'a> {
    MonotoneEpis::new(g, h, None)
}

/// Backtracking enumerator behind [`enumerate_monotone_epimorphisms`].
///
/// The enumeration tree can be split across workers by fixing the image of
/// vertex 0 with [`MonotoneEpis::with_root`].
pub struct MonotoneEpis<'a> {
    g: &'a Graph,
    h: &'a Graph,
    assign: Vec<usize>,
    // next candidate value to try at each depth
    next: Vec<usize>,
    depth: usize,
    root: Option<usize>,
    hits: Vec<usize>,
    done: bool,
}

impl<'a> MonotoneEpis<'a> {
    fn new(g: &'a Graph, h: &'a Graph, root: Option<usize>) -> Self {
        let n = g.n();
        let done = n < h.n() || root.is_some_and(|r| r >= h.n());
        MonotoneEpis {
            g,
            h,
            assign: vec![usize::MAX; n],
            next: vec![0; n],
            depth: 0,
            root,
            hits: vec![0; h.n()],
            done,
        }
    }

    /// Restricts the enumeration to maps sending vertex 0 to `root`.
    pub fn with_root(g: &'a Graph, h: &'a Graph, root: usize) -> Self {
        Self::new(g, h, Some(root))
    }

    fn consistent(&self, x: usize, y: usize) -> bool {
        // homomorphism against already assigned neighbors
        for &z in self.g.neighbors(x) {
            if z < x && !self.h.adjacent(self.assign[z], y) {
                return false;
            }
        }
        // enough vertices left to hit every unhit codomain vertex
        let unhit = self.hits.iter().filter(|&&c| c == 0).count() - usize::from(self.hits[y] == 0);
        if self.g.n() - x - 1 < unhit {
            return false;
        }
        true
    }

    // After assigning 0..=x, a preimage component with no unassigned neighbor
    // can never grow, so it must be the only component of its preimage.
    fn preimages_completable(&self, x: usize) -> bool {
        let assigned = x + 1;
        let mut comp = vec![false; assigned];
        let mut comp_count = vec![0usize; self.h.n()];
        let mut closed = Vec::new();
        let mut stack = Vec::new();
        for s in 0..assigned {
            if comp[s] {
                continue;
            }
            let c = self.assign[s];
            comp[s] = true;
            stack.push(s);
            let mut open = false;
            while let Some(v) = stack.pop() {
                for &w in self.g.neighbors(v) {
                    if w >= assigned {
                        open = true;
                    } else if self.assign[w] == c && !comp[w] {
                        comp[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp_count[c] += 1;
            if !open {
                closed.push(c);
            }
        }
        closed.into_iter().all(|c| comp_count[c] == 1)
    }
}

impl Iterator for MonotoneEpis<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let n = self.g.n();
        if self.done {
            return None;
        }
        loop {
            let x = self.depth;
            if x == n {
                let candidate = self.assign.clone();
                // backtrack for the following call
                self.depth -= 1;
                let last = self.assign[n - 1];
                self.hits[last] -= 1;
                self.assign[n - 1] = usize::MAX;
                if check_monotone_epi(self.g, self.h, &candidate).is_ok() {
                    return Some(candidate);
                }
                continue;
            }
            let (lo, hi) = match (x, self.root) {
                (0, Some(r)) => (r, r + 1),
                _ => (0, self.h.n()),
            };
            let mut advanced = false;
            let mut y = self.next[x].max(lo);
            while y < hi {
                if self.consistent(x, y) {
                    self.assign[x] = y;
                    self.hits[y] += 1;
                    if self.preimages_completable(x) {
                        self.next[x] = y + 1;
                        if x + 1 < n {
                            self.next[x + 1] = 0;
                        }
                        self.depth = x + 1;
                        advanced = true;
                        break;
                    }
                    self.hits[y] -= 1;
                    self.assign[x] = usize::MAX;
                }
                y += 1;
            }
            if advanced {
                continue;
            }
            if x == 0 {
                self.done = true;
                return None;
            }
            self.next[x] = 0;
            self.depth = x - 1;
            let prev = self.assign[x - 1];
            self.hits[prev] -= 1;
            self.assign[x - 1] = usize::MAX;
        }
    }
}
