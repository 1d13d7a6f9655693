//! Discrete space models and brick partitions.
//!
//! A [`SpaceModel`] is a base family together with a subdivision level; each
//! level multiplies every side by 3. Fine vertices of a model are indexed
//! row-major over their grid coordinates.
//!
//! Two adjacency relations live on every model:
//! * the *fine* graph, which carries the nerve and all closures (king moves on
//!   2-D grids, 26 neighbors on 3-D grids, ordinary adjacency in dimension 1);
//! * the *strong* graph, the axis-aligned subrelation (4 or 6 neighbors), used
//!   when constructions need thick connections that never pass through a
//!   single corner.
//!
//! Blocks of a partition are adjacent in the nerve when some fine edge joins
//! them. This rule is preserved when a partition is pulled back to a finer
//! level, so partitions at different levels can be compared directly.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{Graph, GraphMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("invalid family parameters")]
    InvalidParams,
    #[error("partition has {got} entries, space has {expected} fine vertices")]
    LengthMismatch { got: usize, expected: usize },
    #[error("block ids must be 0..k without gaps; block {block} is empty")]
    EmptyBlock { block: usize },
    #[error("block {block} is not connected")]
    DisconnectedBlock { block: usize },
    #[error("partitions live on different spaces")]
    SpaceMismatch,
    #[error("fine block {fine} meets coarse blocks {first} and {second}")]
    Straddle {
        fine: usize,
        first: usize,
        second: usize,
    },
    #[error("class {class} of the grouping is empty or disconnected in the nerve")]
    BadClass { class: usize },
    #[error("empty vertex set")]
    EmptySet,
}

/// A base family with its size parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Interval { n: usize },
    Cycle { n: usize },
    TorusGrid { n: usize, m: usize },
    Grid3d { n: usize, m: usize, k: usize },
    Carpet { level: u32 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Interval { .. } => "interval",
            Family::Cycle { .. } => "cycle",
            Family::TorusGrid { .. } => "torus_grid",
            Family::Grid3d { .. } => "grid3d",
            Family::Carpet { .. } => "carpet",
        }
    }

    pub fn params(&self) -> Vec<usize> {
        match *self {
            Family::Interval { n } | Family::Cycle { n } => vec![n],
            Family::TorusGrid { n, m } => vec![n, m],
            Family::Grid3d { n, m, k } => vec![n, m, k],
            Family::Carpet { level } => vec![level as usize],
        }
    }

    pub fn from_name(name: &str, params: &[usize]) -> Result<Self, SpaceError> {
        let f = match (name, params) {
            ("interval", &[n]) => Family::Interval { n },
            ("cycle", &[n]) => Family::Cycle { n },
            ("torus_grid", &[n, m]) => Family::TorusGrid { n, m },
            ("grid3d", &[n, m, k]) => Family::Grid3d { n, m, k },
            ("carpet", &[level]) => Family::Carpet {
                level: u32::try_from(level).map_err(|_| SpaceError::InvalidParams)?,
            },
            _ => return Err(SpaceError::InvalidParams),
        };
        Ok(f)
    }

    /// Whether the geometry is one-dimensional.
    pub fn is_one_dimensional(&self) -> bool {
        matches!(self, Family::Interval { .. } | Family::Cycle { .. })
    }
}

/// A family at a subdivision level, with its fine and strong graphs.
#[derive(Debug, Clone)]
pub struct SpaceModel {
    family: Family,
    level: u32,
    shape: [usize; 3],
    fine: Arc<Graph>,
    strong: Arc<Graph>,
    // grid cell of each fine vertex
    cells: Vec<[usize; 3]>,
    // fine vertex of each grid cell, usize::MAX for carpet holes
    index: Vec<usize>,
}

impl PartialEq for SpaceModel {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.level == other.level
    }
}

impl Eq for SpaceModel {}

fn pow3(e: u32) -> usize {
    3usize.pow(e)
}

fn carpet_survives(mut r: usize, mut c: usize) -> bool {
    while r > 0 || c > 0 {
        if r % 3 == 1 && c % 3 == 1 {
            return false;
        }
        r /= 3;
        c /= 3;
    }
    true
}

impl SpaceModel {
    pub fn new(family: Family, level: u32) -> Result<Arc<Self>, SpaceError> {
        let s = pow3(level);
        let (shape, wrap) = match family {
            Family::Interval { n } if n >= 1 => ([n * s, 1, 1], [false; 3]),
            Family::Cycle { n } if n >= 3 => ([n * s, 1, 1], [true, false, false]),
            Family::TorusGrid { n, m } if n >= 1 && m >= 1 => {
                ([n * s, m * s, 1], [true, true, false])
            }
            Family::Grid3d { n, m, k } if n >= 1 && m >= 1 && k >= 1 => {
                ([n * s, m * s, k * s], [false; 3])
            }
            Family::Carpet { level: l0 } => {
                let side = pow3(l0 + level);
                ([side, side, 1], [false; 3])
            }
            _ => return Err(SpaceError::InvalidParams),
        };
        let total = shape[0] * shape[1] * shape[2];
        let mut index = vec![usize::MAX; total];
        let mut cells = Vec::new();
        for a in 0..shape[0] {
            for b in 0..shape[1] {
                for c in 0..shape[2] {
                    if let Family::Carpet { .. } = family {
                        if !carpet_survives(a, b) {
                            continue;
                        }
                    }
                    index[(a * shape[1] + b) * shape[2] + c] = cells.len();
                    cells.push([a, b, c]);
                }
            }
        }
        let cell_index = |p: [isize; 3]| -> Option<usize> {
            let mut q = [0usize; 3];
            for d in 0..3 {
                let len = shape[d] as isize;
                let mut x = p[d];
                if wrap[d] {
                    x = x.rem_euclid(len);
                } else if x < 0 || x >= len {
                    return None;
                }
                q[d] = x as usize;
            }
            let i = index[(q[0] * shape[1] + q[1]) * shape[2] + q[2]];
            (i != usize::MAX).then_some(i)
        };
        let mut fine_adj = vec![Vec::new(); cells.len()];
        let mut strong_adj = vec![Vec::new(); cells.len()];
        for (v, cell) in cells.iter().enumerate() {
            for da in -1isize..=1 {
                for db in -1isize..=1 {
                    for dc in -1isize..=1 {
                        if (da, db, dc) == (0, 0, 0) {
                            continue;
                        }
                        let p = [
                            cell[0] as isize + da,
                            cell[1] as isize + db,
                            cell[2] as isize + dc,
                        ];
                        if let Some(u) = cell_index(p) {
                            fine_adj[v].push(u);
                            if da.abs() + db.abs() + dc.abs() == 1 {
                                strong_adj[v].push(u);
                            }
                        }
                    }
                }
            }
        }
        let fine =
            Arc::new(Graph::from_adjacency(fine_adj).map_err(|_| SpaceError::InvalidParams)?);
        let strong =
            Arc::new(Graph::from_adjacency(strong_adj).map_err(|_| SpaceError::InvalidParams)?);
        Ok(Arc::new(SpaceModel {
            family,
            level,
            shape,
            fine,
            strong,
            cells,
            index,
        }))
    }

    pub fn interval(n: usize) -> Result<Arc<Self>, SpaceError> {
        Self::new(Family::Interval { n }, 0)
    }

    pub fn cycle(n: usize) -> Result<Arc<Self>, SpaceError> {
        Self::new(Family::Cycle { n }, 0)
    }

    pub fn torus_grid(n: usize, m: usize) -> Result<Arc<Self>, SpaceError> {
        Self::new(Family::TorusGrid { n, m }, 0)
    }

    pub fn grid3d(n: usize, m: usize, k: usize) -> Result<Arc<Self>, SpaceError> {
        Self::new(Family::Grid3d { n, m, k }, 0)
    }

    pub fn carpet(level: u32) -> Result<Arc<Self>, SpaceError> {
        Self::new(Family::Carpet { level }, 0)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn fine(&self) -> &Arc<Graph> {
        &self.fine
    }

    pub fn strong(&self) -> &Arc<Graph> {
        &self.strong
    }

    pub fn n(&self) -> usize {
        self.fine.n()
    }

    /// Grid extent along each axis (unused axes have extent 1).
    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn cell(&self, x: usize) -> [usize; 3] {
        self.cells[x]
    }

    pub fn vertex_at(&self, cell: [usize; 3]) -> Option<usize> {
        if (0..3).any(|d| cell[d] >= self.shape[d]) {
            return None;
        }
        let i = self.index[(cell[0] * self.shape[1] + cell[1]) * self.shape[2] + cell[2]];
        (i != usize::MAX).then_some(i)
    }

    /// Same family, possibly different level.
    pub fn same_family(&self, other: &SpaceModel) -> bool {
        self.family == other.family
    }

    /// `Cl(A) = A ∪ N(A)` in the fine graph.
    pub fn closure(&self, a: &[bool]) -> Vec<bool> {
        let mut out = a.to_vec();
        for (x, &inside) in a.iter().enumerate() {
            if inside {
                for &y in self.fine.neighbors(x) {
                    out[y] = true;
                }
            }
        }
        out
    }

    /// `Bd(A) = Cl(A) \ A`.
    pub fn boundary(&self, a: &[bool]) -> Vec<bool> {
        let cl = self.closure(a);
        cl.iter().zip(a).map(|(&c, &x)| c && !x).collect()
    }
}

/// The next level together with the canonical monotone epimorphism back.
pub fn subdivide(s: &Arc<SpaceModel>) -> (Arc<SpaceModel>, GraphMap) {
    let finer = SpaceModel::new(s.family, s.level + 1).expect("subdivision of a valid model");
    let map = descend_map(&finer, s);
    (finer, map)
}

/// The cell-collapsing map from `fine` down to `coarse` (same family, coarser level).
pub fn descend_map(fine: &Arc<SpaceModel>, coarse: &Arc<SpaceModel>) -> GraphMap {
    assert!(fine.same_family(coarse) && fine.level >= coarse.level);
    let f = pow3(fine.level - coarse.level);
    let assignment = (0..fine.n())
        .map(|x| {
            let c = fine.cells[x];
            let target = match fine.family {
                Family::Grid3d { .. } => [c[0] / f, c[1] / f, c[2] / f],
                _ => [c[0] / f, c[1] / f, 0],
            };
            coarse.vertex_at(target).expect("collapsed cell survives")
        })
        .collect();
    GraphMap::new(fine.fine.clone(), coarse.fine.clone(), assignment).expect("valid collapse")
}

/// A partition of the fine vertices into connected blocks.
#[derive(Debug, Clone)]
pub struct BrickPartition {
    space: Arc<SpaceModel>,
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    nerve: Arc<Graph>,
}

impl PartialEq for BrickPartition {
    fn eq(&self, other: &Self) -> bool {
        *self.space == *other.space && self.block_of == other.block_of
    }
}

impl Eq for BrickPartition {}

impl BrickPartition {
    /// Validates a block-index array: ids `0..k` all used, each block connected.
    pub fn new(space: Arc<SpaceModel>, block_of: Vec<usize>) -> Result<Self, SpaceError> {
        if block_of.len() != space.n() {
            return Err(SpaceError::LengthMismatch {
                got: block_of.len(),
                expected: space.n(),
            });
        }
        let k = block_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (x, &b) in block_of.iter().enumerate() {
            blocks[b].push(x);
        }
        let mut seen = vec![false; block_of.len()];
        let mut stack = Vec::new();
        for (b, members) in blocks.iter().enumerate() {
            let Some(&root) = members.first() else {
                return Err(SpaceError::EmptyBlock { block: b });
            };
            seen[root] = true;
            stack.push(root);
            let mut reached = 1;
            while let Some(x) = stack.pop() {
                for &y in space.fine.neighbors(x) {
                    if block_of[y] == b && !seen[y] {
                        seen[y] = true;
                        reached += 1;
                        stack.push(y);
                    }
                }
            }
            if reached != members.len() {
                return Err(SpaceError::DisconnectedBlock { block: b });
            }
        }
        let mut adj = vec![BTreeSet::new(); k];
        for (a, b) in space.fine.edges() {
            let (p, q) = (block_of[a], block_of[b]);
            if p != q {
                adj[p].insert(q);
                adj[q].insert(p);
            }
        }
        let adj = adj.into_iter().map(|s| s.into_iter().collect()).collect();
        let nerve =
            Arc::new(Graph::from_adjacency(adj).expect("nerve of a connected space is connected"));
        Ok(BrickPartition {
            space,
            block_of,
            blocks,
            nerve,
        })
    }

    /// Relabels arbitrary labels by first appearance and splits each label
    /// class into its connected components (under `strong` adjacency when
    /// `use_strong`, otherwise the fine graph).
    pub fn from_labels(
        space: Arc<SpaceModel>,
        labels: &[usize],
        use_strong: bool,
    ) -> Result<Self, SpaceError> {
        if labels.len() != space.n() {
            return Err(SpaceError::LengthMismatch {
                got: labels.len(),
                expected: space.n(),
            });
        }
        let g = if use_strong {
            space.strong.clone()
        } else {
            space.fine.clone()
        };
        let mut block_of = vec![usize::MAX; space.n()];
        let mut next = 0;
        for s in 0..space.n() {
            if block_of[s] != usize::MAX {
                continue;
            }
            block_of[s] = next;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in g.neighbors(x) {
                    if block_of[y] == usize::MAX && labels[y] == labels[s] {
                        block_of[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        Self::new(space, block_of)
    }

    /// One block containing everything.
    pub fn trivial(space: Arc<SpaceModel>) -> Self {
        let n = space.n();
        Self::new(space, vec![0; n]).expect("connected space")
    }

    /// Every fine vertex its own block.
    pub fn discrete(space: Arc<SpaceModel>) -> Self {
        let n = space.n();
        Self::new(space, (0..n).collect()).expect("singletons are connected")
    }

    /// Consecutive arcs along the first axis, `k` of them, as even as possible.
    pub fn bands(space: Arc<SpaceModel>, k: usize) -> Result<Self, SpaceError> {
        let len = space.shape[0];
        if k == 0 || k > len {
            return Err(SpaceError::InvalidParams);
        }
        let labels: Vec<usize> = (0..space.n())
            .map(|x| space.cells[x][0] * k / len)
            .collect();
        Self::from_labels(space, &labels, true)
    }

    /// Boxes of side `side` along every used axis, offset by `shift`.
    pub fn boxes(space: Arc<SpaceModel>, side: usize, shift: usize) -> Result<Self, SpaceError> {
        if side == 0 {
            return Err(SpaceError::InvalidParams);
        }
        let shape = space.shape;
        let labels: Vec<usize> = (0..space.n())
            .map(|x| {
                let c = space.cells[x];
                let q = |d: usize| ((c[d] + shift) % shape[d]) / side;
                (q(0) * (shape[1] / side + 1) + q(1)) * (shape[2] / side + 1) + q(2)
            })
            .collect();
        Self::from_labels(space, &labels, true)
    }

    /// Grows blocks from `seeds` by repeatedly claiming a random strong
    /// neighbor of some block; `pick(bound)` must return a value below `bound`.
    pub fn grown(
        space: Arc<SpaceModel>,
        seeds: &[usize],
        mut pick: impl FnMut(usize) -> usize,
    ) -> Result<Self, SpaceError> {
        if seeds.is_empty() {
            return Err(SpaceError::EmptySet);
        }
        let n = space.n();
        let mut label = vec![usize::MAX; n];
        let mut frontier: Vec<(usize, usize)> = Vec::new();
        for (i, &s) in seeds.iter().enumerate() {
            if s >= n {
                return Err(SpaceError::InvalidParams);
            }
            if label[s] == usize::MAX {
                label[s] = i;
                frontier.extend(space.strong.neighbors(s).iter().map(|&y| (y, i)));
            }
        }
        while !frontier.is_empty() {
            let at = pick(frontier.len());
            let (y, l) = frontier.swap_remove(at);
            if label[y] != usize::MAX {
                continue;
            }
            label[y] = l;
            frontier.extend(
                space
                    .strong
                    .neighbors(y)
                    .iter()
                    .filter(|&&z| label[z] == usize::MAX)
                    .map(|&z| (z, l)),
            );
        }
        Self::from_labels(space, &label, true)
    }

    pub fn space(&self) -> &Arc<SpaceModel> {
        &self.space
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn nerve(&self) -> &Arc<Graph> {
        &self.nerve
    }

    pub fn block_mask(&self, b: usize) -> Vec<bool> {
        let mut m = vec![false; self.space.n()];
        for &x in &self.blocks[b] {
            m[x] = true;
        }
        m
    }

    /// Fine vertices covered by a set of blocks.
    pub fn union_mask(&self, blocks: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.space.n()];
        for &b in blocks {
            for &x in &self.blocks[b] {
                m[x] = true;
            }
        }
        m
    }

    /// The same partition pulled back to a finer level of the same family.
    pub fn pull_to_level(&self, level: u32) -> BrickPartition {
        assert!(level >= self.space.level);
        if level == self.space.level {
            return self.clone();
        }
        let finer = SpaceModel::new(self.space.family, level).expect("valid family");
        let down = descend_map(&finer, &self.space);
        let block_of: Vec<usize> = (0..finer.n())
            .map(|x| self.block_of[down.apply(x)])
            .collect();
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (x, &b) in block_of.iter().enumerate() {
            blocks[b].push(x);
        }
        BrickPartition {
            space: finer,
            block_of,
            blocks,
            nerve: self.nerve.clone(),
        }
    }

    /// [`pull_to_level`](Self::pull_to_level) one level down.
    pub fn subdivided(&self) -> BrickPartition {
        self.pull_to_level(self.space.level + 1)
    }

    /// Blocks contained in the fine set `v`.
    pub fn blocks_within(&self, v: &[bool]) -> Vec<usize> {
        (0..self.num_blocks())
            .filter(|&b| self.blocks[b].iter().all(|&x| v[x]))
            .collect()
    }

    /// Closure of a block in the fine graph.
    pub fn block_closure(&self, b: usize) -> Vec<bool> {
        self.space.closure(&self.block_mask(b))
    }
}

/// The nerve graph of a partition.
pub fn nerve(p: &BrickPartition) -> Arc<Graph> {
    p.nerve.clone()
}

/// `Star(C) = {W : Cl(W) ∩ C ≠ ∅}`, sorted.
pub fn star(p: &BrickPartition, c: &[bool]) -> Result<Vec<usize>, SpaceError> {
    if !c.iter().any(|&x| x) {
        return Err(SpaceError::EmptySet);
    }
    // Cl(W) meets C iff W meets Cl(C)
    let cl = p.space.closure(c);
    let mut hit = vec![false; p.num_blocks()];
    for (x, &inside) in cl.iter().enumerate() {
        if inside {
            hit[p.block_of[x]] = true;
        }
    }
    Ok((0..p.num_blocks()).filter(|&b| hit[b]).collect())
}

/// `Core(V) = {W : Cl(W) ⊆ V}`, sorted.
pub fn core(p: &BrickPartition, v: &[bool]) -> Vec<usize> {
    let mut bad = vec![false; p.num_blocks()];
    for (x, &inside) in v.iter().enumerate() {
        if !inside {
            // x ∉ V: every block whose closure contains x is excluded
            bad[p.block_of[x]] = true;
            for &y in p.space.fine.neighbors(x) {
                bad[p.block_of[y]] = true;
            }
        }
    }
    (0..p.num_blocks()).filter(|&b| !bad[b]).collect()
}

/// Merges blocks class by class; `class_of[b]` names the class of block `b`.
pub fn amalgam(p: &BrickPartition, class_of: &[usize]) -> Result<BrickPartition, SpaceError> {
    if class_of.len() != p.num_blocks() {
        return Err(SpaceError::LengthMismatch {
            got: class_of.len(),
            expected: p.num_blocks(),
        });
    }
    let k = class_of.iter().copied().max().map_or(0, |m| m + 1);
    let mut members = vec![Vec::new(); k];
    for (b, &c) in class_of.iter().enumerate() {
        members[c].push(b);
    }
    for (c, m) in members.iter().enumerate() {
        if m.is_empty() || !p.nerve.is_connected_subset(m) {
            return Err(SpaceError::BadClass { class: c });
        }
    }
    let block_of = p.block_of.iter().map(|&b| class_of[b]).collect();
    BrickPartition::new(p.space.clone(), block_of)
}

/// The block-level map of a nested pair of partitions.
#[derive(Debug, Clone)]
pub struct RefinementMap {
    pub finer: Arc<BrickPartition>,
    pub coarser: Arc<BrickPartition>,
    pub map: GraphMap,
}

/// Sends each block of `fine_p` to the block of `coarse_p` containing it.
///
/// `coarse_p` may live at a coarser level of the same family; it is pulled
/// back before containment is checked.
pub fn refinement_map(
    fine_p: &Arc<BrickPartition>,
    coarse_p: &Arc<BrickPartition>,
) -> Result<RefinementMap, SpaceError> {
    let assignment = refinement_assignment(fine_p, coarse_p)?;
    let map = GraphMap::new(fine_p.nerve.clone(), coarse_p.nerve.clone(), assignment)
        .expect("sizes agree");
    Ok(RefinementMap {
        finer: fine_p.clone(),
        coarser: coarse_p.clone(),
        map,
    })
}

pub(crate) fn refinement_assignment(
    fine_p: &BrickPartition,
    coarse_p: &BrickPartition,
) -> Result<Vec<usize>, SpaceError> {
    if !fine_p.space.same_family(&coarse_p.space) || fine_p.space.level < coarse_p.space.level {
        return Err(SpaceError::SpaceMismatch);
    }
    let pulled;
    let coarse = if coarse_p.space.level == fine_p.space.level {
        coarse_p
    } else {
        pulled = coarse_p.pull_to_level(fine_p.space.level);
        &pulled
    };
    let mut out = Vec::with_capacity(fine_p.num_blocks());
    for (b, members) in fine_p.blocks.iter().enumerate() {
        let first = coarse.block_of[members[0]];
        if let Some(&x) = members.iter().find(|&&x| coarse.block_of[x] != first) {
            return Err(SpaceError::Straddle {
                fine: b,
                first,
                second: coarse.block_of[x],
            });
        }
        out.push(first);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // closure-based nerve oracle: blocks adjacent iff some fine edge joins them
    fn nerve_oracle(p: &BrickPartition) -> Vec<(usize, usize)> {
        let g = p.space().fine();
        let mut out = BTreeSet::new();
        for a in 0..p.num_blocks() {
            for b in a + 1..p.num_blocks() {
                let touch = p
                    .block(a)
                    .iter()
                    .any(|&x| p.block(b).iter().any(|&y| g.adjacent(x, y)));
                if touch {
                    out.insert((a, b));
                }
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn model_sizes_and_degrees() {
        let t = SpaceModel::torus_grid(6, 6).unwrap();
        assert_eq!(t.n(), 36);
        assert!(
            (0..36).all(|x| t.fine().neighbors(x).len() == 8 && t.strong().neighbors(x).len() == 4)
        );
        let g3 = SpaceModel::grid3d(3, 3, 3).unwrap();
        assert_eq!(
            g3.fine().neighbors(g3.vertex_at([1, 1, 1]).unwrap()).len(),
            26
        );
        let carpet = SpaceModel::carpet(1).unwrap();
        assert_eq!(carpet.n(), 8);
        assert_eq!(SpaceModel::carpet(2).unwrap().n(), 64);
        assert!(matches!(
            SpaceModel::cycle(2),
            Err(SpaceError::InvalidParams)
        ));
    }

    #[test]
    fn subdivision_maps_are_monotone_epis() {
        for s in [
            SpaceModel::interval(4).unwrap(),
            SpaceModel::cycle(5).unwrap(),
            SpaceModel::torus_grid(3, 2).unwrap(),
            SpaceModel::grid3d(2, 1, 2).unwrap(),
            SpaceModel::carpet(1).unwrap(),
        ] {
            let (finer, map) = subdivide(&s);
            assert_eq!(finer.level(), 1);
            assert!(map.is_monotone_epimorphism(), "{:?}", s.family());
            // strong preimages are strong-connected too
            for y in 0..s.n() {
                let pre: Vec<usize> = (0..finer.n()).filter(|&x| map.apply(x) == y).collect();
                assert!(finer.strong().is_connected_subset(&pre));
            }
        }
        let i4 = SpaceModel::interval(4).unwrap();
        let (_, map) = subdivide(&i4);
        assert_eq!(
            map.assignment(),
            &(0..12).map(|i| i / 3).collect::<Vec<_>>()[..]
        );
    }

    #[test]
    fn nerve_examples() {
        let c12 = SpaceModel::cycle(12).unwrap();
        assert_eq!(BrickPartition::trivial(c12.clone()).nerve().n(), 1);
        let arcs = BrickPartition::bands(c12, 4).unwrap();
        assert_eq!(**arcs.nerve(), Graph::cycle(4).unwrap());
        let t = SpaceModel::torus_grid(6, 6).unwrap();
        let b = BrickPartition::boxes(t, 3, 0).unwrap();
        assert_eq!(b.num_blocks(), 4);
        assert_eq!(b.nerve().edges(), nerve_oracle(&b));
        // king moves make all four boxes of the 2×2 torus tiling mutually adjacent
        assert_eq!(b.nerve().edges().len(), 6);
    }

    #[test]
    fn nerve_is_level_invariant() {
        let t = SpaceModel::torus_grid(6, 6).unwrap();
        let b = BrickPartition::boxes(t, 2, 1).unwrap();
        let pulled = b.pull_to_level(1);
        let rebuilt =
            BrickPartition::new(pulled.space().clone(), pulled.block_of().to_vec()).unwrap();
        assert_eq!(rebuilt.nerve(), b.nerve());
    }

    #[test]
    fn refinement_map_examples() {
        let t =
            Arc::new(BrickPartition::boxes(SpaceModel::torus_grid(6, 6).unwrap(), 3, 0).unwrap());
        let id = refinement_map(&t, &t).unwrap();
        assert_eq!(id.map, GraphMap::identity(t.nerve().clone()));
        let fine = Arc::new(BrickPartition::discrete(t.space().clone()));
        let r = refinement_map(&fine, &t).unwrap();
        assert!(r.map.is_monotone_epimorphism());
        let sub = Arc::new(t.subdivided());
        let back = refinement_map(&sub, &t).unwrap();
        assert_eq!(back.map, GraphMap::identity(t.nerve().clone()));
        let shifted = Arc::new(BrickPartition::boxes(t.space().clone(), 3, 1).unwrap());
        assert!(matches!(
            refinement_map(&shifted, &t),
            Err(SpaceError::Straddle { .. })
        ));
        assert!(matches!(
            refinement_map(&t, &sub),
            Err(SpaceError::SpaceMismatch)
        ));
    }

    #[test]
    fn star_and_core_examples() {
        let c12 = SpaceModel::cycle(12).unwrap();
        let arcs = BrickPartition::bands(c12.clone(), 4).unwrap();
        let all = vec![true; 12];
        assert_eq!(star(&arcs, &all).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(core(&arcs, &all), vec![0, 1, 2, 3]);
        let mut mid = vec![false; 12];
        mid[4] = true;
        assert_eq!(star(&arcs, &mid).unwrap(), vec![1]);
        mid[4] = false;
        mid[3] = true;
        assert_eq!(star(&arcs, &mid).unwrap(), vec![0, 1]);
        assert_eq!(core(&arcs, &arcs.block_mask(1)), Vec::<usize>::new());
        assert_eq!(star(&arcs, &[false; 12]), Err(SpaceError::EmptySet));
    }

    #[test]
    fn amalgam_examples() {
        let arcs = BrickPartition::bands(SpaceModel::cycle(12).unwrap(), 4).unwrap();
        assert_eq!(amalgam(&arcs, &[0, 1, 2, 3]).unwrap(), arcs);
        assert_eq!(amalgam(&arcs, &[0, 0, 0, 0]).unwrap().num_blocks(), 1);
        let merged = amalgam(&arcs, &[0, 0, 1, 2]).unwrap();
        assert_eq!(**merged.nerve(), Graph::cycle(3).unwrap());
        assert_eq!(
            amalgam(&arcs, &[0, 1, 0, 2]),
            Err(SpaceError::BadClass { class: 0 })
        );
    }

    #[test]
    fn partition_validation() {
        let c = SpaceModel::cycle(6).unwrap();
        assert_eq!(
            BrickPartition::new(c.clone(), vec![0; 5]),
            Err(SpaceError::LengthMismatch {
                got: 5,
                expected: 6
            })
        );
        assert_eq!(
            BrickPartition::new(c.clone(), vec![0, 0, 2, 2, 2, 2]),
            Err(SpaceError::EmptyBlock { block: 1 })
        );
        assert_eq!(
            BrickPartition::new(c, vec![0, 1, 0, 1, 1, 1]),
            Err(SpaceError::DisconnectedBlock { block: 0 })
        );
    }

    fn split_mix(seed: &mut u64) -> u64 {
        *seed = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *seed;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn random_partition(space: Arc<SpaceModel>, k: usize, mut seed: u64) -> BrickPartition {
        let n = space.n();
        let seeds: Vec<usize> = (0..k)
            .map(|_| (split_mix(&mut seed) % n as u64) as usize)
            .collect();
        BrickPartition::grown(space, &seeds, |b| {
            (split_mix(&mut seed) % b as u64) as usize
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn core_equals_blocks_minus_star_of_boundary(seed in any::<u64>(), bits in proptest::collection::vec(any::<bool>(), 36)) {
            let t = SpaceModel::torus_grid(6, 6).unwrap();
            let p = random_partition(t.clone(), 7, seed);
            let within = p.blocks_within(&bits);
            let bd = t.boundary(&bits);
            let expected: Vec<usize> = if bd.iter().any(|&x| x) {
                let st = star(&p, &bd).unwrap();
                within.into_iter().filter(|b| !st.contains(b)).collect()
            } else {
                within
            };
            prop_assert_eq!(core(&p, &bits), expected);
        }

        #[test]
        fn star_and_core_are_monotone(seed in any::<u64>(), a in proptest::collection::vec(any::<bool>(), 36), b in proptest::collection::vec(any::<bool>(), 36)) {
            let t = SpaceModel::torus_grid(6, 6).unwrap();
            let p = random_partition(t, 6, seed);
            let small: Vec<bool> = a.iter().zip(&b).map(|(&x, &y)| x && y).collect();
            let big = a.clone();
            let cs = core(&p, &small);
            let cb = core(&p, &big);
            prop_assert!(cs.iter().all(|x| cb.contains(x)));
            if small.iter().any(|&x| x) {
                let ss = star(&p, &small).unwrap();
                let sb = star(&p, &big).unwrap();
                prop_assert!(ss.iter().all(|x| sb.contains(x)));
            }
        }

        #[test]
        fn amalgam_nerve_is_quotient(seed in any::<u64>(), groups in 1usize..5) {
            let t = SpaceModel::torus_grid(6, 6).unwrap();
            let p = random_partition(t.clone(), 8, seed);
            // group blocks by growing a coarser partition over the nerve
            let coarse = random_partition(t, groups, seed ^ 0xABCD);
            // each fine block labelled by the coarse block holding its least vertex, then split into nerve components
            let labels: Vec<usize> = (0..p.num_blocks()).map(|b| coarse.block_of()[p.block(b)[0]]).collect();
            let mut class_of = vec![usize::MAX; p.num_blocks()];
            let mut next = 0;
            for s in 0..p.num_blocks() {
                if class_of[s] != usize::MAX { continue; }
                class_of[s] = next;
                let mut stack = vec![s];
                while let Some(x) = stack.pop() {
                    for &y in p.nerve().neighbors(x) {
                        if class_of[y] == usize::MAX && labels[y] == labels[s] {
                            class_of[y] = next;
                            stack.push(y);
                        }
                    }
                }
                next += 1;
            }
            let am = amalgam(&p, &class_of).unwrap();
            let mut quotient = BTreeSet::new();
            for (a, b) in p.nerve().edges() {
                let (x, y) = (class_of[a], class_of[b]);
                if x != y {
                    quotient.insert((x.min(y), x.max(y)));
                }
            }
            prop_assert_eq!(am.nerve().edges(), quotient.into_iter().collect::<Vec<_>>());
        }

        #[test]
        fn refinement_maps_compose(seed in any::<u64>()) {
            let t = SpaceModel::torus_grid(6, 6).unwrap();
            let q = Arc::new(BrickPartition::discrete(t.clone()));
            let p = Arc::new(random_partition(t.clone(), 3, seed));
            // an intermediate partition: each q-block (a vertex) labelled by r-block, r = p refined by boxes
            let boxes = BrickPartition::boxes(t.clone(), 2, 0).unwrap();
            let labels: Vec<usize> = (0..t.n()).map(|x| p.block_of()[x] * 100 + boxes.block_of()[x]).collect();
            let r = Arc::new(BrickPartition::from_labels(t, &labels, true).unwrap());
            let qr = refinement_map(&q, &r).unwrap();
            let rp = refinement_map(&r, &p).unwrap();
            let qp = refinement_map(&q, &p).unwrap();
            prop_assert_eq!(qr.map.then(&rp.map).unwrap(), qp.map);
            prop_assert!(rp.map.is_monotone_epimorphism());
        }
    }
}
