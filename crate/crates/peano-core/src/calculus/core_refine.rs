use core::fmt;

use alloc::vec;
use alloc::vec::Vec;

use crate::space::{core, BrickPartition};

use super::{common_level, CalculusError};

/// The clause of the core-refinement contract that a partition violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoreClause {
    /// `Core(V, W)` is empty for the block `V`.
    EmptyCore { block: usize },
    /// `Core(V, W)` is not connected in the nerve of `W`.
    DisconnectedCore { block: usize },
    /// The block `W` touches no core block.
    Unanchored { block: usize },
    /// The interior of `V` is empty or disconnected at this level.
    ThinBlock { block: usize },
}

impl fmt::Display for CoreClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreClause::EmptyCore { block } => write!(f, "Core(V{block}, W) is empty"),
            CoreClause::DisconnectedCore { block } => {
                write!(f, "Core(V{block}, W) is not nerve-connected")
            }
            CoreClause::Unanchored { block } => {
                write!(f, "W{block} is not adjacent to any core block")
            }
            CoreClause::ThinBlock { block } => {
                write!(f, "V{block} has an empty or disconnected interior")
            }
        }
    }
}

/// Checks that `Core(V, W)` is nonempty and nerve-connected for every block
/// `V` of `v`, and that every block of `w` equals or touches a core block.
///
/// `w` must live at the level of `v` or finer.
pub fn check_core_clauses(v: &BrickPartition, w: &BrickPartition) -> Result<(), CoreClause> {
    let level = w.space().level();
    let v = v.pull_to_level(level.max(v.space().level()));
    let mut is_core = vec![false; w.num_blocks()];
    for b in 0..v.num_blocks() {
        let cores = core(w, &v.block_mask(b));
        if cores.is_empty() {
            return Err(CoreClause::EmptyCore { block: b });
        }
        if !w.nerve().is_connected_subset(&cores) {
            return Err(CoreClause::DisconnectedCore { block: b });
        }
        for c in cores {
            is_core[c] = true;
        }
    }
    for b in 0..w.num_blocks() {
        if !is_core[b] && !w.nerve().neighbors(b).iter().any(|&c| is_core[c]) {
            return Err(CoreClause::Unanchored { block: b });
        }
    }
    Ok(())
}

/// A partition `W ⪯ u` whose cores inside the blocks of `v` are nonempty
/// and nerve-connected, with every block of `W` touching some core.
///
/// Each block `V` gets a breadth-first spanning tree of its interior
/// `V \ Cl(Bd V)`, rooted at the lowest-index vertex. The parts of `U`
/// reachable from the tree without meeting `Cl(Bd V)` become core blocks,
/// and what is left of each `U` is split into components. If some interior
/// is empty or disconnected, or a clause fails, the next level is tried.
pub fn core_refinement(
    u: &BrickPartition,
    v: &BrickPartition,
    budget: u32,
) -> Result<BrickPartition, CalculusError> {
    let base = common_level(&[u, v])?;
    let mut last = None;
    for level in base..=base + budget {
        match attempt(u, v, level) {
            Ok(w) => return Ok(w),
            Err(clause) => last = Some((level, clause)),
        }
    }
    let (level, clause) = last.expect("at least one level tried");
    Err(CalculusError::CoreClause { level, clause })
}

fn attempt(
    u: &BrickPartition,
    v: &BrickPartition,
    level: u32,
) -> Result<BrickPartition, CoreClause> {
    let u = u.pull_to_level(level);
    let v = v.pull_to_level(level);
    let space = u.space().clone();
    let g = space.fine();
    let n = space.n();
    let mut reached = vec![false; n];
    for b in 0..v.num_blocks() {
        let mask = v.block_mask(b);
        let interior: Vec<bool> = (0..n)
            .map(|x| mask[x] && g.neighbors(x).iter().all(|&y| mask[y]))
            .collect();
        let Some(root) = interior.iter().position(|&i| i) else {
            return Err(CoreClause::ThinBlock { block: b });
        };
        // spanning tree of the interior; the tree touches every part of every U inside it
        let dist = bfs_within(g, root, &interior);
        if (0..n).any(|x| interior[x] && dist[x] == usize::MAX) {
            return Err(CoreClause::ThinBlock { block: b });
        }
        for x in 0..n {
            if interior[x] {
                reached[x] = true;
            }
        }
    }
    let kv = v.num_blocks() + 1;
    let labels: Vec<usize> = (0..n)
        .map(|x| {
            let tag = if reached[x] { v.block_of()[x] + 1 } else { 0 };
            u.block_of()[x] * kv + tag
        })
        .collect();
    let w = BrickPartition::from_labels(space, &labels, false)
        .map_err(|_| CoreClause::ThinBlock { block: 0 })?;
    check_core_clauses(&v, &w)?;
    Ok(w)
}

fn bfs_within(g: &crate::graph::Graph, root: usize, allowed: &[bool]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[root] = 0;
    let mut queue = alloc::collections::VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if allowed[y] && dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{refinement_map, SpaceModel};
    use alloc::sync::Arc;

    #[test]
    fn trivial_inputs_give_the_trivial_partition() {
        let s = SpaceModel::torus_grid(3, 3).unwrap();
        let t = BrickPartition::trivial(s);
        let w = core_refinement(&t, &t, 0).unwrap();
        assert_eq!(w.num_blocks(), 1);
    }

    #[test]
    fn shifted_boxes_on_the_torus() {
        let s = SpaceModel::torus_grid(9, 9).unwrap();
        let u = BrickPartition::boxes(s.clone(), 3, 0).unwrap();
        let v = BrickPartition::boxes(s, 3, 1).unwrap();
        let w = core_refinement(&u, &v, 2).unwrap();
        assert_eq!(check_core_clauses(&v, &w), Ok(()));
        refinement_map(&Arc::new(w), &Arc::new(u)).unwrap();
    }

    #[test]
    fn thirds_against_halves_on_the_interval() {
        let s = SpaceModel::interval(27).unwrap();
        let thirds: Vec<usize> = (0..27).map(|x| x / 9).collect();
        let halves: Vec<usize> = (0..27).map(|x| usize::from(x >= 13)).collect();
        let u = BrickPartition::from_labels(s.clone(), &thirds, true).unwrap();
        let v = BrickPartition::from_labels(s, &halves, true).unwrap();
        let w = core_refinement(&u, &v, 2).unwrap();
        assert_eq!(check_core_clauses(&v, &w), Ok(()));
    }

    #[test]
    fn checker_names_the_failing_clause() {
        let s = SpaceModel::interval(9).unwrap();
        let v = BrickPartition::bands(s.clone(), 3).unwrap();
        // every seam vertex touches an interior singleton
        let w = BrickPartition::discrete(s);
        assert!(check_core_clauses(&v, &w).is_ok());
        let coarse = BrickPartition::bands(SpaceModel::interval(3).unwrap(), 3).unwrap();
        let fine = BrickPartition::discrete(SpaceModel::interval(3).unwrap());
        assert_eq!(
            check_core_clauses(&coarse, &fine),
            Err(CoreClause::EmptyCore { block: 0 })
        );
    }

    #[test]
    fn zero_budget_reports_thin_blocks() {
        let s = SpaceModel::interval(3).unwrap();
        let u = BrickPartition::discrete(s.clone());
        let v = BrickPartition::discrete(s);
        match core_refinement(&u, &v, 0) {
            Err(CalculusError::CoreClause {
                level: 0,
                clause: CoreClause::ThinBlock { block: 0 },
            }) => {}
            other => panic!("{other:?}"),
        }
    }
}
