//! Refinement procedures on brick partitions: walk-indexed pairs, core
//! refinement, path doubling, spacing out, upgrading walks to paths and the
//! conversion between circular coverings and cycle partitions.
//!
//! Every operation that needs its partitions to be "fine enough" works at
//! successive subdivision levels, up to a budget of extra levels.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use thiserror::Error;

use crate::space::{refinement_assignment, BrickPartition, SpaceError};
use crate::walk::{monotone_witness, refines_seq, same_host, Walk, WalkError, WalkKind};

mod core_refine;
mod covering;
mod doubling;
pub(crate) mod route;
mod spacing;
mod upgrade;

pub use core_refine::{check_core_clauses, core_refinement, CoreClause};
pub use covering::{
    covering_from_cycle_partition, cycle_partition_from_covering, cyclic_order, CircularCovering,
};
pub use doubling::{path_doubling, Doubled};
pub use spacing::space_out;
pub use upgrade::{upgrade_many, upgrade_to_path};
pub(crate) use upgrade::upgrade_many_with;

/// Extra subdivision levels tried before giving up.
pub const DEFAULT_BUDGET: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("walk does not live on the nerve of its partition")]
    HostMismatch,
    #[error("partitions are not nested")]
    NotNested,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("core refinement clause failed at level {level}: {clause}")]
    CoreClause { level: u32, clause: CoreClause },
    #[error("sets {i} and {j} break the circular intersection pattern")]
    Pattern { i: usize, j: usize },
    #[error("{operation} failed within the subdivision budget: {detail}")]
    Budget {
        operation: &'static str,
        detail: String,
    },
    #[error("invalid construction: {0}")]
    Construction(&'static str),
}

impl CalculusError {
    pub(crate) fn budget(operation: &'static str, detail: impl Into<String>) -> Self {
        CalculusError::Budget {
            operation,
            detail: detail.into(),
        }
    }
}

/// A partition together with a walk on its nerve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkOnPartition {
    pub partition: Arc<BrickPartition>,
    pub walk: Walk,
}

impl WalkOnPartition {
    pub fn new(partition: Arc<BrickPartition>, walk: Walk) -> Result<Self, CalculusError> {
        if !same_host(partition.nerve(), walk.host()) {
            return Err(CalculusError::HostMismatch);
        }
        Ok(WalkOnPartition { partition, walk })
    }

    /// The pair `(P, ⟨b⟩)` for a single block.
    pub fn point(partition: Arc<BrickPartition>, block: usize) -> Result<Self, CalculusError> {
        let walk = Walk::plain(partition.nerve().clone(), alloc::vec![block])?;
        Self::new(partition, walk)
    }

    /// The fine walk pushed down to the blocks of `coarser`.
    pub fn induced_on(&self, coarser: &BrickPartition) -> Result<Walk, CalculusError> {
        let rho = refinement_assignment(&self.partition, coarser)
            .map_err(|_| CalculusError::NotNested)?;
        let seq: Vec<usize> = self.walk.vertices().iter().map(|&b| rho[b]).collect();
        Ok(Walk::new(coarser.nerve().clone(), seq, self.walk.kind())?)
    }
}

/// `(W,w) ⪯ (V,v)`: `W` refines `V` and `ρ·w ⊑ v`.
pub fn pair_refines(
    fine: &WalkOnPartition,
    coarse: &WalkOnPartition,
) -> Result<bool, CalculusError> {
    let induced = fine.induced_on(&coarse.partition)?;
    Ok(refines_seq(induced.vertices(), coarse.walk.vertices()))
}

/// A witness that `ρ·w` monotonically refines `v`, if one exists.
///
/// Lasso confinement is applied when both walks are lassos.
pub fn pair_monotone_witness(
    fine: &WalkOnPartition,
    coarse: &WalkOnPartition,
) -> Result<Option<Vec<usize>>, CalculusError> {
    let induced = fine.induced_on(&coarse.partition)?;
    if let (WalkKind::Lasso { .. }, WalkKind::Lasso { .. }) = (induced.kind(), coarse.walk.kind()) {
        return Ok(crate::walk::monotonically_refines(&induced, &coarse.walk)?);
    }
    Ok(monotone_witness(induced.vertices(), coarse.walk.vertices()))
}

/// The common level at which a group of partitions is compared.
pub(crate) fn common_level(parts: &[&BrickPartition]) -> Result<u32, CalculusError> {
    let first = parts
        .first()
        .ok_or(CalculusError::Construction("no partitions"))?;
    for p in parts {
        if !p.space().same_family(first.space()) {
            return Err(SpaceError::SpaceMismatch.into());
        }
    }
    Ok(parts.iter().map(|p| p.space().level()).max().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::refinement_map;
    use crate::space::SpaceModel;
    use crate::walk::lift_walk;

    fn bands() -> Arc<BrickPartition> {
        Arc::new(BrickPartition::bands(SpaceModel::cycle(12).unwrap(), 4).unwrap())
    }

    #[test]
    fn identical_pairs_refine() {
        let p = bands();
        let w = Walk::plain(p.nerve().clone(), alloc::vec![0, 1, 2]).unwrap();
        let a = WalkOnPartition::new(p.clone(), w).unwrap();
        assert!(pair_refines(&a, &a).unwrap());
    }

    #[test]
    fn lifted_walk_refines_and_wrong_start_does_not() {
        let p = bands();
        let fine = Arc::new(p.subdivided());
        let fine = Arc::new(BrickPartition::discrete(fine.space().clone()));
        let rho = refinement_map(&fine, &p).unwrap();
        let v = Walk::plain(p.nerve().clone(), alloc::vec![1, 2, 3, 0]).unwrap();
        let lifted = lift_walk(&rho.map, &v).unwrap();
        let a = WalkOnPartition::new(fine.clone(), lifted).unwrap();
        let b = WalkOnPartition::new(p.clone(), v).unwrap();
        assert!(pair_refines(&a, &b).unwrap());
        assert!(pair_monotone_witness(&a, &b).unwrap().is_some());
        // start in block 0 instead of block 1
        let x = fine.space().vertex_at([0, 0, 0]).unwrap();
        let wrong = WalkOnPartition::point(fine, x).unwrap();
        assert!(!pair_refines(&wrong, &b).unwrap());
    }

    #[test]
    fn host_mismatch_is_rejected() {
        let p = bands();
        let other = Arc::new(BrickPartition::trivial(SpaceModel::cycle(12).unwrap()));
        let w = Walk::plain(p.nerve().clone(), alloc::vec![0, 1]).unwrap();
        assert_eq!(
            WalkOnPartition::new(other, w),
            Err(CalculusError::HostMismatch)
        );
    }
}
