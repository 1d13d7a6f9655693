//! Robust cycles, irreconcilable pairs of spaced paths, and the machinery
//! that refutes amalgamation candidates for them.
//!
//! A robust cycle is a cycle partition `S` with its circular reference `C`
//! and a spaced path `u` on a refinement `U` whose image winds twice around
//! `C`. Any pair `(V, v) ⪯ (U, u)` extends to a spaced lasso whose circle
//! winds at least once, and from that lasso two spaced paths are built that
//! no amalgamation candidate can reconcile.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::calculus::CalculusError;
use crate::graph::GraphError;
use crate::space::{refinement_assignment, BrickPartition, SpaceError};
use crate::walk::WalkError;
use crate::winding::{CircularReference, WindingError};

mod irreconcilable;
mod refute;
mod robust;
mod search;

pub use irreconcilable::{
    build_irreconcilable, check_claims, decoy_instance, ClaimReport, Constants, IrreconcilablePair,
};

pub use refute::{
    identity_candidate, refute_candidate, AmalgamationCandidate, CandidateCondition, ChainStep,
    ChainTrace, Refutation, Violation,
};
pub use search::{
    canonical_code, connected_graphs, exhaustive_search, AutomatonCounts, ExplicitCounts, NearMiss,
    NearMissKind, SearchBounds, SearchReport, Survivor, SurvivorOrigin, EXPLICIT_MAX_VERTICES,
    STATE_LIMIT,
};
pub use robust::{build_robust_cycle, contraction_violation, extend_to_lasso, RobustCycleWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmalgamationError {
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Winding(#[from] WindingError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(
        "blocks {near} and {far} of U are within distance 2 but their images in S are not adjacent"
    )]
    Contraction { near: usize, far: usize },
    #[error("construction check failed: {0}")]
    Check(String),
    #[error("candidate passed every condition and every inequality: {0}")]
    Consistent(String),
}

/// Winding around `C` of walks on a refinement of `S`.
#[derive(Debug, Clone)]
pub(crate) struct Projector {
    rho: Vec<usize>,
}

impl Projector {
    pub(crate) fn new(
        fine: &BrickPartition,
        s: &BrickPartition,
    ) -> Result<Self, AmalgamationError> {
        Ok(Projector {
            rho: refinement_assignment(fine, s)?,
        })
    }

    pub(crate) fn image(&self, b: usize) -> usize {
        self.rho[b]
    }

    pub(crate) fn wind(&self, c: &CircularReference, seq: &[usize]) -> i64 {
        seq.windows(2)
            .map(|p| c.weight(self.rho[p[0]], self.rho[p[1]]))
            .sum()
    }

    /// Winding numbers of all initial segments `seq[..=i]`.
    pub(crate) fn prefix_winds(&self, c: &CircularReference, seq: &[usize]) -> Vec<i64> {
        let mut out = Vec::with_capacity(seq.len());
        let mut acc = 0;
        for (i, &b) in seq.iter().enumerate() {
            if i > 0 {
                acc += c.weight(self.rho[seq[i - 1]], self.rho[b]);
            }
            out.push(acc);
        }
        out
    }
}
