use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{EpiViolation, Graph, GraphMap};
use crate::space::refinement_assignment;
use crate::walk::Walk;

use super::{AmalgamationError, IrreconcilablePair, Projector, RobustCycleWitness};

/// A graph `Z`, two maps `α₀, α₁: Z → nerve(W)` and a walk `z` on `Z`.
#[derive(Debug, Clone)]
pub struct AmalgamationCandidate {
    pub z_graph: Arc<Graph>,
    pub alpha0: GraphMap,
    pub alpha1: GraphMap,
    pub z: Walk,
}

impl AmalgamationCandidate {
    pub fn alpha(&self, side: usize) -> &GraphMap {
        if side == 0 {
            &self.alpha0
        } else {
            &self.alpha1
        }
    }

    /// `α_side · z` as a vertex sequence.
    pub fn image(&self, side: usize) -> Vec<usize> {
        let a = self.alpha(side);
        self.z.vertices().iter().map(|&x| a.apply(x)).collect()
    }
}

/// The first requirement on a candidate that fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateCondition {
    /// `α_side` is not a monotone epimorphism.
    MonotoneEpi {
        side: usize,
        violation: EpiViolation,
    },
    /// `z` repeats a vertex at positions `index` and `index + 1`.
    NotReduced { index: usize },
    /// The images of `vertex` under `ρα₀` and `ρα₁` are `distance` apart in `U`.
    Distance { vertex: usize, distance: usize },
    /// `α_side · z ⊑ w_side` fails: either a vertex out of order appears at
    /// `index`, or the walk ends after covering only `covered` vertices.
    Refinement {
        side: usize,
        index: Option<usize>,
        covered: usize,
    },
}

impl fmt::Display for CandidateCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MonotoneEpi { side, violation } => {
                write!(f, "alpha{side} is not a monotone epimorphism: {violation}")
            }
            Self::NotReduced { index } => write!(f, "z is not reduced at position {index}"),
            Self::Distance { vertex, distance } => write!(
                f,
                "vertex {vertex} of Z is sent {distance} apart in U (limit 1)"
            ),
            Self::Refinement {
                side,
                index: Some(i),
                ..
            } => write!(
                f,
                "alpha{side}·z visits a vertex outside w{side} or out of order at position {i}"
            ),
            Self::Refinement {
                side,
                index: None,
                covered,
            } => write!(
                f,
                "alpha{side}·z covers only the first {covered} vertices of w{side}"
            ),
        }
    }
}

/// The inequalities of the winding argument, in the order they are derived.
///
/// With `i` the side whose shortest refining prefix `z̄` comes first, `s = +1`
/// for `i = 0` and `s = −1` for `i = 1`, and `z̄ = z̄_v⌢z̄₀`:
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ChainStep {
    /// `s·wind(ρα_{1−i}·z̄) ≤ M_v + M_c`.
    OtherSideInitialBound,
    /// `s·wind(ρα_i·z̄₀) > 2M_v + M_c + 2`.
    LapSegmentWinding,
    /// `s·wind(ρα_{1−i}·z̄₀) > 2M_v + M_c`.
    CloseWalkTransfer,
    /// `|wind(ρα_{1−i}·z̄_v)| ≤ M_v`.
    TailSegmentWinding,
    /// `s·wind(ρα_{1−i}·z̄) > M_v + M_c`, contradicting the first bound.
    SeamCombination,
}

impl ChainStep {
    pub fn name(&self) -> &'static str {
        match self {
            Self::OtherSideInitialBound => "other-side-initial-bound",
            Self::LapSegmentWinding => "lap-segment-winding",
            Self::CloseWalkTransfer => "close-walk-transfer",
            Self::TailSegmentWinding => "tail-segment-winding",
            Self::SeamCombination => "seam-combination",
        }
    }
}

/// All windings of the argument for one candidate, signed by `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainTrace {
    /// The side `i` that refines first.
    pub side: usize,
    /// `len(z̄)`.
    pub prefix_len: usize,
    /// `len(z̄_v)`; `z̄₀` is the rest of `z̄`.
    pub split: usize,
    /// `s·wind(ρα_{1−i}·z̄)`.
    pub other_initial: i64,
    /// `s·wind(ρα_i·z̄₀)`.
    pub lap_segment: i64,
    /// `s·wind(ρα_{1−i}·z̄₀)`.
    pub transfer: i64,
    /// `|wind(ρα_{1−i}·z̄_v)|`, absent when `z̄_v` is empty.
    pub tail_segment: Option<i64>,
    /// `s` times the weight of the step from `z̄_v` into `z̄₀` on side `1−i`.
    pub seam: i64,
    pub m_v: i64,
    pub m_c: i64,
    /// False when neither side refines and the prefix instead ends where
    /// the side with more progress last advanced.
    pub complete: bool,
}

impl ChainTrace {
    pub fn holds(&self, step: ChainStep) -> bool {
        let (mv, mc) = (self.m_v, self.m_c);
        match step {
            ChainStep::OtherSideInitialBound => self.other_initial <= mv + mc,
            ChainStep::LapSegmentWinding => self.lap_segment > 2 * mv + mc + 2,
            ChainStep::CloseWalkTransfer => self.transfer > 2 * mv + mc,
            ChainStep::TailSegmentWinding => self.tail_segment.is_none_or(|t| t <= mv),
            ChainStep::SeamCombination => self.other_initial > mv + mc,
        }
    }

    /// The first step of the argument that fails on this candidate.
    pub fn first_violation(&self) -> Option<ChainStep> {
        [
            ChainStep::OtherSideInitialBound,
            ChainStep::LapSegmentWinding,
            ChainStep::CloseWalkTransfer,
            ChainStep::TailSegmentWinding,
            ChainStep::SeamCombination,
        ]
        .into_iter()
        .find(|&s| !self.holds(s))
    }
}

/// What rules a candidate out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Condition(CandidateCondition),
    Chain(ChainStep),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Condition(c) => write!(f, "condition: {c}"),
            Self::Chain(s) => write!(f, "winding inequality: {}", s.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub violation: Violation,
    /// Present whenever some side makes progress along its path, even if a
    /// condition failed first.
    pub chain: Option<ChainTrace>,
}

/// Where `seq ⊑ target` first completes or breaks, for a path `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Progress {
    /// Index at which the last vertex of `target` is first reached.
    pub complete_at: Option<usize>,
    /// Index of the first new vertex that is not the next one of `target`.
    pub broken_at: Option<usize>,
    /// Number of target vertices visited before completion or breakage.
    pub covered: usize,
    /// Index at which the last covered target vertex was first reached.
    pub last_advance: Option<usize>,
}

pub(crate) fn progress(seq: &[usize], target: &[usize]) -> Progress {
    let index: BTreeMap<usize, usize> = target.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut next = 0;
    let mut last_advance = None;
    for (j, &x) in seq.iter().enumerate() {
        match index.get(&x) {
            Some(&k) if k < next => {}
            Some(&k) if k == next => {
                next += 1;
                last_advance = Some(j);
                if next == target.len() {
                    return Progress {
                        complete_at: Some(j),
                        broken_at: None,
                        covered: next,
                        last_advance,
                    };
                }
            }
            _ => {
                return Progress {
                    complete_at: None,
                    broken_at: Some(j),
                    covered: next,
                    last_advance,
                }
            }
        }
    }
    Progress {
        complete_at: None,
        broken_at: None,
        covered: next,
        last_advance,
    }
}

/// Checks the amalgamation conditions on `cand`, then runs the winding
/// argument and names the first inequality it breaks.
///
/// The conditions are checked in order: both maps are monotone epimorphisms
/// into the nerve of `W`, `z` is reduced, `ρα₀` and `ρα₁` are within
/// distance 1 in `U`, and `α_i·z ⊑ w_i` for both sides. A failed condition
/// is itself the refutation. When every condition holds, one of the
/// winding inequalities must fail; if none does, the candidate is returned
/// as [`AmalgamationError::Consistent`].
pub fn refute_candidate(
    witness: &RobustCycleWitness,
    pair: &IrreconcilablePair,
    cand: &AmalgamationCandidate,
) -> Result<Refutation, AmalgamationError> {
    let w_nerve = pair.w_partition.nerve();
    for a in [&cand.alpha0, &cand.alpha1] {
        if **a.domain() != *cand.z_graph || **a.codomain() != **w_nerve {
            return Err(AmalgamationError::Precondition(
                "candidate maps do not go from Z to the nerve of W".into(),
            ));
        }
    }
    if **cand.z.host() != *cand.z_graph {
        return Err(AmalgamationError::Precondition(
            "candidate walk does not live on Z".into(),
        ));
    }
    let chain = chain_trace(witness, pair, cand)?;
    let fail = |c: CandidateCondition| {
        Ok(Refutation {
            violation: Violation::Condition(c),
            chain: chain.clone(),
        })
    };
    for side in 0..2 {
        if let Err(violation) = cand.alpha(side).check_monotone_epimorphism() {
            return fail(CandidateCondition::MonotoneEpi { side, violation });
        }
    }
    if let Some(index) = cand.z.vertices().windows(2).position(|p| p[0] == p[1]) {
        return fail(CandidateCondition::NotReduced { index });
    }
    let to_u = refinement_assignment(&pair.w_partition, &witness.u_pair.partition)?;
    let u_nerve = witness.u_pair.partition.nerve();
    for x in 0..cand.z_graph.n() {
        let (a, b) = (to_u[cand.alpha0.apply(x)], to_u[cand.alpha1.apply(x)]);
        if !u_nerve.adjacent(a, b) {
            let distance = u_nerve.bfs(&[a])[b];
            return fail(CandidateCondition::Distance {
                vertex: x,
                distance,
            });
        }
    }
    for (side, w) in pair.paths().into_iter().enumerate() {
        let p = progress(&cand.image(side), w.vertices());
        if p.complete_at.is_none() {
            return fail(CandidateCondition::Refinement {
                side,
                index: p.broken_at,
                covered: p.covered,
            });
        }
    }
    let trace = chain.filter(|t| t.complete).ok_or_else(|| {
        AmalgamationError::Consistent("no side of the candidate has a refining prefix".into())
    })?;
    match trace.first_violation() {
        Some(step) => Ok(Refutation {
            violation: Violation::Chain(step),
            chain: Some(trace),
        }),
        None => Err(AmalgamationError::Consistent(format!("{trace:?}"))),
    }
}

/// The winding argument on the shortest prefix of `z` along which some
/// `α_i·z` refines `w_i`. If neither side gets there, the prefix ends where
/// the side that covers more of its path last advanced, and the trace is
/// marked incomplete. `None` if neither side reaches a vertex of its path.
fn chain_trace(
    witness: &RobustCycleWitness,
    pair: &IrreconcilablePair,
    cand: &AmalgamationCandidate,
) -> Result<Option<ChainTrace>, AmalgamationError> {
    let images = [cand.image(0), cand.image(1)];
    let prog: Vec<Progress> = pair
        .paths()
        .into_iter()
        .zip(&images)
        .map(|(w, img)| progress(img, w.vertices()))
        .collect();
    let (side, end, complete) = match (prog[0].complete_at, prog[1].complete_at) {
        (Some(a), Some(b)) if b < a => (1, b, true),
        (Some(a), _) => (0, a, true),
        (None, Some(b)) => (1, b, true),
        (None, None) => {
            let side = usize::from(prog[1].covered > prog[0].covered);
            match prog[side].last_advance {
                Some(end) => (side, end, false),
                None => return Ok(None),
            }
        }
    };
    let other = 1 - side;
    let sign: i64 = if side == 0 { 1 } else { -1 };
    let c = &witness.reference;
    let to_s = Projector::new(&pair.w_partition, &witness.s_partition)?;
    let to_u = refinement_assignment(&pair.w_partition, &witness.u_pair.partition)?;
    let u_to_s = refinement_assignment(&witness.u_pair.partition, &witness.s_partition)?;
    let u_nerve = witness.u_pair.partition.nerve();
    // U blocks whose closed neighborhood lies over C
    let over_c: Vec<bool> = (0..u_nerve.n())
        .map(|u| {
            c.on_cycle(u_to_s[u]) && u_nerve.neighbors(u).iter().all(|&v| c.on_cycle(u_to_s[v]))
        })
        .collect();
    let prefix = end + 1;
    let mine = &images[side][..prefix];
    let theirs = &images[other][..prefix];
    let split = (0..prefix)
        .rev()
        .find(|&j| !over_c[to_u[mine[j]]])
        .map_or(0, |j| j + 1);
    let wind = |seq: &[usize]| to_s.wind(c, seq);
    let seam = if split > 0 && split < prefix {
        sign * c.weight(to_s.image(theirs[split - 1]), to_s.image(theirs[split]))
    } else {
        0
    };
    Ok(Some(ChainTrace {
        side,
        prefix_len: prefix,
        split,
        other_initial: sign * wind(theirs),
        lap_segment: sign * wind(&mine[split..]),
        transfer: sign * wind(&theirs[split..]),
        tail_segment: (split > 0).then(|| wind(&theirs[..split]).abs()),
        seam,
        m_v: pair.constants.m_v,
        m_c: pair.constants.m_c,
        complete,
    }))
}

/// `Z = W`, `α₀ = α₁ = id` and `z = w_side`.
pub fn identity_candidate(pair: &IrreconcilablePair, side: usize) -> AmalgamationCandidate {
    let g = pair.w_partition.nerve().clone();
    let id = GraphMap::identity(g.clone());
    AmalgamationCandidate {
        z_graph: g,
        alpha0: id.clone(),
        alpha1: id,
        z: pair.paths()[side].clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn progress_of_prefixes_and_detours() {
        let w = [4, 5, 6];
        assert_eq!(
            progress(&[4, 5, 4, 5, 6, 9], &w),
            Progress {
                complete_at: Some(4),
                broken_at: None,
                covered: 3,
                last_advance: Some(4),
            }
        );
        assert_eq!(progress(&[4, 6], &w).broken_at, Some(1));
        assert_eq!(progress(&[4, 5, 4], &w).covered, 2);
        assert_eq!(progress(&[4, 5, 4], &w).last_advance, Some(1));
        assert_eq!(progress(&[], &w).covered, 0);
        assert_eq!(progress(&[5], &w).broken_at, Some(0));
    }

    #[test]
    fn chain_steps_fail_in_order() {
        let t = ChainTrace {
            side: 0,
            prefix_len: 10,
            split: 0,
            other_initial: 3,
            lap_segment: 20,
            transfer: 18,
            tail_segment: None,
            seam: 0,
            m_v: 0,
            m_c: 7,
            complete: true,
        };
        assert_eq!(t.first_violation(), Some(ChainStep::SeamCombination));
        let bad_lap = ChainTrace {
            lap_segment: 9,
            ..t.clone()
        };
        assert_eq!(bad_lap.first_violation(), Some(ChainStep::LapSegmentWinding));
        let escaped = ChainTrace {
            other_initial: 8,
            ..t
        };
        assert_eq!(
            escaped.first_violation(),
            Some(ChainStep::OtherSideInitialBound)
        );
    }
}
