//! The robust-cycle pipeline from a cycle partition to a searched
//! irreconcilable pair, stage by stage, with JSON renderings.

use std::sync::Arc;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use peano_core::amalgamation::{
    build_irreconcilable, build_robust_cycle, check_claims, extend_to_lasso, AmalgamationCandidate,
    ChainTrace, ClaimReport, IrreconcilablePair, NearMissKind, Refutation,
    RobustCycleWitness, SearchBounds, SearchReport, SurvivorOrigin, Violation,
};
use peano_core::calculus::{covering_from_cycle_partition, CircularCovering, WalkOnPartition};
use peano_core::{refinement_map, BrickPartition, CircularReference, Walk};

use crate::io::{covering_json, partition_json, walk_json};

/// The robust cycle of a cycle partition.
pub fn robust_stage(
    s: &BrickPartition,
    budget: u32,
) -> Result<(CircularCovering, RobustCycleWitness)> {
    let cover = covering_from_cycle_partition(s, budget).context("cycle partition to covering")?;
    let witness = build_robust_cycle(&cover, budget).context("robust cycle")?;
    Ok((cover, witness))
}

/// Every stage up to the irreconcilable pair and its winding bounds.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub cover: CircularCovering,
    pub witness: RobustCycleWitness,
    pub lasso: WalkOnPartition,
    pub pair: IrreconcilablePair,
    pub claims: ClaimReport,
}

impl Pipeline {
    pub fn build(s: &BrickPartition, budget: u32) -> Result<Self> {
        let (cover, witness) = robust_stage(s, budget)?;
        let lasso = extend_to_lasso(&witness, &witness.u_pair, budget).context("lasso")?;
        let pair = build_irreconcilable(&witness, &lasso, budget).context("irreconcilable pair")?;
        let claims = check_claims(&witness, &pair)?;
        Ok(Pipeline {
            cover,
            witness,
            lasso,
            pair,
            claims,
        })
    }

    /// `|W| + 2` vertices and `2·len(w₀)` entries.
    pub fn default_bounds(&self) -> SearchBounds {
        SearchBounds {
            z_vertex_bound: self.pair.w_partition.num_blocks() + 2,
            z_length_bound: 2 * self.pair.w0.len(),
        }
    }

    pub fn json(&self) -> Result<Value> {
        Ok(json!({
            "covering": covering_json(&self.cover),
            "robust": witness_json(&self.witness)?,
            "lasso": pair_on_partition_json(&self.lasso, &self.witness)?,
            "irreconcilable": irreconcilable_json(&self.witness, &self.pair, &self.claims)?,
        }))
    }
}

/// Winding of every initial segment of the image of `w` in `S`.
pub fn winding_table(
    partition: &Arc<BrickPartition>,
    w: &Walk,
    witness: &RobustCycleWitness,
) -> Result<Vec<i64>> {
    let rho = refinement_map(partition, &witness.s_partition)?;
    let c = &witness.reference;
    let image: Vec<usize> = w.vertices().iter().map(|&b| rho.map.apply(b)).collect();
    Ok((0..image.len())
        .map(|t| c.winding_of_seq(&image[..=t]))
        .collect())
}

pub fn reference_json(c: &CircularReference) -> Value {
    json!({ "lap": c.cycle().body(), "length": c.len(), "spaced": c.is_spaced() })
}

pub fn witness_json(w: &RobustCycleWitness) -> Result<Value> {
    Ok(json!({
        "s_partition": partition_json(&w.s_partition),
        "reference": reference_json(&w.reference),
        "ell": w.ell(),
        "u_partition": partition_json(&w.u_pair.partition),
        "u": walk_json(&w.u_pair.walk),
        "winding": w.winding()?,
        "winding_table": winding_table(&w.u_pair.partition, &w.u_pair.walk, w)?,
    }))
}

pub fn pair_on_partition_json(p: &WalkOnPartition, witness: &RobustCycleWitness) -> Result<Value> {
    Ok(json!({
        "partition": partition_json(&p.partition),
        "walk": walk_json(&p.walk),
        "winding_table": winding_table(&p.partition, &p.walk, witness)?,
    }))
}

pub fn claims_json(r: &ClaimReport) -> Value {
    json!({
        "a0": r.a0, "a0_holds": r.a0_holds(),
        "a1": r.a1, "a1_holds": r.a1_holds(),
        "b0": r.b0, "b0_holds": r.b0_holds(),
        "b1": r.b1, "b1_holds": r.b1_holds(),
        "k_times_n_exceeds_threshold": r.k_holds(),
        "holds": r.holds(),
    })
}

pub fn irreconcilable_json(
    witness: &RobustCycleWitness,
    pair: &IrreconcilablePair,
    claims: &ClaimReport,
) -> Result<Value> {
    let c = pair.constants;
    Ok(json!({
        "constants": { "N": c.n, "M_c": c.m_c, "M_v": c.m_v, "k": c.k, "threshold": c.threshold() },
        "w_partition": partition_json(&pair.w_partition),
        "w0": walk_json(&pair.w0),
        "w1": walk_json(&pair.w1),
        "targets": [walk_json(&pair.targets[0]), walk_json(&pair.targets[1])],
        "winding_tables": [
            winding_table(&pair.w_partition, &pair.w0, witness)?,
            winding_table(&pair.w_partition, &pair.w1, witness)?,
        ],
        "claims": claims_json(claims),
    }))
}

pub fn trace_json(t: &ChainTrace) -> Value {
    json!({
        "side": t.side,
        "prefix_len": t.prefix_len,
        "split": t.split,
        "other_initial": t.other_initial,
        "lap_segment": t.lap_segment,
        "transfer": t.transfer,
        "tail_segment": t.tail_segment,
        "seam": t.seam,
        "M_v": t.m_v,
        "M_c": t.m_c,
        "complete": t.complete,
        "first_violation": t.first_violation().map(|s| s.name()),
    })
}

pub fn refutation_json(r: &Refutation) -> Value {
    let violation = match &r.violation {
        Violation::Condition(c) => json!({ "kind": "condition", "detail": c.to_string() }),
        Violation::Chain(s) => json!({ "kind": "inequality", "step": s.name() }),
    };
    json!({ "violation": violation, "chain": r.chain.as_ref().map(trace_json) })
}

pub fn candidate_json(c: &AmalgamationCandidate) -> Value {
    json!({
        "z_graph": { "vertices": c.z_graph.n(), "edges": c.z_graph.edges() },
        "alpha0": c.alpha0.assignment(),
        "alpha1": c.alpha1.assignment(),
        "z": c.z.vertices(),
    })
}

pub fn search_json(r: &SearchReport) -> Value {
    let near: Vec<Value> = r
        .near_misses
        .iter()
        .map(|m| {
            let kind = match m.kind {
                NearMissKind::Stalled { side, reached } => {
                    json!({ "stalled": { "side": side, "reached": reached } })
                }
                NearMissKind::OneSided { side } => json!({ "one_sided": { "side": side } }),
            };
            json!({
                "kind": kind,
                "z_vertices": m.candidate.z_graph.n(),
                "z_length": m.candidate.z.len(),
                "refutation": refutation_json(&m.refutation),
            })
        })
        .collect();
    let survivors: Vec<Value> = r
        .survivors
        .iter()
        .map(|s| {
            let origin = match s.origin {
                SurvivorOrigin::Automaton => "automaton",
                SurvivorOrigin::Explicit => "explicit",
                SurvivorOrigin::Identity => "identity",
            };
            json!({ "origin": origin, "candidate": candidate_json(&s.candidate) })
        })
        .collect();
    let a = r.automaton;
    json!({
        "bounds": { "z_vertex_bound": r.bounds.z_vertex_bound, "z_length_bound": r.bounds.z_length_bound },
        "w_blocks": r.w_blocks,
        "automaton": {
            "states": a.states,
            "tracking": a.tracking,
            "one_side_done": a.one_side_done,
            "accepting": a.accepting,
            "closed": a.closed,
        },
        "shortest_accepting": r.shortest_accepting,
        "explicit": r.explicit.map(|e| json!({
            "graphs": e.graphs,
            "epi_pairs": e.epi_pairs,
            "close_pairs": e.close_pairs,
            "with_walk": e.with_walk,
        })),
        "survivors": survivors,
        "near_misses": near,
        "notes": r.notes,
    })
}
