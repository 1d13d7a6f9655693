use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::route::bfs_route;
use crate::calculus::{
    cycle_partition_from_covering, pair_monotone_witness, pair_refines, path_doubling, space_out,
    upgrade_to_path, CircularCovering, WalkOnPartition,
};
use crate::graph::Graph;
use crate::space::{refinement_assignment, BrickPartition};
use crate::walk::{classify, join, Walk, WalkKind};
use crate::winding::CircularReference;

use super::{AmalgamationError, Projector};

/// A cycle partition `S` with reference lap `C`, and a spaced path `u` on
/// `U ⪯ S` whose image monotonically refines `C⌢C`.
#[derive(Debug, Clone)]
pub struct RobustCycleWitness {
    pub s_partition: Arc<BrickPartition>,
    pub reference: CircularReference,
    pub u_pair: WalkOnPartition,
}

impl RobustCycleWitness {
    pub fn ell(&self) -> usize {
        self.reference.len()
    }

    /// `wind_C(ρ·u)`.
    pub fn winding(&self) -> Result<i64, AmalgamationError> {
        let p = Projector::new(&self.u_pair.partition, &self.s_partition)?;
        Ok(p.wind(&self.reference, self.u_pair.walk.vertices()))
    }

    /// Re-checks the invariants: `u` is a spaced path, it winds `2ℓ` times,
    /// `ρ·u` monotonically refines `C⌢C`, and `U → S` contracts distance 2
    /// to distance 1.
    pub fn check(&self) -> Result<(), AmalgamationError> {
        if !classify(&self.u_pair.walk).spaced_path {
            return Err(AmalgamationError::Check("u is not a spaced path".into()));
        }
        let wind = self.winding()?;
        if wind != 2 * self.ell() as i64 {
            return Err(AmalgamationError::Check(format!(
                "u winds {wind} times, expected {}",
                2 * self.ell()
            )));
        }
        let twice = twice_around(&self.reference)?;
        let target = WalkOnPartition::new(self.s_partition.clone(), twice)?;
        if pair_monotone_witness(&self.u_pair, &target)?.is_none() {
            return Err(AmalgamationError::Check(
                "ρ·u does not monotonically refine C⌢C".into(),
            ));
        }
        if let Some((near, far)) = contraction_violation(&self.u_pair.partition, &self.s_partition)?
        {
            return Err(AmalgamationError::Contraction { near, far });
        }
        Ok(())
    }
}

/// `C⌢C` as a plain walk of length `2ℓ + 1`.
pub(crate) fn twice_around(c: &CircularReference) -> Result<Walk, AmalgamationError> {
    Ok(join(&c.cycle().as_plain(), &c.cycle().as_plain())?)
}

/// A pair of blocks of `U` at nerve distance at most 2 whose images in `S`
/// are neither equal nor adjacent, if there is one.
pub fn contraction_violation(
    u: &BrickPartition,
    s: &BrickPartition,
) -> Result<Option<(usize, usize)>, AmalgamationError> {
    let rho = refinement_assignment(u, s)?;
    let g = u.nerve();
    let h = s.nerve();
    for a in 0..g.n() {
        for b in ball(g, a, 2) {
            if !h.adjacent(rho[a], rho[b]) {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// Vertices within distance `r` of `a`, `a` included.
pub(crate) fn ball(g: &Graph, a: usize, r: usize) -> Vec<usize> {
    let mut out = vec![a];
    let mut frontier = vec![a];
    for _ in 0..r {
        let mut next = Vec::new();
        for &x in &frontier {
            for &y in g.neighbors(x) {
                if !out.contains(&y) {
                    out.push(y);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    out
}

/// The robust cycle of a circular covering.
///
/// `S` is the cycle partition of the covering and `C` its lap in block
/// order. `C⌢C` is uncrossed, so it upgrades to a spaced path `u` whose
/// image refines it monotonically and therefore winds `2ℓ` times.
pub fn build_robust_cycle(
    cover: &CircularCovering,
    budget: u32,
) -> Result<RobustCycleWitness, AmalgamationError> {
    let s = Arc::new(cycle_partition_from_covering(cover, budget)?);
    let lap: Vec<usize> = (0..s.num_blocks()).collect();
    let reference = CircularReference::from_lap(s.nerve().clone(), &lap)?;
    let twice = twice_around(&reference)?;
    let u_pair = upgrade_to_path(&s, &twice, budget)?;
    let witness = RobustCycleWitness {
        s_partition: s,
        reference,
        u_pair,
    };
    witness.check()?;
    Ok(witness)
}

/// A spaced lasso `(V', v'⌢c) ⪯ (V, v)` whose circle winds at least `ℓ`
/// times around `C`, for any pair `(V, v) ⪯ (U, u)`.
///
/// The input is first upgraded to a path if needed. With `t₀` the shortest
/// initial segment winding more than `ℓ` times and `C(k₀)` the block where
/// it ends, `v` is doubled into `v₀, v₁`. Their blocks over `C(k₀)` split by
/// whether the winding up to them is below or above `ℓ`, and a shortest nerve
/// path `z` over `C(k₀)` joins the two groups. The lasso follows `v₀`, then
/// `v₁` backwards, closing up through `z`, which adds no winding, so the
/// circle winds by a multiple of `ℓ` that is not zero. The lasso is finally
/// spaced out.
pub fn extend_to_lasso(
    witness: &RobustCycleWitness,
    pair: &WalkOnPartition,
    budget: u32,
) -> Result<WalkOnPartition, AmalgamationError> {
    if pair.walk.kind() != WalkKind::Plain || pair.walk.is_empty() {
        return Err(AmalgamationError::Precondition(
            "extend_to_lasso needs a nonempty plain walk".into(),
        ));
    }
    if !pair_refines(pair, &witness.u_pair)? {
        return Err(AmalgamationError::Precondition(
            "(V, v) does not refine (U, u)".into(),
        ));
    }
    let c = &witness.reference;
    let ell = c.len() as i64;
    let path = if classify(&pair.walk).path {
        pair.clone()
    } else {
        upgrade_to_path(&pair.partition, &pair.walk, budget)?
    };
    let proj = Projector::new(&path.partition, &witness.s_partition)?;
    let seq = path.walk.vertices();
    if !c.on_cycle(proj.image(seq[0])) {
        return Err(AmalgamationError::Precondition(
            "v does not start over C".into(),
        ));
    }
    let winds = proj.prefix_winds(c, seq);
    let t0 = winds.iter().position(|w| w.abs() > ell).ok_or_else(|| {
        AmalgamationError::Precondition(format!("v never winds more than {ell} times"))
    })?;
    let k0 = c.position(proj.image(seq[t0])).expect("walk stays over C");

    let d = path_doubling(&path.partition, &path.walk, budget)?;
    let fine = &d.partition;
    let proj2 = Projector::new(fine, &witness.s_partition)?;
    let vs = [d.v0.vertices().to_vec(), d.v1.vertices().to_vec()];
    let over_k0 = |b: usize| c.position(proj2.image(b)) == Some(k0);
    // (track, index, above ℓ) for inner blocks of v₀, v₁ over C(k₀)
    let mut place = vec![None; fine.num_blocks()];
    for (i, v) in vs.iter().enumerate() {
        let w = proj2.prefix_winds(c, v);
        for p in 1..v.len() - 1 {
            if over_k0(v[p]) {
                place[v[p]] = Some((i, p, w[p].abs() > ell));
            }
        }
    }
    let sources: Vec<usize> = (0..fine.num_blocks())
        .filter(|&b| matches!(place[b], Some((_, _, false))))
        .collect();
    let z = bfs_route(fine.nerve(), &sources, over_k0, |b| {
        matches!(place[b], Some((_, _, true)))
    })
    .ok_or(AmalgamationError::Check(
        "no path over C(k₀) between the two passes".into(),
    ))?;
    let (ia, pa, _) = place[z[0]].expect("source is placed");
    let (ib, pb, _) = place[z[z.len() - 1]].expect("target is placed");
    let inner = &z[1..z.len() - 1];

    let (tail, circle) = if ia == ib {
        // both ends on one track, which plays v₁
        let (one, zero) = (&vs[ia], &vs[1 - ia]);
        let (q, q2) = (pa.min(pb), pa.max(pb));
        let mut interior = inner.to_vec();
        if pa < pb {
            interior.reverse();
        }
        let mut tail = zero.clone();
        tail.extend(one[q2 + 1..one.len() - 1].iter().rev());
        let mut circle = vec![one[q2]];
        circle.extend(interior);
        circle.extend_from_slice(&one[q..q2]);
        (tail, circle)
    } else {
        let (p0, p1) = if ia == 0 { (pa, pb) } else { (pb, pa) };
        let mut interior = inner.to_vec();
        if ia == 0 {
            interior.reverse();
        }
        let (v0, v1) = (&vs[0], &vs[1]);
        let tail = v0[..p0].to_vec();
        let mut circle = v0[p0..].to_vec();
        circle.extend(v1[p1..v1.len() - 1].iter().rev());
        circle.extend(interior);
        (tail, circle)
    };
    let split = tail.len();
    let mut lasso_seq = tail;
    lasso_seq.extend_from_slice(&circle);
    lasso_seq.push(circle[0]);
    let lasso = Walk::new(fine.nerve().clone(), lasso_seq, WalkKind::Lasso { split })?;
    if !classify(&lasso).path {
        return Err(AmalgamationError::Check("lasso is not a lasso path".into()));
    }
    let out = space_out(fine, &lasso, budget)?;
    check_lasso(witness, &out, pair)?;
    Ok(out)
}

/// Checks a lasso `(V', v'⌢c)`: spaced lasso path, `⪯` the input pair,
/// `|wind_C(ρ·c)| ≥ ℓ` and `ρ(B₂(c)) ⊆ C`.
pub(crate) fn check_lasso(
    witness: &RobustCycleWitness,
    lasso: &WalkOnPartition,
    input: &WalkOnPartition,
) -> Result<(), AmalgamationError> {
    let w = &lasso.walk;
    let WalkKind::Lasso { split } = w.kind() else {
        return Err(AmalgamationError::Check("not a lasso".into()));
    };
    if !classify(w).spaced_path {
        return Err(AmalgamationError::Check(
            "lasso is not a spaced lasso path".into(),
        ));
    }
    if !pair_refines(lasso, input)? {
        return Err(AmalgamationError::Check(
            "lasso does not refine the input pair".into(),
        ));
    }
    let proj = Projector::new(&lasso.partition, &witness.s_partition)?;
    let circle = &w.vertices()[split..];
    let wind = proj.wind(&witness.reference, circle);
    if wind.unsigned_abs() < witness.ell() as u64 {
        return Err(AmalgamationError::Check(format!(
            "lasso circle winds only {wind} times"
        )));
    }
    let g = lasso.partition.nerve();
    for &b in circle {
        if ball(g, b, 2)
            .iter()
            .any(|&x| !witness.reference.on_cycle(proj.image(x)))
        {
            return Err(AmalgamationError::Check(
                "the 2-ball of the circle leaves C".into(),
            ));
        }
    }
    Ok(())
}
