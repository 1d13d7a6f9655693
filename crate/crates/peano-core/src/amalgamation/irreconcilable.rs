use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{cyclic_order, upgrade_many_with, WalkOnPartition};
use crate::winding::CircularReference;
use crate::space::{refinement_assignment, BrickPartition};
use crate::walk::{classify, monotone_witness, Walk, WalkKind};

use super::robust::contraction_violation;
use super::{AmalgamationError, Projector, RobustCycleWitness};

/// The winding constants of an irreconcilable pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constants {
    /// Winding of the positively oriented circle.
    pub n: i64,
    /// Largest `|wind|` of an initial segment of either orientation of the circle.
    pub m_c: i64,
    /// Largest `|wind|` of an initial or final segment of the tail.
    pub m_v: i64,
    /// Least `k ≥ 1` with `k·N > 3M_v + M_c + 2`.
    pub k: i64,
}

impl Constants {
    pub fn new(n: i64, m_c: i64, m_v: i64) -> Result<Self, AmalgamationError> {
        if n <= 0 {
            return Err(AmalgamationError::Precondition(format!(
                "circle winding {n} is not positive"
            )));
        }
        let k = (3 * m_v + m_c + 2) / n + 1;
        Ok(Constants { n, m_c, m_v, k })
    }

    /// `3M_v + M_c + 2`.
    pub fn threshold(&self) -> i64 {
        3 * self.m_v + self.m_c + 2
    }
}

/// Two spaced paths `w₀, w₁` on a common `W` that agree along the lasso
/// tail, then lap the circle `k` times in opposite directions.
#[derive(Debug, Clone)]
pub struct IrreconcilablePair {
    pub w_partition: Arc<BrickPartition>,
    pub w0: Walk,
    pub w1: Walk,
    pub constants: Constants,
    /// The spaced lasso `(V, v⌢c)` the pair was built from.
    pub lasso: WalkOnPartition,
    /// `v⌢c₊ᵏ` and `v⌢c₋ᵏ` on the nerve of `V`.
    pub targets: [Walk; 2],
}

impl IrreconcilablePair {
    pub fn tail_len(&self) -> usize {
        match self.lasso.walk.kind() {
            WalkKind::Lasso { split } => split,
            _ => 0,
        }
    }

    pub fn paths(&self) -> [&Walk; 2] {
        [&self.w0, &self.w1]
    }

    /// A pair with `w₀ = w₁ = w`, which amalgamation candidates can match.
    pub fn decoy(w_partition: Arc<BrickPartition>, w: Walk) -> Result<Self, AmalgamationError> {
        WalkOnPartition::new(w_partition.clone(), w.clone())?;
        let host = w_partition.nerve().clone();
        let lasso = WalkOnPartition::new(
            w_partition.clone(),
            Walk::plain(host.clone(), Vec::from([w.vertices()[0]]))?,
        )?;
        Ok(IrreconcilablePair {
            w_partition,
            w0: w.clone(),
            w1: w.clone(),
            constants: Constants {
                n: 0,
                m_c: 0,
                m_v: 0,
                k: 0,
            },
            lasso,
            targets: [w.clone(), w],
        })
    }
}

/// A decoy pair `w₀ = w₁ = w` on a partition whose nerve is a cycle, with
/// a context taking `S = U = W` and the nerve cycle as reference.
///
/// The context is not a robust cycle; it only supplies the maps and the
/// reference needed to search and refute.
pub fn decoy_instance(
    p: Arc<BrickPartition>,
    w: Walk,
) -> Result<(RobustCycleWitness, IrreconcilablePair), AmalgamationError> {
    let order = cyclic_order(p.nerve()).ok_or_else(|| {
        AmalgamationError::Precondition("decoy partition nerve is not a cycle".into())
    })?;
    let reference = CircularReference::from_lap(p.nerve().clone(), &order)?;
    let context = RobustCycleWitness {
        s_partition: p.clone(),
        reference,
        u_pair: WalkOnPartition::point(p.clone(), order[0])?,
    };
    let pair = IrreconcilablePair::decoy(p, w)?;
    Ok((context, pair))
}

/// The four winding bounds on the paths of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClaimReport {
    /// Least winding of an initial segment of `w₀`; must be `≥ −(M_v + M_c)`.
    pub a0: i64,
    /// Greatest winding of an initial segment of `w₁`; must be `≤ M_v + M_c`.
    pub a1: i64,
    /// Least winding of a final segment of `w₀` covering `c₊ᵏ`; must be `> 2M_v + M_c + 2`.
    pub b0: i64,
    /// Greatest winding of a final segment of `w₁` covering `c₋ᵏ`; must be `< −(2M_v + M_c + 2)`.
    pub b1: i64,
    pub constants: Constants,
}

impl ClaimReport {
    pub fn a0_holds(&self) -> bool {
        self.a0 >= -(self.constants.m_v + self.constants.m_c)
    }

    pub fn a1_holds(&self) -> bool {
        self.a1 <= self.constants.m_v + self.constants.m_c
    }

    pub fn b0_holds(&self) -> bool {
        self.b0 > 2 * self.constants.m_v + self.constants.m_c + 2
    }

    pub fn b1_holds(&self) -> bool {
        self.b1 < -(2 * self.constants.m_v + self.constants.m_c + 2)
    }

    pub fn k_holds(&self) -> bool {
        self.constants.k * self.constants.n > self.constants.threshold()
    }

    pub fn holds(&self) -> bool {
        self.a0_holds() && self.a1_holds() && self.b0_holds() && self.b1_holds() && self.k_holds()
    }
}

/// Evaluates the four winding bounds on `w₀, w₁`.
///
/// Final segments covering `c±ᵏ` are the ones starting at an entry whose
/// monotone image in `v⌢c±ᵏ` is at or before the first lap.
pub fn check_claims(
    witness: &RobustCycleWitness,
    pair: &IrreconcilablePair,
) -> Result<ClaimReport, AmalgamationError> {
    let c = &witness.reference;
    let proj = Projector::new(&pair.w_partition, &witness.s_partition)?;
    let to_v = refinement_assignment(&pair.w_partition, &pair.lasso.partition)?;
    let start = pair.tail_len();
    let mut ends = [(0i64, 0i64); 2];
    for (i, w) in pair.paths().into_iter().enumerate() {
        let seq = w.vertices();
        let winds = proj.prefix_winds(c, seq);
        let total = *winds.last().expect("nonempty path");
        let image: Vec<usize> = seq.iter().map(|&b| to_v[b]).collect();
        let phi = monotone_witness(&image, pair.targets[i].vertices()).ok_or_else(|| {
            AmalgamationError::Check(format!("w{i} does not monotonically refine its target"))
        })?;
        // phi[t] is where the run over target entry t starts
        let stop = phi.get(start + 1).copied().unwrap_or(seq.len());
        let finals: Vec<i64> = (0..stop).map(|j| total - winds[j]).collect();
        let initial = if i == 0 {
            *winds.iter().min().expect("nonempty")
        } else {
            *winds.iter().max().expect("nonempty")
        };
        let last = if i == 0 {
            finals.iter().min()
        } else {
            finals.iter().max()
        };
        let last = *last.ok_or(AmalgamationError::Check(
            "no final segment covers the laps".into(),
        ))?;
        ends[i] = (initial, last);
    }
    Ok(ClaimReport {
        a0: ends[0].0,
        a1: ends[1].0,
        b0: ends[0].1,
        b1: ends[1].1,
        constants: pair.constants,
    })
}

/// Builds `w₀, w₁` from a spaced lasso `(V, v⌢c)` with `|wind_C(ρ·c)| ≥ ℓ`.
///
/// `c₊` is the orientation of `c` with positive winding `N` and `c₋` the
/// other one; with `k` as in [`Constants`], the walks `v⌢c₊ᵏ` and `v⌢c₋ᵏ`
/// are uncrossed and are upgraded together to spaced paths on one `W`.
pub fn build_irreconcilable(
    witness: &RobustCycleWitness,
    lasso: &WalkOnPartition,
    budget: u32,
) -> Result<IrreconcilablePair, AmalgamationError> {
    let WalkKind::Lasso { split } = lasso.walk.kind() else {
        return Err(AmalgamationError::Precondition(
            "build_irreconcilable needs a lasso".into(),
        ));
    };
    if !classify(&lasso.walk).spaced_path {
        return Err(AmalgamationError::Precondition(
            "lasso is not a spaced lasso path".into(),
        ));
    }
    if let Some((near, far)) =
        contraction_violation(&witness.u_pair.partition, &witness.s_partition)?
    {
        return Err(AmalgamationError::Contraction { near, far });
    }
    let c = &witness.reference;
    let ell = witness.ell() as i64;
    let proj = Projector::new(&lasso.partition, &witness.s_partition)?;
    let seq = lasso.walk.vertices();
    let tail = &seq[..split];
    let mut plus = seq[split..].to_vec();
    if proj.wind(c, &plus) < 0 {
        let m = plus.len();
        plus[1..m - 1].reverse();
    }
    let n = proj.wind(c, &plus);
    if n < ell {
        return Err(AmalgamationError::Precondition(format!(
            "circle winds {n} times, fewer than {ell}"
        )));
    }
    let mut minus = plus.clone();
    minus[1..plus.len() - 1].reverse();
    let m_c = [&plus, &minus]
        .iter()
        .flat_map(|lap| proj.prefix_winds(c, lap))
        .map(i64::abs)
        .max()
        .unwrap_or(0);
    let tail_total = proj.wind(c, tail);
    let m_v = proj
        .prefix_winds(c, tail)
        .into_iter()
        .flat_map(|w| [w.abs(), (tail_total - w).abs()])
        .max()
        .unwrap_or(0);
    let constants = Constants::new(n, m_c, m_v)?;
    let host = lasso.partition.nerve().clone();
    let targets = [&plus, &minus].map(|lap| {
        let mut t = tail.to_vec();
        t.push(lap[0]);
        for _ in 0..constants.k {
            t.extend_from_slice(&lap[1..]);
        }
        t
    });
    let targets = [
        Walk::plain(host.clone(), targets[0].clone())?,
        Walk::plain(host, targets[1].clone())?,
    ];
    let circle: Vec<usize> = plus[..plus.len() - 1].to_vec();
    let entry = tail.last().copied();
    let pref = move |fine: &BrickPartition| entry_side_depth(fine, &circle, entry);
    let (w_partition, mut walks) = upgrade_many_with(&lasso.partition, &targets, budget, Some(&pref))?;
    let w1 = walks.pop().expect("two walks");
    let w0 = walks.pop().expect("two walks");
    let pair = IrreconcilablePair {
        w_partition,
        w0,
        w1,
        constants,
        lasso: lasso.clone(),
        targets,
    };
    let report = check_claims(witness, &pair)?;
    if !report.holds() {
        return Err(AmalgamationError::Check(format!(
            "winding bounds fail: {report:?}"
        )));
    }
    Ok(pair)
}

/// Route costs that keep laps around the circle close to the side where the
/// tail comes in, so each lap hugs the previous one and the spiral never
/// walls itself off.
///
/// The cost of a vertex over the circle is four times its distance, inside
/// the circle's blocks, from the boundary component touching the entry
/// block (or the one nearest the circle's first block without a tail).
fn entry_side_depth(fine: &BrickPartition, circle: &[usize], entry: Option<usize>) -> Vec<u32> {
    let g = fine.space().fine();
    let n = g.n();
    let mut inside = vec![false; fine.num_blocks()];
    for &b in circle {
        inside[b] = true;
    }
    let r = |x: usize| inside[fine.block_of()[x]];
    let boundary: Vec<bool> = (0..n).map(|x| r(x) && g.neighbors(x).iter().any(|&y| !r(y))).collect();
    let seeds: Vec<usize> = match entry {
        Some(t) => (0..n)
            .filter(|&x| boundary[x] && g.neighbors(x).iter().any(|&y| fine.block_of()[y] == t))
            .collect(),
        None => {
            let first = fine.block(circle[0]);
            let d = g.bfs(first);
            (0..n).filter(|&x| boundary[x]).min_by_key(|&x| d[x]).into_iter().collect()
        }
    };
    // the whole boundary component through the seeds
    let mut side = vec![false; n];
    let mut stack = seeds;
    for &x in &stack {
        side[x] = true;
    }
    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            if boundary[y] && !side[y] {
                side[y] = true;
                stack.push(y);
            }
        }
    }
    let mut depth = vec![0u32; n];
    let mut seen = side.clone();
    let mut frontier: Vec<usize> = (0..n).filter(|&x| side[x]).collect();
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &x in &frontier {
            for &y in g.neighbors(x) {
                if r(y) && !seen[y] {
                    seen[y] = true;
                    depth[y] = 4 * d;
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    depth
}
