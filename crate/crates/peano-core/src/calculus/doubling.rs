use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::space::BrickPartition;
use crate::walk::{classify, monotone_witness, Walk, WalkKind};

use super::route::{fatten, two_disjoint_paths, FattenOptions, Track, TrackKind};
use super::{CalculusError, WalkOnPartition};

/// Two paths on a common refinement, disjoint except for their endpoints.
#[derive(Debug, Clone)]
pub struct Doubled {
    pub partition: Arc<BrickPartition>,
    pub v0: Walk,
    pub v1: Walk,
}

/// Doubles a path `u` on the nerve of `p`.
///
/// Two vertex-disjoint fine paths are routed through the tube `∪ u(i)`,
/// moving only forward along `u`. Their runs inside the inner blocks of `u`
/// become blocks, while the first and last blocks of `u` are kept whole, so
/// both outputs share their endpoints and push down onto `u` monotonically.
/// Paths of length at most 2 are returned as they are.
pub fn path_doubling(
    p: &Arc<BrickPartition>,
    u: &Walk,
    budget: u32,
) -> Result<Doubled, CalculusError> {
    WalkOnPartition::new(p.clone(), u.clone())?;
    if u.kind() != WalkKind::Plain || !classify(u).path || u.is_empty() {
        return Err(CalculusError::Precondition(
            "path_doubling needs a nonempty path".into(),
        ));
    }
    let seq = u.vertices();
    let len = seq.len();
    if len <= 2 {
        return Ok(Doubled {
            partition: p.clone(),
            v0: u.clone(),
            v1: u.clone(),
        });
    }
    let base = p.space().level();
    for level in base..=base + budget {
        let fine = p.pull_to_level(level);
        let n = fine.space().n();
        let mut pos = vec![usize::MAX; fine.num_blocks()];
        for (i, &b) in seq.iter().enumerate() {
            pos[b] = i;
        }
        let layer: Vec<usize> = (0..n).map(|x| pos[fine.block_of()[x]]).collect();
        let s = fine.block(seq[0])[0];
        let t = fine.block(seq[len - 1])[0];
        let strong = fine.space().strong().clone();
        let out = |x: usize| -> Vec<usize> {
            strong
                .neighbors(x)
                .iter()
                .copied()
                .filter(|&y| layer[y] == layer[x] || layer[y] == layer[x] + 1)
                .collect()
        };
        let Some(paths) = two_disjoint_paths(n, s, t, |x| layer[x] != usize::MAX, out) else {
            continue;
        };
        let tracks: Vec<Track> = paths
            .iter()
            .map(|path| {
                let mut segments = vec![fine.block(seq[0]).to_vec()];
                for i in 1..len - 1 {
                    segments.push(path.iter().copied().filter(|&x| layer[x] == i).collect());
                }
                segments.push(fine.block(seq[len - 1]).to_vec());
                Track {
                    segments,
                    kind: TrackKind::Plain,
                }
            })
            .collect();
        let opts = FattenOptions {
            fill_corners: false,
            grow: Some(usize::MAX),
            can_grow: &|_, _| true,
            chop: None,
        };
        let f = fatten(&fine, &tracks, &opts)?;
        let partition = Arc::new(f.partition);
        let mut walks = f.walks.into_iter();
        let v0 = walks.next().expect("two tracks");
        let v1 = walks.next().expect("two tracks");
        check(&partition, p, u, &v0, &v1)?;
        return Ok(Doubled { partition, v0, v1 });
    }
    Err(CalculusError::budget(
        "path_doubling",
        format!(
            "no two disjoint fine paths through the tube up to level {}",
            base + budget
        ),
    ))
}

fn check(
    w: &Arc<BrickPartition>,
    p: &Arc<BrickPartition>,
    u: &Walk,
    v0: &Walk,
    v1: &Walk,
) -> Result<(), CalculusError> {
    let coarse = WalkOnPartition::new(p.clone(), u.clone())?;
    for v in [v0, v1] {
        let pair = WalkOnPartition::new(w.clone(), v.clone())?;
        let pushed = pair.induced_on(&coarse.partition)?;
        if !classify(v).path || monotone_witness(pushed.vertices(), u.vertices()).is_none() {
            return Err(CalculusError::Construction(
                "doubled path does not refine the input monotonically",
            ));
        }
    }
    let inner0 = &v0.vertices()[1..v0.len() - 1];
    if v1.vertices()[1..v1.len() - 1]
        .iter()
        .any(|b| inner0.contains(b))
        || v0.first() != v1.first()
        || v0.last() != v1.last()
    {
        return Err(CalculusError::Construction(
            "doubled paths share inner blocks",
        ));
    }
    Ok(())
}
