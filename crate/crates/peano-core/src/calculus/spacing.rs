use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::space::BrickPartition;
use crate::walk::{classify, Walk, WalkKind};

use super::route::{fatten, phased_route, FattenOptions, Track, TrackKind};
use super::{pair_monotone_witness, CalculusError, WalkOnPartition};

/// A spaced path `z` of the same kind as `w` on a refinement of `p`, with
/// `ρ·z` monotonically refining `w` and `ρ(B₁(z)) ⊆ w`.
///
/// The fine route only uses vertices of `w(i)` whose neighbors all lie in
/// blocks of `w` held near position `i`, so blocks built around it can only
/// touch at consecutive positions. A circle is routed from its first block
/// around and back to the same fine vertex.
pub fn space_out(
    p: &Arc<BrickPartition>,
    w: &Walk,
    budget: u32,
) -> Result<WalkOnPartition, CalculusError> {
    let input = WalkOnPartition::new(p.clone(), w.clone())?;
    if w.is_empty() || !classify(w).path {
        return Err(CalculusError::Precondition(
            "space_out needs a path, circular path or lasso path".into(),
        ));
    }
    let wm = w.vertex_mask();
    if classify(w).spaced_path && ball_maps_into(p.nerve(), w, |b| b, &wm) {
        return Ok(input);
    }
    let (body, kind) = match w.kind() {
        WalkKind::Plain => (w.vertices().to_vec(), TrackKind::Plain),
        WalkKind::Circular => (w.body().to_vec(), TrackKind::Circular),
        WalkKind::Lasso { split } => (
            w.vertices()[..w.vertices().len() - 1].to_vec(),
            TrackKind::Lasso { split },
        ),
    };
    let m = body.len();
    let base = p.space().level();
    for level in base..=base + budget {
        let fine = p.pull_to_level(level);
        let g = fine.space().fine().clone();
        let n = g.n();
        let mut pos = vec![usize::MAX; fine.num_blocks()];
        for (i, &b) in body.iter().enumerate() {
            pos[b] = i;
        }
        let at: Vec<usize> = (0..n).map(|x| pos[fine.block_of()[x]]).collect();
        let allowed: Vec<bool> = (0..n)
            .map(|x| {
                let i = at[x];
                i != usize::MAX
                    && g.neighbors(x)
                        .iter()
                        .all(|&y| at[y] != usize::MAX && kind.near(m, i, at[y]))
            })
            .collect();
        let Some(segments) = route(fine.space().strong(), &at, &allowed, kind, m) else {
            continue;
        };
        // seeds are numbered by position since the body blocks are distinct
        let can_grow = |seed: usize, x: usize| allowed[x] && at[x] == seed;
        let opts = FattenOptions {
            fill_corners: false,
            grow: Some(usize::MAX),
            can_grow: &can_grow,
            chop: None,
        };
        let f = fatten(&fine, &[Track { segments, kind }], &opts)?;
        let partition = Arc::new(f.partition);
        let z = f.walks.into_iter().next().expect("one track");
        let out = WalkOnPartition::new(partition.clone(), z)?;
        let rho = crate::space::refinement_assignment(&partition, p)?;
        let spaced = classify(&out.walk).spaced_path;
        if !spaced
            || pair_monotone_witness(&out, &input)?.is_none()
            || !ball_maps_into(partition.nerve(), &out.walk, |b| rho[b], &wm)
        {
            continue;
        }
        return Ok(out);
    }
    Err(CalculusError::budget(
        "space_out",
        format!("no spaced route up to level {}", base + budget),
    ))
}

/// `ρ(B₁(z)) ⊆ w`, with `w` given as a vertex mask.
fn ball_maps_into(
    g: &crate::graph::Graph,
    z: &Walk,
    rho: impl Fn(usize) -> usize,
    w: &[bool],
) -> bool {
    z.vertices()
        .iter()
        .all(|&b| w[rho(b)] && g.neighbors(b).iter().all(|&c| w[rho(c)]))
}

/// Routes through the positions of `body` and splits the route into one
/// segment per position.
fn route(
    g: &crate::graph::Graph,
    at: &[usize],
    allowed: &[bool],
    kind: TrackKind,
    m: usize,
) -> Option<Vec<Vec<usize>>> {
    let n = g.n();
    let ok = |pos: usize| move |x: usize| allowed[x] && at[x] == pos;
    let mut segments: Vec<Vec<usize>> = vec![Vec::new(); m];
    let (anchor, entry) = match kind {
        TrackKind::Plain => {
            let starts: Vec<usize> = (0..n).filter(|&x| ok(0)(x)).collect();
            let r = phased_route(g, m, &starts, |k, x| ok(k)(x), |_| true)?;
            for (x, k) in r {
                segments[k].push(x);
            }
            return Some(segments);
        }
        TrackKind::Circular => (0, (0..n).find(|&x| ok(0)(x))?),
        TrackKind::Lasso { split } => {
            if split == 0 {
                (0, (0..n).find(|&x| ok(0)(x))?)
            } else {
                let starts: Vec<usize> = (0..n).filter(|&x| ok(0)(x)).collect();
                let r = phased_route(g, split + 1, &starts, |k, x| ok(k)(x), |_| true)?;
                let entry = r.last().expect("nonempty route").0;
                for &(x, k) in &r[..r.len() - 1] {
                    segments[k].push(x);
                }
                (split, entry)
            }
        }
    };
    // around the circle: phases anchor, anchor+1, …, m−1, then anchor again
    let len = m - anchor;
    let r = phased_route(
        g,
        len + 1,
        &[entry],
        |k, x| ok(anchor + k % len)(x),
        |x| x == entry,
    )?;
    let mut seen = vec![false; n];
    let mut closing = Vec::new();
    for &(x, k) in &r[..r.len() - 1] {
        if seen[x] {
            return None;
        }
        seen[x] = true;
        if k == len {
            closing.push(x);
        } else {
            segments[anchor + k].push(x);
        }
    }
    closing.append(&mut segments[anchor]);
    segments[anchor] = closing;
    Some(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceModel;

    #[test]
    fn spaced_walk_with_closed_ball_is_unchanged() {
        let p = Arc::new(BrickPartition::bands(SpaceModel::cycle(12).unwrap(), 4).unwrap());
        let c = Walk::closed_lap(p.nerve().clone(), &[0, 1, 2, 3]).unwrap();
        let out = space_out(&p, &c, 0).unwrap();
        assert_eq!(out.walk, c);
        assert!(Arc::ptr_eq(&out.partition, &p));
    }

    #[test]
    fn hugging_path_on_the_torus_is_spaced_out() {
        // 3x3 boxes on a 9x9 torus; the path 0,1,4 bends so 0 touches 4
        let p =
            Arc::new(BrickPartition::boxes(SpaceModel::torus_grid(9, 9).unwrap(), 3, 0).unwrap());
        let w = Walk::plain(p.nerve().clone(), vec![0, 1, 4]).unwrap();
        assert!(!classify(&w).spaced_path);
        let out = space_out(&p, &w, 2).unwrap();
        assert!(classify(&out.walk).spaced_path);
        assert!(
            pair_monotone_witness(&out, &WalkOnPartition::new(p.clone(), w.clone()).unwrap())
                .unwrap()
                .is_some()
        );
    }

    #[test]
    fn circular_input_gives_circular_output() {
        // four boxes around a corner; on the 3x3 box torus every two boxes touch
        let p =
            Arc::new(BrickPartition::boxes(SpaceModel::torus_grid(9, 9).unwrap(), 3, 0).unwrap());
        let c = Walk::closed_lap(p.nerve().clone(), &[0, 1, 4, 3]).unwrap();
        assert!(!classify(&c).spaced_path);
        let out = space_out(&p, &c, 2).unwrap();
        assert_eq!(out.walk.len(), 4);
        assert_eq!(out.walk.kind(), WalkKind::Circular);
        assert!(classify(&out.walk).spaced_path);
    }
}
