use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Graph;
use crate::space::{descend_map, BrickPartition, SpaceModel};

use super::{core_refinement, CalculusError};

/// Sets `O_0, …, O_{ℓ−1}` of fine vertices, listed in cyclic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircularCovering {
    pub space: Arc<SpaceModel>,
    pub sets: Vec<Vec<usize>>,
}

impl CircularCovering {
    pub fn new(space: Arc<SpaceModel>, sets: Vec<Vec<usize>>) -> Self {
        CircularCovering { space, sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn masks(&self) -> Vec<Vec<bool>> {
        self.sets
            .iter()
            .map(|set| {
                let mut m = vec![false; self.space.n()];
                for &x in set {
                    m[x] = true;
                }
                m
            })
            .collect()
    }

    /// The same sets pulled back to a finer level.
    pub fn pull_to_level(&self, level: u32) -> CircularCovering {
        if level == self.space.level() {
            return self.clone();
        }
        let finer = SpaceModel::new(self.space.family(), level).expect("valid family");
        let down = descend_map(&finer, &self.space);
        let masks = self.masks();
        let sets = masks
            .iter()
            .map(|m| (0..finer.n()).filter(|&x| m[down.apply(x)]).collect())
            .collect();
        CircularCovering { space: finer, sets }
    }

    /// Checks length, connectivity, covering, the circular closure pattern
    /// and connectedness of the cores `O_i \ ∪_{j≠i} O_j`.
    pub fn validate(&self) -> Result<(), CalculusError> {
        let l = self.len();
        if l < 4 {
            return Err(CalculusError::Precondition(format!(
                "a circular covering needs at least 4 sets, got {l}"
            )));
        }
        let n = self.space.n();
        let g = self.space.fine();
        let mut count = vec![0usize; n];
        for (i, set) in self.sets.iter().enumerate() {
            if set.is_empty() || set.iter().any(|&x| x >= n) {
                return Err(CalculusError::Precondition(format!(
                    "set {i} is empty or out of range"
                )));
            }
            if !g.is_connected_subset(set) {
                return Err(CalculusError::Precondition(format!(
                    "set {i} is disconnected"
                )));
            }
            for &x in set {
                count[x] += 1;
            }
        }
        if let Some(x) = count.iter().position(|&c| c == 0) {
            return Err(CalculusError::Precondition(format!(
                "vertex {x} is not covered"
            )));
        }
        let masks = self.masks();
        let closures: Vec<Vec<bool>> = masks.iter().map(|m| self.space.closure(m)).collect();
        for i in 0..l {
            for j in i + 1..l {
                let meet = (0..n).any(|x| closures[i][x] && closures[j][x]);
                if meet != cyclic_near(i, j, l) {
                    return Err(CalculusError::Pattern { i, j });
                }
            }
        }
        for (i, m) in masks.iter().enumerate() {
            let core: Vec<usize> = (0..n).filter(|&x| m[x] && count[x] == 1).collect();
            if core.is_empty() || !g.is_connected_subset(&core) {
                return Err(CalculusError::Precondition(format!(
                    "core of set {i} is empty or disconnected"
                )));
            }
        }
        Ok(())
    }
}

fn cyclic_near(i: usize, j: usize, l: usize) -> bool {
    let d = i.abs_diff(j);
    d.min(l - d) <= 1
}

/// The vertices of a cycle graph in cyclic order, starting at 0 and
/// continuing to its smaller neighbor; `None` if `g` is not a cycle.
pub fn cyclic_order(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    if n < 3 || (0..n).any(|x| g.neighbors(x).len() != 2) {
        return None;
    }
    let mut order = vec![0];
    let mut prev = 0;
    let mut cur = g.neighbors(0)[0];
    while cur != 0 {
        order.push(cur);
        let nb = g.neighbors(cur);
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
    }
    (order.len() == n).then_some(order)
}

/// The circular covering `O_i = ∨ Star(Cl(S_i), W)` of a partition whose
/// nerve is a cycle, where `W` is a core refinement of the level-below
/// cells against `S`.
///
/// Sets are listed in the cyclic order of the nerve starting at block 0.
pub fn covering_from_cycle_partition(
    s: &BrickPartition,
    budget: u32,
) -> Result<CircularCovering, CalculusError> {
    let order = cyclic_order(s.nerve())
        .filter(|o| o.len() >= 4)
        .ok_or_else(|| {
            CalculusError::Precondition("nerve is not a cycle of length at least 4".into())
        })?;
    let base = s.space().level();
    let mut last = None;
    for level in base + 1..=base + 1 + budget {
        let space = SpaceModel::new(s.space().family(), level)?;
        let cells = BrickPartition::discrete(SpaceModel::new(s.space().family(), level - 1)?)
            .pull_to_level(level);
        let sl = s.pull_to_level(level);
        let w = match core_refinement(&cells, &sl, 0) {
            Ok(w) => w,
            Err(e) => {
                last = Some(e);
                continue;
            }
        };
        let sets: Vec<Vec<usize>> = order
            .iter()
            .map(|&b| {
                let reach = space.closure(&space.closure(&sl.block_mask(b)));
                let mut hit = vec![false; w.num_blocks()];
                for x in 0..space.n() {
                    if reach[x] {
                        hit[w.block_of()[x]] = true;
                    }
                }
                (0..space.n()).filter(|&x| hit[w.block_of()[x]]).collect()
            })
            .collect();
        let cover = CircularCovering::new(space, sets);
        match cover.validate() {
            Ok(()) => return Ok(cover),
            Err(e) => last = Some(e),
        }
    }
    Err(CalculusError::budget(
        "covering_from_cycle_partition",
        last.map_or_else(Default::default, |e| e.to_string()),
    ))
}

/// A partition with blocks `0, …, ℓ−1` whose nerve is the cycle in that
/// order, each block `i` lying inside `O_i` up to the overlaps.
///
/// Block `i` is `Cl(C_i)` for the core `C_i`, plus the overlap vertices of
/// `O_i ∩ O_{i±1}` that are at least as close to it as to the neighbor
/// (ties go to the lower index along the cycle).
pub fn cycle_partition_from_covering(
    cover: &CircularCovering,
    budget: u32,
) -> Result<BrickPartition, CalculusError> {
    cover.validate()?;
    let l = cover.len();
    let base = cover.space.level();
    let mut last = "no level tried".to_string();
    for level in base..=base + budget {
        let c = cover.pull_to_level(level);
        let space = c.space.clone();
        let n = space.n();
        let masks = c.masks();
        let count: Vec<usize> = (0..n)
            .map(|x| masks.iter().filter(|m| m[x]).count())
            .collect();
        let anchors: Vec<Vec<bool>> = masks
            .iter()
            .map(|m| {
                let core: Vec<bool> = (0..n).map(|x| m[x] && count[x] == 1).collect();
                space.closure(&core)
            })
            .collect();
        if (0..n).any(|x| anchors.iter().filter(|a| a[x]).count() > 1) {
            last = format!("level {level}: closed cores overlap");
            continue;
        }
        let dist: Vec<Vec<usize>> = anchors
            .iter()
            .map(|a| {
                space
                    .fine()
                    .bfs(&(0..n).filter(|&x| a[x]).collect::<Vec<_>>())
            })
            .collect();
        let mut class = vec![usize::MAX; n];
        let mut ok = true;
        for x in 0..n {
            if let Some(i) = anchors.iter().position(|a| a[x]) {
                class[x] = i;
                continue;
            }
            let owners: Vec<usize> = (0..l).filter(|&i| masks[i][x]).collect();
            let pair = match owners[..] {
                [a, b] if b == a + 1 => Some((a, b)),
                [0, b] if b == l - 1 => Some((b, 0)),
                _ => None,
            };
            let Some((i, j)) = pair else {
                ok = false;
                break;
            };
            class[x] = if dist[i][x] <= dist[j][x] { i } else { j };
        }
        if !ok {
            last = format!(
                "level {level}: a vertex outside the closed cores lies in no single overlap"
            );
            continue;
        }
        let p = match BrickPartition::new(space, class) {
            Ok(p) => p,
            Err(e) => {
                last = format!("level {level}: {e}");
                continue;
            }
        };
        if p.num_blocks() == l
            && (0..l).all(|i| {
                let mut want = [(i + l - 1) % l, (i + 1) % l];
                want.sort_unstable();
                p.nerve().neighbors(i) == &want[..]
            })
        {
            return Ok(p);
        }
        last = format!("level {level}: nerve is not the cycle");
    }
    Err(CalculusError::budget("cycle_partition_from_covering", last))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcs(n: usize, l: usize, overlap: usize) -> Vec<Vec<usize>> {
        let w = n / l;
        (0..l)
            .map(|i| (0..w + overlap).map(|k| (i * w + k) % n).collect())
            .collect()
    }

    #[test]
    fn cycle_arcs_give_a_four_cycle() {
        let s = SpaceModel::cycle(12).unwrap();
        let cover = CircularCovering::new(s, arcs(12, 4, 1));
        cover.validate().unwrap();
        let p = cycle_partition_from_covering(&cover, 2).unwrap();
        assert_eq!(cyclic_order(p.nerve()).map(|o| o.len()), Some(4));
    }

    #[test]
    fn torus_bands_give_a_four_cycle() {
        let s = SpaceModel::torus_grid(12, 4).unwrap();
        let sets = (0..4)
            .map(|i| {
                (0..s.n())
                    .filter(|&x| (s.cell(x)[0] + 12 - 3 * i) % 12 <= 3)
                    .collect()
            })
            .collect();
        let p = cycle_partition_from_covering(&CircularCovering::new(s, sets), 2).unwrap();
        assert_eq!(p.num_blocks(), 4);
        assert_eq!(cyclic_order(p.nerve()), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn meeting_closures_two_apart_are_reported() {
        let s = SpaceModel::cycle(12).unwrap();
        let cover = CircularCovering::new(s, arcs(12, 4, 2));
        assert_eq!(cover.validate(), Err(CalculusError::Pattern { i: 0, j: 2 }));
        assert!(matches!(
            cycle_partition_from_covering(&cover, 1),
            Err(CalculusError::Pattern { i: 0, j: 2 })
        ));
    }

    #[test]
    fn round_trip_on_the_cycle_and_the_torus() {
        for space in [
            SpaceModel::cycle(12).unwrap(),
            SpaceModel::torus_grid(12, 4).unwrap(),
        ] {
            let s = BrickPartition::bands(space, 4).unwrap();
            let cover = covering_from_cycle_partition(&s, 2).unwrap();
            assert_eq!(cover.len(), 4);
            let back = cycle_partition_from_covering(&cover, 2).unwrap();
            assert_eq!(cyclic_order(back.nerve()).map(|o| o.len()), Some(4));
        }
    }

    #[test]
    fn non_cycle_nerve_is_a_precondition_error() {
        let s = BrickPartition::bands(SpaceModel::interval(12).unwrap(), 4).unwrap();
        assert!(matches!(
            covering_from_cycle_partition(&s, 1),
            Err(CalculusError::Precondition(_))
        ));
        let tri = BrickPartition::bands(SpaceModel::cycle(9).unwrap(), 3).unwrap();
        assert!(matches!(
            covering_from_cycle_partition(&tri, 1),
            Err(CalculusError::Precondition(_))
        ));
    }

    #[test]
    fn cyclic_order_of_small_graphs() {
        assert_eq!(
            cyclic_order(&Graph::cycle(5).unwrap()),
            Some(vec![0, 1, 2, 3, 4])
        );
        assert_eq!(cyclic_order(&Graph::path(4).unwrap()), None);
    }
}
