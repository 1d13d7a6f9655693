//! Weights and winding numbers relative to a circular path, with executable
//! checks of the three winding lemmas.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{Graph, GraphMap};
use crate::walk::{classify, induce, same_host, Walk, WalkKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindingError {
    #[error("walk and reference cycle live on different graphs")]
    HostMismatch,
    #[error("reference must be a circular path")]
    NotCircularPath,
    #[error("reference cycle has length {len}, need at least {need}")]
    TooShort { len: usize, need: usize },
    #[error("reference cycle is not spaced")]
    NotSpaced,
    #[error("precondition violated: {0}")]
    Precondition(Precondition),
}

/// Which hypothesis of a winding lemma an input fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Precondition {
    NotMonotoneRefinement,
    NotSpacedPath,
    NotInitialSegment,
    NotHomomorphism,
    EmptyWalk,
    LengthMismatch { left: usize, right: usize },
    NotConfined { index: usize },
    NotClose { index: usize },
    NotCloseShifted { index: usize },
}

impl core::fmt::Display for Precondition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::NotMonotoneRefinement => {
                write!(f, "first walk does not monotonically refine the second")
            }
            Self::NotSpacedPath => write!(f, "reference walk is not a spaced path"),
            Self::NotInitialSegment => write!(
                f,
                "walk does not refine and stay confined to an initial segment"
            ),
            Self::NotHomomorphism => write!(f, "map is not a homomorphism"),
            Self::EmptyWalk => write!(f, "walk is empty"),
            Self::LengthMismatch { left, right } => write!(f, "lengths differ ({left} vs {right})"),
            Self::NotConfined { index } => write!(f, "entry {index} leaves the reference cycle"),
            Self::NotClose { index } => write!(f, "entries at index {index} are more than 1 apart"),
            Self::NotCloseShifted { index } => {
                write!(f, "z'({index}) and z({}) are more than 1 apart", index + 1)
            }
        }
    }
}

/// A circular path `C` of length `ℓ ≥ 3` used as the reference for weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircularReference {
    cycle: Walk,
    spaced: bool,
    // position of each host vertex on the cycle
    pos: Vec<Option<usize>>,
}

impl CircularReference {
    pub fn new(cycle: Walk) -> Result<Self, WindingError> {
        if cycle.kind() != WalkKind::Circular || !classify(&cycle).path {
            return Err(WindingError::NotCircularPath);
        }
        let l = cycle.len();
        if l < 3 {
            return Err(WindingError::TooShort { len: l, need: 3 });
        }
        let spaced = classify(&cycle).spaced_path;
        let mut pos = vec![None; cycle.host().n()];
        for (i, &x) in cycle.body().iter().enumerate() {
            pos[x] = Some(i);
        }
        Ok(CircularReference { cycle, spaced, pos })
    }

    /// The reference given by one lap on `host`.
    pub fn from_lap(host: Arc<Graph>, lap: &[usize]) -> Result<Self, WindingError> {
        let w = Walk::closed_lap(host, lap).map_err(|_| WindingError::NotCircularPath)?;
        Self::new(w)
    }

    pub fn host(&self) -> &Arc<Graph> {
        self.cycle.host()
    }

    pub fn cycle(&self) -> &Walk {
        &self.cycle
    }

    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_spaced(&self) -> bool {
        self.spaced
    }

    /// Index of `x` on the cycle, if it lies on it.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.pos.get(x).copied().flatten()
    }

    pub fn on_cycle(&self, x: usize) -> bool {
        self.position(x).is_some()
    }

    /// `+1` along a forward cycle edge, `−1` along a backward one, `0` otherwise.
    pub fn weight(&self, x: usize, y: usize) -> i64 {
        let l = self.len();
        match (self.position(x), self.position(y)) {
            (Some(i), Some(j)) if (i + 1) % l == j => 1,
            (Some(i), Some(j)) if (j + 1) % l == i => -1,
            _ => 0,
        }
    }

    /// Sum of weights over consecutive stored entries of `w`.
    pub fn winding_number(&self, w: &Walk) -> Result<i64, WindingError> {
        if !same_host(self.host(), w.host()) {
            return Err(WindingError::HostMismatch);
        }
        Ok(self.winding_of_seq(w.vertices()))
    }

    pub fn winding_of_seq(&self, seq: &[usize]) -> i64 {
        seq.windows(2).map(|p| self.weight(p[0], p[1])).sum()
    }
}

/// Outcome of the monotone-invariance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvarianceVerdict {
    pub fine: i64,
    pub coarse: i64,
}

impl InvarianceVerdict {
    pub fn holds(&self) -> bool {
        self.fine == self.coarse
    }
}

/// Checks that `w`, which must monotonically refine `v`, has the same winding number.
pub fn check_monotone_invariance(
    c: &CircularReference,
    w: &Walk,
    v: &Walk,
) -> Result<InvarianceVerdict, WindingError> {
    if !same_host(c.host(), w.host()) || !same_host(c.host(), v.host()) {
        return Err(WindingError::HostMismatch);
    }
    if crate::walk::monotone_witness(w.vertices(), v.vertices()).is_none() {
        return Err(WindingError::Precondition(
            Precondition::NotMonotoneRefinement,
        ));
    }
    Ok(InvarianceVerdict {
        fine: c.winding_number(w)?,
        coarse: c.winding_number(v)?,
    })
}

/// Outcome of the initial-segment check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentVerdict {
    /// Index on the spaced path of the last entry of `z`.
    pub j: usize,
    pub segment: i64,
    pub walk: i64,
}

impl SegmentVerdict {
    pub fn holds(&self) -> bool {
        self.segment == self.walk
    }
}

/// With `w` a spaced path on the domain of `alpha` and `z` refining and
/// confined to an initial segment of `w`, compares the winding of `alpha·z`
/// with that of `alpha·⟨w(0), …, w(j)⟩` where `w(j) = z(−1)`.
pub fn initial_segment_winding_via(
    c: &CircularReference,
    alpha: &GraphMap,
    w: &Walk,
    z: &Walk,
) -> Result<SegmentVerdict, WindingError> {
    if !same_host(alpha.codomain(), c.host()) || !same_host(alpha.domain(), w.host()) {
        return Err(WindingError::HostMismatch);
    }
    if !same_host(w.host(), z.host()) {
        return Err(WindingError::HostMismatch);
    }
    if w.kind() != WalkKind::Plain || !classify(w).spaced_path {
        return Err(WindingError::Precondition(Precondition::NotSpacedPath));
    }
    let j = initial_segment_end(w.vertices(), z.vertices())
        .ok_or(WindingError::Precondition(Precondition::NotInitialSegment))?;
    let seg = w.prefix(j + 1);
    let az =
        induce(alpha, z).map_err(|_| WindingError::Precondition(Precondition::NotHomomorphism))?;
    let aseg = induce(alpha, &seg)
        .map_err(|_| WindingError::Precondition(Precondition::NotHomomorphism))?;
    Ok(SegmentVerdict {
        j,
        segment: c.winding_number(&aseg)?,
        walk: c.winding_number(&az)?,
    })
}

/// [`initial_segment_winding_via`] with `alpha` the identity of the reference host.
pub fn initial_segment_winding(
    c: &CircularReference,
    w: &Walk,
    z: &Walk,
) -> Result<SegmentVerdict, WindingError> {
    let id = GraphMap::identity(c.host().clone());
    initial_segment_winding_via(c, &id, w, z)
}

// For a path `w`, `z` refines and is confined to some prefix `w[..t]` iff the
// first-visit order of `z` is exactly `w[..t]`. Returns the index of `z(−1)`.
fn initial_segment_end(w: &[usize], z: &[usize]) -> Option<usize> {
    if z.is_empty() {
        return None;
    }
    let mut seen = alloc::collections::BTreeSet::new();
    let mut t = 0;
    for &x in z {
        if seen.insert(x) {
            if t >= w.len() || w[t] != x {
                return None;
            }
            t += 1;
        }
    }
    w.iter().position(|&x| x == z[z.len() - 1])
}

/// Outcome of the close-walks check, including the exact decomposition
/// `wind(z′) = weight(z′(0), z(0)) + wind(z) + weight(z(−1), z′(−1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CloseWalksVerdict {
    pub wind_z: i64,
    pub wind_z2: i64,
    pub head: i64,
    pub tail: i64,
}

impl CloseWalksVerdict {
    /// `wind(z) − wind(z′)`.
    pub fn difference(&self) -> i64 {
        self.wind_z - self.wind_z2
    }

    pub fn decomposition_holds(&self) -> bool {
        self.wind_z2 == self.head + self.wind_z + self.tail
    }

    pub fn holds(&self) -> bool {
        self.difference().abs() <= 2 && self.decomposition_holds()
    }
}

/// Checks the close-walks bound for two walks of equal length confined to a
/// spaced reference of length at least 4.
pub fn close_walks_bound(
    c: &CircularReference,
    z: &Walk,
    z2: &Walk,
) -> Result<CloseWalksVerdict, WindingError> {
    if !same_host(c.host(), z.host()) || !same_host(c.host(), z2.host()) {
        return Err(WindingError::HostMismatch);
    }
    if !c.is_spaced() {
        return Err(WindingError::NotSpaced);
    }
    if c.len() < 4 {
        return Err(WindingError::TooShort {
            len: c.len(),
            need: 4,
        });
    }
    close_walks_seq(c, z.vertices(), z2.vertices()).map_err(WindingError::Precondition)
}

pub(crate) fn close_walks_seq(
    c: &CircularReference,
    z: &[usize],
    z2: &[usize],
) -> Result<CloseWalksVerdict, Precondition> {
    let k = z.len();
    if k != z2.len() {
        return Err(Precondition::LengthMismatch {
            left: k,
            right: z2.len(),
        });
    }
    if k == 0 {
        return Err(Precondition::EmptyWalk);
    }
    let g = c.host();
    for i in 0..k {
        if !c.on_cycle(z[i]) || !c.on_cycle(z2[i]) {
            return Err(Precondition::NotConfined { index: i });
        }
        if !g.adjacent(z[i], z2[i]) {
            return Err(Precondition::NotClose { index: i });
        }
        if i + 1 < k && !g.adjacent(z2[i], z[i + 1]) {
            return Err(Precondition::NotCloseShifted { index: i });
        }
    }
    Ok(CloseWalksVerdict {
        wind_z: c.winding_of_seq(z),
        wind_z2: c.winding_of_seq(z2),
        head: c.weight(z2[0], z[0]),
        tail: c.weight(z[k - 1], z2[k - 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c4() -> CircularReference {
        CircularReference::from_lap(Arc::new(Graph::cycle(4).unwrap()), &[0, 1, 2, 3]).unwrap()
    }

    // summation oracle straight from the definition, scanning the cycle for each pair
    fn wind_oracle(lap: &[usize], seq: &[usize]) -> i64 {
        let l = lap.len();
        let mut total = 0;
        for p in seq.windows(2) {
            for i in 0..l {
                if p[0] == lap[i] && p[1] == lap[(i + 1) % l] {
                    total += 1;
                }
                if p[1] == lap[i] && p[0] == lap[(i + 1) % l] {
                    total -= 1;
                }
            }
        }
        total
    }

    #[test]
    fn weight_examples() {
        let c = c4();
        assert_eq!(c.weight(0, 1), 1);
        assert_eq!(c.weight(1, 0), -1);
        assert_eq!(c.weight(3, 0), 1);
        assert_eq!(c.weight(0, 2), 0);
        assert_eq!(c.weight(2, 2), 0);
    }

    #[test]
    fn winding_examples() {
        let c = c4();
        let h = c.host().clone();
        assert_eq!(c.winding_number(c.cycle()).unwrap(), 4);
        assert_eq!(
            c.winding_number(&Walk::plain(h.clone(), vec![0, 1, 0]).unwrap())
                .unwrap(),
            0
        );
        let mut laps = vec![0];
        for _ in 0..3 {
            laps.extend([1, 2, 3, 0]);
        }
        let w = Walk::plain(h.clone(), laps.clone()).unwrap();
        assert_eq!(
            c.winding_number(&w).unwrap(),
            wind_oracle(&[0, 1, 2, 3], &laps)
        );
        assert_eq!(c.winding_number(&w).unwrap(), 12);
        let other = Walk::plain(Arc::new(Graph::path(4).unwrap()), vec![0]).unwrap();
        assert_eq!(c.winding_number(&other), Err(WindingError::HostMismatch));
    }

    #[test]
    fn reference_validation() {
        let h = Arc::new(Graph::cycle(4).unwrap());
        let not_path = Walk::circular(h.clone(), vec![0, 1, 0, 1, 0]).unwrap();
        assert_eq!(
            CircularReference::new(not_path),
            Err(WindingError::NotCircularPath)
        );
        let k3 = Arc::new(Graph::complete(3).unwrap());
        let tri = CircularReference::from_lap(k3, &[0, 1, 2]).unwrap();
        let z = Walk::plain(tri.host().clone(), vec![0]).unwrap();
        assert_eq!(
            close_walks_bound(&tri, &z, &z),
            Err(WindingError::TooShort { len: 3, need: 4 })
        );
    }

    #[test]
    fn invariance_examples() {
        let c = c4();
        let h = c.host().clone();
        let v = Walk::plain(h.clone(), vec![0, 1, 2]).unwrap();
        let w = Walk::plain(h.clone(), vec![0, 0, 1, 1, 2, 2]).unwrap();
        assert!(check_monotone_invariance(&c, &w, &v).unwrap().holds());
        let bad = Walk::plain(h, vec![0, 1, 0, 1, 2]).unwrap();
        assert_eq!(
            check_monotone_invariance(&c, &bad, &v),
            Err(WindingError::Precondition(
                Precondition::NotMonotoneRefinement
            ))
        );
    }

    #[test]
    fn invariance_through_lift() {
        // lift a C3 lap along C6 -> C3 and compare windings downstairs
        let c6 = Arc::new(Graph::cycle(6).unwrap());
        let c3 = Arc::new(Graph::cycle(3).unwrap());
        let f = GraphMap::new(c6, c3.clone(), (0..6).map(|i| i / 2).collect()).unwrap();
        let lap = Walk::closed_lap(c3.clone(), &[0, 1, 2]).unwrap();
        let up = crate::walk::lift_walk(&f, &lap).unwrap();
        let down = induce(&f, &up).unwrap();
        let r = CircularReference::new(lap.clone()).unwrap();
        let verdict = check_monotone_invariance(&r, &down, &lap).unwrap();
        assert_eq!(verdict, InvarianceVerdict { fine: 3, coarse: 3 });
    }

    #[test]
    fn initial_segment_examples() {
        let c = c4();
        let h = c.host().clone();
        let w = Walk::plain(h.clone(), vec![0, 1, 2]).unwrap();
        let z = Walk::plain(h.clone(), vec![0, 1, 0, 1, 2]).unwrap();
        let v = initial_segment_winding(&c, &w, &z).unwrap();
        assert_eq!(
            v,
            SegmentVerdict {
                j: 2,
                segment: 2,
                walk: 2
            }
        );
        let single = Walk::plain(h.clone(), vec![0]).unwrap();
        assert_eq!(
            initial_segment_winding(&c, &w, &single).unwrap(),
            SegmentVerdict {
                j: 0,
                segment: 0,
                walk: 0
            }
        );
        let off = Walk::plain(h.clone(), vec![1, 2]).unwrap();
        assert_eq!(
            initial_segment_winding(&c, &w, &off),
            Err(WindingError::Precondition(Precondition::NotInitialSegment))
        );
        let lap = Walk::plain(h, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(
            initial_segment_winding(&c, &lap, &single),
            Err(WindingError::Precondition(Precondition::NotSpacedPath))
        );
    }

    #[test]
    fn close_walks_examples() {
        let c = c4();
        let h = c.host().clone();
        let z = Walk::plain(h.clone(), vec![0, 1, 2]).unwrap();
        let z2 = Walk::plain(h.clone(), vec![1, 2, 3]).unwrap();
        let v = close_walks_bound(&c, &z, &z2).unwrap();
        assert_eq!(v.difference(), 0);
        assert!(v.holds());
        assert_eq!(close_walks_bound(&c, &z, &z).unwrap().difference(), 0);
        // sharp instance: z' starts one step behind and ends one step ahead
        let z = Walk::plain(h.clone(), vec![1, 1, 2, 2]).unwrap();
        let z2 = Walk::plain(h.clone(), vec![0, 1, 2, 3]).unwrap();
        let v = close_walks_bound(&c, &z, &z2).unwrap();
        assert_eq!((v.wind_z, v.wind_z2, v.head, v.tail), (1, 3, 1, 1));
        assert_eq!(v.difference(), -2);
        let far = Walk::plain(h, vec![3, 0, 1]).unwrap();
        let base = Walk::plain(c.host().clone(), vec![0, 1, 2]).unwrap();
        assert_eq!(
            close_walks_bound(&c, &base, &far),
            Err(WindingError::Precondition(Precondition::NotCloseShifted {
                index: 0
            }))
        );
    }

    // every walk of length ≤ 8 from C(0) on Cℓ, ℓ ∈ {4, 5}
    #[test]
    fn confined_walks_wind_to_their_endpoint() {
        for l in [4usize, 5] {
            let h = Arc::new(Graph::cycle(l).unwrap());
            let lap: Vec<usize> = (0..l).collect();
            let c = CircularReference::from_lap(h.clone(), &lap).unwrap();
            let mut frontier = vec![vec![0usize]];
            for _ in 1..8 {
                let mut next = Vec::new();
                for s in &frontier {
                    let x = *s.last().unwrap();
                    for y in [x, (x + 1) % l, (x + l - 1) % l] {
                        let mut t = s.clone();
                        t.push(y);
                        next.push(t);
                    }
                }
                for s in &next {
                    let k = *s.last().unwrap() as i64;
                    let wd = c.winding_of_seq(s);
                    assert_eq!(wd, wind_oracle(&lap, s));
                    assert_eq!(wd.rem_euclid(l as i64), k);
                }
                frontier = next;
            }
        }
    }

    fn cycle_walk(l: usize, max: usize) -> impl Strategy<Value = Vec<usize>> {
        (0..l, proptest::collection::vec(0..3usize, 0..max)).prop_map(move |(s, steps)| {
            let mut out = vec![s];
            for st in steps {
                let x = *out.last().unwrap();
                out.push(match st {
                    0 => x,
                    1 => (x + 1) % l,
                    _ => (x + l - 1) % l,
                });
            }
            out
        })
    }

    proptest! {
        #[test]
        fn reversal_negates(l in 4usize..9, seed in cycle_walk(8, 30)) {
            let seq: Vec<usize> = seed.iter().map(|&x| x % l).collect();
            let h = Arc::new(Graph::cycle(l).unwrap());
            let lap: Vec<usize> = (0..l).collect();
            let c = CircularReference::from_lap(h.clone(), &lap).unwrap();
            if let Ok(w) = Walk::plain(h, seq) {
                prop_assert_eq!(c.winding_number(&w.reversed()).unwrap(), -c.winding_number(&w).unwrap());
            }
        }

        #[test]
        fn concatenation_adds_seam_weight(a in cycle_walk(7, 12), b in cycle_walk(7, 12)) {
            let h = Arc::new(Graph::cycle(7).unwrap());
            let lap: Vec<usize> = (0..7).collect();
            let c = CircularReference::from_lap(h.clone(), &lap).unwrap();
            let wa = Walk::plain(h.clone(), a.clone()).unwrap();
            let wb = Walk::plain(h.clone(), b.clone()).unwrap();
            if let Ok(ab) = crate::walk::concat(&wa, &wb) {
                let mut all = a.clone();
                all.extend(&b);
                let seam = c.weight(*a.last().unwrap(), b[0]);
                prop_assert_eq!(c.winding_number(&ab).unwrap(), wind_oracle(&lap, &all));
                prop_assert_eq!(
                    c.winding_number(&ab).unwrap(),
                    c.winding_number(&wa).unwrap() + seam + c.winding_number(&wb).unwrap()
                );
            }
        }

        #[test]
        fn stuttering_preserves_winding(v in cycle_walk(6, 15), reps in proptest::collection::vec(1usize..4, 16)) {
            let h = Arc::new(Graph::cycle(6).unwrap());
            let c = CircularReference::from_lap(h.clone(), &[0, 1, 2, 3, 4, 5]).unwrap();
            let mut w = Vec::new();
            for (i, &x) in v.iter().enumerate() {
                for _ in 0..reps[i] {
                    w.push(x);
                }
            }
            let vv = Walk::plain(h.clone(), v).unwrap();
            let ww = Walk::plain(h, w).unwrap();
            prop_assert!(check_monotone_invariance(&c, &ww, &vv).unwrap().holds());
        }
    }
}
