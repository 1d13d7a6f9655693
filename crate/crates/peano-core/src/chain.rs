//! Piecewise-linear maximal chains on the interval and the circle.
//!
//! A chain on `[0,1]` grows from a point `{x0}` to the whole interval; it is
//! stored as the polyline of its members `[x, y]` inside the triangle
//! `T = {(x, y) : 0 <= x <= y <= 1}`, running from the root `(x0, x0)` to
//! `(0, 1)`. Two chains lie in the same orbit of orientation preserving
//! homeomorphisms exactly when their sequences of maximal horizontal,
//! vertical and strictly monotone pieces agree.

use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("a chain needs at least two vertices")]
    TooFewVertices,
    #[error("vertex {index} lies outside the triangle 0 <= x <= y <= 1")]
    OutsideTriangle { index: usize },
    #[error("first vertex is not on the diagonal")]
    RootOffDiagonal,
    #[error("last vertex is not (0, 1)")]
    BadEnd,
    #[error("segment {index} is not monotone (x must not grow, y must not shrink)")]
    NotMonotone { index: usize },
    #[error("chains have different structures")]
    NotEquivalent,
    #[error("breakpoints of a homeomorphism must start at (0,0), end at (1,1) and increase strictly")]
    BadHomeomorphism,
    #[error("circle chain: {0}")]
    BadCircleChain(&'static str),
}

/// Kind of a maximal subchain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubchainKind {
    /// Constant `y`: the chain grows on the left only.
    H,
    /// Constant `x`: the chain grows on the right only.
    V,
    /// Both ends move strictly.
    S,
}

impl SubchainKind {
    pub fn letter(self) -> char {
        match self {
            Self::H => 'H',
            Self::V => 'V',
            Self::S => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'H' => Some(Self::H),
            'V' => Some(Self::V),
            'S' => Some(Self::S),
            _ => None,
        }
    }
}

impl fmt::Display for SubchainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

pub type Point = (BigRational, BigRational);

fn kind_of(p: &Point, q: &Point) -> SubchainKind {
    match (p.0 == q.0, p.1 == q.1) {
        (true, _) => SubchainKind::V,
        (_, true) => SubchainKind::H,
        _ => SubchainKind::S,
    }
}

fn collinear(a: &Point, b: &Point, c: &Point) -> bool {
    (&b.0 - &a.0) * (&c.1 - &a.1) == (&b.1 - &a.1) * (&c.0 - &a.0)
}

/// A piecewise-linear chain on `[0,1]` as a polyline in the triangle.
///
/// Vertices are kept in normal form: no repeated points and no vertex in
/// the middle of a straight run, so two chains are equal as point sets iff
/// their vertex lists are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLChain {
    vertices: Vec<Point>,
}

impl PLChain {
    pub fn new(vertices: Vec<Point>) -> Result<Self, ChainError> {
        if vertices.len() < 2 {
            return Err(ChainError::TooFewVertices);
        }
        let zero = BigRational::zero();
        let one = BigRational::one();
        for (index, (x, y)) in vertices.iter().enumerate() {
            if *x < zero || x > y || *y > one {
                return Err(ChainError::OutsideTriangle { index });
            }
        }
        if vertices[0].0 != vertices[0].1 {
            return Err(ChainError::RootOffDiagonal);
        }
        let last = &vertices[vertices.len() - 1];
        if !last.0.is_zero() || !last.1.is_one() {
            return Err(ChainError::BadEnd);
        }
        for (index, w) in vertices.windows(2).enumerate() {
            if w[1].0 > w[0].0 || w[1].1 < w[0].1 {
                return Err(ChainError::NotMonotone { index });
            }
        }
        let mut out: Vec<Point> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if out.last() == Some(&p) {
                continue;
            }
            if out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &p) {
                out.pop();
            }
            out.push(p);
        }
        // a chain rooted at (0,1) is the single point; the root must differ from the end
        if out.len() < 2 {
            return Err(ChainError::TooFewVertices);
        }
        Ok(PLChain { vertices: out })
    }

    /// The chain `{[1/2 - a, 1/2 + a]}` growing evenly from the midpoint.
    pub fn symmetric() -> Self {
        let half = BigRational::new(1.into(), 2.into());
        PLChain {
            vertices: alloc::vec![
                (half.clone(), half),
                (BigRational::zero(), BigRational::one())
            ],
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn root(&self) -> &BigRational {
        &self.vertices[0].0
    }

    /// Image under the diagonal action `(x, y) -> (h(x), h(y))`.
    pub fn act(&self, h: &PLHomeomorphism) -> PLChain {
        let mut pts: Vec<Point> = Vec::new();
        for w in self.vertices.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            // parameters in (0,1) where a coordinate crosses a breakpoint of h
            let mut ts: Vec<BigRational> = Vec::new();
            for (b, _) in &h.breakpoints {
                if p.0 != q.0 && *b < p.0 && *b > q.0 {
                    ts.push((&p.0 - b) / (&p.0 - &q.0));
                }
                if p.1 != q.1 && *b > p.1 && *b < q.1 {
                    ts.push((b - &p.1) / (&q.1 - &p.1));
                }
            }
            ts.sort();
            ts.dedup();
            pts.push((h.apply(&p.0), h.apply(&p.1)));
            for t in ts {
                let x = &p.0 + (&q.0 - &p.0) * &t;
                let y = &p.1 + (&q.1 - &p.1) * &t;
                pts.push((h.apply(&x), h.apply(&y)));
            }
        }
        let end = &self.vertices[self.vertices.len() - 1];
        pts.push((h.apply(&end.0), h.apply(&end.1)));
        PLChain::new(pts).expect("homeomorphisms map chains to chains")
    }
}

/// One maximal subchain: its kind, the range of vertices it spans, and its
/// domain (range of left ends) and codomain (range of right ends).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subchain {
    pub kind: SubchainKind,
    pub first_vertex: usize,
    pub last_vertex: usize,
    pub domain: (BigRational, BigRational),
    pub codomain: (BigRational, BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubchainDecomposition {
    pub segments: Vec<Subchain>,
}

/// Labels of the maximal subchains from the root outward.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainStructure {
    pub labels: Vec<SubchainKind>,
}

impl fmt::Display for ChainStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

pub fn decompose(c: &PLChain) -> SubchainDecomposition {
    let v = &c.vertices;
    let mut segments: Vec<Subchain> = Vec::new();
    for i in 0..v.len() - 1 {
        let kind = kind_of(&v[i], &v[i + 1]);
        match segments.last_mut() {
            Some(s) if s.kind == kind => s.last_vertex = i + 1,
            _ => segments.push(Subchain {
                kind,
                first_vertex: i,
                last_vertex: i + 1,
                domain: (BigRational::zero(), BigRational::zero()),
                codomain: (BigRational::zero(), BigRational::zero()),
            }),
        }
    }
    for s in &mut segments {
        let (a, b) = (&v[s.first_vertex], &v[s.last_vertex]);
        s.domain = (b.0.clone(), a.0.clone());
        s.codomain = (a.1.clone(), b.1.clone());
    }
    SubchainDecomposition { segments }
}

pub fn structure_of(c: &PLChain) -> ChainStructure {
    ChainStructure {
        labels: decompose(c).segments.iter().map(|s| s.kind).collect(),
    }
}

pub fn are_equivalent(c1: &PLChain, c2: &PLChain) -> bool {
    structure_of(c1) == structure_of(c2)
}

pub fn is_generic(c: &PLChain) -> bool {
    decompose(c)
        .segments
        .iter()
        .all(|s| s.kind == SubchainKind::S)
}

/// An orientation preserving piecewise-linear homeomorphism of `[0,1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLHomeomorphism {
    breakpoints: Vec<Point>,
}

impl PLHomeomorphism {
    /// Breakpoints must start at `(0,0)`, end at `(1,1)` and increase
    /// strictly in both coordinates. Collinear breakpoints are dropped.
    pub fn new(breakpoints: Vec<Point>) -> Result<Self, ChainError> {
        let ok = breakpoints.len() >= 2
            && breakpoints[0] == (BigRational::zero(), BigRational::zero())
            && breakpoints[breakpoints.len() - 1] == (BigRational::one(), BigRational::one())
            && breakpoints
                .windows(2)
                .all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
        if !ok {
            return Err(ChainError::BadHomeomorphism);
        }
        let mut out: Vec<Point> = Vec::with_capacity(breakpoints.len());
        for p in breakpoints {
            if out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &p) {
                out.pop();
            }
            out.push(p);
        }
        Ok(PLHomeomorphism { breakpoints: out })
    }

    pub fn identity() -> Self {
        PLHomeomorphism {
            breakpoints: alloc::vec![
                (BigRational::zero(), BigRational::zero()),
                (BigRational::one(), BigRational::one()),
            ],
        }
    }

    pub fn breakpoints(&self) -> &[Point] {
        &self.breakpoints
    }

    pub fn orientation_preserving(&self) -> bool {
        true
    }

    pub fn apply(&self, x: &BigRational) -> BigRational {
        interpolate(&self.breakpoints, x)
    }

    pub fn inverse(&self) -> PLHomeomorphism {
        PLHomeomorphism {
            breakpoints: self
                .breakpoints
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PLHomeomorphism) -> PLHomeomorphism {
        let mut xs: Vec<BigRational> = other.breakpoints.iter().map(|p| p.0.clone()).collect();
        let inv = other.inverse();
        xs.extend(self.breakpoints.iter().map(|p| inv.apply(&p.0)));
        xs.sort();
        xs.dedup();
        let pts = xs
            .into_iter()
            .map(|x| {
                let y = self.apply(&other.apply(&x));
                (x, y)
            })
            .collect();
        PLHomeomorphism::new(pts).expect("composition of homeomorphisms")
    }
}

/// Piecewise-linear interpolation through points sorted by first coordinate.
/// Values outside the covered range are clamped to the end values.
fn interpolate(pts: &[Point], x: &BigRational) -> BigRational {
    let i = pts.partition_point(|p| p.0 <= *x);
    if i == 0 {
        return pts[0].1.clone();
    }
    let (a, b) = &pts[i - 1];
    if a == x || i == pts.len() {
        return b.clone();
    }
    let (c, d) = &pts[i];
    b + (d - b) * (x - a) / (c - a)
}

/// Affine order preserving map of `[a, b]` onto `[c, d]` at `x`.
fn affine(from: &(BigRational, BigRational), to: &(BigRational, BigRational), x: &BigRational) -> BigRational {
    if from.0 == from.1 {
        return to.0.clone();
    }
    &to.0 + (&to.1 - &to.0) * (x - &from.0) / (&from.1 - &from.0)
}

/// Builds `h` with `h·c1 = c2` for chains of the same structure.
///
/// Each domain of a maximal subchain of `c1` goes affinely onto the
/// matching domain of `c2`; codomains of vertical pieces likewise. On a
/// strictly monotone piece the right ends follow the left ends, so there
/// `h(y) = g2⁻¹(h(g1(y)))` where `gi` sends a right end to its left end.
pub fn conjugating_homeo(c1: &PLChain, c2: &PLChain) -> Result<PLHomeomorphism, ChainError> {
    let d1 = decompose(c1);
    let d2 = decompose(c2);
    if d1.segments.len() != d2.segments.len()
        || d1.segments.iter().zip(&d2.segments).any(|(a, b)| a.kind != b.kind)
    {
        return Err(ChainError::NotEquivalent);
    }
    let mut pairs: Vec<Point> = Vec::new();
    for (s1, s2) in d1.segments.iter().zip(&d2.segments) {
        pairs.push((s1.domain.0.clone(), s2.domain.0.clone()));
        pairs.push((s1.domain.1.clone(), s2.domain.1.clone()));
        pairs.push((s1.codomain.0.clone(), s2.codomain.0.clone()));
        pairs.push((s1.codomain.1.clone(), s2.codomain.1.clone()));
        if s1.kind != SubchainKind::S {
            continue;
        }
        // the piece as a graph x = g(y), listed by increasing y
        let g1: Vec<Point> = c1.vertices[s1.first_vertex..=s1.last_vertex]
            .iter()
            .map(|(x, y)| (y.clone(), x.clone()))
            .collect();
        let g2: Vec<Point> = c2.vertices[s2.first_vertex..=s2.last_vertex]
            .iter()
            .map(|(x, y)| (y.clone(), x.clone()))
            .collect();
        let hx = |x: &BigRational| affine(&s1.domain, &s2.domain, x);
        let hx_inv = |x: &BigRational| affine(&s2.domain, &s1.domain, x);
        let g2_inv: Vec<Point> = g2.iter().rev().map(|(y, x)| (x.clone(), y.clone())).collect();
        let g1_inv: Vec<Point> = g1.iter().rev().map(|(y, x)| (x.clone(), y.clone())).collect();
        for (y, x) in &g1[1..g1.len() - 1] {
            pairs.push((y.clone(), interpolate(&g2_inv, &hx(x))));
        }
        for (y2, x2) in &g2[1..g2.len() - 1] {
            pairs.push((interpolate(&g1_inv, &hx_inv(x2)), y2.clone()));
        }
    }
    pairs.sort();
    pairs.dedup();
    let h = PLHomeomorphism::new(pairs).map_err(|_| ChainError::NotEquivalent)?;
    if c1.act(&h) != *c2 {
        return Err(ChainError::NotEquivalent);
    }
    Ok(h)
}

/// A piecewise-linear chain on the circle `R/Z`.
///
/// Members are the arcs `[root - l, root + u]` for `(l, u)` on the growth
/// polyline, which runs monotonically from `(0,0)` to a point with
/// `l + u = 1`, where the arc closes up at the endpoint `root - l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleChain {
    root: BigRational,
    growth: Vec<Point>,
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

impl CircleChain {
    pub fn new(root: BigRational, growth: Vec<Point>) -> Result<Self, ChainError> {
        let zero = BigRational::zero();
        if growth.len() < 2 {
            return Err(ChainError::BadCircleChain("needs at least two growth points"));
        }
        if growth[0] != (zero.clone(), zero.clone()) {
            return Err(ChainError::BadCircleChain("growth must start at (0,0)"));
        }
        if growth
            .windows(2)
            .any(|w| w[1].0 < w[0].0 || w[1].1 < w[0].1 || w[0] == w[1])
        {
            return Err(ChainError::BadCircleChain(
                "growth must be monotone without repeated points",
            ));
        }
        let last = &growth[growth.len() - 1];
        if &last.0 + &last.1 != BigRational::one() {
            return Err(ChainError::BadCircleChain("final arc must be the whole circle"));
        }
        Ok(CircleChain {
            root: frac(&root),
            growth,
        })
    }

    pub fn root(&self) -> &BigRational {
        &self.root
    }

    pub fn growth(&self) -> &[Point] {
        &self.growth
    }

    /// The point where the arcs close up.
    pub fn endpoint(&self) -> BigRational {
        frac(&(&self.root - &self.growth[self.growth.len() - 1].0))
    }

    pub fn rotate(&self, theta: &BigRational) -> CircleChain {
        CircleChain {
            root: frac(&(&self.root + theta)),
            growth: self.growth.clone(),
        }
    }
}

/// Rotates the endpoint to `0` and reads the arcs as intervals of `[0,1]`.
pub fn circle_reduce(c: &CircleChain) -> PLChain {
    let e = c.endpoint();
    // left end of the root arc after rotating e to 0, taken in (0,1]
    let mut r = frac(&(&c.root - &e));
    let total_left = &c.growth[c.growth.len() - 1].0;
    if r.is_zero() && !total_left.is_zero() {
        r = BigRational::one();
    }
    let pts = c
        .growth
        .iter()
        .map(|(l, u)| (&r - l, &r + u))
        .collect();
    PLChain::new(pts).expect("reduced circle chains are interval chains")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn chain(pts: &[(i64, i64, i64, i64)]) -> PLChain {
        PLChain::new(pts.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect()).unwrap()
    }

    fn staircase() -> PLChain {
        chain(&[(1, 2, 1, 2), (1, 2, 3, 4), (1, 4, 3, 4), (0, 1, 1, 1)])
    }

    fn labels(s: &str) -> ChainStructure {
        ChainStructure {
            labels: s.chars().map(|c| SubchainKind::from_letter(c).unwrap()).collect(),
        }
    }

    #[test]
    fn symmetric_chain_is_one_strict_piece() {
        let c = PLChain::symmetric();
        let d = decompose(&c);
        assert_eq!(d.segments.len(), 1);
        assert_eq!(d.segments[0].kind, SubchainKind::S);
        assert_eq!(d.segments[0].domain, (q(0, 1), q(1, 2)));
        assert_eq!(d.segments[0].codomain, (q(1, 2), q(1, 1)));
        assert_eq!(structure_of(&c), labels("S"));
        assert!(is_generic(&c));
    }

    #[test]
    fn staircase_decomposes_into_vertical_horizontal_strict() {
        assert_eq!(structure_of(&staircase()), labels("VHS"));
        let mirrored = chain(&[(1, 3, 1, 3), (1, 3, 1, 2), (1, 5, 1, 2), (0, 1, 1, 1)]);
        assert_eq!(structure_of(&mirrored), structure_of(&staircase()));
        assert!(!is_generic(&staircase()));
    }

    #[test]
    fn chain_rooted_at_zero_is_vertical() {
        let c = chain(&[(0, 1, 0, 1), (0, 1, 1, 1)]);
        assert_eq!(structure_of(&c), labels("V"));
    }

    #[test]
    fn same_kind_segments_merge() {
        let c = chain(&[(1, 2, 1, 2), (1, 2, 2, 3), (1, 2, 3, 4), (1, 3, 4, 5), (0, 1, 1, 1)]);
        assert_eq!(c.vertices().len(), 4);
        assert_eq!(structure_of(&c), labels("VS"));
        let bent = chain(&[(1, 2, 1, 2), (1, 3, 3, 4), (0, 1, 1, 1)]);
        assert_eq!(bent.vertices().len(), 3);
        assert_eq!(structure_of(&bent), labels("S"));
        assert!(is_generic(&bent));
    }

    #[test]
    fn invalid_chains_are_rejected() {
        let p = |a, b, c, d| (q(a, b), q(c, d));
        assert_eq!(
            PLChain::new(vec![p(1, 2, 3, 4), p(0, 1, 1, 1)]),
            Err(ChainError::RootOffDiagonal)
        );
        assert_eq!(
            PLChain::new(vec![p(1, 2, 1, 2), p(1, 4, 3, 4)]),
            Err(ChainError::BadEnd)
        );
        assert_eq!(
            PLChain::new(vec![p(1, 2, 1, 2), p(1, 2, 1, 4), p(0, 1, 1, 1)]),
            Err(ChainError::OutsideTriangle { index: 1 })
        );
        assert_eq!(
            PLChain::new(vec![p(1, 2, 1, 2), p(1, 4, 3, 4), p(1, 3, 4, 5), p(0, 1, 1, 1)]),
            Err(ChainError::NotMonotone { index: 1 })
        );
    }

    #[test]
    fn equivalence_ignores_the_root() {
        let other = chain(&[(1, 5, 1, 5), (0, 1, 1, 1)]);
        assert!(are_equivalent(&PLChain::symmetric(), &other));
        let hvs = chain(&[(1, 2, 1, 2), (1, 4, 1, 2), (1, 4, 3, 4), (0, 1, 1, 1)]);
        assert_eq!(structure_of(&hvs), labels("HVS"));
        assert!(!are_equivalent(&staircase(), &hvs));
    }

    #[test]
    fn identity_conjugates_a_chain_to_itself() {
        let c = staircase();
        let h = conjugating_homeo(&c, &c).unwrap();
        assert_eq!(h, PLHomeomorphism::identity());
    }

    #[test]
    fn strict_chains_with_different_roots_conjugate() {
        let c1 = PLChain::symmetric();
        let c2 = chain(&[(1, 5, 1, 5), (1, 10, 1, 2), (0, 1, 1, 1)]);
        let h = conjugating_homeo(&c1, &c2).unwrap();
        assert_eq!(c1.act(&h), c2);
        assert_eq!(h.apply(&q(1, 2)), q(1, 5));
    }

    #[test]
    fn staircases_conjugate() {
        let c2 = chain(&[(1, 3, 1, 3), (1, 3, 1, 2), (1, 5, 1, 2), (1, 7, 2, 3), (0, 1, 1, 1)]);
        let h = conjugating_homeo(&staircase(), &c2).unwrap();
        assert_eq!(staircase().act(&h), c2);
        assert_eq!(
            conjugating_homeo(&staircase(), &PLChain::symmetric()),
            Err(ChainError::NotEquivalent)
        );
    }

    #[test]
    fn homeomorphism_algebra() {
        let h = PLHomeomorphism::new(vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 4)), (q(1, 1), q(1, 1))])
            .unwrap();
        assert_eq!(h.apply(&q(1, 4)), q(1, 8));
        assert_eq!(h.apply(&q(3, 4)), q(5, 8));
        assert_eq!(h.compose(&h.inverse()), PLHomeomorphism::identity());
        let hh = h.compose(&h);
        assert_eq!(hh.apply(&q(3, 4)), h.apply(&q(5, 8)));
        assert!(PLHomeomorphism::new(vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 1)), (q(1, 1), q(1, 1))]).is_err());
    }

    #[test]
    fn even_circle_chain_reduces_to_symmetric() {
        let c = CircleChain::new(q(1, 3), vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 2))]).unwrap();
        assert_eq!(c.endpoint(), q(5, 6));
        assert_eq!(circle_reduce(&c), PLChain::symmetric());
    }

    #[test]
    fn stalled_circle_chain_reduces_with_a_vertical_piece() {
        let c = CircleChain::new(
            q(0, 1),
            vec![(q(0, 1), q(0, 1)), (q(0, 1), q(1, 4)), (q(1, 2), q(1, 2))],
        )
        .unwrap();
        let r = circle_reduce(&c);
        assert_eq!(structure_of(&r), labels("VS"));
        assert!(!is_generic(&r));
    }

    #[test]
    fn one_sided_circle_chain_reduces_to_a_horizontal_chain() {
        let c = CircleChain::new(q(1, 4), vec![(q(0, 1), q(0, 1)), (q(1, 1), q(0, 1))]).unwrap();
        assert_eq!(c.endpoint(), q(1, 4));
        let r = circle_reduce(&c);
        assert_eq!(r.vertices()[0], (q(1, 1), q(1, 1)));
        assert_eq!(structure_of(&r), labels("H"));
    }

    #[test]
    fn malformed_circle_chains_are_rejected() {
        assert!(CircleChain::new(q(0, 1), vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 4))]).is_err());
        assert!(CircleChain::new(q(0, 1), vec![(q(1, 8), q(0, 1)), (q(1, 2), q(1, 2))]).is_err());
    }

    // independent oracle: type of each raw segment from coordinate differences,
    // then run-length collapse
    fn oracle_labels(pts: &[Point]) -> Vec<SubchainKind> {
        let mut out: Vec<SubchainKind> = Vec::new();
        for w in pts.windows(2) {
            let dx = &w[0].0 - &w[1].0;
            let dy = &w[1].1 - &w[0].1;
            let k = if dx.is_zero() && dy.is_zero() {
                continue;
            } else if dx.is_zero() {
                SubchainKind::V
            } else if dy.is_zero() {
                SubchainKind::H
            } else {
                SubchainKind::S
            };
            if out.last() != Some(&k) {
                out.push(k);
            }
        }
        out
    }

    fn split(total: i64, parts: &[i64]) -> Vec<BigRational> {
        let sum: i64 = parts.iter().sum();
        parts.iter().map(|&p| q(total * p, sum)).collect()
    }

    /// Chains from a root and a type per step; x0 strictly inside (0,1).
    fn arb_chain() -> impl Strategy<Value = PLChain> {
        (
            1i64..12,
            prop::collection::vec((0usize..3, 1i64..9, 1i64..9), 1..7),
        )
            .prop_map(|(r, steps)| {
                let x0 = q(r, 12);
                let mut kinds: Vec<usize> = steps.iter().map(|s| s.0).collect();
                // make sure both coordinates can reach their targets
                if !kinds.iter().any(|&k| k != 1) {
                    kinds.push(0);
                }
                if !kinds.iter().any(|&k| k != 0) {
                    kinds.push(1);
                }
                let wx: Vec<i64> = kinds
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 1)
                    .map(|(i, _)| steps.get(i).map_or(1, |s| s.1))
                    .collect();
                let wy: Vec<i64> = kinds
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(i, _)| steps.get(i).map_or(1, |s| s.2))
                    .collect();
                let dx = split(1, &wx);
                let dy = split(1, &wy);
                let (mut ix, mut iy) = (0, 0);
                let mut p = (x0.clone(), x0.clone());
                let mut pts = vec![p.clone()];
                for k in kinds {
                    if k != 1 {
                        p.0 = &p.0 - &x0 * &dx[ix];
                        ix += 1;
                    }
                    if k != 0 {
                        p.1 = &p.1 + (BigRational::one() - &x0) * &dy[iy];
                        iy += 1;
                    }
                    pts.push(p.clone());
                }
                PLChain::new(pts).unwrap()
            })
    }

    fn arb_homeo() -> impl Strategy<Value = PLHomeomorphism> {
        (
            prop::collection::vec(1i64..9, 1..6),
            prop::collection::vec(1i64..9, 1..6),
        )
            .prop_map(|(a, b)| {
                let n = a.len().min(b.len());
                let cum = |w: &[i64]| {
                    let total: i64 = w.iter().sum();
                    let mut acc = 0;
                    let mut out = vec![q(0, 1)];
                    for &x in w {
                        acc += x;
                        out.push(q(acc, total));
                    }
                    out
                };
                let xs = cum(&a[..n]);
                let ys = cum(&b[..n]);
                PLHomeomorphism::new(xs.into_iter().zip(ys).collect()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn structure_matches_the_segment_oracle(c in arb_chain()) {
            prop_assert_eq!(structure_of(&c).labels, oracle_labels(c.vertices()));
        }

        #[test]
        fn structure_is_invariant_under_homeomorphisms(c in arb_chain(), h in arb_homeo()) {
            let moved = c.act(&h);
            prop_assert_eq!(structure_of(&moved), structure_of(&c));
            prop_assert_eq!(is_generic(&moved), is_generic(&c));
        }

        #[test]
        fn conjugating_homeo_is_exact(c in arb_chain(), h in arb_homeo()) {
            let moved = c.act(&h);
            let g = conjugating_homeo(&c, &moved).unwrap();
            prop_assert_eq!(c.act(&g), moved.clone());
            let back = conjugating_homeo(&moved, &c).unwrap();
            prop_assert_eq!(moved.act(&back), c);
        }

        #[test]
        fn equivalence_is_an_equivalence_relation(a in arb_chain(), b in arb_chain(), c in arb_chain()) {
            prop_assert!(are_equivalent(&a, &a));
            prop_assert_eq!(are_equivalent(&a, &b), are_equivalent(&b, &a));
            if are_equivalent(&a, &b) && are_equivalent(&b, &c) {
                prop_assert!(are_equivalent(&a, &c));
            }
            prop_assert_eq!(are_equivalent(&a, &b), conjugating_homeo(&a, &b).is_ok());
        }

        #[test]
        fn circle_reduction_ignores_rotation(
            r in 0i64..24, t in -30i64..30,
            steps in prop::collection::vec((0i64..4, 0i64..4), 1..6),
        ) {
            let steps: Vec<(i64, i64)> = steps.into_iter().filter(|s| *s != (0, 0)).collect();
            prop_assume!(!steps.is_empty());
            let total: i64 = steps.iter().map(|s| s.0 + s.1).sum();
            let mut acc = (0, 0);
            let mut growth = vec![(q(0, 1), q(0, 1))];
            for (a, b) in steps {
                acc = (acc.0 + a, acc.1 + b);
                growth.push((q(acc.0, total), q(acc.1, total)));
            }
            let c = CircleChain::new(q(r, 24), growth).unwrap();
            let rotated = c.rotate(&q(t, 7));
            prop_assert_eq!(circle_reduce(&rotated), circle_reduce(&c));
        }
    }
}
