//! Seeded random instances for the property suites.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use peano_core::{CircleChain, CircularReference, Graph, GraphMap, PLChain, PLHomeomorphism, Walk};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    rand::SeedableRng::seed_from_u64(seed)
}

/// A random walk on `g` from `start`, staying put or moving to a neighbor.
pub fn random_walk(rng: &mut Rng8, g: &Graph, start: usize, len: usize) -> Vec<usize> {
    let mut out = vec![start];
    while out.len() < len {
        let x = *out.last().expect("nonempty");
        let nb = g.neighbors(x);
        let pick = rng.random_range(0..=nb.len());
        out.push(if pick == nb.len() { x } else { nb[pick] });
    }
    out
}

/// A cycle `C_l` with an optional pendant vertex, and its lap as reference.
pub fn reference_host(rng: &mut Rng8, min_len: usize) -> CircularReference {
    let l = rng.random_range(min_len..=9);
    let mut edges: Vec<(usize, usize)> = (0..l).map(|i| (i, (i + 1) % l)).collect();
    let mut n = l;
    if rng.random_bool(0.5) {
        edges.push((rng.random_range(0..l), l));
        n += 1;
    }
    let host = Arc::new(Graph::new(n, &edges).expect("valid cycle"));
    let lap: Vec<usize> = (0..l).collect();
    CircularReference::from_lap(host, &lap).expect("lap of a cycle")
}

/// `(C, w, v)` with `w` a stuttering of the random walk `v`.
pub fn invariance_instance(rng: &mut Rng8) -> (CircularReference, Walk, Walk) {
    let c = reference_host(rng, 3);
    let host = c.host().clone();
    let len = rng.random_range(1..=20);
    let start = rng.random_range(0..host.n());
    let v = random_walk(rng, &host, start, len);
    let mut w = Vec::new();
    for &x in &v {
        for _ in 0..rng.random_range(1..=3) {
            w.push(x);
        }
    }
    (
        c,
        Walk::plain(host.clone(), w).expect("stuttered walk"),
        Walk::plain(host, v).expect("random walk"),
    )
}

/// `(C, α, w, z)`: `w` the spaced path `0, …, n−1` on a path graph, `α` a
/// random homomorphism onto a cycle, and `z` a walk along a prefix of `w`.
pub fn segment_instance(rng: &mut Rng8) -> (CircularReference, GraphMap, Walk, Walk) {
    let n = rng.random_range(1..=14);
    let path = Arc::new(Graph::path(n).expect("path graph"));
    let l = rng.random_range(3..=6);
    let cyc = Arc::new(Graph::cycle(l).expect("cycle graph"));
    let lap: Vec<usize> = (0..l).collect();
    let c = CircularReference::from_lap(cyc.clone(), &lap).expect("lap");
    let start = rng.random_range(0..l);
    let assignment = random_walk(rng, &cyc, start, n);
    let alpha = GraphMap::new(path.clone(), cyc, assignment).expect("sizes agree");
    let w = Walk::plain(path.clone(), (0..n).collect()).expect("path");
    let t = rng.random_range(1..=n);
    let prefix = Graph::path(t).expect("path graph");
    let zlen = rng.random_range(1..=25);
    let z = random_walk(rng, &prefix, 0, zlen);
    (c, alpha, w, Walk::plain(path, z).expect("walk on the prefix"))
}

/// `(C, z, z′)` on a spaced cycle with `z(i) ~ z′(i) ~ z(i+1)`.
pub fn close_instance(rng: &mut Rng8) -> (CircularReference, Walk, Walk) {
    let l = rng.random_range(4..=9);
    let host = Arc::new(Graph::cycle(l).expect("cycle graph"));
    let lap: Vec<usize> = (0..l).collect();
    let c = CircularReference::from_lap(host.clone(), &lap).expect("lap");
    let len = rng.random_range(1..=20);
    let start = rng.random_range(0..l);
    let z = random_walk(rng, &host, start, len);
    let mut z2: Vec<usize> = Vec::with_capacity(len);
    for i in 0..len {
        let ok = |y: usize| {
            host.adjacent(y, z[i])
                && z.get(i + 1).is_none_or(|&n| host.adjacent(y, n))
                && z2.last().is_none_or(|&p| host.adjacent(p, y))
        };
        let options: Vec<usize> = (0..l).filter(|&y| ok(y)).collect();
        z2.push(options[rng.random_range(0..options.len())]);
    }
    (
        c,
        Walk::plain(host.clone(), z).expect("random walk"),
        Walk::plain(host, z2).expect("close walk"),
    )
}

fn q(n: u64, d: u64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Positive parts summing to `total`.
fn split(rng: &mut Rng8, total: &BigRational, parts: usize) -> Vec<BigRational> {
    let w: Vec<u64> = (0..parts).map(|_| rng.random_range(1..10)).collect();
    let sum: u64 = w.iter().sum();
    w.into_iter().map(|x| total * q(x, sum)).collect()
}

/// A chain through random points following the given kinds (0 = H, 1 = V,
/// 2 = S). The root is strictly inside `(0,1)`.
pub fn chain_with_kinds(rng: &mut Rng8, kinds: &[u8]) -> PLChain {
    let mut kinds = kinds.to_vec();
    if !kinds.iter().any(|&k| k != 1) {
        kinds.push(0);
    }
    if !kinds.iter().any(|&k| k != 0) {
        kinds.push(1);
    }
    let x0 = q(rng.random_range(1..16), 16);
    let dx = split(rng, &x0, kinds.iter().filter(|&&k| k != 1).count());
    let dy = split(
        rng,
        &(BigRational::one() - &x0),
        kinds.iter().filter(|&&k| k != 0).count(),
    );
    let (mut ix, mut iy) = (0, 0);
    let mut p = (x0.clone(), x0);
    let mut pts = vec![p.clone()];
    for k in kinds {
        if k != 1 {
            p.0 = &p.0 - &dx[ix];
            ix += 1;
        }
        if k != 0 {
            p.1 = &p.1 + &dy[iy];
            iy += 1;
        }
        pts.push(p.clone());
    }
    // the sums are exact, so the last point is (0, 1)
    PLChain::new(pts).expect("valid chain")
}

pub fn random_kinds(rng: &mut Rng8) -> Vec<u8> {
    let len = rng.random_range(1..=6);
    (0..len).map(|_| rng.random_range(0..3)).collect()
}

pub fn random_chain(rng: &mut Rng8) -> PLChain {
    let kinds = random_kinds(rng);
    chain_with_kinds(rng, &kinds)
}

pub fn random_homeo(rng: &mut Rng8) -> PLHomeomorphism {
    let pieces = rng.random_range(1..=5);
    let one = BigRational::one();
    let cum = |parts: Vec<BigRational>| {
        let mut acc = BigRational::zero();
        let mut out = vec![acc.clone()];
        for p in parts {
            acc += p;
            out.push(acc.clone());
        }
        out
    };
    let xs = cum(split(rng, &one, pieces));
    let ys = cum(split(rng, &one, pieces));
    PLHomeomorphism::new(xs.into_iter().zip(ys).collect()).expect("increasing breakpoints")
}

/// A circle chain whose growth polyline takes up to five monotone steps.
pub fn random_circle_chain(rng: &mut Rng8) -> CircleChain {
    let steps = rng.random_range(1..=5);
    let mut raw: Vec<(u64, u64)> = (0..steps)
        .map(|_| (rng.random_range(0..4), rng.random_range(0..4)))
        .filter(|s| *s != (0, 0))
        .collect();
    if raw.is_empty() {
        raw.push((1, 1));
    }
    let total: u64 = raw.iter().map(|s| s.0 + s.1).sum();
    let mut acc = (0, 0);
    let mut growth = vec![(BigRational::zero(), BigRational::zero())];
    for (a, b) in raw {
        acc = (acc.0 + a, acc.1 + b);
        growth.push((q(acc.0, total), q(acc.1, total)));
    }
    let root = q(rng.random_range(0..60), 60);
    CircleChain::new(root, growth).expect("valid circle chain")
}

pub fn random_rotation(rng: &mut Rng8) -> BigRational {
    BigRational::new(
        rng.random_range(-50i64..50).into(),
        rng.random_range(1i64..20).into(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use peano_core::{monotonically_refines, structure_of};

    #[test]
    fn instances_meet_their_hypotheses() {
        let mut r = rng(3);
        for _ in 0..200 {
            let (_, w, v) = invariance_instance(&mut r);
            assert!(monotonically_refines(&w, &v).unwrap().is_some());
            let (_, z, z2) = close_instance(&mut r);
            assert_eq!(z.len(), z2.len());
        }
    }

    #[test]
    fn chains_follow_their_kinds() {
        let mut r = rng(5);
        let c = chain_with_kinds(&mut r, &[1, 0, 2]);
        assert_eq!(structure_of(&c).to_string(), "[V, H, S]");
    }

    #[test]
    fn same_seed_same_instances() {
        let a = random_chain(&mut rng(11));
        let b = random_chain(&mut rng(11));
        assert_eq!(a, b);
    }
}
