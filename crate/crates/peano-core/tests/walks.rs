//! Lifting, refinement and winding through the public API.

use std::sync::Arc;

use peano_core::{
    check_monotone_invariance, classify, enumerate_monotone_epimorphisms, induce, lift_walk, monotonically_refines,
    refinement_map, BrickPartition, CircularReference, Graph, GraphMap, SpaceModel, Walk,
};

#[test]
fn lifted_walks_wind_like_their_images() {
    // C6 folded onto C3 twice around: each lap of C3 lifts to half a lap of C6
    let c6 = Arc::new(Graph::cycle(6).unwrap());
    let c3 = Arc::new(Graph::cycle(3).unwrap());
    let lap3 = CircularReference::from_lap(c3.clone(), &[0, 1, 2]).unwrap();
    let w = Walk::plain(c3.clone(), vec![0, 1, 2, 0, 1]).unwrap();
    let mut lifted_any = false;
    for a in enumerate_monotone_epimorphisms(&c6, &c3) {
        let f = GraphMap::new(c6.clone(), c3.clone(), a).unwrap();
        let v = lift_walk(&f, &w).unwrap();
        let fv = induce(&f, &v).unwrap();
        assert!(monotonically_refines(&fv, &w).unwrap().is_some());
        assert_eq!(
            lap3.winding_number(&fv).unwrap(),
            lap3.winding_number(&w).unwrap()
        );
        assert!(classify(&v).reduced);
        lifted_any = true;
    }
    assert!(lifted_any);
}

#[test]
fn circular_walks_lift_to_circular_walks() {
    let k4 = Arc::new(Graph::complete(4).unwrap());
    let p2 = Arc::new(Graph::path(2).unwrap());
    let w = Walk::circular(p2.clone(), vec![0, 1, 0]).unwrap();
    for a in enumerate_monotone_epimorphisms(&k4, &p2) {
        let f = GraphMap::new(k4.clone(), p2.clone(), a).unwrap();
        let v = lift_walk(&f, &w).unwrap();
        assert_eq!(v.kind(), w.kind());
        assert_eq!(v.first(), v.last());
    }
}

#[test]
fn band_refinement_carries_windings_down() {
    let s = Arc::new(BrickPartition::bands(SpaceModel::torus_grid(12, 4).unwrap(), 4).unwrap());
    let fine = Arc::new(s.subdivided());
    let rho = refinement_map(&fine, &s).unwrap();
    let lap: Vec<usize> = (0..4).collect();
    let c = CircularReference::from_lap(s.nerve().clone(), &lap).unwrap();
    let g = fine.nerve();
    let mut seq = vec![0];
    for _ in 0..40 {
        let x = *seq.last().unwrap();
        seq.push(*g.neighbors(x).iter().max().unwrap());
    }
    let w = Walk::plain(g.clone(), seq).unwrap();
    let image = induce(&rho.map, &w).unwrap();
    let mut collapsed = image.vertices().to_vec();
    collapsed.dedup();
    let v = Walk::plain(s.nerve().clone(), collapsed).unwrap();
    assert!(monotonically_refines(&image, &v).unwrap().is_some());
    assert!(check_monotone_invariance(&c, &image, &v).unwrap().holds());
}
