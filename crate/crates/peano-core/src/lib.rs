//! Combinatorial toolkit for walks, winding numbers and brick partitions on
//! finite graph models of Peano continua, together with exact piecewise-linear
//! chain classification on the interval and the circle.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod graph;

pub use graph::{
    enumerate_monotone_epimorphisms, sup_distance, EpiViolation, Graph, GraphError, GraphMap,
};
pub mod walk;

pub use walk::{
    classify, concat, induce, join, lift_walk, monotonically_refines, reduce, refines, Walk,
    WalkError, WalkFlags, WalkKind,
};
pub mod winding;

pub use winding::{
    check_monotone_invariance, close_walks_bound, initial_segment_winding,
    initial_segment_winding_via, CircularReference, WindingError,
};
pub mod space;

pub use space::{
    amalgam, core, nerve, refinement_map, star, subdivide, BrickPartition, Family, RefinementMap,
    SpaceError, SpaceModel,
};
pub mod calculus;
pub use calculus::{pair_refines, CalculusError, WalkOnPartition, DEFAULT_BUDGET};
pub mod amalgamation;
pub mod chain;
pub use chain::{
    are_equivalent, circle_reduce, conjugating_homeo, decompose, is_generic, structure_of,
    ChainError, ChainStructure, CircleChain, PLChain, PLHomeomorphism, Subchain,
    SubchainDecomposition, SubchainKind,
};
