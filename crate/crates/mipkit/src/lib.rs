//! Invariant computations for finite p-groups given by finite presentations.
//!
//! The pipeline: parse a presentation, realize the group via coset
//! enumeration over the trivial subgroup (regular representation), then
//! compute group-theoretic invariants (series, class, center data) and
//! modular group algebra invariants (augmentation filtration, ideals,
//! unit group class) over GF(p). A catalog of the 2-groups of order 2^m
//! containing a cyclic subgroup of index 4 ties it together.

pub mod algebra;
pub mod bitset;
pub mod cache;
pub mod catalog;
pub mod cli;
pub mod groups;
pub mod invariants;
pub mod presentation;
pub mod todd_coxeter;
